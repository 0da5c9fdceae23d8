//! Max-hold spectrograms.
//!
//! A frame is cut into rectangular (unwindowed) segments of `n_seg` samples
//! advancing by `hop = n_seg - n_overlap`. Each segment's `n_seg`-point DFT
//! magnitude is taken in dB and the spectrum is centred so that bin
//! `dim_f / 2` is 0 Hz. Groups of `n_pool` consecutive columns are then
//! collapsed by a per-bin maximum and the result is min-max normalized to
//! `[0, 1]`.

mod render;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

pub use render::{
    burn_boxes, decode_png, encode_png, pixels, read_grid, render, render_with_boxes, write_grid,
    RawGrid, GRID_MAGIC,
};

use crate::error::{Error, Result};
use crate::waveform::IqBuffer;

/// Dynamic range kept below the frame maximum, in dB.
pub const DB_RANGE: f64 = 120.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PresetSize {
    S,
    M,
    L,
}

impl PresetSize {
    pub const ALL: [PresetSize; 3] = [PresetSize::S, PresetSize::M, PresetSize::L];

    pub fn dim(self) -> usize {
        match self {
            PresetSize::S => 128,
            PresetSize::M => 256,
            PresetSize::L => 512,
        }
    }
}

impl fmt::Display for PresetSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PresetSize::S => "S",
            PresetSize::M => "M",
            PresetSize::L => "L",
        })
    }
}

impl FromStr for PresetSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "S" | "s" => Ok(PresetSize::S),
            "M" | "m" => Ok(PresetSize::M),
            "L" | "l" => Ok(PresetSize::L),
            _ => Err(Error::Config(format!("unknown preset `{s}` (expected S, M or L)"))),
        }
    }
}

/// Frame family a standard preset belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    /// 500 MHz, 2 ms frames.
    Wideband,
    /// 10 MHz, 80 ms frames.
    Cbrs,
}

impl Band {
    /// Max-hold pooling factor of each standard preset.
    pub fn n_pool(self, size: PresetSize) -> usize {
        match (self, size) {
            (Band::Wideband, PresetSize::S) => 75,
            (Band::Wideband, PresetSize::M) => 19,
            (Band::Wideband, PresetSize::L) => 4,
            (Band::Cbrs, PresetSize::S) => 60,
            (Band::Cbrs, PresetSize::M) => 30,
            (Band::Cbrs, PresetSize::L) => 15,
        }
    }
}

/// STFT and pooling dimensions of one output resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolutionPreset {
    pub name: Option<(Band, PresetSize)>,
    pub dim_t: usize,
    pub dim_f: usize,
    pub n_pool: usize,
    pub n_seg: usize,
    pub n_overlap: usize,
}

impl ResolutionPreset {
    /// Standard preset for frames of `n_samples`.
    ///
    /// `n_seg = dim_f` and the hop is the largest that still yields
    /// `dim_t * n_pool` columns: `hop = floor(N / (dim_t * n_pool))`, capped at
    /// `n_seg` (no overlap). Surplus trailing columns are dropped.
    pub fn standard(band: Band, size: PresetSize, n_samples: usize) -> Result<Self> {
        let dim = size.dim();
        let n_pool = band.n_pool(size);
        let hop = n_samples / (dim * n_pool);
        if hop == 0 {
            return Err(Error::domain(format!(
                "{n_samples} samples cannot fill {dim} x {n_pool} columns"
            )));
        }
        let n_overlap = dim.saturating_sub(hop);
        let preset = ResolutionPreset {
            name: Some((band, size)),
            dim_t: dim,
            dim_f: dim,
            n_pool,
            n_seg: dim,
            n_overlap,
        };
        if preset.column_count(n_samples) < preset.required_columns() {
            return Err(Error::domain(format!(
                "preset {size} needs {} columns, {n_samples} samples give {}",
                preset.required_columns(),
                preset.column_count(n_samples)
            )));
        }
        Ok(preset)
    }

    pub fn custom(dim_t: usize, n_seg: usize, n_pool: usize, n_overlap: usize) -> Result<Self> {
        if dim_t == 0 || n_seg == 0 || n_pool == 0 || n_overlap >= n_seg {
            return Err(Error::domain(format!(
                "invalid preset dim_t={dim_t} n_seg={n_seg} n_pool={n_pool} n_overlap={n_overlap}"
            )));
        }
        Ok(ResolutionPreset {
            name: None,
            dim_t,
            dim_f: n_seg,
            n_pool,
            n_seg,
            n_overlap,
        })
    }

    pub fn hop(&self) -> usize {
        self.n_seg - self.n_overlap
    }

    pub fn required_columns(&self) -> usize {
        self.dim_t * self.n_pool
    }

    /// Full segments available in `n_samples`.
    pub fn column_count(&self, n_samples: usize) -> usize {
        if n_samples < self.n_seg {
            0
        } else {
            (n_samples - self.n_seg) / self.hop() + 1
        }
    }

    /// Time bins before truncation, `floor((N - n_overlap) / (n_pool * hop))`.
    pub fn time_bins_for(&self, n_samples: usize) -> usize {
        n_samples.saturating_sub(self.n_overlap) / (self.n_pool * self.hop())
    }

    pub fn time_res(&self, sample_rate: f64) -> f64 {
        (self.hop() * self.n_pool) as f64 / sample_rate
    }

    pub fn freq_res(&self, sample_rate: f64) -> f64 {
        sample_rate / self.dim_f as f64
    }

    /// Identifier stored in raw grid headers. Custom presets use 255.
    pub fn id(&self) -> u32 {
        match self.name {
            Some((band, size)) => {
                let base = if band == Band::Wideband { 0 } else { 3 };
                base + size as u32
            }
            None => 255,
        }
    }
}

/// STFT magnitudes in dB, one column of `n_bins` per segment, negative
/// frequencies first.
#[derive(Debug, Clone, PartialEq)]
pub struct StftColumns {
    pub n_bins: usize,
    pub n_cols: usize,
    pub hop: usize,
    pub sample_rate: f64,
    pub db: Vec<f64>,
}

impl StftColumns {
    pub fn column(&self, c: usize) -> &[f64] {
        &self.db[c * self.n_bins..(c + 1) * self.n_bins]
    }

    /// Centre frequency of bin `b` in Hz.
    pub fn bin_frequency(&self, b: usize) -> f64 {
        (b as f64 - (self.n_bins / 2) as f64) * self.sample_rate / self.n_bins as f64
    }
}

/// Normalized max-hold grid, indexed `[t * dim_f + f]` with `f` ascending in
/// frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub grid: Vec<f64>,
    pub dim_t: usize,
    pub dim_f: usize,
    pub time_res: f64,
    pub freq_res: f64,
    pub preset: ResolutionPreset,
}

impl Spectrogram {
    pub fn at(&self, t: usize, f: usize) -> f64 {
        self.grid[t * self.dim_f + f]
    }
}

fn power_column(fft: &Arc<dyn Fft<f64>>, segment: &[Complex64], buf: &mut [Complex64], scratch: &mut [Complex64], out: &mut [f64]) {
    buf.copy_from_slice(segment);
    fft.process_with_scratch(buf, scratch);
    let n = buf.len();
    let half = n / 2;
    // centre: output bin b holds DFT index (b + n/2) mod n
    for (b, o) in out.iter_mut().enumerate() {
        *o = buf[(b + half) % n].norm_sqr();
    }
}

/// Unwindowed STFT magnitudes in dB.
///
/// Values are `20 log10 |X|`, floored at [`DB_RANGE`] below the largest value
/// in the frame (or at `-DB_RANGE` for an all-zero frame).
pub fn stft_magnitude(iq: &IqBuffer, preset: &ResolutionPreset) -> Result<StftColumns> {
    let n_seg = preset.n_seg;
    if iq.len() < n_seg {
        return Err(Error::domain(format!(
            "frame of {} samples is shorter than one {n_seg}-sample segment",
            iq.len()
        )));
    }
    let hop = preset.hop();
    let n_cols = preset.column_count(iq.len());
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n_seg);
    let scratch_len = fft.get_inplace_scratch_len();

    let mut power = vec![0.0f64; n_cols * n_seg];
    power.par_chunks_mut(n_seg).enumerate().for_each_init(
        || {
            (
                vec![Complex64::new(0.0, 0.0); n_seg],
                vec![Complex64::new(0.0, 0.0); scratch_len],
            )
        },
        |(buf, scratch), (c, out)| {
            let start = c * hop;
            power_column(&fft, &iq.samples[start..start + n_seg], buf, scratch, out);
        },
    );

    let peak = power.iter().copied().fold(0.0f64, f64::max);
    let floor_db = if peak > 0.0 { 10.0 * peak.log10() - DB_RANGE } else { -DB_RANGE };
    power.par_iter_mut().for_each(|p| {
        let db = if *p > 0.0 { 10.0 * p.log10() } else { f64::NEG_INFINITY };
        *p = db.max(floor_db);
    });

    Ok(StftColumns {
        n_bins: n_seg,
        n_cols,
        hop,
        sample_rate: iq.sample_rate,
        db: power,
    })
}

/// Per-bin maximum over each group of `n_pool` consecutive columns, before
/// normalization. Columns past `dim_t * n_pool` are dropped.
pub fn max_hold_raw(columns: &StftColumns, preset: &ResolutionPreset) -> Result<Vec<f64>> {
    let need = preset.required_columns();
    if columns.n_cols < need {
        return Err(Error::domain(format!(
            "max-hold needs {need} columns, only {} available",
            columns.n_cols
        )));
    }
    if columns.n_bins != preset.dim_f {
        return Err(Error::domain(format!(
            "column height {} does not match preset dim_f {}",
            columns.n_bins, preset.dim_f
        )));
    }
    let n_bins = columns.n_bins;
    let mut grid = vec![f64::NEG_INFINITY; preset.dim_t * n_bins];
    grid.par_chunks_mut(n_bins).enumerate().for_each(|(t, out)| {
        for c in t * preset.n_pool..(t + 1) * preset.n_pool {
            for (o, &v) in out.iter_mut().zip(columns.column(c)) {
                if v > *o {
                    *o = v;
                }
            }
        }
    });
    Ok(grid)
}

/// Min-max normalization to `[0, 1]`; a constant grid maps to zeros.
pub fn normalize(grid: &mut [f64]) {
    let lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    for v in grid.iter_mut() {
        *v = if span > 0.0 { (*v - lo) / span } else { 0.0 };
    }
}

/// Max-hold pooling followed by per-frame normalization.
pub fn max_hold(columns: &StftColumns, preset: &ResolutionPreset) -> Result<Spectrogram> {
    let mut grid = max_hold_raw(columns, preset)?;
    normalize(&mut grid);
    Ok(Spectrogram {
        grid,
        dim_t: preset.dim_t,
        dim_f: preset.dim_f,
        time_res: (columns.hop * preset.n_pool) as f64 / columns.sample_rate,
        freq_res: columns.sample_rate / columns.n_bins as f64,
        preset: *preset,
    })
}

/// `stft_magnitude` then `max_hold`.
pub fn spectrogram(iq: &IqBuffer, preset: &ResolutionPreset) -> Result<Spectrogram> {
    max_hold(&stft_magnitude(iq, preset)?, preset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tone(n: usize, fs: f64, f: f64) -> IqBuffer {
        IqBuffer {
            samples: (0..n)
                .map(|k| Complex64::cis(2.0 * PI * f * k as f64 / fs))
                .collect(),
            sample_rate: fs,
        }
    }

    fn columns_from(values: &[f64], n_bins: usize) -> StftColumns {
        StftColumns {
            n_bins,
            n_cols: values.len() / n_bins,
            hop: 1,
            sample_rate: 1.0,
            db: values.to_vec(),
        }
    }

    #[test]
    fn wideband_small_preset_dimensions() {
        let p = ResolutionPreset::standard(Band::Wideband, PresetSize::S, 1_000_000).unwrap();
        assert_eq!((p.n_seg, p.hop(), p.n_overlap), (128, 104, 24));
        assert!(p.column_count(1_000_000) >= p.required_columns());
        assert!((p.time_res(500e6) - 15.6e-6).abs() < 1e-12);
        assert!((p.freq_res(500e6) - 3.90625e6).abs() < 1e-6);
        assert_eq!(p.time_bins_for(1_000_000), 128);
    }

    #[test]
    fn tone_peaks_at_its_bin() {
        let p = ResolutionPreset::custom(4, 64, 2, 0).unwrap();
        let fs = 64e6;
        for k in [-20i32, -1, 0, 3, 31] {
            let cols = stft_magnitude(&tone(64 * 8, fs, k as f64 * 1e6), &p).unwrap();
            for c in 0..cols.n_cols {
                let col = cols.column(c);
                let argmax = (0..64).max_by(|&a, &b| col[a].total_cmp(&col[b])).unwrap();
                assert_eq!(argmax as i32, k + 32);
                assert!((cols.bin_frequency(argmax) - k as f64 * 1e6).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn silence_is_floor() {
        let p = ResolutionPreset::custom(2, 16, 2, 4).unwrap();
        let cols = stft_magnitude(&IqBuffer::zeros(200, 1.0), &p).unwrap();
        assert!(cols.db.iter().all(|&v| v == -DB_RANGE));
    }

    #[test]
    fn short_frame_rejected() {
        let p = ResolutionPreset::custom(2, 16, 2, 4).unwrap();
        assert!(stft_magnitude(&IqBuffer::zeros(15, 1.0), &p).is_err());
    }

    #[test]
    fn unit_pooling_is_identity() {
        let vals: Vec<f64> = (0..24).map(|v| (v * 7 % 11) as f64).collect();
        let cols = columns_from(&vals, 4);
        let p = ResolutionPreset::custom(6, 4, 1, 0).unwrap();
        assert_eq!(max_hold_raw(&cols, &p).unwrap(), vals);
    }

    #[test]
    fn too_few_columns_reports_counts() {
        let cols = columns_from(&[0.0; 12], 4);
        let p = ResolutionPreset::custom(2, 4, 2, 0).unwrap();
        let err = max_hold_raw(&cols, &p).unwrap_err().to_string();
        assert!(err.contains('4') && err.contains('3'), "{err}");
    }

    #[test]
    fn normalization_hits_endpoints() {
        let cols = columns_from(&[1.0, 5.0, 3.0, 2.0, 9.0, 4.0, 0.0, 7.0], 4);
        let p = ResolutionPreset::custom(2, 4, 1, 0).unwrap();
        let s = max_hold(&cols, &p).unwrap();
        assert!(s.grid.contains(&0.0) && s.grid.contains(&1.0));
        assert!(s.grid.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn preset_ids() {
        let s = ResolutionPreset::standard(Band::Wideband, PresetSize::S, 1_000_000).unwrap();
        let l = ResolutionPreset::standard(Band::Cbrs, PresetSize::L, 800_000).unwrap();
        assert_eq!((s.id(), l.id()), (0, 5));
        assert_eq!(ResolutionPreset::custom(2, 4, 1, 0).unwrap().id(), 255);
    }
}
