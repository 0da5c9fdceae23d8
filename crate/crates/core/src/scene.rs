//! Emitter sampling, frame composition and noise.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::waveform::{
    code_generate, duration_samples, synthesize, zadoff_chu_roots, CodeFamily, IqBuffer,
    Modulation, RadarClass, WaveformParams,
};

/// The six frame SNR levels in dB.
pub const SNR_LEVELS: [i32; 6] = [-20, -12, -4, 4, 12, 20];

/// Pulses and LFM chirps must leave this fraction of the repetition interval
/// unused, otherwise the draw is repeated.
const DUTY_LIMIT: f64 = 0.9;

/// Centre-frequency grid spacing.
const FC_STEP: f64 = 10e6;

/// Scene density environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Environment {
    /// At most one emitter; half the frames are background.
    Sparse1T,
    /// Up to nine emitters; a tenth of the frames are background.
    Dense9T,
    /// Narrowband single-emitter frames labelled from external metadata.
    NistLike,
}

impl Environment {
    pub fn tag(self) -> &'static str {
        match self {
            Environment::Sparse1T => "1t",
            Environment::Dense9T => "9t",
            Environment::NistLike => "nist",
        }
    }

    pub fn max_emitters(self) -> usize {
        match self {
            Environment::Sparse1T | Environment::NistLike => 1,
            Environment::Dense9T => 9,
        }
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Environment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "1t" | "sparse1t" | "sparse" => Ok(Environment::Sparse1T),
            "9t" | "dense9t" | "dense" => Ok(Environment::Dense9T),
            "nist" | "nistlike" => Ok(Environment::NistLike),
            _ => Err(Error::Config(format!("unknown environment `{s}` (expected 1t, 9t or nist)"))),
        }
    }
}

/// Sample rate and length shared by every frame of a dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameGeometry {
    pub sample_rate: f64,
    pub n_samples: usize,
}

impl FrameGeometry {
    /// 1,000,000 samples at 500 MHz (2 ms).
    pub const WIDEBAND: FrameGeometry = FrameGeometry {
        sample_rate: 500e6,
        n_samples: 1_000_000,
    };

    /// 800,000 samples at 10 MHz (80 ms).
    pub const CBRS: FrameGeometry = FrameGeometry {
        sample_rate: 10e6,
        n_samples: 800_000,
    };

    pub fn duration(&self) -> f64 {
        self.n_samples as f64 / self.sample_rate
    }
}

/// One radar emission placed in a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct EmitterInstance {
    pub params: WaveformParams,
    /// Start time in seconds from the frame start.
    pub t_s: f64,
    /// Centre frequency in Hz relative to baseband.
    pub f_c: f64,
}

impl EmitterInstance {
    pub fn class(&self) -> RadarClass {
        self.params.class()
    }
}

/// A noisy frame together with the scene that produced it.
#[derive(Debug, Clone)]
pub struct Frame {
    pub iq: IqBuffer,
    pub duration: f64,
    pub snr_db: i32,
    pub emitters: Vec<EmitterInstance>,
    pub env: Environment,
    pub frame_id: String,
    pub seed: u64,
}

fn grid_draw<R: Rng + ?Sized>(rng: &mut R, lo: i64, hi: i64, step: f64) -> f64 {
    rng.random_range(lo..=hi) as f64 * step
}

fn pick<T: Copy, R: Rng + ?Sized>(rng: &mut R, items: &[T]) -> T {
    items[rng.random_range(0..items.len())]
}

/// Draws a pulse width (1 us grid, 1..100 us) and PRF (1 kHz grid,
/// 10..50 kHz), redrawing the width until it fits the duty limit.
fn draw_pulse_timing<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let f_prf = grid_draw(rng, 10, 50, 1e3);
    loop {
        let t_pw = grid_draw(rng, 1, 100, 1e-6);
        if t_pw < DUTY_LIMIT / f_prf {
            return (t_pw, f_prf);
        }
    }
}

/// Samples parameters, start time and centre frequency for one emitter.
pub fn sample_emitter<R: Rng + ?Sized>(
    class: RadarClass,
    geom: &FrameGeometry,
    rng: &mut R,
) -> Result<EmitterInstance> {
    let modulation = match class {
        RadarClass::Lfm => {
            let b_chirp = grid_draw(rng, 10, 100, 1e6);
            let n_chirp = rng.random_range(1..=20);
            // chirp length and PRF are redrawn together; 100 us chirps never
            // fit a 50..10 kHz PRF under the duty limit
            let (t_chirp, f_prf) = loop {
                let t_chirp = grid_draw(rng, 1, 10, 10e-6);
                let f_prf = grid_draw(rng, 10, 50, 1e3);
                if t_chirp < DUTY_LIMIT / f_prf {
                    break (t_chirp, f_prf);
                }
            };
            Modulation::Lfm { b_chirp, t_chirp, n_chirp, f_prf }
        }
        RadarClass::Fmcw => Modulation::Fmcw {
            b_chirp: grid_draw(rng, 10, 100, 1e6),
            t_chirp: grid_draw(rng, 1, 10, 10e-6),
            n_chirp: rng.random_range(1..=20),
        },
        _ => {
            let (t_pw, f_prf) = draw_pulse_timing(rng);
            let n_pulse = rng.random_range(2..=10);
            let code = match class.code_family() {
                None => None,
                Some(family) => {
                    let n_chip = pick(rng, &family.sampled_lengths());
                    let root = (family == CodeFamily::ZadoffChu)
                        .then(|| pick(rng, &zadoff_chu_roots(n_chip)));
                    Some(code_generate(family, n_chip, root)?)
                }
            };
            Modulation::Pulsed { t_pw, f_prf, n_pulse, code }
        }
    };
    let phi = grid_draw(rng, -45, 45, PI / 180.0);
    let params = WaveformParams::new(class, modulation, phi)?;

    let fc_steps = (geom.sample_rate / 2.0 / FC_STEP).floor() as i64;
    let f_c = grid_draw(rng, -fc_steps, fc_steps, FC_STEP);

    let n = geom.n_samples;
    let span = duration_samples(params.emission_duration(), geom.sample_rate);
    let start = if span <= n {
        rng.random_range(0..=n - span)
    } else {
        rng.random_range(0..n)
    };
    Ok(EmitterInstance {
        params,
        t_s: start as f64 / geom.sample_rate,
        f_c,
    })
}

/// Draws the emitter list for one frame.
///
/// Sparse1T: empty with probability 0.5, else one emitter. Dense9T: empty with
/// probability 0.1, else 1..=9 emitters (uniform). Classes are uniform and
/// drawn with replacement.
pub fn sample_scene<R: Rng + ?Sized>(
    env: Environment,
    geom: &FrameGeometry,
    rng: &mut R,
) -> Result<Vec<EmitterInstance>> {
    let count = match env {
        Environment::Sparse1T => {
            if rng.random_bool(0.5) {
                0
            } else {
                1
            }
        }
        Environment::Dense9T => {
            if rng.random_bool(0.1) {
                0
            } else {
                rng.random_range(1..=9)
            }
        }
        Environment::NistLike => {
            return Err(Error::domain(
                "NIST-style scenes are labelled from metadata, not sampled",
            ))
        }
    };
    (0..count)
        .map(|_| {
            let class = pick(rng, &RadarClass::ALL);
            sample_emitter(class, geom, rng)
        })
        .collect()
}

/// Shifts, delays and sums the emitters into one clean frame.
///
/// Sample `n` of the frame gains `w[n - s0] * exp(j 2 pi f_c n / fs)` where
/// `s0 = round(t_s * fs)`. Emissions are truncated at the frame end.
pub fn compose_frame(emitters: &[EmitterInstance], geom: &FrameGeometry) -> Result<IqBuffer> {
    let mut out = IqBuffer::zeros(geom.n_samples, geom.sample_rate);
    for e in emitters {
        let wave = synthesize(&e.params, geom.sample_rate)?;
        add_shifted(&mut out, &wave, e);
    }
    Ok(out)
}

fn add_shifted(out: &mut IqBuffer, wave: &IqBuffer, e: &EmitterInstance) {
    let fs = out.sample_rate;
    let s0 = duration_samples(e.t_s, fs);
    if s0 >= out.len() {
        return;
    }
    let cycles_per_sample = e.f_c / fs;
    let end = (s0 + wave.len()).min(out.len());
    for (n, w) in (s0..end).zip(&wave.samples) {
        if w.re == 0.0 && w.im == 0.0 {
            continue;
        }
        let shifted = if e.f_c == 0.0 {
            *w
        } else {
            let turns = (cycles_per_sample * n as f64).fract();
            w * Complex64::cis(2.0 * PI * turns)
        };
        out.samples[n] += shifted;
    }
}

/// Mean power over samples that carry signal, or `None` for an all-zero frame.
pub fn active_power(clean: &IqBuffer) -> Option<f64> {
    let (sum, count) = clean
        .samples
        .iter()
        .map(Complex64::norm_sqr)
        .filter(|&p| p > 0.0)
        .fold((0.0, 0usize), |(s, c), p| (s + p, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Adds circularly-symmetric white Gaussian noise at `snr_db`.
///
/// Noise power is `P / 10^(snr/10)` where `P` is the mean power of the
/// non-zero samples of `clean`. An all-zero frame gets unit-power noise.
/// `snr_db` must be one of [`SNR_LEVELS`]; `f64::INFINITY` returns the input
/// unchanged.
pub fn add_awgn<R: Rng + ?Sized>(clean: &IqBuffer, snr_db: f64, rng: &mut R) -> Result<IqBuffer> {
    if snr_db == f64::INFINITY {
        return Ok(clean.clone());
    }
    if !SNR_LEVELS.iter().any(|&l| l as f64 == snr_db) {
        return Err(Error::domain(format!(
            "SNR {snr_db} dB not in the level grid {SNR_LEVELS:?}"
        )));
    }
    let sigma2 = match active_power(clean) {
        Some(p) => p / 10f64.powf(snr_db / 10.0),
        None => 1.0,
    };
    let scale = (sigma2 / 2.0).sqrt();
    let samples = clean
        .samples
        .iter()
        .map(|&s| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            s + Complex64::new(re, im) * scale
        })
        .collect();
    Ok(IqBuffer {
        samples,
        sample_rate: clean.sample_rate,
    })
}

/// Measured SNR of `noisy` against the known clean frame.
pub fn empirical_snr_db(clean: &IqBuffer, noisy: &IqBuffer) -> Option<f64> {
    let p_sig = active_power(clean)?;
    let p_noise = clean
        .samples
        .iter()
        .zip(&noisy.samples)
        .map(|(c, n)| (n - c).norm_sqr())
        .sum::<f64>()
        / clean.len() as f64;
    Some(10.0 * (p_sig / p_noise).log10())
}

/// Samples a scene, composes it and adds noise, all from the stream keyed by
/// `seed`. Returns the noisy frame and the clean composite.
pub fn synthesize_frame(
    env: Environment,
    geom: &FrameGeometry,
    snr_db: i32,
    frame_id: impl Into<String>,
    seed: u64,
) -> Result<(Frame, IqBuffer)> {
    let mut rng = crate::rng::stream(seed);
    let emitters = sample_scene(env, geom, &mut rng)?;
    let clean = compose_frame(&emitters, geom)?;
    let iq = add_awgn(&clean, snr_db as f64, &mut rng)?;
    let frame = Frame {
        iq,
        duration: geom.duration(),
        snr_db,
        emitters,
        env,
        frame_id: frame_id.into(),
        seed,
    };
    Ok((frame, clean))
}
