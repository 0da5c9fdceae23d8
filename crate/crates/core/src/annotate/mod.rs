//! Time-frequency boxes in YOLO layout.
//!
//! `x` runs along time (0 = frame start), `y` along frequency with 0 at
//! `+fs/2` and 1 at `-fs/2`, matching the top-down orientation of rendered
//! spectrogram images.

mod labels;
mod nist;

pub use labels::{format_labels, parse_labels, read_labels, write_labels};
pub use nist::{annotate_nist, annotate_nist_records, read_nist_metadata, NistClass, NistRecord};

use crate::error::{Error, Result};
use crate::scene::{EmitterInstance, FrameGeometry};
use crate::waveform::{Modulation, WaveformParams};

/// Pad added to `1/t` bandwidth estimates, as a fraction of `1/t`.
pub const BANDWIDTH_PAD: f64 = 0.5;

/// Normalized centre/size box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub x_c: f64,
    pub y_c: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    pub fn new(x_c: f64, y_c: f64, w: f64, h: f64) -> Result<Self> {
        let all_finite = [x_c, y_c, w, h].iter().all(|v| v.is_finite());
        if !all_finite || w <= 0.0 || h <= 0.0 {
            return Err(Error::domain(format!(
                "box ({x_c}, {y_c}, {w}, {h}) must be finite with positive size"
            )));
        }
        Ok(BBox { x_c, y_c, w, h })
    }

    /// Box spanning `[x0, x1] x [y0, y1]`, or `None` if it has no area.
    pub fn from_corners(x0: f64, y0: f64, x1: f64, y1: f64) -> Option<Self> {
        (x1 > x0 && y1 > y0).then_some(BBox {
            x_c: 0.5 * (x0 + x1),
            y_c: 0.5 * (y0 + y1),
            w: x1 - x0,
            h: y1 - y0,
        })
    }

    /// `(x0, y0, x1, y1)`.
    pub fn corners(&self) -> (f64, f64, f64, f64) {
        (
            self.x_c - 0.5 * self.w,
            self.y_c - 0.5 * self.h,
            self.x_c + 0.5 * self.w,
            self.y_c + 0.5 * self.h,
        )
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    /// Whether the box lies in the unit square, allowing `tol` of slack.
    pub fn inside_unit(&self, tol: f64) -> bool {
        let (x0, y0, x1, y1) = self.corners();
        x0 >= -tol && y0 >= -tol && x1 <= 1.0 + tol && y1 <= 1.0 + tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Annotation {
    pub class_id: u32,
    pub bbox: BBox,
}

/// Occupied bandwidth in Hz.
///
/// Chirps occupy their sweep. Rect pulses occupy `1.5 / t_pw`; coded pulses
/// `1.5 / t_chip` with `t_chip = t_pw / n_chip`.
pub fn est_bandwidth(params: &WaveformParams) -> f64 {
    match params.modulation() {
        Modulation::Lfm { b_chirp, .. } | Modulation::Fmcw { b_chirp, .. } => *b_chirp,
        Modulation::Pulsed { t_pw, code, .. } => {
            let n_chip = code.as_ref().map_or(1, |c| c.n_chip());
            let t = t_pw / n_chip as f64;
            (1.0 + BANDWIDTH_PAD) / t
        }
    }
}

/// Clips the extent `[t0, t1] x [f_lo, f_hi]` to the frame and normalizes it.
pub fn box_from_extents(
    t0: f64,
    t1: f64,
    f_lo: f64,
    f_hi: f64,
    duration: f64,
    sample_rate: f64,
) -> Option<BBox> {
    let half = 0.5 * sample_rate;
    let x0 = (t0 / duration).clamp(0.0, 1.0);
    let x1 = (t1 / duration).clamp(0.0, 1.0);
    let f_lo = f_lo.max(-half);
    let f_hi = f_hi.min(half);
    let y0 = ((half - f_hi) / sample_rate).clamp(0.0, 1.0);
    let y1 = ((half - f_lo) / sample_rate).clamp(0.0, 1.0);
    BBox::from_corners(x0, y0, x1, y1)
}

/// Label for one emitter, or `None` (with a warning) when clipping leaves no
/// area.
pub fn bbox_for_emitter(e: &EmitterInstance, frame_duration: f64, sample_rate: f64) -> Option<Annotation> {
    let b = est_bandwidth(&e.params);
    let t1 = e.t_s + e.params.emission_duration();
    match box_from_extents(e.t_s, t1, e.f_c - 0.5 * b, e.f_c + 0.5 * b, frame_duration, sample_rate) {
        Some(bbox) => Some(Annotation {
            class_id: e.class().id(),
            bbox,
        }),
        None => {
            log::warn!(
                "{} emitter at t_s={} f_c={} clipped out of the frame",
                e.class(),
                e.t_s,
                e.f_c
            );
            None
        }
    }
}

/// Labels for every emitter of a frame that survives clipping.
pub fn annotate_emitters(emitters: &[EmitterInstance], geom: &FrameGeometry) -> Vec<Annotation> {
    emitters
        .iter()
        .filter_map(|e| bbox_for_emitter(e, geom.duration(), geom.sample_rate))
        .collect()
}
