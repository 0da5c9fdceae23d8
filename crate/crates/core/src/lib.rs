//! Synthetic wideband radar spectrum-detection datasets.
//!
//! The pipeline turns a parametric radar scene into a complex baseband frame,
//! compresses it into a max-hold spectrogram at one of three resolutions, and
//! labels every emission with a YOLO-layout time-frequency box. An evaluator
//! scores detector output against those labels with mAP50 and mAP50:95,
//! stratified by frame SNR.
//!
//! ```text
//! scene::sample_scene -> scene::compose_frame -> scene::add_awgn
//!     -> spectrogram::{stft_magnitude, max_hold, render}
//!     -> annotate::{bbox_for_emitter, write_labels}
//! ```

pub mod annotate;
pub mod dataset;
pub mod error;
pub mod rng;
pub mod eval;
pub mod scene;
pub mod spectrogram;
pub mod waveform;

pub use annotate::{Annotation, BBox};
pub use dataset::{DatasetConfig, Split};
pub use error::{Error, Result};
pub use scene::{EmitterInstance, Environment, Frame, FrameGeometry};
pub use spectrogram::{PresetSize, ResolutionPreset, Spectrogram};
pub use waveform::{IqBuffer, PhaseCode, RadarClass, WaveformParams};
