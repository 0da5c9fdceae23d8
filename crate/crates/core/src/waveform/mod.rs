//! Complex baseband synthesis for the eleven radar classes.
//!
//! Every waveform has a unit complex envelope while transmitting and is
//! exactly zero in the gaps between pulses. Edges that fall between samples
//! are rounded half-up to the nearest sample index.

mod codes;

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

pub use codes::{code_generate, wrap_phase, zadoff_chu_roots, CodeFamily, PhaseCode};

use crate::error::{Error, Result};

/// The eleven emitter classes. Discriminants are the label class ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RadarClass {
    Barker = 0,
    Fmcw = 1,
    Frank = 2,
    Lfm = 3,
    P1 = 4,
    P2 = 5,
    P3 = 6,
    P4 = 7,
    Px = 8,
    Rect = 9,
    ZadoffChu = 10,
}

impl RadarClass {
    pub const ALL: [RadarClass; 11] = [
        RadarClass::Barker,
        RadarClass::Fmcw,
        RadarClass::Frank,
        RadarClass::Lfm,
        RadarClass::P1,
        RadarClass::P2,
        RadarClass::P3,
        RadarClass::P4,
        RadarClass::Px,
        RadarClass::Rect,
        RadarClass::ZadoffChu,
    ];

    pub fn id(self) -> u32 {
        self as u32
    }

    pub fn from_id(id: u32) -> Option<RadarClass> {
        RadarClass::ALL.get(id as usize).copied()
    }

    /// Phase-code family for coded pulse classes.
    pub fn code_family(self) -> Option<CodeFamily> {
        Some(match self {
            RadarClass::Barker => CodeFamily::Barker,
            RadarClass::Frank => CodeFamily::Frank,
            RadarClass::P1 => CodeFamily::P1,
            RadarClass::P2 => CodeFamily::P2,
            RadarClass::P3 => CodeFamily::P3,
            RadarClass::P4 => CodeFamily::P4,
            RadarClass::Px => CodeFamily::Px,
            RadarClass::ZadoffChu => CodeFamily::ZadoffChu,
            RadarClass::Rect | RadarClass::Lfm | RadarClass::Fmcw => return None,
        })
    }

    pub fn is_chirped(self) -> bool {
        matches!(self, RadarClass::Lfm | RadarClass::Fmcw)
    }

    pub fn name(self) -> &'static str {
        match self {
            RadarClass::Barker => "Barker",
            RadarClass::Fmcw => "FMCW",
            RadarClass::Frank => "Frank",
            RadarClass::Lfm => "LFM",
            RadarClass::P1 => "P1",
            RadarClass::P2 => "P2",
            RadarClass::P3 => "P3",
            RadarClass::P4 => "P4",
            RadarClass::Px => "Px",
            RadarClass::Rect => "Rect",
            RadarClass::ZadoffChu => "ZadoffChu",
        }
    }
}

impl fmt::Display for RadarClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RadarClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RadarClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::domain(format!("unknown radar class `{s}`")))
    }
}

/// Timing of a class, carrying only the parameters that class uses.
#[derive(Debug, Clone, PartialEq)]
pub enum Modulation {
    /// Rect and phase-coded pulse trains. `code` is `None` for Rect.
    Pulsed {
        t_pw: f64,
        f_prf: f64,
        n_pulse: u32,
        code: Option<PhaseCode>,
    },
    /// Chirps repeated every `1 / f_prf`.
    Lfm {
        b_chirp: f64,
        t_chirp: f64,
        n_chirp: u32,
        f_prf: f64,
    },
    /// Back-to-back sawtooth chirps.
    Fmcw {
        b_chirp: f64,
        t_chirp: f64,
        n_chirp: u32,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveformParams {
    class: RadarClass,
    modulation: Modulation,
    phi: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

impl WaveformParams {
    pub fn new(class: RadarClass, modulation: Modulation, phi: f64) -> Result<Self> {
        if !(phi.is_finite() && phi.abs() <= FRAC_PI_4 + 1e-12) {
            return Err(Error::domain(format!("phi {phi} outside [-pi/4, pi/4]")));
        }
        match (&modulation, class) {
            (Modulation::Pulsed { t_pw, f_prf, n_pulse, code }, _) if !class.is_chirped() => {
                positive("t_pw", *t_pw)?;
                positive("f_prf", *f_prf)?;
                if *n_pulse == 0 {
                    return Err(Error::domain("n_pulse must be at least 1"));
                }
                if t_pw * f_prf >= 1.0 {
                    return Err(Error::domain(format!(
                        "pulse width {t_pw} s does not fit the repetition interval {} s",
                        1.0 / f_prf
                    )));
                }
                let want = class.code_family();
                let got = code.as_ref().map(PhaseCode::family);
                if want != got {
                    return Err(Error::domain(format!(
                        "{class} needs phase code {want:?}, got {got:?}"
                    )));
                }
            }
            (Modulation::Lfm { b_chirp, t_chirp, n_chirp, f_prf }, RadarClass::Lfm) => {
                positive("b_chirp", *b_chirp)?;
                positive("t_chirp", *t_chirp)?;
                positive("f_prf", *f_prf)?;
                if *n_chirp == 0 {
                    return Err(Error::domain("n_chirp must be at least 1"));
                }
                if t_chirp * f_prf >= 1.0 {
                    return Err(Error::domain("chirp does not fit its repetition interval"));
                }
            }
            (Modulation::Fmcw { b_chirp, t_chirp, n_chirp }, RadarClass::Fmcw) => {
                positive("b_chirp", *b_chirp)?;
                positive("t_chirp", *t_chirp)?;
                if *n_chirp == 0 {
                    return Err(Error::domain("n_chirp must be at least 1"));
                }
            }
            _ => {
                return Err(Error::domain(format!(
                    "modulation {modulation:?} does not belong to class {class}"
                )))
            }
        }
        Ok(WaveformParams { class, modulation, phi })
    }

    pub fn class(&self) -> RadarClass {
        self.class
    }

    pub fn modulation(&self) -> &Modulation {
        &self.modulation
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn phase_code(&self) -> Option<&PhaseCode> {
        match &self.modulation {
            Modulation::Pulsed { code, .. } => code.as_ref(),
            _ => None,
        }
    }

    /// Time from the leading edge of the first pulse or chirp to the
    /// trailing edge of the last one, in seconds.
    pub fn emission_duration(&self) -> f64 {
        match self.modulation {
            Modulation::Pulsed { t_pw, f_prf, n_pulse, .. } => {
                (n_pulse - 1) as f64 / f_prf + t_pw
            }
            Modulation::Lfm { t_chirp, n_chirp, f_prf, .. } => {
                (n_chirp - 1) as f64 / f_prf + t_chirp
            }
            Modulation::Fmcw { t_chirp, n_chirp, .. } => n_chirp as f64 * t_chirp,
        }
    }
}

/// Complex baseband samples at a fixed rate.
#[derive(Debug, Clone, PartialEq)]
pub struct IqBuffer {
    pub samples: Vec<Complex64>,
    pub sample_rate: f64,
}

impl IqBuffer {
    pub fn zeros(len: usize, sample_rate: f64) -> Self {
        IqBuffer {
            samples: vec![Complex64::new(0.0, 0.0); len],
            sample_rate,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|s| s.re.is_finite() && s.im.is_finite())
    }

    /// Interleaved little-endian `f32` I,Q pairs.
    pub fn to_f32_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.samples.len() * 8);
        for s in &self.samples {
            out.extend_from_slice(&(s.re as f32).to_le_bytes());
            out.extend_from_slice(&(s.im as f32).to_le_bytes());
        }
        out
    }

    pub fn from_f32_le_bytes(bytes: &[u8], sample_rate: f64) -> Result<Self> {
        if !bytes.len().is_multiple_of(8) {
            return Err(Error::domain(format!(
                "raw I/Q length {} is not a multiple of 8 bytes",
                bytes.len()
            )));
        }
        let samples = bytes
            .chunks_exact(8)
            .map(|c| {
                let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
                let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
                Complex64::new(re as f64, im as f64)
            })
            .collect();
        Ok(IqBuffer { samples, sample_rate })
    }
}

/// Duration in samples, rounded half-up.
pub fn duration_samples(seconds: f64, sample_rate: f64) -> usize {
    (seconds * sample_rate + 0.5).floor().max(0.0) as usize
}

/// Round-half-up of `num / den` for integers.
fn div_round(num: usize, den: usize) -> usize {
    (2 * num + den) / (2 * den)
}

/// Pulse train for Rect and the phase-coded classes.
///
/// Pulse `k` starts at sample `round(k / f_prf * fs)` and lasts
/// `round(t_pw * fs)` samples. Coded pulses split each pulse into `n_chip`
/// chips whose edges are rounded to the nearest sample. The buffer ends at the
/// trailing edge of the last pulse.
pub fn synth_pulsed(params: &WaveformParams, sample_rate: f64) -> Result<IqBuffer> {
    let Modulation::Pulsed { t_pw, f_prf, n_pulse, ref code } = params.modulation else {
        return Err(Error::domain(format!("{} is not a pulsed class", params.class)));
    };
    if t_pw >= 1.0 / f_prf {
        return Err(Error::domain("pulse width must be shorter than the repetition interval"));
    }
    let pulse_len = duration_samples(t_pw, sample_rate);
    if pulse_len == 0 {
        return Err(Error::domain(format!(
            "pulse width {t_pw} s is shorter than one sample at {sample_rate} Hz"
        )));
    }

    // one phasor per chip, or a single phasor for an uncoded pulse
    let phasors: Vec<Complex64> = match code {
        Some(c) => c.chips().iter().map(|&p| Complex64::cis(p + params.phi)).collect(),
        None => vec![Complex64::cis(params.phi)],
    };
    let n_chip = phasors.len();
    let mut pulse = Vec::with_capacity(pulse_len);
    for (chip, &phasor) in phasors.iter().enumerate() {
        let start = div_round(chip * pulse_len, n_chip);
        let end = div_round((chip + 1) * pulse_len, n_chip);
        pulse.extend(std::iter::repeat_n(phasor, end - start));
    }

    let starts: Vec<usize> = (0..n_pulse as usize)
        .map(|k| duration_samples(k as f64 / f_prf, sample_rate))
        .collect();
    let total = starts.last().copied().unwrap_or(0) + pulse_len;
    let mut out = IqBuffer::zeros(total, sample_rate);
    for s in starts {
        out.samples[s..s + pulse_len].copy_from_slice(&pulse);
    }
    Ok(out)
}

/// LFM and FMCW chirp trains sweeping `-b/2 .. +b/2` over each chirp.
///
/// FMCW chirps are contiguous; LFM chirps start every `1 / f_prf` with zeros
/// in between. The sweep restarts at every chirp (sawtooth).
pub fn synth_chirped(params: &WaveformParams, sample_rate: f64) -> Result<IqBuffer> {
    let (b_chirp, t_chirp, n_chirp, f_prf) = match params.modulation {
        Modulation::Lfm { b_chirp, t_chirp, n_chirp, f_prf } => (b_chirp, t_chirp, n_chirp, Some(f_prf)),
        Modulation::Fmcw { b_chirp, t_chirp, n_chirp } => (b_chirp, t_chirp, n_chirp, None),
        Modulation::Pulsed { .. } => {
            return Err(Error::domain(format!("{} is not a chirped class", params.class)))
        }
    };
    if b_chirp > sample_rate {
        return Err(Error::domain(format!(
            "chirp bandwidth {b_chirp} Hz exceeds sample rate {sample_rate} Hz"
        )));
    }
    let chirp_len = duration_samples(t_chirp, sample_rate);
    if chirp_len == 0 {
        return Err(Error::domain("chirp shorter than one sample"));
    }

    let rate = b_chirp / t_chirp;
    let chirp: Vec<Complex64> = (0..chirp_len)
        .map(|m| {
            let t = m as f64 / sample_rate;
            let phase = 2.0 * PI * (-0.5 * b_chirp * t + 0.5 * rate * t * t) + params.phi;
            Complex64::cis(phase)
        })
        .collect();

    let starts: Vec<usize> = (0..n_chirp as usize)
        .map(|k| match f_prf {
            Some(prf) => duration_samples(k as f64 / prf, sample_rate),
            None => k * chirp_len,
        })
        .collect();
    let total = starts.last().copied().unwrap_or(0) + chirp_len;
    let mut out = IqBuffer::zeros(total, sample_rate);
    for s in starts {
        out.samples[s..s + chirp_len].copy_from_slice(&chirp);
    }
    Ok(out)
}

/// Baseband waveform of any class.
pub fn synthesize(params: &WaveformParams, sample_rate: f64) -> Result<IqBuffer> {
    if params.class.is_chirped() {
        synth_chirped(params, sample_rate)
    } else {
        synth_pulsed(params, sample_rate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FS: f64 = 500e6;

    fn rect(t_pw: f64, f_prf: f64, n_pulse: u32, phi: f64) -> WaveformParams {
        WaveformParams::new(
            RadarClass::Rect,
            Modulation::Pulsed { t_pw, f_prf, n_pulse, code: None },
            phi,
        )
        .unwrap()
    }

    #[test]
    fn rect_two_pulses_layout() {
        let iq = synth_pulsed(&rect(10e-6, 50e3, 2, 0.0), FS).unwrap();
        assert_eq!(iq.len(), 15_000);
        for (n, s) in iq.samples.iter().enumerate() {
            if (5000..10000).contains(&n) {
                assert_eq!(*s, Complex64::new(0.0, 0.0), "gap sample {n}");
            } else {
                assert!((s.norm() - 1.0).abs() < 1e-15, "pulse sample {n}");
            }
        }
        assert_eq!(iq.samples[2500], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn barker_chips_piecewise_constant() {
        let code = code_generate(CodeFamily::Barker, 13, None).unwrap();
        let phi = 0.1;
        let params = WaveformParams::new(
            RadarClass::Barker,
            Modulation::Pulsed { t_pw: 13e-6, f_prf: 10e3, n_pulse: 1, code: Some(code.clone()) },
            phi,
        )
        .unwrap();
        let iq = synth_pulsed(&params, FS).unwrap();
        assert_eq!(iq.len(), 6500);
        for (chip, &p) in code.chips().iter().enumerate() {
            assert!(p == 0.0 || p == -PI);
            let want = Complex64::cis(p + phi);
            for s in &iq.samples[chip * 500..(chip + 1) * 500] {
                assert!((s - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn overlapping_pulses_rejected() {
        let err = WaveformParams::new(
            RadarClass::Rect,
            Modulation::Pulsed { t_pw: 30e-6, f_prf: 50e3, n_pulse: 2, code: None },
            0.0,
        );
        assert!(err.is_err());
    }

    #[test]
    fn class_and_modulation_must_agree() {
        let m = Modulation::Fmcw { b_chirp: 1e6, t_chirp: 1e-5, n_chirp: 1 };
        assert!(WaveformParams::new(RadarClass::Lfm, m.clone(), 0.0).is_err());
        assert!(WaveformParams::new(RadarClass::Fmcw, m, 0.0).is_ok());
        let coded = Modulation::Pulsed { t_pw: 1e-6, f_prf: 1e4, n_pulse: 1, code: None };
        assert!(WaveformParams::new(RadarClass::P1, coded, 0.0).is_err());
    }

    #[test]
    fn phi_range_enforced() {
        let m = Modulation::Pulsed { t_pw: 1e-6, f_prf: 1e4, n_pulse: 1, code: None };
        assert!(WaveformParams::new(RadarClass::Rect, m, 1.0).is_err());
    }

    #[test]
    fn lfm_first_sample_is_one() {
        let p = WaveformParams::new(
            RadarClass::Lfm,
            Modulation::Lfm { b_chirp: 20e6, t_chirp: 10e-6, n_chirp: 1, f_prf: 10e3 },
            0.0,
        )
        .unwrap();
        let iq = synth_chirped(&p, FS).unwrap();
        assert_eq!(iq.samples[0], Complex64::new(1.0, 0.0));
        assert_eq!(iq.len(), 5000);
    }

    #[test]
    fn lfm_has_gaps_fmcw_does_not() {
        let lfm = WaveformParams::new(
            RadarClass::Lfm,
            Modulation::Lfm { b_chirp: 20e6, t_chirp: 10e-6, n_chirp: 3, f_prf: 50e3 },
            0.0,
        )
        .unwrap();
        let iq = synth_chirped(&lfm, FS).unwrap();
        assert_eq!(iq.len(), 2 * 10_000 + 5000);
        assert_eq!(iq.samples.iter().filter(|s| s.norm() == 0.0).count(), 10_000);

        let fmcw = WaveformParams::new(
            RadarClass::Fmcw,
            Modulation::Fmcw { b_chirp: 100e6, t_chirp: 10e-6, n_chirp: 3 },
            0.0,
        )
        .unwrap();
        let iq = synth_chirped(&fmcw, FS).unwrap();
        assert_eq!(iq.len(), 15_000);
        assert!(iq.samples.iter().all(|s| (s.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn chirp_wider_than_sample_rate_rejected() {
        let p = WaveformParams::new(
            RadarClass::Fmcw,
            Modulation::Fmcw { b_chirp: 100e6, t_chirp: 10e-6, n_chirp: 1 },
            0.0,
        )
        .unwrap();
        assert!(synth_chirped(&p, 50e6).is_err());
    }

    #[test]
    fn emission_durations() {
        assert!((rect(10e-6, 50e3, 2, 0.0).emission_duration() - 30e-6).abs() < 1e-15);
        let f = WaveformParams::new(
            RadarClass::Fmcw,
            Modulation::Fmcw { b_chirp: 1e6, t_chirp: 20e-6, n_chirp: 5 },
            0.0,
        )
        .unwrap();
        assert!((f.emission_duration() - 100e-6).abs() < 1e-15);
    }

    #[test]
    fn raw_iq_round_trip() {
        let iq = synth_pulsed(&rect(1e-6, 50e3, 2, 0.3), FS).unwrap();
        let back = IqBuffer::from_f32_le_bytes(&iq.to_f32_le_bytes(), FS).unwrap();
        for (a, b) in iq.samples.iter().zip(&back.samples) {
            assert!((a - b).norm() < 1e-7);
        }
        assert!(IqBuffer::from_f32_le_bytes(&[0u8; 7], FS).is_err());
    }
}
