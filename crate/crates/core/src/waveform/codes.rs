//! Binary and polyphase pulse-compression codes.
//!
//! Phases follow the usual LPI-radar definitions. For the M x M families
//! (Frank, P1, P2, Px) chips are emitted group by group: the outer index `j`
//! selects the group and the inner index `i` the chip within it, so chip
//! `n = (j - 1) * M + (i - 1)`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Phase-code family of a coded pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CodeFamily {
    Barker,
    Frank,
    P1,
    P2,
    P3,
    P4,
    Px,
    ZadoffChu,
}

impl CodeFamily {
    pub const ALL: [CodeFamily; 8] = [
        CodeFamily::Barker,
        CodeFamily::Frank,
        CodeFamily::P1,
        CodeFamily::P2,
        CodeFamily::P3,
        CodeFamily::P4,
        CodeFamily::Px,
        CodeFamily::ZadoffChu,
    ];

    /// Code lengths the scene sampler draws from.
    pub fn sampled_lengths(self) -> Vec<usize> {
        match self {
            CodeFamily::Barker => vec![5, 7, 11, 13],
            CodeFamily::Frank | CodeFamily::P1 | CodeFamily::Px => vec![4, 9, 16],
            CodeFamily::P2 => vec![4, 16],
            CodeFamily::P3 | CodeFamily::P4 => (4..=16).collect(),
            CodeFamily::ZadoffChu => vec![3, 5, 7, 9, 11, 13, 15],
        }
    }

    /// Lengths accepted by [`code_generate`]. Identical to the sampled set
    /// except that Zadoff-Chu also admits the degenerate length 1.
    pub fn accepts(self, n_chip: usize) -> bool {
        match self {
            CodeFamily::ZadoffChu => n_chip % 2 == 1 && n_chip <= 15,
            _ => self.sampled_lengths().contains(&n_chip),
        }
    }

    fn allowed_description(self) -> &'static str {
        match self {
            CodeFamily::Barker => "{5, 7, 11, 13}",
            CodeFamily::Frank | CodeFamily::P1 | CodeFamily::Px => "{4, 9, 16}",
            CodeFamily::P2 => "{4, 16}",
            CodeFamily::P3 | CodeFamily::P4 => "[4, 16]",
            CodeFamily::ZadoffChu => "odd values in [1, 15]",
        }
    }
}

impl fmt::Display for CodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CodeFamily::Barker => "Barker",
            CodeFamily::Frank => "Frank",
            CodeFamily::P1 => "P1",
            CodeFamily::P2 => "P2",
            CodeFamily::P3 => "P3",
            CodeFamily::P4 => "P4",
            CodeFamily::Px => "Px",
            CodeFamily::ZadoffChu => "ZadoffChu",
        };
        f.write_str(name)
    }
}

/// Chip phase sequence of a coded pulse, each phase wrapped into `[-pi, pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCode {
    family: CodeFamily,
    chips: Vec<f64>,
    root: Option<u32>,
}

impl PhaseCode {
    pub fn family(&self) -> CodeFamily {
        self.family
    }

    pub fn chips(&self) -> &[f64] {
        &self.chips
    }

    pub fn n_chip(&self) -> usize {
        self.chips.len()
    }

    /// Zadoff-Chu root index; `None` for every other family.
    pub fn root(&self) -> Option<u32> {
        self.root
    }
}

/// Wraps an angle into `[-pi, pi)`.
pub fn wrap_phase(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut w = x - two_pi * ((x + PI) / two_pi).floor();
    if w >= PI {
        w -= two_pi;
    }
    if w < -PI {
        w += two_pi;
    }
    w
}

const BARKER_5: [i8; 5] = [1, 1, 1, -1, 1];
const BARKER_7: [i8; 7] = [1, 1, 1, -1, -1, 1, -1];
const BARKER_11: [i8; 11] = [1, 1, 1, -1, -1, -1, 1, -1, -1, 1, -1];
const BARKER_13: [i8; 13] = [1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1];

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Roots `u` in `[1, n - 1]` coprime with `n`; `[1]` for `n = 1`.
pub fn zadoff_chu_roots(n_chip: usize) -> Vec<u32> {
    if n_chip <= 1 {
        return vec![1];
    }
    (1..n_chip as u32)
        .filter(|&u| gcd(u as u64, n_chip as u64) == 1)
        .collect()
}

/// Integer square root for the M x M families; caller has validated `n_chip`.
fn side(n_chip: usize) -> usize {
    let m = (n_chip as f64).sqrt().round() as usize;
    debug_assert_eq!(m * m, n_chip);
    m
}

/// Builds the chip phases of `family` at length `n_chip`.
///
/// `root` is only meaningful for Zadoff-Chu (defaults to 1) and is ignored
/// otherwise.
pub fn code_generate(family: CodeFamily, n_chip: usize, root: Option<u32>) -> Result<PhaseCode> {
    if !family.accepts(n_chip) {
        return Err(Error::domain(format!(
            "{family} code length {n_chip} not in allowed set {}",
            family.allowed_description()
        )));
    }

    let raw: Vec<f64> = match family {
        CodeFamily::Barker => {
            let bits: &[i8] = match n_chip {
                5 => &BARKER_5,
                7 => &BARKER_7,
                11 => &BARKER_11,
                _ => &BARKER_13,
            };
            bits.iter()
                .map(|&b| if b > 0 { 0.0 } else { PI })
                .collect()
        }
        CodeFamily::Frank => {
            let m = side(n_chip);
            grid(m, |i, j| 2.0 * PI * ((i * j) % m) as f64 / m as f64)
        }
        CodeFamily::P1 => {
            let m = side(n_chip) as f64;
            grid(side(n_chip), |i, j| {
                // 1-based indices
                let (i, j) = (i as f64 + 1.0, j as f64 + 1.0);
                -(PI / m) * (m - (2.0 * j - 1.0)) * ((j - 1.0) * m + (i - 1.0))
            })
        }
        CodeFamily::P2 => {
            let m = side(n_chip) as f64;
            grid(side(n_chip), |i, j| {
                let (i, j) = (i as f64 + 1.0, j as f64 + 1.0);
                (PI / (2.0 * m)) * (2.0 * i - 1.0 - m) * (2.0 * j - 1.0 - m)
            })
        }
        CodeFamily::Px => {
            let mi = side(n_chip);
            let m = mi as f64;
            grid(mi, |i, j| {
                let (i, j) = (i as f64 + 1.0, j as f64 + 1.0);
                let group = if mi.is_multiple_of(2) { (m + 1.0) / 2.0 - j } else { m / 2.0 - j };
                (2.0 * PI / m) * group * ((m + 1.0) / 2.0 - i)
            })
        }
        CodeFamily::P3 => {
            let n = n_chip as u64;
            (0..n)
                .map(|k| PI * ((k * k) % (2 * n)) as f64 / n as f64)
                .collect()
        }
        CodeFamily::P4 => {
            let n = n_chip as f64;
            (0..n_chip)
                .map(|k| {
                    let k = k as f64;
                    PI * k * k / n - PI * k
                })
                .collect()
        }
        CodeFamily::ZadoffChu => {
            let u = root.unwrap_or(1);
            if u == 0 || gcd(u as u64, n_chip as u64) != 1 {
                return Err(Error::domain(format!(
                    "Zadoff-Chu root {u} is not coprime with length {n_chip}"
                )));
            }
            let n = n_chip as u64;
            let u = u as u64;
            // phase = -pi * u * k * (k + 1) / n, reduced exactly modulo 2n
            (0..n)
                .map(|k| -PI * ((u * k * (k + 1)) % (2 * n)) as f64 / n as f64)
                .collect()
        }
    };

    Ok(PhaseCode {
        family,
        chips: raw.into_iter().map(wrap_phase).collect(),
        root: (family == CodeFamily::ZadoffChu).then(|| root.unwrap_or(1)),
    })
}

/// Evaluates `phase(i, j)` with `i` the chip within a group and `j` the group,
/// both 0-based, emitting groups in order.
fn grid(m: usize, phase: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(m * m);
    for j in 0..m {
        for i in 0..m {
            out.push(phase(i, j));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn unit(code: &PhaseCode) -> Vec<Complex64> {
        code.chips().iter().map(|&p| Complex64::from_polar(1.0, p)).collect()
    }

    fn aperiodic_acf(x: &[Complex64], lag: usize) -> Complex64 {
        (0..x.len() - lag).map(|k| x[k + lag] * x[k].conj()).sum()
    }

    fn periodic_acf(x: &[Complex64], lag: usize) -> Complex64 {
        let n = x.len();
        (0..n).map(|k| x[(k + lag) % n] * x[k].conj()).sum()
    }

    #[test]
    fn barker_13_sidelobes() {
        let c = code_generate(CodeFamily::Barker, 13, None).unwrap();
        let x = unit(&c);
        assert!((aperiodic_acf(&x, 0).norm() - 13.0).abs() < 1e-12);
        let side = (1..13).map(|l| aperiodic_acf(&x, l).norm()).fold(0.0, f64::max);
        assert!((side - 1.0).abs() < 1e-12, "max sidelobe {side}");
    }

    #[test]
    fn zadoff_chu_length_one() {
        for root in [None, Some(1), Some(7)] {
            let c = code_generate(CodeFamily::ZadoffChu, 1, root).unwrap();
            assert_eq!(c.chips(), &[0.0]);
        }
    }

    #[test]
    fn frank_16_is_dft_matrix() {
        let c = code_generate(CodeFamily::Frank, 16, None).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = Complex64::from_polar(1.0, 2.0 * PI / 4.0 * (i * j) as f64);
                let got = Complex64::from_polar(1.0, c.chips()[i * 4 + j]);
                assert!((want - got).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn zadoff_chu_is_cazac() {
        for n in (3..=15).step_by(2) {
            for u in zadoff_chu_roots(n) {
                let x = unit(&code_generate(CodeFamily::ZadoffChu, n, Some(u)).unwrap());
                for lag in 1..n {
                    assert!(periodic_acf(&x, lag).norm() < 1e-9, "n={n} u={u} lag={lag}");
                }
            }
        }
    }

    #[test]
    fn rejects_invalid_lengths() {
        let err = code_generate(CodeFamily::P2, 9, None).unwrap_err();
        assert!(err.to_string().contains("{4, 16}"), "{err}");
        assert!(code_generate(CodeFamily::Barker, 4, None).is_err());
        assert!(code_generate(CodeFamily::P3, 17, None).is_err());
        assert!(code_generate(CodeFamily::ZadoffChu, 4, None).is_err());
        assert!(code_generate(CodeFamily::ZadoffChu, 9, Some(3)).is_err());
    }

    #[test]
    fn phases_are_wrapped() {
        for family in CodeFamily::ALL {
            for n in family.sampled_lengths() {
                let c = code_generate(family, n, None).unwrap();
                assert_eq!(c.n_chip(), n);
                assert!(c.chips().iter().all(|p| (-PI..PI).contains(p)), "{family} {n}");
            }
        }
    }

    #[test]
    fn p4_matches_p3_shifted() {
        // P4 is P3 with a linear phase ramp of -pi per chip.
        for n in 4..=16 {
            let p3 = code_generate(CodeFamily::P3, n, None).unwrap();
            let p4 = code_generate(CodeFamily::P4, n, None).unwrap();
            for k in 0..n {
                let d = wrap_phase(p4.chips()[k] - p3.chips()[k] + PI * k as f64);
                assert!(d.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn wrap_phase_bounds() {
        assert_eq!(wrap_phase(PI), -PI);
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert_eq!(wrap_phase(0.0), 0.0);
    }
}
