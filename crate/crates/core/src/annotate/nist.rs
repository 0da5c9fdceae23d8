//! Labels for narrowband single-radar frames described by metadata records.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use super::{box_from_extents, Annotation, BANDWIDTH_PAD};
use crate::error::{Error, Result};
use crate::scene::FrameGeometry;

/// Radar classes of the narrowband corpus, in source order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NistClass {
    P0N1 = 0,
    P0N2 = 1,
    Q3N1 = 2,
    Q3N2 = 3,
    Q3N3 = 4,
}

impl NistClass {
    pub const ALL: [NistClass; 5] = [
        NistClass::P0N1,
        NistClass::P0N2,
        NistClass::Q3N1,
        NistClass::Q3N2,
        NistClass::Q3N3,
    ];

    pub fn id(self) -> u32 {
        self as u32
    }

    /// Q3N classes are chirped; P0N classes are plain pulses.
    pub fn is_chirped(self) -> bool {
        matches!(self, NistClass::Q3N1 | NistClass::Q3N2 | NistClass::Q3N3)
    }
}

impl fmt::Display for NistClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for NistClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        NistClass::ALL
            .into_iter()
            .find(|c| c.to_string().eq_ignore_ascii_case(&key) || c.id().to_string() == key)
            .ok_or_else(|| Error::domain(format!("unknown NIST class `{s}`")))
    }
}

/// One metadata row. `class = None` marks a noise-only frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NistRecord {
    pub frame_id: String,
    pub class: Option<NistClass>,
    /// Start time, seconds.
    pub t_s: Option<f64>,
    /// Centre frequency, Hz relative to baseband.
    pub f_c: Option<f64>,
    /// Pulse width, seconds (P0N).
    pub t_pw: Option<f64>,
    /// Chirp bandwidth, Hz (Q3N).
    pub b_chirp: Option<f64>,
    /// Pulse repetition frequency, Hz.
    pub f_prf: Option<f64>,
    /// Number of pulse repetition intervals.
    pub n: Option<u32>,
}

fn need<T>(v: Option<T>, field: &'static str, rec: &NistRecord) -> Result<T> {
    v.ok_or_else(|| Error::MissingField {
        field,
        context: Some(format!("frame {}", rec.frame_id)),
    })
}

/// Box for one record on the 80 ms x 10 MHz frame.
///
/// Occupancy is `[t_s, t_s + n / f_prf]` in time and `f_c +- B/2` in
/// frequency, with `B = b_chirp` for Q3N and `1.5 / t_pw` for P0N.
pub fn annotate_nist(record: &NistRecord) -> Result<Option<Annotation>> {
    let Some(class) = record.class else {
        return Ok(None);
    };
    let t_s = need(record.t_s, "t_s", record)?;
    let f_c = need(record.f_c, "f_c", record)?;
    let f_prf = need(record.f_prf, "f_prf", record)?;
    let n = need(record.n, "n", record)?;
    let b = if class.is_chirped() {
        need(record.b_chirp, "b_chirp", record)?
    } else {
        (1.0 + BANDWIDTH_PAD) / need(record.t_pw, "t_pw", record)?
    };
    let geom = FrameGeometry::CBRS;
    let t1 = t_s + n as f64 / f_prf;
    let bbox = box_from_extents(t_s, t1, f_c - 0.5 * b, f_c + 0.5 * b, geom.duration(), geom.sample_rate);
    if bbox.is_none() {
        log::warn!("frame {}: {class} box clipped out of the frame", record.frame_id);
    }
    Ok(bbox.map(|bbox| Annotation {
        class_id: class.id(),
        bbox,
    }))
}

/// Labels per frame id. A frame may carry at most one radar.
pub fn annotate_nist_records(records: &[NistRecord]) -> Result<BTreeMap<String, Vec<Annotation>>> {
    let mut out: BTreeMap<String, Vec<Annotation>> = BTreeMap::new();
    for r in records {
        let slot = out.entry(r.frame_id.clone()).or_default();
        if let Some(a) = annotate_nist(r)? {
            if !slot.is_empty() {
                return Err(Error::Input(format!(
                    "frame {} lists more than one radar",
                    r.frame_id
                )));
            }
            slot.push(a);
        }
    }
    Ok(out)
}

#[derive(Deserialize)]
struct Row {
    frame_id: String,
    #[serde(default)]
    class: Option<String>,
    t_s: Option<f64>,
    f_c: Option<f64>,
    t_pw: Option<f64>,
    b_chirp: Option<f64>,
    f_prf: Option<f64>,
    n: Option<u32>,
}

/// Reads a metadata CSV with header
/// `frame_id,class,t_s,f_c,t_pw,b_chirp,f_prf,n` (seconds and Hz; empty cells
/// are missing values, an empty class is a noise-only frame).
pub fn read_nist_metadata(path: &Path) -> Result<Vec<NistRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        // header is line 1
        let line = i + 2;
        let parse_err = |message: String| Error::Parse {
            path: path.display().to_string(),
            line,
            message,
        };
        let row = row.map_err(|e| parse_err(e.to_string()))?;
        let class = match row.class.as_deref().map(str::trim) {
            None | Some("") => None,
            Some(c) => Some(c.parse::<NistClass>().map_err(|e| parse_err(e.to_string()))?),
        };
        out.push(NistRecord {
            frame_id: row.frame_id,
            class,
            t_s: row.t_s,
            f_c: row.f_c,
            t_pw: row.t_pw,
            b_chirp: row.b_chirp,
            f_prf: row.f_prf,
            n: row.n,
        });
    }
    Ok(out)
}
