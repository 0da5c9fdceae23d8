use std::fmt::Write as _;
use std::path::Path;

use super::{Annotation, BBox};
use crate::error::{Error, Result};

/// One `class x_c y_c w h` line per box at six decimals.
pub fn format_labels(annotations: &[Annotation]) -> String {
    let mut out = String::new();
    for a in annotations {
        let b = &a.bbox;
        writeln!(out, "{} {:.6} {:.6} {:.6} {:.6}", a.class_id, b.x_c, b.y_c, b.w, b.h).unwrap();
    }
    out
}

/// Parses label text. `source` names the input in error messages.
pub fn parse_labels(text: &str, source: &str) -> Result<Vec<Annotation>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: source.to_string(),
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(err(format!("expected 5 fields, found {}", fields.len())));
        }
        let class_id: u32 = fields[0]
            .parse()
            .map_err(|_| err(format!("bad class id `{}`", fields[0])))?;
        let mut v = [0.0f64; 4];
        for (slot, f) in v.iter_mut().zip(&fields[1..]) {
            *slot = f.parse().map_err(|_| err(format!("bad number `{f}`")))?;
        }
        let bbox = BBox::new(v[0], v[1], v[2], v[3]).map_err(|e| err(e.to_string()))?;
        out.push(Annotation { class_id, bbox });
    }
    Ok(out)
}

/// Writes a label file; no boxes gives an empty file.
pub fn write_labels(annotations: &[Annotation], path: &Path) -> Result<()> {
    std::fs::write(path, format_labels(annotations)).map_err(|e| Error::io(path, e))
}

pub fn read_labels(path: &Path) -> Result<Vec<Annotation>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labels(&text, &path.display().to_string())
}
