use std::io::Write;
use std::path::Path;

use super::{iou_thresholds, ApResult, Detection, Summary};
use crate::annotate::BBox;
use crate::error::{Error, Result};

/// Parses `frame_id class_id confidence x_c y_c w h` lines. Boxes are
/// clipped to the unit square.
pub fn parse_predictions(text: &str, source: &str) -> Result<Vec<Detection>> {
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
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 7 {
            return Err(err(format!("expected 7 fields, found {}", f.len())));
        }
        let class_id: u32 = f[1].parse().map_err(|_| err(format!("bad class id `{}`", f[1])))?;
        let mut v = [0.0f64; 5];
        for (slot, s) in v.iter_mut().zip(&f[2..]) {
            *slot = s.parse().map_err(|_| err(format!("bad number `{s}`")))?;
            if !slot.is_finite() {
                return Err(err(format!("non-finite value `{s}`")));
            }
        }
        let [confidence, x, y, w, h] = v;
        let bbox = BBox::from_corners(
            (x - 0.5 * w).max(0.0),
            (y - 0.5 * h).max(0.0),
            (x + 0.5 * w).min(1.0),
            (y + 0.5 * h).min(1.0),
        )
        .ok_or_else(|| err("box has no area inside the image".into()))?;
        out.push(Detection {
            frame_id: f[0].to_string(),
            class_id,
            bbox,
            confidence,
        });
    }
    Ok(out)
}

pub fn read_predictions(path: &Path) -> Result<Vec<Detection>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_predictions(&text, &path.display().to_string())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

fn write_summary(out: &mut Vec<u8>, scope: &str, s: &Summary) {
    let thresholds = iou_thresholds();
    for (class, aps) in &s.ap {
        for (t, ap) in thresholds.iter().zip(aps) {
            writeln!(out, "{scope},{class},{t:.2},{ap:.6}").unwrap();
        }
    }
    writeln!(out, "{scope},mAP,0.50,{}", fmt_opt(s.map50)).unwrap();
    writeln!(out, "{scope},mAP,0.50:0.95,{}", fmt_opt(s.map50_95)).unwrap();
}

/// CSV with columns `scope,class_id,iou_threshold,ap`: per-class rows for
/// `all` and each `snr=<dB>` scope, `mAP` rows per scope, and a final
/// `cross_snr_mean` pair.
pub fn write_report(result: &ApResult, path: &Path) -> Result<()> {
    let mut out = Vec::new();
    writeln!(out, "scope,class_id,iou_threshold,ap").unwrap();
    write_summary(&mut out, "all", &result.overall);
    for (snr, s) in &result.per_snr {
        write_summary(&mut out, &format!("snr={snr}"), s);
    }
    writeln!(out, "cross_snr_mean,mAP,0.50,{}", fmt_opt(result.cross_snr_map50)).unwrap();
    writeln!(out, "cross_snr_mean,mAP,0.50:0.95,{}", fmt_opt(result.cross_snr_map50_95)).unwrap();
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
