use std::path::Path;

use super::Split;
use crate::error::{Error, Result};
use crate::scene::Environment;
use crate::spectrogram::PresetSize;

pub const MANIFEST_HEADER: [&str; 16] = [
    "frame_index",
    "frame_id",
    "split",
    "env",
    "snr_db",
    "emitter_count",
    "classes",
    "seed",
    "status",
    "image_s",
    "label_s",
    "image_m",
    "label_m",
    "image_l",
    "label_l",
    "iq",
];

/// One generated frame. Paths are relative to the dataset root with `/`
/// separators; presets that were not generated have no entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub frame_index: usize,
    pub frame_id: String,
    pub split: Split,
    pub env: Environment,
    pub snr_db: i32,
    pub emitter_count: usize,
    /// Class id of every emitter, in scene order.
    pub classes: Vec<u32>,
    pub seed: u64,
    /// `ok`, or `incomplete` when some output could not be written.
    pub status: String,
    /// `(image, label)` per preset, indexed S, M, L.
    pub outputs: [Option<(String, String)>; 3],
    pub iq: Option<String>,
}

impl ManifestRow {
    pub fn output(&self, preset: PresetSize) -> Option<&(String, String)> {
        self.outputs[preset_slot(preset)].as_ref()
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    fn record(&self) -> Vec<String> {
        let classes: Vec<String> = self.classes.iter().map(u32::to_string).collect();
        let mut rec = vec![
            self.frame_index.to_string(),
            self.frame_id.clone(),
            self.split.to_string(),
            self.env.tag().to_string(),
            self.snr_db.to_string(),
            self.emitter_count.to_string(),
            classes.join(";"),
            self.seed.to_string(),
            self.status.clone(),
        ];
        for out in &self.outputs {
            let (img, lbl) = out.clone().unwrap_or_default();
            rec.push(img);
            rec.push(lbl);
        }
        rec.push(self.iq.clone().unwrap_or_default());
        rec
    }
}

pub(crate) fn preset_slot(p: PresetSize) -> usize {
    match p {
        PresetSize::S => 0,
        PresetSize::M => 1,
        PresetSize::L => 2,
    }
}

pub fn write_manifest(rows: &[ManifestRow], path: &Path) -> Result<()> {
    let csv_err = |e: csv::Error| Error::Csv {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(MANIFEST_HEADER).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.record()).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Csv {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn opt(s: &str) -> Option<String> {
    (!s.is_empty()).then(|| s.to_string())
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    let name = path.display().to_string();
    let mut r = csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Csv { path: name.clone(), message: format!("{other:?}") },
        })?;
    let header = r.headers().map_err(|e| Error::Csv { path: name.clone(), message: e.to_string() })?;
    if header.iter().ne(MANIFEST_HEADER) {
        return Err(Error::Csv { path: name, message: "unexpected header".into() });
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let perr = |message: String| Error::Parse { path: name.clone(), line, message };
        let rec = rec.map_err(|e| perr(e.to_string()))?;
        let num = |k: usize| -> Result<u64> { rec[k].parse().map_err(|_| perr(format!("bad {} `{}`", MANIFEST_HEADER[k], &rec[k]))) };
        let classes = rec[6]
            .split(';')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| perr(format!("bad class `{s}`"))))
            .collect::<Result<Vec<u32>>>()?;
        let outputs = std::array::from_fn(|slot| {
            let (img, lbl) = (&rec[9 + 2 * slot], &rec[10 + 2 * slot]);
            (!img.is_empty()).then(|| (img.to_string(), lbl.to_string()))
        });
        rows.push(ManifestRow {
            frame_index: num(0)? as usize,
            frame_id: rec[1].to_string(),
            split: rec[2].parse().map_err(|e: Error| perr(e.to_string()))?,
            env: rec[3].parse().map_err(|e: Error| perr(e.to_string()))?,
            snr_db: rec[4].parse().map_err(|_| perr(format!("bad snr_db `{}`", &rec[4])))?,
            emitter_count: num(5)? as usize,
            classes,
            seed: num(7)?,
            status: rec[8].to_string(),
            outputs,
            iq: opt(&rec[15]),
        });
    }
    Ok(rows)
}
