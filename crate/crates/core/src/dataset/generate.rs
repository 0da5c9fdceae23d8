use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::manifest::preset_slot;
use super::{plan, write_manifest, DatasetConfig, ManifestRow, PlannedFrame, Split};
use crate::annotate::{annotate_emitters, format_labels, read_labels, Annotation};
use crate::error::{Error, Result};
use crate::scene::{synthesize_frame, FrameGeometry};
use crate::spectrogram::{render, spectrogram, write_grid, Band, PresetSize, ResolutionPreset};

/// Counts and timing of a finished run.
#[derive(Debug, Clone)]
pub struct GenerateSummary {
    pub rows: Vec<ManifestRow>,
    pub per_snr: BTreeMap<i32, usize>,
    pub elapsed: Duration,
}

impl GenerateSummary {
    pub fn frames_per_second(&self) -> f64 {
        self.rows.len() as f64 / self.elapsed.as_secs_f64().max(1e-9)
    }
}

fn rel(parts: &[&str]) -> String {
    parts.join("/")
}

fn write(root: &Path, rel_path: &str, bytes: &[u8]) -> Result<()> {
    let path = root.join(rel_path);
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(&path, bytes).map_err(|e| Error::io(path, e))
}

/// Synthesizes one planned frame and writes its images, labels and optional
/// raw outputs below `config.output_root`.
pub fn process_frame(
    config: &DatasetConfig,
    presets: &[(PresetSize, ResolutionPreset)],
    frame: &PlannedFrame,
) -> Result<ManifestRow> {
    let geom = FrameGeometry::WIDEBAND;
    let (synth, _clean) = synthesize_frame(frame.env, &geom, frame.snr_db, frame.frame_id.clone(), frame.seed)?;
    let annotations = annotate_emitters(&synth.emitters, &geom);
    let root = &config.output_root;
    let env = frame.env.tag();
    let split = frame.split.as_str();
    let id = &frame.frame_id;

    let mut outputs: [Option<(String, String)>; 3] = Default::default();
    let mut iq = None;
    for (i, (size, preset)) in presets.iter().enumerate() {
        let name = size.to_string();
        let spec = spectrogram(&synth.iq, preset)?;
        let image = rel(&[env, &name, split, "images", &format!("{id}.png")]);
        let label = rel(&[env, &name, split, "labels", &format!("{id}.txt")]);
        write(root, &image, &render(&spec)?)?;
        write(root, &label, format_labels(&annotations).as_bytes())?;
        if config.emit_grids {
            write(root, &rel(&[env, &name, split, "grids", &format!("{id}.grid")]), &write_grid(&spec))?;
        }
        if config.emit_raw_iq && i == 0 {
            let path = rel(&[env, &name, split, "iq", &format!("{id}.iqf32")]);
            write(root, &path, &synth.iq.to_f32_le_bytes())?;
            iq = Some(path);
        }
        outputs[preset_slot(*size)] = Some((image, label));
    }

    Ok(ManifestRow {
        frame_index: frame.index,
        frame_id: frame.frame_id.clone(),
        split: frame.split,
        env: frame.env,
        snr_db: frame.snr_db,
        emitter_count: synth.emitters.len(),
        classes: synth.emitters.iter().map(|e| e.class().id()).collect(),
        seed: frame.seed,
        status: "ok".into(),
        outputs,
        iq,
    })
}

fn incomplete_row(frame: &PlannedFrame) -> ManifestRow {
    ManifestRow {
        frame_index: frame.index,
        frame_id: frame.frame_id.clone(),
        split: frame.split,
        env: frame.env,
        snr_db: frame.snr_db,
        emitter_count: 0,
        classes: Vec::new(),
        seed: frame.seed,
        status: "incomplete".into(),
        outputs: Default::default(),
        iq: None,
    }
}

/// Generates the whole dataset and writes `manifest.csv` and `config.txt`
/// at the output root.
///
/// Frames run in parallel; rows are collected in frame order, so the bytes
/// do not depend on `workers`. If any frame fails the manifest is still
/// written, with that frame marked `incomplete`, and the first error is
/// returned.
pub fn generate(config: &DatasetConfig) -> Result<GenerateSummary> {
    let start = Instant::now();
    let frames = plan(config)?;
    let geom = FrameGeometry::WIDEBAND;
    let presets = config
        .presets
        .iter()
        .map(|&s| Ok((s, ResolutionPreset::standard(Band::Wideband, s, geom.n_samples)?)))
        .collect::<Result<Vec<_>>>()?;

    let root = &config.output_root;
    std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    std::fs::write(root.join("config.txt"), config.echo()).map_err(|e| Error::io(root.join("config.txt"), e))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", config.workers)))?;
    let results: Vec<Result<ManifestRow>> =
        pool.install(|| frames.par_iter().map(|f| process_frame(config, &presets, f)).collect());

    let mut first_err = None;
    let rows: Vec<ManifestRow> = results
        .into_iter()
        .zip(&frames)
        .map(|(r, f)| match r {
            Ok(row) => row,
            Err(e) => {
                log::error!("frame {}: {e}", f.frame_id);
                first_err.get_or_insert(e);
                incomplete_row(f)
            }
        })
        .collect();
    write_manifest(&rows, &root.join("manifest.csv"))?;
    if let Some(e) = first_err {
        return Err(e);
    }

    let mut per_snr = BTreeMap::new();
    for r in &rows {
        *per_snr.entry(r.snr_db).or_insert(0) += 1;
    }
    Ok(GenerateSummary {
        rows,
        per_snr,
        elapsed: start.elapsed(),
    })
}

/// Labels per frame id, and SNR per frame id.
pub type GroundTruth = (BTreeMap<String, Vec<Annotation>>, BTreeMap<String, i32>);

/// Loads the labels of one split and preset, keyed by frame id, together
/// with each frame's SNR.
pub fn ground_truth(root: &Path, rows: &[ManifestRow], split: Split, preset: PresetSize) -> Result<GroundTruth> {
    let mut gts = BTreeMap::new();
    let mut snr = BTreeMap::new();
    for row in rows.iter().filter(|r| r.split == split) {
        let (_, label) = row.output(preset).ok_or_else(|| {
            Error::Input(format!("frame `{}` has no {preset} output in the manifest", row.frame_id))
        })?;
        gts.insert(row.frame_id.clone(), read_labels(&root.join(label))?);
        snr.insert(row.frame_id.clone(), row.snr_db);
    }
    Ok((gts, snr))
}
