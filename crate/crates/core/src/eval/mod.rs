//! Detection scoring: IoU, greedy matching, all-point AP and the
//! mAP50 / mAP50:95 suite stratified by frame SNR.

mod io;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

pub use io::{parse_predictions, read_predictions, write_report};

use crate::annotate::{Annotation, BBox};
use crate::error::{Error, Result};

/// Slack for IoU comparisons, so that an overlap which is exactly at a
/// threshold (or tied) in exact arithmetic is not decided by rounding.
pub const IOU_EPS: f64 = 1e-9;

/// IoU thresholds 0.50, 0.55, ..., 0.95.
pub fn iou_thresholds() -> [f64; 10] {
    std::array::from_fn(|k| (50 + 5 * k) as f64 / 100.0)
}

/// One scored box from a detector.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub frame_id: String,
    pub class_id: u32,
    pub bbox: BBox,
    pub confidence: f64,
}

/// Intersection over union of two axis-aligned boxes.
pub fn iou(a: &BBox, b: &BBox) -> Result<f64> {
    if a.area() <= 0.0 || b.area() <= 0.0 {
        return Err(Error::domain("IoU of a zero-area box"));
    }
    let (ax0, ay0, ax1, ay1) = a.corners();
    let (bx0, by0, bx1, by1) = b.corners();
    let iw = (ax1.min(bx1) - ax0.max(bx0)).max(0.0);
    let ih = (ay1.min(by1) - ay0.max(by0)).max(0.0);
    let inter = iw * ih;
    let union = a.area() + b.area() - inter;
    Ok((inter / union).clamp(0.0, 1.0))
}

/// Outcome of matching one frame's detections of one class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchResult {
    /// True-positive flag per detection, in input order.
    pub tp: Vec<bool>,
    pub unmatched_gt: usize,
}

/// Greedy matching within one frame and class.
///
/// Detections are visited by descending confidence (input order on ties).
/// Each takes the still-unmatched ground truth with the highest IoU, provided
/// it reaches `iou_thresh`; equal IoUs go to the lower ground-truth index.
/// Both comparisons allow [`IOU_EPS`] of slack.
pub fn match_detections(dets: &[(f64, BBox)], gts: &[BBox], iou_thresh: f64) -> Result<MatchResult> {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| dets[b].0.total_cmp(&dets[a].0));

    let mut taken = vec![false; gts.len()];
    let mut tp = vec![false; dets.len()];
    for d in order {
        let mut best: Option<(usize, f64)> = None;
        for (g, gt) in gts.iter().enumerate() {
            if taken[g] {
                continue;
            }
            let v = iou(&dets[d].1, gt)?;
            if v >= iou_thresh - IOU_EPS && best.is_none_or(|(_, b)| v > b + IOU_EPS) {
                best = Some((g, v));
            }
        }
        if let Some((g, _)) = best {
            taken[g] = true;
            tp[d] = true;
        }
    }
    Ok(MatchResult {
        tp,
        unmatched_gt: taken.iter().filter(|t| !**t).count(),
    })
}

/// Precision/recall after each ranked detection.
pub fn pr_curve(ranked_tp: &[bool], n_gt: usize) -> Vec<(f64, f64)> {
    let mut tp = 0usize;
    ranked_tp
        .iter()
        .enumerate()
        .map(|(i, &hit)| {
            tp += hit as usize;
            let recall = if n_gt == 0 { 0.0 } else { tp as f64 / n_gt as f64 };
            (recall, tp as f64 / (i + 1) as f64)
        })
        .collect()
}

/// All-point interpolated AP.
///
/// `scored` holds `(confidence, is_tp)`; it is ranked by descending
/// confidence with ties kept in the given order. Returns `None` when there is
/// neither ground truth nor any detection (the class is left out of the
/// mean), and `Some(0.0)` for detections without ground truth.
pub fn average_precision(scored: &[(f64, bool)], n_gt: usize) -> Option<f64> {
    if n_gt == 0 {
        return (!scored.is_empty()).then_some(0.0);
    }
    let mut ranked = scored.to_vec();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
    let flags: Vec<bool> = ranked.iter().map(|s| s.1).collect();
    Some(ap_from_ranked(&flags, n_gt))
}

fn ap_from_ranked(flags: &[bool], n_gt: usize) -> f64 {
    let curve = pr_curve(flags, n_gt);
    // precision envelope, right to left
    let mut envelope: Vec<f64> = curve.iter().map(|p| p.1).collect();
    for i in (0..envelope.len().saturating_sub(1)).rev() {
        envelope[i] = envelope[i].max(envelope[i + 1]);
    }
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for (i, &(recall, _)) in curve.iter().enumerate() {
        if recall > prev_recall {
            ap += (recall - prev_recall) * envelope[i];
            prev_recall = recall;
        }
    }
    ap
}

/// AP per class at each IoU threshold for one set of frames.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    pub frames: usize,
    /// Classes that have ground truth or detections.
    pub ap: BTreeMap<u32, [f64; 10]>,
    /// Precision/recall sweep per class at IoU 0.50.
    pub pr50: BTreeMap<u32, Vec<(f64, f64)>>,
    pub map50: Option<f64>,
    pub map50_95: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ApResult {
    pub overall: Summary,
    pub per_snr: BTreeMap<i32, Summary>,
    /// Mean of the per-SNR values over levels that have a score.
    pub cross_snr_map50: Option<f64>,
    pub cross_snr_map50_95: Option<f64>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

struct Ranked<'a> {
    confidence: f64,
    frame_id: &'a str,
    index: usize,
    tp: bool,
}

fn summarize(dets: &[(usize, &Detection)], gts: &BTreeMap<&str, &[Annotation]>) -> Result<Summary> {
    let mut classes: BTreeSet<u32> = dets.iter().map(|(_, d)| d.class_id).collect();
    classes.extend(gts.values().flat_map(|g| g.iter().map(|a| a.class_id)));

    // detections grouped by (class, frame), keeping input indices
    let mut grouped: BTreeMap<(u32, &str), Vec<(usize, &Detection)>> = BTreeMap::new();
    for &(i, d) in dets {
        grouped.entry((d.class_id, d.frame_id.as_str())).or_default().push((i, d));
    }

    let mut summary = Summary {
        frames: gts.len(),
        ..Default::default()
    };
    for &class in &classes {
        let class_gts: BTreeMap<&str, Vec<BBox>> = gts
            .iter()
            .map(|(f, anns)| {
                let boxes = anns.iter().filter(|a| a.class_id == class).map(|a| a.bbox).collect();
                (*f, boxes)
            })
            .collect();
        let n_gt: usize = class_gts.values().map(Vec::len).sum();

        let mut per_threshold = [0.0; 10];
        let mut included = true;
        for (k, thresh) in iou_thresholds().into_iter().enumerate() {
            let mut ranked: Vec<Ranked> = Vec::new();
            for (frame, frame_gts) in &class_gts {
                let Some(frame_dets) = grouped.get(&(class, *frame)) else {
                    continue;
                };
                let input: Vec<(f64, BBox)> = frame_dets.iter().map(|(_, d)| (d.confidence, d.bbox)).collect();
                let m = match_detections(&input, frame_gts, thresh)?;
                for ((i, d), tp) in frame_dets.iter().zip(m.tp) {
                    ranked.push(Ranked {
                        confidence: d.confidence,
                        frame_id: frame,
                        index: *i,
                        tp,
                    });
                }
            }
            ranked.sort_by(|a, b| {
                b.confidence
                    .total_cmp(&a.confidence)
                    .then_with(|| a.frame_id.cmp(b.frame_id))
                    .then(a.index.cmp(&b.index))
            });
            let scored: Vec<(f64, bool)> = ranked.iter().map(|r| (r.confidence, r.tp)).collect();
            match average_precision(&scored, n_gt) {
                Some(ap) => per_threshold[k] = ap,
                None => included = false,
            }
            if k == 0 && included {
                let flags: Vec<bool> = scored.iter().map(|s| s.1).collect();
                summary.pr50.insert(class, pr_curve(&flags, n_gt));
            }
        }
        if included {
            summary.ap.insert(class, per_threshold);
        }
    }
    summary.map50 = mean(summary.ap.values().map(|a| a[0]));
    summary.map50_95 = mean(summary.ap.values().map(|a| a.iter().sum::<f64>() / 10.0));
    Ok(summary)
}

/// Scores `dets` against ground truth over all frames and per SNR level.
///
/// Every frame of `gts` needs an SNR in `snr_of`; frames without boxes still
/// count, so detections on them are false positives.
pub fn map_suite(
    dets: &[Detection],
    gts: &BTreeMap<String, Vec<Annotation>>,
    snr_of: &BTreeMap<String, i32>,
) -> Result<ApResult> {
    for d in dets {
        if !gts.contains_key(&d.frame_id) {
            return Err(Error::Input(format!(
                "detection references unknown frame `{}`",
                d.frame_id
            )));
        }
        if !d.confidence.is_finite() {
            return Err(Error::Input(format!("non-finite confidence on frame `{}`", d.frame_id)));
        }
    }
    for f in gts.keys() {
        if !snr_of.contains_key(f) {
            return Err(Error::Input(format!("frame `{f}` has no SNR in the manifest")));
        }
    }

    let indexed: Vec<(usize, &Detection)> = dets.iter().enumerate().collect();
    let all_gts: BTreeMap<&str, &[Annotation]> = gts.iter().map(|(k, v)| (k.as_str(), v.as_slice())).collect();
    let overall = summarize(&indexed, &all_gts)?;

    let levels: BTreeSet<i32> = gts.keys().map(|f| snr_of[f]).collect();
    let mut per_snr = BTreeMap::new();
    for level in levels {
        let frame_gts: BTreeMap<&str, &[Annotation]> = all_gts
            .iter()
            .filter(|(f, _)| snr_of[**f] == level)
            .map(|(f, g)| (*f, *g))
            .collect();
        let level_dets: Vec<(usize, &Detection)> = indexed
            .iter()
            .filter(|(_, d)| frame_gts.contains_key(d.frame_id.as_str()))
            .copied()
            .collect();
        per_snr.insert(level, summarize(&level_dets, &frame_gts)?);
    }

    Ok(ApResult {
        cross_snr_map50: mean(per_snr.values().filter_map(|s| s.map50)),
        cross_snr_map50_95: mean(per_snr.values().filter_map(|s| s.map50_95)),
        overall,
        per_snr,
    })
}

/// Sort key used by callers that need a deterministic detection order.
pub fn detection_order(a: &Detection, b: &Detection) -> Ordering {
    b.confidence
        .total_cmp(&a.confidence)
        .then_with(|| a.frame_id.cmp(&b.frame_id))
}
