//! Brute-force references shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rfscene::annotate::{Annotation, BBox};
use rfscene::eval::{Detection, IOU_EPS};
use rfscene::rng::stream;
use rfscene::spectrogram::StftColumns;

/// Least-squares slope of instantaneous frequency over one chirp, in Hz/s.
pub fn if_slope(x: &[Complex64], fs: f64) -> f64 {
    let f: Vec<f64> = x.windows(2).map(|w| (w[1] * w[0].conj()).arg() * fs / (2.0 * PI)).collect();
    let n = f.len() as f64;
    let t: Vec<f64> = (0..f.len()).map(|i| i as f64 / fs).collect();
    let tm = t.iter().sum::<f64>() / n;
    let fm = f.iter().sum::<f64>() / n;
    let num: f64 = t.iter().zip(&f).map(|(a, b)| (a - tm) * (b - fm)).sum();
    let den: f64 = t.iter().map(|a| (a - tm).powi(2)).sum();
    num / den
}

/// Exhaustive pooling: output (t, f) compared with every column in its group.
pub fn pool_oracle(cols: &StftColumns, dim_t: usize, n_pool: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for t in 0..dim_t {
        for f in 0..cols.n_bins {
            let group: Vec<f64> = (0..n_pool).map(|k| cols.db[(t * n_pool + k) * cols.n_bins + f]).collect();
            let best = group.iter().copied().find(|&v| group.iter().all(|&w| w <= v)).unwrap();
            out.push(best);
        }
    }
    out
}

/// IoU from the sorted edge lists: the overlap on each axis is the gap
/// between the second and third of the four sorted edges, when the boxes
/// interleave.
pub fn iou_oracle(a: &BBox, b: &BBox) -> f64 {
    let (ax0, ay0, ax1, ay1) = a.corners();
    let (bx0, by0, bx1, by1) = b.corners();
    let overlap = |lo1: f64, hi1: f64, lo2: f64, hi2: f64| {
        let mut e = [(lo1, 0), (hi1, 0), (lo2, 1), (hi2, 1)];
        e.sort_by(|p, q| p.0.total_cmp(&q.0));
        // disjoint when the first two edges belong to one box
        if e[0].1 == e[1].1 && e[1].0 < e[2].0 {
            0.0
        } else {
            e[2].0 - e[1].0
        }
    };
    let inter = overlap(ax0, ax1, bx0, bx1) * overlap(ay0, ay1, by0, by1);
    let area_a = (ax1 - ax0) * (ay1 - ay0);
    let area_b = (bx1 - bx0) * (by1 - by0);
    inter / (area_a + area_b - inter)
}

/// Greedy matching by repeated scans: rank detections, and for each take
/// the lowest-index unmatched ground truth whose IoU is within `IOU_EPS` of
/// the best available one, if that best clears the threshold.
pub fn match_oracle(dets: &[(f64, BBox)], gts: &[BBox], thresh: f64) -> Vec<bool> {
    let mut ranked: Vec<usize> = (0..dets.len()).collect();
    ranked.sort_by(|&a, &b| dets[b].0.partial_cmp(&dets[a].0).unwrap().then(a.cmp(&b)));
    let mut used = vec![false; gts.len()];
    let mut tp = vec![false; dets.len()];
    for d in ranked {
        let ious: Vec<Option<f64>> = (0..gts.len())
            .map(|g| (!used[g]).then(|| iou_oracle(&dets[d].1, &gts[g])))
            .collect();
        let best = ious.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
        if best < thresh - IOU_EPS {
            continue;
        }
        if let Some(g) = (0..gts.len()).find(|&g| ious[g].is_some_and(|v| v >= best - IOU_EPS)) {
            used[g] = true;
            tp[d] = true;
        }
    }
    tp
}

/// AP as the mean, over ground-truth objects, of the best precision reached
/// at or beyond the rank where each object is recalled; unrecalled objects
/// contribute zero.
pub fn ap_oracle(ranked_tp: &[bool], n_gt: usize) -> f64 {
    let precision: Vec<f64> = (0..ranked_tp.len())
        .map(|i| ranked_tp[..=i].iter().filter(|t| **t).count() as f64 / (i + 1) as f64)
        .collect();
    let mut sum = 0.0;
    for i in 0..ranked_tp.len() {
        if ranked_tp[i] {
            sum += precision[i..].iter().copied().fold(0.0, f64::max);
        }
    }
    sum / n_gt as f64
}

pub fn random_box<R: Rng>(rng: &mut R) -> BBox {
    // coarse grid so that ties in IoU and confidence actually occur
    let q = |v: f64| (v * 20.0).round() / 20.0;
    let x0 = q(rng.random_range(0.0..0.7));
    let y0 = q(rng.random_range(0.0..0.7));
    let w = q(rng.random_range(0.05..0.3)).max(0.05);
    let h = q(rng.random_range(0.05..0.3)).max(0.05);
    BBox::from_corners(x0, y0, x0 + w, y0 + h).unwrap()
}

pub fn jitter<R: Rng>(rng: &mut R, b: &BBox) -> BBox {
    let (x0, y0, x1, y1) = b.corners();
    let d = |rng: &mut R| rng.random_range(-0.04..0.04);
    BBox::from_corners(
        (x0 + d(rng)).max(0.0),
        (y0 + d(rng)).max(0.0),
        (x1 + d(rng)).min(1.0),
        (y1 + d(rng)).min(1.0),
    )
    .unwrap_or(*b)
}

pub type Instance = (Vec<Detection>, BTreeMap<String, Vec<Annotation>>, BTreeMap<String, i32>);

pub fn eval_instance(seed: u64, perfect: bool) -> Instance {
    let mut rng = stream(seed);
    let mut gts = BTreeMap::new();
    let mut snr = BTreeMap::new();
    let mut dets = Vec::new();
    for f in 0..rng.random_range(1..5) {
        let id = format!("f{f}");
        let anns: Vec<Annotation> = (0..rng.random_range(0..4))
            .map(|_| Annotation { class_id: rng.random_range(0..3), bbox: random_box(&mut rng) })
            .collect();
        for a in &anns {
            if perfect {
                dets.push(Detection { frame_id: id.clone(), class_id: a.class_id, bbox: a.bbox, confidence: 1.0 });
            } else if rng.random_bool(0.8) {
                let class_id = if rng.random_bool(0.9) { a.class_id } else { rng.random_range(0..3) };
                dets.push(Detection {
                    frame_id: id.clone(),
                    class_id,
                    bbox: jitter(&mut rng, &a.bbox),
                    confidence: rng.random(),
                });
            }
        }
        if !perfect {
            for _ in 0..rng.random_range(0..3) {
                dets.push(Detection {
                    frame_id: id.clone(),
                    class_id: rng.random_range(0..3),
                    bbox: random_box(&mut rng),
                    confidence: rng.random(),
                });
            }
        }
        snr.insert(id.clone(), [-20, 4, 20][f % 3]);
        gts.insert(id, anns);
    }
    (dets, gts, snr)
}

