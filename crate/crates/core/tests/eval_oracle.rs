//! Evaluator checked against independent brute-force references on small
//! random instances.

mod common;

use common::{ap_oracle, eval_instance, iou_oracle, jitter, match_oracle, random_box};
use proptest::prelude::*;
use rand::Rng;
use rfscene::annotate::BBox;
use rfscene::eval::{average_precision, iou, map_suite, match_detections};
use rfscene::rng::stream;

#[test]
fn iou_matches_edge_sort_oracle() {
    let mut rng = stream(11);
    for _ in 0..1000 {
        let (a, b) = (random_box(&mut rng), random_box(&mut rng));
        let got = iou(&a, &b).unwrap();
        assert!((got - iou_oracle(&a, &b)).abs() < 1e-9);
        assert!((got - iou(&b, &a).unwrap()).abs() < 1e-15);
    }
}

#[test]
fn matching_and_ap_match_oracles() {
    let mut rng = stream(12);
    for case in 0..1000 {
        let gts: Vec<BBox> = (0..rng.random_range(0..5)).map(|_| random_box(&mut rng)).collect();
        let mut dets: Vec<(f64, BBox)> = Vec::new();
        for g in &gts {
            if rng.random_bool(0.8) {
                dets.push(((rng.random_range(0..10) as f64) / 10.0, jitter(&mut rng, g)));
            }
        }
        for _ in 0..rng.random_range(0..4) {
            dets.push(((rng.random_range(0..10) as f64) / 10.0, random_box(&mut rng)));
        }
        for thresh in [0.5, 0.75, 0.95] {
            let got = match_detections(&dets, &gts, thresh).unwrap();
            let want = match_oracle(&dets, &gts, thresh);
            assert_eq!(got.tp, want, "case {case} thresh {thresh}");
            assert_eq!(got.unmatched_gt, gts.len() - want.iter().filter(|t| **t).count());

            let scored: Vec<(f64, bool)> = dets.iter().map(|d| d.0).zip(want.iter().copied()).collect();
            let mut ranked: Vec<usize> = (0..dets.len()).collect();
            ranked.sort_by(|&a, &b| dets[b].0.partial_cmp(&dets[a].0).unwrap().then(a.cmp(&b)));
            let ranked_tp: Vec<bool> = ranked.iter().map(|&i| want[i]).collect();
            match average_precision(&scored, gts.len()) {
                Some(ap) if !gts.is_empty() => {
                    assert!((ap - ap_oracle(&ranked_tp, gts.len())).abs() < 1e-9, "case {case}")
                }
                Some(ap) => assert_eq!(ap, 0.0),
                None => assert!(gts.is_empty() && dets.is_empty()),
            }
        }
    }
}

#[test]
fn perfect_predictions_score_one() {
    for seed in 0..200 {
        let (dets, gts, snr) = eval_instance(seed, true);
        let r = map_suite(&dets, &gts, &snr).unwrap();
        if let Some(v) = r.overall.map50_95 {
            assert_eq!(v, 1.0, "seed {seed}");
            assert_eq!(r.overall.map50, Some(1.0));
        }
    }
}

#[test]
fn strict_thresholds_never_score_higher() {
    for seed in 0..1000 {
        let (dets, gts, snr) = eval_instance(seed, false);
        let r = map_suite(&dets, &gts, &snr).unwrap();
        for s in std::iter::once(&r.overall).chain(r.per_snr.values()) {
            if let (Some(a), Some(b)) = (s.map50, s.map50_95) {
                assert!(b <= a + 1e-12, "seed {seed}: mAP50:95 {b} > mAP50 {a}");
            }
        }
    }
}

proptest! {
    #[test]
    fn ap_bounded(flags in proptest::collection::vec(any::<bool>(), 0..30), extra in 0usize..5) {
        let n_tp = flags.iter().filter(|f| **f).count();
        let n_gt = n_tp + extra;
        let scored: Vec<(f64, bool)> = flags.iter().enumerate().map(|(i, &f)| (1.0 - i as f64 / 100.0, f)).collect();
        if let Some(ap) = average_precision(&scored, n_gt) {
            prop_assert!((0.0..=1.0).contains(&ap));
        }
    }
}
