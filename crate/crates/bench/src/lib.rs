//! Shared fixtures for the benchmarks.

use std::collections::BTreeMap;

use rand::Rng;
use rfscene::annotate::{Annotation, BBox};
use rfscene::eval::Detection;
use rfscene::rng::stream;
use rfscene::scene::{synthesize_frame, Environment, Frame, FrameGeometry};

/// A dense wideband frame at 4 dB.
pub fn dense_frame(seed: u64) -> Frame {
    synthesize_frame(Environment::Dense9T, &FrameGeometry::WIDEBAND, 4, "bench", seed)
        .expect("fixture frame")
        .0
}

fn random_box<R: Rng>(rng: &mut R) -> BBox {
    let x0 = rng.random_range(0.0..0.8);
    let y0 = rng.random_range(0.0..0.8);
    BBox::from_corners(x0, y0, x0 + rng.random_range(0.02..0.2), y0 + rng.random_range(0.02..0.2))
        .expect("positive box")
}

/// Ground truth for `frames` frames and jittered detections against it.
pub type EvalFixture = (Vec<Detection>, BTreeMap<String, Vec<Annotation>>, BTreeMap<String, i32>);

pub fn eval_fixture(frames: usize, seed: u64) -> EvalFixture {
    let mut rng = stream(seed);
    let mut gts = BTreeMap::new();
    let mut snr = BTreeMap::new();
    let mut dets = Vec::new();
    for f in 0..frames {
        let id = format!("f{f:05}");
        let anns: Vec<Annotation> = (0..rng.random_range(0..6))
            .map(|_| Annotation { class_id: rng.random_range(0..11), bbox: random_box(&mut rng) })
            .collect();
        for a in &anns {
            let (x0, y0, x1, y1) = a.bbox.corners();
            let j = rng.random_range(-0.01..0.01);
            if let Some(bbox) = BBox::from_corners(x0 + j, y0, x1 + j, y1) {
                dets.push(Detection { frame_id: id.clone(), class_id: a.class_id, bbox, confidence: rng.random() });
            }
        }
        for _ in 0..rng.random_range(0..3) {
            dets.push(Detection {
                frame_id: id.clone(),
                class_id: rng.random_range(0..11),
                bbox: random_box(&mut rng),
                confidence: rng.random(),
            });
        }
        snr.insert(id.clone(), [-20, -12, -4, 4, 12, 20][f % 6]);
        gts.insert(id, anns);
    }
    (dets, gts, snr)
}
