//! Boxes against the spectrogram content they describe.

use proptest::prelude::*;
use rfscene::annotate::{annotate_emitters, annotate_nist, BBox, NistClass, NistRecord};
use rfscene::rng::stream;
use rfscene::scene::{compose_frame, sample_emitter, FrameGeometry};
use rfscene::spectrogram::{spectrogram, Band, PresetSize, ResolutionPreset};
use rfscene::waveform::RadarClass;

const G: FrameGeometry = FrameGeometry::WIDEBAND;

/// Pixel of the strongest bin, as normalized image coordinates of its centre.
fn peak_xy(spec: &rfscene::Spectrogram) -> (f64, f64) {
    let i = (0..spec.grid.len()).max_by(|&a, &b| spec.grid[a].total_cmp(&spec.grid[b])).unwrap();
    let (t, f) = (i / spec.dim_f, i % spec.dim_f);
    let x = (t as f64 + 0.5) / spec.dim_t as f64;
    let y = ((spec.dim_f - 1 - f) as f64 + 0.5) / spec.dim_f as f64;
    (x, y)
}

fn inside_grown(b: &BBox, x: f64, y: f64, dx: f64, dy: f64) -> bool {
    let (x0, y0, x1, y1) = b.corners();
    x >= x0 - dx && x <= x1 + dx && y >= y0 - dy && y <= y1 + dy
}

#[test]
fn clean_peak_falls_in_its_box() {
    let preset = ResolutionPreset::standard(Band::Wideband, PresetSize::S, G.n_samples).unwrap();
    let mut rng = stream(2024);
    let mut checked = 0;
    while checked < 44 {
        let class = RadarClass::ALL[checked % 11];
        let e = sample_emitter(class, &G, &mut rng).unwrap();
        let b = rfscene::annotate::est_bandwidth(&e.params);
        // content past the band edge wraps around; only in-band emitters are compared
        if e.f_c.abs() + 0.5 * b >= 0.5 * G.sample_rate - 5e6 {
            continue;
        }
        let clean = compose_frame(std::slice::from_ref(&e), &G).unwrap();
        let spec = spectrogram(&clean, &preset).unwrap();
        let ann = annotate_emitters(std::slice::from_ref(&e), &G);
        assert_eq!(ann.len(), 1);
        let (x, y) = peak_xy(&spec);
        let (dx, dy) = (1.0 / spec.dim_t as f64, 1.0 / spec.dim_f as f64);
        assert!(inside_grown(&ann[0].bbox, x, y, dx, dy), "{class}: peak ({x}, {y}) outside {:?}", ann[0].bbox);
        checked += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sampled_boxes_inside_unit_square(seed in any::<u64>(), c in 0usize..11) {
        let mut rng = stream(seed);
        let e = sample_emitter(RadarClass::ALL[c], &G, &mut rng).unwrap();
        for a in annotate_emitters(&[e], &G) {
            prop_assert!(a.bbox.inside_unit(1e-12));
            prop_assert!(a.bbox.w > 0.0 && a.bbox.h > 0.0);
            prop_assert_eq!(a.class_id, c as u32);
        }
    }

    #[test]
    fn nist_height_is_padded_reciprocal(pw_us in 1u32..500, prf_hz in 100u32..2000, n in 1u32..20, fc_khz in -4000i32..4000) {
        let rec = NistRecord {
            frame_id: "x".into(),
            class: Some(NistClass::P0N1),
            t_s: Some(0.01),
            f_c: Some(fc_khz as f64 * 1e3),
            t_pw: Some(pw_us as f64 * 1e-6),
            b_chirp: None,
            f_prf: Some(prf_hz as f64),
            n: Some(n),
        };
        let a = annotate_nist(&rec).unwrap().unwrap();
        prop_assert!(a.bbox.inside_unit(1e-12));
        let t_pw = pw_us as f64 * 1e-6;
        let want = (1.5 / t_pw) / 10e6;
        // unclipped boxes carry the full height
        let f_c = fc_khz as f64 * 1e3;
        if f_c.abs() + 0.75 / t_pw < 5e6 {
            prop_assert!((a.bbox.h - want).abs() < 1e-12);
        }
    }
}
