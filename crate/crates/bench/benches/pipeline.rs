use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rfscene::annotate::annotate_emitters;
use rfscene::eval::map_suite;
use rfscene::scene::FrameGeometry;
use rfscene::spectrogram::{render, spectrogram, Band, PresetSize, ResolutionPreset};
use rfscene_bench::{dense_frame, eval_fixture};

const N: usize = FrameGeometry::WIDEBAND.n_samples;

fn synthesis(c: &mut Criterion) {
    let mut seed = 0u64;
    c.bench_function("synthesize_dense_frame", |b| {
        b.iter(|| {
            seed += 1;
            dense_frame(seed)
        })
    });
}

fn spectrograms(c: &mut Criterion) {
    let frame = dense_frame(1);
    let mut group = c.benchmark_group("spectrogram");
    group.sample_size(20);
    for size in PresetSize::ALL {
        let preset = ResolutionPreset::standard(Band::Wideband, size, N).unwrap();
        group.bench_function(size.to_string(), |b| b.iter(|| spectrogram(&frame.iq, &preset).unwrap()));
    }
    group.finish();
}

fn end_to_end(c: &mut Criterion) {
    let preset = ResolutionPreset::standard(Band::Wideband, PresetSize::S, N).unwrap();
    let mut seed = 0u64;
    c.bench_function("frame_to_png_s", |b| {
        b.iter_batched(
            || {
                seed += 1;
                seed
            },
            |s| {
                let frame = dense_frame(s);
                let labels = annotate_emitters(&frame.emitters, &FrameGeometry::WIDEBAND);
                let png = render(&spectrogram(&frame.iq, &preset).unwrap()).unwrap();
                (labels, png)
            },
            BatchSize::SmallInput,
        )
    });
}

fn evaluation(c: &mut Criterion) {
    let (dets, gts, snr) = eval_fixture(600, 3);
    c.bench_function("map_suite_600_frames", |b| b.iter(|| map_suite(&dets, &gts, &snr).unwrap()));
}

criterion_group!(benches, synthesis, spectrograms, end_to_end, evaluation);
criterion_main!(benches);
