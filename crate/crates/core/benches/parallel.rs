use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use respmot::linker::{hungarian, CostMatrix};
use respmot::mot_io::FlowField;
use respmot::motion::{aggregate_displacement, sample_roi};
use respmot::par::Execution;
use respmot::response_map::{extract_peaks_with, gaussian_radius, render, NmsConfig, ResponseMap, Splat};

const STRATEGIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn splats(n: usize, seed: u64) -> Vec<Splat> {
    let mut r = Xoshiro256PlusPlus::seed_from_u64(seed);
    let kernel = gaussian_radius(40.0, 100.0, 0.7).unwrap();
    (0..n)
        .map(|_| Splat {
            cx: f64::from(r.random_range(0..960u32)),
            cy: f64::from(r.random_range(0..512u32)),
            kernel,
            present: true,
        })
        .collect()
}

fn map_60() -> ResponseMap {
    render(&splats(60, 1), 960, 512).unwrap().map
}

fn bench_peaks(c: &mut Criterion) {
    let map = map_60();
    let cfg = NmsConfig::default();
    let mut g = c.benchmark_group("extract_peaks_960x512");
    for (name, exec) in STRATEGIES {
        g.bench_function(name, |b| b.iter(|| extract_peaks_with(black_box(&map), &cfg, exec)));
    }
    g.finish();
}

fn bench_render_frames(c: &mut Criterion) {
    let frames: Vec<Vec<Splat>> = (0..16).map(|i| splats(40, i)).collect();
    let mut g = c.benchmark_group("render_16_frames");
    g.sample_size(20);
    for (name, exec) in STRATEGIES {
        g.bench_function(name, |b| {
            b.iter(|| exec.map_slice(&frames, |s| render(s, 960, 512).unwrap().skipped))
        });
    }
    g.finish();
}

fn bench_roi(c: &mut Criterion) {
    let mut r = Xoshiro256PlusPlus::seed_from_u64(5);
    let data = (0..960 * 512).map(|_| [r.random_range(-3.0f32..3.0), r.random_range(-3.0f32..3.0)]).collect();
    let flow = FlowField::from_data(960, 512, data).unwrap();
    let points: Vec<(i64, i64)> = (0..60).map(|_| (r.random_range(0..960), r.random_range(0..512))).collect();
    let mut g = c.benchmark_group("roi_aggregate_60");
    for side in [20usize, 64] {
        for (name, exec) in STRATEGIES {
            g.bench_with_input(BenchmarkId::new(name, side), &side, |b, &side| {
                b.iter(|| {
                    exec.map_slice(&points, |&(x, y)| aggregate_displacement(&sample_roi(&flow, x, y, side).unwrap()).unwrap())
                })
            });
        }
    }
    g.finish();
}

fn bench_hungarian(c: &mut Criterion) {
    let mut r = Xoshiro256PlusPlus::seed_from_u64(9);
    let mats: Vec<CostMatrix> = (0..8)
        .map(|_| CostMatrix::from_fn(60, 60, |_, _| r.random_range(0.0..1.0)))
        .collect();
    let mut g = c.benchmark_group("hungarian_8x_60x60");
    g.sample_size(20);
    for (name, exec) in STRATEGIES {
        g.bench_function(name, |b| b.iter(|| exec.map_slice(&mats, |m| hungarian(m).unwrap().pairs.len())));
    }
    g.finish();
}

criterion_group!(benches, bench_peaks, bench_render_frames, bench_roi, bench_hungarian);
criterion_main!(benches);
