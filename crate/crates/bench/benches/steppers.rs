use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use isav_bench::{ch_setup, smooth_field};
use isav_core::{Scheme, Spectral};
use std::hint::black_box;

fn fft_round_trip(c: &mut Criterion) {
    let mut group = c.benchmark_group("fft_round_trip");
    for n in [64, 128, 256] {
        let u = smooth_field(n);
        let spectral = Spectral::new(*u.grid());
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| spectral.inverse(spectral.forward(black_box(&u)).unwrap()).unwrap())
        });
    }
    group.finish();
}

fn one_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    group.sample_size(20);
    for scheme in Scheme::ALL {
        for n in [64, 128] {
            let (stepper, state) = ch_setup(n, scheme);
            group.bench_with_input(BenchmarkId::new(scheme.name(), n), &n, |b, _| {
                b.iter(|| stepper.step(black_box(&state)).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, fft_round_trip, one_step);
criterion_main!(benches);
