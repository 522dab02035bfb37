use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use udw_core::asymptotics::segment_integral;
use udw_core::cavity::{mode_amplitude, probability_modesum, rate_sudden};
use udw_core::quadrature::integrate_1d;
use udw_core::specfun::{erfi, gamma_inc};
use udw_core::{Complex64, DetectorConfig, QuadOptions, SingularitySpec, Switching, Trajectory};

fn special_functions(c: &mut Criterion) {
    let points = [
        Complex64::new(0.0, 0.3),
        Complex64::new(0.0, 4.0),
        Complex64::new(0.0, 40.0),
        Complex64::new(1.5, -2.0),
    ];
    c.bench_function("gamma_inc", |b| {
        b.iter(|| points.iter().map(|&z| gamma_inc(black_box(z)).unwrap()).sum::<Complex64>())
    });
    c.bench_function("erfi", |b| {
        b.iter(|| points.iter().map(|&z| erfi(black_box(z)).unwrap()).sum::<Complex64>())
    });
    c.bench_function("segment_integral", |b| {
        b.iter(|| segment_integral(black_box(12.5), black_box(0.4)))
    });
}

fn quadrature(c: &mut Criterion) {
    let opts = QuadOptions::default().with_rel_tol(1e-10);
    c.bench_function("integrate_1d/oscillatory", |b| {
        b.iter(|| {
            integrate_1d(|x| Complex64::from_polar((-x * x).exp(), 30.0 * x), -8.0, 8.0, &opts, None).unwrap()
        })
    });
    let sing = SingularitySpec::logarithmic(vec![0.3]);
    c.bench_function("integrate_1d/log_singular", |b| {
        b.iter(|| {
            integrate_1d(|x| Complex64::new((x - 0.3).abs().ln(), 0.0), 0.0, 1.0, &opts, Some(&sing)).unwrap()
        })
    });
}

fn cavity(c: &mut Criterion) {
    let det = DetectorConfig::new(2.0).unwrap();
    let sw = Switching::gaussian(0.4).unwrap();
    let traj = Trajectory::new(1.0).unwrap();
    c.bench_function("mode_amplitude", |b| {
        b.iter(|| mode_amplitude(black_box(37), &det, &sw, &traj, 200.0).unwrap())
    });
    c.bench_function("probability_modesum", |b| {
        b.iter(|| probability_modesum(&det, &sw, &traj, black_box(200.0)).unwrap())
    });
    let sudden = Switching::sudden(1.0).unwrap();
    c.bench_function("rate_sudden", |b| {
        b.iter(|| rate_sudden(&det, &sudden, &traj, black_box(20.0)).unwrap())
    });
}

criterion_group!(benches, special_functions, quadrature, cavity);
criterion_main!(benches);
