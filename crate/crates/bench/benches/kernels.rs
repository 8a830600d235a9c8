use std::sync::Arc;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use relent_core::fields::{korn_ratio, random_zero_boundary_field};
use relent_core::relentropy::{Diagnostics, PeriodicVortex};
use relent_core::solver::{mms_forcing, stable_dt, step, Forcing, NoForcing, SchemeOptions};
use relent_core::{BoundaryKind, FluidParams, Grid, Isentropic, State, TestPair, ViscosityParams};

fn params() -> FluidParams {
    FluidParams::new(
        ViscosityParams::new(0.02, 0.0, 0.0).unwrap(),
        Isentropic::new(1.0, 5.0 / 3.0, 1.0).unwrap(),
    )
    .unwrap()
}

fn vortex() -> Arc<dyn TestPair> {
    Arc::new(PeriodicVortex {
        r0: 1.0,
        amplitude: 0.2,
        swirl: 0.5,
        omega: 2.0 * std::f64::consts::PI,
    })
}

fn solver(c: &mut Criterion) {
    let p = params();
    let pair = vortex();
    let opts = SchemeOptions::default();
    let mut g = c.benchmark_group("step");
    for n in [32usize, 64, 128] {
        let grid = Grid::square(n, 1.0, BoundaryKind::Periodic).unwrap();
        let s = State::sample(pair.as_ref(), grid, 0.0).unwrap();
        let dt = stable_dt(&s, &p, &opts).unwrap();
        let mms = mms_forcing(pair.clone(), &grid, &p).unwrap();
        g.bench_with_input(BenchmarkId::new("unforced", n), &s, |b, s| {
            b.iter(|| step(s, dt, &p, &NoForcing, &opts).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("manufactured", n), &s, |b, s| {
            b.iter(|| step(s, dt, &p, &mms, &opts).unwrap())
        });
    }
    g.finish();
}

fn diagnostics(c: &mut Criterion) {
    let p = params();
    let pair = vortex();
    let mut g = c.benchmark_group("diagnostics");
    for n in [32usize, 64, 128] {
        let grid = Grid::square(n, 1.0, BoundaryKind::Periodic).unwrap();
        let forcing: Arc<dyn Forcing> = Arc::new(mms_forcing(pair.clone(), &grid, &p).unwrap());
        let diag = Diagnostics::new(pair.clone(), p, forcing, 1.0).unwrap();
        let s = State::sample(pair.as_ref(), grid, 0.1).unwrap();
        g.bench_with_input(BenchmarkId::new("record", n), &s, |b, s| b.iter(|| diag.record(s, 0.0).unwrap()));
    }
    g.finish();
}

fn korn(c: &mut Criterion) {
    let visc = ViscosityParams::new(1.0, 0.0, 0.0).unwrap();
    let grid = Grid::square(64, 1.0, BoundaryKind::NoSlip).unwrap();
    let z = random_zero_boundary_field(&grid, 7, 0);
    c.bench_function("korn/field_64", |b| b.iter(|| random_zero_boundary_field(&grid, 7, 1)));
    c.bench_function("korn/ratio_64", |b| b.iter(|| korn_ratio(&z, &visc, None).unwrap()));
}

criterion_group!(
    name = benches;
    config = Criterion::default()
        .warm_up_time(Duration::from_millis(500))
        .measurement_time(Duration::from_secs(2))
        .sample_size(10);
    targets = solver, diagnostics, korn
);
criterion_main!(benches);
