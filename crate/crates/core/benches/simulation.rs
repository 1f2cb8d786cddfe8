use cbe_core::composite::{ArmRates, EffectMeasure, EffectSpec, MarginalSpec};
use cbe_core::exec::Exec;
use cbe_core::simulate::{empirical_rate, run_grid, GridConfig, Scenario};
use cbe_core::sizing::{DesignSpec, VarianceEstimator};
use cbe_core::strategy::{rho_curve, CurveInput};
use cbe_core::bounds::{RateInterval, RateIntervals};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Auto)];

fn scenario() -> Scenario {
    let spec = MarginalSpec::new(ArmRates::new(0.1, 0.2).unwrap(), EffectSpec::RiskRatio { r1: 0.7, r2: 0.8 })
        .unwrap();
    let d = DesignSpec::new(0.025, 0.8, EffectMeasure::RiskRatio, VarianceEstimator::Unpooled).unwrap();
    Scenario::sized(&spec, 0.3, 0.3, &d).unwrap()
}

fn bench_replications(c: &mut Criterion) {
    let s = scenario();
    let mut g = c.benchmark_group("empirical_rate_10k");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| empirical_rate(black_box(&s), 10_000, 1, false, exec).unwrap())
        });
    }
    g.finish();
}

fn bench_grid(c: &mut Criterion) {
    let config = GridConfig {
        p1: vec![0.05, 0.1],
        p2: vec![0.1, 0.2],
        effect1: vec![0.6, 0.8],
        effect2: vec![0.6, 0.8],
        rho_true: vec![0.0, 0.3],
        reps: 200,
        ..GridConfig::default()
    };
    let mut g = c.benchmark_group("run_grid_small");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_grid(black_box(&config), exec).unwrap())
        });
    }
    g.finish();
}

fn bench_curve(c: &mut Criterion) {
    let input = CurveInput {
        spec: MarginalSpec::new(
            ArmRates::new(0.095, 0.137).unwrap(),
            EffectSpec::RiskDifference { d1: -0.022, d2: -0.027 },
        )
        .unwrap(),
        intervals: Some(
            RateIntervals::new(RateInterval::new(0.078, 0.112).unwrap(), RateInterval::new(0.117, 0.157).unwrap())
                .unwrap(),
        ),
    };
    let d = DesignSpec::new(0.025, 0.8, EffectMeasure::RiskDifference, VarianceEstimator::Pooled).unwrap();
    let mut g = c.benchmark_group("rho_curve_2000");
    for (name, exec) in POLICIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| rho_curve(black_box(&input), &d, 2000, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_replications, bench_grid, bench_curve);
criterion_main!(benches);
