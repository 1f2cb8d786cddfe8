use cbe_core::bounds::{bounds, category_interval, CorrelationCategory};
use cbe_core::composite::{
    composite_effect, joint_table, ArmRates, CorrelationPair, EffectMeasure, EffectSpec, MarginalSpec,
};
use cbe_core::sizing::{n_composite, power, DesignSpec, VarianceEstimator};
use cbe_core::strategy::{recommend, RateInput};
use cbe_core::Error;
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = MarginalSpec> {
    (0.01f64..0.45, 0.01f64..0.45, 0.05f64..0.6, 0.05f64..0.6).prop_filter_map("valid spec", |(p1, p2, f1, f2)| {
        let control = ArmRates::new(p1, p2).ok()?;
        MarginalSpec::new(control, EffectSpec::RiskDifference { d1: -p1 * f1, d2: -p2 * f2 }).ok()
    })
}

fn design_strategy() -> impl Strategy<Value = DesignSpec> {
    (0usize..3, 0usize..2, 0.01f64..0.1, 0.7f64..0.95).prop_map(|(m, v, a, p)| {
        DesignSpec::new(a, p, EffectMeasure::ALL[m], VarianceEstimator::ALL[v]).unwrap()
    })
}

fn category_strategy() -> impl Strategy<Value = CorrelationCategory> {
    prop::sample::select(CorrelationCategory::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bounds_contain_independence(spec in spec_strategy()) {
        let b = bounds(&spec).unwrap();
        prop_assert!(-1.0 <= b.lower && b.lower <= 0.0);
        prop_assert!(0.0 <= b.upper && b.upper <= 1.0);
    }

    #[test]
    fn categories_partition_the_range(spec in spec_strategy()) {
        let b = bounds(&spec).unwrap();
        let w = category_interval(b, CorrelationCategory::Weak);
        let m = category_interval(b, CorrelationCategory::Moderate);
        let s = category_interval(b, CorrelationCategory::Strong);
        let all = category_interval(b, CorrelationCategory::NoPrior);
        prop_assert_eq!(w.low, b.lower);
        prop_assert_eq!(w.high, m.low);
        prop_assert_eq!(m.high, s.low);
        prop_assert!((s.high - b.upper).abs() < 1e-15);
        prop_assert_eq!((all.low, all.high), (b.lower, b.upper));
    }

    #[test]
    fn joint_tables_inside_bounds_are_distributions(spec in spec_strategy(), t in 0.0f64..=1.0) {
        let b = bounds(&spec).unwrap();
        let rho = b.lower + t * b.width();
        for arm in [spec.control, spec.treatment().unwrap()] {
            let table = joint_table(&arm, rho).unwrap();
            let cells = table.cells();
            prop_assert!(cells.iter().all(|&c| (0.0..=1.0).contains(&c)));
            prop_assert!((cells.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let (m1, m2) = table.margins();
            prop_assert!((m1 - arm.p1).abs() < 1e-12 && (m2 - arm.p2).abs() < 1e-12);
            prop_assert!((table.pearson() - rho).abs() < 1e-9);
        }
    }

    /// Sizing at the top of a category keeps the target power anywhere in it.
    #[test]
    fn recommendation_keeps_power_over_category(
        spec in spec_strategy(),
        d in design_strategy(),
        cat in category_strategy(),
        t in 0.0f64..=1.0,
    ) {
        let r = match recommend(&RateInput::Point(spec), cat, &d) {
            Ok(r) => r,
            Err(Error::NullEffect { .. }) | Err(Error::InvalidEffect(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let rho = r.rho_interval.low + t * (r.rho_interval.high - r.rho_interval.low);
        let p = power(&spec, rho, r.sample_size.n_total, &d).unwrap();
        prop_assert!(p >= d.power_target - 1e-9, "power {} at rho {}", p, rho);
        prop_assert!(r.power_range[0] >= d.power_target - 1e-9);
    }

    /// Power is at least the target at the design correlation, and exceeds it
    /// for every smaller correlation.
    #[test]
    fn power_guarantee_below_design(spec in spec_strategy(), d in design_strategy(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let bd = bounds(&spec).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let rho_true = bd.lower + lo * bd.width();
        let rho_design = bd.lower + hi * bd.width();
        let Ok(n) = n_composite(&spec, rho_design, &d) else { return Ok(()) };
        prop_assert!(n.achieved_power_at_design >= d.power_target - 1e-12);
        prop_assert!(power(&spec, rho_true, n.n_total, &d).unwrap() >= n.achieved_power_at_design - 1e-12);
    }

    #[test]
    fn null_components_give_null_composite(p1 in 0.01f64..0.9, p2 in 0.01f64..0.9, m in 0usize..3, t in 0.0f64..=1.0) {
        let measure = EffectMeasure::ALL[m];
        let spec = MarginalSpec::new(ArmRates::new(p1, p2).unwrap(), EffectSpec::null(measure)).unwrap();
        let b = bounds(&spec).unwrap();
        let rho = b.lower + t * b.width();
        let e = composite_effect(&spec, CorrelationPair::common(rho)).unwrap();
        prop_assert!((e - measure.null_value()).abs() < 1e-12);
        let d = DesignSpec::new(0.025, 0.8, measure, VarianceEstimator::Pooled).unwrap();
        let err = n_composite(&spec, rho, &d).unwrap_err();
        prop_assert_eq!(err.code(), "null_effect");
    }

    #[test]
    fn infeasible_correlation_is_rejected(spec in spec_strategy(), over in 1e-6f64..0.5) {
        let b = bounds(&spec).unwrap();
        let d = DesignSpec::new(0.025, 0.8, EffectMeasure::RiskDifference, VarianceEstimator::Pooled).unwrap();
        for rho in [b.upper + over, b.lower - over] {
            if (-1.0..=1.0).contains(&rho) {
                let err = n_composite(&spec, rho, &d).unwrap_err();
                prop_assert!(err.is_infeasibility(), "{:?}", err);
            }
        }
    }
}
