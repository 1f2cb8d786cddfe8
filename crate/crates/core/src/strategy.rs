//! Sizing strategies for an unknown correlation and uncertain event rates.
//!
//! Sample size increases with the correlation between the components, so a
//! trial sized at the upper end of a plausible correlation interval keeps its
//! power anywhere inside that interval. With interval-valued control rates
//! the trial is additionally sized at the rate corner that needs the most
//! subjects.

use serde::{Deserialize, Serialize};

use crate::bounds::{
    bounds, category_interval, robust_bounds_with, CorrelationBounds, CorrelationCategory,
    RateIntervals, RateSearch, RhoInterval,
};
use crate::composite::{ArmRates, EffectSpec, MarginalSpec};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::sizing::{n_composite, power, DesignSpec, SampleSizeResult};

/// Control-rate information available at the design stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateInput {
    Point(MarginalSpec),
    Intervals { intervals: RateIntervals, effect: EffectSpec },
}

impl RateInput {
    pub fn effect(&self) -> EffectSpec {
        match self {
            RateInput::Point(spec) => spec.effect,
            RateInput::Intervals { effect, .. } => *effect,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyOptions {
    pub search: RateSearch,
    /// Interior points, besides the two endpoints, at which power is
    /// evaluated across a correlation interval.
    pub power_sweep: usize,
}

impl Default for StrategyOptions {
    fn default() -> Self {
        Self { search: RateSearch::default(), power_sweep: 9 }
    }
}

/// Correlation range relevant to the input: the point bounds, or the robust
/// bounds over the rate intervals.
pub fn feasible_range(input: &RateInput, search: RateSearch) -> Result<CorrelationBounds> {
    match input {
        RateInput::Point(spec) => bounds(spec),
        RateInput::Intervals { intervals, effect } => {
            robust_bounds_with(intervals, effect, search).map(Into::into)
        }
    }
}

/// Recommended sample size for one correlation category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub category: CorrelationCategory,
    pub bounds: CorrelationBounds,
    pub rho_interval: RhoInterval,
    /// Control rates the trial is sized at.
    pub design_rates: ArmRates,
    /// Smallest and largest sample size needed across the category.
    pub sample_size_bounds: [u64; 2],
    pub sample_size: SampleSizeResult,
    /// Power of the recommended trial over the category (and over the rate
    /// corners for interval input).
    pub power_range: [f64; 2],
}

fn sized_at(control: ArmRates, effect: EffectSpec, rho: f64, d: &DesignSpec) -> Result<SampleSizeResult> {
    n_composite(&MarginalSpec::new(control, effect)?, rho, d)
}

/// The rate pairs between which the sample size varies for interval input,
/// ordered `(least demanding, most demanding)` at correlation `rho`.
fn corner_extremes(
    intervals: &RateIntervals,
    effect: EffectSpec,
    rho: f64,
    d: &DesignSpec,
) -> Result<[(ArmRates, SampleSizeResult); 2]> {
    let low = intervals.low_corner();
    let high = intervals.high_corner();
    let at_low = sized_at(low, effect, rho, d)?;
    let at_high = sized_at(high, effect, rho, d)?;
    if at_high.n_total_raw >= at_low.n_total_raw {
        Ok([(low, at_low), (high, at_high)])
    } else {
        Ok([(high, at_high), (low, at_low)])
    }
}

fn sweep(interval: RhoInterval, interior: usize) -> impl Iterator<Item = f64> {
    let steps = interior + 1;
    (0..=steps).map(move |i| {
        if i == steps {
            interval.high
        } else {
            interval.low + (interval.high - interval.low) * i as f64 / steps as f64
        }
    })
}

pub fn recommend(input: &RateInput, category: CorrelationCategory, d: &DesignSpec) -> Result<Recommendation> {
    recommend_with(input, category, d, &StrategyOptions::default())
}

/// Sample size for the given correlation category: sized at the upper end of
/// the category's correlation interval, and at the most demanding rate corner
/// when the control rates are given as intervals.
pub fn recommend_with(
    input: &RateInput,
    category: CorrelationCategory,
    d: &DesignSpec,
    opts: &StrategyOptions,
) -> Result<Recommendation> {
    d.validate()?;
    let b = feasible_range(input, opts.search)?;
    let interval = category_interval(b, category);
    let effect = input.effect();

    let (design_rates, eval_rates, sample_size, smallest) = match input {
        RateInput::Point(spec) => {
            let n = n_composite(spec, interval.high, d)?;
            let smallest = n_composite(spec, interval.low, d)?;
            (spec.control, vec![spec.control], n, smallest)
        }
        RateInput::Intervals { intervals, .. } => {
            let [_, (worst, n)] = corner_extremes(intervals, effect, interval.high, d)?;
            let [(_, smallest), _] = corner_extremes(intervals, effect, interval.low, d)?;
            (
                worst,
                vec![intervals.low_corner(), intervals.high_corner()],
                n,
                smallest,
            )
        }
    };

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for rates in eval_rates {
        let spec = MarginalSpec::new(rates, effect)?;
        for rho in sweep(interval, opts.power_sweep) {
            let p = power(&spec, rho, sample_size.n_total, d)?;
            lo = lo.min(p);
            hi = hi.max(p);
        }
    }

    Ok(Recommendation {
        category,
        bounds: b,
        rho_interval: interval,
        design_rates,
        sample_size_bounds: [smallest.n_total, sample_size.n_total],
        sample_size,
        power_range: [lo, hi],
    })
}

/// Recommendations for every category, in the order weak, moderate, strong,
/// no prior.
pub fn recommend_all(input: &RateInput, d: &DesignSpec, opts: &StrategyOptions) -> Result<Vec<Recommendation>> {
    CorrelationCategory::ALL
        .iter()
        .map(|&c| recommend_with(input, c, d, opts))
        .collect()
}

/// Range of sample sizes needed at correlation `rho` when the control rates
/// vary over the intervals.
pub fn sample_size_interval(
    intervals: &RateIntervals,
    effect: &EffectSpec,
    rho: f64,
    d: &DesignSpec,
) -> Result<[u64; 2]> {
    intervals.validate()?;
    d.validate()?;
    let [(_, least), (_, most)] = corner_extremes(intervals, *effect, rho, d)?;
    Ok([least.n_total, most.n_total])
}

/// Inputs for a sample-size-versus-correlation curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveInput {
    pub spec: MarginalSpec,
    pub intervals: Option<RateIntervals>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub rho: f64,
    pub n_low: u64,
    pub n_point: u64,
    pub n_high: u64,
}

/// Correlation range covered by a curve.
pub fn curve_range(input: &CurveInput, search: RateSearch) -> Result<CorrelationBounds> {
    let mut b = bounds(&input.spec)?;
    if let Some(iv) = &input.intervals {
        if !iv.contains(&input.spec.control) {
            return Err(Error::InvalidArgument(
                "point rates must lie inside the rate intervals".into(),
            ));
        }
        let rb = robust_bounds_with(iv, &input.spec.effect, search)?;
        b.lower = b.lower.max(rb.lower);
        b.upper = b.upper.min(rb.upper);
    }
    Ok(b)
}

/// Sample size at `n_points` equally spaced correlations spanning the
/// feasible range, with the band induced by the rate intervals (the band
/// collapses onto the point value without intervals).
pub fn rho_curve(input: &CurveInput, d: &DesignSpec, n_points: usize, exec: Exec) -> Result<Vec<CurvePoint>> {
    if n_points < 2 {
        return Err(Error::InvalidArgument("a curve needs at least 2 points".into()));
    }
    d.validate()?;
    let b = curve_range(input, RateSearch::default())?;
    let rho_at = |i: usize| {
        if i + 1 == n_points {
            b.upper
        } else {
            b.lower + b.width() * i as f64 / (n_points - 1) as f64
        }
    };
    exec.map(n_points, |i| {
        let rho = rho_at(i);
        let n_point = n_composite(&input.spec, rho, d)?.n_total;
        let [n_low, n_high] = match &input.intervals {
            Some(iv) => sample_size_interval(iv, &input.spec.effect, rho, d)?,
            None => [n_point, n_point],
        };
        Ok(CurvePoint { rho, n_low, n_point, n_high })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::RateInterval;
    use crate::composite::EffectMeasure;
    use crate::sizing::VarianceEstimator;

    const DELTA: EffectSpec = EffectSpec::RiskDifference { d1: -0.022, d2: -0.027 };

    fn design() -> DesignSpec {
        DesignSpec::new(0.025, 0.80, EffectMeasure::RiskDifference, VarianceEstimator::Pooled).unwrap()
    }

    fn point() -> RateInput {
        RateInput::Point(MarginalSpec::new(ArmRates::new(0.095, 0.137).unwrap(), DELTA).unwrap())
    }

    fn intervals() -> RateIntervals {
        RateIntervals::new(
            RateInterval::new(0.078, 0.112).unwrap(),
            RateInterval::new(0.117, 0.157).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn point_recommendations() {
        for (cat, n) in [
            (CorrelationCategory::Weak, 2860),
            (CorrelationCategory::Moderate, 3425),
            (CorrelationCategory::Strong, 4201),
        ] {
            let r = recommend(&point(), cat, &design()).unwrap();
            assert!((r.sample_size.n_total as i64 - n).abs() <= 2, "{cat:?}: {r:?}");
            assert!(r.power_range[0] >= 0.80 - 1e-9);
            assert!(r.power_range[1] <= 0.88);
        }
    }

    #[test]
    fn no_prior_equals_strong() {
        let strong = recommend(&point(), CorrelationCategory::Strong, &design()).unwrap();
        let none = recommend(&point(), CorrelationCategory::NoPrior, &design()).unwrap();
        assert_eq!(strong.sample_size, none.sample_size);
        assert_eq!(none.rho_interval.low, none.bounds.lower);
    }

    #[test]
    fn interval_recommendation_uses_high_corner_for_rd() {
        let input = RateInput::Intervals { intervals: intervals(), effect: DELTA };
        let r = recommend(&input, CorrelationCategory::Strong, &design()).unwrap();
        assert_eq!(r.design_rates, intervals().high_corner());
        assert!(r.power_range[0] >= 0.80 - 1e-9);
    }

    #[test]
    fn interval_recommendation_uses_low_corner_for_rr() {
        let effect = EffectSpec::RiskRatio { r1: 0.7, r2: 0.8 };
        let d = design().with_measure(EffectMeasure::RiskRatio);
        let input = RateInput::Intervals { intervals: intervals(), effect };
        let r = recommend(&input, CorrelationCategory::Moderate, &d).unwrap();
        assert_eq!(r.design_rates, intervals().low_corner());
    }

    #[test]
    fn singleton_intervals_are_degenerate() {
        let iv = RateIntervals::new(
            RateInterval::singleton(0.095).unwrap(),
            RateInterval::singleton(0.137).unwrap(),
        )
        .unwrap();
        let [lo, hi] = sample_size_interval(&iv, &DELTA, 0.3, &design()).unwrap();
        assert_eq!(lo, hi);
    }

    #[test]
    fn curve_band_and_monotonicity() {
        let input = CurveInput {
            spec: MarginalSpec::new(ArmRates::new(0.095, 0.137).unwrap(), DELTA).unwrap(),
            intervals: Some(intervals()),
        };
        let curve = rho_curve(&input, &design(), 40, Exec::Auto).unwrap();
        assert_eq!(curve.len(), 40);
        for w in curve.windows(2) {
            assert!(w[1].n_point >= w[0].n_point);
            assert!(w[1].rho > w[0].rho);
        }
        for p in &curve {
            assert!(p.n_low <= p.n_point && p.n_point <= p.n_high, "{p:?}");
        }
        assert!(rho_curve(&input, &design(), 1, Exec::Auto).is_err());
    }

    #[test]
    fn curve_rejects_point_outside_intervals() {
        let input = CurveInput {
            spec: MarginalSpec::new(ArmRates::new(0.2, 0.137).unwrap(), DELTA).unwrap(),
            intervals: Some(intervals()),
        };
        assert!(rho_curve(&input, &design(), 10, Exec::Sequential).is_err());
    }
}
