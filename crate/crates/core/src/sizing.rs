//! Sample size and power for a one-sided test of the composite endpoint.
//!
//! All formulas are for a balanced two-arm design and a one-sided test of
//! risk reduction. The total sample size for a standardized contrast `e`
//! (risk difference, log risk ratio or log odds ratio) is
//!
//! ```text
//! n = 2 (z_alpha s0 + z_beta s1)^2 / e^2
//! ```
//!
//! where `s1^2` is the per-subject variance of the contrast under the
//! alternative and `s0^2` the variance under the null. With the unpooled
//! estimator `s0 = s1`; with the pooled estimator `s0` is evaluated at the
//! average composite rate of both arms. Power follows by solving the same
//! relation for `z_beta`.

use serde::{Deserialize, Serialize};

use crate::composite::{composite_effect, composite_rate, CorrelationPair, EffectMeasure, MarginalSpec};
use crate::error::{Error, Result};
use crate::normal::{cdf_normal, quantile_normal, upper_critical};

/// Composite effects closer than this to the null (on the contrast scale)
/// are rejected as undetectable.
pub const NULL_EFFECT_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceEstimator {
    Pooled,
    Unpooled,
}

impl VarianceEstimator {
    pub const ALL: [VarianceEstimator; 2] = [VarianceEstimator::Pooled, VarianceEstimator::Unpooled];

    pub fn name(self) -> &'static str {
        match self {
            VarianceEstimator::Pooled => "pooled",
            VarianceEstimator::Unpooled => "unpooled",
        }
    }
}

impl std::str::FromStr for VarianceEstimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pooled" => Ok(VarianceEstimator::Pooled),
            "unpooled" => Ok(VarianceEstimator::Unpooled),
            other => Err(Error::InvalidArgument(format!("unknown variance estimator '{other}'"))),
        }
    }
}

impl std::fmt::Display for VarianceEstimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Error rates, effect measure and variance estimator of the planned test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    /// One-sided significance level.
    pub alpha: f64,
    /// Target power, `1 - beta`.
    pub power_target: f64,
    pub measure: EffectMeasure,
    pub variance: VarianceEstimator,
}

impl DesignSpec {
    pub fn new(
        alpha: f64,
        power_target: f64,
        measure: EffectMeasure,
        variance: VarianceEstimator,
    ) -> Result<Self> {
        let d = Self { alpha, power_target, measure, variance };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "one-sided alpha must be in (0, 0.5), got {}",
                self.alpha
            )));
        }
        if !(self.power_target > 0.5 && self.power_target < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "target power must be in (0.5, 1), got {}",
                self.power_target
            )));
        }
        Ok(())
    }

    pub fn z_alpha(&self) -> f64 {
        upper_critical(self.alpha).expect("alpha validated")
    }

    pub fn z_beta(&self) -> f64 {
        quantile_normal(self.power_target).expect("power validated")
    }

    pub fn with_measure(self, measure: EffectMeasure) -> Self {
        Self { measure, ..self }
    }

    pub fn with_variance(self, variance: VarianceEstimator) -> Self {
        Self { variance, ..self }
    }
}

/// Contrast and per-subject standard deviations under null and alternative.
#[derive(Debug, Clone, Copy)]
struct Contrast {
    effect: f64,
    sd_null: f64,
    sd_alt: f64,
}

fn contrast(p0: f64, effect_star: f64, d: &DesignSpec) -> Result<Contrast> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::InvalidRate(format!(
            "composite control rate {p0} must lie in (0, 1)"
        )));
    }
    let p1 = d.measure.apply(p0, effect_star);
    if !(p1 > 0.0 && p1 < 1.0) || !effect_star.is_finite() {
        return Err(Error::InvalidRate(format!(
            "composite effect {effect_star} on control rate {p0} implies treatment rate {p1} outside (0, 1)"
        )));
    }
    let (q0, q1) = (1.0 - p0, 1.0 - p1);
    let pbar = 0.5 * (p0 + p1);
    let qbar = 1.0 - pbar;
    let pooled = d.variance == VarianceEstimator::Pooled;

    let (effect, var_alt, var_null) = match d.measure {
        EffectMeasure::RiskDifference => {
            let v1 = p0 * q0 + p1 * q1;
            (effect_star, v1, 2.0 * pbar * qbar)
        }
        EffectMeasure::RiskRatio => {
            if effect_star <= 0.0 {
                return Err(Error::InvalidEffect(format!("risk ratio {effect_star} must be positive")));
            }
            let v1 = q1 / p1 + q0 / p0;
            (effect_star.ln(), v1, 2.0 * qbar / pbar)
        }
        EffectMeasure::OddsRatio => {
            if effect_star <= 0.0 {
                return Err(Error::InvalidEffect(format!("odds ratio {effect_star} must be positive")));
            }
            let v1 = 1.0 / (p0 * q0) + 1.0 / (p1 * q1);
            (effect_star.ln(), v1, 2.0 / (pbar * qbar))
        }
    };
    if effect.abs() < NULL_EFFECT_THRESHOLD {
        return Err(Error::NullEffect { effect: effect_star });
    }
    if effect > 0.0 {
        return Err(Error::InvalidEffect(format!(
            "composite effect {effect_star} does not indicate a risk reduction"
        )));
    }
    let sd_alt = var_alt.sqrt();
    Ok(Contrast {
        effect,
        sd_null: if pooled { var_null.sqrt() } else { sd_alt },
        sd_alt,
    })
}

/// Total sample size (real-valued) for composite control rate `p0_star` and
/// composite effect `effect_star` in the measure of `d`.
pub fn ss_from_composite(p0_star: f64, effect_star: f64, d: &DesignSpec) -> Result<f64> {
    d.validate()?;
    let c = contrast(p0_star, effect_star, d)?;
    let root = d.z_alpha() * c.sd_null + d.z_beta() * c.sd_alt;
    Ok(2.0 * root * root / (c.effect * c.effect))
}

/// Power of the one-sided test with `n_total` subjects (both arms).
pub fn power_from_composite(p0_star: f64, effect_star: f64, n_total: f64, d: &DesignSpec) -> Result<f64> {
    d.validate()?;
    // Negated form also rejects NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(n_total > 0.0) {
        return Err(Error::InvalidArgument(format!("sample size must be positive, got {n_total}")));
    }
    let c = contrast(p0_star, effect_star, d)?;
    let z = ((n_total / 2.0).sqrt() * c.effect.abs() - d.z_alpha() * c.sd_null) / c.sd_alt;
    Ok(cdf_normal(z))
}

/// Result of sizing a trial at one correlation value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSizeResult {
    pub n_total_raw: f64,
    pub n_total: u64,
    pub n_per_group: u64,
    pub design_rho_used: f64,
    pub achieved_power_at_design: f64,
}

/// Composite control rate and composite effect (in the measure of `d`) at a
/// common correlation `rho`.
pub fn composite_parameters(spec: &MarginalSpec, rho: f64, d: &DesignSpec) -> Result<(f64, f64)> {
    let spec = spec.expressed_as(d.measure)?;
    let p0_star = composite_rate(&spec.control, rho)?;
    let effect_star = composite_effect(&spec, CorrelationPair::common(rho))?;
    Ok((p0_star, effect_star))
}

/// Real-valued total sample size at a common correlation `rho`.
pub fn n_raw(spec: &MarginalSpec, rho: f64, d: &DesignSpec) -> Result<f64> {
    let (p0, e) = composite_parameters(spec, rho, d)?;
    ss_from_composite(p0, e, d)
}

/// Sizes a trial from the component margins at a common correlation `rho`.
pub fn n_composite(spec: &MarginalSpec, rho: f64, d: &DesignSpec) -> Result<SampleSizeResult> {
    let (p0, e) = composite_parameters(spec, rho, d)?;
    let raw = ss_from_composite(p0, e, d)?;
    let n_total = (raw.ceil() as u64).max(2);
    let n_per_group = ((raw / 2.0).ceil() as u64).max(1);
    Ok(SampleSizeResult {
        n_total_raw: raw,
        n_total,
        n_per_group,
        design_rho_used: rho,
        achieved_power_at_design: power_from_composite(p0, e, n_total as f64, d)?,
    })
}

/// Power with `n_total` subjects when the true common correlation is `rho`.
pub fn power(spec: &MarginalSpec, rho: f64, n_total: u64, d: &DesignSpec) -> Result<f64> {
    if n_total < 2 {
        return Err(Error::InvalidArgument(format!(
            "total sample size must be at least 2, got {n_total}"
        )));
    }
    let (p0, e) = composite_parameters(spec, rho, d)?;
    power_from_composite(p0, e, n_total as f64, d)
}
