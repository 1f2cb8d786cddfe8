//! Composite endpoint parameters derived from the two components.
//!
//! A patient experiences the composite event when at least one of the two
//! component events occurs. Given the component event rates of an arm and the
//! Pearson correlation between the component indicators, the joint 2x2
//! distribution of the components is fully determined, and with it the
//! composite event rate. [`JointTable`] holds that distribution explicitly and
//! is used as the reference the closed-form expressions are checked against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on joint-table cells before a correlation is declared infeasible.
pub const CELL_TOLERANCE: f64 = 1e-12;

/// Component event rates in one arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmRates {
    pub p1: f64,
    pub p2: f64,
}

impl ArmRates {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        for (k, p) in [(1, p1), (2, p2)] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidRate(format!(
                    "event rate p{k} = {p} must lie strictly between 0 and 1"
                )));
            }
        }
        Ok(Self { p1, p2 })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.p1, self.p2).map(|_| ())
    }

    pub fn q1(&self) -> f64 {
        1.0 - self.p1
    }

    pub fn q2(&self) -> f64 {
        1.0 - self.p2
    }

    /// Square root of the product of the two Bernoulli variances.
    pub fn sd_product(&self) -> f64 {
        (self.p1 * self.q1() * self.p2 * self.q2()).sqrt()
    }

    /// Range of Pearson correlations for which a joint distribution with
    /// these margins exists.
    pub fn correlation_range(&self) -> (f64, f64) {
        let (p1, p2, q1, q2) = (self.p1, self.p2, self.q1(), self.q2());
        let lower = f64::max(-((p1 * p2) / (q1 * q2)).sqrt(), -((q1 * q2) / (p1 * p2)).sqrt());
        let upper = f64::min(((p1 * q2) / (p2 * q1)).sqrt(), ((p2 * q1) / (p1 * q2)).sqrt());
        (lower, upper)
    }
}

/// Effect measure used to compare the two arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EffectMeasure {
    #[serde(rename = "rd")]
    RiskDifference,
    #[serde(rename = "rr")]
    RiskRatio,
    #[serde(rename = "or")]
    OddsRatio,
}

impl EffectMeasure {
    pub const ALL: [EffectMeasure; 3] = [
        EffectMeasure::RiskDifference,
        EffectMeasure::RiskRatio,
        EffectMeasure::OddsRatio,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            EffectMeasure::RiskDifference => "rd",
            EffectMeasure::RiskRatio => "rr",
            EffectMeasure::OddsRatio => "or",
        }
    }

    /// Effect value meaning "no difference between arms".
    pub fn null_value(self) -> f64 {
        match self {
            EffectMeasure::RiskDifference => 0.0,
            _ => 1.0,
        }
    }

    /// The effect between two event probabilities, treatment relative to control.
    pub fn between(self, control: f64, treatment: f64) -> f64 {
        match self {
            EffectMeasure::RiskDifference => treatment - control,
            EffectMeasure::RiskRatio => treatment / control,
            EffectMeasure::OddsRatio => {
                (treatment / (1.0 - treatment)) / (control / (1.0 - control))
            }
        }
    }

    /// Applies an effect of this measure to a control probability.
    pub fn apply(self, control: f64, effect: f64) -> f64 {
        match self {
            EffectMeasure::RiskDifference => control + effect,
            EffectMeasure::RiskRatio => control * effect,
            EffectMeasure::OddsRatio => {
                let odds = effect * control / (1.0 - control);
                odds / (1.0 + odds)
            }
        }
    }
}

impl std::str::FromStr for EffectMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rd" | "risk_difference" | "difference" => Ok(EffectMeasure::RiskDifference),
            "rr" | "risk_ratio" | "relative_risk" => Ok(EffectMeasure::RiskRatio),
            "or" | "odds_ratio" => Ok(EffectMeasure::OddsRatio),
            other => Err(Error::InvalidArgument(format!("unknown effect measure '{other}'"))),
        }
    }
}

impl std::fmt::Display for EffectMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.short_name())
    }
}

/// Per-component treatment effects expressed in one measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "measure", rename_all = "snake_case")]
pub enum EffectSpec {
    RiskDifference { d1: f64, d2: f64 },
    RiskRatio { r1: f64, r2: f64 },
    OddsRatio { o1: f64, o2: f64 },
}

impl EffectSpec {
    pub fn new(measure: EffectMeasure, e1: f64, e2: f64) -> Result<Self> {
        let spec = match measure {
            EffectMeasure::RiskDifference => EffectSpec::RiskDifference { d1: e1, d2: e2 },
            EffectMeasure::RiskRatio => EffectSpec::RiskRatio { r1: e1, r2: e2 },
            EffectMeasure::OddsRatio => EffectSpec::OddsRatio { o1: e1, o2: e2 },
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Unit effects (no difference between arms) in the given measure.
    pub fn null(measure: EffectMeasure) -> Self {
        let v = measure.null_value();
        Self::new(measure, v, v).expect("null effects are valid")
    }

    pub fn measure(&self) -> EffectMeasure {
        match self {
            EffectSpec::RiskDifference { .. } => EffectMeasure::RiskDifference,
            EffectSpec::RiskRatio { .. } => EffectMeasure::RiskRatio,
            EffectSpec::OddsRatio { .. } => EffectMeasure::OddsRatio,
        }
    }

    pub fn values(&self) -> (f64, f64) {
        match *self {
            EffectSpec::RiskDifference { d1, d2 } => (d1, d2),
            EffectSpec::RiskRatio { r1, r2 } => (r1, r2),
            EffectSpec::OddsRatio { o1, o2 } => (o1, o2),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (e1, e2) = self.values();
        let ok = |e: f64| match self.measure() {
            EffectMeasure::RiskDifference => e > -1.0 && e < 1.0,
            _ => e > 0.0 && e.is_finite(),
        };
        if !ok(e1) || !ok(e2) {
            return Err(Error::InvalidEffect(format!(
                "effects ({e1}, {e2}) are outside the admissible range for {}",
                self.measure()
            )));
        }
        Ok(())
    }

    /// Treatment-arm rates implied by these effects on the given control rates.
    pub fn treatment_rates(&self, control: &ArmRates) -> Result<ArmRates> {
        self.validate()?;
        let m = self.measure();
        let (e1, e2) = self.values();
        let t1 = m.apply(control.p1, e1);
        let t2 = m.apply(control.p2, e2);
        ArmRates::new(t1, t2).map_err(|_| {
            Error::InvalidEffect(format!(
                "effects ({e1}, {e2}) on control rates ({}, {}) imply treatment rates ({t1}, {t2}) outside (0, 1)",
                control.p1, control.p2
            ))
        })
    }

    /// Expresses the same pair of arms in another effect measure.
    pub fn expressed_as(&self, control: &ArmRates, measure: EffectMeasure) -> Result<EffectSpec> {
        if measure == self.measure() {
            return Ok(*self);
        }
        let t = self.treatment_rates(control)?;
        EffectSpec::new(
            measure,
            measure.between(control.p1, t.p1),
            measure.between(control.p2, t.p2),
        )
    }
}

/// Control-arm component rates and the anticipated component effects.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalSpec {
    pub control: ArmRates,
    pub effect: EffectSpec,
}

impl MarginalSpec {
    pub fn new(control: ArmRates, effect: EffectSpec) -> Result<Self> {
        let spec = Self { control, effect };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.control.validate()?;
        self.effect.treatment_rates(&self.control).map(|_| ())
    }

    pub fn treatment(&self) -> Result<ArmRates> {
        self.effect.treatment_rates(&self.control)
    }

    pub fn expressed_as(&self, measure: EffectMeasure) -> Result<MarginalSpec> {
        Ok(MarginalSpec {
            control: self.control,
            effect: self.effect.expressed_as(&self.control, measure)?,
        })
    }
}

/// Correlation between the component indicators in each arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationPair {
    pub rho0: f64,
    pub rho1: f64,
}

impl CorrelationPair {
    pub fn common(rho: f64) -> Self {
        Self { rho0: rho, rho1: rho }
    }
}

/// Joint distribution of the two component indicators in one arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointTable {
    pub p11: f64,
    pub p10: f64,
    pub p01: f64,
    pub p00: f64,
}

impl JointTable {
    pub fn cells(&self) -> [f64; 4] {
        [self.p11, self.p10, self.p01, self.p00]
    }

    pub fn margins(&self) -> (f64, f64) {
        (self.p11 + self.p10, self.p11 + self.p01)
    }

    /// Probability that at least one component event occurs.
    pub fn composite_rate(&self) -> f64 {
        1.0 - self.p00
    }

    /// Pearson correlation of the two indicators.
    pub fn pearson(&self) -> f64 {
        let (p1, p2) = self.margins();
        (self.p11 - p1 * p2) / (p1 * (1.0 - p1) * p2 * (1.0 - p2)).sqrt()
    }
}

fn infeasible(rates: &ArmRates, rho: f64) -> Error {
    let (lower, upper) = rates.correlation_range();
    Error::InfeasibleCorrelation { rho, lower, upper }
}

/// Joint 2x2 table with the given margins and Pearson correlation.
pub fn joint_table(rates: &ArmRates, rho: f64) -> Result<JointTable> {
    rates.validate()?;
    if !rho.is_finite() {
        return Err(infeasible(rates, rho));
    }
    let (p1, p2) = (rates.p1, rates.p2);
    let p11 = p1 * p2 + rho * rates.sd_product();
    let raw = [p11, p1 - p11, p2 - p11, 1.0 - p1 - p2 + p11];
    if raw
        .iter()
        .any(|&c| !(-CELL_TOLERANCE..=1.0 + CELL_TOLERANCE).contains(&c))
    {
        return Err(infeasible(rates, rho));
    }
    let [p11, p10, p01, p00] = raw.map(|c| c.clamp(0.0, 1.0));
    Ok(JointTable { p11, p10, p01, p00 })
}

/// Checks that `rho` admits a joint distribution for these margins.
pub fn check_feasible(rates: &ArmRates, rho: f64) -> Result<()> {
    joint_table(rates, rho).map(|_| ())
}

/// Probability of the composite event, `1 - q1 q2 - rho sqrt(p1 p2 q1 q2)`.
pub fn composite_rate(rates: &ArmRates, rho: f64) -> Result<f64> {
    check_feasible(rates, rho)?;
    Ok(1.0 - rates.q1() * rates.q2() - rho * rates.sd_product())
}

/// Treatment-arm component rates implied by a marginal specification.
pub fn treatment_rates(spec: &MarginalSpec) -> Result<ArmRates> {
    spec.treatment()
}

/// Composite treatment effect in the measure of `spec.effect`, computed from
/// the component margins and the correlations in each arm.
pub fn composite_effect(spec: &MarginalSpec, corr: CorrelationPair) -> Result<f64> {
    let control = spec.control;
    let treatment = spec.treatment()?;
    check_feasible(&control, corr.rho0)?;
    check_feasible(&treatment, corr.rho1)?;
    let (p1, p2, q1, q2) = (control.p1, control.p2, control.q1(), control.q2());
    let (rho0, rho1) = (corr.rho0, corr.rho1);

    let value = match spec.effect {
        EffectSpec::RiskDifference { d1, d2 } => {
            d1 * q2 + d2 * q1 - d1 * d2 + rho0 * control.sd_product()
                - rho1 * ((p1 + d1) * (p2 + d2) * (q1 - d1) * (q2 - d2)).sqrt()
        }
        EffectSpec::RiskRatio { r1, r2 } => {
            let (t1, t2) = (p1 * r1, p2 * r2);
            let numer = t1 + t2 - t1 * t2 - rho1 * (t1 * t2 * (1.0 - t1) * (1.0 - t2)).sqrt();
            let denom = 1.0 - q1 * q2 - rho0 * control.sd_product();
            numer / denom
        }
        EffectSpec::OddsRatio { o1, o2 } => {
            let odds1 = p1 / q1;
            let odds2 = p2 / q2;
            let root0 = (odds1 * odds2).sqrt();
            let root1 = (o1 * o2 * odds1 * odds2).sqrt();
            let numer = ((1.0 + o1 * odds1) * (1.0 + o2 * odds2) - 1.0 - rho1 * root1)
                * (1.0 + rho0 * root0);
            let denom =
                ((1.0 + odds1) * (1.0 + odds2) - 1.0 - rho0 * root0) * (1.0 + rho1 * root1);
            numer / denom
        }
    };
    Ok(value)
}

/// Composite event rates `(control, treatment)` at a common correlation.
pub fn composite_rates(spec: &MarginalSpec, rho: f64) -> Result<(f64, f64)> {
    let treatment = spec.treatment()?;
    Ok((composite_rate(&spec.control, rho)?, composite_rate(&treatment, rho)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn independence_factorizes() {
        let t = joint_table(&ArmRates::new(0.3, 0.4).unwrap(), 0.0).unwrap();
        assert!(close(t.p11, 0.12, 1e-15));
        assert!(close(t.p10, 0.18, 1e-15));
        assert!(close(t.p01, 0.28, 1e-15));
        assert!(close(t.p00, 0.42, 1e-15));
    }

    #[test]
    fn perfect_correlation_equal_margins() {
        let rates = ArmRates::new(0.2, 0.2).unwrap();
        let t = joint_table(&rates, 1.0).unwrap();
        assert!(close(t.p11, 0.2, 1e-15));
        assert_eq!(t.p10, 0.0);
        assert_eq!(t.p01, 0.0);
        assert!(close(t.p00, 0.8, 1e-15));
        assert!(close(composite_rate(&rates, 1.0).unwrap(), 0.2, 1e-15));
    }

    #[test]
    fn joint_table_round_trips_correlation() {
        let rates = ArmRates::new(0.095, 0.137).unwrap();
        let t = joint_table(&rates, 0.3).unwrap();
        let (m1, m2) = t.margins();
        assert!(close(m1, 0.095, 1e-15) && close(m2, 0.137, 1e-15));
        let rho = (t.p11 - 0.095 * 0.137) / (0.095 * 0.905 * 0.137 * 0.863f64).sqrt();
        assert!(close(rho, 0.3, 1e-12));
        assert!(close(composite_rate(&rates, 0.3).unwrap(), 1.0 - t.p00, 1e-15));
    }

    #[test]
    fn composite_rate_at_independence() {
        let r = composite_rate(&ArmRates::new(0.3, 0.4).unwrap(), 0.0).unwrap();
        assert!(close(r, 0.58, 1e-15));
    }

    #[test]
    fn infeasible_correlation_is_rejected() {
        let rates = ArmRates::new(0.1, 0.3).unwrap();
        let (lo, hi) = rates.correlation_range();
        assert!(joint_table(&rates, hi + 1e-6).is_err());
        assert!(joint_table(&rates, lo - 1e-6).is_err());
        assert!(joint_table(&rates, hi).is_ok());
        assert!(joint_table(&rates, lo).is_ok());
        match composite_rate(&rates, 0.9) {
            Err(Error::InfeasibleCorrelation { upper, .. }) => assert!(close(upper, hi, 1e-15)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_rates_rejected() {
        assert!(ArmRates::new(0.0, 0.3).is_err());
        assert!(ArmRates::new(0.3, 1.0).is_err());
    }

    #[test]
    fn case_study_treatment_rates() {
        let spec = MarginalSpec::new(
            ArmRates::new(0.095, 0.137).unwrap(),
            EffectSpec::RiskDifference { d1: -0.022, d2: -0.027 },
        )
        .unwrap();
        let t = treatment_rates(&spec).unwrap();
        assert!(close(t.p1, 0.073, 1e-12) && close(t.p2, 0.110, 1e-12));
    }

    #[test]
    fn unit_ratio_keeps_rates() {
        let control = ArmRates::new(0.2, 0.3).unwrap();
        let t = EffectSpec::RiskRatio { r1: 1.0, r2: 1.0 }.treatment_rates(&control).unwrap();
        assert_eq!(t, control);
    }

    #[test]
    fn odds_ratio_inversion_recovers_effect() {
        let control = ArmRates::new(0.2, 0.3).unwrap();
        let t = EffectSpec::OddsRatio { o1: 0.5, o2: 0.5 }.treatment_rates(&control).unwrap();
        let or1 = (t.p1 / (1.0 - t.p1)) / (0.2 / 0.8);
        let or2 = (t.p2 / (1.0 - t.p2)) / (0.3 / 0.7);
        assert!(close(or1, 0.5, 1e-12) && close(or2, 0.5, 1e-12));
    }

    #[test]
    fn implied_rate_outside_unit_interval() {
        let control = ArmRates::new(0.05, 0.3).unwrap();
        let err = EffectSpec::RiskDifference { d1: -0.06, d2: 0.0 }
            .treatment_rates(&control)
            .unwrap_err();
        assert!(matches!(err, Error::InvalidEffect(_)));
        assert!(EffectSpec::RiskRatio { r1: 0.0, r2: 1.0 }.validate().is_err());
    }

    #[test]
    fn no_component_effect_means_no_composite_effect() {
        let control = ArmRates::new(0.2, 0.3).unwrap();
        for (effect, null) in [
            (EffectSpec::RiskDifference { d1: 0.0, d2: 0.0 }, 0.0),
            (EffectSpec::RiskRatio { r1: 1.0, r2: 1.0 }, 1.0),
            (EffectSpec::OddsRatio { o1: 1.0, o2: 1.0 }, 1.0),
        ] {
            let spec = MarginalSpec::new(control, effect).unwrap();
            let v = composite_effect(&spec, CorrelationPair::common(0.25)).unwrap();
            assert!(close(v, null, 1e-14), "{effect:?} gave {v}");
        }
    }

    #[test]
    fn case_study_risk_difference_matches_per_arm_rates() {
        let spec = MarginalSpec::new(
            ArmRates::new(0.095, 0.137).unwrap(),
            EffectSpec::RiskDifference { d1: -0.022, d2: -0.027 },
        )
        .unwrap();
        let d = composite_effect(&spec, CorrelationPair::common(0.3)).unwrap();
        let c0 = 1.0 - joint_table(&spec.control, 0.3).unwrap().p00;
        let c1 = 1.0 - joint_table(&spec.treatment().unwrap(), 0.3).unwrap().p00;
        assert!(close(d, c1 - c0, 1e-14));
    }

    #[test]
    fn unequal_arm_correlations() {
        let spec = MarginalSpec::new(
            ArmRates::new(0.2, 0.3).unwrap(),
            EffectSpec::OddsRatio { o1: 0.6, o2: 0.8 },
        )
        .unwrap();
        let corr = CorrelationPair { rho0: 0.1, rho1: 0.4 };
        let or = composite_effect(&spec, corr).unwrap();
        let c0 = joint_table(&spec.control, 0.1).unwrap().composite_rate();
        let c1 = joint_table(&spec.treatment().unwrap(), 0.4).unwrap().composite_rate();
        assert!(close(or, EffectMeasure::OddsRatio.between(c0, c1), 1e-12));
    }

    #[test]
    fn measure_parsing() {
        assert_eq!("RR".parse::<EffectMeasure>().unwrap(), EffectMeasure::RiskRatio);
        assert!("hazard".parse::<EffectMeasure>().is_err());
    }
}
