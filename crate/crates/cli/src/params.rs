//! Flat request parameters shared by the config file, the command line and
//! the HTTP bodies.
//!
//! A config file is a TOML document with the keys below at top level, plus
//! optional `[simulation]` and `[output]` tables. Every key is optional;
//! each command checks the ones it needs and reports the first missing one.

use cbe_core::bounds::{CorrelationCategory, RateInterval, RateIntervals, RateSearch};
use cbe_core::composite::{ArmRates, EffectMeasure, EffectSpec, MarginalSpec};
use cbe_core::simulate::GridConfig;
use cbe_core::sizing::{DesignSpec, VarianceEstimator};
use cbe_core::strategy::StrategyOptions;
use serde::{Deserialize, Serialize};

use crate::error::AppError;

pub const DEFAULT_ALPHA: f64 = 0.025;
pub const DEFAULT_POWER: f64 = 0.80;
pub const DEFAULT_CURVE_POINTS: usize = 50;
pub const MAX_CURVE_POINTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SearchKind {
    Comonotone,
    Rectangle,
}

/// Output destinations; accepted in config files and on the command line only.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub out: Option<String>,
    pub csv: Option<String>,
    pub raw: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<EffectMeasure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance: Option<VarianceEstimator>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub p1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub or1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub or2: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub p1_low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p1_high: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p2_low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p2_high: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub category: Option<CorrelationCategory>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_total: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchKind>,
    /// Points along the diagonal, or lattice size per side, of the robust
    /// bound search.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_sweep: Option<usize>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<GridConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Execution detail; never echoed so reports do not depend on it.
    #[serde(skip_serializing)]
    pub workers: Option<usize>,

    #[serde(skip_serializing)]
    pub output: Option<OutputConfig>,
}

macro_rules! overlay_fields {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T, AppError> {
    v.ok_or_else(|| AppError::MissingField(name.to_string()))
}

impl Params {
    pub fn from_toml(text: &str) -> Result<Self, AppError> {
        toml::from_str(text).map_err(|e| AppError::from_schema_message(e.message()))
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, AppError> {
        if bytes.iter().all(u8::is_ascii_whitespace) {
            return Ok(Self::default());
        }
        serde_json::from_slice(bytes).map_err(|e| AppError::from_schema_message(&e.to_string()))
    }

    /// Fields set in `top` replace those of `self`.
    pub fn overlay(mut self, top: Params) -> Params {
        overlay_fields!(self, top;
            alpha, power, measure, variance, p1, p2, d1, d2, r1, r2, or1, or2,
            p1_low, p1_high, p2_low, p2_high, rho, rho0, rho1, category, n_total,
            n_points, search, search_points, power_sweep, reps, seed, workers);
        if top.simulation.is_some() {
            self.simulation = top.simulation;
        }
        match (&mut self.output, top.output) {
            (Some(base), Some(o)) => {
                if o.out.is_some() {
                    base.out = o.out;
                }
                if o.csv.is_some() {
                    base.csv = o.csv;
                }
                if o.raw.is_some() {
                    base.raw = o.raw;
                }
            }
            (None, Some(o)) => self.output = Some(o),
            _ => {}
        }
        self
    }

    pub fn design(&self) -> Result<DesignSpec, AppError> {
        Ok(DesignSpec::new(
            self.alpha.unwrap_or(DEFAULT_ALPHA),
            self.power.unwrap_or(DEFAULT_POWER),
            self.measure.unwrap_or(EffectMeasure::RiskDifference),
            self.variance.unwrap_or(VarianceEstimator::Pooled),
        )?)
    }

    pub fn effect(&self) -> Result<EffectSpec, AppError> {
        let pairs = [
            (EffectMeasure::RiskDifference, self.d1, self.d2, "d1", "d2"),
            (EffectMeasure::RiskRatio, self.r1, self.r2, "r1", "r2"),
            (EffectMeasure::OddsRatio, self.or1, self.or2, "or1", "or2"),
        ];
        let given: Vec<_> = pairs.iter().filter(|p| p.1.is_some() || p.2.is_some()).collect();
        match given.as_slice() {
            [] => Err(AppError::MissingField("d1".into())),
            [(m, e1, e2, n1, n2)] => Ok(EffectSpec::new(*m, need(*e1, n1)?, need(*e2, n2)?)?),
            _ => Err(AppError::Schema {
                code: "schema.conflict",
                message: "give component effects in exactly one measure (d1/d2, r1/r2 or or1/or2)".into(),
            }),
        }
    }

    pub fn has_point_rates(&self) -> bool {
        self.p1.is_some() || self.p2.is_some()
    }

    pub fn control(&self) -> Result<ArmRates, AppError> {
        Ok(ArmRates::new(need(self.p1, "p1")?, need(self.p2, "p2")?)?)
    }

    pub fn spec(&self) -> Result<MarginalSpec, AppError> {
        let control = self.control()?;
        Ok(MarginalSpec::new(control, self.effect()?)?)
    }

    /// Rate intervals, when any interval endpoint is given.
    pub fn intervals(&self) -> Result<Option<RateIntervals>, AppError> {
        let ends = [self.p1_low, self.p1_high, self.p2_low, self.p2_high];
        if ends.iter().all(Option::is_none) {
            return Ok(None);
        }
        let i1 = RateInterval::new(need(self.p1_low, "p1_low")?, need(self.p1_high, "p1_high")?)?;
        let i2 = RateInterval::new(need(self.p2_low, "p2_low")?, need(self.p2_high, "p2_high")?)?;
        Ok(Some(RateIntervals::new(i1, i2)?))
    }

    pub fn rate_search(&self) -> RateSearch {
        match (self.search.unwrap_or(SearchKind::Comonotone), self.search_points) {
            (SearchKind::Comonotone, None) => RateSearch::default(),
            (SearchKind::Comonotone, Some(points)) => RateSearch::Comonotone { points },
            (SearchKind::Rectangle, grid) => RateSearch::Rectangle { grid: grid.unwrap_or(33) },
        }
    }

    pub fn strategy_options(&self) -> StrategyOptions {
        let base = StrategyOptions::default();
        StrategyOptions {
            search: self.rate_search(),
            power_sweep: self.power_sweep.unwrap_or(base.power_sweep),
        }
    }

    pub fn rho(&self) -> Result<f64, AppError> {
        need(self.rho, "rho")
    }

    pub fn n_points(&self) -> Result<usize, AppError> {
        let n = self.n_points.unwrap_or(DEFAULT_CURVE_POINTS);
        if !(2..=MAX_CURVE_POINTS).contains(&n) {
            return Err(AppError::Schema {
                code: "schema.invalid",
                message: format!("n_points must lie in [2, {MAX_CURVE_POINTS}], got {n}"),
            });
        }
        Ok(n)
    }

    /// Simulation grid with the top-level overrides applied.
    pub fn grid(&self) -> GridConfig {
        let mut g = self.simulation.clone().unwrap_or_default();
        if let Some(a) = self.alpha {
            g.alpha = a;
        }
        if let Some(p) = self.power {
            g.power = p;
        }
        if let Some(r) = self.reps {
            g.reps = r;
        }
        if let Some(s) = self.seed {
            g.seed = s;
        }
        g
    }
}
