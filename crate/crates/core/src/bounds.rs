//! Feasible correlation ranges and correlation categories.

use serde::{Deserialize, Serialize};

use crate::composite::{ArmRates, EffectSpec, MarginalSpec};
use crate::error::{Error, Result};

/// Range of the common correlation that is admissible in both arms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationBounds {
    pub lower: f64,
    pub upper: f64,
}

impl CorrelationBounds {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, rho: f64) -> bool {
        rho >= self.lower && rho <= self.upper
    }

    fn intersect(self, other: CorrelationBounds) -> CorrelationBounds {
        CorrelationBounds {
            lower: self.lower.max(other.lower),
            upper: self.upper.min(other.upper),
        }
    }
}

/// Feasible range of a correlation common to both arms: the intersection of
/// the per-arm ranges for the control and implied treatment rates.
pub fn bounds(spec: &MarginalSpec) -> Result<CorrelationBounds> {
    let treatment = spec.treatment()?;
    let (l0, u0) = spec.control.correlation_range();
    let (l1, u1) = treatment.correlation_range();
    Ok(CorrelationBounds {
        lower: l0.max(l1),
        upper: u0.min(u1),
    })
}

/// Prior belief about the strength of the correlation between components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationCategory {
    Weak,
    Moderate,
    Strong,
    NoPrior,
}

impl CorrelationCategory {
    pub const ALL: [CorrelationCategory; 4] = [
        CorrelationCategory::Weak,
        CorrelationCategory::Moderate,
        CorrelationCategory::Strong,
        CorrelationCategory::NoPrior,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CorrelationCategory::Weak => "weak",
            CorrelationCategory::Moderate => "moderate",
            CorrelationCategory::Strong => "strong",
            CorrelationCategory::NoPrior => "no_prior",
        }
    }
}

impl std::str::FromStr for CorrelationCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "weak" => Ok(CorrelationCategory::Weak),
            "moderate" => Ok(CorrelationCategory::Moderate),
            "strong" => Ok(CorrelationCategory::Strong),
            "no_prior" | "none" | "unknown" => Ok(CorrelationCategory::NoPrior),
            other => Err(Error::InvalidArgument(format!(
                "unknown correlation category '{other}'"
            ))),
        }
    }
}

/// Interval of correlations `[low, high]` attached to a category. Weak and
/// moderate intervals are half-open on the right; the closing endpoint is
/// still the value used for sizing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoInterval {
    pub low: f64,
    pub high: f64,
}

impl RhoInterval {
    pub fn contains(&self, rho: f64) -> bool {
        rho >= self.low && rho <= self.high
    }
}

/// Splits the feasible range into thirds: weak, moderate and strong.
pub fn category_interval(b: CorrelationBounds, c: CorrelationCategory) -> RhoInterval {
    let third = b.width() / 3.0;
    let at = |k: f64| b.lower + k * third;
    match c {
        CorrelationCategory::Weak => RhoInterval { low: b.lower, high: at(1.0) },
        CorrelationCategory::Moderate => RhoInterval { low: at(1.0), high: at(2.0) },
        CorrelationCategory::Strong => RhoInterval { low: at(2.0), high: b.upper },
        CorrelationCategory::NoPrior => RhoInterval { low: b.lower, high: b.upper },
    }
}

/// Correlation at which a trial is sized for a category: the upper end of its
/// interval, where the required sample size is largest.
pub fn design_rho(b: CorrelationBounds, c: CorrelationCategory) -> f64 {
    category_interval(b, c).high
}

/// Plausible values `[low, high]` for one control-arm event rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateInterval {
    pub low: f64,
    pub high: f64,
}

impl RateInterval {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(low > 0.0 && high < 1.0 && low <= high) {
            return Err(Error::InvalidRate(format!(
                "rate interval [{low}, {high}] must satisfy 0 < low <= high < 1"
            )));
        }
        Ok(Self { low, high })
    }

    pub fn singleton(p: f64) -> Result<Self> {
        Self::new(p, p)
    }

    pub fn contains(&self, p: f64) -> bool {
        p >= self.low && p <= self.high
    }

    /// Point a fraction `t` of the way from `low` to `high`.
    pub fn at(&self, t: f64) -> f64 {
        if self.low == self.high {
            self.low
        } else {
            self.low + t * (self.high - self.low)
        }
    }
}

/// Uncertainty rectangle for the two control-arm event rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateIntervals {
    pub i1: RateInterval,
    pub i2: RateInterval,
}

impl RateIntervals {
    pub fn new(i1: RateInterval, i2: RateInterval) -> Result<Self> {
        let out = Self { i1, i2 };
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        RateInterval::new(self.i1.low, self.i1.high)?;
        RateInterval::new(self.i2.low, self.i2.high)?;
        Ok(())
    }

    pub fn low_corner(&self) -> ArmRates {
        ArmRates { p1: self.i1.low, p2: self.i2.low }
    }

    pub fn high_corner(&self) -> ArmRates {
        ArmRates { p1: self.i1.high, p2: self.i2.high }
    }

    pub fn contains(&self, rates: &ArmRates) -> bool {
        self.i1.contains(rates.p1) && self.i2.contains(rates.p2)
    }

    /// Rate pairs visited by a robust search.
    pub fn search_points(&self, search: RateSearch) -> Result<Vec<ArmRates>> {
        let points = match search {
            RateSearch::Comonotone { points } => {
                if points < 2 {
                    return Err(Error::InvalidArgument(
                        "comonotone search needs at least 2 points".into(),
                    ));
                }
                (0..points)
                    .map(|i| {
                        let t = i as f64 / (points - 1) as f64;
                        ArmRates { p1: self.i1.at(t), p2: self.i2.at(t) }
                    })
                    .collect()
            }
            RateSearch::Rectangle { grid } => {
                if grid < 2 {
                    return Err(Error::InvalidArgument(
                        "rectangle search needs a grid of at least 2x2".into(),
                    ));
                }
                let step = |i: usize| i as f64 / (grid - 1) as f64;
                let mut pts = Vec::with_capacity(grid * grid);
                for i in 0..grid {
                    for j in 0..grid {
                        pts.push(ArmRates { p1: self.i1.at(step(i)), p2: self.i2.at(step(j)) });
                    }
                }
                pts
            }
        };
        Ok(points)
    }
}

/// Which rate pairs of the uncertainty rectangle a robust bound must hold for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateSearch {
    /// Rates moving together from the lower corner to the upper corner.
    Comonotone { points: usize },
    /// Every rate pair of the rectangle, on a `grid` x `grid` lattice that
    /// includes all four corners.
    Rectangle { grid: usize },
}

impl Default for RateSearch {
    fn default() -> Self {
        RateSearch::Comonotone { points: 33 }
    }
}

/// Correlation range admissible for every rate pair visited in the
/// uncertainty set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustBounds {
    pub lower: f64,
    pub upper: f64,
}

impl From<RobustBounds> for CorrelationBounds {
    fn from(r: RobustBounds) -> Self {
        CorrelationBounds { lower: r.lower, upper: r.upper }
    }
}

/// Robust bounds with the default (comonotone) search.
pub fn robust_bounds(intervals: &RateIntervals, effect: &EffectSpec) -> Result<RobustBounds> {
    robust_bounds_with(intervals, effect, RateSearch::default())
}

pub fn robust_bounds_with(
    intervals: &RateIntervals,
    effect: &EffectSpec,
    search: RateSearch,
) -> Result<RobustBounds> {
    intervals.validate()?;
    let mut acc: Option<CorrelationBounds> = None;
    for control in intervals.search_points(search)? {
        let b = bounds(&MarginalSpec { control, effect: *effect })?;
        acc = Some(match acc {
            None => b,
            Some(a) => a.intersect(b),
        });
    }
    let b = acc.expect("search visits at least one point");
    if b.lower >= b.upper {
        return Err(Error::InvalidArgument(format!(
            "rate intervals admit no common correlation range ({}, {})",
            b.lower, b.upper
        )));
    }
    Ok(RobustBounds { lower: b.lower, upper: b.upper })
}
