//! Monte Carlo check of the sizing formulas.
//!
//! Each simulated arm draws the four joint outcomes of the two components
//! from a multinomial distribution over the joint table. The composite
//! proportions of the two arms feed one of six one-sided test statistics.
//!
//! Random numbers come from ChaCha8 (`rand_chacha` 0.9). Every job (one
//! scenario, one design, power or type I error) gets a 256-bit key: the
//! SHA-256 digest of the user seed and the job coordinates. Replication `r`
//! uses stream `r` of the generator keyed that way, so any split of the
//! replications across threads gives the same counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::{bounds, CorrelationBounds, CorrelationCategory};
use crate::composite::{joint_table, ArmRates, EffectMeasure, EffectSpec, JointTable, MarginalSpec};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::sizing::{n_composite, DesignSpec, VarianceEstimator};

/// Version tag mixed into every job key; bump it whenever the sampling
/// scheme changes so stale golden outputs fail loudly.
pub const RNG_SCHEME: &str = "cbe-chacha8-sha256-v1";

const CHUNK: u64 = 512;

/// Joint outcome counts of one simulated arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ArmOutcome {
    pub c11: u64,
    pub c10: u64,
    pub c01: u64,
    pub c00: u64,
}

impl ArmOutcome {
    pub fn n(&self) -> u64 {
        self.c11 + self.c10 + self.c01 + self.c00
    }

    /// Subjects with at least one component event.
    pub fn composite_successes(&self) -> u64 {
        self.c11 + self.c10 + self.c01
    }

    pub fn composite_rate(&self) -> f64 {
        self.composite_successes() as f64 / self.n() as f64
    }
}

fn binomial<R: Rng + ?Sized>(rng: &mut R, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    match Binomial::new(n, p) {
        Ok(b) => b.sample(rng),
        Err(_) => 0,
    }
}

fn conditional(cell: f64, rest: f64) -> f64 {
    if rest <= 0.0 {
        0.0
    } else {
        (cell / rest).clamp(0.0, 1.0)
    }
}

/// Multinomial draw over the joint table cells by successive conditional
/// binomials.
pub fn sample_table<R: Rng + ?Sized>(table: &JointTable, n: u64, rng: &mut R) -> ArmOutcome {
    let c11 = binomial(rng, n, table.p11);
    let left = 1.0 - table.p11;
    let c10 = binomial(rng, n - c11, conditional(table.p10, left));
    let left = left - table.p10;
    let c01 = binomial(rng, n - c11 - c10, conditional(table.p01, left));
    ArmOutcome { c11, c10, c01, c00: n - c11 - c10 - c01 }
}

pub fn sample_arm<R: Rng + ?Sized>(rates: &ArmRates, rho: f64, n_per_group: u64, rng: &mut R) -> Result<ArmOutcome> {
    if n_per_group == 0 {
        return Err(Error::InvalidArgument("n_per_group must be at least 1".into()));
    }
    Ok(sample_table(&joint_table(rates, rho)?, n_per_group, rng))
}

/// One of the six decision statistics: the measure fixes the statistic
/// (T for the risk difference, Z for the log risk ratio, W for the log odds
/// ratio) and the variance fixes its denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TestStatistic {
    pub measure: EffectMeasure,
    pub variance: VarianceEstimator,
}

impl TestStatistic {
    pub fn new(measure: EffectMeasure, variance: VarianceEstimator) -> Self {
        Self { measure, variance }
    }

    pub fn all() -> Vec<TestStatistic> {
        EffectMeasure::ALL
            .iter()
            .flat_map(|&m| VarianceEstimator::ALL.iter().map(move |&v| Self::new(m, v)))
            .collect()
    }

    pub fn symbol(&self) -> &'static str {
        match self.measure {
            EffectMeasure::RiskDifference => "T",
            EffectMeasure::RiskRatio => "Z",
            EffectMeasure::OddsRatio => "W",
        }
    }

    /// Label such as `Z_pooled`.
    pub fn name(&self) -> String {
        format!("{}_{}", self.symbol(), self.variance.name())
    }

    /// Value of the statistic; negative values favour the treatment.
    ///
    /// T uses the raw proportions. If its variance estimate is zero the value
    /// is infinite with the sign of the numerator, or zero when the
    /// proportions agree. Z and W add 0.5 to every composite success and
    /// failure count of both arms when any of those counts is zero.
    pub fn value(&self, control: &ArmOutcome, treatment: &ArmOutcome) -> Result<f64> {
        let n0 = control.n();
        let n1 = treatment.n();
        if n0 == 0 || n1 == 0 {
            return Err(Error::InvalidArgument("both arms must be nonempty".into()));
        }
        if n0 != n1 {
            return Err(Error::InvalidArgument("arms must have equal size".into()));
        }
        let x0 = control.composite_successes() as f64;
        let x1 = treatment.composite_successes() as f64;
        let mut n = n0 as f64;

        if self.measure == EffectMeasure::RiskDifference {
            let (p0, p1) = (x0 / n, x1 / n);
            let diff = p1 - p0;
            let var = match self.variance {
                VarianceEstimator::Pooled => {
                    let pb = (p0 + p1) / 2.0;
                    2.0 * pb * (1.0 - pb) / n
                }
                VarianceEstimator::Unpooled => (p0 * (1.0 - p0) + p1 * (1.0 - p1)) / n,
            };
            return Ok(if var > 0.0 {
                diff / var.sqrt()
            } else if diff == 0.0 {
                0.0
            } else {
                diff.signum() * f64::INFINITY
            });
        }

        let (mut s0, mut s1) = (x0, x1);
        if [x0, n - x0, x1, n - x1].contains(&0.0) {
            s0 += 0.5;
            s1 += 0.5;
            n += 1.0;
        }
        let (p0, p1) = (s0 / n, s1 / n);
        let (q0, q1) = (1.0 - p0, 1.0 - p1);
        let pb = (p0 + p1) / 2.0;
        let qb = 1.0 - pb;
        let (log_effect, var) = match (self.measure, self.variance) {
            (EffectMeasure::RiskRatio, VarianceEstimator::Pooled) => ((p1 / p0).ln(), 2.0 * qb / (n * pb)),
            (EffectMeasure::RiskRatio, VarianceEstimator::Unpooled) => {
                ((p1 / p0).ln(), (q1 / p1 + q0 / p0) / n)
            }
            (_, VarianceEstimator::Pooled) => (((p1 / q1) / (p0 / q0)).ln(), 2.0 / (n * pb * qb)),
            (_, VarianceEstimator::Unpooled) => {
                (((p1 / q1) / (p0 / q0)).ln(), (1.0 / (p0 * q0) + 1.0 / (p1 * q1)) / n)
            }
        };
        Ok(log_effect / var.sqrt())
    }

    /// One-sided decision: reject when the statistic falls below `-z_alpha`.
    pub fn rejects(&self, control: &ArmOutcome, treatment: &ArmOutcome, z_alpha: f64) -> Result<bool> {
        Ok(self.value(control, treatment)? < -z_alpha)
    }
}

impl std::fmt::Display for TestStatistic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name())
    }
}

/// A sized trial together with the truth it is simulated under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub control: ArmRates,
    pub effect: EffectSpec,
    pub rho_true: f64,
    pub design_rho: f64,
    pub design: DesignSpec,
    pub n_total: u64,
}

impl Scenario {
    /// Sizes the trial at `design_rho` with the formula selected by `design`.
    pub fn sized(spec: &MarginalSpec, rho_true: f64, design_rho: f64, design: &DesignSpec) -> Result<Self> {
        let size = n_composite(spec, design_rho, design)?;
        let s = Self {
            control: spec.control,
            effect: spec.effect,
            rho_true,
            design_rho,
            design: *design,
            n_total: size.n_total,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.design.validate()?;
        if self.n_total < 4 {
            return Err(Error::InvalidArgument(format!(
                "n_total must be at least 4, got {}",
                self.n_total
            )));
        }
        let spec = MarginalSpec::new(self.control, self.effect)?;
        let b = bounds(&spec)?;
        for rho in [self.rho_true, self.design_rho] {
            if !b.contains(rho) {
                return Err(Error::InfeasibleCorrelation { rho, lower: b.lower, upper: b.upper });
            }
        }
        Ok(())
    }

    /// Subjects per arm; an odd total is rounded up to equal arms.
    pub fn n_per_group(&self) -> u64 {
        self.n_total.div_ceil(2)
    }

    /// The decision statistic paired with the sizing formula.
    pub fn statistic(&self) -> TestStatistic {
        TestStatistic::new(self.design.measure, self.design.variance)
    }

    fn tables(&self, under_null: bool) -> Result<(JointTable, JointTable)> {
        let control = joint_table(&self.control, self.rho_true)?;
        let treatment = if under_null {
            control
        } else {
            let spec = MarginalSpec::new(self.control, self.effect)?;
            joint_table(&spec.treatment()?, self.rho_true)?
        };
        Ok((control, treatment))
    }

    fn key(&self, seed: u64, under_null: bool) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(RNG_SCHEME.as_bytes());
        h.update(seed.to_le_bytes());
        let (e1, e2) = self.effect.values();
        for x in [self.control.p1, self.control.p2, e1, e2, self.rho_true, self.design_rho] {
            h.update(x.to_bits().to_le_bytes());
        }
        h.update(self.effect.measure().short_name().as_bytes());
        h.update(self.design.measure.short_name().as_bytes());
        h.update(self.design.variance.name().as_bytes());
        h.update(self.n_total.to_le_bytes());
        h.update([under_null as u8]);
        h.finalize().into()
    }
}

/// Rejection count of one statistic over a batch of simulated trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub statistic: TestStatistic,
    pub rejections: u64,
    pub reps: u64,
    pub empirical_rate: f64,
    pub seed: u64,
}

/// Simulates `reps` trials of the scenario, under the alternative or (with
/// `under_null`) with unit effects, and counts rejections of every listed
/// statistic on the same simulated data.
pub fn empirical_rates(
    s: &Scenario,
    reps: u64,
    seed: u64,
    under_null: bool,
    stats: &[TestStatistic],
    exec: Exec,
) -> Result<Vec<SimulationSummary>> {
    if reps == 0 {
        return Err(Error::InvalidArgument("reps must be at least 1".into()));
    }
    s.validate()?;
    let (t0, t1) = s.tables(under_null)?;
    let key = s.key(seed, under_null);
    let n = s.n_per_group();
    let z = s.design.z_alpha();

    let chunks = reps.div_ceil(CHUNK) as usize;
    let counts = exec.map(chunks, |c| {
        let start = c as u64 * CHUNK;
        let end = (start + CHUNK).min(reps);
        let mut hits = vec![0u64; stats.len()];
        for r in start..end {
            let mut rng = ChaCha8Rng::from_seed(key);
            rng.set_stream(r);
            let a0 = sample_table(&t0, n, &mut rng);
            let a1 = sample_table(&t1, n, &mut rng);
            for (h, st) in hits.iter_mut().zip(stats) {
                if st.rejects(&a0, &a1, z)? {
                    *h += 1;
                }
            }
        }
        Ok::<_, Error>(hits)
    });

    let mut total = vec![0u64; stats.len()];
    for chunk in counts {
        for (t, h) in total.iter_mut().zip(chunk?) {
            *t += h;
        }
    }
    Ok(stats
        .iter()
        .zip(total)
        .map(|(&statistic, rejections)| SimulationSummary {
            statistic,
            rejections,
            reps,
            empirical_rate: rejections as f64 / reps as f64,
            seed,
        })
        .collect())
}

/// Empirical power (or type I error with `under_null`) of the statistic
/// paired with the scenario's sizing formula.
pub fn empirical_rate(s: &Scenario, reps: u64, seed: u64, under_null: bool, exec: Exec) -> Result<SimulationSummary> {
    let mut v = empirical_rates(s, reps, seed, under_null, &[s.statistic()], exec)?;
    Ok(v.remove(0))
}

/// How the design correlation of a simulated trial is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignRule {
    /// `B_U / 3`
    Weak,
    /// `2 B_U / 3`
    Moderate,
    /// `B_U`
    Strong,
    /// The true correlation.
    TrueValue,
}

impl DesignRule {
    pub const ALL: [DesignRule; 4] = [DesignRule::Weak, DesignRule::Moderate, DesignRule::Strong, DesignRule::TrueValue];

    pub fn name(self) -> &'static str {
        match self {
            DesignRule::Weak => "weak",
            DesignRule::Moderate => "moderate",
            DesignRule::Strong => "strong",
            DesignRule::TrueValue => "true_value",
        }
    }

    /// Design correlation for a scenario whose correlations are nonnegative.
    pub fn design_rho(self, b: CorrelationBounds, rho_true: f64) -> f64 {
        match self {
            DesignRule::Weak => b.upper / 3.0,
            DesignRule::Moderate => 2.0 * b.upper / 3.0,
            DesignRule::Strong => b.upper,
            DesignRule::TrueValue => rho_true,
        }
    }

    pub fn category(self) -> Option<CorrelationCategory> {
        match self {
            DesignRule::Weak => Some(CorrelationCategory::Weak),
            DesignRule::Moderate => Some(CorrelationCategory::Moderate),
            DesignRule::Strong => Some(CorrelationCategory::Strong),
            DesignRule::TrueValue => None,
        }
    }
}

impl std::str::FromStr for DesignRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "weak" => Ok(DesignRule::Weak),
            "moderate" => Ok(DesignRule::Moderate),
            "strong" => Ok(DesignRule::Strong),
            "true_value" | "true" => Ok(DesignRule::TrueValue),
            other => Err(Error::InvalidArgument(format!("unknown design rule '{other}'"))),
        }
    }
}

/// Category of a nonnegative correlation when `[0, B_U]` is cut into thirds.
pub fn nonnegative_category(b: CorrelationBounds, rho: f64) -> CorrelationCategory {
    if rho <= b.upper / 3.0 {
        CorrelationCategory::Weak
    } else if rho <= 2.0 * b.upper / 3.0 {
        CorrelationCategory::Moderate
    } else {
        CorrelationCategory::Strong
    }
}

/// Relation between the design correlation and the true one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Misspecification {
    /// Sized at the true correlation.
    None,
    /// Design and truth in the same category.
    WithinCategory,
    /// Design and truth in different categories.
    OutsideCategory,
}

/// Scenario grid for the simulation study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    /// Effects on the first component, in `effect_measure`.
    pub effect1: Vec<f64>,
    pub effect2: Vec<f64>,
    pub effect_measure: EffectMeasure,
    pub rho_true: Vec<f64>,
    pub rules: Vec<DesignRule>,
    /// Sizing formulas; each is tested with its own statistic.
    pub measures: Vec<EffectMeasure>,
    pub variances: Vec<VarianceEstimator>,
    /// Forces the variance of the decision statistic instead of pairing it
    /// with the sizing variance.
    pub statistic_variance: Option<VarianceEstimator>,
    pub alpha: f64,
    pub power: f64,
    pub reps: u64,
    pub seed: u64,
    /// Keep only control rates with `p1 < p2`.
    pub ordered_rates: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            p1: vec![0.01, 0.05, 0.10],
            p2: vec![0.01, 0.05, 0.10, 0.15, 0.20],
            effect1: vec![0.6, 0.7, 0.8],
            effect2: vec![0.6, 0.7, 0.8],
            effect_measure: EffectMeasure::RiskRatio,
            rho_true: (0..=10).map(|k| k as f64 / 10.0).collect(),
            rules: DesignRule::ALL.to_vec(),
            measures: EffectMeasure::ALL.to_vec(),
            variances: VarianceEstimator::ALL.to_vec(),
            statistic_variance: None,
            alpha: 0.025,
            power: 0.80,
            reps: 10_000,
            seed: 1,
            ordered_rates: true,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("p1", &self.p1),
            ("p2", &self.p2),
            ("effect1", &self.effect1),
            ("effect2", &self.effect2),
            ("rho_true", &self.rho_true),
        ] {
            if v.is_empty() {
                return Err(Error::InvalidArgument(format!("grid list '{name}' is empty")));
            }
        }
        if self.rules.is_empty() || self.measures.is_empty() || self.variances.is_empty() {
            return Err(Error::InvalidArgument("rules, measures and variances must be nonempty".into()));
        }
        if self.reps == 0 {
            return Err(Error::InvalidArgument("reps must be at least 1".into()));
        }
        DesignSpec::new(self.alpha, self.power, EffectMeasure::RiskDifference, VarianceEstimator::Pooled)?;
        Ok(())
    }

    /// Feasible `(control, effect, rho_true)` cells in grid order, and the
    /// skipped ones with the reason.
    pub fn cells(&self) -> Result<(Vec<Cell>, Vec<SkippedCell>)> {
        self.validate()?;
        let mut cells = Vec::new();
        let mut skipped = Vec::new();
        for &p1 in &self.p1 {
            for &p2 in &self.p2 {
                if self.ordered_rates && p1 >= p2 {
                    continue;
                }
                for &e1 in &self.effect1 {
                    for &e2 in &self.effect2 {
                        let spec = ArmRates::new(p1, p2)
                            .and_then(|c| MarginalSpec::new(c, EffectSpec::new(self.effect_measure, e1, e2)?));
                        let (spec, b) = match spec.and_then(|s| Ok((s, bounds(&s)?))) {
                            Ok(v) => v,
                            Err(e) => {
                                for &rho in &self.rho_true {
                                    skipped.push(SkippedCell { p1, p2, effect1: e1, effect2: e2, rho_true: rho, reason: e.to_string() });
                                }
                                continue;
                            }
                        };
                        for &rho in &self.rho_true {
                            if rho > b.lower && rho < b.upper {
                                cells.push(Cell { spec, bounds: b, rho_true: rho });
                            } else {
                                skipped.push(SkippedCell {
                                    p1,
                                    p2,
                                    effect1: e1,
                                    effect2: e2,
                                    rho_true: rho,
                                    reason: format!("rho_true outside ({:.6}, {:.6})", b.lower, b.upper),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok((cells, skipped))
    }
}

/// A feasible scenario of the grid before sizing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub spec: MarginalSpec,
    pub bounds: CorrelationBounds,
    pub rho_true: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedCell {
    pub p1: f64,
    pub p2: f64,
    pub effect1: f64,
    pub effect2: f64,
    pub rho_true: f64,
    pub reason: String,
}

/// One simulated design: a grid cell sized by one rule and formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub cell: Cell,
    pub rule: DesignRule,
    pub rho_design: f64,
    pub measure: EffectMeasure,
    pub variance: VarianceEstimator,
    pub statistic: TestStatistic,
    pub n_total: u64,
    pub reps: u64,
    pub seed: u64,
    pub power_rejections: u64,
    pub null_rejections: u64,
    pub empirical_power: f64,
    pub empirical_type1: f64,
}

pub const CSV_HEADER: [&str; 14] = [
    "p1",
    "p2",
    "effect1",
    "effect2",
    "measure",
    "rho_true",
    "rho_design",
    "variance",
    "statistic",
    "n_total",
    "reps",
    "seed",
    "empirical_power",
    "empirical_type1",
];

impl GridRow {
    pub fn misspecification(&self) -> Misspecification {
        match self.rule.category() {
            None => Misspecification::None,
            Some(c) if c == nonnegative_category(self.cell.bounds, self.cell.rho_true) => {
                Misspecification::WithinCategory
            }
            Some(_) => Misspecification::OutsideCategory,
        }
    }

    /// Fields in [`CSV_HEADER`] order.
    pub fn csv_record(&self) -> [String; 14] {
        let c = self.cell.spec.control;
        let (e1, e2) = self.cell.spec.effect.values();
        [
            c.p1.to_string(),
            c.p2.to_string(),
            e1.to_string(),
            e2.to_string(),
            self.measure.short_name().to_string(),
            self.cell.rho_true.to_string(),
            format!("{:.10}", self.rho_design),
            self.variance.name().to_string(),
            self.statistic.name(),
            self.n_total.to_string(),
            self.reps.to_string(),
            self.seed.to_string(),
            self.empirical_power.to_string(),
            self.empirical_type1.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridOutput {
    pub rows: Vec<GridRow>,
    pub skipped: Vec<SkippedCell>,
}

struct Job {
    cell: Cell,
    rule: DesignRule,
    design: DesignSpec,
    statistic: TestStatistic,
}

/// Sizes every feasible grid cell under every rule and formula, then
/// estimates empirical power and type I error by simulation. Rows follow the
/// grid order, so output is independent of `exec`.
pub fn run_grid(config: &GridConfig, exec: Exec) -> Result<GridOutput> {
    let (cells, skipped) = config.cells()?;
    let mut jobs = Vec::new();
    for cell in &cells {
        for &rule in &config.rules {
            for &measure in &config.measures {
                for &variance in &config.variances {
                    let design = DesignSpec::new(config.alpha, config.power, measure, variance)?;
                    let statistic = TestStatistic::new(measure, config.statistic_variance.unwrap_or(variance));
                    jobs.push(Job { cell: *cell, rule, design, statistic });
                }
            }
        }
    }
    let inner = if exec.is_parallel() { Exec::Auto } else { Exec::Sequential };
    let run = |i: usize| -> Result<GridRow> {
        let job = &jobs[i];
        let rho_design = job.rule.design_rho(job.cell.bounds, job.cell.rho_true);
        let s = Scenario::sized(&job.cell.spec, job.cell.rho_true, rho_design, &job.design)?;
        let stats = [job.statistic];
        let power = empirical_rates(&s, config.reps, config.seed, false, &stats, inner)?.remove(0);
        let null = empirical_rates(&s, config.reps, config.seed, true, &stats, inner)?.remove(0);
        Ok(GridRow {
            cell: job.cell,
            rule: job.rule,
            rho_design,
            measure: job.design.measure,
            variance: job.design.variance,
            statistic: job.statistic,
            n_total: s.n_total,
            reps: config.reps,
            seed: config.seed,
            power_rejections: power.rejections,
            null_rejections: null.rejections,
            empirical_power: power.empirical_rate,
            empirical_type1: null.empirical_rate,
        })
    };
    let rows = exec.map(jobs.len(), run).into_iter().collect::<Result<Vec<_>>>()?;
    Ok(GridOutput { rows, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(x: u64, n: u64) -> ArmOutcome {
        ArmOutcome { c11: 0, c10: x, c01: 0, c00: n - x }
    }

    #[test]
    fn identical_arms_accept() {
        let a = outcome(30, 100);
        for st in TestStatistic::all() {
            assert_eq!(st.value(&a, &a).unwrap(), 0.0, "{st}");
            assert!(!st.rejects(&a, &a, 1.96).unwrap());
        }
    }

    #[test]
    fn t_pooled_hand_value() {
        let st = TestStatistic::new(EffectMeasure::RiskDifference, VarianceEstimator::Pooled);
        let v = st.value(&outcome(30, 100), &outcome(15, 100)).unwrap();
        let expect = -0.15 / (2.0f64 * 0.225 * 0.775 / 100.0).sqrt();
        assert!((v - expect).abs() < 1e-12);
        assert!(st.rejects(&outcome(30, 100), &outcome(15, 100), 1.959964).unwrap());
    }

    #[test]
    fn zero_counts_are_corrected() {
        for m in [EffectMeasure::RiskRatio, EffectMeasure::OddsRatio] {
            for v in VarianceEstimator::ALL {
                let st = TestStatistic::new(m, v);
                let z = st.value(&outcome(10, 50), &outcome(0, 50)).unwrap();
                assert!(z.is_finite() && z < 0.0, "{st}: {z}");
            }
        }
        let t = TestStatistic::new(EffectMeasure::RiskDifference, VarianceEstimator::Unpooled);
        assert_eq!(t.value(&outcome(50, 50), &outcome(0, 50)).unwrap(), f64::NEG_INFINITY);
        assert_eq!(t.value(&outcome(0, 50), &outcome(0, 50)).unwrap(), 0.0);
    }

    #[test]
    fn coincident_events() {
        let rates = ArmRates::new(0.2, 0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a = sample_arm(&rates, 1.0, 50, &mut rng).unwrap();
            assert_eq!((a.c10, a.c01), (0, 0));
            assert_eq!(a.n(), 50);
        }
    }

    #[test]
    fn rerun_is_identical_across_exec() {
        let spec = MarginalSpec::new(
            ArmRates::new(0.1, 0.2).unwrap(),
            EffectSpec::RiskRatio { r1: 0.7, r2: 0.7 },
        )
        .unwrap();
        let d = DesignSpec::new(0.025, 0.8, EffectMeasure::RiskRatio, VarianceEstimator::Unpooled).unwrap();
        let s = Scenario::sized(&spec, 0.3, 0.3, &d).unwrap();
        let a = empirical_rate(&s, 1500, 9, false, Exec::Sequential).unwrap();
        let b = empirical_rate(&s, 1500, 9, false, Exec::Threads(4)).unwrap();
        assert_eq!(a, b);
        let one = empirical_rate(&s, 1, 9, true, Exec::Auto).unwrap();
        assert_eq!(one, empirical_rate(&s, 1, 9, true, Exec::Auto).unwrap());
    }

    #[test]
    fn default_grid_count() {
        let (cells, _) = GridConfig::default().cells().unwrap();
        assert_eq!(cells.len(), 421);
    }

    #[test]
    fn categories_of_nonnegative_range() {
        let b = CorrelationBounds { lower: -0.1, upper: 0.9 };
        assert_eq!(nonnegative_category(b, 0.0), CorrelationCategory::Weak);
        assert_eq!(nonnegative_category(b, 0.3), CorrelationCategory::Weak);
        assert_eq!(nonnegative_category(b, 0.5), CorrelationCategory::Moderate);
        assert_eq!(nonnegative_category(b, 0.61), CorrelationCategory::Strong);
    }
}
