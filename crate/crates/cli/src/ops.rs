//! One function per command. Each returns the command's result object and,
//! for tabular commands, the CSV rendering of the same rows.

use std::str::FromStr;

use cbe_core::bounds::{bounds, category_interval, design_rho, robust_bounds_with, CorrelationBounds, CorrelationCategory};
use cbe_core::composite::{
    composite_effect, composite_rate, joint_table, CorrelationPair, EffectMeasure, JointTable,
};
use cbe_core::exec::Exec;
use cbe_core::simulate::{run_grid, GridOutput, GridRow, CSV_HEADER};
use cbe_core::sizing::{composite_parameters, n_composite, power};
use cbe_core::strategy::{
    recommend_with, rho_curve, sample_size_interval, CurveInput, CurvePoint, RateInput, Recommendation,
};
use serde_json::{json, Map, Value};

use crate::error::AppError;
use crate::params::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Derive,
    Bounds,
    Size,
    Power,
    Recommend,
    Curve,
    Simulate,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Derive,
        Command::Bounds,
        Command::Size,
        Command::Power,
        Command::Recommend,
        Command::Curve,
        Command::Simulate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Derive => "derive",
            Command::Bounds => "bounds",
            Command::Size => "size",
            Command::Power => "power",
            Command::Recommend => "recommend",
            Command::Curve => "curve",
            Command::Simulate => "simulate",
        }
    }
}

impl FromStr for Command {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or(())
    }
}

/// Result of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub result: Map<String, Value>,
    pub csv: Option<String>,
}

impl Outcome {
    fn json(v: Value) -> Self {
        match v {
            Value::Object(result) => Outcome { result, csv: None },
            other => unreachable!("command results are objects, got {other}"),
        }
    }
}

pub fn execute(cmd: Command, p: &Params, exec: Exec) -> Result<Outcome, AppError> {
    match cmd {
        Command::Derive => derive(p),
        Command::Bounds => bounds_cmd(p),
        Command::Size => size(p),
        Command::Power => power_cmd(p),
        Command::Recommend => recommend(p),
        Command::Curve => curve(p, exec),
        Command::Simulate => simulate(p, exec),
    }
}

fn bounds_json(b: CorrelationBounds) -> Value {
    json!({ "lower": b.lower, "upper": b.upper })
}

fn table_json(t: &JointTable) -> Value {
    json!({ "p11": t.p11, "p10": t.p10, "p01": t.p01, "p00": t.p00 })
}

fn categories_json(b: CorrelationBounds) -> Value {
    let mut m = Map::new();
    for c in CorrelationCategory::ALL {
        let i = category_interval(b, c);
        m.insert(c.name().to_string(), json!({ "low": i.low, "high": i.high }));
    }
    Value::Object(m)
}

fn derive(p: &Params) -> Result<Outcome, AppError> {
    let spec = p.spec()?;
    let (rho0, rho1) = match (p.rho0.or(p.rho), p.rho1.or(p.rho)) {
        (Some(a), Some(b)) => (a, b),
        (None, _) => return Err(AppError::MissingField("rho".into())),
        (_, None) => return Err(AppError::MissingField("rho1".into())),
    };
    let treatment = spec.treatment()?;
    let t0 = joint_table(&spec.control, rho0)?;
    let t1 = joint_table(&treatment, rho1)?;
    let pair = CorrelationPair { rho0, rho1 };
    let mut effects = Map::new();
    for m in EffectMeasure::ALL {
        effects.insert(m.short_name().into(), json!(composite_effect(&spec.expressed_as(m)?, pair)?));
    }
    let measure = p.measure.unwrap_or(spec.effect.measure());
    Ok(Outcome::json(json!({
        "control": { "p1": spec.control.p1, "p2": spec.control.p2 },
        "treatment": { "p1": treatment.p1, "p2": treatment.p2 },
        "rho0": rho0,
        "rho1": rho1,
        "p0_star": composite_rate(&spec.control, rho0)?,
        "p1_star": composite_rate(&treatment, rho1)?,
        "effect_measure": measure.short_name(),
        "effect_star": composite_effect(&spec.expressed_as(measure)?, pair)?,
        "effects": effects,
        "joint_tables": { "control": table_json(&t0), "treatment": table_json(&t1) },
        "bounds": bounds_json(bounds(&spec)?),
    })))
}

fn bounds_cmd(p: &Params) -> Result<Outcome, AppError> {
    let intervals = p.intervals()?;
    let mut out = Map::new();
    let main = if p.has_point_rates() || intervals.is_none() {
        let spec = p.spec()?;
        let (cl, cu) = spec.control.correlation_range();
        let (tl, tu) = spec.treatment()?.correlation_range();
        out.insert("control_range".into(), json!([cl, cu]));
        out.insert("treatment_range".into(), json!([tl, tu]));
        bounds(&spec)?
    } else {
        CorrelationBounds { lower: f64::NAN, upper: f64::NAN }
    };
    let main = match intervals {
        Some(iv) => {
            let rb = robust_bounds_with(&iv, &p.effect()?, p.rate_search())?;
            let mut corners = Map::new();
            for (name, control) in [("low", iv.low_corner()), ("high", iv.high_corner())] {
                let spec = cbe_core::composite::MarginalSpec::new(control, p.effect()?)?;
                corners.insert(name.into(), bounds_json(bounds(&spec)?));
            }
            out.insert("robust".into(), json!({ "lower": rb.lower, "upper": rb.upper }));
            out.insert("corners".into(), Value::Object(corners));
            if main.lower.is_nan() {
                rb.into()
            } else {
                main
            }
        }
        None => main,
    };
    out.insert("lower".into(), json!(main.lower));
    out.insert("upper".into(), json!(main.upper));
    out.insert("categories".into(), categories_json(main));
    Ok(Outcome { result: out, csv: None })
}

fn size(p: &Params) -> Result<Outcome, AppError> {
    let spec = p.spec()?;
    let d = p.design()?;
    let b = bounds(&spec)?;
    let rho = match (p.rho, p.category) {
        (Some(r), _) => r,
        (None, Some(c)) => design_rho(b, c),
        (None, None) => return Err(AppError::MissingField("rho".into())),
    };
    let n = n_composite(&spec, rho, &d)?;
    let (p0, e) = composite_parameters(&spec, rho, &d)?;
    let mut out = json!({
        "n_total": n.n_total,
        "n_per_group": n.n_per_group,
        "n_total_raw": n.n_total_raw,
        "design_rho_used": n.design_rho_used,
        "achieved_power_at_design": n.achieved_power_at_design,
        "p0_star": p0,
        "effect_star": e,
        "measure": d.measure.short_name(),
        "variance": d.variance.name(),
        "bounds": bounds_json(b),
    });
    if let Some(iv) = p.intervals()? {
        let [lo, hi] = sample_size_interval(&iv, &spec.effect, rho, &d)?;
        out["n_interval"] = json!([lo, hi]);
    }
    Ok(Outcome::json(out))
}

fn power_cmd(p: &Params) -> Result<Outcome, AppError> {
    let spec = p.spec()?;
    let d = p.design()?;
    let rho = p.rho()?;
    let n = p.n_total.ok_or_else(|| AppError::MissingField("n_total".into()))?;
    let pw = power(&spec, rho, n, &d)?;
    let (p0, e) = composite_parameters(&spec, rho, &d)?;
    Ok(Outcome::json(json!({
        "power": pw,
        "rho": rho,
        "n_total": n,
        "p0_star": p0,
        "effect_star": e,
        "measure": d.measure.short_name(),
        "variance": d.variance.name(),
    })))
}

fn recommendation_json(r: &Recommendation) -> Value {
    json!({
        "category": r.category.name(),
        "rho_low": r.rho_interval.low,
        "rho_high": r.rho_interval.high,
        "design_rho": r.sample_size.design_rho_used,
        "n_total": r.sample_size.n_total,
        "n_per_group": r.sample_size.n_per_group,
        "n_total_raw": r.sample_size.n_total_raw,
        "n_min": r.sample_size_bounds[0],
        "n_max": r.sample_size_bounds[1],
        "achieved_power_at_design": r.sample_size.achieved_power_at_design,
        "power_min": r.power_range[0],
        "power_max": r.power_range[1],
        "design_p1": r.design_rates.p1,
        "design_p2": r.design_rates.p2,
    })
}

fn recommend(p: &Params) -> Result<Outcome, AppError> {
    let d = p.design()?;
    let opts = p.strategy_options();
    let categories: Vec<CorrelationCategory> = match p.category {
        Some(c) => vec![c],
        None => CorrelationCategory::ALL.to_vec(),
    };
    let intervals = p.intervals()?;
    let mut out = Map::new();
    let mut first: Option<Recommendation> = None;

    if p.has_point_rates() || intervals.is_none() {
        let input = RateInput::Point(p.spec()?);
        let recs = categories
            .iter()
            .map(|&c| recommend_with(&input, c, &d, &opts))
            .collect::<cbe_core::Result<Vec<_>>>()?;
        out.insert("bounds".into(), bounds_json(recs[0].bounds));
        out.insert("recommendations".into(), recs.iter().map(recommendation_json).collect());
        first = recs.into_iter().next();
    }
    if let Some(iv) = intervals {
        let input = RateInput::Intervals { intervals: iv, effect: p.effect()? };
        let recs = categories
            .iter()
            .map(|&c| recommend_with(&input, c, &d, &opts))
            .collect::<cbe_core::Result<Vec<_>>>()?;
        out.insert("robust_bounds".into(), bounds_json(recs[0].bounds));
        out.insert("interval_recommendations".into(), recs.iter().map(recommendation_json).collect());
        if first.is_none() {
            first = recs.into_iter().next();
        }
    }
    if p.category.is_some() {
        if let Some(r) = first {
            out.insert("n_total".into(), json!(r.sample_size.n_total));
        }
    }
    out.insert("measure".into(), json!(d.measure.short_name()));
    out.insert("variance".into(), json!(d.variance.name()));
    Ok(Outcome { result: out, csv: None })
}

/// Full-precision CSV of curve points.
pub fn curve_csv(points: &[CurvePoint]) -> Result<String, AppError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| AppError::Io(e.to_string());
    w.write_record(["rho", "n_low", "n_point", "n_high"]).map_err(io)?;
    for pt in points {
        w.write_record([
            pt.rho.to_string(),
            pt.n_low.to_string(),
            pt.n_point.to_string(),
            pt.n_high.to_string(),
        ])
        .map_err(io)?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, AppError> {
    let bytes = w.into_inner().map_err(|e| AppError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| AppError::Io(e.to_string()))
}

fn curve(p: &Params, exec: Exec) -> Result<Outcome, AppError> {
    let input = CurveInput { spec: p.spec()?, intervals: p.intervals()? };
    let d = p.design()?;
    let n_points = p.n_points()?;
    let points = rho_curve(&input, &d, n_points, exec)?;
    let csv = curve_csv(&points)?;
    let (lo, hi) = (points[0].rho, points[points.len() - 1].rho);
    let rows: Vec<Value> = points
        .iter()
        .map(|pt| json!({ "rho": pt.rho, "n_low": pt.n_low, "n_point": pt.n_point, "n_high": pt.n_high }))
        .collect();
    let mut out = Outcome::json(json!({
        "points": rows,
        "range": { "lower": lo, "upper": hi },
        "n_points": n_points,
        "measure": d.measure.short_name(),
        "variance": d.variance.name(),
    }));
    out.csv = Some(csv);
    Ok(out)
}

/// CSV of a simulation grid with the fixed column order.
pub fn grid_csv(rows: &[GridRow]) -> Result<String, AppError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| AppError::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record(r.csv_record()).map_err(io)?;
    }
    finish(w)
}

fn row_json(r: &GridRow) -> Value {
    let (e1, e2) = r.cell.spec.effect.values();
    json!({
        "p1": r.cell.spec.control.p1,
        "p2": r.cell.spec.control.p2,
        "effect1": e1,
        "effect2": e2,
        "measure": r.measure.short_name(),
        "rho_true": r.cell.rho_true,
        "rho_design": r.rho_design,
        "rule": r.rule.name(),
        "variance": r.variance.name(),
        "statistic": r.statistic.name(),
        "n_total": r.n_total,
        "reps": r.reps,
        "seed": r.seed,
        "empirical_power": r.empirical_power,
        "empirical_type1": r.empirical_type1,
        "misspecification": serde_json::to_value(r.misspecification()).unwrap_or(Value::Null),
    })
}

/// Number of simulated trials a request asks for (power and type I error).
pub fn simulation_load(p: &Params) -> Result<u64, AppError> {
    let g = p.grid();
    let (cells, _) = g.cells()?;
    let jobs = cells.len() as u64 * (g.rules.len() * g.measures.len() * g.variances.len()) as u64;
    Ok(jobs.saturating_mul(g.reps).saturating_mul(2))
}

fn simulate(p: &Params, exec: Exec) -> Result<Outcome, AppError> {
    let g = p.grid();
    let GridOutput { rows, skipped } = run_grid(&g, exec)?;
    let csv = grid_csv(&rows)?;
    let scenarios = g.cells()?.0.len();
    let skipped: Vec<Value> = skipped
        .iter()
        .map(|s| {
            json!({ "p1": s.p1, "p2": s.p2, "effect1": s.effect1, "effect2": s.effect2,
                    "rho_true": s.rho_true, "reason": s.reason })
        })
        .collect();
    let mut out = Outcome::json(json!({
        "scenarios": scenarios,
        "rows": rows.iter().map(row_json).collect::<Vec<_>>(),
        "skipped": skipped,
        "columns": CSV_HEADER,
        "reps": g.reps,
        "grid": serde_json::to_value(&g).unwrap_or(Value::Null),
    }));
    out.csv = Some(csv);
    Ok(out)
}
