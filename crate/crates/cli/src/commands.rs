use std::fs::File;
use std::io::Write;
use std::path::Path;

use blowup::critical::{count_solutions, find_critical};
use blowup::green::{green, robin};
use blowup::pohozaev::verify_identities;
use blowup::predictor::{approximate_field, predict};
use blowup::psi::{balance_identity, is_positive, m_matrix, psi_grad_hess, psi_value};
use blowup::{
    CriticalPoint64, DomainSpec, GreenFunction, GreenProvider64, IdentitySettings, Order, PeakConfig, Scheme, SearchConfig,
    SearchConfig64, Shape, SurfaceSpec, UniversalConstants64,
};
use serde_json::{json, Value};

use crate::args::*;
use crate::error::CliError;

/// Command output plus an optional failure that should set the exit status after the report
/// has been written.
pub struct Outcome {
    pub output: Value,
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(output: Value) -> Self {
        Self { output, failure: None }
    }
}

type CmdResult = Result<Outcome, CliError>;

pub fn run(cmd: &Command, spec: &DomainSpec, g: &GreenProvider64, seed: u64, expect: bool) -> CmdResult {
    match cmd {
        Command::GreenEval(a) => green_eval(g, a),
        Command::RobinMap(a) => robin_map(spec, g, a),
        Command::PsiEval(a) => psi_eval(g, a),
        Command::FindCritical(a) => find(g, a, seed, expect),
        Command::Count(a) => count(g, a, seed, expect),
        Command::PohozaevVerify(a) => pohozaev(g, a, seed),
        Command::Predict(a) => predict_cmd(spec, g, a, seed, expect),
    }
}

fn to_value<S: serde::Serialize>(v: &S) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn constants(g: &GreenProvider64) -> Result<UniversalConstants64, CliError> {
    Ok(UniversalConstants64::new(g.dim())?)
}

fn green_eval(g: &GreenProvider64, a: &GreenEvalArgs) -> CmdResult {
    let r = robin(g, &a.x.0)?;
    let mut out = json!({ "x": a.x, "robin": to_value(&r) });
    if let Some(y) = &a.y {
        let value = green(g, &a.x.0, &y.0)?;
        let regular = g.regular(&a.x.0, &y.0, Order::Value)?.value;
        out["y"] = to_value(y);
        out["green"] = json!(value);
        out["regular"] = json!(regular);
    }
    Ok(Outcome::ok(out))
}

/// Center of the first component, used as the origin of sampled lines.
fn domain_center(spec: &DomainSpec) -> Vec<f64> {
    match &spec.shape {
        Shape::Ball { center, .. } => center.clone(),
        Shape::DisjointBalls { balls } => balls[0].center.clone(),
        Shape::Smooth { surface: SurfaceSpec::Ellipsoid { center, .. }, .. } => center.clone(),
    }
}

/// `count` points on the first axis through the domain center, spanning `±extent` times the
/// boundary distance there.
fn axis_grid(spec: &DomainSpec, g: &GreenProvider64, count: u32, extent: f64) -> Result<Vec<Vec<f64>>, CliError> {
    if !(extent > 0.0 && extent < 1.0) {
        return Err(CliError::Validation(format!("extent must lie in (0, 1), got {extent}")));
    }
    let center = domain_center(spec);
    let reach = extent * g.boundary_distance(&center);
    Ok((0..count)
        .map(|i| {
            let t = -reach + 2.0 * reach * f64::from(i) / f64::from(count - 1);
            let mut p = center.clone();
            p[0] += t;
            p
        })
        .collect())
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let err = |source| CliError::Write { path: path.to_path_buf(), source };
    let mut f = File::create(path).map_err(err)?;
    writeln!(f, "{}", header.join(",")).map_err(err)?;
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| format!("{v:e}")).collect();
        writeln!(f, "{}", cells.join(",")).map_err(err)?;
    }
    Ok(())
}

fn robin_map(spec: &DomainSpec, g: &GreenProvider64, a: &RobinMapArgs) -> CmdResult {
    let grid = axis_grid(spec, g, a.grid, a.extent)?;
    let values = grid.iter().map(|p| Ok(robin(g, p)?.value)).collect::<Result<Vec<f64>, CliError>>()?;
    let min_index = values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if let Some(path) = &a.csv {
        let mut header: Vec<String> = (1..=g.dim()).map(|i| format!("x{i}")).collect();
        header.push("robin".into());
        let rows: Vec<Vec<f64>> =
            grid.iter().zip(&values).map(|(p, v)| p.iter().copied().chain([*v]).collect()).collect();
        write_csv(path, &header, &rows)?;
    }
    Ok(Outcome::ok(json!({
        "points": grid,
        "values": values,
        "min_index": min_index,
        "min_point": grid[min_index],
    })))
}

fn psi_eval(g: &GreenProvider64, a: &PsiEvalArgs) -> CmdResult {
    let consts = constants(g)?;
    let points: Vec<Vec<f64>> = a.points.iter().map(|p| p.0.clone()).collect();
    let c = PeakConfig::new(points.clone(), a.scales.clone())?;
    let value = psi_value(g, &c, &consts)?;
    let (gradient, hessian) = psi_grad_hess(g, &c, &consts)?;
    let m = m_matrix(g, &points)?;
    let positive = is_positive(&m, m.default_tolerance());
    let balance = balance_identity(&m, c.scales(), &consts);
    Ok(Outcome::ok(json!({
        "value": value,
        "gradient": gradient,
        "hessian": to_value(&hessian),
        "interaction_matrix": to_value(&m),
        "m_positive": positive,
        "balance_identity": balance,
    })))
}

fn search_config(g: &GreenProvider64, s: &SearchArgs, seed: u64) -> SearchConfig64 {
    let mut cfg = SearchConfig::for_domain(g);
    cfg.starts = s.starts;
    cfg.seed = seed;
    if let Some(t) = s.grad_tol {
        cfg.grad_tol = t;
    }
    cfg
}

fn find(g: &GreenProvider64, a: &FindCriticalArgs, seed: u64, expect: bool) -> CmdResult {
    let cfg = search_config(g, &a.search, seed);
    let points = find_critical(g, a.k as usize, &cfg, &constants(g)?)?;
    let failure = (expect && points.is_empty())
        .then(|| CliError::Expectation(format!("no critical point with k = {} was found", a.k)));
    Ok(Outcome { output: json!({ "k": a.k, "count": points.len(), "points": to_value(&points) }), failure })
}

fn count(g: &GreenProvider64, a: &CountArgs, seed: u64, expect: bool) -> CmdResult {
    let cfg = search_config(g, &a.search, seed);
    let report = count_solutions(g, a.k_max as usize, &cfg, &constants(g)?)?;
    let failure = (expect && report.total == 0)
        .then(|| CliError::Expectation(format!("no accepted critical point for k up to {}", a.k_max)));
    Ok(Outcome { output: to_value(&report), failure })
}

fn pohozaev(g: &GreenProvider64, a: &PohozaevArgs, seed: u64) -> CmdResult {
    let scheme = match a.product {
        Some(resolution) => Scheme::Product { resolution },
        None => Scheme::MonteCarlo { samples: a.samples, seed },
    };
    let settings = IdentitySettings { scheme, theta: a.theta, closed_forms: a.closed_forms.into() };
    let poles: Vec<Vec<f64>> = a.poles.iter().map(|p| p.0.clone()).collect();
    let residuals = verify_identities(g, &poles, &settings)?;
    let max_rel = residuals.iter().fold(0.0f64, |m, r| m.max(r.rel_residual));
    let above = residuals.iter().filter(|r| r.rel_residual >= 1e-2).count();
    let drift = residuals.iter().filter(|r| !r.drift_within(3.0)).count();
    Ok(Outcome::ok(json!({
        "summary": {
            "cases": residuals.len(),
            "max_rel_residual": max_rel,
            "above_rel_1e-2": above,
            "drift_above_3_se": drift,
        },
        "residuals": to_value(&residuals),
    })))
}

fn predict_cmd(spec: &DomainSpec, g: &GreenProvider64, a: &PredictArgs, seed: u64, expect: bool) -> CmdResult {
    if !(a.epsilon > 0.0 && a.epsilon.is_finite()) {
        return Err(CliError::Validation(format!("epsilon must be positive, got {}", a.epsilon)));
    }
    if a.field_grid < 2 {
        return Err(CliError::Validation("field grid needs at least two points".into()));
    }
    let consts = constants(g)?;
    let cfg = search_config(g, &a.search, seed);
    let accepted: Vec<CriticalPoint64> = find_critical(g, a.k as usize, &cfg, &consts)?
        .into_iter()
        .filter(|c| c.nondegenerate && c.m_matrix_positive)
        .collect();
    let predictions =
        accepted.iter().map(|c| predict(c, a.epsilon, g.dim())).collect::<blowup::Result<Vec<_>>>()?;
    let entries: Vec<Value> = accepted
        .iter()
        .zip(&predictions)
        .map(|(c, p)| {
            json!({
                "critical_point": to_value(c),
                "prediction": to_value(p),
                "neglected_error_order": p.neglected_error_order(),
                "far_field_error_order": p.far_field_error_order(),
            })
        })
        .collect();
    let mut out = json!({ "k": a.k, "epsilon": a.epsilon, "predictions": entries });
    if let (Some(path), Some(first)) = (&a.field_csv, predictions.first()) {
        let grid = axis_grid(spec, g, a.field_grid, 0.9)?;
        let samples = approximate_field(g, first, &grid, &consts)?;
        let err = |source| CliError::Write { path: path.clone(), source };
        samples.write_csv(File::create(path).map_err(err)?)?;
        let mut side = path.clone().into_os_string();
        side.push(".json");
        std::fs::write(&side, samples.sidecar_json()).map_err(|source| CliError::Write { path: side.into(), source })?;
        out["field_points"] = json!(grid.len());
    }
    let failure = (expect && predictions.is_empty())
        .then(|| CliError::Expectation(format!("no accepted critical point with k = {}", a.k)));
    Ok(Outcome { output: out, failure })
}
