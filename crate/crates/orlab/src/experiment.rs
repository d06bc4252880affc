use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use orlicz::{make_young, predict_regularity, DensitySpec, SobolevParams};
use rearrange::{distribution, median, DiscreteField};
use solver::snapshot::write_snapshot;
use solver::{
    build_mesh, element_values, run_schedule, BoundaryCondition, OperatorField, Problem, ProblemSpec, Run, SolveOptions,
    SolverError, Weight,
};
use thiserror::Error;
use verify::*;

use crate::config::{ConfigError, ExperimentConfig};
use crate::plot::{plot_distribution, Series};

/// Pipeline stage named in failure diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Solve,
    Checks,
    Output,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Solve => "solve",
            Stage::Checks => "checks",
            Stage::Output => "output",
        })
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("stage solve: {0}")]
    Solver(SolverError),
    #[error("stage output: {0}")]
    Io(#[from] io::Error),
}

impl RunError {
    pub fn stage(&self) -> Stage {
        match self {
            RunError::Config(_) => Stage::Config,
            RunError::Solver(_) => Stage::Solve,
            RunError::Io(_) => Stage::Output,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 3,
            RunError::Solver(_) | RunError::Io(_) => 4,
        }
    }
}

/// Command-line overrides of the config.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub checks: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Predicted,
    Measured,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::Predicted => "paper-predicted",
            Provenance::Measured => "measured",
        }
    }
}

/// One line of `summary.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub quantity: String,
    pub value: String,
    pub provenance: Provenance,
}

fn row(quantity: &str, value: impl ToString, provenance: Provenance) -> SummaryRow {
    SummaryRow { quantity: quantity.to_string(), value: value.to_string(), provenance }
}

#[derive(Debug)]
pub struct Outcome {
    pub out_dir: PathBuf,
    pub run: Run,
    pub reports: Vec<CheckReport>,
    pub summary: Vec<SummaryRow>,
}

impl Outcome {
    /// The first failing scale and its error, if the schedule stopped early.
    pub fn solver_failure(&self) -> Option<String> {
        self.run.failure.as_ref().map(|(k, e)| format!("stage solve: k = {k}: {e}"))
    }

    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }

    /// 0 all checks pass, 2 some check fails, 4 the schedule stopped early.
    pub fn exit_code(&self) -> i32 {
        if self.run.failure.is_some() {
            4
        } else if self.all_passed() {
            0
        } else {
            2
        }
    }

    pub fn report(&self, name: &str) -> Option<&CheckReport> {
        self.reports.iter().find(|r| r.name == name)
    }

    pub fn value(&self, quantity: &str, provenance: Provenance) -> Option<&str> {
        self.summary.iter().find(|r| r.quantity == quantity && r.provenance == provenance).map(|r| r.value.as_str())
    }
}

fn config_err(key: &str, e: impl std::fmt::Display) -> RunError {
    RunError::Config(ConfigError { key: key.into(), message: e.to_string() })
}

/// Builds the mesh and problem described by `cfg`. Errors that a valid-looking
/// config can still trigger (inadmissible indices, data incompatible on the
/// discrete domain) are reported as config errors against the responsible key.
pub fn build_problem(cfg: &ExperimentConfig, mollifier: solver::Mollifier) -> Result<Problem, RunError> {
    let mesh = build_mesh(cfg.geometry, cfg.h).map_err(|e| config_err("domain.h", e))?;
    let young = make_young(&cfg.young).map_err(|e| config_err("operator", e))?;
    let op = OperatorField::new(young, Weight::Uniform(cfg.weight)).map_err(|e| config_err("operator", e))?;
    op.require_admissible().map_err(|e| config_err("operator", e))?;
    let pr = ProblemSpec::with_sobolev(Arc::new(mesh), op, cfg.bc, cfg.datum.clone(), cfg.sobolev()).map_err(|e| match e {
        SolverError::IncompatibleNeumannData { .. } => config_err("datum", format!("{e}")),
        SolverError::PointMassOutside { .. } => config_err("datum.point", e),
        e => config_err("problem", e),
    })?;
    Ok(pr.with_mollifier(mollifier))
}

fn schedule(cfg: &ExperimentConfig, problem: &Problem) -> Result<Run, RunError> {
    let opts = SolveOptions { tol: cfg.tolerances.newton, ..SolveOptions::default() };
    run_schedule(problem, &cfg.k_list, &opts, cfg.taus.as_deref()).map_err(|e| match e {
        SolverError::InvalidSchedule(_) => config_err("schedule.k", e),
        SolverError::InadmissibleIndices { .. } => config_err("operator", e),
        e => RunError::Solver(e),
    })
}

/// `|u|`, or `|u − med(u)|` for Neumann problems, cell by cell.
pub fn level_field(run: &Run) -> Option<DiscreteField<f64>> {
    let last = run.limit()?;
    let u = element_values(&run.problem.mesh, &last.solution.u);
    let med = if run.problem.bc == BoundaryCondition::Neumann { median(&u) } else { 0.0 };
    Some(u.map(|v| (v - med).abs()))
}

fn largest_cell(run: &Run) -> f64 {
    run.problem.mesh.measures().iter().cloned().fold(0.0, f64::max)
}

/// First level of the auto window, moved up in octaves until the level set
/// holds at most half of the domain.
pub fn decay_start(u: &DiscreteField<f64>, cell: f64) -> Option<f64> {
    let (mut t, hi) = auto_window(u, cell)?;
    let half = 0.5 * u.total_measure();
    while distribution(u, t) > half && t < hi {
        t *= 2.0;
    }
    Some(t)
}

fn failed(name: &str, note: String) -> CheckReport {
    let mut rep = CheckReport::new(name, &[]);
    rep.require(false, note);
    rep
}

fn run_checks(cfg: &ExperimentConfig, run: &Run, params: Option<&SobolevParams<f64>>) -> Result<Vec<CheckReport>, RunError> {
    let mut reports = Vec::new();
    let truncation = check_truncation_energy(run);
    let m = truncation.get("M");
    if cfg.wants("truncation") {
        reports.push(truncation);
    }
    if cfg.wants("budget") {
        reports.push(check_gradient_budget(run));
    }
    if cfg.wants("band") {
        reports.push(check_band_energy(run));
    }
    if cfg.wants("cauchy") {
        reports.push(check_cauchy_in_measure(run, &run.cauchy.taus));
    }
    if cfg.wants("monotone") {
        reports.push(check_monotonicity_trick(run, cfg.tolerances.monotone_delta));
    }
    if let Some(params) = params {
        if cfg.wants("decay") {
            let u = level_field(run).expect("complete run");
            let rep = match (decay_start(&u, largest_cell(run)), m) {
                (Some(t0), Some(m)) if m > 0.0 => check_level_decay(&u, run.problem.operator.young(), params, m, t0),
                _ => failed("level_decay", "no level resolved by at least 10 cells, or M = 0".into()),
            };
            reports.push(rep);
        }
        if cfg.wants("regularity") {
            let rep = compare_regularity(run, params, None).unwrap_or_else(|e| failed("regularity", format!("fit window: {e}")));
            reports.push(rep);
        }
    }
    if cfg.wants("uniqueness") {
        if let Some(shape) = cfg.uniqueness_mollifier {
            let other = schedule(cfg, &build_problem(cfg, shape)?)?;
            let tol = cfg.tolerances.uniqueness.unwrap_or(10.0 * cfg.h);
            let mut rep = if other.is_complete() {
                check_uniqueness(run, &other, tol)
            } else {
                failed("uniqueness", format!("second schedule failed: {:?}", other.failure))
            };
            rep.note(format!("second mollifier: {shape:?}"));
            reports.push(rep);
        }
    }
    Ok(reports)
}

/// Levels `max·2^{-j/4}` down to 24 octaves below the maximum.
fn level_table(field: &DiscreteField<f64>) -> Vec<(f64, f64)> {
    let top = field.max_abs();
    if !(top > 0.0) {
        return Vec::new();
    }
    (0..=96).map(|j| top * 2f64.powf(-(j as f64) / 4.0)).map(|t| (t, distribution(field, t))).collect()
}

fn write_levels(path: &Path, levels: &[(f64, f64)]) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "level,distribution,ln_level,ln_distribution")?;
    for &(t, mu) in levels {
        let lmu = if mu > 0.0 { format!("{:.10e}", mu.ln()) } else { String::new() };
        writeln!(w, "{t:.10e},{mu:.10e},{:.10e},{lmu}", t.ln())?;
    }
    w.flush()
}

fn write_summary(path: &Path, rows: &[SummaryRow]) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "quantity,value,provenance")?;
    for r in rows {
        writeln!(w, "{},{},{}", r.quantity, r.value.replace(',', ";"), r.provenance.label())?;
    }
    w.flush()
}

fn power_and_log(spec: &DensitySpec<f64>) -> Option<(f64, f64)> {
    match *spec {
        DensitySpec::PowerLaw { p } => Some((p, 0.0)),
        DensitySpec::PowerLog { p, beta } => Some((p, beta)),
        _ => None,
    }
}

fn summarize(cfg: &ExperimentConfig, run: &Run, reports: &[CheckReport], params: Option<&SobolevParams<f64>>) -> Vec<SummaryRow> {
    use Provenance::*;
    let mut rows = Vec::new();
    if let (Some((p, beta)), Some(params)) = (power_and_log(&cfg.young), params) {
        if let Ok(pred) = predict_regularity(p, beta, params) {
            rows.push(row("class", &pred, Predicted));
            rows.push(row("class_theta", format!("∇u: {}", pred.grad_theta), Predicted));
        }
    }
    if let Some(reg) = reports.iter().find(|r| r.name == "regularity") {
        for (key, prov) in [
            ("u_predicted", Predicted),
            ("u_slope", Measured),
            ("grad_predicted_psi", Predicted),
            ("grad_predicted_theta", Predicted),
            ("grad_slope", Measured),
            ("u_max", Measured),
        ] {
            if let Some(v) = reg.get(key) {
                rows.push(row(key, format!("{v:.6}"), prov));
            }
        }
    }
    for s in &run.steps {
        let top = s.solution.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        rows.push(row(&format!("max_u_k{}", s.k), format!("{top:.8e}"), Measured));
    }
    for (name, key) in [
        ("truncation_energy", "max_ratio"),
        ("gradient_budget", "growth_slope"),
        ("level_decay", "fitted_slope"),
        ("level_decay", "bound_slope"),
    ] {
        if let Some(v) = reports.iter().find(|r| r.name == name).and_then(|r| r.get(key)) {
            let prov = if key == "bound_slope" { Predicted } else { Measured };
            rows.push(row(&format!("{name}.{key}"), format!("{v:.6}"), prov));
        }
    }
    for r in reports {
        rows.push(row(&format!("verdict.{}", r.name), r.verdict(), Measured));
    }
    rows
}

fn plot_field(path: &Path, title: &str, levels: &[(f64, f64)], slopes: &[(&str, f64)], window: Option<(f64, f64)>) -> io::Result<()> {
    let pts: Vec<(f64, f64)> = levels.iter().filter(|l| l.1 > 0.0).map(|&(t, mu)| (t.ln(), mu.ln())).collect();
    if pts.len() < 2 {
        return Ok(());
    }
    let (lo, hi) = window.unwrap_or((pts.last().unwrap().0.exp(), pts[0].0.exp()));
    let anchor = levels.iter().filter(|l| l.1 > 0.0 && l.0 <= hi).map(|&(t, mu)| (t.ln(), mu.ln())).next().unwrap_or(pts[0]);
    let mut series = vec![Series { label: "measured".into(), points: pts, dashed: false }];
    for (label, s) in slopes {
        let line = [lo.ln(), hi.ln()].iter().map(|&x| (x, anchor.1 + s * (x - anchor.0))).collect();
        series.push(Series { label: format!("{label} slope {s:.3}"), points: line, dashed: true });
    }
    plot_distribution(path, title, &series).map_err(|e| io::Error::new(io::ErrorKind::Other, e))
}

/// Runs the schedule, the requested checks, and writes every artifact under
/// the output directory. A schedule that stops early still writes its
/// completed snapshots and returns an [`Outcome`] with exit code 4.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, RunError> {
    let mut cfg = cfg.clone();
    if let Some(c) = &opts.checks {
        cfg.checks = Some(c.clone());
    }
    let out_dir = opts.out.clone().or_else(|| cfg.out.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
    let problem = build_problem(&cfg, cfg.mollifier)?;
    let run = schedule(&cfg, &problem)?;

    let snaps = out_dir.join("snapshots");
    fs::create_dir_all(&snaps)?;
    for s in &run.steps {
        let w = BufWriter::new(File::create(snaps.join(format!("u_k{:04}.txt", s.k)))?);
        write_snapshot(w, &run.problem.mesh, &s.solution.u)?;
    }
    if !run.is_complete() {
        return Ok(Outcome { out_dir, run, reports: Vec::new(), summary: Vec::new() });
    }

    let params = run.problem.sobolev;
    let reports = run_checks(&cfg, &run, params.as_ref())?;
    let mut w = BufWriter::new(File::create(out_dir.join("reports.txt"))?);
    write_reports(&mut w, &reports)?;
    w.flush()?;

    let rdir = out_dir.join("rearrangement");
    fs::create_dir_all(&rdir)?;
    let u = level_field(&run).expect("complete run");
    let last = run.limit().expect("complete run");
    let g = last.solution.gradient.magnitude_field(&run.problem.mesh);
    let (lu, lg) = (level_table(&u), level_table(&g));
    write_levels(&rdir.join("u.csv"), &lu)?;
    write_levels(&rdir.join("grad.csv"), &lg)?;

    let summary = summarize(&cfg, &run, &reports, params.as_ref());
    write_summary(&out_dir.join("summary.csv"), &summary)?;

    if cfg.plots {
        let pdir = out_dir.join("plots");
        fs::create_dir_all(&pdir)?;
        let reg = reports.iter().find(|r| r.name == "regularity");
        let get = |k: &str| reg.and_then(|r| r.get(k));
        let win = |lo: &str, hi: &str| get(lo).zip(get(hi));
        let u_slopes: Vec<(&str, f64)> = get("u_predicted").map(|s| vec![("Φ", s)]).unwrap_or_default();
        let g_slopes: Vec<(&str, f64)> = [("Ψ", get("grad_predicted_psi")), ("Θ", get("grad_predicted_theta"))]
            .into_iter()
            .filter_map(|(l, s)| s.map(|s| (l, s)))
            .collect();
        plot_field(&pdir.join("u.svg"), "ln |{|u| > t}| against ln t", &lu, &u_slopes, win("u_window_lo", "u_window_hi"))?;
        plot_field(&pdir.join("grad.svg"), "ln |{|∇u| > t}| against ln t", &lg, &g_slopes, win("grad_window_lo", "grad_window_hi"))?;
    }
    Ok(Outcome { out_dir, run, reports, summary })
}
