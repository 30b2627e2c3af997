//! The four subcommands. Each writes CSV to a `Write` and returns how many
//! points or checks failed.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use qd_cascade::dynamics::{evolve, evolve_streaming, steady_state, IntegratorConfig};
use qd_cascade::generator::{full_generator, rhs_components};
use qd_cascade::linalg::max_abs;
use qd_cascade::model::{BasisKind, DriveCase, InitialState};
use qd_cascade::observables::observables_of;
use qd_cascade::oracles::{
    dark_state_rate, g2_closed_form, steady_closed_form, transient_closed_form, variance_closed_form,
};
use qd_cascade::presets::{preset, FigureId, FigurePreset, ParamName, PresetRun, Workload};
use qd_cascade::{Error, Params};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::config::RunConfig;
use crate::table::{self, num, RECORD_COLUMNS};
use crate::CliError;

/// Count of failed rows (steady points, checks) in a finished run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Summary {
    pub failures: usize,
}

pub fn thread_pool(jobs: Option<usize>) -> Result<ThreadPool, CliError> {
    if jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))
}

/// Parameter errors are configuration errors, everything else is numerical.
fn config_params(cfg: &RunConfig) -> Result<Params, CliError> {
    cfg.params_at(None).map_err(usage_if_parameters)
}

fn usage_if_parameters(e: Error) -> CliError {
    match e {
        Error::InvalidParameters(_) | Error::DegenerateParameters(_) | Error::DivisionByZero(_) => {
            CliError::Usage(e.to_string())
        }
        e => CliError::Numerical(e),
    }
}

/// Observables, residual and status of the steady state at `p`.
fn steady_cells(p: &Params, phi: f64) -> (Vec<String>, bool) {
    let result = full_generator(p, BasisKind::Bare)
        .and_then(|l| steady_state(&l))
        .and_then(|ss| Ok((observables_of(&ss.state, p, phi)?, ss.residual)));
    match result {
        Ok((rec, residual)) => {
            let mut cells = table::record_cells(&rec);
            cells.push(num(residual));
            cells.push(table::record_status(&rec).to_string());
            (cells, true)
        }
        Err(e) => (table::error_cells(RECORD_COLUMNS.len() + 1, &table::error_status(&e)), false),
    }
}

fn steady_columns() -> Vec<&'static str> {
    let mut cols: Vec<&'static str> = RECORD_COLUMNS.to_vec();
    cols.push("residual");
    cols.push("status");
    cols
}

/// Evaluates `points` on the pool and returns rows in input order.
fn steady_rows<F>(pool: &ThreadPool, points: Vec<Vec<f64>>, params: F, phi: f64) -> (Vec<Vec<String>>, usize)
where
    F: Fn(&[f64]) -> qd_cascade::Result<Params> + Sync,
{
    let rows: Vec<(Vec<String>, bool)> = pool.install(|| {
        points
            .par_iter()
            .map(|x| {
                let (cells, ok) = match params(x) {
                    Ok(p) => steady_cells(&p, phi),
                    Err(e) => (table::error_cells(RECORD_COLUMNS.len() + 1, &table::error_status(&e)), false),
                };
                let mut row: Vec<String> = x.iter().map(|v| num(*v)).collect();
                row.extend(cells);
                (row, ok)
            })
            .collect()
    });
    let failures = rows.iter().filter(|(_, ok)| !ok).count();
    (rows.into_iter().map(|(r, _)| r).collect(), failures)
}

pub fn run_steady<W: Write + ?Sized>(cfg: &RunConfig, pool: &ThreadPool, w: &mut W) -> Result<Summary, CliError> {
    let (names, points): (Vec<&str>, Vec<Vec<f64>>) = match cfg.sweep {
        Some(s) => (vec![s.var.name()], s.grid.values().into_iter().map(|v| vec![v]).collect()),
        None => {
            config_params(cfg)?;
            (vec![], vec![vec![]])
        }
    };
    let mut header = names.clone();
    header.extend(steady_columns());
    table::write_header(w, &header)?;
    let (rows, failures) = steady_rows(pool, points, |x| cfg.params_at(x.first().copied()), cfg.phi);
    for row in &rows {
        table::write_row(w, row)?;
    }
    w.flush()?;
    Ok(Summary { failures })
}

const EVOLVE_TAIL: [&str; 3] = ["intensity", "intensity_unit", "status"];

fn evolve_header<W: Write + ?Sized>(w: &mut W) -> std::io::Result<()> {
    let mut header = vec!["t"];
    header.extend(RECORD_COLUMNS);
    header.extend(EVOLVE_TAIL);
    table::write_header(w, &header)
}

/// Streams samples to `w`; on failure the rows written so far stay in place.
fn evolve_into<W: Write + ?Sized>(
    p: &Params,
    init: &InitialState<f64>,
    tmax: f64,
    sample_every: f64,
    phi: f64,
    integrator: Option<IntegratorConfig<f64>>,
    w: &mut W,
) -> Result<(), CliError> {
    evolve_header(w)?;
    let g = full_generator(p, BasisKind::Superposition)?;
    let rho0 = init.density(p, BasisKind::Superposition).map_err(usage_if_parameters)?;
    let config = match integrator {
        Some(c) => c,
        None => IntegratorConfig::for_params(p)?,
    };
    let mut io_error = None;
    let result = evolve_streaming(&g, &rho0, tmax, &config, sample_every, |t, rho| {
        let rec = observables_of(rho, p, phi)?;
        let mut row = vec![num(t)];
        row.extend(table::record_cells(&rec));
        row.push(num(rec.intensity));
        row.push(table::unit_name(rec.intensity_unit).to_string());
        row.push(table::record_status(&rec).to_string());
        if let Err(e) = table::write_row(w, &row) {
            io_error = Some(e);
            return Err(Error::InvalidState("output error".into()));
        }
        Ok(())
    });
    w.flush()?;
    if let Some(e) = io_error {
        return Err(e.into());
    }
    result.map(|_| ()).map_err(CliError::Numerical)
}

pub fn run_evolve<W: Write + ?Sized>(
    cfg: &RunConfig,
    integrator: Option<IntegratorConfig<f64>>,
    w: &mut W,
) -> Result<Summary, CliError> {
    if cfg.sweep.is_some() {
        return Err(CliError::Usage("--sweep applies to the steady command only".into()));
    }
    if !(cfg.tmax > 0.0) {
        return Err(CliError::Usage("tmax must be positive".into()));
    }
    if !(cfg.sample_every > 0.0) {
        return Err(CliError::Usage("sample_every must be positive".into()));
    }
    let p = config_params(cfg)?;
    evolve_into(&p, &cfg.init, cfg.tmax, cfg.sample_every, cfg.phi, integrator, w)?;
    Ok(Summary::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    Skipped,
}

struct CheckRow {
    name: &'static str,
    engine: f64,
    oracle: f64,
    tolerance: f64,
    status: Status,
    note: String,
}

impl CheckRow {
    fn compare(name: &'static str, engine: f64, oracle: f64, tolerance: f64) -> Self {
        let ok = (engine - oracle).abs() <= tolerance;
        CheckRow {
            name,
            engine,
            oracle,
            tolerance,
            status: if ok { Status::Pass } else { Status::Fail },
            note: String::new(),
        }
    }

    fn other(name: &'static str, tolerance: f64, status: Status, note: impl Into<String>) -> Self {
        CheckRow { name, engine: f64::NAN, oracle: f64::NAN, tolerance, status, note: note.into() }
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

fn clean(s: String) -> String {
    s.replace(',', ";")
}

fn skip_or_fail(name: &'static str, tolerance: f64, e: &Error) -> CheckRow {
    match e {
        Error::InvalidRegime(msg) => CheckRow::other(name, tolerance, Status::Skipped, clean(msg.clone())),
        e => CheckRow::other(name, tolerance, Status::Fail, clean(e.to_string())),
    }
}

fn generator_checks(p: &Params, init: &InitialState<f64>, rows: &mut Vec<CheckRow>) {
    let bases: Vec<BasisKind> = BasisKind::ALL.into_iter().filter(|b| full_generator(p, *b).is_ok()).collect();
    let mut worst: f64 = 0.0;
    let mut error = None;
    for &from in &bases {
        for &to in &bases {
            match full_generator(p, from).and_then(|l| Ok(l.in_basis(to, p)?.max_abs_diff(&full_generator(p, to)?))) {
                Ok(d) => worst = worst.max(d),
                Err(e) => error = Some(e),
            }
        }
    }
    let labels: Vec<String> = bases.iter().map(|b| b.to_string()).collect();
    rows.push(match error {
        None => CheckRow::compare("generator_cross_basis", worst, 0.0, 1e-10).note(labels.join(" ")),
        Some(e) => skip_or_fail("generator_cross_basis", 1e-10, &e),
    });
    let component = init
        .density(p, BasisKind::Superposition)
        .and_then(|rho| Ok(max_abs(&(rhs_components(p, &rho.entries)? - full_generator(p, BasisKind::Superposition)?.apply(&rho)?))));
    rows.push(match component {
        Ok(d) => CheckRow::compare("component_equations", d, 0.0, 1e-12).note("initial state"),
        Err(e) => skip_or_fail("component_equations", 1e-12, &e),
    });
}

const STEADY_CHECKS: [(&str, f64); 9] = [
    ("steady_pop_1", 1e-10),
    ("steady_pop_2", 1e-10),
    ("steady_pop_3", 1e-10),
    ("steady_pop_w", 1e-10),
    ("steady_pop_u", 1e-10),
    ("steady_re_rho13", 1e-10),
    ("steady_purity", 1e-10),
    ("steady_variance_phi", 1e-10),
    ("steady_g2", 1e-9),
];

fn steady_checks(p: &Params, phi: f64, rows: &mut Vec<CheckRow>) {
    let oracle = steady_closed_form(p).and_then(|cf| {
        Ok([
            cf.pop_1,
            cf.pop_2b,
            cf.pop_3,
            cf.pop_w,
            cf.pop_u,
            cf.coherence13,
            cf.purity,
            variance_closed_form(p, phi)?,
            g2_closed_form(p)?,
        ])
    });
    let oracle = match oracle {
        Ok(o) => o,
        Err(e) => {
            rows.extend(STEADY_CHECKS.iter().map(|(n, t)| skip_or_fail(n, *t, &e)));
            return;
        }
    };
    let engine = full_generator(p, BasisKind::Bare)
        .and_then(|l| steady_state(&l))
        .and_then(|ss| Ok((observables_of(&ss.state, p, phi)?, ss.state.to_basis(BasisKind::Superposition, p)?)));
    match engine {
        Ok((rec, sup)) => {
            let [p1, p2, p3] = rec.populations_bare;
            let values = [
                p1,
                p2,
                p3,
                sup.population(1),
                sup.population(2),
                rec.coherence13.re,
                rec.purity,
                rec.variance_phi,
                rec.g2.value,
            ];
            for ((name, tol), (e, o)) in STEADY_CHECKS.iter().zip(values.into_iter().zip(oracle)) {
                rows.push(CheckRow::compare(name, e, o, *tol));
            }
        }
        Err(e) => rows.extend(
            STEADY_CHECKS
                .iter()
                .map(|(n, t)| CheckRow::other(n, *t, Status::Fail, clean(e.to_string()))),
        ),
    }
}

fn dark_state_checks(p: &Params, init: &InitialState<f64>, rows: &mut Vec<CheckRow>) {
    let rate = init.density(p, BasisKind::BrightDark).and_then(|rho| {
        let oracle = dark_state_rate(p, &rho.entries)?;
        let engine = full_generator(p, BasisKind::BrightDark)?.apply(&rho)?[(2, 2)].re;
        Ok((engine, oracle))
    });
    rows.push(match rate {
        Ok((e, o)) => CheckRow::compare("dark_state_rate", e, o, 1e-12).note("at the initial state"),
        Err(e) => skip_or_fail("dark_state_rate", 1e-12, &e),
    });
    let name = "dark_state_population";
    let population = dark_state_rate(p, &qd_cascade::linalg::Op3::zeros()).and_then(|_| {
        if p.nbar != 0.0 {
            return Err(Error::InvalidRegime("needs nbar = 0".into()));
        }
        let ss = steady_state(&full_generator(p, BasisKind::Bare)?)?;
        Ok(ss.state.to_basis(BasisKind::BrightDark, p)?.population(2))
    });
    rows.push(match population {
        Ok(v) => CheckRow::compare(name, v, 1.0, 1e-8),
        Err(e) => skip_or_fail(name, 1e-8, &e),
    });
}

fn transient_check(cfg: &RunConfig, p: &Params) -> CheckRow {
    const NAME: &str = "transient_sup";
    const TOL: f64 = 0.03;
    let run = || -> qd_cascade::Result<CheckRow> {
        steady_closed_form(p)?;
        let (_, ou) = p.rabi_pair()?;
        let slowest = ((3.0 * p.nbar + 1.0) * p.total_rate()).max(p.delta.abs());
        if !(ou >= 10.0 * slowest) {
            return Err(Error::InvalidRegime(format!(
                "needs Omega_u >= 10 max((3 nbar + 1) gamma; |delta|) (Omega_u = {ou})"
            )));
        }
        let rho0 = cfg.init.density(p, BasisKind::Superposition)?;
        let off = (0..3)
            .flat_map(|i| (0..3).filter(move |j| *j != i).map(move |j| (i, j)))
            .fold(0.0f64, |m, (i, j)| m.max(rho0.element(i, j).norm()));
        if off > 1e-12 {
            return Err(Error::InvalidRegime("needs an initial state diagonal in (2; w; u)".into()));
        }
        let diag = [rho0.population(0), rho0.population(1), rho0.population(2)];
        let g = full_generator(p, BasisKind::Superposition)?;
        let config = IntegratorConfig::for_params(p)?.with_tolerances(1e-10, 1e-12);
        let series = evolve(&g, &rho0, cfg.tmax, &config, cfg.sample_every)?;
        let (mut worst, mut at) = (0.0f64, (0.0, 0.0, 0.0));
        for (t, rho) in series.times.iter().zip(&series.states) {
            let o = transient_closed_form(p, diag, *t)?;
            let m = &rho.entries;
            let pairs = [
                (m[(0, 0)].re, o.rho_22()),
                (m[(1, 1)].re, o.rho_ww),
                (m[(2, 2)].re, o.rho_uu),
                (m[(0, 2)].im, o.rho_2u.im),
                (m[(0, 2)].re, o.rho_2u.re),
            ];
            for (e, o) in pairs {
                if (e - o).abs() > worst {
                    worst = (e - o).abs();
                    at = (*t, e, o);
                }
            }
        }
        Ok(CheckRow::compare(NAME, at.1, at.2, TOL).note(format!("worst element at t = {}", at.0)))
    };
    run().unwrap_or_else(|e| skip_or_fail(NAME, TOL, &e))
}

pub fn run_check<W: Write + ?Sized>(cfg: &RunConfig, w: &mut W) -> Result<Summary, CliError> {
    if cfg.sweep.is_some() {
        return Err(CliError::Usage("--sweep applies to the steady command only".into()));
    }
    let p = config_params(cfg)?;
    let mut rows = Vec::new();
    generator_checks(&p, &cfg.init, &mut rows);
    steady_checks(&p, cfg.phi, &mut rows);
    dark_state_checks(&p, &cfg.init, &mut rows);
    rows.push(transient_check(cfg, &p));

    table::write_header(w, &["check", "engine", "oracle", "deviation", "tolerance", "status", "note"])?;
    let mut failures = 0;
    for r in &rows {
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => {
                failures += 1;
                "fail"
            }
            Status::Skipped => "skipped",
        };
        table::write_row(
            w,
            &[
                r.name.to_string(),
                num(r.engine),
                num(r.oracle),
                num((r.engine - r.oracle).abs()),
                num(r.tolerance),
                status.to_string(),
                r.note.clone(),
            ],
        )?;
    }
    w.flush()?;
    Ok(Summary { failures })
}

fn case_name(case: &DriveCase<f64>) -> String {
    match case {
        DriveCase::Custom => "custom".into(),
        DriveCase::OmegaWZero => "ow_zero".into(),
        DriveCase::OmegaWEqualsOmegaU => "ow_eq_ou".into(),
        DriveCase::OmegaWZeroAt(ou) => format!("ow_zero with Omega_u = {ou}"),
    }
}

fn init_name(init: &InitialState<f64>) -> String {
    match init {
        InitialState::State1 => "state_1".into(),
        InitialState::State2 => "state_2".into(),
        InitialState::State3 => "state_3".into(),
        InitialState::StateW => "state_w".into(),
        InitialState::StateU => "state_u".into(),
        InitialState::StateB => "state_b".into(),
        InitialState::StateD => "state_d".into(),
        InitialState::MaximallyMixed => "maximally_mixed".into(),
        InitialState::BareDiagonal([a, b, c]) => format!("diag:{a},{b},{c}"),
        InitialState::SuperpositionDiagonal([a, b, c]) => format!("diag_super:{a},{b},{c}"),
    }
}

fn preset_comments<W: Write + ?Sized>(w: &mut W, pre: &FigurePreset, run: &PresetRun) -> Result<(), CliError> {
    let p = run.params_at(&[])?;
    table::write_comment(w, &format!("figure: {}", pre.id))?;
    table::write_comment(w, &format!("title: {}", pre.title))?;
    table::write_comment(w, &format!("run: {}", run.label))?;
    table::write_comment(w, &format!("case: {}", case_name(&run.case)))?;
    table::write_comment(
        w,
        &format!(
            "params: gamma1 = {}, gamma3 = {}, big_gamma2 = {}, big_gamma3 = {}, omega1 = {}, omega3 = {}, delta = {}, nbar = {}",
            p.gamma1, p.gamma3, p.big_gamma2, p.big_gamma3, p.omega1, p.omega3, p.delta, p.nbar
        ),
    )?;
    table::write_comment(w, &format!("phi: {}", pre.phi))?;
    match &pre.workload {
        Workload::Steady(axes) => {
            for (name, grid) in axes {
                table::write_comment(w, &format!("sweep: {} from {} to {} ({} points)", name.name(), grid.start, grid.stop, grid.points))?;
            }
        }
        Workload::Transient { t_max, sample_every } => {
            table::write_comment(w, &format!("init: {}", init_name(&run.init)))?;
            table::write_comment(w, &format!("time: 0 to {t_max} every {sample_every}"))?;
        }
    }
    for choice in &pre.choices {
        table::write_comment(w, &format!("preset choice: {choice}"))?;
    }
    Ok(())
}

fn grid_points(axes: &[(ParamName, qd_cascade::presets::Grid)]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![vec![]], |acc, (_, grid)| {
        let values = grid.values();
        acc.into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(*v);
                    p
                })
            })
            .collect()
    })
}

/// Writes every run of figure `id` into `dir` and returns the file paths.
pub fn run_figure(id: FigureId, dir: &Path, pool: &ThreadPool) -> Result<(Vec<PathBuf>, Summary), CliError> {
    fs::create_dir_all(dir)?;
    let pre = preset(id);
    let mut written = Vec::new();
    let mut summary = Summary::default();
    for run in &pre.runs {
        let path = dir.join(pre.file_name(run));
        let mut w = BufWriter::new(fs::File::create(&path)?);
        preset_comments(&mut w, &pre, run)?;
        written.push(path);
        match &pre.workload {
            Workload::Steady(axes) => {
                let names: Vec<&str> = axes.iter().map(|(n, _)| n.name()).collect();
                let mut header = names.clone();
                header.extend(steady_columns());
                table::write_header(&mut w, &header)?;
                let params = |x: &[f64]| {
                    let assignments: Vec<(ParamName, f64)> = axes.iter().map(|(n, _)| *n).zip(x.iter().copied()).collect();
                    run.params_at(&assignments)
                };
                let (rows, failures) = steady_rows(pool, grid_points(axes), params, pre.phi);
                for row in &rows {
                    table::write_row(&mut w, row)?;
                }
                summary.failures += failures;
            }
            Workload::Transient { t_max, sample_every } => {
                let p = run.params_at(&[])?;
                evolve_into(&p, &run.init, *t_max, *sample_every, pre.phi, None, &mut w)?;
            }
        }
        w.flush()?;
    }
    Ok((written, summary))
}
