//! Command-line front end: `solve`, `verify` and `bench` over the registered
//! problems. [`run`] returns the process exit code.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::fdjac::{compare_blocks, compare_jacobians, fd_jacobian, BlockComparison, FdConfig, WorstEntry};
use crate::matrix::OperatorMatrix;
use crate::newton::{
    continuation_solve_with, newton_solve, Continuable, ContinuationSchedule, NewtonConfig, NewtonReport,
    ProblemDef, StageReport,
};
use crate::problems::{
    AnyProblem, Colloid, ColloidConfig, Pnp1d, PnpConfig, ProblemKind, ThinFilm, ThinFilmConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_CONVERGED: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dmjac", version, about = "Analytical-Jacobian spectral solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a problem with parameter continuation and write data files.
    Solve {
        problem: String,
        #[command(flatten)]
        flags: Flags,
        /// PNP: number of time steps.
        #[arg(long, default_value_t = 5)]
        steps: usize,
    },
    /// Compare the analytical Jacobian with a central-difference one.
    Verify {
        problem: String,
        #[command(flatten)]
        flags: Flags,
        /// Largest accepted relative error.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Flip the sign of one Jacobian entry (negative control).
        #[arg(long)]
        inject_bug: bool,
    },
    /// Time analytical against forward-difference Jacobian construction.
    Bench {
        problem: String,
        #[command(flatten)]
        flags: Flags,
        /// Grid sizes (`n`, or `n_r = n_t` for the colloid).
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
    },
}

/// Flags shared by every subcommand; unset ones take per-problem defaults.
#[derive(Debug, Clone, Args, Serialize)]
struct Flags {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    nr: Option<usize>,
    #[arg(long)]
    nt: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    kc: Option<f64>,
    #[arg(long)]
    jr: Option<f64>,
    /// Thin film: target current density.
    #[arg(long, allow_hyphen_values = true)]
    j: Option<f64>,
    /// Colloid: target applied field.
    #[arg(long, allow_hyphen_values = true)]
    efield: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    cont_start: Option<f64>,
    #[arg(long)]
    cont_step: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    v: Option<f64>,
    /// PNP time step.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    res_tol: f64,
    #[arg(long, default_value_t = 20)]
    max_iters: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Invalid(_) => EXIT_INVALID,
                CliError::Failed(_) => EXIT_NOT_CONVERGED,
            }
        }
    }
}

#[derive(Debug)]
enum CliError {
    Invalid(String),
    Failed(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) => CliError::Invalid(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Failed(format!("csv: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn dispatch(cmd: Command) -> CliResult<i32> {
    match cmd {
        Command::Solve { problem, flags, steps } => {
            let kind = parse_kind(&problem)?;
            cmd_solve(kind, &flags, steps)
        }
        Command::Verify {
            problem,
            flags,
            tol,
            inject_bug,
        } => {
            let kind = parse_kind(&problem)?;
            cmd_verify(kind, &flags, tol, inject_bug)
        }
        Command::Bench {
            problem,
            flags,
            sizes,
            reps,
        } => {
            let kind = parse_kind(&problem)?;
            cmd_bench(kind, &flags, sizes, reps)
        }
    }
}

fn parse_kind(name: &str) -> CliResult<ProblemKind> {
    name.parse().map_err(|e: Error| CliError::Invalid(e.to_string()))
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

/// Which sizes to use when a flag is unset.
#[derive(Clone, Copy, PartialEq)]
enum Purpose {
    Solve,
    Verify,
}

impl Flags {
    fn newton(&self) -> CliResult<NewtonConfig> {
        let cfg = NewtonConfig {
            res_tol: self.res_tol,
            max_iters: self.max_iters,
            delta_tol: 0.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn reject(&self, kind: ProblemKind, names: &[(&str, bool)]) -> CliResult<()> {
        for (name, set) in names {
            if *set {
                return Err(invalid(format!("--{name} does not apply to {kind}")));
            }
        }
        Ok(())
    }

    fn thinfilm(&self, kind: ProblemKind, purpose: Purpose) -> CliResult<ThinFilmConfig> {
        self.reject(
            kind,
            &[
                ("nr", self.nr.is_some()),
                ("nt", self.nt.is_some()),
                ("efield", self.efield.is_some()),
                ("lr", self.lr.is_some()),
                ("delta", self.delta.is_some()),
                ("v", self.v.is_some()),
                ("dt", self.dt.is_some()),
            ],
        )?;
        let beta = match kind {
            ProblemKind::ThinFilmMapped => Some(self.beta.unwrap_or(0.75)),
            _ if self.beta.is_some() => {
                return Err(invalid("--beta needs the thinfilm-mapped problem"));
            }
            _ => None,
        };
        let d = ThinFilmConfig::default();
        let cfg = ThinFilmConfig {
            n: self.n.unwrap_or(if purpose == Purpose::Verify { 50 } else { d.n }),
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            k_c: self.kc.unwrap_or(d.k_c),
            j_r: self.jr.unwrap_or(d.j_r),
            j: self.j.unwrap_or(d.j),
            beta,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn colloid(&self, purpose: Purpose) -> CliResult<ColloidConfig> {
        self.reject(
            ProblemKind::Colloid,
            &[
                ("n", self.n.is_some()),
                ("kc", self.kc.is_some()),
                ("jr", self.jr.is_some()),
                ("j", self.j.is_some()),
                ("beta", self.beta.is_some()),
                ("dt", self.dt.is_some()),
            ],
        )?;
        let d = ColloidConfig::default();
        let (nr, nt) = if purpose == Purpose::Verify { (10, 8) } else { (d.n_r, d.n_t) };
        let cfg = ColloidConfig {
            n_r: self.nr.unwrap_or(nr),
            n_t: self.nt.unwrap_or(nt),
            l_r: self.lr.unwrap_or(d.l_r),
            e_applied: self.efield.unwrap_or(d.e_applied),
            v: self.v.unwrap_or(d.v),
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            delta: self.delta.unwrap_or(d.delta),
            c_infinity: d.c_infinity,
            zeta: d.zeta,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn pnp(&self) -> CliResult<PnpConfig> {
        self.reject(
            ProblemKind::Pnp1d,
            &[
                ("nr", self.nr.is_some()),
                ("nt", self.nt.is_some()),
                ("kc", self.kc.is_some()),
                ("jr", self.jr.is_some()),
                ("j", self.j.is_some()),
                ("efield", self.efield.is_some()),
                ("beta", self.beta.is_some()),
                ("lr", self.lr.is_some()),
                ("delta", self.delta.is_some()),
                ("cont-start", self.cont_start.is_some()),
                ("cont-step", self.cont_step.is_some()),
            ],
        )?;
        let d = PnpConfig::default();
        let cfg = PnpConfig {
            n: self.n.unwrap_or(d.n),
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            dt: self.dt.unwrap_or(d.dt),
            // --v sets the potential at x = 1
            phi_bc: (self.v.unwrap_or(d.phi_bc.0), d.phi_bc.1),
            ..d
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Continuation from `--cont-start` (default `min(default_start, target)`)
    /// to `target` in steps of `--cont-step`.
    fn schedule(&self, name: &str, target: f64, default_start: f64, default_step: f64) -> CliResult<ContinuationSchedule> {
        let start = self.cont_start.unwrap_or(default_start.min(target));
        let s = ContinuationSchedule::new(name, start, self.cont_step.unwrap_or(default_step), target);
        s.stages()?;
        Ok(s)
    }
}

fn build(kind: ProblemKind, flags: &Flags, purpose: Purpose) -> CliResult<(AnyProblem, serde_json::Value)> {
    Ok(match kind {
        ProblemKind::ThinFilm | ProblemKind::ThinFilmMapped => {
            let cfg = flags.thinfilm(kind, purpose)?;
            (AnyProblem::ThinFilm(ThinFilm::new(cfg)?), json!(cfg))
        }
        ProblemKind::Colloid => {
            let cfg = flags.colloid(purpose)?;
            (AnyProblem::Colloid(Colloid::new(cfg)?), json!(cfg))
        }
        ProblemKind::Pnp1d => {
            let cfg = flags.pnp()?;
            (AnyProblem::Pnp1d(Pnp1d::perturbed(cfg, 0.2)?), json!(cfg))
        }
    })
}

#[derive(Debug, Serialize)]
struct StageSummary {
    parameter: f64,
    iterations: usize,
    final_residual: f64,
    converged: bool,
    wall_time_s: f64,
}

impl StageSummary {
    fn new(parameter: f64, r: &NewtonReport) -> Self {
        Self {
            parameter,
            iterations: r.iterations,
            final_residual: r.final_residual(),
            converged: r.converged,
            wall_time_s: r.wall_time.as_secs_f64(),
        }
    }
}

/// Everything needed to rerun a command, plus what it produced.
#[derive(Debug, Serialize)]
struct RunManifest {
    subcommand: &'static str,
    problem: String,
    /// Command line with every default spelled out.
    replay: Vec<String>,
    config: serde_json::Value,
    newton: NewtonConfig,
    schedule: Option<ContinuationSchedule>,
    outputs: Vec<PathBuf>,
    wall_time_s: f64,
    converged: bool,
    stages: Vec<StageSummary>,
}

fn replay_args(sub: &str, kind: ProblemKind, flags: &Flags, config: &serde_json::Value, extra: &[(&str, String)]) -> Vec<String> {
    let mut args = vec!["dmjac".to_string(), sub.to_string(), kind.name().to_string()];
    let mut push = |name: &str, v: String| {
        args.push(format!("--{name}"));
        args.push(v);
    };
    let num = |key: &str| config.get(key).map(|v| v.to_string());
    match kind {
        ProblemKind::ThinFilm | ProblemKind::ThinFilmMapped => {
            for (flag, key) in [("n", "n"), ("epsilon", "epsilon"), ("kc", "k_c"), ("jr", "j_r"), ("j", "j")] {
                if let Some(v) = num(key) {
                    push(flag, v);
                }
            }
            if let Some(b) = config.get("beta").filter(|b| !b.is_null()) {
                push("beta", b.to_string());
            }
        }
        ProblemKind::Colloid => {
            for (flag, key) in [
                ("nr", "n_r"),
                ("nt", "n_t"),
                ("lr", "l_r"),
                ("efield", "e_applied"),
                ("v", "v"),
                ("epsilon", "epsilon"),
                ("delta", "delta"),
            ] {
                if let Some(v) = num(key) {
                    push(flag, v);
                }
            }
        }
        ProblemKind::Pnp1d => {
            for (flag, key) in [("n", "n"), ("epsilon", "epsilon"), ("dt", "dt")] {
                if let Some(v) = num(key) {
                    push(flag, v);
                }
            }
            if let Some(v) = config.pointer("/phi_bc/0") {
                push("v", v.to_string());
            }
        }
    }
    for (name, v) in extra {
        push(name, v.clone());
    }
    push("res-tol", format!("{:e}", flags.res_tol));
    push("max-iters", flags.max_iters.to_string());
    push("out", flags.out.display().to_string());
    args
}

fn write_manifest(dir: &Path, manifest: &RunManifest) -> CliResult<PathBuf> {
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(manifest).map_err(|e| CliError::Failed(e.to_string()))?;
    fs::write(&path, text + "\n")?;
    Ok(path)
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:e}")))?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_solve(kind: ProblemKind, flags: &Flags, steps: usize) -> CliResult<i32> {
    let newton = flags.newton()?;
    let (problem, config) = build(kind, flags, Purpose::Solve)?;
    fs::create_dir_all(&flags.out)?;
    let log_path = flags.out.join("newton.jsonl");
    let mut log = fs::File::create(&log_path)?;
    let start = Instant::now();

    let mut outputs = vec![log_path];
    let mut stages = Vec::new();
    let extra;
    let mut failure = None;
    let schedule = match &problem {
        AnyProblem::ThinFilm(p) => {
            let s = flags.schedule("j", p.config().j, 0.5, 0.1)?;
            let family = p.with_parameter(s.start);
            extra = vec![("cont-start", s.start.to_string()), ("cont-step", s.step.to_string())];
            match solve_family(&family, &s, &family.initial_iterate(), &newton, &mut log, &mut stages) {
                Ok(u) => {
                    let target = p.with_parameter(s.target);
                    let st = target.state(&u)?;
                    let sol = flags.out.join("solution.csv");
                    write_csv(
                        &sol,
                        &["x", "E", "c", "rho", "E_computational"],
                        (0..u.len()).map(|i| vec![st.x[i], st.e[i], st.c[i], st.rho[i], u[i]]),
                    )?;
                    let coef = flags.out.join("coefficients.csv");
                    let a = target.coefficients(&u)?;
                    let mut w = csv::Writer::from_path(&coef)?;
                    w.write_record(["n", "abs_a"])?;
                    for (k, v) in a.iter().enumerate() {
                        w.write_record([k.to_string(), format!("{v:e}")])?;
                    }
                    w.flush()?;
                    println!(
                        "{}: j = {} converged, c0 = {:.10}, min E = {:.6}",
                        kind,
                        s.target,
                        st.c0,
                        st.e.iter().cloned().fold(f64::INFINITY, f64::min)
                    );
                    outputs.extend([sol, coef]);
                }
                Err(msg) => failure = Some(msg),
            }
            Some(s)
        }
        AnyProblem::Colloid(p) => {
            let s = flags.schedule("E", p.config().e_applied, 1.0, 0.5)?;
            let family = p.with_parameter(s.start);
            extra = vec![("cont-start", s.start.to_string()), ("cont-step", s.step.to_string())];
            match solve_family(&family, &s, &family.initial_iterate(), &newton, &mut log, &mut stages) {
                Ok(u) => {
                    let target = p.with_parameter(s.target);
                    let st = target.state(&u)?;
                    let coords = target.grid().finite_coordinates();
                    let sol = flags.out.join("solution.csv");
                    write_csv(
                        &sol,
                        &["r", "theta", "c", "psi"],
                        coords.iter().enumerate().map(|(i, (r, t))| vec![*r, *t, st.c_f[i], st.psi_f[i]]),
                    )?;
                    let surf = flags.out.join("surface.csv");
                    let theta = &target.grid().polar.theta;
                    write_csv(
                        &surf,
                        &["theta", "c_s", "psi_s", "phi_s", "zeta", "q", "w"],
                        (0..theta.len())
                            .map(|k| vec![theta[k], st.c_s[k], st.psi_s[k], st.phi_s[k], st.zeta[k], st.q[k], st.w[k]]),
                    )?;
                    println!("{}: E = {} converged", kind, s.target);
                    outputs.extend([sol, surf]);
                }
                Err(msg) => failure = Some(msg),
            }
            Some(s)
        }
        AnyProblem::Pnp1d(p) => {
            extra = vec![("steps", steps.to_string())];
            let mut step = p.clone();
            let mut u = step.initial_iterate();
            for k in 1..=steps {
                let t = k as f64 * p.config().dt;
                let (next, rep) = newton_solve(&step, &u, &newton)?;
                log.write_all(rep.to_json_lines(kind.name(), Some(t)).as_bytes())?;
                stages.push(StageSummary::new(t, &rep));
                if !rep.converged {
                    failure = Some(format!(
                        "time step {k} (t = {t}) did not converge: residual {:e}",
                        rep.final_residual()
                    ));
                    break;
                }
                u = next;
                step = step.advanced(&u)?;
            }
            if failure.is_none() {
                let n = p.config().n;
                let phi = step.potential(&u[..n], &u[n..])?;
                let sol = flags.out.join("solution.csv");
                write_csv(
                    &sol,
                    &["x", "c_plus", "c_minus", "phi"],
                    (0..n).map(|i| vec![p.x()[i], u[i], u[n + i], phi[i]]),
                )?;
                println!("{}: {} steps converged", kind, steps);
                outputs.push(sol);
            }
            None
        }
    };
    let manifest = RunManifest {
        subcommand: "solve",
        problem: kind.name().to_string(),
        replay: replay_args("solve", kind, flags, &config, &extra),
        config,
        newton,
        schedule,
        outputs: outputs.clone(),
        wall_time_s: start.elapsed().as_secs_f64(),
        converged: failure.is_none(),
        stages,
    };
    write_manifest(&flags.out, &manifest)?;
    for s in &manifest.stages {
        println!(
            "  {:>8} iterations {:>2}  residual {:.3e}",
            s.parameter, s.iterations, s.final_residual
        );
    }
    println!("wrote {} files to {}", outputs.len() + 1, flags.out.display());
    match failure {
        None => Ok(EXIT_OK),
        Some(msg) => {
            eprintln!("error: {msg}");
            Ok(EXIT_NOT_CONVERGED)
        }
    }
}

fn solve_family<P: Continuable>(
    family: &P,
    schedule: &ContinuationSchedule,
    u0: &[f64],
    newton: &NewtonConfig,
    log: &mut fs::File,
    stages: &mut Vec<StageSummary>,
) -> std::result::Result<crate::matrix::GridFunction, String> {
    let mut io_err = None;
    let name = family.name().to_string();
    let result = continuation_solve_with(family, schedule, u0, newton, |p, _, rep| {
        if let Err(e) = log.write_all(rep.to_json_lines(&name, Some(p)).as_bytes()) {
            io_err.get_or_insert(e);
        }
    });
    let record = |reports: &[StageReport], stages: &mut Vec<StageSummary>| {
        stages.extend(reports.iter().map(|s| StageSummary::new(s.parameter, &s.report)));
    };
    let out = match result {
        Ok((u, reports)) => {
            record(&reports, stages);
            Ok(u)
        }
        Err(e) => {
            if let Some(last) = e.reports.last().filter(|s| !s.report.converged) {
                let _ = log.write_all(last.report.to_json_lines(&name, Some(last.parameter)).as_bytes());
            }
            record(&e.reports, stages);
            Err(e.to_string())
        }
    };
    match io_err {
        Some(e) => Err(format!("writing iteration log: {e}")),
        None => out,
    }
}

/// Flips the sign of the largest entry of the last Jacobian block.
struct InjectedBug<'a>(&'a AnyProblem);

impl ProblemDef for InjectedBug<'_> {
    fn name(&self) -> &str {
        self.0.name()
    }

    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn residual(&self, u: &[f64]) -> Result<crate::matrix::GridFunction> {
        self.0.residual(u)
    }

    fn jacobian(&self, u: &[f64]) -> Result<OperatorMatrix> {
        let mut j = self.0.jacobian(u)?.to_dense();
        let rows = self.row_blocks();
        let cols = self.col_blocks();
        let r0: usize = rows[..rows.len() - 1].iter().map(|b| b.1).sum();
        let c0: usize = cols[..cols.len() - 1].iter().map(|b| b.1).sum();
        let mut best = (r0, c0, 0.0f64);
        for i in r0..j.rows() {
            for k in c0..j.cols() {
                if j.get(i, k).abs() > best.2.abs() {
                    best = (i, k, j.get(i, k));
                }
            }
        }
        j.set(best.0, best.1, -best.2);
        Ok(j.into())
    }

    fn row_blocks(&self) -> Vec<(String, usize)> {
        self.0.row_blocks()
    }

    fn col_blocks(&self) -> Vec<(String, usize)> {
        self.0.col_blocks()
    }
}

fn cmd_verify(kind: ProblemKind, flags: &Flags, tol: f64, inject_bug: bool) -> CliResult<i32> {
    if !(tol > 0.0) {
        return Err(invalid(format!("--tol must be positive, got {tol}")));
    }
    let (problem, config) = build(kind, flags, Purpose::Verify)?;
    let bugged = InjectedBug(&problem);
    let checked: &dyn ProblemDef = if inject_bug { &bugged } else { &problem };
    let start = Instant::now();
    let mut pass = true;
    let mut records = Vec::new();
    println!("{kind}: {} unknowns, tolerance {tol:e}{}", checked.dim(), if inject_bug { ", injected bug" } else { "" });
    for (s, u) in problem.test_states().iter().enumerate() {
        let analytic = checked.jacobian(u)?;
        let numeric = fd_jacobian(&|v: &[f64]| checked.residual(v), u, &FdConfig::central())?;
        let overall = compare_jacobians(&analytic, &numeric)?;
        let blocks = compare_blocks(&analytic, &numeric, &checked.row_blocks(), &checked.col_blocks())?;
        println!("state {s}: max relative error {:.3e}", overall.max_rel_error);
        for b in &blocks {
            let bad = b.comparison.max_rel_error > tol;
            println!(
                "  d{}/d{:<4} {:.3e}{}",
                b.row_block,
                b.col_block,
                b.comparison.max_rel_error,
                if bad { "  FAIL" } else { "" }
            );
            if bad {
                print_worst(&b.comparison.worst);
            }
        }
        if overall.max_rel_error > tol {
            pass = false;
        }
        records.push(state_record(s, overall.max_rel_error, &blocks));
    }
    fs::create_dir_all(&flags.out)?;
    let body = json!({
        "subcommand": "verify",
        "problem": kind.name(),
        "config": config,
        "tolerance": tol,
        "inject_bug": inject_bug,
        "pass": pass,
        "wall_time_s": start.elapsed().as_secs_f64(),
        "states": records,
    });
    fs::write(
        flags.out.join("verify.json"),
        serde_json::to_string_pretty(&body).unwrap_or_default() + "\n",
    )?;
    println!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn print_worst(w: &WorstEntry) {
    println!(
        "    worst at row {}, col {}: analytic {:.9e}, numeric {:.9e}",
        w.row, w.col, w.analytic, w.numeric
    );
}

fn state_record(state: usize, max_rel: f64, blocks: &[BlockComparison]) -> serde_json::Value {
    json!({
        "state": state,
        "max_rel_error": max_rel,
        "blocks": blocks.iter().map(|b| json!({
            "rows": b.row_block,
            "cols": b.col_block,
            "max_rel_error": b.comparison.max_rel_error,
            "worst": b.comparison.worst,
        })).collect::<Vec<_>>(),
    })
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || x.len() != y.len() {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// One row of a Jacobian timing sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BenchRow {
    pub size: usize,
    pub t_direct: f64,
    pub t_fd: f64,
    pub ratio: f64,
}

/// Median wall times of analytical and forward-difference Jacobian
/// construction at `u`, over `reps` sequential repetitions.
pub fn time_jacobians<P: ProblemDef + ?Sized>(p: &P, u: &[f64], reps: usize) -> Result<(Duration, Duration)> {
    let mut direct = Vec::with_capacity(reps);
    let mut fd = Vec::with_capacity(reps);
    for _ in 0..reps {
        let t = Instant::now();
        std::hint::black_box(p.jacobian(u)?);
        direct.push(t.elapsed());
        let t = Instant::now();
        std::hint::black_box(fd_jacobian(&|v: &[f64]| p.residual(v), u, &FdConfig::forward())?);
        fd.push(t.elapsed());
    }
    Ok((median(direct), median(fd)))
}

fn cmd_bench(kind: ProblemKind, flags: &Flags, sizes: Option<Vec<usize>>, reps: usize) -> CliResult<i32> {
    if reps == 0 {
        return Err(invalid("--reps must be at least 1"));
    }
    let sizes = sizes.unwrap_or_else(|| match kind {
        ProblemKind::Colloid => vec![10, 15, 20, 25, 30],
        ProblemKind::Pnp1d => vec![16, 32, 64, 128],
        _ => vec![100, 200, 400, 800],
    });
    if sizes.is_empty() {
        return Err(invalid("--sizes needs at least one entry"));
    }
    fs::create_dir_all(&flags.out)?;
    let start = Instant::now();
    let mut rows = Vec::new();
    for &size in &sizes {
        let mut f = flags.clone();
        match kind {
            ProblemKind::Colloid => {
                f.nr = Some(size);
                f.nt = Some(size);
            }
            _ => f.n = Some(size),
        }
        let (problem, _) = build(kind, &f, Purpose::Solve)?;
        let u = problem.test_states().swap_remove(0);
        let (td, tf) = time_jacobians(&problem, &u, reps)?;
        let row = BenchRow {
            size,
            t_direct: td.as_secs_f64(),
            t_fd: tf.as_secs_f64(),
            ratio: tf.as_secs_f64() / td.as_secs_f64(),
        };
        println!(
            "{kind} size {size:>4}: direct {:.3e} s, fd {:.3e} s, ratio {:.1}",
            row.t_direct, row.t_fd, row.ratio
        );
        rows.push(row);
    }
    let path = flags.out.join("bench.csv");
    let mut w = csv::Writer::from_path(&path)?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.size as f64).collect();
    let slope_direct = loglog_slope(&xs, &rows.iter().map(|r| r.t_direct).collect::<Vec<_>>());
    let slope_fd = loglog_slope(&xs, &rows.iter().map(|r| r.t_fd).collect::<Vec<_>>());
    if let (Some(a), Some(b)) = (slope_direct, slope_fd) {
        println!("log-log slope: direct {a:.2}, fd {b:.2}");
    }
    let body = json!({
        "subcommand": "bench",
        "problem": kind.name(),
        "sizes": sizes,
        "reps": reps,
        "rows": rows,
        "slope_direct": slope_direct,
        "slope_fd": slope_fd,
        "outputs": [path],
        "wall_time_s": start.elapsed().as_secs_f64(),
    });
    fs::write(
        flags.out.join("manifest.json"),
        serde_json::to_string_pretty(&body).unwrap_or_default() + "\n",
    )?;
    Ok(EXIT_OK)
}
