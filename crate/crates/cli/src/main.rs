use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use ilp_reparam::closed_forms::{
    circulation, curl_2d, curl_area_integral, f1, g_hat_1d, g_hat_2d, grad_phi_hat_2d, phi_hat_1d,
    phi_hat_hat_1d, Planar2DProblem, Scalar1DProblem,
};
use ilp_reparam::dynamics::{sgd_run, EstimatorKind, SgdConfig};
use ilp_reparam::estimators::{bias_report, DEFAULT_FD_STEP, DEFAULT_SAMPLES};
use ilp_reparam::ilp::{enumerate_solve, mu_threshold_parts};
use ilp_reparam::penalty::expected_penalty_exact;
use ilp_reparam::reparam::DEFAULT_CLAMP;
use ilp_reparam::table::{format_sig, render_csv};
use ilp_reparam::{Error, IlpInstance, PenaltyConfig, RelaxedPoint};
use serde_json::json;

const EXIT_INPUT: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

const GRID_LO: f64 = 0.001;
const GRID_HI: f64 = 0.999;

/// Exact and Monte-Carlo analysis of reparameterized binary ILPs.
#[derive(Parser, Debug)]
#[command(name = "ilp-reparam", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance by enumerating every binary point.
    Solve(InstanceArg),
    /// Print the penalty threshold above which the penalized problem is exact.
    Threshold(InstanceArg),
    /// Tabulate the single-variable curves f1, phi_hat, phi_hat_hat, g_hat, expected true penalty.
    #[command(name = "curves-1d")]
    Curves1d(Curves1dArgs),
    /// Tabulate the two-variable expected estimator field and its curl.
    #[command(name = "field-2d")]
    Field2d(Field2dArgs),
    /// Compare the pathwise estimator's mean with a finite-difference gradient of the expected surrogate.
    Bias(BiasArgs),
    /// Run projected SGD and write the trajectory.
    Sgd(SgdArgs),
    /// Loop integrals of g_hat and of the surrogate's gradient around a square.
    Circulation(CirculationArgs),
}

#[derive(Args, Debug)]
struct InstanceArg {
    /// JSON file with keys "a" (rows), "b" and "c".
    #[arg(long)]
    instance: PathBuf,
}

#[derive(Args, Debug)]
struct OutArg {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Curves1dArgs {
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 0.95)]
    b: f64,
    /// Number of rows, evenly spaced over [0.001, 0.999].
    #[arg(long, default_value_t = 999)]
    resolution: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct Field2dArgs {
    #[arg(long, default_value_t = 1.0)]
    a1: f64,
    #[arg(long, default_value_t = 1.0)]
    a2: f64,
    #[arg(long, default_value_t = 1.5)]
    b: f64,
    /// Points per axis, evenly spaced over [0.001, 0.999].
    #[arg(long, default_value_t = 51)]
    resolution: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct BiasArgs {
    #[command(flatten)]
    instance: InstanceArg,
    /// Evaluation point, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    x: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Central-difference step of the gradient oracle.
    #[arg(long, default_value_t = DEFAULT_FD_STEP)]
    step: f64,
    /// Single constraint to report; all constraints when omitted.
    #[arg(long)]
    constraint: Option<usize>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct SgdArgs {
    #[command(flatten)]
    instance: InstanceArg,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Starting point, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    x0: Vec<f64>,
    #[arg(long, default_value_t = 0.05)]
    step_size: f64,
    #[arg(long, default_value_t = 2000)]
    steps: usize,
    #[arg(long, default_value_t = 32)]
    batch: usize,
    #[arg(long, default_value_t = DEFAULT_CLAMP)]
    clamp: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// thm5, corrected-1d or exact-penalty-grad.
    #[arg(long, default_value = "thm5")]
    estimator: String,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct CirculationArgs {
    #[arg(long, default_value_t = 1.0)]
    a1: f64,
    #[arg(long, default_value_t = 1.0)]
    a2: f64,
    #[arg(long, default_value_t = 1.5)]
    b: f64,
    /// Square centre, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.5])]
    center: Vec<f64>,
    /// Half side of the square.
    #[arg(long, default_value_t = 0.2)]
    radius: f64,
    /// Trapezoid intervals per side.
    #[arg(long, default_value_t = 4000)]
    points: usize,
}

fn emit(out: &OutArg, text: &str) -> anyhow::Result<()> {
    match &out.out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => io::stdout().write_all(text.as_bytes()).context("cannot write to standard output"),
    }
}

fn load(path: &Path) -> anyhow::Result<IlpInstance> {
    IlpInstance::from_path(path).map_err(|e| match e {
        Error::Parse(p) => anyhow!("{}: parse error at line {} column {}: {p}", path.display(), p.line(), p.column()),
        other => anyhow::Error::new(other),
    })
}

fn linspace(n: usize) -> anyhow::Result<Vec<f64>> {
    if n < 2 {
        return Err(anyhow::Error::new(Error::DomainError(format!("resolution {n} must be at least 2"))));
    }
    Ok((0..n).map(|k| GRID_LO + (GRID_HI - GRID_LO) * k as f64 / (n - 1) as f64).collect())
}

fn corner_list(points: &[ilp_reparam::BinaryPoint]) -> String {
    points.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn cmd_solve(args: &InstanceArg) -> anyhow::Result<u8> {
    let inst = load(&args.instance)?;
    let r = enumerate_solve(&inst)?;
    let mut out = io::stdout().lock();
    writeln!(out, "feasible: {}", r.feasible)?;
    match r.optimal_value {
        Some(v) => writeln!(out, "optimal value: {}", format_sig(v))?,
        None => writeln!(out, "optimal value: none")?,
    }
    writeln!(out, "optimal set ({}): {}", r.optimal_set.len(), corner_list(&r.optimal_set))?;
    let block = json!({
        "feasible": r.feasible,
        "optimal_value": r.optimal_value,
        "optimal_set": r.optimal_set.iter().map(|x| x.to_u8()).collect::<Vec<_>>(),
    });
    writeln!(out, "{block}")?;
    Ok(if r.feasible { 0 } else { EXIT_INFEASIBLE })
}

fn cmd_threshold(args: &InstanceArg) -> anyhow::Result<u8> {
    let inst = load(&args.instance)?;
    let t = mu_threshold_parts(&inst)?;
    let feasible = enumerate_solve(&inst)?.feasible;
    let mut out = io::stdout().lock();
    writeln!(out, "mu_star: {}", format_sig(t.mu_star))?;
    writeln!(out, "denominator: {}", format_sig(t.denominator))?;
    writeln!(out, "positive slack exists: {}", t.has_positive_slack)?;
    if feasible {
        writeln!(
            out,
            "for every mu > {}, the minimizers of c.x + mu * sum_i E[max(a_i.x - b_i, 0)] over [0,1]^{} \
             are exactly the minimizers of c.x over the zero-penalty set",
            format_sig(t.mu_star),
            inst.d()
        )?;
    } else {
        writeln!(out, "no binary point is feasible: the zero-penalty set is empty and no mu is admissible")?;
    }
    Ok(if feasible { 0 } else { EXIT_INFEASIBLE })
}

fn cmd_curves_1d(args: &Curves1dArgs) -> anyhow::Result<u8> {
    let p = Scalar1DProblem::new(args.a, args.b)?;
    let inst = IlpInstance::new(vec![vec![args.a]], vec![args.b], vec![0.0])?;
    let mut rows = Vec::with_capacity(args.resolution);
    for x in linspace(args.resolution)? {
        let truth = expected_penalty_exact(&inst, &RelaxedPoint::new(vec![x])?)?[0];
        rows.push(vec![x, f1(x)?, phi_hat_1d(&p, x)?, phi_hat_hat_1d(&p, x)?, g_hat_1d(&p, x)?, truth]);
    }
    let header = ["x", "f1", "phi_hat", "phi_hat_hat", "g_hat", "expected_penalty"];
    emit(&args.out, &render_csv(&header, &rows))?;
    Ok(0)
}

fn cmd_field_2d(args: &Field2dArgs) -> anyhow::Result<u8> {
    let p = Planar2DProblem::new(args.a1, args.a2, args.b)?;
    let axis = linspace(args.resolution)?;
    let mut rows = Vec::with_capacity(axis.len() * axis.len());
    for &x1 in &axis {
        for &x2 in &axis {
            let g = g_hat_2d(&p, [x1, x2])?;
            rows.push(vec![x1, x2, g[0], g[1], curl_2d(&p, [x1, x2])?]);
        }
    }
    emit(&args.out, &render_csv(&["x1", "x2", "g1", "g2", "curl"], &rows))?;
    Ok(0)
}

fn cmd_bias(args: &BiasArgs) -> anyhow::Result<u8> {
    let inst = load(&args.instance.instance)?;
    let x = RelaxedPoint::new(args.x.clone())?;
    let constraints: Vec<usize> = match args.constraint {
        Some(i) => vec![i],
        None => (0..inst.m()).collect(),
    };
    let mut rows = Vec::new();
    for i in constraints {
        let r = bias_report(&inst, i, &x, args.samples, args.seed, args.step)?;
        for j in 0..inst.d() {
            rows.push(vec![
                i as f64,
                (j + 1) as f64,
                r.estimator_mean.mean[j],
                r.estimator_mean.stderr[j],
                r.oracle_grad.mean[j],
                r.oracle_grad.stderr[j],
                r.gap[j],
                r.gap_stderr[j],
            ]);
        }
    }
    let header = [
        "constraint",
        "coordinate",
        "estimator_mean",
        "estimator_stderr",
        "oracle_grad",
        "oracle_stderr",
        "gap",
        "gap_stderr",
    ];
    emit(&args.out, &render_csv(&header, &rows))?;
    Ok(0)
}

fn cmd_sgd(args: &SgdArgs) -> anyhow::Result<u8> {
    let inst = load(&args.instance.instance)?;
    let cfg = PenaltyConfig::new(args.mu)?;
    let s = SgdConfig {
        step_size: args.step_size,
        steps: args.steps,
        batch: args.batch,
        clamp: args.clamp,
        seed: args.seed,
        estimator: args.estimator.parse::<EstimatorKind>()?,
    };
    s.validate()?;
    let t = sgd_run(&inst, cfg, &RelaxedPoint::new(args.x0.clone())?, &s)?;
    emit(&args.out, &t.to_csv())?;
    let terminal: Vec<String> = t.terminal().iter().map(|&v| format_sig(v)).collect();
    eprintln!("terminal point: ({})", terminal.join(","));
    if let Some(v) = t.terminal_objective {
        eprintln!("terminal penalized objective: {}", format_sig(v));
    }
    Ok(0)
}

fn cmd_circulation(args: &CirculationArgs) -> anyhow::Result<u8> {
    let p = Planar2DProblem::new(args.a1, args.a2, args.b)?;
    let &[cx, cy] = args.center.as_slice() else {
        return Err(anyhow::Error::new(Error::DomainError(format!(
            "centre needs 2 coordinates, got {}",
            args.center.len()
        ))));
    };
    let center = [cx, cy];
    let g = circulation(|x| g_hat_2d(&p, x), center, args.radius, args.points)?;
    let grad = circulation(|x| grad_phi_hat_2d(&p, x), center, args.radius, args.points)?;
    let area = curl_area_integral(&p, center, args.radius)?;
    let mut out = io::stdout().lock();
    writeln!(out, "loop integral of g_hat: {}", format_sig(g))?;
    writeln!(out, "loop integral of grad phi_hat: {}", format_sig(grad))?;
    writeln!(out, "area integral of curl: {}", format_sig(area))?;
    Ok(0)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::InfeasibleInstance) => EXIT_INFEASIBLE,
        Some(e) if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Threshold(a) => cmd_threshold(a),
        Command::Curves1d(a) => cmd_curves_1d(a),
        Command::Field2d(a) => cmd_field_2d(a),
        Command::Bias(a) => cmd_bias(a),
        Command::Sgd(a) => cmd_sgd(a),
        Command::Circulation(a) => cmd_circulation(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
