use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use delaylog_cli::config::{require, ComplexArg, Config, Format, Target};
use delaylog::cycle::{
    classify_parameter_point, detect_from, Budgets, ClassifyOptions, DetectOptions, DEFAULT_MATCH_TOL,
    DEFAULT_P_MAX, QUICK_TRANSIENT,
};
use delaylog::lyapunov::{largest_lyapunov, LyapunovOptions, LyapunovVerdict};
use delaylog::map::DEFAULT_GUARD_EPSILON;
use delaylog::period_two::{period_two_cycles, period_two_discriminant, period_two_reports, PeriodTwo};
use delaylog::recipes::{reproduce_recipe, RecipeName, RecipeOutcome};
use delaylog::stability::{stability_reports, DEFAULT_TOL_HYP};
use delaylog::sweep::{run_sweep, GridSpec, SweepOptions, DEFAULT_CELL_BUDGET};
use delaylog::{equilibria, generate_orbit, io, trap_ball_radius, Complex64, MapParameters, OrbitSpec};
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Copies every flag that was given on the command line into the config.
macro_rules! overlay {
    ($cfg:expr, $args:expr; $($field:ident),+ $(,)?) => {
        $( if let Some(v) = $args.$field.clone() { $cfg.$field = Some(v); } )+
    };
}

const BUDGET_HELP: &str = "\
Budgets (per random initial pair):
  default  transient 100000, p-max 2048, window 6144, match-tol 1e-7,
           lyapunov-steps 100000 when no cycle is found
  --quick  transient 1000, p-max 64, window 192, lyapunov-steps 10000
Individual flags override either set.";

#[derive(Parser, Debug)]
#[command(
    name = "delaylog",
    version,
    about = "Orbits, stability, cycles and Lyapunov exponents of z' = alpha z / (1 + beta z_prev)",
    after_help = "Exit status: 0 success, 1 a reproduced check failed, 2 invalid input or other error."
)]
struct Cli {
    /// JSON file whose keys mirror the long flags; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Iterate the map and export the raw orbit (z_{-1}, z_0, ...).
    Orbit {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        start: StartArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Equilibria and the trap-ball radius.
    Equilibria {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Characteristic roots and classification of both equilibria.
    Stability {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        tol: TolArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Closed-form prime-period-2 cycle and its stability.
    Period2 {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        tol: TolArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Detect a periodic cycle in one orbit. JSON report or CSV of cycle points.
    #[command(after_help = "Defaults: transient 1000, p-max 2048, window 3*p-max, match-tol 1e-7, \
iters = transient + 2*p-max + window.")]
    DetectCycle {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        start: StartArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        detect: DetectArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Classify a parameter point from several random initial pairs.
    #[command(after_help = BUDGET_HELP)]
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        classify: ClassifyArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Largest Lyapunov exponent along one orbit. JSON summary or CSV trace.
    #[command(after_help = "Defaults: transient 1000, then 1000000 accumulated steps \
(iters = transient + 1000000), renorm 1, chaos-tol 1e-3.")]
    Lyapunov {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        start: StartArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        lyap: LyapunovArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Classify every cell of a grid over alpha or beta.
    #[command(after_help = BUDGET_HELP)]
    Sweep {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        classify: ClassifyArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Rerun a published case and check the recorded values.
    Reproduce {
        /// fig1 ... fig7, table1, or all.
        name: String,
        /// Output directory (a subdirectory per case is created).
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct ParamArgs {
    /// Parameter alpha, e.g. 1+2i.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<ComplexArg>,
    /// Parameter beta, e.g. 2-3i.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<ComplexArg>,
}

#[derive(Args, Debug)]
struct StartArgs {
    /// Initial value z_0.
    #[arg(long, allow_hyphen_values = true)]
    z0: Option<ComplexArg>,
    /// Initial value z_{-1}.
    #[arg(long = "z-1", allow_hyphen_values = true)]
    z_minus1: Option<ComplexArg>,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Total number of iterations.
    #[arg(long)]
    iters: Option<usize>,
    /// Iterations excluded from analysis windows.
    #[arg(long)]
    transient: Option<usize>,
    /// Guard on |1 + beta z_prev| [default: 1e-12].
    #[arg(long)]
    guard: Option<f64>,
}

#[derive(Args, Debug)]
struct TolArgs {
    /// Band around modulus 1 treated as non-hyperbolic [default: 1e-9].
    #[arg(long)]
    tol_hyp: Option<f64>,
}

#[derive(Args, Debug)]
struct DetectArgs {
    #[arg(long)]
    p_max: Option<usize>,
    /// Number of consecutive comparisons that must match.
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    match_tol: Option<f64>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// Random initial pairs per parameter point [default: 10].
    #[arg(long)]
    seeds: Option<usize>,
    /// RNG seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Use the small budget set.
    #[arg(long)]
    quick: bool,
    #[arg(long)]
    transient: Option<usize>,
    #[arg(long)]
    p_max: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    match_tol: Option<f64>,
    #[arg(long)]
    lyapunov_steps: Option<usize>,
    #[arg(long)]
    chaos_tol: Option<f64>,
    #[arg(long)]
    guard: Option<f64>,
}

#[derive(Args, Debug)]
struct LyapunovArgs {
    /// Steps between tangent renormalisations.
    #[arg(long)]
    renorm: Option<usize>,
    #[arg(long)]
    chaos_tol: Option<f64>,
    /// Also write the running estimates as CSV (k,estimate).
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Parameter swept over the grid; the other one is --fixed.
    #[arg(long, value_enum)]
    target: Option<Target>,
    /// Value of the parameter that is not swept.
    #[arg(long, allow_hyphen_values = true)]
    fixed: Option<ComplexArg>,
    #[arg(long, allow_hyphen_values = true)]
    re_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    re_max: Option<f64>,
    #[arg(long)]
    re_steps: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    im_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    im_max: Option<f64>,
    #[arg(long)]
    im_steps: Option<usize>,
    /// Worker threads [default: available cores].
    #[arg(long)]
    workers: Option<usize>,
    /// Refuse grids with more cells than this [default: 1000000].
    #[arg(long)]
    max_cells: Option<usize>,
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Output file [default: stdout].
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

enum Outcome {
    Done,
    ChecksFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Orbit { params, start, run, out } => {
            overlay!(cfg, params; alpha, beta);
            overlay!(cfg, start; z0, z_minus1);
            overlay!(cfg, run; iters, transient, guard);
            overlay!(cfg, out; out, format);
            orbit(&cfg)
        }
        Command::Equilibria { params, out } => {
            overlay!(cfg, params; alpha, beta);
            overlay!(cfg, out; out, format);
            equilibria_cmd(&cfg)
        }
        Command::Stability { params, tol, out } => {
            overlay!(cfg, params; alpha, beta);
            overlay!(cfg, tol; tol_hyp);
            overlay!(cfg, out; out, format);
            stability(&cfg)
        }
        Command::Period2 { params, tol, out } => {
            overlay!(cfg, params; alpha, beta);
            overlay!(cfg, tol; tol_hyp);
            overlay!(cfg, out; out, format);
            period2(&cfg)
        }
        Command::DetectCycle { params, start, run, detect, out } => {
            overlay!(cfg, params; alpha, beta);
            overlay!(cfg, start; z0, z_minus1);
            overlay!(cfg, run; iters, transient, guard);
            overlay!(cfg, detect; p_max, window, match_tol);
            overlay!(cfg, out; out, format);
            detect_cycle(&cfg)
        }
        Command::Classify { params, classify, out } => {
            overlay!(cfg, params; alpha, beta);
            overlay_classify(&mut cfg, &classify);
            overlay!(cfg, out; out, format);
            classify_cmd(&cfg)
        }
        Command::Lyapunov { params, start, run, lyap, out } => {
            overlay!(cfg, params; alpha, beta);
            overlay!(cfg, start; z0, z_minus1);
            overlay!(cfg, run; iters, transient, guard);
            overlay!(cfg, lyap; renorm, chaos_tol, trace);
            overlay!(cfg, out; out, format);
            lyapunov(&cfg)
        }
        Command::Sweep { grid, classify, out } => {
            overlay!(cfg, grid; target, fixed, re_min, re_max, re_steps, im_min, im_max, im_steps, workers, max_cells);
            overlay_classify(&mut cfg, &classify);
            overlay!(cfg, out; out, format);
            sweep(&cfg)
        }
        Command::Reproduce { name, out } => reproduce(&name, &out),
    }
}

fn overlay_classify(cfg: &mut Config, args: &ClassifyArgs) {
    overlay!(cfg, args; seeds, seed, transient, p_max, window, match_tol, lyapunov_steps, chaos_tol, guard);
    if args.quick {
        cfg.quick = Some(true);
    }
}

fn params(cfg: &Config) -> Result<MapParameters> {
    Ok(MapParameters::new(require(&cfg.alpha, "alpha")?.0, require(&cfg.beta, "beta")?.0))
}

fn start(cfg: &Config) -> Result<(Complex64, Complex64)> {
    Ok((require(&cfg.z_minus1, "z-1")?.0, require(&cfg.z0, "z0")?.0))
}

fn positive(value: f64, flag: &str) -> Result<f64> {
    if !(value.is_finite() && value > 0.0) {
        bail!("--{flag} must be a positive number");
    }
    Ok(value)
}

fn guard(cfg: &Config) -> Result<f64> {
    positive(cfg.guard.unwrap_or(DEFAULT_GUARD_EPSILON), "guard")
}

fn tol_hyp(cfg: &Config) -> Result<f64> {
    positive(cfg.tol_hyp.unwrap_or(DEFAULT_TOL_HYP), "tol-hyp")
}

fn format(cfg: &Config, default: Format) -> Format {
    cfg.format.unwrap_or(default)
}

/// Runs `f` against the `--out` file, or stdout when none is given.
fn emit(cfg: &Config, f: impl FnOnce(&mut dyn Write) -> delaylog::Result<()>) -> Result<()> {
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(cfg: &Config, command: &str, value: &T) -> Result<Outcome> {
    if format(cfg, Format::Json) == Format::Csv {
        bail!("{command} has no CSV output; use --format json");
    }
    emit(cfg, |w| io::write_json(value, w))?;
    Ok(Outcome::Done)
}

fn orbit(cfg: &Config) -> Result<Outcome> {
    let p = params(cfg)?;
    let (zm1, z0) = start(cfg)?;
    let spec = OrbitSpec::new(zm1, z0, cfg.iters.unwrap_or(1000))
        .with_transient(cfg.transient.unwrap_or(0))
        .with_guard(guard(cfg)?);
    let orbit = generate_orbit(&p, &spec)?;
    if !orbit.status.is_completed() {
        eprintln!("note: orbit stopped: {}", orbit.status);
    }
    match format(cfg, Format::Csv) {
        Format::Csv => emit(cfg, |w| io::write_orbit_csv(&orbit, w))?,
        Format::Json => emit(cfg, |w| io::write_orbit_json(&p, &orbit, w))?,
    }
    Ok(Outcome::Done)
}

fn equilibria_cmd(cfg: &Config) -> Result<Outcome> {
    #[derive(Serialize)]
    struct Report {
        equilibria: delaylog::map::Equilibria,
        trap_ball: delaylog::map::TrapBall,
    }
    let p = params(cfg)?;
    let report = Report {
        equilibria: equilibria(&p)?,
        trap_ball: trap_ball_radius(&p),
    };
    emit_json(cfg, "equilibria", &report)
}

fn stability(cfg: &Config) -> Result<Outcome> {
    let reports = stability_reports(&params(cfg)?, tol_hyp(cfg)?)?;
    emit_json(cfg, "stability", &reports)
}

fn period2(cfg: &Config) -> Result<Outcome> {
    #[derive(Serialize)]
    struct Report {
        discriminant: Complex64,
        #[serde(skip_serializing_if = "Option::is_none")]
        no_cycle: Option<delaylog::period_two::NoCycleReason>,
        cycles: Vec<delaylog::period_two::PeriodTwoReport>,
    }
    let p = params(cfg)?;
    let tol = tol_hyp(cfg)?;
    let no_cycle = match period_two_cycles(&p)? {
        PeriodTwo::NoneExists { reason } => Some(reason),
        PeriodTwo::Cycles { .. } => None,
    };
    let report = Report {
        discriminant: period_two_discriminant(p.alpha),
        no_cycle,
        cycles: period_two_reports(&p, tol)?,
    };
    emit_json(cfg, "period2", &report)
}

fn detect_cycle(cfg: &Config) -> Result<Outcome> {
    let p = params(cfg)?;
    let (zm1, z0) = start(cfg)?;
    let p_max = cfg.p_max.unwrap_or(DEFAULT_P_MAX);
    let opts = DetectOptions {
        transient: cfg.transient.unwrap_or(QUICK_TRANSIENT),
        p_max,
        match_tol: cfg.match_tol.unwrap_or(DEFAULT_MATCH_TOL),
        window: cfg.window.unwrap_or(3 * p_max),
    };
    let iters = cfg.iters.unwrap_or(opts.transient + opts.required_tail());
    let spec = OrbitSpec::new(zm1, z0, iters).with_guard(guard(cfg)?);
    let report = detect_from(&p, &spec, &opts)?;
    match format(cfg, Format::Json) {
        Format::Json => emit(cfg, |w| io::write_json(&report, w))?,
        Format::Csv => emit(cfg, |w| io::write_points_csv(&report.representative_points, w))?,
    }
    Ok(Outcome::Done)
}

fn budgets(cfg: &Config) -> Result<Budgets> {
    let base = if cfg.quick.unwrap_or(false) {
        Budgets::quick()
    } else {
        Budgets::default()
    };
    let p_max = cfg.p_max.unwrap_or(base.p_max);
    let window = cfg.window.unwrap_or(if cfg.p_max.is_some() { 3 * p_max } else { base.window });
    Ok(Budgets {
        transient: cfg.transient.unwrap_or(base.transient),
        p_max,
        window,
        match_tol: positive(cfg.match_tol.unwrap_or(base.match_tol), "match-tol")?,
        lyapunov_steps: cfg.lyapunov_steps.unwrap_or(base.lyapunov_steps),
        chaos_tol: cfg.chaos_tol.unwrap_or(base.chaos_tol),
        guard_epsilon: guard(cfg)?,
    })
}

fn classify_cmd(cfg: &Config) -> Result<Outcome> {
    let p = params(cfg)?;
    let opts = ClassifyOptions::new(cfg.seeds.unwrap_or(10), cfg.seed.unwrap_or(0), budgets(cfg)?);
    let result = classify_parameter_point(&p, &opts)?;
    emit_json(cfg, "classify", &result)
}

fn lyapunov(cfg: &Config) -> Result<Outcome> {
    #[derive(Serialize)]
    struct Summary {
        lambda_max: f64,
        n_used: usize,
        renorm_interval: usize,
        verdict: LyapunovVerdict,
        max_modulus: f64,
    }
    let p = params(cfg)?;
    let (zm1, z0) = start(cfg)?;
    let transient = cfg.transient.unwrap_or(1000);
    let spec = OrbitSpec::new(zm1, z0, cfg.iters.unwrap_or(transient + 1_000_000))
        .with_transient(transient)
        .with_guard(guard(cfg)?);
    let defaults = LyapunovOptions::default();
    let opts = LyapunovOptions {
        renorm_interval: cfg.renorm.unwrap_or(defaults.renorm_interval),
        chaos_tol: cfg.chaos_tol.unwrap_or(defaults.chaos_tol),
        ..defaults
    };
    let report = largest_lyapunov(&p, &spec, &opts)?;
    if let Some(path) = &cfg.trace {
        let w = BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?);
        io::write_trace_csv(&report.running_estimates, w)?;
    }
    match format(cfg, Format::Json) {
        Format::Csv => emit(cfg, |w| io::write_trace_csv(&report.running_estimates, w))?,
        Format::Json => {
            let summary = Summary {
                lambda_max: report.lambda_max,
                n_used: report.n_used,
                renorm_interval: report.renorm_interval,
                verdict: report.verdict,
                max_modulus: report.max_modulus,
            };
            emit(cfg, |w| io::write_json(&summary, w))?
        }
    }
    Ok(Outcome::Done)
}

fn sweep(cfg: &Config) -> Result<Outcome> {
    let grid = GridSpec {
        re_min: require(&cfg.re_min, "re-min")?,
        re_max: require(&cfg.re_max, "re-max")?,
        re_steps: require(&cfg.re_steps, "re-steps")?,
        im_min: require(&cfg.im_min, "im-min")?,
        im_max: require(&cfg.im_max, "im-max")?,
        im_steps: require(&cfg.im_steps, "im-steps")?,
        fixed_other_parameter: require(&cfg.fixed, "fixed")?.0,
        target: cfg.target.unwrap_or(Target::Alpha).into(),
    };
    let workers = cfg
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let mut opts = SweepOptions::new(cfg.seeds.unwrap_or(10), budgets(cfg)?, cfg.seed.unwrap_or(0), workers);
    opts.max_cells = cfg.max_cells.unwrap_or(DEFAULT_CELL_BUDGET);
    let result = run_sweep(&grid, &opts)?;
    match format(cfg, Format::Csv) {
        Format::Csv => emit(cfg, |w| io::write_sweep_csv(&result, w))?,
        Format::Json => emit(cfg, |w| io::write_json(&result, w))?,
    }
    Ok(Outcome::Done)
}

fn print_outcome(outcome: &RecipeOutcome) {
    println!("{} {}", if outcome.passed { "PASS" } else { "FAIL" }, outcome.name);
    for c in &outcome.checks {
        let mark = match (c.gating, c.passed) {
            (false, _) => "info",
            (true, true) => "ok",
            (true, false) => "FAIL",
        };
        if c.expected.is_empty() {
            println!("  [{mark}] {}: {}", c.name, c.measured);
        } else {
            println!("  [{mark}] {}: {} (expected {})", c.name, c.measured, c.expected);
        }
    }
}

fn reproduce(name: &str, out: &Path) -> Result<Outcome> {
    let names: Vec<RecipeName> = if name == "all" {
        RecipeName::ALL.to_vec()
    } else {
        vec![name.parse()?]
    };
    let mut all_passed = true;
    for recipe in names {
        let outcome = reproduce_recipe(recipe, out)?;
        let summary = out.join(recipe.as_str()).join("summary.json");
        io::write_json(&outcome, BufWriter::new(File::create(&summary)?))?;
        print_outcome(&outcome);
        all_passed &= outcome.passed;
    }
    Ok(if all_passed { Outcome::Done } else { Outcome::ChecksFailed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_override_config() {
        let mut cfg = Config::from_json(r#"{"alpha": "2", "beta": "3", "p-max": 5}"#).unwrap();
        let params = ParamArgs {
            alpha: Some("1+i".parse().unwrap()),
            beta: None,
        };
        overlay!(cfg, params; alpha, beta);
        assert_eq!(cfg.alpha.unwrap().0, Complex64::new(1.0, 1.0));
        assert_eq!(cfg.beta.unwrap().0, Complex64::new(3.0, 0.0));
    }

    #[test]
    fn explicit_p_max_resizes_the_window() {
        let cfg = Config::from_json(r#"{"p-max": 10, "quick": true}"#).unwrap();
        let b = budgets(&cfg).unwrap();
        assert_eq!((b.p_max, b.window, b.transient), (10, 30, 1000));
    }
}
