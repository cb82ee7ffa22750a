use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use qaoaforge::model::{format_bits, BruteForce, ProblemFile, DEFAULT_BRUTE_FORCE_CAP};
use qaoaforge::optimize::{optimize, Method, OptimizerConfig, Outcome, Plateau, Squash};
use qaoaforge::qaoa::{build_circuit, landscape_scan, CircuitOptions, Execution, LayerOrder};
use qaoaforge::sim::{trotter_error, DEFAULT_REFERENCE_STEPS};
use qaoaforge::verify::{run_suite, Suite};
use qaoaforge::{Error, Problem, RunRecord};

#[derive(Parser)]
#[command(name = "qaoaforge", version, about = "Exact statevector QAOA for QUBO/PUBO problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize QAOA angles for a problem file and write run artifacts.
    Solve(SolveArgs),
    /// Tabulate the single-layer energy landscape.
    Scan(ScanArgs),
    /// Run a built-in property suite.
    Verify(VerifyArgs),
    /// Enumerate all assignments and print the optimum set.
    Brute(BruteArgs),
    /// Trotterization error of the interpolating schedule for several p.
    Trotter(TrotterArgs),
}

#[derive(Args)]
struct ProblemArgs {
    /// Problem JSON file.
    #[arg(env = "QAOAFORGE_PROBLEM")]
    problem: PathBuf,
    /// Override p1 of every unbalanced penalty, including the knapsack capacity term.
    #[arg(long, env = "QAOAFORGE_P1")]
    p1: Option<f64>,
    /// Override p2 of every unbalanced penalty.
    #[arg(long, env = "QAOAFORGE_P2")]
    p2: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OptimizerArg {
    Spsa,
    Gd,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    CostFirst,
    MixerFirst,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExecutionArg {
    Fast,
    Gates,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, short = 'p', default_value_t = 1, env = "QAOAFORGE_LAYERS")]
    layers: usize,
    #[arg(long, value_enum, default_value_t = OptimizerArg::Spsa, env = "QAOAFORGE_OPTIMIZER")]
    optimizer: OptimizerArg,
    #[arg(long, default_value_t = 10, env = "QAOAFORGE_RESTARTS")]
    restarts: usize,
    #[arg(long, default_value_t = 2000, env = "QAOAFORGE_MAX_ITERS")]
    max_iters: usize,
    #[arg(long, default_value_t = 0, env = "QAOAFORGE_SEED")]
    seed: u64,
    /// 0 for exact expectations.
    #[arg(long, default_value_t = 0, env = "QAOAFORGE_SHOTS")]
    shots: u64,
    /// Optimize through the tanh squashing maps.
    #[arg(long, env = "QAOAFORGE_SQUASH")]
    squash: bool,
    /// Gradient-descent step size.
    #[arg(long, default_value_t = 0.1, env = "QAOAFORGE_LEARNING_RATE")]
    learning_rate: f64,
    /// Stop a restart when the best energy stalls for 50 iterations.
    #[arg(long, env = "QAOAFORGE_PLATEAU")]
    plateau: bool,
    /// Use the raw Hamiltonian instead of dividing by its largest coefficient.
    #[arg(long, env = "QAOAFORGE_NO_SCALE")]
    no_scale: bool,
    #[arg(long, value_enum, default_value_t = OrderArg::CostFirst, env = "QAOAFORGE_LAYER_ORDER")]
    layer_order: OrderArg,
    #[arg(long, value_enum, default_value_t = ExecutionArg::Fast, env = "QAOAFORGE_EXECUTION")]
    execution: ExecutionArg,
    /// Output directory, created if missing.
    #[arg(long, default_value = "qaoaforge-out", env = "QAOAFORGE_OUT")]
    out: PathBuf,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value_t = 51, env = "QAOAFORGE_RESOLUTION")]
    resolution: usize,
    /// Range for both angles as `lo,hi`.
    #[arg(long, value_parser = parse_range, default_value = "-3.141592653589793,3.141592653589793", env = "QAOAFORGE_RANGE")]
    range: (f64, f64),
    /// Separate β range, overriding --range.
    #[arg(long, value_parser = parse_range, env = "QAOAFORGE_BETA_RANGE")]
    beta_range: Option<(f64, f64)>,
    /// Separate γ range, overriding --range.
    #[arg(long, value_parser = parse_range, env = "QAOAFORGE_GAMMA_RANGE")]
    gamma_range: Option<(f64, f64)>,
    #[arg(long, env = "QAOAFORGE_NO_SCALE")]
    no_scale: bool,
    #[arg(long, default_value = "landscape.csv", env = "QAOAFORGE_OUT")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite to run; all suites when omitted.
    #[arg(long, value_enum, env = "QAOAFORGE_SUITE")]
    suite: Option<SuiteArg>,
    #[arg(long, default_value_t = 0, env = "QAOAFORGE_SEED")]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Gates,
    Symmetry,
    Trotter,
    Oracle,
}

#[derive(Args)]
struct BruteArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_CAP, env = "QAOAFORGE_CAP")]
    cap: usize,
    /// Print the result as JSON.
    #[arg(long, env = "QAOAFORGE_JSON")]
    json: bool,
}

#[derive(Args)]
struct TrotterArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, value_delimiter = ',', default_value = "4,8,16,32,64", env = "QAOAFORGE_STEPS")]
    steps: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_REFERENCE_STEPS, env = "QAOAFORGE_REFERENCE_STEPS")]
    reference_steps: usize,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected lo,hi")?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

/// Failure with the process exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self::new(2, format!("{}: {e}", path.display()))
    }
}

/// 2 for bad input, 3 for size caps, 4 for a failed optimization.
fn input_failure(e: Error) -> Failure {
    match e {
        Error::TooLarge { .. } => Failure::new(3, e.to_string()),
        _ => Failure::new(2, e.to_string()),
    }
}

fn optimizer_failure(e: Error) -> Failure {
    match e {
        Error::TooLarge { .. } => Failure::new(3, e.to_string()),
        _ => Failure::new(4, e.to_string()),
    }
}

struct Loaded {
    path: PathBuf,
    sha256: String,
    file: ProblemFile,
    problem: Problem,
    exact: bool,
    slack_vars: usize,
}

fn load(args: &ProblemArgs) -> Result<Loaded, Failure> {
    let bytes = fs::read(&args.problem).map_err(|e| Failure::io(&args.problem, e))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|e| Failure::new(2, format!("{}: {e}", args.problem.display())))?;
    let mut file = ProblemFile::from_json(&text)
        .map_err(|e| Failure::new(2, format!("{}: {e}", args.problem.display())))?;
    file.override_unbalanced(args.p1, args.p2);
    let penalized = file.build_penalized().map_err(input_failure)?;
    Ok(Loaded {
        path: args.problem.clone(),
        sha256: hex::encode(Sha256::digest(&bytes)),
        file,
        slack_vars: penalized.slack_vars.len(),
        exact: penalized.exact,
        problem: penalized.problem,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

#[derive(Serialize)]
struct ProblemEcho {
    path: String,
    sha256: String,
    kind: &'static str,
    num_vars: usize,
    slack_vars: usize,
    penalties_exact: bool,
    p1_override: Option<f64>,
    p2_override: Option<f64>,
}

#[derive(Serialize)]
struct CircuitEcho {
    scaled: bool,
    k_scale: f64,
    layer_order: LayerOrder,
    execution: Execution,
    dropped_constant: f64,
}

#[derive(Serialize)]
struct RunManifest {
    tool: &'static str,
    version: &'static str,
    problem: ProblemEcho,
    circuit: CircuitEcho,
    layers: usize,
    config: OptimizerConfig,
    started_unix: f64,
    finished_unix: f64,
    wall_time_s: f64,
}

fn histogram_csv(outcomes: &[Outcome]) -> String {
    let mut rows: Vec<&Outcome> = outcomes.iter().collect();
    rows.sort_by(|a, b| a.objective.total_cmp(&b.objective).then(a.z.cmp(&b.z)));
    let mut out = String::from("z,bits,assignment,objective,probability,count\n");
    for o in rows {
        let count = o.count.map(|c| c.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{},{},{count}", o.z, o.bits, o.assignment, o.objective, o.probability).unwrap();
    }
    out
}

fn trace_csv(run: &RunRecord) -> String {
    let mut out = String::from("restart,iter,energy\n");
    for r in &run.restarts {
        for (i, e) in r.trace.iter().enumerate() {
            writeln!(out, "{},{},{e}", r.restart, i + 1).unwrap();
        }
    }
    out
}

fn solve(args: SolveArgs) -> Result<(), Failure> {
    let started = unix_now();
    let clock = Instant::now();
    let loaded = load(&args.problem)?;
    let options = CircuitOptions {
        scale: !args.no_scale,
        layer_order: match args.layer_order {
            OrderArg::CostFirst => LayerOrder::UfThenUi,
            OrderArg::MixerFirst => LayerOrder::UiThenUf,
        },
        execution: match args.execution {
            ExecutionArg::Fast => Execution::FastDiagonal,
            ExecutionArg::Gates => Execution::GateDecomposed,
        },
    };
    let spec = build_circuit(&loaded.problem.to_spin(), options).map_err(input_failure)?;
    let mut config = OptimizerConfig {
        method: match args.optimizer {
            OptimizerArg::Spsa => Method::Spsa,
            OptimizerArg::Gd => Method::GradientDescent,
        },
        max_iters: args.max_iters,
        restarts: args.restarts,
        seed: args.seed,
        squash: if args.squash { Squash::Tanh } else { Squash::None },
        shots: args.shots,
        plateau: args.plateau.then(Plateau::default),
        ..OptimizerConfig::default()
    };
    config.gd.learning_rate = args.learning_rate;
    config.validate().map_err(input_failure)?;
    let run = optimize(&spec, args.layers, &config).map_err(optimizer_failure)?;

    fs::create_dir_all(&args.out).map_err(|e| Failure::io(&args.out, e))?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        problem: ProblemEcho {
            path: loaded.path.display().to_string(),
            sha256: loaded.sha256,
            kind: loaded.file.kind_name(),
            num_vars: loaded.problem.num_vars(),
            slack_vars: loaded.slack_vars,
            penalties_exact: loaded.exact,
            p1_override: args.problem.p1,
            p2_override: args.problem.p2,
        },
        circuit: CircuitEcho {
            scaled: options.scale,
            k_scale: spec.k_scale(),
            layer_order: spec.layer_order(),
            execution: spec.execution(),
            dropped_constant: spec.raw_hamiltonian().constant(),
        },
        layers: args.layers,
        config,
        started_unix: started,
        finished_unix: unix_now(),
        wall_time_s: clock.elapsed().as_secs_f64(),
    };
    write(&args.out.join("manifest.json"), &to_json(&manifest))?;
    write(&args.out.join("run.json"), &to_json(&run))?;
    write(&args.out.join("histogram.csv"), &histogram_csv(&run.histogram))?;
    write(&args.out.join("trace.csv"), &trace_csv(&run))?;

    println!("best assignment {} (objective {})", run.best.assignment, run.best.objective);
    println!(
        "probability {:.6}, expected objective {:.6}, restart {}",
        run.best.probability, run.best_energy.objective, run.best_restart
    );
    if !loaded.exact {
        println!("note: an inexact penalty is in use; check feasibility of the assignment");
    }
    println!("artifacts in {}", args.out.display());
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("artifact serializes") + "\n"
}

fn scan(args: ScanArgs) -> Result<(), Failure> {
    let loaded = load(&args.problem)?;
    let options = CircuitOptions {
        scale: !args.no_scale,
        ..CircuitOptions::default()
    };
    let spec = build_circuit(&loaded.problem.to_spin(), options).map_err(input_failure)?;
    let id = loaded
        .path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let grid = landscape_scan(
        &spec,
        args.resolution,
        args.beta_range.unwrap_or(args.range),
        args.gamma_range.unwrap_or(args.range),
        &id,
    )
    .map_err(input_failure)?;
    write(&args.out, &grid.to_csv())?;
    println!(
        "{}x{} grid ({}) written to {}",
        grid.beta_axis.len(),
        grid.gamma_axis.len(),
        if args.no_scale { "raw" } else { "scaled" },
        args.out.display()
    );
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let suites: Vec<Suite> = match args.suite {
        None => Suite::ALL.to_vec(),
        Some(SuiteArg::Gates) => vec![Suite::Gates],
        Some(SuiteArg::Symmetry) => vec![Suite::Symmetry],
        Some(SuiteArg::Trotter) => vec![Suite::Trotter],
        Some(SuiteArg::Oracle) => vec![Suite::Oracle],
    };
    let mut failed = 0;
    for suite in suites {
        println!("[{}]", suite.name());
        let checks = run_suite(suite, args.seed).map_err(|e| Failure::new(1, e.to_string()))?;
        for c in checks {
            failed += usize::from(!c.passed);
            println!("  {c}");
        }
    }
    if failed > 0 {
        return Err(Failure::new(1, format!("{failed} check(s) failed")));
    }
    Ok(())
}

#[derive(Serialize)]
struct BruteReport {
    num_vars: usize,
    best_cost: f64,
    optimum: Vec<String>,
}

fn brute(args: BruteArgs) -> Result<(), Failure> {
    let loaded = load(&args.problem)?;
    let result = BruteForce::with_cap(args.cap)
        .solve(&loaded.problem)
        .map_err(input_failure)?;
    let report = BruteReport {
        num_vars: result.n,
        best_cost: result.best_cost,
        optimum: result.optimum_set.iter().map(|&x| format_bits(x, result.n)).collect(),
    };
    if args.json {
        print!("{}", to_json(&report));
    } else {
        println!("cost {}", report.best_cost);
        println!("{} optimal assignment(s), variable 0 right-most:", report.optimum.len());
        for s in &report.optimum {
            println!("  {s}");
        }
    }
    Ok(())
}

fn trotter(args: TrotterArgs) -> Result<(), Failure> {
    let loaded = load(&args.problem)?;
    let h = loaded.problem.to_spin();
    println!("p,error");
    for &p in &args.steps {
        let err = trotter_error(&h, p, args.reference_steps).map_err(input_failure)?;
        println!("{p},{err:.6e}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Scan(a) => scan(a),
        Command::Verify(a) => verify(a),
        Command::Brute(a) => brute(a),
        Command::Trotter(a) => trotter(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
