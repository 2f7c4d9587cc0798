//! Command-line front end. Structured results go to stdout (or `--out`) as
//! JSON; failures go to stderr as `{"error": {"kind", "message"}}`.
//!
//! Exit codes: 0 success, 1 oracle disagreement or numerical failure,
//! 2 unreadable or invalid input, 3 unmet precondition.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use qlock::channels::falsify_free_observable;
use qlock::io::{
    parse_json, read_text, state_from_json, state_to_json, to_json_string, BipartiteObservableFile, ChannelFile,
    ObservableFile,
};
use qlock::locking::{
    observable_locking, oracle_compare, parse_alpha_range, purity_locking, purity_report, werner_sweep,
    write_sweep_csv, LockingMethod, SweepOptions,
};
use qlock::optim::OptimConfig;
use qlock::passive::BipartiteObservable;
use qlock::states::{is_cq, werner, DensityOperator, DEFAULT_CQ_TOL};
use qlock::QlockError;

/// Oracle disagreement above this fails `oracle-compare`.
const ORACLE_EXIT_TOL: f64 = 1e-5;

#[derive(Debug, Parser)]
#[command(name = "qlock", version, about = "Nonclassical-correlation quantifiers for bipartite states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Observable locking of a two-qubit state.
    Locking(LockingArgs),
    /// Discord and locking along the Werner family, as CSV.
    WernerSweep(SweepArgs),
    /// Classical-quantum certificate, with a locking cross-check for two qubits.
    CertifyCq(CertifyArgs),
    /// Mutual information and purity locking.
    Purity(PurityArgs),
    /// Agreement of the three locking routes on random states.
    OracleCompare(OracleArgs),
    /// Sampling falsifier for a channel claimed free under an observable.
    CheckChannel(ChannelArgs),
    /// Writes a Werner state in the state JSON schema.
    WernerState(WernerStateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OptimArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Scan size of the optimizer grid.
    #[arg(long = "grid-points")]
    pub grid_points: Option<usize>,
    /// Simplex diameter at which refinement stops.
    #[arg(long)]
    pub tol: Option<f64>,
}

impl OptimArgs {
    fn apply(&self, mut cfg: OptimConfig) -> OptimConfig {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(g) = self.grid_points {
            cfg.grid_points = g;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        cfg
    }

    fn sphere(&self) -> OptimConfig {
        self.apply(OptimConfig::default())
    }

    fn su2(&self) -> OptimConfig {
        self.apply(OptimConfig::su2_default())
    }
}

#[derive(Debug, Args)]
pub struct LockingArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// Observable file: `{"o1", "o2"}`, `{"levels"}` or `{"dim", "matrix"}` for the total.
    #[arg(long, conflicts_with_all = ["eps1", "eps2"])]
    pub observable: Option<PathBuf>,
    /// Gap of diag(0, ε₁) on the first qubit (default 1).
    #[arg(long)]
    pub eps1: Option<f64>,
    /// Gap of diag(0, ε₂) on the second qubit (default 2).
    #[arg(long)]
    pub eps2: Option<f64>,
    /// theorem3, corollary1 or bruteforce.
    #[arg(long, default_value = "theorem3")]
    pub method: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub optim: OptimArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// `start:stop:step` inside [0, 1].
    #[arg(long, default_value = "0:1:0.01")]
    pub alphas: String,
    #[arg(long, default_value_t = 2.0)]
    pub eps1: f64,
    #[arg(long, default_value_t = 2.0)]
    pub eps2: f64,
    /// CSV path; the manifest is written next to it as `<stem>.manifest.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also evaluate every row with the SU(2) oracle.
    #[arg(long)]
    pub bruteforce: bool,
    #[command(flatten)]
    pub optim: OptimArgs,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// Commutator tolerance, scaled by max(1, ‖ρ‖_F).
    #[arg(long, default_value_t = DEFAULT_CQ_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PurityArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// Fail with exit 3 instead of skipping when ρ₁ is not I/2.
    #[arg(long = "require-locking")]
    pub require_locking: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub optim: OptimArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long = "grid-points")]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long)]
    pub observable: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WernerStateArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn to_json(&self) -> String {
        to_json_string(&json!({"error": {"kind": self.kind, "message": self.message, "exit_code": self.code}}))
    }
}

impl From<QlockError> for CliError {
    fn from(e: QlockError) -> Self {
        let (code, kind) = match &e {
            QlockError::Parse(_) => (2, "parse"),
            QlockError::InvalidState(_) | QlockError::NotAState { .. } => (2, "invalid-state"),
            QlockError::NotHermitian { .. } => (2, "not-hermitian"),
            QlockError::DimensionMismatch { .. } | QlockError::LengthMismatch { .. } => (2, "dimension-mismatch"),
            QlockError::OutOfRange { .. } => (2, "out-of-range"),
            QlockError::BadProbs(_) | QlockError::BadBasis { .. } => (2, "invalid-input"),
            QlockError::NotPovm(_) | QlockError::NotUnitTrace { .. } | QlockError::NonOrthogonalPreps { .. } => {
                (2, "invalid-channel")
            }
            QlockError::NotUnitary { .. } => (2, "not-unitary"),
            QlockError::WrongDims { .. } => (3, "wrong-dims"),
            QlockError::DegenerateSpectrum { .. } => (3, "degenerate-spectrum"),
            QlockError::MarginalNotMixed { .. } | QlockError::MarginalsNotMixed { .. } => (3, "marginal-not-mixed"),
            QlockError::ChannelMismatch(_) => (3, "channel-mismatch"),
            QlockError::NoConvergence { .. } => (1, "no-convergence"),
        };
        Self {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub inputs: Vec<String>,
    pub config: Value,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub duration_seconds: f64,
}

struct Run {
    command: &'static str,
    inputs: Vec<String>,
    started: Instant,
}

impl Run {
    fn new(command: &'static str, inputs: &[&Path]) -> Self {
        Self {
            command,
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            started: Instant::now(),
        }
    }

    fn manifest(&self, config: Value, seed: Option<u64>) -> RunManifest {
        RunManifest {
            command: self.command,
            inputs: self.inputs.clone(),
            config,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            duration_seconds: self.started.elapsed().as_secs_f64(),
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| CliError {
            code: 2,
            kind: "io",
            message: format!("{}: {e}", p.display()),
        }),
        None => write_stdout(&format!("{text}\n")),
    }
}

/// A closed downstream pipe ends output quietly.
fn write_stdout(text: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError {
            code: 1,
            kind: "io",
            message: format!("stdout: {e}"),
        }),
        _ => Ok(()),
    }
}

fn load_state(path: &Path) -> CliResult<DensityOperator> {
    Ok(state_from_json(&read_text(path)?)?)
}

fn load_bipartite_observable(args: &LockingArgs, dims: (usize, usize)) -> CliResult<BipartiteObservable> {
    match &args.observable {
        Some(p) => Ok(parse_json::<BipartiteObservableFile>(&read_text(p)?)?.to_observable(dims)?),
        None => Ok(BipartiteObservable::from_gaps(args.eps1.unwrap_or(1.0), args.eps2.unwrap_or(2.0))?),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

pub fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Locking(a) => cmd_locking(a),
        Command::WernerSweep(a) => cmd_werner_sweep(a),
        Command::CertifyCq(a) => cmd_certify_cq(a),
        Command::Purity(a) => cmd_purity(a),
        Command::OracleCompare(a) => cmd_oracle_compare(a),
        Command::CheckChannel(a) => cmd_check_channel(a),
        Command::WernerState(a) => cmd_werner_state(a),
    }
}

fn cmd_locking(a: LockingArgs) -> CliResult<i32> {
    let mut inputs: Vec<&Path> = vec![&a.state];
    if let Some(p) = &a.observable {
        inputs.push(p);
    }
    let run = Run::new("locking", &inputs);
    let method: LockingMethod = a.method.parse()?;
    let rho = load_state(&a.state)?;
    rho.require_dims((2, 2))?;
    let bobs = load_bipartite_observable(&a, rho.dims())?;
    let cfg = match method {
        LockingMethod::BruteforceSu2 => a.optim.su2(),
        _ => a.optim.sphere(),
    };
    let report = observable_locking(&rho, &bobs, method, &cfg)?;
    let cert = is_cq(&rho, DEFAULT_CQ_TOL);
    let config = json!({
        "method": method.name(),
        "optimizer": to_value(&cfg),
        "levels": bobs.levels(),
        "observable": a.observable.as_ref().map(|p| p.display().to_string()),
    });
    let doc = json!({
        "manifest": to_value(&run.manifest(config, Some(cfg.seed))),
        "classical": cert.is_cq,
        "report": to_value(&report),
    });
    emit(a.out.as_deref(), &to_json_string(&doc))?;
    Ok(0)
}

fn sidecar_manifest_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "sweep".into());
    csv.with_file_name(format!("{stem}.manifest.json"))
}

fn cmd_werner_sweep(a: SweepArgs) -> CliResult<i32> {
    let run = Run::new("werner-sweep", &[]);
    let alphas = parse_alpha_range(&a.alphas)?;
    let opts = SweepOptions {
        eps1: a.eps1,
        eps2: a.eps2,
        bruteforce: a.bruteforce,
        sphere: a.optim.sphere(),
        su2: a.optim.su2(),
    };
    let rows = werner_sweep(&alphas, &opts)?;
    let mut csv = Vec::new();
    write_sweep_csv(&mut csv, &rows).expect("in-memory write");
    let csv = String::from_utf8(csv).expect("ASCII CSV");
    let config = json!({
        "alphas": a.alphas,
        "rows": rows.len(),
        "options": to_value(&opts),
    });
    let manifest = run.manifest(config, Some(opts.sphere.seed));
    match &a.out {
        Some(p) => {
            emit(Some(p), csv.trim_end())?;
            let doc = json!({"manifest": to_value(&manifest), "csv": p.display().to_string(), "rows": to_value(&rows)});
            emit(Some(&sidecar_manifest_path(p)), &to_json_string(&doc))?;
        }
        None => write_stdout(&csv)?,
    }
    Ok(0)
}

fn cmd_certify_cq(a: CertifyArgs) -> CliResult<i32> {
    let run = Run::new("certify-cq", &[&a.state]);
    let rho = load_state(&a.state)?;
    let cert = is_cq(&rho, a.tol);
    let locking = if rho.is_two_qubit() {
        let bobs = BipartiteObservable::from_gaps(1.0, 2.0)?;
        let r = observable_locking(&rho, &bobs, LockingMethod::Theorem3Grid, &OptimConfig::default())?;
        json!({"method": r.method.name(), "levels": r.e_asc, "value": r.value})
    } else {
        Value::Null
    };
    let doc = json!({
        "manifest": to_value(&run.manifest(json!({"tol": a.tol}), None)),
        "certificate": to_value(&cert),
        "locking": locking,
    });
    emit(a.out.as_deref(), &to_json_string(&doc))?;
    Ok(0)
}

fn cmd_purity(a: PurityArgs) -> CliResult<i32> {
    let run = Run::new("purity", &[&a.state]);
    let rho = load_state(&a.state)?;
    let cfg = a.optim.sphere();
    let report = if a.require_locking {
        purity_locking(&rho, &cfg)?
    } else {
        purity_report(&rho, &cfg)?
    };
    let config = json!({"optimizer": to_value(&cfg), "require_locking": a.require_locking});
    let doc = json!({
        "manifest": to_value(&run.manifest(config, Some(cfg.seed))),
        "report": to_value(&report),
    });
    emit(a.out.as_deref(), &to_json_string(&doc))?;
    Ok(0)
}

fn cmd_oracle_compare(a: OracleArgs) -> CliResult<i32> {
    let run = Run::new("oracle-compare", &[]);
    let optim = OptimArgs {
        seed: Some(a.seed),
        grid_points: a.grid_points,
        tol: None,
    };
    let (sphere, su2) = (optim.sphere(), optim.su2());
    let summary = oracle_compare(a.seed, a.samples, &sphere, &su2)?;
    let config = json!({"samples": a.samples, "sphere": to_value(&sphere), "su2": to_value(&su2), "exit_tol": ORACLE_EXIT_TOL});
    let doc = json!({
        "manifest": to_value(&run.manifest(config, Some(a.seed))),
        "summary": to_value(&summary),
    });
    emit(a.out.as_deref(), &to_json_string(&doc))?;
    Ok(if summary.max_deviation > ORACLE_EXIT_TOL { 1 } else { 0 })
}

fn cmd_check_channel(a: ChannelArgs) -> CliResult<i32> {
    let run = Run::new("check-channel", &[&a.channel, &a.observable]);
    let channel = parse_json::<ChannelFile>(&read_text(&a.channel)?)?.to_channel()?;
    let obs = parse_json::<ObservableFile>(&read_text(&a.observable)?)?.to_observable()?;
    let report = falsify_free_observable(&channel, &obs, a.samples, a.seed)?;
    let config = json!({"samples": a.samples, "flavor": to_value(&channel.flavor())});
    let doc = json!({
        "manifest": to_value(&run.manifest(config, Some(a.seed))),
        "free": report.passed,
        "report": to_value(&report),
    });
    emit(a.out.as_deref(), &to_json_string(&doc))?;
    Ok(0)
}

fn cmd_werner_state(a: WernerStateArgs) -> CliResult<i32> {
    let rho = werner(a.alpha)?;
    emit(a.out.as_deref(), &state_to_json(&rho))?;
    Ok(0)
}
