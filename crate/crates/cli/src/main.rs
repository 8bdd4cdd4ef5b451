use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sepball::bounds::{qubit_asymptotic_exponent, radius_report, RadiusMethod, RadiusReport};
use sepball::certify::{certify_normalized, certify_unnormalized, ppt_all_cuts, Certificate, Verdict};
use sepball::linalg::{read_matrix_file, DimsProfile, HermitianMatrix, MatrixFile};
use sepball::nmr::{threshold_report, Baseline, Mode, ThresholdReport, DEFAULT_ETA};
use sepball::schur::{l_matrix, oracle_two_inf_norm, schur_two_inf_norm, DEFAULT_RESTARTS, SIMPLEX_QP_CAP};
use sepball::verify::{run_suite, Suite, SuiteReport};

mod format;

use format::sig;

const DEFAULT_SEED: u64 = 0xB0B5;

/// Separable-ball radii, certificates and checks.
#[derive(Debug, Parser)]
#[command(name = "sepball", version)]
struct Cli {
    /// Seed for every sampled quantity.
    #[arg(long, global = true, env = "SEPBALL_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Human)]
    format: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Human,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Radius table for a list of local dimensions.
    Bound(BoundArgs),
    /// Certify a matrix file.
    Certify(CertifyArgs),
    /// The 2->inf norm of a Schur multiplier.
    SchurNorm(SchurArgs),
    /// Qubit counts up to which NMR states are certified separable.
    Nmr(NmrArgs),
    /// Run the invariant suite.
    Verify {
        #[arg(value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
    },
    /// Write a sample matrix file to stdout.
    ExampleState(ExampleArgs),
}

#[derive(Debug, Args)]
struct BoundArgs {
    /// Local dimensions, folded left to right.
    #[arg(required_unless_present = "qubits", conflicts_with = "qubits")]
    dims: Vec<usize>,
    /// Shorthand for `m` parties of dimension 2.
    #[arg(long, value_name = "M")]
    qubits: Option<usize>,
    /// Fold the dimensions in ascending order.
    #[arg(long)]
    sorted: bool,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    file: PathBuf,
    /// Treat the matrix as a density matrix (default).
    #[arg(long, conflicts_with = "unnormalized")]
    normalized: bool,
    /// Compare `||X - I||_2` against the unnormalized radius.
    #[arg(long)]
    unnormalized: bool,
    /// Also run the partial-transpose test on every bipartite cut.
    #[arg(long)]
    ppt: bool,
}

#[derive(Debug, Args)]
struct SchurArgs {
    #[arg(required_unless_present = "l_matrix", conflicts_with = "l_matrix")]
    file: Option<PathBuf>,
    /// Use `L(eta, n)`: ones on the diagonal, `eta` elsewhere.
    #[arg(long, num_args = 2, value_names = ["ETA", "N"])]
    l_matrix: Option<Vec<String>>,
    /// Skip the exact solver and report the ascent oracle alone.
    #[arg(long)]
    oracle_only: bool,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
}

#[derive(Debug, Args)]
struct NmrArgs {
    #[arg(long, default_value_t = DEFAULT_ETA)]
    eta: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Pseudopure)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = BaselineArg::Recursion)]
    baseline: BaselineArg,
}

#[derive(Debug, Args)]
struct ExampleArgs {
    #[arg(value_enum)]
    kind: ExampleKind,
    /// Local dimensions for `maximally-mixed`.
    #[arg(long, value_delimiter = ',', default_value = "2,2")]
    dims: Vec<usize>,
    /// Singlet weight for `werner`.
    #[arg(long, default_value_t = 0.25)]
    weight: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExampleKind {
    MaximallyMixed,
    Bell,
    Werner,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Fast,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Thermal,
    Pseudopure,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BaselineArg {
    Recursion,
    Gb03,
}

/// Failure carrying its exit code.
struct Exit(u8, String);

impl From<sepball::Error> for Exit {
    fn from(e: sepball::Error) -> Self {
        Exit(2, e.to_string())
    }
}

type CmdResult = Result<u8, Exit>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Output(cli.format);
    let result = match cli.command {
        Command::Bound(args) => cmd_bound(args, out),
        Command::Certify(args) => cmd_certify(args, out),
        Command::SchurNorm(args) => cmd_schur_norm(args, cli.seed, out),
        Command::Nmr(args) => cmd_nmr(args, out),
        Command::Verify { suite } => cmd_verify(suite, cli.seed, out),
        Command::ExampleState(args) => cmd_example_state(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

#[derive(Clone, Copy)]
struct Output(OutputFormat);

impl Output {
    fn json(self) -> bool {
        self.0 == OutputFormat::Json
    }

    fn emit<T: Serialize>(self, value: &T, human: impl FnOnce()) {
        if self.json() {
            println!("{}", serde_json::to_string_pretty(value).expect("output serializes"));
        } else {
            human();
        }
    }
}

#[derive(Serialize)]
struct BoundOutput {
    reports: Vec<RadiusReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    qubit_exponent: Option<f64>,
}

fn cmd_bound(args: BoundArgs, out: Output) -> CmdResult {
    let dims = match args.qubits {
        Some(m) => DimsProfile::qubits(m)?,
        None => DimsProfile::new(args.dims)?,
    };
    let dims = if args.sorted { dims.sorted() } else { dims };
    if dims.parties() < 2 {
        return Err(Exit(2, "need at least two parties".into()));
    }
    let reports: Vec<RadiusReport> = RadiusMethod::ALL
        .iter()
        .filter_map(|&method| radius_report(&dims, method).ok())
        .collect();
    let qubit_exponent = (dims.homogeneous() == Some(2)).then(qubit_asymptotic_exponent);
    let result = BoundOutput { reports, qubit_exponent };
    out.emit(&result, || {
        println!("dims {dims}");
        println!("{:<16} {:>16} {:>16}", "method", "unnormalized", "normalized");
        for r in &result.reports {
            println!(
                "{:<16} {:>16} {:>16}",
                format::method_name(r.method),
                sig(r.unnormalized_radius),
                sig(r.normalized_radius)
            );
        }
        if let Some(g) = result.qubit_exponent {
            println!("qubit exponent gamma {}", sig(g));
        }
    });
    Ok(0)
}

#[derive(Serialize)]
struct CertifyOutput {
    #[serde(flatten)]
    certificate: Certificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    ppt: Option<bool>,
}

fn cmd_certify(args: CertifyArgs, out: Output) -> CmdResult {
    let (h, dims) = read_matrix_file(&args.file)?;
    let certificate = if args.unnormalized {
        certify_unnormalized(&h, &dims)?
    } else {
        certify_normalized(&h, &dims)?
    };
    let ppt = if args.ppt { Some(ppt_all_cuts(&h, &dims)?) } else { None };
    let code = match certificate.verdict {
        Verdict::Separable => 0,
        Verdict::Inconclusive => 3,
        Verdict::NotPsd | Verdict::NotNormalized => 4,
    };
    let result = CertifyOutput { certificate, ppt };
    out.emit(&result, || {
        let c = &result.certificate;
        println!("verdict  {}", c.verdict);
        println!("dims     {}", c.dims);
        println!("measured {}", sig(c.measured));
        println!("bound    {}", sig(c.bound_used));
        println!("margin   {}{}", sig(c.margin), if c.boundary { " (boundary)" } else { "" });
        if let Some(p) = result.ppt {
            println!("ppt      {}", if p { "pass on every cut" } else { "violated" });
        }
    });
    Ok(code)
}

#[derive(Serialize)]
struct SchurOutput {
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<f64>,
    oracle: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap: Option<f64>,
}

fn parse_l_matrix(v: &[String]) -> Result<HermitianMatrix, Exit> {
    let eta: f64 = v[0].parse().map_err(|_| Exit(2, format!("bad ETA {:?}", v[0])))?;
    let n: usize = v[1].parse().map_err(|_| Exit(2, format!("bad N {:?}", v[1])))?;
    if n == 0 || !eta.is_finite() {
        return Err(Exit(2, "need finite ETA and N >= 1".into()));
    }
    Ok(l_matrix(eta, n))
}

fn cmd_schur_norm(args: SchurArgs, seed: u64, out: Output) -> CmdResult {
    let b = match (&args.l_matrix, &args.file) {
        (Some(v), _) => parse_l_matrix(v)?,
        (None, Some(path)) => read_matrix_file(path)?.0,
        (None, None) => unreachable!("clap requires one source"),
    };
    let n = b.dim();
    if n > SIMPLEX_QP_CAP && !args.oracle_only {
        return Err(Exit(
            2,
            format!("exact solver is limited to n <= {SIMPLEX_QP_CAP}, got {n}; pass --oracle-only"),
        ));
    }
    let exact = if args.oracle_only { None } else { Some(schur_two_inf_norm(&b)?) };
    let oracle = oracle_two_inf_norm(&b, args.restarts, seed)?;
    let result = SchurOutput {
        n,
        exact,
        oracle,
        gap: exact.map(|e| e - oracle),
    };
    out.emit(&result, || {
        if let Some(e) = result.exact {
            println!("exact  {}", sig(e));
        }
        println!("oracle {}", sig(result.oracle));
        if let Some(g) = result.gap {
            println!("gap    {}", sig(g));
        }
    });
    Ok(0)
}

#[derive(Serialize)]
struct NmrOutput {
    report: ThresholdReport,
    gb03: ThresholdReport,
}

fn cmd_nmr(args: NmrArgs, out: Output) -> CmdResult {
    if !(args.eta > 0.0 && args.eta < 0.1) {
        return Err(Exit(2, format!("--eta must lie in (0, 0.1), got {}", args.eta)));
    }
    let mode = match args.mode {
        ModeArg::Thermal => Mode::Thermal,
        ModeArg::Pseudopure => Mode::Pseudopure,
    };
    let baseline = match args.baseline {
        BaselineArg::Recursion => Baseline::Recursion,
        BaselineArg::Gb03 => Baseline::Gb03,
    };
    let result = NmrOutput {
        report: threshold_report(mode, args.eta, baseline)?,
        gb03: threshold_report(mode, args.eta, Baseline::Gb03)?,
    };
    out.emit(&result, || {
        let r = &result.report;
        println!("mode {} baseline {} eta {}", r.mode, r.baseline, sig(r.eta));
        println!("threshold {}", r.threshold);
        for p in [&r.at_threshold, &r.first_uncertified] {
            println!(
                "m = {:>3}  distance {}  bound {}  relative margin {}",
                p.m,
                sig(p.measured),
                sig(p.bound),
                sig(p.relative_margin())
            );
        }
        println!("entanglement not certified possible until {}", r.threshold + 1);
        println!("gb03 baseline threshold {}", result.gb03.threshold);
    });
    Ok(0)
}

fn cmd_verify(suite: SuiteArg, seed: u64, out: Output) -> CmdResult {
    let suite = match suite {
        SuiteArg::All => Suite::All,
        SuiteArg::Fast => Suite::Fast,
    };
    let report: SuiteReport = run_suite(suite, seed);
    out.emit(&report, || {
        for r in &report.results {
            let status = if r.passed { "PASS" } else { "FAIL" };
            println!("{status} {:<40} {:>10.2?}", r.name, r.elapsed);
            if !r.passed {
                println!("     {}", r.detail);
            }
        }
        let failed = report.failures().count();
        println!("{} properties, {failed} failed", report.results.len());
    });
    Ok(if report.passed() { 0 } else { 1 })
}

fn cmd_example_state(args: ExampleArgs) -> CmdResult {
    let (h, dims) = match args.kind {
        ExampleKind::MaximallyMixed => {
            let dims = DimsProfile::new(args.dims)?;
            let d = dims.materializable_dim()?;
            (HermitianMatrix::identity(d).scale(1.0 / d as f64), dims)
        }
        ExampleKind::Bell => (format::bell(), DimsProfile::qubits(2)?),
        ExampleKind::Werner => {
            if !(0.0..=1.0).contains(&args.weight) {
                return Err(Exit(2, "--weight must lie in [0, 1]".into()));
            }
            let w = format::bell()
                .scale(args.weight)
                .try_add(&HermitianMatrix::identity(4).scale((1.0 - args.weight) / 4.0))?;
            (w, DimsProfile::qubits(2)?)
        }
    };
    println!("{}", MatrixFile::from_hermitian(&h, &dims)?.to_json());
    Ok(0)
}
