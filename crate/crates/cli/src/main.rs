//! `tprod`: tensor operations on `.json` / `.t3b` files and the
//! bound-verification harness.
//!
//! Exit codes: 0 success, 1 operation failure or bound violation, 2 usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tprod_core::experiment::{ExperimentConfig, ExperimentDims, ReportFormat, Theorem};
use tprod_core::generate::{gaussian, random_rank_profile, rng_from_seed, well_conditioned, with_multirank};
use tprod_core::io::{read_tensor, to_json, write_tensor};
use tprod_core::{
    build_smw_factors, check_smw_conditions, construct_conditioned_instance, inv, lstsq_min_norm, multirank, pinv_with_tol, run_experiment,
    smw_inverse, smw_pinv, solve_exact, tprod, InstanceFamily, SmwDims, Tensor3, TensorError,
};

const THREADS_ENV: &str = "TPROD_THREADS";

const BOUNDS_HELP: &str = "\
Runs one perturbation-bound calculator over seeded random instances and
reports one row per trial.

Trial t uses sub-seed SplitMix64(seed + (t + 1) * 0x9E3779B97F4A7C15) to seed
a ChaCha20 stream, so any trial can be replayed alone. Output is identical for
any TPROD_THREADS setting.

CSV columns:
  trial          trial index, 0-based
  seed           the trial's sub-seed
  applicability  Applicable, or HypothesisViolated: <reason>
  bound_f        bound on the Frobenius-norm relative error
  actual_f       observed Frobenius-norm relative error
  ratio_f        actual_f / bound_f
  bound_2        bound on the spectral-norm relative error
  actual_2       observed spectral-norm relative error
  ratio_2        actual_2 / bound_2
  holds_f        actual_f <= bound_f (1 + 1e-9) + 1e-12
  holds_2        same for the spectral norm
  kappa_f        ||A||_F ||A^+||_F (or ^-1)
  kappa_2        ||A||_2 ||A^+||_2
  gamma_f        1 - ||A^+||_F ||E||_F, where the bound uses it
  gamma_2        1 - ||A^+||_2 ||E||_2, where the bound uses it
  mu, lambda     multirank case constants, where the bound uses them
  extras_hold    every secondary inequality of the calculator held

Floats have 17 significant digits. The last line is
  # summary theorem=.. trials=.. applicable=.. hypothesis_violations=..
    bound_violations=.. max_ratio_f=.. max_ratio_2=..

For SMW_INV and SMW_PINV the bound columns hold the agreement tolerance
(1e-9, 1e-8) and the actual columns the relative discrepancy from the
direct computation.

Exit status is 1 if an Applicable trial violates a bound, or with --strict if
any trial violates a hypothesis.";

#[derive(Parser)]
#[command(name = "tprod", version, about = "Third-order tensor algebra under the t-product")]
#[command(after_help = "Tensor files: .t3b is binary (u32 LE dims, then f64 LE data, slice-major); anything else is JSON {\"dims\":[n1,n2,n3],\"data\":[...]}.\nResults go to --out, or to stdout as JSON.\nTPROD_THREADS caps the worker threads.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Out {
    /// Output tensor file; stdout as JSON when absent
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// A * B
    Tprod {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Tensor transpose: transpose each frontal slice, reverse slices 2..n3
    Transpose {
        a: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Inverse of a square tensor; fails naming the first singular Fourier face
    Inv {
        a: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Moore-Penrose inverse
    Pinv {
        a: PathBuf,
        /// Singular-value cutoff; default max(n1, n2) * n3 * eps * ||A||_2
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: Out,
    },
    /// Per-face ranks of the Fourier faces, as JSON
    Multirank {
        a: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Exact solution of A * X = D; exit 1 if the system is inconsistent
    Solve {
        a: PathBuf,
        d: PathBuf,
        /// Free tensor Y in A^+ * D + (I - A^+ * A) * Y
        #[arg(long)]
        free: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
    /// Minimal-norm least-squares solution A^+ * B
    Lstsq {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// (A + U*B*V)^-1 through the Sherman-Morrison-Woodbury formula
    SmwInv {
        a: PathBuf,
        u: PathBuf,
        b: PathBuf,
        v: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// (A + U*B*V)^+ through the SMW formula; exit 1 if its conditions fail
    SmwPinv {
        a: PathBuf,
        u: PathBuf,
        b: PathBuf,
        v: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Bound-verification experiment
    #[command(long_about = BOUNDS_HELP)]
    Bounds(BoundsArgs),
    /// Seeded random or structured tensors
    Gen(GenArgs),
}

#[derive(Args)]
struct BoundsArgs {
    /// JSON ExperimentConfig; flags given alongside override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// T3_1 T3_2 T3_3 T4_1 T4_2 T4_3 T4_4 T5_2 SMW_INV SMW_PINV
    #[arg(long)]
    theorem: Option<String>,
    /// n1,n2,n3[,n4]; n4 is the right-hand-side width (default 2)
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Relative perturbation size
    #[arg(long)]
    scale: Option<f64>,
    /// Fixed multirank r0,r1,..., conjugate-symmetric
    #[arg(long)]
    rank_profile: Option<String>,
    /// Report file; stdout when absent
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Exit 1 on hypothesis violations too
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Gaussian,
    WellConditioned,
    Multirank,
    Identity,
    /// Writes <stem>_A, _U, _B, _V satisfying the SMW conditions
    SmwInstance,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Lifted,
    Trivial,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "gaussian")]
    kind: GenKind,
    /// n1,n2,n3
    #[arg(long)]
    dims: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Multirank for --kind multirank; random when absent
    #[arg(long)]
    ranks: Option<String>,
    /// Update width for --kind smw-instance
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, value_enum, default_value = "lifted")]
    family: Family,
    #[command(flatten)]
    out: Out,
}

enum Failure {
    Usage(String),
    Op(String),
}

impl From<TensorError> for Failure {
    fn from(e: TensorError) -> Self {
        Failure::Op(e.to_string())
    }
}

type CliResult<T = ExitCode> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let result = configure_threads().and_then(|()| run(cli.command));
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Op(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Op(format!("thread pool: {e}")))
}

fn load(path: &Path) -> CliResult<Tensor3> {
    read_tensor(path).map_err(|e| Failure::Op(format!("{}: {e}", path.display())))
}

fn emit(t: &Tensor3, out: &Out) -> CliResult {
    match &out.out {
        Some(p) => write_tensor(p, t).map_err(|e| Failure::Op(format!("{}: {e}", p.display())))?,
        None => println!("{}", to_json(t)),
    }
    Ok(ExitCode::SUCCESS)
}

fn usage<T, E: std::fmt::Display>(r: Result<T, E>) -> CliResult<T> {
    r.map_err(|e| Failure::Usage(e.to_string()))
}

fn parse_list(s: &str, what: &str) -> CliResult<Vec<usize>> {
    s.split(',').map(|p| p.trim().parse::<usize>().map_err(|e| Failure::Usage(format!("{what} {s:?}: {e}")))).collect()
}

fn run(cmd: Command) -> CliResult {
    match cmd {
        Command::Tprod { a, b, out } => emit(&tprod(&load(&a)?, &load(&b)?)?, &out),
        Command::Transpose { a, out } => emit(&load(&a)?.transpose(), &out),
        Command::Inv { a, out } => emit(&inv(&load(&a)?)?, &out),
        Command::Pinv { a, tol, out } => emit(&pinv_with_tol(&load(&a)?, tol), &out),
        Command::Multirank { a, tol } => {
            let r = multirank(&load(&a)?, tol);
            println!("{}", serde_json::to_string(&r).expect("ranks serialize"));
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { a, d, free, out } => {
            let y = free.as_deref().map(load).transpose()?;
            let s = solve_exact(&load(&a)?, &load(&d)?, y.as_ref())?;
            if !s.consistent {
                return Err(Failure::Op(format!("A * X = D is inconsistent: relative residual {:e}", s.consistency_residual)));
            }
            emit(&s.solution, &out)
        }
        Command::Lstsq { a, b, out } => emit(&lstsq_min_norm(&load(&a)?, &load(&b)?)?, &out),
        Command::SmwInv { a, u, b, v, out } => emit(&smw_inverse(&load(&a)?, &load(&u)?, &load(&b)?, &load(&v)?)?, &out),
        Command::SmwPinv { a, u, b, v, out } => {
            let a = load(&a)?;
            let f = build_smw_factors(&a, &load(&u)?, &load(&b)?, &load(&v)?)?;
            let report = check_smw_conditions(&f)?;
            if !report.satisfied {
                for c in &report.residuals {
                    eprintln!("  {:<32} residual {:e}", c.name, c.residual);
                }
            }
            emit(&smw_pinv(&a, &f)?, &out)
        }
        Command::Bounds(args) => bounds(args),
        Command::Gen(args) => gen(args),
    }
}

fn bounds(args: BoundsArgs) -> CliResult {
    let mut cfg = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str::<ExperimentConfig>(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?
        }
        None => {
            let missing = |f: &str| Failure::Usage(format!("--{f} is required without --config"));
            let theorem = usage(args.theorem.as_deref().ok_or_else(|| missing("theorem"))?.parse::<Theorem>())?;
            let dims = usage(ExperimentDims::parse(args.dims.as_deref().ok_or_else(|| missing("dims"))?))?;
            ExperimentConfig::new(theorem, dims, args.trials.unwrap_or(100), args.seed.unwrap_or(0), args.scale.unwrap_or(1e-3))
        }
    };
    if args.config.is_some() {
        if let Some(t) = &args.theorem {
            cfg.theorem = usage(t.parse())?;
        }
        if let Some(d) = &args.dims {
            cfg.dims = usage(ExperimentDims::parse(d))?;
        }
        cfg.trials = args.trials.unwrap_or(cfg.trials);
        cfg.seed = args.seed.unwrap_or(cfg.seed);
        cfg.scale = args.scale.unwrap_or(cfg.scale);
    }
    if let Some(r) = &args.rank_profile {
        cfg.rank_profile = Some(parse_list(r, "rank profile")?);
    }
    if let Some(o) = &args.out {
        cfg.output = Some(o.clone());
    }
    if let Some(f) = &args.format {
        cfg.format = usage(f.parse::<ReportFormat>())?;
    }
    usage(cfg.validate())?;

    let report = run_experiment(&cfg)?;
    let text = report.render();
    match &cfg.output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Op(format!("{}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    let s = &report.summary;
    eprintln!(
        "{}: {} trials, {} applicable, {} hypothesis violations, {} bound violations, max ratio {:.3e}",
        cfg.theorem,
        s.trials,
        s.applicable,
        s.hypothesis_violations,
        s.bound_violations,
        s.max_ratio()
    );
    let failed = s.bound_violations > 0 || (args.strict && s.hypothesis_violations > 0);
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn gen(args: GenArgs) -> CliResult {
    let d = parse_list(&args.dims, "dims")?;
    let [n1, n2, n3] = d[..] else {
        return Err(Failure::Usage(format!("--dims needs n1,n2,n3, got {:?}", args.dims)));
    };
    if n1 == 0 || n2 == 0 || n3 == 0 {
        return Err(Failure::Usage("dims must be positive".into()));
    }
    let mut rng = rng_from_seed(args.seed);
    let square = |kind: &str| if n1 == n2 { Ok(()) } else { Err(Failure::Usage(format!("{kind} needs n1 = n2"))) };
    let t = match args.kind {
        GenKind::Gaussian => gaussian((n1, n2, n3), &mut rng),
        GenKind::WellConditioned => {
            square("well-conditioned")?;
            well_conditioned(n1, n3, &mut rng)
        }
        GenKind::Identity => {
            square("identity")?;
            Tensor3::identity(n1, n3)
        }
        GenKind::Multirank => {
            let ranks = match &args.ranks {
                Some(r) => parse_list(r, "ranks")?,
                None => random_rank_profile(n1, n2, n3, 0, &mut rng),
            };
            usage(with_multirank(n1, n2, &ranks, &mut rng))?
        }
        GenKind::SmwInstance => return gen_smw(&args, SmwDims { n1, n2, k: args.k, n3 }),
    };
    emit(&t, &args.out)
}

fn gen_smw(args: &GenArgs, dims: SmwDims) -> CliResult {
    let Some(out) = &args.out.out else {
        return Err(Failure::Usage("smw-instance needs --out <stem>.<ext>".into()));
    };
    let family = match args.family {
        Family::Lifted => InstanceFamily::MatrixLifted,
        Family::Trivial => InstanceFamily::Trivial,
    };
    let (a, f) = usage(construct_conditioned_instance(dims, family, args.seed))?;
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("instance");
    let ext = out.extension().and_then(|s| s.to_str()).unwrap_or("json");
    for (name, t) in [("A", &a), ("U", &f.u), ("B", &f.b), ("V", &f.v)] {
        let p = out.with_file_name(format!("{stem}_{name}.{ext}"));
        write_tensor(&p, t).map_err(|e| Failure::Op(format!("{}: {e}", p.display())))?;
    }
    Ok(ExitCode::SUCCESS)
}
