use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sfett_cli::{cmd_approx, cmd_eigs, io, ApproxConfig, EigsConfig, FuncKind, OpKind};
use sfett_core::problems::HENON_LAMBDA;
use sfett_core::{SfEttRank, SfEttTensor};

/// SF-ETT experiments and file tools. Set SFETT_DENSE_CAP to change the
/// largest dense tensor any command may build.
#[derive(Parser)]
#[command(name = "sfett", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Approximation error versus parameter count over a rank schedule.
    Approx(ApproxArgs),
    /// Smallest eigenvalue of a TT operator by LOCG.
    Eigs(EigsArgs),
    /// Round a saved tensor to smaller ranks.
    Round(RoundArgs),
    /// Print format, dims and ranks of a saved tensor.
    Info { path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Func {
    Hilbert,
    Gauss,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Laplace,
    Henon,
}

#[derive(Args)]
struct ApproxArgs {
    #[arg(long, value_enum, default_value = "hilbert")]
    func: Func,
    #[arg(long, default_value_t = 4)]
    d: usize,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    d_t: usize,
    /// Number of rank schedule points.
    #[arg(long, default_value_t = 6)]
    points: usize,
    /// Skip the steepest descent refinement.
    #[arg(long)]
    no_rsgd: bool,
    #[arg(long, default_value_t = 20)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Gaussian width for --func gauss.
    #[arg(long, default_value_t = 10.0)]
    alpha: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EigsArgs {
    #[arg(long, value_enum, default_value = "laplace")]
    op: Op,
    #[arg(long, default_value_t = 4)]
    d: usize,
    #[arg(long, default_value_t = 16)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    d_t: usize,
    #[arg(long, default_value_t = 1)]
    rank: usize,
    /// Henon grid interval as LOWER:UPPER.
    #[arg(long, default_value = "-5:5", allow_hyphen_values = true)]
    domain: String,
    #[arg(long, default_value_t = HENON_LAMBDA, allow_hyphen_values = true)]
    lambda: f64,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RoundArgs {
    input: PathBuf,
    output: PathBuf,
    /// TT ranks, colon separated.
    #[arg(long)]
    tt: String,
    /// Distinct Tucker ranks, colon separated (empty when d_t = 0).
    #[arg(long, default_value = "")]
    tucker: String,
    #[arg(long)]
    shared: usize,
}

fn parse_list(s: &str) -> Result<Vec<usize>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(':').map(|t| t.trim().parse().map_err(|e| format!("bad rank {t:?}: {e}"))).collect()
}

fn parse_domain(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or("domain must be LOWER:UPPER")?;
    let lower = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let upper = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((lower, upper))
}

fn emit(csv: &str, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(p) => fs::write(p, csv).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn describe(x: &SfEttTensor) -> String {
    let r = x.ranks();
    format!(
        "order {} (d_t = {}, d_s = {})\ndims {:?}\ntt ranks {:?}\ntucker ranks {:?}\nshared rank {}\nparams {}\nnorm {:e}",
        x.order(),
        x.d_t(),
        x.d_s(),
        x.dims(),
        r.tt,
        r.tucker,
        r.shared,
        x.param_count(),
        x.norm()
    )
}

fn run(cli: Cli) -> Result<(), String> {
    let err = |e: sfett_core::Error| e.to_string();
    match cli.cmd {
        Cmd::Approx(a) => {
            let cfg = ApproxConfig {
                func: match a.func {
                    Func::Hilbert => FuncKind::Hilbert,
                    Func::Gauss => FuncKind::Gauss,
                    Func::Random => FuncKind::Random,
                },
                d: a.d,
                n: a.n,
                d_t: a.d_t,
                points: a.points,
                rsgd: !a.no_rsgd,
                max_iters: a.max_iters,
                seed: a.seed,
                alpha: a.alpha,
            };
            emit(&cmd_approx(&cfg).map_err(err)?.csv, a.out.as_ref())
        }
        Cmd::Eigs(a) => {
            let (lower, upper) = parse_domain(&a.domain)?;
            let cfg = EigsConfig {
                op: match a.op {
                    Op::Laplace => OpKind::Laplace,
                    Op::Henon => OpKind::Henon,
                },
                d: a.d,
                n: a.n,
                d_t: a.d_t,
                rank: a.rank,
                lower,
                upper,
                lambda: a.lambda,
                max_iters: a.max_iters,
                tol: a.tol,
                seed: a.seed,
            };
            emit(&cmd_eigs(&cfg).map_err(err)?.csv, a.out.as_ref())
        }
        Cmd::Round(a) => {
            let x = io::load(&a.input).map_err(err)?;
            let ranks = SfEttRank::new(parse_list(&a.tt)?, parse_list(&a.tucker)?, a.shared);
            let y = x.round(&ranks).map_err(err)?;
            io::save(&a.output, &y).map_err(err)?;
            println!("{}", describe(&y));
            Ok(())
        }
        Cmd::Info { path } => {
            let x = io::load(&path).map_err(err)?;
            println!("{}", describe(&x));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
