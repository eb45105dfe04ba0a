use sfett_core::oracle::{lanczos_min_eigenvalue, DENSE_EIG_MAX};
use sfett_core::problems::{henon_hamiltonian, laplace_min_eig, laplace_op, GridSpec, HENON_LAMBDA};
use sfett_core::{locg, Error, LocgOptions, Result, SfEttRank, SfEttTensor, SolveTrace};

use crate::report::{num, opt_num, Csv};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpKind {
    Laplace,
    Henon,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigsConfig {
    pub op: OpKind,
    pub d: usize,
    pub n: usize,
    pub d_t: usize,
    /// Uniform TT, Tucker and shared rank, clamped to what the dims admit.
    pub rank: usize,
    pub lower: f64,
    pub upper: f64,
    pub lambda: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for EigsConfig {
    fn default() -> Self {
        Self {
            op: OpKind::Laplace,
            d: 4,
            n: 16,
            d_t: 1,
            rank: 1,
            lower: -5.0,
            upper: 5.0,
            lambda: HENON_LAMBDA,
            max_iters: 100,
            tol: 1e-8,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigsReport {
    pub theta: f64,
    pub reference: Option<f64>,
    pub rel_err: Option<f64>,
    pub trace: SolveTrace,
    pub x: SfEttTensor,
    pub csv: String,
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Smallest eigenpair by LOCG from a seeded random start. The reference is
/// the analytic value for `laplace` and a dense eigensolve for `henon` when
/// `n^d` is small enough.
pub fn cmd_eigs(cfg: &EigsConfig) -> Result<EigsReport> {
    if cfg.d < 2 || cfg.d_t >= cfg.d || cfg.n < 2 || cfg.rank == 0 {
        return Err(Error::InvalidArgument(format!(
            "d = {}, d_t = {}, n = {}, rank = {}",
            cfg.d, cfg.d_t, cfg.n, cfg.rank
        )));
    }
    let dims = vec![cfg.n; cfg.d];
    let (h, reference) = match cfg.op {
        OpKind::Laplace => (laplace_op(cfg.d, cfg.n)?, Some(laplace_min_eig(cfg.d, cfg.n))),
        OpKind::Henon => {
            let grid = GridSpec::new(cfg.d, cfg.n, cfg.lower, cfg.upper)?;
            let h = henon_hamiltonian(&grid, cfg.lambda)?;
            let small = cfg.n.checked_pow(cfg.d as u32).is_some_and(|s| s <= DENSE_EIG_MAX);
            let reference = if small { Some(lanczos_min_eigenvalue(&h.to_dense_matrix())?) } else { None };
            (h, reference)
        }
    };
    let ranks = SfEttRank::uniform(cfg.d, cfg.d_t, cfg.rank).clamped(&dims, cfg.d_t);
    let x0 = SfEttTensor::random(&dims, cfg.d_t, &ranks, cfg.seed)?;
    let (theta, x, trace) =
        locg(&h, &x0, &ranks, &LocgOptions { max_iters: cfg.max_iters, tol: cfg.tol })?;
    let rel_err = reference.map(|r| (theta - r).abs() / r.abs());

    let op = match cfg.op {
        OpKind::Laplace => "laplace",
        OpKind::Henon => "henon",
    };
    let mut params = vec![
        ("op", op.to_string()),
        ("d", cfg.d.to_string()),
        ("n", cfg.n.to_string()),
        ("d_t", cfg.d_t.to_string()),
        ("rank", cfg.rank.to_string()),
    ];
    if cfg.op == OpKind::Henon {
        params.push(("domain", format!("{}:{}", cfg.lower, cfg.upper)));
        params.push(("lambda", cfg.lambda.to_string()));
    }
    params.push(("max_iters", cfg.max_iters.to_string()));
    params.push(("tol", num(cfg.tol)));
    params.push(("seed", cfg.seed.to_string()));
    let mut csv = Csv::new("eigs", &params, &["iter", "theta", "resid_norm", "time_ms"]);
    for r in &trace.records {
        csv.row(&[r.iter.to_string(), num(r.value), num(r.residual), format!("{:.3}", r.time_ms)]);
    }
    csv.footer(&format!(
        "final theta={} reference={} rel_err={} converged={} restarts={}",
        num(theta),
        opt_num(reference),
        opt_num(rel_err),
        trace.converged,
        trace.restarts
    ));
    let per_iter: Vec<f64> = trace.records.iter().skip(1).map(|r| r.time_ms).collect();
    csv.footer(&format!("timing median_iter_ms={:.3}", median(per_iter)));
    Ok(EigsReport { theta, reference, rel_err, trace, x, csv: csv.finish() })
}
