use std::time::Instant;

use sfett_core::problems::GridFunction;
use sfett_core::sfett::check_cap;
use sfett_core::{rstgd, DenseTensor, Error, Result, RstgdOptions, SfEttRank, SfEttTensor, Target};

use crate::report::{join_ranks, num, opt_num, Csv};
use crate::schedule::rank_schedule;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FuncKind {
    /// `1 / (1 + Σ c_i x_i)` on `n` points per mode.
    Hilbert,
    /// Gaussian sampled on `n^d` points, quantized into `d` modes of size `n`.
    Gauss,
    /// Seeded standard Gaussian entries.
    Random,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxConfig {
    pub func: FuncKind,
    pub d: usize,
    pub n: usize,
    pub d_t: usize,
    pub points: usize,
    pub rsgd: bool,
    pub max_iters: usize,
    pub seed: u64,
    /// Gaussian width parameter for [`FuncKind::Gauss`].
    pub alpha: f64,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        Self {
            func: FuncKind::Hilbert,
            d: 4,
            n: 8,
            d_t: 1,
            points: 6,
            rsgd: true,
            max_iters: 20,
            seed: 0,
            alpha: 10.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxRow {
    pub ranks: SfEttRank,
    pub param_count: usize,
    pub rel_err_svd: f64,
    pub rel_err_rsgd: Option<f64>,
    pub iters: Option<usize>,
    pub time_ms: f64,
}

#[derive(Clone, Debug)]
pub struct ApproxReport {
    pub rows: Vec<ApproxRow>,
    pub csv: String,
}

fn target(cfg: &ApproxConfig) -> Result<DenseTensor> {
    let dims = vec![cfg.n; cfg.d];
    check_cap(&dims)?;
    match cfg.func {
        FuncKind::Hilbert => GridFunction::hilbert(cfg.d, cfg.n).tensor(),
        FuncKind::Gauss => GridFunction::gauss_qtt(cfg.n, cfg.d, cfg.alpha).tensor(),
        FuncKind::Random => {
            use rand::SeedableRng;
            use rand_distr::{Distribution, StandardNormal};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
            let len = dims.iter().product();
            let data = (0..len).map(|_| StandardNormal.sample(&mut rng)).collect();
            DenseTensor::new(dims, data)
        }
    }
}

fn rel_err(a: &DenseTensor, x: &SfEttTensor, a_norm: f64) -> Result<f64> {
    Ok(x.to_dense()?.sub(a)?.norm() / a_norm)
}

/// Sweeps the rank schedule: SF-ETT-SVD of the target at each point,
/// optionally refined by Riemannian steepest descent.
pub fn cmd_approx(cfg: &ApproxConfig) -> Result<ApproxReport> {
    if cfg.points == 0 {
        return Err(Error::InvalidArgument("rank schedule needs at least one point".into()));
    }
    if cfg.d < 2 || cfg.d_t >= cfg.d || cfg.n == 0 {
        return Err(Error::InvalidArgument(format!("d = {}, d_t = {}, n = {}", cfg.d, cfg.d_t, cfg.n)));
    }
    let a = target(cfg)?;
    let a_norm = a.norm();
    if a_norm == 0.0 {
        return Err(Error::InvalidArgument("target is zero".into()));
    }
    let func = match cfg.func {
        FuncKind::Hilbert => "hilbert",
        FuncKind::Gauss => "gauss",
        FuncKind::Random => "random",
    };
    let mut csv = Csv::new(
        "approx",
        &[
            ("func", func.into()),
            ("d", cfg.d.to_string()),
            ("n", cfg.n.to_string()),
            ("d_t", cfg.d_t.to_string()),
            ("rsgd", cfg.rsgd.to_string()),
            ("max_iters", cfg.max_iters.to_string()),
            ("seed", cfg.seed.to_string()),
        ],
        &["shared_count", "rtt", "rt", "rts", "param_count", "rel_err_svd", "rel_err_rsgd", "iters", "time_ms"],
    );
    let opts = RstgdOptions { max_iters: cfg.max_iters, ..Default::default() };
    let mut rows = Vec::new();
    for ranks in rank_schedule(a.dims(), cfg.d_t, cfg.points) {
        let t0 = Instant::now();
        let x = SfEttTensor::svd_from_dense(&a, cfg.d_t, &ranks)?;
        let rel_err_svd = rel_err(&a, &x, a_norm)?;
        let (rel_err_rsgd, iters) = if cfg.rsgd {
            let (y, trace) = rstgd(Target::Dense(&a), &x, &ranks, &opts)?;
            (Some(rel_err(&a, &y, a_norm)?), Some(trace.iterations()))
        } else {
            (None, None)
        };
        let row = ApproxRow {
            param_count: x.param_count(),
            ranks: x.ranks(),
            rel_err_svd,
            rel_err_rsgd,
            iters,
            time_ms: t0.elapsed().as_secs_f64() * 1e3,
        };
        csv.row(&[
            (cfg.d - cfg.d_t).to_string(),
            join_ranks(&row.ranks.tt),
            join_ranks(&row.ranks.tucker),
            row.ranks.shared.to_string(),
            row.param_count.to_string(),
            num(row.rel_err_svd),
            opt_num(row.rel_err_rsgd),
            row.iters.map(|i| i.to_string()).unwrap_or_default(),
            format!("{:.3}", row.time_ms),
        ]);
        rows.push(row);
    }
    Ok(ApproxReport { rows, csv: csv.finish() })
}
