//! Riemannian steepest descent for approximation and the LOCG eigensolver.

use std::sync::Arc;
use std::time::Instant;

use nalgebra::SymmetricEigen;

use crate::dense::DenseTensor;
use crate::error::{arg_err, shape_err, Error, Result};
use crate::ett::{self, Ett};
use crate::linalg::Mat;
use crate::sfett::{SfEttRank, SfEttTensor};
use crate::tangent::{project, retract, transport, Ambient, Foot, TangentVector};
use crate::tt::TtOperator;

#[derive(Clone, Debug, PartialEq)]
pub struct IterRecord {
    pub iter: usize,
    /// Objective (descent) or Ritz value (eigensolver).
    pub value: f64,
    /// Riemannian gradient norm (descent) or projected residual norm (eigensolver).
    pub residual: f64,
    /// Step size where one is taken.
    pub step: Option<f64>,
    /// Relative violation of the exact line search before retraction.
    pub line_search_residual: Option<f64>,
    pub time_ms: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveTrace {
    pub records: Vec<IterRecord>,
    /// Eigensolver restarts after the search basis collapsed.
    pub restarts: usize,
    pub converged: bool,
}

impl SolveTrace {
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.iter)
    }
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Approximation target.
#[derive(Clone, Copy, Debug)]
pub enum Target<'a> {
    Dense(&'a DenseTensor),
    SfEtt(&'a SfEttTensor),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RstgdOptions {
    pub max_iters: usize,
    /// Stop once the gradient norm falls below this multiple of `‖A‖`.
    pub grad_tol: f64,
}

impl Default for RstgdOptions {
    fn default() -> Self {
        Self { max_iters: 100, grad_tol: 1e-13 }
    }
}

struct Residual {
    /// `X - A` in a projectable form.
    dense: Option<DenseTensor>,
    structured: Option<SfEttTensor>,
    norm: f64,
}

fn residual(target: Target<'_>, x: &SfEttTensor) -> Result<Residual> {
    match target {
        Target::Dense(a) => {
            let r = x.to_dense()?.sub(a)?;
            let norm = r.norm();
            Ok(Residual { dense: Some(r), structured: None, norm })
        }
        Target::SfEtt(a) => {
            let r = x.add(&a.scale(-1.0))?;
            let norm = r.norm();
            Ok(Residual { dense: None, structured: Some(r), norm })
        }
    }
}

/// Steepest descent on `f(X) = ½‖A - X‖²` over the fixed-rank manifold with
/// the exact step `α = -⟨A - X, g⟩ / ‖g‖²` along `g = P_X(X - A)`. Stops as
/// soon as a step fails to decrease the objective and returns the last
/// accepted iterate.
pub fn rstgd(
    target: Target<'_>,
    x0: &SfEttTensor,
    ranks: &SfEttRank,
    opts: &RstgdOptions,
) -> Result<(SfEttTensor, SolveTrace)> {
    let a_norm = match target {
        Target::Dense(a) => a.norm(),
        Target::SfEtt(a) => a.norm(),
    };
    let dims = match target {
        Target::Dense(a) => a.dims().to_vec(),
        Target::SfEtt(a) => a.dims(),
    };
    if dims != x0.dims() {
        return shape_err("target and initial guess differ in dims");
    }
    let mut x = x0.orthogonalize(x0.order() - 1)?;
    let mut res = residual(target, &x)?;
    let mut f = 0.5 * res.norm * res.norm;
    if !f.is_finite() {
        return Err(Error::NonFinite("objective"));
    }
    let mut trace = SolveTrace::default();
    trace.records.push(IterRecord {
        iter: 0,
        value: f,
        residual: f64::NAN,
        step: None,
        line_search_residual: None,
        time_ms: 0.0,
    });
    for k in 1..=opts.max_iters {
        let t0 = Instant::now();
        let foot = Foot::new(x.clone())?;
        let g = match (&res.dense, &res.structured) {
            (Some(r), _) => project(&foot, Ambient::Dense(r))?,
            (_, Some(r)) => project(&foot, Ambient::Ett(&r.to_ett()))?,
            _ => unreachable!(),
        };
        let gg = g.inner(&g)?;
        let gnorm = gg.sqrt();
        if let Some(last) = trace.records.last_mut() {
            last.residual = gnorm;
        }
        if gnorm <= opts.grad_tol * a_norm.max(f64::MIN_POSITIVE) {
            trace.converged = true;
            break;
        }
        // ambient ⟨A - X, g⟩ and ⟨g, g⟩
        let (r_g, g_g) = match (&res.dense, &res.structured) {
            (Some(r), _) => {
                let gd = g.to_dense()?;
                (-r.inner(&gd)?, gd.inner(&gd)?)
            }
            (_, Some(r)) => {
                let gs = g.to_sfett()?;
                (-r.inner(&gs)?, gs.inner(&gs)?)
            }
            _ => unreachable!(),
        };
        let alpha = -r_g / gg;
        let ls = (r_g + alpha * g_g).abs() / (res.norm * gnorm);
        let x_new = retract(&g.scale(-alpha), ranks)?;
        let res_new = residual(target, &x_new)?;
        let f_new = 0.5 * res_new.norm * res_new.norm;
        if !f_new.is_finite() {
            return Err(Error::NonFinite("objective"));
        }
        if f_new >= f {
            break;
        }
        x = x_new;
        res = res_new;
        f = f_new;
        trace.records.push(IterRecord {
            iter: k,
            value: f,
            residual: f64::NAN,
            step: Some(alpha),
            line_search_residual: Some(ls),
            time_ms: elapsed_ms(t0),
        });
    }
    Ok((x, trace))
}

/// Result of a Rayleigh-Ritz step.
#[derive(Clone, Debug)]
pub struct Ritz {
    /// Ritz values, ascending.
    pub values: Vec<f64>,
    /// Coefficient columns in the original basis; dropped directions get zeros.
    pub coeffs: Mat,
    /// Indices of the basis vectors kept.
    pub kept: Vec<usize>,
}

/// Relative threshold for dropping nearly dependent basis directions.
pub const BASIS_DROP_TOL: f64 = 1e-10;

/// Solves `(SᵀHS) z = θ (SᵀS) z` from the two Gram matrices. Basis vectors
/// are scaled to unit norm, then accepted in order while the Schur pivot of
/// the Gram matrix stays above `BASIS_DROP_TOL · σ_max`.
pub fn rayleigh_ritz(hs: &Mat, ss: &Mat) -> Result<Ritz> {
    let n = ss.nrows();
    if n == 0 || ss.shape() != (n, n) || hs.shape() != (n, n) {
        return shape_err("Gram matrices must be square, non-empty and of equal size");
    }
    let asym = (hs - hs.transpose()).norm() / hs.norm().max(f64::MIN_POSITIVE);
    if asym > 1e-8 {
        return Err(Error::Asymmetric(asym));
    }
    let scale: Vec<f64> = (0..n)
        .map(|i| if ss[(i, i)] > 0.0 { 1.0 / ss[(i, i)].sqrt() } else { 0.0 })
        .collect();
    let g = Mat::from_fn(n, n, |i, j| ss[(i, j)] * scale[i] * scale[j]);
    let smax = SymmetricEigen::new(g.clone()).eigenvalues.iter().cloned().fold(0.0, f64::max);
    if smax <= 0.0 {
        return arg_err("basis Gram matrix is numerically zero");
    }
    let mut kept: Vec<usize> = Vec::new();
    for j in 0..n {
        if scale[j] == 0.0 {
            continue;
        }
        let pivot = if kept.is_empty() {
            g[(j, j)]
        } else {
            let gk = Mat::from_fn(kept.len(), kept.len(), |a, b| g[(kept[a], kept[b])]);
            let v = Mat::from_fn(kept.len(), 1, |a, _| g[(kept[a], j)]);
            match gk.cholesky() {
                Some(ch) => g[(j, j)] - (v.transpose() * ch.solve(&v))[(0, 0)],
                None => 0.0,
            }
        };
        if pivot > BASIS_DROP_TOL * smax {
            kept.push(j);
        }
    }
    if kept.is_empty() {
        return arg_err("all basis directions dropped");
    }
    let m = kept.len();
    let gk = Mat::from_fn(m, m, |a, b| g[(kept[a], kept[b])]);
    let hk = Mat::from_fn(m, m, |a, b| {
        let (i, j) = (kept[a], kept[b]);
        0.5 * (hs[(i, j)] + hs[(j, i)]) * scale[i] * scale[j]
    });
    let l = gk.cholesky().ok_or_else(|| Error::InvalidArgument("basis Gram not positive definite".into()))?.l();
    let linv = l.clone().try_inverse().ok_or_else(|| Error::InvalidArgument("singular basis".into()))?;
    let c = &linv * hk * linv.transpose();
    let eig = SymmetricEigen::new((&c + c.transpose()) * 0.5);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let mut values = Vec::with_capacity(m);
    let mut coeffs = Mat::zeros(n, m);
    for (col, &e) in order.iter().enumerate() {
        values.push(eig.eigenvalues[e]);
        let z = linv.transpose() * eig.eigenvectors.column(e);
        for (a, &i) in kept.iter().enumerate() {
            coeffs[(i, col)] = z[a] * scale[i];
        }
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("Ritz values"));
    }
    Ok(Ritz { values, coeffs, kept })
}

/// Rayleigh-Ritz for an explicit symmetric matrix and basis vectors (columns of `s`).
pub fn rayleigh_ritz_dense(h: &Mat, s: &Mat) -> Result<Ritz> {
    rayleigh_ritz(&(s.transpose() * h * s), &(s.transpose() * s))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocgOptions {
    pub max_iters: usize,
    /// Stop once the projected residual norm is at most this.
    pub tol: f64,
}

impl Default for LocgOptions {
    fn default() -> Self {
        Self { max_iters: 500, tol: 1e-8 }
    }
}

struct LocgState {
    foot: Arc<Foot>,
    x_ett: Ett,
    xt: TangentVector,
    r: TangentVector,
}

fn locg_state(h: &TtOperator, x: SfEttTensor, theta: f64) -> Result<LocgState> {
    let foot = Foot::new(x)?;
    let x_ett = foot.point().to_ett();
    let hx = x_ett.apply_op(h)?;
    let xt = foot.point_as_tangent();
    let r = project(&foot, Ambient::Ett(&hx))?.axpy(-theta, &xt)?;
    Ok(LocgState { foot, x_ett, xt, r })
}

/// Riemannian locally optimal conjugate gradient for the smallest eigenpair
/// of a symmetric TT operator over fixed-rank SF-ETT tensors.
///
/// Each step runs Rayleigh-Ritz on `[X, R, P]` (all tangent at `X`), combines
/// them in tangent coordinates, rounds to `ranks` and normalizes. The
/// conjugate direction is carried to the next tangent space by projection.
pub fn locg(
    h: &TtOperator,
    x0: &SfEttTensor,
    ranks: &SfEttRank,
    opts: &LocgOptions,
) -> Result<(f64, SfEttTensor, SolveTrace)> {
    if h.col_dims() != x0.dims() || h.row_dims() != x0.dims() {
        return shape_err("operator and initial guess differ in dims");
    }
    let x = x0.orthogonalize(x0.order() - 1)?;
    let nrm = x.norm();
    if nrm == 0.0 {
        return arg_err("initial guess is zero");
    }
    let x = x.scale(1.0 / nrm);
    let xe = x.to_ett();
    let mut theta = ett::op_inner(&xe, h, &xe)? / ett::inner(&xe, &xe)?;
    if !theta.is_finite() {
        return Err(Error::NonFinite("Ritz value"));
    }
    let mut st = locg_state(h, x, theta)?;
    let mut p: Option<TangentVector> = None;
    let mut trace = SolveTrace::default();
    trace.records.push(IterRecord {
        iter: 0,
        value: theta,
        residual: st.r.norm(),
        step: None,
        line_search_residual: None,
        time_ms: 0.0,
    });
    for k in 1..=opts.max_iters {
        if st.r.norm() <= opts.tol {
            trace.converged = true;
            break;
        }
        let t0 = Instant::now();
        let mut basis = vec![st.xt.clone(), st.r.clone()];
        if let Some(p) = &p {
            basis.push(p.clone());
        }
        let etts: Vec<Ett> = std::iter::once(Ok(st.x_ett.clone()))
            .chain(basis[1..].iter().map(|b| b.to_sfett().map(|s| s.to_ett())))
            .collect::<Result<_>>()?;
        let n = basis.len();
        let mut ss = Mat::zeros(n, n);
        let mut hs = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                ss[(i, j)] = basis[i].inner(&basis[j])?;
                hs[(i, j)] = ett::op_inner(&etts[i], h, &etts[j])?;
            }
        }
        let ritz = rayleigh_ritz(&hs, &ss)?;
        if !ritz.kept.contains(&1) && !ritz.kept.contains(&2) {
            // nothing but X survives: restart without the conjugate direction
            trace.restarts += 1;
            if p.is_none() {
                break;
            }
            p = None;
            continue;
        }
        let c = ritz.coeffs.column(0).clone_owned();
        let theta_new = ritz.values[0];
        let mut step = basis[0].scale(c[0]);
        let mut dir = basis[1].scale(c[1]);
        if n > 2 {
            dir = dir.axpy(c[2], &basis[2])?;
        }
        step = step.axpy(1.0, &dir)?;
        let combined = step.to_sfett()?.round(ranks)?;
        let nrm = combined.norm();
        if !(nrm > 0.0) {
            return Err(Error::NonFinite("iterate norm"));
        }
        let x_new = combined.scale(1.0 / nrm);
        theta = theta_new;
        st = locg_state(h, x_new, theta)?;
        p = Some(transport(&st.foot, &dir)?);
        trace.records.push(IterRecord {
            iter: k,
            value: theta,
            residual: st.r.norm(),
            step: None,
            line_search_residual: None,
            time_ms: elapsed_ms(t0),
        });
    }
    if st.r.norm() <= opts.tol {
        trace.converged = true;
    }
    Ok((theta, st.foot.point().clone(), trace))
}
