//! Brute-force references for testing. Nothing here calls into the code it
//! checks: index arithmetic, contractions and SVD calls are written out
//! separately and kept deliberately simple.

use nalgebra::{DMatrix, SymmetricEigen, DVector};

use crate::dense::DenseTensor;
use crate::error::{arg_err, shape_err, Error, Result};
use crate::sfett::{SfEttRank, SfEttTensor};

const RANK_THRESHOLD: f64 = 1e-10;

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in 1..dims.len() {
        s[k] = s[k - 1] * dims[k - 1];
    }
    s
}

fn multi_index(mut lin: usize, dims: &[usize]) -> Vec<usize> {
    dims.iter()
        .map(|&n| {
            let i = lin % n;
            lin /= n;
            i
        })
        .collect()
}

/// Mode-`mode` matricization by explicit enumeration of all entries.
fn naive_matricize(x: &DenseTensor, mode: usize) -> DMatrix<f64> {
    let dims = x.dims();
    let rest: Vec<usize> = (0..dims.len()).filter(|&k| k != mode).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&k| dims[k]).collect();
    let rs = strides(&rest_dims);
    let cols: usize = rest_dims.iter().product();
    let mut m = DMatrix::zeros(dims[mode], cols);
    for (lin, v) in x.data().iter().enumerate() {
        let idx = multi_index(lin, dims);
        let col: usize = rest.iter().zip(&rs).map(|(&k, s)| idx[k] * s).sum();
        m[(idx[mode], col)] = *v;
    }
    m
}

fn naive_unfold(x: &DenseTensor, split: usize) -> DMatrix<f64> {
    let dims = x.dims();
    let rows: usize = dims[..split].iter().product();
    let cols: usize = dims[split..].iter().product();
    let rs = strides(&dims[..split]);
    let cs = strides(&dims[split..]);
    let mut m = DMatrix::zeros(rows, cols);
    for (lin, v) in x.data().iter().enumerate() {
        let idx = multi_index(lin, dims);
        let r: usize = idx[..split].iter().zip(&rs).map(|(i, s)| i * s).sum();
        let c: usize = idx[split..].iter().zip(&cs).map(|(i, s)| i * s).sum();
        m[(r, c)] = *v;
    }
    m
}

fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().cloned().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

fn numerical_rank(s: &[f64]) -> usize {
    let smax = s.first().cloned().unwrap_or(0.0);
    s.iter().filter(|&&v| v > RANK_THRESHOLD * smax).count()
}

fn tail(s: &[f64], r: usize) -> f64 {
    s.iter().skip(r).map(|v| v * v).sum::<f64>().sqrt()
}

/// Singular spectra of every matrix whose rank defines the SF-ETT rank.
#[derive(Clone, Debug)]
pub struct SpectraReport {
    /// Unfoldings `X^<1>`..`X^<d-1>`.
    pub unfoldings: Vec<Vec<f64>>,
    /// Matricizations of the distinct-factor modes.
    pub matricizations: Vec<Vec<f64>>,
    /// Concatenation of the shared-mode matricizations.
    pub shared: Vec<f64>,
}

impl SpectraReport {
    /// Ranks at threshold `1e-10 * σ_max` of each matrix.
    pub fn ranks(&self) -> SfEttRank {
        SfEttRank {
            tt: self.unfoldings.iter().map(|s| numerical_rank(s)).collect(),
            tucker: self.matricizations.iter().map(|s| numerical_rank(s)).collect(),
            shared: numerical_rank(&self.shared),
        }
    }

    /// Largest Eckart–Young tail over all named matrices at the given ranks:
    /// a lower bound on the best approximation error at that rank tuple. The
    /// shared concatenation holds `d_s` copies of the tensor, so its tail is
    /// divided by `√d_s`.
    pub fn lower_bound(&self, r: &SfEttRank) -> f64 {
        let d_s = (self.unfoldings.len() + 1 - self.matricizations.len()) as f64;
        let mut lb = tail(&self.shared, r.shared) / d_s.sqrt();
        for (s, &k) in self.unfoldings.iter().zip(&r.tt) {
            lb = lb.max(tail(s, k));
        }
        for (s, &k) in self.matricizations.iter().zip(&r.tucker) {
            lb = lb.max(tail(s, k));
        }
        lb
    }
}

pub fn unfolding_spectra(x: &DenseTensor, d_t: usize) -> Result<SpectraReport> {
    let d = x.order();
    if d < 2 || d_t >= d {
        return arg_err("need d >= 2 and d_t < d");
    }
    let dims = x.dims();
    if dims[d_t..].iter().any(|&n| n != dims[d - 1]) {
        return shape_err("shared modes must have equal sizes");
    }
    let unfoldings = (1..d).map(|s| singular_values(&naive_unfold(x, s))).collect();
    let matricizations = (0..d_t).map(|k| singular_values(&naive_matricize(x, k))).collect();
    let blocks: Vec<DMatrix<f64>> = (d_t..d).map(|k| naive_matricize(x, k)).collect();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut cat = DMatrix::zeros(dims[d - 1], cols);
    let mut off = 0;
    for b in &blocks {
        for j in 0..b.ncols() {
            for i in 0..b.nrows() {
                cat[(i, off + j)] = b[(i, j)];
            }
        }
        off += b.ncols();
    }
    Ok(SpectraReport { unfoldings, matricizations, shared: singular_values(&cat) })
}

/// Central-difference gradient of `f` at `x`, one entry at a time.
pub fn fd_gradient(f: impl Fn(&DenseTensor) -> f64, x: &DenseTensor, h: f64) -> Result<DenseTensor> {
    let mut g = DenseTensor::zeros(x.dims());
    let mut probe = x.clone();
    for i in 0..x.len() {
        let orig = probe.data()[i];
        probe.data_mut()[i] = orig + h;
        let fp = f(&probe);
        probe.data_mut()[i] = orig - h;
        let fm = f(&probe);
        probe.data_mut()[i] = orig;
        if !fp.is_finite() || !fm.is_finite() {
            return Err(Error::NonFinite("fd_gradient sample"));
        }
        g.data_mut()[i] = (fp - fm) / (2.0 * h);
    }
    Ok(g)
}

pub const DENSE_EIG_MAX: usize = 4096;

fn symmetrized(h: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = h.nrows();
    if n != h.ncols() {
        return shape_err("matrix must be square");
    }
    if n > DENSE_EIG_MAX {
        return Err(Error::DenseTooLarge { size: n, cap: DENSE_EIG_MAX });
    }
    let asym = (h - h.transpose()).norm() / h.norm().max(1e-300);
    if asym > 1e-8 {
        return Err(Error::Asymmetric(asym));
    }
    Ok((h + h.transpose()) * 0.5)
}

/// Smallest eigenpair of a dense symmetric matrix.
pub fn dense_min_eig(h: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    let eig = SymmetricEigen::new(symmetrized(h)?);
    let (k, lam) = eig
        .eigenvalues
        .iter()
        .cloned()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    Ok((lam, eig.eigenvectors.column(k).clone_owned()))
}

/// Smallest eigenvalue only, which skips accumulating eigenvectors.
pub fn dense_min_eigenvalue(h: &DMatrix<f64>) -> Result<f64> {
    Ok(symmetrized(h)?.symmetric_eigenvalues().min())
}

/// Smallest eigenvalue by Lanczos with full reorthogonalization. Agrees with
/// [`dense_min_eigenvalue`] to roughly `1e-12 · ‖H‖` at a fraction of the cost.
pub fn lanczos_min_eigenvalue(h: &DMatrix<f64>) -> Result<f64> {
    let h = symmetrized(h)?;
    let n = h.nrows();
    let scale = h.norm().max(1e-300);
    // fixed start with no special structure
    let mut v = DVector::from_fn(n, |i, _| 1.0 + 0.5 * ((i as f64) * 0.7071).sin());
    v /= v.norm();
    let mut basis: Vec<DVector<f64>> = vec![v];
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    loop {
        let m = basis.len();
        let mut w = &h * &basis[m - 1];
        alpha.push(basis[m - 1].dot(&w));
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let b = w.norm();
        let done = m == n || b <= 1e-14 * scale;
        if done || m % 10 == 0 {
            let t = DMatrix::from_fn(m, m, |i, j| match i.abs_diff(j) {
                0 => alpha[i],
                1 => beta[i.min(j)],
                _ => 0.0,
            });
            let eig = SymmetricEigen::new(t);
            let (k, lam) = eig.eigenvalues.iter().cloned().enumerate().min_by(|x, y| x.1.total_cmp(&y.1)).unwrap();
            if done || (b * eig.eigenvectors[(m - 1, k)]).abs() <= 1e-12 * scale {
                return Ok(lam);
            }
        }
        beta.push(b);
        basis.push(w / b);
    }
}

/// Dense form of an SF-ETT tensor by summing every term of the contraction.
pub fn naive_sfett_dense(x: &SfEttTensor) -> DenseTensor {
    let dims = x.dims();
    let d = dims.len();
    let cores = x.core().cores();
    let red: Vec<usize> = cores.iter().map(|c| c.dims()[1]).collect();
    let red_len: usize = red.iter().product();
    // dense core by chain products per reduced index
    let mut g = vec![0.0; red_len];
    for (lin, gv) in g.iter_mut().enumerate() {
        let idx = multi_index(lin, &red);
        let mut row = vec![1.0];
        for (k, c) in cores.iter().enumerate() {
            let [r0, _, r1]: [usize; 3] = c.dims().try_into().unwrap();
            let mut next = vec![0.0; r1];
            for (b, nv) in next.iter_mut().enumerate() {
                for (a, &ra) in row.iter().enumerate().take(r0) {
                    *nv += ra * c.get(&[a, idx[k], b]);
                }
            }
            row = next;
        }
        *gv = row[0];
    }
    DenseTensor::from_fn(&dims, |i| {
        let mut s = 0.0;
        for (lin, gv) in g.iter().enumerate() {
            let j = multi_index(lin, &red);
            let mut p = *gv;
            for k in 0..d {
                p *= x.factor(k)[(i[k], j[k])];
            }
            s += p;
        }
        s
    })
}
