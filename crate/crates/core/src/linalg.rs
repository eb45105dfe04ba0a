//! Thin wrappers over the nalgebra factorizations with the conventions the rest
//! of the crate relies on: descending singular values, a fixed sign gauge, thin QR.

use nalgebra::{DMatrix, SymmetricEigen, SVD};

use crate::error::{arg_err, Error, Result};

pub type Mat = DMatrix<f64>;

/// How many singular triplets `truncated_svd` keeps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Truncation {
    /// Keep exactly `r` triplets, `1 <= r <= min(rows, cols)`.
    Rank(usize),
    /// Keep the fewest triplets whose discarded energy is at most `eps * ||M||_F`.
    Tolerance(f64),
}

#[derive(Clone, Debug)]
pub struct SvdResult {
    pub left: Mat,
    pub singular: Vec<f64>,
    /// `r x cols`, rows orthonormal.
    pub right_t: Mat,
    /// Sum of squares of the discarded singular values.
    pub tail_energy: f64,
}

impl SvdResult {
    pub fn rank(&self) -> usize {
        self.singular.len()
    }

    /// `diag(s) * right_t`.
    pub fn s_vt(&self) -> Mat {
        let mut m = self.right_t.clone();
        for (i, s) in self.singular.iter().enumerate() {
            m.row_mut(i).scale_mut(*s);
        }
        m
    }
}

fn check_finite(m: &Mat, what: &'static str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Full thin SVD with singular values sorted descending (stable on ties) and
/// the largest-magnitude entry of every left singular vector made non-negative.
pub fn full_svd(m: &Mat) -> Result<SvdResult> {
    check_finite(m, "svd input")?;
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Ok(SvdResult {
            left: Mat::zeros(rows, 0),
            singular: vec![],
            right_t: Mat::zeros(0, cols),
            tail_energy: 0.0,
        });
    }
    let svd = SVD::try_new(m.clone(), true, true, f64::EPSILON, 0).ok_or(Error::SvdFailed)?;
    let u = svd.u.ok_or(Error::SvdFailed)?;
    let vt = svd.v_t.ok_or(Error::SvdFailed)?;
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap());
    let mut left = Mat::zeros(rows, k);
    let mut right_t = Mat::zeros(k, cols);
    let mut singular = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        let mut ucol = u.column(src).clone_owned();
        let mut vrow = vt.row(src).clone_owned();
        let mut best = 0;
        for i in 0..rows {
            if ucol[i].abs() > ucol[best].abs() {
                best = i;
            }
        }
        if ucol[best] < 0.0 {
            ucol.neg_mut();
            vrow.neg_mut();
        }
        left.set_column(dst, &ucol);
        right_t.set_row(dst, &vrow);
        singular.push(s[src]);
    }
    Ok(SvdResult {
        left,
        singular,
        right_t,
        tail_energy: 0.0,
    })
}

pub fn truncated_svd(m: &Mat, target: Truncation) -> Result<SvdResult> {
    let full = full_svd(m)?;
    let k = full.singular.len();
    let r = match target {
        Truncation::Rank(r) => {
            if r == 0 || r > k {
                return arg_err(format!("rank {r} outside 1..={k}"));
            }
            r
        }
        Truncation::Tolerance(eps) => {
            if !(eps >= 0.0) {
                return arg_err("tolerance must be non-negative");
            }
            let total: f64 = full.singular.iter().map(|s| s * s).sum();
            let budget = eps * eps * total;
            let mut r = k;
            let mut tail = 0.0;
            while r > 1 {
                let next = tail + full.singular[r - 1].powi(2);
                if next > budget {
                    break;
                }
                tail = next;
                r -= 1;
            }
            r.max(1).min(k.max(1))
        }
    };
    let r = r.min(k);
    let tail_energy = full.singular[r..].iter().map(|s| s * s).sum();
    Ok(SvdResult {
        left: full.left.columns(0, r).clone_owned(),
        singular: full.singular[..r].to_vec(),
        right_t: full.right_t.rows(0, r).clone_owned(),
        tail_energy,
    })
}

/// Thin QR: `Q` is `rows x min(rows, cols)` with orthonormal columns.
pub fn thin_qr(m: &Mat) -> (Mat, Mat) {
    let qr = m.clone().qr();
    (qr.q(), qr.r())
}

/// Thin LQ: `m = L * Q` with `Q` having orthonormal rows.
pub fn thin_lq(m: &Mat) -> (Mat, Mat) {
    let (q, r) = thin_qr(&m.transpose());
    (r.transpose(), q.transpose())
}

/// Pseudo-inverse of a symmetric positive semidefinite Gram matrix `B Bᵀ`, where
/// `B` has `rows x cols` shape. Singular values of `B` below
/// `max(rows, cols) * eps * sigma_max` are treated as zero. Returns the inverse
/// and the number of discarded directions.
pub fn gram_pinv(gram: &Mat, rows: usize, cols: usize) -> (Mat, usize) {
    let n = gram.nrows();
    if n == 0 {
        return (Mat::zeros(0, 0), 0);
    }
    let sym = (gram + gram.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let smax = lmax.max(0.0).sqrt();
    let cutoff = rows.max(cols) as f64 * f64::EPSILON * smax;
    let mut inv = Mat::zeros(n, n);
    let mut dropped = 0;
    for k in 0..n {
        let l = eig.eigenvalues[k];
        if l <= 0.0 || l.sqrt() <= cutoff {
            dropped += 1;
            continue;
        }
        let v = eig.eigenvectors.column(k);
        inv += (v * v.transpose()) / l;
    }
    (inv, dropped)
}
