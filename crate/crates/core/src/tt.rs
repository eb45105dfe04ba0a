//! Tensor trains and TT operators.
//!
//! A core `W^(k)` is an order-3 [`DenseTensor`] of dims `(r_{k-1}, n_k, r_k)`.
//! `unfold(2)` of a core is its left unfolding `L(W)`, `unfold(1)` the right
//! unfolding `R(W)`. Core positions are 0-based.

use crate::dense::DenseTensor;
use crate::error::{arg_err, shape_err, Result};
use crate::linalg::{thin_lq, thin_qr, truncated_svd, Mat, Truncation};

/// Which cores are known to be orthogonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orth {
    None,
    /// Cores before `mu` left-orthogonal, cores after `mu` right-orthogonal.
    Mu(usize),
}

pub(crate) fn left(w: &DenseTensor) -> Mat {
    w.unfold_unchecked(2)
}

pub(crate) fn right(w: &DenseTensor) -> Mat {
    w.unfold_unchecked(1)
}

pub(crate) fn core_from(m: &Mat, r0: usize, n: usize, r1: usize) -> DenseTensor {
    debug_assert_eq!(m.len(), r0 * n * r1);
    DenseTensor::new(vec![r0, n, r1], m.as_slice().to_vec()).expect("core shape")
}

/// Mode-2 matricization of a core: `n x (r0 r1)`.
pub(crate) fn mode2(w: &DenseTensor) -> Mat {
    w.matricize(1).expect("order-3 core")
}

#[derive(Clone, Debug, PartialEq)]
pub struct TtTensor {
    cores: Vec<DenseTensor>,
    orth: Orth,
}

impl TtTensor {
    pub fn new(cores: Vec<DenseTensor>) -> Result<Self> {
        if cores.is_empty() {
            return arg_err("a tensor train needs at least one core");
        }
        let mut prev = 1;
        for (k, c) in cores.iter().enumerate() {
            if c.order() != 3 {
                return shape_err(format!("core {k} has order {}", c.order()));
            }
            if c.dims()[0] != prev {
                return shape_err(format!("core {k} left rank {} != {prev}", c.dims()[0]));
            }
            prev = c.dims()[2];
        }
        if prev != 1 {
            return shape_err("last core must have right rank 1");
        }
        Ok(Self { cores, orth: Orth::None })
    }

    pub fn cores(&self) -> &[DenseTensor] {
        &self.cores
    }

    pub fn into_cores(self) -> Vec<DenseTensor> {
        self.cores
    }

    pub fn order(&self) -> usize {
        self.cores.len()
    }

    pub fn orth(&self) -> Orth {
        self.orth
    }

    pub fn dims(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.dims()[1]).collect()
    }

    /// Inner ranks `r_1..r_{d-1}`.
    pub fn ranks(&self) -> Vec<usize> {
        self.cores[..self.order() - 1].iter().map(|c| c.dims()[2]).collect()
    }

    /// TT-SVD: successive truncated SVDs of the unfoldings, left to right.
    /// Ranks beyond the unfolding dimensions are clamped.
    pub fn svd(x: &DenseTensor, ranks: &[usize]) -> Result<Self> {
        let d = x.order();
        if ranks.len() + 1 != d {
            return shape_err(format!("{} ranks for order {d}", ranks.len()));
        }
        if ranks.contains(&0) {
            return arg_err("TT ranks must be at least 1");
        }
        let dims = x.dims();
        let mut cores = Vec::with_capacity(d);
        let mut rest = x.data().to_vec();
        let mut r_prev = 1;
        for k in 0..d - 1 {
            let rows = r_prev * dims[k];
            let cols = rest.len() / rows;
            let m = Mat::from_vec(rows, cols, rest);
            let r = ranks[k].min(rows).min(cols);
            let s = truncated_svd(&m, Truncation::Rank(r))?;
            cores.push(core_from(&s.left, r_prev, dims[k], r));
            rest = s.s_vt().as_slice().to_vec();
            r_prev = r;
        }
        cores.push(DenseTensor::new(vec![r_prev, dims[d - 1], 1], rest)?);
        Ok(Self { cores, orth: Orth::Mu(d - 1) })
    }

    pub fn to_dense(&self) -> DenseTensor {
        let mut cur = left(&self.cores[0]);
        for c in &self.cores[1..] {
            let prod = &cur * right(c);
            let rows = cur.nrows() * c.dims()[1];
            cur = Mat::from_vec(rows, c.dims()[2], prod.as_slice().to_vec());
        }
        DenseTensor::new(self.dims(), cur.as_slice().to_vec()).expect("dims")
    }

    /// Brings the train into `mu`-orthogonal form by QR sweeps from the left
    /// and LQ sweeps from the right. Ranks may shrink where they exceed what
    /// the neighbouring dimensions can support.
    pub fn orthogonalize(&self, mu: usize) -> Result<Self> {
        let d = self.order();
        if mu >= d {
            return arg_err(format!("position {mu} out of range for order {d}"));
        }
        let mut cores = self.cores.clone();
        for k in 0..mu {
            left_orth_step(&mut cores, k);
        }
        for k in (mu + 1..d).rev() {
            right_orth_step(&mut cores, k);
        }
        Ok(Self { cores, orth: Orth::Mu(mu) })
    }

    /// TT rounding: right-to-left orthogonalization, then left-to-right truncation.
    pub fn round(&self, ranks: &[usize]) -> Result<Self> {
        let d = self.order();
        if ranks.len() + 1 != d {
            return shape_err(format!("{} ranks for order {d}", ranks.len()));
        }
        if ranks.contains(&0) {
            return arg_err("TT ranks must be at least 1");
        }
        let mut cores = self.orthogonalize(0)?.cores;
        for k in 0..d - 1 {
            let [r0, n, r1]: [usize; 3] = cores[k].dims().try_into().unwrap();
            let m = left(&cores[k]);
            let r = ranks[k].min(r0 * n).min(r1);
            let s = truncated_svd(&m, Truncation::Rank(r))?;
            cores[k] = core_from(&s.left, r0, n, r);
            let next = &cores[k + 1];
            let [_, n1, r2]: [usize; 3] = next.dims().try_into().unwrap();
            cores[k + 1] = core_from(&(s.s_vt() * right(next)), r, n1, r2);
        }
        Ok(Self { cores, orth: Orth::Mu(d - 1) })
    }

    /// `X_{<=count}`: product of the first `count` cores as an
    /// `(n_1..n_count) x r_count` matrix; `1 x 1` ones for `count = 0`.
    pub fn left_interface(&self, count: usize) -> Mat {
        let mut cur = Mat::from_element(1, 1, 1.0);
        for c in &self.cores[..count] {
            let prod = &cur * right(c);
            let rows = cur.nrows() * c.dims()[1];
            cur = Mat::from_vec(rows, c.dims()[2], prod.as_slice().to_vec());
        }
        cur
    }

    /// Product of the cores from 0-based position `start` on as an
    /// `(n_start..n_d) x r_{start-1}` matrix; `1 x 1` ones for `start = d`.
    pub fn right_interface(&self, start: usize) -> Mat {
        let mut cur = Mat::from_element(1, 1, 1.0);
        for c in self.cores[start..].iter().rev() {
            let prod = left(c) * &cur;
            let r0 = c.dims()[0];
            cur = Mat::from_vec(r0, prod.len() / r0, prod.as_slice().to_vec());
        }
        cur.transpose()
    }

    /// `(X_{<=split}, X_{>=split+1})`, so that `unfold(split) = L * Rᵀ`.
    pub fn interfaces(&self, split: usize) -> Result<(Mat, Mat)> {
        if split > self.order() {
            return arg_err(format!("split {split} out of range for order {}", self.order()));
        }
        Ok((self.left_interface(split), self.right_interface(split)))
    }

    pub fn scale(&self, alpha: f64) -> Self {
        let mut cores = self.cores.clone();
        let k = match self.orth {
            Orth::Mu(mu) => mu,
            Orth::None => self.order() - 1,
        };
        cores[k] = cores[k].scale(alpha);
        Self { cores, orth: self.orth }
    }
}

pub(crate) fn left_orth_step(cores: &mut [DenseTensor], k: usize) {
    let [r0, n, _]: [usize; 3] = cores[k].dims().try_into().unwrap();
    let (q, r) = thin_qr(&left(&cores[k]));
    let rk = q.ncols();
    cores[k] = core_from(&q, r0, n, rk);
    let [_, n1, r2]: [usize; 3] = cores[k + 1].dims().try_into().unwrap();
    cores[k + 1] = core_from(&(r * right(&cores[k + 1])), rk, n1, r2);
}

pub(crate) fn right_orth_step(cores: &mut [DenseTensor], k: usize) {
    let [_, n, r1]: [usize; 3] = cores[k].dims().try_into().unwrap();
    let (l, q) = thin_lq(&right(&cores[k]));
    let rk = q.nrows();
    cores[k] = core_from(&q, rk, n, r1);
    let [r0, n0, _]: [usize; 3] = cores[k - 1].dims().try_into().unwrap();
    cores[k - 1] = core_from(&(left(&cores[k - 1]) * l), r0, n0, rk);
}

/// TT operator with cores of dims `(R_{k-1}, m_k, n_k, R_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TtOperator {
    cores: Vec<DenseTensor>,
}

impl TtOperator {
    pub fn new(cores: Vec<DenseTensor>) -> Result<Self> {
        if cores.is_empty() {
            return arg_err("a TT operator needs at least one core");
        }
        let mut prev = 1;
        for (k, c) in cores.iter().enumerate() {
            if c.order() != 4 {
                return shape_err(format!("operator core {k} has order {}", c.order()));
            }
            if c.dims()[0] != prev {
                return shape_err(format!("operator core {k} left rank {} != {prev}", c.dims()[0]));
            }
            prev = c.dims()[3];
        }
        if prev != 1 {
            return shape_err("last operator core must have right rank 1");
        }
        Ok(Self { cores })
    }

    /// Identity on the given mode sizes.
    pub fn identity(dims: &[usize]) -> Self {
        let cores = dims
            .iter()
            .map(|&n| DenseTensor::from_fn(&[1, n, n, 1], |i| if i[1] == i[2] { 1.0 } else { 0.0 }))
            .collect();
        Self { cores }
    }

    /// Diagonal operator `diag(v)` with the entries of the tensor train `v`.
    pub fn diag(v: &TtTensor) -> Self {
        let cores = v
            .cores()
            .iter()
            .map(|w| {
                let [r0, n, r1]: [usize; 3] = w.dims().try_into().unwrap();
                DenseTensor::from_fn(&[r0, n, n, r1], |i| {
                    if i[1] == i[2] {
                        w.get(&[i[0], i[1], i[3]])
                    } else {
                        0.0
                    }
                })
            })
            .collect();
        Self { cores }
    }

    pub fn cores(&self) -> &[DenseTensor] {
        &self.cores
    }

    pub fn order(&self) -> usize {
        self.cores.len()
    }

    pub fn row_dims(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.dims()[1]).collect()
    }

    pub fn col_dims(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.dims()[2]).collect()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.cores[..self.order() - 1].iter().map(|c| c.dims()[3]).collect()
    }

    /// `Y^(k)(i) = Σ_j H^(k)(i, j) ⊗ W^(k)(j)`; ranks multiply.
    pub fn apply(&self, x: &TtTensor) -> Result<TtTensor> {
        if self.col_dims() != x.dims() {
            return shape_err(format!("operator columns {:?} vs tensor {:?}", self.col_dims(), x.dims()));
        }
        let cores = self
            .cores
            .iter()
            .zip(x.cores())
            .map(|(h, w)| apply_core(h, w))
            .collect();
        TtTensor::new(cores)
    }

    /// Block-diagonal concatenation, representing `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.row_dims() != other.row_dims() || self.col_dims() != other.col_dims() {
            return shape_err("operator dims differ");
        }
        let d = self.order();
        let cores = (0..d)
            .map(|k| {
                let a = &self.cores[k];
                let b = &other.cores[k];
                let [ra0, m, n, ra1]: [usize; 4] = a.dims().try_into().unwrap();
                let [rb0, _, _, rb1]: [usize; 4] = b.dims().try_into().unwrap();
                let (r0, off0) = if k == 0 { (1, 0) } else { (ra0 + rb0, ra0) };
                let (r1, off1) = if k == d - 1 { (1, 0) } else { (ra1 + rb1, ra1) };
                let mut c = DenseTensor::zeros(&[r0, m, n, r1]);
                for a1 in 0..ra1 {
                    for j in 0..n {
                        for i in 0..m {
                            for a0 in 0..ra0 {
                                let v = c.get(&[a0, i, j, a1]) + a.get(&[a0, i, j, a1]);
                                c.set(&[a0, i, j, a1], v);
                            }
                        }
                    }
                }
                for b1 in 0..rb1 {
                    for j in 0..n {
                        for i in 0..m {
                            for b0 in 0..rb0 {
                                let idx = [b0 + off0, i, j, b1 + off1];
                                let v = c.get(&idx) + b.get(&[b0, i, j, b1]);
                                c.set(&idx, v);
                            }
                        }
                    }
                }
                c
            })
            .collect();
        Self::new(cores)
    }

    /// Dense `(Π m_k) x (Π n_k)` matrix, multi-indices first-index-fastest.
    pub fn to_dense_matrix(&self) -> Mat {
        let mut blocks = vec![Mat::from_element(1, 1, 1.0)];
        for h in &self.cores {
            let [r0, m, n, r1]: [usize; 4] = h.dims().try_into().unwrap();
            let rows = blocks[0].nrows() * m;
            let cols = blocks[0].ncols() * n;
            let mut next = vec![Mat::zeros(rows, cols); r1];
            for (a1, nb) in next.iter_mut().enumerate() {
                for (a0, old) in blocks.iter().enumerate().take(r0) {
                    let slice = Mat::from_fn(m, n, |i, j| h.get(&[a0, i, j, a1]));
                    if slice.iter().all(|v| *v == 0.0) {
                        continue;
                    }
                    *nb += slice.kronecker(old);
                }
            }
            blocks = next;
        }
        blocks.pop().unwrap()
    }
}

fn apply_core(h: &DenseTensor, w: &DenseTensor) -> DenseTensor {
    let [ra0, m, n, ra1]: [usize; 4] = h.dims().try_into().unwrap();
    let [rb0, _, rb1]: [usize; 3] = w.dims().try_into().unwrap();
    let mut y = DenseTensor::zeros(&[ra0 * rb0, m, ra1 * rb1]);
    for a1 in 0..ra1 {
        for j in 0..n {
            for i in 0..m {
                for a0 in 0..ra0 {
                    let hv = h.get(&[a0, i, j, a1]);
                    if hv == 0.0 {
                        continue;
                    }
                    for b1 in 0..rb1 {
                        for b0 in 0..rb0 {
                            let idx = [b0 + rb0 * a0, i, b1 + rb1 * a1];
                            let v = y.get(&idx) + hv * w.get(&[b0, j, b1]);
                            y.set(&idx, v);
                        }
                    }
                }
            }
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{gaussian_tensor, random_tt};

    fn rel(a: &DenseTensor, b: &DenseTensor) -> f64 {
        a.sub(b).unwrap().norm() / b.norm().max(1e-300)
    }

    #[test]
    fn full_rank_roundtrip() {
        let x = gaussian_tensor(&[2, 2, 2], 1);
        let t = TtTensor::svd(&x, &[2, 2]).unwrap();
        assert!(rel(&t.to_dense(), &x) < 1e-12);
        let x = gaussian_tensor(&[3, 4, 2, 3], 2);
        let t = TtTensor::svd(&x, &[100, 100, 100]).unwrap();
        assert_eq!(t.ranks(), vec![3, 6, 3]);
        assert!(rel(&t.to_dense(), &x) < 1e-12);
    }

    #[test]
    fn rank_one_tensor() {
        let a = [1.0, 2.0];
        let b = [0.5, -1.0, 2.0];
        let c = [3.0, 1.0];
        let x = DenseTensor::from_fn(&[2, 3, 2], |i| a[i[0]] * b[i[1]] * c[i[2]]);
        let t = TtTensor::svd(&x, &[1, 1]).unwrap();
        assert!(rel(&t.to_dense(), &x) < 1e-13);
        let w1 = t.cores()[1].data();
        assert!((w1[0] * b[1] - w1[1] * b[0]).abs() < 1e-12);
    }

    #[test]
    fn all_ones_chain() {
        let cores = vec![
            DenseTensor::new(vec![1, 2, 2], vec![1.0; 4]).unwrap(),
            DenseTensor::new(vec![2, 2, 2], vec![1.0; 8]).unwrap(),
            DenseTensor::new(vec![2, 2, 1], vec![1.0; 4]).unwrap(),
        ];
        let t = TtTensor::new(cores).unwrap();
        assert!(t.to_dense().data().iter().all(|&v| v == 4.0));
    }

    #[test]
    fn single_core() {
        let w = DenseTensor::new(vec![1, 3, 1], vec![1.0, 2.0, 3.0]).unwrap();
        let t = TtTensor::new(vec![w]).unwrap();
        assert_eq!(t.to_dense().data(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn orthogonalize_preserves_and_orthogonalizes() {
        let t = random_tt(&[3, 4, 5, 3], &[2, 3, 2], 3);
        let dense = t.to_dense();
        for mu in 0..4 {
            let o = t.orthogonalize(mu).unwrap();
            assert!(rel(&o.to_dense(), &dense) < 1e-12);
            for k in 0..mu {
                let l = left(&o.cores()[k]);
                let g = l.transpose() * &l;
                assert!((&g - Mat::identity(g.nrows(), g.ncols())).norm() < 1e-12);
            }
            for k in mu + 1..4 {
                let r = right(&o.cores()[k]);
                let g = &r * r.transpose();
                assert!((&g - Mat::identity(g.nrows(), g.ncols())).norm() < 1e-12);
            }
            assert!((o.cores()[mu].norm() - dense.norm()).abs() < 1e-12 * dense.norm());
        }
    }

    #[test]
    fn rounding_exact_and_padded() {
        let t = random_tt(&[3, 4, 4, 3], &[2, 3, 2], 5);
        let r = t.round(&[2, 3, 2]).unwrap();
        assert!(rel(&r.to_dense(), &t.to_dense()) < 1e-12);
        // zero-padding every inner rank by one
        let d = t.order();
        let padded: Vec<DenseTensor> = t
            .cores()
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let [r0, n, r1]: [usize; 3] = c.dims().try_into().unwrap();
                let p0 = if k == 0 { 1 } else { r0 + 1 };
                let p1 = if k == d - 1 { 1 } else { r1 + 1 };
                DenseTensor::from_fn(&[p0, n, p1], |i| {
                    if i[0] < r0 && i[2] < r1 {
                        c.get(i)
                    } else {
                        0.0
                    }
                })
            })
            .collect();
        let p = TtTensor::new(padded).unwrap();
        let r = p.round(&[2, 3, 2]).unwrap();
        assert_eq!(r.ranks(), vec![2, 3, 2]);
        assert!(rel(&r.to_dense(), &t.to_dense()) < 1e-12);
    }

    #[test]
    fn interfaces_factor_unfoldings() {
        let t = random_tt(&[3, 2, 4, 2], &[2, 3, 2], 7);
        let dense = t.to_dense();
        for split in 1..4 {
            let (l, r) = t.interfaces(split).unwrap();
            let u = dense.unfold(split).unwrap();
            assert!((&l * r.transpose() - u).norm() < 1e-12 * dense.norm());
        }
        let (l, r) = t.interfaces(4).unwrap();
        assert_eq!(l.shape(), (48, 1));
        assert_eq!(r.shape(), (1, 1));
        let o = t.orthogonalize(3).unwrap();
        let l = o.left_interface(3);
        assert!((l.transpose() * &l - Mat::identity(l.ncols(), l.ncols())).norm() < 1e-12);
    }

    #[test]
    fn operator_apply_matches_dense() {
        let x = random_tt(&[2, 3, 2], &[2, 2], 11);
        let id = TtOperator::identity(&[2, 3, 2]);
        assert!(rel(&id.apply(&x).unwrap().to_dense(), &x.to_dense()) < 1e-14);
        let op = crate::testing::random_op(&[2, 3, 2], &[2, 3], 12);
        let y = op.apply(&x).unwrap();
        let m = op.to_dense_matrix();
        let v = nalgebra::DVector::from_column_slice(x.to_dense().data());
        let expect = &m * v;
        let got = y.to_dense();
        assert!((nalgebra::DVector::from_column_slice(got.data()) - &expect).norm() < 1e-12 * expect.norm());
        assert_eq!(y.ranks(), vec![4, 6]);
    }

    #[test]
    fn operator_add_and_diag() {
        let a = crate::testing::random_op(&[2, 3, 2], &[2, 2], 13);
        let b = crate::testing::random_op(&[2, 3, 2], &[1, 3], 14);
        let s = a.add(&b).unwrap();
        assert_eq!(s.ranks(), vec![3, 5]);
        let diff = s.to_dense_matrix() - (a.to_dense_matrix() + b.to_dense_matrix());
        assert!(diff.norm() < 1e-12);
        let v = random_tt(&[2, 3, 2], &[2, 2], 15);
        let dv = v.to_dense();
        let m = TtOperator::diag(&v).to_dense_matrix();
        for i in 0..dv.len() {
            assert!((m[(i, i)] - dv.data()[i]).abs() < 1e-14);
        }
        assert!((m.norm_squared() - dv.norm().powi(2)).abs() < 1e-12);
    }
}
