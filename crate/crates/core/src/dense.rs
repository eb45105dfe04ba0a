//! Dense tensors stored first-index-fastest.
//!
//! Mode indices are 0-based. With this layout the unfolding that keeps the
//! first `split` modes in the row index is a plain reshape, and matrices are
//! nalgebra column-major, so the two agree without copying index arithmetic.

use crate::error::{arg_err, shape_err, Result};
use crate::linalg::Mat;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return arg_err(format!("invalid dims {dims:?}"));
        }
        let len: usize = dims.iter().product();
        if len != data.len() {
            return shape_err(format!("data length {} != product of dims {len}", data.len()));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: &[usize]) -> Self {
        let len = dims.iter().product();
        Self { dims: dims.to_vec(), data: vec![0.0; len] }
    }

    /// Builds a tensor by evaluating `f` at every multi-index.
    pub fn from_fn(dims: &[usize], mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let len: usize = dims.iter().product();
        let mut idx = vec![0usize; dims.len()];
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(f(&idx));
            for (k, i) in idx.iter_mut().enumerate() {
                *i += 1;
                if *i < dims[k] {
                    break;
                }
                *i = 0;
            }
        }
        Self { dims: dims.to_vec(), data }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        let mut off = 0;
        let mut stride = 1;
        for (i, n) in idx.iter().zip(&self.dims) {
            off += i * stride;
            stride *= n;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let off = self.offset(idx);
        self.data[off] = v;
    }

    /// Same data under new dims with equal total size.
    pub fn reshape(mut self, dims: Vec<usize>) -> Result<Self> {
        if dims.iter().product::<usize>() != self.data.len() || dims.contains(&0) {
            return shape_err(format!("cannot reshape {:?} into {dims:?}", self.dims));
        }
        self.dims = dims;
        Ok(self)
    }

    /// Mode-`mode` matricization: `n_mode x (N / n_mode)`, remaining modes
    /// enumerated first-index-fastest in their original order.
    pub fn matricize(&self, mode: usize) -> Result<Mat> {
        if mode >= self.order() {
            return arg_err(format!("mode {mode} out of range for order {}", self.order()));
        }
        let (p, n, q) = self.split_at_mode(mode);
        let mut m = Mat::zeros(n, p * q);
        let out = m.as_mut_slice();
        for k in 0..q {
            for j in 0..n {
                let src = &self.data[p * (j + n * k)..p * (j + n * k) + p];
                for (i, v) in src.iter().enumerate() {
                    out[j + n * (i + p * k)] = *v;
                }
            }
        }
        Ok(m)
    }

    /// Inverse of [`matricize`](Self::matricize).
    pub fn dematricize(m: &Mat, dims: &[usize], mode: usize) -> Result<Self> {
        if mode >= dims.len() {
            return arg_err(format!("mode {mode} out of range for order {}", dims.len()));
        }
        let mut t = Self::zeros(dims);
        let (p, n, q) = t.split_at_mode(mode);
        if m.shape() != (n, p * q) {
            return shape_err(format!("matrix {:?} does not match dims {dims:?} at mode {mode}", m.shape()));
        }
        let src = m.as_slice();
        for k in 0..q {
            for j in 0..n {
                for i in 0..p {
                    t.data[i + p * (j + n * k)] = src[j + n * (i + p * k)];
                }
            }
        }
        Ok(t)
    }

    /// Unfolding with the first `split` modes as rows, `1 <= split <= d - 1`.
    /// For an order-3 core, `unfold(2)` is the left and `unfold(1)` the right unfolding.
    pub fn unfold(&self, split: usize) -> Result<Mat> {
        if split == 0 || split >= self.order() {
            return arg_err(format!("split {split} out of range for order {}", self.order()));
        }
        Ok(self.unfold_unchecked(split))
    }

    /// Like [`unfold`](Self::unfold) but also accepts `split` in `0..=d`.
    pub fn unfold_unchecked(&self, split: usize) -> Mat {
        let rows: usize = self.dims[..split].iter().product();
        let cols = self.data.len() / rows;
        Mat::from_column_slice(rows, cols, &self.data)
    }

    /// Inverse of unfolding: reinterprets the column-major data of `m` under `dims`.
    pub fn fold(m: &Mat, dims: &[usize]) -> Result<Self> {
        Self::new(dims.to_vec(), m.as_slice().to_vec())
    }

    fn split_at_mode(&self, mode: usize) -> (usize, usize, usize) {
        let p = self.dims[..mode].iter().product();
        let q = self.dims[mode + 1..].iter().product();
        (p, self.dims[mode], q)
    }

    /// `X ×_mode A`: contracts mode `mode` with the columns of `a` (`m x n_mode`).
    pub fn mode_product(&self, mode: usize, a: &Mat) -> Result<Self> {
        if mode >= self.order() {
            return arg_err(format!("mode {mode} out of range for order {}", self.order()));
        }
        let (p, n, q) = self.split_at_mode(mode);
        if a.ncols() != n {
            return shape_err(format!("factor has {} columns, mode {mode} has size {n}", a.ncols()));
        }
        let m = a.nrows();
        let mut dims = self.dims.clone();
        dims[mode] = m;
        let mut out = vec![0.0; p * m * q];
        let at = a.transpose();
        for k in 0..q {
            let block = nalgebra::DMatrixView::from_slice(&self.data[p * n * k..p * n * (k + 1)], p, n);
            let prod = block * &at;
            out[p * m * k..p * m * (k + 1)].copy_from_slice(prod.as_slice());
        }
        Ok(Self { dims, data: out })
    }

    /// `⟦X; A_1, ..., A_d⟧`; `None` stands for the identity on that mode.
    pub fn multilinear_product(&self, mats: &[Option<&Mat>]) -> Result<Self> {
        if mats.len() != self.order() {
            return shape_err(format!("{} factors for order {}", mats.len(), self.order()));
        }
        let mut cur = self.clone();
        for (k, a) in mats.iter().enumerate() {
            if let Some(a) = a {
                cur = cur.mode_product(k, a)?;
            }
        }
        Ok(cur)
    }

    pub fn inner(&self, other: &Self) -> Result<f64> {
        if self.dims != other.dims {
            return shape_err(format!("dims {:?} vs {:?}", self.dims, other.dims));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self { dims: self.dims.clone(), data: self.data.iter().map(|v| alpha * v).collect() }
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return shape_err(format!("dims {:?} vs {:?}", self.dims, other.dims));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + alpha * b).collect();
        Ok(Self { dims: self.dims.clone(), data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-1.0, other)
    }
}
