//! Test problems: the Kronecker-sum Laplacian, the Henon-Heiles Hamiltonian and
//! grid-sampled target functions.
//!
//! The kinetic term is the Kronecker sum of `A = tridiag(-1, 2, -1)` (the
//! negated second-difference matrix, no `1/h²` scaling), so both operators are
//! symmetric positive definite on the default domain.

use std::f64::consts::PI;

use crate::dense::DenseTensor;
use crate::error::{arg_err, Result};
use crate::sfett::check_cap;
use crate::tt::{TtOperator, TtTensor};

/// Coupling constant of the Henon-Heiles potential.
pub const HENON_LAMBDA: f64 = 0.111803;

/// Uniform grid with `n` points on `[lower, upper]` in each of `d` modes.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub d: usize,
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
}

impl GridSpec {
    pub fn new(d: usize, n: usize, lower: f64, upper: f64) -> Result<Self> {
        if n < 2 || !(lower < upper) || d == 0 {
            return arg_err(format!("invalid grid d = {d}, n = {n}, [{lower}, {upper}]"));
        }
        Ok(Self { d, n, lower, upper })
    }

    /// Henon-Heiles default: `[-5, 5]`.
    pub fn henon_default(d: usize, n: usize) -> Self {
        Self { d, n, lower: -5.0, upper: 5.0 }
    }

    pub fn points(&self) -> Vec<f64> {
        let h = (self.upper - self.lower) / (self.n - 1) as f64;
        (0..self.n).map(|j| self.lower + j as f64 * h).collect()
    }
}

fn tridiag(i: usize, j: usize) -> f64 {
    if i == j {
        2.0
    } else if i.abs_diff(j) == 1 {
        -1.0
    } else {
        0.0
    }
}

/// Kronecker sum of `tridiag(-1, 2, -1)` over `d` modes as a rank-2 TT operator.
pub fn laplace_op(d: usize, n: usize) -> Result<TtOperator> {
    if d < 2 || n < 2 {
        return arg_err("laplace_op needs d >= 2 and n >= 2");
    }
    let a = tridiag;
    let eye = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let cores = (0..d)
        .map(|k| {
            if k == 0 {
                // [A, I]
                DenseTensor::from_fn(&[1, n, n, 2], |x| if x[3] == 0 { a(x[1], x[2]) } else { eye(x[1], x[2]) })
            } else if k == d - 1 {
                // [I; A]
                DenseTensor::from_fn(&[2, n, n, 1], |x| if x[0] == 0 { eye(x[1], x[2]) } else { a(x[1], x[2]) })
            } else {
                // [[I, 0], [A, I]]
                DenseTensor::from_fn(&[2, n, n, 2], |x| match (x[0], x[3]) {
                    (0, 0) | (1, 1) => eye(x[1], x[2]),
                    (1, 0) => a(x[1], x[2]),
                    _ => 0.0,
                })
            }
        })
        .collect();
    TtOperator::new(cores)
}

/// Smallest eigenvalue of [`laplace_op`]: `d · 4 sin²(π / (2(n+1)))`.
pub fn laplace_min_eig(d: usize, n: usize) -> f64 {
    d as f64 * 4.0 * (PI / (2.0 * (n as f64 + 1.0))).sin().powi(2)
}

/// `V(x) = ½ Σ x_k² + λ Σ (x_k² x_{k+1} - x_{k+1}³ / 3)`.
pub fn henon_potential(x: &[f64], lambda: f64) -> f64 {
    let mut v = 0.5 * x.iter().map(|t| t * t).sum::<f64>();
    for k in 0..x.len().saturating_sub(1) {
        v += lambda * (x[k] * x[k] * x[k + 1] - x[k + 1].powi(3) / 3.0);
    }
    v
}

/// The potential sampled on the grid as a TT tensor of rank 3 (rank 2 when
/// `lambda = 0`), built from the running sum with state `(S, x_k², 1)`.
pub fn henon_potential_tt(grid: &GridSpec, lambda: f64) -> Result<TtTensor> {
    let d = grid.d;
    if d < 2 {
        return arg_err("the potential needs d >= 2");
    }
    let x = grid.points();
    let n = grid.n;
    let single = |t: f64| 0.5 * t * t - lambda * t.powi(3) / 3.0;
    let coupled = lambda != 0.0;
    let r = if coupled { 3 } else { 2 };
    // state layout: 0 = S, 1 = 1, 2 = x² (only when coupled)
    let cores = (0..d)
        .map(|k| {
            if k == 0 {
                DenseTensor::from_fn(&[1, n, r], |i| {
                    let t = x[i[1]];
                    match i[2] {
                        0 => 0.5 * t * t,
                        1 => 1.0,
                        _ => t * t,
                    }
                })
            } else if k == d - 1 {
                DenseTensor::from_fn(&[r, n, 1], |i| {
                    let t = x[i[1]];
                    match i[0] {
                        0 => 1.0,
                        1 => single(t),
                        _ => lambda * t,
                    }
                })
            } else {
                DenseTensor::from_fn(&[r, n, r], |i| {
                    let t = x[i[1]];
                    match (i[0], i[2]) {
                        (0, 0) | (1, 1) => 1.0,
                        (1, 0) => single(t),
                        (2, 0) => lambda * t,
                        (1, 2) => t * t,
                        _ => 0.0,
                    }
                })
            }
        })
        .collect();
    TtTensor::new(cores)
}

/// `H = L + diag(V̂)` with the Kronecker-sum kinetic term of [`laplace_op`].
pub fn henon_hamiltonian(grid: &GridSpec, lambda: f64) -> Result<TtOperator> {
    let v = henon_potential_tt(grid, lambda)?;
    laplace_op(grid.d, grid.n)?.add(&TtOperator::diag(&v))
}

/// Sampled target functions.
#[derive(Clone, Debug, PartialEq)]
pub enum GridFunction {
    /// `1 / (1 + Σ c_i x_i)` with `c_i = i + 1` (1-based `i`) on the points `points`.
    Hilbert { d: usize, points: Vec<f64> },
    /// `exp(-α x²)` on `base^levels` uniform points of `[lower, upper]`, reshaped
    /// into `levels` modes of size `base` with the first digit least significant.
    GaussQtt { base: usize, levels: usize, alpha: f64, lower: f64, upper: f64 },
}

impl GridFunction {
    /// Hilbert-type function on the default grid `x_k = k / n`, `k = 1..n`.
    pub fn hilbert(d: usize, n: usize) -> Self {
        Self::Hilbert { d, points: (1..=n).map(|k| k as f64 / n as f64).collect() }
    }

    /// Gaussian on `[-1, 1]`.
    pub fn gauss_qtt(base: usize, levels: usize, alpha: f64) -> Self {
        Self::GaussQtt { base, levels, alpha, lower: -1.0, upper: 1.0 }
    }

    pub fn dims(&self) -> Vec<usize> {
        match self {
            Self::Hilbert { d, points } => vec![points.len(); *d],
            Self::GaussQtt { base, levels, .. } => vec![*base; *levels],
        }
    }

    pub fn tensor(&self) -> Result<DenseTensor> {
        let dims = self.dims();
        if dims.is_empty() || dims.contains(&0) {
            return arg_err("empty grid");
        }
        check_cap(&dims)?;
        match self {
            Self::Hilbert { points, .. } => Ok(DenseTensor::from_fn(&dims, |i| {
                let s: f64 = i.iter().enumerate().map(|(k, &j)| (k + 2) as f64 * points[j]).sum();
                1.0 / (1.0 + s)
            })),
            Self::GaussQtt { base, levels, alpha, lower, upper } => {
                if *base < 2 {
                    return arg_err("QTT base must be at least 2");
                }
                let total = base.pow(*levels as u32);
                let h = (upper - lower) / (total.max(2) - 1) as f64;
                let data = (0..total)
                    .map(|j| {
                        let x = lower + j as f64 * h;
                        (-alpha * x * x).exp()
                    })
                    .collect();
                DenseTensor::new(dims, data)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat;

    #[test]
    fn laplace_small_dense() {
        let op = laplace_op(2, 2).unwrap();
        let m = op.to_dense_matrix();
        let a = Mat::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]);
        let i = Mat::identity(2, 2);
        let expect = a.kronecker(&i) + i.kronecker(&a);
        assert_eq!(m, expect);
        assert_eq!(laplace_op(5, 3).unwrap().ranks(), vec![2; 4]);
    }

    #[test]
    fn laplace_spectrum() {
        let m = laplace_op(2, 4).unwrap().to_dense_matrix();
        let (l, _) = crate::oracle::dense_min_eig(&m).unwrap();
        assert!((l - laplace_min_eig(2, 4)).abs() < 1e-12);
        assert!((laplace_min_eig(2, 4) - 8.0 * (PI / 10.0).sin().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn henon_potential_pointwise() {
        let grid = GridSpec::henon_default(3, 8);
        let v = henon_potential_tt(&grid, HENON_LAMBDA).unwrap();
        assert!(v.ranks().iter().all(|&r| r <= 3));
        let x = grid.points();
        let dense = v.to_dense();
        for i in 0..8 {
            for j in 0..8 {
                for k in 0..8 {
                    let expect = henon_potential(&[x[i], x[j], x[k]], HENON_LAMBDA);
                    assert!((dense.get(&[i, j, k]) - expect).abs() < 1e-12 * expect.abs().max(1.0));
                }
            }
        }
        let v0 = henon_potential_tt(&grid, 0.0).unwrap();
        assert!(v0.ranks().iter().all(|&r| r <= 2));
    }

    #[test]
    fn hamiltonian_is_symmetric() {
        let m = henon_hamiltonian(&GridSpec::henon_default(2, 5), HENON_LAMBDA).unwrap().to_dense_matrix();
        assert!((&m - m.transpose()).norm() <= 1e-12 * m.norm());
    }

    #[test]
    fn grid_functions() {
        let t = GridFunction::Hilbert { d: 1, points: vec![0.5, 1.0] }.tensor().unwrap();
        assert_eq!(t.data(), &[0.5, 1.0 / 3.0]);
        assert_eq!(GridFunction::hilbert(1, 2), GridFunction::Hilbert { d: 1, points: vec![0.5, 1.0] });
        let g = GridFunction::gauss_qtt(2, 5, 0.0).tensor().unwrap();
        assert!(g.data().iter().all(|&v| v == 1.0));
        assert_eq!(g.dims(), &[2; 5]);
        let g = GridFunction::gauss_qtt(2, 3, 1.0).tensor().unwrap();
        let x: f64 = -1.0 + 2.0 * 5.0 / 7.0;
        assert!((g.get(&[1, 0, 1]) - (-x * x).exp()).abs() < 1e-15);
    }
}
