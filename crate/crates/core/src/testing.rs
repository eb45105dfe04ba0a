//! Seeded random builders shared by unit tests.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dense::DenseTensor;
use crate::linalg::Mat;
use crate::tt::{TtOperator, TtTensor};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn gaussian_tensor(dims: &[usize], seed: u64) -> DenseTensor {
    let mut r = rng(seed);
    let len = dims.iter().product();
    DenseTensor::new(dims.to_vec(), gaussian_vec(&mut r, len)).unwrap()
}

pub fn gaussian_mat(rows: usize, cols: usize, seed: u64) -> Mat {
    let mut r = rng(seed);
    Mat::from_vec(rows, cols, gaussian_vec(&mut r, rows * cols))
}

pub fn random_tt(dims: &[usize], ranks: &[usize], seed: u64) -> TtTensor {
    let mut r = rng(seed);
    let d = dims.len();
    let cores = (0..d)
        .map(|k| {
            let r0 = if k == 0 { 1 } else { ranks[k - 1] };
            let r1 = if k == d - 1 { 1 } else { ranks[k] };
            let len = r0 * dims[k] * r1;
            DenseTensor::new(vec![r0, dims[k], r1], gaussian_vec(&mut r, len)).unwrap()
        })
        .collect();
    TtTensor::new(cores).unwrap()
}

pub fn random_op(dims: &[usize], ranks: &[usize], seed: u64) -> TtOperator {
    let mut r = rng(seed);
    let d = dims.len();
    let cores = (0..d)
        .map(|k| {
            let r0 = if k == 0 { 1 } else { ranks[k - 1] };
            let r1 = if k == d - 1 { 1 } else { ranks[k] };
            let len = r0 * dims[k] * dims[k] * r1;
            DenseTensor::new(vec![r0, dims[k], dims[k], r1], gaussian_vec(&mut r, len)).unwrap()
        })
        .collect();
    TtOperator::new(cores).unwrap()
}
