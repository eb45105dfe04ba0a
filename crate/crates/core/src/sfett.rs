//! The shared-factor extended tensor train format
//! `X = ⟦T(W^(1), ..., W^(d)); U^(1), ..., U^(d_t), U, ..., U⟧`.
//!
//! The first `d_t` modes carry their own Tucker factor; the remaining
//! `d_s = d - d_t >= 1` modes all use the shared factor `U`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dense::DenseTensor;
use crate::error::{arg_err, shape_err, Error, Result};
use crate::ett::{self, Ett};
use crate::linalg::{thin_qr, truncated_svd, Mat, Truncation};
use crate::tt::{left_orth_step, mode2, Orth, TtTensor};

/// Environment variable overriding the dense materialization cap.
pub const DENSE_CAP_ENV: &str = "SFETT_DENSE_CAP";
pub const DEFAULT_DENSE_CAP: usize = 10_000_000;

/// Largest number of entries any dense materialization may have.
pub fn dense_cap() -> usize {
    std::env::var(DENSE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_CAP)
}

pub fn check_cap(dims: &[usize]) -> Result<()> {
    let size = dims.iter().try_fold(1usize, |a, &n| a.checked_mul(n)).unwrap_or(usize::MAX);
    let cap = dense_cap();
    if size > cap {
        return Err(Error::DenseTooLarge { size, cap });
    }
    Ok(())
}

/// `C(d) = √d + √d √(d-1) + √(d-1)`, the quasi-optimality constant of the SVD-based construction.
pub fn quasi_optimality_constant(d: usize) -> f64 {
    let a = (d as f64).sqrt();
    let b = (d as f64 - 1.0).sqrt();
    a + a * b + b
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SfEttRank {
    pub tt: Vec<usize>,
    pub tucker: Vec<usize>,
    pub shared: usize,
}

impl SfEttRank {
    pub fn new(tt: Vec<usize>, tucker: Vec<usize>, shared: usize) -> Self {
        Self { tt, tucker, shared }
    }

    /// Every rank equal to `r`.
    pub fn uniform(d: usize, d_t: usize, r: usize) -> Self {
        Self { tt: vec![r; d - 1], tucker: vec![r; d_t], shared: r }
    }

    fn validate(&self, d: usize, d_t: usize) -> Result<()> {
        if self.tt.len() + 1 != d || self.tucker.len() != d_t {
            return shape_err(format!("rank tuple {self:?} does not fit d = {d}, d_t = {d_t}"));
        }
        if self.tt.contains(&0) || self.tucker.contains(&0) || self.shared == 0 {
            return arg_err("ranks must be at least 1");
        }
        Ok(())
    }

    /// Reduced (core) mode size of mode `k`.
    pub fn reduced(&self, k: usize) -> usize {
        if k < self.tucker.len() {
            self.tucker[k]
        } else {
            self.shared
        }
    }

    /// Largest tuple `<=` self that a tensor of the given dims can realize.
    pub fn clamped(&self, dims: &[usize], d_t: usize) -> Self {
        let d = dims.len();
        let mut r = self.clone();
        for _ in 0..d + 1 {
            let tt_at = |r: &SfEttRank, k: isize| -> usize {
                if k < 0 || k as usize >= d - 1 {
                    1
                } else {
                    r.tt[k as usize]
                }
            };
            for (i, &n) in dims.iter().enumerate().take(d_t) {
                let cap = tt_at(&r, i as isize - 1).saturating_mul(tt_at(&r, i as isize));
                r.tucker[i] = r.tucker[i].min(n).min(cap);
            }
            let shared_cap: usize = (d_t..d)
                .map(|i| tt_at(&r, i as isize - 1).saturating_mul(tt_at(&r, i as isize)))
                .fold(0usize, |a, b| a.saturating_add(b));
            r.shared = r.shared.min(dims[d - 1]).min(shared_cap);
            for k in 0..d - 1 {
                let lp = (0..=k).fold(1usize, |a, j| a.saturating_mul(r.reduced(j)));
                let rp = (k + 1..d).fold(1usize, |a, j| a.saturating_mul(r.reduced(j)));
                let prev = if k == 0 { 1 } else { r.tt[k - 1] };
                let next = if k + 2 >= d { 1 } else { r.tt[k + 1] };
                r.tt[k] = r.tt[k]
                    .min(lp)
                    .min(rp)
                    .min(prev.saturating_mul(r.reduced(k)))
                    .min(next.saturating_mul(r.reduced(k + 1)));
            }
        }
        r
    }

    /// Componentwise `<=`.
    pub fn le(&self, other: &Self) -> bool {
        self.shared <= other.shared
            && self.tt.iter().zip(&other.tt).all(|(a, b)| a <= b)
            && self.tucker.iter().zip(&other.tucker).all(|(a, b)| a <= b)
    }
}

/// Order of the two compression stages in rounding and in the dense construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RoundingOrder {
    /// Round the TT core first, then truncate the Tucker and shared factors.
    #[default]
    TtFirst,
    /// Truncate the factors first, then round the TT core.
    TuckerFirst,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SfEttTensor {
    core: TtTensor,
    factors: Vec<Mat>,
    shared: Mat,
    d_t: usize,
    orth: Orth,
}

impl SfEttTensor {
    pub fn new(core: TtTensor, factors: Vec<Mat>, shared: Mat, d_t: usize) -> Result<Self> {
        let d = core.order();
        if d < 2 {
            return arg_err("SF-ETT tensors need order at least 2");
        }
        if d_t >= d {
            return arg_err(format!("d_t = {d_t} leaves no shared modes for order {d}"));
        }
        if factors.len() != d_t {
            return shape_err(format!("{} factors for d_t = {d_t}", factors.len()));
        }
        let cd = core.dims();
        for (k, f) in factors.iter().enumerate() {
            if f.ncols() != cd[k] || f.nrows() == 0 {
                return shape_err(format!("factor {k} is {:?}, core mode has size {}", f.shape(), cd[k]));
            }
        }
        for (k, &n) in cd.iter().enumerate().skip(d_t) {
            if shared.ncols() != n {
                return shape_err(format!("shared factor has {} columns, core mode {k} has {n}", shared.ncols()));
            }
        }
        if shared.nrows() == 0 {
            return shape_err("shared factor has no rows");
        }
        Ok(Self { core, factors, shared, d_t, orth: Orth::None })
    }

    pub fn core(&self) -> &TtTensor {
        &self.core
    }

    pub fn factors(&self) -> &[Mat] {
        &self.factors
    }

    pub fn shared_factor(&self) -> &Mat {
        &self.shared
    }

    /// Factor acting on mode `k` (the shared one for `k >= d_t`).
    pub fn factor(&self, k: usize) -> &Mat {
        if k < self.d_t {
            &self.factors[k]
        } else {
            &self.shared
        }
    }

    pub fn order(&self) -> usize {
        self.core.order()
    }

    pub fn d_t(&self) -> usize {
        self.d_t
    }

    pub fn d_s(&self) -> usize {
        self.order() - self.d_t
    }

    pub fn orth(&self) -> Orth {
        self.orth
    }

    pub fn dims(&self) -> Vec<usize> {
        (0..self.order()).map(|k| self.factor(k).nrows()).collect()
    }

    pub fn ranks(&self) -> SfEttRank {
        SfEttRank {
            tt: self.core.ranks(),
            tucker: self.factors.iter().map(|f| f.ncols()).collect(),
            shared: self.shared.ncols(),
        }
    }

    pub fn param_count(&self) -> usize {
        self.core.cores().iter().map(|c| c.len()).sum::<usize>()
            + self.factors.iter().map(|f| f.len()).sum::<usize>()
            + self.shared.len()
    }

    pub fn to_ett(&self) -> Ett {
        let factors = (0..self.order()).map(|k| Some(self.factor(k).clone())).collect();
        Ett::new(self.core.clone(), factors).expect("validated shapes")
    }

    /// Dense contraction, subject to [`dense_cap`].
    pub fn to_dense(&self) -> Result<DenseTensor> {
        check_cap(&self.dims())?;
        let mats: Vec<Option<&Mat>> = (0..self.order()).map(|k| Some(self.factor(k))).collect();
        self.core.to_dense().multilinear_product(&mats)
    }

    /// `mu`-orthogonal form: orthonormal factors, QR remainders absorbed into
    /// the core, then TT orthogonalization around `mu`.
    pub fn orthogonalize(&self, mu: usize) -> Result<Self> {
        let d = self.order();
        if mu >= d {
            return arg_err(format!("position {mu} out of range for order {d}"));
        }
        let mut cores = self.core.cores().to_vec();
        let mut factors = Vec::with_capacity(self.d_t);
        for (k, f) in self.factors.iter().enumerate() {
            let (q, r) = thin_qr(f);
            cores[k] = cores[k].mode_product(1, &r)?;
            factors.push(q);
        }
        let (shared, r) = thin_qr(&self.shared);
        for c in cores.iter_mut().skip(self.d_t) {
            *c = c.mode_product(1, &r)?;
        }
        let core = TtTensor::new(cores)?.orthogonalize(mu)?;
        Ok(Self { core, factors, shared, d_t: self.d_t, orth: Orth::Mu(mu) })
    }

    /// Frobenius norm without dense materialization.
    pub fn norm(&self) -> f64 {
        let x = match self.orth {
            Orth::Mu(_) => self.clone(),
            Orth::None => self.orthogonalize(self.order() - 1).expect("valid position"),
        };
        match x.orth {
            Orth::Mu(mu) => x.core.cores()[mu].norm(),
            Orth::None => unreachable!(),
        }
    }

    /// Multiplies the unconstrained core (the last one if none is designated).
    pub fn scale(&self, alpha: f64) -> Self {
        Self { core: self.core.scale(alpha), ..self.clone() }
    }

    /// Block concatenation representing `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dims() != other.dims() || self.d_t != other.d_t {
            return shape_err("operands differ in dims or d_t");
        }
        let d = self.order();
        let cores = (0..d)
            .map(|k| {
                let a = &self.core.cores()[k];
                let b = &other.core.cores()[k];
                let [ra0, pa, ra1]: [usize; 3] = a.dims().try_into().unwrap();
                let [rb0, pb, rb1]: [usize; 3] = b.dims().try_into().unwrap();
                let (r0, off0) = if k == 0 { (1, 0) } else { (ra0 + rb0, ra0) };
                let (r1, off1) = if k == d - 1 { (1, 0) } else { (ra1 + rb1, ra1) };
                DenseTensor::from_fn(&[r0, pa + pb, r1], |i| {
                    let (x, y, z) = (i[0], i[1], i[2]);
                    if y < pa {
                        if x < ra0 && z < ra1 {
                            return a.get(&[x, y, z]);
                        }
                    } else if x >= off0 && z >= off1 && x - off0 < rb0 && z - off1 < rb1 {
                        return b.get(&[x - off0, y - pa, z - off1]);
                    }
                    0.0
                })
            })
            .collect();
        let factors = self
            .factors
            .iter()
            .zip(&other.factors)
            .map(|(a, b)| hcat(&[a.clone(), b.clone()]))
            .collect();
        let shared = hcat(&[self.shared.clone(), other.shared.clone()]);
        Self::new(TtTensor::new(cores)?, factors, shared, self.d_t)
    }

    /// Structured inner product.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        ett::inner(&self.to_ett(), &other.to_ett())
    }

    /// Seeded random tensor with orthonormal factors and Gaussian cores,
    /// `(d-1)`-orthogonalized and normalized to unit norm.
    pub fn random(dims: &[usize], d_t: usize, ranks: &SfEttRank, seed: u64) -> Result<Self> {
        let d = dims.len();
        if d < 2 || d_t >= d {
            return arg_err(format!("need d >= 2 and d_t < d, got d = {d}, d_t = {d_t}"));
        }
        if dims[d_t..].iter().any(|&n| n != dims[d - 1]) {
            return shape_err("shared modes must have equal sizes");
        }
        ranks.validate(d, d_t)?;
        if &ranks.clamped(dims, d_t) != ranks {
            return arg_err(format!("ranks {ranks:?} infeasible for dims {dims:?}"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gauss = |r: usize, c: usize| -> Mat {
            Mat::from_fn(r, c, |_, _| StandardNormal.sample(&mut rng))
        };
        let factors: Vec<Mat> = (0..d_t).map(|k| thin_qr(&gauss(dims[k], ranks.tucker[k])).0).collect();
        let shared = thin_qr(&gauss(dims[d - 1], ranks.shared)).0;
        let cores = (0..d)
            .map(|k| {
                let r0 = if k == 0 { 1 } else { ranks.tt[k - 1] };
                let r1 = if k == d - 1 { 1 } else { ranks.tt[k] };
                let p = ranks.reduced(k);
                let m = gauss(r0 * p, r1);
                DenseTensor::new(vec![r0, p, r1], m.as_slice().to_vec()).unwrap()
            })
            .collect();
        let x = Self::new(TtTensor::new(cores)?, factors, shared, d_t)?.orthogonalize(d - 1)?;
        let nrm = x.norm();
        Ok(x.scale(1.0 / nrm))
    }

    /// SVD-based rounding in the default (TT-first) order.
    pub fn round(&self, ranks: &SfEttRank) -> Result<Self> {
        self.round_with(ranks, RoundingOrder::default())
    }

    /// Structured rounding; never forms the dense tensor. The result is
    /// `(d-1)`-orthogonal.
    pub fn round_with(&self, ranks: &SfEttRank, order: RoundingOrder) -> Result<Self> {
        let d = self.order();
        ranks.validate(d, self.d_t)?;
        let target = ranks.clamped(&self.dims(), self.d_t);
        let x = self.orthogonalize(d - 1)?;
        let (mut core, mut factors, mut shared) = (x.core, x.factors, x.shared);
        if order == RoundingOrder::TtFirst {
            core = core.round(&target.tt)?;
        }
        let bars = unconstrained_cores(&core)?;
        let mut cores = core.into_cores();
        for k in 0..self.d_t {
            let m = mode2(&bars[k]);
            let r = target.tucker[k].min(m.nrows()).min(m.ncols());
            let y = truncated_svd(&m, Truncation::Rank(r))?.left;
            cores[k] = cores[k].mode_product(1, &y.transpose())?;
            factors[k] = &factors[k] * &y;
        }
        let blocks: Vec<Mat> = bars[self.d_t..].iter().map(mode2).collect();
        let m = hcat(&blocks);
        let r = target.shared.min(m.nrows()).min(m.ncols());
        let y = truncated_svd(&m, Truncation::Rank(r))?.left;
        let yt = y.transpose();
        for c in cores.iter_mut().skip(self.d_t) {
            *c = c.mode_product(1, &yt)?;
        }
        shared = &shared * &y;
        let mut core = TtTensor::new(cores)?;
        if order == RoundingOrder::TuckerFirst {
            core = core.round(&target.tt)?;
        }
        Self::new(core, factors, shared, self.d_t)?.orthogonalize(d - 1)
    }

    /// Dense construction in the default (Tucker-first) order: leading left
    /// singular vectors of each matricization, of the concatenated shared
    /// matricizations, then TT-SVD of the projected core.
    pub fn svd_from_dense(a: &DenseTensor, d_t: usize, ranks: &SfEttRank) -> Result<Self> {
        Self::svd_from_dense_with(a, d_t, ranks, RoundingOrder::TuckerFirst)
    }

    pub fn svd_from_dense_with(
        a: &DenseTensor,
        d_t: usize,
        ranks: &SfEttRank,
        order: RoundingOrder,
    ) -> Result<Self> {
        let d = a.order();
        if d < 2 || d_t >= d {
            return arg_err(format!("need d >= 2 and d_t < d, got d = {d}, d_t = {d_t}"));
        }
        let dims = a.dims().to_vec();
        if dims[d_t..].iter().any(|&n| n != dims[d - 1]) {
            return shape_err("shared modes must have equal sizes");
        }
        ranks.validate(d, d_t)?;
        let target = ranks.clamped(&dims, d_t);
        let (source, tt) = match order {
            RoundingOrder::TuckerFirst => (a.clone(), None),
            RoundingOrder::TtFirst => {
                let tt = TtTensor::svd(a, &target.tt)?;
                (tt.to_dense(), Some(tt))
            }
        };
        let leading = |m: &Mat, r: usize| -> Result<Mat> {
            let r = r.min(m.nrows()).min(m.ncols());
            Ok(truncated_svd(m, Truncation::Rank(r))?.left)
        };
        let mut factors = Vec::with_capacity(d_t);
        for k in 0..d_t {
            factors.push(leading(&source.matricize(k)?, target.tucker[k])?);
        }
        let blocks = (d_t..d).map(|k| source.matricize(k)).collect::<Result<Vec<_>>>()?;
        let shared = leading(&hcat(&blocks), target.shared)?;
        let proj: Vec<Mat> = (0..d)
            .map(|k| if k < d_t { factors[k].transpose() } else { shared.transpose() })
            .collect();
        let core = match tt {
            None => {
                let refs: Vec<Option<&Mat>> = proj.iter().map(Some).collect();
                TtTensor::svd(&source.multilinear_product(&refs)?, &target.tt)?
            }
            Some(tt) => {
                let cores = tt
                    .cores()
                    .iter()
                    .zip(&proj)
                    .map(|(c, p)| c.mode_product(1, p))
                    .collect::<Result<Vec<_>>>()?;
                TtTensor::new(cores)?
            }
        };
        Self::new(core, factors, shared, d_t)?.orthogonalize(d - 1)
    }
}

/// For each position `k`, the core `W̄^(k)` of the `k`-orthogonal form.
pub(crate) fn unconstrained_cores(core: &TtTensor) -> Result<Vec<DenseTensor>> {
    let d = core.order();
    let mut cores = core.orthogonalize(0)?.into_cores();
    let mut bars = Vec::with_capacity(d);
    for k in 0..d {
        bars.push(cores[k].clone());
        if k + 1 < d {
            left_orth_step(&mut cores, k);
        }
    }
    Ok(bars)
}

pub(crate) fn hcat(blocks: &[Mat]) -> Mat {
    let rows = blocks[0].nrows();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut m = Mat::zeros(rows, cols);
    let mut off = 0;
    for b in blocks {
        m.columns_mut(off, b.ncols()).copy_from(b);
        off += b.ncols();
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{gaussian_tensor, rng};

    fn rel(a: &DenseTensor, b: &DenseTensor) -> f64 {
        a.sub(b).unwrap().norm() / b.norm().max(1e-300)
    }

    fn sample(seed: u64) -> SfEttTensor {
        SfEttTensor::random(&[4, 5, 5], 1, &SfEttRank::new(vec![2, 2], vec![2], 2), seed).unwrap()
    }

    #[test]
    fn param_count_example() {
        assert_eq!(sample(0).param_count(), 34);
        let x = SfEttTensor::random(&[4, 5, 5], 1, &SfEttRank::uniform(3, 1, 1), 0).unwrap();
        assert_eq!(x.param_count(), 3 + 4 + 5);
    }

    #[test]
    fn identity_wrap_is_tt() {
        let tt = crate::testing::random_tt(&[3, 4, 4], &[2, 3], 1);
        let x = SfEttTensor::new(tt.clone(), vec![Mat::identity(3, 3)], Mat::identity(4, 4), 1).unwrap();
        assert!(rel(&x.to_dense().unwrap(), &tt.to_dense()) < 1e-15);
    }

    #[test]
    fn symmetric_rank_one() {
        let u = Mat::from_column_slice(3, 1, &[0.6, 0.0, 0.8]);
        let ones = |r0, r1| DenseTensor::new(vec![r0, 1, r1], vec![1.0]).unwrap();
        let core = TtTensor::new(vec![ones(1, 1), ones(1, 1), ones(1, 1)]).unwrap();
        let x = SfEttTensor::new(core, vec![], u.clone(), 0).unwrap().to_dense().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert!((x.get(&[i, j, k]) - u[i] * u[j] * u[k]).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn validation_errors() {
        let tt = crate::testing::random_tt(&[3, 4, 4], &[2, 3], 1);
        assert!(SfEttTensor::new(tt.clone(), vec![Mat::identity(3, 2)], Mat::identity(4, 4), 1).is_err());
        assert!(SfEttTensor::new(tt.clone(), vec![], Mat::identity(4, 4), 1).is_err());
        assert!(SfEttTensor::new(tt, vec![], Mat::identity(4, 4), 3).is_err());
    }

    #[test]
    fn naive_contraction_agrees() {
        let x = SfEttTensor::random(&[3, 4, 4], 1, &SfEttRank::new(vec![2, 2], vec![2], 2), 3).unwrap();
        let dense = x.to_dense().unwrap();
        let naive = crate::oracle::naive_sfett_dense(&x);
        assert!(rel(&dense, &naive) < 1e-13);
    }

    #[test]
    fn orthogonal_forms() {
        let x = sample(4).scale(2.5);
        let dense = x.to_dense().unwrap();
        for mu in 0..3 {
            let o = x.orthogonalize(mu).unwrap();
            assert!(rel(&o.to_dense().unwrap(), &dense) < 1e-12);
            assert!((o.core().cores()[mu].norm() - dense.norm()).abs() < 1e-12 * dense.norm());
            for f in o.factors().iter().chain([o.shared_factor()]) {
                assert!((f.transpose() * f - Mat::identity(f.ncols(), f.ncols())).norm() < 1e-12);
            }
        }
        assert!((x.norm() - dense.norm()).abs() < 1e-12 * dense.norm());
    }

    #[test]
    fn random_is_deterministic_and_unit() {
        let a = sample(9);
        assert_eq!(a, sample(9));
        assert!((a.norm() - 1.0).abs() < 1e-12);
        assert!((a.to_dense().unwrap().norm() - 1.0).abs() < 1e-12);
        assert!(SfEttTensor::random(&[2, 5, 5], 1, &SfEttRank::new(vec![2, 2], vec![3], 2), 0).is_err());
    }

    #[test]
    fn add_scale_inner() {
        let x = sample(1);
        let y = SfEttTensor::random(&[4, 5, 5], 1, &SfEttRank::new(vec![1, 2], vec![1], 2), 2).unwrap();
        let (dx, dy) = (x.to_dense().unwrap(), y.to_dense().unwrap());
        let s = x.add(&y).unwrap();
        assert!(rel(&s.to_dense().unwrap(), &dx.axpy(1.0, &dy).unwrap()) < 1e-12);
        let z = x.add(&x.scale(-1.0)).unwrap();
        assert!(z.to_dense().unwrap().norm() < 1e-12);
        let ip = x.inner(&y).unwrap();
        assert!((ip - dx.inner(&dy).unwrap()).abs() < 1e-12);
        assert!((x.inner(&x).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(x.inner(&x.scale(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn round_exact_rank_is_identity() {
        let x = SfEttTensor::random(&[4, 4, 5, 5], 2, &SfEttRank::new(vec![2, 3, 2], vec![2, 3], 2), 5).unwrap();
        let d = x.to_dense().unwrap();
        for order in [RoundingOrder::TtFirst, RoundingOrder::TuckerFirst] {
            let r = x.round_with(&x.ranks(), order).unwrap();
            assert_eq!(r.ranks(), x.ranks());
            assert!(rel(&r.to_dense().unwrap(), &d) < 1e-12);
        }
    }

    #[test]
    fn round_matches_dense_path() {
        let x = SfEttTensor::random(&[4, 4, 5, 5], 2, &SfEttRank::new(vec![3, 4, 3], vec![3, 4], 4), 6).unwrap();
        let d = x.to_dense().unwrap();
        let half = SfEttRank::new(vec![2, 2, 2], vec![2, 2], 2);
        for order in [RoundingOrder::TtFirst, RoundingOrder::TuckerFirst] {
            let r = x.round_with(&half, order).unwrap();
            let s = SfEttTensor::svd_from_dense_with(&d, 2, &half, order).unwrap();
            let er = r.to_dense().unwrap().sub(&d).unwrap().norm();
            let es = s.to_dense().unwrap().sub(&d).unwrap().norm();
            assert!((er - es).abs() < 1e-10 * d.norm(), "{order:?}: {er} vs {es}");
        }
    }

    #[test]
    fn exact_input_reconstructed_from_dense() {
        let x = sample(12);
        let d = x.to_dense().unwrap();
        for order in [RoundingOrder::TtFirst, RoundingOrder::TuckerFirst] {
            let s = SfEttTensor::svd_from_dense_with(&d, 1, &x.ranks(), order).unwrap();
            assert!(rel(&s.to_dense().unwrap(), &d) < 1e-12);
        }
    }

    #[test]
    fn quasi_optimal_on_random_dense() {
        let c3 = quasi_optimality_constant(3);
        assert!((c3 - (3f64.sqrt() + 6f64.sqrt() + 2f64.sqrt())).abs() < 1e-15);
        let r = SfEttRank::uniform(3, 1, 2);
        for seed in 0..5 {
            let a = gaussian_tensor(&[4, 5, 5], seed);
            let s = SfEttTensor::svd_from_dense(&a, 1, &r).unwrap();
            let err = s.to_dense().unwrap().sub(&a).unwrap().norm();
            let lb = crate::oracle::unfolding_spectra(&a, 1).unwrap().lower_bound(&r);
            assert!(lb <= err + 1e-12 && err <= c3 * lb, "seed {seed}: {lb} {err}");
        }
    }

    #[test]
    fn zero_padding_rounds_back() {
        let x = sample(13);
        let pad = x.add(&x.scale(0.0)).unwrap();
        assert!(x.ranks().le(&pad.ranks()) && pad.ranks() != x.ranks());
        let r = pad.round(&x.ranks()).unwrap();
        assert_eq!(r.ranks(), x.ranks());
        assert!(rel(&r.to_dense().unwrap(), &x.to_dense().unwrap()) < 1e-12);
    }

    #[test]
    fn clamping() {
        let r = SfEttRank::new(vec![9, 9], vec![9], 9).clamped(&[2, 3, 3], 1);
        assert_eq!(r, SfEttRank::new(vec![2, 3], vec![2], 3));
        let _ = rng(0);
    }
}
