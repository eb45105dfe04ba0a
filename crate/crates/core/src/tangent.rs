//! Tangent spaces of the fixed-rank SF-ETT manifold.
//!
//! A tangent vector at a `(d-1)`-orthogonal foot `X` is
//! `Σ_i ⟦T(W_L.., Ẇ^(i), ..W_R); U⟧ + Σ_{j<d_t} ⟦G; .., U̇^(j), ..⟧ + Σ_{i>=d_t} ⟦G; .., U̇ at i, ..⟧`
//! under the gauge `U^(j)ᵀU̇^(j) = 0`, `UᵀU̇ = 0`, `L(W_L^(i))ᵀL(Ẇ^(i)) = 0` for `i < d-1`.

use std::sync::Arc;

use crate::dense::DenseTensor;
use crate::error::{arg_err, shape_err, Error, Result};
use crate::ett::{coupled_cores, env_left, env_right, Ett};
use crate::linalg::{gram_pinv, thin_lq, Mat};
use crate::sfett::{hcat, SfEttRank, SfEttTensor};
use crate::tt::{core_from, left, mode2, right, Orth, TtTensor};

/// Everything about a foot point that projections and embeddings reuse.
#[derive(Debug)]
pub struct Foot {
    point: SfEttTensor,
    /// `W_R^(k)`; entry 0 is unused and holds the first core.
    right: Vec<DenseTensor>,
    /// `W̄^(k)`: the unconstrained core of the `k`-orthogonal form.
    bars: Vec<DenseTensor>,
    gram_inv: Vec<Mat>,
    shared_gram_inv: Mat,
    grams: Vec<Mat>,
    shared_gram: Mat,
    dropped: usize,
}

impl Foot {
    /// Caches the orthogonal cores of a `(d-1)`-orthogonal tensor.
    pub fn new(point: SfEttTensor) -> Result<Arc<Self>> {
        let d = point.order();
        if point.orth() != Orth::Mu(d - 1) {
            return Err(Error::NotOrthogonal);
        }
        let cores = point.core().cores();
        let mut right_cores = cores.to_vec();
        let mut bars = cores.to_vec();
        let mut cur = cores[d - 1].clone();
        for k in (1..d).rev() {
            bars[k] = cur.clone();
            let [r0, p, r1]: [usize; 3] = cur.dims().try_into().unwrap();
            let (l, q) = thin_lq(&right(&cur));
            if q.nrows() != r0 {
                return arg_err(format!("TT rank {r0} at position {k} exceeds what the foot supports"));
            }
            right_cores[k] = core_from(&q, r0, p, r1);
            let prev = &cores[k - 1];
            let [s0, pp, _]: [usize; 3] = prev.dims().try_into().unwrap();
            cur = core_from(&(left(prev) * l), s0, pp, r0);
        }
        bars[0] = cur;
        let d_t = point.d_t();
        let gram_of = |k: usize| {
            let m = mode2(&bars[k]);
            (&m * m.transpose(), m.nrows(), m.ncols())
        };
        let mut grams = Vec::with_capacity(d_t);
        let mut gram_inv = Vec::with_capacity(d_t);
        let mut dropped = 0;
        for k in 0..d_t {
            let (g, r, c) = gram_of(k);
            let (inv, drop) = gram_pinv(&g, r, c);
            dropped += drop;
            grams.push(g);
            gram_inv.push(inv);
        }
        let p = point.shared_factor().ncols();
        let mut shared_gram = Mat::zeros(p, p);
        let mut cols = 0;
        for k in d_t..d {
            let (g, _, c) = gram_of(k);
            shared_gram += g;
            cols += c;
        }
        let (shared_gram_inv, drop) = gram_pinv(&shared_gram, p, cols);
        dropped += drop;
        Ok(Arc::new(Self { point, right: right_cores, bars, gram_inv, shared_gram_inv, grams, shared_gram, dropped }))
    }

    pub fn point(&self) -> &SfEttTensor {
        &self.point
    }

    pub fn order(&self) -> usize {
        self.point.order()
    }

    /// Number of Gram directions treated as singular by the pseudo-inverse.
    /// Non-zero means the foot is numerically rank-deficient.
    pub fn dropped_directions(&self) -> usize {
        self.dropped
    }

    fn left_core(&self, k: usize) -> &DenseTensor {
        &self.point.core().cores()[k]
    }

    /// Right-orthogonal core `W_R^(k)` for `k >= 1`.
    pub fn right_core(&self, k: usize) -> Option<&DenseTensor> {
        if k == 0 {
            None
        } else {
            self.right.get(k)
        }
    }

    /// `W̄^(k)`.
    pub fn unconstrained_core(&self, k: usize) -> &DenseTensor {
        &self.bars[k]
    }

    /// The foot itself as a tangent vector at itself.
    pub fn point_as_tangent(self: &Arc<Self>) -> TangentVector {
        let mut t = TangentVector::zeros(self);
        let d = self.order();
        t.d_cores[d - 1] = self.bars[d - 1].clone();
        t
    }

    /// Product of `cores` left to right as `(Π p) x r_last`.
    fn chain_left(cores: &[DenseTensor]) -> Mat {
        let mut cur = Mat::from_element(1, 1, 1.0);
        for c in cores {
            let prod = &cur * right(c);
            let rows = cur.nrows() * c.dims()[1];
            cur = Mat::from_vec(rows, c.dims()[2], prod.as_slice().to_vec());
        }
        cur
    }

    /// Product of `cores` as `(Π p) x r_first`.
    fn chain_right(cores: &[DenseTensor]) -> Mat {
        let mut cur = Mat::from_element(1, 1, 1.0);
        for c in cores.iter().rev() {
            let prod = left(c) * &cur;
            let r0 = c.dims()[0];
            cur = Mat::from_vec(r0, prod.len() / r0, prod.as_slice().to_vec());
        }
        cur.transpose()
    }
}

/// Ambient tensors that can be projected.
#[derive(Clone, Copy, Debug)]
pub enum Ambient<'a> {
    Dense(&'a DenseTensor),
    Ett(&'a Ett),
}

/// Unconstrained derivative blocks of `f ∘ C_X` with respect to the cores
/// (`dS`), the distinct factors (`dB`) and the shared factor (`dA`).
#[derive(Clone, Debug, PartialEq)]
pub struct EuclideanPartials {
    pub d_cores: Vec<DenseTensor>,
    pub d_factors: Vec<Mat>,
    pub d_shared: Mat,
}

#[derive(Clone, Debug)]
pub struct TangentVector {
    foot: Arc<Foot>,
    pub d_cores: Vec<DenseTensor>,
    pub d_factors: Vec<Mat>,
    pub d_shared: Mat,
}

impl TangentVector {
    pub fn zeros(foot: &Arc<Foot>) -> Self {
        let x = foot.point();
        Self {
            foot: foot.clone(),
            d_cores: x.core().cores().iter().map(|c| DenseTensor::zeros(c.dims())).collect(),
            d_factors: x.factors().iter().map(|f| Mat::zeros(f.nrows(), f.ncols())).collect(),
            d_shared: Mat::zeros(x.shared_factor().nrows(), x.shared_factor().ncols()),
        }
    }

    pub fn foot(&self) -> &Arc<Foot> {
        &self.foot
    }

    fn check_same_foot(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.foot, &other.foot) {
            Ok(())
        } else {
            Err(Error::FootMismatch)
        }
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self {
            foot: self.foot.clone(),
            d_cores: self.d_cores.iter().map(|c| c.scale(alpha)).collect(),
            d_factors: self.d_factors.iter().map(|f| f * alpha).collect(),
            d_shared: &self.d_shared * alpha,
        }
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &Self) -> Result<Self> {
        self.check_same_foot(other)?;
        Ok(Self {
            foot: self.foot.clone(),
            d_cores: self
                .d_cores
                .iter()
                .zip(&other.d_cores)
                .map(|(a, b)| a.axpy(alpha, b))
                .collect::<Result<_>>()?,
            d_factors: self.d_factors.iter().zip(&other.d_factors).map(|(a, b)| a + b * alpha).collect(),
            d_shared: &self.d_shared + &other.d_shared * alpha,
        })
    }

    /// Ambient inner product, evaluated from the parameters: the component
    /// subspaces are mutually orthogonal and the foot's frames orthonormal.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_same_foot(other)?;
        let mut s = 0.0;
        for (a, b) in self.d_cores.iter().zip(&other.d_cores) {
            s += a.inner(b)?;
        }
        for ((a, b), g) in self.d_factors.iter().zip(&other.d_factors).zip(&self.foot.grams) {
            s += (a.transpose() * b).component_mul(g).sum();
        }
        s += (self.d_shared.transpose() * &other.d_shared).component_mul(&self.foot.shared_gram).sum();
        Ok(s)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).expect("same foot").max(0.0).sqrt()
    }

    /// Largest violation of the gauge conditions.
    pub fn gauge_residual(&self) -> f64 {
        let x = self.foot.point();
        let d = x.order();
        let mut r: f64 = 0.0;
        for (u, du) in x.factors().iter().zip(&self.d_factors) {
            r = r.max((u.transpose() * du).norm());
        }
        r = r.max((x.shared_factor().transpose() * &self.d_shared).norm());
        for k in 0..d - 1 {
            r = r.max((left(self.foot.left_core(k)).transpose() * left(&self.d_cores[k])).norm());
        }
        r
    }

    /// Dense realizations of the summands straight from the definition: one per
    /// core variation, one per distinct factor variation, then the shared-factor
    /// variation summed over the shared modes. Their sum is the tangent vector.
    pub fn components_dense(&self) -> Result<Vec<DenseTensor>> {
        let foot = &self.foot;
        let x = foot.point();
        let d = x.order();
        let d_t = x.d_t();
        let ett = |cores: Vec<DenseTensor>, vary: Option<(usize, &Mat)>| -> Result<DenseTensor> {
            let factors = (0..d)
                .map(|k| match vary {
                    Some((i, m)) if i == k => Some(m.clone()),
                    _ => Some(x.factor(k).clone()),
                })
                .collect();
            Ok(Ett::new(TtTensor::new(cores)?, factors)?.to_dense())
        };
        let mut out = Vec::new();
        for i in 0..d {
            let mut cores = gauge_cores(foot, i);
            cores[i] = self.d_cores[i].clone();
            out.push(ett(cores, None)?);
        }
        for j in 0..d_t {
            out.push(ett(gauge_cores(foot, j), Some((j, &self.d_factors[j])))?);
        }
        let mut shared = DenseTensor::zeros(&x.dims());
        for i in d_t..d {
            shared = shared.axpy(1.0, &ett(gauge_cores(foot, i), Some((i, &self.d_shared)))?)?;
        }
        out.push(shared);
        Ok(out)
    }

    /// The tangent vector as an SF-ETT tensor of at most doubled ranks.
    pub fn to_sfett(&self) -> Result<SfEttTensor> {
        let tol = 1e-8 * (1.0 + self.norm());
        let g = self.gauge_residual();
        if g > tol {
            return arg_err(format!("gauge violation {g:e} exceeds {tol:e}"));
        }
        let foot = &self.foot;
        let x = foot.point();
        let d = x.order();
        let cores = (0..d)
            .map(|k| {
                let dot = &self.d_cores[k];
                let bar = &foot.bars[k];
                let [r0, p, r1]: [usize; 3] = bar.dims().try_into().unwrap();
                let first = k == 0;
                let last = k == d - 1;
                let rr0 = if first { 1 } else { 2 * r0 };
                let rr1 = if last { 1 } else { 2 * r1 };
                let mut w = DenseTensor::zeros(&[rr0, 2 * p, rr1]);
                // row block offsets: top = 0, bottom = r0 (first core has a single row)
                let bottom = if first { 0 } else { r0 };
                for c in 0..p {
                    for a in 0..r0 {
                        for b in 0..r1 {
                            let (wl, wr) = if last {
                                (0.0, foot.right[k].get(&[a, c, b]))
                            } else if first {
                                (foot.left_core(k).get(&[a, c, b]), 0.0)
                            } else {
                                (foot.left_core(k).get(&[a, c, b]), foot.right[k].get(&[a, c, b]))
                            };
                            let dv = dot.get(&[a, c, b]);
                            let bv = bar.get(&[a, c, b]);
                            if first && last {
                                unreachable!("order >= 2");
                            } else if first {
                                w.set(&[0, c, b], dv);
                                w.set(&[0, c, r1 + b], wl);
                                w.set(&[0, p + c, b], bv);
                            } else if last {
                                w.set(&[a, c, 0], wr);
                                w.set(&[bottom + a, c, 0], dv);
                                w.set(&[bottom + a, p + c, 0], bv);
                            } else {
                                w.set(&[a, c, b], wr);
                                w.set(&[bottom + a, c, b], dv);
                                w.set(&[bottom + a, c, r1 + b], wl);
                                w.set(&[bottom + a, p + c, b], bv);
                            }
                        }
                    }
                }
                w
            })
            .collect();
        let factors = x
            .factors()
            .iter()
            .zip(&self.d_factors)
            .map(|(u, du)| hcat(&[u.clone(), du.clone()]))
            .collect();
        let shared = hcat(&[x.shared_factor().clone(), self.d_shared.clone()]);
        SfEttTensor::new(TtTensor::new(cores)?, factors, shared, x.d_t())
    }

    pub fn to_dense(&self) -> Result<DenseTensor> {
        self.to_sfett()?.to_dense()
    }
}

/// Cores `T(W_L^(0..i-1), W̄^(i), W_R^(i+1..))`, the `i`-orthogonal form of the foot core.
fn gauge_cores(foot: &Foot, i: usize) -> Vec<DenseTensor> {
    (0..foot.order())
        .map(|k| {
            if k < i {
                foot.left_core(k).clone()
            } else if k == i {
                foot.bars[k].clone()
            } else {
                foot.right[k].clone()
            }
        })
        .collect()
}

/// Partial derivatives of `Y ↦ ⟨Y, egrad⟩` composed with the construction
/// operator at the foot.
pub fn partials_from_egrad(foot: &Foot, egrad: Ambient<'_>) -> Result<EuclideanPartials> {
    let x = foot.point();
    if egrad_dims(egrad) != x.dims() {
        return shape_err(format!("ambient dims {:?} vs foot {:?}", egrad_dims(egrad), x.dims()));
    }
    match egrad {
        Ambient::Dense(z) => partials_dense(foot, z),
        Ambient::Ett(z) => partials_structured(foot, z),
    }
}

fn egrad_dims(z: Ambient<'_>) -> Vec<usize> {
    match z {
        Ambient::Dense(z) => z.dims().to_vec(),
        Ambient::Ett(z) => z.dims(),
    }
}

fn partials_dense(foot: &Foot, z: &DenseTensor) -> Result<EuclideanPartials> {
    let x = foot.point();
    let d = x.order();
    let d_t = x.d_t();
    let uts: Vec<Mat> = (0..d).map(|k| x.factor(k).transpose()).collect();
    let all: Vec<Option<&Mat>> = uts.iter().map(Some).collect();
    let ghat = z.multilinear_product(&all)?;
    let cores = x.core().cores();
    let mut d_cores = Vec::with_capacity(d);
    for i in 0..d {
        let l = Foot::chain_left(&cores[..i]);
        let r = Foot::chain_right(&foot.right[i + 1..]);
        let m = ghat.unfold_unchecked(i);
        let t = l.transpose() * m;
        let [r0, p, r1]: [usize; 3] = cores[i].dims().try_into().unwrap();
        let t = Mat::from_vec(r0 * p, t.len() / (r0 * p), t.as_slice().to_vec());
        d_cores.push(core_from(&(t * r), r0, p, r1));
    }
    let g = x.core().to_dense();
    let mut dbs = Vec::with_capacity(d);
    for i in 0..d {
        let mut mats = all.clone();
        mats[i] = None;
        let zi = z.multilinear_product(&mats)?;
        dbs.push(zi.matricize(i)? * g.matricize(i)?.transpose());
    }
    let mut d_shared = Mat::zeros(x.shared_factor().nrows(), x.shared_factor().ncols());
    for db in &dbs[d_t..] {
        d_shared += db;
    }
    dbs.truncate(d_t);
    Ok(EuclideanPartials { d_cores, d_factors: dbs, d_shared })
}

fn partials_structured(foot: &Foot, z: &Ett) -> Result<EuclideanPartials> {
    let x = foot.point();
    let d = x.order();
    let d_t = x.d_t();
    let xe = x.to_ett();
    let yhat = coupled_cores(&xe, z)?;
    let cores = x.core().cores();
    let mut el = vec![Mat::from_element(1, 1, 1.0)];
    for k in 0..d - 1 {
        let next = env_left(&el[k], &cores[k], &yhat[k]);
        el.push(next);
    }
    let mut er = vec![Mat::from_element(1, 1, 1.0); d + 1];
    for k in (1..d).rev() {
        er[k] = env_right(&er[k + 1], &foot.right[k], &yhat[k]);
    }
    // sandwich: EL[i] * Y * ER[i+1] as an (r0, q, r1) core
    let sandwich = |i: usize, y: &DenseTensor| -> DenseTensor {
        let [ry0, q, _]: [usize; 3] = y.dims().try_into().unwrap();
        let _ = ry0;
        let r0 = el[i].nrows();
        let t = &el[i] * right(y);
        let t = Mat::from_vec(r0 * q, t.len() / (r0 * q), t.as_slice().to_vec());
        let t = t * &er[i + 1];
        let r1 = t.ncols();
        core_from(&t, r0, q, r1)
    };
    let d_cores: Vec<DenseTensor> = (0..d).map(|i| sandwich(i, &yhat[i])).collect();
    let mut dbs = Vec::with_capacity(d);
    for i in 0..d {
        let raw = &z.core().cores()[i];
        let m = sandwich(i, raw);
        let m2 = mode2(&m) * mode2(&foot.bars[i]).transpose();
        dbs.push(match &z.factors()[i] {
            Some(v) => v * m2,
            None => m2,
        });
    }
    let mut d_shared = Mat::zeros(x.shared_factor().nrows(), x.shared_factor().ncols());
    for db in &dbs[d_t..] {
        d_shared += db;
    }
    dbs.truncate(d_t);
    Ok(EuclideanPartials { d_cores, d_factors: dbs, d_shared })
}

/// Riemannian gradient from the construction-operator partials: complement
/// projectors on the left-orthogonal cores and factors, Gram solves for the
/// factor variations.
pub fn grad_from_partials(foot: &Arc<Foot>, partials: &EuclideanPartials) -> Result<TangentVector> {
    let x = foot.point();
    let d = x.order();
    if partials.d_cores.len() != d || partials.d_factors.len() != x.d_t() {
        return shape_err("partials do not match the foot");
    }
    let mut d_cores = Vec::with_capacity(d);
    for (k, ds) in partials.d_cores.iter().enumerate() {
        if ds.dims() != foot.left_core(k).dims() {
            return shape_err(format!("core partial {k} has dims {:?}", ds.dims()));
        }
        if k + 1 == d {
            d_cores.push(ds.clone());
        } else {
            let l = left(foot.left_core(k));
            let m = left(ds);
            let proj = &m - &l * (l.transpose() * &m);
            let [r0, p, r1]: [usize; 3] = ds.dims().try_into().unwrap();
            d_cores.push(core_from(&proj, r0, p, r1));
        }
    }
    let complement = |u: &Mat, g: &Mat| g - u * (u.transpose() * g);
    let d_factors = x
        .factors()
        .iter()
        .zip(&partials.d_factors)
        .zip(&foot.gram_inv)
        .map(|((u, db), inv)| complement(u, db) * inv)
        .collect();
    let d_shared = complement(x.shared_factor(), &partials.d_shared) * &foot.shared_gram_inv;
    Ok(TangentVector { foot: foot.clone(), d_cores, d_factors, d_shared })
}

/// Orthogonal projection onto the tangent space at the foot.
pub fn project(foot: &Arc<Foot>, z: Ambient<'_>) -> Result<TangentVector> {
    grad_from_partials(foot, &partials_from_egrad(foot, z)?)
}

/// Rounds `X + ξ` back to the given ranks. No dense tensor is formed.
pub fn retract(xi: &TangentVector, ranks: &SfEttRank) -> Result<SfEttTensor> {
    let shifted = xi.axpy(1.0, &xi.foot().point_as_tangent())?;
    shifted.to_sfett()?.round(ranks)
}

/// Projects a tangent vector from another foot onto the tangent space at `foot`.
pub fn transport(foot: &Arc<Foot>, xi: &TangentVector) -> Result<TangentVector> {
    if Arc::ptr_eq(foot, xi.foot()) {
        return Ok(xi.clone());
    }
    let e = xi.to_sfett()?.to_ett();
    project(foot, Ambient::Ett(&e))
}

/// Dimension of the manifold of tensors with exactly the given SF-ETT rank:
/// free core entries minus the TT gauge, plus Stiefel-quotient factor terms.
pub fn manifold_dim(dims: &[usize], d_t: usize, ranks: &SfEttRank) -> Result<usize> {
    let d = dims.len();
    if d < 2 || d_t >= d {
        return arg_err("need d >= 2 and d_s >= 1");
    }
    if ranks.tt.len() + 1 != d || ranks.tucker.len() != d_t {
        return shape_err("rank tuple does not fit d and d_t");
    }
    let rtt = |k: usize| -> i64 {
        if k == 0 || k == d {
            1
        } else {
            ranks.tt[k - 1] as i64
        }
    };
    let mut tt: i64 = 0;
    for i in 1..=d {
        tt += rtt(i - 1) * ranks.reduced(i - 1) as i64 * rtt(i);
    }
    for i in 1..d {
        tt -= rtt(i) * rtt(i);
    }
    let mut total = tt;
    for (i, &r) in ranks.tucker.iter().enumerate() {
        total += r as i64 * (dims[i] as i64 - r as i64);
    }
    let rs = ranks.shared as i64;
    total += rs * (dims[d - 1] as i64 - rs);
    Ok(total.max(0) as usize)
}

/// The formula as printed alongside the dimension theorem, which also
/// subtracts `(r^tt_d)^2 = 1`. Kept for comparison with [`manifold_dim`].
pub fn manifold_dim_printed(dims: &[usize], d_t: usize, ranks: &SfEttRank) -> Result<usize> {
    Ok(manifold_dim(dims, d_t, ranks)?.saturating_sub(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::full_svd;
    use crate::testing::gaussian_tensor;

    fn foot(dims: &[usize], d_t: usize, r: &SfEttRank, seed: u64) -> Arc<Foot> {
        Foot::new(SfEttTensor::random(dims, d_t, r, seed).unwrap()).unwrap()
    }

    fn example() -> (Vec<usize>, SfEttRank) {
        (vec![4, 5, 5], SfEttRank::new(vec![2, 2], vec![2], 2))
    }

    fn rel(a: &DenseTensor, b: &DenseTensor) -> f64 {
        a.sub(b).unwrap().norm() / b.norm().max(1e-300)
    }

    #[test]
    fn projecting_the_foot_returns_it() {
        let (dims, r) = example();
        let f = foot(&dims, 1, &r, 1);
        let xd = f.point().to_dense().unwrap();
        let xi = project(&f, Ambient::Dense(&xd)).unwrap();
        assert!(rel(&xi.to_dense().unwrap(), &xd) < 1e-10);
        let t = f.point_as_tangent();
        assert!(rel(&t.to_dense().unwrap(), &xd) < 1e-12);
    }

    #[test]
    fn dense_and_structured_partials_agree() {
        let (dims, r) = example();
        let f = foot(&dims, 1, &r, 2);
        let z = SfEttTensor::random(&dims, 1, &SfEttRank::new(vec![3, 2], vec![3], 3), 3).unwrap();
        let zd = z.to_dense().unwrap();
        let a = partials_from_egrad(&f, Ambient::Dense(&zd)).unwrap();
        let b = partials_from_egrad(&f, Ambient::Ett(&z.to_ett())).unwrap();
        for (x, y) in a.d_cores.iter().zip(&b.d_cores) {
            assert!(x.sub(y).unwrap().norm() < 1e-12);
        }
        for (x, y) in a.d_factors.iter().zip(&b.d_factors) {
            assert!((x - y).norm() < 1e-12);
        }
        assert!((&a.d_shared - &b.d_shared).norm() < 1e-12);
        let tt = Ett::from_tt(crate::tt::TtTensor::svd(&zd, &[4, 5]).unwrap());
        let c = partials_from_egrad(&f, Ambient::Ett(&tt)).unwrap();
        assert!((&a.d_shared - &c.d_shared).norm() < 1e-12);
    }

    #[test]
    fn projection_laws() {
        for (dims, d_t, r) in [
            (vec![4, 5, 5], 1, SfEttRank::new(vec![2, 2], vec![2], 2)),
            (vec![3, 4, 4, 4], 1, SfEttRank::new(vec![2, 2, 2], vec![2], 2)),
            (vec![3, 3, 3], 0, SfEttRank::new(vec![2, 2], vec![], 2)),
        ] {
            let f = foot(&dims, d_t, &r, 4);
            let z = gaussian_tensor(&dims, 5);
            let y = gaussian_tensor(&dims, 6);
            let pz = project(&f, Ambient::Dense(&z)).unwrap();
            let py = project(&f, Ambient::Dense(&y)).unwrap();
            assert!(pz.gauge_residual() < 1e-10);
            let pzd = pz.to_dense().unwrap();
            let ppz = project(&f, Ambient::Dense(&pzd)).unwrap().to_dense().unwrap();
            assert!(ppz.sub(&pzd).unwrap().norm() < 1e-10 * z.norm());
            let lhs = pzd.inner(&y).unwrap();
            let rhs = z.inner(&py.to_dense().unwrap()).unwrap();
            assert!((lhs - rhs).abs() < 1e-10 * z.norm() * y.norm());
            assert!((pz.inner(&py).unwrap() - lhs).abs() < 1e-10 * z.norm() * y.norm());
            let comps = pz.components_dense().unwrap();
            let mut sum = DenseTensor::zeros(&dims);
            for c in &comps {
                sum = sum.axpy(1.0, c).unwrap();
            }
            assert!(rel(&sum, &pzd) < 1e-10);
            for i in 0..comps.len() {
                for j in 0..i {
                    assert!(comps[i].inner(&comps[j]).unwrap().abs() < 1e-10 * z.norm().powi(2));
                }
            }
        }
    }

    #[test]
    fn tangent_dimension_matches_projector_rank() {
        for (dims, d_t, r) in [
            (vec![4, 5, 5], 1, SfEttRank::new(vec![2, 2], vec![2], 2)),
            (vec![4, 5, 5], 1, SfEttRank::uniform(3, 1, 1)),
            (vec![3, 4, 4, 4], 2, SfEttRank::new(vec![2, 3, 2], vec![2, 3], 2)),
            (vec![3, 3, 3], 0, SfEttRank::new(vec![2, 2], vec![], 2)),
        ] {
            let f = foot(&dims, d_t, &r, 7);
            let n: usize = dims.iter().product();
            let mut m = Mat::zeros(n, n);
            for k in 0..n {
                let mut e = DenseTensor::zeros(&dims);
                e.data_mut()[k] = 1.0;
                let p = project(&f, Ambient::Dense(&e)).unwrap().to_dense().unwrap();
                m.column_mut(k).copy_from_slice(p.data());
            }
            let s = full_svd(&m).unwrap().singular;
            let rank = s.iter().filter(|&&v| v > 1e-8 * s[0]).count();
            assert_eq!(rank, manifold_dim(&dims, d_t, &r).unwrap(), "{dims:?} {r:?}");
        }
        let (dims, r) = example();
        assert_eq!(manifold_dim(&dims, 1, &r).unwrap(), 18);
        assert_eq!(manifold_dim_printed(&dims, 1, &r).unwrap(), 17);
    }

    #[test]
    fn retraction_properties() {
        let (dims, r) = example();
        let f = foot(&dims, 1, &r, 8);
        let xd = f.point().to_dense().unwrap();
        let x0 = retract(&TangentVector::zeros(&f), &r).unwrap();
        assert!(rel(&x0.to_dense().unwrap(), &xd) < 1e-12);
        let xi = project(&f, Ambient::Dense(&gaussian_tensor(&dims, 9))).unwrap();
        let xi = xi.scale(1.0 / xi.norm());
        let xid = xi.to_dense().unwrap();
        let mut errs = vec![];
        for t in [1e-1, 1e-2, 1e-3] {
            let y = retract(&xi.scale(t), &r).unwrap();
            assert_eq!(y.ranks(), r);
            let lin = xd.axpy(t, &xid).unwrap();
            errs.push(y.to_dense().unwrap().sub(&lin).unwrap().norm());
        }
        assert!(errs[0] / errs[1] >= 50.0 && errs[1] / errs[2] >= 50.0, "{errs:?}");
    }

    #[test]
    fn transport_properties() {
        let (dims, r) = example();
        let f = foot(&dims, 1, &r, 10);
        let g = foot(&dims, 1, &r, 11);
        let xi = project(&f, Ambient::Dense(&gaussian_tensor(&dims, 12))).unwrap();
        let same = transport(&f, &xi).unwrap();
        assert!(Arc::ptr_eq(same.foot(), &f));
        let moved = transport(&g, &xi).unwrap();
        let direct = project(&g, Ambient::Dense(&xi.to_dense().unwrap())).unwrap();
        assert!(rel(&moved.to_dense().unwrap(), &direct.to_dense().unwrap()) < 1e-10);
        assert!(moved.norm() <= xi.norm() * (1.0 + 1e-12));
        assert_eq!(transport(&g, &TangentVector::zeros(&f)).unwrap().norm(), 0.0);
        // realized vectors at a foot project onto themselves
        let again = project(&f, Ambient::Ett(&xi.to_sfett().unwrap().to_ett())).unwrap();
        for (a, b) in again.d_cores.iter().zip(&xi.d_cores) {
            assert!(a.sub(b).unwrap().norm() < 1e-10);
        }
        assert!((&again.d_shared - &xi.d_shared).norm() < 1e-10);
    }

    #[test]
    fn foot_requires_orthogonal_form() {
        let (dims, r) = example();
        let x = SfEttTensor::random(&dims, 1, &r, 1).unwrap();
        let y = x.add(&x).unwrap();
        assert!(matches!(Foot::new(y), Err(Error::NotOrthogonal)));
    }
}
