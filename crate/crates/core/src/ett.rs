//! Extended tensor trains with one (optional) factor per mode. Used as the
//! common operand type for structured inner products, operator sandwiches and
//! projections; `None` factors stand for the identity.

use crate::dense::DenseTensor;
use crate::error::{shape_err, Result};
use crate::linalg::Mat;
use crate::tt::{left, right, TtOperator, TtTensor};

#[derive(Clone, Debug)]
pub struct Ett {
    core: TtTensor,
    factors: Vec<Option<Mat>>,
}

impl Ett {
    pub fn new(core: TtTensor, factors: Vec<Option<Mat>>) -> Result<Self> {
        if factors.len() != core.order() {
            return shape_err(format!("{} factors for order {}", factors.len(), core.order()));
        }
        for (k, (f, n)) in factors.iter().zip(core.dims()).enumerate() {
            if let Some(f) = f {
                if f.ncols() != n {
                    return shape_err(format!("factor {k} has {} columns, core mode has {n}", f.ncols()));
                }
            }
        }
        Ok(Self { core, factors })
    }

    pub fn from_tt(core: TtTensor) -> Self {
        let factors = vec![None; core.order()];
        Self { core, factors }
    }

    pub fn core(&self) -> &TtTensor {
        &self.core
    }

    pub fn factors(&self) -> &[Option<Mat>] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.core.order()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors
            .iter()
            .zip(self.core.dims())
            .map(|(f, n)| f.as_ref().map_or(n, |f| f.nrows()))
            .collect()
    }

    /// The same tensor as a plain tensor train over the physical dims.
    pub fn to_tt(&self) -> TtTensor {
        let cores = self
            .core
            .cores()
            .iter()
            .zip(&self.factors)
            .map(|(c, f)| match f {
                Some(f) => c.mode_product(1, f).expect("factor shape"),
                None => c.clone(),
            })
            .collect();
        TtTensor::new(cores).expect("valid chain")
    }

    pub fn to_dense(&self) -> DenseTensor {
        let mats: Vec<Option<&Mat>> = self.factors.iter().map(|f| f.as_ref()).collect();
        self.core.to_dense().multilinear_product(&mats).expect("factor shape")
    }

    /// Applies a TT operator; the result carries identity factors.
    pub fn apply_op(&self, h: &TtOperator) -> Result<Ett> {
        Ok(Ett::from_tt(h.apply(&self.to_tt())?))
    }
}

/// `Aᵀ B` between two optional factors (physical rows).
pub(crate) fn coupling(a: Option<&Mat>, b: Option<&Mat>, n: usize) -> Option<Mat> {
    match (a, b) {
        (None, None) => None,
        (Some(a), None) => Some(a.transpose()),
        (None, Some(b)) => Some(b.clone()),
        (Some(a), Some(b)) => {
            debug_assert_eq!(a.nrows(), n);
            Some(a.transpose() * b)
        }
    }
}

/// Cores of `b` with every mode mapped into `a`'s reduced mode space.
pub(crate) fn coupled_cores(a: &Ett, b: &Ett) -> Result<Vec<DenseTensor>> {
    if a.dims() != b.dims() {
        return shape_err(format!("dims {:?} vs {:?}", a.dims(), b.dims()));
    }
    let dims = a.dims();
    Ok(b.core
        .cores()
        .iter()
        .enumerate()
        .map(|(k, c)| match coupling(a.factors[k].as_ref(), b.factors[k].as_ref(), dims[k]) {
            Some(m) => c.mode_product(1, &m).expect("coupling shape"),
            None => c.clone(),
        })
        .collect())
}

/// Left environment step: `E' = Σ_c A(:,c,:)ᵀ E B(:,c,:)`, `ra1 x rb1`.
pub(crate) fn env_left(e: &Mat, a: &DenseTensor, b: &DenseTensor) -> Mat {
    let [ra0, n, _]: [usize; 3] = a.dims().try_into().unwrap();
    let rb1 = b.dims()[2];
    let eb = e * right(b);
    let eb = Mat::from_vec(ra0 * n, rb1, eb.as_slice().to_vec());
    left(a).transpose() * eb
}

/// Right environment step: `E' = Σ_c B(:,c,:) E A(:,c,:)ᵀ`, `rb0 x ra0`.
pub(crate) fn env_right(e: &Mat, a: &DenseTensor, b: &DenseTensor) -> Mat {
    let rb0 = b.dims()[0];
    let be = left(b) * e;
    let be = Mat::from_vec(rb0, be.len() / rb0, be.as_slice().to_vec());
    be * right(a).transpose()
}

/// `⟨a, b⟩` by a left-to-right sweep.
pub fn inner(a: &Ett, b: &Ett) -> Result<f64> {
    let bc = coupled_cores(a, b)?;
    let mut e = Mat::from_element(1, 1, 1.0);
    for (ac, bc) in a.core.cores().iter().zip(&bc) {
        e = env_left(&e, ac, bc);
    }
    Ok(e[(0, 0)])
}

/// `⟨a, H b⟩` through reduced per-mode operators, never forming `H b`.
pub fn op_inner(a: &Ett, h: &TtOperator, b: &Ett) -> Result<f64> {
    let d = a.order();
    if h.row_dims() != a.dims() || h.col_dims() != b.dims() {
        return shape_err("operator dims do not match operands");
    }
    // E indexed [ra, rh, rb], stored flat with ra fastest.
    let mut e = vec![1.0];
    let mut shape = (1usize, 1usize, 1usize);
    for k in 0..d {
        let hk = &h.cores()[k];
        let [rh0, m, n, rh1]: [usize; 4] = hk.dims().try_into().unwrap();
        let ac = &a.core.cores()[k];
        let bc = &b.core.cores()[k];
        let [ra0, pa, ra1]: [usize; 3] = ac.dims().try_into().unwrap();
        let [rb0, pb, rb1]: [usize; 3] = bc.dims().try_into().unwrap();
        // reduced operator M[h0, p, q, h1] = Σ_ij Fa[i,p] H[h0,i,j,h1] Fb[j,q]
        let mut red = vec![0.0; rh0 * pa * pb * rh1];
        for h1 in 0..rh1 {
            for h0 in 0..rh0 {
                let slice = Mat::from_fn(m, n, |i, j| hk.get(&[h0, i, j, h1]));
                let s = match &a.factors[k] {
                    Some(fa) => fa.transpose() * slice,
                    None => slice,
                };
                let s = match &b.factors[k] {
                    Some(fb) => s * fb,
                    None => s,
                };
                for q in 0..pb {
                    for p in 0..pa {
                        red[h0 + rh0 * (p + pa * (q + pb * h1))] = s[(p, q)];
                    }
                }
            }
        }
        // step 1: T1[a1, p, h0, b0] = Σ_a0 A[a0,p,a1] E[a0,h0,b0]
        let (ea, eh, eb) = shape;
        debug_assert_eq!((ea, eh, eb), (ra0, rh0, rb0));
        let mut t1 = vec![0.0; ra1 * pa * rh0 * rb0];
        for b0 in 0..rb0 {
            for h0 in 0..rh0 {
                for p in 0..pa {
                    for a1 in 0..ra1 {
                        let mut s = 0.0;
                        for a0 in 0..ra0 {
                            s += ac.get(&[a0, p, a1]) * e[a0 + ra0 * (h0 + rh0 * b0)];
                        }
                        t1[a1 + ra1 * (p + pa * (h0 + rh0 * b0))] = s;
                    }
                }
            }
        }
        // step 2: T2[a1, q, h1, b0] = Σ_{p,h0} T1[a1,p,h0,b0] M[h0,p,q,h1]
        let mut t2 = vec![0.0; ra1 * pb * rh1 * rb0];
        for b0 in 0..rb0 {
            for h1 in 0..rh1 {
                for q in 0..pb {
                    for h0 in 0..rh0 {
                        for p in 0..pa {
                            let mv = red[h0 + rh0 * (p + pa * (q + pb * h1))];
                            if mv == 0.0 {
                                continue;
                            }
                            for a1 in 0..ra1 {
                                t2[a1 + ra1 * (q + pb * (h1 + rh1 * b0))] +=
                                    mv * t1[a1 + ra1 * (p + pa * (h0 + rh0 * b0))];
                            }
                        }
                    }
                }
            }
        }
        // step 3: E'[a1, h1, b1] = Σ_{q,b0} T2[a1,q,h1,b0] B[b0,q,b1]
        let mut next = vec![0.0; ra1 * rh1 * rb1];
        for b1 in 0..rb1 {
            for b0 in 0..rb0 {
                for q in 0..pb {
                    let bv = bc.get(&[b0, q, b1]);
                    if bv == 0.0 {
                        continue;
                    }
                    for h1 in 0..rh1 {
                        for a1 in 0..ra1 {
                            next[a1 + ra1 * (h1 + rh1 * b1)] += bv * t2[a1 + ra1 * (q + pb * (h1 + rh1 * b0))];
                        }
                    }
                }
            }
        }
        e = next;
        shape = (ra1, rh1, rb1);
    }
    Ok(e[0])
}
