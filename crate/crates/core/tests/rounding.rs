use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sfett_core::oracle::{naive_sfett_dense, unfolding_spectra};
use sfett_core::{truncated_svd, DenseTensor, Mat, RoundingOrder, SfEttRank, SfEttTensor, Truncation};

fn gaussian(dims: &[usize], seed: u64) -> DenseTensor {
    let mut g = ChaCha8Rng::seed_from_u64(seed);
    DenseTensor::from_fn(dims, |_| g.sample(rand_distr::StandardNormal))
}

#[test]
fn random_tensors_have_the_requested_rank() {
    for seed in 0..20 {
        let dims = [4, 5, 5, 5];
        let want = SfEttRank::new(vec![3, 3, 2], vec![3], 2);
        let x = SfEttTensor::random(&dims, 1, &want, seed).unwrap();
        let seen = unfolding_spectra(&naive_sfett_dense(&x), 1).unwrap().ranks();
        assert_eq!(seen, want, "seed {seed}");
    }
}

#[test]
fn orthogonal_form_norm_identity() {
    let x = SfEttTensor::random(&[3, 4, 5, 5], 2, &SfEttRank::new(vec![2, 3, 2], vec![2, 3], 2), 9).unwrap();
    let y = x.scale(2.5);
    for mu in 0..4 {
        let z = y.orthogonalize(mu).unwrap();
        let nrm = z.core().cores()[mu].norm();
        assert!((nrm - 2.5).abs() < 1e-12, "mu {mu}: {nrm}");
    }
}

#[test]
fn truncated_svd_error_decreases_with_rank() {
    let mut g = ChaCha8Rng::seed_from_u64(5);
    let a = Mat::from_fn(7, 5, |_, _| g.sample(rand_distr::StandardNormal));
    let errs: Vec<f64> = (1..=5)
        .map(|r| {
            let s = truncated_svd(&a, Truncation::Rank(r)).unwrap();
            (&a - &s.left * s.s_vt()).norm()
        })
        .collect();
    assert!(errs.windows(2).all(|w| w[1] <= w[0]));
    assert!(errs[4] < 1e-12 * a.norm());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    // Sequential truncation is only nested when the last TT step is the sole difference.
    #[test]
    fn growing_last_tt_rank_never_fits_worse(seed in 0u64..10_000, a0 in 1usize..=3, b in 1usize..=3, c in 1usize..=3) {
        let dims = [4, 5, 5];
        let a = gaussian(&dims, seed);
        let lo = SfEttRank::new(vec![a0, b], vec![a0.min(c)], c).clamped(&dims, 1);
        let hi = SfEttRank::new(vec![a0, b + 1], lo.tucker.clone(), lo.shared).clamped(&dims, 1);
        let err = |r: &SfEttRank| {
            SfEttTensor::svd_from_dense_with(&a, 1, r, RoundingOrder::TuckerFirst).unwrap().to_dense().unwrap().sub(&a).unwrap().norm()
        };
        let (e_lo, e_hi) = (err(&lo), err(&hi));
        prop_assert!(e_hi <= e_lo * (1.0 + 1e-12), "{e_hi} > {e_lo}");
    }

    #[test]
    fn dense_ranks_never_exceed_stored(seed in 0u64..10_000, r in 1usize..=3, d_t in 0usize..=2) {
        let dims = [4, 4, 4, 4];
        let want = SfEttRank::uniform(4, d_t, r).clamped(&dims, d_t);
        let x = SfEttTensor::random(&dims, d_t, &want, seed).unwrap();
        let sum = x.add(&SfEttTensor::random(&dims, d_t, &want, seed + 1).unwrap()).unwrap();
        let seen = unfolding_spectra(&naive_sfett_dense(&sum), d_t).unwrap().ranks();
        prop_assert!(seen.le(&sum.ranks()));
        let rounded = sum.round(&want).unwrap();
        prop_assert!(rounded.ranks().le(&want));
    }
}
