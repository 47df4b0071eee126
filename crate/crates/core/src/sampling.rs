//! Seeded random matrices and rational weights for tests and self-checks.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::certificates::{DirectSumFactorizationCert, DirectSumSpace, MixtureTerm, RationalMixtureCert};
use crate::channels::weyl_mixture;
use crate::linalg::{kron, ComplexMatrix, Rational};
use crate::Result;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-like unitary: modified Gram–Schmidt on the columns of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = gaussian_matrix(n, n, rng);
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| g[(i, j)]).collect()).collect();
    for j in 0..n {
        for p in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let q = &done[p];
            let v = &mut rest[0];
            let proj: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for (x, &y) in v.iter_mut().zip(q) {
                *x -= proj * y;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Random positive rationals `l_i / D` summing to one, with `D ≤ max_denominator`
/// and `D ≥ count`.
pub fn random_weights<R: Rng + ?Sized>(count: usize, max_denominator: u32, rng: &mut R) -> Vec<Rational> {
    assert!(count >= 1 && count as u32 <= max_denominator);
    let denom = rng.random_range(count as u32..=max_denominator);
    // random composition of `denom` into `count` positive parts
    let mut cuts: Vec<u32> = Vec::with_capacity(count + 1);
    cuts.push(0);
    while cuts.len() < count {
        let c = rng.random_range(1..denom);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.push(denom);
    cuts.sort_unstable();
    cuts.windows(2)
        .map(|w| Rational::new((w[1] - w[0]) as i128, denom as i128).expect("nonzero denominator"))
        .collect()
}

/// Mixture certificate for `T ⊗ S_k` with `T = Σ c_i ad(v_i)`, `d` random unitaries
/// `v_i` and random weights of denominator at most `max_denominator`; the terms are
/// `(c_i / k², v_i ⊗ w_j)` over the Weyl unitaries `w_j`.
pub fn random_product_mixture<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    d: usize,
    max_denominator: u32,
    rng: &mut R,
) -> Result<RationalMixtureCert> {
    let weights = random_weights(d, max_denominator, rng);
    let (weyl_coeffs, weyl) = weyl_mixture(k)?;
    let mut terms = Vec::with_capacity(d * weyl.len());
    for c in &weights {
        let v = random_unitary(n, rng);
        for (wc, w) in weyl_coeffs.iter().zip(&weyl) {
            terms.push(MixtureTerm {
                coefficient: c.checked_mul(wc)?,
                unitary: kron(&v, w)?,
            });
        }
    }
    RationalMixtureCert::new(n, k, terms)
}

/// Direct-sum certificate with Haar-like blocks over the given summand sizes.
pub fn random_direct_sum_cert<R: Rng + ?Sized>(
    n: usize,
    sizes: &[usize],
    max_denominator: u32,
    rng: &mut R,
) -> Result<DirectSumFactorizationCert> {
    let weights = random_weights(sizes.len(), max_denominator, rng);
    let space = DirectSumSpace::new(sizes.to_vec(), weights)?;
    let blocks = sizes.iter().map(|&k| random_unitary(n * k, rng)).collect();
    DirectSumFactorizationCert::new(n, space, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_unitary;

    #[test]
    fn random_unitaries_are_unitary_and_deterministic() {
        let mut rng = seeded(7);
        for n in 1..=6 {
            let u = random_unitary(n, &mut rng);
            assert!(is_unitary(&u, 1e-9).unwrap());
        }
        let a = random_unitary(3, &mut seeded(1));
        let b = random_unitary(3, &mut seeded(1));
        assert_eq!(a, b);
    }

    #[test]
    fn weights_sum_to_one() {
        let mut rng = seeded(3);
        for count in 1..=4 {
            for _ in 0..50 {
                let w = random_weights(count, 12, &mut rng);
                assert_eq!(w.len(), count);
                assert!(w.iter().all(Rational::is_positive));
                assert_eq!(Rational::checked_sum(&w).unwrap(), Rational::ONE);
                assert!(w.iter().all(|r| r.denom() <= 12));
            }
        }
    }
}
