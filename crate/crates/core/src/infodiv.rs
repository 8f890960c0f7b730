//! Entropy and divergence functionals over finite probability distributions:
//! Shannon entropy, Kullback-Leibler divergence, and the weighted
//! Jensen-Shannon divergence in its two- and m-distribution forms.
//!
//! All values are in nats. The JSD is always evaluated through the entropy
//! form H(sum_i pi_i P^i) - sum_i pi_i H(P^i), which is well defined for any
//! inputs, unlike the KLD route.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{scaled_tol, Scalar};

/// Deviation from 1 allowed for a probability vector's sum.
pub const PROB_SUM_TOL: f64 = 1e-9;
/// Deviation from 1 allowed for a weight vector's sum.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Identifier tying a probability vector to an outcome alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlphabetId(Arc<str>);

impl AlphabetId {
    pub fn new(id: impl Into<Arc<str>>) -> Self {
        Self(id.into())
    }

    /// Generic alphabet of `m` unlabeled symbols.
    pub fn symbols(m: usize) -> Self {
        Self::new(format!("sym{m}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AlphabetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Finite probability vector over an outcome alphabet.
///
/// Entries lie in [0, 1] and sum to 1 within [`PROB_SUM_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDist<T> {
    probs: Vec<T>,
    alphabet: AlphabetId,
}

impl<T: Scalar> ProbDist<T> {
    pub fn new(probs: Vec<T>, alphabet: AlphabetId) -> Result<Self> {
        for (index, &p) in probs.iter().enumerate() {
            if !(T::zero()..=T::one()).contains(&p) || !p.is_finite() {
                return Err(Error::InvalidProbability {
                    index,
                    value: p.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        let sum: T = probs.iter().copied().sum();
        let tol = scaled_tol::<T>(PROB_SUM_TOL);
        if (sum - T::one()).abs() > tol {
            return Err(Error::NotNormalized {
                sum: sum.to_f64().unwrap_or(f64::NAN),
                tolerance: PROB_SUM_TOL,
            });
        }
        Ok(Self { probs, alphabet })
    }

    /// Distribution on the generic `m`-symbol alphabet.
    pub fn from_slice(probs: &[T]) -> Result<Self> {
        Self::new(probs.to_vec(), AlphabetId::symbols(probs.len()))
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn alphabet(&self) -> &AlphabetId {
        &self.alphabet
    }

    fn check_same_alphabet(&self, other: &Self) -> Result<()> {
        if self.alphabet != other.alphabet || self.len() != other.len() {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet.to_string(),
                right: other.alphabet.to_string(),
            });
        }
        Ok(())
    }
}

/// Pair of mixture weights (pi_1, pi_2) with pi_i >= 0, pi_1 + pi_2 = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightPair<T> {
    pi1: T,
    pi2: T,
}

impl<T: Scalar> WeightPair<T> {
    pub fn new(pi1: T, pi2: T) -> Result<Self> {
        let sum = pi1 + pi2;
        let tol = scaled_tol::<T>(WEIGHT_SUM_TOL);
        if pi1 < T::zero() || pi2 < T::zero() || (sum - T::one()).abs() > tol {
            return Err(Error::InvalidWeights {
                sum: sum.to_f64().unwrap_or(f64::NAN),
                tolerance: WEIGHT_SUM_TOL,
            });
        }
        Ok(Self { pi1, pi2 })
    }

    /// The symmetric pair (1/2, 1/2).
    pub fn even() -> Self {
        let half = T::from_f64_lossy(0.5);
        Self {
            pi1: half,
            pi2: half,
        }
    }

    pub fn pi1(&self) -> T {
        self.pi1
    }

    pub fn pi2(&self) -> T {
        self.pi2
    }

    /// Entropy H(pi_1, pi_2) of the weight pair, the upper bound of the JSD.
    pub fn entropy(&self) -> T {
        -(xlnx(self.pi1) + xlnx(self.pi2))
    }

    pub fn swapped(&self) -> Self {
        Self {
            pi1: self.pi2,
            pi2: self.pi1,
        }
    }
}

#[inline]
fn xlnx<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        x * x.ln()
    } else {
        T::zero()
    }
}

/// Shannon entropy H(p) = -sum_j p_j ln p_j in nats, with 0 ln 0 = 0.
pub fn shannon_entropy<T: Scalar>(p: &ProbDist<T>) -> T {
    -p.probs().iter().map(|&x| xlnx(x)).sum::<T>()
}

/// Kullback-Leibler divergence D(p || q) = sum_j p_j ln(p_j / q_j) in nats.
///
/// Undefined (an error) when some p_j > 0 has q_j = 0.
pub fn kl_divergence<T: Scalar>(p: &ProbDist<T>, q: &ProbDist<T>) -> Result<T> {
    p.check_same_alphabet(q)?;
    let mut acc = T::zero();
    for (index, (&pj, &qj)) in p.probs().iter().zip(q.probs()).enumerate() {
        if pj > T::zero() {
            if qj <= T::zero() {
                return Err(Error::UndefinedDivergence {
                    index,
                    p_value: pj.to_f64().unwrap_or(f64::NAN),
                });
            }
            acc = acc + pj * (pj / qj).ln();
        }
    }
    Ok(acc)
}

/// Weighted Jensen-Shannon divergence via the entropy form, in nats.
///
/// Always well defined; bounded by H(pi_1, pi_2) <= ln 2.
pub fn jsd_weighted<T: Scalar>(p1: &ProbDist<T>, p2: &ProbDist<T>, w: WeightPair<T>) -> Result<T> {
    p1.check_same_alphabet(p2)?;
    Ok(jsd_kernel(p1.probs(), p2.probs(), w))
}

/// JSD evaluated on raw probability slices of equal length.
///
/// Shared by [`jsd_weighted`] and the segmentation scan so both paths
/// perform bit-identical arithmetic.
pub(crate) fn jsd_kernel<T: Scalar>(p1: &[T], p2: &[T], w: WeightPair<T>) -> T {
    debug_assert_eq!(p1.len(), p2.len());
    let mut mix_sum = T::zero();
    let mut h1_sum = T::zero();
    let mut h2_sum = T::zero();
    for (&a, &b) in p1.iter().zip(p2) {
        mix_sum = mix_sum + xlnx(w.pi1 * a + w.pi2 * b);
        h1_sum = h1_sum + xlnx(a);
        h2_sum = h2_sum + xlnx(b);
    }
    // H(mix) - pi1 H(p1) - pi2 H(p2); clamp the rounding residue at zero.
    (w.pi1 * h1_sum + w.pi2 * h2_sum - mix_sum).max(T::zero())
}

/// Jensen-Shannon divergence of m distributions with weights pi_i:
/// H(sum_i pi_i P^i) - sum_i pi_i H(P^i), in nats.
pub fn jsd_multi<T: Scalar>(dists: &[ProbDist<T>], weights: &[T]) -> Result<T> {
    if dists.is_empty() || dists.len() != weights.len() {
        return Err(Error::WeightCountMismatch {
            expected: dists.len(),
            got: weights.len(),
        });
    }
    let sum: T = weights.iter().copied().sum();
    let tol = scaled_tol::<T>(WEIGHT_SUM_TOL);
    if weights.iter().any(|&w| w < T::zero()) || (sum - T::one()).abs() > tol {
        return Err(Error::InvalidWeights {
            sum: sum.to_f64().unwrap_or(f64::NAN),
            tolerance: WEIGHT_SUM_TOL,
        });
    }
    for d in &dists[1..] {
        dists[0].check_same_alphabet(d)?;
    }

    let m = dists[0].len();
    let mut mix_sum = T::zero();
    for j in 0..m {
        let mut mj = T::zero();
        for (dist, &w) in dists.iter().zip(weights) {
            mj = mj + w * dist.probs()[j];
        }
        mix_sum = mix_sum + xlnx(mj);
    }
    let mut weighted_h = T::zero();
    for (dist, &w) in dists.iter().zip(weights) {
        weighted_h = weighted_h + w * dist.probs().iter().map(|&x| xlnx(x)).sum::<T>();
    }
    Ok((weighted_h - mix_sum).max(T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn dist(probs: &[f64]) -> ProbDist<f64> {
        ProbDist::from_slice(probs).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(shannon_entropy(&dist(&[1.0, 0.0])), 0.0);
        assert_abs_diff_eq!(shannon_entropy(&dist(&[0.5, 0.5])), LN_2, epsilon = 1e-12);
        // direct-evaluation oracle: -(0.2 ln 0.2 + 0.8 ln 0.8)
        assert_abs_diff_eq!(
            shannon_entropy(&dist(&[0.2, 0.8])),
            0.5004024235381879,
            epsilon = 1e-12
        );
    }

    #[test]
    fn kl_examples() {
        let p = dist(&[0.3, 0.7]);
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        assert_abs_diff_eq!(
            kl_divergence(&dist(&[1.0, 0.0]), &dist(&[0.5, 0.5])).unwrap(),
            LN_2,
            epsilon = 1e-12
        );
        match kl_divergence(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])) {
            Err(Error::UndefinedDivergence { index: 0, .. }) => {}
            other => panic!("expected undefined divergence, got {other:?}"),
        }
    }

    #[test]
    fn kl_rejects_alphabet_mismatch() {
        let p = dist(&[0.5, 0.5]);
        let q = ProbDist::new(vec![0.5, 0.5], AlphabetId::new("(-1,1)")).unwrap();
        assert!(matches!(
            kl_divergence(&p, &q),
            Err(Error::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn jsd_weighted_examples() {
        let p = dist(&[0.4, 0.6]);
        let w = WeightPair::new(0.3, 0.7).unwrap();
        assert_eq!(jsd_weighted(&p, &p, w).unwrap(), 0.0);

        let a = dist(&[1.0, 0.0]);
        let b = dist(&[0.0, 1.0]);
        assert_abs_diff_eq!(
            jsd_weighted(&a, &b, WeightPair::even()).unwrap(),
            LN_2,
            epsilon = 1e-12
        );
        // direct-evaluation oracle: H(1/4, 3/4)
        assert_abs_diff_eq!(
            jsd_weighted(&a, &b, WeightPair::new(0.25, 0.75).unwrap()).unwrap(),
            0.5623351446188083,
            epsilon = 1e-12
        );
    }

    #[test]
    fn jsd_multi_examples() {
        let a = dist(&[0.7, 0.3]);
        let b = dist(&[0.2, 0.8]);
        let w = WeightPair::new(0.25, 0.75).unwrap();
        assert_eq!(
            jsd_multi(&[a.clone(), b.clone()], &[0.25, 0.75]).unwrap(),
            jsd_weighted(&a, &b, w).unwrap()
        );
        assert_eq!(
            jsd_multi(&[a.clone(), a.clone(), a.clone()], &[0.2, 0.3, 0.5]).unwrap(),
            0.0
        );
        // three deterministic dists on a 3-letter alphabet, uniform weights -> ln 3
        let third = 1.0 / 3.0;
        let dists = [
            dist(&[1.0, 0.0, 0.0]),
            dist(&[0.0, 1.0, 0.0]),
            dist(&[0.0, 0.0, 1.0]),
        ];
        assert_abs_diff_eq!(
            jsd_multi(&dists, &[third, third, third]).unwrap(),
            1.0986122886681098, // direct-evaluation oracle: ln 3
            epsilon = 1e-12
        );
    }

    #[test]
    fn jsd_multi_rejects_bad_weights() {
        let a = dist(&[0.5, 0.5]);
        assert!(matches!(
            jsd_multi(&[a.clone(), a.clone()], &[0.6, 0.6]),
            Err(Error::InvalidWeights { .. })
        ));
        assert!(matches!(
            jsd_multi(&[a.clone(), a], &[1.5, -0.5]),
            Err(Error::InvalidWeights { .. })
        ));
    }

    #[test]
    fn prob_dist_validation() {
        assert!(matches!(
            ProbDist::from_slice(&[0.5, 0.6]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            ProbDist::from_slice(&[-0.1, 1.1]),
            Err(Error::InvalidProbability { .. })
        ));
    }

    #[test]
    fn weight_pair_validation() {
        assert!(WeightPair::new(0.25, 0.75).is_ok());
        assert!(matches!(
            WeightPair::new(0.5, 0.6),
            Err(Error::InvalidWeights { .. })
        ));
        assert!(matches!(
            WeightPair::new(-0.1, 1.1),
            Err(Error::InvalidWeights { .. })
        ));
    }

    #[test]
    fn entropy_form_matches_kld_form_on_full_support() {
        // Consistency of the two algebraic routes when both are defined.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let m = rng.gen_range(2..=5);
            let raw1: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..1.0)).collect();
            let raw2: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..1.0)).collect();
            let norm = |v: &[f64]| {
                let s: f64 = v.iter().sum();
                dist(&v.iter().map(|x| x / s).collect::<Vec<_>>())
            };
            let (p1, p2) = (norm(&raw1), norm(&raw2));
            let pi1 = rng.gen_range(0.0..1.0);
            let w = WeightPair::new(pi1, 1.0 - pi1).unwrap();

            let mix: Vec<f64> = p1
                .probs()
                .iter()
                .zip(p2.probs())
                .map(|(&a, &b)| w.pi1() * a + w.pi2() * b)
                .collect();
            let mix = dist(&mix);
            let via_kld = w.pi1() * kl_divergence(&p1, &mix).unwrap()
                + w.pi2() * kl_divergence(&p2, &mix).unwrap();
            let via_entropy = jsd_weighted(&p1, &p2, w).unwrap();
            assert_abs_diff_eq!(via_kld, via_entropy, epsilon = 1e-10);
        }
    }

    #[test]
    fn f32_kernel_smoke() {
        let p = ProbDist::<f32>::from_slice(&[1.0, 0.0]).unwrap();
        let q = ProbDist::<f32>::from_slice(&[0.0, 1.0]).unwrap();
        let jsd = jsd_weighted(&p, &q, WeightPair::even()).unwrap();
        assert!((jsd - std::f32::consts::LN_2).abs() < 1e-6);
    }

    fn arb_dist(m: usize) -> impl Strategy<Value = ProbDist<f64>> {
        proptest::collection::vec(1e-3..1.0f64, m).prop_map(|raw| {
            let s: f64 = raw.iter().sum();
            ProbDist::from_slice(&raw.iter().map(|x| x / s).collect::<Vec<_>>()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn jsd_symmetry_is_exact(p in arb_dist(4), q in arb_dist(4), pi1 in 0.0..1.0f64) {
            let w = WeightPair::new(pi1, 1.0 - pi1).unwrap();
            let forward = jsd_weighted(&p, &q, w).unwrap();
            let backward = jsd_weighted(&q, &p, w.swapped()).unwrap();
            prop_assert_eq!(forward, backward);
        }

        #[test]
        fn jsd_bounds(p in arb_dist(3), q in arb_dist(3), pi1 in 0.0..1.0f64) {
            let w = WeightPair::new(pi1, 1.0 - pi1).unwrap();
            let jsd = jsd_weighted(&p, &q, w).unwrap();
            prop_assert!(jsd >= 0.0);
            prop_assert!(jsd <= w.entropy() + 1e-12);
            prop_assert!(w.entropy() <= LN_2 + 1e-12);
        }

        #[test]
        fn sqrt_jsd_triangle_inequality(p in arb_dist(3), q in arb_dist(3), r in arb_dist(3)) {
            let w = WeightPair::even();
            let d = |a: &ProbDist<f64>, b: &ProbDist<f64>| {
                jsd_weighted(a, b, w).unwrap().sqrt()
            };
            prop_assert!(d(&p, &q) <= d(&p, &r) + d(&r, &q) + 1e-12);
        }

        #[test]
        fn jsd_identity_of_indiscernibles(p in arb_dist(4), q in arb_dist(4)) {
            let jsd = jsd_weighted(&p, &q, WeightPair::even()).unwrap();
            let l1: f64 = p.probs().iter().zip(q.probs()).map(|(a, b)| (a - b).abs()).sum();
            if jsd <= 1e-12 {
                prop_assert!(l1 <= 1e-5);
            }
            if l1 <= 1e-9 {
                prop_assert!(jsd <= 1e-12);
            }
        }
    }
}
