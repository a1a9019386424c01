//! Vanishing-moment coefficient sequences and generalized increments.
//!
//! A sequence `a = (a_0, ..., a_p)` has Q vanishing moments when
//! `sum_k k^l a_k = 0` for `l = 0..Q-1` and `sum_k k^Q a_k != 0` (with
//! `0^0 := 1`). Filtering a sampled path with such a sequence annihilates
//! polynomial trends of degree < Q, which is what makes quadratic-variation
//! statistics of the filtered path scale like the local Hölder exponent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on moment sums. Binomial coefficients are small
/// integers so exact zeros are expected; the tolerance only guards
/// user-supplied float sequences.
pub const MOMENT_TOL: f64 = 1e-9;

/// Largest supported difference order; beyond this the binomial magnitudes
/// start to cost double precision in the moment sums.
pub const MAX_ORDER: usize = 12;

/// A finite coefficient sequence with Q >= 1 vanishing moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct IncrementSequence {
    coefficients: Vec<f64>,
    moments_q: usize,
}

impl IncrementSequence {
    /// Validates an arbitrary coefficient sequence.
    ///
    /// Fails when the sequence is shorter than 2, all-zero, or has no
    /// vanishing moment at all (`sum a_k != 0`).
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(Error::invalid("increment sequence needs length >= 2"));
        }
        let q = vanishing_moments(&coefficients)?;
        if q == 0 {
            return Err(Error::invalid(
                "increment sequence must have at least one vanishing moment (sum a_k = 0)",
            ));
        }
        Ok(IncrementSequence {
            coefficients,
            moments_q: q,
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Sequence order p; the sequence has p + 1 coefficients.
    pub fn order_p(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Number of vanishing moments Q.
    pub fn moments_q(&self) -> usize {
        self.moments_q
    }
}

impl TryFrom<Vec<f64>> for IncrementSequence {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        IncrementSequence::new(v)
    }
}

impl From<IncrementSequence> for Vec<f64> {
    fn from(a: IncrementSequence) -> Vec<f64> {
        a.coefficients
    }
}

/// The binomial difference sequence `a_k = (-1)^k C(q, k)`, the minimal
/// support sequence with exactly q vanishing moments.
pub fn make_difference_sequence(q: usize) -> Result<IncrementSequence> {
    if q == 0 || q > MAX_ORDER {
        return Err(Error::invalid(format!(
            "difference order must be in 1..={MAX_ORDER}, got {q}"
        )));
    }
    let mut coeffs = Vec::with_capacity(q + 1);
    let mut c = 1.0f64;
    for k in 0..=q {
        coeffs.push(if k % 2 == 0 { c } else { -c });
        c = c * (q - k) as f64 / (k + 1) as f64;
    }
    let seq = IncrementSequence::new(coeffs)?;
    debug_assert_eq!(seq.moments_q(), q);
    Ok(seq)
}

/// The largest Q with `sum_k k^l a_k = 0` for all l < Q (absolute tolerance
/// [`MOMENT_TOL`] per moment sum); 0 when `sum a_k != 0`.
pub fn vanishing_moments(coefficients: &[f64]) -> Result<usize> {
    if coefficients.len() < 2 {
        return Err(Error::invalid("need at least 2 coefficients"));
    }
    if coefficients.iter().all(|&a| a == 0.0) {
        return Err(Error::invalid("all-zero coefficient sequence"));
    }
    let mut q = 0;
    // The moment of order >= len cannot vanish for a nonzero sequence unless
    // every lower one does and the sequence is zero, so len is a safe cap.
    while q < coefficients.len() {
        let sum: f64 = coefficients
            .iter()
            .enumerate()
            .map(|(k, &a)| if q == 0 { a } else { (k as f64).powi(q as i32) * a })
            .sum();
        if sum.abs() > MOMENT_TOL {
            break;
        }
        q += 1;
    }
    Ok(q)
}

/// Generalized increments `D_i = sum_k a_k path[i + stride*k]` for
/// `i = 0..len - stride*p - 1` (every start index, including odd ones).
///
/// `stride` samples the filter on a coarser grid; the even-index subsample
/// used by the two-resolution LGQV statistic is `stride = 2`.
pub fn generalized_increments(
    path: &[f64],
    a: &IncrementSequence,
    stride: usize,
) -> Result<Vec<f64>> {
    if stride == 0 {
        return Err(Error::invalid("stride must be >= 1"));
    }
    let p = a.order_p();
    let span = stride * p;
    if path.len() < span + 1 {
        return Err(Error::invalid(format!(
            "path of {} samples is too short for order {p} increments at stride {stride}",
            path.len()
        )));
    }
    let coeffs = a.coefficients();
    let out = (0..path.len() - span)
        .map(|i| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &ak)| ak * path[i + stride * k])
                .sum()
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn difference_sequences_match_binomials() {
        let cases: [(usize, &[f64]); 3] = [
            (1, &[1.0, -1.0]),
            (2, &[1.0, -2.0, 1.0]),
            (3, &[1.0, -3.0, 3.0, -1.0]),
        ];
        for (q, want) in cases {
            let a = make_difference_sequence(q).unwrap();
            assert_eq!(a.coefficients(), want);
            assert_eq!(a.moments_q(), q);
        }
    }

    #[test]
    fn difference_order_is_bounded() {
        assert!(make_difference_sequence(0).is_err());
        assert!(make_difference_sequence(13).is_err());
        assert!(make_difference_sequence(12).is_ok());
    }

    #[test]
    fn vanishing_moments_examples() {
        assert_eq!(vanishing_moments(&[1.0, -2.0, 1.0]).unwrap(), 2);
        // sum a_k = 0 but sum k a_k = -2
        assert_eq!(vanishing_moments(&[1.0, 0.0, -1.0]).unwrap(), 1);
        assert_eq!(vanishing_moments(&[1.0, 1.0]).unwrap(), 0);
        assert!(vanishing_moments(&[0.0, 0.0]).is_err());
        assert!(vanishing_moments(&[1.0]).is_err());
    }

    #[test]
    fn moments_roundtrip_q_1_to_12() {
        for q in 1..=12 {
            let a = make_difference_sequence(q).unwrap();
            assert_eq!(vanishing_moments(a.coefficients()).unwrap(), q, "q={q}");
        }
    }

    #[test]
    fn increments_examples() {
        let a2 = make_difference_sequence(2).unwrap();
        assert_eq!(
            generalized_increments(&[0.0, 1.0, 2.0, 3.0], &a2, 1).unwrap(),
            vec![0.0, 0.0]
        );
        assert_eq!(
            generalized_increments(&[0.0, 1.0, 4.0, 9.0], &a2, 1).unwrap(),
            vec![2.0, 2.0]
        );
        assert_eq!(
            generalized_increments(&[0.0, 1.0, 4.0, 9.0, 16.0], &a2, 2).unwrap(),
            vec![8.0]
        );
    }

    #[test]
    fn too_short_path_errors() {
        let a2 = make_difference_sequence(2).unwrap();
        assert!(generalized_increments(&[0.0, 1.0], &a2, 1).is_err());
        assert!(generalized_increments(&[0.0, 1.0, 2.0, 3.0], &a2, 2).is_err());
    }

    proptest! {
        /// A Q-moment filter annihilates polynomials of degree < Q.
        #[test]
        fn filters_kill_low_degree_polynomials(
            q in 1usize..=6,
            coeffs in proptest::collection::vec(-3.0f64..3.0, 1..6),
            len in 16usize..64,
        ) {
            let a = make_difference_sequence(q).unwrap();
            let deg = coeffs.len().min(q) - 1; // degree < Q
            let path: Vec<f64> = (0..len)
                .map(|u| {
                    let t = u as f64 / (len - 1) as f64;
                    coeffs.iter().take(deg + 1).enumerate()
                        .map(|(d, c)| c * t.powi(d as i32))
                        .sum()
                })
                .collect();
            for d in generalized_increments(&path, &a, 1).unwrap() {
                prop_assert!(d.abs() < 1e-9, "residual {d}");
            }
        }

        /// Increments are linear in the path.
        #[test]
        fn increments_are_linear(
            q in 1usize..=4,
            alpha in -2.0f64..2.0,
            beta in -2.0f64..2.0,
            len in 8usize..32,
            seed in any::<u64>(),
        ) {
            use rand::Rng;
            let mut rng = crate::seed::stream_rng(seed, "linearity-test");
            let z1: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let z2: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let combined: Vec<f64> = z1.iter().zip(&z2).map(|(x, y)| alpha * x + beta * y).collect();
            let a = make_difference_sequence(q).unwrap();
            let d1 = generalized_increments(&z1, &a, 1).unwrap();
            let d2 = generalized_increments(&z2, &a, 1).unwrap();
            let dc = generalized_increments(&combined, &a, 1).unwrap();
            for i in 0..dc.len() {
                prop_assert!((dc[i] - (alpha * d1[i] + beta * d2[i])).abs() < 1e-9);
            }
        }
    }
}
