//! Quadrature for the singular oscillatory integrals behind the
//! harmonizable-representation oracles.
//!
//! Everything here reduces to
//!
//! ```text
//! F(a; beta) = int_0^inf (1 - cos(a x)) / x^(1+beta) dx,   a >= 0, 0 < beta < 2.
//! ```
//!
//! The integrand has an integrable singularity at 0 (the numerator is
//! O(x^2)) and an algebraically decaying oscillatory tail. The inner panel
//! (0, 1] is integrated over geometrically shrinking subintervals; the tail
//! splits into the exact power integral `1/beta` minus the oscillatory
//! `int_1^inf cos(a x) x^(-1-beta) dx`, which is summed per half-period of
//! the cosine with iterated averaging of the alternating partial sums.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// 1 - cos(y) without cancellation for small y.
#[inline]
pub fn one_minus_cos(y: f64) -> f64 {
    let s = (0.5 * y).sin();
    2.0 * s * s
}

/// Nodes and weights of the 16-point Gauss-Legendre rule on [-1, 1].
fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Gauss-Legendre nodes/weights by Newton iteration on P_n.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Chebyshev-based initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Evaluate P_n and P_n' by the three-term recurrence.
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, x);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// 16-point Gauss-Legendre on [a, b].
fn gl(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gl16();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(c + h * x);
    }
    h * acc
}

/// Limit of the alternating partial sums by iterated averaging, plus an
/// error estimate from dropping the last term.
fn accelerate_alternating(terms: &[f64]) -> (f64, f64) {
    fn fold(terms: &[f64]) -> f64 {
        let mut s: Vec<f64> = Vec::with_capacity(terms.len());
        let mut acc = 0.0;
        for &t in terms {
            acc += t;
            s.push(acc);
        }
        while s.len() > 1 {
            for i in 0..s.len() - 1 {
                s[i] = 0.5 * (s[i] + s[i + 1]);
            }
            s.pop();
        }
        s[0]
    }
    if terms.is_empty() {
        return (0.0, 0.0);
    }
    if terms.len() == 1 {
        return (terms[0], terms[0].abs());
    }
    let full = fold(terms);
    let trimmed = fold(&terms[..terms.len() - 1]);
    (full, (full - trimmed).abs())
}

/// `int_1^inf cos(a x) x^(-1-beta) dx` for a > 0.
fn oscillatory_tail(a: f64, beta: f64) -> (f64, f64) {
    let g = |x: f64| (a * x).cos() / x.powf(1.0 + beta);
    // First zero of cos(a x) at or beyond x = 1.
    let mut k0 = 0usize;
    let mut x0 = std::f64::consts::FRAC_PI_2 / a;
    while x0 < 1.0 {
        k0 += 1;
        x0 = (std::f64::consts::FRAC_PI_2 + k0 as f64 * std::f64::consts::PI) / a;
    }
    // Non-oscillatory stretch [1, x0]: phase change per doubling panel stays
    // below pi/2, so plain panels resolve it.
    let mut acc = 0.0;
    let mut lo = 1.0;
    while lo < x0 {
        let hi = (lo * 2.0).min(x0);
        acc += gl(&g, lo, hi);
        lo = hi;
    }
    // Alternating half-period segments past x0.
    let half_period = std::f64::consts::PI / a;
    let mut terms = Vec::with_capacity(64);
    let mut z = x0;
    for _ in 0..64 {
        let next = z + half_period;
        let t = gl(&g, z, next);
        terms.push(t);
        z = next;
        if t.abs() < 1e-18 {
            break;
        }
    }
    let (osc, err) = accelerate_alternating(&terms);
    (acc + osc, err)
}

/// `F(a; beta) = int_0^inf (1 - cos(a x)) x^(-1-beta) dx` with an error
/// estimate. Exact zero for a = 0.
pub fn singular_cosine_integral(a: f64, beta: f64) -> Result<(f64, f64)> {
    if !(0.0..2.0).contains(&beta) || beta == 0.0 {
        return Err(Error::invalid(format!("beta must be in (0,2), got {beta}")));
    }
    if a < 0.0 || !a.is_finite() {
        return Err(Error::invalid(format!("a must be finite and >= 0, got {a}")));
    }
    if a == 0.0 {
        return Ok((0.0, 0.0));
    }
    let f = |x: f64| one_minus_cos(a * x) / x.powf(1.0 + beta);
    // Inner (0, 1] over geometric panels; contributions shrink like
    // (2^-k)^(2-beta) so the loop terminates long before the floor.
    let mut inner = 0.0;
    let mut inner_err = 0.0;
    let mut hi = 1.0f64;
    for k in 0..2000 {
        let lo = 0.5 * hi;
        let c = gl(&f, lo, hi);
        inner += c;
        inner_err = c.abs();
        hi = lo;
        if k > 4 && (c.abs() <= 1e-17 * (1.0 + inner.abs()) || hi < 1e-280) {
            break;
        }
    }
    let (tail_osc, osc_err) = oscillatory_tail(a, beta);
    let value = inner + 1.0 / beta - tail_osc;
    // The geometric inner tail sums to at most a small multiple of its last
    // panel; 8x is a loose cover for ratios 2^-(2-beta) up to ~0.9.
    let err = 8.0 * inner_err + osc_err;
    Ok((value, err))
}

/// As [`singular_cosine_integral`], failing when the error estimate exceeds
/// `tol`.
pub fn singular_cosine_integral_tol(a: f64, beta: f64, tol: f64) -> Result<f64> {
    let (value, err) = singular_cosine_integral(a, beta)?;
    if err > tol {
        return Err(Error::NumericalFailure {
            msg: format!("cosine integral a={a} beta={beta} did not converge"),
            achieved: err,
        });
    }
    Ok(value)
}
