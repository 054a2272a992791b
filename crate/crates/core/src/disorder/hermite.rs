//! Probabilists' Hermite polynomials, `He_k`.
//!
//! Convention: orthogonal under the standard Gaussian weight `e^{−x²/2}`, with
//! `He_0 = 1`, `He_1 = x`, `He_{k+1} = x·He_k − k·He_{k−1}`, `He_k' = k·He_{k−1}`
//! and `E He_k(g)² = k!`. This is *not* the physicists' `H_k` (weight `e^{−x²}`,
//! `H_2 = 4x² − 2`).

use crate::disorder::GaussHermite;
use crate::error::{Error, Result};

/// Largest degree the crate is tested for.
pub const MAX_HERMITE_DEGREE: usize = 12;

/// `He_k(x)` by three-term recurrence.
pub fn hermite_eval(k: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for j in 0..k {
        let next = x * cur - j as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `[He_0(x), ..., He_kmax(x)]`.
pub fn hermite_all(kmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(1.0);
    if kmax >= 1 {
        out.push(x);
    }
    for j in 1..kmax {
        let next = x * out[j] - j as f64 * out[j - 1];
        out.push(next);
    }
    out
}

/// `He_k'(x) = k·He_{k−1}(x)`.
pub fn hermite_derivative(k: usize, x: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * hermite_eval(k - 1, x)
    }
}

/// `E He_k(g)² = k!`.
pub fn hermite_second_moment(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

/// Both sides of `E He_k(g)F(g) = E He_{k−1}(g)F'(g)` and their gap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IbpResidual {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Gauss–Hermite check of the degree-`k` integration by parts identity.
///
/// Fails with [`Error::QuadratureNonConvergence`] when orders `order` and
/// `order + 1` disagree on either side by more than `1e−8`.
pub fn hermite_ibp_residual<F, D>(k: usize, f: F, df: D, quadrature_order: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    hermite_ibp_residual_with(hermite_eval, k, f, df, quadrature_order).map(|r| r.residual)
}

/// As [`hermite_ibp_residual`] with a caller-supplied Hermite evaluator.
pub fn hermite_ibp_residual_with<H, F, D>(
    hermite: H,
    k: usize,
    f: F,
    df: D,
    quadrature_order: usize,
) -> Result<IbpResidual>
where
    H: Fn(usize, f64) -> f64,
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if k == 0 {
        return Err(Error::invalid("integration by parts needs k >= 1"));
    }
    if quadrature_order < 40 {
        return Err(Error::invalid(format!("quadrature order {quadrature_order} below 40")));
    }
    let sides = |order: usize| {
        let rule = GaussHermite::cached(order);
        let lhs = rule.expect(|x| hermite(k, x) * f(x));
        let rhs = rule.expect(|x| hermite(k - 1, x) * df(x));
        (lhs, rhs)
    };
    let (lhs, rhs) = sides(quadrature_order);
    let (lhs_next, rhs_next) = sides(quadrature_order + 1);
    let difference = (lhs - lhs_next).abs().max((rhs - rhs_next).abs());
    if difference.is_nan() || difference > 1e-8 {
        return Err(Error::QuadratureNonConvergence { order: quadrature_order, difference });
    }
    Ok(IbpResidual { lhs, rhs, residual: (lhs - rhs).abs() })
}
