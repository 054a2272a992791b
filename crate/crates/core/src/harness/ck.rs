//! Estimates of `C_k ≥ |F_e^{(k)}|`, `F_e^{(k)} = γ^{−k} ∂^k⟨f_e⟩/∂g_e^k`.

use serde::{Deserialize, Serialize};

use crate::disorder::SeedSpec;
use crate::error::{Error, Result};
use crate::gibbs::{exact_moments, Wanted};
use crate::models::{FactorSystem, Realization};
use crate::stats::over_replicas;

pub const CK_SAFETY_FACTOR: f64 = 1.5;
pub const CK_GRID_POINTS: usize = 33;
pub const MAX_CK_ORDER: usize = 8;
/// Richardson pairs may differ by this fraction of `max(|D|, CK_FD_FLOOR)`.
pub const CK_RICHARDSON_TOLERANCE: f64 = 0.05;
pub const CK_FD_FLOOR: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum CkMethod {
    Analytic,
    Empirical { max_observed: f64, draws: usize, grid_points: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CkEstimate {
    pub k: usize,
    pub c_k: f64,
    pub method: CkMethod,
}

/// Central finite-difference step in `u = γ g_e` for order `k`.
pub fn fd_step(k: usize) -> f64 {
    0.5 * f64::EPSILON.powf(1.0 / (k as f64 + 2.0))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `k`-th central difference of `f` at `u` with step `h`.
pub fn central_difference(f: &mut dyn FnMut(f64) -> Result<f64>, u: f64, k: usize, h: f64) -> Result<f64> {
    let mut acc = 0.0;
    for j in 0..=k {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial(k, j) * f(u + (k as f64 / 2.0 - j as f64) * h)?;
    }
    Ok(acc / h.powi(k as i32))
}

/// `F_e^{(k)}` at the realization, varying only `g_e`. Richardson-checked.
pub fn ck_derivative(system: &FactorSystem, realization: &Realization, e: usize, k: usize) -> Result<f64> {
    let gamma = system.gamma();
    let mut work = realization.clone();
    let u0 = gamma * realization.chaos[e];
    let mut mean_at = |u: f64| -> Result<f64> {
        work.chaos[e] = u / gamma;
        Ok(exact_moments(system, &work, &Wanted::FirstOnly)?.first[e])
    };
    let h = fd_step(k);
    let fine = central_difference(&mut mean_at, u0, k, h)?;
    let coarse = central_difference(&mut mean_at, u0, k, 2.0 * h)?;
    if (fine - coarse).abs() > CK_RICHARDSON_TOLERANCE * fine.abs().max(CK_FD_FLOOR) {
        return Err(Error::FiniteDifferenceUnstable { k, coarse, fine });
    }
    Ok(fine)
}

/// `C_0 = C_1 = 1`; for `k ≥ 2` the largest `|F_e^{(k)}|` seen over
/// `n_disorder` draws, every factor `e`, and a grid of `g_e ∈ [−w, w]`,
/// inflated by [`CK_SAFETY_FACTOR`].
pub fn estimate_ck(
    system: &FactorSystem,
    k: usize,
    n_disorder: usize,
    grid_halfwidth: f64,
    seed: SeedSpec,
) -> Result<CkEstimate> {
    if k > MAX_CK_ORDER {
        return Err(Error::invalid(format!("C_k estimation supports k <= {MAX_CK_ORDER}, got {k}")));
    }
    if k <= 1 {
        return Ok(CkEstimate { k, c_k: 1.0, method: CkMethod::Analytic });
    }
    if n_disorder == 0 || !(grid_halfwidth > 0.0 && grid_halfwidth.is_finite()) {
        return Err(Error::invalid("C_k estimation needs n_disorder >= 1 and a positive grid half-width"));
    }
    let per_draw = over_replicas(n_disorder, |i| {
        let mut r = system.sample_realization(seed.with_stream(i as u64));
        let mut worst: f64 = 0.0;
        for e in 0..system.index_count() {
            let saved = r.chaos[e];
            for j in 0..CK_GRID_POINTS {
                let x = -grid_halfwidth + 2.0 * grid_halfwidth * j as f64 / (CK_GRID_POINTS - 1) as f64;
                r.chaos[e] = x;
                worst = worst.max(ck_derivative(system, &r, e, k)?.abs());
            }
            r.chaos[e] = saved;
        }
        Ok(worst)
    })?;
    let max_observed = per_draw.into_iter().fold(0.0, f64::max);
    Ok(CkEstimate {
        k,
        c_k: CK_SAFETY_FACTOR * max_observed,
        method: CkMethod::Empirical { max_observed, draws: n_disorder, grid_points: CK_GRID_POINTS },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::make_rfim;
    use crate::topology::Graph;

    fn one_spin(h: f64) -> FactorSystem {
        make_rfim(&Graph::new(1, []).unwrap(), 0.0, h, 1.0).unwrap()
    }

    /// Derivatives of tanh by the recursion on polynomials in `y = tanh u`:
    /// d/du P(y) = P'(y)(1 − y²).
    fn tanh_derivative(k: usize, u: f64) -> f64 {
        let mut coeffs = vec![0.0, 1.0];
        for _ in 0..k {
            let mut next = vec![0.0; coeffs.len() + 2];
            for (i, c) in coeffs.iter().enumerate().skip(1) {
                next[i - 1] += c * i as f64;
                next[i + 1] -= c * i as f64;
            }
            coeffs = next;
        }
        let y = u.tanh();
        coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c)
    }

    #[test]
    fn analytic_orders() {
        let s = one_spin(1.0);
        for k in [0, 1] {
            let c = estimate_ck(&s, k, 1, 1.0, SeedSpec::new(0, 0)).unwrap();
            assert_eq!(c.c_k, 1.0);
            assert_eq!(c.method, CkMethod::Analytic);
        }
        assert!(estimate_ck(&s, 9, 1, 1.0, SeedSpec::new(0, 0)).is_err());
    }

    #[test]
    fn one_spin_derivatives_match_tanh() {
        for h in [0.5, 1.0, 2.0] {
            let s = one_spin(h);
            for k in 1..=4 {
                for g in [-1.3, -0.2, 0.0, 0.7] {
                    let d = ck_derivative(&s, &Realization::chaos_only(vec![g]), 0, k).unwrap();
                    let want = tanh_derivative(k, h * g);
                    assert!((d - want).abs() < 1e-3 * want.abs().max(1.0), "h={h} k={k} g={g}: {d} vs {want}");
                }
            }
        }
    }

    #[test]
    fn one_spin_second_order_estimate() {
        let (h, w) = (1.0, 3.0);
        let est = estimate_ck(&one_spin(h), 2, 3, w, SeedSpec::new(1, 0)).unwrap();
        let grid_max = (0..CK_GRID_POINTS)
            .map(|j| -w + 2.0 * w * j as f64 / (CK_GRID_POINTS - 1) as f64)
            .map(|x| tanh_derivative(2, h * x).abs())
            .fold(0.0, f64::max);
        assert!((est.c_k - 1.5 * grid_max).abs() < 1e-4, "{} vs {}", est.c_k, 1.5 * grid_max);
        // the sup of |tanh''| is 4/(3√3)
        assert!(grid_max <= 4.0 / (3.0 * 3f64.sqrt()) + 1e-12);
    }

    #[test]
    fn central_difference_exact_on_polynomials() {
        let mut cube = |x: f64| Ok(x * x * x);
        let d = central_difference(&mut cube, 0.3, 3, 1e-2).unwrap();
        assert!((d - 6.0).abs() < 1e-6);
    }
}
