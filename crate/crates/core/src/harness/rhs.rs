//! Right-hand sides of the variance bounds.

use crate::error::{Error, Result};
use crate::observables::WeightVector;

use super::TheoremId;

/// Above this `t` the reference formula is reported as `+∞`.
pub const CHATTERJEE_T_MAX: f64 = 1.0 - 1e-12;

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {x}")))
    }
}

fn check_t(t: f64) -> Result<()> {
    if (0.0..1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::invalid(format!("t={t}: the bound needs 0 <= t < 1")))
    }
}

/// `4(γ₁+γ₂) / (γ₁γ₂ √(size·(1−t)))`, the common shape of the two-system
/// overlap bounds (`size` is `|E|`, `N` or `|V|` depending on the family).
pub fn rhs_two_system(gamma1: f64, gamma2: f64, size: f64, t: f64) -> Result<f64> {
    positive("gamma1", gamma1)?;
    positive("gamma2", gamma2)?;
    positive("size", size)?;
    check_t(t)?;
    Ok(4.0 * (gamma1 + gamma2) / (gamma1 * gamma2 * (size * (1.0 - t)).sqrt()))
}

pub fn rhs_thm2_1(gamma1: f64, gamma2: f64, e_size: usize, t: f64) -> Result<f64> {
    rhs_two_system(gamma1, gamma2, e_size as f64, t)
}

/// Equal-temperature form `8 / (β √(|E|(1−t)))`.
pub fn rhs_main1(beta: f64, e_size: usize, t: f64) -> Result<f64> {
    positive("beta", beta)?;
    positive("|E|", e_size as f64)?;
    check_t(t)?;
    Ok(8.0 / (beta * (e_size as f64 * (1.0 - t)).sqrt()))
}

/// Earlier equal-temperature rate `2√2 / (β t^{1/4} √(|E| log(1/t)))`, for comparison only.
pub fn rhs_chatterjee_ref(beta: f64, e_size: usize, t: f64) -> Result<f64> {
    positive("beta", beta)?;
    positive("|E|", e_size as f64)?;
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::invalid(format!("t={t}: the reference formula is singular outside 0 < t < 1")));
    }
    if t > CHATTERJEE_T_MAX {
        return Ok(f64::INFINITY);
    }
    Ok(2.0 * 2f64.sqrt() / (beta * t.powf(0.25) * (e_size as f64 * (1.0 / t).ln()).sqrt()))
}

/// `E[π^{−1/2} 1(π ≥ 1)]` for `π ~ Poisson(mean)`, summed from the pmf in
/// log space until the remaining mass is below `1e-17`.
pub fn poisson_inverse_sqrt_mean(mean: f64) -> Result<f64> {
    positive("Poisson mean", mean)?;
    let mut log_pmf = -mean; // k = 0
    let mut acc = 0.0;
    let mut mass = (-mean).exp();
    let kmax = (mean + 40.0 * mean.sqrt() + 100.0) as usize;
    for k in 1..=kmax {
        log_pmf += mean.ln() - (k as f64).ln();
        let p = log_pmf.exp();
        acc += p / (k as f64).sqrt();
        mass += p;
        if k as f64 > mean && 1.0 - mass < 1e-17 {
            break;
        }
    }
    Ok(acc)
}

/// Diluted model: `4(β₁+β₂)/(β₁β₂√(1−t)) · E[π^{−1/2} 1(π≥1)]`, `π ~ Poisson(λN)`.
pub fn rhs_diluted(beta1: f64, beta2: f64, t: f64, lambda_n: f64) -> Result<f64> {
    Ok(rhs_two_system(beta1, beta2, 1.0, t)? * poisson_inverse_sqrt_mean(lambda_n)?)
}

/// `1 / (√(λN) − √(2/(λN)))`, an upper bound on `E[π^{−1/2} 1(π≥1)]`.
pub fn diluted_cap(lambda_n: f64) -> Result<f64> {
    positive("lambda*N", lambda_n)?;
    if lambda_n <= 2f64.sqrt() {
        return Err(Error::invalid(format!(
            "lambda*N = {lambda_n} <= sqrt(2): the cap's denominator is not positive"
        )));
    }
    Ok(1.0 / (lambda_n.sqrt() - (2.0 / lambda_n).sqrt()))
}

/// Weighted magnetization: `‖a‖₂‖a‖₁ / γ`.
pub fn rhs_thm3_1(weights: &WeightVector, gamma: f64) -> Result<f64> {
    positive("gamma", gamma)?;
    Ok(weights.norm2() * weights.norm1() / gamma)
}

/// Site overlap under positive correlations: `2 / (h √|V|)`.
pub fn rhs_fkg(h: f64, v_size: usize) -> Result<f64> {
    positive("h", h)?;
    positive("|V|", v_size as f64)?;
    Ok(2.0 / (h * (v_size as f64).sqrt()))
}

/// Random field, γ-dependent form: `√2 ‖a‖₂‖a‖₁ / γ`.
pub fn rhs_thm5_1(weights: &WeightVector, gamma: f64) -> Result<f64> {
    positive("gamma", gamma)?;
    Ok(2f64.sqrt() * weights.norm2() * weights.norm1() / gamma)
}

/// Random field, γ-free form: `‖a‖₂² + √2 ‖a‖₂‖a‖₁`.
pub fn rhs_thm5_2(weights: &WeightVector) -> f64 {
    weights.norm2().powi(2) + 2f64.sqrt() * weights.norm2() * weights.norm1()
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Degree-`k` field: `√(k!(k+1)!) ‖a‖₁‖a‖₂ / γ`.
pub fn rhs_ineq1(weights: &WeightVector, k: usize, gamma: f64) -> Result<f64> {
    positive("gamma", gamma)?;
    Ok((factorial(k) * factorial(k + 1)).sqrt() * weights.norm1() * weights.norm2() / gamma)
}

/// Degree-`k` field, `k ≥ 1`: `C_k √((k+1)!) γ^{k−1} ‖a‖₁‖a‖₂ + k! ‖a‖₂²`.
pub fn rhs_ineq2(weights: &WeightVector, k: usize, gamma: f64, c_k: f64) -> Result<f64> {
    positive("gamma", gamma)?;
    if k == 0 {
        return Err(Error::invalid("the C_k form of the field bound needs k >= 1"));
    }
    if !(c_k >= 0.0 && c_k.is_finite()) {
        return Err(Error::invalid(format!("C_k must be finite and non-negative, got {c_k}")));
    }
    let (n1, n2) = (weights.norm1(), weights.norm2());
    Ok(c_k * factorial(k + 1).sqrt() * gamma.powi(k as i32 - 1) * n1 * n2 + factorial(k) * n2 * n2)
}

/// Normalized random field, γ-dependent form: `√2 / (h √|V|)`.
pub fn rhs_eqlast(h: f64, v_size: usize) -> Result<f64> {
    positive("h", h)?;
    positive("|V|", v_size as f64)?;
    Ok(2f64.sqrt() / (h * (v_size as f64).sqrt()))
}

/// Normalized random field, γ-free form: `1/|V| + √2/√|V|`.
pub fn rhs_eqlast2(v_size: usize) -> Result<f64> {
    positive("|V|", v_size as f64)?;
    let v = v_size as f64;
    Ok(1.0 / v + 2f64.sqrt() / v.sqrt())
}

/// Inputs for [`rhs_family`]; each theorem reads the fields it needs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RhsParams {
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub t: Option<f64>,
    pub e_size: Option<usize>,
    pub v_size: Option<usize>,
    /// `N` for the mean-field families.
    pub n: Option<usize>,
    pub lambda_n: Option<f64>,
    pub weights: Option<WeightVector>,
    pub k: Option<usize>,
    pub c_k: Option<f64>,
}

fn need<T: Clone>(theorem: TheoremId, name: &'static str, v: &Option<T>) -> Result<T> {
    v.clone().ok_or(Error::MissingParameter { theorem: theorem.as_str().to_string(), name })
}

/// Evaluates the bound for `theorem`. The two-system families read `gamma1`
/// and `gamma2` in model units (`β` or `h`, before any `N`-normalisation).
pub fn rhs_family(theorem: TheoremId, p: &RhsParams) -> Result<f64> {
    use TheoremId::*;
    let g1 = || need(theorem, "gamma1", &p.gamma1);
    let g2 = || p.gamma2.or(p.gamma1).ok_or(Error::MissingParameter { theorem: theorem.as_str().into(), name: "gamma2" });
    let t = || need(theorem, "t", &p.t);
    let w = || need(theorem, "weights", &p.weights);
    match theorem {
        Thm2_1 | Thm2_1TwoTemp | EaBond => rhs_thm2_1(g1()?, g2()?, need(theorem, "E_size", &p.e_size)?, t()?),
        Main1 => rhs_main1(g1()?, need(theorem, "E_size", &p.e_size)?, t()?),
        EqChatt1Ref => rhs_chatterjee_ref(g1()?, need(theorem, "E_size", &p.e_size)?, t()?),
        MixedPspin | VectorSk => rhs_two_system(g1()?, g2()?, need(theorem, "N", &p.n)? as f64, t()?),
        EaSite => rhs_two_system(g1()?, g2()?, need(theorem, "V_size", &p.v_size)? as f64, t()?),
        Diluted => rhs_diluted(g1()?, g2()?, t()?, need(theorem, "lambda_n", &p.lambda_n)?),
        DilutedTail => diluted_cap(need(theorem, "lambda_n", &p.lambda_n)?),
        Thm3_1 => rhs_thm3_1(&w()?, g1()?),
        FkgOverlap => rhs_fkg(g1()?, need(theorem, "V_size", &p.v_size)?),
        Thm5_1 => rhs_thm5_1(&w()?, g1()?),
        Thm5_2 => Ok(rhs_thm5_2(&w()?)),
        Thm5_3Ineq1 => rhs_ineq1(&w()?, need(theorem, "k", &p.k)?, g1()?),
        Thm5_3Ineq2 => rhs_ineq2(&w()?, need(theorem, "k", &p.k)?, g1()?, need(theorem, "c_k", &p.c_k)?),
        Eqlast => rhs_eqlast(g1()?, need(theorem, "V_size", &p.v_size)?),
        Eqlast2 => rhs_eqlast2(need(theorem, "V_size", &p.v_size)?),
    }
}
