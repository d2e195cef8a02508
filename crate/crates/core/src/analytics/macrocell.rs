//! Distribution of a macro-MT's best-beam SINR `γ = x/(λy + μ)`, where x is
//! the largest of N_Q unit exponentials and y is a unit exponential.

use super::numerics::{binomial, CompensatedSum, Crosscheck, AGREEMENT_TOL, MAX_CONDITION};
use super::quadrature::{Estimate, Quadrature};
use super::rate::rate_integral;
use crate::error::AnalyticsError;
use crate::model::MacroLinkBudget;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroAnalysisParams {
    /// N_Q, the number of qualified beams.
    pub n_q: usize,
    /// K_M.
    pub k_m: usize,
    pub lambda_m: f64,
    pub mu_m: f64,
    /// Γ_M, linear.
    pub gamma_m_req: f64,
}

impl MacroAnalysisParams {
    pub fn from_budget(budget: MacroLinkBudget, n_q: usize, k_m: usize, gamma_m_req: f64) -> Self {
        Self {
            n_q,
            k_m,
            lambda_m: budget.lambda_m,
            mu_m: budget.mu_m,
            gamma_m_req,
        }
    }

    pub fn with_n_q(self, n_q: usize) -> Self {
        Self { n_q, ..self }
    }

    pub fn validate(&self) -> Result<(), AnalyticsError> {
        if self.n_q == 0 || self.k_m == 0 {
            return Err(AnalyticsError::domain("n_q/k_m", "counts must be ≥ 1"));
        }
        for (key, v) in [
            ("lambda_m", self.lambda_m),
            ("mu_m", self.mu_m),
            ("gamma_m_req", self.gamma_m_req),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(AnalyticsError::domain(key, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Characteristic SINR scale, used to map semi-infinite integrals.
    fn scale(&self) -> f64 {
        1.0 / (self.lambda_m + self.mu_m)
    }
}

fn sign(l: usize) -> f64 {
    if l % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Pr(γ > g) = Σ_{l=1}^{m} C(m,l)(−1)^{l−1} e^{−lμg}/(1 + lλg), with the
/// sum's conditioning.
pub fn sf_gamma_mk_closed_form(g: f64, p: &MacroAnalysisParams) -> (f64, f64) {
    if g <= 0.0 {
        return (1.0, 1.0);
    }
    let sum: CompensatedSum = (1..=p.n_q)
        .map(|l| {
            let l_f = l as f64;
            sign(l) * binomial(p.n_q, l) * (-l_f * p.mu_m * g).exp() / (1.0 + l_f * p.lambda_m * g)
        })
        .collect();
    (sum.value(), sum.condition_against(1.0))
}

/// Density by the finite sum, term by term as usually printed.
pub fn pdf_gamma_mk_closed_form(g: f64, p: &MacroAnalysisParams) -> (f64, f64) {
    if g < 0.0 {
        return (0.0, 1.0);
    }
    let n = p.n_q;
    let lambda = p.lambda_m;
    let mu = p.mu_m;
    let sum: CompensatedSum = (0..n)
        .map(|i| {
            let rate = (n - i) as f64 * g + 1.0 / lambda;
            let sgn = if (n - 1 - i).is_multiple_of(2) { 1.0 } else { -1.0 };
            n as f64 * binomial(n - 1, i) * (-((n - i) as f64) * mu * g).exp() / lambda
                * sgn
                * (1.0 + mu * rate)
                / (rate * rate)
        })
        .collect();
    (sum.value(), sum.condition_against(1.0))
}

/// The CDF expression exactly as usually printed. Algebraically it equals
/// Σ_l C(m,l)(−1)^{l−1} e^{−lμγ}/(1 − lλγ): the survival function with the
/// sign of lλγ flipped, so it is not a CDF.
pub fn cdf_gamma_mk_printed(g: f64, p: &MacroAnalysisParams) -> f64 {
    let n = p.n_q;
    let lambda = p.lambda_m;
    let mu = p.mu_m;
    (0..n)
        .map(|i| {
            let l = (n - i) as f64;
            let sgn = if (n - 1 - i).is_multiple_of(2) { 1.0 } else { -1.0 };
            n as f64 * binomial(n - 1, i) * mu / (l * lambda) * sgn * (-l * mu * g).exp()
                / (-l * mu * g + mu / lambda)
        })
        .sum()
}

/// Pr(γ ≤ g) by quadrature of its definition, E_y[(1 − e^{−g(λy+μ)})^m].
pub fn cdf_gamma_mk_quadrature(
    g: f64,
    p: &MacroAnalysisParams,
    quad: &Quadrature,
) -> Result<Estimate, AnalyticsError> {
    if g <= 0.0 {
        return Ok(Estimate {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let m = p.n_q as i32;
    Ok(quad.integrate_to_infinity(
        |y| (-(-g * (p.lambda_m * y + p.mu_m)).exp_m1()).powi(m) * (-y).exp(),
        0.0,
        1.0,
    )?)
}

/// Density by quadrature of its definition,
/// ∫ f_x(g(λy+μ))·(λy+μ)·e^{−y} dy with f_x the density of the maximum.
pub fn pdf_gamma_mk_quadrature(
    g: f64,
    p: &MacroAnalysisParams,
    quad: &Quadrature,
) -> Result<Estimate, AnalyticsError> {
    if g < 0.0 {
        return Ok(Estimate {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let m = p.n_q;
    let integrand = |y: f64| {
        let s = p.lambda_m * y + p.mu_m;
        let x = g * s;
        m as f64 * (-(-x).exp_m1()).powi(m as i32 - 1) * (-x).exp() * s * (-y).exp()
    };
    Ok(quad.integrate_to_infinity(integrand, 0.0, 1.0)?)
}

pub fn pdf_gamma_mk_crosscheck(
    g: f64,
    p: &MacroAnalysisParams,
    quad: &Quadrature,
) -> Result<Crosscheck, AnalyticsError> {
    let (fast, condition) = pdf_gamma_mk_closed_form(g, p);
    let oracle = pdf_gamma_mk_quadrature(g, p, quad)?;
    Ok(Crosscheck {
        label: format!("f_γM(γ={g:e}; N_Q={})", p.n_q),
        fast,
        oracle: oracle.value,
        // The oracle cannot certify agreement below its own tolerance.
        oracle_error: oracle.abs_error.max(quad.abs_tol),
        condition,
        tolerance: AGREEMENT_TOL,
    })
}

/// Density of γ_{M,k}; falls back to quadrature when the finite sum is
/// ill-conditioned.
pub fn pdf_gamma_mk(g: f64, p: &MacroAnalysisParams, quad: &Quadrature) -> Result<f64, AnalyticsError> {
    let (fast, condition) = pdf_gamma_mk_closed_form(g, p);
    if condition <= MAX_CONDITION && fast.is_finite() {
        Ok(fast.max(0.0))
    } else {
        Ok(pdf_gamma_mk_quadrature(g, p, quad)?.value)
    }
}

/// Pr(γ_{M,k} > g).
pub fn sf_gamma_mk(g: f64, p: &MacroAnalysisParams, quad: &Quadrature) -> Result<f64, AnalyticsError> {
    let (fast, condition) = sf_gamma_mk_closed_form(g, p);
    if condition <= MAX_CONDITION && fast.is_finite() {
        Ok(fast.clamp(0.0, 1.0))
    } else {
        Ok(1.0 - cdf_gamma_mk_quadrature(g, p, quad)?.value)
    }
}

pub fn cdf_gamma_mk(g: f64, p: &MacroAnalysisParams, quad: &Quadrature) -> Result<f64, AnalyticsError> {
    Ok(1.0 - sf_gamma_mk(g, p, quad)?)
}

/// Conditional (CDF, PDF) of the served macro SINR given N_Q = m and that
/// the MT meets Γ_M: the left truncation at Γ_M.
pub fn conditional_gamma_m(
    g: f64,
    p: &MacroAnalysisParams,
    quad: &Quadrature,
) -> Result<(f64, f64), AnalyticsError> {
    p.validate()?;
    let tail = sf_gamma_mk(p.gamma_m_req, p, quad)?;
    if tail <= 0.0 {
        return Err(AnalyticsError::UnreachableQos { n_q: p.n_q });
    }
    if g < p.gamma_m_req {
        return Ok((0.0, 0.0));
    }
    let cdf = (1.0 - sf_gamma_mk(g, p, quad)? / tail).clamp(0.0, 1.0);
    Ok((cdf, pdf_gamma_mk(g, p, quad)? / tail))
}

/// Pr(K_Q ≠ 0 | N_Q = m) = Σ_{k=1}^{K} C(K,k) F^{K−k}(1 − F)^k with F the
/// CDF at Γ_M.
pub fn prob_kq_nonzero(p: &MacroAnalysisParams, quad: &Quadrature) -> Result<f64, AnalyticsError> {
    let f = cdf_gamma_mk(p.gamma_m_req, p, quad)?;
    Ok(prob_kq_nonzero_sum(f, p.k_m))
}

pub fn prob_kq_nonzero_sum(f: f64, k_m: usize) -> f64 {
    let sum: CompensatedSum = (1..=k_m)
        .map(|k| binomial(k_m, k) * f.powi((k_m - k) as i32) * (1.0 - f).powi(k as i32))
        .collect();
    sum.value()
}

pub fn prob_kq_nonzero_complement(f: f64, k_m: usize) -> f64 {
    1.0 - f.powi(k_m as i32)
}

/// E[log₂(1+γ) | γ ≥ Γ_M; N_Q = m]. Errors with `UnreachableQos` when
/// Pr(γ ≥ Γ_M) is zero.
pub fn conditional_rate(p: &MacroAnalysisParams, quad: &Quadrature) -> Result<f64, AnalyticsError> {
    p.validate()?;
    let tail = sf_gamma_mk(p.gamma_m_req, p, quad)?;
    if tail <= 0.0 {
        return Err(AnalyticsError::UnreachableQos { n_q: p.n_q });
    }
    let scale = p.gamma_m_req + p.scale();
    let mass = rate_integral(
        |g| pdf_gamma_mk(g, p, quad).unwrap_or(f64::NAN),
        p.gamma_m_req,
        scale,
        quad,
    )?;
    Ok(mass / tail)
}
