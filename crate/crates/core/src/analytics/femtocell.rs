//! Femto-side distributions: the best normalized projection x_F, the number
//! of qualified MBS beams N_Q and the served femto-MT's SINR γ_F.
//!
//! Conventions: `u = λ_F·y` is the scaled interference, the qualification
//! threshold on x_F is `x₀ = μ_F Γ_F`, and a beam qualifies given x_F = x
//! iff `u ≤ c(x) = x/Γ_F − μ_F`.

use super::best_beams::BestBeamLaw;
use super::numerics::{binomial, CompensatedSum, Crosscheck, AGREEMENT_TOL};
use super::quadrature::{Estimate, Quadrature};
use crate::error::AnalyticsError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FemtoAnalysisParams {
    /// K_F·N_F, the number of candidate (MT, beam) pairs.
    pub n_total: usize,
    /// N_M.
    pub n_m: usize,
    pub lambda_f: f64,
    pub mu_f: f64,
    /// Γ_F, linear.
    pub gamma_f_req: f64,
}

impl FemtoAnalysisParams {
    pub fn validate(&self) -> Result<(), AnalyticsError> {
        if self.n_total == 0 || self.n_m == 0 {
            return Err(AnalyticsError::domain("n_total/n_m", "counts must be ≥ 1"));
        }
        for (key, v) in [
            ("lambda_f", self.lambda_f),
            ("mu_f", self.mu_f),
            ("gamma_f_req", self.gamma_f_req),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(AnalyticsError::domain(key, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// x₀ = μ_F Γ_F: below it no beam can qualify.
    pub fn x_threshold(&self) -> f64 {
        self.mu_f * self.gamma_f_req
    }

    /// c(x) = x/Γ_F − μ_F, the largest admissible scaled interference.
    pub fn interference_cap(&self, x: f64) -> f64 {
        x / self.gamma_f_req - self.mu_f
    }

    /// Pr(beam not qualified | x) = e^{−(x−x₀)/(Γ_F λ_F)} for x > x₀.
    fn prob_not_qualified(&self, x: f64) -> f64 {
        if x <= self.x_threshold() {
            1.0
        } else {
            (-(x - self.x_threshold()) / (self.gamma_f_req * self.lambda_f)).exp()
        }
    }
}

/// Density of x_F, the maximum of `n_total` i.i.d. Exp(1) variables.
pub fn pdf_xf(x: f64, n_total: usize) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let one_minus = -(-x).exp_m1();
    n_total as f64 * one_minus.powi(n_total as i32 - 1) * (-x).exp()
}

pub fn cdf_xf(x: f64, n_total: usize) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-(-x).exp_m1()).powi(n_total as i32)
    }
}

/// Pr(a given MBS beam qualifies | x_F = x).
pub fn prob_beam_qualified(x: f64, p: &FemtoAnalysisParams) -> f64 {
    if x <= p.x_threshold() {
        0.0
    } else {
        -(-(x - p.x_threshold()) / (p.gamma_f_req * p.lambda_f)).exp_m1()
    }
}

/// Pr(N_Q = m | x_F = x): binomial over the N_M beams.
pub fn pmf_nq_given_xf(m: usize, x: f64, p: &FemtoAnalysisParams) -> f64 {
    if m > p.n_m {
        return 0.0;
    }
    let q = prob_beam_qualified(x, p);
    let not_q = p.prob_not_qualified(x);
    binomial(p.n_m, m) * q.powi(m as i32) * not_q.powi((p.n_m - m) as i32)
}

/// Closed form of Pr(N_Q = m), integrating the binomial against the
/// density of x_F from the qualification threshold x₀ on:
///
/// `C(N,m)·[δ_{m0}·F(x₀) + K Σᵢ Σⱼ C(m,i)(−1)^{m−i} C(K−1,j)(−1)^{K−1−j}
///  e^{−(K−j)x₀} / ((N−i)/(Γλ) + K−j)]` with K = K_F N_F.
///
/// Returns the value and the conditioning of the double sum.
pub fn pmf_nq_closed_form(m: usize, p: &FemtoAnalysisParams) -> (f64, f64) {
    if m > p.n_m {
        return (0.0, 1.0);
    }
    let n = p.n_m;
    let k = p.n_total;
    let a = 1.0 / (p.gamma_f_req * p.lambda_f);
    let x0 = p.x_threshold();
    let mut sum = CompensatedSum::new();
    for i in 0..=m {
        let si = if (m - i).is_multiple_of(2) { 1.0 } else { -1.0 };
        for j in 0..k {
            let sj = if (k - 1 - j).is_multiple_of(2) { 1.0 } else { -1.0 };
            let rate = (n - i) as f64 * a + (k - j) as f64;
            sum.add(
                si * sj * binomial(m, i) * binomial(k - 1, j) * (-((k - j) as f64) * x0).exp()
                    / rate,
            );
        }
    }
    let prefactor = binomial(n, m) * k as f64;
    let mut value = prefactor * sum.value();
    if m == 0 {
        value += cdf_xf(x0, k);
    }
    (value, sum.condition_against(1.0 / prefactor))
}

/// The double sum exactly as usually printed: integrated from x = 0 with an
/// `e^{(μ/λ)(N−i)}` factor, i.e. without the truncation of the
/// qualification probability at zero for x < x₀.
pub fn pmf_nq_printed(m: usize, p: &FemtoAnalysisParams) -> f64 {
    let n = p.n_m;
    let k = p.n_total;
    let a = 1.0 / (p.gamma_f_req * p.lambda_f);
    let mut sum = CompensatedSum::new();
    for i in 0..=m {
        for j in 0..k {
            let sign = if (k - 1 - j + m - i).is_multiple_of(2) { 1.0 } else { -1.0 };
            let growth = (p.mu_f / p.lambda_f * (n - i) as f64).exp();
            sum.add(
                sign * binomial(m, i) * binomial(k - 1, j) * growth
                    / ((n - i) as f64 * a + (k - j) as f64),
            );
        }
    }
    k as f64 * binomial(n, m) * sum.value()
}

/// Direct quadrature of ∫ Pr(N_Q = m | x) f_{x_F}(x) dx.
pub fn pmf_nq_quadrature(
    m: usize,
    p: &FemtoAnalysisParams,
    quad: &Quadrature,
) -> Result<Estimate, AnalyticsError> {
    let x0 = p.x_threshold();
    let head = if m == 0 && x0 > 0.0 {
        quad.integrate(|x| pdf_xf(x, p.n_total), 0.0, x0)?
    } else {
        Estimate {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        }
    };
    let scale = p.gamma_f_req * p.lambda_f;
    let breaks = [x0 + scale, x0 + 4.0 * scale, x0 + 16.0 * scale];
    let mut breaks: Vec<f64> = breaks.into_iter().chain([1.0, 4.0, 12.0]).collect();
    breaks.sort_by(f64::total_cmp);
    let tail = quad.integrate_split_to_infinity(
        |x| pmf_nq_given_xf(m, x, p) * pdf_xf(x, p.n_total),
        x0,
        &breaks,
        1.0,
    )?;
    Ok(Estimate {
        value: head.value + tail.value,
        abs_error: head.abs_error + tail.abs_error,
        evaluations: head.evaluations + tail.evaluations,
    })
}

pub fn pmf_nq_crosscheck(
    m: usize,
    p: &FemtoAnalysisParams,
    quad: &Quadrature,
) -> Result<Crosscheck, AnalyticsError> {
    let (fast, condition) = pmf_nq_closed_form(m, p);
    let oracle = pmf_nq_quadrature(m, p, quad)?;
    Ok(Crosscheck {
        label: format!("Pr(N_Q={m})"),
        fast,
        oracle: oracle.value,
        // The oracle cannot certify agreement below its own tolerance.
        oracle_error: oracle.abs_error.max(quad.abs_tol),
        condition,
        tolerance: AGREEMENT_TOL,
    })
}

/// Pr(N_Q = m): the closed form when it agrees with quadrature, otherwise
/// the quadrature value.
pub fn pmf_nq(m: usize, p: &FemtoAnalysisParams, quad: &Quadrature) -> Result<f64, AnalyticsError> {
    p.validate()?;
    Ok(pmf_nq_crosscheck(m, p, quad)?.resolve().clamp(0.0, 1.0))
}

/// The whole PMF of N_Q, m = 0..=N_M.
pub fn pmf_nq_vector(p: &FemtoAnalysisParams, quad: &Quadrature) -> Result<Vec<f64>, AnalyticsError> {
    (0..=p.n_m).map(|m| pmf_nq(m, p, quad)).collect()
}

/// Which expression to use for the scaled interference of the selected
/// macro beam given x_F and N_B = n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterferenceForm {
    /// `(n/λ) e^{−n u/λ} / (1 − e^{−c/λ})`: exact for n = 1 only.
    Printed,
    /// Minimum of n i.i.d. exponentials truncated to [0, c], renormalized.
    TruncatedMinimum,
}

/// Pr(U > u | x, n) for the truncated minimum.
pub fn sf_interference_given(u: f64, x: f64, n: usize, p: &FemtoAnalysisParams) -> f64 {
    let c = p.interference_cap(x);
    if u <= 0.0 {
        return 1.0;
    }
    if u >= c {
        return 0.0;
    }
    let lambda = p.lambda_f;
    let ratio = (-u / lambda).exp() * (-(-(c - u) / lambda).exp_m1()) / (-(-c / lambda).exp_m1());
    ratio.powi(n as i32)
}

/// Density of the scaled interference `u` of the selected macro beam given
/// x_F = `x` and `n ≥ 1` requested beams. Zero outside [0, c(x)].
pub fn pdf_interference_given(
    u: f64,
    x: f64,
    n: usize,
    p: &FemtoAnalysisParams,
    form: InterferenceForm,
) -> f64 {
    let c = p.interference_cap(x);
    if n == 0 || c <= 0.0 || u < 0.0 || u > c {
        return 0.0;
    }
    let lambda = p.lambda_f;
    let mass = -(-c / lambda).exp_m1();
    match form {
        InterferenceForm::Printed => n as f64 / lambda * (-(n as f64) * u / lambda).exp() / mass,
        InterferenceForm::TruncatedMinimum => {
            let single = (-u / lambda).exp() / lambda / mass;
            let survive =
                (-u / lambda).exp() * (-(-(c - u) / lambda).exp_m1()) / mass;
            n as f64 * single * survive.powi(n as i32 - 1)
        }
    }
}

/// How x_F is distributed when conditioning on N_B = n.
#[derive(Debug, Clone, Copy)]
pub enum XfConditioning<'a> {
    /// Ignore the dependence of N_B on x_F and use the plain density of
    /// x_F (the usual printed construction).
    Marginal,
    /// Exact: weight by Pr(N_B = n | x) = Σ_m Pr(N_Q = m | x) Pr(N_B = n | m).
    Exact(&'a BestBeamLaw),
}

/// Pr(N_B = n | x_F = x).
pub fn prob_nb_given_xf(n: usize, x: f64, p: &FemtoAnalysisParams, law: &BestBeamLaw) -> f64 {
    (0..=p.n_m)
        .map(|m| pmf_nq_given_xf(m, x, p) * law.prob(n, m))
        .sum()
}

/// Pr(N_B = n) by direct integration over x_F.
pub fn prob_nb_quadrature(
    n: usize,
    p: &FemtoAnalysisParams,
    law: &BestBeamLaw,
    quad: &Quadrature,
) -> Result<Estimate, AnalyticsError> {
    let x0 = p.x_threshold();
    let scale = p.gamma_f_req * p.lambda_f;
    let mut breaks = vec![x0, x0 + scale, x0 + 4.0 * scale, 1.0, 4.0, 12.0];
    breaks.sort_by(f64::total_cmp);
    Ok(quad.integrate_split_to_infinity(
        |x| pdf_xf(x, p.n_total) * prob_nb_given_xf(n, x, p, law),
        0.0,
        &breaks,
        1.0,
    )?)
}

fn weight(
    n: usize,
    x: f64,
    p: &FemtoAnalysisParams,
    conditioning: XfConditioning<'_>,
) -> f64 {
    match conditioning {
        XfConditioning::Marginal => pdf_xf(x, p.n_total),
        XfConditioning::Exact(law) => pdf_xf(x, p.n_total) * prob_nb_given_xf(n, x, p, law),
    }
}

fn normalizer(
    n: usize,
    p: &FemtoAnalysisParams,
    conditioning: XfConditioning<'_>,
    quad: &Quadrature,
) -> Result<f64, AnalyticsError> {
    match conditioning {
        XfConditioning::Marginal => Ok(1.0),
        XfConditioning::Exact(law) => Ok(prob_nb_quadrature(n, p, law, quad)?.value),
    }
}

/// Where the density of x_F has its mass, for splitting long panels.
const XF_BREAKS: [f64; 6] = [1.0, 4.0, 12.0, 24.0, 48.0, 96.0];

/// Breakpoints for integrals over x where the integrand follows
/// `u = x/γ − μ` on the interference scale.
fn x_breaks(gamma: f64, n: usize, p: &FemtoAnalysisParams) -> Vec<f64> {
    let lo = gamma * p.mu_f;
    let s = gamma * p.lambda_f / n.max(1) as f64;
    let mut breaks: Vec<f64> = [0.5, 2.0, 8.0, 32.0]
        .iter()
        .map(|f| lo + f * s)
        .chain([p.x_threshold(), 1.0, 4.0, 12.0])
        .filter(|&b| b > lo)
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks
}

/// Density of γ_F given N_B = n.
///
/// For n = 0 the served femto-MT sees no cross-tier interference and
/// γ_F = x_F/μ_F, so the density is `μ_F f(γ μ_F)`. For n ≥ 1 it is
/// `∫ f_U(x/γ − μ_F | x, n)·(x/γ²)·f(x) dx` over x ≥ γ μ_F, where `f` is
/// the density of x_F under `conditioning`.
pub fn pdf_gamma_f(
    gamma: f64,
    n: usize,
    p: &FemtoAnalysisParams,
    form: InterferenceForm,
    conditioning: XfConditioning<'_>,
    quad: &Quadrature,
) -> Result<f64, AnalyticsError> {
    let norm = normalizer(n, p, conditioning, quad)?;
    pdf_gamma_f_unnormalized(gamma, n, p, form, conditioning, quad).map(|v| v / norm)
}

fn pdf_gamma_f_unnormalized(
    gamma: f64,
    n: usize,
    p: &FemtoAnalysisParams,
    form: InterferenceForm,
    conditioning: XfConditioning<'_>,
    quad: &Quadrature,
) -> Result<f64, AnalyticsError> {
    if n == 0 {
        if gamma < 0.0 {
            return Ok(0.0);
        }
        let x = gamma * p.mu_f;
        return Ok(p.mu_f * weight(0, x, p, conditioning));
    }
    if gamma < p.gamma_f_req {
        return Ok(0.0);
    }
    let lo = gamma * p.mu_f;
    let integrand = |x: f64| {
        let u = x / gamma - p.mu_f;
        pdf_interference_given(u, x, n, p, form) * x / (gamma * gamma) * weight(n, x, p, conditioning)
    };
    Ok(quad
        .integrate_split_to_infinity(integrand, lo, &x_breaks(gamma, n, p), 1.0)?
        .value)
}

/// The n = 0 density exactly as usually printed,
/// `K(1 − e^{−γ/μ})^{K−1} e^{−γ/μ}` (integrates to μ_F, not 1).
pub fn pdf_gamma_f_printed_idle(gamma: f64, p: &FemtoAnalysisParams) -> f64 {
    pdf_xf(gamma / p.mu_f, p.n_total)
}

/// Pr(γ_F ≤ g | N_B = n) under exact conditioning.
pub fn cdf_gamma_f(
    g: f64,
    n: usize,
    p: &FemtoAnalysisParams,
    law: &BestBeamLaw,
    quad: &Quadrature,
) -> Result<f64, AnalyticsError> {
    let norm = prob_nb_quadrature(n, p, law, quad)?.value;
    let w = |x: f64| pdf_xf(x, p.n_total) * prob_nb_given_xf(n, x, p, law);
    if n == 0 {
        if g <= 0.0 {
            return Ok(0.0);
        }
        let hi = g * p.mu_f;
        let mut points = vec![0.0];
        points.extend(
            std::iter::once(p.x_threshold())
                .chain(XF_BREAKS)
                .filter(|&b| b > 0.0 && b < hi),
        );
        points.sort_by(f64::total_cmp);
        points.push(hi);
        return Ok((quad.integrate_pieces(&w, &points)?.value / norm).min(1.0));
    }
    if g <= p.gamma_f_req {
        return Ok(0.0);
    }
    // γ_F ≤ g ⇔ U ≥ x/g − μ.
    let below = |x: f64| w(x) * sf_interference_given(x / g - p.mu_f, x, n, p);
    let x0 = p.x_threshold();
    let mut breaks = x_breaks(g, n, p);
    breaks.insert(0, g * p.mu_f);
    // Below gμ_F the integrand is the bare density of x_F.
    breaks.extend(XF_BREAKS);
    breaks.retain(|&b| b > x0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let value = quad.integrate_split_to_infinity(below, x0, &breaks, 1.0)?.value;
    Ok((value / norm).clamp(0.0, 1.0))
}

/// E[log₂(1 + x/(U + μ_F))] for U the truncated minimum over `n` beams;
/// `n = 0` is the interference-free rate.
///
/// Integrates by parts in `v = ln(u + μ_F)`, where the integrand is smooth
/// even when μ_F ≪ λ_F.
pub fn rate_given_xf(
    x: f64,
    n: usize,
    p: &FemtoAnalysisParams,
    quad: &Quadrature,
) -> Result<f64, AnalyticsError> {
    let free = (x / p.mu_f).ln_1p() / std::f64::consts::LN_2;
    if n == 0 {
        return Ok(free);
    }
    let c = p.interference_cap(x);
    if c <= 0.0 {
        return Ok(free);
    }
    let mu = p.mu_f;
    let integrand = |v: f64| {
        let shifted = v.exp();
        let u = shifted - mu;
        x / ((shifted + x) * std::f64::consts::LN_2) * sf_interference_given(u, x, n, p)
    };
    let lo = mu.ln();
    let hi = (c + mu).ln();
    let knee = (p.lambda_f / n as f64 + mu).ln();
    let mut points = vec![lo];
    if knee > lo && knee < hi {
        points.push(knee);
    }
    points.push(hi);
    Ok(free - quad.integrate_pieces(&integrand, &points)?.value)
}

/// Σ_n Pr(N_B = n)·E[log₂(1+γ_F) | N_B = n] split by n: element n is
/// `E[log₂(1+γ_F); N_B = n]`.
pub fn femto_rate_by_nb(
    p: &FemtoAnalysisParams,
    law: &BestBeamLaw,
    quad: &Quadrature,
) -> Result<Vec<f64>, AnalyticsError> {
    p.validate()?;
    let x0 = p.x_threshold();
    let scale = p.gamma_f_req * p.lambda_f;
    let mut breaks = vec![x0, x0 + scale, x0 + 4.0 * scale, 1.0, 4.0, 12.0];
    breaks.retain(|&b| b > 0.0);
    breaks.sort_by(f64::total_cmp);
    (0..=p.n_m)
        .map(|n| {
            let failure = std::cell::OnceCell::new();
            let integrand = |x: f64| {
                let w = pdf_xf(x, p.n_total) * prob_nb_given_xf(n, x, p, law);
                if w == 0.0 {
                    return 0.0;
                }
                match rate_given_xf(x, n, p, quad) {
                    Ok(r) => w * r,
                    Err(e) => {
                        let _ = failure.set(e);
                        f64::NAN
                    }
                }
            };
            let result = quad.integrate_split_to_infinity(integrand, 0.0, &breaks, 1.0);
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            Ok(result?.value)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn femto_cdf_reaches_one_when_noise_is_tiny() {
        let p = FemtoAnalysisParams {
            n_total: 10,
            n_m: 4,
            lambda_f: 1e-3,
            mu_f: 1e-5,
            gamma_f_req: 100.0,
        };
        let identity = (0..=p.n_m)
            .map(|m| (0..=p.n_m).map(|n| if n == m { 1.0 } else { 0.0 }).collect())
            .collect();
        let law = BestBeamLaw::from_rows(identity);
        let quad = Quadrature::default();
        let top = 40.0 / p.mu_f;
        for n in 0..=p.n_m {
            let mut last = 0.0;
            for i in 0..=200 {
                let g = top * (i as f64 / 200.0).powi(2);
                let f = cdf_gamma_f(g, n, &p, &law, &quad).unwrap();
                assert!(f >= last - quad.rel_tol, "n = {n}, g = {g}: {f} < {last}");
                last = f;
            }
            let end = cdf_gamma_f(1e3 * top, n, &p, &law, &quad).unwrap();
            assert!((end - 1.0).abs() < 1e-6, "n = {n}: F(∞) = {end}");
        }
    }

    fn params() -> FemtoAnalysisParams {
        FemtoAnalysisParams {
            n_total: 10,
            n_m: 4,
            lambda_f: 0.06,
            mu_f: 0.01,
            gamma_f_req: 100.0,
        }
    }

    #[test]
    fn qualification_probability() {
        let p = FemtoAnalysisParams {
            lambda_f: 1.0,
            mu_f: 1e-300,
            gamma_f_req: 1.0,
            ..params()
        };
        assert!((prob_beam_qualified(1.0, &p) - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        assert!((prob_beam_qualified(0.632_121, &p) - 0.468_6).abs() < 1e-3);
        let q = params();
        assert_eq!(prob_beam_qualified(q.x_threshold(), &q), 0.0);
        assert!((prob_beam_qualified(1e4, &q) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditional_pmf_is_binomial() {
        let p = FemtoAnalysisParams {
            lambda_f: 1.0,
            mu_f: 1e-300,
            gamma_f_req: 1.0,
            ..params()
        };
        // q = 1 − e^{−1}
        let v = pmf_nq_given_xf(2, 1.0, &p);
        let q = 1.0 - (-1.0f64).exp();
        assert!((v - 6.0 * q * q * (1.0 - q).powi(2)).abs() < 1e-12);
        assert!((v - 0.324_461).abs() < 1e-6);
        let total: f64 = (0..=4).map(|m| pmf_nq_given_xf(m, 0.7, &params())).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(pmf_nq_given_xf(0, 0.5 * params().x_threshold(), &params()), 1.0);
    }

    #[test]
    fn xf_density() {
        for x in [0.0, 0.3, 1.0, 5.0] {
            assert!((pdf_xf(x, 1) - (-x).exp()).abs() < 1e-15);
        }
        let quad = Quadrature::default();
        let total = quad.integrate_to_infinity(|x| pdf_xf(x, 10), 0.0, 1.0).unwrap();
        assert!((total.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn closed_form_pmf_matches_quadrature() {
        let quad = Quadrature::default();
        for p in [
            params(),
            FemtoAnalysisParams {
                mu_f: 0.5,
                gamma_f_req: 2.0,
                ..params()
            },
            FemtoAnalysisParams {
                lambda_f: 3.0,
                gamma_f_req: 0.5,
                ..params()
            },
        ] {
            let mut total = 0.0;
            for m in 0..=p.n_m {
                let check = pmf_nq_crosscheck(m, &p, &quad).unwrap();
                assert!(check.agrees(), "{check:?}");
                total += check.fast;
            }
            assert!((total - 1.0).abs() < 1e-9, "total={total}");
        }
    }

    #[test]
    fn printed_pmf_misses_truncation() {
        let quad = Quadrature::default();
        let p = FemtoAnalysisParams {
            mu_f: 0.5,
            gamma_f_req: 2.0,
            ..params()
        };
        let gap = (pmf_nq_printed(0, &p) - pmf_nq_quadrature(0, &p, &quad).unwrap().value).abs();
        assert!(gap > 1e-3, "gap={gap}");
        // With a negligible threshold x₀ the printed form is accurate.
        let tiny = FemtoAnalysisParams {
            mu_f: 1e-7,
            ..params()
        };
        for m in 0..=4 {
            let gap = (pmf_nq_printed(m, &tiny) - pmf_nq_quadrature(m, &tiny, &quad).unwrap().value)
                .abs();
            assert!(gap < 1e-8, "m={m} gap={gap}");
        }
    }

    #[test]
    fn vanishing_threshold_qualifies_everything() {
        let quad = Quadrature::default();
        let p = FemtoAnalysisParams {
            gamma_f_req: 1e-9,
            ..params()
        };
        assert!((pmf_nq(4, &p, &quad).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn interference_density_normalization() {
        let quad = Quadrature::default();
        let p = params();
        let x = 3.0;
        let c = p.interference_cap(x);
        for n in 1..=4 {
            let mass = quad
                .integrate(
                    |u| pdf_interference_given(u, x, n, &p, InterferenceForm::TruncatedMinimum),
                    0.0,
                    c,
                )
                .unwrap()
                .value;
            assert!((mass - 1.0).abs() < 1e-6, "n={n} mass={mass}");
            let printed = quad
                .integrate(
                    |u| pdf_interference_given(u, x, n, &p, InterferenceForm::Printed),
                    0.0,
                    c,
                )
                .unwrap()
                .value;
            if n == 1 {
                assert!((printed - 1.0).abs() < 1e-6);
            } else {
                assert!((printed - 1.0).abs() > 1e-3, "n={n} printed={printed}");
            }
        }
        // Truncation vanishes as x grows: plain Exp(mean λ).
        let far = 1e6;
        for u in [0.0, 0.01, 0.1] {
            let d = pdf_interference_given(u, far, 1, &p, InterferenceForm::TruncatedMinimum);
            assert!((d - (-u / p.lambda_f).exp() / p.lambda_f).abs() < 1e-9);
        }
    }

    #[test]
    fn idle_density_forms() {
        let quad = Quadrature::default();
        let p = params();
        let law = BestBeamLaw::always_off(p.n_m);
        let corrected = quad
            .integrate_to_infinity(
                |g| {
                    pdf_gamma_f(g, 0, &p, InterferenceForm::TruncatedMinimum, XfConditioning::Marginal, &quad)
                        .unwrap()
                },
                0.0,
                1.0 / p.mu_f,
            )
            .unwrap()
            .value;
        assert!((corrected - 1.0).abs() < 1e-6);
        let printed = quad
            .integrate_to_infinity(|g| pdf_gamma_f_printed_idle(g, &p), 0.0, p.mu_f)
            .unwrap()
            .value;
        assert!((printed - p.mu_f).abs() < 1e-8);
        // Single candidate, no interference: exponential with mean 1/μ.
        let single = FemtoAnalysisParams { n_total: 1, ..p };
        let g = 37.0;
        let d = pdf_gamma_f(g, 0, &single, InterferenceForm::TruncatedMinimum, XfConditioning::Exact(&law), &quad)
            .unwrap();
        assert!((d - p.mu_f * (-g * p.mu_f).exp()).abs() < 1e-9);
    }

    #[test]
    fn rate_given_xf_matches_plain_quadrature() {
        let quad = Quadrature::default();
        let p = params();
        let x = 2.5;
        let c = p.interference_cap(x);
        for n in 1..=3 {
            let direct = quad
                .integrate(
                    |u| {
                        (1.0 + x / (u + p.mu_f)).log2()
                            * pdf_interference_given(u, x, n, &p, InterferenceForm::TruncatedMinimum)
                    },
                    0.0,
                    c,
                )
                .unwrap()
                .value;
            let by_parts = rate_given_xf(x, n, &p, &quad).unwrap();
            assert!((direct - by_parts).abs() < 1e-7, "n={n}: {direct} vs {by_parts}");
        }
    }
}
