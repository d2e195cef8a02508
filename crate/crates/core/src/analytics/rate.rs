use super::quadrature::Quadrature;
use crate::error::AnalyticsError;

/// log₂(1 + γ).
pub fn shannon_rate(gamma: f64) -> f64 {
    gamma.ln_1p() / std::f64::consts::LN_2
}

/// ∫_{lo}^∞ log₂(1+γ)·density(γ) dγ. `scale` is the width over which the
/// density decays and sets the semi-infinite mapping.
pub fn rate_integral<F: Fn(f64) -> f64>(
    density: F,
    support_lo: f64,
    scale: f64,
    quad: &Quadrature,
) -> Result<f64, AnalyticsError> {
    let scale = if scale > 0.0 && scale.is_finite() {
        scale
    } else {
        1.0
    };
    let lo = support_lo.max(0.0);
    let est = quad.integrate_split_to_infinity(
        |g| shannon_rate(g) * density(g),
        lo,
        &[lo + 0.25 * scale, lo + scale, lo + 4.0 * scale],
        scale,
    )?;
    if !est.value.is_finite() {
        return Err(AnalyticsError::domain(
            "density",
            "rate integrand is not finite",
        ));
    }
    Ok(est.value)
}
