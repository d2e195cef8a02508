//! Pass/fail checks shared by `qacs validate` and the acceptance suite.

use std::fmt;

use qacs_core::analytics::audit::{closed_form_grids, printed_formula_audit};
use qacs_core::analytics::best_beams::BestBeamLaw;
use qacs_core::analytics::femtocell::{
    pdf_interference_given, pdf_xf, pmf_nq_vector, InterferenceForm,
};
use qacs_core::analytics::macrocell::pdf_gamma_mk;
use qacs_core::analytics::{
    pdf_gamma_f, FemtoAnalysisParams, MacroAnalysisParams, MacroPopulation, Quadrature,
    XfConditioning,
};
use qacs_core::simkit::{DropReport, FairnessReport};

/// Largest relative gap accepted between analytic and simulated rates.
pub const RATE_REL_TOL: f64 = 0.02;
/// Standard errors allowed per PMF bin.
pub const PMF_SIGMAS: f64 = 3.0;
/// Normalization tolerance for densities.
pub const DENSITY_MASS_TOL: f64 = 1e-6;
/// Normalization tolerance for probability mass functions.
pub const PMF_MASS_TOL: f64 = 1e-9;
/// Smallest p-value at which selection is still called uniform.
pub const FAIRNESS_P_MIN: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {}: {}", self.name, self.detail)
    }
}

/// Relative gap between an analytic value and a simulated one.
pub fn relative_gap(analytic: f64, empirical: f64) -> f64 {
    if analytic == 0.0 {
        empirical.abs()
    } else {
        (analytic - empirical).abs() / analytic.abs()
    }
}

/// Worst bin of an empirical PMF against the analytic one, in binomial
/// standard errors with a half-count continuity correction.
pub fn pmf_worst_sigma(counts: &[u64], analytic: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let n = n as f64;
    counts
        .iter()
        .zip(analytic)
        .map(|(&c, &p)| {
            let excess = ((c as f64 - n * p).abs() - 0.5).max(0.0);
            let sd = (n * p * (1.0 - p)).sqrt();
            if excess == 0.0 {
                0.0
            } else if sd == 0.0 {
                f64::INFINITY
            } else {
                excess / sd
            }
        })
        .fold(0.0, f64::max)
}

/// Upper tail of the χ² distribution through the Wilson–Hilferty normal
/// approximation.
pub fn chi2_upper_tail(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    let k = dof as f64;
    let z = ((statistic / k).cbrt() - (1.0 - 2.0 / (9.0 * k))) / (2.0 / (9.0 * k)).sqrt();
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Complementary error function (W. J. Cody's rational fit as in
/// Numerical Recipes `erfcc`, relative error < 1.2e-7).
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let poly = -z * z - 1.265_512_23
        + t * (1.000_023_68
            + t * (0.374_091_96
                + t * (0.096_784_18
                    + t * (-0.186_288_06
                        + t * (0.278_868_07
                            + t * (-1.135_203_98
                                + t * (1.488_515_87 + t * (-0.822_152_23 + t * 0.170_872_77))))))));
    let r = t * poly.exp();
    if x >= 0.0 {
        r
    } else {
        2.0 - r
    }
}

/// Simulated vs analytic rates and PMFs of one drop.
pub fn agreement_checks(report: &DropReport) -> Vec<Check> {
    let Some(a) = report.analytic.as_ref() else {
        return vec![Check::new(
            format!("drop {} analytics", report.drop_index),
            false,
            "no analytic prediction attached",
        )];
    };
    let d = report.drop_index;
    let mut out = Vec::new();
    for (name, ana, emp) in [
        ("R_F", a.r_f, &report.r_f),
        ("R_M", a.r_m, &report.r_m),
    ] {
        let gap = relative_gap(ana, emp.mean);
        out.push(Check::new(
            format!("drop {d} {name} analytic vs simulated"),
            gap <= RATE_REL_TOL,
            format!(
                "analytic {ana:.5}, simulated {:.5} ± {:.5}, gap {:.3}%",
                emp.mean,
                emp.ci95_halfwidth,
                100.0 * gap
            ),
        ));
    }
    for (name, counts, pmf) in [
        ("N_Q", &report.nq_counts, &a.pmf_nq),
        ("N_B", &report.nb_counts, &a.pmf_nb),
    ] {
        let worst = pmf_worst_sigma(counts, pmf);
        out.push(Check::new(
            format!("drop {d} pmf of {name}"),
            worst <= PMF_SIGMAS,
            format!("worst bin {worst:.2} standard errors"),
        ));
    }
    out
}

/// Femto χ² and macro uniform-choice checks of one drop.
pub fn fairness_checks(report: &DropReport) -> Vec<Check> {
    let fair = FairnessReport::from_drop(report);
    let d = report.drop_index;
    let dof = fair.femto_frequencies.len().saturating_sub(1);
    let femto_p = chi2_upper_tail(fair.femto_chi2, dof);
    vec![
        Check::new(
            format!("drop {d} femto-MT selection uniform"),
            fair.femto_max_z <= 3.0 && femto_p >= FAIRNESS_P_MIN,
            format!(
                "max |z| {:.2}, χ² {:.2} on {dof} dof (p = {femto_p:.3})",
                fair.femto_max_z, fair.femto_chi2
            ),
        ),
        {
            let p = chi2_upper_tail(fair.macro_chi2, fair.macro_dof);
            Check::new(
                format!("drop {d} macro-MT choice among requesters uniform"),
                p >= FAIRNESS_P_MIN,
                format!(
                    "Σz² {:.2} over {} contending MTs (p = {p:.3})",
                    fair.macro_chi2, fair.macro_dof
                ),
            )
        },
    ]
}

/// Closed forms against oracles, and detection of the printed variants.
pub fn closed_form_checks(quad: &Quadrature) -> Vec<Check> {
    let mut out = Vec::new();
    match closed_form_grids(quad) {
        Ok(families) => {
            for (family, checks) in families {
                let failed: Vec<_> = checks.iter().filter(|c| !c.agrees()).collect();
                let worst = checks.iter().map(|c| c.difference()).fold(0.0, f64::max);
                let detail = match failed.first() {
                    None => format!("{} points, worst |Δ| {worst:.2e}", checks.len()),
                    Some(c) => format!(
                        "{} of {} points disagree, e.g. {}: closed form {} vs oracle {} (oracle error {:.1e}, condition {:.1e})",
                        failed.len(),
                        checks.len(),
                        c.label,
                        c.fast,
                        c.oracle,
                        c.oracle_error,
                        c.condition
                    ),
                };
                out.push(Check::new(
                    format!("{family} closed form vs oracle"),
                    failed.is_empty(),
                    detail,
                ));
            }
        }
        Err(e) => out.push(Check::new("closed form grids", false, e.to_string())),
    }
    match printed_formula_audit(quad) {
        Ok(found) => {
            for d in found {
                out.push(Check::new(
                    format!("printed {} flagged", d.formula),
                    d.detected(),
                    format!("printed {:.6}, oracle {:.6}", d.printed, d.oracle),
                ));
            }
        }
        Err(e) => out.push(Check::new("printed formula audit", false, e.to_string())),
    }
    out
}

fn mass_check(name: String, mass: Result<f64, String>, tol: f64) -> Check {
    match mass {
        Ok(m) => Check::new(name, (m - 1.0).abs() <= tol, format!("total {m:.10}")),
        Err(e) => Check::new(name, false, e),
    }
}

/// Densities integrate to one and PMFs sum to one at the given parameters.
pub fn normalization_checks(
    femto: &FemtoAnalysisParams,
    population: &MacroPopulation,
    quad: &Quadrature,
) -> Vec<Check> {
    let mut out = Vec::new();
    let err = |e: qacs_core::error::AnalyticsError| e.to_string();
    out.push(mass_check(
        "x_F density".into(),
        quad.integrate_to_infinity(|x| pdf_xf(x, femto.n_total), 0.0, 1.0)
            .map(|e| e.value)
            .map_err(|e| e.to_string()),
        DENSITY_MASS_TOL,
    ));
    out.push(mass_check(
        "N_Q pmf".into(),
        pmf_nq_vector(femto, quad).map(|v| v.iter().sum()).map_err(err),
        PMF_MASS_TOL,
    ));
    match BestBeamLaw::new(population, femto.n_m, quad) {
        Ok((law, _)) => {
            for m in 0..=femto.n_m {
                out.push(mass_check(
                    format!("N_B pmf given N_Q={m}"),
                    Ok(law.row(m).iter().sum()),
                    PMF_MASS_TOL,
                ));
            }
            out.push(mass_check(
                "femto SINR density given N_B=0".into(),
                quad.integrate_to_infinity(
                    |g| {
                        pdf_gamma_f(
                            g,
                            0,
                            femto,
                            InterferenceForm::TruncatedMinimum,
                            XfConditioning::Marginal,
                            quad,
                        )
                        .unwrap_or(f64::NAN)
                    },
                    0.0,
                    1.0 / femto.mu_f,
                )
                .map(|e| e.value)
                .map_err(|e| e.to_string()),
                DENSITY_MASS_TOL,
            ));
        }
        Err(e) => out.push(Check::new("N_B pmf", false, e.to_string())),
    }
    let x = femto.x_threshold() + 4.0 * femto.gamma_f_req * femto.lambda_f;
    let cap = femto.interference_cap(x);
    for n in 1..=femto.n_m {
        out.push(mass_check(
            format!("interference density given x_F, N_B={n}"),
            quad.integrate(
                |u| pdf_interference_given(u, x, n, femto, InterferenceForm::TruncatedMinimum),
                0.0,
                cap,
            )
            .map(|e| e.value)
            .map_err(|e| e.to_string()),
            DENSITY_MASS_TOL,
        ));
    }
    if let Some(&first) = population.mts.first() {
        for m in 1..=femto.n_m {
            let p = MacroAnalysisParams::from_budget(first, m, population.mts.len(), population.gamma_m_req);
            let scale = 1.0 / (p.lambda_m + p.mu_m);
            out.push(mass_check(
                format!("macro SINR density, N_Q={m}"),
                quad.integrate_to_infinity(|g| pdf_gamma_mk(g, &p, quad).unwrap_or(f64::NAN), 0.0, scale)
                    .map(|e| e.value)
                    .map_err(|e| e.to_string()),
                DENSITY_MASS_TOL,
            ));
        }
    }
    out
}
