//! Systematic checks of the closed forms against their oracles, and of the
//! commonly printed variants that are known not to hold.

use super::best_beams::{pmf_nb_given_nq_enumerated, pmf_nb_given_nq_heterogeneous};
use super::femtocell::{
    pdf_gamma_f_printed_idle, pdf_interference_given, pmf_nq_crosscheck, pmf_nq_printed,
    pmf_nq_quadrature, FemtoAnalysisParams, InterferenceForm,
};
use super::macrocell::{
    cdf_gamma_mk_printed, cdf_gamma_mk_quadrature, pdf_gamma_mk_crosscheck,
    prob_kq_nonzero_complement, prob_kq_nonzero_sum, MacroAnalysisParams,
};
use super::numerics::Crosscheck;
use super::quadrature::Quadrature;
use crate::error::AnalyticsError;

pub const GRID_POINTS: usize = 50;

/// Low-discrepancy fraction used to spread grid parameters.
fn spread(i: usize, step: f64) -> f64 {
    (i as f64 * step).fract()
}

fn log_space(lo: f64, hi: f64, t: f64) -> f64 {
    (lo.ln() + t * (hi.ln() - lo.ln())).exp()
}

/// Qualified-beam PMF closed form vs quadrature over a parameter grid.
pub fn qualified_beam_grid(quad: &Quadrature) -> Result<Vec<Crosscheck>, AnalyticsError> {
    const N_TOTAL: [usize; 5] = [1, 3, 5, 10, 20];
    (0..GRID_POINTS)
        .map(|i| {
            let p = FemtoAnalysisParams {
                n_total: N_TOTAL[i % N_TOTAL.len()],
                n_m: 1 + i % 6,
                lambda_f: log_space(1e-4, 2.0, spread(i, 0.618_033_988_7)),
                mu_f: log_space(1e-7, 0.3, spread(i, 0.414_213_562_4)),
                gamma_f_req: log_space(0.5, 1e3, i as f64 / (GRID_POINTS - 1) as f64),
            };
            pmf_nq_crosscheck(i % (p.n_m + 1), &p, quad)
        })
        .collect()
}

/// Macro SINR density finite sum vs quadrature on a log-spaced γ grid.
pub fn macro_density_grid(quad: &Quadrature) -> Result<Vec<Crosscheck>, AnalyticsError> {
    (0..GRID_POINTS)
        .map(|i| {
            let p = MacroAnalysisParams {
                n_q: 1 + i % 6,
                k_m: 50,
                lambda_m: log_space(1e-3, 3.0, spread(i, 0.618_033_988_7)),
                mu_m: log_space(1e-3, 1.0, spread(i, 0.414_213_562_4)),
                gamma_m_req: 10.0,
            };
            let g = log_space(1e-2, 1e3, i as f64 / (GRID_POINTS - 1) as f64);
            pdf_gamma_mk_crosscheck(g, &p, quad)
        })
        .collect()
}

/// Pr(K_Q ≠ 0) binomial sum vs complement.
pub fn macro_activity_grid() -> Vec<Crosscheck> {
    const K: [usize; 5] = [1, 2, 10, 50, 200];
    (0..GRID_POINTS)
        .map(|i| {
            let f = i as f64 / (GRID_POINTS - 1) as f64;
            let k = K[i % K.len()];
            Crosscheck {
                label: format!("Pr(K_Q≠0; F={f:.3}, K_M={k})"),
                fast: prob_kq_nonzero_sum(f, k),
                oracle: prob_kq_nonzero_complement(f, k),
                oracle_error: 0.0,
                condition: 1.0,
                tolerance: 1e-12,
            }
        })
        .collect()
}

/// Best-beam PMF inclusion–exclusion vs exhaustive enumeration, for
/// heterogeneous request probabilities.
pub fn best_beam_grid() -> Vec<Crosscheck> {
    (0..GRID_POINTS)
        .map(|i| {
            let m = 1 + i % 6;
            let k = 1 + (i * 7) % 40;
            let p: Vec<f64> = (0..k).map(|j| spread(i * 31 + j, 0.618_033_988_7)).collect();
            let (fast, condition) = pmf_nb_given_nq_heterogeneous(m, &p);
            let oracle = pmf_nb_given_nq_enumerated(m, &p);
            let n = i % (m + 1);
            Crosscheck {
                label: format!("Pr(N_B={n}|N_Q={m}), K_M={k}"),
                fast: fast[n],
                oracle: oracle[n],
                oracle_error: 0.0,
                condition,
                tolerance: 1e-6,
            }
        })
        .collect()
}

/// Every closed-form grid, labelled by the family it belongs to.
pub fn closed_form_grids(
    quad: &Quadrature,
) -> Result<Vec<(&'static str, Vec<Crosscheck>)>, AnalyticsError> {
    Ok(vec![
        ("qualified-beam pmf", qualified_beam_grid(quad)?),
        ("macro SINR density", macro_density_grid(quad)?),
        ("macro activity probability", macro_activity_grid()),
        ("best-beam pmf", best_beam_grid()),
    ])
}

/// A printed expression evaluated next to the oracle it should match.
#[derive(Debug, Clone, PartialEq)]
pub struct PrintedDiscrepancy {
    pub formula: &'static str,
    pub printed: f64,
    pub oracle: f64,
}

impl PrintedDiscrepancy {
    pub fn detected(&self) -> bool {
        (self.printed - self.oracle).abs() > 1e-6
    }
}

/// Evaluates the printed variants at representative parameters. Every
/// detected discrepancy is logged; the library uses the oracle form.
pub fn printed_formula_audit(quad: &Quadrature) -> Result<Vec<PrintedDiscrepancy>, AnalyticsError> {
    let femto = FemtoAnalysisParams {
        n_total: 10,
        n_m: 4,
        lambda_f: 0.06,
        mu_f: 0.05,
        gamma_f_req: 10.0,
    };
    let x = 2.0;
    let cap = femto.interference_cap(x);
    let interference_mass = quad
        .integrate(
            |u| pdf_interference_given(u, x, 2, &femto, InterferenceForm::Printed),
            0.0,
            cap,
        )?
        .value;
    let idle_mass = quad
        .integrate_to_infinity(|g| pdf_gamma_f_printed_idle(g, &femto), 0.0, femto.mu_f)?
        .value;
    let macro_p = MacroAnalysisParams {
        n_q: 2,
        k_m: 50,
        lambda_m: 1.0,
        mu_m: 0.5,
        gamma_m_req: 10.0,
    };
    let g = 1.5;
    let cdf = cdf_gamma_mk_quadrature(g, &macro_p, quad)?.value;
    let pmf0 = pmf_nq_quadrature(0, &femto, quad)?.value;
    let found = vec![
        PrintedDiscrepancy {
            formula: "interference density given x_F, two best beams (total mass)",
            printed: interference_mass,
            oracle: 1.0,
        },
        PrintedDiscrepancy {
            formula: "idle femto SINR density (total mass)",
            printed: idle_mass,
            oracle: 1.0,
        },
        PrintedDiscrepancy {
            formula: "macro best-beam SINR CDF at γ = 1.5",
            printed: cdf_gamma_mk_printed(g, &macro_p),
            oracle: cdf,
        },
        PrintedDiscrepancy {
            formula: "Pr(N_Q = 0) integrated from zero",
            printed: pmf_nq_printed(0, &femto),
            oracle: pmf0,
        },
    ];
    for d in found.iter().filter(|d| d.detected()) {
        log::warn!(
            "printed form of {} gives {} but the oracle gives {}; using the oracle",
            d.formula,
            d.printed,
            d.oracle
        );
    }
    Ok(found)
}
