//! Ergodic throughputs of both tiers, for identical MTs and for a concrete
//! drop with per-MT link budgets.

use super::best_beams::{selection_probabilities, BestBeamLaw, MacroPopulation};
use super::femtocell::{femto_rate_by_nb, pmf_nq_crosscheck, FemtoAnalysisParams};
use super::macrocell::{conditional_rate, prob_kq_nonzero, MacroAnalysisParams};
use super::numerics::Crosscheck;
use super::quadrature::Quadrature;
use crate::error::AnalyticsError;
use crate::model::{LinkBudget, MacroLinkBudget, QosThresholds, ScenarioConfig};

fn macro_population(p_m: &MacroAnalysisParams) -> MacroPopulation {
    MacroPopulation::homogeneous(
        MacroLinkBudget {
            lambda_m: p_m.lambda_m,
            mu_m: p_m.mu_m,
        },
        p_m.k_m,
        p_m.gamma_m_req,
    )
}

/// Pr(N_B = n) for identical macro-MTs.
pub fn pmf_nb(
    n: usize,
    p_f: &FemtoAnalysisParams,
    p_m: &MacroAnalysisParams,
    quad: &Quadrature,
) -> Result<f64, AnalyticsError> {
    let (law, _) = BestBeamLaw::new(&macro_population(p_m), p_f.n_m, quad)?;
    let pmf_nq = super::femtocell::pmf_nq_vector(p_f, quad)?;
    Ok(law.unconditional(&pmf_nq).get(n).copied().unwrap_or(0.0))
}

/// R_F = Σ_n E[log₂(1+γ_F); N_B = n] for identical macro-MTs (`p_m.n_q` is
/// ignored).
pub fn throughput_femto(
    p_f: &FemtoAnalysisParams,
    p_m: &MacroAnalysisParams,
    quad: &Quadrature,
) -> Result<f64, AnalyticsError> {
    let (law, _) = BestBeamLaw::new(&macro_population(p_m), p_f.n_m, quad)?;
    Ok(femto_rate_by_nb(p_f, &law, quad)?.iter().sum())
}

/// R_M = Σ_{m≥1} Pr(N_Q = m)·Pr(K_Q ≠ 0 | m)·E[log₂(1+γ_M) | N_Q = m] for
/// identical macro-MTs. Values of m at which Γ_M is unreachable add 0.
pub fn throughput_macro(
    p_f: &FemtoAnalysisParams,
    p_m: &MacroAnalysisParams,
    quad: &Quadrature,
) -> Result<f64, AnalyticsError> {
    p_f.validate()?;
    let mut total = 0.0;
    for m in 1..=p_f.n_m {
        let pm = p_m.with_n_q(m);
        pm.validate()?;
        let rate = match conditional_rate(&pm, quad) {
            Ok(r) => r,
            Err(AnalyticsError::UnreachableQos { .. }) => continue,
            Err(e) => return Err(e),
        };
        let weight = super::femtocell::pmf_nq(m, p_f, quad)? * prob_kq_nonzero(&pm, quad)?;
        total += weight * rate;
    }
    Ok(total)
}

/// What the analysis needs to know about one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct DropSetup {
    pub n_fap_antennas: usize,
    pub n_mbs_antennas: usize,
    pub thresholds: QosThresholds,
    pub budget: LinkBudget,
}

impl DropSetup {
    pub fn new(cfg: &ScenarioConfig, budget: LinkBudget) -> Self {
        Self {
            n_fap_antennas: cfg.n_fap_antennas,
            n_mbs_antennas: cfg.n_mbs_antennas,
            thresholds: cfg.thresholds(),
            budget,
        }
    }

    /// Femto-side parameters when femto-MT `k` is served.
    pub fn femto_params(&self, k: usize) -> FemtoAnalysisParams {
        FemtoAnalysisParams {
            n_total: self.n_fap_antennas * self.budget.femto.len(),
            n_m: self.n_mbs_antennas,
            lambda_f: self.budget.femto[k].lambda_f,
            mu_f: self.budget.femto[k].mu_f,
            gamma_f_req: self.thresholds.gamma_f,
        }
    }
}

/// Exact per-drop predictions.
///
/// The served femto-MT is uniform over the K_F femto-MTs and independent of
/// x_F, so each quantity is averaged over it with weight 1/K_F.
#[derive(Debug, Clone, PartialEq)]
pub struct DropAnalysis {
    pub r_f: f64,
    pub r_m: f64,
    pub pmf_nq: Vec<f64>,
    pub pmf_nb: Vec<f64>,
    pub e_nq: f64,
    pub e_nb: f64,
    pub femto_selection: Vec<f64>,
    /// Pr(macro-MT k is served) per frame.
    pub macro_selection: Vec<f64>,
    /// No macro-MT can reach Γ_M for any number of qualified beams.
    pub unreachable_qos: bool,
    /// Closed-form checks performed along the way.
    pub checks: Vec<Crosscheck>,
}

pub fn analyze_drop(setup: &DropSetup, quad: &Quadrature) -> Result<DropAnalysis, AnalyticsError> {
    let k_f = setup.budget.femto.len();
    let n_m = setup.n_mbs_antennas;
    if k_f == 0 || setup.budget.macro_mts.is_empty() {
        return Err(AnalyticsError::domain("budget", "needs at least one MT per tier"));
    }
    let population = MacroPopulation {
        mts: setup.budget.macro_mts.clone(),
        gamma_m_req: setup.thresholds.gamma_m,
    };
    let (law, mut checks) = BestBeamLaw::new(&population, n_m, quad)?;

    // Macro side, per number of qualified beams: E[rate; served] and who is
    // served.
    let k_m = population.mts.len();
    let mut macro_rate_given_m = vec![0.0; n_m + 1];
    let mut selection_given_m = vec![vec![0.0; k_m]; n_m + 1];
    let mut reachable = false;
    for m in 1..=n_m {
        let p = population.request_probabilities(m, quad)?;
        let sel = selection_probabilities(&p);
        for k in 0..k_m {
            if sel[k] <= 0.0 {
                continue;
            }
            match conditional_rate(&population.params(k, m), quad) {
                Ok(r) => {
                    reachable = true;
                    macro_rate_given_m[m] += sel[k] * r;
                }
                Err(AnalyticsError::UnreachableQos { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        selection_given_m[m] = sel;
    }

    let weight = 1.0 / k_f as f64;
    let mut r_f = 0.0;
    let mut r_m = 0.0;
    let mut pmf_nq = vec![0.0; n_m + 1];
    let mut pmf_nb = vec![0.0; n_m + 1];
    let mut macro_selection = vec![0.0; k_m];
    for k in 0..k_f {
        let p_f = setup.femto_params(k);
        p_f.validate()?;
        let mut nq = Vec::with_capacity(n_m + 1);
        for m in 0..=n_m {
            let check = pmf_nq_crosscheck(m, &p_f, quad)?;
            nq.push(check.resolve().clamp(0.0, 1.0));
            checks.push(check);
        }
        r_f += weight * femto_rate_by_nb(&p_f, &law, quad)?.iter().sum::<f64>();
        for (m, &w) in nq.iter().enumerate() {
            pmf_nq[m] += weight * w;
            r_m += weight * w * macro_rate_given_m[m];
            for (acc, s) in macro_selection.iter_mut().zip(&selection_given_m[m]) {
                *acc += weight * w * s;
            }
        }
        for (acc, v) in pmf_nb.iter_mut().zip(law.unconditional(&nq)) {
            *acc += weight * v;
        }
    }
    let mean = |pmf: &[f64]| pmf.iter().enumerate().map(|(i, p)| i as f64 * p).sum();
    Ok(DropAnalysis {
        r_f,
        r_m,
        e_nq: mean(&pmf_nq),
        e_nb: mean(&pmf_nb),
        pmf_nq,
        pmf_nb,
        femto_selection: vec![weight; k_f],
        macro_selection,
        unreachable_qos: !reachable,
        checks,
    })
}
