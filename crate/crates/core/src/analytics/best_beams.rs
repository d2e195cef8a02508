//! Number of distinct best beams N_B requested by the macro-MTs that meet
//! Γ_M, and which macro-MT the MBS ends up serving.
//!
//! Given N_Q = m, macro-MT k requests with probability p_k = Pr(γ_{M,k} ≥ Γ_M)
//! and, independently, names a beam uniformly among the m qualified beams.

use super::macrocell::{sf_gamma_mk, MacroAnalysisParams};
use super::numerics::{binomial, CompensatedSum, Crosscheck, MAX_CONDITION};
use super::quadrature::Quadrature;
use crate::error::AnalyticsError;
use crate::model::MacroLinkBudget;

/// Pr(N_B = n | N_Q = m) for identical macro-MTs with F = F_{γ_{M,k}}(Γ_M):
/// inclusion–exclusion over the set of requested beams for n ≥ 1 and the
/// complement for n = 0.
pub fn pmf_nb_given_nq(n: usize, m: usize, k_m: usize, f: f64) -> f64 {
    if m == 0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if n > m {
        return 0.0;
    }
    if n == 0 {
        return 1.0 - (1..=m).map(|j| pmf_nb_given_nq(j, m, k_m, f)).sum::<f64>();
    }
    inclusion_exclusion(n, m, |i| {
        (i as f64 / m as f64 + (m - i) as f64 / m as f64 * f).powi(k_m as i32)
            - f.powi(k_m as i32)
    })
    .0
}

/// C(m,n) Σ_{i=1}^{n} C(n,i)(−1)^{n−i} g(i) and its conditioning.
fn inclusion_exclusion<G: Fn(usize) -> f64>(n: usize, m: usize, g: G) -> (f64, f64) {
    let sum: CompensatedSum = (1..=n)
        .map(|i| {
            let sgn = if (n - i).is_multiple_of(2) { 1.0 } else { -1.0 };
            sgn * binomial(n, i) * g(i)
        })
        .collect();
    let prefactor = binomial(m, n);
    (prefactor * sum.value(), sum.condition_against(1.0 / prefactor))
}

/// Pr(N_B = n | N_Q = m) for macro-MTs with individual request
/// probabilities `p`; element n of the result, n = 0..=m.
///
/// The probability that every request falls inside a fixed set of i beams
/// is Π_k (1 − p_k + p_k i/m).
pub fn pmf_nb_given_nq_heterogeneous(m: usize, p: &[f64]) -> (Vec<f64>, f64) {
    if m == 0 {
        return (vec![1.0], 1.0);
    }
    let inside = |i: usize| -> f64 {
        p.iter()
            .map(|&pk| 1.0 - pk + pk * i as f64 / m as f64)
            .product()
    };
    let none = inside(0);
    let mut pmf = vec![0.0; m + 1];
    let mut worst: f64 = 1.0;
    for (n, slot) in pmf.iter_mut().enumerate().skip(1) {
        let (value, condition) = inclusion_exclusion(n, m, |i| inside(i) - none);
        *slot = value;
        worst = worst.max(condition);
    }
    pmf[0] = none;
    (pmf, worst)
}

/// Exhaustive oracle for the heterogeneous PMF: a DP over the bitmask of
/// beams requested so far. Exact, O(K·4^m).
pub fn pmf_nb_given_nq_enumerated(m: usize, p: &[f64]) -> Vec<f64> {
    if m == 0 {
        return vec![1.0];
    }
    let mut dist = vec![0.0; 1 << m];
    dist[0] = 1.0;
    for &pk in p {
        let mut next = vec![0.0; 1 << m];
        for (mask, &mass) in dist.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            next[mask] += mass * (1.0 - pk);
            for beam in 0..m {
                next[mask | (1 << beam)] += mass * pk / m as f64;
            }
        }
        dist = next;
    }
    let mut pmf = vec![0.0; m + 1];
    for (mask, mass) in dist.into_iter().enumerate() {
        pmf[mask.count_ones() as usize] += mass;
    }
    pmf
}

/// Pr(macro-MT k is served | N_Q = m). The MBS picks a requested beam that
/// is uniform among requested beams and then a requester of it uniformly,
/// which gives `p_k ∫₀¹ Π_{j≠k} (1 − p_j(1 − u)) du`, independent of m.
pub fn selection_probabilities(p: &[f64]) -> Vec<f64> {
    (0..p.len())
        .map(|k| {
            // Coefficients of Π_{j≠k}((1 − p_j) + p_j u), all nonnegative.
            let mut poly = vec![1.0];
            for (j, &pj) in p.iter().enumerate() {
                if j == k {
                    continue;
                }
                let mut next = vec![0.0; poly.len() + 1];
                for (d, &c) in poly.iter().enumerate() {
                    next[d] += c * (1.0 - pj);
                    next[d + 1] += c * pj;
                }
                poly = next;
            }
            let integral: f64 = poly
                .iter()
                .enumerate()
                .map(|(d, c)| c / (d + 1) as f64)
                .sum();
            p[k] * integral
        })
        .collect()
}

/// Macro-MT population of one drop, seen from the analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroPopulation {
    pub mts: Vec<MacroLinkBudget>,
    pub gamma_m_req: f64,
}

impl MacroPopulation {
    /// `k_m` identical MTs.
    pub fn homogeneous(budget: MacroLinkBudget, k_m: usize, gamma_m_req: f64) -> Self {
        Self {
            mts: vec![budget; k_m],
            gamma_m_req,
        }
    }

    pub fn params(&self, k: usize, n_q: usize) -> MacroAnalysisParams {
        MacroAnalysisParams::from_budget(self.mts[k], n_q, self.mts.len(), self.gamma_m_req)
    }

    /// p_k = Pr(γ_{M,k} ≥ Γ_M | N_Q = m) for every MT.
    pub fn request_probabilities(
        &self,
        m: usize,
        quad: &Quadrature,
    ) -> Result<Vec<f64>, AnalyticsError> {
        if m == 0 {
            return Ok(vec![0.0; self.mts.len()]);
        }
        (0..self.mts.len())
            .map(|k| sf_gamma_mk(self.gamma_m_req, &self.params(k, m), quad))
            .collect()
    }
}

/// Pr(N_B = n | N_Q = m) for m = 0..=N_M, with the enumeration cross-checks
/// that backed each row.
#[derive(Debug, Clone, PartialEq)]
pub struct BestBeamLaw {
    rows: Vec<Vec<f64>>,
}

impl BestBeamLaw {
    pub fn new(
        population: &MacroPopulation,
        n_m: usize,
        quad: &Quadrature,
    ) -> Result<(Self, Vec<Crosscheck>), AnalyticsError> {
        let mut rows = Vec::with_capacity(n_m + 1);
        let mut checks = Vec::new();
        for m in 0..=n_m {
            let p = population.request_probabilities(m, quad)?;
            let (fast, condition) = pmf_nb_given_nq_heterogeneous(m, &p);
            let row = if m <= 10 {
                let oracle = pmf_nb_given_nq_enumerated(m, &p);
                let mut row = Vec::with_capacity(m + 1);
                for n in 0..=m {
                    let check = Crosscheck {
                        label: format!("Pr(N_B={n}|N_Q={m})"),
                        fast: fast[n],
                        oracle: oracle[n],
                        oracle_error: 0.0,
                        condition,
                        tolerance: 1e-9,
                    };
                    row.push(check.resolve());
                    checks.push(check);
                }
                row
            } else if condition <= MAX_CONDITION {
                fast
            } else {
                return Err(AnalyticsError::domain(
                    "n_mbs_antennas",
                    format!("inclusion–exclusion for N_Q={m} is ill-conditioned ({condition:e})"),
                ));
            };
            rows.push(row.into_iter().map(|v| v.clamp(0.0, 1.0)).collect());
        }
        Ok((Self { rows }, checks))
    }

    /// Law where no macro-MT ever requests (N_B = 0 surely).
    pub fn always_off(n_m: usize) -> Self {
        Self {
            rows: (0..=n_m)
                .map(|m| {
                    let mut row = vec![0.0; m + 1];
                    row[0] = 1.0;
                    row
                })
                .collect(),
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        Self { rows }
    }

    pub fn n_m(&self) -> usize {
        self.rows.len() - 1
    }

    /// Pr(N_B = n | N_Q = m).
    pub fn prob(&self, n: usize, m: usize) -> f64 {
        self.rows
            .get(m)
            .and_then(|row| row.get(n))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.rows[m]
    }

    /// Pr(N_B = n) given the PMF of N_Q.
    pub fn unconditional(&self, pmf_nq: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows.len()];
        for (m, &w) in pmf_nq.iter().enumerate() {
            for (n, &p) in self.rows[m].iter().enumerate() {
                out[n] += w * p;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute force over every (request, beam) assignment of every MT.
    fn enumerate_outcomes(m: usize, p: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let k = p.len();
        let choices = m + 1;
        let mut pmf = vec![0.0; m + 1];
        let mut served = vec![0.0; k];
        let total = choices.pow(k as u32);
        for code in 0..total {
            let mut c = code;
            let mut prob = 1.0;
            let mut beams = vec![None; k];
            for (mt, &pk) in p.iter().enumerate() {
                let pick = c % choices;
                c /= choices;
                if pick == m {
                    prob *= 1.0 - pk;
                } else {
                    prob *= pk / m as f64;
                    beams[mt] = Some(pick);
                }
            }
            let mut requested: Vec<usize> = beams.iter().flatten().copied().collect();
            requested.sort_unstable();
            requested.dedup();
            pmf[requested.len()] += prob;
            for &b in &requested {
                let on_b: Vec<usize> = (0..k).filter(|&mt| beams[mt] == Some(b)).collect();
                for &mt in &on_b {
                    served[mt] += prob / (requested.len() * on_b.len()) as f64;
                }
            }
        }
        (pmf, served)
    }

    #[test]
    fn homogeneous_matches_enumeration() {
        let (pmf, _) = enumerate_outcomes(2, &[0.5, 0.5, 0.5]);
        for n in 0..=2 {
            assert!((pmf_nb_given_nq(n, 2, 3, 0.5) - pmf[n]).abs() < 1e-12, "n={n}");
        }
        // F = 0.5, K = 3: Pr(N_B = 0) = 1/8, Pr(N_B = 1) = 2(0.75³ − 0.125).
        assert!((pmf[0] - 0.125).abs() < 1e-15);
        assert!((pmf[1] - 2.0 * (0.75f64.powi(3) - 0.125)).abs() < 1e-15);
    }

    #[test]
    fn single_beam_collapse() {
        for f in [0.0, 0.3, 0.9] {
            let v = pmf_nb_given_nq(1, 1, 50, f);
            assert!((v - (1.0 - f.powi(50))).abs() < 1e-12);
        }
    }

    #[test]
    fn heterogeneous_matches_enumeration_and_dp() {
        let p = [0.9, 0.1, 0.45, 0.0, 0.7];
        for m in 1..=3 {
            let (pmf, served) = enumerate_outcomes(m, &p);
            let (fast, _) = pmf_nb_given_nq_heterogeneous(m, &p);
            let dp = pmf_nb_given_nq_enumerated(m, &p);
            for n in 0..=m {
                assert!((fast[n] - pmf[n]).abs() < 1e-12);
                assert!((dp[n] - pmf[n]).abs() < 1e-12);
            }
            let sel = selection_probabilities(&p);
            for k in 0..p.len() {
                assert!((sel[k] - served[k]).abs() < 1e-12, "m={m} k={k}");
            }
        }
    }

    #[test]
    fn homogeneous_selection_reduces_to_symmetric_share() {
        let p = vec![0.3; 7];
        for s in selection_probabilities(&p) {
            assert!((s - (1.0 - 0.7f64.powi(7)) / 7.0).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn rows_are_distributions(
            p in proptest::collection::vec(0.0..=1.0f64, 1..8),
            m in 1usize..6,
        ) {
            let (fast, _) = pmf_nb_given_nq_heterogeneous(m, &p);
            prop_assert!((fast.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(fast.iter().all(|&v| v > -1e-12));
            let sel = selection_probabilities(&p);
            let active = 1.0 - p.iter().map(|pk| 1.0 - pk).product::<f64>();
            prop_assert!((sel.iter().sum::<f64>() - active).abs() < 1e-12);
        }

        #[test]
        fn homogeneous_rows_sum_to_one(f in 0.0..=1.0f64, k in 1usize..60, m in 1usize..8) {
            let total: f64 = (0..=m).map(|n| pmf_nb_given_nq(n, m, k, f)).sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
        }
    }
}
