//! Domain types shared by the protocol engine, the simulator and the
//! analytics: scenario configuration, link-budget normalizations and the
//! per-frame scheduling outcome.
//!
//! Everything below the configuration boundary works in linear units.
//! Powers are carried in mW, so `db_to_linear(dBm)` yields mW directly.

use std::collections::BTreeMap;

use crate::channel::PathLossModel;
use crate::error::ModelError;

/// Converts a dB (or dBm) value to linear scale.
pub fn db_to_linear(value: f64) -> f64 {
    10f64.powf(value / 10.0)
}

/// Converts a linear value to dB (or dBm when the input is in mW).
pub fn linear_to_db(value: f64) -> f64 {
    10.0 * value.log10()
}

/// Geometry, antenna/user counts, powers and QoS targets of one
/// macro/femto scenario. Powers and thresholds are stored in the units a
/// user configures them in (dBm / dB).
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub n_fap_antennas: usize,
    pub n_mbs_antennas: usize,
    pub n_femto_mts: usize,
    pub n_macro_mts: usize,
    /// FAP transmit power, dBm.
    pub p_fap: f64,
    /// MBS transmit power, dBm.
    pub p_mbs: f64,
    /// Noise power at femto-MTs, dBm.
    pub noise_femto: f64,
    /// Noise power at macro-MTs, dBm.
    pub noise_macro: f64,
    /// Femto-MT SINR requirement, dB.
    pub gamma_f_req: f64,
    /// Macro-MT SINR requirement, dB.
    pub gamma_m_req: f64,
    pub macro_radius: f64,
    pub femto_radius: f64,
    pub mbs_fap_distance: f64,
    pub path_loss_params: PathLossModel,
    /// Seed for user drops.
    pub rng_seed: u64,
}

impl Default for ScenarioConfig {
    /// Reference layout: 1 km macrocell, 20 m femtocell 500 m away from the
    /// MBS, 4/2 antennas, 50/5 users, 50/20 dBm, Γ_F = 20 dB, Γ_M = 10 dB.
    fn default() -> Self {
        Self {
            n_fap_antennas: 2,
            n_mbs_antennas: 4,
            n_femto_mts: 5,
            n_macro_mts: 50,
            p_fap: 20.0,
            p_mbs: 50.0,
            noise_femto: -104.0,
            noise_macro: -104.0,
            gamma_f_req: 20.0,
            gamma_m_req: 10.0,
            macro_radius: 1000.0,
            femto_radius: 20.0,
            mbs_fap_distance: 500.0,
            path_loss_params: PathLossModel::default(),
            rng_seed: 1,
        }
    }
}

impl ScenarioConfig {
    /// Case I: FAP 100 m away from the MBS.
    pub fn case_one() -> Self {
        Self {
            mbs_fap_distance: 100.0,
            ..Self::default()
        }
    }

    /// Case II: FAP 800 m away from the MBS.
    pub fn case_two() -> Self {
        Self {
            mbs_fap_distance: 800.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let counts = [
            ("n_fap_antennas", self.n_fap_antennas),
            ("n_mbs_antennas", self.n_mbs_antennas),
            ("n_femto_mts", self.n_femto_mts),
            ("n_macro_mts", self.n_macro_mts),
        ];
        for (key, value) in counts {
            if value == 0 {
                return Err(ModelError::invalid(key, "must be at least 1"));
            }
        }
        // A beam-subset bitmask is used for the best-beam enumeration.
        if self.n_mbs_antennas > 16 {
            return Err(ModelError::invalid("n_mbs_antennas", "at most 16 supported"));
        }
        let finite = [
            ("p_fap", self.p_fap),
            ("p_mbs", self.p_mbs),
            ("noise_femto", self.noise_femto),
            ("noise_macro", self.noise_macro),
            ("gamma_f_req", self.gamma_f_req),
            ("gamma_m_req", self.gamma_m_req),
        ];
        for (key, value) in finite {
            if !value.is_finite() {
                return Err(ModelError::invalid(key, "must be finite"));
            }
        }
        let lengths = [
            ("macro_radius", self.macro_radius),
            ("femto_radius", self.femto_radius),
            ("mbs_fap_distance", self.mbs_fap_distance),
        ];
        for (key, value) in lengths {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::invalid(key, "must be positive"));
            }
        }
        if self.mbs_fap_distance + self.femto_radius > self.macro_radius {
            return Err(ModelError::invalid(
                "mbs_fap_distance",
                "femtocell disk must lie inside the macrocell disk",
            ));
        }
        self.path_loss_params.validate()
    }

    pub fn thresholds(&self) -> QosThresholds {
        QosThresholds {
            gamma_f: db_to_linear(self.gamma_f_req),
            gamma_m: db_to_linear(self.gamma_m_req),
        }
    }
}

/// SINR targets in linear scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QosThresholds {
    pub gamma_f: f64,
    pub gamma_m: f64,
}

/// λ_F and μ_F for one candidate femto-MT (interference-to-signal and
/// noise-to-signal path ratios).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FemtoLinkBudget {
    pub lambda_f: f64,
    pub mu_f: f64,
}

/// λ_{M,k} and μ_{M,k} for one macro-MT.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroLinkBudget {
    pub lambda_m: f64,
    pub mu_m: f64,
}

fn positive(key: &'static str, value: f64) -> Result<f64, ModelError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(ModelError::domain(key, value))
    }
}

/// Femto-side normalization for the femto-MT with path gains `beta_f`
/// (from the FAP) and `beta_m` (from the MBS).
pub fn link_budget(
    cfg: &ScenarioConfig,
    beta_f: f64,
    beta_m: f64,
) -> Result<FemtoLinkBudget, ModelError> {
    let beta_f = positive("beta_f", beta_f)?;
    let beta_m = positive("beta_m", beta_m)?;
    let p_f = db_to_linear(cfg.p_fap);
    let p_m = db_to_linear(cfg.p_mbs);
    let noise = db_to_linear(cfg.noise_femto);
    Ok(FemtoLinkBudget {
        lambda_f: positive("lambda_f", p_m * beta_m / (p_f * beta_f))?,
        mu_f: positive("mu_f", noise / (p_f * beta_f))?,
    })
}

/// Macro-side normalization for a macro-MT with path gains `alpha_m` (from
/// the MBS) and `alpha_f` (from the FAP). The interferer is the FAP, so the
/// numerator of λ carries P_F.
pub fn link_budget_macro(
    cfg: &ScenarioConfig,
    alpha_m: f64,
    alpha_f: f64,
) -> Result<MacroLinkBudget, ModelError> {
    let alpha_m = positive("alpha_m", alpha_m)?;
    let alpha_f = positive("alpha_f", alpha_f)?;
    let p_f = db_to_linear(cfg.p_fap);
    let p_m = db_to_linear(cfg.p_mbs);
    let noise = db_to_linear(cfg.noise_macro);
    Ok(MacroLinkBudget {
        lambda_m: positive("lambda_m", p_f * alpha_f / (p_m * alpha_m))?,
        mu_m: positive("mu_m", noise / (p_m * alpha_m))?,
    })
}

/// Linear path gains of one user drop.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGains {
    /// FAP → femto-MT k.
    pub beta_f: Vec<f64>,
    /// MBS → femto-MT k.
    pub beta_m: Vec<f64>,
    /// MBS → macro-MT k.
    pub alpha_m: Vec<f64>,
    /// FAP → macro-MT k.
    pub alpha_f: Vec<f64>,
}

/// Normalized link budget of a whole drop: one femto entry per candidate
/// femto-MT (the selected one is only known per frame) and one macro entry
/// per macro-MT.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    pub femto: Vec<FemtoLinkBudget>,
    pub macro_mts: Vec<MacroLinkBudget>,
}

impl LinkBudget {
    pub fn from_gains(cfg: &ScenarioConfig, gains: &PathGains) -> Result<Self, ModelError> {
        let femto = gains
            .beta_f
            .iter()
            .zip(&gains.beta_m)
            .map(|(&bf, &bm)| link_budget(cfg, bf, bm))
            .collect::<Result<Vec<_>, _>>()?;
        let macro_mts = gains
            .alpha_m
            .iter()
            .zip(&gains.alpha_f)
            .map(|(&am, &af)| link_budget_macro(cfg, am, af))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { femto, macro_mts })
    }
}

/// The macro side of a frame when the MBS transmits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroService {
    pub beam: usize,
    pub mt: usize,
    /// γ_M of the served macro-MT, linear.
    pub sinr: f64,
    /// Number of macro-MTs that requested the selected beam.
    pub contenders: usize,
}

/// Decisions taken by the protocol in one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleOutcome {
    pub femto_mt: usize,
    pub femto_beam: usize,
    /// x_F, the largest normalized projection power.
    pub femto_nsnr: f64,
    /// Qualified MBS beams, ascending interference to the femto-MT.
    pub qualified_beams: Vec<usize>,
    /// Macro-MT index → requested best beam, only for macro-MTs meeting Γ_M.
    pub macro_requests: BTreeMap<usize, usize>,
    /// γ_F of the served femto-MT, linear.
    pub sinr_femto: f64,
    /// `None` when the MBS moves to another band (N_Q = 0 or K_Q = 0).
    pub macro_service: Option<MacroService>,
}

impl ScheduleOutcome {
    pub fn macro_active(&self) -> bool {
        self.macro_service.is_some()
    }

    pub fn macro_beam(&self) -> Option<usize> {
        self.macro_service.map(|s| s.beam)
    }

    pub fn macro_mt(&self) -> Option<usize> {
        self.macro_service.map(|s| s.mt)
    }

    pub fn sinr_macro(&self) -> Option<f64> {
        self.macro_service.map(|s| s.sinr)
    }

    /// N_Q.
    pub fn n_qualified(&self) -> usize {
        self.qualified_beams.len()
    }

    /// K_Q.
    pub fn n_requesting(&self) -> usize {
        self.macro_requests.len()
    }

    /// N_B, the number of distinct requested best beams.
    pub fn n_best_beams(&self) -> usize {
        let mut mask = 0u32;
        for &beam in self.macro_requests.values() {
            mask |= 1 << beam;
        }
        mask.count_ones() as usize
    }

    /// Checks the structural invariants and the QoS guarantee.
    pub fn check(&self, thresholds: &QosThresholds) -> Result<(), String> {
        let active = self.n_qualified() > 0 && self.n_requesting() > 0;
        if active != self.macro_active() {
            return Err(format!(
                "macro_active={} but N_Q={} K_Q={}",
                self.macro_active(),
                self.n_qualified(),
                self.n_requesting()
            ));
        }
        if let Some(service) = self.macro_service {
            if !self.qualified_beams.contains(&service.beam) {
                return Err(format!("macro beam {} is not qualified", service.beam));
            }
            if self.macro_requests.get(&service.mt) != Some(&service.beam) {
                return Err(format!(
                    "macro-MT {} did not request beam {}",
                    service.mt, service.beam
                ));
            }
            if self.sinr_femto < thresholds.gamma_f {
                return Err(format!(
                    "femto SINR {} below {}",
                    self.sinr_femto, thresholds.gamma_f
                ));
            }
            if service.sinr < thresholds.gamma_m {
                return Err(format!(
                    "macro SINR {} below {}",
                    service.sinr, thresholds.gamma_m
                ));
            }
        }
        Ok(())
    }
}
