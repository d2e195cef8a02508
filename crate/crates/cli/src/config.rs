//! Run configuration: a flat sectioned `key = value` file with `[scenario]`,
//! `[pathloss]` and `[sim]` sections. Missing keys take their defaults.
//!
//! ```text
//! [scenario]
//! mbs_fap_distance = 100   # meters
//! gamma_f_req = 20         # dB
//!
//! [pathloss]
//! fap_outdoor_wall_loss = 10
//!
//! [sim]
//! frames = 1000000
//! ```

use std::path::Path;

use qacs_core::analytics::Quadrature;
use qacs_core::channel::{PathLossCoefficients, PathLossModel};
use qacs_core::model::ScenarioConfig;
use qacs_core::simkit::SimPlan;
use serde::Deserialize;
use toml::{Table, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ScenarioSection {
    n_fap_antennas: usize,
    n_mbs_antennas: usize,
    n_femto_mts: usize,
    n_macro_mts: usize,
    p_fap: f64,
    p_mbs: f64,
    noise_femto: f64,
    noise_macro: f64,
    gamma_f_req: f64,
    gamma_m_req: f64,
    macro_radius: f64,
    femto_radius: f64,
    mbs_fap_distance: f64,
    rng_seed: u64,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        let d = ScenarioConfig::default();
        Self {
            n_fap_antennas: d.n_fap_antennas,
            n_mbs_antennas: d.n_mbs_antennas,
            n_femto_mts: d.n_femto_mts,
            n_macro_mts: d.n_macro_mts,
            p_fap: d.p_fap,
            p_mbs: d.p_mbs,
            noise_femto: d.noise_femto,
            noise_macro: d.noise_macro,
            gamma_f_req: d.gamma_f_req,
            gamma_m_req: d.gamma_m_req,
            macro_radius: d.macro_radius,
            femto_radius: d.femto_radius,
            mbs_fap_distance: d.mbs_fap_distance,
            rng_seed: d.rng_seed,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct PathlossSection {
    mbs_outdoor_intercept: f64,
    mbs_outdoor_slope: f64,
    mbs_outdoor_wall_loss: f64,
    mbs_indoor_intercept: f64,
    mbs_indoor_slope: f64,
    mbs_indoor_wall_loss: f64,
    fap_indoor_intercept: f64,
    fap_indoor_slope: f64,
    fap_indoor_wall_loss: f64,
    fap_outdoor_intercept: f64,
    fap_outdoor_slope: f64,
    fap_outdoor_wall_loss: f64,
}

impl Default for PathlossSection {
    fn default() -> Self {
        let m = PathLossModel::default();
        Self {
            mbs_outdoor_intercept: m.mbs_outdoor.intercept,
            mbs_outdoor_slope: m.mbs_outdoor.slope,
            mbs_outdoor_wall_loss: m.mbs_outdoor.wall_loss,
            mbs_indoor_intercept: m.mbs_indoor.intercept,
            mbs_indoor_slope: m.mbs_indoor.slope,
            mbs_indoor_wall_loss: m.mbs_indoor.wall_loss,
            fap_indoor_intercept: m.fap_indoor.intercept,
            fap_indoor_slope: m.fap_indoor.slope,
            fap_indoor_wall_loss: m.fap_indoor.wall_loss,
            fap_outdoor_intercept: m.fap_outdoor.intercept,
            fap_outdoor_slope: m.fap_outdoor.slope,
            fap_outdoor_wall_loss: m.fap_outdoor.wall_loss,
        }
    }
}

impl PathlossSection {
    fn model(&self) -> PathLossModel {
        let c = |intercept, slope, wall_loss| PathLossCoefficients {
            intercept,
            slope,
            wall_loss,
        };
        PathLossModel {
            mbs_outdoor: c(
                self.mbs_outdoor_intercept,
                self.mbs_outdoor_slope,
                self.mbs_outdoor_wall_loss,
            ),
            mbs_indoor: c(
                self.mbs_indoor_intercept,
                self.mbs_indoor_slope,
                self.mbs_indoor_wall_loss,
            ),
            fap_indoor: c(
                self.fap_indoor_intercept,
                self.fap_indoor_slope,
                self.fap_indoor_wall_loss,
            ),
            fap_outdoor: c(
                self.fap_outdoor_intercept,
                self.fap_outdoor_slope,
                self.fap_outdoor_wall_loss,
            ),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SimSection {
    frames: u64,
    drops: usize,
    batch_size: u64,
    seed: u64,
    threads: usize,
    abs_tol: f64,
    rel_tol: f64,
}

impl Default for SimSection {
    fn default() -> Self {
        let p = SimPlan::default();
        let q = Quadrature::default();
        Self {
            frames: p.frames,
            drops: p.drops,
            batch_size: p.batch_size,
            seed: p.seed,
            threads: p.workers,
            abs_tol: q.abs_tol,
            rel_tol: q.rel_tol,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileConfig {
    scenario: ScenarioSection,
    pathloss: PathlossSection,
    sim: SimSection,
}

/// Everything a run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    pub plan: SimPlan,
    pub quadrature: Quadrature,
}

const SECTIONS: [&str; 3] = ["scenario", "pathloss", "sim"];

/// 1-based line of byte `offset` in `text`.
fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn parse_error(text: &str, err: &toml::de::Error) -> CliError {
    CliError::Config {
        line: err.span().map(|s| line_of(text, s.start)),
        message: err.message().to_string(),
    }
}

/// Parses `value` the way it would be read on the right of `=` in a file,
/// falling back to a bare string.
fn parse_value(value: &str) -> Value {
    format!("v = {value}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(value.to_string()))
}

/// Applies one `key=value` override. `key` is `section.name`, or a bare
/// name when it belongs to exactly one section.
fn apply_override(table: &mut Table, assignment: &str) -> Result<(), CliError> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("override `{assignment}` is not key=value")))?;
    let key = key.trim();
    let (section, name) = match key.split_once('.') {
        Some((s, n)) => (s.to_string(), n.to_string()),
        None => {
            let owners: Vec<&str> = SECTIONS
                .iter()
                .copied()
                .filter(|s| section_keys(s).contains(&key))
                .collect();
            match owners.as_slice() {
                [one] => (one.to_string(), key.to_string()),
                [] => {
                    return Err(CliError::Config {
                        line: None,
                        message: format!("unknown key `{key}` in override"),
                    })
                }
                _ => {
                    return Err(CliError::Usage(format!(
                        "key `{key}` is ambiguous; write section.{key}"
                    )))
                }
            }
        }
    };
    let slot = table
        .entry(section.clone())
        .or_insert_with(|| Value::Table(Table::new()));
    match slot {
        Value::Table(t) => {
            t.insert(name, parse_value(value.trim()));
            Ok(())
        }
        _ => Err(CliError::Config {
            line: None,
            message: format!("`{section}` is not a section"),
        }),
    }
}

fn section_keys(section: &str) -> Vec<&'static str> {
    match section {
        "scenario" => vec![
            "n_fap_antennas",
            "n_mbs_antennas",
            "n_femto_mts",
            "n_macro_mts",
            "p_fap",
            "p_mbs",
            "noise_femto",
            "noise_macro",
            "gamma_f_req",
            "gamma_m_req",
            "macro_radius",
            "femto_radius",
            "mbs_fap_distance",
            "rng_seed",
        ],
        "pathloss" => vec![
            "mbs_outdoor_intercept",
            "mbs_outdoor_slope",
            "mbs_outdoor_wall_loss",
            "mbs_indoor_intercept",
            "mbs_indoor_slope",
            "mbs_indoor_wall_loss",
            "fap_indoor_intercept",
            "fap_indoor_slope",
            "fap_indoor_wall_loss",
            "fap_outdoor_intercept",
            "fap_outdoor_slope",
            "fap_outdoor_wall_loss",
        ],
        "sim" => vec![
            "frames",
            "drops",
            "batch_size",
            "seed",
            "threads",
            "abs_tol",
            "rel_tol",
        ],
        _ => Vec::new(),
    }
}

/// Parses config text and applies `overrides` on top.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<RunConfig, CliError> {
    // Deserializing the text itself first reports errors at file lines.
    let file: FileConfig = toml::from_str(text).map_err(|e| parse_error(text, &e))?;
    if overrides.is_empty() {
        return build(file);
    }
    let mut table: Table = text.parse().map_err(|e| parse_error(text, &e))?;
    for assignment in overrides {
        apply_override(&mut table, assignment)?;
    }
    let file: FileConfig = Value::Table(table).try_into().map_err(|e: toml::de::Error| {
        CliError::Config {
            line: None,
            message: format!("in --set: {}", e.message()),
        }
    })?;
    build(file)
}

fn build(file: FileConfig) -> Result<RunConfig, CliError> {
    let s = file.scenario;
    let scenario = ScenarioConfig {
        n_fap_antennas: s.n_fap_antennas,
        n_mbs_antennas: s.n_mbs_antennas,
        n_femto_mts: s.n_femto_mts,
        n_macro_mts: s.n_macro_mts,
        p_fap: s.p_fap,
        p_mbs: s.p_mbs,
        noise_femto: s.noise_femto,
        noise_macro: s.noise_macro,
        gamma_f_req: s.gamma_f_req,
        gamma_m_req: s.gamma_m_req,
        macro_radius: s.macro_radius,
        femto_radius: s.femto_radius,
        mbs_fap_distance: s.mbs_fap_distance,
        path_loss_params: file.pathloss.model(),
        rng_seed: s.rng_seed,
    };
    scenario.validate().map_err(|e| CliError::Config {
        line: None,
        message: e.to_string(),
    })?;
    let sim = file.sim;
    let plan = SimPlan {
        frames: sim.frames,
        drops: sim.drops,
        batch_size: sim.batch_size,
        seed: sim.seed,
        workers: sim.threads,
        analytics: true,
    };
    plan.validate().map_err(|e| CliError::Config {
        line: None,
        message: e.to_string(),
    })?;
    for (key, v) in [("abs_tol", sim.abs_tol), ("rel_tol", sim.rel_tol)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::Config {
                line: None,
                message: format!("`sim.{key}` must be positive, got {v}"),
            });
        }
    }
    Ok(RunConfig {
        scenario,
        plan,
        quadrature: Quadrature::new(sim.abs_tol, sim.rel_tol),
    })
}

/// Reads and parses a config file.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
        line: None,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_config(&text, overrides)
}
