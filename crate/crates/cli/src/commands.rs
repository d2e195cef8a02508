//! The four subcommands. Each writes CSV files into the output directory
//! and returns a short text summary for stdout.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use qacs_core::analytics::audit::printed_formula_audit;
use qacs_core::analytics::{analyze_drop, DropAnalysis, DropSetup, MacroPopulation};
use qacs_core::simkit::{make_drop, simulate, sweep, RateReport, SweepAxis};

use crate::checks::{
    agreement_checks, closed_form_checks, fairness_checks, normalization_checks, Check,
};
use crate::config::{load_config, parse_config, RunConfig};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Sweep,
    Analyze,
    Validate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub command: Command,
    /// `None` runs on the defaults.
    pub config_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    /// `key=value` assignments applied over the file.
    pub overrides: Vec<String>,
    pub axis: Option<SweepAxis>,
    /// `a:b:step` in dB.
    pub values: Option<String>,
}

impl RunSpec {
    pub fn new(command: Command, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            command,
            config_path: None,
            output_dir: output_dir.into(),
            overrides: Vec::new(),
            axis: None,
            values: None,
        }
    }

    pub fn config(&self) -> Result<RunConfig, CliError> {
        match &self.config_path {
            Some(path) => load_config(path, &self.overrides),
            None => parse_config("", &self.overrides),
        }
    }
}

/// Runs `spec` and returns the text report.
pub fn run(spec: &RunSpec) -> Result<String, CliError> {
    if spec.output_dir.as_os_str().is_empty() {
        return Err(CliError::Usage("output directory must not be empty".into()));
    }
    let cfg = spec.config()?;
    fs::create_dir_all(&spec.output_dir).map_err(|e| io_error(&spec.output_dir, e))?;
    match spec.command {
        Command::Simulate => cmd_simulate(&cfg, &spec.output_dir),
        Command::Sweep => {
            let axis = spec
                .axis
                .ok_or_else(|| CliError::Usage("sweep needs --axis".into()))?;
            let values = parse_values(
                spec.values
                    .as_deref()
                    .ok_or_else(|| CliError::Usage("sweep needs --values a:b:step".into()))?,
            )?;
            cmd_sweep(&cfg, axis, &values, &spec.output_dir)
        }
        Command::Analyze => cmd_analyze(&cfg, &spec.output_dir),
        Command::Validate => cmd_validate(&cfg, &spec.output_dir),
    }
}

/// Expands `a:b:step` (or a single value) into an increasing grid that
/// includes `b` when it lies on the grid.
pub fn parse_values(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("--values `{text}` is not a:b:step"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [v] if v.is_finite() => Ok(vec![*v]),
        [a, b, step] if a.is_finite() && b.is_finite() && *step > 0.0 && b >= a => {
            let n = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| a + i as f64 * step).collect())
        }
        _ => Err(bad()),
    }
}

fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| io_error(&path, e))?;
    Ok(path)
}

fn num(x: f64) -> String {
    format!("{x:.6}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "nan".into())
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

const RATE_HEADER: &str = "r_f_analytic,r_f_empirical,r_f_ci,r_m_analytic,r_m_empirical,r_m_ci,e_nq,e_nb";

/// Per-drop and drop-averaged rates.
pub fn simulate_csv(report: &RateReport) -> String {
    let mut out = format!("drop,{RATE_HEADER},qos_violations\n");
    for d in &report.drops {
        let a = d.analytic.as_ref();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            d.drop_index,
            opt(a.map(|a| a.r_f)),
            num(d.r_f.mean),
            num(d.r_f.ci95_halfwidth),
            opt(a.map(|a| a.r_m)),
            num(d.r_m.mean),
            num(d.r_m.ci95_halfwidth),
            num(d.n_q.mean),
            num(d.n_b.mean),
            d.qos_violations
        );
    }
    let avg = &report.average;
    let _ = writeln!(
        out,
        "mean,{},{},{},{},{},{},{},{},{}",
        opt(avg.r_f_analytic),
        num(avg.r_f),
        num(avg.r_f_ci),
        opt(avg.r_m_analytic),
        num(avg.r_m),
        num(avg.r_m_ci),
        num(avg.e_nq),
        num(avg.e_nb),
        report.qos_violations
    );
    out
}

/// PMFs of N_Q and N_B and per-MT service frequencies, analytic beside
/// empirical.
pub fn distributions_csv(report: &RateReport) -> String {
    let mut out = String::from("drop,variable,value,analytic,empirical\n");
    for d in &report.drops {
        let a = d.analytic.as_ref();
        let frames = d.frames() as f64;
        let rows: [(&str, Vec<f64>, Option<&Vec<f64>>); 4] = [
            ("n_q", d.pmf_nq(), a.map(|a| &a.pmf_nq)),
            ("n_b", d.pmf_nb(), a.map(|a| &a.pmf_nb)),
            (
                "femto_mt",
                d.femto_counts.iter().map(|&c| c as f64 / frames).collect(),
                a.map(|a| &a.femto_selection),
            ),
            (
                "macro_mt",
                d.macro_counts.iter().map(|&c| c as f64 / frames).collect(),
                a.map(|a| &a.macro_selection),
            ),
        ];
        for (name, empirical, analytic) in rows {
            for (i, e) in empirical.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{name},{i},{},{}",
                    d.drop_index,
                    opt(analytic.and_then(|v| v.get(i).copied())),
                    num(*e)
                );
            }
        }
    }
    out
}

fn cmd_simulate(cfg: &RunConfig, dir: &Path) -> Result<String, CliError> {
    let report = simulate(&cfg.scenario, &cfg.plan)?;
    write_file(dir, "simulate.csv", &simulate_csv(&report))?;
    write_file(dir, "distributions.csv", &distributions_csv(&report))?;
    let a = &report.average;
    Ok(format!(
        "{} drop(s) × {} frames\nR_F {:.4} ± {:.4} (analytic {})\nR_M {:.4} ± {:.4} (analytic {})\nQoS violations {}\n",
        report.drops.len(),
        report.plan.frames,
        a.r_f,
        a.r_f_ci,
        opt(a.r_f_analytic),
        a.r_m,
        a.r_m_ci,
        opt(a.r_m_analytic),
        report.qos_violations
    ))
}

/// One row per swept value, drop-averaged.
pub fn sweep_csv(values: &[f64], reports: &[RateReport]) -> String {
    let mut out = format!("axis_value_db,{RATE_HEADER}\n");
    for (v, r) in values.iter().zip(reports) {
        let a = &r.average;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            num(*v),
            opt(a.r_f_analytic),
            num(a.r_f),
            num(a.r_f_ci),
            opt(a.r_m_analytic),
            num(a.r_m),
            num(a.r_m_ci),
            num(a.e_nq),
            num(a.e_nb)
        );
    }
    out
}

fn cmd_sweep(
    cfg: &RunConfig,
    axis: SweepAxis,
    values: &[f64],
    dir: &Path,
) -> Result<String, CliError> {
    let reports = sweep(&cfg.scenario, &cfg.plan, axis, values)?;
    let name = format!("sweep_{}.csv", axis.name());
    let path = write_file(dir, &name, &sweep_csv(values, &reports))?;
    Ok(format!(
        "{} values of {} written to {}\n",
        values.len(),
        axis.name(),
        path.display()
    ))
}

fn analyze_drops(cfg: &RunConfig) -> Result<Vec<(Arc<qacs_core::channel::DropLinks>, DropAnalysis)>, CliError> {
    (0..cfg.plan.drops)
        .map(|d| {
            let links = Arc::new(make_drop(&cfg.scenario, d)?);
            let setup = DropSetup::new(&cfg.scenario, links.budget.clone());
            let analysis = analyze_drop(&setup, &cfg.quadrature)?;
            Ok((links, analysis))
        })
        .collect()
}

fn cmd_analyze(cfg: &RunConfig, dir: &Path) -> Result<String, CliError> {
    let drops = analyze_drops(cfg)?;
    let mut csv = String::from("drop,r_f,r_m,e_nq,e_nb,unreachable_qos\n");
    let mut pmf = String::from("drop,variable,value,probability\n");
    for (d, (_, a)) in drops.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{d},{},{},{},{},{}",
            num(a.r_f),
            num(a.r_m),
            num(a.e_nq),
            num(a.e_nb),
            a.unreachable_qos
        );
        for (name, v) in [("n_q", &a.pmf_nq), ("n_b", &a.pmf_nb)] {
            for (i, p) in v.iter().enumerate() {
                let _ = writeln!(pmf, "{d},{name},{i},{}", num(*p));
            }
        }
    }
    write_file(dir, "analyze.csv", &csv)?;
    write_file(dir, "analyze_pmf.csv", &pmf)?;
    let mut audit = String::from("formula,printed,oracle,detected\n");
    let mut text = String::new();
    for d in printed_formula_audit(&cfg.quadrature)? {
        let _ = writeln!(
            audit,
            "{},{},{},{}",
            quote(d.formula),
            num(d.printed),
            num(d.oracle),
            d.detected()
        );
        let _ = writeln!(
            text,
            "printed {}: {:.6} vs oracle {:.6}{}",
            d.formula,
            d.printed,
            d.oracle,
            if d.detected() { " (differs, oracle used)" } else { "" }
        );
    }
    write_file(dir, "audit.csv", &audit)?;
    for (d, (_, a)) in drops.iter().enumerate() {
        let _ = writeln!(text, "drop {d}: R_F {:.4}, R_M {:.4}", a.r_f, a.r_m);
    }
    Ok(text)
}

/// Every check `validate` runs, in report order.
pub fn validation_checks(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let quad = &cfg.quadrature;
    let mut checks = closed_form_checks(quad);

    let links = make_drop(&cfg.scenario, 0)?;
    let setup = DropSetup::new(&cfg.scenario, links.budget.clone());
    let population = MacroPopulation {
        mts: links.budget.macro_mts.clone(),
        gamma_m_req: setup.thresholds.gamma_m,
    };
    checks.extend(normalization_checks(&setup.femto_params(0), &population, quad));

    let report = simulate(&cfg.scenario, &cfg.plan)?;
    for d in &report.drops {
        if let Some(a) = &d.analytic {
            let failed = a.checks.iter().filter(|c| !c.agrees()).count();
            checks.push(Check::new(
                format!("drop {} analytic crosschecks", d.drop_index),
                failed == 0,
                format!("{} of {} disagree", failed, a.checks.len()),
            ));
        }
        checks.extend(agreement_checks(d));
        checks.extend(fairness_checks(d));
    }
    checks.push(Check::new(
        "QoS violations",
        report.qos_violations == 0,
        format!(
            "{} over {} frames",
            report.qos_violations,
            report.plan.frames * report.drops.len() as u64
        ),
    ));
    Ok(checks)
}

pub fn validation_csv(checks: &[Check]) -> String {
    let mut out = String::from("check,passed,detail\n");
    for c in checks {
        let _ = writeln!(out, "{},{},{}", quote(&c.name), c.passed, quote(&c.detail));
    }
    out
}

fn cmd_validate(cfg: &RunConfig, dir: &Path) -> Result<String, CliError> {
    let checks = validation_checks(cfg)?;
    write_file(dir, "validate.csv", &validation_csv(&checks))?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    let mut text = String::new();
    for c in &checks {
        let _ = writeln!(text, "{c}");
    }
    let _ = writeln!(text, "{} checks, {failed} failed", checks.len());
    if failed > 0 {
        print!("{text}");
        return Err(CliError::Validation { failed });
    }
    Ok(text)
}
