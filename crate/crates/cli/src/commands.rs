//! The four subcommands. Each writes its files into the output directory
//! and returns the list of failed assertions.

use std::fs;
use std::path::Path;

use braggswap::bragg::{analytic_amplitudes, bragg_phase, ladder_series, pair_state_at, pi_time};
use braggswap::metrics::{oracle_compare, oracle_csv_string, period_grid, run_sweep, write_sweep};
use braggswap::protocol::{comment_header, run_protocol};
use braggswap::VERSION;
use serde::Serialize;

use crate::config::Config;
use crate::CliError;

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct Summary<'a, T: Serialize> {
    version: &'a str,
    config: &'a Config,
    #[serde(flatten)]
    body: T,
}

fn summary_json<T: Serialize>(cfg: &Config, body: T) -> Result<String, CliError> {
    let s = Summary { version: VERSION, config: cfg, body };
    Ok(serde_json::to_string_pretty(&s)?)
}

fn check_max(failures: &mut Vec<String>, name: &str, value: f64, limit: Option<f64>) {
    if let Some(limit) = limit {
        if value.is_nan() || value > limit {
            failures.push(format!("{name} = {value} exceeds {limit}"));
        }
    }
}

fn check_min(failures: &mut Vec<String>, name: &str, value: Option<f64>, limit: Option<f64>) {
    if let Some(limit) = limit {
        match value {
            Some(v) if v >= limit => {}
            Some(v) => failures.push(format!("{name} = {v} is below {limit}")),
            None => failures.push(format!("{name} is undefined, required >= {limit}")),
        }
    }
}

#[derive(Serialize)]
struct EntangleSummary {
    interaction_time: f64,
    pi_time: f64,
    bragg_phase: f64,
    analytic_deflected: f64,
    oracle_deflected: f64,
    max_error: f64,
    truncation_warning: bool,
}

/// Populations against time up to the interaction time, and the final pair state.
pub fn entangle(cfg: &Config) -> Result<Vec<String>, CliError> {
    let p = &cfg.params;
    let t_pi = pi_time(p)?;
    let t_end = cfg.time_scale * t_pi;
    let times: Vec<f64> = (0..=cfg.samples).map(|k| t_end * k as f64 / cfg.samples as f64).collect();
    let one = ladder_series(p, &times)?;
    let none = ladder_series(&p.with_photons(0), &times)?;

    let mut csv = comment_header(cfg)?;
    csv.push_str("time,analytic_undeflected,analytic_deflected,oracle_undeflected,oracle_deflected,n0_undeflected,n0_deflected\n");
    let mut max_error: f64 = 0.0;
    for (a, b) in one.iter().zip(&none) {
        let (cp, cm) = analytic_amplitudes(p, a.time);
        max_error = max_error
            .max((cp.norm_sqr() - a.undeflected()).abs())
            .max((cm.norm_sqr() - a.deflected()).abs());
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            a.time,
            cp.norm_sqr(),
            cm.norm_sqr(),
            a.undeflected(),
            a.deflected(),
            b.undeflected(),
            b.deflected()
        ));
    }
    write(&cfg.output_dir, "entangle_populations.csv", &csv)?;

    let pair = pair_state_at(p, t_end)?;
    let mut csv = comment_header(cfg)?;
    csv.push_str("label,re,im,probability\n");
    for (label, a) in pair.labels().iter().zip(pair.amps().iter()) {
        csv.push_str(&format!("{label},{},{},{}\n", a.re, a.im, a.norm_sqr()));
    }
    write(&cfg.output_dir, "entangle_pair.csv", &csv)?;

    let last = one.last().expect("at least two grid points");
    let (_, cm) = analytic_amplitudes(p, t_end);
    let summary = EntangleSummary {
        interaction_time: t_end,
        pi_time: t_pi,
        bragg_phase: bragg_phase(p),
        analytic_deflected: cm.norm_sqr(),
        oracle_deflected: last.deflected(),
        max_error,
        truncation_warning: one.iter().any(|s| s.truncation_warning),
    };
    println!(
        "interaction time {:.6}, deflected population: oracle {:.6}, closed form {:.6}",
        t_end, summary.oracle_deflected, summary.analytic_deflected
    );
    let mut failures = Vec::new();
    check_max(&mut failures, "max_error", max_error, cfg.assertions.max_error);
    check_min(&mut failures, "oracle_deflected", Some(summary.oracle_deflected), cfg.assertions.min_deflection);
    write(&cfg.output_dir, "entangle_summary.json", &summary_json(cfg, summary)?)?;
    Ok(failures)
}

/// Exact click distribution, sampled shots and heralded classes.
pub fn protocol(cfg: &Config) -> Result<Vec<String>, CliError> {
    let report = run_protocol(&cfg.protocol())?;
    write(&cfg.output_dir, "protocol_report.csv", &report.to_csv_string_with(cfg)?)?;
    #[derive(Serialize)]
    struct Body<'a> {
        report: &'a braggswap::protocol::ProtocolReport,
    }
    write(&cfg.output_dir, "protocol_summary.json", &summary_json(cfg, Body { report: &report })?)?;

    let (lo, hi) = report.success_rate_wilson;
    println!(
        "success rate {:.5} [{lo:.5}, {hi:.5}] from {} detected shots (exact {:.6})",
        report.success_rate, report.detected, report.success_probability
    );
    for c in &report.classes {
        println!(
            "  {:<10} p = {:.6}  freq = {:.5}  fidelity = {}  concurrence = {}",
            c.class.to_string(),
            c.probability,
            c.empirical_frequency,
            c.fidelity.map_or("-".into(), |f| format!("{f:.6}")),
            c.concurrence.map_or("-".into(), |f| format!("{f:.6}")),
        );
    }
    if !report.table_divergences.is_empty() {
        println!(
            "  {} patterns differ from the published detector table (see paper_label column)",
            report.table_divergences.len()
        );
    }

    let mut failures = Vec::new();
    check_min(&mut failures, "success_rate", Some(report.success_rate), cfg.assertions.min_success_rate);
    check_min(&mut failures, "mean_fidelity", report.mean_entangled_fidelity, cfg.assertions.min_fidelity);
    Ok(failures)
}

/// Closed form against the ladder over one Pendellösung period.
pub fn oracle_compare_cmd(cfg: &Config) -> Result<Vec<String>, CliError> {
    let cmp = oracle_compare(&cfg.params, &period_grid(&cfg.params, cfg.samples)?)?;
    write(&cfg.output_dir, "oracle_compare.csv", &oracle_csv_string(cfg, &cmp)?)?;
    #[derive(Serialize)]
    struct Body {
        max_error: f64,
        max_boundary_population: f64,
        truncation_warning: bool,
    }
    let body = Body {
        max_error: cmp.max_error,
        max_boundary_population: cmp.max_boundary_population,
        truncation_warning: cmp.truncation_warning,
    };
    write(&cfg.output_dir, "oracle_compare.json", &summary_json(cfg, body)?)?;
    println!("max population error {:e} over {} times", cmp.max_error, cmp.rows.len());
    if cmp.truncation_warning {
        println!("warning: ladder truncation too tight (boundary population {:e})", cmp.max_boundary_population);
    }
    let mut failures = Vec::new();
    check_max(&mut failures, "max_error", cmp.max_error, cfg.assertions.max_error);
    Ok(failures)
}

pub fn sweep(cfg: &Config) -> Result<Vec<String>, CliError> {
    let spec = cfg.sweep_spec()?;
    let rows = run_sweep(&spec)?;
    let manifest = write_sweep(&cfg.output_dir, "sweep", cfg, &spec, &rows)?;
    println!("{} rows, {} failed", manifest.rows, manifest.failed_rows.len());
    let mut failures = Vec::new();
    for r in &rows {
        let tag = format!("row {} ({} = {})", r.index, spec.axis.name(), r.value);
        if let Some(e) = &r.error {
            println!("  {tag}: {e}");
            continue;
        }
        check_max(&mut failures, &format!("{tag} max_error"), r.max_period_error.unwrap_or(f64::NAN), cfg.assertions.max_error);
        check_min(&mut failures, &format!("{tag} mean_fidelity"), r.mean_fidelity, cfg.assertions.min_fidelity);
        check_min(&mut failures, &format!("{tag} success_rate"), r.success_rate, cfg.assertions.min_success_rate);
        check_min(&mut failures, &format!("{tag} oracle_deflection"), r.oracle_deflection, cfg.assertions.min_deflection);
    }
    Ok(failures)
}
