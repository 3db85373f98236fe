//! The four subcommands. Each builds a [`Report`]: a CSV table plus a JSON
//! summary holding every computed field.

use std::path::Path;

use dirac_sea::oracle::{evolve, measured_shift, richardson_shift, EvolutionConfig};
use dirac_sea::shifts::{closed_form_shift, second_order_shift};
use dirac_sea::vacuum::{ht_decomposition, qft_vacuum_shift, x2_asymptotic, VacuumOccupancy};
use dirac_sea::{build_f_table, BoxConfig, FCoefficients, FSource, Mode, Quadrature};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ResolvedPotential, RunConfig};
use crate::error::CliResult;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub summary: Value,
}

impl Report {
    /// Writes `<name>.csv` and `<name>.json` into `dir`.
    pub fn write(&self, dir: &Path) -> CliResult<()> {
        std::fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join(format!("{}.csv", self.name)))?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        let mut text = serde_json::to_string_pretty(&self.summary)?;
        text.push('\n');
        std::fs::write(dir.join(format!("{}.json", self.name)), text)?;
        Ok(())
    }
}

/// Shortest round-trip form; empty for missing values.
fn num(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => serde_json::to_string(&v).expect("finite float"),
        Some(v) => v.to_string(),
        None => String::new(),
    }
}

fn relative_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// f-table over `|r| ≤ window`: infinite-time amplitudes for the sinc burst,
/// quadrature over the potential's window otherwise.
fn table(run: &RunConfig, pot: &ResolvedPotential, window: i64) -> CliResult<FCoefficients> {
    let cfg = &run.box_config;
    let source = match pot.sinc {
        Some(w) => FSource::AnalyticSinc { w },
        None => FSource::Numeric {
            spec: &pot.spec,
            quadrature: quadrature(run, pot, window),
        },
    };
    Ok(build_f_table(cfg, source, window)?)
}

fn quadrature(run: &RunConfig, pot: &ResolvedPotential, window: i64) -> Quadrature {
    run.quadrature_steps
        .map(Quadrature::new)
        .unwrap_or_else(|| Quadrature::for_table(&run.box_config, &pot.spec, window))
}

fn window_or(run: &RunConfig, needed: i64) -> i64 {
    run.cutoffs.s.unwrap_or(needed.max(1))
}

#[derive(Debug, Serialize)]
struct ShiftRow {
    r: i64,
    closed_form: Option<f64>,
    mode_sum: f64,
    relative_diff: Option<f64>,
}

/// Second-order shifts over the configured `r` range, against the closed
/// form when the potential is the sinc burst.
pub fn cmd_shift(run: &RunConfig, pot: &ResolvedPotential) -> CliResult<Report> {
    let cfg = &run.box_config;
    let range = &run.shift;
    let mut rows = Vec::new();
    let mut window = None;
    if range.r_min <= range.r_max {
        let reach = pot.spec.reach();
        let s = window_or(run, range.r_min.abs().max(range.r_max.abs()) + reach);
        let f = table(run, pot, s)?;
        window = Some(s);
        rows = (range.r_min..=range.r_max)
            .into_par_iter()
            .map(|r| -> CliResult<ShiftRow> {
                let mode = Mode::new(range.branch, r);
                let mode_sum = second_order_shift(cfg, &f, mode)?.value;
                let closed_form = pot.sinc.map(|w| closed_form_shift(cfg, w, mode)).transpose()?;
                Ok(ShiftRow {
                    r,
                    closed_form,
                    mode_sum,
                    relative_diff: closed_form.map(|c| relative_diff(c, mode_sum)),
                })
            })
            .collect::<CliResult<_>>()?;
    }
    Ok(Report {
        name: "shift",
        header: vec!["r", "closed_form", "mode_sum", "relative_diff"],
        rows: rows
            .iter()
            .map(|r| vec![r.r.to_string(), num(r.closed_form), num(Some(r.mode_sum)), num(r.relative_diff)])
            .collect(),
        summary: json!({
            "command": "shift",
            "box": cfg,
            "branch": range.branch,
            "table_window": window,
            "analytic": pot.sinc.is_some(),
            "max_relative_diff": rows.iter().filter_map(|r| r.relative_diff).reduce(f64::max),
            "rows": rows,
        }),
    })
}

#[derive(Debug, Serialize)]
struct VacuumRow {
    n: i64,
    y: f64,
    x1: f64,
    x2: f64,
    x2a: f64,
    x2b: f64,
    total: f64,
    qft_standard: f64,
    qft_redefined: f64,
    analytic_limit: Option<f64>,
}

/// `E(N) ≈ E∞ + c/N²` through the two largest cutoffs.
fn extrapolate(rows: &[VacuumRow]) -> Option<f64> {
    let mut pts: Vec<(i64, f64)> = rows.iter().filter(|r| r.n > 0).map(|r| (r.n, r.total)).collect();
    pts.sort_by_key(|p| p.0);
    pts.dedup_by_key(|p| p.0);
    let [.., (n1, e1), (n2, e2)] = pts[..] else {
        return None;
    };
    let (a, b) = ((n1 * n1) as f64, (n2 * n2) as f64);
    Some((b * e2 - a * e1) / (b - a))
}

/// Hole-theory decomposition and both field-theory vacua for every cutoff `N`.
pub fn cmd_vacuum(run: &RunConfig, pot: &ResolvedPotential, with_extrapolation: bool) -> CliResult<Report> {
    let cfg = &run.box_config;
    let max_n = run.cutoffs.n.iter().copied().max().unwrap_or(0);
    let s = window_or(run, max_n + pot.spec.reach());
    let f = table(run, pot, s)?;
    let limit = pot.sinc.map(|w| x2_asymptotic(cfg, w)).transpose()?.map(|a| a.total);
    let standard = qft_vacuum_shift(cfg, &f, VacuumOccupancy::Standard)?;
    let rows: Vec<VacuumRow> = run
        .cutoffs
        .n
        .iter()
        .map(|&n| -> CliResult<VacuumRow> {
            let d = ht_decomposition(cfg, &f, n)?;
            Ok(VacuumRow {
                n,
                y: d.y,
                x1: d.x1,
                x2: d.x2,
                x2a: d.x2a,
                x2b: d.x2b,
                total: d.total,
                qft_standard: standard,
                qft_redefined: qft_vacuum_shift(cfg, &f, VacuumOccupancy::Redefined { n })?,
                analytic_limit: limit,
            })
        })
        .collect::<CliResult<_>>()?;
    let extrapolated = if with_extrapolation { extrapolate(&rows) } else { None };
    let mut summary = json!({
        "command": "vacuum",
        "box": cfg,
        "table_window": s,
        "analytic": pot.sinc.is_some(),
        "analytic_limit": limit,
        "rows": rows,
    });
    if with_extrapolation {
        summary["extrapolated_total"] = json!(extrapolated);
    }
    Ok(Report {
        name: "vacuum",
        header: vec!["N", "Y_N", "X1_N", "X2_N", "total", "qft_standard", "qft_redefined", "analytic_limit"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    num(Some(r.y)),
                    num(Some(r.x1)),
                    num(Some(r.x2)),
                    num(Some(r.total)),
                    num(Some(r.qft_standard)),
                    num(Some(r.qft_redefined)),
                    num(r.analytic_limit),
                ]
            })
            .collect(),
        summary,
    })
}

#[derive(Debug, Serialize)]
struct OracleRow {
    r: i64,
    branch: dirac_sea::Branch,
    q: f64,
    measured_over_q2: f64,
    perturbative: f64,
    relative_diff: f64,
    norm_drift: f64,
}

#[derive(Debug, Serialize)]
struct OracleMode {
    mode: Mode,
    perturbative: f64,
    /// From the two smallest charges.
    richardson: Option<f64>,
    richardson_relative_diff: Option<f64>,
}

fn evolution(run: &RunConfig, pot: &ResolvedPotential, mode: Mode, q: f64) -> EvolutionConfig {
    let ec = EvolutionConfig::covering(&pot.spec, mode, q, run.oracle.steps);
    match run.cutoffs.m {
        Some(cutoff) => EvolutionConfig { cutoff, ..ec },
        None => ec,
    }
}

/// Direct time evolution against the perturbative shift over the same
/// finite window.
pub fn cmd_oracle(run: &RunConfig, pot: &ResolvedPotential) -> CliResult<Report> {
    let cfg = &run.box_config;
    let numeric = ResolvedPotential {
        spec: pot.spec.clone(),
        sinc: None,
    };
    let modes = &run.oracle.modes;
    let perturbative: Vec<f64> = modes
        .par_iter()
        .map(|&mode| -> CliResult<f64> {
            let f = table(run, &numeric, (mode.r.abs() + pot.spec.reach()).max(1))?;
            Ok(second_order_shift(cfg, &f, mode)?.value)
        })
        .collect::<CliResult<_>>()?;

    let jobs: Vec<(usize, f64)> = (0..modes.len())
        .flat_map(|i| run.oracle.q.iter().map(move |&q| (i, q)))
        .collect();
    let rows: Vec<OracleRow> = jobs
        .par_iter()
        .map(|&(i, q)| -> CliResult<OracleRow> {
            let mode = modes[i];
            let state = evolve(cfg, &pot.spec, mode, &evolution(run, pot, mode, q))?;
            let measured_over_q2 = measured_shift(cfg, &state, mode) / (q * q);
            Ok(OracleRow {
                r: mode.r,
                branch: mode.branch,
                q,
                measured_over_q2,
                perturbative: perturbative[i],
                relative_diff: relative_diff(measured_over_q2, perturbative[i]),
                norm_drift: state.norm_drift(),
            })
        })
        .collect::<CliResult<_>>()?;

    let mut charges = run.oracle.q.clone();
    charges.sort_by(f64::total_cmp);
    charges.dedup();
    let per_mode: Vec<OracleMode> = modes
        .par_iter()
        .zip(&perturbative)
        .map(|(&mode, &p)| -> CliResult<OracleMode> {
            let richardson = match charges[..] {
                [q2, q1, ..] => Some(richardson_shift(
                    cfg,
                    &pot.spec,
                    mode,
                    &evolution(run, pot, mode, q1),
                    q1,
                    q2,
                )?),
                _ => None,
            };
            Ok(OracleMode {
                mode,
                perturbative: p,
                richardson,
                richardson_relative_diff: richardson.map(|a| relative_diff(a, p)),
            })
        })
        .collect::<CliResult<_>>()?;

    Ok(Report {
        name: "oracle",
        header: vec!["r", "q", "measured_over_q2", "perturbative", "relative_diff", "norm_drift", "branch"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.r.to_string(),
                    num(Some(r.q)),
                    num(Some(r.measured_over_q2)),
                    num(Some(r.perturbative)),
                    num(Some(r.relative_diff)),
                    num(Some(r.norm_drift)),
                    r.branch.sign().to_string(),
                ]
            })
            .collect(),
        summary: json!({
            "command": "oracle",
            "box": cfg,
            "steps": run.oracle.steps,
            "window": pot.spec.window(),
            "modes": per_mode,
            "rows": rows,
        }),
    })
}

/// Every non-zero amplitude in the table window.
pub fn cmd_ftable(run: &RunConfig, pot: &ResolvedPotential) -> CliResult<Report> {
    let cfg: &BoxConfig = &run.box_config;
    let max_n = run.cutoffs.n.iter().copied().max().unwrap_or(0);
    let s = window_or(run, max_n + pot.spec.reach());
    let f = table(run, pot, s)?;
    let entries = f.nonzero_entries();
    Ok(Report {
        name: "ftable",
        header: vec!["dest_branch", "dest_r", "src_branch", "src_r", "re", "im"],
        rows: entries
            .iter()
            .map(|(d, s, v)| {
                vec![
                    d.branch.sign().to_string(),
                    d.r.to_string(),
                    s.branch.sign().to_string(),
                    s.r.to_string(),
                    num(Some(v.re)),
                    num(Some(v.im)),
                ]
            })
            .collect(),
        summary: json!({
            "command": "ftable",
            "box": cfg,
            "table_window": s,
            "analytic": f.is_analytic(),
            "offsets": f.offsets(),
            "nonzero": entries.len(),
            "total_weight": f.total_weight(),
            "hermiticity_defect": f.hermiticity_defect(),
        }),
    })
}
