//! Machine-readable result export: JSON (schema `probwave/1`) and
//! plot-ready CSV.
//!
//! Output is byte-deterministic: key order is fixed by struct declaration
//! order and every floating-point number is rendered with 17 significant
//! digits (`{:.16e}`), which round-trips f64 exactly.

use crate::dataio::Distribution;
use crate::eigensolve::{count_nodes, ComparisonTable, EigenSolution, SolverConfig};
use crate::fitkit::FitResult;
use crate::wavemodel::{self, FamilyParams, WaveModel};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{self, Write};

pub const SCHEMA: &str = "probwave/1";

/// Fixed epoch for synthetic trade timestamps (a weekday 09:30 session
/// open), so time-of-day windows behave naturally on generated files.
const SYNTHETIC_SESSION_START_MS: i64 = 1_548_408_600_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitEntry {
    pub rank: usize,
    pub family: String,
    pub n: u32,
    pub q0: f64,
    /// `q0` snapped to the nearest grid tick (the equilibrium point is an
    /// attained price).
    pub q0_snapped: f64,
    pub omega: Option<f64>,
    pub a_tt: Option<f64>,
    pub beta: f64,
    pub c: f64,
    pub sse: f64,
    pub r2: f64,
    pub chi2: f64,
    pub aic: f64,
    pub n_params: usize,
    pub starts_tried: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitPoints {
    pub q: Vec<f64>,
    pub f_emp: Vec<f64>,
    pub f_fit: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConservationSection {
    pub constant_name: String,
    pub constant: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub s_cv: f64,
    pub s: Vec<f64>,
    pub r: Vec<f64>,
    pub note: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub schema: String,
    pub kind: String,
    /// The fitting objective, recorded in every report.
    pub objective: String,
    pub aic_convention: String,
    pub seed: u64,
    pub window_start_ms: i64,
    pub window_end_ms: i64,
    pub t: f64,
    pub tick: f64,
    pub results: Vec<FitEntry>,
    /// Per-point arrays for the rank-1 model.
    pub points: FitPoints,
    pub conservation: ConservationSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelEntry {
    pub index: usize,
    pub energy: f64,
    pub nodes: usize,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub schema: String,
    pub kind: String,
    pub family: String,
    pub a_tt: f64,
    pub beta: Option<f64>,
    pub beta_s: Option<f64>,
    pub y_max: f64,
    pub steps: usize,
    pub e_tol: f64,
    pub levels: Vec<LevelEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruncatedReport {
    pub schema: String,
    pub kind: String,
    pub y_max: f64,
    pub omegas: Vec<f64>,
    pub omega_times_ymax: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema: String,
    pub kind: String,
    pub a_tt: f64,
    pub beta: f64,
    pub beta_s: f64,
    pub nonlocal_levels: Vec<f64>,
    pub schrodinger_levels: Vec<f64>,
    pub nonlocal_spacings: Vec<f64>,
    pub schrodinger_spacings: Vec<f64>,
    pub spacing_ratios: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticReport {
    pub schema: String,
    pub kind: String,
    pub family: String,
    pub n: u32,
    pub q0: f64,
    pub omega: Option<f64>,
    pub a_tt: Option<f64>,
    pub beta: f64,
    pub tick: f64,
    pub seed: u64,
    pub n_samples: u64,
    pub q: Vec<f64>,
    pub mass: Vec<f64>,
    pub p_model: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorReport {
    pub schema: String,
    pub kind: String,
    pub message: String,
}

/// Any exportable result.
#[derive(Debug, Clone)]
pub enum Report {
    Fit(FitReport),
    Spectrum(SpectrumReport),
    Truncated(TruncatedReport),
    Comparison(ComparisonReport),
    Synthetic(SyntheticReport),
    Error(ErrorReport),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

fn family_label(model: &WaveModel) -> (String, u32, Option<f64>, Option<f64>) {
    match model.params {
        FamilyParams::BesselJ0 { omega } => ("bessel_j0".into(), 0, Some(omega), None),
        FamilyParams::Kummer { a_tt, n } => ("kummer".into(), n, None, Some(a_tt)),
    }
}

impl Report {
    /// Assembles the fit report: ranked candidates, per-point arrays for
    /// the winner, and the interaction-conservation diagnostic.
    pub fn from_fit(dist: &Distribution, ranked: &[FitResult], seed: u64) -> Result<Report> {
        if ranked.is_empty() {
            return Err(Error::Report("no fit results to export".into()));
        }
        let grid = dist.grid();
        let entries: Vec<FitEntry> = ranked
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let (family, n, omega, a_tt) = family_label(&r.model);
                FitEntry {
                    rank: i + 1,
                    family,
                    n,
                    q0: r.model.q0,
                    q0_snapped: grid.snap(r.model.q0),
                    omega,
                    a_tt,
                    beta: r.model.beta,
                    c: r.model.c,
                    sse: r.sse,
                    r2: r.r2,
                    chi2: r.chi2,
                    aic: r.aic,
                    n_params: r.n_params,
                    starts_tried: r.starts_tried,
                    converged: r.converged,
                }
            })
            .collect();
        let best = &ranked[0].model;
        let f_emp = dist.frequencies();
        let f_fit: Vec<f64> = grid.points().iter().map(|&q| best.density(q)).collect();
        let cons = wavemodel::interaction_diagnostic(dist, best)?;
        let (start, end) = dist.window();
        Ok(Report::Fit(FitReport {
            schema: SCHEMA.into(),
            kind: "fit".into(),
            objective: "least squares on relative frequencies f_i = m_i / M".into(),
            aic_convention: "n_obs * ln(sse / n_obs) + 2 * n_params".into(),
            seed,
            window_start_ms: start,
            window_end_ms: end,
            t: dist.t(),
            tick: grid.tick(),
            results: entries,
            points: FitPoints {
                q: grid.points().to_vec(),
                f_emp,
                f_fit,
            },
            conservation: ConservationSection {
                constant_name: cons.constant_name.into(),
                constant: cons.constant,
                s_min: cons.s_min,
                s_max: cons.s_max,
                s_cv: cons.s_cv,
                s: cons.s,
                r: cons.r,
                note: cons.note.into(),
            },
        }))
    }

    pub fn from_spectrum(
        family: &str,
        a_tt: f64,
        beta: Option<f64>,
        beta_s: Option<f64>,
        cfg: &SolverConfig,
        solutions: &[EigenSolution],
    ) -> Report {
        Report::Spectrum(SpectrumReport {
            schema: SCHEMA.into(),
            kind: "spectrum".into(),
            family: family.into(),
            a_tt,
            beta,
            beta_s,
            y_max: cfg.y_max,
            steps: cfg.steps,
            e_tol: cfg.e_tol,
            levels: solutions
                .iter()
                .map(|s| LevelEntry {
                    index: s.index,
                    energy: s.energy,
                    nodes: count_nodes(&s.psi_samples),
                    residual: s.residual,
                    converged: s.converged,
                })
                .collect(),
        })
    }

    pub fn from_bessel_truncated(y_max: f64, omegas: &[f64]) -> Report {
        Report::Truncated(TruncatedReport {
            schema: SCHEMA.into(),
            kind: "bessel_truncated".into(),
            y_max,
            omegas: omegas.to_vec(),
            omega_times_ymax: omegas.iter().map(|w| w * y_max).collect(),
        })
    }

    pub fn from_comparison(a_tt: f64, beta: f64, beta_s: f64, table: &ComparisonTable) -> Report {
        Report::Comparison(ComparisonReport {
            schema: SCHEMA.into(),
            kind: "comparison".into(),
            a_tt,
            beta,
            beta_s,
            nonlocal_levels: table.nonlocal_levels.clone(),
            schrodinger_levels: table.schrodinger_levels.clone(),
            nonlocal_spacings: table.nonlocal_spacings.clone(),
            schrodinger_spacings: table.schrodinger_spacings.clone(),
            spacing_ratios: table.spacing_ratios.clone(),
        })
    }

    pub fn from_synthetic(
        model: &WaveModel,
        dist: &Distribution,
        n_samples: u64,
        seed: u64,
    ) -> Result<Report> {
        let grid = dist.grid();
        let normalized = model.normalized(grid)?;
        let (family, n, omega, a_tt) = family_label(model);
        Ok(Report::Synthetic(SyntheticReport {
            schema: SCHEMA.into(),
            kind: "synthetic".into(),
            family,
            n,
            q0: model.q0,
            omega,
            a_tt,
            beta: model.beta,
            tick: grid.tick(),
            seed,
            n_samples,
            q: grid.points().to_vec(),
            mass: dist.masses().to_vec(),
            p_model: grid.points().iter().map(|&q| normalized.density(q)).collect(),
        }))
    }

    pub fn error(message: impl Into<String>) -> Report {
        Report::Error(ErrorReport {
            schema: SCHEMA.into(),
            kind: "error".into(),
            message: message.into(),
        })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Report::Fit(_) => "fit",
            Report::Spectrum(_) => "spectrum",
            Report::Truncated(_) => "bessel_truncated",
            Report::Comparison(_) => "comparison",
            Report::Synthetic(_) => "synthetic",
            Report::Error(_) => "error",
        }
    }
}

/// JSON formatter writing every f64 with 17 significant digits.
struct SigFigFormatter;

impl serde_json::ser::Formatter for SigFigFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if !value.is_finite() {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                "non-finite number in report",
            ));
        }
        write!(writer, "{value:.16e}")
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFigFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Report(e.to_string()))?;
    buf.push(b'\n');
    Ok(buf)
}

fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders a report as bytes in the requested format. Deterministic: the
/// same report exports to identical bytes every time.
pub fn export_report(report: &Report, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Json => match report {
            Report::Fit(r) => to_json(r),
            Report::Spectrum(r) => to_json(r),
            Report::Truncated(r) => to_json(r),
            Report::Comparison(r) => to_json(r),
            Report::Synthetic(r) => to_json(r),
            Report::Error(r) => to_json(r),
        },
        ReportFormat::Csv => Ok(match report {
            Report::Fit(r) => {
                let mut out = String::from("q,f_emp,f_fit\n");
                for i in 0..r.points.q.len() {
                    out.push_str(&format!(
                        "{},{},{}\n",
                        f17(r.points.q[i]),
                        f17(r.points.f_emp[i]),
                        f17(r.points.f_fit[i])
                    ));
                }
                out.into_bytes()
            }
            Report::Spectrum(r) => {
                let mut out = String::from("index,energy,nodes,residual,converged\n");
                for l in &r.levels {
                    out.push_str(&format!(
                        "{},{},{},{},{}\n",
                        l.index,
                        f17(l.energy),
                        l.nodes,
                        f17(l.residual),
                        l.converged
                    ));
                }
                out.into_bytes()
            }
            Report::Truncated(r) => {
                let mut out = String::from("k,omega,omega_times_ymax\n");
                for (i, w) in r.omegas.iter().enumerate() {
                    out.push_str(&format!(
                        "{},{},{}\n",
                        i + 1,
                        f17(*w),
                        f17(r.omega_times_ymax[i])
                    ));
                }
                out.into_bytes()
            }
            Report::Comparison(r) => {
                let mut out = String::from(
                    "index,nonlocal,schrodinger,nonlocal_spacing,schrodinger_spacing,spacing_ratio\n",
                );
                for i in 0..r.nonlocal_levels.len() {
                    let sp = |v: &Vec<f64>| {
                        v.get(i).map(|x| f17(*x)).unwrap_or_default()
                    };
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        i,
                        f17(r.nonlocal_levels[i]),
                        f17(r.schrodinger_levels[i]),
                        sp(&r.nonlocal_spacings),
                        sp(&r.schrodinger_spacings),
                        sp(&r.spacing_ratios)
                    ));
                }
                out.into_bytes()
            }
            Report::Synthetic(r) => synthetic_trades_csv(r).into_bytes(),
            Report::Error(r) => format!("error,{}\n", r.message).into_bytes(),
        }),
    }
}

/// Trades CSV (`timestamp,price,volume`) for a synthetic report: one row
/// per grid point with positive mass, directly ingestible by the fit
/// pipeline with a lot size of 1.
fn synthetic_trades_csv(r: &SyntheticReport) -> String {
    let mut out = String::from("timestamp,price,volume\n");
    let mut row = 0i64;
    for (i, &mass) in r.mass.iter().enumerate() {
        if mass <= 0.0 {
            continue;
        }
        out.push_str(&format!(
            "{},{},{}\n",
            SYNTHETIC_SESSION_START_MS + row,
            f17(r.q[i]),
            f17(mass)
        ));
        row += 1;
    }
    out
}

/// Trades CSV for any distribution (used by the synthetic fixtures).
pub fn trades_csv(dist: &Distribution) -> Vec<u8> {
    let mut out = String::from("timestamp,price,volume\n");
    let mut row = 0i64;
    for (&q, &m) in dist.grid().points().iter().zip(dist.masses()) {
        if m <= 0.0 {
            continue;
        }
        out.push_str(&format!(
            "{},{},{}\n",
            SYNTHETIC_SESSION_START_MS + row,
            f17(q),
            f17(m)
        ));
        row += 1;
    }
    out.into_bytes()
}

/// Parses a `probwave/1` JSON report back into its typed form (the
/// `report` subcommand uses this to convert JSON into CSV).
pub fn parse_report_json(bytes: &[u8]) -> Result<Report> {
    let value: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| Error::Report(format!("invalid JSON: {e}")))?;
    let schema = value.get("schema").and_then(|v| v.as_str()).unwrap_or("");
    if schema != SCHEMA {
        return Err(Error::Report(format!(
            "unsupported schema `{schema}`, expected `{SCHEMA}`"
        )));
    }
    let kind = value
        .get("kind")
        .and_then(|v| v.as_str())
        .unwrap_or("")
        .to_string();
    let mk = |e: serde_json::Error| Error::Report(format!("malformed `{kind}` report: {e}"));
    match kind.as_str() {
        "fit" => Ok(Report::Fit(serde_json::from_value(value).map_err(mk)?)),
        "spectrum" => Ok(Report::Spectrum(serde_json::from_value(value).map_err(mk)?)),
        "bessel_truncated" => Ok(Report::Truncated(serde_json::from_value(value).map_err(mk)?)),
        "comparison" => Ok(Report::Comparison(serde_json::from_value(value).map_err(mk)?)),
        "synthetic" => Ok(Report::Synthetic(serde_json::from_value(value).map_err(mk)?)),
        "error" => Ok(Report::Error(serde_json::from_value(value).map_err(mk)?)),
        other => Err(Error::Report(format!("unknown report kind `{other}`"))),
    }
}
