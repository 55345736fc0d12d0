//! Trade ingestion, windowed volume-price distributions, synthetic data
//! generation, and machine-readable report export.
//!
//! Input CSV format: header `timestamp,price,volume`, UTF-8, comma
//! separated, no quoting. Timestamps are ISO-8601 (naive, venue-local) or
//! epoch milliseconds; volume is in lots and converted by the lot size on
//! ingestion. Time windows are half-open `[start, end)` so adjacent windows
//! compose without double counting.

mod report;

pub use report::{
    export_report, parse_report_json, trades_csv, ComparisonReport, ConservationSection,
    ErrorReport, FitEntry, FitPoints, FitReport, LevelEntry, Report, ReportFormat, SpectrumReport,
    SyntheticReport, TruncatedReport, SCHEMA,
};

use crate::wavemodel::{Grid, WaveModel};
use crate::{Error, Result};
use chrono::NaiveDateTime;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Read;

/// One trade event after lot conversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeRecord {
    /// Naive venue-local instant, milliseconds.
    pub timestamp_ms: i64,
    pub price: f64,
    /// Shares (lots times lot size).
    pub volume: f64,
}

fn parse_timestamp(s: &str) -> Option<i64> {
    let s = s.trim();
    if let Ok(ms) = s.parse::<i64>() {
        return Some(ms);
    }
    let s = s.strip_suffix('Z').unwrap_or(s);
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(dt.and_utc().timestamp_millis());
        }
    }
    None
}

/// Parses a `timestamp,price,volume` CSV stream, multiplying volumes by
/// `lot_size`. Rejects nothing silently: every malformed row is an error
/// carrying its 1-based line number (the header is line 1).
pub fn parse_trades<R: Read>(mut source: R, lot_size: f64) -> Result<Vec<TradeRecord>> {
    if !(lot_size > 0.0) || !lot_size.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "lot_size = {lot_size}, need > 0"
        )));
    }
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        message: "empty input, expected header `timestamp,price,volume`".into(),
    })?;
    let header = header.trim_start_matches('\u{feff}').trim();
    if header != "timestamp,price,volume" {
        return Err(Error::Parse {
            line: 1,
            message: format!("bad header `{header}`, expected `timestamp,price,volume`"),
        });
    }
    let mut records = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1; // 1-based, header included
        if raw.trim().is_empty() {
            continue;
        }
        let mut fields = raw.split(',');
        let (ts, price, volume) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 3 fields, got `{raw}`"),
                })
            }
        };
        if fields.next().is_some() {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 fields, got `{raw}`"),
            });
        }
        let timestamp_ms = parse_timestamp(ts).ok_or_else(|| Error::Parse {
            line,
            message: format!("invalid timestamp `{}`", ts.trim()),
        })?;
        let price: f64 = price.trim().parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid price `{}`", price.trim()),
        })?;
        let volume: f64 = volume.trim().parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid volume `{}`", volume.trim()),
        })?;
        if !(price > 0.0) || !price.is_finite() {
            return Err(Error::Parse {
                line,
                message: format!("non-positive price {price}"),
            });
        }
        if !(volume > 0.0) || !volume.is_finite() {
            return Err(Error::Parse {
                line,
                message: format!("non-positive volume {volume}"),
            });
        }
        records.push(TradeRecord {
            timestamp_ms,
            price,
            volume: volume * lot_size,
        });
    }
    Ok(records)
}

/// Cumulative observable per grid point inside a time window.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    grid: Grid,
    masses: Vec<f64>,
    total: f64,
    window: (i64, i64),
    t: f64,
}

impl Distribution {
    /// Validates alignment, non-negative finite masses with at least one
    /// positive, and a positive window length.
    pub fn new(grid: Grid, masses: Vec<f64>, window: (i64, i64), t: f64) -> Result<Self> {
        if masses.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} masses for {} grid points",
                masses.len(),
                grid.len()
            )));
        }
        if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::InvalidArgument(
                "masses must be finite and non-negative".into(),
            ));
        }
        let total: f64 = masses.iter().sum();
        if !(total > 0.0) {
            return Err(Error::EmptyDistribution);
        }
        if window.0 >= window.1 {
            return Err(Error::InvalidArgument(format!(
                "window start {} not before end {}",
                window.0, window.1
            )));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!("t = {t}, need > 0")));
        }
        Ok(Self {
            grid,
            masses,
            total,
            window,
            t,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn window(&self) -> (i64, i64) {
        self.window
    }

    /// Window length in the chosen time units (defaults to 1).
    pub fn t(&self) -> f64 {
        self.t
    }

    /// Relative frequencies f_i = m_i / M.
    pub fn frequencies(&self) -> Vec<f64> {
        self.masses.iter().map(|m| m / self.total).collect()
    }

    /// Grid index of maximal cumulative mass (first occurrence on ties).
    pub fn peak_index(&self) -> usize {
        let mut best = 0;
        for i in 1..self.masses.len() {
            if self.masses[i] > self.masses[best] {
                best = i;
            }
        }
        best
    }

    /// Price of maximal cumulative mass; the equilibrium-point initializer
    /// consumed by the fit pipeline.
    pub fn peak_price(&self) -> f64 {
        self.grid.points()[self.peak_index()]
    }
}

/// Bins trades inside the half-open window `[start, end)` by price rounded
/// to the nearest tick. The grid spans the observed bin range with interior
/// zero-mass bins materialized; `t` defaults to 1.
pub fn build_distribution(
    trades: &[TradeRecord],
    window: (i64, i64),
    tick: f64,
) -> Result<Distribution> {
    if !(tick > 0.0) || !tick.is_finite() {
        return Err(Error::InvalidArgument(format!("tick = {tick}, need > 0")));
    }
    let (start, end) = window;
    if start >= end {
        return Err(Error::InvalidArgument(format!(
            "window start {start} not before end {end}"
        )));
    }
    let in_window: Vec<&TradeRecord> = trades
        .iter()
        .filter(|t| t.timestamp_ms >= start && t.timestamp_ms < end)
        .collect();
    if in_window.is_empty() {
        return Err(Error::EmptyWindow {
            start_ms: start,
            end_ms: end,
        });
    }
    let bin = |p: f64| -> i64 { (p / tick).round() as i64 };
    let k_min = in_window.iter().map(|t| bin(t.price)).min().unwrap();
    let k_max = in_window.iter().map(|t| bin(t.price)).max().unwrap();
    let len = (k_max - k_min + 1) as usize;
    if len < 2 {
        return Err(Error::DegenerateSupport(
            "window contains a single price level".into(),
        ));
    }
    if len > 10_000_000 {
        return Err(Error::InvalidArgument(format!(
            "{len} bins from tick {tick}; tick too small for the price span"
        )));
    }
    let mut masses = vec![0.0f64; len];
    for t in &in_window {
        masses[(bin(t.price) - k_min) as usize] += t.volume;
    }
    let points: Vec<f64> = (k_min..=k_max).map(|k| k as f64 * tick).collect();
    Distribution::new(Grid::new(points)?, masses, window, 1.0)
}

/// Infers the venue tick as the GCD-like minimal positive difference of the
/// observed prices. Irregular prices (differences that are not near-integer
/// multiples of the candidate) are an error, not a guess.
pub fn infer_tick(prices: &[f64]) -> Result<f64> {
    let mut sorted: Vec<f64> = prices.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted.dedup();
    let diffs: Vec<f64> = sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d > 1e-12)
        .collect();
    if diffs.is_empty() {
        return Err(Error::TickInference(
            "need at least two distinct prices".into(),
        ));
    }
    let candidate = diffs.iter().cloned().fold(f64::INFINITY, f64::min);
    for &d in &diffs {
        let k = (d / candidate).round();
        if k < 1.0 || (d - k * candidate).abs() > 1e-6 * candidate {
            return Err(Error::TickInference(format!(
                "difference {d} is not a multiple of the candidate tick {candidate}"
            )));
        }
    }
    Ok(candidate)
}

/// Draws `n_samples` categorical samples over the grid with probabilities
/// equal to the model's normalized discrete density; masses are counts.
/// Deterministic given the seed.
pub fn generate_synthetic(
    model: &WaveModel,
    grid: &Grid,
    n_samples: u64,
    seed: u64,
) -> Result<Distribution> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be positive".into()));
    }
    let normalized = model.normalized(grid)?;
    let mut cdf = Vec::with_capacity(grid.len());
    let mut acc = 0.0f64;
    for &q in grid.points() {
        acc += normalized.density(q);
        cdf.push(acc);
    }
    let total_p = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut masses = vec![0.0f64; grid.len()];
    let last = grid.len() - 1;
    for _ in 0..n_samples {
        let u: f64 = rng.gen::<f64>() * total_p;
        let idx = cdf.partition_point(|&c| c <= u).min(last);
        masses[idx] += 1.0;
    }
    Distribution::new(grid.clone(), masses, (0, 1), 1.0)
}
