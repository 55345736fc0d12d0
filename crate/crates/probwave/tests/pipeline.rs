//! Cross-module flows through the public API: model -> synthetic trades ->
//! ingestion -> binning -> selection -> report, plus the spectrum solvers
//! feeding the comparison report.

use probwave::dataio::{
    build_distribution, export_report, generate_synthetic, parse_report_json, parse_trades,
    trades_csv, Report, ReportFormat,
};
use probwave::eigensolve::{compare_spectra, solve_spectrum_nonlocal, SolverConfig};
use probwave::fitkit::{select_model, FitOptions};
use probwave::wavemodel::{interaction_diagnostic, Family, Grid, PotentialSpec, WaveModel};

#[test]
fn synthetic_round_trip_recovers_the_generating_model() {
    let grid = Grid::uniform(97.5, 0.01, 501).unwrap();
    let model = WaveModel::bessel(100.0, 2.0, 1.0).unwrap();
    let dist = generate_synthetic(&model, &grid, 100_000, 17).unwrap();

    // Serialize as a trades file and ingest it back like a user would.
    let csv = trades_csv(&dist);
    let trades = parse_trades(csv.as_slice(), 1.0).unwrap();
    let window = (
        trades.iter().map(|t| t.timestamp_ms).min().unwrap(),
        trades.iter().map(|t| t.timestamp_ms).max().unwrap() + 1,
    );
    let rebuilt = build_distribution(&trades, window, 0.01).unwrap();
    assert_eq!(rebuilt.total(), dist.total());
    // Grid points are rebuilt as k * tick, which can differ from the
    // original start + i * tick construction in the last ulp.
    assert!((rebuilt.peak_price() - dist.peak_price()).abs() < 0.005);

    let opts = FitOptions {
        seed: 17,
        ..FitOptions::default()
    };
    let ranked = select_model(&rebuilt, &opts).unwrap();
    assert_eq!(ranked[0].model.family(), Family::BesselJ0);
    assert!((ranked[0].model.q0 - 100.0).abs() < 0.02);

    let report = Report::from_fit(&rebuilt, &ranked, 17).unwrap();
    let json = export_report(&report, ReportFormat::Json).unwrap();
    let parsed = parse_report_json(&json).unwrap();
    assert_eq!(export_report(&parsed, ReportFormat::Json).unwrap(), json);
}

#[test]
fn diagnostic_follows_the_fitted_model() {
    let grid = Grid::uniform(-2.0, 0.01, 401).unwrap();
    let model = WaveModel::kummer(0.0, 1.5, 0, 1.0).unwrap();
    let dist = generate_synthetic(&model, &grid, 50_000, 4).unwrap();
    let diag = interaction_diagnostic(&dist, &model).unwrap();
    assert_eq!(diag.constant_name, "a_tt");
    assert_eq!(diag.constant, 1.5);
    assert_eq!(diag.s.len(), 401);
    assert!(diag.s_min <= diag.s_max);
    assert!(diag.s_cv > 0.0);
}

#[test]
fn spectrum_feeds_the_comparison_report() {
    let pot = PotentialSpec::new(0.0, 1.0).unwrap();
    let cfg = SolverConfig::for_nonlocal(&pot, 1.0, 2);
    let sols = solve_spectrum_nonlocal(&pot, 1.0, &cfg).unwrap();
    let spectrum = Report::from_spectrum("nonlocal", 1.0, Some(1.0), None, &cfg, &sols);
    let csv = export_report(&spectrum, ReportFormat::Csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().count(), sols.len() + 1);

    let table = compare_spectra(1.0, 1.0, 1.0, 2).unwrap();
    let report = Report::from_comparison(1.0, 1.0, 1.0, &table);
    let json = export_report(&report, ReportFormat::Json).unwrap();
    let parsed = parse_report_json(&json).unwrap();
    assert_eq!(parsed.kind(), "comparison");
}
