//! End-to-end verification suite.
//!
//! Nine criteria cover the special-function kernels (against independent
//! long-series oracles), the closed-form residuals, both eigensolvers, the
//! fit-recovery and model-selection pipelines, byte determinism, and
//! volume conservation. The `probwave verify` subcommand runs them all and
//! exits zero only when every criterion passes; the `acceptance`
//! integration test target runs the same functions, one test per
//! criterion.

use crate::dataio::{
    build_distribution, export_report, generate_synthetic, Distribution, Report, ReportFormat,
    TradeRecord,
};
use crate::eigensolve::{
    compare_spectra, count_nodes, solve_bessel_truncated, solve_spectrum_nonlocal,
    solve_spectrum_schrodinger, SolverConfig,
};
use crate::fitkit::{fit_model, select_model, FitFamily, FitOptions};
use crate::specfun;
use crate::wavemodel::{
    eigen_energy_kummer, interaction_diagnostic, ode_residual_analytic, EnergySpec, Family,
    FamilyParams, Grid, PotentialSpec, WaveModel,
};
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent reference implementations used only for verification.
/// These deliberately share no code with the production kernels: plain
/// long series with fixed term counts, and exact-integer polynomial
/// coefficients for the terminating Kummer function.
pub mod oracles {
    /// J0 by its ascending power series, 80 terms, no policy switching.
    pub fn j0_series(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 0..80 {
            if k > 0 {
                let kf = k as f64;
                term *= -(x * x) / (4.0 * kf * kf);
            }
            sum += term;
        }
        sum
    }

    /// J1 by its ascending power series, 80 terms.
    pub fn j1_series(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut term = 0.5 * x;
        for k in 0..80 {
            if k > 0 {
                let kf = k as f64;
                term *= -(x * x) / (4.0 * kf * (kf + 1.0));
            }
            sum += term;
        }
        sum
    }

    /// F(-n, 1, x) from exact integer coefficients (-n)_k / (k!)^2,
    /// evaluated by Horner.
    pub fn kummer_exact(n: u32, x: f64) -> f64 {
        let mut coeffs = Vec::with_capacity(n as usize + 1);
        for k in 0..=n {
            let mut num: i128 = 1;
            for j in 0..k {
                num *= j as i128 - n as i128;
            }
            let mut den: i128 = 1;
            for j in 1..=k {
                den *= j as i128;
            }
            coeffs.push(num as f64 / (den as f64 * den as f64));
        }
        let mut acc = 0.0;
        for &c in coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// (Ai, Ai') from Maclaurin coefficient tables built up front and
    /// evaluated by Horner in x^3.
    pub fn airy_series(x: f64) -> (f64, f64) {
        const AI0: f64 = 0.355_028_053_887_817_24;
        const AIP0: f64 = -0.258_819_403_792_806_8;
        const TERMS: usize = 80;
        let mut cf = vec![0.0f64; TERMS]; // f = sum cf_k x^{3k}
        let mut cg = vec![0.0f64; TERMS]; // g = sum cg_k x^{3k+1}
        cf[0] = 1.0;
        cg[0] = 1.0;
        for k in 1..TERMS {
            let kf = k as f64;
            cf[k] = cf[k - 1] / ((3.0 * kf) * (3.0 * kf - 1.0));
            cg[k] = cg[k - 1] / ((3.0 * kf + 1.0) * (3.0 * kf));
        }
        let x3 = x * x * x;
        let horner = |c: &[f64]| {
            let mut acc = 0.0;
            for &v in c.iter().rev() {
                acc = acc * x3 + v;
            }
            acc
        };
        let f = horner(&cf);
        let g = x * horner(&cg);
        // f' = x^2 * sum_{k>=1} 3k cf_k (x^3)^{k-1};
        // g' = sum_{k>=0} (3k+1) cg_k (x^3)^k.
        let cfp: Vec<f64> = (1..TERMS).map(|k| 3.0 * k as f64 * cf[k]).collect();
        let cgp: Vec<f64> = (0..TERMS).map(|k| (3.0 * k as f64 + 1.0) * cg[k]).collect();
        let fp = x * x * horner(&cfp);
        let gp = horner(&cgp);
        (AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp)
    }
}

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}/9] {}  {} — {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

pub const CRITERIA: [(usize, &str); 9] = [
    (1, "special-function oracles"),
    (2, "closed-form residuals"),
    (3, "non-localized spectrum recovery"),
    (4, "two-world spectrum comparison"),
    (5, "truncated-Bessel quantization"),
    (6, "fit recovery"),
    (7, "model selection"),
    (8, "determinism"),
    (9, "pipeline conservation"),
];

/// Runs one criterion by id (1-based).
pub fn run(id: usize) -> CriterionOutcome {
    let (name, result) = match id {
        1 => ("special-function oracles", c1()),
        2 => ("closed-form residuals", c2()),
        3 => ("non-localized spectrum recovery", c3()),
        4 => ("two-world spectrum comparison", c4()),
        5 => ("truncated-Bessel quantization", c5()),
        6 => ("fit recovery", c6()),
        7 => ("model selection", c7()),
        8 => ("determinism", c8()),
        9 => ("pipeline conservation", c9()),
        other => (
            "unknown",
            Ok((false, format!("no criterion with id {other}"))),
        ),
    };
    match result {
        Ok((passed, detail)) => CriterionOutcome {
            id,
            name,
            passed,
            detail,
        },
        Err(e) => CriterionOutcome {
            id,
            name,
            passed: false,
            detail: format!("errored: {e}"),
        },
    }
}

/// Runs the full suite in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    (1..=9).map(run).collect()
}

pub fn all_passed(outcomes: &[CriterionOutcome]) -> bool {
    !outcomes.is_empty() && outcomes.iter().all(|o| o.passed)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

const J0_ZERO_1: f64 = 2.404825557695773;
const J0_ZERO_2: f64 = 5.520078110286311;
const J0_ZERO_3: f64 = 8.653727912911013;
const J1_ZERO_1: f64 = 3.8317059702075123;
const AI_ZERO_1: f64 = -2.338107410459767;

fn c1() -> Result<(bool, String)> {
    let mut worst_j0 = 0.0f64;
    let mut worst_j1 = 0.0f64;
    for x in linspace(-14.0, 14.0, 200) {
        worst_j0 = worst_j0.max((specfun::bessel_j0(x)? - oracles::j0_series(x)).abs());
        worst_j1 = worst_j1.max((specfun::bessel_j1(x)? - oracles::j1_series(x)).abs());
    }
    let mut worst_kummer = 0.0f64;
    for n in 0..10u32 {
        for x in linspace(-6.0, 6.0, 20) {
            worst_kummer =
                worst_kummer.max((specfun::kummer_m(n, x) - oracles::kummer_exact(n, x)).abs());
        }
    }
    let mut worst_airy = 0.0f64;
    for x in linspace(-8.0, 8.0, 200) {
        let (ai, aip) = specfun::airy(x)?;
        let (oa, oap) = oracles::airy_series(x);
        worst_airy = worst_airy.max((ai - oa).abs()).max((aip - oap).abs());
    }
    let z_j0 = specfun::find_root(|x| specfun::bessel_j0(x).unwrap(), 2.0, 3.0, 1e-12)?;
    let z_j1 = specfun::find_root(|x| specfun::bessel_j1(x).unwrap(), 3.0, 4.5, 1e-12)?;
    let z_ai = specfun::find_root(|x| specfun::airy(x).unwrap().0, -3.0, -2.0, 1e-12)?;
    let zeros_ok = (z_j0 - J0_ZERO_1).abs() <= 1e-8
        && (z_j1 - J1_ZERO_1).abs() <= 1e-8
        && (z_ai - AI_ZERO_1).abs() <= 1e-8;
    let passed =
        worst_j0 <= 1e-10 && worst_j1 <= 1e-10 && worst_kummer <= 1e-10 && worst_airy <= 1e-9 && zeros_ok;
    Ok((
        passed,
        format!(
            "max|Δ| J0 {worst_j0:.1e}, J1 {worst_j1:.1e}, Kummer {worst_kummer:.1e}, \
             Airy {worst_airy:.1e}; named zeros within 1e-8: {zeros_ok}"
        ),
    ))
}

fn c2() -> Result<(bool, String)> {
    let mut worst_exact = 0.0f64;
    let mut best_perturbed = f64::INFINITY;
    for n in 0..=5u32 {
        for &a_tt in &[0.25f64, 1.0, 4.0] {
            for &beta in &[0.5f64, 1.0, 2.0] {
                let kappa = (a_tt / beta).sqrt();
                let tick = 30.0 / kappa / 4001.0;
                let grid = Grid::uniform(tick, tick, 4001)?;
                let model = WaveModel::kummer(0.0, a_tt, n, beta)?;
                let pot = PotentialSpec::new(0.0, a_tt)?;
                let e = eigen_energy_kummer(n, a_tt, beta);
                let r = ode_residual_analytic(&model, &grid, &EnergySpec::Constant(e), &pot)?;
                worst_exact = worst_exact.max(r);
                let r_bad =
                    ode_residual_analytic(&model, &grid, &EnergySpec::Constant(1.05 * e), &pot)?;
                best_perturbed = best_perturbed.min(r_bad);
            }
        }
    }
    let mut worst_bessel = 0.0f64;
    for &omega in &[0.5, 1.0, 2.0, 5.0] {
        let tick = 20.0 / 4001.0;
        let grid = Grid::uniform(tick, tick, 4001)?;
        let model = WaveModel::bessel(0.0, omega, 1.0)?;
        let pot = PotentialSpec::new(0.0, 1.0)?;
        let r = ode_residual_analytic(&model, &grid, &EnergySpec::BesselSeparable { omega }, &pot)?;
        worst_bessel = worst_bessel.max(r);
    }
    let passed = worst_exact <= 1e-6 && best_perturbed > 1e-3 && worst_bessel <= 1e-6;
    Ok((
        passed,
        format!(
            "Kummer n=0..5 x 9 (a_tt,beta): max residual {worst_exact:.1e} (<= 1e-6); \
             5%-perturbed min {best_perturbed:.1e} (> 1e-3); Bessel separable max {worst_bessel:.1e}"
        ),
    ))
}

fn c3() -> Result<(bool, String)> {
    let mut worst_rel = 0.0f64;
    let mut nodes_ok = true;
    for &(a_tt, beta) in &[(1.0, 1.0), (4.0, 1.0), (1.0, 4.0)] {
        let pot = PotentialSpec::new(0.0, a_tt)?;
        let cfg = SolverConfig::for_nonlocal(&pot, beta, 3);
        let sols = solve_spectrum_nonlocal(&pot, beta, &cfg)?;
        for (n, sol) in sols.iter().enumerate() {
            let exact = eigen_energy_kummer(n as u32, a_tt, beta);
            worst_rel = worst_rel.max((sol.energy - exact).abs() / exact);
            nodes_ok &= sol.index == n && count_nodes(&sol.psi_samples) == n;
        }
    }
    let passed = worst_rel <= 1e-6 && nodes_ok;
    Ok((
        passed,
        format!(
            "E_n vs (1+2n)sqrt(a_tt*beta) over 3 parameter sets: max rel err {worst_rel:.1e} \
             (<= 1e-6); node counts equal indices: {nodes_ok}"
        ),
    ))
}

fn c4() -> Result<(bool, String)> {
    let z = [
        1.0187929716474715,
        2.3381074104597674,
        3.2481975821798375,
        4.0879494441309706,
    ];
    let mut worst_rel = 0.0f64;
    for &(a_tt, beta_s) in &[(1.0f64, 1.0f64), (8.0, 1.0)] {
        let scale = beta_s.cbrt() * a_tt.powf(2.0 / 3.0);
        let cfg = SolverConfig::for_schrodinger(a_tt, beta_s, 3);
        let sols = solve_spectrum_schrodinger(a_tt, beta_s, &cfg)?;
        for (n, sol) in sols.iter().enumerate() {
            let exact = scale * z[n];
            worst_rel = worst_rel.max((sol.energy - exact).abs() / exact);
        }
    }
    let table = compare_spectra(1.0, 1.0, 1.0, 3)?;
    let spacing = 2.0;
    let uniform = table
        .nonlocal_spacings
        .iter()
        .all(|s| (s - spacing).abs() <= 2e-6);
    let shrinking = table
        .schrodinger_spacings
        .windows(2)
        .all(|w| w[1] < w[0]);
    let passed = worst_rel <= 1e-5 && uniform && shrinking;
    Ok((
        passed,
        format!(
            "Airy-zero spectrum max rel err {worst_rel:.1e} (<= 1e-5); non-localized spacings \
             uniform: {uniform}; Schrödinger spacings strictly decreasing: {shrinking}"
        ),
    ))
}

fn c5() -> Result<(bool, String)> {
    let zeros = [J0_ZERO_1, J0_ZERO_2, J0_ZERO_3];
    let mut worst = 0.0f64;
    for &y_max in &[1.0, 2.0] {
        let cfg = SolverConfig::for_bessel_truncated(y_max);
        let omegas = solve_bessel_truncated((0.5 / y_max, 9.5 / y_max), y_max, &cfg)?;
        if omegas.len() < 3 {
            return Ok((false, format!("found only {} frequencies", omegas.len())));
        }
        for (k, &w) in omegas.iter().take(3).enumerate() {
            worst = worst.max((w * y_max - zeros[k]).abs());
        }
    }
    Ok((
        worst <= 1e-6,
        format!("omega_k * y_max vs first three J0 zeros: max |Δ| {worst:.1e} (<= 1e-6)"),
    ))
}

fn bessel_fixture(seed: u64) -> Result<Distribution> {
    let grid = Grid::uniform(97.5, 0.01, 501)?;
    let model = WaveModel::bessel(100.0, 2.0, 1.0)?;
    generate_synthetic(&model, &grid, 100_000, seed)
}

fn kummer_fixture(seed: u64) -> Result<Distribution> {
    let grid = Grid::uniform(97.5, 0.01, 501)?;
    let model = WaveModel::kummer(100.0, 1.0, 0, 1.0)?;
    generate_synthetic(&model, &grid, 100_000, seed)
}

fn c6() -> Result<(bool, String)> {
    let mut bessel_hits = 0;
    for seed in 0..20u64 {
        let dist = bessel_fixture(seed)?;
        let opts = FitOptions {
            seed,
            ..FitOptions::default()
        };
        let fit = fit_model(&dist, FitFamily::BesselJ0, &opts)?;
        let omega = match fit.model.params {
            FamilyParams::BesselJ0 { omega } => omega,
            _ => continue,
        };
        if (omega - 2.0).abs() / 2.0 <= 0.02 && (fit.model.q0 - 100.0).abs() <= 0.01 + 1e-9 {
            bessel_hits += 1;
        }
    }
    let mut kummer_hits = 0;
    for seed in 0..20u64 {
        let dist = kummer_fixture(seed)?;
        let opts = FitOptions {
            seed,
            ..FitOptions::default()
        };
        let fit = fit_model(&dist, FitFamily::Kummer(0), &opts)?;
        let a_tt = match fit.model.params {
            FamilyParams::Kummer { a_tt, .. } => a_tt,
            _ => continue,
        };
        if (a_tt - 1.0).abs() <= 0.05 {
            kummer_hits += 1;
        }
    }
    let passed = bessel_hits >= 19 && kummer_hits >= 19;
    Ok((
        passed,
        format!(
            "Bessel omega within 2% and q0 within one tick: {bessel_hits}/20 (need >= 19); \
             Kummer a_tt within 5%: {kummer_hits}/20 (need >= 19)"
        ),
    ))
}

fn c7() -> Result<(bool, String)> {
    let mut bessel_wins = 0;
    let mut kummer_wins = 0;
    for seed in 0..100u64 {
        let opts = FitOptions {
            seed,
            ..FitOptions::default()
        };
        let ranked = select_model(&bessel_fixture(seed)?, &opts)?;
        if ranked[0].model.family() == Family::BesselJ0 {
            bessel_wins += 1;
        }
        let ranked2 = select_model(&kummer_fixture(seed)?, &opts)?;
        if ranked2[0].model.family() == Family::Kummer {
            kummer_wins += 1;
        }
    }
    let passed = bessel_wins >= 95 && kummer_wins >= 95;
    Ok((
        passed,
        format!(
            "AIC rank 1 is the generating family: Bessel {bessel_wins}/100, \
             Kummer {kummer_wins}/100 (need >= 95 each)"
        ),
    ))
}

fn solve_pipeline_bytes() -> Result<Vec<u8>> {
    let pot = PotentialSpec::new(0.0, 1.0)?;
    let cfg = SolverConfig::for_nonlocal(&pot, 1.0, 3);
    let sols = solve_spectrum_nonlocal(&pot, 1.0, &cfg)?;
    let report = Report::from_spectrum("nonlocal", 1.0, Some(1.0), None, &cfg, &sols);
    export_report(&report, ReportFormat::Json)
}

fn fit_pipeline_bytes(seed: u64) -> Result<Vec<u8>> {
    let dist = bessel_fixture(seed)?;
    let opts = FitOptions {
        seed,
        ..FitOptions::default()
    };
    let ranked = select_model(&dist, &opts)?;
    let report = Report::from_fit(&dist, &ranked, seed)?;
    export_report(&report, ReportFormat::Json)
}

fn c8() -> Result<(bool, String)> {
    let solve_a = solve_pipeline_bytes()?;
    let solve_b = solve_pipeline_bytes()?;
    let fit_a = fit_pipeline_bytes(42)?;
    let fit_b = fit_pipeline_bytes(42)?;
    let serial_pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| crate::Error::Fit(e.to_string()))?;
    let fit_serial = serial_pool.install(|| fit_pipeline_bytes(42))?;
    let repeat_ok = solve_a == solve_b && fit_a == fit_b;
    let parallel_ok = fit_a == fit_serial;
    Ok((
        repeat_ok && parallel_ok,
        format!(
            "equal-seed reruns byte-identical: {repeat_ok}; serial vs parallel fit \
             byte-identical: {parallel_ok} ({} bytes)",
            fit_a.len()
        ),
    ))
}

fn c9() -> Result<(bool, String)> {
    // 1.2e5 generated trades, 1e5 of them inside the window.
    let grid = Grid::uniform(97.5, 0.01, 501)?;
    let model = WaveModel::bessel(100.0, 2.0, 1.0)?.normalized(&grid)?;
    let mut cdf = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    for &q in grid.points() {
        acc += model.density(q);
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let trades: Vec<TradeRecord> = (0..120_000i64)
        .map(|i| {
            let u: f64 = rng.gen::<f64>() * acc;
            let idx = cdf.partition_point(|&c| c <= u).min(grid.len() - 1);
            TradeRecord {
                timestamp_ms: i,
                price: grid.points()[idx],
                volume: 100.0,
            }
        })
        .collect();
    let window = (0i64, 100_000i64);
    let dist = build_distribution(&trades, window, 0.01)?;
    let direct: f64 = trades
        .iter()
        .filter(|t| t.timestamp_ms >= window.0 && t.timestamp_ms < window.1)
        .map(|t| t.volume)
        .sum();
    let conserved = dist.total() == direct;
    let diag = interaction_diagnostic(&dist, &model)?;
    let diag_ok = diag.constant_name == "omega_sq"
        && (diag.constant - 4.0).abs() < 1e-12
        && diag.s.len() == dist.grid().len()
        && diag.s_cv > 0.0
        && !diag.note.is_empty();
    Ok((
        conserved && diag_ok,
        format!(
            "in-window volume {direct} preserved exactly: {conserved}; diagnostic reports \
             omega^2 = {}, cv(s) = {:.3} with dispersion note: {diag_ok}",
            diag.constant, diag.s_cv
        ),
    ))
}
