//! Nonlinear least-squares fitting of wave models to empirical
//! distributions, goodness-of-fit scoring, and AIC model selection.
//!
//! The objective is unweighted least squares on relative frequencies
//! `f_i = m_i / M` against the model density, with the normalization
//! constant re-derived on the data grid at every evaluation. The optimizer
//! is a derivative-free simplex over `(q0, ln shape)` — the objective has
//! ripples in omega from the Bessel oscillations, so several log-spaced
//! starts are run and the best kept. Everything is deterministic given the
//! seed, including under multi-start parallelism.

use crate::dataio::Distribution;
use crate::specfun;
use crate::wavemodel::{Family, FamilyParams, WaveModel};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const J0_FIRST_ZERO: f64 = 2.404825557695773;

/// One fit candidate: a family tag plus the Kummer order when applicable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitFamily {
    BesselJ0,
    Kummer(u32),
}

impl FitFamily {
    pub fn family(&self) -> Family {
        match self {
            FitFamily::BesselJ0 => Family::BesselJ0,
            FitFamily::Kummer(_) => Family::Kummer,
        }
    }
}

/// Options shared by `fit_model` and `select_model`.
#[derive(Debug, Clone)]
pub struct FitOptions {
    /// Families considered by `select_model`, in enumeration order.
    pub families: Vec<Family>,
    /// Highest Kummer order scanned by `select_model`.
    pub n_scan_max: u32,
    /// Multi-start count per candidate.
    pub starts: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Simplex diameter tolerance (relative to coordinate magnitude).
    pub x_tol: f64,
    /// Objective spread tolerance (relative to the best value).
    pub f_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            families: vec![Family::BesselJ0, Family::Kummer],
            n_scan_max: 3,
            starts: 8,
            seed: 0,
            max_iters: 300,
            x_tol: 1e-8,
            f_tol: 1e-12,
        }
    }
}

impl FitOptions {
    fn validate(&self) -> Result<()> {
        if self.starts < 1 {
            return Err(Error::InvalidArgument("starts must be at least 1".into()));
        }
        if !(self.x_tol > 0.0) || !(self.f_tol > 0.0) {
            return Err(Error::InvalidArgument(
                "x_tol and f_tol must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A fitted model with its goodness-of-fit statistics.
#[derive(Debug, Clone)]
pub struct FitResult {
    /// Fitted model, normalized on the data grid.
    pub model: WaveModel,
    pub sse: f64,
    pub r2: f64,
    pub chi2: f64,
    pub aic: f64,
    pub n_params: usize,
    pub starts_tried: usize,
    pub converged: bool,
}

/// AIC convention used everywhere: `n_obs * ln(sse / n_obs) + 2 * n_params`.
/// Only differences matter for ranking.
pub fn aic(sse: f64, n_obs: usize, n_params: usize) -> f64 {
    let k = n_obs as f64;
    k * (sse.max(1e-300) / k).ln() + 2.0 * n_params as f64
}

fn check_support(dist: &Distribution) -> Result<()> {
    if dist.grid().len() < 8 {
        return Err(Error::DegenerateSupport(format!(
            "{} grid points, need at least 8",
            dist.grid().len()
        )));
    }
    if !(dist.total() > 0.0) {
        return Err(Error::DegenerateSupport("zero total mass".into()));
    }
    let positive = dist.masses().iter().filter(|&&m| m > 0.0).count();
    if positive < 2 {
        return Err(Error::DegenerateSupport(
            "mass concentrated at a single price".into(),
        ));
    }
    Ok(())
}

/// Objective: unnormalized family density over the grid, renormalized, then
/// sum of squared deviations from the empirical frequencies. Invalid
/// parameter regions evaluate to a large penalty so the simplex backs off.
fn objective(points: &[f64], freq: &[f64], family: FitFamily, q0: f64, ln_shape: f64) -> f64 {
    const PENALTY: f64 = 1e30;
    let shape = ln_shape.exp();
    if !shape.is_finite() || shape <= 0.0 || !q0.is_finite() {
        return PENALTY;
    }
    let mut dens = Vec::with_capacity(points.len());
    let mut sum = 0.0;
    match family {
        FitFamily::BesselJ0 => {
            for &q in points {
                let psi = specfun::j0(shape * (q - q0));
                let d = psi * psi;
                dens.push(d);
                sum += d;
            }
        }
        FitFamily::Kummer(n) => {
            let kappa = shape.sqrt(); // beta = 1
            for &q in points {
                let ay = (q - q0).abs();
                let psi = (-kappa * ay).exp() * specfun::kummer_m(n, 2.0 * kappa * ay);
                let d = psi * psi;
                dens.push(d);
                sum += d;
            }
        }
    }
    if !(sum > 0.0) || !sum.is_finite() {
        return PENALTY;
    }
    let mut sse = 0.0;
    for (d, &f) in dens.iter().zip(freq) {
        let r = f - d / sum;
        sse += r * r;
    }
    sse
}

/// Deterministic initial points `(q0, shape)` for the multi-start search.
///
/// The first start puts `q0` at the mass peak and derives the shape from
/// the smoothed profile: the first dip away from the peak for the Bessel
/// frequency (omega ~ j01 / dip distance), the 1/e^2 falloff distance for
/// the Kummer decay. Remaining starts perturb the shape by log-spaced
/// factors and jitter `q0` by up to two ticks.
pub fn initial_starts(
    dist: &Distribution,
    family: FitFamily,
    opts: &FitOptions,
) -> Result<Vec<(f64, f64)>> {
    opts.validate()?;
    check_support(dist)?;
    let grid = dist.grid();
    let points = grid.points();
    let masses = dist.masses();
    let peak_idx = dist.peak_index();
    let q0_hat = points[peak_idx];
    let smooth = moving_average(masses, 7);
    let span = grid.last() - grid.first();
    let tick = grid.tick();

    let dist_char = match family {
        FitFamily::BesselJ0 => dip_distance(&smooth, peak_idx, tick),
        FitFamily::Kummer(_) => drop_distance(&smooth, peak_idx, tick, (-2.0f64).exp()),
    }
    .unwrap_or(span / 3.0);

    let shape_hat = match family {
        FitFamily::BesselJ0 => J0_FIRST_ZERO / dist_char,
        FitFamily::Kummer(_) => {
            let kappa = 1.0 / dist_char;
            kappa * kappa
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let factors = [1.0, 0.5, 2.0, 0.25, 4.0, 0.125, 8.0, 0.0625];
    let mut starts = Vec::with_capacity(opts.starts);
    for j in 0..opts.starts {
        let factor = factors[j % factors.len()] * (2.0f64).powi((j / factors.len()) as i32 * 4);
        let jitter = if j == 0 {
            0.0
        } else {
            (rng.gen::<f64>() * 2.0 - 1.0) * 2.0 * tick
        };
        starts.push((q0_hat + jitter, shape_hat * factor));
    }
    Ok(starts)
}

fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    let n = values.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// Distance from the peak to the first local minimum of the smoothed
/// profile in either direction (nearest wins).
fn dip_distance(smooth: &[f64], peak: usize, tick: f64) -> Option<f64> {
    let peak_v = smooth[peak];
    let n = smooth.len();
    let mut best: Option<usize> = None;
    // rightward
    for i in (peak + 1)..n.saturating_sub(1) {
        if smooth[i] < 0.4 * peak_v && smooth[i + 1] > smooth[i] {
            best = Some(i - peak);
            break;
        }
    }
    // leftward
    for i in (1..peak).rev() {
        if smooth[i] < 0.4 * peak_v && smooth[i - 1] > smooth[i] {
            let d = peak - i;
            best = Some(best.map_or(d, |b| b.min(d)));
            break;
        }
    }
    best.map(|steps| steps as f64 * tick)
}

/// Distance from the peak at which the smoothed profile first falls below
/// `frac` of the peak value.
fn drop_distance(smooth: &[f64], peak: usize, tick: f64, frac: f64) -> Option<f64> {
    let target = frac * smooth[peak];
    let mut best: Option<usize> = smooth[peak + 1..]
        .iter()
        .position(|&s| s < target)
        .map(|offset| offset + 1);
    if let Some(offset) = smooth[..peak].iter().rev().position(|&s| s < target) {
        let d = offset + 1;
        best = Some(best.map_or(d, |b| b.min(d)));
    }
    best.map(|steps| steps as f64 * tick)
}

#[derive(Debug, Clone, Copy)]
struct SimplexOutcome {
    x: [f64; 2],
    f: f64,
    converged: bool,
}

/// Two-parameter Nelder-Mead with the classic coefficients (reflection 1,
/// expansion 2, contraction 0.5, shrink 0.5). Fully deterministic.
fn nelder_mead<F: Fn(f64, f64) -> f64>(
    f: &F,
    x0: [f64; 2],
    step: [f64; 2],
    max_iters: usize,
    x_tol: f64,
    f_tol: f64,
) -> SimplexOutcome {
    let mut pts = [
        x0,
        [x0[0] + step[0], x0[1]],
        [x0[0], x0[1] + step[1]],
    ];
    let mut fv = [
        f(pts[0][0], pts[0][1]),
        f(pts[1][0], pts[1][1]),
        f(pts[2][0], pts[2][1]),
    ];
    let mut converged = false;
    for _ in 0..max_iters {
        // order: best (b), middle (m), worst (w)
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| fv[a].partial_cmp(&fv[b]).unwrap().then(a.cmp(&b)));
        let (b, m, w) = (idx[0], idx[1], idx[2]);

        let scale = pts[b][0].abs().max(pts[b][1].abs()).max(1.0);
        let diam = simplex_diameter(&pts);
        let spread = fv[w] - fv[b];
        if diam <= x_tol * scale || spread <= f_tol * fv[b].abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }

        let c = [
            0.5 * (pts[b][0] + pts[m][0]),
            0.5 * (pts[b][1] + pts[m][1]),
        ];
        let xr = [2.0 * c[0] - pts[w][0], 2.0 * c[1] - pts[w][1]];
        let fr = f(xr[0], xr[1]);
        if fr < fv[b] {
            let xe = [3.0 * c[0] - 2.0 * pts[w][0], 3.0 * c[1] - 2.0 * pts[w][1]];
            let fe = f(xe[0], xe[1]);
            if fe < fr {
                pts[w] = xe;
                fv[w] = fe;
            } else {
                pts[w] = xr;
                fv[w] = fr;
            }
        } else if fr < fv[m] {
            pts[w] = xr;
            fv[w] = fr;
        } else {
            let (xc, fc) = if fr < fv[w] {
                let xc = [c[0] + 0.5 * (xr[0] - c[0]), c[1] + 0.5 * (xr[1] - c[1])];
                (xc, f(xc[0], xc[1]))
            } else {
                let xc = [c[0] + 0.5 * (pts[w][0] - c[0]), c[1] + 0.5 * (pts[w][1] - c[1])];
                (xc, f(xc[0], xc[1]))
            };
            if fc < fv[w].min(fr) {
                pts[w] = xc;
                fv[w] = fc;
            } else {
                for i in 0..3 {
                    if i == b {
                        continue;
                    }
                    pts[i] = [
                        pts[b][0] + 0.5 * (pts[i][0] - pts[b][0]),
                        pts[b][1] + 0.5 * (pts[i][1] - pts[b][1]),
                    ];
                    fv[i] = f(pts[i][0], pts[i][1]);
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..3 {
        if fv[i] < fv[best] {
            best = i;
        }
    }
    SimplexOutcome {
        x: pts[best],
        f: fv[best],
        converged,
    }
}

fn simplex_diameter(pts: &[[f64; 2]; 3]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let dx = pts[i][0] - pts[j][0];
            let dy = pts[i][1] - pts[j][1];
            d = d.max((dx * dx + dy * dy).sqrt());
        }
    }
    d
}

/// Fits one family to a distribution by multi-start simplex descent.
///
/// Minimizes the least-squares objective over `(q0, omega)` or
/// `(q0, a_tt)` with beta fixed at 1 and the normalization re-derived at
/// every evaluation. Returns the best start; when no start converged the
/// result carries `converged = false` rather than an error.
pub fn fit_model(dist: &Distribution, family: FitFamily, opts: &FitOptions) -> Result<FitResult> {
    opts.validate()?;
    check_support(dist)?;
    let grid = dist.grid();
    let points = grid.points().to_vec();
    let freq = dist.frequencies();
    let starts = initial_starts(dist, family, opts)?;
    let step_q0 = (grid.last() - grid.first()) / 20.0;

    let outcomes: Vec<SimplexOutcome> = starts
        .par_iter()
        .map(|&(q0, shape)| {
            let obj = |a: f64, b: f64| objective(&points, &freq, family, a, b);
            nelder_mead(
                &obj,
                [q0, shape.ln()],
                [step_q0, 0.35],
                opts.max_iters,
                opts.x_tol,
                opts.f_tol,
            )
        })
        .collect();

    let mut best = 0;
    for i in 1..outcomes.len() {
        if outcomes[i].f < outcomes[best].f {
            best = i;
        }
    }
    let winner = outcomes[best];
    let q0 = winner.x[0];
    let shape = winner.x[1].exp();
    if !q0.is_finite() || !shape.is_finite() || shape <= 0.0 {
        return Err(Error::Fit(format!(
            "optimizer left the valid domain (q0 = {q0}, shape = {shape})"
        )));
    }
    let model = match family {
        FitFamily::BesselJ0 => WaveModel::bessel(q0, shape, 1.0)?,
        FitFamily::Kummer(n) => WaveModel::kummer(q0, shape, n, 1.0)?,
    }
    .normalized(grid)?;
    let (sse, r2, chi2) = goodness_of_fit(dist, &model)?;
    Ok(FitResult {
        model,
        sse,
        r2,
        chi2,
        aic: aic(sse, grid.len(), 3),
        n_params: 3,
        starts_tried: starts.len(),
        converged: outcomes.iter().any(|o| o.converged),
    })
}

/// Goodness-of-fit triple `(sse, r2, chi2)` for a model on the
/// distribution's own grid.
///
/// `r2` compares against the constant predictor (the mean frequency);
/// `chi2` pools bins whose expected count is below 5 into a single cell.
pub fn goodness_of_fit(dist: &Distribution, model: &WaveModel) -> Result<(f64, f64, f64)> {
    let grid = dist.grid();
    let freq = dist.frequencies();
    let total = dist.total();
    let dens: Vec<f64> = grid.points().iter().map(|&q| model.density(q)).collect();
    let expected_total: f64 = dens.iter().sum::<f64>() * total;
    if !(expected_total > 0.0) {
        return Err(Error::DegenerateDensity);
    }
    let mut sse = 0.0;
    for (&d, &f) in dens.iter().zip(freq.iter()) {
        let r = f - d;
        sse += r * r;
    }
    let mean = freq.iter().sum::<f64>() / freq.len() as f64;
    let ss_tot: f64 = freq.iter().map(|&f| (f - mean) * (f - mean)).sum();
    let r2 = if ss_tot > 0.0 {
        1.0 - sse / ss_tot
    } else if sse == 0.0 {
        1.0
    } else {
        0.0
    };
    let mut chi2 = 0.0;
    let mut pool_obs = 0.0;
    let mut pool_exp = 0.0;
    for (&d, &m) in dens.iter().zip(dist.masses().iter()) {
        let e = total * d;
        if e >= 5.0 {
            let r = m - e;
            chi2 += r * r / e;
        } else {
            pool_obs += m;
            pool_exp += e;
        }
    }
    if pool_obs > 0.0 || pool_exp > 0.0 {
        let r = pool_obs - pool_exp;
        chi2 += r * r / pool_exp.max(1e-12);
    }
    Ok((sse, r2, chi2))
}

fn family_rank(r: &FitResult) -> u8 {
    match r.model.family() {
        Family::BesselJ0 => 0,
        Family::Kummer => 1,
    }
}

fn kummer_order(r: &FitResult) -> u32 {
    match r.model.params {
        FamilyParams::Kummer { n, .. } => n,
        FamilyParams::BesselJ0 { .. } => 0,
    }
}

/// True when `a` should be ranked ahead of `b`: lower AIC wins outright
/// beyond 2.0 units; within that window, fewer parameters win, then the
/// lower family enumeration order, then the lower Kummer order.
fn ranks_ahead(a: &FitResult, b: &FitResult) -> bool {
    if (a.aic - b.aic).abs() <= 2.0 {
        let ka = (a.n_params, family_rank(a), kummer_order(a));
        let kb = (b.n_params, family_rank(b), kummer_order(b));
        if ka != kb {
            return ka < kb;
        }
        a.aic < b.aic
    } else {
        a.aic < b.aic
    }
}

/// Stable deterministic ranking pass (insertion order by `ranks_ahead`).
pub fn rank_results(results: &mut [FitResult]) {
    for i in 1..results.len() {
        let mut j = i;
        while j > 0 && ranks_ahead(&results[j], &results[j - 1]) {
            results.swap(j, j - 1);
            j -= 1;
        }
    }
}

/// Fits every requested family (Kummer scanned over n = 0..n_scan_max) and
/// returns the candidates ranked by AIC with the parsimony tie rule.
/// Scanned Kummer fits count the order as a fourth parameter.
pub fn select_model(dist: &Distribution, opts: &FitOptions) -> Result<Vec<FitResult>> {
    opts.validate()?;
    let mut jobs: Vec<FitFamily> = Vec::new();
    let mut seen = Vec::new();
    for family in &opts.families {
        if seen.contains(family) {
            continue;
        }
        seen.push(*family);
        match family {
            Family::BesselJ0 => jobs.push(FitFamily::BesselJ0),
            Family::Kummer => {
                for n in 0..=opts.n_scan_max {
                    jobs.push(FitFamily::Kummer(n));
                }
            }
        }
    }
    if jobs.len() < 2 {
        return Err(Error::InvalidArgument(
            "model selection needs at least two candidates".into(),
        ));
    }
    let mut results = Vec::with_capacity(jobs.len());
    for (slot, job) in jobs.iter().enumerate() {
        let seeded = FitOptions {
            seed: opts
                .seed
                .wrapping_add((slot as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            ..opts.clone()
        };
        let mut fit = fit_model(dist, *job, &seeded)?;
        if matches!(job, FitFamily::Kummer(_)) {
            fit.n_params = 4;
            fit.aic = aic(fit.sse, dist.grid().len(), 4);
        }
        results.push(fit);
    }
    rank_results(&mut results);
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{generate_synthetic, Distribution};
    use crate::wavemodel::Grid;

    fn bessel_dist(omega: f64, q0: f64, seed: u64, n: u64) -> Distribution {
        let grid = Grid::uniform(q0 - 2.5, 0.01, 501).unwrap();
        let model = WaveModel::bessel(q0, omega, 1.0).unwrap();
        generate_synthetic(&model, &grid, n, seed).unwrap()
    }

    fn kummer_dist(a_tt: f64, q0: f64, seed: u64, n: u64) -> Distribution {
        let grid = Grid::uniform(q0 - 2.5, 0.01, 501).unwrap();
        let model = WaveModel::kummer(q0, a_tt, 0, 1.0).unwrap();
        generate_synthetic(&model, &grid, n, seed).unwrap()
    }

    #[test]
    fn bessel_fit_recovers_parameters() {
        let dist = bessel_dist(2.0, 100.0, 11, 100_000);
        let fit = fit_model(&dist, FitFamily::BesselJ0, &FitOptions::default()).unwrap();
        let omega = match fit.model.params {
            FamilyParams::BesselJ0 { omega } => omega,
            _ => unreachable!(),
        };
        assert!((omega - 2.0).abs() / 2.0 < 0.02, "omega = {omega}");
        assert!((fit.model.q0 - 100.0).abs() <= 0.01, "q0 = {}", fit.model.q0);
        assert!(fit.r2 > 0.9);
    }

    #[test]
    fn kummer_fit_recovers_parameters() {
        let dist = kummer_dist(1.0, 50.0, 5, 100_000);
        let fit = fit_model(&dist, FitFamily::Kummer(0), &FitOptions::default()).unwrap();
        let a_tt = match fit.model.params {
            FamilyParams::Kummer { a_tt, .. } => a_tt,
            _ => unreachable!(),
        };
        assert!((a_tt - 1.0).abs() < 0.05, "a_tt = {a_tt}");
    }

    #[test]
    fn degenerate_support_is_rejected() {
        // Mass at a single price on an otherwise valid grid.
        let grid = Grid::uniform(10.0, 0.01, 12).unwrap();
        let mut masses = vec![0.0; 12];
        masses[4] = 500.0;
        let dist = Distribution::new(grid, masses, (0, 1), 1.0).unwrap();
        let err = fit_model(&dist, FitFamily::BesselJ0, &FitOptions::default()).unwrap_err();
        assert!(matches!(err, Error::DegenerateSupport(_)));

        // Too few grid points.
        let small = Grid::uniform(10.0, 0.01, 6).unwrap();
        let dist2 = Distribution::new(small, vec![1.0; 6], (0, 1), 1.0).unwrap();
        assert!(matches!(
            fit_model(&dist2, FitFamily::BesselJ0, &FitOptions::default()),
            Err(Error::DegenerateSupport(_))
        ));
    }

    #[test]
    fn goodness_on_exact_frequencies() {
        let grid = Grid::uniform(-2.0, 0.25, 17).unwrap();
        let model = WaveModel::bessel(0.0, 1.3, 1.0)
            .unwrap()
            .normalized(&grid)
            .unwrap();
        let masses: Vec<f64> = grid.points().iter().map(|&q| model.density(q) * 1e6).collect();
        let dist = Distribution::new(grid, masses, (0, 1), 1.0).unwrap();
        let (sse, r2, _chi2) = goodness_of_fit(&dist, &model).unwrap();
        assert!(sse < 1e-25, "sse = {sse:e}");
        assert!((r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_model_scores_zero_r2() {
        // An (effectively) constant-density model reproduces the mean
        // frequency, which is the r2 baseline.
        let grid = Grid::uniform(0.0, 0.1, 21).unwrap();
        let masses: Vec<f64> = (0..21).map(|i| 10.0 + (i % 5) as f64).collect();
        let dist = Distribution::new(grid.clone(), masses, (0, 1), 1.0).unwrap();
        let flat = WaveModel::bessel(1.0, 1e-9, 1.0)
            .unwrap()
            .normalized(&grid)
            .unwrap();
        let (_, r2, _) = goodness_of_fit(&dist, &flat).unwrap();
        assert!(r2.abs() < 1e-9, "r2 = {r2:e}");
    }

    #[test]
    fn objective_sanity_best_not_worse_than_starts() {
        let dist = bessel_dist(2.0, 100.0, 3, 50_000);
        let opts = FitOptions::default();
        let fit = fit_model(&dist, FitFamily::BesselJ0, &opts).unwrap();
        let points = dist.grid().points().to_vec();
        let freq = dist.frequencies();
        for &(q0, shape) in &initial_starts(&dist, FitFamily::BesselJ0, &opts).unwrap() {
            let f0 = objective(&points, &freq, FitFamily::BesselJ0, q0, shape.ln());
            assert!(fit.sse <= f0 + 1e-12, "start sse {f0:e} < final {:e}", fit.sse);
        }
    }

    #[test]
    fn non_convergence_is_a_result_not_an_error() {
        let dist = bessel_dist(2.0, 100.0, 8, 20_000);
        let opts = FitOptions {
            max_iters: 1,
            ..FitOptions::default()
        };
        let fit = fit_model(&dist, FitFamily::BesselJ0, &opts).unwrap();
        assert!(!fit.converged);
    }

    #[test]
    fn seed_determinism_is_bitwise() {
        let dist = bessel_dist(2.0, 100.0, 9, 50_000);
        let opts = FitOptions::default();
        let a = fit_model(&dist, FitFamily::BesselJ0, &opts).unwrap();
        let b = fit_model(&dist, FitFamily::BesselJ0, &opts).unwrap();
        assert_eq!(a.model.q0.to_bits(), b.model.q0.to_bits());
        assert_eq!(a.sse.to_bits(), b.sse.to_bits());
        assert_eq!(a.aic.to_bits(), b.aic.to_bits());
        // and under a different thread count
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let c = pool.install(|| fit_model(&dist, FitFamily::BesselJ0, &opts).unwrap());
        assert_eq!(a.model.q0.to_bits(), c.model.q0.to_bits());
        assert_eq!(a.sse.to_bits(), c.sse.to_bits());
    }

    #[test]
    fn shift_equivariance() {
        let dist = bessel_dist(2.0, 100.0, 21, 100_000);
        let opts = FitOptions::default();
        let base = fit_model(&dist, FitFamily::BesselJ0, &opts).unwrap();

        let delta = 7.0;
        let shifted_grid = Grid::new(
            dist.grid().points().iter().map(|&q| q + delta).collect(),
        )
        .unwrap();
        let shifted =
            Distribution::new(shifted_grid, dist.masses().to_vec(), (0, 1), 1.0).unwrap();
        let moved = fit_model(&shifted, FitFamily::BesselJ0, &opts).unwrap();

        assert!((moved.model.q0 - base.model.q0 - delta).abs() < 1e-4);
        let (wa, wb) = match (base.model.params, moved.model.params) {
            (
                FamilyParams::BesselJ0 { omega: a },
                FamilyParams::BesselJ0 { omega: b },
            ) => (a, b),
            _ => unreachable!(),
        };
        assert!((wa - wb).abs() < 1e-5);
        assert!((base.sse - moved.sse).abs() < 1e-9);
    }

    #[test]
    fn volume_scale_invariance_is_exact() {
        // Power-of-two scaling keeps every frequency bit-identical, so the
        // whole fit path replays exactly.
        let dist = bessel_dist(2.0, 100.0, 2, 50_000);
        let scaled = Distribution::new(
            dist.grid().clone(),
            dist.masses().iter().map(|&m| m * 4.0).collect(),
            (0, 1),
            1.0,
        )
        .unwrap();
        let opts = FitOptions::default();
        let a = fit_model(&dist, FitFamily::BesselJ0, &opts).unwrap();
        let b = fit_model(&scaled, FitFamily::BesselJ0, &opts).unwrap();
        assert_eq!(a.model.q0.to_bits(), b.model.q0.to_bits());
        assert_eq!(a.sse.to_bits(), b.sse.to_bits());
        assert_eq!(a.r2.to_bits(), b.r2.to_bits());
    }

    #[test]
    fn normalization_closure_on_data_grid() {
        let dist = bessel_dist(2.0, 100.0, 4, 20_000);
        let fit = fit_model(&dist, FitFamily::BesselJ0, &FitOptions::default()).unwrap();
        let sum: f64 = dist
            .grid()
            .points()
            .iter()
            .map(|&q| fit.model.density(q))
            .sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn select_model_prefers_the_generating_family() {
        let bess = bessel_dist(2.0, 100.0, 31, 100_000);
        let ranked = select_model(&bess, &FitOptions::default()).unwrap();
        assert_eq!(ranked[0].model.family(), Family::BesselJ0);
        assert_eq!(ranked.len(), 5); // bessel + kummer n = 0..3

        let kumm = kummer_dist(1.0, 100.0, 31, 100_000);
        let ranked2 = select_model(&kumm, &FitOptions::default()).unwrap();
        assert_eq!(ranked2[0].model.family(), Family::Kummer);
    }

    #[test]
    fn tie_rule_orders_bessel_first() {
        let grid = Grid::uniform(0.0, 0.1, 11).unwrap();
        let mk = |family: FitFamily, aic_v: f64, n_params: usize| FitResult {
            model: match family {
                FitFamily::BesselJ0 => WaveModel::bessel(0.5, 1.0, 1.0).unwrap(),
                FitFamily::Kummer(n) => WaveModel::kummer(0.5, 1.0, n, 1.0).unwrap(),
            }
            .normalized(&grid)
            .unwrap(),
            sse: 1.0,
            r2: 0.5,
            chi2: 1.0,
            aic: aic_v,
            n_params,
            starts_tried: 1,
            converged: true,
        };
        // Identical AIC and parameter count: family enumeration decides.
        let mut v = vec![mk(FitFamily::Kummer(0), -10.0, 3), mk(FitFamily::BesselJ0, -10.0, 3)];
        rank_results(&mut v);
        assert_eq!(v[0].model.family(), Family::BesselJ0);

        // Within 2 AIC units, fewer parameters win even with higher AIC.
        let mut v2 = vec![mk(FitFamily::Kummer(1), -11.5, 4), mk(FitFamily::BesselJ0, -10.0, 3)];
        rank_results(&mut v2);
        assert_eq!(v2[0].model.family(), Family::BesselJ0);

        // Beyond 2 units AIC wins outright.
        let mut v3 = vec![mk(FitFamily::BesselJ0, -10.0, 3), mk(FitFamily::Kummer(1), -14.0, 4)];
        rank_results(&mut v3);
        assert_eq!(v3[0].model.family(), Family::Kummer);
    }

    #[test]
    fn chi2_calibration_on_generated_data() {
        // With data drawn from the fitted family the statistic should land
        // in the central 99% band of chi-square for its degrees of freedom
        // in at least 95 of 100 seeded trials. Band edges via the
        // Wilson-Hilferty cube approximation.
        let wh = |df: f64, z: f64| {
            let t = 1.0 - 2.0 / (9.0 * df) + z * (2.0 / (9.0 * df)).sqrt();
            df * t * t * t
        };
        let mut hits = 0;
        for seed in 0..100u64 {
            let dist = bessel_dist(2.0, 100.0, 1000 + seed, 100_000);
            let fit = fit_model(&dist, FitFamily::BesselJ0, &FitOptions::default()).unwrap();
            // count chi-square cells (bins with expected >= 5, plus pool)
            let total = dist.total();
            let mut cells = 0usize;
            let mut pooled = false;
            for &q in dist.grid().points() {
                if total * fit.model.density(q) >= 5.0 {
                    cells += 1;
                } else {
                    pooled = true;
                }
            }
            let df = (cells + usize::from(pooled)) as f64 - 1.0 - 3.0;
            let lo = wh(df, -2.5758293035489004);
            let hi = wh(df, 2.5758293035489004);
            if fit.chi2 > lo && fit.chi2 < hi {
                hits += 1;
            }
        }
        assert!(hits >= 95, "chi2 in 99% band in only {hits}/100 trials");
    }
}
