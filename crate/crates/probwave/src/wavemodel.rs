//! Closed-form wave families and the generalized ODE residual operator.
//!
//! Both families solve
//!
//! ```text
//! beta * (y psi'' + psi') + [E - U(y)] psi = 0,      y = q - q0,
//! ```
//!
//! with the V-shaped potential `U(y) = a_tt |y|`. The Kummer family
//! `psi = C e^{-kappa |y|} F(-n, 1, 2 kappa |y|)` (kappa = sqrt(a_tt/beta))
//! solves it on the half line for the constant energies
//! `E_n = (1 + 2n) sqrt(a_tt beta)`. The Bessel family `psi = C J0(omega y)`
//! solves it when the energy is separable, `E - U = beta omega^2 y`.
//!
//! The residual operator works in the shifted coordinate with the singular
//! point at `y = 0`. Second-order central differences are the default; an
//! analytic-derivative variant is provided for closed-form models so model
//! error can be separated from discretization error.

use crate::dataio::Distribution;
use crate::specfun;
use crate::{Error, Result};

/// Uniform, strictly increasing grid of reinforcement values.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    tick: f64,
}

impl Grid {
    /// Builds a grid from explicit points, validating strict monotonicity
    /// and uniform spacing (relative deviation at most 1e-9).
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::GridTooShort {
                len: points.len(),
                min: 2,
            });
        }
        for (i, w) in points.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::GridNotIncreasing { index: i + 1 });
            }
        }
        let n = points.len();
        let tick = (points[n - 1] - points[0]) / (n - 1) as f64;
        for (i, w) in points.windows(2).enumerate() {
            let rel = ((w[1] - w[0]) - tick).abs() / tick;
            if rel > 1e-9 {
                return Err(Error::GridNotUniform { index: i + 1, rel });
            }
        }
        Ok(Self { points, tick })
    }

    /// Builds `len` points starting at `start` with spacing `tick`.
    pub fn uniform(start: f64, tick: f64, len: usize) -> Result<Self> {
        if !(tick > 0.0) || !tick.is_finite() {
            return Err(Error::InvalidArgument(format!("tick = {tick}, need > 0")));
        }
        if len < 2 {
            return Err(Error::GridTooShort { len, min: 2 });
        }
        let points = (0..len).map(|i| start + tick * i as f64).collect();
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn tick(&self) -> f64 {
        self.tick
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        *self.points.last().unwrap()
    }

    /// Nearest tick multiple (anchored at the first grid point), clamped to
    /// the grid span.
    pub fn snap(&self, q: f64) -> f64 {
        let k = ((q - self.first()) / self.tick).round();
        (self.first() + k * self.tick).clamp(self.first(), self.last())
    }
}

/// Wave family tag, also the enumeration order used to break fit ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    BesselJ0,
    Kummer,
}

/// Family-specific shape parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyParams {
    /// `psi = c J0(omega (q - q0))`
    BesselJ0 { omega: f64 },
    /// `psi = c e^{-kappa |q - q0|} F(-n, 1, 2 kappa |q - q0|)` with
    /// `kappa = sqrt(a_tt / beta)`.
    Kummer { a_tt: f64, n: u32 },
}

/// A closed-form wave model: family, equilibrium point, scale constant
/// `beta`, and normalization constant `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveModel {
    pub q0: f64,
    pub beta: f64,
    pub c: f64,
    pub params: FamilyParams,
}

impl WaveModel {
    pub fn bessel(q0: f64, omega: f64, beta: f64) -> Result<Self> {
        validate_positive("omega", omega)?;
        validate_positive("beta", beta)?;
        if !q0.is_finite() {
            return Err(Error::NonFinite { name: "q0", value: q0 });
        }
        Ok(Self {
            q0,
            beta,
            c: 1.0,
            params: FamilyParams::BesselJ0 { omega },
        })
    }

    pub fn kummer(q0: f64, a_tt: f64, n: u32, beta: f64) -> Result<Self> {
        validate_positive("a_tt", a_tt)?;
        validate_positive("beta", beta)?;
        if !q0.is_finite() {
            return Err(Error::NonFinite { name: "q0", value: q0 });
        }
        Ok(Self {
            q0,
            beta,
            c: 1.0,
            params: FamilyParams::Kummer { a_tt, n },
        })
    }

    pub fn family(&self) -> Family {
        match self.params {
            FamilyParams::BesselJ0 { .. } => Family::BesselJ0,
            FamilyParams::Kummer { .. } => Family::Kummer,
        }
    }

    /// Kummer decay rate kappa = sqrt(a_tt / beta); None for Bessel.
    pub fn kappa(&self) -> Option<f64> {
        match self.params {
            FamilyParams::Kummer { a_tt, .. } => Some((a_tt / self.beta).sqrt()),
            FamilyParams::BesselJ0 { .. } => None,
        }
    }

    /// Wave function and probability density at `q`. The density is even
    /// about `q0` for both families.
    pub fn eval(&self, q: f64) -> (f64, f64) {
        let y = q - self.q0;
        let psi = match self.params {
            FamilyParams::BesselJ0 { omega } => self.c * specfun::j0(omega * y),
            FamilyParams::Kummer { a_tt, n } => {
                let kappa = (a_tt / self.beta).sqrt();
                let ay = y.abs();
                self.c * (-kappa * ay).exp() * specfun::kummer_m(n, 2.0 * kappa * ay)
            }
        };
        (psi, psi * psi)
    }

    pub fn density(&self, q: f64) -> f64 {
        self.eval(q).1
    }

    /// Returns a copy whose `c` makes the discrete density sum to one on
    /// `grid` (within 1e-12). Idempotent: the result does not depend on the
    /// current `c`.
    pub fn normalized(&self, grid: &Grid) -> Result<WaveModel> {
        let mut unit = self.clone();
        unit.c = 1.0;
        let sum: f64 = grid.points().iter().map(|&q| unit.density(q)).sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::DegenerateDensity);
        }
        unit.c = 1.0 / sum.sqrt();
        Ok(unit)
    }
}

fn validate_positive(name: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::NonFinite { name, value: v });
    }
    if v <= 0.0 {
        return Err(Error::InvalidArgument(format!("{name} = {v}, need > 0")));
    }
    Ok(())
}

/// V-shaped linear potential `U(q) = a_tt |q - q0|`, zero exactly at `q0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    pub q0: f64,
    pub a_tt: f64,
}

impl PotentialSpec {
    pub fn new(q0: f64, a_tt: f64) -> Result<Self> {
        validate_positive("a_tt", a_tt)?;
        if !q0.is_finite() {
            return Err(Error::NonFinite { name: "q0", value: q0 });
        }
        Ok(Self { q0, a_tt })
    }

    pub fn value(&self, q: f64) -> f64 {
        self.a_tt * (q - self.q0).abs()
    }
}

/// Energy term of the residual operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnergySpec {
    /// Constant energy E > 0; the bracket is `E - U(y)`.
    Constant(f64),
    /// Separable energy: the bracket `E - U` reduces to
    /// `beta * omega^2 * (q - q0)` (signed).
    BesselSeparable { omega: f64 },
}

/// Eigenvalue of the Kummer family: `(1 + 2n) sqrt(a_tt * beta)`.
pub fn eigen_energy_kummer(n: u32, a_tt: f64, beta: f64) -> f64 {
    (1.0 + 2.0 * n as f64) * (a_tt * beta).sqrt()
}

fn validate_energy(energy: &EnergySpec) -> Result<()> {
    if let EnergySpec::Constant(e) = *energy {
        if !(e > 0.0) || !e.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "constant energy E = {e}, need > 0"
            )));
        }
    }
    Ok(())
}

/// Maximum-normalized residual of the wave operator applied to samples,
/// with derivatives by second-order central differences on interior points.
///
/// Returns `max_i |beta (y_i psi''_i + psi'_i) + (E_i - U_i) psi_i|` divided
/// by `max_i |psi_i|`; endpoints are excluded from the operator maximum.
pub fn ode_residual(
    psi: &[f64],
    grid: &Grid,
    energy: &EnergySpec,
    potential: &PotentialSpec,
    beta: f64,
) -> Result<f64> {
    if psi.len() != grid.len() {
        return Err(Error::InvalidArgument(format!(
            "psi has {} samples but the grid has {} points",
            psi.len(),
            grid.len()
        )));
    }
    if grid.len() < 5 {
        return Err(Error::GridTooShort {
            len: grid.len(),
            min: 5,
        });
    }
    validate_positive("beta", beta)?;
    validate_energy(energy)?;
    let h = grid.tick();
    let q = grid.points();
    let denom = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if denom == 0.0 {
        return Err(Error::DegenerateDensity);
    }
    let mut worst = 0.0f64;
    for i in 1..psi.len() - 1 {
        let y = q[i] - potential.q0;
        let d2 = (psi[i + 1] - 2.0 * psi[i] + psi[i - 1]) / (h * h);
        let d1 = (psi[i + 1] - psi[i - 1]) / (2.0 * h);
        let bracket = match *energy {
            EnergySpec::Constant(e) => e - potential.a_tt * y.abs(),
            EnergySpec::BesselSeparable { omega } => beta * omega * omega * y,
        };
        let local = beta * (y * d2 + d1) + bracket * psi[i];
        worst = worst.max(local.abs());
    }
    Ok(worst / denom)
}

/// Residual of the wave operator for a closed-form model, with analytic
/// derivatives instead of finite differences. Separates model error from
/// discretization error.
///
/// For the Kummer family the operator holds on the half line, so every grid
/// point must satisfy `q > q0`.
pub fn ode_residual_analytic(
    model: &WaveModel,
    grid: &Grid,
    energy: &EnergySpec,
    potential: &PotentialSpec,
) -> Result<f64> {
    if grid.len() < 5 {
        return Err(Error::GridTooShort {
            len: grid.len(),
            min: 5,
        });
    }
    validate_energy(energy)?;
    let beta = model.beta;
    let mut worst = 0.0f64;
    let mut denom = 0.0f64;
    for &q in grid.points() {
        let y = q - potential.q0;
        let (psi, d1, d2) = match model.params {
            FamilyParams::BesselJ0 { omega } => {
                let x = omega * y;
                let j0 = specfun::j0(x);
                let j1 = specfun::j1(x);
                let psi = model.c * j0;
                let d1 = -model.c * omega * j1;
                // J0'' = -(J0 - J1/x); series limit J1(x)/x -> 1/2 at x = 0.
                let j1_over_x = if x.abs() < 1e-4 {
                    0.5 - x * x / 16.0
                } else {
                    j1 / x
                };
                let d2 = -model.c * omega * omega * (j0 - j1_over_x);
                (psi, d1, d2)
            }
            FamilyParams::Kummer { a_tt, n } => {
                if y <= 0.0 {
                    return Err(Error::InvalidArgument(
                        "analytic Kummer residual requires a half-line grid (q > q0)".into(),
                    ));
                }
                let kappa = (a_tt / beta).sqrt();
                let xi = 2.0 * kappa * y;
                let f = specfun::kummer_m(n, xi);
                let fp = specfun::kummer_m_prime(n, xi);
                let fpp = specfun::kummer_m_second(n, xi);
                let e = (-kappa * y).exp();
                let psi = model.c * e * f;
                let d1 = model.c * e * (-kappa * f + 2.0 * kappa * fp);
                let d2 = model.c
                    * e
                    * (kappa * kappa * f - 4.0 * kappa * kappa * fp + 4.0 * kappa * kappa * fpp);
                (psi, d1, d2)
            }
        };
        let bracket = match *energy {
            EnergySpec::Constant(e) => e - potential.a_tt * y.abs(),
            EnergySpec::BesselSeparable { omega } => beta * omega * omega * y,
        };
        let local = beta * (y * d2 + d1) + bracket * psi;
        worst = worst.max(local.abs());
        denom = denom.max(psi.abs());
    }
    if denom == 0.0 {
        return Err(Error::DegenerateDensity);
    }
    Ok(worst / denom)
}

/// Per-point interaction statistics of a distribution against a model.
///
/// `s[i] = (m_i / M) * (m_i / t^2)` is the per-point interaction statistic
/// and `r[i] = m_i / t^2 - constant` the implied reversal force, where
/// `constant` is `omega^2` (Bessel) or `a_tt` (Kummer). The statistic varies
/// across the grid for non-uniform data; this report records its dispersion
/// and deliberately does not assert pointwise constancy.
#[derive(Debug, Clone)]
pub struct ConservationReport {
    /// `"omega_sq"` or `"a_tt"`.
    pub constant_name: &'static str,
    pub constant: f64,
    pub s: Vec<f64>,
    pub r: Vec<f64>,
    pub s_min: f64,
    pub s_max: f64,
    /// Coefficient of variation (population std / mean) of `s`.
    pub s_cv: f64,
    pub note: &'static str,
}

pub const CONSERVATION_NOTE: &str = "per-point interaction statistic s_i = (m_i/M)(m_i/t^2) \
varies across the grid for non-uniform distributions; this report records its dispersion and \
does not assert pointwise constancy";

/// Computes the interaction-conservation diagnostic for a distribution and
/// a fitted (or reference) model sharing its grid.
pub fn interaction_diagnostic(
    dist: &Distribution,
    model: &WaveModel,
) -> Result<ConservationReport> {
    let masses = dist.masses();
    let total = dist.total();
    let t = dist.t();
    if masses.is_empty() || !(total > 0.0) {
        return Err(Error::EmptyDistribution);
    }
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "window length t = {t}, need > 0"
        )));
    }
    let (constant_name, constant) = match model.params {
        FamilyParams::BesselJ0 { omega } => ("omega_sq", omega * omega),
        FamilyParams::Kummer { a_tt, .. } => ("a_tt", a_tt),
    };
    let t2 = t * t;
    let s: Vec<f64> = masses.iter().map(|&m| (m / total) * (m / t2)).collect();
    let r: Vec<f64> = masses.iter().map(|&m| m / t2 - constant).collect();
    let s_min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let s_max = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    let var = s.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / s.len() as f64;
    let s_cv = if mean > 0.0 { var.sqrt() / mean } else { 0.0 };
    Ok(ConservationReport {
        constant_name,
        constant,
        s,
        r,
        s_min,
        s_max,
        s_cv,
        note: CONSERVATION_NOTE,
    })
}
