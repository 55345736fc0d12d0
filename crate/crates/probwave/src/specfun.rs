//! Scalar special functions shared by the wave models and the solvers.
//!
//! Bessel J0/J1 are evaluated by an ascending power series for small
//! arguments and by the Hankel asymptotic expansion beyond a configurable
//! switch point. The confluent hypergeometric function is restricted to the
//! terminating case `F(-n, 1, x)`, which is a degree-n polynomial and the
//! only case the wave families need. Airy Ai is a Maclaurin series limited
//! to |x| <= 8, enough to reach the first few zeros used as a spectrum
//! oracle. Root finding is plain bisection: deterministic and bracketing.

use crate::{Error, Result};
use std::f64::consts::PI;

/// Evaluation policy for the series/asymptotic special-function kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPolicy {
    /// Maximum number of series terms.
    pub series_terms: usize,
    /// Truncation target: stop once a term falls below this magnitude.
    pub abs_tol: f64,
    /// Argument magnitude where Bessel evaluation switches from the power
    /// series to the asymptotic expansion.
    pub asymptotic_switch: f64,
}

impl EvalPolicy {
    /// Validates `series_terms >= 20`, `abs_tol <= 1e-12`,
    /// `asymptotic_switch` in `[8, 20]`.
    pub fn new(series_terms: usize, abs_tol: f64, asymptotic_switch: f64) -> Result<Self> {
        if series_terms < 20 {
            return Err(Error::InvalidArgument(format!(
                "series_terms = {series_terms}, need at least 20"
            )));
        }
        if !(0.0..=1e-12).contains(&abs_tol) {
            return Err(Error::OutOfRange {
                name: "abs_tol",
                value: abs_tol,
                lo: 0.0,
                hi: 1e-12,
            });
        }
        if !(8.0..=20.0).contains(&asymptotic_switch) {
            return Err(Error::OutOfRange {
                name: "asymptotic_switch",
                value: asymptotic_switch,
                lo: 8.0,
                hi: 20.0,
            });
        }
        Ok(Self {
            series_terms,
            abs_tol,
            asymptotic_switch,
        })
    }
}

impl Default for EvalPolicy {
    fn default() -> Self {
        Self {
            series_terms: 48,
            abs_tol: 1e-16,
            asymptotic_switch: 12.0,
        }
    }
}

fn require_finite(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { name, value: x })
    }
}

/// Zero-order Bessel function of the first kind, J0(x).
///
/// Even in x; absolute error below 1e-10 for |x| <= 50 under the default
/// policy.
pub fn bessel_j0(x: f64) -> Result<f64> {
    require_finite("x", x)?;
    Ok(j0(x))
}

/// First-order Bessel function of the first kind, J1(x). Odd in x.
pub fn bessel_j1(x: f64) -> Result<f64> {
    require_finite("x", x)?;
    Ok(j1(x))
}

/// Unchecked J0 for hot paths; callers guarantee a finite argument.
pub(crate) fn j0(x: f64) -> f64 {
    j0_with(x, &EvalPolicy::default())
}

/// Unchecked J1 for hot paths; callers guarantee a finite argument.
pub(crate) fn j1(x: f64) -> f64 {
    j1_with(x, &EvalPolicy::default())
}

/// J0 under an explicit evaluation policy.
pub fn j0_with(x: f64, policy: &EvalPolicy) -> f64 {
    let ax = x.abs();
    if ax < policy.asymptotic_switch {
        j0_series(ax, policy.series_terms, policy.abs_tol)
    } else {
        j_asymptotic(ax, 0, policy.series_terms, policy.abs_tol)
    }
}

/// J1 under an explicit evaluation policy.
pub fn j1_with(x: f64, policy: &EvalPolicy) -> f64 {
    let ax = x.abs();
    let v = if ax < policy.asymptotic_switch {
        j1_series(ax, policy.series_terms, policy.abs_tol)
    } else {
        j_asymptotic(ax, 1, policy.series_terms, policy.abs_tol)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

fn j0_series(x: f64, max_terms: usize, tol: f64) -> f64 {
    let m = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..max_terms {
        let kf = k as f64;
        term *= m / (kf * kf);
        sum += term;
        if term.abs() < tol {
            break;
        }
    }
    sum
}

fn j1_series(x: f64, max_terms: usize, tol: f64) -> f64 {
    let m = -0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    for k in 1..max_terms {
        let kf = k as f64;
        term *= m / (kf * (kf + 1.0));
        sum += term;
        if term.abs() < tol {
            break;
        }
    }
    sum
}

/// Hankel expansion J_nu(x) = sqrt(2/(pi x)) [P cos w - Q sin w] with
/// w = x - (nu/2 + 1/4) pi. Terms are added until they stop decreasing
/// (onset of asymptotic divergence) or drop below `tol`.
fn j_asymptotic(x: f64, nu: u32, max_terms: usize, tol: f64) -> f64 {
    let mu = (4 * nu * nu) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..max_terms {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (8.0 * kf * x);
        let mag = term.abs();
        if mag >= prev {
            break;
        }
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if mag < tol {
            break;
        }
        prev = mag;
    }
    let w = x - (0.5 * nu as f64 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * w.cos() - q * w.sin())
}

/// Rising factorial (a)_k = a (a+1) ... (a+k-1), with (a)_0 = 1.
pub fn pochhammer(a: f64, k: u32) -> f64 {
    let mut prod = 1.0;
    for j in 0..k {
        prod *= a + j as f64;
    }
    prod
}

/// Terminating Kummer confluent hypergeometric function F(-n, 1, x):
/// the degree-n polynomial sum_{k=0..n} (-n)_k x^k / (k! (1)_k).
pub fn kummer_m(n: u32, x: f64) -> f64 {
    let nf = n as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..n {
        let kf = k as f64;
        term *= (kf - nf) * x / ((kf + 1.0) * (kf + 1.0));
        sum += term;
    }
    sum
}

/// d/dx F(-n, 1, x) = -n F(1-n, 2, x), itself a terminating polynomial.
pub fn kummer_m_prime(n: u32, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let a = 1.0 - n as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..(n - 1) {
        let kf = k as f64;
        term *= (a + kf) * x / ((kf + 1.0) * (kf + 2.0));
        sum += term;
    }
    -(n as f64) * sum
}

/// d^2/dx^2 F(-n, 1, x) = n (n-1) / 2 * F(2-n, 3, x).
pub fn kummer_m_second(n: u32, x: f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let a = 2.0 - n as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..(n - 2) {
        let kf = k as f64;
        term *= (a + kf) * x / ((kf + 1.0) * (kf + 3.0));
        sum += term;
    }
    0.5 * (n as f64) * (n as f64 - 1.0) * sum
}

/// Ai(0) = 3^(-2/3) / Gamma(2/3).
pub const AIRY_AI_ZERO: f64 = 0.355_028_053_887_817_24;
/// Ai'(0) = -3^(-1/3) / Gamma(1/3).
pub const AIRY_AI_PRIME_ZERO: f64 = -0.258_819_403_792_806_8;

/// Airy function of the first kind and its derivative, by Maclaurin series.
///
/// Valid for |x| <= 8, which covers the first four zeros of Ai and Ai'.
pub fn airy(x: f64) -> Result<(f64, f64)> {
    require_finite("x", x)?;
    if x.abs() > 8.0 {
        return Err(Error::OutOfRange {
            name: "x",
            value: x,
            lo: -8.0,
            hi: 8.0,
        });
    }
    // Ai = Ai(0) f + Ai'(0) g where f'' = x f, f(0)=1, f'(0)=0 and
    // g'' = x g, g(0)=0, g'(0)=1.
    let x3 = x * x * x;
    let mut f = 1.0;
    let mut tf = 1.0;
    let mut fp = 0.0;
    let mut tfp = 0.5 * x * x; // first f' term, k = 1
    let mut g = x;
    let mut tg = x;
    let mut gp = 1.0;
    let mut tgp = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        tf *= x3 / ((3.0 * kf) * (3.0 * kf - 1.0));
        f += tf;
        if k == 1 {
            fp += tfp;
        } else {
            // f' term ratio between k-1 and k
            tfp *= x3 / ((3.0 * kf - 3.0) * (3.0 * kf - 1.0));
            fp += tfp;
        }
        tg *= x3 / ((3.0 * kf + 1.0) * (3.0 * kf));
        g += tg;
        tgp *= x3 / ((3.0 * kf - 2.0) * (3.0 * kf));
        gp += tgp;
        if tf.abs() < 1e-20 && tg.abs() < 1e-20 {
            break;
        }
    }
    let ai = AIRY_AI_ZERO * f + AIRY_AI_PRIME_ZERO * g;
    let ai_prime = AIRY_AI_ZERO * fp + AIRY_AI_PRIME_ZERO * gp;
    Ok((ai, ai_prime))
}

/// Bisection root finder on a bracketing interval.
///
/// Deterministic: always halves the bracket until its width is at most
/// `tol`, then returns the midpoint. An exact zero at either endpoint is
/// returned directly.
pub fn find_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    require_finite("lo", lo)?;
    require_finite("hi", hi)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol = {tol}, need > 0")));
    }
    if lo >= hi {
        return Err(Error::InvalidArgument(format!(
            "empty bracket: lo = {lo} >= hi = {hi}"
        )));
    }
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let (mut a, mut b) = (lo, hi);
    let mut f_a = f_lo;
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_a.signum() {
            a = mid;
            f_a = f_mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
