//! Special-function kernel: log-gamma, digamma, trigamma, inverse digamma and
//! log-beta on the positive real axis.
//!
//! The checked functions (`log_gamma`, `digamma`, ...) validate their
//! argument and return [`Error::Domain`] outside `(0, inf)`. Estimator code
//! validates parameters once up front and then calls the unchecked
//! crate-internal kernels (`ln_gamma`, `psi0`, `psi1`).

use crate::error::{domain, Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `B_{2k} / (2k (2k - 1))` for the Stirling series of ln Gamma.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// `B_{2k} / (2k)` for the asymptotic digamma series.
const DIGAMMA_SERIES: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
    43_867.0 / 14_364.0,
    -174_611.0 / 6600.0,
];

/// Bernoulli numbers `B_{2k}` for the asymptotic trigamma series.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43_867.0 / 798.0,
    -174_611.0 / 330.0,
];

const LN_GAMMA_SHIFT: f64 = 10.0;
const PSI_SHIFT: f64 = 6.0;

fn check_positive(x: f64, what: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{what} requires a finite positive argument, got {x}")))
    }
}

/// Natural log of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive(x, "log_gamma")?;
    Ok(ln_gamma(x))
}

/// Digamma function `psi_0(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive(x, "digamma")?;
    Ok(psi0(x))
}

/// Trigamma function `psi_1(x)` for `x > 0`.
pub fn trigamma(x: f64) -> Result<f64> {
    check_positive(x, "trigamma")?;
    Ok(psi1(x))
}

/// `ln B(a, b)`.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    check_positive(a, "log_beta")?;
    check_positive(b, "log_beta")?;
    Ok(ln_beta(a, b))
}

/// Inverse of the digamma function: the unique `x > 0` with `psi_0(x) = y`.
///
/// Newton iteration seeded with `exp(y) + 1/2` for `y >= -2.22` and
/// `-1 / (y + gamma)` below.
pub fn inverse_digamma(y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(domain(format!("inverse_digamma requires a finite argument, got {y}")));
    }
    let mut x = if y >= -2.22 {
        y.exp() + 0.5
    } else {
        -1.0 / (y + EULER_GAMMA)
    };
    for _ in 0..100 {
        let resid = psi0(x) - y;
        let mut next = x - resid / psi1(x);
        if next <= 0.0 {
            next = 0.5 * x;
        }
        let step = (next - x).abs();
        x = next;
        if step <= 4.0 * f64::EPSILON * x {
            return Ok(x);
        }
    }
    let resid = (psi0(x) - y).abs();
    if resid <= 1e-12 * (1.0 + y.abs()) {
        Ok(x)
    } else {
        Err(Error::Numerical(format!(
            "inverse_digamma({y}) did not converge: last x = {x}, residual {resid:e}"
        )))
    }
}

pub(crate) fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma({x})");
    if x >= LN_GAMMA_SHIFT {
        return stirling(x);
    }
    // lnG(x) = lnG(x + n) - ln(x (x+1) ... (x+n-1))
    let mut prod = 1.0;
    let mut z = x;
    while z < LN_GAMMA_SHIFT {
        prod *= z;
        z += 1.0;
    }
    stirling(z) - prod.ln()
}

fn stirling(x: f64) -> f64 {
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + stirling_series(x)
}

fn stirling_series(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for c in STIRLING {
        series += c * pow;
        pow *= inv2;
    }
    series
}

/// `ln Γ(x + n) − ln Γ(x)`. For large `x` the two log-gammas are huge and
/// nearly equal, so the difference is formed from the expansion directly.
pub(crate) fn ln_rising(x: f64, n: f64) -> f64 {
    debug_assert!(x > 0.0 && n >= 0.0, "ln_rising({x}, {n})");
    if n == 0.0 {
        return 0.0;
    }
    if x < LN_GAMMA_SHIFT {
        return ln_gamma(x + n) - ln_gamma(x);
    }
    let y = x + n;
    (x - 0.5) * (n / x).ln_1p() + n * y.ln() - n + stirling_series(y) - stirling_series(x)
}

pub(crate) fn psi0(x: f64) -> f64 {
    debug_assert!(x > 0.0, "psi0({x})");
    let mut shift = 0.0;
    let mut z = x;
    while z < PSI_SHIFT {
        shift += 1.0 / z;
        z += 1.0;
    }
    let inv2 = 1.0 / (z * z);
    let mut series = 0.0;
    let mut pow = inv2;
    for c in DIGAMMA_SERIES {
        series += c * pow;
        pow *= inv2;
    }
    z.ln() - 0.5 / z - series - shift
}

pub(crate) fn psi1(x: f64) -> f64 {
    debug_assert!(x > 0.0, "psi1({x})");
    let mut shift = 0.0;
    let mut z = x;
    while z < PSI_SHIFT {
        shift += 1.0 / (z * z);
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv2 * inv;
    for b in BERNOULLI_EVEN {
        series += b * pow;
        pow *= inv2;
    }
    inv + 0.5 * inv2 + series + shift
}

pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    ln_gamma(lo) - ln_rising(hi, lo)
}
