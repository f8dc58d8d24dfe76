//! Gauss-Legendre rules and adaptive 1-D integration of sharply peaked,
//! log-scale integrands.

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut out = vec![(0.0, 0.0); n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (-x, w);
        out[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        out[n / 2].0 = 0.0;
    }
    out
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_on(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    gauss_legendre(n)
        .into_iter()
        .map(|(x, w)| (mid + half * x, half * w))
        .collect()
}

const PANEL_RULE: usize = 10;
const MAX_DEPTH: u32 = 40;
const MAX_EVALS: usize = 2_000_000;

struct Adaptive<'a, const M: usize> {
    f: &'a dyn Fn(f64) -> [f64; M],
    rule: Vec<(f64, f64)>,
    rel_tol: f64,
    abs_tol: f64,
    evals: usize,
}

impl<const M: usize> Adaptive<'_, M> {
    fn rule(&mut self, a: f64, b: f64) -> [f64; M] {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = [0.0; M];
        for &(x, w) in &self.rule {
            let v = (self.f)(mid + half * x);
            for j in 0..M {
                acc[j] += half * w * v[j];
            }
        }
        self.evals += self.rule.len();
        acc
    }

    fn panel(&mut self, a: f64, b: f64, whole: [f64; M], depth: u32) -> Result<[f64; M]> {
        let m = 0.5 * (a + b);
        let left = self.rule(a, m);
        let right = self.rule(m, b);
        let mut split = [0.0; M];
        let mut ok = true;
        for j in 0..M {
            split[j] = left[j] + right[j];
            let tol = self.rel_tol * split[j].abs() + self.abs_tol;
            if !split[j].is_finite() || (split[j] - whole[j]).abs() > tol {
                ok = false;
            }
        }
        if ok {
            return Ok(split);
        }
        if depth >= MAX_DEPTH || self.evals >= MAX_EVALS {
            return Err(Error::Numerical(format!(
                "adaptive quadrature did not converge on [{a}, {b}] after {} evaluations",
                self.evals
            )));
        }
        let l = self.panel(a, m, left, depth + 1)?;
        let r = self.panel(m, b, right, depth + 1)?;
        let mut out = [0.0; M];
        for j in 0..M {
            out[j] = l[j] + r[j];
        }
        Ok(out)
    }
}

fn integrate_panels<const M: usize>(
    f: &dyn Fn(f64) -> [f64; M],
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<([f64; M], usize)> {
    let mut ad = Adaptive { f, rule: gauss_legendre(PANEL_RULE), rel_tol, abs_tol, evals: 0 };
    let mut total = [0.0; M];
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let whole = ad.rule(w[0], w[1]);
        let part = ad.panel(w[0], w[1], whole, 0)?;
        for j in 0..M {
            total[j] += part[j];
        }
    }
    Ok((total, ad.evals))
}

/// Adaptive Gauss-Legendre integral of a smooth scalar function on `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let g = |x: f64| [f(x)];
    let breaks: Vec<f64> = (0..=8).map(|i| a + (b - a) * i as f64 / 8.0).collect();
    let ([v], _) = integrate_panels(&g, &breaks, tol, tol * 1e-3)?;
    Ok(v)
}

/// Result of [`integrate_peaked`].
#[derive(Debug, Clone, Copy)]
pub struct PeakedIntegral<const M: usize> {
    /// The integrals are of `exp(log_w - log_scale) * g`.
    pub log_scale: f64,
    pub values: [f64; M],
    /// Location of the maximum of `log_w`.
    pub mode: f64,
    /// Curvature width of `log_w` at the mode.
    pub width: f64,
    pub evals: usize,
}

/// Integrate `exp(log_w(t)) * g(t)` over `[lo, hi]` for a unimodal `log_w`.
///
/// `f(t)` returns `(log_w(t), g(t))`. The peak is located by a scan plus golden
/// section and the panels are laid out geometrically around it, so peaks much
/// narrower than the interval are resolved.
pub fn integrate_peaked<const M: usize>(
    f: impl Fn(f64) -> (f64, [f64; M]),
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<PeakedIntegral<M>> {
    let logw = |t: f64| f(t).0;
    let scan = 400;
    let step = (hi - lo) / scan as f64;
    let mut best = (f64::NEG_INFINITY, lo);
    for i in 0..=scan {
        let t = lo + step * i as f64;
        let v = logw(t);
        if v > best.0 {
            best = (v, t);
        }
    }
    if !best.0.is_finite() {
        return Err(Error::Numerical("integrand vanishes on the whole range".into()));
    }
    let mode = golden_max(&logw, (best.1 - step).max(lo), (best.1 + step).min(hi));
    let peak = logw(mode).max(best.0);
    let h = (step * 1e-2).max(1e-9 * (1.0 + mode.abs()));
    let curv = -(logw(mode + h) - 2.0 * logw(mode) + logw(mode - h)) / (h * h);
    let width = if curv.is_finite() && curv > 0.0 {
        (1.0 / curv.sqrt()).clamp(1e-10, hi - lo)
    } else {
        step
    };

    let mut breaks = vec![lo, hi, mode.clamp(lo, hi)];
    let mut s = 0.5;
    while mode - s * width > lo || mode + s * width < hi {
        for t in [mode - s * width, mode + s * width] {
            if t > lo && t < hi {
                breaks.push(t);
            }
        }
        s *= 2.0;
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let g = |t: f64| {
        let (lw, payload) = f(t);
        let w = (lw - peak).exp();
        let mut out = [0.0; M];
        if w > 0.0 {
            for j in 0..M {
                out[j] = w * payload[j];
            }
        }
        out
    };
    let (values, evals) = integrate_panels(&g, &breaks, rel_tol, 1e-14 * width)?;
    Ok(PeakedIntegral { log_scale: peak, values, mode, width, evals: evals + scan + 200 })
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
pub(crate) fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-12 * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 2, 5, 10, 30, 60] {
            let s: f64 = gauss_legendre(n).iter().map(|p| p.1).sum();
            assert!((s - 2.0).abs() < 1e-13, "n = {n}: {s}");
        }
    }

    #[test]
    fn polynomial_exactness() {
        // Degree up to 2n - 1 is integrated exactly on [a, b].
        let (a, b) = (0.3, 2.1);
        for n in [3, 8, 30] {
            let rule = gauss_legendre_on(a, b, n);
            for deg in 0..(2 * n) {
                let p = deg as i32;
                let got: f64 = rule.iter().map(|&(x, w)| w * x.powi(p)).sum();
                let want = (b.powi(p + 1) - a.powi(p + 1)) / (p + 1) as f64;
                assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn nodes_symmetric_and_ordered() {
        let r = gauss_legendre(7);
        for i in 0..7 {
            assert!((r[i].0 + r[6 - i].0).abs() < 1e-15);
            if i > 0 {
                assert!(r[i].0 > r[i - 1].0);
            }
        }
    }

    #[test]
    fn adaptive_handles_endpoint_log() {
        let v = integrate(|x| -x.ln(), 0.0, 1.0, 1e-11).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn peaked_gaussian() {
        // A narrow Gaussian at an arbitrary offset inside a wide interval.
        let (mu, s) = (3.217, 1e-3);
        let r = integrate_peaked(
            |t| (-(t - mu) * (t - mu) / (2.0 * s * s), [1.0, t]),
            -30.0,
            30.0,
            1e-10,
        )
        .unwrap();
        let norm = (2.0 * std::f64::consts::PI).sqrt() * s;
        assert!((r.values[0] * r.log_scale.exp() / norm - 1.0).abs() < 1e-8);
        assert!((r.values[1] / r.values[0] - mu).abs() < 1e-9);
        assert!((r.width / s - 1.0).abs() < 1e-3);
    }
}
