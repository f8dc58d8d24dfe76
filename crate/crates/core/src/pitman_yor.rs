//! Closed-form entropy moments and evidence for the Pitman-Yor process.

use serde::{Deserialize, Serialize};

use crate::counts::{CountData, Multiplicities};
use crate::dirichlet::dirichlet_entropy_moments;
use crate::error::{domain, Result};
use crate::special::{ln_gamma, ln_rising, psi0, psi1};

/// Discount `d` in `[0, 1)` and concentration `alpha > -d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PyParams {
    pub d: f64,
    pub alpha: f64,
}

impl PyParams {
    pub fn new(d: f64, alpha: f64) -> Result<Self> {
        let p = PyParams { d, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d >= 0.0 && self.d < 1.0) {
            return Err(domain(format!("discount must lie in [0, 1), got {}", self.d)));
        }
        if !(self.alpha.is_finite() && self.alpha > -self.d) && !(self.alpha == 0.0 && self.d == 0.0) {
            return Err(domain(format!(
                "concentration must exceed -d = {}, got {}",
                -self.d, self.alpha
            )));
        }
        Ok(())
    }
}

/// Posterior mean and variance of entropy, nats and nats².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Count statistics in the form the closed-form expressions consume.
#[derive(Debug, Clone)]
pub(crate) struct Suff {
    /// `(count, number of symbols with that count)`
    pub groups: Vec<(f64, f64)>,
    pub n: f64,
    pub k: f64,
}

impl Suff {
    pub fn new(m: &Multiplicities) -> Self {
        Suff {
            groups: m.iter().map(|(k, mk)| (k as f64, mk as f64)).collect(),
            n: m.n() as f64,
            k: m.k() as f64,
        }
    }

    pub fn from_counts(c: &CountData) -> Self {
        Self::new(&c.to_multiplicities())
    }
}

/// Prior expected entropy `ψ0(α + 1) − ψ0(1 − d)`.
pub fn py_prior_mean(p: PyParams) -> Result<f64> {
    p.validate()?;
    Ok(prior_mean(p.d, p.alpha))
}

/// Prior entropy variance.
pub fn py_prior_variance(p: PyParams) -> Result<f64> {
    p.validate()?;
    Ok(prior_variance(p.d, p.alpha))
}

pub(crate) fn prior_mean(d: f64, alpha: f64) -> f64 {
    psi0(alpha + 1.0) - psi0(1.0 - d)
}

pub(crate) fn prior_variance(d: f64, alpha: f64) -> f64 {
    let a1 = alpha + 1.0;
    let v = (alpha + d) / (a1 * a1 * (1.0 - d)) + (1.0 - d) / a1 * psi1(2.0 - d) - psi1(2.0 + alpha);
    v.max(0.0)
}

/// Posterior expected entropy given the counts.
pub fn py_posterior_mean(c: &CountData, p: PyParams) -> Result<f64> {
    p.validate()?;
    Ok(posterior_mean(&Suff::from_counts(c), p.d, p.alpha))
}

/// Posterior entropy variance given the counts.
pub fn py_posterior_variance(c: &CountData, p: PyParams) -> Result<f64> {
    p.validate()?;
    Ok(posterior_moments(&Suff::from_counts(c), p.d, p.alpha).variance)
}

/// Posterior mean and variance in one pass.
pub fn py_posterior_moments(c: &CountData, p: PyParams) -> Result<PosteriorMoments> {
    p.validate()?;
    Ok(posterior_moments(&Suff::from_counts(c), p.d, p.alpha))
}

pub(crate) fn posterior_mean(s: &Suff, d: f64, alpha: f64) -> f64 {
    if s.n == 0.0 {
        return prior_mean(d, alpha);
    }
    let an = alpha + s.n;
    let mut sum = 0.0;
    for &(k, m) in &s.groups {
        sum += m * (k - d) * psi0(k - d + 1.0);
    }
    psi0(an + 1.0) - (alpha + s.k * d) / an * psi0(1.0 - d) - sum / an
}

/// Moments of `p ~ Beta(a, b)` needed to combine the observed and unobserved parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct BetaMoments {
    pub mean: f64,
    pub var: f64,
    pub e_p2: f64,
    pub e_q2: f64,
    pub e_h: f64,
    pub var_h: f64,
    pub cov_p_h: f64,
}

/// `h(p) = −p ln p − (1−p) ln(1−p)` moments for `p ~ Beta(a, b)`, `a >= 0`, `b > 0`.
/// `a = 0` is the point mass at zero.
pub(crate) fn beta_moments(a: f64, b: f64) -> BetaMoments {
    if a == 0.0 {
        return BetaMoments { mean: 0.0, var: 0.0, e_p2: 0.0, e_q2: 1.0, e_h: 0.0, var_h: 0.0, cov_p_h: 0.0 };
    }
    let s = a + b;
    let mean = a / s;
    let r11 = a * b / (s * (s + 1.0));
    let r20 = a * (a + 1.0) / (s * (s + 1.0));
    let r02 = b * (b + 1.0) / (s * (s + 1.0));
    let var = r11 / s;

    let (pa1, pb1, ps1) = (psi0(a + 1.0), psi0(b + 1.0), psi0(s + 1.0));
    let (pa2, pb2, ps2) = (psi0(a + 2.0), psi0(b + 2.0), psi0(s + 2.0));
    let ts2 = psi1(s + 2.0);

    // E[p ln p], E[(1-p) ln(1-p)]
    let e_plp = mean * (pa1 - ps1);
    let e_qlq = (b / s) * (pb1 - ps1);
    let e_h = -e_plp - e_qlq;

    // E[p^2 ln^2 p], E[(1-p)^2 ln^2(1-p)], E[p(1-p) ln p ln(1-p)]
    let e_p2l2 = r20 * ((pa2 - ps2).powi(2) + psi1(a + 2.0) - ts2);
    let e_q2l2 = r02 * ((pb2 - ps2).powi(2) + psi1(b + 2.0) - ts2);
    let e_pqll = r11 * ((pa1 - ps2) * (pb1 - ps2) - ts2);
    let e_h2 = e_p2l2 + 2.0 * e_pqll + e_q2l2;

    // E[p h(p)] = −E[p^2 ln p] − E[p(1−p) ln(1−p)]
    let e_p2lp = r20 * (pa2 - ps2);
    let e_pqlq = r11 * (pb1 - ps2);
    let e_ph = -e_p2lp - e_pqlq;

    BetaMoments {
        mean,
        var,
        e_p2: r20,
        e_q2: r02,
        e_h,
        var_h: (e_h2 - e_h * e_h).max(0.0),
        cov_p_h: e_ph - mean * e_h,
    }
}

pub(crate) fn posterior_moments(s: &Suff, d: f64, alpha: f64) -> PosteriorMoments {
    if s.n == 0.0 {
        return PosteriorMoments { mean: prior_mean(d, alpha), variance: prior_variance(d, alpha) };
    }
    let a_tail = alpha + s.k * d;
    let b_head = s.n - s.k * d;
    let beta = beta_moments(a_tail.max(0.0), b_head);

    let head: Vec<(f64, f64)> = s.groups.iter().map(|&(k, m)| (k - d, m)).collect();
    let (mean_head, second_head) = dirichlet_entropy_moments(&head);
    let var_head = (second_head - mean_head * mean_head).max(0.0);
    let mean_tail = prior_mean(d, a_tail);
    let var_tail = prior_variance(d, a_tail);

    let mean = (1.0 - beta.mean) * mean_head + beta.mean * mean_tail + beta.e_h;
    let gap = mean_tail - mean_head;
    let var_mix = gap * gap * beta.var + beta.var_h + 2.0 * gap * beta.cov_p_h;
    let variance = beta.e_q2 * var_head + beta.e_p2 * var_tail + var_mix;
    debug_assert!(variance >= -1e-9, "negative posterior variance {variance}");
    PosteriorMoments { mean, variance: variance.max(0.0) }
}

/// Log probability of the observed partition of sample indices (the EPPF).
///
/// The product over new-table factors is summed in log space term by term.
/// `d = α = 0` with two or more distinct symbols gives `-inf`.
pub fn py_log_evidence(c: &CountData, p: PyParams) -> Result<f64> {
    p.validate()?;
    if c.is_empty() {
        return Err(crate::error::Error::EmptyData);
    }
    Ok(log_evidence(&Suff::from_counts(c), p.d, p.alpha))
}

/// Log probability of the multiplicity profile itself: the EPPF times the
/// number of partitions sharing it, `N! / (Π_k (k!)^{m_k} m_k!)`.
///
/// Differs from [`py_log_evidence`] by a term independent of `(d, α)`.
pub fn py_log_evidence_multiplicities(m: &Multiplicities, p: PyParams) -> Result<f64> {
    p.validate()?;
    if m.is_empty() {
        return Err(crate::error::Error::EmptyData);
    }
    Ok(log_evidence(&Suff::new(m), p.d, p.alpha) + partition_count_ln(m))
}

/// `ln [N! / Π_k (k!)^{m_k} m_k!]`.
pub fn partition_count_ln(m: &Multiplicities) -> f64 {
    let mut v = ln_gamma(m.n() as f64 + 1.0);
    for (k, mk) in m.iter() {
        v -= mk as f64 * ln_gamma(k as f64 + 1.0) + ln_gamma(mk as f64 + 1.0);
    }
    v
}

pub(crate) fn log_evidence(s: &Suff, d: f64, alpha: f64) -> f64 {
    let k = s.k as u64;
    if d == 0.0 && alpha == 0.0 && k >= 2 {
        return f64::NEG_INFINITY;
    }
    let mut lp = 0.0;
    for l in 1..k {
        lp += (alpha + l as f64 * d).ln();
    }
    for &(cnt, m) in &s.groups {
        lp += m * ln_rising(1.0 - d, cnt - 1.0);
    }
    lp - ln_rising(1.0 + alpha, s.n - 1.0)
}
