//! Finite-alphabet estimators: plugin, Miller-Madow, fixed-concentration
//! Dirichlet posterior moments, NSB and its asymptotic form.

use crate::counts::CountData;
use crate::error::{domain, Error, Result};
use crate::estimate::EntropyEstimate;
use crate::quadrature::integrate_peaked;
use crate::special::{ln_gamma, ln_rising, psi0, psi1};

/// Posterior mean and spread of entropy under a symmetric Dirichlet prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirPosteriorMoments {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

/// Maximum-likelihood ("plugin") entropy of the empirical frequencies.
pub fn plugin_entropy(c: &CountData) -> Result<f64> {
    if c.is_empty() {
        return Err(Error::EmptyData);
    }
    let n = c.n() as f64;
    let h = c
        .to_multiplicities()
        .iter()
        .map(|(k, m)| {
            let p = k as f64 / n;
            -(m as f64) * p * p.ln()
        })
        .sum::<f64>();
    Ok(h.max(0.0))
}

/// Plugin entropy plus the `(K - 1) / 2N` bias correction.
pub fn miller_madow(c: &CountData) -> Result<f64> {
    let h = plugin_entropy(c)?;
    Ok(h + (c.k() as f64 - 1.0) / (2.0 * c.n() as f64))
}

/// Entropy moments of a Dirichlet distribution given as groups
/// `(parameter, number of bins sharing it)`.
///
/// Returns `(E[H], E[H^2])`.
pub(crate) fn dirichlet_entropy_moments(groups: &[(f64, f64)]) -> (f64, f64) {
    let total: f64 = groups.iter().map(|&(a, m)| m * a).sum();
    if total <= 0.0 {
        return (0.0, 0.0);
    }
    let psi_t1 = psi0(total + 1.0);
    let psi_t2 = psi0(total + 2.0);
    let tri_t2 = psi1(total + 2.0);

    let mut mean = psi_t1;
    let mut s1 = 0.0;
    let mut sq_diag = 0.0;
    let mut sum_a2 = 0.0;
    let mut self_terms = 0.0;
    for &(a, m) in groups {
        if m == 0.0 || a <= 0.0 {
            continue;
        }
        mean -= m * (a / total) * psi0(a + 1.0);
        let t = psi0(a + 1.0) - psi_t2;
        s1 += m * a * t;
        sq_diag += m * a * a * t * t;
        sum_a2 += m * a * a;
        let u = psi0(a + 2.0) - psi_t2;
        let j = u * u + psi1(a + 2.0) - tri_t2;
        self_terms += m * a * (a + 1.0) * j;
    }
    let cross = s1 * s1 - sq_diag - tri_t2 * (total * total - sum_a2);
    let second = (cross + self_terms) / ((total + 1.0) * total);
    (mean, second)
}

fn finalize(mean: f64, second: f64) -> DirPosteriorMoments {
    let var = second - mean * mean;
    debug_assert!(var >= -1e-9 * (1.0 + second.abs()), "negative variance {var}");
    DirPosteriorMoments { mean, second_moment: second, variance: var.max(0.0) }
}

fn check_alphabet(c: &CountData, a: u64) -> Result<()> {
    if a < c.k() || a == 0 {
        return Err(Error::InconsistentAlphabet { alphabet: a, observed: c.k() });
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("concentration must be finite and positive, got {alpha}")))
    }
}

fn posterior_groups(c: &CountData, a: u64, alpha: f64) -> Vec<(f64, f64)> {
    let mut groups: Vec<(f64, f64)> = c
        .to_multiplicities()
        .iter()
        .map(|(k, m)| (k as f64 + alpha, m as f64))
        .collect();
    groups.push((alpha, (a - c.k()) as f64));
    groups
}

/// Posterior entropy moments under a symmetric Dirichlet(`alpha`) prior on `a` bins.
pub fn dir_posterior_moments(c: &CountData, a: u64, alpha: f64) -> Result<DirPosteriorMoments> {
    check_alphabet(c, a)?;
    check_alpha(alpha)?;
    let (mean, second) = dirichlet_entropy_moments(&posterior_groups(c, a, alpha));
    Ok(finalize(mean, second))
}

/// Unnormalized NSB hyperprior density: `A ψ1(Aα + 1) − ψ1(α + 1)`.
pub fn nsb_weight(alpha: f64, a: u64) -> Result<f64> {
    check_alpha(alpha)?;
    if a == 0 {
        return Err(domain("alphabet size must be positive"));
    }
    Ok(nsb_weight_raw(alpha, a as f64))
}

fn nsb_weight_raw(alpha: f64, a: f64) -> f64 {
    (a * psi1(a * alpha + 1.0) - psi1(alpha + 1.0)).max(0.0)
}

/// Log probability of the observed counts (with symbol identities) under a
/// Dirichlet-multinomial with `a` bins and concentration `alpha`.
pub fn polya_log_evidence(c: &CountData, a: u64, alpha: f64) -> Result<f64> {
    check_alphabet(c, a)?;
    check_alpha(alpha)?;
    Ok(polya_raw(c, a as f64, alpha))
}

fn polya_raw(c: &CountData, a: f64, alpha: f64) -> f64 {
    let n = c.n() as f64;
    let mut lp = ln_gamma(n + 1.0) - ln_rising(a * alpha, n);
    for (k, m) in c.to_multiplicities().iter() {
        let k = k as f64;
        lp += m as f64 * (ln_rising(alpha, k) - ln_gamma(k + 1.0));
    }
    lp
}

/// NSB estimate: Dirichlet posterior moments averaged over `alpha` with the
/// prior that makes the implied entropy prior flat on `[0, ln A]`.
pub fn nsb_estimate(c: &CountData, a: u64) -> Result<EntropyEstimate> {
    check_alphabet(c, a)?;
    let af = a as f64;
    if a == 1 {
        // One bin: entropy is exactly zero.
        let mut est = EntropyEstimate::point(0.0);
        est.std = Some(0.0);
        return Ok(est);
    }
    let mults: Vec<(f64, f64)> = c
        .to_multiplicities()
        .iter()
        .map(|(k, m)| (k as f64, m as f64))
        .collect();
    let empty = (a - c.k()) as f64;
    let f = |t: f64| {
        let alpha = t.exp();
        let logw = polya_raw(c, af, alpha) + nsb_weight_raw(alpha, af).ln() + t;
        let mut groups: Vec<(f64, f64)> = mults.iter().map(|&(k, m)| (k + alpha, m)).collect();
        groups.push((alpha, empty));
        let (m1, m2) = dirichlet_entropy_moments(&groups);
        (logw, [1.0, m1, m2])
    };
    let lo = -20.0 - af.ln();
    let r = integrate_peaked(f, lo, 20.0, 1e-10)?;
    let [z, e1, e2] = r.values;
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Numerical(format!("NSB normalizer is {z}")));
    }
    let mean = e1 / z;
    let var = (e2 / z - mean * mean).max(0.0);
    let mut est = EntropyEstimate::point(mean);
    est.std = Some(var.sqrt());
    est.map_alpha = Some(r.mode.exp());
    est.log_evidence_at_map = Some(polya_raw(c, af, r.mode.exp()));
    est.diagnostics.node_count = r.evals;
    est.diagnostics.alpha_range = Some([lo.exp(), 20f64.exp()]);
    Ok(est)
}

/// Asymptotic NSB formula, valid once there are coincidences:
/// `2 ln N + ψ0(N − K) − ψ0(1) − ln 2`.
pub fn ansb_estimate(c: &CountData) -> Result<EntropyEstimate> {
    let delta = c.coincidences();
    if delta < 1 {
        return Err(Error::NoCoincidences { found: delta, required: 1 });
    }
    let n = c.n() as f64;
    let h = 2.0 * n.ln() + psi0(delta as f64) - psi0(1.0) - std::f64::consts::LN_2;
    Ok(EntropyEstimate::point(h))
}
