//! Stick-breaking draws of Pitman-Yor weights and exact sampling of the
//! entropy posterior.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counts::CountData;
use crate::error::{domain, Error, Result};
use crate::pitman_yor::{prior_mean, prior_variance, PyParams};
use crate::pym::{PymConfig, PymPosterior};

/// Default tolerance on the variance contributed by the un-broken tail.
pub const DEFAULT_TAIL_VAR_TOL: f64 = 1e-4;
/// Hard limit on the number of sticks broken for one draw.
pub const STICK_CAP: usize = 10_000_000;

/// Seed for the crate's reproducible generator (ChaCha8).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent stream `id` under the same seed, for parallel tasks.
    pub fn stream(self, id: u64) -> ChaCha8Rng {
        let mut r = self.rng();
        r.set_stream(id);
        r
    }

    /// A new seed derived from this one and a task label.
    pub fn derive(self, label: u64) -> RngSeed {
        RngSeed(self.stream(label).random())
    }
}

/// Truncated stick-breaking draw.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSample {
    /// Size-biased weights in draw order.
    pub weights: Vec<f64>,
    /// Mass not yet assigned, `Π (1 − β_i)`.
    pub remaining_mass: f64,
}

/// `ln X` for `X ~ Gamma(shape, 1)`, stable for small shapes. `shape = 0` gives `-inf`.
pub fn ln_gamma_variate<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if shape >= 1.0 {
        let g = Gamma::new(shape, 1.0).expect("positive shape");
        return g.sample(rng).ln();
    }
    // G(a) = G(a + 1) U^(1/a)
    let u: f64 = 1.0 - rng.random::<f64>();
    ln_gamma_variate(shape + 1.0, rng) + u.ln() / shape
}

/// `(ln β, ln(1 − β))` for `β ~ Beta(a, b)`; `a` or `b` may be zero (point masses).
pub fn ln_beta_variate<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> (f64, f64) {
    let x = ln_gamma_variate(a, rng);
    let y = ln_gamma_variate(b, rng);
    if y == f64::NEG_INFINITY {
        return (0.0, f64::NEG_INFINITY);
    }
    if x == f64::NEG_INFINITY {
        return (f64::NEG_INFINITY, 0.0);
    }
    let m = x.max(y);
    let lse = m + ((x - m).exp() + (y - m).exp()).ln();
    (x - lse, y - lse)
}

/// Log-probabilities of one Dirichlet draw. Zero parameters give `-inf` entries.
pub fn dirichlet_log<R: Rng + ?Sized>(params: &[f64], rng: &mut R) -> Vec<f64> {
    let mut out: Vec<f64> = params.iter().map(|&a| ln_gamma_variate(a, rng)).collect();
    let m = out.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + out.iter().map(|&x| (x - m).exp()).sum::<f64>().ln();
    for x in &mut out {
        *x -= lse;
    }
    out
}

/// Break `n_sticks` sticks (fewer if the remaining mass hits zero).
pub fn stick_break(params: PyParams, n_sticks: usize, seed: RngSeed) -> Result<WeightSample> {
    params.validate()?;
    Ok(stick_break_with(params, n_sticks, &mut seed.rng()))
}

pub fn stick_break_with<R: Rng + ?Sized>(params: PyParams, n_sticks: usize, rng: &mut R) -> WeightSample {
    let PyParams { d, alpha } = params;
    let mut weights = Vec::with_capacity(n_sticks.min(1 << 16));
    let mut log_rem = 0.0;
    for i in 1..=n_sticks {
        let (lb, l1b) = ln_beta_variate(1.0 - d, alpha + i as f64 * d, rng);
        weights.push((log_rem + lb).exp());
        log_rem += l1b;
        if log_rem == f64::NEG_INFINITY {
            break;
        }
    }
    WeightSample { weights, remaining_mass: log_rem.exp() }
}

fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// One draw of `H(π)` for `π ~ PY(d, α)`, with the unbroken tail replaced by its
/// expected entropy once its variance contribution drops below `tail_var_tol`.
pub fn sample_prior_entropy(params: PyParams, tail_var_tol: f64, seed: RngSeed) -> Result<f64> {
    params.validate()?;
    if !(tail_var_tol > 0.0) {
        return Err(domain("tail variance tolerance must be positive"));
    }
    prior_entropy_with(params.d, params.alpha, tail_var_tol, &mut seed.rng())
}

pub(crate) fn prior_entropy_with<R: Rng + ?Sized>(d: f64, alpha: f64, tol: f64, rng: &mut R) -> Result<f64> {
    let mut h = 0.0;
    let mut log_rem: f64 = 0.0;
    let mut n = 0usize;
    loop {
        let r = log_rem.exp();
        let a_n = alpha + n as f64 * d;
        if r < 1e-12 || prior_variance(d, a_n) * r * r < tol {
            return Ok(h - xlogx(r) + r * prior_mean(d, a_n));
        }
        if n >= STICK_CAP {
            return Err(Error::TailTruncation { cap: STICK_CAP, remaining: r });
        }
        n += 1;
        let (lb, l1b) = ln_beta_variate(1.0 - d, alpha + n as f64 * d, rng);
        let lw = log_rem + lb;
        h -= lw.exp() * lw;
        log_rem += l1b;
    }
}

/// One draw of `H` from the posterior over distributions given counts and `(d, α)`.
///
/// The observed symbols get Dirichlet(`n_i − d`) weights jointly with the unseen
/// mass `p*` (parameter `α + Kd`); the unseen mass is then split by a fresh
/// PY(d, α + Kd) draw.
pub fn sample_posterior_entropy(c: &CountData, params: PyParams, seed: RngSeed) -> Result<f64> {
    params.validate()?;
    if c.is_empty() {
        return Err(Error::EmptyData);
    }
    let groups: Vec<(f64, f64)> = c.to_multiplicities().iter().map(|(k, m)| (k as f64, m as f64)).collect();
    posterior_entropy_with(&groups, params.d, params.alpha, DEFAULT_TAIL_VAR_TOL, &mut seed.rng())
}

pub(crate) fn posterior_entropy_with<R: Rng + ?Sized>(
    groups: &[(f64, f64)],
    d: f64,
    alpha: f64,
    tol: f64,
    rng: &mut R,
) -> Result<f64> {
    let k: f64 = groups.iter().map(|g| g.1).sum();
    let a_tail = (alpha + k * d).max(0.0);
    let mut params = Vec::with_capacity(k as usize + 1);
    for &(cnt, m) in groups {
        params.extend(std::iter::repeat_n(cnt - d, m as usize));
    }
    params.push(a_tail);
    let lp = dirichlet_log(&params, rng);
    let mut h = 0.0;
    for &l in &lp {
        if l.is_finite() {
            h -= l.exp() * l;
        }
    }
    let p_star = lp.last().map_or(0.0, |l| l.exp());
    if p_star > 0.0 {
        // Only p*² of the tail variance reaches H, so the tolerance scales up.
        let tail = prior_entropy_with(d, a_tail, tol / (p_star * p_star), rng)?;
        h += p_star * tail;
    }
    Ok(h)
}

/// `n` posterior entropy draws at fixed `(d, α)`, one independent stream per draw.
pub fn posterior_entropy_draws(
    c: &CountData,
    params: PyParams,
    n: usize,
    tail_var_tol: f64,
    seed: RngSeed,
) -> Result<Vec<f64>> {
    params.validate()?;
    if c.is_empty() {
        return Err(Error::EmptyData);
    }
    let groups: Vec<(f64, f64)> = c.to_multiplicities().iter().map(|(k, m)| (k as f64, m as f64)).collect();
    par_draws(n, seed, |rng| posterior_entropy_with(&groups, params.d, params.alpha, tail_var_tol, rng))
}

/// `n` prior entropy draws, one independent stream per draw.
pub fn prior_entropy_draws(params: PyParams, n: usize, tail_var_tol: f64, seed: RngSeed) -> Result<Vec<f64>> {
    params.validate()?;
    par_draws(n, seed, |rng| prior_entropy_with(params.d, params.alpha, tail_var_tol, rng))
}

/// Draws from the full PYM entropy posterior: a grid node `(d, α)` is picked with
/// its posterior weight, then `H` is drawn given that node.
pub fn sample_pym_posterior(c: &CountData, cfg: &PymConfig, n_draws: usize, seed: RngSeed) -> Result<Vec<f64>> {
    let post = PymPosterior::fit(c, cfg)?;
    post.sample(n_draws, seed)
}

/// Run `draw(rng)` `n` times on independent streams in parallel, in draw order.
pub(crate) fn par_draws<F>(n: usize, seed: RngSeed, draw: F) -> Result<Vec<f64>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|i| draw(&mut seed.stream(i as u64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(d: f64, a: f64) -> PyParams {
        PyParams::new(d, a).unwrap()
    }

    fn mean_se(xs: &[f64]) -> (f64, f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (m, v, (v / n).sqrt())
    }

    #[test]
    fn seeds_are_reproducible() {
        let a: Vec<u64> = (0..4).map(|_| 0).scan(RngSeed(9).rng(), |r, _| Some(r.random())).collect();
        let b: Vec<u64> = (0..4).map(|_| 0).scan(RngSeed(9).rng(), |r, _| Some(r.random())).collect();
        assert_eq!(a, b);
        let s0: u64 = RngSeed(9).stream(0).random();
        let s1: u64 = RngSeed(9).stream(1).random();
        assert_ne!(s0, s1);
    }

    #[test]
    fn degenerate_stick() {
        let w = stick_break(pp(0.0, 0.0), 10, RngSeed(1)).unwrap();
        assert_eq!(w.weights, vec![1.0]);
        assert_eq!(w.remaining_mass, 0.0);
        assert_eq!(sample_prior_entropy(pp(0.0, 0.0), 1e-4, RngSeed(1)).unwrap(), 0.0);
    }

    #[test]
    fn sticks_sum_to_one() {
        for (i, (d, a)) in [(0.0, 5.0), (0.3, 2.0), (0.8, 0.5), (0.5, -0.4)].into_iter().enumerate() {
            let w = stick_break(pp(d, a), 300, RngSeed(i as u64)).unwrap();
            let s: f64 = w.weights.iter().sum::<f64>() + w.remaining_mass;
            assert!((s - 1.0).abs() < 1e-12, "sum {s}");
            assert!(w.weights.iter().all(|&x| x > 0.0 && x < 1.0 || x == 1.0));
        }
    }

    #[test]
    fn first_stick_mean() {
        let mut rng = RngSeed(5).rng();
        let xs: Vec<f64> = (0..10_000).map(|_| stick_break_with(pp(0.0, 5.0), 500, &mut rng).weights[0]).collect();
        let (m, _, se) = mean_se(&xs);
        assert!((m - 1.0 / 6.0).abs() < 3.0 * se, "{m}");
    }

    #[test]
    fn size_biased_weights_decrease() {
        let mut rng = RngSeed(6).rng();
        let mut sums = [0.0; 7];
        for _ in 0..10_000 {
            let w = stick_break_with(pp(0.3, 2.0), 7, &mut rng);
            for (s, x) in sums.iter_mut().zip(&w.weights) {
                *s += x;
            }
        }
        for i in 0..6 {
            assert!(sums[i + 1] < sums[i]);
        }
    }

    #[test]
    fn prior_entropy_mean_matches_closed_form() {
        for (i, (d, a)) in [(0.0, 1.0), (0.5, 1.0)].into_iter().enumerate() {
            let xs = par_draws(10_000, RngSeed(40 + i as u64), |r| prior_entropy_with(d, a, 1e-4, r)).unwrap();
            let (m, _, se) = mean_se(&xs);
            assert!((m - prior_mean(d, a)).abs() < 3.0 * se, "(d={d}, a={a}): {m}");
        }
    }

    #[test]
    fn posterior_sampling_concentrates() {
        let c = CountData::from_count_vec(&[1_000_000]);
        let groups = [(1e6, 1.0)];
        let mut xs = par_draws(1000, RngSeed(3), |r| posterior_entropy_with(&groups, 0.0, 0.01, 1e-4, r)).unwrap();
        xs.sort_by(f64::total_cmp);
        assert!(xs[500] < 0.01);
        assert!(sample_posterior_entropy(&c, pp(0.0, 0.01), RngSeed(1)).unwrap() >= 0.0);
    }

    #[test]
    fn ln_gamma_variate_small_shape_mean() {
        // E[X] = shape for Gamma(shape, 1).
        let mut rng = RngSeed(8).rng();
        let n = 200_000;
        let s: f64 = (0..n).map(|_| ln_gamma_variate(0.05, &mut rng).exp()).sum();
        let mean = s / n as f64;
        // sd of a Gamma(0.05) variate is sqrt(0.05).
        assert!((mean - 0.05).abs() < 4.0 * (0.05f64 / n as f64).sqrt());
    }
}
