//! Test distributions with known entropy and iid count generation.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

use crate::counts::CountData;
use crate::error::{Error, Result};
use crate::pitman_yor::PyParams;
use crate::sampler::{ln_beta_variate, RngSeed, STICK_CAP};

/// Tail mass below which a realized Pitman-Yor draw stops breaking sticks.
pub const PY_TAIL_MASS: f64 = 1e-12;
/// Poisson support is cut where the cumulative mass first exceeds `1 − POISSON_TAIL`.
pub const POISSON_TAIL: f64 = 1e-15;

/// Which test distribution to build, e.g. `uniform:1000`, `powerlaw:2:10000`,
/// `py:0.25:40`, `poisson:2.71828`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistSpec {
    Uniform { size: usize },
    /// `p_n ∝ n^(−exponent)` for `n = 1..=size`.
    PowerLaw { exponent: f64, size: usize },
    /// One realization of a Pitman-Yor weight vector.
    PitmanYor { d: f64, alpha: f64 },
    Poisson { rate: f64 },
}

impl FromStr for DistSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = |why: &str| Error::Config(format!("distribution spec {s:?}: {why}"));
        let num = |x: &str| x.parse::<f64>().map_err(|_| bad(&format!("{x:?} is not a number")));
        let size = |x: &str| x.parse::<usize>().map_err(|_| bad(&format!("{x:?} is not a positive integer")));
        let spec = match parts.as_slice() {
            ["uniform", n] => DistSpec::Uniform { size: size(n)? },
            ["powerlaw", a, n] => DistSpec::PowerLaw { exponent: num(a)?, size: size(n)? },
            ["py", d, a] => DistSpec::PitmanYor { d: num(d)?, alpha: num(a)? },
            ["poisson", l] => DistSpec::Poisson { rate: num(l)? },
            _ => return Err(bad("expected uniform:S, powerlaw:a:S, py:d:alpha or poisson:lambda")),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistSpec::Uniform { size } => write!(f, "uniform:{size}"),
            DistSpec::PowerLaw { exponent, size } => write!(f, "powerlaw:{exponent}:{size}"),
            DistSpec::PitmanYor { d, alpha } => write!(f, "py:{d}:{alpha}"),
            DistSpec::Poisson { rate } => write!(f, "poisson:{rate}"),
        }
    }
}

impl DistSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DistSpec::Uniform { size } => size >= 1,
            DistSpec::PowerLaw { exponent, size } => exponent > 0.0 && exponent.is_finite() && size >= 1,
            DistSpec::PitmanYor { d, alpha } => PyParams::new(d, alpha).is_ok(),
            DistSpec::Poisson { rate } => rate > 0.0 && rate.is_finite() && rate < 1e6,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid distribution parameters in {self}")))
        }
    }
}

/// Explicit probability vector with its exact entropy.
#[derive(Debug, Clone, PartialEq)]
pub struct KnownDistribution {
    pub spec: DistSpec,
    pub probabilities: Vec<f64>,
    /// Entropy in nats.
    pub true_entropy: f64,
}

/// Build the distribution. `seed` only matters for Pitman-Yor realizations.
pub fn build(spec: DistSpec, seed: RngSeed) -> Result<KnownDistribution> {
    spec.validate()?;
    let weights = match spec {
        DistSpec::Uniform { size } => vec![1.0; size],
        DistSpec::PowerLaw { exponent, size } => (1..=size).map(|n| (n as f64).powf(-exponent)).collect(),
        DistSpec::PitmanYor { d, alpha } => realize_py(d, alpha, &mut seed.rng())?,
        DistSpec::Poisson { rate } => poisson_weights(rate),
    };
    Ok(KnownDistribution::from_weights(spec, weights))
}

impl KnownDistribution {
    fn from_weights(spec: DistSpec, weights: Vec<f64>) -> Self {
        let total = neumaier_sum(weights.iter().copied());
        let probabilities: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let true_entropy = entropy(&probabilities);
        KnownDistribution { spec, probabilities, true_entropy }
    }

    /// `n` iid draws tallied into counts; symbol ids are indices into `probabilities`.
    pub fn draw_counts(&self, n: u64, seed: RngSeed) -> CountData {
        self.draw_counts_with(n, &mut seed.rng())
    }

    pub fn draw_counts_with<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> CountData {
        let mut counts = vec![0u64; self.probabilities.len()];
        if self.probabilities.len() == 1 {
            counts[0] = n;
        } else {
            let alias = WeightedAliasIndex::new(self.probabilities.clone()).expect("valid probability vector");
            for _ in 0..n {
                counts[alias.sample(rng)] += 1;
            }
        }
        CountData::from_count_vec(&counts)
    }
}

/// `−Σ p ln p` with compensated summation.
pub fn entropy(p: &[f64]) -> f64 {
    neumaier_sum(p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()))
}

fn neumaier_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

fn poisson_weights(rate: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut ln_p = -rate;
    let mut cum = 0.0;
    let mut k = 0u64;
    loop {
        let p = ln_p.exp();
        out.push(p);
        cum += p;
        // Past the mode, stop once the remaining mass is negligible.
        if cum > 1.0 - POISSON_TAIL && (k as f64) >= rate {
            break;
        }
        k += 1;
        ln_p += rate.ln() - (k as f64).ln();
    }
    out
}

fn realize_py<R: Rng + ?Sized>(d: f64, alpha: f64, rng: &mut R) -> Result<Vec<f64>> {
    let mut weights = Vec::new();
    let mut log_rem = 0.0f64;
    let mut i = 0usize;
    while log_rem.exp() >= PY_TAIL_MASS {
        if i >= STICK_CAP {
            return Err(Error::TailTruncation { cap: STICK_CAP, remaining: log_rem.exp() });
        }
        i += 1;
        let (lb, l1b) = ln_beta_variate(1.0 - d, alpha + i as f64 * d, rng);
        weights.push((log_rem + lb).exp());
        log_rem += l1b;
    }
    let rest = log_rem.exp();
    if rest > 0.0 {
        weights.push(rest);
    }
    Ok(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::plugin_entropy;

    #[test]
    fn parse_specs() {
        assert_eq!("uniform:1000".parse::<DistSpec>().unwrap(), DistSpec::Uniform { size: 1000 });
        assert_eq!(
            "powerlaw:2:10000".parse::<DistSpec>().unwrap(),
            DistSpec::PowerLaw { exponent: 2.0, size: 10_000 }
        );
        assert_eq!("py:0.25:40".parse::<DistSpec>().unwrap(), DistSpec::PitmanYor { d: 0.25, alpha: 40.0 });
        assert_eq!("poisson:2.71828".parse::<DistSpec>().unwrap(), DistSpec::Poisson { rate: 2.71828 });
        for bad in ["uniform:0", "uniform", "powerlaw:-1:10", "py:1.2:3", "poisson:0", "zipf:2"] {
            assert!(matches!(bad.parse::<DistSpec>(), Err(Error::Config(_))), "{bad}");
        }
        let s: DistSpec = "py:0.25:40".parse().unwrap();
        assert_eq!(s.to_string().parse::<DistSpec>().unwrap(), s);
    }

    #[test]
    fn uniform_entropy() {
        let u = build(DistSpec::Uniform { size: 1000 }, RngSeed(0)).unwrap();
        assert!((u.true_entropy - 1000f64.ln()).abs() < 1e-12);
        assert_eq!(build(DistSpec::Uniform { size: 1 }, RngSeed(0)).unwrap().true_entropy, 0.0);
    }

    #[test]
    fn power_law_entropy_matches_extended_precision() {
        // Reference sums evaluated at 40 significant digits.
        let p = build(DistSpec::PowerLaw { exponent: 1.0, size: 1000 }, RngSeed(0)).unwrap();
        assert!((p.true_entropy - 5.191_011_033_332_522_862).abs() < 1e-12);
        let p = build(DistSpec::PowerLaw { exponent: 2.0, size: 10_000 }, RngSeed(0)).unwrap();
        assert!((p.true_entropy - 1.636_389_348_833_126_212).abs() < 1e-12);
    }

    #[test]
    fn poisson_support() {
        let p = build(DistSpec::Poisson { rate: std::f64::consts::E }, RngSeed(0)).unwrap();
        let s: f64 = p.probabilities.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!((20..=30).contains(&p.probabilities.len()), "{}", p.probabilities.len());
    }

    #[test]
    fn weights_are_normalized_and_entropy_recomputes() {
        for (i, spec) in ["uniform:7", "powerlaw:1.3:500", "py:0.2:10", "poisson:4"].iter().enumerate() {
            let k = build(spec.parse().unwrap(), RngSeed(i as u64)).unwrap();
            let s: f64 = k.probabilities.iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "{spec}");
            let direct: f64 = -k.probabilities.iter().map(|&p| if p > 0.0 { p * p.ln() } else { 0.0 }).sum::<f64>();
            assert!((direct - k.true_entropy).abs() < 1e-12, "{spec}");
        }
    }

    #[test]
    fn py_realization_depends_on_seed_only() {
        let spec: DistSpec = "py:0.25:40".parse().unwrap();
        let a = build(spec, RngSeed(4)).unwrap();
        let b = build(spec, RngSeed(4)).unwrap();
        let c = build(spec, RngSeed(5)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.true_entropy, c.true_entropy);
        assert!(*a.probabilities.last().unwrap() < 1e-11);
    }

    #[test]
    fn draws() {
        let one = build(DistSpec::Uniform { size: 1 }, RngSeed(0)).unwrap();
        let c = one.draw_counts(5, RngSeed(1));
        assert_eq!((c.n(), c.k()), (5, 1));

        let two = build(DistSpec::Uniform { size: 2 }, RngSeed(0)).unwrap();
        let c = two.draw_counts(100_000, RngSeed(2));
        let sd = (100_000f64 * 0.25).sqrt();
        for k in c.counts() {
            assert!((k as f64 - 50_000.0).abs() < 5.0 * sd);
        }
        assert_eq!(two.draw_counts(1000, RngSeed(3)), two.draw_counts(1000, RngSeed(3)));
    }

    #[test]
    fn plugin_converges_on_power_law() {
        let p = build(DistSpec::PowerLaw { exponent: 2.0, size: 10_000 }, RngSeed(0)).unwrap();
        let c = p.draw_counts(1_000_000, RngSeed(11));
        assert!((plugin_entropy(&c).unwrap() - p.true_entropy).abs() < 0.01);
    }
}
