//! Exact draws from the entropy posterior, checked against the quadrature moments.
use pym_entropy::pym::PymPosterior;
use pym_entropy::sampler::{sample_prior_entropy, stick_break, DEFAULT_TAIL_VAR_TOL};
use pym_entropy::{CountData, PyParams, PymConfig, RngSeed};

fn main() -> pym_entropy::Result<()> {
    let w = stick_break(PyParams::new(0.3, 5.0)?, 10, RngSeed(0))?;
    let shown: Vec<String> = w.weights.iter().map(|x| format!("{x:.3}")).collect();
    println!("first sticks: {} (remaining {:.3})", shown.join(" "), w.remaining_mass);

    let h = sample_prior_entropy(PyParams::new(0.3, 5.0)?, DEFAULT_TAIL_VAR_TOL, RngSeed(1))?;
    println!("one prior entropy draw: {h:.4}");

    let c = CountData::from_samples("abracadabra alakazam".chars().filter(|c| !c.is_whitespace()).map(String::from));
    let post = PymPosterior::fit(&c, &PymConfig::default())?;
    let xs = post.sample(20_000, RngSeed(2))?;
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let sd = (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let mut sorted = xs.clone();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| sorted[((n - 1.0) * p) as usize];
    println!("sampled  {m:.4} ± {sd:.4}, 95% interval [{:.4}, {:.4}]", q(0.025), q(0.975));
    println!("gridded  {:.4} ± {:.4}", post.mean, post.variance.sqrt());
    Ok(())
}
