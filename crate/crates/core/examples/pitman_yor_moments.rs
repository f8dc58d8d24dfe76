//! Prior and posterior entropy moments under a Pitman-Yor process, and the
//! evidence surface over (d, α).
use pym_entropy::pitman_yor::{py_log_evidence, py_posterior_moments, py_prior_mean, py_prior_variance};
use pym_entropy::{CountData, PyParams};

fn main() -> pym_entropy::Result<()> {
    println!("prior E[H] and sd[H]");
    for d in [0.0, 0.25, 0.5, 0.75] {
        let row: Vec<String> = [1.0, 10.0, 100.0]
            .iter()
            .map(|&a| {
                let p = PyParams::new(d, a).unwrap();
                format!("{:6.3} ± {:5.3}", py_prior_mean(p).unwrap(), py_prior_variance(p).unwrap().sqrt())
            })
            .collect();
        println!("  d = {d:4}: {}", row.join("   "));
    }

    let c = CountData::from_count_vec(&[12, 7, 4, 3, 2, 2, 1, 1, 1, 1, 1]);
    println!("posterior given N = {}, K = {}", c.n(), c.k());
    for (d, a) in [(0.0, 2.0), (0.2, 2.0), (0.5, 1.0)] {
        let p = PyParams::new(d, a)?;
        let m = py_posterior_moments(&c, p)?;
        println!(
            "  (d, α) = ({d}, {a}): H = {:.4} ± {:.4}, ln p(x) = {:.3}",
            m.mean,
            m.variance.sqrt(),
            py_log_evidence(&c, p)?
        );
    }
    Ok(())
}
