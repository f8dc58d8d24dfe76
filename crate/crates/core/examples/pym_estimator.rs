//! The full PYM estimator on heavy-tailed data, next to the plugin estimate.
use pym_entropy::dirichlet::plugin_entropy;
use pym_entropy::pym::{dpm_estimate, PymPosterior};
use pym_entropy::synthetic::{build, DistSpec};
use pym_entropy::{PymConfig, RngSeed};

fn main() -> pym_entropy::Result<()> {
    let dist = build(DistSpec::PitmanYor { d: 0.3, alpha: 10.0 }, RngSeed(1))?;
    let cfg = PymConfig::default();
    println!("true entropy {:.4} nats ({} atoms realized)", dist.true_entropy, dist.probabilities.len());
    for n in [100u64, 1_000, 10_000, 100_000] {
        let c = dist.draw_counts(n, RngSeed(n));
        let post = PymPosterior::fit(&c, &cfg)?;
        let e = post.estimate();
        let dpm = dpm_estimate(&c, &cfg)?;
        println!(
            "N={n:>6}  plugin {:.4}  dpm {:.4}  pym {:.4} ± {:.4}  MAP (d, α) = ({:.3}, {:.2})  nodes {}",
            plugin_entropy(&c)?,
            dpm.mean,
            e.mean,
            e.std.unwrap(),
            post.map.d,
            post.map.alpha,
            e.diagnostics.node_count,
        );
        for w in &e.diagnostics.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(())
}
