//! Estimator convergence on a known distribution, written as CSV.
use pym_entropy::cli::{converge_csv, run_converge, ConvergeOptions, Estimator};
use pym_entropy::PymConfig;

fn main() -> pym_entropy::Result<()> {
    let opts = ConvergeOptions {
        dist: "powerlaw:2:10000".parse()?,
        sizes: vec![30, 100, 300, 1000, 3000],
        estimators: vec![Estimator::Plugin, Estimator::Mima, Estimator::Nsb, Estimator::Pym],
        trials: 3,
        seed: 7,
        alphabet_size: None,
        pym: PymConfig::default(),
    };
    print!("{}", converge_csv(&run_converge(&opts)?));
    Ok(())
}
