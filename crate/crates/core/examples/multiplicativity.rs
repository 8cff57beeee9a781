//! Two-copy multiplicativity gap υ₂(N⊗N) − υ₂(N)² for a transpose-depolarizing
//! and a depolarizing channel.

use upsilon::channel::{make_depolarizing, make_transpose_depolarizing};
use upsilon::optimize::{multiplicativity_report, OptimizerConfig};

fn main() -> upsilon::error::Result<()> {
    let config = OptimizerConfig::default().with_seed(1).with_restarts(4);
    let channels = [
        ("gamma t=-1", make_transpose_depolarizing(2, -1.0)?),
        ("delta p=0.5", make_depolarizing(2, 0.5)?),
    ];
    for (label, n) in channels {
        let r = multiplicativity_report(&n, 2, &config)?;
        println!(
            "{label}: one copy {:.8} ({:?}), two copies {:.8}, gap {:+.2e}",
            r.one_copy, r.one_copy_source, r.n_copy.best_value, r.gap
        );
    }
    Ok(())
}
