//! Projected gradient ascent over F_d(B) for Γ_t, compared with the closed form.

use upsilon::channel::make_transpose_depolarizing;
use upsilon::closed_form::upsilon2_gamma;
use upsilon::optimize::{optimize_upsilon2, OptimizerConfig};

fn main() -> upsilon::error::Result<()> {
    let d = 2;
    let config = OptimizerConfig::default().with_seed(7).with_d_b(d * d);
    for t in [-1.0, -0.5, 0.0, 1.0 / 3.0] {
        let g = make_transpose_depolarizing(d, t)?;
        let report = optimize_upsilon2(&g, &config)?;
        let exact = upsilon2_gamma(d, t)?;
        println!(
            "t = {t:>7.4}: optimizer {:.10}, closed form {:.10} ({}), best restart {}",
            report.best_value, exact.upsilon2, exact.branch, report.best_restart
        );
    }
    Ok(())
}
