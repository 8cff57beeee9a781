//! Closed-form υ₂ for every channel family with tabulated (a, b).

use upsilon::channel::ChannelKind;
use upsilon::closed_form::{upsilon2_general_form, upsilon2_gamma};

fn main() -> upsilon::error::Result<()> {
    let d = 2;
    println!("{:<8} {:>8} {:>10} {:>10} {:>10} {:>10}", "channel", "param", "a", "b", "upsilon2", "branch");
    for kind in [ChannelKind::Gamma, ChannelKind::Delta, ChannelKind::GammaC, ChannelKind::DeltaC] {
        let (lo, hi) = kind.param_range(d);
        for param in [lo, 0.5 * (lo + hi), hi] {
            let (a, b) = kind.analytic_ab(d, param).expect("tabulated");
            let cf = upsilon2_general_form(a, b, d)?;
            println!("{:<8} {param:>8.4} {a:>10.6} {b:>10.6} {:>10.6} {:>10}", kind.name(), cf.upsilon2, cf.branch);
        }
    }

    // for d ≥ 3 the marginal branch wins on the whole CP-range
    for d in [3, 4] {
        let (lo, hi) = ChannelKind::Gamma.param_range(d);
        let v = upsilon2_gamma(d, lo)?.upsilon2.max(upsilon2_gamma(d, hi)?.upsilon2);
        println!("d = {d}: max over endpoints {v:.10}, d^(-1/2) = {:.10}", (d as f64).powf(-0.5));
    }
    Ok(())
}
