//! The Werner-state complement: Tr_C of a purification of W(t) against the
//! closed expression d·((Γ_t^c)† ⊗ id)(Φ_d ⊗ Φ_d).

use upsilon::verify::check_werner_reconstruction;

fn main() -> upsilon::error::Result<()> {
    for d in [2, 3] {
        for t in [-1.0 / (d as f64 - 1.0), 0.0, 1.0 / (d as f64 + 1.0)] {
            let r = check_werner_reconstruction(d, t)?;
            println!("d = {d}, t = {t:>7.4}: residual {:.2e} ({})", r.residual, if r.passed { "ok" } else { "FAIL" });
        }
    }
    Ok(())
}
