//! Projecting onto F_d(B) and the purity tradeoff Tr σ² + Tr σ_B² ≤ 1 + 1/d.

use upsilon::feasible::{random_feasible, FeasibleState};
use upsilon::rng::ExperimentRng;

fn main() -> upsilon::error::Result<()> {
    let d = 3;
    let bound = 1.0 + 1.0 / d as f64;
    let mut rng = ExperimentRng::new(11, 0);
    for _ in 0..5 {
        let s = random_feasible(&mut rng, &[d], 4)?;
        let v = s.purity() + s.marginal_b().purity();
        println!("random: {v:.6} ≤ {bound:.6} (feasibility error {:.1e})", s.feasibility_error());
    }
    let phi = FeasibleState::maximally_entangled(&[d], d)?;
    let prod = FeasibleState::marginal_product(&[d], d, 0)?;
    for (label, s) in [("Φ_d", phi), ("I/d ⊗ |0⟩⟨0|", prod)] {
        println!("{label}: {:.15}", s.purity() + s.marginal_b().purity());
    }
    Ok(())
}
