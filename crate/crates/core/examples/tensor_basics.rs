//! Partial trace, partial transpose and Schatten norms on small operators.

use upsilon::tensor::{partial_trace, partial_transpose, schatten_norm, swap_operator, SquareOperator};

fn main() -> upsilon::error::Result<()> {
    let phi = SquareOperator::maximally_entangled(3);
    let marginal = partial_trace(&phi, &[0])?;
    println!("Tr_B Φ_3 = I/3: {}", marginal.distance(&SquareOperator::maximally_mixed(3)) < 1e-15);

    // Φ^{T_B} is the swap divided by d
    let pt = partial_transpose(&phi, 1)?;
    println!("‖Φ^(T_B) − Π/3‖₂ = {:.1e}", pt.distance(&swap_operator(3).scaled(1.0 / 3.0)));

    for p in [1.0, 2.0, f64::INFINITY] {
        println!("‖Φ^(T_B)‖_{p} = {:.6}", schatten_norm(&pt, p)?);
    }
    Ok(())
}
