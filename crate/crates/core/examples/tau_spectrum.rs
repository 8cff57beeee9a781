//! Eigenvalues of τ = (Γ_t ⊗ id)(Φ_d) built through the channel, against the two-level formula.

use upsilon::channel::make_transpose_depolarizing;
use upsilon::closed_form::tau_spectrum;
use upsilon::tensor::{hermitian_eig, SquareOperator};

fn main() -> upsilon::error::Result<()> {
    let (d, t) = (3, -0.3);
    let tau = make_transpose_depolarizing(d, t)?.apply_to_factor(&SquareOperator::maximally_entangled(d), 0)?;
    let numeric = hermitian_eig(&tau)?;
    let exact = tau_spectrum(d, t)?;
    println!("numerical clusters: {:?}", numeric.clusters(1e-9));
    println!(
        "formula: λ+ = {:.12} (×{}), λ− = {:.12} (×{})",
        exact.lambda_plus, exact.mult_plus, exact.lambda_minus, exact.mult_minus
    );
    Ok(())
}
