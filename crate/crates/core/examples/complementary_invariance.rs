//! The two reduced operators of one pure state, built from (Ω, Λ) and from
//! their complements, have the same Schatten norms.

use upsilon::channel::{complementary, make_transpose_depolarizing};
use upsilon::rng::{random_channel, ExperimentRng};
use upsilon::tensor::{schatten_norm, SquareOperator};

fn main() -> upsilon::error::Result<()> {
    let mut rng = ExperimentRng::new(3, 0);
    let omega = make_transpose_depolarizing(2, -0.4)?;
    let lambda = random_channel(&mut rng, 2, 3);
    let phi = SquareOperator::maximally_entangled(2);

    let direct = omega.apply_to_factor(&lambda.apply_to_factor(&phi, 1)?, 0)?;
    let (omega_c, lambda_c) = (complementary(&omega), complementary(&lambda));
    let swapped = omega_c.apply_to_factor(&lambda_c.apply_to_factor(&phi, 1)?, 0)?;
    println!("dimensions: {:?} vs {:?}", direct.factor_dims(), swapped.factor_dims());
    for p in [1.5, 2.0, 3.0, f64::INFINITY] {
        println!("p = {p}: {:.12} vs {:.12}", schatten_norm(&direct, p)?, schatten_norm(&swapped, p)?);
    }
    Ok(())
}
