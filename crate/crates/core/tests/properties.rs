use proptest::prelude::*;

use upsilon::channel::{
    choi_to_channel, complementary, make_depolarizing, make_transpose_depolarizing, unitary_channel, ChannelKind,
    ChoiState,
};
use upsilon::closed_form::{extract_ab, m_value, tau_norm, upsilon2_gamma};
use upsilon::feasible::{project_feasible, quadratic_objective, random_feasible, DEFAULT_PROJECTION_SWEEPS};
use upsilon::rng::{random_channel, random_density, random_unitary, ExperimentRng};
use upsilon::tensor::{
    partial_trace, partial_transpose, permute_subsystems, schatten_norm, tensor_product, SquareOperator,
};

fn gamma_param(d: usize, u: f64) -> f64 {
    let (lo, hi) = ChannelKind::Gamma.param_range(d);
    lo + (hi - lo) * u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn partial_trace_of_product(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut rng = ExperimentRng::new(seed, 0);
        let a = random_density(&mut rng, &[da]);
        let b = random_density(&mut rng, &[db]);
        let ab = tensor_product(&a, &b);
        prop_assert_eq!(ab.factor_dims(), &[da, db][..]);
        prop_assert!(partial_trace(&ab, &[0]).unwrap().distance(&a) < 1e-13);
        prop_assert!(partial_trace(&ab, &[1]).unwrap().distance(&b) < 1e-13);
    }

    #[test]
    fn partial_transpose_is_an_involutive_isometry(seed in any::<u64>(), da in 1usize..4, db in 1usize..4, which in 0usize..2) {
        let mut rng = ExperimentRng::new(seed, 0);
        let m = random_density(&mut rng, &[da, db]);
        let pt = partial_transpose(&m, which).unwrap();
        prop_assert!((pt.frobenius_norm() - m.frobenius_norm()).abs() < 1e-13);
        prop_assert_eq!(partial_transpose(&pt, which).unwrap(), m);
    }

    #[test]
    fn subsystem_permutation_round_trips(seed in any::<u64>()) {
        let mut rng = ExperimentRng::new(seed, 0);
        let m = random_density(&mut rng, &[2, 3, 2]);
        let forward = permute_subsystems(&m, &[2, 0, 1]).unwrap();
        prop_assert_eq!(forward.factor_dims(), &[2, 2, 3][..]);
        let back = permute_subsystems(&forward, &[1, 2, 0]).unwrap();
        prop_assert!(back.max_abs_diff(&m) == 0.0);
    }

    #[test]
    fn schatten_norms_decrease_in_p(seed in any::<u64>(), d in 2usize..6) {
        let mut rng = ExperimentRng::new(seed, 0);
        let m = random_density(&mut rng, &[d]);
        let norms: Vec<f64> = [1.0, 1.5, 2.0, 3.0, f64::INFINITY].iter().map(|&p| schatten_norm(&m, p).unwrap()).collect();
        prop_assert!((norms[0] - 1.0).abs() < 1e-12);
        for w in norms.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-13);
        }
    }

    #[test]
    fn projection_lands_in_feasible_set(seed in any::<u64>(), d in 2usize..4, db in 1usize..5) {
        let mut rng = ExperimentRng::new(seed, 0);
        let w = random_density(&mut rng, &[d, db]);
        let s = project_feasible(&w, DEFAULT_PROJECTION_SWEEPS, 1e-11).unwrap();
        let op = s.operator();
        prop_assert!(op.min_eigenvalue() > -1e-12);
        prop_assert!((op.trace().re - 1.0).abs() < 1e-11);
        prop_assert!(partial_trace(op, &[0]).unwrap().distance(&SquareOperator::maximally_mixed(d)) < 1e-11);
        let again = project_feasible(op, DEFAULT_PROJECTION_SWEEPS, 1e-11).unwrap();
        prop_assert!(again.operator().max_abs_diff(op) < 1e-9);
    }

    #[test]
    fn feasible_states_respect_the_closed_form(seed in any::<u64>(), d in 2usize..4, u in 0.0f64..=1.0) {
        let t = gamma_param(d, u);
        let mut rng = ExperimentRng::new(seed, 0);
        let db = rng.int_inclusive(1, d * d);
        let s = random_feasible(&mut rng, &[d], db).unwrap();
        let g = make_transpose_depolarizing(d, t).unwrap();
        prop_assert!(quadratic_objective(&s, &g).unwrap() <= m_value(d, t).unwrap() + 1e-9);
        prop_assert!(s.purity() + s.marginal_b().purity() <= 1.0 + 1.0 / d as f64 + 1e-9);
    }

    #[test]
    fn closed_form_dominates_both_lower_bounds(d in 2usize..6, u in 0.0f64..=1.0) {
        let t = gamma_param(d, u);
        let v = upsilon2_gamma(d, t).unwrap().upsilon2;
        prop_assert!(v + 1e-15 >= tau_norm(d, t, 2.0).unwrap());
        prop_assert!(v + 1e-15 >= (d as f64).powf(-0.5));
        prop_assert!(v <= 1.0 + 1e-15);
    }

    #[test]
    fn choi_states_round_trip(seed in any::<u64>(), d in 2usize..4, dout in 1usize..4) {
        let mut rng = ExperimentRng::new(seed, 0);
        let lambda = random_channel(&mut rng, d, dout);
        let sigma = lambda.apply_to_factor(&SquareOperator::maximally_entangled(d), 1).unwrap();
        let back = choi_to_channel(&ChoiState::new(sigma.clone()).unwrap()).unwrap();
        let again = back.apply_to_factor(&SquareOperator::maximally_entangled(d), 1).unwrap();
        prop_assert!(again.max_abs_diff(&sigma) < 1e-12);
        prop_assert!(back.trace_preservation_error() < 1e-10);
    }

    #[test]
    fn complements_of_channels_are_channels(seed in any::<u64>(), d in 2usize..4, dout in 1usize..4) {
        let mut rng = ExperimentRng::new(seed, 0);
        let lambda = random_channel(&mut rng, d, dout);
        let c = complementary(&lambda);
        prop_assert!(c.trace_preservation_error() < 1e-10);
        prop_assert_eq!(c.dim_out(), lambda.kraus_count());
    }

    #[test]
    fn unitary_channels_fit_the_identity(seed in any::<u64>(), d in 2usize..4) {
        let mut rng = ExperimentRng::new(seed, 0);
        let u = unitary_channel(random_unitary(&mut rng, d)).unwrap();
        let c = extract_ab(&u);
        prop_assert!(c.satisfied());
        prop_assert!((c.a - 1.0).abs() < 1e-12 && c.b.abs() < 1e-12);
    }

    #[test]
    fn depolarizing_constants(d in 2usize..5, u in 0.0f64..=1.0) {
        let (lo, hi) = ChannelKind::Delta.param_range(d);
        let p = lo + (hi - lo) * u;
        let c = extract_ab(&make_depolarizing(d, p).unwrap());
        let (a, b) = ChannelKind::Delta.analytic_ab(d, p).unwrap();
        prop_assert!(c.satisfied());
        prop_assert!((c.a - a).abs() < 1e-11 && (c.b - b).abs() < 1e-11);
    }
}
