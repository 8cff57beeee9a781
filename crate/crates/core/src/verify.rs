//! Named numerical checks of the identities and inequalities behind `υ₂`,
//! and a seeded suite that runs them over parameter grids.
//!
//! Every check reports the worst residual over its trials, the tolerance it
//! was held to, and a SHA-256 digest of the input that produced the worst
//! residual. Checks are deterministic in `(seed, parameters)`.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{
    apply_raw, complementary, completely_depolarizing, compose, hs_adjoint, identity_channel,
    make_transpose_depolarizing, state_to_cp_map, tensor_power, unitary_channel, werner_complement_map, werner_state,
    choi_to_channel, ChannelKind, ChoiState, CpMap,
};
use crate::closed_form::{extract_ab, tau_norm, tau_spectrum, upsilon2_gamma, upsilon2_general};
use crate::error::{Error, Result};
use crate::feasible::{
    alpha_beta, project_feasible, quadratic_objective, random_feasible, subset_purity_objective, swap_polynomial_bound, FeasibleState,
    DEFAULT_PROJECTION_SWEEPS, JOINT_DIM_LIMIT,
};
use crate::optimize::{multiplicativity_gap, optimize_upsilon2, OptimizerConfig};
use crate::rng::{gaussian_matrix, random_channel, random_cp_map, random_density, random_density_with_rank, random_unitary, ExperimentRng};
use crate::tensor::{
    hermitian_eig, partial_trace, schatten_from_values, singular_values, tensor_product, Mat, SquareOperator, C64,
};

pub const PURITY_IDENTITY_TOL: f64 = 1e-10;
pub const TRADEOFF_TOL: f64 = 1e-9;
pub const WITNESS_TOL: f64 = 1e-12;
pub const BIPARTITE_PURITY_TOL: f64 = 1e-10;
pub const ADJOINT_SQUARE_TOL: f64 = 1e-11;
pub const MAP_IDENTITY_TOL: f64 = 1e-11;
pub const HS_TOL: f64 = 1e-10;
pub const SUBSET_TOL: f64 = 1e-10;
pub const TAU_SPECTRUM_TOL: f64 = 1e-10;
pub const CRITERION_FIT_TOL: f64 = 1e-10;
pub const CRITERION_CONSTANTS_TOL: f64 = 1e-11;
pub const CRITERION_CLOSED_FORM_TOL: f64 = 1e-12;
pub const COMPLEMENTARY_TOL: f64 = 1e-9;
pub const TRANSPOSE_TRICK_TOL: f64 = 1e-10;
pub const WERNER_TOL: f64 = 1e-9;
pub const STATE_MAP_TOL: f64 = 1e-10;
pub const SWAP_CHAIN_TOL: f64 = 1e-9;
pub const SWAP_CONSTANT_TOL: f64 = 1e-12;
/// `|best − exact|` bound for optimizer runs.
pub const OPTIMIZER_TOL: f64 = 1e-4;
/// How far an optimizer value may exceed the exact optimum.
pub const OPTIMIZER_OVERSHOOT: f64 = 1e-7;
/// Upper end of the accepted multiplicativity gap window.
pub const GAP_UPPER: f64 = 1e-4;
/// Lower end (magnitude) of the accepted multiplicativity gap window.
pub const GAP_LOWER: f64 = 1e-6;

/// Schatten indices compared by [`check_complementary_invariance`].
pub const COMPLEMENTARY_P: [f64; 4] = [1.5, 2.0, 3.0, f64::INFINITY];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub trials: usize,
    pub worst_case_input_digest: String,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64, trials: usize, digest: String) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
            trials,
            worst_case_input_digest: digest,
        }
    }

    /// The same result held to another tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.passed = self.residual <= tolerance;
        self
    }

    /// A failed result for a check that could not run.
    pub fn errored(name: impl Into<String>, tolerance: f64, err: &Error) -> Self {
        Self::new(name, f64::INFINITY, tolerance, 0, digest_bytes(err.to_string().as_bytes()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("check result serializes")
    }
}

fn digest_bytes(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Bytes of a label followed by the raw entries of some matrices.
fn input_bytes(label: &str, mats: &[&Mat]) -> Vec<u8> {
    let mut out = label.as_bytes().to_vec();
    for m in mats {
        out.extend_from_slice(&(m.nrows() as u64).to_le_bytes());
        out.extend_from_slice(&(m.ncols() as u64).to_le_bytes());
        for z in m.iter() {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

/// Running maximum of residuals, keeping the input that produced it.
struct Worst {
    residual: f64,
    input: Vec<u8>,
    trials: usize,
}

impl Worst {
    fn new() -> Self {
        Self { residual: 0.0, input: Vec::new(), trials: 0 }
    }

    fn observe(&mut self, residual: f64, input: impl FnOnce() -> Vec<u8>) {
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        if self.trials == 0 || residual > self.residual {
            self.residual = residual;
            self.input = input();
        }
        self.trials += 1;
    }

    fn finish(self, name: String, tolerance: f64) -> CheckResult {
        CheckResult::new(name, self.residual, tolerance, self.trials, digest_bytes(&self.input))
    }
}

/// Stream ids keep the random draws of different checks independent under one seed.
mod stream {
    pub const PURITY_IDENTITY: u64 = 101;
    pub const TRADEOFF: u64 = 102;
    pub const BIPARTITE: u64 = 103;
    pub const GAMMA_SQUARE: u64 = 104;
    pub const SELF_ADJOINT: u64 = 105;
    pub const HS: u64 = 106;
    pub const SUBSET: u64 = 107;
    pub const COMPLEMENTARY: u64 = 108;
    pub const TRANSPOSE: u64 = 109;
    pub const STATE_MAP: u64 = 110;
    pub const CHOI: u64 = 111;
    pub const SWAP: u64 = 112;
}

/// Sorted sup-norm distance between two spectra, padding the shorter with zeros.
pub fn spectrum_distance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    let pad = |v: &[f64]| {
        let mut v = v.to_vec();
        v.resize(n, 0.0);
        v.sort_by(|x, y| y.total_cmp(x));
        v
    };
    let (a, b) = (pad(a), pad(b));
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn eigenvalues(m: &SquareOperator) -> Result<Vec<f64>> {
    Ok(hermitian_eig(&m.hermitian_part())?.eigenvalues)
}

fn fmt_param(x: f64) -> String {
    format!("{x}")
}

/// `‖(Γ_t ⊗ id)(σ)‖₂² = t² Tr σ² + (1 − t²)/d · Tr σ_B²` on random feasible states,
/// plus `σ = Φ_d` against `‖τ‖₂²`.
pub fn check_purity_identity(d: usize, t: f64, trials: usize, seed: u64) -> Result<CheckResult> {
    let g = make_transpose_depolarizing(d, t)?;
    let mut rng = ExperimentRng::new(seed, stream::PURITY_IDENTITY);
    let mut worst = Worst::new();
    let df = d as f64;
    let rhs = |s: &FeasibleState| t * t * s.purity() + (1.0 - t * t) / df * s.marginal_b().purity();

    let phi = FeasibleState::maximally_entangled(&[d], d)?;
    let lhs = g.apply_to_factor(phi.operator(), 0)?.frobenius_norm().powi(2);
    let tau2 = tau_norm(d, t, 2.0)?.powi(2);
    worst.observe((lhs - rhs(&phi)).abs().max((lhs - tau2).abs()), || input_bytes("phi", &[]));

    for _ in 0..trials {
        let d_b = rng.int_inclusive(1, d * d);
        let s = random_feasible(&mut rng, &[d], d_b)?;
        let lhs = g.apply_to_factor(s.operator(), 0)?.frobenius_norm().powi(2);
        worst.observe((lhs - rhs(&s)).abs(), || input_bytes("sigma", &[s.operator().entries()]));
    }
    Ok(worst.finish(format!("purity_identity(d={d},t={})", fmt_param(t)), PURITY_IDENTITY_TOL))
}

fn tradeoff_value(s: &FeasibleState) -> f64 {
    s.purity() + s.marginal_b().purity()
}

/// `Tr σ² + Tr σ_B² ≤ 1 + 1/d` on random feasible states and on optimizer outputs for `Γ_t`.
///
/// The residual is the largest violation, clamped at zero.
pub fn check_tradeoff(d: usize, trials: usize, seed: u64) -> Result<CheckResult> {
    let bound = 1.0 + 1.0 / d as f64;
    let mut rng = ExperimentRng::new(seed, stream::TRADEOFF);
    let mut worst = Worst::new();
    for _ in 0..trials {
        let d_b = rng.int_inclusive(1, d * d);
        let s = random_feasible(&mut rng, &[d], d_b)?;
        worst.observe((tradeoff_value(&s) - bound).max(0.0), || input_bytes("sigma", &[s.operator().entries()]));
    }
    let (lo, hi) = ChannelKind::Gamma.param_range(d);
    for t in [lo, 0.0, hi] {
        let g = make_transpose_depolarizing(d, t)?;
        let config = OptimizerConfig::default().with_seed(seed).with_restarts(2).with_d_b(d * d);
        let s = optimize_upsilon2(&g, &config)?.best_state;
        worst.observe((tradeoff_value(&s) - bound).max(0.0), || input_bytes("optimizer", &[s.operator().entries()]));
    }
    Ok(worst.finish(format!("tradeoff(d={d})"), TRADEOFF_TOL))
}

/// `Φ_d` and `I/d ⊗ |0⟩⟨0|` both reach `1 + 1/d`.
pub fn check_tradeoff_witnesses(d: usize) -> Result<CheckResult> {
    let bound = 1.0 + 1.0 / d as f64;
    let mut worst = Worst::new();
    let phi = FeasibleState::maximally_entangled(&[d], d)?;
    worst.observe((tradeoff_value(&phi) - bound).abs(), || input_bytes("phi", &[]));
    let prod = FeasibleState::marginal_product(&[d], d, 0)?;
    worst.observe((tradeoff_value(&prod) - bound).abs(), || input_bytes("product", &[]));
    Ok(worst.finish(format!("tradeoff_witnesses(d={d})"), WITNESS_TOL))
}

/// `Tr ρ_B² + Tr ρ_E² ≤ 1 + Tr ρ_BE²` on random states of every rank.
pub fn check_bipartite_purity(d_b: usize, d_e: usize, trials: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = ExperimentRng::new(seed, stream::BIPARTITE);
    let mut worst = Worst::new();
    let dim = d_b * d_e;
    for _ in 0..trials {
        let rank = rng.int_inclusive(1, dim);
        let rho = random_density_with_rank(&mut rng, &[d_b, d_e], rank);
        let lhs = partial_trace(&rho, &[0])?.purity() + partial_trace(&rho, &[1])?.purity();
        let violation = (lhs - 1.0 - rho.purity()).max(0.0);
        worst.observe(violation, || input_bytes("rho", &[rho.entries()]));
    }
    Ok(worst.finish(format!("bipartite_purity(d_b={d_b},d_e={d_e})"), BIPARTITE_PURITY_TOL))
}

/// Superoperator distance between `N† ∘ N` and `a·id + b·Tr[·] I` for the tabulated `(a, b)`.
pub fn check_adjoint_square(kind: ChannelKind, d: usize, param: f64) -> Result<CheckResult> {
    let (a, b) = kind
        .analytic_ab(d, param)
        .ok_or_else(|| Error::InvalidArgument(format!("{kind} has no tabulated adjoint square")))?;
    let n = kind.build(d, param)?;
    let s = compose(&hs_adjoint(&n), &n)?.transfer_matrix();
    let predicted = predicted_transfer(a, b, d);
    let residual = (s - predicted).norm();
    let name = format!("adjoint_square({kind},d={d},param={})", fmt_param(param));
    Ok(CheckResult::new(name, residual, ADJOINT_SQUARE_TOL, 1, digest_bytes(format!("{kind}:{d}:{param}").as_bytes())))
}

fn predicted_transfer(a: f64, b: f64, d: usize) -> Mat {
    let dd = d * d;
    Mat::from_fn(dd, dd, |r, c| {
        let mut v = if r == c { a } else { 0.0 };
        if r / d == r % d && c / d == c % d {
            v += b;
        }
        C64::new(v, 0.0)
    })
}

fn random_square(rng: &mut ExperimentRng, d: usize) -> Mat {
    gaussian_matrix(rng, d, d)
}

/// `Γ_t(Γ_t(X)) = t² X + (1 − t²) Tr(X) I/d` on random non-Hermitian `X`.
pub fn check_gamma_square(d: usize, t: f64, trials: usize, seed: u64) -> Result<CheckResult> {
    let g = make_transpose_depolarizing(d, t)?;
    let mut rng = ExperimentRng::new(seed, stream::GAMMA_SQUARE);
    let mut worst = Worst::new();
    for _ in 0..trials {
        let x = random_square(&mut rng, d);
        let lhs = apply_raw(&g, &apply_raw(&g, &x));
        let rhs = &x * C64::new(t * t, 0.0) + Mat::identity(d, d) * (x.trace() * ((1.0 - t * t) / d as f64));
        worst.observe((lhs - rhs).norm(), || input_bytes("x", &[&x]));
    }
    Ok(worst.finish(format!("gamma_square(d={d},t={})", fmt_param(t)), MAP_IDENTITY_TOL))
}

/// `Tr(Y (Γ_t ⊗ id)(X)) = Tr((Γ_t ⊗ id)(Y) X)` on random bipartite `X, Y`.
pub fn check_gamma_selfadjoint(d: usize, t: f64, trials: usize, seed: u64) -> Result<CheckResult> {
    let g = make_transpose_depolarizing(d, t)?;
    let mut rng = ExperimentRng::new(seed, stream::SELF_ADJOINT);
    let mut worst = Worst::new();
    for _ in 0..trials {
        let d_b = rng.int_inclusive(1, d);
        let dims = [d, d_b];
        let x = random_square(&mut rng, d * d_b);
        let y = random_square(&mut rng, d * d_b);
        let (gx, _) = crate::tensor::conjugate_on_factor(&x, &dims, 0, g.kraus());
        let (gy, _) = crate::tensor::conjugate_on_factor(&y, &dims, 0, g.kraus());
        let lhs = (&y * gx).trace();
        let rhs = (gy * &x).trace();
        worst.observe((lhs - rhs).norm(), || input_bytes("xy", &[&x, &y]));
    }
    Ok(worst.finish(format!("gamma_selfadjoint(d={d},t={})", fmt_param(t)), MAP_IDENTITY_TOL))
}

/// `‖X ⊗ Y‖₂ = ‖X‖₂ ‖Y‖₂`, relative to the right-hand side.
pub fn check_hs_multiplicativity(d: usize, trials: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = ExperimentRng::new(seed, stream::HS);
    let mut worst = Worst::new();
    for _ in 0..trials {
        let d_y = rng.int_inclusive(1, d * d);
        let x = SquareOperator::from_matrix(random_square(&mut rng, d))?;
        let y = SquareOperator::from_matrix(random_square(&mut rng, d_y))?;
        let rhs = x.frobenius_norm() * y.frobenius_norm();
        let lhs = tensor_product(&x, &y).frobenius_norm();
        worst.observe((lhs - rhs).abs() / rhs.max(1.0), || input_bytes("xy", &[x.entries(), y.entries()]));
    }
    Ok(worst.finish(format!("hs_multiplicativity(d={d})"), HS_TOL))
}

/// Subset expansion of the n-copy quadratic form and the marginal purity identity.
///
/// For `n ∈ {1, 2}`: `Tr(σ (Γ_t^{⊗n}†Γ_t^{⊗n} ⊗ id)(σ)) = Σ_S t^{2|S|} ((1−t²)/d)^{n−|S|} Tr σ_{A_S B}²`.
/// For `n = 2`, `S = {0}`: `Tr(σ (id ⊗ D ⊗ id)(σ)) = Tr σ_{A₀B}² / d`.
pub fn check_subset_expansion(d: usize, t: f64, trials: usize, seed: u64) -> Result<CheckResult> {
    let g = make_transpose_depolarizing(d, t)?;
    let g2 = tensor_power(&g, 2)?;
    let dep = completely_depolarizing(d);
    let (a, b) = (t * t, (1.0 - t * t) / d as f64);
    let mut rng = ExperimentRng::new(seed, stream::SUBSET);
    let mut worst = Worst::new();
    let max_b2 = (JOINT_DIM_LIMIT / (d * d)).clamp(1, d * d);
    for _ in 0..trials {
        let d_b1 = rng_dim(&mut rng, d * d);
        let s1 = random_feasible(&mut rng, &[d], d_b1)?;
        let r1 = (subset_purity_objective(&s1, a, b, 1)? - quadratic_objective(&s1, &g)?).abs();
        worst.observe(r1, || input_bytes("n=1", &[s1.operator().entries()]));

        let d_b2 = rng_dim(&mut rng, max_b2);
        let s2 = random_feasible(&mut rng, &[d, d], d_b2)?;
        let expansion = subset_purity_objective(&s2, a, b, 2)?;
        let r2 = (expansion - quadratic_objective(&s2, &g2)?).abs();
        let depolarized = dep.apply_to_factor(s2.operator(), 1)?;
        let lhs = s2.operator().hs_inner(&depolarized).re;
        let rhs = partial_trace(s2.operator(), &[0, 2])?.purity() / d as f64;
        worst.observe(r2.max((lhs - rhs).abs()), || input_bytes("n=2", &[s2.operator().entries()]));
    }
    Ok(worst.finish(format!("subset_expansion(d={d},t={})", fmt_param(t)), SUBSET_TOL))
}

fn rng_dim(rng: &mut ExperimentRng, hi: usize) -> usize {
    rng.int_inclusive(1, hi.max(1))
}

/// Eigenvalues of `τ = (Γ_t ⊗ id)(Φ_d)` built through the channel against
/// `λ± = (1 ± t(d ∓ 1))/d²` with multiplicities `d(d ± 1)/2`.
pub fn check_tau_spectrum(d: usize, t: f64) -> Result<CheckResult> {
    let g = make_transpose_depolarizing(d, t)?;
    let tau = g.apply_to_factor(&SquareOperator::maximally_entangled(d), 0)?;
    let numeric = eigenvalues(&tau)?;
    let spec = tau_spectrum(d, t)?;
    let mut expected = vec![spec.lambda_plus; spec.mult_plus];
    expected.extend(std::iter::repeat(spec.lambda_minus).take(spec.mult_minus));
    let residual = if expected.len() == numeric.len() { spectrum_distance(&numeric, &expected) } else { f64::INFINITY };
    let name = format!("tau_spectrum(d={d},t={})", fmt_param(t));
    Ok(CheckResult::new(name, residual, TAU_SPECTRUM_TOL, 1, digest_bytes(format!("tau:{d}:{t}").as_bytes())))
}

/// The fitted `(a, b)` of a channel family: fit residual, agreement with the
/// tabulated constants, and agreement of the closed forms built from each.
///
/// Returns three results named `criterion_fit`, `criterion_constants` and
/// `criterion_closed_form`. For `Γ_t` the closed form is also compared with
/// the dedicated formula.
pub fn check_general_criterion(kind: ChannelKind, d: usize, param: f64) -> Result<Vec<CheckResult>> {
    let n = kind.build(d, param)?;
    let fit = extract_ab(&n);
    let tag = format!("{kind},d={d},param={}", fmt_param(param));
    let digest = digest_bytes(tag.as_bytes());
    let mut out = vec![CheckResult::new(format!("criterion_fit({tag})"), fit.residual, CRITERION_FIT_TOL, 1, digest.clone())];
    let Some((a, b)) = kind.analytic_ab(d, param) else {
        return Ok(out);
    };
    let constants = (fit.a - a).abs().max((fit.b - b).abs());
    out.push(CheckResult::new(format!("criterion_constants({tag})"), constants, CRITERION_CONSTANTS_TOL, 1, digest.clone()));
    let exact = upsilon2_general(a, b, d)?;
    let mut closed = (upsilon2_general(fit.a.max(0.0), fit.b.max(0.0), d)? - exact).abs();
    if kind == ChannelKind::Gamma {
        closed = closed.max((upsilon2_gamma(d, param)?.upsilon2 - exact).abs());
    }
    out.push(CheckResult::new(format!("criterion_closed_form({tag})"), closed, CRITERION_CLOSED_FORM_TOL, 1, digest));
    Ok(out)
}

fn relative_norm_gap(lhs: &SquareOperator, rhs: &SquareOperator) -> f64 {
    let (sl, sr) = (singular_values(lhs), singular_values(rhs));
    COMPLEMENTARY_P
        .iter()
        .map(|&p| {
            let (nl, nr) = (schatten_from_values(&sl, p), schatten_from_values(&sr, p));
            (nl - nr).abs() / nl.max(nr).max(1.0)
        })
        .fold(0.0, f64::max)
}

/// `(Ω ⊗ id)((id ⊗ Λ)Φ)` and `(Ω^c ⊗ id)((id ⊗ Λ^c)Φ)` have equal Schatten norms.
///
/// `Ω` is a random CP map (dimensions ≤ 3, Kraus count in `[1, d]`), `Λ` a random
/// channel; complements come from the same Stinespring operators. The first two
/// trials are fixed: `Ω = Γ_{1/3}` with `Λ = id`, and a unitary `Ω`. The residual
/// is the norm difference relative to `max(1, norm)`.
pub fn check_complementary_invariance(seed: u64, trials: usize) -> Result<CheckResult> {
    let mut rng = ExperimentRng::new(seed, stream::COMPLEMENTARY);
    let mut worst = Worst::new();
    for trial in 0..trials {
        let (omega, lambda) = match trial {
            0 => (make_transpose_depolarizing(2, 1.0 / 3.0)?, identity_channel(2)),
            1 => {
                let u = random_unitary(&mut rng, 2);
                (unitary_channel(u)?, random_channel(&mut rng, 2, 3))
            }
            _ => {
                let d_b = rng.int_inclusive(2, 3);
                let d_a = rng.int_inclusive(1, 3);
                let d_e = rng.int_inclusive(1, 3);
                let r = rng.int_inclusive(1, d_b);
                (random_cp_map(&mut rng, d_b, d_a, r, false), random_channel(&mut rng, d_b, d_e))
            }
        };
        let phi = SquareOperator::maximally_entangled(lambda.dim_in());
        let lhs = omega.apply_to_factor(&lambda.apply_to_factor(&phi, 1)?, 0)?;
        let (omega_c, lambda_c) = (complementary(&omega), complementary(&lambda));
        let rhs = omega_c.apply_to_factor(&lambda_c.apply_to_factor(&phi, 1)?, 0)?;
        let residual = relative_norm_gap(&lhs, &rhs);
        worst.observe(residual, || {
            let mats: Vec<&Mat> = omega.kraus().iter().chain(lambda.kraus()).collect();
            input_bytes("omega+lambda", &mats)
        });
    }
    Ok(worst.finish("complementary_invariance".to_string(), COMPLEMENTARY_TOL))
}

/// The shapes `(d_A, d_B)` cycled through by [`check_transpose_trick`].
pub const TRANSPOSE_SHAPES: [(usize, usize); 3] = [(2, 2), (2, 3), (3, 2)];

/// `(id ⊗ N)(Φ_{d_A}) = (d_B/d_A) ((T ∘ N† ∘ T) ⊗ id)(Φ_{d_B})`, entrywise.
///
/// The right side is assembled as `(1/d_A) Σ_ij M(E_ij) ⊗ E_ij` with
/// `M(E) = (N†(E^T))^T`. The first two trials are `N = id` and `N = Γ_{1/3}` at
/// `d = 2`; the rest are random CP maps (trace-preserving on even trials).
pub fn check_transpose_trick(seed: u64, trials: usize) -> Result<CheckResult> {
    let mut rng = ExperimentRng::new(seed, stream::TRANSPOSE);
    let mut worst = Worst::new();
    for trial in 0..trials {
        let n = match trial {
            0 => identity_channel(2),
            1 => make_transpose_depolarizing(2, 1.0 / 3.0)?,
            _ => {
                let (d_a, d_b) = TRANSPOSE_SHAPES[trial % TRANSPOSE_SHAPES.len()];
                if trial % 2 == 0 {
                    random_channel(&mut rng, d_a, d_b)
                } else {
                    let r = rng.int_inclusive(1, d_a);
                    random_cp_map(&mut rng, d_a, d_b, r, false)
                }
            }
        };
        let residual = transpose_trick_residual(&n)?;
        worst.observe(residual, || input_bytes("kraus", &n.kraus().iter().collect::<Vec<_>>()));
    }
    Ok(worst.finish("transpose_trick".to_string(), TRANSPOSE_TRICK_TOL))
}

fn transpose_trick_residual(n: &CpMap) -> Result<f64> {
    let (d_a, d_b) = (n.dim_in(), n.dim_out());
    let lhs = n.apply_to_factor(&SquareOperator::maximally_entangled(d_a), 1)?;
    let adj = hs_adjoint(n);
    let mut rhs = Mat::zeros(d_a * d_b, d_a * d_b);
    for i in 0..d_b {
        for j in 0..d_b {
            let mut e_ji = Mat::zeros(d_b, d_b);
            e_ji[(j, i)] = C64::new(1.0, 0.0);
            let m = apply_raw(&adj, &e_ji).transpose();
            for r in 0..d_a {
                for c in 0..d_a {
                    rhs[(r * d_b + i, c * d_b + j)] += m[(r, c)] / d_a as f64;
                }
            }
        }
    }
    Ok((lhs.entries() - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Reconstruction of the Werner complement.
///
/// The purification `|W⟩ = (id ⊗ V)|Φ⟩` uses the Stinespring isometry `V` of
/// `Γ_t` built from its Choi matrix, so it lives on `A ⊗ C ⊗ K` with `K` the
/// dilation environment. The residual is the largest of:
/// - nonzero spectrum of `Tr_C |W⟩⟨W|` against `d·((Γ_t^c)† ⊗ id)(Φ_{d²})`;
/// - `Tr_K |W⟩⟨W|` against `W(t)` entrywise;
/// - spectrum of `Tr_C` against that of the `C` marginal, and of `Tr_K`
///   against that of the `K` marginal (complementary pairs of a pure state);
/// - the trace of the reconstruction minus 1.
pub fn check_werner_reconstruction(d: usize, t: f64) -> Result<CheckResult> {
    let g = make_transpose_depolarizing(d, t)?;
    let v = g.stinespring();
    let r = g.kraus_count();
    let scale = 1.0 / (d as f64).sqrt();
    // |W⟩[a, c, k] = V[(c, k), a] / √d
    let psi: Vec<C64> = (0..d * d * r)
        .map(|x| {
            let (a, c, k) = (x / (d * r), (x / r) % d, x % r);
            v[(c * r + k, a)] * scale
        })
        .collect();
    let pure = SquareOperator::projector(&psi, &[d, d, r])?;
    let w_ak = partial_trace(&pure, &[0, 2])?;
    let w_ac = partial_trace(&pure, &[0, 1])?;
    let rho_c = partial_trace(&pure, &[1])?;
    let rho_k = partial_trace(&pure, &[2])?;

    let formula = werner_complement_map(d, t)?
        .apply_to_factor(&SquareOperator::maximally_entangled(d * d), 0)?
        .scaled(d as f64);

    let spec_ak = eigenvalues(&w_ak)?;
    let spec_ac = eigenvalues(&w_ac)?;
    let residual = spectrum_distance(&spec_ak, &eigenvalues(&formula)?)
        .max(w_ac.max_abs_diff(&werner_state(d, t)?))
        .max(spectrum_distance(&spec_ak, &eigenvalues(&rho_c)?))
        .max(spectrum_distance(&spec_ac, &eigenvalues(&rho_k)?))
        .max((formula.trace().re - 1.0).abs())
        .max(formula.trace().im.abs());
    let name = format!("werner_reconstruction(d={d},t={})", fmt_param(t));
    Ok(CheckResult::new(name, residual, WERNER_TOL, 1, digest_bytes(format!("werner:{d}:{t}").as_bytes())))
}

/// `(Ω ⊗ id)(Φ_{d_B}) = ρ` for the CP map built from a random state `ρ` on `A ⊗ B`.
pub fn check_state_to_map(d_a: usize, d_b: usize, trials: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = ExperimentRng::new(seed, stream::STATE_MAP);
    let mut worst = Worst::new();
    for _ in 0..trials {
        let rank = rng.int_inclusive(1, d_a * d_b);
        let rho = random_density_with_rank(&mut rng, &[d_a, d_b], rank);
        let omega = state_to_cp_map(&rho)?;
        let back = omega.apply_to_factor(&SquareOperator::maximally_entangled(d_b), 0)?;
        worst.observe(back.max_abs_diff(&rho), || input_bytes("rho", &[rho.entries()]));
    }
    Ok(worst.finish(format!("state_to_map(d_a={d_a},d_b={d_b})"), STATE_MAP_TOL))
}

/// Every feasible `σ` is the Choi state of the channel `Λ_σ`: `Λ_σ` is trace
/// preserving and `(id ⊗ Λ_σ)(Φ_d) = σ`.
pub fn check_choi_round_trip(d: usize, trials: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = ExperimentRng::new(seed, stream::CHOI);
    let mut worst = Worst::new();
    for _ in 0..trials {
        let d_b = rng.int_inclusive(1, d * d);
        // Λ_σ is trace preserving only as far as σ_A = I/d, so project tightly
        let w = random_density(&mut rng, &[d, d_b]);
        let s = project_feasible(&w, DEFAULT_PROJECTION_SWEEPS, 1e-13)?;
        let lambda = choi_to_channel(&ChoiState::new(s.operator().clone())?)?;
        let back = lambda.apply_to_factor(&SquareOperator::maximally_entangled(d), 1)?;
        let residual = back.max_abs_diff(s.operator()).max(lambda.trace_preservation_error());
        worst.observe(residual, || input_bytes("sigma", &[s.operator().entries()]));
    }
    Ok(worst.finish(format!("choi_round_trip(d={d})"), STATE_MAP_TOL))
}

/// The chain `objective ≤ Tr((σ⊗σ)|G|) ≤ (α + β/d)ⁿ` for `n ∈ {1, 2}` on random
/// feasible states, with the objective also matched against the quadratic form of `N^{⊗n}`.
///
/// The residual is the largest of the chain violations and the objective mismatch.
pub fn check_swap_chain(kind: ChannelKind, d: usize, param: f64, trials: usize, seed: u64) -> Result<CheckResult> {
    let (a, b) = kind
        .analytic_ab(d, param)
        .ok_or_else(|| Error::InvalidArgument(format!("{kind} has no tabulated constants")))?;
    if kind.input_dim(d) != d {
        return Err(Error::InvalidArgument(format!("{kind} is not an endomorphism")));
    }
    let n1 = kind.build(d, param)?;
    let n2 = tensor_power(&n1, 2)?;
    let mut rng = ExperimentRng::new(seed, stream::SWAP);
    let mut worst = Worst::new();
    let max_b2 = (JOINT_DIM_LIMIT / (d * d)).clamp(1, d * d);
    for trial in 0..trials {
        let copies = 1 + trial % 2;
        let (a_dims, hi): (&[usize], usize) = if copies == 1 { (&[d], d * d) } else { (&[d, d], max_b2) };
        let d_b = rng_dim(&mut rng, hi);
        let s = random_feasible(&mut rng, a_dims, d_b)?;
        let chain = swap_polynomial_bound(&s, b, a, d, copies)?;
        let quad = quadratic_objective(&s, if copies == 1 { &n1 } else { &n2 })?;
        let residual = (-chain.slack()).max(0.0).max((chain.objective - quad).abs());
        worst.observe(residual, || input_bytes(&format!("n={copies}"), &[s.operator().entries()]));
    }
    Ok(worst.finish(format!("swap_chain({kind},d={d},param={})", fmt_param(param)), SWAP_CHAIN_TOL))
}

/// `α + β/d` from the swap polynomial equals the squared closed form.
pub fn check_swap_constant(kind: ChannelKind, d: usize, param: f64) -> Result<CheckResult> {
    let (a, b) = kind
        .analytic_ab(d, param)
        .ok_or_else(|| Error::InvalidArgument(format!("{kind} has no tabulated constants")))?;
    kind.check_param(d, param)?;
    let (alpha, beta) = alpha_beta(b, a);
    let m = upsilon2_general(a, b, d)?.powi(2);
    let residual = (alpha + beta / d as f64 - m).abs();
    let name = format!("swap_constant({kind},d={d},param={})", fmt_param(param));
    let digest = digest_bytes(name.as_bytes());
    Ok(CheckResult::new(name, residual, SWAP_CONSTANT_TOL, 1, digest))
}

/// Optimizer value for `Γ_t` against the closed form.
///
/// The accepted window is `best − exact ∈ [−1e−4, 1e−7]`; the residual
/// `max(|best − exact|, 1000·(best − exact))` maps that window onto `residual ≤ 1e−4`.
pub fn check_closed_form_optimizer(d: usize, t: f64, restarts: usize, seed: u64) -> Result<CheckResult> {
    let g = make_transpose_depolarizing(d, t)?;
    let exact = upsilon2_gamma(d, t)?.upsilon2;
    let config = OptimizerConfig::default().with_seed(seed).with_restarts(restarts).with_d_b(d * d);
    let report = optimize_upsilon2(&g, &config)?;
    let diff = report.best_value - exact;
    let residual = diff.abs().max(diff * (OPTIMIZER_TOL / OPTIMIZER_OVERSHOOT));
    let name = format!("closed_form_optimizer(d={d},t={})", fmt_param(t));
    let digest = digest_bytes(&input_bytes(&name, &[report.best_state.operator().entries()]));
    Ok(CheckResult::new(name, residual, OPTIMIZER_TOL, restarts, digest))
}

/// Multiplicativity gap `υ₂(N^{⊗n}) − υ₂(N)ⁿ` for one channel.
///
/// The accepted window is `gap ∈ [−1e−6, 1e−4]`; the residual
/// `max(gap, −100·gap)` maps it onto `residual ≤ 1e−4`.
pub fn check_multiplicativity(spec: &MultiplicativitySpec, seed: u64) -> Result<CheckResult> {
    let n = spec.kind.build(spec.d, spec.param)?;
    let mut config = OptimizerConfig::default().with_seed(seed).with_restarts(spec.restarts);
    config.d_b = spec.d_b;
    let gap = multiplicativity_gap(&n, spec.copies, &config)?;
    let residual = gap.max(-gap * (GAP_UPPER / GAP_LOWER));
    let name = format!(
        "multiplicativity({},d={},param={},n={})",
        spec.kind,
        spec.d,
        fmt_param(spec.param),
        spec.copies
    );
    Ok(CheckResult::new(name, residual, GAP_UPPER, spec.restarts, digest_bytes(format!("{spec:?}:{seed}").as_bytes())))
}

/// One multiplicativity run in a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplicativitySpec {
    pub kind: ChannelKind,
    pub d: usize,
    pub param: f64,
    pub copies: usize,
    pub restarts: usize,
    /// Joint output dimension; `None` uses the optimizer default.
    pub d_b: Option<usize>,
}

impl MultiplicativitySpec {
    pub fn new(kind: ChannelKind, d: usize, param: f64) -> Self {
        Self { kind, d, param, copies: 2, restarts: 8, d_b: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Random trials per randomized check.
    pub trials: usize,
    pub dims: Vec<usize>,
    /// Evenly spaced `t` values across the CP-range of `Γ_t` for each `d`.
    pub t_points: usize,
    /// Depolarizing parameters; values outside the range for a given `d` are skipped.
    pub p_values: Vec<f64>,
    /// Replaces every check's tolerance when set.
    pub tolerance: Option<f64>,
    /// Run the optimizer against the closed form at each grid point.
    pub optimizer: bool,
    pub optimizer_restarts: usize,
    pub multiplicativity: Vec<MultiplicativitySpec>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 20,
            dims: vec![2, 3],
            t_points: 5,
            p_values: vec![0.25, 0.5, 1.0],
            tolerance: None,
            optimizer: true,
            optimizer_restarts: 4,
            multiplicativity: vec![
                MultiplicativitySpec::new(ChannelKind::Gamma, 2, -1.0),
                MultiplicativitySpec::new(ChannelKind::Delta, 2, 0.5),
            ],
        }
    }
}

impl SuiteConfig {
    /// A configuration with no grid points; [`run_suite`] returns nothing for it.
    pub fn empty() -> Self {
        Self { dims: Vec::new(), t_points: 0, p_values: Vec::new(), multiplicativity: Vec::new(), ..Self::default() }
    }

    /// Parses `key = value` lines; `#` starts a comment. Unknown keys are errors.
    ///
    /// Keys: `seed`, `trials`, `dims` (comma list), `t_points`, `p_values`
    /// (comma list), `tolerance`, `optimizer` (true/false), `optimizer_restarts`,
    /// `multiplicativity` (comma list of `channel:d:param`), `multiplicativity_restarts`,
    /// `multiplicativity_copies`, `multiplicativity_d_b`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        let mut mult: Option<Vec<(ChannelKind, usize, f64)>> = None;
        let (mut m_restarts, mut m_copies, mut m_d_b) = (8, 2, None);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::InvalidArgument(format!("line {}: {msg}: {raw:?}", lineno + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "seed" => config.seed = value.parse().map_err(|_| bad("bad seed"))?,
                "trials" => config.trials = value.parse().map_err(|_| bad("bad trials"))?,
                "dims" => config.dims = parse_list(value).map_err(|_| bad("bad dims"))?,
                "t_points" => config.t_points = value.parse().map_err(|_| bad("bad t_points"))?,
                "p_values" => config.p_values = parse_list(value).map_err(|_| bad("bad p_values"))?,
                "tolerance" => {
                    let tol: f64 = value.parse().map_err(|_| bad("bad tolerance"))?;
                    if !(tol >= 0.0) {
                        return Err(bad("tolerance must be nonnegative"));
                    }
                    config.tolerance = Some(tol);
                }
                "optimizer" => config.optimizer = value.parse().map_err(|_| bad("expected true or false"))?,
                "optimizer_restarts" => config.optimizer_restarts = value.parse().map_err(|_| bad("bad restarts"))?,
                "multiplicativity" => {
                    let mut list = Vec::new();
                    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        let parts: Vec<&str> = item.split(':').collect();
                        let [kind, d, param] = parts[..] else {
                            return Err(bad("expected channel:d:param"));
                        };
                        let kind: ChannelKind = kind.parse().map_err(|_| bad("unknown channel"))?;
                        let d: usize = d.parse().map_err(|_| bad("bad d"))?;
                        let param: f64 = param.parse().map_err(|_| bad("bad param"))?;
                        kind.check_param(d, param)?;
                        list.push((kind, d, param));
                    }
                    mult = Some(list);
                }
                "multiplicativity_restarts" => m_restarts = value.parse().map_err(|_| bad("bad restarts"))?,
                "multiplicativity_copies" => m_copies = value.parse().map_err(|_| bad("bad copies"))?,
                "multiplicativity_d_b" => m_d_b = Some(value.parse().map_err(|_| bad("bad d_b"))?),
                _ => return Err(bad("unknown key")),
            }
        }
        if config.dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidArgument("dims must be at least 2".into()));
        }
        let base: Vec<(ChannelKind, usize, f64)> = match mult {
            Some(list) => list,
            None => config.multiplicativity.iter().map(|m| (m.kind, m.d, m.param)).collect(),
        };
        config.multiplicativity = base
            .into_iter()
            .map(|(kind, d, param)| MultiplicativitySpec { kind, d, param, copies: m_copies, restarts: m_restarts, d_b: m_d_b })
            .collect();
        Ok(config)
    }
}

fn parse_list<T: std::str::FromStr>(value: &str) -> std::result::Result<Vec<T>, T::Err> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::parse).collect()
}

/// `points` evenly spaced values over `[lo, hi]`; one point gives `lo`.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points).map(|k| if k + 1 == points { hi } else { lo + (hi - lo) * k as f64 / (points - 1) as f64 }).collect(),
    }
}

fn push(out: &mut Vec<CheckResult>, name: &str, tol: f64, r: Result<CheckResult>) {
    out.push(r.unwrap_or_else(|e| CheckResult::errored(name, tol, &e)));
}

fn push_many(out: &mut Vec<CheckResult>, name: &str, tol: f64, r: Result<Vec<CheckResult>>) {
    match r {
        Ok(v) => out.extend(v),
        Err(e) => out.push(CheckResult::errored(name, tol, &e)),
    }
}

/// Runs every check over the configured grids, in a fixed order.
///
/// An empty grid (no dimensions, or no `t` points) yields an empty list.
/// Checks that fail to run are reported as failures with an infinite residual.
pub fn run_suite(config: &SuiteConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    if config.dims.is_empty() || config.t_points == 0 {
        return out;
    }
    let (seed, trials) = (config.seed, config.trials);
    for &d in &config.dims {
        let (lo, hi) = ChannelKind::Gamma.param_range(d);
        for t in linspace(lo, hi, config.t_points) {
            push(&mut out, "purity_identity", PURITY_IDENTITY_TOL, check_purity_identity(d, t, trials, seed));
            push(&mut out, "gamma_square", MAP_IDENTITY_TOL, check_gamma_square(d, t, trials, seed));
            push(&mut out, "gamma_selfadjoint", MAP_IDENTITY_TOL, check_gamma_selfadjoint(d, t, trials, seed));
            push(&mut out, "subset_expansion", SUBSET_TOL, check_subset_expansion(d, t, trials, seed));
            push(&mut out, "tau_spectrum", TAU_SPECTRUM_TOL, check_tau_spectrum(d, t));
            push(&mut out, "werner_reconstruction", WERNER_TOL, check_werner_reconstruction(d, t));
            for kind in [ChannelKind::Gamma, ChannelKind::GammaC] {
                per_kind(&mut out, kind, d, t, trials, seed);
            }
            if config.optimizer {
                push(
                    &mut out,
                    "closed_form_optimizer",
                    OPTIMIZER_TOL,
                    check_closed_form_optimizer(d, t, config.optimizer_restarts, seed),
                );
            }
        }
        let (plo, phi) = ChannelKind::Delta.param_range(d);
        for &p in config.p_values.iter().filter(|&&p| p >= plo && p <= phi) {
            for kind in [ChannelKind::Delta, ChannelKind::DeltaC] {
                per_kind(&mut out, kind, d, p, trials, seed);
            }
        }
        push(&mut out, "tradeoff", TRADEOFF_TOL, check_tradeoff(d, trials, seed));
        push(&mut out, "tradeoff_witnesses", WITNESS_TOL, check_tradeoff_witnesses(d));
        push(&mut out, "bipartite_purity", BIPARTITE_PURITY_TOL, check_bipartite_purity(d, d, trials, seed));
        push(&mut out, "hs_multiplicativity", HS_TOL, check_hs_multiplicativity(d, trials, seed));
        push(&mut out, "state_to_map", STATE_MAP_TOL, check_state_to_map(d, d + 1, trials, seed));
        push(&mut out, "choi_round_trip", STATE_MAP_TOL, check_choi_round_trip(d, trials, seed));
    }
    push(&mut out, "complementary_invariance", COMPLEMENTARY_TOL, check_complementary_invariance(seed, trials));
    push(&mut out, "transpose_trick", TRANSPOSE_TRICK_TOL, check_transpose_trick(seed, trials));
    for spec in &config.multiplicativity {
        push(&mut out, "multiplicativity", GAP_UPPER, check_multiplicativity(spec, seed));
    }
    if let Some(tol) = config.tolerance {
        out = out.into_iter().map(|r| r.with_tolerance(tol)).collect();
    }
    out
}

fn per_kind(out: &mut Vec<CheckResult>, kind: ChannelKind, d: usize, param: f64, trials: usize, seed: u64) {
    push(out, "adjoint_square", ADJOINT_SQUARE_TOL, check_adjoint_square(kind, d, param));
    push_many(out, "general_criterion", CRITERION_FIT_TOL, check_general_criterion(kind, d, param));
    push(out, "swap_constant", SWAP_CONSTANT_TOL, check_swap_constant(kind, d, param));
    if matches!(kind, ChannelKind::Gamma | ChannelKind::Delta) {
        push(out, "swap_chain", SWAP_CHAIN_TOL, check_swap_chain(kind, d, param, trials, seed));
    }
}

/// True when every result passed.
pub fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.passed)
}

/// One entry of the suite manifest: a check family and the statement it tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    pub check: &'static str,
    pub statement: &'static str,
}

/// Every check family run by [`run_suite`], with the statement it verifies.
pub const MANIFEST: &[ManifestEntry] = &[
    ManifestEntry { check: "purity_identity", statement: "‖(Γ_t⊗id)σ‖₂² = t²Tr σ² + (1−t²)/d Tr σ_B² on F_d(B)" },
    ManifestEntry { check: "tradeoff", statement: "Tr σ² + Tr σ_B² ≤ 1 + 1/d on F_d(B), random states and optimizer outputs" },
    ManifestEntry { check: "tradeoff_witnesses", statement: "Φ_d and I/d⊗|0⟩⟨0| attain 1 + 1/d" },
    ManifestEntry { check: "bipartite_purity", statement: "Tr ρ_B² + Tr ρ_E² ≤ 1 + Tr ρ_BE²" },
    ManifestEntry { check: "gamma_square", statement: "Γ_t∘Γ_t = t² id + (1−t²) D" },
    ManifestEntry { check: "gamma_selfadjoint", statement: "Tr(Y (Γ_t⊗id)X) = Tr((Γ_t⊗id)(Y) X)" },
    ManifestEntry { check: "hs_multiplicativity", statement: "‖X⊗Y‖₂ = ‖X‖₂‖Y‖₂" },
    ManifestEntry { check: "subset_expansion", statement: "n-copy quadratic form = Σ_S a^|S| b^(n−|S|) Tr σ_{A_S B}², and the marginal purity identity" },
    ManifestEntry { check: "tau_spectrum", statement: "τ has eigenvalues (1±t(d∓1))/d² with multiplicities d(d±1)/2" },
    ManifestEntry { check: "closed_form_optimizer", statement: "max over F_d of ‖(Γ_t⊗id)σ‖₂ equals √m(d,t)" },
    ManifestEntry { check: "adjoint_square", statement: "N†∘N = a·id + b·Tr[·]I with tabulated (a,b) for Γ_t, Δ_p, Γ_t^c, Δ_p^c" },
    ManifestEntry { check: "criterion_fit", statement: "N†∘N lies in span{id, Tr[·]I}" },
    ManifestEntry { check: "criterion_constants", statement: "fitted (a,b) equal the tabulated constants" },
    ManifestEntry { check: "criterion_closed_form", statement: "υ₂(N) = √max{a + b/d, a/d + b}, and for Γ_t the dedicated formula agrees" },
    ManifestEntry { check: "swap_constant", statement: "α + β/d = max{a + b/d, a/d + b}" },
    ManifestEntry { check: "swap_chain", statement: "objective ≤ Tr((σ⊗σ)|G|) ≤ (α+β/d)ⁿ for n ∈ {1,2}" },
    ManifestEntry { check: "complementary_invariance", statement: "(Ω⊗id)((id⊗Λ)Φ) and (Ω^c⊗id)((id⊗Λ^c)Φ) have equal Schatten p-norms" },
    ManifestEntry { check: "transpose_trick", statement: "(id⊗N)(Φ_{d_A}) = (d_B/d_A)((T∘N†∘T)⊗id)(Φ_{d_B})" },
    ManifestEntry { check: "werner_reconstruction", statement: "Tr_C of the Werner purification = d((Γ_t^c)†⊗id)(Φ_d⊗Φ_d) up to the dilation isometry" },
    ManifestEntry { check: "state_to_map", statement: "every state ρ_AB equals (Ω_ρ⊗id)(Φ_{d_B}) for a CP map Ω_ρ" },
    ManifestEntry { check: "choi_round_trip", statement: "F_d(B) is the set of Choi states of channels L(C^d) → L(B)" },
    ManifestEntry { check: "multiplicativity", statement: "υ₂(N^{⊗n}) = υ₂(N)ⁿ for channels meeting the (a,b) criterion" },
];

/// The manifest as JSON lines.
pub fn manifest_json_lines() -> String {
    MANIFEST.iter().map(|e| serde_json::to_string(e).expect("manifest serializes") + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_distance_pads() {
        assert_eq!(spectrum_distance(&[0.5, 0.5], &[0.5, 0.0, 0.5]), 0.0);
        assert!((spectrum_distance(&[1.0], &[0.5, 0.5]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn purity_identity_examples() {
        let r = check_purity_identity(2, 1.0 / 3.0, 100, 7).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.trials, 101);
        assert!(check_purity_identity(2, 0.5, 1, 0).is_err());
    }

    #[test]
    fn adjoint_square_table() {
        for (kind, param) in [(ChannelKind::GammaC, 1.0 / 3.0), (ChannelKind::DeltaC, 1.0), (ChannelKind::Gamma, 0.0)] {
            let r = check_adjoint_square(kind, 2, param).unwrap();
            assert!(r.passed, "{r:?}");
        }
        assert!(check_adjoint_square(ChannelKind::GammaCAdjoint, 2, 0.0).is_err());
        assert!(check_adjoint_square(ChannelKind::Gamma, 2, 0.9).is_err());
    }

    #[test]
    fn werner_reconstruction_on_grid() {
        for d in [2, 3] {
            let (lo, hi) = ChannelKind::Gamma.param_range(d);
            for t in linspace(lo, hi, 7) {
                let r = check_werner_reconstruction(d, t).unwrap();
                assert!(r.passed, "{r:?}");
            }
        }
    }

    #[test]
    fn randomized_identities_hold() {
        let checks = [
            check_complementary_invariance(3, 20).unwrap(),
            check_transpose_trick(3, 20).unwrap(),
            check_tradeoff_witnesses(3).unwrap(),
            check_bipartite_purity(2, 3, 20, 3).unwrap(),
            check_gamma_square(3, -0.2, 10, 3).unwrap(),
            check_gamma_selfadjoint(3, 0.1, 10, 3).unwrap(),
            check_hs_multiplicativity(2, 10, 3).unwrap(),
            check_subset_expansion(2, -0.7, 5, 3).unwrap(),
            check_state_to_map(2, 3, 10, 3).unwrap(),
            check_choi_round_trip(3, 10, 3).unwrap(),
            check_swap_chain(ChannelKind::Delta, 2, 0.5, 6, 3).unwrap(),
            check_swap_constant(ChannelKind::GammaC, 3, 0.2).unwrap(),
            check_tau_spectrum(4, 0.1).unwrap(),
        ];
        for r in checks {
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn digests_are_deterministic() {
        let a = check_transpose_trick(9, 6).unwrap();
        let b = check_transpose_trick(9, 6).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.worst_case_input_digest.len(), 64);
    }

    #[test]
    fn empty_grid_gives_nothing() {
        assert!(run_suite(&SuiteConfig::empty()).is_empty());
        let config = SuiteConfig { t_points: 0, ..SuiteConfig::default() };
        assert!(run_suite(&config).is_empty());
    }

    #[test]
    fn tight_tolerance_reports_failures() {
        let config = SuiteConfig {
            dims: vec![2],
            t_points: 2,
            trials: 3,
            optimizer: false,
            multiplicativity: Vec::new(),
            tolerance: Some(1e-15),
            ..SuiteConfig::default()
        };
        let results = run_suite(&config);
        assert!(!results.is_empty());
        assert!(!all_passed(&results));
        assert!(results.iter().all(|r| r.tolerance == 1e-15 && r.passed == (r.residual <= 1e-15)));
    }

    #[test]
    fn config_parsing() {
        let c = SuiteConfig::parse("seed = 5\n# comment\ndims = 2\nt_points=3\nmultiplicativity = gamma:2:-1, delta:2:0.5\nmultiplicativity_restarts = 2\n").unwrap();
        assert_eq!(c.seed, 5);
        assert_eq!(c.dims, vec![2]);
        assert_eq!(c.multiplicativity.len(), 2);
        assert_eq!(c.multiplicativity[0].restarts, 2);
        assert!(SuiteConfig::parse("bogus = 1").is_err());
        assert!(SuiteConfig::parse("multiplicativity = gamma:2:0.9").is_err());
        assert!(SuiteConfig::parse("tolerance = -1").is_err());
        let empty = SuiteConfig::parse("dims =\nmultiplicativity =").unwrap();
        assert!(run_suite(&empty).is_empty());
    }

    #[test]
    fn manifest_covers_suite() {
        let config = SuiteConfig { dims: vec![2], t_points: 2, trials: 2, multiplicativity: Vec::new(), optimizer_restarts: 1, ..SuiteConfig::default() };
        let results = run_suite(&config);
        for r in &results {
            let family = r.name.split('(').next().unwrap();
            assert!(MANIFEST.iter().any(|e| e.check == family), "{family} missing from manifest");
        }
        assert_eq!(manifest_json_lines().lines().count(), MANIFEST.len());
    }
}
