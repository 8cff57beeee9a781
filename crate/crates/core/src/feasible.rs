//! The feasible set `F_d(B) = {σ ⪰ 0, Tr σ = 1, σ_A = I/d_A}` and the
//! objectives evaluated on it.

use crate::channel::CpMap;
use crate::error::{Error, Result};
use crate::tensor::{
    eigh, hermitize, partial_trace, permute_subsystems, swap_operator, tensor_all, tensor_product, Mat,
    SquareOperator, C64, HERMITIAN_TOL,
};

/// Membership tolerance for [`FeasibleState::new`].
pub const FEASIBLE_TOL: f64 = 1e-9;
pub const DEFAULT_PROJECTION_TOL: f64 = 1e-10;
pub const DEFAULT_PROJECTION_SWEEPS: usize = 10_000;
/// Largest number of copies for subset enumeration.
pub const SUBSET_COPIES_LIMIT: usize = 4;
/// Largest number of copies for the doubled-space bound.
pub const SWAP_COPIES_LIMIT: usize = 2;
/// Largest `d^n · d_B` for n-copy problems.
pub const JOINT_DIM_LIMIT: usize = 64;

/// A density operator on `A₁ ⊗ … ⊗ A_n ⊗ B` whose marginal on all `A` factors is maximally mixed.
///
/// The last factor is always `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleState {
    operator: SquareOperator,
    feasibility_error: f64,
}

impl FeasibleState {
    /// Validates membership to [`FEASIBLE_TOL`].
    pub fn new(operator: SquareOperator) -> Result<Self> {
        let (d_a, _) = split_dims(operator.factor_dims())?;
        let deviation = operator.hermiticity_deviation();
        if deviation > HERMITIAN_TOL * operator.frobenius_norm().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        let min = operator.min_eigenvalue();
        if min < -FEASIBLE_TOL {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        let trace = operator.trace().re;
        if (trace - 1.0).abs() > FEASIBLE_TOL {
            return Err(Error::NotNormalized { trace });
        }
        let deviation = marginal_deviation(operator.entries(), d_a);
        if deviation > FEASIBLE_TOL {
            return Err(Error::MarginalDeviation { deviation });
        }
        let feasibility_error = deviation.max((trace - 1.0).abs());
        Ok(Self {
            operator,
            feasibility_error,
        })
    }

    pub(crate) fn from_parts(operator: SquareOperator, feasibility_error: f64) -> Self {
        Self {
            operator,
            feasibility_error,
        }
    }

    /// `Φ_{d_A}` with its second half embedded in `C^{d_B}` (`d_B ≥ d_A`).
    pub fn maximally_entangled(a_dims: &[usize], d_b: usize) -> Result<Self> {
        let d_a: usize = a_dims.iter().product();
        if d_b < d_a {
            return Err(Error::InvalidArgument(format!("d_B = {d_b} is below d_A = {d_a}")));
        }
        let op = SquareOperator::embedded_maximally_entangled(d_a, d_b).with_factor_dims(joint_dims(a_dims, d_b))?;
        Ok(Self::from_parts(op, 0.0))
    }

    /// `I/d_A ⊗ |k⟩⟨k|`.
    pub fn marginal_product(a_dims: &[usize], d_b: usize, k: usize) -> Result<Self> {
        let d_a: usize = a_dims.iter().product();
        if k >= d_b {
            return Err(Error::InvalidArgument(format!("basis index {k} out of range for d_B = {d_b}")));
        }
        let op = tensor_product(&SquareOperator::maximally_mixed(d_a), &SquareOperator::basis_projector(d_b, k))
            .with_factor_dims(joint_dims(a_dims, d_b))?;
        Ok(Self::from_parts(op, 0.0))
    }

    pub fn operator(&self) -> &SquareOperator {
        &self.operator
    }

    pub fn into_operator(self) -> SquareOperator {
        self.operator
    }

    /// `max(‖σ_A − I/d_A‖₂, |Tr σ − 1|)` at construction.
    pub fn feasibility_error(&self) -> f64 {
        self.feasibility_error
    }

    pub fn a_dims(&self) -> &[usize] {
        let dims = self.operator.factor_dims();
        &dims[..dims.len() - 1]
    }

    pub fn d_a(&self) -> usize {
        self.a_dims().iter().product()
    }

    pub fn d_b(&self) -> usize {
        *self.operator.factor_dims().last().expect("at least two factors")
    }

    /// `Tr σ²`.
    pub fn purity(&self) -> f64 {
        self.operator.purity()
    }

    /// `σ_B`.
    pub fn marginal_b(&self) -> SquareOperator {
        let last = self.operator.factor_dims().len() - 1;
        partial_trace(&self.operator, &[last]).expect("valid factor")
    }
}

fn joint_dims(a_dims: &[usize], d_b: usize) -> Vec<usize> {
    let mut dims = a_dims.to_vec();
    dims.push(d_b);
    dims
}

/// `(d_A, d_B)` with `d_A` the product of every factor but the last.
fn split_dims(dims: &[usize]) -> Result<(usize, usize)> {
    if dims.len() < 2 {
        return Err(Error::InvalidArgument("feasible states need at least one A factor and a B factor".into()));
    }
    let d_b = dims[dims.len() - 1];
    Ok((dims[..dims.len() - 1].iter().product(), d_b))
}

/// `Tr_B` for a matrix on `C^{d_a} ⊗ C^{d_b}`.
fn trace_b(m: &Mat, d_a: usize) -> Mat {
    let d_b = m.nrows() / d_a;
    Mat::from_fn(d_a, d_a, |i, j| (0..d_b).map(|b| m[(i * d_b + b, j * d_b + b)]).sum())
}

fn marginal_deviation(m: &Mat, d_a: usize) -> f64 {
    let mut ma = trace_b(m, d_a);
    let w = C64::new(1.0 / d_a as f64, 0.0);
    for i in 0..d_a {
        ma[(i, i)] -= w;
    }
    ma.norm()
}

/// Orthogonal projection onto `{X : Tr_B X = I/d_A}`: `X − (X_A − I/d_A) ⊗ I_B/d_B`.
fn project_affine(x: &Mat, d_a: usize) -> Mat {
    let d_b = x.nrows() / d_a;
    let mut delta = trace_b(x, d_a);
    let w = C64::new(1.0 / d_a as f64, 0.0);
    for i in 0..d_a {
        delta[(i, i)] -= w;
    }
    let scale = 1.0 / d_b as f64;
    let mut out = x.clone();
    for i in 0..d_a {
        for j in 0..d_a {
            let v = delta[(i, j)] * scale;
            for b in 0..d_b {
                out[(i * d_b + b, j * d_b + b)] -= v;
            }
        }
    }
    out
}

/// Eigenvalue clipping onto the PSD cone.
fn project_psd(x: &Mat) -> Mat {
    eigh(x).map_eigenvalues(|l| l.max(0.0))
}

/// Outcome of a Dykstra run, converged or not.
pub(crate) struct Projection {
    pub matrix: Mat,
    pub error: f64,
    pub sweeps: usize,
    pub converged: bool,
}

/// Dykstra's alternating projections between the PSD cone and the affine
/// marginal constraint. Returns the PSD iterate.
pub(crate) fn dykstra(x: &Mat, d_a: usize, max_sweeps: usize, tol: f64) -> Projection {
    let mut current = hermitize(x);
    let mut correction = Mat::zeros(x.nrows(), x.ncols());
    let mut y = current.clone();
    let mut error = f64::INFINITY;
    for sweep in 1..=max_sweeps.max(1) {
        let shifted = &current + &correction;
        y = project_psd(&shifted);
        correction = shifted - &y;
        // the affine constraint needs no correction term
        current = project_affine(&y, d_a);
        let trace = y.trace().re;
        error = marginal_deviation(&y, d_a).max((trace - 1.0).abs());
        if error <= tol {
            return Projection { matrix: y, error, sweeps: sweep, converged: true };
        }
    }
    Projection { matrix: y, error, sweeps: max_sweeps, converged: false }
}

/// Semismooth Newton method on the dual of the projection problem.
///
/// Minimizes `θ(Y) = ½‖(X − Y⊗I_B)₊‖² + Tr(Y)/d_A` over Hermitian `Y`; at the
/// minimizer `σ = (X − Y⊗I_B)₊` is the projection of `X`. `max_iter` bounds
/// the Newton steps.
pub(crate) fn dual_newton(x: &Mat, d_a: usize, max_iter: usize, tol: f64) -> Projection {
    let n = x.nrows();
    let d_b = n / d_a;
    let x = hermitize(x);
    let inv = C64::new(1.0 / d_a as f64, 0.0);
    // the affine projection's multiplier is exact when no clipping is active
    let mut y = trace_b(&x, d_a) * C64::new(1.0 / d_b as f64, 0.0);
    for i in 0..d_a {
        y[(i, i)] -= inv / C64::new(d_b as f64, 0.0);
    }

    let shifted = |y: &Mat| -> Mat {
        let mut z = x.clone();
        for i in 0..d_a {
            for j in 0..d_a {
                let v = y[(i, j)];
                for b in 0..d_b {
                    z[(i * d_b + b, j * d_b + b)] -= v;
                }
            }
        }
        z
    };
    let gradient = |sigma: &Mat| -> Mat {
        let mut g = -trace_b(sigma, d_a);
        for i in 0..d_a {
            g[(i, i)] += inv;
        }
        g
    };
    let theta = |sigma: &Mat, y: &Mat| -> f64 { 0.5 * sigma.norm_squared() + y.trace().re / d_a as f64 };

    let mut spec = eigh(&shifted(&y));
    let mut sigma = spec.map_eigenvalues(|l| l.max(0.0));
    let mut grad = gradient(&sigma);
    let mut value = theta(&sigma, &y);
    let mut error = f64::INFINITY;
    for it in 0..=max_iter {
        let trace = sigma.trace().re;
        error = grad.norm().max((trace - 1.0).abs());
        if error <= tol {
            return Projection { matrix: sigma, error, sweeps: it, converged: true };
        }
        if it == max_iter {
            break;
        }

        // generalized Hessian in the matrix-unit basis: ⟨W_cd, Ω ∘ W_ab⟩ with W_ab = P_a† P_b,
        // assembled as Z† diag(Ω) Z over the entries where Ω is nonzero
        let mut hess = newton_hessian(&spec, d_a, d_b);
        let k = d_a * d_a;
        let reg = 1e-12 * (1.0 + hess.diagonal().iter().map(|z| z.re).fold(0.0, f64::max));
        for i in 0..k {
            hess[(i, i)] += C64::new(reg, 0.0);
        }
        let rhs = nalgebra::DVector::from_fn(k, |idx, _| -grad[(idx / d_a, idx % d_a)]);
        let Some(sol) = hess.lu().solve(&rhs) else { break };
        let dir = hermitize(&Mat::from_fn(d_a, d_a, |i, j| sol[i * d_a + j]));

        let slope = crate::tensor::hs_inner(&grad, &dir).re;
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let y_new = &y + &dir * C64::new(step, 0.0);
            let spec_new = eigh(&shifted(&y_new));
            let sigma_new = spec_new.map_eigenvalues(|l| l.max(0.0));
            let value_new = theta(&sigma_new, &y_new);
            let grad_new = gradient(&sigma_new);
            // near the solution the decrease in θ drops below its round-off, so a
            // halved residual also counts as progress
            if value_new <= value + 1e-4 * step * slope || grad_new.norm() <= 0.5 * grad.norm() {
                y = y_new;
                spec = spec_new;
                sigma = sigma_new;
                value = value_new;
                grad = grad_new;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Projection { matrix: sigma, error, sweeps: max_iter, converged: false }
}

/// Divided difference of `max(·, 0)` at a pair of eigenvalues.
fn clip_weight(li: f64, lj: f64) -> f64 {
    if (li - lj).abs() > 1e-14 * (1.0 + li.abs().max(lj.abs())) {
        (li.max(0.0) - lj.max(0.0)) / (li - lj)
    } else if li > 0.0 {
        1.0
    } else {
        0.0
    }
}

fn newton_hessian(spec: &crate::tensor::HermitianSpectrum, d_a: usize, d_b: usize) -> Mat {
    let v = &spec.eigenvectors;
    let lam = &spec.eigenvalues;
    let n = lam.len();
    let k = d_a * d_a;
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let w = clip_weight(lam[i], lam[j]);
            if w > 0.0 {
                pairs.push((i, j, w));
            }
        }
    }
    let vc = v.map(|z| z.conj());
    let mut z = faer::Mat::<C64>::zeros(pairs.len(), k);
    let mut zw = faer::Mat::<C64>::zeros(pairs.len(), k);
    for (p, &(i, j, w)) in pairs.iter().enumerate() {
        for a in 0..d_a {
            for b in 0..d_a {
                let mut acc = C64::new(0.0, 0.0);
                for beta in 0..d_b {
                    acc += vc[(a * d_b + beta, i)] * v[(b * d_b + beta, j)];
                }
                z[(p, a * d_a + b)] = acc;
                zw[(p, a * d_a + b)] = acc * w;
            }
        }
    }
    let h = z.adjoint() * &zw;
    Mat::from_fn(k, k, |r, c| h[(r, c)])
}

/// Algorithm used by [`project_feasible_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProjectionMethod {
    /// Semismooth Newton on the dual; falls back to Dykstra if it stalls.
    #[default]
    DualNewton,
    /// Dykstra's alternating projections.
    Dykstra,
}

/// Newton steps allowed before falling back to Dykstra.
const NEWTON_MAX_ITER: usize = 100;

pub(crate) fn project_raw(x: &Mat, d_a: usize, method: ProjectionMethod, max_sweeps: usize, tol: f64) -> Projection {
    match method {
        ProjectionMethod::Dykstra => dykstra(x, d_a, max_sweeps, tol),
        ProjectionMethod::DualNewton => {
            let p = dual_newton(x, d_a, NEWTON_MAX_ITER, tol);
            if p.converged {
                p
            } else {
                dykstra(x, d_a, max_sweeps, tol)
            }
        }
    }
}

/// Projects a Hermitian operator onto `F_d(B)`; the last factor of `x` is `B`.
///
/// `max_iter` bounds the Dykstra sweeps.
pub fn project_feasible(x: &SquareOperator, max_iter: usize, tol: f64) -> Result<FeasibleState> {
    project_feasible_with(x, ProjectionMethod::default(), max_iter, tol)
}

pub fn project_feasible_with(
    x: &SquareOperator,
    method: ProjectionMethod,
    max_iter: usize,
    tol: f64,
) -> Result<FeasibleState> {
    let (d_a, _) = split_dims(x.factor_dims())?;
    let deviation = x.hermiticity_deviation();
    if deviation > HERMITIAN_TOL * x.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let p = project_raw(x.entries(), d_a, method, max_iter, tol);
    if !p.converged {
        return Err(Error::NonConvergence { iterations: p.sweeps, error: p.error });
    }
    let op = SquareOperator::new(p.matrix, x.factor_dims().to_vec())?;
    Ok(FeasibleState::from_parts(op, p.error))
}

fn check_map_fits(sigma: &FeasibleState, n: &CpMap) -> Result<()> {
    if n.dim_in() != sigma.d_a() {
        return Err(Error::DimensionMismatch { expected: sigma.d_a(), actual: n.dim_in() });
    }
    Ok(())
}

/// `((N†∘N) ⊗ id)(σ)` on a matrix over `C^{d_A} ⊗ C^{d_B}`.
pub(crate) fn gradient_operator(n: &CpMap, adjoint: &CpMap, sigma: &Mat, d_b: usize) -> (Mat, Mat) {
    let d_a = n.dim_in();
    let (omega, out_dims) = crate::tensor::conjugate_on_factor(sigma, &[d_a, d_b], 0, n.kraus());
    let (m, _) = crate::tensor::conjugate_on_factor(&omega, &out_dims, 0, adjoint.kraus());
    (omega, m)
}

/// `Tr(σ · ((N†∘N) ⊗ id)(σ)) = ‖(N ⊗ id)(σ)‖₂²`, with `N` acting jointly on all `A` factors.
pub fn quadratic_objective(sigma: &FeasibleState, n: &CpMap) -> Result<f64> {
    check_map_fits(sigma, n)?;
    let (_, m) = gradient_operator(n, &n.adjoint(), sigma.operator().entries(), sigma.d_b());
    Ok(crate::tensor::hs_inner(sigma.operator().entries(), &m).re)
}

/// `‖(N ⊗ id)(σ)‖₂²` computed from the output state directly.
pub fn output_purity(sigma: &FeasibleState, n: &CpMap) -> Result<f64> {
    check_map_fits(sigma, n)?;
    let (omega, _) =
        crate::tensor::conjugate_on_factor(sigma.operator().entries(), &[sigma.d_a(), sigma.d_b()], 0, n.kraus());
    Ok(omega.norm_squared())
}

/// `Σ_{S ⊆ [n]} a^{|S|} b^{n−|S|} Tr(σ_{A_S B}²)` by explicit enumeration.
pub fn subset_purity_objective(sigma: &FeasibleState, a: f64, b: f64, n: usize) -> Result<f64> {
    if n > SUBSET_COPIES_LIMIT {
        return Err(Error::SizeGuard { what: "copies", value: n, limit: SUBSET_COPIES_LIMIT });
    }
    let dims = sigma.operator().factor_dims();
    if dims.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, actual: dims.len() });
    }
    let mut total = 0.0;
    for mask in 0u32..(1 << n) {
        let mut keep: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).collect();
        let size = keep.len();
        keep.push(n);
        let reduced = partial_trace(sigma.operator(), &keep)?;
        total += a.powi(size as i32) * b.powi((n - size) as i32) * reduced.purity();
    }
    Ok(total)
}

/// The chain `objective ≤ Tr((σ⊗σ)|G|) ≤ (α + β/d)ⁿ` for the swap polynomial
/// `G = V ∏_k (t² U_k + a I)` on the doubled space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapPolynomialBound {
    /// `Tr((σ⊗σ) G)`.
    pub objective: f64,
    /// `Tr((σ⊗σ) |G|)`.
    pub abs_bound: f64,
    /// `(α + β/d)ⁿ`.
    pub closed_bound: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl SwapPolynomialBound {
    /// Smallest gap along the chain; negative means a violation.
    pub fn slack(&self) -> f64 {
        (self.abs_bound - self.objective).min(self.closed_bound - self.abs_bound)
    }
}

/// `α = (|a+t²| + |a−t²|)/2`, `β = (|a+t²| − |a−t²|)/2`.
pub fn alpha_beta(a_coef: f64, t2: f64) -> (f64, f64) {
    let (plus, minus) = ((a_coef + t2).abs(), (a_coef - t2).abs());
    ((plus + minus) / 2.0, (plus - minus) / 2.0)
}

/// Evaluates the swap-polynomial objective and both bounds for a state on `A₁…A_n B`.
///
/// `U_k` exchanges `A_k` with its copy `A_k'`, `V` exchanges `B` with `B'`.
pub fn swap_polynomial_bound(
    sigma: &FeasibleState,
    a_coef: f64,
    t2: f64,
    d: usize,
    n: usize,
) -> Result<SwapPolynomialBound> {
    if n == 0 || n > SWAP_COPIES_LIMIT {
        return Err(Error::SizeGuard { what: "copies", value: n, limit: SWAP_COPIES_LIMIT });
    }
    let dims = sigma.operator().factor_dims().to_vec();
    if dims.len() != n + 1 || dims[..n].iter().any(|&x| x != d) {
        return Err(Error::InvalidArgument(format!("expected {n} factors of dimension {d} followed by B, got {dims:?}")));
    }
    let dim = sigma.operator().dim();
    if dim > JOINT_DIM_LIMIT {
        return Err(Error::SizeGuard { what: "d^n * d_B", value: dim, limit: JOINT_DIM_LIMIT });
    }
    let s = sigma.operator().entries();
    let st = crate::tensor::strides(&dims);

    // Tr((σ⊗σ) P) = Σ_{x,x'} σ[x, y] σ[x', y'] with (y, y') = P(x, x')
    let mut objective = 0.0;
    for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as i32;
        let weight = t2.powi(size) * a_coef.powi(n as i32 - size);
        let mut swapped: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).collect();
        swapped.push(n);
        let mut term = C64::new(0.0, 0.0);
        for x in 0..dim {
            for xp in 0..dim {
                let (mut y, mut yp) = (x, xp);
                for &f in &swapped {
                    let (dx, dxp) = ((x / st[f]) % dims[f], (xp / st[f]) % dims[f]);
                    y = y - dx * st[f] + dxp * st[f];
                    yp = yp - dxp * st[f] + dx * st[f];
                }
                term += s[(x, y)] * s[(xp, yp)];
            }
        }
        objective += weight * term.re;
    }

    // |G| = ⊗_k |t² U_k + a I| ⊗ I_{BB'}, so only σ_A ⊗ σ_A enters
    let g1 = swap_operator(d).scaled(t2).add(&SquareOperator::identity(&[d, d]).scaled(a_coef))?;
    let abs_g1 = SquareOperator::new(eigh(g1.entries()).map_eigenvalues(f64::abs), vec![d, d])?;
    let paired = tensor_all(&vec![abs_g1; n]).expect("n >= 1");
    // (A₁ A₁' A₂ A₂' …) → (A₁ A₂ … A₁' A₂' …)
    let perm: Vec<usize> = (0..n).map(|k| 2 * k).chain((0..n).map(|k| 2 * k + 1)).collect();
    let abs_g = permute_subsystems(&paired, &perm)?;
    let sigma_a = partial_trace(sigma.operator(), &(0..n).collect::<Vec<_>>())?;
    let doubled = tensor_product(&sigma_a, &sigma_a);
    let abs_bound = crate::tensor::hs_inner(doubled.entries(), abs_g.entries()).re;

    let (alpha, beta) = alpha_beta(a_coef, t2);
    Ok(SwapPolynomialBound {
        objective,
        abs_bound,
        closed_bound: (alpha + beta / d as f64).powi(n as i32),
        alpha,
        beta,
    })
}

/// A random feasible state: a Wishart matrix projected onto `F_d(B)`.
pub fn random_feasible(
    rng: &mut crate::rng::ExperimentRng,
    a_dims: &[usize],
    d_b: usize,
) -> Result<FeasibleState> {
    let dims = joint_dims(a_dims, d_b);
    let w = crate::rng::random_density(rng, &dims);
    project_feasible(&w, DEFAULT_PROJECTION_SWEEPS, DEFAULT_PROJECTION_TOL)
}
