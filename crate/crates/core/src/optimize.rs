//! Projected gradient ascent of `‖(N ⊗ id)(σ)‖₂²` over `F_d(B)`, and the
//! n-copy multiplicativity gap built on it.

use serde::Serialize;

use crate::channel::{tensor_power, CpMap};
use crate::closed_form::{extract_ab, upsilon2_general};
use crate::error::{Error, Result};
use crate::feasible::{
    gradient_operator, project_feasible_with, project_raw, FeasibleState, ProjectionMethod, DEFAULT_PROJECTION_SWEEPS, DEFAULT_PROJECTION_TOL,
    JOINT_DIM_LIMIT,
};
use crate::rng::{random_density, ExperimentRng};
use crate::tensor::{hs_inner, Mat, OperatorJson, SquareOperator, C64};

/// Output dimension used when none is given: `d_A²` for one copy, capped at 16 for more.
pub fn default_output_dim(d_a: usize, copies: usize) -> usize {
    if copies <= 1 {
        d_a * d_a
    } else {
        (d_a * d_a).min(16)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Output dimension `d_B`; `None` picks [`default_output_dim`].
    pub d_b: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
    /// Stop when the relative objective change falls below this.
    pub tol: f64,
    pub max_iter: usize,
    pub initial_step: f64,
    pub backtrack: f64,
    pub armijo: f64,
    pub max_backtracks: usize,
    pub projection_tol: f64,
    pub projection_max_sweeps: usize,
    pub projection: ProjectionMethod,
    /// Factorization of the input space (e.g. `[d, d]` for two copies); `None` means a single factor.
    pub a_dims: Option<Vec<usize>>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            d_b: None,
            restarts: 8,
            seed: 0,
            tol: 1e-10,
            max_iter: 5000,
            initial_step: 1.0,
            backtrack: 0.5,
            armijo: 1e-4,
            max_backtracks: 40,
            projection_tol: DEFAULT_PROJECTION_TOL,
            projection_max_sweeps: DEFAULT_PROJECTION_SWEEPS,
            projection: ProjectionMethod::DualNewton,
            a_dims: None,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_d_b(mut self, d_b: usize) -> Self {
        self.d_b = Some(d_b);
        self
    }
}

/// Result of [`optimize_upsilon2`]. Values are norms, not squared norms.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationReport {
    /// Largest `‖(N ⊗ id)(σ)‖₂` found.
    pub best_value: f64,
    pub best_state: FeasibleState,
    pub best_restart: usize,
    pub restarts: usize,
    pub iterations_per_restart: Vec<usize>,
    pub values_per_restart: Vec<f64>,
    /// `upsilon2_general(a, b, d)` when `N` satisfies the `(a, b)` criterion.
    pub analytic_upper: Option<f64>,
    /// `analytic_upper − best_value`.
    pub gap: Option<f64>,
    pub seed: u64,
    pub d_b: usize,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap: Option<f64>,
    seed: u64,
    restarts: usize,
    state: OperatorJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    analytic_upper: Option<f64>,
    d_b: usize,
    best_restart: usize,
    iterations_per_restart: &'a [usize],
    values_per_restart: &'a [f64],
}

impl OptimizationReport {
    pub fn to_json(&self) -> String {
        let json = ReportJson {
            value: self.best_value,
            gap: self.gap,
            seed: self.seed,
            restarts: self.restarts,
            state: OperatorJson::from(self.best_state.operator()),
            analytic_upper: self.analytic_upper,
            d_b: self.d_b,
            best_restart: self.best_restart,
            iterations_per_restart: &self.iterations_per_restart,
            values_per_restart: &self.values_per_restart,
        };
        serde_json::to_string(&json).expect("report serializes")
    }
}

struct Problem<'a> {
    map: &'a CpMap,
    adjoint: CpMap,
    d_a: usize,
    d_b: usize,
}

impl Problem<'_> {
    /// `(f(σ), M(σ))` with `f = Tr(σ M)`, `M = ((N†∘N) ⊗ id)(σ)`.
    fn evaluate(&self, sigma: &Mat) -> (f64, Mat) {
        let (_, m) = gradient_operator(self.map, &self.adjoint, sigma, self.d_b);
        (hs_inner(sigma, &m).re, m)
    }
}

struct RestartOutcome {
    state: Mat,
    error: f64,
    value: f64,
    iterations: usize,
}

fn ascend(problem: &Problem<'_>, start: Mat, start_error: f64, config: &OptimizerConfig) -> RestartOutcome {
    let mut sigma = start;
    let mut error = start_error;
    let (mut f, mut m) = problem.evaluate(&sigma);
    let mut iterations = 0;
    while iterations < config.max_iter {
        iterations += 1;
        let grad = &m * C64::new(2.0, 0.0);
        let mut step = config.initial_step;
        let mut accepted = None;
        for _ in 0..config.max_backtracks {
            let trial = &sigma + &grad * C64::new(step, 0.0);
            let p = project_raw(&trial, problem.d_a, config.projection, config.projection_max_sweeps, config.projection_tol);
            if p.converged {
                let (f_new, m_new) = problem.evaluate(&p.matrix);
                let predicted = hs_inner(&grad, &(&p.matrix - &sigma)).re;
                if f_new >= f && f_new >= f + config.armijo * predicted {
                    accepted = Some((p.matrix, p.error, f_new, m_new));
                    break;
                }
            }
            step *= config.backtrack;
        }
        let Some((next, next_error, f_new, m_new)) = accepted else { break };
        let change = (f_new - f) / f.abs().max(f64::MIN_POSITIVE);
        sigma = next;
        error = next_error;
        f = f_new;
        m = m_new;
        if change < config.tol {
            break;
        }
    }
    RestartOutcome { state: sigma, error, value: f, iterations }
}

fn seed_state(restart: usize, a_dims: &[usize], d_b: usize, config: &OptimizerConfig) -> Result<FeasibleState> {
    let d_a: usize = a_dims.iter().product();
    match restart {
        0 if d_b >= d_a => FeasibleState::maximally_entangled(a_dims, d_b),
        1 => FeasibleState::marginal_product(a_dims, d_b, 0),
        _ => {
            let mut rng = ExperimentRng::new(config.seed, restart as u64);
            let mut dims = a_dims.to_vec();
            dims.push(d_b);
            let w = random_density(&mut rng, &dims);
            project_feasible_with(&w, config.projection, config.projection_max_sweeps, config.projection_tol)
        }
    }
}

/// Maximizes `‖(N ⊗ id_B)(σ)‖₂` over `σ ∈ F_d(B)` by multi-restart projected gradient ascent.
///
/// Restart 0 starts from the maximally entangled state, restart 1 from
/// `I/d ⊗ |0⟩⟨0|`, later restarts from projected Wishart matrices drawn from
/// stream `restart` of `seed`.
pub fn optimize_upsilon2(n: &CpMap, config: &OptimizerConfig) -> Result<OptimizationReport> {
    let d_a = n.dim_in();
    let a_dims = config.a_dims.clone().unwrap_or_else(|| vec![d_a]);
    if a_dims.iter().product::<usize>() != d_a {
        return Err(Error::BadFactorization { factors: a_dims, dim: d_a });
    }
    let d_b = config.d_b.unwrap_or_else(|| default_output_dim(d_a, a_dims.len()));
    if d_b == 0 {
        return Err(Error::InvalidArgument("d_B must be positive".into()));
    }
    if config.restarts == 0 {
        return Err(Error::InvalidArgument("at least one restart is needed".into()));
    }
    let problem = Problem { map: n, adjoint: n.adjoint(), d_a, d_b };

    let mut best: Option<(usize, RestartOutcome)> = None;
    let mut iterations_per_restart = Vec::with_capacity(config.restarts);
    let mut values_per_restart = Vec::with_capacity(config.restarts);
    for restart in 0..config.restarts {
        let start = seed_state(restart, &a_dims, d_b, config)?;
        let error = start.feasibility_error();
        let outcome = ascend(&problem, start.into_operator().into_entries(), error, config);
        iterations_per_restart.push(outcome.iterations);
        values_per_restart.push(outcome.value.max(0.0).sqrt());
        if best.as_ref().map_or(true, |(_, b)| outcome.value > b.value) {
            best = Some((restart, outcome));
        }
    }
    let (best_restart, outcome) = best.expect("at least one restart");
    let mut dims = a_dims;
    dims.push(d_b);
    let best_state = FeasibleState::from_parts(SquareOperator::new(outcome.state, dims)?, outcome.error);
    let best_value = outcome.value.max(0.0).sqrt();

    let analytic_upper = if n.dim_in() == n.dim_out() {
        let c = extract_ab(n);
        if c.satisfied() {
            Some(upsilon2_general(c.a.max(0.0), c.b.max(0.0), d_a)?)
        } else {
            None
        }
    } else {
        None
    };
    Ok(OptimizationReport {
        best_value,
        best_state,
        best_restart,
        restarts: config.restarts,
        iterations_per_restart,
        values_per_restart,
        analytic_upper,
        gap: analytic_upper.map(|u| u - best_value),
        seed: config.seed,
        d_b,
    })
}

/// Where the one-copy value in a multiplicativity comparison comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OneCopySource {
    /// `upsilon2_general` from the fitted `(a, b)`.
    Analytic,
    /// A one-copy optimizer run, for maps outside the criterion.
    Numerical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicativityReport {
    /// `υ₂(N^{⊗n})` found minus `υ₂(N)ⁿ`.
    pub gap: f64,
    pub copies: usize,
    pub one_copy: f64,
    pub one_copy_source: OneCopySource,
    pub n_copy: OptimizationReport,
}

/// Optimizes `N^{⊗n}` and compares with the n-th power of the one-copy value.
pub fn multiplicativity_report(n: &CpMap, copies: usize, config: &OptimizerConfig) -> Result<MultiplicativityReport> {
    if copies == 0 {
        return Err(Error::InvalidArgument("copies must be positive".into()));
    }
    let d = n.dim_in();
    let d_joint = d.checked_pow(copies as u32).unwrap_or(usize::MAX);
    let d_b = config.d_b.unwrap_or_else(|| default_output_dim(d_joint, copies));
    let joint = d_joint.saturating_mul(d_b);
    if joint > JOINT_DIM_LIMIT {
        return Err(Error::SizeGuard { what: "d^n * d_B", value: joint, limit: JOINT_DIM_LIMIT });
    }
    let c = extract_ab(n);
    let (one_copy, one_copy_source) = if n.dim_in() == n.dim_out() && c.satisfied() {
        (upsilon2_general(c.a.max(0.0), c.b.max(0.0), d)?, OneCopySource::Analytic)
    } else {
        let single = OptimizerConfig { d_b: None, a_dims: None, ..config.clone() };
        (optimize_upsilon2(n, &single)?.best_value, OneCopySource::Numerical)
    };
    let power = tensor_power(n, copies)?;
    let joint_config = OptimizerConfig { d_b: Some(d_b), a_dims: Some(vec![d; copies]), ..config.clone() };
    let report = optimize_upsilon2(&power, &joint_config)?;
    Ok(MultiplicativityReport {
        gap: report.best_value - one_copy.powi(copies as i32),
        copies,
        one_copy,
        one_copy_source,
        n_copy: report,
    })
}

/// `υ₂(N^{⊗n})` found minus `υ₂(N)ⁿ`.
pub fn multiplicativity_gap(n: &CpMap, copies: usize, config: &OptimizerConfig) -> Result<f64> {
    Ok(multiplicativity_report(n, copies, config)?.gap)
}
