//! Completely positive maps in Kraus form.
//!
//! Maps are stored as Kraus lists; the Choi matrix is built on first use and
//! cached. The Stinespring environment is always the second output factor.

mod zoo;

pub use zoo::*;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{
    conjugate_on_factor, matrix_to_pairs, pairs_to_matrix, partial_trace, Mat, SquareOperator, C64,
};

/// Trace-preservation tolerance on `‖Σ K†K − I‖₂`.
pub const TP_TOL: f64 = 1e-10;

/// Eigenvalues of a Choi matrix below this are dropped when extracting Kraus operators.
pub const KRAUS_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct CpMap {
    kraus: Vec<Mat>,
    dim_in: usize,
    dim_out: usize,
    trace_preserving: bool,
    choi: OnceLock<SquareOperator>,
}

impl CpMap {
    /// Builds a map from Kraus operators (all `dim_out × dim_in`).
    pub fn new(kraus: Vec<Mat>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyKraus)?;
        let (dim_out, dim_in) = first.shape();
        for k in &kraus {
            if k.nrows() != dim_out {
                return Err(Error::DimensionMismatch { expected: dim_out, actual: k.nrows() });
            }
            if k.ncols() != dim_in {
                return Err(Error::DimensionMismatch { expected: dim_in, actual: k.ncols() });
            }
        }
        let trace_preserving = tp_deviation(&kraus, dim_in) <= TP_TOL;
        Ok(Self { kraus, dim_in, dim_out, trace_preserving, choi: OnceLock::new() })
    }

    /// Builds a map from an unnormalized Choi matrix `J = Σ |i⟩⟨j| ⊗ N(|i⟩⟨j|)`.
    ///
    /// Kraus operators are the eigenvectors of `J` reshaped to `d_out × d_in`
    /// and scaled by the square roots of their eigenvalues.
    pub fn from_choi(choi: &SquareOperator, d_in: usize, d_out: usize) -> Result<Self> {
        if choi.dim() != d_in * d_out {
            return Err(Error::DimensionMismatch { expected: d_in * d_out, actual: choi.dim() });
        }
        let spec = crate::tensor::hermitian_eig(choi)?;
        let scale = spec.eigenvalues.first().copied().unwrap_or(0.0).abs().max(1.0);
        if let Some(&min) = spec.eigenvalues.last() {
            if min < -1e-9 * scale {
                return Err(Error::NotPositive { min_eigenvalue: min });
            }
        }
        let mut kraus = Vec::new();
        for (j, &lambda) in spec.eigenvalues.iter().enumerate() {
            if lambda <= KRAUS_CUTOFF {
                continue;
            }
            let s = lambda.sqrt();
            let v = spec.eigenvectors.column(j);
            kraus.push(Mat::from_fn(d_out, d_in, |o, i| v[i * d_out + o] * s));
        }
        if kraus.is_empty() {
            kraus.push(Mat::zeros(d_out, d_in));
        }
        Self::new(kraus)
    }

    /// Builds the map defined by a linear action on matrix units.
    pub fn from_linear_map(d_in: usize, d_out: usize, f: impl Fn(&Mat) -> Mat) -> Result<Self> {
        let n = d_in * d_out;
        let mut j = Mat::zeros(n, n);
        for a in 0..d_in {
            for b in 0..d_in {
                let mut unit = Mat::zeros(d_in, d_in);
                unit[(a, b)] = C64::new(1.0, 0.0);
                let image = f(&unit);
                for o in 0..d_out {
                    for p in 0..d_out {
                        j[(a * d_out + o, b * d_out + p)] = image[(o, p)];
                    }
                }
            }
        }
        let choi = SquareOperator::new(j, vec![d_in, d_out])?;
        Self::from_choi(&choi, d_in, d_out)
    }

    pub fn kraus(&self) -> &[Mat] {
        &self.kraus
    }

    pub fn kraus_count(&self) -> usize {
        self.kraus.len()
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// `‖Σ K†K − I‖₂`.
    pub fn trace_preservation_error(&self) -> f64 {
        tp_deviation(&self.kraus, self.dim_in)
    }

    /// `Σ K ρ K†`. Keeps the input factorization when input and output dimensions agree.
    pub fn apply(&self, rho: &SquareOperator) -> Result<SquareOperator> {
        if rho.dim() != self.dim_in {
            return Err(Error::DimensionMismatch { expected: self.dim_in, actual: rho.dim() });
        }
        let m = rho.entries();
        let out = self
            .kraus
            .iter()
            .fold(Mat::zeros(self.dim_out, self.dim_out), |acc, k| acc + k * m * k.adjoint());
        let dims = if self.dim_out == self.dim_in { rho.factor_dims().to_vec() } else { vec![self.dim_out] };
        SquareOperator::new(out, dims)
    }

    /// `(id ⊗ … ⊗ N ⊗ … ⊗ id)(ρ)` with `N` acting on factor `factor` (0-based).
    pub fn apply_to_factor(&self, rho: &SquareOperator, factor: usize) -> Result<SquareOperator> {
        let dims = rho.factor_dims();
        if factor >= dims.len() {
            return Err(Error::InvalidSubsystem { indices: vec![factor], count: dims.len() });
        }
        if dims[factor] != self.dim_in {
            return Err(Error::DimensionMismatch { expected: self.dim_in, actual: dims[factor] });
        }
        let (out, out_dims) = conjugate_on_factor(rho.entries(), dims, factor, &self.kraus);
        SquareOperator::new(out, out_dims)
    }

    /// Unnormalized Choi matrix `Σ |i⟩⟨j| ⊗ N(|i⟩⟨j|)` with factors `[dim_in, dim_out]`.
    pub fn choi_matrix(&self) -> &SquareOperator {
        self.choi.get_or_init(|| {
            let phi = SquareOperator::maximally_entangled(self.dim_in).scaled(self.dim_in as f64);
            self.apply_to_factor(&phi, 1).expect("dimensions agree by construction")
        })
    }

    /// Normalized Choi state `(id ⊗ N)(Φ_{d_in})`.
    pub fn choi_state(&self) -> ChoiState {
        ChoiState {
            operator: self.choi_matrix().scaled(1.0 / self.dim_in as f64),
            normalized: self.trace_preserving,
        }
    }

    /// Superoperator matrix `Σ K ⊗ K̄` acting on row-major vectorizations.
    pub fn transfer_matrix(&self) -> Mat {
        let (o, i) = (self.dim_out, self.dim_in);
        self.kraus
            .iter()
            .fold(Mat::zeros(o * o, i * i), |acc, k| acc + k.kronecker(&k.map(|z| z.conj())))
    }

    /// Stinespring operator `W = Σ_k K_k ⊗ |k⟩ : C^{d_in} → C^{d_out} ⊗ C^{r}`.
    pub fn stinespring(&self) -> Mat {
        let r = self.kraus.len();
        let mut w = Mat::zeros(self.dim_out * r, self.dim_in);
        for (k, op) in self.kraus.iter().enumerate() {
            for a in 0..self.dim_out {
                for i in 0..self.dim_in {
                    w[(a * r + k, i)] = op[(a, i)];
                }
            }
        }
        w
    }

    /// Kraus-level adjoint `X ↦ Σ K† X K`.
    pub fn adjoint(&self) -> CpMap {
        hs_adjoint(self)
    }
}

fn tp_deviation(kraus: &[Mat], dim_in: usize) -> f64 {
    let s = kraus.iter().fold(Mat::zeros(dim_in, dim_in), |acc, k| acc + k.adjoint() * k);
    (s - Mat::identity(dim_in, dim_in)).norm()
}

/// Hilbert–Schmidt adjoint: Kraus operators `K_k†`.
pub fn hs_adjoint(n: &CpMap) -> CpMap {
    CpMap::new(n.kraus.iter().map(|k| k.adjoint()).collect()).expect("nonempty")
}

/// `N2 ∘ N1`.
pub fn compose(n2: &CpMap, n1: &CpMap) -> Result<CpMap> {
    if n1.dim_out != n2.dim_in {
        return Err(Error::DimensionMismatch { expected: n2.dim_in, actual: n1.dim_out });
    }
    let kraus = n2.kraus.iter().flat_map(|b| n1.kraus.iter().map(move |a| b * a)).collect();
    CpMap::new(kraus)
}

/// `N1 ⊗ N2`.
pub fn tensor_maps(n1: &CpMap, n2: &CpMap) -> CpMap {
    let kraus = n1.kraus.iter().flat_map(|a| n2.kraus.iter().map(move |b| a.kronecker(b))).collect();
    CpMap::new(kraus).expect("nonempty")
}

/// Largest allowed `dim_in^n` for tensor powers.
pub const TENSOR_POWER_LIMIT: usize = 64;

/// `N^{⊗n}` with all `r^n` Kraus products.
pub fn tensor_power(n: &CpMap, copies: usize) -> Result<CpMap> {
    if copies == 0 {
        return Err(Error::InvalidArgument("tensor power needs at least one copy".into()));
    }
    let size = (n.dim_in as u128).saturating_pow(copies as u32);
    if size > TENSOR_POWER_LIMIT as u128 {
        return Err(Error::SizeGuard {
            what: "dim_in^n",
            value: size.min(usize::MAX as u128) as usize,
            limit: TENSOR_POWER_LIMIT,
        });
    }
    let mut out = n.clone();
    for _ in 1..copies {
        out = tensor_maps(&out, n);
    }
    Ok(out)
}

/// Complementary map `X ↦ Tr_out(W X W†)` for the Stinespring operator `W` of [`CpMap::stinespring`].
///
/// Its Kraus operators are `L_a = Σ_k |k⟩⟨a| K_k`, so the output dimension
/// is the Kraus count of `n`.
pub fn complementary(n: &CpMap) -> CpMap {
    let r = n.kraus.len();
    let kraus = (0..n.dim_out)
        .map(|a| Mat::from_fn(r, n.dim_in, |k, i| n.kraus[k][(a, i)]))
        .collect();
    CpMap::new(kraus).expect("nonempty")
}

/// The map `T ∘ N† ∘ T` (Kraus operators `K^T`).
pub fn transpose_dual(n: &CpMap) -> CpMap {
    CpMap::new(n.kraus.iter().map(|k| k.transpose()).collect()).expect("nonempty")
}

/// Normalized Choi state `(id ⊗ Λ)(Φ_d)` with factors `[d_A, d_B]`.
#[derive(Debug, Clone)]
pub struct ChoiState {
    pub operator: SquareOperator,
    pub normalized: bool,
}

impl ChoiState {
    /// Wraps a bipartite operator, checking positivity and the trace.
    pub fn new(operator: SquareOperator) -> Result<Self> {
        if operator.factor_dims().len() != 2 {
            return Err(Error::InvalidArgument("Choi state needs two factors".into()));
        }
        let min = crate::tensor::hermitian_eig(&operator)?.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -1e-10 {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        let trace = operator.trace().re;
        Ok(Self { operator, normalized: (trace - 1.0).abs() <= 1e-10 })
    }

    /// `‖Tr_B σ − I/d_A‖₂`.
    pub fn marginal_deviation(&self) -> f64 {
        let d = self.operator.factor_dims()[0];
        partial_trace(&self.operator, &[0])
            .expect("two factors")
            .distance(&SquareOperator::maximally_mixed(d))
    }
}

/// Channel `Λ_σ(X) = d Tr_A[(X^T ⊗ I) σ]` whose Choi state is `σ`.
pub fn choi_to_channel(sigma: &ChoiState) -> Result<CpMap> {
    let dev = sigma.marginal_deviation();
    if dev > 1e-8 {
        return Err(Error::MarginalDeviation { deviation: dev });
    }
    let dims = sigma.operator.factor_dims();
    let (d_a, d_b) = (dims[0], dims[1]);
    CpMap::from_choi(&sigma.operator.scaled(d_a as f64), d_a, d_b)
}

/// Serialized form: `{"dims": [dim_in, dim_out], "trace_preserving": bool, "kraus": [[[re, im], ...], ...]}`.
///
/// Each Kraus operator is a row-major `dim_out × dim_in` list of pairs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CpMapJson {
    pub dims: [usize; 2],
    pub trace_preserving: bool,
    pub kraus: Vec<Vec<[f64; 2]>>,
}

impl From<&CpMap> for CpMapJson {
    fn from(n: &CpMap) -> Self {
        Self {
            dims: [n.dim_in, n.dim_out],
            trace_preserving: n.trace_preserving,
            kraus: n.kraus.iter().map(matrix_to_pairs).collect(),
        }
    }
}

impl TryFrom<CpMapJson> for CpMap {
    type Error = Error;

    fn try_from(json: CpMapJson) -> Result<Self> {
        let [d_in, d_out] = json.dims;
        let kraus = json
            .kraus
            .iter()
            .map(|k| pairs_to_matrix(d_out, d_in, k))
            .collect::<Result<Vec<_>>>()?;
        CpMap::new(kraus)
    }
}

impl Serialize for CpMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CpMapJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CpMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        CpMap::try_from(CpMapJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// `max |Tr(Y† A(X)) − Tr(B(Y)† X)|` over random probe pairs; zero when `B` is the adjoint of `A`.
pub fn adjoint_pairing_error(a: &CpMap, b: &CpMap, probes: usize, rng: &mut crate::rng::ExperimentRng) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let x = crate::rng::gaussian_matrix(rng, a.dim_in, a.dim_in);
        let y = crate::rng::gaussian_matrix(rng, a.dim_out, a.dim_out);
        let ax = apply_raw(a, &x);
        let by = apply_raw(b, &y);
        let lhs: C64 = y.iter().zip(ax.iter()).map(|(p, q)| p.conj() * q).sum();
        let rhs: C64 = by.iter().zip(x.iter()).map(|(p, q)| p.conj() * q).sum();
        worst = worst.max((lhs - rhs).norm());
    }
    worst
}

/// `max ‖A(X) − B(X)‖₂` over random (non-Hermitian) probes.
pub fn action_distance(a: &CpMap, b: &CpMap, probes: usize, rng: &mut crate::rng::ExperimentRng) -> Result<f64> {
    if a.dim_in != b.dim_in || a.dim_out != b.dim_out {
        return Err(Error::DimensionMismatch { expected: a.dim_in, actual: b.dim_in });
    }
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let x = crate::rng::gaussian_matrix(rng, a.dim_in, a.dim_in);
        let ax = apply_raw(a, &x);
        let bx = apply_raw(b, &x);
        worst = worst.max((ax - bx).norm());
    }
    Ok(worst)
}

/// Applies a map to a general (not necessarily Hermitian) matrix.
pub(crate) fn apply_raw(n: &CpMap, x: &Mat) -> Mat {
    n.kraus.iter().fold(Mat::zeros(n.dim_out, n.dim_out), |acc, k| acc + k * x * k.adjoint())
}
