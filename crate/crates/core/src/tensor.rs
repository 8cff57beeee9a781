//! Dense complex operators on tensor-product spaces.
//!
//! Subsystems are ordered big-endian: the first factor is the most
//! significant digit of a basis index, so `A ⊗ B` has entries
//! `(A ⊗ B)[(i, k), (j, l)] = A[i, j] B[k, l]` at row `i * dim_b + k`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Hermiticity gate for eigendecomposition, relative to `max(1, ‖M‖₂)`.
pub const HERMITIAN_TOL: f64 = 1e-8;

/// A square matrix together with the subsystem dimensions it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareOperator {
    entries: Mat,
    factor_dims: Vec<usize>,
}

impl SquareOperator {
    pub fn new(entries: Mat, factor_dims: Vec<usize>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                actual: entries.ncols(),
            });
        }
        let dim = entries.nrows();
        if factor_dims.is_empty()
            || factor_dims.iter().any(|&d| d == 0)
            || factor_dims.iter().product::<usize>() != dim
        {
            return Err(Error::BadFactorization {
                factors: factor_dims,
                dim,
            });
        }
        Ok(Self {
            entries,
            factor_dims,
        })
    }

    /// Single-factor operator.
    pub fn from_matrix(entries: Mat) -> Result<Self> {
        let d = entries.nrows();
        Self::new(entries, vec![d])
    }

    pub fn identity(factor_dims: &[usize]) -> Self {
        let dim = factor_dims.iter().product();
        Self {
            entries: Mat::identity(dim, dim),
            factor_dims: factor_dims.to_vec(),
        }
    }

    pub fn zeros(factor_dims: &[usize]) -> Self {
        let dim = factor_dims.iter().product();
        Self {
            entries: Mat::zeros(dim, dim),
            factor_dims: factor_dims.to_vec(),
        }
    }

    /// `I_d / d`.
    pub fn maximally_mixed(d: usize) -> Self {
        Self::identity(&[d]).scaled(1.0 / d as f64)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Mat::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        Self {
            entries: m,
            factor_dims: vec![n],
        }
    }

    /// Rank-one projector `|v⟩⟨v|` (the vector is used as given, not normalized).
    pub fn projector(v: &[C64], factor_dims: &[usize]) -> Result<Self> {
        let n = v.len();
        let m = Mat::from_fn(n, n, |i, j| v[i] * v[j].conj());
        Self::new(m, factor_dims.to_vec())
    }

    /// `|k⟩⟨k|` in dimension `d`.
    pub fn basis_projector(d: usize, k: usize) -> Self {
        let mut m = Mat::zeros(d, d);
        m[(k, k)] = ONE;
        Self {
            entries: m,
            factor_dims: vec![d],
        }
    }

    /// The maximally entangled state `Φ_d` on `C^d ⊗ C^d`.
    pub fn maximally_entangled(d: usize) -> Self {
        Self::embedded_maximally_entangled(d, d)
    }

    /// `Φ_d` with its second half embedded into the first `d` basis vectors of `C^{d_b}`.
    pub fn embedded_maximally_entangled(d: usize, d_b: usize) -> Self {
        assert!(d_b >= d, "embedding needs d_b >= d");
        let dim = d * d_b;
        let mut m = Mat::zeros(dim, dim);
        let w = C64::new(1.0 / d as f64, 0.0);
        for i in 0..d {
            for j in 0..d {
                m[(i * d_b + i, j * d_b + j)] = w;
            }
        }
        Self {
            entries: m,
            factor_dims: vec![d, d_b],
        }
    }

    pub fn entries(&self) -> &Mat {
        &self.entries
    }

    pub fn into_entries(self) -> Mat {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    /// Same entries, different factorization.
    pub fn with_factor_dims(self, factor_dims: Vec<usize>) -> Result<Self> {
        Self::new(self.entries, factor_dims)
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
            factor_dims: self.factor_dims.clone(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            entries: self.entries.transpose(),
            factor_dims: self.factor_dims.clone(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            entries: &self.entries * C64::new(s, 0.0),
            factor_dims: self.factor_dims.clone(),
        }
    }

    /// Frobenius (Hilbert–Schmidt) norm computed from the entries.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Tr(A† B)`.
    pub fn hs_inner(&self, other: &SquareOperator) -> C64 {
        hs_inner(&self.entries, &other.entries)
    }

    /// `Re Tr(ρ²)` for Hermitian `ρ`.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Frobenius norm of the anti-Hermitian part `M − M†`.
    pub fn hermiticity_deviation(&self) -> f64 {
        (&self.entries - self.entries.adjoint())
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self {
            entries: hermitize(&self.entries),
            factor_dims: self.factor_dims.clone(),
        }
    }

    pub fn distance(&self, other: &SquareOperator) -> f64 {
        (&self.entries - &other.entries)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &SquareOperator) -> f64 {
        (&self.entries - &other.entries)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn add(&self, other: &SquareOperator) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            entries: &self.entries + &other.entries,
            factor_dims: self.factor_dims.clone(),
        })
    }

    pub fn sub(&self, other: &SquareOperator) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            entries: &self.entries - &other.entries,
            factor_dims: self.factor_dims.clone(),
        })
    }

    pub fn matmul(&self, other: &SquareOperator) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            entries: &self.entries * &other.entries,
            factor_dims: self.factor_dims.clone(),
        })
    }

    fn check_same_shape(&self, other: &SquareOperator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(())
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        eigh(&hermitize(&self.entries))
            .eigenvalues
            .last()
            .copied()
            .unwrap_or(0.0)
    }
}

pub(crate) fn hermitize(m: &Mat) -> Mat {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub(crate) fn hs_inner(a: &Mat, b: &Mat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Row-major strides for a list of subsystem dimensions.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// `A ⊗ B` with concatenated factor dimensions.
pub fn tensor_product(a: &SquareOperator, b: &SquareOperator) -> SquareOperator {
    let mut factor_dims = a.factor_dims.clone();
    factor_dims.extend_from_slice(&b.factor_dims);
    SquareOperator {
        entries: a.entries.kronecker(&b.entries),
        factor_dims,
    }
}

/// Tensor product of a list of operators, left to right.
pub fn tensor_all(ops: &[SquareOperator]) -> Option<SquareOperator> {
    let (first, rest) = ops.split_first()?;
    Some(rest.iter().fold(first.clone(), |acc, op| tensor_product(&acc, op)))
}

fn validate_indices(indices: &[usize], count: usize) -> Result<Vec<usize>> {
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != indices.len() || sorted.iter().any(|&i| i >= count) {
        return Err(Error::InvalidSubsystem {
            indices: indices.to_vec(),
            count,
        });
    }
    Ok(sorted)
}

/// Traces out every factor not listed in `keep` (0-based factor indices).
///
/// The kept factors appear in their original order. Keeping nothing yields
/// the 1×1 operator holding the full trace.
pub fn partial_trace(m: &SquareOperator, keep: &[usize]) -> Result<SquareOperator> {
    let dims = &m.factor_dims;
    let keep = validate_indices(keep, dims.len())?;
    let st = strides(dims);

    let kept_dims: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let kept_st = strides(&kept_dims);
    let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let traced_st = strides(&traced_dims);
    let dim_kept: usize = kept_dims.iter().product();
    let dim_traced: usize = traced_dims.iter().product();

    // group full indices by their traced component
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(dim_kept); dim_traced];
    for x in 0..m.dim() {
        let mut k = 0;
        for (pos, &f) in keep.iter().enumerate() {
            k += ((x / st[f]) % dims[f]) * kept_st[pos];
        }
        let mut r = 0;
        for (pos, &f) in traced.iter().enumerate() {
            r += ((x / st[f]) % dims[f]) * traced_st[pos];
        }
        groups[r].push((x, k));
    }

    let mut out = Mat::zeros(dim_kept, dim_kept);
    for group in &groups {
        for &(y, ky) in group {
            for &(x, kx) in group {
                out[(kx, ky)] += m.entries[(x, y)];
            }
        }
    }
    let factor_dims = if kept_dims.is_empty() { vec![1] } else { kept_dims };
    SquareOperator::new(out, factor_dims)
}

/// Transposes the given factor (0-based) in the computational basis.
pub fn partial_transpose(m: &SquareOperator, subsystem: usize) -> Result<SquareOperator> {
    let dims = &m.factor_dims;
    if subsystem >= dims.len() {
        return Err(Error::InvalidSubsystem {
            indices: vec![subsystem],
            count: dims.len(),
        });
    }
    let stride = strides(dims)[subsystem];
    let d = dims[subsystem];
    let n = m.dim();
    let mut out = Mat::zeros(n, n);
    for y in 0..n {
        let dy = (y / stride) % d;
        for x in 0..n {
            let dx = (x / stride) % d;
            let x2 = x - dx * stride + dy * stride;
            let y2 = y - dy * stride + dx * stride;
            out[(x2, y2)] = m.entries[(x, y)];
        }
    }
    SquareOperator::new(out, dims.clone())
}

/// Reorders subsystems: factor `j` of the result is factor `perm[j]` of the input.
pub fn permute_subsystems(m: &SquareOperator, perm: &[usize]) -> Result<SquareOperator> {
    let dims = &m.factor_dims;
    let sorted = validate_indices(perm, dims.len())?;
    if sorted.len() != dims.len() {
        return Err(Error::InvalidSubsystem {
            indices: perm.to_vec(),
            count: dims.len(),
        });
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let old_st = strides(dims);
    let new_st = strides(&new_dims);
    let n = m.dim();
    let map: Vec<usize> = (0..n)
        .map(|x| {
            perm.iter()
                .enumerate()
                .map(|(j, &p)| ((x / old_st[p]) % dims[p]) * new_st[j])
                .sum()
        })
        .collect();
    let mut out = Mat::zeros(n, n);
    for y in 0..n {
        for x in 0..n {
            out[(map[x], map[y])] = m.entries[(x, y)];
        }
    }
    SquareOperator::new(out, new_dims)
}

/// The flip operator `Π |k⟩|ℓ⟩ = |ℓ⟩|k⟩` on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> SquareOperator {
    let n = d * d;
    let mut m = Mat::zeros(n, n);
    for k in 0..d {
        for l in 0..d {
            m[(l * d + k, k * d + l)] = ONE;
        }
    }
    SquareOperator {
        entries: m,
        factor_dims: vec![d, d],
    }
}

/// Permutation operator exchanging factors `i` and `j` of a space with the given dims.
pub fn factor_swap(dims: &[usize], i: usize, j: usize) -> Result<SquareOperator> {
    if i >= dims.len() || j >= dims.len() || dims[i] != dims[j] {
        return Err(Error::InvalidSubsystem {
            indices: vec![i, j],
            count: dims.len(),
        });
    }
    let st = strides(dims);
    let n: usize = dims.iter().product();
    let mut m = Mat::zeros(n, n);
    for x in 0..n {
        let di = (x / st[i]) % dims[i];
        let dj = (x / st[j]) % dims[j];
        let y = x - di * st[i] - dj * st[j] + dj * st[i] + di * st[j];
        m[(y, x)] = ONE;
    }
    SquareOperator::new(m, dims.to_vec())
}

/// Singular values, descending.
pub fn singular_values(m: &SquareOperator) -> Vec<f64> {
    let mut sv = to_faer(&m.entries).singular_values().expect("SVD of a finite matrix");
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Schatten p-norm `(Tr|M|^p)^{1/p}`; pass `f64::INFINITY` for the operator norm.
pub fn schatten_norm(m: &SquareOperator, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidSchattenIndex(p));
    }
    Ok(schatten_from_values(&singular_values(m), p))
}

/// Schatten norm of a list of singular values (or eigenvalue moduli).
pub fn schatten_from_values(values: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    }
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = values.iter().map(|v| (v.abs() / scale).powf(p)).sum();
    scale * s.powf(1.0 / p)
}

/// Eigendecomposition of a Hermitian operator, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: Mat,
}

impl HermitianSpectrum {
    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> Mat {
        self.map_eigenvalues(|x| x)
    }

    /// `V diag(f(λ)) V†`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> Mat {
        let n = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let w = C64::new(f(l), 0.0);
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        &scaled * self.eigenvectors.adjoint()
    }

    /// Groups eigenvalues whose consecutive gaps are below `tol`; returns (mean, multiplicity).
    pub fn clusters(&self, tol: f64) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize, f64)> = Vec::new();
        for &l in &self.eigenvalues {
            match out.last_mut() {
                Some((sum, count, last)) if (*last - l).abs() <= tol => {
                    *sum += l;
                    *count += 1;
                    *last = l;
                }
                _ => out.push((l, 1, l)),
            }
        }
        out.into_iter()
            .map(|(sum, count, _)| (sum / count as f64, count))
            .collect()
    }
}

/// Hermitian eigendecomposition. Inputs within the Hermiticity gate are
/// symmetrized to `(M + M†)/2` first.
pub fn hermitian_eig(m: &SquareOperator) -> Result<HermitianSpectrum> {
    let norm = m.frobenius_norm();
    let deviation = m.hermiticity_deviation();
    if deviation > HERMITIAN_TOL * norm.max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(eigh(&hermitize(&m.entries)))
}

fn to_faer(m: &Mat) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

/// Eigendecomposition of an already-Hermitian matrix, sorted descending.
pub(crate) fn eigh(h: &Mat) -> HermitianSpectrum {
    let n = h.nrows();
    let eig = to_faer(h)
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("self-adjoint eigendecomposition of a finite matrix");
    let (u, s) = (eig.U(), eig.S());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[b].re.total_cmp(&s[a].re));
    let eigenvalues = order.iter().map(|&i| s[i].re).collect();
    let eigenvectors = Mat::from_fn(n, n, |r, c| u[(r, order[c])]);
    HermitianSpectrum {
        eigenvalues,
        eigenvectors,
    }
}

/// Applies `X ↦ Σ_k (I⊗K_k⊗I) X (I⊗K_k⊗I)†` with the Kraus operators acting on
/// factor `factor` of `dims`. Kraus operators may be rectangular; the result's
/// factor dimension becomes their row count.
pub(crate) fn conjugate_on_factor(
    m: &Mat,
    dims: &[usize],
    factor: usize,
    kraus: &[Mat],
) -> (Mat, Vec<usize>) {
    let d_in = dims[factor];
    let d_out = kraus.first().map_or(d_in, |k| k.nrows());
    let pre: usize = dims[..factor].iter().product();
    let post: usize = dims[factor + 1..].iter().product();
    let n_in = pre * d_in * post;
    let n_out = pre * d_out * post;
    let mut out_dims = dims.to_vec();
    out_dims[factor] = d_out;

    let mut acc = Mat::zeros(n_out, n_out);
    let mut left = Mat::zeros(n_out, n_in);
    for k in kraus {
        left.fill(ZERO);
        // left = (I ⊗ K ⊗ I) m
        for c in 0..n_in {
            let src = m.column(c);
            let mut dst = left.column_mut(c);
            for a in 0..pre {
                for b in 0..post {
                    for i in 0..d_in {
                        let v = src[(a * d_in + i) * post + b];
                        if v == ZERO {
                            continue;
                        }
                        for o in 0..d_out {
                            dst[(a * d_out + o) * post + b] += k[(o, i)] * v;
                        }
                    }
                }
            }
        }
        // acc += left (I ⊗ K ⊗ I)†
        for a in 0..pre {
            for b in 0..post {
                for j in 0..d_in {
                    let src_col = (a * d_in + j) * post + b;
                    for o in 0..d_out {
                        let w = k[(o, j)].conj();
                        if w == ZERO {
                            continue;
                        }
                        let dst_col = (a * d_out + o) * post + b;
                        for r in 0..n_out {
                            let v = left[(r, src_col)];
                            acc[(r, dst_col)] += v * w;
                        }
                    }
                }
            }
        }
    }
    (acc, out_dims)
}

/// Serialized form: `{"dims": [...], "entries": [[re, im], ...]}`, row-major.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OperatorJson {
    pub dims: Vec<usize>,
    pub entries: Vec<[f64; 2]>,
}

pub(crate) fn matrix_to_pairs(m: &Mat) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            out.push([z.re, z.im]);
        }
    }
    out
}

pub(crate) fn pairs_to_matrix(rows: usize, cols: usize, pairs: &[[f64; 2]]) -> Result<Mat> {
    if pairs.len() != rows * cols {
        return Err(Error::DimensionMismatch {
            expected: rows * cols,
            actual: pairs.len(),
        });
    }
    Ok(Mat::from_fn(rows, cols, |r, c| {
        let [re, im] = pairs[r * cols + c];
        C64::new(re, im)
    }))
}

impl From<&SquareOperator> for OperatorJson {
    fn from(op: &SquareOperator) -> Self {
        Self {
            dims: op.factor_dims.clone(),
            entries: matrix_to_pairs(&op.entries),
        }
    }
}

impl TryFrom<OperatorJson> for SquareOperator {
    type Error = Error;

    fn try_from(json: OperatorJson) -> Result<Self> {
        let dim: usize = json.dims.iter().product();
        let m = pairs_to_matrix(dim, dim, &json.entries)?;
        SquareOperator::new(m, json.dims)
    }
}

impl Serialize for SquareOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SquareOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = OperatorJson::deserialize(d)?;
        SquareOperator::try_from(json).map_err(serde::de::Error::custom)
    }
}
