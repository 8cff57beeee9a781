//! Concrete channels: transpose-depolarizing, depolarizing, their complements,
//! the Werner-state maps and the state/map correspondences.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CpMap;
use crate::error::{Error, Result};
use crate::tensor::{hermitian_eig, swap_operator, Mat, SquareOperator, C64};

/// Relative slack on CP-range endpoints so that computed boundaries such as `-1/(d-1)` are accepted.
const RANGE_SLACK: f64 = 1e-12;

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::OutOfRange { name: "d", value: d as f64, lo: 2.0, hi: f64::INFINITY });
    }
    Ok(())
}

fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    let slack = RANGE_SLACK * lo.abs().max(hi.abs()).max(1.0);
    if !(value >= lo - slack && value <= hi + slack) {
        return Err(Error::OutOfRange { name, value, lo, hi });
    }
    Ok(())
}

/// CP-range `[-1/(d-1), 1/(d+1)]` of the transpose-depolarizing family.
pub fn gamma_cp_range(d: usize) -> (f64, f64) {
    let d = d as f64;
    (-1.0 / (d - 1.0), 1.0 / (d + 1.0))
}

/// Allowed range `[0, d²/(d²-1)]` of the depolarizing parameter.
pub fn delta_range(d: usize) -> (f64, f64) {
    let d2 = (d * d) as f64;
    (0.0, d2 / (d2 - 1.0))
}

pub fn check_gamma_param(d: usize, t: f64) -> Result<()> {
    check_dim(d)?;
    let (lo, hi) = gamma_cp_range(d);
    check_range("t", t, lo, hi)
}

pub fn check_delta_param(d: usize, p: f64) -> Result<()> {
    check_dim(d)?;
    let (lo, hi) = delta_range(d);
    check_range("p", p, lo, hi)
}

/// `Γ_t(X) = t X^T + (1 − t) Tr(X) I/d`.
pub fn make_transpose_depolarizing(d: usize, t: f64) -> Result<CpMap> {
    check_gamma_param(d, t)?;
    CpMap::from_linear_map(d, d, |x| {
        let mut out = x.transpose() * C64::new(t, 0.0);
        let tr = x.trace() * ((1.0 - t) / d as f64);
        for i in 0..d {
            out[(i, i)] += tr;
        }
        out
    })
}

/// `Δ_p(X) = (1 − p) X + p Tr(X) I/d`.
pub fn make_depolarizing(d: usize, p: f64) -> Result<CpMap> {
    check_delta_param(d, p)?;
    CpMap::from_linear_map(d, d, |x| {
        let mut out = x * C64::new(1.0 - p, 0.0);
        let tr = x.trace() * (p / d as f64);
        for i in 0..d {
            out[(i, i)] += tr;
        }
        out
    })
}

/// `D(X) = Tr(X) I/d`.
pub fn completely_depolarizing(d: usize) -> CpMap {
    let s = C64::new((1.0 / d as f64).sqrt(), 0.0);
    let kraus = (0..d)
        .flat_map(|i| {
            (0..d).map(move |j| {
                let mut k = Mat::zeros(d, d);
                k[(i, j)] = s;
                k
            })
        })
        .collect();
    CpMap::new(kraus).expect("nonempty")
}

pub fn identity_channel(d: usize) -> CpMap {
    CpMap::new(vec![Mat::identity(d, d)]).expect("nonempty")
}

/// `X ↦ U X U†`.
pub fn unitary_channel(u: Mat) -> Result<CpMap> {
    CpMap::new(vec![u])
}

/// `Λ_ψ(X) = Tr(X) |ψ⟩⟨ψ|`.
pub fn constant_output(d_in: usize, psi: &[C64]) -> CpMap {
    let kraus = (0..d_in)
        .map(|i| {
            let mut k = Mat::zeros(psi.len(), d_in);
            for (a, &v) in psi.iter().enumerate() {
                k[(a, i)] = v;
            }
            k
        })
        .collect();
    CpMap::new(kraus).expect("nonempty")
}

/// The coefficients `(a⁺, a⁻)` of the minimal dilation of `Γ_t`.
pub fn gamma_complement_coefficients(d: usize, t: f64) -> Result<(f64, f64)> {
    check_gamma_param(d, t)?;
    let df = d as f64;
    let plus = ((1.0 + (df - 1.0) * t) / (4.0 * df)).max(0.0).sqrt();
    let minus = ((1.0 - (df + 1.0) * t) / (4.0 * df)).max(0.0).sqrt();
    Ok((plus, minus))
}

/// `S_t = (a⁺ + a⁻) I + (a⁺ − a⁻) Π` on `C^d ⊗ C^d`.
pub fn gamma_dilation_operator(d: usize, t: f64) -> Result<Mat> {
    let (plus, minus) = gamma_complement_coefficients(d, t)?;
    let pi = swap_operator(d).into_entries();
    Ok(Mat::identity(d * d, d * d) * C64::new(plus + minus, 0.0) + pi * C64::new(plus - minus, 0.0))
}

/// Embedding `|i⟩ ↦ |i⟩ ⊗ |j⟩`, i.e. `I ⊗ |j⟩` as a `d² × d` matrix.
fn right_ket(d: usize, j: usize) -> Mat {
    let mut m = Mat::zeros(d * d, d);
    for i in 0..d {
        m[(i * d + j, i)] = C64::new(1.0, 0.0);
    }
    m
}

/// `Γ_t^c(X) = S_t (X ⊗ I) S_t†` with Kraus operators `S_t (I ⊗ |j⟩)`.
pub fn make_gamma_complement(d: usize, t: f64) -> Result<CpMap> {
    let s = gamma_dilation_operator(d, t)?;
    CpMap::new((0..d).map(|j| &s * right_ket(d, j)).collect())
}

/// `(Γ_t^c)†(Y) = Tr₂(S_t Y S_t)` with Kraus operators `(I ⊗ ⟨j|) S_t`.
pub fn werner_complement_map(d: usize, t: f64) -> Result<CpMap> {
    let s = gamma_dilation_operator(d, t)?;
    CpMap::new((0..d).map(|j| right_ket(d, j).adjoint() * &s).collect())
}

/// `P_p = √(p/d) I + √d (−√p/d + √(1 − p(d²−1)/d²)) |Φ_d⟩⟨Φ_d|`.
pub fn delta_dilation_operator(d: usize, p: f64) -> Result<Mat> {
    check_delta_param(d, p)?;
    let df = d as f64;
    let gamma = (1.0 - p * (df * df - 1.0) / (df * df)).max(0.0).sqrt();
    let p = p.max(0.0);
    let coeff = df.sqrt() * (-p.sqrt() / df + gamma);
    let phi = SquareOperator::maximally_entangled(d).into_entries();
    Ok(Mat::identity(d * d, d * d) * C64::new((p / df).sqrt(), 0.0) + phi * C64::new(coeff, 0.0))
}

/// `Δ_p^c(X) = P_p (X ⊗ I) P_p†`.
pub fn make_delta_complement(d: usize, p: f64) -> Result<CpMap> {
    let pp = delta_dilation_operator(d, p)?;
    CpMap::new((0..d).map(|j| &pp * right_ket(d, j)).collect())
}

/// Werner state `W(t) = ((1 − t)/d²) I + (t/d) Π`.
pub fn werner_state(d: usize, t: f64) -> Result<SquareOperator> {
    check_gamma_param(d, t)?;
    let df = d as f64;
    SquareOperator::identity(&[d, d])
        .scaled((1.0 - t) / (df * df))
        .add(&swap_operator(d).scaled(t / df))
}

/// CP map `Ω: L(C^{d_B}) → L(C^{d_A})` with `(Ω ⊗ id)(Φ_{d_B}) = ρ` for a
/// bipartite state `ρ` on `A ⊗ B`.
pub fn state_to_cp_map(rho: &SquareOperator) -> Result<CpMap> {
    let dims = rho.factor_dims();
    if dims.len() != 2 {
        return Err(Error::InvalidArgument("state_to_cp_map needs a bipartite operator".into()));
    }
    let (d_a, d_b) = (dims[0], dims[1]);
    let trace = rho.trace().re;
    if (trace - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { trace });
    }
    let spec = hermitian_eig(rho)?;
    let min = spec.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -1e-10 {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    let scale = (d_b as f64).sqrt();
    let mut kraus = Vec::new();
    for (j, &lambda) in spec.eigenvalues.iter().enumerate() {
        if lambda <= super::KRAUS_CUTOFF {
            continue;
        }
        let v = spec.eigenvectors.column(j);
        let w = lambda.sqrt() * scale;
        kraus.push(Mat::from_fn(d_a, d_b, |a, i| v[a * d_b + i] * w));
    }
    CpMap::new(kraus)
}

/// The channel families with named constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Gamma,
    Delta,
    GammaC,
    DeltaC,
    GammaCAdjoint,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 5] = [
        ChannelKind::Gamma,
        ChannelKind::Delta,
        ChannelKind::GammaC,
        ChannelKind::DeltaC,
        ChannelKind::GammaCAdjoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Gamma => "gamma",
            ChannelKind::Delta => "delta",
            ChannelKind::GammaC => "gamma_c",
            ChannelKind::DeltaC => "delta_c",
            ChannelKind::GammaCAdjoint => "gamma_c_adjoint",
        }
    }

    /// Whether the parameter is `t` (transpose-depolarizing family) rather than `p`.
    pub fn uses_t(self) -> bool {
        !matches!(self, ChannelKind::Delta | ChannelKind::DeltaC)
    }

    pub fn param_range(self, d: usize) -> (f64, f64) {
        if self.uses_t() {
            gamma_cp_range(d)
        } else {
            delta_range(d)
        }
    }

    pub fn check_param(self, d: usize, param: f64) -> Result<()> {
        if self.uses_t() {
            check_gamma_param(d, param)
        } else {
            check_delta_param(d, param)
        }
    }

    pub fn build(self, d: usize, param: f64) -> Result<CpMap> {
        match self {
            ChannelKind::Gamma => make_transpose_depolarizing(d, param),
            ChannelKind::Delta => make_depolarizing(d, param),
            ChannelKind::GammaC => make_gamma_complement(d, param),
            ChannelKind::DeltaC => make_delta_complement(d, param),
            ChannelKind::GammaCAdjoint => werner_complement_map(d, param),
        }
    }

    /// Input dimension of the built map.
    pub fn input_dim(self, d: usize) -> usize {
        match self {
            ChannelKind::GammaCAdjoint => d * d,
            _ => d,
        }
    }

    /// Known constants `(a, b)` with `N†∘N = a·id + b·Tr[·] I`, when the family satisfies the criterion.
    pub fn analytic_ab(self, d: usize, param: f64) -> Option<(f64, f64)> {
        let df = d as f64;
        let (t, p) = (param, param);
        match self {
            ChannelKind::Gamma => Some((t * t, (1.0 - t * t) / df)),
            ChannelKind::Delta => Some(((1.0 - p) * (1.0 - p), p * (2.0 - p) / df)),
            ChannelKind::GammaC => Some(((1.0 - t * t) / df, t * t)),
            ChannelKind::DeltaC => Some((p * (2.0 - p) / df, (1.0 - p) * (1.0 - p))),
            ChannelKind::GammaCAdjoint => None,
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChannelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown channel '{s}'")))
    }
}
