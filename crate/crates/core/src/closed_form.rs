//! Analytic evaluators: the seed-operator spectrum and norms, the υ₂ closed
//! forms, `m(d, t)`, the `(a, b)` criterion and the entanglement-of-purification
//! conversion.

use std::fmt;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::channel::{check_gamma_param, CpMap};
use crate::error::{Error, Result};
use crate::tensor::{Mat, C64};

/// Residual below which `N†∘N` counts as `a·id + b·Tr[·]I`.
pub const CRITERION_TOL: f64 = 1e-8;

/// Eigenvalues of `τ = (Γ_t ⊗ id)(Φ_d)` on the symmetric (`+`) and antisymmetric (`−`) subspaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauSpectrum {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub mult_plus: usize,
    pub mult_minus: usize,
}

impl TauSpectrum {
    /// `mult_plus·λ₊ + mult_minus·λ₋`, which is 1.
    pub fn trace(&self) -> f64 {
        self.mult_plus as f64 * self.lambda_plus + self.mult_minus as f64 * self.lambda_minus
    }
}

pub fn tau_spectrum(d: usize, t: f64) -> Result<TauSpectrum> {
    check_gamma_param(d, t)?;
    let df = d as f64;
    let d2 = df * df;
    Ok(TauSpectrum {
        lambda_plus: (1.0 + t * (df - 1.0)) / d2,
        lambda_minus: (1.0 - t * (df + 1.0)) / d2,
        mult_plus: d * (d + 1) / 2,
        mult_minus: d * (d - 1) / 2,
    })
}

/// Schatten p-norm of τ from its two-point spectrum; `p = f64::INFINITY` gives the largest eigenvalue.
pub fn tau_norm(d: usize, t: f64, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidSchattenIndex(p));
    }
    let s = tau_spectrum(d, t)?;
    // boundary points can leave a zero eigenvalue at -1e-17
    let (lp, lm) = (s.lambda_plus.max(0.0), s.lambda_minus.max(0.0));
    if p.is_infinite() {
        return Ok(lp.max(lm));
    }
    Ok((s.mult_plus as f64 * lp.powf(p) + s.mult_minus as f64 * lm.powf(p)).powf(1.0 / p))
}

/// Which feasible state attains the maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `I/d ⊗ |ψ⟩⟨ψ|` (constant-output map), value `a/d + b`.
    Marginal,
    /// `Φ_d` (identity map), value `a + b/d`.
    Entangled,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Marginal => "marginal",
            Branch::Entangled => "entangled",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub upsilon2: f64,
    pub branch: Branch,
    pub m_value: f64,
}

/// Picks the larger branch; ties within a few ulps go to the marginal branch.
fn select_branch(entangled: f64, marginal: f64) -> (f64, Branch) {
    if entangled > marginal * (1.0 + 4.0 * f64::EPSILON) {
        (entangled, Branch::Entangled)
    } else {
        (marginal, Branch::Marginal)
    }
}

/// `m(d, t) = max{1/d, t² + (1 − t²)/d²}`.
pub fn m_value(d: usize, t: f64) -> Result<f64> {
    Ok(upsilon2_gamma(d, t)?.m_value)
}

/// `υ₂(Γ_t) = √m(d, t)` together with the active branch.
pub fn upsilon2_gamma(d: usize, t: f64) -> Result<ClosedForm> {
    check_gamma_param(d, t)?;
    let df = d as f64;
    let t2 = t * t;
    let (m, branch) = select_branch(t2 + (1.0 - t2) / (df * df), 1.0 / df);
    Ok(ClosedForm {
        upsilon2: m.sqrt(),
        branch,
        m_value: m,
    })
}

/// `√max{a + b/d, a/d + b}`.
pub fn upsilon2_general(a: f64, b: f64, d: usize) -> Result<f64> {
    Ok(upsilon2_general_form(a, b, d)?.upsilon2)
}

/// [`upsilon2_general`] with the branch and squared value.
pub fn upsilon2_general_form(a: f64, b: f64, d: usize) -> Result<ClosedForm> {
    if !(a >= 0.0) {
        return Err(Error::OutOfRange { name: "a", value: a, lo: 0.0, hi: f64::INFINITY });
    }
    if !(b >= 0.0) {
        return Err(Error::OutOfRange { name: "b", value: b, lo: 0.0, hi: f64::INFINITY });
    }
    if d == 0 {
        return Err(Error::OutOfRange { name: "d", value: 0.0, lo: 1.0, hi: f64::INFINITY });
    }
    let df = d as f64;
    let (m, branch) = select_branch(a + b / df, a / df + b);
    Ok(ClosedForm {
        upsilon2: m.sqrt(),
        branch,
        m_value: m,
    })
}

/// Fitted constants of `N†∘N ≈ a·id + b·Tr[·]I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionConstants {
    pub a: f64,
    pub b: f64,
    /// Frobenius distance between the superoperator of `N†∘N` and the fit.
    pub residual: f64,
}

impl CriterionConstants {
    pub fn satisfied(&self) -> bool {
        self.residual <= CRITERION_TOL
    }
}

/// Least-squares fit of `N†∘N` onto `span{id, Tr[·]I}` in superoperator form.
///
/// The two basis superoperators `I_{d²}` and `|vec I⟩⟨vec I|` overlap, so the
/// fit solves the 2×2 Gram system `[[d², d], [d, d²]]` exactly.
pub fn extract_ab(n: &CpMap) -> CriterionConstants {
    let d = n.dim_in();
    let tn = n.transfer_matrix();
    let s: Mat = tn.adjoint() * &tn;
    let dd = d * d;
    let vec_i = DVector::<C64>::from_fn(dd, |k, _| if k / d == k % d { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });

    let rhs_id = s.trace().re;
    let rhs_tr = (vec_i.adjoint() * &s * &vec_i)[(0, 0)].re;
    let (g11, g12, g22) = ((dd) as f64, d as f64, (dd) as f64);
    let det = g11 * g22 - g12 * g12;
    let a = (g22 * rhs_id - g12 * rhs_tr) / det;
    let b = (g11 * rhs_tr - g12 * rhs_id) / det;

    let fit = Mat::identity(dd, dd) * C64::new(a, 0.0) + &vec_i * vec_i.adjoint() * C64::new(b, 0.0);
    CriterionConstants {
        a,
        b,
        residual: (s - fit).norm(),
    }
}

/// `(p/(1 − p))·log₂ ν`: entanglement of purification from an optimal norm value.
pub fn eop_from_norm(p: f64, nu: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::OutOfRange { name: "p", value: p, lo: 1.0, hi: f64::INFINITY });
    }
    if !(nu > 0.0) {
        return Err(Error::OutOfRange { name: "nu", value: nu, lo: 0.0, hi: f64::INFINITY });
    }
    if p.is_infinite() {
        return Ok(-nu.log2() + 0.0);
    }
    // adding 0.0 turns a -0.0 at ν = 1 into 0.0
    Ok(p / (1.0 - p) * nu.log2() + 0.0)
}

/// `max{‖τ‖_p, d^{1/p − 1}}`, a lower bound on `υ_p(Γ_t)` for every `p ≥ 1`.
pub fn lower_bound_general_p(d: usize, t: f64, p: f64) -> Result<f64> {
    let tau = tau_norm(d, t, p)?;
    let constant = (d as f64).powf(1.0 / p - 1.0);
    Ok(tau.max(constant))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{
        gamma_cp_range, make_delta_complement, make_depolarizing, make_gamma_complement, make_transpose_depolarizing,
        unitary_channel, werner_state,
    };
    use crate::rng::{random_cp_map, random_unitary, ExperimentRng};
    use crate::tensor::{hermitian_eig, schatten_norm};

    fn grid(d: usize, points: usize) -> Vec<f64> {
        let (lo, hi) = gamma_cp_range(d);
        (0..points).map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64).collect()
    }

    #[test]
    fn tau_spectrum_examples() {
        let s = tau_spectrum(2, 1.0 / 3.0).unwrap();
        assert!((s.lambda_plus - 1.0 / 3.0).abs() < 1e-15);
        assert!(s.lambda_minus.abs() < 1e-15);
        assert_eq!((s.mult_plus, s.mult_minus), (3, 1));
        for d in 2..=5 {
            let s = tau_spectrum(d, 0.0).unwrap();
            let inv = 1.0 / (d * d) as f64;
            assert!((s.lambda_plus - inv).abs() < 1e-16 && (s.lambda_minus - inv).abs() < 1e-16);
            for t in grid(d, 21) {
                let s = tau_spectrum(d, t).unwrap();
                assert!((s.trace() - 1.0).abs() < 1e-14);
                assert!(s.lambda_plus >= -1e-15 && s.lambda_minus >= -1e-15);
            }
        }
        assert!(tau_spectrum(2, 0.34).is_err());
    }

    #[test]
    fn tau_spectrum_matches_eigendecomposition() {
        for d in 2..=4 {
            for t in grid(d, 9) {
                let s = tau_spectrum(d, t).unwrap();
                let tau = werner_state(d, t).unwrap();
                let eig = hermitian_eig(&tau).unwrap();
                let mut expected: Vec<f64> = std::iter::repeat(s.lambda_plus)
                    .take(s.mult_plus)
                    .chain(std::iter::repeat(s.lambda_minus).take(s.mult_minus))
                    .collect();
                expected.sort_by(|a, b| b.total_cmp(a));
                for (x, y) in eig.eigenvalues.iter().zip(&expected) {
                    assert!((x - y).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn tau_norm_examples() {
        assert!((tau_norm(3, -0.2, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let n2 = tau_norm(2, 1.0 / 3.0, 2.0).unwrap();
        assert!((n2 - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((n2 - 0.5 * (1.0 + 3.0 / 9.0f64).sqrt()).abs() < 1e-15);
        assert!((tau_norm(2, -1.0, f64::INFINITY).unwrap() - 1.0).abs() < 1e-15);
        assert!(tau_norm(2, 0.0, 0.5).is_err());
        for d in 2..=4 {
            for t in grid(d, 7) {
                let tau = werner_state(d, t).unwrap();
                for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
                    let direct = schatten_norm(&tau, p).unwrap();
                    assert!((tau_norm(d, t, p).unwrap() - direct).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        for t in grid(3, 21) {
            let cf = upsilon2_gamma(3, t).unwrap();
            assert!((cf.upsilon2 - 3f64.powf(-0.5)).abs() < 1e-15);
            assert_eq!(cf.branch, Branch::Marginal);
        }
        let cf = upsilon2_gamma(2, 1.0 / 3.0).unwrap();
        assert!((cf.upsilon2 - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((upsilon2_gamma(2, 0.0).unwrap().upsilon2 - 0.5f64.sqrt()).abs() < 1e-15);
        let cf = upsilon2_gamma(2, -1.0).unwrap();
        assert_eq!(cf.branch, Branch::Entangled);
        assert!((cf.upsilon2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn m_value_examples_and_tie() {
        assert!((m_value(2, 1.0 / 3.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((m_value(4, 0.2).unwrap() - 0.25).abs() < 1e-15);
        for d in [2usize, 3] {
            let t_tie = -(1.0 / (d as f64 + 1.0)).sqrt();
            let cf = upsilon2_gamma(d, t_tie).unwrap();
            assert!((cf.m_value - 1.0 / d as f64).abs() < 1e-15);
            assert_eq!(cf.branch, Branch::Marginal);
            let h = 1e-9;
            let left = m_value(d, t_tie - h).unwrap_or(1.0 / d as f64);
            let right = m_value(d, t_tie + h).unwrap();
            assert!((left - right).abs() < 1e-8);
        }
        for d in 2..=4 {
            for t in grid(d, 21) {
                let cf = upsilon2_gamma(d, t).unwrap();
                assert!((cf.upsilon2 * cf.upsilon2 - cf.m_value).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn general_criterion_values() {
        assert!((upsilon2_general(1.0, 0.0, 5).unwrap() - 1.0).abs() < 1e-15);
        assert!(upsilon2_general(-0.1, 0.0, 2).is_err());
        assert!(upsilon2_general(0.0, -0.1, 2).is_err());
        for d in 2..=4 {
            let df = d as f64;
            for t in grid(d, 21) {
                let (a, b) = (t * t, (1.0 - t * t) / df);
                assert!((a / df + b - 1.0 / df).abs() < 1e-15);
                let g = upsilon2_general(a, b, d).unwrap();
                assert!((g - upsilon2_gamma(d, t).unwrap().upsilon2).abs() < 1e-14);
                assert!((upsilon2_general(b, a, d).unwrap() - g).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn extract_ab_recovers_zoo_constants() {
        for d in 2..=4 {
            let df = d as f64;
            for t in grid(d, 5) {
                let c = extract_ab(&make_transpose_depolarizing(d, t).unwrap());
                assert!((c.a - t * t).abs() < 1e-12 && (c.b - (1.0 - t * t) / df).abs() < 1e-12);
                assert!(c.residual <= 1e-12);
                let cc = extract_ab(&make_gamma_complement(d, t).unwrap());
                assert!((cc.a - (1.0 - t * t) / df).abs() < 1e-12 && (cc.b - t * t).abs() < 1e-12);
                assert!(cc.residual <= 1e-10);
            }
            for p in [0.0, 0.5, 1.0, df * df / (df * df - 1.0)] {
                let c = extract_ab(&make_depolarizing(d, p).unwrap());
                assert!((c.a - (1.0 - p) * (1.0 - p)).abs() < 1e-12);
                assert!((c.b - p * (2.0 - p) / df).abs() < 1e-12);
                assert!(c.satisfied());
                let cc = extract_ab(&make_delta_complement(d, p).unwrap());
                assert!((cc.a - p * (2.0 - p) / df).abs() < 1e-12);
                assert!((cc.b - (1.0 - p) * (1.0 - p)).abs() < 1e-12);
                assert!(cc.residual <= 1e-10);
            }
        }
        let c = extract_ab(&make_delta_complement(2, 0.5).unwrap());
        assert!((c.a - 3.0 / 8.0).abs() < 1e-12 && (c.b - 0.25).abs() < 1e-12);
    }

    #[test]
    fn extract_ab_discriminates() {
        let mut rng = ExperimentRng::new(31, 0);
        let u = random_unitary(&mut rng, 3);
        let c = extract_ab(&unitary_channel(u).unwrap());
        assert!((c.a - 1.0).abs() < 1e-12 && c.b.abs() < 1e-12 && c.satisfied());
        for _ in 0..5 {
            let n = random_cp_map(&mut rng, 3, 3, 2, true);
            assert!(extract_ab(&n).residual > 1e-4);
        }
    }

    #[test]
    fn eop_conversion() {
        assert!((eop_from_norm(2.0, 0.5f64.sqrt()).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(eop_from_norm(2.0, 1.0).unwrap(), 0.0);
        for d in 2..=6 {
            let v = eop_from_norm(2.0, (d as f64).powf(-0.5)).unwrap();
            assert!((v - (d as f64).log2()).abs() < 1e-14);
        }
        assert!(eop_from_norm(2.0, 0.0).is_err());
        assert!(eop_from_norm(1.0, 0.5).is_err());
    }

    #[test]
    fn general_p_lower_bound() {
        assert!((lower_bound_general_p(2, 1.0 / 3.0, 2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((lower_bound_general_p(3, 0.1, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let lb = lower_bound_general_p(2, -1.0, f64::INFINITY).unwrap();
        assert!((lb - 1.0).abs() < 1e-15);
    }
}
