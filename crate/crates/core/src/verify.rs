//! Operator-identity suite for the projector family and permutation algebra.

use serde::{Deserialize, Serialize};

use crate::permkit::{permutation_unitary, DenseLimits, Permutation};
use crate::projectors::{antisym_dimension, expected_ranks, m_polynomials, pvm_family};
use crate::state::max_abs_diff;
use crate::{CMatrix, Result, C64};

/// Residual tolerance for every operator identity.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// Sample points for the `M(x) = Σ m_i(x) P_i` identity.
pub const M_SAMPLE_POINTS: [f64; 6] = [-1.25, -0.5, 0.0, 0.37, 1.0, 2.5];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityCheck {
    fn new(name: impl Into<String>, max_residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub dim: usize,
    pub checks: Vec<IdentityCheck>,
    pub ranks: Vec<usize>,
    pub expected_ranks: Vec<usize>,
    pub passed: bool,
}

/// Runs the identity suite on the `d`-copy family of a `d`-level system.
pub fn identity_suite(d: usize, limits: &DenseLimits) -> Result<IdentityReport> {
    let fam = pvm_family(d, limits)?;
    let dim = fam.antisym(0).dim();
    let id = CMatrix::identity(dim, dim);
    let tol = IDENTITY_TOLERANCE;
    let mut checks = Vec::new();

    let hermitian = |m: &CMatrix| max_abs_diff(m, &m.adjoint());
    let idempotent = |m: &CMatrix| max_abs_diff(&(m * m), m);

    let a = |k: usize| fam.antisym(k).matrix();
    checks.push(IdentityCheck::new(
        "A_k Hermitian",
        (0..=d).map(|k| hermitian(a(k))).fold(0.0, f64::max),
        tol,
    ));
    checks.push(IdentityCheck::new(
        "A_k idempotent",
        (0..=d).map(|k| idempotent(a(k))).fold(0.0, f64::max),
        tol,
    ));
    checks.push(IdentityCheck::new(
        "tr A_k = d^(d-k) C(d,k)",
        (1..=d)
            .map(|k| (fam.antisym(k).trace() - antisym_dimension(d, d, k) as f64).abs())
            .fold(0.0, f64::max),
        1e-9,
    ));
    let mut nest_left = 0.0f64;
    let mut nest_right = 0.0f64;
    for k in 1..=d {
        for l in (k + 1)..=d {
            nest_left = nest_left.max(max_abs_diff(&(a(k) * a(l)), a(l)));
            nest_right = nest_right.max(max_abs_diff(&(a(l) * a(k)), a(l)));
        }
    }
    checks.push(IdentityCheck::new("A_k A_l = A_l (k < l)", nest_left, tol));
    checks.push(IdentityCheck::new("A_l A_k = A_l (k < l)", nest_right, tol));

    let p = |i: usize| fam.projector(i).matrix();
    checks.push(IdentityCheck::new(
        "P_i Hermitian",
        (1..=d).map(|i| hermitian(p(i))).fold(0.0, f64::max),
        tol,
    ));
    checks.push(IdentityCheck::new(
        "P_i idempotent",
        (1..=d).map(|i| idempotent(p(i))).fold(0.0, f64::max),
        tol,
    ));
    let sum = (1..=d).fold(CMatrix::zeros(dim, dim), |acc, i| acc + p(i));
    checks.push(IdentityCheck::new("sum_i P_i = 1", max_abs_diff(&sum, &id), tol));
    let mut orth = 0.0f64;
    for i in 1..=d {
        for j in (i + 1)..=d {
            orth = orth.max((p(i) * p(j)).iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    checks.push(IdentityCheck::new("P_i P_j = 0 (i != j)", orth, tol));
    let mut partial = 0.0f64;
    for i in 1..=d {
        let s = (1..=(d - i + 1)).fold(CMatrix::zeros(dim, dim), |acc, j| acc + p(j));
        partial = partial.max(max_abs_diff(&s, a(i)));
    }
    checks.push(IdentityCheck::new("A_i = sum_{j<=d-i+1} P_j", partial, tol));

    let expected = expected_ranks(d, d);
    let rank_mismatch = fam
        .ranks()
        .iter()
        .zip(&expected)
        .map(|(r, e)| r.abs_diff(*e) as f64)
        .fold(0.0, f64::max);
    checks.push(IdentityCheck::new("rank P_i = D(d-i+1) - D(d-i+2)", rank_mismatch, 0.0));

    let m = m_polynomials(d);
    let mut m_resid = 0.0f64;
    for &x in &M_SAMPLE_POINTS {
        let lhs = fam.observable_m(x).into_matrix();
        let rhs = (1..=d).fold(CMatrix::zeros(dim, dim), |acc, i| {
            acc + p(i) * C64::new(m.eval(i, x), 0.0)
        });
        m_resid = m_resid.max(max_abs_diff(&lhs, &rhs));
    }
    checks.push(IdentityCheck::new("M(x) = sum_i m_i(x) P_i", m_resid, tol));

    // permutation algebra on three factors of the same local dimension
    let s3 = Permutation::all(3);
    let u: Vec<CMatrix> = s3
        .iter()
        .map(|s| permutation_unitary(s, d, limits).map(|t| t.into_matrix()))
        .collect::<Result<_>>()?;
    let mut hom = 0.0f64;
    for (i, si) in s3.iter().enumerate() {
        for (j, sj) in s3.iter().enumerate() {
            let k = s3.iter().position(|s| *s == si.compose(sj)).unwrap();
            hom = hom.max(max_abs_diff(&u[k], &(&u[j] * &u[i])));
        }
    }
    checks.push(IdentityCheck::new("U_(s.t) = U_t U_s on S_3", hom, tol));
    let s4 = Permutation::all(4);
    let sign_fail = s4
        .iter()
        .flat_map(|a| s4.iter().map(move |b| (a, b)))
        .filter(|(a, b)| a.sign() * b.sign() != a.compose(b).sign())
        .count();
    checks.push(IdentityCheck::new(
        "sgn(s) sgn(t) = sgn(s.t) on S_4",
        sign_fail as f64,
        0.0,
    ));

    let passed = checks.iter().all(|c| c.pass);
    Ok(IdentityReport {
        dim: d,
        checks,
        ranks: fam.ranks().to_vec(),
        expected_ranks: expected,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;

    #[test]
    fn qubit_suite_passes() {
        let r = identity_suite(2, &DenseLimits::default()).unwrap();
        assert!(r.passed, "{r:#?}");
        assert!(r.checks.iter().all(|c| c.max_residual < 1e-12));
    }

    #[test]
    fn qutrit_ranks() {
        let r = identity_suite(3, &DenseLimits::default()).unwrap();
        assert!(r.passed, "{r:#?}");
        assert_eq!(r.ranks, vec![1, 8, 18]);
    }

    #[test]
    fn large_dimension_refused() {
        assert!(matches!(
            identity_suite(6, &DenseLimits::default()),
            Err(Error::Resource { .. })
        ));
    }
}
