//! Poincare pairing on the classical ring and the dual basis.
//!
//! The pairing is `<a, b> = integral of NF(a b)`, where the integral reads
//! off the coefficient of the top class `xi^(r-1) h^n`. On the monomial
//! basis it is a symmetric unimodular integer matrix, so the dual basis is
//! again integral; [`dual_basis`] solves for it over the rationals and then
//! asserts integrality.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::bundle::BundleSpec;
use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::{Monomial, Polynomial};
use crate::rewrite::{build_presentation, RingKind, RingPresentation};

/// The top class `xi^(r-1) h^n`.
pub fn top_class(spec: &BundleSpec) -> Monomial {
    Monomial::classical(spec.r() - 1, spec.n())
}

/// Coefficient of `xi^(r-1) h^n` in a classical normal form.
pub fn integrate(spec: &BundleSpec, p: &Polynomial) -> Result<BigInt> {
    for (m, _) in p.terms() {
        if !m.is_classical() {
            return Err(Error::NotNormalForm(format!("term {m} involves q1 or q2")));
        }
        if m.xi >= spec.r() || m.h > spec.n() {
            return Err(Error::NotNormalForm(format!(
                "term {m} exceeds xi^{} h^{}",
                spec.r() - 1,
                spec.n()
            )));
        }
    }
    Ok(p.coeff(&top_class(spec)))
}

/// `<a, b>` for arbitrary classical polynomials.
pub fn pair(ring: &RingPresentation, a: &Polynomial, b: &Polynomial) -> Result<BigInt> {
    integrate(ring.spec(), &ring.multiply(a, b)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingData {
    pub spec: BundleSpec,
    pub basis: Vec<Monomial>,
    #[serde(serialize_with = "serialize_matrix")]
    pub matrix: Vec<Vec<BigInt>>,
    /// `duals[i]` pairs to 1 with `basis[i]` and to 0 with every other
    /// basis element.
    pub duals: Vec<Polynomial>,
}

fn serialize_matrix<S: serde::Serializer>(m: &[Vec<BigInt>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().flatten().map(BigInt::to_string))
}

impl PairingData {
    pub fn compute(spec: &BundleSpec) -> Result<Self> {
        let ring = classical_ring(spec);
        let matrix = matrix_for(&ring)?;
        let duals = duals_for(ring.basis(), &matrix)?;
        Ok(PairingData {
            spec: spec.clone(),
            basis: ring.basis().to_vec(),
            matrix,
            duals,
        })
    }

    pub fn determinant(&self) -> BigInt {
        linalg::determinant(&self.matrix)
    }

    pub fn dual_of(&self, m: &Monomial) -> Option<&Polynomial> {
        self.basis.iter().position(|b| b == m).map(|i| &self.duals[i])
    }
}

fn classical_ring(spec: &BundleSpec) -> RingPresentation {
    build_presentation(spec, RingKind::Classical).expect("classical presentation always exists")
}

fn matrix_for(ring: &RingPresentation) -> Result<Vec<Vec<BigInt>>> {
    let basis = ring.basis();
    let mut matrix = vec![vec![BigInt::from(0); basis.len()]; basis.len()];
    for (i, bi) in basis.iter().enumerate() {
        for (j, bj) in basis.iter().enumerate().skip(i) {
            let v = integrate(ring.spec(), &ring.normal_form(&Polynomial::monomial(*bi * *bj))?)?;
            matrix[i][j] = v.clone();
            matrix[j][i] = v;
        }
    }
    Ok(matrix)
}

/// Entry `(i, j)` is `<b_i, b_j>` over [`crate::enumerate_basis`].
pub fn pairing_matrix(spec: &BundleSpec) -> Vec<Vec<BigInt>> {
    matrix_for(&classical_ring(spec)).expect("basis products reduce in the classical ring")
}

/// Dual basis with respect to the pairing matrix.
pub fn dual_basis(spec: &BundleSpec, matrix: &[Vec<BigInt>]) -> Result<Vec<Polynomial>> {
    duals_for(&crate::rewrite::enumerate_basis(spec), matrix)
}

fn duals_for(basis: &[Monomial], matrix: &[Vec<BigInt>]) -> Result<Vec<Polynomial>> {
    // <b_i, sum_k X[k][j] b_k> = (M X)[i][j] = delta_ij, so X = M^-1.
    let inv = linalg::inverse(matrix).ok_or(Error::SingularPairing)?;
    (0..basis.len())
        .map(|j| {
            let mut dual = Polynomial::zero();
            for (k, b) in basis.iter().enumerate() {
                let x = &inv[k][j];
                if !x.denom().is_one() {
                    return Err(Error::NonIntegralDual {
                        index: j,
                        value: x.to_string(),
                    });
                }
                dual.add_term(*b, x.numer().clone());
            }
            Ok(dual)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn spec(n: u32, m: &[u32]) -> BundleSpec {
        BundleSpec::new(n, m).unwrap()
    }

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn integrate_reads_top_coefficient() {
        let s = spec(1, &[1, 2]);
        assert_eq!(integrate(&s, &Polynomial::monomial(top_class(&s))).unwrap(), 1.into());
        let ring = classical_ring(&s);
        let xi2 = ring
            .normal_form(&Polynomial::monomial(Monomial::classical(2, 0)))
            .unwrap();
        assert_eq!(integrate(&s, &xi2).unwrap(), 3.into());
        assert_eq!(integrate(&s, &Polynomial::one()).unwrap(), 0.into());
        assert!(matches!(
            integrate(&s, &Polynomial::monomial(Monomial::classical(2, 0))),
            Err(Error::NotNormalForm(_))
        ));
        assert!(matches!(integrate(&s, &Polynomial::q1()), Err(Error::NotNormalForm(_))));
    }

    #[test]
    fn golden_matrix_and_duals() {
        let s = spec(1, &[1, 2]);
        let data = PairingData::compute(&s).unwrap();
        // basis [1, h, xi, xi*h]
        assert_eq!(
            data.matrix,
            mat(&[&[0, 0, 0, 1], &[0, 0, 1, 0], &[0, 1, 3, 0], &[1, 0, 0, 0]])
        );
        assert_eq!(data.determinant().abs(), 1.into());
        let duals: Vec<String> = data.duals.iter().map(ToString::to_string).collect();
        assert_eq!(duals, ["xi*h", "xi - 3*h", "h", "1"]);
    }

    #[test]
    fn identity_and_top_class_are_dual() {
        for s in [spec(2, &[1, 1, 1]), spec(3, &[1, 2]), spec(2, &[1, 2, 2])] {
            let data = PairingData::compute(&s).unwrap();
            assert_eq!(data.dual_of(&Monomial::ONE), Some(&Polynomial::monomial(top_class(&s))));
            assert_eq!(data.dual_of(&top_class(&s)), Some(&Polynomial::one()));
        }
    }

    #[test]
    fn singular_and_non_integral_matrices_are_rejected() {
        let s = spec(1, &[1, 1]);
        let singular = vec![vec![BigInt::from(0); 4]; 4];
        assert_eq!(dual_basis(&s, &singular), Err(Error::SingularPairing));
        let scaled = mat(&[&[0, 0, 0, 2], &[0, 0, 1, 0], &[0, 1, 0, 0], &[2, 0, 0, 0]]);
        assert!(matches!(dual_basis(&s, &scaled), Err(Error::NonIntegralDual { .. })));
    }
}
