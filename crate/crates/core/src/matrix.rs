//! Fixed-shape 3×3 complex matrices and the ambient 𝔰𝔲(3) operations.
//!
//! Brackets are always evaluated by plain matrix multiplication. The
//! structure-constant table in [`crate::space`] is read off from these
//! products, never the other way around.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::GeometryError;

/// Membership tolerance for skew-Hermitian and trace residuals.
pub const TAU_ALG: f64 = 1e-12;
/// Residual tolerance for expansions in a spanning basis.
pub const TAU_PROJ: f64 = 1e-10;
/// Gram matrices with a larger condition estimate are rejected.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

/// Row-major 3×3 complex matrix, `m[row][col]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexMatrix3 {
    pub m: [[Complex64; 3]; 3],
}

impl ComplexMatrix3 {
    pub const ZERO: Self = Self {
        m: [[Complex64::new(0.0, 0.0); 3]; 3],
    };

    pub fn from_entries(m: [[Complex64; 3]; 3]) -> Self {
        Self { m }
    }

    /// Matrix unit E_ij: a single 1 in row `i`, column `j`.
    pub fn unit(i: usize, j: usize) -> Self {
        let mut out = Self::ZERO;
        out.m[i][j] = Complex64::new(1.0, 0.0);
        out
    }

    /// `i·diag(a, b, c)`.
    pub fn imaginary_diagonal(d: [f64; 3]) -> Self {
        let mut out = Self::ZERO;
        for (idx, v) in d.iter().enumerate() {
            out.m[idx][idx] = Complex64::new(0.0, *v);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        out.m.iter_mut().flatten().for_each(|z| *z *= s);
        out
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = self.m[j][i].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.m
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Add for ComplexMatrix3 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] += rhs.m[i][j];
            }
        }
        out
    }
}

impl Sub for ComplexMatrix3 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] -= rhs.m[i][j];
            }
        }
        out
    }
}

impl Neg for ComplexMatrix3 {
    type Output = Self;
    fn neg(self) -> Self {
        let mut out = self;
        out.m.iter_mut().flatten().for_each(|z| *z = -*z);
        out
    }
}

impl Mul for ComplexMatrix3 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..3 {
                    s += self.m[i][k] * rhs.m[k][j];
                }
                out.m[i][j] = s;
            }
        }
        out
    }
}

/// Result of [`check_membership`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership {
    pub is_member: bool,
    /// Frobenius norm of `m + m*`.
    pub skew_residual: f64,
    /// `|Tr m|`.
    pub trace_residual: f64,
}

/// Tests whether `m` lies in 𝔰𝔲(3) up to [`TAU_ALG`].
pub fn check_membership(m: &ComplexMatrix3) -> Membership {
    let skew_residual = (*m + m.adjoint()).norm();
    let trace_residual = m.trace().norm();
    let is_member = m.is_finite() && skew_residual <= TAU_ALG && trace_residual <= TAU_ALG;
    Membership {
        is_member,
        skew_residual,
        trace_residual,
    }
}

/// An element of 𝔰𝔲(3): skew-Hermitian and traceless.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su3Element {
    mat: ComplexMatrix3,
}

impl Su3Element {
    pub fn new(mat: ComplexMatrix3) -> Result<Self, GeometryError> {
        let check = check_membership(&mat);
        if check.is_member {
            Ok(Self { mat })
        } else {
            Err(GeometryError::InvalidElement {
                skew_residual: check.skew_residual,
                trace_residual: check.trace_residual,
            })
        }
    }

    pub fn zero() -> Self {
        Self {
            mat: ComplexMatrix3::ZERO,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix3 {
        &self.mat
    }

    // Real-linear combinations of members stay in 𝔰𝔲(3); no recheck.
    pub fn scale(&self, s: f64) -> Self {
        Self {
            mat: self.mat.scale_real(s),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            mat: self.mat + other.mat,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            mat: self.mat - other.mat,
        }
    }

    /// `Σ cᵢ·bᵢ`.
    pub fn combination(coeffs: &[f64], basis: &[Su3Element]) -> Self {
        coeffs
            .iter()
            .zip(basis)
            .fold(Self::zero(), |acc, (c, b)| acc.add(&b.scale(*c)))
    }
}

/// Lie bracket `ab − ba`.
pub fn commutator(a: &Su3Element, b: &Su3Element) -> Su3Element {
    Su3Element {
        mat: a.mat * b.mat - b.mat * a.mat,
    }
}

/// Checked bracket on raw matrices; rejects inputs outside 𝔰𝔲(3).
pub fn commutator_checked(
    a: &ComplexMatrix3,
    b: &ComplexMatrix3,
) -> Result<Su3Element, GeometryError> {
    Ok(commutator(&Su3Element::new(*a)?, &Su3Element::new(*b)?))
}

/// The Ad-invariant form `⟨a, b⟩₀ = −Re Tr(ab)`.
pub fn inner0(a: &Su3Element, b: &Su3Element) -> f64 {
    -(a.mat * b.mat).trace().re
}

pub fn norm0(a: &Su3Element) -> f64 {
    inner0(a, a).max(0.0).sqrt()
}

/// Gram matrix of `basis` under `⟨,⟩₀`.
pub fn gram0(basis: &[Su3Element]) -> DMatrix<f64> {
    DMatrix::from_fn(basis.len(), basis.len(), |i, j| {
        inner0(&basis[i], &basis[j])
    })
}

/// Coefficients of an expansion together with its residual.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub coeffs: Vec<f64>,
    /// `⟨,⟩₀`-norm of `x − Σ cᵢ·bᵢ`.
    pub residual: f64,
    /// Ratio of extreme singular values of the Gram matrix.
    pub condition: f64,
}

/// Expands `x` in `basis` by solving `gram · c = (⟨x, bᵢ⟩₀)ᵢ`.
///
/// `gram` must be the `⟨,⟩₀` Gram matrix of `basis`. When `x` lies outside
/// the span the coefficients are those of the orthogonal projection and the
/// residual measures the distance to the span.
pub fn project_onto_basis(
    x: &Su3Element,
    basis: &[Su3Element],
    gram: &DMatrix<f64>,
) -> Result<Projection, GeometryError> {
    let n = basis.len();
    assert_eq!(gram.nrows(), n, "gram/basis size mismatch");
    assert_eq!(gram.ncols(), n, "gram/basis size mismatch");

    let singular = gram.singular_values();
    let smax = singular.max();
    let smin = singular.min();
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(condition <= MAX_GRAM_CONDITION) {
        return Err(GeometryError::SingularGram { condition });
    }

    let rhs = DVector::from_iterator(n, basis.iter().map(|b| inner0(x, b)));
    let coeffs = gram
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or(GeometryError::SingularGram { condition })?;
    let coeffs: Vec<f64> = coeffs.iter().copied().collect();

    let rest = x.sub(&Su3Element::combination(&coeffs, basis));
    Ok(Projection {
        residual: norm0(&rest),
        coeffs,
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn x1() -> Su3Element {
        let m = (ComplexMatrix3::unit(0, 1) - ComplexMatrix3::unit(1, 0))
            .scale_real(std::f64::consts::FRAC_1_SQRT_2);
        Su3Element::new(m).unwrap()
    }

    fn x2() -> Su3Element {
        let m = (ComplexMatrix3::unit(0, 1) + ComplexMatrix3::unit(1, 0))
            .scale(c(0.0, std::f64::consts::FRAC_1_SQRT_2));
        Su3Element::new(m).unwrap()
    }

    #[test]
    fn bracket_with_self_vanishes() {
        let x = x1().add(&x2().scale(0.3));
        assert_eq!(commutator(&x, &x).matrix().norm(), 0.0);
    }

    #[test]
    fn inner0_examples() {
        assert!((inner0(&x1(), &x1()) - 1.0).abs() < 1e-15);
        assert!(inner0(&x1(), &x2()).abs() < 1e-15);
    }

    #[test]
    fn membership_examples() {
        let zero = check_membership(&ComplexMatrix3::ZERO);
        assert!(zero.is_member);
        assert_eq!((zero.skew_residual, zero.trace_residual), (0.0, 0.0));

        assert!(check_membership(&ComplexMatrix3::imaginary_diagonal([1.0, 1.0, -2.0])).is_member);

        let mut real_diag = ComplexMatrix3::ZERO;
        real_diag.m[0][0] = c(1.0, 0.0);
        real_diag.m[2][2] = c(-1.0, 0.0);
        let check = check_membership(&real_diag);
        assert!(!check.is_member);
        // m + m* = diag(2, 0, −2)
        assert!((check.skew_residual - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(check.trace_residual, 0.0);
    }

    #[test]
    fn checked_bracket_rejects_non_members() {
        let mut bad = ComplexMatrix3::ZERO;
        bad.m[0][0] = c(1.0, 0.0);
        let err = commutator_checked(&bad, x1().matrix()).unwrap_err();
        assert!(matches!(err, GeometryError::InvalidElement { .. }));
        assert!(Su3Element::new(ComplexMatrix3::imaginary_diagonal([1.0, 1.0, 1.0])).is_err());
    }

    #[test]
    fn projection_outside_span_reports_distance() {
        let x = x1();
        let basis = vec![x2()];
        let p = project_onto_basis(&x, &basis, &gram0(&basis)).unwrap();
        assert!(p.coeffs[0].abs() < 1e-15);
        assert!((p.residual - 1.0).abs() < 1e-15);
    }

    #[test]
    fn projection_rejects_singular_gram() {
        let basis = vec![x1(), x1().scale(2.0)];
        let err = project_onto_basis(&x2(), &basis, &gram0(&basis)).unwrap_err();
        assert!(matches!(err, GeometryError::SingularGram { .. }));
    }
}
