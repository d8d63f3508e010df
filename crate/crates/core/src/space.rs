//! The space `SU(3)/T_{k,l}` with its deformed invariant metric.
//!
//! The Lie algebra splits `⟨,⟩₀`-orthogonally as `𝔱_{k,l} ⊕ V₁ ⊕ V₂`, where
//! `𝔱_{k,l} = ℝ·Z` with `Z = i·diag(k, l, −k−l)`, `V₁ = span(X₀, X₁, X₂)` is
//! the rest of the block `u(2)`, and `V₂ = span(X₃..X₆)` is its complement.
//! The metric `g_t` on `m = V₁ ⊕ V₂` scales the `V₁` block by `1 + t`.
//!
//! `X₀` is kept exactly as printed in the classical construction,
//! `(i/√(5Γ))·diag(2l+k, 2m+l, 2k+m)`, even though its `⟨,⟩₀` norm squared
//! is `6/5` rather than 1. Bracket identities are checked against that
//! literal vector; every metric computation goes through [`Frame`], which is
//! normalized.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, SMatrix, SVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::GeometryError;
use crate::matrix::{
    commutator, inner0, norm0, project_onto_basis, ComplexMatrix3, Su3Element, TAU_ALG, TAU_PROJ,
};

pub type Mat7 = SMatrix<f64, 7, 7>;
pub type Vec7 = SVector<f64, 7>;

/// Slot of the isotropy generator `Z` in the 8-element basis.
pub const ISO: usize = 0;

/// Slot of `X_i` in the 8-element basis `(Z, X₀, …, X₆)`.
pub const fn x_slot(i: usize) -> usize {
    i + 1
}

/// Orthonormality tolerance for frames.
pub const FRAME_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AwParams {
    pub k: i64,
    pub l: i64,
    pub t: f64,
}

impl AwParams {
    pub fn new(k: i64, l: i64, t: f64) -> Self {
        Self { k, l, t }
    }

    /// `Γ = k² + l² + kl`.
    pub fn gamma(&self) -> f64 {
        (self.k * self.k + self.l * self.l + self.k * self.l) as f64
    }

    /// `m = −k − l`.
    pub fn m(&self) -> i64 {
        -self.k - self.l
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.k == 0 && self.l == 0 {
            return Err(GeometryError::DegenerateParams(
                "k and l must not both vanish (Gamma = k^2 + l^2 + kl must be positive)".into(),
            ));
        }
        if !self.t.is_finite() || self.t <= -1.0 {
            return Err(GeometryError::DegenerateParams("t must exceed -1".into()));
        }
        Ok(())
    }

    /// Non-fatal observations about the parameters.
    pub fn warnings(&self) -> Vec<Warning> {
        let mut out = Vec::new();
        let g = gcd(self.k.unsigned_abs(), self.l.unsigned_abs());
        if g != 1 {
            out.push(Warning::NonCoprime { gcd: g });
        }
        if self.k * self.l * (self.k + self.l) == 0 {
            out.push(Warning::PositivityExcluded);
        }
        out
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum Warning {
    /// `gcd(|k|, |l|) ≠ 1`.
    NonCoprime { gcd: u64 },
    /// `kl(k+l) = 0`: outside the family with strictly positive curvature.
    PositivityExcluded,
}

impl Warning {
    pub fn message(&self) -> String {
        match self {
            Warning::NonCoprime { gcd } => format!(
                "gcd(k, l) = {gcd}; algebraic checks proceed but the circle is not the coprime embedding"
            ),
            Warning::PositivityExcluded => {
                "kl(k+l) = 0; curvature positivity is not expected for these parameters".into()
            }
        }
    }
}

/// Which inner product a frame is orthonormal for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricTag {
    /// `⟨,⟩₀`.
    Base,
    /// `⟨,⟩_t`.
    Deformed,
}

#[derive(Clone, Debug)]
pub struct AwSpace {
    pub params: AwParams,
    pub warnings: Vec<Warning>,
    /// `Z_{k,l} = i·diag(k, l, −k−l)`.
    pub isotropy: Su3Element,
    /// `[X₀, X₁, X₂]`.
    pub v1: [Su3Element; 3],
    /// `[X₃, X₄, X₅, X₆]`.
    pub v2: [Su3Element; 4],
    pub gram0: Mat7,
    pub gram_t: Mat7,
    gram0_inv: Mat7,
    full_gram0: DMatrix<f64>,
}

impl AwSpace {
    /// Builds the basis and Gram matrices, verifying the reductive splitting.
    pub fn build(params: AwParams) -> Result<Self, GeometryError> {
        params.validate()?;
        let (k, l, m) = (params.k as f64, params.l as f64, params.m() as f64);
        let gamma = params.gamma();

        let isotropy = Su3Element::new(ComplexMatrix3::imaginary_diagonal([k, l, m]))?;
        let x0 = Su3Element::new(
            ComplexMatrix3::imaginary_diagonal([2.0 * l + k, 2.0 * m + l, 2.0 * k + m])
                .scale_real(1.0 / (5.0 * gamma).sqrt()),
        )?;
        let real_pair = |i, j| {
            Su3Element::new(
                (ComplexMatrix3::unit(i, j) - ComplexMatrix3::unit(j, i)).scale_real(FRAC_1_SQRT_2),
            )
        };
        let imag_pair = |i, j| {
            Su3Element::new(
                (ComplexMatrix3::unit(i, j) + ComplexMatrix3::unit(j, i))
                    .scale(Complex64::new(0.0, FRAC_1_SQRT_2)),
            )
        };
        let v1 = [x0, real_pair(0, 1)?, imag_pair(0, 1)?];
        let v2 = [
            real_pair(0, 2)?,
            imag_pair(0, 2)?,
            real_pair(1, 2)?,
            imag_pair(1, 2)?,
        ];

        let basis: Vec<Su3Element> = v1.iter().chain(v2.iter()).copied().collect();
        let gram0 = Mat7::from_fn(|i, j| inner0(&basis[i], &basis[j]));
        let mut gram_t = gram0;
        for i in 0..3 {
            for j in 0..3 {
                gram_t[(i, j)] *= 1.0 + params.t;
            }
        }
        let gram0_inv = gram0.try_inverse().ok_or(GeometryError::SingularGram {
            condition: f64::INFINITY,
        })?;
        let full: Vec<Su3Element> = std::iter::once(isotropy)
            .chain(basis.iter().copied())
            .collect();

        let space = Self {
            params,
            warnings: params.warnings(),
            isotropy,
            v1,
            v2,
            gram0,
            gram_t,
            gram0_inv,
            full_gram0: crate::matrix::gram0(&full),
        };
        space.check_reductive()?;
        Ok(space)
    }

    fn check_reductive(&self) -> Result<(), GeometryError> {
        let basis = self.m_basis();
        for (i, x) in basis.iter().enumerate() {
            let overlap = inner0(&self.isotropy, x).abs();
            if overlap > TAU_ALG {
                return Err(GeometryError::SpanResidual {
                    i: ISO,
                    j: x_slot(i),
                    residual: overlap,
                });
            }
            let p = project_onto_basis(
                &commutator(&self.isotropy, x),
                &basis,
                &dyn_gram(&self.gram0),
            )?;
            if p.residual > TAU_PROJ {
                return Err(GeometryError::SpanResidual {
                    i: ISO,
                    j: x_slot(i),
                    residual: p.residual,
                });
            }
        }
        Ok(())
    }

    /// `[X₀, …, X₆]`.
    pub fn m_basis(&self) -> [Su3Element; 7] {
        [
            self.v1[0], self.v1[1], self.v1[2], self.v2[0], self.v2[1], self.v2[2], self.v2[3],
        ]
    }

    /// `[Z, X₀, …, X₆]`, spanning 𝔰𝔲(3).
    pub fn full_basis(&self) -> [Su3Element; 8] {
        let m = self.m_basis();
        [self.isotropy, m[0], m[1], m[2], m[3], m[4], m[5], m[6]]
    }

    pub fn full_gram0(&self) -> &DMatrix<f64> {
        &self.full_gram0
    }

    /// `⟨X₀, X₀⟩₀` of the literal `X₀`; equals `6/5` for every `(k, l)`.
    pub fn x0_norm0_sq(&self) -> f64 {
        inner0(&self.v1[0], &self.v1[0])
    }

    /// Coordinates of `x ∈ m` in `(X₀, …, X₆)`.
    pub fn m_coordinates(&self, x: &Su3Element) -> Result<Vec7, GeometryError> {
        let basis = self.m_basis();
        let rhs = Vec7::from_fn(|i, _| inner0(x, &basis[i]));
        let coords = self.gram0_inv * rhs;
        let rest = x.sub(&Su3Element::combination(coords.as_slice(), &basis));
        let residual = norm0(&rest);
        if residual > TAU_PROJ {
            return Err(GeometryError::NotInModule { residual });
        }
        Ok(coords)
    }

    pub fn from_m_coordinates(&self, coords: &Vec7) -> Su3Element {
        Su3Element::combination(coords.as_slice(), &self.m_basis())
    }

    pub fn gram(&self, tag: MetricTag) -> &Mat7 {
        match tag {
            MetricTag::Base => &self.gram0,
            MetricTag::Deformed => &self.gram_t,
        }
    }

    /// `⟨a, b⟩_t` for `a, b ∈ m`.
    pub fn inner_t(&self, a: &Su3Element, b: &Su3Element) -> Result<f64, GeometryError> {
        let (ca, cb) = (self.m_coordinates(a)?, self.m_coordinates(b)?);
        Ok(ca.dot(&(self.gram_t * cb)))
    }
}

fn dyn_gram(g: &Mat7) -> DMatrix<f64> {
    DMatrix::from_fn(7, 7, |i, j| g[(i, j)])
}

/// Seven vectors of `m`, orthonormal for the tagged metric; `e₀` spans the
/// fiber direction.
#[derive(Clone, Debug)]
pub struct Frame {
    pub vectors: [Su3Element; 7],
    pub metric: MetricTag,
    /// Row `a` holds the `(X₀, …, X₆)` coordinates of `e_a`.
    pub coords: Mat7,
}

impl Frame {
    /// Wraps `vectors`, checking orthonormality under `metric`.
    pub fn from_vectors(
        space: &AwSpace,
        vectors: [Su3Element; 7],
        metric: MetricTag,
    ) -> Result<Self, GeometryError> {
        let mut coords = Mat7::zeros();
        for (a, v) in vectors.iter().enumerate() {
            coords.set_row(a, &space.m_coordinates(v)?.transpose());
        }
        let frame = Self {
            vectors,
            metric,
            coords,
        };
        let residual = frame.orthonormality_residual(space);
        if !(residual <= FRAME_TOL) {
            return Err(GeometryError::NonOrthonormalFrame { residual });
        }
        Ok(frame)
    }

    /// Gram matrix of the frame under `metric`.
    pub fn gram(&self, space: &AwSpace, metric: MetricTag) -> Mat7 {
        self.coords * space.gram(metric) * self.coords.transpose()
    }

    pub fn orthonormality_residual(&self, space: &AwSpace) -> f64 {
        (self.gram(space, self.metric) - Mat7::identity()).amax()
    }

    /// Frame coordinates of `x ∈ m`.
    pub fn coordinates_of(&self, space: &AwSpace, x: &Su3Element) -> Result<Vec7, GeometryError> {
        self.coordinates_of_m(&space.m_coordinates(x)?)
    }

    /// Converts `(X₀, …, X₆)` coordinates to frame coordinates.
    pub fn coordinates_of_m(&self, m_coords: &Vec7) -> Result<Vec7, GeometryError> {
        self.coords
            .transpose()
            .lu()
            .solve(m_coords)
            .ok_or(GeometryError::SingularGram {
                condition: f64::INFINITY,
            })
    }

    /// `Σ cₐ·eₐ`.
    pub fn element(&self, frame_coords: &Vec7) -> Su3Element {
        Su3Element::combination(frame_coords.as_slice(), &self.vectors)
    }
}

/// The frame `(X̂₀, X₁, X₂)/√(1+t), X₃, …, X₆` (deformed) or the same without
/// the `1/√(1+t)` factor (base), followed by one Gram–Schmidt pass.
pub fn orthonormal_frame(space: &AwSpace, metric: MetricTag) -> Result<Frame, GeometryError> {
    let t = space.params.t;
    if metric == MetricTag::Deformed && space.gram_t.cholesky().is_none() {
        return Err(GeometryError::DegenerateMetric { t });
    }
    let v1_scale = match metric {
        MetricTag::Base => 1.0,
        MetricTag::Deformed => 1.0 / (1.0 + t).sqrt(),
    };
    let x0_hat = space.v1[0].scale(1.0 / norm0(&space.v1[0]));
    let seeds = [
        x0_hat.scale(v1_scale),
        space.v1[1].scale(v1_scale),
        space.v1[2].scale(v1_scale),
        space.v2[0],
        space.v2[1],
        space.v2[2],
        space.v2[3],
    ];

    let g = space.gram(metric);
    let mut coords: Vec<Vec7> = Vec::with_capacity(7);
    for seed in &seeds {
        let mut c = space.m_coordinates(seed)?;
        for prev in &coords {
            let overlap = c.dot(&(g * prev));
            c -= prev * overlap;
        }
        let norm = c.dot(&(g * c)).sqrt();
        coords.push(c / norm);
    }
    let vectors = std::array::from_fn(|a| space.from_m_coordinates(&coords[a]));
    Frame::from_vectors(space, vectors, metric)
}

/// Brackets of the basis `(Z, X₀, …, X₆)`:
/// `[b_i, b_j] = Σ_s c[i][j][s]·b_s`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureConstants {
    pub c: [[[f64; 8]; 8]; 8],
    /// Expansion residual of every bracket.
    pub residual: [[f64; 8]; 8],
}

impl StructureConstants {
    pub fn max_residual(&self) -> f64 {
        self.residual.iter().flatten().fold(0.0, |a, &b| a.max(b))
    }

    /// Nonzero entries as `(i, j, s, value)` with `i < j`.
    pub fn nonzero_upper(&self, tol: f64) -> Vec<(usize, usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..8 {
            for j in (i + 1)..8 {
                for s in 0..8 {
                    if self.c[i][j][s].abs() > tol {
                        out.push((i, j, s, self.c[i][j][s]));
                    }
                }
            }
        }
        out
    }
}

/// Expands every bracket of `(Z, X₀, …, X₆)` back into that basis.
pub fn structure_constants(space: &AwSpace) -> Result<StructureConstants, GeometryError> {
    let basis = space.full_basis();
    let gram = space.full_gram0();
    let mut c = [[[0.0; 8]; 8]; 8];
    let mut residual = [[0.0; 8]; 8];
    for i in 0..8 {
        for j in 0..8 {
            let p = project_onto_basis(&commutator(&basis[i], &basis[j]), &basis, gram)?;
            if p.residual > TAU_PROJ {
                return Err(GeometryError::SpanResidual {
                    i,
                    j,
                    residual: p.residual,
                });
            }
            c[i][j].copy_from_slice(&p.coeffs);
            residual[i][j] = p.residual;
        }
    }
    Ok(StructureConstants { c, residual })
}

/// One displayed bracket identity of the form `[A, B] = coeff · X_target`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma51Row {
    pub bracket: String,
    pub target: String,
    pub expected: f64,
    pub computed: f64,
    pub abs_diff: f64,
    /// Largest coefficient on any other basis slot.
    pub off_target_max: f64,
    pub pass: bool,
}

/// Tolerance for the six bracket identities.
pub const LEMMA_TOL: f64 = 1e-12;

/// Checks the six `[·, X₀]` identities with the literal `X₀` and the
/// `1/√(1+t)` frame scaling on the `V₁` vectors.
pub fn verify_lemma51(space: &AwSpace) -> Result<Vec<Lemma51Row>, GeometryError> {
    verify_lemma51_scaled(space, 1.0)
}

/// As [`verify_lemma51`], with `X₀` replaced by `x0_scale·X₀` on both sides.
pub fn verify_lemma51_scaled(
    space: &AwSpace,
    x0_scale: f64,
) -> Result<Vec<Lemma51Row>, GeometryError> {
    let AwParams { k, l, t } = space.params;
    let (k, l) = (k as f64, l as f64);
    let root5g = (5.0 * space.params.gamma()).sqrt();
    let s = 1.0 / (1.0 + t).sqrt();

    let x = space.m_basis();
    let vertical = x[0].scale(s * x0_scale);
    let v1_pair = 3.0 * (k + l) / ((1.0 + t) * root5g) * x0_scale;
    let v2_l = 3.0 * l / ((1.0 + t).sqrt() * root5g) * x0_scale;
    let v2_k = 3.0 * k / ((1.0 + t).sqrt() * root5g) * x0_scale;

    // (left operand, whether it carries the V1 scaling, target X index, expected coefficient)
    let cases = [
        (1, true, 2, -v1_pair),
        (2, true, 1, v1_pair),
        (3, false, 4, -v2_l),
        (4, false, 3, v2_l),
        (5, false, 6, v2_k),
        (6, false, 5, -v2_k),
    ];

    let basis = space.full_basis();
    let gram = space.full_gram0();
    cases
        .iter()
        .map(|&(left, in_v1, target, expected)| {
            let scale = if in_v1 { s } else { 1.0 };
            let bracket = commutator(&x[left].scale(scale), &vertical);
            let p = project_onto_basis(&bracket, &basis, gram)?;
            let computed = p.coeffs[x_slot(target)];
            let off_target_max = p
                .coeffs
                .iter()
                .enumerate()
                .filter(|(slot, _)| *slot != x_slot(target))
                .fold(0.0f64, |a, (_, c)| a.max(c.abs()));
            let abs_diff = (computed - expected).abs();
            let left_label = if in_v1 {
                format!("X{left}/sqrt(1+t)")
            } else {
                format!("X{left}")
            };
            Ok(Lemma51Row {
                bracket: format!("[{left_label}, X0/sqrt(1+t)]"),
                target: format!("X{target}"),
                expected,
                computed,
                abs_diff,
                off_target_max,
                pass: abs_diff <= LEMMA_TOL && off_target_max <= LEMMA_TOL,
            })
        })
        .collect()
}
