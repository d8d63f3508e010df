//! The circle-fiber projection `π: SU(3)/T_{k,l} → SU(3)/T`.
//!
//! At the origin `dπ` is the map `m → 𝔱^⊥ = span(X₁, …, X₆)` that forgets the
//! `X₀` component. The fiber direction is `e₀ ∝ X₀`. For a one-dimensional
//! fiber the tension field is `τ(π) = −dπ(∇_{e₀}e₀) = −Σ κᵢ εᵢ` with
//! `κᵢ = g_t([eᵢ, e₀], e₀)`, and `∇_{e₀}e₀` is the mean curvature of the
//! fiber. Both routes are computed and compared.

use nalgebra::{SMatrix, SVector};
use serde::Serialize;

use crate::curvature::{check_deformed_orthonormal, ConnectionCoefficients, FrameAlgebra};
use crate::error::GeometryError;
use crate::space::{orthonormal_frame, AwSpace, Frame, MetricTag, Vec7};

pub type Mat6 = SMatrix<f64, 6, 6>;
pub type Vec6 = SVector<f64, 6>;
pub type Dpi = SMatrix<f64, 6, 7>;

pub const HARMONIC_TOL: f64 = 1e-10;
pub const MINIMAL_TOL: f64 = 1e-10;
/// Relative spread allowed in the dilation spectrum.
pub const CONFORMAL_REL_TOL: f64 = 1e-10;
/// Agreement required between the two tension-field routes.
pub const CROSS_CHECK_TOL: f64 = 1e-10;
/// `dπ(e₀)` must vanish to this level for `e₀` to count as vertical.
pub const VERTICAL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BaseMetricChoice {
    /// Metric pushed down from `g_t`, making `dπ|_H` an isometry.
    #[serde(rename = "induced_t")]
    InducedT,
    /// Restriction of `⟨,⟩₀` to `𝔱^⊥`.
    #[serde(rename = "round_0")]
    Round0,
}

impl BaseMetricChoice {
    pub fn as_str(&self) -> &'static str {
        match self {
            BaseMetricChoice::InducedT => "induced_t",
            BaseMetricChoice::Round0 => "round_0",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SubmersionSetup {
    pub total_frame: Frame,
    /// Gram matrix of the base basis `(X₁, …, X₆)` under `h`.
    pub base_gram: Mat6,
    /// Column `a` holds the base coordinates of `dπ(e_a)`.
    pub dpi: Dpi,
    pub base_metric: BaseMetricChoice,
}

impl SubmersionSetup {
    /// `dπ` restricted to the horizontal frame `e₁, …, e₆`.
    pub fn horizontal_dpi(&self) -> Mat6 {
        self.dpi.fixed_columns::<6>(1).into_owned()
    }

    /// Norm of `dπ(e₀)` in base coordinates.
    pub fn vertical_defect(&self) -> f64 {
        self.dpi.column(0).norm()
    }

    pub fn rank(&self) -> usize {
        self.dpi.rank(1e-10)
    }

    /// `h`-norm of a vector given in base coordinates.
    pub fn h_norm(&self, base_coords: &Vec6) -> f64 {
        base_coords
            .dot(&(self.base_gram * base_coords))
            .max(0.0)
            .sqrt()
    }
}

/// Uses the standard `g_t`-orthonormal frame.
pub fn build_submersion(
    space: &AwSpace,
    base_metric: BaseMetricChoice,
) -> Result<SubmersionSetup, GeometryError> {
    let frame = orthonormal_frame(space, MetricTag::Deformed)?;
    build_submersion_with_frame(space, frame, base_metric)
}

/// Accepts any `g_t`-orthonormal frame whose first vector is declared
/// vertical; whether it really spans `ker dπ` is reported by
/// [`SubmersionSetup::vertical_defect`], not enforced.
pub fn build_submersion_with_frame(
    space: &AwSpace,
    frame: Frame,
    base_metric: BaseMetricChoice,
) -> Result<SubmersionSetup, GeometryError> {
    check_deformed_orthonormal(space, &frame)?;
    let source = match base_metric {
        BaseMetricChoice::InducedT => &space.gram_t,
        BaseMetricChoice::Round0 => &space.gram0,
    };
    let base_gram = Mat6::from_fn(|i, j| source[(i + 1, j + 1)]);
    let dpi = Dpi::from_fn(|row, a| frame.coords[(a, row + 1)]);
    Ok(SubmersionSetup {
        total_frame: frame,
        base_gram,
        dpi,
        base_metric,
    })
}

/// Replaces `(e₀, e_axis)` by `(cos θ·e₀ + sin θ·e_axis, −sin θ·e₀ + cos θ·e_axis)`.
///
/// The result is still `g_t`-orthonormal, but `e₀` no longer spans the
/// fibers; this is a probe against implementations that return zero
/// regardless of input.
pub fn tilted_frame(
    space: &AwSpace,
    frame: &Frame,
    axis: usize,
    angle: f64,
) -> Result<Frame, GeometryError> {
    assert!((1..7).contains(&axis), "axis must be horizontal");
    let (s, c) = angle.sin_cos();
    let mut vectors = frame.vectors;
    vectors[0] = frame.vectors[0].scale(c).add(&frame.vectors[axis].scale(s));
    vectors[axis] = frame.vectors[0]
        .scale(-s)
        .add(&frame.vectors[axis].scale(c));
    Frame::from_vectors(space, vectors, frame.metric)
}

/// Decomposition of `[eᵢ, e₀]` for one horizontal `i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerticalBracket {
    pub i: usize,
    /// Coefficient on the isotropy generator `Z`.
    pub isotropy: f64,
    /// Frame coordinates of the `m` part.
    pub frame_coords: [f64; 7],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KappaReport {
    pub kappa: [f64; 6],
    pub brackets: Vec<VerticalBracket>,
    /// `g_t([e₀, e₀], e₀)`.
    pub self_bracket: f64,
}

impl KappaReport {
    pub fn max_abs(&self) -> f64 {
        self.kappa.iter().fold(0.0, |a, k| a.max(k.abs()))
    }
}

/// `κᵢ = g_t([eᵢ, e₀], e₀)` for `i = 1..6`.
pub fn kappa_coefficients(alg: &FrameAlgebra) -> KappaReport {
    let brackets: Vec<VerticalBracket> = (1..7)
        .map(|i| VerticalBracket {
            i,
            isotropy: alg.iso_part[i][0],
            frame_coords: alg.m_part[i][0],
        })
        .collect();
    let kappa = std::array::from_fn(|n| brackets[n].frame_coords[0]);
    KappaReport {
        kappa,
        brackets,
        self_bracket: alg.m_part[0][0][0],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TensionField {
    /// Coefficients on `εᵢ = dπ(eᵢ)`.
    pub coords: [f64; 6],
    /// Coordinates in the base basis `(X₁, …, X₆)`.
    pub base_coords: [f64; 6],
    /// `h`-norm.
    pub norm: f64,
    /// `−dπ(∇_{e₀}e₀)` in base coordinates, when cross-checked.
    pub cross_check: Option<[f64; 6]>,
    pub cross_check_diff: Option<f64>,
}

/// `τ = −Σ κᵢ εᵢ`.
pub fn tension_from_kappa(setup: &SubmersionSetup, kappa: &[f64; 6]) -> TensionField {
    let coords = kappa.map(|k| -k);
    let base = setup.horizontal_dpi() * Vec6::from(coords);
    TensionField {
        coords,
        base_coords: base.into(),
        norm: setup.h_norm(&base),
        cross_check: None,
        cross_check_diff: None,
    }
}

/// `τ = −Σ κᵢ εᵢ`, checked against `−dπ(∇_{e₀}e₀)`.
pub fn tension_field(
    setup: &SubmersionSetup,
    kappa: &[f64; 6],
    cc: &ConnectionCoefficients,
) -> Result<TensionField, GeometryError> {
    let mut tension = tension_from_kappa(setup, kappa);
    let other = -(setup.dpi * Vec7::from(cc.nabla(0, 0)));
    let difference = setup.h_norm(&(Vec6::from(tension.base_coords) - other));
    tension.cross_check = Some(other.into());
    tension.cross_check_diff = Some(difference);
    if !(difference <= CROSS_CHECK_TOL) {
        return Err(GeometryError::CrossCheckMismatch { difference });
    }
    Ok(tension)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConformalityReport {
    /// Eigenvalues of `(π*h)(eᵢ, eⱼ)`, ascending.
    pub dilation_spectrum: [f64; 6],
    pub is_weakly_conformal: bool,
    pub lambda: Option<f64>,
}

pub fn conformality_report(setup: &SubmersionSetup) -> ConformalityReport {
    let a = setup.horizontal_dpi();
    let pullback = a.transpose() * setup.base_gram * a;
    let pullback = (pullback + pullback.transpose()) * 0.5;
    let mut spectrum: [f64; 6] = pullback.symmetric_eigenvalues().into();
    spectrum.sort_by(f64::total_cmp);
    let (min, max) = (spectrum[0], spectrum[5]);
    let is_weakly_conformal = max > 0.0 && max - min <= CONFORMAL_REL_TOL * max;
    ConformalityReport {
        dilation_spectrum: spectrum,
        is_weakly_conformal,
        lambda: is_weakly_conformal.then(|| spectrum.iter().sum::<f64>() / 6.0),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberCurvature {
    /// Horizontal part of `∇_{e₀}e₀` (frame coordinates `e₁..e₆`).
    pub horizontal: [f64; 6],
    pub vertical: f64,
    pub norm: f64,
    pub totally_geodesic: bool,
}

/// Mean curvature vector of the one-dimensional fiber.
pub fn fiber_mean_curvature(cc: &ConnectionCoefficients) -> FiberCurvature {
    let full = cc.nabla(0, 0);
    let horizontal: [f64; 6] = std::array::from_fn(|n| full[n + 1]);
    let norm = horizontal.iter().map(|x| x * x).sum::<f64>().sqrt();
    let full_norm = full.iter().map(|x| x * x).sum::<f64>().sqrt();
    FiberCurvature {
        horizontal,
        vertical: full[0],
        norm,
        totally_geodesic: full_norm <= MINIMAL_TOL,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub harmonic: f64,
    pub minimal: f64,
    pub conformal_relative: f64,
    pub vertical: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    harmonic: HARMONIC_TOL,
    minimal: MINIMAL_TOL,
    conformal_relative: CONFORMAL_REL_TOL,
    vertical: VERTICAL_TOL,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MorphismVerdict {
    pub base_metric: BaseMetricChoice,
    pub is_riemannian_submersion: bool,
    pub kappa: [f64; 6],
    pub tension_norm: f64,
    pub is_harmonic: bool,
    pub conformality: ConformalityReport,
    pub fiber_mean_curvature_norm: f64,
    pub has_minimal_fibers: bool,
    pub fibers_totally_geodesic: bool,
    pub is_harmonic_morphism: bool,
    pub evidence_tolerances: Tolerances,
}

impl MorphismVerdict {
    pub fn all_true(&self) -> bool {
        self.is_riemannian_submersion
            && self.is_harmonic
            && self.conformality.is_weakly_conformal
            && self.has_minimal_fibers
            && self.is_harmonic_morphism
    }
}

/// Harmonic morphism ⟺ harmonic and horizontally weakly conformal; for a
/// Riemannian submersion this must agree with fiber minimality.
pub fn morphism_verdict(
    setup: &SubmersionSetup,
    kappa: &KappaReport,
    tension: &TensionField,
    conformality: &ConformalityReport,
    fiber: &FiberCurvature,
) -> Result<MorphismVerdict, GeometryError> {
    let isometric = conformality
        .dilation_spectrum
        .iter()
        .all(|d| (d - 1.0).abs() <= CONFORMAL_REL_TOL);
    let is_riemannian_submersion =
        setup.vertical_defect() <= VERTICAL_TOL && setup.rank() == 6 && isometric;
    let is_harmonic = tension.norm <= HARMONIC_TOL;
    let has_minimal_fibers = fiber.norm <= MINIMAL_TOL;
    let is_harmonic_morphism = is_harmonic && conformality.is_weakly_conformal;

    if is_riemannian_submersion && is_harmonic_morphism != has_minimal_fibers {
        return Err(GeometryError::VerdictInconsistency {
            minimal_fibers: has_minimal_fibers,
            harmonic_morphism: is_harmonic_morphism,
        });
    }
    Ok(MorphismVerdict {
        base_metric: setup.base_metric,
        is_riemannian_submersion,
        kappa: kappa.kappa,
        tension_norm: tension.norm,
        is_harmonic,
        conformality: conformality.clone(),
        fiber_mean_curvature_norm: fiber.norm,
        has_minimal_fibers,
        fibers_totally_geodesic: fiber.totally_geodesic,
        is_harmonic_morphism,
        evidence_tolerances: TOLERANCES,
    })
}

/// Every submersion quantity for one frame and base metric.
#[derive(Clone, Debug)]
pub struct SubmersionAnalysis {
    pub setup: SubmersionSetup,
    pub kappa: KappaReport,
    pub tension: TensionField,
    pub conformality: ConformalityReport,
    pub fiber: FiberCurvature,
    pub verdict: MorphismVerdict,
}

pub fn analyze(
    space: &AwSpace,
    alg: &FrameAlgebra,
    cc: &ConnectionCoefficients,
    frame: Frame,
    base_metric: BaseMetricChoice,
) -> Result<SubmersionAnalysis, GeometryError> {
    let setup = build_submersion_with_frame(space, frame, base_metric)?;
    let kappa = kappa_coefficients(alg);
    let tension = tension_field(&setup, &kappa.kappa, cc)?;
    let conformality = conformality_report(&setup);
    let fiber = fiber_mean_curvature(cc);
    let verdict = morphism_verdict(&setup, &kappa, &tension, &conformality, &fiber)?;
    Ok(SubmersionAnalysis {
        setup,
        kappa,
        tension,
        conformality,
        fiber,
        verdict,
    })
}
