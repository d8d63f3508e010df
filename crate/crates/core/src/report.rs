//! Report records produced by the `verify`, `scan` and `brackets` commands.
//!
//! Field order in these structs is the serialized field order.

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::{scan_tensor, Geometry};
use crate::error::GeometryError;
use crate::space::{verify_lemma51, AwParams, Lemma51Row, StructureConstants};
use crate::submersion::{
    analyze, fiber_mean_curvature, kappa_coefficients, BaseMetricChoice, MorphismVerdict,
    HARMONIC_TOL, MINIMAL_TOL,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WarningEntry {
    pub code: &'static str,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GramAnomaly {
    /// `⟨X₀, X₀⟩₀` of the literal `X₀`.
    pub x0_norm0_sq: f64,
    /// Normalization factor that would make `X₀` a unit vector: `1/√(6Γ)`.
    pub unit_normalization: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CheckSummary {
    pub lemma51: bool,
    pub fiber_geodesic: bool,
    pub tension_vanishes: bool,
    pub verdict: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub tool_version: &'static str,
    pub params: AwParams,
    pub gamma: f64,
    pub warnings: Vec<WarningEntry>,
    pub lemma51_rows: Vec<Lemma51Row>,
    pub nabla_e0e0_norm: f64,
    pub kappa: [f64; 6],
    pub tension_norm: f64,
    pub tension_cross_check_diff: f64,
    pub primary_base_metric: BaseMetricChoice,
    pub verdict_induced: MorphismVerdict,
    pub verdict_round0: MorphismVerdict,
    pub base_metrics_agree: bool,
    pub gram_anomaly: GramAnomaly,
    pub checks: CheckSummary,
    pub pass: bool,
}

fn warnings_of(params: &AwParams) -> Vec<WarningEntry> {
    params
        .warnings()
        .into_iter()
        .map(|w| WarningEntry {
            code: match w {
                crate::space::Warning::NonCoprime { .. } => "non_coprime",
                crate::space::Warning::PositivityExcluded => "positivity_excluded",
            },
            message: w.message(),
        })
        .collect()
}

/// Runs every check for one `(k, l, t)`. `primary` selects which base
/// metric's verdict decides `pass`.
pub fn run_verify(
    params: AwParams,
    primary: BaseMetricChoice,
) -> Result<VerifyReport, GeometryError> {
    let g = Geometry::new(params)?;
    let lemma51_rows = verify_lemma51(&g.space)?;
    let induced = analyze(
        &g.space,
        &g.algebra,
        &g.connection,
        g.frame.clone(),
        BaseMetricChoice::InducedT,
    )?;
    let round0 = analyze(
        &g.space,
        &g.algebra,
        &g.connection,
        g.frame.clone(),
        BaseMetricChoice::Round0,
    )?;

    let nabla = g.connection.nabla(0, 0);
    let nabla_e0e0_norm = nabla.iter().map(|x| x * x).sum::<f64>().sqrt();

    let primary_verdict = match primary {
        BaseMetricChoice::InducedT => &induced.verdict,
        BaseMetricChoice::Round0 => &round0.verdict,
    };
    let checks = CheckSummary {
        lemma51: lemma51_rows.iter().all(|r| r.pass),
        fiber_geodesic: nabla_e0e0_norm <= MINIMAL_TOL,
        tension_vanishes: induced.tension.norm <= HARMONIC_TOL,
        verdict: primary_verdict.all_true(),
    };
    let pass = checks.lemma51 && checks.fiber_geodesic && checks.tension_vanishes && checks.verdict;

    Ok(VerifyReport {
        tool_version: TOOL_VERSION,
        params,
        gamma: params.gamma(),
        warnings: warnings_of(&params),
        lemma51_rows,
        nabla_e0e0_norm,
        kappa: induced.kappa.kappa,
        tension_norm: induced.tension.norm,
        tension_cross_check_diff: induced.tension.cross_check_diff.unwrap_or(f64::NAN),
        primary_base_metric: primary,
        base_metrics_agree: induced.verdict.all_true() == round0.verdict.all_true(),
        verdict_induced: induced.verdict,
        verdict_round0: round0.verdict,
        gram_anomaly: GramAnomaly {
            x0_norm0_sq: g.space.x0_norm0_sq(),
            unit_normalization: 1.0 / (6.0 * params.gamma()).sqrt(),
        },
        checks,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub k: i64,
    pub l: i64,
    pub t: f64,
    pub n_samples: u64,
    pub seed: u64,
    #[serde(rename = "min_K")]
    pub min_k: f64,
    pub count_nonpositive: u64,
    pub kappa_max_abs: f64,
    pub fiber_mc_norm: f64,
}

pub const SCAN_HEADER: [&str; 9] = [
    "k",
    "l",
    "t",
    "n_samples",
    "seed",
    "min_K",
    "count_nonpositive",
    "kappa_max_abs",
    "fiber_mc_norm",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRequest {
    pub k: i64,
    pub l: i64,
    pub t_min: f64,
    pub t_max: f64,
    pub t_steps: usize,
    pub planes: u64,
    pub seed: u64,
}

impl ScanRequest {
    pub fn validate(&self) -> Result<(), GeometryError> {
        let bad = |m: &str| Err(GeometryError::DegenerateParams(m.into()));
        if !self.t_min.is_finite() || !self.t_max.is_finite() {
            return bad("t range must be finite");
        }
        if self.t_min <= -1.0 {
            return bad("t must exceed -1");
        }
        if self.t_min > self.t_max {
            return bad("t-min must not exceed t-max");
        }
        if self.t_steps == 0 {
            return bad("t-steps must be at least 1");
        }
        if self.t_steps == 1 && self.t_min != self.t_max {
            return bad("t-steps = 1 requires t-min = t-max");
        }
        if self.planes == 0 {
            return bad("planes must be at least 1");
        }
        AwParams::new(self.k, self.l, self.t_min).validate()
    }

    /// Evenly spaced values from `t_min` to `t_max` inclusive.
    pub fn t_values(&self) -> Vec<f64> {
        if self.t_steps == 1 {
            return vec![self.t_min];
        }
        let last = self.t_steps - 1;
        (0..self.t_steps)
            .map(|i| {
                if i == last {
                    self.t_max
                } else {
                    self.t_min + (self.t_max - self.t_min) * (i as f64) / (last as f64)
                }
            })
            .collect()
    }
}

pub fn scan_row(params: AwParams, planes: u64, seed: u64) -> Result<ScanRow, GeometryError> {
    let g = Geometry::new(params)?;
    let report = scan_tensor(&g.curvature, params, planes, seed);
    let kappa = kappa_coefficients(&g.algebra);
    let fiber = fiber_mean_curvature(&g.connection);
    Ok(ScanRow {
        k: params.k,
        l: params.l,
        t: params.t,
        n_samples: planes,
        seed,
        min_k: report.min_k,
        count_nonpositive: report.count_nonpositive,
        kappa_max_abs: kappa.max_abs(),
        fiber_mc_norm: fiber.norm,
    })
}

/// One row per `t`, in grid order.
pub fn run_scan(req: &ScanRequest) -> Result<Vec<ScanRow>, GeometryError> {
    req.validate()?;
    req.t_values()
        .into_par_iter()
        .map(|t| scan_row(AwParams::new(req.k, req.l, t), req.planes, req.seed))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureEntry {
    pub left: &'static str,
    pub right: &'static str,
    pub component: &'static str,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BracketsReport {
    pub params: AwParams,
    pub lemma51_rows: Vec<Lemma51Row>,
    pub pass: bool,
    /// Nonzero `[b_i, b_j]` coefficients for `i < j` over `(Z, X₀, …, X₆)`.
    pub structure_constants: Vec<StructureEntry>,
    pub max_expansion_residual: f64,
}

pub const BASIS_LABELS: [&str; 8] = ["Z", "X0", "X1", "X2", "X3", "X4", "X5", "X6"];

/// Entries below this magnitude are omitted from the structure-constant listing.
pub const LISTING_CUTOFF: f64 = 1e-12;

pub fn structure_listing(sc: &StructureConstants) -> Vec<StructureEntry> {
    sc.nonzero_upper(LISTING_CUTOFF)
        .into_iter()
        .map(|(i, j, s, value)| StructureEntry {
            left: BASIS_LABELS[i],
            right: BASIS_LABELS[j],
            component: BASIS_LABELS[s],
            value,
        })
        .collect()
}

pub fn run_brackets(params: AwParams) -> Result<BracketsReport, GeometryError> {
    let space = crate::space::AwSpace::build(params)?;
    let sc = crate::space::structure_constants(&space)?;
    let lemma51_rows = verify_lemma51(&space)?;
    Ok(BracketsReport {
        params,
        pass: lemma51_rows.iter().all(|r| r.pass),
        lemma51_rows,
        structure_constants: structure_listing(&sc),
        max_expansion_residual: sc.max_residual(),
    })
}
