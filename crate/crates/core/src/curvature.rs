//! Levi-Civita connection and curvature of `g_t` at the origin coset.
//!
//! Everything is expressed in a `g_t`-orthonormal [`Frame`] of `m`. For
//! `X, Y, W ∈ m` the connection is the Nomizu map
//!
//! ```text
//! 2 g(∇_X Y, W) = g([X,Y]_m, W) − g([Y,W]_m, X) + g([W,X]_m, Y)
//! ```
//!
//! and the curvature is
//!
//! ```text
//! R(X,Y)W = ∇_X ∇_Y W − ∇_Y ∇_X W − ∇_{[X,Y]_m} W − [[X,Y]_𝔥, W]
//! ```
//!
//! with `∇` applied through the constant coefficient array.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::GeometryError;
use crate::matrix::{commutator, inner0, norm0};
use crate::space::{
    orthonormal_frame, structure_constants, x_slot, AwParams, AwSpace, Frame, MetricTag,
    StructureConstants, Vec7, FRAME_TOL, ISO,
};

pub type Array3 = [[[f64; 7]; 7]; 7];
pub type Array4 = [[[[f64; 7]; 7]; 7]; 7];

/// Plane orthonormality tolerance accepted by [`sectional_curvature`].
pub const PLANE_TOL: f64 = 1e-8;

/// Brackets of a frame `(e₀, …, e₆)` split along `𝔱_{k,l} ⊕ m`.
#[derive(Clone, Debug)]
pub struct FrameAlgebra {
    /// `[e_a, e_b]_m` in frame coordinates: `m_part[a][b][c]`.
    pub m_part: Array3,
    /// Coefficient of `Z` in `[e_a, e_b]`.
    pub iso_part: [[f64; 7]; 7],
    /// `[Z, e_a]` in frame coordinates: `ad_iso[a][c]`.
    pub ad_iso: [[f64; 7]; 7],
}

impl FrameAlgebra {
    /// Reads frame brackets off the structure constants of `(Z, X₀, …, X₆)`.
    pub fn new(sc: &StructureConstants, frame: &Frame) -> Result<Self, GeometryError> {
        let coords = &frame.coords;
        let mut m_part = [[[0.0; 7]; 7]; 7];
        let mut iso_part = [[0.0; 7]; 7];
        let mut ad_iso = [[0.0; 7]; 7];

        for a in 0..7 {
            for b in 0..7 {
                let mut iso = 0.0;
                let mut m = Vec7::zeros();
                for p in 0..7 {
                    for q in 0..7 {
                        let w = coords[(a, p)] * coords[(b, q)];
                        if w == 0.0 {
                            continue;
                        }
                        let row = &sc.c[x_slot(p)][x_slot(q)];
                        iso += w * row[ISO];
                        for r in 0..7 {
                            m[r] += w * row[x_slot(r)];
                        }
                    }
                }
                iso_part[a][b] = iso;
                m_part[a][b] = frame.coordinates_of_m(&m)?.into();
            }

            let mut m = Vec7::zeros();
            for p in 0..7 {
                let row = &sc.c[ISO][x_slot(p)];
                for r in 0..7 {
                    m[r] += coords[(a, p)] * row[x_slot(r)];
                }
            }
            ad_iso[a] = frame.coordinates_of_m(&m)?.into();
        }
        Ok(Self {
            m_part,
            iso_part,
            ad_iso,
        })
    }
}

/// `∇_{e_i} e_j = Σ_s gamma[i][j][s]·e_s` at the origin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConnectionCoefficients {
    pub gamma: Array3,
}

impl ConnectionCoefficients {
    /// `∇_{e_i} e_j` as frame coordinates.
    pub fn nabla(&self, i: usize, j: usize) -> [f64; 7] {
        self.gamma[i][j]
    }

    /// Largest `|gamma[i][j][s] + gamma[i][s][j]|`.
    pub fn metric_compatibility_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..7 {
            for j in 0..7 {
                for s in 0..7 {
                    worst = worst.max((self.gamma[i][j][s] + self.gamma[i][s][j]).abs());
                }
            }
        }
        worst
    }
}

/// Requires `frame` to be orthonormal for `g_t`.
pub fn check_deformed_orthonormal(space: &AwSpace, frame: &Frame) -> Result<(), GeometryError> {
    let residual = (frame.gram(space, MetricTag::Deformed) - crate::space::Mat7::identity()).amax();
    if residual <= FRAME_TOL {
        Ok(())
    } else {
        Err(GeometryError::NonOrthonormalFrame { residual })
    }
}

/// Koszul formula in a `g_t`-orthonormal frame.
pub fn connection_coefficients(alg: &FrameAlgebra) -> ConnectionCoefficients {
    let b = &alg.m_part;
    let mut gamma = [[[0.0; 7]; 7]; 7];
    for i in 0..7 {
        for j in 0..7 {
            for s in 0..7 {
                gamma[i][j][s] = 0.5 * (b[i][j][s] - b[j][s][i] + b[s][i][j]);
            }
        }
    }
    ConnectionCoefficients { gamma }
}

/// `R_{ijks} = g_t(R(e_i, e_j) e_k, e_s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor {
    pub r: Array4,
}

/// Worst violations of the algebraic curvature identities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TensorDefects {
    pub antisym_ij: f64,
    pub antisym_ks: f64,
    pub pair_symmetry: f64,
    pub bianchi: f64,
}

impl TensorDefects {
    pub fn max(&self) -> f64 {
        self.antisym_ij
            .max(self.antisym_ks)
            .max(self.pair_symmetry)
            .max(self.bianchi)
    }
}

impl CurvatureTensor {
    pub fn defects(&self) -> TensorDefects {
        let r = &self.r;
        let mut d = TensorDefects {
            antisym_ij: 0.0,
            antisym_ks: 0.0,
            pair_symmetry: 0.0,
            bianchi: 0.0,
        };
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    for s in 0..7 {
                        d.antisym_ij = d.antisym_ij.max((r[i][j][k][s] + r[j][i][k][s]).abs());
                        d.antisym_ks = d.antisym_ks.max((r[i][j][k][s] + r[i][j][s][k]).abs());
                        d.pair_symmetry =
                            d.pair_symmetry.max((r[i][j][k][s] - r[k][s][i][j]).abs());
                        d.bianchi = d
                            .bianchi
                            .max((r[i][j][k][s] + r[j][k][i][s] + r[k][i][j][s]).abs());
                    }
                }
            }
        }
        d
    }
}

pub fn curvature_tensor(cc: &ConnectionCoefficients, alg: &FrameAlgebra) -> CurvatureTensor {
    // lambda[i][s][k] = gamma[i][k][s]: matrix of ∇_{e_i} acting on coordinates.
    let mut lambda = [[[0.0; 7]; 7]; 7];
    for i in 0..7 {
        for k in 0..7 {
            for s in 0..7 {
                lambda[i][s][k] = cc.gamma[i][k][s];
            }
        }
    }

    let mut r = [[[[0.0; 7]; 7]; 7]; 7];
    for i in 0..7 {
        for j in 0..7 {
            let bracket = &alg.m_part[i][j];
            let iso = alg.iso_part[i][j];
            for k in 0..7 {
                for s in 0..7 {
                    let mut v = 0.0;
                    for q in 0..7 {
                        v += lambda[i][s][q] * lambda[j][q][k] - lambda[j][s][q] * lambda[i][q][k];
                        v -= bracket[q] * lambda[q][s][k];
                    }
                    v -= iso * alg.ad_iso[k][s];
                    r[i][j][k][s] = v;
                }
            }
        }
    }
    CurvatureTensor { r }
}

/// An orthonormal pair of frame-coordinate vectors spanning a 2-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlaneSample {
    pub u: [f64; 7],
    pub v: [f64; 7],
}

fn dot(a: &[f64; 7], b: &[f64; 7]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl PlaneSample {
    /// Gram–Schmidt on `(u, v)`; `None` if the pair is numerically dependent.
    pub fn orthonormalize(u: [f64; 7], v: [f64; 7]) -> Option<Self> {
        let nu = dot(&u, &u).sqrt();
        let nv = dot(&v, &v).sqrt();
        if !(nu > 0.0 && nv > 0.0) || dot(&u, &v).abs() / (nu * nv) > 1.0 - 1e-6 {
            return None;
        }
        let u = u.map(|x| x / nu);
        let proj = dot(&u, &v);
        let mut w = [0.0; 7];
        for i in 0..7 {
            w[i] = v[i] - proj * u[i];
        }
        let nw = dot(&w, &w).sqrt();
        Some(Self {
            u,
            v: w.map(|x| x / nw),
        })
    }

    /// Plane spanned by two frame vectors.
    pub fn basis_pair(a: usize, b: usize) -> Self {
        let mut u = [0.0; 7];
        let mut v = [0.0; 7];
        u[a] = 1.0;
        v[b] = 1.0;
        Self { u, v }
    }

    pub fn orthonormality_residual(&self) -> f64 {
        (dot(&self.u, &self.u) - 1.0)
            .abs()
            .max((dot(&self.v, &self.v) - 1.0).abs())
            .max(dot(&self.u, &self.v).abs())
    }
}

/// `K(u, v) = R(u, v, v, u)` for an orthonormal pair.
pub fn sectional_curvature(
    ct: &CurvatureTensor,
    plane: &PlaneSample,
) -> Result<f64, GeometryError> {
    let residual = plane.orthonormality_residual();
    if !(residual <= PLANE_TOL) {
        return Err(GeometryError::DegeneratePlane { residual });
    }
    Ok(contract(ct, plane))
}

fn contract(ct: &CurvatureTensor, plane: &PlaneSample) -> f64 {
    let (u, v) = (&plane.u, &plane.v);
    let mut total = 0.0;
    for i in 0..7 {
        if u[i] == 0.0 {
            continue;
        }
        for j in 0..7 {
            let uv = u[i] * v[j];
            if uv == 0.0 {
                continue;
            }
            let block = &ct.r[i][j];
            let mut inner = 0.0;
            for k in 0..7 {
                inner += v[k] * dot(&block[k], u);
            }
            total += uv * inner;
        }
    }
    total
}

/// Closed-form sectional curvature of the normal homogeneous metric
/// (`t = 0`): `¼‖[U,V]_m‖₀² + ‖[U,V]_𝔥‖₀²`, evaluated on matrices.
pub fn normal_metric_oracle(
    space: &AwSpace,
    frame: &Frame,
    plane: &PlaneSample,
) -> Result<f64, GeometryError> {
    let t = space.params.t;
    if t != 0.0 {
        return Err(GeometryError::OracleScope { t });
    }
    let u = frame.element(&Vec7::from(plane.u));
    let v = frame.element(&Vec7::from(plane.v));
    let w = commutator(&u, &v);
    let z = &space.isotropy;
    let h = z.scale(inner0(&w, z) / inner0(z, z));
    let m = w.sub(&h);
    Ok(0.25 * norm0(&m).powi(2) + norm0(&h).powi(2))
}

/// Everything needed to evaluate curvature of one `(k, l, t)`.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub space: AwSpace,
    pub frame: Frame,
    pub sc: StructureConstants,
    pub algebra: FrameAlgebra,
    pub connection: ConnectionCoefficients,
    pub curvature: CurvatureTensor,
}

impl Geometry {
    pub fn new(params: AwParams) -> Result<Self, GeometryError> {
        let space = AwSpace::build(params)?;
        let frame = orthonormal_frame(&space, MetricTag::Deformed)?;
        Self::with_frame(space, frame)
    }

    /// Uses a caller-supplied `g_t`-orthonormal frame.
    pub fn with_frame(space: AwSpace, frame: Frame) -> Result<Self, GeometryError> {
        check_deformed_orthonormal(&space, &frame)?;
        let sc = structure_constants(&space)?;
        let algebra = FrameAlgebra::new(&sc, &frame)?;
        let connection = connection_coefficients(&algebra);
        let curvature = curvature_tensor(&connection, &algebra);
        Ok(Self {
            space,
            frame,
            sc,
            algebra,
            connection,
            curvature,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureScanReport {
    pub params: AwParams,
    pub n_samples: u64,
    pub seed: u64,
    pub min_k: f64,
    pub max_k: f64,
    pub argmin_plane: PlaneSample,
    pub argmin_index: u64,
    pub count_nonpositive: u64,
}

/// Samples per independent random substream.
pub const SCAN_CHUNK: u64 = 1024;

struct ChunkResult {
    min_k: f64,
    max_k: f64,
    argmin_plane: PlaneSample,
    argmin_index: u64,
    count_nonpositive: u64,
}

fn scan_chunk(ct: &CurvatureTensor, seed: u64, chunk: u64, start: u64, end: u64) -> ChunkResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut draw = || -> [f64; 7] { std::array::from_fn(|_| StandardNormal.sample(&mut rng)) };

    let mut out = ChunkResult {
        min_k: f64::INFINITY,
        max_k: f64::NEG_INFINITY,
        argmin_plane: PlaneSample::basis_pair(0, 1),
        argmin_index: start,
        count_nonpositive: 0,
    };
    for index in start..end {
        let plane = loop {
            if let Some(p) = PlaneSample::orthonormalize(draw(), draw()) {
                break p;
            }
        };
        let k = contract(ct, &plane);
        if k < out.min_k {
            out.min_k = k;
            out.argmin_plane = plane;
            out.argmin_index = index;
        }
        out.max_k = out.max_k.max(k);
        if k <= 0.0 {
            out.count_nonpositive += 1;
        }
    }
    out
}

/// Draws `n_samples` Haar-random 2-planes and records the extremes of `K`.
///
/// Chunk `c` covers samples `[c·SCAN_CHUNK, (c+1)·SCAN_CHUNK)` and uses
/// ChaCha stream `c` of `seed`, so the report does not depend on how many
/// threads evaluate the chunks.
pub fn scan_tensor(
    ct: &CurvatureTensor,
    params: AwParams,
    n_samples: u64,
    seed: u64,
) -> CurvatureScanReport {
    assert!(n_samples >= 1, "n_samples must be positive");
    let chunks = n_samples.div_ceil(SCAN_CHUNK);
    let results: Vec<ChunkResult> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * SCAN_CHUNK;
            let end = (start + SCAN_CHUNK).min(n_samples);
            scan_chunk(ct, seed, c, start, end)
        })
        .collect();

    let mut merged = CurvatureScanReport {
        params,
        n_samples,
        seed,
        min_k: f64::INFINITY,
        max_k: f64::NEG_INFINITY,
        argmin_plane: PlaneSample::basis_pair(0, 1),
        argmin_index: 0,
        count_nonpositive: 0,
    };
    for r in results {
        if r.min_k < merged.min_k {
            merged.min_k = r.min_k;
            merged.argmin_plane = r.argmin_plane;
            merged.argmin_index = r.argmin_index;
        }
        merged.max_k = merged.max_k.max(r.max_k);
        merged.count_nonpositive += r.count_nonpositive;
    }
    merged
}

pub fn positivity_scan(
    space: &AwSpace,
    n_samples: u64,
    seed: u64,
) -> Result<CurvatureScanReport, GeometryError> {
    let frame = orthonormal_frame(space, MetricTag::Deformed)?;
    let geometry = Geometry::with_frame(space.clone(), frame)?;
    Ok(scan_tensor(
        &geometry.curvature,
        space.params,
        n_samples,
        seed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometry(k: i64, l: i64, t: f64) -> Geometry {
        Geometry::new(AwParams::new(k, l, t)).unwrap()
    }

    #[test]
    fn fiber_is_geodesic() {
        for t in [-0.9, 0.0, 0.3, 2.0] {
            let g = geometry(1, 2, t);
            assert!(
                g.connection.gamma[0][0].iter().all(|v| v.abs() < 1e-12),
                "t = {t}"
            );
        }
    }

    #[test]
    fn connection_is_metric() {
        let g = geometry(2, 3, 0.25);
        assert!(g.connection.metric_compatibility_defect() < 1e-12);
    }

    #[test]
    fn curvature_identities_hold() {
        let g = geometry(1, 2, -0.5);
        assert!(
            g.curvature.defects().max() < 1e-10,
            "{:?}",
            g.curvature.defects()
        );
        for i in 0..7 {
            assert!(g.curvature.r[i][i]
                .iter()
                .flatten()
                .all(|v| v.abs() < 1e-14));
        }
    }

    #[test]
    fn x3_x5_plane_at_t0() {
        let g = geometry(1, 1, 0.0);
        let k = sectional_curvature(&g.curvature, &PlaneSample::basis_pair(3, 5)).unwrap();
        assert!((k - 0.125).abs() < 1e-12, "{k}");
        let oracle =
            normal_metric_oracle(&g.space, &g.frame, &PlaneSample::basis_pair(3, 5)).unwrap();
        assert!((oracle - 0.125).abs() < 1e-14);
    }

    #[test]
    fn oracle_matches_for_e1_e2() {
        let g = geometry(1, 1, 0.0);
        let plane = PlaneSample::basis_pair(1, 2);
        let a = sectional_curvature(&g.curvature, &plane).unwrap();
        let b = normal_metric_oracle(&g.space, &g.frame, &plane).unwrap();
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }

    #[test]
    fn oracle_flat_on_abelian_plane() {
        // k + l = 0 makes X0 commute with X1.
        let g = geometry(1, -1, 0.0);
        let plane = PlaneSample::basis_pair(0, 1);
        assert_eq!(
            normal_metric_oracle(&g.space, &g.frame, &plane).unwrap(),
            0.0
        );
        assert!(sectional_curvature(&g.curvature, &plane).unwrap().abs() < 1e-14);
    }

    #[test]
    fn oracle_refuses_deformed_metric() {
        let g = geometry(1, 1, 0.1);
        let err =
            normal_metric_oracle(&g.space, &g.frame, &PlaneSample::basis_pair(0, 1)).unwrap_err();
        assert!(matches!(err, GeometryError::OracleScope { .. }));
    }

    #[test]
    fn degenerate_plane_rejected() {
        let g = geometry(1, 1, 0.1);
        let plane = PlaneSample::basis_pair(2, 2);
        assert!(matches!(
            sectional_curvature(&g.curvature, &plane),
            Err(GeometryError::DegeneratePlane { .. })
        ));
        assert!(PlaneSample::orthonormalize([1.0; 7], [2.0; 7]).is_none());
    }

    #[test]
    fn scan_is_deterministic() {
        let g = geometry(1, 1, 0.1);
        let a = scan_tensor(&g.curvature, g.space.params, 3000, 7);
        let b = scan_tensor(&g.curvature, g.space.params, 3000, 7);
        assert_eq!(a, b);
        assert!(a.min_k <= a.max_k);
        assert!(a.argmin_index < 3000);
    }
}
