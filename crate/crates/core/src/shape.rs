//! Shape distances, geodesics between registered curves and pairwise
//! distance matrices.

use nalgebra::DMatrix;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::curvatures::FrenetCurvatures;
use crate::curve::{apply_warp, arc_length, normalize, DiscreteCurve, WarpMode};
use crate::error::{Error, Result};
use crate::estimation::{estimate_pipeline, EstimateConfig};
use crate::numeric::{l2_dist_rows, l2_inner_rows, lerp, lerp_rows, uniform_grid};
use crate::procrustes::point_rotation;
use crate::registration::{
    register_src, register_srvf, resample_uniform, RegistrationConfig, RegistrationResult,
};
use crate::src_repr::{src_inverse, src_transform, SrcRepr, ThetaRepr};
use crate::srvf::{psi_geodesic, sphere_geodesic_rows, srvf_inverse, srvf_transform, Srvf};

/// Which representation a distance or geodesic is computed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMethod {
    /// Elastic SRVF distance after rotation/warp registration.
    Srvf,
    /// L2 distance between unparametrized curvature profiles.
    Theta,
    /// SRC distance: sphere distance of psi plus L2 distance of the
    /// registered square-root curvatures.
    Src,
}

/// A computed distance together with the registration that realized it.
#[derive(Debug, Clone)]
pub struct ShapeDistance {
    pub value: f64,
    /// The (sphere, L2) legs of the SRC product metric; `None` for the
    /// single-term objectives.
    pub legs: Option<[f64; 2]>,
    pub registration: Option<RegistrationResult>,
}

/// One curve entering a pairwise analysis, optionally with a known
/// curvature profile that skips the estimation step.
#[derive(Debug, Clone)]
pub struct AnalysisInput {
    pub label: String,
    pub curve: DiscreteCurve,
    pub theta: Option<FrenetCurvatures>,
}

impl AnalysisInput {
    pub fn new(label: impl Into<String>, curve: DiscreteCurve) -> Self {
        AnalysisInput {
            label: label.into(),
            curve,
            theta: None,
        }
    }

    pub fn with_theta(
        label: impl Into<String>,
        curve: DiscreteCurve,
        theta: FrenetCurvatures,
    ) -> Self {
        AnalysisInput {
            label: label.into(),
            curve,
            theta: Some(theta),
        }
    }

    /// Curvature profile: the supplied one, or an estimate from samples.
    pub fn curvatures(&self, estimate: &EstimateConfig) -> Result<FrenetCurvatures> {
        match &self.theta {
            Some(t) => Ok(t.clone()),
            None => Ok(estimate_pipeline(&self.curve, estimate)?.1),
        }
    }

    pub fn theta_repr(&self, estimate: &EstimateConfig) -> Result<ThetaRepr> {
        let curve = normalize(&self.curve)?;
        let al = arc_length(&curve)?;
        ThetaRepr::new(&al, self.curvatures(estimate)?)
    }

    pub fn src_repr(&self, estimate: &EstimateConfig) -> Result<SrcRepr> {
        let curve = normalize(&self.curve)?;
        let al = arc_length(&curve)?;
        src_transform(&al, &self.curvatures(estimate)?)
    }
}

/// Elastic SRVF distance d = arccos <q0, O (q1 * h)> after registration.
pub fn shape_distance_srvf(
    curve0: &DiscreteCurve,
    curve1: &DiscreteCurve,
    config: &RegistrationConfig,
) -> Result<ShapeDistance> {
    let reg = register_srvf(curve0, curve1, config)?;
    let n = config.dp_grid;
    let grid = uniform_grid(n);
    let q0 = srvf_transform(&resample_uniform(curve0, n)?)?;
    let q1 = srvf_transform(&resample_uniform(curve1, n)?)?;
    let aligned = aligned_q1(&grid, &q1, &reg);
    let inner = l2_inner_rows(&grid, q0.q(), &aligned).clamp(-1.0, 1.0);
    Ok(ShapeDistance {
        value: inner.acos(),
        legs: None,
        registration: Some(reg),
    })
}

fn aligned_q1(grid: &[f64], q1: &Srvf, reg: &RegistrationResult) -> DMatrix<f64> {
    let rotated = match &reg.rotation {
        Some(o) => q1.rotated(o),
        None => q1.clone(),
    };
    apply_warp(grid, rotated.q(), &reg.warp, WarpMode::HalfDensity)
}

/// Distance between unparametrized curvature profiles: the L2 norm of
/// theta0 - theta1 as functions of arc length. No registration is
/// involved; arc length is already a canonical parametrization.
pub fn shape_distance_theta(repr0: &ThetaRepr, repr1: &ThetaRepr) -> Result<ShapeDistance> {
    let n = 512;
    let (_, t0) = repr0.theta().eval_grid(n);
    let (s, t1) = repr1.theta().eval_grid(n);
    if t0.ncols() != t1.ncols() {
        return Err(Error::InvalidInput(
            "curvature profiles have different ambient dimensions".into(),
        ));
    }
    Ok(ShapeDistance {
        value: l2_dist_rows(&s, &t0, &t1),
        legs: None,
        registration: None,
    })
}

/// SRC distance: sphere distance between the psi components plus the L2
/// distance between the registered square-root curvature components.
pub fn shape_distance_src(
    repr0: &SrcRepr,
    repr1: &SrcRepr,
    config: &RegistrationConfig,
) -> Result<ShapeDistance> {
    if repr0.dim() != repr1.dim() {
        return Err(Error::InvalidInput(
            "SRC representations have different ambient dimensions".into(),
        ));
    }
    let reg = register_src(repr0, repr1, config)?;
    let n = config.dp_grid;
    let r0 = resample_src(repr0, n);
    let r1 = crate::src_repr::src_warp(&resample_src(repr1, n), &reg.warp);
    let grid = r0.grid().to_vec();
    let inner = crate::curve::psi_inner(&grid, r0.psi(), r1.psi()).clamp(-1.0, 1.0);
    let d_psi = inner.acos();
    let d_c = l2_dist_rows(&grid, r0.c(), r1.c());
    Ok(ShapeDistance {
        value: d_psi + d_c,
        legs: Some([d_psi, d_c]),
        registration: Some(reg),
    })
}

/// Linear resampling of an SRC representation onto a uniform n-grid.
fn resample_src(repr: &SrcRepr, n: usize) -> SrcRepr {
    let grid = uniform_grid(n);
    let psi: Vec<f64> = grid.iter().map(|&t| lerp(repr.grid(), repr.psi(), t)).collect();
    let mut c = DMatrix::zeros(n, repr.c().ncols());
    for (i, &t) in grid.iter().enumerate() {
        let row = lerp_rows(repr.grid(), repr.c(), t);
        for (col, v) in row.iter().enumerate() {
            c[(i, col)] = *v;
        }
    }
    SrcRepr::new(grid, psi, c)
}

/// A discretized geodesic: snapshots at the listed interpolation values,
/// with the underlying curvature profiles where the method exposes them.
#[derive(Debug, Clone)]
pub struct GeodesicPath {
    pub taus: Vec<f64>,
    pub curves: Vec<DiscreteCurve>,
    pub curvatures: Option<Vec<FrenetCurvatures>>,
}

/// Geodesic between two curves in the chosen representation, sampled at
/// `steps + 1` evenly spaced interpolation values including both ends.
///
/// Reconstructed snapshots start at the origin and are rotation-aligned
/// to the first curve for display.
pub fn geodesic(
    a: &AnalysisInput,
    b: &AnalysisInput,
    method: DistanceMethod,
    steps: usize,
    config: &RegistrationConfig,
    estimate: &EstimateConfig,
) -> Result<GeodesicPath> {
    if steps == 0 {
        return Err(Error::InvalidInput("need at least one geodesic step".into()));
    }
    let taus: Vec<f64> = (0..=steps).map(|k| k as f64 / steps as f64).collect();
    match method {
        DistanceMethod::Srvf => srvf_geodesic(a, b, &taus, config),
        DistanceMethod::Theta => theta_geodesic(a, b, &taus, estimate),
        DistanceMethod::Src => src_geodesic(a, b, &taus, config, estimate),
    }
}

fn srvf_geodesic(
    a: &AnalysisInput,
    b: &AnalysisInput,
    taus: &[f64],
    config: &RegistrationConfig,
) -> Result<GeodesicPath> {
    let c0 = normalize(&a.curve)?;
    let c1 = normalize(&b.curve)?;
    let reg = register_srvf(&c0, &c1, config)?;
    let n = config.dp_grid;
    let grid = uniform_grid(n);
    let q0 = srvf_transform(&resample_uniform(&c0, n)?)?;
    let q1 = srvf_transform(&resample_uniform(&c1, n)?)?;
    let aligned = aligned_q1(&grid, &q1, &reg);
    let reference = srvf_inverse(&q0)?;
    let mut curves = Vec::with_capacity(taus.len());
    for &tau in taus {
        let q_tau = sphere_geodesic_rows(&grid, q0.q(), &aligned, tau)?;
        let snap = srvf_inverse(&Srvf::new(grid.clone(), q_tau))?;
        curves.push(align_for_display(&reference, &snap));
    }
    Ok(GeodesicPath {
        taus: taus.to_vec(),
        curves,
        curvatures: None,
    })
}

fn theta_geodesic(
    a: &AnalysisInput,
    b: &AnalysisInput,
    taus: &[f64],
    estimate: &EstimateConfig,
) -> Result<GeodesicPath> {
    let r0 = a.theta_repr(estimate)?;
    let r1 = b.theta_repr(estimate)?;
    let n = 512;
    let (s, t0) = r0.theta().eval_grid(n);
    let (_, t1) = r1.theta().eval_grid(n);
    if t0.ncols() != t1.ncols() {
        return Err(Error::InvalidInput(
            "curvature profiles have different ambient dimensions".into(),
        ));
    }
    // the speed of the first curve is carried along the whole path
    let grid = uniform_grid(n);
    let sdot: Vec<f64> = grid
        .iter()
        .map(|&t| {
            let p = lerp(r0.grid(), r0.psi(), t);
            p * p
        })
        .collect();
    let s_of_t = cumulative_s(&grid, &sdot);
    let mut curves = Vec::with_capacity(taus.len());
    let mut profiles = Vec::with_capacity(taus.len());
    let mut reference: Option<DiscreteCurve> = None;
    for &tau in taus {
        let theta_tau = (1.0 - tau) * &t0 + tau * &t1;
        let profile = FrenetCurvatures::from_grid(s.clone(), theta_tau.clone())?;
        let snap = reconstruct_from_theta(&grid, &sdot, &s_of_t, &s, &theta_tau)?;
        let aligned = match &reference {
            Some(r) => align_for_display(r, &snap),
            None => {
                reference = Some(snap.clone());
                snap
            }
        };
        curves.push(aligned);
        profiles.push(profile);
    }
    Ok(GeodesicPath {
        taus: taus.to_vec(),
        curves,
        curvatures: Some(profiles),
    })
}

fn src_geodesic(
    a: &AnalysisInput,
    b: &AnalysisInput,
    taus: &[f64],
    config: &RegistrationConfig,
    estimate: &EstimateConfig,
) -> Result<GeodesicPath> {
    let repr0 = a.src_repr(estimate)?;
    let repr1 = b.src_repr(estimate)?;
    let reg = register_src(&repr0, &repr1, config)?;
    let n = config.dp_grid;
    let r0 = resample_src(&repr0, n);
    let r1 = crate::src_repr::src_warp(&resample_src(&repr1, n), &reg.warp);
    let grid = r0.grid().to_vec();
    let mut curves = Vec::with_capacity(taus.len());
    let mut profiles = Vec::with_capacity(taus.len());
    let mut reference: Option<DiscreteCurve> = None;
    for &tau in taus {
        // psi moves along the sphere, c along the straight line
        let psi = psi_geodesic(&grid, r0.psi(), r1.psi(), tau)?;
        let c = (1.0 - tau) * r0.c() + tau * r1.c();
        let repr = SrcRepr::new(grid.clone(), psi, c);
        profiles.push(src_curvature_profile(&repr));
        let snap = src_inverse(&repr, None, None)?;
        let aligned = match &reference {
            Some(r) => align_for_display(r, &snap),
            None => {
                reference = Some(snap.clone());
                snap
            }
        };
        curves.push(aligned);
    }
    Ok(GeodesicPath {
        taus: taus.to_vec(),
        curves,
        curvatures: Some(profiles),
    })
}

/// Curvature profile theta(s) implied by an SRC representation:
/// theta = c |c| / sdot, reindexed from time to arc length.
fn src_curvature_profile(repr: &SrcRepr) -> FrenetCurvatures {
    let n = repr.grid().len();
    let st = repr.sdot_theta();
    let mut s = Vec::with_capacity(n);
    let mut values = DMatrix::zeros(n, st.ncols());
    // s(t) by quadrature of psi^2
    let sdot: Vec<f64> = repr.psi().iter().map(|p| p * p).collect();
    let s_of_t = cumulative_s(repr.grid(), &sdot);
    for i in 0..n {
        s.push(s_of_t[i]);
        let denom = sdot[i].max(1e-12);
        for c in 0..st.ncols() {
            values[(i, c)] = st[(i, c)] / denom;
        }
    }
    // guard against flat spots in s produced by vanishing speed
    let mut s_mono = s.clone();
    for i in 1..n {
        if s_mono[i] <= s_mono[i - 1] {
            s_mono[i] = s_mono[i - 1] + 1e-12;
        }
    }
    FrenetCurvatures::from_grid(s_mono, values).expect("profile grid is increasing")
}

fn cumulative_s(grid: &[f64], sdot: &[f64]) -> Vec<f64> {
    let mut s = crate::numeric::cumtrapz(grid, sdot);
    let total = s[s.len() - 1];
    if total > 0.0 {
        for v in s.iter_mut() {
            *v /= total;
        }
    }
    s
}

/// Integrate the Frenet ODE for a theta profile riding on a fixed speed.
fn reconstruct_from_theta(
    grid: &[f64],
    sdot: &[f64],
    s_of_t: &[f64],
    s_grid: &[f64],
    theta: &DMatrix<f64>,
) -> Result<DiscreteCurve> {
    let d = theta.ncols() + 1;
    let grid_owned = grid.to_vec();
    let sdot_owned = sdot.to_vec();
    let s_owned = s_of_t.to_vec();
    let s_grid_owned = s_grid.to_vec();
    let theta_owned = theta.clone();
    let band_at = move |t: f64| {
        let sd = lerp(&grid_owned, &sdot_owned, t);
        let s = lerp(&grid_owned, &s_owned, t).clamp(0.0, 1.0);
        let th = lerp_rows(&s_grid_owned, &theta_owned, s);
        th.iter().map(|v| sd * v).collect()
    };
    let (curve, _) = crate::src_repr::integrate_frenet_ode(
        grid,
        sdot,
        &band_at,
        &DMatrix::identity(d, d),
        &vec![0.0; d],
    )?;
    Ok(curve)
}

/// Rotation-only alignment of a snapshot to a reference for display.
fn align_for_display(reference: &DiscreteCurve, curve: &DiscreteCurve) -> DiscreteCurve {
    let rot = point_rotation(curve.points(), reference.points());
    curve.transformed(&rot, &vec![0.0; curve.dim()])
}

/// Symmetric pairwise distance matrix over a set of inputs. Failed pairs
/// produce NaN entries instead of aborting the whole computation.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    pub labels: Vec<String>,
    pub values: DMatrix<f64>,
    pub method: DistanceMethod,
}

fn pair_distance(
    a: &AnalysisInput,
    b: &AnalysisInput,
    method: DistanceMethod,
    config: &RegistrationConfig,
    estimate: &EstimateConfig,
) -> Result<f64> {
    match method {
        DistanceMethod::Srvf => {
            let c0 = normalize(&a.curve)?;
            let c1 = normalize(&b.curve)?;
            Ok(shape_distance_srvf(&c0, &c1, config)?.value)
        }
        DistanceMethod::Theta => {
            let r0 = a.theta_repr(estimate)?;
            let r1 = b.theta_repr(estimate)?;
            Ok(shape_distance_theta(&r0, &r1)?.value)
        }
        DistanceMethod::Src => {
            let r0 = a.src_repr(estimate)?;
            let r1 = b.src_repr(estimate)?;
            Ok(shape_distance_src(&r0, &r1, config)?.value)
        }
    }
}

fn assemble_matrix(
    inputs: &[AnalysisInput],
    method: DistanceMethod,
    entries: Vec<((usize, usize), f64)>,
) -> DistanceMatrix {
    let n = inputs.len();
    let mut values = DMatrix::zeros(n, n);
    for ((i, j), v) in entries {
        values[(i, j)] = v;
        values[(j, i)] = v;
    }
    DistanceMatrix {
        labels: inputs.iter().map(|x| x.label.clone()).collect(),
        values,
        method,
    }
}

fn upper_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Averaged symmetric distance for one pair; NaN when either direction
/// fails. Registration-based distances are not exactly symmetric, so the
/// matrix averages both orientations.
fn symmetric_entry(
    a: &AnalysisInput,
    b: &AnalysisInput,
    method: DistanceMethod,
    config: &RegistrationConfig,
    estimate: &EstimateConfig,
) -> f64 {
    let fwd = pair_distance(a, b, method, config, estimate);
    let bwd = pair_distance(b, a, method, config, estimate);
    match (fwd, bwd) {
        (Ok(x), Ok(y)) => 0.5 * (x + y),
        _ => f64::NAN,
    }
}

/// Pairwise matrix, computed sequentially. Always available; the
/// parallel version is preferred when the `parallel` feature is on.
pub fn pairwise_matrix_serial(
    inputs: &[AnalysisInput],
    method: DistanceMethod,
    config: &RegistrationConfig,
    estimate: &EstimateConfig,
) -> DistanceMatrix {
    let entries: Vec<((usize, usize), f64)> = upper_pairs(inputs.len())
        .into_iter()
        .map(|(i, j)| {
            (
                (i, j),
                symmetric_entry(&inputs[i], &inputs[j], method, config, estimate),
            )
        })
        .collect();
    assemble_matrix(inputs, method, entries)
}

/// Pairwise matrix, parallel over pairs.
#[cfg(feature = "parallel")]
pub fn pairwise_matrix(
    inputs: &[AnalysisInput],
    method: DistanceMethod,
    config: &RegistrationConfig,
    estimate: &EstimateConfig,
) -> DistanceMatrix {
    let entries: Vec<((usize, usize), f64)> = upper_pairs(inputs.len())
        .into_par_iter()
        .map(|(i, j)| {
            (
                (i, j),
                symmetric_entry(&inputs[i], &inputs[j], method, config, estimate),
            )
        })
        .collect();
    assemble_matrix(inputs, method, entries)
}

/// Without the `parallel` feature this is the sequential implementation
/// under the same name, so callers do not need to care.
#[cfg(not(feature = "parallel"))]
pub fn pairwise_matrix(
    inputs: &[AnalysisInput],
    method: DistanceMethod,
    config: &RegistrationConfig,
    estimate: &EstimateConfig,
) -> DistanceMatrix {
    pairwise_matrix_serial(inputs, method, config, estimate)
}
