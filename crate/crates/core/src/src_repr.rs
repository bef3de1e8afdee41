//! The unparametrized-curvature representation (psi, theta) and the
//! square-root curvature transform (psi, c), with curve reconstruction
//! through the Frenet-Serret ODE.

use nalgebra::DMatrix;

use crate::curvatures::FrenetCurvatures;
use crate::curve::{ArcLength, DiscreteCurve};
use crate::error::{Error, Result};
use crate::numeric::lerp_rows;
use crate::rotation::{so_exp, SkewMatrix};

/// Pair (psi, theta): square-root speed on the time grid and the
/// unparametrized Frenet curvatures as a function of arc length.
#[derive(Debug, Clone)]
pub struct ThetaRepr {
    grid: Vec<f64>,
    psi: Vec<f64>,
    theta: FrenetCurvatures,
}

impl ThetaRepr {
    pub fn new(arclen: &ArcLength, theta: FrenetCurvatures) -> Result<Self> {
        theta.check_positivity(512)?;
        Ok(ThetaRepr {
            grid: arclen.grid().to_vec(),
            psi: arclen.psi().to_vec(),
            theta,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }
    pub fn psi(&self) -> &[f64] {
        &self.psi
    }
    pub fn theta(&self) -> &FrenetCurvatures {
        &self.theta
    }
}

/// The square-root curvature representation (psi, c) on the time grid,
/// with c(t) = sqrt(sdot) theta(s(t)) / sqrt(|theta(s(t))|).
#[derive(Debug, Clone)]
pub struct SrcRepr {
    grid: Vec<f64>,
    psi: Vec<f64>,
    /// rows = samples, columns = the d-1 curvature components
    c: DMatrix<f64>,
}

impl SrcRepr {
    pub fn new(grid: Vec<f64>, psi: Vec<f64>, c: DMatrix<f64>) -> Self {
        assert_eq!(grid.len(), psi.len());
        assert_eq!(grid.len(), c.nrows());
        SrcRepr { grid, psi, c }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }
    pub fn psi(&self) -> &[f64] {
        &self.psi
    }
    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    /// Ambient dimension d = components + 1.
    pub fn dim(&self) -> usize {
        self.c.ncols() + 1
    }

    /// Reconstruct sdot(t) theta(s(t)) = c |c| at each sample.
    pub fn sdot_theta(&self) -> DMatrix<f64> {
        let mut out = self.c.clone();
        for i in 0..out.nrows() {
            let mag = self.c.row(i).norm();
            for v in out.row_mut(i).iter_mut() {
                *v *= mag;
            }
        }
        out
    }
}

/// Square-root curvature transform.
///
/// The quotient theta / sqrt(|theta|) = sign(theta) sqrt(|theta|) extends
/// continuously by zero where the curvature vanishes, so flat stretches are
/// mapped to c = 0 instead of being rejected. Only a curve whose curvature
/// vanishes identically is refused.
pub fn src_transform(arclen: &ArcLength, theta: &FrenetCurvatures) -> Result<SrcRepr> {
    theta.check_positivity(512)?;
    let grid = arclen.grid().to_vec();
    let n = grid.len();
    let m = theta.components();
    let mut c = DMatrix::zeros(n, m);
    let mut max_norm: f64 = 0.0;
    for i in 0..n {
        let s = arclen.s()[i];
        let th = theta.eval(s);
        let norm = th.iter().map(|v| v * v).sum::<f64>().sqrt();
        max_norm = max_norm.max(norm);
        let psi = arclen.psi()[i];
        if norm > 1e-300 {
            let f = psi / norm.sqrt();
            for (col, v) in th.iter().enumerate() {
                c[(i, col)] = f * v;
            }
        }
    }
    if max_norm < 1e-12 {
        return Err(Error::VanishingCurvature);
    }
    Ok(SrcRepr::new(grid, arclen.psi().to_vec(), c))
}

/// Integrate the Frenet-Serret ODE Qdot = sdot Q A_theta with the Lie-group
/// midpoint scheme and accumulate x(t) = int sdot e_1.
///
/// `band_at` returns sdot(t) * theta(s(t)) (the band of the time-domain
/// generator) at an arbitrary t; `sdot` holds speed samples on `grid`.
pub fn integrate_frenet_ode(
    grid: &[f64],
    sdot: &[f64],
    band_at: &dyn Fn(f64) -> Vec<f64>,
    frame0: &DMatrix<f64>,
    x0: &[f64],
) -> Result<(DiscreteCurve, Vec<DMatrix<f64>>)> {
    let n = grid.len();
    let d = frame0.nrows();
    let mut frames = Vec::with_capacity(n);
    let mut q = frame0.clone();
    frames.push(q.clone());
    for i in 0..n - 1 {
        let dt = grid[i + 1] - grid[i];
        let mid = 0.5 * (grid[i] + grid[i + 1]);
        let band = band_at(mid);
        let a = SkewMatrix::from_frenet_band(&band);
        let step = SkewMatrix::from_matrix(&(a.matrix() * dt));
        q = &q * so_exp(&step);
        frames.push(q.clone());
    }
    // x(t) = x0 + int sdot(u) e1(u) du (trapezoid)
    let mut pts = DMatrix::zeros(n, d);
    for c in 0..d {
        pts[(0, c)] = x0[c];
    }
    for i in 0..n - 1 {
        let dt = grid[i + 1] - grid[i];
        for c in 0..d {
            let v0 = sdot[i] * frames[i][(c, 0)];
            let v1 = sdot[i + 1] * frames[i + 1][(c, 0)];
            pts[(i + 1, c)] = pts[(i, c)] + 0.5 * dt * (v0 + v1);
        }
    }
    let curve = DiscreteCurve::new(grid.to_vec(), pts)?;
    Ok((curve, frames))
}

/// Reconstruct a curve from its SRC representation (Frenet ODE route).
/// Defaults: identity initial frame, origin start point.
pub fn src_inverse(
    repr: &SrcRepr,
    frame0: Option<&DMatrix<f64>>,
    x0: Option<&[f64]>,
) -> Result<DiscreteCurve> {
    let d = repr.dim();
    let eye = DMatrix::identity(d, d);
    let frame0 = frame0.unwrap_or(&eye);
    let zeros = vec![0.0; d];
    let x0 = x0.unwrap_or(&zeros);
    let sdot: Vec<f64> = repr.psi().iter().map(|p| p * p).collect();
    let band_samples = repr.sdot_theta();
    let grid = repr.grid().to_vec();
    let band_at = move |t: f64| lerp_rows(&grid, &band_samples, t);
    let (curve, _) = integrate_frenet_ode(repr.grid(), &sdot, &band_at, frame0, x0)?;
    Ok(curve)
}

/// Apply the half-density group action to a whole SRC representation:
/// (psi, c) * h = (psi * h, c * h).
pub fn src_warp(repr: &SrcRepr, warp: &crate::curve::Warping) -> SrcRepr {
    use crate::curve::{apply_warp, apply_warp_scalar, WarpMode};
    let psi = apply_warp_scalar(repr.grid(), repr.psi(), warp, WarpMode::HalfDensity);
    let c = apply_warp(repr.grid(), repr.c(), warp, WarpMode::HalfDensity);
    SrcRepr::new(warp.grid().to_vec(), psi, c)
}
