//! Square-root velocity functions and the Hilbert-sphere geometry of psi.

use nalgebra::DMatrix;

use crate::curve::DiscreteCurve;
use crate::error::{Error, Result};
use crate::numeric::{finite_diff, l2_inner, l2_inner_rows};

/// Square-root velocity function q(t) = xdot / sqrt(|xdot|) on a grid.
/// For length-normalized curves q lies on the unit sphere of L2.
#[derive(Debug, Clone)]
pub struct Srvf {
    grid: Vec<f64>,
    q: DMatrix<f64>,
}

impl Srvf {
    pub fn new(grid: Vec<f64>, q: DMatrix<f64>) -> Self {
        assert_eq!(grid.len(), q.nrows());
        Srvf { grid, q }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }
    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }
    pub fn dim(&self) -> usize {
        self.q.ncols()
    }

    pub fn norm(&self) -> f64 {
        l2_inner_rows(&self.grid, &self.q, &self.q).max(0.0).sqrt()
    }

    pub fn inner(&self, other: &Srvf) -> f64 {
        l2_inner_rows(&self.grid, &self.q, &other.q)
    }

    /// Rotated copy O q.
    pub fn rotated(&self, rotation: &DMatrix<f64>) -> Srvf {
        Srvf {
            grid: self.grid.clone(),
            q: &self.q * rotation.transpose(),
        }
    }
}

/// SRVF of a normalized immersed curve. The discrete q is renormalized to
/// unit L2 norm, which absorbs the finite-difference quadrature error.
pub fn srvf_transform(curve: &DiscreteCurve) -> Result<Srvf> {
    let n = curve.num_samples();
    let d = curve.dim();
    let grid = curve.grid().to_vec();
    let mut deriv = DMatrix::zeros(n, d);
    for c in 0..d {
        let col: Vec<f64> = (0..n).map(|i| curve.points()[(i, c)]).collect();
        let dcol = finite_diff(&grid, &col);
        for i in 0..n {
            deriv[(i, c)] = dcol[i];
        }
    }
    let mut q = DMatrix::zeros(n, d);
    for i in 0..n {
        let speed = deriv.row(i).norm();
        if speed < 1e-10 {
            return Err(Error::ZeroSpeed { index: i });
        }
        let f = 1.0 / speed.sqrt();
        for c in 0..d {
            q[(i, c)] = deriv[(i, c)] * f;
        }
    }
    let norm = l2_inner_rows(&grid, &q, &q).sqrt();
    q /= norm;
    Ok(Srvf::new(grid, q))
}

/// Inverse SRVF: x(t) = int_0^t q|q| du, starting at the origin.
pub fn srvf_inverse(srvf: &Srvf) -> Result<DiscreteCurve> {
    let n = srvf.grid.len();
    let d = srvf.dim();
    let mut integrand = DMatrix::zeros(n, d);
    for i in 0..n {
        let mag = srvf.q.row(i).norm();
        for c in 0..d {
            integrand[(i, c)] = srvf.q[(i, c)] * mag;
        }
    }
    let mut pts = DMatrix::zeros(n, d);
    for i in 0..n - 1 {
        let dt = srvf.grid[i + 1] - srvf.grid[i];
        for c in 0..d {
            pts[(i + 1, c)] =
                pts[(i, c)] + 0.5 * dt * (integrand[(i, c)] + integrand[(i + 1, c)]);
        }
    }
    DiscreteCurve::new(srvf.grid.clone(), pts)
}

/// Spherical distance between two unit-norm scalar functions psi.
pub fn psi_distance(grid: &[f64], psi0: &[f64], psi1: &[f64]) -> f64 {
    let inner = l2_inner(grid, psi0, psi1).clamp(-1.0, 1.0);
    inner.acos()
}

/// Great-circle geodesic between unit-norm scalar functions at parameter tau.
pub fn psi_geodesic(grid: &[f64], psi0: &[f64], psi1: &[f64], tau: f64) -> Result<Vec<f64>> {
    let angle = psi_distance(grid, psi0, psi1);
    if (std::f64::consts::PI - angle) < 1e-9 {
        return Err(Error::AntipodalPoints);
    }
    if angle < 1e-9 {
        return Ok(psi0.to_vec());
    }
    let sin = angle.sin();
    let w0 = ((1.0 - tau) * angle).sin() / sin;
    let w1 = (tau * angle).sin() / sin;
    Ok(psi0
        .iter()
        .zip(psi1)
        .map(|(a, b)| w0 * a + w1 * b)
        .collect())
}

/// Great-circle geodesic between vector-valued unit-norm functions
/// (SRVF sphere leg).
pub fn sphere_geodesic_rows(
    grid: &[f64],
    f0: &DMatrix<f64>,
    f1: &DMatrix<f64>,
    tau: f64,
) -> Result<DMatrix<f64>> {
    let inner = l2_inner_rows(grid, f0, f1).clamp(-1.0, 1.0);
    let angle = inner.acos();
    if (std::f64::consts::PI - angle) < 1e-9 {
        return Err(Error::AntipodalPoints);
    }
    if angle < 1e-9 {
        return Ok(f0.clone());
    }
    let sin = angle.sin();
    let w0 = ((1.0 - tau) * angle).sin() / sin;
    let w1 = (tau * angle).sin() / sin;
    Ok(w0 * f0 + w1 * f1)
}
