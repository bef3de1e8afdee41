//! SO(d) primitives: skew matrices, exponential and principal logarithm.
//!
//! Closed forms are used for d = 2 (planar rotation) and d = 3 (Rodrigues);
//! higher dimensions fall back to scaling-and-squaring for exp and inverse
//! scaling-and-squaring (Denman-Beavers square roots) for log.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Skew-symmetric matrix A = -A^T. Antisymmetry is exact by construction.
#[derive(Debug, Clone)]
pub struct SkewMatrix {
    mat: DMatrix<f64>,
}

impl SkewMatrix {
    /// Build from an arbitrary square matrix by antisymmetrization.
    pub fn from_matrix(m: &DMatrix<f64>) -> SkewMatrix {
        let a = 0.5 * (m - m.transpose());
        SkewMatrix { mat: a }
    }

    /// Tridiagonal Frenet matrix A_theta with band entries theta_1..theta_{d-1}.
    pub fn from_frenet_band(theta: &[f64]) -> SkewMatrix {
        let d = theta.len() + 1;
        let mut a = DMatrix::zeros(d, d);
        for (j, &v) in theta.iter().enumerate() {
            a[(j + 1, j)] = v;
            a[(j, j + 1)] = -v;
        }
        SkewMatrix { mat: a }
    }

    pub fn zeros(d: usize) -> SkewMatrix {
        SkewMatrix {
            mat: DMatrix::zeros(d, d),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Sub-diagonal band entries (the Frenet curvature slots).
    pub fn frenet_band(&self) -> Vec<f64> {
        (0..self.dim() - 1).map(|j| self.mat[(j + 1, j)]).collect()
    }

    /// Frobenius norm under the half-trace inner product <A, B> = tr(A^T B)/2.
    /// For a Frenet matrix this equals the Euclidean norm of the band.
    pub fn frobenius_half(&self) -> f64 {
        (0.5 * (self.mat.transpose() * &self.mat).trace()).sqrt()
    }

    /// Energy outside the tridiagonal band, under the half-trace norm.
    pub fn off_band_energy(&self) -> f64 {
        let mut acc = 0.0;
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                if i.abs_diff(j) != 1 {
                    acc += self.mat[(i, j)] * self.mat[(i, j)];
                }
            }
        }
        (0.5 * acc).sqrt()
    }
}

/// Exponential map of SO(d).
pub fn so_exp(a: &SkewMatrix) -> DMatrix<f64> {
    let d = a.dim();
    let m = a.matrix();
    match d {
        2 => {
            let t = m[(1, 0)];
            DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()])
        }
        3 => {
            let axis = [m[(2, 1)], m[(0, 2)], m[(1, 0)]];
            let angle = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
            let eye = DMatrix::identity(3, 3);
            if angle < 1e-12 {
                return eye + m + 0.5 * (m * m);
            }
            // Rodrigues: I + sin(t)/t A + (1 - cos t)/t^2 A^2
            let s = angle.sin() / angle;
            let c = (1.0 - angle.cos()) / (angle * angle);
            eye + s * m + c * (m * m)
        }
        _ => exp_scaling_squaring(m),
    }
}

/// Scaling-and-squaring Taylor exponential; used as the d > 3 fallback.
pub fn exp_scaling_squaring(m: &DMatrix<f64>) -> DMatrix<f64> {
    let d = m.nrows();
    let norm = m.norm();
    let k = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m / 2f64.powi(k as i32);
    let mut term = DMatrix::identity(d, d);
    let mut acc = DMatrix::identity(d, d);
    for i in 1..=20 {
        term = (&term * &scaled) / i as f64;
        acc += &term;
    }
    let mut out = acc;
    for _ in 0..k {
        out = &out * &out;
    }
    out
}

/// Principal logarithm of a rotation; errors with [`Error::LogBranch`] when
/// a rotation angle is within tolerance of pi.
pub fn so_log(r: &DMatrix<f64>) -> Result<SkewMatrix> {
    let d = r.nrows();
    match d {
        2 => {
            let t = r[(1, 0)].atan2(r[(0, 0)]);
            if (std::f64::consts::PI - t.abs()) < 1e-6 {
                return Err(Error::LogBranch);
            }
            Ok(SkewMatrix::from_frenet_band(&[t]))
        }
        3 => {
            let cos_t = ((r.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
            let s = 0.5 * (r - r.transpose());
            let sin_norm = (s[(2, 1)] * s[(2, 1)] + s[(0, 2)] * s[(0, 2)] + s[(1, 0)] * s[(1, 0)])
                .sqrt();
            let angle = sin_norm.atan2(cos_t);
            if (std::f64::consts::PI - angle) < 1e-6 {
                return Err(Error::LogBranch);
            }
            // A = angle / sin(angle) * skew(R); series below 1e-4 for stability
            let factor = if angle < 1e-4 {
                1.0 + angle * angle / 6.0
            } else {
                angle / angle.sin()
            };
            Ok(SkewMatrix::from_matrix(&(factor * s)))
        }
        _ => log_inverse_scaling(r),
    }
}

/// Inverse scaling-and-squaring log for d > 3: repeated Denman-Beavers square
/// roots until close to the identity, then a log(I + X) series.
fn log_inverse_scaling(r: &DMatrix<f64>) -> Result<SkewMatrix> {
    let d = r.nrows();
    let eye = DMatrix::identity(d, d);
    // an eigenvalue at -1 means a rotation angle of pi
    if (r + &eye).determinant().abs() < 1e-8 {
        return Err(Error::LogBranch);
    }
    let mut y = r.clone();
    let mut k = 0u32;
    while (&y - &eye).norm() > 0.25 && k < 40 {
        y = matrix_sqrt(&y)?;
        k += 1;
    }
    let x = &y - &eye;
    let mut term = x.clone();
    let mut acc = x.clone();
    for i in 2..=30 {
        term = &term * &x;
        let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
        acc += sign / i as f64 * &term;
    }
    let out = 2f64.powi(k as i32) * acc;
    Ok(SkewMatrix::from_matrix(&out))
}

fn matrix_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = m.nrows();
    let mut y = m.clone();
    let mut z = DMatrix::identity(d, d);
    for _ in 0..60 {
        let y_inv = y
            .clone()
            .try_inverse()
            .ok_or(Error::LogBranch)?;
        let z_inv = z
            .clone()
            .try_inverse()
            .ok_or(Error::LogBranch)?;
        let y_next = 0.5 * (&y + &z_inv);
        let z_next = 0.5 * (&z + &y_inv);
        if (&y_next - &y).norm() < 1e-14 {
            y = y_next;
            break;
        }
        y = y_next;
        z = z_next;
    }
    Ok(y)
}

/// Deviation of Q from orthogonality, ||Q^T Q - I||_F.
pub fn orthogonality_defect(q: &DMatrix<f64>) -> f64 {
    let d = q.ncols();
    (q.transpose() * q - DMatrix::identity(d, d)).norm()
}
