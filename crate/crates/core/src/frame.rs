//! Frenet frames from derivative data via Gram-Schmidt.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Grid of rotation matrices Q(s_i) in SO(d), the moving Frenet frame.
/// Columns of each frame are the basis vectors e_1..e_d.
#[derive(Debug, Clone)]
pub struct FrenetPath {
    grid: Vec<f64>,
    frames: Vec<DMatrix<f64>>,
}

impl FrenetPath {
    pub fn new(grid: Vec<f64>, frames: Vec<DMatrix<f64>>) -> Self {
        assert_eq!(grid.len(), frames.len());
        FrenetPath { grid, frames }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn frames(&self) -> &[DMatrix<f64>] {
        &self.frames
    }

    pub fn dim(&self) -> usize {
        self.frames[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Gram-Schmidt pivot tolerance, scaled by the magnitude of the leading
/// derivative so the degeneracy test is scale-aware.
const PIVOT_TOL: f64 = 1e-10;

/// Build Frenet frames from the first d derivatives of a curve.
///
/// `derivs[k]` holds the (k+1)-th derivative at every sample (rows = samples,
/// columns = ambient coordinates). The frames are orthonormal with
/// determinant +1; the last vector is sign-fixed to complete a positively
/// oriented basis. For d = 2 only the first derivative is needed: e_2 is the
/// +90 degree rotation of the unit tangent, so signed curvature is supported.
pub fn gram_schmidt_frames(grid: &[f64], derivs: &[DMatrix<f64>]) -> Result<FrenetPath> {
    let d = derivs[0].ncols();
    let n = derivs[0].nrows();
    assert_eq!(grid.len(), n);

    let mut frames = Vec::with_capacity(n);
    for i in 0..n {
        let frame = if d == 2 {
            let v = DVector::from_vec(vec![derivs[0][(i, 0)], derivs[0][(i, 1)]]);
            let norm = v.norm();
            if norm < PIVOT_TOL {
                return Err(Error::NotFrenetCurve { index: i });
            }
            let t = v / norm;
            DMatrix::from_column_slice(2, 2, &[t[0], t[1], -t[1], t[0]])
        } else {
            if derivs.len() < d {
                return Err(Error::InvalidInput(format!(
                    "need {d} derivative arrays, got {}",
                    derivs.len()
                )));
            }
            let scale = derivs[0].row(i).norm().max(1.0);
            let mut basis: Vec<DVector<f64>> = Vec::with_capacity(d);
            for k in 0..d {
                let mut v = DVector::from_iterator(d, derivs[k].row(i).iter().copied());
                for e in &basis {
                    let proj = e.dot(&v);
                    v -= proj * e;
                }
                let norm = v.norm();
                if norm < PIVOT_TOL * scale {
                    return Err(Error::NotFrenetCurve { index: i });
                }
                basis.push(v / norm);
            }
            let mut q = DMatrix::zeros(d, d);
            for (k, e) in basis.iter().enumerate() {
                q.set_column(k, e);
            }
            if q.determinant() < 0.0 {
                let last = -q.column(d - 1).clone_owned();
                q.set_column(d - 1, &last);
            }
            q
        };
        frames.push(frame);
    }
    Ok(FrenetPath::new(grid.to_vec(), frames))
}
