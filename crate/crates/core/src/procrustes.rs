//! Optimal rotation alignment by SVD with determinant sign correction.

use nalgebra::DMatrix;

use crate::numeric::l2_inner;
use crate::srvf::Srvf;

/// Outcome of a Procrustes solve. `unique` is false when the smallest
/// singular values tie at the sign flip, in which case the returned matrix
/// is one of several minimizers.
#[derive(Debug, Clone)]
pub struct ProcrustesResult {
    pub rotation: DMatrix<f64>,
    pub unique: bool,
}

/// Rotation O in SO(d) minimizing int |q0 - O q1|^2 dt.
pub fn procrustes_rotation(q0: &Srvf, q1: &Srvf) -> ProcrustesResult {
    let d = q0.dim();
    // cross-covariance M_ab = int q0_a q1_b dt
    let mut m = DMatrix::zeros(d, d);
    for a in 0..d {
        let col_a: Vec<f64> = (0..q0.grid().len()).map(|i| q0.q()[(i, a)]).collect();
        for b in 0..d {
            let col_b: Vec<f64> = (0..q1.grid().len()).map(|i| q1.q()[(i, b)]).collect();
            m[(a, b)] = l2_inner(q0.grid(), &col_a, &col_b);
        }
    }
    rotation_from_covariance(&m)
}

/// Rotation aligning row-point sets: O minimizing sum |b_i - O a_i|^2
/// (no centering; both sets are assumed anchored at the origin).
pub fn point_rotation(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let m = b.transpose() * a; // M_xy = sum b_x a_y
    rotation_from_covariance(&m).rotation
}

/// Maximizer of tr(O M^T) over SO(d) from the SVD of M, with the last
/// singular vector sign-flipped when det would be negative.
pub fn rotation_from_covariance(m: &DMatrix<f64>) -> ProcrustesResult {
    let d = m.nrows();
    let svd = m.clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd with u");
    let v_t = svd.v_t.as_ref().expect("svd with v_t");
    let det = (u * v_t).determinant();
    let mut sigma = DMatrix::identity(d, d);
    let mut unique = true;
    if det < 0.0 {
        sigma[(d - 1, d - 1)] = -1.0;
        // a tie between the two smallest singular values makes the
        // corrected minimizer non-unique
        let s = &svd.singular_values;
        if d >= 2 && (s[d - 1] - s[d - 2]).abs() < 1e-12 * s[0].max(1.0) {
            unique = false;
        }
    }
    ProcrustesResult {
        rotation: u * sigma * v_t,
        unique,
    }
}
