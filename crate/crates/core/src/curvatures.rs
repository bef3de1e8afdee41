//! Frenet curvature functions theta: [0, 1] -> R^{d-1}.

use nalgebra::DMatrix;

use crate::bspline::BSplineBasis;
use crate::error::{Error, Result};
use crate::numeric::{lerp, uniform_grid};

/// The d-1 Frenet curvatures as a function of arc length, stored either as
/// grid samples (linear interpolation) or as a B-spline expansion.
#[derive(Debug, Clone)]
pub enum FrenetCurvatures {
    Grid {
        s: Vec<f64>,
        /// rows = samples, columns = curvature components
        values: DMatrix<f64>,
    },
    BSpline {
        basis: BSplineBasis,
        /// rows = basis coefficients, columns = curvature components
        coefs: DMatrix<f64>,
    },
}

impl FrenetCurvatures {
    pub fn from_grid(s: Vec<f64>, values: DMatrix<f64>) -> Result<Self> {
        if s.len() != values.nrows() || s.len() < 2 {
            return Err(Error::InvalidInput(
                "curvature sample count mismatch".into(),
            ));
        }
        Ok(FrenetCurvatures::Grid { s, values })
    }

    /// Constant curvatures (circle/helix generators).
    pub fn constant(theta: &[f64]) -> Self {
        let values = DMatrix::from_fn(2, theta.len(), |_, c| theta[c]);
        FrenetCurvatures::Grid {
            s: vec![0.0, 1.0],
            values,
        }
    }

    /// From a closure evaluated on a uniform grid.
    pub fn from_fn(n: usize, components: usize, f: impl Fn(f64) -> Vec<f64>) -> Self {
        let s = uniform_grid(n);
        let values = DMatrix::from_fn(n, components, |i, c| f(s[i])[c]);
        FrenetCurvatures::Grid { s, values }
    }

    /// Number of curvature components, d - 1.
    pub fn components(&self) -> usize {
        match self {
            FrenetCurvatures::Grid { values, .. } => values.ncols(),
            FrenetCurvatures::BSpline { coefs, .. } => coefs.ncols(),
        }
    }

    /// Evaluate all components at arc length s.
    pub fn eval(&self, s: f64) -> Vec<f64> {
        match self {
            FrenetCurvatures::Grid { s: grid, values } => (0..values.ncols())
                .map(|c| {
                    let col: Vec<f64> = (0..grid.len()).map(|i| values[(i, c)]).collect();
                    lerp(grid, &col, s)
                })
                .collect(),
            FrenetCurvatures::BSpline { basis, coefs } => {
                let b = basis.eval(s, 0);
                (0..coefs.ncols())
                    .map(|c| b.iter().enumerate().map(|(i, v)| v * coefs[(i, c)]).sum())
                    .collect()
            }
        }
    }

    /// Dense evaluation on a uniform n-point grid.
    pub fn eval_grid(&self, n: usize) -> (Vec<f64>, DMatrix<f64>) {
        let s = uniform_grid(n);
        let m = self.components();
        let mut out = DMatrix::zeros(n, m);
        for (i, &sv) in s.iter().enumerate() {
            let row = self.eval(sv);
            for (c, v) in row.iter().enumerate() {
                out[(i, c)] = *v;
            }
        }
        (s, out)
    }

    /// Check positivity of the constrained components theta_1..theta_{d-2}
    /// (d >= 3 only) on a dense grid.
    pub fn check_positivity(&self, n: usize) -> Result<()> {
        let m = self.components();
        if m < 2 {
            return Ok(()); // d = 2: signed curvature allowed
        }
        let (s, values) = self.eval_grid(n);
        for c in 0..m - 1 {
            for (i, &sv) in s.iter().enumerate() {
                if values[(i, c)] <= 0.0 {
                    return Err(Error::PositivityViolated {
                        component: c + 1,
                        location: sv,
                    });
                }
            }
        }
        Ok(())
    }
}
