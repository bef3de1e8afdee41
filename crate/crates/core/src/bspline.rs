//! B-spline basis on [0, 1] with an exact second-derivative roughness penalty.

use nalgebra::DMatrix;

use crate::numeric::gauss_legendre;

/// Clamped uniform B-spline basis of a given order (order = degree + 1)
/// on [0, 1] with `n_breaks` uniformly spaced breakpoints.
#[derive(Debug, Clone)]
pub struct BSplineBasis {
    knots: Vec<f64>,
    order: usize,
}

impl BSplineBasis {
    pub fn uniform(n_breaks: usize, order: usize) -> Self {
        assert!(order >= 2 && n_breaks >= 2);
        let mut knots = Vec::with_capacity(n_breaks + 2 * (order - 1));
        for _ in 0..order - 1 {
            knots.push(0.0);
        }
        for i in 0..n_breaks {
            knots.push(i as f64 / (n_breaks - 1) as f64);
        }
        for _ in 0..order - 1 {
            knots.push(1.0);
        }
        BSplineBasis { knots, order }
    }

    pub fn num_basis(&self) -> usize {
        self.knots.len() - self.order
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Values of the `deriv`-th derivative of every basis function at x.
    pub fn eval(&self, x: f64, deriv: usize) -> Vec<f64> {
        let x = x.clamp(0.0, 1.0);
        let nb = self.num_basis();
        // Cox-de Boor on degree-0 seeds, then derivative recursion
        let total = self.knots.len() - 1;
        let mut b = vec![0.0; total];
        // half-open intervals, except the last which is closed at 1
        for i in 0..total {
            let inside = if self.knots[i + 1] >= 1.0 && x >= 1.0 {
                self.knots[i] < 1.0
            } else {
                x >= self.knots[i] && x < self.knots[i + 1]
            };
            if inside {
                b[i] = 1.0;
            }
        }
        for p in 1..self.order {
            // the last `deriv` levels use the derivative recursion
            let derivative_level = p > self.order - 1 - deriv;
            for i in 0..total - p {
                let left_den = self.knots[i + p] - self.knots[i];
                let right_den = self.knots[i + p + 1] - self.knots[i + 1];
                b[i] = if derivative_level {
                    let dl = if left_den > 0.0 { p as f64 / left_den * b[i] } else { 0.0 };
                    let dr = if right_den > 0.0 {
                        p as f64 / right_den * b[i + 1]
                    } else {
                        0.0
                    };
                    dl - dr
                } else {
                    let left = if left_den > 0.0 {
                        (x - self.knots[i]) / left_den * b[i]
                    } else {
                        0.0
                    };
                    let right = if right_den > 0.0 {
                        (self.knots[i + p + 1] - x) / right_den * b[i + 1]
                    } else {
                        0.0
                    };
                    left + right
                };
            }
        }
        b.truncate(nb);
        b
    }

    /// Design matrix: rows are evaluation points, columns basis functions.
    pub fn design_matrix(&self, xs: &[f64], deriv: usize) -> DMatrix<f64> {
        let nb = self.num_basis();
        let mut m = DMatrix::zeros(xs.len(), nb);
        for (r, &x) in xs.iter().enumerate() {
            let row = self.eval(x, deriv);
            for (c, v) in row.iter().enumerate() {
                m[(r, c)] = *v;
            }
        }
        m
    }

    /// Gram matrix of second derivatives, integral of B_i'' B_j'' over [0, 1],
    /// computed exactly by Gauss-Legendre on each knot span.
    pub fn second_derivative_penalty(&self) -> DMatrix<f64> {
        let nb = self.num_basis();
        let mut p = DMatrix::zeros(nb, nb);
        let (nodes, weights) = gauss_legendre(self.order.max(3));
        let mut spans: Vec<(f64, f64)> = Vec::new();
        for w in self.knots.windows(2) {
            if w[1] > w[0] {
                spans.push((w[0], w[1]));
            }
        }
        for (a, b) in spans {
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            for (x_ref, w) in nodes.iter().zip(&weights) {
                let x = mid + half * x_ref;
                let d2 = self.eval(x, 2);
                for i in 0..nb {
                    if d2[i] == 0.0 {
                        continue;
                    }
                    for j in 0..nb {
                        p[(i, j)] += w * half * d2[i] * d2[j];
                    }
                }
            }
        }
        p
    }
}
