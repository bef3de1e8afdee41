//! Small numerical helpers: interpolation, quadrature and Gauss-Legendre nodes.

use nalgebra::DMatrix;

/// Uniform grid of `n` points on [0, 1], endpoints included.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Index of the interval [xs[k], xs[k+1]] containing x, clamped to valid range.
pub fn interval_index(xs: &[f64], x: f64) -> usize {
    let k = xs.partition_point(|&v| v <= x);
    k.saturating_sub(1).min(xs.len() - 2)
}

/// Piecewise-linear interpolation of (xs, ys) at x, with constant extrapolation.
pub fn lerp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let k = interval_index(xs, x);
    let dx = xs[k + 1] - xs[k];
    if dx <= 0.0 {
        return ys[k];
    }
    let w = ((x - xs[k]) / dx).clamp(0.0, 1.0);
    ys[k] * (1.0 - w) + ys[k + 1] * w
}

/// Row-wise linear interpolation of a sample matrix (rows = samples) at x.
pub fn lerp_rows(xs: &[f64], values: &DMatrix<f64>, x: f64) -> Vec<f64> {
    let k = interval_index(xs, x);
    let dx = xs[k + 1] - xs[k];
    let w = if dx > 0.0 {
        ((x - xs[k]) / dx).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (0..values.ncols())
        .map(|c| values[(k, c)] * (1.0 - w) + values[(k + 1, c)] * w)
        .collect()
}

/// Composite trapezoid quadrature on an arbitrary grid.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..xs.len() - 1 {
        acc += 0.5 * (ys[i] + ys[i + 1]) * (xs[i + 1] - xs[i]);
    }
    acc
}

/// Cumulative trapezoid quadrature; output[0] = 0.
pub fn cumtrapz(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    out.push(0.0);
    let mut acc = 0.0;
    for i in 0..xs.len() - 1 {
        acc += 0.5 * (ys[i] + ys[i + 1]) * (xs[i + 1] - xs[i]);
        out.push(acc);
    }
    out
}

/// L2 inner product of two scalar sample vectors under the piecewise-linear
/// model: the product of two linears is integrated exactly on each interval.
pub fn l2_inner(xs: &[f64], f: &[f64], g: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..xs.len() - 1 {
        let dx = xs[i + 1] - xs[i];
        acc += dx / 6.0
            * (2.0 * f[i] * g[i] + f[i] * g[i + 1] + f[i + 1] * g[i] + 2.0 * f[i + 1] * g[i + 1]);
    }
    acc
}

/// L2 inner product of two vector-valued sample matrices (rows = samples).
pub fn l2_inner_rows(xs: &[f64], f: &DMatrix<f64>, g: &DMatrix<f64>) -> f64 {
    let mut acc = 0.0;
    for i in 0..xs.len() - 1 {
        let dx = xs[i + 1] - xs[i];
        for c in 0..f.ncols() {
            let (f0, f1) = (f[(i, c)], f[(i + 1, c)]);
            let (g0, g1) = (g[(i, c)], g[(i + 1, c)]);
            acc += dx / 6.0 * (2.0 * f0 * g0 + f0 * g1 + f1 * g0 + 2.0 * f1 * g1);
        }
    }
    acc
}

pub fn l2_norm_rows(xs: &[f64], f: &DMatrix<f64>) -> f64 {
    l2_inner_rows(xs, f, f).max(0.0).sqrt()
}

pub fn l2_dist_rows(xs: &[f64], f: &DMatrix<f64>, g: &DMatrix<f64>) -> f64 {
    let diff = f - g;
    l2_norm_rows(xs, &diff)
}

pub fn l2_norm(xs: &[f64], f: &[f64]) -> f64 {
    l2_inner(xs, f, f).max(0.0).sqrt()
}

/// Finite-difference derivative samples: central in the interior, one-sided
/// (second order) at the endpoints. Grid may be non-uniform.
pub fn finite_diff(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    assert!(n >= 3);
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = xs[i] - xs[i - 1];
        let h1 = xs[i + 1] - xs[i];
        // three-point formula, exact for quadratics on non-uniform grids
        out[i] = (ys[i + 1] * h0 * h0 - ys[i - 1] * h1 * h1
            + ys[i] * (h1 * h1 - h0 * h0))
            / (h0 * h1 * (h0 + h1));
    }
    let (h0, h1) = (xs[1] - xs[0], xs[2] - xs[1]);
    out[0] = (-ys[2] * h0 * h0 + ys[1] * (h0 + h1) * (h0 + h1)
        - ys[0] * (h1 * h1 + 2.0 * h0 * h1))
        / (h0 * h1 * (h0 + h1));
    let (g0, g1) = (xs[n - 2] - xs[n - 3], xs[n - 1] - xs[n - 2]);
    out[n - 1] = (ys[n - 3] * g1 * g1 - ys[n - 2] * (g0 + g1) * (g0 + g1)
        + ys[n - 1] * (g0 * g0 + 2.0 * g0 * g1))
        / (g0 * g1 * (g0 + g1));
    out
}

/// Monotone piecewise-cubic (Fritsch-Carlson) interpolant. Preserves the
/// monotonicity of the data, which linear-slope cubic Hermite does not.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn fit(xs: &[f64], ys: &[f64]) -> Self {
        let n = xs.len();
        assert!(n >= 2);
        let deltas: Vec<f64> = (0..n - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();
        let mut m = vec![0.0; n];
        m[0] = deltas[0];
        m[n - 1] = deltas[n - 2];
        for i in 1..n - 1 {
            if deltas[i - 1] * deltas[i] <= 0.0 {
                m[i] = 0.0;
            } else {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                // weighted harmonic mean keeps the interpolant monotone
                let w0 = 2.0 * h1 + h0;
                let w1 = h1 + 2.0 * h0;
                m[i] = (w0 + w1) / (w0 / deltas[i - 1] + w1 / deltas[i]);
            }
        }
        MonotoneCubic {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            slopes: m,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = interval_index(&self.xs, x);
        let h = self.xs[k + 1] - self.xs[k];
        let t = ((x - self.xs[k]) / h).clamp(0.0, 1.0);
        let (y0, y1) = (self.ys[k], self.ys[k + 1]);
        let (m0, m1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let k = interval_index(&self.xs, x);
        let h = self.xs[k + 1] - self.xs[k];
        let t = ((x - self.xs[k]) / h).clamp(0.0, 1.0);
        let (y0, y1) = (self.ys[k], self.ys[k + 1]);
        let (m0, m1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        let t2 = t * t;
        let d = (6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1;
        d / h
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
