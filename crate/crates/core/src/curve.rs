//! Discrete curves, arc length and warping functions.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numeric::{
    cumtrapz, finite_diff, l2_inner, lerp, lerp_rows, uniform_grid, MonotoneCubic,
};

/// Sampled parametrized curve x(t_i) in R^d on a strictly increasing grid
/// with endpoints 0 and 1. Rows of `points` are samples.
#[derive(Debug, Clone)]
pub struct DiscreteCurve {
    grid: Vec<f64>,
    points: DMatrix<f64>,
}

impl DiscreteCurve {
    pub fn new(grid: Vec<f64>, points: DMatrix<f64>) -> Result<Self> {
        let n = grid.len();
        let d = points.ncols();
        if d < 2 {
            return Err(Error::InvalidInput(format!(
                "ambient dimension must be at least 2, got {d}"
            )));
        }
        if points.nrows() != n {
            return Err(Error::InvalidInput(format!(
                "grid has {n} samples but points has {} rows",
                points.nrows()
            )));
        }
        if n < d + 2 {
            return Err(Error::InvalidInput(format!(
                "need at least d + 2 = {} samples, got {n}",
                d + 2
            )));
        }
        if grid[0] != 0.0 || grid[n - 1] != 1.0 {
            return Err(Error::InvalidInput(
                "grid endpoints must be exactly 0 and 1".into(),
            ));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("grid must be strictly increasing".into()));
        }
        Ok(DiscreteCurve { grid, points })
    }

    /// Curve on a uniform grid from sample points alone.
    pub fn from_points(points: DMatrix<f64>) -> Result<Self> {
        let grid = uniform_grid(points.nrows());
        Self::new(grid, points)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn num_samples(&self) -> usize {
        self.grid.len()
    }

    /// Total polyline length.
    pub fn polyline_length(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.num_samples() - 1 {
            let seg = self.points.row(i + 1) - self.points.row(i);
            acc += seg.norm();
        }
        acc
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        self.points.row(i).iter().copied().collect()
    }

    /// Translate + rotate: a + O x(t). Rotation applied on the right of each
    /// row since rows are points.
    pub fn transformed(&self, rotation: &DMatrix<f64>, translation: &[f64]) -> DiscreteCurve {
        let mut pts = &self.points * rotation.transpose();
        for mut row in pts.row_iter_mut() {
            for (c, t) in translation.iter().enumerate() {
                row[c] += t;
            }
        }
        DiscreteCurve {
            grid: self.grid.clone(),
            points: pts,
        }
    }

    /// Reparametrize the curve by a warping h: samples become x(h(u)) on the
    /// warp's grid.
    pub fn reparametrized(&self, warp: &Warping) -> Result<DiscreteCurve> {
        let mut pts = DMatrix::zeros(warp.grid().len(), self.dim());
        for i in 0..warp.grid().len() {
            let x = warp.values()[i];
            let p = lerp_rows(&self.grid, &self.points, x);
            for (c, v) in p.iter().enumerate() {
                pts[(i, c)] = *v;
            }
        }
        DiscreteCurve::new(warp.grid().to_vec(), pts)
    }
}

/// Normalize a curve to start at the origin with total polyline length 1.
/// The grid is unchanged.
pub fn normalize(curve: &DiscreteCurve) -> Result<DiscreteCurve> {
    let length = curve.polyline_length();
    if length < 1e-12 {
        return Err(Error::DegenerateCurve { length });
    }
    let first = curve.points.row(0).clone_owned();
    let mut pts = curve.points.clone();
    for mut row in pts.row_iter_mut() {
        row -= &first;
        row /= length;
    }
    Ok(DiscreteCurve {
        grid: curve.grid.clone(),
        points: pts,
    })
}

/// Arc-length data of a normalized curve: s(t), its derivative and psi = sqrt(sdot).
#[derive(Debug, Clone)]
pub struct ArcLength {
    grid: Vec<f64>,
    s: Vec<f64>,
    sdot: Vec<f64>,
    psi: Vec<f64>,
}

impl ArcLength {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }
    pub fn s(&self) -> &[f64] {
        &self.s
    }
    pub fn sdot(&self) -> &[f64] {
        &self.sdot
    }
    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    /// s(t) by monotone interpolation.
    pub fn s_at(&self, t: f64) -> f64 {
        lerp(&self.grid, &self.s, t).clamp(0.0, 1.0)
    }

    /// Inverse arc length t(s) by interpolation on the swapped samples.
    pub fn t_at(&self, s: f64) -> f64 {
        lerp(&self.s, &self.grid, s).clamp(0.0, 1.0)
    }
}

/// Arc length by quadrature of the finite-difference speed.
pub fn arc_length(curve: &DiscreteCurve) -> Result<ArcLength> {
    let n = curve.num_samples();
    let d = curve.dim();
    let grid = curve.grid().to_vec();
    // componentwise derivative, then pointwise speed
    let mut deriv = DMatrix::zeros(n, d);
    for c in 0..d {
        let col: Vec<f64> = (0..n).map(|i| curve.points()[(i, c)]).collect();
        let dcol = finite_diff(&grid, &col);
        for i in 0..n {
            deriv[(i, c)] = dcol[i];
        }
    }
    let mut speed: Vec<f64> = (0..n).map(|i| deriv.row(i).norm()).collect();
    for (i, v) in speed.iter().enumerate() {
        if *v < 1e-8 {
            return Err(Error::ZeroSpeed { index: i });
        }
    }
    let mut s = cumtrapz(&grid, &speed);
    let total = s[n - 1];
    if total < 1e-12 {
        return Err(Error::ZeroSpeed { index: 0 });
    }
    for v in s.iter_mut() {
        *v /= total;
    }
    s[n - 1] = 1.0;
    for v in speed.iter_mut() {
        *v /= total;
    }
    let psi: Vec<f64> = speed.iter().map(|v| v.sqrt()).collect();
    Ok(ArcLength {
        grid,
        s,
        sdot: speed,
        psi,
    })
}

/// Resample a curve at n uniform arc-length values. The output has unit
/// (constant) speed up to interpolation error.
pub fn resample_arclength(curve: &DiscreteCurve, n: usize) -> Result<DiscreteCurve> {
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 output samples".into()));
    }
    let al = arc_length(curve)?;
    let out_grid = uniform_grid(n);
    let mut pts = DMatrix::zeros(n, curve.dim());
    for (i, &sv) in out_grid.iter().enumerate() {
        let t = al.t_at(sv);
        let p = lerp_rows(curve.grid(), curve.points(), t);
        for (c, v) in p.iter().enumerate() {
            pts[(i, c)] = *v;
        }
    }
    DiscreteCurve::new(out_grid, pts)
}

/// Discrete orientation-preserving diffeomorphism of [0, 1].
#[derive(Debug, Clone)]
pub struct Warping {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl Warping {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() || grid.len() < 2 {
            return Err(Error::NonMonotoneWarp);
        }
        let n = values.len();
        if values[0].abs() > 1e-12 || (values[n - 1] - 1.0).abs() > 1e-12 {
            return Err(Error::NonMonotoneWarp);
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotoneWarp);
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotoneWarp);
        }
        let mut values = values;
        values[0] = 0.0;
        values[n - 1] = 1.0;
        Ok(Warping { grid, values })
    }

    pub fn identity(n: usize) -> Self {
        let grid = uniform_grid(n);
        Warping {
            values: grid.clone(),
            grid,
        }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Monotone cubic interpolant of the warp.
    pub fn interpolant(&self) -> MonotoneCubic {
        MonotoneCubic::fit(&self.grid, &self.values)
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.interpolant().eval(u).clamp(0.0, 1.0)
    }

    /// Inverse warp by swapping axes.
    pub fn inverse(&self) -> Warping {
        Warping {
            grid: self.values.clone(),
            values: self.grid.clone(),
        }
    }

    /// Composition self(other(u)) sampled on other's grid.
    pub fn compose(&self, other: &Warping) -> Result<Warping> {
        let interp = self.interpolant();
        let values: Vec<f64> = other
            .values
            .iter()
            .map(|&v| interp.eval(v).clamp(0.0, 1.0))
            .collect();
        Warping::new(other.grid.clone(), values)
    }

    /// Maximum deviation from the identity warp.
    pub fn deviation_from_identity(&self) -> f64 {
        self.grid
            .iter()
            .zip(&self.values)
            .map(|(g, v)| (g - v).abs())
            .fold(0.0, f64::max)
    }
}

/// How a warping acts on function samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WarpMode {
    /// Plain composition f(h(t)).
    Plain,
    /// Half-density group action sqrt(hdot(t)) f(h(t)); preserves L2 norms.
    HalfDensity,
}

/// Apply a warping to vector-valued function samples (rows = samples on
/// `grid`). The result is sampled on the warp's grid.
pub fn apply_warp(
    grid: &[f64],
    samples: &DMatrix<f64>,
    warp: &Warping,
    mode: WarpMode,
) -> DMatrix<f64> {
    let interp = warp.interpolant();
    let n = warp.grid().len();
    let mut out = DMatrix::zeros(n, samples.ncols());
    for (i, &u) in warp.grid().iter().enumerate() {
        let h = interp.eval(u).clamp(0.0, 1.0);
        let row = lerp_rows(grid, samples, h);
        let factor = match mode {
            WarpMode::Plain => 1.0,
            WarpMode::HalfDensity => interp.deriv(u).max(0.0).sqrt(),
        };
        for (c, v) in row.iter().enumerate() {
            out[(i, c)] = factor * v;
        }
    }
    out
}

/// Scalar convenience wrapper around [`apply_warp`].
pub fn apply_warp_scalar(grid: &[f64], samples: &[f64], warp: &Warping, mode: WarpMode) -> Vec<f64> {
    let m = DMatrix::from_column_slice(samples.len(), 1, samples);
    let out = apply_warp(grid, &m, warp, mode);
    out.column(0).iter().copied().collect()
}

/// L2 inner product of psi-type scalar samples, used across the crate.
pub fn psi_inner(grid: &[f64], a: &[f64], b: &[f64]) -> f64 {
    l2_inner(grid, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn segment(from: [f64; 2], to: [f64; 2], n: usize) -> DiscreteCurve {
        let grid = uniform_grid(n);
        let pts = DMatrix::from_fn(n, 2, |i, c| {
            let t = grid[i];
            from[c] * (1.0 - t) + to[c] * t
        });
        DiscreteCurve::new(grid, pts).unwrap()
    }

    #[test]
    fn normalize_unit_segment_is_fixed_point() {
        let c = segment([0.0, 0.0], [1.0, 0.0], 16);
        let out = normalize(&c).unwrap();
        assert_relative_eq!(out.polyline_length(), 1.0, epsilon = 1e-12);
        for i in 0..c.num_samples() {
            assert_relative_eq!(out.points()[(i, 0)], c.points()[(i, 0)], epsilon = 1e-12);
            assert_relative_eq!(out.points()[(i, 1)], c.points()[(i, 1)], epsilon = 1e-12);
        }
    }

    #[test]
    fn normalize_translates_and_scales() {
        let c = segment([3.0, 3.0], [3.0, 5.0], 16);
        let out = normalize(&c).unwrap();
        assert_relative_eq!(out.points()[(0, 0)], 0.0, epsilon = 1e-14);
        assert_relative_eq!(out.points()[(0, 1)], 0.0, epsilon = 1e-14);
        assert_relative_eq!(out.polyline_length(), 1.0, epsilon = 1e-12);
        let last = out.point(out.num_samples() - 1);
        assert_relative_eq!(last[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(last[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn normalize_circle_arc_matches_polyline_oracle() {
        // radius-2 arc over angle pi
        let n = 400;
        let grid = uniform_grid(n);
        let pts = DMatrix::from_fn(n, 2, |i, c| {
            let a = grid[i] * std::f64::consts::PI;
            if c == 0 {
                2.0 * a.cos()
            } else {
                2.0 * a.sin()
            }
        });
        let c = DiscreteCurve::new(grid, pts).unwrap();
        let raw_len = c.polyline_length();
        assert_relative_eq!(raw_len, 2.0 * std::f64::consts::PI, epsilon = 1e-3);
        let out = normalize(&c).unwrap();
        assert_relative_eq!(out.polyline_length(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn normalize_rejects_coincident_points() {
        let grid = uniform_grid(8);
        let pts = DMatrix::from_element(8, 2, 0.5);
        let c = DiscreteCurve::new(grid, pts).unwrap();
        assert!(matches!(
            normalize(&c),
            Err(Error::DegenerateCurve { .. })
        ));
    }

    #[test]
    fn arc_length_unit_speed_is_identity() {
        let c = segment([0.0, 0.0], [1.0, 0.0], 64);
        let al = arc_length(&c).unwrap();
        for (t, s) in al.grid().iter().zip(al.s()) {
            assert_relative_eq!(s, t, epsilon = 1e-10);
        }
        for p in al.psi() {
            assert_relative_eq!(*p, 1.0, epsilon = 1e-8);
        }
        // unit-length normalization of psi
        assert_relative_eq!(l2_inner(al.grid(), al.psi(), al.psi()), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn arc_length_quadratic_parametrization() {
        // x(t) = (t^2, 0) scaled to unit length: sdot = 2t, s = t^2
        let n = 513;
        let grid = uniform_grid(n);
        let pts = DMatrix::from_fn(n, 2, |i, c| if c == 0 { grid[i] * grid[i] } else { 0.0 });
        let c = DiscreteCurve::new(grid.clone(), pts).unwrap();
        // speed vanishes at t = 0, so shift the domain slightly via 0.05 + 0.95 t^2
        let pts2 = DMatrix::from_fn(n, 2, |i, col| {
            if col == 0 {
                0.05 * grid[i] + 0.95 * grid[i] * grid[i]
            } else {
                0.0
            }
        });
        drop(c);
        let c2 = DiscreteCurve::new(grid.clone(), pts2).unwrap();
        let al = arc_length(&c2).unwrap();
        for (i, t) in grid.iter().enumerate().step_by(32) {
            let expect = 0.05 * t + 0.95 * t * t;
            assert_relative_eq!(al.s()[i], expect, epsilon = 1e-5);
        }
    }

    #[test]
    fn arc_length_zero_speed_rejected() {
        let n = 64;
        let grid = uniform_grid(n);
        // stationary interval in the middle
        let pts = DMatrix::from_fn(n, 2, |i, c| {
            let t = grid[i];
            let v = if t < 0.4 {
                t
            } else if t < 0.6 {
                0.4
            } else {
                t - 0.2
            };
            if c == 0 {
                v
            } else {
                0.0
            }
        });
        let c = DiscreteCurve::new(grid, pts).unwrap();
        assert!(matches!(arc_length(&c), Err(Error::ZeroSpeed { .. })));
    }

    #[test]
    fn resample_preserves_unit_speed_curve() {
        let c = segment([0.0, 0.0], [0.6, 0.8], 65);
        let out = resample_arclength(&c, 65).unwrap();
        for i in 0..65 {
            assert_relative_eq!(out.points()[(i, 0)], c.points()[(i, 0)], epsilon = 1e-6);
            assert_relative_eq!(out.points()[(i, 1)], c.points()[(i, 1)], epsilon = 1e-6);
        }
    }

    #[test]
    fn resample_evens_out_spacing() {
        let n = 257;
        let grid = uniform_grid(n);
        let pts = DMatrix::from_fn(n, 2, |i, c| {
            let t = grid[i];
            let u = 0.1 * t + 0.9 * t * t; // accelerating parametrization
            if c == 0 {
                u
            } else {
                0.0
            }
        });
        let c = DiscreteCurve::new(grid, pts).unwrap();
        let out = resample_arclength(&c, 129).unwrap();
        let mut min_seg = f64::INFINITY;
        let mut max_seg: f64 = 0.0;
        for i in 0..out.num_samples() - 1 {
            let seg = (out.points().row(i + 1) - out.points().row(i)).norm();
            min_seg = min_seg.min(seg);
            max_seg = max_seg.max(seg);
        }
        assert!(max_seg / min_seg < 1.0 + 1e-3, "ratio {}", max_seg / min_seg);
    }

    #[test]
    fn resample_minimal_grid_gives_endpoints() {
        let c = segment([0.0, 0.0], [1.0, 0.0], 32);
        let out = resample_arclength(&c, 4).unwrap();
        assert_eq!(out.num_samples(), 4);
        assert_relative_eq!(out.points()[(3, 0)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn warp_identity_leaves_samples_unchanged() {
        let n = 64;
        let grid = uniform_grid(n);
        let f = DMatrix::from_fn(n, 2, |i, c| (grid[i] * (c as f64 + 1.0)).sin());
        let h = Warping::identity(n);
        let plain = apply_warp(&grid, &f, &h, WarpMode::Plain);
        let half = apply_warp(&grid, &f, &h, WarpMode::HalfDensity);
        for i in 0..n {
            for c in 0..2 {
                assert_relative_eq!(plain[(i, c)], f[(i, c)], epsilon = 1e-10);
                assert_relative_eq!(half[(i, c)], f[(i, c)], epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn half_density_warp_of_constant_is_sqrt_hdot() {
        // h(u) = u^2, f = 1 -> sqrt(2u)
        let n = 201;
        let grid = uniform_grid(n);
        let values: Vec<f64> = grid.iter().map(|u| u * u).collect();
        let h = Warping::new(grid.clone(), values).unwrap();
        let f = DMatrix::from_element(n, 1, 1.0);
        let out = apply_warp(&grid, &f, &h, WarpMode::HalfDensity);
        // the monotone-cubic slope is only approximate very close to u = 0
        // and at the one-sided endpoint estimate
        for (i, u) in grid.iter().enumerate().skip(20).step_by(20).take(9) {
            assert_relative_eq!(out[(i, 0)], (2.0 * u).sqrt(), epsilon = 1e-3);
        }
    }

    #[test]
    fn nonmonotone_warp_rejected() {
        let grid = uniform_grid(5);
        let values = vec![0.0, 0.5, 0.4, 0.8, 1.0];
        assert!(matches!(
            Warping::new(grid, values),
            Err(Error::NonMonotoneWarp)
        ));
    }
}
