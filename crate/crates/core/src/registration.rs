//! Elastic registration of curve pairs under the three representations.
//!
//! The SRVF objective alternates a Procrustes rotation with a dynamic
//! programming warp until the cost stops decreasing. The SRC and
//! arc-length objectives need a single DP pass each: the former because
//! curvatures are already rotation invariant, the latter because it
//! matches unparametrized curvature profiles directly.
//!
//! DP solutions are polished by a local descent on the node values of a
//! smooth warp, which removes the cost floor imposed by the finite
//! lattice slope set.

use nalgebra::DMatrix;

use crate::curve::{DiscreteCurve, Warping};
use crate::dp::dp_warp;
use crate::error::Result;
use crate::numeric::{lerp_rows, uniform_grid};
use crate::src_repr::{SrcRepr, ThetaRepr};
use crate::srvf::srvf_transform;

/// Knobs for the registration solvers.
#[derive(Debug, Clone)]
pub struct RegistrationConfig {
    /// Uniform grid size used for the DP lattice.
    pub dp_grid: usize,
    /// Iteration cap for the alternating SRVF solver.
    pub max_iter: usize,
    /// Stop when the cost decrease falls below this.
    pub tol: f64,
}

impl Default for RegistrationConfig {
    fn default() -> Self {
        RegistrationConfig {
            dp_grid: 256,
            max_iter: 20,
            tol: 1e-8,
        }
    }
}

/// Registration output: the warp acting on the second argument, the
/// rotation (SRVF objective only) and the attained cost. `cost_history`
/// records the cost after every alternation step.
#[derive(Debug, Clone)]
pub struct RegistrationResult {
    pub warp: Warping,
    pub rotation: Option<DMatrix<f64>>,
    pub cost: f64,
    pub iterations: usize,
    pub cost_history: Vec<f64>,
}

/// Linear resampling of a curve onto a uniform grid of n points, keeping
/// the original parametrization.
pub fn resample_uniform(curve: &DiscreteCurve, n: usize) -> Result<DiscreteCurve> {
    let grid = uniform_grid(n);
    let mut pts = DMatrix::zeros(n, curve.dim());
    for (i, &t) in grid.iter().enumerate() {
        let p = lerp_rows(curve.grid(), curve.points(), t);
        for (c, v) in p.iter().enumerate() {
            pts[(i, c)] = *v;
        }
    }
    DiscreteCurve::new(grid, pts)
}

/// Cross-covariance of q0 against the path-warped q1 under the exact
/// quadrature of the lattice-path cost, so that the Procrustes step
/// minimizes the same discrete functional as the DP step.
///
/// Every lattice segment contributes trapezoid samples of
/// sqrt(slope) q1(h(t)) at the covered grid points; boundary nodes appear
/// once per adjacent segment because the slope jumps there.
fn path_covariance(
    grid: &[f64],
    q0: &DMatrix<f64>,
    q1: &DMatrix<f64>,
    path: &[(usize, usize)],
) -> DMatrix<f64> {
    let d = q0.ncols();
    let mut m = DMatrix::zeros(d, d);
    for w in path.windows(2) {
        let (i0, j0) = w[0];
        let (i1, j1) = w[1];
        let (t0, t1) = (grid[i0], grid[i1]);
        let (u0, u1) = (grid[j0], grid[j1]);
        let slope = (u1 - u0) / (t1 - t0);
        let sqrt_slope = slope.sqrt();
        for k in i0..=i1 {
            let t = grid[k];
            let h = u0 + slope * (t - t0);
            let y = lerp_rows(grid, q1, h);
            // trapezoid weight within the segment
            let mut weight = 0.0;
            if k > i0 {
                weight += 0.5 * (grid[k] - grid[k - 1]);
            }
            if k < i1 {
                weight += 0.5 * (grid[k + 1] - grid[k]);
            }
            for a in 0..d {
                for b in 0..d {
                    m[(a, b)] += weight * q0[(k, a)] * sqrt_slope * y[b];
                }
            }
        }
    }
    m
}

/// L2 cost of warping f1 onto f0 as a half density, under the smooth
/// (monotone-cubic) interpolant of the warp rather than the lattice
/// slopes.
fn smooth_warp_cost(grid: &[f64], f0: &DMatrix<f64>, f1: &DMatrix<f64>, warp: &Warping) -> f64 {
    let interp = warp.interpolant();
    let n = grid.len();
    let mut total = 0.0;
    for i in 0..n {
        let h = interp.eval(grid[i]).clamp(0.0, 1.0);
        let factor = interp.deriv(grid[i]).max(0.0).sqrt();
        let row = lerp_rows(grid, f1, h);
        let mut r2 = 0.0;
        for c in 0..f0.ncols() {
            let r = f0[(i, c)] - factor * row[c];
            r2 += r * r;
        }
        let mut w = 0.0;
        if i > 0 {
            w += 0.5 * (grid[i] - grid[i - 1]);
        }
        if i + 1 < n {
            w += 0.5 * (grid[i + 1] - grid[i]);
        }
        total += w * r2;
    }
    total
}

/// Local refinement of a DP warp against the smooth cost.
///
/// The lattice slope set is coarse (ratios of integers up to 4), so the
/// DP optimum approximates a smooth warp by chattering between admissible
/// slopes; the sqrt(slope) half-density factor then carries an O(1)
/// pointwise error that does not vanish with grid refinement. Descending
/// on the node values of a monotone-cubic warp initialized from the DP
/// path removes that floor.
fn refine_warp(grid: &[f64], f0: &DMatrix<f64>, f1: &DMatrix<f64>, init: &Warping) -> Warping {
    // coarse-to-fine: coordinate descent couples neighboring nodes, so
    // move mass globally on few nodes before polishing on many
    let m_final = (grid.len() / 8).max(16) + 1;
    let mut levels = vec![m_final];
    while *levels.last().unwrap() > 9 {
        levels.push((levels.last().unwrap() - 1) / 2 + 1);
    }
    levels.reverse();

    let mut current: Warping = init.clone();
    for &m in &levels {
        let u = uniform_grid(m);
        let mut v: Vec<f64> = u.iter().map(|&x| current.eval(x)).collect();
        v[0] = 0.0;
        v[m - 1] = 1.0;
        for k in 1..m {
            if v[k] <= v[k - 1] {
                v[k] = v[k - 1] + 1e-9;
            }
        }
        let eval = |v: &[f64]| -> f64 {
            match Warping::new(u.clone(), v.to_vec()) {
                Ok(w) => smooth_warp_cost(grid, f0, f1, &w),
                Err(_) => f64::INFINITY,
            }
        };
        let mut best = eval(&v);
        let margin = 1e-6;
        for sweep in 0..10 {
            let before = best;
            // alternate sweep direction so corrections propagate both ways
            let order: Vec<usize> = if sweep % 2 == 0 {
                (1..m - 1).collect()
            } else {
                (1..m - 1).rev().collect()
            };
            for k in order {
                let (lo, hi) = (v[k - 1] + margin, v[k + 1] - margin);
                if lo >= hi {
                    continue;
                }
                // golden-section search in the monotonicity window
                let phi = 0.618_033_988_749_894_9;
                let mut trial = v.to_vec();
                let (mut a, mut b) = (lo, hi);
                let mut x1 = b - phi * (b - a);
                let mut x2 = a + phi * (b - a);
                trial[k] = x1;
                let mut fx1 = eval(&trial);
                trial[k] = x2;
                let mut fx2 = eval(&trial);
                for _ in 0..24 {
                    if fx1 < fx2 {
                        b = x2;
                        x2 = x1;
                        fx2 = fx1;
                        x1 = b - phi * (b - a);
                        trial[k] = x1;
                        fx1 = eval(&trial);
                    } else {
                        a = x1;
                        x1 = x2;
                        fx1 = fx2;
                        x2 = a + phi * (b - a);
                        trial[k] = x2;
                        fx2 = eval(&trial);
                    }
                }
                let (x_min, f_min) = if fx1 < fx2 { (x1, fx1) } else { (x2, fx2) };
                if f_min < best {
                    v[k] = x_min;
                    best = f_min;
                }
            }
            if before - best < 1e-6 * best.max(1e-12) {
                break;
            }
        }
        match Warping::new(u, v) {
            Ok(w) => current = w,
            Err(_) => return init.clone(),
        }
    }
    // hand back the refinement on the full data grid so downstream
    // consumers see the same grid the DP warp had
    let interp = current.interpolant();
    let mut dense: Vec<f64> = grid.iter().map(|&t| interp.eval(t).clamp(0.0, 1.0)).collect();
    dense[0] = 0.0;
    let n = dense.len();
    dense[n - 1] = 1.0;
    for k in 1..n {
        if dense[k] <= dense[k - 1] {
            dense[k] = dense[k - 1] + 1e-12;
        }
    }
    Warping::new(grid.to_vec(), dense).unwrap_or_else(|_| init.clone())
}

/// Half-density warp action sampled on the data grid.
fn warp_rows(grid: &[f64], f1: &DMatrix<f64>, warp: &Warping) -> DMatrix<f64> {
    let interp = warp.interpolant();
    DMatrix::from_fn(grid.len(), f1.ncols(), |i, c| {
        let h = interp.eval(grid[i]).clamp(0.0, 1.0);
        let factor = interp.deriv(grid[i]).max(0.0).sqrt();
        factor * lerp_rows(grid, f1, h)[c]
    })
}

/// Cross-covariance under the smooth quadrature: M_ab = int f0_a g_b dt.
fn smooth_covariance(grid: &[f64], f0: &DMatrix<f64>, g: &DMatrix<f64>) -> DMatrix<f64> {
    let d = f0.ncols();
    let n = grid.len();
    let mut m = DMatrix::zeros(d, d);
    for i in 0..n {
        let mut w = 0.0;
        if i > 0 {
            w += 0.5 * (grid[i] - grid[i - 1]);
        }
        if i + 1 < n {
            w += 0.5 * (grid[i + 1] - grid[i]);
        }
        for a in 0..d {
            for b in 0..d {
                m[(a, b)] += w * f0[(i, a)] * g[(i, b)];
            }
        }
    }
    m
}

/// Joint rotation/warp registration of the SRVF objective
/// min_{O, h} int |q0 - O (q1 * h)|^2 by coordinate descent.
///
/// Both sub-solvers exactly minimize the same discretized cost (the
/// lattice-path functional of [`dp_warp`]), so the recorded cost history
/// is non-increasing; the solver stops when the decrease drops below
/// `tol`.
pub fn register_srvf(
    curve0: &DiscreteCurve,
    curve1: &DiscreteCurve,
    config: &RegistrationConfig,
) -> Result<RegistrationResult> {
    let n = config.dp_grid;
    let grid = uniform_grid(n);
    let q0 = srvf_transform(&resample_uniform(curve0, n)?)?;
    let q1 = srvf_transform(&resample_uniform(curve1, n)?)?;

    let mut warp = Warping::identity(n);
    let mut path: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
    let mut rotation = DMatrix::identity(curve0.dim(), curve0.dim());
    let mut cost = f64::INFINITY;
    let mut history = Vec::new();
    let mut iterations = 0;

    for _ in 0..config.max_iter {
        iterations += 1;
        // exact rotation for the current path
        let m = path_covariance(&grid, q0.q(), q1.q(), &path);
        rotation = crate::procrustes::rotation_from_covariance(&m).rotation;
        // exact path for the current rotation
        let q1_rot = q1.rotated(&rotation);
        let dp = dp_warp(&grid, q0.q(), &grid, q1_rot.q(), 0.0)?;
        warp = dp.warp;
        path = dp.path;
        history.push(dp.cost);
        if cost - dp.cost < config.tol {
            cost = dp.cost.min(cost);
            break;
        }
        cost = dp.cost;
    }

    // polish: the alternation's cost floor is set by the lattice slope
    // set, so refine warp and rotation against the smooth quadrature
    if cost > 1e-12 {
        let mut refined = warp.clone();
        for _ in 0..2 {
            let q1_rot = q1.rotated(&rotation);
            refined = refine_warp(&grid, q0.q(), q1_rot.q(), &refined);
            let warped = warp_rows(&grid, q1.q(), &refined);
            let m = smooth_covariance(&grid, q0.q(), &warped);
            rotation = crate::procrustes::rotation_from_covariance(&m).rotation;
        }
        let q1_rot = q1.rotated(&rotation);
        let refined_cost = smooth_warp_cost(&grid, q0.q(), q1_rot.q(), &refined);
        let lattice_cost = smooth_warp_cost(&grid, q0.q(), q1_rot.q(), &warp);
        if refined_cost < lattice_cost {
            warp = refined;
            cost = refined_cost;
        } else {
            cost = cost.min(lattice_cost);
        }
    }

    Ok(RegistrationResult {
        warp,
        rotation: Some(rotation),
        cost,
        iterations,
        cost_history: history,
    })
}

/// Stack the SRC components and psi into one matrix for the DP integrand.
fn src_stack(repr: &SrcRepr) -> DMatrix<f64> {
    let n = repr.grid().len();
    let m = repr.c().ncols();
    DMatrix::from_fn(n, m + 1, |i, col| {
        if col < m {
            repr.c()[(i, col)]
        } else {
            repr.psi()[i]
        }
    })
}

/// SRC registration: a single DP pass on the stacked integrand (c, psi),
/// both components transforming as half densities. No rotation is needed
/// because curvatures are rotation invariant.
pub fn register_src(
    repr0: &SrcRepr,
    repr1: &SrcRepr,
    config: &RegistrationConfig,
) -> Result<RegistrationResult> {
    let f0 = src_stack(repr0);
    let f1 = src_stack(repr1);
    let (f0, g0) = resample_rows(repr0.grid(), &f0, config.dp_grid);
    let (f1, g1) = resample_rows(repr1.grid(), &f1, config.dp_grid);
    let dp = dp_warp(&g0, &f0, &g1, &f1, 0.0)?;
    let mut warp = dp.warp;
    let mut cost = dp.cost;
    if cost > 1e-12 {
        let refined = refine_warp(&g0, &f0, &f1, &warp);
        let refined_cost = smooth_warp_cost(&g0, &f0, &f1, &refined);
        let lattice_cost = smooth_warp_cost(&g0, &f0, &f1, &warp);
        if refined_cost < lattice_cost {
            warp = refined;
            cost = refined_cost;
        } else {
            cost = cost.min(lattice_cost);
        }
    }
    Ok(RegistrationResult {
        warp,
        rotation: None,
        cost,
        iterations: 1,
        cost_history: vec![dp.cost],
    })
}

/// Arc-length registration of unparametrized curvature profiles:
/// DP on theta / sqrt(|theta|) as a function of arc length, with the
/// |1 - gammadot|^2 roughness penalty at unit weight.
pub fn register_src_arclength(
    repr0: &ThetaRepr,
    repr1: &ThetaRepr,
    config: &RegistrationConfig,
) -> Result<RegistrationResult> {
    let n = config.dp_grid;
    let grid = uniform_grid(n);
    let f0 = theta_half_power(repr0, &grid);
    let f1 = theta_half_power(repr1, &grid);
    let dp = dp_warp(&grid, &f0, &grid, &f1, 1.0)?;
    Ok(RegistrationResult {
        warp: dp.warp,
        rotation: None,
        cost: dp.cost,
        iterations: 1,
        cost_history: vec![dp.cost],
    })
}

/// Samples of theta(s) / sqrt(|theta(s)|), extended by zero on flat spans.
fn theta_half_power(repr: &ThetaRepr, s_grid: &[f64]) -> DMatrix<f64> {
    let m = repr.theta().components();
    DMatrix::from_fn(s_grid.len(), m, |i, col| {
        let th = repr.theta().eval(s_grid[i]);
        let norm = th.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-300 {
            th[col] / norm.sqrt()
        } else {
            0.0
        }
    })
}

fn resample_rows(grid: &[f64], rows: &DMatrix<f64>, n: usize) -> (DMatrix<f64>, Vec<f64>) {
    let out_grid = uniform_grid(n);
    let mut out = DMatrix::zeros(n, rows.ncols());
    for (i, &t) in out_grid.iter().enumerate() {
        let row = lerp_rows(grid, rows, t);
        for (c, v) in row.iter().enumerate() {
            out[(i, c)] = *v;
        }
    }
    (out, out_grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvatures::FrenetCurvatures;
    use crate::curve::{arc_length, normalize};
    use crate::rotation::{so_exp, SkewMatrix};
    use crate::src_repr::src_transform;

    fn wavy_curve(n: usize, seed: u64) -> DiscreteCurve {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.4..0.4)).collect();
        let grid = uniform_grid(n);
        let pts = DMatrix::from_fn(n, 3, |i, c| {
            let t = grid[i];
            match c {
                0 => t,
                1 => a[0] * (std::f64::consts::TAU * t).sin() + a[1] * t,
                _ => a[2] * (std::f64::consts::PI * t).cos(),
            }
        });
        normalize(&DiscreteCurve::new(grid, pts).unwrap()).unwrap()
    }

    fn smooth_warp(n: usize, strength: f64) -> Warping {
        let grid = uniform_grid(n);
        let values: Vec<f64> = grid
            .iter()
            .map(|&u| u + strength * (std::f64::consts::PI * u).sin().powi(2) * u * (1.0 - u))
            .collect();
        Warping::new(grid, values).unwrap()
    }

    #[test]
    fn self_registration_is_identity() {
        let c = wavy_curve(257, 1);
        let res = register_srvf(&c, &c, &RegistrationConfig::default()).unwrap();
        assert!(res.cost < 1e-10, "cost {}", res.cost);
        assert!(res.warp.deviation_from_identity() < 1e-10);
    }

    #[test]
    fn cost_history_is_non_increasing() {
        for seed in 0..5 {
            let c0 = wavy_curve(257, seed);
            let c1 = wavy_curve(257, seed + 100);
            let res = register_srvf(&c0, &c1, &RegistrationConfig::default()).unwrap();
            for w in res.cost_history.windows(2) {
                assert!(
                    w[1] <= w[0] + 1e-12,
                    "seed {seed}: cost increased {} -> {}",
                    w[0],
                    w[1]
                );
            }
        }
    }

    #[test]
    fn recovers_rotation_of_same_curve() {
        let c0 = wavy_curve(257, 3);
        let rot = so_exp(&SkewMatrix::from_frenet_band(&[0.9, -0.3]));
        let c1 = c0.transformed(&rot, &[0.0; 3]);
        let res = register_srvf(&c0, &c1, &RegistrationConfig::default()).unwrap();
        assert!(res.cost < 1e-8, "cost {}", res.cost);
        let rec = res.rotation.unwrap();
        // q1 = rot q0, so the aligning rotation is rot^T ... up to the
        // identity warp; check it inverts the applied rotation
        assert!((rec * rot - DMatrix::identity(3, 3)).norm() < 1e-4);
    }

    #[test]
    fn undoes_synthetic_reparametrization() {
        let c0 = wavy_curve(513, 4);
        let h = smooth_warp(513, 0.6);
        let c1 = c0.reparametrized(&h).unwrap();
        let res = register_srvf(&c0, &c1, &RegistrationConfig::default()).unwrap();
        assert!(res.cost < 2e-3, "cost {}", res.cost);
        // the recovered warp composed with h should be near the identity:
        // c1(res.warp(u)) = c0(h(res.warp(u)))
        let comp = h.compose(&res.warp).unwrap();
        assert!(
            comp.deviation_from_identity() < 0.05,
            "deviation {}",
            comp.deviation_from_identity()
        );
    }

    #[test]
    fn src_self_registration_is_identity() {
        let theta = FrenetCurvatures::from_fn(128, 2, |s| {
            vec![2.0 + (std::f64::consts::TAU * s).sin(), 0.5]
        });
        let c = wavy_curve(257, 6);
        let al = arc_length(&c).unwrap();
        let repr = src_transform(&al, &theta).unwrap();
        let res = register_src(&repr, &repr, &RegistrationConfig::default()).unwrap();
        assert!(res.cost < 1e-10);
        assert!(res.warp.deviation_from_identity() < 1e-10);
        assert!(res.rotation.is_none());
    }

    #[test]
    fn arclength_registration_identical_profiles() {
        let theta = FrenetCurvatures::from_fn(128, 2, |s| vec![3.0 + s, 1.0 - 0.3 * s]);
        let c = wavy_curve(257, 7);
        let al = arc_length(&c).unwrap();
        let r = ThetaRepr::new(&al, theta).unwrap();
        let res = register_src_arclength(&r, &r, &RegistrationConfig::default()).unwrap();
        assert!(res.cost < 1e-10);
        assert!(res.warp.deviation_from_identity() < 1e-10);
    }

    #[test]
    fn registration_cost_roughly_symmetric() {
        let c0 = wavy_curve(257, 8);
        let c1 = wavy_curve(257, 9);
        let cfg = RegistrationConfig::default();
        let fwd = register_srvf(&c0, &c1, &cfg).unwrap();
        let bwd = register_srvf(&c1, &c0, &cfg).unwrap();
        let rel = (fwd.cost - bwd.cost).abs() / fwd.cost.max(bwd.cost).max(1e-12);
        assert!(rel < 0.05, "fwd {} bwd {} rel {rel}", fwd.cost, bwd.cost);
    }
}
