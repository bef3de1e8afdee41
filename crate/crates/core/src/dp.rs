//! Dynamic programming over monotone lattice paths for elastic registration.
//!
//! The warp class is the set of piecewise-linear paths through an N0 x N1
//! lattice built from neighbor steps (a, b) with a, b in 1..=4 coprime.
//! Each lattice segment carries the discretized cost
//! int |f0(t) - sqrt(hdot) f1(h(t))|^2 dt plus an optional |1 - hdot|^2
//! penalty, with hdot constant on the segment.

use nalgebra::DMatrix;

use crate::curve::Warping;
use crate::error::{Error, Result};
use crate::numeric::lerp_rows;

/// Coprime neighbor steps (di, dj) with entries in 1..=4.
pub const STEPS: [(usize, usize); 11] = [
    (1, 1),
    (1, 2),
    (1, 3),
    (1, 4),
    (2, 1),
    (3, 1),
    (4, 1),
    (2, 3),
    (3, 2),
    (3, 4),
    (4, 3),
];

/// Cost of one lattice segment from (i0, j0) to (i0+di, j0+dj).
///
/// The integrand is sampled at the f0 grid points covered by the segment and
/// integrated by the trapezoid rule; hdot is the segment's constant slope.
fn segment_cost(
    grid0: &[f64],
    f0: &DMatrix<f64>,
    grid1: &[f64],
    f1: &DMatrix<f64>,
    penalty_weight: f64,
    i0: usize,
    j0: usize,
    di: usize,
    dj: usize,
) -> f64 {
    let t_lo = grid0[i0];
    let t_hi = grid0[i0 + di];
    let u_lo = grid1[j0];
    let u_hi = grid1[j0 + dj];
    let slope = (u_hi - u_lo) / (t_hi - t_lo);
    let sqrt_slope = slope.sqrt();
    let m = f0.ncols();

    let mut acc = 0.0;
    let mut prev = 0.0;
    for k in 0..=di {
        let t = grid0[i0 + k];
        let u = u_lo + slope * (t - t_lo);
        let f1u = lerp_rows(grid1, f1, u);
        let mut val = 0.0;
        for c in 0..m {
            let e = f0[(i0 + k, c)] - sqrt_slope * f1u[c];
            val += e * e;
        }
        if k > 0 {
            acc += 0.5 * (prev + val) * (grid0[i0 + k] - grid0[i0 + k - 1]);
        }
        prev = val;
    }
    if penalty_weight > 0.0 {
        let pd = 1.0 - slope;
        acc += penalty_weight * pd * pd * (t_hi - t_lo);
    }
    acc
}

/// Result of a DP run: the warp, its discretized cost, and the lattice path.
#[derive(Debug, Clone)]
pub struct DpResult {
    pub warp: Warping,
    pub cost: f64,
    pub path: Vec<(usize, usize)>,
}

/// Globally optimal monotone lattice warp for the integrand pair (f0, f1).
///
/// Rows of f0/f1 are samples on grid0/grid1. The returned warp is sampled on
/// grid0, with values linearly interpolated between visited lattice nodes.
pub fn dp_warp(
    grid0: &[f64],
    f0: &DMatrix<f64>,
    grid1: &[f64],
    f1: &DMatrix<f64>,
    penalty_weight: f64,
) -> Result<DpResult> {
    let n0 = grid0.len();
    let n1 = grid1.len();
    if n0 < 8 || n1 < 8 {
        return Err(Error::GridTooCoarse { n: n0.min(n1) });
    }
    let inf = f64::INFINITY;
    let mut cost = vec![inf; n0 * n1];
    let mut back = vec![usize::MAX; n0 * n1];
    cost[0] = 0.0;
    for i in 0..n0 {
        for j in 0..n1 {
            let idx = i * n1 + j;
            if cost[idx] == inf {
                continue;
            }
            let here = cost[idx];
            for (k, &(di, dj)) in STEPS.iter().enumerate() {
                let (ni, nj) = (i + di, j + dj);
                if ni >= n0 || nj >= n1 {
                    continue;
                }
                let c = here
                    + segment_cost(grid0, f0, grid1, f1, penalty_weight, i, j, di, dj);
                let nidx = ni * n1 + nj;
                if c < cost[nidx] {
                    cost[nidx] = c;
                    back[nidx] = k;
                }
            }
        }
    }
    let final_idx = (n0 - 1) * n1 + (n1 - 1);
    if cost[final_idx] == inf {
        return Err(Error::GridTooCoarse { n: n0.min(n1) });
    }
    // trace the path back
    let mut path = vec![(n0 - 1, n1 - 1)];
    let (mut i, mut j) = (n0 - 1, n1 - 1);
    while (i, j) != (0, 0) {
        let k = back[i * n1 + j];
        let (di, dj) = STEPS[k];
        i -= di;
        j -= dj;
        path.push((i, j));
    }
    path.reverse();

    // warp values at every f0 grid point, linear between path nodes
    let mut values = vec![0.0; n0];
    for w in path.windows(2) {
        let (i0, j0) = w[0];
        let (i1, j1) = w[1];
        let (t0, t1) = (grid0[i0], grid0[i1]);
        let (u0, u1) = (grid1[j0], grid1[j1]);
        for k in i0..=i1 {
            let t = grid0[k];
            values[k] = u0 + (u1 - u0) * (t - t0) / (t1 - t0);
        }
    }
    values[0] = 0.0;
    values[n0 - 1] = 1.0;
    let warp = Warping::new(grid0.to_vec(), values)?;
    Ok(DpResult {
        warp,
        cost: cost[final_idx],
        path,
    })
}

/// Cost of an explicit lattice path under the same discretization as
/// [`dp_warp`]. Used by the exhaustive test oracle.
pub fn lattice_path_cost(
    grid0: &[f64],
    f0: &DMatrix<f64>,
    grid1: &[f64],
    f1: &DMatrix<f64>,
    penalty_weight: f64,
    path: &[(usize, usize)],
) -> f64 {
    let mut acc = 0.0;
    for w in path.windows(2) {
        let (i0, j0) = w[0];
        let (i1, j1) = w[1];
        acc += segment_cost(
            grid0,
            f0,
            grid1,
            f1,
            penalty_weight,
            i0,
            j0,
            i1 - i0,
            j1 - j0,
        );
    }
    acc
}

/// Exhaustive minimum over all monotone lattice paths with the same step
/// set. Exponential; intended for small oracle grids only.
pub fn exhaustive_min_cost(
    grid0: &[f64],
    f0: &DMatrix<f64>,
    grid1: &[f64],
    f1: &DMatrix<f64>,
    penalty_weight: f64,
) -> f64 {
    let mut best = f64::INFINITY;
    fn dfs(
        grid0: &[f64],
        f0: &DMatrix<f64>,
        grid1: &[f64],
        f1: &DMatrix<f64>,
        pw: f64,
        i: usize,
        j: usize,
        acc: f64,
        best: &mut f64,
    ) {
        let n0 = grid0.len();
        let n1 = grid1.len();
        if i == n0 - 1 && j == n1 - 1 {
            if acc < *best {
                *best = acc;
            }
            return;
        }
        for &(di, dj) in STEPS.iter() {
            let (ni, nj) = (i + di, j + dj);
            if ni >= n0 || nj >= n1 {
                continue;
            }
            let c = acc + segment_cost(grid0, f0, grid1, f1, pw, i, j, di, dj);
            dfs(grid0, f0, grid1, f1, pw, ni, nj, c, best);
        }
    }
    dfs(grid0, f0, grid1, f1, penalty_weight, 0, 0, 0.0, &mut best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{apply_warp, WarpMode};
    use crate::numeric::uniform_grid;
    use approx::assert_relative_eq;

    fn bump(n: usize, center: f64, width: f64) -> DMatrix<f64> {
        let grid = uniform_grid(n);
        DMatrix::from_fn(n, 1, |i, _| {
            let u = (grid[i] - center) / (width / 2.0);
            if u.abs() < 1.0 {
                (1.0 - u * u).powi(3)
            } else {
                0.0
            }
        })
    }

    #[test]
    fn identity_pair_gives_identity_warp() {
        let n = 64;
        let grid = uniform_grid(n);
        // nonvanishing integrand so the zero-cost path is unique
        let f = bump(n, 0.5, 0.4) + DMatrix::from_element(n, 1, 1.0);
        let res = dp_warp(&grid, &f, &grid, &f, 0.0).unwrap();
        assert!(res.cost < 1e-12);
        assert!(res.warp.deviation_from_identity() < 1e-12);
    }

    #[test]
    fn synthesized_lattice_warp_recovered() {
        // f1 such that f0 = f1 * g for a lattice-representable g, then
        // dp_warp(f0, f1) must reach near-zero cost
        let n = 65;
        let grid = uniform_grid(n);
        // f1 vanishes at u = 0.5 so the warp's slope kink carries no cost
        let f1 = bump(n, 0.2, 0.2) * 0.5 + bump(n, 0.8, 0.3);
        // piecewise-linear lattice warp through (0,0) -> (16,32) -> (64,64)
        let mut f0 = DMatrix::zeros(n, 1);
        let f1_interp = |u: f64| lerp_rows(&grid, &f1, u)[0];
        for i in 0..n {
            let t = grid[i];
            let (h, slope): (f64, f64) = if t < 0.25 {
                (2.0 * t, 2.0)
            } else {
                (0.5 + (t - 0.25) * 2.0 / 3.0, 2.0 / 3.0)
            };
            f0[(i, 0)] = slope.sqrt() * f1_interp(h);
        }
        let res = dp_warp(&grid, &f0, &grid, &f1, 0.0).unwrap();
        assert!(res.cost < 1e-6, "cost {}", res.cost);
    }

    #[test]
    fn peak_alignment_reduces_residual() {
        let n = 128;
        let grid = uniform_grid(n);
        let f0 = bump(n, 0.27, 0.15);
        let f1 = bump(n, 0.78, 0.15);
        let unregistered: f64 = {
            let diff = &f0 - &f1;
            crate::numeric::l2_norm_rows(&grid, &diff)
        };
        let res = dp_warp(&grid, &f0, &grid, &f1, 0.0).unwrap();
        let warped = apply_warp(&grid, &f1, &res.warp, WarpMode::HalfDensity);
        let registered = crate::numeric::l2_dist_rows(&grid, &f0, &warped);
        assert!(
            registered < 0.1 * unregistered,
            "registered {registered} unregistered {unregistered}"
        );
    }

    #[test]
    fn coarse_grid_rejected() {
        let grid = uniform_grid(6);
        let f = DMatrix::zeros(6, 1);
        assert!(matches!(
            dp_warp(&grid, &f, &grid, &f, 0.0),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn dp_matches_exhaustive_oracle_small_grids() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for trial in 0..20 {
            let n = rng.gen_range(8..=12);
            let grid = uniform_grid(n);
            let f0 = DMatrix::from_fn(n, 2, |_, _| rng.gen_range(-1.0..1.0));
            let f1 = DMatrix::from_fn(n, 2, |_, _| rng.gen_range(-1.0..1.0));
            let pw = if trial % 2 == 0 { 0.0 } else { 1.0 };
            let res = dp_warp(&grid, &f0, &grid, &f1, pw).unwrap();
            let oracle = exhaustive_min_cost(&grid, &f0, &grid, &f1, pw);
            assert_relative_eq!(res.cost, oracle, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn dp_cost_equals_path_cost() {
        let n = 32;
        let grid = uniform_grid(n);
        let f0 = bump(n, 0.3, 0.3);
        let f1 = bump(n, 0.6, 0.3);
        let res = dp_warp(&grid, &f0, &grid, &f1, 0.5).unwrap();
        let recomputed = lattice_path_cost(&grid, &f0, &grid, &f1, 0.5, &res.path);
        assert_relative_eq!(res.cost, recomputed, epsilon = 1e-12);
    }
}
