//! Synthetic curve families used in experiments: peak-curvature loops,
//! planar spirals, circular helices and curves built from prescribed
//! curvature profiles.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::curvatures::FrenetCurvatures;
use crate::curve::{normalize, DiscreteCurve};
use crate::error::{Error, Result};
use crate::numeric::uniform_grid;
use crate::src_repr::integrate_frenet_ode;

/// A generated curve together with its ground-truth curvature profile
/// when the construction provides one.
#[derive(Debug, Clone)]
pub struct SynthCurve {
    pub curve: DiscreteCurve,
    pub theta: Option<FrenetCurvatures>,
}

/// Parameters of the synthetic families.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveSpec {
    /// Planar loop whose curvature is a single compact bump.
    PeakLoop {
        location: f64,
        amplitude: f64,
        width: f64,
    },
    /// Archimedean-type planar spiral r = scale * phi.
    Spiral2d { spins: f64, scale: f64 },
    /// Circular helix (a cos t, a sin t, b t).
    Helix3d { radius: f64, pitch: f64, spins: f64 },
}

/// C^2 compact bump: amplitude (1 - u^2)^3 on |u| < 1 with
/// u = (s - location) / (width / 2), zero outside.
pub fn bump_profile(s: f64, location: f64, amplitude: f64, width: f64) -> f64 {
    let u = (s - location) / (width / 2.0);
    if u.abs() < 1.0 {
        amplitude * (1.0 - u * u).powi(3)
    } else {
        0.0
    }
}

/// Single-bump planar curvature profile on [0, 1].
pub fn peak_curvature(location: f64, amplitude: f64, width: f64, n: usize) -> FrenetCurvatures {
    FrenetCurvatures::from_fn(n, 1, |s| vec![bump_profile(s, location, amplitude, width)])
}

/// Loop-shaped planar curve obtained by integrating the Frenet ODE at unit
/// speed for a single-bump curvature profile.
pub fn peak_loop(location: f64, amplitude: f64, width: f64, n: usize) -> Result<SynthCurve> {
    if !(0.0 < location && location < 1.0) || width <= 0.0 {
        return Err(Error::InvalidInput(
            "peak location must lie in (0, 1) with positive width".into(),
        ));
    }
    if n < 50 {
        return Err(Error::GridTooCoarse { n });
    }
    let theta = peak_curvature(location, amplitude, width, 4 * n);
    from_curvatures(&theta, n)
}

/// Curve with the prescribed curvature profile, traversed at unit speed.
/// Works in any dimension d = components + 1.
pub fn from_curvatures(theta: &FrenetCurvatures, n: usize) -> Result<SynthCurve> {
    let d = theta.components() + 1;
    let grid = uniform_grid(n);
    let sdot = vec![1.0; n];
    let theta_clone = theta.clone();
    let band_at = move |s: f64| theta_clone.eval(s.clamp(0.0, 1.0));
    let (curve, _) = integrate_frenet_ode(
        &grid,
        &sdot,
        &band_at,
        &DMatrix::identity(d, d),
        &vec![0.0; d],
    )?;
    // unit speed on [0, 1] means the curve already has unit length up to
    // quadrature error; normalization removes that error
    let curve = normalize(&curve)?;
    Ok(SynthCurve {
        curve,
        theta: Some(theta.clone()),
    })
}

/// Archimedean spiral r = scale * phi over `spins` turns, normalized.
/// The signed-curvature profile kappa(phi) = (phi^2 + 2) / (scale (phi^2 + 1)^{3/2})
/// is carried over to arc length and rescaled by the total length.
pub fn spiral2d(spins: f64, scale: f64, n: usize) -> Result<SynthCurve> {
    if spins <= 0.0 || scale <= 0.0 {
        return Err(Error::InvalidInput(
            "spiral needs positive spin count and scale".into(),
        ));
    }
    if n < 50 {
        return Err(Error::GridTooCoarse { n });
    }
    let grid = uniform_grid(n);
    let phi_max = spins * std::f64::consts::TAU;
    let pts = DMatrix::from_fn(n, 2, |i, c| {
        let phi = grid[i] * phi_max;
        let r = scale * phi;
        if c == 0 {
            r * phi.cos()
        } else {
            r * phi.sin()
        }
    });
    let raw = DiscreteCurve::new(grid.clone(), pts)?;
    let length = raw.polyline_length();
    let curve = normalize(&raw)?;
    // arc length of r = a phi: ds/dphi = a sqrt(phi^2 + 1)
    let mut s = vec![0.0; n];
    let mut kappa = DMatrix::zeros(n, 1);
    for i in 0..n {
        let phi = grid[i] * phi_max;
        kappa[(i, 0)] = length * (phi * phi + 2.0) / (scale * (phi * phi + 1.0).powf(1.5));
        if i > 0 {
            let phi0 = grid[i - 1] * phi_max;
            let f0 = scale * (phi0 * phi0 + 1.0).sqrt();
            let f1 = scale * (phi * phi + 1.0).sqrt();
            s[i] = s[i - 1] + 0.5 * (f0 + f1) * (phi - phi0);
        }
    }
    let total = s[n - 1];
    for v in s.iter_mut() {
        *v /= total;
    }
    s[0] = 0.0;
    s[n - 1] = 1.0;
    let theta = FrenetCurvatures::from_grid(s, kappa)?;
    Ok(SynthCurve {
        curve,
        theta: Some(theta),
    })
}

/// Circular helix (a cos t, a sin t, b t) over `spins` turns, normalized.
/// After length normalization the constant curvatures become
/// kappa = L a / (a^2 + b^2), tau = L b / (a^2 + b^2) with L the raw length.
pub fn helix3d(radius: f64, pitch: f64, spins: f64, n: usize) -> Result<SynthCurve> {
    if radius <= 0.0 || spins <= 0.0 {
        return Err(Error::InvalidInput(
            "helix needs positive radius and spin count".into(),
        ));
    }
    if n < 50 {
        return Err(Error::GridTooCoarse { n });
    }
    let grid = uniform_grid(n);
    let span = spins * std::f64::consts::TAU;
    let pts = DMatrix::from_fn(n, 3, |i, c| {
        let t = grid[i] * span;
        match c {
            0 => radius * t.cos(),
            1 => radius * t.sin(),
            _ => pitch * t,
        }
    });
    let curve = normalize(&DiscreteCurve::new(grid, pts)?)?;
    let len = (radius * radius + pitch * pitch).sqrt() * span;
    let denom = radius * radius + pitch * pitch;
    let theta = FrenetCurvatures::constant(&[len * radius / denom, len * pitch / denom]);
    Ok(SynthCurve {
        curve,
        theta: Some(theta),
    })
}

/// Generate a curve from a family specification.
pub fn generate(spec: &CurveSpec, n: usize) -> Result<SynthCurve> {
    match *spec {
        CurveSpec::PeakLoop {
            location,
            amplitude,
            width,
        } => peak_loop(location, amplitude, width, n),
        CurveSpec::Spiral2d { spins, scale } => spiral2d(spins, scale, n),
        CurveSpec::Helix3d {
            radius,
            pitch,
            spins,
        } => helix3d(radius, pitch, spins, n),
    }
}

/// Add iid Gaussian noise to every sample point. Deterministic in `seed`.
pub fn add_noise(curve: &DiscreteCurve, sigma: f64, seed: u64) -> DiscreteCurve {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = curve.points().clone();
    for i in 0..pts.nrows() {
        for c in 0..pts.ncols() {
            let z: f64 = rng.sample(StandardNormal);
            pts[(i, c)] += sigma * z;
        }
    }
    DiscreteCurve::new(curve.grid().to_vec(), pts).expect("grid unchanged")
}

/// The 20-curve peak-loop family: fixed amplitude and width, peak
/// locations drawn uniformly from (0.1, 0.9). Deterministic in `seed`.
pub fn peak_loop_family(
    count: usize,
    amplitude: f64,
    width: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<(f64, SynthCurve)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let loc = rng.gen_range(0.1..0.9);
        out.push((loc, peak_loop(loc, amplitude, width, n)?));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}
