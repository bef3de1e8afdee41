//! Implementations of the five subcommands.

use std::path::Path;

use curveshape::{
    geodesic as core_geodesic, normalize, shape_distance_src, shape_distance_srvf,
    shape_distance_theta, AnalysisInput, DistanceMatrix, ShapeDistance,
};
use serde_json::{json, Value};

use crate::{
    envelope, io, svg, CliError, DistanceArgs, EstimateArgs, GeodesicArgs, MatrixArgs, Method,
    SynthFamily,
};

fn label_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn load_input(path: &Path) -> Result<AnalysisInput, CliError> {
    Ok(AnalysisInput::new(label_of(path), io::read_curve(path)?))
}

/// Subsampled warp graph for envelopes: at most 65 nodes.
fn warp_json(warp: &curveshape::Warping) -> Value {
    let grid = warp.grid();
    let n = grid.len();
    let stride = (n / 64).max(1);
    let mut t = Vec::new();
    let mut h = Vec::new();
    let mut i = 0;
    while i < n {
        t.push(grid[i]);
        h.push(warp.eval(grid[i]));
        i += stride;
    }
    if *t.last().unwrap() < 1.0 {
        t.push(1.0);
        h.push(1.0);
    }
    json!({ "t": t, "h": h })
}

fn rotation_json(rotation: &Option<nalgebra::DMatrix<f64>>) -> Value {
    match rotation {
        Some(m) => {
            let rows: Vec<Vec<f64>> = (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
                .collect();
            json!(rows)
        }
        None => Value::Null,
    }
}

fn estimation_json(flags: &crate::EstimationFlags) -> Value {
    json!({
        "bandwidth": flags.bandwidth,
        "degree": flags.degree,
        "n_breaks": flags.n_breaks,
        "order": flags.order,
        "lambda": flags.lambda,
    })
}

fn registration_json(flags: &crate::RegistrationFlags) -> Value {
    json!({
        "dp_grid": flags.dp_grid,
        "max_iter": flags.max_iter,
        "tol": flags.tol,
    })
}

pub fn synth(family: SynthFamily) -> Result<(), CliError> {
    match family {
        SynthFamily::PeakLoop {
            location,
            amplitude,
            width,
            common,
        } => {
            let spec = curveshape::CurveSpec::PeakLoop {
                location,
                amplitude,
                width,
            };
            let params = json!({
                "kind": "peak_loop",
                "location": location,
                "amplitude": amplitude,
                "width": width,
                "curvature_profile": "polynomial bump (1-u^2)^3",
            });
            write_synth(&spec, params, &common)
        }
        SynthFamily::Spiral2d {
            spins,
            scale,
            common,
        } => {
            let spec = curveshape::CurveSpec::Spiral2d { spins, scale };
            let params = json!({ "kind": "spiral2d", "spins": spins, "scale": scale });
            write_synth(&spec, params, &common)
        }
        SynthFamily::Helix3d {
            radius,
            pitch,
            spins,
            common,
        } => {
            let spec = curveshape::CurveSpec::Helix3d {
                radius,
                pitch,
                spins,
            };
            let params = json!({
                "kind": "helix3d",
                "radius": radius,
                "pitch": pitch,
                "spins": spins,
            });
            write_synth(&spec, params, &common)
        }
        SynthFamily::PeakFamily {
            count,
            amplitude,
            width,
            n,
            seed,
            out_dir,
        } => {
            std::fs::create_dir_all(&out_dir)
                .map_err(|e| CliError::io(format!("{}: {e}", out_dir.display())))?;
            let family = curveshape::synth::peak_loop_family(count, amplitude, width, n, seed)?;
            let mut entries = Vec::new();
            for (idx, (location, synth)) in family.iter().enumerate() {
                let file = out_dir.join(format!("peak_{idx:03}.csv"));
                io::write_curve(&file, &synth.curve)?;
                entries.push(json!({
                    "file": file.display().to_string(),
                    "location": location,
                }));
            }
            let manifest = json!({
                "command": "synth peak-family",
                "parameters": {
                    "count": count,
                    "amplitude": amplitude,
                    "width": width,
                    "n": n,
                    "seed": seed,
                },
                "curves": entries,
                "metadata": { "version": envelope::version() },
            });
            envelope::emit(Some(&out_dir.join("manifest.json")), &manifest)
        }
    }
}

fn write_synth(
    spec: &curveshape::CurveSpec,
    params: Value,
    common: &crate::SynthCommon,
) -> Result<(), CliError> {
    let generated = curveshape::generate(spec, common.n)?;
    let curve = if common.noise_sigma > 0.0 {
        curveshape::add_noise(&generated.curve, common.noise_sigma, common.seed)
    } else {
        generated.curve
    };
    io::write_curve(&common.output, &curve)?;
    let manifest_path = common
        .manifest
        .clone()
        .unwrap_or_else(|| common.output.with_extension("json"));
    let manifest = json!({
        "command": "synth",
        "parameters": params,
        "n": common.n,
        "noise_sigma": common.noise_sigma,
        "seed": common.seed,
        "output": common.output.display().to_string(),
        "metadata": { "version": envelope::version() },
    });
    envelope::emit(Some(&manifest_path), &manifest)
}

pub fn estimate(args: EstimateArgs) -> Result<(), CliError> {
    let curve = io::read_curve(&args.input)?;
    let config = args.estimation.to_config();

    // raw midpoint samples for diagnostics: rerun the pipeline front end
    let normalized = normalize(&curve)?;
    let degree = config.degree.unwrap_or(normalized.dim() + 1);
    let derivs =
        curveshape::estimation::local_poly_derivatives(&normalized, config.bandwidth, degree)?;
    let arclen = curveshape::arc_length(&normalized)?;
    let frames = curveshape::frame::gram_schmidt_frames(arclen.s(), &derivs)?;
    let raw = curveshape::estimation::ode_raw_curvatures(&frames)?;

    let (_, theta) = curveshape::estimate_pipeline(&curve, &config)?;
    let (s, values) = theta.eval_grid(args.grid);
    let m = theta.components();

    let smooth_cols: Vec<(String, Vec<f64>)> = (0..m)
        .map(|c| {
            (
                format!("theta{}", c + 1),
                (0..s.len()).map(|i| values[(i, c)]).collect(),
            )
        })
        .collect();
    let named: Vec<(&str, Vec<f64>)> = smooth_cols
        .iter()
        .map(|(n, v)| (n.as_str(), v.clone()))
        .collect();
    io::write_profile_csv(&args.output, &s, &named)?;

    let raw_path = args
        .raw_output
        .clone()
        .unwrap_or_else(|| args.output.with_extension("raw.csv"));
    let mut raw_cols: Vec<(String, Vec<f64>)> = (0..raw.values().ncols())
        .map(|c| {
            (
                format!("theta{}", c + 1),
                (0..raw.len()).map(|i| raw.values()[(i, c)]).collect(),
            )
        })
        .collect();
    raw_cols.push(("weight".into(), raw.weights().to_vec()));
    let raw_named: Vec<(&str, Vec<f64>)> = raw_cols
        .iter()
        .map(|(n, v)| (n.as_str(), v.clone()))
        .collect();
    io::write_profile_csv(&raw_path, raw.midpoints(), &raw_named)?;

    let env = json!({
        "command": "estimate",
        "input": args.input.display().to_string(),
        "parameters": estimation_json(&args.estimation),
        "grid": args.grid,
        "components": m,
        "output": args.output.display().to_string(),
        "raw_output": raw_path.display().to_string(),
        "metadata": { "version": envelope::version() },
    });
    envelope::emit(args.envelope.as_deref(), &env)
}

fn compute_distance(
    file0: &Path,
    file1: &Path,
    method: Method,
    reg: &curveshape::RegistrationConfig,
    est: &curveshape::EstimateConfig,
) -> Result<ShapeDistance, CliError> {
    let a = load_input(file0)?;
    let b = load_input(file1)?;
    match method {
        Method::Srvf => {
            let c0 = normalize(&a.curve)?;
            let c1 = normalize(&b.curve)?;
            Ok(shape_distance_srvf(&c0, &c1, reg)?)
        }
        Method::Theta => Ok(shape_distance_theta(
            &a.theta_repr(est)?,
            &b.theta_repr(est)?,
        )?),
        Method::Src => Ok(shape_distance_src(
            &a.src_repr(est)?,
            &b.src_repr(est)?,
            reg,
        )?),
    }
}

pub fn distance(args: DistanceArgs) -> Result<(), CliError> {
    let reg = args.registration.to_config();
    let est = args.estimation.to_config();
    let result = compute_distance(&args.file0, &args.file1, args.method, &reg, &est)?;

    let legs = match result.legs {
        Some([d_psi, d_c]) => json!({ "d_psi": d_psi, "d_c": d_c }),
        None => Value::Null,
    };
    let (warp, rotation) = match &result.registration {
        Some(r) => (warp_json(&r.warp), rotation_json(&r.rotation)),
        None => (Value::Null, Value::Null),
    };
    let env = json!({
        "command": "distance",
        "method": args.method.name(),
        "inputs": [args.file0.display().to_string(), args.file1.display().to_string()],
        "parameters": {
            "registration": registration_json(&args.registration),
            "estimation": estimation_json(&args.estimation),
        },
        "distance": result.value,
        "legs": legs,
        "warp": warp,
        "rotation": rotation,
        "metadata": {
            "version": envelope::version(),
            "labels": [label_of(&args.file0), label_of(&args.file1)],
        },
    });
    envelope::emit(args.output.as_deref(), &env)
}

pub fn geodesic(args: GeodesicArgs) -> Result<(), CliError> {
    if args.taus < 2 {
        return Err(CliError::io("need at least 2 snapshots (--taus 2)"));
    }
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::io(format!("{}: {e}", args.out_dir.display())))?;
    let a = load_input(&args.file0)?;
    let b = load_input(&args.file1)?;
    let reg = args.registration.to_config();
    let est = args.estimation.to_config();
    let path = core_geodesic(&a, &b, args.method.to_core(), args.taus - 1, &reg, &est)?;

    let mut snapshot_files = Vec::new();
    for (idx, curve) in path.curves.iter().enumerate() {
        let file = args.out_dir.join(format!("snapshot_{idx:03}.csv"));
        io::write_curve(&file, curve)?;
        snapshot_files.push(file.display().to_string());
    }

    // per-snapshot curvature profiles: carried by the representation when
    // it has them, estimated from the snapshot otherwise
    let mut curvature_files: Vec<Value> = Vec::new();
    for idx in 0..path.curves.len() {
        let theta = match &path.curvatures {
            Some(list) => Ok(list[idx].clone()),
            None => curveshape::estimate_pipeline(&path.curves[idx], &est).map(|(_, t)| t),
        };
        match theta {
            Ok(theta) => {
                let (s, values) = theta.eval_grid(512);
                let cols: Vec<(String, Vec<f64>)> = (0..theta.components())
                    .map(|c| {
                        (
                            format!("theta{}", c + 1),
                            (0..s.len()).map(|i| values[(i, c)]).collect(),
                        )
                    })
                    .collect();
                let named: Vec<(&str, Vec<f64>)> =
                    cols.iter().map(|(n, v)| (n.as_str(), v.clone())).collect();
                let file = args.out_dir.join(format!("curvature_{idx:03}.csv"));
                io::write_profile_csv(&file, &s, &named)?;
                curvature_files.push(json!(file.display().to_string()));
            }
            Err(e) => curvature_files.push(json!({ "error": e.to_string() })),
        }
    }

    if let Some(svg_path) = &args.svg {
        let strip = svg::curve_strip(&path.taus, &path.curves);
        io::write_atomic(svg_path, strip.as_bytes())?;
    }

    let env = json!({
        "command": "geodesic",
        "method": args.method.name(),
        "inputs": [args.file0.display().to_string(), args.file1.display().to_string()],
        "parameters": {
            "taus": args.taus,
            "registration": registration_json(&args.registration),
            "estimation": estimation_json(&args.estimation),
        },
        "taus": path.taus,
        "snapshots": snapshot_files,
        "curvature_profiles": curvature_files,
        "svg": args.svg.as_ref().map(|p| p.display().to_string()),
        "metadata": {
            "version": envelope::version(),
            "display_alignment": "snapshots rigidly aligned to the first curve for display",
        },
    });
    envelope::emit(Some(&args.out_dir.join("envelope.json")), &env)
}

fn effective_jobs(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| {
        std::env::var("CURVESHAPE_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

#[cfg(feature = "parallel")]
fn compute_matrix(
    inputs: &[AnalysisInput],
    method: Method,
    reg: &curveshape::RegistrationConfig,
    est: &curveshape::EstimateConfig,
    jobs: Option<usize>,
) -> DistanceMatrix {
    let run = || curveshape::pairwise_matrix(inputs, method.to_core(), reg, est);
    match jobs {
        Some(j) if j > 0 => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        _ => run(),
    }
}

#[cfg(not(feature = "parallel"))]
fn compute_matrix(
    inputs: &[AnalysisInput],
    method: Method,
    reg: &curveshape::RegistrationConfig,
    est: &curveshape::EstimateConfig,
    _jobs: Option<usize>,
) -> DistanceMatrix {
    curveshape::pairwise_matrix_serial(inputs, method.to_core(), reg, est)
}

pub fn matrix(args: MatrixArgs) -> Result<(), CliError> {
    // unreadable files become placeholder rows with NaN cells rather
    // than aborting the batch
    let mut inputs = Vec::new();
    let mut bad_files = Vec::new();
    for file in &args.files {
        match io::read_curve(file) {
            Ok(curve) => inputs.push(Some(AnalysisInput::new(label_of(file), curve))),
            Err(e) => {
                bad_files.push(format!("{}: {e}", file.display()));
                inputs.push(None);
            }
        }
    }
    let good: Vec<AnalysisInput> = inputs.iter().flatten().cloned().collect();
    if good.len() < 2 {
        return Err(CliError::io("need at least 2 readable curve files"));
    }
    let reg = args.registration.to_config();
    let est = args.estimation.to_config();
    let jobs = effective_jobs(args.jobs);
    let computed = compute_matrix(&good, args.method, &reg, &est, jobs);

    // scatter the computed block back into the full input order
    let n = args.files.len();
    let mut values = nalgebra::DMatrix::from_element(n, n, f64::NAN);
    let labels: Vec<String> = args.files.iter().map(|f| label_of(f)).collect();
    let good_idx: Vec<usize> = inputs
        .iter()
        .enumerate()
        .filter_map(|(i, x)| x.as_ref().map(|_| i))
        .collect();
    for i in 0..n {
        values[(i, i)] = if inputs[i].is_some() { 0.0 } else { f64::NAN };
    }
    for (gi, &i) in good_idx.iter().enumerate() {
        for (gj, &j) in good_idx.iter().enumerate() {
            values[(i, j)] = computed.values[(gi, gj)];
        }
    }

    io::write_matrix_csv(&args.output, &labels, &values)?;
    if let Some(svg_path) = &args.svg {
        io::write_atomic(svg_path, svg::heatmap(&labels, &values).as_bytes())?;
    }

    let nan_cells = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && values[(i, j)].is_nan())
        .count();
    let env = json!({
        "command": "matrix",
        "method": args.method.name(),
        "inputs": args.files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>(),
        "parameters": {
            "jobs": jobs,
            "registration": registration_json(&args.registration),
            "estimation": estimation_json(&args.estimation),
        },
        "output": args.output.display().to_string(),
        "svg": args.svg.as_ref().map(|p| p.display().to_string()),
        "unreadable": bad_files,
        "invalid_cells": nan_cells,
        "metadata": { "version": envelope::version(), "labels": labels },
    });
    envelope::emit(Some(&args.output.with_extension("json")), &env)?;

    if nan_cells > 0 {
        return Err(CliError::partial(format!(
            "{nan_cells} matrix cells could not be computed"
        )));
    }
    Ok(())
}
