//! Hand-rolled SVG output: geodesic strips of projected curves and
//! distance-matrix heatmaps. Purely presentational.

use curveshape::DiscreteCurve;
use nalgebra::DMatrix;

const CELL: f64 = 160.0;
const PAD: f64 = 10.0;

/// Orthographic projection of a curve to 2D: identity for d = 2, best-fit
/// plane (leading right singular vectors of the centered points) for
/// higher dimensions.
fn project(curve: &DiscreteCurve) -> Vec<(f64, f64)> {
    let pts = curve.points();
    let n = pts.nrows();
    if curve.dim() == 2 {
        return (0..n).map(|i| (pts[(i, 0)], pts[(i, 1)])).collect();
    }
    let mean = pts.row_mean();
    let mut centered = pts.clone();
    for i in 0..n {
        centered.set_row(i, &(pts.row(i) - &mean));
    }
    let svd = centered.clone().svd(false, true);
    let vt = svd.v_t.expect("svd of point cloud");
    (0..n)
        .map(|i| {
            let r = centered.row(i);
            (r.dot(&vt.row(0)), r.dot(&vt.row(1)))
        })
        .collect()
}

fn polyline(points: &[(f64, f64)], x0: f64, y0: f64, side: f64) -> String {
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        min_x = min_x.min(x);
        max_x = max_x.max(x);
        min_y = min_y.min(y);
        max_y = max_y.max(y);
    }
    let span = (max_x - min_x).max(max_y - min_y).max(1e-12);
    let scale = (side - 2.0 * PAD) / span;
    let cx = 0.5 * (min_x + max_x);
    let cy = 0.5 * (min_y + max_y);
    let coords: Vec<String> = points
        .iter()
        .map(|&(x, y)| {
            let px = x0 + side / 2.0 + (x - cx) * scale;
            // SVG y axis points down
            let py = y0 + side / 2.0 - (y - cy) * scale;
            format!("{px:.2},{py:.2}")
        })
        .collect();
    format!(
        "<polyline fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"1.5\" points=\"{}\"/>",
        coords.join(" ")
    )
}

/// One row of snapshots, labelled by interpolation value.
pub fn curve_strip(taus: &[f64], curves: &[DiscreteCurve]) -> String {
    let k = curves.len();
    let width = k as f64 * CELL;
    let height = CELL + 20.0;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">\n"
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (idx, curve) in curves.iter().enumerate() {
        let x0 = idx as f64 * CELL;
        let projected = project(curve);
        out.push_str(&polyline(&projected, x0, 0.0, CELL));
        out.push('\n');
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\" \
             font-family=\"sans-serif\">tau = {:.3}</text>\n",
            x0 + CELL / 2.0,
            CELL + 14.0,
            taus[idx]
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Two-stop color ramp from deep blue to yellow, NaN drawn gray.
fn heat_color(v: f64, max: f64) -> String {
    if !v.is_finite() {
        return "#999999".into();
    }
    let u = if max > 0.0 { (v / max).clamp(0.0, 1.0) } else { 0.0 };
    let r = (40.0 + 215.0 * u) as u8;
    let g = (50.0 + 180.0 * u) as u8;
    let b = (120.0 * (1.0 - u) + 40.0) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Distance-matrix heatmap in input order.
pub fn heatmap(labels: &[String], values: &DMatrix<f64>) -> String {
    let n = labels.len();
    let cell = 24.0;
    let margin = 90.0;
    let side = margin + n as f64 * cell + PAD;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{side:.0}\" height=\"{side:.0}\" \
         viewBox=\"0 0 {side:.0} {side:.0}\">\n"
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let max = values.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    for i in 0..n {
        for j in 0..n {
            let x = margin + j as f64 * cell;
            let y = margin + i as f64 * cell;
            out.push_str(&format!(
                "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{cell:.1}\" height=\"{cell:.1}\" \
                 fill=\"{}\"/>\n",
                heat_color(values[(i, j)], max)
            ));
        }
    }
    for (i, l) in labels.iter().enumerate() {
        let y = margin + i as f64 * cell + cell * 0.7;
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{y:.1}\" font-size=\"10\" text-anchor=\"end\" \
             font-family=\"sans-serif\">{l}</text>\n",
            margin - 4.0
        ));
        let x = margin + i as f64 * cell + cell * 0.7;
        out.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"start\" \
             font-family=\"sans-serif\" transform=\"rotate(-60 {x:.1} {:.1})\">{l}</text>\n",
            margin - 4.0,
            margin - 4.0
        ));
    }
    out.push_str("</svg>\n");
    out
}
