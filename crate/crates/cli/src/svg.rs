//! Minimal SVG line plot of the RB curve and the posterior density.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 360.0;
const PAD: f64 = 40.0;

fn polyline(xs: &[f64], ys: &[Option<f64>], x_range: (f64, f64), y_max: f64, colour: &str) -> String {
    let sx = |x: f64| PAD + (x - x_range.0) / (x_range.1 - x_range.0).max(f64::MIN_POSITIVE) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - y / y_max.max(f64::MIN_POSITIVE) * (H - 2.0 * PAD);
    let mut pts = String::new();
    for (x, y) in xs.iter().zip(ys) {
        if let Some(y) = y.filter(|y| y.is_finite()) {
            let _ = write!(pts, "{:.2},{:.2} ", sx(*x), sy(y));
        }
    }
    format!("<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\" points=\"{}\"/>\n", pts.trim_end())
}

/// RB (blue) and posterior density (orange), each scaled to its own maximum.
pub fn rb_plot(xs: &[f64], rb: &[Option<f64>], posterior_density: &[f64]) -> String {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let rb_max = rb.iter().flatten().copied().fold(0.0, f64::max);
    let d_max = posterior_density.iter().copied().fold(0.0, f64::max);
    let dens: Vec<Option<f64>> = posterior_density.iter().map(|d| Some(*d)).collect();
    let mut s =
        format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n");
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let _ = writeln!(
        s,
        "<line x1=\"{PAD}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"black\"/>",
        y = H - PAD,
        x2 = W - PAD
    );
    let _ = writeln!(s, "<line x1=\"{PAD}\" y1=\"{PAD}\" x2=\"{PAD}\" y2=\"{y}\" stroke=\"black\"/>", y = H - PAD);
    if rb_max > 0.0 {
        let one = H - PAD - (H - 2.0 * PAD) / rb_max;
        let _ = writeln!(
            s,
            "<line x1=\"{PAD}\" y1=\"{one:.2}\" x2=\"{x2}\" y2=\"{one:.2}\" stroke=\"grey\" stroke-dasharray=\"4 4\"/>",
            x2 = W - PAD
        );
    }
    s.push_str(&polyline(xs, rb, (lo, hi), rb_max, "#1f77b4"));
    s.push_str(&polyline(xs, &dens, (lo, hi), d_max, "#ff7f0e"));
    let _ = writeln!(s, "<text x=\"{PAD}\" y=\"20\" font-size=\"12\" fill=\"#1f77b4\">RB (max {rb_max:.4})</text>");
    let _ = writeln!(
        s,
        "<text x=\"220\" y=\"20\" font-size=\"12\" fill=\"#ff7f0e\">posterior density (max {d_max:.4})</text>"
    );
    let _ = writeln!(s, "<text x=\"{PAD}\" y=\"{y}\" font-size=\"11\">{lo:.4}</text>", y = H - 12.0);
    let _ = writeln!(
        s,
        "<text x=\"{x}\" y=\"{y}\" font-size=\"11\" text-anchor=\"end\">{hi:.4}</text>",
        x = W - PAD,
        y = H - 12.0
    );
    s.push_str("</svg>\n");
    s
}
