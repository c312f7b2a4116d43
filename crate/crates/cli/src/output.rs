//! Text, CSV and SVG renderers. All output is deterministic for a given
//! input so golden files can be compared byte for byte.

use std::fmt::Write as _;

use ftqc_threshold::{FailureEstimateF64, ThresholdCurveF64};

pub const SCAN_HEADER: &str = "k,r,depth,p_th";
pub const SIMULATE_HEADER: &str = "p,k,r,trials,failures,estimate,ci_low,ci_high,exact,seed";

/// Scientific notation with 13 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.12e}")
}

pub fn scan_csv(curves: &[ThresholdCurveF64]) -> String {
    let mut out = String::new();
    out.push_str(SCAN_HEADER);
    out.push('\n');
    for curve in curves {
        for p in &curve.points {
            let _ = writeln!(out, "{},{},{},{}", curve.k, p.query.r, p.depth, sci(p.p_th));
        }
    }
    out
}

pub struct SimulateRow<'a> {
    pub p: f64,
    pub k: u32,
    pub r: u32,
    pub seed: u64,
    pub exact: f64,
    pub estimate: &'a FailureEstimateF64,
}

pub fn simulate_csv(row: &SimulateRow<'_>) -> String {
    let e = row.estimate;
    format!(
        "{SIMULATE_HEADER}\n{},{},{},{},{},{},{},{},{},{}\n",
        sci(row.p),
        row.k,
        row.r,
        e.trials,
        e.failures,
        sci(e.estimate),
        sci(e.ci_low),
        sci(e.ci_high),
        sci(row.exact),
        row.seed
    )
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 140.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

/// Self-contained SVG with one polyline of `p_th` against `r` per level,
/// logarithmic vertical axis.
pub fn scan_svg(curves: &[ThresholdCurveF64]) -> String {
    let points = curves.iter().flat_map(|c| c.points.iter());
    let (mut r_lo, mut r_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        r_lo = r_lo.min(p.query.r);
        r_hi = r_hi.max(p.query.r);
        let y = p.log_p_th / std::f64::consts::LN_10;
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    if r_hi <= r_lo {
        r_lo -= 0.5;
        r_hi += 0.5;
    }
    let (y_lo, y_hi) = (y_lo.floor(), y_hi.ceil().max(y_lo.floor() + 1.0));
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |r: f64| LEFT + (r - r_lo) / (r_hi - r_lo) * plot_w;
    let sy = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    // decade ticks
    let mut decade = y_lo as i32;
    while f64::from(decade) <= y_hi {
        let y = sy(f64::from(decade));
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{decade}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
        decade += 1;
    }
    for i in 0..=5 {
        let r = r_lo + (r_hi - r_lo) * f64::from(i) / 5.0;
        let x = sx(r);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h + 18.0,
            trim_number(r)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">r (error-correction period)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">p_th (log scale)</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (i, curve) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = curve
            .points
            .iter()
            .map(|p| {
                format!(
                    "{:.2},{:.2}",
                    sx(p.query.r),
                    sy(p.log_p_th / std::f64::consts::LN_10)
                )
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = TOP + 20.0 + 20.0 * i as f64;
        let lx = LEFT + plot_w + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 25.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">k = {}</text>"#,
            lx + 32.0,
            ly + 4.0,
            curve.k
        );
    }
    s.push_str("</svg>\n");
    s
}

fn trim_number(x: f64) -> String {
    let s = format!("{x:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}
