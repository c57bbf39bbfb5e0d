//! `records.csv` rows and the static `plot.svg`.

use std::fmt::Write as _;

use crate::analysis::BoundPair;
use crate::sweep::SweepRecord;

pub const CSV_HEADER: &str = "L,gamma,sigma,tau,j_numeric,lower,upper_min,regime,bracket_ok,runtime_s";

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub l: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub tau: f64,
    pub j_numeric: f64,
    pub lower: Option<f64>,
    pub upper_min: Option<f64>,
    pub regime: String,
    pub bracket_ok: bool,
    pub runtime_s: f64,
}

impl Row {
    pub fn new(l: f64, gamma: f64, sigma: f64, tau: f64, j: f64, bounds: &BoundPair, slack: f64) -> Self {
        Row {
            l,
            gamma,
            sigma,
            tau,
            j_numeric: j,
            lower: bounds.lower.value(),
            upper_min: bounds.upper_min(),
            regime: bounds.regime.as_str().to_string(),
            bracket_ok: j.is_finite() && bounds.brackets(j, slack),
            runtime_s: 0.0,
        }
    }
}

impl From<&SweepRecord> for Row {
    fn from(r: &SweepRecord) -> Self {
        Row {
            l: r.l,
            gamma: r.gamma,
            sigma: r.sigma,
            tau: r.tau,
            j_numeric: r.j_numeric,
            lower: r.bounds.lower.value(),
            upper_min: r.bounds.upper_min(),
            regime: r.bounds.regime.as_str().to_string(),
            bracket_ok: r.bracket_ok,
            runtime_s: r.runtime_seconds,
        }
    }
}

/// Twelve significant digits, locale free.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.11e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

pub fn records_csv(rows: &[Row]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_num(r.l),
            fmt_num(r.gamma),
            fmt_num(r.sigma),
            fmt_num(r.tau),
            fmt_num(r.j_numeric),
            fmt_opt(r.lower),
            fmt_opt(r.upper_min),
            r.regime,
            r.bracket_ok,
            fmt_num(r.runtime_s),
        );
    }
    s
}

/// One curve of the plot; `dashed` marks reference curves.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD_L: f64 = 80.0;
const PAD_R: f64 = 170.0;
const PAD_T: f64 = 40.0;
const PAD_B: f64 = 50.0;
const COLOURS: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];

fn axis(vals: impl Iterator<Item = f64>, log: bool) -> Option<(f64, f64)> {
    let vals: Vec<f64> = vals.filter(|v| v.is_finite() && (!log || *v > 0.0)).collect();
    let lo = vals.iter().copied().reduce(f64::min)?;
    let hi = vals.iter().copied().reduce(f64::max)?;
    let (lo, hi) = if log { (lo.log10(), hi.log10()) } else { (lo, hi) };
    if hi - lo < 1e-12 {
        Some((lo - 0.5, hi + 0.5))
    } else {
        let pad = 0.05 * (hi - lo);
        Some((lo - pad, hi + pad))
    }
}

impl Plot {
    /// Static SVG. On log axes non-positive values are drawn on the lower
    /// edge of the frame.
    pub fn to_svg(&self) -> String {
        let pts = || self.series.iter().flat_map(|s| s.points.iter());
        let (x0, x1) = axis(pts().map(|p| p.0), self.log_x).unwrap_or((0.0, 1.0));
        let (y0, y1) = axis(pts().map(|p| p.1), self.log_y).unwrap_or((0.0, 1.0));
        let (pw, ph) = (W - PAD_L - PAD_R, H - PAD_T - PAD_B);
        let tx = |x: f64| {
            let v = if self.log_x { x.max(f64::MIN_POSITIVE).log10().max(x0) } else { x };
            PAD_L + (v - x0) / (x1 - x0) * pw
        };
        let ty = |y: f64| {
            let v = if self.log_y { if y > 0.0 { y.log10().max(y0) } else { y0 } } else { y };
            PAD_T + ph - (v - y0) / (y1 - y0) * ph
        };
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, PAD_L + pw / 2.0, esc(&self.title));
        let _ = writeln!(s, r#"<rect x="{PAD_L}" y="{PAD_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let (vx, vy) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let lx = if self.log_x { 10f64.powf(vx) } else { vx };
            let ly = if self.log_y { 10f64.powf(vy) } else { vy };
            let px = PAD_L + f * pw;
            let py = PAD_T + ph - f * ph;
            let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, PAD_T + ph, PAD_T + ph + 5.0);
            let _ = writeln!(s, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, PAD_T + ph + 18.0, tick(lx));
            let _ = writeln!(s, r#"<line x1="{:.2}" y1="{py:.2}" x2="{PAD_L}" y2="{py:.2}" stroke="black"/>"#, PAD_L - 5.0);
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, PAD_L - 8.0, py + 4.0, tick(ly));
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, PAD_L + pw / 2.0, H - 10.0, esc(&self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            PAD_T + ph / 2.0,
            PAD_T + ph / 2.0,
            esc(&self.y_label)
        );
        for (k, ser) in self.series.iter().enumerate() {
            let colour = COLOURS[k % COLOURS.len()];
            let dash = if ser.dashed { r#" stroke-dasharray="6 4""# } else { "" };
            let path: Vec<String> = ser
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|p| format!("{:.2},{:.2}", tx(p.0), ty(p.1)))
                .collect();
            if !path.is_empty() {
                let _ = writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5"{dash} points="{}"/>"#, path.join(" "));
            }
            if !ser.dashed {
                for p in ser.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
                    let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{colour}"/>"#, tx(p.0), ty(p.1));
                }
            }
            let ly = PAD_T + 14.0 + 18.0 * k as f64;
            let lx = W - PAD_R + 12.0;
            let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="1.5"{dash}/>"#, lx + 24.0);
            let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 30.0, ly + 4.0, esc(&ser.label));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.1e}")
    } else {
        format!("{v:.3}")
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::analytic_bounds;
    use crate::geometry::BcKind;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(0.0565685424949238), "5.65685424949e-2");
        assert_eq!(fmt_num(0.0), "0.00000000000e0");
        assert_eq!(fmt_num(f64::NAN), "nan");
    }

    #[test]
    fn csv_has_frozen_header_and_lf() {
        let b = analytic_bounds(BcKind::Horizontal, 0.5, 0.1, 0.1, 0.0).unwrap();
        let csv = records_csv(&[Row::new(0.5, 0.1, 0.1, 0.0, 0.0075, &b, 0.1)]);
        let lines: Vec<&str> = csv.split('\n').collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(!csv.contains('\r'));
        assert_eq!(lines[1].split(',').count(), 10);
        assert!(lines[1].ends_with(",quadratic,true,0.00000000000e0"));
    }

    #[test]
    fn svg_handles_zero_on_log_axis() {
        let p = Plot {
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            log_x: true,
            log_y: true,
            series: vec![Series { label: "a".into(), points: vec![(1.0, 0.0), (2.0, 1e-3), (4.0, 1e-2)], dashed: false }],
        };
        let svg = p.to_svg();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }
}
