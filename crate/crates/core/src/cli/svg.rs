//! Self-contained SVG impulse-response charts.

use std::fmt::Write;

use crate::lp::{confidence_bands, ImpulseResponse};

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

pub(crate) fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&apos;")
}

fn nice_step(range: f64) -> f64 {
    let raw = range / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

fn fmt_tick(v: f64, step: f64) -> String {
    let decimals = (0..6)
        .find(|d| {
            let m = step * 10f64.powi(*d);
            (m - m.round()).abs() < 1e-9
        })
        .unwrap_or(6) as usize;
    let s = format!("{v:.decimals$}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0".into()
    } else {
        s
    }
}

/// Point estimates with nested 68% and 90% bands.
///
/// `comment` goes into a leading XML comment; `x_label` and `y_label` name
/// the axes.
pub fn irf_svg(ir: &ImpulseResponse, title: &str, x_label: &str, y_label: &str, comment: &str) -> String {
    let ir = confidence_bands(ir, &[0.68, 0.90]);
    let (b68, b90) = (ir.band(0.68).expect("band"), ir.band(0.90).expect("band"));
    let xs: Vec<f64> = ir.estimates.iter().map(|e| e.horizon as f64).collect();
    let coefs = ir.coefs();
    let finite = |v: &&f64| v.is_finite();
    let mut lo = b90.lo.iter().chain(&coefs).filter(finite).fold(0.0f64, |a, b| a.min(*b));
    let mut hi = b90.hi.iter().chain(&coefs).filter(finite).fold(0.0f64, |a, b| a.max(*b));
    if hi - lo < 1e-12 {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let xmax = xs.last().copied().unwrap_or(0.0).max(1.0);
    let px = |x: f64| LEFT + (W - LEFT - RIGHT) * x / xmax;
    let py = |y: f64| TOP + (H - TOP - BOTTOM) * (hi - y) / (hi - lo);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(s, "<!-- {} -->", escape(comment).replace("--", "- -"));
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));

    let band = |b: &crate::lp::Band, fill: &str| -> String {
        let mut pts: Vec<String> = xs.iter().zip(&b.hi).map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y))).collect();
        pts.extend(xs.iter().zip(&b.lo).rev().map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y))));
        format!(r#"<polygon points="{}" fill="{fill}" stroke="none"/>"#, pts.join(" "))
    };
    let _ = writeln!(s, "{}", band(b90, "#c6dbef"));
    let _ = writeln!(s, "{}", band(b68, "#6baed6"));

    // axes and ticks
    let (x0, x1, y0, y1) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);
    if lo < 0.0 && hi > 0.0 {
        let _ = writeln!(s, r##"<line x1="{x0}" y1="{0:.2}" x2="{x1}" y2="{0:.2}" stroke="#555" stroke-dasharray="4 3"/>"##, py(0.0));
    }
    let ystep = nice_step(hi - lo);
    let mut t = (lo / ystep).ceil() * ystep;
    while t <= hi {
        let y = py(t);
        let _ = writeln!(s, r#"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/>"#, x0 - 4.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 7.0, y + 4.0, fmt_tick(t, ystep));
        t += ystep;
    }
    let xstep = nice_step(xmax).max(1.0).round();
    let mut t = 0.0;
    while t <= xmax + 1e-9 {
        let x = px(t);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{y1}" x2="{x:.2}" y2="{}" stroke="black"/>"#, y1 + 4.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{t}</text>"#, y1 + 18.0);
        t += xstep;
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, H - 12.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        (y0 + y1) / 2.0,
        escape(y_label)
    );

    let line: Vec<String> = xs.iter().zip(&coefs).map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y))).collect();
    let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#08306b" stroke-width="2"/>"##, line.join(" "));
    s.push_str("</svg>\n");
    s
}
