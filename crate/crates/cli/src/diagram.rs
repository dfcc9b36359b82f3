//! Persistence diagrams as CSV and SVG. Both are views of the JSON barcode:
//! a bar becomes the point (birth, death), and infinite deaths are drawn at
//! 1.1 times the largest finite value with a distinct marker.

use std::fmt::Write;

use sqpers::cohomology::{round_significant, Barcode};

/// Height at which infinite bars are drawn.
pub fn infinity_level(b: &Barcode) -> f64 {
    let top = b
        .bars()
        .iter()
        .flat_map(|bar| [bar.birth, bar.death])
        .filter(|x| x.is_finite())
        .fold(0.0, f64::max);
    if top > 0.0 {
        1.1 * top
    } else {
        1.0
    }
}

pub fn to_csv(b: &Barcode) -> String {
    let level = infinity_level(b);
    let mut out = String::from("degree,birth,death,mult,infinite\n");
    for bar in b.bars() {
        let inf = bar.is_infinite();
        let death = if inf { level } else { bar.death };
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            bar.degree,
            round_significant(bar.birth),
            round_significant(death),
            bar.mult,
            inf
        );
    }
    out
}

const SIZE: f64 = 400.0;
const MARGIN: f64 = 40.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub fn to_svg(b: &Barcode, title: &str) -> String {
    let level = infinity_level(b);
    let span = SIZE - 2.0 * MARGIN;
    let x = |v: f64| MARGIN + span * v / level;
    let y = |v: f64| SIZE - MARGIN - span * v / level;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{MARGIN}" y="24" font-family="sans-serif" font-size="14">{}</text>"#, escape(title));
    let (lo, hi) = (MARGIN, SIZE - MARGIN);
    let _ = writeln!(out, r#"<line x1="{lo}" y1="{hi}" x2="{hi}" y2="{hi}" stroke="black"/>"#);
    let _ = writeln!(out, r#"<line x1="{lo}" y1="{hi}" x2="{lo}" y2="{lo}" stroke="black"/>"#);
    let _ = writeln!(out, r#"<line x1="{lo}" y1="{hi}" x2="{hi}" y2="{lo}" stroke="gray" stroke-dasharray="4 4"/>"#);
    let _ = writeln!(
        out,
        r#"<line x1="{lo}" y1="{0}" x2="{hi}" y2="{0}" stroke="gray" stroke-dasharray="1 3"/>"#,
        y(level)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11">∞</text>"#,
        hi + 4.0,
        y(level) + 4.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text>"#,
        hi - 30.0,
        hi + 16.0,
        round_significant(level / 1.1)
    );
    for bar in b.bars() {
        let color = COLORS[bar.degree % COLORS.len()];
        let (cx, cy) = (x(bar.birth), y(if bar.is_infinite() { level } else { bar.death }));
        let label = format!("H{} ({}, {}) x{}", bar.degree, round_significant(bar.birth), death_label(bar.death), bar.mult);
        if bar.is_infinite() {
            let _ = writeln!(
                out,
                r#"<path d="M {} {} l 5 -9 l 5 9 z" fill="{color}"><title>{label}</title></path>"#,
                cx - 5.0,
                cy + 4.0
            );
        } else {
            let _ = writeln!(out, r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="4" fill="{color}"><title>{label}</title></circle>"#);
        }
    }
    out.push_str("</svg>\n");
    out
}

fn death_label(d: f64) -> String {
    if d.is_finite() {
        round_significant(d).to_string()
    } else {
        "inf".into()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
