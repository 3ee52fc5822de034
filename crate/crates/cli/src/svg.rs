//! Minimal scatter plots over the unit square.
//!
//! Output depends only on the inputs: coordinates are printed with a fixed
//! number of decimals and the palette is fixed, so plots can be compared
//! byte for byte.

use std::fmt::Write as _;

const SIZE: f64 = 400.0;
const MARGIN: f64 = 30.0;
const RADIUS: f64 = 2.5;

/// Category colors, cycled when there are more labels than entries.
pub const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Points outside `[0, 1]^2` are clipped to the frame.
pub fn scatter(points: &[[f64; 2]], labels: Option<&[usize]>, title: &str) -> String {
    let full = SIZE + 2.0 * MARGIN;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{full}" height="{full}" viewBox="0 0 {full} {full}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect x="0" y="0" width="{full}" height="{full}" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" fill="none" stroke="black" stroke-width="1"/>"#
    )
    .unwrap();
    if !title.is_empty() {
        writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            full / 2.0,
            MARGIN - 10.0,
            escape(title)
        )
        .unwrap();
    }
    let bottom = MARGIN + SIZE;
    for (x, anchor, text) in [(MARGIN, "start", "0"), (MARGIN + SIZE, "end", "1")] {
        writeln!(
            out,
            r#"<text x="{x}" y="{}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{text}</text>"#,
            bottom + 14.0
        )
        .unwrap();
    }
    writeln!(out, "<g stroke=\"none\">").unwrap();
    for (i, p) in points.iter().enumerate() {
        let color = labels.map_or(PALETTE[0], |l| PALETTE[l[i] % PALETTE.len()]);
        let cx = MARGIN + p[0].clamp(0.0, 1.0) * SIZE;
        let cy = bottom - p[1].clamp(0.0, 1.0) * SIZE;
        writeln!(out, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{RADIUS}" fill="{color}"/>"#).unwrap();
    }
    out.push_str("</g>\n</svg>\n");
    out
}
