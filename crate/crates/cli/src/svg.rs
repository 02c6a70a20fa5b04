//! Minimal SVG plots: a floor plan beside depth-versus-longitude curves.

use std::fmt::Write as _;

use hdk_core::{HorizonDepthMap, Point2};

const PANEL: f64 = 400.0;
const PAD: f64 = 30.0;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn polyline(points: impl Iterator<Item = (f64, f64)>, closed: bool, style: &str) -> String {
    let coords: Vec<String> = points.map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
    let tag = if closed { "polygon" } else { "polyline" };
    format!("  <{tag} points=\"{}\" {style}/>\n", coords.join(" "))
}

/// Floor plan (`plan`, metres, camera at the origin) on the left and the
/// floor and ceiling depth curves on the right. `metadata` is embedded
/// verbatim after escaping.
pub fn layout_plot(
    plan: &[Point2],
    floor: &HorizonDepthMap,
    ceiling: &HorizonDepthMap,
    metadata: &str,
) -> String {
    let mut out = String::new();
    let (w, h) = (2.0 * PANEL, PANEL);
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(out, "  <metadata>{}</metadata>", escape(metadata));
    let _ = writeln!(out, "  <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>");

    // floor plan, x to the right and z up, camera at the panel center
    let reach = plan
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(1e-9, f64::max);
    let scale = (PANEL / 2.0 - PAD) / reach;
    let c = PANEL / 2.0;
    out += &polyline(
        plan.iter().map(|p| (c + scale * p[0], c - scale * p[1])),
        true,
        "fill=\"#dde8f4\" stroke=\"#1f4e79\" stroke-width=\"2\"",
    );
    let _ = writeln!(
        out,
        "  <circle cx=\"{c}\" cy=\"{c}\" r=\"4\" fill=\"#c00000\"/>"
    );

    // depth curves over θ ∈ [−π, π)
    let top = floor
        .values()
        .iter()
        .chain(ceiling.values())
        .fold(1e-9, |a: f64, b| a.max(*b));
    let (x0, x1, y0, y1) = (PANEL + PAD, w - PAD, h - PAD, PAD);
    let _ = writeln!(
        out,
        "  <rect x=\"{x0}\" y=\"{y1}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888\"/>",
        x1 - x0,
        y0 - y1
    );
    let curve = |map: &HorizonDepthMap| {
        let n = map.len() as f64;
        map.values()
            .iter()
            .enumerate()
            .map(move |(j, d)| (x0 + (x1 - x0) * j as f64 / n, y0 - (y0 - y1) * d / top))
            .collect::<Vec<_>>()
    };
    out += &polyline(
        curve(ceiling).into_iter(),
        false,
        "fill=\"none\" stroke=\"#e07b00\" stroke-width=\"3\" stroke-dasharray=\"6 4\"",
    );
    out += &polyline(
        curve(floor).into_iter(),
        false,
        "fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"1.5\"",
    );
    let _ = writeln!(
        out,
        "  <text x=\"{x0}\" y=\"{}\" font-size=\"12\">depth (max {top:.3} m) vs longitude; floor solid, ceiling dashed</text>",
        y1 - 8.0
    );
    out.push_str("</svg>\n");
    out
}
