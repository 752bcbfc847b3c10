//! SVG 1.1 figures: the loop secular function and ground-state heatmaps.

use dplab_core::loop1d::LoopSpec;
use dplab_core::solver2d::CrackMesh;
use svg::node::element::{Circle, Line, Polyline, Rectangle, Text};
use svg::Document;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;

fn document(width: f64, height: f64) -> Document {
    Document::new()
        .set("version", "1.1")
        .set("width", width)
        .set("height", height)
        .set("viewBox", (0.0, 0.0, width, height))
        .add(Rectangle::new().set("width", width).set("height", height).set("fill", "white"))
}

fn label(x: f64, y: f64, anchor: &str, text: String) -> Text {
    Text::new(text)
        .set("x", x)
        .set("y", y)
        .set("text-anchor", anchor)
        .set("font-family", "sans-serif")
        .set("font-size", 12)
}

fn line(x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) -> Line {
    Line::new()
        .set("x1", x1)
        .set("y1", y1)
        .set("x2", x2)
        .set("y2", y2)
        .set("stroke", stroke)
        .set("stroke-width", 1)
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// `κ ↦ Θ(κ)` on `(0, 2ω]` (or `(0, 1]` when `ω ≤ 0`) with the level
/// `Θ = 1` dashed and the root, if any, circled.
pub fn theta_plot(spec: &LoopSpec, points: usize, root: Option<f64>) -> String {
    let k_max = if spec.omega > 0.0 { 2.0 * spec.omega } else { 1.0 };
    let samples: Vec<(f64, f64)> = (1..=points)
        .map(|i| {
            let k = k_max * i as f64 / points as f64;
            (k, spec.theta(k))
        })
        .collect();
    let limit = spec.d * spec.omega;
    let y_lo = samples.iter().map(|p| p.1).fold(limit.min(0.0), f64::min);
    let y_hi = samples.iter().map(|p| p.1).fold(limit.max(1.0), f64::max) * 1.1;
    let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let sx = |k: f64| MARGIN + pw * k / k_max;
    let sy = |t: f64| HEIGHT - MARGIN - ph * (t - y_lo) / (y_hi - y_lo);

    let mut doc = document(WIDTH, HEIGHT)
        .add(line(MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, "black"))
        .add(line(MARGIN, MARGIN, MARGIN, HEIGHT - MARGIN, "black"));
    for i in 0..=4 {
        let k = k_max * i as f64 / 4.0;
        let t = y_lo + (y_hi - y_lo) * i as f64 / 4.0;
        doc = doc
            .add(line(sx(k), HEIGHT - MARGIN, sx(k), HEIGHT - MARGIN + 5.0, "black"))
            .add(label(sx(k), HEIGHT - MARGIN + 18.0, "middle", tick(k)))
            .add(line(MARGIN - 5.0, sy(t), MARGIN, sy(t), "black"))
            .add(label(MARGIN - 8.0, sy(t) + 4.0, "end", tick(t)));
    }
    let pts: Vec<String> = samples.iter().map(|&(k, t)| format!("{:.2},{:.2}", sx(k), sy(t))).collect();
    doc = doc
        .add(
            Polyline::new()
                .set("points", pts.join(" "))
                .set("fill", "none")
                .set("stroke", "#1f4e9c")
                .set("stroke-width", 2),
        )
        .add(line(MARGIN, sy(1.0), WIDTH - MARGIN, sy(1.0), "#c0392b").set("stroke-dasharray", "6,4"))
        .add(label(WIDTH - MARGIN, sy(1.0) - 6.0, "end", "Θ = 1".into()))
        .add(label(WIDTH / 2.0, HEIGHT - 15.0, "middle", "κ".into()))
        .add(label(
            WIDTH / 2.0,
            28.0,
            "middle",
            format!("Θ(κ) for d = {}, ω = {}", tick(spec.d), tick(spec.omega)),
        ));
    doc = match root {
        Some(k) => doc
            .add(
                Circle::new()
                    .set("cx", sx(k))
                    .set("cy", sy(1.0))
                    .set("r", 5)
                    .set("fill", "none")
                    .set("stroke", "#c0392b")
                    .set("stroke-width", 2),
            )
            .add(label(sx(k) + 8.0, sy(1.0) + 18.0, "start", format!("κ = {k:.6}"))),
        None => doc.add(label(WIDTH - MARGIN, MARGIN, "end", "no root: no negative eigenvalue".into())),
    };
    doc.to_string()
}

fn diverging(t: f64) -> String {
    // white at zero, red for positive, blue for negative
    let t = t.clamp(-1.0, 1.0);
    let fade = |c: f64| (255.0 - (255.0 - c) * t.abs()).round() as u8;
    let (r, g, b) = if t >= 0.0 { (fade(178.0), fade(24.0), fade(43.0)) } else { (fade(33.0), fade(102.0), fade(172.0)) };
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Nodal field on the mesh, sampled on at most `max_cells` blocks per side,
/// with the crack drawn on top.
pub fn heatmap(mesh: &CrackMesh, nodal: &[f64], max_cells: usize, title: &str) -> String {
    let rect = mesh.rect();
    let (nx, ny) = mesh.cells();
    let stride = nx.max(ny).div_ceil(max_cells.max(1)).max(1);
    let scale = (WIDTH - 2.0 * MARGIN) / rect.width().max(rect.height());
    let (w, hgt) = (rect.width() * scale + 2.0 * MARGIN, rect.height() * scale + 2.0 * MARGIN);
    let px = |x: f64| MARGIN + (x - rect.x_min) * scale;
    let py = |y: f64| hgt - MARGIN - (y - rect.y_min) * scale;
    let peak = nodal.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // fix the arbitrary eigenvector sign
    let sign = match nodal.iter().max_by(|a, b| a.abs().total_cmp(&b.abs())) {
        Some(v) if *v < 0.0 => -1.0,
        _ => 1.0,
    };
    let cell = stride as f64 * mesh.h() * scale;
    let mut doc = document(w, hgt);
    for j in (0..=ny).step_by(stride) {
        for i in (0..=nx).step_by(stride) {
            let v = nodal[mesh.grid_node(i, j)];
            let t = if peak > 0.0 { sign * v / peak } else { 0.0 };
            let p = mesh.node_point(mesh.grid_node(i, j));
            doc = doc.add(
                Rectangle::new()
                    .set("x", format!("{:.2}", px(p.x) - cell / 2.0))
                    .set("y", format!("{:.2}", py(p.y) - cell / 2.0))
                    .set("width", format!("{:.2}", cell))
                    .set("height", format!("{:.2}", cell))
                    .set("fill", diverging(t)),
            );
        }
    }
    let seg = mesh.segment();
    doc = doc
        .add(
            Rectangle::new()
                .set("x", px(rect.x_min))
                .set("y", py(rect.y_max))
                .set("width", rect.width() * scale)
                .set("height", rect.height() * scale)
                .set("fill", "none")
                .set("stroke", "black"),
        )
        .add(line(px(seg.x_a), py(seg.y0), px(seg.x_b), py(seg.y0), "black").set("stroke-width", 3))
        .add(label(w / 2.0, 28.0, "middle", title.to_string()))
        .add(label(px(rect.x_min), hgt - MARGIN + 18.0, "start", tick(rect.x_min)))
        .add(label(px(rect.x_max), hgt - MARGIN + 18.0, "end", tick(rect.x_max)))
        .add(label(MARGIN - 8.0, py(rect.y_min), "end", tick(rect.y_min)))
        .add(label(MARGIN - 8.0, py(rect.y_max) + 10.0, "end", tick(rect.y_max)));
    doc.to_string()
}
