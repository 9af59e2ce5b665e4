use std::fmt::Write as _;

use serde_json::{json, Map, Value as Json};

use crate::document::to_canonical_string;
use crate::model::{Model, ResourceClass};

use super::geometry::{add, scale, sub, V3};
use super::{Layout, LayoutState};

/// JSON snapshot of a layout: node coordinates, lyph geometry, anchors.
pub fn snapshot(state: &LayoutState) -> String {
    let nodes: Map<String, Json> = state
        .positions
        .iter()
        .map(|(id, p)| (id.to_string(), json!(p)))
        .collect();
    let lyphs: Map<String, Json> = state
        .sizes
        .iter()
        .map(|(id, (l, w))| {
            let mut o = Map::new();
            o.insert("length".into(), json!(l));
            o.insert("width".into(), json!(w));
            if let Some(c) = state.centers.get(id) {
                o.insert("center".into(), json!(c));
            }
            if let Some(u) = state.axes.get(id) {
                o.insert("axis".into(), json!(u));
            }
            if let Some(a) = state.rotations.get(id) {
                o.insert("angle".into(), json!(a));
            }
            (id.to_string(), Json::Object(o))
        })
        .collect();
    let anchors: Map<String, Json> = state
        .anchors
        .iter()
        .map(|(id, p)| (id.to_string(), json!([p[0], p[1]])))
        .collect();
    to_canonical_string(&json!({
        "seed": state.seed,
        "iterations": state.iteration,
        "nodes": nodes,
        "lyphs": lyphs,
        "anchors": anchors,
    }))
}

/// Top view (xy-plane) of a layout as an SVG document.
pub fn to_svg(model: &Model, layout: &Layout) -> String {
    let st = &layout.state;
    let mut pts: Vec<V3> = st.positions.values().copied().collect();
    pts.extend(st.anchors.values().copied());
    let (mut min, mut max) = ([0.0f64; 2], [1.0f64; 2]);
    if let Some(first) = pts.first() {
        min = [first[0], first[1]];
        max = min;
        for p in &pts {
            for d in 0..2 {
                min[d] = min[d].min(p[d]);
                max[d] = max[d].max(p[d]);
            }
        }
    }
    let pad = 10.0;
    let (w, h) = (max[0] - min[0] + 2.0 * pad, max[1] - min[1] + 2.0 * pad);
    // Flip y so that the model's y axis points up.
    let tx = |p: V3| (p[0] - min[0] + pad, max[1] - p[1] + pad);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w:.3} {h:.3}" width="{w:.0}" height="{h:.0}">"#
    );
    for (id, c) in &layout.scene.wires {
        let d: Vec<String> = c
            .sample(32)
            .into_iter()
            .map(|p| {
                let (x, y) = tx(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            s,
            r##"  <polyline class="wire" id="{}" points="{}" fill="none" stroke="#999" stroke-dasharray="2 2"/>"##,
            esc(&id.to_string()),
            d.join(" ")
        );
    }
    for (id, (len, wid)) in &st.sizes {
        let (Some(c), Some(frame)) = (st.centers.get(id), lyph_axis(model, st, id)) else {
            continue;
        };
        let (u, v) = frame;
        let corners = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)].map(|(a, b)| {
            let p = add(*c, add(scale(u, a * len / 2.0), scale(v, b * wid / 2.0)));
            let (x, y) = tx(p);
            format!("{x:.3},{y:.3}")
        });
        let _ = writeln!(
            s,
            r##"  <polygon class="lyph" id="{}" points="{}" fill="#cde" stroke="#468"/>"##,
            esc(&id.to_string()),
            corners.join(" ")
        );
    }
    for l in &layout.scene.links {
        let (a, b) = (&layout.scene.nodes[l.source], &layout.scene.nodes[l.target]);
        let (x1, y1) = tx(st.positions[a]);
        let (x2, y2) = tx(st.positions[b]);
        let _ = writeln!(
            s,
            r##"  <line class="link" id="{}" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="#333"/>"##,
            esc(&l.id.to_string())
        );
    }
    for (id, p) in &st.anchors {
        let (x, y) = tx(*p);
        let _ = writeln!(
            s,
            r##"  <rect class="anchor" id="{}" x="{:.3}" y="{:.3}" width="1.6" height="1.6" fill="#c60"/>"##,
            esc(&id.to_string()),
            x - 0.8,
            y - 0.8
        );
    }
    for (id, p) in &st.positions {
        let (x, y) = tx(*p);
        let _ = writeln!(
            s,
            r##"  <circle class="node" id="{}" cx="{x:.3}" cy="{y:.3}" r="0.6" fill="#222"><title>{}</title></circle>"##,
            esc(&id.to_string()),
            esc(&id.to_string())
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Axis and width direction of a lyph conveyed by a visible link, else the
/// coordinate axes.
fn lyph_axis(model: &Model, st: &LayoutState, lyph: &crate::id::Identifier) -> Option<(V3, V3)> {
    let link = model
        .get_in(lyph, ResourceClass::Lyph)
        .and_then(|l| l.reference("conveys"))
        .and_then(|l| model.get_in(l, ResourceClass::Link));
    if let Some(l) = link {
        let ends = (
            l.reference("source")
                .and_then(|n| model.get(n))
                .and_then(|n| st.positions.get(&n.id)),
            l.reference("target")
                .and_then(|n| model.get(n))
                .and_then(|n| st.positions.get(&n.id)),
        );
        if let (Some(a), Some(b)) = ends {
            let u = super::geometry::unit_or(sub(*b, *a), [1.0, 0.0, 0.0]);
            return Some((u, super::geometry::perpendicular(u)));
        }
    }
    Some(([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]))
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('"', "&quot;")
}
