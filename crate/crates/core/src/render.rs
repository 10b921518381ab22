//! Deterministic SVG rendering of a planning scene.
//!
//! World coordinates are used directly as SVG user units (x right, y down),
//! so one unit is one meter.

use std::fmt::Write;

use crate::geo_env::{current_magnitude_stats, CurrentField, GridMap, ObstacleSet, RealizedObstacle};
use crate::spline_path::Trajectory;

/// Quiver arrows are drawn one per block of this many cells on a side.
pub const QUIVER_BLOCK: usize = 8;

const LAND: &str = "#2b2b2b";
const WATER: &str = "#f4f7fb";

pub struct SceneLayers<'a> {
    pub map: &'a GridMap,
    pub field: &'a CurrentField,
    pub obstacles: &'a ObstacleSet,
    pub realized: &'a [RealizedObstacle],
    pub trajectory: Option<&'a Trajectory>,
    pub start: [f64; 3],
    pub goal: [f64; 3],
}

/// Blue (weak) to red (strong).
pub fn magnitude_color(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let r = (40.0 + 215.0 * t).round() as u8;
    let g = (90.0 + 60.0 * (1.0 - (2.0 * t - 1.0).abs())).round() as u8;
    let b = (230.0 - 200.0 * t).round() as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn fmt(v: f64) -> String {
    // fixed precision keeps the bytes stable and the file small
    let s = format!("{v:.1}");
    if s == "-0.0" {
        "0.0".into()
    } else {
        s
    }
}

pub fn render_svg(scene: &SceneLayers<'_>) -> String {
    let map = scene.map;
    let cs = map.cell_size();
    let [ox, oy] = map.origin();
    let [w, h] = [map.width() as f64 * cs, map.height() as f64 * cs];
    let mut out = String::with_capacity(256 * 1024);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="{}">"#,
        fmt(ox),
        fmt(oy),
        fmt(w),
        fmt(h),
        (800.0 * h / w).round()
    );
    let _ = writeln!(out, r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{WATER}"/>"#, fmt(ox), fmt(oy), fmt(w), fmt(h));

    // land as horizontal runs of occupied cells
    let _ = writeln!(out, r#"<g id="land" fill="{LAND}" shape-rendering="crispEdges">"#);
    for row in 0..map.height() {
        let mut col = 0;
        while col < map.width() {
            if !map.occupied(col, row) {
                col += 1;
                continue;
            }
            let begin = col;
            while col < map.width() && map.occupied(col, row) {
                col += 1;
            }
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{}"/>"#,
                fmt(ox + begin as f64 * cs),
                fmt(oy + row as f64 * cs),
                fmt((col - begin) as f64 * cs),
                fmt(cs)
            );
        }
    }
    out.push_str("</g>\n");

    write_quiver(&mut out, scene);

    let _ = writeln!(out, r#"<g id="obstacles">"#);
    for (o, r) in scene.obstacles.obstacles.iter().zip(scene.realized) {
        let (cx, cy) = (fmt(r.center[0]), fmt(r.center[1]));
        let _ = writeln!(
            out,
            r##"<circle cx="{cx}" cy="{cy}" r="{}" fill="none" stroke="#b03a2e" stroke-width="3" stroke-dasharray="12 8"/>"##,
            fmt(o.radius_bounds[1])
        );
        let _ = writeln!(
            out,
            r##"<circle cx="{cx}" cy="{cy}" r="{}" fill="#e74c3c" fill-opacity="0.45" stroke="#922b21" stroke-width="3"/>"##,
            fmt(r.radius)
        );
        let _ = writeln!(
            out,
            r##"<circle cx="{cx}" cy="{cy}" r="{}" fill="none" stroke="#922b21" stroke-width="1.5"/>"##,
            fmt(o.base_radius)
        );
    }
    out.push_str("</g>\n");

    if let Some(traj) = scene.trajectory {
        out.push_str(r##"<polyline id="path" fill="none" stroke="#f1c40f" stroke-width="8" stroke-linejoin="round" points=""##);
        for (i, s) in traj.samples.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{},{}", fmt(s.position[0]), fmt(s.position[1]));
        }
        out.push_str("\"/>\n");
    }

    let marker = (w.max(h) / 120.0).max(4.0);
    let _ = writeln!(
        out,
        r##"<circle id="start" cx="{}" cy="{}" r="{}" fill="#27ae60" stroke="#000" stroke-width="2"/>"##,
        fmt(scene.start[0]),
        fmt(scene.start[1]),
        fmt(marker)
    );
    let _ = writeln!(
        out,
        r##"<rect id="goal" x="{}" y="{}" width="{}" height="{}" fill="#8e44ad" stroke="#000" stroke-width="2"/>"##,
        fmt(scene.goal[0] - marker),
        fmt(scene.goal[1] - marker),
        fmt(2.0 * marker),
        fmt(2.0 * marker)
    );
    out.push_str("</svg>\n");
    out
}

fn write_quiver(out: &mut String, scene: &SceneLayers<'_>) {
    let map = scene.map;
    let Ok(stats) = current_magnitude_stats(scene.field, map) else { return };
    if stats.max <= 0.0 {
        return;
    }
    let block = QUIVER_BLOCK as f64 * map.cell_size();
    let span = (stats.max - stats.min).max(f64::MIN_POSITIVE);
    let _ = writeln!(out, r#"<g id="current" stroke-width="2.5" stroke-linecap="round" fill="none">"#);
    for by in (0..map.height()).step_by(QUIVER_BLOCK) {
        for bx in (0..map.width()).step_by(QUIVER_BLOCK) {
            let cx = map.origin()[0] + (bx as f64 + QUIVER_BLOCK as f64 / 2.0) * map.cell_size();
            let cy = map.origin()[1] + (by as f64 + QUIVER_BLOCK as f64 / 2.0) * map.cell_size();
            if map.is_forbidden([cx, cy]) {
                continue;
            }
            let [u, v] = scene.field.sample([cx, cy]);
            let m = u.hypot(v);
            if m <= 0.0 {
                continue;
            }
            let len = 0.85 * block * m / stats.max;
            let (dx, dy) = (u / m, v / m);
            let (x0, y0) = (cx - 0.5 * len * dx, cy - 0.5 * len * dy);
            let (x1, y1) = (cx + 0.5 * len * dx, cy + 0.5 * len * dy);
            let head = 0.3 * len;
            let (hx, hy) = (x1 - head * dx, y1 - head * dy);
            let (px, py) = (-dy * head * 0.5, dx * head * 0.5);
            let _ = writeln!(
                out,
                r#"<path stroke="{}" d="M{} {}L{} {}M{} {}L{} {}L{} {}"/>"#,
                magnitude_color((m - stats.min) / span),
                fmt(x0),
                fmt(y0),
                fmt(x1),
                fmt(y1),
                fmt(hx + px),
                fmt(hy + py),
                fmt(x1),
                fmt(y1),
                fmt(hx - px),
                fmt(hy - py)
            );
        }
    }
    out.push_str("</g>\n");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo_env::{LambVortex, Obstacle};

    fn scene_with<'a>(
        map: &'a GridMap,
        field: &'a CurrentField,
        set: &'a ObstacleSet,
        realized: &'a [RealizedObstacle],
    ) -> SceneLayers<'a> {
        SceneLayers {
            map,
            field,
            obstacles: set,
            realized,
            trajectory: None,
            start: [10.0, 10.0, 0.0],
            goal: [150.0, 150.0, 0.0],
        }
    }

    #[test]
    fn still_water_has_no_arrows() {
        let map = GridMap::open(32, 32, 10.0).unwrap();
        let field = CurrentField::still();
        let set = ObstacleSet::default();
        let svg = render_svg(&scene_with(&map, &field, &set, &[]));
        assert!(!svg.contains("id=\"current\""));
        assert!(!svg.contains("<path"));
    }

    #[test]
    fn swirl_gets_one_arrow_per_block() {
        let map = GridMap::open(32, 32, 10.0).unwrap();
        let field = CurrentField::new(vec![LambVortex::new([100.0, 120.0], 500.0, 60.0).unwrap()], [0.05, 0.0]).unwrap();
        let set = ObstacleSet::default();
        let svg = render_svg(&scene_with(&map, &field, &set, &[]));
        assert_eq!(svg.matches("<path").count(), 16);
    }

    #[test]
    fn rendering_is_byte_stable() {
        let mut map = GridMap::open(40, 30, 10.0).unwrap();
        map.set_occupied(3, 4, true);
        map.set_occupied(4, 4, true);
        let field = CurrentField::uniform([0.3, 0.1]);
        let set = ObstacleSet::new(vec![Obstacle::fixed([200.0, 100.0, 0.0], 30.0, [30.0, 50.0])]).unwrap();
        let realized = set.realize(1, 0);
        let a = render_svg(&scene_with(&map, &field, &set, &realized));
        let b = render_svg(&scene_with(&map, &field, &set, &realized));
        assert_eq!(a, b);
        // the two adjacent land cells merge into one run
        assert_eq!(a.matches(r#"width="20.0" height="10.0""#).count(), 1);
        assert!(a.contains("stroke-dasharray"));
    }

    #[test]
    fn color_ramp_ends() {
        assert_eq!(magnitude_color(0.0), "#285ae6");
        assert_eq!(magnitude_color(1.0), "#ff5a1e");
        assert_eq!(magnitude_color(f64::NAN), magnitude_color(0.0));
    }
}
