//! Static SVG figures: level sets of the Hamiltonian, and the gluing
//! diagram with the regions `P+`, `P-` and `D`.
//!
//! Output is deterministic for fixed inputs: floats are printed with a
//! fixed format and all iteration orders are index-driven.

use crate::geom::Point;
use crate::gluing::GluingData;
use crate::model::TorusModel;
use std::fmt::Write as _;

/// Level sets of the Hamiltonian on a square window around the smoothing
/// disk. For display the smoothing polynomial is used on the whole inner
/// disk (without the saddle-square normal-form override), so the contour
/// picture is continuous and shows the saddle/prong structure.
pub fn render_levelsets(model: &TorusModel, size_px: u32) -> String {
    let window = 1.15 * model.r_glue();
    let grid = 201;
    let display_h = |p: Point| -> f64 {
        if p.radius() >= model.r_sing() {
            model.mu() * p.radius().powi(2) * (model.n() as f64 * p.angle()).cos()
        } else {
            let z = num_complex::Complex64::new(p.x, p.y);
            let mu_prime = model.mu() * model.r_sing().powi(2 - model.n() as i32);
            mu_prime * (z.powu(model.n()) - z * smoothing_c(model)).re
        }
    };

    // Symmetric levels plus the zero level carrying the separatrices.
    let h_max = model.mu() * window * window;
    let mut levels = vec![0.0];
    for q in [0.02, 0.08, 0.18, 0.32, 0.5, 0.72] {
        levels.push(q * h_max);
        levels.push(-q * h_max);
    }

    let mut svg = svg_header(size_px, size_px);
    let to_px = |p: Point| -> (f64, f64) {
        (
            (p.x + window) / (2.0 * window) * size_px as f64,
            (window - p.y) / (2.0 * window) * size_px as f64,
        )
    };

    // Chart circles for orientation.
    for (r, color) in [
        (model.r_sing(), "#bbbbbb"),
        (model.r_glue(), "#dddddd"),
    ] {
        if r < window {
            let (cx, cy) = to_px(Point::new(0.0, 0.0));
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.4}" cy="{:.4}" r="{:.4}" fill="none" stroke="{}" stroke-dasharray="4 3"/>"#,
                cx,
                cy,
                r / (2.0 * window) * size_px as f64,
                color
            );
        }
    }

    for (li, &level) in levels.iter().enumerate() {
        let color = if level == 0.0 {
            "#c0392b"
        } else if level > 0.0 {
            "#2471a3"
        } else {
            "#239b56"
        };
        let segments = marching_squares(&display_h, window, grid, level);
        let chains = chain_segments(&segments, 1e-4 * window);
        for chain in &chains {
            let mut d = String::new();
            for (i, p) in chain.iter().enumerate() {
                let (x, y) = to_px(*p);
                let _ = write!(d, "{}{:.3} {:.3} ", if i == 0 { "M" } else { "L" }, x, y);
            }
            let _ = writeln!(
                svg,
                r#"<path d="{}" fill="none" stroke="{}" stroke-width="{}"/>"#,
                d.trim_end(),
                color,
                if level == 0.0 { "1.6" } else { "1.0" }
            );
        }
        let _ = li;
    }

    // Saddle markers.
    for s in model.saddle_points() {
        let (cx, cy) = to_px(*s);
        let _ = writeln!(svg, r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="3" fill="#1b2631"/>"##);
    }

    svg.push_str("</svg>\n");
    svg
}

fn smoothing_c(model: &TorusModel) -> f64 {
    model.params().c
}

/// The gluing diagram: the six arc families, the regions `P+`, `P-`, `D`,
/// and the reference circles.
pub fn render_gluing(model: &TorusModel, gd: &GluingData, size_px: u32) -> String {
    let window = 1.05 * gd.r_star;
    let mut svg = svg_header(size_px, size_px);
    let to_px = |p: Point| -> (f64, f64) {
        (
            (p.x + window) / (2.0 * window) * size_px as f64,
            (window - p.y) / (2.0 * window) * size_px as f64,
        )
    };
    let path_of = |pts: &[Point], close: bool| -> String {
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = to_px(*p);
            let _ = write!(d, "{}{:.3} {:.3} ", if i == 0 { "M" } else { "L" }, x, y);
        }
        if close {
            d.push('Z');
        }
        d
    };

    // Shaded regions: D, then P+ and P- above it.
    let _ = writeln!(
        svg,
        r##"<path d="{}" fill="#f9e79f" fill-opacity="0.45" stroke="#b7950b" stroke-width="1.2"/>"##,
        path_of(&gd.boundary_d, true)
    );
    let _ = writeln!(
        svg,
        r##"<path d="{}" fill="#aed6f1" fill-opacity="0.5" stroke="none"/>"##,
        path_of(&gd.p_plus_cycle(), true)
    );
    let _ = writeln!(
        svg,
        r##"<path d="{}" fill="#f5b7b1" fill-opacity="0.5" stroke="none"/>"##,
        path_of(&gd.p_minus_cycle(), true)
    );

    // Reference circles.
    for (r, color) in [(model.r_sing(), "#cccccc"), (gd.r_glue, "#999999"), (gd.r_star, "#cccccc")] {
        let (cx, cy) = to_px(Point::new(0.0, 0.0));
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.4}" cy="{:.4}" r="{:.4}" fill="none" stroke="{}" stroke-dasharray="5 4"/>"#,
            cx,
            cy,
            r / (2.0 * window) * size_px as f64,
            color
        );
    }

    // Arc families, one stroke color per family.
    let families: [(&Vec<crate::gluing::Arc>, &str, &str); 6] = [
        (&gd.a_plus, "#1a5276", "a+"),
        (&gd.a_minus, "#2e86c1", "a-"),
        (&gd.b_plus, "#943126", "b+"),
        (&gd.b_minus, "#e74c3c", "b-"),
        (&gd.c_plus, "#6c3483", "c+"),
        (&gd.c_minus, "#28b463", "c-"),
    ];
    for (arcs, color, label) in families {
        for arc in arcs.iter() {
            let _ = writeln!(
                svg,
                r#"<path d="{}" fill="none" stroke="{}" stroke-width="2.0"/>"#,
                path_of(&arc.points, false),
                color
            );
        }
        let _ = label;
    }

    // Saddle markers.
    for s in model.saddle_points() {
        let (cx, cy) = to_px(*s);
        let _ = writeln!(svg, r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="2.5" fill="#1b2631"/>"##);
    }

    svg.push_str("</svg>\n");
    svg
}

fn svg_header(w: u32, h: u32) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    )
}

/// Contour segments of `f = level` on a uniform grid over
/// `[-window, window]^2` by marching squares with linear interpolation.
fn marching_squares<F: Fn(Point) -> f64>(
    f: &F,
    window: f64,
    grid: usize,
    level: f64,
) -> Vec<(Point, Point)> {
    let step = 2.0 * window / (grid - 1) as f64;
    let coord = |i: usize| -window + i as f64 * step;
    let mut values = vec![0.0; grid * grid];
    for i in 0..grid {
        for j in 0..grid {
            values[i * grid + j] = f(Point::new(coord(i), coord(j))) - level;
        }
    }
    let mut segments = Vec::new();
    for i in 0..grid - 1 {
        for j in 0..grid - 1 {
            let v00 = values[i * grid + j];
            let v10 = values[(i + 1) * grid + j];
            let v01 = values[i * grid + j + 1];
            let v11 = values[(i + 1) * grid + j + 1];
            let x0 = coord(i);
            let y0 = coord(j);
            // Zero crossings on the four cell edges.
            let mut crossings: Vec<Point> = Vec::with_capacity(4);
            let mut edge = |a: f64, b: f64, pa: Point, pb: Point| {
                if (a < 0.0) != (b < 0.0) {
                    let t = a / (a - b);
                    crossings.push(Point::new(pa.x + t * (pb.x - pa.x), pa.y + t * (pb.y - pa.y)));
                }
            };
            edge(v00, v10, Point::new(x0, y0), Point::new(x0 + step, y0));
            edge(v10, v11, Point::new(x0 + step, y0), Point::new(x0 + step, y0 + step));
            edge(v01, v11, Point::new(x0, y0 + step), Point::new(x0 + step, y0 + step));
            edge(v00, v01, Point::new(x0, y0), Point::new(x0, y0 + step));
            if crossings.len() == 2 {
                segments.push((crossings[0], crossings[1]));
            } else if crossings.len() == 4 {
                // Ambiguous saddle cell: connect by center sign.
                let center = f(Point::new(x0 + 0.5 * step, y0 + 0.5 * step)) - level;
                if (center < 0.0) == (v00 < 0.0) {
                    segments.push((crossings[0], crossings[3]));
                    segments.push((crossings[1], crossings[2]));
                } else {
                    segments.push((crossings[0], crossings[1]));
                    segments.push((crossings[2], crossings[3]));
                }
            }
        }
    }
    segments
}

/// Chain loose segments into polylines by matching endpoints within a
/// quantization tolerance.
fn chain_segments(segments: &[(Point, Point)], tol: f64) -> Vec<Vec<Point>> {
    use std::collections::HashMap;
    let key = |p: Point| -> (i64, i64) { ((p.x / tol).round() as i64, (p.y / tol).round() as i64) };
    let mut endpoint_map: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (idx, (a, b)) in segments.iter().enumerate() {
        endpoint_map.entry(key(*a)).or_default().push(idx);
        endpoint_map.entry(key(*b)).or_default().push(idx);
    }
    let mut used = vec![false; segments.len()];
    let mut chains = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b) = segments[start];
        let mut chain = vec![a, b];
        // Extend forward from the tail, then backward from the head.
        loop {
            let tail = *chain.last().unwrap();
            let mut extended = false;
            if let Some(candidates) = endpoint_map.get(&key(tail)) {
                for &idx in candidates {
                    if used[idx] {
                        continue;
                    }
                    let (p, q) = segments[idx];
                    let next = if p.dist(tail) <= tol {
                        q
                    } else if q.dist(tail) <= tol {
                        p
                    } else {
                        continue;
                    };
                    used[idx] = true;
                    chain.push(next);
                    extended = true;
                    break;
                }
            }
            if !extended {
                break;
            }
        }
        loop {
            let head = chain[0];
            let mut extended = false;
            if let Some(candidates) = endpoint_map.get(&key(head)) {
                for &idx in candidates {
                    if used[idx] {
                        continue;
                    }
                    let (p, q) = segments[idx];
                    let prev = if p.dist(head) <= tol {
                        q
                    } else if q.dist(head) <= tol {
                        p
                    } else {
                        continue;
                    };
                    used[idx] = true;
                    chain.insert(0, prev);
                    extended = true;
                    break;
                }
            }
            if !extended {
                break;
            }
        }
        chains.push(chain);
    }
    chains
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gluing::construct_gluing_data;

    #[test]
    fn levelset_svg_is_deterministic_and_symmetric_in_structure() {
        let model = TorusModel::for_n(3).unwrap();
        let a = render_levelsets(&model, 480);
        let b = render_levelsets(&model, 480);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));
        // n - 1 saddle markers.
        assert_eq!(a.matches(r##"fill="#1b2631""##).count(), 2);
    }

    #[test]
    fn gluing_svg_has_all_arc_families() {
        let model = TorusModel::for_n(3).unwrap();
        let gd = construct_gluing_data(&model).unwrap();
        let svg = render_gluing(&model, &gd, 480);
        let again = render_gluing(&model, &gd, 480);
        assert_eq!(svg, again);
        // 6 families x 3 arcs = 18 colored strokes plus the region fills.
        for color in ["#1a5276", "#2e86c1", "#943126", "#e74c3c", "#6c3483", "#28b463"] {
            assert_eq!(svg.matches(color).count(), 3, "{color}");
        }
        assert!(svg.contains("fill-opacity"));
    }

    #[test]
    fn marching_squares_circle() {
        // Contour of x^2 + y^2 = 1 has total length close to 2 pi.
        let f = |p: Point| p.x * p.x + p.y * p.y;
        let segments = marching_squares(&f, 2.0, 201, 1.0);
        let total: f64 = segments.iter().map(|(a, b)| a.dist(*b)).sum();
        assert!((total - std::f64::consts::TAU).abs() < 0.01);
    }
}
