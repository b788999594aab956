//! Gluing data on the working disk: the arc families `a±`, `b±`, `c±`,
//! the regions `P+`, `P-` and `D`, and the combinatorial suture count.
//!
//! The `a+` arcs are angular windows of width `pi/n` on the gluing circle,
//! centered on the inward prong rays. The `b+` arcs connect them through
//! the complementary sectors as gently bulged circle arcs, so that the
//! `P+` boundary is smooth and the Hamiltonian is strictly monotone along
//! each `b+` (every level set crosses it once). Their time-1 images `a-`,
//! `b-` land strictly outside the gluing circle at the endpoints, which is
//! what makes the straight connectors `c±` and the rounded region `D`
//! possible.
//!
//! All arcs are stored as uniform-parameter polylines; identification
//! checks compare flowed sample points against cubic interpolation of the
//! stored image arcs.

use crate::error::GluingError;
use crate::flow;
use crate::geom::Point;
use crate::model::TorusModel;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

const ARC_NODES: usize = 257;
const SEGMENT_NODES: usize = 65;
const FILLET_NODES: usize = 33;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArcKind {
    APlus,
    AMinus,
    BPlus,
    BMinus,
    CPlus,
    CMinus,
}

/// A parametrized curve stored as a polyline with uniform parameter.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Arc {
    pub kind: ArcKind,
    pub index: usize,
    pub points: Vec<Point>,
}

impl Arc {
    pub fn first(&self) -> Point {
        self.points[0]
    }

    pub fn last(&self) -> Point {
        *self.points.last().unwrap()
    }

    /// Cubic Catmull-Rom interpolation at parameter `u` in `[0, 1]`.
    pub fn interpolate(&self, u: f64) -> Point {
        let m = self.points.len();
        let t = u.clamp(0.0, 1.0) * (m - 1) as f64;
        let i = (t.floor() as usize).min(m - 2);
        let s = t - i as f64;
        let p = |j: isize| {
            let idx = (i as isize + j).clamp(0, m as isize - 1) as usize;
            self.points[idx]
        };
        let (p0, p1, p2, p3) = (p(-1), p(0), p(1), p(2));
        let c = |a: f64, b: f64, cc: f64, d: f64| {
            0.5 * ((2.0 * b) + (-a + cc) * s + (2.0 * a - 5.0 * b + 4.0 * cc - d) * s * s
                + (-a + 3.0 * b - 3.0 * cc + d) * s * s * s)
        };
        Point::new(c(p0.x, p1.x, p2.x, p3.x), c(p0.y, p1.y, p2.y, p3.y))
    }

    pub fn min_radius(&self) -> f64 {
        self.points.iter().map(|p| p.radius()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_radius(&self) -> f64 {
        self.points.iter().map(|p| p.radius()).fold(0.0, f64::max)
    }
}

/// Strictly positive margin observed by a geometric check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MarginReport {
    pub name: String,
    pub min_margin: f64,
    pub samples: usize,
    pub pass: bool,
}

impl MarginReport {
    fn new(name: &str, margins: impl IntoIterator<Item = f64>) -> Self {
        let mut min_margin = f64::INFINITY;
        let mut samples = 0;
        for m in margins {
            min_margin = min_margin.min(m);
            samples += 1;
        }
        MarginReport {
            name: name.to_string(),
            min_margin,
            samples,
            pass: samples > 0 && min_margin > 0.0,
        }
    }
}

/// The constructed gluing data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GluingData {
    pub n: u32,
    pub a_plus: Vec<Arc>,
    pub a_minus: Vec<Arc>,
    pub b_plus: Vec<Arc>,
    pub b_minus: Vec<Arc>,
    pub c_plus: Vec<Arc>,
    pub c_minus: Vec<Arc>,
    /// Closed boundary of `D` with rounded corners.
    pub boundary_d: Vec<Point>,
    /// Inner radius of the annulus `V(R)` hosting all arcs.
    pub r_inner: f64,
    /// Gluing circle radius actually used (doubled from the model value
    /// if the model radii were inadmissible).
    pub r_glue: f64,
    pub r_star: f64,
    /// Common radius of the flowed `a+` endpoints.
    pub r_tilde: f64,
    /// Bulge actually used for the `b+` arcs.
    pub delta: f64,
}

impl GluingData {
    /// `P+` boundary cycle: alternating `a+` and `b+` arcs.
    pub fn p_plus_cycle(&self) -> Vec<Point> {
        cycle_of(&self.a_plus, &self.b_plus)
    }

    /// `P-` boundary cycle: alternating `a-` and `b-` arcs.
    pub fn p_minus_cycle(&self) -> Vec<Point> {
        cycle_of(&self.a_minus, &self.b_minus)
    }
}

fn cycle_of(first: &[Arc], second: &[Arc]) -> Vec<Point> {
    let mut cycle = Vec::new();
    for k in 0..first.len() {
        cycle.extend_from_slice(&first[k].points[..first[k].points.len() - 1]);
        cycle.extend_from_slice(&second[k].points[..second[k].points.len() - 1]);
    }
    cycle
}

/// Angular window of `a+_k`: centered on the inward prong ray
/// `3 pi / 2n + 2 pi k / n`, of half-width `pi / 2n`.
pub fn a_plus_window(n: u32, k: usize) -> (f64, f64) {
    let n = n as f64;
    let center = 3.0 * PI / (2.0 * n) + TAU * k as f64 / n;
    (center - PI / (2.0 * n), center + PI / (2.0 * n))
}

fn flow_arc(model: &TorusModel, arc: &Arc, kind: ArcKind) -> Result<Arc, GluingError> {
    let mut points = Vec::with_capacity(arc.points.len());
    for &p in &arc.points {
        let r = flow::flow_in_beta_domain(model, p, 1.0).map_err(GluingError::Flow)?;
        points.push(r.endpoint);
    }
    Ok(Arc { kind, index: arc.index, points })
}

fn smooth_bump_01(u: f64) -> f64 {
    // Flat to all orders at both ends, peak value 1 at u = 1/2.
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        (-1.0 / (u * (1.0 - u))).exp() / (-4.0f64).exp()
    }
}

/// Construct the gluing data. Starts from the model radii and doubles the
/// gluing radius (rescaling the working radius with it) until the
/// admissibility bounds hold; the radii actually used are recorded in the
/// result.
pub fn construct_gluing_data(model: &TorusModel) -> Result<GluingData, GluingError> {
    let n = model.n();
    let r_inner = model.settled_radius();
    let growth = (n as f64 * model.mu()).exp();

    let mut r_glue = model.r_glue();
    let mut r_star = model.r_star();
    let mut doublings = 0;
    // Flowed a- arcs dip down to r_glue * exp(-n mu); keep that above the
    // inner annulus radius with margin.
    while r_glue < 1.1 * r_inner * growth {
        r_glue *= 2.0;
        r_star *= 2.0;
        doublings += 1;
        if doublings > 12 {
            return Err(GluingError::ArcConstructionFailure {
                property: "V(R)".into(),
                reason: "no admissible gluing radius found by doubling".into(),
            });
        }
    }

    // a+ arcs on the gluing circle.
    let mut a_plus = Vec::with_capacity(n as usize);
    for k in 0..n as usize {
        let (lo, hi) = a_plus_window(n, k);
        let points = (0..ARC_NODES)
            .map(|i| {
                let theta = lo + (hi - lo) * i as f64 / (ARC_NODES - 1) as f64;
                Point::from_polar(r_glue, theta)
            })
            .collect();
        a_plus.push(Arc { kind: ArcKind::APlus, index: k, points });
    }

    // b+ arcs: bulged circle arcs over the complementary sectors, with
    // the bulge shrunk until the Hamiltonian is strictly monotone along
    // each arc (property P5).
    let mut delta = 0.05;
    let b_plus = loop {
        let mut arcs = Vec::with_capacity(n as usize);
        for k in 0..n as usize {
            let (_, lo) = a_plus_window(n, k);
            let (hi, _) = a_plus_window(n, (k + 1) % n as usize);
            let hi = if hi < lo { hi + TAU } else { hi };
            let points = (0..ARC_NODES)
                .map(|i| {
                    let u = i as f64 / (ARC_NODES - 1) as f64;
                    let theta = lo + (hi - lo) * u;
                    Point::from_polar(r_glue * (1.0 + delta * smooth_bump_01(u)), theta)
                })
                .collect();
            arcs.push(Arc { kind: ArcKind::BPlus, index: k, points });
        }
        if arcs.iter().all(|arc| hamiltonian_strictly_monotone(model, arc)) {
            break arcs;
        }
        delta *= 0.5;
        if delta < 1e-4 {
            return Err(GluingError::ArcConstructionFailure {
                property: "P5".into(),
                reason: "no bulge makes the Hamiltonian monotone along b+".into(),
            });
        }
    };

    // Flowed images.
    let a_minus: Vec<Arc> = a_plus
        .iter()
        .map(|arc| flow_arc(model, arc, ArcKind::AMinus))
        .collect::<Result<_, _>>()?;
    let b_minus: Vec<Arc> = b_plus
        .iter()
        .map(|arc| flow_arc(model, arc, ArcKind::BMinus))
        .collect::<Result<_, _>>()?;

    // Common endpoint radius of the flowed a+ arcs.
    let mut endpoint_radii = Vec::new();
    for arc in &a_minus {
        endpoint_radii.push(arc.first().radius());
        endpoint_radii.push(arc.last().radius());
    }
    let r_tilde = endpoint_radii.iter().sum::<f64>() / endpoint_radii.len() as f64;
    let spread = endpoint_radii.iter().map(|r| (r - r_tilde).abs()).fold(0.0, f64::max);
    if spread > model.tol().flow * (1.0 + r_tilde) {
        return Err(GluingError::ArcConstructionFailure {
            property: "endpoint-radius".into(),
            reason: format!("flowed endpoint radii spread {spread} exceeds tolerance"),
        });
    }
    if r_tilde <= r_glue {
        return Err(GluingError::ArcConstructionFailure {
            property: "endpoint-radius".into(),
            reason: format!("flowed endpoints at radius {r_tilde} <= gluing radius {r_glue}"),
        });
    }

    // Grow the working radius if the flowed arcs need more room.
    let max_radius = a_minus
        .iter()
        .chain(b_minus.iter())
        .map(Arc::max_radius)
        .fold(0.0, f64::max);
    if max_radius > 0.95 * r_star {
        r_star = 1.1 * max_radius;
    }

    // Straight connectors.
    let mut c_minus = Vec::with_capacity(n as usize);
    let mut c_plus = Vec::with_capacity(n as usize);
    for k in 0..n as usize {
        c_minus.push(segment_arc(ArcKind::CMinus, k, a_plus[k].last(), b_minus[k].first()));
        let next = (k + 1) % n as usize;
        c_plus.push(segment_arc(ArcKind::CPlus, k, b_minus[k].last(), a_plus[next].first()));
    }

    // Rounded boundary of D: a+_k, c-_k, b-_k, c+_k, repeated.
    let mut d_arcs: Vec<&Arc> = Vec::new();
    for k in 0..n as usize {
        d_arcs.push(&a_plus[k]);
        d_arcs.push(&c_minus[k]);
        d_arcs.push(&b_minus[k]);
        d_arcs.push(&c_plus[k]);
    }
    let boundary_d = round_corners(&d_arcs, 0.05 * r_glue);

    let gd = GluingData {
        n,
        a_plus,
        a_minus,
        b_plus,
        b_minus,
        c_plus,
        c_minus,
        boundary_d,
        r_inner,
        r_glue,
        r_star,
        r_tilde,
        delta,
    };
    validate_construction(model, &gd)?;
    Ok(gd)
}

fn segment_arc(kind: ArcKind, index: usize, from: Point, to: Point) -> Arc {
    let points = (0..SEGMENT_NODES)
        .map(|i| {
            let s = i as f64 / (SEGMENT_NODES - 1) as f64;
            Point::new(from.x + s * (to.x - from.x), from.y + s * (to.y - from.y))
        })
        .collect();
    Arc { kind, index, points }
}

fn hamiltonian_strictly_monotone(model: &TorusModel, arc: &Arc) -> bool {
    let mut prev = f64::INFINITY;
    for i in 0..512 {
        let p = arc.interpolate(i as f64 / 511.0);
        let h = match model.eval_h(p) {
            Ok(h) => h,
            Err(_) => return false,
        };
        if h >= prev {
            return false;
        }
        prev = h;
    }
    true
}

/// Replace the corner at each junction of the arc cycle with a cubic
/// Hermite blend over a trimmed neighborhood. Returns a closed polyline
/// (first point not repeated at the end).
fn round_corners(arcs: &[&Arc], fillet: f64) -> Vec<Point> {
    let m = arcs.len();
    let mut out = Vec::new();
    for i in 0..m {
        let arc = arcs[i];
        let next = arcs[(i + 1) % m];
        // Trimmed tail of the current arc and head of the next.
        let (tail_idx, tail_pt, tail_tan) = trim_from_end(arc, fillet);
        let (head_idx, head_pt, head_tan) = trim_from_start(next, fillet);
        // Interior of the current arc up to the trim point (the head trim
        // of this arc was consumed by the previous junction's blend).
        let (start_idx, _, _) = trim_from_start(arc, fillet);
        out.extend_from_slice(&arc.points[start_idx..=tail_idx]);
        out.push(tail_pt);
        // Hermite blend from tail_pt to head_pt.
        let scale = tail_pt.dist(head_pt);
        for j in 1..FILLET_NODES {
            let s = j as f64 / FILLET_NODES as f64;
            out.push(hermite(tail_pt, tail_tan.scale(scale), head_pt, head_tan.scale(scale), s));
        }
        let _ = head_idx;
    }
    out
}

fn hermite(p0: Point, m0: Point, p1: Point, m1: Point, s: f64) -> Point {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    Point::new(
        h00 * p0.x + h10 * m0.x + h01 * p1.x + h11 * m1.x,
        h00 * p0.y + h10 * m0.y + h01 * p1.y + h11 * m1.y,
    )
}

fn trim_from_end(arc: &Arc, len: f64) -> (usize, Point, Point) {
    let pts = &arc.points;
    let mut acc = 0.0;
    let mut i = pts.len() - 1;
    while i > 0 {
        let d = pts[i].dist(pts[i - 1]);
        if acc + d >= len {
            let s = (len - acc) / d;
            let p = Point::new(
                pts[i].x + s * (pts[i - 1].x - pts[i].x),
                pts[i].y + s * (pts[i - 1].y - pts[i].y),
            );
            let tan = unit(pts[i].sub(pts[i - 1]));
            return (i - 1, p, tan);
        }
        acc += d;
        i -= 1;
    }
    (0, pts[0], unit(pts[1].sub(pts[0])))
}

fn trim_from_start(arc: &Arc, len: f64) -> (usize, Point, Point) {
    let pts = &arc.points;
    let mut acc = 0.0;
    for i in 0..pts.len() - 1 {
        let d = pts[i].dist(pts[i + 1]);
        if acc + d >= len {
            let s = (len - acc) / d;
            let p = Point::new(
                pts[i].x + s * (pts[i + 1].x - pts[i].x),
                pts[i].y + s * (pts[i + 1].y - pts[i].y),
            );
            let tan = unit(pts[i + 1].sub(pts[i]));
            return (i + 1, p, tan);
        }
        acc += d;
    }
    let m = pts.len();
    (m - 1, pts[m - 1], unit(pts[m - 1].sub(pts[m - 2])))
}

fn unit(v: Point) -> Point {
    let n = v.radius();
    if n == 0.0 {
        v
    } else {
        v.scale(1.0 / n)
    }
}

/// Construction-time validation of properties P1-P5, containment and
/// embeddedness. Failures name the violated property.
fn validate_construction(model: &TorusModel, gd: &GluingData) -> Result<(), GluingError> {
    let n = gd.n as usize;
    let fail = |property: &str, reason: String| {
        Err(GluingError::ArcConstructionFailure { property: property.into(), reason })
    };

    // P1: b+_k runs from the terminal point of a+_k to the initial point
    // of a+_{k+1}.
    for k in 0..n {
        if gd.b_plus[k].first().dist(gd.a_plus[k].last()) > 1e-9
            || gd.b_plus[k].last().dist(gd.a_plus[(k + 1) % n].first()) > 1e-9
        {
            return fail("P1", format!("b+[{k}] endpoints do not match the a+ arcs"));
        }
    }

    // P2: b+ stays inside its angular sector, outside the smoothing disk,
    // and inside the annulus V(R).
    for k in 0..n {
        let (_, lo) = a_plus_window(gd.n, k);
        let (hi_raw, _) = a_plus_window(gd.n, (k + 1) % n);
        let hi = if hi_raw < lo { hi_raw + TAU } else { hi_raw };
        for p in &gd.b_plus[k].points {
            let mut theta = p.angle();
            while theta < lo - 1e-12 {
                theta += TAU;
            }
            if theta > hi + 1e-12 {
                return fail("P2", format!("b+[{k}] leaves its angular sector"));
            }
            let r = p.radius();
            if r <= model.r_sing() || r < gd.r_inner || r > gd.r_star {
                return fail("P2", format!("b+[{k}] leaves the annulus V(R)"));
            }
        }
    }

    // P3: the flowed b+ arcs stay strictly outside the gluing circle.
    for k in 0..n {
        let min_r = gd.b_minus[k].min_radius();
        if min_r <= gd.r_glue {
            return fail("P3", format!("b-[{k}] reaches radius {min_r} <= R = {}", gd.r_glue));
        }
    }

    // P4: the P+ boundary is smooth at the a+/b+ junctions (the bulge is
    // flat to all orders at its ends, so consecutive segment directions
    // agree up to discretization).
    for k in 0..n {
        let a_end = &gd.a_plus[k].points;
        let b_start = &gd.b_plus[k].points;
        let t1 = unit(a_end[a_end.len() - 1].sub(a_end[a_end.len() - 2]));
        let t2 = unit(b_start[1].sub(b_start[0]));
        if t1.dot(t2) < 1.0 - 1e-4 {
            return fail("P4", format!("P+ boundary kinks at the a+[{k}]/b+[{k}] junction"));
        }
    }

    // P5 was enforced during the bulge search; re-check on the final arcs.
    for k in 0..n {
        if !hamiltonian_strictly_monotone(model, &gd.b_plus[k]) {
            return fail("P5", format!("Hamiltonian not monotone along b+[{k}]"));
        }
    }

    // Containment: every arc family inside V(R) = [r_inner, r_star].
    for arc in arc_iter(gd) {
        if arc.min_radius() < gd.r_inner - 1e-9 || arc.max_radius() > gd.r_star + 1e-9 {
            return fail(
                "V(R)",
                format!(
                    "{:?}[{}] spans radii [{}, {}] outside [{}, {}]",
                    arc.kind,
                    arc.index,
                    arc.min_radius(),
                    arc.max_radius(),
                    gd.r_inner,
                    gd.r_star
                ),
            );
        }
    }

    // Endpoint angle windows of the flowed a+ arcs.
    for k in 0..n {
        let (lo, hi) = a_plus_window(gd.n, k);
        let half = PI / (2.0 * gd.n as f64);
        let t_minus = wrap_near(gd.a_minus[k].first().angle(), lo);
        let t_plus = wrap_near(gd.a_minus[k].last().angle(), hi);
        if !(t_minus > lo - half && t_minus < lo) {
            return fail("endpoint-angle", format!("a-[{k}] initial angle {t_minus} outside ({}, {})", lo - half, lo));
        }
        if !(t_plus > hi && t_plus < hi + half) {
            return fail("endpoint-angle", format!("a-[{k}] terminal angle {t_plus} outside ({}, {})", hi, hi + half));
        }
    }

    // c- touches the gluing disk only at its initial point, c+ only at
    // its terminal point.
    for k in 0..n {
        for (i, p) in gd.c_minus[k].points.iter().enumerate().skip(1) {
            if p.radius() <= gd.r_glue {
                return fail("c-arcs", format!("c-[{k}] node {i} re-enters the gluing disk"));
            }
        }
        for (i, p) in gd.c_plus[k].points.iter().enumerate() {
            if i + 1 < gd.c_plus[k].points.len() && p.radius() <= gd.r_glue {
                return fail("c-arcs", format!("c+[{k}] node {i} re-enters the gluing disk"));
            }
        }
    }

    // The rounded boundary of D is a closed embedded curve.
    if !polyline_is_simple(&gd.boundary_d) {
        return fail("embedded-boundary", "the rounded boundary of D self-intersects".into());
    }

    Ok(())
}

fn wrap_near(angle: f64, reference: f64) -> f64 {
    let mut a = angle;
    while a < reference - PI {
        a += TAU;
    }
    while a > reference + PI {
        a -= TAU;
    }
    a
}

fn arc_iter(gd: &GluingData) -> impl Iterator<Item = &Arc> {
    gd.a_plus
        .iter()
        .chain(gd.a_minus.iter())
        .chain(gd.b_plus.iter())
        .chain(gd.b_minus.iter())
        .chain(gd.c_plus.iter())
        .chain(gd.c_minus.iter())
}

/// Proper-intersection test for a closed polyline (adjacent segments
/// excluded).
fn polyline_is_simple(pts: &[Point]) -> bool {
    let m = pts.len();
    let seg = |i: usize| (pts[i], pts[(i + 1) % m]);
    for i in 0..m {
        for j in (i + 2)..m {
            if i == 0 && j == m - 1 {
                continue;
            }
            let (a, b) = seg(i);
            let (c, d) = seg(j);
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let cross = |o: Point, p: Point, q: Point| (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x);
    let d1 = cross(a, b, c);
    let d2 = cross(a, b, d);
    let d3 = cross(c, d, a);
    let d4 = cross(c, d, b);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Shoelace signed area (positive = counterclockwise).
fn signed_area(pts: &[Point]) -> f64 {
    let m = pts.len();
    let mut acc = 0.0;
    for i in 0..m {
        let p = pts[i];
        let q = pts[(i + 1) % m];
        acc += p.x * q.y - q.x * p.y;
    }
    0.5 * acc
}

/// Margins of positive transversality of the Liouville field `r/2 d/dr`
/// against the outward normal of a closed cycle.
fn transversality_margins(cycle: &[Point]) -> Vec<f64> {
    let m = cycle.len();
    let ccw = signed_area(cycle) > 0.0;
    let mut margins = Vec::with_capacity(m);
    for i in 0..m {
        let prev = cycle[(i + m - 1) % m];
        let next = cycle[(i + 1) % m];
        let tangent = unit(next.sub(prev));
        // Outward normal of a CCW cycle is the tangent rotated by -90 deg.
        let normal = if ccw {
            Point::new(tangent.y, -tangent.x)
        } else {
            Point::new(-tangent.y, tangent.x)
        };
        margins.push(cycle[i].scale(0.5).dot(normal));
    }
    margins
}

fn min_polyline_distance(a: &[Point], b: &[Point]) -> f64 {
    let mut best = f64::INFINITY;
    for p in a {
        for i in 0..b.len() - 1 {
            best = best.min(point_segment_distance(*p, b[i], b[i + 1]));
        }
    }
    best
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a.add(ab.scale(t)))
}

/// Verification report for the gluing data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GluingReport {
    pub n: u32,
    pub r_inner: f64,
    pub r_glue: f64,
    pub r_star: f64,
    pub r_tilde: f64,
    pub delta: f64,
    pub suture_count: usize,
    pub expected_sutures: usize,
    pub identification: Vec<crate::verify::CheckReport>,
    pub margins: Vec<MarginReport>,
    pub pass: bool,
}

/// Check the gluing data: transversality of the Liouville field along all
/// region boundaries, flow identification of the arc pairs, containment,
/// disjointness, and the suture count.
pub fn verify_gluing(model: &TorusModel, gd: &GluingData) -> Result<GluingReport, GluingError> {
    let mut margins = Vec::new();

    margins.push(MarginReport::new("transversality_p_plus", transversality_margins(&gd.p_plus_cycle())));
    margins.push(MarginReport::new("transversality_p_minus", transversality_margins(&gd.p_minus_cycle())));
    margins.push(MarginReport::new("transversality_d", transversality_margins(&gd.boundary_d)));

    // Flow identification: flowed mid-parameter samples of each a+/b+ arc
    // against cubic interpolation of the stored image arc.
    let mut identification = Vec::new();
    for (plus, minus, name) in [
        (&gd.a_plus, &gd.a_minus, "identification_a"),
        (&gd.b_plus, &gd.b_minus, "identification_b"),
    ] {
        let mut defects = Vec::new();
        let mut skipped = 0;
        for (p_arc, m_arc) in plus.iter().zip(minus.iter()) {
            for j in 0..64 {
                let u = (j as f64 + 0.5) / 64.0;
                match flow::flow_in_beta_domain(model, p_arc.interpolate(u), 1.0) {
                    Ok(r) => defects.push(r.endpoint.dist(m_arc.interpolate(u))),
                    Err(_) => skipped += 1,
                }
            }
        }
        identification.push(crate::verify::CheckReport::from_parts(
            name,
            model.tol().flow,
            defects,
            skipped,
        ));
    }

    // Containment margins within V(R).
    margins.push(MarginReport::new(
        "containment_v_r",
        arc_iter(gd).flat_map(|arc| {
            [arc.min_radius() - gd.r_inner, gd.r_star - arc.max_radius()]
        }),
    ));

    // Disjointness minima mandated by the construction.
    let collect = |arcs: &[Arc]| -> Vec<Vec<Point>> { arcs.iter().map(|a| a.points.clone()).collect() };
    let a_plus_pts = collect(&gd.a_plus);
    let a_minus_pts = collect(&gd.a_minus);
    let b_plus_pts = collect(&gd.b_plus);
    let b_minus_pts = collect(&gd.b_minus);
    let family_distance = |xs: &[Vec<Point>], ys: &[Vec<Point>]| -> f64 {
        let mut best = f64::INFINITY;
        for x in xs {
            for y in ys {
                best = best.min(min_polyline_distance(x, y));
            }
        }
        best
    };
    margins.push(MarginReport::new(
        "disjoint_a_plus_a_minus",
        [family_distance(&a_plus_pts, &a_minus_pts)],
    ));
    margins.push(MarginReport::new(
        "disjoint_b_plus_b_minus",
        [family_distance(&b_plus_pts, &b_minus_pts)],
    ));
    // pi-projection disjointness of the boundary parts of P- and P+.
    margins.push(MarginReport::new(
        "disjoint_a_plus_b_minus",
        [family_distance(&a_plus_pts, &b_minus_pts)],
    ));

    let suture_count = suture_count(model, gd)?;
    let expected = 2 * gd.n as usize;

    let pass = margins.iter().all(|m| m.pass)
        && identification.iter().all(|c| c.pass)
        && suture_count == expected;

    Ok(GluingReport {
        n: gd.n,
        r_inner: gd.r_inner,
        r_glue: gd.r_glue,
        r_star: gd.r_star,
        r_tilde: gd.r_tilde,
        delta: gd.delta,
        suture_count,
        expected_sutures: expected,
        identification,
        margins,
        pass,
    })
}

/// Count the boundary components of the glued suture combinatorially.
///
/// The suture of the pre-glued piece is the boundary of `D`; gluing
/// removes the `a+` and `b-` arcs and identifies the corner points of
/// `P+` (the `a+` endpoints) with the corner points of `P-` (the `b-`
/// endpoints) through the time-1 map. What remains are the `c±` segments
/// with their endpoints identified; each connected cycle of this graph is
/// one suture component.
pub fn suture_count(model: &TorusModel, gd: &GluingData) -> Result<usize, GluingError> {
    let n = gd.n as usize;
    // Nodes: 2n corners of P+ (a+ endpoints), 2n corners of P- (b-
    // endpoints). Indexing: P+ corner 2k = initial of a+_k, 2k+1 =
    // terminal of a+_k; P- corner 2k = initial of b-_k, 2k+1 = terminal.
    let total = 4 * n;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); total];
    let p_plus_corner = |k: usize, terminal: bool| 2 * k + terminal as usize;
    let p_minus_corner = |k: usize, terminal: bool| 2 * n + 2 * k + terminal as usize;

    // c-segment edges along the old suture.
    for k in 0..n {
        // c-_k joins terminal of a+_k to initial of b-_k.
        adj[p_plus_corner(k, true)].push(p_minus_corner(k, false));
        adj[p_minus_corner(k, false)].push(p_plus_corner(k, true));
        // c+_k joins terminal of b-_k to initial of a+_{k+1}.
        adj[p_minus_corner(k, true)].push(p_plus_corner((k + 1) % n, false));
        adj[p_plus_corner((k + 1) % n, false)].push(p_minus_corner(k, true));
    }

    // Identification edges: the flowed image of each P+ corner must land
    // on exactly one P- corner.
    let mut minus_positions = Vec::with_capacity(2 * n);
    for k in 0..n {
        minus_positions.push((p_minus_corner(k, false), gd.b_minus[k].first()));
        minus_positions.push((p_minus_corner(k, true), gd.b_minus[k].last()));
    }
    let match_tol = model.tol().flow * (1.0 + gd.r_tilde) * 10.0;
    let mut used = vec![false; 2 * n];
    for k in 0..n {
        for (corner, point) in [
            (p_plus_corner(k, false), gd.a_plus[k].first()),
            (p_plus_corner(k, true), gd.a_plus[k].last()),
        ] {
            let image = flow::flow_in_beta_domain(model, point, 1.0)
                .map_err(GluingError::Flow)?
                .endpoint;
            let mut best = (f64::INFINITY, usize::MAX);
            for (i, (node, pos)) in minus_positions.iter().enumerate() {
                let d = image.dist(*pos);
                if d < best.0 {
                    best = (d, i);
                    let _ = node;
                }
            }
            if best.0 > match_tol {
                return Err(GluingError::InconsistentIdentification {
                    reason: format!(
                        "flowed P+ corner lands {} away from the nearest P- corner",
                        best.0
                    ),
                });
            }
            if used[best.1] {
                return Err(GluingError::InconsistentIdentification {
                    reason: "two P+ corners map to the same P- corner".into(),
                });
            }
            used[best.1] = true;
            let node = minus_positions[best.1].0;
            adj[corner].push(node);
            adj[node].push(corner);
        }
    }

    // Every node must have degree 2 (one suture segment, one gluing
    // identification); count cycles.
    for (i, neighbors) in adj.iter().enumerate() {
        if neighbors.len() != 2 {
            return Err(GluingError::InconsistentIdentification {
                reason: format!("corner {i} has degree {}", neighbors.len()),
            });
        }
    }
    let mut seen = vec![false; total];
    let mut components = 0;
    for start in 0..total {
        if seen[start] {
            continue;
        }
        components += 1;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            for &w in &adj[v] {
                if !seen[w] {
                    stack.push(w);
                }
            }
        }
    }
    Ok(components)
}

/// Convenience wrapper: construct and verify in one call.
pub fn build_and_verify(model: &TorusModel) -> Result<(GluingData, GluingReport), GluingError> {
    let gd = construct_gluing_data(model)?;
    let report = verify_gluing(model, &gd)?;
    Ok((gd, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_plus_window_matches_formula() {
        // n=3, k=0: [pi/3, 2pi/3].
        let (lo, hi) = a_plus_window(3, 0);
        assert!((lo - PI / 3.0).abs() < 1e-15);
        assert!((hi - 2.0 * PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn construction_passes_for_n3() {
        let model = TorusModel::for_n(3).unwrap();
        let (gd, report) = build_and_verify(&model).unwrap();
        assert_eq!(gd.a_plus.len(), 3);
        assert_eq!(gd.b_minus.len(), 3);
        assert!(report.pass, "{report:?}");
        assert_eq!(report.suture_count, 6);
        assert!(gd.r_tilde > gd.r_glue);
    }

    #[test]
    fn suture_counts_for_small_n() {
        for n in [2u32, 5] {
            let model = TorusModel::for_n(n).unwrap();
            let gd = construct_gluing_data(&model).unwrap();
            assert_eq!(suture_count(&model, &gd).unwrap(), 2 * n as usize, "n = {n}");
        }
    }

    #[test]
    fn transversality_on_gluing_circle_is_half_r() {
        let model = TorusModel::for_n(2).unwrap();
        let gd = construct_gluing_data(&model).unwrap();
        let margins = transversality_margins(&gd.p_plus_cycle());
        // The cycle starts with the interior of a+[0], a circle arc of
        // radius R where the margin is exactly R/2.
        for &m in &margins[10..ARC_NODES - 10] {
            assert!((m - gd.r_glue / 2.0).abs() < 1e-3 * gd.r_glue, "margin {m}");
        }
        assert!(margins.iter().all(|&m| m > 0.0));
    }

    #[test]
    fn endpoint_angles_sit_in_their_windows() {
        let model = TorusModel::for_n(4).unwrap();
        let gd = construct_gluing_data(&model).unwrap();
        let half = PI / (2.0 * gd.n as f64);
        for k in 0..gd.n as usize {
            let (lo, hi) = a_plus_window(gd.n, k);
            let t0 = wrap_near(gd.a_minus[k].first().angle(), lo);
            let t1 = wrap_near(gd.a_minus[k].last().angle(), hi);
            assert!(t0 > lo - half && t0 < lo);
            assert!(t1 > hi && t1 < hi + half);
            assert!((gd.a_minus[k].first().radius() - gd.r_tilde).abs() < 1e-6 * gd.r_tilde);
        }
    }

    #[test]
    fn boundary_d_is_simple_and_ccw() {
        let model = TorusModel::for_n(3).unwrap();
        let gd = construct_gluing_data(&model).unwrap();
        assert!(polyline_is_simple(&gd.boundary_d));
        assert!(signed_area(&gd.boundary_d) > 0.0);
    }

    #[test]
    fn gluing_data_serializes() {
        let model = TorusModel::for_n(2).unwrap();
        let gd = construct_gluing_data(&model).unwrap();
        let json = serde_json::to_string(&gd).unwrap();
        assert!(json.contains("a_plus"));
        assert!(json.contains("r_tilde"));
    }
}
