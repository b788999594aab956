//! Hamiltonian vector fields and their flows.
//!
//! The vector field is the unique solution of `i_X w = -dH` against the
//! chart area form, i.e. `X = (-H_y / w, H_x / w)`. Flows are integrated
//! with an adaptive Dormand-Prince 5(4) pair; the linearization is carried
//! along via the variational equation `d/ds DPhi = DX(phi^s) DPhi`, and the
//! exactness integrand `(-H + beta(X)) o phi^s` is accumulated as an extra
//! quadrature state at integrator accuracy.

use crate::error::{ChartError, FlowError, NewtonError};
use crate::geom::{Mat2, Point};
use crate::model::{Region, TorusModel};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Eigenvalues closer to 1 than this classify a linear map as degenerate.
const DEGENERATE_EIG_TOL: f64 = 1e-9;
const MAX_STEPS: u32 = 200_000;

/// Hamiltonian vector field at `pt`: `(-H_y / w, H_x / w)` with `w` the
/// chart area density.
pub fn vector_field(model: &TorusModel, pt: Point) -> Result<Point, ChartError> {
    let g = model.h_gradient(pt)?;
    let w = model.flow_density(pt)?;
    if w <= 1e-14 {
        return Err(ChartError::DegenerateAreaForm { point: pt, density: w });
    }
    Ok(Point::new(-g.y / w, g.x / w))
}

/// Jacobian of the vector field. The area density is constant on each
/// chart, so `DX = (1/w) [[-H_xy, -H_yy], [H_xx, H_xy]]`.
pub fn vector_field_jacobian(model: &TorusModel, pt: Point) -> Result<Mat2, ChartError> {
    let (hxx, hxy, hyy) = model.h_hessian(pt)?;
    let w = model.flow_density(pt)?;
    Ok(Mat2::new(-hxy / w, -hyy / w, hxx / w, hxy / w))
}

/// Result of integrating a trajectory together with its linearization.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FlowResult {
    pub endpoint: Point,
    /// Linearized flow `DPhi` at the requested time.
    pub jacobian: Mat2,
    pub time: f64,
    /// True when every accepted step stayed in the starting chart.
    pub stayed_in_chart: bool,
    /// First time the trajectory was seen outside the starting chart.
    pub chart_exit_time: Option<f64>,
    /// Accumulated exactness integrand; `None` when the trajectory left
    /// the charts on which the 1-form is defined.
    pub exactness: Option<f64>,
    pub accepted_steps: u32,
    pub rejected_steps: u32,
}

#[derive(Clone, Copy)]
struct State {
    p: Point,
    jac: Mat2,
    quad: f64,
}

impl State {
    fn initial(p: Point) -> Self {
        State { p, jac: Mat2::identity(), quad: 0.0 }
    }

    fn axpy(&self, h: f64, k: &Deriv) -> State {
        State {
            p: Point::new(self.p.x + h * k.v.x, self.p.y + h * k.v.y),
            jac: Mat2::new(
                self.jac.a + h * k.dj.a,
                self.jac.b + h * k.dj.b,
                self.jac.c + h * k.dj.c,
                self.jac.d + h * k.dj.d,
            ),
            quad: self.quad + h * k.dq,
        }
    }
}

#[derive(Clone, Copy)]
struct Deriv {
    v: Point,
    dj: Mat2,
    dq: f64,
}

impl Deriv {
    fn zero() -> Self {
        Deriv { v: Point::new(0.0, 0.0), dj: Mat2::new(0.0, 0.0, 0.0, 0.0), dq: 0.0 }
    }

    fn add_scaled(&mut self, c: f64, k: &Deriv) {
        self.v.x += c * k.v.x;
        self.v.y += c * k.v.y;
        self.dj.a += c * k.dj.a;
        self.dj.b += c * k.dj.b;
        self.dj.c += c * k.dj.c;
        self.dj.d += c * k.dj.d;
        self.dq += c * k.dq;
    }
}

fn rhs(model: &TorusModel, s: &State) -> Result<Deriv, FlowError> {
    if !s.p.is_finite() {
        return Err(FlowError::StepFailure { time: f64::NAN, step: f64::NAN });
    }
    let v = vector_field(model, s.p)?;
    let dx = vector_field_jacobian(model, s.p)?;
    // The exactness integrand -H + beta(X) is only defined where the
    // 1-form has a formula; stage points that probe the smoothing gap
    // contribute zero and the accepted-step domain check handles actual
    // violations.
    let dq = match model.liouville_form(s.p) {
        Ok(beta) => beta.apply(v) - model.eval_h(s.p).map_err(FlowError::Chart)?,
        Err(_) => 0.0,
    };
    Ok(Deriv {
        v,
        dj: dx.mul(&s.jac),
        dq,
    })
}

/// Dormand-Prince 5(4) coefficients.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn step(model: &TorusModel, s: &State, h: f64) -> Result<(State, f64), FlowError> {
    let mut k = [Deriv::zero(); 7];
    k[0] = rhs(model, s)?;
    for i in 1..7 {
        let mut stage = *s;
        for (j, kj) in k.iter().enumerate().take(i) {
            stage = stage.axpy(h * A[i][j], kj);
        }
        let _ = C[i];
        k[i] = rhs(model, &stage)?;
    }
    let mut acc = Deriv::zero();
    let mut err_acc = Deriv::zero();
    for i in 0..7 {
        acc.add_scaled(B5[i], &k[i]);
        err_acc.add_scaled(ERR[i], &k[i]);
    }
    let next = s.axpy(h, &acc);
    let err_state = State { p: Point::new(0.0, 0.0), jac: Mat2::new(0.0, 0.0, 0.0, 0.0), quad: 0.0 }
        .axpy(h, &err_acc);
    let tol = model.tol();
    let comps = [
        (err_state.p.x, s.p.x.abs().max(next.p.x.abs())),
        (err_state.p.y, s.p.y.abs().max(next.p.y.abs())),
        (err_state.jac.a, s.jac.a.abs().max(next.jac.a.abs())),
        (err_state.jac.b, s.jac.b.abs().max(next.jac.b.abs())),
        (err_state.jac.c, s.jac.c.abs().max(next.jac.c.abs())),
        (err_state.jac.d, s.jac.d.abs().max(next.jac.d.abs())),
        (err_state.quad, s.quad.abs().max(next.quad.abs())),
    ];
    let mut sum = 0.0;
    for (e, scale) in comps {
        let denom = tol.ode_abs + tol.ode_rel * scale;
        let r = e / denom;
        sum += r * r;
    }
    Ok((next, (sum / comps.len() as f64).sqrt()))
}

/// Integrate the flow for time `t` (forward or backward).
///
/// Chart membership is re-checked at every accepted step; the first
/// violation of the starting chart is timestamped. Exiting the domain on
/// which the 1-form is defined only invalidates the exactness quadrature,
/// not the trajectory itself (the Hamiltonian is defined on all charts).
pub fn flow(model: &TorusModel, p0: Point, t: f64) -> Result<FlowResult, FlowError> {
    integrate(model, p0, t, false)
}

/// Like [`flow`], but fails with `LeftChartDomain` as soon as the
/// trajectory leaves the charts carrying the 1-form (outer chart and
/// saddle squares). Used by every beta-dependent quantity.
pub fn flow_in_beta_domain(model: &TorusModel, p0: Point, t: f64) -> Result<FlowResult, FlowError> {
    integrate(model, p0, t, true)
}

fn in_beta_domain(model: &TorusModel, p: Point) -> bool {
    matches!(model.classify(p), Region::OuterExact | Region::SaddleChart(_))
}

fn integrate(model: &TorusModel, p0: Point, t: f64, restrict: bool) -> Result<FlowResult, FlowError> {
    let start_region = model.classify(p0);
    if restrict && !in_beta_domain(model, p0) {
        return Err(FlowError::LeftChartDomain { exit_time: 0.0 });
    }
    let mut state = State::initial(p0);
    if t == 0.0 {
        return Ok(FlowResult {
            endpoint: p0,
            jacobian: Mat2::identity(),
            time: 0.0,
            stayed_in_chart: true,
            chart_exit_time: None,
            exactness: Some(0.0),
            accepted_steps: 0,
            rejected_steps: 0,
        });
    }
    let dir = t.signum();
    let t_end = t.abs();
    let mut time = 0.0;
    let mut h = (t_end / 64.0).min(1e-2).max(1e-6);
    let mut accepted = 0;
    let mut rejected = 0;
    let mut stayed = true;
    let mut exit_time = None;
    let mut beta_ok = true;

    while time < t_end {
        h = h.min(t_end - time);
        if h < 1e-15 * t_end.max(1.0) {
            return Err(FlowError::StepFailure { time: dir * time, step: h });
        }
        let (next, err) = step(model, &state, dir * h)?;
        if err <= 1.0 {
            let region = model.classify(next.p);
            if stayed && region != start_region {
                stayed = false;
                let refined = refine_crossing(model, &state, dir * h, |p| model.classify(p) == start_region);
                exit_time = Some(dir * (time + refined));
            }
            if beta_ok && !in_beta_domain(model, next.p) {
                beta_ok = false;
                let refined = refine_crossing(model, &state, dir * h, |p| in_beta_domain(model, p));
                if restrict {
                    return Err(FlowError::LeftChartDomain { exit_time: dir * (time + refined) });
                }
            }
            time += h;
            state = next;
            accepted += 1;
            if accepted > MAX_STEPS {
                return Err(FlowError::StepFailure { time: dir * time, step: h });
            }
        } else {
            rejected += 1;
            if rejected > MAX_STEPS {
                return Err(FlowError::StepFailure { time: dir * time, step: h });
            }
        }
        let factor = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
        h *= factor;
    }

    Ok(FlowResult {
        endpoint: state.p,
        jacobian: state.jac,
        time: t,
        stayed_in_chart: stayed,
        chart_exit_time: exit_time,
        exactness: if beta_ok { Some(state.quad) } else { None },
        accepted_steps: accepted,
        rejected_steps: rejected,
    })
}

/// Bisect the crossing time of `inside` within one accepted step, by
/// re-integrating short sub-intervals from the last inside state. Returns
/// the unsigned time offset from the start of the step.
fn refine_crossing<F>(model: &TorusModel, from: &State, h: f64, inside: F) -> f64
where
    F: Fn(Point) -> bool,
{
    let mut lo = 0.0f64;
    let mut hi = h.abs();
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        let probe = integrate_plain(model, from, h.signum() * mid);
        match probe {
            Some(p) if inside(p) => lo = mid,
            _ => hi = mid,
        }
        if hi - lo < 1e-12 * h.abs().max(1e-6) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Minimal fixed-step integration helper for crossing refinement.
fn integrate_plain(model: &TorusModel, from: &State, dt: f64) -> Option<Point> {
    let steps = 16;
    let h = dt / steps as f64;
    let mut s = *from;
    for _ in 0..steps {
        // Classic RK4 on the position only.
        let k1 = vector_field(model, s.p).ok()?;
        let k2 = vector_field(model, Point::new(s.p.x + 0.5 * h * k1.x, s.p.y + 0.5 * h * k1.y)).ok()?;
        let k3 = vector_field(model, Point::new(s.p.x + 0.5 * h * k2.x, s.p.y + 0.5 * h * k2.y)).ok()?;
        let k4 = vector_field(model, Point::new(s.p.x + h * k3.x, s.p.y + h * k3.y)).ok()?;
        s.p = Point::new(
            s.p.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
            s.p.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
        );
    }
    Some(s.p)
}

/// Endpoint and jacobian of the time-1 map.
pub fn time_one_map(model: &TorusModel, p0: Point) -> Result<(Point, Mat2), FlowError> {
    let r = flow(model, p0, 1.0)?;
    Ok((r.endpoint, r.jacobian))
}

/// The exactness primitive `f_t(p) = int_0^t (-H + beta(X)) o phi^s ds`,
/// requiring the whole trajectory to stay where the 1-form is defined.
pub fn exactness_primitive(model: &TorusModel, p: Point, t: f64) -> Result<f64, FlowError> {
    let r = flow_in_beta_domain(model, p, t)?;
    Ok(r.exactness.expect("restricted flow keeps the quadrature valid"))
}

/// Classification of a linear symplectic map by its eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinearClass {
    Elliptic,
    PositiveHyperbolic,
    NegativeHyperbolic,
    Degenerate,
}

/// Classify by the eigenvalue rule: unit circle / positive reals /
/// negative reals / within tolerance of 1.
pub fn classify_linear(m: &Mat2) -> LinearClass {
    let eigs = m.eigenvalues();
    for e in eigs {
        if (e - Complex64::new(1.0, 0.0)).norm() < DEGENERATE_EIG_TOL {
            return LinearClass::Degenerate;
        }
    }
    if eigs[0].im != 0.0 {
        return LinearClass::Elliptic;
    }
    if eigs[0].re > 0.0 && eigs[1].re > 0.0 {
        LinearClass::PositiveHyperbolic
    } else if eigs[0].re < 0.0 && eigs[1].re < 0.0 {
        LinearClass::NegativeHyperbolic
    } else {
        // Mixed-sign real eigenvalues cannot occur for a symplectic map.
        LinearClass::Degenerate
    }
}

/// A certified fixed point of the time-1 map.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub location: Point,
    /// `|phi(p) - p|` at the reported location.
    pub residual: f64,
    pub eigenvalues: [Complex64; 2],
    pub classification: LinearClass,
    pub jacobian: Mat2,
}

/// Outcome of a multi-seed Newton search for fixed points of the time-1
/// map. Failures are recorded per seed, never fatal.
#[derive(Debug, Default)]
pub struct FixedPointSearch {
    pub converged: Vec<FixedPointReport>,
    pub failures: Vec<(Point, NewtonError)>,
}

/// Newton iteration on `phi(p) - p` with Jacobian `DPhi - I`, deduplicated
/// within the model's dedup radius.
pub fn find_fixed_points(model: &TorusModel, seeds: &[Point]) -> FixedPointSearch {
    let tol = *model.tol();
    let mut search = FixedPointSearch::default();
    'seed: for &seed in seeds {
        let mut p = seed;
        let mut last_residual = f64::INFINITY;
        for iter in 0..tol.newton_max_iter {
            let (image, jac) = match time_one_map(model, p) {
                Ok(v) => v,
                Err(e) => {
                    search.failures.push((seed, NewtonError::Flow(e)));
                    continue 'seed;
                }
            };
            let res = image.sub(p);
            last_residual = res.radius();
            if last_residual < tol.newton {
                let report = FixedPointReport {
                    location: p,
                    residual: last_residual,
                    eigenvalues: jac.eigenvalues(),
                    classification: classify_linear(&jac),
                    jacobian: jac,
                };
                if !search
                    .converged
                    .iter()
                    .any(|r: &FixedPointReport| r.location.dist(p) < tol.dedup)
                {
                    search.converged.push(report);
                }
                continue 'seed;
            }
            let m = Mat2::new(jac.a - 1.0, jac.b, jac.c, jac.d - 1.0);
            let det = m.det();
            if det.abs() < 1e-14 {
                search.failures.push((seed, NewtonError::SingularMatrix { at: p }));
                continue 'seed;
            }
            let dx = (-res.x * m.d + res.y * m.b) / det;
            let dy = (res.x * m.c - res.y * m.a) / det;
            p = Point::new(p.x + dx, p.y + dy);
            if !p.is_finite() {
                search.failures.push((
                    seed,
                    NewtonError::Divergence { seed, iterations: iter + 1, residual: f64::NAN },
                ));
                continue 'seed;
            }
        }
        search.failures.push((
            seed,
            NewtonError::Divergence {
                seed,
                iterations: tol.newton_max_iter,
                residual: last_residual,
            },
        ));
    }
    search
        .converged
        .sort_by(|a, b| a.location.angle().partial_cmp(&b.location.angle()).unwrap());
    search
}

/// Default seed set for the full-model fixed point search: the saddle
/// seeds plus a coarse polar grid over the working disk.
pub fn default_seeds(model: &TorusModel) -> Vec<Point> {
    let mut seeds: Vec<Point> = model.saddle_points().to_vec();
    let rings = [0.3 * model.r_sing(), 0.8 * model.r_sing(), 2.0 * model.r_sing(), model.r_glue()];
    for (i, &r) in rings.iter().enumerate() {
        for j in 0..8 {
            let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.13 * i as f64) / 8.0;
            seeds.push(Point::from_polar(r, theta));
        }
    }
    seeds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TorusParams;
    use std::f64::consts::PI;

    fn model(n: u32) -> TorusModel {
        TorusModel::for_n(n).unwrap()
    }

    /// Wide saddle chart for closed-form flow comparisons.
    fn wide_saddle_model(a: f64, eps: f64) -> TorusModel {
        let mut p = TorusParams::for_n(2);
        p.r_sing = 40.0;
        p.a = a;
        p.eps = eps;
        p.c = 0.0;
        p.r_glue = 0.0;
        p.r_star = 0.0;
        TorusModel::new(p).unwrap()
    }

    #[test]
    fn outer_field_is_radial_on_prong_ray() {
        // n=3, mu=1, (r, theta) = (1, pi/6): X = 3 d/dr.
        let mut p = TorusParams::for_n(3);
        p.mu = 1.0;
        p.r_sing = 0.5;
        let m = TorusModel::new(p).unwrap();
        let pt = Point::from_polar(1.0, PI / 6.0);
        let v = vector_field(&m, pt).unwrap();
        let radial = v.dot(pt.scale(1.0 / pt.radius()));
        let angular = -v.x * (PI / 6.0).sin() + v.y * (PI / 6.0).cos();
        let _ = angular;
        let tangential = v.sub(pt.scale(radial / pt.radius())).radius();
        assert!((radial - 3.0).abs() < 1e-12);
        assert!(tangential < 1e-12);
    }

    #[test]
    fn saddle_field_closed_form() {
        // a=1, eps=0.5, chart (1,1) -> (-2, 2).
        let m = wide_saddle_model(1.0, 0.5);
        let pt = m.from_saddle_chart(0, Point::new(1.0, 1.0));
        let v = vector_field(&m, pt).unwrap();
        assert!((v.x + 2.0).abs() < 1e-12);
        assert!((v.y - 2.0).abs() < 1e-12);
    }

    #[test]
    fn smoothing_field_matches_polynomial_gradient() {
        let m = model(4);
        // Generic smoothing-gap point away from saddles and squares.
        let pt = Point::from_polar(0.45 * m.r_sing(), 1.1);
        assert_eq!(m.classify(pt), Region::PolySmoothing);
        let v = vector_field(&m, pt).unwrap();
        let h = 1e-6;
        let fd_x = (m.eval_h(Point::new(pt.x + h, pt.y)).unwrap()
            - m.eval_h(Point::new(pt.x - h, pt.y)).unwrap())
            / (2.0 * h);
        let fd_y = (m.eval_h(Point::new(pt.x, pt.y + h)).unwrap()
            - m.eval_h(Point::new(pt.x, pt.y - h)).unwrap())
            / (2.0 * h);
        assert!((v.x + fd_y).abs() < 1e-7);
        assert!((v.y - fd_x).abs() < 1e-7);
    }

    #[test]
    fn field_jacobian_matches_finite_differences() {
        let m = model(3);
        for pt in [
            Point::from_polar(2.5 * m.r_sing(), 0.4),
            Point::from_polar(4.0 * m.r_sing(), 2.9),
        ] {
            let j = vector_field_jacobian(&m, pt).unwrap();
            let h = 1e-6 * pt.radius();
            let vxp = vector_field(&m, Point::new(pt.x + h, pt.y)).unwrap();
            let vxm = vector_field(&m, Point::new(pt.x - h, pt.y)).unwrap();
            let vyp = vector_field(&m, Point::new(pt.x, pt.y + h)).unwrap();
            let vym = vector_field(&m, Point::new(pt.x, pt.y - h)).unwrap();
            assert!((j.a - (vxp.x - vxm.x) / (2.0 * h)).abs() < 1e-5 * (1.0 + j.a.abs()));
            assert!((j.b - (vyp.x - vym.x) / (2.0 * h)).abs() < 1e-5 * (1.0 + j.b.abs()));
            assert!((j.c - (vxp.y - vxm.y) / (2.0 * h)).abs() < 1e-5 * (1.0 + j.c.abs()));
            assert!((j.d - (vyp.y - vym.y) / (2.0 * h)).abs() < 1e-5 * (1.0 + j.d.abs()));
        }
    }

    #[test]
    fn saddle_flow_matches_linear_solution() {
        // a=1, eps=1, p0 = chart (1,1), t=1 -> (1/e, e), jacobian
        // diag(1/e, e), det 1.
        let m = wide_saddle_model(1.0, 1.0);
        let p0 = m.from_saddle_chart(0, Point::new(1.0, 1.0));
        let r = flow(&m, p0, 1.0).unwrap();
        let c = m.to_saddle_chart(0, r.endpoint);
        assert!((c.x - (-1.0f64).exp()).abs() < 1e-9);
        assert!((c.y - 1.0f64.exp()).abs() < 1e-9);
        assert!((r.jacobian.a - (-1.0f64).exp()).abs() < 1e-9);
        assert!((r.jacobian.d - 1.0f64.exp()).abs() < 1e-9);
        assert!(r.jacobian.b.abs() < 1e-12 && r.jacobian.c.abs() < 1e-12);
        assert!((r.jacobian.det() - 1.0).abs() < 1e-9);
        assert!(r.stayed_in_chart);
    }

    #[test]
    fn zero_time_flow_is_identity() {
        let m = model(3);
        let p0 = Point::from_polar(2.0, 1.0);
        let r = flow(&m, p0, 0.0).unwrap();
        assert_eq!(r.endpoint, p0);
        assert_eq!(r.jacobian, Mat2::identity());
        assert_eq!(r.exactness, Some(0.0));
    }

    #[test]
    fn energy_and_area_are_preserved_on_outer_trajectories() {
        let m = model(3);
        let tol = m.tol();
        for i in 0..10 {
            let p0 = Point::from_polar(m.r_glue() * (1.0 + 0.05 * i as f64), 0.37 + 0.55 * i as f64);
            let r = flow(&m, p0, 1.0).unwrap();
            assert!(r.stayed_in_chart);
            let h0 = m.eval_h(p0).unwrap();
            let h1 = m.eval_h(r.endpoint).unwrap();
            assert!((h1 - h0).abs() <= 10.0 * tol.ode_rel.max(tol.ode_abs) * (1.0 + h0.abs()) * 10.0);
            assert!((r.jacobian.det() - 1.0).abs() <= 1e-8);
        }
    }

    #[test]
    fn chart_exit_is_detected_and_timestamped() {
        let m = model(3);
        // A point on the inward prong ray close to r_sing flows into the
        // smoothing gap quickly.
        let theta = 3.0 * PI / (2.0 * m.n() as f64);
        let p0 = Point::from_polar(1.05 * m.r_sing(), theta);
        let r = flow(&m, p0, 1.0).unwrap();
        assert!(!r.stayed_in_chart);
        let exit = r.chart_exit_time.unwrap();
        assert!(exit > 0.0 && exit < 1.0);
        // Exact radial solution r(t) = r0 exp(-n mu t) crosses r_sing at
        // t = ln(r0/r_sing)/(n mu).
        let expected = (p0.radius() / m.r_sing()).ln() / (m.n() as f64 * m.mu());
        assert!((exit - expected).abs() < 1e-3);
        assert!(r.exactness.is_none());
        assert!(matches!(
            flow_in_beta_domain(&m, p0, 1.0),
            Err(FlowError::LeftChartDomain { .. })
        ));
    }

    #[test]
    fn exactness_vanishes_at_saddles_and_on_outer_trajectories() {
        let m = model(3);
        for &s in m.saddle_points() {
            let f = exactness_primitive(&m, s, 1.0).unwrap();
            assert!(f.abs() < 1e-10);
        }
        let p0 = Point::from_polar(m.r_glue(), 0.9);
        let f = exactness_primitive(&m, p0, 1.0).unwrap();
        assert!(f.abs() < 1e-8);
        assert_eq!(exactness_primitive(&m, p0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn classify_linear_examples() {
        assert_eq!(classify_linear(&Mat2::diag(2.0, 0.5)), LinearClass::PositiveHyperbolic);
        assert_eq!(classify_linear(&Mat2::diag(-2.0, -0.5)), LinearClass::NegativeHyperbolic);
        let (s, c) = 0.5f64.sin_cos();
        assert_eq!(classify_linear(&Mat2::new(c, -s, s, c)), LinearClass::Elliptic);
        assert_eq!(classify_linear(&Mat2::identity()), LinearClass::Degenerate);
    }

    #[test]
    fn saddle_seeds_converge_to_positive_hyperbolic_fixed_points() {
        let m = model(4);
        let search = find_fixed_points(&m, m.saddle_points());
        assert_eq!(search.converged.len(), 3);
        let lambda = (m.coeff_a() / m.eps()).exp();
        for fp in &search.converged {
            assert!(fp.residual < m.tol().newton);
            assert_eq!(fp.classification, LinearClass::PositiveHyperbolic);
            let big = fp.eigenvalues[1].re;
            let small = fp.eigenvalues[0].re;
            assert!((big - lambda).abs() / lambda < 1e-6);
            assert!((small - 1.0 / lambda).abs() * lambda < 1e-6);
        }
    }

    #[test]
    fn outer_ray_seed_finds_no_outer_fixed_point() {
        let m = model(3);
        let theta = 3.0 * PI / (2.0 * m.n() as f64);
        let seed = Point::from_polar(2.0 * m.r_glue(), theta);
        let search = find_fixed_points(&m, &[seed]);
        for fp in &search.converged {
            assert_ne!(m.classify(fp.location), Region::OuterExact);
        }
    }

    #[test]
    fn full_search_finds_exactly_n_minus_1_points() {
        for n in [2u32, 3, 4] {
            let m = model(n);
            let search = find_fixed_points(&m, &default_seeds(&m));
            assert_eq!(search.converged.len(), (n - 1) as usize, "n = {n}");
        }
    }
}
