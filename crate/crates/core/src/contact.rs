//! The interpolated contact form on `[-1, 1] x D(r_star)` and its Reeb
//! field.
//!
//! With `beta0` the Liouville form restricted to the working disk and
//! `beta1` its pullback under the time-1 map,
//!
//! ```text
//! alpha = (1 + eps chi1(t) h) dt
//!         + eps ((1 - chi0(t)) beta0 + chi0(t) beta1),
//! ```
//!
//! where `h` is the primitive with `beta1 - beta0 = dh`, realized as the
//! exactness integral of the flow at time 1, and `(chi0, chi1)` is a
//! smooth cutoff pair with `chi1 = chi0'`. The Reeb field is
//! `(1 / (1 + eps chi1 h)) d/dt`, so it is collinear to `d/dt` everywhere
//! and equal to it wherever `h` vanishes.

use crate::error::{ChartError, ContactError, FlowError};
use crate::flow;
use crate::geom::{OneForm, Point};
use crate::model::TorusModel;
use serde::{Deserialize, Serialize};

/// Smooth cutoff pair `(chi0, chi1 = chi0')` built from the normalized
/// integral of the bump `exp(-1/(u(1-u)))`. `chi0` is 0 on
/// `[-1, -1 + eps_chi]`, 1 on `[1 - eps_chi, 1]`, and nondecreasing.
#[derive(Clone, Copy, Debug)]
pub struct CutoffPair {
    eps_chi: f64,
    /// Normalization `int_0^1 exp(-1/(u(1-u))) du`.
    norm: f64,
}

fn bump(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        (-1.0 / (u * (1.0 - u))).exp()
    }
}

fn bump_derivative(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        let s = u * (1.0 - u);
        bump(u) * (1.0 - 2.0 * u) / (s * s)
    }
}

/// Adaptive Simpson quadrature on a smooth integrand.
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() < 15.0 * tol {
        left + right + (left + right - whole) / 15.0
    } else {
        simpson(f, a, m, fa, flm, fm, tol / 2.0, depth - 1)
            + simpson(f, m, b, fm, frm, fb, tol / 2.0, depth - 1)
    }
}

fn integrate_bump(to: f64) -> f64 {
    if to <= 0.0 {
        return 0.0;
    }
    let b = to.min(1.0);
    simpson(&bump, 0.0, b, bump(0.0), bump(0.5 * b), bump(b), 1e-15, 40)
}

impl CutoffPair {
    /// Requires `0 < eps_chi < 1/2`.
    pub fn new(eps_chi: f64) -> Self {
        assert!(eps_chi > 0.0 && eps_chi < 0.5, "eps_chi must lie in (0, 1/2)");
        CutoffPair { eps_chi, norm: integrate_bump(1.0) }
    }

    pub fn eps_chi(&self) -> f64 {
        self.eps_chi
    }

    /// Map `t` in `[-1, 1]` to the bump argument in `[0, 1]`.
    fn arg(&self, t: f64) -> f64 {
        (t + 1.0 - self.eps_chi) / (2.0 - 2.0 * self.eps_chi)
    }

    pub fn chi0(&self, t: f64) -> f64 {
        let u = self.arg(t);
        if u <= 0.0 {
            0.0
        } else if u >= 1.0 {
            1.0
        } else {
            // Clamp away quadrature roundoff at the flat ends.
            (integrate_bump(u) / self.norm).clamp(0.0, 1.0)
        }
    }

    /// Exact derivative of `chi0`.
    pub fn chi1(&self, t: f64) -> f64 {
        bump(self.arg(t)) / (self.norm * (2.0 - 2.0 * self.eps_chi))
    }

    /// Exact derivative of `chi1`.
    pub fn chi1_prime(&self, t: f64) -> f64 {
        let du = 2.0 - 2.0 * self.eps_chi;
        bump_derivative(self.arg(t)) / (self.norm * du * du)
    }
}

impl Default for CutoffPair {
    fn default() -> Self {
        CutoffPair::new(0.2)
    }
}

/// Value of the contact form at `(t, pt)`: a `dt` component plus a
/// spatial 1-form.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AlphaValue {
    pub dt: f64,
    pub spatial: OneForm,
}

/// Value of the Reeb field together with its pointwise certification.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ReebValue {
    /// Coefficient of `d/dt`; the spatial components vanish identically.
    pub t_component: f64,
    pub spatial: (f64, f64),
    /// `alpha(R)` evaluated from the alpha formula (should be 1).
    pub alpha_of_reeb: f64,
    /// Norm of `i_R dalpha`, measuring `dh = beta1 - beta0` numerically.
    pub contraction_defect: f64,
}

type HOverride<'m> = Box<dyn Fn(Point) -> f64 + Send + Sync + 'm>;

/// The contact form model: a torus model, a cutoff pair, and the
/// primitive `h`.
pub struct ContactFormModel<'m> {
    model: &'m TorusModel,
    cutoffs: CutoffPair,
    /// Replaces the exactness-integral `h` field; a stress hook for
    /// exercising the contact-condition checker on forms whose `h` does
    /// not vanish (the constructed one vanishes everywhere it is
    /// computable, so its contact condition holds at every `eps`).
    h_override: Option<HOverride<'m>>,
}

impl<'m> ContactFormModel<'m> {
    pub fn new(model: &'m TorusModel) -> Self {
        ContactFormModel { model, cutoffs: CutoffPair::default(), h_override: None }
    }

    pub fn with_cutoffs(model: &'m TorusModel, cutoffs: CutoffPair) -> Self {
        ContactFormModel { model, cutoffs, h_override: None }
    }

    pub fn with_h_override(model: &'m TorusModel, cutoffs: CutoffPair, h: HOverride<'m>) -> Self {
        ContactFormModel { model, cutoffs, h_override: Some(h) }
    }

    pub fn model(&self) -> &TorusModel {
        self.model
    }

    pub fn cutoffs(&self) -> &CutoffPair {
        &self.cutoffs
    }

    fn check_in_disk(&self, pt: Point) -> Result<(), ChartError> {
        if pt.radius() > self.model.r_star() {
            return Err(ChartError::PointOutsideCharts(pt));
        }
        Ok(())
    }

    /// The primitive `h`: the exactness integral at time 1, restricted to
    /// the working disk. Fails when the trajectory leaves the charts
    /// carrying the 1-form.
    pub fn h_field(&self, pt: Point) -> Result<f64, FlowError> {
        if let Some(f) = &self.h_override {
            return Ok(f(pt));
        }
        flow::exactness_primitive(self.model, pt, 1.0)
    }

    /// `beta0`: the Liouville form on the working disk.
    pub fn beta0(&self, pt: Point) -> Result<OneForm, ChartError> {
        self.check_in_disk(pt)?;
        self.model.liouville_form(pt)
    }

    /// `beta1 = phi* beta0`, pulled back through the numeric time-1 flow.
    pub fn beta1(&self, pt: Point) -> Result<OneForm, FlowError> {
        self.check_in_disk(pt).map_err(FlowError::Chart)?;
        let r = flow::flow_in_beta_domain(self.model, pt, 1.0)?;
        let beta_img = self.model.liouville_form(r.endpoint)?;
        Ok(r.jacobian.pullback(beta_img))
    }

    /// The contact form at `(t, pt)`.
    pub fn eval_alpha(&self, t: f64, pt: Point) -> Result<AlphaValue, ContactError> {
        let eps = self.model.eps();
        let chi0 = self.cutoffs.chi0(t);
        let chi1 = self.cutoffs.chi1(t);
        let beta0 = self.beta0(pt)?;
        // At the ends of the interpolation band only one of the two forms
        // contributes; skip the flow when its weight is exactly zero.
        let (h, beta1) = if chi0 == 0.0 && chi1 == 0.0 {
            (0.0, beta0)
        } else {
            (self.h_field(pt)?, self.beta1(pt)?)
        };
        let spatial = beta0.scale(eps * (1.0 - chi0)).sub(beta1.scale(-eps * chi0));
        Ok(AlphaValue { dt: 1.0 + eps * chi1 * h, spatial })
    }

    /// The Reeb field at `(t, pt)`, certified pointwise: `alpha(R) = 1`
    /// and the norm of `i_R dalpha` (computed from the spatial gradient
    /// of `h` against `beta1 - beta0`).
    pub fn reeb_field(&self, t: f64, pt: Point) -> Result<ReebValue, ContactError> {
        let eps = self.model.eps();
        let chi1 = self.cutoffs.chi1(t);
        let h = if chi1 == 0.0 { 0.0 } else { self.h_field(pt)? };
        let denom = 1.0 + eps * chi1 * h;
        if denom <= 0.0 {
            return Err(ContactError::NonpositiveDenominator { value: denom });
        }
        let t_component = 1.0 / denom;
        let alpha = self.eval_alpha(t, pt)?;
        let alpha_of_reeb = alpha.dt * t_component;
        // i_R dalpha has spatial components (1/denom) * eps chi1 *
        // ((beta1 - beta0) - dh); dh by central differences.
        let contraction_defect = if chi1 == 0.0 {
            0.0
        } else {
            let step = 1e-5 * pt.radius().max(1.0);
            let b0 = self.beta0(pt)?;
            let b1 = self.beta1(pt)?;
            let diff = b1.sub(b0);
            let f = |q: Point| self.h_field(q);
            let hx = (f(Point::new(pt.x + step, pt.y))? - f(Point::new(pt.x - step, pt.y))?) / (2.0 * step);
            let hy = (f(Point::new(pt.x, pt.y + step))? - f(Point::new(pt.x, pt.y - step))?) / (2.0 * step);
            let ex = eps * chi1 * (diff.p - hx) * t_component;
            let ey = eps * chi1 * (diff.q - hy) * t_component;
            ex.hypot(ey)
        };
        Ok(ReebValue { t_component, spatial: (0.0, 0.0), alpha_of_reeb, contraction_defect })
    }
}

/// Per-point data cached for the contact-condition grid.
struct GridPoint {
    pt: Point,
    h: f64,
    beta0: OneForm,
    beta1: OneForm,
    /// Spatial derivatives from a central stencil: d/dx and d/dy of
    /// (h, beta0, beta1).
    dh: (f64, f64),
    dbeta0: (OneForm, OneForm),
    dbeta1: (OneForm, OneForm),
}

/// Result of evaluating the density of `alpha ^ dalpha` over a grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContactConditionReport {
    pub eps: f64,
    pub grid: (usize, usize, usize),
    pub evaluated: usize,
    pub skipped: usize,
    pub min_density: f64,
    pub min_at: (f64, f64, f64),
    /// Largest `|h|` seen over the spatial grid.
    pub max_abs_h: f64,
    /// Smallest Reeb denominator `1 + eps chi1 h` over the grid.
    pub min_denominator: f64,
    pub pass: bool,
    /// Minimum density per time slice.
    pub slice_minima: Vec<f64>,
}

/// Evaluate the density of `alpha ^ dalpha` on an `nx x ny x nt` grid
/// over `[-r_star, r_star]^2 x [-1, 1]`, with all t-derivatives exact and
/// spatial derivatives from central differences of the full coefficient
/// functions. Grid points whose data (trajectory, stencil) is not
/// computable are counted as skipped.
pub fn verify_contact_condition(cfm: &ContactFormModel, nx: usize, ny: usize, nt: usize) -> ContactConditionReport {
    let model = cfm.model();
    let eps = model.eps();
    let r_star = model.r_star();
    let mut points = Vec::new();
    let mut skipped = 0usize;

    let sample = |pt: Point| -> Option<(f64, OneForm, OneForm)> {
        if pt.radius() > r_star {
            return None;
        }
        let r = flow::flow_in_beta_domain(model, pt, 1.0).ok()?;
        let h = r.exactness?;
        let beta0 = model.liouville_form(pt).ok()?;
        let beta1 = model.liouville_form(r.endpoint).ok().map(|b| r.jacobian.pullback(b))?;
        Some((h, beta0, beta1))
    };

    for i in 0..nx {
        for j in 0..ny {
            let x = -r_star + 2.0 * r_star * (i as f64 + 0.5) / nx as f64;
            let y = -r_star + 2.0 * r_star * (j as f64 + 0.5) / ny as f64;
            let pt = Point::new(x, y);
            if pt.radius() > r_star {
                continue; // outside the disk, not part of the domain
            }
            let step = 1e-5 * pt.radius().max(1.0);
            let center = sample(pt);
            let xp = sample(Point::new(x + step, y));
            let xm = sample(Point::new(x - step, y));
            let yp = sample(Point::new(x, y + step));
            let ym = sample(Point::new(x, y - step));
            match (center, xp, xm, yp, ym) {
                (Some(c), Some(xp), Some(xm), Some(yp), Some(ym)) => {
                    let d = 2.0 * step;
                    let h_center = cfm.h_override.as_ref().map(|f| f(pt)).unwrap_or(c.0);
                    let dh = match &cfm.h_override {
                        Some(f) => (
                            (f(Point::new(x + step, y)) - f(Point::new(x - step, y))) / d,
                            (f(Point::new(x, y + step)) - f(Point::new(x, y - step))) / d,
                        ),
                        None => ((xp.0 - xm.0) / d, (yp.0 - ym.0) / d),
                    };
                    points.push(GridPoint {
                        pt,
                        h: h_center,
                        beta0: c.1,
                        beta1: c.2,
                        dh,
                        dbeta0: (
                            OneForm::new((xp.1.p - xm.1.p) / d, (xp.1.q - xm.1.q) / d),
                            OneForm::new((yp.1.p - ym.1.p) / d, (yp.1.q - ym.1.q) / d),
                        ),
                        dbeta1: (
                            OneForm::new((xp.2.p - xm.2.p) / d, (xp.2.q - xm.2.q) / d),
                            OneForm::new((yp.2.p - ym.2.p) / d, (yp.2.q - ym.2.q) / d),
                        ),
                    });
                }
                _ => skipped += 1,
            }
        }
    }

    let mut min_density = f64::INFINITY;
    let mut min_at = (0.0, 0.0, 0.0);
    let mut max_abs_h = 0.0f64;
    let mut min_denominator = f64::INFINITY;
    let mut slice_minima = Vec::with_capacity(nt);

    for it in 0..nt {
        let t = -1.0 + 2.0 * it as f64 / (nt.max(2) - 1) as f64;
        let chi0 = cfm.cutoffs.chi0(t);
        let chi1 = cfm.cutoffs.chi1(t);
        let chi1p = cfm.cutoffs.chi1_prime(t);
        let mut slice_min = f64::INFINITY;
        for g in &points {
            max_abs_h = max_abs_h.max(g.h.abs());
            let denom = 1.0 + eps * chi1 * g.h;
            min_denominator = min_denominator.min(denom);
            // alpha = A dt + P dx + Q dy
            let a_coef = denom;
            let p = eps * ((1.0 - chi0) * g.beta0.p + chi0 * g.beta1.p);
            let q = eps * ((1.0 - chi0) * g.beta0.q + chi0 * g.beta1.q);
            // Spatial derivatives of the coefficients.
            let da_dx = eps * chi1 * g.dh.0;
            let da_dy = eps * chi1 * g.dh.1;
            let dq_dx = eps * ((1.0 - chi0) * g.dbeta0.0.q + chi0 * g.dbeta1.0.q);
            let dp_dy = eps * ((1.0 - chi0) * g.dbeta0.1.p + chi0 * g.dbeta1.1.p);
            // Exact t-derivatives.
            let dp_dt = eps * chi1 * (g.beta1.p - g.beta0.p);
            let dq_dt = eps * chi1 * (g.beta1.q - g.beta0.q);
            let da_dt = eps * chi1p * g.h;
            let _ = da_dt; // A's t-derivative does not enter the density
            let density = a_coef * (dq_dx - dp_dy) - p * (dq_dt - da_dy) + q * (dp_dt - da_dx);
            if density < slice_min {
                slice_min = density;
            }
            if density < min_density {
                min_density = density;
                min_at = (t, g.pt.x, g.pt.y);
            }
        }
        slice_minima.push(slice_min);
    }

    let evaluated = points.len();
    ContactConditionReport {
        eps,
        grid: (nx, ny, nt),
        evaluated,
        skipped,
        min_density,
        min_at,
        max_abs_h,
        min_denominator,
        pass: evaluated > 0 && min_density > 0.0,
        slice_minima,
    }
}

/// Largest failing-to-passing `eps` boundary for the contact condition on
/// the given grid, found by bisection over `[lo, hi]`. Returns `None`
/// when no `eps` in the range fails, which is the honest outcome for the
/// constructed form (its `h` vanishes on the whole computable domain).
pub fn find_failing_eps(
    model: &TorusModel,
    cutoffs: CutoffPair,
    h_override: Option<&(dyn Fn(Point) -> f64 + Send + Sync)>,
    grid: (usize, usize, usize),
    lo: f64,
    hi: f64,
) -> Option<f64> {
    let fails = |eps: f64| -> bool {
        let mut params = model.params().clone();
        params.eps = eps;
        let m = TorusModel::new(params).expect("eps rescale keeps parameters valid");
        let cfm = match h_override {
            Some(f) => ContactFormModel::with_h_override(&m, cutoffs, Box::new(move |p| f(p))),
            None => ContactFormModel::with_cutoffs(&m, cutoffs),
        };
        let report = verify_contact_condition(&cfm, grid.0, grid.1, grid.2);
        report.evaluated > 0 && !report.pass
    };
    if !fails(hi) {
        return None;
    }
    let mut lo = lo;
    let mut hi = hi;
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if fails(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Check that `h` vanishes (within the quadrature tolerance) on the given
/// samples; used on the settled annulus and the saddle boxes.
pub fn h_vanishing_check(cfm: &ContactFormModel, samples: &[Point]) -> crate::verify::CheckReport {
    let mut defects = Vec::with_capacity(samples.len());
    let mut skipped = 0;
    for &pt in samples {
        match cfm.h_field(pt) {
            Ok(h) => defects.push(h.abs()),
            Err(_) => skipped += 1,
        }
    }
    crate::verify::CheckReport::from_parts("h_vanishing", cfm.model().tol().quad, defects, skipped)
}

/// `|alpha(R) - 1|` over samples and a few `t` values, bar `1e-10`. The
/// spatial Reeb component is zero by construction and asserted
/// structurally on every evaluation.
pub fn reeb_normalization_check(cfm: &ContactFormModel, samples: &[Point]) -> crate::verify::CheckReport {
    let mut defects = Vec::new();
    let mut skipped = 0;
    for &pt in samples {
        for t in [-1.0, -0.4, 0.0, 0.55, 1.0] {
            match cfm.reeb_field(t, pt) {
                Ok(r) => {
                    assert_eq!(r.spatial, (0.0, 0.0));
                    defects.push((r.alpha_of_reeb - 1.0).abs());
                }
                Err(_) => skipped += 1,
            }
        }
    }
    crate::verify::CheckReport::from_parts("reeb_normalization", 1e-10, defects, skipped)
}

/// `|i_R dalpha|` over the same samples, measuring `dh = beta1 - beta0`
/// numerically; bar from the pullback tolerance.
pub fn reeb_contraction_check(cfm: &ContactFormModel, samples: &[Point]) -> crate::verify::CheckReport {
    let mut defects = Vec::new();
    let mut skipped = 0;
    for &pt in samples {
        for t in [-0.4, 0.0, 0.55] {
            match cfm.reeb_field(t, pt) {
                Ok(r) => defects.push(r.contraction_defect),
                Err(_) => skipped += 1,
            }
        }
    }
    crate::verify::CheckReport::from_parts("reeb_contraction", cfm.model().tol().pullback, defects, skipped)
}

/// Boundary behavior of the contact form: `alpha = dt + eps beta0` at
/// `t = -1` and `alpha = dt + eps beta1` at `t = 1`.
pub fn alpha_boundary_check(cfm: &ContactFormModel, samples: &[Point]) -> crate::verify::CheckReport {
    let eps = cfm.model().eps();
    let mut defects = Vec::new();
    let mut skipped = 0;
    for &pt in samples {
        let value = (|| -> Option<f64> {
            let a0 = cfm.eval_alpha(-1.0, pt).ok()?;
            let b0 = cfm.beta0(pt).ok()?.scale(eps);
            let a1 = cfm.eval_alpha(1.0, pt).ok()?;
            let b1 = cfm.beta1(pt).ok()?.scale(eps);
            let d0 = (a0.dt - 1.0).abs().max(a0.spatial.sub(b0).norm());
            let d1 = (a1.dt - 1.0).abs().max(a1.spatial.sub(b1).norm());
            Some(d0.max(d1))
        })();
        match value {
            Some(d) => defects.push(d),
            None => skipped += 1,
        }
    }
    crate::verify::CheckReport::from_parts("alpha_boundary", 1e-10, defects, skipped)
}

/// Aggregated contact suite report.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct ContactSuiteReport {
    pub h_vanishing: crate::verify::CheckReport,
    pub reeb_normalization: crate::verify::CheckReport,
    pub reeb_contraction: crate::verify::CheckReport,
    pub boundary: crate::verify::CheckReport,
    pub condition: ContactConditionReport,
    pub pass: bool,
}

/// Run the full contact suite: `h` vanishing, Reeb certification, the
/// band-end form of `alpha`, and the contact-condition grid.
pub fn contact_suite(model: &TorusModel, grid: (usize, usize, usize), seed: u64) -> ContactSuiteReport {
    let cfm = ContactFormModel::new(model);
    let samples = crate::verify::sample_beta_domain(model, seed, 60);
    let h_vanishing = h_vanishing_check(&cfm, &samples);
    let reeb_normalization = reeb_normalization_check(&cfm, &samples[..samples.len().min(12)]);
    let reeb_contraction = reeb_contraction_check(&cfm, &samples[..samples.len().min(12)]);
    let boundary = alpha_boundary_check(&cfm, &samples[..samples.len().min(12)]);
    let condition = verify_contact_condition(&cfm, grid.0, grid.1, grid.2);
    let pass = h_vanishing.pass
        && reeb_normalization.pass
        && reeb_contraction.pass
        && boundary.pass
        && condition.pass;
    ContactSuiteReport { h_vanishing, reeb_normalization, reeb_contraction, boundary, condition, pass }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{sample_beta_domain, settled_radius};

    #[test]
    fn cutoff_boundary_values() {
        let chi = CutoffPair::new(0.2);
        assert_eq!(chi.chi0(-1.0), 0.0);
        assert_eq!(chi.chi0(1.0), 1.0);
        assert_eq!(chi.chi1(-1.0), 0.0);
        assert_eq!(chi.chi1(1.0), 0.0);
        // chi0 is flat on the end bands.
        assert_eq!(chi.chi0(-0.85), 0.0);
        assert_eq!(chi.chi0(0.85), 1.0);
    }

    #[test]
    fn cutoff_is_monotone_and_chi1_matches_fd() {
        let chi = CutoffPair::new(0.2);
        let mut prev = -1.0;
        for i in 0..=200 {
            let t = -1.0 + 2.0 * i as f64 / 200.0;
            let v = chi.chi0(t);
            assert!((0.0..=1.0).contains(&v));
            assert!(v >= prev - 1e-14);
            prev = v;
            assert!(chi.chi1(t) >= 0.0);
            let d = 1e-6;
            if t > -1.0 + d && t < 1.0 - d {
                let fd = (chi.chi0(t + d) - chi.chi0(t - d)) / (2.0 * d);
                assert!((chi.chi1(t) - fd).abs() < 1e-7, "t = {t}");
                let fd1 = (chi.chi1(t + d) - chi.chi1(t - d)) / (2.0 * d);
                assert!((chi.chi1_prime(t) - fd1).abs() < 1e-5 * (1.0 + fd1.abs()), "t = {t}");
            }
        }
    }

    #[test]
    fn alpha_at_band_ends() {
        let model = TorusModel::for_n(3).unwrap();
        let cfm = ContactFormModel::new(&model);
        let pt = Point::from_polar(0.6 * model.r_star(), 0.3);
        let eps = model.eps();
        // t = -1: dt-component 1, spatial part eps * beta0.
        let a = cfm.eval_alpha(-1.0, pt).unwrap();
        let b0 = cfm.beta0(pt).unwrap();
        assert_eq!(a.dt, 1.0);
        assert!((a.spatial.p - eps * b0.p).abs() < 1e-14);
        assert!((a.spatial.q - eps * b0.q).abs() < 1e-14);
        // t = 1: dt-component 1, spatial part eps * beta1.
        let a = cfm.eval_alpha(1.0, pt).unwrap();
        let b1 = cfm.beta1(pt).unwrap();
        assert_eq!(a.dt, 1.0);
        assert!((a.spatial.p - eps * b1.p).abs() < 1e-12);
        assert!((a.spatial.q - eps * b1.q).abs() < 1e-12);
    }

    #[test]
    fn alpha_is_product_form_on_settled_annulus() {
        // Where the trajectory stays in the outer chart, h = 0 and
        // beta1 = beta0, so alpha = dt + eps beta0 for every t.
        let model = TorusModel::for_n(3).unwrap();
        let cfm = ContactFormModel::new(&model);
        let pt = Point::from_polar(1.3 * settled_radius(&model), 1.9);
        let b0 = cfm.beta0(pt).unwrap().scale(model.eps());
        for t in [-0.5, 0.0, 0.3, 0.9] {
            let a = cfm.eval_alpha(t, pt).unwrap();
            assert!((a.dt - 1.0).abs() < 1e-10);
            assert!((a.spatial.p - b0.p).abs() < 1e-8);
            assert!((a.spatial.q - b0.q).abs() < 1e-8);
        }
    }

    #[test]
    fn reeb_is_dt_on_saddle_boxes_and_certified() {
        let model = TorusModel::for_n(3).unwrap();
        let cfm = ContactFormModel::new(&model);
        let samples = sample_beta_domain(&model, 11, 12);
        for pt in samples {
            let r = match cfm.reeb_field(0.1, pt) {
                Ok(r) => r,
                Err(_) => continue,
            };
            assert_eq!(r.spatial, (0.0, 0.0));
            assert!((r.t_component - 1.0).abs() < 1e-10);
            assert!((r.alpha_of_reeb - 1.0).abs() < 1e-10);
            assert!(r.contraction_defect < 1e-6);
        }
    }

    #[test]
    fn contact_condition_holds_on_small_grid() {
        let model = TorusModel::for_n(2).unwrap();
        let cfm = ContactFormModel::new(&model);
        let report = verify_contact_condition(&cfm, 12, 12, 5);
        assert!(report.evaluated > 0);
        assert!(report.pass, "min density {}", report.min_density);
        assert!(report.max_abs_h < model.tol().quad);
        // Where h = 0 the density is eps * w * (stuff close to 1); the
        // outer chart has w = 1, so the minimum is close to eps somewhere.
        assert!(report.min_density <= model.eps() * 1.05);
    }

    #[test]
    fn large_eps_does_not_fail_the_constructed_form() {
        // h vanishes on the whole computable domain, so the density
        // eps * w * (1 + eps chi1 h) stays positive for every eps: the
        // bisection oracle comes back empty.
        let model = TorusModel::for_n(2).unwrap();
        let found = find_failing_eps(&model, CutoffPair::default(), None, (8, 8, 4), 0.01, 10.0);
        assert_eq!(found, None);
    }

    #[test]
    fn injected_h_exhibits_the_smallness_constraint() {
        // With a synthetic h == -1 the density is eps w (1 - eps chi1),
        // which fails once eps chi1 > 1 somewhere; the checker must flag
        // it and the bisection must locate the threshold 1 / max(chi1).
        let model = TorusModel::for_n(2).unwrap();
        let cutoffs = CutoffPair::default();
        let h = |_: Point| -1.0;
        let eps_fail =
            find_failing_eps(&model, cutoffs, Some(&h), (8, 8, 9), 0.01, 10.0).expect("must fail for large eps");
        // max chi1 over the t-grid (t = 0 is in the 9-point grid).
        let mut chi1_max = 0.0f64;
        for i in 0..9 {
            let t = -1.0 + 2.0 * i as f64 / 8.0;
            chi1_max = chi1_max.max(cutoffs.chi1(t));
        }
        let expected = 1.0 / chi1_max;
        assert!((eps_fail - expected).abs() < 0.05 * expected, "found {eps_fail}, expected {expected}");
        // And the Reeb denominator error fires there too.
        let mut params = model.params().clone();
        params.eps = 2.0 * expected;
        let m2 = TorusModel::new(params).unwrap();
        let cfm = ContactFormModel::with_h_override(&m2, cutoffs, Box::new(h));
        let pt = Point::from_polar(1.2 * settled_radius(&m2), 0.4);
        assert!(matches!(
            cfm.reeb_field(0.0, pt),
            Err(ContactError::NonpositiveDenominator { .. })
        ));
    }

    #[test]
    fn h_vanishes_on_beta_domain_samples() {
        let model = TorusModel::for_n(3).unwrap();
        let cfm = ContactFormModel::new(&model);
        let samples = sample_beta_domain(&model, 23, 30);
        let report = h_vanishing_check(&cfm, &samples);
        assert!(report.pass, "max |h| = {}", report.max_defect);
    }
}
