//! Chart decomposition of the plane and the closed-form fields living on it.
//!
//! The disk of radius `r_star` is covered by three kinds of charts:
//!
//! * the outer chart `r >= r_sing`, where the Hamiltonian is
//!   `H = mu r^2 cos(n theta)` and the 1-form is `(1/2) r^2 dtheta`;
//! * one square chart around each saddle point, where `H = a x y` in chart
//!   coordinates and the 1-form is `(1/2)(x dy - y dx)`;
//! * a default smoothing chart filling the rest of the small disk, carrying
//!   the harmonic polynomial `mu' Re(z^n - c z)` whose critical points are
//!   exactly the `n - 1` saddles.
//!
//! The 1-form carries no closed-form expression on the smoothing chart, so
//! every operation that needs it is restricted to the other two charts.

use crate::error::{ChartError, ModelError};
use crate::geom::{OneForm, Point};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Numeric tolerance bundle. Serialized under the `tolerances` key of the
/// model configuration; every field has a default.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative local error tolerance of the adaptive integrator.
    pub ode_rel: f64,
    /// Absolute local error tolerance of the adaptive integrator.
    pub ode_abs: f64,
    /// Bar for quadratures along trajectories.
    pub quad: f64,
    /// Newton convergence threshold on |phi(p) - p|.
    pub newton: f64,
    /// Maximum Newton iterations per seed.
    pub newton_max_iter: u32,
    /// Deduplication radius for converged fixed points.
    pub dedup: f64,
    /// Bar for flow-identification defects (arc matching, symmetry).
    pub flow: f64,
    /// Bar for pullback-invariance defects.
    pub pullback: f64,
    /// Bar for action-equality gaps in vanishing certificates.
    pub action: f64,
    /// Bar for closed-form algebraic identities.
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ode_rel: 1e-10,
            ode_abs: 1e-12,
            quad: 1e-10,
            newton: 1e-11,
            newton_max_iter: 50,
            dedup: 1e-6,
            flow: 1e-6,
            pullback: 1e-6,
            action: 1e-9,
            identity: 1e-12,
        }
    }
}

/// Raw model parameters as they appear in a JSON configuration object.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusParams {
    /// Number of prongs; the glued suture has `2n` components.
    pub n: u32,
    /// Hamiltonian scale of the outer chart.
    #[serde(default = "default_mu")]
    pub mu: f64,
    /// Contact smallness parameter.
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Saddle normal-form coefficient, shared by all saddles.
    #[serde(default = "default_a")]
    pub a: f64,
    /// Gluing stretch parameter; embedded orbits have action `2N`.
    #[serde(rename = "N", default = "default_stretch")]
    pub stretch: f64,
    /// Radius of the smoothing disk.
    #[serde(default = "default_r_sing")]
    pub r_sing: f64,
    /// Radius of the gluing circle carrying the `a+` arcs. Zero means
    /// "derive a default from `n`, `mu` and `r_sing`".
    #[serde(rename = "R", default)]
    pub r_glue: f64,
    /// Radius of the working disk. Zero means "derive a default".
    #[serde(rename = "R_star", default)]
    pub r_star: f64,
    /// Linear coefficient of the smoothing polynomial. Zero means "derive
    /// a default placing the saddles at radius `0.4 r_sing`".
    #[serde(default)]
    pub c: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_mu() -> f64 {
    0.25
}
fn default_eps() -> f64 {
    0.25
}
fn default_a() -> f64 {
    1.0
}
fn default_stretch() -> f64 {
    5.0
}
fn default_r_sing() -> f64 {
    0.5
}

impl TorusParams {
    /// Default parameter set for a given prong count. The radii grow with
    /// `exp(n mu)` so that every time-1 trajectory started on or above the
    /// gluing circle stays outside the smoothing disk.
    pub fn for_n(n: u32) -> Self {
        let mut params = TorusParams {
            n,
            mu: default_mu(),
            eps: default_eps(),
            a: default_a(),
            stretch: default_stretch(),
            r_sing: default_r_sing(),
            r_glue: 0.0,
            r_star: 0.0,
            c: 0.0,
            tolerances: Tolerances::default(),
        };
        params.fill_derived();
        params
    }

    /// Replace zero-valued radii and smoothing coefficient with defaults
    /// derived from `n`, `mu` and `r_sing`.
    pub fn fill_derived(&mut self) {
        let growth = (self.n as f64 * self.mu).exp();
        if self.c == 0.0 {
            // Saddles of Re(z^n - cz) sit at radius (c/n)^(1/(n-1)).
            let target = 0.4 * self.r_sing;
            self.c = self.n as f64 * target.powi(self.n as i32 - 1);
        }
        if self.r_glue == 0.0 {
            // Radial contraction over unit time is at most exp(-n mu), so
            // two factors of `growth` keep the flowed arcs outside r_sing.
            self.r_glue = 1.4 * self.r_sing * growth * growth;
        }
        if self.r_star == 0.0 {
            self.r_star = 2.8 * self.r_glue * growth;
        }
    }
}

/// Chart and region tags of the disk decomposition.
///
/// `classify` assigns one of `SaddleChart`, `OuterExact` or `PolySmoothing`
/// to every point, with priority in that order. `AnnulusVr` is a query tag
/// for the annulus `r_glue <= r <= r_star` (a subset of the outer chart)
/// and is never returned by `classify`. `NoChart` is reserved for
/// configurations whose charts fail to cover a queried point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    OuterExact,
    SaddleChart(usize),
    PolySmoothing,
    AnnulusVr,
    NoChart,
}

/// Validated model: parameters plus the precomputed saddle-chart layout.
#[derive(Clone, Debug)]
pub struct TorusModel {
    params: TorusParams,
    saddles: Vec<Point>,
    chart_half_width: f64,
    /// Scale of the smoothing polynomial, chosen so its leading term matches
    /// the magnitude of the outer Hamiltonian at `r = r_sing`.
    mu_prime: f64,
}

impl TorusModel {
    pub fn new(mut params: TorusParams) -> Result<Self, ModelError> {
        params.fill_derived();
        validate(&params)?;
        let n = params.n;
        let saddle_radius = (params.c / n as f64).powf(1.0 / (n as f64 - 1.0));
        let mut saddles = Vec::with_capacity(n as usize - 1);
        for j in 0..(n - 1) {
            let angle = 2.0 * std::f64::consts::PI * j as f64 / (n as f64 - 1.0);
            saddles.push(Point::from_polar(saddle_radius, angle));
        }
        for (index, s) in saddles.iter().enumerate() {
            let radius = s.radius();
            if radius >= params.r_sing {
                return Err(ModelError::SaddleSeedOutsideDisk { index, radius, r_sing: params.r_sing });
            }
        }

        // Square chart half-width: 0.4 of the smallest pairwise saddle
        // distance in the chart (sup) norm, which is what keeps coordinate
        // squares disjoint; additionally capped so each square stays
        // strictly inside the smoothing disk (keeps saddle charts disjoint
        // from the outer chart).
        let mut min_pairwise = f64::INFINITY;
        for i in 0..saddles.len() {
            for j in (i + 1)..saddles.len() {
                let d = saddles[i].sub(saddles[j]);
                min_pairwise = min_pairwise.min(d.x.abs().max(d.y.abs()));
            }
        }
        let boundary_cap = 0.7 * (params.r_sing - saddle_radius);
        let chart_half_width = (0.4 * min_pairwise).min(boundary_cap);

        let mu_prime = params.mu * params.r_sing.powi(2 - n as i32);

        let model = TorusModel { params, saddles, chart_half_width, mu_prime };
        for index in 0..model.saddles.len() {
            let det = model.smoothing_hessian_det(index);
            if det.abs() <= 1e-10 * model.mu_prime * model.mu_prime {
                return Err(ModelError::DegenerateSaddle { index, det });
            }
            if det >= 0.0 {
                return Err(ModelError::DegenerateSaddle { index, det });
            }
        }
        Ok(model)
    }

    pub fn for_n(n: u32) -> Result<Self, ModelError> {
        TorusModel::new(TorusParams::for_n(n))
    }

    pub fn params(&self) -> &TorusParams {
        &self.params
    }

    pub fn n(&self) -> u32 {
        self.params.n
    }

    pub fn mu(&self) -> f64 {
        self.params.mu
    }

    pub fn eps(&self) -> f64 {
        self.params.eps
    }

    pub fn coeff_a(&self) -> f64 {
        self.params.a
    }

    pub fn stretch(&self) -> f64 {
        self.params.stretch
    }

    pub fn r_sing(&self) -> f64 {
        self.params.r_sing
    }

    pub fn r_glue(&self) -> f64 {
        self.params.r_glue
    }

    pub fn r_star(&self) -> f64 {
        self.params.r_star
    }

    pub fn tol(&self) -> &Tolerances {
        &self.params.tolerances
    }

    pub fn chart_half_width(&self) -> f64 {
        self.chart_half_width
    }

    /// The `n - 1` saddle points, certified nondegenerate at construction.
    /// Roots of `n z^(n-1) = c`: radius `(c/n)^(1/(n-1))`, angles
    /// `2 pi j / (n-1)`.
    pub fn saddle_points(&self) -> &[Point] {
        &self.saddles
    }

    /// Hessian determinant of the smoothing Hamiltonian at saddle `index`.
    /// For the harmonic polynomial this is `-|mu' F''(z)|^2` with
    /// `F(z) = z^n - c z`.
    pub fn smoothing_hessian_det(&self, index: usize) -> f64 {
        let n = self.params.n as f64;
        let z = Complex64::new(self.saddles[index].x, self.saddles[index].y);
        let f2 = z.powf(n - 2.0) * n * (n - 1.0) * self.mu_prime;
        -f2.norm_sqr()
    }

    /// Chart coordinates of `pt` relative to saddle `k` (axes parallel to
    /// the plane axes).
    pub fn to_saddle_chart(&self, k: usize, pt: Point) -> Point {
        pt.sub(self.saddles[k])
    }

    pub fn from_saddle_chart(&self, k: usize, chart: Point) -> Point {
        chart.add(self.saddles[k])
    }

    /// Deterministic chart assignment with priority
    /// `SaddleChart > OuterExact > PolySmoothing`.
    pub fn classify(&self, pt: Point) -> Region {
        if !pt.is_finite() {
            return Region::NoChart;
        }
        for k in 0..self.saddles.len() {
            let c = self.to_saddle_chart(k, pt);
            if c.x.abs() <= self.chart_half_width && c.y.abs() <= self.chart_half_width {
                return Region::SaddleChart(k);
            }
        }
        if pt.radius() >= self.params.r_sing {
            Region::OuterExact
        } else {
            Region::PolySmoothing
        }
    }

    /// Membership predicate for a region tag (including the query-only
    /// `AnnulusVr` tag).
    pub fn region_contains(&self, region: Region, pt: Point) -> bool {
        match region {
            Region::OuterExact => self.classify(pt) == Region::OuterExact,
            Region::SaddleChart(k) => self.classify(pt) == Region::SaddleChart(k),
            Region::PolySmoothing => self.classify(pt) == Region::PolySmoothing,
            Region::AnnulusVr => {
                let r = pt.radius();
                r >= self.params.r_glue && r <= self.params.r_star
            }
            Region::NoChart => false,
        }
    }

    /// Hamiltonian value at `pt`, using the chart formula selected by
    /// `classify`.
    pub fn eval_h(&self, pt: Point) -> Result<f64, ChartError> {
        match self.classify(pt) {
            Region::OuterExact => Ok(self.h_outer(pt)),
            Region::SaddleChart(k) => {
                let c = self.to_saddle_chart(k, pt);
                Ok(self.params.a * c.x * c.y)
            }
            Region::PolySmoothing => Ok(self.h_smoothing(pt)),
            _ => Err(ChartError::PointOutsideCharts(pt)),
        }
    }

    fn h_outer(&self, pt: Point) -> f64 {
        let r = pt.radius();
        let theta = pt.angle();
        self.params.mu * r * r * (self.params.n as f64 * theta).cos()
    }

    fn h_smoothing(&self, pt: Point) -> f64 {
        let z = Complex64::new(pt.x, pt.y);
        let n = self.params.n;
        self.mu_prime * (z.powu(n) - z * self.params.c).re
    }

    /// The 1-form of the chart decomposition, without any contact-scale
    /// prefactor: `(1/2)(x dy - y dx)` on the outer chart (that is,
    /// `(1/2) r^2 dtheta`) and `(1/2)(x dy - y dx)` in saddle-chart
    /// coordinates. There is no closed form on the smoothing chart.
    pub fn eval_beta(&self, pt: Point) -> Result<OneForm, ChartError> {
        match self.classify(pt) {
            Region::OuterExact => Ok(OneForm::new(-0.5 * pt.y, 0.5 * pt.x)),
            Region::SaddleChart(k) => {
                let c = self.to_saddle_chart(k, pt);
                Ok(OneForm::new(-0.5 * c.y, 0.5 * c.x))
            }
            Region::PolySmoothing => Err(ChartError::NoFormulaInSmoothingChart(pt)),
            _ => Err(ChartError::PointOutsideCharts(pt)),
        }
    }

    /// The Liouville form entering the dynamics and the contact form: the
    /// chart 1-form scaled by `eps` on saddle charts and by 1 on the outer
    /// chart, so that its exterior derivative has density `area_density`.
    pub fn liouville_form(&self, pt: Point) -> Result<OneForm, ChartError> {
        let beta = self.eval_beta(pt)?;
        Ok(beta.scale(self.beta_scale(pt)?))
    }

    fn beta_scale(&self, pt: Point) -> Result<f64, ChartError> {
        match self.classify(pt) {
            Region::OuterExact => Ok(1.0),
            Region::SaddleChart(_) => Ok(self.params.eps),
            Region::PolySmoothing => Err(ChartError::NoFormulaInSmoothingChart(pt)),
            _ => Err(ChartError::PointOutsideCharts(pt)),
        }
    }

    /// Density of `d(liouville_form)` against `dx ^ dy`.
    pub fn area_density(&self, pt: Point) -> Result<f64, ChartError> {
        self.beta_scale(pt)
    }

    /// Area density used by the flow on every chart. On the smoothing
    /// chart, where the 1-form has no formula, the flow runs against the
    /// standard area form (density 1); this only affects the time
    /// parametrization of trajectories that enter the smoothing gap, which
    /// no quantitative check depends on.
    pub fn flow_density(&self, pt: Point) -> Result<f64, ChartError> {
        match self.classify(pt) {
            Region::OuterExact => Ok(1.0),
            Region::SaddleChart(_) => Ok(self.params.eps),
            Region::PolySmoothing => Ok(1.0),
            _ => Err(ChartError::PointOutsideCharts(pt)),
        }
    }

    /// Gradient of the Hamiltonian in plane coordinates, per chart.
    pub fn h_gradient(&self, pt: Point) -> Result<Point, ChartError> {
        match self.classify(pt) {
            Region::OuterExact => {
                let n = self.params.n as f64;
                let mu = self.params.mu;
                let r = pt.radius();
                let theta = pt.angle();
                let (sn, cn) = (n * theta).sin_cos();
                let (st, ct) = theta.sin_cos();
                // H_r = 2 mu r cos(n theta), H_theta = -n mu r^2 sin(n theta)
                let hx = 2.0 * mu * r * cn * ct + n * mu * r * sn * st;
                let hy = 2.0 * mu * r * cn * st - n * mu * r * sn * ct;
                Ok(Point::new(hx, hy))
            }
            Region::SaddleChart(k) => {
                let c = self.to_saddle_chart(k, pt);
                Ok(Point::new(self.params.a * c.y, self.params.a * c.x))
            }
            Region::PolySmoothing => {
                // For H = Re F: H_x = Re F', H_y = -Im F'.
                let z = Complex64::new(pt.x, pt.y);
                let n = self.params.n;
                let f1 = (z.powu(n - 1) * n as f64 - self.params.c) * self.mu_prime;
                Ok(Point::new(f1.re, -f1.im))
            }
            _ => Err(ChartError::PointOutsideCharts(pt)),
        }
    }

    /// Hessian of the Hamiltonian as `(H_xx, H_xy, H_yy)`, per chart.
    pub fn h_hessian(&self, pt: Point) -> Result<(f64, f64, f64), ChartError> {
        match self.classify(pt) {
            Region::OuterExact => {
                let n = self.params.n as f64;
                let mu = self.params.mu;
                let r = pt.radius();
                let theta = pt.angle();
                let (sn, cn) = (n * theta).sin_cos();
                let (st, ct) = theta.sin_cos();
                // Polar second derivatives of H = mu r^2 cos(n theta).
                let h_rr = 2.0 * mu * cn;
                let h_rt = -2.0 * n * mu * r * sn;
                let h_tt = -n * n * mu * r * r * cn;
                let h_r = 2.0 * mu * r * cn;
                let h_t = -n * mu * r * r * sn;
                // Cartesian conversion.
                let h_xx = h_rr * ct * ct - 2.0 * h_rt * ct * st / r + h_tt * st * st / (r * r)
                    + h_r * st * st / r
                    + 2.0 * h_t * st * ct / (r * r);
                let h_yy = h_rr * st * st + 2.0 * h_rt * ct * st / r + h_tt * ct * ct / (r * r)
                    + h_r * ct * ct / r
                    - 2.0 * h_t * st * ct / (r * r);
                let h_xy = h_rr * ct * st + h_rt * (ct * ct - st * st) / r
                    - h_tt * ct * st / (r * r)
                    - h_r * ct * st / r
                    + h_t * (st * st - ct * ct) / (r * r);
                Ok((h_xx, h_xy, h_yy))
            }
            Region::SaddleChart(_) => Ok((0.0, self.params.a, 0.0)),
            Region::PolySmoothing => {
                let z = Complex64::new(pt.x, pt.y);
                let n = self.params.n;
                let f2 = z.powu(n - 2) * (n * (n - 1)) as f64 * self.mu_prime;
                // H_xx = Re F'', H_xy = -Im F'', H_yy = -Re F''.
                Ok((f2.re, -f2.im, -f2.re))
            }
            _ => Err(ChartError::PointOutsideCharts(pt)),
        }
    }

    /// True when the whole square `[-w, w]^2` around `pt` in saddle-chart
    /// `k` coordinates is inside the chart (used to certify trajectories).
    pub fn in_saddle_square(&self, k: usize, pt: Point, margin: f64) -> bool {
        let c = self.to_saddle_chart(k, pt);
        c.x.abs() <= self.chart_half_width - margin && c.y.abs() <= self.chart_half_width - margin
    }

    /// Radius above which every time-1 trajectory provably stays outside
    /// the smoothing disk: the radial velocity satisfies
    /// `dr/dt >= -n mu r`, so contraction is bounded by `exp(-n mu)`.
    pub fn settled_radius(&self) -> f64 {
        1.05 * self.params.r_sing * (self.params.n as f64 * self.params.mu).exp()
    }
}

fn validate(params: &TorusParams) -> Result<(), ModelError> {
    fn positive(name: &'static str, value: f64) -> Result<(), ModelError> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(ModelError::InvalidParameter {
                name,
                reason: format!("must be positive and finite, got {value}"),
            });
        }
        Ok(())
    }
    if params.n < 2 {
        return Err(ModelError::InvalidParameter { name: "n", reason: format!("must be >= 2, got {}", params.n) });
    }
    positive("mu", params.mu)?;
    positive("eps", params.eps)?;
    positive("a", params.a)?;
    positive("N", params.stretch)?;
    positive("r_sing", params.r_sing)?;
    positive("R", params.r_glue)?;
    positive("R_star", params.r_star)?;
    positive("c", params.c)?;
    if !(params.r_sing < params.r_glue && params.r_glue < params.r_star) {
        return Err(ModelError::InvalidParameter {
            name: "R",
            reason: format!(
                "radii must satisfy r_sing < R < R_star, got {} / {} / {}",
                params.r_sing, params.r_glue, params.r_star
            ),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn model(n: u32) -> TorusModel {
        TorusModel::for_n(n).unwrap()
    }

    #[test]
    fn outer_hamiltonian_direct_substitution() {
        // n=3, mu=1, r=2, theta=0 -> 4
        let mut p = TorusParams::for_n(3);
        p.mu = 1.0;
        let m = TorusModel::new(p).unwrap();
        let v = m.eval_h(Point::from_polar(2.0, 0.0)).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
    }

    #[test]
    fn outer_hamiltonian_at_cos_pi() {
        // n=3, mu=2, r=2, theta=pi/3 -> -8
        let mut p = TorusParams::for_n(3);
        p.mu = 2.0;
        let m = TorusModel::new(p).unwrap();
        let v = m.eval_h(Point::from_polar(2.0, PI / 3.0)).unwrap();
        assert!((v + 8.0).abs() < 1e-12);
    }

    #[test]
    fn saddle_hamiltonian_is_axy() {
        // a=1, chart coords (0.1, 0.2) -> 0.02
        let m = model(3);
        let pt = m.from_saddle_chart(0, Point::new(0.1 * m.chart_half_width(), 0.2 * m.chart_half_width()));
        let c = m.to_saddle_chart(0, pt);
        let v = m.eval_h(pt).unwrap();
        assert!((v - c.x * c.y).abs() < 1e-15);
        // And literally with the quoted numbers on a model whose chart is
        // wide enough to contain them.
        let mut p = TorusParams::for_n(2);
        p.r_sing = 4.0;
        p.c = 0.0; // re-derive: saddle at radius 1.6
        p.r_glue = 0.0;
        p.r_star = 0.0;
        let m = TorusModel::new(p).unwrap();
        assert!(m.chart_half_width() > 0.2);
        let pt = m.from_saddle_chart(0, Point::new(0.1, 0.2));
        assert!((m.eval_h(pt).unwrap() - 0.02).abs() < 1e-14);
    }

    #[test]
    fn beta_examples() {
        let m = model(3);
        // Outer (1,0) -> (0, 1/2). Radius 1 is outside r_sing = 0.5.
        let b = m.eval_beta(Point::new(1.0, 0.0)).unwrap();
        assert_eq!((b.p, b.q), (0.0, 0.5));
        // Outer (0,2) -> (-1, 0).
        let b = m.eval_beta(Point::new(0.0, 2.0)).unwrap();
        assert_eq!((b.p, b.q), (-1.0, 0.0));
        // Saddle chart coords (1,1) -> (-1/2, 1/2), on a wide-chart model.
        let mut p = TorusParams::for_n(2);
        p.r_sing = 10.0;
        p.c = 0.0;
        p.r_glue = 0.0;
        p.r_star = 0.0;
        let m = TorusModel::new(p).unwrap();
        assert!(m.chart_half_width() > 1.0);
        let pt = m.from_saddle_chart(0, Point::new(1.0, 1.0));
        let b = m.eval_beta(pt).unwrap();
        assert_eq!((b.p, b.q), (-0.5, 0.5));
    }

    #[test]
    fn beta_has_no_formula_in_smoothing_chart() {
        let m = model(3);
        // A point in the smoothing gap: inside r_sing, away from saddles.
        let pt = Point::from_polar(0.45, PI / (m.n() as f64 - 1.0));
        assert_eq!(m.classify(pt), Region::PolySmoothing);
        assert!(matches!(m.eval_beta(pt), Err(ChartError::NoFormulaInSmoothingChart(_))));
    }

    #[test]
    fn saddle_points_closed_form() {
        // n=2, c=2 -> single root of 2z = 2 at (1, 0).
        let mut p = TorusParams::for_n(2);
        p.r_sing = 1.5;
        p.c = 2.0;
        let m = TorusModel::new(p).unwrap();
        assert_eq!(m.saddle_points().len(), 1);
        assert!(m.saddle_points()[0].dist(Point::new(1.0, 0.0)) < 1e-12);

        // n=3, c=3 -> roots of 3z^2 = 3 at radius 1, angles 0 and pi.
        let mut p = TorusParams::for_n(3);
        p.r_sing = 1.5;
        p.c = 3.0;
        let m = TorusModel::new(p).unwrap();
        assert_eq!(m.saddle_points().len(), 2);
        assert!(m.saddle_points()[0].dist(Point::new(1.0, 0.0)) < 1e-12);
        assert!(m.saddle_points()[1].dist(Point::new(-1.0, 0.0)) < 1e-12);
    }

    #[test]
    fn saddle_count_and_nondegeneracy() {
        for n in 2..=8 {
            let m = model(n);
            assert_eq!(m.saddle_points().len(), (n - 1) as usize);
            for k in 0..m.saddle_points().len() {
                assert!(m.smoothing_hessian_det(k) < 0.0);
            }
        }
    }

    #[test]
    fn classify_examples() {
        let m = model(3);
        assert_eq!(m.classify(Point::new(2.0 * m.r_sing(), 0.0)), Region::OuterExact);
        assert_eq!(m.classify(m.saddle_points()[0]), Region::SaddleChart(0));
        assert_eq!(m.classify(Point::new(0.0, 0.0)), Region::PolySmoothing);
    }

    #[test]
    fn saddle_charts_disjoint_and_inside_smoothing_disk() {
        for n in 2..=8 {
            let m = model(n);
            let w = m.chart_half_width();
            assert!(w > 0.0);
            let corners = [
                Point::new(w, w),
                Point::new(w, -w),
                Point::new(-w, w),
                Point::new(-w, -w),
            ];
            for k in 0..m.saddle_points().len() {
                for corner in corners {
                    let pt = m.from_saddle_chart(k, corner);
                    // Strictly inside the smoothing disk, hence disjoint
                    // from the outer chart.
                    assert!(pt.radius() < m.r_sing());
                }
                for j in 0..m.saddle_points().len() {
                    if j != k {
                        let c = m.to_saddle_chart(j, m.saddle_points()[k]);
                        assert!(c.x.abs() > 2.0 * w || c.y.abs() > 2.0 * w);
                    }
                }
            }
        }
    }

    #[test]
    fn annulus_vr_is_subset_of_outer() {
        let m = model(4);
        for i in 0..200 {
            let r = m.r_glue() + (m.r_star() - m.r_glue()) * i as f64 / 199.0;
            let pt = Point::from_polar(r, 0.013 * i as f64);
            assert!(m.region_contains(Region::AnnulusVr, pt));
            assert_eq!(m.classify(pt), Region::OuterExact);
        }
    }

    #[test]
    fn outer_hamiltonian_is_periodic_in_theta() {
        let m = model(5);
        let period = 2.0 * PI / m.n() as f64;
        for i in 0..100 {
            let r = m.r_sing() * (1.0 + i as f64 * 0.3);
            let theta = 0.061 * i as f64;
            let h0 = m.eval_h(Point::from_polar(r, theta)).unwrap();
            let h1 = m.eval_h(Point::from_polar(r, theta + period)).unwrap();
            assert!((h0 - h1).abs() <= 1e-12 * (1.0 + h0.abs()));
        }
    }

    #[test]
    fn gradient_and_hessian_match_finite_differences() {
        let m = model(3);
        let pts = [
            Point::from_polar(2.0 * m.r_sing(), 0.7),
            Point::from_polar(0.9 * m.r_sing(), 2.0),
            m.from_saddle_chart(0, Point::new(0.3 * m.chart_half_width(), -0.2 * m.chart_half_width())),
        ];
        let h = 1e-5;
        for pt in pts {
            let region = m.classify(pt);
            let same = |q: Point| m.classify(q) == region;
            let ex = Point::new(h, 0.0);
            let ey = Point::new(0.0, h);
            if !(same(pt.add(ex)) && same(pt.sub(ex)) && same(pt.add(ey)) && same(pt.sub(ey))) {
                continue;
            }
            let g = m.h_gradient(pt).unwrap();
            let fd_x = (m.eval_h(pt.add(ex)).unwrap() - m.eval_h(pt.sub(ex)).unwrap()) / (2.0 * h);
            let fd_y = (m.eval_h(pt.add(ey)).unwrap() - m.eval_h(pt.sub(ey)).unwrap()) / (2.0 * h);
            assert!((g.x - fd_x).abs() < 1e-7 * (1.0 + g.x.abs()));
            assert!((g.y - fd_y).abs() < 1e-7 * (1.0 + g.y.abs()));

            let (hxx, hxy, hyy) = m.h_hessian(pt).unwrap();
            let gx_p = m.h_gradient(pt.add(ex)).unwrap();
            let gx_m = m.h_gradient(pt.sub(ex)).unwrap();
            let gy_p = m.h_gradient(pt.add(ey)).unwrap();
            let gy_m = m.h_gradient(pt.sub(ey)).unwrap();
            assert!((hxx - (gx_p.x - gx_m.x) / (2.0 * h)).abs() < 1e-6 * (1.0 + hxx.abs()));
            assert!((hxy - (gy_p.x - gy_m.x) / (2.0 * h)).abs() < 1e-6 * (1.0 + hxy.abs()));
            assert!((hyy - (gy_p.y - gy_m.y) / (2.0 * h)).abs() < 1e-6 * (1.0 + hyy.abs()));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut p = TorusParams::for_n(2);
        p.n = 1;
        assert!(TorusModel::new(p).is_err());
        let mut p = TorusParams::for_n(3);
        p.mu = -1.0;
        assert!(TorusModel::new(p).is_err());
        let mut p = TorusParams::for_n(3);
        p.r_glue = 0.1; // below r_sing
        assert!(TorusModel::new(p).is_err());
        // Saddle seeds outside the smoothing disk.
        let mut p = TorusParams::for_n(3);
        p.c = 300.0;
        assert!(matches!(TorusModel::new(p), Err(ModelError::SaddleSeedOutsideDisk { .. })));
    }
}
