//! Numeric certification of the exactness identities satisfied by the
//! Hamiltonian, the 1-form and the time-1 flow:
//!
//! * `beta(X_H) = H` on the outer chart and the saddle charts (closed
//!   form, so the pass bar is essentially roundoff);
//! * the exactness primitive `f` vanishes at the saddles and on points
//!   whose trajectories stay outside the smoothing disk;
//! * the time-1 map preserves the 1-form on those regions, and in general
//!   `phi* beta - beta = df`;
//! * the flow commutes with rotation by `2 pi / n` on the outer chart;
//! * energy conservation, unit jacobian determinant, and the saddle
//!   return maps `diag(exp(-a/eps), exp(a/eps))`.
//!
//! Each check produces a [`CheckReport`] with per-sample defects; suites
//! aggregate them in input order.

use crate::flow::{self, LinearClass};
use crate::geom::Point;
use crate::model::{Region, TorusModel};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Result of one sampled check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub tolerance: f64,
    /// Number of samples actually evaluated.
    pub samples: usize,
    /// Samples excluded by precondition filtering (e.g. trajectory left
    /// the charts carrying the 1-form).
    pub skipped: usize,
    pub max_defect: f64,
    pub pass: bool,
    /// Per-sample defects, in input order.
    pub defects: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    /// Build a report from per-sample defects; passes when nonempty and
    /// every defect is within tolerance.
    pub fn from_parts(name: &str, tolerance: f64, defects: Vec<f64>, skipped: usize) -> Self {
        let max_defect = defects.iter().cloned().fold(0.0, f64::max);
        CheckReport {
            name: name.to_string(),
            tolerance,
            samples: defects.len(),
            skipped,
            max_defect,
            pass: !defects.is_empty() && max_defect <= tolerance,
            defects,
            notes: Vec::new(),
        }
    }

    fn note(mut self, s: String) -> Self {
        self.notes.push(s);
        self
    }
}

/// Aggregated suite of checks; `pass` is the conjunction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn new(suite: &str, checks: Vec<CheckReport>) -> Self {
        SuiteReport { suite: suite.to_string(), pass: checks.iter().all(|c| c.pass), checks }
    }
}

/// Radius above which every time-1 trajectory provably stays outside the
/// smoothing disk.
pub fn settled_radius(model: &TorusModel) -> f64 {
    model.settled_radius()
}

/// Jittered samples in the annulus `[r_lo, r_hi]`, area-uniform.
pub fn sample_annulus(rng: &mut ChaCha8Rng, r_lo: f64, r_hi: f64, count: usize) -> Vec<Point> {
    (0..count)
        .map(|_| {
            let u: f64 = rng.gen();
            let r = (r_lo * r_lo + u * (r_hi * r_hi - r_lo * r_lo)).sqrt();
            let theta: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
            Point::from_polar(r, theta)
        })
        .collect()
}

/// Samples inside saddle square `k` whose forward time-1 trajectory stays
/// in the square: the expanding coordinate shrinks the admissible band by
/// `exp(a/eps)`.
pub fn sample_saddle_box(model: &TorusModel, rng: &mut ChaCha8Rng, k: usize, count: usize) -> Vec<Point> {
    let w = model.chart_half_width();
    let y_band = 0.9 * w * (-model.coeff_a() / model.eps()).exp();
    (0..count)
        .map(|_| {
            let x = (rng.gen::<f64>() * 2.0 - 1.0) * 0.9 * w;
            let y = (rng.gen::<f64>() * 2.0 - 1.0) * y_band;
            model.from_saddle_chart(k, Point::new(x, y))
        })
        .collect()
}

/// Samples distributed over the settled annulus and all saddle boxes.
pub fn sample_beta_domain(model: &TorusModel, seed: u64, count: usize) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_saddle = model.saddle_points().len();
    let per_box = (count / 4) / n_saddle.max(1);
    let mut pts = Vec::with_capacity(count);
    for k in 0..n_saddle {
        pts.extend(sample_saddle_box(model, &mut rng, k, per_box));
    }
    let r_lo = settled_radius(model);
    let r_hi = model.r_star();
    pts.extend(sample_annulus(&mut rng, r_lo, r_hi, count - pts.len()));
    pts
}

/// `|beta(X_H) - H|` at each sample; closed-form evaluation on both sides.
pub fn beta_xh_identity_check(model: &TorusModel, samples: &[Point]) -> CheckReport {
    let mut defects = Vec::with_capacity(samples.len());
    let mut skipped = 0;
    for &pt in samples {
        let value = (|| -> Option<f64> {
            let beta = model.liouville_form(pt).ok()?;
            let x = flow::vector_field(model, pt).ok()?;
            let h = model.eval_h(pt).ok()?;
            Some((beta.apply(x) - h).abs())
        })();
        match value {
            Some(d) => defects.push(d),
            None => skipped += 1,
        }
    }
    CheckReport::from_parts("beta_xh_identity", model.tol().identity, defects, skipped)
}

/// `|f(p_k)|` at every saddle point.
pub fn exactness_at_saddles_check(model: &TorusModel) -> CheckReport {
    let mut defects = Vec::new();
    let mut skipped = 0;
    for &s in model.saddle_points() {
        match flow::exactness_primitive(model, s, 1.0) {
            Ok(f) => defects.push(f.abs()),
            Err(_) => skipped += 1,
        }
    }
    CheckReport::from_parts("exactness_at_saddles", 1e-10, defects, skipped)
}

/// `|f|` on outer samples whose trajectories are certified to stay
/// outside the smoothing disk.
pub fn exactness_outer_check(model: &TorusModel, samples: &[Point]) -> CheckReport {
    let mut defects = Vec::with_capacity(samples.len());
    let mut skipped = 0;
    for &pt in samples {
        if model.classify(pt) != Region::OuterExact {
            skipped += 1;
            continue;
        }
        match flow::flow_in_beta_domain(model, pt, 1.0) {
            Ok(r) if r.stayed_in_chart => defects.push(r.exactness.unwrap_or(f64::NAN).abs()),
            _ => skipped += 1,
        }
    }
    CheckReport::from_parts("exactness_outer", 1e-8, defects, skipped)
}

/// Pullback invariance `phi* beta = beta` on samples certified to stay in
/// the chart they start in.
pub fn pullback_invariance_check(model: &TorusModel, samples: &[Point]) -> CheckReport {
    let mut defects = Vec::with_capacity(samples.len());
    let mut skipped = 0;
    for &pt in samples {
        let value = (|| -> Option<f64> {
            let beta_here = model.liouville_form(pt).ok()?;
            let r = flow::flow_in_beta_domain(model, pt, 1.0).ok()?;
            if !r.stayed_in_chart {
                return None;
            }
            let beta_img = model.liouville_form(r.endpoint).ok()?;
            Some(r.jacobian.pullback(beta_img).sub(beta_here).norm())
        })();
        match value {
            Some(d) => defects.push(d),
            None => skipped += 1,
        }
    }
    CheckReport::from_parts("pullback_invariance", model.tol().pullback, defects, skipped)
}

/// The weaker identity `phi* beta - beta = df`, with `df` from central
/// differences of the exactness primitive. Applies to any sample where
/// the primitive is computable on the whole stencil.
pub fn exactness_gradient_check(model: &TorusModel, samples: &[Point]) -> CheckReport {
    let mut defects = Vec::with_capacity(samples.len());
    let mut skipped = 0;
    for &pt in samples {
        let step = 1e-5 * pt.radius().max(1.0);
        let value = (|| -> Option<f64> {
            let beta_here = model.liouville_form(pt).ok()?;
            let r = flow::flow_in_beta_domain(model, pt, 1.0).ok()?;
            let beta_img = model.liouville_form(r.endpoint).ok()?;
            let lhs = r.jacobian.pullback(beta_img).sub(beta_here);
            let f = |q: Point| flow::exactness_primitive(model, q, 1.0).ok();
            let fx = (f(Point::new(pt.x + step, pt.y))? - f(Point::new(pt.x - step, pt.y))?) / (2.0 * step);
            let fy = (f(Point::new(pt.x, pt.y + step))? - f(Point::new(pt.x, pt.y - step))?) / (2.0 * step);
            Some(((lhs.p - fx).powi(2) + (lhs.q - fy).powi(2)).sqrt())
        })();
        match value {
            Some(d) => defects.push(d),
            None => skipped += 1,
        }
    }
    CheckReport::from_parts("pullback_equals_df", 1e-6, defects, skipped)
}

/// Equivariance of the time-1 map under rotation by `2 pi / n` on the
/// outer chart.
pub fn symmetry_check(model: &TorusModel, samples: &[Point]) -> CheckReport {
    let period = std::f64::consts::TAU / model.n() as f64;
    let mut defects = Vec::with_capacity(samples.len());
    let mut skipped = 0;
    for &pt in samples {
        if model.classify(pt) != Region::OuterExact {
            skipped += 1;
            continue;
        }
        let value = (|| -> Option<f64> {
            let a = flow::flow(model, pt, 1.0).ok()?.endpoint.rotate(period);
            let b = flow::flow(model, pt.rotate(period), 1.0).ok()?.endpoint;
            Some(a.dist(b))
        })();
        match value {
            Some(d) => defects.push(d),
            None => skipped += 1,
        }
    }
    CheckReport::from_parts("rotation_equivariance", model.tol().flow, defects, skipped)
}

/// Energy drift `|H o phi^t - H|` at `t = 1/2` and `t = 1` on trajectories
/// certified to stay in their starting chart.
pub fn energy_conservation_check(model: &TorusModel, samples: &[Point]) -> CheckReport {
    let mut defects = Vec::with_capacity(samples.len());
    let mut skipped = 0;
    for &pt in samples {
        let value = (|| -> Option<f64> {
            let h0 = model.eval_h(pt).ok()?;
            let mut worst = 0.0f64;
            for t in [0.5, 1.0] {
                let r = flow::flow(model, pt, t).ok()?;
                if !r.stayed_in_chart {
                    return None;
                }
                worst = worst.max((model.eval_h(r.endpoint).ok()? - h0).abs());
            }
            Some(worst)
        })();
        match value {
            Some(d) => defects.push(d),
            None => skipped += 1,
        }
    }
    CheckReport::from_parts("energy_conservation", 1e-8, defects, skipped)
}

/// `|det DPhi - 1|` on the same trajectory set.
pub fn area_preservation_check(model: &TorusModel, samples: &[Point]) -> CheckReport {
    let mut defects = Vec::with_capacity(samples.len());
    let mut skipped = 0;
    for &pt in samples {
        match flow::flow(model, pt, 1.0) {
            Ok(r) if r.stayed_in_chart => defects.push((r.jacobian.det() - 1.0).abs()),
            _ => skipped += 1,
        }
    }
    CheckReport::from_parts("area_preservation", 1e-8, defects, skipped)
}

/// Relative deviation of the numeric saddle return maps from
/// `diag(exp(-a/eps), exp(a/eps))`, plus classification.
pub fn return_map_check(model: &TorusModel) -> CheckReport {
    let lambda = (model.coeff_a() / model.eps()).exp();
    let mut defects = Vec::new();
    let mut skipped = 0;
    let mut notes = Vec::new();
    let search = flow::find_fixed_points(model, model.saddle_points());
    if search.converged.len() != model.saddle_points().len() {
        notes.push(format!(
            "expected {} fixed points from saddle seeds, found {}",
            model.saddle_points().len(),
            search.converged.len()
        ));
    }
    for fp in &search.converged {
        let j = fp.jacobian;
        let d = [
            (j.a - 1.0 / lambda).abs() / (1.0 / lambda),
            (j.d - lambda).abs() / lambda,
            j.b.abs() / lambda,
            j.c.abs() / lambda,
        ]
        .into_iter()
        .fold(0.0, f64::max);
        defects.push(d);
        if fp.classification != LinearClass::PositiveHyperbolic {
            notes.push(format!(
                "fixed point at ({}, {}) classified {:?}",
                fp.location.x, fp.location.y, fp.classification
            ));
        }
    }
    skipped += search.failures.len();
    let mut report = CheckReport::from_parts("saddle_return_maps", 1e-6, defects, skipped);
    let classification_ok = notes.is_empty();
    report.pass = report.pass && classification_ok;
    for n in notes {
        report = report.note(n);
    }
    report
}

/// Full-model fixed point count against the expected `n - 1`.
pub fn fixed_point_count_check(model: &TorusModel) -> CheckReport {
    let expected = (model.n() - 1) as usize;
    let search = flow::find_fixed_points(model, &flow::default_seeds(model));
    let found = search.converged.len();
    let defect = (found as f64 - expected as f64).abs();
    let mut report = CheckReport::from_parts("fixed_point_count", 0.0, vec![defect], 0);
    report.notes.push(format!("found {found}, expected {expected}"));
    report
}

/// Sample counts for the dynamics suite.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SampleSizes {
    pub per_chart: usize,
    pub pullback: usize,
    pub trajectories: usize,
    pub seed: u64,
}

impl Default for SampleSizes {
    fn default() -> Self {
        SampleSizes { per_chart: 1000, pullback: 200, trajectories: 100, seed: 7 }
    }
}

/// The dynamics verification suite: closed-form identities, exactness,
/// pullback invariance, symmetry, flow quality, return maps.
pub fn dynamics_suite(model: &TorusModel, sizes: SampleSizes) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(sizes.seed);
    let r_lo = settled_radius(model);

    // Identity samples: per-chart, closed form, no trajectory needed.
    let mut identity_samples = sample_annulus(&mut rng, model.r_sing(), model.r_star(), sizes.per_chart);
    for k in 0..model.saddle_points().len() {
        let w = model.chart_half_width();
        for _ in 0..sizes.per_chart / model.saddle_points().len().max(1) {
            let x = (rng.gen::<f64>() * 2.0 - 1.0) * w;
            let y = (rng.gen::<f64>() * 2.0 - 1.0) * w;
            identity_samples.push(model.from_saddle_chart(k, Point::new(x, y)));
        }
    }

    let outer_exact = sample_annulus(&mut rng, r_lo, 0.8 * model.r_star(), sizes.trajectories);
    let pullback_samples = sample_beta_domain(model, sizes.seed.wrapping_add(1), sizes.pullback);
    let df_samples = sample_annulus(&mut rng, 1.1 * r_lo, 0.5 * model.r_star(), 20);
    let symmetry_samples = sample_annulus(&mut rng, model.r_sing(), model.r_star(), 50);
    let quality_samples = sample_beta_domain(model, sizes.seed.wrapping_add(2), sizes.trajectories);

    SuiteReport::new(
        "dynamics",
        vec![
            beta_xh_identity_check(model, &identity_samples),
            exactness_at_saddles_check(model),
            exactness_outer_check(model, &outer_exact),
            pullback_invariance_check(model, &pullback_samples),
            exactness_gradient_check(model, &df_samples),
            symmetry_check(model, &symmetry_samples),
            energy_conservation_check(model, &quality_samples),
            area_preservation_check(model, &quality_samples),
            return_map_check(model),
            fixed_point_count_check(model),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dynamics_suite_passes_on_default_model() {
        let model = TorusModel::for_n(3).unwrap();
        let sizes = SampleSizes { per_chart: 60, pullback: 40, trajectories: 20, seed: 7 };
        let report = dynamics_suite(&model, sizes);
        for check in &report.checks {
            assert!(check.pass, "{} failed: max defect {}", check.name, check.max_defect);
        }
        assert!(report.pass);
    }

    #[test]
    fn pullback_holds_on_midway_circle() {
        let model = TorusModel::for_n(2).unwrap();
        let r = 0.5 * (model.r_glue() + model.r_star());
        let samples: Vec<Point> = (0..16)
            .map(|i| Point::from_polar(r, std::f64::consts::TAU * i as f64 / 16.0))
            .collect();
        let report = pullback_invariance_check(&model, &samples);
        assert_eq!(report.skipped, 0);
        assert!(report.pass, "max defect {}", report.max_defect);
    }

    #[test]
    fn pullback_holds_near_saddles() {
        let model = TorusModel::for_n(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut samples = Vec::new();
        for k in 0..model.saddle_points().len() {
            samples.extend(sample_saddle_box(&model, &mut rng, k, 10));
        }
        let report = pullback_invariance_check(&model, &samples);
        assert_eq!(report.skipped, 0);
        assert!(report.pass, "max defect {}", report.max_defect);
    }

    #[test]
    fn gap_crossing_samples_are_skipped_not_failed() {
        let model = TorusModel::for_n(3).unwrap();
        // On the inward prong ray just above r_sing the trajectory enters
        // the smoothing gap.
        let theta = 3.0 * std::f64::consts::PI / (2.0 * model.n() as f64);
        let samples = [Point::from_polar(1.01 * model.r_sing(), theta)];
        let report = pullback_invariance_check(&model, &samples);
        assert_eq!(report.samples, 0);
        assert_eq!(report.skipped, 1);
    }

    #[test]
    fn reports_serialize_to_json() {
        let model = TorusModel::for_n(2).unwrap();
        let report = exactness_at_saddles_check(&model);
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("exactness_at_saddles"));
        assert!(json.contains("tolerance"));
    }
}
