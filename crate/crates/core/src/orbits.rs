//! The catalog of embedded Reeb orbits and their iterates.
//!
//! Each saddle fixed point of the time-1 map corresponds to one embedded
//! closed orbit; all of them are positive hyperbolic with return map
//! `diag(exp(-a/eps), exp(a/eps))`, carry homology class 1, and share the
//! action `2N` coming from the gluing stretch. Conley-Zehnder indices are
//! taken in the product framing fixed by the construction, in which the
//! eigendirections do not rotate, so the saddle orbits have rotation
//! integer 0 (exposed as a parameter since other framings shift it by
//! even integers).

use crate::error::OrbitError;
use crate::flow::{self, LinearClass};
use crate::geom::{Mat2, Point};
use crate::model::TorusModel;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const DEGENERATE_TOL: f64 = 1e-9;

/// Orbit type with its framing data: the rotation number for elliptic
/// orbits, the (even/odd) rotation integer for hyperbolic ones.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrbitType {
    Elliptic { rotation: f64 },
    PositiveHyperbolic { rotation_integer: i64 },
    NegativeHyperbolic { rotation_integer: i64 },
}

impl OrbitType {
    /// Validates the parity constraints: even rotation integer for
    /// positive hyperbolic, odd for negative hyperbolic.
    pub fn validate(&self) -> Result<(), OrbitError> {
        match self {
            OrbitType::PositiveHyperbolic { rotation_integer } if rotation_integer % 2 != 0 => {
                Err(OrbitError::ResonantRotation { phi: *rotation_integer as f64, p: *rotation_integer, q: 1 })
            }
            OrbitType::NegativeHyperbolic { rotation_integer } if rotation_integer % 2 == 0 => {
                Err(OrbitError::ResonantRotation { phi: *rotation_integer as f64, p: *rotation_integer, q: 1 })
            }
            _ => Ok(()),
        }
    }
}

/// An embedded closed Reeb orbit of the construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReebOrbit {
    /// Label in `1..=n-1`, ordered by saddle angle.
    pub label: u32,
    pub orbit_type: OrbitType,
    /// Symplectic action; `2N` for every embedded orbit here.
    pub action: f64,
    /// Image in the first homology of the solid torus; embedded orbits
    /// generate, so this is 1.
    pub homology_class: i64,
    pub return_map: Mat2,
    /// Fixed point of the time-1 map the orbit passes through.
    pub base_point: Point,
}

/// The `s`-fold iterate of an embedded orbit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitIterate {
    pub label: u32,
    pub multiplicity: u32,
    pub action: f64,
    pub homology_class: i64,
    pub cz_index: i64,
    pub is_good: bool,
    pub return_map: Mat2,
}

/// Largest denominator scanned when certifying that an elliptic rotation
/// number is not resonant.
const RESONANCE_MAX_Q: i64 = 1_000_000;
const RESONANCE_TOL: f64 = 1e-12;

/// Reject rotation numbers that are within `1e-12` of a rational with
/// denominator up to `10^6`, scanning continued-fraction convergents.
fn check_irrational(phi: f64) -> Result<(), OrbitError> {
    let mut x = phi;
    let (mut p0, mut q0, mut p1, mut q1): (i64, i64, i64, i64) = (1, 0, x.floor() as i64, 1);
    for _ in 0..64 {
        if (phi - p1 as f64 / q1 as f64).abs() < RESONANCE_TOL {
            return Err(OrbitError::ResonantRotation { phi, p: p1, q: q1 });
        }
        let frac = x - x.floor();
        if frac.abs() < 1e-15 {
            break;
        }
        x = 1.0 / frac;
        let a = x.floor() as i64;
        let p2 = a.saturating_mul(p1).saturating_add(p0);
        let q2 = a.saturating_mul(q1).saturating_add(q0);
        if q2 > RESONANCE_MAX_Q || q2 <= 0 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    Ok(())
}

/// The bare Conley-Zehnder formula for the `k`-th iterate:
/// `2 floor(k phi) + 1` for elliptic orbits, `k r` for hyperbolic ones.
pub fn cz_index_formula(orbit_type: OrbitType, k: u32) -> i64 {
    match orbit_type {
        OrbitType::Elliptic { rotation } => 2 * (k as f64 * rotation).floor() as i64 + 1,
        OrbitType::PositiveHyperbolic { rotation_integer }
        | OrbitType::NegativeHyperbolic { rotation_integer } => k as i64 * rotation_integer,
    }
}

/// Conley-Zehnder index with the nondegeneracy guard: elliptic rotation
/// numbers within `1e-12` of a rational with denominator up to `10^6`
/// are rejected as resonant.
pub fn cz_index(orbit_type: OrbitType, k: u32) -> Result<i64, OrbitError> {
    orbit_type.validate()?;
    if let OrbitType::Elliptic { rotation } = orbit_type {
        check_irrational(rotation)?;
    }
    Ok(cz_index_formula(orbit_type, k))
}

/// An iterate is bad exactly when the parity of its Conley-Zehnder index
/// disagrees with the odd iterates: even multiples of negative
/// hyperbolic orbits.
pub fn is_good(orbit_type: OrbitType, s: u32) -> bool {
    !matches!(orbit_type, OrbitType::NegativeHyperbolic { .. } if s % 2 == 0)
}

/// Build the `s`-fold iterate: return map is the matrix power, action and
/// class scale linearly, and nondegeneracy is certified on the power's
/// eigenvalues.
pub fn iterate(orbit: &ReebOrbit, s: u32) -> Result<OrbitIterate, OrbitError> {
    assert!(s >= 1, "multiplicity must be positive");
    let power = orbit.return_map.pow(s);
    for e in power.eigenvalues() {
        if (e - Complex64::new(1.0, 0.0)).norm() < DEGENERATE_TOL {
            return Err(OrbitError::DegenerateIterate { label: orbit.label, multiplicity: s });
        }
    }
    Ok(OrbitIterate {
        label: orbit.label,
        multiplicity: s,
        action: s as f64 * orbit.action,
        homology_class: s as i64 * orbit.homology_class,
        cz_index: cz_index(orbit.orbit_type, s)?,
        is_good: is_good(orbit.orbit_type, s),
        return_map: power,
    })
}

/// Materialize the orbit catalog from the fixed points of the time-1
/// map. Fails with `OrbitCountMismatch` unless the search finds exactly
/// `n - 1` fixed points, all positive hyperbolic.
pub fn build_orbits(model: &TorusModel) -> Result<Vec<ReebOrbit>, OrbitError> {
    build_orbits_with_rotation(model, 0)
}

/// As [`build_orbits`], with an explicit (even) rotation integer for a
/// non-default framing.
pub fn build_orbits_with_rotation(model: &TorusModel, rotation_integer: i64) -> Result<Vec<ReebOrbit>, OrbitError> {
    let expected = (model.n() - 1) as usize;
    let search = flow::find_fixed_points(model, &flow::default_seeds(model));
    if search.converged.len() != expected {
        return Err(OrbitError::OrbitCountMismatch { found: search.converged.len(), expected });
    }
    let mut orbits = Vec::with_capacity(expected);
    for (i, fp) in search.converged.iter().enumerate() {
        if fp.classification != LinearClass::PositiveHyperbolic {
            return Err(OrbitError::OrbitCountMismatch { found: i, expected });
        }
        let orbit_type = OrbitType::PositiveHyperbolic { rotation_integer };
        orbit_type.validate()?;
        orbits.push(ReebOrbit {
            label: i as u32 + 1,
            orbit_type,
            action: 2.0 * model.stretch(),
            homology_class: 1,
            return_map: fp.jacobian,
            base_point: fp.location,
        });
    }
    Ok(orbits)
}

/// The catalog the construction pins down without running dynamics:
/// `n - 1` positive hyperbolic orbits of class 1 and action `2N` with
/// return maps `diag(exp(-a/eps), exp(a/eps))`. Rank computations use
/// this; the dynamics-derived catalog from [`build_orbits`] is checked
/// against it by the acceptance suite.
pub fn standard_catalog(n: u32, stretch: f64, a_over_eps: f64) -> Vec<ReebOrbit> {
    let lambda = a_over_eps.exp();
    (1..n)
        .map(|label| ReebOrbit {
            label,
            orbit_type: OrbitType::PositiveHyperbolic { rotation_integer: 0 },
            action: 2.0 * stretch,
            homology_class: 1,
            return_map: Mat2::diag(1.0 / lambda, lambda),
            base_point: Point::new(0.0, 0.0),
        })
        .collect()
}

/// Serializable catalog document: orbits plus their iterates up to
/// `s_max`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogDocument {
    pub n: u32,
    #[serde(rename = "N")]
    pub stretch: f64,
    pub orbits: Vec<CatalogEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub label: u32,
    pub orbit_type: OrbitType,
    pub action: f64,
    pub homology_class: i64,
    pub return_map: Mat2,
    pub eigenvalues: [Complex64; 2],
    pub iterates: Vec<OrbitIterate>,
}

pub fn catalog_document(model: &TorusModel, orbits: &[ReebOrbit], s_max: u32) -> Result<CatalogDocument, OrbitError> {
    let mut entries = Vec::with_capacity(orbits.len());
    for orbit in orbits {
        let iterates = (1..=s_max).map(|s| iterate(orbit, s)).collect::<Result<Vec<_>, _>>()?;
        entries.push(CatalogEntry {
            label: orbit.label,
            orbit_type: orbit.orbit_type,
            action: orbit.action,
            homology_class: orbit.homology_class,
            return_map: orbit.return_map,
            eigenvalues: orbit.return_map.eigenvalues(),
            iterates,
        });
    }
    Ok(CatalogDocument { n: model.n(), stretch: model.stretch(), orbits: entries })
}
