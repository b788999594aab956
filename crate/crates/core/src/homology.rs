//! Generator enumeration and rank tables for the three homology theories
//! of the sutured solid torus, with the action-filtration vanishing
//! argument materialized as a checked certificate.
//!
//! * Embedded contact homology: generators in class `h` are the size-`h`
//!   subsets of the `n - 1` embedded orbits (hyperbolic orbits carry
//!   multiplicity 1), so the rank is `C(n-1, h)`.
//! * Cylindrical contact homology: class-`h` generators are the `h`-fold
//!   iterates of each embedded orbit, rank `n - 1` for `h >= 1`.
//! * Contact homology: class-`h` generators are monomials in distinct
//!   iterates `gamma_l^s` with total class `h`; the rank is the `x^h`
//!   coefficient of `prod_s (1 + x^s)^(n-1)`.
//!
//! Ranks are computed by enumeration; the closed forms act as oracles
//! and a mismatch is an error, so a catalog bug surfaces as a rank
//! mismatch rather than a silently wrong table. In every theory all
//! class-`h` generators share the action `2 N h`, which forces the
//! differential to vanish; the certificate records the observed action
//! gap instead of assuming it.

use crate::error::HomologyError;
use crate::orbits::{self, OrbitIterate, ReebOrbit};
use crate::series::{distinct_parts_product, TruncatedSeries};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theory {
    Ech,
    Cyl,
    Ch,
}

impl Theory {
    pub fn as_str(&self) -> &'static str {
        match self {
            Theory::Ech => "ech",
            Theory::Cyl => "cyl",
            Theory::Ch => "ch",
        }
    }
}

/// A finite multiset of embedded orbits with multiplicities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitSet {
    /// `(label, multiplicity)` pairs with distinct labels, sorted.
    pub pairs: Vec<(u32, u32)>,
    pub admissible: bool,
    pub total_action: f64,
    pub total_class: i64,
}

impl OrbitSet {
    /// Assemble from the catalog; admissibility means every hyperbolic
    /// orbit carries multiplicity 1.
    pub fn new(catalog: &[ReebOrbit], pairs: Vec<(u32, u32)>) -> Self {
        let mut total_action = 0.0;
        let mut total_class = 0;
        let mut admissible = true;
        for &(label, mult) in &pairs {
            let orbit = catalog
                .iter()
                .find(|o| o.label == label)
                .expect("orbit label present in catalog");
            total_action += mult as f64 * orbit.action;
            total_class += mult as i64 * orbit.homology_class;
            let hyperbolic = matches!(
                orbit.orbit_type,
                orbits::OrbitType::PositiveHyperbolic { .. } | orbits::OrbitType::NegativeHyperbolic { .. }
            );
            if hyperbolic && mult != 1 {
                admissible = false;
            }
        }
        OrbitSet { pairs, admissible, total_action, total_class }
    }

    pub fn empty() -> Self {
        OrbitSet { pairs: Vec::new(), admissible: true, total_action: 0.0, total_class: 0 }
    }
}

/// All admissible orbit sets of class `h`: the size-`h` subsets of the
/// embedded orbits, each with multiplicity 1. Empty list for `h` above
/// `n - 1` or below 0; the empty set generates class 0.
pub fn ech_generators(catalog: &[ReebOrbit], h: i64) -> Vec<OrbitSet> {
    if h < 0 || h as usize > catalog.len() {
        return Vec::new();
    }
    if h == 0 {
        return vec![OrbitSet::empty()];
    }
    let labels: Vec<u32> = catalog.iter().map(|o| o.label).collect();
    let mut out = Vec::new();
    let mut subset = Vec::with_capacity(h as usize);
    fn rec(labels: &[u32], start: usize, left: usize, subset: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(subset.clone());
            return;
        }
        for i in start..=labels.len().saturating_sub(left) {
            subset.push(labels[i]);
            rec(labels, i + 1, left - 1, subset, out);
            subset.pop();
        }
    }
    let mut subsets = Vec::new();
    rec(&labels, 0, h as usize, &mut subset, &mut subsets);
    for s in subsets {
        out.push(OrbitSet::new(catalog, s.into_iter().map(|l| (l, 1)).collect()));
    }
    out
}

/// Integer rank table per homology class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub theory: Theory,
    pub n: u32,
    pub h_max: i64,
    /// Class -> rank, for 0 <= h <= h_max; classes below 0 have rank 0
    /// in every theory.
    pub entries: BTreeMap<i64, u64>,
}

impl RankTable {
    pub fn rank(&self, h: i64) -> u64 {
        if h < 0 {
            0
        } else {
            self.entries.get(&h).copied().unwrap_or(0)
        }
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    /// CSV projection with header `theory,n,h,rank`. Fields never need
    /// quoting (identifiers and integers only).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theory,n,h,rank\n");
        for (h, rank) in &self.entries {
            let _ = writeln!(out, "{},{},{},{}", self.theory.as_str(), self.n, h, rank);
        }
        out
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// ECH rank table by generator enumeration, with the binomial closed form
/// as oracle.
pub fn ech_rank_table(catalog: &[ReebOrbit], h_max: i64) -> Result<RankTable, HomologyError> {
    let n = catalog.len() as u32 + 1;
    let mut entries = BTreeMap::new();
    for h in 0..=h_max {
        let enumerated = ech_generators(catalog, h).len() as u64;
        let oracle = binomial((n - 1) as u64, h as u64);
        if enumerated != oracle {
            return Err(HomologyError::OracleMismatch {
                theory: "ech".into(),
                n,
                h,
                enumerated: enumerated.to_string(),
                oracle: oracle.to_string(),
            });
        }
        entries.insert(h, enumerated);
    }
    Ok(RankTable { theory: Theory::Ech, n, h_max, entries })
}

/// Certificate that the differential vanishes on a homology class: all
/// generators share the same action, so no holomorphic curve can connect
/// distinct ones, and curves between equal-action sets are unions of
/// trivial cylinders contributing nothing.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VanishingCertificate {
    pub theory: Theory,
    pub class: i64,
    pub generator_actions: Vec<f64>,
    pub max_pairwise_action_gap: f64,
    /// Expected common action `2 N h`.
    pub expected_action: f64,
    pub conclusion: bool,
}

fn certificate(
    theory: Theory,
    class: i64,
    actions: Vec<f64>,
    expected_action: f64,
    tol_action: f64,
) -> Result<VanishingCertificate, HomologyError> {
    let max = actions.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = actions.iter().cloned().fold(f64::INFINITY, f64::min);
    let gap = if actions.is_empty() { 0.0 } else { max - min };
    let conclusion = gap <= tol_action;
    if !conclusion {
        return Err(HomologyError::FiltrationHypothesisViolated { class, gap, tolerance: tol_action });
    }
    Ok(VanishingCertificate {
        theory,
        class,
        generator_actions: actions,
        max_pairwise_action_gap: gap,
        expected_action,
        conclusion,
    })
}

/// The ECH differential of an admissible orbit set is zero; the
/// certificate checks the action-equality hypothesis across the whole
/// class of the input set.
pub fn ech_differential(
    catalog: &[ReebOrbit],
    a: &OrbitSet,
    stretch: f64,
    tol_action: f64,
) -> Result<VanishingCertificate, HomologyError> {
    assert!(a.admissible, "the differential is defined on admissible orbit sets");
    let h = a.total_class;
    let actions: Vec<f64> = ech_generators(catalog, h).iter().map(|g| g.total_action).collect();
    certificate(Theory::Ech, h, actions, 2.0 * stretch * h as f64, tol_action)
}

/// Vanishing certificates for every ECH class up to `h_max`.
pub fn ech_certificates(
    catalog: &[ReebOrbit],
    h_max: i64,
    stretch: f64,
    tol_action: f64,
) -> Result<Vec<VanishingCertificate>, HomologyError> {
    (0..=h_max)
        .map(|h| {
            let actions = ech_generators(catalog, h).iter().map(|g| g.total_action).collect();
            certificate(Theory::Ech, h, actions, 2.0 * stretch * h as f64, tol_action)
        })
        .collect()
}

/// Class-`h` generators of the cylindrical theory: the good `h`-fold
/// iterates, one per embedded orbit.
pub fn cyl_generators(catalog: &[ReebOrbit], h: i64) -> Vec<OrbitIterate> {
    if h < 1 {
        return Vec::new();
    }
    catalog
        .iter()
        .filter_map(|orbit| orbits::iterate(orbit, h as u32).ok())
        .filter(|it| it.is_good)
        .collect()
}

/// Cylindrical rank table by iterate enumeration; rank `n - 1` in every
/// positive class and 0 at `h = 0`.
pub fn cyl_rank_table(catalog: &[ReebOrbit], h_max: i64) -> Result<RankTable, HomologyError> {
    let n = catalog.len() as u32 + 1;
    let mut entries = BTreeMap::new();
    for h in 0..=h_max {
        let enumerated = cyl_generators(catalog, h).len() as u64;
        let oracle = if h >= 1 { (n - 1) as u64 } else { 0 };
        if enumerated != oracle {
            return Err(HomologyError::OracleMismatch {
                theory: "cyl".into(),
                n,
                h,
                enumerated: enumerated.to_string(),
                oracle: oracle.to_string(),
            });
        }
        entries.insert(h, enumerated);
    }
    Ok(RankTable { theory: Theory::Cyl, n, h_max, entries })
}

/// Cylindrical vanishing certificates: all class-`h` iterates have action
/// `2 N h`.
pub fn cyl_certificates(
    catalog: &[ReebOrbit],
    h_max: i64,
    stretch: f64,
    tol_action: f64,
) -> Result<Vec<VanishingCertificate>, HomologyError> {
    (1..=h_max)
        .map(|h| {
            let actions = cyl_generators(catalog, h).iter().map(|it| it.action).collect();
            certificate(Theory::Cyl, h, actions, 2.0 * stretch * h as f64, tol_action)
        })
        .collect()
}

/// A monomial of the contact homology algebra: a set of distinct
/// generators `gamma_l^s`, each used at most once (odd generators square
/// to zero in the supercommutative algebra).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChMonomial {
    /// Distinct `(label, multiplicity)` factors in lexicographic order.
    pub factors: Vec<(u32, u32)>,
    pub total_class: i64,
}

/// All monomials of total class `h` over labels `1..=n-1`: the brute
/// force oracle for the generating-function coefficient. Emitted in
/// lexicographic order of the factor lists.
pub fn ch_monomials(n: u32, h: i64) -> Vec<ChMonomial> {
    if h < 0 {
        return Vec::new();
    }
    if h == 0 {
        return vec![ChMonomial { factors: Vec::new(), total_class: 0 }];
    }
    let mut out = Vec::new();
    let mut factors: Vec<(u32, u32)> = Vec::new();
    // Choose factors in lexicographic (label, multiplicity) order.
    fn rec(
        n: u32,
        remaining: i64,
        min_label: u32,
        min_mult_for_min_label: u32,
        factors: &mut Vec<(u32, u32)>,
        out: &mut Vec<ChMonomial>,
    ) {
        if remaining == 0 {
            out.push(ChMonomial { factors: factors.clone(), total_class: factors.iter().map(|f| f.1 as i64).sum() });
            return;
        }
        for label in min_label..n {
            let start_mult = if label == min_label { min_mult_for_min_label } else { 1 };
            for mult in start_mult..=(remaining as u32) {
                factors.push((label, mult));
                rec(n, remaining - mult as i64, label, mult + 1, factors, out);
                factors.pop();
            }
        }
    }
    rec(n, h, 1, 1, &mut factors, &mut out);
    out
}

/// Contact homology rank table: coefficients of
/// `prod_s (1 + x^s)^(n-1)` by exact series multiplication, cross-checked
/// against the brute-force monomial count.
pub fn ch_rank_table(n: u32, h_max: i64) -> Result<RankTable, HomologyError> {
    let series = ch_series(n, h_max);
    let mut entries = BTreeMap::new();
    for h in 0..=h_max {
        let coeff = series.coeff(h as usize).clone();
        let enumerated = ch_monomials(n, h).len();
        if coeff != BigInt::from(enumerated) {
            return Err(HomologyError::OracleMismatch {
                theory: "ch".into(),
                n,
                h,
                enumerated: enumerated.to_string(),
                oracle: coeff.to_string(),
            });
        }
        let rank: u64 = enumerated as u64;
        entries.insert(h, rank);
    }
    Ok(RankTable { theory: Theory::Ch, n, h_max, entries })
}

/// The generating function `prod_{s=1}^{h_max} (1 + x^s)^(n-1)`.
pub fn ch_series(n: u32, h_max: i64) -> TruncatedSeries {
    distinct_parts_product(n - 1, h_max.max(0) as usize)
}

/// Contact homology vanishing certificates: every class-`h` monomial has
/// total action `2 N h`.
pub fn ch_certificates(
    catalog: &[ReebOrbit],
    h_max: i64,
    stretch: f64,
    tol_action: f64,
) -> Result<Vec<VanishingCertificate>, HomologyError> {
    let n = catalog.len() as u32 + 1;
    (0..=h_max)
        .map(|h| {
            let actions: Vec<f64> = ch_monomials(n, h)
                .iter()
                .map(|m| {
                    m.factors
                        .iter()
                        .map(|&(label, mult)| {
                            let orbit = catalog.iter().find(|o| o.label == label).unwrap();
                            mult as f64 * orbit.action
                        })
                        .sum()
                })
                .collect();
            certificate(Theory::Ch, h, actions, 2.0 * stretch * h as f64, tol_action)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Mat2, Point};
    use crate::orbits::OrbitType;

    /// Synthetic catalog with the construction's structure.
    fn synthetic_catalog(n: u32, stretch: f64) -> Vec<ReebOrbit> {
        (1..n)
            .map(|label| ReebOrbit {
                label,
                orbit_type: OrbitType::PositiveHyperbolic { rotation_integer: 0 },
                action: 2.0 * stretch,
                homology_class: 1,
                return_map: Mat2::diag(0.018, 54.6),
                base_point: Point::new(label as f64, 0.0),
            })
            .collect()
    }

    #[test]
    fn ech_generator_examples() {
        let cat = synthetic_catalog(3, 5.0);
        // n=3, h=1: {gamma_1}, {gamma_2}.
        let gens = ech_generators(&cat, 1);
        assert_eq!(gens.len(), 2);
        assert!(gens.iter().all(|g| g.admissible && g.total_class == 1));
        // n=4, h=0: only the empty set.
        let cat4 = synthetic_catalog(4, 5.0);
        let gens = ech_generators(&cat4, 0);
        assert_eq!(gens.len(), 1);
        assert!(gens[0].pairs.is_empty());
        // n=2, h=3: none.
        let cat2 = synthetic_catalog(2, 5.0);
        assert!(ech_generators(&cat2, 3).is_empty());
    }

    #[test]
    fn ech_rank_examples() {
        let cat = synthetic_catalog(3, 5.0);
        let table = ech_rank_table(&cat, 4).unwrap();
        assert_eq!(table.rank(0), 1);
        assert_eq!(table.rank(1), 2);
        assert_eq!(table.rank(2), 1);
        assert_eq!(table.rank(3), 0);
        assert_eq!(table.total(), 4);
        let cat5 = synthetic_catalog(5, 5.0);
        assert_eq!(ech_rank_table(&cat5, 8).unwrap().total(), 16);
        let cat2 = synthetic_catalog(2, 5.0);
        let t2 = ech_rank_table(&cat2, 1).unwrap();
        assert_eq!((t2.rank(0), t2.rank(1)), (1, 1));
    }

    #[test]
    fn ech_counts_match_binomials_up_to_n8() {
        for n in 2..=8u32 {
            let cat = synthetic_catalog(n, 5.0);
            let table = ech_rank_table(&cat, (n - 1) as i64 + 2).unwrap();
            for h in 0..=(n - 1) as i64 {
                assert_eq!(table.rank(h), binomial((n - 1) as u64, h as u64));
            }
            assert_eq!(table.total(), 1 << (n - 1));
        }
    }

    #[test]
    fn ech_differential_vanishes_with_zero_gap() {
        let cat = synthetic_catalog(5, 5.0);
        let a = OrbitSet::new(&cat, vec![(1, 1), (3, 1)]);
        let cert = ech_differential(&cat, &a, 5.0, 1e-9).unwrap();
        assert!(cert.conclusion);
        assert_eq!(cert.max_pairwise_action_gap, 0.0);
        assert_eq!(cert.class, 2);
        assert_eq!(cert.expected_action, 20.0);
        // The empty set.
        let cert = ech_differential(&cat, &OrbitSet::empty(), 5.0, 1e-9).unwrap();
        assert!(cert.conclusion);
    }

    #[test]
    fn perturbed_actions_violate_the_filtration_hypothesis() {
        let mut cat = synthetic_catalog(4, 5.0);
        cat[1].action += 0.1;
        let a = OrbitSet::new(&cat, vec![(1, 1)]);
        assert!(matches!(
            ech_differential(&cat, &a, 5.0, 1e-9),
            Err(HomologyError::FiltrationHypothesisViolated { .. })
        ));
    }

    #[test]
    fn cyl_rank_examples() {
        let cat4 = synthetic_catalog(4, 5.0);
        let table = cyl_rank_table(&cat4, 8).unwrap();
        assert_eq!(table.rank(7), 3);
        assert_eq!(table.rank(0), 0);
        let cat2 = synthetic_catalog(2, 5.0);
        assert_eq!(cyl_rank_table(&cat2, 2).unwrap().rank(1), 1);
    }

    #[test]
    fn ch_monomial_examples() {
        // n=2, h=3: {(1,3)} and {(1,1),(1,2)}.
        let m = ch_monomials(2, 3);
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].factors, vec![(1, 1), (1, 2)]);
        assert_eq!(m[1].factors, vec![(1, 3)]);
        // n=3, h=2: {(1,2)}, {(2,2)}, {(1,1),(2,1)}.
        let m = ch_monomials(3, 2);
        assert_eq!(m.len(), 3);
        // h=0: the empty monomial.
        assert_eq!(ch_monomials(5, 0).len(), 1);
        assert!(ch_monomials(5, -2).is_empty());
    }

    #[test]
    fn ch_rank_examples() {
        for n in 2..=5u32 {
            let t = ch_rank_table(n, 3).unwrap();
            assert_eq!(t.rank(1), (n - 1) as u64);
        }
        assert_eq!(ch_rank_table(2, 6).unwrap().rank(6), 4);
        assert_eq!(ch_rank_table(3, 3).unwrap().rank(3), 6);
    }

    #[test]
    fn ch_certificates_have_zero_gap() {
        let cat = synthetic_catalog(3, 5.0);
        let certs = ch_certificates(&cat, 6, 5.0, 1e-9).unwrap();
        for cert in certs {
            assert!(cert.conclusion);
            assert!(cert.max_pairwise_action_gap <= 1e-12);
        }
    }

    #[test]
    fn csv_projection_shape() {
        let cat = synthetic_catalog(3, 5.0);
        let table = ech_rank_table(&cat, 2).unwrap();
        let csv = table.to_csv();
        assert!(csv.starts_with("theory,n,h,rank\n"));
        assert!(csv.contains("ech,3,1,2"));
    }
}
