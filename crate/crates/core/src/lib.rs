//! Construction and certification of a sutured contact solid torus with
//! `2n` longitudinal sutures, together with exact rank tables for its
//! embedded contact homology, cylindrical contact homology and contact
//! homology.
//!
//! The construction lives on a disk carrying a prong Hamiltonian
//! `mu r^2 cos(n theta)` smoothed near the origin into `n - 1`
//! nondegenerate saddles. The time-1 Hamiltonian flow is the gluing map;
//! its fixed points become the embedded Reeb orbits of the glued torus.
//! Everything quantitative the homology computation needs (orbit count,
//! hyperbolicity, return maps, equal actions, suture count) is certified
//! numerically from the pre-glued data:
//!
//! * [`model`] - chart decomposition and the closed-form fields;
//! * [`flow`] - Hamiltonian vector fields, adaptive flows with
//!   linearization, fixed points;
//! * [`verify`] - sampled certification of the exactness identities;
//! * [`contact`] - the interpolated contact form, its Reeb field and the
//!   contact condition;
//! * [`gluing`] - the arc families, regions and the suture count;
//! * [`orbits`] - the orbit catalog, iterates and Conley-Zehnder indices;
//! * [`homology`] / [`series`] - generator enumeration, vanishing
//!   certificates and exact rank tables;
//! * [`plot`] - deterministic SVG figures.

pub mod contact;
pub mod error;
pub mod flow;
pub mod geom;
pub mod gluing;
pub mod homology;
pub mod model;
pub mod orbits;
pub mod plot;
pub mod series;
pub mod verify;

pub use geom::{Mat2, OneForm, Point};
pub use model::{Region, Tolerances, TorusModel, TorusParams};
