//! Computational toolkit for nilconformal harmonic maps from surfaces
//! into the exceptional symmetric space G₂/SO(4).
//!
//! The crate provides, bottom up:
//!
//! - exact octonion / ℂ⁷ cross-product algebra with the G₂ weight basis
//!   and the pointwise subspace predicates ([`algebra`], [`vec7`]);
//! - truncated Taylor ("jet") arithmetic in z and z̄ ([`jet`]);
//! - subbundles of the trivial ℂ⁷ bundle at jet level: projections,
//!   second fundamental forms, the derivative endomorphism A_z, Gauss
//!   transforms, harmonicity and nilconformality tests ([`bundles`]);
//! - the three twistor-lift constructions and flag predicates
//!   ([`twistor`]);
//! - almost complex maps into S⁶ and the constructions that turn them
//!   into harmonic maps into G₂/SO(4) ([`s6`]);
//! - polynomial extended solutions, uniton factors and the Grassmannian
//!   model for finite-uniton-number maps ([`loops`]);
//! - verification suites and machine-readable reports ([`verify`]).
//!
//! Everything is generic over a [`scalar::Scalar`] backend: exact
//! Gaussian rationals for identities that must hold on the nose, and
//! complex doubles for the transcendental examples.

pub mod algebra;
pub mod cli;
pub mod bundles;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod jet;
pub mod linalg;
pub mod loops;
pub mod octonion;
pub mod s6;
pub mod scalar;
pub mod twistor;
pub mod vec7;
pub mod verify;

pub use error::{G2Error, Result};
