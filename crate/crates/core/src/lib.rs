//! Exact kernel for Hecke transforms of bundles across the exceptional
//! divisor of the blow-up of ℂ² at the origin.
//!
//! * [`exact_algebra`]: ℚ(i) scalars and jet-Laurent matrices.
//! * [`p1_bundle`]: bundles on ℙ¹, Birkhoff factorization, the `h⁰` oracle.
//! * [`blowup_bundle`]: restriction, Hecke transform, twisting, the optimizer.
//! * [`hn_profile`]: slope/rank ledgers and the partial HN construction.
//! * [`document`]: the versioned JSON formats.
//! * [`suites`]: seeded random generators and property suites.

pub mod blowup_bundle;
pub mod document;
pub mod error;
pub mod exact_algebra;
pub mod hn_profile;
pub mod p1_bundle;
pub mod suites;

pub use blowup_bundle::{BlowupBundle, HeckeStep, HeckeTrace, OptimizeError, Schedule};
pub use error::{Error, Result};
pub use exact_algebra::{JetLaurentMatrix, JetLaurentPoly, Rational, Scalar};
pub use hn_profile::{Block, HNProfile, PartialHN};
pub use p1_bundle::{BirkhoffFactorization, P1Transition, SplittingType};
