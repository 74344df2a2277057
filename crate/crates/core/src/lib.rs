//! Spherical quadratic equations `z₁c₁z₁⁻¹ ⋯ z_m c_m z_m⁻¹ = 1` in the free
//! metabelian group `M_n`.
//!
//! Elements are represented by their flows on the integer grid
//! ([`flows`]); an equation becomes a question about translating the images
//! of the constants in a quotient of the grid so that they cancel
//! ([`quotient`], [`solver`]). The [`packing`] module encodes square tiling
//! instances, and [`oracle`] holds brute-force references for testing.

pub mod error;
pub mod flows;
pub mod lattice;
pub mod oracle;
pub mod packing;
pub mod quotient;
pub mod solver;
mod sparse;
pub mod words;

pub use error::{Error, Result};
pub use flows::{sigma, words_equal, Flow, GridEdge, Point, SigmaImage};
pub use lattice::QuotientSpec;
pub use oracle::{brute_force_solve, ElementBall, WitnessTuple};
pub use packing::{decode_certificate, encode, pack_brute_force, PackingInstance, Placement, PlacementRecord};
pub use quotient::{QuotientChain, QuotientEdge};
pub use solver::{
    solve, solve_conjugacy, verify_certificate, Certificate, SolveOptions, SolverInstance, SphericalEquation,
    Status, Strategy, Verdict, VerdictRecord,
};
pub use words::{GroupWord, Letter};
