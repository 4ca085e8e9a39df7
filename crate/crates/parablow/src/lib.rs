//! Exact-arithmetic toolkit for deciding stability of parabolic ruled
//! surfaces.
//!
//! The crate builds the iterated blowup of a ruled surface along marked
//! fibers, tracks the exceptional chains with their C*-weight systems in the
//! intersection lattice, assembles rational Kähler classes, and evaluates
//! Futaki invariants exactly.  When a section of non-positive parabolic slope
//! is found, [`futaki::destabilize`] searches a deterministic schedule of
//! Kähler classes for a certificate with negative Donaldson–Futaki value.
//!
//! All geometric quantities are exact rationals ([`rational::Rat`]); floats
//! only ever appear in rendered report columns.

pub mod blowup;
pub mod cli;
pub mod config;
pub mod fractions;
pub mod futaki;
pub mod lattice;
pub mod rational;
pub mod report;
pub mod scan;
pub mod surface;

pub use blowup::{build_chain, cremona, cremona_to_splus, FiberChain};
pub use fractions::{dual_expand, hj_eval, hj_expand, HJExpansion, Weight};
pub use futaki::{destabilize, futaki, futaki_futs2, futaki_limit, Futs2Family};
pub use lattice::{kahler_from_areas, SurfaceLattice};
pub use rational::Rat;
pub use surface::{classify_stability, par_slope, ParabolicSurface, Side, StabilityVerdict};
