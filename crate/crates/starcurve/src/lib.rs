//! Computational toolkit for the modular curves `X_0(N)` and their star
//! quotients `X_0(N)* = X_0(N) / W(N)`, where `W(N)` is the full group of
//! Atkin-Lehner involutions.
//!
//! The crate covers, with exact integer arithmetic throughout:
//!
//! - [`arith`]: factorization, Hall divisors, Kronecker symbols and the
//!   square-below divisor relation.
//! - [`quadforms`]: binary quadratic forms, Gauss composition and form class
//!   groups.
//! - [`quadorders`]: imaginary quadratic orders and admissible ideals.
//! - [`cusps`]: cusp representatives, widths, Galois orbits, the
//!   Atkin-Lehner action on cusps and rational cusps of the star quotient.
//! - [`cyclo_integrality`]: exact cyclotomic arithmetic and the integrality
//!   factors `m_{N,M}` attached to admissible divisors.
//! - [`genus`]: genus of `X_0(N)` and of `X_0(N)*` via Riemann-Hurwitz and
//!   Atkin-Lehner fixed-point counts.
//! - [`exceptional`]: the exceptional prime/pair/triple tables, the
//!   exceptional-level predicate and the minimal exceptional family.
//! - [`heegner`]: Heegner points, the Atkin-Lehner and Galois actions on
//!   them, and rationality on the star quotient.
//! - [`volcano`]: isogeny-volcano profiles and certification of unique
//!   cyclic isogenies lifting CM points.
//! - [`analytic`]: Kloosterman sums, Bessel `J_1`, and the rigorous
//!   nonvanishing error bounds with their per-prime thresholds.
//! - [`catalog`]: bundled (and optionally remote) Atkin-Lehner sign data
//!   for rank-zero quotients.
//! - [`report`]: per-level reports reproducing the reference tables, with
//!   golden-data comparison.

pub mod analytic;
pub mod arith;
pub mod catalog;
pub mod cusps;
pub mod cyclo_integrality;
pub mod exceptional;
pub mod genus;
pub mod heegner;
pub mod quadforms;
pub mod quadorders;
pub mod report;
pub mod volcano;

use std::path::PathBuf;

/// Locate the bundled data directory.
///
/// Honors `STARCURVE_DATA_DIR` when set; otherwise falls back to the
/// workspace `data/` directory relative to this crate, then to `./data`.
pub fn default_data_dir() -> PathBuf {
    if let Ok(dir) = std::env::var("STARCURVE_DATA_DIR") {
        return PathBuf::from(dir);
    }
    let workspace = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data");
    if workspace.is_dir() {
        return workspace;
    }
    PathBuf::from("data")
}
