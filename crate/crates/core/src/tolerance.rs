//! Numerical tolerances used across the crate.
//!
//! All values are absolute and apply to max-abs entry residuals or operator
//! norms of differences, in double precision.

/// Exact algebraic identities on small tensors (axioms, structure relation,
/// homomorphism checks).
pub const IDENTITY: f64 = 1e-12;

/// Round trips that pass through a least-squares solve.
pub const ROUND_TRIP: f64 = 1e-10;

/// Exact error expansion of the walk step and the iterate compatibility
/// identity.
pub const EXPANSION: f64 = 1e-11;

/// Unitarity / isometry of the walk operators.
pub const UNITARY: f64 = 1e-13;

/// Minimum eigenvalue floor for Choi-type positivity checks.
pub const POSITIVITY: f64 = 1e-10;

/// Relative tolerance for step-function breakpoints falling on grid points.
pub const GRID_ALIGNMENT: f64 = 1e-9;

/// Default cap on (d+1)^n for explicitly materialised tensor powers.
pub const DIMENSION_CAP: usize = 4096;

/// Configurable tolerance set, defaulting to the constants above.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub identity: f64,
    pub round_trip: f64,
    pub expansion: f64,
    pub unitary: f64,
    pub positivity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: IDENTITY,
            round_trip: ROUND_TRIP,
            expansion: EXPANSION,
            unitary: UNITARY,
            positivity: POSITIVITY,
        }
    }
}
