//! Rotation numbers and Arnold tongues of the circle-flow family
//!
//! ```text
//! dx/dt = (γ cos x + a + b g(t)) / μ
//! ```
//!
//! With `γ = 1` and `g = cos` this is the Josephson equation. Its Poincaré
//! map is conjugate (via `u = tan(x/2)`) to a Möbius transformation, which
//! lets us compute rotation numbers exactly from a 2×2 monodromy matrix and
//! trace the boundaries `a₀,ₖ(b)`, `a_π,ₖ(b)` of every phase-lock tongue.
//!
//! - [`equation`]: parameters, right-hand side, lifted integration.
//! - [`moebius`]: monodromy matrix, lifted action, trace classification.
//! - [`rotation`]: rotation numbers (Möbius and iterated routes).
//! - [`tongue`]: boundary curves and adjacency points.
//! - [`bessel`]: `J_k`, generalized `J̃_k`, large-argument asymptotics.
//! - [`verify`]: residuals of the asymptotic boundary estimates.
//! - [`scan`], [`svg`]: parameter-plane scans and their rendering.

pub mod bessel;
pub mod equation;
pub mod error;
pub mod forcing;
pub mod integrator;
pub mod moebius;
pub mod quadrature;
pub mod roots;
pub mod rotation;
pub mod scan;
pub mod stats;
pub mod svg;
pub mod tongue;
pub mod verify;

pub use equation::{autonomous_rho, integrate_flow, rhs_eval, Params, SolutionArc};
pub use error::{Error, Result};
pub use forcing::ForcingProfile;
pub use integrator::IntegratorConfig;
pub use moebius::{apply_lifted, classify, fixed_points, monodromy, MapClass, MoebiusMap};
pub use rotation::{rotation_number, rotation_number_iterated, RotationNumber};
pub use tongue::{boundary_at, find_adjacencies, trace_boundary, AdjacencyPoint, BoundaryPoint};

/// Format with 17 significant digits (round-trips every `f64`).
pub fn fmt17(x: f64) -> String {
    format!("{:.16e}", x)
}
