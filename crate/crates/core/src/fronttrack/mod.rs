//! Wave front tracking for a polygonal approximation of a convex flux.
//!
//! Initial values are snapped to the polygon nodes; every Riemann problem
//! then has an exact solution made of finitely many fronts, and the
//! solution is advanced collision by collision.

mod godunov;
mod polygon;
mod state;
mod tracker;

pub use godunov::godunov_reference;
pub use polygon::{approximate_flux, riemann_fan, FluxPolygon, Front};
pub use state::PiecewiseConstantState;
pub use tracker::{
    evolve, shock_path, snapped_initial_state, snapped_periodic_state, FrontTracker, PathSource, ShockPath,
};

#[cfg(test)]
mod tests;
