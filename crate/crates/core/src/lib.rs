//! Entropy solutions of convex scalar conservation laws with periodically
//! perturbed Riemann data, and the tools to measure their `1/t` decay.
//!
//! - [`flux`]: convex fluxes, the g-potential and the optimal periodic envelope.
//! - [`profile`]: periodic perturbations, divides and Riemann data.
//! - [`oracle`]: exact Burgers solutions through the Hopf formula.
//! - [`fronttrack`]: front tracking for piecewise linear flux approximations.
//! - [`charax`]: generalized characteristics and the identities built on them.
//! - [`wavelab`]: experiments, rate fits and reports.
//!
//! ```
//! use periodic_shocks::flux::{normalize, ConvexFlux, GPotential};
//!
//! let g = GPotential::new(normalize(&ConvexFlux::burgers(), 0.0).unwrap());
//! assert!((g.z_of(1.0, 4.0).unwrap() - 0.5).abs() < 1e-12);
//! ```

pub mod charax;
pub mod error;
pub mod flux;
pub mod fronttrack;
pub mod oracle;
pub mod profile;
pub mod quad;
pub mod wavelab;
mod roots;

pub use error::{Error, Result};

macro_rules! book_chapter {
    ($name:ident, $file:literal) => {
        #[cfg(doctest)]
        #[doc = include_str!(concat!("../../../book/src/", $file))]
        mod $name {}
    };
}

book_chapter!(book_introduction, "introduction.md");
book_chapter!(book_fluxes, "fluxes.md");
book_chapter!(book_data, "data.md");
book_chapter!(book_oracle, "oracle.md");
book_chapter!(book_front_tracking, "front-tracking.md");
book_chapter!(book_characteristics, "characteristics.md");
book_chapter!(book_experiments, "experiments.md");
