//! Special functions, quadrature, root finding and seeded random streams.
//!
//! Everything here is pure given explicit stream/spec inputs and safe to call
//! from any number of workers.

mod gamma;
mod quadrature;
mod roots;
mod stream;

pub use gamma::{gamma_fn, ln_gamma};
pub use quadrature::{integrate_semi_infinite, QuadResult, QuadratureSpec};
pub use roots::{find_root_increasing, minimize_unimodal};
pub use stream::RandomStream;
