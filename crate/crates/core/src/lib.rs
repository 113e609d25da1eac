//! The Sierpinski gasket as initial algebra and final coalgebra of the
//! functor `M⊗-` on tripointed metric spaces.
//!
//! - [`address`]: finite addresses, gluings and canonical forms (the initial algebra `G`).
//! - [`metric`]: the exact quotient metric on addresses and a shortest-path oracle.
//! - [`space`]: tripointed spaces, the functor on objects and maps, regularity checks.
//! - [`completion`]: lazy address streams, the completion `S` and its structure map.
//! - [`universal`]: initiality recursion, finality corecursion, built-in coalgebras.
//! - [`euclid`]: the gasket in the plane, rendering and distortion sampling.
//! - [`props`]: seeded property suites with JSON reports.

pub mod address;
pub mod completion;
pub mod dyadic;
pub mod error;
pub mod euclid;
pub mod metric;
pub mod props;
pub mod space;
pub mod universal;

pub use address::{Address, Corner, Letter};
pub use dyadic::Dyadic;
pub use error::{Error, Result};
