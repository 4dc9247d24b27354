//! Sperner-admissible labelings of the simplex-lattice hypergraph and
//! Voronoi-type partitions of the regular simplex.
//!
//! * [`lattice`]: the point set `V(k,q)`, up-cells `E(k,q)`, admissible color
//!   lists and the `k = 3` down-cells.
//! * [`labeling`]: first-choice, max-coordinate and top-coordinate labelings,
//!   cell statistics, the lower bound `C(q+k-3, k-2)` on non-monochromatic
//!   cells with its injection certificate, and rainbow-triangle search.
//! * [`search`]: exhaustive and heuristic search over admissible labelings of
//!   small instances.
//! * [`geometry`]: closed-form measures of the simplex and its Voronoi-type
//!   partitions, and Monte Carlo estimates of separating-set content.

pub mod binom;
pub mod error;
pub mod geometry;
pub mod labeling;
pub mod lattice;
pub mod search;

pub use error::{Error, Result};
