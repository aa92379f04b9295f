//! Composite state and effect cones for finite-dimensional quantum
//! subsystems.
//!
//! Three compositions of local quantum systems are modelled: the minimal one
//! (separable states, block-positive effects), ordinary quantum theory, and
//! the maximal one whose states are the operators positive on product tests
//! (POPT). The crate builds the explicit state families that are pairwise
//! distinguishable under separable parity measurements, checks dimension
//! bounds, decomposes POPT states through positive unital maps, and plays the
//! pairwise-distinguishability communication game.
//!
//! Module map:
//!
//! - [`operator`]: dense Hermitian algebra, partial trace/transpose, Choi maps
//! - [`cones`]: product-state minimization and cone membership
//! - [`catalog`]: Bell/GHZ families, parity measurements, lookup tables
//! - [`distinguish`]: distinguishability reports and dimension checks
//! - [`decomposition`]: POPT states as positive unital maps on a fixed pure state
//! - [`game`]: exact and sampled win probabilities
//! - [`cli`]: the command implementations behind the `poptlab` binary

pub mod catalog;
pub mod cli;
pub mod cones;
pub mod decomposition;
pub mod distinguish;
pub mod error;
pub mod game;
pub mod io;
pub mod operator;
pub mod sampling;

pub use error::{Error, Result};
pub use operator::{ChoiOperator, HermitianOperator, SystemShape, UnitaryOperator};
