//! Toric configurations and their fibers.
//!
//! The crate covers the computational side of working with a configuration
//! `A` (an integer matrix whose columns lie on a common affine hyperplane):
//!
//! * [`lattice`]: exact integer matrices, gradings, moves, the conformal
//!   order and higher Lawrence liftings.
//! * [`fiber`]: enumeration of fibers `{x >= 0 : Ax = b}`, the fiber
//!   configuration `A_b` and the correspondence between fibers of `A_b` and
//!   fibers of Lawrence liftings.
//! * [`graver`]: Graver bases by completion, Graver complexity and
//!   indispensability of single moves.
//! * [`toric`]: generating sets of toric ideals by Buchberger saturation.
//! * [`markov`]: Markov-basis checks, Markov degree, minimal Markov bases,
//!   per-`N` Markov complexity and indispensability certificates for lifted
//!   moves.
//! * [`graphs`]: incidence configurations of complete and complete
//!   bipartite graphs.
//! * [`transport`]: the swap-operation machinery connecting multisets of
//!   transportation tables by moves of degree at most three.
//! * [`lowerbound`]: explicit indispensable lifted moves for complete
//!   bipartite graphs.

pub mod error;
pub mod fiber;
pub mod graphs;
pub mod graver;
pub mod lattice;
pub mod lowerbound;
pub mod markov;
pub mod toric;
pub mod transport;

pub use error::{Error, Result};
pub use lattice::{Configuration, IntMatrix, LiftedMove, Move};
