//! Exact analysis of the Conway (m,k)-checkers game on `Z^d`.
//!
//! A board starts with `m` checkers on every cell of the half-space `row <= 0`;
//! a move jumps one checker over `k - 1` occupied cells along an axis, removing
//! one checker from each cell it passes. This crate computes the reachability
//! bounds for that game exactly, builds move traces that realize the
//! constructive lower bounds, certifies upper bounds with pagoda energies, and
//! cross-checks small instances by exhaustive search.
//!
//! Everything is exact: integers are arbitrary precision and every real number
//! that appears lives in `Q(phi_k)`, where `phi_k` is the k-nacci constant.

pub mod algebraic;
pub mod board;
pub mod bounds;
mod error;
pub mod interval;
pub mod oracle;
pub mod pagoda;
pub mod sequences;
pub mod strategies;
pub mod trace;

pub use algebraic::{FieldElement, RootBracket};
pub use board::{Background, BoardState, GameParams, Move, Position, Window};
pub use bounds::BoundsReport;
pub use error::{Error, Result};
pub use trace::{Claim, MoveTrace};
