//! Parity games solved through separating automata.

pub mod automata;
pub mod cli;
pub mod error;
pub mod game;
pub mod generate;
pub mod lowerbound;
pub mod pgsolver;
pub mod scc;
pub mod solvers;
pub mod trees;

pub use error::{Error, Limits, Result};
pub use game::{Edge, GameGraph, Lasso, ParityGame, Player, Priority};
