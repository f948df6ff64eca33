//! Solvers for all-pay bidding games on graphs.
//!
//! Both players submit sealed bids each round, both pay their bid, and the
//! higher bidder moves the token. Budgets are tracked as the ratio of
//! Player 1's budget to Player 2's, with Player 2's budget rescaled to 1.

pub mod analytic;
pub mod approx;
pub mod budget;
pub mod format;
pub mod generators;
pub mod graph;
pub mod matrix;
pub mod playout;
pub mod ratio;
pub mod sure_win;

pub use budget::{BudgetState, Player, TieRule};
pub use graph::{GameGraph, GraphError, QualitativeView, VertexId};
pub use ratio::Ratio;
