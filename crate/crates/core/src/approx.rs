//! Discretized values of DAG games over an `ε`-grid of budget ratios.
//!
//! For every vertex and grid budget `B1 = k·ε` the first bidding is a finite
//! matrix game over grid bids, solved by LP. Two tables are built:
//!
//! * the pessimistic (lower) table gives ties to Player 2 and rounds Player 1's
//!   renormalized budget down, so every approximation hurts Player 1;
//! * the optimistic (upper) table gives ties to Player 1 and rounds up.
//!
//! Above the surely-winning threshold of the top reachable leaf the value is
//! that leaf's weight.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::budget::Player;
use crate::graph::{GameGraph, QualitativeView, VertexId};
use crate::matrix::{solve_matrix_game, MatrixGame};
use crate::ratio::{ceil_int, floor_int, rational_to_f64, Ratio};
use crate::sure_win::thresholds_dag;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ApproxError {
    #[error("value tables need a DAG")]
    Cyclic,
    #[error("grid step must be 1/K for an integer K >= 2")]
    BadEpsilon,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vertex `{0}` is a leaf")]
    Leaf(String),
    #[error("budget must be nonnegative")]
    NegativeBudget,
    #[error("budget {0} is not on the grid")]
    OffGrid(String),
    #[error("budget {budget} exceeds the surely-winning threshold {threshold}")]
    AboveThreshold { budget: String, threshold: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Lower,
    Upper,
}

/// Where a cell of the first-bidding matrix leads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Next {
    /// Grid index of Player 1's renormalized budget.
    Index(usize),
    /// Player 2 is broke and Player 1 is not: Player 1 wins every later bidding.
    Unbounded,
}

/// Outcome of Player 1 bidding `i·ε` and Player 2 bidding `j·ε` at budget `k·ε`.
pub fn transition(bound: Bound, grid: usize, k: usize, i: usize, j: usize) -> (Player, Next) {
    debug_assert!(i <= k && j <= grid);
    let winner = match bound {
        Bound::Lower if i > j => Player::One,
        Bound::Lower => Player::Two,
        Bound::Upper if i >= j => Player::One,
        Bound::Upper => Player::Two,
    };
    let left = k - i;
    let next = if j == grid {
        if left > 0 {
            Next::Unbounded
        } else {
            Next::Index(0)
        }
    } else {
        let num = left * grid;
        let den = grid - j;
        Next::Index(match bound {
            Bound::Lower => num / den,
            Bound::Upper => num.div_ceil(den),
        })
    };
    (winner, next)
}

/// A mixed first-bid strategy: bids with the vertex to move to on winning.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedBidStrategy {
    pub support: Vec<(BigRational, VertexId)>,
    pub probabilities: Vec<f64>,
}

impl MixedBidStrategy {
    pub fn pure(bid: BigRational, successor: VertexId) -> Self {
        MixedBidStrategy {
            support: vec![(bid, successor)],
            probabilities: vec![1.0],
        }
    }
}

#[derive(Debug, Clone)]
pub struct VertexRow {
    /// Largest leaf weight reachable from the vertex.
    pub cap: BigRational,
    /// Surely-winning threshold for reaching `cap`; zero on leaves.
    pub threshold: BigRational,
    /// `⌈threshold·K⌉`; grid indices above it have value `cap`.
    pub kmax: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Row strategy of the lower table at each grid index.
    pub strategies: Vec<MixedBidStrategy>,
    /// Column strategy of the lower table (probability per grid bid `j·ε`).
    pub opponent: Vec<Vec<f64>>,
    cap_f: f64,
}

impl VertexRow {
    pub fn value(&self, bound: Bound, k: usize) -> f64 {
        if k > self.kmax {
            return self.cap_f;
        }
        match bound {
            Bound::Lower => self.lower[k],
            Bound::Upper => self.upper[k],
        }
    }

    pub fn cap_f64(&self) -> f64 {
        self.cap_f
    }
}

#[derive(Debug, Clone)]
pub struct ValueTable {
    /// `K` with `ε = 1/K`.
    pub grid: usize,
    /// `d(G)`, the longest path.
    pub depth: usize,
    /// Largest certificate gap among all solved cells.
    pub max_certificate_gap: f64,
    rows: Vec<VertexRow>,
}

impl ValueTable {
    pub fn epsilon(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.grid))
    }

    pub fn row(&self, v: VertexId) -> &VertexRow {
        &self.rows[v]
    }

    pub fn value(&self, bound: Bound, v: VertexId, k: usize) -> f64 {
        self.rows[v].value(bound, k)
    }
}

/// Parses `1/K` style grid steps; returns `K`.
pub fn grid_of(epsilon: &BigRational) -> Result<usize, ApproxError> {
    if !epsilon.is_positive() || !epsilon.numer().is_one() {
        return Err(ApproxError::BadEpsilon);
    }
    let k = epsilon.denom().to_usize().ok_or(ApproxError::BadEpsilon)?;
    if k < 2 {
        return Err(ApproxError::BadEpsilon);
    }
    Ok(k)
}

/// Certificate tolerance for each cell's LP.
pub const CELL_TOL: f64 = 1e-9;

pub fn approx_values(g: &GameGraph, epsilon: &BigRational) -> Result<ValueTable, ApproxError> {
    let grid = grid_of(epsilon)?;
    let order = g.reverse_topological_order().ok_or(ApproxError::Cyclic)?;
    let caps = g.max_reachable_weight();
    let thresholds = thresholds_at_caps(g, &caps)?;

    let mut rows: Vec<Option<VertexRow>> = vec![None; g.len()];
    let mut max_gap = 0.0f64;
    for &v in order {
        let cap = caps[v].clone();
        let cap_f = rational_to_f64(&cap);
        if g.is_leaf(v) {
            rows[v] = Some(VertexRow {
                cap,
                threshold: BigRational::zero(),
                kmax: 0,
                lower: vec![cap_f],
                upper: vec![cap_f],
                strategies: Vec::new(),
                opponent: Vec::new(),
                cap_f,
            });
            continue;
        }
        let threshold = thresholds[v].clone();
        let kmax = ceil_int(&(&threshold * BigRational::from_integer(grid.into())))
            .to_usize()
            .expect("threshold fits the grid");
        let succ = g.successors(v);
        let succ_rows: Vec<&VertexRow> = succ
            .iter()
            .map(|&u| rows[u].as_ref().expect("successors come first"))
            .collect();
        let cells: Vec<Cell> = (0..=kmax)
            .into_par_iter()
            .map(|k| solve_cell(grid, k, succ, &succ_rows))
            .collect();
        let mut row = VertexRow {
            cap,
            threshold,
            kmax,
            lower: Vec::with_capacity(kmax + 1),
            upper: Vec::with_capacity(kmax + 1),
            strategies: Vec::with_capacity(kmax + 1),
            opponent: Vec::with_capacity(kmax + 1),
            cap_f,
        };
        for c in cells {
            max_gap = max_gap.max(c.gap);
            row.lower.push(c.lower);
            row.upper.push(c.upper);
            row.strategies.push(c.strategy);
            row.opponent.push(c.opponent);
        }
        rows[v] = Some(row);
    }
    Ok(ValueTable {
        grid,
        depth: g.longest_path().expect("DAG"),
        max_certificate_gap: max_gap,
        rows: rows.into_iter().map(|r| r.expect("all vertices visited")).collect(),
    })
}

/// Surely-winning threshold of every vertex for reaching its own cap.
fn thresholds_at_caps(g: &GameGraph, caps: &[BigRational]) -> Result<Vec<BigRational>, ApproxError> {
    let mut cuts: Vec<&BigRational> = caps.iter().collect();
    cuts.sort();
    cuts.dedup();
    let mut out = vec![BigRational::zero(); g.len()];
    for cut in cuts {
        let q = QualitativeView::new(g, cut.clone()).expect("cap is a leaf weight");
        let t = thresholds_dag(&q).map_err(|_| ApproxError::Cyclic)?;
        for v in g.vertices() {
            if &caps[v] == cut && !g.is_leaf(v) {
                out[v] = match &t.values[v] {
                    Ratio::Finite(x) => x.clone(),
                    Ratio::Infinity => unreachable!("the cap leaf is reachable"),
                };
            }
        }
    }
    Ok(out)
}

struct Cell {
    lower: f64,
    upper: f64,
    strategy: MixedBidStrategy,
    opponent: Vec<f64>,
    gap: f64,
}

fn successor_value(row: &VertexRow, bound: Bound, next: Next) -> f64 {
    match next {
        Next::Index(k) => row.value(bound, k),
        Next::Unbounded => row.cap_f,
    }
}

/// Payoff of a cell: the winner picks the successor.
fn cell_payoff(winner: Player, bound: Bound, next: Next, succ_rows: &[&VertexRow]) -> f64 {
    let values = succ_rows.iter().map(|r| successor_value(r, bound, next));
    match winner {
        Player::One => values.fold(f64::NEG_INFINITY, f64::max),
        Player::Two => values.fold(f64::INFINITY, f64::min),
    }
}

fn payoff_matrix(bound: Bound, grid: usize, k: usize, succ_rows: &[&VertexRow]) -> MatrixGame<f64> {
    let mut pay = Vec::with_capacity((k + 1) * (grid + 1));
    for i in 0..=k {
        for j in 0..=grid {
            let (winner, next) = transition(bound, grid, k, i, j);
            pay.push(cell_payoff(winner, bound, next, succ_rows));
        }
    }
    MatrixGame::new(k + 1, grid + 1, pay).expect("nonempty")
}

fn solve_cell(grid: usize, k: usize, succ: &[VertexId], succ_rows: &[&VertexRow]) -> Cell {
    let lo_game = payoff_matrix(Bound::Lower, grid, k, succ_rows);
    let lo = solve_matrix_game(&lo_game, CELL_TOL);
    let hi_game = payoff_matrix(Bound::Upper, grid, k, succ_rows);
    let hi = solve_matrix_game(&hi_game, CELL_TOL);

    let mut support = Vec::new();
    let mut probabilities = Vec::new();
    for (i, &p) in lo.row_strategy.iter().enumerate() {
        if p <= 1e-12 {
            continue;
        }
        let u = best_successor(grid, k, i, &lo.col_strategy, succ, succ_rows);
        support.push((BigRational::new(BigInt::from(i), BigInt::from(grid)), u));
        probabilities.push(p);
    }
    let total: f64 = probabilities.iter().sum();
    for p in probabilities.iter_mut() {
        *p /= total;
    }
    Cell {
        lower: lo.value,
        upper: hi.value,
        strategy: MixedBidStrategy {
            support,
            probabilities,
        },
        opponent: lo.col_strategy,
        gap: lo.certificate_gap.max(hi.certificate_gap),
    }
}

/// The successor to commit to for bid `i`: best expected continuation against
/// the opponent's LP strategy over the bids Player 1 wins.
fn best_successor(
    grid: usize,
    k: usize,
    i: usize,
    opponent: &[f64],
    succ: &[VertexId],
    succ_rows: &[&VertexRow],
) -> VertexId {
    let score = |r: &VertexRow| -> (f64, f64) {
        let mut weighted = 0.0;
        let mut plain = 0.0;
        for (j, &q) in opponent.iter().enumerate() {
            let (winner, next) = transition(Bound::Lower, grid, k, i, j);
            if winner == Player::One {
                let v = successor_value(r, Bound::Lower, next);
                weighted += q * v;
                plain += v;
            }
        }
        (weighted, plain)
    };
    let mut best = 0;
    let mut best_score = score(succ_rows[0]);
    for (idx, r) in succ_rows.iter().enumerate().skip(1) {
        let s = score(r);
        if s.0 > best_score.0 + 1e-12 || ((s.0 - best_score.0).abs() <= 1e-12 && s.1 > best_score.1) {
            best = idx;
            best_score = s;
        }
    }
    succ[best]
}

fn lookup(t: &ValueTable, g: &GameGraph, v: &str) -> Result<VertexId, ApproxError> {
    let id = g.id(v).ok_or_else(|| ApproxError::UnknownVertex(v.to_string()))?;
    if id >= t.rows.len() {
        return Err(ApproxError::UnknownVertex(v.to_string()));
    }
    Ok(id)
}

/// `(lower, upper)` bounds on the value at an arbitrary budget ratio.
///
/// The lower bound reads the pessimistic table at `⌊B1·K⌋`; the upper bound
/// reads the optimistic table at `⌈B1·K⌉ + d(G)`, capped at the top reachable
/// weight.
pub fn value_bracket(
    t: &ValueTable,
    g: &GameGraph,
    v: &str,
    budget: &BigRational,
) -> Result<(f64, f64), ApproxError> {
    let id = lookup(t, g, v)?;
    value_bracket_at(t, id, budget)
}

pub fn value_bracket_at(
    t: &ValueTable,
    v: VertexId,
    budget: &BigRational,
) -> Result<(f64, f64), ApproxError> {
    if budget.is_negative() {
        return Err(ApproxError::NegativeBudget);
    }
    let scaled = budget * BigRational::from_integer(t.grid.into());
    let row = &t.rows[v];
    let lo_k = floor_int(&scaled).to_usize().unwrap_or(usize::MAX);
    let hi_k = ceil_int(&scaled)
        .to_usize()
        .unwrap_or(usize::MAX)
        .saturating_add(t.depth);
    let lower = row.value(Bound::Lower, lo_k);
    let upper = row.value(Bound::Upper, hi_k).min(row.cap_f);
    Ok((lower, upper))
}

/// The pessimistic table's optimal first-bid strategy at a grid budget.
pub fn strategy_at(
    t: &ValueTable,
    g: &GameGraph,
    v: &str,
    budget: &BigRational,
) -> Result<MixedBidStrategy, ApproxError> {
    let id = lookup(t, g, v)?;
    if g.is_leaf(id) {
        return Err(ApproxError::Leaf(v.to_string()));
    }
    strategy_at_id(t, id, budget).cloned()
}

pub fn strategy_at_id<'a>(
    t: &'a ValueTable,
    v: VertexId,
    budget: &BigRational,
) -> Result<&'a MixedBidStrategy, ApproxError> {
    if budget.is_negative() {
        return Err(ApproxError::NegativeBudget);
    }
    let scaled = budget * BigRational::from_integer(t.grid.into());
    if !scaled.is_integer() {
        return Err(ApproxError::OffGrid(crate::ratio::format_rational(budget)));
    }
    let row = &t.rows[v];
    if budget > &row.threshold {
        return Err(ApproxError::AboveThreshold {
            budget: crate::ratio::format_rational(budget),
            threshold: crate::ratio::format_rational(&row.threshold),
        });
    }
    let k = scaled.to_integer().to_usize().expect("bounded by threshold");
    row.strategies.get(k).ok_or(ApproxError::Leaf(String::new()))
}

/// Grid index of an on-grid budget, rounded down otherwise.
pub fn grid_index(t: &ValueTable, budget: &BigRational) -> usize {
    let scaled = budget * BigRational::from_integer(t.grid.into());
    floor_int(&scaled).to_usize().unwrap_or(usize::MAX)
}

/// Exact security level of a stored lower-table strategy: its worst expected
/// payoff over Player 2's grid bids, with continuation values from the
/// pessimistic table.
pub fn strategy_security(t: &ValueTable, g: &GameGraph, v: VertexId, k: usize) -> f64 {
    let row = &t.rows[v];
    let s = &row.strategies[k];
    let succ = g.successors(v);
    (0..=t.grid)
        .map(|j| {
            s.support
                .iter()
                .zip(&s.probabilities)
                .map(|((bid, u), &p)| {
                    let i = (bid * BigRational::from_integer(t.grid.into()))
                        .to_integer()
                        .to_usize()
                        .expect("grid bid");
                    let (winner, next) = transition(Bound::Lower, t.grid, k, i, j);
                    let value = match winner {
                        Player::One => successor_value(&t.rows[*u], Bound::Lower, next),
                        Player::Two => succ
                            .iter()
                            .map(|&w| successor_value(&t.rows[w], Bound::Lower, next))
                            .fold(f64::INFINITY, f64::min),
                    };
                    p * value
                })
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{race_game, win_n_in_a_row};
    use crate::ratio::rat;

    #[test]
    fn transitions_break_ties_by_table() {
        assert_eq!(transition(Bound::Lower, 10, 5, 3, 3).0, Player::Two);
        assert_eq!(transition(Bound::Upper, 10, 5, 3, 3).0, Player::One);
        // (5 - 3)/(10 - 3) of budget, scaled by 10: 20/7.
        assert_eq!(transition(Bound::Lower, 10, 5, 3, 3).1, Next::Index(2));
        assert_eq!(transition(Bound::Upper, 10, 5, 3, 3).1, Next::Index(3));
        assert_eq!(transition(Bound::Lower, 10, 5, 3, 10).1, Next::Unbounded);
        assert_eq!(transition(Bound::Lower, 10, 5, 5, 10).1, Next::Index(0));
    }

    #[test]
    fn rejects_bad_grids() {
        let g = win_n_in_a_row(2).unwrap();
        assert_eq!(approx_values(&g, &rat(3, 100)).unwrap_err(), ApproxError::BadEpsilon);
        assert_eq!(approx_values(&g, &rat(1, 1)).unwrap_err(), ApproxError::BadEpsilon);
        assert_eq!(approx_values(&g, &rat(-1, 10)).unwrap_err(), ApproxError::BadEpsilon);
    }

    #[test]
    fn leaves_are_constant() {
        let g = win_n_in_a_row(2).unwrap();
        let t = approx_values(&g, &rat(1, 10)).unwrap();
        let t1 = g.id("t1").unwrap();
        for b in [rat(0, 1), rat(7, 3), rat(50, 1)] {
            assert_eq!(value_bracket_at(&t, t1, &b).unwrap(), (1.0, 1.0));
        }
    }

    #[test]
    fn coarse_wnr2_brackets() {
        let g = win_n_in_a_row(2).unwrap();
        let t = approx_values(&g, &rat(1, 20)).unwrap();
        assert!(t.max_certificate_gap <= CELL_TOL);
        let (lo, hi) = value_bracket(&t, &g, "root", &rat(5, 2)).unwrap();
        assert_eq!((lo, hi), (1.0, 1.0));
        let (lo, hi) = value_bracket(&t, &g, "root", &rat(9, 10)).unwrap();
        assert!(lo.abs() < 1e-9 && hi >= lo);
        let (lo, hi) = value_bracket(&t, &g, "root", &rat(0, 1)).unwrap();
        assert!(lo.abs() < 1e-9 && hi >= 0.0);
    }

    #[test]
    fn strategy_lookup_preconditions() {
        let g = race_game(2, 2).unwrap();
        let t = approx_values(&g, &rat(1, 10)).unwrap();
        let s = strategy_at(&t, &g, "root", &rat(0, 1)).unwrap();
        assert_eq!(s.support.len(), 1);
        assert_eq!(s.support[0].0, rat(0, 1));
        assert!(matches!(
            strategy_at(&t, &g, "root", &rat(1, 3)),
            Err(ApproxError::OffGrid(_))
        ));
        assert!(matches!(
            strategy_at(&t, &g, "root", &rat(16, 10)),
            Err(ApproxError::AboveThreshold { .. })
        ));
        assert!(matches!(
            strategy_at(&t, &g, "t1", &rat(0, 1)),
            Err(ApproxError::Leaf(_))
        ));
        assert!(matches!(
            strategy_at(&t, &g, "nowhere", &rat(0, 1)),
            Err(ApproxError::UnknownVertex(_))
        ));
    }
}
