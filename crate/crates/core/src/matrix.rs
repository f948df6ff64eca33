//! Two-player zero-sum matrix games solved by linear programming.
//!
//! Payoffs are shifted to be at least 1, after which the value is
//! `1 / max{1ᵀy : A y ≤ 1, y ≥ 0}`. The optimal `y` gives the column player's
//! strategy and the constraint duals give the row player's. The simplex uses
//! Dantzig's rule and switches to Bland's rule after a run of degenerate pivots.

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Numeric field the simplex runs over.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync {
    /// Magnitudes at or below this are treated as zero when pivoting.
    fn epsilon() -> Self;

    fn from_usize(n: usize) -> Self;

    fn is_pos(&self) -> bool {
        *self > Self::epsilon()
    }
}

impl Scalar for f64 {
    fn epsilon() -> Self {
        1e-12
    }

    fn from_usize(n: usize) -> Self {
        n as f64
    }
}

impl Scalar for BigRational {
    fn epsilon() -> Self {
        BigRational::zero()
    }

    fn from_usize(n: usize) -> Self {
        BigRational::from_integer(n.into())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix game needs at least one row and one column")]
    Empty,
    #[error("row {0} has {1} entries, expected {2}")]
    Ragged(usize, usize, usize),
    #[error("payoff at ({0}, {1}) is not finite")]
    NonFinite(usize, usize),
}

/// Player 1 picks a row and maximizes; Player 2 picks a column.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGame<T> {
    rows: usize,
    cols: usize,
    pay: Vec<T>,
}

impl<T: Scalar> MatrixGame<T> {
    pub fn new(rows: usize, cols: usize, pay: Vec<T>) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::Empty);
        }
        if pay.len() != rows * cols {
            return Err(MatrixError::Ragged(0, pay.len(), rows * cols));
        }
        Ok(MatrixGame { rows, cols, pay })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(MatrixError::Ragged(i, row.len(), c));
            }
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.pay[i * self.cols + j]
    }

    /// `-Aᵀ`: the same game seen from the column player.
    pub fn negated_transpose(&self) -> Self {
        let mut pay = Vec::with_capacity(self.pay.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                pay.push(T::zero() - self.at(i, j).clone());
            }
        }
        MatrixGame {
            rows: self.cols,
            cols: self.rows,
            pay,
        }
    }

    /// Worst-case payoff of a row mixture over pure columns.
    pub fn row_security(&self, p: &[T]) -> T {
        (0..self.cols)
            .map(|j| {
                (0..self.rows).fold(T::zero(), |acc, i| acc + p[i].clone() * self.at(i, j).clone())
            })
            .reduce(|a, b| if b < a { b } else { a })
            .expect("cols >= 1")
    }

    /// Best-response payoff against a column mixture over pure rows.
    pub fn col_security(&self, q: &[T]) -> T {
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(T::zero(), |acc, j| acc + q[j].clone() * self.at(i, j).clone())
            })
            .reduce(|a, b| if b > a { b } else { a })
            .expect("rows >= 1")
    }
}

impl MatrixGame<f64> {
    pub fn validate_finite(&self) -> Result<(), MatrixError> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self.at(i, j).is_finite() {
                    return Err(MatrixError::NonFinite(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn to_exact(&self) -> MatrixGame<BigRational> {
        MatrixGame {
            rows: self.rows,
            cols: self.cols,
            pay: self
                .pay
                .iter()
                .map(|&x| BigRational::from_f64(x).expect("finite payoff"))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSolution<T> {
    pub value: T,
    pub row_strategy: Vec<T>,
    pub col_strategy: Vec<T>,
    /// `max(0, value − rowsecurity, colsecurity − value)`.
    pub certificate_gap: T,
}

/// Solves the game with the simplex method in `T`'s arithmetic.
pub fn solve<T: Scalar>(game: &MatrixGame<T>) -> MatrixSolution<T> {
    if game.rows > game.cols {
        let t = solve_oriented(&game.negated_transpose());
        let value = T::zero() - t.value;
        return finish(game, value, t.col_strategy, t.row_strategy);
    }
    let s = solve_oriented(game);
    finish(game, s.value, s.row_strategy, s.col_strategy)
}

/// Solves in `f64`; if the certificate gap exceeds `tol`, re-solves exactly.
pub fn solve_matrix_game(game: &MatrixGame<f64>, tol: f64) -> MatrixSolution<f64> {
    let s = solve(game);
    if s.certificate_gap <= tol {
        return s;
    }
    let exact = solve(&game.to_exact());
    let to_f = |v: &[BigRational]| -> Vec<f64> {
        v.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect()
    };
    let row = to_f(&exact.row_strategy);
    let col = to_f(&exact.col_strategy);
    let value = exact.value.to_f64().unwrap_or(0.0);
    finish(game, value, row, col)
}

fn finish<T: Scalar>(game: &MatrixGame<T>, value: T, row: Vec<T>, col: Vec<T>) -> MatrixSolution<T> {
    let row = clean(row);
    let col = clean(col);
    let lo = game.row_security(&row);
    let hi = game.col_security(&col);
    let mut gap = T::zero();
    for d in [value.clone() - lo, hi - value.clone()] {
        if d > gap {
            gap = d;
        }
    }
    MatrixSolution {
        value,
        row_strategy: row,
        col_strategy: col,
        certificate_gap: gap,
    }
}

/// Clips round-off negatives and renormalizes to sum 1.
fn clean<T: Scalar>(mut v: Vec<T>) -> Vec<T> {
    for x in v.iter_mut() {
        if *x < T::zero() {
            *x = T::zero();
        }
    }
    let total = v.iter().cloned().fold(T::zero(), |a, b| a + b);
    if total.is_pos() && total != T::one() {
        for x in v.iter_mut() {
            *x = x.clone() / total.clone();
        }
    }
    v
}

struct Oriented<T> {
    value: T,
    row_strategy: Vec<T>,
    col_strategy: Vec<T>,
}

/// Simplex on the shifted LP; one constraint per row.
fn solve_oriented<T: Scalar>(game: &MatrixGame<T>) -> Oriented<T> {
    let m = game.rows;
    let n = game.cols;
    let min = game
        .pay
        .iter()
        .cloned()
        .reduce(|a, b| if b < a { b } else { a })
        .expect("nonempty");
    let shift = T::one() - min;
    let width = n + m;
    // Tableau rows: [A' | I], right-hand side 1.
    let mut tab: Vec<T> = vec![T::zero(); m * width];
    for i in 0..m {
        for j in 0..n {
            tab[i * width + j] = game.at(i, j).clone() + shift.clone();
        }
        tab[i * width + n + i] = T::one();
    }
    let mut rhs = vec![T::one(); m];
    let mut cost: Vec<T> = (0..width)
        .map(|j| if j < n { T::one() } else { T::zero() })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut objective = T::zero();

    let degenerate_limit = 2 * (m + n);
    let mut degenerate_run = 0usize;
    let mut bland = false;
    loop {
        let entering = if bland {
            (0..width).find(|&j| cost[j].is_pos())
        } else {
            let mut best: Option<usize> = None;
            for j in 0..width {
                if cost[j].is_pos() && best.is_none_or(|b| cost[j] > cost[b]) {
                    best = Some(j);
                }
            }
            best
        };
        let Some(c) = entering else { break };

        let mut leave: Option<(usize, T)> = None;
        for i in 0..m {
            let a = &tab[i * width + c];
            if !a.is_pos() {
                continue;
            }
            let ratio = rhs[i].clone() / a.clone();
            let better = match &leave {
                None => true,
                Some((r, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*r]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // The LP is bounded (every column of A' is positive), so a leaving row exists.
        let (r, theta) = leave.expect("bounded LP");
        if theta.is_pos() {
            degenerate_run = 0;
        } else {
            degenerate_run += 1;
            if degenerate_run > degenerate_limit {
                bland = true;
            }
        }
        pivot(&mut tab, &mut rhs, &mut cost, &mut objective, width, r, c);
        basis[r] = c;
    }

    let mut y = vec![T::zero(); n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            y[b] = rhs[i].clone();
        }
    }
    let z = objective;
    let col_strategy: Vec<T> = y.into_iter().map(|v| v / z.clone()).collect();
    let row_strategy: Vec<T> = (0..m)
        .map(|i| (T::zero() - cost[n + i].clone()) / z.clone())
        .collect();
    let value = T::one() / z - shift;
    Oriented {
        value,
        row_strategy,
        col_strategy,
    }
}

fn pivot<T: Scalar>(
    tab: &mut [T],
    rhs: &mut [T],
    cost: &mut [T],
    objective: &mut T,
    width: usize,
    r: usize,
    c: usize,
) {
    let p = tab[r * width + c].clone();
    let mut nonzero = Vec::new();
    for j in 0..width {
        let v = &mut tab[r * width + j];
        if !v.is_zero() {
            *v = v.clone() / p.clone();
            nonzero.push(j);
        }
    }
    rhs[r] = rhs[r].clone() / p;
    let prow: Vec<T> = tab[r * width..(r + 1) * width].to_vec();
    let pr = rhs[r].clone();
    for i in 0..rhs.len() {
        if i == r {
            continue;
        }
        let row = &mut tab[i * width..(i + 1) * width];
        let f = row[c].clone();
        if f.is_zero() {
            continue;
        }
        for &j in &nonzero {
            row[j] = row[j].clone() - f.clone() * prow[j].clone();
        }
        row[c] = T::zero();
        rhs[i] = rhs[i].clone() - f * pr.clone();
    }
    let f = cost[c].clone();
    if !f.is_zero() {
        for &j in &nonzero {
            cost[j] = cost[j].clone() - f.clone() * prow[j].clone();
        }
        cost[c] = T::zero();
        *objective = objective.clone() + f * pr;
    }
}

/// Convenience for tests and tools: `|x| ≤ tol` in either arithmetic.
pub fn within<T: Scalar + Signed>(a: &T, b: &T, tol: &T) -> bool {
    (a.clone() - b.clone()).abs() <= *tol
}

/// Parses a whitespace-separated numeric matrix, one row per line.
pub fn parse_matrix(text: &str) -> Result<MatrixGame<f64>, String> {
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                crate::ratio::parse_rational(tok)
                    .map(|r| crate::ratio::rational_to_f64(&r))
                    .or_else(|_| tok.parse::<f64>())
                    .map_err(|_| format!("line {}: bad number `{tok}`", k + 1))
            })
            .collect::<Result<Vec<f64>, String>>()?;
        rows.push(row);
    }
    let game = MatrixGame::from_rows(rows).map_err(|e| e.to_string())?;
    game.validate_finite().map_err(|e| e.to_string())?;
    Ok(game)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;
    use proptest::prelude::*;

    fn game(rows: &[&[f64]]) -> MatrixGame<f64> {
        MatrixGame::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn diagonal_game() {
        let s = solve_matrix_game(&game(&[&[1.0, 0.0], &[0.0, 1.0]]), 1e-9);
        assert!((s.value - 0.5).abs() < 1e-12);
        for x in s.row_strategy.iter().chain(&s.col_strategy) {
            assert!((x - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn saddle_point() {
        let s = solve_matrix_game(&game(&[&[3.0, 1.0], &[2.0, 2.0]]), 1e-9);
        assert!((s.value - 2.0).abs() < 1e-12);
        assert!((s.row_strategy[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_rock_paper_scissors() {
        let g = MatrixGame::from_rows(vec![
            vec![rat(0, 1), rat(-1, 1), rat(1, 1)],
            vec![rat(1, 1), rat(0, 1), rat(-1, 1)],
            vec![rat(-1, 1), rat(1, 1), rat(0, 1)],
        ])
        .unwrap();
        let s = solve(&g);
        assert_eq!(s.value, rat(0, 1));
        assert_eq!(s.row_strategy, vec![rat(1, 3); 3]);
        assert_eq!(s.certificate_gap, rat(0, 1));
    }

    #[test]
    fn tall_games_are_transposed() {
        let s = solve_matrix_game(&game(&[&[1.0], &[5.0], &[3.0]]), 1e-9);
        assert!((s.value - 5.0).abs() < 1e-12);
        assert!((s.row_strategy[1] - 1.0).abs() < 1e-12);
        assert_eq!(s.col_strategy, vec![1.0]);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert_eq!(MatrixGame::<f64>::from_rows(vec![]), Err(MatrixError::Empty));
        assert!(MatrixGame::from_rows(vec![vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(parse_matrix("1 2\n3 inf\n").is_err());
        assert_eq!(parse_matrix("1 2 # c\n\n1/2 0.25\n").unwrap().at(1, 0), &0.5);
    }

    fn small_game() -> impl Strategy<Value = MatrixGame<f64>> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-20i32..20, r * c)
                .prop_map(move |v| MatrixGame::new(r, c, v.into_iter().map(f64::from).collect()).unwrap())
        })
    }

    proptest! {
        #[test]
        fn duality_and_security(g in small_game()) {
            let s = solve_matrix_game(&g, 1e-9);
            let t = solve_matrix_game(&g.negated_transpose(), 1e-9);
            prop_assert!((s.value + t.value).abs() <= 2e-9);
            prop_assert!(s.certificate_gap <= 1e-9);
            prop_assert!(g.row_security(&s.row_strategy) >= s.value - 1e-9);
            prop_assert!(g.col_security(&s.col_strategy) <= s.value + 1e-9);
        }

        #[test]
        fn affine_equivariance(g in small_game(), a in 1u32..5, b in -5i32..5) {
            let s = solve_matrix_game(&g, 1e-9);
            let scaled = MatrixGame::new(
                g.rows(),
                g.cols(),
                (0..g.rows()).flat_map(|i| (0..g.cols()).map(move |j| (i, j)))
                    .map(|(i, j)| f64::from(a) * g.at(i, j) + f64::from(b))
                    .collect(),
            ).unwrap();
            let t = solve_matrix_game(&scaled, 1e-9);
            prop_assert!((t.value - (f64::from(a) * s.value + f64::from(b))).abs() <= 1e-8);
        }

        #[test]
        fn exact_and_float_agree(g in small_game()) {
            let s = solve_matrix_game(&g, 1e-9);
            let e = solve(&g.to_exact());
            prop_assert_eq!(e.certificate_gap.clone(), rat(0, 1));
            prop_assert!((s.value - e.value.to_f64().unwrap()).abs() <= 1e-9);
        }
    }
}
