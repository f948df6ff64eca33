//! Surely-winning threshold ratios.
//!
//! A threshold function assigns `T(t1) = 0`, `T(t2) = ∞`, and at every other
//! vertex `T(v) = T(v⁻) + 1 − T(v⁻)/T(v⁺)` where `v⁻`/`v⁺` are the neighbors
//! minimizing/maximizing `T`. Player 1 surely wins from `v` exactly when its
//! ratio exceeds `T(v)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::graph::{GameGraph, QualitativeView, VertexId};
use crate::ratio::{ceil_int, Ratio};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ThresholdError {
    #[error("graph has a cycle; use the iterative solver")]
    Cyclic,
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("p must be in (0, 1]")]
    InvalidP,
    #[error("threshold at `{0}` is infinite: Player 1 cannot surely win there")]
    InfiniteThreshold(String),
    #[error("threshold values do not match the graph")]
    SizeMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdResult {
    pub values: Vec<Ratio>,
    /// True for backward induction on a DAG.
    pub exact: bool,
    /// Number of truncation rounds performed (0 for backward induction).
    pub iterations: usize,
    /// Largest change in the last round; `Infinity` if some value was still infinite.
    pub residual: Ratio,
    pub converged: bool,
}

impl ThresholdResult {
    pub fn value(&self, v: VertexId) -> &Ratio {
        &self.values[v]
    }
}

/// One application of the threshold recurrence from the extreme neighbor values.
pub fn combine(lo: &Ratio, hi: &Ratio) -> Ratio {
    match (lo, hi) {
        (Ratio::Infinity, _) => Ratio::Infinity,
        (Ratio::Finite(x), Ratio::Infinity) => Ratio::Finite(x + BigRational::one()),
        (Ratio::Finite(_), Ratio::Finite(y)) if y.is_zero() => Ratio::zero(),
        (Ratio::Finite(x), Ratio::Finite(y)) => {
            Ratio::Finite(x + BigRational::one() - x / y)
        }
    }
}

/// `(T(v⁻), T(v⁺))` for an internal vertex.
pub fn extremes(g: &GameGraph, values: &[Ratio], v: VertexId) -> (Ratio, Ratio) {
    let succ = g.successors(v);
    let lo = succ.iter().map(|&u| &values[u]).min().expect("internal vertex");
    let hi = succ.iter().map(|&u| &values[u]).max().expect("internal vertex");
    (lo.clone(), hi.clone())
}

fn leaf_value(q: &QualitativeView, v: VertexId) -> Ratio {
    if q.is_target1(v) {
        Ratio::zero()
    } else {
        Ratio::Infinity
    }
}

/// Backward induction on a DAG; exact.
pub fn thresholds_dag(q: &QualitativeView) -> Result<ThresholdResult, ThresholdError> {
    let g = q.base();
    let order = g.reverse_topological_order().ok_or(ThresholdError::Cyclic)?;
    let mut values = vec![Ratio::Infinity; g.len()];
    for &v in order {
        values[v] = if g.is_leaf(v) {
            leaf_value(q, v)
        } else {
            let (lo, hi) = extremes(g, &values, v);
            combine(&lo, &hi)
        };
    }
    Ok(ThresholdResult {
        values,
        exact: true,
        iterations: 0,
        residual: Ratio::zero(),
        converged: true,
    })
}

/// Default denominator bound for the iterative solver: values whose
/// denominators exceed `2^DEFAULT_PRECISION_BITS` are rounded up onto that grid.
pub const DEFAULT_PRECISION_BITS: u64 = 128;

/// Truncation iteration `T_n` (Player 1 must win within `n` rounds), for any graph.
///
/// Iterates are pointwise nonincreasing upper bounds on the threshold. Stops at
/// the first round whose largest change is zero or below `tol`.
pub fn thresholds_iterative(
    q: &QualitativeView,
    max_rounds: usize,
    tol: &BigRational,
) -> ThresholdResult {
    thresholds_iterative_with_precision(q, max_rounds, tol, DEFAULT_PRECISION_BITS)
}

pub fn thresholds_iterative_with_precision(
    q: &QualitativeView,
    max_rounds: usize,
    tol: &BigRational,
    precision_bits: u64,
) -> ThresholdResult {
    let g = q.base();
    let mut current: Vec<Ratio> = g
        .vertices()
        .map(|v| {
            if q.is_target1(v) {
                Ratio::zero()
            } else {
                Ratio::Infinity
            }
        })
        .collect();
    let mut residual = Ratio::Infinity;
    for round in 1..=max_rounds {
        let mut next = current.clone();
        residual = Ratio::zero();
        for v in g.internal() {
            let (lo, hi) = extremes(g, &current, v);
            let candidate = round_up(combine(&lo, &hi), precision_bits);
            if candidate < current[v] {
                let change = candidate
                    .checked_sub(&current[v])
                    .map(|d| match d {
                        Ratio::Finite(d) => Ratio::Finite(-d),
                        Ratio::Infinity => Ratio::Infinity,
                    })
                    .unwrap_or(Ratio::Infinity);
                if change > residual {
                    residual = change;
                }
                next[v] = candidate;
            }
        }
        debug_assert!(next.iter().zip(&current).all(|(a, b)| a <= b));
        current = next;
        let converged = match &residual {
            Ratio::Finite(r) => r.is_zero() || r < tol,
            Ratio::Infinity => false,
        };
        if converged {
            return ThresholdResult {
                values: current,
                exact: false,
                iterations: round,
                residual,
                converged: true,
            };
        }
    }
    ThresholdResult {
        values: current,
        exact: false,
        iterations: max_rounds,
        residual,
        converged: false,
    }
}

/// Rounds a finite value up to the `2^-bits` grid when its denominator is larger.
fn round_up(r: Ratio, bits: u64) -> Ratio {
    match r {
        Ratio::Finite(x) if x.denom().bits() > bits => {
            let scale = BigInt::one() << bits;
            let scaled = &x * BigRational::from_integer(scale.clone());
            Ratio::Finite(BigRational::new(ceil_int(&scaled), scale))
        }
        other => other,
    }
}

/// Checks the threshold identity exactly at every internal vertex.
/// Returns the first vertex where it fails.
pub fn identity_violation(q: &QualitativeView, values: &[Ratio]) -> Option<VertexId> {
    let g = q.base();
    g.vertices().find(|&v| {
        if g.is_leaf(v) {
            values[v] != leaf_value(q, v)
        } else {
            let (lo, hi) = extremes(g, values, v);
            values[v] != combine(&lo, &hi)
        }
    })
}

/// `1 − x/y` with `x/∞ = 0`; zero when `y = 0`.
fn bid_cap(x: &Ratio, y: &Ratio) -> BigRational {
    match (x, y) {
        (_, Ratio::Finite(y)) if y.is_zero() => BigRational::zero(),
        (Ratio::Finite(x), Ratio::Finite(y)) => BigRational::one() - x / y,
        (Ratio::Finite(_), Ratio::Infinity) => BigRational::one(),
        (Ratio::Infinity, _) => BigRational::zero(),
    }
}

/// Player 1's constructive strategy above the threshold.
///
/// At vertex `v` in round `i` of a `k`-round phase it bids
/// `1 − T(v⁻)/T(v⁺) + δ^(k+1−i)` with `δ = ε²`, and on winning moves to a
/// `T`-minimizing neighbor closest to `t1`. Once its ratio exceeds
/// `(1 + ε)` times the remaining distance to `t1`, it outbids Player 2's
/// whole budget along a shortest path.
#[derive(Debug, Clone)]
pub struct SureWinStrategy {
    pub epsilon: BigRational,
    pub delta: BigRational,
    pub phase_len: usize,
    base_bid: Vec<BigRational>,
    next: Vec<Option<VertexId>>,
    shortest_next: Vec<Option<VertexId>>,
    dist1: Vec<Option<usize>>,
}

impl SureWinStrategy {
    pub fn successor(&self, v: VertexId) -> Option<VertexId> {
        self.next[v]
    }

    /// Bid at `v` in `round` (counted from 0) given both current budgets.
    /// Never exceeds `budget1`.
    pub fn bid(
        &self,
        v: VertexId,
        round: usize,
        budget1: &BigRational,
        budget2: &BigRational,
    ) -> BigRational {
        if budget2.is_zero() {
            return budget1 / BigRational::from_integer(2.into());
        }
        let ratio = budget1 / budget2;
        if self.in_endgame(v, &ratio) {
            let over = budget2 * (BigRational::one() + &self.epsilon);
            return over.min(budget1.clone());
        }
        let i = round % self.phase_len + 1;
        let supplement = num_traits::pow(self.delta.clone(), self.phase_len + 1 - i);
        let bid = (&self.base_bid[v] + supplement) * budget2;
        bid.min(budget1.clone())
    }

    pub fn in_endgame(&self, v: VertexId, ratio: &BigRational) -> bool {
        match self.dist1[v] {
            Some(d) => {
                let need = BigRational::from_integer(d.into()) * (BigRational::one() + &self.epsilon);
                ratio > &need
            }
            None => false,
        }
    }

    /// Where to go after winning at `v` given the current ratio.
    pub fn successor_at(&self, v: VertexId, ratio: Option<&BigRational>) -> Option<VertexId> {
        match ratio {
            Some(r) if self.in_endgame(v, r) => self.shortest_next[v],
            None => self.shortest_next[v],
            _ => self.next[v],
        }
    }
}

/// Builds the sure-win strategy. `epsilon` is clamped to at most 1/10.
pub fn extract_sure_win_strategy(
    q: &QualitativeView,
    t: &ThresholdResult,
    epsilon: &BigRational,
    root: VertexId,
) -> Result<SureWinStrategy, ThresholdError> {
    let g = q.base();
    if !epsilon.is_positive() {
        return Err(ThresholdError::NonPositiveEpsilon);
    }
    if t.values.len() != g.len() {
        return Err(ThresholdError::SizeMismatch);
    }
    if t.values[root].is_infinite() {
        return Err(ThresholdError::InfiniteThreshold(g.name(root).to_string()));
    }
    let epsilon = epsilon.clone().min(BigRational::new(1.into(), 10.into()));
    let delta = &epsilon * &epsilon;
    let phase_len = match g.longest_path() {
        Some(d) => d + 1,
        None => g.len(),
    };
    let dist1 = g.distances_to(q.target1_mask());
    let mut base_bid = vec![BigRational::zero(); g.len()];
    let mut next = vec![None; g.len()];
    let mut shortest_next = vec![None; g.len()];
    for v in g.internal() {
        let (lo, hi) = extremes(g, &t.values, v);
        base_bid[v] = bid_cap(&lo, &hi);
        let succ = g.successors(v);
        next[v] = succ
            .iter()
            .copied()
            .filter(|&u| t.values[u] == lo)
            .min_by_key(|&u| (dist1[u].unwrap_or(usize::MAX), u));
        shortest_next[v] = succ
            .iter()
            .copied()
            .min_by_key(|&u| (dist1[u].unwrap_or(usize::MAX), u));
    }
    Ok(SureWinStrategy {
        epsilon,
        delta,
        phase_len,
        base_bid,
        next,
        shortest_next,
        dist1,
    })
}

/// Player 2's randomized strategy below the threshold.
///
/// At `v` it bids 0 with probability 1/2 and otherwise uniformly in `(0, β(v)]`.
/// `β = 1 − T(v⁻)/T(v⁺)` where `T(v⁻) < T(v⁺)`, and
/// `β = p·ε·(2n)^(−d)` where the neighbors agree, `d` being the distance to the
/// nearest vertex of the first kind.
#[derive(Debug, Clone)]
pub struct SpoilerStrategy {
    pub epsilon: BigRational,
    pub p: BigRational,
    pub n: usize,
    pub cap: Vec<BigRational>,
    pub distance: Vec<usize>,
    pub splitting: Vec<bool>,
    next: Vec<Option<VertexId>>,
}

impl SpoilerStrategy {
    pub fn successor(&self, v: VertexId) -> Option<VertexId> {
        self.next[v]
    }
}

pub fn extract_spoiler_strategy(
    q: &QualitativeView,
    t: &ThresholdResult,
    epsilon: &BigRational,
    p: &BigRational,
) -> Result<SpoilerStrategy, ThresholdError> {
    let g = q.base();
    if !epsilon.is_positive() {
        return Err(ThresholdError::NonPositiveEpsilon);
    }
    if !p.is_positive() || p > &BigRational::one() {
        return Err(ThresholdError::InvalidP);
    }
    if t.values.len() != g.len() {
        return Err(ThresholdError::SizeMismatch);
    }
    let n = g.len();
    let mut splitting = vec![false; n];
    for v in g.internal() {
        let (lo, hi) = extremes(g, &t.values, v);
        splitting[v] = lo != hi;
    }
    let to_split = g.distances_to(&splitting);
    let to_t2 = g.distances_to(&q.target2_mask());
    let two_n = BigRational::from_integer((2 * n).into());
    let mut cap = vec![BigRational::zero(); n];
    let mut distance = vec![0; n];
    let mut next = vec![None; n];
    for v in g.internal() {
        let (lo, hi) = extremes(g, &t.values, v);
        let succ = g.successors(v);
        if splitting[v] {
            cap[v] = bid_cap(&lo, &hi);
            next[v] = succ
                .iter()
                .copied()
                .filter(|&u| t.values[u] == hi)
                .min_by_key(|&u| (to_t2[u].unwrap_or(usize::MAX), u));
        } else {
            let d = to_split[v].unwrap_or(n);
            distance[v] = d;
            cap[v] = p * epsilon / num_traits::pow(two_n.clone(), d);
            next[v] = succ.iter().copied().min_by_key(|&u| {
                let key = if to_split[v].is_some() { &to_split } else { &to_t2 };
                (key[u].unwrap_or(usize::MAX), u)
            });
        }
    }
    Ok(SpoilerStrategy {
        epsilon: epsilon.clone(),
        p: p.clone(),
        n,
        cap,
        distance,
        splitting,
        next,
    })
}

/// `1/(4|V|)`.
pub fn default_spoiler_p(g: &GameGraph) -> BigRational {
    BigRational::new(1.into(), (4 * g.len()).into())
}
