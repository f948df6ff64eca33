//! Seeded Monte-Carlo playouts of strategy pairs.
//!
//! Trial `i` draws from `ChaCha8Rng::seed_from_u64(seed)` switched to stream
//! `i`, so reports do not depend on how trials are scheduled across threads.

mod builtins;

pub use builtins::{builtin, BUILTIN_NAMES};

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::budget::{BudgetState, Player, TieRule};
use crate::graph::{GameGraph, VertexId};
use crate::ratio::{format_rational, rational_to_f64};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayoutConfig {
    pub trials: usize,
    pub seed: u64,
    /// Defaults to `10·|V|`.
    pub max_rounds: Option<usize>,
    pub tie_rule: TieRule,
}

impl Default for PlayoutConfig {
    fn default() -> Self {
        PlayoutConfig {
            trials: 1000,
            seed: 0,
            max_rounds: None,
            tie_rule: TieRule::Player1Wins,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlayoutReport {
    pub trials: usize,
    pub mean: f64,
    /// Sample standard deviation of the payoff.
    pub std_dev: f64,
    /// Wilson score interval at 95%, on the payoff rescaled to `[min, max]` leaf weight.
    pub confidence: (f64, f64),
    /// Hits per leaf name.
    pub leaf_hits: BTreeMap<String, usize>,
    pub illegal_bids: usize,
    pub truncations: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlayoutError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("max_rounds must be at least 1")]
    NoRounds,
    #[error("root vertex {0} is a leaf")]
    LeafRoot(String),
    #[error("initial budget {0} is negative")]
    NegativeBudget(String),
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
    #[error("strategy `{name}`: {message}")]
    Strategy { name: String, message: String },
}

/// What a strategy sees when asked for a bid.
#[derive(Debug)]
pub struct View<'a> {
    pub game: &'a GameGraph,
    pub player: Player,
    pub vertex: VertexId,
    /// Rounds played so far.
    pub round: usize,
    /// Vertices visited, starting with the root and ending with `vertex`.
    pub path: &'a [VertexId],
    /// Player 1's ratio at the start of the play.
    pub initial_ratio: &'a BigRational,
    pub own_budget: &'a BigRational,
    pub other_budget: &'a BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub bid: BigRational,
    /// Where the token goes if this player wins the bidding.
    pub successor: VertexId,
}

pub trait Strategy: Sync {
    fn play(&self, view: &View, rng: &mut ChaCha8Rng) -> Move;
}

/// Uniform on `(0, β]`: `β·(m + 1)/2^53` for a uniform 53-bit `m`.
pub fn sample_uniform(rng: &mut ChaCha8Rng, beta: &BigRational) -> BigRational {
    let m = rng.gen::<u64>() >> 11;
    BigRational::new((m + 1).into(), (1u64 << 53).into()) * beta
}

/// Index drawn from a probability vector (the last index absorbs rounding).
pub fn sample_index(rng: &mut ChaCha8Rng, probabilities: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probabilities.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probabilities.len() - 1
}

enum Outcome {
    Leaf(VertexId),
    Truncated,
    Illegal(Player),
}

#[allow(clippy::too_many_arguments)]
fn play_once(
    g: &GameGraph,
    root: VertexId,
    budget: &BigRational,
    s1: &dyn Strategy,
    s2: &dyn Strategy,
    max_rounds: usize,
    tie_rule: TieRule,
    rng: &mut ChaCha8Rng,
) -> Outcome {
    let mut state = BudgetState::from_ratio(budget.clone()).expect("budget checked");
    let mut path = vec![root];
    let mut v = root;
    for round in 0..max_rounds {
        if g.is_leaf(v) {
            return Outcome::Leaf(v);
        }
        let m1 = s1.play(
            &View {
                game: g,
                player: Player::One,
                vertex: v,
                round,
                path: &path,
                initial_ratio: budget,
                own_budget: &state.budget1,
                other_budget: &state.budget2,
            },
            rng,
        );
        let m2 = s2.play(
            &View {
                game: g,
                player: Player::Two,
                vertex: v,
                round,
                path: &path,
                initial_ratio: budget,
                own_budget: &state.budget2,
                other_budget: &state.budget1,
            },
            rng,
        );
        for (p, m) in [(Player::One, &m1), (Player::Two, &m2)] {
            if !g.successors(v).contains(&m.successor) {
                return Outcome::Illegal(p);
            }
        }
        state = match state.pay(&m1.bid, &m2.bid) {
            Ok(s) => s,
            Err(crate::budget::BudgetError::IllegalBid(p) | crate::budget::BudgetError::NegativeBid(p)) => {
                return Outcome::Illegal(p)
            }
            Err(crate::budget::BudgetError::Negative) => unreachable!("budgets stay nonnegative"),
        };
        v = match tie_rule.winner(&m1.bid, &m2.bid) {
            Player::One => m1.successor,
            Player::Two => m2.successor,
        };
        path.push(v);
    }
    if g.is_leaf(v) {
        Outcome::Leaf(v)
    } else {
        Outcome::Truncated
    }
}

fn wilson(p: f64, n: f64) -> (f64, f64) {
    let z = 1.959_963_984_540_054_f64;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Plays `cfg.trials` independent games from `root` with Player 1 at ratio `budget`.
///
/// Payoff is the leaf weight. A play still running after `max_rounds` scores
/// the smallest leaf weight; a play in which someone bids illegally (more
/// than its budget, negative, or toward a non-successor) is aborted and
/// scores the weight worst for the offender.
pub fn simulate(
    g: &GameGraph,
    root: VertexId,
    budget: &BigRational,
    s1: &dyn Strategy,
    s2: &dyn Strategy,
    cfg: &PlayoutConfig,
) -> Result<PlayoutReport, PlayoutError> {
    if cfg.trials == 0 {
        return Err(PlayoutError::NoTrials);
    }
    if cfg.max_rounds == Some(0) {
        return Err(PlayoutError::NoRounds);
    }
    if g.is_leaf(root) {
        return Err(PlayoutError::LeafRoot(g.name(root).to_string()));
    }
    if budget < &BigRational::zero() {
        return Err(PlayoutError::NegativeBudget(format_rational(budget)));
    }
    let max_rounds = cfg.max_rounds.unwrap_or(10 * g.len());
    let outcomes: Vec<Outcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i as u64);
            play_once(g, root, budget, s1, s2, max_rounds, cfg.tie_rule, &mut rng)
        })
        .collect();

    let lo = rational_to_f64(g.min_weight());
    let hi = rational_to_f64(g.max_weight());
    let mut leaf_hits = BTreeMap::new();
    let mut illegal_bids = 0;
    let mut truncations = 0;
    let payoffs: Vec<f64> = outcomes
        .iter()
        .map(|o| match o {
            Outcome::Leaf(v) => {
                *leaf_hits.entry(g.name(*v).to_string()).or_insert(0) += 1;
                rational_to_f64(g.weight(*v).expect("leaf"))
            }
            Outcome::Truncated => {
                truncations += 1;
                lo
            }
            Outcome::Illegal(p) => {
                illegal_bids += 1;
                match p {
                    Player::One => lo,
                    Player::Two => hi,
                }
            }
        })
        .collect();
    let n = payoffs.len() as f64;
    let mean = payoffs.iter().sum::<f64>() / n;
    let std_dev = if payoffs.len() > 1 {
        (payoffs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let span = hi - lo;
    let confidence = if span > 0.0 {
        let (a, b) = wilson(((mean - lo) / span).clamp(0.0, 1.0), n);
        (lo + a * span, lo + b * span)
    } else {
        (mean, mean)
    };
    Ok(PlayoutReport {
        trials: cfg.trials,
        mean,
        std_dev,
        confidence,
        leaf_hits,
        illegal_bids,
        truncations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::win_n_in_a_row;
    use crate::ratio::rat;

    struct Fixed(BigRational);

    impl Strategy for Fixed {
        fn play(&self, view: &View, _: &mut ChaCha8Rng) -> Move {
            let succ = view.game.successors(view.vertex);
            let target = match view.player {
                Player::One => "t1",
                Player::Two => "t2",
            };
            let successor = succ
                .iter()
                .copied()
                .find(|&u| view.game.name(u) == target)
                .unwrap_or(succ[0]);
            Move {
                bid: self.0.clone(),
                successor,
            }
        }
    }

    #[test]
    fn zero_bids_go_to_player1() {
        let g = win_n_in_a_row(2).unwrap();
        let root = g.root().unwrap();
        let zero = Fixed(rat(0, 1));
        let r = simulate(&g, root, &rat(1, 2), &zero, &zero, &PlayoutConfig::default()).unwrap();
        assert_eq!(r.mean, 1.0);
        assert_eq!(r.leaf_hits.get("t1"), Some(&1000));

        let cfg = PlayoutConfig {
            tie_rule: TieRule::Player2Wins,
            ..PlayoutConfig::default()
        };
        let r = simulate(&g, root, &rat(1, 2), &zero, &zero, &cfg).unwrap();
        assert_eq!(r.mean, 0.0);
    }

    #[test]
    fn illegal_bids_are_counted() {
        let g = win_n_in_a_row(2).unwrap();
        let root = g.root().unwrap();
        let greedy = Fixed(rat(3, 1));
        let zero = Fixed(rat(0, 1));
        let r = simulate(&g, root, &rat(1, 1), &greedy, &zero, &PlayoutConfig::default()).unwrap();
        assert_eq!(r.illegal_bids, 1000);
        assert_eq!(r.mean, 0.0);
        let r = simulate(&g, root, &rat(1, 1), &zero, &greedy, &PlayoutConfig::default()).unwrap();
        assert_eq!(r.illegal_bids, 1000);
        assert_eq!(r.mean, 1.0);
    }

    #[test]
    fn wilson_interval() {
        let (a, b) = wilson(0.5, 100.0);
        assert!((a - 0.4038).abs() < 1e-3 && (b - 0.5962).abs() < 1e-3);
        let (a, b) = wilson(1.0, 10.0);
        assert!(a < 0.8 && b > 1.0 - 1e-12);
    }

    #[test]
    fn uniform_sample_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let x = sample_uniform(&mut rng, &rat(1, 3));
            assert!(x > rat(0, 1) && x <= rat(1, 3));
        }
    }

    #[test]
    fn rejects_bad_config() {
        let g = win_n_in_a_row(2).unwrap();
        let root = g.root().unwrap();
        let zero = Fixed(rat(0, 1));
        let cfg = PlayoutConfig {
            trials: 0,
            ..PlayoutConfig::default()
        };
        assert_eq!(simulate(&g, root, &rat(1, 1), &zero, &zero, &cfg), Err(PlayoutError::NoTrials));
        let t1 = g.id("t1").unwrap();
        assert!(matches!(
            simulate(&g, t1, &rat(1, 1), &zero, &zero, &PlayoutConfig::default()),
            Err(PlayoutError::LeafRoot(_))
        ));
    }
}
