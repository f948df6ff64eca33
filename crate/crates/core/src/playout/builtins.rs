use std::cmp::Reverse;

use num_rational::BigRational;
use num_traits::Zero;
use rand_chacha::ChaCha8Rng;

use super::{sample_index, sample_uniform, Move, PlayoutError, Strategy, View};
use crate::analytic::{wnr2_strategies, RationalMixture};
use crate::approx::{approx_values, grid_of, ValueTable};
use crate::budget::Player;
use crate::graph::{GameGraph, QualitativeView, VertexId};
use crate::ratio::{parse_rational, rat, rational_to_f64, Ratio};
use crate::sure_win::{
    default_spoiler_p, extract_spoiler_strategy, extract_sure_win_strategy, thresholds_dag, thresholds_iterative,
    SpoilerStrategy, SureWinStrategy, ThresholdResult,
};

pub const BUILTIN_NAMES: [&str; 8] = ["wnr2-p1", "wnr2-p2", "surewin", "spoiler", "fptas", "zero", "allin", "uniform"];

fn thresholds(q: &QualitativeView) -> ThresholdResult {
    match thresholds_dag(q) {
        Ok(t) => t,
        Err(_) => thresholds_iterative(q, 10_000, &BigRational::zero()),
    }
}

/// Successor per vertex: Player 1 heads for the smallest threshold, Player 2
/// for the largest; ties go to the vertex closer to the player's target, then
/// to the smaller id.
fn greedy_successors(q: &QualitativeView, t: &ThresholdResult, player: Player) -> Vec<VertexId> {
    let g = q.base();
    let to_t1 = g.distances_to(q.target1_mask());
    let to_t2 = g.distances_to(&q.target2_mask());
    g.vertices()
        .map(|v| {
            let succ = g.successors(v).iter().copied();
            let found = match player {
                Player::One => succ.min_by_key(|&u| (&t.values[u], to_t1[u].unwrap_or(usize::MAX), u)),
                Player::Two => succ.min_by_key(|&u| (Reverse(&t.values[u]), to_t2[u].unwrap_or(usize::MAX), u)),
            };
            found.unwrap_or(v)
        })
        .collect()
}

/// Bid 0, everything, or uniformly at random up to the own budget.
enum Simple {
    Zero,
    AllIn,
    Uniform,
}

struct SimpleStrategy {
    kind: Simple,
    next: Vec<VertexId>,
}

impl Strategy for SimpleStrategy {
    fn play(&self, view: &View, rng: &mut ChaCha8Rng) -> Move {
        let bid = match self.kind {
            Simple::Zero => BigRational::zero(),
            Simple::AllIn => view.own_budget.clone(),
            Simple::Uniform if view.own_budget.is_zero() => BigRational::zero(),
            Simple::Uniform => sample_uniform(rng, view.own_budget),
        };
        Move {
            bid,
            successor: self.next[view.vertex],
        }
    }
}

/// The closed-form WnR(2) mixture in the first round. Afterwards Player 1
/// matches Player 2's whole budget when it can and Player 2 bids everything.
struct Wnr2Strategy {
    mixture: Option<RationalMixture>,
    probabilities: Vec<f64>,
    next: Vec<VertexId>,
}

impl Strategy for Wnr2Strategy {
    fn play(&self, view: &View, rng: &mut ChaCha8Rng) -> Move {
        let bid = match &self.mixture {
            Some(m) if view.round == 0 => {
                let i = sample_index(rng, &self.probabilities);
                m.bids[i].clone().min(view.own_budget.clone())
            }
            _ => match view.player {
                Player::One => view.other_budget.clone().min(view.own_budget.clone()),
                Player::Two => view.own_budget.clone(),
            },
        };
        Move {
            bid,
            successor: self.next[view.vertex],
        }
    }
}

struct SureWin {
    inner: SureWinStrategy,
}

impl Strategy for SureWin {
    fn play(&self, view: &View, _: &mut ChaCha8Rng) -> Move {
        let bid = self.inner.bid(view.vertex, view.round, view.own_budget, view.other_budget);
        let ratio = (!view.other_budget.is_zero()).then(|| view.own_budget / view.other_budget);
        let successor = self
            .inner
            .successor_at(view.vertex, ratio.as_ref())
            .unwrap_or(view.game.successors(view.vertex)[0]);
        Move { bid, successor }
    }
}

struct Spoiler {
    inner: SpoilerStrategy,
}

impl Strategy for Spoiler {
    fn play(&self, view: &View, rng: &mut ChaCha8Rng) -> Move {
        let bid = if view.own_budget.is_zero() || rand::Rng::gen_bool(rng, 0.5) {
            BigRational::zero()
        } else {
            let beta = &self.inner.cap[view.vertex] * view.own_budget;
            if beta.is_zero() {
                BigRational::zero()
            } else {
                sample_uniform(rng, &beta).min(view.own_budget.clone())
            }
        };
        let successor = self
            .inner
            .successor(view.vertex)
            .unwrap_or(view.game.successors(view.vertex)[0]);
        Move { bid, successor }
    }
}

/// Player 1 replays the pessimistic table's stored strategy at the grid
/// budget just below its ratio. Above a vertex's threshold for its top
/// reachable weight it plays the surely-winning strategy for that weight.
struct Fptas {
    table: ValueTable,
    sure: Vec<Option<SureWinStrategy>>,
    next: Vec<VertexId>,
}

impl Fptas {
    fn new(g: &GameGraph, table: ValueTable, eps: &BigRational, next: Vec<VertexId>) -> Result<Self, String> {
        let caps = g.max_reachable_weight();
        let mut by_cap: Vec<(BigRational, SureWinStrategy)> = Vec::new();
        let mut sure = vec![None; g.len()];
        for v in g.internal() {
            let found = by_cap.iter().find(|(c, _)| c == &caps[v]).map(|(_, s)| s.clone());
            let s = match found {
                Some(s) => s,
                None => {
                    let q = QualitativeView::new(g, caps[v].clone()).ok_or("cap is not a leaf weight")?;
                    let t = thresholds_dag(&q).map_err(|e| e.to_string())?;
                    let s = extract_sure_win_strategy(&q, &t, eps, v).map_err(|e| e.to_string())?;
                    by_cap.push((caps[v].clone(), s.clone()));
                    s
                }
            };
            sure[v] = Some(s);
        }
        Ok(Fptas { table, sure, next })
    }
}

impl Strategy for Fptas {
    fn play(&self, view: &View, rng: &mut ChaCha8Rng) -> Move {
        let row = self.table.row(view.vertex);
        let above = view.other_budget.is_zero() || view.own_budget / view.other_budget > row.threshold;
        if above {
            if let Some(s) = &self.sure[view.vertex] {
                let bid = s.bid(view.vertex, view.round, view.own_budget, view.other_budget);
                let ratio = (!view.other_budget.is_zero()).then(|| view.own_budget / view.other_budget);
                let successor = s.successor_at(view.vertex, ratio.as_ref()).unwrap_or(self.next[view.vertex]);
                return Move { bid, successor };
            }
        }
        let ratio = view.own_budget / view.other_budget;
        let k = crate::approx::grid_index(&self.table, &ratio).min(row.strategies.len().saturating_sub(1));
        match row.strategies.get(k) {
            Some(s) if !s.support.is_empty() => {
                let (bid, successor) = &s.support[sample_index(rng, &s.probabilities)];
                Move {
                    bid: (bid * view.other_budget).min(view.own_budget.clone()),
                    successor: *successor,
                }
            }
            _ => Move {
                bid: BigRational::zero(),
                successor: self.next[view.vertex],
            },
        }
    }
}

fn arg(name: &str, args: &[&str], i: usize, default: BigRational) -> Result<BigRational, PlayoutError> {
    match args.get(i) {
        None => Ok(default),
        Some(s) => parse_rational(s).map_err(|e| PlayoutError::Strategy {
            name: name.to_string(),
            message: e.to_string(),
        }),
    }
}

/// Builds a built-in strategy from `NAME[:arg[:arg]]`.
///
/// * `zero`, `allin`, `uniform`: bid 0, the whole budget, or uniformly in
///   `(0, budget]`; move toward the smallest (Player 1) or largest (Player 2)
///   threshold.
/// * `wnr2-p1`, `wnr2-p2`: the optimal WnR(2) mixtures for the initial ratio.
/// * `surewin[:eps]` (Player 1, default `eps = 1/20`).
/// * `spoiler[:eps[:p]]` (Player 2, defaults `1/20` and `1/(4|V|)`).
/// * `fptas[:eps]` (Player 1, default `1/20`).
pub fn builtin(
    spec: &str,
    g: &GameGraph,
    root: VertexId,
    initial_ratio: &BigRational,
    player: Player,
) -> Result<Box<dyn Strategy>, PlayoutError> {
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or_default();
    let args: Vec<&str> = parts.collect();
    let fail = |message: &str| PlayoutError::Strategy {
        name: name.to_string(),
        message: message.to_string(),
    };
    let q = QualitativeView::top(g);
    let t = thresholds(&q);
    let next = greedy_successors(&q, &t, player);
    let simple = |kind| -> Result<Box<dyn Strategy>, PlayoutError> { Ok(Box::new(SimpleStrategy { kind, next: next.clone() })) };
    match name {
        "zero" => simple(Simple::Zero),
        "allin" => simple(Simple::AllIn),
        "uniform" => simple(Simple::Uniform),
        "wnr2-p1" | "wnr2-p2" => {
            let mixture = wnr2_strategies(initial_ratio).ok().map(|s| if name == "wnr2-p1" { s.p1 } else { s.p2 });
            let probabilities = mixture
                .as_ref()
                .map(|m| m.probabilities.iter().map(rational_to_f64).collect())
                .unwrap_or_default();
            Ok(Box::new(Wnr2Strategy {
                mixture,
                probabilities,
                next,
            }))
        }
        "surewin" => {
            if player != Player::One {
                return Err(fail("only Player 1 can play it"));
            }
            let eps = arg(name, &args, 0, rat(1, 20))?;
            if Ratio::Finite(initial_ratio.clone()) <= t.values[root] {
                return Err(fail("the initial ratio does not exceed the threshold"));
            }
            let inner = extract_sure_win_strategy(&q, &t, &eps, root).map_err(|e| fail(&e.to_string()))?;
            Ok(Box::new(SureWin { inner }))
        }
        "spoiler" => {
            if player != Player::Two {
                return Err(fail("only Player 2 can play it"));
            }
            let eps = arg(name, &args, 0, rat(1, 20))?;
            let p = arg(name, &args, 1, default_spoiler_p(g))?;
            let inner = extract_spoiler_strategy(&q, &t, &eps, &p).map_err(|e| fail(&e.to_string()))?;
            Ok(Box::new(Spoiler { inner }))
        }
        "fptas" => {
            if player != Player::One {
                return Err(fail("only Player 1 can play it"));
            }
            let eps = arg(name, &args, 0, rat(1, 20))?;
            grid_of(&eps).map_err(|e| fail(&e.to_string()))?;
            let table = approx_values(g, &eps).map_err(|e| fail(&e.to_string()))?;
            Ok(Box::new(Fptas::new(g, table, &eps, next).map_err(|m| fail(&m))?))
        }
        _ => Err(PlayoutError::UnknownStrategy(spec.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::win_n_in_a_row;
    use crate::playout::{simulate, PlayoutConfig};

    #[test]
    fn all_names_build() {
        let g = win_n_in_a_row(2).unwrap();
        let root = g.root().unwrap();
        let b = rat(7, 4);
        for name in ["wnr2-p1", "surewin:1/10", "fptas:1/10", "zero", "allin", "uniform"] {
            assert!(builtin(name, &g, root, &rat(21, 10), Player::One).is_ok(), "{name}");
        }
        for name in ["wnr2-p2", "spoiler", "spoiler:1/10:1/8", "zero", "allin", "uniform"] {
            assert!(builtin(name, &g, root, &b, Player::Two).is_ok(), "{name}");
        }
        assert!(builtin("surewin", &g, root, &b, Player::One).is_err());
        assert!(builtin("spoiler", &g, root, &b, Player::One).is_err());
        assert!(matches!(builtin("nope", &g, root, &b, Player::One), Err(PlayoutError::UnknownStrategy(_))));
        assert!(builtin("fptas:abc", &g, root, &b, Player::One).is_err());
    }

    #[test]
    fn greedy_moves() {
        let g = win_n_in_a_row(3).unwrap();
        let q = QualitativeView::top(&g);
        let t = thresholds(&q);
        let root = g.root().unwrap();
        let n1 = greedy_successors(&q, &t, Player::One);
        let n2 = greedy_successors(&q, &t, Player::Two);
        assert!(t.values[n1[root]] < t.values[n2[root]]);
        assert_eq!(g.name(n2[root]), "t2");
    }

    #[test]
    fn allin_beats_zero_with_more_budget() {
        let g = win_n_in_a_row(1).unwrap();
        let root = g.root().unwrap();
        let b = rat(1, 2);
        let s1 = builtin("allin", &g, root, &b, Player::One).unwrap();
        let s2 = builtin("zero", &g, root, &b, Player::Two).unwrap();
        let r = simulate(&g, root, &b, s1.as_ref(), s2.as_ref(), &PlayoutConfig::default()).unwrap();
        assert_eq!(r.mean, 1.0);
    }
}
