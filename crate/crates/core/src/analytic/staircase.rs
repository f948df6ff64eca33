use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::budget::TieRule;
use crate::ratio::{ceil_int, floor_int, format_rational, Ratio};

/// A real interval with optionally closed ends; `right = Infinity` is open.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub left: BigRational,
    pub left_closed: bool,
    pub right: Ratio,
    pub right_closed: bool,
}

impl Interval {
    pub fn contains(&self, x: &BigRational) -> bool {
        let above = if self.left_closed {
            x >= &self.left
        } else {
            x > &self.left
        };
        let below = match &self.right {
            Ratio::Infinity => true,
            Ratio::Finite(r) if self.right_closed => x <= r,
            Ratio::Finite(r) => x < r,
        };
        above && below
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.left_closed { '[' } else { '(' };
        let close = if self.right_closed { ']' } else { ')' };
        write!(f, "{open}{}, {}{close}", format_rational(&self.left), self.right)
    }
}

/// The WnR(2) value at one budget, with the plateau it lies on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaircaseValue {
    pub budget: Ratio,
    pub value: BigRational,
    pub interval: Interval,
    pub tie_rule: TieRule,
}

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// WnR(2) value at ratio `B1` (Player 2 holds 1).
///
/// Zero up to 1 and one from 2 on (from just above 2 when Player 2 wins
/// ties). In between, with `x = B1 − 1`:
///
/// * Player 1 wins ties: `1/m` for `m = ⌈1/x⌉`, on `[1 + 1/m, 1 + 1/(m−1))`;
/// * Player 2 wins ties: `1/(n+1)` for `n = ⌊1/x⌋`, on `(1 + 1/(n+1), 1 + 1/n]`.
///
/// The two rules differ exactly at the endpoints `1 + 1/n`.
pub fn wnr2_value(budget: &Ratio, tie_rule: TieRule) -> StaircaseValue {
    let one = BigRational::one();
    let two = frac(2, 1);
    let result = |value: BigRational, interval: Interval| StaircaseValue {
        budget: budget.clone(),
        value,
        interval,
        tie_rule,
    };
    let top = || Interval {
        left: two.clone(),
        left_closed: tie_rule == TieRule::Player1Wins,
        right: Ratio::Infinity,
        right_closed: false,
    };
    let b = match budget {
        Ratio::Infinity => return result(one, top()),
        Ratio::Finite(b) => b,
    };
    if b <= &one {
        return result(
            BigRational::zero(),
            Interval {
                left: BigRational::zero(),
                left_closed: true,
                right: Ratio::one(),
                right_closed: true,
            },
        );
    }
    let x = b - &one;
    let inv = x.recip();
    match tie_rule {
        TieRule::Player1Wins => {
            if b >= &two {
                return result(one, top());
            }
            let m = ceil_int(&inv);
            let m = BigRational::from_integer(m);
            result(
                m.recip(),
                Interval {
                    left: &one + m.recip(),
                    left_closed: true,
                    right: Ratio::Finite(&one + (&m - &one).recip()),
                    right_closed: false,
                },
            )
        }
        TieRule::Player2Wins => {
            if b > &two {
                return result(one, top());
            }
            let n = BigRational::from_integer(floor_int(&inv));
            let n1 = &n + &one;
            result(
                n1.recip(),
                Interval {
                    left: &one + n1.recip(),
                    left_closed: false,
                    right: Ratio::Finite(&one + n.recip()),
                    right_closed: true,
                },
            )
        }
    }
}

/// A finitely supported distribution over first bids, in exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMixture {
    pub bids: Vec<BigRational>,
    pub probabilities: Vec<BigRational>,
}

impl RationalMixture {
    pub fn uniform(bids: Vec<BigRational>) -> Self {
        let p = frac(1, bids.len() as i64);
        RationalMixture {
            probabilities: vec![p; bids.len()],
            bids,
        }
    }
}

/// Optimal first-bid mixtures for both players in WnR(2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wnr2Strategies {
    /// `B1 = 1 + 1/n + e` with `0 ≤ e < 1/(n(n−1))`.
    pub n: usize,
    pub e: BigRational,
    /// Spacing offset of Player 2's bids; `None` when `n = 1`.
    pub epsilon_prime: Option<BigRational>,
    pub p1: RationalMixture,
    pub p2: RationalMixture,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StaircaseError {
    #[error("budget {0} is outside (1, 2]")]
    OutOfRange(String),
}

/// Both players' optimal first-bid mixtures at `1 < B1 ≤ 2` (ties to Player 1).
///
/// With `x = B1 − 1` and `n = ⌈1/x⌉`, Player 1 bids uniformly on
/// `{x, 2x, …, (n−1)x, 1}`: bid `kx` survives every Player 2 bid in
/// `[(k−1)x, kx]` and bid 1 every bid in `[1−x, 1]`, which together cover
/// `[0, 1]`. Player 2 bids uniformly on `{k(1/n + ε′) : 0 ≤ k < n}`; since
/// the spacing exceeds `x`, no Player 1 bid beats two of them.
pub fn wnr2_strategies(budget: &BigRational) -> Result<Wnr2Strategies, StaircaseError> {
    let one = BigRational::one();
    if budget <= &one || budget > &frac(2, 1) {
        return Err(StaircaseError::OutOfRange(format_rational(budget)));
    }
    let x = budget - &one;
    let n_big = ceil_int(&x.recip());
    let n: usize = n_big.to_string().parse().expect("n is small for budgets in (1, 2]");
    let nr = BigRational::from_integer(n_big);
    let e = &x - nr.recip();

    let mut p1_bids: Vec<BigRational> = (1..n)
        .map(|k| &x * frac(k as i64, 1))
        .collect();
    p1_bids.push(one.clone());
    p1_bids.dedup();

    let (epsilon_prime, p2_bids) = if n == 1 {
        (None, vec![BigRational::zero()])
    } else {
        let nn1 = frac((n * (n - 1)) as i64, 1);
        let a = nn1.recip();
        let b = &one - frac(n as i64 - 1, 1) * &e;
        let bound = if a < b { a } else { b };
        let ep = (&e + bound) / frac(2, 1);
        let step = nr.recip() + &ep;
        let bids = (0..n).map(|k| &step * frac(k as i64, 1)).collect();
        (Some(ep), bids)
    };
    Ok(Wnr2Strategies {
        n,
        e,
        epsilon_prime,
        p1: RationalMixture::uniform(p1_bids),
        p2: RationalMixture::uniform(p2_bids),
    })
}
