//! "Win n in a row": the closed-form WnR(2) staircase, the sweeping procedure
//! for WnR(n), and the non-optimality witnesses for finite-support strategies
//! in WnR(3).
//!
//! Budgets are ratios with Player 2 holding 1. Throughout, ties in the first
//! bidding go to Player 1.

mod staircase;
mod sweep;
mod witness;

pub use staircase::{
    wnr2_strategies, wnr2_value, Interval, RationalMixture, StaircaseError, StaircaseValue, Wnr2Strategies,
};
pub use sweep::{sweep, SweepError, SweepState, SweepStatus, DEFAULT_SUPPORT_CAP};
pub use witness::{nonoptimality_witness, x_sequence, Witness, WitnessError};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::budget::TieRule;
use crate::ratio::Ratio;

/// Where the value function of the shorter game changes just below a ratio.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Breakpoint {
    /// The largest breakpoint strictly below the queried ratio.
    At(BigRational),
    /// The value is constant on `[0, r)`.
    None,
    /// The oracle cannot say; callers fall back to bisection.
    Unknown,
}

/// Value of WnR(n−1) as a function of Player 1's ratio.
pub trait ValueOracle: Sync {
    fn value(&self, ratio: &Ratio) -> BigRational;

    fn breakpoint_below(&self, _ratio: &Ratio) -> Breakpoint {
        Breakpoint::Unknown
    }
}

/// WnR(1) with Player 1 winning ties: `[B ≥ 1]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepOracle;

impl ValueOracle for StepOracle {
    fn value(&self, ratio: &Ratio) -> BigRational {
        if *ratio >= Ratio::one() {
            BigRational::one()
        } else {
            BigRational::zero()
        }
    }

    fn breakpoint_below(&self, ratio: &Ratio) -> Breakpoint {
        if *ratio > Ratio::one() {
            Breakpoint::At(BigRational::one())
        } else {
            Breakpoint::None
        }
    }
}

/// The WnR(2) staircase.
#[derive(Debug, Clone, Copy, Default)]
pub struct Wnr2Oracle {
    pub tie_rule: TieRule,
}

impl ValueOracle for Wnr2Oracle {
    fn value(&self, ratio: &Ratio) -> BigRational {
        wnr2_value(ratio, self.tie_rule).value
    }

    fn breakpoint_below(&self, ratio: &Ratio) -> Breakpoint {
        // Breakpoints are 2 and 1 + 1/m for m ≥ 2, accumulating at 1.
        let one = BigRational::one();
        let two = BigRational::from_integer(2.into());
        match ratio {
            Ratio::Infinity => Breakpoint::At(two),
            Ratio::Finite(r) if *r > two => Breakpoint::At(two),
            Ratio::Finite(r) if *r <= one => Breakpoint::None,
            Ratio::Finite(r) => {
                // Largest 1 + 1/m < r: m = ⌊1/(r − 1)⌋ + 1.
                let m = (one.clone() / (r - &one)).floor() + &one;
                Breakpoint::At(one.clone() + m.recip())
            }
        }
    }
}

/// Wraps an arbitrary nondecreasing value function; breakpoints are unknown.
pub struct FnOracle<F>(pub F);

impl<F: Fn(&Ratio) -> BigRational + Sync> ValueOracle for FnOracle<F> {
    fn value(&self, ratio: &Ratio) -> BigRational {
        (self.0)(ratio)
    }
}

/// Player 1's winning probability after the first bidding of WnR(n) when it
/// bids `b1` and Player 2 bids `b2`: zero if Player 1 loses, otherwise the
/// shorter game's value at the renormalized ratio `(B1 − b1)/(1 − b2)`.
pub fn out(oracle: &dyn ValueOracle, budget: &BigRational, b1: &BigRational, b2: &BigRational) -> BigRational {
    if b1 < b2 {
        return BigRational::zero();
    }
    oracle.value(&next_ratio(budget, b1, b2))
}

/// `(B1 − b1)/(1 − b2)`; infinite once Player 2 is broke (Player 1 then wins
/// every tie and every positive bid).
pub fn next_ratio(budget: &BigRational, b1: &BigRational, b2: &BigRational) -> Ratio {
    let left1 = budget - b1;
    let left2 = BigRational::one() - b2;
    if left2.is_positive() {
        Ratio::Finite(left1 / left2)
    } else {
        Ratio::Infinity
    }
}
