use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::{out, Breakpoint, ValueOracle};
use crate::ratio::{format_rational, Ratio};

pub const DEFAULT_SUPPORT_CAP: usize = 1000;

const MAX_SCANS: usize = 100_000;
const BISECTION_BITS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepStatus {
    /// The scan budget ran out before a decision.
    Running,
    Success,
    Failure,
    SupportCapExceeded,
}

impl fmt::Display for SweepStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepStatus::Running => "running",
            SweepStatus::Success => "success",
            SweepStatus::Failure => "failure",
            SweepStatus::SupportCapExceeded => "support-cap-exceeded",
        })
    }
}

/// Player 1's first-bid mixture as built so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepState {
    pub n: usize,
    pub budget: BigRational,
    pub target: BigRational,
    /// Strictly decreasing, starting at 1.
    pub support: Vec<BigRational>,
    pub masses: Vec<BigRational>,
    /// Mass left on bid 0.
    pub zero_mass: BigRational,
    /// Every opponent bid in `[position, 1]` is already answered.
    pub position: BigRational,
    pub status: SweepStatus,
}

impl SweepState {
    /// Player 1's expected payoff when Player 2 bids `b2`.
    pub fn payoff(&self, oracle: &dyn ValueOracle, b2: &BigRational) -> BigRational {
        let mut total = &self.zero_mass * out(oracle, &self.budget, &BigRational::zero(), b2);
        for (b, m) in self.support.iter().zip(&self.masses) {
            total += m * out(oracle, &self.budget, b, b2);
        }
        total
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SweepError {
    #[error("n must be at least 2, got {0}")]
    Length(usize),
    #[error("target value {0} is outside (0, 1]")]
    Target(String),
    #[error("budget {0} is negative")]
    Budget(String),
    #[error("support cap must be at least 2, got {0}")]
    Cap(usize),
    #[error("oracle returned {value} at ratio {ratio}, outside [0, 1]")]
    OracleRange { ratio: String, value: String },
}

/// Ratio of support point `bj` against opponent bids just below `u`.
fn ratio_at(budget: &BigRational, bj: &BigRational, u: &BigRational) -> Ratio {
    let left1 = budget - bj;
    let left2 = BigRational::one() - u;
    if left1.is_zero() {
        Ratio::zero()
    } else if left2.is_zero() {
        Ratio::Infinity
    } else {
        Ratio::Finite(left1 / left2)
    }
}

fn dyadic(k: &BigInt, bits: usize) -> BigRational {
    BigRational::new(k.clone(), BigInt::one() << bits)
}

/// Smallest `lo` such that `out(bj, ·)` is constant on `(lo, u)`.
fn lower_edge(oracle: &dyn ValueOracle, budget: &BigRational, bj: &BigRational, u: &BigRational) -> BigRational {
    let left1 = budget - bj;
    match oracle.breakpoint_below(&ratio_at(budget, bj, u)) {
        Breakpoint::None => BigRational::zero(),
        Breakpoint::At(beta) => {
            let lo = BigRational::one() - left1 / beta;
            if lo.is_negative() {
                BigRational::zero()
            } else {
                lo
            }
        }
        Breakpoint::Unknown => {
            // Bisection on the 2^-40 grid for the last bid where the value changes.
            let value_at = |b: &BigRational| oracle.value(&Ratio::Finite(&left1 / (BigRational::one() - b)));
            let scale = BigInt::one() << BISECTION_BITS;
            let top = (u * BigRational::from_integer(scale.clone())).ceil().to_integer() - BigInt::one();
            if !top.is_positive() || left1.is_zero() {
                return BigRational::zero();
            }
            let target = value_at(&dyadic(&top, BISECTION_BITS));
            if value_at(&BigRational::zero()) == target {
                return BigRational::zero();
            }
            let (mut lo, mut hi) = (BigInt::zero(), top);
            while &hi - &lo > BigInt::one() {
                let mid: BigInt = (&lo + &hi) >> 1;
                if value_at(&dyadic(&mid, BISECTION_BITS)) == target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            dyadic(&hi, BISECTION_BITS)
        }
    }
}

fn interval_below(state: &SweepState, oracle: &dyn ValueOracle, u: &BigRational) -> BigRational {
    state
        .support
        .iter()
        .map(|bj| lower_edge(oracle, &state.budget, bj, u))
        .max()
        .unwrap_or_else(BigRational::zero)
}

/// Decides whether Player 1 can guarantee `v` in the first bidding of WnR(n).
///
/// Starts from mass `v` on bid 1 and `1 − v` on bid 0 and sweeps the
/// opponent's bid `b` down from 1. `out(f, ·)` is piecewise constant, so each
/// step jumps to the next breakpoint. Where the payoff drops below `v`, mass
/// is moved from bid 0 to a new support point at the current position so
/// that the payoff just below it is exactly `v`. The sweep fails when the
/// needed mass exceeds what is left on bid 0.
///
/// Oracles without exact breakpoints are handled by bisection on the `2^-40`
/// grid, and opponent bids below `2^-40` are then not checked.
pub fn sweep(
    n: usize,
    budget: &BigRational,
    v: &BigRational,
    oracle: &dyn ValueOracle,
    support_cap: usize,
) -> Result<SweepState, SweepError> {
    if n < 2 {
        return Err(SweepError::Length(n));
    }
    if !v.is_positive() || v > &BigRational::one() {
        return Err(SweepError::Target(format_rational(v)));
    }
    if budget.is_negative() {
        return Err(SweepError::Budget(format_rational(budget)));
    }
    if support_cap < 2 {
        return Err(SweepError::Cap(support_cap));
    }
    for probe in [Ratio::zero(), Ratio::one(), Ratio::Finite(budget.clone()), Ratio::Infinity] {
        let value = oracle.value(&probe);
        if value.is_negative() || value > BigRational::one() {
            return Err(SweepError::OracleRange {
                ratio: probe.to_string(),
                value: format_rational(&value),
            });
        }
    }

    let mut state = SweepState {
        n,
        budget: budget.clone(),
        target: v.clone(),
        support: vec![BigRational::one()],
        masses: vec![v.clone()],
        zero_mass: BigRational::one() - v,
        position: BigRational::one(),
        status: SweepStatus::Running,
    };
    // Player 1 cannot bid 1 without a budget of 1.
    if budget < &BigRational::one() {
        state.status = SweepStatus::Failure;
        return Ok(state);
    }
    let two = BigRational::from_integer(2.into());
    // Without exact breakpoints the sweep only resolves bids down to the bisection grid.
    let floor = if oracle.breakpoint_below(&Ratio::one()) == Breakpoint::Unknown {
        dyadic(&BigInt::one(), BISECTION_BITS)
    } else {
        BigRational::zero()
    };

    for _ in 0..MAX_SCANS {
        let u = state.position.clone();
        if u <= floor {
            state.status = SweepStatus::Success;
            return Ok(state);
        }
        let lo = interval_below(&state, oracle, &u);
        let mid = (&lo + &u) / &two;
        if state.payoff(oracle, &mid) >= *v {
            state.position = lo;
            continue;
        }
        if state.support.last() == Some(&u) {
            state.status = SweepStatus::Failure;
            return Ok(state);
        }
        let lo = lo.max(lower_edge(oracle, budget, &u, &u));
        let mid = (&lo + &u) / &two;
        let gain = out(oracle, budget, &u, &mid);
        if gain.is_zero() {
            state.status = SweepStatus::Failure;
            return Ok(state);
        }
        let mass = (v - state.payoff(oracle, &mid)) / gain;
        if mass > state.zero_mass {
            state.status = SweepStatus::Failure;
            return Ok(state);
        }
        state.zero_mass -= &mass;
        state.support.push(u);
        state.masses.push(mass);
        if state.support.len() > support_cap {
            state.status = SweepStatus::SupportCapExceeded;
            return Ok(state);
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{FnOracle, StepOracle, Wnr2Oracle};
    use crate::ratio::rat;

    fn check_sound(state: &SweepState, oracle: &dyn ValueOracle) {
        let mut probes: Vec<BigRational> = (0..=200).map(|j| rat(j, 200)).collect();
        probes.extend(state.support.iter().cloned());
        for b in probes {
            assert!(state.payoff(oracle, &b) >= state.target, "payoff at {b}");
        }
    }

    #[test]
    fn worked_example() {
        let s = sweep(2, &rat(4, 3), &rat(1, 3), &StepOracle, DEFAULT_SUPPORT_CAP).unwrap();
        assert_eq!(s.status, SweepStatus::Success);
        assert_eq!(s.support, vec![rat(1, 1), rat(2, 3), rat(1, 3)]);
        assert_eq!(s.masses, vec![rat(1, 3); 3]);
        assert!(s.zero_mass.is_zero());
        check_sound(&s, &StepOracle);
    }

    #[test]
    fn above_value_fails() {
        let s = sweep(2, &rat(8, 5), &rat(3, 5), &StepOracle, DEFAULT_SUPPORT_CAP).unwrap();
        assert_eq!(s.status, SweepStatus::Failure);
    }

    #[test]
    fn wnr2_values_are_reachable() {
        for (b, v) in [((7, 4), (1, 2)), ((13, 10), (1, 4)), ((3, 2), (1, 2)), ((2, 1), (1, 1))] {
            let s = sweep(2, &rat(b.0, b.1), &rat(v.0, v.1), &StepOracle, DEFAULT_SUPPORT_CAP).unwrap();
            assert_eq!(s.status, SweepStatus::Success, "{b:?}");
            check_sound(&s, &StepOracle);
        }
        let s = sweep(2, &rat(13, 10), &rat(26, 100), &StepOracle, DEFAULT_SUPPORT_CAP).unwrap();
        assert_eq!(s.status, SweepStatus::Failure);
    }

    #[test]
    fn bisection_matches_exact_breakpoints() {
        // Bisection edges sit just above non-dyadic breakpoints; leave slack.
        let step = FnOracle(|r: &Ratio| StepOracle.value(r));
        let s = sweep(2, &rat(4, 3), &rat(3, 10), &step, DEFAULT_SUPPORT_CAP).unwrap();
        assert_eq!(s.status, SweepStatus::Success);
        assert_eq!(s.support.len(), 3);
        for (got, want) in s.support.iter().zip([rat(1, 1), rat(2, 3), rat(1, 3)]) {
            assert!((got - want).abs() < rat(1, 1 << 30));
        }
    }

    #[test]
    fn rejects_bad_input() {
        let o = StepOracle;
        assert_eq!(sweep(1, &rat(1, 1), &rat(1, 2), &o, 10), Err(SweepError::Length(1)));
        assert!(matches!(sweep(2, &rat(1, 1), &rat(3, 2), &o, 10), Err(SweepError::Target(_))));
        assert!(matches!(sweep(2, &rat(1, 1), &rat(0, 1), &o, 10), Err(SweepError::Target(_))));
        let bad = FnOracle(|_: &Ratio| rat(2, 1));
        assert!(matches!(sweep(2, &rat(1, 1), &rat(1, 2), &bad, 10), Err(SweepError::OracleRange { .. })));
    }

    #[test]
    fn small_budget_fails() {
        let s = sweep(2, &rat(1, 2), &rat(1, 2), &StepOracle, 10).unwrap();
        assert_eq!(s.status, SweepStatus::Failure);
    }

    #[test]
    fn wnr3_support_grows() {
        let o = Wnr2Oracle::default();
        let s = sweep(3, &rat(5, 4), &rat(1, 3), &o, 20).unwrap();
        assert_eq!(s.status, SweepStatus::SupportCapExceeded);
        assert_eq!(s.support.len(), 21);
        assert!(s.support.windows(2).all(|w| w[0] > w[1]));
        let total: BigRational = s.masses.iter().sum::<BigRational>() + &s.zero_mass;
        assert_eq!(total, rat(1, 1));
    }
}
