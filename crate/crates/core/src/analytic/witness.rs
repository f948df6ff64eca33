use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use thiserror::Error;

use super::{out, Wnr2Oracle};
use crate::budget::TieRule;
use crate::ratio::format_rational;

const MAX_SEQUENCE_INDEX: usize = 64;

/// `x_m = 3/4 + 2^-(m+2)`: 7/8, 13/16, 25/32, … decreasing to 3/4.
///
/// From `x_m` with budget 5/4 against 1, losing a bid of `x_{m+1}` leaves
/// Player 1 at ratio exactly 2.
pub fn x_sequence(m: usize) -> BigRational {
    BigRational::new(3.into(), 4.into()) + BigRational::new(BigInt::one(), BigInt::one() << (m + 2))
}

/// A bid `x` inside the support gap below `support[gap]` that Player 2 can
/// use against the support point `support[support_index]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub gap: usize,
    pub support_index: usize,
    pub sequence_index: usize,
    pub x: BigRational,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("support is not strictly decreasing at position {0}")]
    Unsorted(usize),
    #[error("support has {support} points but {masses} masses")]
    Length { support: usize, masses: usize },
    #[error("support point {0} is outside [0, 1]")]
    OutOfRange(String),
    #[error("mass {0} is negative")]
    NegativeMass(String),
}

/// Looks for a proof that a finite first-bid mixture for WnR(3) at budget
/// 5/4 is not optimal.
///
/// For each gap `(b_{i+1}, b_i)` of the support (the last gap ends at 0), and
/// each consecutive pair `x_k ≤ b_i`, `x_{k+1} > b_{i+1}` of the sequence,
/// `x = x_{k+1}` is a witness when some support point `b_j` with `j ≤ i` and
/// positive mass does strictly worse against `x` than against `b_i`, while
/// the tie at `x` pays as much as the tie at `b_i`.
pub fn nonoptimality_witness(
    support: &[BigRational],
    masses: &[BigRational],
) -> Result<Option<Witness>, WitnessError> {
    if support.len() != masses.len() {
        return Err(WitnessError::Length {
            support: support.len(),
            masses: masses.len(),
        });
    }
    for (i, b) in support.iter().enumerate() {
        if b.is_negative() || b > &BigRational::one() {
            return Err(WitnessError::OutOfRange(format_rational(b)));
        }
        if i > 0 && support[i - 1] <= *b {
            return Err(WitnessError::Unsorted(i));
        }
    }
    if let Some(m) = masses.iter().find(|m| m.is_negative()) {
        return Err(WitnessError::NegativeMass(format_rational(m)));
    }

    let budget = BigRational::new(5.into(), 4.into());
    let oracle = Wnr2Oracle {
        tie_rule: TieRule::Player1Wins,
    };
    let zero = BigRational::from_integer(0.into());
    for (i, bi) in support.iter().enumerate() {
        let below = support.get(i + 1).unwrap_or(&zero);
        for k in 1..MAX_SEQUENCE_INDEX {
            let xk = x_sequence(k);
            let x = x_sequence(k + 1);
            if &xk > bi {
                continue;
            }
            if &x <= below {
                break;
            }
            if out(&oracle, &budget, &x, &x) != out(&oracle, &budget, bi, bi) {
                continue;
            }
            let hit = (0..=i)
                .rev()
                .find(|&j| masses[j].is_positive() && out(&oracle, &budget, &support[j], bi) > out(&oracle, &budget, &support[j], &x));
            if let Some(j) = hit {
                return Ok(Some(Witness {
                    gap: i,
                    support_index: j,
                    sequence_index: k + 1,
                    x,
                }));
            }
        }
    }
    Ok(None)
}
