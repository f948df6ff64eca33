use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    One,
    Two,
}

/// Who takes the move when both bids are equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TieRule {
    #[default]
    Player1Wins,
    Player2Wins,
}

impl TieRule {
    pub fn winner(self, bid1: &BigRational, bid2: &BigRational) -> Player {
        match bid1.cmp(bid2) {
            std::cmp::Ordering::Greater => Player::One,
            std::cmp::Ordering::Less => Player::Two,
            std::cmp::Ordering::Equal => match self {
                TieRule::Player1Wins => Player::One,
                TieRule::Player2Wins => Player::Two,
            },
        }
    }
}

impl std::str::FromStr for TieRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "p1" | "player1" | "player-1-wins" => Ok(TieRule::Player1Wins),
            "p2" | "player2" | "player-2-wins" => Ok(TieRule::Player2Wins),
            _ => Err(format!("unknown tie rule `{s}` (expected p1 or p2)")),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BudgetError {
    #[error("negative budget")]
    Negative,
    #[error("player {0:?} bid more than its budget")]
    IllegalBid(Player),
    #[error("negative bid by player {0:?}")]
    NegativeBid(Player),
}

/// Both players' budgets. After any round in which Player 2 keeps a positive
/// budget, the state is rescaled so that `budget2 == 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetState {
    pub budget1: BigRational,
    pub budget2: BigRational,
}

impl BudgetState {
    pub fn new(budget1: BigRational, budget2: BigRational) -> Result<Self, BudgetError> {
        if budget1.is_negative() || budget2.is_negative() {
            return Err(BudgetError::Negative);
        }
        Ok(BudgetState { budget1, budget2 }.normalized())
    }

    /// Player 1 holds `ratio`, Player 2 holds 1.
    pub fn from_ratio(ratio: BigRational) -> Result<Self, BudgetError> {
        Self::new(ratio, BigRational::from_integer(1.into()))
    }

    /// Player 1's budget divided by Player 2's; `None` if Player 2 is broke.
    pub fn ratio(&self) -> Option<BigRational> {
        (!self.budget2.is_zero()).then(|| &self.budget1 / &self.budget2)
    }

    pub fn budget(&self, p: Player) -> &BigRational {
        match p {
            Player::One => &self.budget1,
            Player::Two => &self.budget2,
        }
    }

    fn normalized(self) -> Self {
        if self.budget2.is_zero() {
            return self;
        }
        BudgetState {
            budget1: &self.budget1 / &self.budget2,
            budget2: BigRational::from_integer(1.into()),
        }
    }

    /// Both players pay their bids; the result is renormalized.
    pub fn pay(&self, bid1: &BigRational, bid2: &BigRational) -> Result<Self, BudgetError> {
        for (p, bid) in [(Player::One, bid1), (Player::Two, bid2)] {
            if bid.is_negative() {
                return Err(BudgetError::NegativeBid(p));
            }
            if bid > self.budget(p) {
                return Err(BudgetError::IllegalBid(p));
            }
        }
        Ok(BudgetState {
            budget1: &self.budget1 - bid1,
            budget2: &self.budget2 - bid2,
        }
        .normalized())
    }
}
