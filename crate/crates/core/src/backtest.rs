//! Flat-stake betting backtests over dataset slices.

use core::fmt;

use crate::data::{Dataset, Side};
use crate::slice::SliceSpec;

/// Outcome of betting one unit on every match of a slice.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyResult {
    pub side: Side,
    pub bets: usize,
    /// Units staked: one per match.
    pub staked: f64,
    /// Units paid out: the decimal odds of every winning bet.
    pub returned: f64,
}

impl StrategyResult {
    /// Return on investment, in (-1, inf).
    pub fn roi(&self) -> f64 {
        (self.returned - self.staked) / self.staked
    }
}

/// Stakes one unit on `side` at the consolidated average odds for every
/// match in the slice. A winning bet returns the decimal odds; a losing bet
/// returns nothing.
pub fn backtest_flat(
    dataset: &Dataset,
    slice: &SliceSpec,
    side: Side,
) -> Result<StrategyResult, BacktestError> {
    let mut bets = 0usize;
    let mut returned = 0.0f64;
    for m in dataset.matches.iter().filter(|m| slice.contains(m)) {
        bets += 1;
        if side.wins(m.result) {
            returned += match side {
                Side::Home => m.odds.home,
                Side::Away => m.odds.away,
            };
        }
    }
    if bets == 0 {
        return Err(BacktestError::EmptySlice { slice: slice.label.clone() });
    }
    Ok(StrategyResult { side, bets, staked: bets as f64, returned })
}

#[derive(Debug, Clone, PartialEq)]
pub enum BacktestError {
    /// The slice selected no matches; never reported as a silent zero.
    EmptySlice { slice: alloc::string::String },
}

impl fmt::Display for BacktestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BacktestError::EmptySlice { slice } => {
                write!(f, "slice `{slice}` selects no matches")
            }
        }
    }
}

impl core::error::Error for BacktestError {}
