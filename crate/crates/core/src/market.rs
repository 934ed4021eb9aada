//! Odds arithmetic: implied probabilities, bookmaker margins and the
//! home-minus-away probability difference.
//!
//! Decimal odds `O` pay `O` units per unit staked (stake included). The three
//! inverse odds of a match sum to more than one; the excess is the
//! bookmaker's margin, and dividing each inverse by the total removes it.

use core::fmt;

/// Decimal 1X2 odds for one match: home win, draw, away win.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OddsTriple {
    pub home: f64,
    pub draw: f64,
    pub away: f64,
}

impl OddsTriple {
    pub fn new(home: f64, draw: f64, away: f64) -> Result<OddsTriple, MarketError> {
        let odds = OddsTriple { home, draw, away };
        odds.validate()?;
        Ok(odds)
    }

    fn validate(&self) -> Result<(), MarketError> {
        for v in [self.home, self.draw, self.away] {
            if !v.is_finite() || v <= 1.0 {
                return Err(MarketError::InvalidOdds(v));
            }
        }
        Ok(())
    }

    fn inverse_sum(&self) -> f64 {
        1.0 / self.home + 1.0 / self.draw + 1.0 / self.away
    }
}

/// Implied win probabilities for one match, after margin removal.
/// Components are in (0, 1) and sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbTriple {
    pub home: f64,
    pub draw: f64,
    pub away: f64,
}

impl ProbTriple {
    pub fn sum(&self) -> f64 {
        self.home + self.draw + self.away
    }
}

/// Removes the bookmaker margin by proportional normalisation: each implied
/// probability is the inverse odds divided by the sum of the three inverses.
pub fn demargin(odds: &OddsTriple) -> Result<ProbTriple, MarketError> {
    odds.validate()?;
    let total = odds.inverse_sum();
    Ok(ProbTriple {
        home: 1.0 / odds.home / total,
        draw: 1.0 / odds.draw / total,
        away: 1.0 / odds.away / total,
    })
}

/// Bookmaker margin: the sum of the three inverse odds minus one.
/// Zero for a fair book; around 0.05 for typical pre-match football odds.
pub fn margin(odds: &OddsTriple) -> Result<f64, MarketError> {
    odds.validate()?;
    Ok(odds.inverse_sum() - 1.0)
}

/// Home-minus-away implied probability. Positive means the bookmaker makes
/// the home team the favourite.
pub fn imp_prob_diff(probs: &ProbTriple) -> f64 {
    probs.home - probs.away
}

/// Consolidates one row's odds into a single triple.
///
/// The pre-averaged market columns win when present; otherwise the
/// arithmetic mean over all complete individual bookmaker triples. Returns
/// `OddsMissing` when neither source yields a valid triple, so the caller
/// can drop the row.
pub fn consolidate_odds(
    average: Option<[f64; 3]>,
    books: &[[f64; 3]],
) -> Result<OddsTriple, MarketError> {
    if let Some([h, d, a]) = average {
        if let Ok(odds) = OddsTriple::new(h, d, a) {
            return Ok(odds);
        }
    }
    let mut sums = [0.0f64; 3];
    let mut count = 0usize;
    for triple in books {
        if OddsTriple::new(triple[0], triple[1], triple[2]).is_ok() {
            for (s, v) in sums.iter_mut().zip(triple) {
                *s += v;
            }
            count += 1;
        }
    }
    if count == 0 {
        return Err(MarketError::OddsMissing);
    }
    let n = count as f64;
    OddsTriple::new(sums[0] / n, sums[1] / n, sums[2] / n)
}

#[derive(Debug, Clone, PartialEq)]
pub enum MarketError {
    /// An odds component was not a finite number greater than 1.0.
    InvalidOdds(f64),
    /// A row carried neither average columns nor a complete bookmaker triple.
    OddsMissing,
}

impl fmt::Display for MarketError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MarketError::InvalidOdds(v) => write!(f, "invalid decimal odds {v}: must be > 1.0"),
            MarketError::OddsMissing => write!(f, "odds missing: no usable odds source in row"),
        }
    }
}

impl core::error::Error for MarketError {}
