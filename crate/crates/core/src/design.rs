//! Regression dataset construction: per-side bet observations and the fixed
//! design matrices of the two bet-win models and the margin model.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::data::{Dataset, Side};
use crate::linalg::Matrix;
use crate::market::{self, MarketError};

/// One (match, side) row of the bet-win regression: every match yields a
/// home-bet and an away-bet observation.
#[derive(Debug, Clone)]
pub struct BetObservation {
    /// Index into `Dataset::matches`.
    pub match_index: usize,
    pub side: Side,
    /// De-margined implied probability of the chosen side.
    pub implied_probability: f64,
    pub betting_after_round_25: bool,
    pub covid: bool,
    /// 0 for rounds 1-25, else round minus 25 (1..=9).
    pub round_after_25: u8,
    pub won: bool,
}

/// Builds the two observations per match, home side first.
pub fn build_bet_observations(dataset: &Dataset) -> Result<Vec<BetObservation>, MarketError> {
    let mut obs = Vec::with_capacity(dataset.matches.len() * 2);
    for (idx, m) in dataset.matches.iter().enumerate() {
        let probs = market::demargin(&m.odds)?;
        for (side, implied) in [(Side::Home, probs.home), (Side::Away, probs.away)] {
            obs.push(BetObservation {
                match_index: idx,
                side,
                implied_probability: implied,
                betting_after_round_25: m.period.after_round_25,
                covid: m.period.behind_closed_doors,
                round_after_25: m.period.round_after_25,
                won: side.wins(m.result),
            });
        }
    }
    Ok(obs)
}

/// Which bet-win model to build (model 2 adds the round terms).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelId {
    One,
    Two,
}

impl ModelId {
    pub fn from_number(n: u8) -> Option<ModelId> {
        match n {
            1 => Some(ModelId::One),
            2 => Some(ModelId::Two),
            _ => None,
        }
    }
}

/// A regression design: named columns (intercept first), one numeric row per
/// observation, and the response vector.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub columns: Vec<String>,
    pub x: Matrix,
    pub response: Vec<f64>,
}

pub const MODEL1_COLUMNS: [&str; 6] = [
    "intercept",
    "implied_probability",
    "away",
    "betting_after_round_25",
    "covid",
    "away_x_covid",
];

pub const MODEL2_COLUMNS: [&str; 8] = [
    "intercept",
    "implied_probability",
    "away",
    "betting_after_round_25",
    "covid",
    "away_x_covid",
    "round_after_25",
    "round_after_25_x_covid",
];

/// Builds the logistic design for model 1 or 2 from bet observations.
pub fn build_design(observations: &[BetObservation], model: ModelId) -> DesignMatrix {
    let columns: Vec<String> = match model {
        ModelId::One => MODEL1_COLUMNS.iter().map(|s| String::from(*s)).collect(),
        ModelId::Two => MODEL2_COLUMNS.iter().map(|s| String::from(*s)).collect(),
    };
    let mut rows = Vec::with_capacity(observations.len());
    let mut response = Vec::with_capacity(observations.len());
    for o in observations {
        let away = matches!(o.side, Side::Away) as u8 as f64;
        let covid = o.covid as u8 as f64;
        let mut row = vec![
            1.0,
            o.implied_probability,
            away,
            o.betting_after_round_25 as u8 as f64,
            covid,
            away * covid,
        ];
        if model == ModelId::Two {
            let round = o.round_after_25 as f64;
            row.push(round);
            row.push(round * covid);
        }
        rows.push(row);
        response.push(o.won as u8 as f64);
    }
    DesignMatrix { columns, x: Matrix::from_rows(&rows), response }
}

/// One match of the margin regression.
#[derive(Debug, Clone)]
pub struct MarginObservation {
    pub match_index: usize,
    pub margin: f64,
    pub abs_imp_prob_diff: f64,
    pub season_index: u8,
}

pub const MARGIN_COLUMNS: [&str; 3] = ["intercept", "abs_imp_prob_diff", "season"];

/// Builds the per-match margin observations.
pub fn build_margin_observations(
    dataset: &Dataset,
) -> Result<Vec<MarginObservation>, MarketError> {
    dataset
        .matches
        .iter()
        .enumerate()
        .map(|(idx, m)| {
            let probs = market::demargin(&m.odds)?;
            Ok(MarginObservation {
                match_index: idx,
                margin: market::margin(&m.odds)?,
                abs_imp_prob_diff: libm::fabs(market::imp_prob_diff(&probs)),
                season_index: m.season.0,
            })
        })
        .collect()
}

/// Design for the margin model: margin ~ |implied diff| + season index.
pub fn build_margin_design(observations: &[MarginObservation]) -> DesignMatrix {
    let rows: Vec<Vec<f64>> = observations
        .iter()
        .map(|o| vec![1.0, o.abs_imp_prob_diff, o.season_index as f64])
        .collect();
    DesignMatrix {
        columns: MARGIN_COLUMNS.iter().map(|s| String::from(*s)).collect(),
        x: Matrix::from_rows(&rows),
        response: observations.iter().map(|o| o.margin).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{MatchRecord, MatchResult, PeriodLabel, SeasonId};
    use crate::date::Date;
    use crate::market::OddsTriple;
    use alloc::string::ToString;

    fn one_match(result: MatchResult, closed: bool, round: u8) -> Dataset {
        Dataset {
            matches: vec![MatchRecord {
                season: SeasonId(5),
                date: Date::new(2020, 6, 6).unwrap(),
                home_team: "A".to_string(),
                away_team: "B".to_string(),
                home_goals: 1,
                away_goals: 1,
                result,
                odds: OddsTriple::new(2.0, 4.0, 4.0).unwrap(),
                round,
                period: PeriodLabel {
                    after_round_25: round > 25,
                    behind_closed_doors: closed,
                    round_after_25: round.saturating_sub(25),
                },
            }],
            provenance: vec![],
        }
    }

    #[test]
    fn two_observations_per_match() {
        let obs = build_bet_observations(&one_match(MatchResult::Draw, false, 10)).unwrap();
        assert_eq!(obs.len(), 2);
        assert!(!obs[0].won && !obs[1].won, "a draw loses both side bets");
        assert_eq!(obs[0].side, Side::Home);
        assert!((obs[0].implied_probability - 0.5).abs() < 1e-12);
        assert!((obs[1].implied_probability - 0.25).abs() < 1e-12);
    }

    #[test]
    fn home_win_marks_home_row_only() {
        let obs = build_bet_observations(&one_match(MatchResult::HomeWin, false, 10)).unwrap();
        assert!(obs[0].won && !obs[1].won);
    }

    #[test]
    fn design_coding_closed_doors_round_30() {
        let obs = build_bet_observations(&one_match(MatchResult::AwayWin, true, 30)).unwrap();
        let design = build_design(&obs, ModelId::Two);
        assert_eq!(design.columns.len(), 8);
        // away-side row: away=1, covid=1, away*covid=1, round=5, round*covid=5
        let row = design.x.row(1);
        assert_eq!(row[2], 1.0);
        assert_eq!(row[3], 1.0);
        assert_eq!(row[4], 1.0);
        assert_eq!(row[5], 1.0);
        assert_eq!(row[6], 5.0);
        assert_eq!(row[7], 5.0);
    }

    #[test]
    fn design_coding_prior_season_round_30() {
        let mut dataset = one_match(MatchResult::HomeWin, false, 30);
        dataset.matches[0].season = SeasonId(2);
        let obs = build_bet_observations(&dataset).unwrap();
        let design = build_design(&obs, ModelId::Two);
        let row = design.x.row(0);
        assert_eq!(row[4], 0.0, "covid flag");
        assert_eq!(row[5], 0.0, "away x covid");
        assert_eq!(row[6], 5.0, "round after 25");
        assert_eq!(row[7], 0.0, "round x covid");
    }

    #[test]
    fn model_column_counts() {
        let obs = build_bet_observations(&one_match(MatchResult::Draw, false, 1)).unwrap();
        assert_eq!(build_design(&obs, ModelId::One).columns.len(), 6);
        assert_eq!(build_design(&obs, ModelId::Two).columns.len(), 8);
    }
}
