//! Round inference and period labelling.
//!
//! Source files carry no round column, so rounds are reconstructed from
//! per-team match counts: a team's n-th match of the season is its round-n
//! match. Postponed fixtures are caught by comparing the two teams' counts
//! and taking the larger one.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::data::{PeriodLabel, RawMatch, SeasonId};
use crate::date::Date;

/// Matches per complete Bundesliga season: 34 rounds of 9.
pub const SEASON_MATCHES: usize = 306;
/// Matches each team plays in a complete season.
pub const TEAM_MATCHES: usize = 34;

/// Default first day of closed-doors play in season 2019/20.
pub fn default_closed_doors_cutoff() -> Date {
    Date { year: 2020, month: 3, day: 10 }
}

/// Outcome of round inference for one season.
#[derive(Debug, Clone)]
pub struct RoundInference {
    /// Round per match, parallel to the input slice.
    pub rounds: Vec<u8>,
    /// One note per fixture whose teams had diverging prior-match counts.
    pub warnings: Vec<String>,
}

/// Infers round numbers for one season's matches, which must be sorted by
/// date. A match's round is one plus the larger of the two teams' prior
/// same-season match counts; a count mismatch (postponement) is recorded as
/// a warning. For a complete season every team must end on exactly 34
/// matches.
pub fn infer_rounds(season_matches: &[RawMatch]) -> Result<RoundInference, ScheduleError> {
    if season_matches.windows(2).any(|w| w[0].date > w[1].date) {
        return Err(ScheduleError::Unsorted);
    }
    fn bump(teams: &mut Vec<(String, usize)>, name: &str) -> usize {
        if let Some(entry) = teams.iter_mut().find(|(t, _)| t == name) {
            entry.1 += 1;
            entry.1 - 1
        } else {
            teams.push((String::from(name), 1));
            0
        }
    }
    let mut teams: Vec<(String, usize)> = Vec::new();
    let mut rounds = Vec::with_capacity(season_matches.len());
    let mut warnings = Vec::new();
    for m in season_matches {
        let home_prior = bump(&mut teams, &m.home_team);
        let away_prior = bump(&mut teams, &m.away_team);
        let round = home_prior.max(away_prior) as u8 + 1;
        if home_prior != away_prior {
            warnings.push(format!(
                "round {} inferred via max rule for {} vs {} on {}: home played {}, away played {}",
                round, m.home_team, m.away_team, m.date, home_prior, away_prior
            ));
        }
        rounds.push(round);
    }
    if season_matches.len() == SEASON_MATCHES {
        for (team, count) in &teams {
            if *count != TEAM_MATCHES {
                return Err(ScheduleError::TeamMatchCount {
                    team: team.clone(),
                    count: *count,
                });
            }
        }
    }
    Ok(RoundInference { rounds, warnings })
}

/// Assigns period labels given inferred rounds and the closed-doors cutoff.
/// Only the 2019/20 season can have closed-doors matches.
pub fn label_periods(
    season_matches: &[RawMatch],
    rounds: &[u8],
    cutoff: Date,
) -> Vec<PeriodLabel> {
    season_matches
        .iter()
        .zip(rounds)
        .map(|(m, &round)| PeriodLabel {
            after_round_25: round > 25,
            behind_closed_doors: m.season == SeasonId::COVID && m.date >= cutoff,
            round_after_25: round.saturating_sub(25).min(9),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleError {
    /// Input matches were not sorted by date.
    Unsorted,
    /// A team of a complete season did not play exactly 34 matches.
    TeamMatchCount { team: String, count: usize },
}

impl fmt::Display for ScheduleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleError::Unsorted => write!(f, "matches must be sorted by date"),
            ScheduleError::TeamMatchCount { team, count } => write!(
                f,
                "{team} has {count} matches in a complete season (expected {TEAM_MATCHES})"
            ),
        }
    }
}

impl core::error::Error for ScheduleError {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::MatchResult;
    use crate::market::OddsTriple;
    use alloc::string::ToString;
    use alloc::vec;

    fn raw(day: u8, home: &str, away: &str) -> RawMatch {
        RawMatch {
            season: SeasonId(5),
            date: Date::new(2019, 8, day).unwrap(),
            home_team: home.to_string(),
            away_team: away.to_string(),
            home_goals: 1,
            away_goals: 0,
            result: MatchResult::HomeWin,
            odds: OddsTriple::new(2.0, 3.5, 4.0).unwrap(),
        }
    }

    #[test]
    fn first_match_is_round_one() {
        let matches = vec![raw(16, "A", "B"), raw(17, "C", "D")];
        let inf = infer_rounds(&matches).unwrap();
        assert_eq!(inf.rounds, vec![1, 1]);
        assert!(inf.warnings.is_empty());
    }

    #[test]
    fn max_rule_emits_warning() {
        // C misses the first round, so its catch-up match against A sees
        // diverging prior counts and lands in round 2 via the max rule
        let matches = vec![raw(16, "A", "B"), raw(17, "C", "A")];
        let inf = infer_rounds(&matches).unwrap();
        assert_eq!(inf.rounds, vec![1, 2]);
        assert_eq!(inf.warnings.len(), 1);
        assert!(inf.warnings[0].contains("C vs A"));
    }

    #[test]
    fn unsorted_input_rejected() {
        let matches = vec![raw(17, "A", "B"), raw(16, "C", "D")];
        assert_eq!(infer_rounds(&matches).unwrap_err(), ScheduleError::Unsorted);
    }

    #[test]
    fn labels_follow_round_and_cutoff() {
        let mut matches = vec![raw(16, "A", "B")];
        matches[0].date = Date::new(2020, 3, 11).unwrap();
        let labels = label_periods(&matches, &[25], default_closed_doors_cutoff());
        assert!(!labels[0].after_round_25);
        assert!(labels[0].behind_closed_doors);
        assert_eq!(labels[0].round_after_25, 0);

        matches[0].date = Date::new(2020, 6, 5).unwrap();
        let labels = label_periods(&matches, &[30], default_closed_doors_cutoff());
        assert!(labels[0].after_round_25);
        assert!(labels[0].behind_closed_doors);
        assert_eq!(labels[0].round_after_25, 5);

        // earlier seasons never go behind closed doors
        matches[0].season = SeasonId(0);
        matches[0].date = Date::new(2015, 3, 20).unwrap();
        let labels = label_periods(&matches, &[26], default_closed_doors_cutoff());
        assert!(labels[0].after_round_25);
        assert!(!labels[0].behind_closed_doors);
        assert_eq!(labels[0].round_after_25, 1);
    }
}
