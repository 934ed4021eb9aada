//! Match records and the canonical dataset shared by every analysis module.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::date::Date;
use crate::market::OddsTriple;

/// Ordinal season index: 0 = 2014/15 through 5 = 2019/20.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeasonId(pub u8);

impl SeasonId {
    /// The season that was cut by the spring 2020 suspension.
    pub const COVID: SeasonId = SeasonId(5);

    pub fn start_year(&self) -> i32 {
        2014 + self.0 as i32
    }

    /// Human label, e.g. `2014/15`.
    pub fn label(&self) -> String {
        let start = self.start_year();
        alloc::format!("{}/{:02}", start, (start + 1) % 100)
    }
}

/// Full-time result of a match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatchResult {
    HomeWin,
    Draw,
    AwayWin,
}

impl MatchResult {
    pub fn from_goals(home_goals: u8, away_goals: u8) -> MatchResult {
        use core::cmp::Ordering::*;
        match home_goals.cmp(&away_goals) {
            Greater => MatchResult::HomeWin,
            Equal => MatchResult::Draw,
            Less => MatchResult::AwayWin,
        }
    }

    pub fn as_char(&self) -> char {
        match self {
            MatchResult::HomeWin => 'H',
            MatchResult::Draw => 'D',
            MatchResult::AwayWin => 'A',
        }
    }

    pub fn from_char(c: char) -> Option<MatchResult> {
        match c {
            'H' => Some(MatchResult::HomeWin),
            'D' => Some(MatchResult::Draw),
            'A' => Some(MatchResult::AwayWin),
            _ => None,
        }
    }
}

/// Which team a bet is placed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Home,
    Away,
}

impl Side {
    pub fn wins(&self, result: MatchResult) -> bool {
        matches!(
            (self, result),
            (Side::Home, MatchResult::HomeWin) | (Side::Away, MatchResult::AwayWin)
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            Side::Home => "home",
            Side::Away => "away",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Period flags derived from the inferred round and the closed-doors cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PeriodLabel {
    /// True for matches of rounds 26-34.
    pub after_round_25: bool,
    /// True for 2019/20 matches played without spectators.
    pub behind_closed_doors: bool,
    /// `round - 25` clamped to 0..=9; 0 for every match of rounds 1-25.
    pub round_after_25: u8,
}

/// A parsed fixture before round inference and period labelling.
#[derive(Debug, Clone)]
pub struct RawMatch {
    pub season: SeasonId,
    pub date: Date,
    pub home_team: String,
    pub away_team: String,
    pub home_goals: u8,
    pub away_goals: u8,
    pub result: MatchResult,
    pub odds: OddsTriple,
}

/// A fully labelled fixture: one row of the canonical dataset.
#[derive(Debug, Clone)]
pub struct MatchRecord {
    pub season: SeasonId,
    pub date: Date,
    pub home_team: String,
    pub away_team: String,
    pub home_goals: u8,
    pub away_goals: u8,
    pub result: MatchResult,
    pub odds: OddsTriple,
    /// Round 1-34, inferred from per-team match counts.
    pub round: u8,
    pub period: PeriodLabel,
}

impl MatchRecord {
    pub fn from_raw(raw: RawMatch, round: u8, period: PeriodLabel) -> MatchRecord {
        MatchRecord {
            season: raw.season,
            date: raw.date,
            home_team: raw.home_team,
            away_team: raw.away_team,
            home_goals: raw.home_goals,
            away_goals: raw.away_goals,
            result: raw.result,
            odds: raw.odds,
            round,
            period,
        }
    }

    pub fn total_goals(&self) -> u8 {
        self.home_goals + self.away_goals
    }
}

/// All ingested matches plus line-oriented provenance notes
/// (rows dropped, odds sources, round-inference warnings).
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub matches: Vec<MatchRecord>,
    pub provenance: Vec<String>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.matches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matches.is_empty()
    }

    /// Stable canonical order: season, then date, then home team.
    pub fn sort_canonical(&mut self) {
        self.matches.sort_by(|a, b| {
            (a.season, a.date, a.home_team.as_str()).cmp(&(
                b.season,
                b.date,
                b.home_team.as_str(),
            ))
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn season_labels() {
        assert_eq!(SeasonId(0).label(), "2014/15");
        assert_eq!(SeasonId(5).label(), "2019/20");
    }

    #[test]
    fn result_from_goals() {
        assert_eq!(MatchResult::from_goals(4, 0), MatchResult::HomeWin);
        assert_eq!(MatchResult::from_goals(1, 1), MatchResult::Draw);
        assert_eq!(MatchResult::from_goals(0, 3), MatchResult::AwayWin);
    }

    #[test]
    fn side_wins() {
        assert!(Side::Home.wins(MatchResult::HomeWin));
        assert!(!Side::Home.wins(MatchResult::Draw));
        assert!(!Side::Away.wins(MatchResult::HomeWin));
        assert!(Side::Away.wins(MatchResult::AwayWin));
    }
}
