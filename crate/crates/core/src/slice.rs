//! Dataset slices: the season/round/spectator subsets every table and
//! backtest is computed over.

use alloc::string::String;
use alloc::vec::Vec;

use crate::data::MatchRecord;

/// Round predicate of a slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundFilter {
    Any,
    /// Rounds 1..=n.
    UpTo(u8),
    /// Rounds n+1..
    After(u8),
}

/// Spectator predicate of a slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectatorFilter {
    Any,
    With,
    Without,
}

/// A subset of the dataset: a season range plus round and spectator
/// predicates. The same slice objects drive the descriptive tables and the
/// backtests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceSpec {
    pub label: String,
    /// Inclusive range of season indices.
    pub seasons: (u8, u8),
    pub rounds: RoundFilter,
    pub spectators: SpectatorFilter,
}

impl SliceSpec {
    pub fn new(
        label: &str,
        seasons: (u8, u8),
        rounds: RoundFilter,
        spectators: SpectatorFilter,
    ) -> SliceSpec {
        SliceSpec { label: String::from(label), seasons, rounds, spectators }
    }

    pub fn contains(&self, m: &MatchRecord) -> bool {
        if m.season.0 < self.seasons.0 || m.season.0 > self.seasons.1 {
            return false;
        }
        let round_ok = match self.rounds {
            RoundFilter::Any => true,
            RoundFilter::UpTo(n) => m.round <= n,
            RoundFilter::After(n) => m.round > n,
        };
        let spectators_ok = match self.spectators {
            SpectatorFilter::Any => true,
            SpectatorFilter::With => !m.period.behind_closed_doors,
            SpectatorFilter::Without => m.period.behind_closed_doors,
        };
        round_ok && spectators_ok
    }

    pub fn select<'a>(&self, matches: &'a [MatchRecord]) -> Vec<&'a MatchRecord> {
        matches.iter().filter(|m| self.contains(m)).collect()
    }
}

/// The four canonical comparison slices: the five reference seasons split at
/// round 25, and 2019/20 split by spectator presence.
pub fn canonical_slices() -> [SliceSpec; 4] {
    [
        SliceSpec::new(
            "Seasons 2014/15-2018/19 Round 1-25",
            (0, 4),
            RoundFilter::UpTo(25),
            SpectatorFilter::Any,
        ),
        SliceSpec::new(
            "Seasons 2014/15-2018/19 Round 26-34",
            (0, 4),
            RoundFilter::After(25),
            SpectatorFilter::Any,
        ),
        SliceSpec::new(
            "Season 2019/20 with spectators",
            (5, 5),
            RoundFilter::Any,
            SpectatorFilter::With,
        ),
        SliceSpec::new(
            "Season 2019/20 without spectators",
            (5, 5),
            RoundFilter::Any,
            SpectatorFilter::Without,
        ),
    ]
}

/// Named slice lookup used by the CLI (`--slice` flag values).
pub fn slice_by_name(name: &str) -> Option<SliceSpec> {
    let canonical = canonical_slices();
    match name {
        "prior-early" => Some(canonical[0].clone()),
        "prior-late" => Some(canonical[1].clone()),
        "spectators" => Some(canonical[2].clone()),
        "covid" | "closed-doors" => Some(canonical[3].clone()),
        "all" => Some(SliceSpec::new(
            "All seasons",
            (0, 5),
            RoundFilter::Any,
            SpectatorFilter::Any,
        )),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{MatchResult, PeriodLabel, SeasonId};
    use crate::date::Date;
    use crate::market::OddsTriple;
    use alloc::string::ToString;

    fn record(season: u8, round: u8, closed: bool) -> MatchRecord {
        MatchRecord {
            season: SeasonId(season),
            date: Date::new(2020, 1, 1).unwrap(),
            home_team: "A".to_string(),
            away_team: "B".to_string(),
            home_goals: 1,
            away_goals: 1,
            result: MatchResult::Draw,
            odds: OddsTriple::new(2.0, 3.5, 4.0).unwrap(),
            round,
            period: PeriodLabel {
                after_round_25: round > 25,
                behind_closed_doors: closed,
                round_after_25: round.saturating_sub(25),
            },
        }
    }

    #[test]
    fn canonical_slices_partition() {
        let slices = canonical_slices();
        let cases = [
            record(0, 10, false),
            record(3, 30, false),
            record(5, 20, false),
            record(5, 25, true),
            record(5, 30, true),
        ];
        for m in &cases {
            let hits = slices.iter().filter(|s| s.contains(m)).count();
            assert_eq!(hits, 1, "each match belongs to exactly one slice");
        }
    }

    #[test]
    fn slice_names_resolve() {
        assert!(slice_by_name("covid").is_some());
        assert!(slice_by_name("prior-early").is_some());
        assert!(slice_by_name("nope").is_none());
    }
}
