//! The canonical dataset file: a versioned, self-describing TSV consumed by
//! every analysis subcommand, plus the line-oriented provenance log.
//!
//! Writing is deterministic: the same dataset always produces the same
//! bytes, which is what makes `report` runs byte-reproducible.

use std::fmt::Write as _;
use std::path::Path;

use geist_core::data::{Dataset, MatchRecord, MatchResult, PeriodLabel, SeasonId};
use geist_core::date::Date;
use geist_core::market::OddsTriple;

use crate::error::CliError;

const FORMAT_HEADER: &str = "# geist dataset v1";
const COLUMNS: &str = "season\tdate\thome_team\taway_team\thome_goals\taway_goals\tresult\todds_home\todds_draw\todds_away\tround\tafter_round_25\tbehind_closed_doors\tround_after_25";

/// Serialises a dataset to the canonical text format.
pub fn to_string(dataset: &Dataset) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{FORMAT_HEADER}");
    let _ = writeln!(out, "# matches: {}", dataset.matches.len());
    let _ = writeln!(out, "{COLUMNS}");
    for m in &dataset.matches {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            m.season.0,
            m.date,
            m.home_team,
            m.away_team,
            m.home_goals,
            m.away_goals,
            m.result.as_char(),
            m.odds.home,
            m.odds.draw,
            m.odds.away,
            m.round,
            m.period.after_round_25 as u8,
            m.period.behind_closed_doors as u8,
            m.period.round_after_25,
        );
    }
    out
}

pub fn write(dataset: &Dataset, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, to_string(dataset))?;
    Ok(())
}

pub fn write_provenance(dataset: &Dataset, path: &Path) -> Result<(), CliError> {
    let mut out = String::new();
    for line in &dataset.provenance {
        let _ = writeln!(out, "{line}");
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn parse_iso_date(value: &str) -> Option<Date> {
    let mut parts = value.split('-');
    let year = parts.next()?.parse().ok()?;
    let month = parts.next()?.parse().ok()?;
    let day = parts.next()?.parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    Date::new(year, month, day)
}

/// Loads a dataset file written by [`write`].
pub fn read(path: &Path) -> Result<Dataset, CliError> {
    let file = path.display().to_string();
    let content = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("{file}: {e}")))?;
    let mut lines = content.lines().enumerate();
    match lines.next() {
        Some((_, line)) if line == FORMAT_HEADER => {}
        _ => {
            return Err(CliError::Data(format!(
                "{file}: not a geist dataset (missing `{FORMAT_HEADER}` header)"
            )))
        }
    }

    let mut dataset = Dataset::default();
    let bad = |i: usize, what: &str| CliError::Data(format!("{file}:{}: {what}", i + 1));
    for (i, line) in lines {
        if line.is_empty() || line.starts_with('#') || line == COLUMNS {
            continue;
        }
        let parts: Vec<&str> = line.split('\t').collect();
        if parts.len() != 14 {
            return Err(bad(i, "expected 14 tab-separated fields"));
        }
        let season: u8 = parts[0].parse().map_err(|_| bad(i, "bad season index"))?;
        let date = parse_iso_date(parts[1]).ok_or_else(|| bad(i, "bad date"))?;
        let home_goals: u8 = parts[4].parse().map_err(|_| bad(i, "bad home goals"))?;
        let away_goals: u8 = parts[5].parse().map_err(|_| bad(i, "bad away goals"))?;
        let result = parts[6]
            .chars()
            .next()
            .and_then(MatchResult::from_char)
            .ok_or_else(|| bad(i, "bad result"))?;
        if result != MatchResult::from_goals(home_goals, away_goals) {
            return Err(bad(i, "result inconsistent with goals"));
        }
        let odds = OddsTriple::new(
            parts[7].parse().map_err(|_| bad(i, "bad odds"))?,
            parts[8].parse().map_err(|_| bad(i, "bad odds"))?,
            parts[9].parse().map_err(|_| bad(i, "bad odds"))?,
        )
        .map_err(|e| bad(i, &e.to_string()))?;
        let round: u8 = parts[10].parse().map_err(|_| bad(i, "bad round"))?;
        if !(1..=34).contains(&round) {
            return Err(bad(i, "round outside 1..=34"));
        }
        dataset.matches.push(MatchRecord {
            season: SeasonId(season),
            date,
            home_team: parts[2].to_string(),
            away_team: parts[3].to_string(),
            home_goals,
            away_goals,
            result,
            odds,
            round,
            period: PeriodLabel {
                after_round_25: parts[11] == "1",
                behind_closed_doors: parts[12] == "1",
                round_after_25: parts[13].parse().map_err(|_| bad(i, "bad round_after_25"))?,
            },
        });
    }
    if dataset.matches.is_empty() {
        return Err(CliError::Data(format!("{file}: dataset contains no matches")));
    }
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Dataset {
        Dataset {
            matches: vec![MatchRecord {
                season: SeasonId(5),
                date: Date::new(2020, 5, 16).unwrap(),
                home_team: "Dortmund".to_string(),
                away_team: "Schalke 04".to_string(),
                home_goals: 4,
                away_goals: 0,
                result: MatchResult::HomeWin,
                odds: OddsTriple::new(1.43, 4.9, 7.1).unwrap(),
                round: 26,
                period: PeriodLabel {
                    after_round_25: true,
                    behind_closed_doors: true,
                    round_after_25: 1,
                },
            }],
            provenance: vec!["note".to_string()],
        }
    }

    #[test]
    fn round_trips() {
        let dataset = sample();
        let path = std::env::temp_dir().join(format!("geist_store_{}.tsv", std::process::id()));
        write(&dataset, &path).unwrap();
        let loaded = read(&path).unwrap();
        std::fs::remove_file(&path).unwrap();
        assert_eq!(loaded.matches.len(), 1);
        let m = &loaded.matches[0];
        assert_eq!(m.home_team, "Dortmund");
        assert_eq!(m.odds, dataset.matches[0].odds);
        assert_eq!(m.period, dataset.matches[0].period);
        assert_eq!(m.round, 26);
    }

    #[test]
    fn serialisation_is_stable() {
        let dataset = sample();
        assert_eq!(to_string(&dataset), to_string(&dataset));
        assert!(to_string(&dataset).starts_with(FORMAT_HEADER));
    }

    #[test]
    fn rejects_foreign_files() {
        let path = std::env::temp_dir().join(format!("geist_store_bad_{}.tsv", std::process::id()));
        std::fs::write(&path, "Date,HomeTeam\n").unwrap();
        let err = read(&path).unwrap_err();
        std::fs::remove_file(&path).unwrap();
        assert!(err.to_string().contains("not a geist dataset"));
    }
}
