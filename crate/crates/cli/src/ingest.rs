//! Raw season-file ingestion: football-data style CSV to canonical dataset.
//!
//! The parser is header-driven, so it copes with the layout drift across
//! seasons (2-digit vs 4-digit years, `BbAvH` vs `AvgH` market averages, the
//! extra `Time` column of newer files). Odds are consolidated per row:
//! market-average columns when present, otherwise the mean over all complete
//! individual bookmaker triples.

use std::fmt;
use std::path::{Path, PathBuf};

use geist_core::data::{Dataset, MatchRecord, MatchResult, RawMatch, SeasonId};
use geist_core::date::Date;
use geist_core::market::{self, MarketError};
use geist_core::schedule::{self, ScheduleError};

/// Bookmaker column prefixes seen across the supported seasons.
const BOOK_PREFIXES: [&str; 10] =
    ["B365", "BW", "IW", "LB", "PS", "SJ", "VC", "WH", "GB", "BS"];

/// Minimum acceptable pairwise correlation between bookmakers' odds.
const CORRELATION_GATE: f64 = 0.9;

#[derive(Debug)]
pub enum IngestError {
    MissingColumn { file: String, column: String },
    BadDate { file: String, line: u64, value: String },
    UnsupportedSeason { file: String, label: String },
    DuplicateSeason { label: String },
    Empty { file: String },
    Io { file: String, source: std::io::Error },
    Csv { file: String, source: csv::Error },
    Schedule { season: String, source: ScheduleError },
    Market(MarketError),
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IngestError::MissingColumn { file, column } => {
                write!(f, "{file}: header is missing required column `{column}`")
            }
            IngestError::BadDate { file, line, value } => {
                write!(f, "{file}:{line}: unparseable date `{value}`")
            }
            IngestError::UnsupportedSeason { file, label } => {
                write!(f, "{file}: season {label} outside supported range 2014/15..2019/20")
            }
            IngestError::DuplicateSeason { label } => {
                write!(f, "season {label} supplied more than once")
            }
            IngestError::Empty { file } => write!(f, "{file}: no playable rows"),
            IngestError::Io { file, source } => write!(f, "{file}: {source}"),
            IngestError::Csv { file, source } => write!(f, "{file}: {source}"),
            IngestError::Schedule { season, source } => {
                write!(f, "season {season}: {source}")
            }
            IngestError::Market(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for IngestError {}

/// One parsed season file before round inference.
#[derive(Debug)]
pub struct SeasonFile {
    pub season: SeasonId,
    pub raws: Vec<RawMatch>,
    pub notes: Vec<String>,
}

struct ColumnMap {
    date: usize,
    home: usize,
    away: usize,
    home_goals: usize,
    away_goals: usize,
    result: Option<usize>,
    average: Option<[usize; 3]>,
    books: Vec<(String, [usize; 3])>,
}

fn map_columns(file: &str, headers: &csv::StringRecord) -> Result<ColumnMap, IngestError> {
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);
    let require = |name: &str| {
        find(name).ok_or_else(|| IngestError::MissingColumn {
            file: file.to_string(),
            column: name.to_string(),
        })
    };
    let triple = |h: &str, d: &str, a: &str| match (find(h), find(d), find(a)) {
        (Some(x), Some(y), Some(z)) => Some([x, y, z]),
        _ => None,
    };

    let average = triple("AvgH", "AvgD", "AvgA").or_else(|| triple("BbAvH", "BbAvD", "BbAvA"));
    let books = BOOK_PREFIXES
        .iter()
        .filter_map(|p| {
            triple(&format!("{p}H"), &format!("{p}D"), &format!("{p}A"))
                .map(|idx| (p.to_string(), idx))
        })
        .collect();

    Ok(ColumnMap {
        date: require("Date")?,
        home: require("HomeTeam")?,
        away: require("AwayTeam")?,
        home_goals: require("FTHG")?,
        away_goals: require("FTAG")?,
        result: find("FTR"),
        average,
        books,
    })
}

/// Parses `16/05/2020` and `22/08/14` style dates.
fn parse_date(value: &str) -> Option<Date> {
    let mut parts = value.trim().split('/');
    let day: u8 = parts.next()?.parse().ok()?;
    let month: u8 = parts.next()?.parse().ok()?;
    let year_raw = parts.next()?;
    if parts.next().is_some() {
        return None;
    }
    let year: i32 = year_raw.parse().ok()?;
    let year = if year_raw.len() <= 2 { 2000 + year } else { year };
    Date::new(year, month, day)
}

fn field<'a>(record: &'a csv::StringRecord, idx: usize) -> &'a str {
    record.get(idx).unwrap_or("").trim()
}

fn odds_triple(record: &csv::StringRecord, idx: [usize; 3]) -> Option<[f64; 3]> {
    let mut out = [0.0; 3];
    for (slot, i) in out.iter_mut().zip(idx) {
        *slot = field(record, i).parse().ok()?;
    }
    Some(out)
}

fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 10 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Parses one raw season CSV into playable matches plus provenance notes.
/// Unplayable rows (missing result or odds) are dropped and logged, a broken
/// header or date is fatal.
pub fn parse_season_file(path: &Path) -> Result<SeasonFile, IngestError> {
    let file = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|source| IngestError::Csv { file: file.clone(), source })?;
    let headers = reader
        .headers()
        .map_err(|source| IngestError::Csv { file: file.clone(), source })?
        .clone();
    let columns = map_columns(&file, &headers)?;

    let mut raws: Vec<RawMatch> = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    let mut dropped = 0usize;
    let mut used_average = 0usize;
    let mut used_fallback = 0usize;
    // per-book (home, away) odds streams for the correlation gate
    let mut book_streams: Vec<(Vec<f64>, Vec<f64>)> =
        vec![(Vec::new(), Vec::new()); columns.books.len()];

    for (row_index, record) in reader.records().enumerate() {
        let line = row_index as u64 + 2; // header is line 1
        let record = record.map_err(|source| IngestError::Csv { file: file.clone(), source })?;
        if record.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        let date_raw = field(&record, columns.date);
        if date_raw.is_empty() {
            dropped += 1;
            notes.push(format!("{file}:{line}: dropped (no date)"));
            continue;
        }
        let date = parse_date(date_raw).ok_or_else(|| IngestError::BadDate {
            file: file.clone(),
            line,
            value: date_raw.to_string(),
        })?;
        let home_team = field(&record, columns.home).to_string();
        let away_team = field(&record, columns.away).to_string();
        if home_team.is_empty() || away_team.is_empty() || home_team == away_team {
            dropped += 1;
            notes.push(format!("{file}:{line}: dropped (bad team names)"));
            continue;
        }
        let goals = (
            field(&record, columns.home_goals).parse::<u8>(),
            field(&record, columns.away_goals).parse::<u8>(),
        );
        let (home_goals, away_goals) = match goals {
            (Ok(h), Ok(a)) => (h, a),
            _ => {
                dropped += 1;
                notes.push(format!("{file}:{line}: dropped (missing result)"));
                continue;
            }
        };
        let result = MatchResult::from_goals(home_goals, away_goals);
        if let Some(ftr_idx) = columns.result {
            let ftr = field(&record, ftr_idx);
            if !ftr.is_empty() && ftr.chars().next() != Some(result.as_char()) {
                notes.push(format!(
                    "{file}:{line}: FTR `{ftr}` disagrees with goals {home_goals}-{away_goals}; goals win"
                ));
            }
        }

        let average = columns.average.and_then(|idx| odds_triple(&record, idx));
        let books: Vec<[f64; 3]> = columns
            .books
            .iter()
            .filter_map(|(_, idx)| odds_triple(&record, *idx))
            .collect();
        let odds = match market::consolidate_odds(average, &books) {
            Ok(odds) => {
                if average.is_some() {
                    used_average += 1;
                } else {
                    used_fallback += 1;
                }
                odds
            }
            Err(MarketError::OddsMissing) => {
                dropped += 1;
                notes.push(format!("{file}:{line}: dropped (odds missing)"));
                continue;
            }
            Err(e) => return Err(IngestError::Market(e)),
        };

        for (stream, (_, idx)) in book_streams.iter_mut().zip(&columns.books) {
            if let Some([h, _, a]) = odds_triple(&record, *idx) {
                stream.0.push(h);
                stream.1.push(a);
            }
        }

        raws.push(RawMatch {
            season: SeasonId(0), // patched below once the season is known
            date,
            home_team,
            away_team,
            home_goals,
            away_goals,
            result,
            odds,
        });
    }

    if raws.is_empty() {
        return Err(IngestError::Empty { file });
    }

    // season from the earliest date: July onward starts a season
    let first = raws.iter().map(|r| r.date).min().unwrap();
    let start_year = if first.month >= 7 { first.year } else { first.year - 1 };
    let index = start_year - 2014;
    if !(0..=5).contains(&index) {
        return Err(IngestError::UnsupportedSeason {
            file,
            label: format!("{}/{:02}", start_year, (start_year + 1) % 100),
        });
    }
    let season = SeasonId(index as u8);
    for raw in &mut raws {
        raw.season = season;
    }

    // sanity gate: different books must quote near-identical odds
    let mut min_corr: Option<f64> = None;
    for i in 0..book_streams.len() {
        for j in (i + 1)..book_streams.len() {
            if book_streams[i].0.len() != book_streams[j].0.len() {
                continue;
            }
            for (a, b) in [
                (&book_streams[i].0, &book_streams[j].0),
                (&book_streams[i].1, &book_streams[j].1),
            ] {
                if let Some(c) = pearson(a, b) {
                    min_corr = Some(min_corr.map_or(c, |m: f64| m.min(c)));
                }
            }
        }
    }
    let mut summary = format!(
        "{file}: season {}, {} matches, {dropped} rows dropped, odds source: {used_average} average / {used_fallback} bookmaker mean",
        season.label(),
        raws.len()
    );
    if let Some(c) = min_corr {
        summary.push_str(&format!(", min bookmaker odds correlation {c:.3}"));
        if c < CORRELATION_GATE {
            notes.push(format!(
                "{file}: WARNING bookmaker odds correlation {c:.3} below {CORRELATION_GATE}"
            ));
        }
    }
    notes.insert(0, summary);

    Ok(SeasonFile { season, raws, notes })
}

/// Parses all season files, infers rounds, labels periods and assembles the
/// canonical dataset, ordered by (season, date, home team).
pub fn ingest(paths: &[PathBuf], cutoff: Date) -> Result<Dataset, IngestError> {
    let mut files: Vec<SeasonFile> = Vec::new();
    for path in paths {
        if !path.exists() {
            return Err(IngestError::Io {
                file: path.display().to_string(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
            });
        }
        let parsed = parse_season_file(path)?;
        if files.iter().any(|f| f.season == parsed.season) {
            return Err(IngestError::DuplicateSeason { label: parsed.season.label() });
        }
        files.push(parsed);
    }
    files.sort_by_key(|f| f.season);

    let mut dataset = Dataset::default();
    for file in &mut files {
        dataset.provenance.append(&mut file.notes);
        let mut raws = std::mem::take(&mut file.raws);
        raws.sort_by(|a, b| (a.date, a.home_team.as_str()).cmp(&(b.date, b.home_team.as_str())));
        let inference = schedule::infer_rounds(&raws).map_err(|source| {
            IngestError::Schedule { season: file.season.label(), source }
        })?;
        for w in &inference.warnings {
            dataset
                .provenance
                .push(format!("season {}: {w}", file.season.label()));
        }
        let labels = schedule::label_periods(&raws, &inference.rounds, cutoff);
        for ((raw, round), period) in raws.into_iter().zip(inference.rounds).zip(labels) {
            dataset.matches.push(MatchRecord::from_raw(raw, round, period));
        }
    }
    dataset.sort_canonical();
    Ok(dataset)
}
