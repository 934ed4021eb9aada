//! Writes the synthesised seasons as football-data style CSV files,
//! reproducing the layout drift across seasons: 2-digit years and Betbrain
//! aggregate columns early, 4-digit years with a Time column and Max/Avg
//! columns for 2019/20. Files are CRLF-terminated like the originals.

use std::fmt::Write as _;
use std::path::Path;

use geist_core::date::Date;

use crate::calendar::weekday;
use crate::rng::SplitMix64;
use crate::synth::{Plan, Synth};

const OLD_HEADER: &str = "Div,Date,HomeTeam,AwayTeam,FTHG,FTAG,FTR,HTHG,HTAG,HTR,\
B365H,B365D,B365A,BWH,BWD,BWA,IWH,IWD,IWA,WHH,WHD,WHA,VCH,VCD,VCA,\
Bb1X2,BbMxH,BbAvH,BbMxD,BbAvD,BbMxA,BbAvA";

const NEW_HEADER: &str = "Div,Date,Time,HomeTeam,AwayTeam,FTHG,FTAG,FTR,HTHG,HTAG,HTR,\
B365H,B365D,B365A,BWH,BWD,BWA,IWH,IWD,IWA,WHH,WHD,WHA,VCH,VCD,VCA,\
MaxH,MaxD,MaxA,AvgH,AvgD,AvgA";

fn round2(x: f64) -> f64 {
    libm::round(x * 100.0) / 100.0
}

fn result_char(outcome: u8) -> char {
    match outcome {
        crate::synth::OUT_HOME => 'H',
        crate::synth::OUT_AWAY => 'A',
        _ => 'D',
    }
}

/// Five quoted bookmakers jittered around the consolidated odds.
fn book_quotes(odds: [f64; 3], rng: &mut SplitMix64) -> [[f64; 3]; 5] {
    let mut books = [[0.0; 3]; 5];
    for book in books.iter_mut() {
        for (slot, base) in book.iter_mut().zip(odds) {
            let delta = (0.012 * rng.normal()).clamp(-0.035, 0.035);
            *slot = round2((base * (1.0 + delta)).max(1.01));
        }
    }
    books
}

fn half_time(goals: (u8, u8), rng: &mut SplitMix64) -> (u8, u8) {
    let mut ht = (0u8, 0u8);
    for _ in 0..goals.0 {
        if rng.uniform() < 0.45 {
            ht.0 += 1;
        }
    }
    for _ in 0..goals.1 {
        if rng.uniform() < 0.45 {
            ht.1 += 1;
        }
    }
    ht
}

fn kickoff(date: Date, rng: &mut SplitMix64) -> &'static str {
    match weekday(date) {
        4 => "20:30",
        5 => {
            if rng.uniform() < 0.15 {
                "18:30"
            } else {
                "15:30"
            }
        }
        6 => {
            if rng.uniform() < 0.5 {
                "15:30"
            } else {
                "18:00"
            }
        }
        _ => "20:30",
    }
}

fn format_date(date: Date, four_digit_year: bool) -> String {
    if four_digit_year {
        format!("{:02}/{:02}/{:04}", date.day, date.month, date.year)
    } else {
        format!("{:02}/{:02}/{:02}", date.day, date.month, date.year % 100)
    }
}

fn push_odds(row: &mut String, odds: &[f64]) {
    for o in odds {
        let _ = write!(row, ",{o:.2}");
    }
}

fn emit_row(plan: &Plan, new_layout: bool, rng: &mut SplitMix64) -> String {
    let f = &plan.fixture;
    let books = book_quotes(plan.odds, rng);
    let ht = half_time(plan.goals, rng);
    let max_markup = 1.005 + 0.03 * rng.uniform();
    let maxima: Vec<f64> = (0..3)
        .map(|k| {
            let best = books.iter().map(|b| b[k]).fold(f64::MIN, f64::max);
            round2(best * max_markup)
        })
        .collect();

    let mut row = String::from("D1,");
    row.push_str(&format_date(f.date, new_layout));
    if new_layout {
        row.push(',');
        row.push_str(kickoff(f.date, rng));
    }
    let _ = write!(
        row,
        ",{},{},{},{},{},{},{},{}",
        f.home,
        f.away,
        plan.goals.0,
        plan.goals.1,
        result_char(plan.outcome),
        ht.0,
        ht.1,
        result_char(match ht.0.cmp(&ht.1) {
            std::cmp::Ordering::Greater => crate::synth::OUT_HOME,
            std::cmp::Ordering::Equal => crate::synth::OUT_DRAW,
            std::cmp::Ordering::Less => crate::synth::OUT_AWAY,
        })
    );
    for book in &books {
        push_odds(&mut row, book);
    }
    if new_layout {
        // MaxH,MaxD,MaxA,AvgH,AvgD,AvgA
        push_odds(&mut row, &maxima);
        push_odds(&mut row, &plan.odds);
    } else {
        // Bb1X2,BbMxH,BbAvH,BbMxD,BbAvD,BbMxA,BbAvA
        let books_count = 35 + rng.below(21);
        let _ = write!(row, ",{books_count}");
        for k in 0..3 {
            let _ = write!(row, ",{:.2},{:.2}", maxima[k], plan.odds[k]);
        }
    }
    row
}

/// Writes one CSV per season into `dir`, returning the file paths.
pub fn write_files(synth: &Synth, dir: &Path, rng: &mut SplitMix64) -> Vec<std::path::PathBuf> {
    std::fs::create_dir_all(dir).expect("fixture dir");
    let mut paths = Vec::new();
    for season in 0..6u8 {
        let new_layout = season == 5;
        let start = 14 + season as u32;
        let name = format!("D1_{start}{}.csv", start + 1);
        let path = dir.join(&name);
        let mut content = String::new();
        content.push_str(if new_layout { NEW_HEADER } else { OLD_HEADER });
        content.push_str("\r\n");
        let mut plans: Vec<&Plan> = synth
            .plans
            .iter()
            .filter(|p| p.fixture.season == season)
            .collect();
        plans.sort_by(|a, b| {
            (a.fixture.date, a.fixture.home.as_str()).cmp(&(b.fixture.date, b.fixture.home.as_str()))
        });
        for plan in plans {
            content.push_str(&emit_row(plan, new_layout, rng));
            content.push_str("\r\n");
        }
        std::fs::write(&path, content).expect("write fixture");
        paths.push(path);
    }
    paths
}
