//! Season construction: rosters, a balanced double round-robin and the
//! calendar, including the 2019/20 suspension with its two postponed
//! fixtures.

use geist_core::date::Date;

use crate::calendar::{add_days, first_friday_on_or_after};
use crate::rng::SplitMix64;

pub const TEAMS_PER_SEASON: usize = 18;
pub const ROUNDS: usize = 34;

/// One scheduled fixture.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub season: u8,
    /// Scheduled round, 1-based. For the two postponed 2019/20 fixtures this
    /// is the original round, not the one round inference later assigns.
    pub round: u8,
    pub date: Date,
    pub home: String,
    pub away: String,
    /// Set for 2019/20 matches played without spectators.
    pub closed_doors: bool,
}

fn rosters() -> [Vec<&'static str>; 6] {
    let s0 = vec![
        "Bayern Munich", "Wolfsburg", "M'gladbach", "Leverkusen", "Augsburg", "Schalke 04",
        "Dortmund", "Hoffenheim", "Ein Frankfurt", "Werder Bremen", "Mainz", "FC Koln",
        "Hannover", "Stuttgart", "Hertha", "Hamburg", "Freiburg", "Paderborn",
    ];
    let swap = |base: &[&'static str], out: &[&str], inn: &[&'static str]| -> Vec<&'static str> {
        let mut next: Vec<&'static str> =
            base.iter().filter(|t| !out.contains(&&***t)).copied().collect();
        next.extend_from_slice(inn);
        next
    };
    let s1 = swap(&s0, &["Freiburg", "Paderborn"], &["Darmstadt", "Ingolstadt"]);
    let s2 = swap(&s1, &["Hannover", "Stuttgart"], &["Freiburg", "RB Leipzig"]);
    let s3 = swap(&s2, &["Darmstadt", "Ingolstadt"], &["Stuttgart", "Hannover"]);
    let s4 = swap(&s3, &["FC Koln", "Hamburg"], &["Fortuna Dusseldorf", "Nurnberg"]);
    let s5 = swap(
        &s4,
        &["Hannover", "Stuttgart", "Nurnberg"],
        &["FC Koln", "Paderborn", "Union Berlin"],
    );
    [s0, s1, s2, s3, s4, s5]
}

/// Balanced double round-robin over abstract slots 0..18 via the circle
/// method: 17 rounds, then the mirror with venues swapped. Every slot plays
/// once per round and ends on 17 home / 17 away matches.
fn round_robin(rng: &mut SplitMix64) -> Vec<Vec<(usize, usize)>> {
    let n = TEAMS_PER_SEASON;
    let mut order: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut order);

    let mut first_half: Vec<Vec<(usize, usize)>> = Vec::with_capacity(n - 1);
    for r in 0..(n - 1) {
        let mut pairs = Vec::with_capacity(n / 2);
        let wheel = |i: usize| order[(r + i) % (n - 1)];
        if r % 2 == 0 {
            pairs.push((order[n - 1], wheel(0)));
        } else {
            pairs.push((wheel(0), order[n - 1]));
        }
        for k in 1..n / 2 {
            let a = wheel(k);
            let b = order[(r + n - 1 - k) % (n - 1)];
            if k % 2 == 0 {
                pairs.push((a, b));
            } else {
                pairs.push((b, a));
            }
        }
        first_half.push(pairs);
    }
    let mut rounds = first_half.clone();
    for pairs in &first_half {
        rounds.push(pairs.iter().map(|&(h, a)| (a, h)).collect());
    }
    rounds
}

fn validate_schedule(rounds: &[Vec<(usize, usize)>]) {
    assert_eq!(rounds.len(), ROUNDS);
    let mut home_counts = [0usize; TEAMS_PER_SEASON];
    let mut met = std::collections::BTreeSet::new();
    for pairs in rounds {
        assert_eq!(pairs.len(), TEAMS_PER_SEASON / 2);
        let mut seen = [false; TEAMS_PER_SEASON];
        for &(h, a) in pairs {
            assert!(!seen[h] && !seen[a], "team plays twice in a round");
            seen[h] = true;
            seen[a] = true;
            home_counts[h] += 1;
            assert!(met.insert((h, a)), "duplicate pairing");
        }
    }
    assert!(home_counts.iter().all(|&c| c == ROUNDS / 2), "unbalanced venues");
}

/// Maps abstract slots to team names. For 2019/20 the restart opener slot
/// pair becomes the Dortmund vs Schalke fixture so the famous 16 May 2020
/// row exists in the file.
fn assign_names(
    season: usize,
    teams: &[&'static str],
    rounds: &[Vec<(usize, usize)>],
    rng: &mut SplitMix64,
) -> Vec<&'static str> {
    let mut names: Vec<Option<&'static str>> = vec![None; TEAMS_PER_SEASON];
    let mut pool: Vec<&'static str> = teams.to_vec();
    if season == 5 {
        let (h, a) = rounds[25][0];
        names[h] = Some("Dortmund");
        names[a] = Some("Schalke 04");
        pool.retain(|t| *t != "Dortmund" && *t != "Schalke 04");
    }
    rng.shuffle(&mut pool);
    let mut pool = pool.into_iter();
    names
        .into_iter()
        .map(|slot| slot.unwrap_or_else(|| pool.next().expect("enough names")))
        .collect()
}

/// Friday of round `r` (1-based) for a reference season starting in August.
fn prior_season_round_friday(start_year: i32, round: usize) -> Date {
    if round <= 17 {
        let opener = first_friday_on_or_after(Date::new(start_year, 8, 14).unwrap());
        add_days(opener, 7 * (round as i64 - 1))
    } else {
        let resume = first_friday_on_or_after(Date::new(start_year + 1, 1, 23).unwrap());
        add_days(resume, 7 * (round as i64 - 18))
    }
}

/// Spread a round over Friday/Saturday/Sunday; the final round all plays on
/// its Saturday.
fn day_offset(round: usize, index: usize) -> i64 {
    if round == ROUNDS {
        return 1;
    }
    match index {
        0 => 0,
        1..=6 => 1,
        _ => 2,
    }
}

/// 2019/20 round Fridays: rounds 1-25 as usual, the restart compressed into
/// May and June 2020.
fn covid_season_round_friday(round: usize) -> Date {
    match round {
        1..=17 => prior_season_round_friday(2019, round),
        18..=25 => {
            let resume = first_friday_on_or_after(Date::new(2020, 1, 17).unwrap());
            add_days(resume, 7 * (round as i64 - 18))
        }
        // the nine closed-doors rounds, two of them midweek
        26 => Date::new(2020, 5, 15).unwrap(),
        27 => Date::new(2020, 5, 22).unwrap(),
        28 => Date::new(2020, 5, 26).unwrap(),
        29 => Date::new(2020, 5, 29).unwrap(),
        30 => Date::new(2020, 6, 5).unwrap(),
        31 => Date::new(2020, 6, 12).unwrap(),
        32 => Date::new(2020, 6, 16).unwrap(),
        33 => Date::new(2020, 6, 19).unwrap(),
        _ => Date::new(2020, 6, 26).unwrap(),
    }
}

/// Builds the full six-season fixture list. The 2019/20 season carries the
/// two postponed matches: one played 2020-03-11 behind closed doors, one
/// rescheduled into the restart on 2020-06-03.
pub fn build_fixtures(rng: &mut SplitMix64) -> Vec<Fixture> {
    let rosters = rosters();
    let mut fixtures = Vec::with_capacity(6 * ROUNDS * 9);
    for (season, teams) in rosters.iter().enumerate() {
        assert_eq!(teams.len(), TEAMS_PER_SEASON);
        let rounds = round_robin(rng);
        validate_schedule(&rounds);
        let names = assign_names(season, teams, &rounds, rng);
        let season = season as u8;
        let start_year = 2014 + season as i32;
        for (r0, pairs) in rounds.iter().enumerate() {
            let round = r0 + 1;
            let friday = if season == 5 {
                covid_season_round_friday(round)
            } else {
                prior_season_round_friday(start_year, round)
            };
            let mut pairs = pairs.clone();
            pairs.sort_by_key(|&(h, _)| names[h]);
            rng.shuffle(&mut pairs);
            if season == 5 && round == 26 {
                // the restart opener plays on the Saturday
                let derby = pairs
                    .iter()
                    .position(|&(h, _)| names[h] == "Dortmund")
                    .expect("derby scheduled in round 26");
                pairs.swap(derby, 1);
            }
            for (i, &(h, a)) in pairs.iter().enumerate() {
                let date = add_days(friday, day_offset(round, i));
                fixtures.push(Fixture {
                    season,
                    round: round as u8,
                    date,
                    home: names[h].to_string(),
                    away: names[a].to_string(),
                    closed_doors: season == 5 && round > 25,
                });
            }
        }
    }
    apply_postponements(&mut fixtures);
    fixtures.sort_by(|x, y| {
        (x.season, x.date, x.home.as_str()).cmp(&(y.season, y.date, y.home.as_str()))
    });
    fixtures
}

/// Moves one round-18 fixture to 2020-03-11 (the single pre-restart ghost
/// match) and one round-21 fixture of the same team to 2020-06-03. Sharing a
/// team makes the ghost match's prior-match counts diverge, which is what
/// exercises the max rule downstream.
fn apply_postponements(fixtures: &mut [Fixture]) {
    let ghost_date = Date::new(2020, 3, 11).unwrap();
    let catchup_date = Date::new(2020, 6, 3).unwrap();

    let mut ghost_idx = None;
    'outer: for (i, f) in fixtures.iter().enumerate() {
        if f.season == 5 && f.round == 18 {
            for g in fixtures.iter() {
                if g.season == 5 && g.round == 21 && g.away == f.home {
                    ghost_idx = Some(i);
                    break 'outer;
                }
            }
        }
    }
    let ghost_idx = ghost_idx.expect("a round-18 home team recurring away in round 21");
    let pivot = fixtures[ghost_idx].home.clone();
    fixtures[ghost_idx].date = ghost_date;
    fixtures[ghost_idx].closed_doors = true;

    for f in fixtures.iter_mut() {
        if f.season == 5 && f.round == 21 && f.away == pivot {
            f.date = catchup_date;
            f.closed_doors = true;
            break;
        }
    }
}
