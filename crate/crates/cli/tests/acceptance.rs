//! Acceptance suite: every release gate in one target, run against the
//! vendored season fixtures. Each test prints one pass line so a full run
//! reads as a checklist (`cargo test -p geist-cli --test acceptance --
//! --nocapture`).

mod common;

use std::path::PathBuf;
use std::process::Command;
use std::sync::OnceLock;

use common::SplitMix64;
use geist_cli::ingest;
use geist_core::backtest::backtest_flat;
use geist_core::data::{Dataset, Side};
use geist_core::design::{
    build_bet_observations, build_design, build_margin_design, build_margin_observations,
    DesignMatrix, ModelId,
};
use geist_core::date::Date;
use geist_core::glm::{fit_logistic, fit_ols, log_likelihood, score, FitResult};
use geist_core::linalg::Matrix;
use geist_core::market::{demargin, imp_prob_diff, margin, OddsTriple};
use geist_core::report::{bins_table, goals_table, margins_table, outcome_table};
use geist_core::slice::canonical_slices;
use geist_core::stats::inv_logit;

fn fixture_paths() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut paths: Vec<PathBuf> = (0..6)
        .map(|s| dir.join(format!("D1_{}{}.csv", 14 + s, 15 + s)))
        .collect();
    paths.sort();
    paths
}

fn dataset() -> &'static Dataset {
    static DATASET: OnceLock<Dataset> = OnceLock::new();
    DATASET.get_or_init(|| {
        let cutoff = Date::new(2020, 3, 10).unwrap();
        ingest::ingest(&fixture_paths(), cutoff).expect("fixtures ingest cleanly")
    })
}

fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    assert!(
        (got - want).abs() <= tol,
        "{what}: got {got:.6}, wanted {want:.6} within {tol}"
    );
}

#[test]
fn criterion_01_descriptives() {
    let data = dataset();
    let outcomes = outcome_table(data);
    let expected_counts = [1125usize, 405, 223, 83];
    let expected_shares = [
        [44.98, 25.60, 29.42],
        [49.63, 23.46, 26.91],
        [43.05, 21.97, 34.98],
        [32.53, 22.89, 44.58],
    ];
    for (row, (count, shares)) in outcomes
        .rows
        .iter()
        .zip(expected_counts.iter().zip(&expected_shares))
    {
        assert_eq!(row.matches, *count, "{}: match count", row.label);
        assert_close(row.home_share() * 100.0, shares[0], 0.5, &row.label);
        assert_close(row.draw_share() * 100.0, shares[1], 0.5, &row.label);
        assert_close(row.away_share() * 100.0, shares[2], 0.5, &row.label);
    }

    let goals = goals_table(data);
    let expected_goals = [
        [1.58, 1.24, 2.82],
        [1.80, 1.26, 3.06],
        [1.74, 1.51, 3.25],
        [1.43, 1.66, 3.10],
    ];
    for (row, means) in goals.rows.iter().zip(&expected_goals) {
        assert_close(row.mean_home(), means[0], 0.03, &row.label);
        assert_close(row.mean_away(), means[1], 0.03, &row.label);
        assert_close(row.mean_total(), means[2], 0.03, &row.label);
    }
    println!("criterion 01 descriptive tables: PASS");
}

#[test]
fn criterion_02_margins() {
    let table = margins_table(dataset()).unwrap();
    let expected = [5.09, 5.11, 4.83, 4.79];
    for (row, want) in table.rows.iter().zip(&expected) {
        assert_close(row.mean_margin * 100.0, *want, 0.15, &row.label);
    }
    println!("criterion 02 margin table: PASS");
}

#[test]
fn criterion_03_margin_model() {
    let observations = build_margin_observations(dataset()).unwrap();
    assert_eq!(observations.len(), 1836, "margin regression rows");
    let fit = fit_ols(&build_margin_design(&observations)).unwrap();

    // intercept, absolute difference, season: all significant at 1% with
    // the published signs
    let expected = [(0usize, 0.056), (1, -0.002), (2, -0.001)];
    for (idx, want) in expected {
        let got = fit.coefficients[idx];
        assert!(got * want > 0.0, "{}: sign flip ({got})", fit.columns[idx]);
        assert!(
            (got - want).abs() <= 0.5 * want.abs(),
            "{}: {got:.5} outside +/-50% of {want}",
            fit.columns[idx]
        );
        assert_eq!(fit.stars(idx), "***", "{}: stars", fit.columns[idx]);
    }
    assert_close(fit.r_squared().unwrap(), 0.468, 0.10, "margin model R2");
    println!("criterion 03 margin model: PASS");
}

struct CoefCheck {
    column: &'static str,
    estimate: f64,
    stars: &'static str,
}

fn check_bet_model(fit: &FitResult, expected: &[CoefCheck], aic_want: f64, label: &str) {
    assert_eq!(fit.n_observations, 3672, "{label}: observations");
    assert!(fit.converged, "{label}: IRLS must converge");
    for want in expected {
        let idx = fit
            .columns
            .iter()
            .position(|c| c == want.column)
            .unwrap_or_else(|| panic!("{label}: missing column {}", want.column));
        assert_close(
            fit.coefficients[idx],
            want.estimate,
            0.10,
            &format!("{label}: {}", want.column),
        );
        assert_eq!(
            fit.stars(idx),
            want.stars,
            "{label}: {} significance (p = {:.4})",
            want.column,
            fit.p_values[idx]
        );
    }
    assert_close(fit.aic().unwrap(), aic_want, 10.0, &format!("{label}: AIC"));
}

#[test]
fn criterion_04_bet_model_one() {
    let observations = build_bet_observations(dataset()).unwrap();
    let fit = fit_logistic(&build_design(&observations, ModelId::One)).unwrap();
    let expected = [
        CoefCheck { column: "intercept", estimate: -2.207, stars: "***" },
        CoefCheck { column: "implied_probability", estimate: 4.530, stars: "***" },
        CoefCheck { column: "away", estimate: -0.162, stars: "**" },
        CoefCheck { column: "betting_after_round_25", estimate: 0.032, stars: "" },
        CoefCheck { column: "covid", estimate: -0.606, stars: "**" },
        CoefCheck { column: "away_x_covid", estimate: 1.136, stars: "***" },
    ];
    check_bet_model(&fit, &expected, 4322.426, "model 1");
    println!("criterion 04 bet-win model 1: PASS");
}

#[test]
fn criterion_05_bet_model_two() {
    let observations = build_bet_observations(dataset()).unwrap();
    let fit = fit_logistic(&build_design(&observations, ModelId::Two)).unwrap();
    let expected = [
        CoefCheck { column: "intercept", estimate: -2.207, stars: "***" },
        CoefCheck { column: "implied_probability", estimate: 4.530, stars: "***" },
        CoefCheck { column: "away", estimate: -0.162, stars: "**" },
        CoefCheck { column: "betting_after_round_25", estimate: 0.076, stars: "" },
        CoefCheck { column: "covid", estimate: -0.916, stars: "**" },
        CoefCheck { column: "away_x_covid", estimate: 1.143, stars: "***" },
        CoefCheck { column: "round_after_25", estimate: -0.009, stars: "" },
        CoefCheck { column: "round_after_25_x_covid", estimate: 0.063, stars: "" },
    ];
    check_bet_model(&fit, &expected, 4325.643, "model 2");
    // no within-restart adjustment: both round terms stay insignificant at
    // the 10% level
    for column in ["round_after_25", "round_after_25_x_covid"] {
        let idx = fit.columns.iter().position(|c| c == column).unwrap();
        assert!(
            fit.statistics[idx].abs() < 1.645,
            "{column}: |z| = {:.3} not insignificant",
            fit.statistics[idx]
        );
    }
    println!("criterion 05 bet-win model 2: PASS");
}

#[test]
fn criterion_06_backtests() {
    let data = dataset();
    let expected = [
        (-1.37, -11.69),
        (6.24, -15.52),
        (-6.64, 5.53),
        (-33.84, 14.71),
    ];
    let slices = canonical_slices();
    for (slice, (home_want, away_want)) in slices.iter().zip(&expected) {
        let home = backtest_flat(data, slice, Side::Home).unwrap();
        let away = backtest_flat(data, slice, Side::Away).unwrap();
        assert_eq!(home.bets, away.bets);
        assert_close(home.roi() * 100.0, *home_want, 2.0, &format!("{} home", slice.label));
        assert_close(away.roi() * 100.0, *away_want, 2.0, &format!("{} away", slice.label));
    }
    // the headline closed-doors numbers, as explicit brackets
    let covid = &slices[3];
    let home = backtest_flat(data, covid, Side::Home).unwrap().roi() * 100.0;
    let away = backtest_flat(data, covid, Side::Away).unwrap().roi() * 100.0;
    assert!((12.7..=16.7).contains(&away), "closed-doors away ROI {away:.2}%");
    assert!((-35.8..=-31.8).contains(&home), "closed-doors home ROI {home:.2}%");
    println!("criterion 06 backtests: PASS");
}

#[test]
fn criterion_07_bin_table() {
    let data = dataset();
    let covid = &canonical_slices()[3];
    let table = bins_table(data, covid, 0.15).unwrap();
    let expected: [(usize, usize, usize, usize); 11] = [
        (3, 2, 1, 0),
        (6, 3, 2, 1),
        (7, 6, 1, 0),
        (9, 5, 2, 2),
        (12, 3, 4, 5),
        (13, 4, 3, 6),
        (10, 1, 4, 5),
        (4, 1, 0, 3),
        (9, 2, 1, 6),
        (6, 0, 1, 5),
        (4, 0, 0, 4),
    ];
    assert_eq!(table.rows.len(), 11);
    assert_eq!(table.overflow.matches, 0, "no closed-doors match outside the span");
    for (row, want) in table.rows.iter().zip(&expected) {
        assert!(
            row.matches.abs_diff(want.0) <= 1,
            "bin [{:.2}; {:.2}): {} matches, expected {} +/- 1",
            row.upper,
            row.lower,
            row.matches,
            want.0
        );
    }
    assert_eq!(table.rows.iter().map(|r| r.matches).sum::<usize>(), 83);
    assert_eq!(table.rows.iter().map(|r| r.home_wins).sum::<usize>(), 27);
    assert_eq!(table.rows.iter().map(|r| r.draws).sum::<usize>(), 19);
    assert_eq!(table.rows.iter().map(|r| r.away_wins).sum::<usize>(), 37);

    // headline checks straight off the match data
    let mut heavy_away = (0usize, 0usize);
    let mut close = (0usize, 0usize, 0usize);
    for m in data.matches.iter().filter(|m| m.period.behind_closed_doors) {
        let diff = imp_prob_diff(&demargin(&m.odds).unwrap());
        if diff <= -0.45 {
            heavy_away.0 += 1;
            if m.result == geist_core::data::MatchResult::AwayWin {
                heavy_away.1 += 1;
            }
        }
        if diff.abs() < 0.3 {
            close.0 += 1;
            match m.result {
                geist_core::data::MatchResult::HomeWin => close.1 += 1,
                geist_core::data::MatchResult::AwayWin => close.2 += 1,
                _ => {}
            }
        }
    }
    assert!(
        heavy_away.1 * 10 >= heavy_away.0 * 9,
        "heavy away favourites: {} of {} won",
        heavy_away.1,
        heavy_away.0
    );
    assert!(
        close.2 >= 2 * close.1,
        "close matches: {} away wins vs {} home wins over {}",
        close.2,
        close.1,
        close.0
    );
    println!("criterion 07 bin table: PASS");
}

#[test]
fn criterion_08_glm_properties() {
    // finite-difference agreement of the analytic score
    let mut rng = SplitMix64::new(0xacce55);
    let mut rows = Vec::new();
    let mut response = Vec::new();
    for _ in 0..120 {
        let x1 = rng.normal();
        let x2 = rng.range(-1.0, 1.0);
        rows.push(vec![1.0, x1, x2]);
        response.push(rng.bernoulli(inv_logit(0.3 + 0.8 * x1 - 0.5 * x2)) as u8 as f64);
    }
    let design = DesignMatrix {
        columns: vec!["intercept".into(), "x1".into(), "x2".into()],
        x: Matrix::from_rows(&rows),
        response,
    };
    let beta = [0.2, -0.4, 0.6];
    let analytic = score(&design, &beta);
    for j in 0..3 {
        let h = 1e-5;
        let mut up = beta.to_vec();
        up[j] += h;
        let mut down = beta.to_vec();
        down[j] -= h;
        let numeric =
            (log_likelihood(&design, &up) - log_likelihood(&design, &down)) / (2.0 * h);
        let scale = analytic[j].abs().max(1.0);
        assert!((analytic[j] - numeric).abs() / scale < 1e-6, "gradient column {j}");
    }

    // grid-search oracle on a two-parameter problem
    let problem = design_two_param(&mut SplitMix64::new(0x9a1d));
    let fit = fit_logistic(&problem).unwrap();
    let resolution = 0.1;
    let steps = (20.0 / resolution) as usize + 1;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..steps {
        let b0 = -10.0 + i as f64 * resolution;
        for j in 0..steps {
            let b1 = -10.0 + j as f64 * resolution;
            let ll = log_likelihood(&problem, &[b0, b1]);
            if ll > best.0 {
                best = (ll, b0, b1);
            }
        }
    }
    assert!((fit.coefficients[0] - best.1).abs() <= resolution, "grid oracle intercept");
    assert!((fit.coefficients[1] - best.2).abs() <= resolution, "grid oracle slope");

    // parameter recovery at n = 50,000 with a fixed seed
    let mut rng = SplitMix64::new(0x50_000);
    let beta_true = [-0.5, 0.8, -0.6];
    let mut rows = Vec::with_capacity(50_000);
    let mut response = Vec::with_capacity(50_000);
    for _ in 0..50_000 {
        let x1 = rng.normal();
        let x2 = rng.bernoulli(0.4) as u8 as f64;
        let eta = beta_true[0] + beta_true[1] * x1 + beta_true[2] * x2;
        response.push(rng.bernoulli(inv_logit(eta)) as u8 as f64);
        rows.push(vec![1.0, x1, x2]);
    }
    let big = DesignMatrix {
        columns: vec!["intercept".into(), "x1".into(), "x2".into()],
        x: Matrix::from_rows(&rows),
        response,
    };
    let fit = fit_logistic(&big).unwrap();
    for j in 0..3 {
        assert!(
            (fit.coefficients[j] - beta_true[j]).abs() < 3.0 * fit.std_errors[j],
            "recovery of coefficient {j}"
        );
    }

    // AIC identity is exact on the real fit
    let observations = build_bet_observations(dataset()).unwrap();
    let fit = fit_logistic(&build_design(&observations, ModelId::One)).unwrap();
    let k = fit.coefficients.len() as f64;
    assert_eq!(fit.aic().unwrap(), 2.0 * k - 2.0 * fit.log_likelihood().unwrap());
    // and the score vanishes at the optimum
    let design = build_design(&observations, ModelId::One);
    let max_score = score(&design, &fit.coefficients)
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(max_score < 1e-6, "score max-norm {max_score}");

    // OLS residual orthogonality on the real margin model
    let margin_obs = build_margin_observations(dataset()).unwrap();
    let margin_design = build_margin_design(&margin_obs);
    let ols = fit_ols(&margin_design).unwrap();
    let fitted = margin_design.x.mul_vec(&ols.coefficients);
    let residuals: Vec<f64> = margin_design
        .response
        .iter()
        .zip(&fitted)
        .map(|(y, f)| y - f)
        .collect();
    let n = margin_design.x.n_rows() as f64;
    for (j, v) in margin_design.x.transpose_mul_vec(&residuals).iter().enumerate() {
        assert!(v.abs() < 1e-10 * n, "OLS orthogonality, column {j}: {v}");
    }
    println!("criterion 08 GLM property suite: PASS");
}

fn design_two_param(rng: &mut SplitMix64) -> DesignMatrix {
    let mut rows = Vec::new();
    let mut response = Vec::new();
    for _ in 0..150 {
        let x = rng.range(-1.5, 1.5);
        rows.push(vec![1.0, x]);
        response.push(rng.bernoulli(inv_logit(-0.4 + 0.9 * x)) as u8 as f64);
    }
    DesignMatrix {
        columns: vec!["intercept".into(), "x".into()],
        x: Matrix::from_rows(&rows),
        response,
    }
}

#[test]
fn criterion_09_market_properties() {
    let mut rng = SplitMix64::new(0x0dd5);
    let mut tested = 0;
    while tested < 10_000 {
        let a = rng.range(0.05, 1.0);
        let b = rng.range(0.05, 1.0);
        let c = rng.range(0.05, 1.0);
        let total = a + b + c;
        let probs = [a / total, b / total, c / total];
        if probs.iter().any(|p| *p > 0.85) {
            continue;
        }
        let m = rng.range(0.0, 0.10);
        let odds = OddsTriple {
            home: 1.0 / (probs[0] * (1.0 + m)),
            draw: 1.0 / (probs[1] * (1.0 + m)),
            away: 1.0 / (probs[2] * (1.0 + m)),
        };
        if odds.home <= 1.001 || odds.draw <= 1.001 || odds.away <= 1.001 {
            continue;
        }
        tested += 1;

        let p = demargin(&odds).unwrap();
        assert!((p.sum() - 1.0).abs() < 1e-12, "sum to one");
        // order preservation
        if odds.home < odds.away {
            assert!(p.home > p.away);
        }
        if odds.home > odds.away {
            assert!(p.home < p.away);
        }
        // margin permutation invariance
        let base = margin(&odds).unwrap();
        let permuted = OddsTriple { home: odds.away, draw: odds.home, away: odds.draw };
        assert!((margin(&permuted).unwrap() - base).abs() < 1e-15);
    }
    // fair book
    let fair = OddsTriple::new(2.0, 4.0, 4.0).unwrap();
    assert!(margin(&fair).unwrap().abs() < 1e-15);
    println!("criterion 09 market-math properties: PASS");
}

#[test]
fn criterion_10_determinism() {
    let binary = env!("CARGO_BIN_EXE_geist");
    let dir = std::env::temp_dir().join(format!("geist_acceptance_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let dataset_a = dir.join("a.tsv");
    let dataset_b = dir.join("b.tsv");

    for out in [&dataset_a, &dataset_b] {
        let status = Command::new(binary)
            .arg("ingest")
            .args(fixture_paths())
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success(), "ingest run failed");
    }
    let bytes_a = std::fs::read(&dataset_a).unwrap();
    let bytes_b = std::fs::read(&dataset_b).unwrap();
    assert_eq!(bytes_a, bytes_b, "re-ingesting identical inputs must be byte-identical");

    let report = |path: &std::path::Path| {
        let output = Command::new(binary)
            .arg("report")
            .arg("--dataset")
            .arg(path)
            .output()
            .unwrap();
        assert!(output.status.success(), "report run failed");
        output.stdout
    };
    let first = report(&dataset_a);
    let second = report(&dataset_a);
    assert!(!first.is_empty());
    assert_eq!(first, second, "two report runs must be byte-identical");

    std::fs::remove_dir_all(&dir).ok();
    println!("criterion 10 determinism: PASS");
}
