//! Deterministic generator for the synthetic season fixtures under
//! `crates/cli/fixtures/`.
//!
//! The real 2014/15-2019/20 Bundesliga files are freely downloadable but not
//! redistributable, so the test suite runs on synthetic seasons in the same
//! layout, calibrated so the published aggregate statistics (outcome shares,
//! goal averages, margins, regression tables, ROIs, the closed-doors bin
//! table) are reproduced. Regenerate with `cargo run -p geist-fixgen`; the
//! run ends with a self-check that re-ingests the files through the real
//! pipeline and verifies every calibrated value.

mod assign;
mod calendar;
mod emit;
mod rng;
mod schedule;
mod synth;
mod targets;

use std::path::PathBuf;
use std::process::ExitCode;

use geist_core::backtest::backtest_flat;
use geist_core::data::Side;
use geist_core::design::{build_bet_observations, build_design, ModelId};
use geist_core::date::Date;
use geist_core::glm::fit_logistic;
use geist_core::market::{demargin, imp_prob_diff};
use geist_core::report::{bins_table, goals_table, margins_table, outcome_table};
use geist_core::slice::canonical_slices;
use geist_core::stats::stars;

use rng::SplitMix64;
use targets::{BINS, COVID_MEAN_DIFF, PUBLISHED_AIC_M1, PUBLISHED_AIC_M2, PUBLISHED_M1, PUBLISHED_M2, SLICES};

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../cli/fixtures")
}

fn main() -> ExitCode {
    let mut rng = SplitMix64::new(0x00d1_2020);
    let fixtures = schedule::build_fixtures(&mut rng);
    let mut synth = synth::Synth::new(fixtures, &mut rng);

    let knobs = synth.calibrate();
    eprintln!("calibrated knobs: {knobs:?}");
    synth.tune_margins(&knobs);
    let objective = assign::optimise(&mut synth, &mut rng);
    eprintln!("assignment objective: {objective:.4}");
    assign::assign_goals(&mut synth, &mut rng);

    let dir = fixtures_dir();
    let paths = emit::write_files(&synth, &dir, &mut rng);
    eprintln!("wrote {} files to {}", paths.len(), dir.display());

    if self_check(&paths) {
        eprintln!("self-check: all targets met");
        ExitCode::SUCCESS
    } else {
        eprintln!("self-check FAILED");
        ExitCode::FAILURE
    }
}

/// Re-ingests the emitted files through the real pipeline and verifies every
/// calibrated aggregate. Internal gates are tighter than the published
/// tolerances.
fn self_check(paths: &[PathBuf]) -> bool {
    let mut ok = true;
    let mut check = |name: &str, pass: bool, detail: String| {
        eprintln!("  [{}] {name}: {detail}", if pass { "ok" } else { "FAIL" });
        ok &= pass;
    };

    let cutoff = Date::new(2020, 3, 10).unwrap();
    let dataset = match geist_cli::ingest::ingest(paths, cutoff) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("  ingest failed: {e}");
            return false;
        }
    };
    check(
        "match count",
        dataset.matches.len() == 1836,
        format!("{}", dataset.matches.len()),
    );

    // outcome counts and goal sums must be exact
    let outcomes = outcome_table(&dataset);
    for (row, spec) in outcomes.rows.iter().zip(&SLICES) {
        let pass = row.matches == spec.matches
            && row.home_wins == spec.home_wins
            && row.draws == spec.draws
            && row.away_wins == spec.away_wins;
        check(
            "outcomes",
            pass,
            format!(
                "{}: {}/{}/{} of {}",
                row.label, row.home_wins, row.draws, row.away_wins, row.matches
            ),
        );
    }
    let goals = goals_table(&dataset);
    for (row, spec) in goals.rows.iter().zip(&SLICES) {
        let pass =
            row.home_goals == spec.home_goal_sum && row.away_goals == spec.away_goal_sum;
        check(
            "goal sums",
            pass,
            format!("{}: {} home, {} away", row.label, row.home_goals, row.away_goals),
        );
    }

    let margins = margins_table(&dataset).expect("margins");
    for (row, spec) in margins.rows.iter().zip(&SLICES) {
        let err = (row.mean_margin - spec.mean_margin).abs();
        check(
            "margins",
            err < 7e-4,
            format!("{}: {:.4} vs {:.4}", row.label, row.mean_margin, spec.mean_margin),
        );
    }

    // bet-win models
    let observations = build_bet_observations(&dataset).expect("observations");
    check("observations", observations.len() == 3672, format!("{}", observations.len()));
    let fit1 = fit_logistic(&build_design(&observations, ModelId::One)).expect("model 1");
    let fit2 = fit_logistic(&build_design(&observations, ModelId::Two)).expect("model 2");
    for (fit, reference, aic_ref, label) in [
        (&fit1, &PUBLISHED_M1[..], PUBLISHED_AIC_M1, "model 1"),
        (&fit2, &PUBLISHED_M2[..], PUBLISHED_AIC_M2, "model 2"),
    ] {
        for (i, target) in reference.iter().enumerate() {
            // published tables list the intercept first here
            let idx = if i == 0 { 0 } else { i };
            let got = fit.coefficients[idx];
            check(
                label,
                (got - target).abs() < 0.07,
                format!("{}: {:.3} vs {:.3}", fit.columns[idx], got, target),
            );
        }
        let aic = fit.aic().unwrap();
        check(label, (aic - aic_ref).abs() < 8.0, format!("AIC {:.3} vs {:.3}", aic, aic_ref));
    }
    // star pattern of model 1: ***, **, none, **, ***, *** (intercept last)
    let expected_stars = ["***", "***", "**", "", "**", "***"];
    for (i, want) in expected_stars.iter().enumerate() {
        let got = stars(fit1.p_values[i]);
        check(
            "model 1 stars",
            got == *want,
            format!("{}: `{}` vs `{}`", fit1.columns[i], got, want),
        );
    }
    for idx in [6usize, 7] {
        let z = fit2.statistics[idx];
        check(
            "model 2 round terms",
            z.abs() < 1.5,
            format!("{}: z = {:.2}", fit2.columns[idx], z),
        );
    }

    // margin regression
    let margin_obs = geist_core::design::build_margin_observations(&dataset).unwrap();
    let margin_fit =
        geist_core::glm::fit_ols(&geist_core::design::build_margin_design(&margin_obs)).unwrap();
    let r2 = margin_fit.r_squared().unwrap();
    check(
        "margin model R2",
        (r2 - targets::PUBLISHED_OLS_R2).abs() < 0.06,
        format!("{r2:.3}"),
    );
    for (idx, target) in [
        (0usize, targets::PUBLISHED_OLS[0]),
        (1, targets::PUBLISHED_OLS[1]),
        (2, targets::PUBLISHED_OLS[2]),
    ] {
        let got = margin_fit.coefficients[idx];
        let rel = (got - target).abs() / target.abs();
        check(
            "margin model",
            rel < 0.35 && stars(margin_fit.p_values[idx]) == "***",
            format!("{}: {:.5} vs {:.3}", margin_fit.columns[idx], got, target),
        );
    }

    // backtests
    let slices = canonical_slices();
    for (slice, spec) in slices.iter().zip(&SLICES) {
        for (side, target) in [(Side::Home, spec.roi_home), (Side::Away, spec.roi_away)] {
            let result = backtest_flat(&dataset, slice, side).expect("backtest");
            let err = (result.roi() - target).abs();
            check(
                "backtest",
                err < 0.012,
                format!("{} {}: {:.4} vs {:.4}", slice.label, side, result.roi(), target),
            );
        }
    }

    // closed-doors bin table
    let bins = bins_table(&dataset, &slices[3], 0.15).expect("bins");
    check("bin overflow", bins.overflow.matches == 0, format!("{}", bins.overflow.matches));
    for (row, spec) in bins.rows.iter().zip(&BINS) {
        let pass = row.matches == spec.2
            && row.home_wins == spec.3
            && row.draws == spec.4
            && row.away_wins == spec.5;
        check(
            "bins",
            pass,
            format!(
                "[{:.2}; {:.2}): {}/{}/{} of {}",
                row.upper, row.lower, row.home_wins, row.draws, row.away_wins, row.matches
            ),
        );
    }

    // mean closed-doors implied difference
    let mut diff_sum = 0.0;
    let mut diff_n = 0usize;
    for m in dataset.matches.iter().filter(|m| m.period.behind_closed_doors) {
        diff_sum += imp_prob_diff(&demargin(&m.odds).unwrap());
        diff_n += 1;
    }
    let mean_diff = diff_sum / diff_n as f64;
    check(
        "covid mean diff",
        (mean_diff - COVID_MEAN_DIFF).abs() < 7e-4,
        format!("{mean_diff:.4} over {diff_n}"),
    );

    ok
}
