//! Implementations of the analysis subcommands. Each returns the exact text
//! that goes to stdout, which keeps outputs testable and byte-reproducible.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use geist_core::backtest::{backtest_flat, StrategyResult};
use geist_core::data::{Dataset, Side};
use geist_core::date::Date;
use geist_core::design::{
    build_bet_observations, build_design, build_margin_design, build_margin_observations,
    ModelId,
};
use geist_core::glm::{fit_logistic, fit_ols, FitResult};
use geist_core::report::{
    self, bins_table, curve_points, goals_table, margins_table, match_curve_points,
    outcome_table,
};
use geist_core::slice::{canonical_slices, slice_by_name, SliceSpec};

use crate::error::CliError;
use crate::{ingest, store};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Csv,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<OutputFormat, CliError> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "csv" | "delimited" => Ok(OutputFormat::Csv),
            other => Err(CliError::usage(format!(
                "unknown format `{other}` (expected text or csv)"
            ))),
        }
    }
}

pub fn parse_cutoff(s: &str) -> Result<Date, CliError> {
    let mut parts = s.split('-');
    let date = (|| {
        let y = parts.next()?.parse().ok()?;
        let m = parts.next()?.parse().ok()?;
        let d = parts.next()?.parse().ok()?;
        if parts.next().is_some() {
            return None;
        }
        Date::new(y, m, d)
    })();
    date.ok_or_else(|| CliError::usage(format!("bad cutoff date `{s}` (expected YYYY-MM-DD)")))
}

/// Parses raw season files, writes the canonical dataset and the provenance
/// log, and reports a one-line summary.
pub fn cmd_ingest(
    files: &[PathBuf],
    out: &Path,
    provenance: Option<&Path>,
    cutoff: Date,
) -> Result<String, CliError> {
    if files.is_empty() {
        return Err(CliError::usage("ingest needs at least one season file"));
    }
    let dataset = ingest::ingest(files, cutoff).map_err(|e| CliError::Data(e.to_string()))?;
    store::write(&dataset, out)?;
    let provenance_path = provenance
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(format!("{}.log", out.display())));
    store::write_provenance(&dataset, &provenance_path)?;
    Ok(format!(
        "ingested {} matches from {} files -> {} (provenance: {})\n",
        dataset.matches.len(),
        files.len(),
        out.display(),
        provenance_path.display()
    ))
}

fn load(dataset_path: &Path) -> Result<Dataset, CliError> {
    store::read(dataset_path)
}

pub fn fit_bet_model(dataset: &Dataset, model: ModelId) -> Result<FitResult, CliError> {
    let observations = build_bet_observations(dataset)?;
    let design = build_design(&observations, model);
    Ok(fit_logistic(&design)?)
}

pub fn fit_margin_model(dataset: &Dataset) -> Result<FitResult, CliError> {
    let observations = build_margin_observations(dataset)?;
    let design = build_margin_design(&observations);
    Ok(fit_ols(&design)?)
}

pub fn cmd_describe(dataset_path: &Path, format: OutputFormat) -> Result<String, CliError> {
    let dataset = load(dataset_path)?;
    let outcomes = outcome_table(&dataset);
    let goals = goals_table(&dataset);
    Ok(match format {
        OutputFormat::Text => format!("{}\n{}", outcomes.render_text(), goals.render_text()),
        OutputFormat::Csv => format!("{}\n{}", outcomes.render_csv(), goals.render_csv()),
    })
}

pub fn cmd_margins(dataset_path: &Path, format: OutputFormat) -> Result<String, CliError> {
    let dataset = load(dataset_path)?;
    let table = margins_table(&dataset)?;
    Ok(match format {
        OutputFormat::Text => table.render_text(),
        OutputFormat::Csv => table.render_csv(),
    })
}

pub fn cmd_fit(dataset_path: &Path, model: &str, format: OutputFormat) -> Result<String, CliError> {
    let dataset = load(dataset_path)?;
    let fit = match model {
        "margin" => fit_margin_model(&dataset)?,
        other => {
            let id = other
                .parse::<u8>()
                .ok()
                .and_then(ModelId::from_number)
                .ok_or_else(|| {
                    CliError::usage(format!("unknown model `{other}` (expected 1, 2 or margin)"))
                })?;
            fit_bet_model(&dataset, id)?
        }
    };
    Ok(match format {
        OutputFormat::Text => report::render_fit_text(&fit),
        OutputFormat::Csv => report::render_fit_csv(&fit),
    })
}

fn resolve_slice(name: &str) -> Result<SliceSpec, CliError> {
    slice_by_name(name).ok_or_else(|| {
        CliError::usage(format!(
            "unknown slice `{name}` (expected prior-early, prior-late, spectators, covid or all)"
        ))
    })
}

fn backtest_rows(
    dataset: &Dataset,
    slices: &[SliceSpec],
    sides: &[Side],
) -> Result<Vec<(String, StrategyResult)>, CliError> {
    let mut rows = Vec::new();
    for slice in slices {
        for &side in sides {
            let result = backtest_flat(dataset, slice, side)?;
            rows.push((slice.label.clone(), result));
        }
    }
    Ok(rows)
}

fn parse_sides(side: &str) -> Result<Vec<Side>, CliError> {
    match side {
        "home" => Ok(vec![Side::Home]),
        "away" => Ok(vec![Side::Away]),
        "both" => Ok(vec![Side::Home, Side::Away]),
        other => Err(CliError::usage(format!(
            "unknown side `{other}` (expected home, away or both)"
        ))),
    }
}

pub fn cmd_backtest(
    dataset_path: &Path,
    slice: Option<&str>,
    side: &str,
    format: OutputFormat,
) -> Result<String, CliError> {
    let dataset = load(dataset_path)?;
    let slices = match slice {
        Some(name) => vec![resolve_slice(name)?],
        None => canonical_slices().to_vec(),
    };
    let sides = parse_sides(side)?;
    let rows = backtest_rows(&dataset, &slices, &sides)?;
    Ok(match format {
        OutputFormat::Text => report::render_backtests_text(&rows),
        OutputFormat::Csv => report::render_backtests_csv(&rows),
    })
}

pub fn cmd_bins(
    dataset_path: &Path,
    slice: &str,
    width: f64,
    format: OutputFormat,
) -> Result<String, CliError> {
    let dataset = load(dataset_path)?;
    let slice = resolve_slice(slice)?;
    let table = bins_table(&dataset, &slice, width)?;
    Ok(match format {
        OutputFormat::Text => table.render_text(),
        OutputFormat::Csv => table.render_csv(),
    })
}

fn probability_grid(step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0 && step < 1.0) {
        return Err(CliError::usage(format!("bad grid step {step}")));
    }
    let n = ((0.95 - 0.05) / step).round() as usize;
    Ok((0..=n).map(|i| 0.05 + i as f64 * step).collect())
}

pub fn cmd_curve(dataset_path: &Path, step: f64, per_match: bool) -> Result<String, CliError> {
    let dataset = load(dataset_path)?;
    let fit = fit_bet_model(&dataset, ModelId::One)?;
    let points = if per_match {
        match_curve_points(&fit, &dataset)?
    } else {
        curve_points(&fit, &probability_grid(step)?)?
    };
    Ok(report::render_curve_csv(&points))
}

/// The combined report: every table, fit, backtest and curve in one
/// deterministic document.
pub fn cmd_report(dataset_path: &Path) -> Result<String, CliError> {
    let dataset = load(dataset_path)?;
    let mut out = String::new();
    let _ = writeln!(out, "# geist report v1");
    let _ = writeln!(out, "# matches: {}\n", dataset.matches.len());

    let _ = writeln!(out, "== match outcomes ==");
    out.push_str(&outcome_table(&dataset).render_text());
    let _ = writeln!(out, "\n== goals ==");
    out.push_str(&goals_table(&dataset).render_text());
    let _ = writeln!(out, "\n== bookmaker margins ==");
    out.push_str(&margins_table(&dataset)?.render_text());

    let _ = writeln!(out, "\n== margin model (OLS) ==");
    out.push_str(&report::render_fit_text(&fit_margin_model(&dataset)?));

    let fit1 = fit_bet_model(&dataset, ModelId::One)?;
    let _ = writeln!(out, "\n== bet-win model 1 (logistic) ==");
    out.push_str(&report::render_fit_text(&fit1));
    let _ = writeln!(out, "\n== bet-win model 2 (logistic) ==");
    out.push_str(&report::render_fit_text(&fit_bet_model(&dataset, ModelId::Two)?));

    let _ = writeln!(out, "\n== flat-stake backtests ==");
    let rows = backtest_rows(
        &dataset,
        &canonical_slices(),
        &[Side::Home, Side::Away],
    )?;
    out.push_str(&report::render_backtests_text(&rows));

    let _ = writeln!(out, "\n== outcome bins by implied probability difference (closed doors) ==");
    let covid = resolve_slice("covid")?;
    out.push_str(&bins_table(&dataset, &covid, 0.15)?.render_text());

    let _ = writeln!(out, "\n== implied vs expected win probability (model 1 grid) ==");
    out.push_str(&report::render_curve_csv(&curve_points(&fit1, &probability_grid(0.05)?)?));

    let _ = writeln!(out, "\n== implied vs expected win probability (per match) ==");
    out.push_str(&report::render_curve_csv(&match_curve_points(&fit1, &dataset)?));

    Ok(out)
}
