//! Descriptive tables and report rendering: outcome shares, goal averages,
//! margins, the favourite/underdog bin table and the implied-vs-expected
//! probability curves.
//!
//! Every table renders both as aligned text for terminals and as CSV for
//! machine use; the CLI stitches the pieces into one combined report.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use crate::backtest::StrategyResult;
use crate::data::{Dataset, MatchResult, Side};
use crate::design::MODEL1_COLUMNS;
use crate::glm::{predict_win_prob, FitResult, FitStatistics};
use crate::market::{self, MarketError};
use crate::slice::{canonical_slices, SliceSpec};

/// Match-outcome proportions for one slice.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeRow {
    pub label: String,
    pub matches: usize,
    pub home_wins: usize,
    pub draws: usize,
    pub away_wins: usize,
}

impl OutcomeRow {
    pub fn home_share(&self) -> f64 {
        self.home_wins as f64 / self.matches as f64
    }
    pub fn draw_share(&self) -> f64 {
        self.draws as f64 / self.matches as f64
    }
    pub fn away_share(&self) -> f64 {
        self.away_wins as f64 / self.matches as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeTable {
    pub rows: Vec<OutcomeRow>,
}

/// Outcome counts and shares over the four canonical slices.
pub fn outcome_table(dataset: &Dataset) -> OutcomeTable {
    let rows = canonical_slices()
        .iter()
        .map(|slice| {
            let mut row = OutcomeRow {
                label: slice.label.clone(),
                matches: 0,
                home_wins: 0,
                draws: 0,
                away_wins: 0,
            };
            for m in dataset.matches.iter().filter(|m| slice.contains(m)) {
                row.matches += 1;
                match m.result {
                    MatchResult::HomeWin => row.home_wins += 1,
                    MatchResult::Draw => row.draws += 1,
                    MatchResult::AwayWin => row.away_wins += 1,
                }
            }
            row
        })
        .collect();
    OutcomeTable { rows }
}

/// Goal averages for one slice.
#[derive(Debug, Clone, PartialEq)]
pub struct GoalsRow {
    pub label: String,
    pub matches: usize,
    pub home_goals: usize,
    pub away_goals: usize,
}

impl GoalsRow {
    pub fn mean_home(&self) -> f64 {
        self.home_goals as f64 / self.matches as f64
    }
    pub fn mean_away(&self) -> f64 {
        self.away_goals as f64 / self.matches as f64
    }
    pub fn mean_total(&self) -> f64 {
        (self.home_goals + self.away_goals) as f64 / self.matches as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoalsTable {
    pub rows: Vec<GoalsRow>,
}

pub fn goals_table(dataset: &Dataset) -> GoalsTable {
    let rows = canonical_slices()
        .iter()
        .map(|slice| {
            let mut row = GoalsRow {
                label: slice.label.clone(),
                matches: 0,
                home_goals: 0,
                away_goals: 0,
            };
            for m in dataset.matches.iter().filter(|m| slice.contains(m)) {
                row.matches += 1;
                row.home_goals += m.home_goals as usize;
                row.away_goals += m.away_goals as usize;
            }
            row
        })
        .collect();
    GoalsTable { rows }
}

/// Mean bookmaker margin for one slice.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginsRow {
    pub label: String,
    pub matches: usize,
    pub mean_margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginsTable {
    pub rows: Vec<MarginsRow>,
}

pub fn margins_table(dataset: &Dataset) -> Result<MarginsTable, MarketError> {
    let mut rows = Vec::new();
    for slice in canonical_slices().iter() {
        let mut sum = 0.0;
        let mut n = 0usize;
        for m in dataset.matches.iter().filter(|m| slice.contains(m)) {
            sum += market::margin(&m.odds)?;
            n += 1;
        }
        rows.push(MarginsRow {
            label: slice.label.clone(),
            matches: n,
            mean_margin: if n > 0 { sum / n as f64 } else { 0.0 },
        });
    }
    Ok(MarginsTable { rows })
}

/// One implied-probability-difference bin with its outcome counts.
#[derive(Debug, Clone, PartialEq)]
pub struct BinRow {
    /// Exclusive upper edge (inclusive for the topmost value handling).
    pub upper: f64,
    /// Inclusive lower edge of the final bin, exclusive otherwise.
    pub lower: f64,
    pub matches: usize,
    pub home_wins: usize,
    pub draws: usize,
    pub away_wins: usize,
}

/// Binned match outcomes by home-minus-away implied probability,
/// half-open intervals descending from +0.90 to -0.75.
#[derive(Debug, Clone, PartialEq)]
pub struct BinTable {
    pub rows: Vec<BinRow>,
    /// Matches whose difference falls outside the binned span; never
    /// silently dropped.
    pub overflow: BinRow,
}

pub const BIN_SPAN_UPPER: f64 = 0.90;
pub const BIN_SPAN_LOWER: f64 = -0.75;

/// Assigns every match of a slice to a bin of the given width (default
/// 0.15). The width must divide the 1.65 span.
pub fn bins_table(
    dataset: &Dataset,
    slice: &SliceSpec,
    width: f64,
) -> Result<BinTable, ReportError> {
    if !(width > 0.0) {
        return Err(ReportError::BadBinWidth(width));
    }
    let span = BIN_SPAN_UPPER - BIN_SPAN_LOWER;
    let n_bins_f = span / width;
    let n_bins = libm::round(n_bins_f) as usize;
    if n_bins == 0 || libm::fabs(n_bins_f - n_bins as f64) > 1e-9 {
        return Err(ReportError::BadBinWidth(width));
    }
    let mut rows: Vec<BinRow> = (0..n_bins)
        .map(|i| BinRow {
            upper: BIN_SPAN_UPPER - i as f64 * width,
            lower: BIN_SPAN_UPPER - (i + 1) as f64 * width,
            matches: 0,
            home_wins: 0,
            draws: 0,
            away_wins: 0,
        })
        .collect();
    let mut overflow = BinRow {
        upper: f64::INFINITY,
        lower: f64::NEG_INFINITY,
        matches: 0,
        home_wins: 0,
        draws: 0,
        away_wins: 0,
    };

    for m in dataset.matches.iter().filter(|m| slice.contains(m)) {
        let probs = market::demargin(&m.odds).map_err(ReportError::Market)?;
        let diff = market::imp_prob_diff(&probs);
        // bins are [upper; lower): index by distance below the top edge;
        // the very bottom edge belongs to the last bin
        let idx = if diff >= BIN_SPAN_UPPER || diff < BIN_SPAN_LOWER {
            None
        } else if diff == BIN_SPAN_LOWER {
            Some(n_bins - 1)
        } else {
            let i = libm::floor((BIN_SPAN_UPPER - diff) / width) as usize;
            Some(i.min(n_bins - 1))
        };
        let row = match idx {
            Some(i) => &mut rows[i],
            None => &mut overflow,
        };
        row.matches += 1;
        match m.result {
            MatchResult::HomeWin => row.home_wins += 1,
            MatchResult::Draw => row.draws += 1,
            MatchResult::AwayWin => row.away_wins += 1,
        }
    }
    Ok(BinTable { rows, overflow })
}

/// The two periods the probability curves compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvePeriod {
    /// Rounds 26-34 of the reference seasons, with spectators.
    SeasonEnd,
    /// Matches behind closed doors.
    ClosedDoors,
}

impl CurvePeriod {
    pub fn name(&self) -> &'static str {
        match self {
            CurvePeriod::SeasonEnd => "season_end",
            CurvePeriod::ClosedDoors => "closed_doors",
        }
    }
}

/// One point of the implied-vs-expected win probability comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub side: Side,
    pub period: CurvePeriod,
    pub implied: f64,
    pub expected: f64,
}

fn curve_covariates(side: Side, period: CurvePeriod, implied: f64) -> [f64; 5] {
    let away = matches!(side, Side::Away) as u8 as f64;
    let covid = matches!(period, CurvePeriod::ClosedDoors) as u8 as f64;
    // both curve periods sit after round 25
    [implied, away, 1.0, covid, away * covid]
}

/// Evaluates the model-1 fit on a grid of implied probabilities for every
/// side and period combination.
fn is_model_one(fit: &FitResult) -> bool {
    fit.columns.len() == MODEL1_COLUMNS.len()
        && fit.columns.iter().zip(MODEL1_COLUMNS).all(|(a, b)| a == b)
}

pub fn curve_points(fit: &FitResult, grid: &[f64]) -> Result<Vec<CurvePoint>, ReportError> {
    if !is_model_one(fit) {
        return Err(ReportError::NotModelOne);
    }
    let mut points = Vec::with_capacity(grid.len() * 4);
    for &side in &[Side::Home, Side::Away] {
        for &period in &[CurvePeriod::SeasonEnd, CurvePeriod::ClosedDoors] {
            for &implied in grid {
                let expected =
                    predict_win_prob(fit, &curve_covariates(side, period, implied))
                        .map_err(ReportError::Fit)?;
                points.push(CurvePoint { side, period, implied, expected });
            }
        }
    }
    Ok(points)
}

/// Per-match curve points: the model evaluated at each real fixture of the
/// two compared periods.
pub fn match_curve_points(
    fit: &FitResult,
    dataset: &Dataset,
) -> Result<Vec<CurvePoint>, ReportError> {
    if !is_model_one(fit) {
        return Err(ReportError::NotModelOne);
    }
    let mut points = Vec::new();
    for m in &dataset.matches {
        let period = if m.period.behind_closed_doors {
            CurvePeriod::ClosedDoors
        } else if m.season.0 <= 4 && m.period.after_round_25 {
            CurvePeriod::SeasonEnd
        } else {
            continue;
        };
        let probs = market::demargin(&m.odds).map_err(ReportError::Market)?;
        for (side, implied) in [(Side::Home, probs.home), (Side::Away, probs.away)] {
            let expected = predict_win_prob(fit, &curve_covariates(side, period, implied))
                .map_err(ReportError::Fit)?;
            points.push(CurvePoint { side, period, implied, expected });
        }
    }
    Ok(points)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReportError {
    /// Bin width must be positive and divide the 1.65 span.
    BadBinWidth(f64),
    /// Curves are defined for model 1 fits only.
    NotModelOne,
    Market(MarketError),
    Fit(crate::glm::FitError),
}

impl fmt::Display for ReportError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportError::BadBinWidth(w) => {
                write!(f, "bin width {w} must be positive and divide the 1.65 span")
            }
            ReportError::NotModelOne => write!(f, "curve requires a model-1 fit"),
            ReportError::Market(e) => write!(f, "{e}"),
            ReportError::Fit(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ReportError {}

// ---------------------------------------------------------------------------
// rendering

fn pct(x: f64) -> String {
    format!("{:.2}%", x * 100.0)
}

impl OutcomeTable {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<38} {:>8} {:>11} {:>8} {:>10}",
            "Slice", "Matches", "Home wins", "Draws", "Away wins"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<38} {:>8} {:>11} {:>8} {:>10}",
                r.label,
                r.matches,
                pct(r.home_share()),
                pct(r.draw_share()),
                pct(r.away_share())
            );
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::from("slice,matches,home_wins,draws,away_wins,home_share,draw_share,away_share\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.6},{:.6},{:.6}",
                r.label,
                r.matches,
                r.home_wins,
                r.draws,
                r.away_wins,
                r.home_share(),
                r.draw_share(),
                r.away_share()
            );
        }
        out
    }
}

impl GoalsTable {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<38} {:>8} {:>11} {:>11} {:>11}",
            "Slice", "Matches", "Home goals", "Away goals", "Total goals"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<38} {:>8} {:>11.2} {:>11.2} {:>11.2}",
                r.label,
                r.matches,
                r.mean_home(),
                r.mean_away(),
                r.mean_total()
            );
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::from("slice,matches,mean_home_goals,mean_away_goals,mean_total_goals\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6},{:.6}",
                r.label,
                r.matches,
                r.mean_home(),
                r.mean_away(),
                r.mean_total()
            );
        }
        out
    }
}

impl MarginsTable {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<38} {:>8} {:>8}", "Slice", "Matches", "Margin");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<38} {:>8} {:>8}",
                r.label,
                r.matches,
                pct(r.mean_margin)
            );
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::from("slice,matches,mean_margin\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{:.6}", r.label, r.matches, r.mean_margin);
        }
        out
    }
}

impl BinTable {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<16} {:>8} {:>10} {:>6} {:>10}",
            "ImpProbDiff", "Matches", "Home wins", "Draws", "Away wins"
        );
        for (i, r) in self.rows.iter().enumerate() {
            // the bottom edge of the final bin is inclusive
            let close = if i + 1 == self.rows.len() { ']' } else { ')' };
            let range = format!("[{:5.2}; {:5.2}{close}", r.upper, r.lower);
            let _ = writeln!(
                out,
                "{:<16} {:>8} {:>10} {:>6} {:>10}",
                range, r.matches, r.home_wins, r.draws, r.away_wins
            );
        }
        if self.overflow.matches > 0 {
            let _ = writeln!(
                out,
                "{:<16} {:>8} {:>10} {:>6} {:>10}",
                "outside span",
                self.overflow.matches,
                self.overflow.home_wins,
                self.overflow.draws,
                self.overflow.away_wins
            );
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::from("upper,lower,matches,home_wins,draws,away_wins\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:.2},{:.2},{},{},{},{}",
                r.upper, r.lower, r.matches, r.home_wins, r.draws, r.away_wins
            );
        }
        if self.overflow.matches > 0 {
            let _ = writeln!(
                out,
                "overflow,,{},{},{},{}",
                self.overflow.matches,
                self.overflow.home_wins,
                self.overflow.draws,
                self.overflow.away_wins
            );
        }
        out
    }
}

/// Renders a coefficient table: estimates with standard errors and stars,
/// intercept last, plus the fit statistics footer.
pub fn render_fit_text(fit: &FitResult) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<26} {:>10} {:>11} {:>8} {:>9}",
        "term", "estimate", "std error", "stat", "p"
    );
    // small-scale models (margins) need more digits than the logits
    let digits = |v: f64| if v == 0.0 || libm::fabs(v) >= 0.01 { 3 } else { 5 };
    let order: Vec<usize> = (1..fit.columns.len()).chain([0]).collect();
    for i in order {
        let stars = fit.stars(i);
        let _ = writeln!(
            out,
            "{:<26} {:>10.*} {:>11.*} {:>8.2} {:>9} {}",
            fit.columns[i],
            digits(fit.coefficients[i]),
            fit.coefficients[i],
            digits(fit.std_errors[i]),
            fit.std_errors[i],
            fit.statistics[i],
            if fit.p_values[i] < 0.001 {
                String::from("<0.001")
            } else {
                format!("{:.3}", fit.p_values[i])
            },
            stars
        );
    }
    let _ = writeln!(out, "observations               {}", fit.n_observations);
    match fit.stats {
        FitStatistics::Logistic { log_likelihood, aic } => {
            let _ = writeln!(out, "log-likelihood             {log_likelihood:.3}");
            let _ = writeln!(out, "AIC                        {aic:.3}");
        }
        FitStatistics::Ols { r_squared } => {
            let _ = writeln!(out, "R-squared                  {r_squared:.3}");
        }
    }
    let _ = writeln!(
        out,
        "converged                  {} ({} iterations)",
        fit.converged, fit.iterations
    );
    if let Some(d) = &fit.diagnostic {
        let _ = writeln!(out, "diagnostic                 {d}");
    }
    out
}

pub fn render_fit_csv(fit: &FitResult) -> String {
    let mut out = String::from("term,estimate,std_error,statistic,p_value,stars\n");
    for i in 0..fit.columns.len() {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.4},{:.6},{}",
            fit.columns[i],
            fit.coefficients[i],
            fit.std_errors[i],
            fit.statistics[i],
            fit.p_values[i],
            fit.stars(i)
        );
    }
    out
}

/// Renders backtest results, one row per (slice, side).
pub fn render_backtests_text(rows: &[(String, StrategyResult)]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<38} {:>5} {:>6} {:>9} {:>10} {:>9}",
        "Slice", "Side", "Bets", "Staked", "Returned", "ROI"
    );
    for (label, r) in rows {
        let _ = writeln!(
            out,
            "{:<38} {:>5} {:>6} {:>9.2} {:>10.2} {:>9}",
            label,
            r.side.name(),
            r.bets,
            r.staked,
            r.returned,
            pct(r.roi())
        );
    }
    out
}

pub fn render_backtests_csv(rows: &[(String, StrategyResult)]) -> String {
    let mut out = String::from("slice,side,bets,staked,returned,roi\n");
    for (label, r) in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.6}",
            label,
            r.side.name(),
            r.bets,
            r.staked,
            r.returned,
            r.roi()
        );
    }
    out
}

pub fn render_curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("side,period,implied,expected\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.6}",
            p.side.name(),
            p.period.name(),
            p.implied,
            p.expected
        );
    }
    out
}
