//! Core analysis library for football 1X2 betting markets.
//!
//! Everything in here is pure computation over parsed match data: odds
//! de-margining, bookmaker margins, round and period labelling, logistic and
//! OLS regression fits, flat-stake backtests and the descriptive tables.
//! File formats, CSV ingestion and the command-line front end live in the
//! companion `geist-cli` crate.
//!
//! The crate is `no_std` (with `alloc`) so the numeric core stays free of
//! platform dependencies; all float math goes through `libm`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod backtest;
pub mod data;
pub mod date;
pub mod design;
pub mod glm;
pub mod linalg;
pub mod market;
pub mod report;
pub mod schedule;
pub mod slice;
pub mod stats;

pub use data::{Dataset, MatchRecord, MatchResult, PeriodLabel, RawMatch, SeasonId, Side};
pub use date::Date;
pub use design::{build_bet_observations, build_design, BetObservation, DesignMatrix, ModelId};
pub use glm::{fit_logistic, fit_ols, predict_win_prob, FitResult};
pub use market::{consolidate_odds, demargin, imp_prob_diff, margin, OddsTriple, ProbTriple};
pub use slice::SliceSpec;
