//! Statistical synthesis: turns the bare fixture list into odds, outcomes
//! and goals whose aggregates land on the published values.
//!
//! The load-bearing idea is moment matching. A logistic fit only sees the
//! per-column sums X'y, so the generator (a) calibrates the implied
//! probability distributions until the model-expected win sums equal the
//! pinned outcome counts, and (b) assigns the integer outcomes so the
//! remaining free moments (implied-probability, round terms) and the ROI
//! sums hit their targets. The fitted coefficients then reproduce the
//! target vector without ever running a fit during construction.

use geist_core::data::{RawMatch, SeasonId};
use geist_core::date::Date;
use geist_core::market::OddsTriple;
use geist_core::linalg::{qr_least_squares, Matrix};
use geist_core::schedule::{infer_rounds, label_periods};
use geist_core::stats::inv_logit;

use crate::rng::SplitMix64;
use crate::schedule::Fixture;
use crate::targets::{
    BETA_M2, BINS, COVID_MEAN_DIFF, LL2_TARGET, MARGIN_DIFF_SLOPE, SLICES,
};

pub const OUT_HOME: u8 = 0;
pub const OUT_DRAW: u8 = 1;
pub const OUT_AWAY: u8 = 2;

/// One match with all synthesised quantities.
pub struct Plan {
    pub fixture: Fixture,
    pub slice: usize,
    pub bin: Option<usize>,
    pub after25: bool,
    pub covid: bool,
    pub r25: f64,
    // frozen random material
    z_d: f64,
    z_s: f64,
    u_bin: f64,
    eps_margin: f64,
    // synthesised state
    pub d_raw: f64,
    pub margin: f64,
    /// Rounded average odds (home, draw, away) as they appear in the file.
    pub odds: [f64; 3],
    /// Implied probabilities de-margined from the rounded odds.
    pub p_hat: [f64; 3],
    pub d_hat: f64,
    /// Model-expected win probability for the home and away bet.
    pub p_star: [f64; 2],
    pub eta: [f64; 2],
    pub outcome: u8,
    pub pinned: bool,
    pub goals: (u8, u8),
}

/// Distribution knobs the calibration solves for.
#[derive(Clone, Debug)]
pub struct Knobs {
    /// Location of the implied-difference distribution per non-covid group
    /// (prior rounds 1-25, prior rounds 26-34, 2019/20 with spectators).
    pub mu: [f64; 3],
    /// Base draw share per group, covid group last.
    pub s0: [f64; 4],
    /// Within-bin spread multiplier for the closed-doors differences.
    pub covid_spread: f64,
    /// Common scale on the difference spreads.
    pub sigma_scale: f64,
}

impl Knobs {
    fn initial() -> Knobs {
        Knobs {
            mu: [0.13, 0.15, 0.085],
            s0: [0.245, 0.24, 0.225, 0.235],
            covid_spread: 1.0,
            sigma_scale: 1.0,
        }
    }
}

/// Expected-win sums split along the score-equation structure.
#[derive(Default, Clone, Copy)]
struct Sums {
    total: f64,
    away: f64,
    late_total: f64,
    covid_home: f64,
    covid_away: f64,
    covid_except_ghost: f64,
    ll: f64,
}

/// Per-season margin level before slice corrections.
fn margin_trend(season: u8) -> f64 {
    match season {
        0 => 0.0567,
        1 => 0.0557,
        2 => 0.0547,
        3 => 0.0537,
        4 => 0.0527,
        _ => 0.0496,
    }
}

pub struct Synth {
    pub plans: Vec<Plan>,
    /// Additive margin correction per canonical slice.
    pub margin_corr: [f64; 4],
    pub sigma_margin: f64,
    base_sigma: [f64; 3],
}

fn round2(x: f64) -> f64 {
    libm::round(x * 100.0) / 100.0
}

fn softplus(x: f64) -> f64 {
    if x > 35.0 {
        x
    } else {
        libm::log1p(libm::exp(x))
    }
}

impl Synth {
    /// Classifies fixtures by replaying the real round inference and period
    /// labelling, then freezes all random draws.
    pub fn new(fixtures: Vec<Fixture>, rng: &mut SplitMix64) -> Synth {
        // replay inference per season to get the exact labels ingestion
        // will assign
        let cutoff = Date::new(2020, 3, 10).unwrap();
        let dummy_odds = OddsTriple::new(2.0, 3.5, 4.0).unwrap();
        let mut labelled: Vec<(bool, bool, u8)> = Vec::with_capacity(fixtures.len());
        for season in 0..6u8 {
            let season_fixtures: Vec<&Fixture> =
                fixtures.iter().filter(|f| f.season == season).collect();
            let raws: Vec<RawMatch> = season_fixtures
                .iter()
                .map(|f| RawMatch {
                    season: SeasonId(season),
                    date: f.date,
                    home_team: f.home.clone(),
                    away_team: f.away.clone(),
                    home_goals: 1,
                    away_goals: 0,
                    result: geist_core::data::MatchResult::HomeWin,
                    odds: dummy_odds,
                })
                .collect();
            let inference = infer_rounds(&raws).expect("schedule is consistent");
            let periods = label_periods(&raws, &inference.rounds, cutoff);
            for p in periods {
                labelled.push((p.after_round_25, p.behind_closed_doors, p.round_after_25));
            }
        }

        // covid bins: expand the per-bin quotas, pin the restart opener and
        // the ghost match, shuffle the rest
        let covid_count = fixtures.iter().filter(|f| f.closed_doors).count();
        assert_eq!(covid_count, 83);
        let mut bin_ids: Vec<usize> = Vec::new();
        for (bin, spec) in BINS.iter().enumerate() {
            bin_ids.extend(std::iter::repeat(bin).take(spec.2));
        }
        // remove one slot for each pinned match: derby in [0.60; 0.45),
        // ghost in [0.45; 0.30)
        let derby_bin = 2usize;
        let ghost_bin = 3usize;
        remove_one(&mut bin_ids, derby_bin);
        remove_one(&mut bin_ids, ghost_bin);
        rng.shuffle(&mut bin_ids);
        let mut bin_iter = bin_ids.into_iter();

        let ghost_date = Date::new(2020, 3, 11).unwrap();
        let mut plans = Vec::with_capacity(fixtures.len());
        for (i, fixture) in fixtures.into_iter().enumerate() {
            let (after25, covid, r25) = labelled[i];
            assert_eq!(covid, fixture.closed_doors);
            let slice = if fixture.season <= 4 {
                if after25 {
                    1
                } else {
                    0
                }
            } else if covid {
                3
            } else {
                2
            };
            let is_derby = fixture.season == 5
                && fixture.home == "Dortmund"
                && fixture.away == "Schalke 04";
            let is_ghost = fixture.date == ghost_date;
            let bin = if slice == 3 {
                Some(if is_derby {
                    derby_bin
                } else if is_ghost {
                    ghost_bin
                } else {
                    bin_iter.next().expect("bin quota matches covid count")
                })
            } else {
                None
            };
            plans.push(Plan {
                fixture,
                slice,
                bin,
                after25,
                covid,
                r25: r25 as f64,
                z_d: rng.normal(),
                z_s: rng.normal(),
                u_bin: rng.uniform(),
                eps_margin: rng.normal().clamp(-3.0, 3.0),
                d_raw: 0.0,
                margin: 0.05,
                odds: [2.0, 3.5, 4.0],
                p_hat: [0.4, 0.3, 0.3],
                d_hat: 0.0,
                p_star: [0.4, 0.3],
                eta: [0.0, 0.0],
                outcome: OUT_DRAW,
                pinned: is_derby || is_ghost,
                goals: (0, 0),
            });
        }
        assert!(bin_iter.next().is_none());

        Synth {
            plans,
            margin_corr: [0.0; 4],
            sigma_margin: 0.0022,
            base_sigma: [0.31, 0.32, 0.31],
        }
    }

    /// Regenerates differences, draw shares, margins, odds and model
    /// expectations from the current knobs. Pure function of frozen draws.
    pub fn regenerate(&mut self, knobs: &Knobs) {
        // raw differences
        let mut covid_sum = 0.0;
        for plan in self.plans.iter_mut() {
            if plan.slice == 3 {
                let bin = BINS[plan.bin.unwrap()];
                let (upper, lower) = (bin.0, bin.1);
                let width = upper - lower;
                let center = 0.5 * (upper + lower);
                let raw = lower + width * (0.08 + 0.84 * plan.u_bin);
                let spread = knobs.covid_spread;
                plan.d_raw = (center + spread * (raw - center))
                    .clamp(lower + 0.03 * width, upper - 0.03 * width);
                covid_sum += plan.d_raw;
            } else {
                let group = plan.slice; // 0, 1, 2
                let skew = 0.25;
                let t = (plan.z_d + skew * (plan.z_d * plan.z_d - 1.0))
                    / libm::sqrt(1.0 + 2.0 * skew * skew);
                let sigma = self.base_sigma[group] * knobs.sigma_scale;
                plan.d_raw = (knobs.mu[group] + sigma * t).clamp(-0.70, 0.86);
            }
        }
        // pull the closed-doors mean onto its target, respecting bin edges
        let target_sum = COVID_MEAN_DIFF * 83.0;
        let delta = target_sum - covid_sum;
        if delta.abs() > 1e-12 {
            let mut headroom = 0.0;
            for plan in self.plans.iter().filter(|p| p.slice == 3) {
                let bin = BINS[plan.bin.unwrap()];
                let width = bin.0 - bin.1;
                headroom += if delta > 0.0 {
                    (bin.0 - 0.02 * width) - plan.d_raw
                } else {
                    plan.d_raw - (bin.1 + 0.02 * width)
                };
            }
            if headroom > delta.abs() {
                // shift each match proportionally to its room in the needed
                // direction; room carries the sign of delta via `scale`
                let scale = delta / headroom;
                for plan in self.plans.iter_mut().filter(|p| p.slice == 3) {
                    let bin = BINS[plan.bin.unwrap()];
                    let width = bin.0 - bin.1;
                    let room = if delta > 0.0 {
                        (bin.0 - 0.02 * width) - plan.d_raw
                    } else {
                        plan.d_raw - (bin.1 + 0.02 * width)
                    };
                    plan.d_raw = (plan.d_raw + scale * room.abs())
                        .clamp(bin.1 + 0.02 * width, bin.0 - 0.02 * width);
                }
            }
        }

        // draw shares, margins, odds, implied probabilities, expectations
        for plan in self.plans.iter_mut() {
            let s0 = if plan.slice == 3 { knobs.s0[3] } else { knobs.s0[plan.slice] };
            let d = plan.d_raw;
            let mut s = s0 - 0.22 * d * d + 0.006 * plan.z_s;
            s = s.clamp(0.08, 0.30).min(1.0 - d.abs() - 0.05);
            let p_home = (1.0 - s + d) / 2.0;
            let p_away = (1.0 - s - d) / 2.0;

            let late_bump = if plan.fixture.season <= 4 && plan.after25 { 0.0002 } else { 0.0 };
            plan.margin = margin_trend(plan.fixture.season)
                + late_bump
                + self.margin_corr[plan.slice]
                + MARGIN_DIFF_SLOPE * d.abs()
                + self.sigma_margin * plan.eps_margin;

            let scale = 1.0 + plan.margin;
            plan.odds = [
                round2((1.0 / (p_home * scale)).max(1.011)),
                round2((1.0 / (s * scale)).max(1.011)),
                round2((1.0 / (p_away * scale)).max(1.011)),
            ];
            let inv = [1.0 / plan.odds[0], 1.0 / plan.odds[1], 1.0 / plan.odds[2]];
            let total = inv[0] + inv[1] + inv[2];
            plan.p_hat = [inv[0] / total, inv[1] / total, inv[2] / total];
            plan.d_hat = plan.p_hat[0] - plan.p_hat[2];

            for (side, implied) in [(0usize, plan.p_hat[0]), (1, plan.p_hat[2])] {
                let away = side as f64;
                let covid = plan.covid as u8 as f64;
                let x = [
                    1.0,
                    implied,
                    away,
                    plan.after25 as u8 as f64,
                    covid,
                    away * covid,
                    plan.r25,
                    plan.r25 * covid,
                ];
                let eta: f64 = x.iter().zip(BETA_M2).map(|(a, b)| a * b).sum();
                plan.eta[side] = eta;
                plan.p_star[side] = inv_logit(eta);
            }
        }
    }

    /// Expected-win sums under the current state, split the way the score
    /// equations need them.
    fn sums(&self) -> Sums {
        let mut s = Sums::default();
        let ghost_date = Date::new(2020, 3, 11).unwrap();
        for plan in &self.plans {
            let both = plan.p_star[0] + plan.p_star[1];
            s.total += both;
            s.away += plan.p_star[1];
            match plan.slice {
                1 => {
                    s.late_total += both;
                }
                3 => {
                    s.covid_home += plan.p_star[0];
                    s.covid_away += plan.p_star[1];
                    if plan.fixture.date != ghost_date {
                        s.covid_except_ghost += both;
                    }
                }
                _ => {}
            }
            for side in 0..2 {
                s.ll += plan.p_star[side] * plan.eta[side] - softplus(plan.eta[side]);
            }
        }
        s
    }

    /// Tiny damped Newton over a subset of knobs against a residual closure.
    fn newton<const K: usize>(
        &mut self,
        knobs: &mut Knobs,
        get: fn(&Knobs) -> [f64; K],
        set: fn(&mut Knobs, [f64; K]),
        residual: impl Fn(&Sums, &Knobs) -> [f64; K],
    ) {
        for _ in 0..12 {
            self.regenerate(knobs);
            let f0 = residual(&self.sums(), knobs);
            if f0.iter().map(|v| v * v).sum::<f64>() < 1e-4 {
                break;
            }
            let x0 = get(knobs);
            let h = 5e-4;
            let mut jac_rows: Vec<Vec<f64>> = vec![Vec::with_capacity(K); K];
            for j in 0..K {
                let mut xp = x0;
                xp[j] += h;
                let mut kp = knobs.clone();
                set(&mut kp, xp);
                self.regenerate(&kp);
                let fp = residual(&self.sums(), &kp);
                for (row, (a, b)) in jac_rows.iter_mut().zip(fp.iter().zip(&f0)) {
                    row.push((a - b) / h);
                }
            }
            let jac = Matrix::from_rows(&jac_rows);
            let rhs: Vec<f64> = f0.iter().map(|v| -v).collect();
            let Ok(ls) = qr_least_squares(jac, &rhs) else { break };
            let mut x = x0;
            for (xi, si) in x.iter_mut().zip(&ls.coefficients) {
                *xi += 0.8 * si.clamp(-0.05, 0.05);
            }
            set(knobs, x);
        }
        self.regenerate(knobs);
    }

    /// Staged calibration. The covid group is pinned by its own score
    /// equations, the late group by the after-round-25 equation, the pooled
    /// early/spectator group by the intercept and away equations, and the
    /// global spread by the likelihood target.
    pub fn calibrate(&mut self) -> Knobs {
        let mut knobs = Knobs::initial();
        let wins_total: f64 = SLICES.iter().map(|s| (s.home_wins + s.away_wins) as f64).sum();
        let wins_away: f64 = SLICES.iter().map(|s| s.away_wins as f64).sum();
        let covid_home = SLICES[3].home_wins as f64;
        let covid_away = SLICES[3].away_wins as f64;
        // after-25 wins: late rounds of prior seasons plus the closed-doors
        // matches except the (home-win) ghost match
        let wins_after25 =
            (SLICES[1].home_wins + SLICES[1].away_wins) as f64 + covid_home + covid_away - 1.0;

        for _ in 0..8 {
            // closed doors: draw level and within-bin spread against the
            // covid and away-x-covid equations
            self.newton(
                &mut knobs,
                |k| [k.s0[3], k.covid_spread],
                |k, x| {
                    k.s0[3] = x[0].clamp(0.14, 0.32);
                    k.covid_spread = x[1].clamp(0.4, 1.5);
                },
                move |s, _| {
                    [s.covid_home - covid_home, s.covid_away - covid_away]
                },
            );
            // late rounds: draw level against the after-25 equation
            self.newton(
                &mut knobs,
                |k| [k.s0[1]],
                |k, x| {
                    k.s0[1] = x[0].clamp(0.14, 0.32);
                },
                move |s, _| {
                    let covid_after25 = s.covid_except_ghost;
                    [s.late_total - (wins_after25 - covid_after25)]
                },
            );
            // early + spectator pool: location and draw level against the
            // intercept and away equations, spectator knobs tied with a
            // fixed realism offset
            self.newton(
                &mut knobs,
                |k| [k.mu[0], k.s0[0]],
                |k, x| {
                    k.mu[0] = x[0].clamp(0.0, 0.25);
                    k.s0[0] = x[1].clamp(0.16, 0.30);
                    k.mu[2] = k.mu[0] - 0.045;
                    k.s0[2] = k.s0[0] - 0.02;
                },
                move |s, _| [s.total - wins_total, s.away - wins_away],
            );
            // global spread against the likelihood target
            self.regenerate(&knobs);
            let ll = self.sums().ll;
            let err = ll - LL2_TARGET;
            if err.abs() < 0.8 {
                break;
            }
            // wider spreads lower the entropy, raising the likelihood
            knobs.sigma_scale = (knobs.sigma_scale + (-err) * 4e-3).clamp(0.6, 2.0);
        }
        self.regenerate(&knobs);
        knobs
    }

    /// Iteratively corrects per-slice margin levels and the noise scale so
    /// the post-rounding slice means and the margin-model R-squared land on
    /// target. Recomputes expectations afterwards.
    pub fn tune_margins(&mut self, knobs: &Knobs) {
        for _ in 0..8 {
            self.regenerate(knobs);
            // slice mean corrections
            let mut sums = [0.0f64; 4];
            let mut margins: Vec<f64> = Vec::with_capacity(self.plans.len());
            for plan in &self.plans {
                let m = 1.0 / plan.odds[0] + 1.0 / plan.odds[1] + 1.0 / plan.odds[2] - 1.0;
                sums[plan.slice] += m;
                margins.push(m);
            }
            let mut worst = 0.0f64;
            for (i, spec) in SLICES.iter().enumerate() {
                let mean = sums[i] / spec.matches as f64;
                let delta = spec.mean_margin - mean;
                self.margin_corr[i] += delta;
                worst = worst.max(delta.abs());
            }

            // R-squared of margin ~ |diff| + season on the post-rounding data
            let (r2, _) = self.margin_fit(&margins);
            let var = variance(&margins);
            let target_r2 = 0.468;
            let noise_delta = (r2 - target_r2) * var / target_r2.max(0.2);
            let new_sigma2 = (self.sigma_margin * self.sigma_margin + noise_delta).max(1e-8);
            let sigma_step = libm::sqrt(new_sigma2);
            let r2_ok = (r2 - target_r2).abs() < 0.01;
            if !r2_ok {
                self.sigma_margin = sigma_step;
            }
            if worst < 5e-5 && r2_ok {
                break;
            }
        }
        self.regenerate(knobs);
    }

    /// R-squared and coefficients of the embedded margin regression,
    /// computed from the synthesised data (used only for tuning).
    fn margin_fit(&self, margins: &[f64]) -> (f64, Vec<f64>) {
        let rows: Vec<Vec<f64>> = self
            .plans
            .iter()
            .map(|p| vec![1.0, p.d_hat.abs(), p.fixture.season as f64])
            .collect();
        let x = Matrix::from_rows(&rows);
        let ls = qr_least_squares(x.clone(), margins).expect("margin design full rank");
        let fitted = x.mul_vec(&ls.coefficients);
        let ssr: f64 = fitted
            .iter()
            .zip(margins)
            .map(|(f, y)| (y - f) * (y - f))
            .sum();
        let sst = variance(margins) * margins.len() as f64;
        (1.0 - ssr / sst, ls.coefficients)
    }
}

fn remove_one(items: &mut Vec<usize>, value: usize) {
    let pos = items.iter().position(|v| *v == value).expect("bin quota available");
    items.remove(pos);
}

fn variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}
