//! Scenario execution: build the initial conditions, run the batch, evaluate
//! the scenario's checks and write the artifacts.

use std::path::PathBuf;

use bohmpair_core::checks::all_passed;
use bohmpair_core::ensemble::{decorrelated_endpoints, density_distance, same_side_probability};
use bohmpair_core::sampling::sample_initial;
use bohmpair_core::{
    four_slit, run_pairs, EnsembleResult, PairConfiguration, PropertyCheck, RunOptions, Trajectory,
};
use serde::Serialize;
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::config::{Scenario, ScenarioConfig};
use crate::output::{write_summary, write_trajectories};

pub const TOOL_NAME: &str = "bohmpair";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest tolerated fraction of aborted trajectories.
pub const MAX_ABORT_FRACTION: f64 = 1e-3;
/// Largest `|y(t_end) - y(0)|` of the narrow-packet figure, in `sigma0`.
pub const STRAIGHT_LINE_DRIFT: f64 = 0.8;
/// Largest `|y1 + y2|` of a symmetric pair, in `sigma0`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-6;
/// Bohmian density distance allowed relative to direct sampling.
pub const EQUIVARIANCE_RATIO: f64 = 1.5;
/// Times of the equivariance comparison, as fractions of the flight time.
pub const EQUIVARIANCE_FRACTIONS: [f64; 2] = [0.3, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    ConfigError = 1,
    RuntimeFailure = 2,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Simulation(#[from] bohmpair_core::Error),
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceAt {
    pub t: f64,
    pub bohmian: f64,
    pub baseline: f64,
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub tool: &'static str,
    pub version: &'static str,
    pub scenario: Scenario,
    pub seed: u64,
    pub config: ScenarioConfig,
    pub t_end: f64,
    pub result: Option<EnsembleResult>,
    /// `|Psi(t_end)|^2` mass of the same-side quadrants.
    pub same_side_probability: Option<f64>,
    pub distances: Vec<DistanceAt>,
    pub checks: Vec<PropertyCheck>,
    pub passed: bool,
    pub trajectory_files: Vec<PathBuf>,
}

pub struct Outcome {
    pub summary: Summary,
    pub trajectories: Vec<Trajectory>,
}

impl Outcome {
    pub fn exit_status(&self) -> ExitStatus {
        if self.summary.passed {
            ExitStatus::Success
        } else {
            ExitStatus::RuntimeFailure
        }
    }
}

fn initial_conditions(cfg: &ScenarioConfig) -> bohmpair_core::Result<Vec<PairConfiguration>> {
    if cfg.initial_pairs.is_empty() {
        sample_initial(&cfg.sampler, cfg.statistics, &cfg.params)
    } else {
        Ok(cfg
            .initial_pairs
            .iter()
            .map(|&[y1, y2]| PairConfiguration::transverse(y1, y2, 0.0))
            .collect())
    }
}

fn abort_check(result: &EnsembleResult) -> PropertyCheck {
    PropertyCheck::at_most(
        "abort_fraction",
        result.abort_fraction(),
        MAX_ABORT_FRACTION,
        format!("{} of {} trajectories aborted", result.aborted_count, result.n_pairs),
    )
}

fn flight_time_check(cfg: &ScenarioConfig, trajectories: &[Trajectory]) -> PropertyCheck {
    let t_end = cfg.t_end();
    let step = t_end / cfg.integrator.output_steps as f64;
    let worst = trajectories
        .iter()
        .filter(|t| t.is_complete())
        .filter_map(|t| t.last())
        .map(|s| (s.config.t - t_end).abs())
        .fold(0.0, f64::max);
    PropertyCheck::at_most(
        "flight_time",
        worst,
        step,
        format!("last sample time vs L m / (hbar kx) = {t_end:.6e} s, within one output step"),
    )
}

/// Two-sided significance equivalent to three standard deviations.
pub const THREE_SIGMA_P_VALUE: f64 = 0.0027;

/// Ensemble same-side fraction against the quadrature value: within three
/// binomial standard deviations, or, when the expected count is too small
/// for the normal approximation (`n q (1 - q) < 9`), an exact binomial test
/// at the same significance.
pub fn same_side_check(result: &EnsembleResult, probability: f64) -> PropertyCheck {
    let n = result.endpoints.len();
    let k = result.endpoints.iter().filter(|e| e[0] * e[1] > 0.0).count();
    let variance = n as f64 * probability * (1.0 - probability);
    let detail = format!(
        "ensemble {:.4} vs quadrature {:.4} over {n} pairs",
        result.same_side_fraction, probability
    );
    if variance >= 9.0 {
        let sigma = (variance).sqrt() / n as f64;
        PropertyCheck::at_most(
            "same_side_fraction",
            (result.same_side_fraction - probability).abs(),
            3.0 * sigma,
            detail,
        )
    } else {
        PropertyCheck::above(
            "same_side_fraction",
            binomial_two_sided_p(k as u64, n as u64, probability),
            THREE_SIGMA_P_VALUE,
            format!("{detail}; exact binomial p-value"),
        )
    }
}

/// Two-sided tail probability of observing `k` successes out of `n`.
pub fn binomial_two_sided_p(k: u64, n: u64, q: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let Ok(dist) = Binomial::new(q.clamp(0.0, 1.0), n) else {
        return 0.0;
    };
    let tail = if (k as f64) >= n as f64 * q {
        if k == 0 {
            1.0
        } else {
            dist.sf(k - 1)
        }
    } else {
        dist.cdf(k)
    };
    (2.0 * tail).min(1.0)
}

fn max_over_samples(trajectories: &[Trajectory], f: impl Fn(&PairConfiguration) -> f64) -> f64 {
    trajectories
        .iter()
        .flat_map(|t| t.samples.iter())
        .map(|s| f(&s.config))
        .fold(0.0, f64::max)
}

/// Run the scenario without writing anything.
pub fn execute(cfg: &ScenarioConfig) -> Result<Outcome, RunError> {
    let p = &cfg.params;
    let t_end = cfg.t_end();
    let sigma0 = p.sigma0;
    let mut checks = Vec::new();
    let mut distances = Vec::new();
    let mut result = None;
    let mut probability = None;
    let mut trajectories = Vec::new();

    if cfg.scenario == Scenario::FourSlitCheck {
        checks = four_slit::run_checks(p, &cfg.integrator, cfg.sampler.seed, cfg.sampler.n_pairs)?;
    } else {
        let initial = initial_conditions(cfg)?;
        let opts = RunOptions {
            keep_trajectories: true,
            reference_seed: cfg.sampler.seed,
        };
        let (res, trajs) = run_pairs(&initial, &cfg.integrator, cfg.statistics, p, t_end, &opts)?;
        checks.push(abort_check(&res));
        checks.push(flight_time_check(cfg, &trajs));

        match cfg.scenario {
            Scenario::Fig3a => {
                let drift = trajs
                    .iter()
                    .filter_map(|t| Some((t.first()?.config, t.last()?.config)))
                    .map(|(a, b)| (b.y1 - a.y1).abs().max((b.y2 - a.y2).abs()) / sigma0)
                    .fold(0.0, f64::max);
                checks.push(PropertyCheck::at_most(
                    "straight_lines",
                    drift,
                    STRAIGHT_LINE_DRIFT,
                    "max |y(t_end) - y(0)| over the batch, sigma0",
                ));
            }
            Scenario::Fig4a => {
                let asym = max_over_samples(&trajs, |c| (c.y1 + c.y2).abs() / sigma0);
                checks.push(PropertyCheck::at_most(
                    "pair_symmetry",
                    asym,
                    SYMMETRY_TOLERANCE,
                    "max |y1 + y2| over all output times, sigma0",
                ));
            }
            Scenario::Fig4b => {
                let y2 = trajs
                    .iter()
                    .find(|t| t.first().is_some_and(|s| s.config == initial[0]))
                    .filter(|t| t.is_complete())
                    .and_then(|t| t.last())
                    .map_or(f64::NEG_INFINITY, |s| s.config.y2 / sigma0);
                checks.push(PropertyCheck::above(
                    "axis_crossing",
                    y2,
                    0.0,
                    "final height of the first lower particle, sigma0",
                ));
            }
            Scenario::Equivariance => {
                for &fraction in &EQUIVARIANCE_FRACTIONS[..EQUIVARIANCE_FRACTIONS.len() - 1] {
                    let t = fraction * t_end;
                    let (early, _) = run_pairs(&initial, &cfg.integrator, cfg.statistics, p, t, &RunOptions {
                        keep_trajectories: false,
                        ..opts
                    })?;
                    let mut aborts = abort_check(&early);
                    aborts.name = format!("abort_fraction_t{t:.3e}");
                    checks.push(aborts);
                    distances.push(distance_at(t, &early)?);
                }
                distances.push(distance_at(t_end, &res)?);
                for d in &distances {
                    checks.push(PropertyCheck::at_most(
                        format!("equivariance_t{:.3e}", d.t),
                        d.bohmian / d.baseline,
                        EQUIVARIANCE_RATIO,
                        format!("TV distance {:.4} vs direct-sampling baseline {:.4}", d.bohmian, d.baseline),
                    ));
                }
                let control = decorrelated_endpoints(&initial, p, t_end);
                let dc = density_distance(&control, cfg.statistics, p, t_end, cfg.sampler.seed)?;
                checks.push(PropertyCheck::above(
                    "decorrelated_control",
                    dc.bohmian / dc.baseline,
                    1.0,
                    format!("TV distance {:.4} vs baseline {:.4}", dc.bohmian, dc.baseline),
                ));
            }
            _ => {}
        }
        let born_sampled = cfg.initial_pairs.is_empty()
            && cfg.sampler.method != bohmpair_core::SamplingMethod::Symmetric;
        if born_sampled {
            let q = same_side_probability(cfg.statistics, p, t_end)?;
            probability = Some(q);
            checks.push(same_side_check(&res, q));
        }
        result = Some(res);
        trajectories = trajs;
    }

    let summary = Summary {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        scenario: cfg.scenario,
        seed: cfg.sampler.seed,
        config: cfg.clone(),
        t_end,
        result,
        same_side_probability: probability,
        distances,
        passed: all_passed(&checks),
        checks,
        trajectory_files: Vec::new(),
    };
    Ok(Outcome { summary, trajectories })
}

fn distance_at(t: f64, res: &EnsembleResult) -> Result<DistanceAt, RunError> {
    let d = res
        .density_distance
        .ok_or(bohmpair_core::Error::TooFewSamples {
            required: bohmpair_core::ensemble::MIN_DISTANCE_SAMPLES,
            got: res.endpoints.len(),
        })?;
    Ok(DistanceAt {
        t,
        bohmian: d.bohmian,
        baseline: d.baseline,
    })
}

/// Run the scenario and write `summary.json` (plus trajectory CSVs when
/// enabled) into `cfg.output_dir`.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Outcome, RunError> {
    let mut outcome = execute(cfg)?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    if cfg.output.trajectories {
        outcome.summary.trajectory_files = write_trajectories(&cfg.output_dir, &outcome.trajectories)?;
    }
    write_summary(&cfg.output_dir, &outcome.summary)?;
    Ok(outcome)
}
