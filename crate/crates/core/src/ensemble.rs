//! Batches of trajectories and the statistics comparing their endpoints with
//! the quantum-mechanical pair density.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::{total_variation, SquareGrid};
use crate::params::PhysicalParams;
use crate::quadrature::GaussLegendre;
use crate::sampling::{rng_for, sample_born, sample_initial, SamplerConfig, REFERENCE_STREAM};
use crate::trajectory::{BohmianFlow, IntegratorConfig, Trajectory};
use crate::wavefunction::{density_scaled, PairConfiguration, SpinStatistics};

/// Minimum number of endpoints for a density comparison.
pub const MIN_DISTANCE_SAMPLES: usize = 100;
/// Bins per axis of the comparison grid.
pub const DISTANCE_BINS: usize = 40;
/// Half-width of the comparison grid in units of `|sigma_t|`.
pub const DISTANCE_HALF_WIDTH: f64 = 10.0;

/// Total-variation distances to the binned `|Psi(t)|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityDistance {
    /// Distance of the supplied endpoints.
    pub bohmian: f64,
    /// Distance of an equally sized direct sample of `|Psi(t)|^2`: the
    /// finite-sample noise level.
    pub baseline: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub n_pairs: usize,
    pub t_end: f64,
    /// `(y1, y2)` at `t_end` of every completed trajectory, metres.
    pub endpoints: Vec<[f64; 2]>,
    /// Fraction of completed pairs with `y1 y2 > 0` at `t_end`.
    pub same_side_fraction: f64,
    /// `sqrt(<((y1 + y2) / 2)^2>)` over the initial conditions, metres.
    pub delta_y0_estimate: f64,
    /// Present once at least [`MIN_DISTANCE_SAMPLES`] pairs completed.
    pub density_distance: Option<DensityDistance>,
    pub aborted_count: usize,
}

impl EnsembleResult {
    pub fn abort_fraction(&self) -> f64 {
        self.aborted_count as f64 / self.n_pairs.max(1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    /// Return the full trajectories alongside the summary.
    pub keep_trajectories: bool,
    /// Seed of the reference sample for the density-distance baseline.
    pub reference_seed: u64,
}

pub fn same_side_fraction(endpoints: &[[f64; 2]]) -> f64 {
    if endpoints.is_empty() {
        return 0.0;
    }
    endpoints.iter().filter(|e| e[0] * e[1] > 0.0).count() as f64 / endpoints.len() as f64
}

/// `sqrt(<((y1 + y2) / 2)^2>)`.
pub fn centre_spread(initial: &[PairConfiguration]) -> f64 {
    if initial.is_empty() {
        return 0.0;
    }
    let sum: f64 = initial.iter().map(|c| (0.5 * (c.y1 + c.y2)).powi(2)).sum();
    (sum / initial.len() as f64).sqrt()
}

/// Negative control for [`density_distance`]: each initial height scaled by
/// `|sigma_t| / sigma0` as if every particle spread about the axis on its own,
/// ignoring the pair dynamics.
pub fn decorrelated_endpoints(initial: &[PairConfiguration], p: &PhysicalParams, t: f64) -> Vec<[f64; 2]> {
    let factor = 1.0f64.hypot(p.scales().tau(t));
    initial.iter().map(|c| [c.y1 * factor, c.y2 * factor]).collect()
}

/// Probability under `|Psi(t)|^2` that both particles are on the same side of
/// the axis. The density is even under `(y1, y2) -> (-y1, -y2)`, so this is
/// twice the mass of the positive quadrant.
pub fn same_side_probability(stats: SpinStatistics, p: &PhysicalParams, t: f64) -> Result<f64> {
    p.require_zero_ky()?;
    let sc = p.scales();
    let s = sc.tau(t);
    let reach = DISTANCE_HALF_WIDTH * 1.0f64.hypot(s) + sc.offset;
    let rule = GaussLegendre::new(8);
    let panels = 64;
    let width = reach / panels as f64;
    let quadrant: f64 = (0..panels * panels)
        .into_par_iter()
        .map(|cell| {
            let (i, j) = ((cell / panels) as f64, (cell % panels) as f64);
            rule.integrate_2d(
                |a, b| density_scaled(a, b, s, sc.offset, stats),
                (i * width, (i + 1.0) * width),
                (j * width, (j + 1.0) * width),
                1,
            )
        })
        .sum();
    Ok((2.0 * quadrant).clamp(0.0, 1.0))
}

/// The comparison grid at time `t`, in units of `sigma0`.
pub fn distance_grid(p: &PhysicalParams, t: f64) -> SquareGrid {
    let half = DISTANCE_HALF_WIDTH * 1.0f64.hypot(p.scales().tau(t));
    SquareGrid::new(-half, half, DISTANCE_BINS)
}

/// Exact cell probabilities of `|Psi(t)|^2` on `grid` (`sigma0` units); the
/// overflow cell takes the remainder.
pub fn born_cell_probabilities(grid: &SquareGrid, stats: SpinStatistics, p: &PhysicalParams, t: f64) -> Result<Vec<f64>> {
    p.require_zero_ky()?;
    let sc = p.scales();
    let s = sc.tau(t);
    let rule = GaussLegendre::new(6);
    let regular = grid.bins * grid.bins;
    let mut probs: Vec<f64> = (0..regular)
        .into_par_iter()
        .map(|cell| {
            let (ra, rb) = grid.bounds(cell);
            rule.integrate_2d(|a, b| density_scaled(a, b, s, sc.offset, stats), ra, rb, 1)
        })
        .collect();
    let inside: f64 = probs.iter().sum();
    probs.push((1.0 - inside).max(0.0));
    Ok(probs)
}

/// Total-variation distance between binned `endpoints` and `|Psi(t_end)|^2`,
/// together with the same statistic for a fresh direct sample of equal size.
pub fn density_distance(
    endpoints: &[[f64; 2]],
    stats: SpinStatistics,
    p: &PhysicalParams,
    t_end: f64,
    reference_seed: u64,
) -> Result<DensityDistance> {
    if endpoints.len() < MIN_DISTANCE_SAMPLES {
        return Err(Error::TooFewSamples {
            required: MIN_DISTANCE_SAMPLES,
            got: endpoints.len(),
        });
    }
    let grid = distance_grid(p, t_end);
    let exact = born_cell_probabilities(&grid, stats, p, t_end)?;
    let to_cells = |pts: &mut dyn Iterator<Item = (f64, f64)>| grid.frequencies(pts.map(|(a, b)| (a / p.sigma0, b / p.sigma0)));
    let observed = to_cells(&mut endpoints.iter().map(|e| (e[0], e[1])));
    let mut rng = rng_for(reference_seed, REFERENCE_STREAM);
    let reference = sample_born(stats, p, t_end, endpoints.len(), &mut rng)?;
    let direct = to_cells(&mut reference.into_iter());
    Ok(DensityDistance {
        bohmian: total_variation(&observed, &exact),
        baseline: total_variation(&direct, &exact),
    })
}

/// Integrate every pair in `initial` to `t_end` (in parallel) and summarise.
/// Failed integrations are counted in `aborted_count`, never propagated.
pub fn run_pairs(
    initial: &[PairConfiguration],
    integrator: &IntegratorConfig,
    stats: SpinStatistics,
    p: &PhysicalParams,
    t_end: f64,
    opts: &RunOptions,
) -> Result<(EnsembleResult, Vec<Trajectory>)> {
    integrator.validate()?;
    let flow = BohmianFlow::new(stats, p)?;
    let outcomes: Vec<Option<Trajectory>> = initial
        .par_iter()
        .map(|c| flow.integrate(c, t_end, integrator).ok())
        .collect();

    let mut endpoints = Vec::with_capacity(outcomes.len());
    let mut aborted_count = 0;
    for traj in outcomes.iter() {
        match traj {
            Some(tr) if tr.is_complete() => {
                let end = tr.last().expect("completed trajectories have samples").config;
                endpoints.push([end.y1, end.y2]);
            }
            _ => aborted_count += 1,
        }
    }
    let density_distance = if endpoints.len() >= MIN_DISTANCE_SAMPLES {
        Some(density_distance(&endpoints, stats, p, t_end, opts.reference_seed)?)
    } else {
        None
    };
    let result = EnsembleResult {
        n_pairs: initial.len(),
        t_end,
        same_side_fraction: same_side_fraction(&endpoints),
        delta_y0_estimate: centre_spread(initial),
        endpoints,
        density_distance,
        aborted_count,
    };
    let trajectories = if opts.keep_trajectories {
        outcomes.into_iter().flatten().collect()
    } else {
        Vec::new()
    };
    Ok((result, trajectories))
}

/// Sample initial conditions from `sampler`, integrate them to `t_end` and
/// summarise. Reproducible from `sampler.seed`.
pub fn run_ensemble(
    sampler: &SamplerConfig,
    integrator: &IntegratorConfig,
    stats: SpinStatistics,
    p: &PhysicalParams,
    t_end: f64,
) -> Result<EnsembleResult> {
    let initial = sample_initial(sampler, stats, p)?;
    let opts = RunOptions {
        keep_trajectories: false,
        reference_seed: sampler.seed,
    };
    Ok(run_pairs(&initial, integrator, stats, p, t_end, &opts)?.0)
}
