//! Integration of Bohmian pair trajectories.
//!
//! The longitudinal motion is uniform at `hbar kx / m` and is applied
//! analytically; only the transverse heights `(y1, y2)` are integrated, in
//! scaled units, with the Dormand-Prince pair from [`crate::rk45`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{PhysicalParams, Scales};
use crate::rk45::{self, OdeSystem, SolveError, StepControl};
use crate::velocity::{transverse_velocity_scaled, PairVelocity, DEFAULT_NODE_GUARD};
use crate::wavefunction::{density_scaled, initial_density_peak_scaled, PairConfiguration, SpinStatistics};

/// Fraction of the configured tolerances granted to the local error of each
/// step. Accumulated local errors grow by up to ~8x along spreading
/// trajectories, so the margin keeps endpoint errors within the tolerances.
pub const LOCAL_ERROR_FRACTION: f64 = 0.05;

/// Tolerances are accuracy targets for the transverse coordinates at every
/// output time, in the mixed norm `abs_tol + rel_tol |y|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    /// Relative error tolerance.
    pub rel_tol: f64,
    /// Absolute error tolerance, in units of `sigma0`.
    pub abs_tol: f64,
    /// Initial step, s.
    pub h_init: f64,
    /// Smallest admissible step, s.
    pub h_min: f64,
    /// Largest admissible step, s.
    pub h_max: f64,
    /// Abort once `|Psi|^2` drops below this fraction of the peak `t = 0`
    /// density.
    pub density_floor: f64,
    /// Number of equal output intervals between start and end time.
    pub output_steps: usize,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-9,
            h_init: 1e-12,
            h_min: 1e-24,
            h_max: 1e-8,
            density_floor: 1e-12,
            output_steps: 200,
            max_steps: 1_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("density_floor", self.density_floor),
            ("h_min", self.h_min),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(field, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.h_min <= self.h_init) {
            return Err(Error::invalid("h_init", "must satisfy h_min <= h_init"));
        }
        if !(self.h_init <= self.h_max) {
            return Err(Error::invalid("h_max", "must satisfy h_init <= h_max"));
        }
        if self.output_steps == 0 {
            return Err(Error::invalid("output_steps", "must be >= 1"));
        }
        if self.max_steps == 0 {
            return Err(Error::invalid("max_steps", "must be >= 1"));
        }
        Ok(())
    }

    /// Both tolerances replaced by `tol`.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self.abs_tol = tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryStatus {
    Completed,
    /// The pair approached a node of the wavefunction; the samples end at the
    /// last output time reached.
    NodeProximityAbort,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub config: PairConfiguration,
    pub velocity: PairVelocity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub status: TrajectoryStatus,
}

impl Trajectory {
    pub fn first(&self) -> Option<&TrajectorySample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&TrajectorySample> {
        self.samples.last()
    }

    pub fn is_complete(&self) -> bool {
        self.status == TrajectoryStatus::Completed
    }
}

/// Velocity field of one pair wavefunction, with the constants needed to
/// integrate it precomputed. Cheap to share across threads.
#[derive(Debug, Clone, Copy)]
pub struct BohmianFlow {
    params: PhysicalParams,
    stats: SpinStatistics,
    scales: Scales,
    peak_density: f64,
}

enum Stop {
    Node,
    Floor,
}

struct ScaledSystem<'a> {
    flow: &'a BohmianFlow,
    floor: f64,
}

impl OdeSystem<2> for ScaledSystem<'_> {
    type Error = Stop;

    #[inline]
    fn rhs(&mut self, s: f64, y: &[f64; 2]) -> std::result::Result<[f64; 2], Stop> {
        let f = self.flow;
        transverse_velocity_scaled(y[0], y[1], s, f.scales.offset, f.stats, DEFAULT_NODE_GUARD)
            .map(|(a, b)| [a, b])
            .map_err(|_| Stop::Node)
    }

    fn accept(&mut self, s: f64, y: &[f64; 2]) -> std::result::Result<(), Stop> {
        let f = self.flow;
        if density_scaled(y[0], y[1], s, f.scales.offset, f.stats) < self.floor {
            return Err(Stop::Floor);
        }
        Ok(())
    }
}

impl BohmianFlow {
    /// Requires valid parameters with `ky = 0`.
    pub fn new(stats: SpinStatistics, params: &PhysicalParams) -> Result<Self> {
        params.validate()?;
        params.require_zero_ky()?;
        let scales = params.scales();
        Ok(Self {
            params: *params,
            stats,
            scales,
            peak_density: initial_density_peak_scaled(stats, scales.offset),
        })
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn stats(&self) -> SpinStatistics {
        self.stats
    }

    /// `|Psi(c)|^2` relative to the peak of the `t = 0` density.
    pub fn relative_density(&self, c: &PairConfiguration) -> f64 {
        let sc = &self.scales;
        density_scaled(c.y1 / sc.length, c.y2 / sc.length, sc.tau(c.t), sc.offset, self.stats) / self.peak_density
    }

    fn velocity_at(&self, c: &PairConfiguration) -> PairVelocity {
        let sc = &self.scales;
        let vx = self.params.x_velocity();
        // Output samples are never closer to a node than the steps that
        // reached them; the guard is only enforced during stepping.
        let (vy1, vy2) =
            transverse_velocity_scaled(c.y1 / sc.length, c.y2 / sc.length, sc.tau(c.t), sc.offset, self.stats, 0.0)
                .unwrap_or((f64::NAN, f64::NAN));
        PairVelocity {
            vx1: vx,
            vy1: vy1 * sc.velocity,
            vx2: vx,
            vy2: vy2 * sc.velocity,
        }
    }

    /// Integrate the pair from `initial` to `t_end`, sampling at
    /// `cfg.output_steps + 1` equally spaced times including both ends.
    pub fn integrate(&self, initial: &PairConfiguration, t_end: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
        cfg.validate()?;
        let t0 = initial.t;
        if !(t0 >= 0.0) {
            return Err(Error::NegativeTime { t: t0 });
        }
        if !(t_end > t0) {
            return Err(Error::invalid("t_end", format!("must exceed the start time {t0}")));
        }
        let relative = self.relative_density(initial);
        if !(relative >= cfg.density_floor) {
            return Err(Error::DensityBelowFloor {
                density: relative,
                floor: cfg.density_floor,
            });
        }

        let sc = &self.scales;
        let n = cfg.output_steps;
        let times: Vec<f64> = (0..=n)
            .map(|i| if i == n { t_end } else { t0 + (t_end - t0) * i as f64 / n as f64 })
            .collect();
        let scaled_times: Vec<f64> = times.iter().map(|&t| sc.tau(t)).collect();
        let ctrl = StepControl {
            rel_tol: cfg.rel_tol * LOCAL_ERROR_FRACTION,
            abs_tol: cfg.abs_tol * LOCAL_ERROR_FRACTION,
            h_init: sc.tau(cfg.h_init),
            h_min: sc.tau(cfg.h_min),
            h_max: sc.tau(cfg.h_max),
            max_steps: cfg.max_steps,
            ..StepControl::default()
        };
        let mut system = ScaledSystem {
            flow: self,
            floor: cfg.density_floor * self.peak_density,
        };
        let y0 = [initial.y1 / sc.length, initial.y2 / sc.length];
        let s_end = *scaled_times.last().expect("at least two output times");

        let (solution, status) = match rk45::integrate(&mut system, sc.tau(t0), y0, s_end, &scaled_times, &ctrl) {
            Ok(sol) => (sol, TrajectoryStatus::Completed),
            Err(failure) => match failure.error {
                SolveError::System { .. } => (failure.partial, TrajectoryStatus::NodeProximityAbort),
                SolveError::StepUnderflow { t } => return Err(Error::StepUnderflow { t: t * sc.time }),
                SolveError::StepBudget { t, steps } => {
                    return Err(Error::StepBudgetExhausted {
                        t: t * sc.time,
                        max_steps: steps,
                    })
                }
            },
        };

        let vx = self.params.x_velocity();
        let samples = solution
            .samples
            .iter()
            .zip(&times)
            .map(|(&(_, [e1, e2]), &t)| {
                let dx = vx * (t - t0);
                let config = PairConfiguration::new(initial.x1 + dx, e1 * sc.length, initial.x2 + dx, e2 * sc.length, t);
                TrajectorySample {
                    config,
                    velocity: self.velocity_at(&config),
                }
            })
            .collect();
        Ok(Trajectory { samples, status })
    }
}

/// Integrate one pair trajectory. See [`BohmianFlow::integrate`].
pub fn integrate_trajectory(
    initial: &PairConfiguration,
    t_end: f64,
    cfg: &IntegratorConfig,
    stats: SpinStatistics,
    p: &PhysicalParams,
) -> Result<Trajectory> {
    BohmianFlow::new(stats, p)?.integrate(initial, t_end, cfg)
}
