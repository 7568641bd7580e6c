//! Two-double-slit setup: the naive four-term wavefunction, the corrected
//! piecewise wavefunction, and the reflection that maps double-slit
//! trajectories onto it.

use serde::{Deserialize, Serialize};

use rand::Rng;

use crate::checks::PropertyCheck;
use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::sampling::rng_for;
use crate::trajectory::{BohmianFlow, IntegratorConfig, Trajectory};
use crate::velocity::{guidance_velocity, OracleOptions, PairVelocity};
use crate::wavefunction::{psi_slit, reduced_phase, ComplexAmplitude, PairConfiguration, Slit, SpinStatistics};

/// Which half of configuration space the pair occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlitRegion {
    /// `x1 > d`, `x2 < -d`.
    RightLeft,
    /// `x1 < -d`, `x2 > d`.
    LeftRight,
}

impl SlitRegion {
    pub fn name(self) -> &'static str {
        match self {
            SlitRegion::RightLeft => "right_left",
            SlitRegion::LeftRight => "left_right",
        }
    }

    pub fn contains(self, c: &PairConfiguration, p: &PhysicalParams) -> bool {
        let d = p.source_half_separation;
        match self {
            SlitRegion::RightLeft => c.x1 > d && c.x2 < -d,
            SlitRegion::LeftRight => c.x1 < -d && c.x2 > d,
        }
    }

    /// The region containing `c`, if any.
    pub fn locate(c: &PairConfiguration, p: &PhysicalParams) -> Option<Self> {
        [SlitRegion::RightLeft, SlitRegion::LeftRight]
            .into_iter()
            .find(|r| r.contains(c, p))
    }
}

/// Unnormalized four-term wavefunction
/// `A(1) B'(2) ± A(2) B'(1) + A'(2) B(1) ± A'(1) B(2)`; bosons select `+`.
///
/// For `+` this equals `2 cos[kx (x1 - x2)] Phi(y1, y2, t)`, for `-` it is
/// `2 i sin[kx (x1 - x2)] Phi`, so the x-dependence is a real factor up to a
/// constant phase.
pub fn naive_four_slit_psi(stats: SpinStatistics, c: &PairConfiguration, p: &PhysicalParams) -> ComplexAmplitude {
    let sign = stats.sign();
    let psi = |slit, x, y| psi_slit(slit, x, y, c.t, p);
    psi(Slit::A, c.x1, c.y1) * psi(Slit::BPrime, c.x2, c.y2)
        + sign * psi(Slit::A, c.x2, c.y2) * psi(Slit::BPrime, c.x1, c.y1)
        + psi(Slit::APrime, c.x2, c.y2) * psi(Slit::B, c.x1, c.y1)
        + sign * psi(Slit::APrime, c.x1, c.y1) * psi(Slit::B, c.x2, c.y2)
}

/// Guidance velocities of the naive four-term wavefunction, by central
/// differences. Both x-components vanish up to discretization error.
pub fn naive_velocity(
    c: &PairConfiguration,
    stats: SpinStatistics,
    p: &PhysicalParams,
    opts: &OracleOptions,
) -> Result<PairVelocity> {
    guidance_velocity(|q| naive_four_slit_psi(stats, q, p), c, p, opts)
}

/// `(vx1, vx2)` of the naive four-term wavefunction.
pub fn naive_x_velocity(c: &PairConfiguration, stats: SpinStatistics, p: &PhysicalParams) -> Result<(f64, f64)> {
    let v = naive_velocity(c, stats, p, &OracleOptions::default())?;
    Ok((v.vx1, v.vx2))
}

fn corrected_unchecked(region: SlitRegion, stats: SpinStatistics, c: &PairConfiguration, p: &PhysicalParams) -> ComplexAmplitude {
    let psi = |slit, x, y| psi_slit(slit, x, y, c.t, p);
    match region {
        SlitRegion::RightLeft => {
            psi(Slit::A, c.x1, c.y1) * psi(Slit::BPrime, c.x2, c.y2)
                + psi(Slit::APrime, c.x2, c.y2) * psi(Slit::B, c.x1, c.y1)
        }
        SlitRegion::LeftRight => {
            stats.sign()
                * (psi(Slit::A, c.x2, c.y2) * psi(Slit::BPrime, c.x1, c.y1)
                    + psi(Slit::APrime, c.x1, c.y1) * psi(Slit::B, c.x2, c.y2))
        }
    }
}

/// Corrected two-term wavefunction on one region (with `N' = 1`).
///
/// The two regional forms are exchanged by particle permutation, with an
/// overall `+` for bosons and `-` for fermions.
pub fn corrected_four_slit_psi(
    region: SlitRegion,
    stats: SpinStatistics,
    c: &PairConfiguration,
    p: &PhysicalParams,
) -> Result<ComplexAmplitude> {
    if !region.contains(c, p) {
        return Err(Error::RegionViolation {
            region: region.name(),
            x1: c.x1,
            x2: c.x2,
        });
    }
    Ok(corrected_unchecked(region, stats, c, p))
}

/// Guidance velocities of the corrected wavefunction, by central differences.
pub fn corrected_velocity(
    region: SlitRegion,
    stats: SpinStatistics,
    c: &PairConfiguration,
    p: &PhysicalParams,
    opts: &OracleOptions,
) -> Result<PairVelocity> {
    let d = p.source_half_separation;
    // The difference stencil must stay inside the region.
    let margin = 2.0 * opts.step / p.kx + 2.0 * f64::EPSILON * c.x1.abs().max(c.x2.abs());
    let inside = match region {
        SlitRegion::RightLeft => c.x1 > d + margin && c.x2 < -d - margin,
        SlitRegion::LeftRight => c.x1 < -d - margin && c.x2 > d + margin,
    };
    if !inside {
        return Err(Error::RegionViolation {
            region: region.name(),
            x1: c.x1,
            x2: c.x2,
        });
    }
    guidance_velocity(|q| corrected_unchecked(region, stats, q, p), c, p, opts)
}

/// Reflect a double-slit trajectory into the two-double-slit geometry:
/// `x2 -> -x2` for [`SlitRegion::RightLeft`], `x1 -> -x1` for
/// [`SlitRegion::LeftRight`], with the matching x-velocity negated. Applying
/// it twice gives back the input.
pub fn reflect_trajectory(traj: &Trajectory, region: SlitRegion) -> Trajectory {
    let samples = traj
        .samples
        .iter()
        .map(|s| {
            let mut out = *s;
            match region {
                SlitRegion::RightLeft => {
                    out.config.x2 = -out.config.x2;
                    out.velocity.vx2 = -out.velocity.vx2;
                }
                SlitRegion::LeftRight => {
                    out.config.x1 = -out.config.x1;
                    out.velocity.vx1 = -out.velocity.vx1;
                }
            }
            out
        })
        .collect();
    Trajectory {
        samples,
        status: traj.status,
    }
}

/// Random stream used by [`run_checks`].
pub const CHECK_STREAM: u64 = 2;

/// Relative agreement required between finite-difference and reference
/// velocities.
pub const ORACLE_TOLERANCE: f64 = 1e-6;

fn random_configuration<R: Rng>(rng: &mut R, p: &PhysicalParams) -> PairConfiguration {
    let y = |rng: &mut R, centre: f64| centre + p.sigma0 * rng.random_range(-2.5..2.5);
    let x = |rng: &mut R| rng.random_range(-1e-3..1e-3);
    PairConfiguration::new(
        x(rng),
        y(rng, p.slit_offset),
        x(rng),
        y(rng, -p.slit_offset),
        rng.random_range(0.05..1.5) * p.scales().time,
    )
}

/// The three property families of the two-double-slit analysis, on
/// `samples` random configurations and one reflected trajectory:
///
/// 1. the naive four-term wavefunction factorizes as `cos`/`sin` of
///    `kx (x1 - x2)` times an x-independent factor;
/// 2. its guidance x-velocities vanish;
/// 3. a double-slit boson trajectory reflected into either region moves with
///    the guidance velocities of the corrected wavefunction.
pub fn run_checks(
    p: &PhysicalParams,
    integrator: &IntegratorConfig,
    seed: u64,
    samples: usize,
) -> Result<Vec<PropertyCheck>> {
    p.validate()?;
    let mut rng = rng_for(seed, CHECK_STREAM);
    let opts = OracleOptions::default();
    let mut factor_worst: f64 = 0.0;
    let mut vx_worst: f64 = 0.0;
    let mut vy_min = f64::INFINITY;
    for _ in 0..samples {
        let c = random_configuration(&mut rng, p);
        let mut other = c;
        other.x1 = c.x1 + rng.random_range(-1e-4..1e-4);
        other.x2 = c.x2 + rng.random_range(-1e-4..1e-4);
        for stats in [SpinStatistics::Boson, SpinStatistics::Fermion] {
            let shape = |q: &PairConfiguration| {
                let phase = reduced_phase(p.kx, q.x1) - reduced_phase(p.kx, q.x2);
                match stats {
                    SpinStatistics::Boson => phase.cos(),
                    SpinStatistics::Fermion => phase.sin(),
                }
            };
            let a = naive_four_slit_psi(stats, &c, p);
            let b = naive_four_slit_psi(stats, &other, p);
            let scale = a.norm().max(b.norm());
            // psi(c) shape(c') = psi(c') shape(c) avoids dividing at zeros.
            factor_worst = factor_worst.max((a * shape(&other) - b * shape(&c)).norm() / scale);
            match naive_velocity(&c, stats, p, &opts) {
                Ok(v) => {
                    vx_worst = vx_worst.max(v.vx1.abs().max(v.vx2.abs()) / p.x_velocity());
                    vy_min = vy_min.min(v.vy1.abs().max(v.vy2.abs()));
                }
                // Exact zeros of cos/sin are skipped rather than counted.
                Err(Error::DensityBelowFloor { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }

    let flow = BohmianFlow::new(SpinStatistics::Boson, p)?;
    let x0 = p.source_half_separation + p.sigma0;
    let start = PairConfiguration::new(x0, p.slit_offset, x0, -p.slit_offset + 1.5 * p.sigma0, 0.0);
    let traj = flow.integrate(&start, p.flight_time(), integrator)?;
    let mut corr_worst: f64 = 0.0;
    for region in [SlitRegion::RightLeft, SlitRegion::LeftRight] {
        let mapped = reflect_trajectory(&traj, region);
        for stats in [SpinStatistics::Boson, SpinStatistics::Fermion] {
            for s in mapped.samples.iter().skip(1) {
                let fd = corrected_velocity(region, stats, &s.config, p, &opts)?;
                corr_worst = corr_worst.max(velocity_mismatch(&fd, &s.velocity, p));
            }
        }
    }
    Ok(vec![
        PropertyCheck::at_most(
            "four_slit_factorization",
            factor_worst,
            1e-9,
            format!("cos/sin factorization of the naive wavefunction, {samples} configurations, both signs"),
        ),
        PropertyCheck::at_most(
            "naive_x_velocity_zero",
            vx_worst,
            ORACLE_TOLERANCE,
            "max |vx| / (hbar kx / m) for the naive wavefunction",
        ),
        PropertyCheck::above(
            "naive_y_velocity_nonzero",
            vy_min,
            0.0,
            "smallest max(|vy1|, |vy2|) (m/s) for the naive wavefunction",
        ),
        PropertyCheck::at_most(
            "reflection_correspondence",
            corr_worst,
            ORACLE_TOLERANCE,
            "reflected double-slit trajectory vs corrected-wavefunction guidance velocities, both regions",
        ),
    ])
}

/// Largest component mismatch, relative to `hbar kx / m` for x and to the
/// transverse speed (floored at `sigma0 / tau`) for y.
pub fn velocity_mismatch(a: &PairVelocity, b: &PairVelocity, p: &PhysicalParams) -> f64 {
    let vx = p.x_velocity();
    let vy_scale = b.vy1.hypot(b.vy2).max(p.scales().velocity);
    let dx = (a.vx1 - b.vx1).abs().max((a.vx2 - b.vx2).abs()) / vx;
    let dy = (a.vy1 - b.vy1).abs().max((a.vy2 - b.vy2).abs()) / vy_scale;
    dx.max(dy)
}
