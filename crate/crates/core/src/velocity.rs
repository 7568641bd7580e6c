//! Guidance-law velocities: closed form and finite-difference oracle.
//!
//! With lengths in units of `sigma0`, times in `tau = 2 m sigma0^2 / hbar`
//! and `s = t / tau`, `a = Y / sigma0`, `delta = (y1 - y2) / sigma0`, the
//! closed form reads
//!
//! ```text
//! vy1 = -a R / (1 + s^2) + s eta1 / (1 + s^2)
//! vy2 = +a R / (1 + s^2) + s eta2 / (1 + s^2)
//! R   = (sin theta ± s sinh kappa) / (cos theta ± cosh kappa)
//! kappa = a delta / (1 + s^2) = 2 m sigma0^2 alpha,  theta = s kappa = hbar t alpha
//! ```
//!
//! in units of `sigma0 / tau`. Numerator and denominator of `R` are evaluated
//! after multiplication by `2 exp(-|kappa|)`, which keeps both bounded for any
//! separation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{PhysicalParams, Scales};
use crate::wavefunction::{psi_pair, ComplexAmplitude, PairConfiguration, SpinStatistics};

/// Minimum magnitude of the rescaled denominator of `R` below which a fermion
/// configuration is treated as sitting on the node `y1 = y2`.
pub const DEFAULT_NODE_GUARD: f64 = 1e-13;

/// Default finite-difference step, in units of `sigma0`.
pub const DEFAULT_ORACLE_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PairVelocity {
    pub vx1: f64,
    pub vy1: f64,
    pub vx2: f64,
    pub vy2: f64,
}

/// Intermediate quantities of the closed-form field at one configuration.
///
/// `f` and `g` are the exponents in `Psi ~ exp(-f) (exp(-g) ± exp(g))`;
/// `term1_*` is the exchange (interference) contribution shared by both
/// particles with opposite signs, `term2_*` the free-spreading contribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityFieldTerms {
    /// `2 Y m (y1 - y2) / (hbar^2 t^2 + 4 m^2 sigma0^4)`, in `1 / (kg m^2)`, so
    /// that `hbar t alpha` is the interference phase.
    pub alpha: f64,
    pub f: Complex64,
    pub g: Complex64,
    pub term1_y1: f64,
    pub term2_y1: f64,
    pub term1_y2: f64,
    pub term2_y2: f64,
}

impl VelocityFieldTerms {
    pub fn velocity(&self, x_velocity: f64) -> PairVelocity {
        PairVelocity {
            vx1: x_velocity,
            vy1: self.term1_y1 + self.term2_y1,
            vx2: x_velocity,
            vy2: self.term1_y2 + self.term2_y2,
        }
    }
}

/// `sin x - x` without cancellation near zero.
fn sin_minus_id(x: f64) -> f64 {
    if x.abs() >= 0.5 {
        return x.sin() - x;
    }
    let x2 = x * x;
    let mut term = -x * x2 / 6.0;
    let mut sum = term;
    let mut k = 3.0;
    while term.abs() > 1e-18 * sum.abs() {
        term *= -x2 / ((k + 1.0) * (k + 2.0));
        sum += term;
        k += 2.0;
    }
    sum
}

/// `sinh x - x` without cancellation near zero.
fn sinh_minus_id(x: f64) -> f64 {
    if x.abs() >= 0.5 {
        return x.sinh() - x;
    }
    let x2 = x * x;
    let mut term = x * x2 / 6.0;
    let mut sum = term;
    let mut k = 3.0;
    while term.abs() > 1e-18 * sum.abs() {
        term *= x2 / ((k + 1.0) * (k + 2.0));
        sum += term;
        k += 2.0;
    }
    sum
}

/// Scaled transverse field. Returns the shared interference magnitude
/// `a R / (1 + s^2)` and the spreading rate `s / (1 + s^2)`, or the rescaled
/// denominator of `R` when it falls below `guard`.
#[inline]
pub(crate) fn interference_term(
    eta1: f64,
    eta2: f64,
    s: f64,
    offset: f64,
    stats: SpinStatistics,
    guard: f64,
) -> std::result::Result<(f64, f64), f64> {
    let spread = 1.0 + s * s;
    let kappa = offset * (eta1 - eta2) / spread;
    let theta = s * kappa;
    let w = (-kappa.abs()).exp();
    let (num, den) = match stats {
        SpinStatistics::Boson => {
            let num = 2.0 * w * theta.sin() - s * kappa.signum() * (-2.0 * kappa.abs()).exp_m1();
            let den = 2.0 * w * theta.cos() + 1.0 + w * w;
            (num, den)
        }
        SpinStatistics::Fermion => {
            // The node y1 = y2 is a double zero of the denominator and a
            // triple zero of the numerator; both are arranged to avoid
            // cancellation there.
            let num = if kappa.abs() < 1.0 {
                2.0 * w * (sin_minus_id(theta) - s * sinh_minus_id(kappa))
            } else {
                2.0 * w * theta.sin() + s * kappa.signum() * (-2.0 * kappa.abs()).exp_m1()
            };
            let half = (0.5 * theta).sin();
            let den = -((-kappa.abs()).exp_m1().powi(2) + 4.0 * w * half * half);
            (num, den)
        }
    };
    if !(den.abs() >= guard) {
        return Err(den);
    }
    Ok((offset * num / (den * spread), s / spread))
}

/// Scaled `(vy1, vy2)` in units of `sigma0 / tau`.
#[inline]
pub(crate) fn transverse_velocity_scaled(
    eta1: f64,
    eta2: f64,
    s: f64,
    offset: f64,
    stats: SpinStatistics,
    guard: f64,
) -> std::result::Result<(f64, f64), f64> {
    let (shared, rate) = interference_term(eta1, eta2, s, offset, stats, guard)?;
    Ok((-shared + rate * eta1, shared + rate * eta2))
}

/// Closed-form field decomposition at `c` (requires `ky = 0`).
pub fn velocity_terms(
    c: &PairConfiguration,
    stats: SpinStatistics,
    p: &PhysicalParams,
    guard: f64,
) -> Result<VelocityFieldTerms> {
    p.require_zero_ky()?;
    let sc = p.scales();
    let (eta1, eta2, s) = (c.y1 / sc.length, c.y2 / sc.length, sc.tau(c.t));
    let width = Complex64::new(1.0, s);
    let f = (eta1 * eta1 + eta2 * eta2) / (4.0 * width);
    let g = sc.offset * (eta2 - eta1) / (2.0 * width);
    let kappa = sc.offset * (eta1 - eta2) / (1.0 + s * s);
    let alpha = kappa / (2.0 * p.mass * p.sigma0 * p.sigma0);
    let (shared, rate) = interference_term(eta1, eta2, s, sc.offset, stats, guard)
        .map_err(|den| Error::NodeProximity { t: c.t, denominator: den })?;
    Ok(VelocityFieldTerms {
        alpha,
        f,
        g,
        term1_y1: -shared * sc.velocity,
        term2_y1: rate * eta1 * sc.velocity,
        term1_y2: shared * sc.velocity,
        term2_y2: rate * eta2 * sc.velocity,
    })
}

/// Exact pair velocity from the closed-form field, with the default node guard.
pub fn velocity_closed_form(
    c: &PairConfiguration,
    stats: SpinStatistics,
    p: &PhysicalParams,
) -> Result<PairVelocity> {
    velocity_closed_form_guarded(c, stats, p, DEFAULT_NODE_GUARD)
}

pub fn velocity_closed_form_guarded(
    c: &PairConfiguration,
    stats: SpinStatistics,
    p: &PhysicalParams,
    guard: f64,
) -> Result<PairVelocity> {
    Ok(velocity_terms(c, stats, p, guard)?.velocity(p.x_velocity()))
}

/// Centre-of-mass height `y(t) = y(0) |sigma_t| / sigma0`.
pub fn com_closed_form(y0: f64, t: f64, p: &PhysicalParams) -> f64 {
    y0 * spreading_factor(t, &p.scales())
}

#[inline]
pub(crate) fn spreading_factor(t: f64, sc: &Scales) -> f64 {
    1.0f64.hypot(sc.tau(t))
}

/// Settings of the finite-difference guidance oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Transverse step in units of `sigma0`. The longitudinal step is
    /// `step / kx`, so that both steps resolve their oscillation equally.
    pub step: f64,
    /// Combine steps `h` and `h / 2` to cancel the `O(h^2)` error.
    pub richardson: bool,
    /// `|Psi|^2` at or below which the logarithmic derivative is refused.
    pub min_density: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            step: DEFAULT_ORACLE_STEP,
            richardson: false,
            min_density: f64::MIN_POSITIVE,
        }
    }
}

#[derive(Clone, Copy)]
enum Coord {
    X1,
    Y1,
    X2,
    Y2,
}

fn shifted(c: &PairConfiguration, coord: Coord, by: f64) -> (PairConfiguration, f64) {
    let mut out = *c;
    let slot = match coord {
        Coord::X1 => &mut out.x1,
        Coord::Y1 => &mut out.y1,
        Coord::X2 => &mut out.x2,
        Coord::Y2 => &mut out.y2,
    };
    *slot += by;
    let value = *slot;
    (out, value)
}

fn central_difference<F>(psi: &F, c: &PairConfiguration, coord: Coord, h: f64) -> Complex64
where
    F: Fn(&PairConfiguration) -> ComplexAmplitude,
{
    let (plus, vp) = shifted(c, coord, h);
    let (minus, vm) = shifted(c, coord, -h);
    // Divide by the representable spacing, not the nominal one.
    (psi(&plus) - psi(&minus)) / (vp - vm)
}

fn derivative<F>(psi: &F, c: &PairConfiguration, coord: Coord, h: f64, richardson: bool) -> Complex64
where
    F: Fn(&PairConfiguration) -> ComplexAmplitude,
{
    let coarse = central_difference(psi, c, coord, h);
    if !richardson {
        return coarse;
    }
    let fine = central_difference(psi, c, coord, 0.5 * h);
    (4.0 * fine - coarse) / 3.0
}

/// Guidance velocities `(hbar / m) Im[grad_i Psi / Psi]` of an arbitrary
/// pair wavefunction, by central differences.
pub fn guidance_velocity<F>(
    psi: F,
    c: &PairConfiguration,
    p: &PhysicalParams,
    opts: &OracleOptions,
) -> Result<PairVelocity>
where
    F: Fn(&PairConfiguration) -> ComplexAmplitude,
{
    let centre = psi(c);
    let density = centre.norm_sqr();
    if !(density > opts.min_density) {
        return Err(Error::DensityBelowFloor {
            density,
            floor: opts.min_density,
        });
    }
    let hy = opts.step * p.sigma0;
    let hx = opts.step / p.kx;
    let scale = p.hbar / p.mass;
    let v = |coord, h| scale * (derivative(&psi, c, coord, h, opts.richardson) / centre).im;
    Ok(PairVelocity {
        vx1: v(Coord::X1, hx),
        vy1: v(Coord::Y1, hy),
        vx2: v(Coord::X2, hx),
        vy2: v(Coord::Y2, hy),
    })
}

/// Finite-difference guidance velocity of the double-slit pair wavefunction,
/// with transverse step `h` (metres). Shares no code with the closed form.
pub fn velocity_oracle(
    c: &PairConfiguration,
    stats: SpinStatistics,
    p: &PhysicalParams,
    h: f64,
) -> Result<PairVelocity> {
    let opts = OracleOptions {
        step: h / p.sigma0,
        ..OracleOptions::default()
    };
    guidance_velocity(|q| psi_pair(stats, q, p), c, p, &opts)
}
