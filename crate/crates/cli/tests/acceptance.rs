//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Quadrature references are computed here from the
//! Gaussian-packet formulas in SI units, independently of the library's
//! scaled evaluation.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use bohmpair_cli::scenario::same_side_check;
use bohmpair_cli::{execute, Scenario, ScenarioConfig};
use bohmpair_core::checks::all_passed;
use bohmpair_core::ensemble::{centre_spread, decorrelated_endpoints, density_distance, same_side_probability};
use bohmpair_core::four_slit::run_checks;
use bohmpair_core::sampling::{rng_for, sample_initial};
use bohmpair_core::velocity::{com_closed_form, velocity_closed_form, velocity_oracle};
use bohmpair_core::wavefunction::sigma_t;
use bohmpair_core::{
    integrate_trajectory, run_pairs, IntegratorConfig, PairConfiguration, PairVelocity, PhysicalParams, RunOptions,
    SamplerConfig, SamplingMethod, SpinStatistics,
};
use num_complex::Complex64;
use rand::Rng;

const FAST: f64 = 2e7;
const SLOW: f64 = 2e6;
const BOTH: [SpinStatistics; 2] = [SpinStatistics::Boson, SpinStatistics::Fermion];
const SEED: u64 = 1;

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }

    fn all(parts: Vec<Verdict>) -> Self {
        Self {
            passed: parts.iter().all(|v| v.passed),
            detail: parts
                .iter()
                .map(|v| format!("{}{}", if v.passed { "" } else { "[x] " }, v.detail))
                .collect::<Vec<_>>()
                .join("; "),
        }
    }
}

/// Single Gaussian packet centred at `centre`, SI units.
fn packet(y: f64, centre: f64, t: f64, p: &PhysicalParams) -> Complex64 {
    let st = Complex64::new(p.sigma0, p.hbar * t / (2.0 * p.mass * p.sigma0));
    let d = y - centre;
    (2.0 * PI).powf(-0.25) / st.sqrt() * (-(d * d) / (4.0 * p.sigma0 * st)).exp()
}

/// Normalized pair density `|Psi(y1, y2, t)|^2`, 1/m^2.
fn reference_density(y1: f64, y2: f64, t: f64, stats: SpinStatistics, p: &PhysicalParams) -> f64 {
    let y = p.slit_offset;
    let sign = stats.sign();
    let psi = packet(y1, y, t, p) * packet(y2, -y, t, p) + sign * packet(y2, y, t, p) * packet(y1, -y, t, p);
    let overlap_sq = (-(y / p.sigma0).powi(2)).exp();
    psi.norm_sqr() / (2.0 * (1.0 + sign * overlap_sq))
}

fn simpson_weights(n: usize) -> Vec<f64> {
    assert!(n % 2 == 0);
    (0..=n)
        .map(|i| match i {
            0 => 1.0,
            i if i == n => 1.0,
            i if i % 2 == 1 => 4.0,
            _ => 2.0,
        })
        .collect()
}

/// Composite Simpson rule over `[a, b]^2`.
fn simpson_2d(f: impl Fn(f64, f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let w = simpson_weights(n);
    let mut total = 0.0;
    for (i, wi) in w.iter().enumerate() {
        let x = a + i as f64 * h;
        for (j, wj) in w.iter().enumerate() {
            total += wi * wj * f(x, a + j as f64 * h);
        }
    }
    total * h * h / 9.0
}

/// Same-side probability by Simpson quadrature of the reference density.
fn reference_same_side(stats: SpinStatistics, p: &PhysicalParams, t: f64) -> f64 {
    let width = sigma_width(p, t);
    let reach = p.slit_offset + 12.0 * width;
    2.0 * simpson_2d(|a, b| reference_density(a, b, t, stats, p), 0.0, reach, 600)
}

/// `|sigma_t|` from its definition.
fn sigma_width(p: &PhysicalParams, t: f64) -> f64 {
    (p.sigma0.powi(2) + (p.hbar * t / (2.0 * p.mass * p.sigma0)).powi(2)).sqrt()
}

fn bohmian_velocity_gap(a: &PairVelocity, b: &PairVelocity, floor: f64) -> f64 {
    let scale = b.vy1.abs().max(b.vy2.abs()).max(floor);
    (a.vy1 - b.vy1).abs().max((a.vy2 - b.vy2).abs()) / scale
}

fn c1_spreading() -> Verdict {
    let p = PhysicalParams::baseline(FAST);
    let parts = [(1e-8, 1.16), (1e-7, 5.88)]
        .into_iter()
        .map(|(t, target)| {
            let r = sigma_t(t, &p).norm() / p.sigma0;
            let independent = sigma_width(&p, t) / p.sigma0;
            Verdict::new(
                (r - target).abs() <= 0.01 && (r - independent).abs() < 1e-12,
                format!("|sigma_t|/sigma0 at t = {t:e} s: {r:.4} (target {target} +- 0.01)"),
            )
        })
        .collect();
    Verdict::all(parts)
}

fn c2_initial_spread() -> Verdict {
    let p = PhysicalParams::baseline(SLOW);
    let cfg = SamplerConfig {
        method: SamplingMethod::ExactRejection,
        n_pairs: 100_000,
        seed: SEED,
    };
    let target = p.sigma0 / 2f64.sqrt();
    let parts = BOTH
        .into_iter()
        .map(|stats| match sample_initial(&cfg, stats, &p) {
            Ok(init) => {
                let n = init.len() as f64;
                let mean = init.iter().map(|c| 0.5 * (c.y1 + c.y2)).sum::<f64>() / n;
                let spread = (centre_spread(&init).powi(2) - mean * mean).sqrt();
                let rel = spread / target - 1.0;
                Verdict::new(
                    rel.abs() < 0.01,
                    format!("{}: dy(0) = {:.5} sigma0/sqrt2", stats.name(), spread / target),
                )
            }
            Err(e) => Verdict::new(false, format!("{}: {e}", stats.name())),
        })
        .collect();
    Verdict::all(parts)
}

fn c3_oracle_grid() -> Verdict {
    let p = PhysicalParams::baseline(SLOW);
    let h = 1e-4 * p.sigma0;
    let floor = p.scales().velocity;
    let mut parts = Vec::new();
    for stats in BOTH {
        let mut worst: f64 = 0.0;
        let mut points = 0;
        for i in 0..10 {
            for j in 0..10 {
                for k in 0..5 {
                    let y1 = p.slit_offset + (-2.5 + 5.0 * i as f64 / 9.0) * p.sigma0;
                    let y2 = -p.slit_offset + (-2.5 + 5.0 * j as f64 / 9.0) * p.sigma0;
                    let t = 2e-8 * (k + 1) as f64;
                    let c = PairConfiguration::new(1e-3, y1, 1e-3, y2, t);
                    match (velocity_closed_form(&c, stats, &p), velocity_oracle(&c, stats, &p, h)) {
                        (Ok(a), Ok(b)) => {
                            worst = worst.max(bohmian_velocity_gap(&a, &b, floor));
                            worst = worst.max((a.vx1 - b.vx1).abs().max((a.vx2 - b.vx2).abs()) / p.x_velocity());
                            points += 1;
                        }
                        (a, b) => parts.push(Verdict::new(false, format!("evaluation failed: {a:?} / {b:?}"))),
                    }
                }
            }
        }
        parts.push(Verdict::new(
            worst < 1e-6 && points == 500,
            format!("{}: worst relative gap {worst:.2e} over {points} points", stats.name()),
        ));
    }
    Verdict::all(parts)
}

fn c4_centre_of_mass() -> Verdict {
    let cfg = IntegratorConfig::default();
    let mut parts = Vec::new();
    for v in [FAST, SLOW] {
        let p = PhysicalParams::baseline(v);
        let mut rng = rng_for(SEED, 10);
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for stats in BOTH {
            for _ in 0..10 {
                let y1 = p.slit_offset + rng.random_range(-2.0..2.0) * p.sigma0;
                let y2 = -p.slit_offset + rng.random_range(-2.0..2.0) * p.sigma0;
                let start = PairConfiguration::transverse(y1, y2, 0.0);
                let y0 = 0.5 * (y1 + y2);
                match integrate_trajectory(&start, p.flight_time(), &cfg, stats, &p) {
                    Ok(traj) if traj.is_complete() => {
                        count += 1;
                        for s in &traj.samples {
                            let expected = y0 * sigma_width(&p, s.config.t) / p.sigma0;
                            let got = 0.5 * (s.config.y1 + s.config.y2);
                            let closed = com_closed_form(y0, s.config.t, &p);
                            worst = worst.max((got - expected).abs().max((closed - expected).abs()) / p.sigma0);
                        }
                    }
                    other => parts.push(Verdict::new(false, format!("trajectory failed: {:?}", other.err()))),
                }
            }
        }
        parts.push(Verdict::new(
            worst <= 1e-6 && count == 20,
            format!("v = {v:e} m/s: worst |com - closed form| {worst:.2e} sigma0 over {count} trajectories"),
        ));
    }
    Verdict::all(parts)
}

fn c5_symmetries() -> Verdict {
    let p = PhysicalParams::baseline(SLOW);
    let mut rng = rng_for(SEED, 11);
    let mut parity: f64 = 0.0;
    let mut exchange: f64 = 0.0;
    let mut evaluated = 0;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    for stats in BOTH {
        for _ in 0..1000 {
            let y1 = rng.random_range(-10.0..10.0) * p.sigma0;
            let y2 = rng.random_range(-10.0..10.0) * p.sigma0;
            let t = rng.random_range(0.0..1e-7);
            let c = PairConfiguration::transverse(y1, y2, t);
            let (Ok(v), Ok(m), Ok(r)) = (
                velocity_closed_form(&c, stats, &p),
                velocity_closed_form(&PairConfiguration::transverse(-y1, -y2, t), stats, &p),
                velocity_closed_form(&PairConfiguration::transverse(-y2, -y1, t), stats, &p),
            ) else {
                continue;
            };
            evaluated += 1;
            parity = parity.max(rel(v.vy1, -m.vy1)).max(rel(v.vy2, -m.vy2));
            exchange = exchange.max(rel(v.vy1, -r.vy2)).max(rel(v.vy2, -r.vy1));
        }
    }
    let eps = 4.0 * f64::EPSILON;
    let mut parts = vec![Verdict::new(
        parity <= eps && exchange <= eps && evaluated >= 1990,
        format!("{evaluated} points: parity {parity:.1e}, exchange-reflection {exchange:.1e} (relative)"),
    )];

    let fig4a = execute(&ScenarioConfig::preset(Scenario::Fig4a));
    parts.push(match fig4a {
        Ok(o) => {
            let c = o.summary.checks.iter().find(|c| c.name == "pair_symmetry").unwrap();
            Verdict::new(c.passed, format!("fig4a pairs: max |y1 + y2| {:.1e} sigma0", c.worst))
        }
        Err(e) => Verdict::new(false, format!("fig4a: {e}")),
    });
    for v in [FAST, SLOW] {
        let p = PhysicalParams::baseline(v);
        let sampler = SamplerConfig {
            method: SamplingMethod::Symmetric,
            n_pairs: 200,
            seed: SEED,
        };
        for stats in BOTH {
            let init = sample_initial(&sampler, stats, &p).unwrap();
            let opts = RunOptions {
                keep_trajectories: true,
                reference_seed: SEED,
            };
            let (res, trajs) = run_pairs(&init, &IntegratorConfig::default(), stats, &p, p.flight_time(), &opts).unwrap();
            let worst = trajs
                .iter()
                .flat_map(|t| &t.samples)
                .map(|s| (s.config.y1 + s.config.y2).abs() / p.sigma0)
                .fold(0.0, f64::max);
            parts.push(Verdict::new(
                worst <= 1e-6 && res.aborted_count == 0,
                format!("symmetric batch v = {v:e} {}: {worst:.1e} sigma0", stats.name()),
            ));
        }
    }
    Verdict::all(parts)
}

fn c6_same_side() -> Verdict {
    let mut parts = Vec::new();
    match execute(&ScenarioConfig::preset(Scenario::Fig4b)) {
        Ok(o) => {
            let c = o.summary.checks.iter().find(|c| c.name == "axis_crossing").unwrap();
            parts.push(Verdict::new(c.passed, format!("fig4b: lower particle ends at {:+.3} sigma0", c.worst)));
        }
        Err(e) => parts.push(Verdict::new(false, format!("fig4b: {e}"))),
    }
    // The criterion's batches: spread packets, n = 1000, three binomial
    // standard deviations around the quadrature value.
    let p = PhysicalParams::baseline(SLOW);
    let t = p.flight_time();
    let sampler = SamplerConfig {
        method: SamplingMethod::ExactRejection,
        n_pairs: 1000,
        seed: SEED,
    };
    for stats in BOTH {
        let q = reference_same_side(stats, &p, t);
        let library = same_side_probability(stats, &p, t).unwrap();
        let init = sample_initial(&sampler, stats, &p).unwrap();
        let (res, _) = run_pairs(&init, &IntegratorConfig::default(), stats, &p, t, &RunOptions::default()).unwrap();
        let n = res.endpoints.len() as f64;
        let band = 3.0 * (q * (1.0 - q) / n).sqrt();
        let f = res.same_side_fraction;
        parts.push(Verdict::new(
            (f - q).abs() <= band && (library - q).abs() < 1e-6 && n == 1000.0,
            format!("v = {SLOW:e} {}: fraction {f:.4} vs quadrature {q:.4} +- {band:.4}", stats.name()),
        ));
    }

    // Narrow packets: expected count n q << 1, so the band is replaced by an
    // exact binomial test at the same significance.
    let p = PhysicalParams::baseline(FAST);
    let t = p.flight_time();
    for stats in BOTH {
        let q = reference_same_side(stats, &p, t);
        let library = same_side_probability(stats, &p, t).unwrap();
        let init = sample_initial(&sampler, stats, &p).unwrap();
        let (res, _) = run_pairs(&init, &IntegratorConfig::default(), stats, &p, t, &RunOptions::default()).unwrap();
        let check = same_side_check(&res, q);
        parts.push(Verdict::new(
            check.passed && res.same_side_fraction < 1e-2 && q < 1e-2 && (library - q).abs() < 1e-6,
            format!(
                "v = {FAST:e} {}: fraction {:.4} vs quadrature {q:.2e}, binomial p = {:.3}",
                stats.name(),
                res.same_side_fraction,
                check.worst
            ),
        ));
    }
    Verdict::all(parts)
}

fn c7_equivariance() -> Verdict {
    let mut parts = Vec::new();
    let cfg = IntegratorConfig {
        output_steps: 10,
        ..IntegratorConfig::default()
    };
    for v in [FAST, SLOW] {
        let p = PhysicalParams::baseline(v);
        let sampler = SamplerConfig {
            method: SamplingMethod::ExactRejection,
            n_pairs: 10_000,
            seed: SEED,
        };
        let times: Vec<f64> = if v == SLOW { vec![0.3e-7, 1e-7] } else { vec![p.flight_time()] };
        for stats in BOTH {
            let init = sample_initial(&sampler, stats, &p).unwrap();
            for &t in &times {
                let opts = RunOptions {
                    keep_trajectories: false,
                    reference_seed: SEED,
                };
                let (res, _) = run_pairs(&init, &cfg, stats, &p, t, &opts).unwrap();
                let d = res.density_distance.unwrap();
                let control = density_distance(&decorrelated_endpoints(&init, &p, t), stats, &p, t, SEED).unwrap();
                parts.push(Verdict::new(
                    d.bohmian <= 1.5 * d.baseline && control.bohmian > d.baseline && res.aborted_count == 0,
                    format!(
                        "v = {v:e} {} t = {t:.1e}: TV {:.4} / baseline {:.4} = {:.2}, control {:.3}",
                        stats.name(),
                        d.bohmian,
                        d.baseline,
                        d.bohmian / d.baseline,
                        control.bohmian
                    ),
                ));
            }
        }
    }
    Verdict::all(parts)
}

fn c8_four_slit() -> Verdict {
    let mut parts = Vec::new();
    for v in [FAST, SLOW] {
        let p = PhysicalParams::baseline(v);
        let cfg = IntegratorConfig {
            output_steps: 50,
            ..IntegratorConfig::default()
        };
        match run_checks(&p, &cfg, SEED, 200) {
            Ok(checks) => {
                let summary = checks
                    .iter()
                    .map(|c| format!("{} {:.1e}", c.name, c.worst))
                    .collect::<Vec<_>>()
                    .join(", ");
                parts.push(Verdict::new(all_passed(&checks), format!("v = {v:e}: {summary}")));
            }
            Err(e) => parts.push(Verdict::new(false, format!("v = {v:e}: {e}"))),
        }
    }
    Verdict::all(parts)
}

fn c9_robustness() -> Verdict {
    let mut parts = Vec::new();
    let coarse = IntegratorConfig {
        output_steps: 1,
        ..IntegratorConfig::default()
    };
    let fine = IntegratorConfig {
        rel_tol: coarse.rel_tol / 2.0,
        abs_tol: coarse.abs_tol / 2.0,
        ..coarse
    };
    for v in [FAST, SLOW] {
        let p = PhysicalParams::baseline(v);
        let t = p.flight_time();
        let sampler = SamplerConfig {
            method: SamplingMethod::ExactRejection,
            n_pairs: 10_000,
            seed: SEED,
        };
        let init = sample_initial(&sampler, SpinStatistics::Fermion, &p).unwrap();
        let (res, _) = run_pairs(&init, &coarse, SpinStatistics::Fermion, &p, t, &RunOptions::default()).unwrap();
        parts.push(Verdict::new(
            res.abort_fraction() < 1e-3,
            format!("v = {v:e}: {} / {} fermion aborts", res.aborted_count, res.n_pairs),
        ));

        for stats in BOTH {
            let mut worst: f64 = 0.0;
            let mut failures = 0;
            for start in init.iter().take(200) {
                let a = integrate_trajectory(start, t, &coarse, stats, &p);
                let b = integrate_trajectory(start, t, &fine, stats, &p);
                match (a, b) {
                    (Ok(a), Ok(b)) if a.is_complete() && b.is_complete() => {
                        let (ea, eb) = (a.last().unwrap().config, b.last().unwrap().config);
                        for (ya, yb) in [(ea.y1, eb.y1), (ea.y2, eb.y2)] {
                            let allowed = coarse.abs_tol * p.sigma0 + coarse.rel_tol * ya.abs();
                            worst = worst.max((ya - yb).abs() / allowed);
                        }
                    }
                    _ => failures += 1,
                }
            }
            parts.push(Verdict::new(
                worst < 1.0 && failures == 0,
                format!(
                    "v = {v:e} {}: halving tolerances moves endpoints {worst:.2} x the coarse tolerance",
                    stats.name()
                ),
            ));
        }
    }
    Verdict::all(parts)
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("packet spreading", c1_spreading),
        ("initial centre-of-mass spread", c2_initial_spread),
        ("closed form vs finite-difference guidance", c3_oracle_grid),
        ("centre-of-mass law", c4_centre_of_mass),
        ("symmetry relations", c5_symmetries),
        ("same-side detection", c6_same_side),
        ("equivariance", c7_equivariance),
        ("four-slit reductions", c8_four_slit),
        ("integrator robustness", c9_robustness),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let status = if verdict.passed { "PASS" } else { "FAIL" };
        if !verdict.passed {
            failed += 1;
        }
        println!(
            "{status} criterion {} ({name}) [{:.1} s]: {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            verdict.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
