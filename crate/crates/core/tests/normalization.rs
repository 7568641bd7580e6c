//! Normalization and density identities checked by an independent composite
//! Simpson quadrature.

use bohmpair_core::wavefunction::{initial_density, joint_density, normalization_sq, sigma_t};
use bohmpair_core::{PairConfiguration, PhysicalParams, SpinStatistics};

const BOTH: [SpinStatistics; 2] = [SpinStatistics::Boson, SpinStatistics::Fermion];

fn simpson_2d(f: impl Fn(f64, f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let w = |i: usize| match i {
        0 => 1.0,
        i if i == n => 1.0,
        i if i % 2 == 1 => 4.0,
        _ => 2.0,
    };
    let mut total = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            total += w(i) * w(j) * f(lo + i as f64 * h, lo + j as f64 * h);
        }
    }
    total * h * h / 9.0
}

fn params(offset_in_sigma: f64) -> PhysicalParams {
    let mut p = PhysicalParams::baseline(2e6);
    p.slit_offset = offset_in_sigma * p.sigma0;
    p
}

#[test]
fn pair_density_integrates_to_one() {
    for offset in [1.0, 2.0, 5.0] {
        let p = params(offset);
        for stats in BOTH {
            for t in [0.0, 3e-8, 1e-7] {
                let reach = p.slit_offset + 12.0 * sigma_t(t, &p).norm();
                let mass = simpson_2d(
                    |y1, y2| joint_density(&PairConfiguration::new(1e-3, y1, -2e-3, y2, t), stats, &p),
                    -reach,
                    reach,
                    600,
                );
                assert!(
                    (mass - 1.0).abs() < 1e-6,
                    "Y = {offset} sigma0, {stats:?}, t = {t:e}: {mass}"
                );
            }
        }
    }
}

#[test]
fn normalization_constant_matches_overlap_formula() {
    for offset in [1.0, 2.0, 5.0] {
        let p = params(offset);
        let overlap_sq = (-offset * offset).exp();
        assert!((normalization_sq(SpinStatistics::Boson, &p) - 0.5 / (1.0 + overlap_sq)).abs() < 1e-15);
        assert!((normalization_sq(SpinStatistics::Fermion, &p) - 0.5 / (1.0 - overlap_sq)).abs() < 1e-15);
    }
}

#[test]
fn initial_density_is_the_t0_slice() {
    for offset in [1.0, 2.0, 5.0] {
        let p = params(offset);
        for stats in BOTH {
            for (a, b) in [(0.3, -0.2), (1.7, -4.0), (-2.5, 2.5), (5.0, -5.0), (0.0, 0.0)] {
                let (y1, y2) = (a * p.sigma0, b * p.sigma0);
                let direct = joint_density(&PairConfiguration::transverse(y1, y2, 0.0), stats, &p);
                let reduced = initial_density(y1, y2, stats, &p).unwrap();
                let scale = direct.abs().max(1e-300);
                assert!((direct - reduced).abs() <= 1e-12 * scale.max(reduced), "{stats:?} ({a}, {b}): {direct} vs {reduced}");
            }
        }
    }
}

#[test]
fn exchange_statistics_separate_only_where_packets_overlap() {
    // With Y = 5 sigma0 the exchange term weighs exp(-25): the two
    // statistics give the same initial density away from y1 = y2.
    let p = params(5.0);
    let c = PairConfiguration::transverse(5.2e-6, -4.4e-6, 0.0);
    let b = joint_density(&c, SpinStatistics::Boson, &p);
    let f = joint_density(&c, SpinStatistics::Fermion, &p);
    assert!((b - f).abs() < 1e-9 * b);
    let near = params(1.0);
    let c = PairConfiguration::transverse(0.1e-6, -0.1e-6, 0.0);
    let b = joint_density(&c, SpinStatistics::Boson, &near);
    let f = joint_density(&c, SpinStatistics::Fermion, &near);
    assert!(b > 10.0 * f);
}
