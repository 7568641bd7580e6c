//! Shared fixtures for the criterion benchmarks.

use bohmpair_core::{PairConfiguration, PhysicalParams};

/// The strongly spreading regime, `hbar kx / m = 2e6 m/s`.
pub fn spreading_params() -> PhysicalParams {
    PhysicalParams::baseline(2.0e6)
}

/// A deterministic set of configurations around the slit centres.
pub fn configurations(p: &PhysicalParams, n: usize) -> Vec<PairConfiguration> {
    (0..n)
        .map(|i| {
            let u = i as f64 / n as f64;
            PairConfiguration::transverse(
                p.slit_offset + (2.0 * u - 1.0) * p.sigma0,
                -p.slit_offset + (1.0 - 3.0 * u) * p.sigma0,
                1e-7 * u,
            )
        })
        .collect()
}
