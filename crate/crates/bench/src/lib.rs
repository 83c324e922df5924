//! Shared fixtures for the benchmarks.

use zernlets_core::fit::synth_surface;
use zernlets_core::{DiskSamples, PolarPoint, SurfaceKind, SynthParams};

/// Keratoconus-like surface at the default 10200-sample layout.
pub fn keratoconus_samples() -> DiskSamples {
    synth_surface(&SynthParams {
        noise: 1e-3,
        ..SynthParams::new(SurfaceKind::Keratoconus)
    })
    .expect("default parameters are valid")
}

/// Deterministic spread of points over the disk.
pub fn spiral_points(count: usize) -> Vec<PolarPoint> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| PolarPoint {
            r: ((i as f64 + 0.5) / count as f64).sqrt(),
            phi: (i as f64 * golden).rem_euclid(std::f64::consts::TAU),
        })
        .collect()
}
