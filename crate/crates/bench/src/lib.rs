//! Shared fixtures for the benchmarks.

use reebflow_core::hamiltonian::HamiltonianModel;
use reebflow_core::phase::PhasePoint;
use reebflow_core::rng::CounterRng;
use reebflow_core::scenario::ScenarioConfig;

pub fn default_model() -> HamiltonianModel {
    ScenarioConfig::default_scenario()
        .build()
        .expect("default scenario builds")
}

/// `count` deterministic points inside the support box of `m`.
pub fn interior_points(m: &HamiltonianModel, count: usize) -> Vec<PhasePoint> {
    let rng = CounterRng::new(1, "bench");
    let sb = m.support_bounds();
    let n = m.n();
    (0..count as u64)
        .map(|i| {
            let r = rng.vector(i, n, 0.2, sb.r_max);
            let theta = rng.vector(i + (1 << 32), n, 0.0, std::f64::consts::TAU);
            let z = rng.uniform_in(i, 99, -sb.z_max, sb.z_max);
            PhasePoint::from_polar(&r, &theta, z)
        })
        .collect()
}
