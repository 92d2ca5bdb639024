//! Shared scenario builders for the benchmarks.

use agility_core::scenario::{generate_scenario, EffectivenessModel, Scenario, ScenarioConfig};
use agility_core::Time;

/// A step-response scenario with generation rates scaled so horizons of any
/// size carry a realistic number of generations.
pub fn bench_scenario(horizon: Time, missing_fraction: f64) -> Scenario {
    let config = ScenarioConfig {
        horizon_length: horizon,
        defense_gen_rate: (horizon as f64 / 18.0).max(1.0),
        attack_gen_rate: (horizon as f64 / 25.0).max(1.0),
        effectiveness_model: EffectivenessModel::StepResponse,
        gen_effect_magnitude: 0.1,
        missing_fraction,
        seed: 42,
    };
    generate_scenario(&config).expect("valid bench config")
}
