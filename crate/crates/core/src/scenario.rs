//! Seeded synthetic co-evolution scenarios: generation timelines plus an
//! effectiveness matrix, used as fixture factory and as the input source for
//! oracle cross-checks.
//!
//! Generation gaps are drawn from a geometric distribution (the discrete
//! memoryless choice) with the configured mean. Everything is a pure
//! function of the config: the RNG is seeded from `seed` and consumed in a
//! fixed order — defense gaps, attack gaps, then the missing-cell mask — so
//! identical configs produce bit-identical scenarios. Batch runs derive the
//! scenario at `index` by reseeding with `seed + index`.

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::timeline::{
    EffectivenessMatrix, GenerationTimeline, Orientation, Party, Time, TimeHorizon,
};

/// How the matrix values react to the evolving timelines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EffectivenessModel {
    /// Each defense generation raises all later rows by the magnitude; each
    /// attack generation lowers all later columns. Clamped to [0, 1].
    #[default]
    StepResponse,
    /// A steady per-unit slope: defense improves with `t`, attacks erode at
    /// half the rate with `t'`, independent of the generation instants.
    Drift,
    /// Offsetting alternation: the diagonal zig-zags with no net endpoint
    /// change, modeling frequent evolution without net gain.
    Stalemate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Final time T of the horizon [0, T].
    pub horizon_length: Time,
    /// Mean gap between consecutive defense generations.
    pub defense_gen_rate: f64,
    /// Mean gap between consecutive attack generations.
    pub attack_gen_rate: f64,
    pub effectiveness_model: EffectivenessModel,
    /// Step size / slope scale in [0, 1].
    pub gen_effect_magnitude: f64,
    /// Fraction of cells masked missing, in [0, 1).
    pub missing_fraction: f64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            horizon_length: 200,
            defense_gen_rate: 30.0,
            attack_gen_rate: 20.0,
            effectiveness_model: EffectivenessModel::StepResponse,
            gen_effect_magnitude: 0.1,
            missing_fraction: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("horizon_length must be >= 1, got {0}")]
    BadHorizon(Time),
    #[error("{name} must be positive, got {value}")]
    BadRate { name: &'static str, value: f64 },
    #[error("gen_effect_magnitude {0} is outside [0, 1]")]
    BadMagnitude(f64),
    #[error("missing_fraction {0} is outside [0, 1)")]
    BadMissingFraction(f64),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.horizon_length < 1 {
            return Err(ScenarioError::BadHorizon(self.horizon_length));
        }
        for (name, value) in [
            ("defense_gen_rate", self.defense_gen_rate),
            ("attack_gen_rate", self.attack_gen_rate),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ScenarioError::BadRate { name, value });
            }
        }
        if !(0.0..=1.0).contains(&self.gen_effect_magnitude) {
            return Err(ScenarioError::BadMagnitude(self.gen_effect_magnitude));
        }
        if !(0.0..1.0).contains(&self.missing_fraction) {
            return Err(ScenarioError::BadMissingFraction(self.missing_fraction));
        }
        Ok(())
    }

    /// The config for scenario `index` of a batch: same settings, seed
    /// shifted by the index.
    pub fn for_batch_index(&self, index: u64) -> ScenarioConfig {
        ScenarioConfig { seed: self.seed.wrapping_add(index), ..self.clone() }
    }

    /// Parse a `key=value` config file body. Unset keys keep their defaults;
    /// `#` starts a comment line.
    pub fn from_key_values(text: &str) -> Result<ScenarioConfig, ScenarioError> {
        let mut config = ScenarioConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or_else(|| ScenarioError::Config {
                line,
                message: format!("expected key=value, got {trimmed:?}"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |message: String| ScenarioError::Config { line, message };
            match key {
                "horizon_length" => {
                    config.horizon_length = value
                        .parse()
                        .map_err(|_| bad(format!("bad integer {value:?}")))?
                }
                "defense_gen_rate" => {
                    config.defense_gen_rate =
                        value.parse().map_err(|_| bad(format!("bad number {value:?}")))?
                }
                "attack_gen_rate" => {
                    config.attack_gen_rate =
                        value.parse().map_err(|_| bad(format!("bad number {value:?}")))?
                }
                "effectiveness_model" => {
                    config.effectiveness_model = match value {
                        "step-response" => EffectivenessModel::StepResponse,
                        "drift" => EffectivenessModel::Drift,
                        "stalemate" => EffectivenessModel::Stalemate,
                        other => {
                            return Err(bad(format!(
                                "model must be step-response, drift, or stalemate; got {other:?}"
                            )))
                        }
                    }
                }
                "gen_effect_magnitude" => {
                    config.gen_effect_magnitude =
                        value.parse().map_err(|_| bad(format!("bad number {value:?}")))?
                }
                "missing_fraction" => {
                    config.missing_fraction =
                        value.parse().map_err(|_| bad(format!("bad number {value:?}")))?
                }
                "seed" => {
                    config.seed =
                        value.parse().map_err(|_| bad(format!("bad integer {value:?}")))?
                }
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        config.validate()?;
        Ok(config)
    }
}

/// A generated co-evolution scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub matrix: EffectivenessMatrix,
    pub defense: GenerationTimeline,
    pub attack: GenerationTimeline,
}

/// Generate the scenario determined by `config`.
pub fn generate_scenario(config: &ScenarioConfig) -> Result<Scenario, ScenarioError> {
    config.validate()?;
    let t_end = config.horizon_length;
    let horizon = TimeHorizon::new(0, t_end).expect("horizon_length >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let defense_instants = draw_timeline(&mut rng, t_end, config.defense_gen_rate);
    let attack_instants = draw_timeline(&mut rng, t_end, config.attack_gen_rate);

    let magnitude = config.gen_effect_magnitude;
    let drift_slope = magnitude / (t_end as f64 + 1.0);
    let count_after = |instants: &[Time], t: Time| -> f64 {
        instants.iter().filter(|&&g| g > 0 && g <= t).count() as f64
    };
    let mut matrix = EffectivenessMatrix::new(
        horizon.clone(),
        "synthetic effectiveness",
        Orientation::LargerIsBetter,
    );
    for t in 0..=t_end {
        for t_prime in 0..=t_end {
            let value = match config.effectiveness_model {
                EffectivenessModel::StepResponse => {
                    0.5 + magnitude
                        * (count_after(&defense_instants, t) - count_after(&attack_instants, t_prime))
                }
                EffectivenessModel::Drift => {
                    0.5 + drift_slope * t as f64 - 0.5 * drift_slope * t_prime as f64
                }
                EffectivenessModel::Stalemate => {
                    0.5 + magnitude * ((t % 2) as f64) - 0.5 * magnitude * ((t_prime % 2) as f64)
                }
            };
            matrix
                .set(t, t_prime, value.clamp(0.0, 1.0))
                .expect("cell inside horizon");
        }
    }

    let cells = matrix.cell_count();
    let masked = (config.missing_fraction * cells as f64).round() as usize;
    if masked > 0 {
        let n = horizon.len() as Time;
        for idx in sample_indices(&mut rng, cells, masked) {
            let t = idx as Time / n;
            let t_prime = idx as Time % n;
            matrix.clear(t, t_prime).expect("cell inside horizon");
        }
    }

    Ok(Scenario {
        matrix,
        defense: label_timeline(Party::Defender, "d", defense_instants),
        attack: label_timeline(Party::Attacker, "a", attack_instants),
    })
}

fn label_timeline(party: Party, prefix: &str, instants: Vec<Time>) -> GenerationTimeline {
    let labels = (0..instants.len()).map(|i| Some(format!("{prefix}{i}"))).collect();
    GenerationTimeline::new(party, instants).with_labels(labels)
}

fn draw_timeline(rng: &mut ChaCha8Rng, t_end: Time, mean_gap: f64) -> Vec<Time> {
    let mut instants = vec![0];
    let mut t = 0;
    loop {
        t += geometric_gap(rng, mean_gap);
        if t > t_end {
            break;
        }
        instants.push(t);
    }
    instants
}

/// Geometric sample on {1, 2, ...} with the given mean, by inversion.
fn geometric_gap(rng: &mut ChaCha8Rng, mean_gap: f64) -> Time {
    let p = 1.0 / mean_gap.max(1.0);
    if p >= 1.0 {
        return 1;
    }
    let u: f64 = rng.gen();
    let gap = 1.0 + ((1.0 - u).ln() / (1.0 - p).ln()).floor();
    gap as Time
}
