//! Property tests: the metric invariants that must hold on arbitrary
//! inputs, checked against brute force where a second route exists.

use proptest::prelude::*;

use agility_core::oracle::oracle_metrics;
use agility_core::report::{compute_report, report_diff, RunParams};
use agility_core::scenario::{generate_scenario, EffectivenessModel, ScenarioConfig};
use agility_core::{
    agi_continuous, agi_discrete, align_horizons, diagonal_curve, infer_attack_generations,
    lbt_defender, merge_parties, rgi_series, tt_attacker, tt_defender, AgiSignMode,
    CandidateUniverse, EffectivenessMatrix, GenerationTimeline, InferenceParams, LbtMode,
    LbtParams, MetricValue, Orientation, Party, TieBreak, Time, TimeHorizon,
};

fn matrix_strategy(
    max_end: Time,
    missing: bool,
) -> impl Strategy<Value = EffectivenessMatrix> {
    (1..=max_end)
        .prop_flat_map(move |end| {
            let cells = ((end + 1) * (end + 1)) as usize;
            let cell = if missing {
                prop::option::weighted(0.8, 0.0f64..=1.0).boxed()
            } else {
                (0.0f64..=1.0).prop_map(Some).boxed()
            };
            (Just(end), prop::collection::vec(cell, cells))
        })
        .prop_map(|(end, values)| {
            let horizon = TimeHorizon::new(0, end).unwrap();
            let mut matrix =
                EffectivenessMatrix::new(horizon, "tp", Orientation::LargerIsBetter);
            let n = (end + 1) as usize;
            for (idx, value) in values.into_iter().enumerate() {
                if let Some(v) = value {
                    let t = (idx / n) as Time;
                    let tp = (idx % n) as Time;
                    matrix.set(t, tp, v).unwrap();
                }
            }
            matrix
        })
}

fn timeline_strategy(party: Party, max_end: Time) -> impl Strategy<Value = GenerationTimeline> {
    prop::collection::btree_set(1..=max_end, 0..6)
        .prop_map(move |later| {
            let mut instants = vec![0];
            instants.extend(later);
            GenerationTimeline::new(party, instants)
        })
}

proptest! {
    #[test]
    fn align_horizons_is_symmetric(a in (-500i64..500, 0i64..500), b in (-500i64..500, 0i64..500)) {
        let spans = [(a.0, a.0 + a.1), (b.0, b.0 + b.1)];
        let left = align_horizons(spans[0], spans[1]).unwrap();
        let right = align_horizons(spans[1], spans[0]).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn orientation_flip_is_an_involution(matrix in matrix_strategy(8, true)) {
        let flip = |m: &EffectivenessMatrix| {
            let mut out = m.clone();
            for t in m.horizon().iter() {
                for tp in m.horizon().iter() {
                    if let Some(v) = m.get(t, tp) {
                        out.set(t, tp, 1.0 - v).unwrap();
                    }
                }
            }
            out
        };
        let twice = flip(&flip(&matrix));
        for t in matrix.horizon().iter() {
            for tp in matrix.horizon().iter() {
                match (matrix.get(t, tp), twice.get(t, tp)) {
                    (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-15),
                    (None, None) => {}
                    other => prop_assert!(false, "presence changed: {:?}", other),
                }
            }
        }
    }

    /// Strict LBT never shrinks when the threshold rises; minus-infinity
    /// counts as the largest lag.
    #[test]
    fn lbt_is_monotone_in_epsilon(
        matrix in matrix_strategy(10, true),
        eps in (0.0f64..=1.0, 0.0f64..=1.0),
    ) {
        let (low, high) = if eps.0 <= eps.1 { eps } else { (eps.1, eps.0) };
        let at = |e: f64| {
            lbt_defender(&matrix, &LbtParams::new(e, LbtMode::Strict).unwrap())
                .unwrap()
                .value
        };
        let rank = |v: MetricValue| match v {
            MetricValue::Finite(lag) => lag as i128,
            MetricValue::MinusInfinity => i128::MAX,
            MetricValue::PlusInfinity => unreachable!("LBT never yields +inf"),
        };
        prop_assert!(rank(at(low)) <= rank(at(high)));
    }

    /// TT under matrix transpose-and-flip: the two parties' triggering
    /// times coincide on fully present matrices.
    #[test]
    fn tt_is_dual_under_transpose_flip(
        matrix in matrix_strategy(10, false),
        instants in prop::collection::btree_set(1i64..=10, 1..5),
        candidates in prop::collection::btree_set(0i64..=10, 1..8),
    ) {
        let end = matrix.horizon().end();
        let mut generations = vec![0];
        generations.extend(instants.into_iter().filter(|&t| t <= end));
        prop_assume!(generations.len() >= 2);
        let candidates: Vec<Time> = candidates.into_iter().filter(|&t| t <= end).collect();

        let mut flipped = EffectivenessMatrix::new(
            matrix.horizon().clone(),
            "tp",
            Orientation::LargerIsBetter,
        );
        for t in matrix.horizon().iter() {
            for tp in matrix.horizon().iter() {
                flipped.set(tp, t, 1.0 - matrix.get(t, tp).unwrap()).unwrap();
            }
        }

        let defense = GenerationTimeline::new(Party::Defender, generations.clone());
        let attack = GenerationTimeline::new(Party::Attacker, generations);
        let as_defender =
            tt_defender(&matrix, &defense, &candidates, TieBreak::MostRecent).unwrap();
        let as_attacker =
            tt_attacker(&flipped, &attack, &candidates, TieBreak::MostRecent).unwrap();
        prop_assert_eq!(as_defender.samples.len(), as_attacker.samples.len());
        for (d, a) in as_defender.samples.iter().zip(&as_attacker.samples) {
            prop_assert_eq!(d.anchor, a.anchor);
            prop_assert_eq!(d.value, a.value);
        }
    }

    /// On full diagonals AGI telescopes to the endpoint difference and RGI
    /// sums to twice the horizon times AGI.
    #[test]
    fn agi_and_rgi_telescope(matrix in matrix_strategy(12, false)) {
        let horizon = matrix.horizon();
        let t = (horizon.end() - horizon.start()) as f64;
        let agi = agi_discrete(&matrix, AgiSignMode::Signed).unwrap().agi.unwrap();
        let first = matrix.get(horizon.start(), horizon.start()).unwrap();
        let last = matrix.get(horizon.end(), horizon.end()).unwrap();
        prop_assert!((agi - (last - first) / (2.0 * t)).abs() < 1e-12);

        let rgi = rgi_series(&matrix).unwrap();
        let sum: f64 = rgi.samples.iter().map(|s| s.value.unwrap()).sum();
        prop_assert!((sum - 2.0 * t * agi).abs() < 1e-12);
    }

    #[test]
    fn continuous_agi_matches_discrete_on_unit_embedding(
        diagonal in prop::collection::vec(0.0f64..=1.0, 2..40),
    ) {
        let horizon = TimeHorizon::new(0, diagonal.len() as Time - 1).unwrap();
        let mut matrix = EffectivenessMatrix::new(horizon, "tp", Orientation::LargerIsBetter);
        for (t, &v) in diagonal.iter().enumerate() {
            matrix.set(t as Time, t as Time, v).unwrap();
        }
        let discrete = agi_discrete(&matrix, AgiSignMode::Signed).unwrap().agi.unwrap();
        let continuous = agi_continuous(&diagonal_curve(&matrix), AgiSignMode::Signed)
            .unwrap()
            .agi;
        prop_assert!((discrete - continuous).abs() < 1e-12);
    }

    /// Raising tau never adds probable generations, and the result is
    /// always a valid timeline anchored at the horizon start.
    #[test]
    fn inference_is_monotone_in_tau(
        matrix in matrix_strategy(10, true),
        taus in (0.01f64..0.99, 0.01f64..0.99),
    ) {
        let (low, high) = if taus.0 <= taus.1 { taus } else { (taus.1, taus.0) };
        let infer = |tau: f64| {
            infer_attack_generations(
                &matrix,
                &InferenceParams::new(tau, CandidateUniverse::EveryTimeUnit).unwrap(),
            )
            .unwrap()
        };
        let at_low = infer(low);
        let at_high = infer(high);
        for instant in &at_high.instants {
            prop_assert!(at_low.instants.contains(instant));
        }
        prop_assert_eq!(at_low.instants[0], 0);
        prop_assert!(at_low.instants.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn merge_is_commutative_associative_idempotent(
        a in timeline_strategy(Party::Attacker, 15),
        b in timeline_strategy(Party::Attacker, 15),
        c in timeline_strategy(Party::Attacker, 15),
    ) {
        let ab = merge_parties(&[a.clone(), b.clone()]).unwrap();
        let ba = merge_parties(&[b.clone(), a.clone()]).unwrap();
        prop_assert_eq!(&ab.instants, &ba.instants);

        let ab_c = merge_parties(&[ab.clone(), c.clone()]).unwrap();
        let bc = merge_parties(&[b.clone(), c.clone()]).unwrap();
        let a_bc = merge_parties(&[a.clone(), bc]).unwrap();
        prop_assert_eq!(&ab_c.instants, &a_bc.instants);

        let aa = merge_parties(&[a.clone(), a.clone()]).unwrap();
        prop_assert_eq!(&aa.instants, &a.instants);
    }

    /// GT never exceeds EGT where both are finite, on arbitrary scenarios.
    #[test]
    fn gt_bounded_by_egt(seed in 0u64..5000) {
        let config = ScenarioConfig {
            horizon_length: (seed % 12 + 1) as Time,
            defense_gen_rate: 2.0,
            attack_gen_rate: 2.0,
            effectiveness_model: EffectivenessModel::StepResponse,
            gen_effect_magnitude: 0.2,
            missing_fraction: if seed % 2 == 0 { 0.0 } else { 0.2 },
            seed,
        };
        let scenario = generate_scenario(&config).unwrap();
        let report = compute_report(
            &scenario.matrix,
            &scenario.defense,
            &scenario.attack,
            &RunParams::default(),
            "prop",
        )
        .unwrap();
        for (gt, egt) in [
            (&report.gt_defender, &report.egt_defender),
            (&report.gt_attacker, &report.egt_attacker),
        ] {
            let (gt, egt) = (gt.as_ref().unwrap(), egt.as_ref().unwrap());
            for (g, e) in gt.series.samples.iter().zip(&egt.series.samples) {
                prop_assert_eq!(g.anchor, e.anchor);
                if let (Some(MetricValue::Finite(gv)), Some(MetricValue::Finite(ev))) =
                    (g.value, e.value)
                {
                    prop_assert!(gv <= ev, "GT {} > EGT {} at {}", gv, ev, g.anchor);
                }
            }
        }
    }

    /// Differential check against the brute-force oracle on random
    /// matrices (not just generated scenarios).
    #[test]
    fn main_path_equals_oracle_on_random_matrices(
        matrix in matrix_strategy(12, true),
        defense_extra in prop::collection::btree_set(1i64..=12, 0..5),
        attack_extra in prop::collection::btree_set(1i64..=12, 0..5),
    ) {
        let end = matrix.horizon().end();
        let mut defense = vec![0];
        defense.extend(defense_extra.into_iter().filter(|&t| t <= end));
        let mut attack = vec![0];
        attack.extend(attack_extra.into_iter().filter(|&t| t <= end));
        let defense = GenerationTimeline::new(Party::Defender, defense);
        let attack = GenerationTimeline::new(Party::Attacker, attack);
        let params = RunParams::default();
        let main = compute_report(&matrix, &defense, &attack, &params, "prop").unwrap();
        let oracle = oracle_metrics(&matrix, &defense, &attack, &params, "prop").unwrap();
        let diffs = report_diff(&main, &oracle, 1e-12);
        prop_assert!(diffs.is_empty(), "{:?}", diffs);
    }
}
