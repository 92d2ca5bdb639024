//! Acceptance suite: one test per criterion, each printing its pass line.
//! Tolerances are pinned in the assertions; integer and sentinel results are
//! compared exactly, real-valued results within 1e-12 unless stated.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use agility_core::oracle::oracle_metrics;
use agility_core::report::{compute_report, report_diff, AgilityReport, RunParams};
use agility_core::scenario::{generate_scenario, EffectivenessModel, Scenario, ScenarioConfig};
use agility_core::{
    agi_continuous, agi_discrete, diagonal_curve, infer_attack_generations, ingest,
    lbt_attacker, lbt_defender, AgiSignMode, CandidateUniverse, EffectivenessMatrix,
    GenerationTimeline, InferenceParams, LbtMode, LbtParams, MetricValue, Orientation, Party,
    Time, TimeHorizon,
};

fn toy_fixture_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/toy.csv")
}

/// The criterion-2 scenario corpus: 1000 seeded scenarios with horizons up
/// to 12 and missing fractions alternating between 0 and 0.2.
fn scenario_corpus() -> impl Iterator<Item = (u64, Scenario)> {
    (0..1000u64).map(|seed| {
        let config = ScenarioConfig {
            horizon_length: (seed % 12 + 1) as Time,
            defense_gen_rate: 1.5 + (seed % 5) as f64,
            attack_gen_rate: 1.0 + 0.7 * (seed % 7) as f64,
            effectiveness_model: match seed % 3 {
                0 => EffectivenessModel::StepResponse,
                1 => EffectivenessModel::Drift,
                _ => EffectivenessModel::Stalemate,
            },
            gen_effect_magnitude: 0.05 + 0.1 * (seed % 4) as f64,
            missing_fraction: if seed % 2 == 0 { 0.0 } else { 0.2 },
            seed,
        };
        (seed, generate_scenario(&config).expect("valid config"))
    })
}

fn scenario_report(scenario: &Scenario) -> AgilityReport {
    compute_report(
        &scenario.matrix,
        &scenario.defense,
        &scenario.attack,
        &RunParams::default(),
        "scenario",
    )
    .expect("scenario inputs are valid")
}

fn random_matrix(rng: &mut ChaCha8Rng, end: Time, missing: f64) -> EffectivenessMatrix {
    let horizon = TimeHorizon::new(0, end).unwrap();
    let mut matrix = EffectivenessMatrix::new(horizon, "tp", Orientation::LargerIsBetter);
    for t in 0..=end {
        for tp in 0..=end {
            if rng.gen::<f64>() >= missing {
                matrix.set(t, tp, rng.gen::<f64>()).unwrap();
            }
        }
    }
    matrix
}

#[test]
fn criterion_01_toy_example_regression() {
    let started = Instant::now();
    let parsed = ingest::parse_matrix_file(toy_fixture_path()).expect("toy fixture parses");
    let report = compute_report(
        &parsed.matrix,
        &parsed.defense,
        &parsed.attack,
        &RunParams::default(),
        "toy",
    )
    .expect("toy fixture computes");

    let duration_values = |series: &Option<agility_core::report::ReportSeries<MetricValue>>| {
        series
            .as_ref()
            .unwrap()
            .series
            .samples
            .iter()
            .map(|s| s.value.unwrap())
            .collect::<Vec<_>>()
    };
    assert_eq!(
        duration_values(&report.gt_defender),
        vec![MetricValue::Finite(3), MetricValue::Finite(1)],
        "GT(D)"
    );
    assert_eq!(
        duration_values(&report.gt_attacker),
        vec![MetricValue::Finite(4), MetricValue::Finite(2)],
        "GT(A)"
    );
    assert_eq!(
        report.egt_defender.as_ref().unwrap().series.samples[0].value,
        Some(MetricValue::Finite(4)),
        "EGT(D,0)"
    );
    assert_eq!(
        report.egt_attacker.as_ref().unwrap().series.samples[0].value,
        Some(MetricValue::Finite(6)),
        "EGT(A,0)"
    );
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!("criterion 1 (toy-example regression): PASS in {elapsed:?}");
}

#[test]
fn criterion_02_oracle_equivalence_on_1000_scenarios() {
    let started = Instant::now();
    let mut checked = 0usize;
    for (seed, scenario) in scenario_corpus() {
        let params = RunParams::default();
        let main = scenario_report(&scenario);
        let oracle = oracle_metrics(
            &scenario.matrix,
            &scenario.defense,
            &scenario.attack,
            &params,
            "scenario",
        )
        .expect("oracle accepts desk-scale scenarios");
        let diffs = report_diff(&main, &oracle, 1e-12);
        assert!(diffs.is_empty(), "seed {seed}: {diffs:?}");
        checked += 1;
    }
    assert_eq!(checked, 1000);
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!("criterion 2 (oracle equivalence, 1000 scenarios): PASS in {elapsed:?}");
}

#[test]
fn criterion_03_gt_never_exceeds_egt() {
    let mut pairs = 0usize;
    for (seed, scenario) in scenario_corpus() {
        let report = scenario_report(&scenario);
        for (gt, egt) in [
            (&report.gt_defender, &report.egt_defender),
            (&report.gt_attacker, &report.egt_attacker),
        ] {
            let gt = &gt.as_ref().unwrap().series;
            let egt = &egt.as_ref().unwrap().series;
            assert_eq!(gt.samples.len(), egt.samples.len(), "seed {seed}");
            for (g, e) in gt.samples.iter().zip(&egt.samples) {
                assert_eq!(g.anchor, e.anchor, "seed {seed}");
                if let (Some(MetricValue::Finite(gv)), Some(MetricValue::Finite(ev))) =
                    (g.value, e.value)
                {
                    assert!(gv <= ev, "seed {seed} anchor {}: GT {gv} > EGT {ev}", g.anchor);
                    pairs += 1;
                }
            }
        }
    }
    println!("criterion 3 (GT <= EGT on every finite pair, {pairs} pairs): PASS");
}

#[test]
fn criterion_04_attacker_values_are_exact_negations() {
    for (seed, scenario) in scenario_corpus() {
        let report = scenario_report(&scenario);
        let defender = &report.rgi_defender.as_ref().unwrap().series;
        let attacker = &report.rgi_attacker.as_ref().unwrap().series;
        assert_eq!(defender.samples.len(), attacker.samples.len(), "seed {seed}");
        for (d, a) in defender.samples.iter().zip(&attacker.samples) {
            assert_eq!(d.anchor, a.anchor, "seed {seed}");
            assert_eq!(a.value.unwrap(), -d.value.unwrap(), "seed {seed} t={}", d.anchor);
        }
        let agi_d = report.agi_defender.as_ref().unwrap().agi;
        let agi_a = report.agi_attacker.as_ref().unwrap().agi;
        match (agi_d, agi_a) {
            (Some(d), Some(a)) => assert_eq!(a, -d, "seed {seed}"),
            (None, None) => {}
            other => panic!("seed {seed}: determinacy differs {other:?}"),
        }
    }
    println!("criterion 4 (RGI/AGI negation duality, exact): PASS");
}

#[test]
fn criterion_05_full_diagonal_telescoping() {
    let mut checked = 0usize;
    for (seed, scenario) in scenario_corpus() {
        if seed % 2 != 0 {
            continue; // only the fully present scenarios have full diagonals
        }
        let matrix = &scenario.matrix;
        let horizon = matrix.horizon();
        let span = (horizon.end() - horizon.start()) as f64;
        let first = matrix.get(horizon.start(), horizon.start()).unwrap();
        let last = matrix.get(horizon.end(), horizon.end()).unwrap();
        let report = scenario_report(&scenario);
        let agi = report.agi_defender.as_ref().unwrap().agi.unwrap();
        assert!(
            (agi - (last - first) / (2.0 * span)).abs() <= 1e-12,
            "seed {seed}: AGI does not telescope"
        );
        let rgi_sum: f64 = report
            .rgi_defender
            .as_ref()
            .unwrap()
            .series
            .samples
            .iter()
            .map(|s| s.value.unwrap())
            .sum();
        assert!(
            (rgi_sum - 2.0 * span * agi).abs() <= 1e-12,
            "seed {seed}: RGI sum does not telescope"
        );
        checked += 1;
    }
    assert_eq!(checked, 500);
    println!("criterion 5 (telescoping on {checked} full diagonals): PASS");
}

#[test]
fn criterion_06_continuous_discrete_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(1_060);
    for case in 0..100 {
        let len = rng.gen_range(2..=60usize);
        let horizon = TimeHorizon::new(0, len as Time - 1).unwrap();
        let mut matrix = EffectivenessMatrix::new(horizon, "tp", Orientation::LargerIsBetter);
        for t in 0..len as Time {
            matrix.set(t, t, rng.gen::<f64>()).unwrap();
        }
        let discrete = agi_discrete(&matrix, AgiSignMode::Signed)
            .unwrap()
            .agi
            .unwrap();
        let continuous = agi_continuous(&diagonal_curve(&matrix), AgiSignMode::Signed)
            .unwrap()
            .agi;
        assert!(
            (discrete - continuous).abs() <= 1e-12,
            "case {case}: discrete {discrete} vs continuous {continuous}"
        );
    }
    println!("criterion 6 (continuous/discrete AGI consistency, 100 diagonals): PASS");
}

#[test]
fn criterion_07_lbt_monotonicity_and_boundaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(1_070);
    for case in 0..50 {
        let end = rng.gen_range(1..=15);
        let matrix = random_matrix(&mut rng, end, if case % 2 == 0 { 0.0 } else { 0.3 });
        let mut eps = [rng.gen::<f64>(), rng.gen::<f64>()];
        eps.sort_by(f64::total_cmp);
        let lbt_at = |epsilon: f64| {
            lbt_defender(&matrix, &LbtParams::new(epsilon, LbtMode::Strict).unwrap())
                .unwrap()
                .value
        };
        let rank = |v: MetricValue| match v {
            MetricValue::Finite(lag) => lag as i128,
            MetricValue::MinusInfinity => i128::MAX,
            MetricValue::PlusInfinity => unreachable!("LBT never yields +inf"),
        };
        assert!(
            rank(lbt_at(eps[0])) <= rank(lbt_at(eps[1])),
            "case {case}: raising epsilon decreased LBT"
        );
    }

    let end: Time = 9;
    let horizon = TimeHorizon::new(0, end).unwrap();
    let mut all_ones = EffectivenessMatrix::new(horizon.clone(), "tp", Orientation::LargerIsBetter);
    let mut all_low = EffectivenessMatrix::new(horizon, "tp", Orientation::LargerIsBetter);
    for t in 0..=end {
        for tp in 0..=end {
            all_ones.set(t, tp, 1.0).unwrap();
            all_low.set(t, tp, 0.05).unwrap();
        }
    }
    let params = LbtParams::new(0.5, LbtMode::Strict).unwrap();
    assert_eq!(lbt_defender(&all_ones, &params).unwrap().value, MetricValue::Finite(0));
    assert_eq!(
        lbt_attacker(&all_ones, &params).unwrap().value,
        MetricValue::Finite(end as u64)
    );
    assert_eq!(lbt_defender(&all_low, &params).unwrap().value, MetricValue::MinusInfinity);
    assert_eq!(lbt_attacker(&all_low, &params).unwrap().value, MetricValue::MinusInfinity);
    println!("criterion 7 (LBT monotone in epsilon; boundary fixtures): PASS");
}

#[test]
fn criterion_08_inference_monotonicity_and_pair_scan_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1_080);
    for case in 0..100 {
        let end = rng.gen_range(1..=12);
        let matrix = random_matrix(&mut rng, end, if case % 3 == 0 { 0.25 } else { 0.0 });
        let mut taus = [rng.gen_range(0.01..0.99), rng.gen_range(0.01..0.99)];
        taus.sort_by(f64::total_cmp);

        let infer = |tau: f64| {
            infer_attack_generations(
                &matrix,
                &InferenceParams::new(tau, CandidateUniverse::EveryTimeUnit).unwrap(),
            )
            .unwrap()
            .instants
        };
        let at_low = infer(taus[0]);
        let at_high = infer(taus[1]);
        assert!(
            at_high.iter().all(|t| at_low.contains(t)),
            "case {case}: raising tau added instants"
        );

        // exhaustive pair scan straight from the flagging inequality
        for &tau in &taus {
            let mut expected = vec![0];
            for t_prime in 1..=end {
                let mut flagged = false;
                for t in 0..t_prime {
                    if let (Some(own), Some(against)) =
                        (matrix.get(t, t), matrix.get(t, t_prime))
                    {
                        if own - against > tau {
                            flagged = true;
                        }
                    }
                }
                if flagged {
                    expected.push(t_prime);
                }
            }
            assert_eq!(infer(tau), expected, "case {case} tau {tau}");
        }
    }
    println!("criterion 8 (inference monotone in tau; equals pair-scan oracle): PASS");
}

#[test]
fn criterion_09_stalemate_shape_replication() {
    let started = Instant::now();
    let config = ScenarioConfig {
        horizon_length: 200,
        effectiveness_model: EffectivenessModel::Stalemate,
        gen_effect_magnitude: 0.1,
        missing_fraction: 0.0,
        seed: 9,
        ..ScenarioConfig::default()
    };
    let scenario = generate_scenario(&config).unwrap();
    let report = scenario_report(&scenario);
    let agi = report.agi_defender.as_ref().unwrap().agi.unwrap();
    assert!(agi.abs() <= 0.01, "AGI {agi} is not a stalemate");
    let rgi = &report.rgi_defender.as_ref().unwrap().series;
    let mean_abs: f64 = rgi
        .samples
        .iter()
        .map(|s| s.value.unwrap().abs())
        .sum::<f64>()
        / rgi.samples.len() as f64;
    assert!(mean_abs >= 0.04, "mean |RGI| {mean_abs} shows no churn");
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!(
        "criterion 9 (stalemate: |AGI| = {:.5} <= 0.01, mean |RGI| = {mean_abs:.3} >= 0.04): PASS in {elapsed:?}",
        agi.abs()
    );
}

#[test]
fn criterion_10_round_trip_fidelity() {
    // matrix file: parse ∘ export is identity, and the canonical fixture is
    // byte-stable
    let path = toy_fixture_path();
    let original_bytes = std::fs::read_to_string(&path).unwrap();
    let parsed = ingest::parse_matrix_file(&path).unwrap();
    let rendered = ingest::matrix_to_string(&parsed.matrix, &parsed.defense, &parsed.attack);
    assert_eq!(rendered, original_bytes, "matrix export is not byte-identical");
    let reparsed = ingest::parse_matrix_str(&rendered).unwrap();
    assert_eq!(reparsed.matrix, parsed.matrix);
    assert_eq!(reparsed.defense, parsed.defense);
    assert_eq!(reparsed.attack, parsed.attack);

    // structured report: export ∘ re-parse preserves every value, and
    // re-export is byte-identical, sentinels included
    let report = compute_report(
        &parsed.matrix,
        &parsed.defense,
        &parsed.attack,
        &RunParams::default(),
        "toy",
    )
    .unwrap();
    let json = report.to_json();
    assert!(json.contains("\"+inf\""), "toy report should carry +inf TT sentinels");
    let back = AgilityReport::from_json(&json).unwrap();
    assert_eq!(back, report, "re-parsed report lost a value");
    assert_eq!(back.to_json(), json, "re-export is not byte-identical");

    // sentinel coverage for -inf as well
    let horizon = TimeHorizon::new(0, 3).unwrap();
    let mut low = EffectivenessMatrix::new(horizon, "tp", Orientation::LargerIsBetter);
    for t in 0..=3 {
        for tp in 0..=3 {
            low.set(t, tp, 0.01).unwrap();
        }
    }
    let defense = GenerationTimeline::new(Party::Defender, vec![0, 2]);
    let attack = GenerationTimeline::new(Party::Attacker, vec![0, 1]);
    let report = compute_report(&low, &defense, &attack, &RunParams::default(), "low").unwrap();
    let json = report.to_json();
    assert!(json.contains("\"-inf\""));
    let back = AgilityReport::from_json(&json).unwrap();
    assert_eq!(back, report);
    println!("criterion 10 (matrix and report round-trip fidelity): PASS");
}
