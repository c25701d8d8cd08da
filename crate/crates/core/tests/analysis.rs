use instlab::analysis::{read_jsonl, report, to_jsonl, BootstrapConfig, Dataset, ReportConfig, Trial};
use instlab::features::{generate_space, SpaceConfig};
use instlab::fixtures::{paper_preference_table, paper_shaped_dataset};

fn config() -> ReportConfig {
    ReportConfig { bootstrap: BootstrapConfig { resamples: 2_000, seed: 11, ..Default::default() }, ..Default::default() }
}

#[test]
fn fixture_preferences_track_the_reported_table() {
    let space = generate_space(&SpaceConfig::default()).unwrap();
    let r = report(&paper_shaped_dataset(&space, 11), &space, &config()).unwrap();
    let table = paper_preference_table();
    for p in &r.preferences {
        let Some(reported) = table.get(&p.pair) else { continue };
        // about 25 choosers per pair, so only a loose agreement is expected
        assert!((p.estimate.value - reported.value).abs() < 0.3, "{} {} vs {}", p.pair, p.estimate, reported);
        assert!(p.estimate.ci_low <= p.estimate.value && p.estimate.value <= p.estimate.ci_high);
    }
    assert_eq!(r.paths.len(), 6);
}

#[test]
fn csv_tables_have_one_row_per_item() {
    let space = generate_space(&SpaceConfig::default()).unwrap();
    let r = report(&paper_shaped_dataset(&space, 12), &space, &config()).unwrap();
    let mut buf = Vec::new();
    r.write_preferences_csv(&mut buf).unwrap();
    let rows: Vec<csv::StringRecord> = csv::Reader::from_reader(&buf[..]).records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), r.preferences.len());
    let mut buf = Vec::new();
    r.write_paths_csv(&mut buf).unwrap();
    assert_eq!(csv::Reader::from_reader(&buf[..]).records().count(), 6 * 3);
}

#[test]
fn jsonl_round_trip_and_inconsistent_trials() {
    let space = generate_space(&SpaceConfig::default()).unwrap();
    let data = paper_shaped_dataset(&space, 13);
    let trials: Vec<Trial> = read_jsonl(&to_jsonl(&data.trials)[..]).unwrap();
    assert_eq!(trials, data.trials);

    let mut bad = data.clone();
    bad.trials[0].u1 += 1;
    assert!(report(&bad, &space, &config()).is_err());
    assert!(report(&Dataset::default(), &space, &config()).is_err());
}

#[test]
fn simulated_choices_reproduce_a_configured_table() {
    use instlab::agents::{simulate_cohort, AgentPolicy, PolicyKind, PreferenceModel, SimulationConfig};
    use instlab::analysis::Estimate;
    use instlab::features::pairs_for_width;
    use instlab::protocol::all_conditions;

    let space = generate_space(&SpaceConfig::default()).unwrap();
    let table: std::collections::BTreeMap<_, _> = pairs_for_width(3)
        .into_iter()
        .enumerate()
        .map(|(i, p)| (p, Estimate::reported(0.2 + 0.05 * i as f64, 0.0, 1.0)))
        .collect();
    let config = SimulationConfig {
        policy: AgentPolicy::new(PolicyKind::UniformRandom),
        model: PreferenceModel::EmpiricalTable(table.clone()),
        rounds_per_stage: 1,
    };
    let conditions = all_conditions(3);
    let mut prefs = Vec::new();
    // 10,000 choices per pair
    for chunk in 0..10 {
        prefs.extend(simulate_cohort(&space, &conditions, 12_000, &config, chunk).unwrap().preferences);
    }
    for (pair, e) in &table {
        let of_pair: Vec<_> = prefs.iter().filter(|r| r.pair() == *pair).collect();
        let high = of_pair.iter().filter(|r| r.chosen == pair.high).count() as f64 / of_pair.len() as f64;
        assert_eq!(of_pair.len(), 10_000);
        assert!((high - e.value).abs() <= 0.02, "{pair}: {high} vs {}", e.value);
    }
}
