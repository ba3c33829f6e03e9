//! Suite runs end to end: files, manifest and reproducibility.

use std::fs;

use swarmrl::harness::{run_suite, AggregateSeries, Overrides, SuiteConfig, SuiteOptions, COLUMNS, MANIFEST_FILE};

const SUITE: &str = r#"
name = "small"

[[experiment]]
name = "spread-cl"
rule = "CL"
alpha = 0.05
runs = 400
q_samples = 20000
record_stride = 50

[experiment.env]
family = "spread"
n_arms = 5
variance = 1.0
seed = 2

[experiment.seeds]
count = 6
base = 3

[[experiment]]
name = "spread-wvr"
rule = "WVR"
pop_size = 50
runs = 30
q_samples = 20000

[experiment.env]
family = "spread"
n_arms = 5
variance = 1.0
seed = 2

[experiment.seeds]
count = 6
base = 3

[[experiment]]
name = "spread-mrd"
rule = "MRD"
runs = 30
start = "uniform"
q_samples = 20000

[experiment.env]
family = "spread"
n_arms = 5
variance = 1.0
seed = 2

[experiment.seeds]
count = 6
base = 3
"#;

fn suite() -> SuiteConfig {
    SuiteConfig::from_toml(SUITE).unwrap()
}

#[test]
fn writes_one_csv_per_experiment_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = run_suite(&suite(), dir.path(), SuiteOptions::default()).unwrap();
    assert!(manifest.all_ok());
    for name in ["spread-cl", "spread-wvr", "spread-mrd"] {
        let text = fs::read_to_string(dir.path().join(format!("{name}.csv"))).unwrap();
        assert_eq!(text.lines().next().unwrap(), COLUMNS.join(","));
        let from_disk = AggregateSeries::read_csv(&dir.path().join(format!("{name}.csv"))).unwrap();
        let in_memory = manifest.series(name).unwrap();
        assert_eq!(from_disk.len(), in_memory.len());
        for (a, b) in from_disk.rows.iter().zip(&in_memory.rows) {
            assert_eq!(a.step, b.step);
            assert_eq!(a.mean_value, b.mean_value);
            assert_eq!(a.var_value, b.var_value);
        }
    }
    let cl = manifest.series("spread-cl").unwrap();
    assert_eq!(
        cl.rows.iter().map(|r| r.step).collect::<Vec<_>>(),
        (0..=8).map(|i| i * 50).collect::<Vec<_>>()
    );
    assert!((cl.last().unwrap().time - 20.0).abs() < 1e-12);
    assert!(cl.rows[0].mean_sampled_reward.is_nan());

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(json["suite"], "small");
    assert_eq!(json["experiments"].as_array().unwrap().len(), 3);
    assert_eq!(json["experiments"][0]["cells"].as_array().unwrap().len(), 6);
    assert!(json["variance"].as_str().unwrap().contains("population"));
    // The embedded config reproduces the suite.
    let embedded = SuiteConfig::from_toml(json["config"].as_str().unwrap()).unwrap();
    assert_eq!(embedded, suite());
}

#[test]
fn same_seed_gives_identical_bytes_and_other_seed_does_not() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    run_suite(&suite(), a.path(), SuiteOptions { jobs: Some(1) }).unwrap();
    run_suite(&suite(), b.path(), SuiteOptions { jobs: Some(3) }).unwrap();
    let mut other = suite();
    other.override_all(&Overrides {
        seed: Some(99),
        ..Overrides::default()
    });
    run_suite(&other, c.path(), SuiteOptions::default()).unwrap();
    for file in ["spread-cl.csv", "spread-wvr.csv", "spread-mrd.csv", MANIFEST_FILE] {
        assert_eq!(
            fs::read(a.path().join(file)).unwrap(),
            fs::read(b.path().join(file)).unwrap(),
            "{file}"
        );
    }
    assert_ne!(
        fs::read(a.path().join("spread-cl.csv")).unwrap(),
        fs::read(c.path().join("spread-cl.csv")).unwrap()
    );
    // The uniform-start reference does not depend on the seed at all.
    assert_eq!(
        fs::read(a.path().join("spread-mrd.csv")).unwrap(),
        fs::read(c.path().join("spread-mrd.csv")).unwrap()
    );
}

#[test]
fn overrides_replace_file_values() {
    let mut s = suite();
    s.override_all(&Overrides {
        seed: Some(1),
        seeds: Some(2),
        runs: Some(10),
        q_samples: Some(500),
    });
    for e in &s.experiments {
        assert_eq!((e.seeds.base, e.seeds.count, e.runs, e.q_samples), (1, 2, 10, 500));
    }
    let dir = tempfile::tempdir().unwrap();
    let manifest = run_suite(&s, dir.path(), SuiteOptions::default()).unwrap();
    assert_eq!(manifest.series("spread-wvr").unwrap().last().unwrap().step, 10);
}

#[test]
fn invalid_suites_are_rejected_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let mut s = suite();
    s.experiments[1].alpha = Some(0.1);
    assert!(run_suite(&s, &out, SuiteOptions::default()).is_err());
    assert!(!out.exists());

    assert!(SuiteConfig::from_toml(&SUITE.replace("alpha = 0.05", "alpha = 0.05\nbeta = 1")).is_err());
    assert!(SuiteConfig::from_toml(&SUITE.replace("\"spread-wvr\"", "\"spread-cl\"")).is_err());
}

#[test]
fn empty_suite_writes_only_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let empty = SuiteConfig::from_toml("name = \"nothing\"\n").unwrap();
    let manifest = run_suite(&empty, dir.path(), SuiteOptions::default()).unwrap();
    assert!(manifest.all_ok());
    let files: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(files, [MANIFEST_FILE]);
}
