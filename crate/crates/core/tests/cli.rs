//! The `swarmrl` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn swarmrl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swarmrl")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn lists_presets() {
    let o = swarmrl(&["presets"]);
    assert!(o.status.success());
    let names: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(
        names,
        [
            "figure-1",
            "figure-2",
            "figure-3",
            "figure-4",
            "appendix-A1",
            "appendix-A2"
        ]
    );
}

#[test]
fn dumped_preset_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let toml = dir.path().join("f3.toml");
    assert!(swarmrl(&["presets", "--dump", "figure-3", "--out", path(&toml)])
        .status
        .success());
    let small = ["--seeds", "3", "--runs", "12", "--q-samples", "2000"];
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let from_preset = swarmrl(&[&["suite", "--config", "figure-3", "--out", path(&a)][..], &small].concat());
    let from_file = swarmrl(&[&["suite", "--config", path(&toml), "--out", path(&b)][..], &small].concat());
    assert_eq!(from_preset.status.code(), Some(0));
    assert_eq!(from_file.status.code(), Some(0));
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 7);
    for name in names {
        assert_eq!(
            fs::read(a.join(&name)).unwrap(),
            fs::read(b.join(&name)).unwrap(),
            "{name:?}"
        );
    }
    let rows = fs::read_to_string(a.join("spread-vr-10.csv")).unwrap().lines().count();
    assert_eq!(rows, 14);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    assert_eq!(
        swarmrl(&["suite", "--config", "no-such-preset", "--out", path(&out)])
            .status
            .code(),
        Some(2)
    );
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "name = \"x\"\nunknown = 1\n").unwrap();
    assert_eq!(
        swarmrl(&["suite", "--config", path(&bad), "--out", path(&out)])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(swarmrl(&["rl", "--rule", "sgd"]).status.code(), Some(2));
    assert_eq!(
        swarmrl(&["ode", "--rule", "trd", "--alpha", "-1", "--q-samples", "10"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(swarmrl(&["--help"]).status.code(), Some(0));
    assert_eq!(swarmrl(&["--version"]).status.code(), Some(0));
}

#[test]
fn single_runs_write_trajectories() {
    let common = [
        "--env",
        "near-zero",
        "--arms",
        "4",
        "--seed",
        "5",
        "--q-samples",
        "2000",
    ];
    let rl = swarmrl(
        &[
            &["rl", "--rule", "mcl", "--runs", "300", "--record-stride", "100"][..],
            &common,
        ]
        .concat(),
    );
    assert!(rl.status.success());
    let text = stdout(&rl);
    assert!(text.starts_with("step,time,value,sampled_reward,mass_optimal,argmax_optimal,p0,p1,p2,p3\n"));
    assert_eq!(text.lines().count(), 5);
    let again = swarmrl(
        &[
            &["rl", "--rule", "mcl", "--runs", "300", "--record-stride", "100"][..],
            &common,
        ]
        .concat(),
    );
    assert_eq!(text, stdout(&again));

    let dir = tempfile::tempdir().unwrap();
    let members = dir.path().join("members.csv");
    let pop = swarmrl(
        &[
            &[
                "population",
                "--rule",
                "vr",
                "--pop-size",
                "20",
                "--runs",
                "5",
                "--dump-members",
                path(&members),
            ][..],
            &common,
        ]
        .concat(),
    );
    assert!(pop.status.success());
    assert!(stdout(&pop).lines().next().unwrap().ends_with("c0,c1,c2,c3"));
    assert!(members.exists());

    let ode = swarmrl(
        &[
            &["ode", "--rule", "mrd", "--runs", "10", "--start", "uniform"][..],
            &common,
        ]
        .concat(),
    );
    assert!(ode.status.success());
    assert_eq!(stdout(&ode).lines().count(), 12);

    let q = swarmrl(&[
        "estimate-q",
        "--env",
        "spread",
        "--arms",
        "3",
        "--seed",
        "1",
        "--samples",
        "1000",
    ]);
    let text = stdout(&q);
    assert_eq!(text.lines().next(), Some("arm,latent_mean,q"));
    assert_eq!(text.lines().count(), 4);
}
