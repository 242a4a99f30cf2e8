use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn schmidt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schmidt")).args(args).output().expect("spawn schmidt")
}

fn config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const PLAY: &str = r#"
mode = "play"
A = "1/3"
support = "box"

[game]
strategy = "badA"
black = "random"
rounds = 6
Q = 2000
"#;

#[test]
fn same_config_and_seed_give_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "play.toml", PLAY);
    let mut texts = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = schmidt(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "5"]);
        assert!(o.status.success(), "{}", stdout(&o));
        texts.push(fs::read(out.join("transcript.json")).unwrap());
    }
    assert_eq!(texts[0], texts[1]);

    let out = dir.path().join("c");
    let o = schmidt(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "6"]);
    assert!(o.status.success());
    assert_ne!(fs::read(out.join("transcript.json")).unwrap(), texts[0]);
}

#[test]
fn emitted_transcripts_replay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "play.toml", PLAY);
    let out = dir.path().join("run");
    let o = schmidt(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let t = out.join("transcript.json");
    let o = schmidt(&["--replay", t.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("identical"));

    // A tampered radius must be caught.
    let text = fs::read_to_string(&t).unwrap().replacen("\"radius\": \"1/64\"", "\"radius\": \"1/32\"", 1);
    let bad = config(dir.path(), "bad.json", &text);
    let o = schmidt(&["--replay", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn badb_play_replays_through_black_replay_player() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "b.toml",
        "mode = \"play\"\nb = \"1/3\"\n[game]\nstrategy = \"badB\"\nblack = \"random\"\nrounds = 8\nQ = 500\n",
    );
    let out = dir.path().join("b");
    let o = schmidt(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    let t = out.join("transcript.json");
    // Same game with black read back from the transcript.
    let cfg2 = config(
        dir.path(),
        "b2.toml",
        &format!(
            "mode = \"play\"\nb = \"1/3\"\n[game]\nstrategy = \"badB\"\nblack = \"replay:{}\"\nrounds = 8\nQ = 500\n",
            t.display()
        ),
    );
    let out2 = dir.path().join("b2");
    let o = schmidt(&["--config", cfg2.to_str().unwrap(), "--out", out2.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    let rounds = |p: &Path| {
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap();
        v["transcript"]["rounds"].clone()
    };
    assert_eq!(rounds(&t), rounds(&out2.join("transcript.json")));
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("mode = \"scan-badness\"\nA = \"1/0\"\n", "A"),
        ("mode = \"play\"\nA = \"1/3\"\n[game]\nbeta = \"3/2\"\n", "game"),
        ("mode = \"play\"\nA = \"1/3\"\n[game]\nblack = \"nobody\"\n", "game.black"),
        ("mode = \"scan-badness\"\nA = \"1/3\"\nbogus = 1\n", "(file)"),
        ("mode = \"scan-badness\"\n", "A"),
    ];
    for (i, (text, field)) in cases.iter().enumerate() {
        let cfg = config(dir.path(), &format!("{i}.toml"), text);
        let o = schmidt(&["--config", cfg.to_str().unwrap(), "--out", dir.path().join("x").to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "case {i}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(field), "case {i}: {err}");
    }
}

#[test]
fn golden_scan_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "g.toml", "mode = \"scan-badness\"\nA = \"golden\"\n[scan]\nQ = 1000\n");
    let out = dir.path().join("g");
    let o = schmidt(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--precision", "200"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("0.3819660113"), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("badness.json")).unwrap()).unwrap();
    assert_eq!(v["header"]["precision"], 200);
    assert_eq!(v["header"]["constants"][0]["name"], "golden");
    assert_eq!(v["estimate"]["argmin_q"][0], 1);
}

#[test]
fn failed_decay_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "d.toml",
        "mode = \"verify-decay\"\nsupport = \"cantor\"\n[decay]\nC = 4\neta = 1\n[verify_decay]\ntrials = 2000\nseed = 1\n",
    );
    let o = schmidt(&["--config", cfg.to_str().unwrap(), "--out", dir.path().join("d").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("counterexample"));
}
