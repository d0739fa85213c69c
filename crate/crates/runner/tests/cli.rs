//! The `tickdiff` binary: subcommand plumbing and exit codes.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn tickdiff(args: &[&str], stdin: Option<&str>, cwd: &Path) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tickdiff"))
        .args(args)
        .current_dir(cwd)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(text) = stdin {
            pipe.write_all(text.as_bytes()).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn simulate_discretize_estimate_chain() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tickdiff(&["simulate", "--seed", "4", "--n", "3000", "--quiet"], None, tmp.path());
    assert!(sim.status.success());
    let text = stdout(&sim);
    assert!(text.starts_with("t,return,price\n"));
    assert_eq!(text.lines().count(), 3001);
    let again = tickdiff(&["simulate", "--seed", "4", "--n", "3000"], None, tmp.path());
    assert_eq!(sim.stdout, again.stdout);

    let disc = tickdiff(&["discretize", "--tick", "0.5"], Some(&text), tmp.path());
    assert!(disc.status.success());
    let disc_text = stdout(&disc);
    for line in disc_text.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let k = cols[2] / 0.5;
        assert!((k - k.round()).abs() < 1e-9, "{line}");
    }
    let zero = tickdiff(&["estimate", "zero"], Some(&disc_text), tmp.path());
    let p0: f64 = stdout(&zero).lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(p0 > 0.2 && p0 < 0.8, "p0 {p0}");

    let acf = tickdiff(&["estimate", "acf", "--max-lag", "3"], Some(&text), tmp.path());
    assert_eq!(stdout(&acf).lines().count(), 4);
}

#[test]
fn trades_clock_and_files() {
    let tmp = tempfile::tempdir().unwrap();
    let gen = tickdiff(
        &["simulate", "--trades", "--sessions", "5", "--seed", "1", "-o", "trades.csv"],
        None,
        tmp.path(),
    );
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));
    for mode in ["real", "transaction", "shuffled"] {
        let o = tickdiff(
            &["clock", mode, "trades.csv", "--session-column", "session", "--seed", "3", "--out", "bins"],
            None,
            tmp.path(),
        );
        assert!(o.status.success(), "{mode}: {}", String::from_utf8_lossy(&o.stderr));
        let text = fs::read_to_string(tmp.path().join("bins/clock.csv")).unwrap();
        assert!(text.starts_with("session,start,end,count,return\n"));
        assert!(text.lines().count() > 5 * 20);
    }
}

#[test]
fn ttest_from_before_after_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = "instrument,before,after\nB,0.5,0.2\nA,0.4,0.15\nC,0.45,0.25\n";
    let o = tickdiff(&["ttest", "--statistic", "p0"], Some(csv), tmp.path());
    assert!(o.status.success());
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "p0");
    assert_eq!(row[1], "less");
    assert!(row[7].parse::<f64>().unwrap() < 0.05);
}

#[test]
fn run_writes_bundle_with_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("c.toml"),
        "kind = \"arch_sweep\"\nseed = 1\n[arch]\nn = 4096\n[sweep]\nn_seeds = 3\ndelta_multiples = [0.0, 1.0]\n",
    )
    .unwrap();
    let o = tickdiff(&["run", "c.toml", "--out", "o1", "--seed", "9", "--quiet"], None, tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = fs::read_to_string(tmp.path().join("o1/manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 9"));
    let o2 = tickdiff(&["--config", "c.toml", "run", "--out", "o2", "--seed", "9"], None, tmp.path());
    assert!(o2.status.success());
    for f in ["arch_sweep_acf.csv", "arch_sweep_zero.csv", "arch_baseline.csv"] {
        assert_eq!(
            fs::read(tmp.path().join("o1").join(f)).unwrap(),
            fs::read(tmp.path().join("o2").join(f)).unwrap()
        );
    }
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let code = |args: &[&str], stdin: Option<&str>| tickdiff(args, stdin, tmp.path()).status.code().unwrap();

    // 2: configuration
    assert_eq!(code(&["simulate"], None), 2, "missing seed");
    fs::write(tmp.path().join("bad.toml"), "kind = \"arch_sweep\"\nseed = 1\n[arch]\nalpha1 = 2.0\n").unwrap();
    assert_eq!(code(&["run", "bad.toml"], None), 2);
    fs::write(tmp.path().join("typo.toml"), "kind = \"arch_sweep\"\nsed = 1\n").unwrap();
    assert_eq!(code(&["run", "typo.toml"], None), 2);
    assert_eq!(code(&["run", "missing.toml"], None), 2);
    assert_eq!(code(&["estimate", "hill", "--tail-fraction", "0.9"], Some("return\n1\n2\n")), 2);
    assert_eq!(code(&["nonsense"], None), 2);

    // 3: data
    assert_eq!(code(&["estimate", "zero"], Some("return\n1\nx\n")), 3);
    assert_eq!(code(&["estimate", "zero"], Some("other\n1\n")), 3);
    assert_eq!(code(&["clock", "real"], Some("time,px\n1,2\n")), 3);
    assert_eq!(code(&["estimate", "hill"], Some("return\n1\n2\n")), 3, "too few points");

    // 4: numerical degeneracy
    let constant: String = std::iter::once("return".to_string()).chain((0..50).map(|_| "1".into())).collect::<Vec<_>>().join("\n");
    assert_eq!(code(&["estimate", "acf", "--signed"], Some(&constant)), 4);
    assert_eq!(code(&["ttest"], Some("difference\n1\n1\n1\n")), 4);

    // 0
    assert_eq!(code(&["ttest", "--alternative", "greater"], Some("difference\n0.3\n0.35\n0.25\n0.32\n0.28\n")), 0);
}
