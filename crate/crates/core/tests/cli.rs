//! Exit codes, manifests and reproducibility of the command-line runner.

use insider::cli::{main_with_args, EXIT_USAGE};
use insider::config::ExperimentConfig;
use std::path::Path;
use std::process::Command;

fn run(dir: &Path, args: &[&str]) -> i32 {
    let out = dir.to_string_lossy().into_owned();
    let mut full = vec!["insider", "--out", out.as_str()];
    full.extend_from_slice(args);
    main_with_args(full)
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    for cmd in [&["simulate"][..], &["value"], &["arbitrage"], &["drift"]] {
        let a = tmp.path().join(format!("{}-a", cmd[0]));
        let b = tmp.path().join(format!("{}-b", cmd[0]));
        let args: Vec<&str> = ["--paths", "300", "--steps", "100", "--seed", "5"].iter().chain(cmd).copied().collect();
        run(&a, &args);
        // a different worker count must not change a single byte
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        pool.install(|| run(&b, &args));
        let (fa, fb) = (read_dir_bytes(&a), read_dir_bytes(&b));
        assert!(fa.len() >= 2, "{}: {:?}", cmd[0], fa.iter().map(|f| &f.0).collect::<Vec<_>>());
        assert_eq!(fa, fb, "{} differs between runs", cmd[0]);
    }
}

#[test]
fn manifest_reparses_to_the_run_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("run.cfg");
    std::fs::write(
        &cfg_path,
        "model.eta = 0:0.1, 0.5:0.04\ninfo.kind = exact\nutility.gamma = 0.25\nrun.deltas = 0.1,0.01,0.001,0.0001,0.00001\n",
    )
    .unwrap();
    let out = tmp.path().join("out");
    let code = run(&out, &["--config", cfg_path.to_str().unwrap(), "--seed", "9", "--paths", "200", "--steps", "50", "simulate"]);
    assert_eq!(code, 0);
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    let reparsed = ExperimentConfig::parse(&manifest).unwrap();
    let expected = ExperimentConfig::load(&cfg_path).unwrap().with_overrides(Some(9), Some(200), Some(50)).unwrap();
    assert_eq!(reparsed, expected);
    assert_eq!(reparsed.render(), manifest);
}

#[test]
fn csv_reals_carry_seventeen_digits() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(tmp.path(), &["--paths", "100", "--steps", "20", "simulate"]), 0);
    let text = std::fs::read_to_string(tmp.path().join("paths.csv")).unwrap();
    let row = text.lines().nth(5).unwrap();
    let s = row.split(',').nth(3).unwrap();
    let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 17, "{s}");
}

#[test]
fn usage_errors_exit_64() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.cfg");
    std::fs::write(&bad, "model.r = 0.02\nmodel.rr = 1\n").unwrap();
    let bad = bad.to_str().unwrap();
    assert_eq!(run(tmp.path(), &["--config", bad, "value"]), EXIT_USAGE);
    assert_eq!(run(tmp.path(), &["verify", "no_such_check"]), EXIT_USAGE);
    assert_eq!(run(tmp.path(), &["frobnicate"]), EXIT_USAGE);
    assert_eq!(run(tmp.path(), &["--paths", "many", "simulate"]), EXIT_USAGE);
    assert_eq!(run(tmp.path(), &["--config", "/nonexistent/run.cfg", "value"]), EXIT_USAGE);
    // union information has no stopping-time arbitrage to run
    let union = tmp.path().join("union.cfg");
    std::fs::write(&union, "info.kind = union\n").unwrap();
    assert_eq!(run(tmp.path(), &["--config", union.to_str().unwrap(), "arbitrage"]), EXIT_USAGE);
}

#[test]
fn verdicts_map_to_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(tmp.path(), &["verify", "mixture_zero"]), 0);
    let verdict = std::fs::read_to_string(tmp.path().join("verdict_mixture_zero.txt")).unwrap();
    assert!(verdict.starts_with("check_name=mixture_zero\nstatus=pass\n"), "{verdict}");
    // the union drift grows like distance / (T - t) near the boundary
    assert_eq!(run(tmp.path(), &["verify", "union_alpha_bound"]), 1);
    let verdict = std::fs::read_to_string(tmp.path().join("verdict_union_alpha_bound.txt")).unwrap();
    assert!(verdict.contains("status=fail"));
}

#[test]
fn binary_reports_status_and_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_insider"))
        .args(["--out", tmp.path().to_str().unwrap(), "verify", "lemma_I"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("status=pass"));
    let out = Command::new(env!("CARGO_BIN_EXE_insider")).arg("--bogus").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    let out = Command::new(env!("CARGO_BIN_EXE_insider")).arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}
