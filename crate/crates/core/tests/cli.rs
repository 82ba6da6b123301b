use std::path::Path;
use std::process::Command;

fn apal(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_apal"))
        .args(args)
        .output()
        .unwrap()
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap()
}

#[test]
fn runs_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = [
        "exact-small",
        "--n",
        "9",
        "--alpha-max",
        "1.2",
        "--runs",
        "12",
        "--seed",
        "4",
        "--out",
        out,
    ];
    let first = apal(&args);
    assert!(
        first.status.success(),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let csv = dir.path().join("metrics_exact-small_n9.csv");
    let bytes = read(&csv);
    let text = String::from_utf8(bytes.clone()).unwrap();
    assert_eq!(text.lines().count(), 1 + 12);
    assert!(text.starts_with(
        "mode,n,p,alpha,mean_error,success_fraction,entropy_density,gen_error,mean_queries,runs\n"
    ));
    for name in ["entropy", "generalization", "error", "error_log", "success"] {
        assert!(
            dir.path()
                .join(format!("fig_{name}_exact-small_n9.svg"))
                .exists(),
            "{name}"
        );
    }
    assert!(apal(&args).status.success());
    assert_eq!(read(&csv), bytes);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    let out = dir.path().join("res");
    std::fs::write(
        &cfg,
        format!(
            "n = 15\nalpha-max = 1\nruns = 3\nseed = 2\nout = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let res = apal(&[
        "deductive",
        "--config",
        cfg.to_str().unwrap(),
        "--n",
        "21",
        "--no-figures",
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let text = std::fs::read_to_string(out.join("metrics_deductive_n21.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 22);

    let plots = dir.path().join("plots");
    let res = apal(&[
        "plot",
        out.join("metrics_deductive_n21.csv").to_str().unwrap(),
        "--out",
        plots.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    assert!(plots.join("fig_success_deductive_n21.svg").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let even = apal(&[
        "passive",
        "--n",
        "10",
        "--alpha-max",
        "1",
        "--runs",
        "1",
        "--seed",
        "0",
        "--out",
        out,
    ]);
    assert_eq!(even.status.code(), Some(2));
    let exact_big = apal(&[
        "exact-small",
        "--n",
        "27",
        "--alpha-max",
        "1",
        "--runs",
        "1",
        "--seed",
        "0",
        "--out",
        out,
    ]);
    assert_eq!(exact_big.status.code(), Some(2));
    assert_eq!(apal(&["bogus"]).status.code(), Some(2));
    let missing = apal(&["passive", "--n", "11"]);
    assert_eq!(missing.status.code(), Some(2));
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let io = apal(&[
        "passive",
        "--n",
        "11",
        "--alpha-max",
        "1",
        "--runs",
        "1",
        "--seed",
        "0",
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(io.status.code(), Some(1));
}
