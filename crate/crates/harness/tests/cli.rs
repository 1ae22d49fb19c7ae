use std::path::Path;
use std::process::{Command, Output};

use mirrorboost_harness::config::ExperimentConfig;
use mirrorboost_harness::data::DataSource;
use proptest::prelude::*;

fn mirrorboost(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mirrorboost"));
    cmd.args(args).env_remove("MIRRORBOOST_OUT_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    mirrorboost(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn run_writes_all_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let res = run(&[
        "run",
        "adaboost",
        "--iters",
        "30",
        "--data",
        "synthetic:separable:seed=7",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    for f in [
        "trace.jsonl",
        "certificates.jsonl",
        "report.txt",
        "plot.csv",
    ] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let stdout = String::from_utf8(res.stdout).unwrap();
    assert!(stdout.contains("PASS"));
    assert_eq!(read(&out.join("trace.jsonl")).lines().count(), 32);
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let cases: [&[&str]; 5] = [
        &[
            "run",
            "adaboost",
            "--schedule",
            "optimal",
            "--data",
            "synthetic:separable:seed=1",
        ],
        &[
            "run",
            "fs",
            "--schedule",
            "constant",
            "--data",
            "synthetic:regression:seed=1",
        ],
        &[
            "run",
            "adaboost",
            "--iters",
            "0",
            "--data",
            "synthetic:separable:seed=1",
        ],
        &["run", "adaboost", "--data", "synthetic:regression:seed=1"],
        &["run", "adaboost"],
    ];
    for args in cases {
        let mut args = args.to_vec();
        args.extend(["--out", s(&out)]);
        assert_eq!(code(&run(&args)), 2, "{args:?}");
        assert!(!out.exists(), "{args:?} created the output directory");
    }
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn io_and_data_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let missing = tmp.path().join("missing.csv");
    let res = run(&["run", "adaboost", "--data", s(&missing), "--out", s(&out)]);
    assert_eq!(code(&res), 3);

    let bad = tmp.path().join("bad.csv");
    std::fs::write(&bad, "x,label\n0.1,1\n0.2,3\n").unwrap();
    assert_eq!(
        code(&run(&[
            "run",
            "adaboost",
            "--data",
            s(&bad),
            "--out",
            s(&out)
        ])),
        4
    );

    let garbage = tmp.path().join("trace.jsonl");
    std::fs::write(&garbage, "{\"kind\":\"final\"}\n").unwrap();
    assert_eq!(code(&run(&["check", s(&garbage)])), 4);
}

#[test]
fn tampered_trace_fails_check() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let res = run(&[
        "run",
        "fs",
        "--epsilon",
        "0.0625",
        "--iters",
        "50",
        "--data",
        "synthetic:regression:seed=2",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&res), 0);
    let trace = out.join("trace.jsonl");
    assert_eq!(code(&run(&["check", s(&trace)])), 0);

    // A truncated line is a data error; a well-formed edit that breaks a
    // certificate is a certificate error.
    let text = read(&trace);
    std::fs::write(&trace, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&run(&["check", s(&trace)])), 4);

    let mut lines: Vec<serde_json::Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    lines[11]["primal"] = serde_json::json!(1e9);
    let rewritten: String = lines.iter().map(|v| format!("{v}\n")).collect();
    std::fs::write(&trace, rewritten).unwrap();
    assert_eq!(code(&run(&["check", s(&trace)])), 5);
}

#[test]
fn generated_csv_reproduces_synthetic_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        (
            "nonseparable",
            "adaboost",
            vec!["--schedule", "line-search"],
        ),
        ("regression", "fs", vec!["--epsilon", "0.01"]),
        ("game", "minmax-game", vec!["--schedule", "dynamic"]),
    ];
    for (kind, task, extra) in cases {
        let csv = tmp.path().join(format!("{kind}.csv"));
        assert_eq!(
            code(&run(&["gen", kind, "--seed", "11", "--out", s(&csv)])),
            0
        );
        let via_stdout = run(&["gen", kind, "--seed", "11"]);
        assert_eq!(via_stdout.stdout, std::fs::read(&csv).unwrap());

        let a = tmp.path().join(format!("{kind}-synthetic"));
        let b = tmp.path().join(format!("{kind}-csv"));
        let synthetic = format!("synthetic:{kind}:seed=11");
        for (data, dir) in [(synthetic.as_str(), &a), (s(&csv), &b)] {
            let mut args = vec![
                "run",
                task,
                "--iters",
                "80",
                "--data",
                data,
                "--out",
                s(dir),
            ];
            args.extend(&extra);
            let res = run(&args);
            assert_eq!(
                code(&res),
                0,
                "{kind}: {}",
                String::from_utf8_lossy(&res.stderr)
            );
        }
        assert_eq!(
            read(&a.join("certificates.jsonl")),
            read(&b.join("certificates.jsonl")),
            "{kind}"
        );
        assert_eq!(
            read(&a.join("plot.csv")),
            read(&b.join("plot.csv")),
            "{kind}"
        );
        let body = |d: &Path| {
            read(&d.join("trace.jsonl"))
                .lines()
                .skip(1)
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_eq!(body(&a), body(&b), "{kind}");
    }
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("exp.toml");
    let from_file = tmp.path().join("from-file");
    std::fs::write(
        &cfg,
        format!(
            "task = \"adaboost\"\ndata = \"synthetic:separable:seed=3\"\niterations = 20\nout_dir = \"{}\"\n",
            s(&from_file)
        ),
    )
    .unwrap();
    assert_eq!(code(&run(&["run", "--config", s(&cfg)])), 0);
    assert_eq!(read(&from_file.join("trace.jsonl")).lines().count(), 22);

    let flagged = tmp.path().join("flagged");
    let res = run(&[
        "run",
        "--config",
        s(&cfg),
        "--iters",
        "7",
        "--schedule",
        "dynamic",
        "--out",
        s(&flagged),
    ]);
    assert_eq!(code(&res), 0);
    let header = read(&flagged.join("trace.jsonl"))
        .lines()
        .next()
        .unwrap()
        .to_string();
    assert!(header.contains("\"schedule\":\"dynamic\""), "{header}");
    assert_eq!(read(&flagged.join("trace.jsonl")).lines().count(), 9);

    std::fs::write(&cfg, "task = \"adaboost\"\nbogus = 1\n").unwrap();
    assert_eq!(code(&run(&["run", "--config", s(&cfg)])), 2);
}

#[test]
fn env_var_sets_default_out_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("env-out");
    let res = mirrorboost(&[
        "run",
        "minmax-game",
        "--iters",
        "10",
        "--data",
        "synthetic:game:seed=2",
    ])
    .env("MIRRORBOOST_OUT_DIR", &dir)
    .current_dir(tmp.path())
    .output()
    .unwrap();
    assert_eq!(code(&res), 0);
    assert!(dir.join("trace.jsonl").is_file());
    assert!(!tmp.path().join("mirrorboost-out").exists());

    let res = mirrorboost(&[
        "run",
        "minmax-game",
        "--iters",
        "10",
        "--data",
        "synthetic:game:seed=2",
    ])
    .current_dir(tmp.path())
    .output()
    .unwrap();
    assert_eq!(code(&res), 0);
    assert_eq!(
        read(&tmp.path().join("mirrorboost-out/trace.jsonl")),
        read(&dir.join("trace.jsonl"))
    );
}

fn arb_source() -> impl Strategy<Value = DataSource> {
    let synthetic = (
        0usize..4,
        any::<u64>(),
        proptest::option::of(3usize..200),
        proptest::option::of(1usize..50),
    )
        .prop_map(|(k, seed, rows, cols)| {
            let kind = ["separable", "nonseparable", "regression", "game"][k];
            let (rk, ck) = match kind {
                "regression" => ("n", "p"),
                "game" => ("m", "n"),
                _ => ("m", "d"),
            };
            let mut text = format!("synthetic:{kind}:seed={seed}");
            if let Some(r) = rows {
                text += &format!(",{rk}={r}");
            }
            if let Some(c) = cols {
                text += &format!(",{ck}={c}");
            }
            text.parse::<DataSource>().unwrap()
        });
    prop_oneof![
        synthetic,
        "[a-z]{1,8}/[a-z]{1,8}\\.csv".prop_map(|p| p.parse::<DataSource>().unwrap())
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn data_source_round_trips(src in arb_source()) {
        let again: DataSource = src.to_string().parse().unwrap();
        prop_assert_eq!(&again, &src);
    }

    #[test]
    fn config_round_trips_through_toml(src in arb_source(), iters in 1usize..10_000, center: bool, record: bool) {
        let mut cfg = ExperimentConfig::new(mirrorboost_harness::config::Task::Fs, src, iters);
        cfg.center = center;
        cfg.record_iterates = record;
        cfg.epsilon = Some(0.25);
        let again = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        prop_assert_eq!(again, cfg);
    }
}
