use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_retrieval"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code_of(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).expect("valid json")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn compute_g_star() {
    let g = data("g_star.txt");
    let v = json(&["compute", "--code", path_str(&g), "--s1", "1", "--json"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["e1"], "403/105");
    assert_eq!(v["e2"], "584/105");
    assert_eq!(v["method"], "exhaustive");
    let f2: Vec<&str> = v["alpha"]["f2"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert_eq!(f2, ["0", "0", "0", "8", "50", "53", "28", "8", "1"]);
}

#[test]
fn compute_counterexample_flag() {
    let c = data("counterexample.txt");
    let text = ok(&["compute", "--code", path_str(&c), "--s1", "1"]);
    assert!(text.contains("E1 = 23/12"));
    assert!(text.contains("E2 = 23/12"));
    assert!(
        text.contains("24/23 exceeds 1 (excluded regime k=2)"),
        "{text}"
    );
}

#[test]
fn compute_identity_closed() {
    let p = data("identity_4.txt");
    let v = json(&[
        "compute",
        "--code",
        path_str(&p),
        "--s1",
        "2",
        "--method",
        "closed",
        "--json",
    ]);
    assert_eq!(v["e1"], "6");
    assert_eq!(v["e2"], "6");
    assert_eq!(v["method"], "closed");
}

#[test]
fn compute_csv_has_point_rows() {
    let p = data("dedicated_2_6.txt");
    let text = ok(&["compute", "--code", path_str(&p), "--s1", "1", "--csv"]);
    assert!(text.contains("point,e1,4\n"));
    assert!(text.contains("point,e2,74/15\n"));
}

#[test]
fn closed_requires_tag() {
    let c = data("counterexample.txt");
    assert_eq!(
        code_of(&[
            "compute",
            "--code",
            path_str(&c),
            "--s1",
            "1",
            "--method",
            "closed"
        ]),
        2
    );
}

#[test]
fn exhaustive_and_closed_agree_on_constructions() {
    let dir = tempfile::tempdir().unwrap();
    let mut cases: Vec<(Vec<String>, usize)> = Vec::new();
    for k in 2..=5usize {
        for s1 in 1..k {
            cases.push((vec!["identity".into(), "--k".into(), k.to_string()], s1));
            for n in [k, k + 2, 12] {
                cases.push((
                    vec![
                        "global".into(),
                        "--n".into(),
                        n.to_string(),
                        "--k".into(),
                        k.to_string(),
                    ],
                    s1,
                ));
            }
            let s2 = k - s1;
            for n in [k + 1, 9, 12] {
                for n1 in s1..=n - s2 {
                    cases.push((
                        vec![
                            "dedicated".into(),
                            "--n".into(),
                            n.to_string(),
                            "--n1".into(),
                            n1.to_string(),
                            "--k".into(),
                            k.to_string(),
                        ],
                        s1,
                    ));
                }
            }
        }
    }
    for (i, (fam, s1)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("c{i}.txt"));
        let s1 = s1.to_string();
        let mut args: Vec<&str> = vec!["construct", "--family"];
        args.extend(fam.iter().map(String::as_str));
        args.extend(["--s1", &s1, "--out", path_str(&path)]);
        ok(&args);
        let get = |method: &str| {
            json(&[
                "compute",
                "--code",
                path_str(&path),
                "--s1",
                &s1,
                "--method",
                method,
                "--json",
            ])
        };
        let (e, c) = (get("exhaustive"), get("closed"));
        assert_eq!(e["method"], "exhaustive");
        assert_eq!(c["method"], "closed");
        for key in ["e1", "e2"] {
            assert_eq!(e[key], c[key], "{fam:?} s1={s1} {key}");
        }
        assert_eq!(e["alpha"], c["alpha"], "{fam:?} s1={s1}");
    }
}

#[test]
fn frontier_tables() {
    let ded = ok(&[
        "frontier",
        "--family",
        "dedicated",
        "--n",
        "8",
        "--k",
        "4",
        "--s1",
        "1",
    ]);
    let rows: Vec<&str> = ded
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect();
    assert_eq!(rows.len(), 5);
    let pairs: Vec<(&str, &str)> = rows
        .iter()
        .map(|r| {
            let f: Vec<&str> = r.split(',').collect();
            (f[1], f[2])
        })
        .collect();
    assert_eq!(
        pairs,
        [
            ("8", "428/105"),
            ("4", "74/15"),
            ("8/3", "94/15"),
            ("2", "26/3"),
            ("8/5", "44/3")
        ]
    );

    let glob = ok(&[
        "frontier", "--family", "global", "--n", "8", "--k", "4", "--s1", "1",
    ]);
    assert!(glob.contains("global n=8 k=4,4,106/21,"));

    let id = ok(&["frontier", "--family", "identity", "--k", "4", "--s1", "1"]);
    assert!(id.contains("identity k=4,4,22/3,"));

    assert_eq!(
        code_of(&["frontier", "--family", "global", "--k", "4", "--s1", "1"]),
        2
    );
    assert_eq!(
        code_of(&[
            "frontier",
            "--family",
            "dedicated",
            "--n",
            "8",
            "--k",
            "4",
            "--s1",
            "4"
        ]),
        2
    );
}

fn dedicated_rows(csv: &str) -> usize {
    csv.lines()
        .filter(|l| l.starts_with("dedicated_point,"))
        .count()
}

#[test]
fn region_panels() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("panel.csv");
    ok(&[
        "region",
        "--n",
        "20",
        "--k",
        "8",
        "--s1",
        "4",
        "--grid",
        "40",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(dedicated_rows(&std::fs::read_to_string(&out).unwrap()), 13);
    let text = ok(&[
        "region", "--n", "50", "--k", "8", "--s1", "1", "--grid", "40", "--out", "-",
    ]);
    assert_eq!(dedicated_rows(&text), 43);
    assert!(text.starts_with("# region n=50 k=8 s1=1 s2=7\n"));
}

#[test]
fn region_errors() {
    assert_eq!(
        code_of(&["region", "--n", "20", "--k", "8", "--s1", "4", "--grid", "1", "--out", "-"]),
        2
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("x.csv");
    assert_eq!(
        code_of(&[
            "region",
            "--n",
            "20",
            "--k",
            "8",
            "--s1",
            "4",
            "--grid",
            "4",
            "--out",
            path_str(&bad)
        ]),
        4
    );
}

#[test]
fn simulate_is_deterministic() {
    let g = data("g_star.txt");
    let args = [
        "simulate",
        "--code",
        path_str(&g),
        "--s1",
        "1",
        "--trials",
        "10",
        "--seed",
        "1",
    ];
    let a = ok(&args);
    let b = bin().args(args).arg("--threads").arg("1").output().unwrap();
    assert!(b.status.success());
    assert_eq!(a.as_bytes(), &b.stdout[..]);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["trials"], 10);
}

#[test]
fn simulate_dedicated_2_6_mean() {
    let p = data("dedicated_2_6.txt");
    let v = json(&[
        "simulate",
        "--code",
        path_str(&p),
        "--s1",
        "1",
        "--trials",
        "100000",
        "--seed",
        "7",
    ]);
    let mean: f64 = v["means"]["t1"].as_str().unwrap().parse().unwrap();
    let se: f64 = v["stderr"]["t1"].as_str().unwrap().parse().unwrap();
    assert!((mean - 4.0).abs() <= 4.0 * se, "mean {mean} se {se}");
}

#[test]
fn simulate_zero_trials_is_input_error() {
    let g = data("g_star.txt");
    assert_eq!(
        code_of(&[
            "simulate",
            "--code",
            path_str(&g),
            "--s1",
            "1",
            "--trials",
            "0"
        ]),
        2
    );
}

#[test]
fn verify_reports() {
    let v = json(&[
        "verify",
        "--n",
        "8",
        "--k",
        "4",
        "--s1",
        "1",
        "--q",
        "2",
        "--samples",
        "1000",
        "--seed",
        "3",
    ]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
    assert_eq!(v["excluded_regime"], false);

    let v = json(&[
        "verify",
        "--n",
        "5",
        "--k",
        "2",
        "--s1",
        "1",
        "--q",
        "2",
        "--samples",
        "20",
    ]);
    assert_eq!(v["excluded_regime"], true);

    let v = json(&[
        "verify",
        "--n",
        "8",
        "--k",
        "4",
        "--s1",
        "1",
        "--samples",
        "0",
    ]);
    assert_eq!(v["samples"], 0);
    assert!(v["max_sum"].is_null());
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);

    let c = data("counterexample.txt");
    let v = json(&[
        "verify",
        "--n",
        "5",
        "--k",
        "2",
        "--s1",
        "1",
        "--samples",
        "0",
        "--inject",
        path_str(&c),
    ]);
    assert_eq!(v["max_sum"], "24/23");
    assert_eq!(v["violations"][0]["sum"], "24/23");
}

#[test]
fn verify_independent_of_threads() {
    let args = [
        "verify",
        "--n",
        "6",
        "--k",
        "3",
        "--s1",
        "1",
        "--q",
        "3",
        "--samples",
        "50",
        "--seed",
        "9",
    ];
    let a = bin().args(args).args(["--threads", "1"]).output().unwrap();
    let b = bin()
        .args(args)
        .env("RETRIEVAL_THREADS", "3")
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn resource_and_input_exit_codes() {
    assert_eq!(
        code_of(&[
            "verify",
            "--n",
            "30",
            "--k",
            "4",
            "--s1",
            "1",
            "--samples",
            "1"
        ]),
        3
    );
    assert_eq!(
        code_of(&["verify", "--n", "8", "--k", "4", "--s1", "1", "--q", "4"]),
        2
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "2 2 3\n1 0 1\n0 1\n").unwrap();
    assert_eq!(
        code_of(&["compute", "--code", path_str(&bad), "--s1", "1"]),
        2
    );
    let missing = dir.path().join("none.txt");
    assert_eq!(
        code_of(&["compute", "--code", path_str(&missing), "--s1", "1"]),
        2
    );

    let big = dir.path().join("big.txt");
    let row1: Vec<&str> = (0..30)
        .map(|j| if j % 2 == 0 { "1" } else { "0" })
        .collect();
    let row2: Vec<&str> = (0..30)
        .map(|j| if j % 2 == 0 { "0" } else { "1" })
        .collect();
    std::fs::write(
        &big,
        format!("2 2 30\n{}\n{}\n", row1.join(" "), row2.join(" ")),
    )
    .unwrap();
    assert_eq!(
        code_of(&[
            "compute",
            "--code",
            path_str(&big),
            "--s1",
            "1",
            "--method",
            "exhaustive"
        ]),
        3
    );
}

#[test]
fn compare_and_trace() {
    let v = json(&["compare", "--n", "8", "--k", "4", "--s1", "1"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["verdict"], true);
    let v = json(&["compare", "--n", "9", "--k", "4", "--s1", "1"]);
    assert!(v["verdict"].is_null());
    assert_eq!(v["allocations"].as_array().unwrap().len(), 2);
    assert_eq!(
        code_of(&["compare", "--n", "3", "--k", "4", "--s1", "1"]),
        2
    );

    let t = ok(&[
        "trace", "--k", "4", "--s1", "1", "--e1", "4", "--e2", "4", "--n", "8,64",
    ]);
    assert!(t.contains("\n8,2,6,4,74/15,"));
    assert_eq!(
        code_of(&["trace", "--k", "4", "--s1", "1", "--e1", "4", "--e2", "5", "--n", "8"]),
        2
    );
}

#[test]
fn construct_round_trip() {
    let text = ok(&[
        "construct",
        "--family",
        "hybrid",
        "--k",
        "4",
        "--s1",
        "1",
        "--out",
        "-",
    ]);
    let file = std::fs::read_to_string(data("g_star.txt")).unwrap();
    assert_eq!(text, file);
}
