use std::process::{Command, Output};

fn statenet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_statenet"))
        .args(args)
        .env_remove("STATENET_OUT_DIR")
        .output()
        .expect("run statenet")
}

#[test]
fn build_writes_dot_to_stdout() {
    let out = statenet(&["build", "--mu", "121/2^5", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let net = statenet::export::parse_dot(&text).unwrap();
    assert_eq!(net.len(), 33);
}

#[test]
fn build_range_uses_placeholder_and_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_statenet"))
        .args([
            "build", "--mu", "484/2^7", "--n", "7..8", "--format", "graphml",
        ])
        .args(["--out", "net_{n}.graphml"])
        .env("STATENET_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for bits in [7, 8] {
        let net =
            statenet::export::read_graphml(dir.path().join(format!("net_{bits}.graphml"))).unwrap();
        assert_eq!(net.precision().bits(), bits);
        assert_eq!(net.mu().numerator(), 121);
    }
    let bad = statenet(&[
        "build",
        "--mu",
        "121/2^5",
        "--n",
        "5..6",
        "--out",
        "/tmp/x.dot",
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn degrees_csv() {
    let out = statenet(&["degrees", "--mu", "121/2^5", "--n", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut nodes = 0;
    let mut edges = 0;
    for line in text.lines().skip(1) {
        let (k, c) = line.split_once(',').unwrap();
        let (k, c): (u64, u64) = (k.parse().unwrap(), c.parse().unwrap());
        nodes += c;
        edges += k * c;
    }
    assert_eq!((nodes, edges), (257, 257));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["report", "--mu", "1/3", "--n", "5"][..],
        &["report", "--mu", "121/2^5", "--n", "4"],
        &[
            "report", "--mu", "121/2^5", "--n", "5", "--quant", "sideways",
        ],
        &["verify", "--mu", "121/2^5", "--n", "5", "--checks", "Q7"],
        &["frobnicate"],
    ] {
        assert_eq!(statenet(args).status.code(), Some(1), "{args:?}");
    }
    assert_eq!(statenet(&["--help"]).status.code(), Some(0));
}

#[test]
fn conjecture_assertions_set_exit_two() {
    let base = [
        "verify", "--mu", "121/2^5", "--n", "5..7", "--checks", "C1,C2",
    ];
    assert_eq!(statenet(&base).status.code(), Some(0));
    let mut strict = base.to_vec();
    strict.push("--assert-conjectures");
    assert_eq!(statenet(&strict).status.code(), Some(2));
    // C2 alone holds on this range
    let c2 = [
        "verify",
        "--mu",
        "121/2^5",
        "--n",
        "5..7",
        "--checks",
        "C2",
        "--assert-conjectures",
    ];
    assert_eq!(statenet(&c2).status.code(), Some(0));
}

#[test]
fn hard_failure_writes_partial_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = statenet(&[
        "verify",
        "--mu",
        "3/4",
        "--n",
        "32",
        "--checks",
        "C2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["completed"], false);
}

#[test]
fn report_single_precision() {
    let out = statenet(&["report", "--mu", "121/32", "--n", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["completed"], true);
    assert_eq!(doc["levels"].as_array().unwrap().len(), 1);
    assert_eq!(doc["mu"]["raw"], "121/32");
    assert_eq!(doc["levels"][0]["summary"]["component_count"], 4);
}
