use std::process::{Command, Output};

use padic_potts::report::{ClassifyJson, PadicJson, ScanJson, VerifyJson};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic-potts"))
        .args(args)
        .env_remove("PADIC_POTTS_PRECISION")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn json<T: serde::de::DeserializeOwned>(args: &[&str]) -> (T, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = run(&all);
    let parsed = serde_json::from_str(&stdout(&o)).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&o.stderr));
    });
    (parsed, o.status.code().unwrap())
}

#[test]
fn classify_examples() {
    for (p, q, theta, n) in [
        ("5", "5", "11", 31),
        ("5", "5", "6", 16),
        ("2", "3", "5", 1),
    ] {
        let (r, code): (ClassifyJson, _) = json(&["classify", "-p", p, "-q", q, "--theta", theta]);
        assert_eq!(code, 0);
        assert_eq!(r.n_ti, n, "p = {p}, q = {q}, theta = {theta}");
    }
    let o = run(&["classify", "-p", "5", "-q", "5", "--theta", "11"]);
    assert!(stdout(&o).contains("N_TI = 31"));
}

#[test]
fn classify_json_round_trips_and_matches_table() {
    let args = [
        "classify",
        "-p",
        "5",
        "-q",
        "5",
        "--theta",
        "6",
        "--precision",
        "12",
    ];
    let (r, _): (ClassifyJson, _) = json(&args);
    let again: ClassifyJson = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(r, again);
    assert_eq!(stdout(&run(&args)), r.to_table());
    let roots = r.per_m[0].roots.as_ref().unwrap();
    assert_eq!(roots.len(), 1);
    assert!(roots[0].starts_with("5^0 * (1 + 3*5 + 0*5^2"));
    assert!(roots[0].ends_with("+ O(5^12)"));
}

#[test]
fn classify_exit_codes() {
    let domain = run(&["classify", "-p", "5", "-q", "5", "--theta", "2"]);
    assert_eq!(domain.status.code(), Some(2));
    let allowed = run(&[
        "classify",
        "-p",
        "5",
        "-q",
        "5",
        "--theta",
        "2",
        "--allow-out-of-domain",
    ]);
    assert_ne!(allowed.status.code(), Some(2));
    let order = run(&["classify", "-p", "4", "-q", "5", "--theta", "5"]);
    assert_eq!(order.status.code(), Some(2));
    let low = run(&[
        "classify",
        "-p",
        "5",
        "-q",
        "5",
        "--theta",
        "6",
        "--precision",
        "7",
    ]);
    assert_eq!(low.status.code(), Some(2));
}

#[test]
fn coupling_input() {
    let (r, code): (ClassifyJson, _) = json(&[
        "classify",
        "-p",
        "5",
        "-q",
        "5",
        "--coupling",
        "5",
        "--precision",
        "16",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r.params.coupling.as_deref(), Some("5"));
    // exp_5(5) - 1 has valuation 1 and is neither q nor -q to 16 digits.
    assert_eq!(r.n_ti, 31);
}

#[test]
fn precision_flag_wins_over_env() {
    let o = Command::new(env!("CARGO_BIN_EXE_padic-potts"))
        .args(["padic", "expand", "-p", "5", "1/3", "--precision", "4"])
        .env("PADIC_POTTS_PRECISION", "9")
        .output()
        .unwrap();
    assert!(stdout(&o).trim().ends_with("O(5^4)"));
    let o = Command::new(env!("CARGO_BIN_EXE_padic-potts"))
        .args(["padic", "expand", "-p", "5", "1/3"])
        .env("PADIC_POTTS_PRECISION", "9")
        .output()
        .unwrap();
    assert!(stdout(&o).trim().ends_with("O(5^9)"));
}

#[test]
fn verify_examples() {
    let ok = run(&[
        "verify", "-p", "3", "-q", "3", "-k", "3", "--theta", "-2", "--z", "64,-125",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let (r, code): (VerifyJson, _) = json(&[
        "verify",
        "-p",
        "3",
        "-q",
        "6",
        "-k",
        "3",
        "--theta",
        "-37/20",
        "--z",
        "64,-125,1,1,1",
    ]);
    assert_eq!(code, 0);
    assert!(r.is_fixed && r.all_in_ep);
    assert_eq!(r.components[0].norm_minus_one, "3^-2");
    let (r, code): (VerifyJson, _) = json(&[
        "verify", "-p", "3", "-q", "3", "-k", "2", "--theta", "4", "--z", "4,4",
    ]);
    assert_eq!(code, 1);
    assert!(!r.is_fixed);
    assert_eq!(r.components[0].rhs, "49/16");
}

#[test]
fn verify_pole_and_length() {
    // theta = 1 - q makes the denominator of f_1 vanish at z = 1.
    let pole = run(&[
        "verify", "-p", "3", "-q", "3", "-k", "2", "--theta", "-2", "--z", "1,1",
    ]);
    assert_eq!(pole.status.code(), Some(5));
    let short = run(&["verify", "-p", "3", "-q", "3", "--theta", "4", "--z", "4"]);
    assert_eq!(short.status.code(), Some(2));
}

#[test]
fn scan_examples() {
    let (r, code): (ScanJson, _) =
        json(&["scan", "-p", "5", "-q", "5", "--theta-list", "6,11,16,-4"]);
    assert_eq!(code, 0);
    let n: Vec<_> = r.points.iter().map(|l| l.n_ti.unwrap()).collect();
    assert_eq!(n, vec![16, 31, 31, 16]);
    let empty = run(&["scan", "-p", "5", "-q", "5", "--theta-list", ""]);
    assert_eq!(empty.status.code(), Some(0));
    assert!(stdout(&empty).is_empty());
    let bad = run(&["scan", "-p", "5", "-q", "5", "--theta-list", "6,2"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("error"));
}

#[test]
fn scan_order_independent_of_threads() {
    let base = [
        "scan",
        "-p",
        "3",
        "-q",
        "6",
        "--valuations",
        "1,2,3",
        "--units",
        "6",
        "--crosscheck",
        "--format",
        "json",
    ];
    let outputs: Vec<String> = ["1", "4"]
        .iter()
        .map(|t| {
            let mut a = base.to_vec();
            a.extend(["--threads", t]);
            let o = run(&a);
            assert_eq!(o.status.code(), Some(0));
            stdout(&o)
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn crosscheck_singleton() {
    let o = run(&[
        "crosscheck",
        "-p",
        "5",
        "-q",
        "5",
        "--theta",
        "6",
        "-m",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 mismatches"));
}

#[test]
fn padic_examples() {
    let out = |args: &[&str]| stdout(&run(args)).trim().to_string();
    assert_eq!(out(&["padic", "norm", "-p", "3", "63"]), "3^-2");
    assert_eq!(
        out(&["padic", "exp", "-p", "5", "5", "--precision", "3"]),
        "81 + O(5^3)"
    );
    assert_eq!(
        out(&[
            "padic",
            "sqrt",
            "-p",
            "5",
            "81",
            "--precision",
            "3",
            "--digits"
        ]),
        "5^0 * (1 + 3*5 + 4*5^2) + O(5^3)"
    );
    let (r, code): (PadicJson, _) = json(&["padic", "sqrt", "-p", "2", "17", "--precision", "10"]);
    assert_eq!(code, 0);
    let residue: u64 = r.result.split(' ').next().unwrap().parse().unwrap();
    assert_eq!(residue % 4, 1);
    assert_eq!(residue * residue % 512, 17);
    let no_root = run(&["padic", "sqrt", "-p", "5", "2"]);
    assert_eq!(no_root.status.code(), Some(2));
    let outside = run(&["padic", "exp", "-p", "5", "1"]);
    assert_eq!(outside.status.code(), Some(2));
}

#[test]
fn out_file_holds_json() {
    let dir = std::env::temp_dir().join(format!("padic-potts-out-{}", std::process::id()));
    let o = run(&[
        "classify",
        "-p",
        "2",
        "-q",
        "4",
        "--theta",
        "29",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r: ClassifyJson = serde_json::from_str(&std::fs::read_to_string(&dir).unwrap()).unwrap();
    std::fs::remove_file(&dir).unwrap();
    assert_eq!(r.n_ti, 9);
    assert!(r.warnings.iter().any(|w| w.contains("768")));
}

#[test]
fn crosscheck_default_grid() {
    let o = run(&["crosscheck", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r: padic_potts::report::CrosscheckJson = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.checked >= 500);
    assert!(r.mismatches.is_empty());
}
