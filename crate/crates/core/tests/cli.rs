use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qkset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qkset"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("qkset-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn scalar_commands() {
    let o = qkset(&["order", "--group", "Sp:2:3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "51840");

    assert_eq!(stdout(&qkset(&["ppd", "--q", "2", "--m", "6"])).trim(), "");
    assert_eq!(stdout(&qkset(&["ppd", "--q", "2", "--m", "20"])).trim(), "41");
    assert_eq!(stdout(&qkset(&["ppd", "--q", "2", "--m", "11"])).trim(), "23 89");
    assert_eq!(stdout(&qkset(&["bexact", "--n", "6", "--m", "3"])).trim(), "2/9");
    assert_eq!(stdout(&qkset(&["pnotm", "--n", "3", "--m", "2"])).trim(), "1/2");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(qkset(&[]).status.code(), Some(1));
    assert_eq!(qkset(&["scan", "--group", "SL:4:2"]).status.code(), Some(1));
    assert_eq!(qkset(&["order", "--group", "SO:odd:3:2"]).status.code(), Some(1));
    assert_eq!(qkset(&["order", "--group", "XX:3:2"]).status.code(), Some(1));
    assert_eq!(qkset(&["ppd", "--q", "6", "--m", "3"]).status.code(), Some(1));
    assert_eq!(
        qkset(&["scan", "--group", "SL:4:2", "--k", "9"]).status.code(),
        Some(1)
    );
}

#[test]
fn cap_exceeded_exits_three() {
    let o = qkset(&["enumerate", "--group", "SL:3:3", "--cap", "1000"]);
    assert_eq!(o.status.code(), Some(3));
    let o = qkset(&["scan", "--group", "SL:3:3", "--k", "2", "--exhaustive", "--cap", "1000"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn enumerate_counts() {
    let o = qkset(&["enumerate", "--group", "SL:3:2"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["count"], 168);
    assert_eq!(v["order"], "168");
    let o = qkset(&["enumerate", "--group", "SL:2:2", "--print"]);
    assert_eq!(stdout(&o).matches("2 2 1").count(), 6);
}

#[test]
fn bounds_json() {
    let o = qkset(&["bounds", "--group", "SL:8:2", "--k", "3", "--set", "ppd", "--short"]);
    assert!(o.status.success());
    let v = json(&o);
    let lo = v["lower"].as_f64().unwrap();
    let hi = v["upper"].as_f64().unwrap();
    assert!((lo - 2.0 / (27.0 * std::f64::consts::E)).abs() < 1e-12);
    assert!((hi - 5.0 / 9.0).abs() < 1e-12);
    assert_eq!(v["source"], "short");
}

#[test]
fn scan_exhaustive_and_csv() {
    let o = qkset(&["scan", "--group", "SL:2:3", "--k", "2", "--exhaustive"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["samples"], 24);
    assert_eq!(v["hits_qk"], 6);
    assert_eq!(v["kinds"][0]["exact"], "1/4");
    assert!(v.get("runtime_ms").is_none());

    let o = qkset(&[
        "scan", "--group", "SL:5:2", "--k", "3", "--set", "qk,ppd", "--samples", "500", "--format", "csv",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("group,k,kind,hits"));
    assert!(lines[1].starts_with("SL:5:2,3,qk,"));

    let o = qkset(&["scan", "--group", "SL:4:2", "--k", "2", "--samples", "300", "--timing"]);
    assert!(json(&o)["runtime_ms"].is_u64());
}

#[test]
fn scan_is_independent_of_worker_count() {
    let run = |w: &str| {
        qkset(&[
            "scan", "--group", "Sp:3:3", "--k", "3", "--samples", "1000", "--seed", "5", "--workers", w,
        ])
        .stdout
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn auto_k_scan() {
    let o = qkset(&["scan", "--group", "SL:12:2", "--auto-k", "--samples", "400", "--seed", "3"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["k"], "auto");
    let qk = v["kinds"].as_array().unwrap().iter().find(|k| k["kind"] == "qk").unwrap();
    assert_eq!(qk["bounds"][0]["source"], "corollary");
}

#[test]
fn classify_worked_example() {
    // companions of x^2+x+1, x^3+x+1, x^6+x+1
    let mut m = vec![vec![0u32; 11]; 11];
    let blocks: [(usize, &[u32]); 3] = [(0, &[1, 1]), (2, &[1, 1, 0]), (5, &[1, 1, 0, 0, 0, 0])];
    for (off, low) in blocks {
        let n = low.len();
        for i in 1..n {
            m[off + i][off + i - 1] = 1;
        }
        for (i, &c) in low.iter().enumerate() {
            m[off + i][off + n - 1] = c;
        }
    }
    let mut text = String::from("11 2 1\n");
    for row in &m {
        let r: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        text.push_str(&r.join(" "));
        text.push('\n');
    }
    let path = temp_file("sl11.txt", &text);
    let o = qkset(&["classify", "--group", "SL:11:2", "--in", path.to_str().unwrap(), "--k", "6"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["tier"], "qk");
    assert_eq!(v["B"], "21");
    assert_eq!(v["beta"], 0);
    assert_eq!(v["eigenspace_dim"], 5);
    assert_eq!(v["irreducible"], false);
    assert_eq!(v["ppd"], Value::Array(vec![]));

    let o = qkset(&[
        "classify", "--group", "SL:11:2", "--in", path.to_str().unwrap(), "--k", "6", "--format", "text",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("tier qk"));
    assert!(stdout(&o).contains("B 21  beta 0"));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn classify_rejects_non_members() {
    let path = temp_file("nonmember.txt", "2 3 1\n1 1\n0 2\n");
    let o = qkset(&["classify", "--group", "SL:2:3", "--in", path.to_str().unwrap(), "--k", "2"]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn structural_failures_exit_two() {
    let o = qkset(&["scan", "--group", "SU:7:2", "--k", "3", "--samples", "300", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("structural"));
    let v = json(&o);
    assert!(v["structural_failures"].as_u64().unwrap() > 0);
    let element = v["first_failure"]["element"].as_str().unwrap().to_string();

    let path = temp_file("su72.txt", &element);
    let o = qkset(&["classify", "--group", "SU:7:2", "--in", path.to_str().unwrap(), "--k", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["tier"], "qk");
    std::fs::remove_file(path).unwrap();
}
