use std::process::{Command, Output};

use rational_legendrian::laurent::LaurentPoly;

fn rlink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rlink")).args(args).output().expect("spawn rlink")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gamma_prints_both_polynomials() {
    let o = rlink(&["gamma", "(2,2,2^1,1,2^1)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "Γ⁻ = λ^-1 + 1 + λ\nΓ⁺ = 1 + λ + λ^2\n");
    assert!(o.stderr.is_empty());
}

#[test]
fn json_and_text_agree() {
    let text = stdout(&rlink(&["gamma", "(2,2,4,1,2)"]));
    let json: serde_json::Value = serde_json::from_str(&stdout(&rlink(&["gamma", "(2,2,4,1,2)", "--json"]))).unwrap();
    assert_eq!(json["expr"], "(2,2,4,1,2)");
    let poly = |key: &str| serde_json::from_value::<LaurentPoly>(json[key].clone()).unwrap();
    let expected = format!("Γ⁻ = {}\nΓ⁺ = {}\n", poly("gamma_minus"), poly("gamma_plus"));
    assert_eq!(text, expected);
}

#[test]
fn oracle_agrees_and_writes_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pairs.csv");
    let o = rlink(&["oracle", "(2,2,4,1,2)", "--pairs", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), stdout(&rlink(&["gamma", "(2,2,4,1,2)"])));
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("q,value,graph_index,shifted_index,sign\n"));
    assert!(table.lines().count() > 1);
}

#[test]
fn rational_and_ordered() {
    assert_eq!(stdout(&rlink(&["rational", "(4,3,2)"])), "30/13\n");
    let o = stdout(&rlink(&["ordered", "(2)"]));
    assert!(o.starts_with("UNORDERED ("), "{o}");
    assert!(stdout(&rlink(&["ordered", "(2,2,2^1,1,2^1)"])).starts_with("UNKNOWN"));
}

#[test]
fn exit_codes() {
    let bad = rlink(&["gamma", "(2,,1)"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(bad.stdout.is_empty());
    assert!(!bad.stderr.is_empty());
    assert_eq!(rlink(&["nonsense"]).status.code(), Some(1));
    assert_eq!(rlink(&["oracle", "(2)", "--grid", "3"]).status.code(), Some(1));
    assert_eq!(rlink(&["rational", "(2)#(2)"]).status.code(), Some(1));
    assert_eq!(rlink(&["--help"]).status.code(), Some(0));
}

#[test]
fn census_files_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, csv: bool| {
        let path = dir.path().join(name);
        let mut args = vec!["census", "--max-weight", "6", "--flypes", "--swaps", "--out", path.to_str().unwrap()];
        if csv {
            args.push("--csv");
        }
        let o = rlink(&args);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(path).unwrap()
    };
    let a = run("a.json", false);
    assert_eq!(a, run("b.json", false));
    let records: serde_json::Value = serde_json::from_slice(&a).unwrap();
    let first = &records[0];
    for key in ["expr", "rational", "gamma_minus", "gamma_plus", "ordered", "class", "orbit"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
    let csv = String::from_utf8(run("c.csv", true)).unwrap();
    assert_eq!(csv.lines().count(), records.as_array().unwrap().len() + 1);
}

#[test]
fn open_pairs_at_weight_six() {
    let o = stdout(&rlink(&["open-pairs", "--max-weight", "6"]));
    assert!(o.lines().any(|l| l == "(2,1,2,1,0)\t(2,1,2^2,1,0)"), "{o}");
    assert_eq!(stdout(&rlink(&["open-pairs", "--max-weight", "5"])), "");
}

#[test]
fn render_writes_stable_svg() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    let f = dir.path().join("front.json");
    for p in [&a, &b] {
        let o = rlink(&["render", "(4,3,2)", "--svg", p.to_str().unwrap(), "--width", "640", "--front-json", f.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let svg = std::fs::read_to_string(&a).unwrap();
    assert_eq!(svg, std::fs::read_to_string(&b).unwrap());
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches(r#"class="cusp""#).count(), 6);
    let front: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    assert!(front["arcs"].is_array());
}
