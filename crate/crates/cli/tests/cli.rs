use std::fs;
use std::process::{Command, Output};

fn vgroup(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vgroup"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn word_problem() {
    let o = vgroup(&["wp", "grigorchuk", "b D C"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "trivial");
    let o = vgroup(&["wp", "grigorchuk", "a b"]);
    assert!(stdout(&o).starts_with("nontrivial"));
}

#[test]
fn abelianization() {
    let o = vgroup(&["abel", "grigorchuk"]);
    assert_eq!(stdout(&o).trim(), "trivial group");
    let o = vgroup(&["abel", "adding"]);
    assert_eq!(stdout(&o).trim(), "Z");
}

#[test]
fn nucleus_listing() {
    let o = vgroup(&["nucleus", "adding"]);
    let out = stdout(&o);
    assert!(out.starts_with("3 states"), "{out}");
    assert_eq!(out.lines().nth(1), Some("e"));
}

#[test]
fn budget_exit_code() {
    let o = vgroup(&["nucleus", "lamplighter"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not contracting"));
}

#[test]
fn domain_and_usage_errors() {
    assert_eq!(vgroup(&["wp", "grigorchuk", "q"]).status.code(), Some(1));
    assert_eq!(vgroup(&["nucleus", "/no/such/file"]).status.code(), Some(1));
    assert_eq!(vgroup(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(vgroup(&["--help"]).status.code(), Some(0));
}

#[test]
fn group_file_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.txt");
    let text = stdout(&vgroup(&["catalogue", "basilica"]));
    fs::write(&file, &text).unwrap();
    let path = file.to_str().unwrap();
    let first = stdout(&vgroup(&["nucleus", path]));
    assert!(first.starts_with("7 states"));
    let cache = dir.path().join("g.txt.nucleus.json");
    assert!(cache.exists());
    assert_eq!(stdout(&vgroup(&["nucleus", path])), first);

    // A stale cache is ignored after the file changes.
    fs::write(&file, stdout(&vgroup(&["catalogue", "adding"]))).unwrap();
    assert!(stdout(&vgroup(&["nucleus", path])).starts_with("3 states"));

    let other = dir.path().join("h.txt");
    fs::write(&other, &text).unwrap();
    vgroup(&["nucleus", "--no-cache", other.to_str().unwrap()]);
    assert!(!dir.path().join("h.txt.nucleus.json").exists());
}

#[test]
fn catalogue_round_trip() {
    let list = stdout(&vgroup(&["catalogue"]));
    for name in list.lines().filter(|l| !l.contains('<')) {
        let text = stdout(&vgroup(&["catalogue", name]));
        let def = vgroup::GroupDef::parse(&text).unwrap();
        assert_eq!(def.to_text(), text);
    }
}

#[test]
fn presentation_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.json");
    let o = vgroup(&[
        "present",
        "grigorchuk",
        "--verify",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report = stdout(&o);
    let (done, total) = report
        .trim()
        .split_once(' ')
        .unwrap()
        .0
        .split_once('/')
        .unwrap();
    assert_eq!(done, total);
    let bundle: vgroup::presentation::PresentationBundle =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(bundle.generators.len(), 4);
}

#[test]
fn table_commands() {
    let o = vgroup(&["vg", "apply", "adding", "a", "11"]);
    assert_eq!(stdout(&o).trim(), "00");
    let prod = stdout(&vgroup(&["vg", "mul", "adding", "a", "A"]));
    let o = vgroup(&["vg", "eq", "adding", prod.trim(), "e"]);
    assert_eq!(stdout(&o).trim(), "equal");
    let inv = stdout(&vgroup(&["vg", "inv", "adding", "a"]));
    let o = vgroup(&["vg", "eq", "adding", inv.trim(), "A"]);
    assert_eq!(stdout(&o).trim(), "equal");
    let canon = stdout(&vgroup(&["vg", "canon", "adding", "a a"]));
    assert!(canon.contains("domain"));
}

#[test]
fn limit_and_schreier() {
    let o = vgroup(&["limit", "adding", "--level", "4", "--format", "text"]);
    let out = stdout(&o);
    assert!(
        out.contains("16 tiles") && out.contains("cycle: yes"),
        "{out}"
    );
    let o = vgroup(&["limit", "grigorchuk", "--level", "3", "--format", "dot"]);
    assert!(stdout(&o).starts_with("graph level3"));
    let o = vgroup(&["schreier", "adding", "--level", "4", "--format", "text"]);
    assert_eq!(stdout(&o).trim(), "16 vertices, 1 components");
}

#[test]
fn m_invariant_and_rational() {
    assert_eq!(
        stdout(&vgroup(&["m-invariant", "3", "0", "10", "11"])).trim(),
        "1"
    );
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.json");
    fs::write(
        &file,
        r#"{"degree_parity":"odd","points":["c1","c2","inf"],"map":{"c1":"c2","c2":"c1","inf":"inf"},"cvmod2":["c1","c2"]}"#,
    )
    .unwrap();
    let out = stdout(&vgroup(&["abel-rational", file.to_str().unwrap()]));
    assert_eq!(out.lines().next(), Some("Z/2 ⊕ Z"));
}
