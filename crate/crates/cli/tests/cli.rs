use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_branetile"));
    c.env_remove("BRANETILE_PATCH_CAP");
    c
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn data(name: &str) -> String {
    format!(
        "{}/../core/tests/data/{name}.tiling",
        env!("CARGO_MANIFEST_DIR")
    )
}

const GOLDEN: &[(&str, &[&str])] = &[
    ("validate_c3", &["validate", "c3"]),
    ("faces_conifold", &["faces", "conifold"]),
    ("quiver_c3", &["quiver", "c3"]),
    ("matchings_cube", &["matchings", "cube"]),
    ("grade_conifold", &["grade", "conifold"]),
    ("consistency_c3", &["consistency", "c3"]),
    ("mr2_conifold", &["mr2", "conifold"]),
    ("cy3_cube", &["cy3", "cube", "--json"]),
    ("modules_c3", &["modules", "c3", "--dim", "3"]),
    ("dimers_conifold", &["dimers", "conifold", "--dim", "2"]),
    ("tw_c3", &["tw", "c3", "--json"]),
    ("dt_c3", &["dt", "c3", "--max-dim", "4", "--json"]),
    ("dt_conifold", &["dt", "conifold", "--max-dim", "3"]),
];

#[test]
fn golden_reports() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let bless = std::env::var_os("BLESS").is_some();
    for (name, args) in GOLDEN {
        let (_, out, _) = run(args);
        let path = dir.join(format!("{name}.txt"));
        if bless {
            std::fs::create_dir_all(&dir).unwrap();
            std::fs::write(&path, &out).unwrap();
        } else {
            let want = std::fs::read_to_string(&path)
                .unwrap_or_else(|_| panic!("missing golden file {name}"));
            assert_eq!(out, want, "{name}");
        }
    }
}

#[test]
fn validate_readback() {
    let (code, out, _) = run(&["validate", "c3"]);
    assert_eq!(code, 0);
    assert!(out.contains("genus 1, 1 face, 3 edges"));
}

#[test]
fn dt_json_series() {
    let (code, out, _) = run(&["dt", "c3", "--max-dim", "4", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["data"]["series"], serde_json::json!([1, -1, 3, -6, 13]));
}

#[test]
fn every_json_report_has_the_envelope() {
    for args in [
        &["validate", "cube"][..],
        &["faces", "c3"],
        &["quiver", "conifold"],
        &["matchings", "c3"],
        &["grade", "c3"],
        &["consistency", "conifold", "--weight-bound", "4"],
        &["mr2", "c3", "--weight-bound", "4"],
        &["cy3", "c3", "--weight-bound", "4"],
        &["modules", "conifold", "--dim", "2"],
        &["dimers", "c3", "--dim", "2"],
        &["tw", "cube"],
        &["dt", "conifold", "--max-dim", "2"],
    ] {
        let mut a = args.to_vec();
        a.push("--json");
        let (_, out, _) = run(&a);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        for key in ["schema_version", "verdict", "parameters", "data"] {
            assert!(v.get(key).is_some(), "{args:?} lacks {key}");
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["cy3", "cube"]).0, 2);
    assert_eq!(run(&["consistency", &data("conifold_twisted")]).0, 2);
    assert_eq!(run(&["grade", &data("c3_pendant")]).0, 2);
    assert_eq!(run(&["matchings", &data("c3_pendant")]).0, 2);
    assert_eq!(run(&["validate", "no-such-tiling"]).0, 1);
    assert_eq!(run(&["dt", "cube"]).0, 1);
    assert_eq!(run(&["consistency", "c3", "--weight-bound", "0"]).0, 1);
    assert_eq!(run(&["modules", "c3", "--face", "4"]).0, 1);
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["modules", "c3", "--dim", "3", "--radius", "2"]).0, 3);
    assert_eq!(run(&["consistency", "c3", "--patch-cap", "5"]).0, 3);
    let out = bin()
        .args(["consistency", "c3"])
        .env("BRANETILE_PATCH_CAP", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reports_echo_budgets() {
    let (_, out, _) = run(&[
        "consistency",
        "c3",
        "--weight-bound",
        "5",
        "--radius",
        "6",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["parameters"]["weight_bound"], 5);
    assert_eq!(v["parameters"]["radius"], 6);
    assert_eq!(v["parameters"]["patch_cap"], 100_000);
}

#[test]
fn thread_count_does_not_change_output() {
    let one = run(&["cy3", "conifold", "--threads", "1"]).1;
    let four = run(&["cy3", "conifold", "--threads", "4"]).1;
    assert_eq!(one, four);
}

#[test]
fn files_and_bundled_names_agree() {
    let path = format!(
        "{}/../core/tilings/conifold.tiling",
        env!("CARGO_MANIFEST_DIR")
    );
    assert_eq!(run(&["quiver", &path]).1, run(&["quiver", "conifold"]).1);
}
