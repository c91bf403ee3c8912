//! End-to-end tests of the `torcode` binary: golden outputs, schema
//! conformance, agreement with the library and exit codes.
//!
//! Run with `UPDATE_GOLDEN=1` to rewrite the files under `tests/golden`.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

use torcode::binforms::{associated_form, BinForm};
use torcode::coding::{self, CodingSpec};
use torcode::mat::UniMat;
use torcode_cli::render;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_in(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_torcode"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn run(args: &[&str]) -> Run {
    run_in(Path::new(env!("CARGO_MANIFEST_DIR")), args)
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let r = run(&a);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    serde_json::from_str(&r.stdout).unwrap()
}

/// Every documented example plus a few extra shapes.
const CASES: &[(&str, &[&str])] = &[
    ("analyze_fibonacci", &["analyze", "--matrix", "1,1,1,0"]),
    ("analyze_5_3_2_1", &["analyze", "--matrix", "5,3,2,1"]),
    ("analyze_80_9_9_1", &["analyze", "--matrix", "80,9,9,1"]),
    (
        "analyze_negative_trace",
        &["analyze", "--matrix", "-3,-5,-1,-2"],
    ),
    (
        "bac_exceptional",
        &["bac", "--matrix", "3,1,-1,0", "--kmin", "-1", "--kmax", "1"],
    ),
    (
        "bac_fibonacci",
        &["bac", "--matrix", "1,1,1,0", "--kmin", "-1", "--kmax", "1"],
    ),
    ("mac_27_11_5_2", &["mac", "--matrix", "27,11,5,2"]),
    (
        "encode_zero",
        &["encode", "--matrix", "1,1,1,0", "--word", "zero"],
    ),
    (
        "encode_unit",
        &[
            "encode", "--matrix", "1,1,1,0", "--param", "3,1", "--word", "1",
        ],
    ),
    (
        "decode_fifth",
        &[
            "decode", "--matrix", "1,1,1,0", "--param", "-1,-1", "--point", "1/5,2/5", "--window",
            "40",
        ],
    ),
    ("forms_reduce", &["forms", "reduce", "11,-25,-5"]),
    ("forms_cycle", &["forms", "cycle", "5,-1,-1"]),
    ("forms_equiv", &["forms", "equiv", "5,-1,-1", "-5,1,1"]),
    ("forms_min", &["forms", "min", "11,-25,-5", "--bound", "40"]),
    (
        "forms_represent",
        &["forms", "represent", "9,-79,-9", "9", "--bound", "40"],
    ),
];

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn check_golden(name: &str, actual: &str) {
    let path = golden_dir().join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(golden_dir()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(actual, want, "output differs from {}", path.display());
}

#[test]
fn outputs_match_golden_files() {
    for (name, args) in CASES {
        let text = run(args);
        assert_eq!(text.code, 0, "{name}: {}", text.stderr);
        check_golden(&format!("{name}.txt"), &text.stdout);
        let mut a = args.to_vec();
        a.extend(["--format", "json"]);
        let js = run(&a);
        assert_eq!(js.code, 0, "{name}: {}", js.stderr);
        check_golden(&format!("{name}.json"), &js.stdout);
    }
}

fn validator() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/torcode-1.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

#[test]
fn json_validates_against_schema() {
    let v = validator();
    for (name, args) in CASES {
        let doc = json(args);
        let errors: Vec<String> = v
            .iter_errors(&doc)
            .map(|e| format!("{} at {}", e, e.instance_path()))
            .collect();
        assert!(errors.is_empty(), "{name}: {errors:?}");
    }
    // the schema does reject malformed documents
    let mut doc = json(&["analyze", "--matrix", "1,1,1,0"]);
    doc["result"]["bac"] = Value::from("yes");
    assert!(!v.is_valid(&doc));
    doc = json(&["analyze", "--matrix", "1,1,1,0"]);
    doc["schema"] = Value::from("torcode/0");
    assert!(!v.is_valid(&doc));
}

#[test]
fn text_and_json_agree() {
    for (name, args) in CASES {
        let text = run(args).stdout;
        let doc = json(args);
        let result = doc["result"].as_object().unwrap();
        for (k, v) in result {
            let line = match render::inline(v) {
                Some(t) => format!("{k}: {t}\n"),
                None => format!("{k}:\n"),
            };
            assert!(text.contains(&line), "{name}: text lacks {line:?}");
        }
        for w in doc["warnings"].as_array().unwrap() {
            assert!(
                text.contains(&format!("warning: {}", w.as_str().unwrap())),
                "{name}"
            );
        }
    }
}

fn lib_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap()
}

#[test]
fn numbers_come_from_the_library() {
    let m = UniMat::from_i64(80, 9, 9, 1);
    let doc = json(&["analyze", "--matrix", "80,9,9,1"]);
    let r = &doc["result"];
    assert_eq!(r["form"], lib_json(&associated_form(&m).unwrap()));
    let (mn, members) = coding::enumerate_mac(&m).unwrap();
    assert_eq!(
        r["integral_minimum"],
        lib_json(&mn.to_string().parse::<i64>().unwrap())
    );
    assert_eq!(r["minimal_codings"], lib_json(&members));

    let m = UniMat::from_i64(3, 1, -1, 0);
    let doc = json(&["bac", "--matrix", "3,1,-1,0", "--kmin", "-1", "--kmax", "1"]);
    assert_eq!(
        doc["result"]["codings"],
        lib_json(&coding::enumerate_bac(&m, -1..=1).unwrap())
    );

    let fib = UniMat::from_i64(1, 1, 1, 0);
    let spec = CodingSpec::from_i64(&fib, 3, 1).unwrap();
    let doc = json(&[
        "encode", "--matrix", "1,1,1,0", "--param", "3,1", "--word", "1",
    ]);
    assert_eq!(doc["result"]["spec"], lib_json(&spec));
    let (x, y) = &spec.point.toral;
    assert_eq!(
        doc["result"]["point"],
        serde_json::json!({ "x": lib_json(x), "y": lib_json(y) })
    );

    let f: BinForm = "9,-79,-9".parse().unwrap();
    let doc = json(&["forms", "represent", "9,-79,-9", "9"]);
    let reps = torcode::binforms::represent(&f, &9.into()).unwrap();
    let want: Vec<Value> = reps
        .iter()
        .map(|(a, b)| {
            serde_json::json!([
                lib_json(&i64::try_from(a).unwrap()),
                lib_json(&i64::try_from(b).unwrap())
            ])
        })
        .collect();
    assert_eq!(doc["result"]["orbit_reps"], Value::from(want));
}

#[test]
fn documented_examples() {
    let r = json(&["analyze", "--matrix", "1,1,1,0"]);
    assert_eq!(r["result"]["bac"], true);
    assert_eq!(r["result"]["integral_minimum"], 1);
    let r = json(&["analyze", "--matrix", "5,3,2,1"]);
    assert_eq!(r["result"]["bac"], false);
    assert_eq!(r["result"]["integral_minimum"], 2);
    assert_eq!(r["result"]["D"], 40);
    let r = json(&["analyze", "--matrix", "80,9,9,1"]);
    assert_eq!(r["result"]["integral_minimum"], 9);
    assert_eq!(r["result"]["kernel_classes"], 2);

    let r = json(&["bac", "--matrix", "3,1,-1,0"]);
    assert_eq!(r["result"]["family"], "theta-powers");
    assert_eq!(r["result"]["exceptional"], true);
    let r = json(&["bac", "--matrix", "1,1,1,0"]);
    assert_eq!(r["result"]["family"], "lambda-powers");
    let r = json(&["mac", "--matrix", "27,11,5,2"]);
    assert_eq!(r["result"]["integral_minimum"], 5);

    let t = run(&["encode", "--matrix", "1,1,1,0", "--word", "zero"]);
    assert!(t.stdout.contains("point: (0, 0)\n"));
    let r = json(&[
        "decode", "--matrix", "1,1,1,0", "--param", "-1,-1", "--point", "1/5,2/5", "--window", "40",
    ]);
    assert_eq!(r["result"]["within_bound"], true);
    // a homoclinic target decodes exactly
    let r = json(&[
        "decode", "--matrix", "1,1,1,0", "--param", "-1,-1", "--point", "0,0", "--window", "40",
    ]);
    assert_eq!(r["result"]["exact"], true);

    let r = json(&["forms", "min", "11,-25,-5"]);
    assert_eq!(r["result"]["integral_minimum"], 5);
    let r = json(&["forms", "equiv", "5,-1,-1", "-5,1,1"]);
    assert!(r["result"]["equivalent"].is_null());
    let r = json(&["forms", "represent", "9,-79,-9", "9"]);
    assert!(r["result"]["orbit_reps"]
        .as_array()
        .unwrap()
        .contains(&serde_json::json!([9, 1])));

    let r = json(&["analyze", "--matrix", "-3,-5,-1,-2"]);
    assert_eq!(r["result"]["trace_negated"], true);
    assert!(r["warnings"][0]
        .as_str()
        .unwrap()
        .contains("negative trace"));
}

#[test]
fn exit_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["analyze", "--matrix", "1,2,3,4"], 1),
        (&["analyze", "--matrix", "1,0,0,1"], 1),
        (&["analyze", "--matrix", "2,1,1"], 1),
        (&["analyze"], 1),
        (&["encode", "--matrix", "1,1,1,0", "--word", "1 1"], 1),
        (&["encode", "--matrix", "1,1,1,0", "--word", "x"], 1),
        (
            &[
                "decode", "--matrix", "1,1,1,0", "--param", "3,1", "--point", "0,0",
            ],
            1,
        ),
        (&["decode", "--matrix", "5,3,2,1", "--point", "0,0"], 1),
        (&["decode", "--matrix", "1,1,1,0", "--point", "1/0,0"], 1),
        (
            &[
                "decode", "--matrix", "1,1,1,0", "--point", "0,0", "--window", "100000",
            ],
            2,
        ),
        (
            &[
                "bac", "--matrix", "1,1,1,0", "--kmin", "0", "--kmax", "5000",
            ],
            2,
        ),
        (&["forms", "min", "1,1,1"], 1),
        (&["forms", "min", "11,-25,-5", "--bound", "100000"], 2),
        (&["--help"], 0),
    ];
    for (args, code) in cases {
        let r = run(args);
        assert_eq!(r.code, *code, "{args:?}: {}", r.stderr);
        if *code != 0 {
            assert!(r.stdout.is_empty(), "{args:?} wrote to stdout on failure");
        }
    }
}

fn plot(dir: &Path, matrix: &str, param: &str) -> (Value, String) {
    let r = run_in(
        dir,
        &[
            "plot", "--matrix", matrix, "--param", param, "--svg", "out.svg", "--format", "json",
        ],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let doc: Value = serde_json::from_str(&r.stdout).unwrap();
    let svg = std::fs::read_to_string(dir.join("out.svg")).unwrap();
    (doc, svg)
}

#[test]
fn plots() {
    let dir = tempfile::tempdir().unwrap();
    let v = validator();

    // bijective Fibonacci coding: exact area 1
    let (doc, svg) = plot(dir.path(), "1,1,1,0", "-1,-1");
    assert!(v.is_valid(&doc));
    assert_eq!(doc["result"]["area"]["p"], 1);
    assert_eq!(doc["result"]["area"]["q"], 0);
    let tree = roxmltree::Document::parse(&svg).expect("well-formed SVG");
    let root = tree.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(root.attribute("version"), Some("1.1"));
    assert!(svg.contains("area=1;"));
    for id in ["unit-square", "domain", "pi"] {
        assert!(
            tree.descendants().any(|n| n.attribute("id") == Some(id)),
            "{id}"
        );
    }

    // 5-to-1 coding: five labeled kernel dots
    let (doc, svg) = plot(dir.path(), "1,1,1,0", "3,1");
    assert_eq!(doc["result"]["area"]["p"], 5);
    let tree = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(
        tree.descendants()
            .filter(|n| n.has_tag_name("circle"))
            .count(),
        5
    );
    for label in ["(0,0)", "(1/5,2/5)", "(2/5,4/5)", "(3/5,1/5)", "(4/5,3/5)"] {
        assert!(svg.contains(&format!(">{label}<")), "{label}");
    }
    check_golden("plot_fibonacci_5.svg", &svg);

    // companion (5, +1)
    let (doc, svg) = plot(dir.path(), "5,1,-1,0", "0,1");
    assert_eq!(doc["result"]["spec"]["K"], 1);
    assert_eq!(doc["result"]["area"]["p"], 1);
    roxmltree::Document::parse(&svg).unwrap();

    // deterministic output
    let (_, again) = plot(dir.path(), "1,1,1,0", "3,1");
    let (_, first) = plot(dir.path(), "1,1,1,0", "3,1");
    assert_eq!(again, first);
}
