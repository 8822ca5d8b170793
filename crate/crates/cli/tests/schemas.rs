use std::path::Path;

use clap::Parser;
use serde_json::Value;

use kms_thermo_cli::{run, Cli};

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.json"));
    let text = std::fs::read_to_string(path).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn report(args: &str) -> Value {
    let argv = std::iter::once("kms-thermo").chain(args.split_whitespace());
    let cli = Cli::try_parse_from(argv).unwrap();
    run(&cli).unwrap().report
}

fn check(schema_name: &str, args: &str) {
    let v = report(args);
    let validator = schema(schema_name);
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{args}: {errors:?}\n{v:#}");
}

#[test]
fn every_report_matches_its_schema() {
    for m in ["o2_equal", "graph_perron", "o2_generalized", "circle_sine", "octafold"] {
        check("dimension", &format!("dimension --model catalog:{m}"));
    }
    for m in ["o3_half_quarter", "graph_golden", "o2_generalized"] {
        check("measure", &format!("measure --model catalog:{m} --depth 2"));
        check("quasi-invariance", &format!("quasi-invariance --model catalog:{m} --depth 3"));
        check("kms-check", &format!("kms-check --model catalog:{m} --depth 2"));
        check("entropy", &format!("entropy --model catalog:{m}"));
    }
    check("metric", "metric --model catalog:o2_generalized --x 1(12) --y 12(2)");
    check("metric", "metric --model catalog:o2_equal --x (1) --y (2)");
    for c in ["scaling", "quasi-invariance", "entropy"] {
        check("circle", &format!("circle --model catalog:circle_sine --check {c} --sections 2"));
        check("circle", &format!("circle --f 3 --check {c} --sections 2"));
    }
    for c in ["dimension", "entropy", "scaling", "measure-scaling", "midpoints"] {
        check("octafold", &format!("octafold --check {c} --depth 3"));
    }
    check("catalog", "catalog");
    check("catalog", "catalog octafold");
}

#[test]
fn catalog_models_match_model_schema() {
    let validator = schema("model");
    for m in kms_thermo_cli::catalog::all() {
        let v = serde_json::to_value(&m).unwrap();
        assert!(validator.is_valid(&v), "{v}");
    }
}
