use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_transference"));
    c.env_remove("TRANSFERENCE_PRECISION_BITS").env_remove("TRANSFERENCE_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_valid(schema_name: &str, doc: &Value) {
    let s = schema(schema_name);
    let v = jsonschema::validator_for(&s).unwrap();
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{schema_name}: {errors:?}");
}

/// Header check plus every row against the row schema.
fn assert_valid_csv(text: &str) -> Vec<Vec<f64>> {
    let s = schema("flow-trace.schema.json");
    let header_re = s["x-csv-header-pattern"].as_str().unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert!(header_re.starts_with("^s(,lambda_"), "{header_re}");
    let d = (header.len() - 1) / 3;
    let expected: Vec<String> = std::iter::once("s".to_string())
        .chain(["lambda", "psi", "Psi"].iter().flat_map(|k| (1..=d).map(move |p| format!("{k}_{p}"))))
        .collect();
    assert_eq!(header, expected);
    let v = jsonschema::validator_for(&s).unwrap();
    lines
        .map(|line| {
            let cells: Vec<&str> = line.split(',').collect();
            let obj: serde_json::Map<String, Value> =
                header.iter().zip(&cells).map(|(k, c)| (k.to_string(), Value::from(*c))).collect();
            assert!(v.is_valid(&Value::Object(obj)), "row {line}");
            cells.iter().map(|c| c.parse::<f64>().unwrap()).collect()
        })
        .collect()
}

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

fn p(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn zero_matrix_flow_rows_are_constant() {
    let text = ok(&["--fixture", "zero", "--n", "2", "--m", "1", "--s-max", "3", "--s-step", "0.25", "flow"]);
    let rows = assert_valid_csv(&text);
    assert_eq!(rows.len(), 12);
    for r in rows {
        for (got, want) in r[4..7].iter().zip([-1.0, 0.5, 0.5]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }
}

#[test]
fn flow_output_and_sidecar_are_deterministic() {
    let dir = tmp();
    let mut outputs = Vec::new();
    for k in 0..2 {
        let csv = p(&dir, &format!("trace{k}.csv"));
        ok(&["--n", "2", "--m", "1", "--seed", "4", "--s-max", "4", "flow", "--out", csv.to_str().unwrap()]);
        let side = p(&dir, &format!("trace{k}.witnesses.json"));
        outputs.push((std::fs::read(&csv).unwrap(), std::fs::read(&side).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    let rows = assert_valid_csv(std::str::from_utf8(&outputs[0].0).unwrap());
    for r in &rows {
        assert!(r[1] <= r[2] && r[2] <= r[3], "λ ordering: {r:?}");
    }
    let side: Value = serde_json::from_slice(&outputs[0].1).unwrap();
    assert_valid("witnesses.schema.json", &side);
    assert_eq!(side.as_object().unwrap().len(), rows.len());
}

#[test]
fn exact_grid_flow_on_rational_matrix_is_repeatable() {
    let dir = tmp();
    let fixture = p(&dir, "q.json");
    ok(&["gen", "--kind", "rational", "--entries", "1/2;1/3", "--out", fixture.to_str().unwrap()]);
    let args = ["--fixture", fixture.to_str().unwrap(), "--exact-grid", "64", "flow"];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let rows = assert_valid_csv(&a);
    assert_eq!(rows.len(), 63);
    assert!((rows[0][0] - 2.0 * 2f64.ln()).abs() < 1e-12);
}

#[test]
fn corrupted_lambda_order_fails_verify() {
    let out = run(&["--fixture", "zero", "--s-max", "4", "verify", "--corrupt-lambda-order"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.contains("lambda_order") && l.ends_with(" violated")), "{text}");
}

#[test]
fn only_jarnik_gives_one_report() {
    let text = ok(&["--n", "1", "--m", "2", "--seed", "2", "--s-max", "12", "--only", "jarnik_eq", "verify", "--json"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_valid("verify.schema.json", &v);
    let reports = v["inequalities"].as_array().unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["family"], "jarnik_eq");
}

#[test]
fn verify_reports_are_byte_identical() {
    let dir = tmp();
    let run_once = |name: &str| {
        let out = p(&dir, name);
        ok(&["--n", "2", "--m", "2", "--seed", "1", "--s-max", "6", "--t-max", "300", "--out", out.to_str().unwrap(), "verify"]);
        std::fs::read(out).unwrap()
    };
    let a = run_once("a.json");
    assert_eq!(a, run_once("b.json"));
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_valid("verify.schema.json", &v);
    assert!(v.get("generated_at").is_none());
}

#[test]
fn timestamp_can_be_enabled_from_config() {
    let dir = tmp();
    let cfg = p(&dir, "run.cfg");
    std::fs::write(&cfg, "timestamp = true\n").unwrap();
    let text = ok(&["--config", cfg.to_str().unwrap(), "minima", "--s", "1"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert!(v["generated_at"].as_u64().unwrap() > 0);
    assert_valid("minima.schema.json", &v);
}

#[test]
fn gen_round_trips_through_other_commands() {
    let dir = tmp();
    let f = p(&dir, "alg.json");
    ok(&["--fixture", "algebraic-quintic-2x1", "gen", "--out", f.to_str().unwrap()]);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    assert_valid("fixture.schema.json", &doc);
    let again = ok(&["--fixture", f.to_str().unwrap(), "gen"]);
    assert_eq!(again, std::fs::read_to_string(&f).unwrap());
    let direct = ok(&["--fixture", "algebraic-quintic-2x1", "minima", "--s", "2.5"]);
    let from_file = ok(&["--fixture", f.to_str().unwrap(), "minima", "--s", "2.5"]);
    assert_eq!(direct, from_file);
}

#[test]
fn rational_exponents_are_infinite_with_witness() {
    let dir = tmp();
    let fixture = p(&dir, "q.json");
    ok(&["gen", "--kind", "rational", "--entries", "1/2;1/3", "--out", fixture.to_str().unwrap()]);
    let text = ok(&["--fixture", fixture.to_str().unwrap(), "--s-max", "8", "--t-max", "1000", "exponents"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_valid("exponents.schema.json", &v);
    let reports = v["reports"].as_array().unwrap();
    let methods: std::collections::BTreeSet<&str> = reports.iter().map(|r| r["method"].as_str().unwrap()).collect();
    assert_eq!(methods.len(), 3, "{methods:?}");
    for r in reports.iter().filter(|r| r["p"] == 1 && r["transposed"] == false) {
        assert_eq!(r["beta"], "inf", "{r}");
        assert_eq!(r["alpha"], "inf", "{r}");
        let w = r["diagnostics"]["witness"].as_array().unwrap();
        assert!(w.iter().any(|c| c != "0"), "{r}");
    }
    assert_eq!(v["duality"].as_array().unwrap().len(), 2);
}

#[test]
fn minima_of_zero_matrix() {
    let text = ok(&["--fixture", "zero", "--n", "1", "--m", "2", "minima", "--s", "2"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_valid("minima.schema.json", &v);
    let psis: Vec<f64> = v["psis"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (got, want) in psis.iter().zip([-1.0, -1.0, 2.0]) {
        assert!((got - want).abs() < 1e-12);
    }
    // e^{±s} half-sides are irrational, so no exact values
    assert!(v["exact_lambdas"].is_null());
}

#[test]
fn flags_override_config_file_which_overrides_environment() {
    let dir = tmp();
    let cfg = p(&dir, "run.cfg");
    std::fs::write(&cfg, "# flow settings\ns_max = 2\ns_step = 0.5\nprecision_bits = 96\n").unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(ok(&["--config", c, "flow"]).lines().count(), 5);
    assert_eq!(ok(&["--config", c, "--s-max", "1", "flow"]).lines().count(), 3);

    let low = bin().env("TRANSFERENCE_PRECISION_BITS", "32").args(["--s-max", "1", "flow"]).output().unwrap();
    assert_eq!(low.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&low.stderr).contains("precision_bits"));
    let fixed = bin().env("TRANSFERENCE_PRECISION_BITS", "32").args(["--config", c, "flow"]).output().unwrap();
    assert!(fixed.status.success());
}

#[test]
fn hard_errors_exit_with_two() {
    assert_eq!(run(&["--fixture", "no-such-fixture", "flow"]).status.code(), Some(2));
    assert_eq!(run(&["--only", "not_a_check", "verify"]).status.code(), Some(2));
    let dir = tmp();
    let cfg = p(&dir, "bad.cfg");
    std::fs::write(&cfg, "s_max = 2\nwhatever = 1\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "flow"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.cfg:2"));
}

#[test]
fn gen_corpus_writes_every_fixture() {
    let dir = tmp();
    ok(&["gen", "--corpus", "--out", dir.path().to_str().unwrap()]);
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 45);
    assert!(files.iter().all(|f| f.extension().is_some_and(|e| e == "json")));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&files[0]).unwrap()).unwrap();
    assert_valid("fixture.schema.json", &doc);
}
