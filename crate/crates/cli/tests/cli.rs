use std::path::Path;
use std::process::{Command, Output};

fn t4flow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_t4flow")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).unwrap()
}

fn parse_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines().skip(1).filter(|l| !l.starts_with('#')).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect()
}

#[test]
fn table1_matches_golden() {
    let o = t4flow(&["table1", "--h", "0.5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), golden("table1_h0.5.csv"));
}

#[test]
fn table1_default_rows() {
    let o = t4flow(&["table1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "h,I,H0_min,H0_max,H1_min,H1_max,H0_drift,H1_drift");
    let rows = parse_rows(&text);
    assert_eq!(rows.len(), 7);
    let reference = [-2.76812630, -2.76366763, -2.76340793, -2.76339200, -2.76339101, -2.76339095, -2.76339094];
    for (row, i) in rows.iter().zip(reference) {
        assert!((row[1] - i).abs() <= 1e-6);
    }
    assert!(!text.contains('\r'));
}

#[test]
fn table1_misaligned_step_is_usage_error() {
    let o = t4flow(&["table1", "--h", "0.3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("35/h must be integral"));
}

#[test]
fn scan_matches_golden_and_is_deterministic() {
    let args = ["scan", "--alpha-min", "0.5", "--alpha-max", "2", "--steps", "4"];
    let a = t4flow(&args);
    let b = t4flow(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a), golden("scan_0.5_2_4.csv"));
}

#[test]
fn scan_rejects_single_step() {
    assert_eq!(t4flow(&["scan", "--steps", "1"]).status.code(), Some(2));
    assert_eq!(t4flow(&["scan", "--alpha-min", "2", "--alpha-max", "1"]).status.code(), Some(2));
}

#[test]
fn reduce_outputs() {
    let o = t4flow(&["reduce", "--preset", "riemannian", "--format", "csv"]);
    assert_eq!(stdout(&o), golden("reduce_riemannian.csv"));

    let o = t4flow(&["reduce", "--preset", "subriemannian", "--format", "csv"]);
    let rows = parse_rows(&stdout(&o));
    assert_eq!(rows[0][7], 1.0);

    let o = t4flow(&["reduce", "--k1", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("regular coadjoint orbit requires k1·k2 ≠ 0"));

    let o = t4flow(&["reduce", "--a24", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("incompatible metric"));
}

#[test]
fn euler_zero_momentum_is_constant() {
    let o = t4flow(&["euler", "--p", "0,0,0,0,0,0", "--T", "1", "--stride", "100"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "t,pu,pv,pw,px,py,pz,K1,K2,H");
    for row in parse_rows(&text) {
        assert!(row[1..].iter().all(|v| *v == 0.0));
    }
    assert!(text.trim_end().ends_with("K1=0.0 K2=0.0 H=0.0"));
}

#[test]
fn euler_drift_line() {
    let o = t4flow(&["euler", "--T", "100", "--stride", "10000"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    let drifts: Vec<f64> = last.split_whitespace().filter_map(|kv| kv.split_once('=')).map(|(_, v)| v.parse().unwrap()).collect();
    assert_eq!(drifts.len(), 3);
    assert!(drifts.iter().all(|d| *d <= 1e-8));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let o = t4flow(&["table1", "--h", "0.5", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap(), golden("table1_h0.5.csv"));
}

#[test]
fn verify_suites() {
    let o = t4flow(&["verify", "poisson"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("check,poisson,jacobi_basis_triples,PASS"));
    assert!(text.lines().last().unwrap().starts_with("summary,"));

    let o = t4flow(&["verify", "melnikov"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("check,melnikov,methods_agree_alpha_1,PASS"));

    assert_eq!(t4flow(&["verify", "nonsense"]).status.code(), Some(2));
}
