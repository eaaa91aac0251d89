use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;

use specasym_cli::commands::{cmd_asymptotics, cmd_birkhoff, cmd_compare, cmd_matrix, cmd_spectrum, cmd_weights};
use specasym_cli::{Overrides, ProblemConfig};

const THIRD_ORDER: &str = r#"
[order]
n = 3

[indices]
i = [1, 0]

[[coefficients]]
kind = "constant"
value = [SIGMA0, 0.0]

[[coefficients]]
kind = "constant"
value = [SIGMA1, 0.0]

[boundary]
r = 1
left = [{ p = 0 }]
right = [{ p = 0 }, { p = 1 }]
"#;

fn third_order(s0: f64, s1: f64) -> String {
    THIRD_ORDER
        .replace("SIGMA0", &format!("{s0:?}"))
        .replace("SIGMA1", &format!("{s1:?}"))
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn shipped(name: &str) -> ProblemConfig {
    specasym_cli::load(&configs_dir().join(name)).unwrap()
}

fn parse(text: &str) -> ProblemConfig {
    ProblemConfig::from_toml(text).unwrap()
}

fn window(l_min: i64, l_max: i64) -> Overrides {
    Overrides {
        l_min: Some(l_min),
        l_max: Some(l_max),
        ..Overrides::default()
    }
}

/// Column `name` of a CSV document as floats.
fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

fn temp_config(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".toml").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn specasym(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_specasym")).args(args).output().unwrap()
}

#[test]
fn shipped_configs_round_trip() {
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        let cfg = specasym_cli::load(&path).unwrap();
        let again = ProblemConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again, "{}", path.display());
    }
}

#[test]
fn raw_matrix_and_full_settings_round_trip() {
    let text = r#"
[order]
n = 2

[raw_matrix]
entries = [
  [{ kind = "zero" }, { kind = "constant", value = [1.0, 0.0] }],
  [{ kind = "piecewise_poly", breakpoints = [0.0, 0.5, 1.0], coeffs = [[[1.0, 0.5]], [[0.0, 0.0], [2.0, 0.0]]], class = "l1" }, { kind = "zero" }],
]

[boundary]
r = 1
left = [{ p = 0, u = [] }]
right = [{ p = 1, u = [[0.5, -0.25]] }]

[weight_form]
p0 = 1
u0 = [[0.0, 0.0]]

[settings]
l_min = 2
l_max = 6
kappa = 1
R = 12.5
h = 0.5

[settings.tolerances]
integration = 1e-10
newton = 1e-13
cauchy = 1e-10
birkhoff = 1e-11
"#;
    let cfg = parse(text);
    assert_eq!(cfg, parse(&cfg.to_toml()));
    let problem = cfg.problem().unwrap();
    assert_eq!(problem.n(), 2);
    let f = problem.matrix().eval(0.75);
    assert_eq!(f[(1, 0)].re, 1.5);
}

#[test]
fn matrix_of_third_order_sums_coefficients() {
    let out = cmd_matrix(&parse(&third_order(1.0, 1.0)), 0.5).unwrap();
    let rows: Vec<Vec<&str>> = out.stdout.lines().map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1][0], "2");
}

#[test]
fn zero_config_prints_companion_matrix() {
    let out = cmd_matrix(&parse(&third_order(0.0, 0.0)), 0.3).unwrap();
    let rows: Vec<String> = out.stdout.lines().map(|l| l.split_whitespace().collect::<Vec<_>>().join(" ")).collect();
    assert_eq!(rows, vec!["0 1 0", "0 0 1", "0 0 0"]);
}

#[test]
fn invalid_index_exits_with_config_code() {
    let f = temp_config(&third_order(0.0, 0.0).replace("i = [1, 0]", "i = [2, 0]"));
    let out = specasym(&["matrix", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("indices[0]"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn parse_errors_name_the_field() {
    let bad = third_order(0.0, 0.0).replace("n = 3", "n = -3");
    let err = ProblemConfig::from_toml(&bad).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("order.n"), "{err}");
    let err = ProblemConfig::from_toml(&format!("{}\n[settings]\nlmax = 3\n", third_order(0.0, 0.0))).unwrap_err();
    assert!(err.to_string().contains("settings.lmax"), "{err}");
    let both = format!("{}\n[raw_matrix]\nentries = []\n", third_order(0.0, 0.0));
    assert!(ProblemConfig::from_toml(&both).unwrap_err().to_string().contains("raw_matrix"));
    let r = third_order(0.0, 0.0).replace("r = 1", "r = 2");
    assert!(ProblemConfig::from_toml(&r).unwrap_err().to_string().contains("boundary.r"));
}

#[test]
fn dirichlet_spectrum_csv() {
    let out = cmd_spectrum(&shipped("dirichlet.toml"), &window(1, 3)).unwrap();
    assert!(out.stdout.starts_with("l,re_lambda,im_lambda,re_rho,im_rho,re_eps,im_eps,multiplicity\n"));
    assert!(!out.stdout.contains('\r'));
    let want = [-9.8696044, -39.4784176, -88.8264396];
    let got = column(&out.stdout, "re_lambda");
    assert_eq!(got.len(), 3);
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() < 1e-6, "{g} vs {w}");
    }
}

#[test]
fn beam_first_root() {
    let out = cmd_spectrum(&shipped("beam.toml"), &window(1, 1)).unwrap();
    let rho = column(&out.stdout, "re_rho");
    assert!((rho[0] - 4.730040745).abs() < 1e-8, "{}", rho[0]);
}

#[test]
fn third_order_rho_follows_model() {
    let out = cmd_spectrum(&parse(&third_order(0.0, 0.0)), &window(5, 8)).unwrap();
    let g = 2.0 * PI / 3f64.sqrt();
    for (l, rho) in (5..=8).zip(column(&out.stdout, "re_rho")) {
        let want = g * (l as f64 + 1.0 / 6.0);
        assert!((rho - want).abs() < 1e-3 * want, "l = {l}: {rho} vs {want}");
    }
}

#[test]
fn dirichlet_weights() {
    let out = cmd_weights(&shipped("dirichlet.toml"), &window(1, 2)).unwrap();
    assert!(out.stdout.starts_with("l,re_beta,im_beta\n"));
    let beta = column(&out.stdout, "re_beta");
    assert!((beta[0] + 19.7392088).abs() < 1e-6, "{}", beta[0]);
}

#[test]
fn weights_require_a_weight_form() {
    let err = cmd_weights(&shipped("beam.toml"), &window(1, 2)).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("weight_form"));
}

#[test]
fn asymptotics_of_third_order() {
    let out = cmd_asymptotics(&parse(&third_order(0.0, 0.0)), &window(1, 4)).unwrap();
    let chi = column(&out.stdout, "re_chi");
    assert_eq!(chi.len(), 4);
    assert!((chi[0] - 1.0 / 6.0).abs() < 1e-12, "{}", chi[0]);
    assert!(out.report.contains("fitted chi"));
}

#[test]
fn compare_identical_configs() {
    let cfg = parse(&third_order(0.5, 1.0));
    let out = cmd_compare(&cfg, &cfg, None, &window(3, 8)).unwrap();
    assert!(out.stdout.starts_with("l,d,n_d,n_d0,re_rho_hat,im_rho_hat,re_c_hat,im_c_hat,slope_fit\n"));
    assert!(column(&out.stdout, "re_rho_hat").iter().all(|v| *v == 0.0));
    assert!(column(&out.stdout, "re_c_hat").iter().all(|v| *v == 0.0));
}

#[test]
fn compare_detects_first_order_decay() {
    let a = parse(&third_order(0.0, 0.0));
    let b = parse(&third_order(0.0, 1.0));
    let out = cmd_compare(&a, &b, None, &window(10, 20)).unwrap();
    assert!(column(&out.stdout, "d").iter().all(|d| *d == 1.0));
    let slope = column(&out.stdout, "slope_fit")[0];
    assert!((slope + 1.0).abs() < 0.15, "{slope}");
}

#[test]
fn birkhoff_functionals() {
    let out = cmd_birkhoff(&parse(&third_order(0.0, 0.0)), &[20.0], &Overrides::default()).unwrap();
    assert!(out.stdout.starts_with("re_rho,im_rho,upsilon,upsilon_d,max_E,residual\n"));
    assert_eq!(column(&out.stdout, "upsilon"), vec![0.0]);
    assert_eq!(column(&out.stdout, "max_E"), vec![0.0]);
    let out = cmd_birkhoff(&parse(&third_order(1.0, 0.5)), &[20.0, 200.0], &Overrides::default()).unwrap();
    let ud = column(&out.stdout, "upsilon_d");
    assert!(ud[1] < ud[0]);
    assert!(column(&out.stdout, "residual").iter().all(|r| *r < 1e-8));
}

#[test]
fn numerical_failure_exits_with_code_three() {
    let f = temp_config(&third_order(1.0, 1.0));
    let out = specasym(&["birkhoff", f.path().to_str().unwrap(), "--rho", "0.01"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error[numerical]"));
}

#[test]
fn output_is_deterministic_and_report_goes_to_stderr() {
    let f = temp_config(&third_order(0.25, -0.5));
    let path = f.path().to_str().unwrap();
    let a = specasym(&["spectrum", path, "--lmax", "4", "--report"]);
    let b = specasym(&["spectrum", path, "--lmax", "4", "--threads", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stderr.is_empty() && b.stderr.is_empty());
    assert!(String::from_utf8(a.stderr).unwrap().contains("located 4 eigenvalues"));
}

#[test]
fn flag_overrides_are_validated() {
    let f = temp_config(&third_order(0.0, 0.0));
    let path = f.path().to_str().unwrap();
    let out = specasym(&["spectrum", path, "--lmin", "5", "--lmax", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("l_min"));
    let out = specasym(&["spectrum", path, "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(2));
    let out = specasym(&["spectrum", path, "--kappa", "9"]);
    assert_eq!(out.status.code(), Some(2));
}
