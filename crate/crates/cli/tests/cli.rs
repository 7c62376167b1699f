use std::path::Path;
use std::process::{Command, Output};

use galerkin_collage::ObjectiveMode;
use galerkin_collage_cli::commands::{cmd_forward, cmd_inverse, FORWARD_HEADER, INVERSE_HEADER};
use galerkin_collage_cli::{exit, parse_config, RunConfig};
use galerkin_collage::{BoxConstraint, ProblemSpec};

const BENCHMARK: &str = r#"
lambda1 = 2.718281828459045
lambda2 = 1.5707963267948966
alpha1 = 1
alpha2 = "sin(1)"
beta1 = "exp(1/10)"
beta2 = "sin(4)"
f = "(e - 1/5)*exp(x^2/10) - (x^2/25)*exp(x^2/10)"
g = "-2*cos((x+1)^2) + (pi/2)*sin((x+1)^2) + 4*(1+x)^2*sin((x+1)^2)"
exact_u = "exp(x^2/10)"
exact_v = "sin((x+1)^2)"
"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_galerkin-collage"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, extra: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, format!("{BENCHMARK}{extra}")).unwrap();
    path.display().to_string()
}

#[test]
fn forward_succeeds_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.cfg", "m = [3, 7]\n");
    let out = dir.path().join("out.csv");
    let res = run(&["forward", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(exit::SUCCESS), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], FORWARD_HEADER);
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("3,1.0978"));
}

#[test]
fn table1_is_byte_identical_across_runs() {
    let a = run(&["table1"]);
    let b = run(&["table1"]);
    assert_eq!(a.status.code(), Some(exit::SUCCESS));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn table2_is_byte_identical_across_runs() {
    let a = run(&["table2", "--grid", "51"]);
    let b = run(&["table2", "--grid", "51"]);
    assert_eq!(a.status.code(), Some(exit::SUCCESS));
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    assert!(text.starts_with(INVERSE_HEADER));
    assert_eq!(text.lines().count(), 5);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn missing_config_is_a_config_error() {
    assert_eq!(run(&["forward"]).status.code(), Some(exit::CONFIG));
    assert_eq!(run(&["inverse", "--config", "/nonexistent/run.cfg"]).status.code(), Some(exit::CONFIG));
}

#[test]
fn malformed_configs_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    for (i, extra) in ["m = []\n", "mode = nope\n", "lambda1 = 2\n", "colour = red\n"].iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("bad{i}.cfg"), extra);
        let res = run(&["forward", "--config", &cfg]);
        assert_eq!(res.status.code(), Some(exit::CONFIG), "{extra}");
        assert!(!res.stderr.is_empty());
    }
}

#[test]
fn forward_without_exact_solution_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("noexact.cfg");
    let text = BENCHMARK.replace("exact_u = \"exp(x^2/10)\"\n", "");
    std::fs::write(&path, text).unwrap();
    let res = run(&["forward", "--config", path.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(exit::CONFIG));
}

#[test]
fn domain_error_in_source_is_numerical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("domain.cfg");
    let text = BENCHMARK.replace(
        "f = \"(e - 1/5)*exp(x^2/10) - (x^2/25)*exp(x^2/10)\"",
        "f = \"sqrt(x - 2)\"",
    );
    std::fs::write(&path, format!("{text}m = [3]\n")).unwrap();
    let res = run(&["forward", "--config", path.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(exit::NUMERICAL), "{}", String::from_utf8_lossy(&res.stderr));
}

#[test]
fn unwritable_output_is_io_error() {
    let res = run(&["table1", "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(res.status.code(), Some(exit::IO));
}

#[test]
fn plot_file_has_one_block_per_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.cfg", "m = [3, 15]\n");
    let plot = dir.path().join("sol.dat");
    let res = run(&["forward", "--config", &cfg, "--plot", plot.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(exit::SUCCESS));
    let text = std::fs::read_to_string(plot).unwrap();
    assert_eq!(text.matches("# m = ").count(), 2);
    let last = text.lines().rfind(|l| !l.starts_with('#') && !l.is_empty()).unwrap();
    let cols: Vec<f64> = last.split(' ').map(|c| c.parse().unwrap()).collect();
    assert_eq!(cols[0], 1.0);
    // boundary values are interpolated exactly, up to the printed precision
    assert!((cols[1] - 0.1f64.exp()).abs() < 1e-8);
    assert!((cols[2] - 4f64.sin()).abs() < 1e-8);
}

#[test]
fn inverse_via_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "inv.cfg", "m = [15]\nn = 5\nmode = dual-norm\n");
    let res = run(&["inverse", "--config", &cfg]);
    assert_eq!(res.status.code(), Some(exit::SUCCESS));
    let text = String::from_utf8(res.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..3], &["15", "5", "dual-norm"]);
    let l1: f64 = row[3].parse().unwrap();
    let l2: f64 = row[4].parse().unwrap();
    assert!((l1 - std::f64::consts::E).abs() < 1e-3);
    assert!((l2 - std::f64::consts::FRAC_PI_2).abs() < 1e-3);
}

#[test]
fn abs_sum_mode_drives_objective_to_zero() {
    let mut config = parse_config(&format!("{BENCHMARK}m = [15, 31]\n")).unwrap();
    config.mode = ObjectiveMode::AbsSum;
    let out = cmd_inverse(&config).unwrap();
    for row in &out.rows {
        assert!(row.value <= 1e-6, "m={}: {}", row.target_m, row.value);
    }
}

#[test]
fn recovers_inside_a_narrow_box() {
    let config = RunConfig {
        spec: ProblemSpec::benchmark().with_lambdas(0.8, 0.9).unwrap(),
        m: Some(vec![31]),
        bounds: BoxConstraint::new((0.5, 1.0), (0.5, 1.0)).unwrap(),
        ..RunConfig::benchmark()
    };
    let row = cmd_inverse(&config).unwrap().rows[0];
    assert!((row.lambda.0 - 0.8).abs() < 1e-3 && (row.lambda.1 - 0.9).abs() < 1e-3, "{:?}", row.lambda);
}

#[test]
fn config_file_matches_builtin_benchmark() {
    let from_file = parse_config(&format!("{BENCHMARK}m = [3, 7, 15, 31, 63]\n")).unwrap();
    let builtin = galerkin_collage_cli::table1_config();
    assert_eq!(cmd_forward(&from_file).unwrap().csv, cmd_forward(&builtin).unwrap().csv);
}
