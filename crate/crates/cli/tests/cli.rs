//! Behavior tests of the `crd` binary: exit codes, CSV formats, and
//! byte-identical reruns (modulo the wall-time metadata line).

use std::path::Path;
use std::process::Command;

fn crd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_crd"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

const SMALL_GM: &str = r#"
[network]
model = "gm"

[network.gm]
d1 = 1e-4
d2 = 5e-5
mu1 = 5.0
mu2 = 5.0
c1 = 1.0
b1 = 1.0
b2 = 0.0

[grid]
n = 8
d = 1

[solver]
dt = 0.001
t_final = 0.05
record_every = 10

[carleman]
k = [2, 3]
repr = "grouped"
"#;

/// Strips `#`-prefixed metadata lines that legitimately differ between runs.
fn stable_content(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with("# wall_time_s:"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn compare_emits_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(&cfg, SMALL_GM);
    let out = dir.path().join("err.csv");
    let status = crd()
        .args(["compare", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "t,species,k,err_abs_inf");
    // Rows for both orders and both species.
    assert!(text.lines().any(|l| l.starts_with("0.01,1,2,")));
    assert!(text.lines().any(|l| l.starts_with("0.01,2,3,")));
}

#[test]
fn reruns_are_byte_identical_except_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(&cfg, SMALL_GM);
    let out1 = dir.path().join("a.csv");
    let out2 = dir.path().join("b.csv");
    for out in [&out1, &out2] {
        let status = crd()
            .args(["simulate", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(stable_content(&out1), stable_content(&out2));
    let text = std::fs::read_to_string(&out1).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "t,species,node,value");
}

#[test]
fn sweep_output_is_thread_count_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    write(
        &cfg,
        &format!(
            "{SMALL_GM}\n[sweep]\nk = 2\n\n[[sweep.axis]]\nparam = \"c1\"\nvalues = [0.5, 1.0, 2.0]\n"
        ),
    );
    let out1 = dir.path().join("s1.csv");
    let out2 = dir.path().join("s2.csv");
    let status = crd()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out1)
        .args(["--threads", "1"])
        .status()
        .unwrap();
    assert!(status.success());
    let status = crd()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out2)
        .args(["--threads", "4"])
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(stable_content(&out1), stable_content(&out2));
    let text = std::fs::read_to_string(&out1).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(
        header,
        "param1,param2,species,mean_rel_err,excluded_nodes,two_equilibria,blowup"
    );
}

#[test]
fn invalid_beta_exits_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let output = crd()
        .args([
            "lchs-verify", "--dim", "4", "--beta", "1.5", "--K", "10", "--nodes", "64", "-t", "1",
        ])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("beta"), "stderr must name beta: {stderr}");
}

#[test]
fn unknown_config_keys_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    write(&cfg, &format!("{SMALL_GM}\nnot_a_key = 3\n"));
    let output = crd()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("not_a_key"), "stderr: {stderr}");
}

#[test]
fn blowup_exits_3_with_partial_flagged_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("unstable.toml");
    // Strong autocatalysis with no decay and a tight cap blows up quickly.
    write(
        &cfg,
        r#"
[network]
model = "custom"

[network.custom]
species = 1
diffusion = [0.0]

[[network.custom.reaction]]
alpha = [2]
beta = [3]
rate = 5.0

[grid]
n = 4
d = 1

[solver]
dt = 0.01
t_final = 10.0
record_every = 1
blowup_cap = 1e6

[initial]
kind = "constant"
values = [10.0]
"#,
    );
    let out = dir.path().join("traj.csv");
    let output = crd()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# blowup: true"));
    assert!(text.lines().filter(|l| !l.starts_with('#')).count() > 1);
}

#[test]
fn full_mode_dimension_cap_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("big.toml");
    write(
        &cfg,
        &SMALL_GM.replace("n = 8", "n = 50").replace("repr = \"grouped\"", "repr = \"full\""),
    );
    let output = crd()
        .args(["carleman", "--config"])
        .arg(&cfg)
        .args(["-k", "3", "--repr", "full"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4));
}

#[test]
fn laplacian_spectrum_has_mode_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("spec.csv");
    let status = crd()
        .args(["laplacian", "--n", "3", "--d", "2", "--spectrum"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "k_1,k_2,eigenvalue");
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 10);
    assert!(text.lines().any(|l| l == "0,0,0"));
}

#[test]
fn rates_roundtrip_and_estimate_columns() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("dg.csv");
    write(&table, "i,j,deltaG\n1,2,0.0\n2,3,1.0\n");
    let out = dir.path().join("rates.csv");
    let status = crd()
        .args(["rates", "--deltaG"])
        .arg(&table)
        .args(["--kbt", "1.0", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let expected = 1.0 / (2.0 * std::f64::consts::PI);
    assert!(text.lines().any(|l| l == format!("1,2,{expected}")));

    let est_cfg = dir.path().join("est.toml");
    write(
        &est_cfg,
        r#"
[[scenario]]
name = "unit"
alpha_i = 1.0
alpha_j_max = 1.0
kbt = 1.0
gamma = 1.0
delta = 1.0
epsilon = 1e-3
stoich_sum = 2.0
t = 1.0
beta = 0.8
alpha_m = 10.0
g = 2.0
"#,
    );
    let report = dir.path().join("report.csv");
    let status = crd()
        .args(["estimate", "--config"])
        .arg(&est_cfg)
        .arg("--out")
        .arg(&report)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("# tag: asymptotic-shape"));
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.starts_with("name,alpha_deltaG,alpha_exp,alpha_F,K_taylor"));
    assert!(header.ends_with("classical_cost,classical_cost_log10"));
}
