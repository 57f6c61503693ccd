use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn contagion(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contagion"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = contagion(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn read_column(path: &Path, column: usize) -> Vec<f64> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(column).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn gen_net_is_regular_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen-net", "--n", "200", "--outdegree", "1", "--seed", "7", "--out", "a.csv"]);
    ok(d, &["gen-net", "--n", "200", "--outdegree", "1", "--seed", "7", "--out", "b.csv"]);
    let a = fs::read(d.join("a.csv")).unwrap();
    assert_eq!(a, fs::read(d.join("b.csv")).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next(), Some("src,dst,weight"));
    assert_eq!(text.lines().count(), 201);
    let mut indeg = vec![0; 200];
    for dst in read_column(&d.join("a.csv"), 1) {
        indeg[dst as usize] += 1;
    }
    assert!(indeg.iter().all(|&k| k == 1));
    let meta = fs::read_to_string(d.join("a.csv.meta")).unwrap();
    assert!(meta.contains("seed=7"));
    assert!(meta.contains("receiver_rewires=0"));
}

#[test]
fn sar_with_zero_rho_returns_noise() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen-net", "--n", "50", "--outdegree", "2", "--seed", "1"]);
    ok(d, &["simulate", "sar", "--net", "network.csv", "--rho1", "0", "--rho2", "0", "--out", "z.csv"]);
    let meta = fs::read_to_string(d.join("z.csv.meta")).unwrap();
    assert!(meta.contains("residual=0\n"), "{meta}");
    let z = read_column(&d.join("z.csv"), 1);
    assert_eq!(z.len(), 50);
    let mean = z.iter().sum::<f64>() / 50.0;
    let var = z.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 49.0;
    assert!((var - 1.0).abs() < 0.5, "{var}");
}

#[test]
fn ising_without_energy_is_a_fair_coin() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen-net", "--n", "2000", "--outdegree", "1", "--seed", "2"]);
    ok(d, &["simulate", "ising", "--net", "network.csv", "--alpha", "0", "--beta", "0", "--gamma", "0", "--sweeps", "3"]);
    let y = read_column(&d.join("ising.csv"), 1);
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    assert!((mean - 0.5).abs() < 0.05, "{mean}");
}

#[test]
fn qad_on_symmetric_network_fails_with_collinearity() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut net = String::from("src,dst,weight\n");
    for i in 0..10 {
        let j = (i + 1) % 10;
        net.push_str(&format!("{i},{j},1\n{j},{i},1\n"));
    }
    fs::write(d.join("sym.csv"), net).unwrap();
    let y: String = (0..10).map(|i| format!("{i},{}\n", (i * 7 % 5) as f64 - 2.0)).collect();
    fs::write(d.join("y.csv"), format!("node,value\n{y}")).unwrap();
    let out = contagion(d, &["fit", "qad", "--net", "sym.csv", "--y", "y.csv"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("collinear"));
    assert!(!d.join("qad.csv").exists());
}

#[test]
fn qad_logistic_schema_and_sar_mle_recovery() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen-net", "--n", "400", "--outdegree", "1", "--receiver-rewires", "200", "--sender-rewires", "40"]);
    ok(d, &["simulate", "sar", "--net", "network.csv", "--rho1", "0.4", "--threshold", "0", "--seed", "5"]);
    ok(d, &["fit", "qad", "--family", "logistic", "--net", "network.csv", "--y", "sar_binary.csv"]);
    let q = fs::read_to_string(d.join("qad.csv")).unwrap();
    let mut lines = q.lines();
    assert_eq!(lines.next(), Some("family,forward,reverse,difference"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "logistic");
    let v: Vec<f64> = row[1..].iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(v[2], v[0] - v[1]);

    ok(d, &["fit", "sar-mle", "--net", "network.csv", "--z", "sar.csv"]);
    let fit = fs::read_to_string(d.join("sar_mle.csv")).unwrap();
    let rho: Vec<f64> = fit.lines().nth(1).unwrap().split(',').skip(1).map(|s| s.parse().unwrap()).collect();
    assert!((rho[0] - 0.4).abs() < 4.0 * rho[1], "{fit}");
}

#[test]
fn panel_round_trip_through_cf_fit() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen-net", "--n", "300", "--outdegree", "2", "--seed", "3"]);
    ok(d, &["simulate", "panel", "--net", "network.csv", "--waves", "4", "--delta", "0.5,-0.5"]);
    let header = fs::read_to_string(d.join("panel.csv")).unwrap();
    assert!(header.starts_with("wave,node,y,x1,x2\n"));
    ok(d, &["fit", "cf", "--panel", "panel.csv", "--nets", "network.csv", "--terms", "lag1,lag2", "--covariates", "2"]);
    let fit = fs::read_to_string(d.join("cf.csv")).unwrap();
    let names: Vec<&str> = fit.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names, ["intercept", "ego_lag", "alter_lag1", "alter_lag2", "x2"]);
    let bad = contagion(d, &["fit", "cf", "--panel", "panel.csv", "--nets", "network.csv", "--terms", "sum,lag1"]);
    assert!(!bad.status.success());
}

#[test]
fn design_fits_read_named_response() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let rows: String = (0..20).map(|i| format!("{},{}\n", i, 3.0 + 0.5 * i as f64)).collect();
    fs::write(d.join("data.csv"), format!("x,out\n{rows}")).unwrap();
    ok(d, &["fit", "ols", "--data", "data.csv", "--response", "out"]);
    let fit = fs::read_to_string(d.join("fit.csv")).unwrap();
    let slope: f64 = fit.lines().nth(2).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((slope - 0.5).abs() < 1e-10);
    let out = contagion(d, &["fit", "logistic", "--data", "data.csv", "--response", "out"]);
    assert!(!out.status.success(), "non-binary response must be rejected");
}

#[test]
fn config_file_flags_win_and_unknown_keys_fail() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("net.cfg"), "n = 30\noutdegree = 2\nseed = 4\n").unwrap();
    ok(d, &["--config", "net.cfg", "gen-net", "--n", "40"]);
    let meta = fs::read_to_string(d.join("network.csv.meta")).unwrap();
    assert!(meta.contains("n=40\n") && meta.contains("outdegree=2\n") && meta.contains("seed=4\n"), "{meta}");

    fs::write(d.join("bad.cfg"), "n = 30\ncolour = red\n").unwrap();
    let out = contagion(d, &["--config", "bad.cfg", "--out-dir", "res", "gen-net"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
    assert!(!d.join("res").exists());
}

#[test]
fn missing_config_leaves_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = contagion(d, &["experiment", "asymmetry-grid", "--config", "grid.cfg", "--out-dir", "res"]);
    assert!(!out.status.success());
    assert!(!d.join("res").exists());
}

#[test]
fn experiments_write_schema_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("grid.cfg"),
        "n = 40\nsender_rewires = 0,20\nreceiver_rewires = 0,20\nnetworks_per_cell = 1\noutcomes_per_network = 4\n",
    )
    .unwrap();
    ok(d, &["experiment", "asymmetry-grid", "--config", "grid.cfg", "--seed", "9"]);
    let grid = fs::read_to_string(d.join("asymmetry_grid.csv")).unwrap();
    assert_eq!(
        grid.lines().next(),
        Some("sender_rewires,receiver_rewires,family,process,mean_difference,frac_positive,replicates,failures")
    );
    assert_eq!(grid.lines().count(), 1 + 16);
    let meta = fs::read_to_string(d.join("asymmetry_grid.csv.meta")).unwrap();
    assert!(meta.contains("seed=9") && meta.contains("networks_per_cell=1"));

    ok(d, &["gen-net", "--n", "60", "--receiver-rewires", "30", "--out", "w1.csv", "--seed", "1"]);
    ok(d, &["gen-net", "--n", "60", "--receiver-rewires", "30", "--out", "w2.csv", "--seed", "2"]);
    ok(d, &["experiment", "wave-asymmetry", "--networks", "w1.csv,w2.csv", "--outcomes-per-network", "5"]);
    let waves = fs::read_to_string(d.join("wave_asymmetry.csv")).unwrap();
    assert_eq!(waves.lines().count(), 1 + 8);

    ok(d, &[
        "experiment", "threshold-sweep", "--n", "200", "--receiver-rewires", "60", "--thresholds", "29,30,31",
    ]);
    let sweep = fs::read_to_string(d.join("threshold_sweep.csv")).unwrap();
    assert_eq!(sweep.lines().next(), Some("threshold,model,term,estimate,std_error"));
    assert_eq!(sweep.lines().count(), 1 + 3 * 3 * 4);
}

#[test]
fn experiment_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = |out: &'static str| {
        vec![
            "experiment", "asymmetry-grid", "--n", "30", "--sender-rewires", "0,10", "--receiver-rewires", "5",
            "--networks-per-cell", "2", "--outcomes-per-network", "3", "--seed", "11", "--out", out,
        ]
    };
    ok(d, &args("a.csv"));
    ok(d, &args("b.csv"));
    assert_eq!(fs::read(d.join("a.csv")).unwrap(), fs::read(d.join("b.csv")).unwrap());
}
