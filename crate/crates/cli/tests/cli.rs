use ddsim_cli::{ExperimentConfig, Table};
use std::path::Path;
use std::process::{Command, Output};

fn ddsim(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ddsim"));
    c.args(args).env_remove("DDSIM_PRECISION_BITS");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn fig1_writes_csv_and_flags_early_levels() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "fig1.toml", "level_max = 4\n");
    let out = dir.path().join("fig1.csv");
    let o = ddsim(&["fig1", "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("level 1"));

    let text = std::fs::read_to_string(&out).unwrap();
    let t = Table::from_csv(&text).unwrap();
    let expected = ExperimentConfig::from_str("experiment = \"fig1\"\nlevel_max = 4\n").unwrap();
    assert_eq!(t.config_hash, expected.hash());
    assert_eq!(t.columns, ["level", "scheme", "n_pulses", "purity_loss", "precision_bits"]);
    assert_eq!(t.rows.len(), 8);
    assert_eq!(t.rows[0][2..4], t.rows[1][2..4]);
    assert!(t.values("precision_bits").iter().all(|b| b.parse::<u32>().unwrap() >= 64));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "r.toml", "level_max = 3\npulse_width = [1e-11]\n");
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    ddsim(&["fig2", "--config", &cfg, "--out", a.to_str().unwrap()], &[]);
    ddsim(&["fig2", "--config", &cfg, "--out", b.to_str().unwrap(), "--threads", "1"], &[]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn clean_run_exits_zero_with_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "t.toml", "draws = 5\nmodel_bath_dim = 2\n");
    let o = ddsim(&["thompson_sweep", "--config", &cfg, "--format", "json"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let t = Table::from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(t.rows.len(), 5);
    assert_eq!(t.meta_value("violations"), Some("0"));
}

#[test]
fn environment_pins_precision() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "p.toml", "level_max = 2\n");
    let o = ddsim(&["fig1", "--config", &cfg], &[("DDSIM_PRECISION_BITS", "320")]);
    let t = Table::from_csv(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert!(t.values("precision_bits").iter().all(|b| *b == "320"));
}

#[test]
fn errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "no_such_key = 1\n");
    assert_eq!(ddsim(&["fig1", "--config", &bad], &[]).status.code(), Some(1));
    let custom = write(dir.path(), "c.toml", "");
    assert_eq!(ddsim(&["custom", "--config", &custom], &[]).status.code(), Some(1));
    let ok = write(dir.path(), "ok.toml", "level_max = 1\n");
    let unwritable = dir.path().join("missing").join("out.csv");
    let o = ddsim(&["fig1", "--config", &ok, "--out", unwritable.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn custom_sequence_file_runs() {
    let dir = tempfile::tempdir().unwrap();
    let seq = ddsim_core::pulse::write_sequence(&ddsim_core::pulse::gen_cdd(1e-5 / 16.0, 2).unwrap());
    let seq_path = write(dir.path(), "cdd2.seq", &seq);
    let cfg = write(dir.path(), "c.toml", &format!("sequence_file = {:?}\n", seq_path));
    let o = ddsim(&["custom", "--config", &cfg], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let t = Table::from_csv(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(t.values("n_pulses"), ["20"]);
}
