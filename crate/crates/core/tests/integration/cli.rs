use std::path::Path;
use std::process::{Command, Output};

use kato_lab::experiments::report::CSV_COLUMNS;

fn kato(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kato-lab")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn validate_symbol_exit_codes() {
    let ok = kato(&["validate-symbol", "--symbol", "airy"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("dispersive"));
    assert_eq!(kato(&["validate-symbol", "--symbol", "schrodinger"]).status.code(), Some(0));
    assert_eq!(kato(&["validate-symbol", "--symbol", "no_such_symbol"]).status.code(), Some(3));
}

#[test]
fn bad_configs_are_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "a.toml", "symbol = \"airy\"\nbogus = 1\n");
    assert_eq!(kato(&["thm1", "--config", &unknown]).status.code(), Some(3));
    let eps = write(dir.path(), "b.toml", "symbol = \"airy\"\nn_schedule = [8, 16]\nepsilon = 0.5\n");
    assert_eq!(kato(&["thm1", "--config", &eps]).status.code(), Some(3));
    let order = write(dir.path(), "c.toml", "symbol = \"airy\"\nn_schedule = [16, 8]\n");
    assert_eq!(kato(&["thm1", "--config", &order]).status.code(), Some(3));
    let wrong = write(dir.path(), "d.toml", "symbol = \"heat\"\nn_schedule = [8, 16]\n");
    assert_eq!(kato(&["thm2", "--config", &wrong]).status.code(), Some(3));
    let kind = write(dir.path(), "e.toml", "kind = \"thm2\"\nsymbol = \"schrodinger\"\nn_schedule = [8, 16]\n");
    assert_eq!(kato(&["thm1", "--config", &kind]).status.code(), Some(3));
    let cfg = write(dir.path(), "f.toml", "symbol = \"airy\"\nn_schedule = [8, 16]\n");
    assert_eq!(kato(&["thm1", "--config", &cfg, "--backend", "magic"]).status.code(), Some(3));
}

#[test]
fn unresolvable_evaluation_is_a_resolution_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "ev.toml",
        "symbol = \"airy\"\ndata = [\"gaussian(1.5)\"]\nT = 10.0\nwindow = [-5.0, 5.0]\n",
    );
    let out = kato(&["evolve", "--config", &cfg, "--backend", "oversampled_fft"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unmet_thresholds_are_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "t.toml",
        "symbol = \"airy\"\nn_schedule = [8, 16, 32]\n[thresholds]\nbounded_ratio = 0.5\n",
    );
    let out = kato(&["thm1", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("INCONCLUSIVE"));
}

#[test]
fn csv_output_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "p.toml", "symbol = \"airy\"\nn_schedule = [8, 16]\nplot = true\n");
    let csv = dir.path().join("run.csv");
    let out = kato(&["thm1", "--config", &cfg, "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.starts_with("thm1,") && r.split(',').count() == CSV_COLUMNS.len()));
    // runtime_ms stays blank without --timing
    assert!(rows.iter().all(|r| r.ends_with(',')));
    let gp = std::fs::read_to_string(dir.path().join("run.gp")).unwrap();
    assert!(gp.contains("run.csv"));
}

#[test]
fn timing_and_seed_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "y.toml", "symbol = \"heat\"\nseeds = 2\nepsilon = 0.0\n");
    let a = kato(&["y1", "--config", &cfg, "--seed", "40", "--timing"]);
    assert_eq!(a.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&a.stdout);
    assert!(stdout.contains("random_bandlimited(40,") && stdout.contains("random_bandlimited(41,"));
    let csv_rows: Vec<&str> = stdout.lines().filter(|l| l.starts_with("\"y1/")).collect();
    assert_eq!(csv_rows.len(), 2);
    assert!(csv_rows.iter().all(|r| !r.ends_with(',')));
}

#[test]
fn evolve_dumps_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "e.toml", "symbol = \"heat\"\ndata = [\"gaussian(1.0)\"]\nwindow = [-2.0, 2.0]\n");
    let out = kato(&["evolve", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().next().unwrap(), "x,t,re,im,abs");
    assert!(text.lines().count() > 10);
}

#[test]
fn shipped_configs_validate() {
    use kato_lab::experiments::ExperimentConfig;
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.validate(cfg.kind.expect("shipped configs name their kind")).unwrap();
        seen += 1;
    }
    assert!(seen >= 5);
}
