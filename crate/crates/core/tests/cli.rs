use std::path::{Path, PathBuf};

use elecshock::cli::{run_from_args, LoadedConfig, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};
use elecshock::lp::parse_irf_csv;
use quick_xml::events::Event;
use quick_xml::Reader;

fn run(cmd: &str, config: &Path, out: &Path, seed: Option<u64>) -> i32 {
    let mut args = vec![
        "elecshock".to_string(),
        cmd.into(),
        "--config".into(),
        config.display().to_string(),
        "--out".into(),
        out.display().to_string(),
    ];
    if let Some(s) = seed {
        args.extend(["--seed".into(), s.to_string()]);
    }
    run_from_args(args)
}

fn write(path: &Path, text: &str) -> PathBuf {
    std::fs::write(path, text).unwrap();
    path.to_path_buf()
}

fn assert_well_formed(svg: &str) {
    let mut reader = Reader::from_str(svg);
    let mut depth = 0i32;
    let mut elements = 0;
    loop {
        match reader.read_event().expect("well-formed XML") {
            Event::Start(_) => {
                depth += 1;
                elements += 1;
            }
            Event::End(_) => depth -= 1,
            Event::Empty(_) => elements += 1,
            Event::Eof => break,
            _ => {}
        }
    }
    assert_eq!(depth, 0);
    assert!(elements > 5);
    assert!(!svg.contains("href") && !svg.contains("url("));
}

/// Simulates into `dir/data` and returns the generated run config.
fn simulated(dir: &Path) -> PathBuf {
    let sim = write(&dir.join("sim.toml"), "[simulate]\nn_cycles = 4\n");
    assert_eq!(run("simulate", &sim, &dir.join("data"), None), EXIT_OK);
    dir.join("data/run.toml")
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

#[test]
fn pipeline_outputs_are_valid_and_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = simulated(tmp.path());
    let text = std::fs::read_to_string(&cfg).unwrap();
    let text = text.replace("variants = [\"baseline\"]", "variants = [\"baseline\", \"narrative\", \"crude\", \"one_step\"]");
    std::fs::write(&cfg, text).unwrap();

    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        assert_eq!(run("shocks", &cfg, out, None), EXIT_OK);
        assert_eq!(run("irf", &cfg, out, None), EXIT_OK);
        assert_eq!(run("narrative", &cfg, out, None), EXIT_OK);
    }
    let names = files(&a);
    assert_eq!(names, files(&b));
    for n in &names {
        assert_eq!(std::fs::read(a.join(n)).unwrap(), std::fs::read(b.join(n)).unwrap(), "{n}");
    }

    let lc = LoadedConfig::load(&cfg, None).unwrap();
    for n in &names {
        let body = std::fs::read_to_string(a.join(n)).unwrap();
        assert!(body.contains(&lc.hash), "{n} lacks the config hash");
        if n.ends_with(".svg") {
            assert_well_formed(&body);
        } else if n.starts_with("irf_") {
            let rows = parse_irf_csv(&body, n).unwrap();
            assert_eq!(rows.len(), 66, "{n}");
            for r in rows {
                assert!(r.lo90 <= r.lo68 && r.lo68 <= r.hi68 && r.hi68 <= r.hi90, "{n}");
            }
        }
    }
    for v in ["baseline", "narrative5", "crude", "one_step"] {
        assert!(names.contains(&format!("irf_{v}_energy.svg")), "{v}");
    }

    // shock rows match the reported sample size
    let shocks = std::fs::read_to_string(a.join("shocks.csv")).unwrap();
    let rows = shocks.lines().filter(|l| !l.starts_with('#')).count() - 1;
    let summary = std::fs::read_to_string(a.join("fit_summary.csv")).unwrap();
    let n: usize = summary
        .lines()
        .find_map(|l| l.strip_prefix("observations,"))
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(rows, n);
    assert_eq!(n, 4 * 245);
}

#[test]
fn monthly_projection_runs_from_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = simulated(tmp.path());
    let data = tmp.path().join("data");
    let mut emp = String::from("month,industry,employment\n");
    let mut ctl = String::from("month,series,value\n");
    let (mut level, mut x) = (100.0f64, 0.0f64);
    for k in 0..120 {
        let (y, m) = (2000 + k / 12, k % 12 + 1);
        level *= 1.0 + 0.001 * ((k * 7 % 11) as f64 - 5.0) / 5.0;
        x = 0.5 * x + ((k * 13 % 7) as f64 - 3.0) / 10.0;
        emp.push_str(&format!("{y}-{m:02},mining_quarrying,{level}\n"));
        ctl.push_str(&format!("{y}-{m:02},d_ip,{x}\n"));
    }
    write(&data.join("employment.csv"), &emp);
    write(&data.join("controls.csv"), &ctl);
    let text = std::fs::read_to_string(&cfg).unwrap().replace(
        "[data]\n",
        "[data]\nemployment = \"employment.csv\"\nmonthly_controls = \"controls.csv\"\n",
    );
    let text = format!("{text}\n[monthly]\nindustries = [\"mining_quarrying\"]\ncontrols = [\"d_ip\"]\n[monthly.spec]\ncontrol_lags = 4\n");
    std::fs::write(&cfg, text).unwrap();
    let out = tmp.path().join("out");
    assert_eq!(run("irf", &cfg, &out, None), EXIT_OK);
    let body = std::fs::read_to_string(out.join("irf_monthly_mining_quarrying.csv")).unwrap();
    assert_eq!(parse_irf_csv(&body, "m").unwrap().len(), 13);
    assert_well_formed(&std::fs::read_to_string(out.join("irf_monthly_mining_quarrying.svg")).unwrap());
}

#[test]
fn validate_passes_and_catches_injected_fault() {
    let tmp = tempfile::tempdir().unwrap();
    let base = "[validate]\ncoverage_reps = 100\ncoverage_horizons = 5\nhac_problems = 20\nwls_problems = 20\n";
    let good = write(&tmp.path().join("good.toml"), base);
    assert_eq!(run("validate", &good, &tmp.path().join("g"), None), EXIT_OK);
    let report = std::fs::read_to_string(tmp.path().join("g/validate_report.csv")).unwrap();
    assert!(!report.contains(",fail,"));

    let bad = write(&tmp.path().join("bad.toml"), &format!("{base}bandwidth_off_by_one = true\n"));
    assert_eq!(run("validate", &bad, &tmp.path().join("b"), None), EXIT_FAILURE);
    let report = std::fs::read_to_string(tmp.path().join("b/validate_report.csv")).unwrap();
    assert!(report.contains("hac_oracle,fail,"));
    assert!(report.contains("wls_scaling,pass,"));
}

#[test]
fn usage_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let empty = write(&tmp.path().join("empty.toml"), "");
    assert_eq!(run("validate", &empty, &out, None), EXIT_USAGE);
    let unknown = write(&tmp.path().join("unknown.toml"), "[validate]\nbogus = 1\n");
    assert_eq!(run("validate", &unknown, &out, None), EXIT_USAGE);
    let no_section = write(&tmp.path().join("irf.toml"), "[validate]\n");
    assert_eq!(run("irf", &no_section, &out, None), EXIT_USAGE);
    assert_eq!(run("simulate", &no_section, &out, None), EXIT_USAGE);
    let missing = write(&tmp.path().join("missing.toml"), "[data]\nmarket = \"nope.csv\"\n[irf]\n");
    assert_eq!(run("shocks", &missing, &out, None), EXIT_USAGE);
    assert_eq!(run("shocks", &tmp.path().join("absent.toml"), &out, None), EXIT_USAGE);
    assert_eq!(run_from_args(["elecshock", "frobnicate"]), EXIT_USAGE);
    assert_eq!(run_from_args(["elecshock", "shocks", "--out", "x"]), EXIT_USAGE);
}

#[test]
fn inputs_are_never_overwritten() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = simulated(tmp.path());
    let data = tmp.path().join("data");
    let before: Vec<Vec<u8>> = files(&data).iter().map(|n| std::fs::read(data.join(n)).unwrap()).collect();
    // the generated config names market.csv etc. as inputs
    assert_eq!(run("simulate", &cfg, &data, Some(3)), EXIT_USAGE);
    let after: Vec<Vec<u8>> = files(&data).iter().map(|n| std::fs::read(data.join(n)).unwrap()).collect();
    assert_eq!(before, after);
}

#[test]
fn seed_override_changes_simulation_and_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = write(&tmp.path().join("sim.toml"), "[simulate]\nn_cycles = 2\n");
    assert_eq!(run("simulate", &sim, &tmp.path().join("a"), None), EXIT_OK);
    assert_eq!(run("simulate", &sim, &tmp.path().join("b"), Some(5)), EXIT_OK);
    let a = std::fs::read_to_string(tmp.path().join("a/true_shocks.csv")).unwrap();
    let b = std::fs::read_to_string(tmp.path().join("b/true_shocks.csv")).unwrap();
    assert_ne!(a.lines().nth(2), b.lines().nth(2));
    assert_ne!(a.lines().next(), b.lines().next());
}

#[test]
fn bundled_example_config_parses() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/example.toml");
    let lc = LoadedConfig::load(&path, None).unwrap();
    assert_eq!(lc.cycles().len(), 7);
    assert_eq!(lc.config.irf.unwrap().series.len(), 3);
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_elecshock");
    let status = std::process::Command::new(bin).arg("--version").output().unwrap();
    assert!(status.status.success());
    let tmp = tempfile::tempdir().unwrap();
    let empty = write(&tmp.path().join("e.toml"), "");
    let out = std::process::Command::new(bin)
        .args(["validate", "--config"])
        .arg(&empty)
        .arg("--out")
        .arg(tmp.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty"));
}
