use std::fs;
use std::process::Command;

use annealsim::metrics::error_sigma;
use annealsim::propagators::Method;
use annealsim::statevector::StateVector;
use annealsim_bench::config::{preset, ExperimentConfig};
use annealsim_bench::{run, write_outputs};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_annealsim"))
}

fn small_fig1() -> ExperimentConfig {
    let mut cfg = preset("fig1").unwrap();
    cfg.m_list = vec![8, 16, 32, 64, 128];
    cfg.sigma = vec!["all-up".into(), "all-down".into()];
    cfg
}

fn strip_wall_time(csv_text: &str) -> String {
    csv_text
        .lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_fig1();
    let a = write_outputs(&run(&cfg, Some(1)).unwrap(), &dir.path().join("a")).unwrap();
    let b = write_outputs(&run(&cfg, Some(4)).unwrap(), &dir.path().join("b")).unwrap();
    let read = |p: &std::path::Path| fs::read_to_string(p).unwrap();
    assert_eq!(
        strip_wall_time(&read(&a.results)),
        strip_wall_time(&read(&b.results))
    );
    assert_eq!(read(&a.slopes), read(&b.slopes));
    let ma: serde_json::Value = serde_json::from_str(&read(&a.manifest)).unwrap();
    let mb: serde_json::Value = serde_json::from_str(&read(&b.manifest)).unwrap();
    assert_eq!(ma["reference"], mb["reference"]);
}

#[test]
fn every_job_shares_one_reference() {
    let outcome = run(&small_fig1(), None).unwrap();
    let manifest = annealsim_bench::output::manifest_json(&outcome);
    let hash = manifest["reference"]["state_sha256"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    for job in manifest["jobs"].as_array().unwrap() {
        assert_eq!(job["reference_sha256"], hash);
    }
    let p0 = outcome.report.records[0].prob_reference;
    assert!(outcome
        .report
        .records
        .iter()
        .filter(|r| r.sigma == 0)
        .all(|r| r.prob_reference == p0));
}

#[test]
fn single_point_run_has_one_row() {
    let mut cfg = small_fig1();
    cfg.m_list = vec![16];
    cfg.methods = vec![Method::Discretized];
    cfg.sigma = vec!["all-up".into()];
    let dir = tempfile::tempdir().unwrap();
    let files = write_outputs(&run(&cfg, None).unwrap(), dir.path()).unwrap();
    let text = fs::read_to_string(files.results).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(
        lines[0],
        "method,M,sigma,prob_reference,prob_method,error_sigma,final_infidelity,parity,wall_time_ms"
    );
    assert!(lines[1].starts_with("discretized,16,all-up,"));
}

#[test]
fn csv_error_matches_stored_probabilities() {
    let cfg = small_fig1();
    let dir = tempfile::tempdir().unwrap();
    let files = write_outputs(&run(&cfg, None).unwrap(), dir.path()).unwrap();
    let mut rdr = csv::Reader::from_path(files.results).unwrap();
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let p_ref: f64 = rec[3].parse().unwrap();
        let p_met: f64 = rec[4].parse().unwrap();
        let e: f64 = rec[5].parse().unwrap();
        // two single-qubit states carrying exactly the stored probabilities
        let state = |p: f64| {
            StateVector::from_amplitudes(1, vec![p.sqrt().into(), (1.0 - p).max(0.0).sqrt().into()])
                .unwrap()
        };
        let recomputed = error_sigma(&state(p_ref), &state(p_met), 0).unwrap();
        assert!((recomputed - e).abs() <= 1e-15, "{recomputed} vs {e}");
        assert!((p_ref - p_met).abs() == e);
        rows += 1;
    }
    assert_eq!(rows, 3 * 5 * 2);
}

#[test]
fn trace_has_one_row_per_slice() {
    let mut cfg = preset("fig4").unwrap();
    cfg.m_list = vec![32, 64];
    let dir = tempfile::tempdir().unwrap();
    let files = write_outputs(&run(&cfg, None).unwrap(), dir.path()).unwrap();
    let text = fs::read_to_string(files.trace.unwrap()).unwrap();
    assert_eq!(text.lines().next().unwrap(), "method,M,m,t_m,infidelity");
    assert_eq!(text.lines().count(), 1 + 2 * (32 + 64));
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("trotterized,64,64,16.0,"), "{last}");
}

#[test]
fn cli_run_validate_and_presets() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "run",
            "--preset",
            "fig1",
            "--m-list",
            "8,16,32,64",
            "--methods",
            "trotterized",
        ])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("fig1.csv").exists());
    assert!(dir.path().join("fig1_slopes.csv").exists());
    assert!(dir.path().join("manifest.json").exists());

    let presets = bin().arg("presets").output().unwrap();
    let listing = String::from_utf8(presets.stdout).unwrap();
    assert_eq!(listing.lines().count(), 4);

    let good = dir.path().join("good.cfg");
    fs::write(&good, "preset = fig2\nm_list = 8, 16\n").unwrap();
    let out = bin()
        .arg("validate")
        .arg("--config")
        .arg(&good)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    fs::write(
        &bad,
        "n = 2\ncoupling = 0-1:1\ncatalyst_xx = 0-1:0.5\ncatalyst_y = 0.3\nm_list =\nwobble = 3\n",
    )
    .unwrap();
    let out = bin()
        .arg("validate")
        .arg("--config")
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("wobble"), "{err}");

    fs::write(
        &bad,
        "n = 2\ncoupling = 0-1:1\ncatalyst_xx = 0-1:0.5\ncatalyst_y = 0.3\nm_list =\n",
    )
    .unwrap();
    let out = bin()
        .arg("validate")
        .arg("--config")
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("catalyst_y") && err.contains("m_list"),
        "{err}"
    );

    let out = bin().args(["run", "--preset", "fig7"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["run", "--preset", "fig1", "--m-list", "16,8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validation_reports_catalyst_exclusion() {
    let mut cfg = preset("fig1").unwrap();
    cfg.n = 2;
    cfg.catalyst_xx = vec![(0, 1, 0.5)];
    cfg.catalyst_y = Some(0.2);
    let v = cfg.validate();
    assert_eq!(v.len(), 1, "{v:?}");
    assert_eq!(v[0].key, "catalyst_y");
    let mut empty = preset("fig1").unwrap();
    empty.m_list.clear();
    assert_eq!(empty.validate()[0].key, "m_list");
}

#[test]
fn custom_config_with_catalyst_runs() {
    let cfg = ExperimentConfig::parse(
        "name = cat\nn = 3\ncoupling = all-to-all\nj = 1\nh = 0.5\ncatalyst_z = 0.3, -0.2, 0.1\n\
         total_time = 8\nm_list = 16, 32, 64, 128, 256\nsigma = all-up\n",
    )
    .unwrap();
    let outcome = run(&cfg, None).unwrap();
    assert_eq!(outcome.report.records.len(), 15);
    for (m, _, fit) in outcome.fits() {
        let slope = fit.unwrap().fit.slope;
        assert!(slope < -0.5, "{m}: {slope}");
    }
}

#[test]
fn convergence_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tight.cfg");
    // even at the slice ceiling each slice is several time units wide
    fs::write(
        &cfg,
        "n = 1\ntotal_time = 1e7\nreference_tolerance = 1e-12\nm_list = 8,16\n",
    )
    .unwrap();
    let out = bin()
        .arg("run")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
