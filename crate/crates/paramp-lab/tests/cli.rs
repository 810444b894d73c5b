//! Binary-level contract tests: exit codes, config overrides, seeding,
//! dataset round trips, and error reporting, all through the installed
//! `paramp-lab` executable.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_paramp-lab"));
    // Isolate from the ambient environment; the env hook gets its own test.
    c.env_remove("PARAMP_LAB_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn paramp-lab")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut c = bin();
    c.args(args).arg("--out").arg(dir);
    c.output().expect("spawn paramp-lab")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

/// Parse the report a `--json` run printed to stdout.
fn report_of(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).unwrap_or_else(|e| {
        panic!("stdout is not a JSON report ({e}); stdout:\n{}", stdout(out))
    })
}

fn report_in(dir: &Path) -> Value {
    let text = std::fs::read_to_string(dir.join("report.json")).expect("report.json");
    serde_json::from_str(&text).expect("report.json parses")
}

fn tmpdir() -> tempfile::TempDir {
    tempfile::tempdir().expect("tempdir")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

// ---------------------------------------------------------------------------
// usage and exit codes
// ---------------------------------------------------------------------------

#[test]
fn help_and_version_exit_zero() {
    let help = run(&["--help"]);
    assert_eq!(code(&help), 0);
    assert!(stdout(&help).contains("simulate"), "help lists subcommands");

    let version = run(&["--version"]);
    assert_eq!(code(&version), 0);
    assert!(stdout(&version).contains(env!("CARGO_PKG_VERSION")));

    for sub in ["simulate", "fit", "calibrate", "filter", "synth"] {
        assert_eq!(code(&run(&[sub, "--help"])), 0, "{sub} --help");
    }
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert_eq!(code(&run(&["simulate", "gain", "--no-such-flag"])), 64);
    assert_eq!(code(&run(&[])), 64, "missing subcommand is a usage error");
}

#[test]
fn unknown_set_key_is_rejected() {
    let out = run(&["simulate", "snr", "--quiet", "--set", "bogus.key=1"]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("unknown config key"), "stderr: {err}");
    assert!(err.contains("bogus"), "names the offending key: {err}");
    assert!(err.contains("t_hemt_k"), "lists known keys: {err}");
}

#[test]
fn malformed_set_syntax_is_rejected() {
    let out = run(&["simulate", "snr", "--quiet", "--set", "no_equals_sign"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("KEY=VALUE"), "stderr: {}", stderr(&out));
}

#[test]
fn half_specified_pump_is_rejected() {
    let out = run(&["simulate", "gain", "--quiet", "--f-pump-hz", "6.4e9"]);
    assert_eq!(code(&out), 2);
    assert!(
        stderr(&out).contains("both"),
        "explains the pairing rule: {}",
        stderr(&out)
    );
}

#[test]
fn synth_without_out_is_rejected() {
    let out = run(&["synth", "--kind", "s21", "--quiet"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--out"), "stderr: {}", stderr(&out));
}

#[test]
fn missing_input_file_is_an_io_error() {
    let out = run(&["fit", "s21", "--quiet", "--input", "/nonexistent/trace.csv"]);
    assert_eq!(code(&out), 2);
    assert!(
        stderr(&out).contains("/nonexistent/trace.csv"),
        "cites the path: {}",
        stderr(&out)
    );
}

// ---------------------------------------------------------------------------
// ingestion errors
// ---------------------------------------------------------------------------

#[test]
fn parse_error_cites_line_and_column() {
    let dir = tmpdir();
    let path = dir.path().join("bad.csv");
    let mut rows = vec!["freq_hz,re,im".to_string()];
    for i in 0..30 {
        rows.push(format!("{},0.9,0.1", 6.0e9 + 1e6 * i as f64));
    }
    rows[16] = "6.015e9,not_a_number,0.1".into(); // file line 17, column 2
    std::fs::write(&path, rows.join("\n") + "\n").unwrap();

    let out = run(&["fit", "s21", "--quiet", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("line 17"), "stderr: {err}");
    assert!(err.contains("column 2"), "stderr: {err}");
}

#[test]
fn header_only_csv_is_rejected() {
    let dir = tmpdir();
    let path = dir.path().join("empty.csv");
    std::fs::write(&path, "freq_hz,re,im\n").unwrap();
    let out = run(&["fit", "s21", "--quiet", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn short_trace_is_ingested_but_rejected_for_fitting() {
    let dir = tmpdir();
    let path = dir.path().join("short.csv");
    std::fs::write(
        &path,
        "freq_hz,re,im\n6.0e9,1.0,0.0\n6.1e9,0.5,0.1\n6.2e9,1.0,0.0\n",
    )
    .unwrap();
    // The reader itself accepts three rows…
    let trace = paramp_lab::io::read_complex_trace(&path).expect("reader accepts 3 rows");
    assert_eq!(trace.len(), 3);
    // …the fit front end refuses them with a clear count.
    let out = run(&["fit", "s21", "--quiet", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(
        stderr(&out).contains("at least 8"),
        "states the minimum: {}",
        stderr(&out)
    );
}

#[test]
fn featureless_trace_is_a_numerical_failure() {
    let dir = tmpdir();
    let path = dir.path().join("blob.csv");
    // Deterministic scatter around 1+0i with no dip anywhere.
    let mut rows = vec!["freq_hz,re,im".to_string()];
    let mut x = 0x2545F4914F6CDD1Du64;
    let mut noise = || {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    for i in 0..64 {
        rows.push(format!(
            "{},{:.9},{:.9}",
            6.0e9 + 1e6 * i as f64,
            1.0 + 2e-3 * noise(),
            2e-3 * noise()
        ));
    }
    std::fs::write(&path, rows.join("\n") + "\n").unwrap();
    let out = run(&["fit", "s21", "--quiet", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&out), 3, "stderr: {}", stderr(&out));
    assert!(
        stderr(&out).contains("no resonance"),
        "stderr: {}",
        stderr(&out)
    );
}

// ---------------------------------------------------------------------------
// overrides and seeding
// ---------------------------------------------------------------------------

#[test]
fn set_overrides_reach_the_physics() {
    let out = run(&["simulate", "snr", "--json", "--set", "t_hemt_k=8.8"]);
    assert_eq!(code(&out), 0);
    let report = report_of(&out);
    assert_eq!(report["config"]["t_hemt_k"], 8.8);
    // A hotter following amplifier leaves more SNR to reclaim.
    let asym = report["results"]["asymptote_db"].as_f64().unwrap();
    assert!(asym > 12.0, "asymptote at 8.8 K should exceed 12 dB, got {asym}");
}

#[test]
fn seed_env_variable_matches_flag() {
    let dir = tmpdir();
    let via_env = dir.path().join("env");
    let via_flag = dir.path().join("flag");
    let out = bin()
        .env("PARAMP_LAB_SEED", "29")
        .args(["synth", "--kind", "s21", "--quiet", "--out"])
        .arg(&via_env)
        .output()
        .expect("spawn");
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let out = run_in(&via_flag, &["synth", "--kind", "s21", "--seed", "29", "--quiet"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(
        std::fs::read(via_env.join("s21.csv")).unwrap(),
        std::fs::read(via_flag.join("s21.csv")).unwrap(),
        "env-provided and flag-provided seeds must agree"
    );
}

// ---------------------------------------------------------------------------
// filter subcommands
// ---------------------------------------------------------------------------

#[test]
fn canonical_filter_design_command_passes() {
    let dir = tmpdir();
    let out = run_in(
        dir.path(),
        &[
            "filter", "design", "--order", "5", "--ripple-db", "0.5", "--cutoff-ghz",
            "0.3", "--check", "4:8:50", "--quiet",
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let report = report_in(dir.path());
    assert_eq!(report["results"]["pass"], true);
    // The synthesized network itself is persisted (re-checked below).
    assert!(dir.path().join("filter_network.json").exists());
}

#[test]
fn filter_check_reloads_a_designed_network() {
    let dir = tmpdir();
    let design = run_in(
        dir.path(),
        &["filter", "design", "--order", "5", "--cutoff-ghz", "0.3", "--quiet"],
    );
    assert_eq!(code(&design), 0, "stderr: {}", stderr(&design));
    let net = dir.path().join("filter_network.json");

    let check_dir = tmpdir();
    let check = run_in(
        check_dir.path(),
        &[
            "filter",
            "check",
            "--input",
            net.to_str().unwrap(),
            "--check",
            "4:8:50",
            "--quiet",
        ],
    );
    assert_eq!(code(&check), 0, "stderr: {}", stderr(&check));
    assert_eq!(report_in(check_dir.path())["results"]["pass"], true);
}

#[test]
fn failing_filter_check_exits_2_but_still_reports() {
    let dir = tmpdir();
    let out = run_in(
        dir.path(),
        &[
            "filter", "design", "--order", "3", "--cutoff-ghz", "0.3", "--check",
            "4:8:100", "--quiet",
        ],
    );
    assert_eq!(code(&out), 2);
    let report = report_in(dir.path());
    assert_eq!(report["results"]["pass"], false);
    // The response curve is still written for diagnosis.
    assert!(dir.path().join("filter_response.csv").exists());
}

#[test]
fn malformed_check_spec_is_rejected() {
    for spec in ["4:8", "8:4:50", "4:8:-3", "a:b:c"] {
        let out = run(&["filter", "design", "--check", spec, "--quiet"]);
        assert_eq!(code(&out), 2, "spec {spec:?} must be rejected");
    }
}

// ---------------------------------------------------------------------------
// calibration subcommands
// ---------------------------------------------------------------------------

#[test]
fn photon_number_preset_matches_published_operating_point() {
    let out = run(&["calibrate", "photon-number", "--json"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let r = report_of(&out);
    let chi = r["results"]["chi_hz"].as_f64().unwrap();
    let c = r["results"]["c_photons_per_mw"].as_f64().unwrap();
    let p_out = r["results"]["cavity_output_dbm"].as_f64().unwrap();
    assert!(rel(chi, 1.33e6) < 1e-3, "chi = {chi}");
    assert!(rel(c, 5.65) < 1e-3, "c = {c}");
    assert!((p_out - (-138.09)).abs() <= 0.1, "cavity output {p_out} dBm");
}

#[test]
fn probe_chain_budget_sums_exactly() {
    let out = run(&["calibrate", "chain", "--preset", "probe", "--input-dbm", "-20", "--json"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let r = report_of(&out);
    assert_eq!(r["results"]["total_gain_db"].as_f64().unwrap(), -99.0);
    assert_eq!(r["results"]["output_dbm"].as_f64().unwrap(), -119.0);
    // The systematic band is surfaced, not hidden in a footnote.
    assert_eq!(r["results"]["systematic_uncertainty_db"].as_f64().unwrap(), 4.0);
}

#[test]
fn pump_chain_flags_room_amplifier_compression() {
    let out = run(&["calibrate", "chain", "--preset", "pump", "--input-dbm", "-1.2", "--json"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let r = report_of(&out);
    let stages = r["results"]["stages"].as_array().unwrap();
    let room = stages
        .iter()
        .find(|s| s["name"] == "room amplifier")
        .expect("room amplifier stage");
    assert_eq!(room["compressed"], true);
    let line = stages
        .iter()
        .find(|s| s["name"] == "pump line")
        .expect("pump line stage");
    let out_dbm = line["output_dbm"].as_f64().unwrap();
    assert!((out_dbm - (-80.1)).abs() < 1e-9, "device drive {out_dbm} dBm");
    let warnings = r["warnings"].as_array().unwrap();
    assert!(
        warnings.iter().any(|w| w.as_str().unwrap().contains("compress")),
        "warnings surface the compression: {warnings:?}"
    );
}

// ---------------------------------------------------------------------------
// synth → fit round trips
// ---------------------------------------------------------------------------

fn synth_noiseless(kind: &str, seed: &str) -> (tempfile::TempDir, Value) {
    let dir = tmpdir();
    let out = run_in(
        dir.path(),
        &["synth", "--kind", kind, "--noiseless", "--seed", seed, "--quiet"],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let report = report_in(dir.path());
    (dir, report)
}

#[test]
fn noiseless_s21_roundtrip_recovers_truth() {
    let (dir, report) = synth_noiseless("s21", "3");
    let truth = &report["results"]["truth"]["s21"];
    let input = dir.path().join("s21.csv");

    let out = run(&["fit", "s21", "--json", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let fit = &report_of(&out)["results"]["resonator"];
    for (key, tol) in [("f0_hz", 1e-9), ("q_total", 1e-6), ("q_c_mag", 1e-6)] {
        let got = fit[key].as_f64().unwrap();
        let want = truth[if key == "f0_hz" { "f0" } else { key }]
            .as_f64()
            .unwrap();
        assert!(
            rel(got, want) < tol,
            "{key}: fit {got} vs truth {want} (rel {:.2e})",
            rel(got, want)
        );
    }
}

#[test]
fn noiseless_kerr_roundtrip_recovers_truth() {
    let (dir, report) = synth_noiseless("kerr", "4");
    let truth = &report["results"]["truth"]["kerr"];
    let input = dir.path().join("kerr.csv");

    let out = run(&["fit", "kerr", "--json", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let r = report_of(&out);
    let k = r["results"]["kerr_hz_per_photon"].as_f64().unwrap();
    let f0 = r["results"]["f_r0_hz"].as_f64().unwrap();
    assert!(rel(k, truth["kerr_hz_per_photon"].as_f64().unwrap()) < 1e-9, "K = {k}");
    assert!(rel(f0, truth["f0_hz"].as_f64().unwrap()) < 1e-12, "f_r0 = {f0}");
}

#[test]
fn noiseless_gain_roundtrip_recovers_peak() {
    let (dir, report) = synth_noiseless("gain", "5");
    let truth_gain = report["results"]["truth"]["gain"]["achieved_gain_db"]
        .as_f64()
        .unwrap();
    let input = dir.path().join("gain.csv");

    let out = run(&["fit", "gain", "--json", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let r = report_of(&out);
    let peak = r["results"]["lorentzian"]["components"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["peak_gain_db"].as_f64().unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(
        (peak - truth_gain).abs() < 1.0,
        "fitted peak {peak:.2} dB vs generated {truth_gain:.2} dB"
    );
}

#[test]
fn every_synth_artifact_reingests_and_reports_name_only() {
    let dir = tmpdir();
    let out = run_in(dir.path(), &["synth", "--kind", "all", "--seed", "8", "--quiet"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let report = report_in(dir.path());
    let artifacts: Vec<String> = report["artifacts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a.as_str().unwrap().to_string())
        .collect();
    assert_eq!(
        artifacts,
        ["s21.csv", "gain.csv", "kerr.csv", "spectrum_off.csv", "spectrum_on.csv"]
    );
    for name in &artifacts {
        let path: PathBuf = dir.path().join(name);
        assert!(path.exists(), "{name} was reported but not written");
        match name.as_str() {
            "s21.csv" => {
                paramp_lab::io::read_complex_trace(&path).expect(name);
            }
            "gain.csv" => {
                paramp_lab::io::read_gain_trace(&path).expect(name);
            }
            "kerr.csv" => {
                let t = paramp_lab::io::read_table(&path).expect(name);
                assert!(t.column("n_photons").is_some() && t.column("f0_hz").is_some());
            }
            _ => {
                paramp_lab::io::read_spectrum(&path).expect(name);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// simulation outputs
// ---------------------------------------------------------------------------

#[test]
fn simulate_gain_emits_reingestable_profile() {
    let dir = tmpdir();
    let out = run_in(dir.path(), &["simulate", "gain", "--quiet"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let trace = paramp_lab::io::read_gain_trace(&dir.path().join("gain.csv")).unwrap();
    let peak = trace.gain_db.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!((peak - 20.0).abs() < 1.0, "peak {peak:.2} dB");
    let report = report_in(dir.path());
    let metrics = &report["results"]["metrics"];
    assert!(metrics["gain_bandwidth_hz"].as_f64().unwrap() > 1.0e8);
}

#[test]
fn simulate_compression_reports_p1db_near_published_value() {
    let out = run(&["simulate", "compression", "--json"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let r = report_of(&out);
    let p1db = r["results"]["p1db_input_dbm"].as_f64().unwrap();
    assert!(
        (-130.0..=-110.0).contains(&p1db),
        "P_1dB = {p1db:.2} dBm out of range"
    );
}

#[test]
fn plot_artifacts_are_svg_documents() {
    let dir = tmpdir();
    let out = run_in(dir.path(), &["simulate", "snr", "--plot", "--quiet"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let svg = std::fs::read_to_string(dir.path().join("snr.svg")).expect("snr.svg");
    assert!(svg.starts_with("<svg"), "svg root element");
    assert!(svg.trim_end().ends_with("</svg>"), "svg closes");
}
