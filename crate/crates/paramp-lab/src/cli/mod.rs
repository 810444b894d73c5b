//! Command-line surface.
//!
//! One static binary with subcommand groups mirroring the library modules:
//!
//! - `simulate gain|sweep|compression|snr` — forward model runs;
//! - `fit s21|gain|kerr` — parameter extraction from CSV traces;
//! - `calibrate photon-number|chain` — power calibration and line budgets;
//! - `filter design|check` — gate-filter synthesis and verification;
//! - `synth` — seeded synthetic datasets for round-trip testing.
//!
//! Every command assembles a JSON-serializable configuration (defaults from
//! [`crate::presets`], then explicit flags, then repeatable
//! `--set dotted.path=value` overrides, which reject unknown keys), runs,
//! and emits one versioned JSON report plus CSV curves into `--out`;
//! `--plot` adds standalone SVG renderings. Identical configuration, seed
//! and inputs produce byte-identical artifacts, except for the report's
//! `meta` block, which carries the timestamp.
//!
//! Exit codes: 0 success (including `--check` passes), 2 validation or
//! input errors and failed checks, 3 numerical failures (non-convergence,
//! no resonance, search failures), 64 usage errors.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::calibration::{
    self, budget_table, chain_attenuation, dispersive_shift_calibration,
    friis_noise_temperature, measurement_dephasing, referred_power, AmplifierChain,
    TransmonCalibration,
};
use crate::constants::{dbm_to_watts, watts_to_dbm};
use crate::error::{Error, Result};
use crate::filter::{dielectric_sensitivity, response_grid, FilterDesign, LadderNetwork};
use crate::fit::{
    double_lorentzian_fit, kerr_slope_fit, lorentzian_model_value, reflection_s21,
    resonator_reflection_fit,
};
use crate::io::{self, ComplexTrace, GainTrace, Spectrum};
use crate::kerr::{
    bistability_threshold, compression_sweep, gain_profile, optimal_pump_search,
    pump_steady_states, quantum_limit_temperature, snr_improvement_asymptote_db,
    snr_improvement_db, KerrMode,
};
use crate::plot::{self, Series};
use crate::presets;
use crate::report::Report;
use crate::synth;

// ---------------------------------------------------------------------------
// Argument grammar
// ---------------------------------------------------------------------------

#[derive(Debug, Parser)]
#[command(
    name = "paramp-lab",
    version,
    about = "Simulation and analysis toolkit for gate-tunable kinetic-inductance parametric amplifiers",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Random seed for synthetic noise (fully determines stochastic output)
    #[arg(long, global = true, env = "PARAMP_LAB_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Directory receiving report.json and data artifacts
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Override a config field by dotted path, e.g. --set mode.kerr=-2.5e4
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,

    /// Also write standalone SVG plots of emitted curves (needs --out)
    #[arg(long, global = true)]
    pub plot: bool,

    /// Print the JSON report to stdout
    #[arg(long, global = true)]
    pub json: bool,

    /// Suppress the human-readable summary
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Forward-model simulations of the pumped Kerr amplifier
    Simulate {
        #[command(subcommand)]
        cmd: SimulateCmd,
    },
    /// Parameter extraction from measured or synthetic CSV traces
    Fit {
        #[command(subcommand)]
        cmd: FitCmd,
    },
    /// Photon-number calibration and amplification-chain budgets
    Calibrate {
        #[command(subcommand)]
        cmd: CalibrateCmd,
    },
    /// Gate-line Chebyshev filter synthesis and verification
    Filter {
        #[command(subcommand)]
        cmd: FilterCmd,
    },
    /// Generate seeded synthetic datasets for round-trip tests
    Synth(SynthArgs),
}

#[derive(Debug, Subcommand)]
pub enum SimulateCmd {
    /// Signal/idler gain profile at an operating point
    Gain(SimGainArgs),
    /// Peak gain versus pump power at the optimal pump frequency
    Sweep(SimSweepArgs),
    /// Gain versus signal power, with the 1 dB compression point
    Compression(SimCompressionArgs),
    /// SNR improvement over the following amplifier versus gain
    Snr(SimSnrArgs),
}

#[derive(Debug, Subcommand)]
pub enum FitCmd {
    /// Resonator reflection (circle) fit of a complex trace
    S21(FitInputArgs),
    /// Double-Lorentzian fit of a gain trace
    Gain(FitInputArgs),
    /// Kerr slope fit of resonance frequency versus photon number
    Kerr(FitInputArgs),
}

#[derive(Debug, Subcommand)]
pub enum CalibrateCmd {
    /// Transmon-based photon-number and cavity-output-power calibration
    PhotonNumber(CalPhotonArgs),
    /// Attenuation, compression and Friis noise budget of a chain
    Chain(CalChainArgs),
}

#[derive(Debug, Subcommand)]
pub enum FilterCmd {
    /// Synthesize a Chebyshev low-pass ladder (optionally --check it)
    Design(FilterDesignArgs),
    /// Check a ladder network loaded from JSON against a stop-band spec
    Check(FilterCheckArgs),
}

#[derive(Debug, Args)]
pub struct SimGainArgs {
    /// Target peak gain for the automatic pump search [dB]
    #[arg(long)]
    pub target_gain_db: Option<f64>,
    /// Explicit pump frequency [Hz] (needs --pump-power-dbm)
    #[arg(long)]
    pub f_pump_hz: Option<f64>,
    /// Explicit pump power at the device port [dBm] (needs --f-pump-hz)
    #[arg(long)]
    pub pump_power_dbm: Option<f64>,
    /// Signal span centered on the pump [Hz]
    #[arg(long)]
    pub span_hz: Option<f64>,
    /// Number of frequency points
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimSweepArgs {
    /// Target gain anchoring the pump frequency and power scale [dB]
    #[arg(long)]
    pub target_gain_db: Option<f64>,
    /// Sweep start relative to the operating pump power [dB]
    #[arg(long)]
    pub rel_lo_db: Option<f64>,
    /// Sweep end relative to the operating pump power [dB]
    #[arg(long)]
    pub rel_hi_db: Option<f64>,
    /// Number of pump powers
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimCompressionArgs {
    /// Target small-signal gain [dB]
    #[arg(long)]
    pub target_gain_db: Option<f64>,
    /// Lowest signal power [dBm]
    #[arg(long)]
    pub p_lo_dbm: Option<f64>,
    /// Highest signal power [dBm]
    #[arg(long)]
    pub p_hi_dbm: Option<f64>,
    /// Number of signal powers
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimSnrArgs {
    /// Noise temperature of the following amplifier [K]
    #[arg(long)]
    pub t_hemt_k: Option<f64>,
    /// Signal frequency [Hz]
    #[arg(long)]
    pub f_hz: Option<f64>,
    /// Highest gain on the curve [dB]
    #[arg(long)]
    pub gain_hi_db: Option<f64>,
    /// Number of gain points
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FitInputArgs {
    /// Input CSV trace
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct CalPhotonArgs {
    /// Generator power to calibrate [dBm]
    #[arg(long)]
    pub p_generator_dbm: Option<f64>,
    /// Measured qubit-frequency-shift slope [Hz/mW]
    #[arg(long)]
    pub slope_delta_fq: Option<f64>,
    /// Measured dephasing-rate slope [Hz/mW]
    #[arg(long)]
    pub slope_gamma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CalChainArgs {
    /// Chain description as JSON (defaults to the built-in pump chain)
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Built-in chain preset
    #[arg(long, value_enum)]
    pub preset: Option<ChainPreset>,
    /// Power injected at the chain input [dBm]
    #[arg(long)]
    pub input_dbm: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainPreset {
    /// Pump line into the device plus cryogenic and room amplifiers
    Pump,
    /// Five-segment probe input line
    Probe,
}

#[derive(Debug, Args)]
pub struct FilterDesignArgs {
    /// Filter order (number of reactive elements)
    #[arg(long)]
    pub order: Option<usize>,
    /// Passband ripple [dB]
    #[arg(long)]
    pub ripple_db: Option<f64>,
    /// Low-pass cutoff [GHz]
    #[arg(long)]
    pub cutoff_ghz: Option<f64>,
    /// Termination impedance [ohm]
    #[arg(long)]
    pub z0: Option<f64>,
    /// Stop-band check as LO:HI:DB in GHz,GHz,dB (e.g. 4:8:50)
    #[arg(long, value_name = "LO:HI:DB")]
    pub check: Option<String>,
    /// Fractional dielectric-thickness tolerance for the check
    #[arg(long)]
    pub dielectric_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FilterCheckArgs {
    /// Ladder network as JSON
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Stop-band check as LO:HI:DB in GHz,GHz,dB
    #[arg(long, value_name = "LO:HI:DB", default_value = "4:8:50")]
    pub check: String,
    /// Fractional dielectric-thickness tolerance
    #[arg(long)]
    pub dielectric_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Which dataset(s) to generate
    #[arg(long, value_enum, default_value_t = SynthKind::All)]
    pub kind: SynthKind,
    /// Generate noise-free datasets (exact forward-model output)
    #[arg(long)]
    pub noiseless: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthKind {
    All,
    S21,
    Gain,
    Kerr,
    Spectra,
}

// ---------------------------------------------------------------------------
// Configurations (defaults -> flags -> --set overrides)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateGainConfig {
    pub mode: KerrMode,
    pub target_gain_db: f64,
    pub f_pump_hz: Option<f64>,
    pub pump_power_dbm: Option<f64>,
    pub span_hz: f64,
    pub n_points: usize,
}

impl Default for SimulateGainConfig {
    fn default() -> Self {
        SimulateGainConfig {
            mode: presets::amplifier_mode(),
            target_gain_db: 20.0,
            f_pump_hz: None,
            pump_power_dbm: None,
            span_hz: 8e8,
            n_points: 801,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSweepConfig {
    pub mode: KerrMode,
    pub target_gain_db: f64,
    pub rel_lo_db: f64,
    pub rel_hi_db: f64,
    pub n_powers: usize,
    pub profile_span_hz: f64,
    pub profile_points: usize,
}

impl Default for SimulateSweepConfig {
    fn default() -> Self {
        SimulateSweepConfig {
            mode: presets::amplifier_mode(),
            target_gain_db: 20.0,
            rel_lo_db: -10.0,
            rel_hi_db: 0.4,
            n_powers: 53,
            profile_span_hz: 8e8,
            profile_points: 401,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateCompressionConfig {
    pub mode: KerrMode,
    pub target_gain_db: f64,
    pub p_lo_dbm: f64,
    pub p_hi_dbm: f64,
    pub n_points: usize,
}

impl Default for SimulateCompressionConfig {
    fn default() -> Self {
        SimulateCompressionConfig {
            mode: presets::amplifier_mode(),
            target_gain_db: 20.0,
            p_lo_dbm: -150.0,
            p_hi_dbm: -105.0,
            n_points: 46,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSnrConfig {
    pub t_hemt_k: f64,
    pub f_hz: f64,
    pub gain_lo_db: f64,
    pub gain_hi_db: f64,
    pub n_points: usize,
}

impl Default for SimulateSnrConfig {
    fn default() -> Self {
        SimulateSnrConfig {
            t_hemt_k: 2.2,
            f_hz: 6.3139e9,
            gain_lo_db: 0.0,
            gain_hi_db: 30.0,
            n_points: 121,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitInputConfig {
    pub input: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhotonCalibrationConfig {
    pub cal: TransmonCalibration,
    pub p_generator_dbm: f64,
    /// Measured slope of the qubit frequency shift [Hz/mW]; when absent it
    /// is reconstructed from `cal` (2 chi c).
    pub slope_delta_fq_hz_per_mw: Option<f64>,
    /// Measured slope of the dephasing rate [Hz/mW]; when absent it is
    /// reconstructed from `cal` (8 chi^2 c / kappa).
    pub slope_gamma_hz_per_mw: Option<f64>,
}

impl Default for PhotonCalibrationConfig {
    fn default() -> Self {
        PhotonCalibrationConfig {
            cal: presets::transmon_calibration(),
            p_generator_dbm: -20.0,
            slope_delta_fq_hz_per_mw: None,
            slope_gamma_hz_per_mw: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainBudgetConfig {
    pub chain: AmplifierChain,
    pub input_dbm: f64,
}

impl Default for ChainBudgetConfig {
    fn default() -> Self {
        ChainBudgetConfig {
            chain: presets::pump_line_chain(),
            input_dbm: -1.2,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckBand {
    pub f_lo_ghz: f64,
    pub f_hi_ghz: f64,
    pub threshold_db: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilterDesignConfig {
    pub design: FilterDesign,
    pub check: Option<CheckBand>,
    pub dielectric_tolerance: f64,
    pub response_f_lo_hz: f64,
    pub response_f_hi_hz: f64,
    pub response_points: usize,
}

impl Default for FilterDesignConfig {
    fn default() -> Self {
        FilterDesignConfig {
            design: FilterDesign::default(),
            check: None,
            dielectric_tolerance: 0.2,
            response_f_lo_hz: 1e7,
            response_f_hi_hz: 10e9,
            response_points: 1001,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthGainConfig {
    pub mode: KerrMode,
    pub target_gain_db: f64,
    pub span_hz: f64,
    pub n_points: usize,
    pub sigma_db: f64,
}

impl Default for SynthGainConfig {
    fn default() -> Self {
        SynthGainConfig {
            mode: presets::amplifier_mode(),
            target_gain_db: 20.0,
            span_hz: 8e8,
            n_points: 801,
            sigma_db: 0.05,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthKerrConfig {
    pub f0_hz: f64,
    pub kerr_hz_per_photon: f64,
    pub n_max: f64,
    pub n_points: usize,
    pub sigma_hz: f64,
}

impl Default for SynthKerrConfig {
    fn default() -> Self {
        SynthKerrConfig {
            f0_hz: 6.4e9,
            kerr_hz_per_photon: -20e3,
            n_max: 2000.0,
            n_points: 40,
            sigma_hz: 5e3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthSpectraConfig {
    pub f_center_hz: f64,
    pub span_hz: f64,
    pub n_points: usize,
    pub tone_offset_hz: f64,
    pub tone_dbm: f64,
    pub floor_dbm: f64,
    pub gain_db: f64,
    pub delta_snr_db: f64,
    pub sigma_db: f64,
}

impl Default for SynthSpectraConfig {
    fn default() -> Self {
        SynthSpectraConfig {
            f_center_hz: 6.3139e9,
            span_hz: 2e6,
            n_points: 801,
            tone_offset_hz: 0.0,
            tone_dbm: -60.0,
            floor_dbm: -90.0,
            gain_db: 15.0,
            delta_snr_db: 7.0,
            sigma_db: 0.05,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub kind: SynthKind,
    pub reflection: synth::ReflectionScenario,
    pub gain: SynthGainConfig,
    pub kerr: SynthKerrConfig,
    pub spectra: SynthSpectraConfig,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            kind: SynthKind::All,
            reflection: synth::ReflectionScenario::default(),
            gain: SynthGainConfig::default(),
            kerr: SynthKerrConfig::default(),
            spectra: SynthSpectraConfig::default(),
        }
    }
}

// ---------------------------------------------------------------------------
// --set override machinery
// ---------------------------------------------------------------------------

/// Parse an override value: valid JSON is taken as-is (numbers, booleans,
/// null, arrays, quoted strings); anything else becomes a plain string.
fn parse_override_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

/// Set one dotted-path key in a JSON object tree. Paths must address keys
/// that already exist; unknown keys are rejected so typos cannot silently
/// leave a default in force.
fn set_dotted_path(root: &mut Value, path: &str, raw: &str) -> Result<()> {
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::InvalidArgument(format!(
            "malformed config path {path:?}"
        )));
    }
    let mut cursor = root;
    for (i, key) in parts.iter().enumerate() {
        let obj = cursor.as_object_mut().ok_or_else(|| {
            Error::InvalidArgument(format!(
                "config path `{}` does not address an object",
                parts[..i].join(".")
            ))
        })?;
        if !obj.contains_key(*key) {
            let known: Vec<&String> = obj.keys().collect();
            return Err(Error::InvalidArgument(format!(
                "unknown config key `{path}` (at `{key}`; known keys: {known:?})"
            )));
        }
        cursor = obj.get_mut(*key).expect("key checked above");
        if i == parts.len() - 1 {
            *cursor = parse_override_value(raw);
        }
    }
    Ok(())
}

/// Apply `--set key=value` overrides to a serializable config.
pub fn apply_overrides<T>(config: T, sets: &[String]) -> Result<T>
where
    T: Serialize + DeserializeOwned,
{
    if sets.is_empty() {
        return Ok(config);
    }
    let mut value = serde_json::to_value(&config)?;
    for s in sets {
        let (path, raw) = s.split_once('=').ok_or_else(|| {
            Error::InvalidArgument(format!("--set expects KEY=VALUE, got {s:?}"))
        })?;
        set_dotted_path(&mut value, path.trim(), raw)?;
    }
    serde_json::from_value(value)
        .map_err(|e| Error::Validation(format!("override produced an invalid config: {e}")))
}

// ---------------------------------------------------------------------------
// Trace ingestion
// ---------------------------------------------------------------------------

/// CSV trace kinds the tool ingests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TraceKind {
    Complex,
    Gain,
    Spectrum,
}

/// A parsed, validated input trace.
#[derive(Debug, Clone)]
pub enum IngestedTrace {
    Complex(ComplexTrace),
    Gain(GainTrace),
    Spectrum(Spectrum),
}

/// Read and validate a CSV trace of the given kind. Malformed cells are
/// reported with 1-based line and column; non-monotone frequency axes are
/// validation errors.
pub fn ingest_trace(path: &Path, kind: TraceKind) -> Result<IngestedTrace> {
    Ok(match kind {
        TraceKind::Complex => IngestedTrace::Complex(io::read_complex_trace(path)?),
        TraceKind::Gain => IngestedTrace::Gain(io::read_gain_trace(path)?),
        TraceKind::Spectrum => IngestedTrace::Spectrum(io::read_spectrum(path)?),
    })
}

// ---------------------------------------------------------------------------
// Execution context and entry point
// ---------------------------------------------------------------------------

struct Ctx {
    seed: u64,
    out: Option<PathBuf>,
    plot: bool,
    sets: Vec<String>,
}

impl Ctx {
    fn artifact(&self, name: &str) -> Option<PathBuf> {
        self.out.as_ref().map(|d| d.join(name))
    }

    fn write_csv(
        &self,
        report: &mut Report,
        name: &str,
        columns: &[&str],
        data: &[&[f64]],
    ) -> Result<()> {
        if let Some(path) = self.artifact(name) {
            io::write_atomic(&path, &io::table_to_csv(columns, data)?)?;
            report.push_artifact(&path);
        }
        Ok(())
    }

    fn write_plot(
        &self,
        report: &mut Report,
        name: &str,
        title: &str,
        x_label: &str,
        y_label: &str,
        series: &[Series],
    ) -> Result<()> {
        if !self.plot {
            return Ok(());
        }
        if let Some(path) = self.artifact(name) {
            plot::write_line_plot(&path, title, x_label, y_label, series)?;
            report.push_artifact(&path);
        }
        Ok(())
    }
}

/// A completed command: the report plus the process exit code (0 for
/// success, 2 when a requested check failed).
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

/// Parse argv and run; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    64
                }
            };
        }
    };
    let quiet = cli.quiet;
    let json = cli.json;
    let out = cli.out.clone();
    match execute(cli) {
        Ok(outcome) => {
            if let Some(dir) = &out {
                let path = dir.join("report.json");
                if let Err(e) = outcome.report.write(&path) {
                    eprintln!("error: {e}");
                    return e.exit_code();
                }
            }
            if json {
                match outcome.report.to_json() {
                    Ok(s) => print!("{s}"),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return e.exit_code();
                    }
                }
            } else if !quiet {
                print_summary(&outcome.report, out.as_deref(), outcome.exit_code);
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Dispatch a parsed command line.
pub fn execute(cli: Cli) -> Result<Outcome> {
    let ctx = Ctx {
        seed: cli.seed,
        out: cli.out,
        plot: cli.plot,
        sets: cli.set,
    };
    match cli.command {
        Command::Simulate { cmd } => match cmd {
            SimulateCmd::Gain(a) => simulate_gain(a, &ctx),
            SimulateCmd::Sweep(a) => simulate_sweep(a, &ctx),
            SimulateCmd::Compression(a) => simulate_compression(a, &ctx),
            SimulateCmd::Snr(a) => simulate_snr(a, &ctx),
        },
        Command::Fit { cmd } => match cmd {
            FitCmd::S21(a) => fit_s21(a, &ctx),
            FitCmd::Gain(a) => fit_gain(a, &ctx),
            FitCmd::Kerr(a) => fit_kerr(a, &ctx),
        },
        Command::Calibrate { cmd } => match cmd {
            CalibrateCmd::PhotonNumber(a) => calibrate_photon_number(a, &ctx),
            CalibrateCmd::Chain(a) => calibrate_chain(a, &ctx),
        },
        Command::Filter { cmd } => match cmd {
            FilterCmd::Design(a) => filter_design(a, &ctx),
            FilterCmd::Check(a) => filter_check(a, &ctx),
        },
        Command::Synth(a) => synth_cmd(a, &ctx),
    }
}

fn print_summary(report: &Report, out: Option<&Path>, exit_code: i32) {
    println!("{}", report.command);
    for (k, v) in &report.results {
        match v {
            Value::String(s) if s.contains('\n') => {
                println!("  {k}:");
                for line in s.lines() {
                    println!("    {line}");
                }
            }
            _ => println!(
                "  {k} = {}",
                serde_json::to_string(v).unwrap_or_else(|_| "?".into())
            ),
        }
    }
    for w in &report.warnings {
        println!("  warning: {w}");
    }
    // Artifacts are recorded by file name; resolve against the output
    // directory for display.
    for a in &report.artifacts {
        match out {
            Some(dir) => println!("  wrote {}", dir.join(a).display()),
            None => println!("  wrote {a}"),
        }
    }
    if exit_code != 0 {
        println!("  FAIL");
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn simulate_gain(args: SimGainArgs, ctx: &Ctx) -> Result<Outcome> {
    let mut cfg = SimulateGainConfig::default();
    if let Some(v) = args.target_gain_db {
        cfg.target_gain_db = v;
    }
    if args.f_pump_hz.is_some() {
        cfg.f_pump_hz = args.f_pump_hz;
    }
    if args.pump_power_dbm.is_some() {
        cfg.pump_power_dbm = args.pump_power_dbm;
    }
    if let Some(v) = args.span_hz {
        cfg.span_hz = v;
    }
    if let Some(v) = args.points {
        cfg.n_points = v;
    }
    let cfg = apply_overrides(cfg, &ctx.sets)?;

    let mut report = Report::new("simulate gain", ctx.seed);
    report.set_config(&cfg)?;

    let (f_pump, p_pump_watts) = match (cfg.f_pump_hz, cfg.pump_power_dbm) {
        (Some(f), Some(p)) => (f, dbm_to_watts(p)),
        (None, None) => {
            let op = optimal_pump_search(&cfg.mode, cfg.target_gain_db)?;
            (op.f_pump, op.pump_power_watts)
        }
        _ => {
            return Err(Error::InvalidArgument(
                "provide both f_pump_hz and pump_power_dbm, or neither".into(),
            ))
        }
    };
    let pump = pump_steady_states(&cfg.mode, f_pump, p_pump_watts)?;
    let branch = pump
        .lowest_stable()
        .ok_or(Error::UnstableBranch { branch: 0 })?;
    let profile = gain_profile(
        &cfg.mode,
        &pump,
        branch,
        f_pump - cfg.span_hz / 2.0,
        f_pump + cfg.span_hz / 2.0,
        cfg.n_points,
    )?;

    let gain_db: Vec<f64> = (0..profile.freq_hz.len())
        .map(|i| profile.gain_db(i))
        .collect();
    let idler_db: Vec<f64> = profile
        .g_idler
        .iter()
        .map(|g| 10.0 * g.norm_sqr().log10())
        .collect();

    report.push_result("f_pump_hz", f_pump)?;
    report.push_result("pump_power_dbm", watts_to_dbm(p_pump_watts))?;
    report.push_result("n_pump", pump.branches[branch].n_photons)?;
    report.push_result("branch", branch)?;
    report.push_result("metrics", &profile.metrics)?;
    if profile.metrics.peak_on_boundary {
        report.push_warning("gain peak sits on the grid boundary; widen span_hz");
    }

    ctx.write_csv(
        &mut report,
        "gain.csv",
        &["freq_hz", "gain_db", "idler_gain_db"],
        &[&profile.freq_hz, &gain_db, &idler_db],
    )?;
    let series = vec![
        Series::new(
            "signal",
            profile.freq_hz.iter().copied().zip(gain_db).collect(),
        ),
        Series::new(
            "idler",
            profile.freq_hz.iter().copied().zip(idler_db).collect(),
        ),
    ];
    ctx.write_plot(
        &mut report,
        "gain.svg",
        "Gain profile",
        "frequency (Hz)",
        "gain (dB)",
        &series,
    )?;
    Ok(Outcome {
        report,
        exit_code: 0,
    })
}

fn simulate_sweep(args: SimSweepArgs, ctx: &Ctx) -> Result<Outcome> {
    let mut cfg = SimulateSweepConfig::default();
    if let Some(v) = args.target_gain_db {
        cfg.target_gain_db = v;
    }
    if let Some(v) = args.rel_lo_db {
        cfg.rel_lo_db = v;
    }
    if let Some(v) = args.rel_hi_db {
        cfg.rel_hi_db = v;
    }
    if let Some(v) = args.points {
        cfg.n_powers = v;
    }
    let cfg = apply_overrides(cfg, &ctx.sets)?;
    if cfg.n_powers < 2 || !(cfg.rel_lo_db < cfg.rel_hi_db) {
        return Err(Error::InvalidArgument(
            "sweep needs rel_lo_db < rel_hi_db and at least 2 powers".into(),
        ));
    }

    let mut report = Report::new("simulate sweep", ctx.seed);
    report.set_config(&cfg)?;

    let op = optimal_pump_search(&cfg.mode, cfg.target_gain_db)?;
    let threshold = bistability_threshold(&cfg.mode)?;
    report.push_result("f_pump_hz", op.f_pump)?;
    report.push_result("operating_power_dbm", watts_to_dbm(op.pump_power_watts))?;
    report.push_result("critical_power_dbm", watts_to_dbm(threshold.critical_power_watts))?;
    report.push_result("delta_crit_hz", threshold.delta_crit)?;
    report.push_result("n_crit", threshold.n_crit)?;

    let mut p_dbm = Vec::with_capacity(cfg.n_powers);
    let mut peak_db = Vec::with_capacity(cfg.n_powers);
    let mut n_pump = Vec::with_capacity(cfg.n_powers);
    let mut skipped = 0usize;
    for i in 0..cfg.n_powers {
        let rel = cfg.rel_lo_db
            + (cfg.rel_hi_db - cfg.rel_lo_db) * i as f64 / (cfg.n_powers - 1) as f64;
        let p = op.pump_power_watts * 10f64.powf(rel / 10.0);
        let pump = pump_steady_states(&cfg.mode, op.f_pump, p)?;
        let Some(branch) = pump.lowest_stable() else {
            skipped += 1;
            continue;
        };
        let profile = gain_profile(
            &cfg.mode,
            &pump,
            branch,
            op.f_pump - cfg.profile_span_hz / 2.0,
            op.f_pump + cfg.profile_span_hz / 2.0,
            cfg.profile_points,
        )?;
        p_dbm.push(watts_to_dbm(p));
        peak_db.push(profile.metrics.peak_gain_db);
        n_pump.push(pump.branches[branch].n_photons);
    }
    if skipped > 0 {
        report.push_warning(format!("{skipped} pump powers had no stable branch"));
    }
    let reach = p_dbm
        .iter()
        .zip(&peak_db)
        .find(|(_, g)| **g >= cfg.target_gain_db);
    if let Some((p, _)) = reach {
        report.push_result("p_pump_for_target_dbm", *p)?;
    } else {
        report.push_warning("sweep never reached the target gain");
    }

    ctx.write_csv(
        &mut report,
        "sweep.csv",
        &["p_pump_dbm", "peak_gain_db", "n_pump"],
        &[&p_dbm, &peak_db, &n_pump],
    )?;
    ctx.write_plot(
        &mut report,
        "sweep.svg",
        "Peak gain vs pump power",
        "pump power (dBm)",
        "peak gain (dB)",
        &[Series::new(
            "peak gain",
            p_dbm.iter().copied().zip(peak_db).collect(),
        )],
    )?;
    Ok(Outcome {
        report,
        exit_code: 0,
    })
}

fn simulate_compression(args: SimCompressionArgs, ctx: &Ctx) -> Result<Outcome> {
    let mut cfg = SimulateCompressionConfig::default();
    if let Some(v) = args.target_gain_db {
        cfg.target_gain_db = v;
    }
    if let Some(v) = args.p_lo_dbm {
        cfg.p_lo_dbm = v;
    }
    if let Some(v) = args.p_hi_dbm {
        cfg.p_hi_dbm = v;
    }
    if let Some(v) = args.points {
        cfg.n_points = v;
    }
    let cfg = apply_overrides(cfg, &ctx.sets)?;
    if cfg.n_points < 2 || !(cfg.p_lo_dbm < cfg.p_hi_dbm) {
        return Err(Error::InvalidArgument(
            "compression sweep needs p_lo_dbm < p_hi_dbm and at least 2 points".into(),
        ));
    }

    let mut report = Report::new("simulate compression", ctx.seed);
    report.set_config(&cfg)?;

    let op = optimal_pump_search(&cfg.mode, cfg.target_gain_db)?;
    let powers: Vec<f64> = (0..cfg.n_points)
        .map(|i| {
            dbm_to_watts(
                cfg.p_lo_dbm
                    + (cfg.p_hi_dbm - cfg.p_lo_dbm) * i as f64 / (cfg.n_points - 1) as f64,
            )
        })
        .collect();
    let sweep = compression_sweep(&cfg.mode, &op, &powers)?;

    report.push_result("f_pump_hz", op.f_pump)?;
    report.push_result("pump_power_dbm", watts_to_dbm(op.pump_power_watts))?;
    report.push_result("f_signal_hz", sweep.f_signal)?;
    report.push_result("small_signal_gain_db", sweep.small_signal_gain_db)?;
    match sweep.p1db_input_watts {
        Some(w) => report.push_result("p1db_input_dbm", watts_to_dbm(w))?,
        None => report.push_warning("sweep never crossed 1 dB of compression; raise p_hi_dbm"),
    }

    let p_in_dbm: Vec<f64> = sweep
        .points
        .iter()
        .map(|p| watts_to_dbm(p.p_signal_watts))
        .collect();
    let gain_db: Vec<f64> = sweep.points.iter().map(|p| p.gain_db).collect();
    let n_pump: Vec<f64> = sweep.points.iter().map(|p| p.n_pump).collect();
    let n_signal: Vec<f64> = sweep.points.iter().map(|p| p.n_signal).collect();
    ctx.write_csv(
        &mut report,
        "compression.csv",
        &["p_in_dbm", "gain_db", "n_pump", "n_signal"],
        &[&p_in_dbm, &gain_db, &n_pump, &n_signal],
    )?;
    ctx.write_plot(
        &mut report,
        "compression.svg",
        "Gain compression",
        "signal power (dBm)",
        "gain (dB)",
        &[Series::new(
            "gain",
            p_in_dbm.iter().copied().zip(gain_db).collect(),
        )],
    )?;
    Ok(Outcome {
        report,
        exit_code: 0,
    })
}

fn simulate_snr(args: SimSnrArgs, ctx: &Ctx) -> Result<Outcome> {
    let mut cfg = SimulateSnrConfig::default();
    if let Some(v) = args.t_hemt_k {
        cfg.t_hemt_k = v;
    }
    if let Some(v) = args.f_hz {
        cfg.f_hz = v;
    }
    if let Some(v) = args.gain_hi_db {
        cfg.gain_hi_db = v;
    }
    if let Some(v) = args.points {
        cfg.n_points = v;
    }
    let cfg = apply_overrides(cfg, &ctx.sets)?;
    if cfg.n_points < 2 || !(cfg.gain_lo_db < cfg.gain_hi_db) {
        return Err(Error::InvalidArgument(
            "SNR curve needs gain_lo_db < gain_hi_db and at least 2 points".into(),
        ));
    }

    let mut report = Report::new("simulate snr", ctx.seed);
    report.set_config(&cfg)?;

    let t_ql = quantum_limit_temperature(cfg.f_hz)?;
    let asymptote = snr_improvement_asymptote_db(cfg.t_hemt_k, cfg.f_hz)?;
    report.push_result("quantum_limit_temperature_k", t_ql)?;
    report.push_result("asymptote_db", asymptote)?;

    let mut gain_db = Vec::with_capacity(cfg.n_points);
    let mut delta_snr = Vec::with_capacity(cfg.n_points);
    for i in 0..cfg.n_points {
        let g = cfg.gain_lo_db
            + (cfg.gain_hi_db - cfg.gain_lo_db) * i as f64 / (cfg.n_points - 1) as f64;
        gain_db.push(g);
        delta_snr.push(snr_improvement_db(
            10f64.powf(g / 10.0),
            cfg.t_hemt_k,
            cfg.f_hz,
        )?);
    }
    let at_20 = snr_improvement_db(100.0, cfg.t_hemt_k, cfg.f_hz)?;
    report.push_result("delta_snr_at_20db", at_20)?;

    ctx.write_csv(
        &mut report,
        "snr.csv",
        &["gain_db", "delta_snr_db"],
        &[&gain_db, &delta_snr],
    )?;
    ctx.write_plot(
        &mut report,
        "snr.svg",
        "SNR improvement vs gain",
        "gain (dB)",
        "delta SNR (dB)",
        &[Series::new(
            "delta SNR",
            gain_db.iter().copied().zip(delta_snr).collect(),
        )],
    )?;
    Ok(Outcome {
        report,
        exit_code: 0,
    })
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

fn fit_s21(args: FitInputArgs, ctx: &Ctx) -> Result<Outcome> {
    let cfg = apply_overrides(FitInputConfig { input: args.input }, &ctx.sets)?;
    let mut report = Report::new("fit s21", ctx.seed);
    report.set_config(&cfg)?;

    let IngestedTrace::Complex(trace) = ingest_trace(&cfg.input, TraceKind::Complex)? else {
        unreachable!("complex ingestion returns a complex trace")
    };
    let fit = resonator_reflection_fit(&trace)?;
    report.push_result("resonator", &fit)?;

    let model: Vec<_> = trace
        .freq_hz
        .iter()
        .map(|&f| {
            reflection_s21(
                f,
                fit.f0_hz,
                fit.q_total,
                fit.q_c_mag,
                fit.phi,
                fit.amplitude,
                fit.alpha,
                fit.tau_s,
            )
        })
        .collect();
    let re: Vec<f64> = model.iter().map(|z| z.re).collect();
    let im: Vec<f64> = model.iter().map(|z| z.im).collect();
    ctx.write_csv(
        &mut report,
        "s21_fit.csv",
        &["freq_hz", "re", "im"],
        &[&trace.freq_hz, &re, &im],
    )?;
    let data_mag: Vec<(f64, f64)> = trace
        .freq_hz
        .iter()
        .zip(&trace.s21)
        .map(|(&f, z)| (f, z.norm()))
        .collect();
    let fit_mag: Vec<(f64, f64)> = trace
        .freq_hz
        .iter()
        .zip(&model)
        .map(|(&f, z)| (f, z.norm()))
        .collect();
    ctx.write_plot(
        &mut report,
        "s21_fit.svg",
        "Reflection fit",
        "frequency (Hz)",
        "|S21|",
        &[Series::new("data", data_mag), Series::new("fit", fit_mag)],
    )?;
    Ok(Outcome {
        report,
        exit_code: 0,
    })
}

fn fit_gain(args: FitInputArgs, ctx: &Ctx) -> Result<Outcome> {
    let cfg = apply_overrides(FitInputConfig { input: args.input }, &ctx.sets)?;
    let mut report = Report::new("fit gain", ctx.seed);
    report.set_config(&cfg)?;

    let IngestedTrace::Gain(trace) = ingest_trace(&cfg.input, TraceKind::Gain)? else {
        unreachable!("gain ingestion returns a gain trace")
    };
    let fit = double_lorentzian_fit(&trace)?;
    report.push_result("lorentzian", &fit)?;
    if fit.collapsed {
        report.push_warning(
            "two-component fit collapsed to a single resolvable Lorentzian",
        );
    }

    // Rebuild the fitted curve from the reported parameters.
    let model_db: Vec<f64> = trace
        .freq_hz
        .iter()
        .map(|&f| 10.0 * lorentzian_model_value(f, &fit.fit.params).log10())
        .collect();
    ctx.write_csv(
        &mut report,
        "gain_fit.csv",
        &["freq_hz", "gain_db"],
        &[&trace.freq_hz, &model_db],
    )?;
    ctx.write_plot(
        &mut report,
        "gain_fit.svg",
        "Double-Lorentzian gain fit",
        "frequency (Hz)",
        "gain (dB)",
        &[
            Series::new(
                "data",
                trace
                    .freq_hz
                    .iter()
                    .copied()
                    .zip(trace.gain_db.iter().copied())
                    .collect(),
            ),
            Series::new(
                "fit",
                trace.freq_hz.iter().copied().zip(model_db).collect(),
            ),
        ],
    )?;
    Ok(Outcome {
        report,
        exit_code: 0,
    })
}

fn fit_kerr(args: FitInputArgs, ctx: &Ctx) -> Result<Outcome> {
    let cfg = apply_overrides(FitInputConfig { input: args.input }, &ctx.sets)?;
    let mut report = Report::new("fit kerr", ctx.seed);
    report.set_config(&cfg)?;

    let table = io::read_table(&cfg.input)?;
    let n = table.column("n_photons").ok_or_else(|| {
        Error::Validation(format!(
            "Kerr ladder CSV needs an `n_photons` column, found {:?}",
            table.columns
        ))
    })?;
    let f0 = table.column("f0_hz").ok_or_else(|| {
        Error::Validation(format!(
            "Kerr ladder CSV needs an `f0_hz` column, found {:?}",
            table.columns
        ))
    })?;
    let points: Vec<(f64, f64)> = n.iter().copied().zip(f0.iter().copied()).collect();
    let fit = kerr_slope_fit(&points)?;
    let (k, k_err) = fit.get("K").expect("named parameter");
    let (f_r0, f_r0_err) = fit.get("f_r0").expect("named parameter");
    report.push_result("kerr_hz_per_photon", k)?;
    report.push_result("kerr_std_error_hz_per_photon", k_err)?;
    report.push_result("f_r0_hz", f_r0)?;
    report.push_result("f_r0_std_error_hz", f_r0_err)?;
    report.push_result("fit", &fit)?;

    let line: Vec<(f64, f64)> = points.iter().map(|&(x, _)| (x, f_r0 + k * x)).collect();
    ctx.write_plot(
        &mut report,
        "kerr_fit.svg",
        "Kerr slope fit",
        "photon number",
        "resonance frequency (Hz)",
        &[
            Series::new("data", points),
            Series::new("fit", line),
        ],
    )?;
    Ok(Outcome {
        report,
        exit_code: 0,
    })
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

fn calibrate_photon_number(args: CalPhotonArgs, ctx: &Ctx) -> Result<Outcome> {
    let mut cfg = PhotonCalibrationConfig::default();
    if let Some(v) = args.p_generator_dbm {
        cfg.p_generator_dbm = v;
    }
    if args.slope_delta_fq.is_some() {
        cfg.slope_delta_fq_hz_per_mw = args.slope_delta_fq;
    }
    if args.slope_gamma.is_some() {
        cfg.slope_gamma_hz_per_mw = args.slope_gamma;
    }
    let cfg = apply_overrides(cfg, &ctx.sets)?;
    cfg.cal.validate()?;

    let mut report = Report::new("calibrate photon-number", ctx.seed);
    report.set_config(&cfg)?;

    // Slopes: measured if provided, else reconstructed from the calibration.
    let slope_df = cfg
        .slope_delta_fq_hz_per_mw
        .unwrap_or(2.0 * cfg.cal.chi_hz * cfg.cal.c_photons_per_mw);
    let slope_gamma = cfg.slope_gamma_hz_per_mw.unwrap_or(
        8.0 * cfg.cal.chi_hz * cfg.cal.chi_hz * cfg.cal.c_photons_per_mw / cfg.cal.kappa_hz,
    );
    let (chi, c) = dispersive_shift_calibration(slope_gamma, slope_df, cfg.cal.kappa_hz)?;

    let p_mw = dbm_to_watts(cfg.p_generator_dbm) * 1e3;
    let n = c * p_mw;
    let p_out_dbm =
        calibration::cavity_output_power(cfg.cal.kappa_hz, cfg.cal.f_r_hz, n)?;
    let dephasing = measurement_dephasing(chi, n, cfg.cal.kappa_hz)?;

    report.push_result("slope_delta_fq_hz_per_mw", slope_df)?;
    report.push_result("slope_gamma_hz_per_mw", slope_gamma)?;
    report.push_result("chi_hz", chi)?;
    report.push_result("c_photons_per_mw", c)?;
    report.push_result("p_generator_dbm", cfg.p_generator_dbm)?;
    report.push_result("n_photons", n)?;
    report.push_result("cavity_output_dbm", p_out_dbm)?;
    report.push_result("dephasing_hz", dephasing)?;

    Ok(Outcome {
        report,
        exit_code: 0,
    })
}

fn calibrate_chain(args: CalChainArgs, ctx: &Ctx) -> Result<Outcome> {
    let mut cfg = ChainBudgetConfig::default();
    if let Some(preset) = args.preset {
        cfg.chain = match preset {
            ChainPreset::Pump => presets::pump_line_chain(),
            ChainPreset::Probe => presets::probe_line_chain(),
        };
    }
    if let Some(path) = &args.input {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        cfg.chain = serde_json::from_str(&text)
            .map_err(|e| Error::Validation(format!("bad chain JSON in {}: {e}", path.display())))?;
    }
    if let Some(v) = args.input_dbm {
        cfg.input_dbm = v;
    }
    let cfg = apply_overrides(cfg, &ctx.sets)?;
    let cfg = ChainBudgetConfig {
        chain: AmplifierChain::new(cfg.chain.stages)?,
        ..cfg
    };

    let mut report = Report::new("calibrate chain", ctx.seed);
    report.set_config(&cfg)?;

    let total = chain_attenuation(&cfg.chain);
    let stages = referred_power(&cfg.chain, cfg.input_dbm);
    let compressed: Vec<&str> = stages
        .iter()
        .filter(|s| s.compressed)
        .map(|s| s.name.as_str())
        .collect();
    report.push_result("total_gain_db", total)?;
    report.push_result(
        "systematic_uncertainty_db",
        calibration::LINE_SYSTEMATIC_UNCERTAINTY_DB,
    )?;
    report.push_result("input_dbm", cfg.input_dbm)?;
    report.push_result("output_dbm", cfg.input_dbm + total)?;
    report.push_result("stages", &stages)?;
    if !compressed.is_empty() {
        report.push_warning(format!(
            "stages driven at or past their compression point: {}",
            compressed.join(", ")
        ));
    }
    match friis_noise_temperature(&cfg.chain) {
        Ok(t) => report.push_result("noise_temperature_k", t)?,
        Err(e) => report.push_warning(format!("no cascade noise temperature: {e}")),
    }
    report.push_warning(format!(
        "summed line budgets carry a +-{} dB systematic uncertainty",
        calibration::LINE_SYSTEMATIC_UNCERTAINTY_DB
    ));
    report.push_result("budget_table", budget_table(&cfg.chain, cfg.input_dbm))?;

    if let Some(path) = ctx.artifact("budget.txt") {
        io::write_atomic(&path, &budget_table(&cfg.chain, cfg.input_dbm))?;
        report.push_artifact(&path);
    }
    Ok(Outcome {
        report,
        exit_code: 0,
    })
}

// ---------------------------------------------------------------------------
// filter
// ---------------------------------------------------------------------------

fn parse_check_spec(spec: &str) -> Result<CheckBand> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || {
        Error::InvalidArgument(format!(
            "check spec must be LO:HI:DB (GHz,GHz,dB), got {spec:?}"
        ))
    };
    if parts.len() != 3 {
        return Err(bad());
    }
    let vals: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    if !(vals[0] < vals[1]) || vals[0] < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "check band must be ordered and non-negative, got {spec:?}"
        )));
    }
    Ok(CheckBand {
        f_lo_ghz: vals[0],
        f_hi_ghz: vals[1],
        threshold_db: vals[2],
    })
}

/// Run the stop-band + dielectric-tolerance checks, record the results and
/// return whether everything passed.
fn run_filter_checks(
    report: &mut Report,
    net: &LadderNetwork,
    band: CheckBand,
    tolerance: f64,
) -> Result<bool> {
    let band_hz = (band.f_lo_ghz * 1e9, band.f_hi_ghz * 1e9);
    let reports = dielectric_sensitivity(net, band_hz, band.threshold_db, tolerance)?;
    let all_pass = reports.iter().all(|(_, r)| r.pass);
    if !reports.iter().all(|(_, r)| r.lumped_model_valid) {
        report.push_warning(
            "check band extends above 10 GHz where the lumped-element model \
             ignores distributed self-resonances",
        );
    }
    report.push_result("check_band", band)?;
    report.push_result("dielectric_tolerance", tolerance)?;
    report.push_result(
        "checks",
        reports
            .iter()
            .map(|(label, r)| json!({ "case": label, "report": r }))
            .collect::<Vec<_>>(),
    )?;
    report.push_result("pass", all_pass)?;
    Ok(all_pass)
}

fn emit_filter_response(
    report: &mut Report,
    ctx: &Ctx,
    net: &LadderNetwork,
    cfg_lo: f64,
    cfg_hi: f64,
    n: usize,
) -> Result<()> {
    let grid = response_grid(net, cfg_lo, cfg_hi, n)?;
    let freq: Vec<f64> = grid.iter().map(|p| p.0).collect();
    let s21: Vec<f64> = grid.iter().map(|p| p.1).collect();
    ctx.write_csv(
        report,
        "filter_response.csv",
        &["freq_hz", "s21_db"],
        &[&freq, &s21],
    )?;
    ctx.write_plot(
        report,
        "filter_response.svg",
        "Filter response",
        "frequency (Hz)",
        "|S21| (dB)",
        &[Series::new("S21", grid)],
    )?;
    Ok(())
}

fn filter_design(args: FilterDesignArgs, ctx: &Ctx) -> Result<Outcome> {
    let mut cfg = FilterDesignConfig::default();
    if let Some(v) = args.order {
        cfg.design.order = v;
    }
    if let Some(v) = args.ripple_db {
        cfg.design.ripple_db = v;
    }
    if let Some(v) = args.cutoff_ghz {
        cfg.design.cutoff_hz = v * 1e9;
    }
    if let Some(v) = args.z0 {
        cfg.design.z0_ohm = v;
    }
    if let Some(spec) = &args.check {
        cfg.check = Some(parse_check_spec(spec)?);
    }
    if let Some(v) = args.dielectric_tol {
        cfg.dielectric_tolerance = v;
    }
    let cfg = apply_overrides(cfg, &ctx.sets)?;

    let mut report = Report::new("filter design", ctx.seed);
    report.set_config(&cfg)?;

    let net = cfg.design.synthesize()?;
    report.push_result("network", &net)?;

    if let Some(path) = ctx.artifact("filter_network.json") {
        let mut text = serde_json::to_string_pretty(&net)?;
        text.push('\n');
        io::write_atomic(&path, &text)?;
        report.push_artifact(&path);
    }
    emit_filter_response(
        &mut report,
        ctx,
        &net,
        cfg.response_f_lo_hz,
        cfg.response_f_hi_hz,
        cfg.response_points,
    )?;

    let mut exit_code = 0;
    if let Some(band) = cfg.check {
        if !run_filter_checks(&mut report, &net, band, cfg.dielectric_tolerance)? {
            exit_code = 2;
        }
    }
    Ok(Outcome { report, exit_code })
}

fn filter_check(args: FilterCheckArgs, ctx: &Ctx) -> Result<Outcome> {
    let band = parse_check_spec(&args.check)?;
    let tolerance = args.dielectric_tol.unwrap_or(0.2);
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| Error::io(args.input.display().to_string(), e))?;
    let net: LadderNetwork = serde_json::from_str(&text).map_err(|e| {
        Error::Validation(format!("bad network JSON in {}: {e}", args.input.display()))
    })?;
    net.validate()?;

    let mut report = Report::new("filter check", ctx.seed);
    report.set_config(&json!({
        "input": args.input,
        "check": args.check,
        "dielectric_tolerance": tolerance,
    }))?;
    report.push_result("network", &net)?;
    emit_filter_response(&mut report, ctx, &net, 1e7, band.f_hi_ghz * 1e9, 1001)?;
    let pass = run_filter_checks(&mut report, &net, band, tolerance)?;
    Ok(Outcome {
        report,
        exit_code: if pass { 0 } else { 2 },
    })
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

/// Write the configured synthetic datasets into `out_dir`; returns the paths
/// written and the generator ("truth") values a round-trip test compares
/// against.
pub fn synthesize_dataset(
    cfg: &SynthConfig,
    out_dir: &Path,
    seed: u64,
) -> Result<(Vec<PathBuf>, serde_json::Map<String, Value>)> {
    let mut paths = Vec::new();
    let mut truth = serde_json::Map::new();
    let want = |k: SynthKind| cfg.kind == SynthKind::All || cfg.kind == k;

    if want(SynthKind::S21) {
        let trace = synth::noisy_reflection_trace(&cfg.reflection, seed)?;
        let path = out_dir.join("s21.csv");
        io::write_complex_trace(&path, &trace)?;
        paths.push(path);
        truth.insert("s21".into(), serde_json::to_value(&cfg.reflection)?);
    }
    if want(SynthKind::Gain) {
        let op = optimal_pump_search(&cfg.gain.mode, cfg.gain.target_gain_db)?;
        let trace = synth::noisy_gain_trace(
            &cfg.gain.mode,
            op.f_pump,
            op.pump_power_watts,
            cfg.gain.span_hz,
            cfg.gain.n_points,
            cfg.gain.sigma_db,
            seed.wrapping_add(1),
        )?;
        let path = out_dir.join("gain.csv");
        io::write_gain_trace(&path, &trace)?;
        paths.push(path);
        truth.insert(
            "gain".into(),
            json!({
                "target_gain_db": cfg.gain.target_gain_db,
                "achieved_gain_db": op.achieved_gain_db,
                "f_pump_hz": op.f_pump,
                "pump_power_dbm": watts_to_dbm(op.pump_power_watts),
            }),
        );
    }
    if want(SynthKind::Kerr) {
        let ns: Vec<f64> = (0..cfg.kerr.n_points)
            .map(|i| cfg.kerr.n_max * (i + 1) as f64 / cfg.kerr.n_points as f64)
            .collect();
        let (n, f0) = synth::kerr_ladder(
            cfg.kerr.f0_hz,
            cfg.kerr.kerr_hz_per_photon,
            &ns,
            cfg.kerr.sigma_hz,
            seed.wrapping_add(2),
        )?;
        let path = out_dir.join("kerr.csv");
        io::write_atomic(
            &path,
            &io::table_to_csv(&["n_photons", "f0_hz"], &[&n, &f0])?,
        )?;
        paths.push(path);
        truth.insert(
            "kerr".into(),
            json!({
                "f0_hz": cfg.kerr.f0_hz,
                "kerr_hz_per_photon": cfg.kerr.kerr_hz_per_photon,
            }),
        );
    }
    if want(SynthKind::Spectra) {
        let sp = &cfg.spectra;
        let (off, on) = synth::on_off_spectra(
            sp.f_center_hz,
            sp.span_hz,
            sp.n_points,
            sp.f_center_hz + sp.tone_offset_hz,
            sp.tone_dbm,
            sp.floor_dbm,
            sp.gain_db,
            sp.delta_snr_db,
            sp.sigma_db,
            seed.wrapping_add(3),
        )?;
        let off_path = out_dir.join("spectrum_off.csv");
        let on_path = out_dir.join("spectrum_on.csv");
        io::write_spectrum(&off_path, &off)?;
        io::write_spectrum(&on_path, &on)?;
        paths.push(off_path);
        paths.push(on_path);
        truth.insert(
            "spectra".into(),
            json!({
                "gain_db": sp.gain_db,
                "delta_snr_db": sp.delta_snr_db,
            }),
        );
    }
    Ok((paths, truth))
}

fn synth_cmd(args: SynthArgs, ctx: &Ctx) -> Result<Outcome> {
    let mut cfg = SynthConfig {
        kind: args.kind,
        ..SynthConfig::default()
    };
    if args.noiseless {
        // 300 dB of SNR leaves the trace bit-exact at f64 resolution for
        // fitting purposes; the dB-domain noises switch off exactly.
        cfg.reflection.snr_db = 300.0;
        cfg.gain.sigma_db = 0.0;
        cfg.kerr.sigma_hz = 0.0;
        cfg.spectra.sigma_db = 0.0;
    }
    let cfg = apply_overrides(cfg, &ctx.sets)?;

    let out_dir = ctx.out.clone().ok_or_else(|| {
        Error::InvalidArgument("synth writes datasets and requires --out DIR".into())
    })?;
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| Error::io(out_dir.display().to_string(), e))?;

    let mut report = Report::new("synth", ctx.seed);
    report.set_config(&cfg)?;
    let (paths, truth) = synthesize_dataset(&cfg, &out_dir, ctx.seed)?;
    for p in &paths {
        report.push_artifact(p);
    }
    report.push_result("truth", Value::Object(truth))?;
    Ok(Outcome {
        report,
        exit_code: 0,
    })
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
