//! Simulation and analysis toolkit for gate-tunable kinetic-inductance
//! parametric amplifiers.
//!
//! The crate models a superconducting nanowire embedded in a quarter-wave
//! resonator as a pumped Kerr mode and provides, on top of that forward
//! model, the measurement-analysis procedures a cryogenic amplifier
//! experiment needs:
//!
//! - [`circuit`]: loaded-resonator mode structure, gate-voltage and
//!   in-plane-field tuning maps, junction-equivalent critical current;
//! - [`kerr`]: pump steady states and bistability, linearized signal/idler
//!   gain, operating-point search, gain compression, quantum-limited SNR
//!   accounting;
//! - [`fit`]: Levenberg-Marquardt engine plus reflection-resonance, Kerr
//!   slope, and gain-spectrum extraction;
//! - [`calibration`]: photon-number calibration from dispersive shifts and
//!   cryogenic chain gain/noise budgets;
//! - [`filter`]: Chebyshev gate-line filter synthesis and verification;
//! - [`io`], [`report`], [`plot`]: CSV trace schemas, versioned JSON
//!   reports, SVG quick-look plots;
//! - [`presets`]: one coherent reference device used by examples, CLI
//!   defaults, and tests.
//!
//! All rates (linewidths, detunings, Kerr coefficients) are ordinary
//! frequencies in hertz, powers are watts at the device port unless a
//! function name says dBm, and every fallible operation returns
//! [`error::Result`].
//!
//! The `examples/` directory exercises each capability end to end; the
//! `paramp-lab` binary exposes the same flows as a scriptable CLI.

pub mod calibration;
pub mod circuit;
pub mod cli;
pub mod constants;
pub mod error;
pub mod filter;
pub mod fit;
pub mod io;
pub mod kerr;
pub mod plot;
pub mod presets;
pub mod report;
pub mod synth;

mod numeric;

pub use error::{Error, Result};
