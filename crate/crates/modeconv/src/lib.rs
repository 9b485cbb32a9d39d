//! Simulator and analysis toolkit for mode-separable quantum frequency
//! conversion: orthogonal temporal modes from a simulated SPDC source, shaped
//! pump pulses that upconvert one mode at a time in a chi(2) waveguide, and
//! the surrounding experimental machinery (comb shaping, chirp correction,
//! interferometric alignment, stochastic pump optimization, photon counting).

pub mod comb;
pub mod counting;
pub mod error;
pub mod field;
pub mod interferometry;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod plot;
pub mod propagation;
pub mod pump_design;
pub mod spdc;
pub mod spsa;

pub use error::{Error, Result};
pub use field::{ComplexEnvelope, TimeFrequencyGrid};

/// Signal carrier wavelength in nm.
pub const SIGNAL_WAVELENGTH_NM: f64 = 1532.1;
/// Pump carrier wavelength in nm.
pub const PUMP_WAVELENGTH_NM: f64 = 1556.6;
/// Comb line spacing in GHz (also the system repetition rate).
pub const COMB_SPACING_GHZ: f64 = 20.0;
/// Number of comb lines per shaped waveform.
pub const COMB_LINES: usize = 17;
