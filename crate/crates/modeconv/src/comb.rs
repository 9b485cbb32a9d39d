//! Electro-optic frequency comb emulation: line-by-line amplitude/phase
//! state, waveshaper masks with 1-GHz bin quantization, and the pairwise-beat
//! chirp-correction procedure.
//!
//! A comb with spacing `D` GHz reconstructs to a waveform that is exactly
//! `1/D`-periodic; two selected lines produce a beat sinusoid whose temporal
//! shift encodes their phase difference, which is what the correction
//! algorithm measures pair by pair.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{ComplexEnvelope, TimeFrequencyGrid, C_NM_THZ};

/// One comb line: nonnegative amplitude and phase wrapped to (-pi, pi].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombLine {
    pub amplitude: f64,
    pub phase: f64,
}

/// Per-line amplitude and phase of a frequency comb centered on a carrier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombSpec {
    pub center_wavelength_nm: f64,
    pub spacing_ghz: f64,
    pub lines: Vec<CombLine>,
}

/// Wrap an angle to (-pi, pi].
pub fn wrap_phase(phi: f64) -> f64 {
    let mut p = phi.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

impl CombSpec {
    pub fn new(center_wavelength_nm: f64, spacing_ghz: f64, lines: Vec<CombLine>) -> Result<Self> {
        if lines.is_empty() {
            return Err(Error::Domain("comb needs at least one line".into()));
        }
        if lines.iter().any(|l| l.amplitude < 0.0 || !l.amplitude.is_finite()) {
            return Err(Error::Domain("line amplitudes must be nonnegative".into()));
        }
        let lines = lines
            .into_iter()
            .map(|l| CombLine { amplitude: l.amplitude, phase: wrap_phase(l.phase) })
            .collect();
        Ok(Self { center_wavelength_nm, spacing_ghz, lines })
    }

    pub fn n_lines(&self) -> usize {
        self.lines.len()
    }

    /// Line index offsets relative to the carrier, -(N-1)/2 ..= (N-1)/2 for
    /// odd N (even N leans one line low).
    pub fn line_offsets(&self) -> Vec<i32> {
        let n = self.lines.len() as i32;
        let lo = -(n - 1) / 2;
        (lo..lo + n).collect()
    }

    /// Repetition period 1/spacing in ps.
    pub fn period_ps(&self) -> f64 {
        1000.0 / self.spacing_ghz
    }

    /// Line spacing in THz.
    pub fn spacing_thz(&self) -> f64 {
        self.spacing_ghz * 1e-3
    }

    /// Absolute optical frequency of line `m` (offset index) in GHz.
    pub fn line_freq_ghz(&self, m: i32) -> f64 {
        C_NM_THZ / self.center_wavelength_nm * 1e3 + m as f64 * self.spacing_ghz
    }

    /// Complex coefficient of line `m`.
    pub fn coefficient(&self, idx: usize) -> Complex64 {
        let l = &self.lines[idx];
        Complex64::from_polar(l.amplitude, l.phase)
    }

    /// Time-domain reconstruction sum_m c_m exp(i 2 pi f_m t) on `grid`.
    /// Exactly periodic with the comb period; every line must fall on the
    /// grid's frequency lattice.
    pub fn reconstruct(&self, grid: &TimeFrequencyGrid) -> Result<ComplexEnvelope> {
        let df = grid.df();
        let mut spectrum = vec![Complex64::new(0.0, 0.0); grid.n_samples()];
        for (idx, m) in self.line_offsets().into_iter().enumerate() {
            let f = m as f64 * self.spacing_thz();
            let bin = grid.freq_bin(f, 1e-6).ok_or_else(|| {
                Error::Domain(format!(
                    "comb line at {f} THz does not fall on the grid lattice (df = {df} THz)"
                ))
            })?;
            spectrum[bin] += self.coefficient(idx) / df;
        }
        ComplexEnvelope::from_spectrum(*grid, spectrum, self.center_wavelength_nm)
    }

    /// One period of the reconstruction, windowed around `t = 0` and zero
    /// elsewhere. Used to compare a comb-built waveform against a simulated
    /// single-pulse mode.
    pub fn single_period_envelope(&self, grid: &TimeFrequencyGrid) -> Result<ComplexEnvelope> {
        let mut env = self.reconstruct(grid)?;
        let half = self.period_ps() / 2.0;
        let times = grid.times();
        for (a, t) in env.samples_mut().iter_mut().zip(times) {
            if t < -half || t >= half {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        Ok(env)
    }

    /// Average power of the reconstructed train: sum |c_m|^2.
    pub fn average_power(&self) -> f64 {
        self.lines.iter().map(|l| l.amplitude * l.amplitude).sum()
    }
}

/// Generate an `n_lines`-line comb with polynomial phase (the inherent chirp
/// of an EO comb). Line `m` gets phase `sum_p coeffs[p] * m^(p+2)`;
/// amplitudes are flat at 1.
pub fn generate_chirped_comb(
    center_wavelength_nm: f64,
    n_lines: usize,
    spacing_ghz: f64,
    chirp_coeffs: &[f64],
) -> Result<CombSpec> {
    if n_lines % 2 == 0 {
        return Err(Error::Domain("n_lines must be odd (symmetric around the carrier)".into()));
    }
    let half = (n_lines as i32 - 1) / 2;
    let lines = (-half..=half)
        .map(|m| {
            let phase: f64 = chirp_coeffs
                .iter()
                .enumerate()
                .map(|(p, c)| c * (m as f64).powi(p as i32 + 2))
                .sum();
            CombLine { amplitude: 1.0, phase }
        })
        .collect();
    CombSpec::new(center_wavelength_nm, spacing_ghz, lines)
}

/// Temporal shift of the two-line beat sinusoid relative to a reference
/// sinusoid delayed by `reference_delay` ps. For adjacent lines the shift is
/// `(phi_j - phi_i) / (2 pi spacing)`, folded into half a beat period either
/// side of zero.
pub fn beat_delay(comb: &CombSpec, i: usize, j: usize, reference_delay: f64) -> Result<f64> {
    if i == j {
        return Err(Error::Domain("beat requires two distinct lines".into()));
    }
    if i >= comb.n_lines() || j >= comb.n_lines() {
        return Err(Error::Domain("line index out of range".into()));
    }
    let order = j as f64 - i as f64;
    let beat_freq_thz = order.abs() * comb.spacing_thz();
    let period = 1.0 / beat_freq_thz;
    let dphi = wrap_phase(comb.lines[j].phase - comb.lines[i].phase) * order.signum();
    let raw = dphi / (2.0 * PI * beat_freq_thz);
    let mut shift = (raw - reference_delay).rem_euclid(period);
    if shift > period / 2.0 {
        shift -= period;
    }
    Ok(shift)
}

/// Phase corrections that flatten a chirped comb, following the pairwise-beat
/// procedure: the first two lines define the reference sinusoid, every other
/// adjacent pair is driven to zero delay against it.
///
/// The corrected profile is flat up to a global phase and a linear ramp (a
/// pure time shift); the per-pair phase ambiguity of +/-2 pi is resolved by
/// assuming each wrapped pair difference is the measured one.
pub fn chirp_correct(comb: &CombSpec) -> (Vec<f64>, CombSpec) {
    let n = comb.n_lines();
    let mut corrections = vec![0.0; n];
    if n < 2 {
        return (corrections, comb.clone());
    }
    let ref_diff = wrap_phase(comb.lines[1].phase - comb.lines[0].phase);
    for m in 1..n - 1 {
        let pair_diff = wrap_phase(comb.lines[m + 1].phase - comb.lines[m].phase);
        corrections[m + 1] = corrections[m] + ref_diff - pair_diff;
    }
    let corrected_lines = comb
        .lines
        .iter()
        .zip(&corrections)
        .map(|(l, c)| CombLine { amplitude: l.amplitude, phase: wrap_phase(l.phase + c) })
        .collect();
    let corrected = CombSpec {
        center_wavelength_nm: comb.center_wavelength_nm,
        spacing_ghz: comb.spacing_ghz,
        lines: corrected_lines,
    };
    (corrections, corrected)
}

/// Remove the global phase and best-fit linear ramp from a comb's phase
/// profile (the ramp is a pure time shift). The profile is unwrapped through
/// adjacent differences before the least-squares fit.
pub fn remove_linear_phase(comb: &CombSpec) -> CombSpec {
    let n = comb.n_lines();
    let mut unwrapped = vec![0.0; n];
    for m in 1..n {
        unwrapped[m] =
            unwrapped[m - 1] + wrap_phase(comb.lines[m].phase - comb.lines[m - 1].phase);
    }
    // least-squares line through (m, unwrapped[m])
    let nf = n as f64;
    let xs: Vec<f64> = (0..n).map(|m| m as f64).collect();
    let sx: f64 = xs.iter().sum();
    let sy: f64 = unwrapped.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&unwrapped).map(|(x, y)| x * y).sum();
    let denom = nf * sxx - sx * sx;
    let slope = if denom.abs() > 0.0 { (nf * sxy - sx * sy) / denom } else { 0.0 };
    let intercept = (sy - slope * sx) / nf;
    let lines = comb
        .lines
        .iter()
        .enumerate()
        .map(|(m, l)| CombLine {
            amplitude: l.amplitude,
            phase: wrap_phase(unwrapped[m] - slope * m as f64 - intercept),
        })
        .collect();
    CombSpec {
        center_wavelength_nm: comb.center_wavelength_nm,
        spacing_ghz: comb.spacing_ghz,
        lines,
    }
}

/// Programmable spectral filter: attenuation (dB) and phase per 1-GHz bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveshaperMask {
    /// Absolute frequency of bin 0 in GHz.
    pub start_ghz: f64,
    pub attenuation_db: Vec<f64>,
    pub phase: Vec<f64>,
}

/// C-band window of the shaper hardware, in GHz.
pub const C_BAND_START_GHZ: f64 = 191_250.0;
pub const C_BAND_STOP_GHZ: f64 = 196_275.0;

impl WaveshaperMask {
    /// All-pass mask over the full C-band window.
    pub fn transparent_c_band() -> Self {
        let n = (C_BAND_STOP_GHZ - C_BAND_START_GHZ) as usize + 1;
        Self {
            start_ghz: C_BAND_START_GHZ,
            attenuation_db: vec![0.0; n],
            phase: vec![0.0; n],
        }
    }

    pub fn n_bins(&self) -> usize {
        self.attenuation_db.len()
    }

    /// Nearest 1-GHz bin for an absolute frequency, if covered.
    pub fn bin_for(&self, freq_ghz: f64) -> Option<usize> {
        let idx = (freq_ghz - self.start_ghz).round();
        if idx < 0.0 || idx as usize >= self.n_bins() {
            None
        } else {
            Some(idx as usize)
        }
    }

    /// Set attenuation and phase on the bin nearest `freq_ghz`.
    pub fn set_at(&mut self, freq_ghz: f64, att_db: f64, phase: f64) -> Result<()> {
        let bin = self
            .bin_for(freq_ghz)
            .ok_or(Error::MaskCoverage { line_freq_ghz: freq_ghz })?;
        self.attenuation_db[bin] = att_db;
        self.phase[bin] = phase;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.attenuation_db.len() != self.phase.len() {
            return Err(Error::Domain("mask attenuation and phase lengths differ".into()));
        }
        if self.attenuation_db.iter().any(|&a| a < 0.0 || !a.is_finite()) {
            return Err(Error::Domain("attenuations must be nonnegative dB".into()));
        }
        Ok(())
    }
}

/// Apply a waveshaper mask to a comb line by line. Each line reads the mask
/// at its nearest 1-GHz bin (the hardware quantization), scaling the
/// amplitude by 10^(-att/20) and adding the bin phase.
pub fn apply_mask(comb: &CombSpec, mask: &WaveshaperMask) -> Result<CombSpec> {
    mask.validate()?;
    let mut lines = Vec::with_capacity(comb.n_lines());
    for (idx, m) in comb.line_offsets().into_iter().enumerate() {
        let f = comb.line_freq_ghz(m);
        let bin = mask
            .bin_for(f)
            .ok_or(Error::MaskCoverage { line_freq_ghz: f })?;
        let l = comb.lines[idx];
        lines.push(CombLine {
            amplitude: l.amplitude * 10f64.powf(-mask.attenuation_db[bin] / 20.0),
            phase: wrap_phase(l.phase + mask.phase[bin]),
        });
    }
    Ok(CombSpec {
        center_wavelength_nm: comb.center_wavelength_nm,
        spacing_ghz: comb.spacing_ghz,
        lines,
    })
}
