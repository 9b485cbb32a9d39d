//! Time/frequency grid bookkeeping and elementary envelope operations.
//!
//! All envelopes in the crate share one uniform sampling lattice. Times are in
//! ps, frequencies in THz, so `dt * df * n = 1` holds without unit juggling.
//! The forward transform uses the `exp(-i 2 pi f t)` convention; the sample at
//! index `k` sits at `t_k = (k - n/2) * dt`, and spectra are returned on the
//! centered axis `f_m = (m - n/2) * df`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in nm * THz (i.e. nm/ps).
pub const C_NM_THZ: f64 = 299_792.458;

/// Uniform time/frequency sampling lattice shared by all envelopes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeFrequencyGrid {
    n_samples: usize,
    dt: f64,
    f_center: f64,
}

impl TimeFrequencyGrid {
    /// Build a grid with `n_samples` points (power of two), step `dt` ps and
    /// absolute center frequency `f_center` THz.
    pub fn new(n_samples: usize, dt: f64, f_center: f64) -> Result<Self> {
        if n_samples == 0 || !n_samples.is_power_of_two() {
            return Err(Error::Domain(format!(
                "n_samples must be a power of two, got {n_samples}"
            )));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Domain(format!("dt must be positive, got {dt}")));
        }
        Ok(Self { n_samples, dt, f_center })
    }

    /// Default lattice: 4096 samples over a 200 ps window (dt ~ 0.0488 ps),
    /// centered on the 1532.1 nm signal carrier. The window holds exactly four
    /// 50 ps comb periods and the frequency step divides the 20 GHz spacing.
    pub fn default_grid() -> Self {
        Self {
            n_samples: 4096,
            dt: 200.0 / 4096.0,
            f_center: C_NM_THZ / crate::SIGNAL_WAVELENGTH_NM,
        }
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Frequency step 1/(n*dt) in THz.
    pub fn df(&self) -> f64 {
        1.0 / (self.n_samples as f64 * self.dt)
    }

    /// Time window n*dt in ps.
    pub fn window(&self) -> f64 {
        self.n_samples as f64 * self.dt
    }

    pub fn f_center(&self) -> f64 {
        self.f_center
    }

    /// Centered time axis, t_k = (k - n/2) dt.
    pub fn times(&self) -> Vec<f64> {
        let half = (self.n_samples / 2) as isize;
        (0..self.n_samples as isize)
            .map(|k| (k - half) as f64 * self.dt)
            .collect()
    }

    /// Centered frequency-offset axis, f_m = (m - n/2) df.
    pub fn freqs(&self) -> Vec<f64> {
        let half = (self.n_samples / 2) as isize;
        let df = self.df();
        (0..self.n_samples as isize)
            .map(|m| (m - half) as f64 * df)
            .collect()
    }

    /// Index of the centered-axis bin holding frequency offset `f`, if `f`
    /// lies on the lattice within `tol` (relative to df).
    pub fn freq_bin(&self, f: f64, tol: f64) -> Option<usize> {
        let df = self.df();
        let m = (f / df).round();
        if (f - m * df).abs() > tol * df {
            return None;
        }
        let idx = m as isize + (self.n_samples / 2) as isize;
        if idx < 0 || idx >= self.n_samples as isize {
            None
        } else {
            Some(idx as usize)
        }
    }
}

/// Complex field samples of one wave on a grid (time domain).
///
/// Units are declared per run: sqrt(W) for classical power accounting or
/// sqrt(photons/ps) for quantum normalization; every conversion between the
/// two is an explicit scale factor applied by the caller.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexEnvelope {
    grid: TimeFrequencyGrid,
    samples: Vec<Complex64>,
    wavelength_nm: f64,
}

impl ComplexEnvelope {
    pub fn new(grid: TimeFrequencyGrid, samples: Vec<Complex64>, wavelength_nm: f64) -> Result<Self> {
        if samples.len() != grid.n_samples() {
            return Err(Error::Domain(format!(
                "sample count {} does not match grid size {}",
                samples.len(),
                grid.n_samples()
            )));
        }
        Ok(Self { grid, samples, wavelength_nm })
    }

    pub fn zeros(grid: TimeFrequencyGrid, wavelength_nm: f64) -> Self {
        Self {
            samples: vec![Complex64::new(0.0, 0.0); grid.n_samples()],
            grid,
            wavelength_nm,
        }
    }

    /// Gaussian test pulse `exp(-(t-t0)^2 / (2 w^2))`, unnormalized.
    pub fn gaussian(grid: TimeFrequencyGrid, t0: f64, width: f64, wavelength_nm: f64) -> Self {
        let samples = grid
            .times()
            .iter()
            .map(|&t| Complex64::new((-((t - t0) / width).powi(2) / 2.0).exp(), 0.0))
            .collect();
        Self { grid, samples, wavelength_nm }
    }

    /// Build an envelope from a centered-axis spectrum.
    pub fn from_spectrum(
        grid: TimeFrequencyGrid,
        spectrum: Vec<Complex64>,
        wavelength_nm: f64,
    ) -> Result<Self> {
        if spectrum.len() != grid.n_samples() {
            return Err(Error::Domain("spectrum length does not match grid".into()));
        }
        let samples = inverse_transform(&grid, &spectrum);
        Ok(Self { grid, samples, wavelength_nm })
    }

    pub fn grid(&self) -> &TimeFrequencyGrid {
        self.grid_ref()
    }

    fn grid_ref(&self) -> &TimeFrequencyGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn wavelength_nm(&self) -> f64 {
        self.wavelength_nm
    }

    pub fn with_wavelength(mut self, wavelength_nm: f64) -> Self {
        self.wavelength_nm = wavelength_nm;
        self
    }

    /// Pulse energy: sum |a|^2 dt. In sqrt(W) units this is picojoules.
    pub fn norm_sq(&self) -> f64 {
        self.samples.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dt()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Relative photon number: energy weighted by wavelength. Ratios of this
    /// quantity between waves are exact photon-number ratios.
    pub fn photon_number(&self) -> f64 {
        self.norm_sq() * self.wavelength_nm
    }

    /// Scale to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroSignal);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for a in out.samples.iter_mut() {
            *a *= factor;
        }
        out
    }

    /// Pointwise sum; grids must match.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let mut out = self.clone();
        for (a, b) in out.samples.iter_mut().zip(&other.samples) {
            *a += b;
        }
        Ok(out)
    }

    /// Centered-axis spectrum, forward convention exp(-i 2 pi f t) dt.
    pub fn spectrum(&self) -> Vec<Complex64> {
        forward_transform(&self.grid, &self.samples)
    }

    /// Time of the intensity peak, refined by quadratic interpolation of
    /// |a|^2 around the maximum sample.
    pub fn peak_time(&self) -> f64 {
        let n = self.samples.len();
        let (k, _) = self
            .samples
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
            .expect("non-empty envelope");
        let times = self.grid.times();
        if k == 0 || k == n - 1 {
            return times[k];
        }
        let ym = self.samples[k - 1].norm_sqr();
        let y0 = self.samples[k].norm_sqr();
        let yp = self.samples[k + 1].norm_sqr();
        let denom = ym - 2.0 * y0 + yp;
        if denom.abs() < 1e-300 {
            return times[k];
        }
        times[k] + 0.5 * (ym - yp) / denom * self.grid.dt()
    }
}

/// Hermitian inner product sum conj(a) b dt. Conjugate-linear in the first
/// argument, linear in the second.
pub fn inner_product(a: &ComplexEnvelope, b: &ComplexEnvelope) -> Result<Complex64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let acc = a
        .samples
        .iter()
        .zip(&b.samples)
        .fold(Complex64::new(0.0, 0.0), |s, (x, y)| s + x.conj() * y);
    Ok(acc * a.grid.dt())
}

/// Shift an envelope by `tau` ps via linear spectral phase exp(-i 2 pi f tau).
///
/// `|tau|` must stay below a quarter window to keep clear of circular
/// wrap-around.
pub fn apply_delay(e: &ComplexEnvelope, tau: f64) -> Result<ComplexEnvelope> {
    let window = e.grid.window();
    if tau.abs() >= window / 4.0 {
        return Err(Error::Domain(format!(
            "delay {tau} ps would wrap on a {window} ps window"
        )));
    }
    apply_spectral_phase(e, |f| -2.0 * std::f64::consts::PI * f * tau)
}

/// Multiply the spectrum by exp(i phase(f)), `f` the offset from the carrier.
pub fn apply_spectral_phase<F>(e: &ComplexEnvelope, phase: F) -> Result<ComplexEnvelope>
where
    F: Fn(f64) -> f64,
{
    let mut spec = e.spectrum();
    for (s, f) in spec.iter_mut().zip(e.grid.freqs()) {
        let ph = phase(f);
        if !ph.is_finite() {
            return Err(Error::Numeric(format!("non-finite phase at f = {f} THz")));
        }
        *s *= Complex64::new(0.0, ph).exp();
    }
    let samples = inverse_transform(&e.grid, &spec);
    Ok(ComplexEnvelope {
        grid: e.grid,
        samples,
        wavelength_nm: e.wavelength_nm,
    })
}

/// Forward transform: centered time samples -> centered spectrum, scaled by dt.
pub(crate) fn forward_transform(grid: &TimeFrequencyGrid, samples: &[Complex64]) -> Vec<Complex64> {
    let n = grid.n_samples();
    let mut buf: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n];
    // ifftshift: move the t = 0 sample to index 0
    for (j, b) in buf.iter_mut().enumerate() {
        *b = samples[(j + n / 2) % n];
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let dt = grid.dt();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (m, o) in out.iter_mut().enumerate() {
        // fftshift back to the centered frequency axis
        *o = buf[(m + n / 2) % n] * dt;
    }
    out
}

/// Inverse transform: centered spectrum -> centered time samples, scaled by df.
pub(crate) fn inverse_transform(grid: &TimeFrequencyGrid, spectrum: &[Complex64]) -> Vec<Complex64> {
    let n = grid.n_samples();
    let mut buf: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n];
    for (m, b) in buf.iter_mut().enumerate() {
        *b = spectrum[(m + n / 2) % n];
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let df = grid.df();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (j, o) in out.iter_mut().enumerate() {
        *o = buf[(j + n / 2) % n] * df;
    }
    out
}

/// Sum-frequency wavelength from energy conservation of the carriers.
pub fn sum_wavelength(lambda_signal_nm: f64, lambda_pump_nm: f64) -> f64 {
    1.0 / (1.0 / lambda_signal_nm + 1.0 / lambda_pump_nm)
}
