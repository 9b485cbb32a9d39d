//! Joint spectral amplitude of the SPDC source and the orthonormal signal
//! temporal modes extracted from it by Schmidt decomposition.
//!
//! The source is driven by a wide super-Gaussian pump and the signal arm is
//! clipped by a hard square spectral filter, which yields a flat ladder of
//! Schmidt modes whose time profiles carry 1, 2, 3, ... intensity lobes.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{self, ComplexEnvelope, TimeFrequencyGrid, C_NM_THZ};

/// Source parameters for the joint spectral amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdcParams {
    /// Pump intensity FWHM in ps.
    pub pump_width_ps: f64,
    /// Super-Gaussian order of the pump pulse, exp(-(t/t0)^(2 order) / 2).
    pub pump_sg_order: u32,
    /// Width of the square signal filter in nm.
    pub filter_bw_nm: f64,
    /// Gaussian phase-matching bandwidth along f_s - f_i, in THz.
    pub phasematch_bw_thz: f64,
    /// Signal carrier wavelength (sets the nm -> THz conversion of the filter).
    pub signal_wavelength_nm: f64,
}

impl Default for SpdcParams {
    fn default() -> Self {
        Self {
            pump_width_ps: 30.0,
            pump_sg_order: 4,
            filter_bw_nm: 2.4,
            phasematch_bw_thz: 1.0,
            signal_wavelength_nm: crate::SIGNAL_WAVELENGTH_NM,
        }
    }
}

impl SpdcParams {
    /// Square-filter full width converted to THz.
    pub fn filter_bw_thz(&self) -> f64 {
        C_NM_THZ * self.filter_bw_nm / (self.signal_wavelength_nm * self.signal_wavelength_nm)
    }
}

/// Discretized joint spectral amplitude on signal/idler frequency-offset axes.
///
/// Both axes live on the grid's frequency lattice so that signal-side Schmidt
/// vectors convert to time-domain envelopes without interpolation.
#[derive(Debug, Clone)]
pub struct JointSpectralAmplitude {
    pub signal_freqs: Vec<f64>,
    pub idler_freqs: Vec<f64>,
    /// Rows indexed by signal frequency, columns by idler frequency;
    /// unit Frobenius norm.
    pub amplitude: DMatrix<Complex64>,
}

impl JointSpectralAmplitude {
    /// Build directly from a matrix (normalizing to unit Frobenius norm).
    pub fn from_matrix(
        signal_freqs: Vec<f64>,
        idler_freqs: Vec<f64>,
        mut amplitude: DMatrix<Complex64>,
    ) -> Result<Self> {
        if amplitude.nrows() != signal_freqs.len() || amplitude.ncols() != idler_freqs.len() {
            return Err(Error::Domain("JSA matrix shape does not match axes".into()));
        }
        let norm = amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Numeric("JSA has zero or non-finite norm".into()));
        }
        amplitude.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { signal_freqs, idler_freqs, amplitude })
    }

    pub fn rank(&self, tol: f64) -> usize {
        let svd = self.amplitude.clone().svd(false, false);
        let max = svd.singular_values.max();
        svd.singular_values.iter().filter(|&&s| s > tol * max).count()
    }
}

/// Build the JSA: `amplitude(f_s, f_i) = pump(f_s + f_i) * phasematch(f_s - f_i)`
/// over a signal axis clipped hard by the square filter.
pub fn build_jsa(grid: &TimeFrequencyGrid, params: &SpdcParams) -> Result<JointSpectralAmplitude> {
    if params.pump_width_ps <= 0.0 || params.filter_bw_nm <= 0.0 || params.phasematch_bw_thz <= 0.0
    {
        return Err(Error::Domain("all SPDC widths must be positive".into()));
    }
    let df = grid.df();
    let half_filter = params.filter_bw_thz() / 2.0;
    if half_filter >= 0.25 / grid.dt() {
        return Err(Error::Domain(
            "signal filter is wider than the grid's usable bandwidth".into(),
        ));
    }
    // signal axis: lattice bins inside the hard filter window
    let ks = (half_filter / df).floor() as i32;
    if ks < 1 {
        return Err(Error::Domain("filter narrower than one frequency bin".into()));
    }
    // idler axis mirrors the signal range plus room for the pump bandwidth
    let margin = ((0.1 / df).ceil() as i32).max(16);
    let ki = ks + margin;
    let signal_freqs: Vec<f64> = (-ks..=ks).map(|k| k as f64 * df).collect();
    let idler_freqs: Vec<f64> = (-ki..=ki).map(|k| k as f64 * df).collect();

    // pump spectral amplitude on the lattice, from the time-domain pulse
    let pump_time = super_gaussian_pulse(grid, params.pump_width_ps, params.pump_sg_order);
    let pump_spec = pump_time.spectrum();
    let pump_at = |f: f64| -> Complex64 {
        match grid.freq_bin(f, 1e-6) {
            Some(bin) => pump_spec[bin],
            None => Complex64::new(0.0, 0.0),
        }
    };

    let mut amplitude = DMatrix::from_element(
        signal_freqs.len(),
        idler_freqs.len(),
        Complex64::new(0.0, 0.0),
    );
    for (r, &fs) in signal_freqs.iter().enumerate() {
        for (c, &fi) in idler_freqs.iter().enumerate() {
            let pm = (-0.5 * ((fs - fi) / params.phasematch_bw_thz).powi(2)).exp();
            amplitude[(r, c)] = pump_at(fs + fi) * pm;
        }
    }
    JointSpectralAmplitude::from_matrix(signal_freqs, idler_freqs, amplitude)
}

/// Super-Gaussian pulse `exp(-((t/t0)^(2 order)) / 2)` with intensity FWHM
/// `fwhm_ps`, unit peak.
pub fn super_gaussian_pulse(grid: &TimeFrequencyGrid, fwhm_ps: f64, order: u32) -> ComplexEnvelope {
    // intensity FWHM -> field scale: |A|^2 drops to 1/2 at t0 * ln(2)^(1/2n)
    let t0 = (fwhm_ps / 2.0) / (2.0_f64.ln()).powf(1.0 / (2.0 * order as f64));
    let samples = grid
        .times()
        .iter()
        .map(|&t| {
            let x = (t / t0).powi(2 * order as i32);
            Complex64::new((-x / 2.0).exp(), 0.0)
        })
        .collect();
    ComplexEnvelope::new(*grid, samples, crate::SIGNAL_WAVELENGTH_NM).expect("grid-sized samples")
}

/// Orthonormal temporal modes with their Schmidt coefficients.
#[derive(Debug, Clone)]
pub struct TemporalModeSet {
    pub modes: Vec<ComplexEnvelope>,
    /// Singular values renormalized so the squares over the full
    /// decomposition sum to one; generation probability of mode j is the
    /// square of entry j.
    pub schmidt_coefficients: Vec<f64>,
    pub labels: Vec<String>,
}

impl TemporalModeSet {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn gram_defect(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for (i, a) in self.modes.iter().enumerate() {
            for (j, b) in self.modes.iter().enumerate() {
                let ip = field::inner_product(a, b)?;
                let target =
                    if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                worst = worst.max((ip - target).norm());
            }
        }
        Ok(worst)
    }

    /// Subset of the modes as a new set (labels follow).
    pub fn subset(&self, indices: &[usize]) -> Result<TemporalModeSet> {
        let mut modes = Vec::with_capacity(indices.len());
        let mut coeffs = Vec::with_capacity(indices.len());
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.len() {
                return Err(Error::Domain(format!("mode index {i} out of range")));
            }
            modes.push(self.modes[i].clone());
            coeffs.push(self.schmidt_coefficients[i]);
            labels.push(self.labels[i].clone());
        }
        Ok(TemporalModeSet { modes, schmidt_coefficients: coeffs, labels })
    }
}

/// Top `n_modes` signal-side Schmidt modes of a JSA as time-domain envelopes.
///
/// Each mode's global phase is pinned so its largest-magnitude time sample is
/// real and positive, which keeps golden files reproducible across runs.
pub fn schmidt_decompose(
    grid: &TimeFrequencyGrid,
    jsa: &JointSpectralAmplitude,
    n_modes: usize,
) -> Result<TemporalModeSet> {
    let svd = jsa.amplitude.clone().svd(true, false);
    let u = svd.u.as_ref().expect("svd computed with u");
    let sv = &svd.singular_values;
    let rank = {
        let max = sv.max();
        sv.iter().filter(|&&s| s > 1e-12 * max).count()
    };
    if n_modes > rank {
        return Err(Error::Rank { requested: n_modes, available: rank });
    }
    let total: f64 = sv.iter().map(|s| s * s).sum();
    let norm = total.sqrt();

    // sort columns by singular value, descending (order is not guaranteed)
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));

    let mut modes = Vec::with_capacity(n_modes);
    let mut coeffs = Vec::with_capacity(n_modes);
    let mut labels = Vec::with_capacity(n_modes);
    for (j, &col) in order.iter().take(n_modes).enumerate() {
        let mut spectrum = vec![Complex64::new(0.0, 0.0); grid.n_samples()];
        for (r, &f) in jsa.signal_freqs.iter().enumerate() {
            let bin = grid
                .freq_bin(f, 1e-6)
                .ok_or_else(|| Error::Domain("JSA axis off the grid lattice".into()))?;
            spectrum[bin] = u[(r, col)];
        }
        let env = ComplexEnvelope::from_spectrum(*grid, spectrum, crate::SIGNAL_WAVELENGTH_NM)?
            .normalized()?;
        modes.push(pin_global_phase(&env));
        coeffs.push(sv[col] / norm);
        labels.push(format!("S{}", j + 1));
    }
    Ok(TemporalModeSet { modes, schmidt_coefficients: coeffs, labels })
}

/// Fix the global phase so the largest-magnitude spectral sample is real
/// positive. Spectral pinning keeps the modes' 0-or-pi line phases intact
/// (an even/odd real spectrum stays real), which is what makes the S5/S6
/// intensity profiles identical.
fn pin_global_phase(env: &ComplexEnvelope) -> ComplexEnvelope {
    let spec = env.spectrum();
    let peak = spec
        .iter()
        .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    if peak.norm() == 0.0 {
        return env.clone();
    }
    env.scaled(peak.conj() / peak.norm())
}

/// Normalized superposition sum_j coeffs[j] * modes[j]. The coefficients must
/// already satisfy sum |c|^2 = 1 (to 1e-12).
pub fn superpose(set: &TemporalModeSet, coeffs: &[Complex64]) -> Result<ComplexEnvelope> {
    if coeffs.len() != set.len() {
        return Err(Error::Domain(format!(
            "{} coefficients for {} modes",
            coeffs.len(),
            set.len()
        )));
    }
    let norm_sq: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if (norm_sq - 1.0).abs() > 1e-12 {
        return Err(Error::Normalization { norm_sq });
    }
    let mut out = ComplexEnvelope::zeros(*set.modes[0].grid(), set.modes[0].wavelength_nm());
    for (c, m) in coeffs.iter().zip(&set.modes) {
        out = out.add(&m.scaled(*c))?;
    }
    Ok(out)
}

/// The six standard signal waveforms: Schmidt modes S1-S4 plus the
/// superpositions S5 = (S1 + S2)/sqrt(2) and S6 = (S1 - S2)/sqrt(2).
pub fn standard_six_modes(
    grid: &TimeFrequencyGrid,
    params: &SpdcParams,
) -> Result<TemporalModeSet> {
    let jsa = build_jsa(grid, params)?;
    let mut set = schmidt_decompose(grid, &jsa, 4)?;
    let inv = Complex64::new(1.0 / 2.0_f64.sqrt(), 0.0);
    let pair = set.subset(&[0, 1])?;
    let s5 = superpose(&pair, &[inv, inv])?;
    let s6 = superpose(&pair, &[inv, -inv])?;
    set.modes.push(s5);
    set.modes.push(s6);
    let p1 = set.schmidt_coefficients[0];
    let p2 = set.schmidt_coefficients[1];
    let mixed = ((p1 * p1 + p2 * p2) / 2.0).sqrt();
    set.schmidt_coefficients.push(mixed);
    set.schmidt_coefficients.push(mixed);
    set.labels.push("S5".into());
    set.labels.push("S6".into());
    Ok(set)
}

/// Count intensity lobes: local maxima of |a(t)|^2 above `threshold` times
/// the global peak.
pub fn count_lobes(env: &ComplexEnvelope, threshold: f64) -> usize {
    let intensity: Vec<f64> = env.samples().iter().map(|a| a.norm_sqr()).collect();
    let peak = intensity.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return 0;
    }
    let floor = threshold * peak;
    let mut count = 0;
    for k in 1..intensity.len() - 1 {
        if intensity[k] > floor
            && intensity[k] >= intensity[k - 1]
            && intensity[k] > intensity[k + 1]
        {
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> TimeFrequencyGrid {
        TimeFrequencyGrid::default_grid()
    }

    /// Test-side oracle: Hermitian eigendecomposition of A A^dagger by cyclic
    /// Jacobi rotations, independent of the SVD route used by the library.
    fn jacobi_singular_values(a: &DMatrix<Complex64>) -> Vec<f64> {
        let mut h = a * a.adjoint();
        let n = h.nrows();
        for _ in 0..100 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(h[(p, q)].norm());
                }
            }
            if off < 1e-14 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let hpq = h[(p, q)];
                    if hpq.norm() < 1e-300 {
                        continue;
                    }
                    let hpp = h[(p, p)].re;
                    let hqq = h[(q, q)].re;
                    let phi = hpq / hpq.norm();
                    let tau = (hqq - hpp) / (2.0 * hpq.norm());
                    let t = if tau >= 0.0 { 1.0 } else { -1.0 } / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let hkp = h[(k, p)];
                        let hkq = h[(k, q)];
                        h[(k, p)] = hkp * c - hkq * s * phi.conj();
                        h[(k, q)] = hkp * s * phi + hkq * c;
                    }
                    for k in 0..n {
                        let hpk = h[(p, k)];
                        let hqk = h[(q, k)];
                        h[(p, k)] = hpk * c - hqk * s * phi;
                        h[(q, k)] = hpk * s * phi.conj() + hqk * c;
                    }
                }
            }
        }
        let mut eigs: Vec<f64> = (0..n).map(|k| h[(k, k)].re.max(0.0).sqrt()).collect();
        eigs.sort_by(|x, y| y.total_cmp(x));
        eigs
    }

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(rows, cols, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn lattice_axis(n: usize) -> Vec<f64> {
        let df = grid().df();
        (0..n).map(|k| (k as i64 - (n / 2) as i64) as f64 * df).collect()
    }

    #[test]
    fn schmidt_coefficients_match_jacobi_oracle() {
        let a = random_matrix(8, 8, 17);
        let jsa =
            JointSpectralAmplitude::from_matrix(lattice_axis(8), lattice_axis(8), a.clone())
                .unwrap();
        let set = schmidt_decompose(&grid(), &jsa, 8).unwrap();
        let norm = a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let oracle = jacobi_singular_values(&a.map(|v| v / norm));
        for (got, want) in set.schmidt_coefficients.iter().zip(&oracle) {
            assert!((got - want).abs() < 1e-10, "{got} vs oracle {want}");
        }
    }

    #[test]
    fn svd_reconstruction_matches_jsa() {
        let a = random_matrix(16, 16, 3);
        let norm = a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let a = a.map(|v| v / norm);
        let svd = a.clone().svd(true, true);
        let rebuilt = svd.recompose().unwrap();
        let err = (&a - &rebuilt).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!(err < 1e-10, "Frobenius error {err}");
    }

    #[test]
    fn separable_jsa_is_rank_one() {
        let g: Vec<Complex64> = (0..12)
            .map(|k| Complex64::new((-25.0 * ((k as f64 - 5.5) / 12.0).powi(2)).exp(), 0.0))
            .collect();
        let h: Vec<Complex64> = (0..12)
            .map(|k| Complex64::new(1.0 / (1.0 + (k as f64 - 5.5).powi(2)), 0.0))
            .collect();
        let outer = DMatrix::from_fn(12, 12, |r, c| g[r] * h[c]);
        let jsa =
            JointSpectralAmplitude::from_matrix(lattice_axis(12), lattice_axis(12), outer).unwrap();
        assert_eq!(jsa.rank(1e-10), 1);
        let set = schmidt_decompose(&grid(), &jsa, 1).unwrap();
        assert!((set.schmidt_coefficients[0] - 1.0).abs() < 1e-12);
        assert!(matches!(
            schmidt_decompose(&grid(), &jsa, 3),
            Err(Error::Rank { .. })
        ));
    }

    #[test]
    fn broadband_pump_jsa_is_nearly_separable() {
        // a pump much shorter than the filter timescale factorizes the JSA
        let params = SpdcParams { pump_width_ps: 0.05, ..Default::default() };
        let jsa = build_jsa(&grid(), &params).unwrap();
        let svd = jsa.amplitude.clone().svd(false, false);
        let sv = svd.singular_values;
        let mut sorted: Vec<f64> = sv.iter().cloned().collect();
        sorted.sort_by(|a, b| b.total_cmp(a));
        assert!(sorted[1] / sorted[0] < 0.05, "ratio {}", sorted[1] / sorted[0]);
    }

    #[test]
    fn default_jsa_gives_flat_four_mode_ladder() {
        let set = standard_six_modes(&grid(), &SpdcParams::default()).unwrap();
        let c = &set.schmidt_coefficients;
        for j in 1..4 {
            assert!(c[j] / c[0] > 0.9, "ratio {} = {}", j, c[j] / c[0]);
        }
        for (j, expect) in [1usize, 2, 3, 4].iter().enumerate() {
            let lobes = count_lobes(&set.modes[j], 0.02);
            assert_eq!(lobes, *expect, "mode S{} has {lobes} lobes", j + 1);
        }
        // each alphabet is orthonormal on its own
        assert!(set.subset(&[0, 1, 2, 3]).unwrap().gram_defect().unwrap() < 1e-10);
    }

    #[test]
    fn superpositions_are_orthogonal_with_equal_intensity() {
        let set = standard_six_modes(&grid(), &SpdcParams::default()).unwrap();
        let s5 = &set.modes[4];
        let s6 = &set.modes[5];
        let overlap = field::inner_product(s5, s6).unwrap();
        assert!(overlap.norm() < 1e-10);
        let max_diff = s5
            .samples()
            .iter()
            .zip(s6.samples())
            .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs())
            .fold(0.0, f64::max);
        assert!(max_diff < 1e-10, "intensity profiles differ by {max_diff}");
        let alphabet2 = set.subset(&[2, 3, 4, 5]).unwrap();
        assert!(alphabet2.gram_defect().unwrap() < 1e-10);
    }

    #[test]
    fn superpose_validates_coefficients() {
        let set = standard_six_modes(&grid(), &SpdcParams::default()).unwrap();
        let pair = set.subset(&[0, 1]).unwrap();
        let bad = [Complex64::new(0.9, 0.0), Complex64::new(0.5, 0.0)];
        assert!(matches!(superpose(&pair, &bad), Err(Error::Normalization { .. })));
        let one = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let s1 = superpose(&pair, &one).unwrap();
        let diff: f64 = s1
            .samples()
            .iter()
            .zip(pair.modes[0].samples())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-14);
    }

    #[test]
    fn filter_wider_than_grid_is_rejected() {
        let params = SpdcParams { filter_bw_nm: 200.0, ..Default::default() };
        assert!(build_jsa(&grid(), &params).is_err());
    }
}
