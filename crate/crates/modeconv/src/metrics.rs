//! Separability, selectivity, and the key-distribution figures derived from
//! conversion-efficiency matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Separability of pump `k`: the fraction of all upconverted light that came
/// from the intended mode, `eta_kk / sum_j eta_kj`.
pub fn separability(eta_row: &[f64], k: usize) -> Result<f64> {
    check_row(eta_row, k)?;
    let total: f64 = eta_row.iter().sum();
    if total <= 0.0 {
        return Err(Error::UndefinedSeparability);
    }
    Ok(eta_row[k] / total)
}

/// Selectivity of pump `k`: `eta_kk * sigma_k`, the probability of usably
/// separating mode `k` from a multimode input.
pub fn selectivity(eta_row: &[f64], k: usize) -> Result<f64> {
    Ok(eta_row[k] * separability(eta_row, k)?)
}

fn check_row(eta_row: &[f64], k: usize) -> Result<()> {
    if k >= eta_row.len() {
        return Err(Error::Domain(format!(
            "index {k} out of range for a row of {}",
            eta_row.len()
        )));
    }
    if eta_row.iter().any(|&e| e < 0.0 || !e.is_finite()) {
        return Err(Error::Domain("efficiencies must be finite and nonnegative".into()));
    }
    Ok(())
}

/// Figures for the asymmetric BB84 sub-alphabet carved out of two 2x2
/// efficiency blocks: one basis generates key, the other monitors errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QkdFigures {
    /// Separability of the key-basis pump over its 2x2 alphabet.
    pub sigma2_key: f64,
    /// Separability of the check-basis pump over its 2x2 alphabet.
    pub sigma2_check: f64,
    /// Overall receiver efficiency eta_keykey * sigma2_key.
    pub eta_ov: f64,
    /// Quantum bit error ratio contribution, 1 - sigma2_check.
    pub qber: f64,
}

/// Compute the BB84 figures from the 2x2 key-basis and check-basis blocks.
/// Row 0 of each block is the basis-defining pump.
pub fn qkd_figures(eta_key: &[[f64; 2]; 2], eta_check: &[[f64; 2]; 2]) -> Result<QkdFigures> {
    for block in [eta_key, eta_check] {
        for row in block.iter() {
            if row.iter().any(|&e| !(0.0..=1.0).contains(&e)) {
                return Err(Error::Domain("efficiencies must lie in [0, 1]".into()));
            }
        }
    }
    let sigma2_key = separability(&eta_key[0], 0)?;
    let sigma2_check = separability(&eta_check[0], 0)?;
    Ok(QkdFigures {
        sigma2_key,
        sigma2_check,
        eta_ov: eta_key[0][0] * sigma2_key,
        qber: 1.0 - sigma2_check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PAPER_ROW: [f64; 4] = [0.94, 0.075, 0.037, 0.015];

    #[test]
    fn separability_of_reference_row() {
        let s = separability(&PAPER_ROW, 0).unwrap();
        assert!((s - 0.8809).abs() < 1e-4, "sigma_1 = {s}");
    }

    #[test]
    fn perfect_and_uniform_rows() {
        assert_eq!(separability(&[0.3, 0.0, 0.0, 0.0], 0).unwrap(), 1.0);
        assert_eq!(separability(&[0.2; 4], 2).unwrap(), 0.25);
        assert!(matches!(
            separability(&[0.0; 4], 0),
            Err(Error::UndefinedSeparability)
        ));
    }

    #[test]
    fn selectivity_values() {
        let s = selectivity(&PAPER_ROW, 0).unwrap();
        assert!((s - 0.94 * 0.8809).abs() < 1e-4);
        assert_eq!(selectivity(&[1.0, 0.0], 0).unwrap(), 1.0);
        assert!((selectivity(&[0.5, 0.5], 0).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn qkd_reference_point() {
        // sigma2_5 = 0.890 with eta_55 chosen so eta_ov = 0.817; sigma2_1 = 0.903
        let eta_55 = 0.817 / 0.890;
        let eta_56 = eta_55 * (1.0 - 0.890) / 0.890;
        let eta_11 = 0.5;
        let eta_12 = eta_11 * (1.0 - 0.903) / 0.903;
        let fig = qkd_figures(&[[eta_55, eta_56], [0.1, 0.8]], &[[eta_11, eta_12], [0.1, 0.8]])
            .unwrap();
        assert!((fig.sigma2_key - 0.890).abs() < 1e-12);
        assert!((fig.eta_ov - 0.817).abs() < 1e-12);
        assert!((fig.sigma2_check - 0.903).abs() < 1e-12);
        assert!((fig.qber - 0.097).abs() < 1e-12);
    }

    #[test]
    fn qkd_perfect_matrices() {
        let fig = qkd_figures(&[[0.9, 0.0], [0.0, 0.9]], &[[0.8, 0.0], [0.0, 0.8]]).unwrap();
        assert_eq!(fig.eta_ov, 0.9);
        assert_eq!(fig.qber, 0.0);
    }

    proptest! {
        #[test]
        fn row_scaling_preserves_sigma_scales_selectivity(
            e0 in 0.01f64..1.0, e1 in 0.0f64..1.0, e2 in 0.0f64..1.0, c in 0.1f64..5.0
        ) {
            let row = [e0, e1, e2];
            let scaled: Vec<f64> = row.iter().map(|x| x * c).collect();
            let s0 = separability(&row, 0).unwrap();
            let s1 = separability(&scaled, 0).unwrap();
            prop_assert!((s0 - s1).abs() < 1e-12);
            let v0 = selectivity(&row, 0).unwrap();
            let v1 = selectivity(&scaled, 0).unwrap();
            prop_assert!((v1 - c * v0).abs() < 1e-12);
        }

        #[test]
        fn sigma_monotonicity(e0 in 0.1f64..1.0, e1 in 0.01f64..1.0, d in 0.001f64..0.1) {
            let base = separability(&[e0, e1], 0).unwrap();
            // raising an off-diagonal entry lowers sigma
            prop_assert!(separability(&[e0, e1 + d], 0).unwrap() < base);
            // raising the diagonal raises sigma
            prop_assert!(separability(&[e0 + d, e1], 0).unwrap() > base);
        }
    }
}
