use serde::{Deserialize, Serialize};

use crate::codec::{decode, densify, encode, reconstruction_error, ClosedCurve};
use crate::{Error, Result};

/// Density of the spline used as ground truth when scoring reconstructions.
pub const DOE_REFERENCE_POINTS: usize = 3000;

/// Samples drawn from each reconstructed curve.
const DOE_DECODE_SAMPLES: usize = 1500;

/// Reconstruction error for every `(p, N)` pair; `errors[i][j]` belongs to
/// `p_values[i]` and `n_values[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoeGrid {
    pub p_values: Vec<usize>,
    pub n_values: Vec<usize>,
    pub errors: Vec<Vec<f64>>,
}

impl DoeGrid {
    pub fn error(&self, p: usize, n: usize) -> Option<f64> {
        let i = self.p_values.iter().position(|v| *v == p)?;
        let j = self.n_values.iter().position(|v| *v == n)?;
        Some(self.errors[i][j])
    }

    /// `p,N,error` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,N,error\n");
        for (i, p) in self.p_values.iter().enumerate() {
            for (j, n) in self.n_values.iter().enumerate() {
                out.push_str(&format!("{p},{n},{}\n", super::format_sig(self.errors[i][j])));
            }
        }
        out
    }
}

/// Encoding fidelity sweep over decode precisions and densities.
///
/// For each `N` the traced curve is densified to `N` points and encoded
/// once with `H = max p`; each `p` then decodes 1500 samples, scored by
/// [`reconstruction_error`] against the same spline densified to
/// [`DOE_REFERENCE_POINTS`].
pub fn doe_sweep(curve: &ClosedCurve, p_values: &[usize], n_values: &[usize]) -> Result<DoeGrid> {
    if p_values.is_empty() || n_values.is_empty() {
        return Err(Error::invalid("p and N lists must be non-empty"));
    }
    let harmonics = *p_values.iter().max().expect("non-empty");
    if p_values.contains(&0) {
        return Err(Error::invalid("precision must be positive"));
    }
    let oriented = curve.counterclockwise();
    let reference = densify(&oriented, DOE_REFERENCE_POINTS.max(oriented.len()))?;

    let mut errors = vec![vec![0.0; n_values.len()]; p_values.len()];
    for (j, &n) in n_values.iter().enumerate() {
        let genome = encode(&densify(&oriented, n)?, harmonics)?;
        for (i, &p) in p_values.iter().enumerate() {
            let reconstructed = decode(&genome, p, DOE_DECODE_SAMPLES)?;
            errors[i][j] = reconstruction_error(&reference, &reconstructed)?;
        }
    }
    Ok(DoeGrid {
        p_values: p_values.to_vec(),
        n_values: n_values.to_vec(),
        errors,
    })
}
