use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Complex Fourier coefficients `a_m` for `m = -H..=H`.
///
/// Gene 0 is the fundamental `a_0`; gene `m >= 1` is the harmonic pair
/// `(a_m, a_-m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GenomeFile", into = "GenomeFile")]
pub struct Genome {
    harmonic_count: usize,
    coeffs: Vec<Complex64>,
}

/// Wire form: `{"harmonic_count": H, "coeffs": [[u, v], ...]}` in order `m = -H..=H`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenomeFile {
    pub harmonic_count: usize,
    pub coeffs: Vec<[f64; 2]>,
}

impl TryFrom<GenomeFile> for Genome {
    type Error = Error;

    fn try_from(file: GenomeFile) -> Result<Self> {
        let coeffs = file
            .coeffs
            .iter()
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        Genome::from_coeffs(file.harmonic_count, coeffs)
    }
}

impl From<Genome> for GenomeFile {
    fn from(g: Genome) -> Self {
        GenomeFile {
            harmonic_count: g.harmonic_count,
            coeffs: g.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

/// One gene: the pair `(a_m, a_-m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gene {
    pub plus: Complex64,
    pub minus: Complex64,
}

impl Genome {
    pub fn zeros(harmonic_count: usize) -> Result<Self> {
        Genome::from_coeffs(
            harmonic_count,
            vec![Complex64::new(0.0, 0.0); 2 * harmonic_count + 1],
        )
    }

    /// `coeffs` must hold `2H + 1` finite values ordered `m = -H..=H`.
    pub fn from_coeffs(harmonic_count: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if harmonic_count < 1 {
            return Err(Error::invalid("harmonic count must be at least 1"));
        }
        if coeffs.len() != 2 * harmonic_count + 1 {
            return Err(Error::invalid(format!(
                "expected {} coefficients for H = {harmonic_count}, got {}",
                2 * harmonic_count + 1,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("coefficients must be finite"));
        }
        Ok(Genome {
            harmonic_count,
            coeffs,
        })
    }

    pub fn harmonic_count(&self) -> usize {
        self.harmonic_count
    }

    /// Coefficients in order `m = -H..=H`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    fn index(&self, m: i64) -> Option<usize> {
        let h = self.harmonic_count as i64;
        (-h..=h).contains(&m).then(|| (m + h) as usize)
    }

    /// `a_m`, or zero outside `-H..=H`.
    pub fn coeff(&self, m: i64) -> Complex64 {
        self.index(m)
            .map(|i| self.coeffs[i])
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    pub fn set_coeff(&mut self, m: i64, value: Complex64) -> Result<()> {
        let i = self
            .index(m)
            .ok_or_else(|| Error::invalid(format!("harmonic {m} outside -H..=H")))?;
        self.coeffs[i] = value;
        Ok(())
    }

    pub fn gene(&self, m: usize) -> Gene {
        Gene {
            plus: self.coeff(m as i64),
            minus: self.coeff(-(m as i64)),
        }
    }

    pub fn set_gene(&mut self, m: usize, gene: Gene) -> Result<()> {
        if m == 0 {
            return self.set_coeff(0, gene.plus);
        }
        self.set_coeff(m as i64, gene.plus)?;
        self.set_coeff(-(m as i64), gene.minus)
    }

    /// `(m, a_m)` pairs in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let h = self.harmonic_count as i64;
        self.coeffs.iter().enumerate().map(move |(i, c)| (i as i64 - h, *c))
    }

    /// Copy with a different harmonic count, zero-padding or truncating.
    pub fn resized(&self, harmonic_count: usize) -> Result<Genome> {
        let h = harmonic_count as i64;
        Genome::from_coeffs(harmonic_count, (-h..=h).map(|m| self.coeff(m)).collect())
    }

    /// Largest `|a_m - b_m|` over the union of both harmonic ranges.
    pub fn max_abs_diff(&self, other: &Genome) -> f64 {
        let h = self.harmonic_count.max(other.harmonic_count) as i64;
        (-h..=h)
            .map(|m| (self.coeff(m) - other.coeff(m)).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_covers_every_harmonic_once() {
        let h = 4;
        let coeffs = (0..9).map(|k| Complex64::new(k as f64, 0.0)).collect();
        let g = Genome::from_coeffs(h, coeffs).unwrap();
        let seen: Vec<i64> = g.iter().map(|(m, _)| m).collect();
        assert_eq!(seen, (-4..=4).collect::<Vec<_>>());
        assert_eq!(g.coeff(-4).re, 0.0);
        assert_eq!(g.coeff(4).re, 8.0);
        assert_eq!(g.gene(2).minus.re, 2.0);
        assert_eq!(g.coeff(5), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn wrong_length_is_rejected() {
        assert!(Genome::from_coeffs(2, vec![Complex64::new(0.0, 0.0); 4]).is_err());
        assert!(Genome::zeros(0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut g = Genome::zeros(1).unwrap();
        g.set_coeff(1, Complex64::new(1.0, -0.5)).unwrap();
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(text, r#"{"harmonic_count":1,"coeffs":[[0.0,0.0],[0.0,0.0],[1.0,-0.5]]}"#);
        assert_eq!(serde_json::from_str::<Genome>(&text).unwrap(), g);
        assert!(serde_json::from_str::<Genome>(r#"{"harmonic_count":2,"coeffs":[[0,0]]}"#).is_err());
    }
}
