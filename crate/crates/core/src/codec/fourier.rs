//! Trapezium-rule Fourier expansion of a closed curve, its inverse, and the
//! canonical form used to compare shapes independently of placement.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::curve::{arc_length_params, ClosedCurve};
use super::genome::Genome;
use crate::{Error, Result};

/// Below this relative magnitude `a_-1` carries no usable phase.
const PHASE_FLOOR: f64 = 1e-9;

/// Smallest `|Re(a_m + a_-m)|` that may decide the rotation branch.
const BRANCH_FLOOR: f64 = 1e-9;

/// Fourier coefficients `a_m`, `m = -H..=H`, of the polygon `curve`.
///
/// Each point is placed at its normalized arc length `t_k` and the integral
/// of `z(t) exp(-2 pi i m t)` is taken with the trapezium rule over the
/// closed polygon (`z_n = z_0`, `t_n = 1`). The curve is expected to be
/// densified already.
pub fn encode(curve: &ClosedCurve, harmonic_count: usize) -> Result<Genome> {
    if harmonic_count < 1 {
        return Err(Error::invalid("harmonic count must be at least 1"));
    }
    let t = arc_length_params(curve)?;
    let z: Vec<Complex64> = curve
        .points()
        .iter()
        .map(|p| Complex64::new(p[0], p[1]))
        .collect();
    let n = z.len();
    let h = harmonic_count as i64;

    let end = |k: usize| if k + 1 == n { 1.0 } else { t[k + 1] };
    let a0: Complex64 = (0..n)
        .map(|k| 0.5 * (end(k) - t[k]) * (z[k] + z[(k + 1) % n]))
        .sum();

    // On an uneven grid the rule does not integrate exp(-2 pi i m t) to
    // exactly zero, so the harmonics are taken about the mean; otherwise a
    // translation would leak into every a_m.
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * harmonic_count + 1];
    for k in 0..n {
        let (t0, t1) = (t[k], end(k));
        let (z0, z1) = (z[k] - a0, z[(k + 1) % n] - a0);
        let half = 0.5 * (t1 - t0);
        for (slot, m) in coeffs.iter_mut().zip(-h..=h) {
            let w = m as f64 * TAU;
            *slot += half * (z1 * Complex64::cis(-w * t1) + z0 * Complex64::cis(-w * t0));
        }
    }
    coeffs[harmonic_count] = a0;
    Genome::from_coeffs(harmonic_count, coeffs)
}

/// Evaluates the truncated series `sum_{|m| <= precision} a_m exp(2 pi i m t)`
/// at `t_k = k / sample_count`.
pub fn decode(genome: &Genome, precision: usize, sample_count: usize) -> Result<ClosedCurve> {
    if precision < 1 || precision > genome.harmonic_count() {
        return Err(Error::invalid(format!(
            "precision {precision} must lie in 1..={}",
            genome.harmonic_count()
        )));
    }
    if sample_count < 3 {
        return Err(Error::invalid("need at least 3 samples"));
    }
    let p = precision as i64;
    let terms: Vec<(f64, Complex64)> = (-p..=p).map(|m| (m as f64 * TAU, genome.coeff(m))).collect();
    let points = (0..sample_count)
        .map(|k| {
            let t = k as f64 / sample_count as f64;
            let z: Complex64 = terms.iter().map(|&(w, a)| a * Complex64::cis(w * t)).sum();
            [z.re, z.im]
        })
        .collect();
    ClosedCurve::new(points)
}

/// Canonical form of a genome: translation, scale, rotation and start point
/// removed.
///
/// After normalization `a_0 = 0`, `a_1 = 1` and `a_-1` is real and
/// non-negative. The rotation `e^{i theta}` and start shift `e^{i m phi}` are
/// solved jointly from the phases of `a_1` and `a_-1`. That system has two
/// solutions, differing by the factor `(-1)^(m+1)`. The branch is chosen
/// from the lowest even gene with a usable real part, `Re(a_m + a_-m)`,
/// which is made non-negative. Only that gene decides, so editing higher
/// harmonics never flips lower ones.
pub fn normalize(genome: &Genome) -> Result<Genome> {
    let mut g = genome.clone();
    g.set_coeff(0, Complex64::new(0.0, 0.0))?;

    let a1 = g.coeff(1);
    let size = g.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    if !(a1.norm() > size * 1e-12) {
        return Err(Error::DegenerateGenome(
            "first harmonic a_1 vanishes, scale cannot be fixed".into(),
        ));
    }
    let inv = 1.0 / a1.norm();
    for c in g.coeffs_mut() {
        *c *= inv;
    }

    let phase_plus = a1.arg();
    let a_minus = g.coeff(-1);
    let phase_minus = if a_minus.norm() > PHASE_FLOOR {
        a_minus.arg()
    } else {
        phase_plus
    };
    let rotation = -0.5 * (phase_plus + phase_minus);
    let shift = -0.5 * (phase_plus - phase_minus);

    let h = g.harmonic_count() as i64;
    for (c, m) in g.coeffs_mut().iter_mut().zip(-h..=h) {
        *c *= Complex64::cis(rotation + m as f64 * shift);
    }

    if branch_score(&g) < 0.0 {
        // second branch: rotation + pi and shift + pi, i.e. even harmonics negated
        for (c, m) in g.coeffs_mut().iter_mut().zip(-h..=h) {
            if m.rem_euclid(2) == 0 {
                *c = -*c;
            }
        }
    }

    g.set_coeff(1, Complex64::new(1.0, 0.0))?;
    let a_minus = g.coeff(-1);
    g.set_coeff(-1, Complex64::new(a_minus.norm(), 0.0))?;
    Ok(g)
}

fn branch_score(g: &Genome) -> f64 {
    (2..=g.harmonic_count() as i64)
        .step_by(2)
        .map(|m| (g.coeff(m) + g.coeff(-m)).re)
        .find(|s| s.abs() > BRANCH_FLOOR)
        .unwrap_or(0.0)
}
