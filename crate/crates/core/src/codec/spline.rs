//! Cyclic cubic Hermite densification.
//!
//! The tangent at knot `i` is `(P[i+1] - P[i-1]) / 2` (indices cyclic), so it
//! is parallel to the chord joining the two neighbours; this is the uniform
//! Catmull-Rom choice of magnitude.

use super::curve::{ClosedCurve, Point};
use crate::{Error, Result};

/// Resamples `curve` to exactly `count` points lying on the closed Catmull-Rom
/// interpolant through its knots. Every original point is kept.
///
/// Extra points are shared among the segments in proportion to chord length
/// (largest remainder, ties to the lower index) and placed at uniform spline
/// parameter inside each segment.
pub fn densify(curve: &ClosedCurve, count: usize) -> Result<ClosedCurve> {
    let knots = curve.points();
    let n = knots.len();
    if count < n {
        return Err(Error::invalid(format!(
            "cannot densify {n} points down to {count}"
        )));
    }
    let per_segment = allocate(&curve.segment_lengths(), count);
    let tangents: Vec<Point> = (0..n)
        .map(|i| {
            let (prev, next) = (knots[(i + n - 1) % n], knots[(i + 1) % n]);
            [(next[0] - prev[0]) * 0.5, (next[1] - prev[1]) * 0.5]
        })
        .collect();

    let mut points = Vec::with_capacity(count);
    for i in 0..n {
        let j = (i + 1) % n;
        let k = per_segment[i];
        points.push(knots[i]);
        for step in 1..k {
            let u = step as f64 / k as f64;
            points.push(hermite(knots[i], tangents[i], knots[j], tangents[j], u));
        }
    }
    ClosedCurve::new(points)
}

fn hermite(p0: Point, m0: Point, p1: Point, m1: Point, u: f64) -> Point {
    let u2 = u * u;
    let u3 = u2 * u;
    let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    let h10 = u3 - 2.0 * u2 + u;
    let h01 = -2.0 * u3 + 3.0 * u2;
    let h11 = u3 - u2;
    [
        h00 * p0[0] + h10 * m0[0] + h01 * p1[0] + h11 * m1[0],
        h00 * p0[1] + h10 * m0[1] + h01 * p1[1] + h11 * m1[1],
    ]
}

/// Number of output points owned by each segment (the knot plus its
/// interior samples). Every segment gets at least one; the total is `count`.
fn allocate(lengths: &[f64], count: usize) -> Vec<usize> {
    let n = lengths.len();
    let extra = count - n;
    let total: f64 = lengths.iter().sum();
    let ideal: Vec<f64> = lengths.iter().map(|l| extra as f64 * l / total).collect();
    let mut alloc: Vec<usize> = ideal.iter().map(|x| 1 + x.floor() as usize).collect();
    let assigned: usize = alloc.iter().sum();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let fa = ideal[a] - ideal[a].floor();
        let fb = ideal[b] - ideal[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().take(count - assigned) {
        alloc[i] += 1;
    }
    alloc
}
