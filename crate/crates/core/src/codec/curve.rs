use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A point in the drawing plane.
pub type Point = [f64; 2];

/// An ordered, implicitly closed polyline: the last point connects back to
/// the first.
///
/// Construction rejects fewer than three points, non-finite coordinates and
/// zero-length segments (including the closing one), so every curve has a
/// strictly positive perimeter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveFile", into = "CurveFile")]
pub struct ClosedCurve {
    points: Vec<Point>,
}

/// Wire form of a traced curve: `{"points": [[x, y], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveFile {
    pub points: Vec<Point>,
}

impl TryFrom<CurveFile> for ClosedCurve {
    type Error = Error;

    fn try_from(file: CurveFile) -> Result<Self> {
        ClosedCurve::new(file.points)
    }
}

impl From<ClosedCurve> for CurveFile {
    fn from(curve: ClosedCurve) -> Self {
        CurveFile {
            points: curve.points,
        }
    }
}

impl ClosedCurve {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::invalid(format!(
                "a closed curve needs at least 3 points, got {}",
                points.len()
            )));
        }
        if let Some(i) = points
            .iter()
            .position(|p| !p[0].is_finite() || !p[1].is_finite())
        {
            return Err(Error::invalid(format!("point {i} is not finite")));
        }
        let n = points.len();
        for i in 0..n {
            let (a, b) = (points[i], points[(i + 1) % n]);
            if distance(a, b) <= 0.0 {
                return Err(Error::invalid(format!(
                    "zero-length segment between points {i} and {}",
                    (i + 1) % n
                )));
            }
        }
        Ok(ClosedCurve { points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Lengths of the segments `i -> i+1`, the last one being the closing segment.
    pub fn segment_lengths(&self) -> Vec<f64> {
        let n = self.points.len();
        (0..n)
            .map(|i| distance(self.points[i], self.points[(i + 1) % n]))
            .collect()
    }

    pub fn perimeter(&self) -> f64 {
        self.segment_lengths().iter().sum()
    }

    /// Shoelace area; positive for counterclockwise traversal.
    pub fn signed_area(&self) -> f64 {
        let n = self.points.len();
        0.5 * (0..n)
            .map(|i| {
                let (a, b) = (self.points[i], self.points[(i + 1) % n]);
                a[0] * b[1] - b[0] * a[1]
            })
            .sum::<f64>()
    }

    /// Returns the curve traversed counterclockwise, keeping the first point.
    pub fn counterclockwise(&self) -> ClosedCurve {
        if self.signed_area() >= 0.0 {
            return self.clone();
        }
        let mut points = Vec::with_capacity(self.points.len());
        points.push(self.points[0]);
        points.extend(self.points[1..].iter().rev());
        ClosedCurve { points }
    }

    /// `(min_x, min_y, max_x, max_y)`
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        self.points.iter().fold(
            (
                f64::INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::NEG_INFINITY,
            ),
            |(x0, y0, x1, y1), p| (x0.min(p[0]), y0.min(p[1]), x1.max(p[0]), y1.max(p[1])),
        )
    }

    pub fn bounding_diagonal(&self) -> f64 {
        let (x0, y0, x1, y1) = self.bounding_box();
        (x1 - x0).hypot(y1 - y0)
    }

    /// Applies `p -> scale * R(angle) * p + offset` to every point.
    pub fn similarity_transform(&self, angle: f64, scale: f64, offset: Point) -> Result<ClosedCurve> {
        let (s, c) = angle.sin_cos();
        let points = self
            .points
            .iter()
            .map(|p| {
                [
                    scale * (c * p[0] - s * p[1]) + offset[0],
                    scale * (s * p[0] + c * p[1]) + offset[1],
                ]
            })
            .collect();
        ClosedCurve::new(points)
    }

    /// Same points, traversal starting at index `start`.
    pub fn rotate_start(&self, start: usize) -> ClosedCurve {
        let mut points = self.points.clone();
        points.rotate_left(start % self.points.len());
        ClosedCurve { points }
    }
}

pub(crate) fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Normalized cumulative arc length `t_k = L_k / L` of every point.
///
/// `t_0 = 0` and the sequence is strictly increasing inside `[0, 1)`; the
/// closing segment counts toward the perimeter `L`.
pub fn arc_length_params(curve: &ClosedCurve) -> Result<Vec<f64>> {
    let lengths = curve.segment_lengths();
    let total: f64 = lengths.iter().sum();
    if !(total > 0.0) {
        return Err(Error::invalid("curve has zero perimeter"));
    }
    let mut acc = 0.0;
    Ok(lengths
        .iter()
        .map(|l| {
            let t = acc / total;
            acc += l;
            t
        })
        .collect())
}

/// Symmetric Hausdorff distance between the two point sets, divided by the
/// bounding-box diagonal of `original`.
pub fn reconstruction_error(original: &ClosedCurve, reconstructed: &ClosedCurve) -> Result<f64> {
    let diagonal = original.bounding_diagonal();
    if !(diagonal > 0.0) {
        return Err(Error::invalid("original curve has a degenerate bounding box"));
    }
    let forward = directed_hausdorff(original.points(), reconstructed.points());
    let backward = directed_hausdorff(reconstructed.points(), original.points());
    Ok(forward.max(backward) / diagonal)
}

fn directed_hausdorff(from: &[Point], to: &[Point]) -> f64 {
    from.iter()
        .map(|a| {
            to.iter()
                .map(|b| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> ClosedCurve {
        ClosedCurve::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    #[test]
    fn rejects_short_and_repeated_points() {
        assert!(ClosedCurve::new(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
        assert!(ClosedCurve::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 0.0]]).is_err());
        // closing segment of zero length
        assert!(ClosedCurve::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 0.0]]).is_err());
        assert!(ClosedCurve::new(vec![[0.0, 0.0], [1.0, f64::NAN], [1.0, 1.0]]).is_err());
    }

    #[test]
    fn square_params_are_quarters() {
        assert_eq!(arc_length_params(&square()).unwrap(), vec![0.0, 0.25, 0.5, 0.75]);
    }

    #[test]
    fn right_triangle_params() {
        let tri = ClosedCurve::new(vec![[0.0, 0.0], [3.0, 0.0], [0.0, 4.0]]).unwrap();
        let t = arc_length_params(&tri).unwrap();
        // sides 3, 5, 4: cumulative lengths 0, 3, 8 of 12
        let expected = [0.0, 3.0 / 12.0, 8.0 / 12.0];
        for (a, b) in t.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn two_points_are_rejected_by_the_json_form() {
        let err = serde_json::from_str::<ClosedCurve>(r#"{"points": [[0, 0], [1, 1]]}"#);
        assert!(err.is_err());
    }

    #[test]
    fn orientation_is_fixed_to_counterclockwise() {
        let cw = ClosedCurve::new(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(cw.signed_area() < 0.0);
        let ccw = cw.counterclockwise();
        assert!(ccw.signed_area() > 0.0);
        assert_eq!(ccw.points()[0], [0.0, 0.0]);
        assert_eq!(square().counterclockwise(), square());
    }

    #[test]
    fn hausdorff_error_of_identical_and_shifted_squares() {
        let sq = square();
        assert_eq!(reconstruction_error(&sq, &sq).unwrap(), 0.0);
        let shifted = sq.similarity_transform(0.0, 1.0, [0.1, 0.0]).unwrap();
        let err = reconstruction_error(&sq, &shifted).unwrap();
        assert!((err - 0.1 / 2f64.sqrt()).abs() < 1e-12);
    }
}
