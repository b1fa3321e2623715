//! Deterministic sample corpus of traced car side silhouettes.
//!
//! Each outline is built from a handful of body dimensions (overhangs,
//! wheel size, hood, windshield, roof and tail lines), walked
//! counterclockwise from the front underside, and resampled to 60-80
//! points with a little hand-tracing jitter, the way a designer would click
//! around a photograph.

use std::f64::consts::PI;

use rand::Rng;

use crate::codec::{ClosedCurve, Point};
use crate::seeded_rng;

/// Seed of the built-in corpus.
pub const CORPUS_SEED: u64 = 2010;

/// Number of silhouettes in the built-in corpus.
pub const CORPUS_SIZE: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BodyStyle {
    Sedan,
    Hatchback,
    Suv,
    Sports,
    Wagon,
    Minivan,
}

const STYLES: [BodyStyle; 6] = [
    BodyStyle::Sedan,
    BodyStyle::Hatchback,
    BodyStyle::Suv,
    BodyStyle::Sports,
    BodyStyle::Wagon,
    BodyStyle::Minivan,
];

/// Side-view dimensions in metres. `x` runs from the front bumper (0) to
/// the tail (`length`), `y` up from the ground.
#[derive(Debug, Clone, PartialEq)]
pub struct CarProfile {
    pub style: BodyStyle,
    pub length: f64,
    pub wheel_radius: f64,
    pub clearance: f64,
    pub front_overhang: f64,
    pub rear_overhang: f64,
    pub nose_height: f64,
    pub cowl_x: f64,
    pub cowl_height: f64,
    pub windshield_top_x: f64,
    pub roof_height: f64,
    pub roof_end_x: f64,
    pub deck_x: f64,
    pub deck_height: f64,
    pub tail_height: f64,
}

impl CarProfile {
    pub fn random<R: Rng + ?Sized>(style: BodyStyle, rng: &mut R) -> Self {
        let mut u = |lo: f64, hi: f64| lo + (hi - lo) * rng.random::<f64>();
        let (length, roof_height, cowl_height, hood_frac, rake, roof_frac, deck_frac, deck_height) = match style {
            BodyStyle::Sedan => (u(4.4, 5.1), u(1.38, 1.5), u(0.95, 1.05), u(0.26, 0.32), u(0.75, 0.95), u(0.24, 0.32), u(0.13, 0.19), u(0.98, 1.1)),
            BodyStyle::Hatchback => (u(3.6, 4.3), u(1.42, 1.55), u(0.92, 1.02), u(0.17, 0.23), u(0.6, 0.8), u(0.34, 0.42), u(0.0, 0.03), u(0.95, 1.1)),
            BodyStyle::Suv => (u(4.3, 4.9), u(1.65, 1.85), u(1.08, 1.2), u(0.2, 0.25), u(0.55, 0.75), u(0.42, 0.5), u(0.0, 0.02), u(1.05, 1.25)),
            BodyStyle::Sports => (u(4.2, 4.6), u(1.15, 1.3), u(0.8, 0.9), u(0.3, 0.38), u(1.0, 1.25), u(0.12, 0.2), u(0.06, 0.12), u(0.88, 0.98)),
            BodyStyle::Wagon => (u(4.5, 5.0), u(1.45, 1.55), u(0.95, 1.05), u(0.24, 0.3), u(0.7, 0.9), u(0.44, 0.5), u(0.0, 0.02), u(1.0, 1.15)),
            BodyStyle::Minivan => (u(4.6, 5.1), u(1.7, 1.85), u(1.05, 1.15), u(0.08, 0.13), u(0.9, 1.15), u(0.52, 0.6), u(0.0, 0.02), u(1.05, 1.2)),
        };
        let wheel_radius = u(0.3, 0.38);
        let clearance = u(0.14, 0.22) + if style == BodyStyle::Suv { 0.06 } else { 0.0 };
        let front_overhang = u(0.82, 1.0);
        let rear_overhang = u(0.8, 1.05);
        let nose_height = u(0.55, 0.7) + if style == BodyStyle::Suv { 0.1 } else { 0.0 };
        let tail_height = u(0.5, 0.62);
        let cowl_x = length * hood_frac + 0.2;
        let windshield_top_x = cowl_x + rake;
        let roof_end_x = (windshield_top_x + roof_frac * length).min(length - 0.25);
        let deck_x = length - 0.06 - deck_frac * length;
        CarProfile {
            style,
            length,
            wheel_radius,
            clearance,
            front_overhang,
            rear_overhang,
            nose_height,
            cowl_x,
            cowl_height,
            windshield_top_x,
            roof_height,
            roof_end_x,
            deck_x: deck_x.max(roof_end_x + 0.05),
            deck_height: deck_height.min(roof_height - 0.2),
            tail_height,
        }
    }

    /// Dense counterclockwise outline starting under the front bumper.
    pub fn outline(&self) -> Vec<Point> {
        let mut path: Vec<Point> = Vec::new();
        let c = self.clearance;
        let r = self.wheel_radius;
        let l = self.length;

        path.push([0.12, c + 0.02]);
        for center in [self.front_overhang, l - self.rear_overhang] {
            let lift = ((r - c) / r).asin();
            let (start, end) = (PI + lift, 2.0 * PI - lift);
            for k in 0..=12 {
                let phi = start + (end - start) * k as f64 / 12.0;
                path.push([center + r * phi.cos(), r + r * phi.sin()]);
            }
        }
        path.push([l - 0.12, c + 0.03]);
        path.push([l - 0.02, self.tail_height * 0.6]);
        path.push([l, self.tail_height]);
        path.push([l - 0.03, 0.5 * (self.tail_height + self.deck_height)]);
        path.push([l - 0.06, self.deck_height]);
        path.push([self.deck_x, self.deck_height + 0.02]);
        // rear window / tailgate up to the roof, slightly rounded
        let roof_drop = 0.03;
        path.push([
            0.5 * (self.deck_x + self.roof_end_x) + 0.04,
            0.5 * (self.deck_height + self.roof_height),
        ]);
        path.push([self.roof_end_x, self.roof_height - roof_drop]);
        let roof_mid = 0.5 * (self.roof_end_x + self.windshield_top_x);
        path.push([roof_mid, self.roof_height]);
        path.push([self.windshield_top_x, self.roof_height - roof_drop]);
        path.push([
            0.5 * (self.windshield_top_x + self.cowl_x) - 0.03,
            0.5 * (self.roof_height + self.cowl_height),
        ]);
        path.push([self.cowl_x, self.cowl_height]);
        path.push([0.5 * self.cowl_x, 0.5 * (self.cowl_height + self.nose_height) + 0.04]);
        path.push([0.04, self.nose_height]);
        path.push([0.0, 0.5 * (self.nose_height + c)]);
        path.push([0.03, c + 0.08]);
        path
    }
}

/// Resamples a closed path to `count` points equally spaced in arc length.
fn resample(path: &[Point], count: usize) -> Vec<Point> {
    let n = path.len();
    let seg: Vec<f64> = (0..n)
        .map(|i| {
            let (a, b) = (path[i], path[(i + 1) % n]);
            (b[0] - a[0]).hypot(b[1] - a[1])
        })
        .collect();
    let total: f64 = seg.iter().sum();
    let mut out = Vec::with_capacity(count);
    let (mut i, mut before) = (0usize, 0.0);
    for k in 0..count {
        let s = total * k as f64 / count as f64;
        while before + seg[i] < s {
            before += seg[i];
            i += 1;
        }
        let f = if seg[i] > 0.0 { (s - before) / seg[i] } else { 0.0 };
        let (a, b) = (path[i], path[(i + 1) % n]);
        out.push([a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])]);
    }
    out
}

/// Traced silhouette of `profile` with `count` clicks and uniform jitter of
/// at most `jitter` metres per coordinate.
pub fn trace<R: Rng + ?Sized>(profile: &CarProfile, count: usize, jitter: f64, rng: &mut R) -> ClosedCurve {
    let points = resample(&profile.outline(), count)
        .into_iter()
        .map(|p| {
            [
                p[0] + jitter * (2.0 * rng.random::<f64>() - 1.0),
                p[1] + jitter * (2.0 * rng.random::<f64>() - 1.0),
            ]
        })
        .collect();
    ClosedCurve::new(points).expect("resampled outline has distinct points")
}

/// Generates `size` traced silhouettes cycling through the body styles.
pub fn generate(size: usize, seed: u64) -> Vec<ClosedCurve> {
    let mut rng = seeded_rng(seed);
    (0..size)
        .map(|i| {
            let profile = CarProfile::random(STYLES[i % STYLES.len()], &mut rng);
            let count = rng.random_range(60..=80);
            trace(&profile, count, 0.004, &mut rng)
        })
        .collect()
}

/// The built-in 30-silhouette corpus.
pub fn sample_corpus() -> Vec<ClosedCurve> {
    generate(CORPUS_SIZE, CORPUS_SEED)
}
