//! Clamped B-spline trajectories over a control polygon.
//!
//! The curve is sampled at `m` uniformly spaced parameters. Because the knot
//! vector and the sample parameters only depend on `(n, K, m)`, the nonzero
//! basis weights are tabulated once in a [`SplineSampler`] and reused for
//! every candidate polygon.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::wrap_angle;

pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_SAMPLES: usize = 200;

/// Axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn contains(&self, p: [f64; 3]) -> bool {
        (0..3).all(|a| p[a] >= self.min[a] && p[a] <= self.max[a])
    }

    /// Smallest box around `points`.
    pub fn around(points: &[[f64; 3]]) -> Self {
        let mut b = Aabb { min: [f64::INFINITY; 3], max: [f64::NEG_INFINITY; 3] };
        for p in points {
            for a in 0..3 {
                b.min[a] = b.min[a].min(p[a]);
                b.max[a] = b.max[a].max(p[a]);
            }
        }
        b
    }
}

/// Fixed endpoints plus the free interior control points.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPolygon {
    points: Vec<[f64; 3]>,
    bounds: Vec<Aabb>,
}

impl ControlPolygon {
    /// `bounds` holds one box per interior point.
    pub fn new(start: [f64; 3], goal: [f64; 3], interior: &[[f64; 3]], bounds: Vec<Aabb>) -> Result<Self> {
        if bounds.len() != interior.len() {
            return Err(Error::Config(format!("{} interior points but {} bounds boxes", interior.len(), bounds.len())));
        }
        for (i, (p, b)) in interior.iter().zip(&bounds).enumerate() {
            if !b.contains(*p) {
                return Err(Error::Config(format!("control point {i} {p:?} lies outside its bounds")));
            }
        }
        let mut points = Vec::with_capacity(interior.len() + 2);
        points.push(start);
        points.extend_from_slice(interior);
        points.push(goal);
        Ok(Self { points, bounds })
    }

    /// Polygon with no bounds on the interior points.
    pub fn unbounded(points: Vec<[f64; 3]>) -> Self {
        let inner = points.len().saturating_sub(2);
        let everywhere = Aabb { min: [f64::NEG_INFINITY; 3], max: [f64::INFINITY; 3] };
        Self { points, bounds: vec![everywhere; inner] }
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn bounds(&self) -> &[Aabb] {
        &self.bounds
    }

    pub fn start(&self) -> [f64; 3] {
        self.points[0]
    }

    pub fn goal(&self) -> [f64; 3] {
        *self.points.last().expect("polygon has points")
    }

    /// Sum of control-point chords; an upper bound on the curve length.
    pub fn chord_length(&self) -> f64 {
        self.points.windows(2).map(|w| distance(w[0], w[1])).sum()
    }
}

pub fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2) + (b[2] - a[2]).powi(2)).sqrt()
}

/// Knot vector with validated shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Knots(Vec<f64>);

impl Knots {
    /// Clamped uniform knots on `[0, 1]` for `n` control points of order `order`.
    pub fn clamped_uniform(n: usize, order: usize) -> Result<Self> {
        if order == 0 || n < order {
            return Err(Error::Order { order, points: n });
        }
        let inner = n - order;
        let mut k = vec![0.0; order];
        k.extend((1..=inner).map(|i| i as f64 / (inner + 1) as f64));
        k.extend(std::iter::repeat_n(1.0, order));
        Ok(Knots(k))
    }

    /// Accepts a custom knot sequence; it must be non-decreasing and clamped
    /// (first and last values repeated `order` times).
    pub fn new(knots: Vec<f64>, order: usize) -> Result<Self> {
        if order == 0 || knots.len() < 2 * order {
            return Err(Error::InvalidKnots(format!("{} knots cannot carry order {order}", knots.len())));
        }
        if knots.iter().any(|k| !k.is_finite()) || knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidKnots("knots must be finite and non-decreasing".into()));
        }
        let (first, last) = (knots[0], knots[knots.len() - 1]);
        if knots[..order].iter().any(|&k| k != first) || knots[knots.len() - order..].iter().any(|&k| k != last) {
            return Err(Error::InvalidKnots(format!("end knots must repeat {order} times")));
        }
        if first >= last {
            return Err(Error::InvalidKnots("knot range is empty".into()));
        }
        Ok(Knots(knots))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Number of basis functions for `order`.
    pub fn basis_count(&self, order: usize) -> usize {
        self.0.len() - order
    }

    /// Span index `s` with `knots[s] <= t < knots[s+1]`; the top end maps onto
    /// the last nonempty span.
    fn span(&self, order: usize, t: f64) -> usize {
        let k = &self.0;
        let n = self.basis_count(order);
        if t >= k[n] {
            return n - 1;
        }
        let mut lo = order - 1;
        let mut hi = n;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if t < k[mid] {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }
}

/// Cox–de Boor recursion for `B_{i,K}(t)`. `0/0` terms are taken as 0 and the
/// top end of the parameter range belongs to the last basis function.
pub fn blending(i: usize, order: usize, t: f64, knots: &Knots) -> f64 {
    let k = knots.as_slice();
    if order == 1 {
        let end = k[k.len() - 1];
        let inside = k[i] <= t && t < k[i + 1];
        let at_end = t == end && k[i + 1] == end && k[i] < k[i + 1];
        return if inside || at_end { 1.0 } else { 0.0 };
    }
    let mut value = 0.0;
    let left = k[i + order - 1] - k[i];
    if left > 0.0 {
        value += (t - k[i]) / left * blending(i, order - 1, t, knots);
    }
    let right = k[i + order] - k[i + 1];
    if right > 0.0 {
        value += (k[i + order] - t) / right * blending(i + 1, order - 1, t, knots);
    }
    value
}

/// The `order` nonzero basis values on `span` (inverted-triangle scheme).
fn nonzero_basis(knots: &[f64], span: usize, order: usize, t: f64, out: &mut [f64]) {
    let degree = order - 1;
    let mut left = vec![0.0; order];
    let mut right = vec![0.0; order];
    out[0] = 1.0;
    for j in 1..=degree {
        left[j] = t - knots[span + 1 - j];
        right[j] = knots[span + j] - t;
        let mut saved = 0.0;
        for r in 0..j {
            let temp = out[r] / (right[r + 1] + left[j - r]);
            out[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        out[j] = saved;
    }
}

/// One point of a sampled trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub position: [f64; 3],
    pub yaw: f64,
    pub pitch: f64,
    /// Distance to the next sample; 0 for the last one.
    pub segment_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

impl Trajectory {
    /// Builds samples from positions, filling in heading, pitch and segment
    /// lengths from consecutive points.
    pub fn from_positions(ts: &[f64], positions: &[[f64; 3]]) -> Self {
        let m = positions.len();
        let mut samples = Vec::with_capacity(m);
        let (mut yaw, mut pitch) = (0.0, 0.0);
        for j in 0..m {
            let p = positions[j];
            let mut seg = 0.0;
            if j + 1 < m {
                let q = positions[j + 1];
                let (dx, dy, dz) = (q[0] - p[0], q[1] - p[1], q[2] - p[2]);
                let horizontal = dx.hypot(dy);
                seg = (horizontal * horizontal + dz * dz).sqrt();
                if seg > 0.0 {
                    yaw = wrap_angle(dy.atan2(dx)) + 0.0;
                    // Down-positive depth: descending is nose-down
                    pitch = (-dz).atan2(horizontal) + 0.0;
                }
            }
            samples.push(Sample { t: ts[j], position: p, yaw, pitch, segment_length: seg });
        }
        Self { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn start(&self) -> [f64; 3] {
        self.samples[0].position
    }

    pub fn end(&self) -> [f64; 3] {
        self.samples[self.samples.len() - 1].position
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,X,Y,Z,psi,theta,seg_len")?;
        for s in &self.samples {
            let [x, y, z] = s.position;
            writeln!(w, "{},{},{},{},{},{},{}", s.t, x, y, z, s.yaw, s.pitch, s.segment_length)?;
        }
        Ok(())
    }
}

/// Polyline length of the sampled curve.
pub fn path_length(traj: &Trajectory) -> f64 {
    traj.samples.iter().map(|s| s.segment_length).sum()
}

/// Precomputed basis table for `n` control points, order `order`, `m` samples.
#[derive(Debug, Clone)]
pub struct SplineSampler {
    n: usize,
    order: usize,
    ts: Vec<f64>,
    spans: Vec<usize>,
    weights: Vec<f64>,
}

impl SplineSampler {
    pub fn new(n: usize, order: usize, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Config(format!("need at least 2 samples, got {m}")));
        }
        let knots = Knots::clamped_uniform(n, order)?;
        let ts: Vec<f64> = (0..m).map(|j| if j + 1 == m { 1.0 } else { j as f64 / (m - 1) as f64 }).collect();
        let mut spans = Vec::with_capacity(m);
        let mut weights = vec![0.0; m * order];
        for (j, &t) in ts.iter().enumerate() {
            let s = knots.span(order, t);
            nonzero_basis(knots.as_slice(), s, order, t, &mut weights[j * order..(j + 1) * order]);
            spans.push(s);
        }
        Ok(Self { n, order, ts, spans, weights })
    }

    pub fn control_points(&self) -> usize {
        self.n
    }

    pub fn samples(&self) -> usize {
        self.ts.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.ts
    }

    pub fn positions_into(&self, points: &[[f64; 3]], out: &mut Vec<[f64; 3]>) {
        debug_assert_eq!(points.len(), self.n);
        out.clear();
        let k = self.order;
        for (j, &span) in self.spans.iter().enumerate() {
            let w = &self.weights[j * k..(j + 1) * k];
            let first = span + 1 - k;
            // offsets from the dominant point keep endpoints and constant
            // coordinates exact
            let top = (0..k).fold(0, |a, r| if w[r] > w[a] { r } else { a });
            let base = points[first + top];
            let mut p = base;
            for (r, &b) in w.iter().enumerate() {
                if r == top {
                    continue;
                }
                let c = points[first + r];
                p[0] += b * (c[0] - base[0]);
                p[1] += b * (c[1] - base[1]);
                p[2] += b * (c[2] - base[2]);
            }
            out.push(p);
        }
    }

    pub fn trajectory(&self, points: &[[f64; 3]]) -> Result<Trajectory> {
        if points.len() != self.n {
            return Err(Error::Config(format!("sampler built for {} points, got {}", self.n, points.len())));
        }
        let mut pos = Vec::with_capacity(self.ts.len());
        self.positions_into(points, &mut pos);
        Ok(Trajectory::from_positions(&self.ts, &pos))
    }
}

/// Samples the polygon's clamped B-spline of order `order` at `m` parameters.
pub fn evaluate(poly: &ControlPolygon, order: usize, m: usize) -> Result<Trajectory> {
    SplineSampler::new(poly.points().len(), order, m)?.trajectory(poly.points())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rng::Stream;
    use std::f64::consts::PI;

    /// Textbook de Boor evaluation, independent of the tabulated sampler.
    pub(crate) fn de_boor(points: &[[f64; 3]], order: usize, t: f64) -> [f64; 3] {
        let n = points.len();
        let knots = Knots::clamped_uniform(n, order).unwrap();
        let k = knots.as_slice();
        let p = order - 1;
        let mut s = p;
        while s + 1 < n && t >= k[s + 1] {
            s += 1;
        }
        let mut d: Vec<[f64; 3]> = (0..=p).map(|j| points[j + s - p]).collect();
        for r in 1..=p {
            for j in (r..=p).rev() {
                let i = j + s - p;
                let denom = k[i + p + 1 - r] - k[i];
                let alpha = if denom > 0.0 { (t - k[i]) / denom } else { 0.0 };
                for a in 0..3 {
                    d[j][a] = (1.0 - alpha) * d[j - 1][a] + alpha * d[j][a];
                }
            }
        }
        d[p]
    }

    pub(crate) fn random_polygon(rng: &mut Stream, n: usize) -> Vec<[f64; 3]> {
        (0..n).map(|_| [rng.uniform_in(-500.0, 500.0), rng.uniform_in(-500.0, 500.0), rng.uniform_in(0.0, 300.0)]).collect()
    }

    #[test]
    fn order_one_is_span_indicator() {
        let knots = Knots::new(vec![0.0, 0.25, 0.5, 0.75, 1.0], 1).unwrap();
        for (t, span) in [(0.0, 0), (0.1, 0), (0.25, 1), (0.6, 2), (0.99, 3), (1.0, 3)] {
            for i in 0..4 {
                assert_eq!(blending(i, 1, t, &knots), if i == span { 1.0 } else { 0.0 }, "t={t} i={i}");
            }
        }
    }

    #[test]
    fn clamped_start_and_end() {
        let knots = Knots::clamped_uniform(6, 3).unwrap();
        assert_eq!(blending(0, 3, 0.0, &knots), 1.0);
        for i in 1..6 {
            assert_eq!(blending(i, 3, 0.0, &knots), 0.0);
        }
        assert_eq!(blending(5, 3, 1.0, &knots), 1.0);
    }

    #[test]
    fn partition_of_unity() {
        let mut rng = Stream::new(3, &[]);
        for n in 3..10 {
            for order in 1..=n.min(5) {
                let knots = Knots::clamped_uniform(n, order).unwrap();
                for _ in 0..50 {
                    let t = rng.uniform();
                    let sum: f64 = (0..n).map(|i| blending(i, order, t, &knots)).sum();
                    assert!((sum - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn knot_validation() {
        assert!(Knots::new(vec![0.0, 0.0, 0.5, 0.4, 1.0, 1.0], 2).is_err());
        assert!(Knots::new(vec![0.0, 0.1, 0.5, 1.0, 1.0], 2).is_err());
        assert!(Knots::new(vec![0.0, 0.0], 2).is_err());
        assert!(Knots::new(vec![0.0, 0.0, 0.3, 1.0, 1.0], 2).is_ok());
        assert!(matches!(Knots::clamped_uniform(2, 3), Err(Error::Order { order: 3, points: 2 })));
    }

    #[test]
    fn identical_points_collapse() {
        let p = [12.0, -3.0, 40.0];
        let traj = evaluate(&ControlPolygon::unbounded(vec![p; 6]), 3, 50).unwrap();
        assert!(traj.samples.iter().all(|s| s.position == p && s.yaw == 0.0 && s.pitch == 0.0));
        assert_eq!(path_length(&traj), 0.0);
    }

    #[test]
    fn straight_line_along_x() {
        let pts: Vec<[f64; 3]> = (0..7).map(|i| [i as f64 * 50.0, 0.0, 20.0]).collect();
        let traj = evaluate(&ControlPolygon::unbounded(pts), 3, 200).unwrap();
        for s in &traj.samples {
            assert_eq!(s.yaw, 0.0);
            assert_eq!(s.pitch, 0.0);
        }
        assert!((path_length(&traj) - 300.0).abs() < 1e-9);
    }

    #[test]
    fn sampler_matches_de_boor() {
        let mut rng = Stream::new(21, &[]);
        for _ in 0..20 {
            let pts = random_polygon(&mut rng, 6);
            let traj = evaluate(&ControlPolygon::unbounded(pts.clone()), 3, 101).unwrap();
            for s in &traj.samples {
                let e = de_boor(&pts, 3, s.t);
                for a in 0..3 {
                    assert!((s.position[a] - e[a]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn endpoints_are_exact() {
        let mut rng = Stream::new(8, &[]);
        for n in 3..10 {
            let pts = random_polygon(&mut rng, n);
            let traj = evaluate(&ControlPolygon::unbounded(pts.clone()), 3, 64).unwrap();
            assert_eq!(traj.start(), pts[0]);
            assert_eq!(traj.end(), pts[n - 1]);
            assert_eq!(traj.samples[63].t, 1.0);
            assert_eq!(traj.samples[63].segment_length, 0.0);
        }
    }

    #[test]
    fn too_few_points() {
        let poly = ControlPolygon::unbounded(vec![[0.0; 3], [1.0; 3]]);
        assert!(matches!(evaluate(&poly, 3, 10), Err(Error::Order { .. })));
        assert!(evaluate(&ControlPolygon::unbounded(vec![[0.0; 3]; 4]), 3, 1).is_err());
    }

    #[test]
    fn quarter_circle_length() {
        // dense polyline control polygon hugging the arc; the curve follows it
        let pts: Vec<[f64; 3]> = (0..=400)
            .map(|i| {
                let a = i as f64 / 400.0 * PI / 2.0;
                [100.0 * a.cos(), 100.0 * a.sin(), 0.0]
            })
            .collect();
        let traj = evaluate(&ControlPolygon::unbounded(pts), 3, 1000).unwrap();
        let expected = 50.0 * PI;
        assert!((path_length(&traj) - expected).abs() / expected < 1e-3);
    }

    #[test]
    fn bounded_polygon_rejects_escapees() {
        let b = Aabb { min: [0.0; 3], max: [10.0; 3] };
        assert!(ControlPolygon::new([0.0; 3], [5.0; 3], &[[1.0, 2.0, 3.0]], vec![b]).is_ok());
        assert!(ControlPolygon::new([0.0; 3], [5.0; 3], &[[11.0, 2.0, 3.0]], vec![b]).is_err());
        assert!(ControlPolygon::new([0.0; 3], [5.0; 3], &[[1.0, 2.0, 3.0]], vec![]).is_err());
    }

    #[test]
    fn pitch_sign_follows_depth() {
        let pts = vec![[0.0, 0.0, 0.0], [10.0, 0.0, 10.0], [20.0, 0.0, 20.0]];
        let traj = evaluate(&ControlPolygon::unbounded(pts), 2, 5).unwrap();
        // going deeper is nose-down
        assert!((traj.samples[0].pitch + PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn csv_header_and_rows() {
        let traj = evaluate(&ControlPolygon::unbounded(vec![[0.0; 3], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]), 2, 3).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,X,Y,Z,psi,theta,seg_len");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[3], "1,2,0,0,0,0,0");
    }
}
