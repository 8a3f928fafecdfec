use alloc::vec::Vec;

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Vertices of the lower convex hull of `points`, by increasing first
/// coordinate. Collinear interior points are dropped.
pub fn lower_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup_by(|b, a| a.0 == b.0);
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

/// Lower convex envelope of an achievable `(distortion, rate)` point set
/// under time sharing and free disposal of distortion: the largest convex
/// nonincreasing function below every point. `None` left of every point.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    vertices: Vec<(f64, f64)>,
}

impl Envelope {
    pub fn new(points: &[(f64, f64)]) -> Self {
        let mut v = lower_hull(points);
        // keep the decreasing part: beyond the minimum rate nothing improves
        if let Some(min_at) = v
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1).then(a.0.cmp(&b.0)))
            .map(|(i, _)| i)
        {
            v.truncate(min_at + 1);
        }
        Envelope { vertices: v }
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    pub fn eval(&self, d: f64) -> Option<f64> {
        let v = &self.vertices;
        let first = v.first()?;
        if d < first.0 {
            return None;
        }
        for w in v.windows(2) {
            let (a, b) = (w[0], w[1]);
            if d <= b.0 {
                let t = (d - a.0) / (b.0 - a.0);
                return Some(a.1 + t * (b.1 - a.1));
            }
        }
        Some(v[v.len() - 1].1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_hull() {
        let h = lower_hull(&[(0.0, 1.0), (1.0, 0.0), (0.5, 0.8), (0.5, 0.2), (0.2, 0.9)]);
        assert_eq!(h, [(0.0, 1.0), (0.5, 0.2), (1.0, 0.0)]);
    }

    #[test]
    fn envelope_is_nonincreasing_and_below_points() {
        let pts = [(0.0, 1.0), (0.3, 0.3), (0.6, 0.1), (0.8, 0.4)];
        let e = Envelope::new(&pts);
        assert_eq!(e.eval(-0.1), None);
        assert_eq!(e.eval(0.9), Some(0.1));
        for p in pts {
            assert!(e.eval(p.0).unwrap() <= p.1 + 1e-15);
        }
        assert!((e.eval(0.15).unwrap() - 0.65).abs() < 1e-12);
    }
}
