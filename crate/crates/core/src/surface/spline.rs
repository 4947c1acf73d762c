//! Closed planar curves through control points.

use super::{Jet, ParamDomain, ParamRange, Parametrization};
use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Periodic cubic interpolating spline with knots at the integers.
#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    points: Vec<Vec3>,
    second: Vec<Vec3>,
}

impl PeriodicSpline {
    pub fn new(points: Vec<Vec3>) -> Result<Self> {
        let m = points.len();
        if m < 4 {
            return Err(Error::InvalidSurface(format!(
                "a closed spline needs at least 4 control points, got {m}"
            )));
        }
        for i in 0..m {
            if (points[(i + 1) % m] - points[i]).norm() < 1e-12 {
                return Err(Error::InvalidSurface(format!(
                    "control points {i} and {} coincide",
                    (i + 1) % m
                )));
            }
        }
        // M[i-1] + 4 M[i] + M[i+1] = 6 (P[i+1] - 2 P[i] + P[i-1]); the system is
        // diagonally dominant, so Gauss-Seidel converges geometrically.
        let rhs: Vec<Vec3> = (0..m)
            .map(|i| (points[(i + 1) % m] - points[i] * 2.0 + points[(i + m - 1) % m]) * 6.0)
            .collect();
        let mut second = vec![Vec3::zeros(); m];
        for _ in 0..200 {
            let mut change = 0.0f64;
            for i in 0..m {
                let new = (rhs[i] - second[(i + m - 1) % m] - second[(i + 1) % m]) / 4.0;
                change = change.max((new - second[i]).norm());
                second[i] = new;
            }
            if change < 1e-16 {
                break;
            }
        }
        Ok(PeriodicSpline { points, second })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Parametrization for PeriodicSpline {
    fn ambient_dim(&self) -> usize {
        2
    }
    fn domain(&self) -> ParamDomain {
        ParamDomain {
            ranges: vec![ParamRange::new(0.0, self.points.len() as f64, true)],
            closed: true,
            boundary_sides: [false; 4],
        }
    }
    fn breakpoints(&self) -> Option<Vec<f64>> {
        Some((0..=self.points.len()).map(|i| i as f64).collect())
    }
    fn jet(&self, u: [f64; 2]) -> Jet {
        let m = self.points.len();
        let x = u[0].rem_euclid(m as f64);
        let i = (x.floor() as usize).min(m - 1);
        let t = x - i as f64;
        let j = (i + 1) % m;
        let (p0, p1) = (self.points[i], self.points[j]);
        let (m0, m1) = (self.second[i], self.second[j]);
        let s = 1.0 - t;
        Jet {
            point: p0 * s + p1 * t + m0 * ((s * s * s - s) / 6.0) + m1 * ((t * t * t - t) / 6.0),
            du: [
                p1 - p0 + m0 * ((1.0 - 3.0 * s * s) / 6.0) + m1 * ((3.0 * t * t - 1.0) / 6.0),
                Vec3::zeros(),
            ],
            d2: [m0 * s + m1 * t, Vec3::zeros(), Vec3::zeros()],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::polar;

    #[test]
    fn interpolates_and_is_c2() {
        let pts: Vec<Vec3> = (0..7).map(|i| polar(i as f64) * (1.0 + 0.1 * i as f64)).collect();
        let s = PeriodicSpline::new(pts.clone()).unwrap();
        for (i, p) in pts.iter().enumerate() {
            assert!((s.jet([i as f64, 0.0]).point - p).norm() < 1e-14);
            let a = s.jet([i as f64 + 1e-12, 0.0]);
            let b = s.jet([i as f64 - 1e-12 + if i == 0 { 7.0 } else { 0.0 }, 0.0]);
            assert!((a.du[0] - b.du[0]).norm() < 1e-9);
            assert!((a.d2[0] - b.d2[0]).norm() < 1e-9);
        }
    }

    #[test]
    fn circle_samples_approximate_circle() {
        let m = 64;
        let pts: Vec<Vec3> = (0..m)
            .map(|i| polar(std::f64::consts::TAU * i as f64 / m as f64))
            .collect();
        let s = super::super::Hypersurface::new(PeriodicSpline::new(pts).unwrap());
        let area = s.enclosed_volume(&[]).unwrap();
        assert!((area - std::f64::consts::PI).abs() < 1e-5);
    }
}
