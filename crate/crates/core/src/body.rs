//! Smooth, strictly convex bodies described by their support function.
//!
//! Three families are supported: balls, ellipsoids (`h(w) = sqrt(wᵀ A w)`)
//! and planar Fourier bodies (`h(r u(θ)) = r g(θ)` with a trigonometric
//! polynomial `g`).

use crate::error::{Error, Result};
use crate::geom::{orthonormal_complement, polar, rot_ccw, sphere_directions, Mat3, Vec3};
use crate::roots::{brent, golden_min};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Minimum of `g + g''` accepted for a Fourier body.
pub const FOURIER_CONVEXITY_MARGIN: f64 = 1e-3;
const FOURIER_CHECK_SAMPLES: usize = 4096;

/// Serializable description of a body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum BodySpec {
    #[serde(rename = "ball")]
    Ball { dim: usize, radius: f64 },
    /// Row-major symmetric positive definite `dim × dim` matrix.
    #[serde(rename = "ellipsoid")]
    Ellipsoid { dim: usize, matrix: Vec<f64> },
    /// `g(θ) = a0 + Σ cos[k-1] cos kθ + sin[k-1] sin kθ`.
    #[serde(rename = "fourier2d")]
    Fourier2d {
        #[serde(default = "two")]
        dim: usize,
        a0: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
}

fn two() -> usize {
    2
}

#[derive(Debug, Clone)]
enum Shape {
    /// `h(w) = sqrt(wᵀ A w)`; for planar bodies only the upper 2×2 block is used.
    Quadratic { a: Mat3, a_inv: Mat3, det: f64 },
    Fourier { a0: f64, cos: Vec<f64>, sin: Vec<f64> },
}

/// A smooth, strictly convex body with the origin in its interior.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "BodySpec", into = "BodySpec")]
pub struct ConvexBody {
    spec: BodySpec,
    dim: usize,
    shape: Shape,
}

impl From<ConvexBody> for BodySpec {
    fn from(b: ConvexBody) -> Self {
        b.spec
    }
}

impl TryFrom<BodySpec> for ConvexBody {
    type Error = Error;
    fn try_from(spec: BodySpec) -> Result<Self> {
        ConvexBody::from_spec(&spec)
    }
}

/// Ellipticity constants: `a|v|² ≤ ⟨Q_w v, v⟩ ≤ b|v|²` on unit `w` and `v ⊥ w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticityBounds {
    pub lower: f64,
    pub upper: f64,
    pub samples: usize,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::InvalidBody(format!("dim must be 2 or 3, got {dim}")))
    }
}

impl ConvexBody {
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        Self::from_spec(&BodySpec::Ball { dim, radius })
    }

    pub fn ellipsoid(dim: usize, matrix: &[f64]) -> Result<Self> {
        Self::from_spec(&BodySpec::Ellipsoid {
            dim,
            matrix: matrix.to_vec(),
        })
    }

    /// Axis-aligned ellipsoid `h(w)² = Σ d_i w_i²`.
    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        let mut m = vec![0.0; dim * dim];
        for (i, d) in diag.iter().enumerate() {
            m[i * dim + i] = *d;
        }
        Self::ellipsoid(dim, &m)
    }

    pub fn fourier(a0: f64, cos: &[f64], sin: &[f64]) -> Result<Self> {
        Self::from_spec(&BodySpec::Fourier2d {
            dim: 2,
            a0,
            cos: cos.to_vec(),
            sin: sin.to_vec(),
        })
    }

    pub fn from_spec(spec: &BodySpec) -> Result<Self> {
        match spec {
            BodySpec::Ball { dim, radius } => {
                check_dim(*dim)?;
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidBody(format!(
                        "radius must be positive and finite, got {radius}"
                    )));
                }
                let mut a = Mat3::identity() * (radius * radius);
                if *dim == 2 {
                    a[(2, 2)] = 1.0;
                }
                Ok(Self::quadratic(spec.clone(), *dim, a))
            }
            BodySpec::Ellipsoid { dim, matrix } => {
                check_dim(*dim)?;
                if matrix.len() != dim * dim {
                    return Err(Error::InvalidBody(format!(
                        "matrix must have {} entries, got {}",
                        dim * dim,
                        matrix.len()
                    )));
                }
                if !matrix.iter().all(|x| x.is_finite()) {
                    return Err(Error::InvalidBody("matrix entries must be finite".into()));
                }
                let mut a = Mat3::identity();
                let scale = matrix.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                for i in 0..*dim {
                    for j in 0..*dim {
                        a[(i, j)] = matrix[i * dim + j];
                        if (matrix[i * dim + j] - matrix[j * dim + i]).abs() > 1e-12 * scale {
                            return Err(Error::InvalidBody("matrix must be symmetric".into()));
                        }
                    }
                }
                let eig = a.symmetric_eigen();
                if eig.eigenvalues.iter().any(|l| *l <= 0.0) {
                    return Err(Error::InvalidBody(
                        "matrix must be positive definite".into(),
                    ));
                }
                Ok(Self::quadratic(spec.clone(), *dim, a))
            }
            BodySpec::Fourier2d { dim, a0, cos, sin } => {
                if *dim != 2 {
                    return Err(Error::InvalidBody(format!(
                        "fourier2d bodies are planar, got dim {dim}"
                    )));
                }
                if !(a0.is_finite() && cos.iter().chain(sin).all(|x| x.is_finite())) {
                    return Err(Error::InvalidBody("coefficients must be finite".into()));
                }
                let body = ConvexBody {
                    spec: spec.clone(),
                    dim: 2,
                    shape: Shape::Fourier {
                        a0: *a0,
                        cos: cos.clone(),
                        sin: sin.clone(),
                    },
                };
                for i in 0..FOURIER_CHECK_SAMPLES {
                    let t = TAU * i as f64 / FOURIER_CHECK_SAMPLES as f64;
                    let j = body.circle_jet(t);
                    if j[0] <= 0.0 {
                        return Err(Error::InvalidBody(format!(
                            "support function not positive at θ = {t:.4}"
                        )));
                    }
                    if j[0] + j[2] < FOURIER_CONVEXITY_MARGIN {
                        return Err(Error::InvalidBody(format!(
                            "g + g'' = {:.3e} below convexity margin at θ = {t:.4}",
                            j[0] + j[2]
                        )));
                    }
                }
                Ok(body)
            }
        }
    }

    fn quadratic(spec: BodySpec, dim: usize, a: Mat3) -> Self {
        let a_inv = a.try_inverse().expect("positive definite");
        let det = a.determinant();
        ConvexBody {
            spec,
            dim,
            shape: Shape::Quadratic { a, a_inv, det },
        }
    }

    pub fn spec(&self) -> &BodySpec {
        &self.spec
    }

    /// Ambient dimension `n + 1`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension `n` of hypersurfaces in the ambient space.
    pub fn n(&self) -> usize {
        self.dim - 1
    }

    pub fn is_quadratic(&self) -> bool {
        matches!(self.shape, Shape::Quadratic { .. })
    }

    pub fn is_centrally_symmetric(&self) -> bool {
        match &self.shape {
            Shape::Quadratic { .. } => true,
            // odd frequencies k = i + 1 sit at even indices
            Shape::Fourier { cos, sin, .. } => cos
                .iter()
                .chain(sin.iter())
                .enumerate()
                .all(|(i, c)| {
                    let idx = if i < cos.len() { i } else { i - cos.len() };
                    idx % 2 == 1 || c.abs() < 1e-15
                }),
        }
    }

    /// The body `-K`.
    pub fn reflected(&self) -> ConvexBody {
        match &self.shape {
            Shape::Quadratic { .. } => self.clone(),
            Shape::Fourier { a0, cos, sin } => {
                let flip = |v: &Vec<f64>| {
                    v.iter()
                        .enumerate()
                        .map(|(i, c)| if i % 2 == 0 { -c } else { *c })
                        .collect::<Vec<_>>()
                };
                ConvexBody::fourier(*a0, &flip(cos), &flip(sin)).expect("reflection of a valid body")
            }
        }
    }

    fn project(&self, w: &Vec3) -> Vec3 {
        if self.dim == 2 {
            Vec3::new(w.x, w.y, 0.0)
        } else {
            *w
        }
    }

    fn check_nonzero(&self, w: &Vec3) -> Result<Vec3> {
        let w = self.project(w);
        if w.norm() == 0.0 || !w.iter().all(|x| x.is_finite()) {
            Err(Error::ZeroVector)
        } else {
            Ok(w)
        }
    }

    /// Support function `h_K(w) = max_{u ∈ K} ⟨u, w⟩`.
    pub fn support(&self, w: &Vec3) -> Result<f64> {
        let w = self.check_nonzero(w)?;
        Ok(self.h(&w))
    }

    /// Unchecked support function; `w` must be nonzero.
    #[inline]
    pub fn h(&self, w: &Vec3) -> f64 {
        match &self.shape {
            Shape::Quadratic { a, .. } => {
                let w = self.project(w);
                w.dot(&(a * w)).sqrt()
            }
            Shape::Fourier { .. } => {
                let r = (w.x * w.x + w.y * w.y).sqrt();
                r * self.g(w.y.atan2(w.x))
            }
        }
    }

    /// `π_K(w) = ∇h_K(w)`, the point of `∂K` with outer normal `w/|w|`.
    pub fn k_projection(&self, w: &Vec3) -> Result<Vec3> {
        let w = self.check_nonzero(w)?;
        Ok(self.grad(&w))
    }

    /// Unchecked gradient of the support function.
    #[inline]
    pub fn grad(&self, w: &Vec3) -> Vec3 {
        match &self.shape {
            Shape::Quadratic { a, .. } => {
                let w = self.project(w);
                let aw = a * w;
                let aw = self.project(&aw);
                aw / w.dot(&aw).sqrt()
            }
            Shape::Fourier { .. } => {
                let t = w.y.atan2(w.x);
                let j = self.circle_jet(t);
                let u = polar(t);
                u * j[0] + rot_ccw(&u) * j[1]
            }
        }
    }

    /// Hessian `D²h_K(w)`; restricted to `w^⊥` it is the tangent map of `π_K`.
    pub fn hessian(&self, w: &Vec3) -> Mat3 {
        match &self.shape {
            Shape::Quadratic { a, .. } => {
                let w = self.project(w);
                let mut a2 = *a;
                if self.dim == 2 {
                    a2[(2, 2)] = 0.0;
                }
                let aw = a2 * w;
                let h = w.dot(&aw).sqrt();
                (a2 - aw * aw.transpose() / (h * h)) / h
            }
            Shape::Fourier { .. } => {
                let r = (w.x * w.x + w.y * w.y).sqrt();
                let t = w.y.atan2(w.x);
                let j = self.circle_jet(t);
                let p = rot_ccw(&polar(t));
                p * p.transpose() * ((j[0] + j[2]) / r)
            }
        }
    }

    /// `Q_w v = (dπ_K)_w v` for `v ⊥ w`.
    pub fn tangent_map(&self, w: &Vec3, v: &Vec3) -> Result<Vec3> {
        let w = self.check_nonzero(w)?;
        let v = self.project(v);
        let dot = w.dot(&v) / w.norm();
        if dot.abs() > 1e-10 * v.norm().max(1.0) {
            return Err(Error::NotOrthogonal(dot.abs()));
        }
        Ok(self.hessian(&w) * v)
    }

    /// Third derivative `D³h_K(w)[a, b, ·]` as a vector. Quadratic bodies only.
    pub fn third(&self, w: &Vec3, x: &Vec3, y: &Vec3) -> Option<Vec3> {
        match &self.shape {
            Shape::Quadratic { a, .. } => {
                let aw = a * w;
                let h = w.dot(&aw).sqrt();
                let (ax, ay) = (a * x, a * y);
                let (awx, awy) = (aw.dot(x), aw.dot(y));
                let h3 = h * h * h;
                Some(
                    -(ax * awy + ay * awx + aw * x.dot(&ay)) / h3
                        + aw * (3.0 * awx * awy / (h3 * h * h)),
                )
            }
            Shape::Fourier { .. } => None,
        }
    }

    fn g(&self, t: f64) -> f64 {
        self.circle_jet(t)[0]
    }

    /// `[g, g', g'', g''']` for `g(θ) = h_K(cos θ, sin θ)`. Planar bodies only.
    pub fn circle_jet(&self, t: f64) -> [f64; 4] {
        debug_assert_eq!(self.dim, 2);
        match &self.shape {
            Shape::Quadratic { a, .. } => {
                let al = 0.5 * (a[(0, 0)] + a[(1, 1)]);
                let be = 0.5 * (a[(0, 0)] - a[(1, 1)]);
                let ga = a[(0, 1)];
                let (s2, c2) = (2.0 * t).sin_cos();
                let q = al + be * c2 + ga * s2;
                let q1 = -2.0 * be * s2 + 2.0 * ga * c2;
                let q2 = -4.0 * be * c2 - 4.0 * ga * s2;
                let q3 = 8.0 * be * s2 - 8.0 * ga * c2;
                let h = q.sqrt();
                let h1 = q1 / (2.0 * h);
                let h2 = (0.5 * q2 - h1 * h1) / h;
                let h3 = (0.5 * q3 - 3.0 * h1 * h2) / h;
                [h, h1, h2, h3]
            }
            Shape::Fourier { a0, cos, sin } => {
                let mut j = [*a0, 0.0, 0.0, 0.0];
                let m = cos.len().max(sin.len());
                for i in 0..m {
                    let k = (i + 1) as f64;
                    let c = cos.get(i).copied().unwrap_or(0.0);
                    let s = sin.get(i).copied().unwrap_or(0.0);
                    let (sk, ck) = (k * t).sin_cos();
                    let f = c * ck + s * sk;
                    let fp = -c * sk + s * ck;
                    j[0] += f;
                    j[1] += k * fp;
                    j[2] -= k * k * f;
                    j[3] -= k * k * k * fp;
                }
                j
            }
        }
    }

    /// Angle of the outer normal at the boundary point in polar direction `phi`.
    pub fn normal_angle_of_direction(&self, phi: f64) -> f64 {
        match &self.shape {
            Shape::Quadratic { a_inv, .. } => {
                let d = polar(phi);
                let n = a_inv * d;
                let t = n.y.atan2(n.x);
                phi + crate::geom::wrap_from(t - phi, -PI)
            }
            Shape::Fourier { .. } => {
                let f = |t: f64| {
                    let j = self.circle_jet(t);
                    t + j[1].atan2(j[0]) - phi
                };
                brent(f, phi - 0.5 * PI, phi + 0.5 * PI, 1e-15).expect("monotone bracket")
            }
        }
    }

    /// Distance from the origin to `∂K` along the unit direction `d`.
    pub fn radial(&self, d: &Vec3) -> f64 {
        match &self.shape {
            Shape::Quadratic { a_inv, .. } => {
                let d = self.project(d);
                1.0 / d.dot(&(a_inv * d)).sqrt()
            }
            Shape::Fourier { .. } => {
                let t = self.normal_angle_of_direction(d.y.atan2(d.x));
                let j = self.circle_jet(t);
                (j[0] * j[0] + j[1] * j[1]).sqrt()
            }
        }
    }

    /// Unit outer normal of `∂K` at the boundary point in direction `x`.
    pub fn normal_at(&self, x: &Vec3) -> Vec3 {
        match &self.shape {
            Shape::Quadratic { a_inv, .. } => {
                let x = self.project(x);
                self.project(&(a_inv * x)).normalize()
            }
            Shape::Fourier { .. } => polar(self.normal_angle_of_direction(x.y.atan2(x.x))),
        }
    }

    /// Minkowski gauge `‖x‖_K`; `K = {‖x‖_K ≤ 1}`.
    pub fn gauge(&self, x: &Vec3) -> f64 {
        let x = self.project(x);
        let r = x.norm();
        if r == 0.0 {
            return 0.0;
        }
        match &self.shape {
            Shape::Quadratic { a_inv, .. } => x.dot(&(a_inv * x)).sqrt(),
            Shape::Fourier { .. } => r / self.radial(&(x / r)),
        }
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        self.gauge(x) <= 1.0
    }

    pub fn volume(&self) -> f64 {
        match &self.shape {
            Shape::Quadratic { det, .. } => {
                if self.dim == 2 {
                    PI * det.sqrt()
                } else {
                    4.0 / 3.0 * PI * det.sqrt()
                }
            }
            Shape::Fourier { a0, cos, sin } => {
                let mut v = PI * a0 * a0;
                for i in 0..cos.len().max(sin.len()) {
                    let k = (i + 1) as f64;
                    let c = cos.get(i).copied().unwrap_or(0.0);
                    let s = sin.get(i).copied().unwrap_or(0.0);
                    v += 0.5 * PI * (1.0 - k * k) * (c * c + s * s);
                }
                v
            }
        }
    }

    /// Extremes `(min, max)` of `h_K` over unit vectors.
    pub fn support_extremes(&self) -> (f64, f64) {
        match &self.shape {
            Shape::Quadratic { a, .. } => {
                let ev: Vec<f64> = if self.dim == 2 {
                    let sub = nalgebra::Matrix2::new(a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
                    sub.symmetric_eigenvalues().iter().copied().collect()
                } else {
                    a.symmetric_eigen().eigenvalues.iter().copied().collect()
                };
                let lo = ev.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                (lo.sqrt(), hi.sqrt())
            }
            Shape::Fourier { .. } => {
                let m = 2048;
                let step = TAU / m as f64;
                let (mut imin, mut imax) = (0, 0);
                let vals: Vec<f64> = (0..m).map(|i| self.g(i as f64 * step)).collect();
                for i in 0..m {
                    if vals[i] < vals[imin] {
                        imin = i;
                    }
                    if vals[i] > vals[imax] {
                        imax = i;
                    }
                }
                let c = imin as f64 * step;
                let (_, lo) = golden_min(|t| self.g(t), c - step, c + step, 60);
                let c = imax as f64 * step;
                let (_, hi) = golden_min(|t| -self.g(t), c - step, c + step, 60);
                (lo.min(vals[imin]), (-hi).max(vals[imax]))
            }
        }
    }

    /// Extremes of the eigenvalues of `Q_w` on `w^⊥` over sampled unit `w`.
    pub fn ellipticity_bounds(&self, samples: usize) -> Result<EllipticityBounds> {
        if samples < 64 {
            return Err(Error::InsufficientSamples {
                needed: 64,
                got: samples,
            });
        }
        let mut lower = f64::INFINITY;
        let mut upper = f64::NEG_INFINITY;
        for w in sphere_directions(self.dim, samples) {
            let q = self.hessian(&w);
            if self.dim == 2 {
                let t = rot_ccw(&w);
                let l = t.dot(&(q * t));
                lower = lower.min(l);
                upper = upper.max(l);
            } else {
                let (e1, e2) = orthonormal_complement(&w);
                let m = nalgebra::Matrix2::new(
                    e1.dot(&(q * e1)),
                    e1.dot(&(q * e2)),
                    e2.dot(&(q * e1)),
                    e2.dot(&(q * e2)),
                );
                for l in m.symmetric_eigenvalues().iter() {
                    lower = lower.min(*l);
                    upper = upper.max(*l);
                }
            }
        }
        Ok(EllipticityBounds {
            lower,
            upper,
            samples,
        })
    }

    /// Default sample count for [`ConvexBody::ellipticity_bounds`].
    pub fn default_ellipticity_samples(&self) -> usize {
        if self.dim == 2 {
            1024
        } else {
            2048
        }
    }

    /// Boundary `∂K` as a hypersurface with outer normal. `resolution`
    /// controls the quadrature (16 nodes per panel, at least 16).
    pub fn wulff_sample(&self, resolution: usize) -> Result<crate::surface::Hypersurface> {
        if resolution < 16 {
            return Err(Error::InsufficientSamples {
                needed: 16,
                got: resolution,
            });
        }
        let panels = resolution.div_ceil(16);
        Ok(crate::surface::shapes::wulff(self, Vec3::zeros(), 1.0)?.with_panels(panels))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_grad(b: &ConvexBody, w: &Vec3) -> Vec3 {
        let e = 1e-6;
        let mut g = Vec3::zeros();
        for i in 0..b.dim() {
            let mut d = Vec3::zeros();
            d[i] = e;
            g[i] = (b.h(&(w + d)) - b.h(&(w - d))) / (2.0 * e);
        }
        g
    }

    fn bodies() -> Vec<ConvexBody> {
        vec![
            ConvexBody::ball(2, 1.3).unwrap(),
            ConvexBody::ball(3, 0.7).unwrap(),
            ConvexBody::ellipsoid(2, &[4.0, 0.5, 0.5, 1.0]).unwrap(),
            ConvexBody::diagonal(&[4.0, 2.0, 1.0]).unwrap(),
            ConvexBody::fourier(2.0, &[0.2, 0.3], &[0.0, 0.0, 0.05]).unwrap(),
        ]
    }

    #[test]
    fn gradient_matches_difference_quotient() {
        let w = Vec3::new(0.3, -0.8, 0.5);
        for b in bodies() {
            let w = if b.dim() == 2 { Vec3::new(w.x, w.y, 0.0) } else { w };
            let g = b.grad(&w);
            assert!((g - fd_grad(&b, &w)).norm() < 1e-8, "{:?}", b.spec());
            // Euler relation
            assert!((g.dot(&w) - b.h(&w)).abs() < 1e-12);
        }
    }

    #[test]
    fn hessian_matches_difference_quotient() {
        let w = Vec3::new(-0.4, 0.9, 0.2);
        for b in bodies() {
            let w = if b.dim() == 2 { Vec3::new(w.x, w.y, 0.0) } else { w };
            let hs = b.hessian(&w);
            for i in 0..b.dim() {
                let mut d = Vec3::zeros();
                d[i] = 1e-6;
                let col = (b.grad(&(w + d)) - b.grad(&(w - d))) / 2e-6;
                assert!((hs.column(i) - col).norm() < 1e-7, "{:?}", b.spec());
            }
            assert!((hs * w).norm() < 1e-12);
        }
    }

    #[test]
    fn third_derivative_matches_difference_quotient() {
        let b = ConvexBody::diagonal(&[4.0, 2.0, 1.0]).unwrap();
        let w = Vec3::new(0.3, 0.4, -0.6);
        let x = Vec3::new(1.0, 0.2, 0.1);
        let y = Vec3::new(-0.3, 0.5, 0.9);
        let e = 1e-6;
        let fd = (b.hessian(&(w + x * e)) * y - b.hessian(&(w - x * e)) * y) / (2.0 * e);
        assert!((b.third(&w, &x, &y).unwrap() - fd).norm() < 1e-7);
    }

    #[test]
    fn circle_jet_matches_difference_quotients() {
        for b in bodies().into_iter().filter(|b| b.dim() == 2) {
            let t = 0.77;
            let e = 1e-5;
            let (p, m) = (b.circle_jet(t + e), b.circle_jet(t - e));
            let j = b.circle_jet(t);
            for k in 0..3 {
                assert!(((p[k] - m[k]) / (2.0 * e) - j[k + 1]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn zero_vector_rejected() {
        let b = ConvexBody::ball(3, 1.0).unwrap();
        assert!(matches!(b.support(&Vec3::zeros()), Err(Error::ZeroVector)));
        assert!(matches!(b.k_projection(&Vec3::zeros()), Err(Error::ZeroVector)));
    }

    #[test]
    fn tangent_map_requires_orthogonality() {
        let b = ConvexBody::diagonal(&[4.0, 1.0]).unwrap();
        let w = Vec3::new(1.0, 0.0, 0.0);
        assert!(matches!(
            b.tangent_map(&w, &Vec3::new(1.0, 1.0, 0.0)),
            Err(Error::NotOrthogonal(_))
        ));
        let q = b.tangent_map(&w, &Vec3::new(0.0, 1.0, 0.0)).unwrap();
        assert!((q - Vec3::new(0.0, 0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn invalid_bodies_rejected() {
        assert!(ConvexBody::ball(2, -1.0).is_err());
        assert!(ConvexBody::ball(4, 1.0).is_err());
        assert!(ConvexBody::ellipsoid(2, &[1.0, 2.0, 0.0, 1.0]).is_err());
        assert!(ConvexBody::ellipsoid(2, &[1.0, 2.0, 2.0, 1.0]).is_err());
        // g + g'' = 1 - 3 * 0.5 cos 2θ goes negative
        assert!(ConvexBody::fourier(1.0, &[0.0, 0.5], &[]).is_err());
    }

    #[test]
    fn boundary_points_lie_on_boundary() {
        for b in bodies() {
            for w in sphere_directions(b.dim(), 37) {
                let p = b.grad(&w);
                assert!((b.gauge(&p) - 1.0).abs() < 1e-10, "{:?}", b.spec());
            }
        }
    }

    #[test]
    fn fourier_volume_matches_quadrature() {
        let b = ConvexBody::fourier(2.0, &[0.2, 0.3], &[0.1, 0.0, 0.05]).unwrap();
        let v = crate::quadrature::integrate(
            |t| {
                let j = b.circle_jet(t);
                0.5 * j[0] * (j[0] + j[2])
            },
            0.0,
            TAU,
            16,
        );
        assert!((v - b.volume()).abs() < 1e-12);
    }

    #[test]
    fn reflection_negates() {
        let b = ConvexBody::fourier(2.0, &[0.2, 0.3], &[0.1]).unwrap();
        let r = b.reflected();
        let w = Vec3::new(0.3, 0.7, 0.0);
        assert!((r.h(&w) - b.h(&(-w))).abs() < 1e-14);
        assert!(!b.is_centrally_symmetric());
        assert!(ConvexBody::fourier(2.0, &[0.0, 0.3], &[]).unwrap().is_centrally_symmetric());
    }

    #[test]
    fn ellipticity_of_ball() {
        let b = ConvexBody::ball(3, 2.0).unwrap();
        let e = b.ellipticity_bounds(128).unwrap();
        assert!((e.lower - 2.0).abs() < 1e-12 && (e.upper - 2.0).abs() < 1e-12);
        assert!(b.ellipticity_bounds(10).is_err());
    }

    #[test]
    fn spec_roundtrip() {
        let json = r#"{"kind":"fourier2d","a0":2.0,"cos":[0.0,0.3]}"#;
        let b: ConvexBody = serde_json::from_str(json).unwrap();
        assert!((b.h(&Vec3::new(1.0, 0.0, 0.0)) - 2.3).abs() < 1e-15);
        let back = serde_json::to_string(&b).unwrap();
        let b2: ConvexBody = serde_json::from_str(&back).unwrap();
        assert_eq!(b.spec(), b2.spec());
        assert!(serde_json::from_str::<ConvexBody>(r#"{"kind":"ball","dim":2,"radius":1,"x":1}"#).is_err());
    }
}
