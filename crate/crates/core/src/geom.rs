//! Small vector helpers. Planar objects live in the `z = 0` plane.

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;

/// Clockwise quarter turn `(x, y) -> (y, -x)`. For a counterclockwise
/// curve this maps the unit tangent to the outward normal.
#[inline]
pub fn rot_cw(v: &Vec3) -> Vec3 {
    Vec3::new(v.y, -v.x, 0.0)
}

/// Counterclockwise quarter turn `(x, y) -> (-y, x)`.
#[inline]
pub fn rot_ccw(v: &Vec3) -> Vec3 {
    Vec3::new(-v.y, v.x, 0.0)
}

#[inline]
pub fn polar(theta: f64) -> Vec3 {
    Vec3::new(theta.cos(), theta.sin(), 0.0)
}

#[inline]
pub fn cross2(a: &Vec3, b: &Vec3) -> f64 {
    a.x * b.y - a.y * b.x
}

#[inline]
pub fn angle_of(v: &Vec3) -> f64 {
    v.y.atan2(v.x)
}

/// Reduce an angle into `[base, base + 2π)`.
pub fn wrap_from(angle: f64, base: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut a = (angle - base) % tau;
    if a < 0.0 {
        a += tau;
    }
    if a >= tau {
        a -= tau;
    }
    base + a
}

pub fn vec_from_slice(dim: usize, s: &[f64]) -> Option<Vec3> {
    if s.len() != dim || !s.iter().all(|x| x.is_finite()) {
        return None;
    }
    let mut v = Vec3::zeros();
    for (i, x) in s.iter().enumerate() {
        v[i] = *x;
    }
    Some(v)
}

pub fn to_vec(dim: usize, v: &Vec3) -> Vec<f64> {
    (0..dim).map(|i| v[i]).collect()
}

/// Unit vectors on S^2 from a Fibonacci lattice.
pub fn fibonacci_sphere(count: usize) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let a = golden * i as f64;
            Vec3::new(r * a.cos(), r * a.sin(), z)
        })
        .collect()
}

/// Unit directions used when sampling the sphere of the given ambient dimension.
pub fn sphere_directions(dim: usize, count: usize) -> Vec<Vec3> {
    if dim == 2 {
        (0..count)
            .map(|i| polar(std::f64::consts::TAU * i as f64 / count as f64))
            .collect()
    } else {
        fibonacci_sphere(count)
    }
}

/// An orthonormal pair spanning the complement of the unit vector `n`.
pub fn orthonormal_complement(n: &Vec3) -> (Vec3, Vec3) {
    let seed = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = (seed - n * n.dot(&seed)).normalize();
    let e2 = n.cross(&e1);
    (e1, e2)
}
