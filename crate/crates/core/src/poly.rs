//! Polynomials in ambient coordinates, used for smooth test functions and
//! perturbations.

use crate::geom::{Mat3, Vec3};
use serde::{Deserialize, Serialize};

/// `Σ c · x^a y^b z^c` over the listed monomials.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polynomial {
    pub terms: Vec<([u32; 3], f64)>,
}

fn pow_d(x: f64, k: u32, d: u32) -> f64 {
    // d-th derivative of x^k
    if d > k {
        return 0.0;
    }
    let mut c = 1.0;
    for j in 0..d {
        c *= (k - j) as f64;
    }
    c * x.powi((k - d) as i32)
}

impl Polynomial {
    pub fn value(&self, x: &Vec3) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * x.x.powi(e[0] as i32) * x.y.powi(e[1] as i32) * x.z.powi(e[2] as i32))
            .sum()
    }

    pub fn gradient(&self, x: &Vec3) -> Vec3 {
        let mut g = Vec3::zeros();
        for (e, c) in &self.terms {
            for i in 0..3 {
                let mut d = [0u32; 3];
                d[i] = 1;
                g[i] += c * (0..3).map(|k| pow_d(x[k], e[k], d[k])).product::<f64>();
            }
        }
        g
    }

    pub fn hessian(&self, x: &Vec3) -> Mat3 {
        let mut h = Mat3::zeros();
        for (e, c) in &self.terms {
            for i in 0..3 {
                for j in 0..3 {
                    let mut d = [0u32; 3];
                    d[i] += 1;
                    d[j] += 1;
                    h[(i, j)] += c * (0..3).map(|k| pow_d(x[k], e[k], d[k])).product::<f64>();
                }
            }
        }
        h
    }

    /// Add a constant term.
    pub fn shifted(&self, c: f64) -> Polynomial {
        let mut p = self.clone();
        p.terms.push(([0, 0, 0], c));
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_difference_quotients() {
        let p = Polynomial {
            terms: vec![([2, 1, 0], 0.5), ([0, 0, 3], -1.0), ([1, 1, 1], 2.0), ([0, 0, 0], 0.3)],
        };
        let x = Vec3::new(0.4, -0.7, 1.1);
        let e = 1e-6;
        for i in 0..3 {
            let mut d = Vec3::zeros();
            d[i] = e;
            let fd = (p.value(&(x + d)) - p.value(&(x - d))) / (2.0 * e);
            assert!((fd - p.gradient(&x)[i]).abs() < 1e-8);
            let col = (p.gradient(&(x + d)) - p.gradient(&(x - d))) / (2.0 * e);
            assert!((col - p.hessian(&x).column(i)).norm() < 1e-7);
        }
    }
}
