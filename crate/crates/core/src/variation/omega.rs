//! Scalar test functions `ω` on a hypersurface.

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::poly::Polynomial;
use crate::surface::{Hypersurface, Jet, ParamDomain};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

fn one() -> f64 {
    1.0
}

/// Serializable description of `ω`. Parameter-based kinds use parameters
/// normalized to `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OmegaSpec {
    Constant {
        value: f64,
    },
    /// `amplitude · exp(1 - 1/(1 - (d/radius)²))` in normalized parameters.
    Bump {
        center: Vec<f64>,
        radius: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// The same bump profile in ambient coordinates.
    AmbientBump {
        center: Vec<f64>,
        radius: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// On curves `cos(2πks + phase)` (closed) or `cos(πks + phase)` (open);
    /// on surfaces `Re(e^{i phase} (x + iy)^k)`.
    FourierMode {
        k: u32,
        #[serde(default)]
        phase: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `offset + Σ slope_i s_i`.
    Affine {
        #[serde(default)]
        offset: f64,
        slope: Vec<f64>,
    },
    /// `offset + Σ cos[k-1] cos 2πks + sin[k-1] sin 2πks` on curves.
    Series {
        #[serde(default)]
        offset: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    /// Polynomial in ambient coordinates.
    Polynomial {
        terms: Vec<([u32; 3], f64)>,
    },
}

/// `ω` bound to the parameter domain of a particular hypersurface.
#[derive(Debug, Clone)]
pub struct Omega {
    spec: OmegaSpec,
    domain: ParamDomain,
}

fn bump(x: f64) -> (f64, f64) {
    // value and derivative of exp(1 - 1/(1 - x²)) in x
    if x.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let d = 1.0 - x * x;
    let v = (1.0 - 1.0 / d).exp();
    (v, v * (-2.0 * x / (d * d)))
}

impl Omega {
    pub fn new(spec: OmegaSpec, surface: &Hypersurface) -> Result<Self> {
        let domain = surface.domain();
        let n = domain.ranges.len();
        let bad = |m: &str| Err(Error::InvalidArgument(format!("omega: {m}")));
        match &spec {
            OmegaSpec::Bump { center, radius, .. } => {
                if center.len() != n {
                    return bad("bump center must have one entry per parameter");
                }
                if !(*radius > 0.0) {
                    return bad("bump radius must be positive");
                }
            }
            OmegaSpec::AmbientBump { center, radius, .. } => {
                if center.len() != surface.ambient_dim() {
                    return bad("ambient bump center must match the ambient dimension");
                }
                if !(*radius > 0.0) {
                    return bad("bump radius must be positive");
                }
            }
            OmegaSpec::Affine { slope, .. } => {
                if slope.len() != n {
                    return bad("affine slope must have one entry per parameter");
                }
            }
            OmegaSpec::Series { .. } => {
                if n != 1 {
                    return bad("series are defined on curves");
                }
            }
            _ => {}
        }
        Ok(Omega { spec, domain })
    }

    pub fn spec(&self) -> &OmegaSpec {
        &self.spec
    }

    /// Value and parameter derivatives `[ω_u, ω_v]`.
    pub fn eval(&self, u: [f64; 2], jet: &Jet) -> (f64, [f64; 2]) {
        let n = self.domain.ranges.len();
        let s: Vec<f64> = (0..n).map(|i| self.domain.ranges[i].normalized(u[i])).collect();
        let ds: Vec<f64> = (0..n).map(|i| 1.0 / self.domain.ranges[i].len()).collect();
        let ambient = |f: f64, g: Vec3| -> (f64, [f64; 2]) {
            let mut d = [0.0; 2];
            for i in 0..n {
                d[i] = g.dot(&jet.du[i]);
            }
            (f, d)
        };
        match &self.spec {
            OmegaSpec::Constant { value } => (*value, [0.0; 2]),
            OmegaSpec::Bump {
                center,
                radius,
                amplitude,
            } => {
                let mut diff = [0.0; 2];
                for i in 0..n {
                    let mut d = s[i] - center[i];
                    if self.domain.ranges[i].periodic {
                        d -= d.round();
                    }
                    diff[i] = d;
                }
                let r = (diff[0] * diff[0] + diff[1] * diff[1]).sqrt();
                let (v, dv) = bump(r / radius);
                let mut g = [0.0; 2];
                if r > 0.0 {
                    for i in 0..n {
                        g[i] = amplitude * dv / radius * diff[i] / r * ds[i];
                    }
                }
                (amplitude * v, g)
            }
            OmegaSpec::AmbientBump {
                center,
                radius,
                amplitude,
            } => {
                let mut c = Vec3::zeros();
                for (i, x) in center.iter().enumerate() {
                    c[i] = *x;
                }
                let d = jet.point - c;
                let r = d.norm();
                let (v, dv) = bump(r / radius);
                let g = if r > 0.0 {
                    d * (amplitude * dv / (radius * r))
                } else {
                    Vec3::zeros()
                };
                ambient(amplitude * v, g)
            }
            OmegaSpec::FourierMode {
                k,
                phase,
                amplitude,
            } => {
                if n == 1 {
                    let w = if self.domain.closed { TAU } else { PI } * *k as f64;
                    let a = w * s[0] + phase;
                    (amplitude * a.cos(), [-amplitude * w * a.sin() * ds[0], 0.0])
                } else {
                    // Re(e^{iα} z^k) and its gradient Re(e^{iα} k z^{k-1}) (1, i)
                    let (x, y) = (jet.point.x, jet.point.y);
                    let cpow = |m: u32| {
                        let (mut re, mut im) = (1.0, 0.0);
                        for _ in 0..m {
                            let t = re * x - im * y;
                            im = re * y + im * x;
                            re = t;
                        }
                        (re, im)
                    };
                    let (pc, ps) = (phase.cos(), phase.sin());
                    let (zr, zi) = cpow(*k);
                    let f = pc * zr - ps * zi;
                    let g = if *k == 0 {
                        Vec3::zeros()
                    } else {
                        let (dr, di) = cpow(k - 1);
                        let kf = *k as f64;
                        let (er, ei) = (kf * (pc * dr - ps * di), kf * (pc * di + ps * dr));
                        Vec3::new(er, -ei, 0.0)
                    };
                    ambient(amplitude * f, g * *amplitude)
                }
            }
            OmegaSpec::Affine { offset, slope } => {
                let mut v = *offset;
                let mut g = [0.0; 2];
                for i in 0..n {
                    v += slope[i] * s[i];
                    g[i] = slope[i] * ds[i];
                }
                (v, g)
            }
            OmegaSpec::Series { offset, cos, sin } => {
                let mut v = *offset;
                let mut d = 0.0;
                for i in 0..cos.len().max(sin.len()) {
                    let w = TAU * (i + 1) as f64;
                    let c = cos.get(i).copied().unwrap_or(0.0);
                    let sn = sin.get(i).copied().unwrap_or(0.0);
                    let (si, co) = (w * s[0]).sin_cos();
                    v += c * co + sn * si;
                    d += w * (-c * si + sn * co);
                }
                (v, [d * ds[0], 0.0])
            }
            OmegaSpec::Polynomial { terms } => {
                let p = Polynomial {
                    terms: terms.clone(),
                };
                ambient(p.value(&jet.point), p.gradient(&jet.point))
            }
        }
    }

    /// The same function shifted by a constant.
    pub fn shifted(&self, c: f64) -> Result<Omega> {
        let spec = match &self.spec {
            OmegaSpec::Constant { value } => OmegaSpec::Constant { value: value + c },
            OmegaSpec::Affine { offset, slope } => OmegaSpec::Affine {
                offset: offset + c,
                slope: slope.clone(),
            },
            OmegaSpec::Series { offset, cos, sin } => OmegaSpec::Series {
                offset: offset + c,
                cos: cos.clone(),
                sin: sin.clone(),
            },
            OmegaSpec::Polynomial { terms } => {
                let mut t = terms.clone();
                t.push(([0, 0, 0], c));
                OmegaSpec::Polynomial { terms: t }
            }
            _ => {
                return Err(Error::ModeUnsupported(
                    "constant shift of this omega kind".into(),
                ))
            }
        };
        Ok(Omega {
            spec,
            domain: self.domain.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{Hypersurface, SurfaceSpec};

    fn check(surface: &Hypersurface, spec: OmegaSpec, u: [f64; 2]) {
        let om = Omega::new(spec.clone(), surface).unwrap();
        let n = surface.n();
        let (_, g) = om.eval(u, &surface.jet(u));
        for i in 0..n {
            let e = 1e-6;
            let mut up = u;
            let mut um = u;
            up[i] += e;
            um[i] -= e;
            let fd = (om.eval(up, &surface.jet(up)).0 - om.eval(um, &surface.jet(um)).0) / (2.0 * e);
            assert!((fd - g[i]).abs() < 1e-7, "{spec:?} dir {i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn parameter_derivatives() {
        let c = Hypersurface::from_spec(SurfaceSpec::Circle {
            center: [0.0, 0.0],
            radius: 1.5,
        })
        .unwrap();
        let sph = Hypersurface::from_spec(SurfaceSpec::Sphere {
            center: [0.0, 0.0, 0.0],
            radius: 1.0,
        })
        .unwrap();
        check(&c, OmegaSpec::Bump { center: vec![0.9], radius: 0.3, amplitude: 2.0 }, [0.2, 0.0]);
        check(&c, OmegaSpec::FourierMode { k: 3, phase: 0.4, amplitude: 1.0 }, [1.0, 0.0]);
        check(&c, OmegaSpec::Series { offset: 0.1, cos: vec![0.2, 0.1], sin: vec![0.3] }, [2.0, 0.0]);
        check(&sph, OmegaSpec::FourierMode { k: 2, phase: 0.3, amplitude: 1.0 }, [0.7, 2.0]);
        check(&sph, OmegaSpec::AmbientBump { center: vec![0.0, 0.0, 1.0], radius: 1.2, amplitude: 1.0 }, [0.7, 2.0]);
        check(&sph, OmegaSpec::Affine { offset: 0.0, slope: vec![0.5, -0.2] }, [0.7, 2.0]);
    }
}
