//! First and second variation of anisotropic area and volume, the
//! anisotropic index form and profile derivatives along a deformation.

pub mod flow;
pub mod omega;

pub use flow::{Flow, FlowMode, FlowSample};
pub use omega::{Omega, OmegaSpec};

use crate::body::ConvexBody;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::fd::{FdEstimate, Stencil};
use crate::surface::Hypersurface;
use serde::{Deserialize, Serialize};

/// Relative spread of `H_K` below which it counts as constant.
pub const CONSTANT_CURVATURE_TOL: f64 = 1e-4;
/// Largest stationarity residual accepted by [`index_form`].
pub const STATIONARITY_TOL: f64 = 1e-4;
/// Times an immersion failure halves the finite-difference steps.
const MAX_STEP_HALVINGS: usize = 3;

/// How far a hypersurface is from being stationary for `A_K` under a
/// volume constraint in a domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationarityResidual {
    /// `sup |H_K - mean H_K|`
    pub mean_curvature: f64,
    /// `sup |⟨N_K, ξ⟩|` over boundary points.
    pub contact: f64,
}

impl StationarityResidual {
    pub fn max(&self) -> f64 {
        self.mean_curvature.max(self.contact)
    }
}

/// Integrals over `Σ` that enter the variation formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationIntegrals {
    pub area: f64,
    pub mean_curvature: f64,
    pub curvature_spread: f64,
    /// `∫ ω φ_K`
    pub omega_phi: f64,
    /// `∫ n H_K ω φ_K`
    pub mean_curvature_omega_phi: f64,
    /// `∫ ⟨∇^K ω, ∇ω⟩ φ_K²`
    pub gradient_term: f64,
    /// `∫ tr(B_K²) ω² φ_K`
    pub trace_term: f64,
    /// `∫ n² H_K² ω² φ_K`
    pub mean_square_term: f64,
    /// `∫ H_K ω² φ_K`
    pub mean_omega_sq_phi: f64,
    /// `∫_{∂Σ} ⟨X, ν_K⟩`
    pub boundary_flux: f64,
    /// `∫ |ω| φ_K`
    pub abs_omega_phi: f64,
    /// `∫ n |H_K ω| φ_K`
    pub abs_mean_curvature_omega_phi: f64,
    /// `∫ n |H_K| ω² φ_K`
    pub abs_mean_omega_sq_phi: f64,
}

/// Results of a first- and second-variation analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationReport {
    pub mode: FlowMode,
    /// Area-weighted mean of `H_K` on `Σ`.
    pub mean_curvature: f64,
    pub mean_curvature_constant: bool,
    /// `"constant_curvature"` when `-n H ∫ω φ_K` was used, `"general"` otherwise.
    pub first_variation_formula: String,
    pub a_prime_analytic: f64,
    pub v_prime_analytic: f64,
    pub a_prime_fd: FdEstimate,
    pub v_prime_fd: FdEstimate,
    pub a_second_analytic: Option<f64>,
    pub v_second_analytic: Option<f64>,
    pub a_second_fd: Option<FdEstimate>,
    pub v_second_fd: Option<FdEstimate>,
    /// `(A_K + n H V)''(0)` with `H` the mean curvature above.
    pub combined_second_fd: Option<FdEstimate>,
    pub index_form: Option<f64>,
    pub stationarity: Option<StationarityResidual>,
    pub volume_is_relative: bool,
    pub steps: Vec<f64>,
    pub integrals: VariationIntegrals,
    pub samples: Vec<FlowSample>,
}

impl Flow {
    /// Quadrature of the variation integrands at `t = 0`.
    pub fn integrals(&self) -> Result<VariationIntegrals> {
        let n = self.surface.n() as f64;
        let frames = self.surface.frames(&self.body)?;
        let mut acc = VariationIntegrals {
            area: 0.0,
            mean_curvature: 0.0,
            curvature_spread: 0.0,
            omega_phi: 0.0,
            mean_curvature_omega_phi: 0.0,
            gradient_term: 0.0,
            trace_term: 0.0,
            mean_square_term: 0.0,
            mean_omega_sq_phi: 0.0,
            boundary_flux: 0.0,
            abs_omega_phi: 0.0,
            abs_mean_curvature_omega_phi: 0.0,
            abs_mean_omega_sq_phi: 0.0,
        };
        let mut hsum = 0.0;
        for (nd, f) in &frames {
            let jet = self.surface.jet(nd.u);
            let (w, dw) = self.omega.eval(nd.u, &jet);
            let da = nd.weight * f.area_element;
            let grad = f.surface_gradient(dw);
            let h = f.mean_curvature;
            acc.area += da;
            hsum += h * da;
            acc.omega_phi += w * f.phi * da;
            acc.mean_curvature_omega_phi += n * h * w * f.phi * da;
            acc.gradient_term += (f.q * grad).dot(&grad) * f.phi * f.phi * da;
            acc.trace_term += f.aniso_shape_sq_trace() * w * w * f.phi * da;
            acc.mean_square_term += n * n * h * h * w * w * f.phi * da;
            acc.mean_omega_sq_phi += h * w * w * f.phi * da;
            acc.abs_omega_phi += w.abs() * f.phi * da;
            acc.abs_mean_curvature_omega_phi += n * (h * w).abs() * f.phi * da;
            acc.abs_mean_omega_sq_phi += n * h.abs() * w * w * f.phi * da;
        }
        acc.mean_curvature = hsum / acc.area;
        let var: f64 = frames
            .iter()
            .map(|(nd, f)| nd.weight * f.area_element * (f.mean_curvature - acc.mean_curvature).powi(2))
            .sum::<f64>()
            / acc.area;
        acc.curvature_spread = var.sqrt();
        for bn in self.surface.boundary_nodes() {
            let bf = self.surface.boundary_frame(&self.body, &bn)?;
            let (w, _) = self.omega.eval(bn.u, &self.surface.jet(bn.u));
            let x = bf.aniso_normal * w;
            acc.boundary_flux += x.dot(&bf.aniso_conormal) * bf.line_element * bn.weight;
        }
        Ok(acc)
    }

    fn sample_with_retry(&self, stencil: &Stencil) -> Result<(Stencil, Vec<FlowSample>)> {
        let mut st = stencil.clone();
        let mut attempt = 0;
        loop {
            match self.sample(&st.points()) {
                Ok(s) => return Ok((st, s)),
                Err(Error::ImmersionLost(t)) if attempt < MAX_STEP_HALVINGS => {
                    let _ = t;
                    attempt += 1;
                    st = st.scaled(0.5);
                }
                Err(e) => return Err(e),
            }
        }
    }

    /// First-variation analysis only.
    pub fn first_variation(&self, stencil: &Stencil) -> Result<VariationReport> {
        self.analyze(stencil, false)
    }

    /// First- and second-variation analysis.
    pub fn second_variation(&self, stencil: &Stencil) -> Result<VariationReport> {
        self.analyze(stencil, true)
    }

    fn analyze(&self, stencil: &Stencil, second: bool) -> Result<VariationReport> {
        let ints = self.integrals()?;
        let n = self.surface.n() as f64;
        let (st, samples) = self.sample_with_retry(stencil)?;
        let areas: Vec<f64> = samples.iter().map(|s| s.area).collect();
        let vols: Vec<f64> = samples.iter().map(|s| s.volume).collect();
        let hbar = ints.mean_curvature;
        let constant = ints.curvature_spread <= CONSTANT_CURVATURE_TOL * (1.0 + hbar.abs());
        let (formula, a1) = if constant && self.surface.boundary_nodes().is_empty() {
            ("constant_curvature", -n * hbar * ints.omega_phi)
        } else {
            ("general", -ints.mean_curvature_omega_phi - ints.boundary_flux)
        };
        let stationarity = match (&self.domain, self.surface.is_closed()) {
            (_, true) | (Some(_), false) => {
                stationarity_residual(&self.surface, &self.body, self.domain.as_ref()).ok()
            }
            _ => None,
        };
        let mut report = VariationReport {
            mode: self.mode,
            mean_curvature: hbar,
            mean_curvature_constant: constant,
            first_variation_formula: formula.into(),
            a_prime_analytic: a1,
            v_prime_analytic: ints.omega_phi,
            a_prime_fd: st.first(&areas),
            v_prime_fd: st.first(&vols),
            a_second_analytic: None,
            v_second_analytic: None,
            a_second_fd: None,
            v_second_fd: None,
            combined_second_fd: None,
            index_form: None,
            stationarity,
            volume_is_relative: self.volume_is_relative(),
            steps: st.steps.clone(),
            integrals: ints,
            samples,
        };
        if second {
            if self.has_zero_acceleration() {
                report.a_second_analytic =
                    Some(ints.gradient_term + ints.mean_square_term - ints.trace_term);
                if self.surface.is_closed() {
                    report.v_second_analytic = Some(-n * ints.mean_omega_sq_phi);
                }
            }
            report.a_second_fd = Some(st.second(&areas));
            report.v_second_fd = Some(st.second(&vols));
            let combined: Vec<f64> = areas
                .iter()
                .zip(&vols)
                .map(|(a, v)| a + n * hbar * v)
                .collect();
            report.combined_second_fd = Some(st.second(&combined));
            if stationarity.is_some_and(|s| s.max() <= STATIONARITY_TOL) {
                report.index_form = Some(index_form_unchecked(
                    &self.surface,
                    &self.body,
                    self.domain.as_ref(),
                    &self.omega,
                )?);
            }
        }
        Ok(report)
    }

    /// Derivatives of `a = A^{(n+1)/n}` with respect to volume along the flow.
    pub fn profile_slope_curvature(&self, stencil: &Stencil) -> Result<SlopeCurvature> {
        let res = stationarity_residual(&self.surface, &self.body, self.domain.as_ref())?;
        if res.max() > STATIONARITY_TOL {
            return Err(Error::NotStationary {
                mean_curvature: res.mean_curvature,
                contact: res.contact,
            });
        }
        let ints = self.integrals()?;
        if ints.omega_phi.abs() < 1e-12 * ints.area.max(1.0) {
            return Err(Error::ZeroVolumeVelocity);
        }
        let n = self.surface.n() as f64;
        let e = (n + 1.0) / n;
        let (st, samples) = self.sample_with_retry(stencil)?;
        let a: Vec<f64> = samples.iter().map(|s| s.area.powf(e)).collect();
        let v: Vec<f64> = samples.iter().map(|s| s.volume).collect();
        let (a1, a2) = (st.first(&a), st.second(&a));
        let (v1, v2) = (st.first(&v), st.second(&v));
        let area = samples[0].area;
        let h = ints.mean_curvature;
        let ik = index_form_unchecked(&self.surface, &self.body, self.domain.as_ref(), &self.omega)?;
        let slope = -(n + 1.0) * h * area.powf(1.0 / n);
        let curvature =
            e * area.powf(1.0 / n) * (n * h * h / area + ik / (ints.omega_phi * ints.omega_phi));
        Ok(SlopeCurvature {
            slope,
            curvature,
            slope_fd: a1.value / v1.value,
            curvature_fd: (a2.value * v1.value - a1.value * v2.value) / v1.value.powi(3),
            index_form: ik,
            mean_curvature: h,
        })
    }
}

/// Analytic and finite-difference derivatives of the profile along a flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeCurvature {
    pub slope: f64,
    pub curvature: f64,
    pub slope_fd: f64,
    pub curvature_fd: f64,
    pub index_form: f64,
    pub mean_curvature: f64,
}

/// `sup |H_K - H̄|` and `sup |⟨N_K, ξ⟩|` on boundary points, which must lie on `∂Ω`.
pub fn stationarity_residual(
    surface: &Hypersurface,
    body: &ConvexBody,
    domain: Option<&Domain>,
) -> Result<StationarityResidual> {
    let stats = surface.curvature_stats(body)?;
    let mut contact = 0.0f64;
    let bnodes = surface.boundary_nodes();
    if !bnodes.is_empty() {
        let d = domain.ok_or_else(|| {
            Error::InvalidArgument("a hypersurface with boundary needs a domain".into())
        })?;
        for bn in bnodes {
            let bf = surface.boundary_frame(body, &bn)?;
            let xi = d.inner_normal(&bf.point, flow::WALL_TOL)?;
            contact = contact.max(bf.aniso_normal.dot(&xi).abs());
        }
    }
    Ok(StationarityResidual {
        mean_curvature: stats.sup_deviation,
        contact,
    })
}

/// Anisotropic index form of `ω` on a stationary hypersurface.
pub fn index_form(
    surface: &Hypersurface,
    body: &ConvexBody,
    domain: Option<&Domain>,
    omega: &Omega,
) -> Result<f64> {
    let res = stationarity_residual(surface, body, domain)?;
    if res.max() > STATIONARITY_TOL {
        return Err(Error::NotStationary {
            mean_curvature: res.mean_curvature,
            contact: res.contact,
        });
    }
    index_form_unchecked(surface, body, domain, omega)
}

/// The index form evaluated as written, without a stationarity check.
pub fn index_form_unchecked(
    surface: &Hypersurface,
    body: &ConvexBody,
    domain: Option<&Domain>,
    omega: &Omega,
) -> Result<f64> {
    let mut interior = 0.0;
    for (nd, f) in surface.frames(body)? {
        let jet = surface.jet(nd.u);
        let (w, dw) = omega.eval(nd.u, &jet);
        let grad = f.surface_gradient(dw);
        let da = nd.weight * f.area_element;
        interior += ((f.q * grad).dot(&grad) * f.phi * f.phi
            - f.aniso_shape_sq_trace() * w * w * f.phi)
            * da;
    }
    let mut boundary = 0.0;
    let bnodes = surface.boundary_nodes();
    if !bnodes.is_empty() {
        let d = domain.ok_or_else(|| {
            Error::InvalidArgument("a hypersurface with boundary needs a domain".into())
        })?;
        for bn in bnodes {
            let bf = surface.boundary_frame(body, &bn)?;
            let (w, _) = omega.eval(bn.u, &surface.jet(bn.u));
            let xi = d.inner_normal(&bf.point, flow::WALL_TOL)?;
            let ii = d.second_form(&bf.point, &bf.aniso_normal, flow::WALL_TOL)?;
            let cos = bf.conormal.dot(&xi);
            boundary += ii / cos * w * w * bf.phi * bf.line_element * bn.weight;
        }
    }
    Ok(interior - boundary)
}

/// First variation of `(A_K, V)` along the straight-line flow in the whole space.
pub fn first_variation(
    surface: &Hypersurface,
    body: &ConvexBody,
    omega: &Omega,
) -> Result<VariationReport> {
    Flow::new(surface.clone(), body.clone(), omega.clone(), FlowMode::StraightLine, None)?
        .first_variation(&Stencil::default())
}

/// Second variation of `(A_K, V)` along the chosen deformation.
pub fn second_variation(
    surface: &Hypersurface,
    body: &ConvexBody,
    omega: &Omega,
    mode: FlowMode,
    domain: Option<&Domain>,
) -> Result<VariationReport> {
    Flow::new(surface.clone(), body.clone(), omega.clone(), mode, domain.cloned())?
        .second_variation(&Stencil::default())
}
