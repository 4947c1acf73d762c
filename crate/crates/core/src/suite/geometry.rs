use super::{rel_gap, Check, CriterionResult, Source, SuiteConfig};
use crate::body::ConvexBody;
use crate::error::Result;
use crate::fd::Stencil;
use crate::geom::Vec3;
use crate::poly::Polynomial;
use crate::surface::shapes::{wulff, RadialPerturbation};
use crate::surface::Hypersurface;
use crate::variation::{Flow, FlowMode, Omega, OmegaSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The reference bodies, labelled.
pub fn reference_bodies() -> Vec<(&'static str, ConvexBody)> {
    vec![
        ("ball2", ConvexBody::ball(2, 1.0).unwrap()),
        ("ball3", ConvexBody::ball(3, 1.0).unwrap()),
        ("ellipse_4_1", ConvexBody::diagonal(&[4.0, 1.0]).unwrap()),
        ("ellipsoid_4_2_1", ConvexBody::diagonal(&[4.0, 2.0, 1.0]).unwrap()),
        ("fourier_a", ConvexBody::fourier(2.0, &[0.0, 0.3], &[]).unwrap()),
        ("fourier_b", ConvexBody::fourier(2.0, &[0.2, 0.3], &[]).unwrap()),
    ]
}

fn wulff_surface(body: &ConvexBody) -> Result<Hypersurface> {
    let s = wulff(body, Vec3::zeros(), 1.0)?;
    Ok(if body.dim() == 3 { s.with_panels(16) } else { s })
}

/// Criterion 1: `H_K ≡ -1`, `tr(B_K²) = n H_K²` and `A_K = (n+1) V` on `∂K`.
pub fn wulff_identities(config: &SuiteConfig) -> Result<CriterionResult> {
    let tol = &config.tolerances;
    let mut checks = Vec::new();
    for (name, body) in reference_bodies() {
        let s = wulff_surface(&body)?;
        let stats = s.curvature_stats(&body)?;
        let dev = (stats.min + 1.0).abs().max((stats.max + 1.0).abs());
        checks.push(Check::at_most(
            format!("{name}: sup |H_K + 1|"),
            dev,
            tol.get("wulff_h"),
            Source::Analytic,
        ));
        checks.push(Check::at_most(
            format!("{name}: sup trace gap"),
            stats.sup_trace_gap,
            tol.get("trace_gap"),
            Source::Analytic,
        ));
        let area = s.anisotropic_area(&body)?;
        let expected = (body.n() + 1) as f64 * body.volume();
        checks.push(Check::at_most(
            format!("{name}: A_K vs (n+1)V relative"),
            rel_gap(area, expected, expected),
            tol.get("area_rel"),
            Source::Analytic,
        ));
    }
    Ok(CriterionResult::new(1, "Wulff identities", checks))
}

fn random_polynomial(rng: &mut ChaCha8Rng, dim: usize, max_degree: u32, scale: f64) -> Vec<([u32; 3], f64)> {
    let mut terms = Vec::new();
    for i in 0..=max_degree {
        for j in 0..=(max_degree - i) {
            let kmax = if dim == 3 { max_degree - i - j } else { 0 };
            for k in 0..=kmax {
                let deg = (i + j + k) as i32;
                let c: f64 = rng.random_range(-1.0..1.0);
                terms.push(([i, j, k], c / scale.powi(deg)));
            }
        }
    }
    terms
}

fn random_omega(rng: &mut ChaCha8Rng, surface: &Hypersurface, radius: f64) -> Result<Omega> {
    let spec = if surface.n() == 1 {
        let modes = 4;
        OmegaSpec::Series {
            offset: 0.0,
            cos: (1..=modes).map(|k| rng.random_range(-1.0..1.0) / k as f64).collect(),
            sin: (1..=modes).map(|k| rng.random_range(-1.0..1.0) / k as f64).collect(),
        }
    } else {
        OmegaSpec::Polynomial {
            terms: random_polynomial(rng, 3, 3, radius),
        }
    };
    Omega::new(spec, surface)
}

/// `ω - c` with `∫ (ω - c) φ_K = 0`.
fn volume_preserving(omega: Omega, surface: &Hypersurface, body: &ConvexBody) -> Result<Omega> {
    let flow = Flow::new(surface.clone(), body.clone(), omega.clone(), FlowMode::StraightLine, None)?;
    let ints = flow.integrals()?;
    let aniso_area = surface.anisotropic_area(body)?;
    omega.shifted(-ints.omega_phi / aniso_area)
}

fn ratio(area: f64, volume: f64, n: usize) -> f64 {
    area.powi(n as i32 + 1) / volume.powi(n as i32)
}

/// Criterion 7: second variation and isoperimetric ratio near `∂K`.
pub fn stability(config: &SuiteConfig) -> Result<CriterionResult> {
    let tol = &config.tolerances;
    let mut checks = Vec::new();
    for (bi, (name, body)) in reference_bodies().into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(700 + bi as u64);
        let s = wulff_surface(&body)?;
        let radius = body.support_extremes().1;
        for k in 0..10 {
            let omega = volume_preserving(random_omega(&mut rng, &s, radius)?, &s, &body)?;
            let flow = Flow::new(s.clone(), body.clone(), omega, FlowMode::StraightLine, None)?;
            let check = match flow.second_variation(&Stencil::default()) {
                Ok(rep) => Check::at_least(
                    format!("{name}: A''(0) for volume-preserving omega {k}"),
                    rep.a_second_fd.map_or(f64::NAN, |e| e.value),
                    tol.get("stability"),
                    Source::Fd,
                ),
                Err(_) => Check::failed(format!("{name}: A''(0) for omega {k}"), Source::Fd),
            };
            checks.push(check);
        }
        let n = body.n();
        let reference = ratio(s.anisotropic_area(&body)?, s.enclosed_volume(&[])?, n);
        for k in 0..20 {
            let eps = rng.random_range(0.002..0.02);
            let profile = Polynomial {
                terms: random_polynomial(&mut rng, body.dim(), 3, radius),
            };
            let perturbed = Hypersurface::new(RadialPerturbation {
                base: s.param().clone(),
                center: Vec3::zeros(),
                epsilon: eps,
                profile,
            })
            .with_panels2(s.panels());
            let value = ratio(
                perturbed.anisotropic_area(&body)?,
                perturbed.enclosed_volume(&[])?,
                n,
            );
            checks.push(Check::at_least(
                format!("{name}: ratio deficit of perturbation {k}"),
                value - reference,
                tol.get("ratio"),
                Source::Analytic,
            ));
        }
    }
    Ok(CriterionResult::new(7, "Wulff stability", checks))
}
