use super::{rel_gap, Check, CriterionResult, Source, SuiteConfig};
use crate::body::ConvexBody;
use crate::domain::{Domain, DomainSpec};
use crate::error::{Error, Result};
use crate::fd::{FdEstimate, Stencil};
use crate::geom::{angle_of, polar, wrap_from, Vec3};
use crate::roots::brent;
use crate::surface::shapes::{sphere, wulff, wulff_arc, Circle, Ellipse, FlatDisk, PlanePatch, Segment};
use crate::surface::Hypersurface;
use crate::tolerance::Tolerances;
use crate::variation::{Flow, FlowMode, Omega, OmegaSpec, VariationReport, STATIONARITY_TOL};
use std::f64::consts::{FRAC_PI_2, PI};

/// A hypersurface with a body, an optional domain and a test function.
#[derive(Debug, Clone)]
pub struct VariationScene {
    pub name: String,
    pub flow: Flow,
}

impl VariationScene {
    fn new(
        name: &str,
        surface: Hypersurface,
        body: ConvexBody,
        omega: OmegaSpec,
        mode: FlowMode,
        domain: Option<Domain>,
    ) -> Result<Self> {
        let omega = Omega::new(omega, &surface)?;
        Ok(VariationScene {
            name: name.into(),
            flow: Flow::new(surface, body, omega, mode, domain)?,
        })
    }
}

fn v2(x: f64, y: f64) -> Vec3 {
    Vec3::new(x, y, 0.0)
}

fn ball(dim: usize) -> ConvexBody {
    ConvexBody::ball(dim, 1.0).unwrap()
}

fn fourier_a() -> ConvexBody {
    ConvexBody::fourier(2.0, &[0.0, 0.3], &[]).unwrap()
}

fn fourier_b() -> ConvexBody {
    ConvexBody::fourier(2.0, &[0.2, 0.3], &[]).unwrap()
}

fn mode(k: u32) -> OmegaSpec {
    OmegaSpec::FourierMode {
        k,
        phase: 0.0,
        amplitude: 1.0,
    }
}

fn constant() -> OmegaSpec {
    OmegaSpec::Constant { value: 1.0 }
}

fn bump(center: Vec<f64>, radius: f64) -> OmegaSpec {
    OmegaSpec::Bump {
        center,
        radius,
        amplitude: 1.0,
    }
}

fn ambient_bump(center: Vec<f64>, radius: f64) -> OmegaSpec {
    OmegaSpec::AmbientBump {
        center,
        radius,
        amplitude: 1.0,
    }
}

/// The twelve pinned scenes for the first and second variation formulas.
pub fn variation_scenes() -> Result<Vec<VariationScene>> {
    use FlowMode::StraightLine as SL;
    let unit_circle = || {
        Hypersurface::new(Circle {
            center: Vec3::zeros(),
            radius: 1.0,
        })
    };
    let unit_sphere = || Hypersurface::new(sphere(Vec3::zeros(), 1.0)).with_panels(16);
    let e41 = ConvexBody::diagonal(&[4.0, 1.0])?;
    let e421 = ConvexBody::diagonal(&[4.0, 2.0, 1.0])?;
    let z = Vec3::zeros();
    Ok(vec![
        VariationScene::new("circle, ball, constant", unit_circle(), ball(2), constant(), SL, None)?,
        VariationScene::new("circle, ball, mode 1", unit_circle(), ball(2), mode(1), SL, None)?,
        VariationScene::new(
            "offset circle, fourier a, bump",
            Hypersurface::new(Circle {
                center: v2(0.3, 0.1),
                radius: 1.5,
            }),
            fourier_a(),
            bump(vec![0.25], 0.3),
            SL,
            None,
        )?,
        VariationScene::new(
            "rotated ellipse, fourier b, mode 2",
            Hypersurface::new(Ellipse {
                center: z,
                semi_axes: [2.0, 1.0],
                rotation: 0.3,
            }),
            fourier_b(),
            mode(2),
            SL,
            None,
        )?,
        VariationScene::new("wulff ellipse, constant", wulff(&e41, z, 1.0)?, e41.clone(), constant(), SL, None)?,
        VariationScene::new("wulff fourier b, mode 3", wulff(&fourier_b(), z, 1.0)?, fourier_b(), mode(3), SL, None)?,
        VariationScene::new("sphere, ball, constant", unit_sphere(), ball(3), constant(), SL, None)?,
        VariationScene::new("sphere, ellipsoid, mode 2", unit_sphere(), e421.clone(), mode(2), SL, None)?,
        VariationScene::new(
            "sphere, ball, polar bump",
            unit_sphere(),
            ball(3),
            ambient_bump(vec![0.0, 0.0, 1.0], 0.8),
            SL,
            None,
        )?,
        VariationScene::new(
            "segment, ellipse, bump",
            Hypersurface::new(Segment {
                start: v2(-1.0, 0.0),
                end: v2(1.0, 0.0),
            }),
            e41,
            bump(vec![0.5], 0.4),
            SL,
            None,
        )?,
        VariationScene::new(
            "square patch, ellipsoid, bump",
            Hypersurface::new(PlanePatch {
                origin: z,
                e1: Vec3::x(),
                e2: Vec3::y(),
                u: [-1.0, 1.0],
                v: [-1.0, 1.0],
            })
            .with_panels(12),
            e421,
            bump(vec![0.5, 0.5], 0.4),
            SL,
            None,
        )?,
        VariationScene::new(
            "flat disk, ball, bump",
            Hypersurface::new(FlatDisk {
                center: z,
                e1: Vec3::x(),
                e2: Vec3::y(),
                radius: 1.0,
            })
            .with_panels(12),
            ball(3),
            ambient_bump(vec![0.0, 0.0, 0.0], 0.9),
            SL,
            None,
        )?,
    ])
}

fn order_check(name: String, est: &FdEstimate, min: f64) -> Check {
    Check {
        name,
        value: est.observed_order.unwrap_or(f64::INFINITY),
        tolerance: min,
        source: Source::Fd,
        pass: est.order_at_least(min),
    }
}

/// Scale for a relative gap: never above `1 + |value|`.
fn capped(scale: f64, value: f64) -> f64 {
    scale.min(1.0 + value.abs())
}

/// Checks of one variation report: first variations, second variations when
/// available, and the index form when the surface is stationary. With
/// `require_second`, a missing `A''(0)` formula counts as a failure.
pub fn report_checks(
    name: &str,
    rep: &VariationReport,
    tol: &Tolerances,
    require_second: bool,
) -> Vec<Check> {
    let (rel, order) = (tol.get("fd_rel"), tol.get("fd_order"));
    let mut checks = Vec::new();
    let ints = &rep.integrals;
    let floor = 1e-6 * ints.abs_omega_phi;
    let a1_scale = rep
        .a_prime_analytic
        .abs()
        .max(ints.abs_mean_curvature_omega_phi + ints.boundary_flux.abs())
        .max(floor);
    checks.push(Check::at_most(
        format!("{name}: A'(0) relative"),
        rel_gap(rep.a_prime_analytic, rep.a_prime_fd.value, capped(a1_scale, rep.a_prime_analytic)),
        rel,
        Source::Fd,
    ));
    checks.push(Check::at_most(
        format!("{name}: V'(0) relative"),
        rel_gap(
            rep.v_prime_analytic,
            rep.v_prime_fd.value,
            capped(rep.v_prime_analytic.abs().max(ints.abs_omega_phi), rep.v_prime_analytic),
        ),
        rel,
        Source::Fd,
    ));
    checks.push(order_check(format!("{name}: A'(0) order"), &rep.a_prime_fd, order));
    checks.push(order_check(format!("{name}: V'(0) order"), &rep.v_prime_fd, order));
    let Some(a2_fd) = rep.a_second_fd.as_ref() else {
        return checks;
    };
    match rep.a_second_analytic {
        Some(a2) => {
            let scale = a2
                .abs()
                .max(ints.gradient_term + ints.trace_term + ints.mean_square_term);
            checks.push(Check::at_most(
                format!("{name}: A''(0) relative"),
                rel_gap(a2, a2_fd.value, capped(scale, a2)),
                rel,
                Source::Fd,
            ));
            checks.push(order_check(format!("{name}: A''(0) order"), a2_fd, order));
        }
        None if require_second => {
            checks.push(Check::failed(format!("{name}: A''(0) formula"), Source::Analytic))
        }
        None => {}
    }
    if let (Some(v2), Some(v2_fd)) = (rep.v_second_analytic, rep.v_second_fd.as_ref()) {
        let scale = v2.abs().max(ints.abs_mean_omega_sq_phi);
        checks.push(Check::at_most(
            format!("{name}: V''(0) relative"),
            rel_gap(v2, v2_fd.value, capped(scale, v2)),
            rel,
            Source::Fd,
        ));
        checks.push(order_check(format!("{name}: V''(0) order"), v2_fd, order));
    }
    if let (Some(ik), Some(fd)) = (rep.index_form, rep.combined_second_fd.as_ref()) {
        checks.push(Check::at_most(
            format!("{name}: index form relative"),
            rel_gap(ik, fd.value, ik.abs()),
            tol.get("index_rel"),
            Source::Fd,
        ));
    }
    checks
}

/// Criterion 2: analytic first and second variations against extrapolated differences.
pub fn variation_formulas(config: &SuiteConfig) -> Result<CriterionResult> {
    let mut checks = Vec::new();
    for scene in variation_scenes()? {
        let name = &scene.name;
        match scene.flow.second_variation(&Stencil::default()) {
            Ok(rep) => {
                let mut c = report_checks(name, &rep, &config.tolerances, true);
                c.retain(|c| !c.name.ends_with("index form relative"));
                checks.extend(c);
            }
            Err(_) => checks.push(Check::failed(format!("{name}: variation"), Source::Fd)),
        }
    }
    Ok(CriterionResult::new(2, "variation formulas", checks))
}

/// A Wulff arc `∂(p₀ + λK) ∩ D` meeting the circle `∂D` in the anisotropic
/// free-boundary condition, with `p₀` at `distance` from the center found by
/// root-finding on its polar angle. Returns the arc and `λ`.
pub fn disk_wulff_arc(body: &ConvexBody, center: Vec3, radius: f64, distance: f64) -> Result<(Hypersurface, f64)> {
    if body.dim() != 2 || !(distance > radius) {
        return Err(Error::InvalidArgument(
            "a planar body and an exterior center are required".into(),
        ));
    }
    // free-boundary contact points are the tangent points from p₀
    let beta = (radius / distance).acos();
    let points = |a: f64| {
        let p0 = center + polar(a) * distance;
        let q1 = center + polar(a + beta) * radius;
        let q2 = center + polar(a - beta) * radius;
        (p0, q1, q2)
    };
    let mismatch = |a: f64| {
        let (p0, q1, q2) = points(a);
        body.gauge(&(q1 - p0)) - body.gauge(&(q2 - p0))
    };
    let steps = 720;
    let grid: Vec<f64> = (0..=steps).map(|i| 2.0 * PI * i as f64 / steps as f64 + 0.1).collect();
    let alpha = grid
        .windows(2)
        .find_map(|w| {
            let (fa, fb) = (mismatch(w[0]), mismatch(w[1]));
            if fa == 0.0 {
                Some(w[0])
            } else if fa * fb < 0.0 {
                brent(mismatch, w[0], w[1], 1e-15)
            } else {
                None
            }
        })
        .ok_or(Error::EmptyIntersection)?;
    let (p0, q1, q2) = points(alpha);
    let lambda = body.gauge(&(q1 - p0));
    let t1 = angle_of(&body.normal_at(&(q1 - p0)));
    let t2 = angle_of(&body.normal_at(&(q2 - p0)));
    for (a, b) in [(t1, t2), (t2, t1)] {
        let b = wrap_from(b, a);
        let arc = wulff_arc(body, p0, lambda, [a, b])?;
        let mid = arc.point([0.5 * (a + b), 0.0]);
        if (mid - center).norm() < radius {
            return Ok((arc, lambda));
        }
    }
    Err(Error::EmptyIntersection)
}

fn index_omegas() -> Vec<(&'static str, OmegaSpec)> {
    vec![
        (
            "affine",
            OmegaSpec::Affine {
                offset: 0.5,
                slope: vec![1.0],
            },
        ),
        (
            "cosine",
            OmegaSpec::FourierMode {
                k: 1,
                phase: 0.3,
                amplitude: 1.0,
            },
        ),
        ("bump", bump(vec![0.5], 0.45)),
    ]
}

/// The four stationary free-boundary scenes, each with three test functions.
pub fn index_scenes() -> Result<Vec<VariationScene>> {
    let e41 = ConvexBody::diagonal(&[4.0, 1.0])?;
    let slab = Domain::from_spec(&DomainSpec::Slab {
        dim: 2,
        normal: Some(vec![0.0, 1.0]),
        width: 1.0,
    })?;
    let quadrant = Domain::from_spec(&DomainSpec::PolyhedralCone {
        apex: vec![0.0, 0.0],
        facet_normals: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
    })?;
    let disk = Domain::disk([0.0, 0.0], 1.0)?;
    let fb = fourier_b();
    let quarter = wulff_arc(
        &fb,
        Vec3::zeros(),
        1.0,
        [
            fb.normal_angle_of_direction(0.0),
            fb.normal_angle_of_direction(FRAC_PI_2),
        ],
    )?;
    let (disk_arc, _) = disk_wulff_arc(&fb, Vec3::zeros(), 1.0, 1.6)?;
    let base: Vec<(&str, Hypersurface, ConvexBody, FlowMode, Domain)> = vec![
        (
            "segment in slab",
            Hypersurface::new(Segment {
                start: v2(0.0, 0.0),
                end: v2(0.0, 1.0),
            }),
            e41,
            FlowMode::StraightLine,
            slab,
        ),
        ("quarter wulff arc", quarter, fb.clone(), FlowMode::StraightLine, quadrant),
        (
            "diameter in disk",
            Hypersurface::new(Segment {
                start: v2(-1.0, 0.0),
                end: v2(1.0, 0.0),
            }),
            ball(2),
            FlowMode::BoundaryStraightened,
            disk.clone(),
        ),
        ("wulff arc in disk", disk_arc, fb, FlowMode::BoundaryStraightened, disk),
    ];
    let mut out = Vec::new();
    for (name, surface, body, mode, domain) in base {
        for (oname, omega) in index_omegas() {
            out.push(VariationScene::new(
                &format!("{name}, {oname}"),
                surface.clone(),
                body.clone(),
                omega,
                mode,
                Some(domain.clone()),
            )?);
        }
    }
    Ok(out)
}

/// Criterion 3: `(A_K + n H̄ V)''(0)` against the index form.
pub fn index_form_scenes(config: &SuiteConfig) -> Result<CriterionResult> {
    let tol = config.tolerances.get("index_rel");
    let mut checks = Vec::new();
    let mut contact_checked = false;
    for scene in index_scenes()? {
        let name = &scene.name;
        let rep = match scene.flow.second_variation(&Stencil::default()) {
            Ok(r) => r,
            Err(_) => {
                checks.push(Check::failed(format!("{name}: variation"), Source::Fd));
                continue;
            }
        };
        if name.starts_with("wulff arc in disk") && !contact_checked {
            contact_checked = true;
            checks.push(Check::at_most(
                "wulff arc in disk: contact residual",
                rep.stationarity.map_or(f64::NAN, |s| s.contact),
                1e-8,
                Source::Analytic,
            ));
        }
        let (Some(ik), Some(fd)) = (rep.index_form, rep.combined_second_fd.as_ref()) else {
            checks.push(Check::at_most(
                format!("{name}: stationarity"),
                rep.stationarity.map_or(f64::NAN, |s| s.max()),
                STATIONARITY_TOL,
                Source::Analytic,
            ));
            continue;
        };
        checks.push(Check::at_most(
            format!("{name}: index form relative"),
            rel_gap(ik, fd.value, ik.abs()),
            tol,
            Source::Fd,
        ));
    }
    Ok(CriterionResult::new(3, "index form", checks))
}
