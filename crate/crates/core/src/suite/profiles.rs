use super::{rel_gap, Check, CriterionResult, Source, SuiteConfig};
use crate::body::ConvexBody;
use crate::domain::{Domain, DomainSpec};
use crate::error::Result;
use crate::io::profile_csv;
use crate::profile::{
    comparison_report, concavity_report, cone_body_volume, cone_profile, cone_profile_value, polygon_profile,
    structure_checks, uniform_grid, wulff_cone_perimeter, Cone, Descriptor, Method, ProfileCurve, ProfileMode,
    ProfileOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Volumes per uniform profile grid, endpoints included.
pub const PROFILE_GRID: usize = 21;

fn cone_pairs() -> Vec<(&'static str, ConvexBody, DomainSpec)> {
    let ball2 = ConvexBody::ball(2, 1.0).unwrap();
    let fa = ConvexBody::fourier(2.0, &[0.0, 0.3], &[]).unwrap();
    let fb = ConvexBody::fourier(2.0, &[0.2, 0.3], &[]).unwrap();
    let s3 = 0.5 * 3f64.sqrt();
    vec![
        (
            "ball2 / quadrant",
            ball2.clone(),
            DomainSpec::PolyhedralCone {
                apex: vec![0.0, 0.0],
                facet_normals: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            },
        ),
        (
            "ball2 / half-plane",
            ball2,
            DomainSpec::HalfSpace {
                normal: vec![0.0, 1.0],
                offset: 0.0,
            },
        ),
        (
            "ellipse_4_1 / half-plane (1,1)",
            ConvexBody::diagonal(&[4.0, 1.0]).unwrap(),
            DomainSpec::HalfSpace {
                normal: vec![1.0, 1.0],
                offset: 0.0,
            },
        ),
        (
            "fourier_a / 60 degree sector",
            fa,
            DomainSpec::PolyhedralCone {
                apex: vec![0.0, 0.0],
                facet_normals: vec![vec![0.0, 1.0], vec![s3, -0.5]],
            },
        ),
        (
            "fourier_b / quadrant at (1,2)",
            fb.clone(),
            DomainSpec::PolyhedralCone {
                apex: vec![1.0, 2.0],
                facet_normals: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            },
        ),
        (
            "fourier_b / half-plane (-1,0)",
            fb,
            DomainSpec::HalfSpace {
                normal: vec![-1.0, 0.0],
                offset: 0.0,
            },
        ),
        (
            "ball3 / octant",
            ConvexBody::ball(3, 1.0).unwrap(),
            octant(),
        ),
        (
            "ellipsoid_4_2_1 / octant",
            ConvexBody::diagonal(&[4.0, 2.0, 1.0]).unwrap(),
            octant(),
        ),
    ]
}

fn octant() -> DomainSpec {
    DomainSpec::PolyhedralCone {
        apex: vec![0.0; 3],
        facet_normals: vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
    }
}

/// Independent values of `V(K ∩ C)` where symmetry gives them.
fn known_theta(label: &str) -> Option<f64> {
    match label {
        "ball2 / quadrant" => Some(PI / 4.0),
        "ball2 / half-plane" => Some(PI / 2.0),
        "ellipse_4_1 / half-plane (1,1)" => Some(PI),
        "ball3 / octant" => Some(PI / 6.0),
        // semi-axes 2, √2, 1
        "ellipsoid_4_2_1 / octant" => Some(4.0 * PI / 3.0 * 2.0 * 2f64.sqrt() / 8.0),
        _ => None,
    }
}

/// Criterion 4: cone identities, reference cone volumes and homogeneity.
pub fn cone_profiles(config: &SuiteConfig) -> Result<CriterionResult> {
    let tol = &config.tolerances;
    let exact = tol.get("cone_exact");
    let sigmas = tol.get("mc_sigmas");
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    for (i, (label, body, spec)) in cone_pairs().into_iter().enumerate() {
        let domain = Domain::from_spec(&spec)?;
        let (cone, _) = Cone::from_domain(&domain)?;
        let seed = config.seed.wrapping_add(400 + i as u64);
        let theta = cone_body_volume(&body, &cone, seed)?;
        let n1 = body.dim() as f64;
        let perimeter = wulff_cone_perimeter(&body, &cone)?;
        let src = if theta.monte_carlo { Source::Mc } else { Source::Analytic };
        let sigma = n1 * theta.std_error;
        checks.push(Check::at_most(
            format!("{label}: |P_K(K, C) - (n+1) V(K∩C)|"),
            (perimeter - n1 * theta.value).abs(),
            (1e-6f64).max(sigmas * sigma),
            src,
        ));
        if theta.monte_carlo {
            checks.push(Check::at_most(
                format!("{label}: Monte Carlo sigma / V(K∩C)"),
                theta.std_error / theta.value,
                tol.get("mc_sigma_rel"),
                Source::Mc,
            ));
            notes.push(format!(
                "{label}: V(K∩C) = {:.8} ± {:.2e} from {} samples, seed {seed}",
                theta.value, theta.std_error, theta.samples
            ));
        }
        if let Some(t) = known_theta(label) {
            let allowance = (exact * t).max(sigmas * theta.std_error);
            checks.push(Check::at_most(
                format!("{label}: V(K∩C) against symmetry value"),
                (theta.value - t).abs(),
                allowance,
                src,
            ));
        }
        let n = body.n();
        let mut worst = 0.0f64;
        for lam in [0.5f64, 2.0, 3.7] {
            for v in [0.3, 1.7] {
                let scaled = cone_profile_value(n, theta.value, lam.powi(n as i32 + 1) * v);
                let base = lam.powi(n as i32) * cone_profile_value(n, theta.value, v);
                worst = worst.max(rel_gap(scaled, base, base));
            }
        }
        checks.push(Check::at_most(format!("{label}: homogeneity"), worst, exact, Source::Analytic));
    }

    let square = Domain::unit_square();
    let corner = Cone::polygon_corner(&square, 0)?;
    let ball = ConvexBody::ball(2, 1.0)?;
    let mut worst = 0.0f64;
    for v in [0.01, 0.1, 0.5, 1.0, 4.0] {
        let i = cone_profile(&ball, &corner, v, config.seed)?;
        worst = worst.max((i - (PI * v).sqrt()).abs() / (PI * v).sqrt().max(1.0));
    }
    checks.push(Check::at_most("square corner profile vs sqrt(pi v)", worst, exact, Source::Analytic));

    let fb = ConvexBody::fourier(2.0, &[0.2, 0.3], &[])?;
    let right = cone_body_volume(&fb, &Cone::half_plane(&crate::geom::Vec3::new(1.0, 0.0, 0.0)), config.seed)?.value;
    let left = cone_body_volume(&fb, &Cone::half_plane(&crate::geom::Vec3::new(-1.0, 0.0, 0.0)), config.seed)?.value;
    checks.push(Check::at_most(
        "fourier_b: opposite half-planes sum to V(K)",
        rel_gap(left + right, fb.volume(), fb.volume()),
        exact,
        Source::Analytic,
    ));
    checks.push(Check::above(
        "fourier_b: opposite half-plane volumes differ",
        (left - right).abs(),
        1e-6,
        Source::Analytic,
    ));
    let full = Cone::Full { dim: 2 };
    let at_v = cone_profile(&fb, &full, fb.volume(), config.seed)?;
    checks.push(Check::at_most(
        "fourier_b: full-plane profile at V(K) equals 2V(K)",
        rel_gap(at_v, 2.0 * fb.volume(), fb.volume()),
        exact,
        Source::Analytic,
    ));
    let pf = wulff_cone_perimeter(&fb, &full)?;
    checks.push(Check::at_most(
        "fourier_b: full-plane P_K(K) equals 2V(K)",
        rel_gap(pf, 2.0 * fb.volume(), fb.volume()),
        exact,
        Source::Analytic,
    ));
    Ok(CriterionResult::new(4, "cone profiles", checks).with_notes(notes))
}

/// Convex hexagon with vertices on the unit circle at jittered angles.
pub fn random_hexagon(seed: u64) -> Result<Domain> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(600);
    let vs: Vec<[f64; 2]> = (0..6)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / 6.0 + rng.random_range(-0.3..0.3);
            [a.cos(), a.sin()]
        })
        .collect();
    Domain::polygon(&vs)
}

fn options(config: &SuiteConfig, mode: ProfileMode) -> ProfileOptions {
    ProfileOptions {
        mode,
        seed: config.seed,
        ..ProfileOptions::default()
    }
}

fn method_source(p: &ProfileCurve, v: f64) -> Source {
    match p.samples.iter().find(|s| s.v == v).map(|s| s.method) {
        Some(Method::Optimizer) => Source::Optimizer,
        _ => Source::Analytic,
    }
}

fn profile_notes(label: &str, p: &ProfileCurve) -> Vec<String> {
    let mut notes: Vec<String> = p.warnings.iter().map(|w| format!("{label}: {w}")).collect();
    let improved = p.samples.iter().filter(|s| s.method == Method::Optimizer).count();
    if improved > 0 {
        notes.push(format!("{label}: optimizer improved on the candidates at {improved} volumes"));
    }
    let disconnected: Vec<String> = p
        .samples
        .iter()
        .filter(|s| !s.connected)
        .map(|s| format!("{}", s.v))
        .collect();
    if !disconnected.is_empty() {
        notes.push(format!("{label}: disconnected best competitor at v = {}", disconnected.join(", ")));
    }
    notes
}

/// The unit-square profile for `Ball(1)` on the default grid.
pub fn square_ball_profile(config: &SuiteConfig, mode: ProfileMode) -> Result<ProfileCurve> {
    let body = ConvexBody::ball(2, 1.0)?;
    let domain = Domain::unit_square();
    polygon_profile(&body, &domain, &uniform_grid(1.0, PROFILE_GRID), &options(config, mode))
}

/// Criterion 5 for a given route: reference values, symmetry, concavity and
/// the cone comparison on the unit square with `Ball(1)`.
pub fn square_ball(config: &SuiteConfig, mode: ProfileMode) -> Result<CriterionResult> {
    let tol = &config.tolerances;
    let body = ConvexBody::ball(2, 1.0)?;
    let domain = Domain::unit_square();
    let p = square_ball_profile(config, mode)?;
    let mut checks = Vec::new();
    for (v, expected) in [(0.1, 0.560499), (0.5, 1.0)] {
        match p.at(v) {
            Some(i) => checks.push(Check::at_most(
                format!("I({v}) reference"),
                (i - expected).abs(),
                tol.get("profile_value"),
                method_source(&p, v),
            )),
            None => checks.push(Check::failed(format!("I({v}) reference"), Source::Analytic)),
        }
    }
    let sym = structure_checks(&p, &body, None, tol)?;
    checks.extend(sym.checks.iter().filter(|c| c.name == "complement symmetry").cloned());
    let conc = concavity_report(&p, tol)?;
    checks.extend(conc.checks.clone());
    let cmp = comparison_report(&p, &body, &domain, config.seed, tol)?;
    checks.extend(cmp.checks.clone());
    let threshold = 1.0 / PI;
    let expected: Vec<f64> = p
        .samples
        .iter()
        .filter(|s| s.v > 0.0 && s.v < 1.0 && s.v <= threshold)
        .map(|s| s.v)
        .collect();
    let tight: Vec<f64> = cmp.tight.iter().map(|t| t.v).collect();
    checks.push(Check::flag(
        "corner bound tight exactly on v <= 1/pi",
        tight == expected && !tight.is_empty(),
        Source::Analytic,
    ));
    checks.push(Check::flag(
        "tight samples are corner Wulff truncations",
        cmp.tight.iter().all(|t| t.corner_wulff),
        Source::Analytic,
    ));
    let mut notes = profile_notes("square/ball", &p);
    notes.push(format!(
        "max second difference of psi {:.3e} (allowance {:.3e}); max chord violation of I {:.3e}",
        conc.max_second_difference, conc.tolerance, conc.max_chord_violation
    ));
    let title = match mode {
        ProfileMode::Candidates => "square profile, candidates only",
        _ => "square profile",
    };
    Ok(CriterionResult::new(5, title, checks).with_notes(notes))
}

/// Criterion 6: anisotropic profiles on the unit square and a random hexagon.
pub fn anisotropic_profiles(config: &SuiteConfig) -> Result<CriterionResult> {
    let tol = &config.tolerances;
    let domains = vec![("square", Domain::unit_square()), ("hexagon", random_hexagon(config.seed)?)];
    let bodies = vec![
        ("ellipse_4_1", ConvexBody::diagonal(&[4.0, 1.0])?),
        ("fourier_a", ConvexBody::fourier(2.0, &[0.0, 0.3], &[])?),
        ("fourier_b", ConvexBody::fourier(2.0, &[0.2, 0.3], &[])?),
    ];
    let euclid = ConvexBody::ball(2, 1.0)?;
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    let hexagon: Vec<String> = domains[1].1.vertices().iter().map(|p| format!("({:.6}, {:.6})", p.x, p.y)).collect();
    notes.push(format!("hexagon vertices (seed {}): {}", config.seed, hexagon.join(" ")));
    for (dname, domain) in &domains {
        let total = domain.volume().expect("bounded domain");
        let grid = uniform_grid(total, PROFILE_GRID);
        let reference = polygon_profile(&euclid, domain, &grid, &options(config, ProfileMode::Candidates))?;
        for (bname, body) in &bodies {
            let label = format!("{dname}/{bname}");
            let p = polygon_profile(body, domain, &grid, &options(config, ProfileMode::Both))?;
            let conc = concavity_report(&p, tol)?;
            checks.extend(conc.checks.iter().map(|c| prefixed(&label, c)));
            let st = structure_checks(&p, body, Some(&reference), tol)?;
            checks.extend(st.checks.iter().map(|c| prefixed(&label, c)));
            if !body.is_centrally_symmetric() {
                let complement = p
                    .samples
                    .iter()
                    .any(|s| matches!(s.descriptor, Descriptor::Complement { .. }));
                checks.push(Check::flag(
                    format!("{label}: complement competitors used"),
                    complement,
                    Source::Analytic,
                ));
                notes.push(format!(
                    "{label}: symmetry and monotonicity skipped; subadditivity margin {:.3e}",
                    st.subadditivity_margin
                ));
            }
            notes.push(format!(
                "{label}: {} samples, max second difference of psi {:.3e} (allowance {:.3e}), {} slope brackets",
                p.samples.len(),
                conc.max_second_difference,
                conc.tolerance,
                st.slopes.len()
            ));
            notes.extend(profile_notes(&label, &p));
        }
    }
    Ok(CriterionResult::new(6, "anisotropic profiles", checks).with_notes(notes))
}

fn prefixed(label: &str, c: &Check) -> Check {
    Check {
        name: format!("{label}: {}", c.name),
        ..c.clone()
    }
}

/// Criterion 8: repeated runs give byte-identical tables, also after a
/// serialization round trip.
pub fn determinism(config: &SuiteConfig) -> Result<CriterionResult> {
    let a = square_ball_profile(config, ProfileMode::Both)?;
    let b = square_ball_profile(config, ProfileMode::Both)?;
    let ca = profile_csv(&a)?;
    let cb = profile_csv(&b)?;
    let round: ProfileCurve = serde_json::from_str(&serde_json::to_string(&a)?)?;
    let cr = profile_csv(&round)?;
    let checks = vec![
        Check::flag("repeated profile.csv byte-identical", ca == cb, Source::Optimizer),
        Check::flag("serialized profile reproduces profile.csv", ca == cr, Source::Optimizer),
        Check::flag("seed recorded in profile.csv", ca.starts_with(&format!("# seed={}\n", config.seed)), Source::Analytic),
    ];
    Ok(CriterionResult::new(8, "determinism", checks))
}
