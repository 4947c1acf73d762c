use proptest::prelude::*;
use std::sync::OnceLock;
use wulffkit::geom::Vec3;
use wulffkit::profile::{
    concavity_report, cone_profile, cone_profile_curve, polygon_profile, uniform_grid, Cone, ProfileCurve,
    ProfileMode, ProfileOptions,
};
use wulffkit::surface::shapes::wulff;
use wulffkit::tolerance::Tolerances;
use wulffkit::{ConvexBody, Domain, DomainSpec};

fn fourier_body() -> impl Strategy<Value = ConvexBody> {
    (
        -0.3..0.3f64,
        -0.15..0.15f64,
        -0.15..0.15f64,
        -0.05..0.05f64,
        -0.05..0.05f64,
    )
        .prop_map(|(c1, c2, s2, c3, s3)| ConvexBody::fourier(2.0, &[c1, c2, c3], &[0.0, s2, s3]).unwrap())
}

fn ellipsoid3() -> impl Strategy<Value = ConvexBody> {
    (0.3..3.0f64, 0.3..3.0f64, 0.3..3.0f64, -0.2..0.2f64)
        .prop_map(|(a, b, c, off)| {
            ConvexBody::ellipsoid(3, &[a, off, 0.0, off, b, 0.0, 0.0, 0.0, c]).unwrap()
        })
}

fn any_body() -> impl Strategy<Value = ConvexBody> {
    prop_oneof![fourier_body(), ellipsoid3()]
}

fn direction(dim: usize) -> impl Strategy<Value = Vec3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(x, y, z)| x.abs() + y.abs() + z.abs() > 1e-2)
        .prop_map(move |(x, y, z)| Vec3::new(x, y, if dim == 3 { z } else { 0.0 }))
}

fn body_and_two_directions() -> impl Strategy<Value = (ConvexBody, Vec3, Vec3)> {
    any_body().prop_flat_map(|b| {
        let d = b.dim();
        (Just(b), direction(d), direction(d))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn support_is_positively_homogeneous((body, w, _) in body_and_two_directions(), lam in 0.01..100.0f64) {
        let h = body.support(&w).unwrap();
        let hl = body.support(&(w * lam)).unwrap();
        prop_assert!(h > 0.0);
        prop_assert!((hl - lam * h).abs() <= 1e-12 * lam * h);
    }

    #[test]
    fn support_is_subadditive((body, a, b) in body_and_two_directions()) {
        let s = a + b;
        prop_assume!(s.norm() > 1e-6);
        let lhs = body.support(&s).unwrap();
        let rhs = body.support(&a).unwrap() + body.support(&b).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn projection_attains_the_support((body, w, v) in body_and_two_directions()) {
        let u = w.normalize();
        let x = body.k_projection(&u).unwrap();
        prop_assert!((x.dot(&u) - body.support(&u).unwrap()).abs() <= 1e-10);
        // No point of K goes further in direction v than its support value.
        let vn = v.normalize();
        prop_assert!(x.dot(&vn) <= body.support(&vn).unwrap() + 1e-10);
    }

    #[test]
    fn dilated_wulff_shape_area_scales((body, _, _) in body_and_two_directions(), r in 0.2..5.0f64) {
        prop_assume!(body.dim() == 2);
        let n = body.n() as i32;
        let s = wulff(&body, Vec3::zeros(), r).unwrap();
        let expected = (n + 1) as f64 * r.powi(n) * body.volume();
        let area = s.anisotropic_area(&body).unwrap();
        prop_assert!((area - expected).abs() <= 1e-8 * expected, "{area} vs {expected}");
    }

    #[test]
    fn cone_profile_is_homogeneous(body in fourier_body(), v in 0.01..10.0f64, lam in 0.1..10.0f64) {
        let cone = Cone::half_plane(&Vec3::new(0.3, 1.0, 0.0));
        let n = body.n() as i32;
        let a = cone_profile(&body, &cone, lam.powi(n + 1) * v, 7).unwrap();
        let b = lam.powi(n) * cone_profile(&body, &cone, v, 7).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * b.max(1.0));
    }
}

fn candidates(refine: bool) -> ProfileOptions {
    ProfileOptions {
        mode: ProfileMode::Candidates,
        refine,
        ..ProfileOptions::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn profile_scales_with_the_domain(lam in 0.3..3.0f64, body in fourier_body()) {
        let unit = Domain::unit_square();
        let big = Domain::polygon(&[[0.0, 0.0], [lam, 0.0], [lam, lam], [0.0, lam]]).unwrap();
        let vols = uniform_grid(1.0, 6);
        let scaled: Vec<f64> = vols.iter().map(|v| v * lam * lam).collect();
        let p = polygon_profile(&body, &unit, &vols, &candidates(false)).unwrap();
        let q = polygon_profile(&body, &big, &scaled, &candidates(false)).unwrap();
        for (a, b) in p.samples.iter().zip(&q.samples) {
            prop_assert!((b.value - lam * a.value).abs() <= 1e-8 * (1.0 + b.value), "{} vs {}", b.value, lam * a.value);
        }
    }
}

fn square_profile() -> &'static ProfileCurve {
    static P: OnceLock<ProfileCurve> = OnceLock::new();
    P.get_or_init(|| {
        let body = ConvexBody::ball(2, 1.0).unwrap();
        polygon_profile(&body, &Domain::unit_square(), &uniform_grid(1.0, 21), &candidates(false)).unwrap()
    })
}

#[test]
fn uncorrupted_square_profile_is_concave() {
    let r = concavity_report(square_profile(), &Tolerances::default()).unwrap();
    assert!(r.pass, "max second difference {}", r.max_second_difference);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(19))]

    #[test]
    fn inflating_one_sample_breaks_concavity(i in 1usize..20) {
        let mut p = square_profile().clone();
        p.samples[i].value *= 1.05;
        let r = concavity_report(&p, &Tolerances::default()).unwrap();
        prop_assert!(!r.pass, "inflated sample {} went unnoticed", i);
    }
}

#[test]
fn cone_profile_samples_have_flat_psi() {
    let body = ConvexBody::fourier(2.0, &[0.2, 0.3], &[]).unwrap();
    let spec = DomainSpec::PolyhedralCone {
        apex: vec![0.0, 0.0],
        facet_normals: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
    };
    let domain = Domain::from_spec(&spec).unwrap();
    let p = cone_profile_curve(&body, &domain, &uniform_grid(2.0, 11), 7).unwrap();
    let psi: Vec<f64> = p.samples.iter().map(|s| p.psi(s.value)).collect();
    let scale = psi.iter().fold(0.0f64, |m, x| m.max(*x));
    for w in psi.windows(3) {
        assert!((w[0] - 2.0 * w[1] + w[2]).abs() <= 1e-12 * scale, "{w:?}");
    }
    let r = concavity_report(&p, &Tolerances::default()).unwrap();
    assert!(r.pass);
}
