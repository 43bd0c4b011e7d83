use std::f64::consts::{FRAC_PI_2, PI, TAU};

use catasym_core::cat1::certify_suspender;
use catasym_core::cone::{FlatCone, IdealPoint, Target};
use catasym_core::metric::{epsilon_net, ModelPoint, SampleSet, SpaceDescriptor};
use catasym_core::strainer::{
    bilipschitz_verify, certify_ideal_strainer, equal_endpoint_geodesics, find_ideal_strainer,
    first_variation_inequalities_check, lipschitz_and_open_constants, openness_iteration,
    random_geodesics, sharpest_delta, sphere_map_distortion, IdealStrainer, MapKind, StrainerMap,
    DEFAULT_PAIR_BUDGET,
};
use catasym_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn circle(l: f64) -> SpaceDescriptor {
    SpaceDescriptor::circle(l).unwrap()
}

fn angles(ts: &[f64]) -> Vec<ModelPoint> {
    ts.iter().map(|&t| ModelPoint::Angle(t)).collect()
}

/// {0, L/4} with opposites {L/2, 3L/4}.
fn quarter(l: f64) -> (Vec<ModelPoint>, Vec<ModelPoint>) {
    (angles(&[0.0, l / 4.0]), angles(&[l / 2.0, 3.0 * l / 4.0]))
}

/// The quarter tuple certified at its sharpest grid value on an eps-net.
fn quarter_strainer(l: f64, eps: f64) -> (FlatCone, IdealStrainer) {
    let cone = FlatCone::new(l).unwrap();
    let base = circle(l);
    let net = epsilon_net(&base, None, eps, 0).unwrap();
    let (p, q) = quarter(l);
    let loose = certify_suspender(&base, &net, &p, &q, 1.0)
        .unwrap()
        .unwrap();
    let s = certify_ideal_strainer(cone.space(), &p, &q, &net, sharpest_delta(loose.defect))
        .unwrap()
        .unwrap();
    (cone, s)
}

fn quarter_map(l: f64, eps: f64) -> (FlatCone, StrainerMap) {
    let (cone, s) = quarter_strainer(l, eps);
    let sm = StrainerMap::new(cone.space(), &s).unwrap();
    (cone, sm)
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Busemann value from raw distances far out along the ray, with a
/// Richardson step to cancel the 1/t tail.
fn raw_busemann(cone: &FlatCone, xi: f64, p: &ModelPoint) -> f64 {
    let at = |t: f64| cone.distance(p, &cone.point(t, xi).unwrap()).unwrap() - t;
    2.0 * at(2e5) - at(1e5)
}

/// Cone distance by the law of cosines on (radius, angle) pairs.
fn law_distance(l: f64, (r1, a1): (f64, f64), (r2, a2): (f64, f64)) -> f64 {
    let d = (a1 - a2).rem_euclid(l);
    let theta = d.min(l - d).min(PI);
    (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * theta.cos())
        .max(0.0)
        .sqrt()
}

fn cone_net(cone: &FlatCone, cap: f64, eps: f64) -> SampleSet {
    epsilon_net(cone.space(), Some(cap), eps, 0).unwrap()
}

#[test]
fn certification_examples() {
    // Sample suprema carry a 2·mesh correction, so δ needs a net finer than δ/2.
    let cone = FlatCone::new(TAU).unwrap();
    let (p, q) = quarter(TAU);
    for delta in [1e-3, 0.01, 0.3] {
        let net = epsilon_net(&circle(TAU), None, delta / 4.0, 0).unwrap();
        let s = certify_ideal_strainer(cone.space(), &p, &q, &net, delta)
            .unwrap()
            .unwrap();
        assert_eq!(s.m, 2);
        assert!(s.direction_check.as_ref().unwrap().passed);
        let coarse = epsilon_net(&circle(TAU), None, delta, 0).unwrap();
        assert!(certify_ideal_strainer(cone.space(), &p, &q, &coarse, delta)
            .unwrap()
            .is_none());
    }

    let l = TAU + 0.2;
    let cone = FlatCone::new(l).unwrap();
    let base = circle(l);
    let net = epsilon_net(&base, None, 0.005, 0).unwrap();
    let (p, q) = quarter(l);
    let s = certify_ideal_strainer(cone.space(), &p, &q, &net, 0.11)
        .unwrap()
        .unwrap();
    let base_cert = certify_suspender(&base, &net, &p, &q, 0.11)
        .unwrap()
        .unwrap();
    assert_eq!(s.certificate, base_cert);
    let check = s.direction_check.unwrap();
    assert!(check.passed);
    // At the apex the space of directions is the base itself.
    assert!(check.samples[0].point.is_apex());
    assert_eq!(check.samples[0].defect, base_cert.defect);
    assert_eq!(check.samples.len(), 11);

    let coarse = epsilon_net(&base, None, 0.02, 0).unwrap();
    assert!(
        find_ideal_strainer(cone.space(), &coarse, 2, 0.04, 50_000_000)
            .unwrap()
            .is_none()
    );
}

#[test]
fn certification_rejects_bad_inputs() {
    let net = epsilon_net(&circle(5.0), None, 0.1, 0).unwrap();
    let short = SpaceDescriptor::cone(circle(5.0)).unwrap();
    let (p, q) = quarter(5.0);
    assert!(matches!(
        certify_ideal_strainer(&short, &p, &q, &net, 0.1),
        Err(Error::Contract(_))
    ));
    assert!(matches!(
        certify_ideal_strainer(&circle(TAU), &p, &q, &net, 0.1),
        Err(Error::Contract(_))
    ));
}

#[test]
fn evaluation_examples() {
    let (cone, sm) = quarter_map(TAU, PI / 20.0);
    assert_eq!(sm.kind(), MapKind::Strainer);
    let v = sm.evaluate(&cone.point(1.0, FRAC_PI_2).unwrap()).unwrap();
    assert!(close(&v, &[0.0, -1.0], 1e-15), "{v:?}");
    let v = sm.evaluate(&cone.space().apex().unwrap()).unwrap();
    assert_eq!(v, vec![0.0, 0.0]);
    let v = sm.evaluate(&cone.point(2.0, PI).unwrap()).unwrap();
    assert!(close(&v, &[2.0, 0.0], 1e-15), "{v:?}");
}

#[test]
fn coordinates_are_the_busemann_functions() {
    let (cone, sm) = quarter_map(TAU + 0.2, 0.005);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let p = cone
            .point(rng.gen_range(0.0..4.0), rng.gen_range(0.0..cone.length()))
            .unwrap();
        let v = sm.evaluate(&p).unwrap();
        for (i, f) in sm.functions().iter().enumerate() {
            assert_eq!(v[i], f.eval(&p).unwrap());
        }
        let xi0 = sm.xi()[0].0.angle().unwrap();
        let xi1 = sm.xi()[1].0.angle().unwrap();
        assert!((v[0] - raw_busemann(&cone, xi0, &p)).abs() < 1e-6);
        assert!((v[1] - raw_busemann(&cone, xi1, &p)).abs() < 1e-6);
    }
}

#[test]
fn round_cone_map_is_the_planar_identification() {
    let (cone, sm) = quarter_map(TAU, PI / 20.0);
    let net = cone_net(&cone, 3.0, 0.05);
    for p in &net.points {
        let (r, a) = cone.polar(p).unwrap();
        let v = sm.evaluate(p).unwrap();
        assert!(
            close(&[-v[0], -v[1]], &[r * a.cos(), r * a.sin()], 1e-9),
            "{p}"
        );
    }
}

#[test]
fn map_is_homogeneous() {
    let (cone, sm) = quarter_map(TAU + 0.15, 0.01);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let a = rng.gen_range(0.0..cone.length());
        let s = rng.gen_range(0.0..50.0);
        let unit = sm.evaluate(&cone.point(1.0, a).unwrap()).unwrap();
        let scaled = sm.evaluate(&cone.point(s, a).unwrap()).unwrap();
        let expect: Vec<f64> = unit.iter().map(|x| s * x).collect();
        assert_eq!(scaled, expect);
    }
}

#[test]
fn openness_iteration_in_the_plane() {
    let (cone, sm) = quarter_map(TAU, PI / 20.0);
    let apex = cone.space().apex().unwrap();
    let (y, trace) = openness_iteration(&sm, &apex, &[0.3, 0.4], 1e-12, 50).unwrap();
    assert!(trace.steps() <= 2, "{trace:?}");
    assert!(trace.final_residual() <= 1e-12);
    // φ(y) = (0.3, 0.4) puts y at planar position −(0.3, 0.4).
    let (r, a) = cone.polar(&y).unwrap();
    assert!((r - 0.5).abs() < 1e-12);
    assert!(close(&[r * a.cos(), r * a.sin()], &[-0.3, -0.4], 1e-12));
    let d = cone.distance(&apex, &y).unwrap();
    assert!((d - 0.5).abs() < 1e-12 && d <= 0.7);

    let x0 = cone.point(1.3, 2.0).unwrap();
    let (y, trace) = openness_iteration(&sm, &x0, &[0.0, 0.0], 1e-12, 50).unwrap();
    assert_eq!(y, x0);
    assert_eq!(trace.steps(), 0);
    assert_eq!(trace.iterates, vec![x0]);
}

#[test]
fn openness_iteration_on_a_long_cone() {
    let (cone, sm) = quarter_map(TAU + 0.1, 0.001);
    let delta = sm.delta();
    assert!(delta > 0.05 && delta < 0.056, "{delta}");
    let rho = 2.0 * delta;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u0 = [0.1, -0.1];
    let u1 = 0.2;
    for _ in 0..200 {
        let x0 = cone.point(1.0, rng.gen_range(0.0..cone.length())).unwrap();
        let (y, trace) = openness_iteration(&sm, &x0, &u0, 1e-10, 25).unwrap();
        assert!(trace.max_ratio() <= 0.15, "{trace:?}");
        assert!(trace.max_ratio() <= rho + 0.02);
        assert!(trace.final_residual() <= 1e-9);
        assert!(trace.residual_l1.windows(2).skip(1).all(|w| w[1] <= w[0]));
        // Independent check of the landing point from raw distances.
        for (i, xi) in sm.xi().iter().enumerate() {
            let a = xi.0.angle().unwrap();
            let got = raw_busemann(&cone, a, &y) - raw_busemann(&cone, a, &x0);
            assert!((got - u0[i]).abs() < 1e-5);
        }
        let d = cone.distance(&x0, &y).unwrap();
        assert!(d <= u1 / (1.0 - rho) + 1e-10);
        let measured = trace.max_ratio();
        for (k, yk) in trace.iterates.iter().enumerate() {
            let bound = u1 * (1.0 - measured.powi(k as i32)) / (1.0 - measured);
            assert!(cone.distance(&x0, yk).unwrap() <= bound + 1e-12);
        }
    }
}

#[test]
fn openness_iteration_errors() {
    let (cone, sm) = quarter_map(TAU + 0.1, 0.005);
    let x0 = cone.point(1.0, 0.3).unwrap();
    assert!(matches!(
        openness_iteration(&sm, &x0, &[0.1, 0.1], 0.0, 10),
        Err(Error::Contract(_))
    ));
    assert!(matches!(
        openness_iteration(&sm, &x0, &[0.1], 1e-9, 10),
        Err(Error::Contract(_))
    ));
    match openness_iteration(&sm, &x0, &[0.1, -0.1], 1e-12, 1) {
        Err(Error::MaxIterations { max_iter, trace }) => {
            assert_eq!(max_iter, 1);
            assert_eq!(trace.steps(), 1);
        }
        other => panic!("{other:?}"),
    }

    let flat = FlatCone::new(TAU).unwrap();
    let xi = [flat.ideal(0.0), flat.ideal(0.1)];
    let eta = [flat.ideal(PI), flat.ideal(PI + 0.1)];
    let weak = StrainerMap::pseudo(flat.space(), &xi, &eta, 0.5).unwrap();
    let p = flat.point(1.0, 1.0).unwrap();
    assert!(matches!(
        openness_iteration(&weak, &p, &[0.1, 0.1], 1e-9, 10),
        Err(Error::Contract(_))
    ));
    // Opposites perpendicular to their rays: a move toward η_1 leaves the
    // first coordinate alone and disturbs the second.
    let bogus = StrainerMap::pseudo(
        flat.space(),
        &[flat.ideal(0.0), flat.ideal(FRAC_PI_2)],
        &[flat.ideal(FRAC_PI_2), flat.ideal(PI)],
        0.4,
    )
    .unwrap();
    match openness_iteration(&bogus, &p, &[0.1, 0.0], 1e-9, 10) {
        Err(Error::Divergence { step, ratio, trace }) => {
            assert_eq!(step, 1);
            assert!(ratio >= 1.0);
            assert_eq!(trace.ratio.len(), 1);
        }
        other => panic!("{other:?}"),
    }
    let parallel = StrainerMap::pseudo(flat.space(), &xi, &eta, 0.4).unwrap();
    assert!(parallel.pseudo_defect(&cone_net(&flat, 2.0, 0.2)).unwrap() > 0.7);
}

#[test]
fn trace_rows_follow_the_csv_layout() {
    let (cone, sm) = quarter_map(TAU + 0.1, 0.005);
    let x0 = cone.point(1.0, 0.3).unwrap();
    let (_, trace) = openness_iteration(&sm, &x0, &[0.1, -0.1], 1e-10, 25).unwrap();
    let rows = trace.rows();
    assert_eq!(rows.len(), trace.steps() + 1);
    assert_eq!(rows[0].k, 0);
    assert_eq!(rows[0].step_distance, None);
    assert_eq!(rows[0].ratio, None);
    assert!((rows[0].residual_l1 - 0.2).abs() < 1e-15);
    for (k, row) in rows.iter().enumerate().skip(1) {
        assert_eq!(row.k, k);
        assert_eq!(row.step_distance, Some(trace.step_distance[k - 1]));
        assert_eq!(
            row.ratio,
            Some(trace.residual_l1[k] / trace.residual_l1[k - 1])
        );
    }
    assert!(
        trace.path_length() >= cone.distance(&x0, trace.iterates.last().unwrap()).unwrap() - 1e-15
    );
}

/// Exhaustive ratio scan from closed forms, independent of the library's
/// pair machinery.
fn brute_lip(l: f64, xi: &[f64], pts: &[(f64, f64)]) -> f64 {
    let phi = |(r, a): (f64, f64)| -> Vec<f64> {
        xi.iter()
            .map(|&x| {
                let d = (a - x).rem_euclid(l);
                -r * d.min(l - d).min(PI).cos()
            })
            .collect()
    };
    let img: Vec<Vec<f64>> = pts.iter().map(|&p| phi(p)).collect();
    let mut best: f64 = 0.0;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d = law_distance(l, pts[i], pts[j]);
            if d > 0.0 {
                let n = img[i]
                    .iter()
                    .zip(&img[j])
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>();
                best = best.max(n.sqrt() / d);
            }
        }
    }
    best
}

#[test]
fn regularity_constants_in_the_plane() {
    let (cone, sm) = quarter_map(TAU, PI / 20.0);
    let net = cone_net(&cone, 2.0, 0.1);
    let r = lipschitz_and_open_constants(&sm, &net, 500, DEFAULT_PAIR_BUDGET, 1).unwrap();
    assert!(r.lip_exhaustive);
    assert!((r.lip - 1.0).abs() < 1e-9, "{r:?}");
    assert!((r.open_c - 1.0).abs() < 1e-9, "{r:?}");
    assert_eq!(r.probes, 500);
}

#[test]
fn regularity_constants_on_a_long_cone() {
    let l = TAU + 0.2;
    let cone = FlatCone::new(l).unwrap();
    let base_net = epsilon_net(&circle(l), None, 0.005, 0).unwrap();
    let (p, q) = quarter(l);
    let s = certify_ideal_strainer(cone.space(), &p, &q, &base_net, 0.11)
        .unwrap()
        .unwrap();
    let sm = StrainerMap::new(cone.space(), &s).unwrap();
    let net = cone_net(&cone, 2.0, 0.05);
    let r = lipschitz_and_open_constants(&sm, &net, 10_000, DEFAULT_PAIR_BUDGET, 2).unwrap();
    assert!(r.lip <= 1.25, "{r:?}");
    assert!(r.open_c <= 1.35, "{r:?}");
    assert!(r.lip <= r.open_bound * 2f64.sqrt());
    assert!(r.max_contraction <= 2.0 * 0.11 + 0.02);

    let pts: Vec<(f64, f64)> = net.points.iter().map(|p| cone.polar(p).unwrap()).collect();
    if r.lip_exhaustive {
        assert!((r.lip - brute_lip(l, &[0.0, l / 4.0], &pts)).abs() < 1e-9);
    }
}

#[test]
fn lipschitz_constant_grows_with_the_excess() {
    let lip = |t: f64| {
        let (cone, sm) = quarter_map(TAU + t, 0.005);
        let net = cone_net(&cone, 2.0, 0.08);
        let r = lipschitz_and_open_constants(&sm, &net, 10, DEFAULT_PAIR_BUDGET, 0).unwrap();
        assert!(r.lip_exhaustive);
        let pts: Vec<(f64, f64)> = net.points.iter().map(|p| cone.polar(p).unwrap()).collect();
        let l = cone.length();
        assert!((r.lip - brute_lip(l, &[0.0, l / 4.0], &pts)).abs() < 1e-9);
        r.lip
    };
    assert!(lip(0.05) < lip(0.2));
}

#[test]
fn first_variation_in_the_plane() {
    let (cone, sm) = quarter_map(TAU, PI / 20.0);
    let net = cone_net(&cone, 3.0, 0.1);
    let geos = random_geodesics(cone.space(), &net, 300, 5).unwrap();
    let suite = first_variation_inequalities_check(&sm, &geos, 16).unwrap();
    assert!(suite.passed());
    assert_eq!(suite.geodesics, 300);
    assert!(suite.max_coordinate_residual < 1e-9, "{suite:?}");
    assert!(suite.max_norm_residual < 1e-9);
    assert!(suite.max_variation < 1e-9);
}

#[test]
fn first_variation_on_a_long_cone() {
    let l = TAU + 0.1;
    let cone = FlatCone::new(l).unwrap();
    let base_net = epsilon_net(&circle(l), None, 0.005, 0).unwrap();
    let (p, q) = quarter(l);
    let s = certify_ideal_strainer(cone.space(), &p, &q, &base_net, 0.06)
        .unwrap()
        .unwrap();
    let sm = StrainerMap::new(cone.space(), &s).unwrap();
    let net = cone_net(&cone, 3.0, 0.1);
    let geos = random_geodesics(cone.space(), &net, 500, 9).unwrap();
    let suite = first_variation_inequalities_check(&sm, &geos, 16).unwrap();
    assert!(suite.passed(), "{suite:?}");
    assert!(suite.max_coordinate_residual <= 0.12);
    assert!(suite.max_coordinate_residual > 0.0);
    // A strainer map of full order is locally injective.
    assert!(equal_endpoint_geodesics(&sm, &net, 50, 1)
        .unwrap()
        .is_empty());
}

/// Largest |chord slope − right derivative| along one geodesic, with the
/// derivative taken by a one-sided difference quotient on the actual path.
fn fd_residual(
    cone: &FlatCone,
    sm: &StrainerMap,
    x: &ModelPoint,
    y: &ModelPoint,
    steps: usize,
) -> f64 {
    let path = cone.geodesic(x, y).unwrap();
    let at = |s: f64| sm.evaluate(&path.point_at(cone, s).unwrap()).unwrap();
    let len = path.length;
    let end = sm.evaluate(y).unwrap();
    let h = 1e-7;
    let mut worst: f64 = 0.0;
    for k in 0..steps {
        let s = len * k as f64 / steps as f64;
        let (here, ahead) = (at(s), at(s + h));
        for i in 0..sm.m() {
            let slope = (end[i] - here[i]) / (len - s);
            worst = worst.max((slope - (ahead[i] - here[i]) / h).abs());
        }
    }
    worst
}

#[test]
fn first_variation_through_the_apex() {
    let l = TAU + 0.1;
    let (cone, sm) = quarter_map(l, 0.005);
    // Angular gap above π: the geodesic runs through the apex.
    let x = cone.point(1.0, 0.2).unwrap();
    let y = cone.point(1.5, 0.2 + PI + 0.05).unwrap();
    let path = cone.geodesic(&x, &y).unwrap();
    assert!(path.through_apex);
    let suite = first_variation_inequalities_check(&sm, &[(x.clone(), y.clone())], 20).unwrap();
    assert!(suite.passed(), "{suite:?}");
    assert_eq!(suite.geodesics, 1);
    let oracle = fd_residual(&cone, &sm, &x, &y, 20);
    assert!(
        (suite.max_coordinate_residual - oracle).abs() < 1e-5,
        "{suite:?} {oracle}"
    );
}

#[test]
fn first_variation_with_equal_endpoints() {
    // One coordinate of a suspension cone: the map collapses whole level
    // sets, so geodesics with equal images exist.
    let base = SpaceDescriptor::suspension(circle(TAU + 0.1)).unwrap();
    let cone = SpaceDescriptor::cone(base.clone()).unwrap();
    let north = base.polar_point(0.0, ModelPoint::Angle(0.0)).unwrap();
    let south = base.polar_point(PI, ModelPoint::Angle(0.0)).unwrap();
    let sm = StrainerMap::pseudo(&cone, &[IdealPoint(north)], &[IdealPoint(south)], 0.05).unwrap();
    let net = epsilon_net(&cone, Some(2.0), 0.2, 0).unwrap();
    let geos = equal_endpoint_geodesics(&sm, &net, 40, 4).unwrap();
    assert!(!geos.is_empty());
    let suite = first_variation_inequalities_check(&sm, &geos, 8).unwrap();
    assert_eq!(suite.equal_endpoint_geodesics, geos.len());
    assert!(suite.passed(), "{suite:?}");
    assert!(suite.max_equal_endpoint_derivative <= suite.equal_endpoint_bound);
}

#[test]
fn ray_angle_sums_stay_near_pi() {
    let (cone, sm) = quarter_map(TAU + 0.1, 0.005);
    let delta = sm.delta();
    let mesh = 0.005;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..2000 {
        let x = cone
            .point(rng.gen_range(0.1..3.0), rng.gen_range(0.0..cone.length()))
            .unwrap();
        let y = cone
            .point(rng.gen_range(0.1..3.0), rng.gen_range(0.0..cone.length()))
            .unwrap();
        if cone.distance(&x, &y).unwrap() < 1e-6 {
            continue;
        }
        for xi in sm.xi() {
            let sum = cone
                .angle_at(&x, Target::Ideal(xi), Target::Point(&y))
                .unwrap()
                + cone
                    .angle_at(&y, Target::Ideal(xi), Target::Point(&x))
                    .unwrap();
            assert!(sum <= PI + 1e-9, "{sum}");
            assert!(sum >= PI - 2.0 * delta - mesh, "{sum}");
        }
    }
}

#[test]
fn bilipschitz_in_the_plane() {
    let (cone, sm) = quarter_map(TAU, PI / 20.0);
    let net = cone_net(&cone, 2.0, 0.05);
    let r = bilipschitz_verify(&sm, &net, DEFAULT_PAIR_BUDGET, 0).unwrap();
    assert!(
        (r.upper - 1.0).abs() < 1e-9 && (r.lower - 1.0).abs() < 1e-9,
        "{r:?}"
    );
    assert_eq!(r.injectivity_violations, 0);
}

#[test]
fn bilipschitz_on_a_long_cone() {
    let l = TAU + 0.2;
    let cone = FlatCone::new(l).unwrap();
    let base_net = epsilon_net(&circle(l), None, 0.005, 0).unwrap();
    let (p, q) = quarter(l);
    let s = certify_ideal_strainer(cone.space(), &p, &q, &base_net, 0.11)
        .unwrap()
        .unwrap();
    let sm = StrainerMap::new(cone.space(), &s).unwrap();
    let net = cone_net(&cone, 3.0, 0.02);
    let r = bilipschitz_verify(&sm, &net, DEFAULT_PAIR_BUDGET, 0).unwrap();
    assert_eq!(r.injectivity_violations, 0);
    assert!(r.lower >= 0.8 && r.upper <= 1.25, "{r:?}");
    assert!(r.floor_pairs > 0);
}

#[test]
fn bilipschitz_interval_shrinks_as_the_cone_flattens() {
    let interval = |t: f64| {
        let (cone, sm) = quarter_map(TAU + t, 0.005);
        let net = cone_net(&cone, 2.0, 0.04);
        let r = bilipschitz_verify(&sm, &net, DEFAULT_PAIR_BUDGET, 0).unwrap();
        assert_eq!(r.injectivity_violations, 0);
        (r.lower, r.upper)
    };
    let sweep: Vec<(f64, f64)> = [0.2, 0.1, 0.05].into_iter().map(interval).collect();
    for w in sweep.windows(2) {
        assert!(w[1].0 >= w[0].0 && w[1].1 <= w[0].1, "{sweep:?}");
    }
    let (lo, hi) = interval(0.001);
    assert!(lo >= 0.99 && hi <= 1.01, "{lo} {hi}");
}

/// Exhaustive distortion of the normalized sphere map on a circle.
fn brute_sphere(l: f64, xi: &[f64], zs: &[f64]) -> (f64, f64) {
    let circ = |a: f64, b: f64| {
        let d = (a - b).rem_euclid(l);
        d.min(l - d)
    };
    let unit: Vec<Vec<f64>> = zs
        .iter()
        .map(|&z| {
            let v: Vec<f64> = xi.iter().map(|&x| -circ(x, z).min(PI).cos()).collect();
            let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            v.iter().map(|c| c / n).collect()
        })
        .collect();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..zs.len() {
        for j in (i + 1)..zs.len() {
            let dot: f64 = unit[i].iter().zip(&unit[j]).map(|(a, b)| a * b).sum();
            let r = dot.clamp(-1.0, 1.0).acos() / circ(zs[i], zs[j]).min(PI);
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    (lo, hi)
}

#[test]
fn sphere_map_on_the_round_circle() {
    let base = circle(TAU);
    let net = epsilon_net(&base, None, PI / 40.0, 0).unwrap();
    let r = sphere_map_distortion(
        &base,
        &angles(&[0.0, FRAC_PI_2]),
        &net,
        DEFAULT_PAIR_BUDGET,
        0,
    )
    .unwrap();
    assert!(
        (r.lower - 1.0).abs() < 1e-9 && (r.upper - 1.0).abs() < 1e-9,
        "{r:?}"
    );
}

#[test]
fn sphere_map_on_a_long_circle() {
    let l = TAU + 0.2;
    let base = circle(l);
    let net = epsilon_net(&base, None, 0.005, 0).unwrap();
    let (p, _) = quarter(l);
    let r = sphere_map_distortion(&base, &p, &net, DEFAULT_PAIR_BUDGET, 0).unwrap();
    assert!(r.exhaustive);
    let zs: Vec<f64> = net.points.iter().map(|z| z.angle().unwrap()).collect();
    let (lo, hi) = brute_sphere(l, &[0.0, l / 4.0], &zs);
    assert!(
        (r.lower - lo).abs() < 1e-9 && (r.upper - hi).abs() < 1e-9,
        "{r:?} {lo} {hi}"
    );
    assert!(r.upper <= 1.2, "{r:?}");
    assert!(r.lower >= 0.85, "{r:?}");
    assert!(r.min_norm > 0.5);
}

#[test]
fn sphere_map_on_a_suspension() {
    let l = TAU + 0.1;
    let base = SpaceDescriptor::suspension(circle(l)).unwrap();
    let net = epsilon_net(&base, None, 0.05, 0).unwrap();
    let north = base.polar_point(0.0, ModelPoint::Angle(0.0)).unwrap();
    let eq = |a: f64| base.polar_point(FRAC_PI_2, ModelPoint::Angle(a)).unwrap();
    let xi = [north, eq(0.0), eq(l / 4.0)];
    let r = sphere_map_distortion(&base, &xi, &net, DEFAULT_PAIR_BUDGET, 0).unwrap();
    assert!(r.lower >= 0.8 && r.upper <= 1.25, "{r:?}");
}

#[test]
fn sphere_map_rejects_weak_tuples() {
    let base = circle(TAU);
    let net = epsilon_net(&base, None, PI / 40.0, 0).unwrap();
    assert!(matches!(
        sphere_map_distortion(&base, &angles(&[0.0]), &net, DEFAULT_PAIR_BUDGET, 0),
        Err(Error::Contract(_))
    ));
    // Both coordinates vanish at a point a quarter turn from each anchor.
    assert!(matches!(
        sphere_map_distortion(&base, &angles(&[0.0, PI]), &net, DEFAULT_PAIR_BUDGET, 0),
        Err(Error::Normalization { .. })
    ));
}
