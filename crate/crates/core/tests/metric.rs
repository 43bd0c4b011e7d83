use std::f64::consts::{FRAC_PI_2, PI, TAU};

use catasym_core::metric::{
    diameter_bounds, distance, epsilon_net, epsilon_net_with_cap, rescale, truncated_distance,
    Edge, ModelPoint, SpaceDescriptor,
};
use catasym_core::Error;
use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn circle(l: f64) -> SpaceDescriptor {
    SpaceDescriptor::circle(l).unwrap()
}

fn d(space: &SpaceDescriptor, p: &ModelPoint, q: &ModelPoint) -> f64 {
    distance(space, p, q).unwrap()
}

#[test]
fn cone_distance_examples() {
    let cone = SpaceDescriptor::cone(circle(TAU)).unwrap();
    let p = cone.cone_point(1.0, ModelPoint::Angle(0.0)).unwrap();
    let q = cone.cone_point(1.0, ModelPoint::Angle(FRAC_PI_2)).unwrap();
    assert!((d(&cone, &p, &q) - 2f64.sqrt()).abs() < 1e-12);

    let a = cone.cone_point(2.0, ModelPoint::Angle(1.3)).unwrap();
    let b = cone.cone_point(3.0, ModelPoint::Angle(1.3)).unwrap();
    assert!((d(&cone, &a, &b) - 1.0).abs() < 1e-12);
}

#[test]
fn circle_half_circumference() {
    let c = circle(TAU + 0.2);
    let got = d(&c, &ModelPoint::Angle(0.0), &ModelPoint::Angle(PI + 0.1));
    assert!((got - (PI + 0.1)).abs() < 1e-12);
}

#[test]
fn truncation_examples() {
    let c = circle(4.0 * PI);
    let t = truncated_distance(&c, &ModelPoint::Angle(0.0), &ModelPoint::Angle(1.5 * PI)).unwrap();
    assert_eq!(t, PI);
    let c = circle(TAU);
    let t = truncated_distance(&c, &ModelPoint::Angle(0.0), &ModelPoint::Angle(FRAC_PI_2)).unwrap();
    assert!((t - FRAC_PI_2).abs() < 1e-15);

    let theta = SpaceDescriptor::theta(PI, PI, PI).unwrap();
    let u = theta.vertex(0).unwrap();
    let v = theta.vertex(1).unwrap();
    assert!((truncated_distance(&theta, &u, &v).unwrap() - PI).abs() < 1e-12);
}

#[test]
fn mismatched_points_are_contract_errors() {
    let c = circle(TAU);
    let s = SpaceDescriptor::round_sphere(2).unwrap();
    let p = s.coords(vec![0.0, 0.0, 1.0]).unwrap();
    assert!(matches!(
        distance(&c, &ModelPoint::Angle(0.0), &p),
        Err(Error::Contract(_))
    ));
}

#[test]
fn apex_and_poles_are_normalized() {
    let cone = SpaceDescriptor::cone(circle(TAU)).unwrap();
    let a = cone.cone_point(0.0, ModelPoint::Angle(1.0)).unwrap();
    let b = cone.cone_point(0.0, ModelPoint::Angle(4.0)).unwrap();
    assert_eq!(a, b);
    assert!(a.is_apex());

    let susp = SpaceDescriptor::suspension(circle(TAU)).unwrap();
    let n1 = susp.polar_point(0.0, ModelPoint::Angle(1.0)).unwrap();
    let n2 = susp.polar_point(0.0, ModelPoint::Angle(2.0)).unwrap();
    assert_eq!(n1, n2);
    let s1 = susp.polar_point(PI, ModelPoint::Angle(1.0)).unwrap();
    let s2 = susp.polar_point(PI, ModelPoint::Angle(5.0)).unwrap();
    assert_eq!(s1, s2);
}

#[test]
fn descriptor_invariants_are_enforced() {
    assert!(SpaceDescriptor::circle(0.0).is_err());
    assert!(SpaceDescriptor::graph(
        2,
        vec![Edge {
            a: 0,
            b: 1,
            length: -1.0
        }]
    )
    .is_err());
    // Disconnected: vertex 2 is isolated.
    assert!(SpaceDescriptor::graph(
        3,
        vec![Edge {
            a: 0,
            b: 1,
            length: 1.0
        }]
    )
    .is_err());
    let deep = SpaceDescriptor::cone(SpaceDescriptor::suspension(circle(TAU)).unwrap()).unwrap();
    assert!(SpaceDescriptor::suspension(deep.clone()).is_err());
    assert!(SpaceDescriptor::suspension(
        SpaceDescriptor::suspension(SpaceDescriptor::suspension(circle(TAU)).unwrap()).unwrap()
    )
    .is_err());
}

#[test]
fn suspension_of_round_circle_is_the_two_sphere() {
    let susp = SpaceDescriptor::suspension(circle(TAU)).unwrap();
    let sphere = SpaceDescriptor::round_sphere(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let embed = |s: f64, a: f64| vec![s.sin() * a.cos(), s.sin() * a.sin(), s.cos()];
    for _ in 0..10_000 {
        let (s1, a1) = (rng.gen_range(0.0..PI), rng.gen_range(0.0..TAU));
        let (s2, a2) = (rng.gen_range(0.0..PI), rng.gen_range(0.0..TAU));
        let p = susp.polar_point(s1, ModelPoint::Angle(a1)).unwrap();
        let q = susp.polar_point(s2, ModelPoint::Angle(a2)).unwrap();
        let x = sphere.coords(embed(s1, a1)).unwrap();
        let y = sphere.coords(embed(s2, a2)).unwrap();
        assert!((d(&susp, &p, &q) - d(&sphere, &x, &y)).abs() < 1e-12);
    }
}

#[test]
fn cone_over_suspension_matches_product() {
    let base = circle(TAU + 0.3);
    let susp = SpaceDescriptor::suspension(base.clone()).unwrap();
    let cone = SpaceDescriptor::cone(susp.clone()).unwrap();
    let flat = SpaceDescriptor::cone(base).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10_000 {
        let pts: Vec<(f64, f64, f64)> = (0..2)
            .map(|_| {
                (
                    rng.gen_range(0.0..3.0),
                    rng.gen_range(0.0..PI),
                    rng.gen_range(0.0..TAU + 0.3),
                )
            })
            .collect();
        let lift = |&(t, s, a): &(f64, f64, f64)| {
            cone.cone_point(t, susp.polar_point(s, ModelPoint::Angle(a)).unwrap())
                .unwrap()
        };
        let split = |&(t, s, a): &(f64, f64, f64)| {
            (
                t * s.cos(),
                flat.cone_point(t * s.sin(), ModelPoint::Angle(a)).unwrap(),
            )
        };
        let (h1, w1) = split(&pts[0]);
        let (h2, w2) = split(&pts[1]);
        let product = (h1 - h2).hypot(d(&flat, &w1, &w2));
        let direct = d(&cone, &lift(&pts[0]), &lift(&pts[1]));
        assert!(
            (direct - product).abs() < 1e-12 * (1.0 + product),
            "{direct} vs {product}"
        );
    }
}

#[test]
fn cone_distance_through_apex_when_base_angle_is_pi() {
    let cone = SpaceDescriptor::cone(circle(TAU + 0.5)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..1000 {
        let (t1, t2) = (rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0));
        let a = rng.gen_range(0.0..TAU);
        let p = cone.cone_point(t1, ModelPoint::Angle(a)).unwrap();
        let q = cone.cone_point(t2, ModelPoint::Angle(a + PI)).unwrap();
        assert!((d(&cone, &p, &q) - (t1 + t2)).abs() < 1e-12);
    }
}

/// Distance between two points on edges computed by Dijkstra on the graph
/// subdivided at both points.
fn subdivided_oracle(
    edges: &[(usize, usize, f64)],
    n: usize,
    p: (usize, f64),
    q: (usize, f64),
) -> f64 {
    let mut g = UnGraph::<(), f64>::new_undirected();
    let nodes: Vec<NodeIndex> = (0..n).map(|_| g.add_node(())).collect();
    let mut split: Vec<Vec<(f64, NodeIndex)>> = vec![Vec::new(); edges.len()];
    let pn = g.add_node(());
    let qn = g.add_node(());
    split[p.0].push((p.1, pn));
    split[q.0].push((q.1, qn));
    for (k, &(a, b, len)) in edges.iter().enumerate() {
        let mut stops = vec![(0.0, nodes[a])];
        let mut inner = split[k].clone();
        inner.sort_by(|x, y| x.0.total_cmp(&y.0));
        stops.extend(inner);
        stops.push((len, nodes[b]));
        for w in stops.windows(2) {
            g.add_edge(w[0].1, w[1].1, w[1].0 - w[0].0);
        }
    }
    dijkstra(&g, pn, Some(qn), |e| *e.weight())[&qn]
}

fn random_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
    (2usize..6).prop_flat_map(|n| {
        let tree = proptest::collection::vec((0usize..1000, 0.3f64..4.0), n - 1);
        let extra = proptest::collection::vec((0usize..n, 0usize..n, 0.3f64..4.0), 0..5);
        (Just(n), tree, extra).prop_map(|(n, tree, extra)| {
            let mut edges: Vec<(usize, usize, f64)> = tree
                .into_iter()
                .enumerate()
                .map(|(k, (r, len))| (r % (k + 1), k + 1, len))
                .collect();
            edges.extend(extra);
            (n, edges)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn graph_distances_match_subdivided_dijkstra(
        (n, edges) in random_graph(),
        picks in proptest::collection::vec((0usize..1000, 0.0f64..1.0), 2),
    ) {
        let space = SpaceDescriptor::graph(
            n,
            edges.iter().map(|&(a, b, length)| Edge { a, b, length }).collect(),
        ).unwrap();
        let at = |(e, f): (usize, f64)| {
            let e = e % edges.len();
            (e, f * edges[e].2)
        };
        let (p, q) = (at(picks[0]), at(picks[1]));
        let pp = space.edge_point(p.0, p.1).unwrap();
        let qq = space.edge_point(q.0, q.1).unwrap();
        let oracle = subdivided_oracle(&edges, n, p, q);
        prop_assert!((d(&space, &pp, &qq) - oracle).abs() < 1e-9);
    }

    #[test]
    fn triangle_inequality_on_circles(l in 6.3f64..15.0, a in 0.0f64..15.0, b in 0.0f64..15.0, c in 0.0f64..15.0) {
        let s = circle(l);
        let (x, y, z) = (s.angle(a).unwrap(), s.angle(b).unwrap(), s.angle(c).unwrap());
        let (xy, yz, xz) = (d(&s, &x, &y), d(&s, &y, &z), d(&s, &x, &z));
        prop_assert!(xz <= (xy + yz) * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn triangle_inequality_on_cones_over_suspensions(
        l in 6.3f64..9.0,
        pts in proptest::collection::vec((0.0f64..4.0, 0.0f64..PI, 0.0f64..9.0), 3),
    ) {
        let susp = SpaceDescriptor::suspension(circle(l)).unwrap();
        let cone = SpaceDescriptor::cone(susp.clone()).unwrap();
        let p: Vec<ModelPoint> = pts
            .iter()
            .map(|&(t, s, a)| cone.cone_point(t, susp.polar_point(s, ModelPoint::Angle(a % l)).unwrap()).unwrap())
            .collect();
        let (xy, yz, xz) = (d(&cone, &p[0], &p[1]), d(&cone, &p[1], &p[2]), d(&cone, &p[0], &p[2]));
        prop_assert!(xz <= (xy + yz) * (1.0 + 1e-12) + 1e-15);
        prop_assert!((xy - d(&cone, &p[1], &p[0])).abs() == 0.0);
        prop_assert!(d(&cone, &p[0], &p[0]) == 0.0);
    }

    #[test]
    fn descriptor_text_round_trips(l in 6.3f64..20.0, n in 1usize..4) {
        for s in [
            circle(l),
            SpaceDescriptor::suspension(circle(l)).unwrap(),
            SpaceDescriptor::cone(SpaceDescriptor::suspension(circle(l)).unwrap()).unwrap(),
            SpaceDescriptor::round_sphere(n).unwrap(),
            SpaceDescriptor::theta(l / 3.0, l / 2.0, l).unwrap(),
        ] {
            let back: SpaceDescriptor = s.to_string().parse().unwrap();
            prop_assert_eq!(back, s);
        }
    }
}

#[test]
fn triangle_inequality_on_theta_graph_samples() {
    let theta = SpaceDescriptor::theta(PI, 2.0, 4.5).unwrap();
    let net = epsilon_net(&theta, None, 0.2, 0).unwrap();
    let n = net.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (x, y, z) = (&net.points[i], &net.points[j], &net.points[k]);
                assert!(d(&theta, x, z) <= d(&theta, x, y) + d(&theta, y, z) + 1e-12);
            }
        }
    }
}

#[test]
fn circle_nets() {
    let c = circle(TAU);
    let quarter = epsilon_net(&c, None, FRAC_PI_2, 0).unwrap();
    assert!(quarter.len() <= 4);
    assert!(quarter.mesh <= FRAC_PI_2);

    let fine = epsilon_net(&c, None, 0.01, 0).unwrap();
    assert_eq!(fine.len(), (TAU / 0.02).ceil() as usize);
    assert!(fine.mesh <= 0.01);
    // Exhaustive check: the largest gap between consecutive angles is 2·mesh.
    let mut angles: Vec<f64> = fine.points.iter().map(|p| p.angle().unwrap()).collect();
    angles.sort_by(f64::total_cmp);
    let mut gap = TAU - angles.last().unwrap() + angles[0];
    for w in angles.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    assert!(gap / 2.0 <= fine.mesh + 1e-12);
}

fn nearest(space: &SpaceDescriptor, points: &[ModelPoint], p: &ModelPoint) -> f64 {
    points
        .iter()
        .map(|q| d(space, p, q))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn cone_net_covers_the_capped_ball() {
    let cone = SpaceDescriptor::cone(circle(TAU)).unwrap();
    let net = epsilon_net(&cone, Some(2.0), 0.1, 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..10_000 {
        // Uniform in the disc of radius 2.
        let r = 2.0 * rng.gen::<f64>().sqrt();
        let p = cone
            .cone_point(r, ModelPoint::Angle(rng.gen_range(0.0..TAU)))
            .unwrap();
        assert!(nearest(&cone, &net.points, &p) <= 0.1);
    }
}

#[test]
fn composite_nets_cover_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let susp = SpaceDescriptor::suspension(circle(TAU + 0.4)).unwrap();
    let net = epsilon_net(&susp, None, 0.1, 0).unwrap();
    for _ in 0..2000 {
        let p = susp
            .polar_point(
                rng.gen_range(0.0..PI),
                ModelPoint::Angle(rng.gen_range(0.0..TAU + 0.4)),
            )
            .unwrap();
        assert!(nearest(&susp, &net.points, &p) <= net.mesh);
    }

    let sphere = SpaceDescriptor::round_sphere(2).unwrap();
    let net = epsilon_net(&sphere, None, 0.1, 0).unwrap();
    assert!(net.mesh <= 0.1);
    for _ in 0..2000 {
        let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p = sphere.coords(v).unwrap();
        assert!(nearest(&sphere, &net.points, &p) <= net.mesh);
    }

    let theta = SpaceDescriptor::theta(PI, PI, PI).unwrap();
    let net = epsilon_net(&theta, None, 0.05, 0).unwrap();
    for _ in 0..2000 {
        let e = rng.gen_range(0..3);
        let p = theta.edge_point(e, rng.gen_range(0.0..PI)).unwrap();
        assert!(nearest(&theta, &net.points, &p) <= net.mesh);
    }

    let cone = SpaceDescriptor::cone(SpaceDescriptor::suspension(circle(TAU)).unwrap()).unwrap();
    let net = epsilon_net(&cone, Some(1.0), 0.15, 0).unwrap();
    let base = cone.base().unwrap();
    for _ in 0..1000 {
        let z = base
            .polar_point(
                rng.gen_range(0.0..PI),
                ModelPoint::Angle(rng.gen_range(0.0..TAU)),
            )
            .unwrap();
        let p = cone.cone_point(rng.gen_range(0.0..1.0), z).unwrap();
        assert!(nearest(&cone, &net.points, &p) <= net.mesh);
    }
}

#[test]
fn nets_are_deterministic_and_reject_bad_input() {
    let c = circle(TAU + 0.2);
    assert_eq!(
        epsilon_net(&c, None, 0.03, 5).unwrap(),
        epsilon_net(&c, None, 0.03, 5).unwrap()
    );
    assert!(matches!(
        epsilon_net(&c, None, 0.0, 0),
        Err(Error::Contract(_))
    ));
    assert!(matches!(
        epsilon_net(&c, None, -1.0, 0),
        Err(Error::Contract(_))
    ));
    let cone = SpaceDescriptor::cone(c.clone()).unwrap();
    assert!(epsilon_net(&cone, None, 0.1, 0).is_err());
    assert!(matches!(
        epsilon_net_with_cap(&c, None, 1e-4, 0, 1000),
        Err(Error::SizeLimit { .. })
    ));
}

#[test]
fn rescaling() {
    let c = circle(TAU);
    assert_eq!(rescale(&c, 1.0).unwrap(), c);
    let big = rescale(&c, 1.1).unwrap();
    assert!((big.circle_length().unwrap() - 2.2 * PI).abs() < 1e-12);
    let anti = d(&big, &ModelPoint::Angle(0.0), &ModelPoint::Angle(1.1 * PI));
    assert!((anti - 1.1 * PI).abs() < 1e-12);

    let theta = SpaceDescriptor::theta(1.0, 2.0, 2.5).unwrap();
    let doubled = rescale(&theta, 2.0).unwrap();
    let SpaceDescriptor::MetricGraph(g) = &doubled else {
        panic!("rescaled graph")
    };
    let lengths: Vec<f64> = g.edges().iter().map(|e| e.length).collect();
    assert_eq!(lengths, vec![2.0, 4.0, 5.0]);
    let dt = diameter_bounds(&theta, &epsilon_net(&theta, None, 0.01, 0).unwrap()).unwrap();
    let dd = diameter_bounds(&doubled, &epsilon_net(&doubled, None, 0.02, 0).unwrap()).unwrap();
    // The theta diameter is 2.25 (midpoint of the longest edge to the other edges' ends).
    assert!(dt.0 <= 2.25 + 1e-12 && 2.25 <= dt.1);
    assert!(dd.0 <= 4.5 + 1e-12 && 4.5 <= dd.1);

    for bad in [
        SpaceDescriptor::suspension(c.clone()).unwrap(),
        SpaceDescriptor::cone(c.clone()).unwrap(),
    ] {
        assert!(matches!(rescale(&bad, 2.0), Err(Error::Contract(_))));
    }
    assert!(rescale(&c, 0.0).is_err());
}

#[test]
fn diameter_examples() {
    let c = circle(TAU);
    let coarse = diameter_bounds(&c, &epsilon_net(&c, None, 0.1, 0).unwrap()).unwrap();
    let fine = diameter_bounds(&c, &epsilon_net(&c, None, 0.001, 0).unwrap()).unwrap();
    assert!(coarse.0 <= PI + 1e-12 && PI <= coarse.1);
    assert!((fine.0 - PI).abs() <= 0.002);

    let c = circle(TAU + 0.2);
    let net = epsilon_net(&c, None, 0.01, 0).unwrap();
    let (lo, hi) = diameter_bounds(&c, &net).unwrap();
    assert!((PI + 0.08..=PI + 0.1 + 1e-12).contains(&lo), "{lo}");
    assert!(hi <= PI + 0.12);

    let s = SpaceDescriptor::round_sphere(2).unwrap();
    let (lo, hi) = diameter_bounds(&s, &epsilon_net(&s, None, 0.3, 0).unwrap()).unwrap();
    assert!(lo <= PI + 1e-12 && PI <= hi);

    let cone = SpaceDescriptor::cone(c).unwrap();
    let net = epsilon_net(&cone, Some(1.0), 0.2, 0).unwrap();
    assert!(matches!(
        diameter_bounds(&cone, &net),
        Err(Error::Contract(_))
    ));
}
