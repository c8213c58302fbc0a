//! Property tests for the library invariants.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use seppack::bounds::{
    ball_isoperimetric_ratio, csep_simplified_bound, csep_upper_bound, isoperimetric_ratio,
    lambda_sep_estimate, planar_bound,
};
use seppack::constructors::{axis_basis, grid_packing_2d};
use seppack::linearization::{
    check_condition, check_face_property, check_interior_bound, origin_in_interior, realize_lin,
    reduce_dimension, slab_body, steinitz_core, Condition, PairSystem,
};
use seppack::packing::{check_packing, contact_graph, contact_statistics, Packing};
use seppack::sampling::{random_unit_vector, stream_rng};
use seppack::search::{hadwiger_config_search_with, SearchOptions};
use seppack::separability::{
    certify_totally_separable, check_rho_separable, verify_hyperplane, CertificateStatus,
};
use seppack::{ConvexBody, LinearFunctional, Vector};

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn random_map(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(d, d, |r, c| {
            0.4 * gauss(rng) + if r == c { 1.0 } else { 0.0 }
        });
        if m.determinant().abs() > 0.1 {
            return m;
        }
    }
}

fn apply(m: &DMatrix<f64>, v: &[f64]) -> Vector {
    let d = v.len();
    Vector(
        (0..d)
            .map(|r| (0..d).map(|c| m[(r, c)] * v[c]).sum())
            .collect(),
    )
}

/// One of the o-symmetric body families, chosen by `kind`.
fn symmetric_body(kind: u8, d: usize, rng: &mut ChaCha8Rng) -> ConvexBody {
    match kind % 5 {
        0 => ConvexBody::ball(d).unwrap(),
        1 => {
            let a = random_map(rng, d);
            ConvexBody::ellipsoid(&a * a.transpose()).unwrap()
        }
        2 => ConvexBody::p_ball(d, rng.random_range(1.3..6.0)).unwrap(),
        3 => symmetric_polytope(d, rng),
        _ => ConvexBody::smoothed(symmetric_polytope(d, rng), rng.random_range(0.02..0.2)).unwrap(),
    }
}

fn symmetric_polytope(d: usize, rng: &mut ChaCha8Rng) -> ConvexBody {
    let mut pts = Vec::new();
    for k in 0..d {
        pts.push(Vector::basis(d, k));
    }
    for _ in 0..d + 2 {
        let u = random_unit_vector(rng, d);
        pts.push(Vector(u).scale(rng.random_range(0.6..1.4)));
    }
    let all: Vec<Vector> = pts
        .iter()
        .flat_map(|p| [p.clone(), p.scale(-1.0)])
        .collect();
    ConvexBody::polytope_v(d, all).unwrap()
}

fn triangle() -> ConvexBody {
    ConvexBody::polytope_v(
        2,
        vec![
            Vector(vec![1.0, 0.0]),
            Vector(vec![-0.5, 0.8]),
            Vector(vec![-0.5, -0.8]),
        ],
    )
    .unwrap()
}

/// Greedy packing: each new member touches a random earlier one.
fn touching_packing(body: &ConvexBody, n: usize, rng: &mut ChaCha8Rng) -> Packing {
    let probe = Packing::new(body.clone(), vec![Vector::zeros(body.dim())]).unwrap();
    let sym = probe.symmetric_body().clone();
    let mut centers = vec![Vector::zeros(body.dim())];
    let mut attempts = 0;
    while centers.len() < n && attempts < 50 * n {
        attempts += 1;
        let from = centers[rng.random_range(0..centers.len())].clone();
        let u = Vector(random_unit_vector(rng, body.dim()));
        let c = &from + &sym.boundary_point(&u).unwrap().scale(2.0);
        if centers.iter().all(|o| sym.gauge(&(&c - o)) >= 2.0 - 1e-9) {
            centers.push(c);
        }
    }
    Packing::new(body.clone(), centers).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn support_is_even_on_symmetric_bodies(kind in 0u8..5, d in 2usize..=4, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let body = symmetric_body(kind, d, &mut rng);
        for _ in 0..100 {
            let u = Vector(random_unit_vector(&mut rng, d));
            let a = body.support(&u).unwrap();
            let b = body.support(&u.scale(-1.0)).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn gauge_and_support_are_dual(kind in 0u8..5, d in 2usize..=3, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 1);
        let body = symmetric_body(kind, d, &mut rng);
        let dirs: Vec<Vector> = (0..200).map(|_| Vector(random_unit_vector(&mut rng, d))).collect();
        let h: Vec<f64> = dirs.iter().map(|u| body.support(u).unwrap()).collect();
        for _ in 0..500 {
            let x = Vector(random_unit_vector(&mut rng, d)).scale(rng.random_range(0.0..2.5));
            let g = body.gauge(&x);
            if g <= 1.0 - 1e-9 {
                prop_assert!(dirs.iter().zip(&h).all(|(u, hu)| u.dot(&x) <= hu + 1e-9));
            } else if g >= 1.0 + 1e-9 {
                // the outer normal at x / g separates x from K
                let b = x.scale(1.0 / g);
                let f = body.supporting_functional(&b).unwrap().functional;
                let n = f.as_vector();
                prop_assert!(n.dot(&x) > body.support(&n).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn boundary_points_have_unit_gauge(kind in 0u8..5, d in 1usize..=4, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 2);
        let body = if d == 1 { ConvexBody::ball(1).unwrap() } else { symmetric_body(kind, d, &mut rng) };
        for _ in 0..50 {
            let u = Vector(random_unit_vector(&mut rng, d));
            let b = body.boundary_point(&u).unwrap();
            prop_assert!((body.gauge(&b) - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn supporting_functionals_support(kind in 0u8..5, d in 2usize..=3, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 3);
        let body = symmetric_body(kind, d, &mut rng);
        let boundary: Vec<Vector> = (0..1000)
            .map(|_| body.boundary_point(&Vector(random_unit_vector(&mut rng, d))).unwrap())
            .collect();
        for b in boundary.iter().take(20) {
            let f = body.supporting_functional(b).unwrap().functional;
            prop_assert!((f.apply(b) - 1.0).abs() <= 1e-9);
            let max = boundary.iter().map(|q| f.apply(q)).fold(f64::MIN, f64::max);
            prop_assert!(max <= 1.0 + 1e-7, "max {max}");
        }
    }

    #[test]
    fn symmetrization_is_idempotent(kind in 0u8..4, d in 2usize..=3, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 4);
        let body = symmetric_body(kind, d, &mut rng);
        let sym = body.minkowski_symmetrize().unwrap();
        for _ in 0..50 {
            let u = Vector(random_unit_vector(&mut rng, d));
            prop_assert!((sym.support(&u).unwrap() - body.support(&u).unwrap()).abs() <= 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn symmetrization_preserves_contacts(seed in any::<u64>(), n in 2usize..9) {
        let mut rng = stream_rng(seed, 5);
        let p = touching_packing(&triangle(), n, &mut rng);
        prop_assert!(check_packing(&p).valid);
        let a = contact_graph(&p).unwrap();
        let b = contact_graph(&p.symmetrized()).unwrap();
        prop_assert_eq!(a.edges, b.edges);
    }

    #[test]
    fn symmetrization_preserves_witnesses(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = stream_rng(seed, 6);
        let p = touching_packing(&triangle(), n, &mut rng);
        let cert = certify_totally_separable(&p).unwrap();
        let po = p.symmetrized();
        for (&(i, j), h) in &cert.pairs {
            let moved = h.recentered_for_symmetrization(p.body());
            prop_assert!(verify_hyperplane(&po, i, j, &moved).unwrap());
        }
    }
}

fn smooth_body(kind: u8, d: usize, rng: &mut ChaCha8Rng) -> ConvexBody {
    match kind % 3 {
        0 => ConvexBody::ball(d).unwrap(),
        1 => ConvexBody::p_ball(d, rng.random_range(1.5..5.0)).unwrap(),
        _ => ConvexBody::smoothed(symmetric_polytope(d, rng), 0.1).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn certified_smooth_packings_obey_degree_bounds(kind in 0u8..3, d in 2usize..=3, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 7);
        let body = smooth_body(kind, d, &mut rng);
        let mut packings = vec![touching_packing(&body, 6, &mut rng)];
        if d == 2 {
            let axes = axis_basis(&body).unwrap();
            if body.is_auerbach_basis(&axes).unwrap() {
                packings.push(grid_packing_2d(&body, &axes, rng.random_range(1..6)).unwrap());
            }
        }
        for p in packings {
            let cert = certify_totally_separable(&p).unwrap();
            prop_assert!(cert.verify(&p).unwrap());
            if cert.status == CertificateStatus::Certified {
                let stats = contact_statistics(&contact_graph(&p).unwrap());
                prop_assert!(stats.max_degree <= 2 * d);
                prop_assert!(stats.contact_number <= d * p.len());
                for rho in [1.0, 2.0, 4.0] {
                    prop_assert!(check_rho_separable(&p, rho).unwrap().holds());
                }
                if d == 2 && kind == 0 && p.len() > 1 {
                    prop_assert!(stats.contact_number as f64 <= planar_bound(p.len()).unwrap());
                }
            }
        }
    }

    #[test]
    fn rho_separability_is_monotone(seed in any::<u64>(), n in 3usize..8) {
        let mut rng = stream_rng(seed, 8);
        let p = touching_packing(&ConvexBody::ball(2).unwrap(), n, &mut rng);
        let rhos = [1.0, 1.5, 2.0, 3.0, 4.0];
        let holds: Vec<bool> = rhos.iter().map(|&r| check_rho_separable(&p, r).unwrap().holds()).collect();
        for k in 1..holds.len() {
            prop_assert!(!holds[k] || holds[k - 1], "{holds:?}");
        }
    }
}

/// Images of cross-polytope systems under a linear map, with some pairs
/// possibly dropped (one member of each pair is always kept).
fn mapped_cross_system(d: usize, drop_mask: u32, rng: &mut ChaCha8Rng) -> PairSystem {
    let m = random_map(rng, d);
    let dual = m.transpose().try_inverse().unwrap();
    let mut xs = Vec::new();
    let mut fs = Vec::new();
    for k in 0..d {
        for (s, bit) in [(1.0, 2 * k), (-1.0, 2 * k + 1)] {
            if s < 0.0 && drop_mask & (1 << bit) != 0 {
                continue;
            }
            let e = Vector::basis(d, k).scale(s);
            xs.push(apply(&m, &e.0));
            fs.push(LinearFunctional(apply(&dual, &e.0).0));
        }
    }
    PairSystem::from_parts(d, xs, fs).unwrap()
}

/// Unit vectors in the open half-space `<y, .> > 0` with pairwise
/// non-positive inner products, mapped linearly with matching functionals.
fn one_sided_system(d: usize, rng: &mut ChaCha8Rng) -> PairSystem {
    let y = random_unit_vector(rng, d);
    let mut xs: Vec<Vec<f64>> = Vec::new();
    for _ in 0..400 {
        let u = random_unit_vector(rng, d);
        let up: f64 = u.iter().zip(&y).map(|(a, b)| a * b).sum();
        if up > 0.05
            && xs
                .iter()
                .all(|x| x.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>() <= 0.0)
        {
            xs.push(u);
        }
    }
    let m = random_map(rng, d);
    let dual = m.transpose().try_inverse().unwrap();
    PairSystem::from_parts(
        d,
        xs.iter().map(|x| apply(&m, x)).collect(),
        xs.iter()
            .map(|x| LinearFunctional(apply(&dual, x).0))
            .collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn slab_bodies_realise_separable_configurations(d in 2usize..=3, mask in any::<u32>(), seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 9);
        let s = mapped_cross_system(d, mask, &mut rng);
        prop_assert!(check_condition(&s, Condition::Lin).holds);
        prop_assert!(check_condition(&s, Condition::StrictC).holds);
        let l = slab_body(&s).unwrap();
        for p in s.pairs() {
            prop_assert!((l.gauge(&p.x) - 1.0).abs() <= 1e-9);
        }
        let mut centers = vec![Vector::zeros(d)];
        centers.extend(s.pairs().iter().map(|p| p.x.scale(2.0)));
        let packing = Packing::new(l, centers).unwrap();
        prop_assert!(check_packing(&packing).valid);
        let cert = certify_totally_separable(&packing).unwrap();
        prop_assert_eq!(cert.status, CertificateStatus::Certified);
        prop_assert!(cert.verify(&packing).unwrap());
    }

    #[test]
    fn interior_lin_systems_have_at_most_2d_vectors(d in 2usize..=4, extra in 0usize..3, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 10);
        let s = mapped_cross_system(d, 0, &mut rng);
        let mut pts = s.vectors();
        for _ in 0..extra {
            pts.push(Vector(random_unit_vector(&mut rng, d)));
        }
        if let Some(sys) = realize_lin(&pts) {
            let r = check_interior_bound(&sys).unwrap();
            prop_assert!(r.bound_holds);
            if r.applicable && sys.len() == 2 * d {
                prop_assert_eq!(r.cross_polytope, Some(true));
            }
        }
    }

    #[test]
    fn one_sided_systems_have_the_face_property(d in 2usize..=5, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 11);
        let s = one_sided_system(d, &mut rng);
        prop_assume!(s.len() >= 2);
        prop_assert!(check_condition(&s, Condition::OpenLin).holds);
        let r = check_face_property(&s).unwrap();
        prop_assert!(r.holds, "{:?}", r.pairs.iter().filter(|p| !p.passes).collect::<Vec<_>>());
    }

    #[test]
    fn reduction_keeps_lin(d in 2usize..=4, mask in any::<u32>(), seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 12);
        let s = mapped_cross_system(d, mask, &mut rng);
        let r = reduce_dimension(&s).unwrap();
        prop_assert!(r.lin_holds);
        prop_assert!(check_condition(&r.system, Condition::Lin).holds);
        prop_assert_eq!(r.system.dim() + r.removed.len(), d);
        prop_assert_eq!(r.system.len() + 2 * r.removed.len(), s.len());
    }

    #[test]
    fn steinitz_core_is_minimum(d in 2usize..=3, n in 3usize..=8, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 13);
        let pts: Vec<Vector> = (0..n).map(|_| Vector(random_unit_vector(&mut rng, d)).scale(rng.random_range(0.5..1.5))).collect();
        let core = steinitz_core(&pts).unwrap();
        // exhaustive minimum over all subsets
        let mut best: Option<(usize, Vec<usize>)> = None;
        for mask in 1u32..(1 << n) {
            let subset: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let sub: Vec<Vector> = subset.iter().map(|&i| pts[i].clone()).collect();
            if origin_in_interior(&sub) {
                let better = match &best {
                    None => true,
                    Some((size, s)) => subset.len() < *size || (subset.len() == *size && subset < *s),
                };
                if better {
                    best = Some((subset.len(), subset));
                }
            }
        }
        match (core, best) {
            (None, None) => {}
            (Some(c), Some((size, subset))) => {
                prop_assert_eq!(c.size, size);
                prop_assert_eq!(c.subset, subset);
                prop_assert!(c.size <= 2 * d);
            }
            (c, b) => prop_assert!(false, "core {c:?} vs exhaustive {b:?}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bound_chain(d in 2usize..=4, n in 2usize..5000, lambda in 2.0f64..20.0, delta in 0.01f64..=1.0, t in 0.0f64..=1.0) {
        // iq_ratio between the ball value over (2d)^d and 1
        let lo = ball_isoperimetric_ratio(d) / (2.0 * d as f64).powi(d as i32);
        let iq = lo + t * (1.0 - lo);
        let upper = csep_upper_bound(d, n, lambda, delta, iq).unwrap();
        let simple = csep_simplified_bound(d, n, lambda).unwrap();
        prop_assert!(upper <= simple + 1e-9, "{upper} > {simple}");
        prop_assert!(simple <= (d * n) as f64);
    }

    #[test]
    fn isoperimetric_inequality(p in 1.2f64..8.0, d in 2usize..=3, seed in any::<u64>()) {
        let body = ConvexBody::p_ball(d, p).unwrap();
        let r = isoperimetric_ratio(&body, 20_000, seed).unwrap();
        prop_assert!(ball_isoperimetric_ratio(d) <= r.value + 3.0 * r.stderr);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn lambda_never_below_two(kind in 0u8..3, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 14);
        let body = smooth_body(kind, 2, &mut rng);
        let axes = axis_basis(&body).unwrap();
        prop_assume!(body.is_auerbach_basis(&axes).unwrap());
        let r = lambda_sep_estimate(&body, &axes, 512, seed).unwrap();
        prop_assert!(r.value >= 2.0);
    }

    #[test]
    fn grids_certify_with_exact_contacts(k in 1usize..8, p in 1.5f64..6.0) {
        let body = ConvexBody::p_ball(2, p).unwrap();
        let g = grid_packing_2d(&body, &axis_basis(&body).unwrap(), k).unwrap();
        prop_assert_eq!(contact_graph(&g).unwrap().edges.len(), 2 * k * (k - 1));
        let cert = certify_totally_separable(&g).unwrap();
        prop_assert_eq!(cert.status, CertificateStatus::Certified);
        prop_assert!(cert.verify(&g).unwrap());
    }

    #[test]
    fn search_success_implies_lin(n in 2usize..6, seed in any::<u64>()) {
        let body = ConvexBody::ball(2).unwrap();
        let opts = SearchOptions { restarts: 2, reheat_every: 1000, ..SearchOptions::default() };
        let out = hadwiger_config_search_with(&body, n, 3000, seed, &opts).unwrap();
        if out.success {
            prop_assert!(check_condition(&out.system, Condition::Lin).holds);
        }
        // a disk admits at most four Lin vectors
        prop_assert!(!out.success || n <= 4);
    }
}

#[test]
fn triangle_packings_are_distinct_sets() {
    // sanity check on the generator used above
    let mut rng = stream_rng(1, 0);
    let p = touching_packing(&triangle(), 8, &mut rng);
    let keys: BTreeSet<String> = p.centers().iter().map(|c| format!("{:.6?}", c.0)).collect();
    assert_eq!(keys.len(), p.len());
}
