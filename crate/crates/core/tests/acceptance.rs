//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Tolerances and runtime limits are pinned below. Runtime limits assume the
//! optimised test profile.

use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use seppack::bounds::{
    ball_isoperimetric_ratio, density_check, dg_certificate, exact_at_most_planar_bound,
    grid_contact_value, isoperimetric_ratio_with, lambda_sep_estimate, union_isoperimetric_ratio,
    IqMethod,
};
use seppack::constructors::{
    axis_basis, cross_polytope_config, example_5d, example_5d_exact, grid_packing_2d, spiky_body_3d,
};
use seppack::linearization::{
    check_condition, check_face_property, check_interior_bound, from_configuration,
    origin_in_interior, realize_lin, Condition,
};
use seppack::lp::LpScalar;
use seppack::measure::UnionOfTranslates;
use seppack::packing::{contact_graph, Packing};
use seppack::sampling::stream_rng;
use seppack::search::hadwiger_config_search;
use seppack::separability::{certify_totally_separable, CertificateStatus};
use seppack::{ConvexBody, Vector};

const SQRT3_TOL: f64 = 1e-12;
const LAMBDA_TOL: f64 = 0.01;
const SPIKY_MIN: f64 = 10.0;
const SIGMA: f64 = 3.0;
const IQ_REL_TOL: f64 = 0.02;
const MC_SAMPLES: usize = 1_000_000;
const LIN_TRIALS: u64 = 100_000;
const SEARCH_ITERATIONS: usize = 100_000;
const SEARCH_RESIDUAL: f64 = 0.05;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: usize, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let in_time = took <= limit;
    let pass = out.pass && in_time;
    println!(
        "[{}] {id}. {name}: {}; {:.2} s (limit {} s{})",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        took.as_secs_f64(),
        limit.as_secs(),
        if in_time { "" } else { ", exceeded" }
    );
    pass
}

fn disk() -> ConvexBody {
    ConvexBody::ball(2).unwrap()
}

fn one_sided_example() -> Outcome {
    let exact = example_5d_exact();
    let open = exact.check_condition(Condition::OpenLin).unwrap();
    let sided = exact.one_sided_check();
    let faces = exact.face_property();
    let float = example_5d();
    // float entries against the exact field elements
    let mut max_dev: f64 = 0.0;
    for (i, p) in float.pairs().iter().enumerate() {
        for k in 0..5 {
            max_dev = max_dev.max((p.x[k] - exact.xs[i][k].to_f64()).abs());
            max_dev = max_dev.max((p.f.0[k] - exact.fs[i][k].to_f64()).abs());
        }
    }
    let float_open = check_condition(&float, Condition::OpenLin).holds;
    let float_faces = check_face_property(&float)
        .map(|r| r.holds)
        .unwrap_or(false);
    let pass = open.holds
        && sided.x_hull_avoids_o
        && faces.holds
        && faces.pairs.len() == 15
        && max_dev <= SQRT3_TOL
        && float_open
        && float_faces;
    Outcome {
        pass,
        detail: format!(
            "exact OpenLin violations {}, x-hull avoids o {}, face pairs {}/{} (exact), float deviation {:.1e}",
            open.violations.len(),
            sided.x_hull_avoids_o,
            faces.pairs.iter().filter(|p| p.passes).count(),
            faces.pairs.len(),
            max_dev
        ),
    }
}

/// Candidate point sets for the cross-polytope characterisation.
fn lin_candidate(trial: u64) -> (usize, Vec<Vector>) {
    let mut rng = stream_rng(0xC0FFEE, trial);
    let d = 2 + (trial % 3) as usize;
    let gauss = |rng: &mut rand_chacha::ChaCha8Rng| -> f64 { rng.sample(StandardNormal) };
    let mut map = vec![vec![0.0; d]; d];
    for (r, row) in map.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = 0.4 * gauss(&mut rng) + if r == c { 1.0 } else { 0.0 };
        }
    }
    let apply = |v: &[f64]| {
        Vector(
            (0..d)
                .map(|r| (0..d).map(|c| map[r][c] * v[c]).sum())
                .collect(),
        )
    };
    let cross = |scale: &dyn Fn(usize) -> f64| -> Vec<Vector> {
        (0..d)
            .flat_map(|k| {
                let e = Vector::basis(d, k);
                [apply(&e.0), apply(&e.scale(-scale(k)).0)]
            })
            .collect()
    };
    let random_dir = |rng: &mut rand_chacha::ChaCha8Rng| -> Vector {
        Vector((0..d).map(|_| gauss(rng)).collect()).normalized()
    };
    let points = match rng.random_range(0..6u32) {
        // linear image of a cross-polytope
        0 => cross(&|_| 1.0),
        // unequal opposite pairs
        1 => {
            let s: Vec<f64> = (0..d).map(|_| rng.random_range(0.5..2.0)).collect();
            cross(&|k| s[k])
        }
        // cross-polytope with extra points
        2 => {
            let mut p = cross(&|_| 1.0);
            for _ in 0..rng.random_range(1..=2) {
                let u = random_dir(&mut rng);
                p.push(apply(&u.0));
            }
            p
        }
        // perturbed cross-polytope
        3 => {
            let eps = 10f64.powf(rng.random_range(-4.0..-2.0));
            cross(&|_| 1.0)
                .into_iter()
                .map(|p| &p + &random_dir(&mut rng).scale(eps))
                .collect()
        }
        // random directions with random lengths
        4 => {
            let n = rng.random_range(d + 1..=2 * d + 2);
            (0..n)
                .map(|_| random_dir(&mut rng).scale(rng.random_range(0.5..1.5)))
                .collect()
        }
        // linear image of a regular-simplex-like obtuse set
        _ => {
            let mut p: Vec<Vector> = (0..d).map(|k| Vector::basis(d, k)).collect();
            p.push(Vector(vec![-1.0; d]));
            p.into_iter().map(|v| apply(&v.0)).collect()
        }
    };
    (d, points)
}

fn cross_polytope_characterisation() -> Outcome {
    #[derive(Default)]
    struct Tally {
        systems: u64,
        not_lin: u64,
        above_2d: u64,
        at_2d: u64,
        at_2d_cross: u64,
    }
    let tallies: Vec<Tally> = (0..LIN_TRIALS)
        .into_par_iter()
        .map(|t| {
            let mut tally = Tally::default();
            let (d, points) = lin_candidate(t);
            if !origin_in_interior(&points) {
                return tally;
            }
            let Some(system) = realize_lin(&points) else {
                return tally;
            };
            let Ok(report) = check_interior_bound(&system) else {
                tally.not_lin += 1;
                return tally;
            };
            if !report.applicable {
                return tally;
            }
            tally.systems += 1;
            if system.len() > 2 * d {
                tally.above_2d += 1;
            }
            if system.len() == 2 * d {
                tally.at_2d += 1;
                if report.cross_polytope == Some(true) {
                    tally.at_2d_cross += 1;
                }
            }
            tally
        })
        .collect();
    let total = tallies.iter().fold(Tally::default(), |a, b| Tally {
        systems: a.systems + b.systems,
        not_lin: a.not_lin + b.not_lin,
        above_2d: a.above_2d + b.above_2d,
        at_2d: a.at_2d + b.at_2d,
        at_2d_cross: a.at_2d_cross + b.at_2d_cross,
    });
    Outcome {
        pass: total.above_2d == 0 && total.not_lin == 0 && total.at_2d == total.at_2d_cross && total.at_2d > 0,
        detail: format!(
            "{LIN_TRIALS} trials, {} Lin systems with o interior ({} realisations off tolerance), {} with n > 2d, {}/{} with n = 2d flagged cross-polytope",
            total.systems, total.not_lin, total.above_2d, total.at_2d_cross, total.at_2d
        ),
    }
}

fn planar_contact_bound() -> Outcome {
    let b2 = disk();
    let axes = axis_basis(&b2).unwrap();
    let mut bad = Vec::new();
    for k in 2..=30usize {
        let p = grid_packing_2d(&b2, &axes, k).unwrap();
        let contacts = contact_graph(&p).unwrap().edges.len() as u64;
        let expected = (2 * k * (k - 1)) as u64;
        if contacts != expected
            || exact_at_most_planar_bound(expected, (k * k) as u64) != Some(true)
        {
            bad.push(k);
        }
    }
    let sweep_bad = (2..=10_000u64)
        .filter(|&n| exact_at_most_planar_bound(grid_contact_value(n), n) != Some(true))
        .count();
    Outcome {
        pass: bad.is_empty() && sweep_bad == 0,
        detail: format!(
            "grids k = 2..30 mismatches {bad:?}; floor(2n - 2 sqrt n) above bound for {sweep_bad} of n = 2..10000"
        ),
    }
}

fn lambda_sep() -> Outcome {
    let b2 = disk();
    let disk_value = lambda_sep_estimate(&b2, &axis_basis(&b2).unwrap(), 4096, 0)
        .unwrap()
        .value;
    let values: Vec<f64> = [0.1, 0.05, 0.02, 0.01]
        .iter()
        .map(|&eps| {
            let k = spiky_body_3d(eps).unwrap();
            lambda_sep_estimate(&k, &axis_basis(&k).unwrap(), 4096, 0)
                .unwrap()
                .value
        })
        .collect();
    let monotone = values.windows(2).all(|w| w[1] > w[0]);
    let last = values[3];
    Outcome {
        pass: (disk_value - 2.0).abs() <= LAMBDA_TOL && last > SPIKY_MIN && monotone,
        detail: format!(
            "disk {disk_value:.4}; spiky eps 0.1/0.05/0.02/0.01 -> {:.2}/{:.2}/{:.2}/{:.2}",
            values[0], values[1], values[2], values[3]
        ),
    }
}

fn dg_certificates() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for d in [2usize, 3] {
        let body = ConvexBody::ball(d).unwrap();
        let touching = cross_polytope_config(&body, &axis_basis(&body).unwrap()).unwrap();
        let s = from_configuration(&body, &touching).unwrap();
        let r = dg_certificate(&body, &s, MC_SAMPLES, 11).unwrap();
        let surplus = r.surplus.clone().unwrap();
        // cap of the unit ball above height 1/2, relative to the ball
        let oracle = if d == 2 {
            (std::f64::consts::PI / 3.0 - 3f64.sqrt() / 4.0) / std::f64::consts::PI
        } else {
            5.0 / 32.0
        };
        let ok = r.holds && surplus.ratio.agrees_with(oracle, SIGMA);
        pass &= ok;
        let worst = r
            .members
            .iter()
            .map(|m| (m.ratio.value - r.target_ratio).abs() / m.ratio.stderr)
            .fold(0.0, f64::max);
        parts.push(format!(
            "B{d}: piece ratios within {worst:.2} sigma of {}, max overlap {:.1e}, cap {:.4} (oracle {oracle:.4}) vs {}",
            r.target_ratio, r.max_overlap.value, surplus.ratio.value, r.target_ratio
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn isoperimetry() -> Outcome {
    let pi = std::f64::consts::PI;
    let square = ConvexBody::polytope_v(
        2,
        [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]]
            .iter()
            .map(|c| Vector(c.to_vec()))
            .collect(),
    )
    .unwrap();
    let cases = [
        (disk(), 4.0 * pi),
        (ConvexBody::ball(3).unwrap(), 36.0 * pi),
        (square.clone(), 16.0),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (body, exact)) in cases.iter().enumerate() {
        let a = isoperimetric_ratio_with(body, MC_SAMPLES, 0, IqMethod::Auto).unwrap();
        let m = isoperimetric_ratio_with(body, MC_SAMPLES, 21 + i as u64, IqMethod::MonteCarlo)
            .unwrap();
        let rel = (m.value - exact).abs() / exact;
        pass &= a.stderr == 0.0 && (a.value - exact).abs() <= 1e-9 * exact && rel <= IQ_REL_TOL;
        parts.push(format!(
            "{:.4} / MC {:.4} ({:.2}%)",
            a.value,
            m.value,
            100.0 * rel
        ));
    }
    // isoperimetric inequality on further bodies and unions
    let b2 = disk();
    let grid = grid_packing_2d(&b2, &axis_basis(&b2).unwrap(), 2).unwrap();
    let others = [
        isoperimetric_ratio_with(
            &ConvexBody::p_ball(2, 4.0).unwrap(),
            MC_SAMPLES,
            5,
            IqMethod::Auto,
        )
        .unwrap(),
        isoperimetric_ratio_with(
            &ConvexBody::p_ball(3, 3.0).unwrap(),
            MC_SAMPLES,
            6,
            IqMethod::Auto,
        )
        .unwrap(),
        isoperimetric_ratio_with(&spiky_body_3d(0.05).unwrap(), MC_SAMPLES, 7, IqMethod::Auto)
            .unwrap(),
        union_isoperimetric_ratio(
            &UnionOfTranslates::new(&b2, grid.centers().to_vec(), 2.0).unwrap(),
            MC_SAMPLES,
            8,
        )
        .unwrap(),
        union_isoperimetric_ratio(
            &UnionOfTranslates::new(&b2, grid.centers().to_vec(), 1.0).unwrap(),
            MC_SAMPLES,
            9,
        )
        .unwrap(),
    ];
    let dims = [2usize, 3, 3, 2, 2];
    let below = others
        .iter()
        .zip(dims)
        .filter(|(r, d)| r.value + SIGMA * r.stderr < ball_isoperimetric_ratio(*d))
        .count();
    pass &= below == 0;
    Outcome {
        pass,
        detail: format!(
            "disk {}, ball {}, square {}; {} further sets, {below} below the ball value",
            parts[0],
            parts[1],
            parts[2],
            others.len()
        ),
    }
}

fn density() -> Outcome {
    let b2 = disk();
    let axes = axis_basis(&b2).unwrap();
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for k in 1..=10 {
        let p = grid_packing_2d(&b2, &axes, k).unwrap();
        for rho in [1.0, 2.0] {
            let r = density_check(&p, rho, 1.0, MC_SAMPLES, k as u64).unwrap();
            worst = worst.max(r.value);
            if r.satisfied != Some(true) {
                failures.push((k, rho));
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("20 grid/rho cases, largest ratio {worst:.4}, failures {failures:?}"),
    }
}

fn trichotomy() -> Outcome {
    let b2 = disk();
    let p4 = ConvexBody::p_ball(2, 4.0).unwrap();
    let mut grids = 0;
    let mut certified = 0;
    let mut reverified = 0;
    for body in [&b2, &p4] {
        let axes = axis_basis(body).unwrap();
        for k in 1..=10 {
            let p = grid_packing_2d(body, &axes, k).unwrap();
            let c = certify_totally_separable(&p).unwrap();
            grids += 1;
            if c.status == CertificateStatus::Certified {
                certified += 1;
            }
            if c.verify(&p).unwrap() {
                reverified += 1;
            }
        }
    }
    let hex = Packing::new(
        b2,
        vec![
            Vector(vec![0.0, 0.0]),
            Vector(vec![2.0, 0.0]),
            Vector(vec![1.0, 3f64.sqrt()]),
        ],
    )
    .unwrap();
    let c = certify_totally_separable(&hex).unwrap();
    let hex_ok = c.status != CertificateStatus::Certified && c.verify(&hex).unwrap();
    Outcome {
        pass: certified == grids && reverified == grids && hex_ok,
        detail: format!(
            "{certified}/{grids} grids certified, {reverified}/{grids} witness sets re-verified; three touching disks {:?} on {} pairs",
            c.status,
            c.refuted_pairs.len() + c.inconclusive_pairs.len()
        ),
    }
}

fn search_control() -> Outcome {
    let b2 = disk();
    let five = hadwiger_config_search(&b2, 5, SEARCH_ITERATIONS, 0).unwrap();
    let four = hadwiger_config_search(&b2, 4, SEARCH_ITERATIONS, 0).unwrap();
    Outcome {
        pass: !five.success && five.residual > SEARCH_RESIDUAL && four.success,
        detail: format!(
            "target 5: success {}, residual {:.3}, largest Lin subsystem {}; target 4: success {} after {} iterations",
            five.success, five.residual, five.max_satisfied, four.success, four.iterations
        ),
    }
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        run(
            1,
            "five-dimensional one-sided configuration",
            secs(1),
            one_sided_example,
        ),
        run(
            2,
            "cross-polytope characterisation",
            secs(120),
            cross_polytope_characterisation,
        ),
        run(3, "planar contact bound", secs(10), planar_contact_bound),
        run(4, "covering constant", secs(30), lambda_sep),
        run(5, "half-body piece certificate", secs(60), dg_certificates),
        run(6, "isoperimetric sanity", secs(60), isoperimetry),
        run(7, "separable density ratio", secs(60), density),
        run(8, "separability trichotomy", secs(10), trichotomy),
        run(9, "search negative control", secs(120), search_control),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
