//! Stochastic search for touching configurations satisfying Lin.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::body::ConvexBody;
use crate::error::{invalid, Result};
use crate::linearization::{check_condition, Condition, PairSystem};
use crate::sampling::{random_unit_vector, stream_rng};
use crate::vector::{dot, LinearFunctional, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub restarts: usize,
    /// Temperature is reset (and the chain restarted from its best state) this often.
    pub reheat_every: usize,
    pub initial_temperature: f64,
    pub cooling: f64,
    /// Best energy below which a local polish is attempted.
    pub polish_threshold: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            restarts: 8,
            reheat_every: 10_000,
            initial_temperature: 1.0,
            cooling: 0.999,
            polish_threshold: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub system: PairSystem,
    /// Total Lin violation of `system` over ordered pairs.
    pub residual: f64,
    /// A system of the target size passed the Lin check.
    pub success: bool,
    /// Size of the largest Lin-satisfying subsystem of `system` found greedily.
    pub max_satisfied: usize,
    pub target_n: usize,
    /// Index of the chain that produced `system`.
    pub chain: usize,
    /// Iterations run by that chain.
    pub iterations: usize,
}

/// Hinge violation of `f_i(x_j) in [-1, 0]`.
fn violation(v: f64) -> f64 {
    v.max(0.0) + (-1.0 - v).max(0.0)
}

struct Evaluated {
    x: Vec<f64>,
    f: Vec<f64>,
}

fn evaluate(body: &ConvexBody, u: &[f64]) -> Option<Evaluated> {
    let b = body.boundary_point(&Vector(u.to_vec())).ok()?;
    let f = body.supporting_functional(&b).ok()?.functional.0;
    Some(Evaluated { x: b.0, f })
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let n = dot(v, v).sqrt();
    v.iter().map(|x| x / n).collect()
}

fn energy(pts: &[Evaluated]) -> f64 {
    let mut e = 0.0;
    for (i, p) in pts.iter().enumerate() {
        for (j, q) in pts.iter().enumerate() {
            if i != j {
                e += violation(dot(&p.f, &q.x));
            }
        }
    }
    e
}

fn energy_of(body: &ConvexBody, dirs: &[Vec<f64>]) -> f64 {
    dirs.iter()
        .map(|u| evaluate(body, u))
        .collect::<Option<Vec<_>>>()
        .map_or(f64::INFINITY, |p| energy(&p))
}

/// Violations of all ordered pairs, for the least-squares polish.
fn residuals(body: &ConvexBody, params: &[f64], n: usize, d: usize) -> Option<Vec<f64>> {
    let pts: Vec<Evaluated> = (0..n)
        .map(|i| evaluate(body, &normalized(&params[i * d..(i + 1) * d])))
        .collect::<Option<_>>()?;
    let mut r = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                r.push(violation(dot(&pts[i].f, &pts[j].x)));
            }
        }
    }
    Some(r)
}

/// Levenberg–Marquardt on the hinge residuals with a central-difference Jacobian.
fn polish(body: &ConvexBody, dirs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = dirs.len();
    let d = dirs[0].len();
    let m = n * d;
    let mut params: Vec<f64> = dirs.iter().flatten().copied().collect();
    let Some(mut r) = residuals(body, &params, n, d) else {
        return dirs.to_vec();
    };
    let cost = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>();
    let mut c = cost(&r);
    let mut mu = 1e-3;
    const H: f64 = 1e-7;
    for _ in 0..200 {
        if c < 1e-26 {
            break;
        }
        let mut jac = DMatrix::zeros(r.len(), m);
        let mut ok = true;
        for k in 0..m {
            let mut p = params.clone();
            p[k] += H;
            let plus = residuals(body, &p, n, d);
            p[k] -= 2.0 * H;
            let minus = residuals(body, &p, n, d);
            match (plus, minus) {
                (Some(a), Some(b)) => {
                    for (row, (x, y)) in a.iter().zip(&b).enumerate() {
                        jac[(row, k)] = (x - y) / (2.0 * H);
                    }
                }
                _ => ok = false,
            }
        }
        if !ok {
            break;
        }
        let rv = DVector::from_column_slice(&r);
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * rv;
        let mut improved = false;
        for _ in 0..12 {
            let mut a = jtj.clone();
            for k in 0..m {
                a[(k, k)] += mu * (1.0 + jtj[(k, k)]);
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                mu *= 10.0;
                continue;
            };
            let trial: Vec<f64> = params.iter().zip(step.iter()).map(|(p, s)| p + s).collect();
            if let Some(rt) = residuals(body, &trial, n, d) {
                let ct = cost(&rt);
                if ct < c {
                    params = trial;
                    r = rt;
                    c = ct;
                    mu = (mu * 0.3).max(1e-12);
                    improved = true;
                    break;
                }
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (0..n)
        .map(|i| normalized(&params[i * d..(i + 1) * d]))
        .collect()
}

fn system_of(body: &ConvexBody, dirs: &[Vec<f64>]) -> Option<PairSystem> {
    let pts: Vec<Evaluated> = dirs
        .iter()
        .map(|u| evaluate(body, u))
        .collect::<Option<_>>()?;
    PairSystem::from_parts(
        body.dim(),
        pts.iter().map(|p| Vector(p.x.clone())).collect(),
        pts.iter().map(|p| LinearFunctional(p.f.clone())).collect(),
    )
    .ok()
}

struct ChainResult {
    dirs: Vec<Vec<f64>>,
    energy: f64,
    success: bool,
    iterations: usize,
}

fn run_chain(
    body: &ConvexBody,
    n: usize,
    iterations: usize,
    rng: &mut ChaCha8Rng,
    opts: &SearchOptions,
) -> ChainResult {
    let d = body.dim();
    let mut dirs: Vec<Vec<f64>> = (0..n).map(|_| random_unit_vector(rng, d)).collect();
    let mut pts: Vec<Evaluated> = match dirs.iter().map(|u| evaluate(body, u)).collect() {
        Some(p) => p,
        None => {
            return ChainResult {
                energy: f64::INFINITY,
                dirs,
                success: false,
                iterations: 0,
            }
        }
    };
    let mut e = energy(&pts);
    let mut best = (e, dirs.clone());
    let try_polish = |best: &(f64, Vec<Vec<f64>>)| -> Option<(f64, Vec<Vec<f64>>)> {
        if best.0 > opts.polish_threshold {
            return None;
        }
        let polished = polish(body, &best.1);
        let s = system_of(body, &polished)?;
        check_condition(&s, Condition::Lin)
            .holds
            .then(|| (energy_of(body, &polished), polished))
    };
    let mut since_reheat = 0usize;
    let mut temperature = opts.initial_temperature;
    for it in 0..iterations {
        if since_reheat == opts.reheat_every {
            if let Some(done) = try_polish(&best) {
                return ChainResult {
                    energy: done.0,
                    dirs: done.1,
                    success: true,
                    iterations: it,
                };
            }
            since_reheat = 0;
            temperature = opts.initial_temperature;
            dirs = best.1.clone();
            pts = dirs.iter().map(|u| evaluate(body, u).unwrap()).collect();
            e = best.0;
        }
        let i = rng.random_range(0..n);
        let step = temperature.max(1e-6);
        let cand: Vec<f64> = dirs[i]
            .iter()
            .map(|x| x + step * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let cand = normalized(&cand);
        let accepted = evaluate(body, &cand).and_then(|p| {
            let mut delta = 0.0;
            for (j, q) in pts.iter().enumerate() {
                if j != i {
                    delta += violation(dot(&p.f, &q.x)) + violation(dot(&q.f, &p.x))
                        - violation(dot(&pts[i].f, &q.x))
                        - violation(dot(&q.f, &pts[i].x));
                }
            }
            let u: f64 = rng.random();
            (delta <= 0.0 || u < (-delta / temperature).exp()).then_some((p, delta))
        });
        if let Some((p, delta)) = accepted {
            pts[i] = p;
            dirs[i] = cand;
            e += delta;
            if e < best.0 {
                // refresh to avoid drift from incremental updates
                e = energy(&pts);
                if e < best.0 {
                    best = (e, dirs.clone());
                }
            }
        }
        temperature *= opts.cooling;
        since_reheat += 1;
    }
    match try_polish(&best) {
        Some(done) => ChainResult {
            energy: done.0,
            dirs: done.1,
            success: true,
            iterations,
        },
        None => ChainResult {
            energy: best.0,
            dirs: best.1,
            success: false,
            iterations,
        },
    }
}

/// Largest subsystem satisfying Lin, removing the worst offender each round.
fn greedy_satisfied(s: &PairSystem) -> usize {
    let mut keep: Vec<usize> = (0..s.len()).collect();
    loop {
        let sub = PairSystem::new(
            s.dim(),
            keep.iter().map(|&i| s.pairs()[i].clone()).collect(),
        )
        .expect("subsystems stay normalised");
        let report = check_condition(&sub, Condition::Lin);
        if report.holds {
            return keep.len();
        }
        let mut blame = vec![0.0; keep.len()];
        for v in &report.violations {
            let w = violation(v.value).max(1e-12);
            blame[v.i] += w;
            blame[v.j] += w;
        }
        let worst = (0..keep.len())
            .max_by(|&a, &b| blame[a].total_cmp(&blame[b]).then(b.cmp(&a)))
            .unwrap();
        keep.remove(worst);
    }
}

pub fn hadwiger_config_search(
    body: &ConvexBody,
    target_n: usize,
    iterations: usize,
    seed: u64,
) -> Result<SearchOutcome> {
    hadwiger_config_search_with(body, target_n, iterations, seed, &SearchOptions::default())
}

/// Simulated annealing over boundary directions, one chain per restart in
/// parallel; the result is the best chain by (success, residual, index).
pub fn hadwiger_config_search_with(
    body: &ConvexBody,
    target_n: usize,
    iterations: usize,
    seed: u64,
    opts: &SearchOptions,
) -> Result<SearchOutcome> {
    if body.dim() > 5 {
        return Err(invalid("search is limited to d <= 5"));
    }
    if target_n < 1 {
        return Err(invalid("target_n must be at least 1"));
    }
    if opts.restarts == 0 || opts.reheat_every == 0 {
        return Err(invalid("restarts and reheat period must be positive"));
    }
    if !(opts.cooling > 0.0 && opts.cooling < 1.0 && opts.initial_temperature > 0.0) {
        return Err(invalid(
            "cooling must lie in (0, 1) and the temperature be positive",
        ));
    }
    let chains: Vec<ChainResult> = (0..opts.restarts)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            run_chain(body, target_n, iterations, &mut rng, opts)
        })
        .collect();
    let (chain, best) = chains
        .iter()
        .enumerate()
        .min_by(|(a, x), (b, y)| {
            y.success
                .cmp(&x.success)
                .then(x.energy.total_cmp(&y.energy))
                .then(a.cmp(b))
        })
        .unwrap();
    let system = system_of(body, &best.dirs)
        .ok_or_else(|| invalid("search produced no boundary configuration"))?;
    // gate: success only if the returned system passes Lin
    let success = best.success && check_condition(&system, Condition::Lin).holds;
    Ok(SearchOutcome {
        residual: energy_of(body, &best.dirs),
        max_satisfied: greedy_satisfied(&system),
        success,
        target_n,
        chain,
        iterations: best.iterations,
        system,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_four_is_found() {
        let b2 = ConvexBody::ball(2).unwrap();
        let out = hadwiger_config_search(&b2, 4, 10_000, 0).unwrap();
        assert!(out.success, "{out:?}");
        assert!(check_condition(&out.system, Condition::Lin).holds);
        assert_eq!(out.max_satisfied, 4);
    }

    #[test]
    fn disk_five_fails() {
        let b2 = ConvexBody::ball(2).unwrap();
        let opts = SearchOptions {
            restarts: 2,
            ..SearchOptions::default()
        };
        let out = hadwiger_config_search_with(&b2, 5, 20_000, 1, &opts).unwrap();
        assert!(!out.success);
        assert!(out.residual > 0.05);
        assert!(out.max_satisfied <= 4);
    }

    #[test]
    fn p_ball_six_in_three_dimensions() {
        let k = ConvexBody::p_ball(3, 4.0).unwrap();
        let out = hadwiger_config_search(&k, 6, 30_000, 0).unwrap();
        assert!(out.success, "{out:?}");
    }

    #[test]
    fn deterministic() {
        let b2 = ConvexBody::ball(2).unwrap();
        let opts = SearchOptions {
            restarts: 3,
            reheat_every: 500,
            ..SearchOptions::default()
        };
        let a = hadwiger_config_search_with(&b2, 3, 2000, 9, &opts).unwrap();
        let b = hadwiger_config_search_with(&b2, 3, 2000, 9, &opts).unwrap();
        assert_eq!(a, b);
    }
}
