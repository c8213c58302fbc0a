//! Quantitative bounds: Hadwiger numbers, the covering constant of a
//! separable configuration, isoperimetric ratios, densities and contact bounds.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::body::{unit_ball_volume, ConvexBody};
use crate::error::{invalid, precondition, Error, Result};
use crate::linearization::PairSystem;
use crate::measure::{
    radial_measures, region_volume, union_surface_estimate, Estimate, UnionOfTranslates,
    MIN_SAMPLES,
};
use crate::packing::Packing;
use crate::sampling::{low_discrepancy_directions, par_chunks, stream_rng, uniform_in_box};
use crate::separability::check_rho_separable;
use crate::vector::{dot, Vector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub value: f64,
    /// Zero for exact values.
    pub stderr: f64,
    pub inputs: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub satisfied: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundReport {
    fn new(name: &str, est: Estimate, inputs: Value) -> Self {
        let inputs = match inputs {
            Value::Object(m) => m.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        BoundReport {
            name: name.to_string(),
            value: est.value,
            stderr: est.stderr.max(0.0),
            inputs,
            satisfied: None,
            note: None,
        }
    }

    pub fn estimate(&self) -> Estimate {
        Estimate {
            value: self.value,
            stderr: self.stderr,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HadwigerBounds {
    pub dim: usize,
    /// `2d`, attained by cross-polytope configurations.
    pub lower: u64,
    /// `3^d - 1`.
    pub upper_general: u64,
    /// `2^{d+1} - 3`, for smooth or strictly convex bodies with `d >= 5`.
    pub upper_smooth_high_d: Option<u64>,
    /// `d`, the one-sided separable number for `d <= 4`.
    pub h_sep_low_d: Option<u64>,
}

pub fn hadwiger_bounds(d: usize) -> Result<HadwigerBounds> {
    if d == 0 || d > 40 {
        return Err(invalid("dimension must be in 1..=40"));
    }
    let d64 = d as u64;
    Ok(HadwigerBounds {
        dim: d,
        lower: 2 * d64,
        upper_general: 3u64.pow(d as u32) - 1,
        upper_smooth_high_d: (d >= 5).then(|| (1u64 << (d + 1)) - 3),
        h_sep_low_d: (d <= 4).then_some(d64),
    })
}

/// Upper end of the bisection for the covering constant.
pub const LAMBDA_MAX: f64 = 1e4;
/// Width at which bisection stops.
pub const LAMBDA_WIDTH: f64 = 1e-3;
const COVER_SLACK: f64 = 1e-9;

/// Suggested boundary sample count for dimension `d`.
pub fn default_boundary_samples(d: usize) -> usize {
    if d <= 3 {
        4096
    } else {
        32768
    }
}

/// Random rotation for seed `seed`; the identity for seed 0.
fn rotation(d: usize, seed: u64) -> DMatrix<f64> {
    if seed == 0 {
        return DMatrix::identity(d, d);
    }
    let mut rng = stream_rng(seed, 0);
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    g.qr().q()
}

/// Smallest `lambda >= 2` such that `lambda K` is covered by the translates
/// `±2 a_i + lambda K` of the cross-polytope configuration on the basis `a_i`.
///
/// `lambda` is feasible when every sampled boundary point `b` has some
/// `b ∓ (2 / lambda) a_i` in `K`.
pub fn lambda_sep_estimate(
    body: &ConvexBody,
    auerbach: &[Vector],
    n_boundary: usize,
    seed: u64,
) -> Result<BoundReport> {
    lambda_sep_estimate_with(body, auerbach, n_boundary, seed, LAMBDA_MAX)
}

pub fn lambda_sep_estimate_with(
    body: &ConvexBody,
    auerbach: &[Vector],
    n_boundary: usize,
    seed: u64,
    lambda_max: f64,
) -> Result<BoundReport> {
    if !body.is_auerbach_basis(auerbach)? {
        return Err(precondition("the given points are not an Auerbach basis"));
    }
    if n_boundary == 0 {
        return Err(invalid("at least one boundary sample is required"));
    }
    if !(lambda_max > 2.0) {
        return Err(invalid("lambda_max must exceed 2"));
    }
    let d = body.dim();
    let rot = rotation(d, seed);
    let boundary: Vec<Vec<f64>> = low_discrepancy_directions(d, n_boundary)
        .into_iter()
        .map(|u| {
            let r: Vec<f64> = (0..d)
                .map(|i| (0..d).map(|k| rot[(i, k)] * u[k]).sum())
                .collect();
            body.boundary_point(&Vector(r)).map(|b| b.0)
        })
        .collect::<Result<_>>()?;
    let moves: Vec<Vec<f64>> = auerbach
        .iter()
        .flat_map(|a| [a.0.clone(), a.0.iter().map(|x| -x).collect()])
        .collect();
    let feasible = |lambda: f64| -> bool {
        let t = 2.0 / lambda;
        boundary.par_iter().all(|b| {
            let mut p = vec![0.0; d];
            moves.iter().any(|m| {
                for k in 0..d {
                    p[k] = b[k] - t * m[k];
                }
                body.gauge_slice(&p) <= 1.0 + COVER_SLACK
            })
        })
    };
    let inputs = json!({
        "n_boundary": n_boundary,
        "seed": seed,
        "lambda_max": lambda_max,
        "kind": body.kind().as_str(),
    });
    let mut report;
    if feasible(2.0) {
        report = BoundReport::new(
            "lambda_sep",
            Estimate {
                value: 2.0,
                stderr: 0.0,
            },
            inputs,
        );
        report.note = Some("floor lambda >= 2 is binding".into());
    } else if !feasible(lambda_max) {
        report = BoundReport::new("lambda_sep", Estimate::exact(lambda_max), inputs);
        report.note = Some("exceeds lambda_max".into());
        report.satisfied = Some(false);
    } else {
        let (mut lo, mut hi) = (2.0, lambda_max);
        while hi - lo > LAMBDA_WIDTH {
            let mid = 0.5 * (lo + hi);
            if feasible(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        report = BoundReport::new(
            "lambda_sep",
            Estimate {
                value: hi,
                stderr: hi - lo,
            },
            inputs,
        );
    }
    Ok(report)
}

/// Exact `(4 pi)^... ` style closed forms are used when both measures are known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum IqMethod {
    /// Closed forms when available, Monte Carlo otherwise.
    #[default]
    Auto,
    MonteCarlo,
}

/// `(surface)^d / (volume)^{d-1}` with a delta-method standard error.
fn iq_from(d: usize, surface: Estimate, volume: Estimate, correlation: f64) -> Result<Estimate> {
    if !(volume.value > 0.0) {
        return Err(Error::DegenerateVolume("volume estimate is zero".into()));
    }
    let df = d as f64;
    let value = surface.value.powf(df) / volume.value.powf(df - 1.0);
    let rs = surface.stderr / surface.value;
    let rv = volume.stderr / volume.value;
    let rel2 = df * df * rs * rs + (df - 1.0).powi(2) * rv * rv
        - 2.0 * df * (df - 1.0) * correlation * rs * rv;
    Ok(Estimate {
        value,
        stderr: value * rel2.max(0.0).sqrt(),
    })
}

pub fn isoperimetric_ratio(body: &ConvexBody, samples: usize, seed: u64) -> Result<BoundReport> {
    isoperimetric_ratio_with(body, samples, seed, IqMethod::Auto)
}

pub fn isoperimetric_ratio_with(
    body: &ConvexBody,
    samples: usize,
    seed: u64,
    method: IqMethod,
) -> Result<BoundReport> {
    let d = body.dim();
    let analytic = match method {
        IqMethod::Auto => body.analytic_surface_area().zip(body.analytic_volume()),
        IqMethod::MonteCarlo => None,
    };
    let (est, path) = match analytic {
        Some((s, v)) => (
            iq_from(d, Estimate::exact(s), Estimate::exact(v), 0.0)?,
            "analytic",
        ),
        None => {
            let m = radial_measures(body, samples, seed)?;
            (
                iq_from(d, m.surface, m.volume, m.correlation)?,
                "monte-carlo",
            )
        }
    };
    Ok(BoundReport::new(
        "isoperimetric_ratio",
        est,
        json!({"kind": body.kind().as_str(), "dim": d, "samples": samples, "seed": seed, "method": path}),
    ))
}

pub fn union_isoperimetric_ratio(
    union: &UnionOfTranslates<'_>,
    samples: usize,
    seed: u64,
) -> Result<BoundReport> {
    let d = union.body.dim();
    let volume = region_volume(union, samples, seed)?;
    let surface = union_surface_estimate(union, samples, seed.wrapping_add(1))?;
    Ok(BoundReport::new(
        "isoperimetric_ratio",
        iq_from(d, surface, volume, 0.0)?,
        json!({"members": union.centers.len(), "scale": union.scale, "samples": samples, "seed": seed, "method": "monte-carlo"}),
    ))
}

/// `I_q(B^d) = d^d omega_d`.
pub fn ball_isoperimetric_ratio(d: usize) -> f64 {
    (d as f64).powi(d as i32) * unit_ball_volume(d)
}

/// `n vol(K) / vol(union of x_i + 2 rho K)` for a `rho`-separable packing,
/// compared against `delta` with a 3-sigma allowance.
pub fn density_check(
    p: &Packing,
    rho: f64,
    delta: f64,
    samples: usize,
    seed: u64,
) -> Result<BoundReport> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid("delta must lie in (0, 1]"));
    }
    if !check_rho_separable(p, rho)?.holds() {
        return Err(precondition(format!(
            "packing is not certified {rho}-separable"
        )));
    }
    let body = p.body();
    let union = UnionOfTranslates::new(body, p.centers().to_vec(), 2.0 * rho)?;
    let u = region_volume(&union, samples, seed)?;
    if !(u.value > 0.0) {
        return Err(Error::DegenerateVolume(
            "union volume estimate is zero".into(),
        ));
    }
    let k = match body.analytic_volume() {
        Some(v) => Estimate::exact(v),
        None => region_volume(body, samples, seed.wrapping_add(1))?,
    };
    let n = p.len() as f64;
    let value = n * k.value / u.value;
    let rel = ((u.stderr / u.value).powi(2) + (k.stderr / k.value).powi(2)).sqrt();
    let est = Estimate {
        value,
        stderr: value * rel,
    };
    let mut report = BoundReport::new(
        "separable_density_ratio",
        est,
        json!({"n": p.len(), "rho": rho, "delta": delta, "samples": samples, "seed": seed}),
    );
    report.satisfied = Some(value <= delta + 3.0 * est.stderr);
    Ok(report)
}

/// Contact-number bound in terms of the covering constant, a density bound
/// and `iq_ratio = I_q(B^d) / I_q(K)`.
pub fn csep_upper_bound(d: usize, n: usize, lambda: f64, delta: f64, iq_ratio: f64) -> Result<f64> {
    if d == 0 {
        return Err(invalid("dimension must be positive"));
    }
    if n <= 1 {
        return Err(invalid("n must exceed 1"));
    }
    if !(lambda >= 2.0) || !lambda.is_finite() {
        return Err(invalid("lambda must be finite and at least 2"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid("delta must lie in (0, 1]"));
    }
    if !(iq_ratio > 0.0 && iq_ratio <= 1.0) {
        return Err(invalid("iq_ratio must lie in (0, 1]"));
    }
    let (df, nf) = (d as f64, n as f64);
    let e = (df - 1.0) / df;
    Ok(df * nf
        - nf.powf(e) * iq_ratio.powf(1.0 / df) / (2.0 * lambda.powf(df - 1.0) * delta.powf(e)))
}

/// The same bound with `delta = 1` and the isoperimetric term replaced by its
/// worst case over affine images.
pub fn csep_simplified_bound(d: usize, n: usize, lambda: f64) -> Result<f64> {
    if d == 0 {
        return Err(invalid("dimension must be positive"));
    }
    if n <= 1 {
        return Err(invalid("n must exceed 1"));
    }
    if !(lambda >= 2.0) || !lambda.is_finite() {
        return Err(invalid("lambda must be finite and at least 2"));
    }
    let (df, nf) = (d as f64, n as f64);
    Ok(df * nf
        - nf.powf((df - 1.0) / df) * unit_ball_volume(d).powf(1.0 / df)
            / (4.0 * lambda.powf(df - 1.0)))
}

/// `2n - (sqrt(pi) / 8) sqrt(n)`.
pub fn planar_bound(n: usize) -> Result<f64> {
    if n <= 1 {
        return Err(invalid("n must exceed 1"));
    }
    let nf = n as f64;
    Ok(2.0 * nf - std::f64::consts::PI.sqrt() / 8.0 * nf.sqrt())
}

/// Exact test of `c <= 2n - (sqrt(pi) / 8) sqrt(n)` using the rational
/// enclosure `333/106 < pi < 355/113`. `None` if the enclosure cannot decide.
pub fn exact_at_most_planar_bound(c: u64, n: u64) -> Option<bool> {
    // c <= 2n - s  <=>  s <= 2n - c, with s = sqrt(pi n) / 8 >= 0
    let two_n = 2 * n as u128;
    let c = c as u128;
    if c > two_n {
        return Some(false);
    }
    let gap = two_n - c;
    // s^2 = pi n / 64 <= gap^2  <=>  pi n <= 64 gap^2
    let rhs = 64 * gap * gap;
    let n = n as u128;
    if 355 * n <= 113 * rhs {
        Some(true)
    } else if 333 * n > 106 * rhs {
        Some(false)
    } else {
        None
    }
}

/// `floor(2n - 2 sqrt(n))`, computed with integer square roots.
pub fn grid_contact_value(n: u64) -> u64 {
    // 2 sqrt(n) = sqrt(4n); floor(2n - sqrt(4n)) = 2n - ceil(sqrt(4n))
    let m = 4 * n;
    let mut r = (m as f64).sqrt() as u64;
    while r * r > m {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= m {
        r += 1;
    }
    let ceil = if r * r == m { r } else { r + 1 };
    2 * n - ceil
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgMember {
    /// `vol(K_i) / vol(K)`.
    pub ratio: Estimate,
    pub ratio_ok: bool,
    /// Sampled points of `K_i` outside `K` or inside the interior of `K / 2`.
    pub containment_failures: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgSurplus {
    /// `vol(K ∩ {f_1 >= 1/2}) / vol(K)`.
    pub ratio: Estimate,
    /// Exceeds the target by more than three standard errors.
    pub strict_confirmed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgReport {
    pub target_ratio: f64,
    pub members: Vec<DgMember>,
    /// Largest pairwise overlap volume, relative to `vol(K)`.
    pub max_overlap: Estimate,
    pub max_overlap_pair: Option<(usize, usize)>,
    pub disjoint_ok: bool,
    pub containment_ok: bool,
    pub surplus: Option<DgSurplus>,
    pub holds: bool,
    pub samples: usize,
    pub seed: u64,
}

/// Checks the pieces `K_i = (K ∩ {f_i >= 0}) / 2 + x_i / 2` of a touching
/// configuration: each lies in `K` outside the interior of `K / 2`, they are
/// pairwise disjoint, each has volume `2^{-(d+1)} vol(K)`, and for smooth `K`
/// the cap `K ∩ {f_1 >= 1/2}` is strictly larger.
pub fn dg_certificate(
    body: &ConvexBody,
    s: &PairSystem,
    samples: usize,
    seed: u64,
) -> Result<DgReport> {
    if !body.is_symmetric() {
        return Err(precondition("body must be o-symmetric"));
    }
    if s.dim() != body.dim() {
        return Err(invalid("pair system and body dimensions differ"));
    }
    if s.is_empty() {
        return Err(invalid("pair system is empty"));
    }
    if samples < MIN_SAMPLES {
        return Err(invalid(format!(
            "at least {MIN_SAMPLES} samples are required"
        )));
    }
    for (i, p) in s.pairs().iter().enumerate() {
        let g = body.gauge(&p.x);
        if (g - 1.0).abs() > 1e-6 {
            return Err(precondition(format!(
                "x_{i} is not a boundary point (gauge {g})"
            )));
        }
    }
    let d = body.dim();
    let n = s.len();
    let (lo, hi) = body.bounding_box();
    let xs: Vec<&[f64]> = s.pairs().iter().map(|p| p.x.as_slice()).collect();
    let fs: Vec<&[f64]> = s.pairs().iter().map(|p| p.f.0.as_slice()).collect();

    #[derive(Clone)]
    struct Acc {
        in_k: u64,
        hits: Vec<u64>,
        fails: Vec<u64>,
        overlap: Vec<u64>,
        cap: u64,
    }
    let init = || Acc {
        in_k: 0,
        hits: vec![0; n],
        fails: vec![0; n],
        overlap: vec![0; n * n],
        cap: 0,
    };
    let acc = par_chunks(
        samples,
        seed,
        init,
        |rng, count, acc| {
            let mut z = vec![0.0; d];
            let mut w = vec![0.0; d];
            let mut member = Vec::with_capacity(n);
            for _ in 0..count {
                uniform_in_box(rng, &lo, &hi, &mut z);
                let gz = body.gauge_slice(&z);
                if gz <= 1.0 {
                    acc.in_k += 1;
                    if dot(fs[0], &z) >= 0.5 {
                        acc.cap += 1;
                    }
                }
                member.clear();
                for i in 0..n {
                    for k in 0..d {
                        w[k] = 2.0 * z[k] - xs[i][k];
                    }
                    if body.gauge_slice(&w) <= 1.0 && dot(fs[i], &w) >= 0.0 {
                        acc.hits[i] += 1;
                        if gz > 1.0 + 1e-12 || gz < 0.5 - 1e-12 {
                            acc.fails[i] += 1;
                        }
                        member.push(i);
                    }
                }
                for a in 0..member.len() {
                    for b in a + 1..member.len() {
                        acc.overlap[member[a] * n + member[b]] += 1;
                    }
                }
            }
        },
        |mut a, b| {
            a.in_k += b.in_k;
            a.cap += b.cap;
            for (x, y) in a.hits.iter_mut().zip(&b.hits) {
                *x += y;
            }
            for (x, y) in a.fails.iter_mut().zip(&b.fails) {
                *x += y;
            }
            for (x, y) in a.overlap.iter_mut().zip(&b.overlap) {
                *x += y;
            }
            a
        },
    );
    if acc.in_k == 0 {
        return Err(Error::DegenerateVolume(
            "no samples landed in the body".into(),
        ));
    }
    let nk = acc.in_k as f64;
    let frac = |h: u64| {
        let p = h as f64 / nk;
        Estimate {
            value: p,
            stderr: (p * (1.0 - p) / nk).max(0.0).sqrt(),
        }
    };
    let target = 0.5f64.powi(d as i32 + 1);
    let members: Vec<DgMember> = (0..n)
        .map(|i| {
            let ratio = frac(acc.hits[i]);
            DgMember {
                ratio_ok: (ratio.value - target).abs() <= 3.0 * ratio.stderr,
                ratio,
                containment_failures: acc.fails[i],
            }
        })
        .collect();
    let mut max_overlap = Estimate::exact(0.0);
    let mut max_pair = None;
    for a in 0..n {
        for b in a + 1..n {
            let e = frac(acc.overlap[a * n + b]);
            if e.value > max_overlap.value {
                max_overlap = e;
                max_pair = Some((a, b));
            }
        }
    }
    let disjoint_ok = max_overlap.value <= 3.0 * max_overlap.stderr;
    let containment_ok = members.iter().all(|m| m.containment_failures == 0);
    let surplus = body.is_smooth().then(|| {
        let ratio = frac(acc.cap);
        DgSurplus {
            strict_confirmed: ratio.value - target > 3.0 * ratio.stderr,
            ratio,
        }
    });
    let holds = disjoint_ok
        && containment_ok
        && members.iter().all(|m| m.ratio_ok)
        && surplus.as_ref().is_none_or(|s| s.strict_confirmed);
    Ok(DgReport {
        target_ratio: target,
        members,
        max_overlap,
        max_overlap_pair: max_pair,
        disjoint_ok,
        containment_ok,
        surplus,
        holds,
        samples,
        seed,
    })
}
