//! Monte Carlo volumes and boundary measures.

use serde::{Deserialize, Serialize};

use crate::body::{unit_ball_volume, ConvexBody};
use crate::error::{invalid, Error, Result};
use crate::sampling::{par_chunks, random_unit_vector, uniform_in_box};
use crate::vector::{norm, Vector};

/// Smallest sample count accepted by the estimators.
pub const MIN_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, stderr: 0.0 }
    }

    /// Whether `target` lies within `k` standard errors (plus round-off).
    pub fn agrees_with(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr + 1e-12 * target.abs().max(1.0)
    }
}

/// A bounded set given by a membership oracle.
pub trait Region: Sync {
    fn dim(&self) -> usize;
    /// Lower and upper corners of a box containing the set.
    fn bounds(&self) -> (Vec<f64>, Vec<f64>);
    fn contains(&self, x: &[f64]) -> bool;
}

impl Region for ConvexBody {
    fn dim(&self) -> usize {
        ConvexBody::dim(self)
    }
    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        self.bounding_box()
    }
    fn contains(&self, x: &[f64]) -> bool {
        ConvexBody::contains(self, x)
    }
}

/// `union_i (c_i + scale * K)`.
#[derive(Debug, Clone)]
pub struct UnionOfTranslates<'a> {
    pub body: &'a ConvexBody,
    pub centers: Vec<Vector>,
    pub scale: f64,
    reach: f64,
}

impl<'a> UnionOfTranslates<'a> {
    pub fn new(body: &'a ConvexBody, centers: Vec<Vector>, scale: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(invalid("union needs at least one member"));
        }
        if !(scale > 0.0) {
            return Err(invalid("union scale must be positive"));
        }
        Ok(UnionOfTranslates {
            body,
            centers,
            scale,
            reach: body.circumradius() * scale,
        })
    }

    fn member_contains(&self, i: usize, x: &[f64], buf: &mut [f64]) -> bool {
        let c = &self.centers[i].0;
        let mut d2 = 0.0;
        for ((b, xi), ci) in buf.iter_mut().zip(x).zip(c) {
            *b = (xi - ci) / self.scale;
            d2 += (xi - ci) * (xi - ci);
        }
        d2 <= self.reach * self.reach * (1.0 + 1e-12) && self.body.contains(buf)
    }
}

impl Region for UnionOfTranslates<'_> {
    fn dim(&self) -> usize {
        self.body.dim()
    }
    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let (lo, hi) = self.body.bounding_box();
        let d = self.body.dim();
        let mut out_lo = vec![f64::INFINITY; d];
        let mut out_hi = vec![f64::NEG_INFINITY; d];
        for c in &self.centers {
            for k in 0..d {
                out_lo[k] = out_lo[k].min(c[k] + self.scale * lo[k]);
                out_hi[k] = out_hi[k].max(c[k] + self.scale * hi[k]);
            }
        }
        (out_lo, out_hi)
    }
    fn contains(&self, x: &[f64]) -> bool {
        let mut buf = vec![0.0; x.len()];
        (0..self.centers.len()).any(|i| self.member_contains(i, x, &mut buf))
    }
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(invalid(format!(
            "at least {MIN_SAMPLES} samples are required, got {samples}"
        )));
    }
    Ok(())
}

/// Hit-count volume estimate over the bounding box of `region`.
pub fn region_volume(region: &dyn Region, samples: usize, seed: u64) -> Result<Estimate> {
    check_samples(samples)?;
    let (lo, hi) = region.bounds();
    let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    if !(box_vol > 0.0 && box_vol.is_finite()) {
        return Err(Error::DegenerateVolume("empty bounding box".into()));
    }
    let dim = region.dim();
    let hits: u64 = par_chunks(
        samples,
        seed,
        || 0u64,
        |rng, count, acc| {
            let mut x = vec![0.0; dim];
            for _ in 0..count {
                uniform_in_box(rng, &lo, &hi, &mut x);
                if region.contains(&x) {
                    *acc += 1;
                }
            }
        },
        |a, b| a + b,
    );
    let p = hits as f64 / samples as f64;
    Ok(Estimate {
        value: box_vol * p,
        stderr: box_vol * (p * (1.0 - p) / samples as f64).sqrt(),
    })
}

/// Monte Carlo volume of a body (hit count in its bounding box).
pub fn volume_estimate(body: &ConvexBody, samples: usize, seed: u64) -> Result<Estimate> {
    region_volume(body, samples, seed)
}

/// Surface area: analytic where a closed form exists, otherwise [`radial_measures`].
pub fn surface_area_estimate(body: &ConvexBody, samples: usize, seed: u64) -> Result<Estimate> {
    check_samples(samples)?;
    if let Some(s) = body.analytic_surface_area() {
        return Ok(Estimate::exact(s));
    }
    Ok(radial_measures(body, samples, seed)?.surface)
}

/// Volume and surface area from one set of uniformly random directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialMeasures {
    pub volume: Estimate,
    pub surface: Estimate,
    /// Correlation between the two per-direction integrands.
    pub correlation: f64,
}

/// Radial integration over the unit sphere.
///
/// With `rho(u) = 1 / gauge(u)` and `n` the outer unit normal at `rho(u) u`,
/// `vol = omega_d E[rho^d]` and `surface = d omega_d E[rho^{d-1} / <u, n>]`.
/// The surface integrand is the small-`eps` limit of
/// `(vol(K + eps B) - vol(K)) / eps`, computed directly.
pub fn radial_measures(body: &ConvexBody, samples: usize, seed: u64) -> Result<RadialMeasures> {
    check_samples(samples)?;
    let d = body.dim();
    let df = d as f64;
    #[derive(Default, Clone, Copy)]
    struct Acc {
        a: f64,
        b: f64,
        aa: f64,
        bb: f64,
        ab: f64,
    }
    let acc = par_chunks(
        samples,
        seed,
        Acc::default,
        |rng, count, acc| {
            for _ in 0..count {
                let u = random_unit_vector(rng, d);
                let rho = 1.0 / body.gauge_slice(&u);
                let b: Vec<f64> = u.iter().map(|x| x * rho).collect();
                let n = body.outer_normal(&b);
                let cos: f64 = u.iter().zip(&n).map(|(x, y)| x * y).sum();
                let a = rho.powf(df);
                let s = rho.powf(df - 1.0) / cos;
                acc.a += a;
                acc.b += s;
                acc.aa += a * a;
                acc.bb += s * s;
                acc.ab += a * s;
            }
        },
        |x, y| Acc {
            a: x.a + y.a,
            b: x.b + y.b,
            aa: x.aa + y.aa,
            bb: x.bb + y.bb,
            ab: x.ab + y.ab,
        },
    );
    let n = samples as f64;
    let (ma, mb) = (acc.a / n, acc.b / n);
    let va = (acc.aa / n - ma * ma).max(0.0);
    let vb = (acc.bb / n - mb * mb).max(0.0);
    let cov = acc.ab / n - ma * mb;
    let omega = unit_ball_volume(d);
    let correlation = if va > 0.0 && vb > 0.0 {
        (cov / (va * vb).sqrt()).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    Ok(RadialMeasures {
        volume: Estimate {
            value: omega * ma,
            stderr: omega * (va / n).sqrt(),
        },
        surface: Estimate {
            value: df * omega * mb,
            stderr: df * omega * (vb / n).sqrt(),
        },
        correlation,
    })
}

/// Boundary measure of `union_i (c_i + s K)`: each member contributes the part
/// of its boundary not interior to another member.
pub fn union_surface_estimate(
    union: &UnionOfTranslates<'_>,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    check_samples(samples)?;
    let body = union.body;
    let d = body.dim();
    let df = d as f64;
    let m = union.centers.len();
    let (sum, sum2) = par_chunks(
        samples,
        seed,
        || (0.0, 0.0),
        |rng, count, acc| {
            let mut buf = vec![0.0; d];
            for _ in 0..count {
                let i = rand::Rng::random_range(rng, 0..m);
                let u = random_unit_vector(rng, d);
                let rho = 1.0 / body.gauge_slice(&u);
                let b: Vec<f64> = u.iter().map(|x| x * rho).collect();
                let world: Vec<f64> = b
                    .iter()
                    .zip(&union.centers[i].0)
                    .map(|(x, c)| c + union.scale * x)
                    .collect();
                let covered = (0..m).any(|j| {
                    j != i && {
                        for ((o, w), c) in buf.iter_mut().zip(&world).zip(&union.centers[j].0) {
                            *o = (w - c) / union.scale;
                        }
                        norm(&buf) <= body.circumradius() && body.gauge_slice(&buf) < 1.0 - 1e-12
                    }
                });
                if !covered {
                    let n = body.outer_normal(&b);
                    let cos: f64 = u.iter().zip(&n).map(|(x, y)| x * y).sum();
                    let s = rho.powf(df - 1.0) / cos;
                    acc.0 += s;
                    acc.1 += s * s;
                }
            }
        },
        |x, y| (x.0 + y.0, x.1 + y.1),
    );
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum2 / n - mean * mean).max(0.0);
    let factor = m as f64 * df * unit_ball_volume(d) * union.scale.powf(df - 1.0);
    Ok(Estimate {
        value: factor * mean,
        stderr: factor * (var / n).sqrt(),
    })
}
