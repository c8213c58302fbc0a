//! Hyperplane certificates for total separability.
//!
//! For a fixed normal `f`, member `k` occupies the interval
//! `[f(x_k) - h(-f), f(x_k) + h(f)]` along `f`, and a hyperplane `f = c` meets no
//! interior exactly when `c` is not interior to any of these intervals. Every
//! search below reduces to that one-dimensional test.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::body::ConvexBody;
use crate::error::{invalid, precondition, Result};
use crate::lp::{LinearProgram, Relation};
use crate::packing::{check_packing_tol, Packing};
use crate::sampling::{random_unit_vector, stream_rng};
use crate::tolerances::Tolerances;
use crate::vector::{dot, norm, LinearFunctional, Vector};

/// `{x : f(x) = offset}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: LinearFunctional,
    pub offset: f64,
}

impl Hyperplane {
    /// The witness for the same centers with `K` replaced by `K_o`.
    pub fn recentered_for_symmetrization(&self, body: &ConvexBody) -> Hyperplane {
        let f = &self.normal.0;
        let neg: Vec<f64> = f.iter().map(|x| -x).collect();
        let shift = (body.support_unchecked(&neg) - body.support_unchecked(f)) / 2.0;
        Hyperplane {
            normal: self.normal.clone(),
            offset: self.offset + shift,
        }
    }
}

/// Relative slack used when deciding whether an offset touches an interval.
const REL_TOL: f64 = 1e-8;

/// Search parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub seed: u64,
    pub random_directions: usize,
    pub refinement_steps: usize,
    /// Polytope packings with at most this many members are decided exactly.
    pub exhaustive_limit: usize,
    pub touch_tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            seed: 0,
            random_directions: 512,
            refinement_steps: 50,
            exhaustive_limit: 12,
            touch_tol: Tolerances::default().touch,
        }
    }
}

struct Intervals {
    lo: Vec<f64>,
    hi: Vec<f64>,
    scale: f64,
}

impl Intervals {
    fn new(p: &Packing, f: &[f64]) -> Self {
        let neg: Vec<f64> = f.iter().map(|x| -x).collect();
        let up = p.body().support_unchecked(f);
        let down = p.body().support_unchecked(&neg);
        let mut lo = Vec::with_capacity(p.len());
        let mut hi = Vec::with_capacity(p.len());
        for x in p.centers() {
            let t = dot(f, &x.0);
            lo.push(t - down);
            hi.push(t + up);
        }
        Intervals {
            lo,
            hi,
            scale: norm(f),
        }
    }

    fn tol(&self) -> f64 {
        REL_TOL * self.scale
    }

    fn below(&self, k: usize, c: f64) -> bool {
        self.hi[k] <= c + self.tol()
    }

    fn above(&self, k: usize, c: f64) -> bool {
        self.lo[k] >= c - self.tol()
    }

    /// Best offset with `a` below and `b` above, scored by the smallest
    /// clearance to any interval (negative when some interior is cut).
    fn best_offset(&self, a: usize, b: usize) -> (f64, f64) {
        let (r0, r1) = (self.hi[a], self.lo[b]);
        let relevant: Vec<usize> = (0..self.lo.len())
            .filter(|&k| k != a && k != b && self.hi[k] > r0.min(r1) && self.lo[k] < r0.max(r1))
            .collect();
        let phi = |c: f64| {
            let mut v = (c - r0).min(r1 - c);
            for &k in &relevant {
                v = v.min((self.lo[k] - c).max(c - self.hi[k]));
            }
            v
        };
        if r0 > r1 {
            let c = (r0 + r1) / 2.0;
            return (phi(c), c);
        }
        let mut rising = vec![r0];
        let mut falling = vec![r1];
        for &k in &relevant {
            rising.push(self.hi[k]);
            falling.push(self.lo[k]);
        }
        let mut candidates: Vec<f64> = Vec::new();
        if relevant.len() <= 16 {
            for &x in &rising {
                for &y in &falling {
                    candidates.push(((x + y) / 2.0).clamp(r0, r1));
                }
            }
        } else {
            let mut pts: Vec<f64> = rising
                .iter()
                .chain(&falling)
                .map(|c| c.clamp(r0, r1))
                .collect();
            pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for w in pts.windows(2) {
                candidates.push((w[0] + w[1]) / 2.0);
            }
            candidates.extend(pts);
        }
        let mut best = (f64::NEG_INFINITY, r0);
        for c in candidates {
            let v = phi(c);
            if v > best.0 {
                best = (v, c);
            }
        }
        best
    }

    /// Normalised score and offset for separating `i` and `j` either way round.
    fn score(&self, i: usize, j: usize) -> (f64, f64) {
        let (s1, c1) = self.best_offset(i, j);
        let (s2, c2) = self.best_offset(j, i);
        if s1 >= s2 {
            (s1 / self.scale, c1)
        } else {
            (s2 / self.scale, c2)
        }
    }

    /// All offsets not interior to any interval that split the members into
    /// two nonempty groups, one per gap.
    fn cuts(&self) -> Vec<f64> {
        let tol = self.tol();
        let mut order: Vec<usize> = (0..self.lo.len()).collect();
        order.sort_by(|&x, &y| self.lo[x].partial_cmp(&self.lo[y]).unwrap());
        let mut out = Vec::new();
        let mut reach = f64::NEG_INFINITY;
        for (pos, &k) in order.iter().enumerate() {
            if pos > 0 && self.lo[k] + tol >= reach - tol {
                out.push((reach + self.lo[k]) / 2.0);
            }
            reach = reach.max(self.hi[k]);
        }
        out
    }
}

/// Whether `h` separates members `i` and `j` without meeting any interior.
pub fn verify_hyperplane(p: &Packing, i: usize, j: usize, h: &Hyperplane) -> Result<bool> {
    if i >= p.len() || j >= p.len() || i == j {
        return Err(invalid(format!("invalid member pair ({i}, {j})")));
    }
    if h.normal.dim() != p.dim() {
        return Err(invalid("hyperplane dimension mismatch"));
    }
    if h.normal.is_zero() || !h.offset.is_finite() || h.normal.0.iter().any(|x| !x.is_finite()) {
        return Err(invalid("hyperplane normal must be nonzero and finite"));
    }
    let iv = Intervals::new(p, &h.normal.0);
    let c = h.offset;
    let split = (iv.below(i, c) && iv.above(j, c)) || (iv.below(j, c) && iv.above(i, c));
    Ok(split && (0..p.len()).all(|k| iv.below(k, c) || iv.above(k, c)))
}

/// Outcome of the search for one pair.
#[derive(Debug, Clone, PartialEq)]
pub enum PairOutcome {
    Separated(Hyperplane),
    /// Proven impossible (exact search on small polytope packings).
    Refuted,
    /// No witness found by a search that is not exhaustive.
    Inconclusive,
}

fn witness(iv: &Intervals, f: &[f64], i: usize, j: usize) -> Option<Hyperplane> {
    let (s, c) = iv.score(i, j);
    if s < -REL_TOL {
        return None;
    }
    Some(Hyperplane {
        normal: LinearFunctional(f.to_vec()),
        offset: c,
    })
}

fn deterministic_directions(p: &Packing, i: usize, j: usize, touch_tol: f64) -> Vec<Vec<f64>> {
    let d = p.dim();
    let mut dirs = Vec::new();
    let diff = &p.centers()[j] - &p.centers()[i];
    if (p.pair_gauge(i, j) - 2.0).abs() <= touch_tol {
        if let Ok(sf) = p.symmetric_body().supporting_functional(&diff.scale(0.5)) {
            dirs.push(sf.functional.0);
        }
    }
    for k in 0..d {
        dirs.push(Vector::basis(d, k).0);
    }
    if !diff.is_zero() {
        dirs.push(diff.0.clone());
    }
    if let Some(poly) = p.body().polytope() {
        dirs.extend(poly.facets().iter().map(|f| f.normal.0.clone()));
    }
    if let Some(poly) = p.symmetric_body().polytope() {
        dirs.extend(poly.facets().iter().map(|f| f.normal.0.clone()));
    }
    dirs
}

/// Random directions, then coordinate-wise refinement of the most promising ones.
fn random_search(
    p: &Packing,
    i: usize,
    j: usize,
    stream: u64,
    opts: &SearchOptions,
) -> Option<Hyperplane> {
    let d = p.dim();
    let mut rng = stream_rng(opts.seed, stream);
    let mut scored: Vec<(f64, Vec<f64>)> = Vec::with_capacity(opts.random_directions);
    for _ in 0..opts.random_directions {
        let f = random_unit_vector(&mut rng, d);
        let iv = Intervals::new(p, &f);
        if let Some(h) = witness(&iv, &f, i, j) {
            return Some(h);
        }
        scored.push((iv.score(i, j).0, f));
    }
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    for (mut best, mut f) in scored.into_iter().take(3) {
        let mut step = 0.25;
        for _ in 0..opts.refinement_steps {
            let mut improved = false;
            for k in 0..d {
                for sign in [1.0, -1.0] {
                    let mut g = f.clone();
                    g[k] += sign * step;
                    let n = norm(&g);
                    if n < 1e-12 {
                        continue;
                    }
                    g.iter_mut().for_each(|x| *x /= n);
                    let iv = Intervals::new(p, &g);
                    let s = iv.score(i, j).0;
                    if s > best {
                        best = s;
                        f = g;
                        improved = true;
                    }
                }
            }
            if best >= -REL_TOL {
                break;
            }
            if !improved {
                step /= 2.0;
            }
        }
        let iv = Intervals::new(p, &f);
        if let Some(h) = witness(&iv, &f, i, j) {
            return Some(h);
        }
    }
    None
}

/// Exact decision for polytope bodies: enumerate which side of the hyperplane
/// each other member lies on, pruning with LP feasibility.
fn exhaustive_search(p: &Packing, i: usize, j: usize) -> Option<Hyperplane> {
    let poly = p.body().polytope()?;
    let d = p.dim();
    let others: Vec<usize> = (0..p.len()).filter(|&k| k != i && k != j).collect();
    let diff = &p.centers()[j] - &p.centers()[i];
    // variables (f_1..f_d, c), all free; f(x_j - x_i) = 1 fixes the scale
    let solve = |sides: &[(usize, bool)]| -> Option<Vec<f64>> {
        let mut lp = LinearProgram::<f64>::new(d + 1);
        lp.set_all_free();
        let mut norm_row = diff.0.clone();
        norm_row.push(0.0);
        lp.constraint(norm_row, Relation::Eq, 1.0);
        for &(k, up) in sides {
            for v in poly.vertices() {
                let mut row: Vec<f64> = p.centers()[k]
                    .0
                    .iter()
                    .zip(&v.0)
                    .map(|(a, b)| a + b)
                    .collect();
                row.push(-1.0);
                // below: f(x_k + v) - c <= 0; above: f(x_k + v) - c >= 0
                lp.constraint(row, if up { Relation::Ge } else { Relation::Le }, 0.0);
            }
        }
        lp.solve().ok().map(|s| s.x)
    };
    let mut sides = vec![(i, false), (j, true)];
    fn dfs(
        idx: usize,
        others: &[usize],
        sides: &mut Vec<(usize, bool)>,
        solve: &dyn Fn(&[(usize, bool)]) -> Option<Vec<f64>>,
    ) -> Option<Vec<f64>> {
        let sol = solve(sides)?;
        if idx == others.len() {
            return Some(sol);
        }
        for up in [false, true] {
            sides.push((others[idx], up));
            let found = dfs(idx + 1, others, sides, solve);
            sides.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }
    let sol = dfs(0, &others, &mut sides, &solve)?;
    let f = sol[..d].to_vec();
    let iv = Intervals::new(p, &f);
    let (_, c) = iv.best_offset(i, j);
    Some(Hyperplane {
        normal: LinearFunctional(f),
        offset: c,
    })
}

/// Search outcome for one pair, drawing random directions from `stream`.
pub fn search_pair(
    p: &Packing,
    i: usize,
    j: usize,
    stream: u64,
    opts: &SearchOptions,
) -> PairOutcome {
    for f in deterministic_directions(p, i, j, opts.touch_tol) {
        if norm(&f) < 1e-12 {
            continue;
        }
        let iv = Intervals::new(p, &f);
        if let Some(h) = witness(&iv, &f, i, j) {
            return PairOutcome::Separated(h);
        }
    }
    if p.body().polytope().is_some()
        && p.body().smoothing_radius().is_none()
        && p.len() <= opts.exhaustive_limit
    {
        return match exhaustive_search(p, i, j) {
            Some(h) if verify_hyperplane(p, i, j, &h).unwrap_or(false) => PairOutcome::Separated(h),
            Some(_) => PairOutcome::Inconclusive,
            None => PairOutcome::Refuted,
        };
    }
    match random_search(p, i, j, stream, opts) {
        Some(h) => PairOutcome::Separated(h),
        None => PairOutcome::Inconclusive,
    }
}

/// A separating hyperplane for members `i` and `j`, if the search finds one.
pub fn separating_hyperplane(p: &Packing, i: usize, j: usize) -> Result<Option<Hyperplane>> {
    if i >= p.len() || j >= p.len() || i == j {
        return Err(invalid(format!("invalid member pair ({i}, {j})")));
    }
    let opts = SearchOptions::default();
    let stream = pair_stream(p.len(), i.min(j), i.max(j));
    Ok(match search_pair(p, i, j, stream, &opts) {
        PairOutcome::Separated(h) => Some(h),
        _ => None,
    })
}

fn pair_stream(n: usize, i: usize, j: usize) -> u64 {
    (i * n + j) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateStatus {
    Certified,
    Refuted,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityCertificate {
    #[serde(serialize_with = "ser_pairs", deserialize_with = "de_pairs")]
    pub pairs: BTreeMap<(usize, usize), Hyperplane>,
    pub status: CertificateStatus,
    #[serde(default)]
    pub refuted_pairs: Vec<(usize, usize)>,
    #[serde(default)]
    pub inconclusive_pairs: Vec<(usize, usize)>,
}

fn ser_pairs<S: Serializer>(
    pairs: &BTreeMap<(usize, usize), Hyperplane>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    // keys in numeric pair order rather than string order
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(pairs.len()))?;
    for ((i, j), h) in pairs {
        map.serialize_entry(&format!("{i},{j}"), h)?;
    }
    map.end()
}

fn de_pairs<'de, D: Deserializer<'de>>(
    d: D,
) -> std::result::Result<BTreeMap<(usize, usize), Hyperplane>, D::Error> {
    let raw: BTreeMap<String, Hyperplane> = BTreeMap::deserialize(d)?;
    raw.into_iter()
        .map(|(k, h)| {
            let (a, b) = k
                .split_once(',')
                .ok_or_else(|| D::Error::custom(format!("pair key {k:?} is not \"i,j\"")))?;
            let i = a.trim().parse().map_err(D::Error::custom)?;
            let j = b.trim().parse().map_err(D::Error::custom)?;
            Ok(((i, j), h))
        })
        .collect()
}

impl SeparabilityCertificate {
    /// Re-check every stored witness against the packing.
    pub fn verify(&self, p: &Packing) -> Result<bool> {
        for (&(i, j), h) in &self.pairs {
            if !verify_hyperplane(p, i, j, h)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn certify_totally_separable(p: &Packing) -> Result<SeparabilityCertificate> {
    certify_with(p, &SearchOptions::default())
}

/// Certify every pair; each hyperplane found is reused for all pairs it splits.
pub fn certify_with(p: &Packing, opts: &SearchOptions) -> Result<SeparabilityCertificate> {
    let report = check_packing_tol(p, opts.touch_tol);
    if !report.valid {
        return Err(precondition(format!(
            "not a packing: {} overlapping pairs",
            report.violations.len()
        )));
    }
    let n = p.len();
    let mut pairs: BTreeMap<(usize, usize), Hyperplane> = BTreeMap::new();
    let absorb = |pairs: &mut BTreeMap<(usize, usize), Hyperplane>, f: &[f64], c: f64| {
        let iv = Intervals::new(p, f);
        let below: Vec<bool> = (0..n).map(|k| iv.below(k, c)).collect();
        if !(0..n).all(|k| below[k] || iv.above(k, c)) {
            return;
        }
        let h = Hyperplane {
            normal: LinearFunctional(f.to_vec()),
            offset: c,
        };
        for a in 0..n {
            for b in a + 1..n {
                if below[a] != below[b] && !pairs.contains_key(&(a, b)) {
                    pairs.insert((a, b), h.clone());
                }
            }
        }
    };

    // every gap along a few global directions
    let d = p.dim();
    let mut global: Vec<Vec<f64>> = (0..d).map(|k| Vector::basis(d, k).0).collect();
    if let Some(poly) = p.body().polytope() {
        global.extend(poly.facets().iter().map(|f| f.normal.0.clone()));
    }
    for f in &global {
        let iv = Intervals::new(p, f);
        for c in iv.cuts() {
            absorb(&mut pairs, f, c);
        }
    }

    let mut refuted = Vec::new();
    let mut inconclusive = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if pairs.contains_key(&(i, j)) {
                continue;
            }
            match search_pair(p, i, j, pair_stream(n, i, j), opts) {
                PairOutcome::Separated(h) => {
                    absorb(&mut pairs, &h.normal.0, h.offset);
                    pairs.entry((i, j)).or_insert(h);
                }
                PairOutcome::Refuted => refuted.push((i, j)),
                PairOutcome::Inconclusive => inconclusive.push((i, j)),
            }
        }
    }
    let status = if !refuted.is_empty() {
        CertificateStatus::Refuted
    } else if !inconclusive.is_empty() {
        CertificateStatus::Inconclusive
    } else {
        CertificateStatus::Certified
    };
    Ok(SeparabilityCertificate {
        pairs,
        status,
        refuted_pairs: refuted,
        inconclusive_pairs: inconclusive,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoCenterReport {
    pub center: usize,
    pub members: Vec<usize>,
    pub status: CertificateStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoReport {
    pub rho: f64,
    pub status: CertificateStatus,
    pub centers: Vec<RhoCenterReport>,
}

impl RhoReport {
    pub fn holds(&self) -> bool {
        self.status == CertificateStatus::Certified
    }
}

pub fn check_rho_separable(p: &Packing, rho: f64) -> Result<RhoReport> {
    check_rho_separable_with(p, rho, &SearchOptions::default())
}

/// Certify, around every member, the sub-packing of translates inside `x_i + rho K`.
pub fn check_rho_separable_with(p: &Packing, rho: f64, opts: &SearchOptions) -> Result<RhoReport> {
    if !(rho >= 1.0 && rho.is_finite()) {
        return Err(invalid(format!("rho must be at least 1, got {rho}")));
    }
    let mut centers = Vec::with_capacity(p.len());
    for i in 0..p.len() {
        let members: Vec<usize> = (0..p.len())
            .filter(|&j| j == i || p.pair_gauge(j, i) <= rho - 1.0 + opts.touch_tol)
            .collect();
        let status = if members.len() == 1 {
            CertificateStatus::Certified
        } else {
            certify_with(&p.subpacking(&members), opts)?.status
        };
        centers.push(RhoCenterReport {
            center: i,
            members,
            status,
        });
    }
    let status = if centers
        .iter()
        .any(|c| c.status == CertificateStatus::Refuted)
    {
        CertificateStatus::Refuted
    } else if centers
        .iter()
        .any(|c| c.status == CertificateStatus::Inconclusive)
    {
        CertificateStatus::Inconclusive
    } else {
        CertificateStatus::Certified
    };
    Ok(RhoReport {
        rho,
        status,
        centers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn disks(centers: &[[f64; 2]]) -> Packing {
        Packing::new(
            ConvexBody::ball(2).unwrap(),
            centers.iter().map(|c| Vector(c.to_vec())).collect(),
        )
        .unwrap()
    }

    fn grid(k: usize) -> Packing {
        let mut c = Vec::new();
        for i in 0..k {
            for j in 0..k {
                c.push([2.0 * i as f64, 2.0 * j as f64]);
            }
        }
        disks(&c)
    }

    pub fn hex3() -> Packing {
        disks(&[[0.0, 0.0], [2.0, 0.0], [1.0, 3f64.sqrt()]])
    }

    fn plane(f: [f64; 2], c: f64) -> Hyperplane {
        Hyperplane {
            normal: LinearFunctional(f.to_vec()),
            offset: c,
        }
    }

    #[test]
    fn verify_examples() {
        let g = grid(2);
        // centers: 0 (0,0), 1 (0,2), 2 (2,0), 3 (2,2)
        assert!(verify_hyperplane(&g, 0, 2, &plane([1.0, 0.0], 1.0)).unwrap());
        assert!(!verify_hyperplane(&g, 0, 2, &plane([1.0, 0.0], 0.5)).unwrap());
        assert!(verify_hyperplane(&g, 0, 2, &plane([0.0, 0.0], 1.0)).is_err());
    }

    #[test]
    fn hex_cluster_rejects_sampled_planes() {
        // brute force over sampled (direction, offset) pairs
        let p = hex3();
        let mut rng = stream_rng(99, 0);
        for _ in 0..10_000 {
            let f = random_unit_vector(&mut rng, 2);
            let c: f64 = rng.random_range(-4.0..4.0);
            let h = plane([f[0], f[1]], c);
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                assert!(!verify_hyperplane(&p, i, j, &h).unwrap());
            }
        }
    }

    #[test]
    fn search_examples() {
        let g = grid(2);
        let h = separating_hyperplane(&g, 0, 2).unwrap().unwrap();
        assert!(verify_hyperplane(&g, 0, 2, &h).unwrap());
        let line = disks(&[[0.0, 0.0], [2.0, 0.0], [4.0, 0.0]]);
        let h = separating_hyperplane(&line, 0, 2).unwrap().unwrap();
        let through =
            |x: f64| (h.normal.0[0] * x - h.offset).abs() < 1e-9 && h.normal.0[1].abs() < 1e-12;
        assert!(through(1.0) || through(3.0), "{h:?}");
        let p = hex3();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(separating_hyperplane(&p, i, j).unwrap(), None);
        }
    }

    #[test]
    fn certify_examples() {
        let cert = certify_totally_separable(&grid(4)).unwrap();
        assert_eq!(cert.status, CertificateStatus::Certified);
        assert_eq!(cert.pairs.len(), 16 * 15 / 2);
        assert!(cert.verify(&grid(4)).unwrap());
        assert!(cert
            .pairs
            .values()
            .all(|h| h.normal.0.iter().filter(|x| **x != 0.0).count() == 1));

        let cert = certify_totally_separable(&hex3()).unwrap();
        assert_eq!(cert.status, CertificateStatus::Inconclusive);
        assert_eq!(cert.inconclusive_pairs, vec![(0, 1), (0, 2), (1, 2)]);

        let single = certify_totally_separable(&disks(&[[0.0, 0.0]])).unwrap();
        assert_eq!(single.status, CertificateStatus::Certified);
        assert!(single.pairs.is_empty());
    }

    #[test]
    fn polytope_clusters_are_refuted() {
        // three touching hexagons around a common vertex cannot be separated
        let hex: Vec<Vector> = (0..6)
            .map(|k| {
                let t = std::f64::consts::PI / 3.0 * k as f64;
                Vector(vec![t.cos(), t.sin()])
            })
            .collect();
        let body = ConvexBody::polytope_v(2, hex).unwrap();
        let s = 3f64.sqrt();
        let centers = vec![
            Vector(vec![0.0, 0.0]),
            Vector(vec![1.5, s / 2.0]),
            Vector(vec![1.5, -s / 2.0]),
        ];
        let p = Packing::new(body, centers).unwrap();
        let cert = certify_totally_separable(&p).unwrap();
        assert_eq!(cert.status, CertificateStatus::Refuted);

        let sq = ConvexBody::polytope_v(
            2,
            vec![
                Vector(vec![1.0, 1.0]),
                Vector(vec![1.0, -1.0]),
                Vector(vec![-1.0, 1.0]),
                Vector(vec![-1.0, -1.0]),
            ],
        )
        .unwrap();
        // a brick wall: 0,1 share the edge x = 1, which cuts 2; likewise 2,3 and member 1
        let bricks = Packing::new(
            sq.clone(),
            vec![
                Vector(vec![0.0, 0.0]),
                Vector(vec![2.0, 0.0]),
                Vector(vec![1.0, 2.0]),
                Vector(vec![3.0, 2.0]),
            ],
        )
        .unwrap();
        let cert = certify_totally_separable(&bricks).unwrap();
        assert_eq!(cert.status, CertificateStatus::Refuted);
        assert_eq!(cert.refuted_pairs, vec![(0, 1), (2, 3)]);
        let aligned = Packing::new(
            sq,
            vec![
                Vector(vec![0.0, 0.0]),
                Vector(vec![2.0, 0.0]),
                Vector(vec![0.0, 2.0]),
                Vector(vec![2.0, 2.0]),
            ],
        )
        .unwrap();
        assert_eq!(
            certify_totally_separable(&aligned).unwrap().status,
            CertificateStatus::Certified
        );
    }

    #[test]
    fn rho_examples() {
        for rho in [1.0, 2.0, 4.0] {
            assert!(check_rho_separable(&grid(3), rho).unwrap().holds());
        }
        let r = check_rho_separable(&hex3(), 4.0).unwrap();
        assert!(r
            .centers
            .iter()
            .all(|c| c.status != CertificateStatus::Certified));
        assert!(check_rho_separable(&hex3(), 1.0).unwrap().holds());
        assert!(check_rho_separable(&hex3(), 0.5).is_err());
    }

    #[test]
    fn certificate_json_keys() {
        let cert = certify_totally_separable(&grid(2)).unwrap();
        let v = serde_json::to_value(&cert).unwrap();
        assert!(v["pairs"]["0,1"]["normal"].is_array());
        assert_eq!(v["status"], "certified");
        let back: SeparabilityCertificate = serde_json::from_value(v).unwrap();
        assert_eq!(back, cert);
    }
}
