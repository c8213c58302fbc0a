//! Vector/functional pair systems and the conditions they may satisfy.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::body::ConvexBody;
use crate::error::{invalid, precondition, Error, Result};
use crate::lp::{LinearProgram, LpScalar, Relation};
use crate::polytope::for_each_subset;
use crate::tolerances::Tolerances;
use crate::vector::{dot, norm, LinearFunctional, Vector, MAX_DIM};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pair {
    pub x: Vector,
    pub f: LinearFunctional,
}

/// `n` pairs `(x_i, f_i)` in `E^d` with `f_i(x_i) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PairSystemSpec", into = "PairSystemSpec")]
pub struct PairSystem {
    dim: usize,
    pairs: Vec<Pair>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairSystemSpec {
    pub dim: usize,
    pub pairs: Vec<Pair>,
}

impl TryFrom<PairSystemSpec> for PairSystem {
    type Error = Error;
    fn try_from(s: PairSystemSpec) -> Result<Self> {
        PairSystem::new(s.dim, s.pairs)
    }
}

impl From<PairSystem> for PairSystemSpec {
    fn from(s: PairSystem) -> Self {
        PairSystemSpec {
            dim: s.dim,
            pairs: s.pairs,
        }
    }
}

/// Allowed slack on `f_i(x_i) = 1`.
const NORMALIZATION_TOL: f64 = 1e-9;

impl PairSystem {
    pub fn new(dim: usize, pairs: Vec<Pair>) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(invalid(format!("dimension {dim} exceeds {MAX_DIM}")));
        }
        for (i, p) in pairs.iter().enumerate() {
            if p.x.dim() != dim || p.f.dim() != dim {
                return Err(invalid(format!("pair {i} does not have dimension {dim}")));
            }
            if !p.x.is_finite() || p.f.0.iter().any(|c| !c.is_finite()) {
                return Err(invalid(format!("pair {i} has non-finite entries")));
            }
            let v = p.f.apply(&p.x);
            if (v - 1.0).abs() > NORMALIZATION_TOL {
                return Err(invalid(format!("pair {i} is not normalised: f(x) = {v}")));
            }
        }
        Ok(PairSystem { dim, pairs })
    }

    pub fn from_parts(dim: usize, xs: Vec<Vector>, fs: Vec<LinearFunctional>) -> Result<Self> {
        if xs.len() != fs.len() {
            return Err(invalid("vector and functional counts differ"));
        }
        PairSystem::new(
            dim,
            xs.into_iter().zip(fs).map(|(x, f)| Pair { x, f }).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn vectors(&self) -> Vec<Vector> {
        self.pairs.iter().map(|p| p.x.clone()).collect()
    }

    pub fn functionals(&self) -> Vec<LinearFunctional> {
        self.pairs.iter().map(|p| p.f.clone()).collect()
    }

    /// `f_i(x_j)`.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.pairs[i].f.apply(&self.pairs[j].x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    Lin,
    StrictC,
    Smooth,
    OpenLin,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::Lin => "Lin",
            Condition::StrictC => "StrictC",
            Condition::Smooth => "Smooth",
            Condition::OpenLin => "OpenLin",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Condition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lin" => Ok(Condition::Lin),
            "strictc" => Ok(Condition::StrictC),
            "smooth" => Ok(Condition::Smooth),
            "openlin" => Ok(Condition::OpenLin),
            _ => Err(invalid(format!("unknown condition {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionViolation {
    pub i: usize,
    pub j: usize,
    /// `f_i(x_j)`.
    pub value: f64,
    pub clause: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub holds: bool,
    pub violations: Vec<ConditionViolation>,
}

pub fn check_condition(s: &PairSystem, which: Condition) -> ConditionReport {
    check_condition_tol(s, which, &Tolerances::default())
}

pub fn check_condition_tol(s: &PairSystem, which: Condition, tol: &Tolerances) -> ConditionReport {
    let n = s.len();
    let mut violations = Vec::new();
    let mut push = |i, j, value, clause: &str| {
        violations.push(ConditionViolation {
            i,
            j,
            value,
            clause: clause.to_string(),
        })
    };
    if matches!(which, Condition::Lin | Condition::OpenLin) {
        for i in 0..n {
            let v = s.value(i, i);
            if (v - 1.0).abs() > tol.interval {
                push(i, i, v, "f_i(x_i) = 1");
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let v = s.value(i, j);
            let at_minus_one = (v + 1.0).abs() <= tol.interval;
            match which {
                Condition::Lin => {
                    if v > tol.interval {
                        push(i, j, v, "f_i(x_j) <= 0");
                    } else if v < -1.0 - tol.interval {
                        push(i, j, v, "f_i(x_j) >= -1");
                    }
                }
                Condition::OpenLin => {
                    if v > tol.interval {
                        push(i, j, v, "f_i(x_j) <= 0");
                    } else if v <= -1.0 + tol.interval {
                        push(i, j, v, "f_i(x_j) > -1");
                    }
                }
                Condition::StrictC => {
                    let antipodal = (&s.pairs[i].x + &s.pairs[j].x)
                        .0
                        .iter()
                        .all(|c| c.abs() <= tol.equality);
                    if at_minus_one != antipodal {
                        push(i, j, v, "f_i(x_j) = -1 iff x_j = -x_i");
                    }
                }
                Condition::Smooth => {
                    let opposite = s.pairs[i]
                        .f
                        .0
                        .iter()
                        .zip(&s.pairs[j].f.0)
                        .all(|(a, b)| (a + b).abs() <= tol.equality);
                    if at_minus_one != opposite {
                        push(i, j, v, "f_i(x_j) = -1 iff f_j = -f_i");
                    }
                }
            }
        }
    }
    ConditionReport {
        condition: which,
        holds: violations.is_empty(),
        violations,
    }
}

/// A pair system with entries in an exact field.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactPairSystem<T> {
    pub dim: usize,
    pub xs: Vec<Vec<T>>,
    pub fs: Vec<Vec<T>>,
}

fn exact_dot<T: LpScalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc.add(&x.mul(y)))
}

impl<T: LpScalar> ExactPairSystem<T> {
    pub fn value(&self, i: usize, j: usize) -> T {
        exact_dot(&self.fs[i], &self.xs[j])
    }

    pub fn to_f64(&self) -> Result<PairSystem> {
        PairSystem::from_parts(
            self.dim,
            self.xs
                .iter()
                .map(|x| Vector(x.iter().map(T::to_f64).collect()))
                .collect(),
            self.fs
                .iter()
                .map(|f| LinearFunctional(f.iter().map(T::to_f64).collect()))
                .collect(),
        )
    }

    /// Condition check with exact comparisons (Lin and OpenLin only).
    pub fn check_condition(&self, which: Condition) -> Result<ConditionReport> {
        use std::cmp::Ordering::*;
        if !matches!(which, Condition::Lin | Condition::OpenLin) {
            return Err(invalid("exact check supports Lin and OpenLin"));
        }
        let one = T::one();
        let mut violations = Vec::new();
        let n = self.xs.len();
        for i in 0..n {
            for j in 0..n {
                let v = self.value(i, j);
                let clause = if i == j {
                    (v.sub(&one).sign() != Equal).then_some("f_i(x_i) = 1")
                } else if v.sign() == Greater {
                    Some("f_i(x_j) <= 0")
                } else {
                    match (which, v.add(&one).sign()) {
                        (_, Less) => Some("f_i(x_j) >= -1"),
                        (Condition::OpenLin, Equal) => Some("f_i(x_j) > -1"),
                        _ => None,
                    }
                };
                if let Some(c) = clause {
                    violations.push(ConditionViolation {
                        i,
                        j,
                        value: v.to_f64(),
                        clause: c.to_string(),
                    });
                }
            }
        }
        Ok(ConditionReport {
            condition: which,
            holds: violations.is_empty(),
            violations,
        })
    }
}

/// Pairs from touching vectors `v_i` (gauge 2) of a smooth body.
pub fn from_configuration(body: &ConvexBody, touching: &[Vector]) -> Result<PairSystem> {
    if !body.is_smooth() {
        return Err(precondition(
            "supporting functionals are unique only on smooth bodies",
        ));
    }
    let tol = Tolerances::default();
    let mut pairs = Vec::with_capacity(touching.len());
    for (i, v) in touching.iter().enumerate() {
        if v.dim() != body.dim() {
            return Err(invalid(format!(
                "touching vector {i} has the wrong dimension"
            )));
        }
        let g = body.gauge(v);
        if !((g - 2.0).abs() <= tol.boundary) {
            return Err(precondition(format!(
                "touching vector {i} has gauge {g}, expected 2"
            )));
        }
        let x = v.scale(0.5);
        let f = body.supporting_functional(&x)?.functional;
        pairs.push(Pair { x, f });
    }
    PairSystem::new(body.dim(), pairs)
}

/// The body `{x : |f_i(x)| <= 1}`.
///
/// When the `f_i` do not span the dual space the slabs leave a recession
/// subspace. Each direction `w` of it is closed off by the extra slab
/// `|<w, x>| <= 2 max_i |<w, x_i>|`, so every `x_i` stays strictly inside the
/// new slabs and keeps `f_i` as its only active constraint.
pub fn slab_body(s: &PairSystem) -> Result<ConvexBody> {
    let d = s.dim();
    let mut fs = s.functionals();
    let gram = DMatrix::from_fn(d, d, |a, b| fs.iter().map(|f| f.0[a] * f.0[b]).sum::<f64>());
    let scale = gram.trace().max(1.0);
    let eig = gram.symmetric_eigen();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > 1e-12 * scale {
            continue;
        }
        let w: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        let reach = s
            .pairs()
            .iter()
            .map(|p| p.x.0.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>().abs())
            .fold(0.0, f64::max);
        let t = if reach > 0.0 { 0.5 / reach } else { 1.0 };
        fs.push(LinearFunctional(w.iter().map(|c| c * t).collect()));
    }
    ConvexBody::slab_intersection(d, fs)
}

/// Margin required by the interior test.
const INTERIOR_MARGIN: f64 = 1e-9;

/// Whether `o` lies in the interior of the convex hull of `points`.
///
/// Interior means: `o` is a combination with all weights at least `t > 0`,
/// and the points span the space.
pub fn origin_in_interior(points: &[Vector]) -> bool {
    let Some(first) = points.first() else {
        return false;
    };
    let d = first.dim();
    if points.len() < d + 1 {
        return false;
    }
    let m = DMatrix::from_fn(points.len(), d, |r, c| points[r][c]);
    if m.rank(1e-9) < d {
        return false;
    }
    let n = points.len();
    // variables: lambda_1..lambda_n, t (free)
    let mut lp = LinearProgram::<f64>::new(n + 1);
    lp.set_free(n);
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    lp.maximize(obj);
    for k in 0..d {
        let mut row: Vec<f64> = points.iter().map(|p| p[k]).collect();
        row.push(0.0);
        lp.constraint(row, Relation::Eq, 0.0);
    }
    let mut sum = vec![1.0; n];
    sum.push(0.0);
    lp.constraint(sum, Relation::Eq, 1.0);
    for i in 0..n {
        let mut row = vec![0.0; n + 1];
        row[i] = 1.0;
        row[n] = -1.0;
        lp.constraint(row, Relation::Ge, 0.0);
    }
    match lp.solve() {
        Ok(sol) => sol.objective > INTERIOR_MARGIN,
        Err(_) => false,
    }
}

/// Whether `o` lies in the convex hull of `points` (exact for exact scalars).
pub fn origin_in_hull<T: LpScalar>(points: &[Vec<T>]) -> bool {
    let Some(first) = points.first() else {
        return false;
    };
    let d = first.len();
    let n = points.len();
    let mut lp = LinearProgram::<T>::new(n);
    for k in 0..d {
        lp.constraint(
            points.iter().map(|p| p[k].clone()).collect(),
            Relation::Eq,
            T::zero(),
        );
    }
    lp.constraint(vec![T::one(); n], Relation::Eq, T::one());
    lp.is_feasible()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SteinitzCore {
    pub subset: Vec<usize>,
    pub size: usize,
    pub is_cross_polytope: bool,
}

const ANTIPODAL_TOL: f64 = 1e-7;

/// Whether the points split into `d` pairs pointing in opposite directions
/// whose representatives span `E^d`.
pub fn is_cross_polytope(points: &[Vector]) -> bool {
    cross_pairs(points, false)
}

/// As [`is_cross_polytope`], with each pair exactly antipodal (`x_b = -x_a`),
/// so the cross-polytope is centred at `o`.
pub fn is_centered_cross_polytope(points: &[Vector]) -> bool {
    cross_pairs(points, true)
}

fn cross_pairs(points: &[Vector], centered: bool) -> bool {
    let Some(first) = points.first() else {
        return false;
    };
    let d = first.dim();
    if points.len() != 2 * d {
        return false;
    }
    let keys: Vec<Vector> = if centered {
        points.to_vec()
    } else {
        points.iter().map(|p| p.normalized()).collect()
    };
    let mut used = vec![false; points.len()];
    let mut reps = Vec::with_capacity(d);
    for a in 0..points.len() {
        if used[a] {
            continue;
        }
        let partner = (a + 1..points.len()).find(|&b| {
            !used[b]
                && (&keys[a] + &keys[b])
                    .0
                    .iter()
                    .all(|c| c.abs() <= ANTIPODAL_TOL)
        });
        match partner {
            Some(b) => {
                used[a] = true;
                used[b] = true;
                reps.push(points[a].clone());
            }
            None => return false,
        }
    }
    let m = DMatrix::from_fn(d, d, |r, c| reps[r][c]);
    m.rank(1e-9) == d
}

/// Largest brute-force instance accepted by [`steinitz_core`].
pub const STEINITZ_MAX_DIM: usize = 5;
pub const STEINITZ_MAX_POINTS: usize = 24;

/// A smallest subset keeping `o` in the interior of the hull, or `None` when
/// `o` is not interior to the hull of all points. Ties go to the
/// lexicographically first subset.
pub fn steinitz_core(points: &[Vector]) -> Result<Option<SteinitzCore>> {
    let Some(first) = points.first() else {
        return Ok(None);
    };
    let d = first.dim();
    if d == 0 || d > STEINITZ_MAX_DIM || points.len() > STEINITZ_MAX_POINTS {
        return Err(invalid(format!(
            "brute-force scope is d <= {STEINITZ_MAX_DIM}, n <= {STEINITZ_MAX_POINTS}"
        )));
    }
    if points.iter().any(|p| p.dim() != d) {
        return Err(invalid("points have mixed dimensions"));
    }
    if !origin_in_interior(points) {
        return Ok(None);
    }
    const BATCH: usize = 4096;
    for size in d + 1..=points.len() {
        let mut batch: Vec<Vec<usize>> = Vec::with_capacity(BATCH);
        let mut found: Option<Vec<usize>> = None;
        let test = |batch: &Vec<Vec<usize>>| -> Option<Vec<usize>> {
            batch
                .par_iter()
                .position_first(|s| {
                    let pts: Vec<Vector> = s.iter().map(|&i| points[i].clone()).collect();
                    origin_in_interior(&pts)
                })
                .map(|k| batch[k].clone())
        };
        for_each_subset(points.len(), size, |s| {
            batch.push(s.to_vec());
            if batch.len() == BATCH {
                found = test(&batch);
                batch.clear();
            }
            found.is_none()
        });
        if found.is_none() && !batch.is_empty() {
            found = test(&batch);
        }
        if let Some(subset) = found {
            let pts: Vec<Vector> = subset.iter().map(|&i| points[i].clone()).collect();
            return Ok(Some(SteinitzCore {
                size: subset.len(),
                is_cross_polytope: is_cross_polytope(&pts),
                subset,
            }));
        }
    }
    unreachable!("the full point set has o in the interior")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteriorBoundReport {
    /// `o` lies in the interior of the hull of the vectors.
    pub applicable: bool,
    pub n: usize,
    pub dim: usize,
    /// `n <= 2d`; `false` would be a counterexample to the interior bound.
    pub bound_holds: bool,
    /// Whether the vectors are the vertices of a cross-polytope centred at `o`;
    /// only reported when `n = 2d`.
    pub cross_polytope: Option<bool>,
}

pub fn check_interior_bound(s: &PairSystem) -> Result<InteriorBoundReport> {
    let lin = check_condition(s, Condition::Lin);
    if !lin.holds {
        return Err(precondition(format!(
            "Lin fails ({} violations)",
            lin.violations.len()
        )));
    }
    let xs = s.vectors();
    let applicable = s.dim() > 0 && origin_in_interior(&xs);
    let n = s.len();
    let d = s.dim();
    Ok(InteriorBoundReport {
        applicable,
        n,
        dim: d,
        bound_holds: !applicable || n <= 2 * d,
        cross_polytope: (applicable && n == 2 * d).then(|| is_centered_cross_polytope(&xs)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacePair {
    pub k: usize,
    pub l: usize,
    pub passes: bool,
    /// Optimal separation `t` of the other points from the plane through `o, x_k, x_l`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacePropertyReport {
    pub holds: bool,
    pub pairs: Vec<FacePair>,
}

const FACE_MARGIN: f64 = 1e-9;

/// For each pair `k < l`, maximise `t` over functionals `g` with
/// `g(x_k) = g(x_l) = 0`, `g(x_m) + t <= 0` for the other points and
/// `|g| <= 1` coordinatewise. The triangle `o, x_k, x_l` is a face of
/// `conv({o} u {x_i})` exactly when the optimum is positive.
pub fn face_property_margins<T: LpScalar>(xs: &[Vec<T>]) -> Vec<(usize, usize, T)> {
    let n = xs.len();
    let d = xs.first().map_or(0, |x| x.len());
    let mut out = Vec::new();
    for k in 0..n {
        for l in k + 1..n {
            let mut lp = LinearProgram::<T>::new(d + 1);
            lp.set_all_free();
            let mut obj = vec![T::zero(); d + 1];
            obj[d] = T::one();
            lp.maximize(obj);
            for &idx in &[k, l] {
                let mut row = xs[idx].clone();
                row.push(T::zero());
                lp.constraint(row, Relation::Eq, T::zero());
            }
            for (m, x) in xs.iter().enumerate() {
                if m != k && m != l {
                    let mut row = x.clone();
                    row.push(T::one());
                    lp.constraint(row, Relation::Le, T::zero());
                }
            }
            for c in 0..=d {
                let mut row = vec![T::zero(); d + 1];
                row[c] = T::one();
                lp.constraint(row.clone(), Relation::Le, T::one());
                if c < d {
                    lp.constraint(row, Relation::Ge, T::one().neg());
                }
            }
            let t = lp
                .solve()
                .map(|s| s.objective)
                .unwrap_or_else(|_| T::one().neg());
            out.push((k, l, t));
        }
    }
    out
}

pub fn check_face_property(s: &PairSystem) -> Result<FacePropertyReport> {
    let open = check_condition(s, Condition::OpenLin);
    if !open.holds {
        return Err(precondition(format!(
            "OpenLin fails ({} violations)",
            open.violations.len()
        )));
    }
    let xs: Vec<Vec<f64>> = s.pairs().iter().map(|p| p.x.0.clone()).collect();
    if origin_in_hull(&xs) {
        return Err(precondition("o lies in the convex hull of the vectors"));
    }
    let pairs: Vec<FacePair> = face_property_margins(&xs)
        .into_iter()
        .map(|(k, l, t)| FacePair {
            k,
            l,
            passes: t > FACE_MARGIN,
            margin: t,
        })
        .collect();
    Ok(FacePropertyReport {
        holds: pairs.iter().all(|p| p.passes),
        pairs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub system: PairSystem,
    /// Removed antipodal pairs, as indices into the input system.
    pub removed: Vec<(usize, usize)>,
    /// Surviving pairs (input indices) whose projections nearly coincide.
    pub near_coincident: Vec<(usize, usize)>,
    /// Lin re-checked on the output.
    pub lin_holds: bool,
}

/// Orthonormal basis of `v^perp` as the columns of a `d x (d-1)` matrix.
fn complement_basis(v: &[f64]) -> DMatrix<f64> {
    let d = v.len();
    let n = norm(v);
    let mut w: Vec<f64> = v.iter().map(|x| x / n).collect();
    // Householder reflection taking v/|v| to -sign(w_0) e_1
    let s = if w[0] >= 0.0 { 1.0 } else { -1.0 };
    w[0] += s;
    let wn2 = dot(&w, &w);
    let h = DMatrix::from_fn(d, d, |r, c| {
        let id = if r == c { 1.0 } else { 0.0 };
        id - 2.0 * w[r] * w[c] / wn2
    });
    h.columns(1, d - 1).into_owned()
}

/// Repeatedly delete antipodal pairs `x_l = -x_k` and restrict the rest to `x_k^perp`.
pub fn reduce_dimension(s: &PairSystem) -> Result<Reduction> {
    let lin = check_condition(s, Condition::Lin);
    if !lin.holds {
        return Err(precondition("Lin fails on the input system"));
    }
    let mut ids: Vec<usize> = (0..s.len()).collect();
    let mut xs: Vec<Vec<f64>> = s.pairs().iter().map(|p| p.x.0.clone()).collect();
    let mut fs: Vec<Vec<f64>> = s.pairs().iter().map(|p| p.f.0.clone()).collect();
    let mut dim = s.dim();
    let mut removed = Vec::new();
    let mut near = Vec::new();
    loop {
        let hit = (0..xs.len()).find_map(|k| {
            (k + 1..xs.len())
                .find(|&l| {
                    xs[k]
                        .iter()
                        .zip(&xs[l])
                        .all(|(a, b)| (a + b).abs() <= ANTIPODAL_TOL)
                })
                .map(|l| (k, l))
        });
        let Some((k, l)) = hit else { break };
        removed.push((ids[k], ids[l]));
        let q = complement_basis(&xs[k]);
        let project = |v: &[f64]| -> Vec<f64> {
            (0..dim - 1)
                .map(|c| (0..dim).map(|r| q[(r, c)] * v[r]).sum())
                .collect()
        };
        let keep: Vec<usize> = (0..xs.len()).filter(|&m| m != k && m != l).collect();
        xs = keep.iter().map(|&m| project(&xs[m])).collect();
        fs = keep.iter().map(|&m| project(&fs[m])).collect();
        ids = keep.iter().map(|&m| ids[m]).collect();
        dim -= 1;
        for a in 0..xs.len() {
            for b in a + 1..xs.len() {
                let dist = xs[a]
                    .iter()
                    .zip(&xs[b])
                    .map(|(p, q)| (p - q).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if dist < ANTIPODAL_TOL && !near.contains(&(ids[a], ids[b])) {
                    near.push((ids[a], ids[b]));
                }
            }
        }
    }
    let system = PairSystem::from_parts(
        dim,
        xs.into_iter().map(Vector).collect(),
        fs.into_iter().map(LinearFunctional).collect(),
    )?;
    let lin_holds = check_condition(&system, Condition::Lin).holds;
    Ok(Reduction {
        system,
        removed,
        near_coincident: near,
        lin_holds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneSidedReport {
    pub x_hull_avoids_o: bool,
    pub f_hull_avoids_o: bool,
}

pub fn one_sided_check(s: &PairSystem) -> OneSidedReport {
    let xs: Vec<Vec<f64>> = s.pairs().iter().map(|p| p.x.0.clone()).collect();
    let fs: Vec<Vec<f64>> = s.pairs().iter().map(|p| p.f.0.clone()).collect();
    OneSidedReport {
        x_hull_avoids_o: !origin_in_hull(&xs),
        f_hull_avoids_o: !origin_in_hull(&fs),
    }
}

impl<T: LpScalar> ExactPairSystem<T> {
    pub fn one_sided_check(&self) -> OneSidedReport {
        OneSidedReport {
            x_hull_avoids_o: !origin_in_hull(&self.xs),
            f_hull_avoids_o: !origin_in_hull(&self.fs),
        }
    }

    /// Face property with exact LP margins; pairs pass when the margin is positive.
    pub fn face_property(&self) -> FacePropertyReport {
        let pairs: Vec<FacePair> = face_property_margins(&self.xs)
            .into_iter()
            .map(|(k, l, t)| FacePair {
                k,
                l,
                passes: t.is_positive(),
                margin: t.to_f64(),
            })
            .collect();
        FacePropertyReport {
            holds: pairs.iter().all(|p| p.passes),
            pairs,
        }
    }
}

/// `x_i - <y, x_i> y` for unit vectors with pairwise inner products in `(-1, 0]`
/// and `<y, x_i> > 0`; the images have pairwise negative inner products.
pub fn obtuse_projection(vectors: &[Vector], y: &Vector) -> Result<Vec<Vector>> {
    let tol = Tolerances::default().interval;
    if (y.norm() - 1.0).abs() > tol {
        return Err(precondition("y must be a unit vector"));
    }
    let mut problems = Vec::new();
    for (i, x) in vectors.iter().enumerate() {
        if x.dim() != y.dim() {
            return Err(invalid(format!("vector {i} has the wrong dimension")));
        }
        if (x.norm() - 1.0).abs() > tol {
            problems.push(format!("x_{i} is not a unit vector"));
        }
        if !(y.dot(x) > 0.0) {
            problems.push(format!("<y, x_{i}> is not positive"));
        }
        for (j, z) in vectors.iter().enumerate().skip(i + 1) {
            let ip = x.dot(z);
            if ip > tol || ip <= -1.0 + tol {
                problems.push(format!("<x_{i}, x_{j}> = {ip} outside (-1, 0]"));
            }
        }
    }
    if !problems.is_empty() {
        return Err(precondition(problems.join("; ")));
    }
    let out: Vec<Vector> = vectors.iter().map(|x| x - &y.scale(y.dot(x))).collect();
    for i in 0..out.len() {
        for j in i + 1..out.len() {
            if !(out[i].dot(&out[j]) < 0.0) {
                return Err(precondition(format!(
                    "projected pair ({i}, {j}) is not obtuse"
                )));
            }
        }
    }
    Ok(out)
}

/// `max over l in 0..=d of 2l + table[d - l]`.
pub fn hsep_recursion_bound(d: usize, table: &BTreeMap<usize, usize>) -> Result<usize> {
    if table.get(&0) != Some(&0) {
        return Err(invalid("table must map 0 to 0"));
    }
    (0..=d)
        .map(|l| {
            table
                .get(&(d - l))
                .map(|h| 2 * l + h)
                .ok_or_else(|| invalid(format!("table has no entry for {}", d - l)))
        })
        .try_fold(0, |acc, v| v.map(|v| acc.max(v)))
}

/// Functionals realising Lin for the given vectors, if they exist: for each
/// `i`, a functional with `f(x_i) = 1` and `f(x_j) in [-1, 0]` otherwise.
///
/// Solved in floating point first; if rounding leaves the answer outside the
/// Lin tolerance, the vectors are converted exactly to rationals and re-solved.
pub fn realize_lin(points: &[Vector]) -> Option<PairSystem> {
    let d = points.first()?.dim();
    let float: Vec<Vec<f64>> = points.iter().map(|p| p.0.clone()).collect();
    let fs = realize_lin_in(&float)?;
    let s = PairSystem::from_parts(
        d,
        points.to_vec(),
        fs.into_iter().map(LinearFunctional).collect(),
    )
    .ok()?;
    if check_condition(&s, Condition::Lin).holds {
        return Some(s);
    }
    let exact: Vec<Vec<BigRational>> = points
        .iter()
        .map(|p| {
            p.0.iter()
                .map(|&c| BigRational::from_float(c))
                .collect::<Option<_>>()
        })
        .collect::<Option<_>>()?;
    let fs = realize_lin_in(&exact)?;
    PairSystem::from_parts(
        d,
        points.to_vec(),
        fs.iter()
            .map(|f| LinearFunctional(f.iter().map(LpScalar::to_f64).collect()))
            .collect(),
    )
    .ok()
}

fn realize_lin_in<T: LpScalar>(points: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let d = points.first()?.len();
    let mut fs = Vec::with_capacity(points.len());
    for (i, xi) in points.iter().enumerate() {
        let mut lp = LinearProgram::<T>::new(d);
        lp.set_all_free();
        lp.constraint(xi.clone(), Relation::Eq, T::one());
        for (j, xj) in points.iter().enumerate() {
            if j != i {
                lp.constraint(xj.clone(), Relation::Le, T::zero());
                lp.constraint(xj.clone(), Relation::Ge, T::one().neg());
            }
        }
        let sol = lp.solve().ok()?;
        let scale = exact_dot(&sol.x, xi);
        fs.push(sol.x.iter().map(|c| c.div(&scale)).collect());
    }
    Some(fs)
}
