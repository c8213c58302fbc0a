//! Brute-force polytope machinery for small dimensions.
//!
//! Both representations are kept: vertices (for support queries and nearest
//! points) and irredundant facets (for the gauge and supporting functionals).
//! Conversions enumerate `d`-subsets, which is fine for the vertex and facet
//! counts this crate deals with.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lp::{LinearProgram, LpError, Relation};
use crate::vector::{dot, norm, Vector};

/// Upper limit on the number of `d`-subsets a conversion may enumerate.
const MAX_SUBSETS: u64 = 2_000_000;
const GEOM_EPS: f64 = 1e-9;

/// `{x : <normal, x> <= offset}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vector,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vector>,
    /// Unit outer normals.
    facets: Vec<Halfspace>,
    /// Vertex indices incident to each facet.
    incidence: Vec<Vec<usize>>,
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u64) / (i as u64 + 1);
    }
    acc
}

/// Visit every `k`-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !visit(&idx) {
            return;
        }
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        i -= 1;
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Hyperplane `<a, x> = b` through `d` points, or `None` if they are affinely dependent.
fn hyperplane_through(points: &[&Vector], dim: usize) -> Option<(Vec<f64>, f64)> {
    // null vector of the d x (d+1) matrix [p_i | 1] via signed maximal minors
    let m = DMatrix::from_fn(
        dim,
        dim + 1,
        |r, c| {
            if c < dim {
                points[r][c]
            } else {
                1.0
            }
        },
    );
    let mut null = Vec::with_capacity(dim + 1);
    for skip in 0..=dim {
        let minor = m.clone().remove_column(skip);
        let det = if dim == 0 { 1.0 } else { minor.determinant() };
        null.push(if skip % 2 == 0 { det } else { -det });
    }
    let a: Vec<f64> = null[..dim].to_vec();
    let scale = norm(&a);
    if scale < GEOM_EPS {
        return None;
    }
    // a·p + null[d]·1 = 0  =>  a·p = -null[d]
    let a: Vec<f64> = a.iter().map(|x| x / scale).collect();
    let b = -null[dim] / scale;
    Some((a, b))
}

impl Polytope {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    /// Vertex indices of facet `k`.
    pub fn facet_vertices(&self, k: usize) -> &[usize] {
        &self.incidence[k]
    }

    /// Convex hull of a finite point set with nonempty interior.
    pub fn from_points(dim: usize, points: &[Vector]) -> Result<Self> {
        if points.len() < dim + 1 {
            return Err(invalid("too few points for a full-dimensional polytope"));
        }
        if binomial(points.len(), dim) > MAX_SUBSETS {
            return Err(invalid(
                "polytope too large for brute-force facet enumeration",
            ));
        }
        let scale = points.iter().map(|p| p.norm()).fold(1.0, f64::max);
        let tol = GEOM_EPS * scale;
        let mut facets: Vec<Halfspace> = Vec::new();
        for_each_subset(points.len(), dim, |subset| {
            let chosen: Vec<&Vector> = subset.iter().map(|&i| &points[i]).collect();
            if let Some((a, b)) = hyperplane_through(&chosen, dim) {
                let (mut above, mut below) = (false, false);
                for p in points {
                    let s = dot(&a, &p.0) - b;
                    above |= s > tol;
                    below |= s < -tol;
                    if above && below {
                        break;
                    }
                }
                let candidate = match (above, below) {
                    (false, _) => Some(Halfspace {
                        normal: Vector(a),
                        offset: b,
                    }),
                    (true, false) => Some(Halfspace {
                        normal: Vector(a.iter().map(|x| -x).collect()),
                        offset: -b,
                    }),
                    _ => None,
                };
                if let Some(h) = candidate {
                    let dup = facets.iter().any(|f| {
                        f.normal.max_abs_diff(&h.normal) < 1e-8
                            && (f.offset - h.offset).abs() < tol.max(1e-8)
                    });
                    if !dup {
                        facets.push(h);
                    }
                }
            }
            true
        });
        if facets.len() < dim + 1 {
            return Err(invalid("point set is not full-dimensional"));
        }
        Self::assemble(dim, points, facets, tol)
    }

    /// Intersection of halfspaces; must be bounded with nonempty interior.
    pub fn from_halfspaces(dim: usize, halfspaces: &[Halfspace]) -> Result<Self> {
        if halfspaces.len() < dim + 1 {
            return Err(Error::UnboundedBody(format!(
                "{} halfspaces cannot bound a region in dimension {dim}",
                halfspaces.len()
            )));
        }
        if binomial(halfspaces.len(), dim) > MAX_SUBSETS {
            return Err(invalid(
                "polytope too large for brute-force vertex enumeration",
            ));
        }
        // boundedness via LP in each coordinate direction
        for k in 0..dim {
            for sign in [1.0, -1.0] {
                let mut lp = LinearProgram::<f64>::new(dim);
                lp.set_all_free();
                let mut c = vec![0.0; dim];
                c[k] = sign;
                lp.maximize(c);
                for h in halfspaces {
                    lp.constraint(h.normal.0.clone(), Relation::Le, h.offset);
                }
                match lp.solve() {
                    Ok(_) => {}
                    Err(LpError::Unbounded) => {
                        return Err(Error::UnboundedBody(
                            "halfspaces do not bound a region".into(),
                        ))
                    }
                    Err(e) => return Err(invalid(format!("halfspace system: {e}"))),
                }
            }
        }
        let scale = halfspaces
            .iter()
            .map(|h| h.offset.abs() / h.normal.norm().max(1e-300))
            .fold(1.0, f64::max);
        let tol = GEOM_EPS * scale;
        let mut vertices: Vec<Vector> = Vec::new();
        for_each_subset(halfspaces.len(), dim, |subset| {
            let a = DMatrix::from_fn(dim, dim, |r, c| halfspaces[subset[r]].normal[c]);
            let b = DVector::from_fn(dim, |r, _| halfspaces[subset[r]].offset);
            if let Some(x) = a.lu().solve(&b) {
                let x = Vector(x.iter().copied().collect());
                if x.is_finite()
                    && halfspaces
                        .iter()
                        .all(|h| h.normal.dot(&x) <= h.offset + tol * h.normal.norm().max(1.0))
                    && !vertices.iter().any(|v| v.max_abs_diff(&x) < 1e-9 * scale)
                {
                    vertices.push(x);
                }
            }
            true
        });
        if vertices.len() < dim + 1 {
            return Err(invalid(
                "halfspaces do not enclose a full-dimensional region",
            ));
        }
        // facets are the (unit-normalised, deduplicated) halfspaces whose
        // incident vertices span a hyperplane
        let mut facets: Vec<Halfspace> = Vec::new();
        for h in halfspaces {
            let n = h.normal.norm();
            if n < GEOM_EPS {
                continue;
            }
            let unit = Halfspace {
                normal: h.normal.scale(1.0 / n),
                offset: h.offset / n,
            };
            let on: Vec<&Vector> = vertices
                .iter()
                .filter(|v| (unit.normal.dot(v) - unit.offset).abs() <= tol)
                .collect();
            if on.len() < dim {
                continue;
            }
            let diffs = DMatrix::from_fn(on.len() - 1, dim, |r, c| on[r + 1][c] - on[0][c]);
            let dup = facets.iter().any(|f| {
                f.normal.max_abs_diff(&unit.normal) < 1e-8
                    && (f.offset - unit.offset).abs() < tol.max(1e-8)
            });
            if diffs.rank(1e-9 * scale) == dim - 1 && !dup {
                facets.push(unit);
            }
        }
        Self::assemble(dim, &vertices, facets, tol)
    }

    fn assemble(dim: usize, points: &[Vector], facets: Vec<Halfspace>, tol: f64) -> Result<Self> {
        // keep only points whose incident facet normals span E^d (the vertices)
        let mut vertices = Vec::new();
        for p in points {
            let incident: Vec<&Halfspace> = facets
                .iter()
                .filter(|f| (f.normal.dot(p) - f.offset).abs() <= tol)
                .collect();
            if incident.len() < dim {
                continue;
            }
            let m = DMatrix::from_fn(incident.len(), dim, |r, c| incident[r].normal[c]);
            if m.rank(1e-9) == dim && !vertices.iter().any(|v: &Vector| v.max_abs_diff(p) < tol) {
                vertices.push(p.clone());
            }
        }
        let incidence = facets
            .iter()
            .map(|f| {
                (0..vertices.len())
                    .filter(|&i| (f.normal.dot(&vertices[i]) - f.offset).abs() <= tol)
                    .collect()
            })
            .collect();
        Ok(Polytope {
            dim,
            vertices,
            facets,
            incidence,
        })
    }

    pub fn support(&self, u: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot(&v.0, u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn support_point(&self, u: &[f64]) -> &Vector {
        let mut best = &self.vertices[0];
        let mut best_val = f64::NEG_INFINITY;
        for v in &self.vertices {
            let s = dot(&v.0, u);
            if s > best_val {
                best_val = s;
                best = v;
            }
        }
        best
    }

    /// Support value obtained from the facet description by linear programming.
    pub fn support_lp(&self, u: &[f64]) -> Result<f64> {
        let mut lp = LinearProgram::<f64>::new(self.dim);
        lp.set_all_free().maximize(u.to_vec());
        for f in &self.facets {
            lp.constraint(f.normal.0.clone(), Relation::Le, f.offset);
        }
        Ok(lp.solve()?.objective)
    }

    /// Minkowski functional; infinite outside the cone spanned by the polytope
    /// when the origin is on the boundary.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        let mut g: f64 = 0.0;
        for f in &self.facets {
            let s = dot(&f.normal.0, x);
            if f.offset > GEOM_EPS {
                g = g.max(s / f.offset);
            } else if s > GEOM_EPS {
                return f64::INFINITY;
            }
        }
        g
    }

    pub fn is_symmetric(&self) -> bool {
        let scale = self.vertices.iter().map(|v| v.norm()).fold(1.0, f64::max);
        self.vertices.iter().all(|v| {
            let neg = -v;
            self.vertices
                .iter()
                .any(|w| w.max_abs_diff(&neg) < 1e-9 * scale)
        })
    }

    pub fn contains_origin_in_interior(&self) -> bool {
        self.facets.iter().all(|f| f.offset > GEOM_EPS)
    }

    /// Nearest point of the polytope to `x` and its distance.
    pub fn nearest_point(&self, x: &[f64]) -> (Vector, f64) {
        nearest_point_in_hull(&self.vertices, x)
    }

    /// `(d-1)`-volume of facet `k`, available for `d <= 3`.
    pub fn facet_area(&self, k: usize) -> Option<f64> {
        let pts: Vec<&Vector> = self.incidence[k]
            .iter()
            .map(|&i| &self.vertices[i])
            .collect();
        match self.dim {
            1 => Some(1.0),
            2 => {
                let mut best: f64 = 0.0;
                for a in &pts {
                    for b in &pts {
                        best = best.max((*a - *b).norm());
                    }
                }
                Some(best)
            }
            3 => {
                let n = &self.facets[k].normal;
                let (e1, e2) = plane_basis(n);
                let planar: Vec<(f64, f64)> =
                    pts.iter().map(|p| (p.dot(&e1), p.dot(&e2))).collect();
                Some(polygon_area(&convex_hull_2d(planar)))
            }
            _ => None,
        }
    }

    pub fn surface_area(&self) -> Option<f64> {
        (0..self.facets.len()).map(|k| self.facet_area(k)).sum()
    }

    /// Volume by pyramid decomposition from the origin (origin must be interior).
    pub fn volume(&self) -> Option<f64> {
        if !self.contains_origin_in_interior() {
            return None;
        }
        let d = self.dim as f64;
        (0..self.facets.len())
            .map(|k| self.facet_area(k).map(|a| a * self.facets[k].offset / d))
            .sum()
    }

    pub fn translated(&self, t: &[f64]) -> Result<Polytope> {
        let pts: Vec<Vector> = self
            .vertices
            .iter()
            .map(|v| Vector(v.0.iter().zip(t).map(|(a, b)| a + b).collect()))
            .collect();
        Polytope::from_points(self.dim, &pts)
    }
}

fn plane_basis(n: &Vector) -> (Vector, Vector) {
    // any unit vector not parallel to n, then Gram-Schmidt
    let k = (0..3)
        .min_by(|&a, &b| n[a].abs().partial_cmp(&n[b].abs()).unwrap())
        .unwrap();
    let seed = Vector::basis(3, k);
    let e1 = (&seed - &n.scale(seed.dot(n))).normalized();
    let e2 = Vector(vec![
        n[1] * e1[2] - n[2] * e1[1],
        n[2] * e1[0] - n[0] * e1[2],
        n[0] * e1[1] - n[1] * e1[0],
    ]);
    (e1, e2)
}

pub(crate) fn convex_hull_2d(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub(crate) fn polygon_area(poly: &[(f64, f64)]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        acc += a.0 * b.1 - a.1 * b.0;
    }
    acc.abs() / 2.0
}

/// Wolfe's minimum-norm-point algorithm applied to `points - x`.
///
/// Returns the point of `conv(points)` nearest to `x` and its distance.
pub fn nearest_point_in_hull(points: &[Vector], x: &[f64]) -> (Vector, f64) {
    let dim = x.len();
    let shifted: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.0.iter().zip(x).map(|(a, b)| a - b).collect())
        .collect();
    let scale2 = shifted
        .iter()
        .map(|p| dot(p, p))
        .fold(0.0, f64::max)
        .max(1e-300);

    let combine = |set: &[usize], w: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for (&i, &l) in set.iter().zip(w) {
            for (o, v) in out.iter_mut().zip(&shifted[i]) {
                *o += l * v;
            }
        }
        out
    };

    let start = (0..shifted.len())
        .min_by(|&a, &b| {
            dot(&shifted[a], &shifted[a])
                .partial_cmp(&dot(&shifted[b], &shifted[b]))
                .unwrap()
        })
        .unwrap();
    let mut set = vec![start];
    let mut lambda = vec![1.0];
    let mut w = shifted[start].clone();

    for _major in 0..200 {
        let ww = dot(&w, &w);
        let (j, wj) = (0..shifted.len())
            .map(|j| (j, dot(&w, &shifted[j])))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if ww - wj <= 1e-14 * scale2 || set.contains(&j) || set.len() > dim {
            break;
        }
        set.push(j);
        lambda.push(0.0);
        loop {
            let Some(alpha) = affine_min_norm(&shifted, &set) else {
                // degenerate affine hull: drop the newest point and stop improving
                set.pop();
                lambda.pop();
                return finish(x, &combine(&set, &lambda));
            };
            if alpha.iter().all(|&a| a > 1e-14) {
                lambda = alpha;
                break;
            }
            let mut theta: f64 = 1.0;
            for (l, a) in lambda.iter().zip(&alpha) {
                if *a <= 1e-14 {
                    let denom = l - a;
                    if denom > 0.0 {
                        theta = theta.min(l / denom);
                    }
                }
            }
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l = (1.0 - theta) * *l + theta * a;
            }
            let mut k = 0;
            while k < set.len() {
                if lambda[k] <= 1e-14 {
                    set.remove(k);
                    lambda.remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
        }
        w = combine(&set, &lambda);
    }
    finish(x, &w)
}

fn finish(x: &[f64], w: &[f64]) -> (Vector, f64) {
    let nearest = Vector(w.iter().zip(x).map(|(a, b)| a + b).collect());
    (nearest, norm(w))
}

/// Weights `alpha` (summing to one) of the min-norm point of `aff{points[set]}`.
fn affine_min_norm(points: &[Vec<f64>], set: &[usize]) -> Option<Vec<f64>> {
    let k = set.len();
    if k == 1 {
        return Some(vec![1.0]);
    }
    // [G 1; 1^T 0] [alpha; mu] = [0; 1]
    let mut m = DMatrix::zeros(k + 1, k + 1);
    for a in 0..k {
        for b in 0..k {
            m[(a, b)] = dot(&points[set[a]], &points[set[b]]);
        }
        m[(a, k)] = 1.0;
        m[(k, a)] = 1.0;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = m.lu().solve(&rhs)?;
    let alpha: Vec<f64> = sol.iter().take(k).copied().collect();
    if alpha.iter().any(|a| !a.is_finite()) {
        return None;
    }
    Some(alpha)
}
