//! Finite translate packings and their contact graphs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::body::ConvexBody;
use crate::error::{invalid, precondition, Error, Result};
use crate::tolerances::Tolerances;
use crate::vector::{check_same_dim, Vector};

/// Translates `x_i + K` of one body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PackingSpec", into = "PackingSpec")]
pub struct Packing {
    body: ConvexBody,
    centers: Vec<Vector>,
    /// `K_o`, which decides overlaps and contacts.
    symmetric: ConvexBody,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PackingSpec {
    pub body: ConvexBody,
    pub centers: Vec<Vector>,
}

impl TryFrom<PackingSpec> for Packing {
    type Error = Error;
    fn try_from(spec: PackingSpec) -> Result<Self> {
        Packing::new(spec.body, spec.centers)
    }
}

impl From<Packing> for PackingSpec {
    fn from(p: Packing) -> Self {
        PackingSpec {
            body: p.body,
            centers: p.centers,
        }
    }
}

impl Packing {
    pub fn new(body: ConvexBody, centers: Vec<Vector>) -> Result<Self> {
        if centers.is_empty() {
            return Err(invalid("a packing needs at least one translate"));
        }
        for c in &centers {
            check_same_dim(body.dim(), &c.0, "center")?;
            if !c.is_finite() {
                return Err(invalid("centers must be finite"));
            }
        }
        let symmetric = body.minkowski_symmetrize()?;
        Ok(Packing {
            body,
            centers,
            symmetric,
        })
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn symmetric_body(&self) -> &ConvexBody {
        &self.symmetric
    }

    pub fn centers(&self) -> &[Vector] {
        &self.centers
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    /// `||x_i - x_j||_{K_o}`; the translates touch when this equals 2.
    pub fn pair_gauge(&self, i: usize, j: usize) -> f64 {
        self.symmetric.gauge(&(&self.centers[i] - &self.centers[j]))
    }

    /// The same centers with `K` replaced by `K_o`.
    pub fn symmetrized(&self) -> Packing {
        Packing {
            body: self.symmetric.clone(),
            centers: self.centers.clone(),
            symmetric: self.symmetric.clone(),
        }
    }

    /// Sub-packing on the given member indices.
    pub fn subpacking(&self, members: &[usize]) -> Packing {
        Packing {
            body: self.body.clone(),
            centers: members.iter().map(|&i| self.centers[i].clone()).collect(),
            symmetric: self.symmetric.clone(),
        }
    }

    fn pair_gauges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.len();
        (0..n)
            .into_par_iter()
            .flat_map_iter(|i| (i + 1..n).map(move |j| (i, j, self.pair_gauge(i, j))))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Overlap {
    pub i: usize,
    pub j: usize,
    pub gauge: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingReport {
    pub valid: bool,
    pub violations: Vec<Overlap>,
}

pub fn check_packing(p: &Packing) -> PackingReport {
    check_packing_tol(p, Tolerances::default().touch)
}

pub fn check_packing_tol(p: &Packing, touch_tol: f64) -> PackingReport {
    let violations: Vec<Overlap> = p
        .pair_gauges()
        .into_iter()
        .filter(|&(_, _, g)| g < 2.0 - touch_tol)
        .map(|(i, j, gauge)| Overlap { i, j, gauge })
        .collect();
    PackingReport {
        valid: violations.is_empty(),
        violations,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContactGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl ContactGraph {
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }
}

pub fn contact_graph(p: &Packing) -> Result<ContactGraph> {
    contact_graph_tol(p, Tolerances::default().touch)
}

pub fn contact_graph_tol(p: &Packing, touch_tol: f64) -> Result<ContactGraph> {
    let gauges = p.pair_gauges();
    if let Some(&(i, j, g)) = gauges.iter().find(|&&(_, _, g)| g < 2.0 - touch_tol) {
        return Err(precondition(format!(
            "not a packing: members {i} and {j} overlap (gauge {g})"
        )));
    }
    Ok(ContactGraph {
        n: p.len(),
        edges: gauges
            .into_iter()
            .filter(|&(_, _, g)| (g - 2.0).abs() <= touch_tol)
            .map(|(i, j, _)| (i, j))
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContactStatistics {
    pub contact_number: usize,
    pub max_degree: usize,
    /// `degree_histogram[k]` members have exactly `k` contacts.
    pub degree_histogram: Vec<usize>,
}

pub fn contact_statistics(g: &ContactGraph) -> ContactStatistics {
    let deg = g.degrees();
    let max_degree = deg.iter().copied().max().unwrap_or(0);
    let mut degree_histogram = vec![0; max_degree + 1];
    for d in deg {
        degree_histogram[d] += 1;
    }
    ContactStatistics {
        contact_number: g.edges.len(),
        max_degree,
        degree_histogram,
    }
}
