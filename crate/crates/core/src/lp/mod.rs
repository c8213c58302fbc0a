//! A small dense two-phase simplex solver.
//!
//! Instances in this crate are tiny (a few dozen rows and columns), so the
//! solver keeps a full tableau and pivots with Bland's rule, which guarantees
//! termination in exact arithmetic. The tableau is generic over [`LpScalar`]:
//! with `f64` it is a floating simplex with an absolute pivot epsilon, with
//! `BigRational` or [`Surd3`] every pivot is exact.

mod scalar;

pub use scalar::{rational, LpScalar, Surd3, F64_PIVOT_EPS};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("infeasible")]
    Infeasible,
    #[error("unbounded")]
    Unbounded,
    #[error("iteration limit reached")]
    IterationLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
struct Row<T> {
    coeffs: Vec<T>,
    rel: Relation,
    rhs: T,
}

/// `maximize c·x` subject to linear rows; variables are nonnegative unless
/// marked free.
#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    num_vars: usize,
    free: Vec<bool>,
    objective: Vec<T>,
    rows: Vec<Row<T>>,
    feasibility_tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
}

const MAX_PIVOTS: usize = 100_000;

impl<T: LpScalar> LinearProgram<T> {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            free: vec![false; num_vars],
            objective: vec![T::zero(); num_vars],
            rows: Vec::new(),
            feasibility_tol: 1e-9,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.free[var] = true;
        self
    }

    pub fn set_all_free(&mut self) -> &mut Self {
        self.free.iter_mut().for_each(|f| *f = true);
        self
    }

    pub fn maximize(&mut self, c: Vec<T>) -> &mut Self {
        assert_eq!(c.len(), self.num_vars);
        self.objective = c;
        self
    }

    /// Phase-one residual above which the program is declared infeasible
    /// (ignored by exact scalar types).
    pub fn feasibility_tolerance(&mut self, tol: f64) -> &mut Self {
        self.feasibility_tol = tol;
        self
    }

    pub fn constraint(&mut self, coeffs: Vec<T>, rel: Relation, rhs: T) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars);
        self.rows.push(Row { coeffs, rel, rhs });
        self
    }

    pub fn solve(&self) -> Result<LpSolution<T>, LpError> {
        Tableau::build(self).solve(self)
    }

    /// Phase one only: whether the constraints admit a point.
    pub fn is_feasible(&self) -> bool {
        let mut tab = Tableau::build(self);
        tab.phase_one(self.feasibility_tol).is_ok()
    }
}

/// Column layout: structural columns (free variables split in two), then one
/// slack per inequality row, then one artificial per row that needs one.
struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    num_struct: usize,
    first_artificial: usize,
    num_cols: usize,
    /// For each original variable, its (positive, optional negative) column.
    var_cols: Vec<(usize, Option<usize>)>,
}

impl<T: LpScalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>) -> Self {
        let mut var_cols = Vec::with_capacity(lp.num_vars);
        let mut num_struct = 0;
        for &free in &lp.free {
            if free {
                var_cols.push((num_struct, Some(num_struct + 1)));
                num_struct += 2;
            } else {
                var_cols.push((num_struct, None));
                num_struct += 1;
            }
        }
        let num_slack = lp.rows.iter().filter(|r| r.rel != Relation::Eq).count();
        let m = lp.rows.len();

        // normalize rows to nonnegative rhs
        let mut normalized = Vec::with_capacity(m);
        for row in &lp.rows {
            let mut coeffs = vec![T::zero(); num_struct];
            for (v, c) in row.coeffs.iter().enumerate() {
                let (p, n) = var_cols[v];
                coeffs[p] = c.clone();
                if let Some(n) = n {
                    coeffs[n] = c.neg();
                }
            }
            let (coeffs, rel, rhs) = if row.rhs.is_negative() {
                let flipped = match row.rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (
                    coeffs.iter().map(|c| c.neg()).collect::<Vec<_>>(),
                    flipped,
                    row.rhs.neg(),
                )
            } else {
                (coeffs, row.rel, row.rhs.clone())
            };
            normalized.push((coeffs, rel, rhs));
        }
        let num_art = normalized
            .iter()
            .filter(|(_, rel, _)| *rel != Relation::Le)
            .count();
        let first_artificial = num_struct + num_slack;
        let num_cols = first_artificial + num_art;

        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack = num_struct;
        let mut art = first_artificial;
        for (coeffs, rel, b) in normalized {
            let mut r = coeffs;
            r.resize(num_cols, T::zero());
            match rel {
                Relation::Le => {
                    r[slack] = T::one();
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    r[slack] = T::one().neg();
                    slack += 1;
                    r[art] = T::one();
                    basis.push(art);
                    art += 1;
                }
                Relation::Eq => {
                    r[art] = T::one();
                    basis.push(art);
                    art += 1;
                }
            }
            rows.push(r);
            rhs.push(b);
        }
        Tableau {
            rows,
            rhs,
            basis,
            num_struct,
            first_artificial,
            num_cols,
            var_cols,
        }
    }

    fn pivot(&mut self, r: usize, c: usize, obj: &mut [T], obj_val: &mut T) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.div(&p);
        }
        self.rhs[r] = self.rhs[r].div(&p);
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][c].clone();
            if factor.is_zero() {
                if factor != T::zero() {
                    self.rows[i][c] = T::zero();
                }
                continue;
            }
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                *v = v.sub(&factor.mul(pv));
            }
            self.rows[i][c] = T::zero();
            self.rhs[i] = self.rhs[i].sub(&factor.mul(&pivot_rhs));
            if self.rhs[i].is_negative() && self.rhs[i].sub(&T::zero()).to_f64() > -1e-9 {
                // clamp floating round-off that would break primal feasibility
                self.rhs[i] = T::zero();
            }
        }
        let factor = obj[c].clone();
        if !factor.is_zero() {
            for (v, pv) in obj.iter_mut().zip(&pivot_row) {
                *v = v.sub(&factor.mul(pv));
            }
            *obj_val = obj_val.sub(&factor.mul(&pivot_rhs));
        }
        obj[c] = T::zero();
        self.basis[r] = c;
    }

    /// Maximize with reduced-cost row `obj` (entering columns have positive entries).
    fn optimize(&mut self, obj: &mut [T], obj_val: &mut T, allowed: usize) -> Result<(), LpError> {
        for _ in 0..MAX_PIVOTS {
            let Some(c) = (0..allowed).find(|&j| obj[j].is_positive()) else {
                return Ok(());
            };
            let mut best: Option<(usize, T)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs[r].div(a);
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, bratio)) => {
                        if ratio.lt(&bratio)
                            || (!bratio.lt(&ratio) && self.basis[r] < self.basis[br])
                        {
                            Some((r, ratio))
                        } else {
                            Some((br, bratio))
                        }
                    }
                };
            }
            let Some((r, _)) = best else {
                return Err(LpError::Unbounded);
            };
            self.pivot(r, c, obj, obj_val);
        }
        Err(LpError::IterationLimit)
    }

    fn phase_one(&mut self, tol: f64) -> Result<(), LpError> {
        if self.first_artificial == self.num_cols {
            return Ok(());
        }
        // maximize -(sum of artificials); reduced costs c_j - c_B B^-1 A_j
        let mut obj = vec![T::zero(); self.num_cols];
        let mut val = T::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            if b >= self.first_artificial {
                for j in 0..self.num_cols {
                    obj[j] = obj[j].add(&self.rows[r][j]);
                }
                val = val.add(&self.rhs[r]);
            }
        }
        for j in self.first_artificial..self.num_cols {
            obj[j] = T::zero();
        }
        // `val` tracks the remaining artificial mass (negated objective)
        let mut neg_val = val.neg();
        let cols = self.num_cols;
        self.optimize(&mut obj, &mut neg_val, cols)?;
        let residual: T = self
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= self.first_artificial)
            .fold(T::zero(), |acc, (r, _)| acc.add(&self.rhs[r]));
        if residual.exceeds(tol) {
            return Err(LpError::Infeasible);
        }
        // drive zero-level artificials out of the basis where possible
        for r in 0..self.rows.len() {
            if self.basis[r] < self.first_artificial {
                continue;
            }
            if let Some(c) = (0..self.first_artificial).find(|&j| !self.rows[r][j].is_zero()) {
                let mut dummy = vec![T::zero(); self.num_cols];
                let mut dv = T::zero();
                self.rhs[r] = T::zero();
                self.pivot(r, c, &mut dummy, &mut dv);
            }
        }
        Ok(())
    }

    fn solve(mut self, lp: &LinearProgram<T>) -> Result<LpSolution<T>, LpError> {
        self.phase_one(lp.feasibility_tol)?;
        let mut cost = vec![T::zero(); self.num_cols];
        for (v, c) in lp.objective.iter().enumerate() {
            let (p, n) = self.var_cols[v];
            cost[p] = c.clone();
            if let Some(n) = n {
                cost[n] = c.neg();
            }
        }
        let mut obj = cost.clone();
        let mut val = T::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost[b].clone();
            if cb.is_zero() && cb == T::zero() {
                continue;
            }
            for j in 0..self.num_cols {
                obj[j] = obj[j].sub(&cb.mul(&self.rows[r][j]));
            }
            val = val.sub(&cb.mul(&self.rhs[r]));
        }
        let allowed = self.first_artificial;
        self.optimize(&mut obj, &mut val, allowed)?;

        let mut col_val = vec![T::zero(); self.num_cols];
        for (r, &b) in self.basis.iter().enumerate() {
            col_val[b] = self.rhs[r].clone();
        }
        let x: Vec<T> = self
            .var_cols
            .iter()
            .map(|&(p, n)| match n {
                Some(n) => col_val[p].sub(&col_val[n]),
                None => col_val[p].clone(),
            })
            .collect();
        let objective = lp
            .objective
            .iter()
            .zip(&x)
            .fold(T::zero(), |acc, (c, v)| acc.add(&c.mul(v)));
        debug_assert!(self.num_struct <= self.num_cols);
        Ok(LpSolution { x, objective })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::<f64>::new(2);
        lp.maximize(vec![3.0, 5.0])
            .constraint(vec![1.0, 0.0], Relation::Le, 4.0)
            .constraint(vec![0.0, 2.0], Relation::Le, 12.0)
            .constraint(vec![3.0, 2.0], Relation::Le, 18.0);
        let s = lp.solve().unwrap();
        assert!((s.objective - 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn exact_rational_matches_float() {
        let mut lp = LinearProgram::<BigRational>::new(2);
        lp.maximize(vec![rational(3, 1), rational(5, 1)])
            .constraint(
                vec![rational(1, 1), rational(0, 1)],
                Relation::Le,
                rational(4, 1),
            )
            .constraint(
                vec![rational(0, 1), rational(2, 1)],
                Relation::Le,
                rational(12, 1),
            )
            .constraint(
                vec![rational(3, 1), rational(2, 1)],
                Relation::Le,
                rational(18, 1),
            );
        let s = lp.solve().unwrap();
        assert_eq!(s.objective, rational(36, 1));
    }

    #[test]
    fn free_variables_and_equalities() {
        // min x + y (i.e. max -x - y) s.t. x - y = -3, x >= -5 free -> x = -5, y = -2
        let mut lp = LinearProgram::<f64>::new(2);
        lp.set_all_free()
            .maximize(vec![-1.0, -1.0])
            .constraint(vec![1.0, -1.0], Relation::Eq, -3.0)
            .constraint(vec![1.0, 0.0], Relation::Ge, -5.0)
            .constraint(vec![0.0, 1.0], Relation::Ge, -5.0);
        let s = lp.solve().unwrap();
        assert!((s.x[0] + 5.0).abs() < 1e-9, "{:?}", s);
        assert!((s.x[1] + 2.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::<f64>::new(1);
        lp.constraint(vec![1.0], Relation::Ge, 2.0)
            .constraint(vec![1.0], Relation::Le, 1.0);
        assert_eq!(lp.solve().unwrap_err(), LpError::Infeasible);
        assert!(!lp.is_feasible());

        let mut lp = LinearProgram::<f64>::new(1);
        lp.maximize(vec![1.0])
            .constraint(vec![1.0], Relation::Ge, 0.0);
        assert_eq!(lp.solve().unwrap_err(), LpError::Unbounded);
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's classic cycling instance; Bland's rule must terminate.
        let mut lp = LinearProgram::<BigRational>::new(4);
        lp.maximize(vec![
            rational(3, 4),
            rational(-150, 1),
            rational(1, 50),
            rational(-6, 1),
        ])
        .constraint(
            vec![
                rational(1, 4),
                rational(-60, 1),
                rational(-1, 25),
                rational(9, 1),
            ],
            Relation::Le,
            rational(0, 1),
        )
        .constraint(
            vec![
                rational(1, 2),
                rational(-90, 1),
                rational(-1, 50),
                rational(3, 1),
            ],
            Relation::Le,
            rational(0, 1),
        )
        .constraint(
            vec![
                rational(0, 1),
                rational(0, 1),
                rational(1, 1),
                rational(0, 1),
            ],
            Relation::Le,
            rational(1, 1),
        );
        let s = lp.solve().unwrap();
        assert_eq!(s.objective, rational(1, 20));
    }
}
