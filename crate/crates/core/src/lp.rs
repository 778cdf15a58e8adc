//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Sized for the small programs that appear here: a few dozen variables and
//! rows. All variables are non-negative.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::math::abs;

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;
/// Phase-one objective above this value means infeasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Optimal phase-one objective (sum of artificial variables).
    pub infeasibility: f64,
    pub iterations: usize,
}

/// `minimize c.x subject to rows, x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<f64>,
    rows: Vec<(Vec<f64>, Relation, f64)>,
    max_iterations: usize,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            max_iterations: 50_000,
        }
    }

    pub fn minimize(&mut self, c: &[f64]) -> Result<&mut Self> {
        if c.len() != self.num_vars {
            return Err(domain!("objective has {} entries, expected {}", c.len(), self.num_vars));
        }
        self.objective = c.to_vec();
        Ok(self)
    }

    pub fn add_row(&mut self, coeffs: &[f64], rel: Relation, rhs: f64) -> Result<&mut Self> {
        if coeffs.len() != self.num_vars {
            return Err(domain!("row has {} entries, expected {}", coeffs.len(), self.num_vars));
        }
        if !rhs.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(domain!("non-finite LP coefficient"));
        }
        self.rows.push((coeffs.to_vec(), rel, rhs));
        Ok(self)
    }

    pub fn with_max_iterations(mut self, cap: usize) -> Self {
        self.max_iterations = cap;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn solve(&self) -> Result<LpSolution> {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    m: usize,
    /// Total columns excluding the right-hand side.
    cols: usize,
    n: usize,
    first_artificial: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
    active: Vec<bool>,
    iterations: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let n = lp.num_vars;
        let slacks = lp.rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let first_artificial = n + slacks;
        let cols = first_artificial + m;
        let width = cols + 1;
        let mut t = vec![0.0; m * width];
        let mut basis = vec![0; m];
        let mut slack = n;
        for (i, (a, rel, b)) in lp.rows.iter().enumerate() {
            let sign = if *b < 0.0 { -1.0 } else { 1.0 };
            let row = &mut t[i * width..(i + 1) * width];
            for j in 0..n {
                row[j] = sign * a[j];
            }
            row[cols] = sign * b;
            match rel {
                Relation::Le => {
                    row[slack] = sign;
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -sign;
                    slack += 1;
                }
                Relation::Eq => {}
            }
            row[first_artificial + i] = 1.0;
            basis[i] = first_artificial + i;
        }
        Tableau { m, cols, n, first_artificial, t, basis, active: vec![true; m], iterations: 0 }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.cols + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let width = self.cols + 1;
        let p = self.at(r, c);
        for j in 0..width {
            self.t[r * width + j] /= p;
        }
        for i in 0..self.m {
            if i == r || !self.active[i] {
                continue;
            }
            let f = self.at(i, c);
            if f == 0.0 {
                continue;
            }
            for j in 0..width {
                let v = self.t[r * width + j];
                self.t[i * width + j] -= f * v;
            }
            self.t[i * width + c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations for cost vector `cost`; columns `>= allowed` never enter.
    fn optimize(&mut self, cost: &[f64], allowed: usize, cap: usize) -> Result<bool> {
        loop {
            if self.iterations >= cap {
                return Err(Error::Solver(alloc::format!("simplex iteration cap {cap} reached")));
            }
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.iter().enumerate().any(|(i, &b)| self.active[i] && b == j) {
                    continue;
                }
                let mut d = cost[j];
                for i in 0..self.m {
                    if self.active[i] {
                        d -= cost[self.basis[i]] * self.at(i, j);
                    }
                }
                if d < -COST_TOL {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return Ok(true) };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                if !self.active[i] {
                    continue;
                }
                let a = self.at(i, c);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-14
                                || (abs(ratio - br) <= 1e-14 && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = best else { return Ok(false) };
            self.pivot(r, c);
            self.iterations += 1;
        }
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpSolution> {
        let cap = lp.max_iterations;
        let mut phase1 = vec![0.0; self.cols];
        for c in phase1.iter_mut().skip(self.first_artificial) {
            *c = 1.0;
        }
        self.optimize(&phase1, self.cols, cap)?;
        let infeasibility: f64 = (0..self.m)
            .filter(|&i| self.basis[i] >= self.first_artificial)
            .map(|i| self.rhs(i))
            .sum();
        let scale = lp.rows.iter().map(|r| abs(r.2)).fold(1.0, f64::max);
        if infeasibility > FEASIBILITY_TOL * scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![0.0; self.n],
                objective: f64::NAN,
                infeasibility,
                iterations: self.iterations,
            });
        }
        for i in 0..self.m {
            if self.basis[i] < self.first_artificial {
                continue;
            }
            let col = (0..self.first_artificial).find(|&j| abs(self.at(i, j)) > 1e-9);
            match col {
                Some(j) => self.pivot(i, j),
                None => self.active[i] = false,
            }
        }
        let mut cost = vec![0.0; self.cols];
        cost[..self.n].copy_from_slice(&lp.objective);
        let bounded = self.optimize(&cost, self.first_artificial, cap)?;
        let mut x = vec![0.0; self.n];
        for i in 0..self.m {
            if self.active[i] && self.basis[i] < self.n {
                x[self.basis[i]] = self.rhs(i).max(0.0);
            }
        }
        let objective = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
        Ok(LpSolution {
            status: if bounded { LpStatus::Optimal } else { LpStatus::Unbounded },
            x,
            objective,
            infeasibility,
            iterations: self.iterations,
        })
    }
}
