//! Polytopes of distributions described by linear inequalities.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::math::abs;
use crate::prob::Distribution;

/// Membership tolerance used unless overridden.
pub const DEFAULT_TOL: f64 = 1e-9;

/// `<coeffs, P> <= bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub coeffs: Vec<f64>,
    pub bound: f64,
}

impl HalfSpace {
    pub fn new(coeffs: Vec<f64>, bound: f64) -> Self {
        HalfSpace { coeffs, bound }
    }

    pub fn value(&self, p: &[f64]) -> f64 {
        self.coeffs.iter().zip(p).map(|(c, x)| c * x).sum()
    }

    pub fn min_coeff(&self) -> f64 {
        self.coeffs.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn span(&self) -> f64 {
        self.max_coeff() - self.min_coeff()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub inside: bool,
    /// Smallest `bound - <c, P>` over the inequalities; `+inf` when there are none.
    pub slack: f64,
}

/// Intersection of the probability simplex with finitely many half-spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet {
    dim: usize,
    halfspaces: Vec<HalfSpace>,
    tol: f64,
}

impl ConstraintSet {
    /// Validates dimensions and rejects empty polytopes.
    pub fn new(dim: usize, halfspaces: Vec<HalfSpace>) -> Result<Self> {
        if dim == 0 || dim > 256 {
            return Err(domain!("constraint dimension {dim} outside 1..=256"));
        }
        for h in &halfspaces {
            if h.coeffs.len() != dim {
                return Err(domain!("inequality has {} coefficients, expected {dim}", h.coeffs.len()));
            }
            if !h.bound.is_finite() || h.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(domain!("non-finite inequality"));
            }
        }
        let cs = ConstraintSet { dim, halfspaces, tol: DEFAULT_TOL };
        if cs.feasible_point()?.is_none() {
            return Err(domain!("constraint set is empty"));
        }
        Ok(cs)
    }

    pub fn full_simplex(dim: usize) -> Result<Self> {
        ConstraintSet::new(dim, Vec::new())
    }

    /// Binary alphabet with `P(1) <= cap`.
    pub fn weight_cap(cap: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&cap) {
            return Err(domain!("weight cap {cap} outside [0,1]"));
        }
        ConstraintSet::new(2, vec![HalfSpace::new(vec![0.0, 1.0], cap)])
    }

    /// The single distribution concentrated on `k`.
    pub fn point_mass(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(domain!("point mass index {k} outside dimension {dim}"));
        }
        let hs = (0..dim)
            .filter(|&j| j != k)
            .map(|j| {
                let mut c = vec![0.0; dim];
                c[j] = 1.0;
                HalfSpace::new(c, 0.0)
            })
            .collect();
        ConstraintSet::new(dim, hs)
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn member(&self, p: &Distribution) -> Result<Membership> {
        if p.dim() != self.dim {
            return Err(domain!("distribution has dimension {}, set has {}", p.dim(), self.dim));
        }
        Ok(self.member_slice(p.probs()))
    }

    pub(crate) fn member_slice(&self, p: &[f64]) -> Membership {
        let slack = self
            .halfspaces
            .iter()
            .map(|h| h.bound - h.value(p))
            .fold(f64::INFINITY, f64::min);
        Membership { inside: slack >= -self.tol, slack }
    }

    pub fn contains(&self, p: &Distribution) -> bool {
        self.member(p).map(|m| m.inside).unwrap_or(false)
    }

    /// Conservative L1 radius of a ball around `p` (within the simplex) that stays
    /// inside the set. Infinite when there are no inequalities.
    pub fn interior_margin(&self, p: &Distribution) -> f64 {
        let mut margin = f64::INFINITY;
        for h in &self.halfspaces {
            let slack = h.bound - h.value(p.probs());
            let span = h.span();
            let r = if span <= 0.0 {
                if slack >= 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                2.0 * slack / span
            };
            margin = margin.min(r);
        }
        margin
    }

    fn base_lp(&self) -> Result<LinearProgram> {
        let mut lp = LinearProgram::new(self.dim);
        lp.add_row(&vec![1.0; self.dim], Relation::Eq, 1.0)?;
        for h in &self.halfspaces {
            lp.add_row(&h.coeffs, Relation::Le, h.bound)?;
        }
        Ok(lp)
    }

    pub fn feasible_point(&self) -> Result<Option<Distribution>> {
        let s = self.base_lp()?.solve()?;
        if s.status == LpStatus::Infeasible {
            return Ok(None);
        }
        Ok(Some(Distribution::from_weights(s.x)?))
    }

    /// `max <objective, P>` over the set, with a maximizer.
    pub fn maximize(&self, objective: &[f64]) -> Result<(f64, Distribution)> {
        let neg: Vec<f64> = objective.iter().map(|c| -c).collect();
        let (v, p) = self.minimize(&neg)?;
        Ok((-v, p))
    }

    /// `min <objective, P>` over the set, with a minimizer.
    pub fn minimize(&self, objective: &[f64]) -> Result<(f64, Distribution)> {
        let mut lp = self.base_lp()?;
        lp.minimize(objective)?;
        let s = lp.solve()?;
        match s.status {
            LpStatus::Optimal => Ok((s.objective, Distribution::from_weights(s.x)?)),
            LpStatus::Infeasible => Err(domain!("constraint set is empty")),
            LpStatus::Unbounded => Err(Error::Solver("bounded LP reported unbounded".into())),
        }
    }

    /// Vertices of the polytope, found by solving every candidate tight system.
    pub fn vertices(&self) -> Vec<Distribution> {
        let d = self.dim;
        let total = d + self.halfspaces.len();
        let mut out: Vec<Vec<f64>> = Vec::new();
        let mut subset: Vec<usize> = (0..d.saturating_sub(1)).collect();
        loop {
            if let Some(p) = self.solve_tight(&subset) {
                if self.member_slice(&p).inside
                    && p.iter().all(|&x| x >= -1e-9)
                    && !out.iter().any(|q| q.iter().zip(&p).all(|(a, b)| abs(a - b) < 1e-9))
                {
                    out.push(p);
                }
            }
            if !next_combination(&mut subset, total) {
                break;
            }
        }
        out.into_iter()
            .map(|p| {
                let clipped = p.into_iter().map(|x| x.max(0.0)).collect();
                Distribution::from_weights(clipped).expect("vertex has positive mass")
            })
            .collect()
    }

    fn solve_tight(&self, subset: &[usize]) -> Option<Vec<f64>> {
        let d = self.dim;
        let mut a = vec![0.0; d * (d + 1)];
        for j in 0..d {
            a[j] = 1.0;
        }
        a[d] = 1.0;
        for (r, &k) in subset.iter().enumerate() {
            let row = &mut a[(r + 1) * (d + 1)..(r + 2) * (d + 1)];
            if k < d {
                row[k] = 1.0;
            } else {
                let h = &self.halfspaces[k - d];
                row[..d].copy_from_slice(&h.coeffs);
                row[d] = h.bound;
            }
        }
        gauss_solve(&mut a, d)
    }

    /// Lattice points `k / resolution` of the simplex that lie in the set.
    pub fn grid_points(&self, resolution: usize) -> Vec<Distribution> {
        let resolution = resolution.max(1);
        let mut out = Vec::new();
        let mut comp = vec![0usize; self.dim];
        compositions(resolution, 0, &mut comp, &mut |c| {
            let p: Vec<f64> = c.iter().map(|&k| k as f64 / resolution as f64).collect();
            if self.member_slice(&p).inside {
                out.push(Distribution::new(p).expect("lattice point"));
            }
        });
        out
    }
}

fn compositions(remaining: usize, idx: usize, comp: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    let last = comp.len() - 1;
    if idx == last {
        comp[idx] = remaining;
        f(comp);
        return;
    }
    for k in 0..=remaining {
        comp[idx] = k;
        compositions(remaining - k, idx + 1, comp, f);
    }
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Solves the `d x d` augmented system in place; `None` when singular.
pub(crate) fn gauss_solve(a: &mut [f64], d: usize) -> Option<Vec<f64>> {
    let w = d + 1;
    for col in 0..d {
        let piv = (col..d).max_by(|&i, &j| abs(a[i * w + col]).total_cmp(&abs(a[j * w + col])))?;
        if abs(a[piv * w + col]) < 1e-10 {
            return None;
        }
        if piv != col {
            for j in 0..w {
                a.swap(piv * w + j, col * w + j);
            }
        }
        for i in 0..d {
            if i == col {
                continue;
            }
            let f = a[i * w + col] / a[col * w + col];
            if f != 0.0 {
                for j in col..w {
                    a[i * w + j] -= f * a[col * w + j];
                }
            }
        }
    }
    Some((0..d).map(|i| a[i * w + d] / a[i * w + i]).collect())
}
