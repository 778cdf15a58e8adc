//! Symmetrizability of input distributions and the enlarged input set used
//! when state windows are shorter than input windows.
//!
//! An input distribution `P` is symmetrizable for `(W, Lambda)` when some
//! stochastic map `U(s|x)` makes `sum_s U(s|x') W(y|x,s)` symmetric in
//! `(x, x')` for every `y` while the induced state marginal
//! `sum_x P(x) U(.|x)` lies in `Lambda`. Feasibility is a linear program.

use alloc::vec;
use alloc::vec::Vec;

use crate::constraint::{ConstraintSet, HalfSpace};
use crate::error::{domain, Result};
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::math::abs;
use crate::prob::{Channel, Distribution};

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrizabilityResult {
    pub symmetrizable: bool,
    /// `witness[x]` is `U(.|x)`; present when symmetrizable.
    pub witness: Option<Vec<Distribution>>,
    /// Largest violation of the defining constraints by the witness (0 when absent).
    pub residual: f64,
    /// Induced state marginal of the witness.
    pub marginal: Option<Distribution>,
}

/// Decides symmetrizability of `p_x` by LP feasibility over `U(s|x)`.
///
/// Among feasible maps the solver returns one whose state marginal has the
/// smallest normalized constraint cost, which gives the identity map for the
/// binary bit-flip channel.
pub fn ecn_symmetrizable(p_x: &Distribution, w: &Channel, lambda: &ConstraintSet) -> Result<SymmetrizabilityResult> {
    let (nx, ns, ny) = (w.nx(), w.ns(), w.ny());
    if p_x.dim() != nx || lambda.dim() != ns {
        return Err(domain!(
            "dimension mismatch: P has {}, Lambda has {}, channel is {}x{}",
            p_x.dim(),
            lambda.dim(),
            nx,
            ns
        ));
    }
    let nv = nx * ns;
    let mut lp = LinearProgram::new(nv);
    for x in 0..nx {
        for xp in x + 1..nx {
            for y in 0..ny {
                let mut row = vec![0.0; nv];
                for s in 0..ns {
                    row[xp * ns + s] += w.prob(y, x, s);
                    row[x * ns + s] -= w.prob(y, xp, s);
                }
                if row.iter().any(|&c| c != 0.0) {
                    lp.add_row(&row, Relation::Eq, 0.0)?;
                }
            }
        }
    }
    for x in 0..nx {
        let mut row = vec![0.0; nv];
        row[x * ns..(x + 1) * ns].iter_mut().for_each(|c| *c = 1.0);
        lp.add_row(&row, Relation::Eq, 1.0)?;
    }
    let mut objective = vec![0.0; nv];
    for h in lambda.halfspaces() {
        let row = marginal_row(p_x, h, ns);
        lp.add_row(&row, Relation::Le, h.bound)?;
        let span = h.span();
        if span > 0.0 {
            for (o, r) in objective.iter_mut().zip(&row) {
                *o += r / span;
            }
        }
    }
    lp.minimize(&objective)?;
    let sol = lp.solve()?;
    if sol.status == LpStatus::Infeasible {
        return Ok(SymmetrizabilityResult { symmetrizable: false, witness: None, residual: 0.0, marginal: None });
    }
    let witness = (0..nx)
        .map(|x| Distribution::from_weights(sol.x[x * ns..(x + 1) * ns].to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let residual = symmetrization_residual(p_x, w, lambda, &witness)?;
    let marginal = state_marginal(p_x, &witness)?;
    Ok(SymmetrizabilityResult { symmetrizable: true, witness: Some(witness), residual, marginal: Some(marginal) })
}

fn marginal_row(p_x: &Distribution, h: &HalfSpace, ns: usize) -> Vec<f64> {
    let mut row = vec![0.0; p_x.dim() * ns];
    for (x, &px) in p_x.probs().iter().enumerate() {
        for s in 0..ns {
            row[x * ns + s] = px * h.coeffs[s];
        }
    }
    row
}

/// `sum_x P(x) U(.|x)`.
pub fn state_marginal(p_x: &Distribution, u: &[Distribution]) -> Result<Distribution> {
    if u.len() != p_x.dim() {
        return Err(domain!("map has {} rows, P has dimension {}", u.len(), p_x.dim()));
    }
    let ns = u[0].dim();
    let mut m = vec![0.0; ns];
    for (row, &px) in u.iter().zip(p_x.probs()) {
        for (acc, &v) in m.iter_mut().zip(row.probs()) {
            *acc += px * v;
        }
    }
    Distribution::from_weights(m)
}

/// Largest violation of symmetry, row-stochasticity and the state constraint.
pub fn symmetrization_residual(
    p_x: &Distribution,
    w: &Channel,
    lambda: &ConstraintSet,
    u: &[Distribution],
) -> Result<f64> {
    let (nx, ns, ny) = (w.nx(), w.ns(), w.ny());
    if u.len() != nx || u.iter().any(|r| r.dim() != ns) {
        return Err(domain!("symmetrizing map has the wrong shape"));
    }
    let mut res: f64 = 0.0;
    for x in 0..nx {
        for xp in 0..nx {
            for y in 0..ny {
                let lhs: f64 = (0..ns).map(|s| u[xp].get(s) * w.prob(y, x, s)).sum();
                let rhs: f64 = (0..ns).map(|s| u[x].get(s) * w.prob(y, xp, s)).sum();
                res = res.max(abs(lhs - rhs));
            }
        }
    }
    for row in u {
        res = res.max(abs(row.probs().iter().sum::<f64>() - 1.0));
    }
    let m = state_marginal(p_x, u)?;
    let slack = lambda.member(&m)?.slack;
    if slack < 0.0 {
        res = res.max(-slack);
    }
    Ok(res)
}

/// Bit-flip channel with input weight `w` and state cap `p`: symmetrizable iff `w <= p`.
pub fn bitflip_symmetrizable(w: f64, p: f64) -> Result<bool> {
    if !(0.0..0.5).contains(&w) || !(0.0..0.5).contains(&p) {
        return Err(domain!("bit-flip parameters ({w}, {p}) must lie in [0, 1/2)"));
    }
    Ok(w <= p)
}

/// Enlarged input set for window ratio `alpha <= 1`.
///
/// Each inequality `<c, P> <= b` is replaced by the condition that some
/// `T2` in the simplex keeps `alpha*T1 + (1-alpha)*T2` inside it, which gives
/// `<c, T1> <= (b - (1-alpha) min_j c_j) / alpha`. Inequalities that become
/// implied by the simplex are dropped. For several inequalities this is an
/// outer description; [`in_gamma_prime`] decides exact membership.
pub fn gamma_prime(gamma: &ConstraintSet, alpha: f64) -> Result<ConstraintSet> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain!("window ratio {alpha} must lie in (0, 1]"));
    }
    if alpha >= 1.0 {
        return Ok(gamma.clone());
    }
    let mut hs = Vec::new();
    for h in gamma.halfspaces() {
        let bound = (h.bound - (1.0 - alpha) * h.min_coeff()) / alpha;
        if bound < h.max_coeff() {
            hs.push(HalfSpace::new(h.coeffs.clone(), bound));
        }
    }
    Ok(ConstraintSet::new(gamma.dim(), hs)?.with_tolerance(gamma.tol()))
}

/// True when some distribution `T2` puts `alpha*t1 + (1-alpha)*T2` inside `gamma`.
pub fn in_gamma_prime(gamma: &ConstraintSet, alpha: f64, t1: &Distribution) -> Result<bool> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain!("window ratio {alpha} must lie in (0, 1]"));
    }
    if t1.dim() != gamma.dim() {
        return Err(domain!("distribution has dimension {}, set has {}", t1.dim(), gamma.dim()));
    }
    if alpha == 1.0 {
        return Ok(gamma.contains(t1));
    }
    let d = gamma.dim();
    let mut lp = LinearProgram::new(d);
    lp.add_row(&vec![1.0; d], Relation::Eq, 1.0)?;
    for h in gamma.halfspaces() {
        let rhs = h.bound + gamma.tol() - alpha * h.value(t1.probs());
        let row: Vec<f64> = h.coeffs.iter().map(|c| (1.0 - alpha) * c).collect();
        lp.add_row(&row, Relation::Le, rhs)?;
    }
    Ok(lp.solve()?.status != LpStatus::Infeasible)
}

/// Largest value of `P(k)` over the set.
pub fn max_coordinate(cs: &ConstraintSet, k: usize) -> Result<f64> {
    let mut c = vec![0.0; cs.dim()];
    if k >= c.len() {
        return Err(domain!("coordinate {k} outside dimension {}", c.len()));
    }
    c[k] = 1.0;
    Ok(cs.maximize(&c)?.0)
}

/// Bit-flip input cap that matters for symmetrizability after enlargement:
/// weights above one half add nothing because the channel treats `P(1)` and
/// `1 - P(1)` alike.
pub fn effective_bitflip_cap(cs: &ConstraintSet) -> Result<f64> {
    if cs.dim() != 2 {
        return Err(domain!("bit-flip cap needs a binary alphabet"));
    }
    Ok(max_coordinate(cs, 1)?.min(0.5))
}

#[derive(Debug, Clone)]
pub struct SymmetrizabilityScan {
    /// Every scanned point with its symmetrizability flag.
    pub points: Vec<(Distribution, bool)>,
}

impl SymmetrizabilityScan {
    pub fn nonsymmetrizable(&self) -> impl Iterator<Item = &Distribution> {
        self.points.iter().filter(|(_, s)| !*s).map(|(p, _)| p)
    }

    pub fn any_nonsymmetrizable(&self) -> bool {
        self.points.iter().any(|(_, s)| !*s)
    }
}

/// Tests lattice points of resolution `resolution` and the vertices of `set`.
/// `keep` filters candidates (for example exact membership of an outer description).
pub fn scan_nonsymmetrizable(
    set: &ConstraintSet,
    w: &Channel,
    lambda: &ConstraintSet,
    resolution: usize,
    keep: &dyn Fn(&Distribution) -> bool,
) -> Result<SymmetrizabilityScan> {
    let mut candidates = set.vertices();
    candidates.extend(set.grid_points(resolution));
    let mut points = Vec::with_capacity(candidates.len());
    for p in candidates {
        if !keep(&p) {
            continue;
        }
        let sym = ecn_symmetrizable(&p, w, lambda)?.symmetrizable;
        points.push((p, sym));
    }
    Ok(SymmetrizabilityScan { points })
}
