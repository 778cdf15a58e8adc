//! List-decoding and oblivious capacities, closed forms and window verdicts.
//!
//! `C_list = max_{P in Gamma} min_{Q in Lambda} I(P, Q)`; mutual information is
//! concave in `P` and convex in `Q`. The inner minimization uses away-step
//! Frank-Wolfe, whose gap gives a lower bound. The outer maximization uses
//! supergradient cutting planes, whose model maximum gives an upper bound.
//! The oblivious capacity restricts `P` to a non-convex set and falls back to
//! a lattice scan plus compass search when the list maximizer is excluded.

mod fw;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::constraint::ConstraintSet;
use crate::error::{domain, Error, Result};
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::math::{abs, log2};
use crate::prob::{binary_convolution, binary_entropy, log2_or_floor, mi_induced, Channel, Distribution};
use crate::spec::WindowedAvcSpec;
use crate::symmetrize::{ecn_symmetrizable, gamma_prime, in_gamma_prime, scan_nonsymmetrizable};

use fw::{FwOutcome, FwProblem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityOptions {
    /// Lattice resolution for the initial scan; 0 picks one from the dimension.
    pub grid_resolution: usize,
    /// Largest accepted `upper - lower`.
    pub gap_tol: f64,
    pub fw_tol: f64,
    pub fw_max_iter: usize,
    /// Cutting planes for the list capacity.
    pub max_cuts: usize,
    /// Budget of objective evaluations for the oblivious search.
    pub max_evaluations: usize,
    /// Compass search stops below this step (L1 scale).
    pub min_step: f64,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        CapacityOptions {
            grid_resolution: 0,
            gap_tol: 1e-4,
            fw_tol: 1e-11,
            fw_max_iter: 2000,
            max_cuts: 400,
            max_evaluations: 20_000,
            min_step: 1e-10,
        }
    }
}

impl CapacityOptions {
    fn resolution(&self, dim: usize) -> usize {
        if self.grid_resolution > 0 {
            return self.grid_resolution;
        }
        match dim {
            0..=2 => 64,
            3 => 24,
            4 => 10,
            _ => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    /// Bits per channel use.
    pub value: f64,
    /// Certified lower bound.
    pub lower: f64,
    /// Certified upper bound.
    pub upper: f64,
    pub argmax_p: Distribution,
    pub argmin_q: Distribution,
    pub duality_gap: f64,
    pub iterations: usize,
}

struct Mi<'a> {
    w: &'a Channel,
}

impl Mi<'_> {
    fn value(&self, p: &[f64], q: &[f64]) -> f64 {
        mi_induced(p, &self.w.induced(q), self.w.ny())
    }

    fn output(&self, p: &[f64], v: &[f64]) -> Vec<f64> {
        let ny = self.w.ny();
        let mut out = vec![0.0; ny];
        for (x, &px) in p.iter().enumerate() {
            for y in 0..ny {
                out[y] += px * v[x * ny + y];
            }
        }
        out
    }

    /// Gradient in `q` of `I(p, V_q)`.
    fn grad_q(&self, p: &[f64], q: &[f64]) -> Vec<f64> {
        let (ns, ny) = (self.w.ns(), self.w.ny());
        let v = self.w.induced(q);
        let out = self.output(p, &v);
        let mut g = vec![0.0; ns];
        for (x, &px) in p.iter().enumerate() {
            if px == 0.0 {
                continue;
            }
            for y in 0..ny {
                let l = log2_or_floor(v[x * ny + y]) - log2_or_floor(out[y]);
                for (s, gs) in g.iter_mut().enumerate() {
                    let wy = self.w.prob(y, x, s);
                    if wy != 0.0 {
                        *gs += px * wy * l;
                    }
                }
            }
        }
        g
    }

    /// Gradient in `p` of `I(p, V_q)` up to an additive constant.
    fn grad_p(&self, p: &[f64], q: &[f64]) -> Vec<f64> {
        let (nx, ny) = (self.w.nx(), self.w.ny());
        let v = self.w.induced(q);
        let out = self.output(p, &v);
        (0..nx)
            .map(|x| {
                (0..ny)
                    .filter(|&y| v[x * ny + y] > 0.0)
                    .map(|y| v[x * ny + y] * (log2(v[x * ny + y]) - log2_or_floor(out[y])))
                    .sum()
            })
            .collect()
    }
}

fn vertex_vecs(cs: &ConstraintSet) -> Vec<Vec<f64>> {
    cs.vertices().into_iter().map(|d| d.probs().to_vec()).collect()
}

struct Solver<'a> {
    mi: Mi<'a>,
    vp: Vec<Vec<f64>>,
    vq: Vec<Vec<f64>>,
    opts: CapacityOptions,
    iterations: core::cell::Cell<usize>,
}

impl<'a> Solver<'a> {
    fn new(w: &'a Channel, gamma: &'a ConstraintSet, lambda: &'a ConstraintSet, opts: CapacityOptions) -> Result<Self> {
        if gamma.dim() != w.nx() || lambda.dim() != w.ns() {
            return Err(domain!(
                "dimension mismatch: Gamma {}, Lambda {}, channel {}x{}",
                gamma.dim(),
                lambda.dim(),
                w.nx(),
                w.ns()
            ));
        }
        Ok(Solver {
            mi: Mi { w },
            vp: vertex_vecs(gamma),
            vq: vertex_vecs(lambda),
            opts,
            iterations: core::cell::Cell::new(0),
        })
    }

    /// `min_Q I(p, Q)` over `Lambda`.
    fn inner(&self, p: &[f64]) -> FwOutcome {
        let prob = FwProblem { vertices: &self.vq, max_iter: self.opts.fw_max_iter, tol: self.opts.fw_tol };
        let f = |q: &[f64]| self.mi.value(p, q);
        let g = |q: &[f64]| self.mi.grad_q(p, q);
        let o = fw::minimize(&prob, &f, &g, None);
        self.iterations.set(self.iterations.get() + o.iterations);
        o
    }
}

/// Maximizes `eval` over `cs` intersected with `admissible`.
fn search(
    cs: &ConstraintSet,
    vertices: &[Vec<f64>],
    admissible: &dyn Fn(&[f64]) -> bool,
    eval: &dyn Fn(&[f64]) -> f64,
    opts: &CapacityOptions,
) -> Option<(Vec<f64>, f64)> {
    let d = cs.dim();
    let res = opts.resolution(d);
    let mut candidates: Vec<Vec<f64>> = vertices.to_vec();
    if !vertices.is_empty() {
        let mut c = vec![0.0; d];
        for v in vertices {
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += vi / vertices.len() as f64;
            }
        }
        candidates.push(c);
    }
    candidates.extend(cs.grid_points(res).into_iter().map(|p| p.probs().to_vec()));
    let mut evals = 0usize;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for c in candidates {
        if !admissible(&c) {
            continue;
        }
        let v = eval(&c);
        evals += 1;
        if best.as_ref().is_none_or(|b| v > b.1) {
            best = Some((c, v));
        }
    }
    let (mut x, mut fx) = best?;
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for j in 0..d {
        for k in 0..d {
            if j != k {
                let mut e = vec![0.0; d];
                e[j] = 1.0;
                e[k] = -1.0;
                dirs.push(e);
            }
        }
    }
    for a in vertices {
        for b in vertices {
            let diff: Vec<f64> = a.iter().zip(b).map(|(u, v)| u - v).collect();
            let norm: f64 = diff.iter().map(|t| abs(*t)).sum();
            if norm > 1e-12 {
                dirs.push(diff.into_iter().map(|t| 2.0 * t / norm).collect());
            }
        }
    }
    let mut h = 1.0 / res as f64;
    while h >= opts.min_step && evals < opts.max_evaluations {
        let mut improved = false;
        for dir in &dirs {
            let y: Vec<f64> = x.iter().zip(dir).map(|(a, b)| a + h * b).collect();
            if y.iter().any(|&t| t < -1e-15) {
                continue;
            }
            let y: Vec<f64> = y.into_iter().map(|t| t.max(0.0)).collect();
            if cs.member_slice(&y).slack < -1e-12 || !admissible(&y) {
                continue;
            }
            let v = eval(&y);
            evals += 1;
            if v > fx + 1e-14 {
                x = y;
                fx = v;
                improved = true;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Some((x, fx))
}

fn to_dist(v: Vec<f64>) -> Result<Distribution> {
    Distribution::from_weights(v)
}

/// Affine upper model of `P -> min_Q I(P, Q)`: `value <= c + g.P` on the simplex.
struct Cut {
    g: Vec<f64>,
    c: f64,
}

fn model_maximum(gamma: &ConstraintSet, cuts: &[Cut], t_cap: f64) -> Result<Option<(Vec<f64>, f64)>> {
    let d = gamma.dim();
    let mut lp = LinearProgram::new(d + 1);
    let mut obj = vec![0.0; d + 1];
    obj[d] = -1.0;
    lp.minimize(&obj)?;
    let mut row = vec![1.0; d + 1];
    row[d] = 0.0;
    lp.add_row(&row, Relation::Eq, 1.0)?;
    for h in gamma.halfspaces() {
        let mut row = h.coeffs.clone();
        row.push(0.0);
        lp.add_row(&row, Relation::Le, h.bound)?;
    }
    let mut row = vec![0.0; d + 1];
    row[d] = 1.0;
    lp.add_row(&row, Relation::Le, t_cap)?;
    for cut in cuts {
        let mut row: Vec<f64> = cut.g.iter().map(|v| -v).collect();
        row.push(1.0);
        lp.add_row(&row, Relation::Le, cut.c)?;
    }
    let sol = lp.solve()?;
    if sol.status != LpStatus::Optimal {
        return Ok(None);
    }
    let p: Vec<f64> = sol.x[..d].iter().map(|v| v.max(0.0)).collect();
    let total: f64 = p.iter().sum();
    Ok(Some((p.into_iter().map(|v| v / total).collect(), sol.x[d])))
}

/// `max_{P in Gamma} min_{Q in Lambda} I(P, Q)` with certified bounds.
///
/// Each query point contributes a supergradient cut built from the inner
/// minimizer, so the cutting-plane model bounds the value from above; the
/// inner Frank-Wolfe gap bounds it from below.
pub fn list_capacity(
    w: &Channel,
    gamma: &ConstraintSet,
    lambda: &ConstraintSet,
    opts: &CapacityOptions,
) -> Result<CapacityResult> {
    let s = Solver::new(w, gamma, lambda, *opts)?;
    if s.vp.is_empty() {
        return Err(domain!("input constraint set has no vertices"));
    }
    let d = gamma.dim();
    let mut center = vec![0.0; d];
    for v in &s.vp {
        for (c, x) in center.iter_mut().zip(v) {
            *c += x / s.vp.len() as f64;
        }
    }
    // Keeps every reachable input symbol in the support so gradients stay finite.
    const INTERIOR: f64 = 1e-9;
    let t_cap = log2(w.nx().min(w.ny()) as f64) + 1.0;
    let mut cuts: Vec<Cut> = Vec::new();
    let mut best: Option<(Vec<f64>, f64, f64, Vec<f64>)> = None;
    let mut upper = f64::INFINITY;
    let mut query = center.clone();
    for round in 0..opts.max_cuts {
        let p: Vec<f64> = query.iter().zip(&center).map(|(a, c)| (1.0 - INTERIOR) * a + INTERIOR * c).collect();
        let o = s.inner(&p);
        let lo = (o.value - o.gap).max(0.0);
        if best.as_ref().is_none_or(|b| lo > b.2) {
            best = Some((p.clone(), o.value, lo, o.point.clone()));
        }
        let g = s.mi.grad_p(&p, &o.point);
        let c = o.value - g.iter().zip(&p).map(|(a, b)| a * b).sum::<f64>();
        cuts.push(Cut { g, c });
        let Some((next, t)) = model_maximum(gamma, &cuts, t_cap)? else { break };
        upper = upper.min(t);
        let b = best.as_ref().expect("set above");
        if upper - b.2 <= opts.gap_tol * 1e-2 {
            break;
        }
        // Every third query is the pure model maximizer; the others are pulled
        // towards the incumbent to damp oscillation.
        query = if round % 3 == 2 { next } else { next.iter().zip(&b.0).map(|(a, c)| 0.5 * (a + c)).collect() };
    }
    let (p_star, value, lower, q_star) = best.expect("at least one round");
    let upper = upper.max(lower);
    let iterations = s.iterations.get();
    if upper - lower > opts.gap_tol {
        return Err(Error::NotConverged { lower, upper, iterations });
    }
    Ok(CapacityResult {
        value: value.clamp(lower, upper),
        lower,
        upper,
        argmax_p: to_dist(p_star)?,
        argmin_q: to_dist(q_star)?,
        duality_gap: upper - lower,
        iterations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObliviousCapacity {
    /// Zero when every input distribution in `Gamma` is symmetrizable.
    pub value: f64,
    /// Certified lower bound on the value at the maximizer found.
    pub lower: f64,
    pub argmax_p: Option<Distribution>,
    pub argmin_q: Option<Distribution>,
    pub all_symmetrizable: bool,
    pub iterations: usize,
}

/// Maximum of `min_Q I(P, Q)` over non-symmetrizable `P` in `Gamma`.
pub fn oblivious_capacity(
    w: &Channel,
    gamma: &ConstraintSet,
    lambda: &ConstraintSet,
    opts: &CapacityOptions,
) -> Result<ObliviousCapacity> {
    let s = Solver::new(w, gamma, lambda, *opts)?;
    let nonsym = |p: &[f64]| match Distribution::from_weights(p.to_vec()) {
        Ok(d) => ecn_symmetrizable(&d, w, lambda).map(|r| !r.symmetrizable).unwrap_or(false),
        Err(_) => false,
    };
    if let Ok(r) = list_capacity(w, gamma, lambda, opts) {
        if nonsym(r.argmax_p.probs()) {
            return Ok(ObliviousCapacity {
                value: r.value,
                lower: r.lower,
                argmax_p: Some(r.argmax_p),
                argmin_q: Some(r.argmin_q),
                all_symmetrizable: false,
                iterations: r.iterations,
            });
        }
    }
    let eval_p = |p: &[f64]| s.inner(p).value;
    match search(gamma, &s.vp, &nonsym, &eval_p, opts) {
        None => Ok(ObliviousCapacity {
            value: 0.0,
            lower: 0.0,
            argmax_p: None,
            argmin_q: None,
            all_symmetrizable: true,
            iterations: s.iterations.get(),
        }),
        Some((p, _)) => {
            let o = s.inner(&p);
            Ok(ObliviousCapacity {
                value: o.value,
                lower: (o.value - o.gap).max(0.0),
                argmax_p: Some(to_dist(p)?),
                argmin_q: Some(to_dist(o.point)?),
                all_symmetrizable: false,
                iterations: s.iterations.get(),
            })
        }
    }
}

/// `H(p * w) - H(p)` for the bit-flip channel with input cap `w` and state cap `p`.
pub fn bitflip_list_capacity(w: f64, p: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&w) || !(0.0..0.5).contains(&p) {
        return Err(domain!("bit-flip caps ({w}, {p}) must lie in [0, 0.5)"));
    }
    Ok(binary_entropy(binary_convolution(p, w)?)? - binary_entropy(p)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictStatus {
    /// Some input distribution in `Gamma` is non-symmetrizable.
    EqualsListCapacityThm1,
    /// `Gamma` fails that test but the enlarged set for `w_s / w_x` passes it.
    EqualsListCapacityThm2,
    Unknown,
}

impl VerdictStatus {
    pub fn label(self) -> &'static str {
        match self {
            VerdictStatus::EqualsListCapacityThm1 => "equals_Clist_thm1",
            VerdictStatus::EqualsListCapacityThm2 => "equals_Clist_thm2",
            VerdictStatus::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeFlag {
    pub window: &'static str,
    pub length: usize,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowedCapacityVerdict {
    pub status: VerdictStatus,
    pub c_list: f64,
    pub c_list_lower: f64,
    pub c_list_upper: f64,
    pub hypothesis_evidence: String,
    /// Windows outside `(c log2 n, n / c)`.
    pub regime_flags: Vec<RegimeFlag>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerdictOptions {
    pub capacity: CapacityOptions,
    pub scan_resolution: usize,
    pub regime_constant: f64,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        VerdictOptions { capacity: CapacityOptions::default(), scan_resolution: 20, regime_constant: 4.0 }
    }
}

fn describe(p: &Distribution) -> String {
    let parts: Vec<String> = p.probs().iter().map(|v| format!("{v:.4}")).collect();
    format!("({})", parts.join(", "))
}

/// Decides whether the windowed capacity provably equals `C_list` for `spec`.
pub fn windowed_capacity_verdict(spec: &WindowedAvcSpec, opts: &VerdictOptions) -> Result<WindowedCapacityVerdict> {
    let (c_list, lo, hi, mut evidence) = match list_capacity(&spec.channel, &spec.gamma, &spec.lambda, &opts.capacity) {
        Ok(r) => (r.value, r.lower, r.upper, String::new()),
        Err(Error::NotConverged { lower, upper, .. }) => {
            ((lower + upper) / 2.0, lower, upper, format!("capacity bounds [{lower:.6}, {upper:.6}] not converged; "))
        }
        Err(e) => return Err(e),
    };
    let mut flags = Vec::new();
    let c = opts.regime_constant;
    let lower = c * log2(spec.n as f64);
    let upper = spec.n as f64 / c;
    for (name, len) in [("w_x", spec.w_x), ("w_s", spec.w_s)] {
        let l = len as f64;
        if l <= lower || l >= upper {
            flags.push(RegimeFlag { window: name, length: len, lower, upper });
        }
    }
    let all = |_: &Distribution| true;
    let scan = scan_nonsymmetrizable(&spec.gamma, &spec.channel, &spec.lambda, opts.scan_resolution, &all)?;
    let found = scan.nonsymmetrizable().next().cloned();
    evidence.push_str(&format!(
        "input set: {} of {} scanned points non-symmetrizable",
        scan.nonsymmetrizable().count(),
        scan.points.len()
    ));
    let mut status = VerdictStatus::Unknown;
    if let Some(p) = found {
        evidence.push_str(&format!(", e.g. {}", describe(&p)));
        status = VerdictStatus::EqualsListCapacityThm1;
    } else {
        let alpha = spec.alpha();
        if alpha <= 1.0 {
            let gp = gamma_prime(&spec.gamma, alpha)?;
            let keep = |t: &Distribution| in_gamma_prime(&spec.gamma, alpha, t).unwrap_or(false);
            let scan2 = scan_nonsymmetrizable(&gp, &spec.channel, &spec.lambda, opts.scan_resolution, &keep)?;
            evidence.push_str(&format!(
                "; enlarged set for window ratio {alpha:.4}: {} of {} scanned points non-symmetrizable",
                scan2.nonsymmetrizable().count(),
                scan2.points.len()
            ));
            if let Some(p) = scan2.nonsymmetrizable().next() {
                evidence.push_str(&format!(", e.g. {}", describe(p)));
                status = VerdictStatus::EqualsListCapacityThm2;
            };
        } else {
            evidence.push_str(&format!("; window ratio {alpha:.4} exceeds 1, enlarged set not applicable"));
        }
    }
    Ok(WindowedCapacityVerdict {
        status,
        c_list,
        c_list_lower: lo,
        c_list_upper: hi,
        hypothesis_evidence: evidence,
        regime_flags: flags,
    })
}
