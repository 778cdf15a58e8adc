//! Oblivious jammers.
//!
//! Generators see the public code only through [`CodewordSource`]; they never
//! receive the transmitted message or codeword.

use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, RngCore};

use crate::constraint::ConstraintSet;
use crate::error::{domain, Error, Result};
use crate::prob::{sample_index, Distribution, Symbol};
use crate::window::{verify_windows, RangeMode};

pub const DEFAULT_REJECTION_CAP: usize = 10_000;

/// Default margin of the i.i.d. jammer, as a fraction of the distance to the idle state.
pub const DEFAULT_MARGIN: f64 = 0.2;

/// Public view of a code: draws codewords the way the encoder would.
pub trait CodewordSource: Sync {
    fn codeword_len(&self) -> usize;
    fn sample_codeword(&self, rng: &mut dyn RngCore) -> Result<Vec<Symbol>>;
}

/// An explicit list of codewords, drawn uniformly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    words: Vec<Vec<Symbol>>,
}

impl Codebook {
    pub fn new(words: Vec<Vec<Symbol>>) -> Result<Self> {
        let Some(first) = words.first() else {
            return Err(domain!("codebook is empty"));
        };
        if words.iter().any(|w| w.len() != first.len()) {
            return Err(domain!("codewords have different lengths"));
        }
        Ok(Codebook { words })
    }

    pub fn words(&self) -> &[Vec<Symbol>] {
        &self.words
    }
}

impl CodewordSource for Codebook {
    fn codeword_len(&self) -> usize {
        self.words[0].len()
    }

    fn sample_codeword(&self, rng: &mut dyn RngCore) -> Result<Vec<Symbol>> {
        Ok(self.words[rng.gen_range(0..self.words.len())].clone())
    }
}

/// A generated state sequence with its diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JamSequence {
    pub states: Vec<Symbol>,
    /// Whole sequences discarded before this one was accepted.
    pub rejections: usize,
    /// Whether every `w_s`-window satisfies the state constraint.
    pub window_valid: bool,
    /// Positions replaced by the idle state during clipping.
    pub clipped: usize,
}

fn check_window(n: usize, w_s: usize, lambda: &ConstraintSet) -> Result<()> {
    if w_s == 0 || w_s > n {
        return Err(domain!("state window {w_s} must satisfy 1 <= w_s <= n = {n}"));
    }
    if lambda.halfspaces().iter().any(|h| h.coeffs.len() != lambda.dim()) {
        return Err(domain!("malformed state constraint"));
    }
    Ok(())
}

fn window_valid(states: &[Symbol], w_s: usize, lambda: &ConstraintSet) -> Result<bool> {
    Ok(verify_windows(states, w_s, lambda, RangeMode::Inclusive)?.valid)
}

/// Sliding per-inequality sums with a violation test for the current window.
struct WindowSums<'a> {
    lambda: &'a ConstraintSet,
    w: usize,
    counts: Vec<usize>,
    limits: Vec<f64>,
}

impl<'a> WindowSums<'a> {
    fn new(lambda: &'a ConstraintSet, w: usize) -> Self {
        let limits = lambda.halfspaces().iter().map(|h| (h.bound + lambda.tol()) * w as f64).collect();
        WindowSums { lambda, w, counts: vec![0; lambda.dim()], limits }
    }

    fn violated(&self) -> bool {
        self.lambda.halfspaces().iter().zip(&self.limits).any(|(h, &l)| {
            let s: f64 = self.counts.iter().zip(&h.coeffs).map(|(&c, &a)| c as f64 * a).sum();
            s > l
        })
    }

    /// Pushes `seq[i]`, drops `seq[i - w]`; returns true when a full window violates.
    fn push(&mut self, seq: &[Symbol], i: usize) -> bool {
        self.counts[seq[i] as usize] += 1;
        if i >= self.w {
            self.counts[seq[i - self.w] as usize] -= 1;
        }
        i + 1 >= self.w && self.violated()
    }
}

/// i.i.d. states from `p_s`, resampling the whole sequence whenever a window
/// violates `lambda`. A sequence is abandoned at its first violating window.
pub fn iid_jammer(
    p_s: &Distribution,
    n: usize,
    w_s: usize,
    lambda: &ConstraintSet,
    rng: &mut dyn RngCore,
    rejection_cap: usize,
) -> Result<JamSequence> {
    check_window(n, w_s, lambda)?;
    if p_s.dim() != lambda.dim() {
        return Err(domain!("state distribution dimension {} differs from constraint dimension {}", p_s.dim(), lambda.dim()));
    }
    let mut states = vec![0 as Symbol; n];
    for rejections in 0..=rejection_cap {
        let mut sums = WindowSums::new(lambda, w_s);
        let mut ok = true;
        for i in 0..n {
            states[i] = sample_index(p_s.probs(), rng.gen::<f64>()) as Symbol;
            if sums.push(&states, i) {
                ok = false;
                break;
            }
        }
        if ok {
            if !window_valid(&states, w_s, lambda)? {
                return Err(Error::Invariant("accepted i.i.d. state sequence violates the state constraint".to_string()));
            }
            return Ok(JamSequence { states, rejections, window_valid: true, clipped: 0 });
        }
    }
    Err(Error::Generation {
        attempts: rejection_cap + 1,
        reason: format!("no i.i.d. state sequence satisfied every {w_s}-window"),
    })
}

/// Sends a uniformly drawn codeword as the state sequence and reports whether it is admissible.
pub fn spoof_jammer(
    source: &dyn CodewordSource,
    w_s: usize,
    lambda: &ConstraintSet,
    rng: &mut dyn RngCore,
) -> Result<JamSequence> {
    let n = source.codeword_len();
    check_window(n, w_s, lambda)?;
    let states = source.sample_codeword(rng)?;
    if let Some(&s) = states.iter().find(|&&s| s as usize >= lambda.dim()) {
        return Err(domain!("codeword symbol {s} is not a state"));
    }
    let valid = window_valid(&states, w_s, lambda)?;
    Ok(JamSequence { states, rejections: 0, window_valid: valid, clipped: 0 })
}

/// Draws a codeword, passes it through `u` (one state distribution per input
/// symbol) and resamples until every window satisfies `lambda`.
pub fn symmetrize_jammer(
    source: &dyn CodewordSource,
    u: &[Distribution],
    w_s: usize,
    lambda: &ConstraintSet,
    rng: &mut dyn RngCore,
    rejection_cap: usize,
) -> Result<JamSequence> {
    let n = source.codeword_len();
    check_window(n, w_s, lambda)?;
    if u.iter().any(|r| r.dim() != lambda.dim()) {
        return Err(domain!("state map rows must have dimension {}", lambda.dim()));
    }
    for rejections in 0..=rejection_cap {
        let x = source.sample_codeword(rng)?;
        let mut states = Vec::with_capacity(n);
        for &xi in &x {
            let row = u.get(xi as usize).ok_or_else(|| domain!("state map has no row for input {xi}"))?;
            states.push(sample_index(row.probs(), rng.gen::<f64>()) as Symbol);
        }
        if window_valid(&states, w_s, lambda)? {
            return Ok(JamSequence { states, rejections, window_valid: true, clipped: 0 });
        }
    }
    Err(Error::Generation {
        attempts: rejection_cap + 1,
        reason: format!("no symmetrized state sequence satisfied every {w_s}-window"),
    })
}

/// A state whose point mass lies in `lambda` and whose coefficient is minimal
/// in every inequality.
pub fn dominant_idle_state(lambda: &ConstraintSet) -> Option<Symbol> {
    (0..lambda.dim())
        .find(|&k| {
            Distribution::point_mass(lambda.dim(), k).map(|p| lambda.contains(&p)).unwrap_or(false)
                && lambda.halfspaces().iter().all(|h| h.coeffs[k] <= h.min_coeff() + 1e-15)
        })
        .map(|k| k as Symbol)
}

/// Replaces states by the idle state until every window satisfies `lambda`:
/// whenever a full window violates, its latest non-idle states are cleared.
pub fn clip_to_constraints(states: &[Symbol], w_s: usize, lambda: &ConstraintSet) -> Result<JamSequence> {
    check_window(states.len(), w_s, lambda)?;
    let idle = dominant_idle_state(lambda)
        .ok_or_else(|| domain!("state constraint has no idle state to clip towards"))?;
    let mut out = states.to_vec();
    let mut sums = WindowSums::new(lambda, w_s);
    let mut clipped = 0;
    for i in 0..out.len() {
        if !sums.push(&out, i) {
            continue;
        }
        let mut j = i + 1;
        while sums.violated() && j > i + 1 - w_s {
            j -= 1;
            if out[j] != idle {
                sums.counts[out[j] as usize] -= 1;
                sums.counts[idle as usize] += 1;
                out[j] = idle;
                clipped += 1;
            }
        }
    }
    if !window_valid(&out, w_s, lambda)? {
        return Err(Error::Invariant("clipped state sequence violates the state constraint".to_string()));
    }
    Ok(JamSequence { states: out, rejections: 0, window_valid: true, clipped })
}

/// `(1 - margin) q + margin * idle`: a state distribution pulled towards the idle state.
pub fn shrink_towards_idle(q: &Distribution, lambda: &ConstraintSet, margin: f64) -> Result<Distribution> {
    if !(0.0..=1.0).contains(&margin) {
        return Err(domain!("margin {margin} must lie in [0, 1]"));
    }
    let idle = dominant_idle_state(lambda).ok_or_else(|| domain!("state constraint has no idle state"))?;
    q.mix(&Distribution::point_mass(q.dim(), idle as usize)?, margin)
}

/// User-supplied state generator.
pub trait StateGenerator: Send + Sync + fmt::Debug {
    fn generate(&self, n: usize, w_s: usize, lambda: &ConstraintSet, rng: &mut dyn RngCore) -> Result<JamSequence>;
}

/// What a spoofing jammer does with a codeword that violates the state constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpoofFallback {
    /// Send it anyway and flag it.
    Report,
    /// Clip it to the constraint.
    Clip,
    /// Draw codewords until one is admissible.
    Reject,
}

#[derive(Debug, Clone)]
pub enum JammerStrategy {
    Iid { p_s: Distribution },
    Spoof { on_invalid: SpoofFallback },
    Symmetrize { u: Vec<Distribution> },
    Custom(Arc<dyn StateGenerator>),
}

impl JammerStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            JammerStrategy::Iid { .. } => "iid",
            JammerStrategy::Spoof { .. } => "spoof",
            JammerStrategy::Symmetrize { .. } => "symmetrize",
            JammerStrategy::Custom(_) => "custom",
        }
    }

    pub fn generate(
        &self,
        source: &dyn CodewordSource,
        w_s: usize,
        lambda: &ConstraintSet,
        rng: &mut dyn RngCore,
        rejection_cap: usize,
    ) -> Result<JamSequence> {
        let n = source.codeword_len();
        match self {
            JammerStrategy::Iid { p_s } => iid_jammer(p_s, n, w_s, lambda, rng, rejection_cap),
            JammerStrategy::Spoof { on_invalid } => match on_invalid {
                SpoofFallback::Report => spoof_jammer(source, w_s, lambda, rng),
                SpoofFallback::Clip => {
                    let s = spoof_jammer(source, w_s, lambda, rng)?;
                    if s.window_valid {
                        Ok(s)
                    } else {
                        clip_to_constraints(&s.states, w_s, lambda)
                    }
                }
                SpoofFallback::Reject => {
                    for rejections in 0..=rejection_cap {
                        let s = spoof_jammer(source, w_s, lambda, rng)?;
                        if s.window_valid {
                            return Ok(JamSequence { rejections, ..s });
                        }
                    }
                    Err(Error::Generation {
                        attempts: rejection_cap + 1,
                        reason: format!("no codeword satisfied every {w_s}-window of the state constraint"),
                    })
                }
            },
            JammerStrategy::Symmetrize { u } => symmetrize_jammer(source, u, w_s, lambda, rng, rejection_cap),
            JammerStrategy::Custom(g) => {
                let s = g.generate(n, w_s, lambda, rng)?;
                if s.states.len() != n {
                    return Err(domain!("custom jammer produced {} states, expected {n}", s.states.len()));
                }
                if s.window_valid && !window_valid(&s.states, w_s, lambda)? {
                    return Err(Error::Invariant("custom jammer marked an inadmissible sequence as valid".to_string()));
                }
                Ok(s)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn point_mass_jammer_is_idle() {
        let lambda = ConstraintSet::weight_cap(0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = iid_jammer(&Distribution::point_mass(2, 0).unwrap(), 64, 16, &lambda, &mut rng, 10).unwrap();
        assert!(s.states.iter().all(|&x| x == 0));
        assert_eq!(s.rejections, 0);
    }

    #[test]
    fn clip_repairs_dense_sequence() {
        let lambda = ConstraintSet::weight_cap(0.25).unwrap();
        let s = clip_to_constraints(&[1; 32], 8, &lambda).unwrap();
        assert!(s.window_valid);
        assert!(verify_windows(&s.states, 8, &lambda, RangeMode::Inclusive).unwrap().valid);
        assert_eq!(s.states.iter().filter(|&&x| x == 1).count(), 8);
    }

    #[test]
    fn identity_map_matches_spoof() {
        let lambda = ConstraintSet::weight_cap(0.5).unwrap();
        let book = Codebook::new(vec![vec![0, 1, 0, 0, 1, 0, 0, 0]]).unwrap();
        let u = [Distribution::point_mass(2, 0).unwrap(), Distribution::point_mass(2, 1).unwrap()];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = symmetrize_jammer(&book, &u, 4, &lambda, &mut rng, 10).unwrap();
        let b = spoof_jammer(&book, 4, &lambda, &mut rng).unwrap();
        assert_eq!(a.states, b.states);
    }
}
