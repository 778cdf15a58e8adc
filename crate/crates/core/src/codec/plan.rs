//! Layout of a transmission: message block, separator block and key block.

use alloc::vec;
use alloc::vec::Vec;

use crate::constraint::ConstraintSet;
use crate::error::{domain, Result};
use crate::math::{abs, round};
use crate::prob::{Distribution, Symbol};
use crate::window::{guard_word, verify_windows, RangeMode};

/// Parameters of the interleaved layout used when `w_s < w_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterleaveParams {
    /// Fraction of each input window carried by type-1 positions (`w_s / w_x`).
    pub alpha: f64,
    /// Ramp granularity: type-1 runs grow by `lambda * alpha * w_x` per window.
    pub lambda: f64,
    /// Distribution of type-1 symbols (non-symmetrizable).
    pub t1: Distribution,
    /// Distribution of type-2 filler symbols.
    pub t2: Distribution,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Layout {
    /// Message block only; decoding returns the best list entry.
    Plain,
    /// Message block, deterministic guard word, contiguous key block.
    Guarded { guard: Distribution },
    /// Message block, ramped interleaved windows, interleaved key block.
    Interleaved(InterleaveParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Ramp windows between the message block and the key block.
    Ramp,
    /// Key windows.
    Key,
}

/// Type-1 and type-2 positions (zero-based) of one `w_x` window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    pub type1: Vec<usize>,
    pub type2: Vec<usize>,
}

fn type1_count(w_x: usize, alpha: f64) -> Result<usize> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain!("window ratio {alpha} must lie in (0, 1]"));
    }
    let a = alpha * w_x as f64;
    if abs(a - round(a)) > 1e-9 || round(a) < 1.0 {
        return Err(domain!("alpha * w_x = {a} is not a positive integer"));
    }
    Ok(round(a) as usize)
}

/// Ramp step `l = round(lambda * alpha * w_x)`, at least 1.
pub fn ramp_step(w_x: usize, alpha: f64, lambda: f64) -> Result<usize> {
    let a = type1_count(w_x, alpha)?;
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(domain!("ramp parameter {lambda} must lie in (0, 1]"));
    }
    Ok((round(lambda * a as f64) as usize).max(1))
}

/// Number of ramp windows before the last one: `ceil(alpha w_x / l)`, which is
/// `ceil(1 / lambda)` when `l` needs no rounding.
pub fn ramp_windows(w_x: usize, alpha: f64, lambda: f64) -> Result<usize> {
    let a = type1_count(w_x, alpha)?;
    Ok(a.div_ceil(ramp_step(w_x, alpha, lambda)?))
}

/// Splits window `i` of the given phase into type-1 and type-2 positions.
///
/// Ramp window `i < ramp_windows`: the first `L_i = min(i*l, a)` positions are
/// type 1, the next `ceil((1-alpha) L_i / alpha)` are type 2, and each remaining
/// position is type 2 exactly when the fraction of type-2 positions before it
/// is below `1 - alpha`. The last ramp window and every key window put the
/// first `a = alpha * w_x` positions in type 1.
pub fn interleave_allocation(w_x: usize, alpha: f64, lambda: f64, i: usize, phase: Phase) -> Result<Allocation> {
    let a = type1_count(w_x, alpha)?;
    let last = ramp_windows(w_x, alpha, lambda)?;
    let l = ramp_step(w_x, alpha, lambda)?;
    let mut is_type2 = vec![false; w_x];
    if phase == Phase::Key || i >= last {
        is_type2[a..].iter_mut().for_each(|t| *t = true);
    } else {
        let li = (i * l).min(a);
        let lead2 = ((w_x - a) * li).div_ceil(a);
        let lead_end = (li + lead2).min(w_x);
        is_type2[li..lead_end].iter_mut().for_each(|t| *t = true);
        let mut count2 = lead_end - li;
        for (j, t) in is_type2.iter_mut().enumerate().skip(lead_end) {
            // An empty prefix has type-2 fraction 0.
            let below = if j == 0 { a < w_x } else { count2 * w_x < (w_x - a) * j };
            if below {
                *t = true;
                count2 += 1;
            }
        }
    }
    let type1: Vec<usize> = (0..w_x).filter(|&j| !is_type2[j]).collect();
    let type2: Vec<usize> = (0..w_x).filter(|&j| is_type2[j]).collect();
    if type1.len() != a {
        return Err(domain!("window {i} has {} type-1 positions, expected {a}", type1.len()));
    }
    Ok(Allocation { type1, type2 })
}

/// Concrete positions and fixed symbols of a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePlan {
    pub n1: usize,
    pub w_x: usize,
    pub layout: Layout,
    /// Fixed separator symbols (guard word or ramp windows).
    pub phase2: Vec<Symbol>,
    /// Key block with fixed type-2 symbols; key positions hold placeholders.
    pub phase3_template: Vec<Symbol>,
    /// Positions inside the key block that carry key symbols.
    pub key_positions: Vec<usize>,
    /// Type-1 flags for the separator and key blocks (interleaved layout).
    pub type1_mask: Vec<bool>,
}

impl PhasePlan {
    pub fn plain(n1: usize, w_x: usize) -> Self {
        PhasePlan {
            n1,
            w_x,
            layout: Layout::Plain,
            phase2: Vec::new(),
            phase3_template: Vec::new(),
            key_positions: Vec::new(),
            type1_mask: Vec::new(),
        }
    }

    /// Guard word of `w_x` symbols followed by a contiguous key block.
    pub fn guarded(n1: usize, w_x: usize, guard: &Distribution, key_len: usize) -> Result<Self> {
        let g = guard_word(guard, w_x)?;
        Ok(PhasePlan {
            n1,
            w_x,
            layout: Layout::Guarded { guard: guard.clone() },
            phase2: g.symbols,
            phase3_template: vec![0; key_len],
            key_positions: (0..key_len).collect(),
            type1_mask: Vec::new(),
        })
    }

    /// Ramp windows followed by key windows; the key block is rounded up to a
    /// whole number of windows.
    pub fn interleaved(n1: usize, w_x: usize, params: &InterleaveParams, key_len: usize, gamma: &ConstraintSet) -> Result<Self> {
        let a = type1_count(w_x, params.alpha)?;
        let ramps = ramp_windows(w_x, params.alpha, params.lambda)?;
        if params.t1.dim() != gamma.dim() || params.t2.dim() != gamma.dim() {
            return Err(domain!("type distributions must match the input alphabet"));
        }
        let mix = params.t2.mix(&params.t1, params.alpha)?;
        let deviation = params.lambda * params.alpha * params.t1.l1_distance(&params.t2);
        let margin = gamma.interior_margin(&mix);
        if margin < deviation {
            return Err(domain!(
                "mixture of type distributions has interior margin {margin:.4}, below the ramp deviation {deviation:.4}"
            ));
        }
        let key_windows = key_len.div_ceil(a).max(1);
        let mut mask = Vec::with_capacity((ramps + 1 + key_windows) * w_x);
        for i in 0..=ramps {
            let al = interleave_allocation(w_x, params.alpha, params.lambda, i, Phase::Ramp)?;
            let mut m = vec![false; w_x];
            al.type1.iter().for_each(|&j| m[j] = true);
            mask.extend(m);
        }
        let ramp_len = mask.len();
        for _ in 0..key_windows {
            let al = interleave_allocation(w_x, params.alpha, params.lambda, 0, Phase::Key)?;
            let mut m = vec![false; w_x];
            al.type1.iter().for_each(|&j| m[j] = true);
            mask.extend(m);
        }
        let l = ramp_step(w_x, params.alpha, params.lambda)?;
        for start in 0..=mask.len() - w_x {
            let c = mask[start..start + w_x].iter().filter(|t| **t).count();
            if c < a || c > a + l {
                return Err(domain!("window at {start} has {c} type-1 positions, outside [{a}, {}]", a + l));
            }
        }
        let n_type2 = mask.iter().filter(|t| !**t).count();
        let n_type1_ramp = mask[..ramp_len].iter().filter(|t| **t).count();
        let g1 = guard_word(&params.t1, n_type1_ramp)?;
        let g2 = if n_type2 > 0 { guard_word(&params.t2, n_type2)?.symbols } else { Vec::new() };
        let (mut i1, mut i2) = (0, 0);
        let mut seq = Vec::with_capacity(mask.len());
        for (j, &t1) in mask.iter().enumerate() {
            if !t1 {
                seq.push(g2[i2]);
                i2 += 1;
            } else if j < ramp_len {
                seq.push(g1.symbols[i1]);
                i1 += 1;
            } else {
                seq.push(0);
            }
        }
        let phase2 = seq[..ramp_len].to_vec();
        if !verify_windows(&phase2, w_x, gamma, RangeMode::Inclusive)?.valid {
            return Err(domain!("ramp windows violate the input constraint"));
        }
        let phase3_template = seq[ramp_len..].to_vec();
        let key_positions = (0..phase3_template.len()).filter(|&j| mask[ramp_len + j]).collect();
        Ok(PhasePlan {
            n1,
            w_x,
            layout: Layout::Interleaved(params.clone()),
            phase2,
            phase3_template,
            key_positions,
            type1_mask: mask,
        })
    }

    pub fn phase2_len(&self) -> usize {
        self.phase2.len()
    }

    pub fn n3(&self) -> usize {
        self.phase3_template.len()
    }

    pub fn key_len(&self) -> usize {
        self.key_positions.len()
    }

    pub fn total_len(&self) -> usize {
        self.n1 + self.phase2_len() + self.n3()
    }

    /// Key block with `key` written into the key positions.
    pub fn fill_phase3(&self, key: &[Symbol]) -> Result<Vec<Symbol>> {
        if key.len() != self.key_len() {
            return Err(domain!("key codeword has {} symbols, layout expects {}", key.len(), self.key_len()));
        }
        let mut out = self.phase3_template.clone();
        for (&p, &k) in self.key_positions.iter().zip(key) {
            out[p] = k;
        }
        Ok(out)
    }

    pub fn assemble(&self, phase1: &[Symbol], key: &[Symbol]) -> Result<Vec<Symbol>> {
        if phase1.len() != self.n1 {
            return Err(domain!("message block has {} symbols, layout expects {}", phase1.len(), self.n1));
        }
        let mut out = Vec::with_capacity(self.total_len());
        out.extend_from_slice(phase1);
        out.extend_from_slice(&self.phase2);
        out.extend(self.fill_phase3(key)?);
        Ok(out)
    }

    /// Symbols of a received sequence at the key positions.
    pub fn key_symbols(&self, y: &[Symbol]) -> Result<Vec<Symbol>> {
        if y.len() != self.total_len() {
            return Err(domain!("received {} symbols, layout has {}", y.len(), self.total_len()));
        }
        let off = self.n1 + self.phase2_len();
        Ok(self.key_positions.iter().map(|&p| y[off + p]).collect())
    }
}
