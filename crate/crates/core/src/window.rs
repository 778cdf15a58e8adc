//! Sliding-window type verification, deterministic guard words and expurgation.

use alloc::vec;
use alloc::vec::Vec;

use crate::constraint::ConstraintSet;
use crate::error::{domain, Result};
use crate::math::{abs, ceil, round};
use crate::prob::{Distribution, EmpiricalType, Symbol};

/// Which window start positions are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RangeMode {
    /// Starts `0..n-w`: the final window is not checked (`n - w` windows).
    Strict,
    /// Starts `0..=n-w` (`n - w + 1` windows).
    #[default]
    Inclusive,
}

impl RangeMode {
    pub fn window_count(self, n: usize, w: usize) -> usize {
        match self {
            RangeMode::Strict => n - w,
            RangeMode::Inclusive => n - w + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowViolation {
    /// Zero-based start index of the offending window.
    pub start: usize,
    pub window_type: Distribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowReport {
    pub valid: bool,
    pub violations: Vec<WindowViolation>,
    pub windows_checked: usize,
}

/// Checks the empirical type of every length-`w` window against `cs`.
///
/// Counts and per-inequality sums are updated incrementally as the window slides.
pub fn verify_windows(seq: &[Symbol], w: usize, cs: &ConstraintSet, mode: RangeMode) -> Result<WindowReport> {
    let n = seq.len();
    if w == 0 || w > n {
        return Err(domain!("window length {w} must satisfy 1 <= w <= n = {n}"));
    }
    let d = cs.dim();
    if let Some(&s) = seq.iter().find(|&&s| s as usize >= d) {
        return Err(domain!("symbol {s} outside alphabet of size {d}"));
    }
    let hs = cs.halfspaces();
    let limits: Vec<f64> = hs.iter().map(|h| (h.bound + cs.tol()) * w as f64).collect();
    let mut counts = vec![0usize; d];
    let mut sums = vec![0.0; hs.len()];
    for &s in &seq[..w] {
        add(&mut counts, &mut sums, cs, s, 1.0);
    }
    let checks = mode.window_count(n, w);
    let mut violations = Vec::new();
    for start in 0..checks {
        if start > 0 {
            add(&mut counts, &mut sums, cs, seq[start - 1], -1.0);
            add(&mut counts, &mut sums, cs, seq[start + w - 1], 1.0);
        }
        if sums.iter().zip(&limits).any(|(s, l)| s > l) {
            let t = EmpiricalType::from_counts(counts.clone()).to_distribution()?;
            violations.push(WindowViolation { start, window_type: t });
        }
    }
    Ok(WindowReport { valid: violations.is_empty(), violations, windows_checked: checks })
}

#[inline]
fn add(counts: &mut [usize], sums: &mut [f64], cs: &ConstraintSet, s: Symbol, sign: f64) {
    let k = s as usize;
    if sign > 0.0 {
        counts[k] += 1;
    } else {
        counts[k] -= 1;
    }
    for (acc, h) in sums.iter_mut().zip(cs.halfspaces()) {
        *acc += sign * h.coeffs[k];
    }
}

/// Smallest denominator `b <= max_denominator` with `b * p` integral for every entry.
pub fn rationalize(d: &Distribution, max_denominator: usize) -> Option<(Vec<usize>, usize)> {
    for b in 1..=max_denominator {
        let scaled: Vec<f64> = d.probs().iter().map(|p| p * b as f64).collect();
        if scaled.iter().all(|v| abs(v - round(*v)) < 1e-9) {
            let counts: Vec<usize> = scaled.iter().map(|v| round(*v) as usize).collect();
            if counts.iter().sum::<usize>() == b {
                return Some((counts, b));
            }
        }
    }
    None
}

pub const DEFAULT_DENOMINATOR_CAP: usize = 1024;

/// Deterministic sequence with every window type close to a rational target.
#[derive(Debug, Clone, PartialEq)]
pub struct GuardWord {
    pub symbols: Vec<Symbol>,
    /// Length `b` of the repeated base block.
    pub block_length: usize,
    pub target: Distribution,
}

impl GuardWord {
    /// Worst-case total-variation gap between any length-`l` window type and the target.
    pub fn deviation_bound(&self, l: usize) -> f64 {
        if l == 0 {
            return 1.0;
        }
        (self.block_length as f64 / l as f64).min(1.0)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Repeats the base block `0^{a_0} 1^{a_1} ...` and truncates to `len` symbols.
pub fn guard_word(target: &Distribution, len: usize) -> Result<GuardWord> {
    guard_word_with_cap(target, len, DEFAULT_DENOMINATOR_CAP)
}

pub fn guard_word_with_cap(target: &Distribution, len: usize, max_denominator: usize) -> Result<GuardWord> {
    let (counts, b) = rationalize(target, max_denominator)
        .ok_or_else(|| domain!("target has no rational form with denominator <= {max_denominator}"))?;
    if b > len {
        return Err(domain!("base block length {b} exceeds guard length {len}"));
    }
    let mut block = Vec::with_capacity(b);
    for (sym, &c) in counts.iter().enumerate() {
        block.extend(core::iter::repeat_n(sym as Symbol, c));
    }
    let reps = ceil(len as f64 / b as f64) as usize;
    let mut symbols = Vec::with_capacity(reps * b);
    for _ in 0..reps {
        symbols.extend_from_slice(&block);
    }
    symbols.truncate(len);
    Ok(GuardWord { symbols, block_length: b, target: target.clone() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpurgationStats {
    pub original: usize,
    pub retained: usize,
    pub removed_fraction: f64,
}

impl ExpurgationStats {
    pub fn new(original: usize, retained: usize) -> Self {
        let removed_fraction = if original == 0 { 0.0 } else { 1.0 - retained as f64 / original as f64 };
        ExpurgationStats { original, retained, removed_fraction }
    }
}

/// True when every `w`-window overlapping `cw`, given its actual neighbours, lies in `gamma`.
pub fn codeword_admissible(
    cw: &[Symbol],
    w: usize,
    gamma: &ConstraintSet,
    prefix: &[Symbol],
    suffix: &[Symbol],
) -> Result<bool> {
    let p = &prefix[prefix.len().saturating_sub(w.saturating_sub(1))..];
    let s = &suffix[..suffix.len().min(w.saturating_sub(1))];
    let mut buf = Vec::with_capacity(p.len() + cw.len() + s.len());
    buf.extend_from_slice(p);
    buf.extend_from_slice(cw);
    buf.extend_from_slice(s);
    if buf.len() < w || cw.is_empty() {
        return Ok(true);
    }
    Ok(verify_windows(&buf, w, gamma, RangeMode::Inclusive)?.valid)
}

/// Indices (in original order) of codewords whose overlapping windows all lie in `gamma`.
pub fn expurgate(
    codebook: &[Vec<Symbol>],
    w: usize,
    gamma: &ConstraintSet,
    prefix: &[Symbol],
    suffix: &[Symbol],
) -> Result<(Vec<usize>, ExpurgationStats)> {
    let mut kept = Vec::new();
    for (i, cw) in codebook.iter().enumerate() {
        if codeword_admissible(cw, w, gamma, prefix, suffix)? {
            kept.push(i);
        }
    }
    let stats = ExpurgationStats::new(codebook.len(), kept.len());
    Ok((kept, stats))
}
