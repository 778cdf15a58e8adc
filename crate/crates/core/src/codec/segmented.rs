//! Random codes built as a concatenation of independently drawn sub-codes.
//!
//! A message is split into per-segment chunks and each chunk selects one
//! sub-codeword. Sub-codewords are i.i.d. draws that are kept only if every
//! window they can take part in stays inside the input constraint. With one
//! segment the check uses the actual neighbouring symbols. With several
//! segments each sub-codeword must satisfy an excess profile on its prefixes
//! and suffixes; the profile is chosen so that any concatenation of pieces
//! satisfying it keeps every window inside the constraint.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use crate::constraint::ConstraintSet;
use crate::error::{domain, Error, Result};
use crate::prob::{Distribution, Symbol};
use crate::window::{codeword_admissible, verify_windows, ExpurgationStats, RangeMode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolRows {
    width: usize,
    data: Vec<Symbol>,
}

impl SymbolRows {
    fn new(width: usize) -> Self {
        SymbolRows { width, data: Vec::new() }
    }

    pub fn row(&self, i: usize) -> &[Symbol] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn len(&self) -> usize {
        if self.width == 0 {
            0
        } else {
            self.data.len() / self.width
        }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }
}

/// Binary rows packed 64 symbols per word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct PackedRows {
    pub words: usize,
    pub data: Vec<u64>,
}

impl PackedRows {
    fn pack(rows: &SymbolRows) -> Self {
        let words = rows.width.div_ceil(64).max(1);
        let count = if rows.width == 0 { 1 } else { rows.len() };
        let mut data = vec![0u64; words * count];
        for r in 0..rows.len() {
            for (i, &s) in rows.row(r).iter().enumerate() {
                if s != 0 {
                    data[r * words + i / 64] |= 1 << (i % 64);
                }
            }
        }
        PackedRows { words, data }
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.words..(i + 1) * self.words]
    }
}

pub(crate) fn pack_bits(seq: &[bool]) -> Vec<u64> {
    let mut out = vec![0u64; seq.len().div_ceil(64).max(1)];
    for (i, &b) in seq.iter().enumerate() {
        if b {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    /// Offset of the segment inside the code block.
    pub start: usize,
    pub len: usize,
    pub bits: usize,
    pub rows: SymbolRows,
    pub(crate) packed: Option<PackedRows>,
    /// Candidates drawn to obtain `2^bits` survivors.
    pub generated: usize,
}

impl Segment {
    pub fn size(&self) -> usize {
        1usize << self.bits
    }
}

/// Per-inequality excess budget for prefixes and suffixes of a segment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcessProfile {
    w: usize,
    tau: Vec<f64>,
    kappa: Vec<f64>,
}

impl ExcessProfile {
    /// `slack` is the fraction of each inequality's per-symbol headroom
    /// (bound minus smallest coefficient) by which prefix and suffix excess must
    /// decrease; `min_piece` is the shortest segment length.
    pub fn new(gamma: &ConstraintSet, w: usize, slack: f64, min_piece: usize) -> Self {
        let k_max = if w >= 2 { (w - 2) / min_piece.max(1) + 2 } else { 1 };
        let kappa: Vec<f64> =
            gamma.halfspaces().iter().map(|h| slack * (h.bound - h.min_coeff()).max(0.0)).collect();
        let tau = kappa.iter().map(|k| k * w as f64 / k_max as f64).collect();
        ExcessProfile { w, tau, kappa }
    }

    fn piece_ok(&self, gamma: &ConstraintSet, piece: &mut dyn Iterator<Item = Symbol>, len: usize) -> bool {
        let limit = len.min(self.w.saturating_sub(1));
        let hs = gamma.halfspaces();
        let mut excess = vec![0.0; hs.len()];
        for (l, s) in piece.take(limit).enumerate() {
            let l = (l + 1) as f64;
            for (i, h) in hs.iter().enumerate() {
                excess[i] += h.coeffs[s as usize] - h.bound;
                if excess[i] > self.tau[i] - self.kappa[i] * l + gamma.tol() * l {
                    return false;
                }
            }
        }
        true
    }

    pub fn prefix_ok(&self, gamma: &ConstraintSet, seq: &[Symbol]) -> bool {
        self.piece_ok(gamma, &mut seq.iter().copied(), seq.len())
    }

    pub fn suffix_ok(&self, gamma: &ConstraintSet, seq: &[Symbol]) -> bool {
        self.piece_ok(gamma, &mut seq.iter().rev().copied(), seq.len())
    }
}

#[derive(Debug, Clone)]
pub struct SegmentedParams<'a> {
    pub n: usize,
    pub message_bits: usize,
    pub dist: &'a Distribution,
    pub gamma: &'a ConstraintSet,
    pub w_x: usize,
    /// Largest number of message bits carried by one segment.
    pub segment_bits: usize,
    pub profile_slack: f64,
    /// Candidate budget per segment, as a multiple of the segment size.
    pub max_oversample: usize,
    /// Symbols transmitted right before the block.
    pub preceding: &'a [Symbol],
    /// Symbols transmitted right after the block.
    pub following: &'a [Symbol],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentedCode {
    pub n: usize,
    pub message_bits: usize,
    pub segments: Vec<Segment>,
    pub stats: ExpurgationStats,
}

/// Extra acceptance test: `(segment index, candidate) -> keep?`.
pub(crate) type Acceptor<'a> = &'a dyn Fn(usize, &[Symbol]) -> bool;

pub(crate) fn split_even(total: usize, parts: usize) -> Vec<usize> {
    (0..parts).map(|j| total / parts + usize::from(j < total % parts)).collect()
}

impl SegmentedCode {
    /// Draws and expurgates the sub-codes. `extra` replaces the default window
    /// test when present (used for interleaved placements).
    pub(crate) fn build(p: &SegmentedParams<'_>, rng: &mut dyn RngCore, extra: Option<Acceptor<'_>>) -> Result<Self> {
        if p.dist.dim() != p.gamma.dim() {
            return Err(domain!("code distribution dimension {} differs from constraint dimension {}", p.dist.dim(), p.gamma.dim()));
        }
        if p.n == 0 && p.message_bits > 0 {
            return Err(domain!("cannot carry {} bits in an empty block", p.message_bits));
        }
        if p.w_x == 0 {
            return Err(domain!("window length must be positive"));
        }
        let seg_bits = p.segment_bits.clamp(1, 24);
        let mut b = p.message_bits.div_ceil(seg_bits).max(1);
        if p.n > 0 {
            b = b.min(p.n);
        }
        if p.message_bits.div_ceil(b) > 24 {
            return Err(domain!("{} bits over {} symbols needs segments above 24 bits", p.message_bits, p.n));
        }
        let lens = split_even(p.n, b);
        let bits = split_even(p.message_bits, b);
        let min_piece = lens.iter().copied().min().unwrap_or(0).max(1);
        let profile = ExcessProfile::new(p.gamma, p.w_x, p.profile_slack, min_piece);
        let multi = b > 1;
        if multi && extra.is_none() {
            let tail = &p.preceding[p.preceding.len().saturating_sub(p.w_x - 1)..];
            let head = &p.following[..p.following.len().min(p.w_x - 1)];
            if !profile.suffix_ok(p.gamma, tail) || !profile.prefix_ok(p.gamma, head) {
                return Err(domain!("neighbouring fixed symbols exceed the segment excess profile"));
            }
            for ctx in [p.preceding, p.following] {
                if !ctx.is_empty() && ctx.len() + 1 < p.w_x {
                    return Err(domain!("neighbouring block of {} symbols is shorter than a window", ctx.len()));
                }
            }
        }
        let probs = p.dist.probs();
        let binary = p.dist.dim() == 2;
        let mut segments = Vec::with_capacity(b);
        let (mut original, mut retained) = (0usize, 0usize);
        let mut start = 0;
        for j in 0..b {
            let len = lens[j];
            let target = 1usize << bits[j];
            let cap = p.max_oversample.max(1).saturating_mul(target).saturating_add(1000);
            let mut rows = SymbolRows::new(len);
            let mut cand = vec![0 as Symbol; len];
            let mut generated = 0usize;
            while rows.len() < target && !(len == 0 && generated > 0) {
                if generated >= cap {
                    return Err(Error::Construction(format!(
                        "segment {j}: only {} of {target} sub-codewords survived {generated} draws",
                        rows.len()
                    )));
                }
                for c in cand.iter_mut() {
                    *c = crate::prob::sample_index(probs, rand::Rng::gen::<f64>(rng)) as Symbol;
                }
                generated += 1;
                let ok = match extra {
                    Some(f) => f(j, &cand),
                    None if !multi => codeword_admissible(&cand, p.w_x, p.gamma, p.preceding, p.following)?,
                    None => {
                        (len < p.w_x || verify_windows(&cand, p.w_x, p.gamma, RangeMode::Inclusive)?.valid)
                            && profile.prefix_ok(p.gamma, &cand)
                            && profile.suffix_ok(p.gamma, &cand)
                    }
                };
                if ok {
                    rows.data.extend_from_slice(&cand);
                }
            }
            if len == 0 {
                rows.data.clear();
            }
            original += generated;
            retained += target;
            let packed = binary.then(|| PackedRows::pack(&rows));
            segments.push(Segment { start, len, bits: bits[j], rows, packed, generated });
            start += len;
        }
        Ok(SegmentedCode {
            n: p.n,
            message_bits: p.message_bits,
            segments,
            stats: ExpurgationStats::new(original, retained),
        })
    }

    /// Splits a message into per-segment sub-codeword indices.
    pub fn indices(&self, message: &[bool]) -> Result<Vec<usize>> {
        if message.len() != self.message_bits {
            return Err(domain!("message has {} bits, code carries {}", message.len(), self.message_bits));
        }
        let mut out = Vec::with_capacity(self.segments.len());
        let mut off = 0;
        for seg in &self.segments {
            let idx = (0..seg.bits).fold(0usize, |acc, k| acc | (usize::from(message[off + k]) << k));
            out.push(idx);
            off += seg.bits;
        }
        Ok(out)
    }

    /// Inverse of [`Self::indices`].
    pub fn message_from_indices(&self, idx: &[usize]) -> Vec<bool> {
        let mut m = Vec::with_capacity(self.message_bits);
        for (seg, &i) in self.segments.iter().zip(idx) {
            m.extend((0..seg.bits).map(|k| (i >> k) & 1 == 1));
        }
        m
    }

    pub fn codeword_from_indices(&self, idx: &[usize]) -> Vec<Symbol> {
        let mut x = Vec::with_capacity(self.n);
        for (seg, &i) in self.segments.iter().zip(idx) {
            if seg.len > 0 {
                x.extend_from_slice(seg.rows.row(i));
            }
        }
        x
    }

    pub fn encode(&self, message: &[bool]) -> Result<Vec<Symbol>> {
        Ok(self.codeword_from_indices(&self.indices(message)?))
    }

    pub fn rate(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.message_bits as f64 / self.n as f64
        }
    }
}
