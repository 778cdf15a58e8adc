//! Alphabets, distributions, empirical types and discrete memoryless channels.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};

use crate::error::{domain, Result};
use crate::math::{abs, log2, xlogx};

/// Symbols are zero-based indices into an alphabet of at most 256 letters.
pub type Symbol = u8;

/// Tolerance on the total mass of a probability vector.
pub const MASS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || size > 256 {
            return Err(domain!("alphabet size must be in 1..=256, got {size}"));
        }
        Ok(Alphabet { size })
    }

    pub fn binary() -> Self {
        Alphabet { size: 2 }
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

/// A probability vector. Construction checks non-negativity and total mass
/// and renormalizes so that the entries sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Accepts a vector whose entries sum to one within [`MASS_TOL`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let sum = check_weights(&probs)?;
        if abs(sum - 1.0) > MASS_TOL {
            return Err(domain!("probabilities sum to {sum}, expected 1"));
        }
        Ok(Self::normalized(probs, sum))
    }

    /// Normalizes arbitrary non-negative weights with positive total.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let sum = check_weights(&weights)?;
        Ok(Self::normalized(weights, sum))
    }

    fn normalized(mut probs: Vec<f64>, sum: f64) -> Self {
        for p in probs.iter_mut() {
            *p /= sum;
        }
        Distribution { probs }
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain!("Bernoulli parameter {p} outside [0,1]"));
        }
        Ok(Distribution { probs: vec![1.0 - p, p] })
    }

    pub fn point_mass(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(domain!("point mass index {k} outside alphabet of size {dim}"));
        }
        let mut probs = vec![0.0; dim];
        probs[k] = 1.0;
        Ok(Distribution { probs })
    }

    pub fn uniform(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(domain!("uniform distribution over an empty alphabet"));
        }
        Ok(Distribution { probs: vec![1.0 / dim as f64; dim] })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn get(&self, k: usize) -> f64 {
        self.probs[k]
    }

    pub fn l1_distance(&self, other: &Distribution) -> f64 {
        self.probs.iter().zip(&other.probs).map(|(a, b)| abs(a - b)).sum()
    }

    pub fn tv_distance(&self, other: &Distribution) -> f64 {
        0.5 * self.l1_distance(other)
    }

    /// `(1 - t) * self + t * other`.
    pub fn mix(&self, other: &Distribution, t: f64) -> Result<Distribution> {
        if self.dim() != other.dim() || !(0.0..=1.0).contains(&t) {
            return Err(domain!("invalid mixture"));
        }
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (1.0 - t) * a + t * b)
            .collect();
        Ok(Distribution { probs })
    }

    /// Inverse-CDF sample using one uniform draw.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Symbol {
        sample_index(&self.probs, rng.gen::<f64>()) as Symbol
    }
}

fn check_weights(w: &[f64]) -> Result<f64> {
    if w.is_empty() || w.len() > 256 {
        return Err(domain!("distribution dimension {} outside 1..=256", w.len()));
    }
    if let Some(bad) = w.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(domain!("negative or non-finite probability {bad}"));
    }
    let sum: f64 = w.iter().sum();
    if sum <= 0.0 {
        return Err(domain!("weights sum to zero"));
    }
    Ok(sum)
}

pub(crate) fn sample_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last_positive = k;
            if u < acc {
                return k;
            }
        }
    }
    last_positive
}

/// Symbol counts of a finite sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalType {
    counts: Vec<usize>,
    len: usize,
}

impl EmpiricalType {
    pub fn from_counts(counts: Vec<usize>) -> Self {
        let len = counts.iter().sum();
        EmpiricalType { counts, len }
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn to_distribution(&self) -> Result<Distribution> {
        if self.len == 0 {
            return Err(domain!("type of an empty sequence"));
        }
        let n = self.len as f64;
        Ok(Distribution { probs: self.counts.iter().map(|&c| c as f64 / n).collect() })
    }
}

pub fn empirical_type(seq: &[Symbol], alphabet: Alphabet) -> Result<EmpiricalType> {
    if seq.is_empty() {
        return Err(domain!("type of an empty sequence"));
    }
    let mut counts = vec![0usize; alphabet.size()];
    for &s in seq {
        let k = s as usize;
        if k >= counts.len() {
            return Err(domain!("symbol {k} outside alphabet of size {}", counts.len()));
        }
        counts[k] += 1;
    }
    Ok(EmpiricalType { counts, len: seq.len() })
}

/// Transition table `W(y|x,s)` stored as `[x][s][y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    nx: usize,
    ns: usize,
    ny: usize,
    table: Vec<f64>,
}

impl Channel {
    /// `rows[x * ns + s]` is the output distribution for input `x` and state `s`.
    pub fn new(nx: usize, ns: usize, rows: &[Distribution]) -> Result<Self> {
        if nx == 0 || ns == 0 || nx > 256 || ns > 256 {
            return Err(domain!("channel alphabets must be in 1..=256"));
        }
        if rows.len() != nx * ns {
            return Err(domain!("channel needs {} rows, got {}", nx * ns, rows.len()));
        }
        let ny = rows[0].dim();
        if rows.iter().any(|r| r.dim() != ny) {
            return Err(domain!("channel rows have differing output dimensions"));
        }
        let mut table = Vec::with_capacity(nx * ns * ny);
        for r in rows {
            table.extend_from_slice(r.probs());
        }
        Ok(Channel { nx, ns, ny, table })
    }

    /// Row-major table with `nx * ns` rows of length `ny`.
    pub fn from_table(nx: usize, ns: usize, ny: usize, table: &[f64]) -> Result<Self> {
        if table.len() != nx * ns * ny || ny == 0 {
            return Err(domain!("channel table has {} entries, expected {}", table.len(), nx * ns * ny));
        }
        let rows = table
            .chunks(ny)
            .map(|r| Distribution::new(r.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Channel::new(nx, ns, &rows)
    }

    /// `y = (x + s) mod q`.
    pub fn additive(q: usize) -> Result<Self> {
        let mut rows = Vec::with_capacity(q * q);
        for x in 0..q {
            for s in 0..q {
                rows.push(Distribution::point_mass(q, (x + s) % q)?);
            }
        }
        Channel::new(q, q, &rows)
    }

    /// Binary bit-flip channel `y = x xor s`.
    pub fn xor() -> Self {
        Channel::additive(2).expect("binary additive channel")
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ns(&self) -> usize {
        self.ns
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn prob(&self, y: usize, x: usize, s: usize) -> f64 {
        self.table[(x * self.ns + s) * self.ny + y]
    }

    pub fn row(&self, x: usize, s: usize) -> &[f64] {
        let o = (x * self.ns + s) * self.ny;
        &self.table[o..o + self.ny]
    }

    /// Averaged channel `V(y|x) = sum_s q(s) W(y|x,s)`, laid out `[x][y]`.
    pub fn induced(&self, q: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.nx * self.ny];
        for x in 0..self.nx {
            for (s, &qs) in q.iter().enumerate() {
                if qs == 0.0 {
                    continue;
                }
                for y in 0..self.ny {
                    v[x * self.ny + y] += qs * self.prob(y, x, s);
                }
            }
        }
        v
    }

    /// The unique state consistent with `(x, y)`, if exactly one exists.
    pub fn implied_state(&self, x: usize, y: usize) -> Option<Symbol> {
        let mut found = None;
        for s in 0..self.ns {
            if self.prob(y, x, s) > 0.0 {
                if found.is_some() {
                    return None;
                }
                found = Some(s as Symbol);
            }
        }
        found
    }

    /// True when every output the channel can produce from `x` pins down the state.
    pub fn is_state_determined(&self) -> bool {
        (0..self.nx).all(|x| {
            (0..self.ny).all(|y| {
                let support = (0..self.ns).filter(|&s| self.prob(y, x, s) > 0.0).count();
                support <= 1
            })
        })
    }

    pub fn sample<R: RngCore + ?Sized>(&self, x: usize, s: usize, rng: &mut R) -> Symbol {
        sample_index(self.row(x, s), rng.gen::<f64>()) as Symbol
    }
}

/// Shannon entropy in bits.
pub fn entropy(d: &Distribution) -> f64 {
    -d.probs().iter().map(|&p| xlogx(p)).sum::<f64>()
}

pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(domain!("binary entropy argument {p} outside [0,1]"));
    }
    Ok(-xlogx(p) - xlogx(1.0 - p))
}

/// `p(1-w) + w(1-p)`.
pub fn binary_convolution(p: f64, w: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&w) {
        return Err(domain!("binary convolution arguments ({p}, {w}) outside [0,1]"));
    }
    Ok(p * (1.0 - w) + w * (1.0 - p))
}

/// `I(X;Y)` in bits for input `p_x` through the averaged channel `sum_s q_s(s) W(.|.,s)`.
pub fn mutual_information(p_x: &Distribution, q_s: &Distribution, w: &Channel) -> Result<f64> {
    if p_x.dim() != w.nx() || q_s.dim() != w.ns() {
        return Err(domain!(
            "dimension mismatch: P has {}, Q has {}, channel is {}x{}",
            p_x.dim(),
            q_s.dim(),
            w.nx(),
            w.ns()
        ));
    }
    let v = w.induced(q_s.probs());
    Ok(mi_induced(p_x.probs(), &v, w.ny()))
}

/// `I(P, V)` for an induced channel laid out `[x][y]`.
pub(crate) fn mi_induced(p: &[f64], v: &[f64], ny: usize) -> f64 {
    let mut out = vec![0.0; ny];
    for (x, &px) in p.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        for y in 0..ny {
            out[y] += px * v[x * ny + y];
        }
    }
    let h_y: f64 = -out.iter().map(|&q| xlogx(q)).sum::<f64>();
    let mut h_y_x = 0.0;
    for (x, &px) in p.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        h_y_x -= px * v[x * ny..(x + 1) * ny].iter().map(|&q| xlogx(q)).sum::<f64>();
    }
    let i = h_y - h_y_x;
    if i < 0.0 && i > -1e-12 {
        0.0
    } else {
        i
    }
}

/// Draws `y_i ~ W(.|x_i, s_i)` independently.
pub fn block_channel_sample<R: RngCore + ?Sized>(
    x: &[Symbol],
    s: &[Symbol],
    w: &Channel,
    rng: &mut R,
) -> Result<Vec<Symbol>> {
    if x.len() != s.len() {
        return Err(domain!("input length {} differs from state length {}", x.len(), s.len()));
    }
    let mut y = Vec::with_capacity(x.len());
    for (&xi, &si) in x.iter().zip(s) {
        if xi as usize >= w.nx() || si as usize >= w.ns() {
            return Err(domain!("symbol outside channel alphabet"));
        }
        y.push(w.sample(xi as usize, si as usize, rng));
    }
    Ok(y)
}

pub(crate) fn log2_or_floor(x: f64) -> f64 {
    if x <= 1e-300 {
        -997.0
    } else {
        log2(x)
    }
}
