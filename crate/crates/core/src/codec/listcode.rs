//! Phase-one list code and its budget-ball list decoder.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::RngCore;

use super::segmented::{pack_bits, Segment, SegmentedCode, SegmentedParams};
use crate::constraint::ConstraintSet;
use crate::error::{domain, Result};
use crate::math::{ceil, floor};
use crate::prob::{log2_or_floor, Channel, Distribution, Symbol};
use crate::window::{verify_windows, RangeMode};

/// How a received block is compared with a candidate input block.
#[derive(Debug, Clone, PartialEq)]
pub enum ScoreRule {
    /// Number of positions the idle state cannot explain. For additive
    /// channels with idle state 0 this is the Hamming distance.
    ForcedStates { idle: Symbol },
    /// Negative log-likelihood under the averaged channel `V(y|x)`, laid out `[x][y]`.
    Likelihood { v: Vec<f64> },
}

/// What the decoder assumes about the jammer.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeBudget {
    pub channel: Channel,
    pub rule: ScoreRule,
    /// Largest number of non-idle states in one state window.
    pub per_window: usize,
    pub w_s: usize,
    /// Length of the whole transmission; windows only bind when it is at least `w_s`.
    pub n_total: usize,
    /// State constraint used to reject candidates whose implied state sequence
    /// violates it (only for channels where `(x, y)` determines the state).
    pub state_check: Option<ConstraintSet>,
}

impl DecodeBudget {
    /// Chooses the forced-state rule when some state's point mass satisfies `lambda`,
    /// and otherwise the likelihood rule against the uniform mixture of `lambda`'s vertices.
    pub fn new(channel: &Channel, lambda: &ConstraintSet, w_s: usize, n_total: usize) -> Result<Self> {
        if lambda.dim() != channel.ns() {
            return Err(domain!("state constraint dimension {} differs from channel states {}", lambda.dim(), channel.ns()));
        }
        if w_s == 0 {
            return Err(domain!("state window must be positive"));
        }
        match idle_state(lambda) {
            Some(idle) => {
                let mut e = vec![0.0; lambda.dim()];
                e[idle as usize] = 1.0;
                let (min_idle, _) = lambda.minimize(&e)?;
                let rho = (1.0 - min_idle).clamp(0.0, 1.0);
                let per_window = floor(rho * w_s as f64 + 1e-9) as usize;
                let state_check = channel.is_state_determined().then(|| lambda.clone());
                Ok(DecodeBudget {
                    channel: channel.clone(),
                    rule: ScoreRule::ForcedStates { idle },
                    per_window,
                    w_s,
                    n_total,
                    state_check,
                })
            }
            None => {
                let verts = lambda.vertices();
                let mut q = vec![0.0; lambda.dim()];
                for v in &verts {
                    for (a, b) in q.iter_mut().zip(v.probs()) {
                        *a += b / verts.len() as f64;
                    }
                }
                DecodeBudget::likelihood(channel, &Distribution::from_weights(q)?, w_s, n_total)
            }
        }
    }

    /// Likelihood scoring against a fixed state distribution.
    pub fn likelihood(channel: &Channel, q: &Distribution, w_s: usize, n_total: usize) -> Result<Self> {
        if q.dim() != channel.ns() {
            return Err(domain!("state distribution has dimension {}, channel {}", q.dim(), channel.ns()));
        }
        Ok(DecodeBudget {
            channel: channel.clone(),
            rule: ScoreRule::Likelihood { v: channel.induced(q.probs()) },
            per_window: w_s,
            w_s,
            n_total,
            state_check: None,
        })
    }

    /// Largest admissible score for a block of `len` consecutive symbols.
    pub fn block_budget(&self, len: usize) -> f64 {
        match self.rule {
            ScoreRule::Likelihood { .. } => f64::INFINITY,
            ScoreRule::ForcedStates { .. } => {
                if self.n_total < self.w_s {
                    return len as f64;
                }
                let windows = ceil(len as f64 / self.w_s as f64) as usize;
                (windows * self.per_window).min(len) as f64
            }
        }
    }
}

/// A state whose point mass lies in `lambda`, preferring one whose coefficients
/// are minimal in every inequality.
pub fn idle_state(lambda: &ConstraintSet) -> Option<Symbol> {
    let d = lambda.dim();
    let inside: Vec<usize> = (0..d)
        .filter(|&k| Distribution::point_mass(d, k).map(|p| lambda.contains(&p)).unwrap_or(false))
        .collect();
    let dominant = inside.iter().copied().find(|&k| {
        lambda.halfspaces().iter().all(|h| h.coeffs[k] <= h.min_coeff() + 1e-15)
    });
    dominant.or(inside.first().copied()).map(|k| k as Symbol)
}

/// Per-position cost table `[i][x]` for a received block.
pub(crate) struct Scorer {
    nx: usize,
    cost: Vec<f64>,
    /// Set for binary inputs under the forced-state rule (bit-parallel path).
    binary: bool,
}

impl Scorer {
    pub fn new(y: &[Symbol], budget: &DecodeBudget) -> Result<Self> {
        let w = &budget.channel;
        let nx = w.nx();
        let mut cost = vec![0.0; y.len() * nx];
        for (i, &yi) in y.iter().enumerate() {
            if yi as usize >= w.ny() {
                return Err(domain!("received symbol {yi} outside output alphabet"));
            }
            for x in 0..nx {
                cost[i * nx + x] = match &budget.rule {
                    ScoreRule::ForcedStates { idle } => {
                        if w.prob(yi as usize, x, *idle as usize) > 0.0 {
                            0.0
                        } else {
                            1.0
                        }
                    }
                    ScoreRule::Likelihood { v } => -log2_or_floor(v[x * w.ny() + yi as usize]),
                };
            }
        }
        let binary = nx == 2 && matches!(budget.rule, ScoreRule::ForcedStates { .. });
        Ok(Scorer { nx, cost, binary })
    }

    /// Scores of every sub-codeword of `seg`, which starts at `offset` in the scored block.
    pub fn segment_scores(&self, seg: &Segment, offset: usize) -> Vec<f64> {
        let n = seg.size();
        if seg.len == 0 {
            return vec![0.0; n];
        }
        if let (true, Some(packed)) = (self.binary, &seg.packed) {
            let m0: Vec<bool> = (0..seg.len).map(|i| self.cost[(offset + i) * 2] > 0.0).collect();
            let m1: Vec<bool> = (0..seg.len).map(|i| self.cost[(offset + i) * 2 + 1] > 0.0).collect();
            let (m0, m1) = (pack_bits(&m0), pack_bits(&m1));
            return (0..n)
                .map(|r| {
                    packed
                        .row(r)
                        .iter()
                        .zip(m0.iter().zip(&m1))
                        .map(|(&x, (&a, &b))| ((!x & a) | (x & b)).count_ones())
                        .sum::<u32>() as f64
                })
                .collect();
        }
        (0..n)
            .map(|r| {
                seg.rows
                    .row(r)
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| self.cost[(offset + i) * self.nx + x as usize])
                    .sum()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ListEntry {
    pub message: Vec<bool>,
    pub indices: Vec<usize>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ListDecodeOutput {
    /// Entries in increasing score, ties broken by message index.
    pub entries: Vec<ListEntry>,
    /// Number of messages whose score is within the budget, before state
    /// checks and truncation (saturating).
    pub within_budget: f64,
    /// More than `l_max` admissible entries were found.
    pub overflow: bool,
    /// The enumeration hit its expansion cap before exhausting the budget.
    pub expansion_limited: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ListCodeParams {
    pub n: usize,
    pub message_bits: usize,
    pub p_x: Distribution,
    pub w_x: usize,
    pub l_max: usize,
    pub segment_bits: usize,
    pub profile_slack: f64,
    pub max_oversample: usize,
    pub max_expansions: usize,
}

impl ListCodeParams {
    pub fn new(n: usize, message_bits: usize, p_x: Distribution, w_x: usize) -> Self {
        ListCodeParams {
            n,
            message_bits,
            p_x,
            w_x,
            l_max: 32,
            segment_bits: 13,
            profile_slack: 0.3,
            max_oversample: 64,
            max_expansions: 4096,
        }
    }

    /// Message bits for rate `rate` at blocklength `n`, rounded up.
    pub fn bits_for_rate(n: usize, rate: f64) -> usize {
        ceil(rate * n as f64 - 1e-9).max(0.0) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ListCode {
    pub code: SegmentedCode,
    pub l_max: usize,
    pub max_expansions: usize,
    pub p_x: Distribution,
}

/// Builds the list code. `preceding` and `following` are the fixed symbols
/// adjacent to the block in the transmitted sequence.
pub fn build_list_code(
    params: &ListCodeParams,
    gamma: &ConstraintSet,
    preceding: &[Symbol],
    following: &[Symbol],
    rng: &mut dyn RngCore,
) -> Result<ListCode> {
    if params.l_max == 0 {
        return Err(domain!("list size must be positive"));
    }
    let sp = SegmentedParams {
        n: params.n,
        message_bits: params.message_bits,
        dist: &params.p_x,
        gamma,
        w_x: params.w_x,
        segment_bits: params.segment_bits,
        profile_slack: params.profile_slack,
        max_oversample: params.max_oversample,
        preceding,
        following,
    };
    let code = SegmentedCode::build(&sp, rng, None)?;
    Ok(ListCode { code, l_max: params.l_max, max_expansions: params.max_expansions, p_x: params.p_x.clone() })
}

impl ListCode {
    pub fn n(&self) -> usize {
        self.code.n
    }

    pub fn message_bits(&self) -> usize {
        self.code.message_bits
    }

    pub fn rate(&self) -> f64 {
        self.code.rate()
    }

    pub fn encode(&self, message: &[bool]) -> Result<Vec<Symbol>> {
        self.code.encode(message)
    }
}

#[derive(PartialEq)]
struct Node {
    score: f64,
    key: Vec<usize>,
    ranks: Vec<usize>,
    last: usize,
}

impl Eq for Node {}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap.
        other
            .score
            .total_cmp(&self.score)
            .then_with(|| other.key.iter().rev().cmp(self.key.iter().rev()))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sorted `(score, index)` lists per segment, restricted to the block budget.
fn ranked(code: &SegmentedCode, scorer: &Scorer, budget: &DecodeBudget, cap: usize) -> (Vec<Vec<(f64, usize)>>, Vec<Vec<f64>>) {
    let mut lists = Vec::with_capacity(code.segments.len());
    let mut hists = Vec::new();
    for seg in &code.segments {
        let scores = scorer.segment_scores(seg, seg.start);
        let limit = budget.block_budget(seg.len);
        let mut l: Vec<(f64, usize)> =
            scores.iter().enumerate().filter(|(_, s)| **s <= limit + 1e-9).map(|(i, s)| (*s, i)).collect();
        l.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        if matches!(budget.rule, ScoreRule::ForcedStates { .. }) {
            let top = limit as usize;
            let mut h = vec![0.0; top + 1];
            for &(s, _) in &l {
                h[s as usize] += 1.0;
            }
            hists.push(h);
        }
        l.truncate(cap);
        lists.push(l);
    }
    (lists, hists)
}

/// Number of index tuples with total score at most `total`.
fn count_within(hists: &[Vec<f64>], total: usize) -> f64 {
    let mut ways = vec![0.0; total + 1];
    ways[0] = 1.0;
    for h in hists {
        let mut next = vec![0.0; total + 1];
        for (t, &w) in ways.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (s, &c) in h.iter().enumerate() {
                if c > 0.0 && t + s <= total {
                    next[t + s] += w * c;
                }
            }
        }
        ways = next;
    }
    ways.iter().sum::<f64>().min(f64::MAX)
}

fn states_admissible(x: &[Symbol], y: &[Symbol], budget: &DecodeBudget, lambda: &ConstraintSet) -> bool {
    let mut s = Vec::with_capacity(x.len());
    for (&xi, &yi) in x.iter().zip(y) {
        match budget.channel.implied_state(xi as usize, yi as usize) {
            Some(v) => s.push(v),
            None => return false,
        }
    }
    if budget.n_total < budget.w_s || s.len() < budget.w_s {
        return true;
    }
    verify_windows(&s, budget.w_s, lambda, RangeMode::Inclusive).map(|r| r.valid).unwrap_or(false)
}

/// Lists the messages whose codewords explain `y` within the jamming budget,
/// best first, at most `l_max` of them.
pub fn list_decode(y: &[Symbol], code: &ListCode, budget: &DecodeBudget) -> Result<ListDecodeOutput> {
    decode_segmented(y, &code.code, budget, code.l_max, code.max_expansions)
}

pub(crate) fn decode_segmented(
    y: &[Symbol],
    code: &SegmentedCode,
    budget: &DecodeBudget,
    l_max: usize,
    max_expansions: usize,
) -> Result<ListDecodeOutput> {
    if y.len() != code.n {
        return Err(domain!("received block has {} symbols, code length is {}", y.len(), code.n));
    }
    let scorer = Scorer::new(y, budget)?;
    let (lists, hists) = ranked(code, &scorer, budget, max_expansions.max(1));
    let total = budget.block_budget(code.n);
    let within_budget = if hists.is_empty() {
        lists.iter().map(|l| l.len() as f64).product()
    } else {
        count_within(&hists, total as usize)
    };
    let mut out = ListDecodeOutput { within_budget, ..Default::default() };
    if lists.iter().any(|l| l.is_empty()) {
        return Ok(out);
    }
    let b = lists.len();
    let key_of = |ranks: &[usize]| ranks.iter().enumerate().map(|(j, &r)| lists[j][r].1).collect::<Vec<_>>();
    let score_of = |ranks: &[usize]| ranks.iter().enumerate().map(|(j, &r)| lists[j][r].0).sum::<f64>();
    let mut heap = BinaryHeap::new();
    let start = vec![0; b];
    heap.push(Node { score: score_of(&start), key: key_of(&start), ranks: start, last: 0 });
    let mut expansions = 0;
    loop {
        if expansions >= max_expansions {
            out.expansion_limited = !heap.is_empty();
            break;
        }
        let Some(node) = heap.pop() else { break };
        if node.score > total + 1e-9 {
            break;
        }
        expansions += 1;
        let x = code.codeword_from_indices(&node.key);
        let ok = match &budget.state_check {
            Some(lambda) => states_admissible(&x, y, budget, lambda),
            None => true,
        };
        if ok {
            if out.entries.len() == l_max {
                out.overflow = true;
                break;
            }
            out.entries.push(ListEntry {
                message: code.message_from_indices(&node.key),
                indices: node.key.clone(),
                score: node.score,
            });
        }
        for j in node.last..b {
            if node.ranks[j] + 1 < lists[j].len() {
                let mut r = node.ranks.clone();
                r[j] += 1;
                heap.push(Node { score: score_of(&r), key: key_of(&r), ranks: r, last: j });
            }
        }
    }
    Ok(out)
}

/// Minimum-score decoding: the best sub-codeword of every segment independently.
pub(crate) fn decode_min_score(y: &[Symbol], code: &SegmentedCode, budget: &DecodeBudget) -> Result<(Vec<usize>, f64)> {
    if y.len() != code.n {
        return Err(domain!("received block has {} symbols, code length is {}", y.len(), code.n));
    }
    let scorer = Scorer::new(y, budget)?;
    let mut idx = Vec::with_capacity(code.segments.len());
    let mut total = 0.0;
    for seg in &code.segments {
        let scores = scorer.segment_scores(seg, seg.start);
        let (best, s) = scores
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
        idx.push(best);
        total += s;
    }
    Ok((idx, total))
}
