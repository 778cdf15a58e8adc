//! Message block, separator block and key block assembled into one code.

use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gf::BinaryField;
use super::hash::{hash_message, HashParams};
use super::keycode::{build_key_code, KeyCode, KeyCodeParams};
use super::listcode::{build_list_code, decode_segmented, DecodeBudget, ListCode, ListCodeParams, ListEntry};
use super::plan::{Layout, PhasePlan};
use crate::error::{domain, Error, Result};
use crate::jammer::CodewordSource;
use crate::prob::{Distribution, Symbol};
use crate::spec::WindowedAvcSpec;
use crate::window::{verify_windows, RangeMode};

#[derive(Debug, Clone, PartialEq)]
pub struct ThreePhaseParams {
    pub layout: Layout,
    /// Length of the message block.
    pub n1: usize,
    /// Number of data bits per transmission.
    pub data_bits: usize,
    pub p_x: Distribution,
    /// The hash works over `GF(2^field_degree)`.
    pub field_degree: u32,
    /// Key codeword distribution; defaults to `p_x` (guarded) or the type-1 distribution (interleaved).
    pub key_dist: Option<Distribution>,
    /// Requested key block length (the interleaved layout rounds it up to whole windows).
    pub key_blocklength: usize,
    pub allow_symmetrizable_key: bool,
    pub l_max: usize,
    pub segment_bits: usize,
    pub key_segment_bits: usize,
    /// Required interior margin of `p_x` inside the input constraint.
    pub delta: f64,
    pub profile_slack: f64,
    pub max_oversample: usize,
    pub max_expansions: usize,
    pub seed: u64,
}

impl ThreePhaseParams {
    pub fn new(layout: Layout, n1: usize, data_bits: usize, p_x: Distribution) -> Self {
        ThreePhaseParams {
            layout,
            n1,
            data_bits,
            p_x,
            field_degree: 8,
            key_dist: None,
            key_blocklength: 128,
            allow_symmetrizable_key: false,
            l_max: 32,
            segment_bits: 13,
            key_segment_bits: 16,
            delta: 0.02,
            profile_slack: 0.3,
            max_oversample: 64,
            max_expansions: 4096,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThreePhaseCode {
    pub params: ThreePhaseParams,
    pub spec: WindowedAvcSpec,
    pub plan: PhasePlan,
    pub list_code: ListCode,
    pub key_code: Option<KeyCode>,
    pub hash: Option<HashParams>,
    pub budget: DecodeBudget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeStatus {
    Unique,
    /// The list decoder returned no candidate.
    ListFailure,
    /// No list entry matched the decoded keys.
    DisambiguationFailure,
    /// Several entries matched; the one with the lowest message index is returned.
    Ambiguous,
}

impl DecodeStatus {
    pub fn label(self) -> &'static str {
        match self {
            DecodeStatus::Unique => "unique",
            DecodeStatus::ListFailure => "list_failure",
            DecodeStatus::DisambiguationFailure => "disambiguation_failure",
            DecodeStatus::Ambiguous => "ambiguous",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub message: Option<Vec<bool>>,
    pub status: DecodeStatus,
    pub list_size: usize,
    pub within_budget: f64,
    pub overflow: bool,
    pub expansion_limited: bool,
    pub keys: Option<(u64, u64)>,
    pub survivors: usize,
}

/// Builds the plan, the list code and the key code for `spec`.
pub fn build_three_phase(spec: &WindowedAvcSpec, params: &ThreePhaseParams) -> Result<ThreePhaseCode> {
    let gamma = &spec.gamma;
    if params.p_x.dim() != gamma.dim() {
        return Err(domain!("input distribution dimension {} differs from input alphabet {}", params.p_x.dim(), gamma.dim()));
    }
    let margin = gamma.interior_margin(&params.p_x);
    if margin < params.delta {
        return Err(domain!("input distribution has interior margin {margin:.4}, below the required {}", params.delta));
    }
    let hash = match params.layout {
        Layout::Plain => None,
        _ => Some(HashParams::for_message_bits(BinaryField::new(params.field_degree)?, params.data_bits)),
    };
    let key_bits = 2 * params.field_degree as usize;
    let plan = match &params.layout {
        Layout::Plain => PhasePlan::plain(params.n1, spec.w_x),
        Layout::Guarded { guard } => PhasePlan::guarded(params.n1, spec.w_x, guard, params.key_blocklength)?,
        Layout::Interleaved(ip) => PhasePlan::interleaved(params.n1, spec.w_x, ip, params.key_blocklength, gamma)?,
    };
    let message_bits = params.data_bits + hash.map_or(0, |h| h.field.degree() as usize);
    let mut lp = ListCodeParams::new(params.n1, message_bits, params.p_x.clone(), spec.w_x);
    lp.l_max = params.l_max;
    lp.segment_bits = params.segment_bits;
    lp.profile_slack = params.profile_slack;
    lp.max_oversample = params.max_oversample;
    lp.max_expansions = params.max_expansions;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(1);
    let list_code = build_list_code(&lp, gamma, &[], &plan.phase2, &mut rng)?;
    let key_code = match &params.layout {
        Layout::Plain => None,
        layout => {
            let t = match (&params.key_dist, layout) {
                (Some(t), _) => t.clone(),
                (None, Layout::Interleaved(ip)) => ip.t1.clone(),
                (None, _) => params.p_x.clone(),
            };
            let mut kp = KeyCodeParams::new(key_bits, t);
            kp.allow_symmetrizable = params.allow_symmetrizable_key;
            kp.segment_bits = params.key_segment_bits;
            kp.profile_slack = params.profile_slack;
            kp.max_oversample = params.max_oversample;
            rng.set_stream(2);
            Some(build_key_code(&kp, &spec.channel, gamma, &spec.lambda, &plan, &mut rng)?)
        }
    };
    let budget = DecodeBudget::new(&spec.channel, &spec.lambda, spec.w_s, plan.total_len())?;
    Ok(ThreePhaseCode { params: params.clone(), spec: spec.clone(), plan, list_code, key_code, hash, budget })
}

/// Indices of list entries whose trailing hash bits match `hash(data, r1, r2)`.
pub fn disambiguate(entries: &[ListEntry], data_bits: usize, r1: u64, r2: u64, hash: &HashParams) -> Result<Vec<usize>> {
    let k = hash.field.degree() as usize;
    let mut out = Vec::new();
    for (i, e) in entries.iter().enumerate() {
        if e.message.len() != data_bits + k {
            return Err(domain!("list entry has {} bits, expected {}", e.message.len(), data_bits + k));
        }
        let (data, tag) = e.message.split_at(data_bits);
        let tag = bits_to_u64(tag);
        if hash_message(data, r1, r2, hash)? == tag {
            out.push(i);
        }
    }
    Ok(out)
}

fn bits_to_u64(bits: &[bool]) -> u64 {
    bits.iter().enumerate().fold(0, |acc, (k, &b)| acc | (u64::from(b) << k))
}

/// Orders messages by their index, bit 0 least significant.
fn index_cmp(a: &[bool], b: &[bool]) -> core::cmp::Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

impl ThreePhaseCode {
    pub fn total_len(&self) -> usize {
        self.plan.total_len()
    }

    pub fn data_bits(&self) -> usize {
        self.params.data_bits
    }

    /// Data rate over the whole transmission.
    pub fn rate(&self) -> f64 {
        self.params.data_bits as f64 / self.total_len() as f64
    }

    pub fn field(&self) -> Option<BinaryField> {
        self.hash.map(|h| h.field)
    }

    /// Bits carried by the message block: data followed by the hash tag.
    pub fn extended_message(&self, message: &[bool], r1: u64, r2: u64) -> Result<Vec<bool>> {
        if message.len() != self.params.data_bits {
            return Err(domain!("message has {} bits, code carries {}", message.len(), self.params.data_bits));
        }
        let mut m = message.to_vec();
        if let Some(h) = &self.hash {
            let tag = hash_message(message, r1, r2, h)?;
            m.extend((0..h.field.degree()).map(|k| (tag >> k) & 1 == 1));
        }
        Ok(m)
    }

    pub fn encode(&self, message: &[bool], r1: u64, r2: u64) -> Result<Vec<Symbol>> {
        let phase1 = self.list_code.encode(&self.extended_message(message, r1, r2)?)?;
        let key = match (&self.key_code, self.field()) {
            (Some(kc), Some(f)) => kc.encode(r1 | (r2 << f.degree()))?,
            _ => Vec::new(),
        };
        let x = self.plan.assemble(&phase1, &key)?;
        let report = verify_windows(&x, self.spec.w_x, &self.spec.gamma, RangeMode::Inclusive)?;
        if !report.valid {
            return Err(Error::Invariant(alloc::format!(
                "assembled codeword violates the input constraint at window {}",
                report.violations[0].start
            )));
        }
        Ok(x)
    }

    /// Draws fresh keys from `rng` and encodes.
    pub fn encode_random(&self, message: &[bool], rng: &mut dyn RngCore) -> Result<Vec<Symbol>> {
        let (r1, r2) = self.sample_keys(rng);
        self.encode(message, r1, r2)
    }

    pub fn sample_keys(&self, rng: &mut dyn RngCore) -> (u64, u64) {
        match self.field() {
            Some(f) => (rng.gen_range(0..f.order()), rng.gen_range(0..f.order())),
            None => (0, 0),
        }
    }

    pub fn sample_message(&self, rng: &mut dyn RngCore) -> Vec<bool> {
        (0..self.params.data_bits).map(|_| rng.gen::<bool>()).collect()
    }

    pub fn decode(&self, y: &[Symbol]) -> Result<DecodeOutcome> {
        if y.len() != self.total_len() {
            return Err(domain!("received {} symbols, code length is {}", y.len(), self.total_len()));
        }
        let n1 = self.plan.n1;
        let list = decode_segmented(&y[..n1], &self.list_code.code, &self.budget, self.list_code.l_max, self.list_code.max_expansions)?;
        let mut out = DecodeOutcome {
            message: None,
            status: DecodeStatus::ListFailure,
            list_size: list.entries.len(),
            within_budget: list.within_budget,
            overflow: list.overflow,
            expansion_limited: list.expansion_limited,
            keys: None,
            survivors: 0,
        };
        if list.entries.is_empty() {
            return Ok(out);
        }
        let data_bits = self.params.data_bits;
        let (kc, h) = match (&self.key_code, &self.hash) {
            (Some(kc), Some(h)) => (kc, h),
            _ => {
                out.survivors = list.entries.len();
                out.status = if list.entries.len() == 1 { DecodeStatus::Unique } else { DecodeStatus::Ambiguous };
                out.message = Some(list.entries[0].message.clone());
                return Ok(out);
            }
        };
        let (key, _) = kc.decode(&self.plan.key_symbols(y)?, &self.budget)?;
        let d = h.field.degree();
        let mask = if d >= 64 { u64::MAX } else { (1u64 << d) - 1 };
        let (r1, r2) = (key & mask, (key >> d) & mask);
        out.keys = Some((r1, r2));
        let survivors = disambiguate(&list.entries, data_bits, r1, r2, h)?;
        out.survivors = survivors.len();
        out.status = match survivors.len() {
            0 => DecodeStatus::DisambiguationFailure,
            1 => DecodeStatus::Unique,
            _ => DecodeStatus::Ambiguous,
        };
        out.message = survivors
            .iter()
            .map(|&i| &list.entries[i].message[..data_bits])
            .min_by(|a, b| index_cmp(a, b))
            .map(<[bool]>::to_vec);
        Ok(out)
    }
}

impl CodewordSource for ThreePhaseCode {
    fn codeword_len(&self) -> usize {
        self.total_len()
    }

    fn sample_codeword(&self, rng: &mut dyn RngCore) -> Result<Vec<Symbol>> {
        let m = self.sample_message(rng);
        self.encode_random(&m, rng)
    }
}
