//! Unique-decoding code for the hash keys, sent after the separator block.

use alloc::vec::Vec;

use rand::RngCore;

use super::listcode::{decode_min_score, DecodeBudget};
use super::plan::{Layout, PhasePlan};
use super::segmented::{SegmentedCode, SegmentedParams};
use crate::constraint::ConstraintSet;
use crate::error::{domain, Result};
use crate::prob::{Channel, Distribution, Symbol};
use crate::symmetrize::ecn_symmetrizable;
use crate::window::codeword_admissible;

#[derive(Debug, Clone, PartialEq)]
pub struct KeyCodeParams {
    pub key_bits: usize,
    /// Key codeword distribution; must be non-symmetrizable unless overridden.
    pub t: Distribution,
    pub allow_symmetrizable: bool,
    pub segment_bits: usize,
    pub profile_slack: f64,
    pub max_oversample: usize,
}

impl KeyCodeParams {
    pub fn new(key_bits: usize, t: Distribution) -> Self {
        KeyCodeParams { key_bits, t, allow_symmetrizable: false, segment_bits: 16, profile_slack: 0.3, max_oversample: 64 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyCode {
    pub code: SegmentedCode,
    pub t: Distribution,
    /// Whether `t` is symmetrizable (only possible with the override).
    pub symmetrizable: bool,
}

/// Builds the key code for the key positions of `plan`.
pub fn build_key_code(
    params: &KeyCodeParams,
    channel: &Channel,
    gamma: &ConstraintSet,
    lambda: &ConstraintSet,
    plan: &PhasePlan,
    rng: &mut dyn RngCore,
) -> Result<KeyCode> {
    let symmetrizable = ecn_symmetrizable(&params.t, channel, lambda)?.symmetrizable;
    if symmetrizable && !params.allow_symmetrizable {
        return Err(domain!("key distribution is symmetrizable for this channel and state constraint"));
    }
    let w_x = plan.w_x;
    let mut sp = SegmentedParams {
        n: plan.key_len(),
        message_bits: params.key_bits,
        dist: &params.t,
        gamma,
        w_x,
        segment_bits: params.segment_bits,
        profile_slack: params.profile_slack,
        max_oversample: params.max_oversample,
        preceding: &plan.phase2,
        following: &[],
    };
    let code = match &plan.layout {
        Layout::Plain => return Err(domain!("the plain layout has no key block")),
        Layout::Guarded { .. } => SegmentedCode::build(&sp, rng, None)?,
        Layout::Interleaved(_) => {
            if params.key_bits > params.segment_bits {
                return Err(domain!(
                    "interleaved key blocks carry at most {} bits, requested {}",
                    params.segment_bits,
                    params.key_bits
                ));
            }
            sp.segment_bits = params.key_bits.max(1);
            let accept = |_: usize, cand: &[Symbol]| match plan.fill_phase3(cand) {
                Ok(block) => codeword_admissible(&block, w_x, gamma, &plan.phase2, &[]).unwrap_or(false),
                Err(_) => false,
            };
            SegmentedCode::build(&sp, rng, Some(&accept))?
        }
    };
    Ok(KeyCode { code, t: params.t.clone(), symmetrizable })
}

impl KeyCode {
    pub fn key_bits(&self) -> usize {
        self.code.message_bits
    }

    pub fn encode(&self, key: u64) -> Result<Vec<Symbol>> {
        let bits = self.key_bits();
        if bits < 64 && key >> bits != 0 {
            return Err(domain!("key {key:#x} exceeds {bits} bits"));
        }
        let m: Vec<bool> = (0..bits).map(|k| (key >> k) & 1 == 1).collect();
        self.code.encode(&m)
    }

    /// Minimum-score key estimate and its score.
    pub fn decode(&self, y_key: &[Symbol], budget: &DecodeBudget) -> Result<(u64, f64)> {
        let (idx, score) = decode_min_score(y_key, &self.code, budget)?;
        let m = self.code.message_from_indices(&idx);
        let key = m.iter().enumerate().fold(0u64, |acc, (k, &b)| acc | (u64::from(b) << k));
        Ok((key, score))
    }
}
