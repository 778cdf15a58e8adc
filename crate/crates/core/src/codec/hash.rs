//! Keyed polynomial hash `r1 + sum_i m_i r2^i` over `GF(2^k)`.

use alloc::vec::Vec;

use super::gf::BinaryField;
use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashParams {
    pub field: BinaryField,
    /// Number `K` of field-element chunks in a message.
    pub chunks: usize,
}

impl HashParams {
    /// Chunks a `message_bits`-bit message into `ceil(bits / k)` field elements.
    pub fn for_message_bits(field: BinaryField, message_bits: usize) -> Self {
        let k = field.degree() as usize;
        HashParams { field, chunks: message_bits.div_ceil(k) }
    }

    /// Collision probability bound `K / q` for distinct messages and a uniform `r2`.
    pub fn collision_bound(&self) -> f64 {
        self.chunks as f64 / self.field.order() as f64
    }
}

/// Little-endian bit chunks of `k` bits, zero padded, `K` chunks in total.
pub fn message_chunks(bits: &[bool], params: &HashParams) -> Vec<u64> {
    let k = params.field.degree() as usize;
    (0..params.chunks)
        .map(|c| {
            (0..k).fold(0u64, |acc, j| {
                let idx = c * k + j;
                if idx < bits.len() && bits[idx] {
                    acc | (1 << j)
                } else {
                    acc
                }
            })
        })
        .collect()
}

/// `r1 + m_1 r2 + m_2 r2^2 + ... + m_K r2^K`, evaluated by Horner's rule.
pub fn poly_hash(chunks: &[u64], r1: u64, r2: u64, field: &BinaryField) -> Result<u64> {
    if !field.contains(r1) || !field.contains(r2) || chunks.iter().any(|&m| !field.contains(m)) {
        return Err(domain!("hash inputs must be elements of GF(2^{})", field.degree()));
    }
    let mut acc = 0u64;
    for &m in chunks.iter().rev() {
        acc = field.mul(field.add(acc, m), r2);
    }
    Ok(field.add(acc, r1))
}

/// Hash of a bit-string message.
pub fn hash_message(bits: &[bool], r1: u64, r2: u64, params: &HashParams) -> Result<u64> {
    poly_hash(&message_chunks(bits, params), r1, r2, &params.field)
}
