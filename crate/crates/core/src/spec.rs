//! Problem instance: channel, input and state constraints, window lengths.

use alloc::vec;

use crate::constraint::{ConstraintSet, HalfSpace};
use crate::error::{domain, Result};
use crate::prob::{Alphabet, Channel};

#[derive(Debug, Clone, PartialEq)]
pub struct WindowedAvcSpec {
    pub x_alphabet: Alphabet,
    pub s_alphabet: Alphabet,
    pub y_alphabet: Alphabet,
    pub channel: Channel,
    /// Input constraint applied to every `w_x`-window.
    pub gamma: ConstraintSet,
    /// State constraint applied to every `w_s`-window.
    pub lambda: ConstraintSet,
    pub w_x: usize,
    pub w_s: usize,
    pub n: usize,
}

impl WindowedAvcSpec {
    pub fn new(
        channel: Channel,
        gamma: ConstraintSet,
        lambda: ConstraintSet,
        w_x: usize,
        w_s: usize,
        n: usize,
    ) -> Result<Self> {
        if gamma.dim() != channel.nx() {
            return Err(domain!("input constraint has dimension {}, channel input alphabet {}", gamma.dim(), channel.nx()));
        }
        if lambda.dim() != channel.ns() {
            return Err(domain!("state constraint has dimension {}, channel state alphabet {}", lambda.dim(), channel.ns()));
        }
        if n == 0 {
            return Err(domain!("blocklength must be positive"));
        }
        for (name, w) in [("w_x", w_x), ("w_s", w_s)] {
            if w == 0 || w > n {
                return Err(domain!("window {name}={w} must satisfy 1 <= {name} <= n={n}"));
            }
        }
        Ok(WindowedAvcSpec {
            x_alphabet: Alphabet::new(channel.nx())?,
            s_alphabet: Alphabet::new(channel.ns())?,
            y_alphabet: Alphabet::new(channel.ny())?,
            channel,
            gamma,
            lambda,
            w_x,
            w_s,
            n,
        })
    }

    /// Single whole-block constraints (`w_x = w_s = n`).
    pub fn windowless(channel: Channel, gamma: ConstraintSet, lambda: ConstraintSet, n: usize) -> Result<Self> {
        WindowedAvcSpec::new(channel, gamma, lambda, n, n, n)
    }

    /// Binary bit-flip channel with input weight cap `w` and state weight cap `p`.
    pub fn bitflip(w: f64, p: f64, w_x: usize, w_s: usize, n: usize) -> Result<Self> {
        WindowedAvcSpec::new(
            Channel::xor(),
            ConstraintSet::weight_cap(w)?,
            ConstraintSet::weight_cap(p)?,
            w_x,
            w_s,
            n,
        )
    }

    /// Window ratio `w_s / w_x`.
    pub fn alpha(&self) -> f64 {
        self.w_s as f64 / self.w_x as f64
    }
}

/// `<c, P> <= bound` with `c = e_k`.
pub fn coordinate_cap(dim: usize, k: usize, bound: f64) -> HalfSpace {
    let mut c = vec![0.0; dim];
    c[k] = 1.0;
    HalfSpace::new(c, bound)
}
