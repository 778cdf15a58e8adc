//! Binary extension fields `GF(2^k)` with carry-less arithmetic, `k <= 32`.

use crate::error::{domain, Result};

/// Reduction polynomials (including the leading term) indexed by degree.
const MODULI: [u64; 33] = [
    0,
    0x3,
    0x7,
    0xB,
    0x13,
    0x25,
    0x43,
    0x83,
    0x11B,
    0x211,
    0x409,
    0x805,
    0x1053,
    0x201B,
    0x4443,
    0x8003,
    0x1100B,
    0x2_0009,
    0x4_0081,
    0x8_0027,
    0x10_0009,
    0x20_0005,
    0x40_0003,
    0x80_0021,
    0x100_001B,
    0x200_0009,
    0x400_0047,
    0x800_0027,
    0x1000_0009,
    0x2000_0005,
    0x4000_0053,
    0x8000_0009,
    0x1_0040_0007,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BinaryField {
    degree: u32,
    modulus: u64,
}

impl BinaryField {
    /// Field of order `2^degree` with a built-in irreducible modulus.
    pub fn new(degree: u32) -> Result<Self> {
        if degree == 0 || degree > 32 {
            return Err(domain!("field degree {degree} outside 1..=32"));
        }
        Ok(BinaryField { degree, modulus: MODULI[degree as usize] })
    }

    /// Caller-supplied modulus of the given degree; irreducibility is not checked.
    pub fn with_modulus(degree: u32, modulus: u64) -> Result<Self> {
        if degree == 0 || degree > 32 || modulus >> degree != 1 {
            return Err(domain!("modulus {modulus:#x} does not have degree {degree}"));
        }
        Ok(BinaryField { degree, modulus })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `q = 2^degree`.
    pub fn order(&self) -> u64 {
        1u64 << self.degree
    }

    pub fn contains(&self, a: u64) -> bool {
        a < self.order()
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        reduce(clmul(a, b), self.modulus, self.degree)
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.order() - 2))
        }
    }
}

/// Carry-less product of two polynomials of degree below 32.
#[inline]
pub fn clmul(a: u64, b: u64) -> u64 {
    let mut r = 0u64;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            r ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    r
}

/// Remainder of `a` modulo a polynomial of degree `d`.
#[inline]
pub fn reduce(mut a: u64, modulus: u64, d: u32) -> u64 {
    let mut bit = 63 - a.leading_zeros().min(63) as i64;
    while a != 0 && bit >= d as i64 {
        if (a >> bit) & 1 == 1 {
            a ^= modulus << (bit - d as i64);
        }
        bit -= 1;
    }
    a
}
