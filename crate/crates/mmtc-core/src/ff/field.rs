use alloc::sync::Arc;
use alloc::vec::Vec;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::FfError;

/// Field parameters: characteristic `p`, extension degree `n`, order `p^n`.
///
/// Supported: prime fields GF(p) with `p < 2^31`, and binary extension fields
/// GF(2^n) for `1 <= n <= 16`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub p: u32,
    #[serde(default = "one")]
    pub n: u32,
}

fn one() -> u32 {
    1
}

impl FieldSpec {
    pub const fn prime(p: u32) -> Self {
        FieldSpec { p, n: 1 }
    }

    pub const fn binary(n: u32) -> Self {
        FieldSpec { p: 2, n }
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.n)
    }
}

/// Reduction polynomials for GF(2^n), bit `i` is the coefficient of `x^i`.
/// Each is primitive, so `x` generates the multiplicative group.
pub const BINARY_POLYNOMIALS: [u32; 17] = [
    0, 0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x83, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443,
    0x8003, 0x1100B,
];

#[derive(Debug)]
struct LogTables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

#[derive(Clone, Debug)]
enum Repr {
    Prime(u64),
    Binary(Arc<LogTables>),
}

/// Arithmetic over one finite field. Elements are `u32` in `0..q`; for
/// GF(2^n) the bits are polynomial coefficients.
#[derive(Clone, Debug)]
pub struct Field {
    spec: FieldSpec,
    repr: Repr,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Field {}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let p = p as u64;
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self, FfError> {
        if !is_prime(spec.p) {
            return Err(FfError::NotPrime(spec.p));
        }
        match (spec.p, spec.n) {
            (p, 1) if p != 2 => {
                if p >= 1 << 31 {
                    return Err(FfError::Unsupported { p, n: 1 });
                }
                Ok(Field { spec, repr: Repr::Prime(p as u64) })
            }
            (2, n) if (1..=16).contains(&n) => Ok(Field { spec, repr: Repr::Binary(Arc::new(binary_tables(n))) }),
            (p, n) => Err(FfError::Unsupported { p, n }),
        }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn order(&self) -> u32 {
        self.spec.order() as u32
    }

    pub fn check(&self, a: u32) -> Result<u32, FfError> {
        if a < self.order() {
            Ok(a)
        } else {
            Err(FfError::OutOfField { value: a, order: self.order() })
        }
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        match &self.repr {
            Repr::Prime(p) => ((a as u64 + b as u64) % p) as u32,
            Repr::Binary(_) => a ^ b,
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        match &self.repr {
            Repr::Prime(p) => ((*p - a as u64) % p) as u32,
            Repr::Binary(_) => a,
        }
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.repr {
            Repr::Prime(p) => ((a as u64 * b as u64) % p) as u32,
            Repr::Binary(t) => {
                if a == 0 || b == 0 {
                    0
                } else {
                    t.exp[(t.log[a as usize] + t.log[b as usize]) as usize]
                }
            }
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        match &self.repr {
            Repr::Prime(p) => Some(self.pow(a, (*p - 2) as u32)),
            Repr::Binary(t) => {
                let group = self.order() - 1;
                Some(t.exp[((group - t.log[a as usize]) % group) as usize])
            }
        }
    }

    pub fn div(&self, a: u32, b: u32) -> Option<u32> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    pub fn pow(&self, mut base: u32, mut e: u32) -> u32 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.random_range(0..self.order())
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.random_range(1..self.order())
    }
}

fn binary_tables(n: u32) -> LogTables {
    let q = 1u32 << n;
    let poly = BINARY_POLYNOMIALS[n as usize];
    let group = (q - 1) as usize;
    let mut exp = alloc::vec![0u32; 2 * group];
    let mut log = alloc::vec![0u32; q as usize];
    let mut x = 1u32;
    for (i, slot) in exp.iter_mut().take(group).enumerate() {
        *slot = x;
        log[x as usize] = i as u32;
        x <<= 1;
        if x & q != 0 {
            x ^= poly;
        }
    }
    for i in group..2 * group {
        exp[i] = exp[i - group];
    }
    LogTables { exp, log }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_primitive() {
        for n in 1..=16u32 {
            let t = binary_tables(n);
            let group = (1usize << n) - 1;
            let mut seen = alloc::vec![false; group + 1];
            for &e in &t.exp[..group] {
                assert!(!seen[e as usize], "x has order < 2^{n}-1");
                seen[e as usize] = true;
            }
        }
    }

    #[test]
    fn gf2_is_xor_and() {
        let f = Field::new(FieldSpec::binary(1)).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(f.add(a, b), a ^ b);
                assert_eq!(f.mul(a, b), a & b);
            }
        }
    }

    #[test]
    fn gf4_generator_square() {
        // x^2 = x + 1 in GF(4).
        let f = Field::new(FieldSpec::binary(2)).unwrap();
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.mul(2, 3), 1);
    }

    #[test]
    fn rejects_bad_specs() {
        assert_eq!(Field::new(FieldSpec::prime(9)).unwrap_err(), FfError::NotPrime(9));
        assert!(Field::new(FieldSpec { p: 3, n: 2 }).is_err());
        assert!(Field::new(FieldSpec::binary(17)).is_err());
    }

    #[test]
    fn prime_inverse() {
        let f = Field::new(FieldSpec::prime(257)).unwrap();
        for a in 1..257 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
    }
}
