//! Arithmetic in the prime field F_p.
//!
//! Elements are plain `u32` values in `0..p`; the field itself is a small
//! `Copy` handle that knows the characteristic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct FieldSpec {
    p: u32,
}

impl FieldSpec {
    pub const DEFAULT_CHARACTERISTIC: u32 = 32003;

    pub fn new(p: u64) -> Result<Self> {
        if !(2..(1 << 31)).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidField(p));
        }
        Ok(FieldSpec { p: p as u32 })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (if s >= self.p as u64 { s - self.p as u64 } else { s }) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + (self.p - b)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    pub fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    /// Representative in `(-p/2, p/2]`, used for printing.
    pub fn to_signed(&self, a: u32) -> i64 {
        if a as u64 * 2 > self.p as u64 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec { p: Self::DEFAULT_CHARACTERISTIC }
    }
}

impl TryFrom<u32> for FieldSpec {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        FieldSpec::new(p as u64)
    }
}

impl From<FieldSpec> for u32 {
    fn from(f: FieldSpec) -> u32 {
        f.p
    }
}

fn is_prime(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites() {
        assert!(FieldSpec::new(32003).is_ok());
        assert!(FieldSpec::new(2).is_ok());
        assert_eq!(FieldSpec::new(1), Err(Error::InvalidField(1)));
        assert_eq!(FieldSpec::new(32001), Err(Error::InvalidField(32001)));
        assert!(FieldSpec::new(1 << 31).is_err());
    }

    #[test]
    fn inverse_and_signed() {
        let f = FieldSpec::default();
        for a in [1u32, 2, 17, 32002] {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        assert_eq!(f.to_signed(32002), -1);
        assert_eq!(f.from_i64(-1), 32002);
        assert_eq!(f.sub(3, 5), 32001);
    }
}
