//! Arithmetic in the prime field F_p.

use crate::error::{Error, Result};

/// Deterministic primality check by trial division; q stays desk-scale here.
pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Element of F_p, carrying its modulus. All arithmetic is checked (debug)
/// to stay within a single field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeFieldElement {
    value: u32,
    modulus: u32,
}

impl PrimeFieldElement {
    pub fn new(value: u64, modulus: u32) -> Self {
        debug_assert!(modulus >= 2);
        PrimeFieldElement { value: (value % modulus as u64) as u32, modulus }
    }

    pub fn zero(modulus: u32) -> Self {
        PrimeFieldElement { value: 0, modulus }
    }

    pub fn one(modulus: u32) -> Self {
        PrimeFieldElement::new(1, modulus)
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.modulus, other.modulus);
        PrimeFieldElement::new(self.value as u64 + other.value as u64, self.modulus)
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.modulus, other.modulus);
        PrimeFieldElement::new(
            self.value as u64 + (self.modulus - other.value) as u64,
            self.modulus,
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.modulus, other.modulus);
        PrimeFieldElement::new(self.value as u64 * other.value as u64, self.modulus)
    }

    pub fn neg(&self) -> Self {
        PrimeFieldElement::new((self.modulus - self.value) as u64, self.modulus)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(&self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::DivisionByZero);
        }
        let (mut r0, mut r1) = (self.modulus as i64, self.value as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1, "modulus must be prime");
        let inv = t0.rem_euclid(self.modulus as i64) as u64;
        Ok(PrimeFieldElement::new(inv, self.modulus))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        for p in [2u64, 3, 5, 7, 11, 13, 97] {
            assert!(is_prime(p), "{p}");
        }
        for c in [0u64, 1, 4, 6, 9, 15, 49, 91] {
            assert!(!is_prime(c), "{c}");
        }
    }

    #[test]
    fn field_axioms_small_primes() {
        for p in [2u32, 3, 5, 7] {
            for a in 0..p {
                let x = PrimeFieldElement::new(a as u64, p);
                assert_eq!(x.add(&x.neg()).value(), 0);
                for b in 0..p {
                    let y = PrimeFieldElement::new(b as u64, p);
                    assert_eq!(x.add(&y), y.add(&x));
                    assert_eq!(x.mul(&y), y.mul(&x));
                    assert_eq!(x.sub(&y).add(&y), x);
                }
                if a != 0 {
                    let inv = x.inv().unwrap();
                    assert_eq!(x.mul(&inv).value(), 1);
                }
            }
            assert!(PrimeFieldElement::zero(p).inv().is_err());
        }
    }

    #[test]
    fn distributivity() {
        let p = 7u32;
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    let (x, y, z) = (
                        PrimeFieldElement::new(a as u64, p),
                        PrimeFieldElement::new(b as u64, p),
                        PrimeFieldElement::new(c as u64, p),
                    );
                    assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
                }
            }
        }
    }
}
