//! Residue fields `F_p` and `F_{p^2} = F_p[t]/(t^2 - r)`.

use std::fmt;

use crate::arith::jacobi::jacobi_u64;
use crate::error::{Error, Result};
use crate::rational::{is_prime, mul_mod, pow_mod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldDescriptor {
    pub p: u64,
    pub degree: u8,
    /// Smallest positive nonresidue mod `p`; only meaningful for degree 2.
    pub nonresidue: u64,
}

impl FieldDescriptor {
    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self { p, degree: 1, nonresidue: 0 })
    }

    pub fn quadratic(p: u64) -> Result<Self> {
        if !is_prime(p) || p == 2 {
            return Err(Error::Precondition(format!(
                "F_(p^2) is only built for odd primes, got {p}"
            )));
        }
        Ok(Self { p, degree: 2, nonresidue: smallest_nonresidue(p) })
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.degree as u32)
    }

    pub fn elem(&self, c0: u64, c1: u64) -> FiniteFieldElem {
        let c1 = if self.degree == 1 { 0 } else { c1 % self.p };
        FiniteFieldElem { field: *self, c0: c0 % self.p, c1 }
    }

    pub fn from_i64(&self, c: i64) -> FiniteFieldElem {
        self.elem(c.rem_euclid(self.p as i64) as u64, 0)
    }

    /// All elements, in lexicographic `(c1, c0)` order.
    pub fn elements(&self) -> impl Iterator<Item = FiniteFieldElem> + '_ {
        let p = self.p;
        let hi = if self.degree == 1 { 1 } else { p };
        (0..hi).flat_map(move |c1| (0..p).map(move |c0| self.elem(c0, c1)))
    }
}

pub fn smallest_nonresidue(p: u64) -> u64 {
    (2..p).find(|&r| jacobi_u64(r, p) == -1).expect("odd prime has a nonresidue")
}

/// `c0 + c1·t`, with `t^2 = r` in degree 2.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FiniteFieldElem {
    pub field: FieldDescriptor,
    pub c0: u64,
    pub c1: u64,
}

impl fmt::Debug for FiniteFieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree == 1 {
            write!(f, "{} (F_{})", self.c0, self.field.p)
        } else {
            write!(f, "{}+{}t (F_{}^2)", self.c0, self.c1, self.field.p)
        }
    }
}

impl FiniteFieldElem {
    pub fn is_zero(&self) -> bool {
        self.c0 == 0 && self.c1 == 0
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.field.p;
        self.field.elem((self.c0 + o.c0) % p, (self.c1 + o.c1) % p)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.field.p;
        let r = self.field.nonresidue;
        let c0 = (mul_mod(self.c0, o.c0, p) + mul_mod(mul_mod(self.c1, o.c1, p), r, p)) % p;
        let c1 = (mul_mod(self.c0, o.c1, p) + mul_mod(self.c1, o.c0, p)) % p;
        self.field.elem(c0, c1)
    }

    pub fn pow(&self, mut e: u128) -> Self {
        let mut acc = self.field.elem(1, 0);
        let mut b = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }

    /// Euler criterion `x^((q-1)/2) = 1`.
    pub fn is_square(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroArgument { what: "ff_is_square" });
        }
        if self.field.p == 2 {
            return Ok(true);
        }
        let e = (self.field.order() - 1) / 2;
        Ok(self.pow(e) == self.field.elem(1, 0))
    }
}

pub fn ff_is_square(x: &FiniteFieldElem) -> Result<bool> {
    x.is_square()
}

/// Square root of `a` mod odd prime `p` (smallest representative), if any.
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if jacobi_u64(a, p) != 1 {
        return None;
    }
    // Tonelli–Shanks
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = smallest_nonresidue(p);
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r.min(p - r))
}
