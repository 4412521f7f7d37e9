//! Polynomials over `F_p` for word-sized primes, used by the factorizer.

use crate::rational::{inv_mod, mul_mod};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct ZpPoly {
    pub p: u64,
    pub c: Vec<u64>,
}

impl ZpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        Self { p, c }
    }

    pub fn one(p: u64) -> Self {
        Self::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lc(&self) -> u64 {
        *self.c.last().unwrap_or(&0)
    }

    #[cfg(test)]
    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let g = |v: &Vec<u64>, i: usize| v.get(i).copied().unwrap_or(0);
        Self::new(self.p, (0..n).map(|i| (g(&self.c, i) + g(&o.c, i)) % self.p).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let g = |v: &Vec<u64>, i: usize| v.get(i).copied().unwrap_or(0);
        let p = self.p;
        Self::new(p, (0..n).map(|i| (g(&self.c, i) + p - g(&o.c, i)) % p).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::new(self.p, vec![]);
        }
        let p = self.p;
        let mut v = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in o.c.iter().enumerate() {
                v[i + j] = (v[i + j] + mul_mod(a, b, p)) % p;
            }
        }
        Self::new(p, v)
    }

    pub fn scale(&self, k: u64) -> Self {
        Self::new(self.p, self.c.iter().map(|&a| mul_mod(a, k, self.p)).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv_mod(self.lc(), self.p).unwrap())
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let p = self.p;
        let dd = d.deg().expect("division by zero");
        let inv = inv_mod(d.lc(), p).unwrap();
        let mut r = self.c.clone();
        let mut q = vec![0u64; r.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let k = mul_mod(*r.last().unwrap(), inv, p);
            for (i, &dc) in d.c.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - mul_mod(k, dc, p)) % p;
            }
            q[shift] = k;
            r.pop();
            while r.last() == Some(&0) {
                r.pop();
            }
        }
        (Self::new(p, q), Self::new(p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s·self + t·o = g`, `g` monic.
    pub fn ext_gcd(&self, o: &Self) -> (Self, Self, Self) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(p), Self::new(p, vec![]));
        let (mut t0, mut t1) = (Self::new(p, vec![]), Self::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        let k = inv_mod(r0.lc(), p).unwrap();
        (r0.scale(k), s0.scale(k), t0.scale(k))
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        Self::new(
            p,
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| mul_mod(a, i as u64 % p, p))
                .collect(),
        )
    }

    pub fn pow_mod(&self, mut e: u128, m: &Self) -> Self {
        let mut acc = Self::one(self.p);
        let mut b = self.rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b).rem(m);
            }
            b = b.mul(&b).rem(m);
            e >>= 1;
        }
        acc
    }

    /// Monic irreducible factors of a monic squarefree polynomial (odd `p`).
    pub fn factor_squarefree(&self) -> Vec<ZpPoly> {
        let p = self.p;
        let mut out = Vec::new();
        let mut f = self.monic();
        let x = Self::x(p);
        let mut h = x.clone();
        let mut d = 1usize;
        while f.deg().unwrap_or(0) >= 2 * d {
            h = h.pow_mod(p as u128, &f);
            let g = f.gcd(&h.sub(&x));
            if g.deg().unwrap_or(0) > 0 {
                equal_degree_split(&g, d, &mut out);
                f = f.div_rem(&g).0;
                h = h.rem(&f);
            }
            d += 1;
        }
        if f.deg().unwrap_or(0) > 0 {
            out.push(f);
        }
        out.sort_by(|a, b| (a.c.len(), &a.c).cmp(&(b.c.len(), &b.c)));
        out
    }
}

/// Cantor–Zassenhaus splitting with a deterministic sequence of trial
/// polynomials.
fn equal_degree_split(g: &ZpPoly, d: usize, out: &mut Vec<ZpPoly>) {
    let n = g.deg().unwrap();
    if n == d {
        out.push(g.clone());
        return;
    }
    let p = g.p;
    let e = ((p as u128).pow(d as u32) - 1) / 2;
    let mut counter: u64 = 1;
    loop {
        let mut digits = Vec::new();
        let mut c = counter;
        while c > 0 {
            digits.push(c % p);
            c /= p;
        }
        counter += 1;
        let a = ZpPoly::new(p, digits);
        if a.deg().unwrap_or(0) == 0 || a.deg().unwrap() >= n {
            if a.deg().unwrap_or(0) >= n {
                panic!("equal-degree split exhausted trial polynomials");
            }
            continue;
        }
        let b = a.pow_mod(e, g).sub(&ZpPoly::one(p));
        let h = g.gcd(&b);
        let k = h.deg().unwrap_or(0);
        if k > 0 && k < n {
            equal_degree_split(&h, d, out);
            equal_degree_split(&g.div_rem(&h).0, d, out);
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_known_products() {
        let p = 7;
        let f1 = ZpPoly::new(p, vec![1, 0, 1]); // x^2+1, irreducible mod 7
        let f2 = ZpPoly::new(p, vec![3, 1]);
        let f3 = ZpPoly::new(p, vec![5, 1]);
        let f4 = ZpPoly::new(p, vec![2, 0, 1]); // x^2+2: -2 = 5 is a nonresidue
        let prod = f1.mul(&f2).mul(&f3).mul(&f4);
        let got = prod.factor_squarefree();
        assert_eq!(got.len(), 4);
        let back = got.iter().fold(ZpPoly::one(p), |a, b| a.mul(b));
        assert_eq!(back, prod);
    }

    #[test]
    fn ext_gcd_identity() {
        let p = 11;
        let a = ZpPoly::new(p, vec![1, 2, 3, 1]);
        let b = ZpPoly::new(p, vec![5, 0, 1]);
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }
}
