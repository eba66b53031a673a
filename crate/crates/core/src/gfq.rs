//! Finite fields F_q, q = p^a.
//!
//! Elements are encoded as integers `0..q` whose base-`p` digits are the
//! coefficients (low first) of a polynomial in the residue class of `x` modulo
//! the field's defining polynomial. Prime fields use plain modular arithmetic;
//! proper extensions multiply through log/exp tables.

use std::fmt;
use std::sync::Arc;

use crate::arith;
use crate::error::{Error, Result};

pub const DEFAULT_FIELD_BOUND: u64 = 1 << 20;

pub type Field = Arc<FieldCtx>;

#[derive(Debug)]
pub struct FieldCtx {
    p: u32,
    a: u32,
    q: u32,
    /// Defining polynomial over F_p, low first, monic of degree `a`.
    modulus: Vec<u32>,
    /// `exp[i] = g^i` for `i < 2(q-1)`, empty for prime fields.
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}

impl Eq for FieldCtx {}

impl FieldCtx {
    /// `F_{p^a}` with the default size bound.
    pub fn new(p: u64, a: u32) -> Result<Field> {
        Self::with_bound(p, a, DEFAULT_FIELD_BOUND)
    }

    pub fn with_bound(p: u64, a: u32, bound: u64) -> Result<Field> {
        if !arith::is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if a == 0 {
            return Err(Error::ParamDomain("extension degree must be at least 1".into()));
        }
        let q = p
            .checked_pow(a)
            .filter(|&q| q <= bound && q <= u32::MAX as u64)
            .ok_or_else(|| Error::BoundExceeded(format!("{p}^{a} exceeds field bound {bound}")))?;
        let p32 = p as u32;
        if a == 1 {
            return Ok(Arc::new(FieldCtx {
                p: p32,
                a,
                q: q as u32,
                modulus: vec![0, 1],
                exp: Vec::new(),
                log: Vec::new(),
            }));
        }
        let modulus = smallest_irreducible(p32, a as usize);
        let (exp, log) = build_tables(p32, &modulus, q as u32);
        Ok(Arc::new(FieldCtx {
            p: p32,
            a,
            q: q as u32,
            modulus,
            exp,
            log,
        }))
    }

    /// Field of order `q`, which must be a prime power.
    pub fn of_order(q: u64) -> Result<Field> {
        let (p, a) = arith::prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Self::new(p, a)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.a
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.a == 1
    }

    #[inline]
    pub fn add(&self, x: u32, y: u32) -> u32 {
        if self.a == 1 {
            let s = x + y;
            if s >= self.p {
                s - self.p
            } else {
                s
            }
        } else if self.p == 2 {
            x ^ y
        } else {
            self.digitwise(x, y, |a, b, p| (a + b) % p)
        }
    }

    #[inline]
    pub fn neg(&self, x: u32) -> u32 {
        if self.a == 1 {
            if x == 0 {
                0
            } else {
                self.p - x
            }
        } else if self.p == 2 {
            x
        } else {
            self.digitwise(x, 0, |a, _, p| (p - a) % p)
        }
    }

    #[inline]
    pub fn sub(&self, x: u32, y: u32) -> u32 {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        if self.a == 1 {
            ((x as u64 * y as u64) % self.p as u64) as u32
        } else if x == 0 || y == 0 {
            0
        } else {
            self.exp[(self.log[x as usize] + self.log[y as usize]) as usize]
        }
    }

    pub fn pow(&self, x: u32, mut e: u64) -> u32 {
        if x == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        if self.a > 1 {
            let l = (self.log[x as usize] as u64 * (e % (self.q as u64 - 1))) % (self.q as u64 - 1);
            return self.exp[l as usize];
        }
        let mut base = x;
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, x: u32) -> Result<u32> {
        if x == 0 {
            return Err(Error::DivByZero);
        }
        Ok(self.pow(x, self.q as u64 - 2))
    }

    pub fn div(&self, x: u32, y: u32) -> Result<u32> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// Image of an integer under `Z -> F_p ⊆ F_q`.
    pub fn from_i64(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    /// Base-`p` digits of an element, low first, length `a`.
    pub fn digits(&self, mut x: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.a as usize);
        for _ in 0..self.a {
            out.push(x % self.p);
            x /= self.p;
        }
        out
    }

    pub fn from_digits(&self, digits: &[u32]) -> u32 {
        digits
            .iter()
            .rev()
            .fold(0, |acc, &d| acc * self.p + d % self.p)
    }

    pub fn mult_order(&self, x: u32) -> Result<u64> {
        if x == 0 {
            return Err(Error::ZeroElement);
        }
        let n = self.q as u64 - 1;
        let mut ord = n;
        for (l, _) in arith::factorize(n) {
            while ord.is_multiple_of(l) && self.pow(x, ord / l) == 1 {
                ord /= l;
            }
        }
        Ok(ord)
    }

    pub fn is_square(&self, x: u32) -> bool {
        x == 0 || self.p == 2 || self.pow(x, (self.q as u64 - 1) / 2) == 1
    }

    /// Smallest element (by encoding) that is not a square; `None` in characteristic 2.
    pub fn least_nonsquare(&self) -> Option<u32> {
        (1..self.q).find(|&x| !self.is_square(x))
    }

    pub fn elem(self: &Arc<Self>, v: u32) -> FieldElem {
        FieldElem {
            ctx: Arc::clone(self),
            v: v % self.q,
        }
    }

    fn digitwise(&self, mut x: u32, mut y: u32, f: impl Fn(u32, u32, u32) -> u32) -> u32 {
        let (p, mut scale, mut out) = (self.p, 1u32, 0u32);
        for _ in 0..self.a {
            out += f(x % p, y % p, p) * scale;
            x /= p;
            y /= p;
            scale *= p;
        }
        out
    }
}

/// Element carrying its field, for checked arithmetic across contexts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElem {
    ctx: Field,
    v: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Sub,
    Mul,
    Div,
}

impl FieldElem {
    pub fn ctx(&self) -> &Field {
        &self.ctx
    }

    pub fn value(&self) -> u32 {
        self.v
    }

    pub fn repr(&self) -> Vec<u32> {
        self.ctx.digits(self.v)
    }

    pub fn arith(&self, other: &FieldElem, kind: ArithKind) -> Result<FieldElem> {
        if self.ctx != other.ctx {
            return Err(Error::CtxMismatch);
        }
        let c = &self.ctx;
        let v = match kind {
            ArithKind::Add => c.add(self.v, other.v),
            ArithKind::Sub => c.sub(self.v, other.v),
            ArithKind::Mul => c.mul(self.v, other.v),
            ArithKind::Div => c.div(self.v, other.v)?,
        };
        Ok(FieldElem {
            ctx: Arc::clone(c),
            v,
        })
    }

    pub fn mult_order(&self) -> Result<u64> {
        self.ctx.mult_order(self.v)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

/// `F_{q^k}` realised as `F_{p^{ak}}` together with the image of the generator of `F_q`.
#[derive(Debug, Clone)]
pub struct Extension {
    pub base: Field,
    pub big: Field,
    /// Root of the base field's defining polynomial inside `big`.
    root: u32,
}

impl Extension {
    pub fn new(base: &Field, k: u32) -> Result<Self> {
        let big = FieldCtx::new(base.p as u64, base.a * k)?;
        let root = if base.a == 1 {
            0
        } else {
            (0..big.q)
                .find(|&z| eval_in(&big, &base.modulus, z) == 0)
                .expect("extension of degree a*k contains F_{p^a}")
        };
        Ok(Extension {
            base: Arc::clone(base),
            big,
            root,
        })
    }

    pub fn embed(&self, x: u32) -> u32 {
        if self.base.a == 1 {
            return x;
        }
        let digits = self.base.digits(x);
        eval_in(&self.big, &digits, self.root)
    }
}

fn eval_in(field: &FieldCtx, coeffs: &[u32], z: u32) -> u32 {
    coeffs
        .iter()
        .rev()
        .fold(0, |acc, &c| field.add(field.mul(acc, z), c % field.p))
}

// Prime-field polynomial helpers used only to set up extension tables.

fn pf_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let d = m.len() - 1;
    for i in (d..prod.len()).rev() {
        let c = prod[i];
        if c != 0 {
            for j in 0..=d {
                let t = (c * m[j] as u64) % p as u64;
                prod[i - d + j] = (prod[i - d + j] + p as u64 - t) % p as u64;
            }
        }
    }
    prod.truncate(d);
    prod.into_iter().map(|c| c as u32).collect()
}

fn pf_gcd_degree(mut a: Vec<u32>, mut b: Vec<u32>, p: u32) -> usize {
    let trim = |v: &mut Vec<u32>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let inv = arith::pow_mod(*b.last().unwrap() as u64, p as u64 - 2, p as u64);
        while a.len() >= b.len() {
            let c = (*a.last().unwrap() as u64 * inv) % p as u64;
            let shift = a.len() - b.len();
            for (j, &bj) in b.iter().enumerate() {
                let t = (c * bj as u64) % p as u64;
                a[shift + j] = ((a[shift + j] as u64 + p as u64 - t) % p as u64) as u32;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

fn pf_is_irreducible(m: &[u32], p: u32) -> bool {
    let d = m.len() - 1;
    if d == 1 {
        return true;
    }
    let mut xp = vec![0u32; d];
    xp[1] = 1;
    // xp = x^{p^i} mod m
    for _ in 1..=d / 2 {
        let mut acc = vec![0u32; d];
        acc[0] = 1;
        let mut base = xp.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = pf_mulmod(&acc, &base, m, p);
            }
            base = pf_mulmod(&base, &base, m, p);
            e >>= 1;
        }
        xp = acc;
        let mut diff = xp.clone();
        diff[1] = (diff[1] + p - 1) % p;
        if pf_gcd_degree(m.to_vec(), diff, p) > 0 {
            return false;
        }
    }
    true
}

fn smallest_irreducible(p: u32, a: usize) -> Vec<u32> {
    let total = (p as u64).pow(a as u32);
    for idx in 0..total {
        // c_0 is the most significant position in the ordering.
        let mut coeffs = vec![0u32; a + 1];
        let mut rest = idx;
        for i in (0..a).rev() {
            coeffs[i] = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        coeffs[a] = 1;
        if coeffs[0] != 0 && pf_is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials of every degree exist")
}

fn build_tables(p: u32, modulus: &[u32], q: u32) -> (Vec<u32>, Vec<u32>) {
    let a = modulus.len() - 1;
    let encode = |v: &[u32]| v.iter().rev().fold(0u32, |acc, &d| acc * p + d);
    let decode = |mut x: u32| {
        let mut v = vec![0u32; a];
        for d in v.iter_mut() {
            *d = x % p;
            x /= p;
        }
        v
    };
    let n = q - 1;
    let prime_divs: Vec<u64> = arith::factorize(n as u64).into_iter().map(|(l, _)| l).collect();
    let pow_poly = |g: &[u32], mut e: u64| {
        let mut acc = vec![0u32; a];
        acc[0] = 1;
        let mut base = g.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = pf_mulmod(&acc, &base, modulus, p);
            }
            base = pf_mulmod(&base, &base, modulus, p);
            e >>= 1;
        }
        acc
    };
    let one = encode(&{
        let mut v = vec![0u32; a];
        v[0] = 1;
        v
    });
    let gen = (2..q)
        .map(decode)
        .find(|g| prime_divs.iter().all(|&l| encode(&pow_poly(g, n as u64 / l)) != one))
        .expect("multiplicative group is cyclic");
    let mut exp = vec![0u32; 2 * n as usize];
    let mut log = vec![0u32; q as usize];
    let mut cur = vec![0u32; a];
    cur[0] = 1;
    for i in 0..n as usize {
        let c = encode(&cur);
        exp[i] = c;
        exp[i + n as usize] = c;
        log[c as usize] = i as u32;
        cur = pf_mulmod(&cur, &gen, modulus, p);
    }
    (exp, log)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arith() {
        let f = FieldCtx::new(5, 1).unwrap();
        assert_eq!(f.mul(2, 3), 1);
        assert_eq!(f.add(2, 2), 4);
        assert_eq!(f.inv(2).unwrap(), 3);
        assert_eq!(f.mult_order(2).unwrap(), 4);
        assert_eq!(f.mult_order(4).unwrap(), 2);
        assert_eq!(f.mult_order(1).unwrap(), 1);
        let f3 = FieldCtx::new(3, 1).unwrap();
        assert_eq!(f3.add(2, 2), 1);
    }

    #[test]
    fn moduli_are_smallest() {
        assert_eq!(FieldCtx::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        // x^2 + 1 is irreducible over F_3 and has the smallest coefficient vector.
        assert_eq!(FieldCtx::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        // (1,0,1) precedes (1,1,0) when compared from the constant term up.
        assert_eq!(FieldCtx::new(2, 3).unwrap().modulus(), &[1, 0, 1, 1]);
    }

    #[test]
    fn f4_x_squared() {
        let f = FieldCtx::new(2, 2).unwrap();
        // x is encoded as 2, x + 1 as 3.
        assert_eq!(f.mul(2, 2), 3);
    }

    #[test]
    fn errors() {
        assert_eq!(FieldCtx::new(4, 1).unwrap_err(), Error::NonPrime(4));
        assert!(matches!(FieldCtx::new(2, 21), Err(Error::BoundExceeded(_))));
        let f = FieldCtx::new(5, 1).unwrap();
        assert_eq!(f.inv(0), Err(Error::DivByZero));
        assert_eq!(f.mult_order(0), Err(Error::ZeroElement));
        let g = FieldCtx::new(3, 1).unwrap();
        assert_eq!(
            f.elem(1).arith(&g.elem(1), ArithKind::Add),
            Err(Error::CtxMismatch)
        );
    }

    #[test]
    fn fermat_everywhere() {
        for &(p, a) in &[(2, 1), (2, 4), (3, 3), (5, 2), (7, 2), (2, 12), (3, 7)] {
            let f = FieldCtx::new(p, a).unwrap();
            let q = f.q() as u64;
            for x in 1..f.q() {
                assert_eq!(f.pow(x, q - 1), 1);
                assert_eq!((q - 1) % f.mult_order(x).unwrap(), 0);
            }
        }
    }

    #[test]
    fn extension_embeds_subfield() {
        let base = FieldCtx::new(2, 2).unwrap();
        let ext = Extension::new(&base, 3).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                let (ex, ey) = (ext.embed(x), ext.embed(y));
                assert_eq!(ext.embed(base.mul(x, y)), ext.big.mul(ex, ey));
                assert_eq!(ext.embed(base.add(x, y)), ext.big.add(ex, ey));
            }
        }
    }
}
