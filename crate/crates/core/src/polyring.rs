//! Monic polynomials over F_q: arithmetic, factorization, duals, Milnor types, exponents.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith;
use crate::error::{Error, Result};
use crate::gfq::{Field, FieldCtx};
use crate::linalg;

/// Default refusal bound for `q^k + 1` when factoring `x^{q^k+1} - 1`.
pub const DEFAULT_SRIM_BOUND: u64 = 1 << 24;

const SPLIT_SEED: u64 = 0x5eed_f00d;

/// Dense coefficient-vector arithmetic; vectors are trimmed (no trailing zeros), empty is zero.
pub(crate) mod dense {
    use super::*;

    pub fn trim(v: &mut Vec<u32>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn add(f: &FieldCtx, a: &[u32], b: &[u32]) -> Vec<u32> {
        let mut out: Vec<u32> = (0..a.len().max(b.len()))
            .map(|i| f.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
            .collect();
        trim(&mut out);
        out
    }

    pub fn sub(f: &FieldCtx, a: &[u32], b: &[u32]) -> Vec<u32> {
        let mut out: Vec<u32> = (0..a.len().max(b.len()))
            .map(|i| f.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
            .collect();
        trim(&mut out);
        out
    }

    pub fn mul(f: &FieldCtx, a: &[u32], b: &[u32]) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        if f.is_prime_field() {
            let p = f.p() as u64;
            let mut acc = vec![0u64; a.len() + b.len() - 1];
            for (i, &x) in a.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in b.iter().enumerate() {
                    acc[i + j] += x as u64 * y as u64;
                }
                if i % 64 == 63 {
                    acc.iter_mut().for_each(|c| *c %= p);
                }
            }
            let mut out: Vec<u32> = acc.into_iter().map(|c| (c % p) as u32).collect();
            trim(&mut out);
            return out;
        }
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
        trim(&mut out);
        out
    }

    pub fn scale(f: &FieldCtx, a: &[u32], c: u32) -> Vec<u32> {
        let mut out: Vec<u32> = a.iter().map(|&x| f.mul(x, c)).collect();
        trim(&mut out);
        out
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn divrem(f: &FieldCtx, a: &[u32], b: &[u32]) -> (Vec<u32>, Vec<u32>) {
        assert!(!b.is_empty(), "division by zero polynomial");
        if a.len() < b.len() {
            return (Vec::new(), a.to_vec());
        }
        let mut r = a.to_vec();
        let db = b.len() - 1;
        let lead_inv = f.inv(b[db]).expect("nonzero leading coefficient");
        let mut quot = vec![0u32; a.len() - db];
        for i in (db..r.len()).rev() {
            let c = r[i];
            if c == 0 {
                continue;
            }
            let t = f.mul(c, lead_inv);
            quot[i - db] = t;
            for (j, &bj) in b.iter().enumerate() {
                if bj != 0 {
                    r[i - db + j] = f.sub(r[i - db + j], f.mul(t, bj));
                }
            }
        }
        r.truncate(db);
        trim(&mut r);
        trim(&mut quot);
        (quot, r)
    }

    pub fn rem(f: &FieldCtx, a: &[u32], b: &[u32]) -> Vec<u32> {
        if a.len() < b.len() {
            return a.to_vec();
        }
        if b.last() == Some(&1) && f.is_prime_field() {
            return rem_monic_prime(f, a, b);
        }
        divrem(f, a, b).1
    }

    fn rem_monic_prime(f: &FieldCtx, a: &[u32], b: &[u32]) -> Vec<u32> {
        let p = f.p() as u64;
        let db = b.len() - 1;
        let mut r: Vec<u64> = a.iter().map(|&x| x as u64).collect();
        for i in (db..r.len()).rev() {
            let c = r[i] % p;
            if c == 0 {
                continue;
            }
            let t = p - c;
            for j in 0..db {
                r[i - db + j] = (r[i - db + j] + t * b[j] as u64) % p;
            }
        }
        r.truncate(db);
        let mut out: Vec<u32> = r.into_iter().map(|c| (c % p) as u32).collect();
        trim(&mut out);
        out
    }

    pub fn monic(f: &FieldCtx, a: &[u32]) -> Vec<u32> {
        match a.last() {
            None | Some(&1) => a.to_vec(),
            Some(&l) => scale(f, a, f.inv(l).expect("nonzero")),
        }
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(f: &FieldCtx, a: &[u32], b: &[u32]) -> Vec<u32> {
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        while !b.is_empty() {
            let r = rem(f, &a, &b);
            a = std::mem::replace(&mut b, r);
        }
        monic(f, &a)
    }

    pub fn mulmod(f: &FieldCtx, a: &[u32], b: &[u32], m: &[u32]) -> Vec<u32> {
        rem(f, &mul(f, a, b), m)
    }

    pub fn powmod(f: &FieldCtx, a: &[u32], mut e: u128, m: &[u32]) -> Vec<u32> {
        let mut acc = rem(f, &[1], m);
        let mut base = rem(f, a, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(f, &acc, &base, m);
            }
            e >>= 1;
            if e > 0 {
                base = mulmod(f, &base, &base, m);
            }
        }
        acc
    }

    pub fn derivative(f: &FieldCtx, a: &[u32]) -> Vec<u32> {
        let mut out: Vec<u32> = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(f.from_i64(i as i64), c))
            .collect();
        trim(&mut out);
        out
    }

    pub fn compose_power(a: &[u32], s: usize) -> Vec<u32> {
        if a.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u32; (a.len() - 1) * s + 1];
        for (i, &c) in a.iter().enumerate() {
            out[i * s] = c;
        }
        out
    }

    pub fn x_poly() -> Vec<u32> {
        vec![0, 1]
    }
}

/// The `F_q`-linear map `h -> h^q` on `F_q[x]/(m)` as a matrix of column images.
pub(crate) struct Frobenius<'a> {
    field: &'a FieldCtx,
    modulus: Vec<u32>,
    /// `cols[j] = x^{qj} mod m`.
    cols: Vec<Vec<u32>>,
}

impl<'a> Frobenius<'a> {
    pub fn new(field: &'a FieldCtx, modulus: &[u32]) -> Self {
        let n = modulus.len() - 1;
        let xq = dense::powmod(field, &dense::x_poly(), field.q() as u128, modulus);
        let mut cols = Vec::with_capacity(n);
        let mut cur = dense::rem(field, &[1], modulus);
        for _ in 0..n {
            cols.push(cur.clone());
            cur = dense::mulmod(field, &cur, &xq, modulus);
        }
        Frobenius {
            field,
            modulus: modulus.to_vec(),
            cols,
        }
    }

    pub fn apply(&self, h: &[u32]) -> Vec<u32> {
        let f = self.field;
        let n = self.modulus.len() - 1;
        if f.is_prime_field() {
            let p = f.p() as u64;
            let mut acc = vec![0u64; n];
            for (j, &c) in h.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (i, &v) in self.cols[j].iter().enumerate() {
                    acc[i] = (acc[i] + c as u64 * v as u64) % p;
                }
            }
            let mut out: Vec<u32> = acc.into_iter().map(|c| c as u32).collect();
            dense::trim(&mut out);
            return out;
        }
        let mut out = vec![0u32; n];
        for (j, &c) in h.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (i, &v) in self.cols[j].iter().enumerate() {
                out[i] = f.add(out[i], f.mul(c, v));
            }
        }
        dense::trim(&mut out);
        out
    }
}

#[derive(Clone)]
pub struct MonicPoly {
    ctx: Field,
    coeffs: Vec<u32>,
}

impl PartialEq for MonicPoly {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.q() == other.ctx.q() && self.coeffs == other.coeffs
    }
}

impl Eq for MonicPoly {}

impl Hash for MonicPoly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ctx.q().hash(state);
        self.coeffs.hash(state);
    }
}

impl Ord for MonicPoly {
    /// Degree first, then coefficients from the top down.
    fn cmp(&self, other: &Self) -> Ordering {
        self.ctx
            .q()
            .cmp(&other.ctx.q())
            .then(self.coeffs.len().cmp(&other.coeffs.len()))
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for MonicPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MonicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over F_{}", self, self.ctx.q())
    }
}

impl fmt::Display for MonicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}{mono}"),
            });
        }
        write!(f, "{}", terms.join(" + "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolyOp {
    Mul,
    Gcd,
}

impl MonicPoly {
    /// Builds a monic polynomial from coefficients (low first); trailing zeros are dropped.
    pub fn new(ctx: &Field, coeffs: Vec<u32>) -> Result<Self> {
        let q = ctx.q();
        let mut coeffs: Vec<u32> = coeffs.into_iter().map(|c| c % q).collect();
        dense::trim(&mut coeffs);
        if coeffs.last() != Some(&1) {
            return Err(Error::ParamDomain("polynomial is not monic".into()));
        }
        Ok(MonicPoly {
            ctx: Arc::clone(ctx),
            coeffs,
        })
    }

    /// Coefficients given as integers mapped into the prime subfield.
    pub fn from_ints(ctx: &Field, coeffs: &[i64]) -> Result<Self> {
        Self::new(ctx, coeffs.iter().map(|&c| ctx.from_i64(c)).collect())
    }

    pub(crate) fn from_dense(ctx: &Field, coeffs: Vec<u32>) -> Self {
        debug_assert_eq!(coeffs.last(), Some(&1));
        MonicPoly {
            ctx: Arc::clone(ctx),
            coeffs,
        }
    }

    pub fn one(ctx: &Field) -> Self {
        Self::from_dense(ctx, vec![1])
    }

    pub fn x(ctx: &Field) -> Self {
        Self::from_dense(ctx, vec![0, 1])
    }

    /// `x - c`.
    pub fn x_minus(ctx: &Field, c: u32) -> Self {
        Self::from_dense(ctx, vec![ctx.neg(c % ctx.q()), 1])
    }

    pub fn ctx(&self) -> &Field {
        &self.ctx
    }

    pub fn q(&self) -> u64 {
        self.ctx.q() as u64
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> u32 {
        self.coeffs[0]
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn is_x(&self) -> bool {
        self.coeffs == [0, 1]
    }

    pub fn eval(&self, z: u32) -> u32 {
        let f = &self.ctx;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| f.add(f.mul(acc, z), c))
    }

    fn check_ctx(&self, other: &Self) -> Result<()> {
        if self.ctx.q() == other.ctx.q() {
            Ok(())
        } else {
            Err(Error::CtxMismatch)
        }
    }

    pub fn arith(&self, other: &Self, op: PolyOp) -> Result<Self> {
        match op {
            PolyOp::Mul => self.mul(other),
            PolyOp::Gcd => self.gcd(other),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        Ok(Self::from_dense(
            &self.ctx,
            dense::mul(&self.ctx, &self.coeffs, &other.coeffs),
        ))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..e {
            acc = acc.mul(self).expect("same field");
        }
        acc
    }

    /// Remainder of `self` modulo `g`, as raw coefficients (not necessarily monic).
    pub fn rem(&self, g: &Self) -> Result<Vec<u32>> {
        self.check_ctx(g)?;
        if g.degree() == 0 {
            return Err(Error::ModByConstant);
        }
        Ok(dense::rem(&self.ctx, &self.coeffs, &g.coeffs))
    }

    /// Exact quotient `self / g`; `None` if `g` does not divide `self`.
    pub fn div_exact(&self, g: &Self) -> Result<Option<Self>> {
        self.check_ctx(g)?;
        let (quot, r) = dense::divrem(&self.ctx, &self.coeffs, &g.coeffs);
        Ok(r.is_empty().then(|| Self::from_dense(&self.ctx, quot)))
    }

    pub fn divides(&self, other: &Self) -> Result<bool> {
        Ok(other.div_exact(self)?.is_some())
    }

    pub fn gcd(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        Ok(Self::from_dense(
            &self.ctx,
            dense::gcd(&self.ctx, &self.coeffs, &other.coeffs),
        ))
    }

    /// `f(x^s)`.
    pub fn compose_power(&self, s: usize) -> Self {
        Self::from_dense(&self.ctx, dense::compose_power(&self.coeffs, s.max(1)))
    }

    /// `f*(x) = f(0)^{-1} x^r f(1/x)`.
    pub fn reciprocal_dual(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if c0 == 0 {
            return Err(Error::ZeroConstantTerm);
        }
        let inv = self.ctx.inv(c0)?;
        let rev: Vec<u32> = self.coeffs.iter().rev().map(|&c| self.ctx.mul(c, inv)).collect();
        Ok(Self::from_dense(&self.ctx, rev))
    }

    pub fn is_self_reciprocal(&self) -> bool {
        self.reciprocal_dual().map(|d| d == *self).unwrap_or(false)
    }

    /// Rabin's test.
    pub fn is_irreducible(&self) -> Result<bool> {
        let n = self.degree();
        if n == 0 {
            return Err(Error::ConstantInput);
        }
        if n == 1 {
            return Ok(true);
        }
        let f = &self.ctx;
        let m = &self.coeffs;
        let frob = Frobenius::new(f, m);
        let x = dense::x_poly();
        let maximal: Vec<usize> = arith::factorize(n as u64)
            .iter()
            .map(|&(l, _)| n / l as usize)
            .collect();
        let mut h = x.clone();
        for i in 1..=n {
            h = frob.apply(&h);
            if maximal.contains(&i) {
                let g = dense::gcd(f, m, &dense::sub(f, &h, &x));
                if g.len() > 1 {
                    return Ok(false);
                }
            }
        }
        Ok(h == x)
    }

    pub fn factorize(&self) -> Result<Factorization> {
        if self.degree() == 0 {
            return Err(Error::ConstantInput);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
        let mut out: Vec<(MonicPoly, u32)> = Vec::new();
        for (sq, mult) in squarefree(&self.ctx, &self.coeffs) {
            for (block, d) in distinct_degree(&self.ctx, &sq) {
                for g in equal_degree(&self.ctx, &block, d, &mut rng) {
                    out.push((Self::from_dense(&self.ctx, g), mult));
                }
            }
        }
        out.sort();
        // Squarefree parts are coprime, so no factor appears twice.
        Ok(Factorization {
            ctx: Arc::clone(&self.ctx),
            factors: out,
        })
    }

    /// Degrees of the irreducible factors of a squarefree polynomial, with multiplicity.
    pub fn factor_degrees(&self) -> Result<Vec<usize>> {
        if self.degree() == 0 {
            return Err(Error::ConstantInput);
        }
        let mut out = Vec::new();
        for (sq, mult) in squarefree(&self.ctx, &self.coeffs) {
            for (block, d) in distinct_degree(&self.ctx, &sq) {
                let count = (block.len() - 1) / d;
                out.extend(std::iter::repeat_n(d, count * mult as usize));
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    pub fn milnor_type(&self) -> Result<MilnorType> {
        if self.constant_term() == 0 {
            return Err(Error::ZeroConstantTerm);
        }
        if self.degree() == 0 {
            return Ok(MilnorType::NotStarIrreducible);
        }
        let f = &self.ctx;
        if self.degree() == 1 {
            let root = f.neg(self.constant_term());
            return Ok(if root == 1 || root == f.neg(1) {
                MilnorType::Type3
            } else {
                MilnorType::NotStarIrreducible
            });
        }
        let fac = self.factorize()?;
        match fac.factors.as_slice() {
            [(g, 1)] if g.is_self_reciprocal() => Ok(MilnorType::Type1),
            [(g, 1), (h, 1)] => {
                let gd = g.reciprocal_dual()?;
                Ok(if gd == *h && gd != *g {
                    MilnorType::Type2
                } else {
                    MilnorType::NotStarIrreducible
                })
            }
            _ => Ok(MilnorType::NotStarIrreducible),
        }
    }

    /// Self-reciprocal irreducible monic of even degree.
    pub fn is_srim(&self) -> bool {
        self.degree() >= 2
            && self.degree().is_multiple_of(2)
            && self.is_self_reciprocal()
            && self.is_irreducible().unwrap_or(false)
    }

    /// Multiplicative order of a root.
    pub fn exponent_of(&self) -> Result<u64> {
        if self.is_x() {
            return Err(Error::XInput);
        }
        if !self.is_irreducible()? {
            return Err(Error::Reducible);
        }
        self.order_of_x()
    }

    /// Order of `x` in `F_q[x]/(f)` for irreducible `f ≠ x`, assumed, not checked.
    pub(crate) fn order_of_x(&self) -> Result<u64> {
        let n = self.degree() as u32;
        let group = (self.q() as u128)
            .checked_pow(n)
            .map(|v| v - 1)
            .filter(|&v| v <= u64::MAX as u128)
            .ok_or_else(|| Error::BoundExceeded(format!("q^{n} - 1 exceeds 64 bits")))?
            as u64;
        let f = &self.ctx;
        let x = dense::x_poly();
        let mut ord = group;
        for (l, _) in arith::factorize(group) {
            while ord.is_multiple_of(l) && dense::powmod(f, &x, (ord / l) as u128, &self.coeffs) == [1] {
                ord /= l;
            }
        }
        Ok(ord)
    }

    /// Coefficient text form, e.g. `q=5:1,3,0,3,1`.
    pub fn to_text(&self) -> String {
        let body: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("q={}:{}", self.ctx.q(), body.join(","))
    }

    pub fn parse_text(s: &str) -> Result<Self> {
        let s = s.trim();
        let rest = s
            .strip_prefix("q=")
            .ok_or_else(|| Error::Parse(format!("missing q= prefix in {s:?}")))?;
        let (q, body) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing ':' in {s:?}")))?;
        let q: u64 = q
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad field order {q:?}")))?;
        let ctx = FieldCtx::of_order(q)?;
        Self::parse_coeffs(&ctx, body)
    }

    /// Comma-separated coefficients (low first) over a given field.
    pub fn parse_coeffs(ctx: &Field, body: &str) -> Result<Self> {
        let coeffs = body
            .split(',')
            .map(|t| {
                let v: u64 = t
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad coefficient {t:?}")))?;
                if v >= ctx.q() as u64 {
                    return Err(Error::Parse(format!("coefficient {v} not below q = {}", ctx.q())));
                }
                Ok(v as u32)
            })
            .collect::<Result<Vec<u32>>>()?;
        if coeffs.last() != Some(&1) {
            return Err(Error::Parse("leading coefficient must be 1".into()));
        }
        Self::new(ctx, coeffs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MilnorType {
    Type1,
    Type2,
    Type3,
    NotStarIrreducible,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    ctx: Field,
    /// Irreducible monic factors with multiplicities, sorted.
    pub factors: Vec<(MonicPoly, u32)>,
}

impl Factorization {
    pub fn product(&self) -> MonicPoly {
        self.factors
            .iter()
            .fold(MonicPoly::one(&self.ctx), |acc, (g, m)| {
                acc.mul(&g.pow(*m)).expect("same field")
            })
    }

    /// Factor degrees with multiplicity, ascending.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self
            .factors
            .iter()
            .flat_map(|(g, m)| std::iter::repeat_n(g.degree(), *m as usize))
            .collect();
        d.sort_unstable();
        d
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (g, m) in &self.factors {
            write!(f, "({g})")?;
            if *m > 1 {
                write!(f, "^{m}")?;
            }
        }
        Ok(())
    }
}

fn pth_root(f: &FieldCtx, a: &[u32]) -> Vec<u32> {
    let p = f.p() as usize;
    let e = f.q() as u64 / f.p() as u64;
    a.iter()
        .step_by(p)
        .map(|&c| f.pow(c, e))
        .collect()
}

/// Yun-style squarefree decomposition over a field of characteristic p.
fn squarefree(f: &FieldCtx, a: &[u32]) -> Vec<(Vec<u32>, u32)> {
    let mut out = Vec::new();
    if a.len() <= 1 {
        return out;
    }
    let d = dense::derivative(f, a);
    let mut c = dense::gcd(f, a, &d);
    let mut w = dense::divrem(f, a, &c).0;
    let mut i = 1u32;
    while w.len() > 1 {
        let y = dense::gcd(f, &w, &c);
        let fac = dense::divrem(f, &w, &y).0;
        if fac.len() > 1 {
            out.push((fac, i));
        }
        w = y;
        c = dense::divrem(f, &c, &w).0;
        i += 1;
    }
    if c.len() > 1 {
        let p = f.p();
        for (g, m) in squarefree(f, &pth_root(f, &c)) {
            out.push((g, m * p));
        }
    }
    out
}

/// Splits a squarefree monic polynomial into products of equal-degree factors.
fn distinct_degree(f: &FieldCtx, a: &[u32]) -> Vec<(Vec<u32>, usize)> {
    let mut out = Vec::new();
    let mut rest = a.to_vec();
    let x = dense::x_poly();
    let mut h = x.clone();
    let mut d = 1;
    let mut frob = Frobenius::new(f, &rest);
    while rest.len() > 2 * d {
        h = frob.apply(&h);
        let g = dense::gcd(f, &rest, &dense::sub(f, &h, &x));
        if g.len() > 1 {
            rest = dense::divrem(f, &rest, &g).0;
            h = dense::rem(f, &h, &rest);
            frob = Frobenius::new(f, &rest);
            out.push((g, d));
        }
        d += 1;
    }
    if rest.len() > 1 {
        let deg = rest.len() - 1;
        out.push((rest, deg));
    }
    out
}

/// Cantor-Zassenhaus splitting of a product of distinct degree-`d` irreducibles.
fn equal_degree(f: &FieldCtx, a: &[u32], d: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u32>> {
    let n = a.len() - 1;
    if n == d {
        return vec![a.to_vec()];
    }
    let q = f.q();
    loop {
        let mut r: Vec<u32> = (0..n).map(|_| rng.gen_range(0..q)).collect();
        dense::trim(&mut r);
        if r.len() < 2 {
            continue;
        }
        let b = if f.p() == 2 {
            // Absolute trace of F_{q^d} down to F_2.
            let steps = f.degree() as usize * d;
            let mut acc = r.clone();
            let mut cur = r;
            for _ in 1..steps {
                cur = dense::mulmod(f, &cur, &cur, a);
                acc = dense::add(f, &acc, &cur);
            }
            acc
        } else {
            // r^{(q^d-1)/2} = (r^{1+q+...+q^{d-1}})^{(q-1)/2}
            let frob = Frobenius::new(f, a);
            let mut cur = dense::rem(f, &r, a);
            let mut norm = cur.clone();
            for _ in 1..d {
                cur = frob.apply(&cur);
                norm = dense::mulmod(f, &norm, &cur, a);
            }
            let half = dense::powmod(f, &norm, (q as u128 - 1) / 2, a);
            dense::sub(f, &half, &[1])
        };
        let g = dense::gcd(f, a, &b);
        if g.len() > 1 && g.len() < a.len() {
            let other = dense::divrem(f, a, &g).0;
            let mut out = equal_degree(f, &g, d, rng);
            out.extend(equal_degree(f, &other, d, rng));
            return out;
        }
    }
}

/// All SRIM polynomials of degree `2k`, taken from the factorization of `x^{q^k+1} - 1`.
pub fn srim_enumerate(ctx: &Field, two_k: usize) -> Result<Vec<MonicPoly>> {
    srim_enumerate_bounded(ctx, two_k, DEFAULT_SRIM_BOUND)
}

pub fn srim_enumerate_bounded(ctx: &Field, two_k: usize, bound: u64) -> Result<Vec<MonicPoly>> {
    if two_k < 2 || !two_k.is_multiple_of(2) {
        return Err(Error::ParamDomain(format!("degree {two_k} is not a positive even number")));
    }
    let k = (two_k / 2) as u32;
    let e = (ctx.q() as u64)
        .checked_pow(k)
        .and_then(|v| v.checked_add(1))
        .filter(|&v| v <= bound)
        .ok_or_else(|| Error::BoundExceeded(format!("q^{k} + 1 exceeds {bound}")))?;
    let h = h_poly(ctx, e as usize);
    let fac = h.factorize()?;
    Ok(fac
        .factors
        .into_iter()
        .map(|(g, _)| g)
        .filter(|g| g.degree() == two_k)
        .collect())
}

/// `x^e - 1`.
pub fn h_poly(ctx: &Field, e: usize) -> MonicPoly {
    let mut c = vec![0u32; e + 1];
    c[0] = ctx.neg(1);
    c[e] = 1;
    MonicPoly::from_dense(ctx, c)
}

/// Monic irreducibles of degree `n` other than `x`, in sorted order, by exhaustive testing.
pub fn irreducibles(ctx: &Field, n: usize) -> Vec<MonicPoly> {
    let q = ctx.q() as u64;
    let total = q.pow(n as u32);
    (0..total)
        .filter_map(|idx| {
            let mut c = vec![0u32; n + 1];
            let mut rest = idx;
            for slot in c.iter_mut().take(n) {
                *slot = (rest % q) as u32;
                rest /= q;
            }
            c[n] = 1;
            if c[0] == 0 {
                return None;
            }
            let f = MonicPoly::from_dense(ctx, c);
            f.is_irreducible().unwrap().then_some(f)
        })
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// SRIM polynomials of degree `2k` found by testing every palindromic candidate.
pub fn srim_by_search(ctx: &Field, two_k: usize) -> Vec<MonicPoly> {
    let k = two_k / 2;
    let q = ctx.q() as u64;
    let mut out: Vec<MonicPoly> = (0..q.pow(k as u32))
        .filter_map(|idx| {
            let mut c = vec![0u32; two_k + 1];
            c[0] = 1;
            c[two_k] = 1;
            let mut rest = idx;
            for i in 1..=k {
                let v = (rest % q) as u32;
                rest /= q;
                c[i] = v;
                c[two_k - i] = v;
            }
            let f = MonicPoly::from_dense(ctx, c);
            f.is_irreducible().unwrap().then_some(f)
        })
        .collect();
    out.sort();
    out
}

/// Characteristic polynomial of the multiplication-by-`x^m` map on `F_q[x]/(f)`.
pub(crate) fn power_map_charpoly(f: &MonicPoly, m: u64) -> MonicPoly {
    let ctx = f.ctx();
    let n = f.degree();
    let xm = dense::powmod(ctx, &dense::x_poly(), m as u128, f.coeffs());
    let mut mat = vec![0u32; n * n];
    let mut col = xm.clone();
    for j in 0..n {
        for (i, &c) in col.iter().enumerate() {
            mat[i * n + j] = c;
        }
        col = dense::mulmod(ctx, &col, &dense::x_poly(), f.coeffs());
    }
    MonicPoly::from_dense(ctx, linalg::charpoly(ctx, n, &mat))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Field {
        FieldCtx::new(5, 1).unwrap()
    }

    fn p(ctx: &Field, c: &[i64]) -> MonicPoly {
        MonicPoly::from_ints(ctx, c).unwrap()
    }

    #[test]
    fn basic_arith() {
        let f = f5();
        let g = p(&f, &[-1, 0, 1]).gcd(&p(&f, &[-1, 1])).unwrap();
        assert_eq!(g, p(&f, &[4, 1]));
        assert_eq!(p(&f, &[1, 1]).compose_power(3), p(&f, &[1, 0, 0, 1]));
        assert_eq!(p(&f, &[1, 1]).mul(&p(&f, &[4, 1])).unwrap(), p(&f, &[4, 0, 1]));
        assert_eq!(p(&f, &[1, 1]).rem(&MonicPoly::one(&f)), Err(Error::ModByConstant));
        let f3 = FieldCtx::new(3, 1).unwrap();
        assert_eq!(p(&f, &[1, 1]).gcd(&p(&f3, &[1, 1])), Err(Error::CtxMismatch));
    }

    #[test]
    fn duals() {
        let f = f5();
        assert_eq!(p(&f, &[1, 1]).reciprocal_dual().unwrap(), p(&f, &[1, 1]));
        assert_eq!(p(&f, &[-2, 1]).reciprocal_dual().unwrap(), p(&f, &[2, 1]));
        let s = p(&f, &[1, 1, 4, 1, 1]);
        assert_eq!(s.reciprocal_dual().unwrap(), s);
        assert_eq!(p(&f, &[0, 1]).reciprocal_dual(), Err(Error::ZeroConstantTerm));
    }

    #[test]
    fn irreducibility() {
        let f2 = FieldCtx::new(2, 1).unwrap();
        assert!(p(&f2, &[1, 1, 1]).is_irreducible().unwrap());
        assert!(!p(&f5(), &[1, 0, 1]).is_irreducible().unwrap());
        assert!(p(&f5(), &[1, 2, 0, 2, 1]).is_irreducible().unwrap());
        assert_eq!(MonicPoly::one(&f2).is_irreducible(), Err(Error::ConstantInput));
    }

    #[test]
    fn milnor_types() {
        let f = f5();
        assert_eq!(p(&f, &[1, 1]).milnor_type().unwrap(), MilnorType::Type3);
        assert_eq!(p(&f, &[1, 1, 4, 1, 1]).milnor_type().unwrap(), MilnorType::Type1);
        let t2 = p(&f, &[-2, 1]).mul(&p(&f, &[2, 1])).unwrap();
        assert_eq!(t2.milnor_type().unwrap(), MilnorType::Type2);
        assert_eq!(p(&f, &[-2, 1]).milnor_type().unwrap(), MilnorType::NotStarIrreducible);
        assert_eq!(p(&f, &[0, 1]).milnor_type(), Err(Error::ZeroConstantTerm));
    }

    #[test]
    fn exponents() {
        let f2 = FieldCtx::new(2, 1).unwrap();
        let f3 = FieldCtx::new(3, 1).unwrap();
        assert_eq!(p(&f5(), &[1, 1]).exponent_of().unwrap(), 2);
        assert_eq!(p(&f2, &[1, 1, 1]).exponent_of().unwrap(), 3);
        assert_eq!(p(&f3, &[1, 1, 1, 1, 1]).exponent_of().unwrap(), 5);
        assert_eq!(p(&f3, &[0, 1]).exponent_of(), Err(Error::XInput));
        assert_eq!(p(&f3, &[-1, 0, 1]).exponent_of(), Err(Error::Reducible));
    }

    #[test]
    fn squarefree_and_repeated_factors() {
        let f3 = FieldCtx::new(3, 1).unwrap();
        // (x+1)^3 (x^2+1)^2 x
        let g = p(&f3, &[1, 1]).pow(3);
        let h = p(&f3, &[1, 0, 1]).pow(2);
        let prod = g.mul(&h).unwrap().mul(&MonicPoly::x(&f3)).unwrap();
        let fac = prod.factorize().unwrap();
        assert_eq!(fac.to_string(), "(x)(x + 1)^3(x^2 + 1)^2");
        assert_eq!(fac.product(), prod);
    }

    #[test]
    fn text_round_trip() {
        let f = p(&f5(), &[1, 3, 0, 3, 1]);
        assert_eq!(f.to_text(), "q=5:1,3,0,3,1");
        assert_eq!(MonicPoly::parse_text("q=5:1,3,0,3,1").unwrap(), f);
        assert!(MonicPoly::parse_text("q=6:1,1").is_err());
        assert!(MonicPoly::parse_text("q=5:1,7").is_err());
        assert!(MonicPoly::parse_text("q=5:1,2").is_err());
    }

    #[test]
    fn srim_small() {
        let f2 = FieldCtx::new(2, 1).unwrap();
        assert_eq!(srim_enumerate(&f2, 2).unwrap(), vec![p(&f2, &[1, 1, 1])]);
        assert_eq!(srim_enumerate(&f5(), 4).unwrap().len(), 6);
        assert_eq!(srim_enumerate(&f5(), 4).unwrap(), srim_by_search(&f5(), 4));
        assert!(matches!(srim_enumerate_bounded(&f2, 40, 1 << 10), Err(Error::BoundExceeded(_))));
    }

    #[test]
    fn extension_field_factoring() {
        let f4 = FieldCtx::new(2, 2).unwrap();
        // x^4 - x splits completely over F_4.
        let fac = p(&f4, &[0, 1, 0, 0, 1]).factorize().unwrap();
        assert_eq!(fac.degrees(), vec![1, 1, 1, 1]);
        let f9 = FieldCtx::new(3, 2).unwrap();
        let h = h_poly(&f9, 10);
        let fac = h.factorize().unwrap();
        assert_eq!(fac.product(), h);
        assert!(fac.factors.iter().all(|(g, _)| g.is_irreducible().unwrap()));
    }

    #[test]
    fn power_map_charpoly_of_cube_roots() {
        let f2 = FieldCtx::new(2, 1).unwrap();
        let cp = power_map_charpoly(&p(&f2, &[1, 1, 1]), 3);
        assert_eq!(cp, p(&f2, &[1, 1]).pow(2));
    }
}
