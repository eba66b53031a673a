//! Closed-form counts of M-power, M*-power, degenerate and exponent-stratified
//! polynomials, and exhaustive enumeration twins for each.
//!
//! Two formula variants are offered. `Corrected` is exact and is what the rest of
//! the crate consumes. `Printed` and `PrintedAlt` evaluate the displayed Möbius
//! sums literally (two index placements where the displays are ambiguous) and may
//! produce non-integers; they exist for comparison only.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{self, divisors, euler_phi, gcd, mobius, mult_order};
use crate::error::{Error, Result};
use crate::gfq::FieldCtx;
use crate::polyring::{irreducibles, srim_by_search, MonicPoly};
use crate::powerclass;

/// Default limit on the number of candidate polynomials an enumeration may test.
pub const DEFAULT_ENUMERATION_BOUND: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum FormulaVariant {
    #[default]
    Corrected,
    Printed,
    PrintedAlt,
}

impl FromStr for FormulaVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corrected" => Ok(Self::Corrected),
            "printed" => Ok(Self::Printed),
            "printed-alt" => Ok(Self::PrintedAlt),
            _ => Err(Error::Parse(format!("unknown formula variant {s:?}"))),
        }
    }
}

impl fmt::Display for FormulaVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Corrected => "corrected",
            Self::Printed => "printed",
            Self::PrintedAlt => "printed-alt",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CountFamily {
    /// M*-power SRIM of degree `2k`; `degree = 2k`.
    NstarM,
    /// M-power irreducibles of degree `k`; `degree = k`.
    NM,
    /// Degenerate SRIM of degree `2n/k`; `degree = 2n`, `k` odd.
    NstarMDeg,
    /// Degenerate irreducibles of degree `n/k`; `degree = n`.
    NMDeg,
    /// Non-M*-power SRIM of degree `2n` and exponent `e`; `degree = 2n`.
    NstarE,
    /// Non-M-power irreducibles of degree `n` and exponent `e`; `degree = n`.
    NE,
    /// Dual pairs `{φ, φ*}` of M-power irreducibles of degree `n`; `degree = 2n`.
    Rstar,
    /// Dual pairs of degenerate irreducibles of degree `n/k`; `degree = 2n`.
    RstarDeg,
    /// Dual pairs of non-M-power irreducibles of degree `n`, exponent `e`; `degree = 2n`.
    RstarE,
}

impl CountFamily {
    pub const ALL: [CountFamily; 9] = [
        Self::NstarM,
        Self::NM,
        Self::NstarMDeg,
        Self::NMDeg,
        Self::NstarE,
        Self::NE,
        Self::Rstar,
        Self::RstarDeg,
        Self::RstarE,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::NstarM => "NstarM",
            Self::NM => "NM",
            Self::NstarMDeg => "NstarM_deg",
            Self::NMDeg => "NM_deg",
            Self::NstarE => "Nstar_e",
            Self::NE => "N_e",
            Self::Rstar => "Rstar",
            Self::RstarDeg => "Rstar_deg",
            Self::RstarE => "Rstar_e",
        }
    }
}

impl FromStr for CountFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown count family {s:?}")))
    }
}

impl fmt::Display for CountFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CountQuery {
    pub family: CountFamily,
    pub q: u64,
    pub m: u64,
    pub degree: u64,
    pub k: Option<u64>,
    pub e: Option<u64>,
}

impl fmt::Display for CountQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(q={}, M={}, deg={}", self.family, self.q, self.m, self.degree)?;
        if let Some(k) = self.k {
            write!(f, ", k={k}")?;
        }
        if let Some(e) = self.e {
            write!(f, ", e={e}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairVariant {
    Plain,
    ByDegree(u64),
    ByExponent(u64),
}

fn domain(msg: impl Into<String>) -> Error {
    Error::ParamDomain(msg.into())
}

fn check_qm(q: u64, m: u64) -> Result<()> {
    if arith::prime_power(q).is_none() {
        return Err(Error::NotPrimePower(q));
    }
    if m == 0 {
        return Err(domain("M must be at least 1"));
    }
    if gcd(m, q) != 1 {
        return Err(domain(format!("gcd(M, q) = {} is not 1", gcd(m, q))));
    }
    Ok(())
}

fn qpow(q: u64, n: u64) -> Result<u64> {
    u32::try_from(n)
        .ok()
        .and_then(|n| q.checked_pow(n))
        .filter(|&v| v < u64::MAX / 2)
        .ok_or_else(|| Error::BoundExceeded(format!("{q}^{n} exceeds 63 bits")))
}

fn odd_part(mut n: u64) -> u64 {
    while n > 0 && n.is_multiple_of(2) {
        n /= 2;
    }
    n
}

/// Irreducible monic polynomials other than `x` sharing one exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExponentClass {
    pub e: u64,
    pub count: u64,
    pub self_reciprocal: bool,
}

/// Irreducibles of degree `j` (other than `x`) grouped by exponent: orders `e | q^j - 1`
/// with `ord_e(q) = j`, each contributing `φ(e)/j` polynomials.
pub fn exponent_census(q: u64, j: u64) -> Result<Vec<ExponentClass>> {
    let group = qpow(q, j)? - 1;
    Ok(divisors(group)
        .into_iter()
        .filter(|&e| mult_order(q, e) == Some(j))
        .map(|e| ExponentClass {
            e,
            count: euler_phi(e) / j,
            self_reciprocal: arith::minus_one_in_powers(q, e),
        })
        .collect())
}

/// Roots of order `e` in `F_{q^j}^×` are M-th powers there.
fn exponent_is_m_power(q: u64, j: u64, m: u64, e: u64) -> Result<bool> {
    let group = qpow(q, j)? - 1;
    Ok((group / gcd(m, group)).is_multiple_of(e))
}

/// Roots of order `e` in the norm-one group of order `q^i + 1` are M-th powers there.
fn exponent_is_mstar_power(q: u64, i: u64, m: u64, e: u64) -> Result<bool> {
    let u = qpow(q, i)? + 1;
    Ok((u / gcd(m, u)).is_multiple_of(e))
}

/// Some M-th root of an element of order `e` generates `F_{q^n}`.
fn reaches_degree(q: u64, m: u64, e: u64, n: u64) -> bool {
    divisors(m * e)
        .into_iter()
        .any(|t| t / gcd(t, m) == e && mult_order(q, t) == Some(n))
}

/// Number of M*-power SRIM polynomials of degree `2k`.
pub fn count_mstar_srim(q: u64, two_k: u64, m: u64) -> Result<u64> {
    check_qm(q, m)?;
    if two_k < 2 || !two_k.is_multiple_of(2) {
        return Err(domain(format!("SRIM degree {two_k} must be even and positive")));
    }
    let k = two_k / 2;
    let u = qpow(q, k)? + 1;
    let g = gcd(m, u);
    let mut total: i128 = 0;
    for l in divisors(k).into_iter().filter(|l| l % 2 == 1) {
        let sub = qpow(q, k / l)? as u128 + 1;
        let inter = (m as u128 * sub).gcd(&(u as u128)) / g as u128;
        total += mobius(l) as i128 * inter as i128;
    }
    if odd_part(k) == 1 {
        let image = u / g;
        let minus_one = q % 2 == 1 && image.is_multiple_of(2);
        total -= 1 + minus_one as i128;
    }
    Ok(exact_div(total, two_k as i128))
}

fn exact_div(num: i128, den: i128) -> u64 {
    assert!(num >= 0 && num % den == 0, "count {num}/{den} is not a natural number");
    (num / den) as u64
}

/// Number of M-power irreducibles of degree `k`, excluding `x`.
pub fn count_m_power(q: u64, k: u64, m: u64) -> Result<u64> {
    check_qm(q, m)?;
    if k == 0 {
        return Err(domain("degree must be positive"));
    }
    let group = qpow(q, k)?;
    let group = group as u128 - 1;
    let g = (m as u128).gcd(&group);
    let mut total: i128 = 0;
    for l in divisors(k) {
        let sub = qpow(q, k / l)? as u128 - 1;
        total += mobius(l) as i128 * ((m as u128 * sub).gcd(&group) / g) as i128;
    }
    Ok(exact_div(total, k as i128))
}

/// Degenerate `(M, n, n/k)` irreducibles; `k = 1` gives the M-power count.
pub fn count_degenerate(q: u64, n: u64, k: u64, m: u64) -> Result<u64> {
    check_qm(q, m)?;
    if k == 0 || n == 0 || !n.is_multiple_of(k) {
        return Err(domain(format!("k = {k} must divide n = {n}")));
    }
    if k == 1 {
        return count_m_power(q, n, m);
    }
    let j = n / k;
    let mut total = 0;
    for c in exponent_census(q, j)? {
        if !exponent_is_m_power(q, j, m, c.e)? && reaches_degree(q, m, c.e, n) {
            total += c.count;
        }
    }
    Ok(total)
}

/// Degenerate SRIM of degree `2n/k` reaching degree `2n`; `k = 1` gives the M*-power count.
pub fn count_degenerate_srim(q: u64, two_n: u64, k: u64, m: u64) -> Result<u64> {
    check_qm(q, m)?;
    if two_n < 2 || !two_n.is_multiple_of(2) {
        return Err(domain(format!("{two_n} must be even and positive")));
    }
    let n = two_n / 2;
    if k == 0 || k.is_multiple_of(2) || !n.is_multiple_of(k) {
        return Err(domain(format!("k = {k} must be odd and divide n = {n}")));
    }
    if k == 1 {
        return count_mstar_srim(q, two_n, m);
    }
    let j = two_n / k;
    let mut total = 0;
    for c in exponent_census(q, j)? {
        if c.self_reciprocal
            && j >= 2
            && !exponent_is_m_power(q, j, m, c.e)?
            && reaches_degree(q, m, c.e, two_n)
        {
            total += c.count;
        }
    }
    Ok(total)
}

/// Non-M*-power SRIM of degree `2n` with exponent `e`, where `e | q^n + 1`.
pub fn count_srim_by_exponent(q: u64, two_n: u64, e: u64, m: u64) -> Result<u64> {
    check_qm(q, m)?;
    if two_n < 2 || !two_n.is_multiple_of(2) {
        return Err(domain(format!("{two_n} must be even and positive")));
    }
    let n = two_n / 2;
    let u = qpow(q, n)? + 1;
    if e == 0 || u % e != 0 {
        return Err(domain(format!("e = {e} does not divide q^n + 1 = {u}")));
    }
    if mult_order(q, e) != Some(two_n) || exponent_is_mstar_power(q, n, m, e)? {
        return Ok(0);
    }
    Ok(euler_phi(e) / two_n)
}

/// Non-M-power irreducibles of degree `n` with exponent `e`, where `e | q^n - 1`.
pub fn count_by_exponent(q: u64, n: u64, e: u64, m: u64) -> Result<u64> {
    check_qm(q, m)?;
    if n == 0 {
        return Err(domain("degree must be positive"));
    }
    let group = qpow(q, n)? - 1;
    if e == 0 || group % e != 0 {
        return Err(domain(format!("e = {e} does not divide q^n - 1 = {group}")));
    }
    if mult_order(q, e) != Some(n) || exponent_is_m_power(q, n, m, e)? {
        return Ok(0);
    }
    Ok(euler_phi(e) / n)
}

/// Self-reciprocal irreducibles of degree `j` (including `x ± 1`) that satisfy `keep`.
fn self_reciprocal_count(
    q: u64,
    j: u64,
    mut keep: impl FnMut(u64) -> Result<bool>,
) -> Result<u64> {
    let mut total = 0;
    for c in exponent_census(q, j)? {
        if c.self_reciprocal && keep(c.e)? {
            total += c.count;
        }
    }
    Ok(total)
}

/// Pairs `{φ, φ*}` with `φ ≠ φ*` irreducible of degree `n = two_n / 2`.
pub fn count_pairs(q: u64, two_n: u64, m: u64, variant: PairVariant) -> Result<u64> {
    check_qm(q, m)?;
    if two_n < 2 || !two_n.is_multiple_of(2) {
        return Err(domain(format!("{two_n} must be even and positive")));
    }
    let n = two_n / 2;
    let halve = |a: u64, b: u64| {
        assert!(a >= b && (a - b).is_multiple_of(2), "pair count ({a} - {b})/2 is not natural");
        (a - b) / 2
    };
    match variant {
        PairVariant::Plain => {
            let all = count_m_power(q, n, m)?;
            let sr = self_reciprocal_count(q, n, |e| exponent_is_m_power(q, n, m, e))?;
            Ok(halve(all, sr))
        }
        PairVariant::ByDegree(k) => {
            if k == 0 || !n.is_multiple_of(k) {
                return Err(domain(format!("k = {k} must divide n = {n}")));
            }
            if k == 1 {
                return count_pairs(q, two_n, m, PairVariant::Plain);
            }
            let j = n / k;
            let all = count_degenerate(q, n, k, m)?;
            let sr = self_reciprocal_count(q, j, |e| {
                Ok(!exponent_is_m_power(q, j, m, e)? && reaches_degree(q, m, e, n))
            })?;
            Ok(halve(all, sr))
        }
        PairVariant::ByExponent(e) => {
            let group = qpow(q, n)? - 1;
            if e == 0 || group % e != 0 {
                return Err(domain(format!("e = {e} does not divide q^n - 1 = {group}")));
            }
            if mult_order(q, e) != Some(n)
                || arith::minus_one_in_powers(q, e)
                || exponent_is_m_power(q, n, m, e)?
            {
                return Ok(0);
            }
            Ok(euler_phi(e) / two_n)
        }
    }
}

fn query_k(query: &CountQuery) -> Result<u64> {
    query
        .k
        .ok_or_else(|| domain(format!("{} needs a divisor k", query.family)))
}

fn query_e(query: &CountQuery) -> Result<u64> {
    query
        .e
        .ok_or_else(|| domain(format!("{} needs an exponent e", query.family)))
}

fn corrected(query: &CountQuery) -> Result<u64> {
    let CountQuery { q, m, degree, .. } = *query;
    match query.family {
        CountFamily::NstarM => count_mstar_srim(q, degree, m),
        CountFamily::NM => count_m_power(q, degree, m),
        CountFamily::NstarMDeg => count_degenerate_srim(q, degree, query_k(query)?, m),
        CountFamily::NMDeg => count_degenerate(q, degree, query_k(query)?, m),
        CountFamily::NstarE => count_srim_by_exponent(q, degree, query_e(query)?, m),
        CountFamily::NE => count_by_exponent(q, degree, query_e(query)?, m),
        CountFamily::Rstar => count_pairs(q, degree, m, PairVariant::Plain),
        CountFamily::RstarDeg => count_pairs(q, degree, m, PairVariant::ByDegree(query_k(query)?)),
        CountFamily::RstarE => count_pairs(q, degree, m, PairVariant::ByExponent(query_e(query)?)),
    }
}

/// Closed-form value under the chosen variant; `Corrected` is always a natural number.
pub fn closed_form(query: &CountQuery, variant: FormulaVariant) -> Result<BigRational> {
    match variant {
        FormulaVariant::Corrected => Ok(BigRational::from_integer(corrected(query)?.into())),
        _ => {
            check_qm(query.q, query.m)?;
            printed(query, variant == FormulaVariant::PrintedAlt)
        }
    }
}

fn big(v: u64) -> BigInt {
    BigInt::from(v)
}

fn bq(q: u64, e: u64) -> BigInt {
    Pow::pow(big(q), e as u32)
}

fn ratio(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

/// `a / b` when `b` divides `a` exactly.
fn div_int(a: u64, b: u64) -> Option<u64> {
    (b != 0 && a.is_multiple_of(b)).then(|| a / b)
}

fn printed(query: &CountQuery, alt: bool) -> Result<BigRational> {
    let CountQuery { q, m, degree, .. } = *query;
    let bm = big(m);
    let g = |a: &BigInt, b: &BigInt| a.gcd(b);
    Ok(match query.family {
        CountFamily::NstarM => printed_nstar(q, m, degree),
        CountFamily::NM => printed_nm(q, m, degree),
        CountFamily::NstarMDeg => printed_nstar_deg(q, m, degree, query_k(query)?, alt),
        CountFamily::NMDeg => printed_nm_deg(q, m, degree, query_k(query)?, alt),
        CountFamily::NstarE => {
            let e = big(query_e(query)?);
            let mut first = BigInt::zero();
            let mut second = BigInt::zero();
            for l in divisors(degree).into_iter().filter(|l| l % 2 == 1) {
                let mu = big(mobius(l).unsigned_abs()) * mobius(l).signum();
                first += &mu * euler_phi(query_e(query)?);
                second += &mu * g(&(&bm * (bq(q, degree / l) - 1)), &e);
            }
            let d = big(degree);
            ratio(first, d.clone()) - ratio(second, d * g(&bm, &(bq(q, degree) - 1)))
        }
        CountFamily::NE => printed_ne(q, m, degree, query_e(query)?, alt),
        CountFamily::Rstar => {
            let n = degree / 2;
            let half = ratio(BigInt::one(), big(2));
            if n % 2 == 1 {
                half * printed_nm(q, m, n)
            } else {
                half * (printed_nm(q, m, n) - printed_nstar(q, m, n))
            }
        }
        CountFamily::RstarDeg => {
            let n = degree / 2;
            let k = query_k(query)?;
            let half = ratio(BigInt::one(), big(2));
            if n % 2 == 0 && k % 2 == 1 {
                half * (printed_nm_deg(q, m, n, k, alt) - printed_nstar_deg(q, m, n, k, alt))
            } else {
                half * printed_nm_deg(q, m, n, k, alt)
            }
        }
        CountFamily::RstarE => {
            let n = degree / 2;
            let e = query_e(query)?;
            let half = ratio(BigInt::one(), big(2));
            let base = printed_ne(q, m, n, e, alt);
            if n % 2 == 1 {
                half * base
            } else {
                // The bracket is unbalanced in print; `l | n` and gcd(M q^e, q^{n/l} + 1).
                let mut s = BigInt::zero();
                for l in divisors(n) {
                    let t = bq(q, n / l) + 1;
                    // gcd(M q^e, t) = gcd(M, t) because t is prime to q.
                    s += big(mobius(l).unsigned_abs()) * mobius(l).signum() * g(&bm, &t);
                }
                let den = big(n) * g(&bm, &(bq(q, n) - 1));
                half * (base - ratio(s, den))
            }
        }
    })
}

fn gcd_big(a: BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

fn signed_mu(l: u64) -> BigInt {
    BigInt::from(mobius(l))
}

fn printed_nstar(q: u64, m: u64, two_k: u64) -> BigRational {
    let k = two_k / 2;
    let bm = big(m);
    let mut s = BigInt::zero();
    for l in divisors(two_k).into_iter().filter(|l| l % 2 == 1) {
        s += signed_mu(l) * gcd_big(&bm * (bq(q, two_k / l) - 1), &(bq(q, k) + 1));
    }
    ratio(s, big(two_k) * bm.gcd(&(bq(q, two_k) - 1)))
}

fn printed_nm(q: u64, m: u64, k: u64) -> BigRational {
    let bm = big(m);
    let group = bq(q, k) - 1;
    let mut s = BigInt::zero();
    for l in divisors(k) {
        s += signed_mu(l) * gcd_big(&bm * (bq(q, k / l) - 1), &group);
    }
    ratio(s, big(k) * bm.gcd(&group))
}

/// Degenerate SRIM display; `alt` uses the proof's `q^{n/(kl)}` placement.
fn printed_nstar_deg(q: u64, m: u64, two_n: u64, k: u64, alt: bool) -> BigRational {
    let n = two_n / 2;
    let bm = big(m);
    let mut total = BigRational::zero();
    for s in divisors(k).into_iter().filter(|&s| s % 2 == 1 && s < k) {
        let Some(n_s) = div_int(n, s) else { continue };
        let mut inner = BigInt::zero();
        for l in divisors(two_n / k).into_iter().filter(|l| l % 2 == 1) {
            let expo = if alt { div_int(n, k * l) } else { div_int(n, k * l * s) };
            let Some(expo) = expo else { continue };
            inner += signed_mu(l) * gcd_big(&bm * (bq(q, expo) + 1), &(bq(q, n_s) + 1));
        }
        let den = bm.gcd(&(bq(q, two_n / s) - 1));
        total += ratio(signed_mu(s) * inner, den);
    }
    total / BigRational::from_integer(big(2 * k))
}

fn printed_nm_deg(q: u64, m: u64, n: u64, k: u64, alt: bool) -> BigRational {
    let bm = big(m);
    let mut total = BigRational::zero();
    for s in divisors(n).into_iter().filter(|&s| s < k && (n / s).is_multiple_of(n / k)) {
        let n_s = n / s;
        let mut inner = BigInt::zero();
        for l in divisors(2 * n / k) {
            let expo = if alt { div_int(n, k * l) } else { div_int(n, k * l * s) };
            let Some(expo) = expo else { continue };
            inner += signed_mu(l) * gcd_big(&bm * (bq(q, expo) - 1), &(bq(q, n_s) - 1));
        }
        total += ratio(signed_mu(s) * inner, bm.gcd(&(bq(q, n_s) - 1)));
    }
    total / BigRational::from_integer(big(k))
}

/// Exponent display for plain polynomials; the default reads `q^{n/l} - 1` with `l | n`,
/// `alt` keeps `l | 2n` and `q^{n/l - 1}` wherever the exponent is integral.
fn printed_ne(q: u64, m: u64, n: u64, e: u64, alt: bool) -> BigRational {
    let bm = big(m);
    let be = big(e);
    let mut first = BigInt::zero();
    for l in divisors(n) {
        first += signed_mu(l) * euler_phi(e);
    }
    let mut second = BigInt::zero();
    if alt {
        for l in divisors(2 * n) {
            let Some(nl) = div_int(n, l) else { continue };
            second += signed_mu(l) * gcd_big(&bm * bq(q, nl - 1), &be);
        }
    } else {
        for l in divisors(n) {
            second += signed_mu(l) * gcd_big(&bm * (bq(q, n / l) - 1), &be);
        }
    }
    ratio(first, big(n)) - ratio(second, big(n) * bm.gcd(&(bq(q, n) - 1)))
}

/// Per-polynomial data reused by every enumeration twin.
#[derive(Clone, Debug)]
pub struct PolyRecord {
    pub poly: MonicPoly,
    pub exponent: u64,
    pub self_reciprocal: bool,
    pub is_m_power: bool,
    pub is_mstar_power: bool,
    /// Factor degrees of `f(x^M)`.
    pub spectrum: Vec<usize>,
}

type RecordKey = (u64, u64, u64, bool);

fn record_cache() -> &'static RwLock<HashMap<RecordKey, Arc<Vec<PolyRecord>>>> {
    static CACHE: OnceLock<RwLock<HashMap<RecordKey, Arc<Vec<PolyRecord>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Classifies every irreducible of degree `j` (or every SRIM of degree `j` when `srim`)
/// with respect to `M`, memoized per `(q, M, j, srim)`.
pub fn enumerate_records(q: u64, m: u64, j: u64, srim: bool, bound: u64) -> Result<Arc<Vec<PolyRecord>>> {
    check_qm(q, m)?;
    let key = (q, m, j, srim);
    if let Some(r) = record_cache().read().expect("cache lock").get(&key) {
        return Ok(Arc::clone(r));
    }
    let candidates = if srim { j / 2 } else { j };
    let size = qpow(q, candidates)?;
    if size > bound {
        return Err(Error::BoundExceeded(format!(
            "{size} candidate polynomials exceed enumeration bound {bound}"
        )));
    }
    let ctx = FieldCtx::of_order(q)?;
    let polys = if srim {
        if j < 2 || !j.is_multiple_of(2) {
            return Err(domain(format!("SRIM degree {j} must be even and positive")));
        }
        srim_by_search(&ctx, j as usize)
    } else {
        irreducibles(&ctx, j as usize)
    };
    let records = polys
        .into_par_iter()
        .map(|f| {
            let composed = f.compose_power(m as usize);
            let spectrum = composed.factor_degrees()?;
            let is_m_power = powerclass::is_m_power(&f, m)?;
            let is_mstar_power = srim && powerclass::is_mstar_power(&f, m)?;
            Ok(PolyRecord {
                exponent: f.exponent_of()?,
                self_reciprocal: f.is_self_reciprocal(),
                is_m_power,
                is_mstar_power,
                spectrum,
                poly: f,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let records = Arc::new(records);
    record_cache()
        .write()
        .expect("cache lock")
        .insert(key, Arc::clone(&records));
    Ok(records)
}

/// Ground truth by exhaustive enumeration.
pub fn enumerate_count(query: &CountQuery) -> Result<u64> {
    enumerate_count_bounded(query, DEFAULT_ENUMERATION_BOUND)
}

pub fn enumerate_count_bounded(query: &CountQuery, bound: u64) -> Result<u64> {
    let CountQuery { q, m, degree, .. } = *query;
    check_qm(q, m)?;
    let count = |recs: &[PolyRecord], pred: &dyn Fn(&PolyRecord) -> bool| {
        recs.iter().filter(|r| pred(r)).count() as u64
    };
    let half = |d: u64| -> Result<u64> {
        if d < 2 || !d.is_multiple_of(2) {
            Err(domain(format!("{d} must be even and positive")))
        } else {
            Ok(d / 2)
        }
    };
    let pairs = |n: u64| -> u64 { n / 2 };
    match query.family {
        CountFamily::NstarM => {
            half(degree)?;
            let recs = enumerate_records(q, m, degree, true, bound)?;
            Ok(count(&recs, &|r| r.is_mstar_power))
        }
        CountFamily::NM => {
            let recs = enumerate_records(q, m, degree, false, bound)?;
            Ok(count(&recs, &|r| r.is_m_power))
        }
        CountFamily::NstarMDeg => {
            let n = half(degree)?;
            let k = query_k(query)?;
            if k % 2 == 0 || n % k != 0 {
                return Err(domain(format!("k = {k} must be odd and divide n = {n}")));
            }
            let recs = enumerate_records(q, m, degree / k, true, bound)?;
            if k == 1 {
                return Ok(count(&recs, &|r| r.is_mstar_power));
            }
            Ok(count(&recs, &|r| !r.is_m_power && r.spectrum.contains(&(degree as usize))))
        }
        CountFamily::NMDeg => {
            let k = query_k(query)?;
            if k == 0 || degree % k != 0 {
                return Err(domain(format!("k = {k} must divide n = {degree}")));
            }
            let recs = enumerate_records(q, m, degree / k, false, bound)?;
            if k == 1 {
                return Ok(count(&recs, &|r| r.is_m_power));
            }
            Ok(count(&recs, &|r| !r.is_m_power && r.spectrum.contains(&(degree as usize))))
        }
        CountFamily::NstarE => {
            half(degree)?;
            let e = query_e(query)?;
            let recs = enumerate_records(q, m, degree, true, bound)?;
            Ok(count(&recs, &|r| r.exponent == e && !r.is_mstar_power))
        }
        CountFamily::NE => {
            let e = query_e(query)?;
            let recs = enumerate_records(q, m, degree, false, bound)?;
            Ok(count(&recs, &|r| r.exponent == e && !r.is_m_power))
        }
        CountFamily::Rstar => {
            let n = half(degree)?;
            let recs = enumerate_records(q, m, n, false, bound)?;
            Ok(pairs(count(&recs, &|r| !r.self_reciprocal && r.is_m_power)))
        }
        CountFamily::RstarDeg => {
            let n = half(degree)?;
            let k = query_k(query)?;
            if k == 0 || n % k != 0 {
                return Err(domain(format!("k = {k} must divide n = {n}")));
            }
            let recs = enumerate_records(q, m, n / k, false, bound)?;
            let pred: Box<dyn Fn(&PolyRecord) -> bool> = if k == 1 {
                Box::new(|r| r.is_m_power)
            } else {
                Box::new(move |r| !r.is_m_power && r.spectrum.contains(&(n as usize)))
            };
            Ok(pairs(count(&recs, &|r| !r.self_reciprocal && pred(r))))
        }
        CountFamily::RstarE => {
            let n = half(degree)?;
            let e = query_e(query)?;
            let recs = enumerate_records(q, m, n, false, bound)?;
            Ok(pairs(count(&recs, &|r| {
                !r.self_reciprocal && r.exponent == e && !r.is_m_power
            })))
        }
    }
}

/// Integer value of a rational, if it is one.
pub fn as_natural(r: &BigRational) -> Option<u64> {
    r.is_integer().then(|| r.to_integer().to_u64()).flatten()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(family: CountFamily, q: u64, m: u64, degree: u64) -> CountQuery {
        CountQuery {
            family,
            q,
            m,
            degree,
            k: None,
            e: None,
        }
    }

    #[test]
    fn srim_totals() {
        assert_eq!(count_mstar_srim(5, 4, 1).unwrap(), 6);
        assert_eq!(count_mstar_srim(2, 12, 1).unwrap(), 5);
        assert_eq!(count_mstar_srim(2, 2, 1).unwrap(), 1);
        assert_eq!(enumerate_count(&q(CountFamily::NstarM, 5, 1, 4)).unwrap(), 6);
        assert_eq!(enumerate_count(&q(CountFamily::NstarM, 2, 1, 12)).unwrap(), 5);
        assert_eq!(
            count_mstar_srim(5, 4, 2).unwrap(),
            enumerate_count(&q(CountFamily::NstarM, 5, 2, 4)).unwrap()
        );
    }

    #[test]
    fn printed_srim_display_is_not_integral() {
        let v = closed_form(&q(CountFamily::NstarM, 5, 1, 4), FormulaVariant::Printed).unwrap();
        assert_eq!(v, BigRational::new(13.into(), 2.into()));
    }

    #[test]
    fn m_power_counts() {
        assert_eq!(count_m_power(5, 1, 1).unwrap(), 4);
        assert_eq!(count_m_power(5, 1, 2).unwrap(), 2);
        assert_eq!(
            count_m_power(3, 2, 2).unwrap(),
            enumerate_count(&q(CountFamily::NM, 3, 2, 2)).unwrap()
        );
        assert_eq!(
            count_m_power(2, 3, 3).unwrap(),
            enumerate_count(&q(CountFamily::NM, 2, 3, 3)).unwrap()
        );
    }

    #[test]
    fn pairs_small() {
        // Over F_5 the only dual pair of linear polynomials is {x - 2, x - 3}.
        assert_eq!(count_pairs(5, 2, 1, PairVariant::Plain).unwrap(), 1);
        assert_eq!(enumerate_count(&q(CountFamily::Rstar, 5, 1, 2)).unwrap(), 1);
        assert_eq!(
            count_pairs(3, 4, 1, PairVariant::Plain).unwrap(),
            enumerate_count(&q(CountFamily::Rstar, 3, 1, 4)).unwrap()
        );
    }

    #[test]
    fn degenerate_reductions() {
        assert_eq!(count_degenerate(3, 4, 1, 2).unwrap(), count_m_power(3, 4, 2).unwrap());
        assert_eq!(count_degenerate_srim(3, 12, 1, 2).unwrap(), count_mstar_srim(3, 12, 2).unwrap());
        assert_eq!(count_degenerate(3, 6, 3, 1).unwrap(), 0);
        assert_eq!(count_degenerate_srim(5, 12, 3, 1).unwrap(), 0);
    }

    #[test]
    fn exponent_examples() {
        for &(qq, n, e, m) in &[(3, 2, 8, 2), (5, 2, 24, 2), (2, 4, 15, 3)] {
            let query = CountQuery {
                family: CountFamily::NE,
                q: qq,
                m,
                degree: n,
                k: None,
                e: Some(e),
            };
            assert_eq!(count_by_exponent(qq, n, e, m).unwrap(), enumerate_count(&query).unwrap());
        }
        let query = CountQuery {
            family: CountFamily::NstarE,
            q: 5,
            m: 2,
            degree: 4,
            k: None,
            e: Some(13),
        };
        assert_eq!(count_srim_by_exponent(5, 4, 13, 2).unwrap(), enumerate_count(&query).unwrap());
    }

    #[test]
    fn census_matches_mobius() {
        for qq in [2u64, 3, 4, 5, 7] {
            for j in 1..=6 {
                for m in 1..=6u64 {
                    if gcd(m, qq) != 1 {
                        continue;
                    }
                    let via_census: u64 = exponent_census(qq, j)
                        .unwrap()
                        .iter()
                        .filter(|c| exponent_is_m_power(qq, j, m, c.e).unwrap())
                        .map(|c| c.count)
                        .sum();
                    assert_eq!(via_census, count_m_power(qq, j, m).unwrap());
                    if j % 2 == 0 {
                        let via_census: u64 = exponent_census(qq, j)
                            .unwrap()
                            .iter()
                            .filter(|c| c.self_reciprocal && exponent_is_mstar_power(qq, j / 2, m, c.e).unwrap())
                            .map(|c| c.count)
                            .sum();
                        assert_eq!(via_census, count_mstar_srim(qq, j, m).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(count_mstar_srim(5, 3, 1), Err(Error::ParamDomain(_))));
        assert!(matches!(count_m_power(4, 1, 2), Err(Error::ParamDomain(_))));
        assert!(matches!(count_srim_by_exponent(5, 4, 7, 1), Err(Error::ParamDomain(_))));
        assert!(matches!(count_degenerate_srim(5, 12, 2, 1), Err(Error::ParamDomain(_))));
    }

    #[test]
    fn variant_and_family_names_round_trip() {
        for v in [FormulaVariant::Corrected, FormulaVariant::Printed, FormulaVariant::PrintedAlt] {
            assert_eq!(v.to_string().parse::<FormulaVariant>().unwrap(), v);
        }
        for f in CountFamily::ALL {
            assert_eq!(f.name().parse::<CountFamily>().unwrap(), f);
        }
    }
}
