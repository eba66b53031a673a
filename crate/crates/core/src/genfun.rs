//! Generating functions for M-power separable, semisimple, cyclic and regular
//! elements (or classes) of symplectic and orthogonal groups.
//!
//! Every series is a product over primary components. Polynomials other than
//! `t ± 1` are grouped into strata by degree and exponent: all members of a stratum
//! share the factor pattern of `f(x^M)`, hence the same set of admissible
//! multiplicities. Symplectic series are in half-dimension units. Orthogonal
//! series are assembled in dimension units over all isometry types of quadratic
//! space, then split into the `O^+`, `O^-` and `O^0` components.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::arith::{self, divisors, euler_phi, gcd, mult_order};
use crate::error::{Error, Result};
use crate::polyring::MonicPoly;
use crate::powerclass::{self, monoid_contains, IndicatorKey};
use crate::series::RationalSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupFamily {
    Sp,
    O,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Statistic {
    Separable,
    Semisimple,
    Cyclic,
    Regular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Weighting {
    Classes,
    Probability,
}

macro_rules! named_enum {
    ($ty:ident { $($var:ident => $name:literal),* $(,)? }) => {
        impl $ty {
            pub fn name(self) -> &'static str {
                match self { $(Self::$var => $name),* }
            }
        }
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.to_ascii_lowercase().as_str() {
                    $($name => Ok(Self::$var),)*
                    _ => Err(Error::Parse(format!(concat!("unknown ", stringify!($ty), " {:?}"), s))),
                }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
    };
}

named_enum!(GroupFamily { Sp => "sp", O => "o" });
named_enum!(Statistic {
    Separable => "separable",
    Semisimple => "semisimple",
    Cyclic => "cyclic",
    Regular => "regular",
});
named_enum!(Weighting { Classes => "classes", Probability => "prob" });

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GfRequest {
    pub family: GroupFamily,
    pub statistic: Statistic,
    pub weighting: Weighting,
    pub q: u64,
    pub m: u64,
    pub order: usize,
}

impl GfRequest {
    pub fn new(
        family: GroupFamily,
        statistic: Statistic,
        weighting: Weighting,
        q: u64,
        m: u64,
        order: usize,
    ) -> Result<Self> {
        let req = Self {
            family,
            statistic,
            weighting,
            q,
            m,
            order,
        };
        req.validate()?;
        Ok(req)
    }

    fn validate(&self) -> Result<()> {
        if arith::prime_power(self.q).is_none() {
            return Err(Error::NotPrimePower(self.q));
        }
        if self.m == 0 {
            return Err(Error::ParamDomain("M must be at least 1".into()));
        }
        if gcd(self.m, self.q) != 1 {
            return Err(Error::ParamDomain(format!(
                "gcd(M, q) = {} is not 1",
                gcd(self.m, self.q)
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    GL,
    /// Unitary group of an `m`-dimensional hermitian space over `F_{q^2}`.
    U,
    Sp,
    Oplus,
    Ominus,
    Oodd,
}

/// Order of the classical group of (matrix) dimension `m` over `F_q`.
pub fn group_order(kind: GroupKind, m: u64, q: u64) -> Result<BigUint> {
    let bq = BigUint::from(q);
    let qp = |e: u64| -> BigUint { Pow::pow(&bq, e) };
    let prod = |range: std::ops::RangeInclusive<u64>, f: &dyn Fn(u64) -> BigUint| {
        range.fold(BigUint::one(), |acc, i| acc * f(i))
    };
    let even = |m: u64| {
        if m.is_multiple_of(2) {
            Ok(m / 2)
        } else {
            Err(Error::ParamDomain(format!("{kind:?} needs even dimension, got {m}")))
        }
    };
    Ok(match kind {
        GroupKind::GL => qp(m * m.saturating_sub(1) / 2) * prod(1..=m, &|i| qp(i) - 1u32),
        GroupKind::U => {
            let factor = |i: u64| {
                if i.is_multiple_of(2) {
                    qp(i) - 1u32
                } else {
                    qp(i) + 1u32
                }
            };
            qp(m * m.saturating_sub(1) / 2) * prod(1..=m, &factor)
        }
        GroupKind::Sp => {
            let n = even(m)?;
            qp(n * n) * prod(1..=n, &|i| qp(2 * i) - 1u32)
        }
        GroupKind::Oplus | GroupKind::Ominus => {
            let n = even(m)?;
            if n == 0 {
                return if kind == GroupKind::Oplus {
                    Ok(BigUint::one())
                } else {
                    Err(Error::ParamDomain("O^-(0) does not exist".into()))
                };
            }
            let last = if kind == GroupKind::Oplus {
                qp(n) - 1u32
            } else {
                qp(n) + 1u32
            };
            BigUint::from(2u32) * qp(n * (n - 1)) * last * prod(1..=n - 1, &|i| qp(2 * i) - 1u32)
        }
        GroupKind::Oodd => {
            if m.is_multiple_of(2) {
                return Err(Error::ParamDomain(format!("Oodd needs odd dimension, got {m}")));
            }
            let n = m / 2;
            let sp = qp(n * n) * prod(1..=n, &|i| qp(2 * i) - 1u32);
            if q % 2 == 1 {
                BigUint::from(2u32) * sp
            } else {
                sp
            }
        }
    })
}

fn recip(n: BigUint) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(n))
}

fn inv_order(kind: GroupKind, m: u64, q: u64) -> BigRational {
    recip(group_order(kind, m, q).expect("dimension checked by caller"))
}

fn rat(n: i64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn qpow(q: u64, e: u64) -> Result<u64> {
    u32::try_from(e)
        .ok()
        .and_then(|e| q.checked_pow(e))
        .filter(|&v| v < u64::MAX / 2)
        .ok_or_else(|| Error::BoundExceeded(format!("{q}^{e} exceeds 63 bits")))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialExponents {
    pub o: u32,
    pub e: u32,
    pub r: u64,
    pub h: u32,
    pub h_prime: u32,
    pub h_double_prime: u32,
    /// Minimal generators, in half-dimension units, of the sizes `k` for which
    /// `-1` on a `2k`-dimensional symplectic space is an M-th power.
    pub minus_one_generators: Vec<u64>,
    /// `r` came from the root search rather than a closed case.
    pub r_from_search: bool,
}

/// Half-dimension generators for `-1` blocks; empty set means only the zero block.
fn minus_one_generators(q: u64, m: u64) -> Result<Vec<u64>> {
    if q.is_multiple_of(2) {
        return Ok(vec![1]);
    }
    let key = IndicatorKey { q, m, n: 1, e: 2 };
    Ok(powerclass::IndicatorCache::new().generators(key)?.to_vec())
}

pub fn special_exponents(q: u64, m: u64) -> Result<SpecialExponents> {
    GfRequest::new(GroupFamily::Sp, Statistic::Separable, Weighting::Classes, q, m, 0)?;
    let odd = m % 2 == 1;
    let gens = minus_one_generators(q, m)?;
    let (r, r_from_search) = if odd || q.is_multiple_of(2) {
        (1, false)
    } else {
        // Dimension of the smallest -1 block that is an M-th power.
        let least = gens.iter().copied().min().unwrap_or(0);
        let closed_case = q % 4 == 3;
        (2 * least, !closed_case)
    };
    Ok(SpecialExponents {
        o: if odd { 2 } else { 1 },
        e: if q % 2 == 1 { 2 } else { 1 },
        r,
        h: if odd { 2 } else { 1 },
        h_prime: if odd { 2 } else { 1 },
        h_double_prime: u32::from(m == 2),
        minus_one_generators: gens,
        r_from_search,
    })
}

/// Polynomials other than `t ± 1` of one kind: SRIM of degree `2d` with exponent `e`,
/// or dual pairs of non-self-reciprocal irreducibles of degree `d` with exponent `e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Stratum {
    d: u64,
    e: u64,
    /// Number of SRIM polynomials, or of dual pairs.
    count: u64,
    srim: bool,
}

fn strata(q: u64, max_d: u64) -> Result<Vec<Stratum>> {
    let mut out = Vec::new();
    for d in 1..=max_d {
        let qd = qpow(q, d)?;
        for e in divisors(qd + 1) {
            if mult_order(q, e) == Some(2 * d) {
                out.push(Stratum {
                    d,
                    e,
                    count: euler_phi(e) / (2 * d),
                    srim: true,
                });
            }
        }
        for e in divisors(qd - 1) {
            if mult_order(q, e) == Some(d) && !arith::minus_one_in_powers(q, e) {
                out.push(Stratum {
                    d,
                    e,
                    count: euler_phi(e) / (2 * d),
                    srim: false,
                });
            }
        }
    }
    Ok(out)
}

impl Stratum {
    fn key(&self, q: u64, m: u64) -> IndicatorKey {
        IndicatorKey {
            q,
            m,
            n: if self.srim { 2 * self.d } else { self.d },
            e: self.e,
        }
    }
}

/// One factor of a product, before raising to the stratum count.
fn stratum_series(
    s: &Stratum,
    req: &GfRequest,
    gens: &[u64],
    signed: bool,
    order: usize,
) -> RationalSeries {
    let q = req.q;
    let d = s.d;
    let qd = q.pow(d as u32);
    let qd_b = BigUint::from(qd);
    let power_at_one = monoid_contains(gens, d);
    let mut coeffs = vec![BigRational::zero(); order + 1];
    coeffs[0] = BigRational::one();
    let mut mult = 1u64;
    while (d * mult) as usize <= order {
        let allowed = match req.statistic {
            Statistic::Separable => mult == 1 && power_at_one,
            Statistic::Semisimple => monoid_contains(gens, d * mult),
            Statistic::Cyclic | Statistic::Regular => power_at_one,
        };
        if allowed {
            let mut w = match req.weighting {
                Weighting::Classes => BigRational::one(),
                Weighting::Probability => {
                    let torus = if s.srim { &qd_b + 1u32 } else { &qd_b - 1u32 };
                    match req.statistic {
                        Statistic::Separable => recip(torus),
                        Statistic::Semisimple => {
                            let kind = if s.srim { GroupKind::U } else { GroupKind::GL };
                            inv_order(kind, mult, qd)
                        }
                        Statistic::Cyclic | Statistic::Regular => {
                            recip(torus * Pow::pow(&qd_b, mult - 1))
                        }
                    }
                }
            };
            if signed && s.srim && mult % 2 == 1 {
                w = -w;
            }
            coeffs[(d * mult) as usize] = w;
        }
        mult += 1;
    }
    RationalSeries::from_coeffs(coeffs, order)
}

/// Product over all strata, in half-dimension units; `signed` weights SRIM
/// blocks by the type `(-1)^m` of the quadratic space they carry.
fn core_product(req: &GfRequest, order: usize, signed: bool) -> Result<RationalSeries> {
    let cache = powerclass::IndicatorCache::new();
    let mut factors: BTreeMap<Vec<(usize, String)>, (RationalSeries, u64)> = BTreeMap::new();
    for s in strata(req.q, order as u64)? {
        let gens = cache.generators(s.key(req.q, req.m))?;
        let t = stratum_series(&s, req, &gens, signed, order);
        let sig: Vec<(usize, String)> = t
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, c.to_string()))
            .collect();
        factors
            .entry(sig)
            .and_modify(|(_, n)| *n += s.count)
            .or_insert((t, s.count));
    }
    let terms: Vec<(RationalSeries, i64)> = factors
        .into_values()
        .map(|(t, n)| (t, n as i64))
        .collect();
    RationalSeries::product_over(&terms, order)
}

/// Number of regular unipotent classes of `Sp(2k, q)`.
fn regular_unipotent_classes(q: u64, k: u64) -> i64 {
    if q % 2 == 1 || k >= 2 {
        2
    } else {
        1
    }
}

/// `t ± 1` components of a symplectic series, half-dimension units.
fn sp_eigen_component(req: &GfRequest, minus: bool, order: usize) -> Result<RationalSeries> {
    let q = req.q;
    let odd_m = req.m % 2 == 1;
    let mut c = vec![BigRational::zero(); order + 1];
    c[0] = BigRational::one();
    match req.statistic {
        Statistic::Separable => {}
        Statistic::Semisimple => {
            let gens = if minus {
                minus_one_generators(q, req.m)?
            } else {
                vec![1]
            };
            for k in 1..=order as u64 {
                if monoid_contains(&gens, k) {
                    c[k as usize] = match req.weighting {
                        Weighting::Classes => BigRational::one(),
                        Weighting::Probability => inv_order(GroupKind::Sp, 2 * k, q),
                    };
                }
            }
        }
        Statistic::Cyclic | Statistic::Regular => {
            if !minus || odd_m {
                for k in 1..=order as u64 {
                    c[k as usize] = match req.weighting {
                        Weighting::Classes => rat(regular_unipotent_classes(q, k), 1),
                        Weighting::Probability => recip(Pow::pow(BigUint::from(q), k)),
                    };
                }
            }
        }
    }
    Ok(RationalSeries::from_coeffs(c, order))
}

/// Generating function for `Sp(2n, q)`, coefficient of `u^n`.
pub fn gf_sp(req: &GfRequest) -> Result<RationalSeries> {
    req.validate()?;
    if req.family != GroupFamily::Sp {
        return Err(Error::ParamDomain("gf_sp needs the Sp family".into()));
    }
    let n = req.order;
    let mut out = core_product(req, n, false)?.mul(&sp_eigen_component(req, false, n)?);
    if req.q % 2 == 1 {
        out = out.mul(&sp_eigen_component(req, true, n)?);
    }
    Ok(out)
}

/// Orthogonal series split by form type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthoTriple {
    /// `O^+(2n, q)`; when unsplit, the sum over both even-dimensional types.
    pub plus: RationalSeries,
    /// `O^-(2n, q)`; zero when unsplit.
    pub minus: RationalSeries,
    /// `O^0(2n + 1, q)`.
    pub zero: RationalSeries,
    /// False when only the sum over both types is available.
    pub split: bool,
}

impl OrthoTriple {
    /// `plus(u^2) + minus(u^2) + 2u·zero(u^2)`, to the given order in `u`.
    pub fn reassemble(&self, order: usize) -> RationalSeries {
        let two = rat(2, 1);
        let even = self.plus.add(&self.minus);
        let odd = self.zero.scale(&two);
        RationalSeries::reassemble(&even, &odd, order)
    }
}

/// Sizes `(k, type)` for which `-1` on a `2k`-dimensional quadratic space of the given
/// type is an M-th power, M even.
fn minus_one_quadratic_spaces(q: u64, m: u64, max_k: u64) -> Result<Vec<[bool; 2]>> {
    let strata = powerclass::spectrum_from_exponent(q, m, 1, 2)?;
    // reach[k][0]: type +, reach[k][1]: type -
    let mut reach = vec![[false; 2]; max_k as usize + 1];
    reach[0][0] = true;
    for k in 1..=max_k as usize {
        for s in &strata {
            let (size, flip) = if s.self_reciprocal {
                (s.degree as usize / 2, 1)
            } else {
                (s.degree as usize, 0)
            };
            if size == 0 || size > k {
                continue;
            }
            for t in 0..2 {
                if reach[k - size][t] {
                    reach[k][t ^ flip] = true;
                }
            }
        }
    }
    Ok(reach)
}

/// `t ± 1` component for orthogonal groups: `(sum series in dimension units, signed
/// series in half-dimension units)`.
fn o_eigen_component(
    req: &GfRequest,
    minus: bool,
    dim_order: usize,
    half_order: usize,
) -> Result<(RationalSeries, RationalSeries)> {
    let q = req.q;
    let prob = req.weighting == Weighting::Probability;
    let active = !minus || req.m % 2 == 1;
    let mut sum = vec![BigRational::zero(); dim_order + 1];
    let mut signed = vec![BigRational::zero(); half_order + 1];
    sum[0] = BigRational::one();
    signed[0] = BigRational::one();
    let o_inv = |kind: GroupKind, dim: u64| inv_order(kind, dim, q);
    match req.statistic {
        Statistic::Separable => {
            if active && dim_order >= 1 {
                // Two one-dimensional forms, each with centralizer O(1) of order 2.
                sum[1] = if prob { rat(1, 1) } else { rat(2, 1) };
            }
        }
        Statistic::Semisimple if active => {
            for dim in 1..=dim_order as u64 {
                sum[dim as usize] = if !prob {
                    rat(2, 1)
                } else if dim % 2 == 1 {
                    o_inv(GroupKind::Oodd, dim) * rat(2, 1)
                } else {
                    o_inv(GroupKind::Oplus, dim) + o_inv(GroupKind::Ominus, dim)
                };
            }
            if prob {
                for k in 1..=half_order as u64 {
                    signed[k as usize] =
                        o_inv(GroupKind::Oplus, 2 * k) - o_inv(GroupKind::Ominus, 2 * k);
                }
            }
        }
        Statistic::Semisimple => {
            let reach = minus_one_quadratic_spaces(q, req.m, (dim_order / 2).max(half_order) as u64)?;
            for (k, r) in reach.iter().enumerate().skip(1) {
                let k64 = k as u64;
                let plus_w = if prob { o_inv(GroupKind::Oplus, 2 * k64) } else { rat(1, 1) };
                let minus_w = if prob { o_inv(GroupKind::Ominus, 2 * k64) } else { rat(1, 1) };
                let mut s = BigRational::zero();
                let mut t = BigRational::zero();
                if r[0] {
                    s += &plus_w;
                    t += &plus_w;
                }
                if r[1] {
                    s += &minus_w;
                    t -= &minus_w;
                }
                if 2 * k <= dim_order {
                    sum[2 * k] = s;
                }
                if k <= half_order {
                    signed[k] = t;
                }
            }
        }
        Statistic::Cyclic | Statistic::Regular => {
            if active {
                // Regular unipotent on an odd-dimensional space: one class per form,
                // centralizer order 2q^k.
                for k in 0..=(dim_order as u64).saturating_sub(1) / 2 {
                    let dim = (2 * k + 1) as usize;
                    if dim <= dim_order {
                        sum[dim] = if prob {
                            recip(Pow::pow(BigUint::from(q), k))
                        } else {
                            rat(2, 1)
                        };
                    }
                }
            }
            if req.statistic == Statistic::Regular {
                // Nearly cyclic: 1 ⊕ J_{2k-1}. For k = 1 this is ±1 on O^±(2).
                if dim_order >= 2 {
                    let mut w = BigRational::zero();
                    for (kind, eps) in [(GroupKind::Oplus, 1i64), (GroupKind::Ominus, -1)] {
                        let rot = (q as i64 - eps) as u64;
                        let ok = active || (rot / gcd(req.m, rot)).is_multiple_of(2);
                        if ok {
                            w += if prob { o_inv(kind, 2) } else { rat(1, 1) };
                        }
                    }
                    sum[2] = w;
                }
                if active {
                    for k in 2..=(dim_order as u64) / 2 {
                        sum[2 * k as usize] = if prob {
                            recip(Pow::pow(BigUint::from(q), k))
                        } else {
                            rat(4, 1)
                        };
                    }
                }
            }
        }
    }
    Ok((
        RationalSeries::from_coeffs(sum, dim_order),
        RationalSeries::from_coeffs(signed, half_order),
    ))
}

/// Right-hand side of the sum equation, in dimension units to order `2N + 1`.
pub fn ortho_sum_rhs(req: &GfRequest) -> Result<RationalSeries> {
    check_ortho(req)?;
    let dim_order = 2 * req.order + 1;
    let core = core_product(req, req.order, false)?.substitute_upow_into(2, dim_order);
    let (plus, _) = o_eigen_component(req, false, dim_order, req.order)?;
    let (minus, _) = o_eigen_component(req, true, dim_order, req.order)?;
    Ok(core.mul(&plus).mul(&minus))
}

/// Right-hand side of the difference equation, `O^+` minus `O^-`, half-dimension units.
pub fn ortho_difference_rhs(req: &GfRequest) -> Result<RationalSeries> {
    check_ortho(req)?;
    if req.statistic == Statistic::Regular {
        return Err(Error::ParamDomain(
            "no difference equation for regular elements".into(),
        ));
    }
    let n = req.order;
    let core = core_product(req, n, true)?;
    let (_, plus) = o_eigen_component(req, false, 2 * n + 1, n)?;
    let (_, minus) = o_eigen_component(req, true, 2 * n + 1, n)?;
    Ok(core.mul(&plus).mul(&minus))
}

fn check_ortho(req: &GfRequest) -> Result<()> {
    req.validate()?;
    if req.family != GroupFamily::O {
        return Err(Error::ParamDomain("orthogonal series need the O family".into()));
    }
    if req.q.is_multiple_of(2) {
        return Err(Error::OddCharRequired);
    }
    Ok(())
}

/// Solves the sum and difference equations for the three orthogonal series.
pub fn gf_ortho(req: &GfRequest) -> Result<OrthoTriple> {
    let n = req.order;
    let sum = ortho_sum_rhs(req)?;
    let (even, odd) = sum.parity_split();
    let even = even.truncate(n);
    let zero = odd.truncate(n).scale(&rat(1, 2));
    if req.statistic == Statistic::Regular {
        return Ok(OrthoTriple {
            plus: even,
            minus: RationalSeries::zero(n),
            zero,
            split: false,
        });
    }
    let diff = ortho_difference_rhs(req)?;
    let half = rat(1, 2);
    Ok(OrthoTriple {
        plus: even.add(&diff).scale(&half),
        minus: even.sub(&diff).scale(&half),
        zero,
        split: true,
    })
}

/// Either family, for callers that do not care about the split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GfResult {
    Sp(RationalSeries),
    O(OrthoTriple),
}

pub fn generating_function(req: &GfRequest) -> Result<GfResult> {
    match req.family {
        GroupFamily::Sp => gf_sp(req).map(GfResult::Sp),
        GroupFamily::O => gf_ortho(req).map(GfResult::O),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ambient {
    Sp,
    O,
}

/// Primary component of a conjugacy class: an irreducible polynomial with a partition,
/// and for `t ± 1` the form types of the multiplicity spaces that need one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallPart {
    pub poly: MonicPoly,
    /// Parts in any order.
    pub partition: Vec<u64>,
    /// Part size to type (`+1`/`-1`) of its multiplicity space.
    pub signs: BTreeMap<u64, i8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallDatum {
    pub parts: Vec<WallPart>,
}

fn multiplicities(partition: &[u64]) -> BTreeMap<u64, u64> {
    let mut m = BTreeMap::new();
    for &p in partition.iter().filter(|&&p| p > 0) {
        *m.entry(p).or_insert(0) += 1;
    }
    m
}

/// `Σ (λ'_i)^2` for the conjugate partition.
fn conjugate_square_sum(partition: &[u64]) -> u64 {
    let max = partition.iter().copied().max().unwrap_or(0);
    (1..=max)
        .map(|i| partition.iter().filter(|&&p| p >= i).count() as u64)
        .map(|c| c * c)
        .sum()
}

impl WallDatum {
    /// Whether the centralizer order depends on form types the datum must supply.
    pub fn needs_signs(&self, ambient: Ambient) -> bool {
        self.parts.iter().any(|p| {
            is_pm_one(&p.poly)
                && multiplicities(&p.partition).iter().any(|(&size, &mult)| {
                    let carries_o = match ambient {
                        Ambient::Sp => size % 2 == 0,
                        Ambient::O => size % 2 == 1,
                    };
                    carries_o && mult % 2 == 0
                })
        })
    }

    pub fn dimension(&self) -> u64 {
        self.parts
            .iter()
            .map(|p| p.poly.degree() as u64 * p.partition.iter().sum::<u64>())
            .sum()
    }
}

fn is_pm_one(f: &MonicPoly) -> bool {
    f.degree() == 1 && {
        let c = f.constant_term();
        let ctx = f.ctx();
        c == ctx.from_i64(1) || c == ctx.from_i64(-1)
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidDatum(msg.into())
}

/// Centralizer order of the class with the given datum.
pub fn centralizer_order_from_data(data: &WallDatum, ambient: Ambient) -> Result<BigUint> {
    let mut total = BigUint::one();
    let mut seen_pairs: Vec<MonicPoly> = Vec::new();
    for part in &data.parts {
        let f = &part.poly;
        if !f.is_irreducible()? || f.constant_term() == 0 {
            return Err(invalid(format!("{f} is not an irreducible polynomial other than x")));
        }
        let q = f.q();
        let mults = multiplicities(&part.partition);
        if mults.is_empty() {
            continue;
        }
        let lam_sq = conjugate_square_sum(&part.partition);
        if is_pm_one(f) {
            total *= pm_one_centralizer(q, &part.partition, &mults, &part.signs, ambient)?;
            continue;
        }
        let d = f.degree() as u64;
        let sum_m_sq: u64 = mults.values().map(|m| m * m).sum();
        if f.is_self_reciprocal() {
            let qd = q.pow((d / 2) as u32);
            let mut c: BigUint = Pow::pow(BigUint::from(qd), lam_sq - sum_m_sq);
            for &m in mults.values() {
                c *= group_order(GroupKind::U, m, qd)?;
            }
            total *= c;
        } else {
            let dual = f.reciprocal_dual()?;
            let partner = data
                .parts
                .iter()
                .find(|p| p.poly == dual)
                .ok_or_else(|| invalid(format!("{f} appears without its dual {dual}")))?;
            if multiplicities(&partner.partition) != mults {
                return Err(invalid(format!("{f} and {dual} carry different partitions")));
            }
            if seen_pairs.contains(&dual) {
                continue;
            }
            seen_pairs.push(f.clone());
            let qd = q.pow(d as u32);
            let mut c: BigUint = Pow::pow(BigUint::from(qd), lam_sq - sum_m_sq);
            for &m in mults.values() {
                c *= group_order(GroupKind::GL, m, qd)?;
            }
            total *= c;
        }
    }
    Ok(total)
}

fn pm_one_centralizer(
    q: u64,
    partition: &[u64],
    mults: &BTreeMap<u64, u64>,
    signs: &BTreeMap<u64, i8>,
    ambient: Ambient,
) -> Result<BigUint> {
    let sp_parity = match ambient {
        Ambient::Sp => 1,
        Ambient::O => 0,
    };
    for (&size, &m) in mults {
        if size % 2 == sp_parity && m % 2 == 1 {
            return Err(invalid(format!("part {size} must have even multiplicity")));
        }
    }
    if q.is_multiple_of(2) {
        return match ambient {
            Ambient::O => Err(Error::OddCharRequired),
            Ambient::Sp if mults.keys().all(|&s| s == 1) => {
                group_order(GroupKind::Sp, mults[&1], q)
            }
            Ambient::Sp => Err(invalid("unipotent classes in even characteristic are not covered")),
        };
    }
    let lam_sq = conjugate_square_sum(partition);
    let odd_parts: u64 = mults.iter().filter(|(s, _)| *s % 2 == 1).map(|(_, m)| m).sum();
    let mut reductive_dim = 0u64;
    let mut reductive = BigUint::one();
    for (&size, &m) in mults {
        let symplectic = (size % 2 == 1) == (ambient == Ambient::Sp);
        if symplectic {
            reductive_dim += m * (m + 1) / 2;
            reductive *= group_order(GroupKind::Sp, m, q)?;
        } else {
            reductive_dim += m * m.saturating_sub(1) / 2;
            let kind = if m % 2 == 1 {
                GroupKind::Oodd
            } else {
                match signs.get(&size) {
                    Some(1) => GroupKind::Oplus,
                    Some(-1) => GroupKind::Ominus,
                    _ => return Err(invalid(format!("part {size} needs a form type"))),
                }
            };
            reductive *= group_order(kind, m, q)?;
        }
    }
    // Twice the dimension of the algebraic centralizer.
    let twice_dim = match ambient {
        Ambient::Sp => lam_sq + odd_parts,
        Ambient::O => lam_sq - odd_parts,
    };
    let unipotent_dim = twice_dim / 2 - reductive_dim;
    Ok(Pow::pow(BigUint::from(q), unipotent_dim) * reductive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{count_mstar_srim, count_pairs, PairVariant};
    use crate::gfq::FieldCtx;

    fn req(family: GroupFamily, stat: Statistic, w: Weighting, q: u64, m: u64, n: usize) -> GfRequest {
        GfRequest::new(family, stat, w, q, m, n).unwrap()
    }

    #[test]
    fn group_orders() {
        assert_eq!(group_order(GroupKind::Sp, 2, 3).unwrap(), BigUint::from(24u32));
        assert_eq!(group_order(GroupKind::GL, 1, 5).unwrap(), BigUint::from(4u32));
        assert_eq!(group_order(GroupKind::Oodd, 3, 3).unwrap(), BigUint::from(48u32));
        assert_eq!(group_order(GroupKind::Oplus, 2, 3).unwrap(), BigUint::from(4u32));
        assert_eq!(group_order(GroupKind::Ominus, 2, 3).unwrap(), BigUint::from(8u32));
        assert_eq!(group_order(GroupKind::Sp, 4, 3).unwrap(), BigUint::from(51840u32));
        assert_eq!(group_order(GroupKind::U, 1, 3).unwrap(), BigUint::from(4u32));
        assert!(group_order(GroupKind::Sp, 3, 3).is_err());
    }

    #[test]
    fn special_exponent_cases() {
        let s = special_exponents(5, 3).unwrap();
        assert_eq!((s.o, s.e, s.r, s.h, s.h_prime, s.h_double_prime), (2, 2, 1, 2, 2, 0));
        let s = special_exponents(7, 4).unwrap();
        assert_eq!(s.r, 2);
        let s = special_exponents(3, 2).unwrap();
        assert_eq!((s.o, s.r, s.h_double_prime), (1, 2, 1));
    }

    #[test]
    fn constant_terms_are_one() {
        for stat in [Statistic::Separable, Statistic::Semisimple, Statistic::Cyclic] {
            for w in [Weighting::Classes, Weighting::Probability] {
                let s = gf_sp(&req(GroupFamily::Sp, stat, w, 3, 2, 4)).unwrap();
                assert!(s.coeff(0).is_one());
                let t = gf_ortho(&req(GroupFamily::O, stat, w, 3, 2, 4)).unwrap();
                assert!(t.plus.coeff(0).is_one());
                assert!(t.minus.coeff(0).is_zero());
            }
        }
    }

    #[test]
    fn separable_first_coefficient() {
        let s = gf_sp(&req(GroupFamily::Sp, Statistic::Separable, Weighting::Probability, 3, 2, 3)).unwrap();
        let nstar = count_mstar_srim(3, 2, 2).unwrap() as i64;
        let rstar = count_pairs(3, 2, 2, PairVariant::Plain).unwrap() as i64;
        assert_eq!(s.coeff(1), rat(nstar, 4) + rat(rstar, 2));
    }

    #[test]
    fn regular_equals_cyclic_for_sp() {
        let a = gf_sp(&req(GroupFamily::Sp, Statistic::Cyclic, Weighting::Probability, 5, 3, 5)).unwrap();
        let b = gf_sp(&req(GroupFamily::Sp, Statistic::Regular, Weighting::Probability, 5, 3, 5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cyclic_odd_power_leading_factor() {
        // With M = 1 every class is a first power; the t ± 1 factors are 1/(1 - u/q) each.
        let s = gf_sp(&req(GroupFamily::Sp, Statistic::Cyclic, Weighting::Probability, 3, 1, 1)).unwrap();
        // Only ±I are non-cyclic in SL(2, 3).
        assert_eq!(s.coeff(1), rat(11, 12));
    }

    #[test]
    fn orthogonal_reassembly() {
        for stat in [Statistic::Separable, Statistic::Semisimple, Statistic::Cyclic, Statistic::Regular] {
            let r = req(GroupFamily::O, stat, Weighting::Probability, 3, 2, 6);
            let t = gf_ortho(&r).unwrap();
            let rhs = ortho_sum_rhs(&r).unwrap();
            assert_eq!(t.reassemble(2 * 6 + 1), rhs.truncate(2 * 6 + 1));
        }
        assert_eq!(
            gf_ortho(&req(GroupFamily::O, Statistic::Separable, Weighting::Probability, 2, 1, 3)),
            Err(Error::OddCharRequired)
        );
    }

    #[test]
    fn centralizers() {
        let f3 = FieldCtx::of_order(3).unwrap();
        let datum = |poly: MonicPoly, partition: Vec<u64>| WallDatum {
            parts: vec![WallPart {
                poly,
                partition,
                signs: BTreeMap::new(),
            }],
        };
        let srim = MonicPoly::from_ints(&f3, &[1, 0, 1]).unwrap();
        let c = centralizer_order_from_data(&datum(srim, vec![1]), Ambient::Sp).unwrap();
        assert_eq!(c, BigUint::from(4u32));
        let f5 = FieldCtx::of_order(5).unwrap();
        let g = MonicPoly::x_minus(&f5, 2);
        let pair = WallDatum {
            parts: vec![
                WallPart { poly: g.clone(), partition: vec![1], signs: BTreeMap::new() },
                WallPart { poly: g.reciprocal_dual().unwrap(), partition: vec![1], signs: BTreeMap::new() },
            ],
        };
        assert_eq!(centralizer_order_from_data(&pair, Ambient::Sp).unwrap(), BigUint::from(4u32));
        let one = MonicPoly::x_minus(&f3, 1);
        assert_eq!(
            centralizer_order_from_data(&datum(one.clone(), vec![1, 1, 1, 1]), Ambient::Sp).unwrap(),
            group_order(GroupKind::Sp, 4, 3).unwrap()
        );
        assert_eq!(
            centralizer_order_from_data(&datum(one.clone(), vec![2]), Ambient::Sp).unwrap(),
            BigUint::from(6u32)
        );
        assert_eq!(
            centralizer_order_from_data(&datum(one.clone(), vec![3]), Ambient::O).unwrap(),
            BigUint::from(6u32)
        );
        assert_eq!(
            centralizer_order_from_data(&datum(one.clone(), vec![1, 1, 1]), Ambient::O).unwrap(),
            BigUint::from(48u32)
        );
        assert!(datum(one.clone(), vec![1, 1]).needs_signs(Ambient::O));
        assert!(matches!(
            centralizer_order_from_data(&datum(one, vec![1]), Ambient::Sp),
            Err(Error::InvalidDatum(_))
        ));
    }
}
