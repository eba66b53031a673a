//! Behaviour of irreducible polynomials under `f(x) -> f(x^M)`.
//!
//! An irreducible `f` of degree `n` is an M-power when `f(x^M)` has an irreducible
//! factor of degree `n`; an SRIM `f` is an M*-power when such a factor can be taken
//! self-reciprocal. The spectrum of `f` is the multiset of factor degrees of `f(x^M)`.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use crate::arith;
use crate::error::{Error, Result};
use crate::polyring::{dense, power_map_charpoly, Factorization, Frobenius, MonicPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FactorInfo {
    pub degree: usize,
    pub self_reciprocal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerProfile {
    pub f: MonicPoly,
    pub m: u64,
    /// Factor degrees of `f(x^M)` with multiplicity, ascending.
    pub spectrum: Vec<usize>,
    /// Distinct degrees of the SRIM factors of `f(x^M)`, ascending.
    pub star_spectrum: Vec<usize>,
    pub factors: Vec<FactorInfo>,
    pub is_m_power: bool,
    pub is_mstar_power: bool,
}

fn check_coprime(f: &MonicPoly, m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::ParamDomain("M must be at least 1".into()));
    }
    let g = arith::gcd(m, f.q());
    if g != 1 {
        return Err(Error::PCharConflict(g));
    }
    Ok(())
}

fn check_irreducible(f: &MonicPoly) -> Result<()> {
    if f.is_x() {
        return Err(Error::XInput);
    }
    if f.degree() == 0 || !f.is_irreducible()? {
        return Err(Error::NotIrreducible);
    }
    Ok(())
}

pub fn power_profile(f: &MonicPoly, m: u64) -> Result<PowerProfile> {
    check_coprime(f, m)?;
    check_irreducible(f)?;
    let composed = f.compose_power(m as usize);
    let fac = composed.factorize()?;
    let factors: Vec<FactorInfo> = fac
        .factors
        .iter()
        .map(|(g, _)| FactorInfo {
            degree: g.degree(),
            self_reciprocal: g.degree() >= 2 && g.is_self_reciprocal(),
        })
        .collect();
    let spectrum = fac.degrees();
    let star_spectrum: Vec<usize> = factors
        .iter()
        .filter(|fi| fi.self_reciprocal)
        .map(|fi| fi.degree)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = f.degree();
    let is_m_power = spectrum.contains(&n);
    let is_mstar_power = f.is_srim() && star_spectrum.contains(&n);
    Ok(PowerProfile {
        f: f.clone(),
        m,
        spectrum,
        star_spectrum,
        factors,
        is_m_power,
        is_mstar_power,
    })
}

/// `x^{q^d} mod modulus` for `d = 1..=max_d`, index `d - 1`.
fn frobenius_orbit(f: &MonicPoly, modulus: &[u32], max_d: usize) -> Vec<Vec<u32>> {
    let ctx = f.ctx();
    let frob = Frobenius::new(ctx, modulus);
    let mut h = dense::rem(ctx, &dense::x_poly(), modulus);
    (0..max_d)
        .map(|_| {
            h = frob.apply(&h);
            h.clone()
        })
        .collect()
}

/// Product of the factors of `f(x^M)` whose degree divides `d`, via `gcd(f(x^M), x^{q^d} - x)`.
fn divisor_degree_part(f: &MonicPoly, m: u64, d: usize) -> Vec<u32> {
    let ctx = f.ctx();
    let big = dense::compose_power(f.coeffs(), m as usize);
    let orbit = frobenius_orbit(f, &big, d);
    let diff = dense::sub(ctx, &orbit[d - 1], &dense::x_poly());
    dense::gcd(ctx, &big, &diff)
}

/// Irreducible `f ≠ x` is an M-power: `gcd(f(x^M), x^{q^n} - x) ≠ 1` with `n = deg f`.
pub fn is_m_power(f: &MonicPoly, m: u64) -> Result<bool> {
    check_coprime(f, m)?;
    check_irreducible(f)?;
    Ok(divisor_degree_part(f, m, f.degree()).len() > 1)
}

/// SRIM `f` of degree `2k` is an M*-power: some degree-`2k` factor of `f(x^M)` divides `x^{q^k+1} - 1`.
pub fn is_mstar_power(f: &MonicPoly, m: u64) -> Result<bool> {
    check_coprime(f, m)?;
    if !f.is_srim() {
        return Ok(false);
    }
    let ctx = f.ctx();
    let k = f.degree() / 2;
    let part = divisor_degree_part(f, m, 2 * k);
    if part.len() <= 1 {
        return Ok(false);
    }
    let orbit = frobenius_orbit(f, &part, k);
    let xqk1 = dense::mulmod(ctx, &orbit[k - 1], &dense::x_poly(), &part);
    let g = dense::gcd(ctx, &part, &dense::sub(ctx, &xqk1, &[1]));
    Ok(g.len() > 1)
}

/// Non-M-power `f` such that `f(x^M)` has an irreducible factor of degree exactly `n`.
pub fn is_degenerate(f: &MonicPoly, m: u64, n: u64) -> Result<bool> {
    check_coprime(f, m)?;
    check_irreducible(f)?;
    if n == 0 || !n.is_multiple_of(f.degree() as u64) {
        return Err(Error::DegreeMismatch {
            deg: f.degree(),
            n,
        });
    }
    if is_m_power(f, m)? {
        return Ok(false);
    }
    let degrees = f.compose_power(m as usize).factor_degrees()?;
    Ok(degrees.contains(&(n as usize)))
}

/// Minimal generators of the additive monoid of multiplicities `m` for which the class
/// with primary part `(f, 1^m)` is an M-th power.
///
/// For an SRIM `f` of degree `2d`, an SRIM factor of degree `i` contributes `i / 2d` and
/// a non-self-reciprocal factor of degree `j` contributes `j / d` (it occurs paired with
/// its dual). For non-self-reciprocal `f` of degree `d` each factor contributes `j / d`.
pub fn multiplicity_semigroup(f: &MonicPoly, m: u64) -> Result<Vec<u64>> {
    let prof = power_profile(f, m)?;
    let srim = f.is_srim();
    if (srim && prof.is_mstar_power) || (!srim && prof.is_m_power) {
        return Err(Error::AlreadyMPower);
    }
    let half = if srim { f.degree() / 2 } else { f.degree() } as u64;
    let half_dims: Vec<u64> = prof
        .factors
        .iter()
        .map(|fi| {
            if fi.self_reciprocal {
                fi.degree as u64 / 2
            } else {
                fi.degree as u64
            }
        })
        .collect();
    let gens: Vec<u64> = half_dims.iter().map(|h| h / half).collect();
    Ok(minimal_generators(&gens))
}

/// Removes generators expressible through smaller ones.
pub fn minimal_generators(gens: &[u64]) -> Vec<u64> {
    let sorted: BTreeSet<u64> = gens.iter().copied().filter(|&g| g > 0).collect();
    let mut out: Vec<u64> = Vec::new();
    for g in sorted {
        if !monoid_contains(&out, g) {
            out.push(g);
        }
    }
    out
}

/// Membership of `k` in the additive monoid generated by `gens` (0 always belongs).
pub fn monoid_contains(gens: &[u64], k: u64) -> bool {
    if k == 0 {
        return true;
    }
    let gens: Vec<usize> = gens.iter().map(|&g| g as usize).filter(|&g| g > 0).collect();
    if gens.is_empty() {
        return false;
    }
    let k = k as usize;
    let mut reach = vec![false; k + 1];
    reach[0] = true;
    for v in 1..=k {
        reach[v] = gens.iter().any(|&g| g <= v && reach[v - g]);
    }
    reach[k]
}

/// One kind of root of `f(x^M)`, for an irreducible `f` of degree `n` and exponent `e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RootStratum {
    /// Multiplicative order of the roots.
    pub order: u64,
    pub degree: u64,
    pub self_reciprocal: bool,
    /// Number of irreducible factors of `f(x^M)` with these roots.
    pub count: u64,
}

/// Factor structure of `f(x^M)` determined from `(q, n, e)` alone.
///
/// The M-th roots of a root of order `e` have orders `t | Me` with `t / gcd(t, M) = e`;
/// those of order `t` generate `F_{q^{ord_t(q)}}`.
pub fn spectrum_from_exponent(q: u64, m: u64, n: u64, e: u64) -> Result<Vec<RootStratum>> {
    if arith::gcd(e, q) != 1 || arith::mult_order(q, e) != Some(n) {
        return Err(Error::NoRepresentative { n, e });
    }
    let phi_e = arith::euler_phi(e);
    let mut out = Vec::new();
    for t in arith::divisors(m * e) {
        if t / arith::gcd(t, m) != e {
            continue;
        }
        let degree = arith::mult_order(q, t).expect("t is coprime to q");
        let roots = n * arith::euler_phi(t) / phi_e;
        out.push(RootStratum {
            order: t,
            degree,
            self_reciprocal: t > 2 && arith::minus_one_in_powers(q, t),
            count: roots / degree,
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IndicatorKey {
    pub q: u64,
    pub m: u64,
    pub n: u64,
    pub e: u64,
}

/// Memoized indicator values keyed by `(q, M, degree, exponent)`.
#[derive(Default)]
pub struct IndicatorCache {
    gens: RwLock<HashMap<IndicatorKey, Arc<Vec<u64>>>>,
}

impl IndicatorCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Generators, in half-dimension units, of the monoid behind the indicator.
    pub fn generators(&self, key: IndicatorKey) -> Result<Arc<Vec<u64>>> {
        if let Some(g) = self.gens.read().expect("cache lock").get(&key) {
            return Ok(Arc::clone(g));
        }
        let strata = spectrum_from_exponent(key.q, key.m, key.n, key.e)?;
        let raw: Vec<u64> = strata
            .iter()
            .map(|s| {
                if s.self_reciprocal {
                    s.degree / 2
                } else {
                    s.degree
                }
            })
            .collect();
        let gens = Arc::new(minimal_generators(&raw));
        let mut w = self.gens.write().expect("cache lock");
        Ok(Arc::clone(w.entry(key).or_insert(gens)))
    }

    pub fn indicator(&self, key: IndicatorKey, k: u64) -> Result<bool> {
        Ok(monoid_contains(&self.generators(key)?, k))
    }
}

fn global_cache() -> &'static IndicatorCache {
    static CACHE: OnceLock<IndicatorCache> = OnceLock::new();
    CACHE.get_or_init(IndicatorCache::new)
}

/// Whether `u^k` occurs in the indicator series of any irreducible of degree `n`, exponent `e`.
pub fn indicator(key: IndicatorKey, k: u64) -> Result<bool> {
    global_cache().indicator(key, k)
}

/// Characteristic polynomial of `C_f^M`, i.e. `∏ (x - λ^M)` over the roots `λ` of `f`, factored.
pub fn companion_power_charpoly(f: &MonicPoly, m: u64) -> Result<Factorization> {
    if f.constant_term() == 0 {
        return Err(Error::ZeroConstantTerm);
    }
    if f.degree() == 0 {
        return Err(Error::ConstantInput);
    }
    power_map_charpoly(f, m).factorize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfq::FieldCtx;

    fn poly(q: u64, c: &[i64]) -> MonicPoly {
        MonicPoly::from_ints(&FieldCtx::of_order(q).unwrap(), c).unwrap()
    }

    #[test]
    fn two_star_power_quartic() {
        let f = poly(5, &[1, 3, 0, 3, 1]);
        let prof = power_profile(&f, 2).unwrap();
        assert!(prof.is_mstar_power);
        assert!(prof.is_m_power);
        assert_eq!(prof.star_spectrum, vec![4]);
        assert!(is_mstar_power(&f, 2).unwrap());
    }

    #[test]
    fn two_power_but_not_two_star() {
        let f = poly(5, &[1, 3, 1, 3, 1]);
        let prof = power_profile(&f, 2).unwrap();
        assert!(prof.is_m_power);
        assert!(!prof.is_mstar_power);
        assert!(is_m_power(&f, 2).unwrap());
        assert!(!is_mstar_power(&f, 2).unwrap());
        assert_eq!(multiplicity_semigroup(&f, 2).unwrap(), vec![2]);
    }

    #[test]
    fn m_one_is_trivial() {
        let f = poly(3, &[2, 1, 1]);
        let prof = power_profile(&f, 1).unwrap();
        assert_eq!(prof.spectrum, vec![2]);
        assert!(prof.is_m_power);
    }

    #[test]
    fn spectrum_12_60_60() {
        let f = poly(3, &[1, 0, 0, 0, 0, 2, 1, 2, 0, 0, 0, 0, 1]);
        let prof = power_profile(&f, 11).unwrap();
        assert_eq!(prof.spectrum, vec![12, 60, 60]);
        assert!(prof.is_m_power);
        assert!(!is_degenerate(&f, 11, 60).unwrap());
        assert_eq!(multiplicity_semigroup(&f, 11), Err(Error::AlreadyMPower));
    }

    #[test]
    fn quintic_cyclotomic_is_a_73_power() {
        // gcd(73, 3^4 - 1) = 1, so every element of F_81 is a 73rd power.
        let f = poly(3, &[1, 1, 1, 1, 1]);
        assert!(is_m_power(&f, 73).unwrap());
        assert!(is_mstar_power(&f, 73).unwrap());
        assert!(!is_degenerate(&f, 73, 12).unwrap());
        assert_eq!(multiplicity_semigroup(&f, 73), Err(Error::AlreadyMPower));
    }

    #[test]
    fn degenerate_example() {
        // x^2 + 1 over F_3 has roots of order 4; square roots have order 8 and degree 2,
        // so with M = 4 the fourth roots have order 16 and degree 4.
        let f = poly(3, &[1, 0, 1]);
        assert!(!is_m_power(&f, 4).unwrap());
        assert!(is_degenerate(&f, 4, 4).unwrap());
        assert!(!is_degenerate(&f, 4, 2).unwrap());
        assert_eq!(
            is_degenerate(&f, 4, 3),
            Err(Error::DegreeMismatch { deg: 2, n: 3 })
        );
    }

    #[test]
    fn errors() {
        let f = poly(5, &[1, 3, 0, 3, 1]);
        assert_eq!(power_profile(&f, 5), Err(Error::PCharConflict(5)));
        assert_eq!(power_profile(&poly(5, &[-1, 0, 1]), 2), Err(Error::NotIrreducible));
        assert_eq!(
            spectrum_from_exponent(3, 2, 3, 5),
            Err(Error::NoRepresentative { n: 3, e: 5 })
        );
    }

    #[test]
    fn companion_powers() {
        let f = poly(3, &[1, 2, 2, 2, 1, 0, 1, 0, 1, 2, 2, 2, 1]);
        let fac = companion_power_charpoly(&f, 73).unwrap();
        assert_eq!(fac.to_string(), "(x^4 + x^3 + x^2 + x + 1)^3");
        let g = poly(2, &[1, 1, 1]);
        assert_eq!(companion_power_charpoly(&g, 3).unwrap().to_string(), "(x + 1)^2");
        assert_eq!(
            companion_power_charpoly(&g, 1).unwrap().product(),
            g
        );
    }

    #[test]
    fn indicator_basics() {
        let key = IndicatorKey { q: 3, m: 73, n: 4, e: 5 };
        assert!(indicator(key, 0).unwrap());
        assert!(indicator(key, 6).unwrap());
        // x^2 + 1 over F_3, M = 2: square roots form a dual pair of quadratics.
        let key = IndicatorKey { q: 3, m: 2, n: 2, e: 4 };
        assert_eq!(*global_cache().generators(key).unwrap(), vec![2]);
        assert!(!indicator(key, 1).unwrap());
        assert!(indicator(key, 2).unwrap());
    }

    #[test]
    fn monoid() {
        assert_eq!(minimal_generators(&[6, 4, 10, 4]), vec![4, 6]);
        assert!(monoid_contains(&[4, 6], 10));
        assert!(!monoid_contains(&[4, 6], 7));
        assert!(!monoid_contains(&[], 1));
        assert!(monoid_contains(&[], 0));
    }
}
