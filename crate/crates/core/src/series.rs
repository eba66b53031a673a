//! Truncated power series in `u` with exact rational coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 12;

/// Coefficients of `u^0..=u^order`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalSeries {
    coeffs: Vec<BigRational>,
}

/// One coefficient in the JSON rendering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
}

impl RationalSeries {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![BigRational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(BigRational::one(), order)
    }

    pub fn constant(c: BigRational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `c·u^d`, zero if `d` exceeds the order.
    pub fn monomial(c: BigRational, d: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if d <= order {
            s.coeffs[d] = c;
        }
        s
    }

    /// Pads with zeros or truncates to the given order.
    pub fn from_coeffs(mut coeffs: Vec<BigRational>, order: usize) -> Self {
        coeffs.resize(order + 1, BigRational::zero());
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64], order: usize) -> Self {
        Self::from_coeffs(
            coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect(),
            order,
        )
    }

    /// `1 + c·u^d`.
    pub fn binomial(c: BigRational, d: usize, order: usize) -> Self {
        let mut s = Self::monomial(c, d, order);
        s.coeffs[0] += BigRational::one();
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::from_coeffs(self.coeffs[..=order.min(self.order())].to_vec(), order.min(self.order()))
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Self {
            coeffs: (0..=n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Self {
            coeffs: (0..=n).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut out = vec![BigRational::zero(); n + 1];
        for (i, a) in self.coeffs[..=n].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self { coeffs: out }
    }

    pub fn inv(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::NonUnitConstant);
        }
        let c0_inv = c0.recip();
        let n = self.order();
        let mut out: Vec<BigRational> = Vec::with_capacity(n + 1);
        out.push(c0_inv.clone());
        for k in 1..=n {
            let mut acc = BigRational::zero();
            for i in 1..=k {
                if !self.coeffs[i].is_zero() {
                    acc += &self.coeffs[i] * &out[k - i];
                }
            }
            out.push(-acc * &c0_inv);
        }
        Ok(Self { coeffs: out })
    }

    /// Non-negative power by binary exponentiation.
    pub fn ipow(&self, mut e: u64) -> Self {
        let mut result = Self::one(self.order());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Signed integer power; negative exponents need a unit constant term.
    pub fn pow_signed(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.ipow(e as u64))
        } else {
            Ok(self.inv()?.ipow(e.unsigned_abs()))
        }
    }

    /// `u -> u^s`.
    pub fn substitute_upow(&self, s: usize) -> Self {
        self.substitute_upow_into(s, self.order())
    }

    /// `(even, odd)` with `self(u) = even(u^2) + u·odd(u^2)`, both to the order of `self`.
    pub fn parity_split(&self) -> (Self, Self) {
        let n = self.order();
        let pick = |start: usize| {
            let c: Vec<BigRational> = self.coeffs.iter().skip(start).step_by(2).cloned().collect();
            Self::from_coeffs(c, n)
        };
        (pick(0), pick(1))
    }

    /// `u -> u^s`, truncated or padded to `order`.
    pub fn substitute_upow_into(&self, s: usize, order: usize) -> Self {
        assert!(s >= 1, "substitution exponent must be positive");
        let mut out = Self::zero(order);
        for (i, c) in self.coeffs.iter().enumerate() {
            if i * s > order {
                break;
            }
            out.coeffs[i * s] = c.clone();
        }
        out
    }

    /// Inverse of `parity_split`: `even(u^2) + u·odd(u^2)` to the given order.
    pub fn reassemble(even: &Self, odd: &Self, order: usize) -> Self {
        let shifted = Self::monomial(BigRational::one(), 1, order);
        even.substitute_upow_into(2, order)
            .add(&shifted.mul(&odd.substitute_upow_into(2, order)))
    }

    /// `∏ term^exponent`, each term with constant coefficient 1.
    pub fn product_over(terms: &[(RationalSeries, i64)], order: usize) -> Result<Self> {
        let mut acc = Self::one(order);
        for (t, e) in terms {
            if !t.coeffs[0].is_one() {
                return Err(Error::NonUnitConstant);
            }
            acc = acc.mul(&t.pow_signed(*e)?);
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> Vec<RationalJson> {
        self.coeffs
            .iter()
            .map(|c| RationalJson {
                num: c.numer().to_string(),
                den: c.denom().to_string(),
            })
            .collect()
    }

    pub fn from_json(items: &[RationalJson]) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Parse("empty series".into()));
        }
        let parse = |s: &str| {
            s.parse::<BigInt>()
                .map_err(|e| Error::Parse(format!("bad integer {s:?}: {e}")))
        };
        let mut coeffs = Vec::with_capacity(items.len());
        for it in items {
            let den = parse(&it.den)?;
            if den.is_zero() {
                return Err(Error::DivByZero);
            }
            coeffs.push(BigRational::new(parse(&it.num)?, den));
        }
        let n = coeffs.len() - 1;
        Ok(Self::from_coeffs(coeffs, n))
    }

    /// Human-readable form such as `1 + 3/8 u - u^2 + O(u^13)`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            let var = match i {
                0 => String::new(),
                1 => "u".to_string(),
                _ => format!("u^{i}"),
            };
            if i == 0 || !a.is_one() {
                out.push_str(&a.to_string());
                if i > 0 {
                    out.push(' ');
                }
            }
            out.push_str(&var);
        }
        if out.is_empty() {
            out.push('0');
        }
        out.push_str(&format!(" + O(u^{})", self.order() + 1));
        out
    }
}

impl fmt::Display for RationalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn geometric_inverse() {
        let s = RationalSeries::from_ints(&[1, -1], 5).inv().unwrap();
        assert_eq!(s, RationalSeries::from_ints(&[1, 1, 1, 1, 1, 1], 5));
        assert_eq!(RationalSeries::zero(3).inv(), Err(Error::NonUnitConstant));
    }

    #[test]
    fn powers() {
        let a = RationalSeries::from_ints(&[1, 1], 4);
        assert_eq!(a.ipow(2), RationalSeries::from_ints(&[1, 2, 1], 4));
        assert_eq!(a.truncate(3).ipow(5), RationalSeries::from_ints(&[1, 5, 10, 10], 3));
        assert_eq!(a.ipow(0), RationalSeries::one(4));
    }

    #[test]
    fn substitution_and_split() {
        let a = RationalSeries::from_ints(&[1, 1], 6);
        assert_eq!(a.substitute_upow(2), RationalSeries::from_ints(&[1, 0, 1], 6));
        let g = RationalSeries::from_ints(&[1, -1], 6).inv().unwrap().substitute_upow(2);
        assert_eq!(g, RationalSeries::from_ints(&[1, 0, 1, 0, 1, 0, 1], 6));
        let (e, o) = RationalSeries::from_ints(&[1, 1, 1], 4).parity_split();
        assert_eq!(e, RationalSeries::from_ints(&[1, 1], 4));
        assert_eq!(o, RationalSeries::from_ints(&[1], 4));
        let a = RationalSeries::from_ints(&[3, 1, 4, 1, 5], 4);
        let (e, o) = a.parity_split();
        assert_eq!(RationalSeries::reassemble(&e, &o, 4), a);
        let (e, o) = RationalSeries::from_ints(&[0, 1], 4).parity_split();
        assert!(e.coeffs().iter().all(Zero::is_zero));
        assert_eq!(o, RationalSeries::one(4));
    }

    #[test]
    fn partition_like_product() {
        let t1 = RationalSeries::from_ints(&[1, -1], 4);
        let t2 = RationalSeries::from_ints(&[1, 0, -1], 4);
        let p = RationalSeries::product_over(&[(t1, -1), (t2, -1)], 4).unwrap();
        assert_eq!(p, RationalSeries::from_ints(&[1, 1, 2, 2, 3], 4));
        assert_eq!(RationalSeries::product_over(&[], 4).unwrap(), RationalSeries::one(4));
    }

    #[test]
    fn render_and_json() {
        let s = RationalSeries::from_coeffs(vec![r(1, 1), r(3, 8), r(-1, 1)], 2);
        assert_eq!(s.render(), "1 + 3/8 u - u^2 + O(u^3)");
        let back = RationalSeries::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert_eq!(
            serde_json::to_string(&s.to_json()[1]).unwrap(),
            r#"{"num":"3","den":"8"}"#
        );
    }

    #[test]
    fn order_is_min_of_operands() {
        let a = RationalSeries::one(3);
        let b = RationalSeries::one(5);
        assert_eq!(a.mul(&b).order(), 3);
        assert_eq!(a.add(&b).order(), 3);
    }
}
