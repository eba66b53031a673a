//! Integer helpers: trial-division factoring, Möbius, Euler phi, multiplicative orders.

use num_integer::Integer;

/// Prime factorization as `(prime, exponent)` pairs in increasing order.
///
/// Trial division by small primes, then Miller-Rabin and Pollard rho on the cofactor.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut primes = Vec::new();
    if n < 2 {
        return Vec::new();
    }
    let mut p = 2u64;
    while p < 1000 && p * p <= n {
        while n.is_multiple_of(p) {
            n /= p;
            primes.push(p);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        split_into(n, &mut primes);
    }
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if miller_rabin(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split_into(d, out);
    split_into(n / d, out);
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn miller_rabin(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

pub fn is_prime(n: u64) -> bool {
    miller_rabin(n)
}

/// If `q = p^a` with `p` prime, returns `(p, a)`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    match factorize(q).as_slice() {
        [(p, a)] => Some((*p, *a)),
        _ => None,
    }
}

/// All positive divisors, sorted.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn gcd_u128(a: u128, b: u128) -> u128 {
    a.gcd(&b)
}

pub fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = m as u128;
    let mut r: u128 = 1;
    let mut b128 = b as u128 % m128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b128 % m128;
        }
        b128 = b128 * b128 % m128;
        e >>= 1;
    }
    r as u64
}

/// Multiplicative order of `a` modulo `n`; `n = 1` gives 1. Requires `gcd(a, n) = 1`.
pub fn mult_order(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(1);
    }
    if gcd(a % n, n) != 1 {
        return None;
    }
    let lambda = euler_phi(n);
    let mut ord = lambda;
    for (p, _) in factorize(lambda) {
        while ord.is_multiple_of(p) && pow_mod(a, ord / p, n) == 1 {
            ord /= p;
        }
    }
    Some(ord)
}

/// `-1` lies in the cyclic subgroup generated by `q` modulo `n`.
pub fn minus_one_in_powers(q: u64, n: u64) -> bool {
    if n <= 2 {
        return true;
    }
    match mult_order(q, n) {
        Some(o) if o % 2 == 0 => pow_mod(q, o / 2, n) == n - 1,
        _ => false,
    }
}

/// 2-adic valuation; `nu2(0)` is undefined and returns 0.
pub fn nu2(n: u64) -> u32 {
    if n == 0 {
        0
    } else {
        n.trailing_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_and_divisors() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(factorize(1), vec![]);
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(12), None);
    }

    #[test]
    fn mobius_phi() {
        let mu: Vec<i64> = (1..=10).map(mobius).collect();
        assert_eq!(mu, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(36), 12);
    }

    #[test]
    fn orders() {
        assert_eq!(mult_order(2, 5), Some(4));
        assert_eq!(mult_order(4, 5), Some(2));
        assert_eq!(mult_order(3, 8), Some(2));
        assert_eq!(mult_order(2, 4), None);
        assert!(minus_one_in_powers(2, 5));
        assert!(!minus_one_in_powers(3, 8));
        assert!(minus_one_in_powers(5, 13));
    }

    #[test]
    fn large_factorizations() {
        let n = 3u64.pow(40) - 1;
        let f = factorize(n);
        assert_eq!(f.iter().fold(1u64, |acc, &(p, e)| acc * p.pow(e)), n);
        assert!(f.iter().all(|&(p, _)| is_prime(p)));
        assert!(is_prime(1_000_000_007));
        assert_eq!(factorize(1_000_000_007u64 * 998_244_353), vec![(998_244_353, 1), (1_000_000_007, 1)]);
    }

    #[test]
    fn phi_sums_to_n() {
        for n in 1..200u64 {
            let s: u64 = divisors(n).into_iter().map(euler_phi).sum();
            assert_eq!(s, n);
        }
    }
}
