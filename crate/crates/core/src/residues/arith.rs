//! Integer helpers: gcd, factorization, multiplicative functions.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// gcd on signed input; `gcd_i(0, n) = |n|`.
pub fn gcd_i(a: i64, b: i64) -> u64 {
    gcd(a.unsigned_abs(), b.unsigned_abs())
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Reduce a signed integer into `0..m`.
#[inline]
pub fn reduce(a: i64, m: u64) -> u64 {
    a.rem_euclid(m as i64) as u64
}

pub fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists. `mod_inv(x, 1) = Some(0)`.
pub fn mod_inv(a: i64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (reduce(a, m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// The residue mod `m1·m2` that is `a` mod `m1` and `b` mod `m2`; the moduli must be coprime.
pub fn crt_pair(a: u64, m1: u64, b: u64, m2: u64) -> u64 {
    let m = m1 * m2;
    let inv = mod_inv(m1 as i64, m2).expect("coprime moduli");
    // a + m1 * ((b - a) / m1 mod m2)
    let diff = reduce(b as i64 - (a % m1) as i64, m2);
    (a % m1 + m1 * mod_mul(diff, inv, m2)) % m
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(p >= 2);
    if n == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes in the closed interval `[lo, hi]`.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi).filter(|&n| is_prime(n)).collect()
}

/// A positive integer together with its prime factorization.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn of(n: u64) -> Result<Self> {
        if n == 0 {
            return domain("cannot factor 0");
        }
        let mut factors = Vec::new();
        let mut m = n;
        let mut d = 2u64;
        while d * d <= m {
            if m % d == 0 {
                let mut e = 0;
                while m % d == 0 {
                    m /= d;
                    e += 1;
                }
                factors.push((d, e));
            }
            d += if d == 2 { 1 } else { 2 };
        }
        if m > 1 {
            factors.push((m, 1));
        }
        Ok(Factorization { n, factors })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(p, e)` pairs with strictly increasing primes.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_prime_power(&self) -> Option<(u64, u32)> {
        match self.factors.as_slice() {
            [(p, e)] => Some((*p, *e)),
            _ => None,
        }
    }

    pub fn is_cube_free(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e < 3)
    }

    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    /// Number of divisors d(n).
    pub fn divisor_count(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    pub fn mobius(&self) -> i64 {
        if self.factors.iter().any(|&(_, e)| e > 1) {
            0
        } else if self.factors.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }

    /// Radical of n: product of the distinct primes.
    pub fn radical(&self) -> u64 {
        self.primes().product()
    }
}

pub fn euler_phi(n: u64) -> u64 {
    Factorization::of(n).map(|f| f.phi()).unwrap_or(0)
}

pub fn mobius(n: u64) -> i64 {
    Factorization::of(n).map(|f| f.mobius()).unwrap_or(0)
}

/// Möbius function for `0..=n` by a linear sieve (`mu[0]` is 0).
pub fn mobius_table(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    if n == 0 {
        mu[0] = 0;
        return mu;
    }
    mu[0] = 0;
    let mut is_composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !is_composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip > n {
                break;
            }
            is_composite[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    mu
}

/// All `m ≤ cap` whose prime factors divide `q` (the q^∞-divisors), sorted.
pub fn q_infinity_divisors(q: u64, cap: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    if cap == 0 {
        return Vec::new();
    }
    let Ok(f) = Factorization::of(q) else {
        return out;
    };
    for p in f.primes() {
        let len = out.len();
        for i in 0..len {
            let mut m = out[i];
            while let Some(next) = m.checked_mul(p).filter(|&x| x <= cap) {
                m = next;
                out.push(m);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Split `n ≥ 1` as `n0 · n'` with `n0 | q^∞` and `gcd(n', q) = 1`.
pub fn split_q_part(n: u64, q: u64) -> (u64, u64) {
    let mut n0 = 1;
    let mut rest = n;
    loop {
        let g = gcd(rest, q);
        if g == 1 {
            break;
        }
        rest /= g;
        n0 *= g;
    }
    (n0, rest)
}

/// Whether every prime factor of `m ≠ 0` divides `q`.
pub fn divides_q_infinity(m: u64, q: u64) -> bool {
    m != 0 && split_q_part(m, q).1 == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_invariants() {
        for n in 1..2000u64 {
            let f = Factorization::of(n).unwrap();
            let prod: u64 = f.factors().iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, n);
            assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.factors().iter().all(|&(p, e)| e >= 1 && is_prime(p)));
        }
        assert!(Factorization::of(0).is_err());
    }

    #[test]
    fn phi_and_mobius_match_definitions() {
        for n in 1..300u64 {
            let phi = (1..=n).filter(|&a| gcd(a, n) == 1).count() as u64;
            assert_eq!(euler_phi(n), phi, "phi({n})");
        }
        let mu = mobius_table(500);
        for n in 1..=500u64 {
            assert_eq!(mu[n as usize] as i64, mobius(n), "mu({n})");
        }
    }

    #[test]
    fn inverses() {
        assert_eq!(mod_inv(3, 7), Some(5));
        assert_eq!(mod_inv(-1, 7), Some(6));
        assert_eq!(mod_inv(6, 9), None);
        for m in 2..60u64 {
            for a in 0..m as i64 {
                match mod_inv(a, m) {
                    Some(b) => assert_eq!((a as u64 * b) % m, 1),
                    None => assert!(gcd(a as u64, m) > 1),
                }
            }
        }
    }

    #[test]
    fn q_infinity() {
        assert_eq!(q_infinity_divisors(15, 30), vec![1, 3, 5, 9, 15, 25, 27]);
        assert_eq!(q_infinity_divisors(1, 100), vec![1]);
        assert_eq!(split_q_part(360, 6), (72, 5));
        assert!(divides_q_infinity(75, 15));
        assert!(!divides_q_infinity(14, 15));
    }

    #[test]
    fn cube_free() {
        assert!(Factorization::of(4).unwrap().is_cube_free());
        assert!(!Factorization::of(27).unwrap().is_cube_free());
        assert!(!Factorization::of(8).unwrap().is_cube_free());
        assert!(Factorization::of(900).unwrap().is_cube_free());
    }
}
