//! Structure of `(ℤ/qℤ)^×` and its discrete-log table.

use std::sync::Arc;

use super::arith::{gcd, lcm, mod_pow, Factorization};
use crate::error::{Error, Result};

/// Largest modulus for which a dense discrete-log table is built.
pub const MAX_MODULUS: u64 = 1 << 22;

pub(crate) const NON_UNIT: u32 = u32::MAX;

/// One prime-power factor `p^e` of the modulus.
#[derive(Clone, Debug)]
pub struct Component {
    pub p: u64,
    pub e: u32,
    pub pe: u64,
    /// Generators as residues mod `p^e`.
    pub local_generators: Vec<u64>,
    /// Same generators lifted by CRT to residues mod `q` (≡ 1 on the other components).
    pub generators: Vec<u64>,
    pub orders: Vec<u64>,
    /// Index of this component's first generator in the flattened basis.
    pub offset: usize,
    /// Residue mod `p^e` ↦ packed local exponent vector (mixed radix over `orders`).
    local_log: Vec<u32>,
}

/// Generators, orders and a dense discrete-log table for `(ℤ/qℤ)^×`.
///
/// The basis is flattened across components: generator `i` has order
/// `orders()[i]` and every unit `a` is `Π generators()[i]^{x_i}` for a unique
/// exponent vector `x`.
#[derive(Debug)]
pub struct UnitGroup {
    q: u64,
    factorization: Factorization,
    components: Vec<Component>,
    generators: Vec<u64>,
    orders: Vec<u64>,
    strides: Vec<u64>,
    exponent: u64,
    phi: u64,
    dlog: Vec<u32>,
}

fn smallest_primitive_root(p: u64, e: u32) -> u64 {
    let pe = p.pow(e);
    let phi = (p - 1) * p.pow(e - 1);
    let phi_primes: Vec<u64> = Factorization::of(phi)
        .map(|f| f.primes().collect())
        .unwrap_or_default();
    (2..pe)
        .find(|&g| gcd(g, p) == 1 && phi_primes.iter().all(|&l| mod_pow(g, phi / l, pe) != 1))
        .expect("odd prime powers have primitive roots")
}

fn crt_lift(local: u64, pe: u64, q: u64) -> u64 {
    // x ≡ local mod pe, x ≡ 1 mod q/pe
    let rest = q / pe;
    if rest == 1 {
        return local % q;
    }
    let inv = super::arith::mod_inv(rest as i64, pe).expect("coprime components");
    // x = 1 + rest * k with 1 + rest*k ≡ local mod pe
    let k = super::arith::mod_mul((local + pe - 1) % pe, inv, pe);
    (1 + rest * k) % q
}

impl UnitGroup {
    pub fn new(q: u64) -> Result<Arc<UnitGroup>> {
        Self::build(q).map(Arc::new)
    }

    fn build(q: u64) -> Result<UnitGroup> {
        if q == 0 {
            return Err(Error::Domain("modulus must be positive".into()));
        }
        if q > MAX_MODULUS {
            return Err(Error::Capacity { modulus: q, cap: MAX_MODULUS });
        }
        let factorization = Factorization::of(q)?;
        let mut components = Vec::new();
        let mut offset = 0;
        for &(p, e) in factorization.factors() {
            let pe = p.pow(e);
            let (local_generators, orders): (Vec<u64>, Vec<u64>) = if p == 2 {
                match e {
                    1 => (vec![], vec![]),
                    2 => (vec![3], vec![2]),
                    _ => (vec![pe - 1, 5], vec![2, pe / 4]),
                }
            } else {
                (vec![smallest_primitive_root(p, e)], vec![(p - 1) * p.pow(e - 1)])
            };
            let local_log = Self::local_log_table(pe, &local_generators, &orders);
            let generators = local_generators.iter().map(|&g| crt_lift(g, pe, q)).collect();
            let n = orders.len();
            components.push(Component {
                p,
                e,
                pe,
                local_generators,
                generators,
                orders,
                offset,
                local_log,
            });
            offset += n;
        }
        let generators: Vec<u64> = components.iter().flat_map(|c| c.generators.clone()).collect();
        let orders: Vec<u64> = components.iter().flat_map(|c| c.orders.clone()).collect();
        let mut strides = Vec::with_capacity(orders.len());
        let mut acc = 1u64;
        for &d in &orders {
            strides.push(acc);
            acc *= d;
        }
        let phi = acc;
        debug_assert_eq!(phi, factorization.phi());
        let exponent = orders.iter().fold(1, |a, &d| lcm(a, d));

        let mut dlog = vec![NON_UNIT; q as usize];
        'outer: for (a, slot) in dlog.iter_mut().enumerate() {
            let mut packed = 0u64;
            for c in &components {
                let local = c.local_log[(a as u64 % c.pe) as usize];
                if local == NON_UNIT {
                    continue 'outer;
                }
                packed += local as u64 * strides.get(c.offset).copied().unwrap_or(1);
            }
            *slot = packed as u32;
        }
        if q == 1 {
            dlog[0] = 0;
        }
        Ok(UnitGroup { q, factorization, components, generators, orders, strides, exponent, phi, dlog })
    }

    fn local_log_table(pe: u64, gens: &[u64], orders: &[u64]) -> Vec<u32> {
        let mut table = vec![NON_UNIT; pe as usize];
        if gens.is_empty() {
            // (ℤ/2ℤ)^× or the trivial ring
            table[(1 % pe) as usize] = 0;
            return table;
        }
        match gens.len() {
            1 => {
                let mut x = 1 % pe;
                for k in 0..orders[0] {
                    table[x as usize] = k as u32;
                    x = x * gens[0] % pe;
                }
            }
            2 => {
                let mut y = 1 % pe;
                for k1 in 0..orders[1] {
                    table[y as usize] = (k1 * orders[0]) as u32;
                    let neg = (pe - y) % pe;
                    table[neg as usize] = (1 + k1 * orders[0]) as u32;
                    y = y * gens[1] % pe;
                }
            }
            _ => unreachable!(),
        }
        table
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Generators as residues mod `q`.
    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn phi(&self) -> u64 {
        self.phi
    }

    /// Exponent of the group (lcm of generator orders); every character value
    /// is an `exponent()`-th root of unity.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Packed discrete log of `a`, or `None` for non-units.
    #[inline]
    pub(crate) fn packed_log(&self, a: u64) -> Option<u32> {
        let v = self.dlog[(a % self.q) as usize];
        (v != NON_UNIT).then_some(v)
    }

    pub fn is_unit(&self, a: i64) -> bool {
        self.packed_log(a.rem_euclid(self.q as i64) as u64).is_some()
    }

    /// Exponent vector of the unit `a` against the generator basis.
    pub fn dlog(&self, a: i64) -> Option<Vec<u64>> {
        let packed = self.packed_log(a.rem_euclid(self.q as i64) as u64)? as u64;
        Some(
            self.orders
                .iter()
                .zip(&self.strides)
                .map(|(&d, &s)| (packed / s) % d)
                .collect(),
        )
    }

    pub(crate) fn unpack(&self, packed: u32) -> impl Iterator<Item = u64> + '_ {
        let packed = packed as u64;
        self.orders.iter().zip(&self.strides).map(move |(&d, &s)| (packed / s) % d)
    }

    /// The units mod `q` in increasing order.
    pub fn units(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.q).filter(move |&a| self.packed_log(a).is_some())
    }

    /// The unit with the given exponent vector.
    pub fn element(&self, exps: &[u64]) -> u64 {
        let q = self.q;
        self.generators
            .iter()
            .zip(exps)
            .fold(1 % q, |acc, (&g, &x)| super::arith::mod_mul(acc, mod_pow(g, x, q), q))
    }
}
