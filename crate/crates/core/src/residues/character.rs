//! Dirichlet characters as exponent vectors against a [`UnitGroup`] basis.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_complex::Complex64;

use super::arith::{gcd, lcm, valuation};
use super::cyclo::Angle;
use super::group::UnitGroup;
use crate::error::{domain, Result};

/// Sentinel in an [`AngleTable`] for residues where the character vanishes.
pub const ZERO_VALUE: u32 = u32::MAX;

/// A Dirichlet character mod `q`: `χ(g_i) = e(x_i / d_i)` on the basis generators.
#[derive(Clone)]
pub struct DirichletCharacter {
    group: Arc<UnitGroup>,
    exps: Vec<u64>,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.exps == other.exps
    }
}

impl Eq for DirichletCharacter {}

impl Hash for DirichletCharacter {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.modulus().hash(state);
        self.exps.hash(state);
    }
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "χ[{} ; {:?}]", self.modulus(), self.exps)
    }
}

/// Character values tabulated as numerators over a fixed root order `n`.
#[derive(Clone, Debug)]
pub struct AngleTable {
    n: u64,
    values: Vec<u32>,
}

impl AngleTable {
    pub fn order(&self) -> u64 {
        self.n
    }

    /// Numerator `k` with `χ(a) = e(k/n)`, or [`ZERO_VALUE`].
    #[inline]
    pub fn at(&self, a: usize) -> u32 {
        self.values[a]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.values
    }
}

impl DirichletCharacter {
    pub fn new(group: Arc<UnitGroup>, exps: Vec<u64>) -> Result<Self> {
        if exps.len() != group.rank() {
            return domain(format!(
                "exponent vector of length {} for a group of rank {}",
                exps.len(),
                group.rank()
            ));
        }
        let exps = exps.iter().zip(group.orders()).map(|(&x, &d)| x % d).collect();
        Ok(DirichletCharacter { group, exps })
    }

    pub fn principal(group: Arc<UnitGroup>) -> Self {
        let exps = vec![0; group.rank()];
        DirichletCharacter { group, exps }
    }

    /// All `φ(q)` characters mod `q`, in lexicographic order of exponent vectors.
    pub fn all(group: &Arc<UnitGroup>) -> Vec<Self> {
        let orders = group.orders().to_vec();
        let mut out = Vec::with_capacity(group.phi() as usize);
        let mut exps = vec![0u64; orders.len()];
        loop {
            out.push(DirichletCharacter { group: group.clone(), exps: exps.clone() });
            // odometer, last position fastest
            let mut i = orders.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                exps[i] += 1;
                if exps[i] < orders[i] {
                    break;
                }
                exps[i] = 0;
            }
        }
    }

    /// The primitive characters mod `q`.
    pub fn primitive(group: &Arc<UnitGroup>) -> Vec<Self> {
        Self::all(group).into_iter().filter(|c| c.is_primitive()).collect()
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus()
    }

    pub fn group(&self) -> &Arc<UnitGroup> {
        &self.group
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    pub fn is_principal(&self) -> bool {
        self.exps.iter().all(|&x| x == 0)
    }

    /// Order of χ in the character group.
    pub fn order(&self) -> u64 {
        self.exps
            .iter()
            .zip(self.group.orders())
            .fold(1, |acc, (&x, &d)| lcm(acc, d / gcd(x, d)))
    }

    #[inline]
    fn index_of_packed(&self, packed: u32) -> u64 {
        let lambda = self.group.exponent();
        self.group
            .unpack(packed)
            .zip(&self.exps)
            .zip(self.group.orders())
            .fold(0u64, |acc, ((x, &e), &d)| (acc + (x * e % d) * (lambda / d)) % lambda)
    }

    /// `χ(a)` as an exact rational angle; `None` when `gcd(a, q) > 1`.
    pub fn angle(&self, a: i64) -> Option<Angle> {
        let q = self.modulus();
        let packed = self.group.packed_log(a.rem_euclid(q as i64) as u64)?;
        Some(Angle::new(self.index_of_packed(packed) as i64, self.group.exponent()))
    }

    pub fn eval(&self, a: i64) -> Complex64 {
        self.angle(a).map_or(Complex64::new(0.0, 0.0), Angle::to_complex)
    }

    /// Values of χ on `0..q` as numerators over `n`; `n` must be a multiple of
    /// the group exponent.
    pub fn table(&self, n: u64) -> AngleTable {
        let lambda = self.group.exponent();
        assert!(n % lambda == 0, "root order {n} not a multiple of the group exponent {lambda}");
        let scale = n / lambda;
        let values = (0..self.modulus())
            .map(|a| match self.group.packed_log(a) {
                Some(packed) => (self.index_of_packed(packed) * scale) as u32,
                None => ZERO_VALUE,
            })
            .collect();
        AngleTable { n, values }
    }

    pub fn conj(&self) -> Self {
        let exps = self
            .exps
            .iter()
            .zip(self.group.orders())
            .map(|(&x, &d)| (d - x) % d)
            .collect();
        DirichletCharacter { group: self.group.clone(), exps }
    }

    pub fn pow(&self, k: i64) -> Self {
        let exps = self
            .exps
            .iter()
            .zip(self.group.orders())
            .map(|(&x, &d)| ((x as i128 * k as i128).rem_euclid(d as i128)) as u64)
            .collect();
        DirichletCharacter { group: self.group.clone(), exps }
    }

    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.modulus() != other.modulus() {
            return domain(format!(
                "product of characters mod {} and mod {}",
                self.modulus(),
                other.modulus()
            ));
        }
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .zip(self.group.orders())
            .map(|((&x, &y), &d)| (x + y) % d)
            .collect();
        Ok(DirichletCharacter { group: self.group.clone(), exps })
    }

    /// Product after inducing both factors to the lcm of the moduli.
    pub fn product_lifted(&self, other: &Self) -> Result<Self> {
        let m = lcm(self.modulus(), other.modulus());
        let g = if m == self.modulus() {
            self.group.clone()
        } else if m == other.modulus() {
            other.group.clone()
        } else {
            UnitGroup::new(m)?
        };
        self.induce_to(&g)?.product(&other.induce_to(&g)?)
    }

    /// The character on `group` whose value at each basis generator is `value(g)`.
    pub fn from_generator_values(
        group: Arc<UnitGroup>,
        value: impl Fn(u64) -> Angle,
    ) -> Result<Self> {
        let mut exps = Vec::with_capacity(group.rank());
        for (&g, &d) in group.generators().iter().zip(group.orders()) {
            let a = value(g);
            match a.over(d) {
                Some(x) => exps.push(x % d),
                None => {
                    return domain(format!(
                        "value e({}/{}) at generator {g} is not a root of unity of order dividing {d}",
                        a.num(),
                        a.den()
                    ))
                }
            }
        }
        Ok(DirichletCharacter { group, exps })
    }

    /// Induce to a multiple of the modulus.
    pub fn induce(&self, target: u64) -> Result<Self> {
        if target == 0 || target % self.modulus() != 0 {
            return domain(format!("cannot induce mod {} to mod {target}", self.modulus()));
        }
        self.induce_to(&UnitGroup::new(target)?)
    }

    pub fn induce_to(&self, group: &Arc<UnitGroup>) -> Result<Self> {
        let target = group.modulus();
        if target % self.modulus() != 0 {
            return domain(format!("cannot induce mod {} to mod {target}", self.modulus()));
        }
        if target == self.modulus() {
            return Ok(DirichletCharacter { group: group.clone(), exps: self.exps.clone() });
        }
        Self::from_generator_values(group.clone(), |g| {
            self.angle(g as i64).expect("units mod a multiple are units")
        })
    }

    /// Conductor: the modulus of the primitive character inducing χ.
    pub fn conductor(&self) -> u64 {
        self.group
            .components()
            .iter()
            .map(|c| {
                let x = &self.exps[c.offset..c.offset + c.orders.len()];
                c.p.pow(Self::local_conductor_exponent(c.p, c.e, x))
            })
            .product()
    }

    fn local_conductor_exponent(p: u64, e: u32, x: &[u64]) -> u32 {
        if x.iter().all(|&v| v == 0) {
            return 0;
        }
        if p == 2 {
            match e {
                2 => 2,
                _ => {
                    // x[0] on −1, x[1] on 5 (order 2^{e-2})
                    if x[1] == 0 {
                        2
                    } else {
                        (e - valuation(x[1], 2)).max(2)
                    }
                }
            }
        } else {
            // on the cyclic group of order p^{e-1}(p-1): trivial on 1 + p^f ℤ iff p^{e-f} | x
            e - valuation(x[0], p).min(e - 1)
        }
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus()
    }

    /// The primitive character mod `conductor()` inducing χ.
    pub fn primitivize(&self) -> Result<Self> {
        let d = self.conductor();
        if d == self.modulus() {
            return Ok(self.clone());
        }
        let q = self.modulus();
        let group = UnitGroup::new(d)?;
        Self::from_generator_values(group, |h| {
            let mut a = h;
            while gcd(a, q) != 1 {
                a += d;
            }
            self.angle(a as i64).expect("lifted to a unit")
        })
    }

    /// The component of χ on the coprime factor `q1` of the modulus.
    pub fn restrict(&self, q1: u64) -> Result<Self> {
        let q = self.modulus();
        if q1 == 0 || q % q1 != 0 || gcd(q1, q / q1) != 1 {
            return domain(format!("{q1} is not a unitary divisor of {q}"));
        }
        let q2 = q / q1;
        let group = UnitGroup::new(q1)?;
        Self::from_generator_values(group, |g| {
            let lift = super::arith::crt_pair(g, q1, 1, q2);
            self.angle(lift as i64).expect("CRT lift is a unit")
        })
    }

    /// 0 if χ(−1) = 1, else 1.
    pub fn parity(&self) -> u8 {
        match self.angle(-1) {
            Some(a) if a == Angle::ZERO => 0,
            _ => 1,
        }
    }

    /// Whether the underlying primitive characters agree.
    pub fn same_primitive(&self, other: &Self) -> Result<bool> {
        Ok(self.primitivize()? == other.primitivize()?)
    }

    /// Compact label `q:[x1,x2,..]` used in reports.
    pub fn label(&self) -> String {
        format!("{}:{:?}", self.modulus(), self.exps)
    }
}
