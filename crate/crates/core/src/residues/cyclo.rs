//! Exact root-of-unity bookkeeping.
//!
//! A character value is an `n`-th root of unity `e(k/n)`; sums of such values
//! are accumulated as integer multiplicities per `k` and only turned into a
//! floating-point number when the caller asks for it.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::arith::gcd;

/// `e(x) = exp(2πi x)` for real `x`.
#[inline]
pub fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * x)
}

/// The rational angle `num/den` standing for `e(num/den)`, kept reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Angle {
    num: u64,
    den: u64,
}

impl Angle {
    pub const ZERO: Angle = Angle { num: 0, den: 1 };

    pub fn new(num: i64, den: u64) -> Angle {
        assert!(den > 0);
        let num = num.rem_euclid(den as i64) as u64;
        let g = gcd(num, den);
        if num == 0 {
            return Angle::ZERO;
        }
        Angle { num: num / g, den: den / g }
    }

    pub fn num(self) -> u64 {
        self.num
    }

    /// Order of the root of unity.
    pub fn den(self) -> u64 {
        self.den
    }

    pub fn neg(self) -> Angle {
        Angle::new(-(self.num as i64), self.den)
    }

    pub fn add(self, other: Angle) -> Angle {
        let den = super::arith::lcm(self.den, other.den);
        let a = self.num as u128 * (den / self.den) as u128 + other.num as u128 * (den / other.den) as u128;
        Angle::new((a % den as u128) as i64, den)
    }

    pub fn scale(self, k: i64) -> Angle {
        let n = (self.num as i128 * k as i128).rem_euclid(self.den as i128);
        Angle::new(n as i64, self.den)
    }

    /// Numerator over the given denominator, if `den` is a multiple of the order.
    pub fn over(self, den: u64) -> Option<u64> {
        (den % self.den == 0).then(|| self.num * (den / self.den))
    }

    pub fn to_complex(self) -> Complex64 {
        RootTable::root(self.num, self.den)
    }
}

/// Precomputed `e(k/n)` for `k in 0..n`.
#[derive(Clone, Debug)]
pub struct RootTable {
    roots: Vec<Complex64>,
}

impl RootTable {
    pub fn new(n: u64) -> RootTable {
        RootTable { roots: (0..n).map(|k| Self::root(k, n)).collect() }
    }

    /// `e(k/n)`, reduced to the first octant so that conjugate and
    /// quarter-turn symmetric roots come out bit-identical.
    pub fn root(k: u64, n: u64) -> Complex64 {
        let k = k % n;
        // exact on the axes
        if k == 0 {
            return Complex64::new(1.0, 0.0);
        }
        if 2 * k == n {
            return Complex64::new(-1.0, 0.0);
        }
        if 4 * k == n {
            return Complex64::new(0.0, 1.0);
        }
        if 4 * k == 3 * n {
            return Complex64::new(0.0, -1.0);
        }
        // conjugate symmetry
        if 2 * k > n {
            return Self::root(n - k, n).conj();
        }
        // now 0 < k < n/2; fold about the imaginary axis
        if 4 * k > n {
            let z = Self::root(n - 2 * k, 2 * n);
            return Complex64::new(-z.re, z.im);
        }
        let x = TAU * (k as f64) / (n as f64);
        Complex64::new(x.cos(), x.sin())
    }

    pub fn len(&self) -> u64 {
        self.roots.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    #[inline]
    pub fn get(&self, k: u64) -> Complex64 {
        self.roots[k as usize]
    }
}

/// Integer multiplicities of the `n`-th roots of unity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloSum {
    counts: Vec<i64>,
}

impl CycloSum {
    pub fn new(n: u64) -> CycloSum {
        CycloSum { counts: vec![0; n as usize] }
    }

    pub fn order(&self) -> u64 {
        self.counts.len() as u64
    }

    #[inline]
    pub fn add(&mut self, k: u64) {
        self.counts[k as usize] += 1;
    }

    #[inline]
    pub fn add_times(&mut self, k: u64, w: i64) {
        self.counts[k as usize] += w;
    }

    /// Number of unit terms that went in, counted with sign.
    pub fn total_weight(&self) -> i64 {
        self.counts.iter().sum()
    }

    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    pub fn merge(&mut self, other: &CycloSum) {
        assert_eq!(self.counts.len(), other.counts.len());
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn value(&self) -> Complex64 {
        let n = self.order();
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &c) in self.counts.iter().enumerate() {
            if c != 0 {
                acc += RootTable::root(k as u64, n) * c as f64;
            }
        }
        acc
    }

    pub fn value_with(&self, roots: &RootTable) -> Complex64 {
        debug_assert_eq!(roots.len(), self.order());
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &c) in self.counts.iter().enumerate() {
            if c != 0 {
                acc += roots.get(k as u64) * c as f64;
            }
        }
        acc
    }
}
