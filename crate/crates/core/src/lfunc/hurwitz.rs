//! Hurwitz zeta by Euler-Maclaurin summation.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `B_2, B_4, ..., B_42` as (numerator, denominator).
const BERNOULLI: [(f64, f64); 21] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
    (-7709321041217.0, 510.0),
    (2577687858367.0, 6.0),
    (-26315271553053477373.0, 1919190.0),
    (2929993913841559.0, 6.0),
    (-261082718496449122051.0, 13530.0),
    (1520097643918070802691.0, 1806.0),
];

/// `B_n` for even `2 ≤ n ≤ 42`.
pub fn bernoulli(n: usize) -> f64 {
    assert!(n >= 2 && n % 2 == 0 && n <= 2 * BERNOULLI.len(), "B_{n} not tabulated");
    let (a, b) = BERNOULLI[n / 2 - 1];
    a / b
}

/// Euler-Maclaurin depth: terms summed directly and Bernoulli corrections.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerMaclaurin {
    pub head: usize,
    pub corrections: usize,
}

impl Default for EulerMaclaurin {
    fn default() -> Self {
        EulerMaclaurin { head: 50, corrections: 10 }
    }
}

impl EulerMaclaurin {
    /// `ζ(s, a) − 1/(s−1)`, finite at `s = 1`. The error budget is the size of
    /// the first omitted correction plus a rounding allowance.
    pub fn regularized(&self, s: Complex64, a: f64) -> Result<(Complex64, f64)> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::Domain(format!("Hurwitz shift a = {a} outside (0, 1]")));
        }
        if self.corrections + 1 > BERNOULLI.len() {
            return Err(Error::Domain(format!("at most {} corrections", BERNOULLI.len() - 1)));
        }
        let one = Complex64::new(1.0, 0.0);
        let n = self.head as f64;
        let mut head = Complex64::new(0.0, 0.0);
        let mut magnitude = 0.0;
        for k in 0..self.head {
            let term = (-s * (k as f64 + a).ln()).exp();
            head += term;
            magnitude += term.norm();
        }
        let x = n + a;
        let lx = x.ln();
        // ((x^{1−s} − 1)/(s − 1)) without cancellation near s = 1
        let w = (one - s) * lx;
        let expm1_over = if w.norm() < 1e-3 {
            one + w / 2.0 + w * w / 6.0 + w * w * w / 24.0
        } else {
            (w.exp() - one) / w
        };
        let integral = -lx * expm1_over;
        let x_s = (-s * lx).exp();
        let mut tail = x_s / 2.0;
        // rising factorial s(s+1)...(s+2k−2) over (2k)!, times x^{−s−2k+1}
        let mut coef = s / x;
        let mut fact = 2.0;
        let mut term_size = 0.0;
        for k in 1..=self.corrections + 1 {
            let term = bernoulli(2 * k) / fact * coef * x_s;
            if k <= self.corrections {
                tail += term;
            } else {
                term_size = term.norm();
            }
            coef *= (s + (2 * k - 1) as f64) * (s + (2 * k) as f64) / (x * x);
            fact *= ((2 * k + 1) * (2 * k + 2)) as f64;
        }
        // rounding in the head and the integral term cancel against each other for Re s < 0
        let rounding = 4.0 * f64::EPSILON * (magnitude + integral.norm() + tail.norm());
        Ok((head + integral + tail, term_size + rounding))
    }

    /// `ζ(s, a)` for `s ≠ 1`.
    pub fn hurwitz(&self, s: Complex64, a: f64) -> Result<(Complex64, f64)> {
        if s == Complex64::new(1.0, 0.0) {
            return Err(Error::Pole("1".into()));
        }
        let (v, err) = self.regularized(s, a)?;
        Ok((v + 1.0 / (s - 1.0), err))
    }
}

/// `ζ(s, a)` at the default depth.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<Complex64> {
    EulerMaclaurin::default().hurwitz(s, a).map(|x| x.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bernoulli_recurrence() {
        // Σ_{k=0}^{n} C(n+1, k) B_k = 0 with B_0 = 1, B_1 = −1/2, odd B_k = 0 beyond
        for n in (2..=42).step_by(2) {
            let mut binom = 1.0f64;
            let mut sum = 0.0f64;
            let mut scale = 0.0f64;
            for k in 0..=n {
                let b = match k {
                    0 => 1.0,
                    1 => -0.5,
                    k if k % 2 == 1 => 0.0,
                    k => bernoulli(k),
                };
                sum += binom * b;
                scale += (binom * b).abs();
                binom = binom * (n + 1 - k) as f64 / (k + 1) as f64;
            }
            assert!(sum.abs() <= 1e-13 * scale, "n={n}: {sum}");
        }
    }

    #[test]
    fn known_values() {
        let z2 = hurwitz_zeta(c(2.0, 0.0), 1.0).unwrap();
        assert!((z2.re - PI * PI / 6.0).abs() < 1e-12 && z2.im.abs() < 1e-15);
        let z4 = hurwitz_zeta(c(4.0, 0.0), 1.0).unwrap();
        assert!((z4.re - PI.powi(4) / 90.0).abs() < 1e-13);
        // ζ(s, 1/2) = (2^s − 1) ζ(s)
        let s = c(3.5, 2.0);
        let lhs = hurwitz_zeta(s, 0.5).unwrap();
        let rhs = ((2f64.ln() * s).exp() - 1.0) * hurwitz_zeta(s, 1.0).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn mpmath_oracle_values() {
        let cases = [
            (c(0.5, 0.0), 0.2, c(0.53217444588980659704, 0.0)),
            (c(0.5, 3.0), 0.7, c(0.25737135971126707218, 0.71523119493669693842)),
            (c(-0.5, 1.0), 0.3, c(-0.04686909555976441257, 0.18084201138486320465)),
            (c(2.0, 1.0), 1.0, c(1.1503557032549026717, -0.43753086591960788112)),
            (c(1.0001, 0.0), 0.5, c(10001.963645377935279, 0.0)),
        ];
        for (s, a, expect) in cases {
            let (v, budget) = EulerMaclaurin::default().hurwitz(s, a).unwrap();
            assert!((v - expect).norm() < 1e-12 * expect.norm().max(1.0), "ζ({s}, {a}) = {v}");
            assert!(budget < 1e-12);
        }
    }

    #[test]
    fn pole_and_domain() {
        assert!(matches!(hurwitz_zeta(c(1.0, 0.0), 0.5), Err(Error::Pole(_))));
        assert!(hurwitz_zeta(c(2.0, 0.0), 0.0).is_err());
        assert!(hurwitz_zeta(c(2.0, 0.0), 1.5).is_err());
        let (reg, _) = EulerMaclaurin::default().regularized(c(1.0, 0.0), 1.0).unwrap();
        // ζ(s) − 1/(s−1) → Euler's constant
        assert!((reg.re - 0.577_215_664_901_532_9).abs() < 1e-14);
    }

    #[test]
    fn deeper_settings_agree() {
        let deep = EulerMaclaurin { head: 100, corrections: 20 };
        for (s, a) in [(c(0.5, 0.0), 0.2), (c(0.5, 14.1), 0.9), (c(-1.5, 2.0), 0.05)] {
            let (x, ex) = EulerMaclaurin::default().hurwitz(s, a).unwrap();
            let (y, ey) = deep.hurwitz(s, a).unwrap();
            assert!((x - y).norm() <= ex + ey, "{s} {a}: {} vs {}", (x - y).norm(), ex + ey);
        }
    }
}
