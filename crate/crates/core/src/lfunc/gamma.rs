//! Complex log-gamma by Stirling's series after an upward shift, with
//! reflection for `Re z < 1/2`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::hurwitz::bernoulli;

/// Stirling terms kept; the shift puts `Re z ≥ SHIFT_TO` so the first omitted
/// term is below `1e-20`.
const STIRLING_TERMS: usize = 12;
const SHIFT_TO: f64 = 15.0;

/// A logarithm of `Γ(z)`. The imaginary part may differ from the principal
/// branch by a multiple of `2π`; `exp` of it is exact up to rounding.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z)Γ(1−z) = π / sin(πz)
        let one = Complex64::new(1.0, 0.0);
        return Complex64::new(PI.ln(), 0.0) - (z * PI).sin().ln() - ln_gamma(one - z);
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < SHIFT_TO {
        shift += w.ln();
        w += 1.0;
    }
    let mut series = Complex64::new(0.0, 0.0);
    let w2 = w * w;
    let mut wp = w;
    for k in 1..=STIRLING_TERMS {
        let b = bernoulli(2 * k);
        series += b / ((2 * k * (2 * k - 1)) as f64 * wp);
        wp *= w2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// `ln Γ_R(s) = −(s/2) ln π + ln Γ(s/2)`.
pub fn ln_gamma_r(s: Complex64) -> Complex64 {
    -s / 2.0 * PI.ln() + ln_gamma(s / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn real_values() {
        assert!((gamma(c(0.5, 0.0)).re - PI.sqrt()).abs() < 1e-14);
        let mut fact = 1.0;
        for n in 1..20 {
            let g = gamma(c(n as f64, 0.0));
            assert!((g.re - fact).abs() <= 1e-13 * fact, "Γ({n})");
            fact *= n as f64;
        }
        // Γ(−1/2) = −2√π
        assert!((gamma(c(-0.5, 0.0)).re + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn critical_line_modulus() {
        for t in [0.3, 1.0, 4.0, 12.5, 40.0] {
            let g = gamma(c(0.5, t));
            let expect = PI / (PI * t).cosh();
            assert!((g.norm_sqr() - expect).abs() <= 1e-12 * expect, "t={t}");
        }
    }

    #[test]
    fn complex_oracle_values() {
        let g = gamma(c(1.0, 1.0));
        assert!((g - c(0.498_015_668_118_356_04, -0.154_949_828_301_810_69)).norm() < 1e-14);
        // exp of the mpmath log-gamma values
        let cases = [
            (c(0.3, -7.0), c(-10.465674446702918896, -6.3103096470407681554)),
            (c(-2.5, 0.5), c(-0.93508562129827747868, -8.8709628852474591986)),
            (c(20.0, 30.0), c(21.345074493863444896, 96.714347689536180139)),
        ];
        for (z, lg) in cases {
            let a = ln_gamma(z);
            assert!((a.re - lg.re).abs() < 1e-12, "{z}");
            let turns = (a.im - lg.im) / (2.0 * PI);
            assert!((turns - turns.round()).abs() < 1e-12, "{z}");
        }
    }

    #[test]
    fn recurrence() {
        for z in [c(0.2, 0.7), c(3.3, -2.0), c(-4.1, 9.0), c(14.9, 0.1)] {
            let lhs = gamma(z + 1.0);
            let rhs = z * gamma(z);
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm(), "{z}");
        }
    }
}
