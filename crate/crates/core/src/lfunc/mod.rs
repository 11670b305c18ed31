//! Dirichlet L-values, the completed functional equation, the smoothing
//! weights `V_j`, and scans of central values.

pub mod gamma;
pub mod hurwitz;
pub mod scans;
pub mod vweight;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::expsums::gauss_sum;
use crate::report::SumReport;
use crate::residues::DirichletCharacter;

pub use gamma::{gamma, ln_gamma, ln_gamma_r};
pub use hurwitz::{hurwitz_zeta, EulerMaclaurin};
pub use scans::{sixth_moment, weyl_ratio_scan, WeylRow};
pub use vweight::{v_weight, VWeightParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LMethod {
    EulerMaclaurin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LValue {
    pub s: Complex64,
    pub chi: Vec<u64>,
    pub q: u64,
    pub value: Complex64,
    pub method: LMethod,
    /// Sum over residues of the Euler-Maclaurin budgets, scaled by `q^{-σ}`.
    pub error_budget: f64,
}

/// `L(s, χ) = q^{-s} Σ_a χ(a) ζ(s, a/q)`.
pub fn dirichlet_l(s: Complex64, chi: &DirichletCharacter) -> Result<LValue> {
    dirichlet_l_with(&EulerMaclaurin::default(), s, chi)
}

pub fn dirichlet_l_with(em: &EulerMaclaurin, s: Complex64, chi: &DirichletCharacter) -> Result<LValue> {
    let q = chi.modulus();
    let one = Complex64::new(1.0, 0.0);
    if chi.is_principal() && s == one {
        return Err(Error::Pole("1".into()));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut weight = Complex64::new(0.0, 0.0);
    let mut budget = 0.0;
    for a in 1..=q {
        let c = chi.eval(a as i64);
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let (z, err) = em.regularized(s, a as f64 / q as f64)?;
        acc += c * z;
        weight += c;
        budget += err;
    }
    // the 1/(s−1) parts cancel unless χ is principal
    if chi.is_principal() {
        acc += weight / (s - one);
    }
    let scale = (-s * (q as f64).ln()).exp();
    Ok(LValue {
        s,
        chi: chi.exponents().to_vec(),
        q,
        value: scale * acc,
        method: LMethod::EulerMaclaurin,
        error_budget: budget * scale.norm(),
    })
}

/// `ε(χ) = τ(χ) / (i^δ √q)`.
pub fn root_number(chi: &DirichletCharacter) -> Complex64 {
    let i_delta = if chi.parity() == 1 { Complex64::new(0.0, 1.0) } else { Complex64::new(1.0, 0.0) };
    gauss_sum(chi) / (i_delta * (chi.modulus() as f64).sqrt())
}

/// `Λ(s, χ) = (q/π)^{(s+δ)/2} Γ((s+δ)/2) L(s, χ)`.
pub fn completed_l(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    let delta = chi.parity() as f64;
    let z = (s + delta) / 2.0;
    let factor = (z * (chi.modulus() as f64 / PI).ln() + ln_gamma(z)).exp();
    Ok(factor * dirichlet_l(s, chi)?.value)
}

/// Checks `|Λ(s, χ) − ε(χ) Λ(1 − s, χ̄)| ≤ 1e-8 max(1, |Λ|)`.
pub fn verify_functional_equation(chi: &DirichletCharacter, s: Complex64) -> Result<SumReport> {
    if !chi.is_primitive() {
        return domain(format!("{chi:?} is not primitive"));
    }
    let left = completed_l(s, chi)?;
    let right = root_number(chi) * completed_l(Complex64::new(1.0, 0.0) - s, &chi.conj())?;
    let scale = 1e-8 * left.norm().max(1.0);
    Ok(SumReport::identity("functional_equation", left, right, scale)
        .with_chi(chi)
        .with_extra("s_re", s.re)
        .with_extra("s_im", s.im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residues::UnitGroup;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zeta_values() {
        let triv = DirichletCharacter::principal(UnitGroup::new(1).unwrap());
        let v = dirichlet_l(c(2.0, 0.0), &triv).unwrap();
        assert!((v.value.re - PI * PI / 6.0).abs() < 1e-12);
        assert!(v.error_budget > 0.0 && v.error_budget < 1e-13);
        let half = dirichlet_l(c(0.5, 0.0), &triv).unwrap().value;
        assert!((half.norm() - 1.460_354_508_809_586_8).abs() < 1e-13);
        assert!(matches!(dirichlet_l(c(1.0, 0.0), &triv), Err(Error::Pole(_))));
    }

    #[test]
    fn quadratic_mod_5() {
        let g = UnitGroup::new(5).unwrap();
        let quad = DirichletCharacter::all(&g).into_iter().find(|x| x.order() == 2).unwrap();
        let v = dirichlet_l(c(0.5, 0.0), &quad).unwrap().value;
        assert!((v.re - 0.231_750_947_504_015_75).abs() < 1e-13 && v.im.abs() < 1e-14);
        // L(1, χ_5) = 2 log((1+√5)/2) / √5
        let one = dirichlet_l(c(1.0, 0.0), &quad).unwrap().value;
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((one.re - 2.0 * golden.ln() / 5f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn schwarz_reflection() {
        let g = UnitGroup::new(13).unwrap();
        for chi in DirichletCharacter::all(&g) {
            if chi.is_principal() {
                continue;
            }
            let s = c(0.3, 4.0);
            let a = dirichlet_l(s.conj(), &chi.conj()).unwrap().value;
            let b = dirichlet_l(s, &chi).unwrap().value;
            assert!((a - b.conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn functional_equation_small() {
        for q in [3u64, 4, 5, 7, 8, 12] {
            for chi in DirichletCharacter::primitive(&UnitGroup::new(q).unwrap()) {
                assert!((root_number(&chi).norm() - 1.0).abs() < 1e-10);
                for s in [c(0.5, 0.0), c(0.5, 3.0), c(2.0, 1.0), c(-0.5, 1.0)] {
                    let rep = verify_functional_equation(&chi, s).unwrap();
                    assert!(rep.pass, "{rep:?}");
                }
            }
        }
        let imprimitive = DirichletCharacter::principal(UnitGroup::new(5).unwrap());
        assert!(verify_functional_equation(&imprimitive, c(0.5, 0.0)).is_err());
    }

    #[test]
    fn real_characters_have_sign_root_numbers() {
        for q in [3u64, 4, 5, 8, 12, 13] {
            for chi in DirichletCharacter::primitive(&UnitGroup::new(q).unwrap()) {
                if chi.order() == 2 {
                    assert!((root_number(&chi) - 1.0).norm() < 1e-10, "{chi:?}");
                }
            }
        }
    }
}
