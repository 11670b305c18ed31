//! Central-value scans: `max_χ |L(1/2+it, χ)| / q^{1/6}` over cube-free
//! moduli, and the sixth moment of `|L(1/2+it, χ)|` over `[−T, T]`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hurwitz::EulerMaclaurin;
use super::dirichlet_l;
use crate::error::{domain, Error, Result};
use crate::report::SumReport;
use crate::residues::{gcd, DirichletCharacter, Factorization, RootTable, UnitGroup, ZERO_VALUE};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylRow {
    pub q: u64,
    pub ratio: f64,
    /// Exponent vector of a maximizing χ.
    pub chi: Vec<u64>,
    pub characters: usize,
}

impl WeylRow {
    pub fn report(&self, threshold: f64, t: f64) -> SumReport {
        let mut r = SumReport::bound("weyl.ratio", self.ratio, threshold, 0.0)
            .with_q(self.q)
            .with_extra("t", t)
            .with_extra("characters", self.characters as f64);
        r.chi = self.chi.clone();
        r
    }
}

/// Moduli scanned: cube-free and carrying primitive characters (`q ≢ 2 mod 4`).
pub fn weyl_moduli(q_max: u64) -> Vec<u64> {
    (1..=q_max)
        .filter(|&q| q % 4 != 2)
        .filter(|&q| Factorization::of(q).map(|f| f.is_cube_free()).unwrap_or(false))
        .collect()
}

fn weyl_row(q: u64, t: f64) -> Result<WeylRow> {
    let s = Complex64::new(0.5, t);
    if q == 1 {
        let triv = DirichletCharacter::principal(UnitGroup::new(1)?);
        let v = dirichlet_l(s, &triv)?.value;
        return Ok(WeylRow { q, ratio: v.norm(), chi: triv.exponents().to_vec(), characters: 1 });
    }
    let em = EulerMaclaurin::default();
    let units: Vec<u64> = (1..q).filter(|&a| gcd(a, q) == 1).collect();
    let zs: Vec<Complex64> = units
        .iter()
        .map(|&a| em.regularized(s, a as f64 / q as f64).map(|x| x.0))
        .collect::<Result<_>>()?;
    let group = UnitGroup::new(q)?;
    let n = group.exponent();
    let roots = RootTable::new(n);
    let scale = (-s * (q as f64).ln()).exp().norm() / (q as f64).powf(1.0 / 6.0);
    let mut best: Option<(f64, Vec<u64>)> = None;
    let prims = DirichletCharacter::primitive(&group);
    for chi in &prims {
        let table = chi.table(n);
        let mut acc = Complex64::new(0.0, 0.0);
        for (&a, z) in units.iter().zip(&zs) {
            let k = table.at(a as usize);
            debug_assert_ne!(k, ZERO_VALUE);
            acc += roots.get(k as u64) * z;
        }
        let ratio = acc.norm() * scale;
        if best.as_ref().map_or(true, |b| ratio > b.0) {
            best = Some((ratio, chi.exponents().to_vec()));
        }
    }
    let (ratio, chi) = best.ok_or_else(|| Error::Domain(format!("no primitive character mod {q}")))?;
    Ok(WeylRow { q, ratio, chi, characters: prims.len() })
}

/// One row per scanned modulus, in increasing `q`.
pub fn weyl_ratio_scan(q_max: u64, t: f64) -> Result<Vec<WeylRow>> {
    weyl_moduli(q_max).into_par_iter().map(|q| weyl_row(q, t)).collect()
}

fn sixth_power(chi: &DirichletCharacter, t: f64) -> Result<f64> {
    Ok(dirichlet_l(Complex64::new(0.5, t), chi)?.value.norm().powi(6))
}

fn check_range(t_max: f64) -> Result<()> {
    if !(0.0..=10.0).contains(&t_max) {
        return domain(format!("T = {t_max} outside [0, 10]"));
    }
    Ok(())
}

/// `∫_{-T}^{T} |L(1/2+it, χ)|⁶ dt` by adaptive Simpson to relative tolerance `1e-10`.
pub fn sixth_moment(chi: &DirichletCharacter, t_max: f64) -> Result<f64> {
    sixth_moment_with(chi, t_max, 1e-10)
}

pub fn sixth_moment_with(chi: &DirichletCharacter, t_max: f64, rel_tol: f64) -> Result<f64> {
    check_range(t_max)?;
    if t_max == 0.0 {
        return Ok(0.0);
    }
    let f = |t: f64| sixth_power(chi, t);
    // split at 0 and a few interior points so the first estimate is not fooled
    let cuts: Vec<f64> = (0..=8).map(|k| -t_max + 2.0 * t_max * k as f64 / 8.0).collect();
    let mut pieces = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fm, fb) = (f(a)?, f((a + b) / 2.0)?, f(b)?);
        pieces.push((a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb)));
    }
    let rough: f64 = pieces.iter().map(|p| p.5).sum();
    let tol = rel_tol * rough.abs().max(f64::MIN_POSITIVE) / pieces.len() as f64;
    let mut total = 0.0;
    for (a, b, fa, fm, fb, whole) in pieces {
        total += adaptive(&f, a, b, fa, fm, fb, whole, tol, 48)?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &impl Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = (a + b) / 2.0;
    let (lm, rm) = ((a + m) / 2.0, (m + b) / 2.0);
    let (flm, frm) = (f(lm)?, f(rm)?);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numerical(format!("adaptive Simpson did not settle on [{a}, {b}]")));
    }
    Ok(adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}

/// Composite Simpson with `panels` (even) subintervals; the convergence oracle.
pub fn sixth_moment_simpson(chi: &DirichletCharacter, t_max: f64, panels: usize) -> Result<f64> {
    check_range(t_max)?;
    if panels == 0 || panels % 2 == 1 {
        return domain("Simpson needs an even, positive panel count");
    }
    let h = 2.0 * t_max / panels as f64;
    let mut acc = 0.0;
    for k in 0..=panels {
        let w = if k == 0 || k == panels { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * sixth_power(chi, -t_max + k as f64 * h)?;
    }
    Ok(acc * h / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_row() {
        let rows = weyl_ratio_scan(1, 0.0).unwrap();
        assert_eq!(rows.len(), 1);
        assert!((rows[0].ratio - 1.460_354_508_809_586_8).abs() < 1e-13);
    }

    #[test]
    fn moduli_filter() {
        let qs = weyl_moduli(30);
        assert!(qs.contains(&4) && qs.contains(&12) && qs.contains(&9));
        assert!(!qs.contains(&8) && !qs.contains(&27) && !qs.contains(&24));
        assert!(!qs.contains(&6) && !qs.contains(&2));
    }

    #[test]
    fn rows_match_direct_l() {
        for row in weyl_ratio_scan(40, 1.5).unwrap() {
            let g = UnitGroup::new(row.q).unwrap();
            let best = DirichletCharacter::primitive(&g)
                .iter()
                .map(|chi| dirichlet_l(Complex64::new(0.5, 1.5), chi).unwrap().value.norm())
                .fold(0.0, f64::max);
            let expect = best / (row.q as f64).powf(1.0 / 6.0);
            assert!((row.ratio - expect).abs() < 1e-12, "q={}", row.q);
        }
    }

    #[test]
    fn sixth_moment_of_zeta() {
        let triv = DirichletCharacter::principal(UnitGroup::new(1).unwrap());
        let v = sixth_moment(&triv, 1.0).unwrap();
        assert!((v - 6.016_057_843_741_117_4).abs() < 1e-8, "{v}");
        assert_eq!(sixth_moment(&triv, 0.0).unwrap(), 0.0);
        assert!(sixth_moment(&triv, 11.0).is_err());
    }

    #[test]
    fn sixth_moment_converges() {
        let chi = DirichletCharacter::primitive(&UnitGroup::new(7).unwrap())[1].clone();
        let a = sixth_moment_simpson(&chi, 4.0, 200).unwrap();
        let b = sixth_moment_simpson(&chi, 4.0, 400).unwrap();
        assert!(a > 0.0 && ((a - b) / b).abs() <= 1e-4);
        let adaptive = sixth_moment(&chi, 4.0).unwrap();
        assert!(((adaptive - b) / b).abs() <= 1e-6);
    }
}
