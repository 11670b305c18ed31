//! Gauss, Ramanujan and twisted Kloosterman sums, the two-variable sum
//! `g(χ, ψ)` and the bound scans built on it.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::report::{sort_canonical, summarize_max, SumReport};
use crate::residues::arith::{is_prime, mobius};
use crate::residues::{
    gcd, lcm, mod_inv, sum_tolerance, Angle, CycloSum, DirichletCharacter, Factorization,
    UnitGroup, ZERO_VALUE,
};

/// `τ(χ) = Σ_a χ(a) e_q(a)`.
pub fn gauss_sum(chi: &DirichletCharacter) -> Complex64 {
    additive_twist(chi, 1)
}

/// `Σ_a χ(a) e_q(n a)`.
pub fn additive_twist(chi: &DirichletCharacter, n: i64) -> Complex64 {
    let q = chi.modulus();
    let order = lcm(chi.group().exponent(), q);
    let table = chi.table(order);
    let step = order / q;
    let n = n.rem_euclid(q as i64) as u64;
    let mut acc = CycloSum::new(order);
    for (a, &k) in table.as_slice().iter().enumerate() {
        if k != ZERO_VALUE {
            acc.add((k as u64 + (n * a as u64 % q) * step) % order);
        }
    }
    acc.value()
}

/// `R_q(n)` by summing `e_q(n y)` over units `y`.
pub fn ramanujan_sum(q: u64, n: i64) -> f64 {
    let n = n.rem_euclid(q as i64) as u64;
    let mut acc = CycloSum::new(q);
    for y in (0..q).filter(|&y| gcd(y, q) == 1) {
        acc.add(n * y % q);
    }
    acc.value().re
}

/// `R_q(n) = Σ_{d | (q, n)} d μ(q/d)`, exactly.
pub fn ramanujan_mobius(q: u64, n: i64) -> i64 {
    let g = gcd(q, n.unsigned_abs());
    Factorization::of(g)
        .expect("q ≥ 1")
        .divisors()
        .into_iter()
        .map(|d| d as i64 * mobius(q / d))
        .sum()
}

/// `S_ψ(m, n; c) = Σ*_y ψ̄(y) e_c(m y + n ȳ)`.
pub fn kloosterman_twisted(psi: &DirichletCharacter, m: i64, n: i64, c: u64) -> Result<Complex64> {
    if psi.modulus() != c {
        return domain(format!("character mod {} for a Kloosterman sum mod {c}", psi.modulus()));
    }
    let order = lcm(psi.group().exponent(), c);
    let table = psi.conj().table(order);
    let step = order / c;
    let (m, n) = (m.rem_euclid(c as i64) as u64, n.rem_euclid(c as i64) as u64);
    let mut acc = CycloSum::new(order);
    for y in 0..c {
        let k = table.at(y as usize);
        if k == ZERO_VALUE {
            continue;
        }
        let y_inv = mod_inv(y as i64, c).expect("unit");
        let phase = (m * y % c + n * y_inv % c) % c;
        acc.add((k as u64 + phase * step) % order);
    }
    Ok(acc.value())
}

fn require_primitive(chi: &DirichletCharacter) -> Result<()> {
    if !chi.is_primitive() {
        return domain(format!("{chi:?} is not primitive"));
    }
    Ok(())
}

/// Cached rows of `χ(t)χ̄(t+1)` and `χ̄(u)χ(u+1)` for evaluating
/// `g(χ, ψ)` against many ψ.
pub struct GSum {
    q: u64,
    order: u64,
    a_row: Vec<u32>,
    b_row: Vec<u32>,
}

impl GSum {
    pub fn new(chi: &DirichletCharacter) -> Result<Self> {
        require_primitive(chi)?;
        let q = chi.modulus();
        let order = chi.group().exponent();
        let t = chi.table(order);
        let t = t.as_slice();
        let row = |a: usize, b: usize| match (t[a], t[b]) {
            (ZERO_VALUE, _) | (_, ZERO_VALUE) => ZERO_VALUE,
            (x, y) => ((x as u64 + order - y as u64) % order) as u32,
        };
        let next = |x: usize| (x + 1) % q as usize;
        let a_row = (0..q as usize).map(|x| row(x, next(x))).collect();
        let b_row = (0..q as usize).map(|x| row(next(x), x)).collect();
        Ok(GSum { q, order, a_row, b_row })
    }

    /// Exact multiplicities of `g(χ, ψ)` over the roots of unity of the group exponent.
    pub fn eval_exact(&self, psi: &DirichletCharacter) -> Result<CycloSum> {
        if psi.modulus() != self.q {
            return domain(format!("ψ mod {} against χ mod {}", psi.modulus(), self.q));
        }
        let psi_t = psi.table(self.order);
        let psi_t = psi_t.as_slice();
        let q = self.q as usize;
        let n = self.order as usize;
        // indices stay below 3n, folded once at the end
        let mut wide = vec![0i64; 3 * n];
        for (t, &a) in self.a_row.iter().enumerate() {
            if a == ZERO_VALUE {
                continue;
            }
            let mut w = q - 1;
            for &b in &self.b_row {
                let p = psi_t[w];
                if b != ZERO_VALUE && p != ZERO_VALUE {
                    wide[(a + b + p) as usize] += 1;
                }
                w += t;
                if w >= q {
                    w -= q;
                }
            }
        }
        let mut acc = CycloSum::new(self.order);
        for (k, &c) in wide.iter().enumerate() {
            if c != 0 {
                acc.add_times((k % n) as u64, c);
            }
        }
        Ok(acc)
    }

    pub fn eval(&self, psi: &DirichletCharacter) -> Result<Complex64> {
        Ok(self.eval_exact(psi)?.value())
    }
}

/// `g(χ, ψ) = Σ_{t,u} χ(t)χ̄(t+1)χ̄(u)χ(u+1)ψ(ut−1)` by direct double summation.
pub fn g_sum(chi: &DirichletCharacter, psi: &DirichletCharacter) -> Result<Complex64> {
    GSum::new(chi)?.eval(psi)
}

/// Absolute tolerance for a `g` value: `q²` unimodular terms.
pub fn g_tolerance(q: u64) -> f64 {
    sum_tolerance((q * q) as f64, 1.0)
}

/// `ℓ_χ` with `χ(1 + p t) = e_p(ℓ_χ t)`, for χ mod `p²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllInvariant {
    pub p: u64,
    pub ell: u64,
}

fn odd_prime_square_root(q: u64) -> Option<u64> {
    let f = Factorization::of(q).ok()?;
    match f.is_prime_power() {
        Some((p, 2)) if p > 2 => Some(p),
        _ => None,
    }
}

pub fn ell_of_char(chi: &DirichletCharacter) -> Result<EllInvariant> {
    let q = chi.modulus();
    let Some(p) = odd_prime_square_root(q) else {
        return domain(format!("modulus {q} is not the square of an odd prime"));
    };
    let a = chi.angle(1 + p as i64).expect("1 + p is a unit");
    let ell = a.over(p).expect("χ(1+p) is a p-th root of unity");
    Ok(EllInvariant { p, ell })
}

/// `g(χ, ψ)` for χ primitive mod `p²`, through the at most two roots of the
/// quadratic congruence that survive the summation over the `p`-adic digits.
pub fn g_sum_psquared(chi: &DirichletCharacter, psi: &DirichletCharacter) -> Result<Complex64> {
    require_primitive(chi)?;
    let ell_chi = ell_of_char(chi)?;
    let ell_psi = ell_of_char(psi)?;
    if chi.modulus() != psi.modulus() {
        return domain("χ and ψ must share the modulus p²");
    }
    let p = ell_chi.p;
    if ell_psi.ell == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let ratio = ell_chi.ell * mod_inv(ell_psi.ell as i64, p).expect("ℓ_ψ is a unit") % p;
    let order = chi.group().exponent();
    let mut acc = CycloSum::new(order);
    let cbar = chi.conj();
    let mut push = |parts: &[Option<Angle>]| {
        if parts.iter().all(Option::is_some) {
            let k = parts.iter().fold(Angle::ZERO, |s, a| s.add(a.unwrap()));
            acc.add(k.over(order).expect("order divides the exponent") % order);
        }
    };
    for a in 0..p {
        if (a * (a + 2) + ratio * (a + 1)) % p != 0 {
            continue;
        }
        let c = (2 * p - 2 - a) % p;
        let (a, c) = (a as i64, c as i64);
        push(&[
            chi.angle(a),
            cbar.angle(a + 1),
            cbar.angle(c),
            chi.angle(c + 1),
            psi.angle(a * c - 1),
        ]);
    }
    Ok(acc.value() * (p * p) as f64)
}

/// `p^j` and `p^k` with `χ` of conductor `p^k` mod `p^k` and ψ of conductor `p^j`.
fn intermediate_shape(chi: &DirichletCharacter, psi: &DirichletCharacter) -> Result<(u64, u32, u32)> {
    let q = chi.modulus();
    let Some((p, k)) = Factorization::of(q)?.is_prime_power() else {
        return domain(format!("modulus {q} is not a prime power"));
    };
    if chi.conductor() != q {
        return domain(format!("χ must have conductor {q}"));
    }
    let f = psi.conductor();
    let j = match Factorization::of(f)?.is_prime_power() {
        Some((pp, j)) if pp == p => j,
        _ => return domain(format!("ψ has conductor {f}, not a power of {p}")),
    };
    if !(1 <= j && j < k) {
        return domain(format!("need 1 ≤ j < k, got j = {j}, k = {k}"));
    }
    Ok((p, k, j))
}

/// `Σ_{u,y mod p^j} ψ(uy) χ(1+p^{k−j}y) χ(1−p^{k−j}u) χ̄(1+uy p^{2(k−j)})`.
pub fn intermediate_sum(chi: &DirichletCharacter, psi: &DirichletCharacter) -> Result<Complex64> {
    let (p, k, j) = intermediate_shape(chi, psi)?;
    Ok(intermediate_core(chi, &psi.primitivize()?, p, k, j).value())
}

fn intermediate_core(chi: &DirichletCharacter, psi_star: &DirichletCharacter, p: u64, k: u32, j: u32) -> CycloSum {
    let pj = p.pow(j) as i64;
    let h = p.pow(k - j) as i64;
    let h2 = h * h;
    let order = lcm(chi.group().exponent(), psi_star.group().exponent());
    let chi_t = chi.table(order);
    let psi_t = psi_star.table(order);
    let q = chi.modulus() as i64;
    let at = |x: i64| chi_t.at(x.rem_euclid(q) as usize) as u64;
    let mut acc = CycloSum::new(order);
    for u in 0..pj {
        for y in 0..pj {
            let pv = psi_t.at((u * y % pj) as usize);
            if pv == ZERO_VALUE {
                continue;
            }
            let k_val = pv as u64 + at(1 + h * y) + at(1 - h * u) + (order - at(1 + u * y % q * h2 % q)) % order;
            acc.add(k_val % order);
        }
    }
    acc
}

/// `intermediate_sum` for many χ sharing one restriction to `1 + p^{k−j}ℤ`.
///
/// The sum only sees χ on that subgroup, which for odd `p` is cyclic and
/// generated by `1 + p^{k−j}`, so results are memoized on that one value.
pub struct IntermediateMemo {
    cache: HashMap<(Angle, Vec<u64>), Complex64>,
}

impl Default for IntermediateMemo {
    fn default() -> Self {
        Self::new()
    }
}

impl IntermediateMemo {
    pub fn new() -> Self {
        IntermediateMemo { cache: HashMap::new() }
    }

    pub fn eval(&mut self, chi: &DirichletCharacter, psi: &DirichletCharacter) -> Result<Complex64> {
        let (p, k, j) = intermediate_shape(chi, psi)?;
        if p == 2 {
            return intermediate_sum(chi, psi);
        }
        let psi_star = psi.primitivize()?;
        let key = (
            chi.angle(1 + p.pow(k - j) as i64).expect("unit"),
            psi_star.exponents().to_vec(),
        );
        if let Some(&v) = self.cache.get(&key) {
            return Ok(v);
        }
        let v = intermediate_core(chi, &psi_star, p, k, j).value();
        self.cache.insert(key, v);
        Ok(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GScanMode {
    Prime,
    PrimeSquare,
}

/// For every primitive χ and every ψ mod `q` (`q = p` or `p²`), the ratio
/// `|g(χ, ψ)| / q` against `threshold`, canonically sorted.
pub fn scan_g_bound(primes: &[u64], mode: GScanMode, threshold: f64) -> Result<Vec<SumReport>> {
    let identity = match mode {
        GScanMode::Prime => "gbound.prime",
        GScanMode::PrimeSquare => "gbound.prime_square",
    };
    let mut out = Vec::new();
    for &p in primes {
        if !is_prime(p) {
            return domain(format!("{p} is not prime"));
        }
        let q = match mode {
            GScanMode::Prime => p,
            GScanMode::PrimeSquare => p * p,
        };
        let group = UnitGroup::new(q)?;
        let all = DirichletCharacter::all(&group);
        let primitive: Vec<_> = all.iter().filter(|c| c.is_primitive()).cloned().collect();
        let tol = g_tolerance(q) / q as f64;
        let chunk: Result<Vec<Vec<SumReport>>> = primitive
            .par_iter()
            .map(|chi| {
                let g = GSum::new(chi)?;
                all.iter()
                    .map(|psi| {
                        let ratio = g.eval(psi)?.norm() / q as f64;
                        Ok(SumReport::bound(identity, ratio, threshold, tol)
                            .with_chi(chi)
                            .with_psi(psi)
                            .with_extra("p", p as f64))
                    })
                    .collect()
            })
            .collect();
        out.extend(chunk?.into_iter().flatten());
    }
    sort_canonical(&mut out);
    Ok(out)
}

/// Summary record for a g scan: the largest ratio and where it occurs.
pub fn summarize_g_scan(reports: &[SumReport], mode: GScanMode, threshold: f64) -> SumReport {
    let identity = match mode {
        GScanMode::Prime => "gbound.prime.summary",
        GScanMode::PrimeSquare => "gbound.prime_square.summary",
    };
    let scale = reports.iter().map(|r| r.scale).fold(0.0, f64::max);
    summarize_max(identity, reports, threshold, scale)
}

/// Ratio table `|intermediate_sum| / p^j` over χ primitive mod `p^k` and ψ of
/// conductor `p^j`, one record per distinct restriction of χ; with
/// `constant = Some(C)` each record asserts `|sum| ≤ C p^j`.
pub fn scan_intermediate(primes: &[u64], k: u32, j: u32, constant: Option<f64>) -> Result<Vec<SumReport>> {
    if !(1 <= j && j < k) {
        return domain(format!("need 1 ≤ j < k, got j = {j}, k = {k}"));
    }
    let identity = "conjecture.intermediate";
    let mut out = Vec::new();
    for &p in primes {
        if !is_prime(p) {
            return domain(format!("{p} is not prime"));
        }
        let q = p.pow(k);
        let pj = p.pow(j);
        let group = UnitGroup::new(q)?;
        let all = DirichletCharacter::all(&group);
        let psis: Vec<_> = all.iter().filter(|c| c.conductor() == pj).cloned().collect();
        // one representative χ per value of χ(1 + p^{k−j})
        let mut reps: Vec<DirichletCharacter> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for chi in all.iter().filter(|c| c.is_primitive()) {
            let key = chi.angle(1 + p.pow(k - j) as i64).expect("unit");
            if p == 2 || seen.insert(key) {
                reps.push(chi.clone());
            }
        }
        let tol = sum_tolerance((pj * pj) as f64, 1.0) / pj as f64;
        let rows: Result<Vec<Vec<SumReport>>> = reps
            .par_iter()
            .map(|chi| {
                psis.iter()
                    .map(|psi| {
                        let ratio = intermediate_sum(chi, psi)?.norm() / pj as f64;
                        let report = match constant {
                            Some(c) => SumReport::bound(identity, ratio, c, tol),
                            None => SumReport::finding(identity, Complex64::new(ratio, 0.0)),
                        };
                        Ok(report
                            .with_chi(chi)
                            .with_psi(psi)
                            .with_extra("p", p as f64)
                            .with_extra("k", k as f64)
                            .with_extra("j", j as f64))
                    })
                    .collect()
            })
            .collect();
        out.extend(rows?.into_iter().flatten());
    }
    sort_canonical(&mut out);
    Ok(out)
}
