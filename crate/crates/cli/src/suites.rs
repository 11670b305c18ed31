//! Seeded identity grids. `verify` runs them at configurable size and the
//! acceptance tests at their fixed size.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use charsum::hsums::{
    h_hat_closed_form, h_hat_tolerance, verify_crt_twist, verify_fourier_inversion, verify_gh_relation,
    verify_h_conjugate, verify_h_swap, BigG, HKernel,
};
use charsum::residues::arith::q_infinity_divisors;
use charsum::residues::{gcd, DirichletCharacter, Factorization, UnitGroup};
use charsum::{Result, SumReport};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// One stream per (seed, tag), independent of scheduling.
pub fn rng_for(seed: u64, tag: &[u64]) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    for (i, t) in tag.iter().take(3).enumerate() {
        key[8 * (i + 1)..8 * (i + 2)].copy_from_slice(&t.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Running outcome of a suite: counts, failures, the worst record, and
/// optionally every record.
#[derive(Clone, Debug)]
pub struct Tally {
    pub suite: String,
    pub q: u64,
    pub count: usize,
    pub failures: Vec<SumReport>,
    pub worst: Option<SumReport>,
    pub records: Vec<SumReport>,
    /// Records per identity name.
    pub by_identity: BTreeMap<String, usize>,
    keep: bool,
    tol: Option<f64>,
}

fn badness(r: &SumReport) -> f64 {
    if r.scale > 0.0 {
        r.residual / r.scale
    } else if r.residual > 0.0 || !r.residual.is_finite() {
        f64::INFINITY
    } else {
        0.0
    }
}

fn worse(a: &SumReport, b: &SumReport) -> Ordering {
    badness(a).total_cmp(&badness(b)).then_with(|| b.canonical_cmp(a))
}

/// Replaces the scale of an asserting record by `tol`.
pub fn override_tolerance(r: &mut SumReport, tol: f64) {
    r.scale = tol;
    r.pass = r.residual.is_finite() && r.residual <= tol;
}

impl Tally {
    pub fn new(suite: &str, q: u64, keep: bool, tol: Option<f64>) -> Self {
        Tally {
            suite: suite.to_string(),
            q,
            count: 0,
            failures: Vec::new(),
            worst: None,
            records: Vec::new(),
            by_identity: BTreeMap::new(),
            keep,
            tol,
        }
    }

    fn empty_like(&self) -> Self {
        Tally::new(&self.suite, self.q, self.keep, self.tol)
    }

    pub fn push(&mut self, mut r: SumReport) {
        if let Some(tol) = self.tol {
            override_tolerance(&mut r, tol);
        }
        self.count += 1;
        *self.by_identity.entry(r.identity.clone()).or_default() += 1;
        if !r.pass {
            self.failures.push(r.clone());
        }
        if self.worst.as_ref().map_or(true, |w| worse(&r, w).is_gt()) {
            self.worst = Some(r.clone());
        }
        if self.keep {
            self.records.push(r);
        }
    }

    /// Order-preserving and associative, so any split of the work merges to
    /// the same tally.
    pub fn merge(mut self, other: Tally) -> Tally {
        self.count += other.count;
        for (k, n) in other.by_identity {
            *self.by_identity.entry(k).or_default() += n;
        }
        self.failures.extend(other.failures);
        self.records.extend(other.records);
        self.worst = match (self.worst, other.worst) {
            (Some(a), Some(b)) => Some(if worse(&b, &a).is_gt() { b } else { a }),
            (a, b) => a.or(b),
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// `left` is the worst residual in units of its scale; passes when every
    /// record passed.
    pub fn summary(&self) -> SumReport {
        let identity = format!("{}.summary", self.suite);
        let mut s = match &self.worst {
            Some(w) => {
                let mut s = SumReport::bound(&identity, badness(w), 1.0, 0.0);
                s.chi = w.chi.clone();
                s.psi = w.psi.clone();
                s.m = w.m.clone();
                s.r = w.r;
                s.extra = w.extra.clone();
                s.with_extra("max_residual", w.residual)
            }
            None => SumReport::bound(&identity, 0.0, 1.0, 0.0),
        };
        s.q = self.q;
        s.pass = self.passed();
        s.with_extra("count", self.count as f64).with_extra("failures", self.failures.len() as f64)
    }
}

fn tally_par<T: Sync>(
    proto: &Tally,
    items: &[T],
    f: impl Fn(&T, &mut Tally) -> Result<()> + Sync,
) -> Result<Tally> {
    items
        .par_iter()
        .map(|item| {
            let mut t = proto.empty_like();
            f(item, &mut t).map(|_| t)
        })
        .try_reduce(|| proto.empty_like(), |a, b| Ok(a.merge(b)))
}

fn group(q: u64) -> Result<std::sync::Arc<UnitGroup>> {
    UnitGroup::new(q)
}

/// `δ H_χ = c q G e_c(−m1m2m3) χ(−1)` on `per_r` random tuples for each `r`,
/// with χ primitive and `m_i ∈ [−c, c]`, `c = q r`.
pub fn gh_relation(q: u64, rs: &[i64], per_r: usize, seed: u64, keep: bool, tol: Option<f64>) -> Result<Tally> {
    let prims = DirichletCharacter::primitive(&group(q)?);
    let proto = Tally::new("gh_relation", q, keep, tol);
    if prims.is_empty() {
        return Ok(proto);
    }
    let mut total = proto.empty_like();
    for &r in rs {
        let c = q * r as u64;
        let mut rng = rng_for(seed, &[1, q, r as u64]);
        let ci = c as i64;
        let tuples: Vec<(usize, [i64; 3])> = (0..per_r)
            .map(|_| (rng.gen_range(0..prims.len()), [(); 3].map(|_| rng.gen_range(-ci..=ci))))
            .collect();
        let kernels: Vec<(BigG, HKernel)> = prims
            .par_iter()
            .map(|chi| Ok((BigG::new(chi, c)?, HKernel::new(chi))))
            .collect::<Result<_>>()?;
        let t = tally_par(&proto, &tuples, |(i, m), t| {
            let (g, h) = &kernels[*i];
            t.push(verify_gh_relation(g, h, m[0], m[1], m[2], r)?);
            Ok(())
        })?;
        total = total.merge(t);
    }
    Ok(total)
}

/// `(1/φ(q)) Σ_ψ Ĥ(ψ) ψ(w) = H_χ(m1, m2, m3 w, r)` for primitive χ, every
/// `m_i, r | q^∞` up to `cap` and every unit `w`.
pub fn fourier_inversion(q: u64, cap: u64, keep: bool, tol: Option<f64>) -> Result<Tally> {
    let g = group(q)?;
    let psis = DirichletCharacter::all(&g);
    let kernels: Vec<Vec<Complex64>> = psis.iter().map(HKernel::psi_kernel).collect();
    let units: Vec<i64> = g.units().map(|u| u as i64).collect();
    let divs = q_infinity_divisors(q, cap);
    let mut tuples = Vec::new();
    for &a in &divs {
        for &b in &divs {
            for &c in &divs {
                for &d in &divs {
                    tuples.push([a, b, c, d].map(|x| x as i64));
                }
            }
        }
    }
    let proto = Tally::new("fourier_inversion", q, keep, tol);
    let mut total = proto.empty_like();
    for chi in DirichletCharacter::primitive(&g) {
        let h = HKernel::new(&chi);
        let t = tally_par(&proto, &tuples, |&[m1, m2, m3, r], t| {
            let hats = h.h_hat_many(&kernels, m1, m2, m3, r);
            for &w in &units {
                t.push(verify_fourier_inversion(&h, &psis, &hats, [m1, m2, m3], r, w));
            }
            Ok(())
        })?;
        total = total.merge(t);
    }
    Ok(total)
}

/// Both symmetries of `H_χ` on `per_chi` random tuples for every χ: the
/// `m2 ↔ m3` swap for primitive χ and `(χ, m1, m2) ↔ (χ̄, m2, m1)` when
/// `(q, r) = 1`.
pub fn symmetries(q: u64, per_chi: usize, seed: u64, keep: bool, tol: Option<f64>) -> Result<Tally> {
    let all = DirichletCharacter::all(&group(q)?);
    let qi = q as i64;
    let proto = Tally::new("h_symmetry", q, keep, tol);
    let indexed: Vec<(usize, &DirichletCharacter)> = all.iter().enumerate().collect();
    tally_par(&proto, &indexed, |(i, chi), t| {
        let mut rng = rng_for(seed, &[3, q, *i as u64]);
        let h = HKernel::new(chi);
        let hbar = HKernel::new(&chi.conj());
        for _ in 0..per_chi {
            let m = [(); 3].map(|_| rng.gen_range(0..qi));
            let r = rng.gen_range(1..=2 * qi);
            if chi.is_primitive() {
                t.push(verify_h_swap(&h, m, r)?);
            }
            if gcd(q, r as u64) == 1 {
                t.push(verify_h_conjugate(&h, &hbar, m, r)?);
            }
        }
        Ok(())
    })
}

/// The prime-power closed form of `Ĥ` against the direct sum, for every
/// primitive χ, every ψ, and `m_i, r` powers of `p` up to `cap` with
/// `(m1, r) = 1`. Forced zeros are recorded as `closed_form.vanishing`.
/// Moduli that are not prime powers give an empty tally.
pub fn closed_forms(q: u64, cap: u64, keep: bool, tol: Option<f64>) -> Result<Tally> {
    let proto = Tally::new("closed_form", q, keep, tol);
    if Factorization::of(q)?.is_prime_power().is_none() {
        return Ok(proto);
    }
    let g = group(q)?;
    let psis = DirichletCharacter::all(&g);
    let divs: Vec<i64> = q_infinity_divisors(q, cap).into_iter().map(|x| x as i64).collect();
    let mut tuples = Vec::new();
    for &m1 in &divs {
        for &r in divs.iter().filter(|&&r| gcd(m1 as u64, r as u64) == 1) {
            for &m2 in &divs {
                for &m3 in &divs {
                    tuples.push([m1, m2, m3, r]);
                }
            }
        }
    }
    let scale = h_hat_tolerance(q);
    let prims = DirichletCharacter::primitive(&g);
    tally_par(&proto, &prims, |chi, t| {
        let h = HKernel::new(chi);
        // Ĥ only sees the residues mod q
        let mut direct: HashMap<[u64; 4], Vec<Complex64>> = HashMap::new();
        for &[m1, m2, m3, r] in &tuples {
            let key = [m1, m2, m3, r].map(|x| x as u64 % q);
            let hats = direct.entry(key).or_insert_with(|| h.h_hat_all(&psis, m1, m2, m3, r));
            for (psi, hat) in psis.iter().zip(hats.iter()) {
                let cf = h_hat_closed_form(psi, chi, m1, m2, m3, r)?;
                let (identity, right) = if cf.vanishes {
                    ("closed_form.vanishing", Complex64::new(0.0, 0.0))
                } else {
                    ("closed_form", cf.value)
                };
                t.push(
                    SumReport::identity(identity, *hat, right, scale)
                        .with_chi(chi)
                        .with_psi(psi)
                        .with_m(&[m1, m2, m3])
                        .with_r(r)
                        .with_extra("case", cf.case as u8 as f64),
                );
            }
        }
        Ok(())
    })
}

/// Unitary divisors `q1` of `q` (`gcd(q1, q/q1) = 1`), including 1 and `q`.
pub fn unitary_divisors(q: u64) -> Result<Vec<u64>> {
    let f = Factorization::of(q)?;
    let mut out = vec![1u64];
    for &(p, e) in f.factors() {
        let pe = p.pow(e);
        let more: Vec<u64> = out.iter().map(|d| d * pe).collect();
        out.extend(more);
    }
    out.sort_unstable();
    Ok(out)
}

/// `Ĥ(ψ, χ, ·) = ε Ĥ(ψ1, χ1, ·) Ĥ(ψ2, χ2, ·)` on `tuples` random
/// `(χ, ψ, m1, m2, m3, r)` with arguments `| q^∞` up to `q²`, each checked
/// against every unitary split of `q`. Prime powers give an empty tally.
pub fn crt_twists(q: u64, tuples: usize, seed: u64, keep: bool, tol: Option<f64>) -> Result<Tally> {
    let proto = Tally::new("crt_twist", q, keep, tol);
    if Factorization::of(q)?.factors().len() < 2 {
        return Ok(proto);
    }
    let all = DirichletCharacter::all(&group(q)?);
    let divs: Vec<i64> = q_infinity_divisors(q, q * q).into_iter().map(|x| x as i64).collect();
    let splits = unitary_divisors(q)?;
    let mut rng = rng_for(seed, &[5, q]);
    let grid: Vec<(usize, usize, [i64; 4])> = (0..tuples)
        .map(|_| {
            let chi = rng.gen_range(0..all.len());
            let psi = rng.gen_range(0..all.len());
            (chi, psi, [(); 4].map(|_| *divs.choose(&mut rng).expect("1 divides")))
        })
        .collect();
    tally_par(&proto, &grid, |(chi, psi, args), t| {
        for &q1 in &splits {
            t.push(verify_crt_twist(q1, &all[*psi], &all[*chi], *args)?);
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_merge_is_split_independent() {
        let reps: Vec<SumReport> = (0..7)
            .map(|i| {
                SumReport::identity("x", Complex64::new(i as f64 * 1e-12, 0.0), Complex64::new(0.0, 0.0), 1e-11)
                    .with_q(5)
                    .with_r(i)
            })
            .collect();
        let proto = Tally::new("x", 5, true, None);
        let mut whole = proto.empty_like();
        reps.iter().cloned().for_each(|r| whole.push(r));
        let mut a = proto.empty_like();
        let mut b = proto.empty_like();
        reps[..3].iter().cloned().for_each(|r| a.push(r));
        reps[3..].iter().cloned().for_each(|r| b.push(r));
        let split = a.merge(b);
        assert_eq!(whole.summary(), split.summary());
        assert_eq!(whole.records, split.records);
        assert_eq!(whole.failures.len(), 0);
        assert_eq!(whole.worst.unwrap().r, 6);
    }

    #[test]
    fn tolerance_override_applies() {
        let mut t = Tally::new("x", 5, false, Some(1e-15));
        t.push(SumReport::identity("x", Complex64::new(1e-12, 0.0), Complex64::new(0.0, 0.0), 1e-9));
        assert!(!t.passed());
    }

    #[test]
    fn unitary_splits() {
        assert_eq!(unitary_divisors(45).unwrap(), vec![1, 5, 9, 45]);
        assert_eq!(unitary_divisors(7).unwrap(), vec![1, 7]);
    }

    #[test]
    fn small_suites_pass() {
        for q in [5u64, 15] {
            assert!(gh_relation(q, &[1, 3], 5, 1, false, None).unwrap().passed());
            assert!(symmetries(q, 3, 1, false, None).unwrap().passed());
            assert!(crt_twists(q, 3, 1, false, None).unwrap().passed());
        }
        let t = closed_forms(9, 9, false, None).unwrap();
        assert!(t.passed() && t.count > 0);
        assert_eq!(closed_forms(15, 15, false, None).unwrap().count, 0);
    }
}
