//! The triple sum `G`, its reduction `H_χ`, the multiplicative Fourier
//! transform `Ĥ`, and the closed forms of `Ĥ` for prime-power moduli.

use num_complex::Complex64;

use crate::error::{domain, precondition, Result};
use crate::expsums::{additive_twist, gauss_sum, g_sum, intermediate_sum, ramanujan_mobius};
use crate::report::SumReport;
use crate::residues::arith::{divides_q_infinity, split_q_part, valuation};
use crate::residues::{
    e, gcd, lcm, mod_inv, reduce, sum_tolerance, CycloSum, DirichletCharacter, Factorization,
    RootTable, ZERO_VALUE,
};

/// Folds a histogram whose indices may run past `n` back onto `0..n`.
fn fold(wide: &[i64], n: u64) -> CycloSum {
    let mut acc = CycloSum::new(n);
    for (k, &c) in wide.iter().enumerate() {
        if c != 0 {
            acc.add_times(k as u64 % n, c);
        }
    }
    acc
}

/// `G(m1, m2, m3; c)` by the full quadruple sum. Only for very small `c`.
pub fn big_g_naive(chi: &DirichletCharacter, m1: i64, m2: i64, m3: i64, c: u64) -> Result<Complex64> {
    let q = chi.modulus();
    if c == 0 || c % q != 0 {
        return domain(format!("modulus {q} does not divide c = {c}"));
    }
    let n = lcm(chi.group().exponent(), c);
    let step = n / c;
    let chi_t = chi.table(n);
    let chibar_t = chi.conj().table(n);
    let at = |t: &crate::residues::AngleTable, x: u64| t.at((x % q) as usize);
    let (m1, m2, m3) = (reduce(m1, c), reduce(m2, c), reduce(m3, c));
    let mut wide = vec![0i64; 5 * n as usize];
    for y in 0..c {
        let Some(y_inv) = mod_inv(y as i64, c) else { continue };
        let chi_y = at(&chi_t, y);
        let chi_y2 = (2 * chi_y as u64) % n;
        for x1 in 0..c {
            let a1 = at(&chi_t, x1);
            if a1 == ZERO_VALUE {
                continue;
            }
            for x2 in 0..c {
                for x3 in 0..c {
                    let a23 = at(&chibar_t, x2 * x3 % c);
                    if a23 == ZERO_VALUE {
                        continue;
                    }
                    let phase = (m1 * x1 + m2 * x2 + m3 * x3 + x1 * y + x2 * x3 % c * y_inv) % c;
                    wide[(chi_y2 + a1 as u64 + a23 as u64 + phase * step) as usize] += 1;
                }
            }
        }
    }
    Ok(fold(&wide, n).value() / (c as f64).powi(3))
}

/// Tables of `A(n) = Σ_x χ(x) e_c(n x)` and its conjugate-character twin, for
/// evaluating `G(·; c)` in `O(c²)` per argument triple.
pub struct BigG {
    chi: DirichletCharacter,
    c: u64,
    a: Vec<Complex64>,
    abar: Vec<Complex64>,
    roots: RootTable,
}

impl BigG {
    pub fn new(chi: &DirichletCharacter, c: u64) -> Result<Self> {
        let q = chi.modulus();
        if c == 0 || c % q != 0 {
            return domain(format!("modulus {q} does not divide c = {c}"));
        }
        let n = lcm(chi.group().exponent(), c);
        let step = n / c;
        let tables = [chi.table(n), chi.conj().table(n)];
        let [a, abar] = tables.map(|t| {
            (0..c)
                .map(|k| {
                    let mut acc = CycloSum::new(n);
                    for x in 0..c {
                        let v = t.at((x % q) as usize);
                        if v != ZERO_VALUE {
                            acc.add((v as u64 + (k * x % c) * step) % n);
                        }
                    }
                    acc.value()
                })
                .collect::<Vec<_>>()
        });
        Ok(BigG { chi: chi.clone(), c, a, abar, roots: RootTable::new(c) })
    }

    pub fn eval(&self, m1: i64, m2: i64, m3: i64) -> Complex64 {
        let c = self.c;
        let q = self.chi.modulus() as i64;
        let (m1, m2, m3) = (reduce(m1, c), reduce(m2, c), reduce(m3, c));
        let chibar = self.chi.conj();
        let chibar_x: Vec<Complex64> = (0..c).map(|x| chibar.eval((x as i64) % q)).collect();
        let mut total = Complex64::new(0.0, 0.0);
        for y in 0..c {
            let Some(y_inv) = mod_inv(y as i64, c) else { continue };
            let a = self.a[((m1 + y) % c) as usize];
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let mut inner = Complex64::new(0.0, 0.0);
            for x3 in 0..c {
                let w = chibar_x[x3 as usize];
                if w.norm_sqr() == 0.0 {
                    continue;
                }
                inner += w * self.roots.get(m3 * x3 % c) * self.abar[((m2 + x3 * y_inv) % c) as usize];
            }
            let chi_y = self.chi.eval(y as i64 % q);
            total += chi_y * chi_y * a * inner;
        }
        total / (c as f64).powi(3)
    }
}

/// Precomputed character tables for `H_χ` and `Ĥ` at a fixed χ.
pub struct HKernel {
    chi: DirichletCharacter,
    q: u64,
    n: u64,
    chi_t: Vec<u32>,
    chibar_t: Vec<u32>,
    roots: RootTable,
}

impl HKernel {
    pub fn new(chi: &DirichletCharacter) -> Self {
        let q = chi.modulus();
        let n = lcm(chi.group().exponent(), q);
        HKernel {
            chi: chi.clone(),
            q,
            n,
            chi_t: chi.table(n).as_slice().to_vec(),
            chibar_t: chi.conj().table(n).as_slice().to_vec(),
            roots: RootTable::new(n),
        }
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.chi
    }

    /// Inner sums over `u` of `χ(t+m2u)χ̄(rt+m1m2)χ̄(u)χ(−m1+ru)`, one per `t`.
    fn rows(&self, m1: i64, m2: i64, r: i64) -> Vec<Complex64> {
        let q = self.q;
        let n = self.n as usize;
        let (m1, m2, r) = (reduce(m1, q), reduce(m2, q), reduce(r, q));
        // χ̄(u)χ(−m1+ru) does not depend on t
        let u_part: Vec<u32> = (0..q)
            .map(|u| {
                let a = self.chibar_t[u as usize];
                let b = self.chi_t[((r * u + q - m1) % q) as usize];
                if a == ZERO_VALUE || b == ZERO_VALUE {
                    ZERO_VALUE
                } else {
                    a + b
                }
            })
            .collect();
        let mut wide = vec![0i64; 3 * n];
        let mut out = Vec::with_capacity(q as usize);
        for t in 0..q {
            let y = self.chibar_t[((r * t + m1 * m2) % q) as usize];
            if y == ZERO_VALUE {
                out.push(Complex64::new(0.0, 0.0));
                continue;
            }
            wide.iter_mut().for_each(|w| *w = 0);
            let mut x = t;
            for &up in &u_part {
                let c1 = self.chi_t[x as usize];
                if up != ZERO_VALUE && c1 != ZERO_VALUE {
                    wide[(up + c1 + y) as usize % (3 * n)] += 1;
                }
                x += m2;
                if x >= q {
                    x -= q;
                }
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &c) in wide.iter().enumerate() {
                if c != 0 {
                    acc += self.roots.get(k as u64 % self.n) * c as f64;
                }
            }
            out.push(acc);
        }
        out
    }

    /// `H_χ(m1, m2, m3, r)` as exact root-of-unity multiplicities.
    pub fn h_exact(&self, m1: i64, m2: i64, m3: i64, r: i64) -> CycloSum {
        let q = self.q;
        let n = self.n;
        let step = n / q;
        let (m1, m2, m3, r) = (reduce(m1, q), reduce(m2, q), reduce(m3, q), reduce(r, q));
        let mut wide = vec![0i64; 5 * n as usize];
        let m1m2 = m1 * m2 % q;
        let phase_step = m3 * step;
        for u in 0..q {
            let a = self.chibar_t[u as usize];
            let b = self.chi_t[((r * u + q - m1) % q) as usize];
            if a == ZERO_VALUE || b == ZERO_VALUE {
                continue;
            }
            let base = (a + b) as u64;
            let mut x = m2 * u % q;
            let mut y = m1m2;
            let mut phase = 0u64;
            for _t in 0..q {
                let c1 = self.chi_t[x as usize];
                let c2 = self.chibar_t[y as usize];
                if c1 != ZERO_VALUE && c2 != ZERO_VALUE {
                    wide[(base + c1 as u64 + c2 as u64 + phase) as usize] += 1;
                }
                x += 1;
                if x == q {
                    x = 0;
                }
                y += r;
                if y >= q {
                    y -= q;
                }
                phase = (phase + phase_step) % n;
            }
        }
        fold(&wide, n)
    }

    pub fn h(&self, m1: i64, m2: i64, m3: i64, r: i64) -> Complex64 {
        self.h_exact(m1, m2, m3, r).value_with(&self.roots)
    }

    /// `Ĥ(ψ, χ, m1, m2, m3, r)` with the `v`-sum folded into the kernel
    /// `K(n) = Σ_v ψ̄(v) e_q(n v)`.
    pub fn h_hat(&self, psi: &DirichletCharacter, m1: i64, m2: i64, m3: i64, r: i64) -> Result<Complex64> {
        let q = self.q;
        if psi.modulus() != q {
            return domain(format!("ψ mod {} against χ mod {q}", psi.modulus()));
        }
        Ok(self.h_hat_with(&Self::psi_kernel(psi), m1, m2, m3, r))
    }

    /// `K(n) = Σ_v ψ̄(v) e_q(n v)` for `n mod q`.
    pub fn psi_kernel(psi: &DirichletCharacter) -> Vec<Complex64> {
        let psibar = psi.conj();
        (0..psi.modulus() as i64).map(|k| additive_twist(&psibar, k)).collect()
    }

    /// `Ĥ` against a kernel from [`HKernel::psi_kernel`].
    pub fn h_hat_with(&self, kernel: &[Complex64], m1: i64, m2: i64, m3: i64, r: i64) -> Complex64 {
        let q = self.q;
        let m3 = reduce(m3, q);
        self
            .rows(m1, m2, r)
            .iter()
            .enumerate()
            .map(|(t, w)| w * kernel[(m3 * t as u64 % q) as usize])
            .sum()
    }

    /// [`HKernel::h_hat_with`] for several kernels, sharing the row sums.
    pub fn h_hat_many(&self, kernels: &[Vec<Complex64>], m1: i64, m2: i64, m3: i64, r: i64) -> Vec<Complex64> {
        let q = self.q;
        let m3 = reduce(m3, q);
        let rows = self.rows(m1, m2, r);
        kernels
            .iter()
            .map(|k| rows.iter().enumerate().map(|(t, w)| w * k[(m3 * t as u64 % q) as usize]).sum())
            .collect()
    }

    /// `Ĥ(ψ)` for every ψ in `DirichletCharacter::all` order, through the values
    /// `H_χ(m1, m2, m3 v, r)` at the units `v`.
    pub fn h_hat_all(&self, psis: &[DirichletCharacter], m1: i64, m2: i64, m3: i64, r: i64) -> Vec<Complex64> {
        let q = self.q as i64;
        let units: Vec<i64> = (0..q).filter(|&v| gcd(v as u64, q as u64) == 1).collect();
        let hv: Vec<Complex64> = units.iter().map(|&v| self.h(m1, m2, m3 * v % q, r)).collect();
        psis.iter()
            .map(|psi| units.iter().zip(&hv).map(|(&v, h)| psi.eval(v).conj() * h).sum())
            .collect()
    }
}

/// `H_χ(m1, m2, m3, r) = Σ_{u,t} χ(t+m2u) χ̄(rt+m1m2) χ̄(u) χ(−m1+ru) e_q(m3 t)`.
pub fn h_chi(chi: &DirichletCharacter, m1: i64, m2: i64, m3: i64, r: i64) -> Complex64 {
    HKernel::new(chi).h(m1, m2, m3, r)
}

/// `Ĥ` by the full triple sum over `t, u, v`.
pub fn h_hat_naive(psi: &DirichletCharacter, chi: &DirichletCharacter, m1: i64, m2: i64, m3: i64, r: i64) -> Result<Complex64> {
    let q = chi.modulus();
    if psi.modulus() != q {
        return domain(format!("ψ mod {} against χ mod {q}", psi.modulus()));
    }
    let n = lcm(lcm(chi.group().exponent(), psi.group().exponent()), q);
    let step = n / q;
    let chi_t = chi.table(n);
    let chibar_t = chi.conj().table(n);
    let psibar_t = psi.conj().table(n);
    let (m1, m2, m3, r) = (reduce(m1, q), reduce(m2, q), reduce(m3, q), reduce(r, q));
    let mut wide = vec![0i64; 6 * n as usize];
    for t in 0..q {
        for u in 0..q {
            let parts = [
                chi_t.at(((t + m2 * u) % q) as usize),
                chibar_t.at(((r * t + m1 * m2) % q) as usize),
                chibar_t.at(u as usize),
                chi_t.at(((r * u + q - m1) % q) as usize),
            ];
            if parts.contains(&ZERO_VALUE) {
                continue;
            }
            let base: u64 = parts.iter().map(|&x| x as u64).sum();
            for v in 0..q {
                let pv = psibar_t.at(v as usize);
                if pv == ZERO_VALUE {
                    continue;
                }
                let phase = m3 * v % q * t % q;
                wide[(base + pv as u64 + phase * step) as usize] += 1;
            }
        }
    }
    Ok(fold(&wide, n).value())
}

/// `Ĥ` through the `O(q²)` kernel path.
pub fn h_hat(psi: &DirichletCharacter, chi: &DirichletCharacter, m1: i64, m2: i64, m3: i64, r: i64) -> Result<Complex64> {
    HKernel::new(chi).h_hat(psi, m1, m2, m3, r)
}

/// Tolerance for `Ĥ`: `q³` unimodular terms.
pub fn h_hat_tolerance(q: u64) -> f64 {
    sum_tolerance((q * q * q) as f64, 1.0)
}

/// Checks `δ_{(m1,r)=1} H_χ(m1,m2,m3,r) = c q G(m1,m2,m3;c) e_c(−m1m2m3) χ(−1)`, `c = q r`.
pub fn verify_gh_relation(g: &BigG, h: &HKernel, m1: i64, m2: i64, m3: i64, r: i64) -> Result<SumReport> {
    let chi = h.character();
    let q = chi.modulus();
    if r <= 0 {
        return domain(format!("r = {r} must be positive"));
    }
    let c = q * r as u64;
    if g.c != c || g.chi != *chi {
        return domain("G tables were built for a different χ or c");
    }
    let left = if gcd(m1.unsigned_abs(), r as u64) == 1 {
        h.h(m1, m2, m3, r)
    } else {
        Complex64::new(0.0, 0.0)
    };
    let phase = (reduce(m1, c) as u128 * reduce(m2, c) as u128 % c as u128 * reduce(m3, c) as u128 % c as u128) as f64;
    let right = g.eval(m1, m2, m3) * (c * q) as f64 * e(-phase / c as f64) * chi.eval(-1);
    let scale = sum_tolerance((q * q + c * c) as f64, 1.0);
    Ok(SumReport::identity("gh_relation", left, right, scale)
        .with_chi(chi)
        .with_m(&[m1, m2, m3])
        .with_r(r)
        .with_extra("c", c as f64))
}

/// Checks `(1/φ(q)) Σ_ψ Ĥ(ψ) ψ(w) = H_χ(m1, m2, m3 w, r)` with every `Ĥ(ψ)`
/// from the kernel path and the right side summed directly.
pub fn verify_fourier_inversion(
    h: &HKernel,
    psis: &[DirichletCharacter],
    hats: &[Complex64],
    m: [i64; 3],
    r: i64,
    w: i64,
) -> SumReport {
    let chi = h.character();
    let q = chi.modulus();
    let phi = psis.len() as f64;
    let left: Complex64 = psis.iter().zip(hats).map(|(psi, hat)| hat * psi.eval(w)).sum::<Complex64>() / phi;
    let right = h.h(m[0], m[1], m[2] * w, r);
    SumReport::identity("fourier_inversion", left, right, h_hat_tolerance(q))
        .with_chi(chi)
        .with_m(&m)
        .with_r(r)
        .with_extra("w", w as f64)
}

/// Checks `H_χ(m1, m2, m3, r) = H_χ(m1, m3, m2, r)`; χ must be primitive.
pub fn verify_h_swap(h: &HKernel, m: [i64; 3], r: i64) -> Result<SumReport> {
    let chi = h.character();
    if !chi.is_primitive() {
        return domain(format!("{chi:?} is not primitive"));
    }
    let q = chi.modulus();
    let left = h.h(m[0], m[1], m[2], r);
    let right = h.h(m[0], m[2], m[1], r);
    Ok(SumReport::identity("h_symmetry.swap", left, right, sum_tolerance((q * q) as f64, 1.0))
        .with_chi(chi)
        .with_m(&m)
        .with_r(r))
}

/// Checks `H_χ(m1, m2, m3, r) = H_χ̄(m2, m1, m3, r)` for `(q, r) = 1`; `hbar` is
/// the kernel of χ̄.
pub fn verify_h_conjugate(h: &HKernel, hbar: &HKernel, m: [i64; 3], r: i64) -> Result<SumReport> {
    let chi = h.character();
    let q = chi.modulus();
    if *hbar.character() != chi.conj() {
        return domain("second kernel is not built on χ̄");
    }
    if gcd(q, r.unsigned_abs()) != 1 {
        return domain(format!("r = {r} is not coprime to {q}"));
    }
    let left = h.h(m[0], m[1], m[2], r);
    let right = hbar.h(m[1], m[0], m[2], r);
    Ok(SumReport::identity("h_symmetry.conjugate", left, right, sum_tolerance((q * q) as f64, 1.0))
        .with_chi(chi)
        .with_m(&m)
        .with_r(r))
}

/// Which branch of the prime-power evaluation of `Ĥ` applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum HhatCase {
    /// ψ primitive mod `q`.
    PsiPrimitive,
    /// ψ principal.
    PsiTrivial,
    /// Conductor `p^j`, `1 ≤ j < k`, with `m1 m2 m3 r` prime to `p`.
    IntermediateUnits,
    /// Conductor `p^j`, `p | r` and `m1 = m2 = m3 = 1`.
    IntermediateR,
    /// Conductor `p^j`, `r = 1` and `p | m1 m2 m3`.
    IntermediateM,
    /// Conductor `p^j`, `p | r` and `p | m1 m2 m3`.
    IntermediateBoth,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedForm {
    pub case: HhatCase,
    pub value: Complex64,
    /// True when the branch forces `Ĥ = 0`.
    pub vanishes: bool,
}

/// `Ĥ(ψ, χ, m1, m2, m3, r)` for `q = p^k`, χ primitive, and `m1, m2, m3, r`
/// positive powers of `p` with `(m1, r) = 1`.
pub fn h_hat_closed_form(psi: &DirichletCharacter, chi: &DirichletCharacter, m1: i64, m2: i64, m3: i64, r: i64) -> Result<ClosedForm> {
    let q = chi.modulus();
    if psi.modulus() != q {
        return domain(format!("ψ mod {} against χ mod {q}", psi.modulus()));
    }
    let Some((p, k)) = Factorization::of(q)?.is_prime_power() else {
        return domain(format!("modulus {q} is not a prime power"));
    };
    if !chi.is_primitive() {
        return domain(format!("{chi:?} is not primitive"));
    }
    for (name, v) in [("m1", m1), ("m2", m2), ("m3", m3), ("r", r)] {
        if v <= 0 || !divides_q_infinity(v as u64, q) {
            return domain(format!("{name} = {v} is not a positive divisor of {q}^∞"));
        }
    }
    if gcd(m1 as u64, r as u64) != 1 {
        return domain(format!("(m1, r) = ({m1}, {r}) is not coprime"));
    }
    let zero = Complex64::new(0.0, 0.0);
    let vp = |x: i64| valuation(x as u64, p);
    let all_m_one = m1 == 1 && m2 == 1 && m3 == 1;
    let cond = psi.conductor();

    if cond == q {
        let value = if all_m_one && r == 1 {
            gauss_sum(&psi.conj()) * g_sum(chi, psi)?
        } else {
            zero
        };
        return Ok(ClosedForm { case: HhatCase::PsiPrimitive, value, vanishes: !(all_m_one && r == 1) });
    }
    if cond == 1 {
        let unit = |x: i64| if gcd(x as u64, q) == 1 { 1.0 } else { 0.0 };
        let qi = q as i64;
        let rm = |x: i64| ramanujan_mobius(q, x) as f64;
        let value = Complex64::new(unit(r) * rm(m1) * rm(m2) * rm(m3), 0.0)
            + chi.eval(-1) * (q as f64 * rm(r) * unit(m1 * m2 % qi * m3 % qi));
        return Ok(ClosedForm { case: HhatCase::PsiTrivial, value, vanishes: false });
    }

    let j = valuation(cond, p);
    let h = k - j;
    let tau = gauss_sum(&psi.primitivize()?.conj());
    let p_divides_r = r > 1;
    let p_divides_m = !all_m_one;
    Ok(match (p_divides_r, p_divides_m) {
        (false, false) => ClosedForm { case: HhatCase::IntermediateUnits, value: zero, vanishes: true },
        (true, false) => {
            if vp(r) == h {
                let value = tau * chi.eval(-1) * intermediate_sum(chi, psi)? * (p.pow(2 * h) as f64);
                ClosedForm { case: HhatCase::IntermediateR, value, vanishes: false }
            } else {
                ClosedForm { case: HhatCase::IntermediateR, value: zero, vanishes: true }
            }
        }
        (false, true) => {
            if [m1, m2, m3].iter().all(|&m| vp(m) == h) {
                let value = tau * intermediate_sum(chi, &psi.conj())? * (p.pow(3 * h) as f64);
                ClosedForm { case: HhatCase::IntermediateM, value, vanishes: false }
            } else {
                ClosedForm { case: HhatCase::IntermediateM, value: zero, vanishes: true }
            }
        }
        (true, true) => ClosedForm { case: HhatCase::IntermediateBoth, value: zero, vanishes: true },
    })
}

/// Checks `Ĥ(ψ,χ,a,b,c,d) = ε Ĥ(ψ1,χ1,a1,b1,c1,d1) Ĥ(ψ2,χ2,a2,b2,c2,d2)` for
/// `q = q1 q2` coprime, where `x_i` is the `q_i^∞`-part of `x` and
/// `ε = ψ1(a2 b2 c2 / (q2 d2)) ψ2(a1 b1 c1 / (q1 d1))`.
pub fn verify_crt_twist(
    q1: u64,
    psi: &DirichletCharacter,
    chi: &DirichletCharacter,
    args: [i64; 4],
) -> Result<SumReport> {
    let q = chi.modulus();
    if psi.modulus() != q {
        return domain(format!("ψ mod {} against χ mod {q}", psi.modulus()));
    }
    if q1 == 0 || q % q1 != 0 || gcd(q1, q / q1) != 1 {
        return domain(format!("{q1} is not a unitary divisor of {q}"));
    }
    let q2 = q / q1;
    for &x in &args {
        if x <= 0 || !divides_q_infinity(x as u64, q) {
            return domain(format!("argument {x} is not a positive divisor of {q}^∞"));
        }
    }
    let parts = |qi: u64| args.map(|x| split_q_part(x as u64, qi).0 as i64);
    let (p1, p2) = (parts(q1), parts(q2));
    let (chi1, chi2) = (chi.restrict(q1)?, chi.restrict(q2)?);
    let (psi1, psi2) = (psi.restrict(q1)?, psi.restrict(q2)?);

    let twist = |psi_i: &DirichletCharacter, qi: u64, other: [i64; 4], q_other: u64| -> Complex64 {
        let num = other[0] as i128 * other[1] as i128 % qi as i128 * other[2] as i128 % qi as i128;
        let den = (q_other as i128 * other[3] as i128 % qi as i128) as i64;
        let inv = mod_inv(den, qi).expect("coprime to the other factor") as i128;
        psi_i.eval((num * inv % qi as i128) as i64)
    };
    let eps = twist(&psi1, q1, p2, q2) * twist(&psi2, q2, p1, q1);
    let [a, b, c, d] = args;
    let left = h_hat_naive(psi, chi, a, b, c, d)?;
    let right = eps
        * h_hat_naive(&psi1, &chi1, p1[0], p1[1], p1[2], p1[3])?
        * h_hat_naive(&psi2, &chi2, p2[0], p2[1], p2[2], p2[3])?;
    let scale = sum_tolerance((q * q * q) as f64, 1.0);
    Ok(SumReport::identity("crt_twist", left, right, scale)
        .with_chi(chi)
        .with_psi(psi)
        .with_m(&args[..3])
        .with_r(d)
        .with_extra("q1", q1 as f64)
        .with_extra("eps_re", eps.re)
        .with_extra("eps_im", eps.im))
}

/// `q^{-1} (m1,q)(m2,q)(m3,q) d(q)³` with `(0, q) = q`.
pub fn zero_bound_shape(q: u64, m: [i64; 3]) -> f64 {
    let d = Factorization::of(q).map(|f| f.divisor_count()).unwrap_or(1) as f64;
    let g: f64 = m.iter().map(|&x| gcd(x.unsigned_abs(), q) as f64).product();
    g * d.powi(3) / q as f64
}

/// κ for [`h_chi_zero_bound`]: the largest `|H_χ| / zero_bound_shape` over
/// primitive χ mod `q ≤ 25`, `m` with a zero entry and `1 ≤ r ≤ q` is 1/8.
pub const ZERO_BOUND_KAPPA: f64 = 0.125;

/// Checks `|H_χ(m1,m2,m3,r)| ≤ κ q^{-1} (m1,q)(m2,q)(m3,q) d(q)³` when some `m_j = 0`.
pub fn h_chi_zero_bound(h: &HKernel, m: [i64; 3], r: i64, kappa: f64) -> Result<SumReport> {
    if m.iter().product::<i64>() != 0 {
        return precondition(format!("m1 m2 m3 = {} is not zero", m.iter().product::<i64>()));
    }
    let chi = h.character();
    let q = chi.modulus();
    let observed = h.h(m[0], m[1], m[2], r).norm();
    let bound = kappa * zero_bound_shape(q, m);
    Ok(SumReport::bound("h_zero_bound", observed, bound, sum_tolerance((q * q) as f64, 1.0))
        .with_chi(chi)
        .with_m(&m)
        .with_r(r)
        .with_extra("kappa", kappa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residues::UnitGroup;

    fn chars(q: u64) -> Vec<DirichletCharacter> {
        DirichletCharacter::all(&UnitGroup::new(q).unwrap())
    }

    fn primitive(q: u64) -> Vec<DirichletCharacter> {
        chars(q).into_iter().filter(|c| c.is_primitive()).collect()
    }

    /// `H_χ` from its definition, term by term in floating point.
    fn h_direct(chi: &DirichletCharacter, m1: i64, m2: i64, m3: i64, r: i64) -> Complex64 {
        let q = chi.modulus() as i64;
        let mut s = Complex64::new(0.0, 0.0);
        for u in 0..q {
            for t in 0..q {
                s += chi.eval(t + m2 * u)
                    * chi.eval(r * t + m1 * m2).conj()
                    * chi.eval(u).conj()
                    * chi.eval(-m1 + r * u)
                    * e((m3 * t) as f64 / q as f64);
            }
        }
        s
    }

    #[test]
    fn h_matches_definition() {
        for q in [5u64, 8, 9, 12] {
            for chi in chars(q).iter().take(6) {
                for (m1, m2, m3, r) in [(1, 1, 1, 1), (0, 2, 3, 1), (2, -1, 4, 3), (3, 3, 0, 2)] {
                    let a = h_chi(chi, m1, m2, m3, r);
                    let b = h_direct(chi, m1, m2, m3, r);
                    assert!((a - b).norm() < 1e-10, "{chi:?} {:?}", (m1, m2, m3, r));
                }
            }
        }
    }

    #[test]
    fn big_g_paths_agree() {
        for (q, r) in [(3u64, 1i64), (4, 1), (5, 1), (3, 2), (5, 2), (4, 3), (3, 3)] {
            let c = q * r as u64;
            for chi in primitive(q) {
                let g = BigG::new(&chi, c).unwrap();
                for (m1, m2, m3) in [(1, 1, 1), (0, 1, 2), (2, 3, 1), (3, 0, 0), (-1, 2, 5)] {
                    let a = g.eval(m1, m2, m3);
                    let b = big_g_naive(&chi, m1, m2, m3, c).unwrap();
                    assert!((a - b).norm() < 1e-10, "q={q} r={r} {:?}: {a} vs {b}", (m1, m2, m3));
                    let sym = g.eval(m1, m3, m2);
                    assert!((a - sym).norm() < 1e-10);
                }
            }
        }
        let chi = primitive(5).remove(0);
        assert!(big_g_naive(&chi, 1, 1, 1, 7).is_err());
        assert!(BigG::new(&chi, 12).is_err());
    }

    #[test]
    fn gh_relation_small() {
        for (q, r, m) in [(5u64, 1i64, [1i64, 1, 1]), (5, 5, [5, 1, 1]), (9, 2, [1, 2, 3]), (7, 3, [3, 2, 2]), (8, 2, [1, 1, 0])] {
            for chi in primitive(q) {
                let g = BigG::new(&chi, q * r as u64).unwrap();
                let h = HKernel::new(&chi);
                let rep = verify_gh_relation(&g, &h, m[0], m[1], m[2], r).unwrap();
                assert!(rep.pass, "{rep:?}");
                if gcd(m[0] as u64, r as u64) > 1 {
                    assert!(rep.right.norm() < rep.scale);
                }
            }
        }
    }

    #[test]
    fn h_hat_paths_agree() {
        for q in [5u64, 8, 9, 12] {
            let all = chars(q);
            for chi in all.iter().filter(|c| c.is_primitive() || q == 12).take(3) {
                let kernel = HKernel::new(chi);
                for (m1, m2, m3, r) in [(1, 1, 1, 1), (2, 1, 3, 1), (1, 3, 3, 3), (0, 1, 2, 2)] {
                    let batch = kernel.h_hat_all(&all, m1, m2, m3, r);
                    for (psi, b) in all.iter().zip(&batch) {
                        let naive = h_hat_naive(psi, chi, m1, m2, m3, r).unwrap();
                        let fast = kernel.h_hat(psi, m1, m2, m3, r).unwrap();
                        assert!((naive - fast).norm() < 1e-9, "{chi:?} {psi:?}");
                        assert!((naive - b).norm() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn h_symmetries() {
        // the m2 <-> m3 swap comes through G and needs χ primitive
        for q in [5u64, 7, 8, 9, 12, 15, 16, 20, 21, 25] {
            for chi in chars(q).iter().step_by(3) {
                let hk = HKernel::new(chi);
                let hb = HKernel::new(&chi.conj());
                for m1 in 0..q as i64 {
                    for (m2, m3, r) in [(1i64, 2i64, 1i64), (3, 0, 2), (q as i64 - 1, 4, 3), (2, 5, 4)] {
                        let a = hk.h(m1, m2, m3, r);
                        if chi.is_primitive() {
                            assert!((a - hk.h(m1, m3, m2, r)).norm() < 1e-9, "q={q} {:?}", (m1, m2, m3, r));
                        }
                        if gcd(q, r as u64) == 1 {
                            assert!((a - hb.h(m2, m1, m3, r)).norm() < 1e-9, "q={q} {:?}", (m1, m2, m3, r));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn swap_fails_for_principal() {
        let chi = primitive(5).remove(0);
        let principal = DirichletCharacter::principal(chi.group().clone());
        let h0 = HKernel::new(&principal);
        assert!((h0.h(1, 3, 0, 2) - h0.h(1, 0, 3, 2)).norm() > 1e-6);
    }

    #[test]
    fn closed_form_trivial_psi_q_prime() {
        for p in [5u64, 7] {
            for chi in primitive(p) {
                let psi0 = DirichletCharacter::principal(chi.group().clone());
                let cf = h_hat_closed_form(&psi0, &chi, 1, 1, 1, 1).unwrap();
                let expect = Complex64::new(-1.0, 0.0) - chi.eval(-1) * p as f64;
                assert!((cf.value - expect).norm() < 1e-12);
                let brute = h_hat_naive(&psi0, &chi, 1, 1, 1, 1).unwrap();
                assert!((brute - expect).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn closed_form_psi_primitive_q5() {
        let all = chars(5);
        for chi in all.iter().filter(|c| c.is_primitive()) {
            for psi in all.iter().filter(|c| c.is_primitive()) {
                let cf = h_hat_closed_form(psi, chi, 1, 1, 1, 1).unwrap();
                let expect = gauss_sum(&psi.conj()) * g_sum(chi, psi).unwrap();
                assert!((cf.value - expect).norm() < 1e-10);
                assert!((h_hat_naive(psi, chi, 1, 1, 1, 1).unwrap() - expect).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn closed_form_guards() {
        let chi = primitive(9).remove(0);
        let psi = chi.clone();
        assert!(h_hat_closed_form(&psi, &chi, 2, 1, 1, 1).is_err());
        assert!(h_hat_closed_form(&psi, &chi, 3, 1, 1, 3).is_err());
        assert!(h_hat_closed_form(&psi, &chi, 0, 1, 1, 1).is_err());
        let imprim = chars(9).into_iter().find(|c| c.conductor() == 3).unwrap();
        assert!(h_hat_closed_form(&psi, &imprim, 1, 1, 1, 1).is_err());
    }

    #[test]
    fn intermediate_vanishing_for_r_p_squared() {
        // q = p², conductor p: r = p is allowed to be nonzero, r = p² must vanish
        let all = chars(9);
        for chi in all.iter().filter(|c| c.is_primitive()) {
            for psi in all.iter().filter(|c| c.conductor() == 3) {
                let a = h_hat_closed_form(psi, chi, 1, 1, 1, 9).unwrap();
                assert!(a.vanishes);
                assert!(h_hat_naive(psi, chi, 1, 1, 1, 9).unwrap().norm() < 1e-9);
                let b = h_hat_closed_form(psi, chi, 1, 1, 1, 3).unwrap();
                let brute = h_hat_naive(psi, chi, 1, 1, 1, 3).unwrap();
                assert!((b.value - brute).norm() < 1e-9, "{chi:?} {psi:?}: {} vs {brute}", b.value);
                let c = h_hat_closed_form(psi, chi, 3, 3, 3, 1).unwrap();
                let brute = h_hat_naive(psi, chi, 3, 3, 3, 1).unwrap();
                assert!((c.value - brute).norm() < 1e-9, "{chi:?} {psi:?}: {} vs {brute}", c.value);
            }
        }
    }

    #[test]
    fn crt_examples() {
        let g = UnitGroup::new(15).unwrap();
        let all = DirichletCharacter::all(&g);
        for chi in all.iter().step_by(2) {
            for psi in all.iter().step_by(3) {
                for args in [[1, 1, 1, 1], [3, 5, 1, 1], [9, 1, 5, 3], [1, 25, 3, 5]] {
                    let rep = verify_crt_twist(3, psi, chi, args).unwrap();
                    assert!(rep.pass, "{rep:?}");
                }
                let rep = verify_crt_twist(1, psi, chi, [3, 5, 1, 1]).unwrap();
                assert!(rep.pass);
                assert_eq!((rep.extra["eps_re"], rep.extra["eps_im"]), (1.0, 0.0));
            }
        }
        let chi = all[0].clone();
        assert!(verify_crt_twist(5, &chi, &chi, [1, 2, 1, 1]).is_err());
        let g45 = UnitGroup::new(45).unwrap();
        let c45 = DirichletCharacter::principal(g45);
        assert!(verify_crt_twist(3, &c45, &c45, [1, 1, 1, 1]).is_err());
    }

    #[test]
    fn zero_bound_precondition() {
        let h = HKernel::new(&primitive(5)[0]);
        assert!(h_chi_zero_bound(&h, [1, 1, 1], 1, 1.0).is_err());
        assert!(h_chi_zero_bound(&h, [0, 1, 1], 1, 1.0).is_ok());
        for chi in primitive(5) {
            let rep = h_chi_zero_bound(&HKernel::new(&chi), [0, 1, 1], 1, ZERO_BOUND_KAPPA).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
        assert_eq!(zero_bound_shape(5, [0, 0, 0]), 125.0 * 8.0 / 5.0);
    }
}
