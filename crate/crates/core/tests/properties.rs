use charsum::expsums::{gauss_sum, ramanujan_mobius, ramanujan_sum};
use charsum::hsums::{h_hat_naive, HKernel};
use charsum::lfunc::{dirichlet_l, hurwitz_zeta, v_weight, VWeightParams};
use charsum::report::SumReport;
use charsum::residues::{gcd, DirichletCharacter, UnitGroup};
use charsum::zseries::product_certificate;
use num_complex::Complex64;
use proptest::prelude::*;

fn character(q: u64, pick: usize) -> DirichletCharacter {
    let all = DirichletCharacter::all(&UnitGroup::new(q).unwrap());
    all[pick % all.len()].clone()
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..1e6f64, -1.0..1.0f64, Just(0.0), any::<f64>().prop_filter("finite", |x| x.is_finite())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn multiplicative_and_periodic(q in 1u64..400, pick in any::<usize>(), a in -5000i64..5000, b in -5000i64..5000) {
        let chi = character(q, pick);
        prop_assert!((chi.eval(a * b) - chi.eval(a) * chi.eval(b)).norm() < 1e-12);
        prop_assert!((chi.eval(a + q as i64) - chi.eval(a)).norm() < 1e-12);
        let unit = gcd(a.unsigned_abs(), q) == 1;
        prop_assert_eq!(chi.eval(a).norm() > 0.5, unit);
        prop_assert!((chi.conj().eval(a) - chi.eval(a).conj()).norm() < 1e-12);
    }

    #[test]
    fn conductor_survives_induction(q in 1u64..120, pick in any::<usize>(), m in 1u64..6) {
        let chi = character(q, pick);
        let lifted = chi.induce(q * m).unwrap();
        prop_assert_eq!(lifted.conductor(), chi.conductor());
        prop_assert_eq!(q % chi.conductor(), 0);
        prop_assert!(chi.primitivize().unwrap().is_primitive());
        prop_assert!(chi.same_primitive(&lifted).unwrap());
    }

    #[test]
    fn gauss_sum_modulus(q in 3u64..300, pick in any::<usize>()) {
        let chi = character(q, pick);
        if chi.is_primitive() {
            prop_assert!((gauss_sum(&chi).norm_sqr() - q as f64).abs() <= 1e-8 * q as f64);
        }
    }

    #[test]
    fn ramanujan_formula(q in 1u64..500, n in -2000i64..2000) {
        prop_assert!((ramanujan_sum(q, n) - ramanujan_mobius(q, n) as f64).abs() <= 1e-9 * q as f64);
    }

    #[test]
    fn h_symmetries(q in 3u64..30, pick in any::<usize>(), m1 in 0i64..60, m2 in 0i64..60, m3 in 0i64..60, r in 1i64..60) {
        let chi = character(q, pick);
        let h = HKernel::new(&chi);
        let a = h.h(m1, m2, m3, r);
        let tol = 1e-10 * (q * q) as f64;
        if chi.is_primitive() {
            prop_assert!((a - h.h(m1, m3, m2, r)).norm() <= tol);
        }
        if gcd(q, r as u64) == 1 {
            prop_assert!((a - HKernel::new(&chi.conj()).h(m2, m1, m3, r)).norm() <= tol);
        }
        // H only sees residues mod q
        let qi = q as i64;
        prop_assert!((a - h.h(m1 + qi, m2 - 2 * qi, m3 + 3 * qi, r + qi)).norm() <= tol);
    }

    #[test]
    fn transform_paths_agree(q in 3u64..16, pick in any::<usize>(), psi_pick in any::<usize>(), m in prop::array::uniform3(0i64..40), r in 1i64..40) {
        let chi = character(q, pick);
        let psi = character(q, psi_pick);
        let fast = HKernel::new(&chi).h_hat(&psi, m[0], m[1], m[2], r).unwrap();
        let naive = h_hat_naive(&psi, &chi, m[0], m[1], m[2], r).unwrap();
        prop_assert!((fast - naive).norm() <= 1e-10 * (q * q * q) as f64);
    }

    #[test]
    fn schwarz_reflection(q in 3u64..40, pick in any::<usize>(), re in -1.0..3.0f64, im in -10.0..10.0f64) {
        let chi = character(q, pick);
        let s = Complex64::new(re, im);
        prop_assume!(!chi.is_principal() || (s - 1.0).norm() > 1e-3);
        let a = dirichlet_l(s.conj(), &chi.conj()).unwrap().value;
        let b = dirichlet_l(s, &chi).unwrap().value;
        prop_assert!((a - b.conj()).norm() <= 1e-10 * b.norm().max(1.0));
    }

    #[test]
    fn hurwitz_duplication(re in -1.0..4.0f64, im in -8.0..8.0f64, a in 0.05..1.0f64) {
        let s = Complex64::new(re, im);
        prop_assume!((s - 1.0).norm() > 1e-3);
        let z = hurwitz_zeta(s, a).unwrap();
        let half = hurwitz_zeta(s, a / 2.0).unwrap();
        let half_shift = hurwitz_zeta(s, (a + 1.0) / 2.0).unwrap();
        // duplication: ζ(s, a/2) + ζ(s, (a+1)/2) = 2^s ζ(s, a)
        let two_s = Complex64::new(2.0, 0.0).powc(s);
        prop_assert!((half + half_shift - two_s * z).norm() <= 1e-9 * (two_s * z).norm().max(1.0));
    }

    #[test]
    fn v_weight_even_and_bounded(j in 1u8..=2, delta in 0u8..=1, y in 0.05..50.0f64, t in -8.0..8.0f64) {
        let p = VWeightParams::new(j, delta);
        let a = v_weight(&p, y, Complex64::new(t, 0.0)).unwrap();
        let b = v_weight(&p, y, Complex64::new(-t, 0.0)).unwrap();
        prop_assert!((a - b).norm() <= 1e-8);
        prop_assert!(a.im.abs() <= 1e-8);
    }

    #[test]
    fn certificate_covers_perturbations(x in prop::collection::vec(0.1..5.0f64, 1..5), frac in 0.0..1.0f64, seed in any::<u64>()) {
        let e: Vec<f64> = x.iter().map(|v| v * 1e-3).collect();
        let cert = product_certificate(&x, &e);
        prop_assert!(cert >= 0.0);
        let mut s = seed;
        let perturbed: f64 = x
            .iter()
            .zip(&e)
            .map(|(v, err)| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let sign = if s >> 63 == 0 { 1.0 } else { -1.0 };
                v + sign * frac * err
            })
            .product();
        let exact: f64 = x.iter().product();
        prop_assert!((perturbed - exact).abs() <= cert * (1.0 + 1e-12));
    }

    #[test]
    fn report_json_round_trip(
        left in (finite(), finite()),
        right in (finite(), finite()),
        scale in 0.0..1.0f64,
        m in prop::collection::vec(-1000i64..1000, 0..4),
        extras in prop::collection::btree_map("[a-z_]{1,8}", finite(), 0..4),
        q in 1u64..10_000,
    ) {
        let mut r = SumReport::identity("prop", Complex64::new(left.0, left.1), Complex64::new(right.0, right.1), scale)
            .with_q(q)
            .with_m(&m)
            .with_r(q as i64 - 5);
        for (k, v) in &extras {
            r = r.with_extra(k, *v);
        }
        prop_assume!(r.residual.is_finite());
        let line = r.to_json_line();
        prop_assert!(!line.contains('\n'));
        let back = SumReport::from_json_line(&line).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(back.to_json_line(), line);
    }
}
