//! The weights `V_j(y, t) = (1/2πi) ∫_{(σ)} y^{-s} ρ(s, t)^j G_j(s) ds/s`, with
//! `ρ` the ratio of `Γ_R` factors at `1/2 + δ + s ± it` over those at
//! `1/2 + δ ± it`, and `G_j(s) = e^{2j s²}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gamma::ln_gamma_r;
use crate::error::{domain, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VWeightParams {
    pub j: u8,
    pub delta: u8,
    /// Abscissa of the vertical contour. A negative value (right of the
    /// nearest Γ pole) adds the residue 1 from `s = 0`.
    pub sigma: f64,
    /// Trapezoid step; `None` picks one from the distance to the nearest pole.
    pub step: Option<f64>,
    /// The contour is cut where `|G_j(s)|` falls below this.
    pub cutoff: f64,
}

impl VWeightParams {
    pub fn new(j: u8, delta: u8) -> Self {
        VWeightParams { j, delta, sigma: 1.2, step: None, cutoff: 1e-18 }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }
}

/// Neumaier-compensated complex sum.
#[derive(Default)]
struct Compensated {
    sum: Complex64,
    carry: Complex64,
}

impl Compensated {
    fn add(&mut self, x: Complex64) {
        fn step(sum: &mut f64, carry: &mut f64, x: f64) {
            let t = *sum + x;
            if sum.abs() >= x.abs() {
                *carry += (*sum - t) + x;
            } else {
                *carry += (x - t) + *sum;
            }
            *sum = t;
        }
        step(&mut self.sum.re, &mut self.carry.re, x.re);
        step(&mut self.sum.im, &mut self.carry.im, x.im);
    }

    fn total(&self) -> Complex64 {
        self.sum + self.carry
    }
}

pub fn v_weight(params: &VWeightParams, y: f64, t: Complex64) -> Result<Complex64> {
    if !(y > 0.0) {
        return domain(format!("y = {y} must be positive"));
    }
    if !matches!(params.j, 1 | 2) || !matches!(params.delta, 0 | 1) {
        return domain(format!("(j, δ) = ({}, {}) outside {{1,2}} × {{0,1}}", params.j, params.delta));
    }
    let sigma = params.sigma;
    let a = 0.5 + params.delta as f64;
    // Γ_R(a + s ± it) has its rightmost poles at Re s = −a ± Im t
    let pole_re = -a + t.im.abs();
    if sigma == 0.0 || sigma <= pole_re {
        return domain(format!("σ = {sigma} must be nonzero and right of {pole_re}"));
    }
    for sign in [1.0, -1.0] {
        let z = Complex64::new(a, 0.0) + sign * Complex64::new(0.0, 1.0) * t;
        if z.im.abs() < 1e-12 && z.re <= 1e-12 && (z.re / 2.0 - (z.re / 2.0).round()).abs() < 1e-12 {
            return domain(format!("Γ_R(1/2 + δ ± it) has a pole at t = {t}"));
        }
    }
    let dist = sigma.abs().min(sigma - pole_re);
    let h = params.step.unwrap_or_else(|| {
        let raw = (dist / 10.0).min(0.125);
        // a power of two keeps every node u = k h exact
        2f64.powf(raw.log2().floor())
    });
    let c = 2.0 * params.j as f64;
    let u_max = (sigma * sigma + (1.0 / params.cutoff).ln() / c).sqrt();
    let k_max = (u_max / h).ceil() as i64;
    let it = Complex64::new(0.0, 1.0) * t;
    let jf = params.j as f64;
    let base = ln_gamma_r(Complex64::new(a, 0.0) + it) + ln_gamma_r(Complex64::new(a, 0.0) - it);
    let ly = y.ln();
    let mut acc = Compensated::default();
    for k in -k_max..=k_max {
        let s = Complex64::new(sigma, k as f64 * h);
        let log = -s * ly + jf * (ln_gamma_r(a + s + it) + ln_gamma_r(a + s - it) - base) + c * s * s - s.ln();
        acc.add(log.exp());
    }
    let mut v = acc.total() * h / (2.0 * PI);
    if sigma < 0.0 {
        v += 1.0;
    }
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Numerical(format!(
            "V_{}(y={y}, t={t}) with δ={} σ={sigma} h={h}: non-finite quadrature",
            params.j, params.delta
        )));
    }
    Ok(v)
}
