//! One checked identity or bound instance, and its canonical serialization.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::residues::DirichletCharacter;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumReport {
    pub identity: String,
    pub q: u64,
    /// Exponent vector of χ against the deterministic basis mod `q`.
    pub chi: Vec<u64>,
    pub psi: Vec<u64>,
    pub m: Vec<i64>,
    pub r: i64,
    /// Further numeric parameters (s, σ, caps, p, k, j, ...), keyed by name.
    pub extra: BTreeMap<String, f64>,
    pub left: Complex64,
    pub right: Complex64,
    pub residual: f64,
    pub scale: f64,
    pub pass: bool,
}

impl SumReport {
    fn blank(identity: &str) -> Self {
        SumReport {
            identity: identity.to_string(),
            q: 0,
            chi: Vec::new(),
            psi: Vec::new(),
            m: Vec::new(),
            r: 0,
            extra: BTreeMap::new(),
            left: Complex64::new(0.0, 0.0),
            right: Complex64::new(0.0, 0.0),
            residual: 0.0,
            scale: 0.0,
            pass: true,
        }
    }

    /// `left = right` up to `scale`.
    pub fn identity(identity: &str, left: Complex64, right: Complex64, scale: f64) -> Self {
        let residual = (left - right).norm();
        SumReport {
            left,
            right,
            residual,
            scale,
            pass: residual.is_finite() && residual <= scale,
            ..Self::blank(identity)
        }
    }

    /// `observed ≤ bound` up to `scale`; the residual is the excess.
    pub fn bound(identity: &str, observed: f64, bound: f64, scale: f64) -> Self {
        let residual = (observed - bound).max(0.0);
        SumReport {
            left: Complex64::new(observed, 0.0),
            right: Complex64::new(bound, 0.0),
            residual,
            scale,
            pass: observed.is_finite() && residual <= scale,
            ..Self::blank(identity)
        }
    }

    /// A record carrying values only, with nothing asserted.
    pub fn finding(identity: &str, value: Complex64) -> Self {
        SumReport { left: value, right: value, ..Self::blank(identity) }
    }

    pub fn with_q(mut self, q: u64) -> Self {
        self.q = q;
        self
    }

    pub fn with_chi(mut self, chi: &DirichletCharacter) -> Self {
        self.q = chi.modulus();
        self.chi = chi.exponents().to_vec();
        self
    }

    pub fn with_psi(mut self, psi: &DirichletCharacter) -> Self {
        self.psi = psi.exponents().to_vec();
        self
    }

    pub fn with_m(mut self, m: &[i64]) -> Self {
        self.m = m.to_vec();
        self
    }

    pub fn with_r(mut self, r: i64) -> Self {
        self.r = r;
        self
    }

    pub fn with_extra(mut self, key: &str, value: f64) -> Self {
        self.extra.insert(key.to_string(), value);
        self
    }

    /// Canonical order: (q, χ, ψ, m, r), then identity and the extras.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.q
            .cmp(&other.q)
            .then_with(|| self.chi.cmp(&other.chi))
            .then_with(|| self.psi.cmp(&other.psi))
            .then_with(|| self.m.cmp(&other.m))
            .then_with(|| self.r.cmp(&other.r))
            .then_with(|| self.identity.cmp(&other.identity))
            .then_with(|| {
                let a = self.extra.iter();
                let b = other.extra.iter();
                a.zip(b)
                    .map(|((ka, va), (kb, vb))| ka.cmp(kb).then(va.total_cmp(vb)))
                    .find(|o| o.is_ne())
                    .unwrap_or_else(|| self.extra.len().cmp(&other.extra.len()))
            })
    }

    pub fn to_json_line(&self) -> String {
        let value = serde_json::to_value(self).expect("reports serialize");
        let mut out = String::new();
        write_value(&mut out, &value);
        out
    }

    pub fn from_json_line(line: &str) -> serde_json::Result<Self> {
        serde_json::from_str(line)
    }
}

pub fn sort_canonical(reports: &mut [SumReport]) {
    reports.sort_by(|a, b| a.canonical_cmp(b));
}

/// Floats as 17 significant digits, so every value re-parses bit-exactly.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return "null".to_string();
    }
    if x == x.trunc() && x.abs() < 1e15 {
        return format!("{x:.1}");
    }
    format!("{x:.16e}")
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => write!(out, "{u}").unwrap(),
            (None, Some(i)) => write!(out, "{i}").unwrap(),
            _ => out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            // serde_json's default map is ordered by key
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_value(out, item);
            }
            out.push('}');
        }
    }
}

/// Maximum of `left.re` over the reports, as a summary record carrying the
/// argmax parameters.
pub fn summarize_max(identity: &str, reports: &[SumReport], threshold: f64, scale: f64) -> SumReport {
    let best = reports
        .iter()
        .filter(|r| r.left.re.is_finite())
        .max_by(|a, b| a.left.re.total_cmp(&b.left.re).then_with(|| b.canonical_cmp(a)));
    let failures = reports.iter().filter(|r| !r.pass).count();
    let mut summary = match best {
        Some(b) => {
            let mut s = SumReport::bound(identity, b.left.re, threshold, scale);
            s.q = b.q;
            s.chi = b.chi.clone();
            s.psi = b.psi.clone();
            s.m = b.m.clone();
            s.r = b.r;
            s.extra = b.extra.clone();
            s
        }
        None => SumReport::bound(identity, 0.0, threshold, scale),
    };
    summary.pass &= failures == 0;
    summary
        .with_extra("count", reports.len() as f64)
        .with_extra("failures", failures as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SumReport {
        SumReport::identity("demo", Complex64::new(0.1, -2.5e-17), Complex64::new(0.1, 0.0), 1e-12)
            .with_q(5)
            .with_m(&[1, 2, 3])
            .with_r(1)
            .with_extra("sigma", 1.2)
    }

    #[test]
    fn json_round_trip_is_exact() {
        let r = sample();
        let line = r.to_json_line();
        assert!(!line.contains('\n'));
        assert_eq!(SumReport::from_json_line(&line).unwrap(), r);
    }

    #[test]
    fn keys_are_sorted() {
        let line = sample().to_json_line();
        let keys = ["\"chi\"", "\"extra\"", "\"identity\"", "\"left\"", "\"m\"", "\"pass\""];
        let pos: Vec<usize> = keys.iter().map(|k| line.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{line}");
    }

    #[test]
    fn bound_semantics() {
        assert!(SumReport::bound("b", 1.9, 2.0, 0.0).pass);
        assert!(!SumReport::bound("b", 2.1, 2.0, 0.0).pass);
        assert!(!SumReport::bound("b", f64::NAN, 2.0, 0.0).pass);
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.0, 1.0, -3.0, 0.1, 1.0 / 3.0, 6.02e23, -1e-300, 1e15, 123456.789] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }
}
