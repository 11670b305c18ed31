//! Report serialization: JSON lines or CSV, in the order given.

use std::io::{self, Write};

use charsum::report::format_float;
use charsum::SumReport;
use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub const CSV_HEADER: [&str; 14] = [
    "identity", "q", "chi", "psi", "m", "r", "left_re", "left_im", "right_re", "right_im", "residual", "scale",
    "pass", "extra",
];

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn csv_row(r: &SumReport) -> Vec<String> {
    let extra = r
        .extra
        .iter()
        .map(|(k, v)| format!("{k}={}", format_float(*v)))
        .collect::<Vec<_>>()
        .join(";");
    vec![
        r.identity.clone(),
        r.q.to_string(),
        join(&r.chi),
        join(&r.psi),
        join(&r.m),
        r.r.to_string(),
        format_float(r.left.re),
        format_float(r.left.im),
        format_float(r.right.re),
        format_float(r.right.im),
        format_float(r.residual),
        format_float(r.scale),
        r.pass.to_string(),
        extra,
    ]
}

pub fn write_reports(out: &mut dyn Write, reports: &[SumReport], format: Format) -> io::Result<()> {
    match format {
        Format::Json => {
            for r in reports {
                writeln!(out, "{}", r.to_json_line())?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(CSV_HEADER)?;
            for r in reports {
                w.write_record(csv_row(r))?;
            }
            w.flush()?;
        }
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn empty_sets() {
        let mut buf = Vec::new();
        write_reports(&mut buf, &[], Format::Json).unwrap();
        assert!(buf.is_empty());
        write_reports(&mut buf, &[], Format::Csv).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), CSV_HEADER.join(",") + "\n");
    }

    #[test]
    fn csv_fields() {
        let r = SumReport::identity("a", Complex64::new(0.1, 0.0), Complex64::new(0.1, 0.0), 1e-10)
            .with_q(7)
            .with_m(&[1, -2, 3])
            .with_extra("s_re", 0.5)
            .with_extra("c", 21.0);
        let mut buf = Vec::new();
        write_reports(&mut buf, &[r], Format::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row = text.lines().nth(1).unwrap();
        assert!(row.starts_with("a,7,,,1 -2 3,0,"), "{row}");
        assert!(row.ends_with(",true,c=21.0;s_re=5.0000000000000000e-1"), "{row}");
    }
}
