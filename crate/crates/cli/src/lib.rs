//! Command-line driver: identity suites, scans and L-function checks, emitted
//! as JSON lines or CSV.

pub mod emit;
pub mod suites;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use charsum::expsums::{scan_g_bound, scan_intermediate, summarize_g_scan, GScanMode};
use charsum::lfunc::{dirichlet_l, sixth_moment, verify_functional_equation, weyl_ratio_scan};
use charsum::report::{sort_canonical, summarize_max};
use charsum::residues::arith::primes_between;
use charsum::residues::{DirichletCharacter, UnitGroup};
use charsum::zseries::{verify_eisenstein_lfactorization, verify_z_factorization, zfin_bound_scan, EisensteinParams, ZCaps};
use charsum::{Error, SumReport};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;

pub use emit::Format;
use suites::{override_tolerance, Tally};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;

/// Default `scan weyl` threshold on `max_χ |L(1/2+it, χ)| / q^{1/6}`.
pub const WEYL_DEFAULT_THRESHOLD: f64 = 3.0;

#[derive(Parser, Debug)]
#[command(name = "charsum", version, about = "Verification suites and scans for character sums and L-functions")]
pub struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "CHARSUM_JOBS", default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, global = true, env = "CHARSUM_FORMAT", value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write reports here instead of stdout.
    #[arg(long, global = true, env = "CHARSUM_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, env = "CHARSUM_SEED", default_value_t = 42)]
    pub seed: u64,
    /// Replace every asserting tolerance by this absolute value.
    #[arg(long, global = true, env = "CHARSUM_TOL")]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// G-H relation, Fourier inversion, symmetries, closed forms and CRT twists.
    Verify(VerifyArgs),
    #[command(subcommand)]
    Scan(Scan),
    /// Functional equation and L-values for every primitive χ mod each q.
    Lfunc(LfuncArgs),
    /// Z-series factorization and the Eisenstein L-factorization.
    Zseries(ZseriesArgs),
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Moduli, comma separated.
    #[arg(long, env = "CHARSUM_Q", value_delimiter = ',', required = true, num_args = 1..)]
    pub q: Vec<u64>,
    /// Random tuples per (q, r) for the G-H relation, per χ for the
    /// symmetries, and per q for the CRT twists.
    #[arg(long, env = "CHARSUM_TUPLES", default_value_t = 20)]
    pub tuples: usize,
    /// Cap on `m, r | q^∞` for Fourier inversion (default q).
    #[arg(long, env = "CHARSUM_FOURIER_CAP")]
    pub fourier_cap: Option<u64>,
    /// Cap on `m, r | q^∞` for the closed forms (default q³).
    #[arg(long, env = "CHARSUM_CAPS")]
    pub caps: Option<u64>,
    /// Emit every record rather than failures plus one summary per suite.
    #[arg(long, env = "CHARSUM_ALL_RECORDS")]
    pub all_records: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Prime,
    PrimeSquare,
}

#[derive(Subcommand, Debug)]
pub enum Scan {
    /// `|g(χ, ψ)| / q` for q = p or p².
    Gbound {
        #[arg(long, env = "CHARSUM_MODE", value_enum, default_value_t = Mode::Prime)]
        mode: Mode,
        #[arg(long, env = "CHARSUM_PMIN", default_value_t = 2)]
        pmin: u64,
        #[arg(long, env = "CHARSUM_PMAX")]
        pmax: u64,
        #[arg(long, env = "CHARSUM_THRESHOLD", default_value_t = 2.0)]
        threshold: f64,
    },
    /// Ratio table `|Σ| / p^j` for the intermediate-conductor sum mod p^k.
    Conjecture {
        #[arg(long, env = "CHARSUM_K")]
        k: u32,
        #[arg(long, env = "CHARSUM_J")]
        j: u32,
        #[arg(long, env = "CHARSUM_PMIN", default_value_t = 2)]
        pmin: u64,
        #[arg(long, env = "CHARSUM_PMAX")]
        pmax: u64,
        /// Assert `|Σ| ≤ C p^j`; without it the table is findings only.
        #[arg(long, env = "CHARSUM_CONSTANT")]
        constant: Option<f64>,
        /// Never fail, even with --constant.
        #[arg(long, env = "CHARSUM_SOFT")]
        soft: bool,
    },
    /// `Z_fin` against its closed form or majorant, per primitive χ mod q = p^k.
    Zfin {
        #[arg(long, env = "CHARSUM_Q", value_delimiter = ',', required = true, num_args = 1..)]
        q: Vec<u64>,
        #[arg(long, env = "CHARSUM_SIGMA", value_delimiter = ',', default_values_t = [0.75, 1.2, 1.5, 2.0])]
        sigma: Vec<f64>,
    },
    /// `max_χ |L(1/2+it, χ)| / q^{1/6}` over cube-free q.
    Weyl {
        #[arg(long, env = "CHARSUM_QMAX")]
        qmax: u64,
        #[arg(long, env = "CHARSUM_T", default_value_t = 0.0, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, env = "CHARSUM_THRESHOLD", default_value_t = WEYL_DEFAULT_THRESHOLD)]
        threshold: f64,
    },
}

#[derive(Args, Debug)]
pub struct LfuncArgs {
    #[arg(long, env = "CHARSUM_Q", value_delimiter = ',', required = true, num_args = 1..)]
    pub q: Vec<u64>,
    /// Points `a`, `a+bi` or `a-bi`, comma separated.
    #[arg(long, env = "CHARSUM_S", value_delimiter = ',', default_value = "0.5", value_parser = parse_complex, allow_hyphen_values = true)]
    pub s: Vec<Complex64>,
    /// Also record `∫_{-T}^{T} |L(1/2+it, χ)|⁶ dt` for this T.
    #[arg(long, env = "CHARSUM_SIXTH")]
    pub sixth: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ZseriesArgs {
    #[arg(long, env = "CHARSUM_Q", value_delimiter = ',', required = true, num_args = 1..)]
    pub q: Vec<u64>,
    /// Truncation for the m- and r-sums and for the Eisenstein series.
    #[arg(long, env = "CHARSUM_CAPS", default_value_t = 10_000)]
    pub caps: u64,
    /// Real part shared by s1..s4 and the Eisenstein point.
    #[arg(long, env = "CHARSUM_S", default_value_t = 3.0)]
    pub s: f64,
    /// Spectral shift t of the Eisenstein data.
    #[arg(long, env = "CHARSUM_EISENSTEIN_T", default_value_t = 0.0, allow_negative_numbers = true)]
    pub eisenstein_t: f64,
}

pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot read {text:?} as a complex number");
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let cut = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match cut {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        x => x,
    };
    Ok(Complex64::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?))
}

/// What a command produced: records in emission order and whether every
/// assertion held.
pub struct Outcome {
    pub reports: Vec<SumReport>,
    pub passed: bool,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Compute(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Precondition(_) | Error::Capacity { .. } => Failure::Usage(e.to_string()),
            e => Failure::Compute(e),
        }
    }
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Compute(_) => EXIT_FAIL,
            Failure::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Compute(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn check_moduli(q: &[u64]) -> Result<(), Failure> {
    if q.is_empty() {
        return usage("--q needs at least one modulus");
    }
    if let Some(bad) = q.iter().find(|&&x| x < 2) {
        return usage(format!("modulus {bad} is below 2"));
    }
    Ok(())
}

fn check_primes(pmin: u64, pmax: u64) -> Result<Vec<u64>, Failure> {
    let primes = primes_between(pmin, pmax);
    if primes.is_empty() {
        return usage(format!("no primes in [{pmin}, {pmax}]"));
    }
    Ok(primes)
}

/// Failing records first, then the passing ones, each part in canonical
/// order, then the summaries as given.
fn finish(mut reports: Vec<SumReport>, summaries: Vec<SumReport>) -> Outcome {
    sort_canonical(&mut reports);
    let (mut out, rest): (Vec<_>, Vec<_>) = reports.into_iter().partition(|r| !r.pass);
    let passed = out.is_empty() && summaries.iter().all(|r| r.pass);
    out.extend(rest);
    out.extend(summaries);
    Outcome { reports: out, passed }
}

fn as_finding(mut r: SumReport) -> SumReport {
    r.right = r.left;
    r.residual = 0.0;
    r.scale = 0.0;
    r.pass = true;
    r
}

fn apply_tol(reports: &mut [SumReport], tol: Option<f64>) {
    if let Some(tol) = tol {
        reports.iter_mut().for_each(|r| override_tolerance(r, tol));
    }
}

pub fn verify(args: &VerifyArgs, seed: u64, tol: Option<f64>) -> Result<Outcome, Failure> {
    check_moduli(&args.q)?;
    let keep = args.all_records;
    let mut tallies: Vec<Tally> = Vec::new();
    for &q in &args.q {
        tallies.push(suites::gh_relation(q, &[1, 2, 3, 5], args.tuples, seed, keep, tol)?);
        tallies.push(suites::fourier_inversion(q, args.fourier_cap.unwrap_or(q), keep, tol)?);
        tallies.push(suites::symmetries(q, args.tuples, seed, keep, tol)?);
        tallies.push(suites::closed_forms(q, args.caps.unwrap_or(q * q * q), keep, tol)?);
        tallies.push(suites::crt_twists(q, args.tuples, seed, keep, tol)?);
    }
    let mut reports = Vec::new();
    let mut summaries = Vec::new();
    for t in tallies.into_iter().filter(|t| t.count > 0) {
        summaries.push(t.summary());
        reports.extend(if keep { t.records } else { t.failures });
    }
    Ok(finish(reports, summaries))
}

pub fn scan(which: &Scan, tol: Option<f64>) -> Result<Outcome, Failure> {
    match which {
        Scan::Gbound { mode, pmin, pmax, threshold } => {
            let primes = check_primes(*pmin, *pmax)?;
            let mode = match mode {
                Mode::Prime => GScanMode::Prime,
                Mode::PrimeSquare => GScanMode::PrimeSquare,
            };
            let mut reports = scan_g_bound(&primes, mode, *threshold)?;
            apply_tol(&mut reports, tol);
            let summary = summarize_g_scan(&reports, mode, *threshold);
            Ok(finish(reports, vec![summary]))
        }
        Scan::Conjecture { k, j, pmin, pmax, constant, soft } => {
            let primes = check_primes(*pmin, *pmax)?;
            let mut reports = scan_intermediate(&primes, *k, *j, *constant)?;
            apply_tol(&mut reports, tol);
            let id = "conjecture.intermediate.summary";
            let summary = match constant {
                Some(c) => summarize_max(id, &reports, *c, reports.iter().map(|r| r.scale).fold(0.0, f64::max)),
                None => as_finding(summarize_max(id, &reports, 0.0, 0.0)),
            };
            if *soft {
                reports = reports.into_iter().map(as_finding).collect();
                return Ok(finish(reports, vec![as_finding(summary)]));
            }
            Ok(finish(reports, vec![summary]))
        }
        Scan::Zfin { q, sigma } => {
            check_moduli(q)?;
            let mut reports = Vec::new();
            let mut summaries = Vec::new();
            for &m in q {
                let prims = DirichletCharacter::primitive(&UnitGroup::new(m)?);
                let rows = prims.par_iter().map(|chi| zfin_bound_scan(chi, sigma)).collect::<Result<Vec<_>, _>>()?;
                let mut rows: Vec<SumReport> = rows.into_iter().flatten().collect();
                apply_tol(&mut rows, tol);
                let mut tally = Tally::new("zfin", m, false, None);
                rows.iter().cloned().for_each(|r| tally.push(r));
                summaries.push(tally.summary());
                reports.extend(rows);
            }
            Ok(finish(reports, summaries))
        }
        Scan::Weyl { qmax, t, threshold } => {
            if *qmax == 0 {
                return usage("--qmax must be positive");
            }
            let mut reports: Vec<SumReport> =
                weyl_ratio_scan(*qmax, *t)?.iter().map(|row| row.report(*threshold, *t)).collect();
            apply_tol(&mut reports, tol);
            let summary = summarize_max("weyl.summary", &reports, *threshold, 0.0);
            Ok(finish(reports, vec![summary]))
        }
    }
}

pub fn lfunc(args: &LfuncArgs, tol: Option<f64>) -> Result<Outcome, Failure> {
    check_moduli(&args.q)?;
    if args.s.is_empty() {
        return usage("--s needs at least one point");
    }
    let mut reports = Vec::new();
    for &q in &args.q {
        let prims = DirichletCharacter::primitive(&UnitGroup::new(q)?);
        let rows = prims
            .par_iter()
            .map(|chi| -> charsum::Result<Vec<SumReport>> {
                let mut out = Vec::new();
                for &s in &args.s {
                    let l = dirichlet_l(s, chi)?;
                    out.push(
                        verify_functional_equation(chi, s)?
                            .with_extra("l_re", l.value.re)
                            .with_extra("l_im", l.value.im)
                            .with_extra("error_budget", l.error_budget),
                    );
                }
                if let Some(t_max) = args.sixth {
                    let v = sixth_moment(chi, t_max)?;
                    out.push(SumReport::finding("sixth_moment", Complex64::new(v, 0.0)).with_chi(chi).with_extra("t_max", t_max));
                }
                Ok(out)
            })
            .collect::<charsum::Result<Vec<_>>>()?;
        reports.extend(rows.into_iter().flatten());
    }
    apply_tol(&mut reports, tol);
    Ok(finish(reports, Vec::new()))
}

pub fn zseries(args: &ZseriesArgs, tol: Option<f64>) -> Result<Outcome, Failure> {
    check_moduli(&args.q)?;
    if args.caps == 0 {
        return usage("--caps must be positive");
    }
    let s = Complex64::new(args.s, 0.0);
    let trivial = DirichletCharacter::principal(UnitGroup::new(1)?);
    let mut reports = Vec::new();
    for &q in &args.q {
        for chi in DirichletCharacter::primitive(&UnitGroup::new(q)?) {
            let caps = ZCaps { m: args.caps, r: args.caps };
            reports.push(verify_z_factorization(&chi, [s; 4], caps)?);
            let params = EisensteinParams::new(trivial.clone(), chi.pow(2).primitivize()?, args.eisenstein_t)?;
            reports.push(verify_eisenstein_lfactorization(&params, &chi, s, args.caps)?);
        }
    }
    apply_tol(&mut reports, tol);
    Ok(finish(reports, Vec::new()))
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Verify(a) => verify(a, cli.seed, cli.tol),
        Command::Scan(s) => scan(s, cli.tol),
        Command::Lfunc(a) => lfunc(a, cli.tol),
        Command::Zseries(a) => zseries(a, cli.tol),
    }
}

fn emit(cli: &Cli, reports: &[SumReport]) -> io::Result<()> {
    match &cli.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            emit::write_reports(&mut w, reports, cli.format)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            emit::write_reports(&mut w, reports, cli.format)
        }
    }
}

/// Runs a parsed command on a pool of `cli.jobs` threads and writes the
/// reports; returns the process exit code.
pub fn run(cli: &Cli) -> u8 {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if cli.jobs > 0 {
        builder = builder.num_threads(cli.jobs);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("charsum: cannot start worker pool: {e}");
            return EXIT_FAIL;
        }
    };
    let outcome = pool.install(|| execute(cli));
    match outcome {
        Ok(o) => match emit(cli, &o.reports) {
            Ok(()) if o.passed => EXIT_PASS,
            Ok(()) => {
                eprintln!("charsum: {} failing record(s)", o.reports.iter().filter(|r| !r.pass).count());
                EXIT_FAIL
            }
            Err(e) => {
                eprintln!("charsum: {}", Failure::Io(e));
                EXIT_IO
            }
        },
        Err(f) => {
            eprintln!("charsum: {f}");
            f.exit_code()
        }
    }
}
