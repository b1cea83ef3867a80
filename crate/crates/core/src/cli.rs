//! Command-line front end. [`run`] takes the argument list and writers so the
//! binary and the tests share one code path.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::io::load;
use crate::linalg::sym_eigen;
use crate::meigen::best_rank_one;
use crate::report::{self, CheckOptions, Method};
use crate::sdp::{hierarchy_orders, HierarchyResult, SCHEDULE};
use crate::soscert::{certify4, certify6, CertStatus, Certificate, SosSearch};
use crate::sylvester::{sylvester_check4, sylvester_check6};
use crate::tensor::AnyTensor;
use crate::unfold::{unfold4, unfold6, Side, UnfoldSpec};
use crate::verdict::Verdict;

/// Exit code for unreadable or malformed input.
pub const INPUT_ERROR: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ellipticity", version, about = "Positive definiteness checks for paired symmetric tensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Auto,
    Sos,
    Sylvester,
    Sdp,
    Meig,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    A,
    B,
    C,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide positive definiteness; exit 0 PD, 1 not PD, 2 undetermined, 3 bad input.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Highest r + s of the relaxation schedule.
        #[arg(long, default_value_t = 2)]
        max_order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Relaxation bounds on the smallest M-eigenvalue of a 4th order tensor.
    SmallestMeig {
        file: PathBuf,
        /// Orders as `r,s` pairs separated by `;`, e.g. "0,0;1,0".
        #[arg(long)]
        orders: Option<String>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Sum-of-squares certificate from unfolded matrices.
    Sos {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print an unfolded matrix and its spectrum.
    Unfold {
        file: PathBuf,
        /// Digit strings separated by commas, e.g. "111222333,123123123".
        #[arg(long)]
        spec: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Best rank-one approximation.
    Rank1 {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Leading-minor test of the parameterized matrix.
    Sylvester {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "a")]
        side: SideArg,
        #[arg(long)]
        json: bool,
    },
}

/// Parses `args` (including the program name), runs the command, and returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { INPUT_ERROR } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            INPUT_ERROR
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| Error::InvalidArgument(format!("write failed: {e}")))
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Check { file, method, tol, max_order, seed, json: as_json } => {
            let t = load(&file)?;
            let method = match method {
                MethodArg::Auto => Method::Auto,
                MethodArg::Sos => Method::Sos,
                MethodArg::Sylvester => Method::Sylvester,
                MethodArg::Sdp => Method::Sdp,
                MethodArg::Meig => Method::Meig,
            };
            let r = report::check(&t, &CheckOptions { method, tol, max_order, seed });
            emit(out, &if as_json { json(&r) } else { r.to_string() })?;
            Ok(r.exit_code())
        }
        Command::SmallestMeig { file, orders, tol, json: as_json } => {
            let AnyTensor::Paired4(a) = load(&file)? else {
                return Err(Error::InvalidArgument("the relaxation needs a 4th order paired tensor".into()));
            };
            let orders = match orders {
                Some(s) => parse_orders(&s)?,
                None => SCHEDULE[..4].to_vec(),
            };
            let h = hierarchy_orders(&a, &orders, tol)?;
            emit(out, &if as_json { json(&h) } else { hierarchy_table(&h) })?;
            Ok(h.verdict.exit_code())
        }
        Command::Sos { file, json: as_json } => {
            let c = match load(&file)? {
                AnyTensor::Paired4(a) => certify4(&a, &SosSearch::default())?,
                AnyTensor::Paired6(a) => certify6(&a, &SosSearch::default())?,
                _ => return Err(Error::InvalidArgument("certificates need a paired tensor".into())),
            };
            emit(out, &if as_json { json(&c) } else { certificate_text(&c) })?;
            Ok(match c.status {
                CertStatus::PdCertified => Verdict::Pd,
                // A negative diagonal entry is the form at a pair of coordinate vectors.
                CertStatus::RefutedNotSos if c.necessary.min_diagonal < 0.0 => Verdict::NotPd,
                _ => Verdict::Undetermined,
            }
            .exit_code())
        }
        Command::Unfold { file, spec, json: as_json } => {
            let t = load(&file)?;
            let spec = match spec {
                Some(s) => UnfoldSpec::parse(&s.split(',').map(str::trim).collect::<Vec<_>>())?,
                None if t.class().order() == 6 => UnfoldSpec::n(1)?,
                None => UnfoldSpec::m1(),
            };
            let m = match &t {
                AnyTensor::Paired4(a) => unfold4(a, &spec)?,
                AnyTensor::Paired6(a) => unfold6(a, &spec)?,
                _ => crate::unfold::unfold_raw(t.entries(), &spec)?,
            };
            if as_json {
                emit(out, &json(&m))?;
            } else {
                let spectrum = sym_eigen(&m.matrix)?.values;
                let mut s = format!("spec: {}\n", spec.to_strings().join(", "));
                let n = m.matrix.n();
                for i in 0..n {
                    let row: Vec<String> = (0..n).map(|j| format!("{:>8.4}", m.matrix.get(i, j))).collect();
                    s.push_str(&row.join(" "));
                    s.push('\n');
                }
                s.push_str(&format!("spectrum: {}\n", join_values(&spectrum)));
                emit(out, &s)?;
            }
            Ok(0)
        }
        Command::Rank1 { file, json: as_json } => {
            let r = match load(&file)? {
                AnyTensor::Paired4(a) => best_rank_one(&a),
                AnyTensor::Paired6(a) => best_rank_one(&a),
                AnyTensor::BiBlock(a) => best_rank_one(&a),
                AnyTensor::Symmetric(a) => best_rank_one(&a),
            };
            let text = if as_json {
                json(&r)
            } else {
                let vs: Vec<String> = r.vectors.iter().map(|v| format!("({:.6}, {:.6}, {:.6})", v[0], v[1], v[2])).collect();
                format!("lambda: {:.10e}\nvectors: {}\nerror: {:.10e}\n", r.lambda, vs.join(" "), r.approx_error)
            };
            emit(out, &text)?;
            Ok(0)
        }
        Command::Sylvester { file, side, json: as_json } => {
            let side = match side {
                SideArg::A => Side::A,
                SideArg::B => Side::B,
                SideArg::C => Side::C,
            };
            let v = match load(&file)? {
                AnyTensor::Paired4(a) => sylvester_check4(&a, side)?,
                AnyTensor::Paired6(a) => sylvester_check6(&a, side)?,
                _ => return Err(Error::InvalidArgument("the minor test needs a paired tensor".into())),
            };
            let rec = report::sylvester_record(&v, 1e-8);
            let text = if as_json {
                json(&v)
            } else {
                let mut s = String::new();
                for (name, c) in [("leading", &v.leading_block_check), ("minor2", &v.minor2_check), ("det", &v.det_check)] {
                    s.push_str(&format!("{name:<8} min {:>14.6e}\n", c.min_value_estimate));
                }
                s.push_str(&format!("verdict: {} ({})\n", rec.verdict, rec.note));
                if let Some(w) = &rec.witness {
                    s.push_str(&format!("witness: {}\n", report::describe(w)));
                }
                s
            };
            emit(out, &text)?;
            Ok(rec.verdict.exit_code())
        }
    }
}

fn parse_orders(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let bad = || Error::InvalidArgument(format!("bad order {p:?}, expected r,s"));
            let (r, t) = p.split_once(',').ok_or_else(bad)?;
            Ok((r.trim().parse().map_err(|_| bad())?, t.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

fn join_values(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ")
}

fn hierarchy_table(h: &HierarchyResult) -> String {
    let mut s = format!(
        "{:>2} {:>2} {:>5} {:>5} {:>5} {:>9} {:>18} {:>10}  status\n",
        "r", "s", "d_v", "d_u", "ITER", "CPU(s)", "OPT", "VOL"
    );
    for r in &h.rows {
        s.push_str(&format!(
            "{:>2} {:>2} {:>5} {:>5} {:>5} {:>9.3} {:>18.10e} {:>10.2e}  {}\n",
            r.r,
            r.s,
            r.d_v,
            r.d_u,
            r.iterations,
            r.cpu_seconds,
            r.gamma,
            r.primal_residual,
            serde_json::to_value(r.status).unwrap().as_str().unwrap()
        ));
    }
    s.push_str(&format!("verdict: {}\n", h.verdict));
    s
}

fn certificate_text(c: &Certificate) -> String {
    let mut s = format!("status: {}\n", serde_json::to_value(c.status).unwrap().as_str().unwrap());
    s.push_str(&format!("necessary: {} (min diagonal {})\n", if c.necessary.passed { "pass" } else { "fail" }, c.necessary.min_diagonal));
    if let Some(w) = &c.witness {
        s.push_str(&format!("unfolding: {} ({:?})\n", w.unfolded.spec.to_strings().join(", "), w.from));
        s.push_str(&format!("spectrum: {}\n", join_values(&w.spectrum)));
    }
    if let Some(terms) = &c.sos_terms {
        s.push_str(&format!("terms: {}\n", terms.len()));
        for t in terms {
            s.push_str(&format!("  {:.6} (...)^2\n", t.coefficient));
        }
    }
    s
}
