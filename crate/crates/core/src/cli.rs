//! Command-line front end: parses a job, runs it and renders a line-oriented
//! `key = value` report.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use clap::{Parser, Subcommand};

use crate::basis::build_integral_basis;
use crate::curve::{count_points_naive, CurveSpec, HyperellipticCurve};
use crate::error::{Error, Result};
use crate::frobenius::{check_denominator_bound, denominator_exponent, frobenius_matrix, FrobMatrix};
use crate::selftest::{check_family, default_families};
use crate::zeta::{compute_zeta, counts_from_zeta};

#[derive(Parser, Debug, Clone)]
#[command(name = "hc", about = "Frobenius matrices and zeta functions of hyperelliptic curves")]
pub struct JobSpec {
    #[command(subcommand)]
    pub command: Command,
    /// Curve file, `-` for stdin, or an inline curve line.
    #[arg(long, global = true)]
    pub curve: Option<String>,
    /// Overrides the precision N of the curve.
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Seed for random curves.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Writes the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Prints the canonical curve line.
    #[arg(long, global = true)]
    pub echo: bool,
    /// Emits the report as a JSON object.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Frobenius,
    Basis,
    Zeta,
    Count,
    Selftest,
}

/// Ordered `key = value` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub lines: Vec<(String, String)>,
}

impl Report {
    fn push(&mut self, k: impl Into<String>, v: impl ToString) {
        self.lines.push((k.into(), v.to_string()));
    }

    pub fn get(&self, k: &str) -> Option<&str> {
        self.lines.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        self.lines.iter().fold(String::new(), |mut s, (k, v)| {
            let _ = writeln!(s, "{k} = {v}");
            s
        })
    }

    pub fn render_json(&self) -> String {
        let map: serde_json::Map<String, serde_json::Value> =
            self.lines.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect();
        serde_json::to_string_pretty(&serde_json::Value::Object(map)).expect("strings serialize") + "\n"
    }
}

/// Rendered output and process exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
}

fn read_curve(job: &JobSpec) -> Result<CurveSpec> {
    let src = job.curve.as_deref().ok_or_else(|| Error::Parse("--curve is required".into()))?;
    let text = if src == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Parse(e.to_string()))?;
        s
    } else if Path::new(src).is_file() {
        std::fs::read_to_string(src).map_err(|e| Error::Parse(format!("{src}: {e}")))?
    } else {
        src.to_string()
    };
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .ok_or_else(|| Error::Parse("no curve line found".into()))?;
    let mut spec: CurveSpec = line.parse()?;
    if let Some(n) = job.precision {
        spec.precision = n;
    }
    Ok(spec)
}

fn entry_lines(r: &mut Report, name: &str, m: &FrobMatrix) {
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            let e = m.entry(i, j);
            let v = e.valuation.map_or("inf".to_string(), |v| v.to_string());
            r.push(format!("{name}[{i}][{j}].valuation"), v);
            r.push(format!("{name}[{i}][{j}].unit"), &e.unit);
        }
    }
}

fn list<T: ToString>(v: &[T]) -> String {
    format!("[{}]", v.iter().map(T::to_string).collect::<Vec<_>>().join(", "))
}

fn header(r: &mut Report, c: &HyperellipticCurve) {
    r.push("curve", c.spec());
    r.push("q", c.context().q());
}

fn run_curve_command(job: &JobSpec, r: &mut Report) -> Result<()> {
    let spec = read_curve(job)?;
    let curve = spec.validate()?;
    match job.command {
        Command::Validate => {
            header(r, &curve);
            r.push("genus", curve.genus());
            r.push("min_poly", list(curve.context().min_poly()));
            r.push("status", "ok");
        }
        Command::Frobenius => {
            header(r, &curve);
            let m = frobenius_matrix(&curve)?;
            r.push("precision", m.precision());
            entry_lines(r, "M", &m);
            r.push("min_valuation", m.min_valuation().map_or("inf".into(), |v| v.to_string()));
            r.push("denominator_bound", format!("-{}", denominator_exponent(curve.p(), curve.genus())));
            r.push("bound_holds", if check_denominator_bound(&m, curve.p(), curve.genus()).is_ok() { "yes" } else { "no" });
        }
        Command::Basis => {
            header(r, &curve);
            let c = build_integral_basis(&curve)?;
            for i in 0..c.dim() {
                for j in 0..c.dim() {
                    r.push(format!("C[{i}][{j}]"), c.entry_in(curve.context(), i, j));
                }
            }
            r.push("diag", list(c.diagonal()));
            r.push("det", c.determinant());
        }
        Command::Zeta => {
            header(r, &curve);
            let z = compute_zeta(&curve)?;
            r.push("precision", z.integral.precision());
            r.push("P", list(&z.numerator.a));
            let q = curve.context().q();
            let t = counts_from_zeta(&z.numerator, curve.genus().max(2))?;
            for (m, n) in t.counts.iter().enumerate() {
                r.push(format!("#C(F_{})", q.pow(m as u32 + 1)), n);
            }
        }
        Command::Count => {
            header(r, &curve);
            let q = curve.context().q();
            for m in 1..=2 {
                match count_points_naive(&curve, m) {
                    Ok(n) => r.push(format!("#C(F_{})", q.pow(m as u32)), n),
                    Err(Error::TooLarge(_)) if m > 1 => break,
                    Err(e) => return Err(e),
                }
            }
        }
        Command::Selftest => unreachable!(),
    }
    Ok(())
}

const SELFTEST_CURVES: usize = 3;

fn run_selftest(job: &JobSpec, r: &mut Report) -> bool {
    let mut all = true;
    for (p, n, g) in default_families() {
        let s = check_family(job.seed, p, n, g, SELFTEST_CURVES);
        let ok = s.passed();
        all &= ok;
        let yn = |b: bool| if b { "yes" } else { "no" };
        r.push(
            format!("family[p={p},n={n},g={g}]"),
            format!(
                "curves={} max_denominator_valuation={} integral={} pass={}",
                s.reports.len(),
                s.max_denominator(),
                yn(s.all_integral()),
                yn(ok)
            ),
        );
    }
    r.push("verdict", if all { "pass" } else { "fail" });
    all
}

pub fn run(job: &JobSpec) -> Outcome {
    let mut r = Report::default();
    if job.echo && job.command != Command::Selftest {
        return match read_curve(job).and_then(|s| s.validate().map(|c| c.spec())) {
            Ok(spec) => Outcome { code: 0, text: format!("{spec}\n") },
            Err(e) => failure(job, r, &e),
        };
    }
    let code = if job.command == Command::Selftest {
        if run_selftest(job, &mut r) {
            0
        } else {
            2
        }
    } else {
        match run_curve_command(job, &mut r) {
            Ok(()) => 0,
            Err(e) => return failure(job, r, &e),
        }
    };
    Outcome { code, text: render(job, &r) }
}

fn failure(job: &JobSpec, mut r: Report, e: &Error) -> Outcome {
    r.push("error", e);
    Outcome { code: if e.is_invariant_violation() { 2 } else { 1 }, text: render(job, &r) }
}

fn render(job: &JobSpec, r: &Report) -> String {
    if job.json {
        r.render_json()
    } else {
        r.render()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(args: &[&str]) -> JobSpec {
        JobSpec::try_parse_from(std::iter::once("hc").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn zeta_report() {
        let out = run(&job(&["zeta", "--curve", "p=3 n=1 g=1 N=6 Q=[1,1,0,1]"]));
        assert_eq!(out.code, 0, "{}", out.text);
        assert!(out.text.contains("P = [1, 0, 3]\n"));
        assert!(out.text.contains("#C(F_3) = 4\n"));
    }

    #[test]
    fn even_characteristic_is_a_validation_error() {
        let out = run(&job(&["validate", "--curve", "p=2 n=1 g=1 N=4 Q=[1,1,0,1]"]));
        assert_eq!(out.code, 1);
        assert!(out.text.starts_with("error = "));
        assert!(out.text.contains("p = 2"));
    }

    #[test]
    fn echo_round_trips() {
        let out = run(&job(&["validate", "--echo", "--curve", "p=3  n=2 g=1 N=4 Q=[ 1*a, 0 ,a^1, 1]"]));
        assert_eq!(out.code, 0, "{}", out.text);
        let spec: CurveSpec = out.text.trim().parse().unwrap();
        assert_eq!(spec.to_string(), out.text.trim());
        let again = run(&job(&["validate", "--echo", "--curve", out.text.trim()]));
        assert_eq!(again.text, out.text);
    }

    #[test]
    fn precision_override_and_json() {
        let out = run(&job(&["frobenius", "--json", "--precision", "3", "--curve", "p=5 n=1 g=1 N=9 Q=[1,1,0,1]"]));
        assert_eq!(out.code, 0);
        let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(v["curve"], "p=5 n=1 g=1 N=3 Q=[1,1,0,1]");
        assert_eq!(v["bound_holds"], "yes");
    }

    #[test]
    fn missing_curve_is_reported() {
        let out = run(&job(&["count"]));
        assert_eq!(out.code, 1);
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run(&job(&["basis", "--curve", "p=3 n=1 g=2 N=5 Q=[1,2,0,1,1,1]"]));
        let b = run(&job(&["basis", "--curve", "p=3 n=1 g=2 N=5 Q=[1,2,0,1,1,1]"]));
        assert_eq!(a, b);
        assert!(a.text.contains("diag = [1, 1, 1, 3]\n"));
        assert!(a.text.contains("det = 3\n"));
    }
}
