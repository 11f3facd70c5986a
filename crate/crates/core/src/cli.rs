//! Command-line front end. `run` parses arguments, writes to the given
//! streams and returns the process exit code: 0 success, 1 verification
//! mismatch or internal failure, 2 usage error.

use std::collections::BTreeMap;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::Signed;
use serde_json::{json, Value};

use crate::error::Error;
use crate::level_gf::{self, TESTED_MAX_LEVEL};
use crate::pl::PLExpr;
use crate::rational::{factorial, to_decimal, to_fraction_string, Rational};
use crate::series::expand;
use crate::tree::{self, DEFAULT_ENUMERATION_LIMIT};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Display precision for decimals, rounded half-to-even.
const DECIMAL_PLACES: u32 = 10;

/// Highest level whose limit constant is compared against in `sample`.
const SAMPLE_COMPARE_MAX_LEVEL: usize = 4;

#[derive(Debug, Parser)]
#[command(name = "bstlevels", version, about = "Levels of vertices in random binary search trees, computed exactly")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Raise the exhaustive-enumeration limit on n (default 10).
    #[arg(long, global = true, value_name = "LIMIT")]
    pub cap_override: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Trees whose root is at level k.
    #[value(name = "B")]
    B,
    /// Derivative of B.
    #[value(name = "Bprime")]
    BPrime,
    /// (tree, level-k vertex) pairs.
    #[value(name = "A")]
    A,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a generating function in canonical form.
    Gf {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
    },
    /// Print the limit constant c_k.
    Ck {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
    },
    /// Print power-series coefficients of a generating function or expression.
    Series {
        #[arg(long, value_enum, requires = "k", conflicts_with = "expr")]
        kind: Option<Kind>,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: Option<u32>,
        /// Expression text, e.g. "2*L - 2*x - 1/3*x^3".
        #[arg(long)]
        expr: Option<String>,
        #[arg(long, default_value_t = 30)]
        order: usize,
    },
    /// Exhaustively count vertices per level over all n! trees.
    Oracle {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
    },
    /// Compare n! [x^n] A_k against exhaustive counts.
    Verify {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n_max: u32,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        k_max: u32,
    },
    /// Level frequencies over seeded random trees.
    Sample {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Perfect-tree probabilities Q_k, P_k and the bound gamma_k.
    Bounds {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
    },
}

enum Failure {
    Usage(String),
    Mismatch,
    Internal(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::LimitExceeded { .. } | Error::InvalidArgument(_) | Error::Parse { .. } | Error::InvalidLevel(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Internal(other),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(Error::InvalidArgument(format!("write failed: {e}")))
    }
}

type CmdResult = std::result::Result<(), Failure>;

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    finish(execute(&cli, out, err), err)
}

fn finish(result: CmdResult, err: &mut dyn Write) -> i32 {
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Mismatch) => EXIT_MISMATCH,
        Err(Failure::Internal(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_MISMATCH
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let limit = cli.cap_override.unwrap_or(DEFAULT_ENUMERATION_LIMIT);
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Gf { kind, k } => cmd_gf(*kind, *k as usize, json, out, err),
        Command::Ck { k } => cmd_ck(*k as usize, json, out, err),
        Command::Series { kind, k, expr, order } => {
            let e = match (kind, k, expr) {
                (_, _, Some(text)) => PLExpr::parse(text)?,
                (Some(kind), Some(k), None) => {
                    warn_level(*k as usize, err);
                    generating_function(*kind, *k as usize)?
                }
                _ => return Err(Failure::Usage("series needs --kind with --k, or --expr".into())),
            };
            let s = expand(&e, *order);
            if json {
                writeln!(out, "{}", s.to_json())?;
            } else {
                for (i, c) in s.coeffs().iter().enumerate() {
                    writeln!(out, "{i:>4}  {}", to_fraction_string(c))?;
                }
            }
            Ok(())
        }
        Command::Oracle { n } => cmd_oracle(*n as usize, limit, json, out),
        Command::Verify { n_max, k_max } => cmd_verify(*n_max as usize, *k_max as usize, limit, json, out),
        Command::Sample { n, trials, seed } => cmd_sample(*n as usize, *trials, *seed, json, out),
        Command::Bounds { k } => cmd_bounds(*k as usize, json, out),
    }
}

fn warn_level(k: usize, err: &mut dyn Write) {
    if k > TESTED_MAX_LEVEL {
        let _ = writeln!(
            err,
            "warning: k = {k} is above {TESTED_MAX_LEVEL}; expression size grows quickly with k"
        );
    }
}

fn generating_function(kind: Kind, k: usize) -> crate::Result<PLExpr> {
    let b = level_gf::bundle(k)?;
    Ok(match kind {
        Kind::B => b.b,
        Kind::BPrime => b.b_prime,
        Kind::A => b.a,
    })
}

fn cmd_gf(kind: Kind, k: usize, json: bool, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    warn_level(k, err);
    let e = generating_function(kind, k)?;
    if json {
        writeln!(out, "{}", e.to_json())?;
    } else {
        writeln!(out, "{e}")?;
    }
    Ok(())
}

fn cmd_ck(k: usize, json: bool, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    warn_level(k, err);
    let c = level_gf::extract_ck(k)?;
    let dec = to_decimal(&c, DECIMAL_PLACES);
    if json {
        let v = json!({ "k": k, "c": to_fraction_string(&c), "decimal": dec });
        writeln!(out, "{v}")?;
    } else {
        writeln!(out, "{} ≈ {dec}", to_fraction_string(&c))?;
    }
    Ok(())
}

fn cmd_oracle(n: usize, limit: usize, json: bool, out: &mut dyn Write) -> CmdResult {
    let table = tree::enumerate_levels_with_limit(n, limit)?;
    if json {
        writeln!(out, "{}", table.to_json())?;
        return Ok(());
    }
    let nf = factorial(n);
    let rows: Vec<[String; 3]> = table
        .counts
        .iter()
        .map(|(k, c)| {
            let e = Rational::new(c.clone(), nf.clone());
            [k.to_string(), c.to_string(), to_fraction_string(&e)]
        })
        .collect();
    writeln!(out, "n = {n}")?;
    write_table(out, &["k", "a_{n,k}", "a_{n,k}/n!"], &rows)?;
    writeln!(out, "d_n = {}", table.two_leaf_parents)?;
    Ok(())
}

fn cmd_verify(n_max: usize, k_max: usize, limit: usize, json: bool, out: &mut dyn Write) -> CmdResult {
    if n_max > limit {
        return Err(Failure::Usage(format!(
            "n-max = {n_max} exceeds the enumeration limit {limit}; pass --cap-override to raise it"
        )));
    }
    let series: Vec<Vec<Rational>> = (1..=k_max)
        .map(|k| level_gf::expected_level_counts(k, n_max))
        .collect::<crate::Result<_>>()?;
    let mut checks = Vec::new();
    for n in 1..=n_max {
        let table = tree::enumerate_levels_with_limit(n, limit)?;
        let nf = Rational::from_integer(factorial(n));
        for k in 1..=k_max {
            checks.push(Check {
                n,
                k,
                oracle: Rational::from_integer(table.count(k)),
                symbolic: &series[k - 1][n] * &nf,
            });
        }
    }
    report_verify(&checks, n_max, k_max, json, out)
}

struct Check {
    n: usize,
    k: usize,
    oracle: Rational,
    symbolic: Rational,
}

impl Check {
    fn pass(&self) -> bool {
        self.oracle == self.symbolic
    }
}

fn report_verify(checks: &[Check], n_max: usize, k_max: usize, json: bool, out: &mut dyn Write) -> CmdResult {
    let all_pass = checks.iter().all(Check::pass);
    if json {
        let list: Vec<Value> = checks
            .iter()
            .map(|c| {
                json!({
                    "n": c.n,
                    "k": c.k,
                    "oracle": to_fraction_string(&c.oracle),
                    "symbolic": to_fraction_string(&c.symbolic),
                    "pass": c.pass(),
                })
            })
            .collect();
        writeln!(out, "{}", json!({ "pass": all_pass, "checks": list }))?;
    } else {
        let mut header = vec!["n".to_string()];
        header.extend((1..=k_max).map(|k| format!("k={k}")));
        let rows: Vec<Vec<String>> = (1..=n_max)
            .map(|n| {
                let mut row = vec![n.to_string()];
                row.extend(
                    checks
                        .iter()
                        .filter(|c| c.n == n)
                        .map(|c| if c.pass() { "ok".to_string() } else { "FAIL".to_string() }),
                );
                row
            })
            .collect();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        write_table(out, &header, &rows)?;
        for c in checks.iter().filter(|c| !c.pass()) {
            writeln!(
                out,
                "mismatch at n={}, k={}: oracle a_(n,k) = {}, n![x^n]A_k = {}",
                c.n,
                c.k,
                to_fraction_string(&c.oracle),
                to_fraction_string(&c.symbolic)
            )?;
        }
        writeln!(out, "{}", if all_pass { "all checks passed" } else { "verification FAILED" })?;
    }
    if all_pass {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn cmd_sample(n: usize, trials: u64, seed: u64, json: bool, out: &mut dyn Write) -> CmdResult {
    let result = tree::sample_levels(n, trials, seed)?;
    let mut constants = BTreeMap::new();
    for k in 1..=SAMPLE_COMPARE_MAX_LEVEL.min(result.counts.len().max(1)) {
        constants.insert(k, level_gf::extract_ck(k)?);
    }
    let freqs = result.frequencies();
    if json {
        let levels: Vec<Value> = freqs
            .iter()
            .map(|(k, f)| {
                let mut v = json!({
                    "k": k,
                    "count": result.counts[k].to_string(),
                    "frequency": to_fraction_string(f),
                    "decimal": to_decimal(f, DECIMAL_PLACES),
                });
                if let Some(c) = constants.get(k) {
                    v["c_k"] = json!(to_fraction_string(c));
                    v["deviation"] = json!(to_decimal(&(f - c).abs(), DECIMAL_PLACES));
                }
                v
            })
            .collect();
        let v = json!({
            "n": n,
            "trials": trials.to_string(),
            "seed": seed.to_string(),
            "vertices": result.vertices().to_string(),
            "levels": levels,
        });
        writeln!(out, "{v}")?;
    } else {
        writeln!(out, "n = {n}, trials = {trials}, seed = {seed}")?;
        let rows: Vec<Vec<String>> = freqs
            .iter()
            .map(|(k, f)| {
                let (c, dev) = match constants.get(k) {
                    Some(c) => (to_decimal(c, DECIMAL_PLACES), to_decimal(&(f - c).abs(), DECIMAL_PLACES)),
                    None => ("-".into(), "-".into()),
                };
                vec![k.to_string(), result.counts[k].to_string(), to_decimal(f, DECIMAL_PLACES), c, dev]
            })
            .collect();
        write_table(out, &["k", "count", "frequency", "c_k", "|freq - c_k|"], &rows)?;
    }
    Ok(())
}

fn cmd_bounds(k: usize, json: bool, out: &mut dyn Write) -> CmdResult {
    let q = level_gf::qk(k)?;
    let p = level_gf::pk(k)?;
    let g = level_gf::gamma_k(k)?;
    let threshold = BigInt::from(2u32).pow(k as u32 + 1);
    if json {
        let v = json!({
            "k": k,
            "Q": to_fraction_string(&q),
            "P": to_fraction_string(&p),
            "gamma": to_fraction_string(&g),
            "valid_from_n": threshold.to_string(),
        });
        writeln!(out, "{v}")?;
    } else {
        writeln!(out, "k = {k}")?;
        writeln!(out, "Q = {}", to_fraction_string(&q))?;
        writeln!(out, "P = {}", to_fraction_string(&p))?;
        writeln!(out, "γ = {}  (a_(n,k)/(n·n!) ≥ γ for n ≥ {threshold})", to_fraction_string(&g))?;
    }
    Ok(())
}

fn write_table<R: AsRef<[String]>>(out: &mut dyn Write, header: &[&str], rows: &[R]) -> std::io::Result<()> {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (i, cell) in row.as_ref().iter().enumerate().take(cols) {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}", w = *w))
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(header.to_vec()))?;
    for row in rows {
        writeln!(out, "{}", line(row.as_ref().iter().map(String::as_str).collect()))?;
    }
    Ok(())
}
