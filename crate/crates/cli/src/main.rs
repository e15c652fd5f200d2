mod report;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use klooster::arith::factorize;
use klooster::bessel::bessel_j;
use klooster::kloosterman::{
    certify_lower_bound, eval_bruteforce, eval_multiplicative, eval_salie, KloostermanValue,
};
use klooster::petersson::{find_admissible, thresholds, verify, Mode, TraceInstance, VerifyVerdict};

use report::{to_csv, to_json, Record, Value};
use sweep::SweepConfig;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(
    name = "klooster",
    version,
    about = "Kloosterman sums, certified lower bounds, Bessel brackets, and Petersson-series checks"
)]
struct Cli {
    /// Output format for reports on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate S(a,b;c) with the chosen backend
    Eval {
        a: i64,
        b: i64,
        c: u64,
        /// brute, salie (prime-power moduli only), or mult
        #[arg(long, default_value = "brute")]
        method: String,
    },
    /// Certify vanishing or a lower bound for |S(a,b;c)|
    Bound { a: i64, b: i64, c: u64 },
    /// Run a configured sweep; exit 2 on any violation, 1 on an empty report
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate a Bessel function of the first kind (kind "j" only)
    Bessel { kind: String, order: u32, x: f64 },
    /// Petersson trace-series checks
    #[command(subcommand)]
    Petersson(PeterssonCommand),
}

#[derive(Subcommand)]
enum PeterssonCommand {
    /// Verify one instance; exit 0 verified, 1 hypothesis failed, 2 violated
    Verify {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        level: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        mode: Mode,
        #[arg(long)]
        d0: Option<f64>,
        #[arg(long)]
        e0: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// List admissible n for (level, k); exit 1 when none exist
    Find {
        #[arg(long)]
        level: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        mode: Mode,
        #[arg(long)]
        d0: Option<f64>,
    },
    /// Report level weights and the k0 / k1 weight thresholds
    Thresholds {
        #[arg(long)]
        level: u64,
        #[arg(long)]
        d0: Option<f64>,
        #[arg(long)]
        e0: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli.command, format) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command, format: Format) -> Result<u8> {
    match command {
        Command::Eval { a, b, c, method } => cmd_eval(a, b, c, &method, format),
        Command::Bound { a, b, c } => cmd_bound(a, b, c, format),
        Command::Sweep { config } => cmd_sweep(&config, format),
        Command::Bessel { kind, order, x } => cmd_bessel(&kind, order, x, format),
        Command::Petersson(sub) => match sub {
            PeterssonCommand::Verify {
                m,
                n,
                level,
                k,
                mode,
                d0,
                e0,
                eps,
            } => cmd_verify(m, n, level, k, mode, d0, e0, eps, format),
            PeterssonCommand::Find { level, k, mode, d0 } => {
                cmd_find(level, k, mode, d0, format)
            }
            PeterssonCommand::Thresholds { level, d0, e0 } => {
                cmd_thresholds(level, d0, e0, format)
            }
        },
    }
}

fn emit(rec: &Record, format: Format) {
    match format {
        Format::Json => println!("{}", to_json(rec)),
        Format::Csv => print!("{}", to_csv(std::slice::from_ref(rec))),
    }
}

fn cmd_eval(a: i64, b: i64, c: u64, method: &str, format: Format) -> Result<u8> {
    let eval: KloostermanValue = match method {
        "brute" => eval_bruteforce(a, b, c),
        "mult" | "multiplicative" => eval_multiplicative(a, b, c),
        "salie" => {
            let fac = factorize(c)?;
            match fac.factors.as_slice() {
                [(p, e)] if *e >= 2 && *p != 2 => eval_salie(a, b, *p, *e)?,
                _ => bail!(
                    "method salie needs c = p^beta with odd p and beta >= 2, got c = {c}"
                ),
            }
        }
        other => bail!("unknown method {other:?} (expected brute, salie, or mult)"),
    };
    let mut rec = Record::new();
    rec.push("a", Value::I(a));
    rec.push("b", Value::I(b));
    rec.push("c", Value::U(c));
    rec.push("value", Value::F(eval.value));
    rec.push("abs_error", Value::F(eval.abs_error));
    rec.push("method", Value::S(eval.method.as_str().to_string()));
    emit(&rec, format);
    Ok(0)
}

fn cmd_bound(a: i64, b: i64, c: u64, format: Format) -> Result<u8> {
    let cert = certify_lower_bound(a, b, c)?;
    let qr: Vec<Value> = cert
        .hypotheses
        .qr_by_prime
        .iter()
        .map(|s| {
            let mut rec = Record::new();
            rec.push("p", Value::U(s.p));
            rec.push("residue", Value::B(s.residue));
            Value::Object(rec)
        })
        .collect();
    let mut hyp = Record::new();
    hyp.push("c_odd", Value::B(cert.hypotheses.c_odd));
    hyp.push("ab_coprime_to_c", Value::B(cert.hypotheses.ab_coprime_to_c));
    hyp.push("qr_by_prime", Value::Array(qr));

    let mut rec = Record::new();
    rec.push("a", Value::I(cert.a));
    rec.push("b", Value::I(cert.b));
    rec.push("c", Value::U(cert.c));
    rec.push("powerful_part", Value::U(cert.split.d));
    rec.push("squarefree_part", Value::U(cert.split.f));
    rec.push("verdict", Value::S(cert.verdict.as_str().to_string()));
    rec.push("theorem_bound", Value::F(cert.theorem_bound));
    rec.push("corollary_bound", Value::F(cert.corollary_bound));
    rec.push("log_theorem_bound", Value::F(cert.log_theorem_bound));
    rec.push("log_corollary_bound", Value::F(cert.log_corollary_bound));
    rec.push("hypotheses", Value::Object(hyp));
    emit(&rec, format);
    Ok(0)
}

fn cmd_sweep(path: &PathBuf, format: Format) -> Result<u8> {
    let config = SweepConfig::load(path)?;
    let started = Instant::now();
    let outcome = sweep::run_sweep(&config)?;
    // Timing goes to stderr so that reports stay byte-identical per seed.
    eprintln!("sweep wall time: {:.3}s", started.elapsed().as_secs_f64());
    match format {
        Format::Json => println!("{}", to_json(&outcome.report)),
        Format::Csv => print!("{}", to_csv(&outcome.cases)),
    }
    Ok(outcome.exit_code as u8)
}

fn cmd_bessel(kind: &str, order: u32, x: f64, format: Format) -> Result<u8> {
    if kind != "j" {
        bail!("unknown Bessel kind {kind:?} (only \"j\" is implemented)");
    }
    let eval = bessel_j(order, x)?;
    let mut rec = Record::new();
    rec.push("order", Value::U(order as u64));
    rec.push("x", Value::F(x));
    rec.push("value", Value::F(eval.value));
    rec.push("abs_error", Value::F(eval.abs_error));
    rec.push("method", Value::S(eval.method.as_str().to_string()));
    emit(&rec, format);
    Ok(0)
}

fn hypothesis_values(checks: &[klooster::petersson::HypothesisCheck]) -> Value {
    Value::Array(
        checks
            .iter()
            .map(|h| {
                let mut rec = Record::new();
                rec.push("name", Value::S(h.name.to_string()));
                rec.push("passed", Value::B(h.passed));
                rec.push("detail", Value::S(h.detail.clone()));
                Value::Object(rec)
            })
            .collect(),
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    m: u64,
    n: u64,
    level: u64,
    k: u64,
    mode: Mode,
    d0: Option<f64>,
    e0: Option<f64>,
    eps: Option<f64>,
    format: Format,
) -> Result<u8> {
    let mut inst = TraceInstance::new(m, n, level, k)?;
    if let Some(d0) = d0 {
        inst = inst.with_d0(d0)?;
    }
    if let Some(e0) = e0 {
        inst = inst.with_e0(e0)?;
    }
    if let Some(eps) = eps {
        inst = inst.with_epsilon(eps)?;
    }
    let check = verify(&inst, mode).context("verifying Petersson instance")?;

    let mut rec = Record::new();
    rec.push("m", Value::U(check.instance.m));
    rec.push("n", Value::U(check.instance.n));
    rec.push("level", Value::U(check.instance.level));
    rec.push("k", Value::U(check.instance.k));
    rec.push("mode", Value::S(check.mode.as_str().to_string()));
    rec.push("d0", Value::F(check.instance.d0));
    rec.push("e0", Value::F(check.instance.e0));
    rec.push("epsilon", Value::F(check.instance.epsilon));
    rec.push("series_value", Value::F(check.series_value));
    rec.push("series_error", Value::F(check.series_error));
    rec.push("main_term", Value::F(check.main_term));
    rec.push("tail_numeric_bound", Value::F(check.tail_numeric_bound));
    rec.push("tail_paper_bound", Value::F(check.tail_paper_bound));
    rec.push("theorem_bound", Value::F(check.theorem_bound));
    rec.push("b_max", Value::U(check.b_max));
    rec.push("hypotheses", hypothesis_values(&check.hypotheses));
    rec.push("verdict", Value::S(check.verdict.as_str().to_string()));
    emit(&rec, format);
    Ok(match check.verdict {
        VerifyVerdict::Verified => 0,
        VerifyVerdict::HypothesisFailed => 1,
        VerifyVerdict::Violated => 2,
    })
}

fn cmd_find(level: u64, k: u64, mode: Mode, d0: Option<f64>, format: Format) -> Result<u8> {
    let d0 = d0.unwrap_or(0.999);
    let admissible = find_admissible(level, k, mode, d0)?;
    match format {
        Format::Json => {
            let mut rec = Record::new();
            rec.push("level", Value::U(level));
            rec.push("k", Value::U(k));
            rec.push("mode", Value::S(mode.as_str().to_string()));
            rec.push("d0", Value::F(d0));
            rec.push("count", Value::U(admissible.len() as u64));
            rec.push(
                "admissible",
                Value::Array(admissible.iter().map(|&n| Value::U(n)).collect()),
            );
            emit(&rec, format);
        }
        Format::Csv => {
            let rows: Vec<Record> = admissible
                .iter()
                .map(|&n| {
                    let mut rec = Record::new();
                    rec.push("level", Value::U(level));
                    rec.push("k", Value::U(k));
                    rec.push("mode", Value::S(mode.as_str().to_string()));
                    rec.push("d0", Value::F(d0));
                    rec.push("n", Value::U(n));
                    rec
                })
                .collect();
            print!("{}", to_csv(&rows));
        }
    }
    Ok(if admissible.is_empty() { 1 } else { 0 })
}

fn cmd_thresholds(level: u64, d0: Option<f64>, e0: Option<f64>, format: Format) -> Result<u8> {
    let d0 = d0.unwrap_or(0.999);
    let t = thresholds(level, d0, e0)?;
    let mut rec = Record::new();
    rec.push("level", Value::U(level));
    rec.push("d0", Value::F(d0));
    rec.push("e0", Value::F(e0.unwrap_or(0.3 * 0.327 * t.hn)));
    rec.push("h0", Value::F(t.h0));
    rec.push("a0", Value::F(t.a0));
    rec.push("gn", Value::F(t.gn));
    rec.push("hn", Value::F(t.hn));
    rec.push("k0", Value::U(t.k0));
    rec.push("k1", t.k1.map(Value::U).unwrap_or(Value::Null));
    emit(&rec, format);
    Ok(0)
}
