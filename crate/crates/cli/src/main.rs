use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use charcore::characters::{build_table, chi};
use charcore::divisibility::{
    self, reduce, theorem1_pipeline, verify_combine_congruence, verify_factorization, verify_lemma61,
    verify_lemma62, verify_lemma81, verify_lr_box, verify_pipeline, verify_prop_pm1_sweep, verify_table,
    verify_theorem3,
};
use charcore::partitions::UniformSampler;
use charcore::stats::{
    count_non_tcores, density_report, fp_log_residual, fp_series, generating_function_fp, lemma91_delta,
    lemma91_l_range, non_tcore_bound, ppower_count, ppower_count_restricted, prop4_empirical,
};
use charcore::{Abacus, CharValue, CombineConfig, Error, Partition, VerifyReport};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "charcore", version, about = "Symmetric group characters and prime-power divisibility")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// One character value χ^λ_μ.
    Chi {
        #[arg(long)]
        lambda: Partition,
        #[arg(long)]
        mu: Partition,
    },
    /// The full character table of S_n, one row per λ.
    Table {
        #[arg(long)]
        n: usize,
    },
    /// The fixpoint μ̃ of combining p^r equal parts into p^{r-1} parts.
    Reduce {
        #[arg(long)]
        mu: Partition,
        #[command(flatten)]
        prime: Prime,
    },
    /// m-core, m-quotient and weight of λ.
    Core {
        #[arg(long)]
        lambda: Partition,
        #[arg(long)]
        m: usize,
    },
    /// Decide p^r | χ^λ_μ, certifying through the core criterion when possible.
    Divides {
        #[arg(long)]
        lambda: Partition,
        #[arg(long)]
        mu: Partition,
        #[command(flatten)]
        prime: Prime,
    },
    /// Exhaustive verifiers; exit status 1 on any violation.
    Verify {
        #[command(subcommand)]
        which: Verify,
    },
    Stats {
        #[command(subcommand)]
        which: Stats,
    },
    /// Uniform random partitions of n.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
    },
}

#[derive(Args, Clone, Copy)]
struct Prime {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    r: u32,
}

impl Prime {
    fn config(self) -> charcore::Result<CombineConfig> {
        CombineConfig::new(self.p, self.r)
    }
}

#[derive(Subcommand)]
enum Verify {
    /// Orthogonality, degrees and Σ f² = n! for the table of S_n.
    Table {
        #[arg(long)]
        n: usize,
    },
    /// χ^λ_μ ≡ χ^λ_ν (mod p^r) across every combine step μ → ν.
    Combining {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        prime: Prime,
    },
    /// Core hypothesis ⇒ p^r | χ^λ_μ over λ, μ ⊢ n.
    Theorem3 {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        prime: Prime,
    },
    /// Reduction plus core certificate over λ, μ ⊢ n.
    Pipeline {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        prime: Prime,
    },
    /// One sign per group of equal-length hook sequences.
    Lemma61 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        depth: usize,
    },
    /// p divides group counts for p^{r-1}m-cores.
    Lemma62 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        prime: Prime,
    },
    /// Group count = multinomial × product of runner skew counts.
    Factorization {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        depth: usize,
    },
    /// The p-fold expansion of χ^λ on classes containing m^{p^{r-1}}.
    Pm1 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        prime: Prime,
    },
    /// p | f_{π/τ} for non-border-strip skews of prime-power size in a box.
    Lemma81 {
        #[arg(long)]
        size: usize,
        #[arg(long)]
        p: u64,
        #[arg(long = "box", default_value_t = 8)]
        side: usize,
    },
    /// f_{π/τ} = Σ f_ν c^π_{τν} for skews in a box.
    Lr {
        #[arg(long = "box", default_value_t = 6)]
        side: usize,
        #[arg(long, default_value_t = 8)]
        max_size: usize,
    },
}

#[derive(Subcommand)]
enum Stats {
    /// Entry counts of the table of S_n by divisibility and sign.
    Density {
        #[arg(long)]
        n: usize,
        #[arg(long = "mod")]
        modulus: u64,
    },
    /// Partitions of n with a t-hook, against (t+1)p(n−t).
    Tcores {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
    },
    /// Random partitions lacking r large parts repeated p^{r-1} times in μ̃.
    Prop4 {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        prime: Prime,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
    },
    /// F_p(t) by product and by series.
    Fp {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        t: f64,
    },
    /// p̃(k), and p̃(k;s) when --s is given.
    Ppower {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: usize,
        #[arg(long, requires = "s")]
        r: Option<u32>,
        #[arg(long, requires = "r")]
        s: Option<u32>,
    },
    /// Δ over the window of ℓ coprime to p starting at L.
    Delta {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        prime: Prime,
        /// Defaults to the lower end of the admissible range.
        #[arg(long)]
        l: Option<f64>,
    },
}

/// Integers beyond 64 bits become strings.
fn json_int(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(x) => json!(x),
        None => match v.to_u64() {
            Some(x) => json!(x),
            None => json!(v.to_string()),
        },
    }
}

fn json_uint(v: &num_bigint::BigUint) -> Value {
    match v.to_u64() {
        Some(x) => json!(x),
        None => json!(v.to_string()),
    }
}

enum Outcome {
    Ok,
    Violations,
}

struct Output {
    format: Format,
    sink: Box<dyn Write>,
}

impl Output {
    fn json(&mut self, value: &Value) -> io::Result<()> {
        serde_json::to_writer(&mut self.sink, value)?;
        writeln!(self.sink)
    }

    fn csv(&mut self, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(&mut self.sink);
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()
    }

    /// A flat record: `key=value` lines, a one-row CSV, or a JSON object.
    fn record<K: AsRef<str>>(&mut self, fields: &[(K, Value)]) -> io::Result<()> {
        match self.format {
            Format::Json => {
                let map: serde_json::Map<String, Value> =
                    fields.iter().map(|(k, v)| (k.as_ref().to_string(), v.clone())).collect();
                self.json(&Value::Object(map))
            }
            Format::Csv => {
                let header: Vec<&str> = fields.iter().map(|(k, _)| k.as_ref()).collect();
                let row: Vec<String> = fields.iter().map(|(_, v)| plain(v)).collect();
                self.csv(&header, &[row])
            }
            Format::Text => {
                for (k, v) in fields {
                    writeln!(self.sink, "{}={}", k.as_ref(), plain(v))?;
                }
                Ok(())
            }
        }
    }

    fn report(&mut self, report: &VerifyReport) -> io::Result<Outcome> {
        self.record(&[
            ("checked", json!(report.checked)),
            ("skipped", json!(report.skipped)),
            ("violated", json!(report.violated)),
            ("first_witness", report.first_witness.clone().map_or(Value::Null, Value::String)),
        ])?;
        Ok(if report.passed() { Outcome::Ok } else { Outcome::Violations })
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        Value::Array(items) => items.iter().map(plain).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn label(p: &Partition) -> Value {
    json!(p.to_string())
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let text = e.to_string();
                let line = text.lines().next().unwrap_or("invalid arguments");
                eprintln!("{}", line.trim_start_matches("error: ").trim());
                return ExitCode::from(2);
            }
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("--threads must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .expect("thread pool configured once");
    }
    let sink: Box<dyn Write> = match &cli.out {
        None => Box::new(BufWriter::new(io::stdout().lock())),
        Some(path) => match File::create(path) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => {
                eprintln!("cannot create {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
    };
    let mut out = Output { format: cli.format, sink };
    let result = run(cli.command, &mut out).and_then(|o| {
        out.sink.flush()?;
        Ok(o)
    });
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violations) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("write failed: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command, out: &mut Output) -> Result<Outcome, Failure> {
    match command {
        Command::Chi { lambda, mu } => {
            let v: CharValue = chi(&lambda, &mu)?;
            match out.format {
                Format::Text => writeln!(out.sink, "{v}")?,
                _ => out.record(&[("lambda", label(&lambda)), ("mu", label(&mu)), ("value", json_int(&v))])?,
            }
        }
        Command::Table { n } => table(n, out)?,
        Command::Reduce { mu, prime } => {
            let trace = reduce(&mu, &prime.config()?);
            match out.format {
                Format::Text => writeln!(out.sink, "{}", trace.output)?,
                Format::Json => out.json(&json!({
                    "input": trace.input.to_string(),
                    "output": trace.output.to_string(),
                    "steps": trace.steps.iter()
                        .map(|s| json!({"part": s.part, "before": s.before, "after": s.after}))
                        .collect::<Vec<_>>(),
                }))?,
                Format::Csv => {
                    let rows: Vec<Vec<String>> = trace
                        .steps
                        .iter()
                        .map(|s| vec![s.part.to_string(), s.before.to_string(), s.after.to_string()])
                        .collect();
                    out.csv(&["part", "before", "after"], &rows)?;
                }
            }
        }
        Command::Core { lambda, m } => {
            if m == 0 {
                return Err(Failure::Usage("--m must be positive".into()));
            }
            let q = Abacus::from_partition(&lambda).quotient(m);
            out.record(&[
                ("lambda", label(&lambda)),
                ("m", json!(m)),
                ("is_core", json!(q.weight() == 0)),
                ("core", label(&q.core())),
                ("weight", json!(q.weight())),
                ("quotient", Value::Array(q.partitions().iter().map(label).collect())),
            ])?;
        }
        Command::Divides { lambda, mu, prime } => {
            let outcome = theorem1_pipeline(&lambda, &mu, &prime.config()?)?;
            let cert = outcome.certificate.as_ref();
            out.record(&[
                ("lambda", label(&lambda)),
                ("mu", label(&mu)),
                ("divides", json!(outcome.divides)),
                ("certified", json!(cert.is_some())),
                ("reduced", cert.map_or(Value::Null, |c| label(&c.reduced))),
                ("parts", cert.map_or(Value::Null, |c| json!(c.parts))),
            ])?;
        }
        Command::Verify { which } => return verify(which, out),
        Command::Stats { which } => return stats(which, out),
        Command::Sample { n, seed, count } => {
            let sampler = UniformSampler::new(n)?;
            let draws: Vec<Partition> = (0..count)
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(i);
                    sampler.sample(&mut rng)
                })
                .collect();
            match out.format {
                Format::Text => {
                    for d in &draws {
                        writeln!(out.sink, "{d}")?;
                    }
                }
                Format::Json => out.json(&json!({
                    "n": n,
                    "seed": seed,
                    "samples": draws.iter().map(label).collect::<Vec<_>>(),
                }))?,
                Format::Csv => {
                    let rows: Vec<Vec<String>> =
                        draws.iter().enumerate().map(|(i, d)| vec![i.to_string(), d.to_string()]).collect();
                    out.csv(&["index", "partition"], &rows)?;
                }
            }
        }
    }
    Ok(Outcome::Ok)
}

/// Rows are written one at a time after the table is computed.
fn table(n: usize, out: &mut Output) -> Result<(), Failure> {
    let t = build_table::<CharValue>(n)?;
    let labels: Vec<String> = t.partitions().iter().map(|p| p.to_string()).collect();
    match out.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out.sink);
            w.write_record(std::iter::once("lambda").chain(labels.iter().map(String::as_str)))?;
            for (row, lambda) in labels.iter().enumerate() {
                let values = t.row(row).iter().map(|v| v.to_string());
                w.write_record(std::iter::once(lambda.clone()).chain(values))?;
            }
            w.flush()?;
        }
        Format::Json => {
            write!(out.sink, "{{\"n\":{n},\"classes\":")?;
            serde_json::to_writer(&mut out.sink, &labels).map_err(io::Error::from)?;
            write!(out.sink, ",\"rows\":[")?;
            for (row, lambda) in labels.iter().enumerate() {
                if row > 0 {
                    write!(out.sink, ",")?;
                }
                let values: Vec<Value> = t.row(row).iter().map(json_int).collect();
                serde_json::to_writer(&mut out.sink, &json!({"lambda": lambda, "values": values}))
                    .map_err(io::Error::from)?;
            }
            writeln!(out.sink, "]}}")?;
        }
        Format::Text => {
            writeln!(out.sink, "{}", labels.join(" "))?;
            for (row, lambda) in labels.iter().enumerate() {
                let values: Vec<String> = t.row(row).iter().map(|v| v.to_string()).collect();
                writeln!(out.sink, "{lambda}: {}", values.join(" "))?;
            }
        }
    }
    Ok(())
}

fn verify(which: Verify, out: &mut Output) -> Result<Outcome, Failure> {
    let report = match which {
        Verify::Table { n } => verify_table(n)?,
        Verify::Combining { n, prime } => verify_combine_congruence(n, &prime.config()?)?,
        Verify::Theorem3 { n, prime } => verify_theorem3(n, &prime.config()?)?,
        Verify::Pipeline { n, prime } => verify_pipeline(n, &prime.config()?)?,
        Verify::Lemma61 { n, m, depth } => verify_lemma61(n, m, depth)?,
        Verify::Lemma62 { n, m, prime } => verify_lemma62(n, m, &prime.config()?)?,
        Verify::Factorization { n, m, depth } => verify_factorization(n, m, depth)?,
        Verify::Pm1 { n, m, prime } => verify_prop_pm1_sweep(n, m, &prime.config()?)?,
        Verify::Lemma81 { size, p, side } => verify_lemma81(size, p, side, side)?,
        Verify::Lr { side, max_size } => verify_lr_box(side, side, max_size)?,
    };
    Ok(out.report(&report)?)
}

fn stats(which: Stats, out: &mut Output) -> Result<Outcome, Failure> {
    match which {
        Stats::Density { n, modulus } => {
            let r = density_report(n, modulus)?;
            out.record(&[
                ("n", json!(r.n)),
                ("modulus", json!(r.modulus)),
                ("total", json!(r.total)),
                ("divisible", json!(r.divisible)),
                ("zero", json!(r.zero)),
                ("positive", json!(r.positive)),
                ("negative", json!(r.negative)),
                ("divisible_density", json!(r.divisible_density())),
                ("zero_density", json!(r.zero_density())),
            ])?;
        }
        Stats::Tcores { n, t } => {
            if t == 0 {
                return Err(Failure::Usage("--t must be positive".into()));
            }
            let count = count_non_tcores(n, t)?;
            let bound = non_tcore_bound(n, t);
            let within = t > n || count <= bound;
            out.record(&[
                ("n", json!(n)),
                ("t", json!(t)),
                ("non_cores", json_uint(&count)),
                ("bound", json_uint(&bound)),
                ("within_bound", json!(within)),
            ])?;
            if !within {
                return Ok(Outcome::Violations);
            }
        }
        Stats::Prop4 { n, prime, samples, seed } => {
            let r = prop4_empirical(n, &prime.config()?, samples, seed)?;
            out.record(&[
                ("n", json!(r.n)),
                ("p", json!(r.p)),
                ("r", json!(r.r)),
                ("samples", json!(r.samples)),
                ("seed", json!(r.seed)),
                ("threshold", json!(r.threshold)),
                ("failures", json!(r.failures)),
                ("failure_fraction", json!(r.failure_fraction)),
                ("ci_low", json!(r.ci_low)),
                ("ci_high", json!(r.ci_high)),
            ])?;
        }
        Stats::Fp { p, t } => {
            if !divisibility::is_prime(p) {
                return Err(Error::NotPrime(p).into());
            }
            let product = generating_function_fp::<f64>(p, t)?;
            // Enough terms that the series tail is negligible at this t.
            let terms = ((t * 80.0).ceil() as usize).clamp(64, 20_000);
            let (series, series_tail) = fp_series::<f64>(p, t, terms)?;
            out.record(&[
                ("p", json!(p)),
                ("t", json!(t)),
                ("log_fp", json!(product.log_value)),
                ("fp", json!(product.value())),
                ("log_tail_bound", json!(product.log_tail_bound)),
                ("series", json!(series)),
                ("series_terms", json!(terms)),
                ("series_tail_bound", json!(series_tail)),
                ("log_residual", json!(fp_log_residual::<f64>(p, t)?)),
            ])?;
        }
        Stats::Ppower { p, k, r, s } => {
            if !divisibility::is_prime(p) {
                return Err(Error::NotPrime(p).into());
            }
            let full = ppower_count(p, k)?;
            let mut fields = vec![("p", json!(p)), ("k", json!(k)), ("count", json_uint(&full))];
            if let (Some(r), Some(s)) = (r, s) {
                let cfg = CombineConfig::new(p, r)?;
                let restricted = ppower_count_restricted(&cfg, s, k)?;
                fields.push(("r", json!(r)));
                fields.push(("s", json!(s)));
                fields.push(("restricted", json_uint(&restricted)));
                fields.push(("difference", json_uint(&(&full - &restricted))));
            }
            out.record(&fields)?;
        }
        Stats::Delta { n, prime, l } => {
            let cfg = prime.config()?;
            let l = l.unwrap_or_else(|| lemma91_l_range(n, &cfg).0);
            let r = lemma91_delta(n, &cfg, l)?;
            let mut fields: Vec<(String, Value)> = [
                ("n", json!(r.n)),
                ("p", json!(r.p)),
                ("r", json!(r.r)),
                ("s", json!(r.s)),
                ("x", json!(r.x)),
                ("l", json!(r.l)),
                ("window_len", json!(r.window.len())),
                ("delta", json!(r.delta)),
                ("delta_tail_bound", json!(r.delta_tail_bound)),
            ]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
            let mut failed = false;
            for check in &r.checks {
                fields.push((format!("{}_lhs", check.name), json!(check.lhs)));
                fields.push((format!("{}_rhs", check.name), json!(check.rhs)));
                if check.satisfied == Some(false) {
                    failed = true;
                }
            }
            out.record(&fields)?;
            if failed {
                return Ok(Outcome::Violations);
            }
        }
    }
    Ok(Outcome::Ok)
}
