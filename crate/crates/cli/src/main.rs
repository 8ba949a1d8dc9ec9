use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use volcano_cli::cache::Cache;
use volcano_cli::commands::{self, exit_code};
use volcano_cli::crosscheck::{self, FaultSite};
use volcano_cli::spec::parse_curve;
use volcano_cli::table;

#[derive(Parser)]
#[command(name = "volcano", version, about = "Isogeny volcanoes and Sha of constant elliptic curves over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Cache directory (default: $VOLCANO_CACHE_DIR; no caching when unset).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    no_cache: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// List the ordinary isogeny classes over GF(p^n).
    Classes {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<i64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Build and validate the l-volcanoes on one isogeny class.
    Volcano {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        t: i64,
        #[arg(long)]
        ell: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Sha(E/k(F)) for curves given as `p[,n];a,b`.
    Sha {
        #[arg(long, allow_hyphen_values = true)]
        e: String,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Sigma triple and phi-Selmer shape for the kernel-th rational l-kernel of E.
    Selmer {
        #[arg(long, allow_hyphen_values = true)]
        e: String,
        #[arg(long)]
        kernel: usize,
        #[arg(long)]
        ell: u64,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run every invariant suite over all primes up to --p-max.
    Crosscheck {
        #[arg(long, default_value_t = 61)]
        p_max: u64,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        ell: Vec<u64>,
        /// Largest p for the torsion-oracle, BSD and Selmer suites.
        #[arg(long, default_value_t = crosscheck::DEFAULT_DESCENT_P_MAX)]
        descent_p_max: u64,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Test hook: duplicate one edge of the first strict component at `p:t:l`.
        #[arg(long, hide = true)]
        inject_fault: Option<FaultSite>,
    },
}

enum Outcome {
    Ok,
    Invariant(Vec<String>),
}

fn render(doc: &Value, format: Format) -> Result<String, String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(doc).expect("serializable") + "\n"),
        Format::Table => Ok(table::render(doc)),
        Format::Dot => Err("--format dot is only available for `volcano`".into()),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn execute(cli: &Cli) -> Result<(String, Outcome), (i32, String)> {
    let lib = |e: volcano_sha::Error| (exit_code(&e), e.to_string());
    let usage = |m: String| (2, m);
    let cache = Cache::from_env(cli.common.cache_dir.clone(), cli.common.no_cache);
    match &cli.command {
        Command::Classes { p, n, t, format } => {
            let doc = to_value(&commands::classes(*p, *n, *t).map_err(lib)?);
            Ok((render(&doc, *format).map_err(usage)?, Outcome::Ok))
        }
        Command::Volcano { p, n, t, ell, format } => {
            let (text, doc) = if *format == Format::Dot {
                let graphs = commands::volcano_graphs(*p, *n, *t, *ell).map_err(lib)?;
                let doc = to_value(&commands::volcano_document(*p, *n, *t, *ell, &graphs));
                (commands::volcano_dot(&graphs), doc)
            } else {
                let doc = commands::volcano_json(*p, *n, *t, *ell, &cache).map_err(lib)?;
                (render(&doc, *format).map_err(usage)?, doc)
            };
            let failures = commands::volcano_failures(&doc);
            Ok((text, if failures.is_empty() { Outcome::Ok } else { Outcome::Invariant(failures) }))
        }
        Command::Sha { e, f, format } => {
            let (e, f) = (parse_curve(e).map_err(lib)?, parse_curve(f).map_err(lib)?);
            let out = commands::sha(&e, &f).map_err(lib)?;
            let outcome = if out.passed { Outcome::Ok } else { Outcome::Invariant(vec!["sha cross-check failed".into()]) };
            Ok((render(&to_value(&out), *format).map_err(usage)?, outcome))
        }
        Command::Selmer { e, kernel, ell, f, format } => {
            let (e, f) = (parse_curve(e).map_err(lib)?, parse_curve(f).map_err(lib)?);
            let out = commands::selmer(&e, *kernel, *ell, &f).map_err(lib)?;
            Ok((render(&to_value(&out), *format).map_err(usage)?, Outcome::Ok))
        }
        Command::Crosscheck { p_max, ell, descent_p_max, jobs, format, inject_fault } => {
            let cfg = crosscheck::Config {
                p_max: *p_max,
                ells: ell.clone(),
                descent_p_max: *descent_p_max,
                jobs: *jobs,
                cache,
                fault: *inject_fault,
            };
            let out = crosscheck::run(&cfg).map_err(lib)?;
            let failures: Vec<String> = out
                .suites
                .iter()
                .filter(|s| !s.ok())
                .map(|s| {
                    let first = s.failures.first().map(String::as_str).unwrap_or("");
                    format!("suite {} failed {} of {} checks; first: {first}", s.name, s.failed, s.checks)
                })
                .collect();
            let text = render(&to_value(&out), *format).map_err(usage)?;
            Ok((text, if failures.is_empty() { Outcome::Ok } else { Outcome::Invariant(failures) }))
        }
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> std::io::Result<()> {
    match output {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok((text, outcome)) => {
            if let Err(e) = emit(&text, cli.common.output.as_ref()) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            match outcome {
                Outcome::Ok => ExitCode::SUCCESS,
                Outcome::Invariant(lines) => {
                    for l in lines {
                        eprintln!("invariant failure: {l}");
                    }
                    ExitCode::from(1)
                }
            }
        }
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code as u8)
        }
    }
}
