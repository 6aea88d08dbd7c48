use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use morsefol::gen::{generate, Family, GenOptions, GenSpec};
use morsefol::io::{export_dot, parse, serialize, write_certificate, write_trace};
use morsefol::model::validate;
use morsefol::{
    classify, is_stable, normalize, Assembly, BlockId, ClassifyError, OrderPolicy, RewriteError,
};

/// Morse foliations of S³ as block assemblies: validation, normalization,
/// classification and stability.
#[derive(Parser)]
#[command(name = "morsefol", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an assembly against the structural rules.
    Validate(Input),
    /// Eliminate trivial pairs, bubbles and truncated bubbles.
    Normalize {
        #[command(flatten)]
        input: Input,
        /// `innermost`, or `explicit:FILE` with one bubble path per line.
        #[arg(long, default_value = "innermost")]
        order: String,
        /// Write the rewrite trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print the verdict token; `--output` receives the certificate.
    Classify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Decide C¹-stability and name a witness when unstable.
    Stability(Input),
    /// Generate an assembly of a named family.
    Gen(GenArgs),
    /// Export the block graph in DOT.
    Dot {
        #[command(flatten)]
        input: Input,
        /// Classify first and highlight the component.
        #[arg(long)]
        highlight: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Input {
    /// FOL file, `-` for standard input.
    #[arg(long, default_value = "-")]
    input: String,
}

#[derive(Args)]
struct GenArgs {
    /// e.g. two_centers, simply_connected_chain(3), random(5,1,0)
    #[arg(long)]
    family: Family,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    trivial_bubbles: u32,
    #[arg(long, default_value_t = 0)]
    extra_bands: u32,
    #[arg(long, default_value_t = 0)]
    charts: u32,
    #[arg(long)]
    multi_singular: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

enum Failure {
    /// Validation failure or theorem violation.
    Rejected(String),
    /// Unreadable input or malformed arguments.
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Rejected(_) => 1,
            Failure::Usage(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Rejected(m) | Failure::Usage(m) => m,
        }
    }
}

type Outcome = Result<(), Failure>;

fn read_input(input: &Input) -> Result<Assembly, Failure> {
    let text = if input.input == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(&input.input)
            .map_err(|e| Failure::Usage(format!("{}: {e}", input.input)))?
    };
    parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", input.input)))
}

fn emit(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Usage(format!("stdout: {e}"))),
    }
}

fn rewrite_failure(e: RewriteError) -> Failure {
    match e {
        RewriteError::InvalidSite(_) => Failure::Usage(e.to_string()),
        _ => Failure::Rejected(e.to_string()),
    }
}

fn classify_failure(e: ClassifyError) -> Failure {
    match e {
        ClassifyError::Rewrite(r) => rewrite_failure(r),
        _ => Failure::Rejected(e.to_string()),
    }
}

fn order_policy(order: &str) -> Result<OrderPolicy, Failure> {
    if order == "innermost" {
        return Ok(OrderPolicy::InnermostThenId);
    }
    let Some(file) = order.strip_prefix("explicit:") else {
        return Err(Failure::Usage(format!("unknown order `{order}`")));
    };
    let text = fs::read_to_string(file).map_err(|e| Failure::Usage(format!("{file}: {e}")))?;
    let mut paths = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let path: Result<Vec<BlockId>, _> = line.split('/').map(str::parse).collect();
        paths.push(path.map_err(|_| {
            Failure::Usage(format!("{file}: line {}: bad bubble path `{line}`", no + 1))
        })?);
    }
    Ok(OrderPolicy::Explicit(paths))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate(input) => {
            let a = read_input(&input)?;
            let report = validate(&a);
            if report.is_valid() {
                println!("valid");
                Ok(())
            } else {
                print!("{report}");
                Err(Failure::Rejected(format!("{} is not valid", a.name)))
            }
        }
        Command::Normalize {
            input,
            order,
            trace,
            output,
        } => {
            let a = read_input(&input)?;
            let policy = order_policy(&order)?;
            let (b, steps) = normalize(&a, &policy).map_err(rewrite_failure)?;
            if let Some(t) = trace {
                emit(Some(&t), &write_trace(&steps))?;
            }
            emit(output.as_deref(), &serialize(&b))
        }
        Command::Classify {
            input,
            trace,
            output,
        } => {
            let a = read_input(&input)?;
            let cert = classify(&a).map_err(classify_failure)?;
            if let Some(t) = trace {
                emit(Some(&t), &write_trace(&cert.trace))?;
            }
            if let Some(o) = output {
                emit(Some(&o), &write_certificate(&cert))?;
            }
            println!("{}", cert.verdict);
            Ok(())
        }
        Command::Stability(input) => {
            let a = read_input(&input)?;
            let v = is_stable(&a).map_err(classify_failure)?;
            println!("{v}");
            Ok(())
        }
        Command::Gen(g) => {
            let options = GenOptions {
                trivial_bubbles: g.trivial_bubbles,
                extra_bands: g.extra_bands,
                charts: g.charts,
                multi_singular: g.multi_singular,
            };
            let spec = GenSpec::new(g.seed, g.family).with_options(options);
            let a = generate(&spec).map_err(|e| Failure::Usage(e.to_string()))?;
            emit(g.output.as_deref(), &serialize(&a))
        }
        Command::Dot {
            input,
            highlight,
            output,
        } => {
            let a = read_input(&input)?;
            let cert = if highlight {
                Some(classify(&a).map_err(classify_failure)?)
            } else {
                None
            };
            emit(output.as_deref(), &export_dot(&a, cert.as_ref()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("morsefol: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
