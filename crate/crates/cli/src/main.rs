use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use hodge_core::builders::{build, spec_of, with_cap};
use hodge_core::gallery::{self, GalleryParams, CASES};
use hodge_core::problem::{check_parameters, run_check, CheckOptions, CheckRequest, CHECKS};
use hodge_core::report::Envelope;
use hodge_core::spec::{read_json, AlgebraSpec};
use hodge_core::Error;

#[derive(Parser)]
#[command(
    name = "hodgecheck",
    version,
    about = "Exact Hodge-theoretic obstruction checks on cohomology algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Output {
    /// Print the versioned JSON report instead of text.
    #[arg(long)]
    json: bool,
    /// Exit with status 1 unless the verdict is this one (e.g. obstructed, clear, pass).
    #[arg(long, value_name = "VERDICT")]
    expect: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an algebra spec and check the algebra axioms.
    Validate {
        file: PathBuf,
        /// Override the truncation cap of exterior and blowup specs.
        #[arg(long)]
        cap: Option<usize>,
        /// Print the spec that rebuilds this algebra and stop.
        #[arg(long)]
        dump_spec: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Run one named check on a request file.
    Check {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(CHECKS))]
        name: String,
        file: PathBuf,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = gallery::DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Run a gallery case, or list the cases.
    Gallery {
        case: Option<String>,
        /// Comma-separated assignments such as `N=4,epsilon=1/3`.
        #[arg(long)]
        params: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Skip the top-degree wedge in Λ(Q²⁴).
        #[arg(long)]
        skip_heavy: bool,
        #[command(flatten)]
        out: Output,
    },
}

fn emit(env: &Envelope, out: &Output) -> Result<ExitCode, Error> {
    if out.json {
        print!("{}", env.to_json()?);
    } else {
        print!("{}", env.to_text());
    }
    Ok(match &out.expect {
        Some(want) if !verdict_is(&env.verdict, want) => {
            eprintln!("expected {want}, got {}", env.verdict);
            ExitCode::from(1)
        }
        _ => ExitCode::SUCCESS,
    })
}

fn verdict_is(verdict: &str, want: &str) -> bool {
    let norm = |s: &str| s.trim().to_ascii_uppercase().replace('-', "_");
    norm(verdict) == norm(want)
}

fn subject(path: &Path) -> String {
    path.display().to_string()
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Validate {
            file,
            cap,
            dump_spec,
            out,
        } => {
            let spec: AlgebraSpec = read_json(&file)?;
            let spec = match cap {
                Some(c) => with_cap(&spec, c)?,
                None => spec,
            };
            let a = build(&spec)?;
            if dump_spec {
                println!("{}", serde_json::to_string_pretty(&spec_of(&a))?);
                return Ok(ExitCode::SUCCESS);
            }
            let r = a.validate();
            let verdict = serde_json::to_value(r.verdict)?;
            let verdict = verdict.as_str().unwrap_or_default();
            let failed: Vec<&str> = r
                .checks
                .iter()
                .filter(|c| c.status == hodge_core::algebra::CheckStatus::Fail)
                .map(|c| c.axiom.as_str())
                .collect();
            let summary = if failed.is_empty() {
                format!("{} of formal dimension {}", r.algebra, r.dimension)
            } else {
                format!("failed: {}", failed.join(", "))
            };
            let params = json!({ "cap": cap });
            emit(
                &Envelope::new(
                    "validate",
                    &subject(&file),
                    params,
                    verdict,
                    &summary,
                    serde_json::to_value(&r)?,
                ),
                &out,
            )
        }
        Command::Check {
            name,
            file,
            cap,
            trials,
            seed,
            out,
        } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", file.display())))?;
            let req = CheckRequest::from_text(&text)
                .map_err(|e| Error::Parse(format!("{}: {e}", file.display())))?;
            let opts = CheckOptions { cap, trials, seed };
            let o = run_check(&name, &req, &opts)?;
            let mut params = check_parameters(&name, &opts);
            params["file"] = json!(subject(&file));
            emit(
                &Envelope::new("check", &name, params, &o.verdict, &o.summary, o.report),
                &out,
            )
        }
        Command::Gallery {
            case,
            params,
            seed,
            trials,
            skip_heavy,
            out,
        } => {
            let Some(case) = case else {
                for c in CASES {
                    println!(
                        "{:<20} {:<22} {}",
                        c.name,
                        c.expected.as_str(),
                        c.description
                    );
                }
                return Ok(ExitCode::SUCCESS);
            };
            let mut p = GalleryParams::default();
            if let Some(text) = params {
                p.apply_assignments(&text)?;
            }
            if let Some(s) = seed {
                p.seed = s;
            }
            if let Some(t) = trials {
                p.trials = t;
            }
            p.skip_heavy |= skip_heavy;
            let r = gallery::run_case(&case, &p)?;
            let env = Envelope::new(
                "gallery",
                &case,
                p.to_json(),
                r.verdict.as_str(),
                &r.summary,
                serde_json::to_value(&r)?,
            );
            emit(&env, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
