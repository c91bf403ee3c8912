//! `torcode`: arithmetic codings of hyperbolic toral automorphisms from the
//! command line.
//!
//! Exit codes: 0 on success, 1 on invalid input, 2 when a search or size
//! bound is exceeded.

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use torcode_cli::commands::{self, CliError, Outcome};
use torcode_cli::render;

#[derive(Parser)]
#[command(
    name = "torcode",
    version,
    about = "Arithmetic codings of hyperbolic automorphisms of the 2-torus"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full report: form, integral minimum, BAC verdict, minimal codings, kernels.
    Analyze {
        /// Row-major matrix "a,b,c,d".
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
    },
    /// List bijective codings ±g^k·t for k in a range.
    Bac {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long, default_value_t = -2, allow_negative_numbers = true)]
        kmin: i64,
        #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
        kmax: i64,
    },
    /// Integral minimum and one minimal coding per base orbit.
    Mac {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
    },
    /// Image of a symbolic word under a coding.
    Encode {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        /// Parameter pair "p,q"; defaults to the first bijective (else minimal) coding.
        #[arg(long, allow_hyphen_values = true)]
        param: Option<String>,
        /// Word such as "zero|1 0 1|zero @-1" or "1 0 1".
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        /// Window used for the round-trip check.
        #[arg(long, default_value_t = 32)]
        window: u32,
    },
    /// Symbolic word of a rational torus point under a bijective coding.
    Decode {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long, allow_hyphen_values = true)]
        param: Option<String>,
        /// Point "x,y" with rational coordinates, e.g. "1/5,2/5".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 32)]
        window: u32,
    },
    /// Tools for indefinite binary quadratic forms "a,b,c".
    Forms {
        #[command(subcommand)]
        cmd: FormsCmd,
    },
    /// Draw the fundamental domain, the hexagon and the kernel as SVG.
    Plot {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long, allow_hyphen_values = true)]
        param: Option<String>,
        /// Output path for the SVG file.
        #[arg(long)]
        svg: String,
    },
}

#[derive(Subcommand)]
enum FormsCmd {
    /// A reduced form and the transform reaching it.
    Reduce {
        #[arg(allow_hyphen_values = true)]
        form: String,
    },
    /// The cycle of reduced forms.
    Cycle {
        #[arg(allow_hyphen_values = true)]
        form: String,
    },
    /// Equivalence witnesses, proper and improper.
    Equiv {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
    },
    /// Smallest nonzero |f(x, y)|.
    Min {
        #[arg(allow_hyphen_values = true)]
        form: String,
        /// Also run the brute-force oracle over |x|, |y| ≤ N.
        #[arg(long)]
        bound: Option<i64>,
    },
    /// Orbit representatives of the solutions of f(x, y) = m.
    Represent {
        #[arg(allow_hyphen_values = true)]
        form: String,
        #[arg(allow_hyphen_values = true)]
        value: String,
        #[arg(long)]
        bound: Option<i64>,
    },
}

fn param(p: &Option<String>) -> Result<Option<(BigInt, BigInt)>, CliError> {
    p.as_deref().map(commands::parse_param).transpose()
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    use commands::{parse_form, parse_matrix};
    match &cli.cmd {
        Cmd::Analyze { matrix } => commands::analyze(&parse_matrix(matrix)?),
        Cmd::Bac { matrix, kmin, kmax } => commands::bac(&parse_matrix(matrix)?, *kmin, *kmax),
        Cmd::Mac { matrix } => commands::mac(&parse_matrix(matrix)?),
        Cmd::Encode {
            matrix,
            param: p,
            word,
            window,
        } => commands::encode(&parse_matrix(matrix)?, param(p)?.as_ref(), word, *window),
        Cmd::Decode {
            matrix,
            param: p,
            point,
            window,
        } => commands::decode(&parse_matrix(matrix)?, param(p)?.as_ref(), point, *window),
        Cmd::Forms { cmd } => match cmd {
            FormsCmd::Reduce { form } => commands::forms_reduce(&parse_form(form)?),
            FormsCmd::Cycle { form } => commands::forms_cycle(&parse_form(form)?),
            FormsCmd::Equiv { f, g } => commands::forms_equiv(&parse_form(f)?, &parse_form(g)?),
            FormsCmd::Min { form, bound } => commands::forms_min(&parse_form(form)?, *bound),
            FormsCmd::Represent { form, value, bound } => {
                let m: BigInt = value.parse().map_err(|_| {
                    CliError::invalid(format!("expected an integer, got {value:?}"))
                })?;
                commands::forms_represent(&parse_form(form)?, &m, *bound)
            }
        },
        Cmd::Plot {
            matrix,
            param: p,
            svg,
        } => {
            let (out, doc) = commands::plot(&parse_matrix(matrix)?, param(p)?.as_ref(), svg)?;
            std::fs::write(svg, doc)
                .map_err(|e| CliError::invalid(format!("cannot write {svg}: {e}")))?;
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are invalid input; help and version are not errors
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(out) => {
            let text = match cli.format {
                Format::Text => render::render(&out),
                Format::Json => {
                    for w in &out.warnings {
                        eprintln!("warning: {w}");
                    }
                    serde_json::to_string_pretty(&out.to_json()).expect("JSON output") + "\n"
                }
            };
            // a closed pipe downstream is not an error of ours
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
