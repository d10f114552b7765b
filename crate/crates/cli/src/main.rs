mod cache;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use borcherds_core::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "borcherds", version, about = "Eisenstein series coefficients and Borcherds product inputs")]
pub struct Cli {
    /// JSON config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Auto,
    Naive,
    Gauss,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Signature, determinant, level and discriminant group.
    Info { lattice: Option<PathBuf> },
    /// Number of solutions of Q(x) = m mod a on mu + L.
    Repnum {
        lattice: Option<PathBuf>,
        #[arg(long)]
        m: String,
        /// Residues of the discriminant element, comma separated.
        #[arg(long, default_value = "0")]
        mu: String,
        #[arg(long)]
        modulus: u64,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Eisenstein series coefficients, or the expansion up to --max-exp.
    Eis {
        lattice: Option<PathBuf>,
        #[arg(long)]
        max_exp: Option<String>,
        #[arg(long)]
        m: Option<String>,
        #[arg(long, default_value = "0")]
        mu: String,
        /// Use certified intervals instead of closed-form L-values.
        #[arg(long)]
        interval: bool,
        /// Odd rank: use the character sign exactly as printed.
        #[arg(long)]
        as_printed: bool,
    },
    /// Weil representation matrices, relations and invariants.
    Weil {
        lattice: Option<PathBuf>,
        #[arg(long)]
        invariants: bool,
    },
    /// h = Delta^-b E with its positivity checks.
    HSeries {
        lattice: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        b: i64,
        #[arg(long, default_value = "5")]
        trunc: String,
        /// Fixture file whose element supplies E instead of the Eisenstein series.
        #[arg(long)]
        provider: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        provider_index: usize,
        #[arg(long, default_value_t = 3)]
        radius: i64,
    },
    /// Split a principal part into two non-negative ones.
    Decompose {
        lattice: Option<PathBuf>,
        #[arg(long)]
        pp: PathBuf,
        #[arg(long)]
        strict_paper: bool,
        #[arg(long)]
        minimal: bool,
        #[arg(long)]
        provider: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        provider_index: usize,
        #[arg(long, default_value_t = 3)]
        radius: i64,
    },
    /// Pair a principal part against the cusp forms of a fixture.
    Obstruct {
        lattice: Option<PathBuf>,
        #[arg(long)]
        pp: PathBuf,
        #[arg(long)]
        fixture: PathBuf,
    },
    /// Integral principal part with non-zero constant term supported on a spec.
    Prescribe {
        lattice: Option<PathBuf>,
        /// Admissible set document.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// `M` or `M@R1,R2,..`; repeatable.
        #[arg(long = "member")]
        members: Vec<String>,
        #[arg(long, default_value_t = 4)]
        bound: i64,
        #[arg(long)]
        fixture: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        budget: usize,
        #[arg(long)]
        assume_witt_below_two: bool,
        /// Only report the fixture truncation the search needs.
        #[arg(long)]
        required_trunc: bool,
        #[arg(long, default_value_t = 3)]
        radius: i64,
    },
    /// Non-negative principal part whose product vanishes on Z(m, mu).
    VanishOn {
        lattice: Option<PathBuf>,
        #[arg(long)]
        m: String,
        #[arg(long, default_value = "0")]
        mu: String,
        #[arg(long)]
        fixture: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        budget: usize,
        #[arg(long, default_value_t = 3)]
        radius: i64,
    },
    /// Run the acceptance battery and print a JSON report.
    Battery {
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u32>,
    },
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Io => 1,
        ErrorKind::Precondition => 2,
        ErrorKind::Budget => 3,
        ErrorKind::Internal => 4,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            let written = match &cli.out {
                Some(p) => std::fs::write(p, out.text.as_bytes()).map_err(|e| e.to_string()),
                None => {
                    print!("{}", out.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.kind()))
        }
    }
}
