//! Thin argument-parsing front end over [`waring::cli`].

use std::path::PathBuf;
use std::process::exit;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args as ClapArgs, Parser, Subcommand};

use waring::cli::{self, Command, OutputFormat, RunConfig};

/// Inclusive range argument: "A..B" or a single value "A".
#[derive(Debug, Clone, Copy)]
struct Range(u32, u32);

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some((a, b)) = s.split_once("..") {
            let a = a.trim().parse().map_err(|_| format!("bad range {s:?}"))?;
            let b = b.trim().parse().map_err(|_| format!("bad range {s:?}"))?;
            Ok(Range(a, b))
        } else {
            let v = s.trim().parse().map_err(|_| format!("bad range {s:?}"))?;
            Ok(Range(v, v))
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "waring",
    version,
    about = "Exact Waring numbers g_{p,e}(k) of the rings Z_p[p^(1/e)], with certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    #[command(flatten)]
    common: Common,
}

#[derive(Debug, ClapArgs)]
struct Common {
    /// Output format: text, json or csv
    #[arg(long, global = true, default_value = "text")]
    format: String,

    /// Enumeration precision N (powers command)
    #[arg(long, global = true)]
    precision: Option<u32>,

    /// Lower-bound precision N' (must be at least the Hensel bound)
    #[arg(long = "lb-precision", global = true)]
    lb_precision: Option<u32>,

    /// Cap on the sumset expansion depth
    #[arg(long = "n-cap", global = true, default_value_t = 32)]
    n_cap: u32,

    /// Result cache file (default: $WARING_CACHE or ./waring_cache.jsonl)
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Print digit vectors instead of pretty forms
    #[arg(long, global = true)]
    raw: bool,

    /// Step for ranged columns and scan ranges
    #[arg(long, global = true, default_value_t = 1)]
    step: u32,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Compute g_{p,e}(k) with both certificates
    Compute {
        #[arg(short)]
        p: u32,
        #[arg(short)]
        e: u32,
        #[arg(short)]
        k: u32,
        /// Compute directly even when p does not divide k
        #[arg(long)]
        direct: bool,
    },
    /// Render a grid of Waring numbers over e (rows) and k (columns)
    Table {
        #[arg(short)]
        p: u32,
        /// Row range for e, e.g. 1..4 (alias of --e-range)
        #[arg(long, visible_alias = "e-range")]
        rows: Option<Range>,
        /// Column range for k, e.g. 2..10 or a single value (alias of --k-range)
        #[arg(long, visible_alias = "k-range")]
        cols: Option<Range>,
    },
    /// List the k-th power residues at precision max(M, --precision)
    Powers {
        #[arg(short)]
        p: u32,
        #[arg(short)]
        e: u32,
        #[arg(short)]
        k: u32,
    },
    /// Decomposition table: every attainable class mod w^M
    Decompose {
        #[arg(short)]
        p: u32,
        #[arg(short)]
        e: u32,
        #[arg(short)]
        k: u32,
    },
    /// Grid comparison of g_{2,e}(k) against g_{2,1}(k)
    Scan {
        #[arg(short, default_value_t = 2)]
        p: u32,
        #[arg(long = "e-range")]
        e_range: Range,
        #[arg(long = "k-range")]
        k_range: Range,
    },
    /// Minimal number of nonzero k-th powers mod p summing to zero
    G0 {
        #[arg(short)]
        p: u32,
        #[arg(short)]
        k: u32,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => cli::EXIT_OK,
                _ => cli::EXIT_USAGE,
            };
            let _ = err.print();
            exit(code);
        }
    };

    let format = match OutputFormat::from_str(&cli.common.format) {
        Ok(f) => f,
        Err(msg) => {
            eprintln!("error: {msg}");
            exit(cli::EXIT_USAGE);
        }
    };

    let command = match cli.command {
        Cmd::Compute { p, e, k, direct } => Command::Compute { p, e, k, direct },
        Cmd::Table { p, rows, cols } => Command::Table {
            p,
            rows: rows.map(|r| (r.0, r.1)),
            cols: cols.map(|r| (r.0, r.1)),
        },
        Cmd::Powers { p, e, k } => Command::Powers { p, e, k },
        Cmd::Decompose { p, e, k } => Command::Decompose { p, e, k },
        Cmd::Scan { p, e_range, k_range } => Command::Scan {
            p,
            e_range: (e_range.0, e_range.1),
            k_range: (k_range.0, k_range.1),
            step: cli.common.step,
        },
        Cmd::G0 { p, k } => Command::G0 { p, k },
    };

    let cfg = RunConfig {
        command,
        format,
        precision: cli.common.precision,
        lb_precision: cli.common.lb_precision,
        n_cap: cli.common.n_cap,
        cache: cli.common.cache,
        threads: cli.common.threads,
        raw: cli.common.raw,
        step: cli.common.step,
    };
    exit(cli::run(&cfg));
}
