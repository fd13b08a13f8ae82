use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use eigentransfer_cli::commands::{self, Failure, Outcome};
use eigentransfer_cli::config::{parse_weight, FileConfig};

#[derive(Parser, Debug)]
#[command(name = "eigentransfer", version, about = "Exact tables for eigensystems, their transfer to the norm-one group, slopes, levels and packets")]
struct Cli {
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the table here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct AlgebraArgs {
    /// Discriminant of a catalog algebra.
    #[arg(long)]
    disc: Option<u64>,
    #[arg(long)]
    p: Option<u64>,
    /// k1,k2
    #[arg(long, value_parser = parse_weight)]
    weight: Option<[i64; 2]>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classical eigensystems with both refinements at p.
    Eigensystems {
        #[command(flatten)]
        algebra: AlgebraArgs,
        /// Comma-separated good primes.
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
    },
    /// Transfer serialized eigensystems (one JSON record per line) and check the diagrams.
    Transfer {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Certified slopes of the truncated overconvergent operator.
    Slopes {
        #[command(flatten)]
        algebra: AlgebraArgs,
        /// Number of monomial degrees kept.
        #[arg(long)]
        n: Option<usize>,
        /// p-adic precision.
        #[arg(long)]
        m: Option<u32>,
        /// u0 or up.
        #[arg(long)]
        kind: Option<String>,
    },
    /// Compatible SL2 level of a GL2 level, with a brute-force check.
    LevelCompat {
        /// e.g. "level l=3 side=gl2 full".
        #[arg(long)]
        level: Option<String>,
    },
    /// Multiplicity of a global packet member.
    PacketMult {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Also report the member obtained by switching at this place.
        #[arg(long)]
        switch: Option<String>,
    },
    /// Type of a character θ of a quadratic field.
    ThetaType {
        #[arg(long, allow_hyphen_values = true)]
        d: Option<i64>,
        #[arg(long)]
        order: Option<u32>,
        /// symmetric or obstructed
        #[arg(long)]
        extension: Option<String>,
    },
}

fn flags_of(cli: &Cli) -> FileConfig {
    let mut f = FileConfig { output: cli.output.clone(), ..Default::default() };
    let alg = |f: &mut FileConfig, a: &AlgebraArgs| {
        f.disc = a.disc;
        f.p = a.p;
        f.weight = a.weight;
    };
    match &cli.command {
        Command::Eigensystems { algebra, primes } => {
            alg(&mut f, algebra);
            f.primes = primes.clone();
        }
        Command::Transfer { input } => f.input = input.clone(),
        Command::Slopes { algebra, n, m, kind } => {
            alg(&mut f, algebra);
            f.n = *n;
            f.m = *m;
            f.kind = kind.clone();
        }
        Command::LevelCompat { level } => f.level = level.clone(),
        Command::PacketMult { input, switch } => {
            f.input = input.clone();
            f.switch = switch.clone();
        }
        Command::ThetaType { d, order, extension } => {
            f.d = *d;
            f.order = *order;
            f.extension = extension.clone();
        }
    }
    f
}

fn run(cli: &Cli) -> Result<(Outcome, Option<PathBuf>), Failure> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path).map_err(Failure::Usage)?,
        None => FileConfig::default(),
    };
    let cfg = flags_of(cli).over(file);
    let outcome = match cli.command {
        Command::Eigensystems { .. } => commands::eigensystems_cmd(&cfg),
        Command::Transfer { .. } => commands::transfer_cmd(&cfg),
        Command::Slopes { .. } => commands::slopes_cmd(&cfg),
        Command::LevelCompat { .. } => commands::level_compat_cmd(&cfg),
        Command::PacketMult { .. } => commands::packet_mult_cmd(&cfg),
        Command::ThetaType { .. } => commands::theta_type_cmd(&cfg),
    }?;
    Ok((outcome, cfg.output))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((outcome, path)) => {
            let text = outcome.table.to_string();
            let written = match path {
                Some(p) => std::fs::write(&p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
                None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(if outcome.failed { 1 } else { 0 })
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
