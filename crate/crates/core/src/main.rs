use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use paircoh::cli::{
    cmd_analyze, cmd_scan, cmd_verify, CliError, ScanSpec, EXIT_OK, EXIT_VERIFY_FAILED,
};

/// Squeezing analysis of two-mode pair coherent states.
#[derive(Parser, Debug)]
#[command(name = "paircoh", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report photon numbers, variance matrix, spectrum and verdict for one state.
    Analyze {
        /// Real part of ζ.
        #[arg(long = "re", allow_negative_numbers = true)]
        re: f64,
        /// Imaginary part of ζ.
        #[arg(long = "im", allow_negative_numbers = true)]
        im: f64,
        /// Photon-number difference.
        #[arg(long = "q", allow_negative_numbers = true)]
        q: i64,
        /// Emit one JSON object instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Sweep |ζ| for a list of q values and write the least eigenvalue to CSV.
    Scan {
        #[arg(long = "q", value_delimiter = ',', required = true)]
        q: Vec<u32>,
        #[arg(long = "zeta-min", allow_negative_numbers = true)]
        zeta_min: f64,
        #[arg(long = "zeta-max", allow_negative_numbers = true)]
        zeta_max: f64,
        #[arg(long)]
        steps: usize,
        /// Phase of ζ held fixed across the sweep.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phase: f64,
        /// Repeat each point at this many equally spaced phases.
        #[arg(long = "phase-sweep")]
        phase_sweep: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Write JSON lines instead of CSV.
        #[arg(long)]
        json: bool,
    },
    /// Cross-check the closed forms against the Fock-space oracle.
    Verify {
        #[arg(long = "q-max")]
        q_max: u32,
        #[arg(long = "zeta-max")]
        zeta_max: f64,
    },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Analyze { re, im, q, json } => {
            let record = cmd_analyze(re, im, q)?;
            if json {
                println!("{}", record.render_json());
            } else {
                print!("{}", record.render_text());
            }
            Ok(EXIT_OK)
        }
        Command::Scan {
            q,
            zeta_min,
            zeta_max,
            steps,
            phase,
            phase_sweep,
            out,
            json,
        } => {
            let spec = ScanSpec {
                q_list: q,
                abs_zeta_start: zeta_min,
                abs_zeta_stop: zeta_max,
                steps,
                arg_zeta: phase,
                phase_sweep,
                output_path: out,
            };
            let rows = cmd_scan(&spec, json)?;
            eprintln!("wrote {rows} rows to {}", spec.output_path.display());
            Ok(EXIT_OK)
        }
        Command::Verify { q_max, zeta_max } => {
            let summary = cmd_verify(q_max, zeta_max)?;
            print!("{}", summary.render_text());
            Ok(if summary.passed() { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
