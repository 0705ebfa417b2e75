use clap::{Parser, Subcommand};

use wcomp::classifier::DEFAULT_TOLERANCE;
use wcomp::cli::{cmd_classify, cmd_examples, cmd_jseq, cmd_oracle, read_input, ExampleParams, RunReport};
use wcomp::matrix_oracle::DEFAULT_MATRIX_CAP;
use wcomp::Error;

#[derive(Parser)]
#[command(name = "wcomp", about = "Classify weighted composition operators on discrete spaces")]
struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print J_0..J_N from the recursion and the direct formula.
    Jseq {
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
    /// Classify at order m.
    Classify {
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        /// Decide zero tests in exact rational arithmetic.
        #[arg(long)]
        exact: bool,
    },
    /// Verify against the dense-matrix oracle.
    Oracle {
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MATRIX_CAP)]
        cap: usize,
    },
    /// Reproduce interval example a, b or c.
    Examples {
        which: String,
        #[arg(long, default_value_t = 6)]
        m: usize,
        #[arg(long, default_value_t = 100)]
        grid: usize,
    },
}

fn run(command: Command) -> Result<RunReport, Error> {
    match command {
        Command::Jseq { input, n } => cmd_jseq(&read_input(&input)?, n),
        Command::Classify { input, m, tol, exact } => cmd_classify(&read_input(&input)?, m, tol, exact),
        Command::Oracle { input, m, tol, cap } => cmd_oracle(&read_input(&input)?, m, tol, cap),
        Command::Examples { which, m, grid } => cmd_examples(&which, ExampleParams { m, grid }),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) => {
            if cli.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.render_text());
            }
            if !report.checks_ok() || report.oracle_agreement == Some(false) {
                std::process::exit(2);
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
