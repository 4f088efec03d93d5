//! The `stratal` command line tool: validation, chain complex reports,
//! subdivisions, toric resolution, homology, volume classes, and
//! randomized verification over JSON documents.
//!
//! Exit codes: 0 when every check passes, 1 when a mathematical violation
//! was found (the report carries the witness), 2 for input or usage
//! errors (reported on standard error).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};

use stratal_cli::commands::{self, BuildWhich, SubdivideOp, Suite};

#[derive(Parser)]
#[command(
    name = "stratal",
    version,
    about = "Stratified complexes of degenerations: chain complexes, \
             subdivisions, homotopies, homology, and volume classes"
)]
struct Cli {
    /// Print the machine-readable report instead of the human one.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a complex document against every structural invariant.
    Validate {
        /// Complex document (JSON).
        file: PathBuf,
    },
    /// Build the subdivision chain complex and report its degrees.
    Sd {
        file: PathBuf,
        /// Build the weak complex, truncated above this degree.
        #[arg(long, value_name = "BOUND")]
        extended: Option<u32>,
    },
    /// Build the covering chain complex and report its degrees.
    Cech {
        file: PathBuf,
        /// Build the weak complex, truncated above this degree.
        #[arg(long, value_name = "BOUND")]
        extended: Option<u32>,
    },
    /// Verify the equivalence of the subdivision and covering complexes:
    /// chain maps, round trips, homotopies, and sign identities.
    Compare { file: PathBuf },
    /// Subdivide the complex and print the derived complex as a document.
    #[command(group(
        ArgGroup::new("operation").required(true).args(["barycentric", "star", "blowup"])
    ))]
    Subdivide {
        file: PathBuf,
        /// Barycentric subdivision (cells become chains).
        #[arg(long)]
        barycentric: bool,
        /// Star subdivision at this stratum.
        #[arg(long, value_name = "STRATUM")]
        star: Option<String>,
        /// Blowup along a center inside this stratum's closure.
        #[arg(long, value_name = "STRATUM")]
        blowup: Option<String>,
        /// Intersection profile document for the blowup (defaults to one
        /// component properly inside the stratum).
        #[arg(long, value_name = "FILE", requires = "blowup")]
        profile: Option<PathBuf>,
    },
    /// Resolve the lattice cone complex by repeated star subdivision.
    Resolve { file: PathBuf },
    /// Homology of the dual complex under an abelian realization.
    #[command(group(
        ArgGroup::new("coefficients").required(true).args(["realization", "constant"])
    ))]
    Homology {
        file: PathBuf,
        /// Realization document with ranks and arrow matrices.
        #[arg(long, value_name = "FILE")]
        realization: Option<PathBuf>,
        /// Rank one everywhere with identity matrices.
        #[arg(long)]
        constant: bool,
    },
    /// The volume class: alternating sum of stratum classes.
    Volume {
        file: PathBuf,
        /// Label quotient document: groups of labels to merge.
        #[arg(long, value_name = "FILE")]
        quotient: Option<PathBuf>,
        /// Also report whether the class is trivial against this point
        /// label.
        #[arg(long, value_name = "LABEL")]
        point: Option<String>,
    },
    /// Run a check suite on one document, or on randomized complexes.
    Verify {
        /// Complex document; omit to check randomized complexes.
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Suite::Full)]
        suite: Suite,
        /// Seed for the randomized generator (no FILE).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of randomized complexes (no FILE).
        #[arg(long, default_value_t = 12)]
        cases: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { file } => commands::validate(file),
        Command::Sd { file, extended } => commands::build(file, BuildWhich::Sd, *extended),
        Command::Cech { file, extended } => commands::build(file, BuildWhich::Cech, *extended),
        Command::Compare { file } => commands::compare(file),
        Command::Subdivide { file, barycentric, star, blowup, profile } => {
            let op = if *barycentric {
                SubdivideOp::Barycentric
            } else if let Some(center) = star {
                SubdivideOp::Star(center.clone())
            } else {
                SubdivideOp::Blowup {
                    center: blowup.clone().expect("the argument group requires one operation"),
                    profile: profile.clone(),
                }
            };
            commands::subdivide(file, &op)
        }
        Command::Resolve { file } => commands::resolve(file),
        Command::Homology { file, realization, .. } => {
            commands::homology(file, realization.as_deref())
        }
        Command::Volume { file, quotient, point } => {
            commands::volume(file, quotient.as_deref(), point.as_deref())
        }
        Command::Verify { file, suite, seed, cases } => {
            commands::verify(file.as_deref(), *suite, *seed, *cases)
        }
    };
    match result {
        Ok(report) => {
            if cli.json {
                let mut value = report.json;
                if let serde_json::Value::Object(map) = &mut value {
                    map.insert("ok".to_string(), serde_json::Value::Bool(report.ok));
                }
                println!("{}", serde_json::to_string_pretty(&value).expect("report serializes"));
            } else {
                print!("{}", report.human);
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
