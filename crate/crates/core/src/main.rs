use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dbw_core::pipeline::{default_workers, run_extract, run_stats, run_validate_only, RunConfig, DEFAULT_LANGUAGES};

#[derive(Debug, Parser)]
#[command(name = "dbw", version, about = "Convert Wikidata JSON dumps into DBpedia-style N-Triples datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract all datasets from a dump, then post-process them.
    Extract {
        #[arg(long)]
        dump: PathBuf,
        #[arg(long)]
        ontology: PathBuf,
        #[arg(long)]
        mappings: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated Wikipedia languages to interlink.
        #[arg(long, value_delimiter = ',')]
        languages: Option<Vec<String>>,
        #[arg(long)]
        workers: Option<usize>,
        /// Write gzip-compressed `.nt.gz` files.
        #[arg(long)]
        compress: bool,
        #[arg(long)]
        skip_postprocess: bool,
    },
    /// Re-run redirect resolution, type inference and range validation.
    Validate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        ontology: PathBuf,
    },
    /// Recompute statistics for an output directory.
    Stats {
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Extract {
            dump,
            ontology,
            mappings,
            out,
            languages,
            workers,
            compress,
            skip_postprocess,
        } => {
            let cfg = RunConfig {
                mapped_languages: languages.unwrap_or_else(|| DEFAULT_LANGUAGES.iter().map(|s| s.to_string()).collect()),
                workers: workers.unwrap_or_else(default_workers),
                compress,
                skip_postprocess,
                ..RunConfig::new(dump, ontology, mappings, out)
            };
            run_extract(&cfg)
        }
        Command::Validate { out, ontology } => run_validate_only(&out, &ontology),
        Command::Stats { out } => run_stats(&out),
    };
    match result {
        Ok(report) => {
            print!("{}", report.to_text());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
