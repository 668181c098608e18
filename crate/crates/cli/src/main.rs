//! Command-line surface: document ingestion, computation dispatch, and
//! machine- or human-readable reports.
//!
//! Exit codes: 0 on success or a verified property; 1 when a checked
//! property is false (the report carries a witness); 2 on input or
//! precondition errors.

mod commands;
mod output;

use clap::{Parser, Subcommand};

use novcap_core::exponent::Exponent;

#[derive(Parser)]
#[command(
    name = "novcap",
    about = "Exact spectral invariants over the Novikov field: filtered complexes, barcodes, model spectra, capacity ledgers",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format for reports.
    #[arg(long, global = true, default_value = "table")]
    format: output::Format,

    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the complex axioms, reporting each violation with a witness.
    Validate { input: std::path::PathBuf },
    /// Compute the singular value decomposition.
    Svd {
        input: std::path::PathBuf,
        /// Truncation window; must exceed the level span. Default: derived
        /// from the data.
        #[arg(long)]
        window: Option<Exponent>,
    },
    /// Spectral invariant of a cycle.
    Spectral {
        input: std::path::PathBuf,
        /// Chain document with the cycle.
        #[arg(long)]
        zeta: std::path::PathBuf,
    },
    /// Boundary depth: the longest finite bar.
    Depth { input: std::path::PathBuf },
    /// Barcode of the complex.
    Barcode {
        input: std::path::PathBuf,
        #[arg(long)]
        window: Option<Exponent>,
    },
    /// Tensor product of two complexes; optionally verify the product
    /// formula on a pair of cycles.
    Tensor {
        left: std::path::PathBuf,
        right: std::path::PathBuf,
        #[arg(long, requires = "zeta_right")]
        zeta_left: Option<std::path::PathBuf>,
        #[arg(long, requires = "zeta_left")]
        zeta_right: Option<std::path::PathBuf>,
    },
    /// Direct sum of two complexes; optionally verify the depth
    /// max-formula and barcode union.
    Dsum {
        left: std::path::PathBuf,
        right: std::path::PathBuf,
        #[arg(long)]
        verify: bool,
    },
    /// Coefficient-extension distance check on a capped complex.
    Extension {
        input: std::path::PathBuf,
        /// Graded piece of the chain.
        #[arg(long)]
        degree: i64,
        /// Capped chain document.
        #[arg(long)]
        zeta: std::path::PathBuf,
        #[arg(long, default_value = "12")]
        window: Exponent,
    },
    /// Run a detection-bound job document.
    Detect { input: std::path::PathBuf },
    /// Action spectrum of the torus-stabilized deformation.
    #[command(name = "spectrum-ta")]
    SpectrumTa {
        input: std::path::PathBuf,
        /// Deformation parameter in [0, 1].
        #[arg(long, default_value = "0")]
        t_def: Exponent,
        /// Also check multiset stability across a parameter grid of this
        /// many samples.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Action spectrum and gap certificate of a contact bump profile.
    #[command(name = "spectrum-contact")]
    SpectrumContact { input: std::path::PathBuf },
    /// Max-min bounds for toric data: a window document or a single fiber.
    Toric {
        input: Option<std::path::PathBuf>,
        /// Comma-separated fiber coordinates, e.g. "1/3,1/2".
        #[arg(long)]
        fiber: Option<String>,
    },
    /// Evaluate a capacity chain file and print the consistency report.
    Ledger { input: std::path::PathBuf },
    /// Compare the decomposition against the lattice oracle on seeded
    /// random instances.
    Oracle {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Generators per instance.
        #[arg(long, default_value_t = 5)]
        size: usize,
        /// Number of instances.
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
}

fn main() {
    let cli = Cli::parse();
    let sink = output::Sink {
        format: cli.format,
        out: cli.out.clone(),
    };
    let code = match commands::run(cli.command, &sink) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    };
    std::process::exit(code);
}
