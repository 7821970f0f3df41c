#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod complex;
mod config;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{CliConfig, Format, Overrides};
use sr_squeeze::C64;
use std::path::PathBuf;
use std::process::ExitCode;

/// Squeezed states saturating the Schrödinger–Robertson uncertainty relation.
///
/// Complex arguments accept `a+bi` (Cartesian) or `r@theta` (polar).
#[derive(Parser, Debug)]
#[command(name = "squeeze", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// JSON file with hbar, ell0, fock_dim, tolerances, output and seed; flags win.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    hbar: Option<f64>,
    #[arg(long, global = true)]
    ell0: Option<f64>,
    /// Fock truncation for operator checks; state oracles use twice this.
    #[arg(long, global = true)]
    fock_dim: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Oracle {
    None,
    Fock,
    Quad,
}

fn complex(s: &str) -> Result<C64, String> {
    complex::parse_complex(s)
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Moments and derived angles of |Ω_z(u0)⟩, or labels from given moments.
    Moments {
        #[arg(long, default_value = "0", value_parser = complex, allow_hyphen_values = true)]
        u0: C64,
        #[arg(long, default_value = "0", value_parser = complex, allow_hyphen_values = true)]
        z: C64,
        /// Invert instead: dq=..,dp=..,corr=..[,q0=..,p0=..]
        #[arg(long, num_args = 1.., value_name = "KEY=VALUE", conflicts_with_all = ["u0", "z"], allow_hyphen_values = true)]
        from_moments: Option<Vec<String>>,
        /// Cross-check against expectation values of the truncated Fock state.
        #[arg(long, value_enum, default_value = "none")]
        oracle: Oracle,
    },
    /// Overlap ⟨Ω_z2(u2)|Ω_z1(u1)⟩.
    Overlap {
        #[arg(long, default_value = "0", value_parser = complex, allow_hyphen_values = true)]
        z2: C64,
        #[arg(long, default_value = "0", value_parser = complex, allow_hyphen_values = true)]
        u2: C64,
        #[arg(long, default_value = "0", value_parser = complex, allow_hyphen_values = true)]
        z1: C64,
        #[arg(long, default_value = "0", value_parser = complex, allow_hyphen_values = true)]
        u1: C64,
        #[arg(long, value_enum, default_value = "none")]
        oracle: Oracle,
    },
    /// Sample ⟨q|Ω_z(u0)⟩ on a uniform grid (CSV by default).
    Wavefn {
        #[arg(long, default_value = "0", value_parser = complex, allow_hyphen_values = true)]
        z: C64,
        #[arg(long, default_value = "0", value_parser = complex, allow_hyphen_values = true)]
        u0: C64,
        /// Defaults to q0 − 6 dq.
        #[arg(long, allow_hyphen_values = true)]
        q_min: Option<f64>,
        /// Defaults to q0 + 6 dq.
        #[arg(long, allow_hyphen_values = true)]
        q_max: Option<f64>,
        #[arg(long, default_value_t = 129)]
        samples: usize,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Run the verification suite; exits 1 if any check fails.
    Verify {
        /// Write the full JSON report here.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Comma-separated globs over check ids, e.g. "params.*,bch.f_*".
        #[arg(long)]
        only: Option<String>,
        /// Inject a deliberate formula corruption (canary run).
        #[arg(long, value_parser = commands::parse_mutation)]
        mutation: Option<sr_squeeze::mutation::Mutation>,
        /// Include per-check runtimes (output is then no longer reproducible byte for byte).
        #[arg(long)]
        timings: bool,
    },
    /// Diagonal kernel of an observable as a polynomial in w = u0(z) and its conjugate.
    Kernel {
        /// One of I, N, Q, P, Q2, P2, QP+PQ.
        #[arg(long, default_value = "N", value_parser = commands::parse_observable)]
        observable: sr_squeeze::kernels::Observable,
        #[arg(long, default_value = "0", value_parser = complex, allow_hyphen_values = true)]
        z: C64,
        /// Also rebuild the operator by quadrature and compare with its Fock matrix.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = sr_squeeze::verify::KERNEL_DIM)]
        rows: usize,
    },
    /// Resolution of the identity by quadrature over the displacement plane.
    ResolveIdentity {
        #[arg(long, default_value = "0", value_parser = complex, allow_hyphen_values = true)]
        z: C64,
        #[arg(long, default_value_t = sr_squeeze::verify::RESOLUTION_DIM)]
        dim: usize,
        /// Gauss–Hermite order per axis.
        #[arg(long, default_value_t = sr_squeeze::verify::PLANE_ORDER)]
        order: usize,
    },
}

/// Exit status with a message for stderr.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Check(String),
    NonConvergence(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
            Failure::NonConvergence(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Check(m) | Failure::NonConvergence(m) => m,
        }
    }
}

impl From<sr_squeeze::Error> for Failure {
    fn from(e: sr_squeeze::Error) -> Self {
        use sr_squeeze::Error as E;
        match e {
            E::NotConverged { .. } | E::Truncation { .. } | E::BadMeasure(_) => Failure::NonConvergence(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let overrides = Overrides { hbar: g.hbar, ell0: g.ell0, fock_dim: g.fock_dim, format: g.format, seed: g.seed };
    let result = CliConfig::load(g.config.as_deref(), &overrides)
        .map_err(Failure::Usage)
        .and_then(|cfg| commands::run(&cli.cmd, &cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("squeeze: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
