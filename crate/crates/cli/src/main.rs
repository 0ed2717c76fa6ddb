//! `tubespec`: numerical laboratory for Dirichlet eigenvalues of a half-disk
//! with a thin tube attached through a boundary window.
//!
//! Subcommands cover the full pipeline: mesh generation, branch eigenvalue
//! tracking, junction frequency diagnostics, exterior coupling-constant
//! recovery, shrinking-width sweeps, and the aggregate verification run.
//! All artifacts are plain CSV/JSON documented in `docs/schema.md`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 verification criteria failed.

mod commands;
mod config;

use anyhow::Result;
use clap::{Parser, Subcommand};
use config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_ACCEPTANCE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "tubespec",
    version,
    about = "Eigenvalue laboratory for a half-disk with a shrinking boundary tube",
    after_help = "Output directory resolution: --out flag, then the OUTPUT_DIR \
                  environment variable, then [output].directory from the config \
                  (default \"out\"). Artifact schemas are documented in \
                  docs/schema.md."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration (sections [domain] [mesh] [solver] [exterior]
    /// [sweep] [output]; unknown keys rejected).
    #[arg(long, global = true, default_value = "tubespec.toml")]
    config: PathBuf,

    /// Worker threads for assembly and per-width solves (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output directory override.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write meshes for the base domain, each perturbed domain, and each
    /// exterior truncation, plus manifest.json with element counts.
    #[command(after_help = "Files: omega.mesh, omega_eps_<eps>.mesh per width, \
                            pi_R<R>.mesh per truncation radius, manifest.json \
                            (file, vertices, triangles, boundary_edges per \
                            entry). Mesh format: header \"tubespec-mesh v1\", \
                            counts, vertex/triangle/boundary-edge lines.")]
    Mesh,
    /// Track one eigenvalue branch across the width grid; write branch.csv
    /// and the tracked unperturbed eigenfunction.
    #[command(after_help = "branch.csv columns: eps, lambda_eps, lambda0, diff \
                            (= lambda0 - lambda_eps), overlap, matched_index. \
                            mode_<j>.field holds the tracked eigenfunction's \
                            coefficients in the dof order of omega.mesh.")]
    Eig,
    /// Frequency diagnostics of the tracked unperturbed eigenfunction near
    /// the tube mouth; write frequency.csv.
    #[command(after_help = "frequency.csv columns: r (radius), energy, height, \
                            frequency (their quotient r*energy/height).")]
    Frequency,
    /// Recover the junction coupling constant from exterior solves over the
    /// truncation-radius grid; write mk.csv and mk_summary.json.
    #[command(after_help = "mk.csv columns: R, g_R (energy defect), energy; \
                            one file per profile order (mk.csv for the first, \
                            mk_k<k>.csv for the rest). mk_summary.json per \
                            order: k, m_hat, c_k_normalized, fit_residual, \
                            flux, energy, flux_energy_gap, zeta_measured, \
                            zeta_predicted, zeta_relative_error, radii.")]
    Mk,
    /// Sweep the tube width, fit the shift rate and constant; write
    /// sweep.csv.
    #[command(after_help = "sweep.csv columns: eps, lambda_eps, diff, \
                            diff_over_eps2k. The fitted slope and constant \
                            are printed to stdout.")]
    Sweep,
    /// Run every verification criterion at reference scales; write
    /// verdict.json.
    #[command(after_help = "verdict.json fields: passed, slope, \
                            slope_second_branch, constant, c_k_predicted, \
                            discrepancy, criteria[] (id, name, passed, \
                            threshold, details). Uses calibrated reference \
                            scales; only [mesh].seed and the output directory \
                            are read from the config. Exit 4 when any \
                            criterion fails.")]
    Verify,
}

/// Maps an error to the documented exit code: configuration-shaped failures
/// (bad parameters, exceeded mesh budget, unparsable inputs) exit 2,
/// everything else from the numerical pipeline exits 3.
fn classify(err: &anyhow::Error) -> u8 {
    if let Some(core) = err.downcast_ref::<tubespec_core::Error>() {
        match core {
            tubespec_core::Error::InvalidParameter(_)
            | tubespec_core::Error::MeshBudget { .. }
            | tubespec_core::Error::Parse(_) => EXIT_CONFIG,
            _ => EXIT_NUMERICAL,
        }
    } else {
        EXIT_NUMERICAL
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Some(n) = cli.threads {
        // A second initialization in the same process is harmless; the pool
        // keeps its first configuration.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    let cfg = match RunConfig::load(&cli.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    let out_dir = cli
        .out
        .or_else(|| std::env::var_os("OUTPUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| cfg.output.directory.clone());
    if let Err(e) = std::fs::create_dir_all(&out_dir) {
        eprintln!("error: cannot create output directory {}: {e}", out_dir.display());
        return ExitCode::from(EXIT_CONFIG);
    }

    let result: Result<u8> = match cli.command {
        Command::Mesh => commands::cmd_mesh(&cfg, &out_dir).map(|()| 0),
        Command::Eig => commands::cmd_eig(&cfg, &out_dir).map(|()| 0),
        Command::Frequency => commands::cmd_frequency(&cfg, &out_dir).map(|()| 0),
        Command::Mk => commands::cmd_mk(&cfg, &out_dir).map(|()| 0),
        Command::Sweep => commands::cmd_sweep(&cfg, &out_dir).map(|()| 0),
        Command::Verify => commands::cmd_verify(&cfg, &out_dir)
            .map(|passed| if passed { 0 } else { EXIT_ACCEPTANCE }),
    };

    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify(&e))
        }
    }
}
