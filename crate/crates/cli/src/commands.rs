//! Implementations of the six subcommands. Each writes its artifacts into
//! the resolved output directory with deterministic formatting, so identical
//! configurations produce bit-identical files.

use crate::config::RunConfig;
use anyhow::{Context, Result};
use serde_json::json;
use std::path::Path;
use tubespec_core::asymptotics::fit_rate_and_constant;
use tubespec_core::exterior::{
    m_hat_energy, m_hat_flux, mk_csv, solve_exterior, zeta_identity_check, ExteriorSolution,
    MkEstimate, ProfilePhi,
};
use tubespec_core::geometry::{
    build_domain, generate_mesh_with, write_mesh_file, DomainSpec, Mesh,
};
use tubespec_core::spectral::{solve_dirichlet_modes, track_branch, BranchConfig, DirichletModes};
use tubespec_core::verify::{run_verification, VerifyConfig};

/// Writes text with a trailing newline guaranteed by the producers.
fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

// ---------------------------------------------------------------------------
// mesh
// ---------------------------------------------------------------------------

pub fn cmd_mesh(cfg: &RunConfig, out: &Path) -> Result<()> {
    let policy = cfg.policy()?;
    let opts = cfg.mesh_options()?;
    let mut entries = Vec::new();

    let mut emit = |name: String, spec: DomainSpec| -> Result<()> {
        let boundary = build_domain(&spec)?;
        let mesh = generate_mesh_with(&boundary, &policy, &opts)?;
        let path = out.join(&name);
        write_mesh_file(&mesh, &path)?;
        entries.push(json!({
            "file": name,
            "vertices": mesh.vertices.len(),
            "triangles": mesh.triangles.len(),
            "boundary_edges": mesh.boundary_edges.len(),
        }));
        Ok(())
    };

    emit("omega.mesh".to_string(), DomainSpec::unperturbed(cfg.domain.r0))?;
    for &eps in &cfg.domain.eps {
        emit(
            format!("omega_eps_{eps}.mesh"),
            DomainSpec::perturbed(cfg.domain.r0, eps),
        )?;
    }
    for &r in &cfg.exterior.radii {
        emit(format!("pi_R{r}.mesh"), DomainSpec::exterior_truncated(r))?;
    }

    let manifest = json!({
        "element_order": cfg.mesh.order.to_ascii_lowercase(),
        "seed": cfg.mesh.seed,
        "files": entries,
    });
    write_text(
        &out.join("manifest.json"),
        &format!("{}\n", serde_json::to_string_pretty(&manifest)?),
    )?;
    println!("wrote {} meshes to {}", manifest["files"].as_array().unwrap().len(), out.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// eig
// ---------------------------------------------------------------------------

fn branch_config(cfg: &RunConfig) -> Result<BranchConfig> {
    let mut bc = BranchConfig::new(cfg.domain.r0, cfg.sweep.branch);
    bc.policy = cfg.policy()?;
    bc.order = cfg.element_order()?;
    bc.seed = cfg.mesh.seed;
    bc.solver = cfg.solver_config();
    Ok(bc)
}

fn solve_base(cfg: &RunConfig) -> Result<(Mesh, DirichletModes)> {
    let boundary = build_domain(&DomainSpec::unperturbed(cfg.domain.r0))?;
    let mesh = generate_mesh_with(&boundary, &cfg.policy()?, &cfg.mesh_options()?)?;
    let modes = solve_dirichlet_modes(&mesh, &cfg.solver_config())?;
    Ok((mesh, modes))
}

pub fn cmd_eig(cfg: &RunConfig, out: &Path) -> Result<()> {
    let bc = branch_config(cfg)?;
    let track = track_branch(&bc, &cfg.domain.eps)?;
    write_text(&out.join("branch.csv"), &track.to_csv())?;

    let j = cfg.sweep.branch;
    let (_, modes) = solve_base(cfg)?;
    let mut field_text = format!("tubespec-field v1\n{}\n", modes.pairs[j].vector.len());
    for v in &modes.pairs[j].vector {
        field_text.push_str(&format!("{v:.16e}\n"));
    }
    write_text(&out.join(format!("mode_{j}.field")), &field_text)?;

    for p in &track.points {
        println!(
            "eps {:>6}: lambda_eps {:.10}, shift {:.6e}, overlap {:.4}",
            p.eps,
            p.lambda_eps,
            p.diff(),
            p.overlap
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// frequency
// ---------------------------------------------------------------------------

pub fn cmd_frequency(cfg: &RunConfig, out: &Path) -> Result<()> {
    let j = cfg.sweep.branch;
    let (mesh, modes) = solve_base(cfg)?;
    let field = modes.field(&mesh, j)?;
    // Geometric radius grid across the junction zone; the inner end stays a
    // few mesh sizes away from the origin so interpolation is trustworthy.
    let lo: f64 = (5.0 * cfg.mesh.h_junction).max(0.025 * cfg.domain.r0);
    let hi: f64 = 0.5 * cfg.domain.r0;
    let n = 16;
    let radii: Vec<f64> = (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect();
    let profile =
        tubespec_core::almgren::frequency_profile(&field, modes.pairs[j].lambda, 0.0, &radii)?;
    write_text(&out.join("frequency.csv"), &profile.to_csv())?;
    println!(
        "mode {j}: lambda {:.10}, frequency at largest radius {:.4}",
        modes.pairs[j].lambda,
        profile.frequency_at_largest()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// mk
// ---------------------------------------------------------------------------

fn mk_for_order(cfg: &RunConfig, k: u32) -> Result<(Vec<ExteriorSolution>, MkEstimate)> {
    let policy = cfg.policy()?;
    let mut sols = Vec::new();
    for &r in &cfg.exterior.radii {
        sols.push(solve_exterior(k, r, &policy, cfg.mesh.seed)?);
    }
    let mk = tubespec_core::exterior::extrapolate_mk(&sols)?;
    Ok((sols, mk))
}

pub fn cmd_mk(cfg: &RunConfig, out: &Path) -> Result<()> {
    let mut summaries = Vec::new();
    for (i, &k) in cfg.exterior.k.iter().enumerate() {
        let (sols, mk) = mk_for_order(cfg, k)?;
        let big = sols.last().unwrap();
        let flux = m_hat_flux(big)?;
        let energy = m_hat_energy(big);
        let phi = ProfilePhi {
            k,
            r_host: big.r / 4.0,
            big: big.clone(),
        };
        let (zeta_measured, zeta_predicted) = zeta_identity_check(&phi, mk.m_hat)?;
        let name = if i == 0 {
            "mk.csv".to_string()
        } else {
            format!("mk_k{k}.csv")
        };
        write_text(&out.join(name), &mk_csv(&sols))?;
        summaries.push(json!({
            "k": k,
            "m_hat": mk.m_hat,
            "c_k_normalized": mk.c_k,
            "fit_residual": mk.fit_residual,
            "flux": flux,
            "energy": energy,
            "flux_energy_gap": 2.0 * (flux - energy).abs() / (flux.abs() + energy.abs()),
            "zeta_measured": zeta_measured,
            "zeta_predicted": zeta_predicted,
            "zeta_relative_error": (zeta_measured - zeta_predicted).abs() / zeta_predicted.abs(),
            "radii": cfg.exterior.radii,
        }));
        println!("order {k}: m_hat {:.6}, normalized constant {:.6}", mk.m_hat, mk.c_k);
    }
    write_text(
        &out.join("mk_summary.json"),
        &format!("{}\n", serde_json::to_string_pretty(&json!({ "orders": summaries }))?),
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

pub fn cmd_sweep(cfg: &RunConfig, out: &Path) -> Result<()> {
    let bc = branch_config(cfg)?;
    let mut sweep = tubespec_core::asymptotics::run_sweep(&bc, &cfg.domain.eps)?;
    // Re-fit with the configured window (run_sweep defaults to the four
    // smallest widths).
    let fit = fit_rate_and_constant(sweep.k, &cfg.domain.eps, &sweep.diffs, cfg.sweep.fit_window)?;
    sweep.fitted_slope = fit.slope;
    sweep.raw_slope = fit.raw_slope;
    sweep.fitted_constant = fit.constant;
    sweep.fit_residual = fit.residual;
    write_text(&out.join("sweep.csv"), &sweep.to_csv())?;
    println!(
        "branch {} (order {}): slope {:.4}, constant {:.6}, residual {:.2e}{}",
        cfg.sweep.branch,
        sweep.k,
        sweep.fitted_slope,
        sweep.fitted_constant,
        sweep.fit_residual,
        if sweep.near_noise_floor {
            " [warning: shifts near solver noise floor]"
        } else {
            ""
        }
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

pub fn cmd_verify(cfg: &RunConfig, out: &Path) -> Result<bool> {
    let vcfg = VerifyConfig {
        seed: cfg.mesh.seed,
        ..VerifyConfig::default()
    };
    let verdict = run_verification(&vcfg)?;
    write_text(&out.join("verdict.json"), &format!("{}\n", verdict.to_json()))?;
    print!("{}", verdict.line_report());
    Ok(verdict.passed)
}
