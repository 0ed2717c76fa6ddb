//! TOML run configuration with strict section schemas.
//!
//! Every section is optional and falls back to the documented defaults, but
//! unknown keys anywhere in the file are rejected so typos cannot silently
//! change a run. All keys are documented in `docs/schema.md`.

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use tubespec_core::fem::SolverConfig;
use tubespec_core::geometry::{ElementOrder, GradingPolicy, MeshOptions};

/// Top-level run configuration.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub domain: DomainSection,
    pub mesh: MeshSection,
    pub solver: SolverSection,
    pub exterior: ExteriorSection,
    pub sweep: SweepSection,
    pub output: OutputSection,
}

/// `[domain]`: half-disk radius and the tube half-width grid.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DomainSection {
    /// Half-disk radius.
    pub r0: f64,
    /// Tube half-widths, strictly decreasing.
    pub eps: Vec<f64>,
}

impl Default for DomainSection {
    fn default() -> Self {
        Self {
            r0: 2.0,
            eps: vec![0.2, 0.15, 0.1, 0.07, 0.05],
        }
    }
}

/// `[mesh]`: grading policy, element order, safety budget, jitter seed.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshSection {
    pub h_far: f64,
    pub h_junction: f64,
    pub grading_ratio: f64,
    /// "p1" or "p2".
    pub order: String,
    /// Maximum triangle count before meshing aborts.
    pub budget: usize,
    /// Seed for interior point jitter; fixes the mesh bit-for-bit.
    pub seed: u64,
}

impl Default for MeshSection {
    fn default() -> Self {
        Self {
            h_far: 0.06,
            h_junction: 0.012,
            grading_ratio: 1.5,
            order: "p2".to_string(),
            budget: 2_000_000,
            seed: 7,
        }
    }
}

/// `[solver]`: shift-invert eigensolver controls.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub shift: f64,
    pub num_eigs: usize,
    pub tol: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            shift: d.shift,
            num_eigs: 8,
            tol: d.tol,
        }
    }
}

/// `[exterior]`: profile orders and truncation radii for the coupling runs.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExteriorSection {
    /// Profile orders to process, each in 1..=3.
    pub k: Vec<u32>,
    /// Truncation radii, ascending, at least three.
    pub radii: Vec<f64>,
}

impl Default for ExteriorSection {
    fn default() -> Self {
        Self {
            k: vec![1],
            radii: vec![4.0, 8.0, 16.0],
        }
    }
}

/// `[sweep]`: tracked branch and fit window.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// 0-based index of the tracked half-disk mode.
    pub branch: usize,
    /// Number of smallest widths used by the constant/rate fit.
    pub fit_window: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            branch: 0,
            fit_window: 4,
        }
    }
}

/// `[output]`: artifact directory, overridable by `--out` or `OUTPUT_DIR`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// Parse and validate a TOML file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let cfg: RunConfig = toml::from_str(&text)
            .with_context(|| format!("cannot parse config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !(self.domain.r0 > 0.0) {
            bail!("[domain] r0 must be positive, got {}", self.domain.r0);
        }
        if self.domain.eps.is_empty() {
            bail!("[domain] eps list must not be empty");
        }
        for w in self.domain.eps.windows(2) {
            if !(w[1] < w[0]) {
                bail!("[domain] eps list must be strictly decreasing");
            }
        }
        if !(*self.domain.eps.last().unwrap() > 0.0) {
            bail!("[domain] eps values must be positive");
        }
        self.element_order()?;
        self.policy()?;
        if self.solver.num_eigs == 0 {
            bail!("[solver] num_eigs must be at least 1");
        }
        if !(self.solver.tol > 0.0) {
            bail!("[solver] tol must be positive");
        }
        for &k in &self.exterior.k {
            if !(1..=3).contains(&k) {
                bail!("[exterior] profile order {k} outside 1..=3");
            }
        }
        for w in self.exterior.radii.windows(2) {
            if !(w[0] < w[1]) {
                bail!("[exterior] radii must be strictly increasing");
            }
        }
        if self.sweep.branch >= self.solver.num_eigs {
            bail!(
                "[sweep] branch {} not resolvable with num_eigs {}",
                self.sweep.branch,
                self.solver.num_eigs
            );
        }
        if self.sweep.fit_window < 3 {
            bail!("[sweep] fit_window must be at least 3");
        }
        Ok(())
    }

    /// Element order parsed from the `[mesh]` section.
    pub fn element_order(&self) -> Result<ElementOrder> {
        match self.mesh.order.to_ascii_lowercase().as_str() {
            "p1" => Ok(ElementOrder::P1),
            "p2" => Ok(ElementOrder::P2),
            other => bail!("[mesh] order must be \"p1\" or \"p2\", got \"{other}\""),
        }
    }

    /// Grading policy from the `[mesh]` section.
    pub fn policy(&self) -> Result<GradingPolicy> {
        GradingPolicy::new(self.mesh.h_far, self.mesh.h_junction, self.mesh.grading_ratio)
            .context("[mesh] grading policy invalid")
    }

    /// Mesher options carrying the element budget and jitter seed.
    pub fn mesh_options(&self) -> Result<MeshOptions> {
        let mut opts = MeshOptions::new(self.element_order()?, self.mesh.seed);
        opts.budget = self.mesh.budget;
        Ok(opts)
    }

    /// Eigensolver configuration from the `[solver]` section.
    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            shift: self.solver.shift,
            num_eigs: self.solver.num_eigs,
            tol: self.solver.tol,
            ..SolverConfig::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_uses_documented_defaults() {
        let cfg: RunConfig = toml::from_str("").unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.domain.r0, 2.0);
        assert_eq!(cfg.domain.eps.len(), 5);
        assert_eq!(cfg.mesh.order, "p2");
        assert_eq!(cfg.exterior.radii, vec![4.0, 8.0, 16.0]);
        assert_eq!(cfg.output.directory, PathBuf::from("out"));
    }

    #[test]
    fn unknown_keys_are_rejected_in_every_section() {
        assert!(toml::from_str::<RunConfig>("[domain]\nradius = 2.0\n").is_err());
        assert!(toml::from_str::<RunConfig>("[mesh]\nhmax = 0.1\n").is_err());
        assert!(toml::from_str::<RunConfig>("[typo]\n").is_err());
    }

    #[test]
    fn validation_rejects_inconsistent_sections() {
        let cfg: RunConfig =
            toml::from_str("[sweep]\nbranch = 9\n[solver]\nnum_eigs = 4\n").unwrap();
        assert!(cfg.validate().is_err());
        let cfg: RunConfig = toml::from_str("[domain]\neps = [0.1, 0.2]\n").unwrap();
        assert!(cfg.validate().is_err());
        let cfg: RunConfig = toml::from_str("[mesh]\norder = \"p3\"\n").unwrap();
        assert!(cfg.validate().is_err());
    }
}
