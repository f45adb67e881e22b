//! Scene configuration files: one JSON document describing the surfaces,
//! the shared parameter interval, declared singular parameters and the
//! artifacts to produce.

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub name: String,
    /// Shared parameter interval `[t0, t1]` of every surface band.
    pub interval: [f64; 2],
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// One surface for a plain scene, two for a glued pair.
    pub surfaces: Vec<SurfaceConfig>,
    /// Parameters where the shared curve is singular, with the vanishing
    /// order of its velocity.
    #[serde(default)]
    pub singular_params: Vec<SiteConfig>,
    /// Rotation angle the scene is documented with, for cross-checking
    /// against the computed one.
    #[serde(default)]
    pub stated_theta: Option<f64>,
    #[serde(default)]
    pub outputs: Vec<OutputConfig>,
}

fn default_samples() -> usize {
    201
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub name: String,
    /// Parametric band `[x(u,v), y(u,v), z(u,v)]`; the curve is its `v = 0`
    /// locus.
    pub expr: String,
    /// Sign applied to the extracted surface normal.
    #[serde(default = "default_orientation")]
    pub orientation: i8,
    /// Explicitly supplied frame; when present it replaces extraction,
    /// subject to validation.
    #[serde(default)]
    pub frame: Option<FrameConfig>,
}

fn default_orientation() -> i8 {
    1
}

/// Frame given by formulas in `u`: tangent, normal and signed speed.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameConfig {
    pub e: String,
    pub nu: String,
    pub l: String,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteConfig {
    pub t0: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OutputConfig {
    /// Full JSON classification report.
    Report { target: String },
    /// Per-parameter invariant table.
    InvariantsCsv { target: String },
    /// Wavefront OBJ of one surface band.
    Mesh {
        target: String,
        /// Which surface: `S_nu1`, `S_b1`, `S_nu2`, `S_b2` for glued
        /// scenes, `S_nu` or `S_b` for single ones.
        surface: String,
        a_range: [f64; 2],
        #[serde(default = "default_resolution")]
        resolution: [usize; 2],
    },
}

fn default_resolution() -> [usize; 2] {
    [97, 17]
}

impl SceneConfig {
    pub fn load(path: &Path) -> Result<SceneConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading scene config {}", path.display()))?;
        let config: SceneConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing scene config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.surfaces.len()) {
            bail!(
                "scene '{}' needs one or two surfaces, found {}",
                self.name,
                self.surfaces.len()
            );
        }
        if !(self.interval[0] < self.interval[1]) {
            bail!(
                "scene '{}' has an empty interval [{}, {}]",
                self.name,
                self.interval[0],
                self.interval[1]
            );
        }
        if self.samples < 2 {
            bail!("scene '{}' needs at least two samples", self.name);
        }
        for site in &self.singular_params {
            if site.t0 <= self.interval[0] || site.t0 >= self.interval[1] {
                bail!(
                    "singular parameter {} lies outside the open interval",
                    site.t0
                );
            }
        }
        for output in &self.outputs {
            if let OutputConfig::Mesh {
                a_range,
                resolution,
                ..
            } = output
            {
                if !(a_range[0] < a_range[1]) {
                    bail!("mesh a_range [{}, {}] is empty", a_range[0], a_range[1]);
                }
                if resolution[0] < 2 || resolution[1] < 2 {
                    bail!("mesh resolution must be at least 2x2");
                }
            }
        }
        Ok(())
    }
}
