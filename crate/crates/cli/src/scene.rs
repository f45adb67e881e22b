//! From a parsed scene configuration to classification and artifacts.
//!
//! Explicitly supplied frames are validated before use; a frame that fails
//! validation is replaced by extraction from its surface, and the swap is
//! recorded as a note in the report rather than silently accepted. The
//! same goes for documented angles that disagree with the computed one.

use crate::config::{OutputConfig, SceneConfig, SurfaceConfig};
use crate::report::{self, Report, SurfaceReport, ThetaReport};
use crate::{mesh, table};
use anyhow::{bail, Context, Result};
use gluelocus::classify::{
    classify_singularity_l0, classify_surface_with_tol, SingularPointLabel, SurfaceShape,
};
use gluelocus::curvelang::{parse_expr, parse_map, Arity, Var};
use gluelocus::developables::{DevelopableSurface, RulingKind, SurfaceError};
use gluelocus::frames::{FramedCurve, SingularParam};
use gluelocus::glue::{GlueScene, SurfaceSlot};
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Command-line overrides applied on top of the configured scene.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub samples: Option<usize>,
    pub tol: Option<f64>,
}

pub struct RunOutcome {
    pub report: Report,
    /// Some singular point carried an unresolved label.
    pub unresolved: bool,
    pub written: Vec<PathBuf>,
}

/// Deviation beyond which a supplied normal or documented angle earns a
/// discrepancy note.
const NOTE_TOL: f64 = 1e-6;

enum BuiltScene {
    Glue(GlueScene),
    Single(Arc<FramedCurve>),
}

/// Build every configured frame, collecting fallback and deviation notes.
pub fn build_frames(config: &SceneConfig) -> Result<(Vec<Arc<FramedCurve>>, Vec<String>)> {
    let interval = (config.interval[0], config.interval[1]);
    let sites = sites_of(config);
    let mut notes = Vec::new();
    let frames = config
        .surfaces
        .iter()
        .map(|surface| build_frame(surface, interval, &sites, &mut notes))
        .collect::<Result<_>>()?;
    Ok((frames, notes))
}

fn sites_of(config: &SceneConfig) -> Vec<SingularParam> {
    config
        .singular_params
        .iter()
        .map(|s| SingularParam {
            t0: s.t0,
            multiplicity: s.multiplicity,
        })
        .collect()
}

pub fn run_scene(config: &SceneConfig, overrides: Overrides, out_dir: &Path) -> Result<RunOutcome> {
    config.validate()?;
    let samples = overrides.samples.unwrap_or(config.samples);
    if samples < 2 {
        bail!("need at least two samples");
    }
    let sites = sites_of(config);
    let (frames, mut notes) = build_frames(config)?;

    let mut unresolved = false;
    let (scene, report) = match frames.as_slice() {
        [fc1, fc2] => {
            let scene = GlueScene::new(fc1.clone(), fc2.clone(), samples)
                .context("gluing the two frames")?;
            let classification = scene
                .classify_with_tol(overrides.tol)
                .context("classifying the glued scene")?;
            let surfaces: Vec<SurfaceReport> = SurfaceSlot::ALL
                .iter()
                .map(|&slot| report::surface_report(slot.as_str(), classification.slot(slot)))
                .collect();
            unresolved |= has_unresolved(&surfaces);

            let theta = theta_summary(&scene, samples, config.stated_theta, &mut notes)?;
            let special = scene
                .special_angle(&classification)
                .context("checking for a special angle")?;
            let theta = ThetaReport {
                special_half_pi_multiple: special.as_ref().map(|s| s.half_pi_multiple),
                special_pairs_match: special.as_ref().map(|s| s.pairs_match),
                ..theta
            };
            let residuals = report::residual_report(&classification);
            let report = Report {
                scene: config.name.clone(),
                interval: config.interval,
                samples,
                notes: notes.clone(),
                surfaces,
                theta: Some(theta),
                residuals: Some(residuals),
            };
            (BuiltScene::Glue(scene), report)
        }
        [fc] => {
            let mut surfaces = Vec::new();
            for (name, kind) in [("S_nu", RulingKind::Nu), ("S_b", RulingKind::B)] {
                surfaces.push(single_surface_report(
                    fc, name, kind, samples, overrides.tol, &sites,
                )?);
            }
            unresolved |= has_unresolved(&surfaces);
            let report = Report {
                scene: config.name.clone(),
                interval: config.interval,
                samples,
                notes: notes.clone(),
                surfaces,
                theta: None,
                residuals: None,
            };
            (BuiltScene::Single(fc.clone()), report)
        }
        _ => unreachable!("validated above"),
    };

    let mut written = Vec::new();
    for output in &config.outputs {
        let path = match output {
            OutputConfig::Report { target } => {
                write_file(out_dir, target, report::to_json(&report).as_bytes())?
            }
            OutputConfig::InvariantsCsv { target } => {
                let mut buf = Vec::new();
                match &scene {
                    BuiltScene::Glue(scene) => table::write_glue_csv(scene, samples, &mut buf)?,
                    BuiltScene::Single(fc) => table::write_single_csv(fc, samples, &mut buf)?,
                }
                write_file(out_dir, target, &buf)?
            }
            OutputConfig::Mesh {
                target,
                surface,
                a_range,
                resolution,
            } => {
                let built = resolve_surface(&scene, surface, samples)
                    .with_context(|| format!("building mesh surface {surface}"))?;
                let mut buf = Vec::new();
                mesh::write_obj(
                    &built,
                    (a_range[0], a_range[1]),
                    (resolution[0], resolution[1]),
                    &mut buf,
                )?;
                write_file(out_dir, target, &buf)?
            }
        };
        written.push(path);
    }

    Ok(RunOutcome {
        report,
        unresolved,
        written,
    })
}

/// Build one framed curve, preferring the supplied frame but falling back
/// to surface extraction — with a note — when validation rejects it. A
/// frame that validates but disagrees with the extracted surface normal is
/// kept and noted.
fn build_frame(
    config: &SurfaceConfig,
    interval: (f64, f64),
    sites: &[SingularParam],
    notes: &mut Vec<String>,
) -> Result<Arc<FramedCurve>> {
    let map = parse_map(&config.expr, Arity::Surface)
        .with_context(|| format!("parsing surface '{}'", config.name))?;
    let Some(frame) = &config.frame else {
        let fc = FramedCurve::from_surface(map, config.orientation, interval, sites)
            .with_context(|| format!("extracting the frame of '{}'", config.name))?;
        return Ok(Arc::new(fc));
    };

    let gamma = map.substitute(Var::V, 0.0);
    let e = parse_map(&frame.e, Arity::Curve)
        .with_context(|| format!("parsing tangent of '{}'", config.name))?;
    let nu = parse_map(&frame.nu, Arity::Curve)
        .with_context(|| format!("parsing normal of '{}'", config.name))?;
    let l = parse_expr(&frame.l, Arity::Curve)
        .with_context(|| format!("parsing speed of '{}'", config.name))?;
    match FramedCurve::explicit(gamma, e, nu, l, interval, sites) {
        Ok(fc) => {
            let fc = Arc::new(fc);
            if let Ok(extracted) =
                FramedCurve::from_surface(map, config.orientation, interval, sites)
            {
                let mut worst = 0.0f64;
                let step = (interval.1 - interval.0) / 16.0;
                for i in 0..=16 {
                    let t = interval.0 + step * i as f64;
                    let supplied = fc.nu_jet(t, 0)?.value();
                    let surface = extracted.nu_jet(t, 0)?.value();
                    for k in 0..3 {
                        worst = worst.max((supplied[k] - surface[k]).abs());
                    }
                }
                if worst > NOTE_TOL {
                    notes.push(format!(
                        "{}: supplied normal deviates from the extracted surface normal \
                         by up to {worst:.3e}; keeping the supplied frame",
                        config.name
                    ));
                }
            }
            Ok(fc)
        }
        Err(err) => {
            notes.push(format!(
                "{}: supplied frame rejected ({err}); extracted from the surface instead",
                config.name
            ));
            let fc = FramedCurve::from_surface(map, config.orientation, interval, sites)
                .with_context(|| format!("extracting the fallback frame of '{}'", config.name))?;
            Ok(Arc::new(fc))
        }
    }
}

/// Sweep θ, decide constancy, and note a documented angle that does not
/// match the computed one.
fn theta_summary(
    scene: &GlueScene,
    samples: usize,
    stated: Option<f64>,
    notes: &mut Vec<String>,
) -> Result<ThetaReport> {
    let (t0, t1) = scene.interval();
    let step = (t1 - t0) / (samples - 1) as f64;
    let mut sum = 0.0;
    let mut values = Vec::with_capacity(samples);
    for i in 0..samples {
        let theta = scene.theta(t0 + step * i as f64)?;
        sum += theta;
        values.push(theta);
    }
    let mean = sum / samples as f64;
    let spread = values.iter().fold(0.0f64, |m, v| m.max((v - mean).abs()));
    let constant = spread <= 1e-9 * (1.0 + mean.abs());
    if let Some(stated) = stated {
        if constant && (stated - mean).abs() > NOTE_TOL {
            notes.push(format!(
                "documented rotation angle {stated} differs from the computed {mean}"
            ));
        } else if !constant {
            notes.push(format!(
                "documented rotation angle {stated}, but the computed angle varies \
                 between {:.6} and {:.6}",
                values.iter().cloned().fold(f64::INFINITY, f64::min),
                values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            ));
        }
    }
    Ok(ThetaReport {
        start: values[0],
        end: *values.last().unwrap(),
        constant,
        special_half_pi_multiple: None,
        special_pairs_match: None,
        stated,
    })
}

fn single_surface_report(
    fc: &Arc<FramedCurve>,
    name: &str,
    kind: RulingKind,
    samples: usize,
    tol: Option<f64>,
    sites: &[SingularParam],
) -> Result<SurfaceReport> {
    let surface = match DevelopableSurface::build(fc.clone(), kind, samples) {
        Ok(surface) => surface,
        Err(err @ SurfaceError::AssumptionViolated { .. }) => {
            return Ok(SurfaceReport {
                name: name.to_string(),
                status: "absent".to_string(),
                reason: Some(err.to_string()),
                shape: None,
                beta_max: None,
                rho_max: None,
                apex: None,
                points: Vec::new(),
            });
        }
        Err(other) => return Err(other.into()),
    };
    let class = classify_surface_with_tol(&surface, samples, tol)?;
    let apex = if class.shape == SurfaceShape::Cone {
        let (t0, t1) = surface.interval();
        let step = (t1 - t0) / (samples - 1) as f64;
        (0..samples).find_map(|i| surface.striction(t0 + step * i as f64).ok().map(|p| p.sigma))
    } else {
        None
    };
    let mut labels = Vec::new();
    if class.shape != SurfaceShape::Cone {
        for site in sites {
            labels.push((site.t0, classify_singularity_l0(&surface, site.t0)?));
        }
    }
    Ok(report::built_report(name, &class, apex, &labels))
}

fn has_unresolved(surfaces: &[SurfaceReport]) -> bool {
    surfaces.iter().any(|s| {
        s.points
            .iter()
            .any(|p| p.label == SingularPointLabel::Unresolved.as_str())
    })
}

fn resolve_surface(
    scene: &BuiltScene,
    name: &str,
    samples: usize,
) -> Result<DevelopableSurface> {
    match scene {
        BuiltScene::Glue(scene) => {
            let slot = SurfaceSlot::ALL
                .into_iter()
                .find(|slot| slot.as_str() == name)
                .with_context(|| format!("unknown surface '{name}' in a glued scene"))?;
            Ok(scene.surface(slot)?)
        }
        BuiltScene::Single(fc) => {
            let kind = match name {
                "S_nu" => RulingKind::Nu,
                "S_b" => RulingKind::B,
                _ => bail!("unknown surface '{name}' in a single-surface scene"),
            };
            Ok(DevelopableSurface::build(fc.clone(), kind, samples)?)
        }
    }
}

fn write_file(out_dir: &Path, target: &str, bytes: &[u8]) -> Result<PathBuf> {
    let path = out_dir.join(target);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))?;
    }
    std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_config(frame1: Option<&str>) -> SceneConfig {
        let frame = frame1
            .map(|f| format!(", \"frame\": {f}"))
            .unwrap_or_default();
        let text = format!(
            r#"{{
                "name": "cylinder and cone",
                "interval": [-3.0, 3.0],
                "samples": 101,
                "surfaces": [
                    {{"name": "frame1", "expr": "[cos(u), sin(u), v + 1]"{frame}}},
                    {{"name": "frame2", "expr": "[(v + 1)*cos(u), (v + 1)*sin(u), v + 1]"}}
                ],
                "outputs": []
            }}"#
        );
        serde_json::from_str(&text).unwrap()
    }

    #[test]
    fn classifies_the_cylinder_cone_pair() {
        let out = tempfile::tempdir().unwrap();
        let outcome = run_scene(&pair_config(None), Overrides::default(), out.path()).unwrap();
        assert!(!outcome.unresolved);
        let report = &outcome.report;
        assert_eq!(report.surfaces.len(), 4);
        assert_eq!(report.surfaces[0].shape.as_deref(), Some("cylinder"));
        assert_eq!(report.surfaces[1].status, "absent");
        assert_eq!(report.surfaces[2].shape.as_deref(), Some("cone"));
        let apex = report.surfaces[2].apex.unwrap();
        assert!(apex.iter().all(|c| c.abs() < 1e-9));
        assert!(report.notes.is_empty());
        let theta = report.theta.as_ref().unwrap();
        assert!(theta.constant);
        assert!(report.residuals.as_ref().unwrap().rotation.max < 1e-9);
    }

    #[test]
    fn invalid_supplied_frame_falls_back_with_a_note() {
        // The supplied normal is not unit length, so validation rejects it.
        let config = pair_config(Some(
            r#"{"e": "[-sin(u), cos(u), 0]", "nu": "[cos(u), sin(u), 1]", "l": "1"}"#,
        ));
        let out = tempfile::tempdir().unwrap();
        let outcome = run_scene(&config, Overrides::default(), out.path()).unwrap();
        assert_eq!(outcome.report.notes.len(), 1);
        assert!(outcome.report.notes[0].contains("rejected"));
        // The fallback frame still classifies the cone.
        assert_eq!(outcome.report.surfaces[2].shape.as_deref(), Some("cone"));
    }

    #[test]
    fn writes_requested_artifacts() {
        let mut config = pair_config(None);
        config.outputs = serde_json::from_str(
            r#"[
                {"kind": "report", "target": "out/report.json"},
                {"kind": "invariants_csv", "target": "out/invariants.csv"},
                {"kind": "mesh", "target": "out/cone.obj", "surface": "S_nu2",
                 "a_range": [-1.4142135623730951, 1.0], "resolution": [9, 5]}
            ]"#,
        )
        .unwrap();
        let out = tempfile::tempdir().unwrap();
        let outcome = run_scene(&config, Overrides::default(), out.path()).unwrap();
        assert_eq!(outcome.written.len(), 3);
        for path in &outcome.written {
            assert!(path.exists(), "{} missing", path.display());
        }
        let json = std::fs::read_to_string(&outcome.written[0]).unwrap();
        assert!(json.contains("\"scene\": \"cylinder and cone\""));
        let csv = std::fs::read_to_string(&outcome.written[1]).unwrap();
        assert_eq!(csv.lines().count(), 102);
        let obj = std::fs::read_to_string(&outcome.written[2]).unwrap();
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 45);
    }

    #[test]
    fn sample_override_wins() {
        let mut config = pair_config(None);
        config.outputs =
            serde_json::from_str(r#"[{"kind": "invariants_csv", "target": "t.csv"}]"#).unwrap();
        let out = tempfile::tempdir().unwrap();
        let overrides = Overrides {
            samples: Some(11),
            tol: None,
        };
        let outcome = run_scene(&config, overrides, out.path()).unwrap();
        assert_eq!(outcome.report.samples, 11);
        let csv = std::fs::read_to_string(&outcome.written[0]).unwrap();
        assert_eq!(csv.lines().count(), 12);
    }
}
