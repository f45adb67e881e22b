//! Classification report emitted as JSON: per-surface shape and labels,
//! the rotation angle, and every cross-route residual together with the
//! tolerance it was held to. Field order is fixed by the struct layout and
//! nothing here depends on wall-clock time, so repeated runs serialize to
//! identical bytes.

use gluelocus::classify::{SingularityLabel, SurfaceClass};
use gluelocus::glue::{GlueClassification, SlotOutcome, SpecialAngle};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub scene: String,
    pub interval: [f64; 2],
    pub samples: usize,
    /// Frame fallbacks and documented-versus-computed discrepancies, in
    /// the order they were discovered.
    pub notes: Vec<String>,
    pub surfaces: Vec<SurfaceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<ResidualReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceReport {
    pub name: String,
    /// `built` or `absent`.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_max: Option<f64>,
    /// Common point of all rulings; present exactly for cones.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub apex: Option<[f64; 3]>,
    pub points: Vec<PointReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub t: f64,
    pub a: f64,
    pub label: String,
    pub rho: f64,
    pub rho_prime: f64,
    pub eta_lambda: f64,
    pub eta_eta_lambda: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaReport {
    pub start: f64,
    pub end: f64,
    pub constant: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub special_half_pi_multiple: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub special_pairs_match: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stated: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub rotation: Residual,
    pub invariant_transport: Residual,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expanded_beta: Option<Residual>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expanded_rho: Option<Residual>,
}

/// A measured maximum next to the bound it was required to stay under.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Residual {
    pub max: f64,
    pub tolerance: f64,
}

pub const ROTATION_TOL: f64 = 1e-9;
pub const TRANSPORT_TOL: f64 = 1e-9;
pub const EXPANDED_TOL: f64 = 1e-8;

pub fn surface_report(name: &str, outcome: &SlotOutcome) -> SurfaceReport {
    match outcome {
        SlotOutcome::Absent { reason } => SurfaceReport {
            name: name.to_string(),
            status: "absent".to_string(),
            reason: Some(reason.clone()),
            shape: None,
            beta_max: None,
            rho_max: None,
            apex: None,
            points: Vec::new(),
        },
        SlotOutcome::Built {
            class,
            apex,
            labels,
        } => built_report(name, class, *apex, labels),
    }
}

pub fn built_report(
    name: &str,
    class: &SurfaceClass,
    apex: Option<[f64; 3]>,
    labels: &[(f64, SingularityLabel)],
) -> SurfaceReport {
    SurfaceReport {
        name: name.to_string(),
        status: "built".to_string(),
        reason: None,
        shape: Some(format!("{:?}", class.shape).to_lowercase()),
        beta_max: Some(class.beta_max),
        rho_max: Some(class.rho_max),
        apex,
        points: labels
            .iter()
            .map(|(t, label)| PointReport {
                t: *t,
                a: 0.0,
                label: label.label.as_str().to_string(),
                rho: label.rho,
                rho_prime: label.rho_prime,
                eta_lambda: label.eta_lambda,
                eta_eta_lambda: label.eta_eta_lambda,
            })
            .collect(),
    }
}

pub fn residual_report(classification: &GlueClassification) -> ResidualReport {
    ResidualReport {
        rotation: Residual {
            max: classification.rotation_residual_max,
            tolerance: ROTATION_TOL,
        },
        invariant_transport: Residual {
            max: classification.invariant_residual_max,
            tolerance: TRANSPORT_TOL,
        },
        expanded_beta: classification.expanded_beta_residual_max.map(|max| Residual {
            max,
            tolerance: EXPANDED_TOL,
        }),
        expanded_rho: classification.expanded_rho_residual_max.map(|max| Residual {
            max,
            tolerance: EXPANDED_TOL,
        }),
    }
}

pub fn theta_report(
    start: f64,
    end: f64,
    constant: bool,
    special: Option<&SpecialAngle>,
    stated: Option<f64>,
) -> ThetaReport {
    ThetaReport {
        start,
        end,
        constant,
        special_half_pi_multiple: special.map(|s| s.half_pi_multiple),
        special_pairs_match: special.map(|s| s.pairs_match),
        stated,
    }
}

/// Serialize with a trailing newline; pretty-printed for human eyes but
/// still byte-stable.
pub fn to_json(report: &Report) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use gluelocus::classify::{SingularPointLabel, SurfaceShape};

    #[test]
    fn built_surface_serializes_with_shape_and_points() {
        let class = SurfaceClass {
            shape: SurfaceShape::Generic,
            beta_max: 2.0,
            rho_max: 5.0,
        };
        let label = SingularityLabel {
            label: SingularPointLabel::CuspidalEdge,
            rho: -5.0625,
            rho_prime: 1.0,
            eta_lambda: 2.0,
            eta_eta_lambda: 0.5,
        };
        let report = built_report("S_b2", &class, None, &[(0.0, label)]);
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"shape\":\"generic\""));
        assert!(json.contains("\"label\":\"cuspidal edge\""));
        assert!(!json.contains("apex"));
        assert!(!json.contains("reason"));
    }

    #[test]
    fn serialization_is_reproducible() {
        let report = Report {
            scene: "pair".into(),
            interval: [-1.0, 1.0],
            samples: 201,
            notes: vec!["frame 1: note".into()],
            surfaces: vec![],
            theta: Some(theta_report(0.5, 0.5, true, None, Some(0.5))),
            residuals: None,
        };
        assert_eq!(to_json(&report), to_json(&report.clone()));
        assert!(to_json(&report).ends_with('\n'));
    }
}
