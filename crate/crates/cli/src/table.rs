//! Invariant tables as CSV, one row per parameter sample.
//!
//! Quantities whose hypotheses fail at a sample — a ruling pair that
//! vanishes, a striction offset on a cylindrical stretch — leave their
//! cells empty rather than faking a number. Floats carry 17 significant
//! digits so the table round-trips bit-exactly.

use anyhow::{Context, Result};
use gluelocus::developables::{DevelopableSurface, RulingKind, SurfaceError};
use gluelocus::frames::FramedCurve;
use gluelocus::glue::{GlueScene, SurfaceSlot};
use std::io::Write;
use std::sync::Arc;

fn cell(value: Option<f64>) -> String {
    value.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

fn grid(interval: (f64, f64), samples: usize) -> impl Iterator<Item = f64> {
    let step = (interval.1 - interval.0) / (samples - 1) as f64;
    (0..samples).map(move |i| interval.0 + step * i as f64)
}

/// β, ρ and striction offset of one surface at `t`, each empty where its
/// hypothesis fails.
fn surface_cells(surface: Option<&DevelopableSurface>, t: f64) -> [Option<f64>; 3] {
    let Some(surface) = surface else {
        return [None, None, None];
    };
    let scalars = match (surface.beta(t), surface.rho(t)) {
        (Ok(beta), Ok(rho)) => [Some(beta), Some(rho)],
        _ => [None, None],
    };
    let striction = match surface.striction(t) {
        Ok(point) => Some(point.s),
        Err(_) => None,
    };
    [scalars[0], scalars[1], striction]
}

fn build_slot(fc: &Arc<FramedCurve>, kind: RulingKind, samples: usize) -> Option<DevelopableSurface> {
    match DevelopableSurface::build(fc.clone(), kind, samples) {
        Ok(surface) => Some(surface),
        Err(SurfaceError::AssumptionViolated { .. }) => None,
        Err(_) => None,
    }
}

pub fn write_glue_csv<W: Write>(scene: &GlueScene, samples: usize, mut out: W) -> Result<()> {
    writeln!(
        out,
        "t,l,kappa11,kappa12,kappa13,beta_nu1,rho_nu1,beta_b1,rho_b1,s_nu1,s_b1,\
         kappa21,kappa22,kappa23,beta_nu2,rho_nu2,beta_b2,rho_b2,s_nu2,s_b2,theta"
    )?;
    let (fc1, fc2) = scene.frames();
    let surfaces: Vec<Option<DevelopableSurface>> = SurfaceSlot::ALL
        .iter()
        .map(|&slot| match scene.surface(slot) {
            Ok(s) => Some(s),
            Err(_) => None,
        })
        .collect();
    for t in grid(scene.interval(), samples) {
        let i1 = fc1.invariants(t, 0).context("frame 1 invariants")?;
        let i2 = fc2.invariants(t, 0).context("frame 2 invariants")?;
        let [bn1, rn1, sn1] = surface_cells(surfaces[0].as_ref(), t);
        let [bb1, rb1, sb1] = surface_cells(surfaces[1].as_ref(), t);
        let [bn2, rn2, sn2] = surface_cells(surfaces[2].as_ref(), t);
        let [bb2, rb2, sb2] = surface_cells(surfaces[3].as_ref(), t);
        let theta = scene.theta(t).context("rotation angle")?;
        let row = [
            cell(Some(t)),
            cell(Some(i1.l.value())),
            cell(Some(i1.kappa1.value())),
            cell(Some(i1.kappa2.value())),
            cell(Some(i1.kappa3.value())),
            cell(bn1),
            cell(rn1),
            cell(bb1),
            cell(rb1),
            cell(sn1),
            cell(sb1),
            cell(Some(i2.kappa1.value())),
            cell(Some(i2.kappa2.value())),
            cell(Some(i2.kappa3.value())),
            cell(bn2),
            cell(rn2),
            cell(bb2),
            cell(rb2),
            cell(sn2),
            cell(sb2),
            cell(Some(theta)),
        ];
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_single_csv<W: Write>(
    fc: &Arc<FramedCurve>,
    samples: usize,
    mut out: W,
) -> Result<()> {
    writeln!(
        out,
        "t,l,kappa1,kappa2,kappa3,beta_nu,rho_nu,beta_b,rho_b,s_nu,s_b"
    )?;
    let nu = build_slot(fc, RulingKind::Nu, samples);
    let b = build_slot(fc, RulingKind::B, samples);
    for t in grid(fc.interval(), samples) {
        let fi = fc.invariants(t, 0).context("frame invariants")?;
        let [bn, rn, sn] = surface_cells(nu.as_ref(), t);
        let [bb, rb, sb] = surface_cells(b.as_ref(), t);
        let row = [
            cell(Some(t)),
            cell(Some(fi.l.value())),
            cell(Some(fi.kappa1.value())),
            cell(Some(fi.kappa2.value())),
            cell(Some(fi.kappa3.value())),
            cell(bn),
            cell(rn),
            cell(bb),
            cell(rb),
            cell(sn),
            cell(sb),
        ];
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use gluelocus::curvelang::{parse_map, Arity};

    fn fc(src: &str, interval: (f64, f64)) -> Arc<FramedCurve> {
        Arc::new(
            FramedCurve::from_surface(parse_map(src, Arity::Surface).unwrap(), 1, interval, &[])
                .unwrap(),
        )
    }

    #[test]
    fn glue_table_leaves_failed_hypotheses_empty() {
        let scene = GlueScene::new(
            fc("[cos(u), sin(u), -v]", (0.25, 2.9)),
            fc("[(1 - v)*cos(u), (1 - v)*sin(u), 0]", (0.25, 2.9)),
            33,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_glue_csv(&scene, 5, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert!(lines[0].starts_with("t,l,kappa11,"));
        assert!(lines[0].ends_with(",theta"));
        let cells: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(cells.len(), 21);
        // Both frames are cylinders here: the ν₂- and b₁-rulings do not
        // exist, and no striction offset is defined anywhere.
        assert!(!cells[1].is_empty() && !cells[2].is_empty());
        assert!(cells[7].is_empty() && cells[8].is_empty()); // beta_b1, rho_b1
        assert!(cells[14].is_empty() && cells[15].is_empty()); // beta_nu2, rho_nu2
        assert!(cells[9].is_empty() && cells[18].is_empty()); // s_nu1, s_nu2
        assert!(!cells[20].is_empty());
        // 17 significant digits survive a round-trip.
        let theta: f64 = cells[20].parse().unwrap();
        assert!((theta - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn single_table_has_one_frame_block() {
        let curve = fc("[cos(u), sin(u), u + v]", (0.0, 3.0));
        let mut buf = Vec::new();
        write_single_csv(&curve, 4, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(
            lines[0],
            "t,l,kappa1,kappa2,kappa3,beta_nu,rho_nu,beta_b,rho_b,s_nu,s_b"
        );
        assert_eq!(lines[1].split(',').count(), 11);
    }
}
