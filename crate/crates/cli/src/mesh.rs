//! Wavefront OBJ export of a surface band over a rectangle in `(t, a)`.
//!
//! Vertices and normals walk the grid row-major (outer `t`, inner `a`),
//! each quad splits into two triangles, and every float is printed with a
//! fixed format — repeated exports are byte-identical.

use anyhow::{Context, Result};
use gluelocus::developables::DevelopableSurface;
use std::io::Write;

pub fn write_obj<W: Write>(
    surface: &DevelopableSurface,
    a_range: (f64, f64),
    resolution: (usize, usize),
    mut out: W,
) -> Result<()> {
    let (nt, na) = resolution;
    assert!(nt >= 2 && na >= 2);
    let (t0, t1) = surface.interval();
    let dt = (t1 - t0) / (nt - 1) as f64;
    let da = (a_range.1 - a_range.0) / (na - 1) as f64;

    for i in 0..nt {
        let t = t0 + dt * i as f64;
        for j in 0..na {
            let a = a_range.0 + da * j as f64;
            let sample = surface
                .evaluate(t, a)
                .with_context(|| format!("evaluating mesh vertex at (t, a) = ({t}, {a})"))?;
            let [x, y, z] = sample.point;
            let [nx, ny, nz] = sample.normal;
            writeln!(out, "v {x:.9} {y:.9} {z:.9}")?;
            writeln!(out, "vn {nx:.9} {ny:.9} {nz:.9}")?;
        }
    }
    for i in 0..nt - 1 {
        for j in 0..na - 1 {
            let v00 = i * na + j + 1;
            let v10 = (i + 1) * na + j + 1;
            let v11 = (i + 1) * na + j + 2;
            let v01 = i * na + j + 2;
            writeln!(out, "f {v00}//{v00} {v10}//{v10} {v11}//{v11}")?;
            writeln!(out, "f {v00}//{v00} {v11}//{v11} {v01}//{v01}")?;
        }
    }
    Ok(())
}
