//! OBJ and PLY reading and writing.

mod obj;
mod ply;

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};
use crate::mesh::{HalfEdgeMesh, Vec3};

pub use ply::write_cloud_ply;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Ply,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "obj" => Some(MeshFormat::Obj),
            "ply" => Some(MeshFormat::Ply),
            _ => None,
        }
    }
}

/// Raw polygon soup as read from a file.
#[derive(Clone, Debug, Default)]
pub struct PolygonSoup {
    pub positions: Vec<Vec3>,
    pub polygons: Vec<Vec<usize>>,
}

/// Splits polygons into triangles fanning out from their first vertex.
pub fn fan_triangulate(polygons: &[Vec<usize>]) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(polygons.len());
    for poly in polygons {
        for k in 1..poly.len().saturating_sub(1) {
            out.push([poly[0], poly[k], poly[k + 1]]);
        }
    }
    out
}

pub fn read_soup<R: Read>(source: R, format: MeshFormat) -> Result<PolygonSoup> {
    let mut reader = BufReader::new(source);
    match format {
        MeshFormat::Obj => obj::read(&mut reader),
        MeshFormat::Ply => ply::read(&mut reader),
    }
}

/// Parses a mesh, fan-triangulating polygons and building connectivity.
pub fn load_mesh<R: Read>(source: R, format: MeshFormat) -> Result<HalfEdgeMesh> {
    let soup = read_soup(source, format)?;
    for (i, poly) in soup.polygons.iter().enumerate() {
        if poly.len() < 3 {
            return Err(Error::malformed(format!("face {i}"), "face has fewer than 3 vertices"));
        }
    }
    let polygonal = soup.polygons.iter().filter(|p| p.len() > 3).count();
    if polygonal > 0 {
        warn!("fan-triangulated {polygonal} polygon faces with more than 3 vertices");
    }
    let triangles = fan_triangulate(&soup.polygons);
    let mesh = HalfEdgeMesh::build(soup.positions, &triangles)?;
    let report = mesh.validate();
    if !report.is_manifold {
        return Err(Error::NonManifold(Box::new(report)));
    }
    if !report.degenerate_faces.is_empty() {
        warn!("input has {} degenerate faces", report.degenerate_faces.len());
    }
    Ok(mesh)
}

pub fn save_mesh<W: Write>(mesh: &HalfEdgeMesh, format: MeshFormat, sink: W) -> Result<()> {
    let mut w = BufWriter::new(sink);
    let indexed = mesh.to_indexed();
    match format {
        MeshFormat::Obj => obj::write(&indexed, &mut w)?,
        MeshFormat::Ply => ply::write_ascii(&indexed, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

pub fn load_path(path: &Path) -> Result<HalfEdgeMesh> {
    let format = MeshFormat::from_path(path).ok_or_else(|| {
        Error::malformed(path.display().to_string(), "unknown mesh extension (expected .obj or .ply)")
    })?;
    load_mesh(File::open(path)?, format)
}

pub fn save_path(mesh: &HalfEdgeMesh, path: &Path) -> Result<()> {
    let format = MeshFormat::from_path(path).ok_or_else(|| {
        Error::malformed(path.display().to_string(), "unknown mesh extension (expected .obj or .ply)")
    })?;
    save_mesh(mesh, format, File::create(path)?)
}

/// `%.9g`-style formatting: nine significant digits, no trailing zeros.
pub(crate) fn format_sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".to_string() } else { x.to_string() };
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
