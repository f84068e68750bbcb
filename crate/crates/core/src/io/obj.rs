use std::io::{BufRead, Write};

use super::{format_sig9, PolygonSoup};
use crate::error::{Error, Result};
use crate::mesh::{IndexedMesh, Vec3};

pub(super) fn read<R: BufRead>(reader: &mut R) -> Result<PolygonSoup> {
    let mut soup = PolygonSoup::default();
    let mut line = String::new();
    let mut lineno = 0usize;
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        lineno += 1;
        let content = line.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let mut xyz = [0.0; 3];
                for c in &mut xyz {
                    let tok = tokens
                        .next()
                        .ok_or_else(|| at(lineno, "vertex needs three coordinates"))?;
                    *c = tok
                        .parse()
                        .map_err(|_| at(lineno, format!("bad coordinate {tok:?}")))?;
                }
                if xyz.iter().any(|c: &f64| !c.is_finite()) {
                    return Err(at(lineno, "non-finite coordinate"));
                }
                soup.positions.push(Vec3::from(xyz));
            }
            Some("f") => {
                let mut poly = Vec::new();
                for tok in tokens {
                    poly.push(resolve_index(tok, soup.positions.len(), lineno)?);
                }
                if poly.len() < 3 {
                    return Err(at(lineno, "face has fewer than 3 vertices"));
                }
                soup.polygons.push(poly);
            }
            // normals, texture coordinates, groups and materials are ignored
            _ => {}
        }
    }
    Ok(soup)
}

/// Resolves the position part of `i`, `i/t`, `i//n` or `i/t/n`, including
/// negative (relative) indices.
fn resolve_index(tok: &str, n_positions: usize, lineno: usize) -> Result<usize> {
    let head = tok.split('/').next().unwrap_or("");
    let raw: i64 = head
        .parse()
        .map_err(|_| at(lineno, format!("bad face index {tok:?}")))?;
    let idx = match raw {
        0 => return Err(at(lineno, "face index 0 is not valid in OBJ")),
        r if r > 0 => r as usize - 1,
        r => {
            let back = r.unsigned_abs() as usize;
            if back > n_positions {
                return Err(at(lineno, format!("relative index {r} before first vertex")));
            }
            n_positions - back
        }
    };
    Ok(idx)
}

fn at(lineno: usize, message: impl Into<String>) -> Error {
    Error::malformed(format!("line {lineno}"), message)
}

pub(super) fn write<W: Write>(mesh: &IndexedMesh, w: &mut W) -> Result<()> {
    for p in &mesh.positions {
        writeln!(w, "v {} {} {}", format_sig9(p.x), format_sig9(p.y), format_sig9(p.z))?;
    }
    for t in &mesh.triangles {
        writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}
