use std::io::{BufRead, Read, Write};

use super::{format_sig9, PolygonSoup};
use crate::error::{Error, Result};
use crate::mesh::{IndexedMesh, Vec3};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }
}

#[derive(Debug)]
enum Property {
    Scalar { name: String, ty: Scalar },
    List { name: String, count: Scalar, item: Scalar },
}

impl Property {
    fn name(&self) -> &str {
        match self {
            Property::Scalar { name, .. } | Property::List { name, .. } => name,
        }
    }
}

#[derive(Debug)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Encoding {
    Ascii,
    BinaryLe,
}

/// Pulls values either from whitespace tokens or little-endian bytes.
enum ValueSource<'a, R: BufRead> {
    Ascii { tokens: std::vec::IntoIter<String>, reader: &'a mut R, line: usize },
    Binary { reader: &'a mut R },
}

impl<R: BufRead> ValueSource<'_, R> {
    fn next(&mut self, ty: Scalar) -> Result<f64> {
        match self {
            ValueSource::Ascii { tokens, reader, line } => {
                let tok = loop {
                    if let Some(t) = tokens.next() {
                        break t;
                    }
                    let mut buf = String::new();
                    if reader.read_line(&mut buf)? == 0 {
                        return Err(Error::malformed("ply body", "unexpected end of file"));
                    }
                    *line += 1;
                    *tokens = buf.split_whitespace().map(str::to_string).collect::<Vec<_>>().into_iter();
                };
                tok.parse::<f64>()
                    .map_err(|_| Error::malformed(format!("line {line}"), format!("bad value {tok:?}")))
            }
            ValueSource::Binary { reader } => {
                let mut b = [0u8; 8];
                let n = ty.size();
                reader.read_exact(&mut b[..n]).map_err(|e| {
                    if e.kind() == std::io::ErrorKind::UnexpectedEof {
                        Error::malformed("ply body", "unexpected end of binary data")
                    } else {
                        Error::Io(e)
                    }
                })?;
                Ok(match ty {
                    Scalar::I8 => b[0] as i8 as f64,
                    Scalar::U8 => b[0] as f64,
                    Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
                    Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
                    Scalar::I32 => i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
                    Scalar::U32 => u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
                    Scalar::F32 => f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
                    Scalar::F64 => f64::from_le_bytes(b),
                })
            }
        }
    }
}

fn read_header<R: BufRead>(reader: &mut R) -> Result<(Encoding, Vec<Element>, usize)> {
    let mut line = String::new();
    let mut lineno = 0;
    let mut next_line = |reader: &mut R, line: &mut String| -> Result<usize> {
        line.clear();
        if reader.read_line(line)? == 0 {
            return Err(Error::malformed("ply header", "missing end_header"));
        }
        lineno += 1;
        Ok(lineno)
    };

    next_line(reader, &mut line)?;
    if line.trim() != "ply" {
        return Err(Error::malformed("line 1", "missing ply magic"));
    }
    let mut encoding = None;
    let mut elements: Vec<Element> = Vec::new();
    loop {
        let n = next_line(reader, &mut line)?;
        let here = || format!("line {n}");
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["format", "ascii", _] => encoding = Some(Encoding::Ascii),
            ["format", "binary_little_endian", _] => encoding = Some(Encoding::BinaryLe),
            ["format", other, ..] => {
                return Err(Error::malformed(here(), format!("unsupported ply format {other}")))
            }
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", name, count] => {
                let count = count
                    .parse()
                    .map_err(|_| Error::malformed(here(), "bad element count"))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            ["property", "list", count, item, name] => {
                let (Some(count), Some(item)) = (Scalar::parse(count), Scalar::parse(item)) else {
                    return Err(Error::malformed(here(), "unknown property type"));
                };
                let el = elements
                    .last_mut()
                    .ok_or_else(|| Error::malformed(here(), "property before element"))?;
                el.properties.push(Property::List {
                    name: name.to_string(),
                    count,
                    item,
                });
            }
            ["property", ty, name] => {
                let ty = Scalar::parse(ty).ok_or_else(|| Error::malformed(here(), "unknown property type"))?;
                let el = elements
                    .last_mut()
                    .ok_or_else(|| Error::malformed(here(), "property before element"))?;
                el.properties.push(Property::Scalar {
                    name: name.to_string(),
                    ty,
                });
            }
            ["end_header"] => break,
            _ => return Err(Error::malformed(here(), format!("unrecognised header line {:?}", line.trim()))),
        }
    }
    let encoding = encoding.ok_or_else(|| Error::malformed("ply header", "missing format line"))?;
    Ok((encoding, elements, lineno))
}

pub(super) fn read<R: BufRead>(reader: &mut R) -> Result<PolygonSoup> {
    let (encoding, elements, header_lines) = read_header(reader)?;
    let mut src = match encoding {
        Encoding::Ascii => ValueSource::Ascii {
            tokens: Vec::new().into_iter(),
            reader,
            line: header_lines,
        },
        Encoding::BinaryLe => ValueSource::Binary { reader },
    };

    let mut soup = PolygonSoup::default();
    for el in &elements {
        let is_vertex = el.name == "vertex";
        let is_face = el.name == "face";
        let axis: Vec<Option<usize>> = el
            .properties
            .iter()
            .map(|p| match p.name() {
                "x" => Some(0),
                "y" => Some(1),
                "z" => Some(2),
                _ => None,
            })
            .collect();
        if is_vertex {
            for k in 0..3 {
                if !axis.contains(&Some(k)) {
                    return Err(Error::malformed("ply header", "vertex element lacks x, y or z"));
                }
            }
        }
        for i in 0..el.count {
            let mut xyz = [0.0; 3];
            for (p, ax) in el.properties.iter().zip(&axis) {
                match p {
                    Property::Scalar { ty, .. } => {
                        let v = src.next(*ty)?;
                        if let (true, Some(k)) = (is_vertex, ax) {
                            xyz[*k] = v;
                        }
                    }
                    Property::List { name, count, item } => {
                        let n = src.next(*count)?;
                        if n < 0.0 || n.fract() != 0.0 {
                            return Err(Error::malformed(format!("{} {i}", el.name), "bad list length"));
                        }
                        let mut list = Vec::with_capacity(n as usize);
                        for _ in 0..n as usize {
                            list.push(src.next(*item)?);
                        }
                        if is_face && (name == "vertex_indices" || name == "vertex_index") {
                            let poly = list
                                .into_iter()
                                .map(|x| {
                                    if x < 0.0 || x.fract() != 0.0 {
                                        Err(Error::malformed(format!("face {i}"), "bad vertex index"))
                                    } else {
                                        Ok(x as usize)
                                    }
                                })
                                .collect::<Result<Vec<_>>>()?;
                            soup.polygons.push(poly);
                        }
                    }
                }
            }
            if is_vertex {
                if xyz.iter().any(|c| !c.is_finite()) {
                    return Err(Error::malformed(format!("vertex {i}"), "non-finite coordinate"));
                }
                soup.positions.push(Vec3::from(xyz));
            }
        }
    }
    Ok(soup)
}

pub(super) fn write_ascii<W: Write>(mesh: &IndexedMesh, w: &mut W) -> Result<()> {
    writeln!(w, "ply\nformat ascii 1.0")?;
    writeln!(w, "element vertex {}", mesh.positions.len())?;
    writeln!(w, "property double x\nproperty double y\nproperty double z")?;
    writeln!(w, "element face {}", mesh.triangles.len())?;
    writeln!(w, "property list uchar int vertex_indices\nend_header")?;
    for p in &mesh.positions {
        writeln!(w, "{} {} {}", format_sig9(p.x), format_sig9(p.y), format_sig9(p.z))?;
    }
    for t in &mesh.triangles {
        writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}

/// Writes an oriented point set (positions plus normals) as ascii PLY.
pub fn write_cloud_ply<W: Write>(points: &[Vec3], normals: &[Vec3], mut w: W) -> Result<()> {
    if points.len() != normals.len() {
        return Err(Error::InvalidConfig("point and normal counts differ".into()));
    }
    writeln!(w, "ply\nformat ascii 1.0\nelement vertex {}", points.len())?;
    for name in ["x", "y", "z", "nx", "ny", "nz"] {
        writeln!(w, "property double {name}")?;
    }
    writeln!(w, "end_header")?;
    for (p, n) in points.iter().zip(normals) {
        let cols = [p.x, p.y, p.z, n.x, n.y, n.z].map(format_sig9);
        writeln!(w, "{}", cols.join(" "))?;
    }
    w.flush()?;
    Ok(())
}
