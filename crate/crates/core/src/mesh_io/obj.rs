//! Wavefront OBJ subset: `v` and `f` records in, `v` and `l` records out.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use nalgebra::Point3;

use super::{MeshIoError, TriangleMesh};
use crate::slicer::LayerContour;

/// Reads an OBJ file from disk.
pub fn load_obj(path: &Path) -> Result<TriangleMesh, MeshIoError> {
    let file = fs::File::open(path).map_err(|source| MeshIoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_obj(BufReader::new(file)).map_err(|e| match e {
        MeshIoError::Read(source) => MeshIoError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

/// Parses OBJ text into a triangle mesh.
///
/// Polygon faces `f v0 v1 .. vm` are fan-triangulated into `(v0, vi, vi+1)`.
/// Texture and normal references after `/` are ignored, as is every record
/// other than `v` and `f`. Triangles with a repeated corner index are dropped
/// and counted in [`TriangleMesh::dropped_degenerate`].
pub fn parse_obj<R: Read>(reader: R) -> Result<TriangleMesh, MeshIoError> {
    let mut vertices: Vec<Point3<f64>> = Vec::new();
    // (line number, resolved indices) so out-of-range forward references can
    // be reported against the final vertex count.
    let mut polygons: Vec<(usize, Vec<i64>)> = Vec::new();

    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(MeshIoError::Read)?;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line.as_str(),
        };
        let mut fields = content.split_whitespace();
        match fields.next() {
            Some("v") => {
                let mut coords = [0.0f64; 3];
                for (slot, c) in coords.iter_mut().enumerate() {
                    let tok = fields.next().ok_or_else(|| MeshIoError::Parse {
                        line: line_no,
                        message: format!("vertex record has {slot} coordinates, expected 3"),
                    })?;
                    *c = parse_coord(tok, line_no)?;
                }
                vertices.push(Point3::from(coords));
            }
            Some("f") => {
                let mut refs = Vec::new();
                for tok in fields {
                    let head = tok.split('/').next().unwrap_or("");
                    let idx: i64 = head.parse().map_err(|_| MeshIoError::Parse {
                        line: line_no,
                        message: format!("malformed vertex reference `{tok}`"),
                    })?;
                    let resolved = match idx {
                        0 => {
                            return Err(MeshIoError::Parse {
                                line: line_no,
                                message: "vertex reference 0 is not valid in OBJ".into(),
                            })
                        }
                        n if n < 0 => vertices.len() as i64 + n,
                        n => n - 1,
                    };
                    refs.push(resolved);
                }
                if refs.len() < 3 {
                    return Err(MeshIoError::Parse {
                        line: line_no,
                        message: format!(
                            "face record has {} references, expected at least 3",
                            refs.len()
                        ),
                    });
                }
                polygons.push((line_no, refs));
            }
            _ => {}
        }
    }

    let count = vertices.len();
    let mut faces = Vec::new();
    let mut dropped = 0;
    for (line, refs) in polygons {
        let mut idx = Vec::with_capacity(refs.len());
        for r in refs {
            if r < 0 || r as usize >= count {
                return Err(MeshIoError::IndexOutOfRange {
                    line,
                    index: r,
                    vertex_count: count,
                });
            }
            idx.push(r as usize);
        }
        for k in 1..idx.len() - 1 {
            let tri = [idx[0], idx[k], idx[k + 1]];
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                dropped += 1;
            } else {
                faces.push(tri);
            }
        }
    }

    if faces.is_empty() {
        return Err(MeshIoError::EmptyMesh);
    }
    Ok(TriangleMesh {
        vertices,
        faces,
        dropped_degenerate: dropped,
    })
}

fn parse_coord(tok: &str, line: usize) -> Result<f64, MeshIoError> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(MeshIoError::Parse {
            line,
            message: format!("non-finite coordinate `{tok}`"),
        }),
        Err(_) => Err(MeshIoError::Parse {
            line,
            message: format!("malformed coordinate `{tok}`"),
        }),
    }
}

/// Serializes a mesh as `v`/`f` records. Used for fixtures and round trips.
pub fn mesh_to_obj(mesh: &TriangleMesh) -> String {
    let mut out = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {} {} {}", v.x, v.y, v.z);
    }
    for f in &mesh.faces {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

/// Renders a layer as OBJ polyline records.
///
/// Closed loops store their first point again at the end; that duplicate is
/// not emitted as a vertex, the `l` record repeats the first index instead.
pub fn layer_to_obj(layer: &LayerContour) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# layer {} iso {}", layer.layer_index, layer.iso_value);
    let mut next_index = 1usize;
    let mut records = Vec::with_capacity(layer.loops.len());
    for lp in &layer.loops {
        let pts = lp.distinct_points();
        let first = next_index;
        for p in pts {
            let _ = writeln!(out, "v {} {} {}", p.x, p.y, p.z);
        }
        let mut rec = String::from("l");
        for k in 0..pts.len() {
            let _ = write!(rec, " {}", first + k);
        }
        if lp.closed {
            let _ = write!(rec, " {first}");
        }
        next_index += pts.len();
        records.push(rec);
    }
    for rec in records {
        out.push_str(&rec);
        out.push('\n');
    }
    out
}

/// Writes a layer's contour OBJ. Layers without loops produce no file and
/// `Ok(false)` is returned.
pub fn write_layer_obj(layer: &LayerContour, path: &Path) -> Result<bool, MeshIoError> {
    if layer.loops.is_empty() {
        return Ok(false);
    }
    fs::write(path, layer_to_obj(layer)).map_err(|source| MeshIoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(true)
}
