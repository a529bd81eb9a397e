//! Mesh input and the per-layer output artifacts.

mod mesh;
mod obj;
mod pgm;
mod summary;

use std::path::PathBuf;

use thiserror::Error;

pub use mesh::{Aabb, TriangleMesh};
pub use obj::{layer_to_obj, load_obj, mesh_to_obj, parse_obj, write_layer_obj};
pub use pgm::{decode_pgm, encode_pgm, read_pgm, write_pgm, GrayImage};
pub use summary::{summary_json, write_summary_json, LayerSummary, RasterInfo, RunMetadata};

#[derive(Debug, Error)]
pub enum MeshIoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: vertex index {index} out of range for {vertex_count} vertices")]
    IndexOutOfRange {
        line: usize,
        index: i64,
        vertex_count: usize,
    },
    #[error("mesh has no faces")]
    EmptyMesh,
    #[error("read failed: {0}")]
    Read(#[source] std::io::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed PGM: {0}")]
    Pgm(String),
    #[error("JSON encoding failed: {0}")]
    Json(#[from] serde_json::Error),
}
