use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::SurfaceMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Ply,
    Csv,
    Json,
}

impl MeshFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MeshFormat::Obj => "obj",
            MeshFormat::Ply => "ply",
            MeshFormat::Csv => "csv",
            MeshFormat::Json => "json",
        }
    }
}

impl FromStr for MeshFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(MeshFormat::Obj),
            "ply" => Ok(MeshFormat::Ply),
            "csv" => Ok(MeshFormat::Csv),
            "json" => Ok(MeshFormat::Json),
            other => Err(Error::InvalidArgument(format!("unknown mesh format `{other}`"))),
        }
    }
}

fn fixed9(v: f64) -> String {
    let s = format!("{:.9}", v);
    if s == "-0.000000000" {
        "0.000000000".to_string()
    } else {
        s
    }
}

fn write_obj(mesh: &SurfaceMesh) -> String {
    let mut out = String::with_capacity(mesh.vertices.len() * 40);
    for p in &mesh.vertices {
        let _ = writeln!(out, "v {} {} {}", fixed9(p.x1), fixed9(p.x2), fixed9(p.x3));
    }
    for face in &mesh.faces {
        out.push('f');
        for i in face.indices() {
            let _ = write!(out, " {}", i + 1);
        }
        out.push('\n');
    }
    out
}

fn write_ply(mesh: &SurfaceMesh) -> String {
    let mut out = String::with_capacity(mesh.vertices.len() * 40);
    out.push_str("ply\nformat ascii 1.0\n");
    let _ = writeln!(out, "comment {}", mesh.name);
    let _ = writeln!(out, "element vertex {}", mesh.vertices.len());
    out.push_str("property double x\nproperty double y\nproperty double z\n");
    let _ = writeln!(out, "element face {}", mesh.faces.len());
    out.push_str("property list uchar int vertex_indices\nend_header\n");
    for p in &mesh.vertices {
        let _ = writeln!(out, "{} {} {}", fixed9(p.x1), fixed9(p.x2), fixed9(p.x3));
    }
    for face in &mesh.faces {
        let idx = face.indices();
        let _ = write!(out, "{}", idx.len());
        for i in idx {
            let _ = write!(out, " {i}");
        }
        out.push('\n');
    }
    out
}

fn write_csv(mesh: &SurfaceMesh) -> String {
    let mut out = String::from("z_re,z_im,x1,x2,x3,lambda,iso_dev,H_est\n");
    for ((z, p), d) in mesh.params.iter().zip(&mesh.vertices).zip(&mesh.diagnostics) {
        let h = d.h_est.map(|h| h.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            z.re, z.im, p.x1, p.x2, p.x3, d.lambda, d.iso_dev, h
        );
    }
    out
}

/// Text of the mesh in `format`; identical meshes give identical bytes.
pub fn render(mesh: &SurfaceMesh, format: MeshFormat) -> Result<String> {
    Ok(match format {
        MeshFormat::Obj => write_obj(mesh),
        MeshFormat::Ply => write_ply(mesh),
        MeshFormat::Csv => write_csv(mesh),
        MeshFormat::Json => serde_json::to_string_pretty(mesh)? + "\n",
    })
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn export(mesh: &SurfaceMesh, format: MeshFormat, path: &Path) -> Result<()> {
    write_atomic(path, render(mesh, format)?.as_bytes())
}
