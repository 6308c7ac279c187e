//! Legacy-VTK (ASCII, UNSTRUCTURED_GRID) export of meshes and fields.

use crate::field::NodalField;
use crate::mesh::TriMesh;
use crate::Result;
use std::io::Write;
use std::path::Path;

const VTK_TRIANGLE: u32 = 5;

/// Writes the mesh with optional point scalars/vectors and cell scalars.
/// Point data come as `(name, field)` pairs; cell data as `(name, values)`.
pub fn write_vtk(
    mesh: &TriMesh,
    point_scalars: &[(&str, &NodalField)],
    point_vectors: &[(&str, &NodalField)],
    cell_scalars: &[(&str, &[f64])],
    path: &Path,
) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "# vtk DataFile Version 2.0")?;
    writeln!(f, "fracture snapshot")?;
    writeln!(f, "ASCII")?;
    writeln!(f, "DATASET UNSTRUCTURED_GRID")?;

    writeln!(f, "POINTS {} double", mesh.node_count())?;
    for p in &mesh.nodes {
        writeln!(f, "{} {} 0", p[0], p[1])?;
    }

    let nt = mesh.triangles.len();
    writeln!(f, "CELLS {} {}", nt, 4 * nt)?;
    for tri in &mesh.triangles {
        writeln!(f, "3 {} {} {}", tri[0], tri[1], tri[2])?;
    }
    writeln!(f, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(f, "{VTK_TRIANGLE}")?;
    }

    if !point_scalars.is_empty() || !point_vectors.is_empty() {
        writeln!(f, "POINT_DATA {}", mesh.node_count())?;
        for (name, field) in point_scalars {
            writeln!(f, "SCALARS {name} double 1")?;
            writeln!(f, "LOOKUP_TABLE default")?;
            for v in &field.values {
                writeln!(f, "{v}")?;
            }
        }
        for (name, field) in point_vectors {
            writeln!(f, "VECTORS {name} double")?;
            for i in 0..field.node_count() {
                let [x, y] = field.vec_at(i);
                writeln!(f, "{x} {y} 0")?;
            }
        }
    }

    if !cell_scalars.is_empty() {
        writeln!(f, "CELL_DATA {nt}")?;
        for (name, values) in cell_scalars {
            writeln!(f, "SCALARS {name} double 1")?;
            writeln!(f, "LOOKUP_TABLE default")?;
            for v in *values {
                writeln!(f, "{v}")?;
            }
        }
    }
    Ok(())
}
