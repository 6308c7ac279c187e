//! Structured triangular meshes for rectangles and strips, with tagged
//! boundary edges (Dirichlet / loaded Neumann / free Neumann).

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryTag {
    /// Displacement prescribed (`u = g(t)`).
    Dirichlet,
    /// Traction prescribed and possibly nonzero (`sigma nu = q(t)`); the phase
    /// field is pinned to 0 here.
    NeumannLoaded,
    /// Traction-free.
    NeumannFree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
}

/// Which tag each side of a rectangle receives.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TagRule {
    pub left: BoundaryTag,
    pub right: BoundaryTag,
    pub bottom: BoundaryTag,
    pub top: BoundaryTag,
}

impl TagRule {
    pub fn all(tag: BoundaryTag) -> Self {
        TagRule { left: tag, right: tag, bottom: tag, top: tag }
    }

    /// Pure-shear strip convention: displacements driven through the top and
    /// bottom edges, left and right ends free.
    pub fn strip() -> Self {
        TagRule {
            left: BoundaryTag::NeumannFree,
            right: BoundaryTag::NeumannFree,
            bottom: BoundaryTag::Dirichlet,
            top: BoundaryTag::Dirichlet,
        }
    }
}

/// Triangulated rectangle. Nodes are laid out row-major on a structured grid;
/// each grid cell is split along a diagonal whose orientation alternates per
/// cell row.
#[derive(Clone, Debug)]
pub struct TriMesh {
    pub nodes: Vec<[f64; 2]>,
    /// Counterclockwise node-index triples.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    /// Grid cells per side, kept for structured lookups.
    pub nx: usize,
    pub ny: usize,
}

/// Geometric node selector for [`node_subset`].
#[derive(Clone, Debug)]
pub enum Region {
    XEq { value: f64, tol: f64 },
    YEq { value: f64, tol: f64 },
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
}

impl Region {
    pub fn x_eq(value: f64) -> Self {
        Region::XEq { value, tol: 1e-9 * (1.0 + value.abs()) }
    }
    pub fn y_eq(value: f64) -> Self {
        Region::YEq { value, tol: 1e-9 * (1.0 + value.abs()) }
    }
    fn contains(&self, p: [f64; 2]) -> bool {
        match *self {
            Region::XEq { value, tol } => (p[0] - value).abs() <= tol,
            Region::YEq { value, tol } => (p[1] - value).abs() <= tol,
            Region::Rect { x0, x1, y0, y1 } => {
                p[0] >= x0 && p[0] <= x1 && p[1] >= y0 && p[1] <= y1
            }
        }
    }
}

/// Builds a structured triangulation of `(x0, x0+width) x (y0, y0+height)`
/// with target spacing `h`, which must divide both sides within rounding.
pub fn build_rect_mesh(
    origin: [f64; 2],
    width: f64,
    height: f64,
    h: f64,
    tags: TagRule,
) -> Result<TriMesh> {
    if !(width > 0.0) || !(height > 0.0) || !(h > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "mesh needs width, height, h > 0; got {width}, {height}, {h}"
        )));
    }
    if h > width || h > height {
        return Err(Error::InvalidParameter(format!(
            "h = {h} exceeds a side ({width} x {height})"
        )));
    }
    let nx = (width / h).round() as usize;
    let ny = (height / h).round() as usize;
    if (nx as f64 * h - width).abs() > 1e-9 * width || (ny as f64 * h - height).abs() > 1e-9 * height
    {
        return Err(Error::InvalidParameter(format!(
            "h = {h} does not divide the sides {width} x {height}"
        )));
    }

    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push([origin[0] + i as f64 * h, origin[1] + j as f64 * h]);
        }
    }

    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let a = idx(i, j);
            let b = idx(i + 1, j);
            let c = idx(i + 1, j + 1);
            let d = idx(i, j + 1);
            if j % 2 == 0 {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }

    let mut boundary_edges = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        boundary_edges.push(BoundaryEdge { nodes: [idx(i, 0), idx(i + 1, 0)], tag: tags.bottom });
        boundary_edges.push(BoundaryEdge { nodes: [idx(i, ny), idx(i + 1, ny)], tag: tags.top });
    }
    for j in 0..ny {
        boundary_edges.push(BoundaryEdge { nodes: [idx(0, j), idx(0, j + 1)], tag: tags.left });
        boundary_edges.push(BoundaryEdge { nodes: [idx(nx, j), idx(nx, j + 1)], tag: tags.right });
    }

    Ok(TriMesh { nodes, triangles, boundary_edges, nx, ny })
}

/// Strip `(0, width) x (-half_height, half_height)` with Dirichlet top/bottom
/// and free ends. `half_height / h` must be an integer so the centerline
/// `y = 0` is a grid line.
pub fn build_strip_mesh(width: f64, half_height: f64, h: f64) -> Result<TriMesh> {
    build_rect_mesh([0.0, -half_height], width, 2.0 * half_height, h, TagRule::strip())
}

impl TriMesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let pa = self.nodes[a];
        let pb = self.nodes[b];
        let pc = self.nodes[c];
        0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.signed_area(t)).sum()
    }

    /// Lumped (row-sum) node masses: one third of each incident triangle area.
    pub fn lumped_masses(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.node_count()];
        for t in 0..self.triangles.len() {
            let a = self.signed_area(t) / 3.0;
            for &n in &self.triangles[t] {
                m[n] += a;
            }
        }
        m
    }

    /// Nodes incident to at least one boundary edge with the given tag,
    /// sorted, deduplicated.
    pub fn tagged_nodes(&self, tag: BoundaryTag) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .boundary_edges
            .iter()
            .filter(|e| e.tag == tag)
            .flat_map(|e| e.nodes)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Checks every structural invariant; used by tests and `--seed-check`.
    pub fn validate(&self) -> Result<()> {
        let n = self.node_count();
        let mut seen = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                if v >= n {
                    return Err(Error::InvalidParameter(format!(
                        "triangle {t} references node {v} out of {n}"
                    )));
                }
            }
            if self.signed_area(t) <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "triangle {t} has non-positive area {}",
                    self.signed_area(t)
                )));
            }
            let mut key = *tri;
            key.sort_unstable();
            if seen.insert(key, t).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate triangle {t}")));
            }
        }

        // Edge census: interior edges appear in exactly 2 triangles, boundary
        // edges in exactly 1, and the tagged list covers the latter exactly.
        let mut census: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                *census.entry(key).or_insert(0) += 1;
            }
        }
        if census.values().any(|&c| c > 2) {
            return Err(Error::InvalidParameter("edge shared by more than 2 triangles".into()));
        }
        let mut boundary: Vec<(usize, usize)> = census
            .iter()
            .filter(|(_, &c)| c == 1)
            .map(|(&e, _)| e)
            .collect();
        boundary.sort_unstable();
        let mut tagged: Vec<(usize, usize)> = self
            .boundary_edges
            .iter()
            .map(|e| {
                let [a, b] = e.nodes;
                (a.min(b), a.max(b))
            })
            .collect();
        let before = tagged.len();
        tagged.sort_unstable();
        tagged.dedup();
        if tagged.len() != before {
            return Err(Error::InvalidParameter("duplicate boundary edge".into()));
        }
        if boundary != tagged {
            return Err(Error::InvalidParameter(
                "tagged boundary edges do not match the topological boundary".into(),
            ));
        }
        Ok(())
    }
}

/// Area and P1 shape-function gradients of one triangle.
#[derive(Clone, Copy, Debug)]
pub struct ElementGradients {
    pub area: f64,
    /// x-derivatives of the three nodal shape functions.
    pub bx: [f64; 3],
    /// y-derivatives of the three nodal shape functions.
    pub by: [f64; 3],
}

/// Precomputes per-element gradients; strains of P1 fields are constant per
/// element and assemble from these.
pub fn element_gradients(mesh: &TriMesh) -> Vec<ElementGradients> {
    mesh.triangles
        .iter()
        .map(|&[a, b, c]| {
            let (pa, pb, pc) = (mesh.nodes[a], mesh.nodes[b], mesh.nodes[c]);
            let area2 = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]);
            ElementGradients {
                area: 0.5 * area2,
                bx: [(pb[1] - pc[1]) / area2, (pc[1] - pa[1]) / area2, (pa[1] - pb[1]) / area2],
                by: [(pc[0] - pb[0]) / area2, (pa[0] - pc[0]) / area2, (pb[0] - pa[0]) / area2],
            }
        })
        .collect()
}

/// Sorted indices of nodes inside the region. Empty results are allowed.
pub fn node_subset(mesh: &TriMesh, region: &Region) -> Vec<usize> {
    let mut out: Vec<usize> = (0..mesh.node_count())
        .filter(|&i| region.contains(mesh.nodes[i]))
        .collect();
    out.sort_unstable();
    out
}
