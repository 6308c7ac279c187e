//! Nodal fields: scalars (phase field, projected energy density) and 2-vectors
//! (displacements) attached to the nodes of a [`crate::mesh::TriMesh`].

use crate::mesh::TriMesh;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct NodalField {
    pub components: usize,
    pub values: Vec<f64>,
}

impl NodalField {
    pub fn scalar(mesh: &TriMesh, fill: f64) -> NodalField {
        NodalField { components: 1, values: vec![fill; mesh.node_count()] }
    }

    pub fn vector(mesh: &TriMesh, fill: [f64; 2]) -> NodalField {
        let mut values = Vec::with_capacity(2 * mesh.node_count());
        for _ in 0..mesh.node_count() {
            values.extend_from_slice(&fill);
        }
        NodalField { components: 2, values }
    }

    pub fn from_fn_scalar(mesh: &TriMesh, f: impl Fn([f64; 2]) -> f64) -> NodalField {
        NodalField { components: 1, values: mesh.nodes.iter().map(|&p| f(p)).collect() }
    }

    pub fn from_fn_vector(mesh: &TriMesh, f: impl Fn([f64; 2]) -> [f64; 2]) -> NodalField {
        let mut values = Vec::with_capacity(2 * mesh.node_count());
        for &p in &mesh.nodes {
            values.extend_from_slice(&f(p));
        }
        NodalField { components: 2, values }
    }

    pub fn node_count(&self) -> usize {
        self.values.len() / self.components
    }

    #[inline]
    pub fn vec_at(&self, node: usize) -> [f64; 2] {
        debug_assert_eq!(self.components, 2);
        [self.values[2 * node], self.values[2 * node + 1]]
    }

    /// Value count must match the mesh; `components` must be 1 or 2.
    pub fn check_compatible(&self, mesh: &TriMesh) -> Result<()> {
        if self.components != 1 && self.components != 2 {
            return Err(Error::InvalidParameter(format!(
                "field has {} components, expected 1 or 2",
                self.components
            )));
        }
        if self.values.len() != self.components * mesh.node_count() {
            return Err(Error::InvalidParameter(format!(
                "field has {} values for {} nodes x {} components",
                self.values.len(),
                mesh.node_count(),
                self.components
            )));
        }
        Ok(())
    }

    /// Damage fields must additionally stay inside [0, 1].
    pub fn check_damage_range(&self) -> Result<()> {
        if let Some(v) = self.values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidParameter(format!("damage value {v} outside [0, 1]")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_rect_mesh, BoundaryTag, TagRule};

    #[test]
    fn construction_and_checks() {
        let m = build_rect_mesh([0.0, 0.0], 1.0, 1.0, 0.5, TagRule::all(BoundaryTag::Dirichlet))
            .unwrap();
        let z = NodalField::scalar(&m, 0.5);
        z.check_compatible(&m).unwrap();
        z.check_damage_range().unwrap();

        let bad = NodalField { components: 1, values: vec![1.5; 9] };
        assert!(bad.check_damage_range().is_err());

        let u = NodalField::from_fn_vector(&m, |p| [0.0, 0.1 * p[1]]);
        u.check_compatible(&m).unwrap();
        assert_eq!(u.vec_at(4), [0.0, 0.05]);
    }
}
