//! Damaged linear elasticity on P1 triangles: assembly of
//! `-div((1-z)^2 sigma[u]) = f`, the equilibrium solve, elastic energy and
//! power input, and the friction-relaxed (parabolic) displacement update.

use crate::field::NodalField;
use crate::loads::LoadState;
use crate::material::MaterialParams;
use crate::mesh::{element_gradients, BoundaryTag, ElementGradients, TriMesh};
use crate::sparse::{solve_pcg, CsrMatrix, SolveReport};
use crate::Result;

/// Relative residual contract of the displacement solve.
pub const SOLVE_REL_TOL: f64 = 1e-12;
const SOLVE_MAX_ITER: usize = 50_000;

/// Plane elasticity coefficients (engineering-strain convention).
#[inline]
fn d_coeffs(mat: &MaterialParams) -> (f64, f64, f64) {
    let lam = mat.lambda_2d();
    let mu = mat.lame_mu;
    (lam + 2.0 * mu, lam, mu)
}

/// Element stiffness degradation `(1 - z_bar)^2 + eta` from the element-mean
/// damage.
#[inline]
fn element_scale(z: &NodalField, tri: &[usize; 3], eta: f64) -> f64 {
    let zbar = (z.values[tri[0]] + z.values[tri[1]] + z.values[tri[2]]) / 3.0;
    (1.0 - zbar) * (1.0 - zbar) + eta
}

/// Reusable assembly + solve state for one mesh. The sparsity pattern and the
/// element geometry are built once; values are rewritten per call.
pub struct ElasticSolver {
    n_dofs: usize,
    geo: Vec<ElementGradients>,
    triangles: Vec<[usize; 3]>,
    masses: Vec<f64>,
    /// Loaded Neumann edges with their lengths.
    loaded_edges: Vec<(usize, usize, f64)>,
    k_full: CsrMatrix,
    k_con: CsrMatrix,
    rhs_full: Vec<f64>,
    rhs_con: Vec<f64>,
    prescribed: Vec<Option<f64>>,
    u: Vec<f64>,
}

impl ElasticSolver {
    pub fn new(mesh: &TriMesh) -> ElasticSolver {
        let n_dofs = 2 * mesh.node_count();
        let mut pairs = Vec::with_capacity(36 * mesh.triangles.len());
        for tri in &mesh.triangles {
            for &a in tri {
                for &b in tri {
                    pairs.push((2 * a, 2 * b));
                    pairs.push((2 * a, 2 * b + 1));
                    pairs.push((2 * a + 1, 2 * b));
                    pairs.push((2 * a + 1, 2 * b + 1));
                }
            }
        }
        let k_full = CsrMatrix::from_pairs(n_dofs, &mut pairs);
        let loaded_edges = mesh
            .boundary_edges
            .iter()
            .filter(|e| e.tag == BoundaryTag::NeumannLoaded)
            .map(|e| {
                let [a, b] = e.nodes;
                let (pa, pb) = (mesh.nodes[a], mesh.nodes[b]);
                (a, b, ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt())
            })
            .collect();
        ElasticSolver {
            n_dofs,
            geo: element_gradients(mesh),
            triangles: mesh.triangles.clone(),
            masses: mesh.lumped_masses(),
            loaded_edges,
            k_con: k_full.clone(),
            k_full,
            rhs_full: vec![0.0; n_dofs],
            rhs_con: vec![0.0; n_dofs],
            prescribed: vec![None; n_dofs],
            u: vec![0.0; n_dofs],
        }
    }

    /// Undamaged energy density of the current solution, per element.
    pub fn energy_density(&self, mat: &MaterialParams) -> Vec<f64> {
        let u = NodalField { components: 2, values: self.u.clone() };
        energy_density_elements(&self.geo, &self.triangles, &u, mat)
    }

    /// `(strain, elastic)` energies of the current solution: the stiffness
    /// quadratic form `1/2 u^T K u`, and the same minus the load work
    /// `b^T u`. Valid right after [`ElasticSolver::assemble`].
    pub fn energies(&self) -> (f64, f64) {
        let ku = self.k_full.matvec(&self.u);
        let strain = 0.5 * crate::sparse::dot(&self.u, &ku);
        let work = crate::sparse::dot(&self.rhs_full, &self.u);
        (strain, strain - work)
    }

    /// Rebuilds the damaged stiffness and load vector, then the symmetrically
    /// eliminated system for the current Dirichlet data.
    pub fn assemble(&mut self, mesh: &TriMesh, z: &NodalField, mat: &MaterialParams, loads: &LoadState) {
        self.assemble_full(mesh, z, mat, loads);
        self.constrain(loads);
    }

    fn assemble_full(&mut self, mesh: &TriMesh, z: &NodalField, mat: &MaterialParams, loads: &LoadState) {
        let (d11, d12, d33) = d_coeffs(mat);
        self.k_full.zero_values();
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let g = &self.geo[t];
            let s = element_scale(z, tri, mat.residual_stiffness) * g.area;
            for a in 0..3 {
                for b in 0..3 {
                    let (bxa, bya, bxb, byb) = (g.bx[a], g.by[a], g.bx[b], g.by[b]);
                    let kxx = s * (d11 * bxa * bxb + d33 * bya * byb);
                    let kxy = s * (d12 * bxa * byb + d33 * bya * bxb);
                    let kyx = s * (d12 * bya * bxb + d33 * bxa * byb);
                    let kyy = s * (d11 * bya * byb + d33 * bxa * bxb);
                    let (ia, ja) = (2 * tri[a], 2 * tri[b]);
                    self.k_full.add(ia, ja, kxx);
                    self.k_full.add(ia, ja + 1, kxy);
                    self.k_full.add(ia + 1, ja, kyx);
                    self.k_full.add(ia + 1, ja + 1, kyy);
                }
            }
        }

        self.rhs_full.iter_mut().for_each(|v| *v = 0.0);
        if loads.body != [0.0, 0.0] {
            for (i, &m) in self.masses.iter().enumerate() {
                self.rhs_full[2 * i] += m * loads.body[0];
                self.rhs_full[2 * i + 1] += m * loads.body[1];
            }
        }
        if loads.traction != [0.0, 0.0] {
            for &(a, b, len) in &self.loaded_edges {
                for n in [a, b] {
                    self.rhs_full[2 * n] += 0.5 * len * loads.traction[0];
                    self.rhs_full[2 * n + 1] += 0.5 * len * loads.traction[1];
                }
            }
        }
    }

    fn constrain(&mut self, loads: &LoadState) {
        for (i, g) in loads.g.iter().enumerate() {
            match g {
                Some([gx, gy]) => {
                    self.prescribed[2 * i] = Some(*gx);
                    self.prescribed[2 * i + 1] = Some(*gy);
                }
                None => {
                    self.prescribed[2 * i] = None;
                    self.prescribed[2 * i + 1] = None;
                }
            }
        }
        self.k_con.values.copy_from_slice(&self.k_full.values);
        self.rhs_con.copy_from_slice(&self.rhs_full);
        self.k_con.eliminate_dirichlet(&mut self.rhs_con, &self.prescribed);
    }

    /// Solves the constrained system, warm-starting from the previous
    /// solution kept in this solver.
    pub fn solve(&mut self) -> Result<SolveReport> {
        // Seed prescribed dofs exactly; CG keeps them (unit rows).
        for (i, p) in self.prescribed.iter().enumerate() {
            if let Some(g) = p {
                self.u[i] = *g;
            }
        }
        solve_pcg(&self.k_con, &self.rhs_con, &mut self.u, SOLVE_REL_TOL, SOLVE_MAX_ITER)
    }

    pub fn displacement(&self) -> NodalField {
        NodalField { components: 2, values: self.u.clone() }
    }

    pub fn set_displacement(&mut self, u: &NodalField) {
        self.u.copy_from_slice(&u.values);
    }

    /// Residual of the unconstrained system at the current solution; on
    /// Dirichlet dofs this is the discrete reaction force (the damaged
    /// traction `(1-z)^2 sigma[u] nu` paired with the boundary basis).
    pub fn reactions(&self) -> Vec<f64> {
        let mut r = self.k_full.matvec(&self.u);
        for i in 0..self.n_dofs {
            r[i] -= self.rhs_full[i];
        }
        r
    }

    /// Power injected through the boundary displacement, body force, and
    /// traction rates, evaluated with explicit reactions and load rates.
    pub fn power_from_reactions(&self, reactions: &[f64], loads: &LoadState, u: &NodalField) -> f64 {
        power_terms(reactions, &self.masses, &self.loaded_edges, loads, u)
    }

    /// Backward-Euler step of `alpha_u du/dt - div((1-z)^2 sigma[u]) = f`.
    /// Requires `assemble` to have been called for the target time already.
    pub fn relaxed_step(&mut self, u_prev: &NodalField, dt: f64, mat: &MaterialParams, loads: &LoadState) -> Result<SolveReport> {
        let au = mat.friction_alpha_u / dt;
        // Add the lumped mass to the full system, then re-constrain.
        for (i, &m) in self.masses.iter().enumerate() {
            self.k_full.add(2 * i, 2 * i, au * m);
            self.k_full.add(2 * i + 1, 2 * i + 1, au * m);
            self.rhs_full[2 * i] += au * m * u_prev.values[2 * i];
            self.rhs_full[2 * i + 1] += au * m * u_prev.values[2 * i + 1];
        }
        self.constrain(loads);
        self.u.copy_from_slice(&u_prev.values);
        self.solve()
    }
}

fn power_terms(
    reactions: &[f64],
    masses: &[f64],
    loaded_edges: &[(usize, usize, f64)],
    loads: &LoadState,
    u: &NodalField,
) -> f64 {
    let mut p = 0.0;
    for (i, gd) in loads.g_dot.iter().enumerate() {
        if let Some([gx, gy]) = gd {
            p += reactions[2 * i] * gx + reactions[2 * i + 1] * gy;
        }
    }
    if loads.body_dot != [0.0, 0.0] {
        for (i, &m) in masses.iter().enumerate() {
            p -= m * (loads.body_dot[0] * u.values[2 * i] + loads.body_dot[1] * u.values[2 * i + 1]);
        }
    }
    if loads.traction_dot != [0.0, 0.0] {
        for &(a, b, len) in loaded_edges {
            for n in [a, b] {
                p -= 0.5
                    * len
                    * (loads.traction_dot[0] * u.values[2 * n]
                        + loads.traction_dot[1] * u.values[2 * n + 1]);
            }
        }
    }
    p
}

/// Assembles the damaged stiffness and load vector with Dirichlet rows
/// eliminated symmetrically.
pub fn assemble_damaged_system(
    mesh: &TriMesh,
    z: &NodalField,
    mat: &MaterialParams,
    loads: &LoadState,
) -> (CsrMatrix, Vec<f64>) {
    let mut s = ElasticSolver::new(mesh);
    s.assemble(mesh, z, mat, loads);
    (s.k_con, s.rhs_con)
}

/// Minimizer of the damaged elastic energy over displacements matching the
/// Dirichlet data.
pub fn solve_displacement(
    mesh: &TriMesh,
    z: &NodalField,
    mat: &MaterialParams,
    loads: &LoadState,
) -> Result<NodalField> {
    let mut s = ElasticSolver::new(mesh);
    s.assemble(mesh, z, mat, loads);
    s.solve()?;
    Ok(s.displacement())
}

/// Undamaged elastic energy density `w = sigma[u] : e[u]`, constant per
/// element for P1 displacements.
pub fn energy_density(mesh: &TriMesh, u: &NodalField, mat: &MaterialParams) -> Vec<f64> {
    let geo = element_gradients(mesh);
    energy_density_elements(&geo, &mesh.triangles, u, mat)
}

fn energy_density_elements(
    geo: &[ElementGradients],
    triangles: &[[usize; 3]],
    u: &NodalField,
    mat: &MaterialParams,
) -> Vec<f64> {
    let (d11, d12, d33) = d_coeffs(mat);
    triangles
        .iter()
        .zip(geo)
        .map(|(tri, g)| {
            let (mut e11, mut e22, mut gam) = (0.0, 0.0, 0.0);
            for a in 0..3 {
                let [ux, uy] = u.vec_at(tri[a]);
                e11 += g.bx[a] * ux;
                e22 += g.by[a] * uy;
                gam += g.by[a] * ux + g.bx[a] * uy;
            }
            let s11 = d11 * e11 + d12 * e22;
            let s22 = d12 * e11 + d11 * e22;
            (s11 * e11 + s22 * e22 + d33 * gam * gam).max(0.0)
        })
        .collect()
}

/// Damaged strain energy `1/2 sum_e ((1-z_bar)^2 + eta) area_e w_e`.
pub fn strain_energy(mesh: &TriMesh, u: &NodalField, z: &NodalField, mat: &MaterialParams) -> f64 {
    let geo = element_gradients(mesh);
    let w = energy_density_elements(&geo, &mesh.triangles, u, mat);
    mesh.triangles
        .iter()
        .enumerate()
        .map(|(t, tri)| 0.5 * element_scale(z, tri, mat.residual_stiffness) * geo[t].area * w[t])
        .sum()
}

/// Full elastic energy including the work of body force and traction:
/// `1/2 int (1-z)^2 sigma:e dx - int f.u dx - int q.u ds`.
pub fn elastic_energy(
    mesh: &TriMesh,
    u: &NodalField,
    z: &NodalField,
    mat: &MaterialParams,
    loads: &LoadState,
) -> f64 {
    let mut e = strain_energy(mesh, u, z, mat);
    if loads.body != [0.0, 0.0] {
        for (i, &m) in mesh.lumped_masses().iter().enumerate() {
            e -= m * (loads.body[0] * u.values[2 * i] + loads.body[1] * u.values[2 * i + 1]);
        }
    }
    if loads.traction != [0.0, 0.0] {
        for edge in mesh.boundary_edges.iter().filter(|e| e.tag == BoundaryTag::NeumannLoaded) {
            let [a, b] = edge.nodes;
            let (pa, pb) = (mesh.nodes[a], mesh.nodes[b]);
            let len = ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt();
            for n in [a, b] {
                e -= 0.5
                    * len
                    * (loads.traction[0] * u.values[2 * n] + loads.traction[1] * u.values[2 * n + 1]);
            }
        }
    }
    e
}

/// Rate of energy injection for the displacement `u` at the loads' time: the
/// Dirichlet reaction power minus the body/traction rate terms.
pub fn power_input(
    mesh: &TriMesh,
    u: &NodalField,
    z: &NodalField,
    mat: &MaterialParams,
    loads: &LoadState,
) -> f64 {
    let mut s = ElasticSolver::new(mesh);
    s.assemble(mesh, z, mat, loads);
    s.set_displacement(u);
    let r = s.reactions();
    s.power_from_reactions(&r, loads, u)
}

/// One backward-Euler step of the friction-relaxed displacement equation.
pub fn relaxed_displacement_step(
    u_prev: &NodalField,
    dt: f64,
    mesh: &TriMesh,
    z: &NodalField,
    mat: &MaterialParams,
    loads: &LoadState,
) -> Result<NodalField> {
    let mut s = ElasticSolver::new(mesh);
    s.assemble_full(mesh, z, mat, loads);
    s.relaxed_step(u_prev, dt, mat, loads)?;
    Ok(s.displacement())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loads::{BoundaryProgram, LoadProgram, TimeProfile, UniformLoad};
    use crate::material::{PlaneMode, RateLaw};
    use crate::mesh::{build_rect_mesh, build_strip_mesh, BoundaryTag, TagRule};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat() -> MaterialParams {
        MaterialParams {
            lame_lambda: 1.0,
            lame_mu: 1.0,
            plane_mode: PlaneMode::PlaneStrain,
            g_c: 1.0,
            epsilon: 0.1,
            rate_law: RateLaw::Linear { alpha: 0.1 },
            friction_alpha_u: 0.0,
            residual_stiffness: 1e-6,
        }
    }

    /// Independent patch oracle: energy from an affine fit of the nodal data
    /// per triangle (3x3 solve, no B-matrix), differentiated twice by central
    /// differences. Exact for the quadratic energy up to roundoff.
    fn patch_energy(mesh: &TriMesh, mat: &MaterialParams, u: &[f64]) -> f64 {
        let (d11, d12, d33) = d_coeffs(mat);
        let mut total = 0.0;
        for tri in &mesh.triangles {
            let p: Vec<[f64; 2]> = tri.iter().map(|&n| mesh.nodes[n]).collect();
            // Fit ux = a0 + a1 x + a2 y and uy likewise through the 3 vertices
            // by Cramer's rule.
            let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
                - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
            let grad = |vals: [f64; 3]| {
                let gx = ((vals[1] - vals[0]) * (p[2][1] - p[0][1])
                    - (vals[2] - vals[0]) * (p[1][1] - p[0][1]))
                    / det;
                let gy = ((vals[2] - vals[0]) * (p[1][0] - p[0][0])
                    - (vals[1] - vals[0]) * (p[2][0] - p[0][0]))
                    / det;
                (gx, gy)
            };
            let ux = [u[2 * tri[0]], u[2 * tri[1]], u[2 * tri[2]]];
            let uy = [u[2 * tri[0] + 1], u[2 * tri[1] + 1], u[2 * tri[2] + 1]];
            let (e11, exy) = grad(ux);
            let (eyx, e22) = grad(uy);
            let gam = exy + eyx;
            let area = det.abs() / 2.0;
            let w = d11 * (e11 * e11 + e22 * e22) + 2.0 * d12 * e11 * e22 + d33 * gam * gam;
            total += 0.5 * area * w;
        }
        total
    }

    #[test]
    fn assembled_matrix_matches_patch_oracle() {
        let mesh = build_rect_mesh([0.0, 0.0], 1.0, 1.0, 1.0, TagRule::all(BoundaryTag::NeumannFree))
            .unwrap();
        let z = NodalField::scalar(&mesh, 0.0);
        let m = mat();
        let loads = LoadState::free(&mesh, 0.0);
        let (k, rhs) = assemble_damaged_system(&mesh, &z, &m, &loads);
        assert!(rhs.iter().all(|&v| v == 0.0));

        // Hessian of the independent energy via central differences; the
        // energy is quadratic, so any step is exact up to roundoff.
        let n = 2 * mesh.node_count();
        let delta = 0.5;
        for i in 0..n {
            for j in 0..n {
                let mut up = vec![0.0; n];
                let mut ij = 0.0;
                for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    up.iter_mut().for_each(|v| *v = 0.0);
                    up[i] += si * delta;
                    up[j] += sj * delta;
                    ij += si * sj * patch_energy(&mesh, &m, &up);
                }
                let h = ij / (4.0 * delta * delta);
                // Undamaged scale is 1 + eta.
                let expect = h * (1.0 + m.residual_stiffness);
                assert!(
                    (k.get(i, j) - expect).abs() <= 1e-9 * (1.0 + expect.abs()),
                    "K[{i}][{j}] = {}, oracle {expect}",
                    k.get(i, j)
                );
            }
        }
    }

    #[test]
    fn fully_damaged_matrix_is_eta_scaled() {
        let mesh = build_rect_mesh([0.0, 0.0], 1.0, 1.0, 0.5, TagRule::all(BoundaryTag::NeumannFree))
            .unwrap();
        let m = mat();
        let loads = LoadState::free(&mesh, 0.0);
        let z0 = NodalField::scalar(&mesh, 0.0);
        let z1 = NodalField::scalar(&mesh, 1.0);
        let (k0, _) = assemble_damaged_system(&mesh, &z0, &m, &loads);
        let (k1, _) = assemble_damaged_system(&mesh, &z1, &m, &loads);
        let eta = m.residual_stiffness;
        for (a, b) in k0.values.iter().zip(&k1.values) {
            // k0 carries (1 + eta), k1 carries eta alone.
            assert!((b - eta * a / (1.0 + eta)).abs() <= 1e-12 * a.abs().max(1e-12));
        }
    }

    #[test]
    fn affine_dirichlet_is_exact() {
        let mesh = build_rect_mesh([0.0, 0.0], 1.0, 1.0, 0.25, TagRule::all(BoundaryTag::Dirichlet))
            .unwrap();
        let m = mat();
        let z = NodalField::scalar(&mesh, 0.0);
        let prog = LoadProgram {
            dirichlet: BoundaryProgram::StretchY {
                amplitude: TimeProfile::Constant { value: 0.1 },
                height_ref: 1.0,
            },
            body: None,
            traction: None,
        };
        let loads = prog.state_at(&mesh, 0.0);
        let u = solve_displacement(&mesh, &z, &m, &loads).unwrap();
        for (i, p) in mesh.nodes.iter().enumerate() {
            assert!((u.values[2 * i]).abs() < 1e-10);
            assert!((u.values[2 * i + 1] - 0.1 * p[1]).abs() < 1e-10);
        }
        // Uniform uniaxial strain: w = (lambda + 2 mu) * 0.01, everywhere.
        let w = energy_density(&mesh, &u, &m);
        let expect = (m.lambda_2d() + 2.0 * m.lame_mu) * 0.01;
        for v in &w {
            assert!((v - expect).abs() <= 1e-10 * expect);
        }
        // The eta floor scales the stored energy.
        let e = elastic_energy(&mesh, &u, &z, &m, &loads);
        let expect_e = 0.5 * expect * (1.0 + m.residual_stiffness);
        assert!((e - expect_e).abs() <= 1e-10 * expect_e);
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let mesh = build_strip_mesh(2.0, 0.5, 0.25).unwrap();
        let m = mat();
        let z = NodalField::scalar(&mesh, 0.0);
        let prog = LoadProgram { dirichlet: BoundaryProgram::Zero, body: None, traction: None };
        let loads = prog.state_at(&mesh, 0.0);
        let u = solve_displacement(&mesh, &z, &m, &loads).unwrap();
        assert!(u.values.iter().all(|&v| v == 0.0));
        assert_eq!(elastic_energy(&mesh, &u, &z, &m, &loads), 0.0);
    }

    #[test]
    fn rigid_translation_invariance() {
        let mesh = build_rect_mesh([0.0, 0.0], 1.0, 1.0, 0.25, TagRule::all(BoundaryTag::Dirichlet))
            .unwrap();
        let m = mat();
        let z = NodalField::scalar(&mesh, 0.0);
        let prog = LoadProgram {
            dirichlet: BoundaryProgram::Translate {
                amplitude: TimeProfile::Constant { value: 1.0 },
                direction: [0.3, -0.7],
            },
            body: None,
            traction: None,
        };
        let loads = prog.state_at(&mesh, 0.0);
        let u = solve_displacement(&mesh, &z, &m, &loads).unwrap();
        for i in 0..mesh.node_count() {
            assert!((u.values[2 * i] - 0.3).abs() < 1e-10);
            assert!((u.values[2 * i + 1] + 0.7).abs() < 1e-10);
        }
        let w = energy_density(&mesh, &u, &m);
        assert!(w.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn shear_strip_density_oracle() {
        // u = (0, a y / H) plugged into sigma:e gives (lambda_2d + 2 mu)(a/H)^2.
        let half_h = 0.5;
        let mesh = build_rect_mesh(
            [0.0, -half_h],
            2.0,
            2.0 * half_h,
            0.25,
            TagRule::all(BoundaryTag::Dirichlet),
        )
        .unwrap();
        let mut m = mat();
        m.plane_mode = PlaneMode::PlaneStress;
        let z = NodalField::scalar(&mesh, 0.0);
        let a = 0.2;
        let prog = LoadProgram {
            dirichlet: BoundaryProgram::StretchY {
                amplitude: TimeProfile::Constant { value: a },
                height_ref: half_h,
            },
            body: None,
            traction: None,
        };
        let loads = prog.state_at(&mesh, 0.0);
        let u = solve_displacement(&mesh, &z, &m, &loads).unwrap();
        let w = energy_density(&mesh, &u, &m);
        let expect = (m.lambda_2d() + 2.0 * m.lame_mu) * (a / half_h).powi(2);
        for v in &w {
            assert!((v - expect).abs() <= 1e-10 * expect);
        }
    }

    #[test]
    fn power_input_examples() {
        let half_h = 0.5;
        let mesh = build_rect_mesh(
            [0.0, -half_h],
            2.0,
            2.0 * half_h,
            0.25,
            TagRule::all(BoundaryTag::Dirichlet),
        )
        .unwrap();
        let m = mat();
        let z = NodalField::scalar(&mesh, 0.0);

        // Constant loads: every rate term vanishes.
        let hold = LoadProgram {
            dirichlet: BoundaryProgram::StretchY {
                amplitude: TimeProfile::Constant { value: 0.3 },
                height_ref: half_h,
            },
            body: None,
            traction: None,
        };
        let loads = hold.state_at(&mesh, 1.0);
        let u = solve_displacement(&mesh, &z, &m, &loads).unwrap();
        assert_eq!(power_input(&mesh, &u, &z, &m, &loads), 0.0);

        // Linear ramp g = (0, a t y / H): F-dot = (lambda+2mu)(a^2 t/H^2) Area,
        // scaled by the eta floor the discrete operator carries.
        let a = 0.2;
        let ramp = LoadProgram {
            dirichlet: BoundaryProgram::StretchY {
                amplitude: TimeProfile::Linear { rate: a },
                height_ref: half_h,
            },
            body: None,
            traction: None,
        };
        let t = 1.5;
        let loads = ramp.state_at(&mesh, t);
        let u = solve_displacement(&mesh, &z, &m, &loads).unwrap();
        let p = power_input(&mesh, &u, &z, &m, &loads);
        let area = 2.0 * 2.0 * half_h;
        let expect =
            (m.lambda_2d() + 2.0 * m.lame_mu) * (a * a * t / (half_h * half_h)) * area
                * (1.0 + m.residual_stiffness);
        assert!((p - expect).abs() <= 1e-10 * expect, "p = {p}, expect {expect}");

        // Body-force rate paired with u = 0 contributes nothing.
        let mut loads = LoadState::free(&mesh, 0.0);
        loads.body_dot = [0.0, -1.0];
        let u0 = NodalField::vector(&mesh, [0.0, 0.0]);
        assert_eq!(power_input(&mesh, &u0, &z, &m, &loads), 0.0);
    }

    #[test]
    fn solve_meets_residual_contract() {
        let mesh = build_strip_mesh(4.0, 1.0, 0.25).unwrap();
        let m = mat();
        // A damage blob in the middle.
        let z = NodalField::from_fn_scalar(&mesh, |p| {
            (-((p[0] - 2.0).powi(2) + p[1].powi(2)) / 0.1).exp().min(0.95)
        });
        let prog = LoadProgram {
            dirichlet: BoundaryProgram::StretchY {
                amplitude: TimeProfile::Constant { value: 0.3 },
                height_ref: 1.0,
            },
            body: Some(UniformLoad {
                vector: [0.0, -0.1],
                amplitude: TimeProfile::Constant { value: 1.0 },
            }),
            traction: None,
        };
        let loads = prog.state_at(&mesh, 0.0);
        let mut s = ElasticSolver::new(&mesh);
        s.assemble(&mesh, &z, &m, &loads);
        s.solve().unwrap();
        let r = {
            let mut r = s.k_con.matvec(&s.u);
            for i in 0..r.len() {
                r[i] -= s.rhs_con[i];
            }
            r
        };
        let rn = crate::sparse::norm(&r);
        let bn = crate::sparse::norm(&s.rhs_con);
        assert!(rn <= 1e-10 * bn, "relative residual {}", rn / bn);
    }

    #[test]
    fn minimizer_property_random_perturbations() {
        let mesh = build_strip_mesh(2.0, 0.5, 0.25).unwrap();
        let m = mat();
        let z = NodalField::from_fn_scalar(&mesh, |p| {
            (-((p[0] - 1.0).powi(2) + p[1].powi(2)) / 0.05).exp().min(0.9)
        });
        let prog = LoadProgram {
            dirichlet: BoundaryProgram::StretchY {
                amplitude: TimeProfile::Constant { value: 0.2 },
                height_ref: 0.5,
            },
            body: None,
            traction: None,
        };
        let loads = prog.state_at(&mesh, 0.0);
        let u = solve_displacement(&mesh, &z, &m, &loads).unwrap();
        let e0 = elastic_energy(&mesh, &u, &z, &m, &loads);
        let dirichlet: Vec<bool> = loads.g.iter().map(|g| g.is_some()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let mut up = u.clone();
            for i in 0..mesh.node_count() {
                if !dirichlet[i] {
                    up.values[2 * i] += 1e-3 * rng.gen_range(-1.0..1.0);
                    up.values[2 * i + 1] += 1e-3 * rng.gen_range(-1.0..1.0);
                }
            }
            let e = elastic_energy(&mesh, &up, &z, &m, &loads);
            assert!(e >= e0 - 1e-10, "perturbed energy {e} below minimum {e0}");
        }
    }

    #[test]
    fn energy_monotone_in_damage() {
        let mesh = build_rect_mesh([0.0, 0.0], 1.0, 1.0, 0.125, TagRule::all(BoundaryTag::Dirichlet))
            .unwrap();
        let m = mat();
        let prog = LoadProgram {
            dirichlet: BoundaryProgram::StretchY {
                amplitude: TimeProfile::Constant { value: 0.2 },
                height_ref: 1.0,
            },
            body: None,
            traction: None,
        };
        let loads = prog.state_at(&mesh, 0.0);
        let z = NodalField::from_fn_scalar(&mesh, |p| {
            0.8 * (-((p[0] - 0.5).powi(2) + (p[1] - 0.5).powi(2)) / 0.02).exp()
        });
        let mut z_more = z.clone();
        for v in z_more.values.iter_mut() {
            *v = (*v + 0.1).min(1.0);
        }
        let e1 = {
            let u = solve_displacement(&mesh, &z, &m, &loads).unwrap();
            elastic_energy(&mesh, &u, &z, &m, &loads)
        };
        let e2 = {
            let u = solve_displacement(&mesh, &z_more, &m, &loads).unwrap();
            elastic_energy(&mesh, &u, &z_more, &m, &loads)
        };
        assert!(e1 >= e2 - 1e-10, "e(z) = {e1} < e(z_more) = {e2}");
    }

    #[test]
    fn fixed_z_energy_rate_matches_power() {
        // Quadratic ramp (so the check is not trivially exact): the forward
        // difference of E*(t) converges to F-dot at first order.
        let mesh = build_strip_mesh(1.0, 0.5, 0.25).unwrap();
        let m = mat();
        let z = NodalField::from_fn_scalar(&mesh, |p| {
            0.7 * (-(p[0] - 0.5).powi(2) / 0.05 - p[1].powi(2) / 0.05).exp()
        });
        let prog = LoadProgram {
            dirichlet: BoundaryProgram::StretchY {
                amplitude: TimeProfile::Quadratic { coeff: 0.2 },
                height_ref: 0.5,
            },
            body: None,
            traction: None,
        };
        let t = 1.0;
        let energy_at = |tt: f64| {
            let loads = prog.state_at(&mesh, tt);
            let u = solve_displacement(&mesh, &z, &m, &loads).unwrap();
            elastic_energy(&mesh, &u, &z, &m, &loads)
        };
        let loads = prog.state_at(&mesh, t);
        let u = solve_displacement(&mesh, &z, &m, &loads).unwrap();
        let fdot = power_input(&mesh, &u, &z, &m, &loads);
        let mut errs = Vec::new();
        for dt in [1e-2, 5e-3] {
            let fd = (energy_at(t + dt) - energy_at(t)) / dt;
            errs.push((fd - fdot).abs() / fdot.abs());
        }
        assert!(errs[0] < 0.05, "coarse error {}", errs[0]);
        assert!(errs[1] < 0.6 * errs[0], "no first-order decay: {errs:?}");
    }

    #[test]
    fn relaxed_step_limits() {
        let mesh = build_strip_mesh(1.0, 0.5, 0.25).unwrap();
        let mut m = mat();
        m.friction_alpha_u = 2.0;
        let z = NodalField::scalar(&mesh, 0.0);
        let prog = LoadProgram {
            dirichlet: BoundaryProgram::StretchY {
                amplitude: TimeProfile::Constant { value: 0.2 },
                height_ref: 0.5,
            },
            body: None,
            traction: None,
        };
        let loads = prog.state_at(&mesh, 0.0);
        let u_static = solve_displacement(&mesh, &z, &m, &loads).unwrap();

        // Huge dt: mass term negligible, recovers the static solve.
        let u0 = NodalField::vector(&mesh, [0.0, 0.0]);
        let u = relaxed_displacement_step(&u0, 1e9, &mesh, &z, &m, &loads).unwrap();
        let scale = u_static.values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        for (a, b) in u.values.iter().zip(&u_static.values) {
            assert!((a - b).abs() <= 1e-6 * scale);
        }

        // Zero loads, zero previous state: stays zero.
        let free = LoadProgram::none().state_at(&mesh, 0.0);
        let u = relaxed_displacement_step(&u0, 0.1, &mesh, &z, &m, &free).unwrap();
        assert!(u.values.iter().all(|&v| v == 0.0));

        // Fixed point under constant loads equals the static solution.
        let mut u_prev = u0;
        for _ in 0..10_000 {
            let u_next = relaxed_displacement_step(&u_prev, 0.5, &mesh, &z, &m, &loads).unwrap();
            let diff = u_next
                .values
                .iter()
                .zip(&u_prev.values)
                .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
            u_prev = u_next;
            if diff < 1e-12 {
                break;
            }
        }
        for (a, b) in u_prev.values.iter().zip(&u_static.values) {
            assert!((a - b).abs() <= 1e-8 * scale.max(1.0));
        }
    }
}
