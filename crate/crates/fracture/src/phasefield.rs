//! The irreversible phase-field update: a unidirectional gradient flow of the
//! regularized total energy,
//! `alpha dz/dt = (eps div(G_c grad z) - (G_c/eps) z + sigma:e (1-z))_+`,
//! plus the Ambrosio–Tortorelli surface energy and its variational derivative.
//!
//! Discretization: P1 phase field, lumped mass, element-mean damage in the
//! elastic coupling (consistent with the stiffness degradation used by the
//! elasticity module, so the driving force is the exact derivative of the
//! discrete total energy). Each step is semi-implicit: all z-linear terms are
//! treated implicitly, irreversibility is enforced by the nodewise projection
//! `z_new = max(z_hat, z_old)`, and the range by clamping at 1.

use crate::field::NodalField;
use crate::material::{beta_star, MaterialParams, RateLaw};
use crate::mesh::{element_gradients, BoundaryTag, ElementGradients, TriMesh};
use crate::sparse::{solve_pcg, CsrMatrix};
use crate::{Error, Result};

const FIXED_POINT_TOL: f64 = 1e-8;
const FIXED_POINT_MAX_ITER: usize = 100;

#[derive(Clone, Copy, Debug, Default)]
pub struct StepReport {
    /// Rate-linearization iterations (1 for the linear law).
    pub iterations: usize,
    /// Set when `dt` exceeds the accuracy guideline `alpha eps / (2 max w)`.
    pub dt_warning: bool,
}

/// Reusable phase-field state for one mesh: scalar sparsity pattern, pure
/// Laplacian values, lumped masses, and the pinned-node set (`z = 0` on
/// loaded Neumann edges; everywhere else natural boundary conditions apply).
pub struct PhaseFieldSolver {
    geo: Vec<ElementGradients>,
    triangles: Vec<[usize; 3]>,
    masses: Vec<f64>,
    laplacian: CsrMatrix,
    system: CsrMatrix,
    pinned: Vec<bool>,
    rhs: Vec<f64>,
    z_hat: Vec<f64>,
}

impl PhaseFieldSolver {
    pub fn new(mesh: &TriMesh) -> PhaseFieldSolver {
        let n = mesh.node_count();
        let mut pairs = Vec::with_capacity(9 * mesh.triangles.len());
        for tri in &mesh.triangles {
            for &a in tri {
                for &b in tri {
                    pairs.push((a, b));
                }
            }
        }
        let mut laplacian = CsrMatrix::from_pairs(n, &mut pairs);
        let geo = element_gradients(mesh);
        for (tri, g) in mesh.triangles.iter().zip(&geo) {
            for a in 0..3 {
                for b in 0..3 {
                    laplacian.add(tri[a], tri[b], g.area * (g.bx[a] * g.bx[b] + g.by[a] * g.by[b]));
                }
            }
        }
        let mut pinned = vec![false; n];
        for i in mesh.tagged_nodes(BoundaryTag::NeumannLoaded) {
            pinned[i] = true;
        }
        PhaseFieldSolver {
            system: laplacian.clone(),
            laplacian,
            geo,
            triangles: mesh.triangles.clone(),
            masses: mesh.lumped_masses(),
            pinned,
            rhs: vec![0.0; n],
            z_hat: vec![0.0; n],
        }
    }

    /// `1/2 int G_c (eps |grad z|^2 + z^2/eps) dx`; gradient term exact for
    /// P1, mass term lumped.
    pub fn surface_energy(&self, z: &NodalField, mat: &MaterialParams) -> f64 {
        let kz = self.laplacian.matvec(&z.values);
        let grad_term: f64 = z.values.iter().zip(&kz).map(|(a, b)| a * b).sum();
        let mass_term: f64 =
            z.values.iter().zip(&self.masses).map(|(zi, mi)| mi * zi * zi).sum();
        0.5 * mat.g_c * (mat.epsilon * grad_term + mass_term / mat.epsilon)
    }

    /// Negative variational derivative of the discrete total energy per unit
    /// lumped mass. Zero at pinned nodes (their value is not evolved).
    pub fn driving_force(&self, z: &NodalField, w_elem: &[f64], mat: &MaterialParams) -> NodalField {
        let n = self.masses.len();
        let mut force = vec![0.0; n];
        // Elastic release: derivative of 1/2 sum_e ((1-z_bar)^2 + eta) A w.
        for (t, tri) in self.triangles.iter().enumerate() {
            let zbar = (z.values[tri[0]] + z.values[tri[1]] + z.values[tri[2]]) / 3.0;
            let c = (1.0 - zbar) * self.geo[t].area * w_elem[t] / 3.0;
            for &nd in tri {
                force[nd] += c;
            }
        }
        let kz = self.laplacian.matvec(&z.values);
        for i in 0..n {
            force[i] -= mat.g_c * mat.epsilon * kz[i] + mat.g_c / mat.epsilon * self.masses[i] * z.values[i];
            force[i] /= self.masses[i];
            if self.pinned[i] {
                force[i] = 0.0;
            }
        }
        NodalField { components: 1, values: force }
    }

    /// One semi-implicit step. For the linear rate law this is a single SPD
    /// solve; for nonlinear laws the nodewise secant coefficient
    /// `alpha*(v)/v` is frozen per sweep and updated until the iterate is
    /// stationary (tolerance 1e-8, cap 100 sweeps).
    pub fn step(
        &mut self,
        z_old: &NodalField,
        w_elem: &[f64],
        dt: f64,
        mat: &MaterialParams,
    ) -> Result<(NodalField, StepReport)> {
        assert!(dt > 0.0, "dt must be positive");
        let n = self.masses.len();
        let w_max = w_elem.iter().fold(0.0f64, |a, &b| a.max(b));
        let mut report = StepReport::default();

        // Accuracy guideline from the explicit part of the driving term.
        if let RateLaw::Linear { alpha } = mat.rate_law {
            report.dt_warning = w_max > 0.0 && dt > alpha * mat.epsilon / (2.0 * w_max);
        }

        // Nodewise viscosity for the first sweep: the linear law is exact;
        // nonlinear laws start from the rate beta*((driving at z_old)_+).
        let linear = matches!(mat.rate_law, RateLaw::Linear { .. });
        let mut v_est = vec![0.0; n];
        let mut gamma = vec![0.0; n];
        match &mat.rate_law {
            RateLaw::Linear { alpha } => gamma.iter_mut().for_each(|g| *g = *alpha),
            law => {
                let drive = self.driving_force(z_old, w_elem, mat);
                for i in 0..n {
                    v_est[i] = beta_star(law, drive.values[i].max(0.0))?;
                    gamma[i] = secant_coefficient(law, v_est[i])?;
                }
            }
        }

        let mut z_new = z_old.values.clone();
        let mut change = f64::INFINITY;
        for sweep in 1..=FIXED_POINT_MAX_ITER {
            report.iterations = sweep;
            self.solve_linearized(z_old, w_elem, dt, mat, &gamma)?;
            // Irreversibility and range.
            change = 0.0;
            for i in 0..n {
                let zi = if self.pinned[i] { 0.0 } else { self.z_hat[i].max(z_old.values[i]).min(1.0) };
                change = change.max((zi - z_new[i]).abs());
                z_new[i] = zi;
            }
            if linear || (sweep > 1 && change <= FIXED_POINT_TOL) {
                return Ok((NodalField { components: 1, values: z_new }, report));
            }
            // Damped rate update; plain substitution oscillates when alpha*
            // is steep relative to the driving slope.
            for i in 0..n {
                let v_raw = (z_new[i] - z_old.values[i]) / dt;
                v_est[i] = 0.5 * (v_est[i] + v_raw);
                gamma[i] = secant_coefficient(&mat.rate_law, v_est[i])?;
            }
        }
        Err(Error::FixedPointDivergence { iterations: FIXED_POINT_MAX_ITER, change })
    }

    /// Builds and solves `(Gamma M/dt + G_c eps K + (G_c/eps) M + W) z_hat =
    /// Gamma M z_old / dt + b_w`, where `W` and `b_w` come from the
    /// element-mean elastic coupling.
    fn solve_linearized(
        &mut self,
        z_old: &NodalField,
        w_elem: &[f64],
        dt: f64,
        mat: &MaterialParams,
        gamma: &[f64],
    ) -> Result<()> {
        let n = self.masses.len();
        let ge = mat.g_c * mat.epsilon;
        for k in 0..self.system.values.len() {
            self.system.values[k] = ge * self.laplacian.values[k];
        }
        self.rhs.iter_mut().for_each(|v| *v = 0.0);
        for (t, tri) in self.triangles.iter().enumerate() {
            let aw = self.geo[t].area * w_elem[t];
            for &nd in tri {
                self.rhs[nd] += aw / 3.0;
            }
            let c = aw / 9.0;
            for &a in tri {
                for &b in tri {
                    self.system.add(a, b, c);
                }
            }
        }
        for i in 0..n {
            let diag = gamma[i] / dt * self.masses[i] + mat.g_c / mat.epsilon * self.masses[i];
            self.system.add(i, i, diag);
            self.rhs[i] += gamma[i] / dt * self.masses[i] * z_old.values[i];
        }
        // Pin z = 0 on loaded Neumann nodes.
        if self.pinned.iter().any(|&p| p) {
            let prescribed: Vec<Option<f64>> =
                self.pinned.iter().map(|&p| if p { Some(0.0) } else { None }).collect();
            self.system.eliminate_dirichlet(&mut self.rhs, &prescribed);
        }
        self.z_hat.copy_from_slice(&z_old.values);
        solve_pcg(&self.system, &self.rhs, &mut self.z_hat, 1e-12, 50_000)?;
        Ok(())
    }
}

/// `alpha*(v) / v` with `v` floored away from zero; for the power law this is
/// `k v^(p-1)`, exactly `k` when `p = 1` so the nonlinear path reproduces the
/// linear update bit for bit.
fn secant_coefficient(law: &RateLaw, v: f64) -> Result<f64> {
    let v = v.max(1e-10);
    match law {
        RateLaw::Linear { alpha } => Ok(*alpha),
        RateLaw::Power { k, p } => Ok(k * v.powf(p - 1.0)),
        law => Ok(crate::material::alpha_star(law, v)? / v),
    }
}

/// One-shot wrappers over [`PhaseFieldSolver`].
pub fn surface_energy(mesh: &TriMesh, z: &NodalField, mat: &MaterialParams) -> f64 {
    PhaseFieldSolver::new(mesh).surface_energy(z, mat)
}

pub fn driving_force(mesh: &TriMesh, z: &NodalField, w_elem: &[f64], mat: &MaterialParams) -> NodalField {
    PhaseFieldSolver::new(mesh).driving_force(z, w_elem, mat)
}

pub fn step_phase_field(
    z_old: &NodalField,
    w_elem: &[f64],
    dt: f64,
    mesh: &TriMesh,
    mat: &MaterialParams,
) -> Result<(NodalField, StepReport)> {
    PhaseFieldSolver::new(mesh).step(z_old, w_elem, dt, mat)
}
