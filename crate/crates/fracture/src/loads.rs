//! Time-dependent load descriptors and their per-step evaluation.
//!
//! Scenario configs name loads symbolically (a time profile plus a spatial
//! pattern); [`LoadProgram::state_at`] turns them into the per-node values and
//! analytic time derivatives that the elasticity module consumes.

use crate::field::NodalField;
use crate::mesh::{BoundaryTag, TriMesh};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Scalar amplitude as a function of time.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeProfile {
    Constant { value: f64 },
    /// `value = rate * t`.
    Linear { rate: f64 },
    /// `value = coeff * t^2`.
    Quadratic { coeff: f64 },
    /// Linear ramp to `target` over `t_ramp`, then hold. The rate at the kink
    /// is taken right-continuous (hold side).
    RampHold { target: f64, t_ramp: f64 },
}

impl TimeProfile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant { value } => value,
            TimeProfile::Linear { rate } => rate * t,
            TimeProfile::Quadratic { coeff } => coeff * t * t,
            TimeProfile::RampHold { target, t_ramp } => {
                if t < t_ramp {
                    target * t / t_ramp
                } else {
                    target
                }
            }
        }
    }

    pub fn rate(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant { .. } => 0.0,
            TimeProfile::Linear { rate } => rate,
            TimeProfile::Quadratic { coeff } => 2.0 * coeff * t,
            TimeProfile::RampHold { target, t_ramp } => {
                if t < t_ramp {
                    target / t_ramp
                } else {
                    0.0
                }
            }
        }
    }

    /// Times where the rate jumps; the finite-difference cross-check and the
    /// midpoint power evaluation must not straddle these blindly.
    pub fn kink_times(&self) -> Vec<f64> {
        match *self {
            TimeProfile::RampHold { t_ramp, .. } => vec![t_ramp],
            _ => vec![],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let TimeProfile::RampHold { t_ramp, .. } = *self {
            if !(t_ramp > 0.0) {
                return Err(Error::Config(format!("ramp_hold needs t_ramp > 0, got {t_ramp}")));
            }
        }
        Ok(())
    }
}

/// Spatial pattern of the Dirichlet data `g(x, t)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryProgram {
    Zero,
    /// `g = (0, a(t) * y / height_ref)`: the pure-shear stretch. On a strip of
    /// half-height `height_ref` this imposes `(0, +-a)` at `y = +-height_ref`.
    StretchY { amplitude: TimeProfile, height_ref: f64 },
    /// Rigid translation `g = a(t) * direction`.
    Translate { amplitude: TimeProfile, direction: [f64; 2] },
}

impl BoundaryProgram {
    pub fn eval(&self, p: [f64; 2], t: f64) -> [f64; 2] {
        match self {
            BoundaryProgram::Zero => [0.0, 0.0],
            BoundaryProgram::StretchY { amplitude, height_ref } => {
                [0.0, amplitude.value(t) * p[1] / height_ref]
            }
            BoundaryProgram::Translate { amplitude, direction } => {
                let a = amplitude.value(t);
                [a * direction[0], a * direction[1]]
            }
        }
    }

    pub fn eval_rate(&self, p: [f64; 2], t: f64) -> [f64; 2] {
        match self {
            BoundaryProgram::Zero => [0.0, 0.0],
            BoundaryProgram::StretchY { amplitude, height_ref } => {
                [0.0, amplitude.rate(t) * p[1] / height_ref]
            }
            BoundaryProgram::Translate { amplitude, direction } => {
                let a = amplitude.rate(t);
                [a * direction[0], a * direction[1]]
            }
        }
    }

    pub fn profile(&self) -> Option<&TimeProfile> {
        match self {
            BoundaryProgram::Zero => None,
            BoundaryProgram::StretchY { amplitude, .. } => Some(amplitude),
            BoundaryProgram::Translate { amplitude, .. } => Some(amplitude),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let BoundaryProgram::StretchY { height_ref, .. } = self {
            if !(*height_ref > 0.0) {
                return Err(Error::Config("stretch_y needs height_ref > 0".into()));
            }
        }
        if let Some(p) = self.profile() {
            p.validate()?;
        }
        Ok(())
    }
}

/// Spatially uniform vector load with a time profile (body force or traction).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformLoad {
    pub vector: [f64; 2],
    pub amplitude: TimeProfile,
}

impl UniformLoad {
    fn at(&self, t: f64) -> [f64; 2] {
        let a = self.amplitude.value(t);
        [a * self.vector[0], a * self.vector[1]]
    }
    fn rate_at(&self, t: f64) -> [f64; 2] {
        let a = self.amplitude.rate(t);
        [a * self.vector[0], a * self.vector[1]]
    }
}

/// Complete load description of a scenario.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadProgram {
    pub dirichlet: BoundaryProgram,
    #[serde(default)]
    pub body: Option<UniformLoad>,
    /// Applied on `neumann_loaded` edges only.
    #[serde(default)]
    pub traction: Option<UniformLoad>,
}

impl LoadProgram {
    pub fn none() -> Self {
        LoadProgram { dirichlet: BoundaryProgram::Zero, body: None, traction: None }
    }

    pub fn validate(&self) -> Result<()> {
        self.dirichlet.validate()?;
        if let Some(b) = &self.body {
            b.amplitude.validate()?;
        }
        if let Some(q) = &self.traction {
            q.amplitude.validate()?;
        }
        Ok(())
    }

    /// All rate-jump times of the program.
    pub fn kink_times(&self) -> Vec<f64> {
        let mut ks = Vec::new();
        if let Some(p) = self.dirichlet.profile() {
            ks.extend(p.kink_times());
        }
        if let Some(b) = &self.body {
            ks.extend(b.amplitude.kink_times());
        }
        if let Some(q) = &self.traction {
            ks.extend(q.amplitude.kink_times());
        }
        ks
    }

    /// Evaluates values and analytic rates at time `t` on the mesh.
    pub fn state_at(&self, mesh: &TriMesh, t: f64) -> LoadState {
        let n = mesh.node_count();
        let mut g = vec![None; n];
        let mut g_dot = vec![None; n];
        for i in mesh.tagged_nodes(BoundaryTag::Dirichlet) {
            g[i] = Some(self.dirichlet.eval(mesh.nodes[i], t));
            g_dot[i] = Some(self.dirichlet.eval_rate(mesh.nodes[i], t));
        }
        let (body, body_dot) = match &self.body {
            Some(b) => (b.at(t), b.rate_at(t)),
            None => ([0.0, 0.0], [0.0, 0.0]),
        };
        let (traction, traction_dot) = match &self.traction {
            Some(q) => (q.at(t), q.rate_at(t)),
            None => ([0.0, 0.0], [0.0, 0.0]),
        };
        LoadState { time: t, g, g_dot, body, body_dot, traction, traction_dot }
    }

    /// Cross-checks analytic rates against central finite differences away
    /// from kinks; run once at scenario setup.
    pub fn check_rate_consistency(&self, t0: f64, t1: f64) -> Result<()> {
        let span = (t1 - t0).max(1e-6);
        let h = 1e-7 * span.max(1.0);
        let kinks = self.kink_times();
        let mut checks: Vec<(&str, &TimeProfile)> = Vec::new();
        if let Some(p) = self.dirichlet.profile() {
            checks.push(("dirichlet", p));
        }
        if let Some(b) = &self.body {
            checks.push(("body", &b.amplitude));
        }
        if let Some(q) = &self.traction {
            checks.push(("traction", &q.amplitude));
        }
        for (name, p) in checks {
            let mut scale: f64 = 1e-12;
            for k in 0..=64 {
                let t = t0 + span * k as f64 / 64.0;
                scale = scale.max(p.rate(t).abs());
            }
            for k in 0..=64 {
                let t = t0 + span * k as f64 / 64.0;
                if kinks.iter().any(|&tk| (t - tk).abs() < 4.0 * h) {
                    continue;
                }
                let fd = (p.value(t + h) - p.value(t - h)) / (2.0 * h);
                if (fd - p.rate(t)).abs() > 1e-6 * scale.max(1.0) {
                    return Err(Error::Config(format!(
                        "{name} profile rate inconsistent at t = {t}: analytic {}, fd {fd}",
                        p.rate(t)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Loads evaluated at one time instant.
#[derive(Clone, Debug)]
pub struct LoadState {
    pub time: f64,
    /// Prescribed displacement per node (`Some` exactly on Dirichlet nodes).
    pub g: Vec<Option<[f64; 2]>>,
    pub g_dot: Vec<Option<[f64; 2]>>,
    /// Uniform body force and its rate.
    pub body: [f64; 2],
    pub body_dot: [f64; 2],
    /// Uniform traction on loaded edges and its rate.
    pub traction: [f64; 2],
    pub traction_dot: [f64; 2],
}

impl LoadState {
    /// A state with no loads at all (`g` absent everywhere): every dof free.
    pub fn free(mesh: &TriMesh, t: f64) -> LoadState {
        let n = mesh.node_count();
        LoadState {
            time: t,
            g: vec![None; n],
            g_dot: vec![None; n],
            body: [0.0, 0.0],
            body_dot: [0.0, 0.0],
            traction: [0.0, 0.0],
            traction_dot: [0.0, 0.0],
        }
    }

    /// Dirichlet data from an explicit nodal field on the tagged nodes.
    pub fn from_dirichlet_field(mesh: &TriMesh, t: f64, g_field: &NodalField) -> LoadState {
        let mut s = LoadState::free(mesh, t);
        for i in mesh.tagged_nodes(BoundaryTag::Dirichlet) {
            s.g[i] = Some(g_field.vec_at(i));
            s.g_dot[i] = Some([0.0, 0.0]);
        }
        s
    }
}
