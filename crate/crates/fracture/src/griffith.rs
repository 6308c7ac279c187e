//! The Griffith-type crack-growth model with velocity-dependent fracture
//! energy, reduced to the scalar ODE `L'(t) = beta*(G(L(t), t) - G_c)`, plus
//! its KKT formulation and the energy-dissipation identity along
//! trajectories.

use crate::material::{alpha_star, beta_star, positive_part, RateLaw};
use crate::{Error, Result};
use std::io::Write;
use std::path::Path;

/// 4-point Gauss–Legendre abscissae/weights on [-1, 1].
const GL_X: [f64; 4] = [
    -0.8611363115940526,
    -0.3399810435848563,
    0.3399810435848563,
    0.8611363115940526,
];
const GL_W: [f64; 4] = [
    0.34785484513745385,
    0.6521451548625461,
    0.6521451548625461,
    0.34785484513745385,
];

/// Subintervals of the fixed quadrature grid used to reconstruct the energy
/// profile from the release rate. A fixed absolute grid makes the quadrature
/// error cancel in differences along a trajectory.
const QUAD_CELLS: usize = 8192;

type Scalar2 = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Energy profile `E(ell, t)` described through its release rate
/// `G(ell, t) = -dE/d ell` on a box domain; `E` itself is reconstructed by
/// quadrature from `ell0`, so it is defined up to a constant in `ell`.
pub struct EnergyProfile {
    g: Scalar2,
    de_dt: Option<Scalar2>,
    pub ell_range: (f64, f64),
    pub t_range: (f64, f64),
    pub lipschitz_in_ell: bool,
}

impl EnergyProfile {
    pub fn new(
        g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        ell_range: (f64, f64),
        t_range: (f64, f64),
    ) -> EnergyProfile {
        EnergyProfile {
            g: Box::new(g),
            de_dt: None,
            ell_range,
            t_range,
            lipschitz_in_ell: true,
        }
    }

    pub fn with_de_dt(
        mut self,
        de_dt: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> EnergyProfile {
        self.de_dt = Some(Box::new(de_dt));
        self
    }

    /// The tent-shaped release rate from the reference crack-growth
    /// experiment: `G(ell, t) = t (2 - ||ell - 1| - 1|)` on `ell in [0, 4]`.
    pub fn figure3() -> EnergyProfile {
        let ell_range = (0.0, 4.0);
        let profile = EnergyProfile::new(figure3_profile, ell_range, (0.0, 100.0));
        // dE/dt(ell, t) = -integral of the tent from ell0, since G = t * tent.
        profile.with_de_dt(move |ell, _t| {
            -quad_fixed_grid(&|s| figure3_profile(s, 1.0), ell_range, ell)
        })
    }

    pub fn release_rate(&self, ell: f64, t: f64) -> f64 {
        (self.g)(ell, t)
    }

    /// `E(ell, t) = -int_{ell0}^{ell} G(s, t) ds` by composite Gauss–Legendre
    /// on the fixed grid.
    pub fn energy(&self, ell: f64, t: f64) -> f64 {
        -quad_fixed_grid(&|s| (self.g)(s, t), self.ell_range, ell)
    }

    pub fn de_dt(&self, ell: f64, t: f64) -> Option<f64> {
        self.de_dt.as_ref().map(|f| f(ell, t))
    }

    /// Spot-checks `G >= 0` on a sample grid of the domain box.
    pub fn check_release_rate_nonnegative(&self) -> Result<()> {
        let (l0, l1) = self.ell_range;
        let (t0, t1) = self.t_range;
        for i in 0..=32 {
            for j in 0..=32 {
                let ell = l0 + (l1 - l0) * i as f64 / 32.0;
                let t = t0 + (t1 - t0) * j as f64 / 32.0;
                let g = self.release_rate(ell, t);
                if g < -1e-12 {
                    return Err(Error::InvalidParameter(format!(
                        "release rate negative at (ell={ell}, t={t}): {g}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `int_{range.0}^{upto} f` on the profile's fixed subinterval grid: full
/// cells plus a mapped partial cell, so shared cells cancel exactly when
/// differencing.
fn quad_fixed_grid(f: &dyn Fn(f64) -> f64, range: (f64, f64), upto: f64) -> f64 {
    let (a, b) = range;
    let upto = upto.clamp(a, b);
    let w = (b - a) / QUAD_CELLS as f64;
    let full = ((upto - a) / w).floor() as usize;
    let mut acc = 0.0;
    for k in 0..full {
        let (lo, hi) = (a + k as f64 * w, a + (k + 1) as f64 * w);
        acc += gl4(f, lo, hi);
    }
    let lo = a + full as f64 * w;
    if upto > lo {
        acc += gl4(f, lo, upto);
    }
    acc
}

#[inline]
fn gl4(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let mut acc = 0.0;
    for i in 0..4 {
        acc += GL_W[i] * f(c + h * GL_X[i]);
    }
    acc * h
}

/// `G(ell, t) = t (2 - ||ell - 1| - 1|)`.
pub fn figure3_profile(ell: f64, t: f64) -> f64 {
    t * (2.0 - ((ell - 1.0).abs() - 1.0).abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrajectoryStatus {
    Completed,
    /// Integration stopped when the crack reached the edge of the profile's
    /// `ell` domain; the trajectory is partial.
    LeftDomain,
}

/// Sampled solution of the crack-growth ODE.
#[derive(Clone, Debug)]
pub struct CrackTrajectory {
    pub t: Vec<f64>,
    pub length: Vec<f64>,
    /// `V_i = beta*(G(L_i, t_i) - G_c)`, the defining rate relation.
    pub velocity: Vec<f64>,
    pub release_rate: Vec<f64>,
    pub g_c: f64,
    pub rate_law: RateLaw,
    pub ell0: f64,
    pub status: TrajectoryStatus,
}

impl CrackTrajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Monotone length, nonnegative velocity, and the defining relation
    /// `V = beta*(G - G_c)` at every sample.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.len() {
            if self.velocity[i] < 0.0 {
                return Err(Error::InvalidParameter(format!("negative velocity at {i}")));
            }
            if i > 0 && self.length[i] < self.length[i - 1] {
                return Err(Error::InvalidParameter(format!("length decreased at {i}")));
            }
            let v = beta_star(&self.rate_law, self.release_rate[i] - self.g_c)?;
            if (v - self.velocity[i]).abs() > 1e-12 * v.max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "stored velocity {} violates the rate relation {v} at {i}",
                    self.velocity[i]
                )));
            }
        }
        Ok(())
    }

    /// CSV with one row per sample: `t,length,velocity,release_rate,residual`,
    /// where `residual` is the dissipation residual of the step ending at the
    /// row (0 in the first row), if provided.
    pub fn write_csv(&self, residuals: Option<&[f64]>, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "t,length,velocity,release_rate,residual")?;
        for i in 0..self.len() {
            let r = match residuals {
                Some(rs) if i > 0 && i - 1 < rs.len() => rs[i - 1],
                _ => 0.0,
            };
            writeln!(
                f,
                "{},{},{},{},{}",
                self.t[i], self.length[i], self.velocity[i], self.release_rate[i], r
            )?;
        }
        Ok(())
    }
}

/// Integrates `L' = beta*(G(L, t) - G_c)`, `L(t0) = ell0` with fixed-step
/// RK4. Stage evaluations clamp `L` into the profile domain; once the crack
/// reaches the domain edge the trajectory is returned partial with
/// [`TrajectoryStatus::LeftDomain`].
pub fn integrate_crack_length(
    profile: &EnergyProfile,
    g_c: f64,
    law: &RateLaw,
    ell0: f64,
    t_span: (f64, f64),
    dt: f64,
) -> Result<CrackTrajectory> {
    if !(dt > 0.0) || !(t_span.1 > t_span.0) {
        return Err(Error::InvalidParameter(format!(
            "bad time grid: span {t_span:?}, dt {dt}"
        )));
    }
    let (l0, l1) = profile.ell_range;
    if !(ell0 >= l0 && ell0 <= l1) {
        return Err(Error::InvalidParameter(format!(
            "ell0 = {ell0} outside profile domain [{l0}, {l1}]"
        )));
    }
    law.validate()?;

    let rhs = |ell: f64, t: f64| -> Result<f64> {
        beta_star(law, profile.release_rate(ell.clamp(l0, l1), t) - g_c)
    };

    let n = ((t_span.1 - t_span.0) / dt).round() as usize;
    let mut t = Vec::with_capacity(n + 1);
    let mut length = Vec::with_capacity(n + 1);
    let mut velocity = Vec::with_capacity(n + 1);
    let mut release = Vec::with_capacity(n + 1);
    let mut status = TrajectoryStatus::Completed;

    let mut ell = ell0;
    for k in 0..=n {
        let tk = t_span.0 + k as f64 * dt;
        let g = profile.release_rate(ell, tk);
        t.push(tk);
        length.push(ell);
        release.push(g);
        velocity.push(beta_star(law, g - g_c)?);
        if k == n {
            break;
        }
        let k1 = rhs(ell, tk)?;
        let k2 = rhs(ell + 0.5 * dt * k1, tk + 0.5 * dt)?;
        let k3 = rhs(ell + 0.5 * dt * k2, tk + 0.5 * dt)?;
        let k4 = rhs(ell + dt * k3, tk + dt)?;
        ell += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if ell >= l1 {
            ell = l1;
            let tk1 = tk + dt;
            t.push(tk1);
            length.push(ell);
            let g = profile.release_rate(ell, tk1);
            release.push(g);
            velocity.push(beta_star(law, g - g_c)?);
            status = TrajectoryStatus::LeftDomain;
            break;
        }
    }

    Ok(CrackTrajectory {
        t,
        length,
        velocity,
        release_rate: release,
        g_c,
        rate_law: law.clone(),
        ell0,
        status,
    })
}

/// Checks the velocity-dependent Griffith conditions
/// `V >= 0`, `G <= G_c*(V)`, `V (G_c*(V) - G) = 0` to tolerance `tol`, and
/// the equivalent closed form `alpha*(V) = (G - G_c)_+`; returns true only
/// when both agree that the state is admissible.
pub fn kkt_check(v: f64, g: f64, g_c: f64, law: &RateLaw, tol: f64) -> Result<bool> {
    let (triple, closed) = kkt_check_detailed(v, g, g_c, law, tol)?;
    Ok(triple && closed)
}

/// Both sides of the equivalence: the KKT triple and the positive-part form.
pub fn kkt_check_detailed(
    v: f64,
    g: f64,
    g_c: f64,
    law: &RateLaw,
    tol: f64,
) -> Result<(bool, bool)> {
    if v < -tol {
        return Ok((false, false));
    }
    let a = alpha_star(law, v.max(0.0))?;
    let gcv = g_c + a;
    let triple = g <= gcv + tol && (v.max(0.0) * (gcv - g)).abs() <= tol;
    let closed = (a - positive_part(g - g_c)).abs() <= tol;
    Ok((triple, closed))
}

/// Maximum over steps of the discrete energy-dissipation residual
/// `|Delta E_tot / Delta t + alpha*(V) V - dE/dt|` along the trajectory,
/// with midpoint rates; shrinks at least linearly under `dt` refinement.
pub fn ode_dissipation_check(traj: &CrackTrajectory, profile: &EnergyProfile) -> Result<f64> {
    let r = dissipation_residuals(traj, profile)?;
    Ok(r.iter().fold(0.0f64, |a, &b| a.max(b.abs())))
}

/// Per-step residuals of the identity `d/dt (E + G_c L) = -alpha*(V) V + dE/dt`.
pub fn dissipation_residuals(traj: &CrackTrajectory, profile: &EnergyProfile) -> Result<Vec<f64>> {
    if profile.de_dt(traj.ell0, traj.t.first().copied().unwrap_or(0.0)).is_none() {
        return Err(Error::InvalidParameter(
            "energy profile provides no dE/dt evaluator".into(),
        ));
    }
    let n = traj.len();
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    let e_tot: Vec<f64> = (0..n)
        .map(|i| profile.energy(traj.length[i], traj.t[i]) + traj.g_c * traj.length[i])
        .collect();
    for i in 0..n.saturating_sub(1) {
        let dt = traj.t[i + 1] - traj.t[i];
        let v_mid = 0.5 * (traj.velocity[i] + traj.velocity[i + 1]);
        let l_mid = 0.5 * (traj.length[i] + traj.length[i + 1]);
        let t_mid = 0.5 * (traj.t[i] + traj.t[i + 1]);
        let de_dt = profile.de_dt(l_mid, t_mid).unwrap();
        let diss = alpha_star(&traj.rate_law, v_mid)? * v_mid;
        out.push((e_tot[i + 1] - e_tot[i]) / dt + diss - de_dt);
    }
    Ok(out)
}
