//! Scenario configuration (JSON, fail-fast) and the runners for the three
//! canonical experiments: a single coupled phase-field run, the crack-growth
//! ODE family over a range of rate coefficients, and the traveling-wave sweep
//! that measures the effective fracture energy against tip velocity.

use crate::elasticity::ElasticSolver;
use crate::energy::{
    beta_integral_with, measure_steady, EnergyLedger, StripDiagnostics, StripRow, SteadyMeasurement,
    TipLocator,
};
use crate::field::NodalField;
use crate::griffith::{integrate_crack_length, CrackTrajectory, EnergyProfile};
use crate::loads::{BoundaryProgram, LoadProgram, TimeProfile};
use crate::material::{alpha_star, MaterialParams, PlaneMode, RateLaw};
use crate::mesh::{build_rect_mesh, element_gradients, TagRule, TriMesh};
use crate::phasefield::PhaseFieldSolver;
use crate::vtk::write_vtk;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshConfig {
    /// `(0, width) x (-half_height, half_height)`, Dirichlet top/bottom,
    /// free ends; the centerline `y = 0` is a grid line.
    Strip { width: f64, half_height: f64, h: f64 },
    /// `(origin) + (0, width) x (0, height)` with explicit side tags.
    Rect {
        width: f64,
        height: f64,
        h: f64,
        #[serde(default = "default_origin")]
        origin: [f64; 2],
        tags: TagRule,
    },
}

fn default_origin() -> [f64; 2] {
    [0.0, 0.0]
}

impl MeshConfig {
    pub fn build(&self) -> Result<TriMesh> {
        match *self {
            MeshConfig::Strip { width, half_height, h } => {
                crate::mesh::build_strip_mesh(width, half_height, h)
            }
            MeshConfig::Rect { width, height, h, origin, tags } => {
                build_rect_mesh(origin, width, height, h, tags)
            }
        }
    }

    /// Vertical midline of the domain (crack seeds start here).
    fn y_mid(&self) -> f64 {
        match *self {
            MeshConfig::Strip { .. } => 0.0,
            MeshConfig::Rect { height, origin, .. } => origin[1] + 0.5 * height,
        }
    }

    fn x_left(&self) -> f64 {
        match *self {
            MeshConfig::Strip { .. } => 0.0,
            MeshConfig::Rect { origin, .. } => origin[0],
        }
    }

    pub fn width(&self) -> f64 {
        match *self {
            MeshConfig::Strip { width, .. } | MeshConfig::Rect { width, .. } => width,
        }
    }

    pub fn half_height(&self) -> f64 {
        match *self {
            MeshConfig::Strip { half_height, .. } => half_height,
            MeshConfig::Rect { height, .. } => 0.5 * height,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(default)]
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
}

impl TimeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !(self.t1 > self.t0) {
            return Err(Error::Config(format!(
                "time grid needs dt > 0 and t1 > t0, got t0={}, t1={}, dt={}",
                self.t0, self.t1, self.dt
            )));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        ((self.t1 - self.t0) / self.dt).round() as usize
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialDamage {
    Zero,
    Uniform { value: f64 },
    /// `z0 = exp(-dist/epsilon)` around a horizontal segment of the given
    /// length starting at the left edge, mid-height.
    EdgeCrack { length: f64 },
}

impl InitialDamage {
    fn build(&self, mesh: &TriMesh, cfg: &MeshConfig, epsilon: f64) -> Result<NodalField> {
        let z = match *self {
            InitialDamage::Zero => NodalField::scalar(mesh, 0.0),
            InitialDamage::Uniform { value } => NodalField::scalar(mesh, value),
            InitialDamage::EdgeCrack { length } => {
                let (x0, y0) = (cfg.x_left(), cfg.y_mid());
                let x1 = x0 + length;
                NodalField::from_fn_scalar(mesh, |p| {
                    let dx = if p[0] < x0 {
                        x0 - p[0]
                    } else if p[0] > x1 {
                        p[0] - x1
                    } else {
                        0.0
                    };
                    let d = (dx * dx + (p[1] - y0) * (p[1] - y0)).sqrt();
                    (-d / epsilon).exp()
                })
            }
        };
        z.check_damage_range()?;
        Ok(z)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Write a VTK snapshot every this many steps (0 disables snapshots; the
    /// final state is always written when snapshots are enabled).
    pub vtk_every: usize,
    /// Track strip diagnostics (tip position, crack increments, beta).
    pub strip_diagnostics: bool,
    /// Damage level defining the crack tip on the centerline.
    pub tip_threshold: f64,
    /// Relative increment variation accepted inside a steady window.
    pub steady_rel_tol: f64,
    /// End regions excluded from steady measurement, in units of the strip
    /// half-height.
    pub end_margin_factor: f64,
    /// Per-step dissipation-identity tolerance relative to the step's energy
    /// scales; violation marks the run FAILED-IDENTITY.
    pub identity_rel_tol: f64,
    /// Stop the run once the tip enters the far end margin.
    pub stop_at_end_margin: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            vtk_every: 0,
            strip_diagnostics: true,
            tip_threshold: 0.5,
            steady_rel_tol: 0.05,
            end_margin_factor: 2.0,
            identity_rel_tol: 0.05,
            stop_at_end_margin: false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mesh: MeshConfig,
    pub material: MaterialParams,
    pub loads: LoadProgram,
    pub time: TimeConfig,
    pub initial_damage: InitialDamage,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<ScenarioConfig> {
        let cfg: ScenarioConfig = serde_json::from_str(text)?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<ScenarioConfig> {
        ScenarioConfig::from_json(&std::fs::read_to_string(path)?)
    }

    /// The full setup-time invariant suite: mesh structure, material bounds,
    /// rate-law monotonicity, load-rate consistency, time grid, z0 range.
    pub fn seed_check(&self) -> Result<()> {
        self.material.validate()?;
        let mesh = self.mesh.build()?;
        mesh.validate()?;
        self.loads.validate()?;
        self.loads.check_rate_consistency(self.time.t0, self.time.t1)?;
        self.time.validate()?;
        let z0 = self.initial_damage.build(&mesh, &self.mesh, self.material.epsilon)?;
        z0.check_compatible(&mesh)?;
        // Rate law strictly increasing on a sample grid.
        let v_max = self.material.rate_law.v_max().unwrap_or(10.0);
        let mut prev = 0.0;
        for k in 1..=64 {
            let s = alpha_star(&self.material.rate_law, v_max * k as f64 / 64.0)?;
            if s <= prev {
                return Err(Error::Config("rate law is not strictly increasing".into()));
            }
            prev = s;
        }
        if !(self.output.tip_threshold > 0.0 && self.output.tip_threshold < 1.0) {
            return Err(Error::Config("tip_threshold must be in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub status: String,
    pub steps_completed: usize,
    pub wall_seconds: f64,
    pub final_t: f64,
    pub final_e_el: f64,
    pub final_e_s: f64,
    pub final_e_tot: f64,
    pub max_abs_residual: f64,
    pub integrated_abs_residual: f64,
    pub identity_violations: usize,
    pub identity_rel_tol: f64,
    pub irreversibility_violations: usize,
    pub range_violations: usize,
    pub max_fixed_point_iterations: usize,
    pub dt_warnings: usize,
}

/// Everything a coupled run produces, with files written under `out_dir`
/// when given: `ledger.csv`, `strip.csv`, `summary.json`, VTK snapshots.
pub struct RunResult {
    pub summary: RunSummary,
    pub ledger: EnergyLedger,
    pub strip: Option<StripDiagnostics>,
}

/// Runs the coupled quasi-static loop: elasticity solve, phase-field step,
/// ledger update, at fixed `dt`.
pub fn run_fpfm(config: &ScenarioConfig, out_dir: Option<&Path>) -> Result<RunResult> {
    config.seed_check()?;
    let started = Instant::now();
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
    }

    let mesh = config.mesh.build()?;
    let mat = &config.material;
    let n_nodes = mesh.node_count();
    let masses = mesh.lumped_masses();
    let geo = element_gradients(&mesh);

    let mut es = ElasticSolver::new(&mesh);
    let mut pf = PhaseFieldSolver::new(&mesh);
    let tip = if config.output.strip_diagnostics {
        TipLocator::new(&mesh, config.output.tip_threshold).ok()
    } else {
        None
    };

    let mut z = config.initial_damage.build(&mesh, &config.mesh, mat.epsilon)?;
    let mut ledger = EnergyLedger::default();
    let mut strip = tip.as_ref().map(|_| StripDiagnostics::default());

    let mut irrev_violations = 0usize;
    let mut range_violations = 0usize;
    let mut max_fp_iters = 0usize;
    let mut dt_warnings = 0usize;

    let relaxed = mat.friction_alpha_u > 0.0;
    let dt = config.time.dt;
    let n_steps = config.time.steps();

    // State at t0.
    let loads = config.loads.state_at(&mesh, config.time.t0);
    es.assemble(&mesh, &z, mat, &loads);
    es.solve().map_err(|e| write_failure(out_dir, &e, started))?;
    let mut u = es.displacement();
    let mut w = es.energy_density(mat);
    let mut reactions = es.reactions();
    let (strain0, e_el) = es.energies();
    let e_s = pf.surface_energy(&z, mat);
    let fdot = es.power_from_reactions(&reactions, &loads, &u);
    ledger.push_initial(config.time.t0, e_el, e_s, fdot);
    let e_s_ref = e_s;
    let strain_ref = strain0;

    let x_margin = {
        let h2 = config.mesh.half_height() * config.output.end_margin_factor;
        (config.mesh.x_left() + h2, config.mesh.x_left() + config.mesh.width() - h2)
    };
    if let (Some(tl), Some(sd)) = (&tip, strip.as_mut()) {
        sd.rows.push(StripRow {
            step: 0,
            t: config.time.t0,
            l_eps: 0.0,
            e_eps: 0.0,
            x_tip: tl.locate(&z).unwrap_or(f64::NAN),
            beta: beta_integral_with(&geo, &mesh.triangles, &z),
        });
    }
    maybe_write_vtk(out_dir, &config.output, 0, &mesh, &z, &u, &w)?;

    let mut steps_done = 0usize;
    let mut run_error: Option<Error> = None;

    for n in 0..n_steps {
        let t_next = config.time.t0 + (n + 1) as f64 * dt;
        let t_mid = config.time.t0 + (n as f64 + 0.5) * dt;

        // Phase-field update from the current energy density.
        let (z_next, report) = match pf.step(&z, &w, dt, mat) {
            Ok(v) => v,
            Err(e) => {
                run_error = Some(e);
                break;
            }
        };
        max_fp_iters = max_fp_iters.max(report.iterations);
        dt_warnings += report.dt_warning as usize;

        // Dissipation of the step: sum m alpha*(v) v (= alpha int v^2 for
        // the linear law).
        let mut d = 0.0;
        for i in 0..n_nodes {
            let v = (z_next.values[i] - z.values[i]) / dt;
            if v > 0.0 {
                d += masses[i] * alpha_star(&mat.rate_law, v)? * v;
            }
            if z_next.values[i] < z.values[i] {
                irrev_violations += 1;
            }
            if !(0.0..=1.0).contains(&z_next.values[i]) {
                range_violations += 1;
            }
        }

        // Elasticity at the new time and damage.
        let loads_next = config.loads.state_at(&mesh, t_next);
        es.assemble(&mesh, &z_next, mat, &loads_next);
        let solve_result = if relaxed {
            es.relaxed_step(&u, dt, mat, &loads_next)
        } else {
            es.solve()
        };
        if let Err(e) = solve_result {
            run_error = Some(e);
            break;
        }
        let u_next = es.displacement();
        let reactions_next = es.reactions();
        if relaxed {
            // Clean stiffness again for the energy quadratic forms.
            es.assemble(&mesh, &z_next, mat, &loads_next);
        }
        let w_next = es.energy_density(mat);
        let (strain_next, e_el_next) = es.energies();
        let e_s_next = pf.surface_energy(&z_next, mat);
        let fdot_next = es.power_from_reactions(&reactions_next, &loads_next, &u_next);

        // Midpoint power: load rates at the midpoint time paired with the
        // average of the endpoint reactions. Exact through ramp-hold kinks
        // when the kink sits on a grid point.
        let loads_mid = config.loads.state_at(&mesh, t_mid);
        let fdot_mid = 0.5
            * (es.power_from_reactions(&reactions, &loads_mid, &u)
                + es.power_from_reactions(&reactions_next, &loads_mid, &u_next));

        ledger.push_step(t_next, e_el_next, e_s_next, fdot_next, fdot_mid, d);

        let mut tip_x = f64::NAN;
        if let (Some(tl), Some(sd)) = (&tip, strip.as_mut()) {
            tip_x = tl.locate(&z_next).unwrap_or(f64::NAN);
            sd.rows.push(StripRow {
                step: n + 1,
                t: t_next,
                l_eps: (e_s_next - e_s_ref) / mat.g_c,
                e_eps: strain_next - strain_ref,
                x_tip: tip_x,
                beta: beta_integral_with(&geo, &mesh.triangles, &z_next),
            });
        }

        z = z_next;
        u = u_next;
        w = w_next;
        reactions = reactions_next;
        steps_done = n + 1;

        maybe_write_vtk(out_dir, &config.output, n + 1, &mesh, &z, &u, &w)?;

        if config.output.stop_at_end_margin && tip_x.is_finite() && tip_x >= x_margin.1 {
            break;
        }
    }

    let identity_violations = ledger.identity_violations(config.output.identity_rel_tol);
    let last = ledger.rows.last().copied().unwrap();
    let status = match (&run_error, identity_violations) {
        (Some(e), _) => format!("FAILED-SOLVER: {e}"),
        (None, 0) => "ok".to_string(),
        (None, _) => "FAILED-IDENTITY".to_string(),
    };
    let summary = RunSummary {
        status,
        steps_completed: steps_done,
        wall_seconds: started.elapsed().as_secs_f64(),
        final_t: last.t,
        final_e_el: last.e_el,
        final_e_s: last.e_s,
        final_e_tot: last.e_tot,
        max_abs_residual: ledger.max_abs_residual(),
        integrated_abs_residual: ledger.integrated_abs_residual(),
        identity_violations,
        identity_rel_tol: config.output.identity_rel_tol,
        irreversibility_violations: irrev_violations,
        range_violations,
        max_fixed_point_iterations: max_fp_iters,
        dt_warnings,
    };

    if let Some(dir) = out_dir {
        ledger.write_csv(&dir.join("ledger.csv"))?;
        if let Some(sd) = &strip {
            sd.write_csv(&dir.join("strip.csv"))?;
        }
        // Final state snapshot regardless of cadence, when snapshots are on.
        if config.output.vtk_every > 0 {
            let w_final = es.energy_density(mat);
            write_vtk(
                &mesh,
                &[("damage", &z)],
                &[("displacement", &u)],
                &[("energy_density", &w_final)],
                &dir.join("final.vtk"),
            )?;
        }
        std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    }

    match run_error {
        Some(e) => Err(e),
        None => Ok(RunResult { summary, ledger, strip }),
    }
}

fn write_failure(out_dir: Option<&Path>, e: &Error, started: Instant) -> Error {
    if let Some(dir) = out_dir {
        let _ = std::fs::create_dir_all(dir);
        let _ = std::fs::write(
            dir.join("summary.json"),
            format!(
                "{{\n  \"status\": \"FAILED-SOLVER: {e}\",\n  \"wall_seconds\": {}\n}}\n",
                started.elapsed().as_secs_f64()
            ),
        );
    }
    Error::Config(format!("initial solve failed: {e}"))
}

fn maybe_write_vtk(
    out_dir: Option<&Path>,
    output: &OutputConfig,
    step: usize,
    mesh: &TriMesh,
    z: &NodalField,
    u: &NodalField,
    w: &[f64],
) -> Result<()> {
    let Some(dir) = out_dir else { return Ok(()) };
    if output.vtk_every == 0 || step % output.vtk_every != 0 {
        return Ok(());
    }
    write_vtk(
        mesh,
        &[("damage", z)],
        &[("displacement", u)],
        &[("energy_density", w)],
        &dir.join(format!("snap_{step:06}.vtk")),
    )
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure3Config {
    /// Rate coefficients of the linear law, one trajectory each.
    pub alphas: Vec<f64>,
    pub dt: f64,
    #[serde(default)]
    pub ell0: f64,
    #[serde(default)]
    pub t0: f64,
    #[serde(default = "default_t1_fig3")]
    pub t1: f64,
    #[serde(default = "default_g_c")]
    pub g_c: f64,
}

fn default_t1_fig3() -> f64 {
    1.2
}
fn default_g_c() -> f64 {
    1.0
}

/// Integrates the tent-profile crack ODE for each rate coefficient and writes
/// `figure3.csv` with `t` plus one crack-length column per alpha, ascending.
pub fn run_figure3(config: &Figure3Config, out_dir: Option<&Path>) -> Result<Vec<CrackTrajectory>> {
    if config.alphas.is_empty() || config.alphas.iter().any(|&a| !(a > 0.0)) {
        return Err(Error::Config("figure3 needs a nonempty list of positive alphas".into()));
    }
    let mut alphas = config.alphas.clone();
    alphas.sort_by(f64::total_cmp);
    let profile = EnergyProfile::figure3();
    let trajectories: Vec<CrackTrajectory> = alphas
        .par_iter()
        .map(|&alpha| {
            integrate_crack_length(
                &profile,
                config.g_c,
                &RateLaw::Linear { alpha },
                config.ell0,
                (config.t0, config.t1),
                config.dt,
            )
        })
        .collect::<Result<_>>()?;

    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("figure3.csv"))?);
        let header: Vec<String> =
            alphas.iter().map(|a| format!("L_alpha_{a}")).collect();
        writeln!(f, "t,{}", header.join(","))?;
        let n = trajectories.iter().map(|t| t.len()).min().unwrap_or(0);
        for i in 0..n {
            write!(f, "{}", trajectories[0].t[i])?;
            for traj in &trajectories {
                write!(f, ",{}", traj.length[i])?;
            }
            writeln!(f)?;
        }
    }
    Ok(trajectories)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TravelWaveConfig {
    pub mesh: MeshConfig,
    /// Base material; the sweep substitutes each `alpha` into a linear rate
    /// law. The strip experiment realizes a plane stress state.
    pub material: MaterialParams,
    /// Boundary stretch targets (one run per value, per alpha).
    pub a_values: Vec<f64>,
    pub alpha_values: Vec<f64>,
    /// Linear ramp duration before the hold phase.
    pub t_ramp: f64,
    pub t_max: f64,
    pub dt: f64,
    pub seed_length: f64,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub a: f64,
    pub status: String,
    pub velocity: f64,
    pub beta_mean: f64,
    pub g_c_eps: f64,
    /// `L_eps' / V`, close to 1 for a resolved traveling wave.
    pub l_eps_rate_over_v: f64,
    pub window_t0: f64,
    pub window_t1: f64,
}

/// Sweeps `(alpha, a)` pairs, each a full strip run measured for its steady
/// velocity, beta integral, and effective fracture energy. Runs without a
/// steady window are flagged in the table, not fatal. Worker runs execute in
/// a parallel pool; outputs are per-run and the table order is deterministic.
pub fn run_traveling_wave(config: &TravelWaveConfig, out_dir: Option<&Path>) -> Result<Vec<SweepRow>> {
    if config.a_values.is_empty() || config.alpha_values.is_empty() {
        return Err(Error::Config("travelwave needs nonempty a_values and alpha_values".into()));
    }
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut cases = Vec::new();
    let mut alphas = config.alpha_values.clone();
    let mut a_values = config.a_values.clone();
    alphas.sort_by(f64::total_cmp);
    a_values.sort_by(f64::total_cmp);
    for &alpha in &alphas {
        for &a in &a_values {
            cases.push((alpha, a));
        }
    }

    let rows: Vec<SweepRow> = cases
        .par_iter()
        .map(|&(alpha, a)| -> Result<SweepRow> {
            let mut material = config.material.clone();
            material.rate_law = RateLaw::Linear { alpha };
            let scenario = ScenarioConfig {
                mesh: config.mesh.clone(),
                material,
                loads: LoadProgram {
                    dirichlet: BoundaryProgram::StretchY {
                        amplitude: TimeProfile::RampHold { target: a, t_ramp: config.t_ramp },
                        height_ref: config.mesh.half_height(),
                    },
                    body: None,
                    traction: None,
                },
                time: TimeConfig { t0: 0.0, t1: config.t_max, dt: config.dt },
                initial_damage: InitialDamage::EdgeCrack { length: config.seed_length },
                output: OutputConfig {
                    strip_diagnostics: true,
                    stop_at_end_margin: true,
                    ..config.output
                },
            };
            let run_dir: Option<PathBuf> =
                out_dir.map(|d| d.join(format!("run_alpha{alpha}_a{a}")));
            let result = run_fpfm(&scenario, run_dir.as_deref())?;
            let margin = config.mesh.half_height() * config.output.end_margin_factor;
            let x_range = (margin.max(config.seed_length), config.mesh.width() - margin);
            let measured = result.strip.as_ref().map(|sd| {
                measure_steady(sd, config.t_ramp, x_range, config.output.steady_rel_tol)
            });
            Ok(match measured {
                Some(Ok(m)) => sweep_row(alpha, a, &result, &m),
                Some(Err(e)) => SweepRow {
                    alpha,
                    a,
                    status: format!("no-steady-window: {e}"),
                    velocity: f64::NAN,
                    beta_mean: f64::NAN,
                    g_c_eps: f64::NAN,
                    l_eps_rate_over_v: f64::NAN,
                    window_t0: f64::NAN,
                    window_t1: f64::NAN,
                },
                None => unreachable!("strip diagnostics are forced on"),
            })
        })
        .collect::<Result<_>>()?;

    if let Some(dir) = out_dir {
        let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("sweep.csv"))?);
        writeln!(
            f,
            "alpha,a,status,velocity,beta_mean,g_c_eps,l_eps_rate_over_v,window_t0,window_t1"
        )?;
        for r in &rows {
            writeln!(
                f,
                "{},{},{},{},{},{},{},{},{}",
                r.alpha,
                r.a,
                r.status,
                r.velocity,
                r.beta_mean,
                r.g_c_eps,
                r.l_eps_rate_over_v,
                r.window_t0,
                r.window_t1
            )?;
        }
    }
    Ok(rows)
}

fn sweep_row(alpha: f64, a: f64, result: &RunResult, m: &SteadyMeasurement) -> SweepRow {
    SweepRow {
        alpha,
        a,
        status: result.summary.status.clone(),
        velocity: m.velocity,
        beta_mean: m.beta_mean,
        g_c_eps: m.g_c_eps,
        l_eps_rate_over_v: m.l_eps_slope / m.velocity,
        window_t0: m.t_window.0,
        window_t1: m.t_window.1,
    }
}

/// Default strip material of the traveling-wave experiments: unit Lame pair
/// in plane stress, unit fracture energy.
pub fn default_strip_material(epsilon: f64, alpha: f64) -> MaterialParams {
    MaterialParams {
        lame_lambda: 1.0,
        lame_mu: 1.0,
        plane_mode: PlaneMode::PlaneStress,
        g_c: 1.0,
        epsilon,
        rate_law: RateLaw::Linear { alpha },
        friction_alpha_u: 0.0,
        residual_stiffness: 1e-6,
    }
}
