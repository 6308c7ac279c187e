//! Energy bookkeeping: the per-step ledger with its dissipation-identity
//! residual, and the strip diagnostics (regularized crack length, tip
//! position, velocity, effective fracture energy) used to characterize the
//! time-relaxation coefficient from traveling cracks.

use crate::field::NodalField;
use crate::material::MaterialParams;
use crate::mesh::{element_gradients, node_subset, ElementGradients, Region, TriMesh};
use crate::phasefield::PhaseFieldSolver;
use crate::{Error, Result};
use std::io::Write;
use std::path::Path;

/// One completed step of a phase-field run. `d`, `fdot_mid` and `residual`
/// describe the step that *ended* at this row (zero in the first row):
/// `residual = (e_tot - prev.e_tot) / dt + d - fdot_mid`.
#[derive(Clone, Copy, Debug)]
pub struct LedgerRow {
    pub step: usize,
    pub t: f64,
    /// Minimal damaged elastic energy at (t, z).
    pub e_el: f64,
    /// Regularized surface energy at z.
    pub e_s: f64,
    pub e_tot: f64,
    /// Instantaneous power input at t.
    pub fdot: f64,
    /// Midpoint power of the arriving step.
    pub fdot_mid: f64,
    /// Dissipation `alpha int |dz/dt|^2 dx` of the arriving step.
    pub d: f64,
    pub residual: f64,
}

/// Residual of the dissipation identity over one ledger step pair.
pub fn dissipation_residual(prev: &LedgerRow, cur: &LedgerRow) -> f64 {
    (cur.e_tot - prev.e_tot) / (cur.t - prev.t) + cur.d - cur.fdot_mid
}

#[derive(Clone, Debug, Default)]
pub struct EnergyLedger {
    pub rows: Vec<LedgerRow>,
}

impl EnergyLedger {
    pub fn push_initial(&mut self, t: f64, e_el: f64, e_s: f64, fdot: f64) {
        self.rows.push(LedgerRow {
            step: self.rows.len(),
            t,
            e_el,
            e_s,
            e_tot: e_el + e_s,
            fdot,
            fdot_mid: 0.0,
            d: 0.0,
            residual: 0.0,
        });
    }

    pub fn push_step(&mut self, t: f64, e_el: f64, e_s: f64, fdot: f64, fdot_mid: f64, d: f64) {
        let mut row = LedgerRow {
            step: self.rows.len(),
            t,
            e_el,
            e_s,
            e_tot: e_el + e_s,
            fdot,
            fdot_mid,
            d,
            residual: 0.0,
        };
        if let Some(prev) = self.rows.last() {
            row.residual = dissipation_residual(prev, &row);
        }
        self.rows.push(row);
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.rows.iter().fold(0.0f64, |a, r| a.max(r.residual.abs()))
    }

    /// `sum |r| dt` over the run.
    pub fn integrated_abs_residual(&self) -> f64 {
        self.rows
            .windows(2)
            .map(|w| w[1].residual.abs() * (w[1].t - w[0].t))
            .sum()
    }

    /// Steps violating `|r| <= rel_tol * max(|fdot_mid|, d, |dE/dt|) + floor`,
    /// with an absolute floor of `1e-9 * max(1, max |e_tot|)` so idle steps
    /// (all three scales at solver noise) are not spuriously flagged.
    pub fn identity_violations(&self, rel_tol: f64) -> usize {
        let scale = self.rows.iter().fold(1.0f64, |a, r| a.max(r.e_tot.abs()));
        let floor = 1e-9 * scale;
        self.rows
            .windows(2)
            .filter(|w| {
                let de = (w[1].e_tot - w[0].e_tot) / (w[1].t - w[0].t);
                let s = w[1].fdot_mid.abs().max(w[1].d).max(de.abs());
                w[1].residual.abs() > rel_tol * s + floor
            })
            .count()
    }

    /// `step,t,e_el,e_s,e_tot,fdot,fdot_mid,d,residual`, full precision.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "step,t,e_el,e_s,e_tot,fdot,fdot_mid,d,residual")?;
        for r in &self.rows {
            writeln!(
                f,
                "{},{},{},{},{},{},{},{},{}",
                r.step, r.t, r.e_el, r.e_s, r.e_tot, r.fdot, r.fdot_mid, r.d, r.residual
            )?;
        }
        Ok(())
    }
}

/// Increment of the regularized crack length between two damage states:
/// the difference of their Ambrosio–Tortorelli energies over `G_c`, computed
/// with identical quadratures.
pub fn regularized_crack_increment(
    mesh: &TriMesh,
    z_now: &NodalField,
    z_ref: &NodalField,
    mat: &MaterialParams,
) -> f64 {
    let pf = PhaseFieldSolver::new(mesh);
    (pf.surface_energy(z_now, mat) - pf.surface_energy(z_ref, mat)) / mat.g_c
}

/// `int |d z / d x_1|^2 dx`, element-wise constant gradients.
pub fn beta_integral(mesh: &TriMesh, z: &NodalField) -> f64 {
    beta_integral_with(&element_gradients(mesh), &mesh.triangles, z)
}

pub fn beta_integral_with(
    geo: &[ElementGradients],
    triangles: &[[usize; 3]],
    z: &NodalField,
) -> f64 {
    triangles
        .iter()
        .zip(geo)
        .map(|(tri, g)| {
            let dzdx: f64 = (0..3).map(|a| g.bx[a] * z.values[tri[a]]).sum();
            g.area * dzdx * dzdx
        })
        .sum()
}

/// Locates the crack tip on the centerline `y = 0`: the largest `x` where the
/// damage crosses the threshold, linearly interpolated between nodes.
pub struct TipLocator {
    nodes: Vec<usize>,
    xs: Vec<f64>,
    pub threshold: f64,
}

impl TipLocator {
    pub fn new(mesh: &TriMesh, threshold: f64) -> Result<TipLocator> {
        let nodes = node_subset(mesh, &Region::y_eq(0.0));
        if nodes.len() < 2 {
            return Err(Error::InvalidParameter(
                "mesh has no centerline y = 0; use an even number of cell rows".into(),
            ));
        }
        let mut pairs: Vec<(f64, usize)> = nodes.iter().map(|&i| (mesh.nodes[i][0], i)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(TipLocator {
            xs: pairs.iter().map(|p| p.0).collect(),
            nodes: pairs.iter().map(|p| p.1).collect(),
            threshold,
        })
    }

    /// `None` while no centerline node reaches the threshold.
    pub fn locate(&self, z: &NodalField) -> Option<f64> {
        let zs: Vec<f64> = self.nodes.iter().map(|&i| z.values[i]).collect();
        // Rightmost downward crossing of the threshold.
        for k in (0..zs.len() - 1).rev() {
            let (za, zb) = (zs[k], zs[k + 1]);
            if za >= self.threshold && zb < self.threshold {
                let s = (za - self.threshold) / (za - zb);
                return Some(self.xs[k] + s * (self.xs[k + 1] - self.xs[k]));
            }
        }
        if *zs.last().unwrap() >= self.threshold {
            return Some(*self.xs.last().unwrap());
        }
        None
    }
}

/// Per-step traveling-crack diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct StripRow {
    pub step: usize,
    pub t: f64,
    /// Regularized crack-length increment since the initial state.
    pub l_eps: f64,
    /// Damaged strain-energy increment since the initial state.
    pub e_eps: f64,
    /// Tip position (NaN while undetectable).
    pub x_tip: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, Default)]
pub struct StripDiagnostics {
    pub rows: Vec<StripRow>,
}

impl StripDiagnostics {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "step,t,l_eps,e_eps,x_tip,beta")?;
        for r in &self.rows {
            writeln!(f, "{},{},{},{},{},{}", r.step, r.t, r.l_eps, r.e_eps, r.x_tip, r.beta)?;
        }
        Ok(())
    }
}

/// Steady-propagation measurement extracted from strip diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct SteadyMeasurement {
    /// Sample index range (inclusive) of the steady window.
    pub window: (usize, usize),
    pub t_window: (f64, f64),
    /// Least-squares slope of the tip position over the window.
    pub velocity: f64,
    /// Least-squares slope of `l_eps` (the rate of regularized crack length).
    pub l_eps_slope: f64,
    /// Least-squares slope of `e_eps`.
    pub e_eps_slope: f64,
    pub beta_mean: f64,
    /// `-e_eps_slope / velocity`.
    pub g_c_eps: f64,
}

/// Least-squares slope of `y` against `t`.
pub fn least_squares_slope(t: &[f64], y: &[f64]) -> f64 {
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..t.len() {
        num += (t[i] - tm) * (y[i] - ym);
        den += (t[i] - tm) * (t[i] - tm);
    }
    num / den
}

/// Detects a window of stationary growth in `(t, y)`: the series is split
/// into blocks, block rates are compared to their median, and the longest
/// contiguous run within `rel_tol` of the median is returned as an index
/// range into the series.
pub fn detect_steady_window(t: &[f64], y: &[f64], rel_tol: f64) -> Result<(usize, usize)> {
    let n = t.len();
    if n < 2 {
        return Err(Error::NoSteadyWindow(format!("only {n} samples")));
    }
    let blocks = 24.min(n / 2).max(1);
    let bounds: Vec<usize> = (0..=blocks).map(|b| b * (n - 1) / blocks).collect();
    let mut rates = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let (i0, i1) = (bounds[b], bounds[b + 1]);
        rates.push((y[i1] - y[i0]) / (t[i1] - t[i0]));
    }
    let mut sorted = rates.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    // Absolute floor so a zero-rate (stalled) series counts as steady.
    let y_scale = y.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1e-12);
    let tol = rel_tol * median.abs() + 1e-9 * y_scale / (t[n - 1] - t[0]);

    let keep: Vec<bool> = rates.iter().map(|r| (r - median).abs() <= tol).collect();
    let mut best: Option<(usize, usize)> = None;
    let mut run_start = None;
    for b in 0..=blocks {
        if b < blocks && keep[b] {
            run_start.get_or_insert(b);
        } else if let Some(s) = run_start.take() {
            let cand = (s, b - 1);
            if best.map_or(true, |(a, z)| cand.1 - cand.0 > z - a) {
                best = Some(cand);
            }
        }
    }
    match best {
        Some((b0, b1)) if bounds[b1 + 1] > bounds[b0] + 1 => Ok((bounds[b0], bounds[b1 + 1])),
        _ => Err(Error::NoSteadyWindow(format!(
            "block rates vary by more than {:.0}% around {median:.3e}",
            rel_tol * 100.0
        ))),
    }
}

/// Least-squares crack velocity over the detected steady window of a tip
/// history (relative increment variation below 5%).
pub fn estimate_crack_velocity(history: &[(f64, f64)]) -> Result<f64> {
    let t: Vec<f64> = history.iter().map(|p| p.0).collect();
    let x: Vec<f64> = history.iter().map(|p| p.1).collect();
    let (i0, i1) = detect_steady_window(&t, &x, 0.05)?;
    Ok(least_squares_slope(&t[i0..=i1], &x[i0..=i1]))
}

/// `G_c^eps = -dE_eps/dt / V` for a steadily traveling crack.
pub fn effective_fracture_energy(e_eps_slope: f64, v: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "effective fracture energy needs V > 0, got {v}"
        )));
    }
    Ok(-e_eps_slope / v)
}

/// Extracts the steady measurement from strip diagnostics, restricted to
/// samples with `t >= t_min` and tip inside `x_range` (end-margin exclusion).
pub fn measure_steady(
    diag: &StripDiagnostics,
    t_min: f64,
    x_range: (f64, f64),
    rel_tol: f64,
) -> Result<SteadyMeasurement> {
    let eligible: Vec<usize> = diag
        .rows
        .iter()
        .enumerate()
        .filter(|(_, r)| {
            r.t >= t_min && r.x_tip.is_finite() && r.x_tip >= x_range.0 && r.x_tip <= x_range.1
        })
        .map(|(i, _)| i)
        .collect();
    if eligible.len() < 2 {
        return Err(Error::NoSteadyWindow(format!(
            "{} eligible samples with tip in [{}, {}] after t = {t_min}",
            eligible.len(),
            x_range.0,
            x_range.1
        )));
    }
    // The eligible indices are contiguous by construction of a growing crack;
    // take the span to be safe.
    let (lo, hi) = (eligible[0], *eligible.last().unwrap());
    let t: Vec<f64> = diag.rows[lo..=hi].iter().map(|r| r.t).collect();
    let l: Vec<f64> = diag.rows[lo..=hi].iter().map(|r| r.l_eps).collect();
    let (w0, w1) = detect_steady_window(&t, &l, rel_tol)?;
    let (i0, i1) = (lo + w0, lo + w1);

    let tw: Vec<f64> = diag.rows[i0..=i1].iter().map(|r| r.t).collect();
    let xw: Vec<f64> = diag.rows[i0..=i1].iter().map(|r| r.x_tip).collect();
    let lw: Vec<f64> = diag.rows[i0..=i1].iter().map(|r| r.l_eps).collect();
    let ew: Vec<f64> = diag.rows[i0..=i1].iter().map(|r| r.e_eps).collect();
    let velocity = least_squares_slope(&tw, &xw);
    let e_eps_slope = least_squares_slope(&tw, &ew);
    let beta_mean = diag.rows[i0..=i1].iter().map(|r| r.beta).sum::<f64>() / (i1 - i0 + 1) as f64;
    let g_c_eps = effective_fracture_energy(e_eps_slope, velocity)?;
    Ok(SteadyMeasurement {
        window: (i0, i1),
        t_window: (diag.rows[i0].t, diag.rows[i1].t),
        velocity,
        l_eps_slope: least_squares_slope(&tw, &lw),
        e_eps_slope,
        beta_mean,
        g_c_eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{PlaneMode, RateLaw};
    use crate::mesh::{build_rect_mesh, build_strip_mesh, BoundaryTag, TagRule};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat(eps: f64) -> MaterialParams {
        MaterialParams {
            lame_lambda: 1.0,
            lame_mu: 1.0,
            plane_mode: PlaneMode::PlaneStress,
            g_c: 1.0,
            epsilon: eps,
            rate_law: RateLaw::Linear { alpha: 0.1 },
            friction_alpha_u: 0.0,
            residual_stiffness: 1e-6,
        }
    }

    #[test]
    fn synthetic_ledger_residual() {
        // E_tot(t) = -t, D = 1, F-dot = 0 gives r = 0.
        let mut ledger = EnergyLedger::default();
        ledger.push_initial(0.0, 0.0, 0.0, 0.0);
        for k in 1..=10 {
            let t = k as f64 * 0.1;
            ledger.push_step(t, -t, 0.0, 0.0, 0.0, 1.0);
        }
        for w in ledger.rows.windows(2) {
            assert!(dissipation_residual(&w[0], &w[1]).abs() < 1e-12);
            assert!(w[1].residual.abs() < 1e-12);
        }
        assert_eq!(ledger.identity_violations(0.05), 0);
    }

    #[test]
    fn frozen_everything_residual_is_zero() {
        let mut ledger = EnergyLedger::default();
        ledger.push_initial(0.0, 2.0, 1.0, 0.0);
        ledger.push_step(0.1, 2.0, 1.0, 0.0, 0.0, 0.0);
        assert_eq!(ledger.rows[1].residual, 0.0);
    }

    #[test]
    fn crack_increment_examples() {
        let mesh = build_rect_mesh([0.0, 0.0], 2.0, 1.0, 0.125, TagRule::all(BoundaryTag::NeumannFree))
            .unwrap();
        let m = mat(0.1);
        let z = NodalField::from_fn_scalar(&mesh, |p| (-(p[0] - 1.0).abs() / 0.1).exp());
        assert_eq!(regularized_crack_increment(&mesh, &z, &z, &m), 0.0);

        let z0 = NodalField::scalar(&mesh, 0.0);
        let c = 0.3;
        let zc = NodalField::scalar(&mesh, c);
        let expect = 2.0 * c * c / (2.0 * m.epsilon);
        let got = regularized_crack_increment(&mesh, &zc, &z0, &m);
        assert!((got - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn crack_increment_tracks_profile_shift() {
        // A crack band with the optimal transverse profile exp(-|y|/eps)
        // carries one unit of regularized length per unit of extent, so
        // shifting its front by dx adds about dx. The shifted states share
        // their tip shape exactly (dx is a multiple of h), so only the
        // swept band contributes, with the usual O(h/eps) interpolation
        // overshoot of the |y| kink.
        let m = mat(0.1);
        let mesh = build_rect_mesh([0.0, -1.0], 8.0, 2.0, 0.025, TagRule::all(BoundaryTag::NeumannFree))
            .unwrap();
        let band = |c: f64| {
            NodalField::from_fn_scalar(&mesh, |p| {
                if p[0] <= c {
                    (-p[1].abs() / m.epsilon).exp()
                } else {
                    0.0
                }
            })
        };
        let dx = 1.0;
        let za = band(3.0);
        let zb = band(3.0 + dx);
        let inc = regularized_crack_increment(&mesh, &zb, &za, &m);
        assert!((inc - dx).abs() <= 0.1 * dx, "increment {inc} for shift {dx}");
    }

    #[test]
    fn velocity_estimation_examples() {
        // Exact linear data.
        let hist: Vec<(f64, f64)> = (0..10).map(|k| {
            let t = k as f64 * 0.1;
            (t, 0.3 + 2.0 * t)
        }).collect();
        assert!((estimate_crack_velocity(&hist).unwrap() - 2.0).abs() < 1e-12);

        // Constant tip.
        let hist: Vec<(f64, f64)> = (0..50).map(|k| (k as f64 * 0.1, 1.25)).collect();
        assert!(estimate_crack_velocity(&hist).unwrap().abs() < 1e-12);

        // Slope 1.5 with +-1e-3 noise recovers 1.5 +- 0.01.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let hist: Vec<(f64, f64)> = (0..200)
            .map(|k| {
                let t = k as f64 / 200.0;
                (t, 0.3 + 1.5 * t + rng.gen_range(-1e-3..1e-3))
            })
            .collect();
        let v = estimate_crack_velocity(&hist).unwrap();
        assert!((v - 1.5).abs() < 0.01, "v = {v}");
    }

    #[test]
    fn no_steady_window_is_diagnosed() {
        // Accelerating front: increments keep growing.
        let hist: Vec<(f64, f64)> = (0..100).map(|k| {
            let t = k as f64 * 0.01;
            (t, t * t * 10.0)
        }).collect();
        assert!(matches!(estimate_crack_velocity(&hist), Err(Error::NoSteadyWindow(_))));
    }

    #[test]
    fn effective_fracture_energy_examples() {
        assert_eq!(effective_fracture_energy(-2.0, 1.0).unwrap(), 2.0);
        let (g_c, alpha, beta, v) = (1.0, 0.1, 2.0, 3.0);
        let slope = -(g_c + alpha * beta * v) * v;
        assert!((effective_fracture_energy(slope, v).unwrap() - 1.6).abs() < 1e-12);
        assert!(effective_fracture_energy(-2.0, 0.0).is_err());
    }

    #[test]
    fn beta_integral_examples() {
        let mesh = build_rect_mesh([0.0, 0.0], 1.0, 1.0, 0.125, TagRule::all(BoundaryTag::NeumannFree))
            .unwrap();
        let zc = NodalField::scalar(&mesh, 0.7);
        assert!(beta_integral(&mesh, &zc).abs() < 1e-14);

        let zx = NodalField::from_fn_scalar(&mesh, |p| p[0]);
        assert!((beta_integral(&mesh, &zx) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tip_locator_interpolates() {
        let mesh = build_strip_mesh(4.0, 0.5, 0.25).unwrap();
        let tip = TipLocator::new(&mesh, 0.5).unwrap();
        // Damage front: z = 1 left of 1.6, dropping linearly over one cell.
        let z = NodalField::from_fn_scalar(&mesh, |p| {
            if p[0] <= 1.5 {
                1.0
            } else if p[0] <= 1.75 {
                1.0 - (p[0] - 1.5) / 0.25
            } else {
                0.0
            }
        });
        let x = tip.locate(&z).unwrap();
        assert!((x - 1.625).abs() < 1e-12, "tip at {x}");

        let cold = NodalField::scalar(&mesh, 0.1);
        assert!(tip.locate(&cold).is_none());
    }

    #[test]
    fn steady_measurement_from_synthetic_rows() {
        // Transient then steady: rate 0.5 for t < 1, rate 2 afterwards.
        let mut diag = StripDiagnostics::default();
        for k in 0..=400 {
            let t = k as f64 * 0.01;
            let l = if t < 1.0 { 0.5 * t } else { 0.5 + 2.0 * (t - 1.0) };
            diag.rows.push(StripRow {
                step: k,
                t,
                l_eps: l,
                e_eps: -3.0 * l,
                x_tip: 1.0 + l,
                beta: 2.0,
            });
        }
        let m = measure_steady(&diag, 0.0, (1.2, 100.0), 0.05).unwrap();
        assert!((m.velocity - 2.0).abs() < 1e-9, "v = {}", m.velocity);
        assert!((m.l_eps_slope - 2.0).abs() < 1e-9);
        assert!((m.g_c_eps - 3.0).abs() < 1e-9);
        assert_eq!(m.beta_mean, 2.0);
    }
}
