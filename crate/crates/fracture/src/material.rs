//! Material data, the positive-part algebra, and velocity-dependent rate laws.
//!
//! The fracture energy of the material is `G_c*(V) = G_c + alpha*(V)` where
//! `alpha*` is a strictly increasing continuous function with `alpha*(0) = 0`.
//! [`alpha_star`] evaluates it, [`beta_star`] evaluates its extended inverse
//! `beta*(s) = 0 (s < 0), (alpha*)^{-1}(s) (s >= 0)`.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// `(c)_+ := max(c, 0)`.
#[inline]
pub fn positive_part(c: f64) -> f64 {
    c.max(0.0)
}

/// Checks `a = (a - b)_+` to tolerance `tol`.
///
/// By the positive-part lemma this holds exactly when `a >= 0`, `b >= 0` and
/// `a*b = 0`, so it doubles as a closed-form complementarity test.
#[inline]
pub fn check_complementarity(a: f64, b: f64, tol: f64) -> bool {
    (a - positive_part(a - b)).abs() <= tol
}

/// 2D reduction of the isotropic elasticity tensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneMode {
    PlaneStrain,
    PlaneStress,
}

/// Velocity dependence of the fracture energy, `alpha*(V)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateLaw {
    /// `alpha*(V) = alpha V`.
    Linear { alpha: f64 },
    /// `alpha*(V) = k V^p`.
    Power { k: f64, p: f64 },
    /// Piecewise-linear interpolation of monotone samples `(V, alpha*(V))`,
    /// starting at `(0, 0)`. Evaluation outside the sampled range is an error.
    Tabulated { samples: Vec<(f64, f64)> },
}

impl RateLaw {
    pub fn validate(&self) -> Result<()> {
        match self {
            RateLaw::Linear { alpha } => {
                if !(*alpha > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "linear rate law needs alpha > 0, got {alpha}"
                    )));
                }
            }
            RateLaw::Power { k, p } => {
                if !(*k > 0.0) || !(*p > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "power rate law needs k > 0 and p > 0, got k={k}, p={p}"
                    )));
                }
            }
            RateLaw::Tabulated { samples } => {
                if samples.len() < 2 {
                    return Err(Error::InvalidParameter(
                        "tabulated rate law needs at least 2 samples".into(),
                    ));
                }
                if samples[0] != (0.0, 0.0) {
                    return Err(Error::InvalidParameter(
                        "tabulated rate law must start at (0, 0)".into(),
                    ));
                }
                for w in samples.windows(2) {
                    if !(w[1].0 > w[0].0) || !(w[1].1 > w[0].1) {
                        // Non-monotone tables (negative slope, drop) are rejected.
                        return Err(Error::InvalidParameter(format!(
                            "tabulated rate law must be strictly increasing: {:?} -> {:?}",
                            w[0], w[1]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Upper end of the sampled velocity range for tabulated laws.
    pub fn v_max(&self) -> Option<f64> {
        match self {
            RateLaw::Tabulated { samples } => samples.last().map(|s| s.0),
            _ => None,
        }
    }
}

/// Evaluates `alpha*(v)` for `v >= 0`.
pub fn alpha_star(law: &RateLaw, v: f64) -> Result<f64> {
    if !(v >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha* is defined on [0, inf), got v = {v}"
        )));
    }
    match law {
        RateLaw::Linear { alpha } => Ok(alpha * v),
        RateLaw::Power { k, p } => Ok(k * v.powf(*p)),
        RateLaw::Tabulated { samples } => {
            let (vm, sm) = *samples.last().unwrap();
            if v > vm {
                return Err(Error::OutOfRange(format!(
                    "tabulated rate law sampled up to V = {vm}, got {v}"
                )));
            }
            if v == vm {
                return Ok(sm);
            }
            let i = samples.partition_point(|&(vi, _)| vi <= v) - 1;
            let (v0, s0) = samples[i];
            let (v1, s1) = samples[i + 1];
            Ok(s0 + (s1 - s0) * (v - v0) / (v1 - v0))
        }
    }
}

/// Evaluates `beta*(s)`: zero for `s < 0`, the inverse of `alpha*` for `s >= 0`.
///
/// Closed form for linear/power laws; monotone bisection (relative tolerance
/// 1e-12) for tabulated ones.
pub fn beta_star(law: &RateLaw, s: f64) -> Result<f64> {
    if s < 0.0 {
        return Ok(0.0);
    }
    match law {
        RateLaw::Linear { alpha } => Ok(s / alpha),
        RateLaw::Power { k, p } => Ok((s / k).powf(1.0 / p)),
        RateLaw::Tabulated { samples } => {
            let (vm, sm) = *samples.last().unwrap();
            if s > sm {
                return Err(Error::OutOfRange(format!(
                    "tabulated rate law covers alpha* values up to {sm}, got {s}"
                )));
            }
            let (mut lo, mut hi) = (0.0f64, vm);
            // alpha_star is strictly increasing and continuous on [0, vm].
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if alpha_star(law, mid)? < s {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-12 * hi.max(1e-300) {
                    break;
                }
            }
            Ok(0.5 * (lo + hi))
        }
    }
}

/// Isotropic elastic constants, fracture parameters, and regularizations.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialParams {
    pub lame_lambda: f64,
    pub lame_mu: f64,
    pub plane_mode: PlaneMode,
    /// Fracture energy (critical energy release rate), per unit crack length.
    pub g_c: f64,
    /// Phase-field regularization length.
    pub epsilon: f64,
    pub rate_law: RateLaw,
    /// Friction against a stationary background; 0 disables the relaxed
    /// (parabolic) displacement update.
    #[serde(default)]
    pub friction_alpha_u: f64,
    /// Residual stiffness floor added to `(1-z)^2` so the elasticity operator
    /// stays nondegenerate where z is close to 1.
    #[serde(default = "default_residual_stiffness")]
    pub residual_stiffness: f64,
}

fn default_residual_stiffness() -> f64 {
    1e-6
}

impl MaterialParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lame_mu > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lame_mu must be > 0, got {}",
                self.lame_mu
            )));
        }
        if !(self.lame_lambda + self.lame_mu > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lame_lambda + lame_mu must be > 0, got {}",
                self.lame_lambda + self.lame_mu
            )));
        }
        if !(self.g_c > 0.0) {
            return Err(Error::InvalidParameter(format!("g_c must be > 0, got {}", self.g_c)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if !(self.friction_alpha_u >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "friction_alpha_u must be >= 0, got {}",
                self.friction_alpha_u
            )));
        }
        if !(self.residual_stiffness > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "residual_stiffness must be > 0, got {}",
                self.residual_stiffness
            )));
        }
        self.rate_law.validate()
    }

    /// Constructs from Young's modulus and Poisson ratio; `(E, nu)` are mapped
    /// to the bulk Lame pair, and `plane_mode` selects the 2D reduction.
    pub fn from_young_poisson(
        young: f64,
        poisson: f64,
        plane_mode: PlaneMode,
        g_c: f64,
        epsilon: f64,
        rate_law: RateLaw,
    ) -> Result<Self> {
        if !(young > 0.0) || !(poisson > -1.0 && poisson < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "need E > 0 and nu in (-1, 0.5), got E={young}, nu={poisson}"
            )));
        }
        let mu = young / (2.0 * (1.0 + poisson));
        let lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
        let m = MaterialParams {
            lame_lambda: lambda,
            lame_mu: mu,
            plane_mode,
            g_c,
            epsilon,
            rate_law,
            friction_alpha_u: 0.0,
            residual_stiffness: default_residual_stiffness(),
        };
        m.validate()?;
        Ok(m)
    }

    /// Effective first Lame parameter of the 2D reduction: `lambda` in plane
    /// strain, `2 lambda mu / (lambda + 2 mu)` in plane stress.
    pub fn lambda_2d(&self) -> f64 {
        match self.plane_mode {
            PlaneMode::PlaneStrain => self.lame_lambda,
            PlaneMode::PlaneStress => {
                2.0 * self.lame_lambda * self.lame_mu / (self.lame_lambda + 2.0 * self.lame_mu)
            }
        }
    }

    /// Velocity-dependent fracture energy `G_c*(V) = G_c + alpha*(V)`.
    pub fn g_c_star(&self, v: f64) -> Result<f64> {
        Ok(self.g_c + alpha_star(&self.rate_law, v)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn laws() -> Vec<RateLaw> {
        vec![
            RateLaw::Linear { alpha: 0.1 },
            RateLaw::Linear { alpha: 0.01 },
            RateLaw::Power { k: 2.0, p: 2.0 },
            RateLaw::Power { k: 0.5, p: 0.7 },
            RateLaw::Tabulated {
                samples: vec![(0.0, 0.0), (1.0, 0.3), (2.5, 1.0), (10.0, 2.0)],
            },
        ]
    }

    #[test]
    fn positive_part_examples() {
        assert_eq!(positive_part(-3.5), 0.0);
        assert_eq!(positive_part(0.0), 0.0);
        assert_eq!(positive_part(2.25), 2.25);
    }

    #[test]
    fn complementarity_examples() {
        assert!(check_complementarity(0.0, 5.0, 0.0));
        assert!(check_complementarity(3.0, 0.0, 0.0));
        assert!(!check_complementarity(2.0, 1.0, 0.0));
    }

    #[test]
    fn complementarity_equivalence_random() {
        // Both directions of the positive-part lemma on random and structured
        // pairs; the closed form must agree exactly with the KKT triple.
        let mut rng = ChaCha8Rng::seed_from_u64(0x1a2b);
        for i in 0..100_000 {
            let mut a: f64 = rng.gen_range(-10.0..10.0);
            let mut b: f64 = rng.gen_range(-10.0..10.0);
            match i % 4 {
                0 => a = 0.0,
                1 => b = 0.0,
                2 => {
                    a = a.abs();
                    b = 0.0;
                }
                _ => {}
            }
            let triple = a >= 0.0 && b >= 0.0 && a * b == 0.0;
            assert_eq!(check_complementarity(a, b, 0.0), triple, "a={a}, b={b}");
        }
    }

    #[test]
    fn alpha_star_examples() {
        assert_eq!(alpha_star(&RateLaw::Linear { alpha: 0.1 }, 2.0).unwrap(), 0.2);
        for law in laws() {
            assert_eq!(alpha_star(&law, 0.0).unwrap(), 0.0);
        }
        assert_eq!(alpha_star(&RateLaw::Power { k: 2.0, p: 2.0 }, 3.0).unwrap(), 18.0);
        assert!(alpha_star(&RateLaw::Linear { alpha: 0.1 }, -1.0).is_err());
    }

    #[test]
    fn beta_star_examples() {
        assert_eq!(beta_star(&RateLaw::Linear { alpha: 0.01 }, -1.0).unwrap(), 0.0);
        assert_eq!(beta_star(&RateLaw::Linear { alpha: 0.01 }, 2.0).unwrap(), 200.0);
        assert_eq!(beta_star(&RateLaw::Power { k: 2.0, p: 2.0 }, 18.0).unwrap(), 3.0);
        let tab = RateLaw::Tabulated {
            samples: vec![(0.0, 0.0), (1.0, 0.3), (2.5, 1.0)],
        };
        assert!(beta_star(&tab, 1.5).is_err());
    }

    #[test]
    fn beta_star_inverts_alpha_star() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for law in laws() {
            let v_max = law.v_max().unwrap_or(50.0);
            for _ in 0..200 {
                let v = rng.gen_range(0.0..v_max);
                let s = alpha_star(&law, v).unwrap();
                let back = beta_star(&law, s).unwrap();
                assert!(
                    (back - v).abs() <= 1e-10 * v.max(1.0),
                    "law {law:?}: v={v}, round trip {back}"
                );
            }
        }
    }

    #[test]
    fn alpha_star_strictly_increasing() {
        for law in laws() {
            let v_max = law.v_max().unwrap_or(40.0);
            let n = 400;
            let mut prev = alpha_star(&law, 0.0).unwrap();
            for k in 1..=n {
                let v = v_max * k as f64 / n as f64;
                let s = alpha_star(&law, v).unwrap();
                assert!(s > prev, "law {law:?} not increasing at v={v}");
                prev = s;
            }
        }
    }

    #[test]
    fn rejects_bad_laws() {
        assert!(RateLaw::Linear { alpha: 0.0 }.validate().is_err());
        assert!(RateLaw::Power { k: 1.0, p: 0.0 }.validate().is_err());
        assert!(RateLaw::Tabulated {
            samples: vec![(0.0, 0.0), (1.0, 0.5), (2.0, 0.4)],
        }
        .validate()
        .is_err());
        assert!(RateLaw::Tabulated {
            samples: vec![(0.0, 0.1), (1.0, 0.5)],
        }
        .validate()
        .is_err());
    }

    #[test]
    fn plane_mode_lambda() {
        let mut m = MaterialParams {
            lame_lambda: 1.0,
            lame_mu: 1.0,
            plane_mode: PlaneMode::PlaneStrain,
            g_c: 1.0,
            epsilon: 0.1,
            rate_law: RateLaw::Linear { alpha: 0.1 },
            friction_alpha_u: 0.0,
            residual_stiffness: 1e-6,
        };
        m.validate().unwrap();
        assert_eq!(m.lambda_2d(), 1.0);
        m.plane_mode = PlaneMode::PlaneStress;
        assert!((m.lambda_2d() - 2.0 / 3.0).abs() < 1e-15);
    }
}
