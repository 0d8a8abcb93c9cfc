//! Network parameters, power-controlled interference arithmetic and the
//! `R_c = 1, P = 1` normalization.
//!
//! Every UE inverts its pathloss exactly, so a UE at `x` served at `c` with
//! received target `P_T` produces `P_T·|x − c|^γ·h / |x − v|^γ` at a victim
//! base station `v`. The propagation constant cancels from every SIR
//! expression and never enters the numerics.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::geometry::{HexGrid, IntensityProfile, Point};

/// All physical and statistical parameters of the two-tier network.
///
/// Lengths share one unit (metres in configuration files), densities are
/// per squared length unit and powers share one linear unit (mW).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// Macrocell radius `R_c` (hexagon circumradius).
    #[serde(rename = "R_c")]
    pub cell_radius: f64,
    /// Femtocell radius `R`.
    #[serde(rename = "R")]
    pub femto_radius: f64,
    /// Macro UE density `λ`.
    pub lambda: f64,
    /// Femto base station density `μ`.
    pub mu: f64,
    /// Local femto UE intensity around each femto base station.
    pub nu: IntensityProfile,
    /// Received target power of macro-served UEs.
    #[serde(rename = "P")]
    pub p: f64,
    /// Received target power of femto-served local UEs.
    #[serde(rename = "Q")]
    pub q: f64,
    /// Power enhancement of handed-off UEs (`P′ = ρP`).
    pub rho: f64,
    /// Pathloss exponent.
    pub gamma: f64,
    /// SIR threshold.
    #[serde(rename = "T")]
    pub threshold: f64,
    /// Pathloss constant. Accepted for completeness; it cancels everywhere.
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub pathloss_constant: Option<f64>,
}

/// A configuration rescaled to `R_c = 1` and `P = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedConfig {
    pub config: NetworkConfig,
    /// The original `R_c`.
    pub length_scale: f64,
    /// The original `P`.
    pub power_scale: f64,
}

/// Mean femto UEs (`ν̄`) and open-access-eligible macro UEs (`λ̄ = πR²λ`)
/// per femtocell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    pub nu_bar: f64,
    pub lambda_bar: f64,
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

impl NetworkConfig {
    /// The reference two-tier scenario: `R_c = 500 m`, `R = 50 m`, `γ = 3`,
    /// `T = 0.1`, `ν = 80/km²`, `P = −60 dBm`, `Q = P′ = −54 dBm` and
    /// `λ = μ = 4/km²`.
    pub fn reference() -> Self {
        let p = dbm_to_mw(-60.0);
        let q = dbm_to_mw(-54.0);
        NetworkConfig {
            cell_radius: 500.0,
            femto_radius: 50.0,
            lambda: 4e-6,
            mu: 4e-6,
            nu: IntensityProfile::constant(80e-6, 50.0).expect("valid profile"),
            p,
            q,
            rho: q / p,
            gamma: 3.0,
            threshold: 0.1,
            pathloss_constant: None,
        }
    }

    /// Checks every invariant; returns advisory warnings on success.
    pub fn validate(&self) -> Result<Vec<String>> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if !(self.gamma.is_finite() && self.gamma > 2.0) {
            return Err(Error::Domain(format!(
                "pathloss exponent must exceed 2, got {}",
                self.gamma
            )));
        }
        if !finite_pos(self.cell_radius) {
            return bad(format!("R_c must be positive, got {}", self.cell_radius));
        }
        if !finite_pos(self.femto_radius) || self.femto_radius >= self.cell_radius {
            return bad(format!(
                "femtocell radius must satisfy 0 < R < R_c, got R = {} with R_c = {}",
                self.femto_radius, self.cell_radius
            ));
        }
        for (name, v) in [("lambda", self.lambda), ("mu", self.mu)] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be a non-negative density, got {v}"));
            }
        }
        for (name, v) in [("P", self.p), ("Q", self.q), ("rho", self.rho), ("T", self.threshold)] {
            if !finite_pos(v) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        let outer = self.nu.outer_radius();
        if (outer - self.femto_radius).abs() > 1e-9 * self.femto_radius {
            return bad(format!(
                "intensity profile must end at the femtocell radius {} (ends at {outer})",
                self.femto_radius
            ));
        }
        let mut warnings = Vec::new();
        if self.femto_radius >= 0.5 * self.cell_radius {
            warnings.push(format!(
                "femtocell radius is {:.2} of the macrocell radius; the model assumes R ≪ R_c",
                self.femto_radius / self.cell_radius
            ));
        }
        Ok(warnings)
    }

    pub fn grid(&self) -> HexGrid {
        HexGrid::new(self.cell_radius).expect("validated cell radius")
    }

    /// Laplace variable of the macro-level outage, `T/P`.
    pub fn s_macro(&self) -> f64 {
        self.threshold / self.p
    }

    /// Laplace variable of the femto-level outage, `T′ = T/Q`.
    pub fn s_femto(&self) -> f64 {
        self.threshold / self.q
    }

    pub fn derived(&self) -> DerivedQuantities {
        derived_quantities(self)
    }

    /// Parses the JSON configuration format.
    ///
    /// Keys mirror the serialized field names. Powers may instead be given
    /// in dBm (`P_dbm`, `Q_dbm`), `rho` in dB (`rho_db`), densities per km²
    /// (`lambda_per_km2`, `mu_per_km2`, `nu_per_km2`). `nu` is either a
    /// constant density or `{"steps": [[radius, density], ...]}`. When `rho`
    /// is omitted it defaults to `Q/P`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidConfig("configuration must be a JSON object".into()))?;
        Self::from_json_map(obj)
    }

    pub fn from_json_map(obj: &Map<String, Value>) -> Result<Self> {
        const KNOWN: &[&str] = &[
            "R_c", "R", "lambda", "lambda_per_km2", "mu", "mu_per_km2", "nu", "nu_per_km2",
            "P", "P_dbm", "Q", "Q_dbm", "rho", "rho_db", "gamma", "T", "T_db", "A",
        ];
        if let Some(k) = obj.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            return Err(Error::InvalidConfig(format!("unknown configuration key `{k}`")));
        }
        let num = |key: &str| -> Result<Option<f64>> {
            match obj.get(key) {
                None => Ok(None),
                Some(v) => v
                    .as_f64()
                    .map(Some)
                    .ok_or_else(|| Error::InvalidConfig(format!("`{key}` must be a number"))),
            }
        };
        let either = |plain: &str, alt: &str, conv: fn(f64) -> f64| -> Result<Option<f64>> {
            match (num(plain)?, num(alt)?) {
                (Some(_), Some(_)) => Err(Error::InvalidConfig(format!(
                    "give only one of `{plain}` and `{alt}`"
                ))),
                (Some(v), None) => Ok(Some(v)),
                (None, Some(v)) => Ok(Some(conv(v))),
                (None, None) => Ok(None),
            }
        };
        let required = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| Error::InvalidConfig(format!("missing `{key}`")))
        };
        let per_km2 = |v: f64| v * 1e-6;

        let cell_radius = required(num("R_c")?, "R_c")?;
        let femto_radius = required(num("R")?, "R")?;
        let lambda = required(either("lambda", "lambda_per_km2", per_km2)?, "lambda")?;
        let mu = required(either("mu", "mu_per_km2", per_km2)?, "mu")?;
        let p = required(either("P", "P_dbm", dbm_to_mw)?, "P")?;
        let q = required(either("Q", "Q_dbm", dbm_to_mw)?, "Q")?;
        let rho = either("rho", "rho_db", db_to_linear)?.unwrap_or(q / p);
        let gamma = required(num("gamma")?, "gamma")?;
        let threshold = required(either("T", "T_db", db_to_linear)?, "T")?;
        let pathloss_constant = num("A")?;

        let nu = match (obj.get("nu"), num("nu_per_km2")?) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfig("give only one of `nu` and `nu_per_km2`".into()))
            }
            (None, Some(v)) => IntensityProfile::constant(v * 1e-6, femto_radius)?,
            (Some(Value::Number(n)), None) => {
                IntensityProfile::constant(n.as_f64().unwrap_or(f64::NAN), femto_radius)?
            }
            (Some(v @ Value::Object(_)), None) => serde_json::from_value(v.clone())
                .map_err(|e| Error::InvalidConfig(format!("`nu`: {e}")))
                .and_then(|p: IntensityProfile| IntensityProfile::new(p.steps().to_vec()))?,
            (Some(_), None) => {
                return Err(Error::InvalidConfig(
                    "`nu` must be a number or {\"steps\": [[radius, density], ...]}".into(),
                ))
            }
            (None, None) => return Err(Error::InvalidConfig("missing `nu`".into())),
        };

        let cfg = NetworkConfig {
            cell_radius,
            femto_radius,
            lambda,
            mu,
            nu,
            p,
            q,
            rho,
            gamma,
            threshold,
            pathloss_constant,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Rescales lengths by `1/R_c` and powers by `1/P`.
pub fn normalize(cfg: &NetworkConfig) -> NormalizedConfig {
    let l = cfg.cell_radius;
    let pw = cfg.p;
    let config = NetworkConfig {
        cell_radius: 1.0,
        femto_radius: cfg.femto_radius / l,
        lambda: cfg.lambda * l * l,
        mu: cfg.mu * l * l,
        nu: cfg.nu.rescaled(1.0 / l),
        p: 1.0,
        q: cfg.q / pw,
        rho: cfg.rho,
        gamma: cfg.gamma,
        threshold: cfg.threshold,
        pathloss_constant: cfg.pathloss_constant,
    };
    NormalizedConfig { config, length_scale: l, power_scale: pw }
}

/// Inverse of [`normalize`].
pub fn denormalize(n: &NormalizedConfig) -> NetworkConfig {
    let l = n.length_scale;
    let pw = n.power_scale;
    let c = &n.config;
    NetworkConfig {
        cell_radius: c.cell_radius * l,
        femto_radius: c.femto_radius * l,
        lambda: c.lambda / (l * l),
        mu: c.mu / (l * l),
        nu: c.nu.rescaled(l),
        p: c.p * pw,
        q: c.q * pw,
        rho: c.rho,
        gamma: c.gamma,
        threshold: c.threshold,
        pathloss_constant: c.pathloss_constant,
    }
}

/// Received interference at `victim` from a UE at `tx` power-controlled to
/// `target_power` at `served_at`, under fading `h`.
pub fn interference_term(
    victim: Point,
    tx: Point,
    served_at: Point,
    target_power: f64,
    h: f64,
    gamma: f64,
) -> Result<f64> {
    let d_victim2 = tx.dist2(victim);
    if d_victim2 == 0.0 {
        return Err(Error::DegenerateGeometry);
    }
    let d_serve2 = tx.dist2(served_at);
    Ok(target_power * h * (d_serve2 / d_victim2).powf(0.5 * gamma))
}

/// A unit-mean exponential (Rayleigh power) fading sample.
pub fn draw_fading<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

pub fn derived_quantities(cfg: &NetworkConfig) -> DerivedQuantities {
    DerivedQuantities {
        nu_bar: cfg.nu.total(),
        lambda_bar: PI * cfg.femto_radius * cfg.femto_radius * cfg.lambda,
    }
}
