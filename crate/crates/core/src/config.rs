//! Flat key–value run configuration (`key = value`, `#` comments) and the
//! validated `RunSpec` the pipeline consumes.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::material::{AxialLoad, CylinderGeometry, ElasticMaterial};
use crate::scalar::Scalar;

/// How the axial load is given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LoadSpec {
    /// Total axial force in kN.
    TotalKn(f64),
    /// Distributed pressure in MPa.
    PressureMpa(f64),
}

/// How the number of Fourier modes is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ModeSelect {
    /// Explicit mode count M (modes k = 1, 3, …, 2M−1).
    Explicit(u32),
    /// Derive M from the two L² tail-bound targets (m^(5/2)).
    Targets { l2_u1: f64, l2_u3: f64 },
}

/// Validated run parameters, in the units of the config file.
#[derive(Debug, Clone, Serialize)]
pub struct RunSpec {
    pub e_mpa: f64,
    pub nu: f64,
    pub h_m: f64,
    /// Inner radius (m), from `diameter_inner_mm`.
    pub a_m: f64,
    /// Outer radius (m), from `diameter_outer_mm`.
    pub b_m: f64,
    /// Load-annulus outer radius (m), from `diameter_load_mm`.
    pub eps_m: f64,
    pub load: LoadSpec,
    pub epsilon_tol: f64,
    pub modes: ModeSelect,
    pub grid_nrho: usize,
    pub grid_nz: usize,
    pub output_dir: PathBuf,
    pub extended_precision: bool,
    pub verify: bool,
    pub n_ceiling: u32,
}

impl RunSpec {
    pub fn material<S: Scalar>(&self) -> Result<ElasticMaterial<S>> {
        ElasticMaterial::from_engineering(S::of_f64(self.e_mpa * 1e6), S::of_f64(self.nu))
    }

    pub fn geometry<S: Scalar>(&self) -> Result<CylinderGeometry<S>> {
        CylinderGeometry::new(
            S::of_f64(self.a_m),
            S::of_f64(self.b_m),
            S::of_f64(self.h_m),
            S::of_f64(self.eps_m),
        )
    }

    pub fn axial_load<S: Scalar>(&self, geom: &CylinderGeometry<S>) -> Result<AxialLoad<S>> {
        match self.load {
            LoadSpec::TotalKn(p) => AxialLoad::from_total(S::of_f64(p * 1e3), geom),
            LoadSpec::PressureMpa(p) => AxialLoad::from_pressure(S::of_f64(p * 1e6), geom),
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, raw: &str, line: usize) -> Result<T> {
    raw.parse().map_err(|_| {
        Error::Config(format!("line {line}: cannot parse value `{raw}` for key `{key}`"))
    })
}

fn parse_bool(key: &str, raw: &str, line: usize) -> Result<bool> {
    match raw {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!(
            "line {line}: key `{key}` expects a boolean, got `{raw}`"
        ))),
    }
}

const KNOWN_KEYS: &[&str] = &[
    "E_MPa",
    "nu",
    "h_m",
    "diameter_inner_mm",
    "diameter_outer_mm",
    "diameter_load_mm",
    "P_kN",
    "p_MPa",
    "epsilon_tol",
    "modes_M",
    "target_l2_u1",
    "target_l2_u3",
    "grid_nrho",
    "grid_nz",
    "output_dir",
    "extended_precision",
    "verify",
    "N_ceiling",
];

/// Parses and validates a config file.
pub fn parse_config(path: &Path) -> Result<RunSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text)
}

/// Parses the config text (exposed for tests).
pub fn parse_config_str(text: &str) -> Result<RunSpec> {
    let mut kv: HashMap<&str, (&str, usize)> = HashMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {lineno}: expected `key = value`, got `{line}`"
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::Config(format!("line {lineno}: unknown key `{key}`")));
        }
        if kv.insert(key, (value, lineno)).is_some() {
            return Err(Error::Config(format!("line {lineno}: duplicate key `{key}`")));
        }
    }

    let req = |key: &'static str| -> Result<(&str, usize)> {
        kv.get(key)
            .copied()
            .ok_or_else(|| Error::Config(format!("missing required key `{key}`")))
    };
    let (v, l) = req("E_MPa")?;
    let e_mpa: f64 = parse_value("E_MPa", v, l)?;
    let (v, l) = req("nu")?;
    let nu: f64 = parse_value("nu", v, l)?;
    let (v, l) = req("h_m")?;
    let h_m: f64 = parse_value("h_m", v, l)?;
    let (v, l) = req("diameter_inner_mm")?;
    let a_m = parse_value::<f64>("diameter_inner_mm", v, l)? / 2.0 * 1e-3;
    let (v, l) = req("diameter_outer_mm")?;
    let b_m = parse_value::<f64>("diameter_outer_mm", v, l)? / 2.0 * 1e-3;
    let (v, l) = req("diameter_load_mm")?;
    let eps_m = parse_value::<f64>("diameter_load_mm", v, l)? / 2.0 * 1e-3;

    let load = match (kv.get("P_kN"), kv.get("p_MPa")) {
        (Some(&(v, l)), None) => LoadSpec::TotalKn(parse_value("P_kN", v, l)?),
        (None, Some(&(v, l))) => LoadSpec::PressureMpa(parse_value("p_MPa", v, l)?),
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "both `P_kN` and `p_MPa` given; the load is ambiguous".into(),
            ))
        }
        (None, None) => {
            return Err(Error::Config(
                "missing load: give exactly one of `P_kN`, `p_MPa`".into(),
            ))
        }
    };

    let modes = match (kv.get("modes_M"), kv.get("target_l2_u1"), kv.get("target_l2_u3")) {
        (Some(&(v, l)), None, None) => ModeSelect::Explicit(parse_value("modes_M", v, l)?),
        (None, Some(&(v1, l1)), Some(&(v3, l3))) => ModeSelect::Targets {
            l2_u1: parse_value("target_l2_u1", v1, l1)?,
            l2_u3: parse_value("target_l2_u3", v3, l3)?,
        },
        (Some(_), _, _) => {
            return Err(Error::Config(
                "give either `modes_M` or the two `target_l2_*` keys, not both".into(),
            ))
        }
        _ => {
            return Err(Error::Config(
                "mode count underspecified: give `modes_M` or both `target_l2_u1` and \
                 `target_l2_u3`"
                    .into(),
            ))
        }
    };

    let opt_f64 = |key: &'static str, default: f64| -> Result<f64> {
        match kv.get(key) {
            Some(&(v, l)) => parse_value(key, v, l),
            None => Ok(default),
        }
    };
    let epsilon_tol = opt_f64("epsilon_tol", 1e-3)?;
    let opt_usize = |key: &'static str, default: usize| -> Result<usize> {
        match kv.get(key) {
            Some(&(v, l)) => parse_value(key, v, l),
            None => Ok(default),
        }
    };
    let grid_nrho = opt_usize("grid_nrho", 200)?;
    let grid_nz = opt_usize("grid_nz", 600)?;
    let output_dir = PathBuf::from(kv.get("output_dir").map_or("out", |&(v, _)| v));
    let extended_precision = match kv.get("extended_precision") {
        Some(&(v, l)) => parse_bool("extended_precision", v, l)?,
        None => false,
    };
    let verify = match kv.get("verify") {
        Some(&(v, l)) => parse_bool("verify", v, l)?,
        None => false,
    };
    let n_ceiling = match kv.get("N_ceiling") {
        Some(&(v, l)) => parse_value("N_ceiling", v, l)?,
        None => 401u32,
    };

    let spec = RunSpec {
        e_mpa,
        nu,
        h_m,
        a_m,
        b_m,
        eps_m,
        load,
        epsilon_tol,
        modes,
        grid_nrho,
        grid_nz,
        output_dir,
        extended_precision,
        verify,
        n_ceiling,
    };
    validate(&spec)?;
    Ok(spec)
}

fn validate(spec: &RunSpec) -> Result<()> {
    // the typed constructors enforce the physical invariants
    spec.material::<f64>()?;
    let geom = spec.geometry::<f64>()?;
    spec.axial_load::<f64>(&geom)?;
    if spec.epsilon_tol <= 0.0 || spec.epsilon_tol >= 1.0 {
        return Err(Error::Config(format!(
            "epsilon_tol must lie in (0, 1), got {}",
            spec.epsilon_tol
        )));
    }
    if let ModeSelect::Explicit(0) = spec.modes {
        return Err(Error::Config("modes_M must be at least 1".into()));
    }
    if let ModeSelect::Targets { l2_u1, l2_u3 } = spec.modes {
        if l2_u1 <= 0.0 || l2_u3 <= 0.0 {
            return Err(Error::Config("L2 targets must be positive".into()));
        }
    }
    if spec.grid_nrho < 2 || spec.grid_nz < 2 {
        return Err(Error::Config(format!(
            "grid must be at least 2x2, got {}x{}",
            spec.grid_nrho, spec.grid_nz
        )));
    }
    if spec.n_ceiling < 5 || spec.n_ceiling % 2 == 0 {
        return Err(Error::Config(format!(
            "N_ceiling must be odd and >= 5, got {}",
            spec.n_ceiling
        )));
    }
    Ok(())
}
