//! Batch pipeline: truncation selection → parallel mode solves → field
//! sampling → CSV/JSON artifacts.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ModeSelect, RunSpec};
use crate::error::{Error, Result};
use crate::field::{self, ExtremaReport};
use crate::material::{AxialLoad, CylinderGeometry, ElasticMaterial};
use crate::mode::{solve_mode, ModeSolution, COND_WARN};
use crate::oracle;
use crate::scalar::Scalar;
use crate::truncation::{
    l2_tail_bounds, select_mode_count, select_series_order, ModeRecord, OrderSelection,
    TruncationReport,
};

/// Mesh intervals for the optional oracle pass.
pub const VERIFY_MESH: usize = 4000;
/// Modes checked by the oracle pass.
pub const VERIFY_MODES: [u32; 3] = [1, 3, 5];
/// Acceptable sup-norm relative deviation from the oracle.
pub const VERIFY_TOL: f64 = 1e-6;

/// One oracle comparison, echoed in the JSON summary.
#[derive(Debug, Clone, Serialize)]
pub struct OracleCheck {
    pub k: u32,
    pub deviation: f64,
    pub n_mesh: usize,
    pub tolerance: f64,
}

/// Axial-force diagnostic at three interior sections.
#[derive(Debug, Clone, Serialize)]
pub struct Equilibrium {
    pub z_m: [f64; 3],
    pub force_n: [f64; 3],
    pub applied_n: f64,
}

/// Everything written to `truncation.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub p_pa: f64,
    pub lambda_pa: f64,
    pub mu_pa: f64,
    pub truncation: TruncationReport,
    pub equilibrium: Equilibrium,
    pub verification: Option<Vec<OracleCheck>>,
    /// Full input echo: a run is reproducible from this block alone.
    pub config: RunSpec,
}

/// Result of a successful run.
pub struct RunArtifacts {
    pub summary: Summary,
    pub extrema: ExtremaReport,
    pub field_csv: PathBuf,
    pub extrema_json: PathBuf,
    pub truncation_json: PathBuf,
}

/// Configures the global thread pool from `SOLVER_THREADS` (first call wins;
/// later calls are no-ops, matching rayon's global-pool semantics).
pub fn init_threads() {
    if let Ok(v) = std::env::var("SOLVER_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn mode_count(spec: &RunSpec, mat: &ElasticMaterial<f64>, geom: &CylinderGeometry<f64>,
              load: &AxialLoad<f64>) -> u32 {
    match spec.modes {
        ModeSelect::Explicit(m) => m,
        ModeSelect::Targets { l2_u1, l2_u3 } => select_mode_count(l2_u1, l2_u3, mat, geom, load),
    }
}

struct Solved<S> {
    modes: Vec<ModeSolution<S>>,
    records: Vec<ModeRecord>,
}

fn solve_all<S: Scalar>(
    spec: &RunSpec,
    selections: &[(u32, OrderSelection)],
) -> Result<Solved<S>> {
    let mat = spec.material::<S>()?;
    let geom = spec.geometry::<S>()?;
    let load = spec.axial_load::<S>(&geom)?;
    let modes: Result<Vec<ModeSolution<S>>> = selections
        .par_iter()
        .map(|&(k, sel)| solve_mode(k, &mat, &geom, &load, sel.n, sel.bound))
        .collect();
    let modes = modes?;
    let records = selections
        .iter()
        .zip(&modes)
        .map(|(&(k, sel), mode)| ModeRecord {
            k,
            n: sel.n,
            bound: sel.bound,
            denominator: sel.denominator,
            condition_estimate: mode.condition,
            ill_conditioned_warning: mode.condition > COND_WARN,
        })
        .collect();
    Ok(Solved { modes, records })
}

fn finish<S: Scalar>(
    spec: &RunSpec,
    solved: Solved<S>,
    l2: (f64, f64),
    notes: Vec<String>,
) -> Result<(Summary, ExtremaReport, field::FieldTable)> {
    let mat = spec.material::<f64>()?;
    let geom = spec.geometry::<f64>()?;
    let load = spec.axial_load::<f64>(&geom)?;

    let table = field::grid_sample(&solved.modes, &mat, &geom, spec.grid_nrho, spec.grid_nz)?;
    let extrema = field::extrema_report(&table);

    let z_sections = [-geom.h / 4.0, 0.0, geom.h / 4.0];
    let mut force = [0.0f64; 3];
    for (f, &z) in force.iter_mut().zip(&z_sections) {
        *f = field::axial_force(&solved.modes, &mat, &geom, z)?;
    }

    let verification = if spec.verify {
        let mut checks = Vec::new();
        for k in VERIFY_MODES {
            let idx = (k as usize - 1) / 2;
            let Some(mode) = solved.modes.get(idx) else { continue };
            let coll = oracle::richardson_solve_mode(k, &mat, &geom, &load, VERIFY_MESH)?;
            let deviation = oracle::compare_mode(mode, &coll)?;
            checks.push(OracleCheck {
                k,
                deviation,
                n_mesh: VERIFY_MESH,
                tolerance: VERIFY_TOL,
            });
        }
        Some(checks)
    } else {
        None
    };

    let m = solved.modes.len() as u32;
    let summary = Summary {
        p_pa: load.p,
        lambda_pa: mat.lambda,
        mu_pa: mat.mu,
        truncation: TruncationReport {
            m,
            epsilon_tol: spec.epsilon_tol,
            modes: solved.records,
            l2_bound_u1: l2.0,
            l2_bound_u3: l2.1,
            k1_uses_same_formula: true,
            extended_precision: S::EXTENDED,
            notes,
        },
        equilibrium: Equilibrium {
            z_m: z_sections,
            force_n: force,
            applied_n: load.total,
        },
        verification,
        config: spec.clone(),
    };
    Ok((summary, extrema, table))
}

/// Executes the full pipeline and writes `field.csv`, `extrema.json`, and
/// `truncation.json` into the output directory.
pub fn run(spec: &RunSpec) -> Result<RunArtifacts> {
    let mat = spec.material::<f64>()?;
    let geom = spec.geometry::<f64>()?;
    let load = spec.axial_load::<f64>(&geom)?;

    let m = mode_count(spec, &mat, &geom, &load);
    if m == 0 {
        return Err(Error::Config("mode count resolved to zero".into()));
    }
    let l2 = l2_tail_bounds(m, &mat, &geom, &load);

    // per-mode series orders (selection is a double-precision bound heuristic
    // regardless of the solve precision)
    let selections: Result<Vec<(u32, OrderSelection)>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let k = 2 * i + 1;
            let sel = select_series_order(k, spec.epsilon_tol, &mat, &geom, spec.n_ceiling)?;
            Ok((k, sel))
        })
        .collect();
    let selections = selections?;
    let max_n = selections.iter().map(|&(_, s)| s.n).max().unwrap();
    let notes = vec![format!(
        "stopping rule epsilon_tol = {} applied per mode; selected N ranges {}..{}",
        spec.epsilon_tol,
        selections.iter().map(|&(_, s)| s.n).min().unwrap(),
        max_n
    )];

    let (summary, extrema, table) = if spec.extended_precision {
        let solved = solve_all::<crate::Extended>(spec, &selections)?;
        finish(spec, solved, l2, notes)?
    } else {
        let solved = solve_all::<f64>(spec, &selections)?;
        finish(spec, solved, l2, notes)?
    };

    if let Some(checks) = &summary.verification {
        for c in checks {
            if !(c.deviation <= c.tolerance) {
                return Err(Error::VerificationFailed {
                    k: c.k,
                    dev: c.deviation,
                    tol: c.tolerance,
                });
            }
        }
    }

    std::fs::create_dir_all(&spec.output_dir)?;
    let field_csv = spec.output_dir.join("field.csv");
    let extrema_json = spec.output_dir.join("extrema.json");
    let truncation_json = spec.output_dir.join("truncation.json");

    let mut w = BufWriter::new(File::create(&field_csv)?);
    table.write_csv(&mut w)?;
    w.flush()?;
    serde_json::to_writer_pretty(BufWriter::new(File::create(&extrema_json)?), &extrema)?;
    serde_json::to_writer_pretty(BufWriter::new(File::create(&truncation_json)?), &summary)?;

    Ok(RunArtifacts {
        summary,
        extrema,
        field_csv,
        extrema_json,
        truncation_json,
    })
}
