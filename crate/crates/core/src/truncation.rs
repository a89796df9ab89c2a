//! Truncation control: the per-mode series-order bound E_{k,N}, the stopping
//! rule that selects N per mode, and the closed-form L² tail bounds that
//! govern the Fourier mode count M.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::material::{AxialLoad, CylinderGeometry, ElasticMaterial};
use crate::series::build_basis;

/// ln of the upper bound on the sup-norm truncation error E_{k,N} of the four
/// basis solutions at order N for mode k.  Log-space keeps the huge
/// intermediate factors (t_b^{N+2}·e^{t_b²}) representable.
pub fn ln_error_bound(
    k: u32,
    n: u32,
    mat: &ElasticMaterial<f64>,
    geom: &CylinderGeometry<f64>,
) -> f64 {
    assert!(k % 2 == 1 && n >= 3 && n % 2 == 1);
    let kf = k as f64;
    let nf = n as f64;
    let x = std::f64::consts::PI * kf / geom.h;
    let ta = x * geom.a;
    let tb = x * geom.b;
    let (lambda, mu) = (mat.lambda, mat.mu);

    let c1 = 1f64.max(1.0 / tb);
    let c2 = 1f64.max(ta.ln().abs()).max(tb.ln().abs());
    let c3 = x
        .max(mu / (lambda + mu) * x * x.ln())
        .max(2.0 * (lambda + 2.0 * mu) / (lambda + mu) / x * x.ln());
    let prefactor =
        3.0 * (2.0 * lambda + 5.0 * mu) * (lambda + mu).powi(2) / (16.0 * mu.powi(3));
    let poly = (nf + 3.0) * (3.0 * nf.powi(3) + 21.0 * nf.powi(2) + 42.0 * nf + 32.0);

    (c1 * c2 * c3 * prefactor).ln() + (nf + 2.0) * tb.ln() + tb * tb + poly.ln()
        - nf * std::f64::consts::LN_2
        - 2.0 * ln_gamma((nf + 1.0) / 2.0 + 1.0)
}

/// E_{k,N} itself; errors out when the value exceeds the double range (the
/// ratio of the stopping rule may still be fine — use [`ln_error_bound`]).
pub fn error_bound(
    k: u32,
    n: u32,
    mat: &ElasticMaterial<f64>,
    geom: &CylinderGeometry<f64>,
) -> Result<f64> {
    let ln = ln_error_bound(k, n, mat, geom);
    if ln > f64::MAX.ln() {
        return Err(Error::BoundOverflow { k, n });
    }
    Ok(ln.exp())
}

/// Number of ρ samples for the stopping-rule denominator.
pub const DENOM_GRID: usize = 256;

/// Outcome of the per-mode series-order selection.
#[derive(Debug, Clone, Copy)]
pub struct OrderSelection {
    pub n: u32,
    /// E_{k,N} at the selected order.
    pub bound: f64,
    /// The stopping-rule denominator D_N at the selected order.
    pub denominator: f64,
}

/// Smallest odd N ≥ 5 with E_{k,N}/D_N < epsilon_tol, where D_N is the
/// minimum over the four bases of min(max_ρ|Y_N|, max_ρ|Z_N|) on a uniform
/// 256-point ρ-grid over [a, b].
pub fn select_series_order(
    k: u32,
    epsilon_tol: f64,
    mat: &ElasticMaterial<f64>,
    geom: &CylinderGeometry<f64>,
    ceiling: u32,
) -> Result<OrderSelection> {
    if k % 2 == 0 {
        return Err(Error::EvenMode(k));
    }
    let sc = mat.scaled_coefficients();
    let bases: [_; 4] = core::array::from_fn(|j| build_basis(j + 1, ceiling, &sc).unwrap());
    let s = std::f64::consts::PI * k as f64 / geom.h;
    let ln_tol = epsilon_tol.ln();

    let mut n = 5u32;
    while n <= ceiling {
        let mut denom = f64::INFINITY;
        for basis in &bases {
            let (mut max_y, mut max_z) = (0.0f64, 0.0f64);
            for i in 0..DENOM_GRID {
                let rho = geom.a + (geom.b - geom.a) * i as f64 / (DENOM_GRID - 1) as f64;
                let st = basis.eval_truncated(s * rho, n);
                max_y = max_y.max(st.y.abs());
                max_z = max_z.max(st.z.abs());
            }
            denom = denom.min(max_y.min(max_z));
        }
        let ln_bound = ln_error_bound(k, n, mat, geom);
        if denom > 0.0 && ln_bound - denom.ln() < ln_tol {
            return Ok(OrderSelection {
                n,
                bound: ln_bound.exp(),
                denominator: denom,
            });
        }
        n += 2;
    }
    Err(Error::OrderCeiling { k, ceiling })
}

/// The two closed-form L² tail bounds (units m^(5/2)) for the partial sum with
/// M retained odd modes: the u₁ (= u₂) bound decays like M^(−1/2), the u₃
/// bound like M^(−3/2).
pub fn l2_tail_bounds(
    m: u32,
    mat: &ElasticMaterial<f64>,
    geom: &CylinderGeometry<f64>,
    load: &AxialLoad<f64>,
) -> (f64, f64) {
    assert!(m >= 1);
    let pi = std::f64::consts::PI;
    let (a, b, h) = (geom.a, geom.b, geom.h);
    let mf = m as f64;
    let u1 = load.p * b * b / mat.mu * (h * (b - a) / (2.0 * a * pi)).sqrt() / mf.sqrt();
    let u3 = load.p / (mat.mu * a * pi * pi) * (h.powi(3) * b.powi(3) * (b - a) / 24.0).sqrt()
        / mf.powf(1.5);
    (u1, u3)
}

/// Smallest M whose two tail bounds fall below the given targets.
pub fn select_mode_count(
    target_u1: f64,
    target_u3: f64,
    mat: &ElasticMaterial<f64>,
    geom: &CylinderGeometry<f64>,
    load: &AxialLoad<f64>,
) -> u32 {
    assert!(target_u1 > 0.0 && target_u3 > 0.0);
    let (b1, b3) = l2_tail_bounds(1, mat, geom, load);
    // invert the explicit power laws, then fix up rounding with a short walk
    let m1 = (b1 / target_u1).powi(2);
    let m3 = (b3 / target_u3).powf(2.0 / 3.0);
    let mut m = m1.max(m3).max(1.0).ceil() as u32;
    while m > 1 && {
        let (c1, c3) = l2_tail_bounds(m - 1, mat, geom, load);
        c1 <= target_u1 && c3 <= target_u3
    } {
        m -= 1;
    }
    loop {
        let (c1, c3) = l2_tail_bounds(m, mat, geom, load);
        if c1 <= target_u1 && c3 <= target_u3 {
            return m;
        }
        m += 1;
    }
}

/// Per-mode record of the selection loop, serialized into `truncation.json`.
#[derive(Debug, Clone, Serialize)]
pub struct ModeRecord {
    pub k: u32,
    pub n: u32,
    pub bound: f64,
    pub denominator: f64,
    pub condition_estimate: f64,
    pub ill_conditioned_warning: bool,
}

/// Summary of the truncation decisions for a run.
#[derive(Debug, Clone, Serialize)]
pub struct TruncationReport {
    /// Number of retained odd modes (k = 1, 3, …, 2M−1).
    pub m: u32,
    pub epsilon_tol: f64,
    pub modes: Vec<ModeRecord>,
    pub l2_bound_u1: f64,
    pub l2_bound_u3: f64,
    /// The error-bound formula assumes k > 1; it is applied to k = 1 as well.
    pub k1_uses_same_formula: bool,
    pub extended_precision: bool,
    pub notes: Vec<String>,
}
