//! Material constants, geometry, load data and parameter conversions.
//!
//! Everything downstream works in SI units (m, N, Pa); unit conversion happens
//! once, at config ingest.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Isotropic linear-elastic material: engineering constants plus the derived
/// Lamé pair.
#[derive(Debug, Clone, Copy)]
pub struct ElasticMaterial<S> {
    /// Young modulus (Pa).
    pub e: S,
    /// Poisson ratio.
    pub nu: S,
    /// First Lamé constant (Pa).
    pub lambda: S,
    /// Shear modulus (Pa).
    pub mu: S,
}

impl<S: Scalar> ElasticMaterial<S> {
    /// λ = Eν/((1+ν)(1−2ν)), μ = E/(2(1+ν)).
    ///
    /// Requires E > 0 and ν strictly inside (−1, 0.5); anything else is a
    /// nonphysical material.
    pub fn from_engineering(e: S, nu: S) -> Result<Self> {
        let half = S::of_f64(0.5);
        if !(e > S::zero()) || !(nu > -S::one() && nu < half) {
            return Err(Error::Material {
                e: e.as_f64(),
                nu: nu.as_f64(),
            });
        }
        let one = S::one();
        let two = S::of_f64(2.0);
        let lambda = e * nu / ((one + nu) * (one - two * nu));
        let mu = e / (two * (one + nu));
        Ok(Self { e, nu, lambda, mu })
    }

    /// The four dimensionless coefficients of the scaled radial ODE system.
    pub fn scaled_coefficients(&self) -> ScaledCoefficients<S> {
        let lp2m = self.lambda + S::of_f64(2.0) * self.mu;
        let lpm = self.lambda + self.mu;
        ScaledCoefficients {
            alpha: self.mu / lp2m,
            beta: lpm / lp2m,
            gamma: lp2m / self.mu,
            delta: lpm / self.mu,
        }
    }
}

/// Hollow cylinder: annulus a < ρ < b extruded over −h/2 < z < h/2; the end
/// faces carry the load on the sub-annulus a ≤ ρ < eps.
#[derive(Debug, Clone, Copy)]
pub struct CylinderGeometry<S> {
    /// Inner radius (m).
    pub a: S,
    /// Outer radius (m).
    pub b: S,
    /// Height (m).
    pub h: S,
    /// Outer radius of the loaded annulus (m).
    pub eps: S,
}

impl<S: Scalar> CylinderGeometry<S> {
    pub fn new(a: S, b: S, h: S, eps: S) -> Result<Self> {
        if !(S::zero() < a && a < eps && eps < b && h > S::zero()) {
            return Err(Error::Geometry {
                a: a.as_f64(),
                eps: eps.as_f64(),
                b: b.as_f64(),
                h: h.as_f64(),
            });
        }
        Ok(Self { a, b, h, eps })
    }
}

/// Axial end-face load: total force and the equivalent distributed pressure on
/// the loaded annulus.
#[derive(Debug, Clone, Copy)]
pub struct AxialLoad<S> {
    /// Total axial force (N).
    pub total: S,
    /// Distributed pressure p = P/(π(eps²−a²)) (Pa).
    pub p: S,
}

impl<S: Scalar> AxialLoad<S> {
    pub fn from_total(total: S, geom: &CylinderGeometry<S>) -> Result<Self> {
        let p = total / (S::PI() * (geom.eps * geom.eps - geom.a * geom.a));
        Self::check(p)?;
        Ok(Self { total, p })
    }

    pub fn from_pressure(p: S, geom: &CylinderGeometry<S>) -> Result<Self> {
        Self::check(p)?;
        let total = p * S::PI() * (geom.eps * geom.eps - geom.a * geom.a);
        Ok(Self { total, p })
    }

    fn check(p: S) -> Result<()> {
        if p < S::zero() {
            return Err(Error::NegativePressure(p.as_f64()));
        }
        Ok(())
    }
}

/// Dimensionless coefficients of the scaled homogeneous system:
/// α̃ = μ/(λ+2μ), β̃ = (λ+μ)/(λ+2μ), γ̃ = (λ+2μ)/μ, δ̃ = (λ+μ)/μ.
#[derive(Debug, Clone, Copy)]
pub struct ScaledCoefficients<S> {
    pub alpha: S,
    pub beta: S,
    pub gamma: S,
    pub delta: S,
}
