//! Per-mode boundary value problem: assembles the 4×4 boundary system for the
//! constants C₁..C₄ and packages the complete mode solution
//! Y_k = Σ C_j Y^j + Ȳ (same for Z).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::qr_solve4;
use crate::material::{AxialLoad, CylinderGeometry, ElasticMaterial};
use crate::particular::{ForcingSpec, ParticularEvaluator};
use crate::scalar::Scalar;
use crate::series::{build_basis, unscale, BasisSolution, StateVector};

/// Condition estimate above which a warning is recorded.
pub const COND_WARN: f64 = 1e12;
/// Condition estimate above which plain double precision refuses to proceed.
pub const COND_HARD: f64 = 1e15;

/// Complete solution of one odd Fourier mode.
pub struct ModeSolution<S> {
    pub k: u32,
    /// Boundary constants C₁..C₄.
    pub c: [S; 4],
    pub bases: Arc<[BasisSolution<S>; 4]>,
    pub particular: ParticularEvaluator<S>,
    /// Series order the bases were built with.
    pub n: u32,
    /// Truncation-error bound E_{k,N} for that order.
    pub bound: f64,
    /// Condition estimate of the (equilibrated) boundary matrix.
    pub condition: f64,
    geom: CylinderGeometry<S>,
}

/// The two boundary functionals of the radial BVP applied to a state at ρ:
/// row 1 is the radial-traction condition (λ+2μ)Y′ + (λ/ρ)Y + λ(πk/h)Z,
/// row 2 the shear condition Z′ − (πk/h)Y.
pub fn bc_rows<S: Scalar>(
    state: &StateVector<S>,
    rho: S,
    k: u32,
    mat: &ElasticMaterial<S>,
    h: S,
) -> [S; 2] {
    let s = S::PI() * S::of_usize(k as usize) / h;
    let lp2m = mat.lambda + S::of_f64(2.0) * mat.mu;
    [
        lp2m * state.dy + mat.lambda / rho * state.y + mat.lambda * s * state.z,
        state.dz - s * state.y,
    ]
}

/// Boundary matrix A: column j holds the two functionals of basis j at ρ = a
/// (rows 1, 2) and at ρ = b (rows 3, 4).
pub fn boundary_matrix<S: Scalar>(
    bases: &[BasisSolution<S>; 4],
    geom: &CylinderGeometry<S>,
    mat: &ElasticMaterial<S>,
    k: u32,
) -> [[S; 4]; 4] {
    let s = S::PI() * S::of_usize(k as usize) / geom.h;
    let mut a = [[S::zero(); 4]; 4];
    for (j, basis) in bases.iter().enumerate() {
        let st_a = unscale(basis.eval(s * geom.a), k, geom.h);
        let st_b = unscale(basis.eval(s * geom.b), k, geom.h);
        let ra = bc_rows(&st_a, geom.a, k, mat, geom.h);
        let rb = bc_rows(&st_b, geom.b, k, mat, geom.h);
        a[0][j] = ra[0];
        a[1][j] = ra[1];
        a[2][j] = rb[0];
        a[3][j] = rb[1];
    }
    a
}

/// Solves mode k at series order N.
pub fn solve_mode<S: Scalar>(
    k: u32,
    mat: &ElasticMaterial<S>,
    geom: &CylinderGeometry<S>,
    load: &AxialLoad<S>,
    n: u32,
    bound: f64,
) -> Result<ModeSolution<S>> {
    if k % 2 == 0 {
        return Err(Error::EvenMode(k));
    }
    let sc = mat.scaled_coefficients();
    let bases: Arc<[BasisSolution<S>; 4]> =
        Arc::new(core::array::from_fn(|j| build_basis(j + 1, n, &sc).expect("validated order")));
    let forcing = ForcingSpec {
        k,
        p: load.p,
        a: geom.a,
        eps: geom.eps,
        h: geom.h,
        mu: mat.mu,
    };
    let particular = ParticularEvaluator::build(bases.clone(), forcing, geom)?;

    let a_mat = boundary_matrix(&bases, geom, mat, k);
    let part_a = particular.state(geom.a)?;
    let part_b = particular.state(geom.b)?;
    let ra = bc_rows(&part_a, geom.a, k, mat, geom.h);
    let rb = bc_rows(&part_b, geom.b, k, mat, geom.h);
    let rhs = [-ra[0], -ra[1], -rb[0], -rb[1]];

    let sol = qr_solve4(&a_mat, &rhs).ok_or(Error::SingularWronskian {
        k,
        rho: geom.a.as_f64(),
    })?;
    if sol.condition > COND_HARD && !S::EXTENDED {
        return Err(Error::IllConditioned {
            k,
            cond: sol.condition,
        });
    }
    Ok(ModeSolution {
        k,
        c: sol.x,
        bases,
        particular,
        n,
        bound,
        condition: sol.condition,
        geom: *geom,
    })
}

impl<S: Scalar> ModeSolution<S> {
    /// (Y_k, Y_k′, Z_k, Z_k′) at ρ, in unscaled variables.
    pub fn eval(&self, rho: S) -> Result<StateVector<S>> {
        let s = S::PI() * S::of_usize(self.k as usize) / self.geom.h;
        let mut acc = self.particular.state(rho)?.to_array();
        for (j, basis) in self.bases.iter().enumerate() {
            let st = unscale(basis.eval(s * rho), self.k, self.geom.h);
            let v = st.to_array();
            for i in 0..4 {
                acc[i] = acc[i] + self.c[j] * v[i];
            }
        }
        Ok(StateVector::from_array(acc))
    }

    /// Whether the condition estimate crossed the warning threshold.
    pub fn ill_conditioned(&self) -> bool {
        self.condition > COND_WARN
    }

    /// Cylinder height the mode was solved for (as f64, for wavenumbers).
    pub fn h(&self) -> f64 {
        self.geom.h.as_f64()
    }
}
