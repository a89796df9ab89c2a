//! Independent verification machinery: a second-order finite-difference
//! collocation solver for the radial mode BVP, plus residual diagnostics.
//!
//! Nothing here feeds the production solution path — the collocation solver
//! shares no code with the series machinery beyond the forcing definition, so
//! agreement between the two is meaningful evidence.

use crate::error::{Error, Result};
use crate::material::{AxialLoad, CylinderGeometry, ElasticMaterial};
use crate::mode::ModeSolution;
use crate::particular::ForcingSpec;
use crate::quad::integrate_gl64;
use crate::scalar::Scalar;

/// Finite-difference solution of one mode BVP on a mesh with a node placed
/// exactly at the forcing jump ρ = eps.
pub struct CollocationSolution {
    pub k: u32,
    /// Strictly increasing mesh; first node a, last node b, node `n1` at eps.
    pub mesh: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    /// Index of the junction node at eps.
    pub n1: usize,
}

/// Banded Gaussian elimination with partial pivoting (LAPACK-style band
/// storage with `kl` extra superdiagonals for pivoting fill-in).
struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    /// Column-major: entry (i, j) lives at data[j * ldab + kl + ku + i - j].
    data: Vec<f64>,
    ldab: usize,
}

impl Banded {
    fn new(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Banded {
            n,
            kl,
            ku,
            data: vec![0.0; n * ldab],
            ldab,
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ldab + self.kl + self.ku + i - j
    }

    #[inline]
    fn add(&mut self, i: usize, j: usize, v: f64) {
        let at = self.idx(i, j);
        self.data[at] += v;
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        let at = self.idx(i, j);
        self.data[at] = v;
    }

    /// In-place solve; `None` on a vanishing pivot.
    fn solve(mut self, b: &mut [f64]) -> Option<()> {
        let n = self.n;
        let width = self.ku + self.kl;
        for j in 0..n {
            let i_hi = (j + self.kl).min(n - 1);
            let mut piv = j;
            let mut piv_abs = self.get(j, j).abs();
            for i in (j + 1)..=i_hi {
                let v = self.get(i, j).abs();
                if v > piv_abs {
                    piv_abs = v;
                    piv = i;
                }
            }
            if piv_abs == 0.0 {
                return None;
            }
            if piv != j {
                let c_hi = (j + width).min(n - 1);
                for c in j..=c_hi {
                    let u = self.get(j, c);
                    let v = self.get(piv, c);
                    self.set(j, c, v);
                    self.set(piv, c, u);
                }
                b.swap(j, piv);
            }
            let d = self.get(j, j);
            for i in (j + 1)..=i_hi {
                let f = self.get(i, j) / d;
                if f != 0.0 {
                    let c_hi = (j + width).min(n - 1);
                    for c in (j + 1)..=c_hi {
                        let v = self.get(i, c) - f * self.get(j, c);
                        self.set(i, c, v);
                    }
                    b[i] -= f * b[j];
                }
                self.set(i, j, 0.0);
            }
        }
        for j in (0..n).rev() {
            let c_hi = (j + width).min(n - 1);
            let mut v = b[j];
            for c in (j + 1)..=c_hi {
                v -= self.get(j, c) * b[c];
            }
            b[j] = v / self.get(j, j);
        }
        Some(())
    }
}

fn build_mesh(geom: &CylinderGeometry<f64>, n1: usize, n2: usize) -> Vec<f64> {
    let mut mesh = Vec::with_capacity(n1 + n2 + 1);
    for i in 0..=n1 {
        mesh.push(geom.a + (geom.eps - geom.a) * i as f64 / n1 as f64);
    }
    for i in 1..=n2 {
        mesh.push(geom.eps + (geom.b - geom.eps) * i as f64 / n2 as f64);
    }
    mesh
}

/// Splits `n_mesh` intervals across [a, eps] and [eps, b] proportionally.
fn split_intervals(geom: &CylinderGeometry<f64>, n_mesh: usize) -> (usize, usize) {
    let frac = (geom.eps - geom.a) / (geom.b - geom.a);
    let n1 = ((n_mesh as f64 * frac).round() as usize).clamp(2, n_mesh - 2);
    (n1, n_mesh - n1)
}

fn solve_with(
    k: u32,
    mat: &ElasticMaterial<f64>,
    geom: &CylinderGeometry<f64>,
    load: &AxialLoad<f64>,
    n1: usize,
    n2: usize,
) -> Result<CollocationSolution> {
    assert!(k % 2 == 1);
    let mesh = build_mesh(geom, n1, n2);
    let n = mesh.len() - 1;
    let sc = mat.scaled_coefficients();
    let s = std::f64::consts::PI * k as f64 / geom.h;
    let forcing = ForcingSpec {
        k,
        p: load.p,
        a: geom.a,
        eps: geom.eps,
        h: geom.h,
        mu: mat.mu,
    };

    // unknowns interleaved [Y_0, Z_0, Y_1, Z_1, ...]
    let dim = 2 * (n + 1);
    let (kl, ku) = (5usize, 5usize);
    let mut a = Banded::new(dim, kl, ku);
    let mut rhs = vec![0.0; dim];
    let iy = |i: usize| 2 * i;
    let iz = |i: usize| 2 * i + 1;

    let d1 = (geom.eps - geom.a) / n1 as f64;
    let d2 = (geom.b - geom.eps) / n2 as f64;
    let lp2m = mat.lambda + 2.0 * mat.mu;

    // inner boundary rows at node 0: one-sided second-order derivatives
    {
        let (c0, c1, c2) = (-3.0 / (2.0 * d1), 4.0 / (2.0 * d1), -1.0 / (2.0 * d1));
        // (λ+2μ)Y′ + (λ/a)Y + λ s Z = 0
        a.add(0, iy(0), lp2m * c0 + mat.lambda / geom.a);
        a.add(0, iy(1), lp2m * c1);
        a.add(0, iy(2), lp2m * c2);
        a.add(0, iz(0), mat.lambda * s);
        // Z′ − s Y = 0
        a.add(1, iz(0), c0);
        a.add(1, iz(1), c1);
        a.add(1, iz(2), c2);
        a.add(1, iy(0), -s);
    }

    // interface rows at the junction node: the forcing jumps at eps, so the
    // exact solution has discontinuous second derivatives there and a stencil
    // spanning the kink would only be first-order accurate.  The solution is
    // C¹, so impose continuity of Y′ and Z′ with second-order one-sided
    // differences from each side instead of the ODE rows.
    {
        let j = n1;
        let bl = [3.0 / (2.0 * d1), -4.0 / (2.0 * d1), 1.0 / (2.0 * d1)];
        let fr = [-3.0 / (2.0 * d2), 4.0 / (2.0 * d2), -1.0 / (2.0 * d2)];
        for (row, idx) in [(iy(j), &iy as &dyn Fn(usize) -> usize), (iz(j), &iz)] {
            a.add(row, idx(j), bl[0] - fr[0]);
            a.add(row, idx(j - 1), bl[1]);
            a.add(row, idx(j - 2), bl[2]);
            a.add(row, idx(j + 1), -fr[1]);
            a.add(row, idx(j + 2), -fr[2]);
        }
    }

    // interior rows: Y″ + Y′/ρ − Y/ρ² − α̃ s² Y + β̃ s Z′ = 0
    //                Z″ + Z′/ρ − γ̃ s² Z − δ̃ s (Y′ + Y/ρ) = −Ψ/μ
    for i in 1..n {
        if i == n1 {
            continue;
        }
        let rho = mesh[i];
        let (hl, hr) = (mesh[i] - mesh[i - 1], mesh[i + 1] - mesh[i]);
        // non-uniform 3-point formulas (reduce to centered when hl == hr)
        let w2m = 2.0 / (hl * (hl + hr));
        let w20 = -2.0 / (hl * hr);
        let w2p = 2.0 / (hr * (hl + hr));
        let w1m = -hr / (hl * (hl + hr));
        let w10 = (hr - hl) / (hl * hr);
        let w1p = hl / (hr * (hl + hr));

        let ry = iy(i);
        a.add(ry, iy(i - 1), w2m + w1m / rho);
        a.add(ry, iy(i), w20 + w10 / rho - 1.0 / (rho * rho) - sc.alpha * s * s);
        a.add(ry, iy(i + 1), w2p + w1p / rho);
        a.add(ry, iz(i - 1), sc.beta * s * w1m);
        a.add(ry, iz(i), sc.beta * s * w10);
        a.add(ry, iz(i + 1), sc.beta * s * w1p);

        let rz = iz(i);
        a.add(rz, iz(i - 1), w2m + w1m / rho);
        a.add(rz, iz(i), w20 + w10 / rho - sc.gamma * s * s);
        a.add(rz, iz(i + 1), w2p + w1p / rho);
        a.add(rz, iy(i - 1), -sc.delta * s * w1m);
        a.add(rz, iy(i), -sc.delta * s * (w10 + 1.0 / rho));
        a.add(rz, iy(i + 1), -sc.delta * s * w1p);
        rhs[rz] = -forcing.psi(rho) / mat.mu;
    }

    // outer boundary rows at node n
    {
        let (c0, c1, c2) = (3.0 / (2.0 * d2), -4.0 / (2.0 * d2), 1.0 / (2.0 * d2));
        let r = iy(n);
        a.add(r, iy(n), lp2m * c0 + mat.lambda / geom.b);
        a.add(r, iy(n - 1), lp2m * c1);
        a.add(r, iy(n - 2), lp2m * c2);
        a.add(r, iz(n), mat.lambda * s);
        let r = iz(n);
        a.add(r, iz(n), c0);
        a.add(r, iz(n - 1), c1);
        a.add(r, iz(n - 2), c2);
        a.add(r, iy(n), -s);
    }

    a.solve(&mut rhs).ok_or(Error::SingularDiscretization {
        k,
        n_mesh: n,
    })?;

    let mut y = Vec::with_capacity(n + 1);
    let mut z = Vec::with_capacity(n + 1);
    for i in 0..=n {
        y.push(rhs[iy(i)]);
        z.push(rhs[iz(i)]);
    }
    Ok(CollocationSolution { k, mesh, y, z, n1 })
}

/// Solves mode k on an `n_mesh`-interval mesh (node placed at eps).
pub fn collocation_solve_mode(
    k: u32,
    mat: &ElasticMaterial<f64>,
    geom: &CylinderGeometry<f64>,
    load: &AxialLoad<f64>,
    n_mesh: usize,
) -> Result<CollocationSolution> {
    assert!(n_mesh >= 8);
    let (n1, n2) = split_intervals(geom, n_mesh);
    solve_with(k, mat, geom, load, n1, n2)
}

/// Solves on `n_mesh` and `2·n_mesh` intervals and Richardson-extrapolates the
/// shared nodes (the scheme is second order, so (4·fine − coarse)/3 cancels
/// the leading error term).  Result lives on the coarse mesh.
pub fn richardson_solve_mode(
    k: u32,
    mat: &ElasticMaterial<f64>,
    geom: &CylinderGeometry<f64>,
    load: &AxialLoad<f64>,
    n_mesh: usize,
) -> Result<CollocationSolution> {
    let (n1, n2) = split_intervals(geom, n_mesh);
    let coarse = solve_with(k, mat, geom, load, n1, n2)?;
    let fine = solve_with(k, mat, geom, load, 2 * n1, 2 * n2)?;
    let mut out = coarse;
    for i in 0..out.mesh.len() {
        out.y[i] = (4.0 * fine.y[2 * i] - out.y[i]) / 3.0;
        out.z[i] = (4.0 * fine.z[2 * i] - out.z[i]) / 3.0;
    }
    Ok(out)
}

/// Max over mesh nodes of the deviation between the series mode and the
/// collocation solution, relative to the sup of the series values (Y and Z
/// compared separately; the larger ratio is returned).
pub fn compare_mode<S: Scalar>(
    mode: &ModeSolution<S>,
    oracle: &CollocationSolution,
) -> Result<f64> {
    assert_eq!(mode.k, oracle.k);
    let mut max_y = 0.0f64;
    let mut max_z = 0.0f64;
    let mut dev_y = 0.0f64;
    let mut dev_z = 0.0f64;
    for (i, &rho) in oracle.mesh.iter().enumerate() {
        let st = mode.eval(S::of_f64(rho))?.as_f64();
        max_y = max_y.max(st.y.abs());
        max_z = max_z.max(st.z.abs());
        dev_y = dev_y.max((st.y - oracle.y[i]).abs());
        dev_z = dev_z.max((st.z - oracle.z[i]).abs());
    }
    if max_y == 0.0 && max_z == 0.0 {
        let flat = oracle
            .y
            .iter()
            .chain(&oracle.z)
            .fold(0.0f64, |a, v| a.max(v.abs()));
        return Ok(if flat == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok((dev_y / max_y.max(f64::MIN_POSITIVE)).max(dev_z / max_z.max(f64::MIN_POSITIVE)))
}

/// L² norm over the end face z = −h/2 of σᶻ + χ_p, where χ_p = p on [a, eps)
/// and 0 beyond: sqrt(2π ∫ (σᶻ(ρ,−h/2) + χ_p(ρ))² ρ dρ).  Units Pa·m.
pub fn endface_traction_residual<S: Scalar>(
    modes: &[ModeSolution<S>],
    mat: &ElasticMaterial<f64>,
    geom: &CylinderGeometry<f64>,
    load: &AxialLoad<f64>,
    n_rho: usize,
) -> Result<f64> {
    assert!(n_rho >= 100);
    let z = -geom.h / 2.0;
    let mut err = None;
    let mut piece = |lo: f64, hi: f64, chi: f64| -> f64 {
        integrate_gl64(lo, hi, |rho| {
            match crate::field::stress(modes, mat, S::of_f64(rho), z) {
                Ok(st) => {
                    let r = st.sigma_z + chi;
                    r * r * rho
                }
                Err(e) => {
                    err.get_or_insert(e);
                    f64::NAN
                }
            }
        })
    };
    let total = piece(geom.a, geom.eps, load.p) + piece(geom.eps, geom.b, 0.0);
    match err {
        Some(e) => Err(e),
        None => Ok((2.0 * std::f64::consts::PI * total).sqrt()),
    }
}
