//! The four linearly independent Frobenius-with-logarithm solutions of the
//! scaled homogeneous radial system.
//!
//! In the scaled variable t = πkρ/h the system loses its k-dependence, so one
//! set of coefficient tables serves every Fourier mode.  Each basis solution
//! has the form
//!
//! ```text
//! Y(t) = Σ_{n≥−1} a_n tⁿ + ln t · Σ_{n≥1} b_n tⁿ      (odd powers only)
//! Z(t) = Σ_{n≥0}  c_n tⁿ + ln t · Σ_{n≥0} d_n tⁿ      (even powers only)
//! ```
//!
//! with the seed quadruple (a₋₁, a₁, b₁, c₀) chosen as the j-th unit vector
//! and every later coefficient fixed by a 4×4 linear recurrence.

use crate::error::{Error, Result};
use crate::material::ScaledCoefficients;
use crate::scalar::{compensated_horner, Scalar};

/// Coefficient tables of one Frobenius-with-log expansion, truncated at odd
/// order N.  Index conventions: `a` covers n = −1..N, `b` covers n = 0..N,
/// `c` and `d` cover n = 0..N−1.  Even-index entries (odd for c, d) are all
/// zero and never stored: the tables keep only the structurally nonzero
/// stride-2 lanes.
#[derive(Debug, Clone)]
pub struct SeriesCoefficients<S> {
    /// Truncation order N (odd, ≥ 3).
    pub n: u32,
    /// a₋₁ (the 1/t coefficient).
    pub a_m1: S,
    /// a_n for odd n = 1, 3, …, N.
    pub a_odd: Vec<S>,
    /// b_n for odd n = 1, 3, …, N.
    pub b_odd: Vec<S>,
    /// c_n for even n = 0, 2, …, N−1.
    pub c_even: Vec<S>,
    /// d_n for even n = 0, 2, …, N−1.
    pub d_even: Vec<S>,
}

impl<S: Scalar> SeriesCoefficients<S> {
    /// a_n for any n in −1..=N (zero where the expansion has no term).
    pub fn a(&self, n: i64) -> S {
        match n {
            -1 => self.a_m1,
            n if n >= 1 && n % 2 == 1 && n <= self.n as i64 => self.a_odd[(n as usize - 1) / 2],
            _ => S::zero(),
        }
    }

    pub fn b(&self, n: i64) -> S {
        match n {
            n if n >= 1 && n % 2 == 1 && n <= self.n as i64 => self.b_odd[(n as usize - 1) / 2],
            _ => S::zero(),
        }
    }

    pub fn c(&self, n: i64) -> S {
        match n {
            n if n >= 0 && n % 2 == 0 && n < self.n as i64 => self.c_even[n as usize / 2],
            _ => S::zero(),
        }
    }

    pub fn d(&self, n: i64) -> S {
        match n {
            n if n >= 0 && n % 2 == 0 && n < self.n as i64 => self.d_even[n as usize / 2],
            _ => S::zero(),
        }
    }
}

/// One of the four independent homogeneous solutions.
#[derive(Debug, Clone)]
pub struct BasisSolution<S> {
    /// Basis index 1..4.
    pub j: usize,
    /// The seed quadruple (a₋₁, a₁, b₁, c₀).
    pub seed: [S; 4],
    pub coeffs: SeriesCoefficients<S>,
    /// Derivative-weighted lanes n·a_n (odd n) and n·b_n, cached for eval.
    da_odd: Vec<S>,
    db_odd: Vec<S>,
    /// n·c_n and n·d_n for even n ≥ 2.
    dc_even: Vec<S>,
    dd_even: Vec<S>,
}

/// Solution state (Y, Y′, Z, Z′) at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector<S> {
    pub y: S,
    pub dy: S,
    pub z: S,
    pub dz: S,
}

impl<S: Scalar> StateVector<S> {
    pub fn zero() -> Self {
        Self {
            y: S::zero(),
            dy: S::zero(),
            z: S::zero(),
            dz: S::zero(),
        }
    }

    pub fn to_array(self) -> [S; 4] {
        [self.y, self.dy, self.z, self.dz]
    }

    pub fn from_array(v: [S; 4]) -> Self {
        Self {
            y: v[0],
            dy: v[1],
            z: v[2],
            dz: v[3],
        }
    }

    pub fn as_f64(self) -> StateVector<f64> {
        StateVector {
            y: self.y.as_f64(),
            dy: self.dy.as_f64(),
            z: self.z.as_f64(),
            dz: self.dz.as_f64(),
        }
    }
}

/// Tables populated up to n = 2 for the j-th unit seed, including the
/// constraint d₀ = (α̃/β̃)a₋₁ − (2/β̃)b₁ that ties the log coefficient of Z to
/// the 1/t coefficient of Y.
pub fn seed_basis<S: Scalar>(j: usize, sc: &ScaledCoefficients<S>) -> SeriesCoefficients<S> {
    assert!((1..=4).contains(&j), "basis index must be 1..4");
    let mut seed = [S::zero(); 4];
    seed[j - 1] = S::one();
    let [a_m1, a1, b1, c0] = seed;
    let d0 = sc.alpha / sc.beta * a_m1 - S::of_f64(2.0) / sc.beta * b1;
    SeriesCoefficients {
        n: 1,
        a_m1,
        a_odd: vec![a1],
        b_odd: vec![b1],
        c_even: vec![c0],
        d_even: vec![d0],
    }
}

/// One step of the coefficient recurrence: given (a_{n−2}, b_{n−2}, c_{n−3},
/// d_{n−3}) return (a_n, b_n, c_{n−1}, d_{n−1}) for odd n ≥ 3.
///
/// The 4×4 system is block upper-triangular, so it is solved by direct
/// back-substitution (d, then c, then b, then a); its determinant
/// (n−1)⁶(n+1)² never vanishes.
pub fn recurrence_step<S: Scalar>(n: u32, prev: [S; 4], sc: &ScaledCoefficients<S>) -> [S; 4] {
    assert!(n >= 3 && n % 2 == 1, "recurrence runs over odd n >= 3");
    let [an2, bn2, cn3, dn3] = prev;
    let nf = S::of_usize(n as usize);
    let one = S::one();
    let two = S::of_f64(2.0);
    let nm1 = nf - one;
    let nm1sq = nm1 * nm1;
    let n2m1 = nf * nf - one;

    let dn1 = (sc.delta * nm1 * bn2 + sc.gamma * dn3) / nm1sq;
    let cn1 = (sc.delta * nm1 * an2 + sc.delta * bn2 + sc.gamma * cn3 - two * nm1 * dn1) / nm1sq;
    let bn = (sc.alpha * bn2 - sc.beta * nm1 * dn1) / n2m1;
    let an = (sc.alpha * an2 - two * nf * bn - sc.beta * nm1 * cn1 - sc.beta * dn1) / n2m1;
    [an, bn, cn1, dn1]
}

/// Reference variant of [`recurrence_step`]: multiplies the previous quadruple
/// by the closed-form inverse matrix of the recurrence system instead of
/// back-substituting.  Kept as an independent cross-check; the production path
/// never calls it.
pub fn recurrence_step_matrix<S: Scalar>(
    n: u32,
    prev: [S; 4],
    sc: &ScaledCoefficients<S>,
) -> [S; 4] {
    assert!(n >= 3 && n % 2 == 1);
    let nf = S::of_usize(n as usize);
    let one = S::one();
    let two = S::of_f64(2.0);
    let three = S::of_f64(3.0);
    let np1 = nf + one;
    let nm1 = nf - one;
    // λ/μ expressed through the scaled coefficients
    let r = sc.delta - one;
    let g = sc.gamma;
    let d = sc.delta;

    let m = [
        [
            -r / (np1 * nm1),
            two * r * nf / (np1 * np1 * nm1 * nm1),
            -d / (np1 * nm1 * nm1),
            d * (three * nf + one) / (np1 * np1 * nm1 * nm1 * nm1),
        ],
        [
            S::zero(),
            -r / (np1 * nm1),
            S::zero(),
            -d / (np1 * nm1 * nm1),
        ],
        [
            d / nm1,
            -d / (nm1 * nm1),
            g / (nm1 * nm1),
            -two * g / (nm1 * nm1 * nm1),
        ],
        [S::zero(), d / nm1, S::zero(), g / (nm1 * nm1)],
    ];
    let mut out = [S::zero(); 4];
    for (i, row) in m.iter().enumerate() {
        let mut acc = S::zero();
        for (x, &mij) in prev.iter().zip(row) {
            acc = acc + mij * *x;
        }
        out[i] = acc;
    }
    out
}

/// Builds the j-th basis solution with tables filled up to odd order N.
pub fn build_basis<S: Scalar>(
    j: usize,
    n: u32,
    sc: &ScaledCoefficients<S>,
) -> Result<BasisSolution<S>> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::BadSeriesOrder(n));
    }
    let mut coeffs = seed_basis(j, sc);
    let len = (n as usize + 1) / 2;
    coeffs.a_odd.reserve(len);
    coeffs.b_odd.reserve(len);
    coeffs.c_even.reserve(len);
    coeffs.d_even.reserve(len);
    for m in (3..=n).step_by(2) {
        let prev = [
            coeffs.a(m as i64 - 2),
            coeffs.b(m as i64 - 2),
            coeffs.c(m as i64 - 3),
            coeffs.d(m as i64 - 3),
        ];
        let next = recurrence_step(m, prev, sc);
        coeffs.n = m;
        coeffs.a_odd.push(next[0]);
        coeffs.b_odd.push(next[1]);
        coeffs.c_even.push(next[2]);
        coeffs.d_even.push(next[3]);
    }

    let mut seed = [S::zero(); 4];
    seed[j - 1] = S::one();
    let weight = |lane: &[S], offset: usize| -> Vec<S> {
        lane.iter()
            .enumerate()
            .map(|(i, &x)| S::of_usize(2 * i + offset) * x)
            .collect()
    };
    let da_odd = weight(&coeffs.a_odd, 1);
    let db_odd = weight(&coeffs.b_odd, 1);
    // even lanes: the n=0 entry has zero derivative weight and is skipped
    let dc_even = weight(&coeffs.c_even[1..], 2);
    let dd_even = weight(&coeffs.d_even[1..], 2);
    Ok(BasisSolution {
        j,
        seed,
        coeffs,
        da_odd,
        db_odd,
        dc_even,
        dd_even,
    })
}

impl<S: Scalar> BasisSolution<S> {
    /// Evaluates (Y, Y′, Z, Z′) at scaled radius t > 0 using the full table.
    pub fn eval(&self, t: S) -> StateVector<S> {
        self.eval_truncated(t, self.coeffs.n)
    }

    /// Evaluates with the series truncated at odd order `n_trunc` ≤ N
    /// (Y-tables up to n_trunc, Z-tables up to n_trunc − 1).
    pub fn eval_truncated(&self, t: S, n_trunc: u32) -> StateVector<S> {
        assert!(t > S::zero(), "series variable must be positive");
        let n_trunc = n_trunc.min(self.coeffs.n);
        let len = (n_trunc as usize + 1) / 2;
        let lt = t.ln();
        let t2 = t * t;

        // Each stride-2 lane is a polynomial in t²; odd lanes carry an extra
        // factor t outside.
        let ha = compensated_horner(&self.coeffs.a_odd[..len], t2);
        let hb = compensated_horner(&self.coeffs.b_odd[..len], t2);
        let hda = compensated_horner(&self.da_odd[..len], t2);
        let hdb = compensated_horner(&self.db_odd[..len], t2);
        let hc = compensated_horner(&self.coeffs.c_even[..len], t2);
        let hd = compensated_horner(&self.coeffs.d_even[..len], t2);
        let hdc = compensated_horner(&self.dc_even[..len.saturating_sub(1)], t2);
        let hdd = compensated_horner(&self.dd_even[..len.saturating_sub(1)], t2);

        let a_m1 = self.coeffs.a_m1;
        let y = a_m1 / t + t * ha + lt * t * hb;
        let dy = -a_m1 / t2 + hda + lt * hdb + hb;
        let z = hc + lt * hd;
        let dz = t * hdc + lt * t * hdd + hd / t;
        StateVector { y, dy, z, dz }
    }
}

/// Converts a scaled-variable state at t into the physical state at
/// ρ = t·h/(πk): values carry over, derivatives pick up the chain-rule factor
/// πk/h.
pub fn unscale<S: Scalar>(state: StateVector<S>, k: u32, h: S) -> StateVector<S> {
    let s = S::PI() * S::of_usize(k as usize) / h;
    StateVector {
        y: state.y,
        dy: s * state.dy,
        z: state.z,
        dz: s * state.dz,
    }
}
