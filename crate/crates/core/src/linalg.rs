//! Small dense linear algebra: 4×4 solves with partial pivoting for the
//! Wronskian applications, and an equilibrated column-pivoted QR for the
//! boundary system (whose columns span wildly different magnitudes).

use crate::scalar::Scalar;

/// Solves the 4×4 system `m · x = rhs` by LU with partial pivoting.
/// Returns `None` when a pivot falls below `1e-14 ×` the matrix scale.
pub fn solve4<S: Scalar>(m: &[[S; 4]; 4], rhs: &[S; 4]) -> Option<[S; 4]> {
    let mut a = *m;
    let mut x = *rhs;
    let scale = a
        .iter()
        .flatten()
        .fold(S::zero(), |acc, &v| acc.max(v.abs()));
    let tiny = S::of_f64(1e-14) * scale;

    let mut perm = [0usize, 1, 2, 3];
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&i, &j| {
                a[perm[i]][col]
                    .abs()
                    .partial_cmp(&a[perm[j]][col].abs())
                    .unwrap_or(core::cmp::Ordering::Equal)
            })
            .unwrap();
        perm.swap(col, piv);
        let p = a[perm[col]][col];
        if p.abs() <= tiny {
            return None;
        }
        for i in (col + 1)..4 {
            let f = a[perm[i]][col] / p;
            a[perm[i]][col] = S::zero();
            for j in (col + 1)..4 {
                a[perm[i]][j] = a[perm[i]][j] - f * a[perm[col]][j];
            }
            x[perm[i]] = x[perm[i]] - f * x[perm[col]];
        }
    }
    let mut out = [S::zero(); 4];
    for col in (0..4).rev() {
        let mut v = x[perm[col]];
        for j in (col + 1)..4 {
            v = v - a[perm[col]][j] * out[j];
        }
        out[col] = v / a[perm[col]][col];
    }
    Some(out)
}

/// Determinant of a 4×4 matrix (cofactor-free: LU without the rhs).
pub fn det4<S: Scalar>(m: &[[S; 4]; 4]) -> S {
    let mut a = *m;
    let mut det = S::one();
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .unwrap_or(core::cmp::Ordering::Equal)
            })
            .unwrap();
        if piv != col {
            a.swap(col, piv);
            det = -det;
        }
        let p = a[col][col];
        if p == S::zero() {
            return S::zero();
        }
        det = det * p;
        for i in (col + 1)..4 {
            let f = a[i][col] / p;
            for j in (col + 1)..4 {
                a[i][j] = a[i][j] - f * a[col][j];
            }
        }
    }
    det
}

/// Result of the boundary-system solve.
pub struct QrSolve<S> {
    pub x: [S; 4],
    /// Condition estimate: ratio of largest to smallest |R_ii| of the pivoted
    /// R factor of the equilibrated matrix.
    pub condition: f64,
}

/// Solves `m · x = rhs` by Householder QR with column pivoting on a
/// row/column-equilibrated copy (each row and column scaled by its max-abs).
///
/// Equilibration makes the condition estimate meaningful when columns differ
/// by many orders of magnitude; the recovered solution is unscaled at the end.
pub fn qr_solve4<S: Scalar>(m: &[[S; 4]; 4], rhs: &[S; 4]) -> Option<QrSolve<S>> {
    // row scaling
    let mut r_scale = [S::one(); 4];
    for i in 0..4 {
        let mx = m[i].iter().fold(S::zero(), |acc, &v| acc.max(v.abs()));
        if mx > S::zero() {
            r_scale[i] = S::one() / mx;
        }
    }
    let mut a = *m;
    for i in 0..4 {
        for j in 0..4 {
            a[i][j] = a[i][j] * r_scale[i];
        }
    }
    // column scaling
    let mut c_scale = [S::one(); 4];
    for j in 0..4 {
        let mut mx = S::zero();
        for row in &a {
            mx = mx.max(row[j].abs());
        }
        if mx > S::zero() {
            c_scale[j] = S::one() / mx;
        }
        for row in &mut a {
            row[j] = row[j] * c_scale[j];
        }
    }
    let mut b = [S::zero(); 4];
    for i in 0..4 {
        b[i] = rhs[i] * r_scale[i];
    }

    // Householder QR with column pivoting
    let mut piv = [0usize, 1, 2, 3];
    let mut rdiag = [S::zero(); 4];
    for kk in 0..4 {
        // pivot on the largest remaining column norm
        let mut best = kk;
        let mut best_norm = S::zero();
        for j in kk..4 {
            let mut nrm = S::zero();
            for i in kk..4 {
                nrm = nrm + a[i][piv[j]] * a[i][piv[j]];
            }
            if nrm > best_norm {
                best_norm = nrm;
                best = j;
            }
        }
        piv.swap(kk, best);
        let col = piv[kk];

        let mut nrm = S::zero();
        for i in kk..4 {
            nrm = nrm + a[i][col] * a[i][col];
        }
        let nrm = nrm.sqrt();
        if nrm == S::zero() {
            return None;
        }
        let alpha = if a[kk][col] >= S::zero() { -nrm } else { nrm };
        // Householder vector v = x - alpha e1, stored in place
        let mut v = [S::zero(); 4];
        for i in kk..4 {
            v[i] = a[i][col];
        }
        v[kk] = v[kk] - alpha;
        let mut vtv = S::zero();
        for vi in &v[kk..] {
            vtv = vtv + *vi * *vi;
        }
        if vtv == S::zero() {
            return None;
        }
        // apply H = I - 2 v vᵀ/(vᵀv) to remaining columns and rhs
        for j in kk..4 {
            let cj = piv[j];
            let mut dot = S::zero();
            for i in kk..4 {
                dot = dot + v[i] * a[i][cj];
            }
            let f = S::of_f64(2.0) * dot / vtv;
            for i in kk..4 {
                a[i][cj] = a[i][cj] - f * v[i];
            }
        }
        let mut dot = S::zero();
        for i in kk..4 {
            dot = dot + v[i] * b[i];
        }
        let f = S::of_f64(2.0) * dot / vtv;
        for i in kk..4 {
            b[i] = b[i] - f * v[i];
        }
        a[kk][col] = alpha;
        rdiag[kk] = alpha;
    }

    let rmax = rdiag.iter().fold(S::zero(), |acc, &v| acc.max(v.abs()));
    let rmin = rdiag
        .iter()
        .fold(S::infinity(), |acc, &v| acc.min(v.abs()));
    if rmin == S::zero() {
        return None;
    }
    let condition = (rmax / rmin).as_f64();

    // back substitution R y = Qᵀ b, then undo pivoting + column scaling
    let mut y = [S::zero(); 4];
    for i in (0..4).rev() {
        let mut v = b[i];
        for j in (i + 1)..4 {
            v = v - a[i][piv[j]] * y[j];
        }
        y[i] = v / a[i][piv[i]];
    }
    let mut x = [S::zero(); 4];
    for j in 0..4 {
        x[piv[j]] = y[j] * c_scale[piv[j]];
    }
    Some(QrSolve { x, condition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const M: [[f64; 4]; 4] = [
        [4.0, 1.0, 0.5, -2.0],
        [1.0, -3.0, 2.0, 0.0],
        [0.0, 2.0, 7.0, 1.0],
        [-1.0, 0.5, 0.0, 5.0],
    ];

    #[test]
    fn lu_solves_known_system() {
        let xt = [1.0, -2.0, 3.0, 0.5];
        let mut rhs = [0.0; 4];
        for i in 0..4 {
            rhs[i] = M[i].iter().zip(&xt).map(|(a, x)| a * x).sum();
        }
        let x = solve4(&M, &rhs).unwrap();
        for i in 0..4 {
            assert_relative_eq!(x[i], xt[i], max_relative = 1e-13);
        }
    }

    #[test]
    fn lu_detects_singular() {
        let mut m = M;
        m[3] = m[0]; // duplicate row
        assert!(solve4(&m, &[1.0, 2.0, 3.0, 4.0]).is_none());
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        // triangular reference
        let t = [
            [2.0, 1.0, 0.0, 3.0],
            [0.0, -1.0, 4.0, 1.0],
            [0.0, 0.0, 0.5, 2.0],
            [0.0, 0.0, 0.0, 3.0],
        ];
        assert_relative_eq!(det4(&t), -3.0, max_relative = 1e-14);
        // permuted columns flip sign
        let mut p = t;
        for row in &mut p {
            row.swap(0, 1);
        }
        assert_relative_eq!(det4(&p), 3.0, max_relative = 1e-14);
    }

    #[test]
    fn qr_solves_well_conditioned() {
        let xt = [0.25, 1.5, -1.0, 2.0];
        let mut rhs = [0.0; 4];
        for i in 0..4 {
            rhs[i] = M[i].iter().zip(&xt).map(|(a, x)| a * x).sum();
        }
        let sol = qr_solve4(&M, &rhs).unwrap();
        for i in 0..4 {
            assert_relative_eq!(sol.x[i], xt[i], max_relative = 1e-12);
        }
        assert!(sol.condition < 100.0);
    }

    #[test]
    fn qr_handles_badly_scaled_columns() {
        // columns scaled by 1e-12 .. 1e12: equilibration keeps the solve exact
        let scales = [1e-12, 1.0, 1e6, 1e12];
        let mut m = M;
        for row in &mut m {
            for (v, s) in row.iter_mut().zip(&scales) {
                *v *= s;
            }
        }
        let xt = [1.0 / scales[0], 2.0, 3.0 / scales[2], 4.0 / scales[3]];
        let mut rhs = [0.0; 4];
        for i in 0..4 {
            rhs[i] = m[i].iter().zip(&xt).map(|(a, x)| a * x).sum();
        }
        let sol = qr_solve4(&m, &rhs).unwrap();
        for i in 0..4 {
            assert_relative_eq!(sol.x[i], xt[i], max_relative = 1e-10);
        }
        // equilibrated condition stays far below the raw 1e24 column spread
        assert!(sol.condition < 1e7, "cond = {}", sol.condition);
    }

    #[test]
    fn qr_condition_detects_near_singularity() {
        let mut m = M;
        for j in 0..4 {
            m[3][j] = m[0][j] * (1.0 + 1e-10 * j as f64);
        }
        let sol = qr_solve4(&m, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(sol.condition > 1e8, "cond = {}", sol.condition);
    }

    #[test]
    fn qr_works_in_extended_precision() {
        use crate::scalar::Ext;
        use num_traits::Float;
        let m: [[Ext; 4]; 4] =
            core::array::from_fn(|i| core::array::from_fn(|j| Ext::of_f64(M[i][j])));
        let xt = [1.0, -1.0, 0.5, 2.0].map(Ext::from);
        let mut rhs = [Ext::of_f64(0.0); 4];
        for i in 0..4 {
            for j in 0..4 {
                rhs[i] = rhs[i] + m[i][j] * xt[j];
            }
        }
        let sol = qr_solve4(&m, &rhs).unwrap();
        for i in 0..4 {
            let err = sol.x[i] - xt[i];
            assert!(err.abs() < Ext::of_f64(1e-25), "x[{i}] err = {err:?}");
        }
    }
}
