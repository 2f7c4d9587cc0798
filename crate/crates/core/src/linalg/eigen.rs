//! Cyclic Jacobi eigensolver for small Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` and then applies
//! a real Givens rotation that annihilates it. Sweeps visit pivots in
//! row-major order, so the result is a deterministic function of the input.
//! Eigenvalues are returned ascending with a stable sort (ties keep the order
//! in which they appear on the converged diagonal) and every eigenvector is
//! phase-fixed so that its first largest-magnitude component is real and
//! positive.

use num_complex::Complex64 as C64;

use super::matrix::{ComplexMatrix, HERMITIAN_TOL, ONE, ZERO};
use crate::error::{QlockError, Result};

/// Sweep budget for the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;
/// Convergence threshold on the off-diagonal Frobenius norm, relative to
/// max(1, ‖m‖_F).
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Spectral decomposition with ascending eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, `vectors[k]` paired with `values[k]`.
    pub vectors: Vec<Vec<C64>>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Σ f(λ_k) v_k v_k†.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n);
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            let w = f(*lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += v[i] * v[j].conj() * w;
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_values(|x| x)
    }

    /// Unitary whose columns are the eigenvectors.
    pub fn unitary(&self) -> ComplexMatrix {
        ComplexMatrix::from_columns(&self.vectors)
    }

    pub fn values_descending(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.reverse();
        v
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigendecomposition of a Hermitian matrix.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<EigenSystem> {
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(QlockError::NotHermitian { defect });
    }
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = OFF_DIAGONAL_TOL * m.frobenius_norm().max(1.0);

    let mut converged = off_diagonal_norm(&a) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(QlockError::NoConvergence {
                sweeps,
                off_norm: off_diagonal_norm(&a),
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&a) <= threshold;
    }

    let mut pairs: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|k| (a[(k, k)].re, canonical_phase(v.column(k))))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (values, vectors) = pairs.into_iter().unzip();
    Ok(EigenSystem { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(m)?.values)
}

/// Annihilates `a[p][q]` with the unitary G = diag(1, e^{-iφ}) · R(θ) acting on
/// the (p, q) plane: a ← G† a G, v ← v G.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let z = a[(p, q)];
    let h = z.norm();
    if h < f64::MIN_POSITIVE {
        return;
    }
    let phase = z / h; // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * h);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] in (p, q) coordinates.
    let conj_phase = phase.conj();
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = conj_phase * (-s);
    let g_qq = conj_phase * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

fn canonical_phase(mut vec: Vec<C64>) -> Vec<C64> {
    let norm = vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in vec.iter().enumerate() {
        // Near-ties are resolved towards the earlier index.
        if z.norm() > best_mag + 1e-12 {
            best_mag = z.norm();
            best = i;
        }
    }
    let pivot = vec[best];
    let rot = if pivot.norm() > 0.0 {
        pivot.conj() / pivot.norm()
    } else {
        ONE
    };
    for z in &mut vec {
        *z = *z * rot / norm;
    }
    vec
}
