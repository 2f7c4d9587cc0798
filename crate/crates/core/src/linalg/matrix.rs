//! Dense square complex matrices.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;

use crate::error::{QlockError, Result};

/// Tolerance for Hermiticity checks, ‖m − m†‖_F.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// A dense `dim × dim` complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries. Fails unless `entries.len()`
    /// is a positive perfect square and every entry is finite.
    pub fn from_row_major(entries: Vec<C64>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != entries.len() {
            return Err(QlockError::Parse(format!(
                "{} entries do not form a square matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QlockError::Parse("matrix has non-finite entries".into()));
        }
        Ok(Self { dim, data: entries })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "ragged rows");
            for (j, &z) in row.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        m
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    /// The projector |v⟩⟨v|.
    pub fn outer(v: &[C64]) -> Self {
        let mut m = Self::zeros(v.len());
        for i in 0..v.len() {
            for j in 0..v.len() {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// ‖m − m†‖_F.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// ‖u†u − I‖_F.
    pub fn unitarity_defect(&self) -> f64 {
        (&(&self.adjoint() * self) - &Self::identity(self.dim)).frobenius_norm()
    }

    /// Hermitian part (m + m†)/2, used to scrub rounding asymmetry.
    pub fn hermitian_part(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        let mut out = Self::zeros(da * db);
        for i in 0..da {
            for j in 0..da {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        out[(i * db + k, j * db + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// `u m u†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// ⟨v|m|v⟩.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let mv = self.apply(v);
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }

    /// Tr(self · other) without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<C64>]) -> Self {
        let dim = cols.len();
        let mut m = Self::zeros(dim);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), dim);
            for (i, &z) in col.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        m
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Kronecker product.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Which factor of a bipartite space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subsystem {
    A1,
    A2,
}

/// Reduced operator on the `keep` factor of a `d1·d2` space.
pub fn partial_trace(
    m: &ComplexMatrix,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    let (d1, d2) = dims;
    if m.dim() != d1 * d2 {
        return Err(QlockError::DimensionMismatch {
            expected: d1 * d2,
            found: m.dim(),
        });
    }
    Ok(match keep {
        Subsystem::A1 => {
            let mut out = ComplexMatrix::zeros(d1);
            for i in 0..d1 {
                for j in 0..d1 {
                    out[(i, j)] = (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum();
                }
            }
            out
        }
        Subsystem::A2 => {
            let mut out = ComplexMatrix::zeros(d2);
            for k in 0..d2 {
                for l in 0..d2 {
                    out[(k, l)] = (0..d1).map(|i| m[(i * d2 + k, i * d2 + l)]).sum();
                }
            }
            out
        }
    })
}

/// Pauli matrices (σx, σy, σz).
pub fn pauli() -> [ComplexMatrix; 3] {
    [
        ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]),
        ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]),
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]),
    ]
}

/// ½(I + b·σ); positive semidefinite for |b| ≤ 1.
pub fn qubit_operator(b: [f64; 3]) -> ComplexMatrix {
    let s = pauli();
    let mut m = ComplexMatrix::identity(2);
    for k in 0..3 {
        m = &m + &s[k].scale_real(b[k]);
    }
    m.scale_real(0.5)
}

/// Inner product ⟨a|b⟩.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// max |⟨v_i|v_j⟩ − δ_ij| over a family of vectors.
pub fn orthonormality_defect(vs: &[Vec<C64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in vs.iter().enumerate() {
        for (j, b) in vs.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((inner(a, b) - target).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ket(bits: &[f64]) -> Vec<C64> {
        bits.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    #[test]
    fn identity_tensor_identity() {
        let i4 = tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn diagonal_tensor() {
        let t = tensor(
            &ComplexMatrix::from_diag(&[1.0, 0.0]),
            &ComplexMatrix::from_diag(&[0.0, 1.0]),
        );
        assert_eq!(t, ComplexMatrix::from_diag(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn bit_flip_on_both() {
        let [x, _, _] = pauli();
        let xx = tensor(&x, &x);
        let out = xx.apply(&ket(&[1.0, 0.0, 0.0, 0.0]));
        assert_eq!(out, ket(&[0.0, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn partial_trace_of_singlet_is_mixed() {
        let s = 0.5f64.sqrt();
        let psi = ket(&[0.0, s, -s, 0.0]);
        let rho = ComplexMatrix::outer(&psi);
        for keep in [Subsystem::A1, Subsystem::A2] {
            let r = partial_trace(&rho, (2, 2), keep).unwrap();
            assert!((&r - &ComplexMatrix::identity(2).scale_real(0.5)).max_abs() < 1e-15);
        }
    }

    #[test]
    fn partial_trace_of_product() {
        let a = ComplexMatrix::from_real_rows(&[&[0.7, 0.2], &[0.2, 0.3]]);
        let b = ComplexMatrix::from_diag(&[0.1, 0.5, 0.4]);
        let ab = tensor(&a, &b);
        assert!((&partial_trace(&ab, (2, 3), Subsystem::A1).unwrap() - &a).max_abs() < 1e-15);
        assert!((&partial_trace(&ab, (2, 3), Subsystem::A2).unwrap() - &b).max_abs() < 1e-15);
    }

    #[test]
    fn partial_trace_of_classical_mixture() {
        let rho = ComplexMatrix::from_diag(&[0.5, 0.0, 0.0, 0.5]);
        let r = partial_trace(&rho, (2, 2), Subsystem::A2).unwrap();
        assert_eq!(r, ComplexMatrix::from_diag(&[0.5, 0.5]));
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(
            partial_trace(&m, (2, 3), Subsystem::A1),
            Err(QlockError::DimensionMismatch { expected: 6, found: 4 })
        ));
    }

    #[test]
    fn from_row_major_rejects_non_square() {
        assert!(ComplexMatrix::from_row_major(vec![ONE; 3]).is_err());
        assert!(ComplexMatrix::from_row_major(vec![C64::new(f64::NAN, 0.0)]).is_err());
    }
}
