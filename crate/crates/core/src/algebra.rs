//! Dense complex linear algebra for the handful of small spaces the games need.
//!
//! Every built-in operator has entries in {0, ±1, ±i, ±1/2}, so plain `f64`
//! arithmetic is exact for all products that occur. Comparisons still go
//! through [`TOLERANCE`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Absolute tolerance used for every floating comparison in the crate.
pub const TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("non-finite component in complex scalar ({re}, {im})")]
    NonFinite { re: f64, im: f64 },
    #[error("matrix of {rows}x{cols} needs {expected} entries, got {got}")]
    BadShape {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("operator is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("operator is not an involution (deviation of O^2 from I is {0:e})")]
    NotInvolutory(f64),
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };
    pub const ONE: Complex = Complex { re: 1.0, im: 0.0 };
    pub const I: Complex = Complex { re: 0.0, im: 1.0 };

    pub fn new(re: f64, im: f64) -> Result<Self, AlgebraError> {
        if re.is_finite() && im.is_finite() {
            Ok(Complex { re, im })
        } else {
            Err(AlgebraError::NonFinite { re, im })
        }
    }

    pub const fn real(re: f64) -> Self {
        Complex { re, im: 0.0 }
    }

    pub fn conj(self) -> Self {
        Complex {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, k: f64) -> Self {
        Complex {
            re: self.re * k,
            im: self.im * k,
        }
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, o: Complex) -> Complex {
        Complex {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, o: Complex) -> Complex {
        Complex {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, o: Complex) -> Complex {
        Complex {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im == 0.0 {
            write!(f, "{}", self.re)
        } else if self.im < 0.0 {
            write!(f, "{}-{}i", self.re, -self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex>) -> Result<Self, AlgebraError> {
        if entries.len() != rows * cols {
            return Err(AlgebraError::BadShape {
                rows,
                cols,
                expected: rows * cols,
                got: entries.len(),
            });
        }
        if let Some(c) = entries.iter().find(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(AlgebraError::NonFinite { re: c.re, im: c.im });
        }
        Ok(Matrix {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from real entries given row by row.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self, AlgebraError> {
        Matrix::new(rows, cols, entries.iter().map(|&r| Complex::real(r)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![Complex::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Complex::ONE;
        }
        m
    }

    pub fn pauli_x() -> Self {
        Matrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2")
    }

    pub fn pauli_y() -> Self {
        Matrix {
            rows: 2,
            cols: 2,
            entries: vec![Complex::ZERO, -Complex::I, Complex::I, Complex::ZERO],
        }
    }

    pub fn pauli_z() -> Self {
        Matrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("2x2")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.entries[row * self.cols + col]
    }

    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    pub fn adjoint(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.entries[c * self.rows + r] = self.get(r, c).conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix, AlgebraError> {
        if self.cols != other.rows {
            return Err(AlgebraError::DimensionMismatch {
                left: self.cols,
                right: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == Complex::ZERO {
                    continue;
                }
                for c in 0..other.cols {
                    let idx = r * other.cols + c;
                    out.entries[idx] = out.entries[idx] + a * other.get(k, c);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, AlgebraError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(AlgebraError::DimensionMismatch {
                left: self.rows * self.cols,
                right: other.rows * other.cols,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| a + b)
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn scale(&self, k: Complex) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&e| e * k).collect(),
        }
    }

    /// Largest entrywise modulus of `self - other`; `None` on shape mismatch.
    pub fn max_deviation(&self, other: &Matrix) -> Option<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        Some(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }

    pub fn approx_eq(&self, other: &Matrix) -> bool {
        self.max_deviation(other).is_some_and(|d| d <= TOLERANCE)
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && self.approx_eq(&self.adjoint())
    }

    /// Checks that `self` is a Hermitian involution, i.e. a ±1-valued observable.
    pub fn check_observable(&self) -> Result<(), AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let herm = self.max_deviation(&self.adjoint()).unwrap_or(f64::INFINITY);
        if herm > TOLERANCE {
            return Err(AlgebraError::NotHermitian(herm));
        }
        let square = self.matmul(self)?;
        let inv = square
            .max_deviation(&Matrix::identity(self.rows))
            .unwrap_or(f64::INFINITY);
        if inv > TOLERANCE {
            return Err(AlgebraError::NotInvolutory(inv));
        }
        Ok(())
    }

    /// Max entry of the commutator `AB - BA`.
    pub fn commutator_norm(&self, other: &Matrix) -> Result<f64, AlgebraError> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        Ok(ab.max_deviation(&ba).unwrap_or(f64::INFINITY))
    }
}

/// Kronecker product, `a` index major.
pub fn tensor(a: &Matrix, b: &Matrix) -> Matrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = Matrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a.get(ar, ac);
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    let r = ar * b.rows + br;
                    let c = ac * b.cols + bc;
                    out.entries[r * cols + c] = x * b.get(br, bc);
                }
            }
        }
    }
    out
}

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex>) -> Result<Self, AlgebraError> {
        if let Some(c) = amplitudes
            .iter()
            .find(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(AlgebraError::NonFinite { re: c.re, im: c.im });
        }
        let n: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (n - 1.0).abs() > TOLERANCE {
            return Err(AlgebraError::NotNormalized(n));
        }
        Ok(StateVector { amplitudes })
    }

    /// Computational basis vector `|index⟩` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex::ZERO; dim];
        amplitudes[index] = Complex::ONE;
        StateVector { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Matrix-vector product. The result is not renormalized.
pub fn apply(op: &Matrix, v: &StateVector) -> Result<Vec<Complex>, AlgebraError> {
    if !op.is_square() {
        return Err(AlgebraError::NotSquare {
            rows: op.rows,
            cols: op.cols,
        });
    }
    if op.cols != v.dim() {
        return Err(AlgebraError::DimensionMismatch {
            left: op.cols,
            right: v.dim(),
        });
    }
    Ok((0..op.rows)
        .map(|r| {
            (0..op.cols).fold(Complex::ZERO, |acc, c| acc + op.get(r, c) * v.amplitude(c))
        })
        .collect())
}

/// `(I + outcome·obs) / 2` for a ±1-valued observable.
pub fn projector(obs: &Matrix, outcome: i8) -> Result<Matrix, AlgebraError> {
    obs.check_observable()?;
    let s = if outcome >= 0 { 0.5 } else { -0.5 };
    Matrix::identity(obs.rows)
        .scale(Complex::real(0.5))
        .add(&obs.scale(Complex::real(s)))
}

/// `⟨v|op|v⟩`.
pub fn expectation(v: &StateVector, op: &Matrix) -> Result<Complex, AlgebraError> {
    let w = apply(op, v)?;
    Ok(v
        .amplitudes
        .iter()
        .zip(&w)
        .fold(Complex::ZERO, |acc, (&a, &b)| acc + a.conj() * b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis4(i: usize) -> StateVector {
        StateVector::basis(4, i)
    }

    #[test]
    fn complex_rejects_nan() {
        assert!(Complex::new(f64::NAN, 0.0).is_err());
        assert!(Complex::new(0.0, f64::INFINITY).is_err());
        assert!(Complex::new(1.0, -2.0).is_ok());
    }

    #[test]
    fn tensor_of_identities() {
        assert_eq!(
            tensor(&Matrix::identity(2), &Matrix::identity(2)),
            Matrix::identity(4)
        );
    }

    #[test]
    fn tensor_z_identity_on_basis() {
        // basis (pol, path): |Hu⟩ = 0, |Vd⟩ = 3
        let zi = tensor(&Matrix::pauli_z(), &Matrix::identity(2));
        let hu = apply(&zi, &basis4(0)).unwrap();
        assert_eq!(hu, basis4(0).amplitudes().to_vec());
        let vd = apply(&zi, &basis4(3)).unwrap();
        let expected: Vec<Complex> = basis4(3).amplitudes().iter().map(|&a| -a).collect();
        assert_eq!(vd, expected);
    }

    #[test]
    fn tensor_xx_entries() {
        let xx = tensor(&Matrix::pauli_x(), &Matrix::pauli_x());
        assert_eq!(xx.get(0, 3), Complex::ONE);
        assert_eq!(xx.get(0, 0), Complex::ZERO);
        assert_eq!(xx.rows(), 4);
    }

    #[test]
    fn apply_rejects_mismatch() {
        let err = apply(&Matrix::identity(4), &StateVector::basis(2, 0)).unwrap_err();
        assert!(matches!(err, AlgebraError::DimensionMismatch { .. }));
    }

    #[test]
    fn projector_z_plus_is_h_ket_bra() {
        let p = projector(&Matrix::pauli_z(), 1).unwrap();
        assert!(p.approx_eq(&Matrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap()));
    }

    #[test]
    fn projector_x_plus_is_all_halves() {
        let p = projector(&Matrix::pauli_x(), 1).unwrap();
        assert!(p.approx_eq(&Matrix::from_real(2, 2, &[0.5; 4]).unwrap()));
    }

    #[test]
    fn projector_completeness_and_idempotence() {
        for o in [Matrix::pauli_x(), Matrix::pauli_y(), Matrix::pauli_z()] {
            let p = projector(&o, 1).unwrap();
            let m = projector(&o, -1).unwrap();
            assert!(p.add(&m).unwrap().approx_eq(&Matrix::identity(2)));
            assert!(p.matmul(&p).unwrap().approx_eq(&p));
            assert!(p.is_hermitian());
        }
    }

    #[test]
    fn projector_rejects_non_observables() {
        let not_inv = Matrix::from_real(2, 2, &[2.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            projector(&not_inv, 1),
            Err(AlgebraError::NotInvolutory(_))
        ));
        let not_herm = Matrix::new(
            2,
            2,
            vec![Complex::ZERO, Complex::I, Complex::I, Complex::ZERO],
        )
        .unwrap();
        assert!(matches!(
            projector(&not_herm, 1),
            Err(AlgebraError::NotHermitian(_))
        ));
    }

    #[test]
    fn expectation_of_identity_is_one() {
        let v = StateVector::new(vec![Complex::real(0.6), Complex::new(0.0, 0.8).unwrap()]).unwrap();
        let e = expectation(&v, &Matrix::identity(2)).unwrap();
        assert!((e.re - 1.0).abs() <= TOLERANCE && e.im.abs() <= TOLERANCE);
    }

    #[test]
    fn unnormalized_state_rejected() {
        assert!(StateVector::new(vec![Complex::ONE, Complex::ONE]).is_err());
    }

    #[test]
    fn paulis_are_observables() {
        for o in [Matrix::pauli_x(), Matrix::pauli_y(), Matrix::pauli_z()] {
            o.check_observable().unwrap();
        }
    }
}
