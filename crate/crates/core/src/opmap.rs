//! Linear maps from a bialgebra into matrices, stored on the basis.

use std::ops::{Add, Mul, Sub};

use crate::bialgebra::{eval_matrices, CounitalBialgebra};
use crate::error::{Error, Result};
use crate::linalg::{max_abs, op_norm, CMatrix, CVector, C64};

/// A linear map B → M_{rows×cols}(ℂ), one matrix per basis element.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMap {
    rows: usize,
    cols: usize,
    matrices: Vec<CMatrix>,
}

impl OperatorMap {
    pub fn new(matrices: Vec<CMatrix>) -> Result<Self> {
        let (rows, cols) = matrices
            .first()
            .map(|m| m.shape())
            .ok_or_else(|| Error::DimensionMismatch("operator map needs a basis".into()))?;
        if matrices.iter().any(|m| m.shape() != (rows, cols)) {
            return Err(Error::DimensionMismatch(
                "all basis images must have the same shape".into(),
            ));
        }
        Ok(Self {
            rows,
            cols,
            matrices,
        })
    }

    pub fn zeros(basis_len: usize, rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            matrices: vec![CMatrix::zeros(rows, cols); basis_len],
        }
    }

    /// The scalar-valued map given by a row vector.
    pub fn from_functional(f: &CVector) -> Self {
        Self {
            rows: 1,
            cols: 1,
            matrices: f.iter().map(|&z| CMatrix::from_element(1, 1, z)).collect(),
        }
    }

    /// b ↦ χ(b)·M for a fixed matrix M.
    pub fn scalar_times(chi: &CVector, m: &CMatrix) -> Self {
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            matrices: chi.iter().map(|&z| m * z).collect(),
        }
    }

    /// The counit as a 1×1-valued map.
    pub fn counit(b: &CounitalBialgebra) -> Self {
        Self::from_functional(b.counit())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn basis_len(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn at(&self, i: usize) -> &CMatrix {
        &self.matrices[i]
    }

    /// Image of an arbitrary element given by its coefficients.
    pub fn eval(&self, a: &CVector) -> CMatrix {
        eval_matrices(&self.matrices, a)
    }

    /// The scalar entries of a 1×1-valued map, as a row vector.
    pub fn as_functional(&self) -> Option<CVector> {
        (self.rows == 1 && self.cols == 1).then(|| {
            CVector::from_iterator(self.basis_len(), self.matrices.iter().map(|m| m[(0, 0)]))
        })
    }

    pub fn map_matrices(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        let matrices: Vec<CMatrix> = self.matrices.iter().map(f).collect();
        let (rows, cols) = matrices[0].shape();
        Self {
            rows,
            cols,
            matrices,
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        self.map_matrices(|m| m * z)
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.basis_len() != other.basis_len()
            || self.rows != other.rows
            || self.cols != other.cols
        {
            return Err(Error::DimensionMismatch(format!(
                "maps of shape {}×{} on {} basis elements vs {}×{} on {}",
                self.rows,
                self.cols,
                self.basis_len(),
                other.rows,
                other.cols,
                other.basis_len()
            )));
        }
        Ok(())
    }

    pub fn check_source(&self, b: &CounitalBialgebra) -> Result<()> {
        if self.basis_len() != b.dim() {
            return Err(Error::DimensionMismatch(format!(
                "map defined on {} basis elements, bialgebra has dimension {}",
                self.basis_len(),
                b.dim()
            )));
        }
        Ok(())
    }

    /// max over basis of the operator norm of the images.
    pub fn max_basis_norm(&self) -> f64 {
        self.matrices.iter().map(op_norm).fold(0.0, f64::max)
    }

    /// max over basis and entries of |·|.
    pub fn max_abs_entry(&self) -> f64 {
        self.matrices.iter().map(max_abs).fold(0.0, f64::max)
    }

    /// max over basis of ‖self(b_i) − other(b_i)‖ in operator norm.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| op_norm(&(a - b)))
            .fold(0.0, f64::max))
    }
}

impl Add for &OperatorMap {
    type Output = OperatorMap;
    fn add(self, rhs: &OperatorMap) -> OperatorMap {
        self.check_compatible(rhs)
            .expect("operator maps must agree in shape");
        OperatorMap {
            rows: self.rows,
            cols: self.cols,
            matrices: self
                .matrices
                .iter()
                .zip(&rhs.matrices)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &OperatorMap {
    type Output = OperatorMap;
    fn sub(self, rhs: &OperatorMap) -> OperatorMap {
        self.check_compatible(rhs)
            .expect("operator maps must agree in shape");
        OperatorMap {
            rows: self.rows,
            cols: self.cols,
            matrices: self
                .matrices
                .iter()
                .zip(&rhs.matrices)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul<f64> for &OperatorMap {
    type Output = OperatorMap;
    fn mul(self, rhs: f64) -> OperatorMap {
        self.scale(C64::new(rhs, 0.0))
    }
}
