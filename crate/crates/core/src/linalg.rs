//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Largest singular value. Zero for empty matrices.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_slice(v: &[C64]) -> f64 {
    v.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

/// |u⟩⟨v|
pub fn outer(u: &CVector, v: &CVector) -> CMatrix {
    u * v.adjoint()
}

/// ⟨u, v⟩, conjugate-linear in the first slot.
pub fn inner(u: &CVector, v: &CVector) -> C64 {
    u.dotc(v)
}

/// ⟨u, A v⟩
pub fn sandwich(u: &CVector, a: &CMatrix, v: &CVector) -> C64 {
    u.dotc(&(a * v))
}

/// Block-diagonal direct sum a ⊕ b.
pub fn direct_sum(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = CMatrix::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

/// Hermitian part (A + A*)/2.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// Eigenvalues of the Hermitian part of `a`, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

pub fn min_hermitian_eigenvalue(a: &CMatrix) -> f64 {
    hermitian_eigenvalues(a).first().copied().unwrap_or(0.0)
}

pub fn max_hermitian_eigenvalue(a: &CMatrix) -> f64 {
    hermitian_eigenvalues(a).last().copied().unwrap_or(0.0)
}

/// n-fold Kronecker power of a vector; the empty power is the scalar 1.
pub fn kron_vectors<'a, I>(vs: I) -> CVector
where
    I: IntoIterator<Item = &'a CVector>,
{
    vs.into_iter()
        .fold(CVector::from_element(1, ONE), |acc, v| kron_vec(&acc, v))
}

/// Column vector from a slice of complex numbers.
pub fn cvec(v: &[C64]) -> CVector {
    CVector::from_column_slice(v)
}

/// Column vector from real entries.
pub fn rvec(v: &[f64]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|&x| re(x)))
}

/// Square matrix from real row-major entries.
pub fn rmat(n: usize, rows: &[f64]) -> CMatrix {
    assert_eq!(rows.len(), n * n);
    CMatrix::from_row_iterator(n, n, rows.iter().map(|&x| re(x)))
}

/// Hat-lift (1, c) ∈ ℂ ⊕ ℂ^d.
pub fn hat(c: &CVector) -> CVector {
    let mut out = CVector::zeros(c.len() + 1);
    out[0] = ONE;
    out.rows_mut(1, c.len()).copy_from(c);
    out
}
