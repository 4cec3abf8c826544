//! Convolution of maps on a bialgebra, iterates, lifted maps and
//! convolution exponentials.

use crate::bialgebra::CounitalBialgebra;
use crate::error::{Error, Result};
use crate::linalg::{kron, max_abs, op_norm, CMatrix, CVector, C64, ONE, ZERO};
use crate::opmap::OperatorMap;

/// A scalar functional on the bialgebra, as a row vector on the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional(pub CVector);

impl Functional {
    pub fn counit(b: &CounitalBialgebra) -> Self {
        Self(b.counit().clone())
    }

    pub fn values(&self) -> &CVector {
        &self.0
    }

    pub fn eval(&self, a: &CVector) -> C64 {
        self.0.dot(a)
    }

    /// (self ⋆ other)(b_i) = Σ_{jk} Δ_i^{jk} self(b_j) other(b_k)
    pub fn convolve(&self, b: &CounitalBialgebra, other: &Self) -> Self {
        let n = b.dim();
        let mut out = CVector::zeros(n);
        for i in 0..n {
            let mut acc = ZERO;
            for j in 0..n {
                let fj = self.0[j];
                if fj == ZERO {
                    continue;
                }
                for k in 0..n {
                    acc += b.delta(i, j, k) * fj * other.0[k];
                }
            }
            out[i] = acc;
        }
        Self(out)
    }

    pub fn to_map(&self) -> OperatorMap {
        OperatorMap::from_functional(&self.0)
    }
}

/// (f ⋆ g)(b_i) = Σ_{jk} Δ_i^{jk} f(b_j) ⊗ g(b_k), a map into B(H₁ ⊗ H₂).
pub fn convolve(b: &CounitalBialgebra, f: &OperatorMap, g: &OperatorMap) -> Result<OperatorMap> {
    f.check_source(b)?;
    g.check_source(b)?;
    let n = b.dim();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = CMatrix::zeros(f.rows() * g.rows(), f.cols() * g.cols());
        for j in 0..n {
            for k in 0..n {
                let c = b.delta(i, j, k);
                if c != ZERO {
                    acc += kron(f.at(j), g.at(k)) * c;
                }
            }
        }
        out.push(acc);
    }
    OperatorMap::new(out)
}

/// (f ⊙ g)(b_i) = Σ_{jk} Δ_i^{jk} f(b_j) g(b_k): convolution with the matrix
/// product on a single space, the operation under which exp_⋆ of an
/// operator-valued map forms a semigroup.
pub fn convolve_product(
    b: &CounitalBialgebra,
    f: &OperatorMap,
    g: &OperatorMap,
) -> Result<OperatorMap> {
    f.check_source(b)?;
    g.check_source(b)?;
    if f.cols() != g.rows() {
        return Err(Error::DimensionMismatch(
            "matrix product shapes differ".into(),
        ));
    }
    let n = b.dim();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = CMatrix::zeros(f.rows(), g.cols());
        for j in 0..n {
            for k in 0..n {
                let c = b.delta(i, j, k);
                if c != ZERO {
                    acc += f.at(j) * g.at(k) * c;
                }
            }
        }
        out.push(acc);
    }
    OperatorMap::new(out)
}

fn check_cap(base: usize, n: usize, cap: usize) -> Result<usize> {
    let mut dim: usize = 1;
    for _ in 0..n {
        dim = dim
            .checked_mul(base)
            .filter(|&d| d <= cap)
            .ok_or(Error::DimensionCap {
                dim: base.saturating_pow(n as u32),
                cap,
            })?;
    }
    Ok(dim)
}

/// ψ^{⋆0} = ε, ψ^{⋆n} = ψ^{⋆(n−1)} ⋆ ψ.
pub fn convolution_iterates(
    b: &CounitalBialgebra,
    psi: &OperatorMap,
    n: usize,
    cap: usize,
) -> Result<OperatorMap> {
    psi.check_source(b)?;
    check_cap(psi.rows().max(psi.cols()), n, cap)?;
    let mut acc = OperatorMap::counit(b);
    for _ in 0..n {
        acc = convolve(b, &acc, psi)?;
    }
    Ok(acc)
}

/// A map B → B ⊗ M_k, stored as Ψ(b_i) = Σ_j b_j ⊗ X_{ij}.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedMap {
    parts: Vec<Vec<CMatrix>>,
}

impl LiftedMap {
    pub fn identity(b: &CounitalBialgebra) -> Self {
        let n = b.dim();
        let parts = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| CMatrix::from_element(1, 1, if i == j { ONE } else { ZERO }))
                    .collect()
            })
            .collect();
        Self { parts }
    }

    /// X_{ij}
    pub fn part(&self, i: usize, j: usize) -> &CMatrix {
        &self.parts[i][j]
    }

    pub fn block_dim(&self) -> usize {
        self.parts[0][0].nrows()
    }

    /// (ε ⊗ id)∘Ψ
    pub fn counit_contract(&self, b: &CounitalBialgebra) -> OperatorMap {
        let eps = b.counit();
        let k = self.block_dim();
        let mats = self
            .parts
            .iter()
            .map(|row| {
                row.iter()
                    .zip(eps.iter())
                    .fold(CMatrix::zeros(k, k), |acc, (x, &e)| acc + x * e)
            })
            .collect();
        OperatorMap::new(mats).expect("nonempty")
    }

    /// max over (i, j) of ‖self.X_ij − other.X_ij‖.
    pub fn distance(&self, other: &Self) -> f64 {
        self.parts
            .iter()
            .flatten()
            .zip(other.parts.iter().flatten())
            .map(|(a, c)| {
                if a.shape() == c.shape() {
                    op_norm(&(a - c))
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Ψ = (id ⊗ ψ)∘Δ: X_{ij} = Σ_k Δ_i^{jk} ψ(b_k).
pub fn lift(b: &CounitalBialgebra, psi: &OperatorMap) -> Result<LiftedMap> {
    psi.check_source(b)?;
    let n = b.dim();
    let (r, c) = (psi.rows(), psi.cols());
    let parts = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).fold(CMatrix::zeros(r, c), |acc, k| {
                        let d = b.delta(i, j, k);
                        if d == ZERO {
                            acc
                        } else {
                            acc + psi.at(k) * d
                        }
                    })
                })
                .collect()
        })
        .collect();
    Ok(LiftedMap { parts })
}

/// Ψ^{•0} = id, Ψ^{•n} = (Ψ^{•(n−1)} ⊗ id)∘Ψ.
pub fn composition_iterates(
    b: &CounitalBialgebra,
    lifted: &LiftedMap,
    n: usize,
    cap: usize,
) -> Result<LiftedMap> {
    check_cap(lifted.block_dim(), n, cap)?;
    let dim = b.dim();
    let mut acc = LiftedMap::identity(b);
    for _ in 0..n {
        // Ψ^{•m}(b_i) = Σ_j Ψ^{•(m−1)}(b_j) ⊗ X_ij = Σ_l b_l ⊗ Σ_j Y_jl ⊗ X_ij
        let parts = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|l| {
                        let size = acc.block_dim() * lifted.block_dim();
                        (0..dim).fold(CMatrix::zeros(size, size), |sum, j| {
                            let x = lifted.part(i, j);
                            if max_abs(x) == 0.0 {
                                sum
                            } else {
                                sum + kron(acc.part(j, l), x)
                            }
                        })
                    })
                    .collect()
            })
            .collect();
        acc = LiftedMap { parts };
    }
    Ok(acc)
}

/// max over basis of ‖(ε ⊗ id)(Ψ^{•n}(b)) − ψ^{⋆n}(b)‖.
pub fn check_compatibility(
    b: &CounitalBialgebra,
    psi: &OperatorMap,
    n: usize,
    cap: usize,
) -> Result<f64> {
    let lifted = lift(b, psi)?;
    let composed = composition_iterates(b, &lifted, n, cap)?.counit_contract(b);
    let iterated = convolution_iterates(b, psi, n, cap)?;
    composed.distance(&iterated)
}

/// The generator T_ψ = (id ⊗ ψ)∘Δ on the coefficient space of B, kept as a
/// matrix so that exp_⋆(tψ) = ε∘exp(t T_ψ) can be evaluated for many t.
#[derive(Debug, Clone)]
pub struct FunctionalGenerator {
    counit: CVector,
    matrix: CMatrix,
}

impl FunctionalGenerator {
    pub fn new(b: &CounitalBialgebra, psi: &Functional) -> Self {
        let n = b.dim();
        // T(b_i) = Σ_{jk} Δ_i^{jk} ψ(b_k) b_j, column i.
        let matrix = CMatrix::from_fn(n, n, |j, i| {
            (0..n).map(|k| b.delta(i, j, k) * psi.0[k]).sum()
        });
        Self {
            counit: b.counit().clone(),
            matrix,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// exp_⋆(tψ)
    pub fn exp(&self, t: f64) -> Functional {
        let e = (&self.matrix * C64::new(t, 0.0)).exp();
        Functional((e.transpose() * &self.counit).into_owned())
    }
}

pub fn convolution_exponential(b: &CounitalBialgebra, psi: &Functional, t: f64) -> Functional {
    FunctionalGenerator::new(b, psi).exp(t)
}

/// Operator-valued analogue on B ⊗ M_k: T(b_i ⊗ X) = Σ Δ_i^{jk} b_j ⊗ ψ(b_k)X.
/// exp_⋆(tψ) is then a semigroup for [`convolve_product`].
#[derive(Debug, Clone)]
pub struct OperatorGenerator {
    n: usize,
    k: usize,
    counit: CVector,
    matrix: CMatrix,
}

impl OperatorGenerator {
    pub fn new(b: &CounitalBialgebra, psi: &OperatorMap) -> Result<Self> {
        psi.check_source(b)?;
        if psi.rows() != psi.cols() {
            return Err(Error::DimensionMismatch(
                "operator exponential needs square images".into(),
            ));
        }
        let n = b.dim();
        let k = psi.rows();
        let kk = k * k;
        let mut matrix = CMatrix::zeros(n * kk, n * kk);
        let eye = CMatrix::identity(k, k);
        // vec(AX) = (I ⊗ A) vec(X), column-major vec.
        let left: Vec<CMatrix> = psi.matrices().iter().map(|a| kron(&eye, a)).collect();
        for i in 0..n {
            for j in 0..n {
                let block = (0..n).fold(CMatrix::zeros(kk, kk), |acc, kx| {
                    let d = b.delta(i, j, kx);
                    if d == ZERO {
                        acc
                    } else {
                        acc + &left[kx] * d
                    }
                });
                matrix
                    .view_mut((j * kk, i * kk), (kk, kk))
                    .copy_from(&block);
            }
        }
        Ok(Self {
            n,
            k,
            counit: b.counit().clone(),
            matrix,
        })
    }

    pub fn exp(&self, t: f64) -> OperatorMap {
        let e = (&self.matrix * C64::new(t, 0.0)).exp();
        let kk = self.k * self.k;
        let mut vec_id = CVector::zeros(kk);
        for d in 0..self.k {
            vec_id[d * self.k + d] = ONE;
        }
        let mats = (0..self.n)
            .map(|i| {
                let mut start = CVector::zeros(self.n * kk);
                start.rows_mut(i * kk, kk).copy_from(&vec_id);
                let img = &e * start;
                let mut flat = CVector::zeros(kk);
                for j in 0..self.n {
                    flat += img.rows(j * kk, kk) * self.counit[j];
                }
                CMatrix::from_column_slice(self.k, self.k, flat.as_slice())
            })
            .collect();
        OperatorMap::new(mats).expect("nonempty")
    }
}

pub fn convolution_exponential_map(
    b: &CounitalBialgebra,
    psi: &OperatorMap,
    t: f64,
) -> Result<OperatorMap> {
    Ok(OperatorGenerator::new(b, psi)?.exp(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bialgebra::{build_function_algebra, build_group_algebra};
    use crate::group::FiniteGroup;
    use crate::linalg::re;

    fn sample_map(n: usize, k: usize, seed: f64) -> OperatorMap {
        OperatorMap::new(
            (0..n)
                .map(|i| {
                    CMatrix::from_fn(k, k, |r, c| {
                        C64::new(
                            ((i * 7 + r * 3 + c) as f64 * seed).sin(),
                            ((i + 2 * r + 5 * c) as f64 * seed).cos() * 0.5,
                        )
                    })
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn counit_is_a_two_sided_unit() {
        let b = build_group_algebra(&FiniteGroup::symmetric(3).unwrap());
        let f = sample_map(6, 2, 0.37);
        let eps = OperatorMap::counit(&b);
        assert!(convolve(&b, &eps, &f).unwrap().distance(&f).unwrap() < 1e-15);
        assert!(convolve(&b, &f, &eps).unwrap().distance(&f).unwrap() < 1e-15);
    }

    #[test]
    fn grouplike_convolution_is_tensor_product() {
        let b = build_group_algebra(&FiniteGroup::cyclic(3).unwrap());
        let f = sample_map(3, 2, 0.11);
        let g = sample_map(3, 3, 0.23);
        let fg = convolve(&b, &f, &g).unwrap();
        for x in 0..3 {
            assert_eq!(*fg.at(x), kron(f.at(x), g.at(x)));
        }
    }

    #[test]
    fn function_algebra_scalar_convolution_is_group_convolution() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let b = build_function_algebra(&g);
        let f = Functional(CVector::from_vec(vec![re(0.3), re(-1.2)]));
        let h = Functional(CVector::from_vec(vec![re(2.0), re(0.5)]));
        let conv = f.convolve(&b, &h);
        for x in 0..2 {
            let mut brute = ZERO;
            for s in 0..2 {
                for t in 0..2 {
                    if g.mul(s, t) == x {
                        brute += f.0[s] * h.0[t];
                    }
                }
            }
            assert_eq!(conv.0[x], brute);
        }
    }

    #[test]
    fn iterates_base_cases_and_grouplike_powers() {
        let b = build_group_algebra(&FiniteGroup::cyclic(2).unwrap());
        let psi = sample_map(2, 2, 0.9);
        assert_eq!(
            convolution_iterates(&b, &psi, 0, 4096).unwrap(),
            OperatorMap::counit(&b)
        );
        assert!(
            convolution_iterates(&b, &psi, 1, 4096)
                .unwrap()
                .distance(&psi)
                .unwrap()
                < 1e-15
        );
        let p3 = convolution_iterates(&b, &psi, 3, 4096).unwrap();
        for x in 0..2 {
            let expect = kron(&kron(psi.at(x), psi.at(x)), psi.at(x));
            assert!(op_norm(&(p3.at(x) - expect)) < 1e-14);
        }
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let b = build_group_algebra(&FiniteGroup::cyclic(2).unwrap());
        let psi = sample_map(2, 2, 0.4);
        assert!(matches!(
            convolution_iterates(&b, &psi, 7, 64),
            Err(Error::DimensionCap { .. })
        ));
        assert!(convolution_iterates(&b, &psi, 6, 64).is_ok());
        let lifted = lift(&b, &psi).unwrap();
        assert!(composition_iterates(&b, &lifted, 3, 4).is_err());
    }

    #[test]
    fn lift_of_counit_is_identity_and_contracts_back() {
        let b = build_function_algebra(&FiniteGroup::symmetric(3).unwrap());
        let l = lift(&b, &OperatorMap::counit(&b)).unwrap();
        assert_eq!(l, LiftedMap::identity(&b));
        let psi = sample_map(6, 2, 0.61);
        let back = lift(&b, &psi).unwrap().counit_contract(&b);
        assert_eq!(back, psi);
    }

    #[test]
    fn lift_on_grouplike_basis() {
        let b = build_group_algebra(&FiniteGroup::cyclic(3).unwrap());
        let psi = sample_map(3, 2, 0.3);
        let l = lift(&b, &psi).unwrap();
        for x in 0..3 {
            for j in 0..3 {
                let expect = if j == x {
                    psi.at(x).clone()
                } else {
                    CMatrix::zeros(2, 2)
                };
                assert_eq!(*l.part(x, j), expect);
            }
        }
    }

    #[test]
    fn composition_iterate_base_cases() {
        let b = build_group_algebra(&FiniteGroup::cyclic(2).unwrap());
        let psi = sample_map(2, 2, 0.5);
        let l = lift(&b, &psi).unwrap();
        assert_eq!(
            composition_iterates(&b, &l, 0, 4096).unwrap(),
            LiftedMap::identity(&b)
        );
        assert!(composition_iterates(&b, &l, 1, 4096).unwrap().distance(&l) < 1e-15);
        assert_eq!(check_compatibility(&b, &psi, 0, 4096).unwrap(), 0.0);
    }

    #[test]
    fn exponential_at_zero_and_grouplike_closed_form() {
        let b = build_group_algebra(&FiniteGroup::symmetric(3).unwrap());
        let psi = Functional(CVector::from_fn(6, |i, _| {
            C64::new(0.3 * i as f64 - 0.5, 0.1 * i as f64)
        }));
        assert!((convolution_exponential(&b, &psi, 0.0).0 - b.counit()).camax() < 1e-15);
        let t = 0.8;
        let e = convolution_exponential(&b, &psi, t);
        for x in 0..6 {
            assert!((e.0[x] - (psi.0[x] * t).exp()).norm() < 1e-13);
        }
    }

    #[test]
    fn exponential_semigroup_law() {
        let b = build_function_algebra(&FiniteGroup::symmetric(3).unwrap());
        let psi = Functional(CVector::from_fn(6, |i, _| C64::new((i as f64).cos(), 0.2)));
        let gen = FunctionalGenerator::new(&b, &psi);
        let lhs = gen.exp(0.3).convolve(&b, &gen.exp(0.7));
        assert!((lhs.0 - gen.exp(1.0).0).camax() < 1e-11);
    }

    #[test]
    fn operator_exponential_semigroup_and_derivative() {
        let b = build_group_algebra(&FiniteGroup::cyclic(2).unwrap());
        let psi = sample_map(2, 2, 0.77);
        let gen = OperatorGenerator::new(&b, &psi).unwrap();
        let lhs = convolve_product(&b, &gen.exp(0.4), &gen.exp(0.6)).unwrap();
        assert!(lhs.distance(&gen.exp(1.0)).unwrap() < 1e-11);
        let zero = gen.exp(0.0);
        for i in 0..2 {
            assert!(op_norm(&(zero.at(i) - CMatrix::identity(2, 2) * b.counit()[i])) < 1e-15);
        }
        let s = 1e-5;
        let fd = &(&gen.exp(s) - &gen.exp(-s)) * (0.5 / s);
        let rel = fd.distance(&psi).unwrap() / psi.max_basis_norm();
        assert!(rel < 1e-6, "{rel}");
    }

    #[test]
    fn scalar_exponential_derivative_matches() {
        let b = build_group_algebra(&FiniteGroup::symmetric(3).unwrap());
        let psi = Functional(CVector::from_fn(6, |i, _| C64::new(0.1 * i as f64, -0.2)));
        let gen = FunctionalGenerator::new(&b, &psi);
        let s = 1e-5;
        let fd = (gen.exp(s).0 - gen.exp(-s).0) * re(0.5 / s);
        let rel = (fd - &psi.0).camax() / psi.0.camax();
        assert!(rel < 1e-6);
    }
}
