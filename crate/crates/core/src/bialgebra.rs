//! Finite-dimensional counital C*-bialgebras stored by structure constants.
//!
//! An algebra of dimension n is described on a fixed basis {b_0, …, b_{n−1}}:
//! products b_i b_j = Σ_k m_{ijk} b_k, the involution by the coefficient
//! vectors of b_i*, the coproduct Δb_i = Σ_{jk} Δ_i^{jk} b_j ⊗ b_k and the
//! counit ε as a row vector. A faithful *-representation is carried along so
//! that positivity questions can be answered on concrete matrices.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::{max_abs, max_abs_slice, re, CMatrix, CVector, C64, ONE, ZERO};
use crate::tolerance;

/// Dense rank-3 complex tensor, row-major in (i, j, k).
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    dims: (usize, usize, usize),
    data: Vec<C64>,
}

impl Tensor3 {
    pub fn zeros(a: usize, b: usize, c: usize) -> Self {
        Self {
            dims: (a, b, c),
            data: vec![ZERO; a * b * c],
        }
    }

    pub fn from_vec(dims: (usize, usize, usize), data: Vec<C64>) -> Result<Self> {
        if data.len() != dims.0 * dims.1 * dims.2 {
            return Err(Error::DimensionMismatch(format!(
                "tensor of shape {dims:?} needs {} entries, got {}",
                dims.0 * dims.1 * dims.2,
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> C64 {
        self.data[(i * self.dims.1 + j) * self.dims.2 + k]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize, k: usize) -> &mut C64 {
        let (_, b, c) = self.dims;
        &mut self.data[(i * b + j) * c + k]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }
}

#[derive(Debug, Clone)]
pub struct CounitalBialgebra {
    dim: usize,
    labels: Vec<String>,
    structure_constants: Tensor3,
    involution: Vec<CVector>,
    unit: CVector,
    coproduct: Tensor3,
    counit: CVector,
    characters: Vec<CVector>,
    faithful_rep: Vec<CMatrix>,
}

/// The raw fields of a bialgebra, before any axiom is checked.
#[derive(Debug, Clone)]
pub struct BialgebraParts {
    pub labels: Vec<String>,
    pub structure_constants: Tensor3,
    pub involution: Vec<CVector>,
    pub unit: CVector,
    pub coproduct: Tensor3,
    pub counit: CVector,
    pub characters: Vec<CVector>,
    pub faithful_rep: Vec<CMatrix>,
}

impl CounitalBialgebra {
    /// Assembles a bialgebra after checking shapes only. Use
    /// [`verify_bialgebra`] (or [`CounitalBialgebra::checked`]) for axioms.
    pub fn from_parts(parts: BialgebraParts) -> Result<Self> {
        let n = parts.labels.len();
        if n == 0 {
            return Err(Error::DimensionMismatch(
                "dimension must be positive".into(),
            ));
        }
        let shape = |what: &str, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(Error::DimensionMismatch(format!(
                    "{what} has the wrong shape for dim {n}"
                )))
            }
        };
        shape(
            "structure_constants",
            parts.structure_constants.dims() == (n, n, n),
        )?;
        shape("coproduct", parts.coproduct.dims() == (n, n, n))?;
        shape(
            "involution",
            parts.involution.len() == n && parts.involution.iter().all(|v| v.len() == n),
        )?;
        shape("unit", parts.unit.len() == n)?;
        shape("counit", parts.counit.len() == n)?;
        shape("characters", parts.characters.iter().all(|c| c.len() == n))?;
        shape("faithful_rep", parts.faithful_rep.len() == n)?;
        let m = parts.faithful_rep[0].nrows();
        shape(
            "faithful_rep",
            m > 0 && parts.faithful_rep.iter().all(|r| r.shape() == (m, m)),
        )?;
        Ok(Self {
            dim: n,
            labels: parts.labels,
            structure_constants: parts.structure_constants,
            involution: parts.involution,
            unit: parts.unit,
            coproduct: parts.coproduct,
            counit: parts.counit,
            characters: parts.characters,
            faithful_rep: parts.faithful_rep,
        })
    }

    /// Like [`from_parts`](Self::from_parts) but rejects the first axiom whose
    /// residual exceeds `tol`.
    pub fn checked(parts: BialgebraParts, tol: f64) -> Result<Self> {
        let b = Self::from_parts(parts)?;
        verify_bialgebra(&b).first_failure(tol).map_or(Ok(b), Err)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn structure_constants(&self) -> &Tensor3 {
        &self.structure_constants
    }

    pub fn coproduct(&self) -> &Tensor3 {
        &self.coproduct
    }

    /// Δ_i^{jk}
    #[inline]
    pub fn delta(&self, i: usize, j: usize, k: usize) -> C64 {
        self.coproduct.get(i, j, k)
    }

    pub fn counit(&self) -> &CVector {
        &self.counit
    }

    pub fn unit(&self) -> &CVector {
        &self.unit
    }

    pub fn characters(&self) -> &[CVector] {
        &self.characters
    }

    pub fn faithful_rep(&self) -> &[CMatrix] {
        &self.faithful_rep
    }

    pub fn rep_dim(&self) -> usize {
        self.faithful_rep[0].nrows()
    }

    pub fn involution(&self) -> &[CVector] {
        &self.involution
    }

    /// Coefficient vector of the basis element b_i.
    pub fn basis(&self, i: usize) -> CVector {
        let mut v = CVector::zeros(self.dim);
        v[i] = ONE;
        v
    }

    pub fn product(&self, a: &CVector, b: &CVector) -> CVector {
        let n = self.dim;
        let mut out = CVector::zeros(n);
        for i in 0..n {
            if a[i] == ZERO {
                continue;
            }
            for j in 0..n {
                let ab = a[i] * b[j];
                if ab == ZERO {
                    continue;
                }
                for k in 0..n {
                    out[k] += ab * self.structure_constants.get(i, j, k);
                }
            }
        }
        out
    }

    /// a* = Σ conj(a_i) b_i*
    pub fn star(&self, a: &CVector) -> CVector {
        let mut out = CVector::zeros(self.dim);
        for (ai, bi_star) in a.iter().zip(&self.involution) {
            if *ai != ZERO {
                out += bi_star * ai.conj();
            }
        }
        out
    }

    /// Coefficients of b_i* b_j.
    pub fn star_product(&self, i: usize, j: usize) -> CVector {
        self.product(&self.involution[i], &self.basis(j))
    }

    /// Image of an element under the faithful representation.
    pub fn represent(&self, a: &CVector) -> CMatrix {
        eval_matrices(&self.faithful_rep, a)
    }

    /// Δ(a) as a coefficient vector on b_j ⊗ b_k (index j·n + k).
    pub fn coproduct_of(&self, a: &CVector) -> CVector {
        let n = self.dim;
        let mut out = CVector::zeros(n * n);
        for i in 0..n {
            if a[i] == ZERO {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    out[j * n + k] += a[i] * self.coproduct.get(i, j, k);
                }
            }
        }
        out
    }

    /// Product in B ⊗ B, componentwise.
    pub fn tensor_product(&self, x: &CVector, y: &CVector) -> CVector {
        let n = self.dim;
        let mut out = CVector::zeros(n * n);
        for (jk, &xv) in x.iter().enumerate() {
            if xv == ZERO {
                continue;
            }
            let (j, k) = (jk / n, jk % n);
            for (lm, &yv) in y.iter().enumerate() {
                if yv == ZERO {
                    continue;
                }
                let (l, m) = (lm / n, lm % n);
                let s = xv * yv;
                for p in 0..n {
                    let a = self.structure_constants.get(j, l, p);
                    if a == ZERO {
                        continue;
                    }
                    for q in 0..n {
                        out[p * n + q] += s * a * self.structure_constants.get(k, m, q);
                    }
                }
            }
        }
        out
    }

    /// Involution on B ⊗ B.
    pub fn tensor_star(&self, x: &CVector) -> CVector {
        let n = self.dim;
        let mut out = CVector::zeros(n * n);
        for (jk, &xv) in x.iter().enumerate() {
            if xv == ZERO {
                continue;
            }
            let (js, ks) = (&self.involution[jk / n], &self.involution[jk % n]);
            for p in 0..n {
                for q in 0..n {
                    out[p * n + q] += xv.conj() * js[p] * ks[q];
                }
            }
        }
        out
    }

    /// Whether Δ composed with the tensor flip equals Δ.
    pub fn is_cocommutative(&self, tol: f64) -> bool {
        let n = self.dim;
        (0..n).all(|i| {
            (0..n)
                .all(|j| (0..n).all(|k| (self.delta(i, j, k) - self.delta(i, k, j)).norm() <= tol))
        })
    }

    pub fn is_commutative(&self, tol: f64) -> bool {
        let n = self.dim;
        (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| {
                    (self.structure_constants.get(i, j, k) - self.structure_constants.get(j, i, k))
                        .norm()
                        <= tol
                })
            })
        })
    }

    /// Returns a copy with one coproduct entry shifted; for negative tests.
    pub fn with_perturbed_coproduct(&self, i: usize, j: usize, k: usize, by: C64) -> Self {
        let mut out = self.clone();
        *out.coproduct.get_mut(i, j, k) += by;
        out
    }

    pub fn to_parts(&self) -> BialgebraParts {
        BialgebraParts {
            labels: self.labels.clone(),
            structure_constants: self.structure_constants.clone(),
            involution: self.involution.clone(),
            unit: self.unit.clone(),
            coproduct: self.coproduct.clone(),
            counit: self.counit.clone(),
            characters: self.characters.clone(),
            faithful_rep: self.faithful_rep.clone(),
        }
    }
}

/// Σ_i a_i M_i
pub(crate) fn eval_matrices(mats: &[CMatrix], a: &CVector) -> CMatrix {
    let (r, c) = mats[0].shape();
    let mut out = CMatrix::zeros(r, c);
    for (m, &ai) in mats.iter().zip(a.iter()) {
        if ai != ZERO {
            out += m * ai;
        }
    }
    out
}

/// The commutative algebra C(G) of functions on a finite group, with basis of
/// point masses δ_g and coproduct Δδ_g = Σ_{st=g} δ_s ⊗ δ_t.
pub fn build_function_algebra(group: &FiniteGroup) -> CounitalBialgebra {
    let n = group.order();
    let mut mult = Tensor3::zeros(n, n, n);
    let mut coproduct = Tensor3::zeros(n, n, n);
    for g in 0..n {
        *mult.get_mut(g, g, g) = ONE;
        for s in 0..n {
            for t in 0..n {
                if group.mul(s, t) == g {
                    *coproduct.get_mut(g, s, t) = ONE;
                }
            }
        }
    }
    let basis = |g: usize| {
        let mut v = CVector::zeros(n);
        v[g] = ONE;
        v
    };
    let characters = (0..n).map(basis).collect::<Vec<_>>();
    let faithful_rep = (0..n)
        .map(|g| {
            let mut m = CMatrix::zeros(n, n);
            m[(g, g)] = ONE;
            m
        })
        .collect();
    let parts = BialgebraParts {
        labels: group.labels().iter().map(|l| format!("δ_{l}")).collect(),
        structure_constants: mult,
        involution: (0..n).map(basis).collect(),
        unit: CVector::from_element(n, ONE),
        coproduct,
        counit: basis(group.identity()),
        characters,
        faithful_rep,
    };
    CounitalBialgebra::from_parts(parts).expect("shapes are consistent by construction")
}

/// Search budget for linear characters of ℂ[G].
const CHARACTER_SEARCH_BUDGET: usize = 1 << 16;

/// The group algebra ℂ[G] with grouplike basis λ_g, counit ε(λ_g) = 1 and the
/// left regular representation.
pub fn build_group_algebra(group: &FiniteGroup) -> CounitalBialgebra {
    let n = group.order();
    let mut mult = Tensor3::zeros(n, n, n);
    let mut coproduct = Tensor3::zeros(n, n, n);
    for g in 0..n {
        *coproduct.get_mut(g, g, g) = ONE;
        for h in 0..n {
            *mult.get_mut(g, h, group.mul(g, h)) = ONE;
        }
    }
    let basis = |g: usize| {
        let mut v = CVector::zeros(n);
        v[g] = ONE;
        v
    };
    let e = group.exponent() as f64;
    let mut characters: Vec<CVector> = group
        .linear_characters(CHARACTER_SEARCH_BUDGET)
        .into_iter()
        .map(|ks| CVector::from_iterator(n, ks.into_iter().map(|k| root_of_unity(k as f64 / e))))
        .collect();
    // Trivial character first.
    characters.sort_by_key(|c| c.iter().any(|z| *z != ONE));
    let faithful_rep = (0..n)
        .map(|g| {
            let mut m = CMatrix::zeros(n, n);
            for h in 0..n {
                m[(group.mul(g, h), h)] = ONE;
            }
            m
        })
        .collect();
    let parts = BialgebraParts {
        labels: group.labels().iter().map(|l| format!("λ_{l}")).collect(),
        structure_constants: mult,
        involution: (0..n).map(|g| basis(group.inverse(g))).collect(),
        unit: basis(group.identity()),
        coproduct,
        counit: CVector::from_element(n, ONE),
        characters,
        faithful_rep,
    };
    CounitalBialgebra::from_parts(parts).expect("shapes are consistent by construction")
}

/// exp(2πi·x), exact on the real and imaginary axes.
fn root_of_unity(x: f64) -> C64 {
    let quarter = x * 4.0;
    if quarter.fract() == 0.0 {
        return match (quarter as i64).rem_euclid(4) {
            0 => ONE,
            1 => C64::new(0.0, 1.0),
            2 => re(-1.0),
            _ => C64::new(0.0, -1.0),
        };
    }
    let theta = std::f64::consts::TAU * x;
    C64::new(theta.cos(), theta.sin())
}

/// Residual of one axiom together with the basis indices where it peaks.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AxiomResidual {
    pub residual: f64,
    pub at: Vec<usize>,
}

impl AxiomResidual {
    fn record(&mut self, r: f64, at: &[usize]) {
        if r > self.residual || (self.at.is_empty() && r.is_nan()) {
            self.residual = r;
            self.at = at.to_vec();
        }
    }
}

/// Max residual per axiom.
#[derive(Debug, Clone, Default, Serialize)]
pub struct BialgebraReport {
    pub associativity: AxiomResidual,
    pub unit: AxiomResidual,
    pub involution: AxiomResidual,
    pub rep_homomorphism: AxiomResidual,
    /// Smallest singular value of the map a ↦ rep(a); zero means not faithful.
    pub rep_min_singular_value: f64,
    pub coassociativity: AxiomResidual,
    pub counit_law: AxiomResidual,
    pub coproduct_homomorphism: AxiomResidual,
    pub characters: AxiomResidual,
    pub cocommutative: bool,
    pub commutative: bool,
}

impl BialgebraReport {
    /// Axioms in checking order.
    pub fn axioms(&self) -> [(&'static str, &AxiomResidual); 8] {
        [
            ("associativity", &self.associativity),
            ("unit", &self.unit),
            ("involution", &self.involution),
            ("representation homomorphism", &self.rep_homomorphism),
            ("coassociativity", &self.coassociativity),
            ("counit law", &self.counit_law),
            ("coproduct homomorphism", &self.coproduct_homomorphism),
            ("character axioms", &self.characters),
        ]
    }

    pub fn max_residual(&self) -> f64 {
        self.axioms()
            .iter()
            .fold(0.0, |m, (_, a)| m.max(a.residual))
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.first_failure(tol).is_none()
    }

    /// First axiom (in checking order) above `tol`, as an error.
    pub fn first_failure(&self, tol: f64) -> Option<Error> {
        for (name, a) in self.axioms() {
            if !(a.residual <= tol) {
                return Some(Error::AxiomViolation {
                    axiom: name,
                    indices: a.at.clone(),
                    residual: a.residual,
                });
            }
            if name == "representation homomorphism" && !(self.rep_min_singular_value > tol) {
                return Some(Error::AxiomViolation {
                    axiom: "representation faithfulness",
                    indices: vec![],
                    residual: self.rep_min_singular_value,
                });
            }
        }
        None
    }
}

/// Exhaustive check of every bialgebra axiom over basis tuples.
pub fn verify_bialgebra(b: &CounitalBialgebra) -> BialgebraReport {
    let n = b.dim();
    let mut rep = BialgebraReport::default();
    let basis: Vec<CVector> = (0..n).map(|i| b.basis(i)).collect();
    let products: Vec<Vec<CVector>> = (0..n)
        .map(|i| (0..n).map(|j| b.product(&basis[i], &basis[j])).collect())
        .collect();

    for i in 0..n {
        for j in 0..n {
            let bij = &products[i][j];
            for k in 0..n {
                let left = b.product(bij, &basis[k]);
                let right = b.product(&basis[i], &products[j][k]);
                rep.associativity
                    .record(max_abs_slice((left - right).as_slice()), &[i, j, k]);
            }
        }
    }

    for i in 0..n {
        let l = b.product(b.unit(), &basis[i]) - &basis[i];
        let r = b.product(&basis[i], b.unit()) - &basis[i];
        rep.unit.record(
            max_abs_slice(l.as_slice()).max(max_abs_slice(r.as_slice())),
            &[i],
        );
    }

    for i in 0..n {
        let twice = b.star(&b.star(&basis[i])) - &basis[i];
        rep.involution.record(max_abs_slice(twice.as_slice()), &[i]);
        for j in 0..n {
            let lhs = b.star(&products[i][j]);
            let rhs = b.product(&b.star(&basis[j]), &b.star(&basis[i]));
            rep.involution
                .record(max_abs_slice((lhs - rhs).as_slice()), &[i, j]);
        }
    }

    let r = b.faithful_rep();
    let m = b.rep_dim();
    for i in 0..n {
        let adj = b.represent(&b.star(&basis[i])) - r[i].adjoint();
        rep.rep_homomorphism.record(max_abs(&adj), &[i]);
        for j in 0..n {
            let d = b.represent(&products[i][j]) - &r[i] * &r[j];
            rep.rep_homomorphism.record(max_abs(&d), &[i, j]);
        }
    }
    let unit_img = b.represent(b.unit()) - CMatrix::identity(m, m);
    rep.rep_homomorphism.record(max_abs(&unit_img), &[]);
    let stacked = CMatrix::from_fn(m * m, n, |row, col| r[col][(row % m, row / m)]);
    rep.rep_min_singular_value = if m * m < n {
        0.0
    } else {
        stacked
            .singular_values()
            .iter()
            .fold(f64::INFINITY, |acc, &s| acc.min(s))
    };

    for i in 0..n {
        // (id ⊗ Δ)Δ − (Δ ⊗ id)Δ on b_i, as an n³ tensor.
        for j in 0..n {
            for l in 0..n {
                for q in 0..n {
                    let mut left = ZERO;
                    let mut right = ZERO;
                    for k in 0..n {
                        left += b.delta(i, j, k) * b.delta(k, l, q);
                        right += b.delta(i, k, q) * b.delta(k, j, l);
                    }
                    rep.coassociativity
                        .record((left - right).norm(), &[i, j, l, q]);
                }
            }
        }
    }

    let eps = b.counit();
    for i in 0..n {
        for j in 0..n {
            let mut right_leg = ZERO;
            let mut left_leg = ZERO;
            for k in 0..n {
                right_leg += b.delta(i, j, k) * eps[k];
                left_leg += b.delta(i, k, j) * eps[k];
            }
            let target = if i == j { ONE } else { ZERO };
            rep.counit_law.record(
                (right_leg - target).norm().max((left_leg - target).norm()),
                &[i, j],
            );
        }
    }

    let deltas: Vec<CVector> = basis.iter().map(|x| b.coproduct_of(x)).collect();
    for i in 0..n {
        let star = b.coproduct_of(&b.star(&basis[i])) - b.tensor_star(&deltas[i]);
        rep.coproduct_homomorphism
            .record(max_abs_slice(star.as_slice()), &[i]);
        for j in 0..n {
            let d = b.coproduct_of(&products[i][j]) - b.tensor_product(&deltas[i], &deltas[j]);
            rep.coproduct_homomorphism
                .record(max_abs_slice(d.as_slice()), &[i, j]);
        }
    }
    let mut one_one = CVector::zeros(n * n);
    for j in 0..n {
        for k in 0..n {
            one_one[j * n + k] = b.unit()[j] * b.unit()[k];
        }
    }
    let d1 = b.coproduct_of(b.unit()) - one_one;
    rep.coproduct_homomorphism
        .record(max_abs_slice(d1.as_slice()), &[]);

    let all_characters = std::iter::once(b.counit()).chain(b.characters());
    for (c, chi) in all_characters.enumerate() {
        let ev = |a: &CVector| chi.dot(a);
        rep.characters.record((ev(b.unit()) - ONE).norm(), &[c]);
        for i in 0..n {
            let s = ev(&b.star(&basis[i])) - chi[i].conj();
            rep.characters.record(s.norm(), &[c, i]);
            for j in 0..n {
                let d = ev(&products[i][j]) - chi[i] * chi[j];
                rep.characters.record(d.norm(), &[c, i, j]);
            }
        }
    }

    rep.cocommutative = b.is_cocommutative(tolerance::IDENTITY);
    rep.commutative = b.is_commutative(tolerance::IDENTITY);
    rep
}
