//! Single walk steps: the unitaries U_ξ^(h), isometries V_{ξ,D}^(h), the
//! step maps ρ^(h) / ψ^(h) they induce, and the exact error expansion
//! relating them to the generator.

use serde::Serialize;

use crate::bialgebra::CounitalBialgebra;
use crate::error::{Error, Result};
use crate::linalg::{direct_sum, identity, max_abs, op_norm, re, CMatrix, CVector, C64, ONE};
use crate::opmap::OperatorMap;
use crate::qsmaps::{generator_from_triple, scale_map, Character, ImplementingTriple};
use crate::tolerance;

/// One walk step of length h.
#[derive(Debug, Clone)]
pub struct WalkStep {
    pub h: f64,
    /// c_h = √(1 − h‖ξ‖²)
    pub c_h: f64,
    /// s_h = h^{1/2} ξ
    pub s_h: CVector,
    /// d_h = c_h − 1
    pub d_h: f64,
    /// Orthogonal projection onto ℂξ (zero when ξ = 0).
    pub q: CMatrix,
    /// U_ξ^(h) on ℂ ⊕ ℂ^p, or V_{ξ,D}^(h) = U·diag(1, D).
    pub operator: CMatrix,
}

impl WalkStep {
    /// max(‖V*V − I‖, and for square V also ‖VV* − I‖), max-abs entries.
    pub fn unitarity_residual(&self) -> f64 {
        let v = &self.operator;
        let mut r = max_abs(&(v.adjoint() * v - identity(v.ncols())));
        if v.is_square() {
            r = r.max(max_abs(&(v * v.adjoint() - identity(v.nrows()))));
        }
        r
    }

    /// max(|c_h² + ‖s_h‖² − 1|, |d_h + h‖ξ‖²/(1 + c_h)|)
    pub fn scalar_identity_residual(&self) -> f64 {
        let s2 = self.s_h.norm_squared();
        let pyth = (self.c_h * self.c_h + s2 - 1.0).abs();
        let dh = (self.d_h + s2 / (1.0 + self.c_h)).abs();
        pyth.max(dh)
    }
}

fn check_step(xi: &CVector, h: f64) -> Result<()> {
    if !(h > 0.0) {
        return Err(Error::NonPositiveStep(h));
    }
    let value = h * xi.norm_squared();
    if !(value <= 1.0) {
        return Err(Error::StepTooLarge { value });
    }
    Ok(())
}

/// U = [[c_h, −s_h*], [s_h, c_h Q + Q^⊥]].
pub fn build_unitary(xi: &CVector, h: f64) -> Result<WalkStep> {
    check_step(xi, h)?;
    let p = xi.len();
    let norm_sq = xi.norm_squared();
    let c_h = (1.0 - h * norm_sq).sqrt();
    let s_h = xi * re(h.sqrt());
    let q = if norm_sq > 0.0 {
        xi * xi.adjoint() / re(norm_sq)
    } else {
        CMatrix::zeros(p, p)
    };
    let mut u = CMatrix::zeros(p + 1, p + 1);
    u[(0, 0)] = re(c_h);
    u.view_mut((0, 1), (1, p)).copy_from(&(-s_h.adjoint()));
    u.view_mut((1, 0), (p, 1)).copy_from(&s_h);
    let lower = &q * re(c_h) + (identity(p) - &q);
    u.view_mut((1, 1), (p, p)).copy_from(&lower);
    Ok(WalkStep {
        h,
        c_h,
        d_h: c_h - 1.0,
        s_h,
        q,
        operator: u,
    })
}

/// V = U_ξ^(h)·diag(1, D): ℂ ⊕ ℂ^d → ℂ ⊕ ℂ^p.
pub fn build_isometry(xi: &CVector, d: &CMatrix, h: f64) -> Result<WalkStep> {
    if d.nrows() != xi.len() {
        return Err(Error::DimensionMismatch(format!(
            "D has {} rows, ξ has length {}",
            d.nrows(),
            xi.len()
        )));
    }
    let defect = max_abs(&(d.adjoint() * d - identity(d.ncols())));
    if !(defect <= tolerance::IDENTITY) {
        return Err(Error::NonIsometric(defect));
    }
    let mut step = build_unitary(xi, h)?;
    let one = CMatrix::from_element(1, 1, ONE);
    step.operator = &step.operator * direct_sum(&one, d);
    Ok(step)
}

/// b ↦ V*(χ(b) ⊕ π(b))V
fn conjugate_amplified(
    triple: &ImplementingTriple,
    chi: &Character,
    v: &CMatrix,
) -> Result<OperatorMap> {
    let v_adj = v.adjoint();
    let mats = triple
        .pi
        .iter()
        .enumerate()
        .map(|(i, pi)| {
            let amp = direct_sum(&CMatrix::from_element(1, 1, chi.at(i)), pi);
            &v_adj * amp * v
        })
        .collect();
    OperatorMap::new(mats)
}

/// ρ^(h)(b) = U*(χ(b) ⊕ π(b))U, a *-representation on ℂ ⊕ ℂ^p.
pub fn build_walk_rep(
    b: &CounitalBialgebra,
    triple: &ImplementingTriple,
    chi: &Character,
    h: f64,
) -> Result<OperatorMap> {
    triple.validate(b, tolerance::IDENTITY)?;
    if triple.isometry.is_some() {
        return Err(Error::InvalidTriple(
            "build_walk_rep needs D absent; use build_walk_cp".into(),
        ));
    }
    let step = build_unitary(&triple.xi, h)?;
    conjugate_amplified(triple, chi, &step.operator)
}

/// ψ^(h)(b) = V*(χ(b) ⊕ π(b))V, completely positive and preunital.
pub fn build_walk_cp(
    b: &CounitalBialgebra,
    triple: &ImplementingTriple,
    chi: &Character,
    h: f64,
) -> Result<OperatorMap> {
    triple.validate(b, tolerance::IDENTITY)?;
    let d = triple
        .isometry
        .as_ref()
        .ok_or_else(|| Error::InvalidTriple("build_walk_cp needs an isometry D".into()))?;
    let step = build_isometry(&triple.xi, d, h)?;
    conjugate_amplified(triple, chi, &step.operator)
}

/// The walk step matching [`generator_from_triple`]: ρ^(h) without D,
/// ψ^(h) with D.
pub fn walk_map(
    b: &CounitalBialgebra,
    triple: &ImplementingTriple,
    chi: &Character,
    h: f64,
) -> Result<OperatorMap> {
    match triple.isometry {
        None => build_walk_rep(b, triple, chi, h),
        Some(_) => build_walk_cp(b, triple, chi, h),
    }
}

/// The h-independent maps φ₁, φ₂ of the error expansion.
///
/// With γ = ⟨ξ, ν(·)ξ⟩, η = D*ξ (η = ξ without D), X = |ξ⟩⟨ξ|:
/// φ₁ = [[0, γ⟨η|], [γ|η⟩, D*(Xν + νX)D]] and φ₂ = γ·diag(0, D*XD).
pub fn error_terms(
    b: &CounitalBialgebra,
    triple: &ImplementingTriple,
    chi: &Character,
) -> Result<(OperatorMap, OperatorMap)> {
    triple.validate(b, tolerance::IDENTITY)?;
    let d = triple.isometry_or_identity();
    let d_adj = d.adjoint();
    let eta = triple.eta();
    let x = &triple.xi * triple.xi.adjoint();
    let dxd = &d_adj * &x * &d;
    let k = d.ncols();
    let gammas = triple.gamma(chi);
    let mut phi1 = Vec::with_capacity(b.dim());
    let mut phi2 = Vec::with_capacity(b.dim());
    for (nu, &g) in triple.nu(chi).iter().zip(gammas.iter()) {
        let mut m1 = CMatrix::zeros(k + 1, k + 1);
        m1.view_mut((0, 1), (1, k)).copy_from(&(eta.adjoint() * g));
        m1.view_mut((1, 0), (k, 1)).copy_from(&(&eta * g));
        let lower = &d_adj * (&x * nu + nu * &x) * &d;
        m1.view_mut((1, 1), (k, k)).copy_from(&lower);
        phi1.push(m1);

        let mut m2 = CMatrix::zeros(k + 1, k + 1);
        m2.view_mut((1, 1), (k, k)).copy_from(&(&dxd * g));
        phi2.push(m2);
    }
    Ok((OperatorMap::new(phi1)?, OperatorMap::new(phi2)?))
}

/// The two expansion coefficients h/(1 + c_h) and h²/(1 + c_h)².
pub fn expansion_coefficients(xi_norm_sq: f64, h: f64) -> (f64, f64) {
    let c = (1.0 - h * xi_norm_sq).sqrt();
    let a = h / (1.0 + c);
    (a, a * a)
}

/// max over basis of ‖[φ − cD_h∘(ψ − χI)] − [(h/(1+c))φ₁ − (h²/(1+c)²)φ₂]‖.
pub fn verify_error_identity(
    b: &CounitalBialgebra,
    triple: &ImplementingTriple,
    chi: &Character,
    h: f64,
) -> Result<f64> {
    let phi = generator_from_triple(b, triple, chi)?;
    let psi = walk_map(b, triple, chi, h)?;
    let shifted = &psi - &OperatorMap::scalar_times(chi.values(), &identity(psi.rows()));
    let lhs = &phi - &scale_map(&shifted, h)?;
    let (phi1, phi2) = error_terms(b, triple, chi)?;
    let (a1, a2) = expansion_coefficients(triple.xi_norm_sq(), h);
    let rhs = &(&phi1 * a1) - &(&phi2 * a2);
    lhs.distance(&rhs)
}

#[derive(Debug, Clone, Serialize)]
pub struct VectorStateResidual {
    /// max_b |⟨e₀, ρ(b)e₀⟩ − ⟨Ω, (χ ⊕ π)(b) Ω⟩|, Ω = U e₀
    pub vector_state: f64,
    /// max_b |⟨e₀, ρ(b)e₀⟩ − (χ(b) + hγ(b))|
    pub perturbed_character: f64,
}

impl VectorStateResidual {
    pub fn max(&self) -> f64 {
        self.vector_state.max(self.perturbed_character)
    }
}

/// Checks that the vacuum expectation of ρ^(h) is the vector state of Ω =
/// U e₀ and equals χ + hγ.
pub fn vector_state_check(
    b: &CounitalBialgebra,
    triple: &ImplementingTriple,
    chi: &Character,
    h: f64,
) -> Result<VectorStateResidual> {
    let rho = build_walk_rep(b, triple, chi, h)?;
    let u = build_unitary(&triple.xi, h)?.operator;
    let omega = u.column(0).into_owned();
    let gamma = triple.gamma(chi);
    let mut out = VectorStateResidual {
        vector_state: 0.0,
        perturbed_character: 0.0,
    };
    for (i, pi) in triple.pi.iter().enumerate() {
        let top = rho.at(i)[(0, 0)];
        let amp = direct_sum(&CMatrix::from_element(1, 1, chi.at(i)), pi);
        let via_omega = omega.dotc(&(amp * &omega));
        let predicted = chi.at(i) + gamma[i] * h;
        out.vector_state = out.vector_state.max((top - via_omega).norm());
        out.perturbed_character = out.perturbed_character.max((top - predicted).norm());
    }
    Ok(out)
}

/// ‖U_ξ^(h) − I‖ in operator norm.
pub fn distance_from_identity(xi: &CVector, h: f64) -> Result<f64> {
    let u = build_unitary(xi, h)?.operator;
    Ok(op_norm(&(&u - identity(u.nrows()))))
}

/// Vacuum state value (χ + hγ)(a) on an arbitrary element.
pub fn perturbed_state(triple: &ImplementingTriple, chi: &Character, h: f64, a: &CVector) -> C64 {
    let gamma = triple.gamma(chi);
    chi.eval(a) + gamma.dot(a) * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bialgebra::build_group_algebra;
    use crate::group::FiniteGroup;
    use crate::linalg::{rvec, ZERO};
    use crate::qsmaps::{choi_min_eigenvalue, homomorphism_residual, unitality_residual};

    fn z2() -> CounitalBialgebra {
        build_group_algebra(&FiniteGroup::cyclic(2).unwrap())
    }

    #[test]
    fn zero_xi_gives_identity() {
        let s = build_unitary(&CVector::zeros(3), 0.7).unwrap();
        assert_eq!(s.operator, identity(4));
        assert_eq!(s.q, CMatrix::zeros(3, 3));
    }

    #[test]
    fn scalar_example_h_036() {
        let s = build_unitary(&rvec(&[1.0]), 0.36).unwrap();
        assert!((s.c_h - 0.8).abs() < 1e-15);
        assert!((s.s_h[0].re - 0.6).abs() < 1e-15);
        assert!((s.d_h + 0.2).abs() < 1e-15);
        assert!((-0.36 / 1.8 - s.d_h).abs() < 1e-15);
        assert!(s.scalar_identity_residual() < 1e-15);
        assert!(s.unitarity_residual() < 1e-15);
    }

    #[test]
    fn boundary_step_is_still_unitary() {
        let s = build_unitary(&rvec(&[2.0, 0.0]), 0.25).unwrap();
        assert_eq!(s.c_h, 0.0);
        assert!(s.unitarity_residual() < 1e-15);
        assert_eq!(s.operator[(2, 2)], ONE);
    }

    #[test]
    fn rejects_oversized_steps() {
        assert!(matches!(
            build_unitary(&rvec(&[2.0]), 0.3),
            Err(Error::StepTooLarge { .. })
        ));
        assert!(matches!(
            build_unitary(&rvec(&[2.0]), 0.0),
            Err(Error::NonPositiveStep(_))
        ));
    }

    #[test]
    fn zero_xi_walk_rep_is_amplified_pi() {
        let b = z2();
        let chi = Character::counit(&b);
        let t = ImplementingTriple::pair(b.faithful_rep().to_vec(), CVector::zeros(2));
        for h in [0.5, 0.01] {
            let rho = build_walk_rep(&b, &t, &chi, h).unwrap();
            for i in 0..2 {
                let amp = direct_sum(
                    &CMatrix::from_element(1, 1, chi.at(i)),
                    &b.faithful_rep()[i],
                );
                assert_eq!(*rho.at(i), amp);
            }
        }
    }

    #[test]
    fn walk_rep_converges_to_amplified_pi() {
        let b = z2();
        let chi = Character::counit(&b);
        let t = ImplementingTriple::pair(b.faithful_rep().to_vec(), rvec(&[1.0, 0.0]));
        let mut prev = f64::INFINITY;
        for h in [1e-1, 1e-2, 1e-3, 1e-4] {
            let rho = build_walk_rep(&b, &t, &chi, h).unwrap();
            let amp = OperatorMap::new(
                (0..2)
                    .map(|i| {
                        direct_sum(
                            &CMatrix::from_element(1, 1, chi.at(i)),
                            &b.faithful_rep()[i],
                        )
                    })
                    .collect(),
            )
            .unwrap();
            let d = rho.distance(&amp).unwrap();
            assert!(d < prev);
            prev = d;
            assert!(homomorphism_residual(&b, &rho) < 1e-12);
            assert!(unitality_residual(&b, &rho) < 1e-12);
        }
    }

    #[test]
    fn walk_cp_is_preunital_and_cp() {
        let b = build_group_algebra(&FiniteGroup::symmetric(3).unwrap());
        let chi = Character::counit(&b);
        let mut d = CMatrix::zeros(6, 1);
        d[(0, 0)] = ONE;
        let xi = rvec(&[0.5, 0.3, 0.0, -0.2, 0.1, 0.0]);
        let t = ImplementingTriple::with_isometry(b.faithful_rep().to_vec(), xi, d);
        for h in [0.5, 0.1, 0.01] {
            let psi = build_walk_cp(&b, &t, &chi, h).unwrap();
            assert!(unitality_residual(&b, &psi) < 1e-15);
            assert!(choi_min_eigenvalue(&b, &psi) >= -1e-10);
        }
    }

    #[test]
    fn identity_isometry_reproduces_walk_rep() {
        let b = z2();
        let chi = Character::counit(&b);
        let xi = rvec(&[0.8, -0.3]);
        let t = ImplementingTriple::pair(b.faithful_rep().to_vec(), xi.clone());
        let td = ImplementingTriple::with_isometry(b.faithful_rep().to_vec(), xi, identity(2));
        let a = build_walk_rep(&b, &t, &chi, 0.2).unwrap();
        let c = build_walk_cp(&b, &td, &chi, 0.2).unwrap();
        assert!(a.distance(&c).unwrap() < 1e-15);
    }

    #[test]
    fn error_terms_vanish_for_zero_xi() {
        let b = z2();
        let chi = Character::counit(&b);
        let t = ImplementingTriple::pair(b.faithful_rep().to_vec(), CVector::zeros(2));
        let (p1, p2) = error_terms(&b, &t, &chi).unwrap();
        assert_eq!(p1.max_abs_entry(), 0.0);
        assert_eq!(p2.max_abs_entry(), 0.0);
    }

    #[test]
    fn error_terms_scalar_specialisation() {
        // One-dimensional h: π = a character of C(Z₂) ... here the sign
        // character of ℂ[Z₂], ξ = 0.7.
        let b = z2();
        let chi = Character::counit(&b);
        let sign = Character::stored(&b, 1).unwrap();
        let pi = (0..2)
            .map(|i| CMatrix::from_element(1, 1, sign.at(i)))
            .collect();
        let xi = 0.7;
        let t = ImplementingTriple::pair(pi, rvec(&[xi]));
        let (p1, _) = error_terms(&b, &t, &chi).unwrap();
        for i in 0..2 {
            let nu = sign.at(i) - chi.at(i);
            let gamma = nu * xi * xi;
            let m = p1.at(i);
            assert_eq!(m[(0, 0)], ZERO);
            assert!((m[(0, 1)] - gamma * xi).norm() < 1e-15);
            assert!((m[(1, 0)] - gamma * xi).norm() < 1e-15);
            assert!((m[(1, 1)] - nu * 2.0 * xi * xi).norm() < 1e-15);
        }
    }

    #[test]
    fn error_identity_unitary_z2() {
        let b = z2();
        let chi = Character::counit(&b);
        let t = ImplementingTriple::pair(b.faithful_rep().to_vec(), rvec(&[1.0, 0.0]));
        for h in [0.5, 0.1, 0.01] {
            assert!(verify_error_identity(&b, &t, &chi, h).unwrap() < 1e-12);
        }
    }

    #[test]
    fn vector_state_z2() {
        let b = z2();
        let chi = Character::counit(&b);
        let t = ImplementingTriple::pair(b.faithful_rep().to_vec(), rvec(&[1.0, 0.0]));
        let r = vector_state_check(&b, &t, &chi, 0.36).unwrap();
        assert!(r.max() < 1e-12, "{r:?}");
        // positivity of χ + hγ on b*b
        for i in 0..2 {
            let bb = b.star_product(i, i);
            assert!(perturbed_state(&t, &chi, 0.36, &bb).re >= -1e-12);
        }
        let t0 = ImplementingTriple::pair(b.faithful_rep().to_vec(), CVector::zeros(2));
        for i in 0..2 {
            assert_eq!(perturbed_state(&t0, &chi, 0.36, &b.basis(i)), chi.at(i));
        }
    }

    #[test]
    fn distance_from_identity_shrinks() {
        let xi = rvec(&[1.0, 2.0]);
        let mut prev = f64::INFINITY;
        for k in 0..8 {
            let h = 0.2 / 2f64.powi(k);
            let d = distance_from_identity(&xi, h).unwrap();
            assert!(d < prev);
            prev = d;
        }
    }
}
