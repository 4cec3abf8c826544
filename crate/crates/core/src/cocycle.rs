//! Reference values for the limit cocycle through its associated
//! convolution semigroups λ^{c,d}_t = exp_⋆(t φ_{c,d}).

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::bialgebra::CounitalBialgebra;
use crate::convolution::{Functional, FunctionalGenerator};
use crate::error::{Error, Result};
use crate::fock::{common_pieces, inner_integral, walk_matrix_element, StepFunction};
use crate::linalg::{hat, CVector, C64};
use crate::opmap::OperatorMap;
use crate::qsmaps::{generator_from_triple, Character, ImplementingTriple};
use crate::tolerance;
use crate::walk::walk_map;

/// φ_{c,d}(b) = ⟨ĉ, φ(b) d̂⟩ + ⟨c, d⟩ε(b).
pub fn assoc_generator(
    b: &CounitalBialgebra,
    phi: &OperatorMap,
    c: &CVector,
    d: &CVector,
) -> Result<Functional> {
    phi.check_source(b)?;
    if c.len() + 1 != phi.rows() || d.len() + 1 != phi.cols() {
        return Err(Error::DimensionMismatch(format!(
            "vectors of length {} and {} for a map into {}×{} matrices",
            c.len(),
            d.len(),
            phi.rows(),
            phi.cols()
        )));
    }
    let (ch, dh) = (hat(c), hat(d));
    let cd = c.dotc(d);
    Ok(Functional(CVector::from_iterator(
        b.dim(),
        phi.matrices()
            .iter()
            .zip(b.counit().iter())
            .map(|(m, e)| ch.dotc(&(m * &dh)) + cd * e),
    )))
}

/// The generator φ_{c,d} together with the data it was built from.
#[derive(Debug, Clone)]
pub struct SemigroupSpec {
    pub generator_functional: Functional,
    pub c: CVector,
    pub d: CVector,
    pub phi: OperatorMap,
}

impl SemigroupSpec {
    pub fn new(b: &CounitalBialgebra, phi: &OperatorMap, c: &CVector, d: &CVector) -> Result<Self> {
        Ok(Self {
            generator_functional: assoc_generator(b, phi, c, d)?,
            c: c.clone(),
            d: d.clone(),
            phi: phi.clone(),
        })
    }

    /// Max deviation of the stored functional from ⟨ĉ, φ(b) d̂⟩ + ⟨c, d⟩ε(b)
    /// over the basis.
    pub fn residual(&self, b: &CounitalBialgebra) -> Result<f64> {
        let fresh = assoc_generator(b, &self.phi, &self.c, &self.d)?;
        Ok((&fresh.0 - &self.generator_functional.0)
            .iter()
            .fold(0.0_f64, |m, z| m.max(z.norm())))
    }

    /// λ_t^{c,d} = exp_⋆(tφ_{c,d}).
    pub fn semigroup_at(&self, b: &CounitalBialgebra, t: f64) -> Functional {
        crate::convolution::convolution_exponential(b, &self.generator_functional, t)
    }
}

type Key = Vec<u64>;

fn key(c: &CVector, d: &CVector) -> Key {
    c.iter()
        .chain(d.iter())
        .flat_map(|z| [z.re.to_bits(), z.im.to_bits()])
        .collect()
}

/// Cocycle matrix elements for one generator φ, with the per-(c, d)
/// semigroup generators memoised.
#[derive(Debug)]
pub struct CocycleOracle<'a> {
    b: &'a CounitalBialgebra,
    phi: OperatorMap,
    cache: RwLock<HashMap<Key, Arc<FunctionalGenerator>>>,
}

impl<'a> CocycleOracle<'a> {
    pub fn new(b: &'a CounitalBialgebra, phi: OperatorMap) -> Result<Self> {
        phi.check_source(b)?;
        if phi.rows() != phi.cols() || phi.rows() == 0 {
            return Err(Error::DimensionMismatch(
                "generator must map into a square hat space".into(),
            ));
        }
        Ok(Self {
            b,
            phi,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn generator(&self) -> &OperatorMap {
        &self.phi
    }

    pub fn noise_dim(&self) -> usize {
        self.phi.rows() - 1
    }

    pub fn cached_generators(&self) -> usize {
        self.cache.read().map(|m| m.len()).unwrap_or(0)
    }

    fn semigroup(&self, c: &CVector, d: &CVector) -> Result<Arc<FunctionalGenerator>> {
        let k = key(c, d);
        if let Some(g) = self.cache.read().ok().and_then(|m| m.get(&k).cloned()) {
            return Ok(g);
        }
        let gen = Arc::new(FunctionalGenerator::new(
            self.b,
            &assoc_generator(self.b, &self.phi, c, d)?,
        ));
        if let Ok(mut m) = self.cache.write() {
            m.entry(k).or_insert_with(|| gen.clone());
        }
        Ok(gen)
    }

    /// λ^{c,d}_t
    pub fn semigroup_at(&self, c: &CVector, d: &CVector, t: f64) -> Result<Functional> {
        Ok(self.semigroup(c, d)?.exp(t))
    }

    /// The functional b ↦ ⟨ε(f), l_t(b) ε(g)⟩.
    pub fn functional(&self, f: &StepFunction, g: &StepFunction, t: f64) -> Result<Functional> {
        if f.noise_dim() != self.noise_dim() || g.noise_dim() != self.noise_dim() {
            return Err(Error::DimensionMismatch(format!(
                "step functions in noise dimension {}/{}, generator in {}",
                f.noise_dim(),
                g.noise_dim(),
                self.noise_dim()
            )));
        }
        let horizon = f.total_time().max(g.total_time());
        if t > horizon * (1.0 + tolerance::GRID_ALIGNMENT) + 1e-12 {
            return Err(Error::BeyondHorizon { t, horizon });
        }
        if t < 0.0 {
            return Err(Error::NonPositiveStep(t));
        }
        let mut acc = Functional::counit(self.b);
        for (dur, c, d) in common_pieces(f, g, 0.0, t) {
            acc = acc.convolve(self.b, &self.semigroup_at(&c, &d, dur)?);
        }
        let tail = inner_integral(f, g, t, horizon).exp();
        Ok(Functional(acc.0 * tail))
    }

    pub fn matrix_element(
        &self,
        a: &CVector,
        f: &StepFunction,
        g: &StepFunction,
        t: f64,
    ) -> Result<C64> {
        Ok(self.functional(f, g, t)?.eval(a))
    }
}

/// One-shot version of [`CocycleOracle::matrix_element`].
pub fn cocycle_matrix_element(
    b: &CounitalBialgebra,
    phi: &OperatorMap,
    a: &CVector,
    f: &StepFunction,
    g: &StepFunction,
    t: f64,
) -> Result<C64> {
    CocycleOracle::new(b, phi.clone())?.matrix_element(a, f, g, t)
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossValidationRow {
    pub h: f64,
    pub n: usize,
    pub cocycle: C64,
    pub walk: C64,
    pub error: f64,
}

/// |l − walk| for each h, rows sorted by h descending.
#[allow(clippy::too_many_arguments)]
pub fn cross_validate_against_walk(
    b: &CounitalBialgebra,
    phi: &OperatorMap,
    triple: &ImplementingTriple,
    chi: &Character,
    a: &CVector,
    f: &StepFunction,
    g: &StepFunction,
    t: f64,
    h_list: &[f64],
) -> Result<Vec<CrossValidationRow>> {
    let built = generator_from_triple(b, triple, chi)?;
    let mismatch = phi.distance(&built)?;
    if !(mismatch <= 1e-10) {
        return Err(Error::GeneratorMismatch(mismatch));
    }
    let reference = cocycle_matrix_element(b, phi, a, f, g, t)?;
    let mut hs = h_list.to_vec();
    hs.sort_by(|x, y| y.total_cmp(x));
    hs.into_iter()
        .map(|h| {
            let psi = walk_map(b, triple, chi, h)?;
            let walk = walk_matrix_element(b, &psi, a, f, g, t, h)?;
            Ok(CrossValidationRow {
                h,
                n: crate::fock::GridSpec::from_time(t, h)?.n,
                cocycle: reference,
                walk,
                error: (reference - walk).norm(),
            })
        })
        .collect()
}

/// max over basis of |⟨ĉ_h, ψ^(h)(b) d̂_h⟩ − ε(b) − hφ_{c,d}(b)| with
/// ĉ_h = (1, h^{1/2}c): the second-order remainder of the per-cell walk
/// functional.
pub fn first_order_remainder(
    b: &CounitalBialgebra,
    triple: &ImplementingTriple,
    c: &CVector,
    d: &CVector,
    h: f64,
) -> Result<f64> {
    let chi = Character::counit(b);
    let phi = generator_from_triple(b, triple, &chi)?;
    let gen = assoc_generator(b, &phi, c, d)?;
    let psi = walk_map(b, triple, &chi, h)?;
    let s = C64::new(h.sqrt(), 0.0);
    let (ch, dh) = (hat(&(c * s)), hat(&(d * s)));
    let mut worst: f64 = 0.0;
    for (i, m) in psi.matrices().iter().enumerate() {
        let omega = ch.dotc(&(m * &dh));
        let r = omega - b.counit()[i] - gen.0[i] * h;
        worst = worst.max(r.norm());
    }
    Ok(worst)
}


#[cfg(test)]
mod properties {
    use super::*;
    use crate::bialgebra::build_group_algebra;
    use crate::group::FiniteGroup;
    use crate::linalg::CMatrix;
    use crate::qsmaps::cp_generator_from_triple;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn hermitian_symmetry_for_random_arguments(
            fv in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2),
            gv in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2),
            t in 0.0f64..1.0,
        ) {
            let b = build_group_algebra(&FiniteGroup::symmetric(3).unwrap());
            let mut d = CMatrix::zeros(6, 1);
            d[(3, 0)] = C64::new(1.0, 0.0);
            let xi = CVector::from_fn(6, |i, _| C64::new(0.1 * i as f64, -0.05 * i as f64));
            let triple = ImplementingTriple::with_isometry(b.faithful_rep().to_vec(), xi, d);
            let phi = cp_generator_from_triple(&b, &triple, &Character::counit(&b)).unwrap();
            let sf = |v: &[(f64, f64)]| StepFunction::new(1, v.iter().map(|&(r, i)| (0.5, CVector::from_element(1, C64::new(r, i)))).collect()).unwrap();
            let (f, g) = (sf(&fv), sf(&gv));
            let oracle = CocycleOracle::new(&b, phi).unwrap();
            let lf = oracle.functional(&f, &g, t).unwrap();
            let lb = oracle.functional(&g, &f, t).unwrap();
            for i in 0..6 {
                let a = b.basis(i);
                prop_assert!((lb.eval(&b.star(&a)) - lf.eval(&a).conj()).norm() < 1e-11);
            }
        }
    }
}
