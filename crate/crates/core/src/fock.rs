//! Exact exponential-vector calculus for the toy-Fock embedding.
//!
//! Exponential vectors are never materialised. Everything reduces to the
//! factorisation ε(f) = ε(f|_{[0,nh)}) ⊗ ε(f|_{[nh,∞)}), the identity
//! D_{n,j}^(h)* ε(f)|_j = (1, h^{−1/2} ∫_{cell j} f) and
//! ⟨ε(f), ε(g)⟩ = exp ∫ ⟨f, g⟩.

use crate::bialgebra::CounitalBialgebra;
use crate::convolution::{convolution_iterates, Functional};
use crate::error::{Error, Result};
use crate::linalg::{kron_vectors, CMatrix, CVector, C64, ONE};
use crate::opmap::OperatorMap;
use crate::tolerance;

/// Piecewise-constant ℂ^d-valued function on [0, total_time), zero after.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    noise_dim: usize,
    segments: Vec<(f64, CVector)>,
}

impl StepFunction {
    pub fn new(noise_dim: usize, segments: Vec<(f64, CVector)>) -> Result<Self> {
        for (dur, v) in &segments {
            if !(*dur > 0.0) || !dur.is_finite() {
                return Err(Error::Parse(format!(
                    "segment duration {dur} must be positive"
                )));
            }
            if v.len() != noise_dim {
                return Err(Error::DimensionMismatch(format!(
                    "segment value of length {} in noise dimension {noise_dim}",
                    v.len()
                )));
            }
        }
        Ok(Self {
            noise_dim,
            segments,
        })
    }

    pub fn constant(value: CVector, duration: f64) -> Result<Self> {
        Self::new(value.len(), vec![(duration, value)])
    }

    pub fn noise_dim(&self) -> usize {
        self.noise_dim
    }

    pub fn segments(&self) -> &[(f64, CVector)] {
        &self.segments
    }

    pub fn total_time(&self) -> f64 {
        self.segments.iter().map(|(d, _)| d).sum()
    }

    /// Interior breakpoints and the end point, in increasing order.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.segments
            .iter()
            .map(|(d, _)| {
                acc += d;
                acc
            })
            .collect()
    }

    pub fn value_at(&self, t: f64) -> CVector {
        let mut start = 0.0_f64;
        for (d, v) in &self.segments {
            if t >= start && t < start + d {
                return v.clone();
            }
            start += d;
        }
        CVector::zeros(self.noise_dim)
    }

    /// f·1_{[0, end)}
    pub fn restrict(&self, end: f64) -> Self {
        let mut segments = Vec::new();
        let mut start = 0.0_f64;
        for (d, v) in &self.segments {
            let hi = (start + d).min(end);
            if hi > start {
                segments.push((hi - start, v.clone()));
            }
            start += d;
        }
        Self {
            noise_dim: self.noise_dim,
            segments,
        }
    }

    /// s ↦ f(s + by) on [0, total_time − by).
    pub fn shift(&self, by: f64) -> Self {
        let mut segments = Vec::new();
        let mut start = 0.0_f64;
        for (d, v) in &self.segments {
            let lo = start.max(by);
            if start + d > lo {
                segments.push((start + d - lo, v.clone()));
            }
            start += d;
        }
        Self {
            noise_dim: self.noise_dim,
            segments,
        }
    }

    /// ∫_a^b f
    pub fn integral(&self, a: f64, b: f64) -> CVector {
        let mut out = CVector::zeros(self.noise_dim);
        let mut start = 0.0_f64;
        for (d, v) in &self.segments {
            let lo = start.max(a);
            let hi = (start + d).min(b);
            if hi > lo {
                out += v * C64::new(hi - lo, 0.0);
            }
            start += d;
        }
        out
    }
}

/// Common refinement of f and g on [a, b): (duration, f value, g value).
pub fn common_pieces(
    f: &StepFunction,
    g: &StepFunction,
    a: f64,
    b: f64,
) -> Vec<(f64, CVector, CVector)> {
    let mut cuts: Vec<f64> = vec![a, b];
    cuts.extend(
        f.breakpoints()
            .into_iter()
            .chain(g.breakpoints())
            .filter(|&x| x > a && x < b),
    );
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * (1.0 + y.abs()));
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            (w[1] - w[0], f.value_at(mid), g.value_at(mid))
        })
        .collect()
}

/// ∫_a^b ⟨f, g⟩
pub fn inner_integral(f: &StepFunction, g: &StepFunction, a: f64, b: f64) -> C64 {
    common_pieces(f, g, a, b)
        .iter()
        .map(|(d, fv, gv)| fv.dotc(gv) * *d)
        .sum()
}

fn horizon(f: &StepFunction, g: &StepFunction) -> f64 {
    f.total_time().max(g.total_time())
}

/// ⟨ε(f), ε(g)⟩ = exp ∫_0^∞ ⟨f, g⟩
pub fn exp_vector_inner(f: &StepFunction, g: &StepFunction) -> C64 {
    inner_integral(f, g, 0.0, horizon(f, g)).exp()
}

/// The interval partition [jh, (j+1)h), j = 0..n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub h: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(h: f64, n: usize) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::NonPositiveStep(h));
        }
        Ok(Self { h, n })
    }

    /// n = ⌊t/h⌋. Quotients within 1e-9 below an integer count as that
    /// integer, so t = n·h computed in floating point lands on n.
    pub fn from_time(t: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::NonPositiveStep(h));
        }
        let q = t / h;
        let n = (q + 1e-9 * q.max(1.0)).floor().max(0.0) as usize;
        Ok(Self { h, n })
    }

    pub fn horizon(&self) -> f64 {
        self.h * self.n as f64
    }

    pub fn cell(&self, j: usize) -> (f64, f64) {
        (j as f64 * self.h, (j + 1) as f64 * self.h)
    }
}

/// Checks that every breakpoint of f inside [0, nh) is a grid point.
pub fn check_alignment(f: &StepFunction, grid: &GridSpec) -> Result<()> {
    let end = grid.horizon();
    for bp in f.breakpoints() {
        if bp >= end * (1.0 - tolerance::GRID_ALIGNMENT) {
            break;
        }
        let q = bp / grid.h;
        if (q - q.round()).abs() > tolerance::GRID_ALIGNMENT * q.max(1.0) {
            return Err(Error::Misaligned {
                breakpoint: bp,
                h: grid.h,
            });
        }
    }
    Ok(())
}

/// D_{n,j}^(h)* ε(f)|_j = (1, h^{−1/2} ∫_{cell j} f) ∈ ℂ ⊕ ℂ^d.
pub fn cell_vector(f: &StepFunction, grid: &GridSpec, j: usize) -> Result<CVector> {
    if j >= grid.n {
        return Err(Error::IndexOutOfRange {
            index: j,
            limit: grid.n,
        });
    }
    let (a, b) = grid.cell(j);
    let c = f.integral(a, b) * C64::new(grid.h.powf(-0.5), 0.0);
    let mut out = CVector::zeros(f.noise_dim() + 1);
    out[0] = ONE;
    out.rows_mut(1, f.noise_dim()).copy_from(&c);
    Ok(out)
}

/// ⟨D_{n,j}^(h) v, ε(f)|_j⟩ = conj(z) + h^{−1/2}⟨c, ∫_{cell j} f⟩ for v = (z, c).
pub fn embed_vector(v: &CVector, grid: &GridSpec, j: usize, f: &StepFunction) -> Result<C64> {
    if v.len() != f.noise_dim() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "hat vector of length {} for noise dimension {}",
            v.len(),
            f.noise_dim()
        )));
    }
    Ok(v.dotc(&cell_vector(f, grid, j)?))
}

/// ⟨D_{n,j}(z,c), D_{n,j}(z',c')⟩ in Fock space: vacuum parts plus the
/// one-particle overlap h^{−1}⟨c, c'⟩‖1_{cell}‖².
pub fn embedded_inner(v: &CVector, w: &CVector, h: f64) -> C64 {
    let vac = v[0].conj() * w[0];
    let one: C64 = v.rows(1, v.len() - 1).dotc(&w.rows(1, w.len() - 1));
    vac + one * (h.recip() * h)
}

fn check_inputs(f: &StepFunction, g: &StepFunction, grid: &GridSpec) -> Result<()> {
    if f.noise_dim() != g.noise_dim() {
        return Err(Error::DimensionMismatch(
            "f and g live in different noise spaces".into(),
        ));
    }
    let hz = horizon(f, g);
    if grid.horizon() > hz * (1.0 + tolerance::GRID_ALIGNMENT) + 1e-12 {
        return Err(Error::BeyondHorizon {
            t: grid.horizon(),
            horizon: hz,
        });
    }
    check_alignment(f, grid)?;
    check_alignment(g, grid)
}

/// ⟨ε(f), (D_n A D_n* ⊗ I) ε(g)⟩ for an operator A on (ℂ ⊕ ℂ^d)^{⊗n}.
pub fn toy_matrix_element(
    a: &CMatrix,
    f: &StepFunction,
    g: &StepFunction,
    grid: &GridSpec,
) -> Result<C64> {
    check_inputs(f, g, grid)?;
    let u = kron_vectors(
        &(0..grid.n)
            .map(|j| cell_vector(f, grid, j))
            .collect::<Result<Vec<_>>>()?,
    );
    let v = kron_vectors(
        &(0..grid.n)
            .map(|j| cell_vector(g, grid, j))
            .collect::<Result<Vec<_>>>()?,
    );
    if a.shape() != (u.len(), v.len()) {
        return Err(Error::DimensionMismatch(format!(
            "operator of shape {:?} on a toy space of dimension {}",
            a.shape(),
            u.len()
        )));
    }
    let tail = inner_integral(f, g, grid.horizon(), horizon(f, g)).exp();
    Ok(u.dotc(&(a * v)) * tail)
}

/// The functional b ↦ ⟨ε(f), Θ_n(ψ^{⋆n}(b)) ε(g)⟩ with n = ⌊t/h⌋, computed
/// as the ordered convolution product of the per-cell functionals
/// b ↦ ⟨u_j, ψ(b) v_j⟩ times the tail factor.
pub fn walk_functional(
    b: &CounitalBialgebra,
    psi: &OperatorMap,
    f: &StepFunction,
    g: &StepFunction,
    t: f64,
    h: f64,
) -> Result<Functional> {
    psi.check_source(b)?;
    if psi.rows() != f.noise_dim() + 1 || psi.cols() != g.noise_dim() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "walk map acts on dimension {}, step functions need {}",
            psi.rows(),
            f.noise_dim() + 1
        )));
    }
    let grid = GridSpec::from_time(t, h)?;
    check_inputs(f, g, &grid)?;
    let mut acc = Functional::counit(b);
    for j in 0..grid.n {
        let u = cell_vector(f, &grid, j)?;
        let v = cell_vector(g, &grid, j)?;
        let step = Functional(CVector::from_iterator(
            b.dim(),
            psi.matrices().iter().map(|m| u.dotc(&(m * &v))),
        ));
        acc = acc.convolve(b, &step);
    }
    let tail = inner_integral(f, g, grid.horizon(), horizon(f, g)).exp();
    Ok(Functional(acc.0 * tail))
}

/// ⟨ε(f), Θ^{(h)}_n(ψ^{⋆n}(a)) ε(g)⟩, n = ⌊t/h⌋.
pub fn walk_matrix_element(
    b: &CounitalBialgebra,
    psi: &OperatorMap,
    a: &CVector,
    f: &StepFunction,
    g: &StepFunction,
    t: f64,
    h: f64,
) -> Result<C64> {
    Ok(walk_functional(b, psi, f, g, t, h)?.eval(a))
}

/// Same quantity through the materialised iterate ψ^{⋆n}(a) and
/// [`toy_matrix_element`]; limited by the dimension cap.
#[allow(clippy::too_many_arguments)]
pub fn walk_matrix_element_dense(
    b: &CounitalBialgebra,
    psi: &OperatorMap,
    a: &CVector,
    f: &StepFunction,
    g: &StepFunction,
    t: f64,
    h: f64,
    cap: usize,
) -> Result<C64> {
    let grid = GridSpec::from_time(t, h)?;
    let iterate = convolution_iterates(b, psi, grid.n, cap)?;
    toy_matrix_element(&iterate.eval(a), f, g, &grid)
}
