//! JSON file formats for bialgebras, groups, operator maps and step
//! functions. Complex entries are written as `[re, im]`; on input a bare
//! number or a rational string such as `"-1/2"` is also accepted.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bialgebra::{verify_bialgebra, BialgebraParts, CounitalBialgebra, Tensor3};
use crate::error::{Error, Result};
use crate::fock::StepFunction;
use crate::group::FiniteGroup;
use crate::linalg::{CMatrix, CVector, C64};
use crate::opmap::OperatorMap;
use crate::tolerance;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Complex {
    Pair([f64; 2]),
    Real(f64),
    Text(String),
}

impl Complex {
    pub fn value(&self) -> Result<C64> {
        match self {
            Complex::Pair([re, im]) => Ok(C64::new(*re, *im)),
            Complex::Real(x) => Ok(C64::new(*x, 0.0)),
            Complex::Text(s) => parse_rational(s).map(|x| C64::new(x, 0.0)),
        }
    }
}

impl From<C64> for Complex {
    fn from(z: C64) -> Self {
        Complex::Pair([z.re, z.im])
    }
}

fn parse_rational(s: &str) -> Result<f64> {
    let bad = || Error::Parse(format!("cannot read {s:?} as a number"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0.0 {
                return Err(bad());
            }
            Ok(p / q)
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}

pub type JsonVector = Vec<Complex>;
pub type JsonMatrix = Vec<Vec<Complex>>;

pub fn vector_from_json(v: &[Complex]) -> Result<CVector> {
    Ok(CVector::from_vec(
        v.iter().map(Complex::value).collect::<Result<_>>()?,
    ))
}

pub fn vector_to_json(v: &CVector) -> JsonVector {
    v.iter().map(|&z| z.into()).collect()
}

pub fn matrix_from_json(rows: &[Vec<Complex>]) -> Result<CMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::Parse("ragged matrix rows".into()));
    }
    let mut m = CMatrix::zeros(r, c);
    for (i, row) in rows.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            m[(i, j)] = z.value()?;
        }
    }
    Ok(m)
}

pub fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    m.row_iter()
        .map(|r| r.iter().map(|&z| z.into()).collect())
        .collect()
}

fn tensor_from_json(t: &[Vec<Vec<Complex>>], n: usize, what: &str) -> Result<Tensor3> {
    let shaped = t.len() == n
        && t.iter()
            .all(|m| m.len() == n && m.iter().all(|r| r.len() == n));
    if !shaped {
        return Err(Error::Parse(format!("{what} must be a {n}×{n}×{n} array")));
    }
    let data = t
        .iter()
        .flatten()
        .flatten()
        .map(Complex::value)
        .collect::<Result<Vec<_>>>()?;
    Tensor3::from_vec((n, n, n), data)
}

fn tensor_to_json(t: &Tensor3) -> Vec<JsonMatrix> {
    let (a, b, c) = t.dims();
    (0..a)
        .map(|i| {
            (0..b)
                .map(|j| (0..c).map(|k| t.get(i, j, k).into()).collect())
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BialgebraFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub structure_constants: Vec<JsonMatrix>,
    pub coproduct: Vec<JsonMatrix>,
    pub counit: JsonVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<JsonVector>,
    pub involution: Vec<JsonVector>,
    #[serde(default)]
    pub characters: Vec<JsonVector>,
    pub faithful_rep: Vec<JsonMatrix>,
}

impl BialgebraFile {
    pub fn from_bialgebra(b: &CounitalBialgebra) -> Self {
        Self {
            dim: b.dim(),
            labels: Some(b.labels().to_vec()),
            structure_constants: tensor_to_json(b.structure_constants()),
            coproduct: tensor_to_json(b.coproduct()),
            counit: vector_to_json(b.counit()),
            unit: Some(vector_to_json(b.unit())),
            involution: b.involution().iter().map(vector_to_json).collect(),
            characters: b.characters().iter().map(vector_to_json).collect(),
            faithful_rep: b.faithful_rep().iter().map(matrix_to_json).collect(),
        }
    }

    /// Builds the bialgebra checking shapes only.
    pub fn to_bialgebra(&self) -> Result<CounitalBialgebra> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::Parse("dim must be positive".into()));
        }
        let labels = match &self.labels {
            Some(l) if l.len() == n => l.clone(),
            Some(l) => return Err(Error::Parse(format!("{} labels for dim {n}", l.len()))),
            None => (0..n).map(|i| format!("b{i}")).collect(),
        };
        let faithful_rep = self
            .faithful_rep
            .iter()
            .map(|m| matrix_from_json(m))
            .collect::<Result<Vec<_>>>()?;
        if faithful_rep.len() != n {
            return Err(Error::Parse(format!(
                "faithful_rep has {} matrices, dim is {n}",
                faithful_rep.len()
            )));
        }
        let unit = match &self.unit {
            Some(u) => vector_from_json(u)?,
            None => unit_from_rep(&faithful_rep)?,
        };
        BialgebraParts {
            labels,
            structure_constants: tensor_from_json(
                &self.structure_constants,
                n,
                "structure_constants",
            )?,
            involution: self
                .involution
                .iter()
                .map(|v| vector_from_json(v))
                .collect::<Result<_>>()?,
            unit,
            coproduct: tensor_from_json(&self.coproduct, n, "coproduct")?,
            counit: vector_from_json(&self.counit)?,
            characters: self
                .characters
                .iter()
                .map(|v| vector_from_json(v))
                .collect::<Result<_>>()?,
            faithful_rep,
        }
        .pipe(CounitalBialgebra::from_parts)
    }
}

trait Pipe: Sized {
    fn pipe<T>(self, f: impl FnOnce(Self) -> T) -> T {
        f(self)
    }
}
impl<T> Pipe for T {}

/// Solves Σ u_i π(b_i) = I in the least-squares sense.
fn unit_from_rep(rep: &[CMatrix]) -> Result<CVector> {
    let m = rep[0].nrows();
    if rep.iter().any(|r| r.shape() != (m, m)) {
        return Err(Error::Parse(
            "faithful_rep matrices must be square of equal size".into(),
        ));
    }
    let a = CMatrix::from_fn(m * m, rep.len(), |r, i| rep[i][(r % m, r / m)]);
    let id = CMatrix::identity(m, m);
    let rhs = CVector::from_fn(m * m, |r, _| id[(r % m, r / m)]);
    a.svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::Parse(format!("cannot derive the unit: {e}")))
}

pub fn parse_bialgebra(text: &str) -> Result<CounitalBialgebra> {
    serde_json::from_str::<BialgebraFile>(text)?.to_bialgebra()
}

/// Parses and verifies every axiom; the error names the first violated one.
pub fn load_bialgebra(path: &Path) -> Result<CounitalBialgebra> {
    let b = parse_bialgebra(&fs::read_to_string(path)?)?;
    verify_bialgebra(&b)
        .first_failure(tolerance::IDENTITY)
        .map_or(Ok(b), Err)
}

pub fn bialgebra_to_json(b: &CounitalBialgebra) -> String {
    to_pretty_json(&BialgebraFile::from_bialgebra(b))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupFile {
    pub order: usize,
    pub mult_table: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl GroupFile {
    pub fn from_group(g: &FiniteGroup) -> Self {
        Self {
            order: g.order(),
            mult_table: g.mult_table().to_vec(),
            labels: Some(g.labels().to_vec()),
        }
    }

    pub fn to_group(&self) -> Result<FiniteGroup> {
        match &self.labels {
            Some(l) => {
                FiniteGroup::from_table_with_labels(self.order, self.mult_table.clone(), l.clone())
            }
            None => FiniteGroup::from_table(self.order, self.mult_table.clone()),
        }
    }
}

pub fn load_group(path: &Path) -> Result<FiniteGroup> {
    serde_json::from_str::<GroupFile>(&fs::read_to_string(path)?)?.to_group()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorMapFile {
    pub matrices: Vec<JsonMatrix>,
}

impl OperatorMapFile {
    pub fn from_map(m: &OperatorMap) -> Self {
        Self {
            matrices: m.matrices().iter().map(matrix_to_json).collect(),
        }
    }

    pub fn to_map(&self) -> Result<OperatorMap> {
        OperatorMap::new(
            self.matrices
                .iter()
                .map(|m| matrix_from_json(m))
                .collect::<Result<_>>()?,
        )
    }
}

/// Rows `[duration, [re, im], …]`, one complex entry per noise dimension.
pub fn step_function_from_json(rows: &[Vec<serde_json::Value>]) -> Result<StepFunction> {
    let mut segments = Vec::with_capacity(rows.len());
    for row in rows {
        let (dur, vals) = row
            .split_first()
            .ok_or_else(|| Error::Parse("empty step-function row".into()))?;
        let dur = match dur {
            serde_json::Value::String(s) => parse_rational(s)?,
            v => v
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("bad segment duration {v}")))?,
        };
        let vals = vals
            .iter()
            .map(|v| serde_json::from_value::<Complex>(v.clone())?.value())
            .collect::<Result<Vec<_>>>()?;
        segments.push((dur, CVector::from_vec(vals)));
    }
    let d = segments
        .first()
        .map(|(_, v)| v.len())
        .ok_or_else(|| Error::Parse("step function has no segments".into()))?;
    StepFunction::new(d, segments)
}

pub fn step_function_to_json(f: &StepFunction) -> Vec<Vec<serde_json::Value>> {
    f.segments()
        .iter()
        .map(|(d, v)| {
            std::iter::once(serde_json::json!(d))
                .chain(v.iter().map(|z| serde_json::json!([z.re, z.im])))
                .collect()
        })
        .collect()
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialisable")
}
