use rayon::prelude::*;
use serde::Serialize;

use crate::cocycle::CocycleOracle;
use crate::convolution::Functional;
use crate::error::Result;
use crate::fock::{walk_functional, GridSpec};
use crate::qsmaps::{generator_from_triple, generator_gap, surrogate_norm};
use crate::walk::{error_terms, expansion_coefficients, walk_map};

use super::config::Experiment;

pub const CSV_SCHEMA: &str = "qrw-errors/v1";

/// One matrix-element probe: basis element, step-function pair, time.
#[derive(Debug, Clone, Serialize)]
pub struct Probe {
    pub basis: usize,
    pub label: String,
    pub pair: usize,
    pub t: f64,
}

impl Probe {
    pub fn column(&self) -> String {
        format!("err[b={};pair={};t={}]", self.label, self.pair, self.t)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorRow {
    pub h: f64,
    /// ⌊T/h⌋
    pub n: usize,
    pub generator_gap: f64,
    /// (h/(1+c_h))‖φ₁‖ + (h²/(1+c_h)²)‖φ₂‖ in the surrogate norm.
    pub gap_bound: f64,
    pub errors: Vec<f64>,
    pub max_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub rows: usize,
    /// Least-squares slope of log₁₀(max error) against log₁₀(h) over the last ⌈rows/2⌉ rows.
    pub error_slope: Option<f64>,
    pub gap_slope: Option<f64>,
    /// Same fit over all rows.
    pub gap_slope_all: Option<f64>,
    pub monotone_tail: bool,
    pub monotone_all: bool,
    pub gap_within_bound: bool,
    pub initial_max_error: f64,
    pub final_max_error: f64,
    pub final_over_initial: f64,
    pub error_bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorTable {
    pub name: String,
    pub schema: &'static str,
    pub probes: Vec<Probe>,
    pub rows: Vec<ErrorRow>,
    pub summary: SweepSummary,
}

/// Least-squares slope of log₁₀ y against log₁₀ x; None with fewer than two
/// points or any non-positive value.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return None;
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(x, y)| (x.log10(), y.log10()))
        .collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

pub fn summarize(rows: &[ErrorRow], error_bound: f64) -> SweepSummary {
    let tail_len = rows.len().div_ceil(2);
    let tail = &rows[rows.len() - tail_len..];
    let slope_over = |rs: &[ErrorRow], f: fn(&ErrorRow) -> f64| {
        if rows.len() >= 3 {
            loglog_slope(&rs.iter().map(|r| (r.h, f(r))).collect::<Vec<_>>())
        } else {
            None
        }
    };
    let maxes: Vec<f64> = rows.iter().map(|r| r.max_error).collect();
    let tail_maxes: Vec<f64> = tail.iter().map(|r| r.max_error).collect();
    let initial = maxes.first().copied().unwrap_or(0.0);
    let last = maxes.last().copied().unwrap_or(0.0);
    let monotone_tail = strictly_decreasing(&tail_maxes);
    SweepSummary {
        rows: rows.len(),
        error_slope: slope_over(tail, |r| r.max_error),
        gap_slope: slope_over(tail, |r| r.generator_gap),
        gap_slope_all: slope_over(rows, |r| r.generator_gap),
        monotone_tail,
        monotone_all: strictly_decreasing(&maxes),
        gap_within_bound: rows
            .iter()
            .all(|r| r.generator_gap <= r.gap_bound * (1.0 + 1e-9) + 1e-15),
        initial_max_error: initial,
        final_max_error: last,
        final_over_initial: if initial > 0.0 { last / initial } else { 0.0 },
        error_bound,
        passed: monotone_tail && last < error_bound,
    }
}

pub fn cmd_sweep(exp: &Experiment) -> Result<ErrorTable> {
    let b = &exp.b;
    let chi = &exp.chi;
    let triple = &exp.triple;
    let phi = generator_from_triple(b, triple, chi)?;
    let (phi1, phi2) = error_terms(b, triple, chi)?;
    let (n1, n2) = (surrogate_norm(&phi1), surrogate_norm(&phi2));

    let probes: Vec<Probe> = (0..exp.pairs.len())
        .flat_map(|pair| {
            exp.times.iter().flat_map(move |&t| {
                exp.probes.iter().map(move |&i| Probe {
                    basis: i,
                    label: b.labels()[i].clone(),
                    pair,
                    t,
                })
            })
        })
        .collect();

    let oracle = CocycleOracle::new(b, phi.clone())?;
    let reference: Vec<Vec<Functional>> = exp
        .pairs
        .iter()
        .map(|(f, g)| {
            exp.times
                .iter()
                .map(|&t| oracle.functional(f, g, t))
                .collect()
        })
        .collect::<Result<_>>()?;

    let rows = exp
        .hs
        .par_iter()
        .map(|&h| -> Result<ErrorRow> {
            let psi = walk_map(b, triple, chi, h)?;
            let gap = generator_gap(b, &phi, &psi, chi, h)?;
            let (a1, a2) = expansion_coefficients(triple.xi_norm_sq(), h);
            let mut errors = Vec::with_capacity(probes.len());
            for (p, (f, g)) in exp.pairs.iter().enumerate() {
                for (ti, &t) in exp.times.iter().enumerate() {
                    let walk = walk_functional(b, &psi, f, g, t, h)?;
                    let lim = &reference[p][ti];
                    errors.extend(exp.probes.iter().map(|&i| (lim.0[i] - walk.0[i]).norm()));
                }
            }
            let max_error = errors.iter().fold(0.0_f64, |m, &e| m.max(e));
            log::debug!("h = {h}: gap {gap:e}, max error {max_error:e}");
            Ok(ErrorRow {
                h,
                n: GridSpec::from_time(exp.horizon, h)?.n,
                generator_gap: gap,
                gap_bound: a1 * n1 + a2 * n2,
                errors,
                max_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = rows;
    rows.sort_by(|x, y| y.h.total_cmp(&x.h));
    let summary = summarize(&rows, exp.error_bound);
    Ok(ErrorTable {
        name: exp.name.clone(),
        schema: CSV_SCHEMA,
        probes,
        rows,
        summary,
    })
}

impl ErrorTable {
    pub fn to_csv(&self) -> Result<String> {
        let mut out = format!("# schema: {CSV_SCHEMA}; experiment: {}\n", self.name);
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![
            "h".to_string(),
            "n".into(),
            "generator_gap".into(),
            "gap_bound".into(),
            "max_error".into(),
        ];
        header.extend(self.probes.iter().map(Probe::column));
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.rows {
            let mut rec = vec![
                format!("{:e}", r.h),
                r.n.to_string(),
                format!("{:e}", r.generator_gap),
                format!("{:e}", r.gap_bound),
                format!("{:e}", r.max_error),
            ];
            rec.extend(r.errors.iter().map(|e| format!("{e:e}")));
            w.write_record(&rec).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| csv_err(e.into_error().into()))?;
        out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
        Ok(out)
    }

    /// Whitespace-separated columns for gnuplot.
    pub fn to_dat(&self) -> String {
        let mut out = format!("# {}: h max_error generator_gap gap_bound\n", self.name);
        for r in &self.rows {
            out.push_str(&format!(
                "{:e} {:e} {:e} {:e}\n",
                r.h, r.max_error, r.generator_gap, r.gap_bound
            ));
        }
        out
    }
}

fn csv_err(e: csv::Error) -> crate::error::Error {
    crate::error::Error::Io(std::io::Error::other(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(h: f64, e: f64) -> ErrorRow {
        ErrorRow {
            h,
            n: 0,
            generator_gap: h,
            gap_bound: 2.0 * h,
            errors: vec![e],
            max_error: e,
        }
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [1.0, 0.5, 0.25, 0.125]
            .iter()
            .map(|&h| (h, 3.0 * h * h))
            .collect();
        assert!((loglog_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert!(loglog_slope(&[(1.0, 1.0)]).is_none());
        assert!(loglog_slope(&[(1.0, 1.0), (0.5, 0.0)]).is_none());
    }

    #[test]
    fn summary_flags() {
        let rows: Vec<ErrorRow> = [(0.4, 4.0), (0.2, 2.0), (0.1, 1.0), (0.05, 0.5)]
            .iter()
            .map(|&(h, e)| row(h, e))
            .collect();
        let s = summarize(&rows, 0.4);
        assert!(s.monotone_all && s.monotone_tail && s.gap_within_bound);
        assert!(!s.passed);
        assert!((s.error_slope.unwrap() - 1.0).abs() < 1e-12);
        assert!(summarize(&rows, 0.6).passed);
        assert!(summarize(&rows[..2], 10.0).error_slope.is_none());
        let bumpy = vec![row(0.4, 1.0), row(0.2, 2.0), row(0.1, 1.0), row(0.05, 0.5)];
        let s = summarize(&bumpy, 10.0);
        assert!(!s.monotone_all && s.monotone_tail);
    }
}
