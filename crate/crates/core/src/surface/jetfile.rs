//! Tabulated 2-jet records.
//!
//! One record per line, whitespace-separated:
//! `chart_id u_1..u_m q_1..q_2n D H`, where `D` lists the 2n×m first-derivative
//! matrix column by column and `H` lists the second derivatives ∂_j∂_k ι for
//! j ≤ k in lexicographic order, 2n numbers each. `#` starts a comment.
//! Records are used as seeds and diagnostics only; no interpolation.

use std::fmt::Write as _;

use crate::ambient::{AmbientSpace, Matrix, Vector};
use crate::error::{Error, Result};

use super::{ImmersedHypersurface, Jet, SourcePoint};

#[derive(Debug, Clone, PartialEq)]
pub struct JetRecord {
    pub source: SourcePoint,
    pub point: Vector,
    pub first: Matrix,
    /// Upper-triangular second derivatives, (j, k) with j ≤ k.
    pub second_upper: Vec<Vector>,
}

fn record_len(space: AmbientSpace) -> usize {
    let d = space.dim();
    let m = space.hyper_dim();
    1 + m + d + d * m + d * m * (m + 1) / 2
}

impl JetRecord {
    pub fn from_jet(source: SourcePoint, jet: &Jet) -> Self {
        let m = jet.first.ncols();
        let mut second_upper = Vec::new();
        for j in 0..m {
            for k in j..m {
                second_upper.push(jet.second(j, k).clone());
            }
        }
        Self {
            source,
            point: jet.point.clone(),
            first: jet.first.clone(),
            second_upper,
        }
    }

    pub fn to_jet(&self) -> Jet {
        let m = self.first.ncols();
        let d = self.point.len();
        let mut second = vec![Vector::zeros(d); m * m];
        let mut idx = 0;
        for j in 0..m {
            for k in j..m {
                second[j * m + k] = self.second_upper[idx].clone();
                second[k * m + j] = self.second_upper[idx].clone();
                idx += 1;
            }
        }
        Jet {
            point: self.point.clone(),
            first: self.first.clone(),
            second,
        }
    }

    /// Max abs difference between the tabulated jet and the surface's own jet.
    pub fn deviation(&self, surface: &ImmersedHypersurface) -> Result<f64> {
        let jet = surface.eval_jet(self.source.chart, &self.source.u)?;
        let mine = self.to_jet();
        let mut worst = (jet.point - mine.point).amax();
        worst = worst.max((jet.first - mine.first).amax());
        for (a, b) in jet.second.iter().zip(&mine.second) {
            worst = worst.max((a - b).amax());
        }
        Ok(worst)
    }
}

pub fn format_record(r: &JetRecord) -> String {
    let mut line = r.source.chart.to_string();
    let values = r
        .source
        .u
        .iter()
        .chain(r.point.iter())
        .chain(r.first.iter())
        .chain(r.second_upper.iter().flat_map(|h| h.iter()));
    for v in values {
        let _ = write!(line, " {v:.17e}");
    }
    line
}

pub fn parse_records(text: &str, space: AmbientSpace) -> Result<Vec<JetRecord>> {
    let d = space.dim();
    let m = space.hyper_dim();
    let expected = record_len(space);
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != expected {
            return Err(Error::Config(format!(
                "jet record on line {}: expected {expected} fields, got {}",
                lineno + 1,
                tokens.len()
            )));
        }
        let chart: usize = tokens[0].parse().map_err(|_| {
            Error::Config(format!("jet record on line {}: bad chart id", lineno + 1))
        })?;
        let nums = tokens[1..]
            .iter()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Config(format!("jet record on line {}: {e}", lineno + 1)))?;
        let (u, rest) = nums.split_at(m);
        let (q, rest) = rest.split_at(d);
        let (dm, rest) = rest.split_at(d * m);
        let second_upper = rest.chunks(d).map(Vector::from_column_slice).collect();
        out.push(JetRecord {
            source: SourcePoint::new(chart, u.to_vec()),
            point: Vector::from_column_slice(q),
            first: Matrix::from_column_slice(d, m, dm),
            second_upper,
        });
    }
    Ok(out)
}
