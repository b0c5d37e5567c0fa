//! Binary integer linear programs `min c·x  s.t.  A x ≤ b,  x ∈ {0,1}^d`,
//! solved by exhaustive corner enumeration.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest dimension the exact (enumerating) operations accept by default.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// A binary ILP instance. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct IlpInstance {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    cap: usize,
}

/// On-disk instance layout: `{"a": [[..], ..], "b": [..], "c": [..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl IlpInstance {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        let m = a.len();
        let d = c.len();
        if m == 0 {
            return Err(Error::InvalidInstance("at least one constraint row is required".into()));
        }
        if d == 0 {
            return Err(Error::InvalidInstance("at least one variable is required".into()));
        }
        if b.len() != m {
            return Err(Error::InvalidInstance(format!(
                "a has {m} rows but b has {} entries",
                b.len()
            )));
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != d {
                return Err(Error::InvalidInstance(format!(
                    "row {i} of a has {} columns but c has {d} entries",
                    row.len()
                )));
            }
        }
        let all_finite = a.iter().flatten().chain(&b).chain(&c).all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidInstance("all coefficients must be finite".into()));
        }
        Ok(Self { a, b, c, cap: DEFAULT_ENUMERATION_CAP })
    }

    /// Replaces the enumeration cap used by the exact operations.
    pub fn with_enumeration_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(s)?;
        Self::new(file.a, file.b, file.c)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
            Error::InvalidInstance(format!("cannot read {}: {e}", path.as_ref().display()))
        })?;
        Self::from_json_str(&text)
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile { a: self.a.clone(), b: self.b.clone(), c: self.c.clone() }
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn d(&self) -> usize {
        self.c.len()
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i]
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn enumeration_cap(&self) -> usize {
        self.cap
    }

    pub(crate) fn check_enumerable(&self) -> Result<()> {
        if self.d() > self.cap {
            return Err(Error::DimensionTooLarge { d: self.d(), cap: self.cap });
        }
        Ok(())
    }

    pub(crate) fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.d() {
            return Err(Error::DimensionMismatch { expected: self.d(), got });
        }
        Ok(())
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.m() {
            return Err(Error::IndexOutOfRange { index: i, m: self.m() });
        }
        Ok(())
    }

    /// `aᵢ·x − bᵢ` for a corner given as a bitmask (see [`corner_bit`]).
    pub(crate) fn slack_mask(&self, i: usize, mask: u64) -> f64 {
        let d = self.d();
        let lhs: f64 = self.a[i]
            .iter()
            .enumerate()
            .filter(|&(j, _)| corner_bit(mask, j, d))
            .map(|(_, &aij)| aij)
            .sum();
        lhs - self.b[i]
    }

    /// `aᵢ·x − bᵢ` for an arbitrary real vector.
    pub(crate) fn slack_real(&self, i: usize, x: &[f64]) -> f64 {
        dot(&self.a[i], x) - self.b[i]
    }

    pub(crate) fn objective(&self, x: &[f64]) -> f64 {
        dot(&self.c, x)
    }

    fn feasible_mask(&self, mask: u64) -> bool {
        (0..self.m()).all(|i| self.slack_mask(i, mask) <= 0.0)
    }
}

pub(crate) fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(p, q)| p * q).sum()
}

/// Coordinate `j` of the corner encoded by `mask`. The first coordinate is the
/// most significant bit, so ascending masks visit corners in lexicographic order.
#[inline]
pub(crate) fn corner_bit(mask: u64, j: usize, d: usize) -> bool {
    (mask >> (d - 1 - j)) & 1 == 1
}

pub(crate) fn corner_count(d: usize) -> u64 {
    1u64 << d
}

/// A vertex of the unit hypercube.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BinaryPoint(Vec<bool>);

impl BinaryPoint {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// Accepts only exact 0/1 entries.
    pub fn from_u8(values: &[u8]) -> Result<Self> {
        values
            .iter()
            .map(|&v| match v {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::DomainError(format!("binary coordinate {other} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    /// Accepts only exact 0.0/1.0 entries.
    pub fn from_f64(values: &[f64]) -> Option<Self> {
        values
            .iter()
            .map(|&v| {
                if v == 0.0 {
                    Some(false)
                } else if v == 1.0 {
                    Some(true)
                } else {
                    None
                }
            })
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }

    pub(crate) fn from_mask(mask: u64, d: usize) -> Self {
        Self((0..d).map(|j| corner_bit(mask, j, d)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    pub fn to_u8(&self) -> Vec<u8> {
        self.0.iter().map(|&b| b as u8).collect()
    }
}

impl fmt::Display for BinaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, &b) in self.0.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", b as u8)?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub feasible: bool,
    pub optimal_value: Option<f64>,
    /// Every minimizer, in lexicographic order.
    pub optimal_set: Vec<BinaryPoint>,
}

/// Exhaustive scan of all `2^d` corners, keeping every tied minimizer.
pub fn enumerate_solve(inst: &IlpInstance) -> Result<SolveReport> {
    inst.check_enumerable()?;
    let d = inst.d();
    let mut best: Option<f64> = None;
    let mut optima = Vec::new();
    for mask in 0..corner_count(d) {
        if !inst.feasible_mask(mask) {
            continue;
        }
        let value = inst.objective(&BinaryPoint::from_mask(mask, d).to_f64());
        match best {
            Some(v) if value > v => {}
            Some(v) if value == v => optima.push(mask),
            _ => {
                best = Some(value);
                optima.clear();
                optima.push(mask);
            }
        }
    }
    Ok(SolveReport {
        feasible: best.is_some(),
        optimal_value: best,
        optimal_set: optima.into_iter().map(|m| BinaryPoint::from_mask(m, d)).collect(),
    })
}

pub fn is_feasible_corner(inst: &IlpInstance, x: &BinaryPoint) -> Result<bool> {
    inst.check_dim(x.len())?;
    let xf = x.to_f64();
    Ok((0..inst.m()).all(|i| inst.slack_real(i, &xf) <= 0.0))
}

/// Components of the penalty threshold `μ* = 2√d‖c‖₂ / min({1} ∪ positive slacks)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuThreshold {
    pub mu_star: f64,
    /// Smallest strictly positive slack `aᵢ·x − bᵢ` over all rows and corners,
    /// capped at 1.
    pub denominator: f64,
    /// Whether any strictly positive slack exists at all.
    pub has_positive_slack: bool,
}

pub fn mu_threshold(inst: &IlpInstance) -> Result<f64> {
    mu_threshold_parts(inst).map(|t| t.mu_star)
}

pub fn mu_threshold_parts(inst: &IlpInstance) -> Result<MuThreshold> {
    inst.check_enumerable()?;
    let d = inst.d();
    let mut min_positive = f64::INFINITY;
    for mask in 0..corner_count(d) {
        for i in 0..inst.m() {
            let s = inst.slack_mask(i, mask);
            if s > 0.0 && s < min_positive {
                min_positive = s;
            }
        }
    }
    let has_positive_slack = min_positive.is_finite();
    let denominator = min_positive.min(1.0);
    let c_norm = inst.c().iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(MuThreshold {
        mu_star: 2.0 * (d as f64).sqrt() * c_norm / denominator,
        denominator,
        has_positive_slack,
    })
}
