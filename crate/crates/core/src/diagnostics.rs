//! Structural checks on the comparison graph.
//!
//! Two independent routes decide whether the fixed-point iteration can
//! converge: a breadth-first traversal with two-colouring of the graph with
//! edges `{i, j : M_ij > 0}`, and the spectrum of `M̄`. `M̄` is similar to the
//! symmetric matrix `S = D^(-1/2) M D^(-1/2)`, so its eigenvalues are real and
//! come from a symmetric eigensolver. A connected graph gives eigenvalue 1
//! exactly once; a bipartite component gives eigenvalue -1.

use std::collections::VecDeque;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tournament::DerivedMatrices;

/// Per-`n` factor for the default eigenvalue tolerance.
pub const EIGEN_TOL_PER_PLAYER: f64 = 1e-9;

pub fn default_eigen_tol(n: usize) -> f64 {
    EIGEN_TOL_PER_PLAYER * n as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Structure {
    /// Connected components of the comparison graph, each sorted, ordered by
    /// smallest member.
    pub components: Vec<Vec<usize>>,
    /// Two-colouring of the first bipartite component, if any.
    pub bipartition: Option<(Vec<usize>, Vec<usize>)>,
}

impl Structure {
    pub fn connected(&self) -> bool {
        self.components.len() == 1
    }

    /// Every component contains an odd cycle.
    pub fn nonbipartite(&self) -> bool {
        self.bipartition.is_none()
    }
}

pub fn check_structure(d: &DerivedMatrices) -> Structure {
    let m = d.matches();
    let n = d.len();
    let mut colour: Vec<Option<bool>> = vec![None; n];
    let mut components = Vec::new();
    let mut bipartition = None;

    for start in 0..n {
        if colour[start].is_some() {
            continue;
        }
        colour[start] = Some(false);
        let mut members = vec![start];
        let mut two_colourable = true;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let ci = colour[i].unwrap();
            for j in (0..n).filter(|&j| j != i && m[(i, j)] > 0.0) {
                match colour[j] {
                    None => {
                        colour[j] = Some(!ci);
                        members.push(j);
                        queue.push_back(j);
                    }
                    Some(cj) if cj == ci => two_colourable = false,
                    Some(_) => {}
                }
            }
        }
        members.sort_unstable();
        if two_colourable && bipartition.is_none() {
            let (left, right) = members.iter().partition(|&&i| colour[i] == Some(false));
            bipartition = Some((left, right));
        }
        components.push(members);
    }

    Structure {
        components,
        bipartition,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSummary {
    /// Eigenvalues of `M̄`, largest first.
    pub eigenvalues: Vec<f64>,
    pub multiplicity_one: usize,
    pub has_minus_one: bool,
    /// `1 - max |λ|` over all eigenvalues but the leading 1; drives the
    /// asymptotic convergence rate of the iteration.
    pub spectral_gap: f64,
    pub tol: f64,
}

impl SpectralSummary {
    /// Iterations for the slowest mode to shrink by `tol`, `⌈ln tol / ln(1 - gap)⌉`.
    pub fn iteration_estimate(&self, tol: f64) -> Option<u64> {
        let rate = 1.0 - self.spectral_gap;
        if self.spectral_gap <= self.tol || !(tol > 0.0 && tol < 1.0) {
            return None;
        }
        if rate <= 0.0 {
            return Some(1);
        }
        Some((tol.ln() / rate.ln()).ceil().max(1.0) as u64)
    }
}

/// `S = D^(-1/2) M D^(-1/2)`, symmetric and similar to `M̄`.
pub fn symmetrized(d: &DerivedMatrices) -> DMatrix<f64> {
    let inv_sqrt = d.games().map(|m| 1.0 / m.sqrt());
    let n = d.len();
    DMatrix::from_fn(n, n, |i, j| inv_sqrt[i] * d.matches()[(i, j)] * inv_sqrt[j])
}

pub fn spectral_diagnostics(d: &DerivedMatrices, tol: f64) -> Result<SpectralSummary> {
    let s = symmetrized(d);
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigensolver("non-finite matrix entry".into()));
    }
    let eig = SymmetricEigen::try_new(s, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Eigensolver("no convergence".into()))?;
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }
    eigenvalues.sort_by(|a, b| b.total_cmp(a));

    let multiplicity_one = eigenvalues
        .iter()
        .filter(|&&l| (l - 1.0).abs() <= tol)
        .count();
    let has_minus_one = eigenvalues.iter().any(|&l| (l + 1.0).abs() <= tol);
    let sub_leading = eigenvalues
        .iter()
        .skip(1)
        .map(|l| l.abs())
        .fold(0.0f64, f64::max);
    let spectral_gap = (1.0 - sub_leading).clamp(0.0, 1.0);

    Ok(SpectralSummary {
        eigenvalues,
        multiplicity_one,
        has_minus_one,
        spectral_gap,
        tol,
    })
}

/// Sup-norm distance between `M̄^l` and its limit `e mᵀ / Σ m_i`.
pub fn power_limit_distance(d: &DerivedMatrices, l: usize) -> f64 {
    let limit = limit_matrix(d);
    let power = matrix_power(d.normalized(), l);
    inf_norm(&(power - limit))
}

/// Smallest `l ≤ l_max` with `‖M̄^l - e mᵀ / Σ m_i‖_∞ ≤ tol`.
pub fn limit_power_check(d: &DerivedMatrices, l_max: usize, tol: f64) -> Result<usize> {
    let limit = limit_matrix(d);
    let mbar = d.normalized();
    let mut power = DMatrix::identity(d.len(), d.len());
    let mut norm = inf_norm(&(&power - &limit));
    for l in 1..=l_max {
        power = &power * mbar;
        norm = inf_norm(&(&power - &limit));
        if norm <= tol {
            return Ok(l);
        }
    }
    Err(Error::PowerLimitNotReached { l_max, norm })
}

fn limit_matrix(d: &DerivedMatrices) -> DMatrix<f64> {
    let n = d.len();
    let w = d.games() / d.total_games();
    DMatrix::from_fn(n, n, |_, j| w[j])
}

fn matrix_power(m: &DMatrix<f64>, mut l: usize) -> DMatrix<f64> {
    let mut result = DMatrix::identity(m.nrows(), m.ncols());
    let mut base = m.clone();
    while l > 0 {
        if l & 1 == 1 {
            result = &result * &base;
        }
        base = &base * &base;
        l >>= 1;
    }
    result
}

pub(crate) fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Pairs `(i, j)`, `i < j`, that met but where one side took every point.
pub fn per_pair_warnings(d: &DerivedMatrices, scores: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let n = d.len();
    let m = d.matches();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if m[(i, j)] > 0.0 {
                let frac = scores[(i, j)] / m[(i, j)];
                if frac <= 0.0 || frac >= 1.0 {
                    out.push((i, j));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub connected: bool,
    pub components: Vec<Vec<usize>>,
    pub nonbipartite: bool,
    pub bipartition: Option<(Vec<usize>, Vec<usize>)>,
    pub spectrum: Option<SpectralSummary>,
    pub per_pair_warnings: Vec<(usize, usize)>,
}

impl DiagnosticsReport {
    /// Whether the graph and spectral verdicts agree; `None` without a spectrum.
    pub fn verdicts_agree(&self) -> Option<bool> {
        self.spectrum.as_ref().map(|s| {
            (self.connected == (s.multiplicity_one == 1)) && (self.nonbipartite == !s.has_minus_one)
        })
    }
}

/// Runs the graph checks and, when `spectral_tol` is given, the eigenvalue checks.
pub fn diagnose(
    d: &DerivedMatrices,
    scores: &DMatrix<f64>,
    spectral_tol: Option<f64>,
) -> Result<DiagnosticsReport> {
    let structure = check_structure(d);
    let spectrum = spectral_tol
        .map(|tol| spectral_diagnostics(d, tol))
        .transpose()?;
    Ok(DiagnosticsReport {
        connected: structure.connected(),
        nonbipartite: structure.nonbipartite(),
        components: structure.components,
        bipartition: structure.bipartition,
        spectrum,
        per_pair_warnings: per_pair_warnings(d, scores),
    })
}
