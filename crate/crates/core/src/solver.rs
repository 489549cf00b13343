//! Performance ratings and the recursive performance.
//!
//! With quantile offsets `c_i = F⁻¹(s_i)`, the r-performance is `M̄r + c`.
//! Re-centering the offsets so that `Σ m_i ĉ_i = 0` gives an update
//! `p ← M̄p + ĉ` that conserves `Σ m_i p_i`; its limit solves
//! `(I - M̄)x = ĉ`. Both routes are provided: the fixed-point iteration, and a
//! direct solve of the square system `(I - M̄ + e wᵀ)x = ĉ + ρ̄e` with
//! `w = m / Σm`, which picks the member of `x + span{e}` that keeps the total
//! strength of the initial ratings.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::diagnostics::{check_structure, default_eigen_tol, inf_norm, spectral_diagnostics};
use crate::error::{Error, Result};
use crate::model::{shift_distance, RatingModel};
use crate::tournament::DerivedMatrices;

pub const DEFAULT_MAX_ITER: usize = 100_000;

/// How average scores on the boundary of (0, 1) are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreHandling {
    /// Reject with [`Error::BoundaryScore`].
    #[default]
    Strict,
    /// Pull `s_i` to `[ε, 1 - ε]` with `ε = 1 / (2 m_i + 2)`. This leaves the
    /// underlying model and is opt-in only.
    Clamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Iterative,
    Direct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub ratings: DVector<f64>,
    pub method: Method,
    /// Updates applied after the initial iterate; 0 for the direct solve.
    pub iterations: usize,
    /// `‖(I - M̄)x - ĉ‖_∞`
    pub residual: f64,
    /// `Σ m_i x_i`
    pub pinned_total: f64,
}

#[derive(Debug, Clone)]
pub struct IterateOptions {
    /// Stop once `‖p⁽ˡ⁾ - p⁽ˡ⁻¹⁾‖_∞ < tol`; defaults to `1e-10 · max(1, ‖ĉ‖_∞)`.
    pub tol: Option<f64>,
    pub max_iter: usize,
    pub scores: ScoreHandling,
    pub keep_trace: bool,
}

impl Default for IterateOptions {
    fn default() -> Self {
        Self {
            tol: None,
            max_iter: DEFAULT_MAX_ITER,
            scores: ScoreHandling::Strict,
            keep_trace: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Iteration {
    pub outcome: SolveOutcome,
    pub tol: f64,
    /// Every iterate from `p⁽⁰⁾` on, when requested.
    pub trace: Vec<DVector<f64>>,
}

pub fn default_tol(c_hat: &DVector<f64>) -> f64 {
    1e-10 * c_hat.amax().max(1.0)
}

/// `c_i = F⁻¹(s_i)`.
pub fn quantile_offsets(
    d: &DerivedMatrices,
    model: &RatingModel,
    handling: ScoreHandling,
) -> Result<DVector<f64>> {
    let s = d.average_scores();
    let mut c = DVector::zeros(s.len());
    for (i, &si) in s.iter().enumerate() {
        let si = match handling {
            ScoreHandling::Strict => si,
            ScoreHandling::Clamp => {
                let eps = 1.0 / (2.0 * d.games()[i] + 2.0);
                si.clamp(eps, 1.0 - eps)
            }
        };
        c[i] = model.quantile(si).map_err(|_| Error::BoundaryScore {
            player: Some(i),
            score: si,
        })?;
    }
    Ok(c)
}

/// r-performance `M̄r + c`: the rating at which each player's expected score
/// against the average of their opponents equals their actual average score.
pub fn performance(
    d: &DerivedMatrices,
    model: &RatingModel,
    r: &DVector<f64>,
) -> Result<DVector<f64>> {
    d.check_len(r)?;
    let c = quantile_offsets(d, model, ScoreHandling::Strict)?;
    Ok(d.normalized() * r + c)
}

pub fn centered_offsets(d: &DerivedMatrices, model: &RatingModel) -> Result<DVector<f64>> {
    let c = quantile_offsets(d, model, ScoreHandling::Strict)?;
    center(d, &c)
}

/// `ĉ = c - (Σ m_i c_i / Σ m_i) e`
pub fn center(d: &DerivedMatrices, c: &DVector<f64>) -> Result<DVector<f64>> {
    let mean = d.weighted_mean(c)?;
    Ok(c.add_scalar(-mean))
}

/// `‖(I - M̄)x - ĉ‖_∞`
pub fn system_residual(d: &DerivedMatrices, x: &DVector<f64>, c_hat: &DVector<f64>) -> f64 {
    (x - d.normalized() * x - c_hat).amax()
}

/// Fixed-point iteration `p⁽⁰⁾ = M̄r + ĉ`, `p⁽ˡ⁾ = M̄p⁽ˡ⁻¹⁾ + ĉ`.
///
/// Convergence needs a connected, non-bipartite comparison graph; the caller
/// is expected to have checked. On failure the error carries the last iterate
/// and the spectral gap of `M̄`.
pub fn iterate(
    d: &DerivedMatrices,
    model: &RatingModel,
    r: &DVector<f64>,
    opts: &IterateOptions,
) -> Result<Iteration> {
    d.check_len(r)?;
    let c = quantile_offsets(d, model, opts.scores)?;
    let c_hat = center(d, &c)?;
    let tol = opts.tol.unwrap_or_else(|| default_tol(&c_hat));
    let mbar = d.normalized();

    let mut p = mbar * r + &c_hat;
    let mut trace = Vec::new();
    if opts.keep_trace {
        trace.push(p.clone());
    }
    let mut step = f64::INFINITY;
    for l in 1..=opts.max_iter {
        let next = mbar * &p + &c_hat;
        step = (&next - &p).amax();
        p = next;
        if opts.keep_trace {
            trace.push(p.clone());
        }
        if step < tol {
            return Ok(Iteration {
                outcome: SolveOutcome {
                    residual: system_residual(d, &p, &c_hat),
                    pinned_total: d.games().dot(&p),
                    ratings: p,
                    method: Method::Iterative,
                    iterations: l,
                },
                tol,
                trace,
            });
        }
    }

    let spectral_gap = spectral_diagnostics(d, default_eigen_tol(d.len()))
        .ok()
        .map(|s| s.spectral_gap);
    Err(Error::NotConverged {
        iterations: opts.max_iter,
        step_norm: step,
        spectral_gap,
        last_iterate: p.iter().copied().collect(),
    })
}

/// Solves `(I - M̄)x = ĉ` with `Σ m_i x_i = Σ m_i r_i`.
///
/// Needs only a connected graph. Bipartite schedules, where the iteration
/// oscillates, still have a unique pinned solution.
pub fn solve_direct(
    d: &DerivedMatrices,
    model: &RatingModel,
    r: &DVector<f64>,
    handling: ScoreHandling,
) -> Result<SolveOutcome> {
    d.check_len(r)?;
    let structure = check_structure(d);
    if !structure.connected() {
        return Err(Error::Disconnected {
            components: structure.components,
        });
    }
    let c = quantile_offsets(d, model, handling)?;
    let c_hat = center(d, &c)?;
    let x = pinned_solve(d, &c_hat, d.weighted_mean(r)?)?;
    Ok(SolveOutcome {
        residual: system_residual(d, &x, &c_hat),
        pinned_total: d.games().dot(&x),
        ratings: x,
        method: Method::Direct,
        iterations: 0,
    })
}

fn pinned_solve(d: &DerivedMatrices, c_hat: &DVector<f64>, average: f64) -> Result<DVector<f64>> {
    let n = d.len();
    let w = d.games() / d.total_games();
    // I - M̄ + e wᵀ
    let system = DMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - d.normalized()[(i, j)] + w[j]
    });
    let rhs = c_hat.add_scalar(average);
    let lu = system.lu();
    let x = lu.solve(&rhs).ok_or(Error::Singular)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(x)
}

/// Runs the raw update `p ← M̄p + c` and the centered one side by side for `l`
/// steps and returns their difference, which should be
/// `(l + 1)(Σ m_i c_i / Σ m_i) e`.
pub fn centering_gap(
    d: &DerivedMatrices,
    model: &RatingModel,
    r: &DVector<f64>,
    l: usize,
) -> Result<DVector<f64>> {
    d.check_len(r)?;
    let c = quantile_offsets(d, model, ScoreHandling::Strict)?;
    let c_hat = center(d, &c)?;
    let mbar = d.normalized();
    let start = mbar * r;
    let mut raw = &start + &c;
    let mut hatted = &start + &c_hat;
    for _ in 0..l {
        raw = mbar * &raw + &c;
        hatted = mbar * &hatted + &c_hat;
    }
    Ok(raw - hatted)
}

/// How far `x` is from being consistent: `min_λ ‖p^x - x - λe‖_∞`, where `p^x`
/// is the x-performance. Zero exactly for solutions of `(I - M̄)x = ĉ`.
pub fn consistency_residual(
    d: &DerivedMatrices,
    model: &RatingModel,
    x: &DVector<f64>,
) -> Result<f64> {
    let p = performance(d, model, x)?;
    shift_distance(&p, x)
}

/// Sup-norm of `M̄`, which is 1 for any row-stochastic matrix.
pub fn normalized_norm(d: &DerivedMatrices) -> f64 {
    inf_norm(d.normalized())
}
