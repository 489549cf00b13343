//! Commands behind the `recperf` binary, kept here so they can be tested
//! without spawning a process.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | I/O or other failure |
//! | 2 | bad command-line usage |
//! | 3 | input could not be parsed or violates tournament invariants |
//! | 4 | comparison graph is disconnected |
//! | 5 | an average score is 0 or 1 |
//! | 6 | fixed-point iteration did not converge |
//! | 7 | iterative method requested on a bipartite schedule |

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use serde::Serialize;

use crate::diagnostics::{self, default_eigen_tol, SpectralSummary};
use crate::error::{Error, Result};
use crate::io::LoadedTournament;
use crate::model::RatingModel;
use crate::ranking::{rank_from_ratings, Ranking};
use crate::simulate::{simulate, SimulationConfig};
use crate::solver::{self, IterateOptions, Method, ScoreHandling, SolveOutcome, DEFAULT_MAX_ITER};

pub const SCHEMA_VERSION: u32 = 1;

pub mod exit {
    pub const OK: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const PARSE: u8 = 3;
    pub const DISCONNECTED: u8 = 4;
    pub const BOUNDARY_SCORE: u8 = 5;
    pub const NOT_CONVERGED: u8 = 6;
    pub const BIPARTITE: u8 = 7;
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Disconnected { .. } => exit::DISCONNECTED,
        Error::BoundaryScore { .. } => exit::BOUNDARY_SCORE,
        Error::NotConverged { .. } => exit::NOT_CONVERGED,
        Error::Bipartite { .. } => exit::BIPARTITE,
        Error::InvalidModel(_) => exit::USAGE,
        Error::Io(_) | Error::Simulation(_) | Error::Eigensolver(_) | Error::Singular => {
            exit::FAILURE
        }
        Error::PowerLimitNotReached { .. } => exit::FAILURE,
        _ => exit::PARSE,
    }
}

fn group_labels(groups: &[Vec<usize>], players: &[String]) -> String {
    groups
        .iter()
        .map(|g| {
            let names: Vec<&str> = g.iter().map(|&i| players[i].as_str()).collect();
            format!("{{{}}}", names.join(","))
        })
        .collect::<Vec<_>>()
        .join(" | ")
}

/// Error message with player indices replaced by labels.
pub fn describe_error(e: &Error, players: &[String]) -> String {
    match e {
        Error::Disconnected { components } => format!(
            "P1 violated: the tournament splits into components {}; rate each part separately",
            group_labels(components, players)
        ),
        Error::Bipartite { left, right } => format!(
            "P2 violated: bipartition {}; the iterative method oscillates on team-style schedules, use --method direct",
            group_labels(&[left.clone(), right.clone()], players)
        ),
        Error::BoundaryScore {
            player: Some(i),
            score,
        } => format!(
            "player {:?} has average score {score}; performance ratings assume every average score lies strictly between 0 and 1 (pass --clamp-scores to pull it inside)",
            players.get(*i).map_or("?", String::as_str)
        ),
        Error::NotConverged {
            iterations,
            step_norm,
            spectral_gap,
            ..
        } => {
            let mut msg = format!(
                "iteration did not converge after {iterations} steps (last step {step_norm:.3e})"
            );
            if let Some(gap) = spectral_gap {
                let _ = write!(
                    msg,
                    "; spectral gap {gap:.3e}, a near-bipartite schedule converges slowly. Raise --max-iter or use --method direct"
                );
            }
            msg
        }
        other => other.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Direct,
    Iterative,
    Both,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsSummary {
    pub connected: bool,
    pub components: Vec<Vec<String>>,
    pub nonbipartite: bool,
    pub bipartition: Option<(Vec<String>, Vec<String>)>,
    pub spectral_gap: Option<f64>,
    pub per_pair_warnings: Vec<(String, String)>,
}

fn labels_of(idx: &[usize], players: &[String]) -> Vec<String> {
    idx.iter().map(|&i| players[i].clone()).collect()
}

fn summarize(report: &diagnostics::DiagnosticsReport, players: &[String]) -> DiagnosticsSummary {
    DiagnosticsSummary {
        connected: report.connected,
        components: report
            .components
            .iter()
            .map(|c| labels_of(c, players))
            .collect(),
        nonbipartite: report.nonbipartite,
        bipartition: report
            .bipartition
            .as_ref()
            .map(|(l, r)| (labels_of(l, players), labels_of(r, players))),
        spectral_gap: report.spectrum.as_ref().map(|s| s.spectral_gap),
        per_pair_warnings: report
            .per_pair_warnings
            .iter()
            .map(|&(i, j)| (players[i].clone(), players[j].clone()))
            .collect(),
    }
}

#[derive(Debug, Clone)]
pub struct RankOptions {
    pub model: RatingModel,
    pub method: MethodChoice,
    pub tol: Option<f64>,
    pub max_iter: usize,
    pub tie_tol: Option<f64>,
    pub clamp_scores: bool,
}

impl Default for RankOptions {
    fn default() -> Self {
        Self {
            model: RatingModel::elo(),
            method: MethodChoice::Direct,
            tol: None,
            max_iter: DEFAULT_MAX_ITER,
            tie_tol: None,
            clamp_scores: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PlayerRow {
    pub label: String,
    pub games: f64,
    pub average_score: f64,
    pub initial_rating: f64,
    pub rating: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodRun {
    pub method: Method,
    pub ratings: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub pinned_total: f64,
    pub tol: Option<f64>,
}

impl MethodRun {
    fn new(outcome: SolveOutcome, tol: Option<f64>) -> Self {
        Self {
            method: outcome.method,
            ratings: outcome.ratings.iter().copied().collect(),
            iterations: outcome.iterations,
            residual: outcome.residual,
            pinned_total: outcome.pinned_total,
            tol,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RankReport {
    pub schema: u32,
    pub command: &'static str,
    pub model: String,
    pub method: MethodChoice,
    pub total_strength: f64,
    pub players: Vec<PlayerRow>,
    pub ranking: Vec<Vec<String>>,
    pub diagnostics: DiagnosticsSummary,
    pub runs: Vec<MethodRun>,
    /// Present with `--method both`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_method_difference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rankings_agree: Option<bool>,
}

pub fn cmd_rank(input: &LoadedTournament, opts: &RankOptions) -> Result<RankReport> {
    let t = &input.tournament;
    let players = t.players();
    let d = t.derive();
    let report = diagnostics::diagnose(&d, t.scores(), None)?;
    if !report.connected {
        return Err(Error::Disconnected {
            components: report.components,
        });
    }
    let wants_iterative = matches!(opts.method, MethodChoice::Iterative | MethodChoice::Both);
    if wants_iterative {
        if let Some((left, right)) = report.bipartition.clone() {
            return Err(Error::Bipartite { left, right });
        }
    }
    let spectrum = diagnostics::spectral_diagnostics(&d, default_eigen_tol(d.len())).ok();
    let report = diagnostics::DiagnosticsReport { spectrum, ..report };

    let handling = if opts.clamp_scores {
        ScoreHandling::Clamp
    } else {
        ScoreHandling::Strict
    };
    let r = &input.initial_ratings;
    let mut runs = Vec::new();
    if matches!(opts.method, MethodChoice::Direct | MethodChoice::Both) {
        runs.push(MethodRun::new(
            solver::solve_direct(&d, &opts.model, r, handling)?,
            None,
        ));
    }
    if wants_iterative {
        let it = solver::iterate(
            &d,
            &opts.model,
            r,
            &IterateOptions {
                tol: opts.tol,
                max_iter: opts.max_iter,
                scores: handling,
                keep_trace: false,
            },
        )?;
        runs.push(MethodRun::new(it.outcome, Some(it.tol)));
    }

    let tie_tol = opts.tie_tol.unwrap_or_else(|| opts.model.default_tie_tol());
    let rankings: Vec<Ranking> = runs
        .iter()
        .map(|run| rank_from_ratings(&DVector::from_vec(run.ratings.clone()), tie_tol))
        .collect::<Result<_>>()?;
    let (max_method_difference, rankings_agree) = if runs.len() == 2 {
        let diff = runs[0]
            .ratings
            .iter()
            .zip(&runs[1].ratings)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        (Some(diff), Some(rankings[0] == rankings[1]))
    } else {
        (None, None)
    };

    let ranking = &rankings[0];
    let positions = ranking.positions();
    let rows = (0..t.len())
        .map(|i| PlayerRow {
            label: players[i].clone(),
            games: d.games()[i],
            average_score: d.average_scores()[i],
            initial_rating: r[i],
            rating: runs[0].ratings[i],
            rank: positions[i],
        })
        .collect();

    Ok(RankReport {
        schema: SCHEMA_VERSION,
        command: "rank",
        model: opts.model.to_string(),
        method: opts.method,
        total_strength: d.strength_summary(r)?.total,
        players: rows,
        ranking: ranking
            .labelled(players)
            .into_iter()
            .map(|g| g.into_iter().map(String::from).collect())
            .collect(),
        diagnostics: summarize(&report, players),
        runs,
        max_method_difference,
        rankings_agree,
    })
}

impl RankReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let width = self
            .players
            .iter()
            .map(|p| p.label.len())
            .max()
            .unwrap_or(6)
            .max(6);
        let _ = writeln!(
            out,
            "{:>4}  {:<width$}  {:>6}  {:>7}  {:>10}  {:>12}",
            "rank", "player", "games", "score", "initial", "rating"
        );
        let mut order: Vec<&PlayerRow> = self.players.iter().collect();
        order.sort_by(|a, b| a.rank.cmp(&b.rank).then(b.rating.total_cmp(&a.rating)));
        for p in order {
            let _ = writeln!(
                out,
                "{:>4}  {:<width$}  {:>6}  {:>7.4}  {:>10.2}  {:>12.3}",
                p.rank, p.label, p.games, p.average_score, p.initial_rating, p.rating
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "model: {}   total strength: {:.6}",
            self.model, self.total_strength
        );
        let diag = &self.diagnostics;
        let _ = writeln!(
            out,
            "P1 satisfied; P2 {}{}",
            if diag.nonbipartite {
                "satisfied"
            } else {
                "violated"
            },
            diag.spectral_gap
                .map_or(String::new(), |g| format!("; spectral gap {g:.4}"))
        );
        for run in &self.runs {
            let _ = writeln!(
                out,
                "{:?}: residual {:.3e}, iterations {}, pinned total {:.6}",
                run.method, run.residual, run.iterations, run.pinned_total
            );
        }
        if let Some(diff) = self.max_method_difference {
            let _ = writeln!(
                out,
                "max |direct - iterative| = {diff:.3e}; rankings {}",
                if self.rankings_agree == Some(true) {
                    "agree"
                } else {
                    "differ"
                }
            );
        }
        if !diag.per_pair_warnings.is_empty() {
            let pairs: Vec<String> = diag
                .per_pair_warnings
                .iter()
                .map(|(a, b)| format!("{a}-{b}"))
                .collect();
            let _ = writeln!(
                out,
                "warning: one-sided results in pairs {}",
                pairs.join(", ")
            );
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRow {
    pub eigenvalues: Vec<f64>,
    pub multiplicity_one: usize,
    pub has_minus_one: bool,
    pub spectral_gap: f64,
    pub tol: f64,
    pub iteration_estimate: Option<u64>,
    pub verdicts_agree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub schema: u32,
    pub command: &'static str,
    #[serde(flatten)]
    pub diagnostics: DiagnosticsSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumRow>,
}

/// `iteration_tol` feeds the convergence-iterations estimate only.
pub fn cmd_check(
    input: &LoadedTournament,
    spectral: bool,
    iteration_tol: f64,
) -> Result<CheckReport> {
    let t = &input.tournament;
    let d = t.derive();
    let tol = spectral.then(|| default_eigen_tol(d.len()));
    let report = diagnostics::diagnose(&d, t.scores(), tol)?;
    let agree = report.verdicts_agree();
    let spectrum = report
        .spectrum
        .as_ref()
        .map(|s: &SpectralSummary| SpectrumRow {
            eigenvalues: s.eigenvalues.clone(),
            multiplicity_one: s.multiplicity_one,
            has_minus_one: s.has_minus_one,
            spectral_gap: s.spectral_gap,
            tol: s.tol,
            iteration_estimate: s.iteration_estimate(iteration_tol),
            verdicts_agree: agree.unwrap_or(false),
        });
    Ok(CheckReport {
        schema: SCHEMA_VERSION,
        command: "check",
        diagnostics: summarize(&report, t.players()),
        spectrum,
    })
}

fn braces(names: &[String]) -> String {
    format!("{{{}}}", names.join(","))
}

impl CheckReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let d = &self.diagnostics;
        if d.connected {
            let _ = writeln!(out, "P1 satisfied: comparison graph is connected");
        } else {
            let comps: Vec<String> = d.components.iter().map(|c| braces(c)).collect();
            let _ = writeln!(out, "P1 violated: components {}", comps.join(" | "));
        }
        match &d.bipartition {
            None => {
                let _ = writeln!(out, "P2 satisfied: every component has an odd cycle");
            }
            Some((l, r)) => {
                let _ = writeln!(
                    out,
                    "P2 violated: bipartition {} | {}",
                    braces(l),
                    braces(r)
                );
            }
        }
        if let Some(s) = &self.spectrum {
            let eig: Vec<String> = s.eigenvalues.iter().map(|v| format!("{v:.6}")).collect();
            let _ = writeln!(out, "eigenvalues: [{}]", eig.join(", "));
            let _ = writeln!(
                out,
                "multiplicity of 1: {}; -1 present: {}; tolerance {:.1e}",
                s.multiplicity_one, s.has_minus_one, s.tol
            );
            let _ = writeln!(out, "spectral gap: {:.6}", s.spectral_gap);
            match s.iteration_estimate {
                Some(k) => {
                    let _ = writeln!(out, "estimated iterations to converge: {k}");
                }
                None => {
                    let _ = writeln!(out, "estimated iterations to converge: never (no gap)");
                }
            }
            let _ = writeln!(
                out,
                "graph and spectral verdicts {}",
                if s.verdicts_agree {
                    "agree"
                } else {
                    "DISAGREE"
                }
            );
        }
        for (a, b) in &d.per_pair_warnings {
            let _ = writeln!(out, "warning: {a} vs {b}: one side scored every point");
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PerformanceRow {
    pub label: String,
    pub games: f64,
    pub average_score: f64,
    pub initial_rating: f64,
    pub opponent_average: f64,
    pub performance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recursive: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PerformanceReport {
    pub schema: u32,
    pub command: &'static str,
    pub model: String,
    pub players: Vec<PerformanceRow>,
}

pub fn cmd_performance(
    input: &LoadedTournament,
    model: &RatingModel,
    recursive: bool,
) -> Result<PerformanceReport> {
    let t = &input.tournament;
    let d = t.derive();
    let r = &input.initial_ratings;
    let p = solver::performance(&d, model, r)?;
    let opp = d.normalized() * r;
    let rec = if recursive {
        Some(solver::solve_direct(&d, model, r, ScoreHandling::Strict)?.ratings)
    } else {
        None
    };
    let players = (0..t.len())
        .map(|i| PerformanceRow {
            label: t.players()[i].clone(),
            games: d.games()[i],
            average_score: d.average_scores()[i],
            initial_rating: r[i],
            opponent_average: opp[i],
            performance: p[i],
            recursive: rec.as_ref().map(|x| x[i]),
        })
        .collect();
    Ok(PerformanceReport {
        schema: SCHEMA_VERSION,
        command: "performance",
        model: model.to_string(),
        players,
    })
}

impl PerformanceReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let width = self
            .players
            .iter()
            .map(|p| p.label.len())
            .max()
            .unwrap_or(6)
            .max(6);
        let with_rec = self.players.iter().any(|p| p.recursive.is_some());
        let _ = write!(
            out,
            "{:<width$}  {:>6}  {:>7}  {:>10}  {:>10}  {:>12}",
            "player", "games", "score", "initial", "opp. avg", "performance"
        );
        if with_rec {
            let _ = write!(out, "  {:>12}", "recursive");
        }
        let _ = writeln!(out);
        for p in &self.players {
            let _ = write!(
                out,
                "{:<width$}  {:>6}  {:>7.4}  {:>10.2}  {:>10.2}  {:>12.3}",
                p.label,
                p.games,
                p.average_score,
                p.initial_rating,
                p.opponent_average,
                p.performance
            );
            if let Some(x) = p.recursive {
                let _ = write!(out, "  {x:>12.3}");
            }
            let _ = writeln!(out);
        }
        let _ = writeln!(out, "\nmodel: {}", self.model);
        out
    }
}

/// `results.json` → `results.truth.json`
pub fn truth_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map_or_else(|| "tournament".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.truth.json"))
}

/// Writes the tournament file and its ground-truth sidecar; returns both paths.
pub fn cmd_simulate(config: &SimulationConfig, out: &Path) -> Result<(PathBuf, PathBuf)> {
    let sim = simulate(config)?;
    let truth = truth_path(out);
    std::fs::write(out, sim.file.to_json() + "\n")?;
    let truth_json = serde_json::to_string_pretty(&sim.truth).expect("ground truth serializes");
    std::fs::write(&truth, truth_json + "\n")?;
    Ok((out.to_path_buf(), truth))
}

pub fn to_json<T: Serialize>(report: &T) -> String {
    serde_json::to_string_pretty(report).expect("reports serialize")
}
