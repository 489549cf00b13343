//! Tournament data model and the matrices derived from it.
//!
//! A tournament is a set of labelled players together with the score matrix
//! `A`, where `A[(i, j)]` is the total score player `i` took from player `j`
//! over all their games. Every game hands out one point in total, so the
//! matches matrix `M = A + Aᵀ` counts games per pair and never needs to be
//! stored separately.

use std::collections::{HashMap, HashSet};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// One game between `a` and `b`; `b` is credited with `1 - score_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchRecord {
    pub a: String,
    pub b: String,
    pub score_a: f64,
}

impl MatchRecord {
    pub fn new(a: impl Into<String>, b: impl Into<String>, score_a: f64) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            score_a,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tournament {
    players: Vec<String>,
    scores: DMatrix<f64>,
}

impl Tournament {
    /// Aggregates per-game results into the score matrix.
    pub fn from_matches<S: AsRef<str>>(players: &[S], records: &[MatchRecord]) -> Result<Self> {
        let players = validate_labels(players)?;
        let index: HashMap<&str, usize> = players
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_str(), i))
            .collect();
        let lookup = |label: &str| {
            index
                .get(label)
                .copied()
                .ok_or_else(|| Error::UnknownPlayer(label.to_string()))
        };

        let n = players.len();
        let mut scores = DMatrix::zeros(n, n);
        for rec in records {
            let a = lookup(&rec.a)?;
            let b = lookup(&rec.b)?;
            if a == b {
                return Err(Error::SelfMatch(rec.a.clone()));
            }
            if !(0.0..=1.0).contains(&rec.score_a) {
                return Err(Error::ScoreOutOfRange {
                    player: rec.a.clone(),
                    score: rec.score_a,
                });
            }
            scores[(a, b)] += rec.score_a;
            scores[(b, a)] += 1.0 - rec.score_a;
        }
        Self::from_score_matrix(&players, scores)
    }

    /// Crosstable ingestion: only matrix-level invariants are checked.
    pub fn from_score_matrix<S: AsRef<str>>(players: &[S], scores: DMatrix<f64>) -> Result<Self> {
        let players = validate_labels(players)?;
        let n = players.len();
        if scores.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: scores.nrows(),
            });
        }
        if scores.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: scores.ncols(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                let v = scores[(i, j)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidEntry {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
            if scores[(i, i)] != 0.0 {
                return Err(Error::NonzeroDiagonal {
                    player: players[i].clone(),
                    value: scores[(i, i)],
                });
            }
        }
        for i in 0..n {
            let games: f64 = (0..n).map(|j| scores[(i, j)] + scores[(j, i)]).sum();
            if games <= 0.0 {
                return Err(Error::InactivePlayer(players[i].clone()));
            }
        }
        Ok(Self { players, scores })
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn len(&self) -> usize {
        self.players.len()
    }

    pub fn is_empty(&self) -> bool {
        self.players.is_empty()
    }

    pub fn scores(&self) -> &DMatrix<f64> {
        &self.scores
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.players.iter().position(|p| p == label)
    }

    pub fn derive(&self) -> DerivedMatrices {
        DerivedMatrices::new(&self.scores)
    }

    /// Relabels players so that player `i` becomes player `perm[i]`.
    ///
    /// The result is an equivalent tournament: `A'[(perm[i], perm[j])] = A[(i, j)]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let n = self.len();
        check_permutation(perm, n)?;
        let mut players = vec![String::new(); n];
        let mut scores = DMatrix::zeros(n, n);
        for i in 0..n {
            players[perm[i]] = self.players[i].clone();
            for j in 0..n {
                scores[(perm[i], perm[j])] = self.scores[(i, j)];
            }
        }
        Ok(Self { players, scores })
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "expected {n} entries, got {}",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n {
            return Err(Error::InvalidPermutation(format!("index {p} out of range")));
        }
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(format!("index {p} repeated")));
        }
    }
    Ok(())
}

fn validate_labels<S: AsRef<str>>(players: &[S]) -> Result<Vec<String>> {
    if players.len() < 2 {
        return Err(Error::TooFewPlayers(players.len()));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(players.len());
    for p in players {
        let p = p.as_ref();
        if p.trim().is_empty() {
            return Err(Error::EmptyLabel);
        }
        if !seen.insert(p) {
            return Err(Error::DuplicatePlayer(p.to_string()));
        }
        out.push(p.to_string());
    }
    Ok(out)
}

/// Quantities every rating computation works from.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedMatrices {
    matches: DMatrix<f64>,
    games: DVector<f64>,
    normalized: DMatrix<f64>,
    average_scores: DVector<f64>,
}

impl DerivedMatrices {
    fn new(scores: &DMatrix<f64>) -> Self {
        let matches = scores + scores.transpose();
        let n = matches.nrows();
        let games = DVector::from_iterator(n, matches.row_iter().map(|row| row.sum()));
        let mut normalized = matches.clone();
        for (i, mut row) in normalized.row_iter_mut().enumerate() {
            row /= games[i];
        }
        let average_scores = DVector::from_iterator(
            n,
            scores
                .row_iter()
                .enumerate()
                .map(|(i, row)| row.sum() / games[i]),
        );
        Self {
            matches,
            games,
            normalized,
            average_scores,
        }
    }

    pub fn len(&self) -> usize {
        self.games.len()
    }

    pub fn is_empty(&self) -> bool {
        self.games.is_empty()
    }

    /// Games per pair, `M = A + Aᵀ`.
    pub fn matches(&self) -> &DMatrix<f64> {
        &self.matches
    }

    /// Games played by each player, `m_i`.
    pub fn games(&self) -> &DVector<f64> {
        &self.games
    }

    pub fn total_games(&self) -> f64 {
        self.games.sum()
    }

    /// Row-stochastic `M̄ = D⁻¹M`.
    pub fn normalized(&self) -> &DMatrix<f64> {
        &self.normalized
    }

    pub fn average_scores(&self) -> &DVector<f64> {
        &self.average_scores
    }

    /// `⟨v, w⟩ = Σ m_i v_i w_i`, the inner product under which `M̄` is self-adjoint.
    pub fn weighted_inner(&self, v: &DVector<f64>, w: &DVector<f64>) -> Result<f64> {
        self.check_len(v)?;
        self.check_len(w)?;
        Ok(self
            .games
            .iter()
            .zip(v.iter().zip(w.iter()))
            .map(|(m, (a, b))| m * a * b)
            .sum())
    }

    /// m-weighted mean `⟨v, e⟩ / ⟨e, e⟩`.
    pub fn weighted_mean(&self, v: &DVector<f64>) -> Result<f64> {
        self.check_len(v)?;
        Ok(self.games.dot(v) / self.total_games())
    }

    pub fn strength_summary(&self, ratings: &DVector<f64>) -> Result<StrengthSummary> {
        self.check_len(ratings)?;
        let total = self.games.dot(ratings);
        Ok(StrengthSummary {
            total,
            average: total / self.total_games(),
        })
    }

    pub(crate) fn check_len(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: v.len(),
            });
        }
        Ok(())
    }
}

/// Total strength `Σ m_i r_i` and its per-game average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrengthSummary {
    pub total: f64,
    pub average: f64,
}
