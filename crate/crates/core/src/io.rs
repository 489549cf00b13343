//! Tournament files: JSON documents and CSV crosstables.
//!
//! JSON form:
//!
//! ```json
//! {
//!   "players": ["A", "B", "C"],
//!   "initial_ratings": [2000, 2000, 2000],
//!   "matches": [{"a": "A", "b": "B", "score_a": 1.0}]
//! }
//! ```
//!
//! with `crosstable` (an n×n matrix of `A` entries) in place of `matches`.
//! `initial_ratings` is optional. The CSV form is a crosstable with a header
//! row and a leading column of labels; empty cells mean 0 and diagonal
//! cells must be empty or 0.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tournament::{MatchRecord, Tournament};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchEntry {
    pub a: String,
    pub b: String,
    pub score_a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TournamentFile {
    pub players: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_ratings: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matches: Option<Vec<MatchEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crosstable: Option<Vec<Vec<f64>>>,
}

/// A parsed tournament with its initial ratings.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedTournament {
    pub tournament: Tournament,
    pub initial_ratings: DVector<f64>,
    /// Informational messages, e.g. defaulted ratings.
    pub notes: Vec<String>,
}

impl TournamentFile {
    /// Crosstable form of an existing tournament.
    pub fn from_tournament(t: &Tournament, initial_ratings: Option<&DVector<f64>>) -> Self {
        let a = t.scores();
        Self {
            players: t.players().to_vec(),
            initial_ratings: initial_ratings.map(|r| r.iter().copied().collect()),
            matches: None,
            crosstable: Some(
                a.row_iter()
                    .map(|row| row.iter().copied().collect())
                    .collect(),
            ),
        }
    }

    pub fn into_loaded(self) -> Result<LoadedTournament> {
        let tournament = match (self.matches, self.crosstable) {
            (Some(matches), None) => {
                let records: Vec<MatchRecord> = matches
                    .into_iter()
                    .map(|m| MatchRecord::new(m.a, m.b, m.score_a))
                    .collect();
                Tournament::from_matches(&self.players, &records)?
            }
            (None, Some(rows)) => {
                let n = self.players.len();
                if rows.len() != n {
                    return Err(Error::Input(format!(
                        "crosstable has {} rows for {n} players",
                        rows.len()
                    )));
                }
                let mut a = DMatrix::zeros(n, n);
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != n {
                        return Err(Error::Input(format!(
                            "crosstable row for {:?} has {} entries, expected {n}",
                            self.players[i],
                            row.len()
                        )));
                    }
                    for (j, &v) in row.iter().enumerate() {
                        a[(i, j)] = v;
                    }
                }
                Tournament::from_score_matrix(&self.players, a)?
            }
            (Some(_), Some(_)) => {
                return Err(Error::Input(
                    "give either \"matches\" or \"crosstable\", not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Input("missing \"matches\" or \"crosstable\"".into()))
            }
        };
        let n = tournament.len();
        let mut notes = Vec::new();
        let initial_ratings = match self.initial_ratings {
            Some(r) => {
                if r.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: r.len(),
                    });
                }
                if let Some(&bad) = r.iter().find(|v| !v.is_finite()) {
                    return Err(Error::NonFinite(bad));
                }
                DVector::from_vec(r)
            }
            None => {
                notes.push(
                    "no initial ratings given; using 0 for every player (the ranking does not depend on them)"
                        .to_string(),
                );
                DVector::zeros(n)
            }
        };
        Ok(LoadedTournament {
            tournament,
            initial_ratings,
            notes,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tournament files serialize")
    }
}

pub fn parse_json(text: &str) -> Result<LoadedTournament> {
    let file: TournamentFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.into_loaded()
}

pub fn parse_csv(text: &str) -> Result<LoadedTournament> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(csv_error)?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let line = rec.position().map_or(0, |p| p.line() as usize);
        rows.push((line, rec));
    }
    let Some((header_line, header)) = rows.first() else {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "empty crosstable".into(),
        });
    };
    let players: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let n = players.len();
    if rows.len() - 1 != n {
        return Err(Error::Parse {
            line: *header_line,
            column: 1,
            message: format!(
                "header names {n} players but {} rows follow",
                rows.len() - 1
            ),
        });
    }

    let mut a = DMatrix::zeros(n, n);
    for (i, (line, rec)) in rows.iter().skip(1).enumerate() {
        let parse_err = |column: usize, message: String| Error::Parse {
            line: *line,
            column,
            message,
        };
        if rec.len() != n + 1 {
            return Err(parse_err(
                1,
                format!("expected {} cells, got {}", n + 1, rec.len()),
            ));
        }
        let label = &rec[0];
        if label != players[i] {
            return Err(parse_err(
                1,
                format!(
                    "row label {label:?} does not match column label {:?}",
                    players[i]
                ),
            ));
        }
        for j in 0..n {
            let cell = &rec[j + 1];
            let value = if cell.is_empty() {
                0.0
            } else {
                cell.parse::<f64>()
                    .map_err(|_| parse_err(j + 2, format!("non-numeric cell {cell:?}")))?
            };
            if i == j && value != 0.0 {
                return Err(Error::NonzeroDiagonal {
                    player: label.to_string(),
                    value,
                });
            }
            a[(i, j)] = value;
        }
    }
    let tournament = Tournament::from_score_matrix(&players, a)?;
    Ok(LoadedTournament {
        initial_ratings: DVector::zeros(n),
        notes: vec![
            "CSV crosstables carry no initial ratings; using 0 for every player".to_string(),
        ],
        tournament,
    })
}

fn csv_error(e: csv::Error) -> Error {
    let (line, column) = e.position().map_or((0, 0), |p| (p.line() as usize, 1));
    Error::Parse {
        line,
        column,
        message: e.to_string(),
    }
}

pub fn write_csv(t: &Tournament) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut header = vec![String::new()];
    header.extend(t.players().iter().cloned());
    w.write_record(&header).expect("in-memory write");
    for (i, p) in t.players().iter().enumerate() {
        let mut row = vec![p.clone()];
        row.extend((0..t.len()).map(|j| {
            if i == j {
                String::new()
            } else {
                t.scores()[(i, j)].to_string()
            }
        }));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 labels")
}

/// Parses JSON when the document starts with `{`, CSV otherwise.
pub fn parse_tournament(text: &str) -> Result<LoadedTournament> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_csv(text)
    }
}

pub fn load_tournament(path: &Path) -> Result<LoadedTournament> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_tournament(&text)
}
