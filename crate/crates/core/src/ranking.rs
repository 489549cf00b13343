//! Orderings induced by rating vectors.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tournament::DerivedMatrices;

/// Tolerance used when ranking by average score.
pub const SCORE_TIE_TOL: f64 = 1e-12;

/// Ordered tie groups, best first. Indices inside a group are ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ranking {
    groups: Vec<Vec<usize>>,
}

impl Ranking {
    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Competition rank ("1224" style) of every player.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.len()];
        let mut next = 1;
        for group in &self.groups {
            for &i in group {
                pos[i] = next;
            }
            next += group.len();
        }
        pos
    }

    pub fn labelled<'a>(&self, players: &'a [String]) -> Vec<Vec<&'a str>> {
        self.groups
            .iter()
            .map(|g| g.iter().map(|&i| players[i].as_str()).collect())
            .collect()
    }
}

/// Sorts descending and merges neighbours within `tie_tol` of each other.
///
/// Merging is transitive: a chain of near-ties each within `tie_tol` ends up
/// in one group even if its ends are further apart.
pub fn rank_from_ratings(x: &DVector<f64>, tie_tol: f64) -> Result<Ranking> {
    if let Some(&bad) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(bad));
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut prev = f64::NAN;
    for i in order {
        match groups.last_mut() {
            Some(g) if prev - x[i] <= tie_tol => g.push(i),
            _ => groups.push(vec![i]),
        }
        prev = x[i];
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    Ok(Ranking { groups })
}

/// The scores ranking: order by average score.
pub fn score_ranking(d: &DerivedMatrices) -> Ranking {
    rank_from_ratings(d.average_scores(), SCORE_TIE_TOL).expect("average scores are finite")
}

/// Kendall's tau-b between two score vectors of equal length.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let n = x.len();
    let (mut concordant, mut discordant) = (0i64, 0i64);
    let (mut ties_x, mut ties_y) = (0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = (x[i] - x[j])
                .partial_cmp(&0.0)
                .unwrap_or(std::cmp::Ordering::Equal);
            let dy = (y[i] - y[j])
                .partial_cmp(&0.0)
                .unwrap_or(std::cmp::Ordering::Equal);
            use std::cmp::Ordering::Equal;
            match (dx, dy) {
                (Equal, Equal) => {}
                (Equal, _) => ties_x += 1,
                (_, Equal) => ties_y += 1,
                (a, b) if a == b => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let denom =
        (((concordant + discordant + ties_x) * (concordant + discordant + ties_y)) as f64).sqrt();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((concordant - discordant) as f64 / denom)
}
