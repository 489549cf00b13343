//! Synthetic tournaments with known player strengths.
//!
//! Each scheduled game between `i` and `j` is a win for `i` with probability
//! `F(θ_i - θ_j)`; there are no draws. Output depends only on the config and
//! its seed.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{MatchEntry, TournamentFile};
use crate::model::RatingModel;

const MAX_SCHEDULE_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strengths {
    /// Given per player.
    Explicit(Vec<f64>),
    /// Evenly spaced from the first bound to the second.
    Linspace(f64, f64),
    /// Drawn uniformly from the range with the config seed.
    Uniform(f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// Every pair meets `rounds` times.
    RoundRobin { rounds: usize },
    /// `games` games, each between a uniformly drawn pair.
    RandomPairings { games: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub n: usize,
    pub strengths: Strengths,
    #[serde(default = "default_model")]
    pub model: String,
    pub schedule: Schedule,
    #[serde(default)]
    pub seed: u64,
}

fn default_model() -> String {
    "elo".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub true_strengths: Vec<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulated {
    pub file: TournamentFile,
    pub truth: GroundTruth,
}

pub fn player_label(i: usize) -> String {
    format!("P{:02}", i + 1)
}

pub fn simulate(config: &SimulationConfig) -> Result<Simulated> {
    let n = config.n;
    if n < 2 {
        return Err(Error::Simulation(format!(
            "need at least 2 players, got {n}"
        )));
    }
    let model: RatingModel = config.model.parse()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let strengths = match &config.strengths {
        Strengths::Explicit(v) => {
            if v.len() != n {
                return Err(Error::Simulation(format!(
                    "{} strengths for {n} players",
                    v.len()
                )));
            }
            v.clone()
        }
        &Strengths::Linspace(lo, hi) => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
        &Strengths::Uniform(lo, hi) => {
            if lo.partial_cmp(&hi).is_none_or(|o| o.is_gt()) {
                return Err(Error::Simulation(format!(
                    "empty strength range [{lo}, {hi}]"
                )));
            }
            (0..n).map(|_| rng.random_range(lo..=hi)).collect()
        }
    };
    if let Some(&bad) = strengths.iter().find(|v| !v.is_finite()) {
        return Err(Error::Simulation(format!("non-finite strength {bad}")));
    }

    let pairs = schedule(&config.schedule, n, &mut rng)?;
    let players: Vec<String> = (0..n).map(player_label).collect();
    let matches = pairs
        .into_iter()
        .map(|(i, j)| {
            let p = model.cdf(strengths[i] - strengths[j]);
            let score_a = if rng.random::<f64>() < p { 1.0 } else { 0.0 };
            MatchEntry {
                a: players[i].clone(),
                b: players[j].clone(),
                score_a,
            }
        })
        .collect();

    Ok(Simulated {
        file: TournamentFile {
            players,
            initial_ratings: None,
            matches: Some(matches),
            crosstable: None,
        },
        truth: GroundTruth {
            true_strengths: strengths,
            seed: config.seed,
        },
    })
}

fn schedule(schedule: &Schedule, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(usize, usize)>> {
    let all_pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    match *schedule {
        Schedule::RoundRobin { rounds } => {
            if n < 3 {
                return Err(Error::Simulation(
                    "round robins need at least 3 players to avoid a bipartite schedule".into(),
                ));
            }
            if rounds == 0 {
                return Err(Error::Simulation("round robin with 0 rounds".into()));
            }
            Ok((0..rounds)
                .flat_map(|round| {
                    // alternate colours between rounds
                    all_pairs
                        .iter()
                        .map(move |&(i, j)| if round % 2 == 0 { (i, j) } else { (j, i) })
                })
                .collect())
        }
        Schedule::RandomPairings { games } => {
            if games * 2 < n {
                return Err(Error::Simulation(format!(
                    "{games} games cannot involve all {n} players"
                )));
            }
            for _ in 0..MAX_SCHEDULE_ATTEMPTS {
                let drawn: Vec<(usize, usize)> = (0..games)
                    .map(|_| {
                        let &(i, j) = all_pairs.choose(rng).expect("n >= 2");
                        if rng.random::<bool>() {
                            (i, j)
                        } else {
                            (j, i)
                        }
                    })
                    .collect();
                let mut played = vec![false; n];
                for &(i, j) in &drawn {
                    played[i] = true;
                    played[j] = true;
                }
                if played.iter().all(|&p| p) {
                    return Ok(drawn);
                }
            }
            Err(Error::Simulation(format!(
                "no schedule with every player active after {MAX_SCHEDULE_ATTEMPTS} attempts"
            )))
        }
    }
}
