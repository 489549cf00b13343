#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use recperf::diagnostics::check_structure;
use recperf::{DerivedMatrices, Tournament};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("P{i}")).collect()
}

fn game<R: Rng>(rng: &mut R) -> f64 {
    [0.0, 0.5, 1.0][rng.random_range(0..3)]
}

/// Adds `games` random results between `i` and `j`.
fn play<R: Rng>(rng: &mut R, a: &mut DMatrix<f64>, i: usize, j: usize, games: usize) {
    for _ in 0..games {
        let s = game(rng);
        a[(i, j)] += s;
        a[(j, i)] += 1.0 - s;
    }
}

/// Each pair meets with probability `density`, 1..=`max_games` times.
/// Returns `None` if some player ends up with no games.
pub fn random_tournament<R: Rng>(
    rng: &mut R,
    n: usize,
    density: f64,
    max_games: usize,
) -> Option<Tournament> {
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < density {
                let g = rng.random_range(1..=max_games);
                play(rng, &mut a, i, j, g);
            }
        }
    }
    Tournament::from_score_matrix(&labels(n), a).ok()
}

/// Single round robin with random results.
pub fn round_robin<R: Rng>(rng: &mut R, n: usize) -> Tournament {
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            play(rng, &mut a, i, j, 1);
        }
    }
    Tournament::from_score_matrix(&labels(n), a).unwrap()
}

/// Two teams that only play across.
pub fn team_tournament<R: Rng>(rng: &mut R, left: usize, right: usize) -> Option<Tournament> {
    let n = left + right;
    let mut a = DMatrix::zeros(n, n);
    for i in 0..left {
        for j in left..n {
            if rng.random::<f64>() < 0.7 {
                let g = rng.random_range(1..=2);
                play(rng, &mut a, i, j, g);
            }
        }
    }
    Tournament::from_score_matrix(&labels(n), a).ok()
}

/// Two independent random blocks.
pub fn split_tournament<R: Rng>(rng: &mut R, left: usize, right: usize) -> Option<Tournament> {
    let n = left + right;
    let mut a = DMatrix::zeros(n, n);
    for (lo, hi) in [(0, left), (left, n)] {
        for i in lo..hi {
            for j in i + 1..hi {
                if rng.random::<f64>() < 0.8 {
                    play(rng, &mut a, i, j, 1);
                }
            }
        }
    }
    Tournament::from_score_matrix(&labels(n), a).ok()
}

pub fn interior(d: &DerivedMatrices) -> bool {
    d.average_scores().iter().all(|&s| s > 0.0 && s < 1.0)
}

pub fn satisfies_p1_p2(d: &DerivedMatrices) -> bool {
    let s = check_structure(d);
    s.connected() && s.nonbipartite()
}

/// Random tournaments with 3 ≤ n ≤ `max_n` that are connected, non-bipartite
/// and have interior scores.
pub fn well_posed_corpus(seed: u64, count: usize, max_n: usize) -> Vec<Tournament> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.random_range(3..=max_n);
        let density = rng.random_range(0.3..1.0);
        let Some(t) = random_tournament(&mut rng, n, density, 3) else {
            continue;
        };
        let d = t.derive();
        if satisfies_p1_p2(&d) && interior(&d) {
            out.push(t);
        }
    }
    out
}

/// True when every pair met exactly once.
pub fn is_single_round_robin(d: &DerivedMatrices) -> bool {
    let m = d.matches();
    (0..d.len()).all(|i| (0..d.len()).all(|j| m[(i, j)] == if i == j { 0.0 } else { 1.0 }))
}

pub fn random_ratings<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(1000.0..2800.0))
}

pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
