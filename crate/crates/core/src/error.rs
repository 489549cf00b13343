use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("a tournament needs at least 2 players, got {0}")]
    TooFewPlayers(usize),
    #[error("player labels must be non-empty")]
    EmptyLabel,
    #[error("duplicate player label {0:?}")]
    DuplicatePlayer(String),
    #[error("unknown player {0:?}")]
    UnknownPlayer(String),
    #[error("player {0:?} cannot play against themselves")]
    SelfMatch(String),
    #[error("game score {score} for {player:?} is outside [0, 1]")]
    ScoreOutOfRange { player: String, score: f64 },
    #[error("score matrix entry ({row}, {col}) = {value} must be finite and nonnegative")]
    InvalidEntry { row: usize, col: usize, value: f64 },
    #[error("diagonal entry for player {player:?} is {value}, must be 0")]
    NonzeroDiagonal { player: String, value: f64 },
    #[error("player {0:?} has not played any games")]
    InactivePlayer(String),
    #[error("expected length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("non-finite value {0}")]
    NonFinite(f64),

    #[error("invalid rating model {0:?}: expected elo, elo:<scale>, logistic:<scale> or gaussian:<sigma>")]
    InvalidModel(String),
    #[error("{}", boundary_message(*player, *score))]
    BoundaryScore { player: Option<usize>, score: f64 },

    #[error("tournament is disconnected into {} components", components.len())]
    Disconnected { components: Vec<Vec<usize>> },
    #[error("comparison graph is bipartite; the fixed-point iteration cannot converge")]
    Bipartite { left: Vec<usize>, right: Vec<usize> },
    #[error("linear system is singular")]
    Singular,
    #[error("iteration did not converge after {iterations} steps (last step {step_norm:e}{})", gap_hint(*spectral_gap))]
    NotConverged {
        iterations: usize,
        step_norm: f64,
        spectral_gap: Option<f64>,
        last_iterate: Vec<f64>,
    },
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
    #[error("M̄^l did not reach its limit within {l_max} powers (distance {norm:e})")]
    PowerLimitNotReached { l_max: usize, norm: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("simulation failed: {0}")]
    Simulation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

fn boundary_message(player: Option<usize>, score: f64) -> String {
    match player {
        Some(i) => format!(
            "player #{i} has average score {score}; performance needs scores strictly inside (0, 1)"
        ),
        None => format!("score {score} is not strictly inside (0, 1)"),
    }
}

fn gap_hint(gap: Option<f64>) -> String {
    match gap {
        Some(g) => format!(", spectral gap {g:.3e}"),
        None => String::new(),
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
