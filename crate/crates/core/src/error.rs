use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet bound must satisfy 1 <= M <= 255 (got {0})")]
    InvalidAlphabet(u32),
    #[error("digit {digit} outside alphabet 0..={max}")]
    OutOfAlphabet { digit: i64, max: u8 },
    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(u8, u8),
    #[error("precision exhausted: the comparison is undecidable at maximum refinement")]
    PrecisionExhausted,
    #[error("sequence is not an admissible quasi-greedy expansion")]
    NotAdmissible,
    #[error("invalid base: {0}")]
    InvalidBase(String),
    #[error("empty subshift")]
    EmptySubshift,
    #[error("state space of {states} states exceeds the cap of {cap}")]
    StateSpaceTooLarge { states: u128, cap: u64 },
    #[error("word is not in the language of the subshift")]
    WordNotInLanguage,
    #[error("sequence is not in V")]
    NotInV,
    #[error("sequence lies outside the range between lambda and xi(1)")]
    NotInRange,
    #[error("not a plateau generator: {0}")]
    NotAPlateauGenerator(Rejection),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Why a word fails to generate an entropy plateau.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    Inadmissible,
    Reducible,
    BelowKl,
}

impl std::fmt::Display for Rejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Rejection::Inadmissible => "inadmissible",
            Rejection::Reducible => "reducible",
            Rejection::BelowKl => "below q_KL",
        })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
