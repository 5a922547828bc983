//! Chance against design: deck-matching odds and the knight's tour.

use std::fmt;
use std::str::FromStr;

use num_traits::One;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{factorial, Odds};

/// Odds `(k! - 1) : 1` that two decks of `k` cards found in the same order
/// were arranged by design rather than shuffled independently.
pub fn deck_match_odds(deck_size: u64) -> Result<Odds> {
    if deck_size == 0 {
        return Err(Error::domain("a deck needs at least one card"));
    }
    Odds::new(factorial(deck_size) - 1u32, One::one())
}

pub const BOARD: u8 = 8;
pub const SQUARES: usize = 64;

/// A square, file and rank both in `0..8`; `a1` is `(0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Square {
    file: u8,
    rank: u8,
}

impl Square {
    pub fn new(file: u8, rank: u8) -> Option<Self> {
        (file < BOARD && rank < BOARD).then_some(Self { file, rank })
    }

    pub fn file(&self) -> u8 {
        self.file
    }

    pub fn rank(&self) -> u8 {
        self.rank
    }

    fn index(&self) -> usize {
        self.rank as usize * BOARD as usize + self.file as usize
    }

    pub fn is_knight_move(&self, other: &Square) -> bool {
        let df = self.file.abs_diff(other.file);
        let dr = self.rank.abs_diff(other.rank);
        (df, dr) == (1, 2) || (df, dr) == (2, 1)
    }

    /// Knight moves from here, ordered by `(file, rank)`.
    pub fn knight_moves(&self) -> Vec<Square> {
        const JUMPS: [(i8, i8); 8] = [(-2, -1), (-2, 1), (-1, -2), (-1, 2), (1, -2), (1, 2), (2, -1), (2, 1)];
        let mut out: Vec<Square> = JUMPS
            .iter()
            .filter_map(|&(df, dr)| {
                let f = self.file as i8 + df;
                let r = self.rank as i8 + dr;
                (f >= 0 && r >= 0).then(|| Square::new(f as u8, r as u8)).flatten()
            })
            .collect();
        out.sort();
        out
    }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", (b'a' + self.file) as char, self.rank + 1)
    }
}

impl FromStr for Square {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bytes = s.trim().as_bytes();
        let bad = || Error::usage(format!("{s:?} is not a square a1..h8"));
        if bytes.len() != 2 {
            return Err(bad());
        }
        let file = bytes[0].to_ascii_lowercase().wrapping_sub(b'a');
        let rank = bytes[1].wrapping_sub(b'1');
        Square::new(file, rank).ok_or_else(bad)
    }
}

impl Serialize for Square {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A knight's path visiting all 64 squares once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tour {
    squares: Vec<Square>,
}

impl Tour {
    pub fn squares(&self) -> &[Square] {
        &self.squares
    }
}

impl TryFrom<Vec<Square>> for Tour {
    type Error = TourViolation;

    fn try_from(squares: Vec<Square>) -> std::result::Result<Self, TourViolation> {
        match validate_tour(&squares) {
            TourVerdict::Valid => Ok(Tour { squares }),
            TourVerdict::Invalid(v) => Err(v),
        }
    }
}

impl fmt::Display for Tour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_squares(f, &self.squares)
    }
}

fn write_squares(f: &mut fmt::Formatter<'_>, squares: &[Square]) -> fmt::Result {
    for (i, s) in squares.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{s}")?;
    }
    Ok(())
}

/// Parses the comma-separated serialization `a1,b3,...`.
pub fn parse_squares(s: &str) -> Result<Vec<Square>> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationReason {
    Length,
    Repeat,
    IllegalMove,
}

impl fmt::Display for ViolationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationReason::Length => "length",
            ViolationReason::Repeat => "repeat",
            ViolationReason::IllegalMove => "illegal move",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TourViolation {
    /// Offending position in the list (the list length for `Length`).
    pub index: usize,
    pub reason: ViolationReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TourVerdict {
    Valid,
    Invalid(TourViolation),
}

/// Checks length, then walks the list reporting the first repeat or illegal move.
pub fn validate_tour(squares: &[Square]) -> TourVerdict {
    if squares.len() != SQUARES {
        return TourVerdict::Invalid(TourViolation { index: squares.len(), reason: ViolationReason::Length });
    }
    let mut seen = [false; SQUARES];
    for (i, sq) in squares.iter().enumerate() {
        if std::mem::replace(&mut seen[sq.index()], true) {
            return TourVerdict::Invalid(TourViolation { index: i, reason: ViolationReason::Repeat });
        }
        if i > 0 && !squares[i - 1].is_knight_move(sq) {
            return TourVerdict::Invalid(TourViolation { index: i, reason: ViolationReason::IllegalMove });
        }
    }
    TourVerdict::Valid
}

/// Open knight's tour from `start`.
///
/// Depth-first search trying successors in order of fewest onward moves
/// (Warnsdorff's rule), ties broken by lowest `(file, rank)`. The heuristic
/// alone almost always succeeds; backtracking makes the search complete.
pub fn find_tour(start: Square) -> Tour {
    let mut visited = [false; SQUARES];
    let mut path = Vec::with_capacity(SQUARES);
    visited[start.index()] = true;
    path.push(start);
    let found = extend(&mut path, &mut visited);
    assert!(found, "every square of the 8×8 board starts an open tour");
    Tour { squares: path }
}

fn onward(sq: &Square, visited: &[bool; SQUARES]) -> usize {
    sq.knight_moves().iter().filter(|m| !visited[m.index()]).count()
}

fn extend(path: &mut Vec<Square>, visited: &mut [bool; SQUARES]) -> bool {
    if path.len() == SQUARES {
        return true;
    }
    let here = *path.last().unwrap();
    let mut candidates: Vec<(usize, Square)> = here
        .knight_moves()
        .into_iter()
        .filter(|m| !visited[m.index()])
        .map(|m| (onward(&m, visited), m))
        .collect();
    candidates.sort();
    for (_, next) in candidates {
        visited[next.index()] = true;
        path.push(next);
        if extend(path, visited) {
            return true;
        }
        path.pop();
        visited[next.index()] = false;
    }
    false
}
