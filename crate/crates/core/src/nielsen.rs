//! Nielsen moves: a finite generating set of `Aut(F_n)` acting on tuples.
//!
//! A move replaces the generating tuple `(t_1, …, t_n)` by a new one. Every
//! move (and every sequence of moves) has a substitution `a_i ↦ α(a_i)`
//! expressing the new generators as reduced words in the old ones, and the
//! inverse substitution expressing the old generators in the new ones. The
//! longest inverse word bounds how much a gap can shrink under the change of
//! generating set.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Tuple, Word};

/// Cap on intermediate word lengths when composing substitutions.
pub const WORD_CAP: usize = 10_000;

/// Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NielsenMove {
    /// Exchange `t_i` and `t_j`.
    Swap(usize, usize),
    /// `t_i ↦ t_i⁻¹`
    Invert(usize),
    /// `t_i ↦ t_i t_j`
    RightMul(usize, usize),
    /// `t_i ↦ t_j t_i`
    LeftMul(usize, usize),
}

impl NielsenMove {
    pub fn validate(&self, n: usize) -> Result<()> {
        let in_range = |i: usize| (1..=n).contains(&i);
        let ok = match *self {
            NielsenMove::Invert(i) => in_range(i),
            NielsenMove::Swap(i, j) | NielsenMove::RightMul(i, j) | NielsenMove::LeftMul(i, j) => {
                in_range(i) && in_range(j) && i != j
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("move {self} is invalid for n = {n}")))
        }
    }

    pub fn apply(&self, t: &Tuple) -> Result<Tuple> {
        self.validate(t.len())?;
        let mut out = t.clone();
        let e = out.elements_mut();
        match *self {
            NielsenMove::Swap(i, j) => e.swap(i - 1, j - 1),
            NielsenMove::Invert(i) => e[i - 1] = e[i - 1].inv(),
            NielsenMove::RightMul(i, j) => e[i - 1] = e[i - 1].mul(&e[j - 1]),
            NielsenMove::LeftMul(i, j) => e[i - 1] = e[j - 1].mul(&e[i - 1]),
        }
        Ok(out)
    }

    /// Images of the basis: new generator `i` as a word in the old ones.
    pub fn basis_words(&self, n: usize) -> Result<Vec<Word>> {
        self.validate(n)?;
        let mut words: Vec<Word> = (1..=n).map(Word::generator).collect();
        let w = |l: &[i32]| Word::new(l.to_vec()).expect("reduced by construction");
        match *self {
            NielsenMove::Swap(i, j) => words.swap(i - 1, j - 1),
            NielsenMove::Invert(i) => words[i - 1] = w(&[-(i as i32)]),
            NielsenMove::RightMul(i, j) => words[i - 1] = w(&[i as i32, j as i32]),
            NielsenMove::LeftMul(i, j) => words[i - 1] = w(&[j as i32, i as i32]),
        }
        Ok(words)
    }

    /// A move sequence undoing this move.
    pub fn inverse(&self) -> MoveSequence {
        let moves = match *self {
            NielsenMove::Swap(..) | NielsenMove::Invert(_) => vec![*self],
            NielsenMove::RightMul(_, j) | NielsenMove::LeftMul(_, j) => {
                vec![NielsenMove::Invert(j), *self, NielsenMove::Invert(j)]
            }
        };
        MoveSequence { moves }
    }

    /// Every valid move for `n` generators (swaps with `i < j` only).
    pub fn alphabet(n: usize) -> Vec<NielsenMove> {
        let mut out = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                out.push(NielsenMove::Swap(i, j));
            }
        }
        out.extend((1..=n).map(NielsenMove::Invert));
        for i in 1..=n {
            for j in (1..=n).filter(|&j| j != i) {
                out.push(NielsenMove::RightMul(i, j));
                out.push(NielsenMove::LeftMul(i, j));
            }
        }
        out
    }

    pub fn max_index(&self) -> usize {
        match *self {
            NielsenMove::Invert(i) => i,
            NielsenMove::Swap(i, j) | NielsenMove::RightMul(i, j) | NielsenMove::LeftMul(i, j) => {
                i.max(j)
            }
        }
    }
}

impl fmt::Display for NielsenMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NielsenMove::Swap(i, j) => write!(f, "swap({i},{j})"),
            NielsenMove::Invert(i) => write!(f, "inv({i})"),
            NielsenMove::RightMul(i, j) => write!(f, "rmul({i},{j})"),
            NielsenMove::LeftMul(i, j) => write!(f, "lmul({i},{j})"),
        }
    }
}

/// Moves applied left to right.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MoveSequence {
    moves: Vec<NielsenMove>,
}

impl MoveSequence {
    pub fn new(moves: Vec<NielsenMove>) -> Self {
        Self { moves }
    }

    pub fn moves(&self) -> &[NielsenMove] {
        &self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        self.moves.iter().try_for_each(|m| m.validate(n))
    }

    pub fn then(&self, other: &MoveSequence) -> MoveSequence {
        let mut moves = self.moves.clone();
        moves.extend_from_slice(&other.moves);
        MoveSequence { moves }
    }

    pub fn inverse(&self) -> MoveSequence {
        MoveSequence {
            moves: self
                .moves
                .iter()
                .rev()
                .flat_map(|m| m.inverse().moves)
                .collect(),
        }
    }

    pub fn apply(&self, t: &Tuple) -> Result<Tuple> {
        self.moves.iter().try_fold(t.clone(), |acc, m| m.apply(&acc))
    }

    /// The new generating set as reduced words in the old one.
    pub fn basis_words(&self, n: usize) -> Result<Vec<Word>> {
        let mut words: Vec<Word> = (1..=n).map(Word::generator).collect();
        for m in &self.moves {
            words = m
                .basis_words(n)?
                .iter()
                .map(|w| w.substitute(&words, WORD_CAP))
                .collect::<Result<_>>()?;
        }
        Ok(words)
    }

    /// Longest word expressing an old generator in the new generating set.
    pub fn word_length_bound(&self, n: usize) -> Result<usize> {
        Ok(self
            .inverse()
            .basis_words(n)?
            .iter()
            .map(Word::len)
            .fold(1, usize::max))
    }
}

impl From<NielsenMove> for MoveSequence {
    fn from(m: NielsenMove) -> Self {
        MoveSequence { moves: vec![m] }
    }
}

pub fn apply_move(m: NielsenMove, t: &Tuple) -> Result<Tuple> {
    m.apply(t)
}

pub fn move_to_basis_words(s: &MoveSequence, n: usize) -> Result<Vec<Word>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("need n >= 2, got {n}")));
    }
    s.basis_words(n)
}

pub fn word_length_bound(s: &MoveSequence, n: usize) -> Result<usize> {
    s.word_length_bound(n)
}

/// `length` i.i.d. uniform draws from [`NielsenMove::alphabet`].
pub fn random_walk<R: Rng + ?Sized>(rng: &mut R, n: usize, length: usize) -> MoveSequence {
    let alphabet = NielsenMove::alphabet(n);
    MoveSequence {
        moves: (0..length)
            .map(|_| alphabet[rng.random_range(0..alphabet.len())])
            .collect(),
    }
}
