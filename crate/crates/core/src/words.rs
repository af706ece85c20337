//! Reduced words in a free group of finite rank.
//!
//! Generators are dense indices `0..rank`. A [`Letter`] is a generator with a
//! sign, and a [`Word`] is a freely reduced sequence of letters tagged with the
//! rank of the alphabet it lives over.

use std::fmt;

use thiserror::Error;

/// Default upper bound on the number of letters a word may hold.
pub const DEFAULT_MAX_WORD_LEN: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("generator index {index} out of range for alphabet of rank {rank}")]
    LetterOutOfRange { index: usize, rank: usize },
    #[error("word of length {len} exceeds the cap of {cap} letters")]
    TooLong { len: usize, cap: usize },
    #[error("alphabet mismatch: rank {left} vs rank {right}")]
    AlphabetMismatch { left: usize, right: usize },
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn pos(generator: usize) -> Self {
        Letter { generator, inverse: false }
    }

    pub fn neg(generator: usize) -> Self {
        Letter { generator, inverse: true }
    }

    pub fn inv(self) -> Self {
        Letter { generator: self.generator, inverse: !self.inverse }
    }

    /// Column of this letter in a coset table: `2g` for `g`, `2g + 1` for `g⁻¹`.
    pub fn column(self) -> usize {
        2 * self.generator + self.inverse as usize
    }

    pub fn from_column(column: usize) -> Self {
        Letter { generator: column / 2, inverse: column % 2 == 1 }
    }

    fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "g{}^-1", self.generator)
        } else {
            write!(f, "g{}", self.generator)
        }
    }
}

/// A freely reduced word over an alphabet of `rank` generators.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    rank: usize,
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty(rank: usize) -> Self {
        Word { rank, letters: Vec::new() }
    }

    /// Reduces `raw` with the default length cap.
    pub fn reduce(rank: usize, raw: impl IntoIterator<Item = Letter>) -> Result<Self, WordError> {
        reduce_word(rank, raw, DEFAULT_MAX_WORD_LEN)
    }

    /// Single-letter word `g`.
    pub fn generator(rank: usize, generator: usize) -> Result<Self, WordError> {
        Word::reduce(rank, [Letter::pos(generator)])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        invert_word(self)
    }

    pub fn concat(&self, other: &Word) -> Result<Word, WordError> {
        concat_words(self, other)
    }

    /// `self^k` for `k >= 0`.
    pub fn pow(&self, k: usize) -> Word {
        let mut acc = Word::empty(self.rank);
        for _ in 0..k {
            acc = push_reduced(acc, self.letters.iter().copied());
        }
        acc
    }

    /// The same letters viewed over a larger alphabet.
    pub fn widen(&self, rank: usize) -> Result<Word, WordError> {
        if rank < self.rank {
            if let Some(l) = self.letters.iter().find(|l| l.generator >= rank) {
                return Err(WordError::LetterOutOfRange { index: l.generator, rank });
            }
        }
        Ok(Word { rank, letters: self.letters.clone() })
    }

    /// Cyclic rotation by `k` positions. The result is reduced but not
    /// necessarily cyclically reduced.
    pub fn rotate(&self, k: usize) -> Word {
        if self.letters.is_empty() {
            return self.clone();
        }
        let k = k % self.letters.len();
        let rotated = self.letters[k..].iter().chain(&self.letters[..k]).copied();
        push_reduced(Word::empty(self.rank), rotated)
    }

    /// Signed exponent sum per generator.
    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut sums = vec![0i64; self.rank];
        for l in &self.letters {
            sums[l.generator] += if l.inverse { -1 } else { 1 };
        }
        sums
    }
}

fn push_reduced(mut acc: Word, letters: impl IntoIterator<Item = Letter>) -> Word {
    for l in letters {
        match acc.letters.last() {
            Some(&last) if last.cancels(l) => {
                acc.letters.pop();
            }
            _ => acc.letters.push(l),
        }
    }
    acc
}

/// Free reduction of `raw` over an alphabet of `rank` generators.
///
/// Fails if a letter is out of range or if the reduced word exceeds `max_len`.
pub fn reduce_word(rank: usize, raw: impl IntoIterator<Item = Letter>, max_len: usize) -> Result<Word, WordError> {
    let mut acc = Word::empty(rank);
    for l in raw {
        if l.generator >= rank {
            return Err(WordError::LetterOutOfRange { index: l.generator, rank });
        }
        acc = push_reduced(acc, [l]);
        if acc.letters.len() > max_len {
            return Err(WordError::TooLong { len: acc.letters.len(), cap: max_len });
        }
    }
    Ok(acc)
}

pub fn invert_word(w: &Word) -> Word {
    Word { rank: w.rank, letters: w.letters.iter().rev().map(|l| l.inv()).collect() }
}

pub fn concat_words(u: &Word, v: &Word) -> Result<Word, WordError> {
    if u.rank != v.rank {
        return Err(WordError::AlphabetMismatch { left: u.rank, right: v.rank });
    }
    Ok(push_reduced(u.clone(), v.letters.iter().copied()))
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}
