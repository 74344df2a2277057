//! Words over the generators `a1 … an` and their inverses.
//!
//! Text syntax: whitespace-separated tokens, `a<k>` for the generator `a_k`
//! and `A<k>` for its inverse. The empty string is the identity.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A generator or its inverse. `gen` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn pos(gen: usize) -> Self {
        Letter { gen, inverse: false }
    }

    pub fn neg(gen: usize) -> Self {
        Letter { gen, inverse: true }
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inv(self) -> Self {
        Letter { gen: self.gen, inverse: !self.inverse }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = if self.inverse { 'A' } else { 'a' };
        write!(f, "{c}{}", self.gen)
    }
}

impl FromStr for Letter {
    type Err = Error;

    fn from_str(tok: &str) -> Result<Self> {
        let malformed = || Error::MalformedToken(tok.to_string());
        let mut chars = tok.chars();
        let inverse = match chars.next() {
            Some('a') => false,
            Some('A') => true,
            _ => return Err(malformed()),
        };
        let digits = chars.as_str();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let gen = digits.parse::<usize>().map_err(|_| malformed())?;
        Ok(Letter { gen, inverse })
    }
}

/// A finite word in the free group of the given rank. Not reduced unless
/// [`GroupWord::free_reduce`] is called: lengths of supplied representatives
/// matter to the solver bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupWord {
    rank: usize,
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn new(rank: usize, letters: Vec<Letter>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::ZeroRank);
        }
        if let Some(bad) = letters.iter().find(|l| l.gen == 0 || l.gen > rank) {
            return Err(Error::IndexOutOfRange { index: bad.gen, rank });
        }
        Ok(GroupWord { rank, letters })
    }

    pub fn identity(rank: usize) -> Self {
        assert!(rank > 0, "rank must be positive");
        GroupWord { rank, letters: Vec::new() }
    }

    /// The single-letter word `a_gen`.
    pub fn generator(rank: usize, gen: usize) -> Result<Self> {
        GroupWord::new(rank, vec![Letter::pos(gen)])
    }

    pub fn parse(text: &str, rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::ZeroRank);
        }
        let letters = text
            .split_whitespace()
            .map(Letter::from_str)
            .collect::<Result<Vec<_>>>()?;
        GroupWord::new(rank, letters)
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

    fn check_rank(&self, other: &GroupWord) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch { left: self.rank, right: other.rank });
        }
        Ok(())
    }

    pub fn inverse(&self) -> Self {
        let letters = self.letters.iter().rev().map(|l| l.inv()).collect();
        GroupWord { rank: self.rank, letters }
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &GroupWord) -> Result<Self> {
        self.check_rank(other)?;
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        Ok(GroupWord { rank: self.rank, letters })
    }

    /// Concatenation of a sequence of words of equal rank.
    pub fn product<'a, I>(rank: usize, words: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a GroupWord>,
    {
        let mut out = GroupWord::identity(rank);
        for w in words {
            out.check_rank(w)?;
            out.letters.extend_from_slice(&w.letters);
        }
        Ok(out)
    }

    /// `self^k`; negative exponents power the inverse.
    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let reps = k.unsigned_abs() as usize;
        let mut letters = Vec::with_capacity(base.len() * reps);
        for _ in 0..reps {
            letters.extend_from_slice(&base.letters);
        }
        GroupWord { rank: self.rank, letters }
    }

    /// The commutator `[x, y] = x y x⁻¹ y⁻¹`.
    pub fn commutator(x: &GroupWord, y: &GroupWord) -> Result<Self> {
        x.check_rank(y)?;
        GroupWord::product(x.rank, [x, y, &x.inverse(), &y.inverse()])
    }

    /// The conjugate `x^h = h⁻¹ x h`.
    pub fn conjugate_by(&self, h: &GroupWord) -> Result<Self> {
        self.check_rank(h)?;
        GroupWord::product(self.rank, [&h.inverse(), self, h])
    }

    /// Cancels adjacent inverse pairs until none remain.
    pub fn free_reduce(&self) -> Self {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        GroupWord { rank: self.rank, letters: out }
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[0] != w[1].inv())
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

pub fn parse_word(text: &str, rank: usize) -> Result<GroupWord> {
    GroupWord::parse(text, rank)
}

pub fn free_reduce(w: &GroupWord) -> GroupWord {
    w.free_reduce()
}
