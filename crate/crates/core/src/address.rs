//! Finite gasket addresses `m0 m1 ... m(n-1) ⊗ z`.
//!
//! An [`Address`] of length `n` names a point of `Mⁿ⊗I`, and through the
//! padding embedding `z ↦ letter(z)⊗z` a point of the colimit `G`. Two words
//! of the same length name the same point exactly when they are related by
//! one of the three corner gluings of the copies:
//!
//! ```text
//! a⊗L = b⊗T      a⊗R = c⊗T      b⊗R = c⊗L
//! ```
//!
//! At depth `n` the corner `z` of a sub-copy is itself the padded word
//! `letter(z)^j ⊗ z`, so the gluing `(a, L) ~ (b, T)` below a common prefix `u`
//! identifies `u·a·b^j⊗L` with `u·b·a^j⊗T`. Every point therefore has at most
//! two representations, and the canonical one is the lexicographically least.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on [`enumerate`] levels.
pub const ENUMERATION_CAP: usize = 12;

/// A copy label from `M = {a, b, c}`, ordered `a < b < c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Letter {
    A,
    B,
    C,
}

/// A distinguished point, ordered `T < L < R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Corner {
    T,
    L,
    R,
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::A, Letter::B, Letter::C];

    /// The corner fixed by this copy's contraction: `a ↦ T`, `b ↦ L`, `c ↦ R`.
    pub fn corner(self) -> Corner {
        match self {
            Letter::A => Corner::T,
            Letter::B => Corner::L,
            Letter::C => Corner::R,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::C => 'c',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a' => Some(Letter::A),
            'b' => Some(Letter::B),
            'c' => Some(Letter::C),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl Corner {
    pub const ALL: [Corner; 3] = [Corner::T, Corner::L, Corner::R];

    /// The copy whose contraction fixes this corner; inverse of [`Letter::corner`].
    pub fn letter(self) -> Letter {
        match self {
            Corner::T => Letter::A,
            Corner::L => Letter::B,
            Corner::R => Letter::C,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Corner::T => 'T',
            Corner::L => 'L',
            Corner::R => 'R',
        }
    }

    pub fn from_char(c: char) -> Option<Corner> {
        match c {
            'T' => Some(Corner::T),
            'L' => Some(Corner::L),
            'R' => Some(Corner::R),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl fmt::Display for Corner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// One identification `left ~ right` between corners of two copies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GluedPair {
    pub left: (Letter, Corner),
    pub right: (Letter, Corner),
}

pub const GLUED_PAIRS: [GluedPair; 3] = [
    GluedPair {
        left: (Letter::A, Corner::L),
        right: (Letter::B, Corner::T),
    },
    GluedPair {
        left: (Letter::A, Corner::R),
        right: (Letter::C, Corner::T),
    },
    GluedPair {
        left: (Letter::B, Corner::R),
        right: (Letter::C, Corner::L),
    },
];

/// The other side of the gluing that involves corner `z` of copy `m`, if any.
pub fn glued_partner(m: Letter, z: Corner) -> Option<(Letter, Corner)> {
    GLUED_PAIRS.iter().find_map(|p| {
        if p.left == (m, z) {
            Some(p.right)
        } else if p.right == (m, z) {
            Some(p.left)
        } else {
            None
        }
    })
}

/// The corner of copy `from` that is glued to copy `to`. Requires `from != to`.
pub fn glue_corner(from: Letter, to: Letter) -> Corner {
    use Letter::*;
    match (from, to) {
        (A, B) => Corner::L,
        (B, A) => Corner::T,
        (A, C) => Corner::R,
        (C, A) => Corner::T,
        (B, C) => Corner::R,
        (C, B) => Corner::L,
        _ => panic!("glue_corner called with identical copies {from}"),
    }
}

/// The copy that is neither `m1` nor `m2`. Requires `m1 != m2`.
pub fn third_letter(m1: Letter, m2: Letter) -> Letter {
    debug_assert_ne!(m1, m2);
    Letter::ALL
        .into_iter()
        .find(|&m| m != m1 && m != m2)
        .expect("three letters")
}

/// A finite address `word ⊗ corner`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address {
    word: Vec<Letter>,
    corner: Corner,
}

impl Address {
    pub fn new(word: Vec<Letter>, corner: Corner) -> Self {
        Address { word, corner }
    }

    /// The length-0 address of a distinguished point.
    pub fn corner_point(corner: Corner) -> Self {
        Address {
            word: Vec::new(),
            corner,
        }
    }

    pub fn word(&self) -> &[Letter] {
        &self.word
    }

    pub fn corner(&self) -> Corner {
        self.corner
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// The other representation of the same point of `Mⁿ⊗I`, if the point is
    /// a gluing point.
    pub fn alternative(&self) -> Option<Address> {
        let fill = self.corner.letter();
        let run = self.word.iter().rev().take_while(|&&m| m == fill).count();
        let pos = self.word.len().checked_sub(run + 1)?;
        let (m2, z2) = glued_partner(self.word[pos], self.corner)?;
        let mut word = Vec::with_capacity(self.word.len());
        word.extend_from_slice(&self.word[..pos]);
        word.push(m2);
        word.extend(std::iter::repeat_n(z2.letter(), run));
        Some(Address { word, corner: z2 })
    }

    pub fn canonicalize(&self) -> Address {
        match self.alternative() {
            Some(alt) if alt < *self => alt,
            _ => self.clone(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.alternative().is_none_or(|alt| *self < alt)
    }

    /// Whether `self` and `other` name the same point of `G`. Addresses of
    /// different lengths are padded to the longer one first.
    pub fn equivalent(&self, other: &Address) -> bool {
        let n = self.len().max(other.len());
        let x = self.padded(n);
        let y = other.padded(n);
        x.canonicalize() == y.canonicalize()
    }

    /// Append `letter(z)⊗z` until the word has length `target`.
    pub fn pad(&self, target: usize) -> Result<Address> {
        if target < self.len() {
            return Err(Error::CannotShorten {
                len: self.len(),
                target,
            });
        }
        Ok(self.padded(target))
    }

    pub(crate) fn padded(&self, target: usize) -> Address {
        let mut word = self.word.clone();
        word.resize(target.max(word.len()), self.corner.letter());
        Address {
            word,
            corner: self.corner,
        }
    }

    /// The initial-algebra structure map `m ⊗ (w⊗z) ↦ m·w⊗z`, canonicalized.
    pub fn prepend(&self, m: Letter) -> Address {
        let mut word = Vec::with_capacity(self.word.len() + 1);
        word.push(m);
        word.extend_from_slice(&self.word);
        Address {
            word,
            corner: self.corner,
        }
        .canonicalize()
    }

    /// Drop the first letter, if any.
    pub fn tail(&self) -> Option<Address> {
        let (_, rest) = self.word.split_first()?;
        Some(Address {
            word: rest.to_vec(),
            corner: self.corner,
        })
    }

    pub fn common_prefix_len(&self, other: &Address) -> usize {
        self.word
            .iter()
            .zip(&other.word)
            .take_while(|(a, b)| a == b)
            .count()
    }
}

/// All canonical addresses of length `n`, in lexicographic order.
pub fn enumerate(n: usize) -> Result<Vec<Address>> {
    enumerate_with_cap(n, ENUMERATION_CAP)
}

pub fn enumerate_with_cap(n: usize, cap: usize) -> Result<Vec<Address>> {
    if n > cap {
        return Err(Error::EnumerationTooLarge { level: n, cap });
    }
    let mut out = Vec::with_capacity((3usize.pow(n as u32 + 1) + 3) / 2);
    let mut word = vec![Letter::A; n];
    loop {
        for z in Corner::ALL {
            let addr = Address {
                word: word.clone(),
                corner: z,
            };
            if addr.is_canonical() {
                out.push(addr);
            }
        }
        if !increment(&mut word) {
            break;
        }
    }
    Ok(out)
}

/// Next word in lexicographic order; false after the last one.
fn increment(word: &mut [Letter]) -> bool {
    for slot in word.iter_mut().rev() {
        match *slot {
            Letter::A => {
                *slot = Letter::B;
                return true;
            }
            Letter::B => {
                *slot = Letter::C;
                return true;
            }
            Letter::C => *slot = Letter::A,
        }
    }
    false
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.word {
            write!(f, "{m}")?;
        }
        write!(f, ":{}", self.corner)
    }
}

impl FromStr for Address {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (letters, corner) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing ':' in address {s:?}")))?;
        let word = letters
            .chars()
            .map(|c| {
                Letter::from_char(c)
                    .ok_or_else(|| Error::Parse(format!("invalid letter {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut cs = corner.chars();
        let corner = match (cs.next(), cs.next()) {
            (Some(c), None) => Corner::from_char(c),
            _ => None,
        }
        .ok_or_else(|| Error::Parse(format!("invalid corner {corner:?} in {s:?}")))?;
        Ok(Address { word, corner })
    }
}
