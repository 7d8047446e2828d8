//! Words over the alphabet `{0, 1, ..., q-1}` and elementary statistics on them.
//!
//! Positions are 0-based in code. Where the documentation talks about "even
//! positions" it means 1-based even positions (2, 4, ...), i.e. 0-based odd
//! indices.

use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::{invalid, Error, Result};

/// Largest alphabet the text format can express (digits `0-9a-z`).
pub const MAX_ALPHABET: u8 = 36;

pub(crate) type Symbols = SmallVec<[u8; 24]>;

/// A string over `{0, ..., q-1}` carrying its alphabet size.
///
/// Two words are equal iff both the alphabet size and the symbol sequence
/// agree. The length is unconstrained: reads coming out of a channel are
/// routinely shorter or longer than the codeword length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    q: u8,
    symbols: Symbols,
}

impl Word {
    pub fn new(q: u8, symbols: impl AsRef<[u8]>) -> Result<Self> {
        check_alphabet(q)?;
        let symbols = symbols.as_ref();
        if let Some(&s) = symbols.iter().find(|&&s| s >= q) {
            return invalid(format!("symbol {s} is outside the alphabet of size {q}"));
        }
        Ok(Self {
            q,
            symbols: Symbols::from_slice(symbols),
        })
    }

    /// Caller guarantees every symbol is below `q`.
    pub(crate) fn from_raw(q: u8, symbols: Symbols) -> Self {
        debug_assert!(symbols.iter().all(|&s| s < q));
        Self { q, symbols }
    }

    pub fn empty(q: u8) -> Result<Self> {
        Self::new(q, [])
    }

    pub fn zeros(q: u8, n: usize) -> Result<Self> {
        check_alphabet(q)?;
        Ok(Self::from_raw(q, smallvec::smallvec![0; n]))
    }

    /// The word whose base-`q` value (most significant symbol first) is `rank`.
    pub fn from_rank(q: u8, n: usize, mut rank: u64) -> Self {
        let mut symbols: Symbols = smallvec::smallvec![0; n];
        for slot in symbols.iter_mut().rev() {
            *slot = (rank % q as u64) as u8;
            rank /= q as u64;
        }
        Self { q, symbols }
    }

    /// Base-`q` value of the word; lexicographic order agrees with rank order.
    pub fn rank(&self) -> u64 {
        self.symbols
            .iter()
            .fold(0u64, |acc, &s| acc * self.q as u64 + s as u64)
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub(crate) fn raw(&self) -> &Symbols {
        &self.symbols
    }

    /// Sum of all symbols modulo `q`.
    pub fn sum_mod_q(&self) -> u32 {
        let q = self.q as u32;
        self.symbols.iter().fold(0, |acc, &s| (acc + s as u32) % q)
    }

    /// Sum over 1-based even positions, modulo `q`.
    pub fn even_sum_mod_q(&self) -> u32 {
        let q = self.q as u32;
        self.symbols
            .iter()
            .skip(1)
            .step_by(2)
            .fold(0, |acc, &s| (acc + s as u32) % q)
    }

    pub fn reversed(&self) -> Self {
        Self::from_raw(self.q, self.symbols.iter().rev().copied().collect())
    }

    pub fn concat(parts: &[&Word]) -> Result<Self> {
        let Some(first) = parts.first() else {
            return invalid("cannot concatenate zero words without an alphabet");
        };
        let q = first.q;
        let mut symbols = Symbols::new();
        for part in parts {
            if part.q != q {
                return invalid("cannot concatenate words over different alphabets");
            }
            symbols.extend_from_slice(&part.symbols);
        }
        Ok(Self::from_raw(q, symbols))
    }

    pub fn subword(&self, start: usize, end: usize) -> Self {
        Self::from_raw(self.q, Symbols::from_slice(&self.symbols[start..end]))
    }

    /// Every word of length `n` over `{0, ..., q-1}` in lexicographic order.
    pub fn all(q: u8, n: usize) -> Result<impl Iterator<Item = Word>> {
        check_alphabet(q)?;
        let total = space_size(q, n)
            .ok_or_else(|| Error::ResourceLimit(format!("{q}^{n} words do not fit in u64")))?;
        Ok((0..total).map(move |r| Word::from_rank(q, n, r)))
    }
}

/// `q^n`, or `None` on overflow.
pub fn space_size(q: u8, n: usize) -> Option<u64> {
    (q as u64).checked_pow(u32::try_from(n).ok()?)
}

pub(crate) fn check_alphabet(q: u8) -> Result<()> {
    if !(2..=MAX_ALPHABET).contains(&q) {
        return invalid(format!("alphabet size must lie in [2, {MAX_ALPHABET}], got {q}"));
    }
    Ok(())
}

pub(crate) fn check_same_space(x: &Word, y: &Word) -> Result<()> {
    if x.q != y.q {
        return invalid(format!("alphabet mismatch: q={} vs q={}", x.q, y.q));
    }
    if x.len() != y.len() {
        return invalid(format!("length mismatch: {} vs {}", x.len(), y.len()));
    }
    Ok(())
}

fn digit(s: u8) -> char {
    char::from_digit(s as u32, MAX_ALPHABET as u32).expect("symbol below 36")
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}:", self.q)?;
        for &s in &self.symbols {
            write!(f, "{}", digit(s))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses `q<alphabet>:<symbols>`, e.g. `q4:0132`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected a word like `q4:0132`, got `{s}`"));
        let rest = s.trim().strip_prefix('q').ok_or_else(bad)?;
        let (q, body) = rest.split_once(':').ok_or_else(bad)?;
        let q: u8 = q.parse().map_err(|_| bad())?;
        let symbols = body
            .chars()
            .map(|c| {
                c.to_digit(MAX_ALPHABET as u32)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::Parse(format!("`{c}` is not a symbol digit")))
            })
            .collect::<Result<Vec<u8>>>()?;
        Word::new(q, symbols)
    }
}

pub fn hamming_distance(x: &Word, y: &Word) -> Result<usize> {
    check_same_space(x, y)?;
    Ok(hamming_unchecked(x, y))
}

pub(crate) fn hamming_unchecked(x: &Word, y: &Word) -> usize {
    x.symbols
        .iter()
        .zip(y.symbols.iter())
        .filter(|(a, b)| a != b)
        .count()
}

/// Number of pairs `i < j` with `x_i > x_j`.
///
/// Runs in `O(n q)` by tracking how many of each symbol have been seen.
pub fn inversions(x: &Word) -> u64 {
    let mut seen = [0u64; MAX_ALPHABET as usize];
    let mut total = 0u64;
    for &s in x.symbols() {
        total += seen[s as usize + 1..x.q as usize].iter().sum::<u64>();
        seen[s as usize] += 1;
    }
    total
}

/// True iff `u_i = u_{i+ell}` for every valid `i`.
pub fn has_period(u: &Word, ell: usize) -> Result<bool> {
    if ell == 0 || ell >= u.len() {
        return invalid(format!(
            "period {ell} must be positive and shorter than the word length {}",
            u.len()
        ));
    }
    Ok(u.symbols.iter().zip(&u.symbols[ell..]).all(|(a, b)| a == b))
}

/// Length of the longest contiguous subword of `x` that is `ell'`-periodic for
/// some `1 <= ell' <= ell`.
///
/// Any subword of length at most `ell'` counts as `ell'`-periodic, so the
/// result is at least `min(len, ell)`.
///
/// # Panics
///
/// If `ell` is zero.
pub fn longest_low_period_subword(x: &Word, ell: usize) -> usize {
    assert!(ell > 0, "period bound must be positive");
    let s = x.symbols();
    let mut best = s.len().min(ell);
    for p in 1..=ell.min(s.len()) {
        let mut streak = 0usize;
        for i in p..s.len() {
            if s[i] == s[i - p] {
                streak += 1;
                best = best.max(streak + p);
            } else {
                streak = 0;
            }
        }
    }
    best
}
