//! Multi-read bounded-distance decoder.
//!
//! Each read `y` nominates the codewords within one edit of it (only `y`
//! itself if it is a codeword). The codeword nominated by the most reads wins
//! if it is unique and has at least one vote.

use rustc_hash::FxHashMap;

use crate::balls::{ball, BallKind};
use crate::codebooks::{Codebook, Family};
use crate::words::{Symbols, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecodeOutcome {
    Decoded(Word),
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    pub outcome: DecodeOutcome,
    /// `|L(y)|` for each read, in input order.
    pub list_sizes: Vec<usize>,
    pub winning_votes: usize,
    /// More than one codeword reached `winning_votes`.
    pub tie: bool,
}

impl DecodeResult {
    pub fn decoded(&self) -> Option<&Word> {
        match &self.outcome {
            DecodeOutcome::Decoded(w) => Some(w),
            DecodeOutcome::Fail => None,
        }
    }
}

/// `L(y)`: `{y}` for a codeword, otherwise the codewords within one edit of
/// `y`. Sorted. Reads over another alphabet get an empty list.
pub fn candidate_list(y: &Word, cb: &Codebook) -> Vec<Word> {
    let n = cb.n();
    if y.q() != cb.q() || y.len() + 1 < n || y.len() > n + 1 {
        return Vec::new();
    }
    if y.len() == n && cb.contains_unchecked(y) {
        return vec![y.clone()];
    }
    let mut out = Syndromes::new(y, cb).candidates(y, cb);
    out.sort_unstable();
    out
}

/// Same as [`candidate_list`], by materializing the whole edit ball of `y`.
pub fn candidate_list_reference(y: &Word, cb: &Codebook) -> Vec<Word> {
    let n = cb.n();
    if y.q() != cb.q() || y.len() + 1 < n || y.len() > n + 1 {
        return Vec::new();
    }
    if y.len() == n && cb.contains_unchecked(y) {
        return vec![y.clone()];
    }
    ball(y, BallKind::Edit)
        .expect("edit ball of a valid word")
        .into_iter()
        .filter(|w| w.len() == n && cb.contains_unchecked(w))
        .collect()
}

/// Plurality vote over the candidate lists of all reads.
pub fn decode(reads: &[Word], cb: &Codebook) -> DecodeResult {
    let mut votes: FxHashMap<Word, usize> = FxHashMap::default();
    let mut list_sizes = Vec::with_capacity(reads.len());
    for y in reads {
        let list = candidate_list(y, cb);
        list_sizes.push(list.len());
        for w in list {
            *votes.entry(w).or_insert(0) += 1;
        }
    }
    let winning_votes = votes.values().copied().max().unwrap_or(0);
    let mut leaders = votes.into_iter().filter(|&(_, v)| v == winning_votes);
    let first = leaders.next();
    let tie = leaders.next().is_some();
    let outcome = match first {
        Some((w, _)) if winning_votes > 0 && !tie => DecodeOutcome::Decoded(w),
        _ => DecodeOutcome::Fail,
    };
    DecodeResult {
        outcome,
        list_sizes,
        winning_votes,
        tie,
    }
}

/// Syndrome bookkeeping for one read, so that every single edit can be
/// screened in O(1) before it is materialized.
struct Syndromes {
    q: i64,
    len: usize,
    sum: i64,
    /// `odd[i]`: sum of symbols at 0-based odd indices `< i`; `even[i]` likewise.
    odd: Vec<i64>,
    even: Vec<i64>,
    inv: i64,
    /// `greater[i * q + v]`: symbols before index `i` larger than `v`.
    greater: Vec<i64>,
    /// `less[i * q + v]`: symbols at index `>= i` smaller than `v`.
    less: Vec<i64>,
    check: Check,
}

#[derive(Clone, Copy)]
enum Check {
    Any,
    Parity { total: bool, even: bool },
    Syndrome { modulus: i64, c: i64, d: i64 },
}

impl Syndromes {
    fn new(y: &Word, cb: &Codebook) -> Self {
        let s = y.symbols();
        let (q, len) = (cb.q() as usize, s.len());
        let check = match cb.family() {
            Family::Full => Check::Any,
            Family::C0 => Check::Parity { total: true, even: false },
            Family::C1 => Check::Parity { total: false, even: true },
            Family::C2 => Check::Parity { total: true, even: true },
            Family::Cd | Family::Csd | Family::Cedit => {
                let p = cb.spec().syndrome.expect("validated");
                Check::Syndrome {
                    modulus: cb.inversion_modulus() as i64,
                    c: p.c as i64,
                    d: p.d as i64,
                }
            }
        };
        let mut odd = vec![0; len + 1];
        let mut even = vec![0; len + 1];
        for (i, &a) in s.iter().enumerate() {
            odd[i + 1] = odd[i] + if i % 2 == 1 { a as i64 } else { 0 };
            even[i + 1] = even[i] + if i % 2 == 0 { a as i64 } else { 0 };
        }
        let (mut greater, mut less, mut inv) = (Vec::new(), Vec::new(), 0);
        if let Check::Syndrome { .. } = check {
            greater = vec![0; (len + 1) * q];
            less = vec![0; (len + 1) * q];
            for i in 0..len {
                for v in 0..q {
                    greater[(i + 1) * q + v] = greater[i * q + v] + i64::from(s[i] as usize > v);
                }
            }
            for i in (0..len).rev() {
                for v in 0..q {
                    less[i * q + v] = less[(i + 1) * q + v] + i64::from((s[i] as usize) < v);
                }
            }
            inv = (0..len).map(|i| less[(i + 1) * q + s[i] as usize]).sum();
        }
        Self {
            q: q as i64,
            len,
            sum: odd[len] + even[len],
            odd,
            even,
            inv,
            greater,
            less,
            check,
        }
    }

    fn greater(&self, i: usize, v: u8) -> i64 {
        self.greater[i * self.q as usize + v as usize]
    }

    fn less(&self, i: usize, v: u8) -> i64 {
        self.less[i * self.q as usize + v as usize]
    }

    /// Whether a word with these statistics can pass the syndrome checks.
    /// `inv` is only evaluated for syndrome families.
    fn passes(&self, sum: i64, even_sum: i64, inv: impl FnOnce() -> i64) -> bool {
        match self.check {
            Check::Any => true,
            Check::Parity { total, even } => {
                (!total || sum.rem_euclid(self.q) == 0) && (!even || even_sum.rem_euclid(self.q) == 0)
            }
            Check::Syndrome { modulus, c, d } => {
                sum.rem_euclid(self.q) == d && inv().rem_euclid(modulus) == c
            }
        }
    }

    /// Codewords of length `n` within one edit of `y` (distinct, unsorted).
    fn candidates(&self, y: &Word, cb: &Codebook) -> Vec<Word> {
        let s = y.symbols();
        let n = cb.n();
        let q = cb.q();
        let mut out = Vec::new();
        let mut keep = |sym: Symbols| {
            let w = Word::from_raw(q, sym);
            if cb.contains_unchecked(&w) {
                out.push(w);
            }
        };
        if self.len == n {
            for i in 0..self.len {
                let a = s[i];
                for v in (0..q).filter(|&v| v != a) {
                    let delta = v as i64 - a as i64;
                    let even_sum = self.odd[self.len] + if i % 2 == 1 { delta } else { 0 };
                    let ok = self.passes(self.sum + delta, even_sum, || {
                        self.inv + self.greater(i, v) - self.greater(i, a) + self.less(i + 1, v)
                            - self.less(i + 1, a)
                    });
                    if ok {
                        let mut t: Symbols = s.into();
                        t[i] = v;
                        keep(t);
                    }
                }
            }
        } else if self.len + 1 == n {
            for i in 0..=self.len {
                for v in 0..q {
                    if i < self.len && s[i] == v {
                        continue;
                    }
                    // symbols from i on move one index to the right
                    let tail_on_odd = self.even[self.len] - self.even[i];
                    let even_sum = self.odd[i] + if i % 2 == 1 { v as i64 } else { 0 } + tail_on_odd;
                    let ok = self.passes(self.sum + v as i64, even_sum, || {
                        self.inv + self.greater(i, v) + self.less(i, v)
                    });
                    if ok {
                        let mut t = Symbols::with_capacity(n);
                        t.extend_from_slice(&s[..i]);
                        t.push(v);
                        t.extend_from_slice(&s[i..]);
                        keep(t);
                    }
                }
            }
        } else {
            for i in 0..self.len {
                if i > 0 && s[i] == s[i - 1] {
                    continue;
                }
                let a = s[i];
                // symbols after i move one index to the left
                let tail_on_odd = self.even[self.len] - self.even[i + 1];
                let even_sum = self.odd[i] + tail_on_odd;
                let ok = self.passes(self.sum - a as i64, even_sum, || {
                    self.inv - self.greater(i, a) - self.less(i + 1, a)
                });
                if ok {
                    let mut t = Symbols::with_capacity(n);
                    t.extend_from_slice(&s[..i]);
                    t.extend_from_slice(&s[i + 1..]);
                    keep(t);
                }
            }
        }
        out
    }
}
