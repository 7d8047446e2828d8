//! Type-A and Type-B confusability, and the intersection sizes they predict.
//!
//! Both notions decompose `x = a c b` and `y = a c' b`. Since `c` and `c'`
//! must differ at their first and last symbols, the core is pinned to the span
//! between the first and last disagreement of `x` and `y`, so detection is a
//! single linear pass over that span.
//!
//! * Type-A: `c` alternates two symbols, `(αβ)^m` or `(αβ)^m α`, and `c'` is
//!   `c` with `α` and `β` exchanged (the binary complement when `q = 2`).
//! * Type-B: `{c, c'} = {α β^m, β^m α}`.

use std::fmt;

use crate::balls::{intersection_size, BallKind};
use crate::error::{invalid, Result};
use crate::words::{check_same_space, hamming_unchecked, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlternatingForm {
    /// `(αβ)^m`
    Even,
    /// `(αβ)^m α`
    Odd,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeAWitness {
    pub prefix: Word,
    pub suffix: Word,
    /// The core of `x`.
    pub core: Word,
    /// The core of `y`: `core` with `alpha` and `beta` exchanged.
    pub swapped: Word,
    pub alpha: u8,
    pub beta: u8,
    pub m: usize,
    pub form: AlternatingForm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeBWitness {
    pub prefix: Word,
    pub suffix: Word,
    /// The core of `x`, either `α β^m` or `β^m α`.
    pub core: Word,
    /// The core of `y`, the other member of the pair.
    pub other: Word,
    pub alpha: u8,
    pub beta: u8,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    NotConfusable,
    TypeA(TypeAWitness),
    TypeB(TypeBWitness),
}

impl Verdict {
    pub fn is_confusable(&self) -> bool {
        !matches!(self, Verdict::NotConfusable)
    }

    /// Multiplicity `m` of the witness, if any.
    pub fn m(&self) -> Option<usize> {
        match self {
            Verdict::NotConfusable => None,
            Verdict::TypeA(w) => Some(w.m),
            Verdict::TypeB(w) => Some(w.m),
        }
    }

    /// Rebuilds `(x, y)` from the witness.
    pub fn reconstruct(&self) -> Option<(Word, Word)> {
        let (a, c, c2, b) = match self {
            Verdict::NotConfusable => return None,
            Verdict::TypeA(w) => (&w.prefix, &w.core, &w.swapped, &w.suffix),
            Verdict::TypeB(w) => (&w.prefix, &w.core, &w.other, &w.suffix),
        };
        Some((
            Word::concat(&[a, c, b]).ok()?,
            Word::concat(&[a, c2, b]).ok()?,
        ))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NotConfusable => f.write_str("not confusable"),
            Verdict::TypeA(w) => write!(
                f,
                "Type-A: a={} c={} c̄={} b={} α={} β={} m={} ({:?} alternating)",
                w.prefix, w.core, w.swapped, w.suffix, w.alpha, w.beta, w.m, w.form
            ),
            Verdict::TypeB(w) => write!(
                f,
                "Type-B: a={} c={} c'={} b={} α={} β={} m={}",
                w.prefix, w.core, w.other, w.suffix, w.alpha, w.beta, w.m
            ),
        }
    }
}

/// First and last disagreement, or `None` when the words are equal.
fn disagreement_span(x: &Word, y: &Word) -> Option<(usize, usize)> {
    let (xs, ys) = (x.symbols(), y.symbols());
    let first = (0..xs.len()).find(|&k| xs[k] != ys[k])?;
    let last = (0..xs.len()).rev().find(|&k| xs[k] != ys[k])?;
    Some((first, last))
}

fn check_pair(x: &Word, y: &Word) -> Result<(usize, usize)> {
    check_same_space(x, y)?;
    match disagreement_span(x, y) {
        Some(span) => Ok(span),
        None => invalid("confusability is only defined for distinct words"),
    }
}

pub fn type_a_confusable(x: &Word, y: &Word) -> Result<Verdict> {
    let (i, j) = check_pair(x, y)?;
    Ok(detect_type_a(x, y, i, j))
}

fn detect_type_a(x: &Word, y: &Word, i: usize, j: usize) -> Verdict {
    let (xs, ys) = (x.symbols(), y.symbols());
    let len = j - i + 1;
    if len < 2 {
        return Verdict::NotConfusable;
    }
    let (alpha, beta) = (xs[i], xs[i + 1]);
    if alpha == beta {
        return Verdict::NotConfusable;
    }
    for k in i..=j {
        let (own, other) = if (k - i) % 2 == 0 { (alpha, beta) } else { (beta, alpha) };
        if xs[k] != own || ys[k] != other {
            return Verdict::NotConfusable;
        }
    }
    let form = if len % 2 == 0 { AlternatingForm::Even } else { AlternatingForm::Odd };
    Verdict::TypeA(TypeAWitness {
        prefix: x.subword(0, i),
        suffix: x.subword(j + 1, x.len()),
        core: x.subword(i, j + 1),
        swapped: y.subword(i, j + 1),
        alpha,
        beta,
        m: len / 2,
        form,
    })
}

pub fn type_b_confusable(x: &Word, y: &Word) -> Result<Verdict> {
    let (i, j) = check_pair(x, y)?;
    Ok(detect_type_b(x, y, i, j))
}

fn detect_type_b(x: &Word, y: &Word, i: usize, j: usize) -> Verdict {
    let (xs, ys) = (x.symbols(), y.symbols());
    if i == j || xs[i] != ys[j] || xs[j] != ys[i] {
        return Verdict::NotConfusable;
    }
    let interior = &xs[i + 1..j];
    if interior != &ys[i + 1..j] {
        return Verdict::NotConfusable;
    }
    // x's core is α β^m (interior repeats x_j) or β^m α (interior repeats x_i).
    let (alpha, beta) = if interior.iter().all(|&s| s == xs[j]) {
        (xs[i], xs[j])
    } else if interior.iter().all(|&s| s == xs[i]) {
        (xs[j], xs[i])
    } else {
        return Verdict::NotConfusable;
    };
    Verdict::TypeB(TypeBWitness {
        prefix: x.subword(0, i),
        suffix: x.subword(j + 1, x.len()),
        core: x.subword(i, j + 1),
        other: y.subword(i, j + 1),
        alpha,
        beta,
        m: j - i,
    })
}

/// `|B(x) ∩ B(y)|` for the single-edit union kinds, read off the Hamming
/// distance and the confusability verdicts.
///
/// Where the characterization leaves the value open (sizes 0 versus 1 for the
/// deletion and insertion parts of non-confusable pairs) the missing part is
/// counted directly from the balls.
pub fn predicted_intersection(x: &Word, y: &Word, kind: BallKind) -> Result<usize> {
    let (i, j) = check_pair(x, y)?;
    let q = x.q() as usize;
    let dh = hamming_unchecked(x, y);

    if dh == 1 {
        return Ok(match kind {
            BallKind::D => 1,
            BallKind::I => 2,
            BallKind::ID => 3,
            BallKind::SD => q + 1,
            BallKind::SI => q + 2,
            BallKind::Edit => q + 3,
            other => return unsupported(other),
        });
    }

    let enumerate = |k: BallKind| intersection_size(x, y, k);
    let type_a = || matches!(detect_type_a(x, y, i, j), Verdict::TypeA(_));
    let type_b_m = || detect_type_b(x, y, i, j).m();

    match kind {
        BallKind::D | BallKind::I => {
            if type_a() {
                Ok(2)
            } else {
                enumerate(kind)
            }
        }
        BallKind::ID => {
            if type_a() {
                Ok(4)
            } else {
                Ok(enumerate(BallKind::D)? + enumerate(BallKind::I)?)
            }
        }
        BallKind::SD | BallKind::SI if dh == 2 => Ok(match type_b_m() {
            Some(1) => 4,
            Some(_) => 3,
            None if q == 2 => 2,
            // over three or more symbols a non-Type-B pair can still share one
            // deletion (or insertion) result, e.g. 0001 and 0012 share 001
            None => 2 + enumerate(if kind == BallKind::SD { BallKind::D } else { BallKind::I })?,
        }),
        BallKind::SD | BallKind::SI => {
            if type_a() {
                Ok(2)
            } else if kind == BallKind::SD {
                enumerate(BallKind::D)
            } else {
                enumerate(BallKind::I)
            }
        }
        BallKind::Edit if dh == 2 => Ok(match type_b_m() {
            Some(1) => 6,
            Some(_) => 4,
            None if q == 2 => 2,
            None => 2 + enumerate(BallKind::D)? + enumerate(BallKind::I)?,
        }),
        BallKind::Edit => {
            if type_a() {
                Ok(4)
            } else {
                Ok(enumerate(BallKind::D)? + enumerate(BallKind::I)?)
            }
        }
        other => unsupported(other),
    }
}

fn unsupported<T>(kind: BallKind) -> Result<T> {
    invalid(format!(
        "no characterization for ball {kind}; compute the intersection directly"
    ))
}
