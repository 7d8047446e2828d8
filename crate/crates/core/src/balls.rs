//! Error balls, their exact intersections, and the substitution-ball closed forms.
//!
//! Balls are materialized as sorted, deduplicated vectors. The single-edit
//! generators below never produce duplicates in the first place: a deletion is
//! only taken at the first position of a run, and an insertion of `v` before
//! position `i` is skipped when `x_i = v` (it equals inserting one step later).

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::words::{check_same_space, Symbols, Word};

/// Which error ball to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BallKind {
    /// At most one substitution (contains the word itself).
    S,
    /// Exactly one deletion.
    D,
    /// Exactly one insertion.
    I,
    ID,
    SD,
    SI,
    Edit,
    /// Hamming ball of the given radius.
    SubstitutionRadius(usize),
    /// Exactly the given number of deletions.
    DeletionRadius(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Primitive {
    Sub(usize),
    Del(usize),
    Ins,
}

impl BallKind {
    pub const SINGLE_EDIT_KINDS: [BallKind; 7] = [
        BallKind::S,
        BallKind::D,
        BallKind::I,
        BallKind::ID,
        BallKind::SD,
        BallKind::SI,
        BallKind::Edit,
    ];

    fn primitives(self) -> &'static [Primitive] {
        use Primitive::*;
        match self {
            BallKind::S => &[Sub(1)],
            BallKind::D => &[Del(1)],
            BallKind::I => &[Ins],
            BallKind::ID => &[Ins, Del(1)],
            BallKind::SD => &[Sub(1), Del(1)],
            BallKind::SI => &[Sub(1), Ins],
            BallKind::Edit => &[Sub(1), Ins, Del(1)],
            // radius kinds are handled in `primitive_list`
            BallKind::SubstitutionRadius(_) | BallKind::DeletionRadius(_) => &[],
        }
    }

    fn primitive_list(self) -> Vec<Primitive> {
        match self {
            BallKind::SubstitutionRadius(t) => vec![Primitive::Sub(t)],
            BallKind::DeletionRadius(t) => vec![Primitive::Del(t)],
            other => other.primitives().to_vec(),
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            BallKind::SubstitutionRadius(0) | BallKind::DeletionRadius(0) => {
                invalid("ball radius must be at least 1")
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for BallKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BallKind::S => f.write_str("S"),
            BallKind::D => f.write_str("D"),
            BallKind::I => f.write_str("I"),
            BallKind::ID => f.write_str("ID"),
            BallKind::SD => f.write_str("SD"),
            BallKind::SI => f.write_str("SI"),
            BallKind::Edit => f.write_str("EDIT"),
            BallKind::SubstitutionRadius(t) => write!(f, "St:{t}"),
            BallKind::DeletionRadius(t) => write!(f, "Dt:{t}"),
        }
    }
}

impl FromStr for BallKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s.trim().to_ascii_uppercase().as_str() {
            "S" => BallKind::S,
            "D" => BallKind::D,
            "I" => BallKind::I,
            "ID" => BallKind::ID,
            "SD" => BallKind::SD,
            "SI" => BallKind::SI,
            "EDIT" => BallKind::Edit,
            other => {
                let radius = |prefix: &str| {
                    other
                        .strip_prefix(prefix)
                        .and_then(|t| t.parse::<usize>().ok())
                };
                if let Some(t) = radius("ST:") {
                    BallKind::SubstitutionRadius(t)
                } else if let Some(t) = radius("DT:") {
                    BallKind::DeletionRadius(t)
                } else {
                    return Err(Error::Parse(format!(
                        "unknown ball `{s}` (expected S, D, I, ID, SD, SI, EDIT, St:t or Dt:t)"
                    )));
                }
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

/// All words reachable from `x` by at most one substitution, `x` included.
pub fn substitution_ball(x: &Word) -> Vec<Word> {
    let mut out = Vec::with_capacity(x.len() * (x.q() as usize - 1) + 1);
    out.push(x.clone());
    push_substitutions(x, &mut out);
    out
}

fn push_substitutions(x: &Word, out: &mut Vec<Word>) {
    let s = x.raw();
    for i in 0..s.len() {
        for v in 0..x.q() {
            if v != s[i] {
                let mut t = s.clone();
                t[i] = v;
                out.push(Word::from_raw(x.q(), t));
            }
        }
    }
}

/// All distinct words obtained from `x` by deleting exactly one symbol.
pub fn deletion_ball(x: &Word) -> Vec<Word> {
    let s = x.raw();
    let mut out = Vec::new();
    for i in 0..s.len() {
        if i == 0 || s[i - 1] != s[i] {
            let mut t: Symbols = Symbols::with_capacity(s.len() - 1);
            t.extend_from_slice(&s[..i]);
            t.extend_from_slice(&s[i + 1..]);
            out.push(Word::from_raw(x.q(), t));
        }
    }
    out
}

/// All distinct words obtained from `x` by inserting exactly one symbol.
pub fn insertion_ball(x: &Word) -> Vec<Word> {
    let s = x.raw();
    let mut out = Vec::with_capacity((s.len() + 1) * (x.q() as usize - 1) + 1);
    for i in 0..=s.len() {
        for v in 0..x.q() {
            if i < s.len() && s[i] == v {
                continue;
            }
            let mut t: Symbols = Symbols::with_capacity(s.len() + 1);
            t.extend_from_slice(&s[..i]);
            t.push(v);
            t.extend_from_slice(&s[i..]);
            out.push(Word::from_raw(x.q(), t));
        }
    }
    out
}

fn iterate(x: &Word, t: usize, step: fn(&Word) -> Vec<Word>) -> Vec<Word> {
    let mut layer = vec![x.clone()];
    for _ in 0..t {
        let mut next: Vec<Word> = layer.iter().flat_map(step).collect();
        next.sort_unstable();
        next.dedup();
        layer = next;
    }
    layer
}

fn hamming_ball(x: &Word, t: usize) -> Vec<Word> {
    let mut all = vec![x.clone()];
    let mut frontier = vec![x.clone()];
    for _ in 0..t {
        let mut next = Vec::new();
        for w in &frontier {
            push_substitutions(w, &mut next);
        }
        next.sort_unstable();
        next.dedup();
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all.sort_unstable();
    all.dedup();
    all
}

fn primitive_ball(x: &Word, p: Primitive) -> Result<Vec<Word>> {
    Ok(match p {
        Primitive::Sub(1) => substitution_ball(x),
        Primitive::Sub(t) => hamming_ball(x, t),
        Primitive::Del(t) => {
            if x.len() < t {
                return invalid(format!(
                    "cannot delete {t} symbols from a word of length {}",
                    x.len()
                ));
            }
            if t == 1 {
                deletion_ball(x)
            } else {
                iterate(x, t, deletion_ball)
            }
        }
        Primitive::Ins => insertion_ball(x),
    })
}

/// The error ball of `x`, sorted and deduplicated.
pub fn ball(x: &Word, kind: BallKind) -> Result<Vec<Word>> {
    kind.validate()?;
    let mut out = Vec::new();
    for p in kind.primitive_list() {
        out.extend(primitive_ball(x, p)?);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Words `w` of length `n` (over the alphabet of `z`) whose ball contains `z`.
pub fn preimage(z: &Word, kind: BallKind, n: usize) -> Result<Vec<Word>> {
    kind.validate()?;
    let mut out = Vec::new();
    for p in kind.primitive_list() {
        match p {
            Primitive::Sub(t) if z.len() == n => out.extend(primitive_ball(z, Primitive::Sub(t))?),
            Primitive::Del(t) if z.len() + t == n => out.extend(iterate(z, t, insertion_ball)),
            Primitive::Ins if z.len() == n + 1 => out.extend(deletion_ball(z)),
            _ => {}
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Size of the intersection of two sorted, deduplicated slices.
pub fn sorted_intersection_len<T: Ord>(a: &[T], b: &[T]) -> usize {
    use std::cmp::Ordering::*;
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Less => i += 1,
            Greater => j += 1,
            Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// `|ball(x) ∩ ball(y)|`, computed by materializing both balls.
pub fn intersection_size(x: &Word, y: &Word, kind: BallKind) -> Result<usize> {
    check_same_space(x, y)?;
    Ok(sorted_intersection_len(&ball(x, kind)?, &ball(y, kind)?))
}

pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Closed form for the intersection of two radius-`t` Hamming balls whose
/// centres are at Hamming distance `d`.
///
/// The outer index counts coordinates outside the disagreement set that the
/// common word changes; `k` and `l` count disagreement coordinates where it
/// follows the first or the second centre. Both inner sums run from
/// `d - t + i`, which keeps the common word within radius `t` of each centre.
pub fn n_sub_formula(n: usize, q: u8, t: usize, d: usize) -> Result<u128> {
    crate::words::check_alphabet(q)?;
    if t == 0 || d == 0 || d > n {
        return invalid(format!("need t >= 1 and 1 <= d <= n (n={n}, t={t}, d={d})"));
    }
    let (n, t, d) = (n as i64, t as i64, d as i64);
    let q = q as u128;
    let half = (d + 1) / 2;
    let mut total: u128 = 0;
    for i in 0..=(t - half) {
        let outer = binomial((n - d) as u64, i as u64) * (q - 1).pow(i as u32);
        if outer == 0 {
            continue;
        }
        let lo = (d - t + i).max(0);
        let hi = t - i;
        let mut inner: u128 = 0;
        for k in lo..=hi.min(d) {
            for l in lo..=hi.min(d - k) {
                let rest = (d - k - l) as u32;
                inner += binomial(d as u64, k as u64)
                    * binomial((d - k) as u64, l as u64)
                    * (q - 2).pow(rest);
            }
        }
        total += outer * inner;
    }
    Ok(total)
}

/// Largest intersection of two radius-`t` Hamming balls over the whole space.
pub fn sub_coverage_formula(n: usize, q: u8, t: usize) -> Result<u128> {
    crate::words::check_alphabet(q)?;
    if t == 0 || n < t {
        return invalid(format!("need 1 <= t <= n (n={n}, t={t})"));
    }
    let q = q as u128;
    let sum: u128 = (0..t)
        .map(|i| binomial((n - i) as u64, i as u64) * (q - 1).pow(i as u32))
        .sum();
    Ok(q * sum)
}

/// Smallest `t` such that the radius-`t` deletion balls of `x` and `y` meet.
pub fn levenshtein_radius(x: &Word, y: &Word) -> Result<usize> {
    check_same_space(x, y)?;
    if x == y {
        return Ok(0);
    }
    let mut bx = vec![x.clone()];
    let mut by = vec![y.clone()];
    for t in 1..=x.len() {
        bx = deletion_layer(&bx);
        by = deletion_layer(&by);
        if sorted_intersection_len(&bx, &by) > 0 {
            return Ok(t);
        }
    }
    unreachable!("deleting every symbol always yields the empty word")
}

fn deletion_layer(layer: &[Word]) -> Vec<Word> {
    let mut next: Vec<Word> = layer.iter().flat_map(deletion_ball).collect();
    next.sort_unstable();
    next.dedup();
    next
}
