//! Code families defined by membership predicates.
//!
//! * `FULL`: every word of length `n`.
//! * `C0`: symbol sum is `0 (mod q)`.
//! * `C1`: sum over even positions (1-based) is `0 (mod q)`.
//! * `C2`: both of the above.
//! * `CD`, `CSD`, `CEDIT`: inversion count `= c (mod M)`, symbol sum
//!   `= d (mod q)`, and no low-period run longer than `P`. `CD` uses
//!   `M = 1 + P/2` with period bound 2, `CSD` uses `M = 1 + P` with period
//!   bound 1, `CEDIT` uses `M = 1 + P` with period bound 2.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::error::{invalid, Error, Result};
use crate::words::{self, check_alphabet, inversions, longest_low_period_subword, space_size, Word};

/// Families are only enumerated when `q^n` is at most this many words.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

const SAMPLING_ATTEMPTS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Full,
    C0,
    C1,
    C2,
    Cd,
    Csd,
    Cedit,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Full,
        Family::C0,
        Family::C1,
        Family::C2,
        Family::Cd,
        Family::Csd,
        Family::Cedit,
    ];

    pub fn uses_syndromes(self) -> bool {
        matches!(self, Family::Cd | Family::Csd | Family::Cedit)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Full => "FULL",
            Family::C0 => "C0",
            Family::C1 => "C1",
            Family::C2 => "C2",
            Family::Cd => "CD",
            Family::Csd => "CSD",
            Family::Cedit => "CEDIT",
        }
    }

    /// Period bound of the run-length constraint (`None` for the parity families).
    fn period_bound(self) -> Option<usize> {
        match self {
            Family::Cd | Family::Cedit => Some(2),
            Family::Csd => Some(1),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        Family::ALL
            .into_iter()
            .find(|f| f.name() == upper)
            .ok_or_else(|| {
                Error::Parse(format!(
                    "unknown family `{s}` (expected FULL, C0, C1, C2, CD, CSD or CEDIT)"
                ))
            })
    }
}

/// Smallest `k` with `q^k >= n`.
pub fn ceil_log(q: u8, n: usize) -> usize {
    let mut k = 0;
    let mut power = 1u128;
    while power < n as u128 {
        power *= q as u128;
        k += 1;
    }
    k
}

/// Default run bound `P` for a syndrome family.
///
/// `CD` needs an even bound, so its default is rounded up to the next even
/// number.
pub fn default_period(family: Family, n: usize, q: u8) -> Option<usize> {
    let base = ceil_log(q, n);
    match family {
        Family::Cd => Some((base + 2).next_multiple_of(2)),
        Family::Csd => Some(base + 1),
        Family::Cedit => Some(base + 2),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SyndromeParams {
    /// Run bound `P`.
    pub period: usize,
    /// Inversion residue.
    pub c: u64,
    /// Symbol-sum residue.
    pub d: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CodebookSpec {
    pub family: Family,
    pub n: usize,
    pub q: u8,
    /// Present exactly for `CD`, `CSD` and `CEDIT`.
    pub syndrome: Option<SyndromeParams>,
}

impl CodebookSpec {
    /// A spec with default parameters: `P` from [`default_period`] and
    /// `c = d = 0` for the syndrome families.
    pub fn new(family: Family, n: usize, q: u8) -> Self {
        let syndrome = default_period(family, n, q).map(|period| SyndromeParams {
            period,
            c: 0,
            d: 0,
        });
        Self {
            family,
            n,
            q,
            syndrome,
        }
    }

    pub fn with_syndrome(family: Family, n: usize, q: u8, period: usize, c: u64, d: u32) -> Self {
        Self {
            family,
            n,
            q,
            syndrome: family
                .uses_syndromes()
                .then_some(SyndromeParams { period, c, d }),
        }
    }

    /// Number of admissible inversion residues for a given run bound.
    pub fn inversion_modulus(family: Family, period: usize) -> Option<u64> {
        match family {
            Family::Cd => Some(1 + period as u64 / 2),
            Family::Csd | Family::Cedit => Some(1 + period as u64),
            _ => None,
        }
    }
}

impl fmt::Display for CodebookSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={}, q={}", self.family, self.n, self.q)?;
        if let Some(s) = self.syndrome {
            write!(f, ", P={}, c={}, d={}", s.period, s.c, s.d)?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug)]
pub struct Codebook {
    spec: CodebookSpec,
    modulus: u64,
}

impl Codebook {
    pub fn new(spec: CodebookSpec) -> Result<Self> {
        check_alphabet(spec.q)?;
        if spec.n == 0 {
            return invalid("codeword length must be positive");
        }
        let mut modulus = 1;
        match (spec.family.uses_syndromes(), spec.syndrome) {
            (false, None) => {}
            (false, Some(_)) => {
                return invalid(format!("{} takes no syndrome parameters", spec.family))
            }
            (true, None) => {
                return invalid(format!("{} needs P, c and d", spec.family));
            }
            (true, Some(s)) => {
                if s.period == 0 {
                    return invalid("run bound P must be positive");
                }
                if spec.family == Family::Cd && s.period % 2 == 1 {
                    return invalid(format!("CD needs an even run bound, got P={}", s.period));
                }
                modulus = CodebookSpec::inversion_modulus(spec.family, s.period)
                    .expect("syndrome family");
                if s.c >= modulus {
                    return invalid(format!("c={} must lie in [0, {modulus})", s.c));
                }
                if s.d >= spec.q as u32 {
                    return invalid(format!("d={} must lie in [0, {})", s.d, spec.q));
                }
            }
        }
        Ok(Self { spec, modulus })
    }

    pub fn spec(&self) -> &CodebookSpec {
        &self.spec
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn q(&self) -> u8 {
        self.spec.q
    }

    /// Modulus of the inversion syndrome (1 for the parity families).
    pub fn inversion_modulus(&self) -> u64 {
        self.modulus
    }

    /// `(period bound, run bound P)` of the run-length constraint, if any.
    pub fn run_constraint(&self) -> Option<(usize, usize)> {
        Some((self.spec.family.period_bound()?, self.spec.syndrome?.period))
    }

    pub fn contains(&self, x: &Word) -> Result<bool> {
        if x.q() != self.spec.q || x.len() != self.spec.n {
            return invalid(format!(
                "word {x} does not live in the space of {}",
                self.spec
            ));
        }
        Ok(self.contains_unchecked(x))
    }

    /// Membership for a word already known to have the right length and alphabet.
    pub(crate) fn contains_unchecked(&self, x: &Word) -> bool {
        match self.spec.family {
            Family::Full => true,
            Family::C0 => x.sum_mod_q() == 0,
            Family::C1 => x.even_sum_mod_q() == 0,
            Family::C2 => x.even_sum_mod_q() == 0 && x.sum_mod_q() == 0,
            Family::Cd | Family::Csd | Family::Cedit => {
                let s = self.spec.syndrome.expect("validated");
                x.sum_mod_q() == s.d
                    && inversions(x) % self.modulus == s.c
                    && self.satisfies_runs(x)
            }
        }
    }

    pub(crate) fn satisfies_runs(&self, x: &Word) -> bool {
        match self.run_constraint() {
            Some((ell, p)) => in_r(x, ell, p),
            None => true,
        }
    }

    fn enumeration_size(&self) -> Result<u64> {
        match space_size(self.spec.q, self.spec.n) {
            Some(size) if size <= ENUMERATION_LIMIT => Ok(size),
            _ => Err(Error::ResourceLimit(format!(
                "{} spans {}^{} words, above the enumeration limit of {ENUMERATION_LIMIT}",
                self.spec, self.spec.q, self.spec.n
            ))),
        }
    }

    /// All codewords in lexicographic order.
    pub fn enumerate(&self) -> Result<Vec<Word>> {
        let total = self.enumeration_size()?;
        let (q, n) = (self.spec.q, self.spec.n);
        Ok((0..total)
            .into_par_iter()
            .map(|r| Word::from_rank(q, n, r))
            .filter(|x| self.contains_unchecked(x))
            .collect())
    }

    /// `|C|`, in closed form for the parity families and by enumeration otherwise.
    pub fn cardinality(&self) -> Result<u128> {
        let (q, n) = (self.spec.q as u128, self.spec.n as u32);
        if let Some(r) = self.closed_form_redundancy() {
            return Ok(q.pow(n - r));
        }
        let total = self.enumeration_size()?;
        let (qq, nn) = (self.spec.q, self.spec.n);
        Ok((0..total)
            .into_par_iter()
            .filter(|&r| self.contains_unchecked(&Word::from_rank(qq, nn, r)))
            .count() as u128)
    }

    fn closed_form_redundancy(&self) -> Option<u32> {
        let n = self.spec.n;
        match self.spec.family {
            Family::Full => Some(0),
            Family::C0 => Some(1),
            // C1 needs an even position; C2 additionally an odd one
            Family::C1 => Some(u32::from(n >= 2)),
            Family::C2 => Some(if n >= 2 { 2 } else { 1 }),
            _ => None,
        }
    }

    /// `n - log_q |C|`.
    pub fn redundancy(&self) -> Result<f64> {
        if let Some(r) = self.closed_form_redundancy() {
            return Ok(r as f64);
        }
        let size = self.cardinality()?;
        if size == 0 {
            return Err(Error::UndefinedRedundancy);
        }
        Ok(self.spec.n as f64 - (size as f64).ln() / (self.spec.q as f64).ln())
    }

    /// A uniformly random codeword.
    ///
    /// Parity families draw the free coordinates and solve for the checked
    /// ones; syndrome families use rejection sampling over the whole space.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Word> {
        let (q, n) = (self.spec.q, self.spec.n);
        let mut symbols: words::Symbols = (0..n).map(|_| rng.random_range(0..q)).collect();
        let fix = |symbols: &mut words::Symbols, pos: usize, target_sum: u32| {
            // set symbols[pos] so that the given sum (excluding pos) plus it is 0 mod q
            let qq = q as u32;
            symbols[pos] = ((qq - target_sum % qq) % qq) as u8;
        };
        match self.spec.family {
            Family::Full => {}
            Family::C0 => {
                let rest: u32 = symbols[..n - 1].iter().map(|&s| s as u32).sum();
                fix(&mut symbols, n - 1, rest);
            }
            Family::C1 | Family::C2 => {
                // last 1-based even position is 0-based index 2*floor(n/2) - 1
                if n >= 2 {
                    let e = 2 * (n / 2) - 1;
                    let rest: u32 = (1..n)
                        .step_by(2)
                        .filter(|&i| i != e)
                        .map(|i| symbols[i] as u32)
                        .sum();
                    fix(&mut symbols, e, rest);
                }
                if self.spec.family == Family::C2 {
                    // index 0 is an odd 1-based position and leaves the even sum alone
                    let rest: u32 = symbols[1..].iter().map(|&s| s as u32).sum();
                    fix(&mut symbols, 0, rest);
                }
            }
            Family::Cd | Family::Csd | Family::Cedit => {
                for _ in 0..SAMPLING_ATTEMPTS {
                    let x = Word::from_raw(q, symbols);
                    if self.contains_unchecked(&x) {
                        return Ok(x);
                    }
                    symbols = (0..n).map(|_| rng.random_range(0..q)).collect();
                }
                return Err(Error::ResourceLimit(format!(
                    "no codeword of {} found in {SAMPLING_ATTEMPTS} rejection-sampling attempts",
                    self.spec
                )));
            }
        }
        let x = Word::from_raw(q, symbols);
        debug_assert!(self.contains_unchecked(&x));
        Ok(x)
    }
}

/// True iff no `ell'`-periodic subword (`ell' <= ell`) of `x` is longer than `t`.
pub fn in_r(x: &Word, ell: usize, t: usize) -> bool {
    longest_low_period_subword(x, ell) <= t
}

fn check_r_args(q: u8, ell: usize, t: usize) -> Result<()> {
    check_alphabet(q)?;
    if !(1..=2).contains(&ell) {
        return invalid(format!("period bound must be 1 or 2, got {ell}"));
    }
    if t <= ell {
        return invalid(format!("run bound t={t} must exceed the period bound {ell}"));
    }
    Ok(())
}

/// `|R_q(n, ell, t)|`, by enumeration when feasible and dynamic programming otherwise.
pub fn count_r(n: usize, q: u8, ell: usize, t: usize) -> Result<u128> {
    check_r_args(q, ell, t)?;
    match space_size(q, n) {
        Some(size) if size <= ENUMERATION_LIMIT => count_r_enumerate(n, q, ell, t),
        _ => count_r_dp(n, q, ell, t),
    }
}

pub fn count_r_enumerate(n: usize, q: u8, ell: usize, t: usize) -> Result<u128> {
    check_r_args(q, ell, t)?;
    let total = space_size(q, n)
        .filter(|&s| s <= ENUMERATION_LIMIT)
        .ok_or_else(|| Error::ResourceLimit(format!("{q}^{n} words is too many to enumerate")))?;
    Ok((0..total)
        .into_par_iter()
        .filter(|&r| in_r(&Word::from_rank(q, n, r), ell, t))
        .count() as u128)
}

/// Counts `R_q(n, ell, t)` by scanning words left to right while tracking, for
/// each period `p <= ell`, the length of the longest `p`-periodic suffix.
pub fn count_r_dp(n: usize, q: u8, ell: usize, t: usize) -> Result<u128> {
    check_r_args(q, ell, t)?;
    // state: (last `ell` symbols, oldest first; longest p-periodic suffix per p)
    type State = (Vec<u8>, Vec<usize>);
    let mut layer: FxHashMap<State, u128> = FxHashMap::default();
    layer.insert((Vec::new(), vec![0; ell]), 1);
    for len in 0..n {
        let mut next: FxHashMap<State, u128> = FxHashMap::default();
        for ((hist, runs), count) in &layer {
            'symbol: for s in 0..q {
                let mut new_runs = Vec::with_capacity(ell);
                for p in 1..=ell {
                    let r = if len >= p && hist[hist.len() - p] == s {
                        runs[p - 1] + 1
                    } else {
                        (len + 1).min(p)
                    };
                    if r > t {
                        continue 'symbol;
                    }
                    new_runs.push(r);
                }
                let mut new_hist = hist.clone();
                new_hist.push(s);
                if new_hist.len() > ell {
                    new_hist.remove(0);
                }
                let slot = next.entry((new_hist, new_runs)).or_insert(0);
                *slot = slot.checked_add(*count).ok_or_else(|| {
                    Error::ResourceLimit(format!("|R_{q}({n},{ell},{t})| overflows u128"))
                })?;
            }
        }
        layer = next;
    }
    Ok(layer.values().sum())
}

/// Syndrome pair with the largest code, and that code's size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SyndromeChoice {
    pub c: u64,
    pub d: u32,
    pub cardinality: u128,
}

/// Picks the `(c, d)` giving the largest code; ties go to the smallest pair.
pub fn best_syndromes(family: Family, n: usize, q: u8, period: usize) -> Result<SyndromeChoice> {
    Ok(syndrome_table(family, n, q, period)?
        .into_iter()
        .fold(None::<SyndromeChoice>, |best, choice| match best {
            Some(b) if b.cardinality >= choice.cardinality => Some(b),
            _ => Some(choice),
        })
        .expect("at least one syndrome pair"))
}

/// Code size for every syndrome pair, ordered by `(c, d)`.
pub fn syndrome_table(family: Family, n: usize, q: u8, period: usize) -> Result<Vec<SyndromeChoice>> {
    if !family.uses_syndromes() {
        return invalid(format!("{family} has no syndrome parameters to choose"));
    }
    // validates P and the alphabet
    let cb = Codebook::new(CodebookSpec::with_syndrome(family, n, q, period, 0, 0))?;
    let total = cb.enumeration_size()?;
    let modulus = cb.inversion_modulus();
    let (ell, p) = cb.run_constraint().expect("syndrome family");
    let cells = modulus as usize * q as usize;
    let counts = (0..total)
        .into_par_iter()
        .fold(
            || vec![0u128; cells],
            |mut acc, r| {
                let x = Word::from_rank(q, n, r);
                if in_r(&x, ell, p) {
                    let c = (inversions(&x) % modulus) as usize;
                    acc[c * q as usize + x.sum_mod_q() as usize] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u128; cells],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(idx, cardinality)| SyndromeChoice {
            c: (idx / q as usize) as u64,
            d: (idx % q as usize) as u32,
            cardinality,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn cb(family: Family, n: usize, q: u8) -> Codebook {
        Codebook::new(CodebookSpec::new(family, n, q)).unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(cb(Family::C0, 4, 2).contains(&w("q2:0110")).unwrap());
        assert!(!cb(Family::C1, 4, 2).contains(&w("q2:0100")).unwrap());
        assert!(cb(Family::Full, 4, 2).contains(&w("q2:0100")).unwrap());
        let cd = Codebook::new(CodebookSpec::with_syndrome(Family::Cd, 6, 2, 4, 0, 0)).unwrap();
        assert!(!cd.contains(&w("q2:000000")).unwrap());
        assert!(cd.contains(&w("q2:0000")).is_err());
        assert!(cd.contains(&w("q3:000000")).is_err());
    }

    #[test]
    fn spec_validation() {
        let bad = [
            CodebookSpec::with_syndrome(Family::Cd, 6, 2, 5, 0, 0),
            CodebookSpec::with_syndrome(Family::Cd, 6, 2, 4, 3, 0),
            CodebookSpec::with_syndrome(Family::Csd, 6, 2, 4, 5, 0),
            CodebookSpec::with_syndrome(Family::Cedit, 6, 3, 4, 0, 3),
            CodebookSpec {
                family: Family::Cedit,
                n: 6,
                q: 2,
                syndrome: None,
            },
            CodebookSpec::new(Family::C0, 0, 2),
        ];
        for spec in bad {
            assert!(Codebook::new(spec).is_err(), "{spec} should be rejected");
        }
        assert!(Codebook::new(CodebookSpec::with_syndrome(Family::Csd, 6, 2, 4, 4, 1)).is_ok());
    }

    #[test]
    fn default_periods() {
        assert_eq!(ceil_log(2, 1), 0);
        assert_eq!(ceil_log(2, 8), 3);
        assert_eq!(ceil_log(2, 9), 4);
        assert_eq!(ceil_log(4, 152), 4);
        assert_eq!(default_period(Family::Cd, 8, 2), Some(6));
        assert_eq!(default_period(Family::Cd, 9, 2), Some(6));
        assert_eq!(default_period(Family::Cd, 9, 3), Some(4));
        assert_eq!(default_period(Family::Csd, 8, 2), Some(4));
        assert_eq!(default_period(Family::Cedit, 8, 2), Some(5));
        assert_eq!(default_period(Family::C0, 8, 2), None);
    }

    #[test]
    fn r_floor_under_both_log_bases() {
        // the run bound is read with log base q; base 2 gives t at least as large
        for q in [3u8, 4] {
            for ell in [1, 2] {
                for n in 4..=9 {
                    let floor = (q as u128).pow(n as u32 - 1);
                    let base_q = count_r(n, q, ell, ceil_log(q, n) + ell).unwrap();
                    let base_2 = count_r(n, q, ell, ceil_log(2, n) + ell).unwrap();
                    assert!(base_q >= floor, "q={q} n={n} ell={ell}: {base_q} < {floor}");
                    assert!(base_2 >= base_q);
                }
            }
        }
    }

    #[test]
    fn r_examples() {
        assert!(in_r(&w("q2:0101"), 2, 4));
        assert!(!in_r(&w("q2:0101"), 2, 3));
        assert!(!in_r(&w("q2:000"), 1, 2));
        assert!(in_r(&w("q2:0110"), 1, 2));
        assert_eq!(count_r(3, 2, 1, 2).unwrap(), 6);
        assert_eq!(count_r(5, 3, 2, 5).unwrap(), 243);
        assert!(count_r(4, 2, 1, 3).unwrap() >= 8);
        assert!(count_r(4, 2, 3, 5).is_err());
        assert!(count_r(4, 2, 2, 2).is_err());
    }

    #[test]
    fn dp_matches_enumeration() {
        for q in [2u8, 3, 4] {
            for ell in 1..=2 {
                for t in ell + 1..=ell + 4 {
                    for n in 0..=(if q == 2 { 14 } else { 8 }) {
                        assert_eq!(
                            count_r_dp(n, q, ell, t).unwrap(),
                            count_r_enumerate(n, q, ell, t).unwrap(),
                            "q={q} n={n} ell={ell} t={t}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn parity_family_sizes() {
        for (q, n) in [(2u8, 5usize), (2, 6), (3, 4), (3, 5), (4, 4)] {
            for family in [Family::C0, Family::C1, Family::C2] {
                let c = cb(family, n, q);
                assert_eq!(c.enumerate().unwrap().len() as u128, c.cardinality().unwrap());
            }
            let full = (q as usize).pow(n as u32);
            assert_eq!(cb(Family::C0, n, q).enumerate().unwrap().len(), full / q as usize);
            assert_eq!(cb(Family::C1, n, q).enumerate().unwrap().len(), full / q as usize);
            assert_eq!(
                cb(Family::C2, n, q).enumerate().unwrap().len(),
                full / (q as usize * q as usize)
            );
        }
        assert_eq!(cb(Family::Full, 6, 2).redundancy().unwrap(), 0.0);
        assert_eq!(cb(Family::C0, 6, 3).redundancy().unwrap(), 1.0);
        assert_eq!(cb(Family::C2, 6, 3).redundancy().unwrap(), 2.0);
    }

    #[test]
    fn syndrome_classes_partition_r() {
        for (family, n, q) in [(Family::Cd, 8, 2u8), (Family::Csd, 7, 3), (Family::Cedit, 8, 2)] {
            let p = default_period(family, n, q).unwrap();
            let (ell, _) = cb(family, n, q).run_constraint().unwrap();
            let table = syndrome_table(family, n, q, p).unwrap();
            let total: u128 = table.iter().map(|c| c.cardinality).sum();
            assert_eq!(total, count_r(n, q, ell, p).unwrap());
            for choice in &table {
                let code = Codebook::new(CodebookSpec::with_syndrome(
                    family, n, q, p, choice.c, choice.d,
                ))
                .unwrap();
                assert_eq!(code.enumerate().unwrap().len() as u128, choice.cardinality);
            }
            let best = best_syndromes(family, n, q, p).unwrap();
            assert_eq!(best.cardinality, table.iter().map(|c| c.cardinality).max().unwrap());
            let first_max = table.iter().find(|c| c.cardinality == best.cardinality).unwrap();
            assert_eq!((best.c, best.d), (first_max.c, first_max.d));
        }
        assert!(best_syndromes(Family::Full, 6, 2, 4).is_err());
    }

    #[test]
    fn empty_code_redundancy_is_undefined() {
        // n = 3, q = 2, P = 1 allows only alternating words 010 and 101 (sums 1 and 0)
        let spec = CodebookSpec::with_syndrome(Family::Csd, 3, 2, 1, 1, 0);
        let code = Codebook::new(spec).unwrap();
        let members = code.enumerate().unwrap();
        if members.is_empty() {
            assert!(matches!(code.redundancy(), Err(Error::UndefinedRedundancy)));
        }
        // Inv(101) = 1, sum 0: (c=1,d=0) holds it; (c=0,d=0) is empty
        let empty = Codebook::new(CodebookSpec::with_syndrome(Family::Csd, 3, 2, 1, 0, 0)).unwrap();
        assert!(empty.enumerate().unwrap().is_empty());
        assert!(matches!(empty.redundancy(), Err(Error::UndefinedRedundancy)));
    }

    #[test]
    fn samples_are_members() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for family in Family::ALL {
            for (n, q) in [(1usize, 2u8), (2, 3), (7, 2), (40, 4)] {
                let c = cb(family, n, q);
                for _ in 0..50 {
                    let x = c.sample(&mut rng).unwrap();
                    assert!(c.contains(&x).unwrap(), "{x} not in {}", c.spec());
                }
            }
        }
    }

    #[test]
    fn parity_sampling_is_uniform() {
        let c = cb(Family::C2, 4, 3);
        let members = c.enumerate().unwrap();
        assert_eq!(members.len(), 9);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut hits = std::collections::HashMap::new();
        let draws = 90_000;
        for _ in 0..draws {
            *hits.entry(c.sample(&mut rng).unwrap()).or_insert(0usize) += 1;
        }
        assert_eq!(hits.len(), 9);
        // expected 10_000 each, sd ~ 95
        for (_, count) in hits {
            assert!((count as i64 - 10_000).abs() < 500, "{count}");
        }
    }
}
