//! Read coverage, reconstruction-code verification, and exact optimal codes at tiny lengths.

use std::fmt;

use rayon::prelude::*;

use crate::balls::{ball, intersection_size, preimage, BallKind};
use crate::codebooks::{Codebook, ENUMERATION_LIMIT};
use crate::confusability::predicted_intersection;
use crate::error::{invalid, Error, Result};
use crate::words::{check_alphabet, space_size, Word};

/// Largest space `optimal_code_size` will build a conflict graph on.
pub const OPTIMAL_SEARCH_LIMIT: u64 = 1 << 14;

/// Codebooks with at most this many pairs are scanned pair by pair under [`CoverageMethod::Auto`].
const PAIR_SCAN_LIMIT: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CoverageMethod {
    /// Pair scan for small codebooks, neighborhood counting otherwise.
    #[default]
    Auto,
    /// Every unordered pair, through the closed-form intersection where one exists.
    PairScan,
    /// For each codeword, walk its ball and the preimages of every read.
    Neighborhood,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageReport {
    pub kind: BallKind,
    /// `ν(C;B)`; 0 for codebooks with fewer than two words.
    pub nu: usize,
    /// First pair in codebook order reaching `nu`.
    pub witness: Option<(Word, Word)>,
    pub pairs_scanned: u64,
    pub codebook_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verification {
    Pass {
        nu: usize,
    },
    Fail {
        x: Word,
        y: Word,
        intersection: usize,
    },
}

impl Verification {
    pub fn passed(&self) -> bool {
        matches!(self, Verification::Pass { .. })
    }
}

impl fmt::Display for Verification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verification::Pass { nu } => write!(f, "PASS (nu = {nu})"),
            Verification::Fail { x, y, intersection } => {
                write!(f, "FAIL: {x} and {y} share {intersection} reads")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimalSearchResult {
    pub n: usize,
    pub q: u8,
    pub n_reads: usize,
    pub kind: BallKind,
    pub max_code_size: usize,
    /// `n - log_q(max_code_size)`.
    pub rho_exact: f64,
    /// One code of maximum size, sorted.
    pub witness: Vec<Word>,
}

fn predicted_supported(kind: BallKind) -> bool {
    matches!(
        kind,
        BallKind::D | BallKind::I | BallKind::ID | BallKind::SD | BallKind::SI | BallKind::Edit
    )
}

fn pair_count(m: usize) -> u64 {
    let m = m as u64;
    m * m.saturating_sub(1) / 2
}

/// `ν(C;B)` for an enumerable codebook.
pub fn read_coverage(cb: &Codebook, kind: BallKind) -> Result<CoverageReport> {
    read_coverage_with(cb, kind, CoverageMethod::Auto)
}

pub fn read_coverage_with(
    cb: &Codebook,
    kind: BallKind,
    method: CoverageMethod,
) -> Result<CoverageReport> {
    let words = cb.enumerate()?;
    coverage_of_words(&words, cb.n(), cb.q(), kind, method)
}

/// `ν` of an explicit list of distinct words of length `n`, in the given order.
pub fn coverage_of_words(
    words: &[Word],
    n: usize,
    q: u8,
    kind: BallKind,
    method: CoverageMethod,
) -> Result<CoverageReport> {
    check_alphabet(q)?;
    if let Some(w) = words.iter().find(|w| w.len() != n || w.q() != q) {
        return invalid(format!("word {w} is not of length {n} over q={q}"));
    }
    // surfaces invalid radii even for tiny codebooks
    if let Some(w) = words.first() {
        ball(w, kind)?;
    }
    let method = match method {
        CoverageMethod::Auto if pair_count(words.len()) <= PAIR_SCAN_LIMIT => {
            CoverageMethod::PairScan
        }
        CoverageMethod::Auto => CoverageMethod::Neighborhood,
        m => m,
    };
    let best = match method {
        CoverageMethod::PairScan => pair_scan(words, kind)?,
        _ => {
            let index = IndexTable::new(words, n, q)?;
            let rows = row_counts(words, &index, n, kind, |i, counts| {
                // largest count against a later word, first such index on ties;
                // words sharing nothing default to the next index
                let mut best = (0, i + 1);
                for (j, &c) in counts.iter().enumerate().skip(i + 1) {
                    if c > best.0 {
                        best = (c, j);
                    }
                }
                best
            })?;
            first_maximum(
                rows.into_iter()
                    .enumerate()
                    .filter(|&(i, _)| i + 1 < words.len())
                    .map(|(i, (c, j))| (c as usize, i, j)),
            )
        }
    };
    Ok(CoverageReport {
        kind,
        nu: best.map_or(0, |b| b.0),
        witness: best.map(|(_, i, j)| (words[i].clone(), words[j].clone())),
        pairs_scanned: pair_count(words.len()),
        codebook_size: words.len(),
    })
}

/// Maximum by count; ties go to the smallest `(i, j)`.
fn first_maximum(items: impl Iterator<Item = (usize, usize, usize)>) -> Option<(usize, usize, usize)> {
    items.fold(None, |best, cur| match best {
        Some(b) if b.0 > cur.0 || (b.0 == cur.0 && (b.1, b.2) <= (cur.1, cur.2)) => Some(b),
        _ => Some(cur),
    })
}

fn pair_scan(words: &[Word], kind: BallKind) -> Result<Option<(usize, usize, usize)>> {
    let closed_form = predicted_supported(kind);
    let balls: Vec<Vec<Word>> = if closed_form {
        Vec::new()
    } else {
        words.par_iter().map(|w| ball(w, kind)).collect::<Result<_>>()?
    };
    let rows: Vec<Option<(usize, usize, usize)>> = (0..words.len())
        .into_par_iter()
        .map(|i| {
            let mut best: Option<(usize, usize, usize)> = None;
            for j in i + 1..words.len() {
                let c = if closed_form {
                    predicted_intersection(&words[i], &words[j], kind)?
                } else {
                    crate::balls::sorted_intersection_len(&balls[i], &balls[j])
                };
                if best.is_none_or(|b| c > b.0) {
                    best = Some((c, i, j));
                }
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    Ok(first_maximum(rows.into_iter().flatten()))
}

/// Maps the rank of a length-`n` word to its position in a word list.
struct IndexTable {
    slots: Vec<u32>,
}

impl IndexTable {
    const ABSENT: u32 = u32::MAX;

    fn new(words: &[Word], n: usize, q: u8) -> Result<Self> {
        let size = space_size(q, n)
            .filter(|&s| s <= ENUMERATION_LIMIT)
            .ok_or_else(|| Error::ResourceLimit(format!("{q}^{n} words is too many to index")))?;
        let mut slots = vec![Self::ABSENT; size as usize];
        for (i, w) in words.iter().enumerate() {
            slots[w.rank() as usize] = i as u32;
        }
        Ok(Self { slots })
    }

    fn get(&self, w: &Word) -> Option<usize> {
        match self.slots[w.rank() as usize] {
            Self::ABSENT => None,
            i => Some(i as usize),
        }
    }
}

/// For each word `i`, counts `|B(w_i) ∩ B(w_j)|` for every `j` and hands the
/// counts to `summarize`. Counts for `j <= i` are not filled in.
fn row_counts<T: Send>(
    words: &[Word],
    index: &IndexTable,
    n: usize,
    kind: BallKind,
    summarize: impl Fn(usize, &[u32]) -> T + Sync,
) -> Result<Vec<T>> {
    (0..words.len())
        .into_par_iter()
        .map_init(
            || (vec![0u32; words.len()], Vec::<usize>::new()),
            |(counts, touched), i| {
                for z in ball(&words[i], kind)? {
                    for y in preimage(&z, kind, n)? {
                        if let Some(j) = index.get(&y) {
                            if j > i {
                                if counts[j] == 0 {
                                    touched.push(j);
                                }
                                counts[j] += 1;
                            }
                        }
                    }
                }
                let out = summarize(i, counts);
                for j in touched.drain(..) {
                    counts[j] = 0;
                }
                Ok(out)
            },
        )
        .collect()
}

/// Passes iff `ν(C;B) < n_reads`; otherwise returns the first violating pair.
pub fn verify_reconstruction(cb: &Codebook, n_reads: usize, kind: BallKind) -> Result<Verification> {
    if n_reads == 0 {
        return invalid("number of reads must be positive");
    }
    let report = read_coverage(cb, kind)?;
    Ok(verdict(&report, n_reads))
}

fn verdict(report: &CoverageReport, n_reads: usize) -> Verification {
    match &report.witness {
        Some((x, y)) if report.nu >= n_reads => Verification::Fail {
            x: x.clone(),
            y: y.clone(),
            intersection: report.nu,
        },
        _ => Verification::Pass { nu: report.nu },
    }
}

/// Largest `C ⊆ Σ_q^n` with `ν(C;B) < n_reads`, by exact maximum independent
/// set search on the conflict graph (edges where two balls share `n_reads` or
/// more reads).
pub fn optimal_code_size(n: usize, q: u8, n_reads: usize, kind: BallKind) -> Result<OptimalSearchResult> {
    check_alphabet(q)?;
    if n_reads == 0 {
        return invalid("number of reads must be positive");
    }
    if n == 0 {
        return invalid("word length must be positive");
    }
    let size = space_size(q, n).filter(|&s| s <= OPTIMAL_SEARCH_LIMIT).ok_or_else(|| {
        Error::ResourceLimit(format!(
            "optimal search on {q}^{n} words exceeds the limit of {OPTIMAL_SEARCH_LIMIT}"
        ))
    })?;
    let words: Vec<Word> = (0..size).map(|r| Word::from_rank(q, n, r)).collect();
    let graph = conflict_graph(&words, n, q, n_reads, kind)?;
    let mut chosen = maximum_independent_set(&graph);
    chosen.sort_unstable();
    let witness: Vec<Word> = chosen.into_iter().map(|v| words[v].clone()).collect();
    let max_code_size = witness.len();
    Ok(OptimalSearchResult {
        n,
        q,
        n_reads,
        kind,
        max_code_size,
        rho_exact: n as f64 - (max_code_size as f64).ln() / (q as f64).ln(),
        witness,
    })
}

/// Adjacency lists; `v` and `u` are adjacent iff their balls share at least `threshold` reads.
fn conflict_graph(words: &[Word], n: usize, q: u8, threshold: usize, kind: BallKind) -> Result<Vec<Vec<usize>>> {
    let index = IndexTable::new(words, n, q)?;
    let upper = row_counts(words, &index, n, kind, |_, counts| {
        counts
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c as usize >= threshold)
            .map(|(j, _)| j)
            .collect::<Vec<_>>()
    })?;
    let mut adj = vec![Vec::new(); words.len()];
    for (i, row) in upper.into_iter().enumerate() {
        for j in row {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    Ok(adj)
}

/// Exact maximum independent set, solved per connected component.
pub(crate) fn maximum_independent_set(adj: &[Vec<usize>]) -> Vec<usize> {
    let mut component = vec![usize::MAX; adj.len()];
    let mut chosen = Vec::new();
    for start in 0..adj.len() {
        if component[start] != usize::MAX {
            continue;
        }
        let mut members = vec![start];
        component[start] = start;
        let mut k = 0;
        while k < members.len() {
            for &u in &adj[members[k]] {
                if component[u] == usize::MAX {
                    component[u] = start;
                    members.push(u);
                }
            }
            k += 1;
        }
        if members.len() == 1 {
            chosen.push(start);
            continue;
        }
        members.sort_unstable();
        let local: Vec<Vec<usize>> = members
            .iter()
            .map(|&v| {
                adj[v]
                    .iter()
                    .map(|u| members.binary_search(u).expect("same component"))
                    .collect()
            })
            .collect();
        chosen.extend(component_mis(&local).into_iter().map(|v| members[v]));
    }
    chosen
}

type Bits = Vec<u64>;

fn bit_set(b: &mut Bits, i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn bit_clear(b: &mut Bits, i: usize) {
    b[i / 64] &= !(1 << (i % 64));
}

fn bit_get(b: &Bits, i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

fn first_bit(b: &Bits) -> Option<usize> {
    b.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
}

fn bits_any(b: &Bits) -> bool {
    b.iter().any(|&w| w != 0)
}

/// Maximum clique in the complement graph, branch and bound with a greedy
/// coloring bound. Vertices are renumbered by descending conflict-graph degree
/// (ascending complement degree places likely clique members last).
fn component_mis(adj: &[Vec<usize>]) -> Vec<usize> {
    let m = adj.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(adj[v].len()), v));
    let mut pos = vec![0; m];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    let words = m.div_ceil(64);
    let mut comp: Vec<Bits> = vec![vec![0; words]; m];
    for p in 0..m {
        for r in 0..m {
            if r != p {
                bit_set(&mut comp[p], r);
            }
        }
        for &u in &adj[order[p]] {
            bit_clear(&mut comp[p], pos[u]);
        }
    }
    let mut search = CliqueSearch {
        comp: &comp,
        best: Vec::new(),
        current: Vec::new(),
    };
    let mut all = vec![0u64; words];
    (0..m).for_each(|p| bit_set(&mut all, p));
    search.expand(all);
    search.best.into_iter().map(|p| order[p]).collect()
}

struct CliqueSearch<'a> {
    comp: &'a [Bits],
    best: Vec<usize>,
    current: Vec<usize>,
}

impl CliqueSearch<'_> {
    fn expand(&mut self, mut candidates: Bits) {
        let (vertices, colors) = self.color_sort(&candidates);
        for k in (0..vertices.len()).rev() {
            if self.current.len() + colors[k] <= self.best.len() {
                return;
            }
            let v = vertices[k];
            self.current.push(v);
            let next: Bits = candidates
                .iter()
                .zip(&self.comp[v])
                .map(|(a, b)| a & b)
                .collect();
            if bits_any(&next) {
                self.expand(next);
            } else if self.current.len() > self.best.len() {
                self.best = self.current.clone();
            }
            self.current.pop();
            bit_clear(&mut candidates, v);
        }
    }

    /// Greedy coloring of the candidates; returns them in color order with the
    /// running color count, an upper bound on any clique among the prefix.
    fn color_sort(&self, candidates: &Bits) -> (Vec<usize>, Vec<usize>) {
        let mut uncolored = candidates.clone();
        let mut vertices = Vec::new();
        let mut colors = Vec::new();
        let mut color = 0;
        while bits_any(&uncolored) {
            color += 1;
            let mut available = uncolored.clone();
            while let Some(v) = first_bit(&available) {
                bit_clear(&mut uncolored, v);
                bit_clear(&mut available, v);
                // vertices sharing a color must be non-adjacent in the clique graph
                for (a, b) in available.iter_mut().zip(&self.comp[v]) {
                    *a &= !b;
                }
                vertices.push(v);
                colors.push(color);
            }
        }
        debug_assert!(vertices.iter().all(|&v| bit_get(candidates, v)));
        (vertices, colors)
    }
}

/// `|B(x) ∩ B(y)|` routed through the closed form when the kind has one.
pub fn pair_intersection(x: &Word, y: &Word, kind: BallKind) -> Result<usize> {
    if predicted_supported(kind) && x != y {
        predicted_intersection(x, y, kind)
    } else {
        intersection_size(x, y, kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebooks::{CodebookSpec, Family};

    fn full(n: usize, q: u8) -> Codebook {
        Codebook::new(CodebookSpec::new(Family::Full, n, q)).unwrap()
    }

    #[test]
    fn coverage_examples() {
        for method in [CoverageMethod::PairScan, CoverageMethod::Neighborhood] {
            let nu = |n, q, kind| read_coverage_with(&full(n, q), kind, method).unwrap().nu;
            assert_eq!(nu(6, 2, BallKind::D), 2);
            assert_eq!(nu(5, 3, BallKind::SI), 5);
            assert_eq!(nu(6, 2, BallKind::Edit), 6);
            assert_eq!(nu(5, 2, BallKind::S), 2);
            assert_eq!(nu(5, 2, BallKind::SubstitutionRadius(2)), 10);
        }
    }

    #[test]
    fn methods_agree_on_witness() {
        let codes = [
            full(5, 2),
            Codebook::new(CodebookSpec::new(Family::C1, 6, 2)).unwrap(),
            Codebook::new(CodebookSpec::new(Family::Cedit, 8, 2)).unwrap(),
            Codebook::new(CodebookSpec::new(Family::C0, 4, 3)).unwrap(),
        ];
        for cb in &codes {
            for kind in BallKind::SINGLE_EDIT_KINDS.into_iter().chain([BallKind::DeletionRadius(2)]) {
                let a = read_coverage_with(cb, kind, CoverageMethod::PairScan).unwrap();
                let b = read_coverage_with(cb, kind, CoverageMethod::Neighborhood).unwrap();
                assert_eq!(a, b, "{} {kind}", cb.spec());
                if let Some((x, y)) = &a.witness {
                    assert_eq!(intersection_size(x, y, kind).unwrap(), a.nu);
                }
            }
        }
    }

    #[test]
    fn witness_is_first_maximal_pair() {
        let cb = full(4, 2);
        let words = cb.enumerate().unwrap();
        let report = read_coverage(&cb, BallKind::D).unwrap();
        let mut first = None;
        'outer: for i in 0..words.len() {
            for j in i + 1..words.len() {
                if intersection_size(&words[i], &words[j], BallKind::D).unwrap() == report.nu {
                    first = Some((words[i].clone(), words[j].clone()));
                    break 'outer;
                }
            }
        }
        assert_eq!(report.witness, first);
    }

    #[test]
    fn small_codebooks() {
        let one = [Word::zeros(2, 4).unwrap()];
        let r = coverage_of_words(&one, 4, 2, BallKind::D, CoverageMethod::Neighborhood).unwrap();
        assert_eq!((r.nu, r.witness), (0, None));
        let far: Vec<Word> = ["q2:0000", "q2:1111"].iter().map(|s| s.parse().unwrap()).collect();
        for method in [CoverageMethod::PairScan, CoverageMethod::Neighborhood] {
            let r = coverage_of_words(&far, 4, 2, BallKind::D, method).unwrap();
            assert_eq!(r.nu, 0);
            assert_eq!(r.witness, Some((far[0].clone(), far[1].clone())));
        }
    }

    #[test]
    fn verify_examples() {
        for c in 0..3 {
            for d in 0..2 {
                let cd = Codebook::new(CodebookSpec::with_syndrome(Family::Cd, 8, 2, 4, c, d)).unwrap();
                assert!(verify_reconstruction(&cd, 2, BallKind::D).unwrap().passed());
            }
        }
        let c0 = Codebook::new(CodebookSpec::new(Family::C0, 6, 4)).unwrap();
        assert!(verify_reconstruction(&c0, 5, BallKind::SD).unwrap().passed());
        match verify_reconstruction(&full(6, 2), 2, BallKind::D).unwrap() {
            Verification::Fail { x, y, intersection } => {
                assert_eq!(intersection, 2);
                assert_eq!(intersection_size(&x, &y, BallKind::D).unwrap(), 2);
            }
            v => panic!("expected failure, got {v}"),
        }
        assert!(verify_reconstruction(&full(4, 2), 0, BallKind::D).is_err());
    }

    /// Exhaustive maximum independent set over all vertex subsets.
    fn brute_mis(adj: &[Vec<usize>]) -> usize {
        let m = adj.len();
        assert!(m <= 20);
        let masks: Vec<u32> = adj
            .iter()
            .map(|row| row.iter().fold(0u32, |acc, &u| acc | 1 << u))
            .collect();
        (0u32..1 << m)
            .filter(|&s| (0..m).all(|v| s >> v & 1 == 0 || masks[v] & s == 0))
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap()
    }

    fn graph(n: usize, q: u8, n_reads: usize, kind: BallKind) -> Vec<Vec<usize>> {
        let words: Vec<Word> = Word::all(q, n).unwrap().collect();
        conflict_graph(&words, n, q, n_reads, kind).unwrap()
    }

    #[test]
    fn mis_matches_brute_force() {
        for (n, q, n_reads, kind) in [
            (4, 2, 1, BallKind::D),
            (4, 2, 2, BallKind::D),
            (4, 2, 1, BallKind::S),
            (4, 2, 1, BallKind::Edit),
            (4, 2, 3, BallKind::SD),
            (2, 4, 1, BallKind::S),
            (2, 3, 1, BallKind::I),
        ] {
            let g = graph(n, q, n_reads, kind);
            let got = optimal_code_size(n, q, n_reads, kind).unwrap();
            assert_eq!(got.max_code_size, brute_mis(&g), "n={n} q={q} N={n_reads} {kind}");
            let cov = coverage_of_words(&got.witness, n, q, kind, CoverageMethod::PairScan).unwrap();
            assert!(cov.nu < n_reads);
        }
    }

    #[test]
    fn single_deletion_optimum_fixture() {
        // largest binary single-deletion-correcting codes at n = 4..=7
        for (n, size) in [(4, 4), (5, 6), (6, 10), (7, 16)] {
            assert_eq!(optimal_code_size(n, 2, 1, BallKind::D).unwrap().max_code_size, size, "n={n}");
        }
    }

    #[test]
    fn hamming_distance_three_optimum() {
        // A_2(n, 3) for n = 4..=7
        for (n, size) in [(4, 2), (5, 4), (6, 8), (7, 16)] {
            assert_eq!(optimal_code_size(n, 2, 1, BallKind::S).unwrap().max_code_size, size);
        }
        assert_eq!(optimal_code_size(3, 3, 1, BallKind::S).unwrap().max_code_size, 3);
    }

    #[test]
    fn random_graphs_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let m = rng.random_range(1..=14);
            let p: f64 = rng.random_range(0.05..0.9);
            let mut adj = vec![Vec::new(); m];
            for i in 0..m {
                for j in i + 1..m {
                    if rng.random_bool(p) {
                        adj[i].push(j);
                        adj[j].push(i);
                    }
                }
            }
            let set = maximum_independent_set(&adj);
            assert_eq!(set.len(), brute_mis(&adj));
            for &v in &set {
                assert!(adj[v].iter().all(|u| !set.contains(u)));
            }
        }
    }

    #[test]
    fn optimum_is_full_space_past_coverage() {
        let r = optimal_code_size(5, 2, 3, BallKind::D).unwrap();
        assert_eq!((r.max_code_size, r.rho_exact), (32, 0.0));
        assert!(optimal_code_size(15, 2, 1, BallKind::D).is_err());
        assert!(optimal_code_size(4, 2, 0, BallKind::D).is_err());
    }
}
