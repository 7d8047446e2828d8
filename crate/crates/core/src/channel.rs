//! Memoryless per-symbol edit channel.
//!
//! Each source symbol undergoes exactly one of: deletion (`p_d`), an insertion
//! of a uniform symbol in front of it (`p_i`), substitution by one of the other
//! `q - 1` symbols (`p_s`), or a faithful copy.

use std::ops::Deref;

use rand::Rng;

use crate::error::{invalid, Result};
use crate::words::{Symbols, Word};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    pub p_d: f64,
    pub p_i: f64,
    pub p_s: f64,
}

impl ChannelParams {
    pub fn new(p_d: f64, p_i: f64, p_s: f64) -> Result<Self> {
        let params = Self { p_d, p_i, p_s };
        params.validate()?;
        Ok(params)
    }

    pub const NOISELESS: ChannelParams = ChannelParams {
        p_d: 0.0,
        p_i: 0.0,
        p_s: 0.0,
    };

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_d", self.p_d), ("p_i", self.p_i), ("p_s", self.p_s)] {
            if !(0.0..=1.0).contains(&p) {
                return invalid(format!("{name} = {p} is not a probability"));
            }
        }
        let total = self.p_d + self.p_i + self.p_s;
        if total > 1.0 + 1e-12 {
            return invalid(format!("p_d + p_i + p_s = {total} exceeds 1"));
        }
        Ok(())
    }
}

/// The reads of one transmission round; duplicates are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReadSet {
    reads: Vec<Word>,
    source_len: usize,
}

impl ReadSet {
    pub fn new(reads: Vec<Word>, source_len: usize) -> Self {
        Self { reads, source_len }
    }

    pub fn n_sys(&self) -> usize {
        self.reads.len()
    }

    pub fn source_len(&self) -> usize {
        self.source_len
    }

    pub fn into_reads(self) -> Vec<Word> {
        self.reads
    }
}

impl Deref for ReadSet {
    type Target = [Word];

    fn deref(&self) -> &[Word] {
        &self.reads
    }
}

/// One pass of `x` through the channel.
pub fn transmit<R: Rng + ?Sized>(x: &Word, params: &ChannelParams, rng: &mut R) -> Result<Word> {
    params.validate()?;
    Ok(transmit_unchecked(x, params, rng))
}

pub(crate) fn transmit_unchecked<R: Rng + ?Sized>(x: &Word, params: &ChannelParams, rng: &mut R) -> Word {
    let q = x.q();
    let (del, ins, sub) = (
        params.p_d,
        params.p_d + params.p_i,
        params.p_d + params.p_i + params.p_s,
    );
    let mut out = Symbols::with_capacity(x.len() + 4);
    for &a in x.symbols() {
        let u: f64 = rng.random();
        if u < del {
            continue;
        } else if u < ins {
            out.push(rng.random_range(0..q));
            out.push(a);
        } else if u < sub {
            let v = rng.random_range(0..q - 1);
            out.push(if v >= a { v + 1 } else { v });
        } else {
            out.push(a);
        }
    }
    Word::from_raw(q, out)
}

/// `n_sys` independent passes of `x` through the channel.
pub fn generate_reads<R: Rng + ?Sized>(
    x: &Word,
    n_sys: usize,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<ReadSet> {
    params.validate()?;
    if n_sys == 0 {
        return invalid("at least one read is required");
    }
    let reads = (0..n_sys).map(|_| transmit_unchecked(x, params, rng)).collect();
    Ok(ReadSet::new(reads, x.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn params_validation() {
        assert!(ChannelParams::new(0.5, 0.5, 0.0).is_ok());
        assert!(ChannelParams::new(0.5, 0.5, 0.1).is_err());
        assert!(ChannelParams::new(-0.1, 0.0, 0.0).is_err());
        assert!(ChannelParams::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn trivial_channels() {
        let x: Word = "q4:0123012301".parse().unwrap();
        let mut r = rng(1);
        assert_eq!(transmit(&x, &ChannelParams::NOISELESS, &mut r).unwrap(), x);
        let erase = ChannelParams::new(1.0, 0.0, 0.0).unwrap();
        assert!(transmit(&x, &erase, &mut r).unwrap().is_empty());
        let reads = generate_reads(&x, 3, &ChannelParams::NOISELESS, &mut r).unwrap();
        assert_eq!(reads.n_sys(), 3);
        assert!(reads.iter().all(|y| *y == x));
        assert!(generate_reads(&x, 0, &ChannelParams::NOISELESS, &mut r).is_err());
    }

    #[test]
    fn substitutions_always_change_the_symbol() {
        let x: Word = "q3:0120120120".parse().unwrap();
        let all_sub = ChannelParams::new(0.0, 0.0, 1.0).unwrap();
        let mut r = rng(2);
        for _ in 0..1000 {
            let y = transmit(&x, &all_sub, &mut r).unwrap();
            assert_eq!(y.len(), x.len());
            assert!(x.symbols().iter().zip(y.symbols()).all(|(a, b)| a != b && *b < 3));
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let x = Word::new(4, (0..40).map(|i| (i * 7 % 4) as u8).collect::<Vec<_>>()).unwrap();
        let p = ChannelParams::new(0.05, 0.05, 0.05).unwrap();
        let a = generate_reads(&x, 10, &p, &mut rng(9)).unwrap();
        let b = generate_reads(&x, 10, &p, &mut rng(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mean_length_matches_closed_form() {
        let n = 30;
        let x = Word::zeros(4, n).unwrap();
        let p = ChannelParams::new(0.1, 0.05, 0.02).unwrap();
        let trials = 100_000;
        let mut r = rng(3);
        let lens: Vec<f64> = (0..trials)
            .map(|_| transmit(&x, &p, &mut r).unwrap().len() as f64)
            .collect();
        let mean = lens.iter().sum::<f64>() / trials as f64;
        let var = lens.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let se = (var / trials as f64).sqrt();
        let expected = n as f64 * (1.0 + p.p_i - p.p_d);
        assert!((mean - expected).abs() < 3.0 * se, "mean {mean}, expected {expected}");
    }

    #[test]
    fn clean_read_fraction() {
        let n = 10;
        let x = Word::new(2, [0, 1, 1, 0, 1, 0, 0, 1, 1, 0]).unwrap();
        // without deletions a read equals x only when no event fired
        let p = ChannelParams::new(0.0, 0.02, 0.03).unwrap();
        let trials = 100_000;
        let mut r = rng(4);
        let clean = (0..trials)
            .filter(|_| transmit(&x, &p, &mut r).unwrap() == x)
            .count() as f64;
        let p0 = (1.0 - p.p_d - p.p_i - p.p_s).powi(n as i32);
        let se = (p0 * (1.0 - p0) / trials as f64).sqrt();
        let frac = clean / trials as f64;
        assert!((frac - p0).abs() < 3.0 * se, "{frac} vs {p0}");
    }

    #[test]
    fn event_frequencies() {
        // tag each event by transmitting single symbols: length 0 = deletion,
        // 2 = insertion, differing symbol = substitution
        let p = ChannelParams::new(0.2, 0.1, 0.3).unwrap();
        let x = Word::new(4, [2]).unwrap();
        let mut r = rng(5);
        let events = 1_000_000;
        let mut counts = [0f64; 4];
        for _ in 0..events {
            let y = transmit(&x, &p, &mut r).unwrap();
            let k = match y.len() {
                0 => 0,
                2 => 1,
                _ if y.symbols()[0] != 2 => 2,
                _ => 3,
            };
            counts[k] += 1.0;
        }
        let expected = [p.p_d, p.p_i, p.p_s, 1.0 - p.p_d - p.p_i - p.p_s];
        let chi2: f64 = counts
            .iter()
            .zip(expected)
            .map(|(o, e)| (o - e * events as f64).powi(2) / (e * events as f64))
            .sum();
        // 3 degrees of freedom, 0.999 quantile
        assert!(chi2 < 16.27, "chi2 = {chi2}");
    }
}
