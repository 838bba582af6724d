//! Exact weight spectra by exhaustive enumeration of all `2^K` messages.
//!
//! Messages are walked in Gray-code order so each step XORs a single generator row
//! (`e_{I_t} · T · H_N`) into the running codeword. The message space can be split
//! into contiguous ranges across worker threads; each range restarts from a directly
//! encoded codeword and per-worker counts are summed, so the result does not depend
//! on the partitioning.

use std::thread;

use serde::Serialize;

use crate::bitlinalg::{encode_generator, BitVector};
use crate::code::CodeSpec;
use crate::error::{Error, Result};
use crate::pretransform::{encode, PreTransform};

/// Largest `K` enumerated unless overridden.
pub const DEFAULT_ENUMERATION_CAP: usize = 26;

/// Hard ceiling for an overridden cap (message indices are `u64`).
pub const MAX_ENUMERATION_CAP: usize = 40;

/// Largest minimum-weight codebook materialized unless overridden.
pub const DEFAULT_CODEBOOK_LIMIT: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationOptions {
    /// Largest dimension accepted.
    pub cap: usize,
    /// Worker threads; `0` and `1` both mean single-threaded.
    pub workers: usize,
    pub codebook_limit: u64,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            cap: DEFAULT_ENUMERATION_CAP,
            workers: 1,
            codebook_limit: DEFAULT_CODEBOOK_LIMIT,
        }
    }
}

impl EnumerationOptions {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    fn check(&self, k: usize) -> Result<()> {
        let cap = self.cap.min(MAX_ENUMERATION_CAP);
        if k > cap {
            return Err(Error::Capacity { k, cap });
        }
        Ok(())
    }
}

/// Codeword count per weight over all `2^K` messages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSpectrum {
    len: usize,
    k: usize,
    counts: Vec<u64>,
}

#[derive(Serialize)]
struct SpectrumDoc {
    #[serde(rename = "N")]
    len: usize,
    #[serde(rename = "K")]
    k: usize,
    dmin: Option<usize>,
    #[serde(rename = "Nmin")]
    nmin: Option<u64>,
    second_least: Option<usize>,
    counts: Vec<[u64; 2]>,
}

impl WeightSpectrum {
    /// Builds a spectrum from raw per-weight counts (index = weight).
    pub fn from_counts(len: usize, k: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != len + 1 {
            return Err(Error::Shape {
                expected: len + 1,
                found: counts.len(),
            });
        }
        Ok(WeightSpectrum { len, k, counts })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dimension(&self) -> usize {
        self.k
    }

    /// Counts indexed by weight, `0..=N`.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, weight: usize) -> u64 {
        self.counts.get(weight).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(weight, count)` for every weight with a positive count.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(w, &c)| (w, c))
    }

    /// Smallest nonzero weight present.
    pub fn dmin(&self) -> Option<usize> {
        self.nonzero().map(|(w, _)| w).find(|&w| w > 0)
    }

    /// Number of codewords of weight `d_min`.
    pub fn nmin(&self) -> Option<u64> {
        self.dmin().map(|d| self.counts[d])
    }

    /// Next weight above `d_min` with a positive count.
    pub fn second_least(&self) -> Option<usize> {
        let d = self.dmin()?;
        self.nonzero().map(|(w, _)| w).find(|&w| w > d)
    }

    /// True when every weight present is a multiple of `d`.
    pub fn weights_divisible_by(&self, d: usize) -> bool {
        self.nonzero().all(|(w, _)| w % d == 0)
    }

    fn doc(&self) -> SpectrumDoc {
        SpectrumDoc {
            len: self.len,
            k: self.k,
            dmin: self.dmin(),
            nmin: self.nmin(),
            second_least: self.second_least(),
            counts: self.nonzero().map(|(w, c)| [w as u64, c]).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.doc()).expect("spectrum serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.doc()).expect("spectrum serializes")
    }

    /// `weight,count` rows for every weight with a positive count.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("weight,count\n");
        for (w, c) in self.nonzero() {
            out.push_str(&format!("{w},{c}\n"));
        }
        out
    }
}

/// Packed generator rows `e_{I_t} · T · H_N`, one per information bit.
struct Generator {
    len: usize,
    k: usize,
    words: usize,
    rows: Vec<u64>,
}

impl Generator {
    fn new(spec: &CodeSpec, t: &PreTransform) -> Result<Self> {
        if t.len() != spec.len() {
            return Err(Error::Shape {
                expected: spec.len(),
                found: t.len(),
            });
        }
        let mut rows = Vec::new();
        let mut words = 0;
        for &i in spec.info_set() {
            let g = encode_generator(&t.row(i)?)?;
            words = g.words().len();
            rows.extend_from_slice(g.words());
        }
        Ok(Generator {
            len: spec.len(),
            k: spec.dimension(),
            words,
            rows,
        })
    }

    #[inline]
    fn row(&self, t: usize) -> &[u64] {
        &self.rows[t * self.words..(t + 1) * self.words]
    }

    fn encode_value(&self, msg: u64) -> Vec<u64> {
        let mut cw = vec![0u64; self.words];
        for t in 0..self.k {
            if (msg >> t) & 1 == 1 {
                for (c, r) in cw.iter_mut().zip(self.row(t)) {
                    *c ^= r;
                }
            }
        }
        cw
    }

    /// Visits `(message, weight)` for Gray-code ranks `start..end`.
    fn walk<F: FnMut(u64, usize)>(&self, start: u64, end: u64, mut visit: F) {
        if start >= end {
            return;
        }
        let mut msg = gray(start);
        if self.words == 1 {
            let mut cw = self.encode_value(msg)[0];
            let rows = &self.rows;
            let mut rank = start;
            loop {
                visit(msg, cw.count_ones() as usize);
                rank += 1;
                if rank == end {
                    break;
                }
                let bit = rank.trailing_zeros() as usize;
                msg ^= 1 << bit;
                cw ^= rows[bit];
            }
        } else {
            let mut cw = self.encode_value(msg);
            let mut rank = start;
            loop {
                visit(msg, cw.iter().map(|w| w.count_ones() as usize).sum());
                rank += 1;
                if rank == end {
                    break;
                }
                let bit = rank.trailing_zeros() as usize;
                msg ^= 1 << bit;
                for (c, r) in cw.iter_mut().zip(self.row(bit)) {
                    *c ^= r;
                }
            }
        }
    }

    /// Runs `job` over `workers` contiguous rank ranges and returns the per-range results
    /// in range order.
    fn partitioned<T, F>(&self, workers: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, u64) -> T + Sync,
    {
        let total = 1u64 << self.k;
        let workers = (workers.max(1) as u64).min(total);
        if workers == 1 {
            return vec![job(0, total)];
        }
        let chunk = total.div_ceil(workers);
        thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let start = w * chunk;
                    let end = ((w + 1) * chunk).min(total);
                    let job = &job;
                    scope.spawn(move || job(start, end))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("enumeration worker panicked"))
                .collect()
        })
    }
}

#[inline]
fn gray(rank: u64) -> u64 {
    rank ^ (rank >> 1)
}

/// Exact spectrum of `U · T · H_N` with default options.
pub fn enumerate_spectrum(spec: &CodeSpec, t: &PreTransform) -> Result<WeightSpectrum> {
    enumerate_spectrum_with(spec, t, &EnumerationOptions::default())
}

pub fn enumerate_spectrum_with(
    spec: &CodeSpec,
    t: &PreTransform,
    opts: &EnumerationOptions,
) -> Result<WeightSpectrum> {
    opts.check(spec.dimension())?;
    let gen = Generator::new(spec, t)?;
    let parts = gen.partitioned(opts.workers, |start, end| {
        let mut counts = vec![0u64; gen.len + 1];
        gen.walk(start, end, |_, w| counts[w] += 1);
        counts
    });
    let mut counts = vec![0u64; gen.len + 1];
    for part in parts {
        for (c, p) in counts.iter_mut().zip(part) {
            *c += p;
        }
    }
    WeightSpectrum::from_counts(gen.len, gen.k, counts)
}

/// Reference enumeration that re-encodes every message from scratch
/// (placement, `apply`, butterfly transform). Slow; used to cross-check the Gray walk.
pub fn enumerate_spectrum_direct(
    spec: &CodeSpec,
    t: &PreTransform,
    cap: usize,
) -> Result<WeightSpectrum> {
    EnumerationOptions::default()
        .with_cap(cap)
        .check(spec.dimension())?;
    let k = spec.dimension();
    let mut counts = vec![0u64; spec.len() + 1];
    for value in 0..(1u64 << k) {
        let msg = message_from_value(k, value);
        counts[encode(spec, t, &msg)?.weight()] += 1;
    }
    WeightSpectrum::from_counts(spec.len(), k, counts)
}

// K is bounded by MAX_ENUMERATION_CAP < 64 on every path that reaches here
fn message_from_value(k: usize, value: u64) -> BitVector {
    BitVector::from_u64(k, value)
}

/// A minimum-weight codeword together with the message that produces it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodebookEntry {
    /// Message bits as an integer, bit `t` = message bit `t`.
    pub message_value: u64,
    /// `U` before the pre-transform.
    pub u: BitVector,
    pub codeword: BitVector,
}

/// All codewords of weight `d_min`, ordered by message value.
#[derive(Clone, Debug)]
pub struct MinWeightCodebook {
    len: usize,
    dmin: usize,
    entries: Vec<CodebookEntry>,
}

impl MinWeightCodebook {
    /// Builds a codebook from explicit entries; every codeword must have weight `dmin`.
    pub fn from_entries(len: usize, dmin: usize, entries: Vec<CodebookEntry>) -> Result<Self> {
        for e in &entries {
            if e.codeword.len() != len || e.u.len() != len {
                return Err(Error::Shape {
                    expected: len,
                    found: e.codeword.len(),
                });
            }
            if e.codeword.weight() != dmin {
                return Err(Error::Validation(format!(
                    "codeword of weight {} in a weight-{dmin} codebook",
                    e.codeword.weight()
                )));
            }
        }
        Ok(MinWeightCodebook { len, dmin, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn block_length(&self) -> usize {
        self.len
    }

    pub fn dmin(&self) -> usize {
        self.dmin
    }

    pub fn entries(&self) -> &[CodebookEntry] {
        &self.entries
    }
}

pub fn min_weight_codebook(spec: &CodeSpec, t: &PreTransform) -> Result<MinWeightCodebook> {
    min_weight_codebook_with(spec, t, &EnumerationOptions::default())
}

pub fn min_weight_codebook_with(
    spec: &CodeSpec,
    t: &PreTransform,
    opts: &EnumerationOptions,
) -> Result<MinWeightCodebook> {
    let spectrum = enumerate_spectrum_with(spec, t, opts)?;
    let dmin = spectrum
        .dmin()
        .ok_or_else(|| Error::Consistency("code has no nonzero codeword".into()))?;
    let nmin = spectrum.count(dmin);
    if nmin > opts.codebook_limit {
        return Err(Error::CodebookTooLarge {
            nmin,
            limit: opts.codebook_limit,
        });
    }
    let gen = Generator::new(spec, t)?;
    let parts = gen.partitioned(opts.workers, |start, end| {
        let mut found = Vec::new();
        gen.walk(start, end, |msg, w| {
            if w == dmin {
                found.push(msg);
            }
        });
        found
    });
    let mut messages: Vec<u64> = parts.into_iter().flatten().collect();
    messages.sort_unstable();
    if messages.len() as u64 != nmin {
        return Err(Error::Consistency(format!(
            "collected {} minimum-weight codewords, spectrum reports {nmin}",
            messages.len()
        )));
    }
    let k = spec.dimension();
    let entries = messages
        .into_iter()
        .map(|value| {
            let u = spec.place_message(&message_from_value(k, value))?;
            let codeword = BitVector::from_words(gen.len, gen.encode_value(value));
            Ok(CodebookEntry {
                message_value: value,
                u,
                codeword,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MinWeightCodebook {
        len: gen.len,
        dmin,
        entries,
    })
}

/// Outcome of comparing `d_min` with and without a pre-transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DminReport {
    pub dmin_base: usize,
    pub dmin_t: usize,
    pub holds: bool,
}

pub fn verify_dmin_preserved(spec: &CodeSpec, t: &PreTransform) -> Result<DminReport> {
    verify_dmin_preserved_with(spec, t, &EnumerationOptions::default())
}

pub fn verify_dmin_preserved_with(
    spec: &CodeSpec,
    t: &PreTransform,
    opts: &EnumerationOptions,
) -> Result<DminReport> {
    let base = enumerate_spectrum_with(spec, &PreTransform::identity(spec.len()), opts)?;
    let with_t = enumerate_spectrum_with(spec, t, opts)?;
    let missing = || Error::Consistency("code has no nonzero codeword".into());
    let dmin_base = base.dmin().ok_or_else(missing)?;
    let dmin_t = with_t.dmin().ok_or_else(missing)?;
    Ok(DminReport {
        dmin_base,
        dmin_t,
        holds: dmin_t >= dmin_base,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::rm_construct;

    #[test]
    fn rm_32_16_baseline() {
        let spec = rm_construct(5, 16).unwrap();
        let s = enumerate_spectrum(&spec, &PreTransform::identity(32)).unwrap();
        assert_eq!(s.dmin(), Some(8));
        assert_eq!(s.nmin(), Some(620));
        assert_eq!(s.second_least(), Some(12));
        assert_eq!(s.total(), 1 << 16);
        assert_eq!(s.count(0), 1);
        for w in 0..=32 {
            assert_eq!(s.count(w), s.count(32 - w));
        }
        assert!(s.weights_divisible_by(4));
    }

    #[test]
    fn full_space_n2() {
        let spec = rm_construct(1, 2).unwrap();
        let s = enumerate_spectrum(&spec, &PreTransform::identity(2)).unwrap();
        assert_eq!(s.counts(), &[1, 2, 1]);
        // nonzero weights of the whole space {00, 10, 01, 11}
        assert_eq!(
            s.nonzero().collect::<Vec<_>>(),
            vec![(0, 1), (1, 2), (2, 1)]
        );
    }

    #[test]
    fn capacity_error() {
        let spec = rm_construct(5, 27).unwrap();
        assert!(matches!(
            enumerate_spectrum(&spec, &PreTransform::identity(32)),
            Err(Error::Capacity { k: 27, cap: 26 })
        ));
        let small = rm_construct(4, 8).unwrap();
        assert!(matches!(
            enumerate_spectrum_with(
                &small,
                &PreTransform::identity(16),
                &EnumerationOptions::default().with_cap(4)
            ),
            Err(Error::Capacity { k: 8, cap: 4 })
        ));
    }

    #[test]
    fn gray_walk_matches_direct() {
        let spec = rm_construct(4, 8).unwrap();
        let t = PreTransform::pac(16, &[1, 0, 1, 1, 0, 1, 1]).unwrap();
        assert_eq!(
            enumerate_spectrum(&spec, &t).unwrap(),
            enumerate_spectrum_direct(&spec, &t, 26).unwrap()
        );
    }

    #[test]
    fn multi_word_codewords() {
        let spec = rm_construct(7, 8).unwrap();
        let s = enumerate_spectrum(&spec, &PreTransform::identity(128)).unwrap();
        assert_eq!(
            s,
            enumerate_spectrum_direct(&spec, &PreTransform::identity(128), 26).unwrap()
        );
        assert_eq!(s.dmin(), Some(64));
    }

    #[test]
    fn workers_do_not_change_counts() {
        let spec = rm_construct(5, 16).unwrap();
        let t = PreTransform::custom(32, [(8, 17), (12, 18)]).unwrap();
        let one = enumerate_spectrum(&spec, &t).unwrap();
        for workers in [2, 3, 7, 64] {
            let opts = EnumerationOptions::default().with_workers(workers);
            assert_eq!(enumerate_spectrum_with(&spec, &t, &opts).unwrap(), one);
        }
    }

    #[test]
    fn codebook_examples() {
        let spec = rm_construct(5, 16).unwrap();
        let cb = min_weight_codebook(&spec, &PreTransform::identity(32)).unwrap();
        assert_eq!(cb.len(), 620);
        assert_eq!(cb.dmin(), 8);
        assert!(cb
            .entries()
            .windows(2)
            .all(|w| w[0].message_value < w[1].message_value));

        let t = PreTransform::custom(32, [(8, 17)]).unwrap();
        assert_eq!(min_weight_codebook(&spec, &t).unwrap().len(), 492);

        let tiny = CodeSpec::custom(1, vec![2]).unwrap();
        let cb = min_weight_codebook(&tiny, &PreTransform::identity(2)).unwrap();
        assert_eq!(cb.len(), 1);
        assert_eq!(cb.entries()[0].message_value, 1);
        assert_eq!(cb.entries()[0].codeword.to_string(), "11");
    }

    #[test]
    fn codebook_entries_re_encode() {
        let spec = rm_construct(4, 8).unwrap();
        let t = PreTransform::custom(16, [(8, 9)]).unwrap();
        let cb =
            min_weight_codebook_with(&spec, &t, &EnumerationOptions::default().with_workers(3))
                .unwrap();
        for e in cb.entries() {
            let msg = BitVector::from_u64(8, e.message_value);
            assert_eq!(encode(&spec, &t, &msg).unwrap(), e.codeword);
            assert_eq!(spec.place_message(&msg).unwrap(), e.u);
        }
    }

    #[test]
    fn codebook_guard() {
        let spec = rm_construct(5, 16).unwrap();
        let opts = EnumerationOptions {
            codebook_limit: 100,
            ..Default::default()
        };
        assert!(matches!(
            min_weight_codebook_with(&spec, &PreTransform::identity(32), &opts),
            Err(Error::CodebookTooLarge {
                nmin: 620,
                limit: 100
            })
        ));
    }

    #[test]
    fn verify_examples() {
        let spec = rm_construct(5, 16).unwrap();
        let t = PreTransform::custom(32, [(8, 17)]).unwrap();
        assert_eq!(
            verify_dmin_preserved(&spec, &t).unwrap(),
            DminReport {
                dmin_base: 8,
                dmin_t: 8,
                holds: true
            }
        );
        let r = verify_dmin_preserved(&spec, &PreTransform::identity(32)).unwrap();
        assert!(r.holds && r.dmin_base == r.dmin_t);
    }

    #[test]
    fn serialization() {
        let spec = rm_construct(5, 16).unwrap();
        let s = enumerate_spectrum(&spec, &PreTransform::identity(32)).unwrap();
        let json = s.to_json();
        assert!(json.contains("\"Nmin\": 620"));
        assert!(json.contains("\"second_least\": 12"));
        let csv = s.to_csv();
        assert!(csv.starts_with("weight,count\n0,1\n8,620\n12,"));
        assert_eq!(csv.lines().count(), 1 + s.nonzero().count());
    }
}
