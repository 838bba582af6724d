//! Packed binary vectors and the Kronecker-power generator matrix `H_N = F^{⊗n}`
//! with kernel `F = [[1, 0], [1, 1]]`.
//!
//! No bit-reversal permutation is applied. Row `m` (1-based) of `H_N` has a one
//! in column `j` exactly when the binary expansion of `j - 1` is a submask of
//! `m - 1`, so row weights are `2^popcount(m - 1)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest Kronecker exponent accepted by [`kronecker_power`].
pub const DEFAULT_MAX_EXPONENT: u32 = 20;

/// Rows are kept packed in memory up to this exponent and computed on demand above it.
pub const MATERIALIZE_MAX_EXPONENT: u32 = 12;

const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// Fixed-length binary vector packed into `u64` words, least significant bit first.
///
/// `get`/`set`/`flip` take 0-based positions like a slice; [`BitVector::support`]
/// reports 1-based column indices. Bits past `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVector {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        v.clear_tail();
        v
    }

    /// Builds a vector from 0/1 values; any nonzero entry counts as one.
    pub fn from_bits<T: Copy + Into<u64>>(bits: &[T]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b.into() != 0 {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector of length `len` with ones at the given 1-based positions.
    pub fn from_support<I: IntoIterator<Item = usize>>(len: usize, support: I) -> Result<Self> {
        let mut v = BitVector::zeros(len);
        for idx in support {
            if idx == 0 || idx > len {
                return Err(Error::Index { index: idx, len });
            }
            v.set(idx - 1, true);
        }
        Ok(v)
    }

    /// Low `len` bits of `value`, bit `t` at position `t`. `len` must not exceed 64.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= WORD_BITS, "from_u64 supports at most 64 bits");
        let mut v = BitVector::zeros(len);
        if len > 0 {
            v.words[0] = value;
            v.clear_tail();
        }
        v
    }

    pub(crate) fn from_words(len: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        let mut v = BitVector { len, words };
        v.clear_tail();
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, pos: usize) -> bool {
        assert!(
            pos < self.len,
            "bit {pos} out of range for length {}",
            self.len
        );
        (self.words[pos / WORD_BITS] >> (pos % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, pos: usize, value: bool) {
        assert!(
            pos < self.len,
            "bit {pos} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (pos % WORD_BITS);
        if value {
            self.words[pos / WORD_BITS] |= mask;
        } else {
            self.words[pos / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, pos: usize) {
        assert!(
            pos < self.len,
            "bit {pos} out of range for length {}",
            self.len
        );
        self.words[pos / WORD_BITS] ^= 1u64 << (pos % WORD_BITS);
    }

    /// Hamming weight.
    #[inline]
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Bitwise exclusive-or of two vectors of equal length.
    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &BitVector) -> Result<()> {
        if self.len != other.len {
            return Err(Error::Shape {
                expected: self.len,
                found: other.len,
            });
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    /// Number of positions set in both vectors.
    pub fn overlap(&self, other: &BitVector) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::Shape {
                expected: self.len,
                found: other.len,
            });
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum())
    }

    /// Iterator over the 0-based positions of set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD_BITS + tz)
                }
            })
        })
    }

    /// 1-based indices of the set bits, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.iter_ones().map(|p| p + 1).collect()
    }

    /// 1-based index of the first set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.iter_ones().next().map(|p| p + 1)
    }

    /// Value of the first 64 positions as an integer (bit `t` = position `t`).
    pub fn low_u64(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector[{}]({})", self.len, self)
    }
}

impl FromStr for BitVector {
    type Err = Error;

    /// Parses a string of `0`/`1` characters, first character = position 0.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut v = BitVector::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => return Err(Error::Format(format!("unexpected bit character {other:?}"))),
            }
        }
        Ok(v)
    }
}

impl Serialize for BitVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// 1-based column indices of row `m` of `H_{2^n}`, ascending.
///
/// Enumerates the submasks of `m - 1`, so the cost is proportional to the row weight.
pub fn row_support(n: u32, m: usize) -> Result<Vec<usize>> {
    let len = block_length(n)?;
    if m == 0 || m > len {
        return Err(Error::Index { index: m, len });
    }
    let mask = m - 1;
    let mut out = Vec::with_capacity(1 << mask.count_ones());
    let mut sub = 0usize;
    loop {
        out.push(sub + 1);
        if sub == mask {
            break;
        }
        // next submask of `mask` in increasing order
        sub = ((sub | !mask).wrapping_add(1)) & mask;
    }
    Ok(out)
}

/// Weight of row `m` (1-based): `2^popcount(m - 1)`.
#[inline]
pub fn row_weight(m: usize) -> usize {
    debug_assert!(m >= 1);
    1usize << (m - 1).count_ones()
}

fn block_length(n: u32) -> Result<usize> {
    if n > DEFAULT_MAX_EXPONENT {
        return Err(Error::Size {
            n,
            cap: DEFAULT_MAX_EXPONENT,
        });
    }
    Ok(1usize << n)
}

/// The generator matrix `H_N = F^{⊗n}`.
#[derive(Clone, Debug)]
pub struct GeneratorMatrix {
    n: u32,
    rows: Option<Vec<BitVector>>,
}

/// Builds `H_N` with the default exponent cap.
pub fn kronecker_power(n: u32) -> Result<GeneratorMatrix> {
    kronecker_power_capped(n, DEFAULT_MAX_EXPONENT)
}

/// Builds `H_N`, rejecting exponents above `cap` (which itself may not exceed
/// [`DEFAULT_MAX_EXPONENT`]).
pub fn kronecker_power_capped(n: u32, cap: u32) -> Result<GeneratorMatrix> {
    let cap = cap.min(DEFAULT_MAX_EXPONENT);
    if n > cap {
        return Err(Error::Size { n, cap });
    }
    let len = 1usize << n;
    let rows = (n <= MATERIALIZE_MAX_EXPONENT)
        .then(|| (1..=len).map(|m| lazy_row(n, m)).collect::<Vec<_>>());
    Ok(GeneratorMatrix { n, rows })
}

fn lazy_row(n: u32, m: usize) -> BitVector {
    let len = 1usize << n;
    // row_support only fails on range errors, which callers have excluded
    BitVector::from_support(len, row_support(n, m).expect("row in range"))
        .expect("support in range")
}

impl GeneratorMatrix {
    #[inline]
    pub fn exponent(&self) -> u32 {
        self.n
    }

    /// Block length `N = 2^n`.
    #[inline]
    pub fn len(&self) -> usize {
        1usize << self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_materialized(&self) -> bool {
        self.rows.is_some()
    }

    /// Row `m`, 1-based.
    pub fn row(&self, m: usize) -> Result<BitVector> {
        let len = self.len();
        if m == 0 || m > len {
            return Err(Error::Index { index: m, len });
        }
        Ok(match &self.rows {
            Some(rows) => rows[m - 1].clone(),
            None => lazy_row(self.n, m),
        })
    }

    pub fn row_support(&self, m: usize) -> Result<Vec<usize>> {
        row_support(self.n, m)
    }

    /// All rows in order (computed on demand for large `N`).
    pub fn rows(&self) -> impl Iterator<Item = BitVector> + '_ {
        (1..=self.len()).map(move |m| self.row(m).expect("row in range"))
    }

    /// `v · H_N` over GF(2).
    pub fn multiply(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.len() {
            return Err(Error::Shape {
                expected: self.len(),
                found: v.len(),
            });
        }
        Ok(polar_transform(self.n, v))
    }
}

/// `v · H_N` for a vector whose length is a power of two, without building `H_N`.
pub fn encode_generator(v: &BitVector) -> Result<BitVector> {
    let len = v.len();
    if !len.is_power_of_two() {
        return Err(Error::Parameter(format!(
            "length {len} is not a power of two"
        )));
    }
    let n = len.trailing_zeros();
    if n > DEFAULT_MAX_EXPONENT {
        return Err(Error::Size {
            n,
            cap: DEFAULT_MAX_EXPONENT,
        });
    }
    Ok(polar_transform(n, v))
}

/// In-place butterfly evaluation of `v · F^{⊗n}`.
///
/// Column `j` of the result is the XOR of `v_m` over all `m` whose index bits are a
/// superset of those of `j`, computed one bit level at a time.
fn polar_transform(n: u32, v: &BitVector) -> BitVector {
    const LOW_MASKS: [u64; 6] = [
        0x5555_5555_5555_5555,
        0x3333_3333_3333_3333,
        0x0f0f_0f0f_0f0f_0f0f,
        0x00ff_00ff_00ff_00ff,
        0x0000_ffff_0000_ffff,
        0x0000_0000_ffff_ffff,
    ];
    let mut words = v.words().to_vec();
    for b in 0..n {
        if b < 6 {
            let shift = 1u32 << b;
            let mask = LOW_MASKS[b as usize];
            for w in words.iter_mut() {
                *w ^= (*w >> shift) & mask;
            }
        } else {
            let stride = 1usize << (b - 6);
            for base in (0..words.len()).step_by(2 * stride) {
                for w in base..base + stride {
                    words[w] ^= words[w + stride];
                }
            }
        }
    }
    BitVector::from_words(v.len(), words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct block construction `H_{2N} = [[H, 0], [H, H]]` as a dense bool matrix.
    fn kron_oracle(n: u32) -> Vec<Vec<bool>> {
        let mut h = vec![vec![true]];
        for _ in 0..n {
            let size = h.len();
            let mut next = vec![vec![false; 2 * size]; 2 * size];
            for i in 0..size {
                for j in 0..size {
                    next[i][j] = h[i][j];
                    next[i + size][j] = h[i][j];
                    next[i + size][j + size] = h[i][j];
                }
            }
            h = next;
        }
        h
    }

    #[test]
    fn kernel_rows() {
        let h = kronecker_power(1).unwrap();
        assert_eq!(h.row(1).unwrap().to_string(), "10");
        assert_eq!(h.row(2).unwrap().to_string(), "11");
    }

    #[test]
    fn trivial_exponent() {
        let h = kronecker_power(0).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h.row(1).unwrap().to_string(), "1");
    }

    #[test]
    fn n2_row_weights() {
        let h = kronecker_power(2).unwrap();
        let weights: Vec<_> = h.rows().map(|r| r.weight()).collect();
        assert_eq!(weights, vec![1, 2, 2, 4]);
    }

    #[test]
    fn matches_block_construction_up_to_n4() {
        for n in 0..=4 {
            let oracle = kron_oracle(n);
            let h = kronecker_power(n).unwrap();
            for (m, row) in h.rows().enumerate() {
                let bits: Vec<bool> = (0..h.len()).map(|j| row.get(j)).collect();
                assert_eq!(bits, oracle[m], "n={n} row={}", m + 1);
            }
        }
    }

    #[test]
    fn row_support_examples() {
        assert_eq!(row_support(5, 17).unwrap(), vec![1, 17]);
        assert_eq!(row_support(5, 32).unwrap(), (1..=32).collect::<Vec<_>>());
        assert_eq!(row_support(5, 18).unwrap(), vec![1, 2, 17, 18]);
        assert!(matches!(row_support(5, 0), Err(Error::Index { .. })));
        assert!(matches!(row_support(5, 33), Err(Error::Index { .. })));
    }

    #[test]
    fn row_weight_formula() {
        for n in 0..=10 {
            let h = kronecker_power(n).unwrap();
            for m in 1..=h.len() {
                assert_eq!(h.row(m).unwrap().weight(), row_weight(m));
            }
        }
        let h = kronecker_power(5).unwrap();
        assert_eq!(h.row(8).unwrap().weight(), 8);
        assert_eq!(h.row(16).unwrap().weight(), 16);
        assert_eq!(BitVector::zeros(32).weight(), 0);
    }

    #[test]
    fn exponent_cap() {
        assert!(matches!(
            kronecker_power(21),
            Err(Error::Size { n: 21, cap: 20 })
        ));
        assert!(matches!(
            kronecker_power_capped(5, 4),
            Err(Error::Size { n: 5, cap: 4 })
        ));
        let big = kronecker_power(16).unwrap();
        assert!(!big.is_materialized());
        assert_eq!(big.row(big.len()).unwrap().weight(), big.len());
    }

    #[test]
    fn xor_examples() {
        let a: BitVector = "1100".parse().unwrap();
        let b: BitVector = "1010".parse().unwrap();
        assert_eq!(a.xor(&b).unwrap().to_string(), "0110");
        assert_eq!(a.xor(&BitVector::zeros(4)).unwrap(), a);
        assert!(matches!(
            a.xor(&BitVector::zeros(5)),
            Err(Error::Shape {
                expected: 4,
                found: 5
            })
        ));

        let h = kronecker_power(5).unwrap();
        let s = h.row(17).unwrap().xor(&h.row(18).unwrap()).unwrap();
        assert_eq!(s.support(), vec![2, 18]);
    }

    #[test]
    fn xor_weight_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let len = rng.gen_range(1..300);
            let a = BitVector::from_bits(&(0..len).map(|_| rng.gen::<bool>()).collect::<Vec<_>>());
            let b = BitVector::from_bits(&(0..len).map(|_| rng.gen::<bool>()).collect::<Vec<_>>());
            let x = a.xor(&b).unwrap();
            assert_eq!(
                x.weight(),
                a.weight() + b.weight() - 2 * a.overlap(&b).unwrap()
            );
        }
    }

    #[test]
    fn butterfly_matches_row_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 0..=9 {
            let h = kronecker_power(n).unwrap();
            for _ in 0..20 {
                let u = BitVector::from_bits(
                    &(0..h.len()).map(|_| rng.gen::<bool>()).collect::<Vec<_>>(),
                );
                let mut expected = BitVector::zeros(h.len());
                for m in u.support() {
                    expected.xor_assign(&h.row(m).unwrap()).unwrap();
                }
                assert_eq!(h.multiply(&u).unwrap(), expected, "n={n}");
            }
        }
    }

    #[test]
    fn tail_bits_stay_clear() {
        let v = BitVector::ones(70);
        assert_eq!(v.weight(), 70);
        assert_eq!(BitVector::from_u64(3, u64::MAX).weight(), 3);
        assert_eq!(BitVector::from_u64(0, u64::MAX).len(), 0);
    }

    #[test]
    fn support_and_first_one() {
        let v = BitVector::from_support(130, [3, 64, 65, 130]).unwrap();
        assert_eq!(v.support(), vec![3, 64, 65, 130]);
        assert_eq!(v.first_one(), Some(3));
        assert_eq!(BitVector::zeros(8).first_one(), None);
        assert!(BitVector::from_support(8, [9]).is_err());
    }
}
