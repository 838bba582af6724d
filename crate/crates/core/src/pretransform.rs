//! Unit-diagonal upper-triangular pre-transforms `T` and the encoder `X = U · T · H_N`.
//!
//! Only the strictly-upper ones are stored, as 1-based `(row, column)` pairs with
//! `row < column`. The diagonal is implicit, so every `T` is invertible and
//! `U ↦ U · T` keeps the first nonzero position of `U`.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitlinalg::{encode_generator, BitVector};
use crate::code::CodeSpec;
use crate::error::{Error, Result};

/// One parity-check wiring: column `target` of `T` collects the listed source rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParityEquation {
    pub target: usize,
    pub sources: Vec<usize>,
}

/// How a pre-transform was built. Kept for reporting; the entries alone define the matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum TransformKind {
    Identity,
    Custom,
    /// Convolution with coefficients `c_0..c_d`, `c_0 = 1`.
    Pac {
        poly: Vec<u8>,
    },
    /// CRC generator given MSB first (leading one included); `r` = degree.
    Crc {
        poly: Vec<u8>,
        r: usize,
    },
    Pc {
        equations: Vec<ParityEquation>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PreTransform {
    len: usize,
    entries: BTreeSet<(usize, usize)>,
    kind: TransformKind,
}

/// On-disk shape of a pre-transform.
#[derive(Serialize, Deserialize)]
struct TransformDoc {
    #[serde(rename = "N")]
    len: usize,
    kind: TransformKind,
    entries: Vec<[usize; 2]>,
}

fn check_entry(len: usize, i: usize, j: usize) -> Result<()> {
    if i >= j {
        return Err(Error::Triangularity { i, j });
    }
    if i == 0 {
        return Err(Error::Index { index: i, len });
    }
    if j > len {
        return Err(Error::Index { index: j, len });
    }
    Ok(())
}

impl PreTransform {
    pub fn identity(len: usize) -> Self {
        PreTransform {
            len,
            entries: BTreeSet::new(),
            kind: TransformKind::Identity,
        }
    }

    fn from_checked<I>(len: usize, entries: I, kind: TransformKind) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (i, j) in entries {
            check_entry(len, i, j)?;
            if !set.insert((i, j)) {
                return Err(Error::Validation(format!("duplicate entry ({i}, {j})")));
            }
        }
        Ok(PreTransform {
            len,
            entries: set,
            kind,
        })
    }

    /// `T` with ones exactly at the given strictly-upper 1-based positions.
    pub fn custom<I>(len: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_checked(len, entries, TransformKind::Custom)
    }

    /// Upper-triangular Toeplitz `T` with `T[i][i + t] = poly[t]`, truncated at column `len`.
    pub fn pac(len: usize, poly: &[u8]) -> Result<Self> {
        match poly.first() {
            None => return Err(Error::Parameter("empty convolution polynomial".into())),
            Some(&c0) if c0 != 1 => {
                return Err(Error::Parameter(
                    "convolution polynomial must have c_0 = 1 (unit diagonal)".into(),
                ))
            }
            _ => {}
        }
        if let Some(bad) = poly.iter().find(|&&c| c > 1) {
            return Err(Error::Parameter(format!("coefficient {bad} is not binary")));
        }
        let degree = poly.len() - 1;
        if degree >= len.max(1) {
            return Err(Error::Parameter(format!(
                "polynomial degree {degree} must be below the block length {len}"
            )));
        }
        let entries = (1..=len).flat_map(|i| {
            poly.iter()
                .enumerate()
                .skip(1)
                .filter(move |&(t, &c)| c == 1 && i + t <= len)
                .map(move |(t, _)| (i, i + t))
        });
        Self::from_checked(
            len,
            entries,
            TransformKind::Pac {
                poly: poly.to_vec(),
            },
        )
    }

    /// CRC pre-transform: the last `r` information indices of `spec` carry the CRC of the
    /// data bits on the first `K - r` information indices.
    ///
    /// Data bit `t` (0-based, ascending index) is the coefficient of `x^{K-r-1-t}` in the
    /// data polynomial; the first CRC index carries the highest remainder coefficient.
    /// To obtain the CRC-aided code, freeze the CRC positions in `U` (see [`crc_aided`]).
    pub fn crc(spec: &CodeSpec, poly: &[u8]) -> Result<Self> {
        let r = crc_degree(poly)?;
        let k = spec.dimension();
        if k <= r {
            return Err(Error::Parameter(format!(
                "K = {k} must exceed the CRC length {r}"
            )));
        }
        let info = spec.info_set();
        let (data, crc_pos) = info.split_at(k - r);
        let data_len = data.len();
        let mut entries = Vec::new();
        for (t, &row) in data.iter().enumerate() {
            let rem = unit_remainder(r + data_len - 1 - t, poly);
            for (q, &col) in crc_pos.iter().enumerate() {
                if rem[q] == 1 {
                    entries.push((row, col));
                }
            }
        }
        Self::from_checked(
            spec.len(),
            entries,
            TransformKind::Crc {
                poly: poly.to_vec(),
                r,
            },
        )
    }

    /// Parity-check wiring: each equation sets `T[source][target] = 1`.
    pub fn pc(len: usize, equations: &[ParityEquation]) -> Result<Self> {
        let mut targets = BTreeSet::new();
        for eq in equations {
            if !targets.insert(eq.target) {
                return Err(Error::Validation(format!(
                    "duplicate parity target {}",
                    eq.target
                )));
            }
        }
        let entries = equations
            .iter()
            .flat_map(|eq| eq.sources.iter().map(move |&i| (i, eq.target)));
        Self::from_checked(
            len,
            entries,
            TransformKind::Pc {
                equations: equations.to_vec(),
            },
        )
    }

    /// Random strictly-upper part, each entry present with probability `density`.
    pub fn random<R: Rng + ?Sized>(len: usize, density: f64, rng: &mut R) -> Self {
        let mut entries = BTreeSet::new();
        for i in 1..=len {
            for j in i + 1..=len {
                if rng.gen_bool(density) {
                    entries.insert((i, j));
                }
            }
        }
        PreTransform {
            len,
            entries,
            kind: TransformKind::Custom,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn kind(&self) -> &TransformKind {
        &self.kind
    }

    /// Strictly-upper ones, 1-based, sorted by row then column.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries.iter().copied()
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i == j && (1..=self.len).contains(&i) || self.entries.contains(&(i, j))
    }

    pub fn is_identity(&self) -> bool {
        self.entries.is_empty()
    }

    /// Same matrix, regardless of construction kind.
    pub fn same_matrix(&self, other: &PreTransform) -> bool {
        self.len == other.len && self.entries == other.entries
    }

    /// Re-checks that every stored entry is strictly upper-triangular and in range.
    pub fn is_upper_unitriangular(&self) -> bool {
        self.entries
            .iter()
            .all(|&(i, j)| check_entry(self.len, i, j).is_ok())
    }

    /// Row `i` (1-based) of `T` including the diagonal one.
    pub fn row(&self, i: usize) -> Result<BitVector> {
        if i == 0 || i > self.len {
            return Err(Error::Index {
                index: i,
                len: self.len,
            });
        }
        let mut v = BitVector::zeros(self.len);
        v.set(i - 1, true);
        for &(_, j) in self.entries.range((i, 0)..(i + 1, 0)) {
            v.set(j - 1, true);
        }
        Ok(v)
    }

    /// `V = U · T` over GF(2).
    pub fn apply(&self, u: &BitVector) -> Result<BitVector> {
        if u.len() != self.len {
            return Err(Error::Shape {
                expected: self.len,
                found: u.len(),
            });
        }
        let mut v = u.clone();
        for &(i, j) in &self.entries {
            if u.get(i - 1) {
                v.flip(j - 1);
            }
        }
        Ok(v)
    }

    /// Merges the strictly-upper entries of two transforms (symmetric difference is not
    /// taken: an entry present in both stays a one).
    pub fn union(&self, other: &PreTransform) -> Result<PreTransform> {
        if self.len != other.len {
            return Err(Error::Shape {
                expected: self.len,
                found: other.len,
            });
        }
        Ok(PreTransform {
            len: self.len,
            entries: self.entries.union(&other.entries).copied().collect(),
            kind: TransformKind::Custom,
        })
    }

    pub fn to_json(&self) -> String {
        let doc = TransformDoc {
            len: self.len,
            kind: self.kind.clone(),
            entries: self.entries.iter().map(|&(i, j)| [i, j]).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("transform serializes")
    }

    /// Parses and validates a transform document.
    pub fn from_json(s: &str) -> Result<Self> {
        let doc: TransformDoc =
            serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_checked(doc.len, doc.entries.iter().map(|e| (e[0], e[1])), doc.kind)
    }
}

fn crc_degree(poly: &[u8]) -> Result<usize> {
    if poly.len() < 2 {
        return Err(Error::Parameter("CRC polynomial needs degree >= 1".into()));
    }
    if poly[0] != 1 || poly[poly.len() - 1] != 1 {
        return Err(Error::Parameter(
            "CRC polynomial must have leading and constant coefficients equal to one".into(),
        ));
    }
    if let Some(bad) = poly.iter().find(|&&c| c > 1) {
        return Err(Error::Parameter(format!("coefficient {bad} is not binary")));
    }
    Ok(poly.len() - 1)
}

/// Remainder of `x^power mod poly`, MSB first (`r` coefficients, `x^{r-1}` first).
fn unit_remainder(power: usize, poly: &[u8]) -> Vec<u8> {
    let r = poly.len() - 1;
    // register holds the running remainder; start from x^0 = 1
    let mut reg = vec![0u8; r];
    reg[r - 1] = 1;
    for _ in 0..power {
        let carry = reg[0];
        reg.rotate_left(1);
        reg[r - 1] = 0;
        if carry == 1 {
            for (b, &g) in reg.iter_mut().zip(&poly[1..]) {
                *b ^= g;
            }
        }
    }
    reg
}

/// Splits `spec` into the CRC-aided data code (CRC positions frozen) and the CRC transform.
pub fn crc_aided(spec: &CodeSpec, poly: &[u8]) -> Result<(CodeSpec, PreTransform)> {
    let t = PreTransform::crc(spec, poly)?;
    let r = poly.len() - 1;
    let data = spec.info_set()[..spec.dimension() - r].to_vec();
    let data_spec = CodeSpec::new(spec.exponent(), data, spec.family())?;
    Ok((data_spec, t))
}

/// `X = place(msg) · T · H_N`.
pub fn encode(spec: &CodeSpec, t: &PreTransform, msg: &BitVector) -> Result<BitVector> {
    if t.len() != spec.len() {
        return Err(Error::Shape {
            expected: spec.len(),
            found: t.len(),
        });
    }
    let u = spec.place_message(msg)?;
    let v = t.apply(&u)?;
    encode_generator(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitlinalg::kronecker_power;
    use crate::code::rm_construct;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn eq(target: usize, sources: &[usize]) -> ParityEquation {
        ParityEquation {
            target,
            sources: sources.to_vec(),
        }
    }

    #[test]
    fn custom_examples() {
        let t = PreTransform::custom(32, [(8, 17)]).unwrap();
        assert_eq!(t.entries().collect::<Vec<_>>(), vec![(8, 17)]);
        let t2 = PreTransform::custom(32, [(8, 17), (8, 18)]).unwrap();
        assert_eq!(t2.entry_count(), 2);
        assert!(t2.contains(8, 18) && t2.contains(5, 5) && !t2.contains(17, 8));

        let id = PreTransform::custom(8, []).unwrap();
        for value in 0..256u64 {
            let u = BitVector::from_u64(8, value);
            assert_eq!(id.apply(&u).unwrap(), u);
        }
    }

    #[test]
    fn custom_rejects_bad_entries() {
        assert!(matches!(
            PreTransform::custom(8, [(3, 3)]),
            Err(Error::Triangularity { i: 3, j: 3 })
        ));
        assert!(matches!(
            PreTransform::custom(8, [(5, 2)]),
            Err(Error::Triangularity { .. })
        ));
        assert!(matches!(
            PreTransform::custom(8, [(1, 2), (1, 2)]),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            PreTransform::custom(8, [(1, 9)]),
            Err(Error::Index { index: 9, len: 8 })
        ));
    }

    #[test]
    fn pac_examples() {
        assert!(PreTransform::pac(16, &[1]).unwrap().is_identity());
        let t = PreTransform::pac(4, &[1, 1]).unwrap();
        assert_eq!(
            t.entries().collect::<Vec<_>>(),
            vec![(1, 2), (2, 3), (3, 4)]
        );

        let t = PreTransform::pac(8, &[1, 0, 1, 1]).unwrap();
        assert_eq!(t.row(1).unwrap().support(), vec![1, 3, 4]);
        assert_eq!(t.row(6).unwrap().support(), vec![6, 8]);
        assert_eq!(t.row(8).unwrap().support(), vec![8]);

        assert!(PreTransform::pac(8, &[0, 1]).is_err());
        assert!(PreTransform::pac(8, &[]).is_err());
        assert!(PreTransform::pac(2, &[1, 0, 1]).is_err());
    }

    #[test]
    fn pac_matches_convolution() {
        // v_j = sum_t c_t u_{j - t}
        let poly = [1u8, 0, 1, 1, 0, 1, 1];
        let t = PreTransform::pac(32, &poly).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let u = BitVector::from_u64(32, rng.gen::<u64>());
            let v = t.apply(&u).unwrap();
            for j in 0..32 {
                let mut bit = false;
                for (s, &c) in poly.iter().enumerate() {
                    if c == 1 && j >= s {
                        bit ^= u.get(j - s);
                    }
                }
                assert_eq!(v.get(j), bit);
            }
        }
    }

    #[test]
    fn crc_overall_parity() {
        let spec = rm_construct(5, 16).unwrap();
        let t = PreTransform::crc(&spec, &[1, 1]).unwrap();
        let rows: Vec<usize> = t
            .entries()
            .filter(|&(_, j)| j == 32)
            .map(|(i, _)| i)
            .collect();
        let expected: Vec<usize> = spec.info_set()[..15].to_vec();
        assert_eq!(rows, expected);
        assert_eq!(t.entry_count(), 15);
    }

    /// Bitwise CRC register fed with the data bits followed by `r` zeros.
    fn crc_long_division(data: &[u8], poly: &[u8]) -> Vec<u8> {
        let r = poly.len() - 1;
        let mut dividend: Vec<u8> = data.to_vec();
        dividend.extend(std::iter::repeat_n(0, r));
        for i in 0..data.len() {
            if dividend[i] == 1 {
                for (k, &g) in poly.iter().enumerate() {
                    dividend[i + k] ^= g;
                }
            }
        }
        dividend[data.len()..].to_vec()
    }

    #[test]
    fn crc_columns_match_long_division() {
        // x^3 + x + 1 over four data bits
        let poly = [1u8, 0, 1, 1];
        let spec = CodeSpec::custom(3, vec![2, 3, 4, 6, 7, 8, 5]).unwrap();
        let t = PreTransform::crc(&spec, &poly).unwrap();
        let info = spec.info_set();
        let (data, crc) = info.split_at(4);
        for (pos, &row) in data.iter().enumerate() {
            let mut unit = vec![0u8; 4];
            unit[pos] = 1;
            let rem = crc_long_division(&unit, &poly);
            for (q, &col) in crc.iter().enumerate() {
                assert_eq!(t.contains(row, col), rem[q] == 1, "row {row} col {col}");
            }
        }
        // whole-message check through apply
        for value in 0..16u64 {
            let bits: Vec<u8> = (0..4).map(|b| ((value >> b) & 1) as u8).collect();
            let rem = crc_long_division(&bits, &poly);
            let mut u = BitVector::zeros(8);
            for (b, &row) in data.iter().enumerate() {
                u.set(row - 1, bits[b] == 1);
            }
            let v = t.apply(&u).unwrap();
            for (q, &col) in crc.iter().enumerate() {
                assert_eq!(v.get(col - 1), rem[q] == 1);
            }
        }
    }

    #[test]
    fn crc_zero_message_and_errors() {
        let spec = rm_construct(5, 16).unwrap();
        let (data_spec, t) = crc_aided(&spec, &[1, 0, 1, 1]).unwrap();
        assert_eq!(data_spec.dimension(), 13);
        let x = encode(&data_spec, &t, &BitVector::zeros(13)).unwrap();
        assert!(x.is_zero());
        let small = rm_construct(3, 3).unwrap();
        assert!(matches!(
            PreTransform::crc(&small, &[1, 0, 1, 1]),
            Err(Error::Parameter(_))
        ));
        assert!(PreTransform::crc(&spec, &[1]).is_err());
        assert!(PreTransform::crc(&spec, &[1, 0, 0]).is_err());
    }

    #[test]
    fn pc_examples() {
        assert!(PreTransform::pc(32, &[]).unwrap().is_identity());

        let t = PreTransform::pc(32, &[eq(17, &[8, 12])]).unwrap();
        let mut u = BitVector::zeros(32);
        u.set(7, true);
        assert!(t.apply(&u).unwrap().get(16));
        u.set(11, true);
        assert!(!t.apply(&u).unwrap().get(16));

        let pc = PreTransform::pc(32, &[eq(17, &[8]), eq(18, &[8])]).unwrap();
        let custom = PreTransform::custom(32, [(8, 17), (8, 18)]).unwrap();
        assert!(pc.same_matrix(&custom));
        assert_ne!(pc, custom);

        assert!(matches!(
            PreTransform::pc(32, &[eq(8, &[9])]),
            Err(Error::Triangularity { .. })
        ));
        assert!(matches!(
            PreTransform::pc(32, &[eq(17, &[8]), eq(17, &[9])]),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn apply_examples() {
        let t = PreTransform::custom(32, [(8, 17)]).unwrap();
        let mut u = BitVector::zeros(32);
        u.set(7, true);
        assert_eq!(t.apply(&u).unwrap().support(), vec![8, 17]);
        assert!(matches!(
            t.apply(&BitVector::zeros(16)),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn apply_keeps_first_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..1000 {
            let len = 1 << rng.gen_range(1..=7);
            let t = PreTransform::random(len, rng.gen_range(0.0..1.0), &mut rng);
            let u = BitVector::from_bits(&(0..len).map(|_| rng.gen_bool(0.3)).collect::<Vec<_>>());
            assert_eq!(t.apply(&u).unwrap().first_one(), u.first_one());
        }
    }

    #[test]
    fn encode_examples() {
        let spec = rm_construct(5, 16).unwrap();
        let h = kronecker_power(5).unwrap();
        let id = PreTransform::identity(32);
        assert!(encode(&spec, &id, &BitVector::zeros(16)).unwrap().is_zero());

        let unit = BitVector::from_support(16, [1]).unwrap();
        let x = encode(&spec, &id, &unit).unwrap();
        assert_eq!(x, h.row(8).unwrap());
        assert_eq!(x.weight(), 8);

        let t = PreTransform::custom(32, [(8, 17)]).unwrap();
        let x = encode(&spec, &t, &unit).unwrap();
        assert_eq!(x, h.row(8).unwrap().xor(&h.row(17).unwrap()).unwrap());
        assert_eq!(x.weight(), 8);

        assert!(encode(&spec, &PreTransform::identity(16), &unit).is_err());
    }

    #[test]
    fn json_round_trip() {
        let t = PreTransform::pc(32, &[eq(17, &[8, 12]), eq(18, &[8])]).unwrap();
        let text = t.to_json();
        let back = PreTransform::from_json(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_json(), text);

        let bad = r#"{"N": 8, "kind": {"type": "custom"}, "entries": [[4, 2]]}"#;
        assert!(matches!(
            PreTransform::from_json(bad),
            Err(Error::Triangularity { i: 4, j: 2 })
        ));
        assert!(matches!(
            PreTransform::from_json("{"),
            Err(Error::Format(_))
        ));
    }
}
