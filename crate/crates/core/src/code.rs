//! Information-set construction for RM and polar codes, and message placement.

use serde::{Deserialize, Serialize};

use crate::bitlinalg::{row_weight, BitVector, DEFAULT_MAX_EXPONENT};
use crate::error::{Error, Result};

/// How the information set was chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Rm,
    Polar,
    Custom,
}

/// A length-`2^n`, dimension-`K` code described by its sorted 1-based information set.
/// Every other position is frozen to zero in `U`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CodeSpec {
    n: u32,
    #[serde(rename = "K")]
    k: usize,
    family: Family,
    info_set: Vec<usize>,
}

#[derive(Deserialize)]
struct RawCodeSpec {
    n: u32,
    #[serde(rename = "K")]
    k: usize,
    family: Family,
    info_set: Vec<usize>,
}

impl<'de> Deserialize<'de> for CodeSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawCodeSpec::deserialize(d)?;
        let spec =
            CodeSpec::new(raw.n, raw.info_set, raw.family).map_err(serde::de::Error::custom)?;
        if spec.k != raw.k {
            return Err(serde::de::Error::custom(format!(
                "K = {} disagrees with an information set of size {}",
                raw.k, spec.k
            )));
        }
        Ok(spec)
    }
}

fn check_dimension(n: u32, k: usize) -> Result<usize> {
    if n > DEFAULT_MAX_EXPONENT {
        return Err(Error::Size {
            n,
            cap: DEFAULT_MAX_EXPONENT,
        });
    }
    let len = 1usize << n;
    if k == 0 || k > len {
        return Err(Error::Parameter(format!("K = {k} must lie in 1..={len}")));
    }
    Ok(len)
}

impl CodeSpec {
    /// Validates and builds a spec from an explicit (not necessarily sorted) information set.
    pub fn new(n: u32, mut info_set: Vec<usize>, family: Family) -> Result<Self> {
        let len = check_dimension(n, info_set.len())?;
        info_set.sort_unstable();
        if let Some(&bad) = info_set.iter().find(|&&i| i == 0 || i > len) {
            return Err(Error::Index { index: bad, len });
        }
        if info_set.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation("duplicate information index".into()));
        }
        Ok(CodeSpec {
            n,
            k: info_set.len(),
            family,
            info_set,
        })
    }

    pub fn custom(n: u32, info_set: Vec<usize>) -> Result<Self> {
        CodeSpec::new(n, info_set, Family::Custom)
    }

    #[inline]
    pub fn exponent(&self) -> u32 {
        self.n
    }

    /// Block length `N`.
    #[inline]
    pub fn len(&self) -> usize {
        1usize << self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Dimension `K`.
    #[inline]
    pub fn dimension(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn family(&self) -> Family {
        self.family
    }

    /// Ascending 1-based information indices.
    #[inline]
    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn is_info(&self, index: usize) -> bool {
        self.info_set.binary_search(&index).is_ok()
    }

    pub fn is_frozen(&self, index: usize) -> bool {
        (1..=self.len()).contains(&index) && !self.is_info(index)
    }

    /// Ascending 1-based frozen indices (complement of the information set).
    pub fn frozen_set(&self) -> Vec<usize> {
        (1..=self.len()).filter(|&i| !self.is_info(i)).collect()
    }

    /// Minimum row weight over the information set, the distance of the untransformed code.
    pub fn min_info_row_weight(&self) -> usize {
        self.info_set
            .iter()
            .map(|&m| row_weight(m))
            .min()
            .unwrap_or(0)
    }

    /// `U`: message bits at the information positions in ascending order, zeros elsewhere.
    pub fn place_message(&self, msg: &BitVector) -> Result<BitVector> {
        if msg.len() != self.k {
            return Err(Error::Shape {
                expected: self.k,
                found: msg.len(),
            });
        }
        let mut u = BitVector::zeros(self.len());
        for t in msg.iter_ones() {
            u.set(self.info_set[t] - 1, true);
        }
        Ok(u)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("code spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))
    }
}

/// Takes the `k` best indices under `better` (a strict "is more preferred" order) and sorts them.
fn select_top(
    len: usize,
    k: usize,
    mut better: impl FnMut(usize, usize) -> std::cmp::Ordering,
) -> Vec<usize> {
    let mut order: Vec<usize> = (1..=len).collect();
    order.sort_by(|&a, &b| better(a, b));
    let mut chosen = order[..k].to_vec();
    chosen.sort_unstable();
    chosen
}

/// Reed-Muller style selection: the `k` rows of largest weight, ties to the larger index.
pub fn rm_construct(n: u32, k: usize) -> Result<CodeSpec> {
    let len = check_dimension(n, k)?;
    let info = select_top(len, k, |a, b| {
        row_weight(b).cmp(&row_weight(a)).then(b.cmp(&a))
    });
    CodeSpec::new(n, info, Family::Rm)
}

/// Default erasure probability for [`polar_construct`].
pub const DEFAULT_ERASURE_PROB: f64 = 0.5;

/// Bhattacharyya parameters of the `2^n` synthetic channels of a BEC(`erasure_prob`),
/// in the natural (non bit-reversed) index order of `F^{⊗n}`.
pub fn bec_bhattacharyya(n: u32, erasure_prob: f64) -> Vec<f64> {
    let mut z = vec![erasure_prob];
    for _ in 0..n {
        z = z.iter().flat_map(|&v| [2.0 * v - v * v, v * v]).collect();
    }
    z
}

/// Polar selection: the `k` channels with the smallest BEC Bhattacharyya parameter,
/// ties to the larger index.
pub fn polar_construct(n: u32, k: usize, erasure_prob: f64) -> Result<CodeSpec> {
    let len = check_dimension(n, k)?;
    if !(erasure_prob > 0.0 && erasure_prob < 1.0) {
        return Err(Error::Parameter(format!(
            "erasure probability {erasure_prob} must lie in (0, 1)"
        )));
    }
    let z = bec_bhattacharyya(n, erasure_prob);
    let info = select_top(len, k, |a, b| z[a - 1].total_cmp(&z[b - 1]).then(b.cmp(&a)));
    CodeSpec::new(n, info, Family::Polar)
}
