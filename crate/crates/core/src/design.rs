//! Pre-transform design that lowers the number of minimum-weight codewords.
//!
//! A designed `T` has a single off-diagonal row: information index `I` is wired to a
//! set of frozen columns `C`, all greater than `I`. Every message with `u_I = 1` then
//! has its codeword XORed with `c = ⊕_{j ∈ C} h_j`, while messages with `u_I = 0` keep
//! theirs. If every codeword outside the minimum-weight set is heavier than
//! `d_min + w(c)`, only minimum-weight codewords can change class, and the new count is
//! `N_min - w` where `w` counts minimum-weight codewords with `u_I = 1` that `c` pushes
//! above `d_min`.
//!
//! [`theorem2_design`] fixes `C` and requires `w(c) = 2`; [`theorem3_search`] enumerates
//! small frozen subsets with `0 < w(c) <= p`. Both verify the prediction by
//! re-enumerating the designed code.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::bitlinalg::{encode_generator, BitVector};
use crate::code::CodeSpec;
use crate::error::{Error, Result};
use crate::pretransform::PreTransform;
use crate::spectrum::{
    enumerate_spectrum_with, min_weight_codebook_with, EnumerationOptions, MinWeightCodebook,
    WeightSpectrum,
};

/// XOR of a set of rows of `H_N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Combination {
    /// 1-based row indices, ascending.
    pub columns: Vec<usize>,
    /// 1-based support of the XOR, ascending.
    pub support: Vec<usize>,
    pub weight: usize,
}

/// XOR of rows `columns` of `H_{2^n}`, with its support and weight.
pub fn combination_support(n: u32, columns: &[usize]) -> Result<Combination> {
    if columns.is_empty() {
        return Err(Error::Parameter("empty column set".into()));
    }
    let len = 1usize << n;
    let set: BTreeSet<usize> = columns.iter().copied().collect();
    if set.len() != columns.len() {
        return Err(Error::Validation("duplicate column in combination".into()));
    }
    if let Some(&bad) = set.iter().find(|&&c| c == 0 || c > len) {
        return Err(Error::Index { index: bad, len });
    }
    let v = combination_vector(len, set.iter().copied())?;
    Ok(Combination {
        columns: set.into_iter().collect(),
        support: v.support(),
        weight: v.weight(),
    })
}

fn combination_vector<I: IntoIterator<Item = usize>>(len: usize, columns: I) -> Result<BitVector> {
    let u = BitVector::from_support(len, columns)?;
    encode_generator(&u)
}

/// How many minimum-weight codewords with `u_I = 1` leave the minimum set under a
/// combination.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternCount {
    pub info_index: usize,
    pub columns: Vec<usize>,
    pub support: Vec<usize>,
    pub w: u64,
}

/// Counts the `(0, 0)` patterns on the weight-2 support `{a, b}` among codewords with
/// `u_I = 1`. A `(1, 1)` pattern would give a codeword of weight `d_min - 2` after the
/// design and is reported as a consistency failure.
pub fn count_pattern(
    codebook: &MinWeightCodebook,
    info_index: usize,
    combination: &Combination,
) -> Result<PatternCount> {
    let len = codebook.block_length();
    if info_index == 0 || info_index > len {
        return Err(Error::Index {
            index: info_index,
            len,
        });
    }
    let [a, b] = combination.support[..] else {
        return Err(Error::Parameter(format!(
            "pattern counting needs a weight-2 support, got weight {}",
            combination.support.len()
        )));
    };
    let mut w = 0;
    for e in codebook.entries() {
        if !e.u.get(info_index - 1) {
            continue;
        }
        match (e.codeword.get(a - 1), e.codeword.get(b - 1)) {
            (false, false) => w += 1,
            (true, true) => {
                return Err(Error::Consistency(format!(
                    "minimum-weight codeword (message {}) has ones at both {a} and {b} with u_{info_index} = 1",
                    e.message_value
                )))
            }
            _ => {}
        }
    }
    Ok(PatternCount {
        info_index,
        columns: combination.columns.clone(),
        support: combination.support.clone(),
        w,
    })
}

/// General count for any support: codewords with `u_I = 1` whose XOR with the
/// combination is heavier than `d_min`. A lighter result is a consistency failure.
fn count_leaving(
    codebook: &MinWeightCodebook,
    info_index: usize,
    combination: &Combination,
    vector: &BitVector,
) -> Result<PatternCount> {
    let dmin = codebook.dmin();
    let mut w = 0;
    for e in codebook.entries() {
        if !e.u.get(info_index - 1) {
            continue;
        }
        let moved = dmin + combination.weight - 2 * e.codeword.overlap(vector)?;
        if moved < dmin {
            return Err(Error::Consistency(format!(
                "combination {:?} lowers message {} below d_min",
                combination.columns, e.message_value
            )));
        }
        if moved > dmin {
            w += 1;
        }
    }
    Ok(PatternCount {
        info_index,
        columns: combination.columns.clone(),
        support: combination.support.clone(),
        w,
    })
}

/// Distance profile of the untransformed code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Baseline {
    pub dmin: usize,
    #[serde(rename = "Nmin")]
    pub nmin: u64,
    pub second_least: Option<usize>,
}

impl Baseline {
    fn from_spectrum(s: &WeightSpectrum) -> Result<Self> {
        let dmin = s
            .dmin()
            .ok_or_else(|| Error::Consistency("code has no nonzero codeword".into()))?;
        Ok(Baseline {
            dmin,
            nmin: s.count(dmin),
            second_least: s.second_least(),
        })
    }

    /// Requires every non-minimum codeword to be heavier than `d_min + margin`.
    fn require_gap(&self, margin: usize) -> Result<()> {
        let required = self.dmin + margin;
        match self.second_least {
            Some(s) if s <= required => Err(Error::Precondition {
                dmin: self.dmin,
                second_least: self.second_least,
                required,
            }),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum DesignMethod {
    /// Fixed frozen column set with a weight-2 combination.
    Theorem2,
    /// Search over frozen subsets with combination weight at most `p`.
    Theorem3 { p: usize, max_combo_size: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignResult {
    pub method: DesignMethod,
    pub baseline: Baseline,
    /// Every `(information index, combination)` pair examined, in search order.
    pub wj_table: Vec<PatternCount>,
    /// Selected pair, or `None` when no valid combination exists.
    pub chosen: Option<PatternCount>,
    pub transform: PreTransform,
    pub predicted_nmin: u64,
    /// Count at the baseline `d_min` in the re-enumerated designed code.
    pub verified_nmin: u64,
    pub verified_dmin: usize,
}

impl DesignResult {
    pub fn prediction_exact(&self) -> bool {
        self.predicted_nmin == self.verified_nmin
    }

    pub fn dmin_preserved(&self) -> bool {
        self.verified_dmin == self.baseline.dmin
    }

    /// Table rows for one information index.
    pub fn rows_for(&self, info_index: usize) -> impl Iterator<Item = &PatternCount> {
        self.wj_table
            .iter()
            .filter(move |p| p.info_index == info_index)
    }

    pub fn to_json_value(&self, spec: &CodeSpec) -> serde_json::Value {
        let transform: serde_json::Value =
            serde_json::from_str(&self.transform.to_json()).expect("transform document is JSON");
        serde_json::json!({
            "N": spec.len(),
            "K": spec.dimension(),
            "info_set": spec.info_set(),
            "method": self.method,
            "baseline": self.baseline,
            "wj_table": self.wj_table,
            "chosen": self.chosen,
            "predicted_Nmin": self.predicted_nmin,
            "verified_Nmin": self.verified_nmin,
            "verified_dmin": self.verified_dmin,
            "prediction_exact": self.prediction_exact(),
            "transform": transform,
        })
    }

    pub fn to_json(&self, spec: &CodeSpec) -> String {
        serde_json::to_string_pretty(&self.to_json_value(spec)).expect("design serializes")
    }
}

fn baseline_of(spec: &CodeSpec, opts: &EnumerationOptions) -> Result<Baseline> {
    let s = enumerate_spectrum_with(spec, &PreTransform::identity(spec.len()), opts)?;
    Baseline::from_spectrum(&s)
}

/// Picks the largest `w`; ties go to the earlier entry, so the table order encodes the
/// tie-break (ascending information index, then lexicographic column set).
fn pick_best(table: &[PatternCount]) -> Option<PatternCount> {
    let mut best: Option<&PatternCount> = None;
    for p in table {
        if best.is_none_or(|b| p.w > b.w) {
            best = Some(p);
        }
    }
    best.cloned()
}

fn finish(
    spec: &CodeSpec,
    method: DesignMethod,
    baseline: Baseline,
    wj_table: Vec<PatternCount>,
    chosen: Option<PatternCount>,
    opts: &EnumerationOptions,
) -> Result<DesignResult> {
    let transform = match &chosen {
        Some(p) => PreTransform::custom(spec.len(), p.columns.iter().map(|&c| (p.info_index, c)))?,
        None => PreTransform::identity(spec.len()),
    };
    let predicted_nmin = baseline.nmin - chosen.as_ref().map_or(0, |p| p.w);
    let designed = enumerate_spectrum_with(spec, &transform, opts)?;
    let verified_dmin = designed
        .dmin()
        .ok_or_else(|| Error::Consistency("designed code has no nonzero codeword".into()))?;
    Ok(DesignResult {
        method,
        baseline,
        wj_table,
        chosen,
        transform,
        predicted_nmin,
        verified_nmin: designed.count(baseline.dmin),
        verified_dmin,
    })
}

pub fn theorem2_design(spec: &CodeSpec, columns: &[usize]) -> Result<DesignResult> {
    theorem2_design_with(spec, columns, &EnumerationOptions::default())
}

/// Wires the best information index below `min(columns)` to the frozen `columns`,
/// whose row combination must have weight 2.
pub fn theorem2_design_with(
    spec: &CodeSpec,
    columns: &[usize],
    opts: &EnumerationOptions,
) -> Result<DesignResult> {
    let combination = combination_support(spec.exponent(), columns)?;
    if let Some(&c) = combination.columns.iter().find(|&&c| !spec.is_frozen(c)) {
        return Err(Error::Parameter(format!("column {c} is not frozen")));
    }
    if combination.weight != 2 {
        return Err(Error::Parameter(format!(
            "columns {:?} combine to weight {}, expected 2",
            combination.columns, combination.weight
        )));
    }
    let baseline = baseline_of(spec, opts)?;
    baseline.require_gap(2)?;

    let first_column = combination.columns[0];
    let candidates: Vec<usize> = spec
        .info_set()
        .iter()
        .copied()
        .filter(|&i| i < first_column)
        .collect();
    if candidates.is_empty() {
        return Err(Error::Infeasible(format!(
            "no information index below column {first_column}"
        )));
    }

    let codebook = min_weight_codebook_with(spec, &PreTransform::identity(spec.len()), opts)?;
    let wj_table = candidates
        .iter()
        .map(|&i| count_pattern(&codebook, i, &combination))
        .collect::<Result<Vec<_>>>()?;
    let chosen = pick_best(&wj_table);
    finish(
        spec,
        DesignMethod::Theorem2,
        baseline,
        wj_table,
        chosen,
        opts,
    )
}

/// Parameters of [`theorem3_search_with`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Largest combination weight accepted.
    pub p: usize,
    /// Largest number of frozen rows combined.
    pub max_combo_size: usize,
    /// Restricts the frozen columns the search may use.
    pub allowed_columns: Option<Vec<usize>>,
}

impl SearchOptions {
    pub fn new(p: usize, max_combo_size: usize) -> Self {
        SearchOptions {
            p,
            max_combo_size,
            allowed_columns: None,
        }
    }

    pub fn restricted_to(mut self, columns: &[usize]) -> Self {
        self.allowed_columns = Some(columns.to_vec());
        self
    }
}

/// Default subset-size budget for [`theorem3_search`].
pub const DEFAULT_MAX_COMBO_SIZE: usize = 3;

pub fn theorem3_search(spec: &CodeSpec, p: usize, max_combo_size: usize) -> Result<DesignResult> {
    theorem3_search_with(
        spec,
        &SearchOptions::new(p, max_combo_size),
        &EnumerationOptions::default(),
    )
}

/// Searches frozen subsets (up to `max_combo_size` rows above each information index)
/// whose row combination has weight in `1..=p`, and keeps the pair that pushes the
/// most minimum-weight codewords up. Returns a result with `chosen = None` when no
/// valid combination exists.
pub fn theorem3_search_with(
    spec: &CodeSpec,
    search: &SearchOptions,
    opts: &EnumerationOptions,
) -> Result<DesignResult> {
    if search.p == 0 {
        return Err(Error::Parameter("p must be at least 1".into()));
    }
    if search.max_combo_size == 0 {
        return Err(Error::Parameter("max_combo_size must be at least 1".into()));
    }
    let baseline = baseline_of(spec, opts)?;
    baseline.require_gap(search.p)?;

    let allowed: Option<BTreeSet<usize>> = search
        .allowed_columns
        .as_ref()
        .map(|c| c.iter().copied().collect());
    let frozen: Vec<usize> = spec
        .frozen_set()
        .into_iter()
        .filter(|f| allowed.as_ref().is_none_or(|a| a.contains(f)))
        .collect();

    let codebook = min_weight_codebook_with(spec, &PreTransform::identity(spec.len()), opts)?;
    let len = spec.len();
    let mut wj_table = Vec::new();
    for &info in spec.info_set() {
        let above: Vec<usize> = frozen.iter().copied().filter(|&f| f > info).collect();
        for size in 1..=search.max_combo_size.min(above.len()) {
            for subset in Subsets::new(above.len(), size) {
                let columns: Vec<usize> = subset.iter().map(|&s| above[s]).collect();
                let vector = combination_vector(len, columns.iter().copied())?;
                let weight = vector.weight();
                if weight == 0 || weight > search.p {
                    continue;
                }
                let combination = Combination {
                    columns,
                    support: vector.support(),
                    weight,
                };
                wj_table.push(count_leaving(&codebook, info, &combination, &vector)?);
            }
        }
    }
    // order by information index, then lexicographic column set, before the tie-break
    wj_table.sort_by(|a, b| {
        a.info_index
            .cmp(&b.info_index)
            .then_with(|| a.columns.cmp(&b.columns))
    });
    let chosen = pick_best(&wj_table);
    finish(
        spec,
        DesignMethod::Theorem3 {
            p: search.p,
            max_combo_size: search.max_combo_size,
        },
        baseline,
        wj_table,
        chosen,
        opts,
    )
}

/// Combined effect of several single-row designs.
#[derive(Clone, Debug)]
pub struct StackedDesign {
    pub transform: PreTransform,
    pub spectrum: WeightSpectrum,
}

/// Merges the designed rows of several results and re-enumerates. No reduction is
/// predicted for the combination; only the enumerated spectrum is reported.
pub fn stack_designs(
    spec: &CodeSpec,
    designs: &[&DesignResult],
    opts: &EnumerationOptions,
) -> Result<StackedDesign> {
    let mut transform = PreTransform::identity(spec.len());
    for d in designs {
        transform = transform.union(&d.transform)?;
    }
    let spectrum = enumerate_spectrum_with(spec, &transform, opts)?;
    Ok(StackedDesign {
        transform,
        spectrum,
    })
}

/// Lexicographic `size`-subsets of `0..n`.
struct Subsets {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl Subsets {
    fn new(n: usize, size: usize) -> Self {
        Subsets {
            n,
            current: (0..size).collect(),
            done: size > n,
        }
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let k = self.current.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.current[i] < self.n - k + i {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::rm_construct;
    use crate::spectrum::{min_weight_codebook, CodebookEntry};

    #[test]
    fn subsets_enumerate_binomial() {
        assert_eq!(Subsets::new(4, 2).count(), 6);
        assert_eq!(
            Subsets::new(3, 2).collect::<Vec<_>>(),
            vec![vec![0, 1], vec![0, 2], vec![1, 2]]
        );
        assert_eq!(Subsets::new(2, 3).count(), 0);
        assert_eq!(Subsets::new(5, 0).count(), 1);
    }

    #[test]
    fn combination_examples() {
        let c = combination_support(5, &[17]).unwrap();
        assert_eq!((c.support.clone(), c.weight), (vec![1, 17], 2));
        let c = combination_support(5, &[18, 17]).unwrap();
        assert_eq!(c.columns, vec![17, 18]);
        assert_eq!((c.support, c.weight), (vec![2, 18], 2));
        for col in 1..=32 {
            let c = combination_support(5, &[col]).unwrap();
            assert_eq!(c.weight, 1 << (col - 1).count_ones());
        }
        assert!(combination_support(5, &[]).is_err());
        assert!(combination_support(5, &[33]).is_err());
        assert!(combination_support(5, &[3, 3]).is_err());
    }

    #[test]
    fn table_one_and_three_counts() {
        let spec = rm_construct(5, 16).unwrap();
        let cb = min_weight_codebook(&spec, &PreTransform::identity(32)).unwrap();
        for cols in [&[17usize][..], &[17, 18][..]] {
            let combo = combination_support(5, cols).unwrap();
            for i in [8, 12, 14, 15, 16] {
                assert_eq!(
                    count_pattern(&cb, i, &combo).unwrap().w,
                    128,
                    "I={i} cols={cols:?}"
                );
            }
        }
    }

    #[test]
    fn count_pattern_edge_cases() {
        let spec = rm_construct(5, 16).unwrap();
        let cb = min_weight_codebook(&spec, &PreTransform::identity(32)).unwrap();
        // u_1 is frozen, so no entry has it set
        let combo = combination_support(5, &[17]).unwrap();
        assert_eq!(count_pattern(&cb, 1, &combo).unwrap().w, 0);
        let wide = combination_support(5, &[18]).unwrap();
        assert!(matches!(
            count_pattern(&cb, 8, &wide),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn count_pattern_flags_inconsistent_codebook() {
        let u = BitVector::from_support(4, [1]).unwrap();
        let codeword = BitVector::from_support(4, [1, 3]).unwrap();
        let cb = MinWeightCodebook::from_entries(
            4,
            2,
            vec![CodebookEntry {
                message_value: 1,
                u,
                codeword,
            }],
        )
        .unwrap();
        let combo = combination_support(2, &[3]).unwrap();
        assert_eq!(combo.support, vec![1, 3]);
        assert!(matches!(
            count_pattern(&cb, 1, &combo),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn fixed_column_design_on_rm_32_16() {
        let spec = rm_construct(5, 16).unwrap();
        for cols in [&[17usize][..], &[17, 18][..]] {
            let r = theorem2_design(&spec, cols).unwrap();
            assert_eq!(r.baseline.nmin, 620);
            assert_eq!(r.wj_table.len(), 5);
            assert!(r.wj_table.iter().all(|p| p.w == 128));
            assert_eq!(r.chosen.as_ref().unwrap().info_index, 8);
            assert_eq!(r.predicted_nmin, 492);
            assert_eq!(r.verified_nmin, 492);
            assert_eq!(r.verified_dmin, 8);
        }
    }

    #[test]
    fn fixed_column_design_errors() {
        let spec = rm_construct(5, 16).unwrap();
        assert!(matches!(
            theorem2_design(&spec, &[16]),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            theorem2_design(&spec, &[18]),
            Err(Error::Parameter(_))
        ));
        // rows 2 and 3 are frozen but nothing in the info set lies below them
        assert!(matches!(
            theorem2_design(&spec, &[2, 3]),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn fixed_column_gap_precondition() {
        // RM(8,4): weights 0, 4, 8 -> gap 8 > 4 + 2 holds; RM(16,11): d_min 4, next 6
        let spec = rm_construct(4, 11).unwrap();
        let r = theorem2_design(&spec, &[2]);
        assert!(matches!(
            r,
            Err(Error::Precondition {
                dmin: 4,
                second_least: Some(6),
                required: 6
            })
        ));
    }

    #[test]
    fn restricted_search_matches_fixed_column_design() {
        let spec = rm_construct(5, 16).unwrap();
        let t2 = theorem2_design(&spec, &[17]).unwrap();
        let t3 = theorem3_search_with(
            &spec,
            &SearchOptions::new(2, 2).restricted_to(&[17]),
            &EnumerationOptions::default(),
        )
        .unwrap();
        assert_eq!(t3.wj_table, t2.wj_table);
        assert_eq!(t3.chosen, t2.chosen);
        assert!(t3.transform.same_matrix(&t2.transform));
        assert_eq!(t3.predicted_nmin, t2.predicted_nmin);
        assert_eq!(t3.verified_nmin, t2.verified_nmin);
    }

    #[test]
    fn search_without_candidates() {
        let spec = rm_construct(5, 16).unwrap();
        let r = theorem3_search_with(
            &spec,
            &SearchOptions::new(2, 2).restricted_to(&[2]),
            &EnumerationOptions::default(),
        )
        .unwrap();
        assert!(r.chosen.is_none());
        assert!(r.wj_table.is_empty());
        assert!(r.transform.is_identity());
        assert_eq!(r.predicted_nmin, 620);
        assert_eq!(r.verified_nmin, 620);
    }

    #[test]
    fn search_parameter_errors() {
        let spec = rm_construct(5, 16).unwrap();
        assert!(theorem3_search(&spec, 0, 2).is_err());
        assert!(theorem3_search(&spec, 2, 0).is_err());
        assert!(matches!(
            theorem3_search(&spec, 4, 2),
            Err(Error::Precondition { required: 12, .. })
        ));
    }

    #[test]
    fn stacked_designs_re_enumerate() {
        let spec = rm_construct(5, 16).unwrap();
        let a = theorem2_design(&spec, &[17]).unwrap();
        let b = theorem2_design(&spec, &[17, 18]).unwrap();
        let stacked = stack_designs(&spec, &[&a, &b], &EnumerationOptions::default()).unwrap();
        assert!(stacked.transform.contains(8, 17) && stacked.transform.contains(8, 18));
        assert_eq!(stacked.spectrum.total(), 1 << 16);
        assert!(stacked.spectrum.dmin().unwrap() >= 8);
    }
}
