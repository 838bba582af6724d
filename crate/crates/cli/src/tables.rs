use std::fmt::Write as _;

use anyhow::Result;
use ptpolar_core::spectrum::{enumerate_spectrum_with, min_weight_codebook_with};
use ptpolar_core::{
    combination_support, count_pattern, rm_construct, EnumerationOptions, PreTransform,
};
use serde_json::json;

use crate::args::{Format, TablesArgs};
use crate::{usage, Report, EXIT_FAILURE};

const INDICES: [usize; 5] = [8, 12, 14, 15, 16];
const EXPECTED_BASELINE: (usize, u64, usize) = (8, 620, 12);
const EXPECTED_W: u64 = 128;
const EXPECTED_NMIN: u64 = 492;

struct Table {
    columns: Vec<usize>,
    support: Vec<usize>,
    w: Vec<u64>,
    nmin: Vec<u64>,
}

pub(crate) fn run(a: &TablesArgs) -> Result<Report> {
    let spec = rm_construct(5, 16)?;
    let opts = EnumerationOptions::default().with_workers(a.workers);
    let identity = PreTransform::identity(spec.len());
    let base = enumerate_spectrum_with(&spec, &identity, &opts)?;
    let baseline = (
        base.dmin().unwrap_or(0),
        base.nmin().unwrap_or(0),
        base.second_least().unwrap_or(0),
    );
    let codebook = min_weight_codebook_with(&spec, &identity, &opts)?;

    let mut tables = Vec::new();
    for columns in [vec![17], vec![17, 18]] {
        let combo = combination_support(spec.exponent(), &columns)?;
        let mut w = Vec::new();
        let mut nmin = Vec::new();
        for &i in &INDICES {
            w.push(count_pattern(&codebook, i, &combo)?.w);
            let t = PreTransform::custom(spec.len(), columns.iter().map(|&c| (i, c)))?;
            nmin.push(enumerate_spectrum_with(&spec, &t, &opts)?.count(baseline.0));
        }
        tables.push(Table {
            columns,
            support: combo.support,
            w,
            nmin,
        });
    }

    let matches = baseline == EXPECTED_BASELINE
        && tables.iter().all(|t| {
            t.w.iter().all(|&w| w == EXPECTED_W) && t.nmin.iter().all(|&n| n == EXPECTED_NMIN)
        });

    let text = match a.format {
        Format::Csv => return Err(usage("tables has no CSV output")),
        Format::Json => {
            let doc = json!({
                "N": spec.len(),
                "K": spec.dimension(),
                "dmin": baseline.0,
                "Nmin": baseline.1,
                "second_least": baseline.2,
                "tables": tables.iter().map(|t| json!({
                    "columns": t.columns,
                    "support": t.support,
                    "rows": INDICES.iter().enumerate().map(|(r, &i)| json!({
                        "info_index": i,
                        "w": t.w[r],
                        "Nmin": t.nmin[r],
                    })).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
                "matches_expected": matches,
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        Format::Text => {
            let mut out = String::new();
            writeln!(
                out,
                "RM(32,16): d_min={}, N_min={}, second_least={}",
                baseline.0, baseline.1, baseline.2
            )?;
            for t in &tables {
                let cols: Vec<String> = t.columns.iter().map(|c| c.to_string()).collect();
                let sup: Vec<String> = t.support.iter().map(|c| c.to_string()).collect();
                writeln!(out)?;
                writeln!(
                    out,
                    "columns {{{}}} (support {{{}}})",
                    cols.join(","),
                    sup.join(",")
                )?;
                writeln!(out, "{:>4} {:>5} {:>6}", "I_j", "w_j", "N_min")?;
                for (r, i) in INDICES.iter().enumerate() {
                    writeln!(out, "{:>4} {:>5} {:>6}", i, t.w[r], t.nmin[r])?;
                }
            }
            writeln!(out)?;
            writeln!(
                out,
                "{}",
                if matches {
                    "all values match the expected tables"
                } else {
                    "MISMATCH against the expected tables"
                }
            )?;
            out
        }
    };
    Ok(Report {
        text,
        status: if a.check && !matches { EXIT_FAILURE } else { 0 },
    })
}
