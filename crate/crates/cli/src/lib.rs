//! Command implementations for the `ptpolar` binary. Each command renders its report
//! into a string so it can be exercised without spawning a process.

pub mod args;
mod tables;

use std::fmt::{self, Write as _};
use std::fs;

use anyhow::{bail, Context, Result};
use ptpolar_core::design::{theorem2_design_with, theorem3_search_with, SearchOptions};
use ptpolar_core::pretransform::crc_aided;
use ptpolar_core::spectrum::{enumerate_spectrum_with, verify_dmin_preserved_with};
use ptpolar_core::{
    polar_construct, rm_construct, CodeSpec, DesignResult, EnumerationOptions, Error as CoreError,
    Family, ParityEquation, PreTransform, WeightSpectrum,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::{
    Cli, CodeArgs, Command, ConstructArgs, DesignArgs, EnumArgs, FamilyArg, Format, MethodArg,
    SpectrumArgs, TransformArgs, TransformKindArg, VerifyArgs,
};

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CAPACITY: u8 = 3;
pub const EXIT_DESIGN: u8 = 4;

/// Rendered output plus the exit status the binary should return.
#[derive(Debug)]
pub struct Report {
    pub text: String,
    pub status: u8,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, status: 0 }
    }
}

/// Bad or missing flags discovered after parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub(crate) fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Maps an error to the documented exit-code taxonomy.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::Capacity { .. } | CoreError::CodebookTooLarge { .. }) => EXIT_CAPACITY,
        Some(CoreError::Precondition { .. } | CoreError::Infeasible(_)) => EXIT_DESIGN,
        Some(CoreError::Parameter(_) | CoreError::Size { .. }) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

pub fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Construct(a) => construct(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Design(a) => design(a),
        Command::Verify(a) => verify(a),
        Command::Tables(a) => tables::run(a),
    }
}

fn enumeration_options(a: &EnumArgs) -> EnumerationOptions {
    let mut opts = EnumerationOptions::default().with_workers(a.workers);
    if let Some(cap) = a.cap {
        opts = opts.with_cap(cap);
    }
    opts
}

fn build_code(a: &CodeArgs) -> Result<CodeSpec> {
    if let Some(path) = &a.spec_file {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(CodeSpec::from_json(&text)?);
    }
    let n = a.n.ok_or_else(|| usage("--n is required"))?;
    let spec = match a.family {
        FamilyArg::Rm => rm_construct(n, a.k.ok_or_else(|| usage("--k is required"))?)?,
        FamilyArg::Polar => {
            polar_construct(n, a.k.ok_or_else(|| usage("--k is required"))?, a.epsilon)?
        }
        FamilyArg::Custom => {
            if a.info.is_empty() {
                return Err(usage("--info is required for the custom family"));
            }
            let spec = CodeSpec::custom(n, a.info.clone())?;
            if let Some(k) = a.k {
                if k != spec.dimension() {
                    return Err(usage(format!(
                        "--k {k} disagrees with {} information indices",
                        spec.dimension()
                    )));
                }
            }
            spec
        }
    };
    Ok(spec)
}

fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .filter(|c| !matches!(c, ',' | ' '))
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(usage(format!("invalid polynomial bit {other:?}"))),
        })
        .collect()
}

fn parse_pair(s: &str) -> Result<(usize, usize)> {
    let (i, j) = s
        .split_once(':')
        .ok_or_else(|| usage(format!("entry {s:?} is not row:col")))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|_| usage(format!("invalid index in {s:?}")))
    };
    Ok((parse(i)?, parse(j)?))
}

fn parse_equations(s: &str) -> Result<Vec<ParityEquation>> {
    s.split(';')
        .filter(|part| !part.trim().is_empty())
        .map(|part| {
            let (target, sources) = part
                .split_once('=')
                .ok_or_else(|| usage(format!("equation {part:?} is not target=src+src")))?;
            let index = |v: &str| {
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| usage(format!("invalid index in {part:?}")))
            };
            Ok(ParityEquation {
                target: index(target)?,
                sources: sources.split('+').map(index).collect::<Result<_>>()?,
            })
        })
        .collect()
}

/// Resolves the pre-transform. A CRC transform also freezes the CRC positions, so the
/// returned code replaces the input one.
fn build_transform(spec: CodeSpec, a: &TransformArgs) -> Result<(CodeSpec, PreTransform)> {
    if let Some(path) = &a.t_file {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let t = PreTransform::from_json(&text)?;
        if t.len() != spec.len() {
            return Err(usage(format!(
                "transform has N = {} but the code has N = {}",
                t.len(),
                spec.len()
            )));
        }
        return Ok((spec, t));
    }
    let len = spec.len();
    let poly = || -> Result<Vec<u8>> {
        parse_bits(
            a.poly
                .as_deref()
                .ok_or_else(|| usage("--poly is required"))?,
        )
    };
    let t = match a.t_kind.unwrap_or(TransformKindArg::Identity) {
        TransformKindArg::Identity => PreTransform::identity(len),
        TransformKindArg::Custom => {
            let entries = a
                .entries
                .iter()
                .map(|e| parse_pair(e))
                .collect::<Result<Vec<_>>>()?;
            PreTransform::custom(len, entries)?
        }
        TransformKindArg::Pac => PreTransform::pac(len, &poly()?)?,
        TransformKindArg::Pc => {
            let eqs = parse_equations(a.pc.as_deref().ok_or_else(|| usage("--pc is required"))?)?;
            PreTransform::pc(len, &eqs)?
        }
        TransformKindArg::Crc => {
            let (data_spec, t) = crc_aided(&spec, &poly()?)?;
            return Ok((data_spec, t));
        }
    };
    Ok((spec, t))
}

fn join(values: &[usize]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn describe_code(spec: &CodeSpec) -> String {
    let family = match spec.family() {
        Family::Rm => "RM",
        Family::Polar => "polar",
        Family::Custom => "custom",
    };
    format!("{family} code N={} K={}", spec.len(), spec.dimension())
}

fn describe_transform(t: &PreTransform) -> String {
    let entries: Vec<String> = t.entries().map(|(i, j)| format!("({i},{j})")).collect();
    if entries.is_empty() {
        "identity".to_string()
    } else {
        format!(
            "{} off-diagonal entries {}",
            entries.len(),
            entries.join(" ")
        )
    }
}

fn write_transform(path: &std::path::Path, t: &PreTransform) -> Result<()> {
    let mut doc = t.to_json();
    doc.push('\n');
    fs::write(path, doc).with_context(|| format!("writing {}", path.display()))
}

fn construct(a: &ConstructArgs) -> Result<Report> {
    let spec = build_code(&a.code)?;
    let with_transform = a.transform.t_file.is_some() || a.transform.t_kind.is_some();
    let (spec, t) = build_transform(spec, &a.transform)?;
    if let Some(path) = &a.t_out {
        write_transform(path, &t)?;
    }
    let text = match a.format {
        Format::Json => {
            let mut out = spec.to_json();
            if with_transform {
                out = format!(
                    "{{\n\"code\": {},\n\"transform\": {}\n}}",
                    spec.to_json(),
                    t.to_json()
                );
            }
            out.push('\n');
            out
        }
        Format::Csv => return Err(usage("construct has no CSV output")),
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "{}", describe_code(&spec))?;
            writeln!(out, "info_set: {}", join(spec.info_set()))?;
            writeln!(out, "frozen_set: {}", join(&spec.frozen_set()))?;
            writeln!(out, "min info row weight: {}", spec.min_info_row_weight())?;
            if with_transform {
                writeln!(out, "transform: {}", describe_transform(&t))?;
            }
            out
        }
    };
    Ok(Report::ok(text))
}

fn render_spectrum(
    spec: &CodeSpec,
    t: &PreTransform,
    s: &WeightSpectrum,
    format: Format,
) -> Result<String> {
    Ok(match format {
        Format::Json => s.to_json() + "\n",
        Format::Csv => s.to_csv(),
        Format::Text => {
            let opt = |v: Option<usize>| v.map_or("none".to_string(), |w| w.to_string());
            let mut out = String::new();
            writeln!(out, "{}", describe_code(spec))?;
            writeln!(out, "transform: {}", describe_transform(t))?;
            writeln!(out, "d_min = {}", opt(s.dmin()))?;
            writeln!(
                out,
                "N_min = {}",
                s.nmin().map_or("none".into(), |c| c.to_string())
            )?;
            writeln!(out, "second_least = {}", opt(s.second_least()))?;
            writeln!(
                out,
                "weights divisible by 4: {}",
                if s.weights_divisible_by(4) {
                    "yes"
                } else {
                    "no"
                }
            )?;
            writeln!(out, "weight count")?;
            for (w, c) in s.nonzero() {
                writeln!(out, "{w} {c}")?;
            }
            out
        }
    })
}

fn spectrum(a: &SpectrumArgs) -> Result<Report> {
    let (spec, t) = build_transform(build_code(&a.code)?, &a.transform)?;
    let s = enumerate_spectrum_with(&spec, &t, &enumeration_options(&a.enumeration))?;
    Ok(Report::ok(render_spectrum(&spec, &t, &s, a.format)?))
}

fn render_design(spec: &CodeSpec, r: &DesignResult) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "{}", describe_code(spec))?;
    writeln!(
        out,
        "baseline: d_min={} N_min={} second_least={}",
        r.baseline.dmin,
        r.baseline.nmin,
        r.baseline
            .second_least
            .map_or("none".into(), |w| w.to_string())
    )?;
    writeln!(out, "candidates ({}):", r.wj_table.len())?;
    writeln!(out, "I_j columns support w_j")?;
    for p in &r.wj_table {
        writeln!(
            out,
            "{} {{{}}} {{{}}} {}",
            p.info_index,
            join(&p.columns),
            join(&p.support),
            p.w
        )?;
    }
    match &r.chosen {
        Some(p) => writeln!(
            out,
            "chosen: I={} columns={{{}}} w={}",
            p.info_index,
            join(&p.columns),
            p.w
        )?,
        None => writeln!(out, "chosen: none (no valid combination)")?,
    }
    writeln!(out, "transform: {}", describe_transform(&r.transform))?;
    writeln!(
        out,
        "predicted N_min = {}, verified N_min = {}, verified d_min = {}",
        r.predicted_nmin, r.verified_nmin, r.verified_dmin
    )?;
    writeln!(
        out,
        "prediction {}",
        if r.prediction_exact() {
            "exact"
        } else {
            "MISMATCH"
        }
    )?;
    Ok(out)
}

fn design(a: &DesignArgs) -> Result<Report> {
    let spec = build_code(&a.code)?;
    let opts = enumeration_options(&a.enumeration);
    let r = match a.method {
        MethodArg::Theorem2 => {
            if a.columns.is_empty() {
                bail!(usage("--columns is required for theorem2"));
            }
            theorem2_design_with(&spec, &a.columns, &opts)?
        }
        MethodArg::Theorem3 => {
            let mut search = SearchOptions::new(a.p, a.budget);
            if !a.restrict.is_empty() {
                search = search.restricted_to(&a.restrict);
            }
            theorem3_search_with(&spec, &search, &opts)?
        }
    };
    if let Some(path) = &a.t_out {
        write_transform(path, &r.transform)?;
    }
    let text = match a.format {
        Format::Json => r.to_json(&spec) + "\n",
        Format::Csv => {
            let mut out = String::from("info_index,columns,support,w\n");
            for p in &r.wj_table {
                writeln!(
                    out,
                    "{},{},{},{}",
                    p.info_index,
                    join(&p.columns).replace(',', " "),
                    join(&p.support).replace(',', " "),
                    p.w
                )?;
            }
            out
        }
        Format::Text => render_design(&spec, &r)?,
    };
    Ok(Report::ok(text))
}

fn verify(a: &VerifyArgs) -> Result<Report> {
    let (spec, t) = build_transform(build_code(&a.code)?, &a.transform)?;
    let opts = enumeration_options(&a.enumeration);
    let report = verify_dmin_preserved_with(&spec, &t, &opts)?;
    if !(0.0..=1.0).contains(&a.density) {
        return Err(usage("--density must lie in [0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut violations = Vec::new();
    for trial in 0..a.random_trials {
        let rt = PreTransform::random(spec.len(), a.density, &mut rng);
        let r = verify_dmin_preserved_with(&spec, &rt, &opts)?;
        if !r.holds {
            violations.push((trial, r));
        }
    }
    let holds = report.holds && violations.is_empty();
    let text = match a.format {
        Format::Json => {
            let doc = serde_json::json!({
                "N": spec.len(),
                "K": spec.dimension(),
                "dmin_base": report.dmin_base,
                "dmin_T": report.dmin_t,
                "holds": report.holds,
                "random_trials": a.random_trials,
                "random_violations": violations.len(),
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        Format::Csv => return Err(usage("verify has no CSV output")),
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "{}", describe_code(&spec))?;
            writeln!(out, "transform: {}", describe_transform(&t))?;
            writeln!(
                out,
                "d_min base = {}, d_min with T = {}, holds = {}",
                report.dmin_base, report.dmin_t, report.holds
            )?;
            if a.random_trials > 0 {
                writeln!(
                    out,
                    "random transforms: {} trials, {} violations",
                    a.random_trials,
                    violations.len()
                )?;
            }
            out
        }
    };
    Ok(Report {
        text,
        status: if holds { 0 } else { EXIT_FAILURE },
    })
}
