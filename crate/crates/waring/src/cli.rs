//! Command surface behind the `waring` binary.
//!
//! Subcommands: `compute` (one Waring number with certificates), `table`
//! (an e-by-k grid), `powers` (unit k-th power residues), `decompose`
//! (per-class decomposition table), `scan` (the p = 2 comparison grid),
//! and `g0` (mod-p zero-sum data). Exit codes: 0 on success, 1 on usage
//! errors, 2 when `compute` leaves the bounds apart.

use std::path::PathBuf;

use rayon::prelude::*;
use serde_json::json;

use crate::cache::{ResultCache, ResultRecord};
use crate::engine::{
    self, decomposition_table, scan_conjecture, waring_number, Decomposition, Options,
    WaringResult,
};
use crate::error::Error;
use crate::powers::{hensel_precision, PowerResidues};
use crate::prime_field;
use crate::ring::RingSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_UNRESOLVED: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format {other:?} (expected text, json or csv)")),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Command {
    Compute {
        p: u32,
        e: u32,
        k: u32,
        direct: bool,
    },
    Table {
        p: u32,
        rows: Option<(u32, u32)>,
        cols: Option<(u32, u32)>,
    },
    Powers {
        p: u32,
        e: u32,
        k: u32,
    },
    Decompose {
        p: u32,
        e: u32,
        k: u32,
    },
    Scan {
        p: u32,
        e_range: (u32, u32),
        k_range: (u32, u32),
        step: u32,
    },
    G0 {
        p: u32,
        k: u32,
    },
}

/// Everything the binary hands over after argument parsing.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub format: OutputFormat,
    /// Enumeration precision override for `powers`.
    pub precision: Option<u32>,
    /// Lower-bound precision N' override.
    pub lb_precision: Option<u32>,
    pub n_cap: u32,
    /// Cache file; falls back to WARING_CACHE, then ./waring_cache.jsonl.
    pub cache: Option<PathBuf>,
    pub threads: Option<usize>,
    /// Emit digit strings instead of pretty forms.
    pub raw: bool,
    /// Step for ranged table columns and scan ranges.
    pub step: u32,
}

impl RunConfig {
    pub fn new(command: Command) -> RunConfig {
        RunConfig {
            command,
            format: OutputFormat::Text,
            precision: None,
            lb_precision: None,
            n_cap: 32,
            cache: None,
            threads: None,
            raw: false,
            step: 1,
        }
    }

    fn options(&self, direct: bool) -> Options {
        Options {
            lb_precision: self.lb_precision,
            n_cap: self.n_cap,
            force_direct: direct,
        }
    }

    fn cache(&self) -> ResultCache {
        let path = self
            .cache
            .clone()
            .or_else(|| std::env::var_os("WARING_CACHE").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("waring_cache.jsonl"));
        ResultCache::new(path)
    }
}

/// Run one command, print its output, and return the process exit code.
pub fn run(cfg: &RunConfig) -> i32 {
    if let Some(threads) = cfg.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let outcome = match &cfg.command {
        Command::Compute { p, e, k, direct } => cmd_compute(cfg, *p, *e, *k, *direct),
        Command::Table { p, rows, cols } => cmd_table(cfg, *p, *rows, *cols),
        Command::Powers { p, e, k } => cmd_powers(cfg, *p, *e, *k),
        Command::Decompose { p, e, k } => cmd_decompose(cfg, *p, *e, *k),
        Command::Scan {
            p,
            e_range,
            k_range,
            step,
        } => cmd_scan(cfg, *p, *e_range, *k_range, *step),
        Command::G0 { p, k } => cmd_g0(cfg, *p, *k),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_USAGE
        }
    }
}

/// Reference value for a grid cell, when one is on record.
pub fn known_value(p: u32, e: u32, k: u32) -> Option<u32> {
    const KNOWN_P2: &[(u32, u32, u32)] = &[
        (1, 2, 4),
        (1, 4, 15),
        (1, 6, 8),
        (2, 2, 3),
        (2, 4, 7),
        (2, 6, 6),
        (3, 2, 4),
        (3, 6, 6),
        (4, 2, 3),
        (4, 6, 4),
    ];
    const KNOWN_P3: &[(u32, u32, u32)] = &[
        (1, 3, 4),
        (2, 3, 4),
        (3, 3, 3),
        (6, 3, 3),
        (1, 6, 9),
        (2, 6, 9),
        (3, 6, 9),
        (4, 6, 9),
        (5, 6, 9),
        (6, 6, 4),
        (1, 9, 13),
        (2, 9, 13),
        (3, 9, 13),
    ];
    let table = match p {
        2 => KNOWN_P2,
        3 => KNOWN_P3,
        _ => &[][..],
    };
    if let Some(&(_, _, g)) = table.iter().find(|&&(te, tk, _)| te == e && tk == k) {
        return Some(g);
    }
    if p == 2 {
        if k >= 3 && k % 2 == 1 {
            return Some(2);
        }
        if k == 2 {
            return Some(if e % 2 == 1 { 4 } else { 3 });
        }
        if k >= 10 && k % 4 == 2 {
            return match e {
                1 | 3 => Some(8),
                2 => Some(6),
                _ => None,
            };
        }
    }
    None
}

fn compute_cached(
    cfg: &RunConfig,
    cache: &ResultCache,
    p: u32,
    e: u32,
    k: u32,
    direct: bool,
) -> Result<(WaringResult, bool), Error> {
    if !direct {
        if let Some(rec) = cache.lookup(p, e, k, cfg.lb_precision) {
            if let Ok(result) = rec.to_result() {
                return Ok((result, true));
            }
        }
    }
    let result = waring_number(p, e, k, &cfg.options(direct))?;
    if !direct {
        if let Err(err) = cache.append(&ResultRecord::from_result(&result)) {
            eprintln!("warning: could not write cache: {err}");
        }
    }
    Ok((result, false))
}

fn render_decomposition(d: &Decomposition, raw: bool) -> String {
    let spec = &d.spec;
    let show = |el: &crate::ring::Element| {
        if raw {
            format!("[{}]", el.digit_string())
        } else {
            spec.pretty_folded(el)
        }
    };
    if d.tail.is_empty() {
        return "a".to_string();
    }
    let offset = spec.neg(&d.tail_sum());
    let mut out = if offset.is_zero() {
        "(a)".to_string()
    } else {
        format!("(a + {})", show(&offset))
    };
    for t in &d.tail {
        let part = show(t);
        out.push_str(" + ");
        if part.contains(" + ") {
            out.push_str(&format!("({part})"));
        } else {
            out.push_str(&part);
        }
    }
    out
}

fn cmd_compute(cfg: &RunConfig, p: u32, e: u32, k: u32, direct: bool) -> Result<i32, Error> {
    let cache = cfg.cache();
    let (result, cached) = compute_cached(cfg, &cache, p, e, k, direct)?;
    let record = ResultRecord::from_result(&result);
    match cfg.format {
        OutputFormat::Json => {
            println!("{}", serde_json::to_string(&record).expect("serializable"));
        }
        OutputFormat::Csv => {
            println!("p,e,k,M,n_prime,lower,upper,g");
            println!(
                "{},{},{},{},{},{},{},{}",
                record.p,
                record.e,
                record.k,
                record.hensel,
                record.n_prime,
                record.lower,
                record.upper,
                record.g.map_or(String::new(), |g| g.to_string())
            );
        }
        OutputFormat::Text => {
            let wspec = result.witness.spec;
            let witness = if cfg.raw {
                format!("[{}]", result.witness.witness.digit_string())
            } else {
                wspec.pretty(&result.witness.witness)
            };
            println!(
                "g_{{{p},{e}}}({k}): M = {}, N' = {}{}",
                result.hensel,
                result.lb_precision,
                if cached { "  (cached)" } else { "" }
            );
            if result.via_prime_field {
                println!("  computed at e = 1 (p does not divide k, so the value transfers)");
            }
            println!(
                "  lower bound {}: class {} mod w^{} is not a sum of {} or fewer k-th power residues",
                result.lower,
                witness,
                result.lb_precision,
                result.witness.m
            );
            println!(
                "  upper bound {}: worst class {} takes {}",
                result.upper,
                if cfg.raw {
                    format!("[{}]", result.worst.target.digit_string())
                } else {
                    result.worst.spec.pretty_folded(&result.worst.target)
                },
                render_decomposition(&result.worst, cfg.raw)
            );
            match result.g() {
                Some(g) => println!("  g = {g}"),
                None => println!("  unresolved: {} <= g <= {}", result.lower, result.upper),
            }
        }
    }
    Ok(if result.is_resolved() {
        EXIT_OK
    } else {
        EXIT_UNRESOLVED
    })
}

struct Cell {
    e: u32,
    k: u32,
    outcome: Result<(WaringResult, bool), Error>,
}

fn cell_text(cell: &Cell) -> String {
    match &cell.outcome {
        Err(_) => "-".to_string(),
        Ok((result, _)) => match result.g() {
            None => format!("{}..{} [?]", result.lower, result.upper),
            Some(g) => match known_value(result.p, cell.e, cell.k) {
                Some(known) if known == g => g.to_string(),
                Some(known) => format!("{g} (expected {known}!)"),
                None => format!("{g} [new]"),
            },
        },
    }
}

fn cmd_table(
    cfg: &RunConfig,
    p: u32,
    rows: Option<(u32, u32)>,
    cols: Option<(u32, u32)>,
) -> Result<i32, Error> {
    let rows = match (rows, p) {
        (Some(r), _) => r,
        (None, 2) => (1, 4),
        (None, 3) => (1, 6),
        (None, _) => {
            return Err(Error::InvalidParameter(
                "table: pass --rows and --cols for p other than 2 and 3".into(),
            ))
        }
    };
    if rows.0 == 0 || rows.0 > rows.1 {
        return Err(Error::InvalidParameter("table: bad --rows range".into()));
    }
    let ks: Vec<u32> = match (cols, p) {
        (Some((a, b)), _) => {
            if a == 0 || a > b {
                return Err(Error::InvalidParameter("table: bad --cols range".into()));
            }
            (a..=b).step_by(cfg.step.max(1) as usize).collect()
        }
        (None, 2) => vec![2, 4, 6, 10],
        (None, 3) => vec![3, 6, 9],
        (None, _) => unreachable!(),
    };

    let cache = cfg.cache();
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for e in rows.0..=rows.1 {
        for &k in &ks {
            pairs.push((e, k));
        }
    }
    // Cache hits first, fresh computations in parallel, appends serialized.
    let mut cells: Vec<Cell> = Vec::new();
    let mut missing: Vec<(u32, u32)> = Vec::new();
    for &(e, k) in &pairs {
        if let Some(rec) = cache.lookup(p, e, k, cfg.lb_precision) {
            if let Ok(result) = rec.to_result() {
                cells.push(Cell {
                    e,
                    k,
                    outcome: Ok((result, true)),
                });
                continue;
            }
        }
        missing.push((e, k));
    }
    let computed: Vec<Cell> = missing
        .par_iter()
        .map(|&(e, k)| Cell {
            e,
            k,
            outcome: waring_number(p, e, k, &cfg.options(false)).map(|r| (r, false)),
        })
        .collect();
    for cell in &computed {
        if let Ok((result, false)) = &cell.outcome {
            if let Err(err) = cache.append(&ResultRecord::from_result(result)) {
                eprintln!("warning: could not write cache: {err}");
            }
        }
    }
    cells.extend(computed);
    cells.sort_by_key(|c| (c.e, c.k));

    match cfg.format {
        OutputFormat::Text => {
            let headers: Vec<String> = ks.iter().map(|k| format!("k={k}")).collect();
            let mut width = headers.iter().map(String::len).max().unwrap_or(4);
            let rendered: Vec<Vec<String>> = (rows.0..=rows.1)
                .map(|e| {
                    ks.iter()
                        .map(|&k| {
                            let cell = cells.iter().find(|c| c.e == e && c.k == k).unwrap();
                            let text = cell_text(cell);
                            width = width.max(text.len());
                            text
                        })
                        .collect()
                })
                .collect();
            println!("Waring numbers g_{{{p},e}}(k)");
            print!("{:>6} ", "");
            for h in &headers {
                print!(" {h:>width$}");
            }
            println!();
            for (i, e) in (rows.0..=rows.1).enumerate() {
                print!("{:>6} ", format!("e={e}"));
                for text in &rendered[i] {
                    print!(" {text:>width$}");
                }
                println!();
            }
            println!("([new] = no stored reference value; - = beyond the dense-set cap)");
        }
        OutputFormat::Json => {
            let arr: Vec<serde_json::Value> = cells
                .iter()
                .map(|c| match &c.outcome {
                    Ok((r, cached)) => json!({
                        "e": c.e, "k": c.k, "lower": r.lower, "upper": r.upper,
                        "g": r.g(), "known": known_value(p, c.e, c.k), "cached": cached,
                    }),
                    Err(err) => json!({
                        "e": c.e, "k": c.k, "error": err.to_string(),
                    }),
                })
                .collect();
            println!("{}", serde_json::to_string(&json!({ "p": p, "cells": arr })).unwrap());
        }
        OutputFormat::Csv => {
            println!("p,e,k,lower,upper,g,known,status");
            for c in &cells {
                match &c.outcome {
                    Ok((r, _)) => println!(
                        "{p},{},{},{},{},{},{},{}",
                        c.e,
                        c.k,
                        r.lower,
                        r.upper,
                        r.g().map_or(String::new(), |g| g.to_string()),
                        known_value(p, c.e, c.k).map_or(String::new(), |g| g.to_string()),
                        if r.is_resolved() { "resolved" } else { "unresolved" }
                    ),
                    Err(err) => println!("{p},{},{},,,,,{}", c.e, c.k, err),
                }
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_powers(cfg: &RunConfig, p: u32, e: u32, k: u32) -> Result<i32, Error> {
    let probe = RingSpec::new(p, e, k, 1)?;
    let m = hensel_precision(&probe);
    let n = cfg.precision.unwrap_or(m);
    if n < m {
        return Err(Error::PrecisionTooLow {
            given: n,
            required: m,
        });
    }
    let spec = RingSpec::new(p, e, k, n)?;
    let powers = PowerResidues::enumerate(&spec)?;
    let units = powers.unit_residues();
    let scaled: Vec<_> = powers
        .scaled_indices()
        .iter()
        .map(|&i| spec.element_of_index(i as u64))
        .collect();
    let show = |el: &crate::ring::Element| {
        if cfg.raw {
            el.digit_string()
        } else {
            spec.pretty(el)
        }
    };
    match cfg.format {
        OutputFormat::Text => {
            println!(
                "unit {k}-th power residues mod w^{n} in Z_{p}[w], w^{e} = {p} ({} residues):",
                units.len()
            );
            for u in &units {
                println!("{}", show(u));
            }
            if !scaled.is_empty() {
                println!("scaled residues w^(k j) * unit ({}):", scaled.len());
                for s in &scaled {
                    println!("{}", show(s));
                }
            }
        }
        OutputFormat::Json => {
            let to_val = |els: &[crate::ring::Element]| {
                els.iter()
                    .map(|el| json!({ "digits": el.digit_string(), "pretty": spec.pretty(el) }))
                    .collect::<Vec<_>>()
            };
            println!(
                "{}",
                serde_json::to_string(&json!({
                    "p": p, "e": e, "k": k, "precision": n, "hensel": m,
                    "units": to_val(&units), "scaled": to_val(&scaled),
                }))
                .unwrap()
            );
        }
        OutputFormat::Csv => {
            println!("kind,digits,pretty");
            for u in &units {
                println!("unit,{},{}", u.digit_string(), spec.pretty(u));
            }
            for s in &scaled {
                println!("scaled,{},{}", s.digit_string(), spec.pretty(s));
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_decompose(cfg: &RunConfig, p: u32, e: u32, k: u32) -> Result<i32, Error> {
    let rows = decomposition_table(p, e, k)?;
    if rows.is_empty() {
        println!("no attainable classes");
        return Ok(EXIT_OK);
    }
    let spec = rows[0].decomposition.spec;
    match cfg.format {
        OutputFormat::Text => {
            println!(
                "decompositions of the attainable classes mod w^{} ({} rows):",
                spec.precision(),
                rows.len()
            );
            for row in &rows {
                let class = if cfg.raw {
                    row.class.digit_string()
                } else {
                    format!(
                        "{:<14} {}",
                        spec.pretty_folded(&row.class),
                        spec.pretty(&row.class)
                    )
                };
                println!(
                    "{class:<42} | {} | {}",
                    row.count,
                    render_decomposition(&row.decomposition, cfg.raw)
                );
            }
        }
        OutputFormat::Json => {
            let arr: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    json!({
                        "class_digits": row.class.digit_string(),
                        "pretty": spec.pretty_folded(&row.class),
                        "size": row.count,
                        "anchor_digits": row.decomposition.anchor.digit_string(),
                        "tail_digits": row.decomposition.tail.iter()
                            .map(|t| t.digit_string()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            println!(
                "{}",
                serde_json::to_string(&json!({ "p": p, "e": e, "k": k, "rows": arr })).unwrap()
            );
        }
        OutputFormat::Csv => {
            println!("class_digits,pretty,size,decomposition");
            for row in &rows {
                println!(
                    "{},{},{},{}",
                    row.class.digit_string(),
                    spec.pretty_folded(&row.class).replace(' ', ""),
                    row.count,
                    render_decomposition(&row.decomposition, false).replace(' ', "")
                );
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_scan(
    cfg: &RunConfig,
    p: u32,
    e_range: (u32, u32),
    k_range: (u32, u32),
    step: u32,
) -> Result<i32, Error> {
    if p != 2 {
        return Err(Error::InvalidParameter(
            "the comparison scan is defined for p = 2".into(),
        ));
    }
    let cells = scan_conjecture(e_range, k_range, step, &cfg.options(false))?;
    let violations = cells
        .iter()
        .filter(|c| c.verdict == engine::Verdict::Violation)
        .count();
    match cfg.format {
        OutputFormat::Text => {
            for c in &cells {
                let g = c
                    .g
                    .map(|g| g.to_string())
                    .unwrap_or_else(|| match (c.lower, c.upper) {
                        (Some(lo), Some(up)) => format!("{lo}..{up}"),
                        _ => "-".into(),
                    });
                let base = c
                    .baseline_g
                    .map(|g| g.to_string())
                    .unwrap_or_else(|| "-".into());
                println!(
                    "e={:<3} k={:<3} gcd(e,k){} 1   g_{{2,e}}(k)={:<6} g_{{2,1}}(k)={:<6} {}{}",
                    c.e,
                    c.k,
                    if c.gcd_exceeds_one { ">" } else { "=" },
                    g,
                    base,
                    c.verdict.as_str(),
                    c.note
                        .as_ref()
                        .map(|n| format!("  ({n})"))
                        .unwrap_or_default()
                );
            }
            println!(
                "{} cells, {} violations (sampled check only; no claim beyond these cells)",
                cells.len(),
                violations
            );
        }
        OutputFormat::Json => {
            let arr: Vec<serde_json::Value> = cells
                .iter()
                .map(|c| {
                    json!({
                        "e": c.e, "k": c.k, "gcd_exceeds_one": c.gcd_exceeds_one,
                        "lower": c.lower, "upper": c.upper, "g": c.g,
                        "baseline_g": c.baseline_g, "verdict": c.verdict.as_str(),
                        "note": c.note,
                    })
                })
                .collect();
            println!("{}", serde_json::to_string(&arr).unwrap());
        }
        OutputFormat::Csv => {
            println!("e,k,gcd_exceeds_one,lower,upper,g,baseline_g,verdict");
            for c in &cells {
                println!(
                    "{},{},{},{},{},{},{},{}",
                    c.e,
                    c.k,
                    c.gcd_exceeds_one,
                    c.lower.map_or(String::new(), |v| v.to_string()),
                    c.upper.map_or(String::new(), |v| v.to_string()),
                    c.g.map_or(String::new(), |v| v.to_string()),
                    c.baseline_g.map_or(String::new(), |v| v.to_string()),
                    c.verdict.as_str()
                );
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_g0(cfg: &RunConfig, p: u32, k: u32) -> Result<i32, Error> {
    let data = prime_field::prime_power_data(p, k)?;
    match cfg.format {
        OutputFormat::Text => {
            println!("g0({p}, {k}) = {}", data.g0);
            if cfg.raw {
                let list: Vec<String> = data.residues.iter().map(u32::to_string).collect();
                println!("nonzero k-th power residues mod {p}: {}", list.join(" "));
            }
        }
        OutputFormat::Json => {
            println!(
                "{}",
                serde_json::to_string(&json!({
                    "p": p, "k": k, "g0": data.g0, "residues": data.residues,
                }))
                .unwrap()
            );
        }
        OutputFormat::Csv => {
            println!("p,k,g0");
            println!("{p},{k},{}", data.g0);
        }
    }
    Ok(EXIT_OK)
}
