//! Append-only JSON-lines result cache.
//!
//! One JSON object per line; a cache hit is keyed by (p, e, k, M, N').
//! Records carry enough digits to rebuild and re-verify both certificates,
//! so a cached value is never trusted blindly by the test suite. Unreadable
//! lines are skipped, which keeps a partially written final line (crash,
//! concurrent writer) from poisoning the file.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::{Decomposition, LowerBoundCertificate, WaringResult};
use crate::error::Error;
use crate::ring::{Element, RingSpec};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct DecompositionRecord {
    pub class_digits: String,
    pub pretty: String,
    pub size: u32,
    pub anchor_digits: String,
    pub tail_digits: Vec<String>,
}

/// Serialized form of a [`WaringResult`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ResultRecord {
    pub p: u32,
    pub e: u32,
    pub k: u32,
    /// The e the certificates were computed at (1 when the unramified
    /// shortcut applied, `e` otherwise).
    pub compute_e: u32,
    #[serde(rename = "M")]
    pub hensel: u32,
    pub n_prime: u32,
    pub lower: u32,
    pub upper: u32,
    pub g: Option<u32>,
    pub witness_digits: String,
    pub witness_m: u32,
    pub via_prime_field: bool,
    pub decompositions: Vec<DecompositionRecord>,
}

impl ResultRecord {
    pub fn from_result(result: &WaringResult) -> ResultRecord {
        let dspec = result.worst.spec;
        ResultRecord {
            p: result.p,
            e: result.e,
            k: result.k,
            compute_e: dspec.e(),
            hensel: result.hensel,
            n_prime: result.lb_precision,
            lower: result.lower,
            upper: result.upper,
            g: result.g(),
            witness_digits: result.witness.witness.digit_string(),
            witness_m: result.witness.m,
            via_prime_field: result.via_prime_field,
            decompositions: vec![DecompositionRecord {
                class_digits: result.worst.target.digit_string(),
                pretty: dspec.pretty_folded(&result.worst.target),
                size: result.worst.size(),
                anchor_digits: result.worst.anchor.digit_string(),
                tail_digits: result
                    .worst
                    .tail
                    .iter()
                    .map(Element::digit_string)
                    .collect(),
            }],
        }
    }

    /// Rebuild the full result, parsing every digit string back into ring
    /// elements of the recorded specs.
    pub fn to_result(&self) -> Result<WaringResult, Error> {
        let wspec = RingSpec::new(self.p, self.compute_e, self.k, self.n_prime)?;
        let witness = LowerBoundCertificate {
            spec: wspec,
            witness: Element::from_digit_string(&self.witness_digits, &wspec)?,
            m: self.witness_m,
        };
        let dspec = RingSpec::new(self.p, self.compute_e, self.k, self.hensel)?;
        let drec = self
            .decompositions
            .first()
            .ok_or_else(|| Error::BadRecord("record carries no decomposition".into()))?;
        let worst = Decomposition {
            spec: dspec,
            target: Element::from_digit_string(&drec.class_digits, &dspec)?,
            anchor: Element::from_digit_string(&drec.anchor_digits, &dspec)?,
            tail: drec
                .tail_digits
                .iter()
                .map(|t| Element::from_digit_string(t, &dspec))
                .collect::<Result<_, _>>()?,
        };
        Ok(WaringResult {
            p: self.p,
            e: self.e,
            k: self.k,
            hensel: self.hensel,
            lb_precision: self.n_prime,
            lower: self.lower,
            upper: self.upper,
            witness,
            worst,
            via_prime_field: self.via_prime_field,
        })
    }

    /// Re-verify both certificates of the recorded result: the
    /// decomposition by exact ring arithmetic, the witness by an
    /// independent re-run of the sumset at N'.
    pub fn verify(&self) -> Result<bool, Error> {
        let result = self.to_result()?;
        if !result.worst.verify() {
            return Ok(false);
        }
        result.witness.verify()
    }
}

/// Append-only JSON-lines store.
pub struct ResultCache {
    path: PathBuf,
}

impl ResultCache {
    pub fn new(path: impl Into<PathBuf>) -> ResultCache {
        ResultCache { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Latest record matching (p, e, k) and, when given, the exact N'.
    /// M is determined by (p, e, k), so the (p, e, k, M, N') key reduces to
    /// this.
    pub fn lookup(&self, p: u32, e: u32, k: u32, n_prime: Option<u32>) -> Option<ResultRecord> {
        let contents = std::fs::read_to_string(&self.path).ok()?;
        let mut found = None;
        for line in contents.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let Ok(rec) = serde_json::from_str::<ResultRecord>(line) else {
                continue;
            };
            if rec.p == p && rec.e == e && rec.k == k && n_prime.map_or(true, |np| rec.n_prime == np)
            {
                found = Some(rec);
            }
        }
        found
    }

    pub fn append(&self, record: &ResultRecord) -> std::io::Result<()> {
        if let Some(parent) = self.path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        let line = serde_json::to_string(record).expect("record serializes");
        writeln!(file, "{line}")
    }
}
