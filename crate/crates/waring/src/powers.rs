//! Hensel-certified enumeration of k-th power residues.
//!
//! By Hensel's lemma, a unit of O = Z_p[w] (w^e = p) congruent to a k-th
//! power mod w^M with M = 2*v_w(k) + 1 = 2*e*v_p(k) + 1 is itself a k-th
//! power. Enumerating the exact image of the k-th power map on units at any
//! precision N >= M therefore yields a sound and complete residue test for
//! unit k-th powers. Non-unit k-th powers are w^(k*j) times unit ones, so
//! the full summand set at precision N adds the shifted copies with
//! k*j < N; everything deeper truncates to zero.
//!
//! Enumeration is brute force over all (p-1) * p^(N-1) unit digit vectors,
//! split across threads over disjoint ranges and merged as bitmaps.

use rayon::prelude::*;

use crate::error::Error;
use crate::ring::{pow_digits, Element, RingSpec, MAX_PRECISION};
use crate::sumset::{layered_counts, UNREACHED};

/// Dense set representations are capped at 2^24 residue classes.
pub const DENSE_SET_CAP: u64 = 1 << 24;
const DENSE_SET_CAP_LOG2: u32 = 24;

/// Hensel precision M = 2*e*v_p(k) + 1: a unit congruent to a k-th power
/// mod w^M is a k-th power.
pub fn hensel_precision(spec: &RingSpec) -> u32 {
    2 * spec.e() * nu_p(spec.p(), spec.k()) + 1
}

/// p-adic valuation of k.
pub fn nu_p(p: u32, k: u32) -> u32 {
    let mut k = k;
    let mut v = 0;
    while k % p == 0 {
        k /= p;
        v += 1;
    }
    v
}

/// Check that the spec's precision is usable for dense enumeration and
/// return the ring size.
pub(crate) fn dense_size(spec: &RingSpec) -> Result<u64, Error> {
    match spec.ring_size() {
        Some(size) if size <= DENSE_SET_CAP => Ok(size),
        _ => Err(Error::RingTooLarge {
            p: spec.p(),
            n: spec.precision(),
            cap: DENSE_SET_CAP_LOG2,
        }),
    }
}

/// The k-th power residues of the ring of `spec`, enumerated at the spec's
/// precision N (which must be at least the Hensel precision M).
///
/// `unit_residues` is exactly { x^k : x unit mod w^N }; `summands` adds the
/// shifted copies w^(k*j) * u with k*j < N. Both are sorted by dense index.
pub struct PowerResidues {
    spec: RingSpec,
    hensel: u32,
    unit_residues: Vec<u32>,
    summands: Vec<u32>,
}

impl PowerResidues {
    pub fn enumerate(spec: &RingSpec) -> Result<PowerResidues, Error> {
        let hensel = hensel_precision(spec);
        let n = spec.precision();
        if n < hensel {
            return Err(Error::PrecisionTooLow {
                given: n,
                required: hensel,
            });
        }
        let size = dense_size(spec)?;

        let unit_residues = enumerate_unit_power_indices(spec, size);

        // Shifted copies: w^(k*j) * u truncates to the shift of u's residue.
        let mut bitmap = Bitmap::new(size as usize);
        for &u in &unit_residues {
            bitmap.set(u as usize);
        }
        let mut j = 1;
        while (spec.k() as u64) * (j as u64) < n as u64 {
            let shift = spec.k() * j;
            for &u in &unit_residues {
                let el = spec.element_of_index(u as u64);
                let shifted = spec.shift_up(&el, shift);
                bitmap.set(spec.index_of(&shifted) as usize);
            }
            j += 1;
        }
        let summands = bitmap.indices();

        Ok(PowerResidues {
            spec: *spec,
            hensel,
            unit_residues,
            summands,
        })
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    /// The Hensel precision M for this (p, e, k).
    pub fn hensel_precision(&self) -> u32 {
        self.hensel
    }

    /// Unit k-th power residues, sorted by dense index.
    pub fn unit_residue_indices(&self) -> &[u32] {
        &self.unit_residues
    }

    /// Unit residues together with the w^(k*j)-scaled copies.
    pub fn summand_indices(&self) -> &[u32] {
        &self.summands
    }

    /// Non-unit members of the summand set (the scaled copies).
    pub fn scaled_indices(&self) -> Vec<u32> {
        let p = self.spec.p();
        self.summands
            .iter()
            .copied()
            .filter(|s| s % p == 0)
            .collect()
    }

    pub fn unit_residues(&self) -> Vec<Element> {
        self.unit_residues
            .iter()
            .map(|&i| self.spec.element_of_index(i as u64))
            .collect()
    }

    pub fn summands(&self) -> Vec<Element> {
        self.summands
            .iter()
            .map(|&i| self.spec.element_of_index(i as u64))
            .collect()
    }

    pub fn contains_summand(&self, el: &Element) -> bool {
        self.summands
            .binary_search(&(self.spec.index_of(el) as u32))
            .is_ok()
    }

    /// Residue classes mod w^N reachable as finite sums of k-th powers:
    /// the closure of {0} under adding summands, by fixpoint iteration.
    pub fn attainable_indices(&self) -> Vec<u32> {
        let run = layered_counts(&self.spec, &self.summands, u16::MAX - 1);
        debug_assert!(run.saturated);
        let size = self.spec.ring_size().unwrap() as usize;
        (0..size as u32)
            .filter(|&i| run.plain(i as usize) != UNREACHED)
            .collect()
    }

    pub fn attainable_set(&self) -> Vec<Element> {
        self.attainable_indices()
            .iter()
            .map(|&i| self.spec.element_of_index(i as u64))
            .collect()
    }
}

/// Enumerate unit k-th power residues at the given spec precision.
pub fn enumerate_unit_residues(spec: &RingSpec) -> Result<Vec<Element>, Error> {
    Ok(PowerResidues::enumerate(spec)?.unit_residues())
}

/// The full summand set at the given spec precision.
pub fn full_summand_set(spec: &RingSpec) -> Result<Vec<Element>, Error> {
    Ok(PowerResidues::enumerate(spec)?.summands())
}

/// The attainable set at the given spec precision.
pub fn attainable_set(spec: &RingSpec) -> Result<Vec<Element>, Error> {
    Ok(PowerResidues::enumerate(spec)?.attainable_set())
}

struct Bitmap {
    words: Vec<u64>,
}

impl Bitmap {
    fn new(bits: usize) -> Bitmap {
        Bitmap {
            words: vec![0u64; bits.div_ceil(64)],
        }
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    fn or_assign(&mut self, other: &Bitmap) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    fn indices(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for (w, &word) in self.words.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros();
                out.push((w as u32) * 64 + b);
                bits &= bits - 1;
            }
        }
        out
    }
}

fn enumerate_unit_power_indices(spec: &RingSpec, size: u64) -> Vec<u32> {
    let p = spec.p();
    let e = spec.e() as usize;
    let n = spec.precision() as usize;
    let k = spec.k() as u64;
    let rest_space = size / p as u64; // digit vectors for positions 1..N

    let threads = rayon::current_num_threads().max(1);
    let chunk = rest_space.div_ceil(threads as u64).max(1);
    let ranges: Vec<(u64, u64)> = (0..threads as u64)
        .map(|t| (t * chunk, ((t + 1) * chunk).min(rest_space)))
        .filter(|(lo, hi)| lo < hi)
        .collect();

    let bitmap = ranges
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut local = Bitmap::new(size as usize);
            let mut digits = [0u32; MAX_PRECISION as usize];
            let mut power = [0u32; MAX_PRECISION as usize];
            // Decode the high digits of the range start once, then step the
            // odometer (positions 1..N in base p).
            let mut rest = lo;
            let mut r = lo;
            for i in 1..n {
                digits[i] = (r % p as u64) as u32;
                r /= p as u64;
            }
            while rest < hi {
                for d0 in 1..p {
                    digits[0] = d0;
                    pow_digits(p, e, &digits[..n], k, &mut power[..n]);
                    let mut idx = 0u64;
                    for i in (0..n).rev() {
                        idx = idx * p as u64 + power[i] as u64;
                    }
                    local.set(idx as usize);
                }
                rest += 1;
                // odometer increment on positions 1..N
                for d in digits[1..n].iter_mut() {
                    *d += 1;
                    if *d < p {
                        break;
                    }
                    *d = 0;
                }
            }
            local
        })
        .reduce(
            || Bitmap::new(size as usize),
            |mut a, b| {
                a.or_assign(&b);
                a
            },
        );

    bitmap.indices()
}
