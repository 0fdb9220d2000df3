//! The Waring-number engine.
//!
//! Upper bounds are certified by anchored decompositions at the Hensel
//! precision M: a residue class r mod w^M written as one *unit* k-th power
//! residue (the anchor) plus further k-th power residues proves that every
//! element alpha congruent to r is a sum of that many exact k-th powers.
//! Subtracting exact lifts of the non-anchor summands from alpha leaves a
//! unit congruent to the anchor mod w^M, which is an exact k-th power by
//! Hensel's lemma. The bound for the whole ring takes the worst class, with
//! classes divisible by w^k removed when every class of valuation below k
//! is attainable (their elements reduce by exact division by w^(k*j) into
//! covered classes).
//!
//! Lower bounds are certified exhaustively: at an extended precision N',
//! breadth-first sumset expansion finds a residue class that is not a sum
//! of m or fewer k-th power residues, so no element of that class is a sum
//! of m or fewer k-th powers. Both certificates re-verify independently.

use rayon::prelude::*;

use crate::error::Error;
use crate::powers::{dense_size, hensel_precision, nu_p, PowerResidues, DENSE_SET_CAP};
use crate::ring::{Element, RingSpec, MAX_PRECISION};
use crate::sumset::{layered_counts, LayeredCounts, UNREACHED};

/// Guard for the adaptive lower-bound precision schedule: stop raising N'
/// when the estimated expansion work (ring size times summand count) would
/// pass this.
const WORK_CAP: u64 = 6_000_000_000;

/// Hard cap on breadth-first layers in the upper-bound table; in-scope
/// fixpoints arrive within a few dozen layers.
const UPPER_LAYER_CAP: u16 = u16::MAX - 1;

/// Engine knobs. `n_cap` caps the lower-bound expansion depth;
/// `lb_precision` pins N' instead of the adaptive schedule; `force_direct`
/// disables the unramified shortcut for p not dividing k.
#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub lb_precision: Option<u32>,
    pub n_cap: u32,
    pub force_direct: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            lb_precision: None,
            n_cap: 32,
            force_direct: false,
        }
    }
}

/// An anchored decomposition of one residue class mod w^M: the class equals
/// anchor + sum(tail) where the anchor is a unit k-th power residue and the
/// tail members are k-th power residues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub spec: RingSpec,
    pub target: Element,
    pub anchor: Element,
    pub tail: Vec<Element>,
}

impl Decomposition {
    pub fn size(&self) -> u32 {
        1 + self.tail.len() as u32
    }

    pub fn tail_sum(&self) -> Element {
        let mut acc = self.spec.zero();
        for t in &self.tail {
            acc = self.spec.add(&acc, t);
        }
        acc
    }

    /// Re-check by exact ring arithmetic: the anchor is a unit and
    /// anchor + sum(tail) equals the target.
    pub fn verify(&self) -> bool {
        self.spec.is_unit(&self.anchor)
            && self.spec.add(&self.anchor, &self.tail_sum()) == self.target
    }

    /// Full re-check: arithmetic plus membership of the anchor in the unit
    /// residue set and of every tail member in the summand set.
    pub fn verify_full(&self, powers: &PowerResidues) -> bool {
        self.verify()
            && powers
                .unit_residue_indices()
                .binary_search(&(self.spec.index_of(&self.anchor) as u32))
                .is_ok()
            && self.tail.iter().all(|t| powers.contains_summand(t))
    }
}

/// Exhaustive non-representability certificate: the witness class mod w^N'
/// is not a sum of m or fewer k-th power residues, hence no element of the
/// class is a sum of m or fewer k-th powers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBoundCertificate {
    /// Spec at the extended precision N'.
    pub spec: RingSpec,
    pub witness: Element,
    pub m: u32,
}

impl LowerBoundCertificate {
    /// The certified lower bound m + 1.
    pub fn bound(&self) -> u32 {
        self.m + 1
    }

    pub fn extended_precision(&self) -> u32 {
        self.spec.precision()
    }

    /// Independent re-run of the sumset expansion at N'; true when the
    /// witness class is confirmed absent from the <= m-fold sumset.
    pub fn verify(&self) -> Result<bool, Error> {
        let powers = PowerResidues::enumerate(&self.spec)?;
        let layer_cap = clamp_cap(self.m + 2);
        let run = layered_counts(&self.spec, powers.summand_indices(), layer_cap);
        let idx = self.spec.index_of(&self.witness) as usize;
        Ok(run.plain(idx) == UNREACHED || run.plain(idx) as u32 > self.m)
    }
}

/// A fully resolved or bounded Waring number with both certificates.
#[derive(Debug, Clone)]
pub struct WaringResult {
    pub p: u32,
    pub e: u32,
    pub k: u32,
    /// Hensel precision of the computation (of e = 1 when delegated).
    pub hensel: u32,
    /// Extended precision N' of the lower-bound certificate.
    pub lb_precision: u32,
    pub lower: u32,
    pub upper: u32,
    pub witness: LowerBoundCertificate,
    pub worst: Decomposition,
    /// True when p does not divide k and the value was computed at e = 1.
    pub via_prime_field: bool,
}

impl WaringResult {
    /// The Waring number, when the bounds meet.
    pub fn g(&self) -> Option<u32> {
        (self.lower == self.upper).then_some(self.lower)
    }

    pub fn is_resolved(&self) -> bool {
        self.lower == self.upper
    }
}

fn clamp_cap(n_cap: u32) -> u16 {
    n_cap.min(u16::MAX as u32 - 1) as u16
}

/// Minimal summand counts per residue class for an arbitrary summand set,
/// by layered breadth-first expansion (layer n = layer n-1 plus one
/// summand), stopping at saturation or after `n_max` layers.
pub struct MinCountTable {
    spec: RingSpec,
    counts: LayeredCounts,
}

impl MinCountTable {
    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    /// Minimal number of summands reaching the class, if reached.
    pub fn count_of(&self, el: &Element) -> Option<u32> {
        self.count_of_index(self.spec.index_of(el))
    }

    pub fn count_of_index(&self, idx: u64) -> Option<u32> {
        let c = self.counts.plain(idx as usize);
        (c != UNREACHED).then_some(c as u32)
    }

    /// True when the expansion reached its fixpoint, i.e. reached classes
    /// are exactly the attainable ones.
    pub fn saturated(&self) -> bool {
        self.counts.saturated
    }

    pub fn reached_indices(&self) -> Vec<u64> {
        (0..self.counts.no_anchor.len() as u64)
            .filter(|&i| self.counts.is_attainable(i as usize))
            .collect()
    }

    /// Reached class with the largest minimal count (smallest index on
    /// ties), together with that count.
    pub fn max_reached(&self) -> (u64, u32) {
        let mut best_idx = 0u64;
        let mut best = 0u32;
        for idx in 0..self.counts.no_anchor.len() {
            let c = self.counts.plain(idx);
            if c != UNREACHED && (c as u32) > best {
                best = c as u32;
                best_idx = idx as u64;
            }
        }
        (best_idx, best)
    }
}

/// Layered minimal counts over an explicit summand set.
pub fn min_counts(
    spec: &RingSpec,
    summands: &[Element],
    n_max: u32,
) -> Result<MinCountTable, Error> {
    dense_size(spec)?;
    let indices: Vec<u32> = summands.iter().map(|s| spec.index_of(s) as u32).collect();
    let counts = layered_counts(spec, &indices, clamp_cap(n_max));
    Ok(MinCountTable { spec: *spec, counts })
}

/// Anchored minimal-count table at one precision, with decomposition
/// reconstruction.
pub struct UpperBoundTable {
    spec: RingSpec,
    summands: Vec<u32>,
    counts: LayeredCounts,
}

impl UpperBoundTable {
    /// Build the table from enumerated power residues. The enumeration
    /// precision must be at least the Hensel precision; the engine always
    /// uses exactly M.
    pub fn compute(powers: &PowerResidues) -> Result<UpperBoundTable, Error> {
        let spec = *powers.spec();
        let summands = powers.summand_indices().to_vec();
        let counts = layered_counts(&spec, &summands, UPPER_LAYER_CAP);
        if !counts.saturated {
            return Err(Error::InvalidParameter(
                "anchored expansion did not reach a fixpoint within the layer cap".into(),
            ));
        }
        Ok(UpperBoundTable {
            spec,
            summands,
            counts,
        })
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    pub fn is_attainable(&self, idx: u64) -> bool {
        self.counts.is_attainable(idx as usize)
    }

    /// Minimal anchored count for the class: minimal n such that the class
    /// is a sum of n summands at least one of which is a unit residue.
    pub fn anchored_count(&self, idx: u64) -> Option<u32> {
        let c = self.counts.anchored[idx as usize];
        (c != UNREACHED).then_some(c as u32)
    }

    /// Minimal count without the anchor constraint.
    pub fn plain_count(&self, idx: u64) -> Option<u32> {
        let c = self.counts.plain(idx as usize);
        (c != UNREACHED).then_some(c as u32)
    }

    pub fn attainable_indices(&self) -> Vec<u64> {
        (0..self.counts.no_anchor.len() as u64)
            .filter(|&i| self.is_attainable(i))
            .collect()
    }

    /// Valuation levels whose classes are attainable without exception.
    /// An element landing anywhere on such a level after exact division by
    /// a power of w^k is certainly covered by the anchored table.
    fn fully_attainable_levels(&self) -> Vec<bool> {
        let n = self.spec.precision() as usize;
        let p = self.spec.p() as u64;
        let size = self.counts.no_anchor.len() as u64;
        let mut all_attainable = vec![true; n];
        for idx in 1..size {
            if !self.is_attainable(idx) {
                let mut v = 0usize;
                let mut x = idx;
                while x % p == 0 {
                    x /= p;
                    v += 1;
                }
                all_attainable[v] = false;
            }
        }
        all_attainable
    }

    /// The certified global upper bound and its worst class.
    ///
    /// A class of valuation v is excluded from the maximum when its
    /// elements can divide exactly by some w^(k*q), q >= 1, and land on a
    /// valuation level lambda = v - k*q all of whose classes are attainable
    /// (the landing class is then covered by the table no matter which
    /// digits follow). The zero class is excluded when such a landing level
    /// exists for every residue of v mod k among valuations >= N; otherwise
    /// it contributes its own anchored decomposition.
    pub fn global_upper(&self) -> (u32, u64) {
        let size = self.counts.no_anchor.len() as u64;
        let k = self.spec.k();
        let n = self.spec.precision();
        let p = self.spec.p() as u64;

        let levels = self.fully_attainable_levels();
        // Minimal fully attainable level per residue class of v mod k;
        // minimality keeps landing levels themselves unexcludable.
        let mut landing: Vec<Option<u32>> = vec![None; k as usize];
        for (lambda, &ok) in levels.iter().enumerate() {
            let rho = (lambda as u32 % k) as usize;
            if ok && landing[rho].is_none() {
                landing[rho] = Some(lambda as u32);
            }
        }
        let excludable_level = |v: u32| -> bool {
            v >= k && landing[(v % k) as usize].map_or(false, |l| l + k <= v)
        };
        let zero_excluded = (0..k).all(|rho| {
            // Smallest valuation >= N congruent to rho mod k.
            let v_min = n + (rho + k - n % k) % k;
            landing[rho as usize].map_or(false, |l| l + k <= v_min)
        });

        let mut best = 0u32;
        let mut best_idx = 0u64;
        for idx in 0..size {
            if !self.is_attainable(idx) {
                continue;
            }
            if idx == 0 {
                if zero_excluded {
                    continue;
                }
            } else {
                let mut v = 0u32;
                let mut x = idx;
                while x % p == 0 {
                    x /= p;
                    v += 1;
                }
                if excludable_level(v) {
                    continue;
                }
            }
            let b = self.counts.anchored[idx as usize] as u32;
            debug_assert_ne!(b, UNREACHED as u32, "attainable class without anchor");
            if b > best {
                best = b;
                best_idx = idx;
            }
        }
        (best, best_idx)
    }

    /// Reconstruct one minimal anchored decomposition of the class by
    /// walking the count tables backwards (first matching summand in index
    /// order at each step).
    pub fn decomposition(&self, idx: u64) -> Option<Decomposition> {
        let total = self.counts.anchored[idx as usize];
        if total == UNREACHED {
            return None;
        }
        let spec = &self.spec;
        let p = spec.p();
        let neg_summands: Vec<Element> = self
            .summands
            .iter()
            .map(|&s| spec.neg(&spec.element_of_index(s as u64)))
            .collect();

        let mut cur = idx;
        let mut pending_anchor = true;
        let mut remaining = total;
        let mut anchor: Option<Element> = None;
        let mut tail: Vec<Element> = Vec::new();

        while remaining > 0 {
            let cur_el = spec.element_of_index(cur);
            let mut advanced = false;
            for (si, &s) in self.summands.iter().enumerate() {
                let prev_el = spec.add(&cur_el, &neg_summands[si]);
                let prev = spec.index_of(&prev_el) as usize;
                let unit = s % p != 0;
                let step = if pending_anchor {
                    if unit && self.counts.no_anchor[prev] == remaining - 1 {
                        anchor = Some(spec.element_of_index(s as u64));
                        pending_anchor = false;
                        true
                    } else if self.counts.anchored[prev] == remaining - 1 {
                        tail.push(spec.element_of_index(s as u64));
                        true
                    } else {
                        false
                    }
                } else if !unit && self.counts.no_anchor[prev] == remaining - 1 {
                    tail.push(spec.element_of_index(s as u64));
                    true
                } else {
                    false
                };
                if step {
                    cur = prev as u64;
                    remaining -= 1;
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                debug_assert!(false, "no predecessor found during reconstruction");
                return None;
            }
        }
        debug_assert_eq!(cur, 0);
        let anchor = anchor?;
        Some(Decomposition {
            spec: *spec,
            target: spec.element_of_index(idx),
            anchor,
            tail,
        })
    }
}

/// Anchored upper-bound table at exactly the Hensel precision M.
pub fn anchored_upper_bounds(p: u32, e: u32, k: u32) -> Result<UpperBoundTable, Error> {
    let spec_m = spec_at_hensel(p, e, k)?;
    let powers = PowerResidues::enumerate(&spec_m)?;
    UpperBoundTable::compute(&powers)
}

fn spec_at_hensel(p: u32, e: u32, k: u32) -> Result<RingSpec, Error> {
    let probe = RingSpec::new(p, e, k, 1)?;
    let m = hensel_precision(&probe);
    if m > MAX_PRECISION {
        return Err(Error::RingTooLarge { p, n: m, cap: 24 });
    }
    let spec = RingSpec::new(p, e, k, m)?;
    dense_size(&spec)?;
    Ok(spec)
}

struct LowerRun {
    cert: LowerBoundCertificate,
    summand_count: usize,
}

fn lower_bound_run(base: &RingSpec, n_prime: u32, n_cap: u32) -> Result<LowerRun, Error> {
    let m = hensel_precision(base);
    if n_prime < m {
        return Err(Error::PrecisionTooLow {
            given: n_prime,
            required: m,
        });
    }
    if n_prime > MAX_PRECISION {
        return Err(Error::RingTooLarge {
            p: base.p(),
            n: n_prime,
            cap: 24,
        });
    }
    let spec = base.with_precision(n_prime)?;
    dense_size(&spec)?;
    let powers = PowerResidues::enumerate(&spec)?;
    let run = layered_counts(&spec, powers.summand_indices(), clamp_cap(n_cap));

    let mut best = 0u32;
    let mut best_idx = 0u64;
    for idx in 0..spec.ring_size().unwrap() {
        let c = run.plain(idx as usize);
        if c != UNREACHED && (c as u32) > best {
            best = c as u32;
            best_idx = idx;
        }
    }
    Ok(LowerRun {
        cert: LowerBoundCertificate {
            spec,
            witness: spec.element_of_index(best_idx),
            m: best.saturating_sub(1),
        },
        summand_count: powers.summand_indices().len(),
    })
}

/// Exhaustive lower-bound certificate at extended precision `n_prime`: the
/// reached class with the largest minimal count, certified unreachable with
/// one summand fewer. The spec's own precision is ignored.
pub fn lower_bound(
    base: &RingSpec,
    n_prime: u32,
    n_cap: u32,
) -> Result<LowerBoundCertificate, Error> {
    Ok(lower_bound_run(base, n_prime, n_cap)?.cert)
}

/// Compute g_{p,e}(k) with certificates. For p not dividing k and e > 1 the
/// value is computed at e = 1 (the rings share their Waring numbers when p
/// does not divide k) unless `force_direct` is set.
pub fn waring_number(p: u32, e: u32, k: u32, opts: &Options) -> Result<WaringResult, Error> {
    RingSpec::new(p, e, k, 1)?;
    if k % p != 0 && e > 1 && !opts.force_direct {
        let mut result = waring_number_direct(p, 1, k, opts)?;
        result.e = e;
        result.via_prime_field = true;
        return Ok(result);
    }
    waring_number_direct(p, e, k, opts)
}

/// Direct computation in Z_p[w]/(w^N) regardless of divisibility.
pub fn waring_number_direct(
    p: u32,
    e: u32,
    k: u32,
    opts: &Options,
) -> Result<WaringResult, Error> {
    let spec_m = spec_at_hensel(p, e, k)?;
    let m = spec_m.precision();

    let powers_m = PowerResidues::enumerate(&spec_m)?;
    let table = UpperBoundTable::compute(&powers_m)?;
    let (upper, worst_idx) = table.global_upper();
    let worst = table
        .decomposition(worst_idx)
        .expect("worst class has an anchored decomposition");
    assert!(worst.verify(), "emitted decomposition failed re-check");

    let run = match opts.lb_precision {
        Some(np) => lower_bound_run(&spec_m, np, opts.n_cap)?,
        None => {
            // Adaptive schedule: start at M, raise N' one digit at a time
            // until the bounds meet, the dense cap or M + k is hit, or the
            // next step would exceed the work guard.
            let mut np = m;
            let mut run = lower_bound_run(&spec_m, np, opts.n_cap)?;
            loop {
                if run.cert.bound() >= upper || np >= m + k || np >= MAX_PRECISION {
                    break;
                }
                let next_size = (p as u64).checked_pow(np + 1);
                let feasible = match next_size {
                    Some(sz) => {
                        sz <= DENSE_SET_CAP
                            && sz.saturating_mul(run.summand_count as u64) <= WORK_CAP
                    }
                    None => false,
                };
                if !feasible {
                    break;
                }
                np += 1;
                run = lower_bound_run(&spec_m, np, opts.n_cap)?;
            }
            run
        }
    };

    let lower = run.cert.bound();
    assert!(
        lower <= upper,
        "lower bound {lower} exceeds upper bound {upper} for ({p},{e},{k})"
    );

    Ok(WaringResult {
        p,
        e,
        k,
        hensel: m,
        lb_precision: run.cert.extended_precision(),
        lower,
        upper,
        witness: run.cert,
        worst,
        via_prime_field: false,
    })
}

/// One row of the decomposition table: an attainable class mod w^M with its
/// minimal anchored decomposition.
#[derive(Debug, Clone)]
pub struct DecompositionRow {
    pub class: Element,
    pub count: u32,
    pub decomposition: Decomposition,
}

/// Decomposition table at the Hensel precision: one row per attainable
/// class mod w^M, sorted by dense index.
pub fn decomposition_table(p: u32, e: u32, k: u32) -> Result<Vec<DecompositionRow>, Error> {
    let table = anchored_upper_bounds(p, e, k)?;
    let spec = *table.spec();
    let mut rows = Vec::new();
    for idx in table.attainable_indices() {
        let decomposition = table
            .decomposition(idx)
            .expect("attainable class has an anchored decomposition");
        debug_assert!(decomposition.verify());
        rows.push(DecompositionRow {
            class: spec.element_of_index(idx),
            count: decomposition.size(),
            decomposition,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Violation,
    Unresolved,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::Violation => "violation",
            Verdict::Unresolved => "unresolved",
        }
    }
}

/// One cell of the conjecture scan grid for p = 2.
#[derive(Debug, Clone)]
pub struct ScanCell {
    pub e: u32,
    pub k: u32,
    pub gcd_exceeds_one: bool,
    pub lower: Option<u32>,
    pub upper: Option<u32>,
    pub g: Option<u32>,
    pub baseline_g: Option<u32>,
    pub verdict: Verdict,
    pub note: Option<String>,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Empirical grid check over p = 2 of the comparison between g_{2,e}(k) and
/// g_{2,1}(k): for even k with gcd(e, k) > 1 the ramified value is expected
/// to drop strictly below the unramified one, and to match it otherwise.
/// This samples finitely many cells; it proves nothing beyond them.
pub fn scan_conjecture(
    e_range: (u32, u32),
    k_range: (u32, u32),
    step: u32,
    opts: &Options,
) -> Result<Vec<ScanCell>, Error> {
    if e_range.0 == 0 || k_range.0 == 0 || e_range.0 > e_range.1 || k_range.0 > k_range.1 {
        return Err(Error::InvalidParameter("empty or zero-based scan range".into()));
    }
    let step = step.max(1);
    let ks: Vec<u32> = (k_range.0..=k_range.1).step_by(step as usize).collect();
    let baselines: Vec<(u32, Result<WaringResult, Error>)> = ks
        .par_iter()
        .map(|&k| (k, waring_number(2, 1, k, opts)))
        .collect();

    let mut cells_in: Vec<(u32, u32)> = Vec::new();
    for e in e_range.0..=e_range.1 {
        for &k in &ks {
            cells_in.push((e, k));
        }
    }

    let cells: Vec<ScanCell> = cells_in
        .par_iter()
        .map(|&(e, k)| {
            let baseline = baselines
                .iter()
                .find(|(bk, _)| *bk == k)
                .and_then(|(_, r)| r.as_ref().ok().cloned());
            let baseline_g = baseline.as_ref().and_then(|r| r.g());
            let result = waring_number(2, e, k, opts);
            let (lower, upper, g, note) = match &result {
                Ok(r) => (Some(r.lower), Some(r.upper), r.g(), None),
                Err(err) => (None, None, None, Some(err.to_string())),
            };
            let gcd_exceeds_one = gcd(e, k) > 1;
            let verdict = match (g, baseline_g) {
                (Some(g), Some(bg)) => {
                    let expected = if k % 2 == 0 && gcd_exceeds_one {
                        g < bg
                    } else {
                        g == bg
                    };
                    if expected {
                        Verdict::Consistent
                    } else {
                        Verdict::Violation
                    }
                }
                _ => Verdict::Unresolved,
            };
            ScanCell {
                e,
                k,
                gcd_exceeds_one,
                lower,
                upper,
                g,
                baseline_g,
                verdict,
                note,
            }
        })
        .collect();

    Ok(cells)
}

/// Expose v_p(k) alongside the engine for callers formatting output.
pub fn p_adic_valuation(p: u32, k: u32) -> u32 {
    nu_p(p, k)
}
