//! Layered breadth-first sumset expansion over the dense ring.
//!
//! Layer n holds every residue class reachable as a sum of exactly n
//! summands that is not reachable with fewer. Counts are tracked in two
//! states per class: multisets containing no unit summand, and multisets
//! containing at least one (the anchor). The plain minimal count of a class
//! is the minimum of the two; the anchored count is what the upper-bound
//! engine consumes.

use rayon::prelude::*;

use crate::ring::{RingSpec, MAX_PRECISION};

pub(crate) const UNREACHED: u16 = u16::MAX;

/// Frontier sizes below this run sequentially; the commit phase is always
/// sequential so counts stay race-free.
const PAR_THRESHOLD: usize = 1 << 14;

pub(crate) struct LayeredCounts {
    /// Minimal summand count per class over multisets with no unit summand.
    pub no_anchor: Vec<u16>,
    /// Minimal summand count per class over multisets with >= 1 unit summand.
    pub anchored: Vec<u16>,
    /// True when the expansion reached a fixpoint before the layer cap.
    pub saturated: bool,
}

impl LayeredCounts {
    pub fn plain(&self, idx: usize) -> u16 {
        self.no_anchor[idx].min(self.anchored[idx])
    }

    pub fn is_attainable(&self, idx: usize) -> bool {
        self.plain(idx) != UNREACHED
    }
}

struct IndexRing {
    p: u32,
    e: usize,
    n: usize,
    pow: Vec<u64>,
}

impl IndexRing {
    fn new(spec: &RingSpec) -> IndexRing {
        let n = spec.precision() as usize;
        let p = spec.p();
        let mut pow = vec![0u64; n];
        let mut v = 1u64;
        for entry in pow.iter_mut() {
            *entry = v;
            v *= p as u64;
        }
        IndexRing {
            p,
            e: spec.e() as usize,
            n,
            pow,
        }
    }

    fn decode(&self, mut idx: u64, out: &mut [u32]) {
        let p = self.p as u64;
        for d in out[..self.n].iter_mut() {
            *d = (idx % p) as u32;
            idx /= p;
        }
    }

    /// Index of the ring sum of two canonical digit vectors.
    #[inline]
    fn add_encode(&self, a: &[u32], b: &[u32]) -> u64 {
        let mut carry = [0u32; MAX_PRECISION as usize];
        let mut idx = 0u64;
        for i in 0..self.n {
            let mut t = a[i] + b[i] + carry[i];
            let mut c = 0;
            while t >= self.p {
                t -= self.p;
                c += 1;
            }
            if i + self.e < self.n {
                carry[i + self.e] += c;
            }
            idx += t as u64 * self.pow[i];
        }
        idx
    }
}

/// Two-state layered minimal-count table for the ring of `spec`, generated
/// by the given summand indices (zero excluded by construction; using fewer
/// summands plays the role of adding zero).
pub(crate) fn layered_counts(spec: &RingSpec, summands: &[u32], layer_cap: u16) -> LayeredCounts {
    let size = spec
        .ring_size()
        .expect("ring size must fit u64 (checked by callers)") as usize;
    let ring = IndexRing::new(spec);

    let summand_digits: Vec<Vec<u32>> = summands
        .iter()
        .map(|&s| {
            let mut d = vec![0u32; ring.n];
            ring.decode(s as u64, &mut d);
            d
        })
        .collect();

    let mut no_anchor = vec![UNREACHED; size];
    let mut anchored = vec![UNREACHED; size];
    no_anchor[0] = 0;

    // Frontiers of classes first reached at the previous layer, per state.
    let mut frontier_no: Vec<u32> = vec![0];
    let mut frontier_anch: Vec<u32> = Vec::new();
    let mut saturated = false;

    for layer in 1..=layer_cap {
        // Targets reached from the no-anchor frontier stay anchorless only
        // through non-unit summands; a unit summand sets the anchor.
        let gen_no = expand(&ring, &frontier_no, &summand_digits, Some(false), &no_anchor);
        let mut gen_anch = expand(&ring, &frontier_no, &summand_digits, Some(true), &anchored);
        gen_anch.extend(expand(
            &ring,
            &frontier_anch,
            &summand_digits,
            None,
            &anchored,
        ));

        let mut next_no = Vec::new();
        for idx in gen_no {
            let i = idx as usize;
            if no_anchor[i] == UNREACHED {
                no_anchor[i] = layer;
                next_no.push(idx as u32);
            }
        }
        let mut next_anch = Vec::new();
        for idx in gen_anch {
            let i = idx as usize;
            if anchored[i] == UNREACHED {
                anchored[i] = layer;
                next_anch.push(idx as u32);
            }
        }

        frontier_no = next_no;
        frontier_anch = next_anch;
        if frontier_no.is_empty() && frontier_anch.is_empty() {
            saturated = true;
            break;
        }
    }

    // Generation reads only counts committed in earlier layers, so parallel
    // chunks stay race-free; the commit loops above dedupe within a layer.
    fn expand(
        ring: &IndexRing,
        frontier: &[u32],
        summand_digits: &[Vec<u32>],
        unit_filter: Option<bool>,
        counts: &[u16],
    ) -> Vec<u64> {
        let chosen: Vec<&Vec<u32>> = summand_digits
            .iter()
            .filter(|d| match unit_filter {
                None => true,
                Some(want_unit) => (d[0] != 0) == want_unit,
            })
            .collect();
        if chosen.is_empty() || frontier.is_empty() {
            return Vec::new();
        }
        let work = frontier.len().saturating_mul(chosen.len());
        let run_chunk = |chunk: &[u32]| -> Vec<u64> {
            let mut xd = [0u32; MAX_PRECISION as usize];
            let mut out = Vec::new();
            for &x in chunk {
                ring.decode(x as u64, &mut xd);
                for sd in &chosen {
                    let y = ring.add_encode(&xd[..ring.n], sd);
                    if counts[y as usize] == UNREACHED {
                        out.push(y);
                    }
                }
            }
            out
        };
        if work < PAR_THRESHOLD {
            run_chunk(frontier)
        } else {
            let chunk = (frontier.len() / (rayon::current_num_threads() * 4)).max(1024);
            frontier
                .par_chunks(chunk)
                .map(run_chunk)
                .reduce(Vec::new, |mut a, mut b| {
                    a.append(&mut b);
                    a
                })
        }
    }

    LayeredCounts {
        no_anchor,
        anchored,
        saturated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_direct_enumeration_mod_8() {
        // p = 2, e = 1, N = 3; summands {1, 4} (squares mod 8).
        let spec = RingSpec::new(2, 1, 2, 3).unwrap();
        let run = layered_counts(&spec, &[1, 4], 32);
        assert!(run.saturated);
        // plain minimal counts over {1, 4} mod 8
        let expected = [0u16, 1, 2, 3, 1, 2, 3, 4];
        for (idx, &want) in expected.iter().enumerate() {
            assert_eq!(run.plain(idx), want, "class {idx}");
        }
        // 4 alone reaches class 4 with no unit; anchored needs 1+1+1+1
        assert_eq!(run.no_anchor[4], 1);
        assert_eq!(run.anchored[4], 4);
        // anchored bound is never below the plain bound
        for idx in 0..8 {
            assert!(run.anchored[idx] >= run.plain(idx));
        }
    }

    #[test]
    fn anchorless_state_ignores_unit_summands() {
        let spec = RingSpec::new(3, 1, 2, 2).unwrap();
        // summands: 1 (unit), 3 (non-unit)
        let run = layered_counts(&spec, &[1, 3], 32);
        // 6 = 3 + 3 without units; 1 + 1 + 1 + 3 = 6 anchored
        assert_eq!(run.no_anchor[6], 2);
        assert_eq!(run.anchored[6], 4);
    }
}
