//! Waring data mod p: nonzero k-th power residues of Z/pZ, the minimal
//! zero-sum count g_0, and the unramified shortcut.
//!
//! g_0(p, k) is the least n such that some multiset of n nonzero k-th
//! powers sums to 0 mod p; it always satisfies g_0 <= p. It is *not* the
//! Waring number of Z_p in general: g_0(7, 3) = 2 while g_{7,1}(3) = 3.

use crate::engine::{waring_number_direct, Options, WaringResult};
use crate::error::Error;
use crate::ring::RingSpec;

/// Nonzero k-th power residues mod p together with g_0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimePowerData {
    pub p: u32,
    pub k: u32,
    pub residues: Vec<u32>,
    pub g0: u32,
}

fn validate_prime(p: u32) -> Result<(), Error> {
    // RingSpec construction performs the trial-division primality check.
    RingSpec::new(p, 1, 1, 1).map(|_| ())
}

fn pow_mod(mut x: u64, mut k: u32, p: u64) -> u64 {
    let mut acc = 1u64;
    x %= p;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * x % p;
        }
        x = x * x % p;
        k >>= 1;
    }
    acc
}

/// { x^k mod p : 1 <= x <= p-1 }, sorted.
pub fn power_residues_mod_p(p: u32, k: u32) -> Result<Vec<u32>, Error> {
    validate_prime(p)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let mut residues: Vec<u32> = (1..p as u64).map(|x| pow_mod(x, k, p as u64) as u32).collect();
    residues.sort_unstable();
    residues.dedup();
    Ok(residues)
}

/// Minimal number of nonzero k-th powers in Z/pZ summing to 0, by layered
/// breadth-first expansion over Z/pZ. Terminates within p layers.
pub fn g0(p: u32, k: u32) -> Result<u32, Error> {
    validate_prime(p)?;
    if k < 2 {
        return Err(Error::InvalidParameter("g0 requires k >= 2".into()));
    }
    let residues = power_residues_mod_p(p, k)?;
    let p = p as usize;
    let mut reached = vec![false; p];
    let mut frontier: Vec<u32> = residues.clone();
    for r in &frontier {
        reached[*r as usize] = true;
    }
    for layer in 1..=p as u32 {
        if reached[0] {
            return Ok(layer);
        }
        let mut next = Vec::new();
        for &x in &frontier {
            for &r in &residues {
                let y = (x + r) % p as u32;
                if !reached[y as usize] {
                    reached[y as usize] = true;
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    unreachable!("g0 is at most p");
}

pub fn prime_power_data(p: u32, k: u32) -> Result<PrimePowerData, Error> {
    Ok(PrimePowerData {
        p,
        k,
        residues: power_residues_mod_p(p, k)?,
        g0: g0(p, k)?,
    })
}

/// Shortcut for p not dividing k: g_{p,e}(k) equals g_{p,1}(k), so compute
/// at e = 1 and relabel. Errors with `NotApplicable` when p divides k.
pub fn delegate_unramified(p: u32, e: u32, k: u32, opts: &Options) -> Result<WaringResult, Error> {
    RingSpec::new(p, e, k, 1)?;
    if k % p == 0 {
        return Err(Error::NotApplicable { p, k });
    }
    let mut result = waring_number_direct(p, 1, k, opts)?;
    result.e = e;
    result.via_prime_field = true;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g0_examples() {
        assert_eq!(g0(7, 3).unwrap(), 2); // 1 + 6 = 0 mod 7
        for k in [2, 3, 4, 5, 10] {
            assert_eq!(g0(2, k).unwrap(), 2); // 1 + 1 = 0 mod 2
        }
        assert_eq!(g0(5, 4).unwrap(), 5); // fourth powers mod 5 are {1}
    }

    #[test]
    fn g0_brute_force_cross_check() {
        // Enumerate multisets directly for a few (p, k).
        for (p, k) in [(3u32, 2u32), (5, 2), (7, 3), (11, 5), (13, 3)] {
            let residues = power_residues_mod_p(p, k).unwrap();
            let mut best = None;
            let mut sums = vec![0u32];
            for n in 1..=p {
                let mut next = Vec::new();
                for &s in &sums {
                    for &r in &residues {
                        next.push((s + r) % p);
                    }
                }
                next.sort_unstable();
                next.dedup();
                if next.contains(&0) {
                    best = Some(n);
                    break;
                }
                sums = next;
            }
            assert_eq!(g0(p, k).unwrap(), best.unwrap(), "(p,k) = ({p},{k})");
        }
    }

    #[test]
    fn g0_depends_only_on_gcd_with_p_minus_one() {
        for p in [5u32, 7, 11, 13] {
            for k in 2..=12 {
                let g = gcd(k, p - 1).max(2);
                assert_eq!(
                    power_residues_mod_p(p, k).unwrap(),
                    power_residues_mod_p(p, if gcd(k, p - 1) == 1 { 1 } else { g }).unwrap()
                );
                if gcd(k, p - 1) >= 2 {
                    assert_eq!(g0(p, k).unwrap(), g0(p, g).unwrap());
                }
            }
        }
        fn gcd(a: u32, b: u32) -> u32 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
    }

    #[test]
    fn delegate_examples() {
        let opts = Options::default();
        let r = delegate_unramified(2, 4, 3, &opts).unwrap();
        assert_eq!(r.g(), Some(2));
        assert_eq!(r.e, 4);
        assert!(r.via_prime_field);

        let r = delegate_unramified(7, 3, 3, &opts).unwrap();
        assert_eq!(r.g(), Some(3));

        assert_eq!(
            delegate_unramified(3, 6, 6, &opts).err(),
            Some(Error::NotApplicable { p: 3, k: 6 })
        );
    }

    #[test]
    fn g0_is_not_the_waring_number() {
        // The two quantities differ at (7, 3).
        assert_eq!(g0(7, 3).unwrap(), 2);
        let r = waring_number_direct(7, 1, 3, &Options::default()).unwrap();
        assert_eq!(r.g(), Some(3));
    }
}
