//! Randomized exact-arithmetic invariants. All checks are integer-exact;
//! any mismatch is a hard failure, there are no tolerances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use waring::powers::enumerate_unit_residues;
use waring::{Element, RingSpec, Valuation};

const CASES: usize = 10_000;

fn specs() -> Vec<RingSpec> {
    [
        (2, 1, 4, 8),
        (2, 2, 6, 5),
        (2, 3, 10, 7),
        (3, 1, 9, 5),
        (3, 2, 6, 5),
        (3, 6, 6, 13),
        (5, 2, 3, 6),
        (7, 1, 3, 4),
    ]
    .iter()
    .map(|&(p, e, k, n)| RingSpec::new(p, e, k, n).unwrap())
    .collect()
}

fn rng_for(spec: &RingSpec) -> ChaCha8Rng {
    let seed = (spec.p() as u64) << 32 | (spec.e() as u64) << 16 | spec.k() as u64;
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_element(rng: &mut ChaCha8Rng, spec: &RingSpec) -> Element {
    let digits: Vec<u32> = (0..spec.precision())
        .map(|_| rng.gen_range(0..spec.p()))
        .collect();
    spec.element_from_digits(&digits).unwrap()
}

#[test]
fn ring_axioms_hold_exactly() {
    for spec in specs() {
        let mut rng = rng_for(&spec);
        let zero = spec.zero();
        let one = spec.one();
        for _ in 0..CASES {
            let a = random_element(&mut rng, &spec);
            let b = random_element(&mut rng, &spec);
            let c = random_element(&mut rng, &spec);

            assert_eq!(spec.add(&a, &b), spec.add(&b, &a));
            assert_eq!(
                spec.add(&spec.add(&a, &b), &c),
                spec.add(&a, &spec.add(&b, &c))
            );
            assert_eq!(spec.mul(&a, &b), spec.mul(&b, &a));
            assert_eq!(
                spec.mul(&spec.mul(&a, &b), &c),
                spec.mul(&a, &spec.mul(&b, &c))
            );
            assert_eq!(
                spec.mul(&a, &spec.add(&b, &c)),
                spec.add(&spec.mul(&a, &b), &spec.mul(&a, &c))
            );
            assert_eq!(spec.add(&a, &zero), a);
            assert_eq!(spec.mul(&a, &one), a);
            assert_eq!(spec.add(&a, &spec.neg(&a)), zero);
        }
    }
}

#[test]
fn from_integer_is_a_ring_homomorphism() {
    for spec in specs() {
        let mut rng = rng_for(&spec);
        for _ in 0..CASES {
            let m: i128 = rng.gen_range(-1_000_000_000_000i128..=1_000_000_000_000);
            let n: i128 = rng.gen_range(-1_000_000_000_000i128..=1_000_000_000_000);
            assert_eq!(
                spec.from_integer(m + n),
                spec.add(&spec.from_integer(m), &spec.from_integer(n))
            );
            assert_eq!(
                spec.from_integer(m * n),
                spec.mul(&spec.from_integer(m), &spec.from_integer(n))
            );
        }
    }
}

#[test]
fn p_embeds_as_omega_to_the_e() {
    for spec in specs() {
        if spec.e() < spec.precision() {
            assert_eq!(
                spec.from_integer(spec.p() as i128),
                spec.shift_up(&spec.one(), spec.e())
            );
        }
    }
}

#[test]
fn pow_adds_exponents() {
    for spec in specs() {
        let mut rng = rng_for(&spec);
        for _ in 0..1_000 {
            let a = random_element(&mut rng, &spec);
            let m1 = rng.gen_range(0..40u64);
            let m2 = rng.gen_range(0..40u64);
            assert_eq!(
                spec.pow(&a, m1 + m2),
                spec.mul(&spec.pow(&a, m1), &spec.pow(&a, m2))
            );
        }
    }
}

#[test]
fn truncation_commutes_with_arithmetic() {
    for spec in specs() {
        let mut rng = rng_for(&spec);
        for _ in 0..2_000 {
            let a = random_element(&mut rng, &spec);
            let b = random_element(&mut rng, &spec);
            let np = rng.gen_range(1..=spec.precision());
            let lo = spec.with_precision(np).unwrap();
            let ta = spec.truncate(&a, np).unwrap();
            let tb = spec.truncate(&b, np).unwrap();

            assert_eq!(spec.truncate(&spec.add(&a, &b), np).unwrap(), lo.add(&ta, &tb));
            assert_eq!(spec.truncate(&spec.mul(&a, &b), np).unwrap(), lo.mul(&ta, &tb));
            let m = rng.gen_range(0..12u64);
            assert_eq!(spec.truncate(&spec.pow(&a, m), np).unwrap(), lo.pow(&ta, m));
            assert_eq!(spec.truncate(&a, spec.precision()).unwrap(), a);
        }
    }
}

#[test]
fn valuation_is_additive_under_mul() {
    for spec in specs() {
        let mut rng = rng_for(&spec);
        for _ in 0..CASES {
            let a = random_element(&mut rng, &spec);
            let b = random_element(&mut rng, &spec);
            match (spec.valuation(&a), spec.valuation(&b)) {
                (Valuation::Finite(va), Valuation::Finite(vb)) if va + vb < spec.precision() => {
                    assert_eq!(
                        spec.valuation(&spec.mul(&a, &b)),
                        Valuation::Finite(va + vb)
                    );
                }
                // Deeper products truncate to zero.
                (Valuation::Finite(va), Valuation::Finite(vb)) if va + vb >= spec.precision() => {
                    assert_eq!(spec.valuation(&spec.mul(&a, &b)), Valuation::Infinite);
                }
                _ => assert_eq!(spec.valuation(&spec.mul(&a, &b)), Valuation::Infinite),
            }
        }
    }
}

#[test]
fn valuation_of_kth_powers() {
    for spec in specs() {
        let mut rng = rng_for(&spec);
        let k = spec.k() as u64;
        for _ in 0..2_000 {
            let a = random_element(&mut rng, &spec);
            let power = spec.pow(&a, k);
            match spec.valuation(&a) {
                Valuation::Finite(0) => {
                    assert_eq!(spec.valuation(&power), Valuation::Finite(0));
                }
                Valuation::Finite(v) if (v as u64) * k < spec.precision() as u64 => {
                    assert_eq!(spec.valuation(&power), Valuation::Finite(v * spec.k()));
                }
                _ => assert_eq!(spec.valuation(&power), Valuation::Infinite),
            }
        }
    }
}

#[test]
fn unit_residue_projection_is_consistent() {
    for (p, e, k, n) in [(2u32, 2u32, 6u32, 7u32), (3, 2, 6, 6), (2, 1, 4, 8)] {
        let hi = RingSpec::new(p, e, k, n).unwrap();
        let lo = hi.with_precision(n - 1).unwrap();
        let mut projected: Vec<u64> = enumerate_unit_residues(&hi)
            .unwrap()
            .iter()
            .map(|el| lo.index_of(&hi.truncate(el, n - 1).unwrap()))
            .collect();
        projected.sort_unstable();
        projected.dedup();
        let mut low: Vec<u64> = enumerate_unit_residues(&lo)
            .unwrap()
            .iter()
            .map(|el| lo.index_of(el))
            .collect();
        low.sort_unstable();
        assert_eq!(projected, low);
    }
}
