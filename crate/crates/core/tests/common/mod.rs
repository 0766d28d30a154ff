#![allow(dead_code)]

use hfsplice_core::cfk_complex::{CfkComplex, KnotNormalForm};
use hfsplice_core::knot_library;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Sample {
    pub label: String,
    pub complex: CfkComplex,
    pub nf: KnotNormalForm,
}

/// Symmetric staircase of genus `g` with random step lengths.
fn random_staircase(rng: &mut impl Rng, g: u32) -> (String, CfkComplex) {
    let mut parts = Vec::new();
    let mut left = g;
    while left > 0 {
        let p = rng.gen_range(1..=left);
        parts.push(p);
        left -= p;
    }
    let k = parts.len();
    let steps: Vec<u32> = (0..k).flat_map(|i| [parts[i], parts[k - 1 - i]]).collect();
    (format!("staircase{steps:?}"), CfkComplex::staircase(&steps))
}

fn random_prime(rng: &mut impl Rng, max_genus: u32) -> (String, CfkComplex) {
    let (label, c) = if rng.gen_bool(0.15) {
        let f = knot_library::get("figure8").unwrap();
        ("figure8".to_string(), f.complex().unwrap().clone())
    } else {
        let g = rng.gen_range(1..=max_genus);
        random_staircase(rng, g)
    };
    if rng.gen_bool(0.5) {
        (format!("m({label})"), c.mirror())
    } else {
        (label, c)
    }
}

fn genus_of(c: &CfkComplex) -> u32 {
    c.genus().unsigned_abs()
}

/// Random knots in S³ with genus ≤ 4 and normal forms with at most five
/// vertical arrows: staircases, their mirrors, the figure-eight and
/// connected sums of two of these.
pub fn random_family(count: usize, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let (mut label, mut complex) = random_prime(&mut rng, 4);
        if genus_of(&complex) < 4 && rng.gen_bool(0.3) {
            let (l2, c2) = random_prime(&mut rng, 4 - genus_of(&complex));
            if genus_of(&complex) + genus_of(&c2) <= 4 {
                label = format!("{label} # {l2}");
                complex = complex.tensor(&c2);
            }
        }
        let nf = complex.simplify().unwrap_or_else(|e| panic!("{label}: {e}"));
        if nf.n > 5 || nf.genus() > 4 {
            continue;
        }
        out.push(Sample { label, complex, nf });
    }
    out
}

pub fn random_pairs(samples: &[Sample], count: usize, seed: u64) -> Vec<(&Sample, &Sample)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (
                samples.choose(&mut rng).unwrap(),
                samples.choose(&mut rng).unwrap(),
            )
        })
        .collect()
}
