#![allow(dead_code)]

use infconvex::funcparse::builtin_with_arity;
use infconvex::{
    BoundedSequence, ConvexDomain, DiscreteDistribution, ScalarFunction, WeightSequence,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CONVEX_BUILTINS: [&str; 4] = ["exp", "square", "abs", "linear(1.5,-0.5)"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn geometric(r: f64) -> WeightSequence {
    WeightSequence::geometric(r).unwrap()
}

pub fn f(name: &str, arity: usize) -> ScalarFunction {
    builtin_with_arity(name, arity).unwrap()
}

/// One sample from each weight family.
pub fn families() -> Vec<WeightSequence> {
    vec![
        geometric(0.5),
        geometric(0.8),
        WeightSequence::explicit_prefix(vec![0.3, 0.2, 0.2, 0.1], 0.5).unwrap(),
        WeightSequence::zeta_like(2.0).unwrap(),
        WeightSequence::zeta_like(3.5).unwrap(),
    ]
}

pub fn random_weights(rng: &mut ChaCha8Rng) -> WeightSequence {
    match rng.gen_range(0..3) {
        0 => geometric(rng.gen_range(0.05..0.95)),
        1 => {
            // non-increasing prefix, then a geometric tail no heavier than its last entry
            let len = rng.gen_range(1..5);
            let mut prefix: Vec<f64> = (0..len).map(|_| rng.gen_range(0.02..0.2)).collect();
            prefix.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let last = *prefix.last().unwrap();
            let rest = 1.0 - prefix.iter().sum::<f64>();
            // first tail weight (1 − r)·rest must not exceed `last`
            let r_min = (1.0 - last / rest).max(0.05);
            let r = rng.gen_range(r_min..0.99f64.max(r_min + 1e-3)).min(0.995);
            WeightSequence::explicit_prefix(prefix, r).unwrap()
        }
        _ => WeightSequence::zeta_like(rng.gen_range(1.5..4.0)).unwrap(),
    }
}

pub fn random_domain(rng: &mut ChaCha8Rng, dim: usize, half_width: f64) -> ConvexDomain {
    match (dim, rng.gen_range(0..2)) {
        (1, _) => {
            let a = rng.gen_range(-half_width..half_width);
            let b = rng.gen_range(a..=half_width);
            ConvexDomain::interval(a, b.max(a + 1e-3)).unwrap()
        }
        (_, 0) => {
            let lower: Vec<f64> = (0..dim).map(|_| rng.gen_range(-half_width..0.0)).collect();
            let upper: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..half_width)).collect();
            ConvexDomain::boxed(lower, upper).unwrap()
        }
        _ => {
            let center: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            ConvexDomain::ball(center, rng.gen_range(0.1..half_width)).unwrap()
        }
    }
}

pub fn random_sequence(rng: &mut ChaCha8Rng, domain: &ConvexDomain) -> BoundedSequence {
    let len = rng.gen_range(1..6);
    let mut pts = domain.sample_points(len + 1, rng).unwrap();
    match rng.gen_range(0..3) {
        0 => {
            let fill = pts.pop().unwrap();
            BoundedSequence::finite_support(pts, fill).unwrap()
        }
        1 => BoundedSequence::periodic(pts).unwrap(),
        _ => BoundedSequence::constant(pts.pop().unwrap()).unwrap(),
    }
}

/// Up to `max_atoms` atoms in `[-half_width, half_width]^dim`.
pub fn random_distribution(
    rng: &mut ChaCha8Rng,
    dim: usize,
    max_atoms: usize,
    half_width: f64,
) -> DiscreteDistribution {
    let n = rng.gen_range(1..=max_atoms);
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let atoms = raw
        .into_iter()
        .map(|w| {
            let p: Vec<f64> = (0..dim)
                .map(|_| rng.gen_range(-half_width..=half_width))
                .collect();
            (p, w / total)
        })
        .collect();
    DiscreteDistribution::new(atoms).unwrap()
}

pub fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    items.choose(rng).unwrap()
}
