#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use realearn::geometry::Point;
use realearn::knowledge::KnowledgeState;
use realearn::least::Challenge;
use realearn::oracle::{exact_orientation, RationalPoint};
use realearn::{Interval, Rational, RealNum, RealRegistry};

pub fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn random_rational(rng: &mut ChaCha8Rng, bound: i64, max_denom: i64) -> Rational {
    Rational::new(rng.gen_range(-bound..=bound), rng.gen_range(1..=max_denom))
}

/// A table real converging to `tail`, with intervals of width `2^-(k+1)`
/// placed at a random offset.
pub fn table_real(rng: &mut ChaCha8Rng, tail: Rational) -> RealNum {
    let len = rng.gen_range(0..10u32);
    let below = Rational::new(rng.gen_range(0..=4i64), 4);
    let above = Rational::one() - below.clone();
    let prefix = (0..len)
        .map(|k| {
            let h = Rational::pow2_neg(k + 1);
            Interval::new(&tail - &(&below * &h), &tail + &(&above * &h))
        })
        .collect();
    RealNum::table(prefix, tail).unwrap()
}

/// Any of the three constructors, chosen uniformly.
pub fn random_real(rng: &mut ChaCha8Rng) -> RealNum {
    let value = random_rational(rng, 8, 8);
    match rng.gen_range(0..3) {
        0 => RealNum::rational(value),
        1 => RealNum::blurred(value),
        _ => table_real(rng, value),
    }
}

pub fn blurred_registry(values: &[Rational]) -> RealRegistry {
    values.iter().cloned().map(RealNum::blurred).collect()
}

/// `count` distinct rationals in random order.
pub fn distinct_values(rng: &mut ChaCha8Rng, count: usize) -> Vec<Rational> {
    let mut pool: Vec<i64> = (-(count as i64) * 3..(count as i64) * 3).collect();
    pool.shuffle(rng);
    let denom = rng.gen_range(1..=6i64);
    pool.truncate(count);
    pool.into_iter().map(|v| Rational::new(v, denom)).collect()
}

pub fn rational_point(index: usize, x: Rational, y: Rational) -> Point {
    Point::new(index, RealNum::rational(x), RealNum::rational(y))
}

pub fn blurred_point(index: usize, x: Rational, y: Rational) -> Point {
    Point::new(index, RealNum::blurred(x), RealNum::blurred(y))
}

pub fn exact_points(coords: &[(Rational, Rational)]) -> Vec<RationalPoint> {
    coords.iter().map(|(x, y)| RationalPoint::new(x.clone(), y.clone())).collect()
}

pub fn general_position(coords: &[(Rational, Rational)]) -> bool {
    let pts = exact_points(coords);
    let n = pts.len();
    (0..n).all(|i| (i + 1..n).all(|j| (j + 1..n).all(|k| exact_orientation(&pts[i], &pts[j], &pts[k]) != 0)))
}

/// Rejection-samples a point set with no three points collinear.
pub fn random_point_set(rng: &mut ChaCha8Rng, count: usize) -> Vec<(Rational, Rational)> {
    loop {
        let coords: Vec<_> = (0..count)
            .map(|_| (random_rational(rng, 40, 3), random_rational(rng, 40, 3)))
            .collect();
        if general_position(&coords) {
            return coords;
        }
    }
}

pub fn coords(list: &[(&str, &str)]) -> Vec<(Rational, Rational)> {
    list.iter().map(|(x, y)| (q(x), q(y))).collect()
}

/// The first point is the lowest and every other point sits in the wedge
/// between the rays to indices 1 and 2.
pub fn lowest_first_wedge() -> Vec<(Rational, Rational)> {
    coords(&[
        ("0", "0"),
        ("5", "1"),
        ("-4", "3"),
        ("2", "3"),
        ("1", "5"),
        ("-1", "4"),
        ("3", "7/2"),
    ])
}

/// The first point is above all others, which fan out below it inside an
/// angle narrower than a half-plane.
pub fn high_first_wedge() -> Vec<(Rational, Rational)> {
    coords(&[
        ("0", "0"),
        ("-23/20", "-24/25"),
        ("87/100", "-1/2"),
        ("3/4", "-13/10"),
        ("-17/100", "-49/50"),
        ("-77/100", "-23/25"),
    ])
}

/// Blurred limits with `r_3 < r_2 < r_0` and `r_4 < r_1 < r_0`, consistent
/// with every discovered relation of the worked six-real example.
pub fn consistent_six() -> Vec<Rational> {
    ["6", "4", "3", "2", "1", "5"].iter().map(|s| q(s)).collect()
}

/// The states of the six rounds of the worked example, as
/// `(i, j, witness)` entries meaning `r_j < r_i`.
pub fn worked_states() -> Vec<Vec<(usize, usize, u32)>> {
    vec![
        vec![],
        vec![(0, 3, 33)],
        vec![(0, 2, 33), (0, 3, 33)],
        vec![(0, 2, 33), (0, 3, 33), (2, 3, 2)],
        vec![(0, 1, 2), (0, 2, 33), (0, 3, 33), (2, 3, 2)],
        vec![(0, 1, 2), (0, 2, 33), (0, 3, 33), (1, 4, 2), (2, 3, 2)],
    ]
}

pub fn state_of(reals: &RealRegistry, entries: &[(usize, usize, u32)]) -> KnowledgeState {
    entries.iter().fold(KnowledgeState::empty(), |s, &(i, j, k)| {
        s.extend(reals, i, j, k).expect("fixture witnesses are sound")
    })
}

/// Limits for the scripted run: `r_2 < r_3 < r_0`, which is what the first
/// two scripted falsifications force. Gaps are wide enough that the given
/// precisions separate them.
pub fn scripted_six() -> Vec<Rational> {
    ["6", "5", "1", "2", "4", "3"].iter().map(|s| q(s)).collect()
}

/// Round-by-round challenges of the worked example. The first two
/// precisions are the given ones; the rest are fixture choices.
pub fn worked_script() -> Vec<Vec<Challenge>> {
    let c = |j, precision| vec![Challenge { j, precision }];
    vec![c(3, 33), c(2, 25), c(3, 30), c(1, 12), c(4, 20)]
}
