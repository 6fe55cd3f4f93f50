//! Points with computable coordinates and effective side decisions.

use thiserror::Error;

use crate::reals::{find_strict_witness, mul, op_at, sub, Precision, RealNum};
use crate::trace::Side;

#[derive(Debug, Clone)]
pub struct Point {
    pub index: usize,
    pub x: RealNum,
    pub y: RealNum,
}

impl Point {
    pub fn new(index: usize, x: RealNum, y: RealNum) -> Self {
        Point { index, x, y }
    }
}

/// Which side of the directed line `PQ` a point lies on, with the precision
/// that separates the orientation expression from zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideDecision {
    Left(Precision),
    Right(Precision),
}

impl SideDecision {
    pub fn side(&self) -> Side {
        match self {
            SideDecision::Left(_) => Side::Left,
            SideDecision::Right(_) => Side::Right,
        }
    }

    pub fn witness(&self) -> Precision {
        match *self {
            SideDecision::Left(k) | SideDecision::Right(k) => k,
        }
    }

    pub fn is_left(&self) -> bool {
        matches!(self, SideDecision::Left(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("points {0:?} not separable from their common line up to k = {1}")]
    DegenerateInput([usize; 3], Precision),
    #[error("no point of {ring:?} found strictly below point {center} up to k = {k_max}")]
    NoWitnessFound {
        center: usize,
        ring: [usize; 3],
        k_max: Precision,
    },
}

/// `(x_Q - x_P)(y_R - y_P) - (x_R - x_P)(y_Q - y_P)`; positive when `R` is
/// left of `PQ`.
pub fn orientation_real(p: &Point, q: &Point, r: &Point) -> RealNum {
    let lhs = mul(&sub(&q.x, &p.x), &sub(&r.y, &p.y));
    let rhs = mul(&sub(&r.x, &p.x), &sub(&q.y, &p.y));
    sub(&lhs, &rhs)
}

/// Searches `k = 0..=k_max`, testing left before right at each `k`.
pub fn decide_side(p: &Point, q: &Point, r: &Point, k_max: Precision) -> Result<SideDecision, GeometryError> {
    let o = orientation_real(p, q, r);
    let zero = RealNum::zero();
    for k in 0..=k_max {
        if op_at(&zero, &o, k) {
            return Ok(SideDecision::Left(k));
        }
        if op_at(&o, &zero, k) {
            return Ok(SideDecision::Right(k));
        }
    }
    Err(GeometryError::DegenerateInput([p.index, q.index, r.index], k_max))
}

/// A precision at which `y_B < y_A`.
pub fn strictly_below_witness(a: &Point, b: &Point, k_max: Precision) -> Option<Precision> {
    find_strict_witness(&b.y, &a.y, k_max)
}

/// For `Q_0, Q_1, Q_2` each left of the ray from `A` through the previous
/// one (cyclically), one of them is strictly below `A`. Dovetails the
/// precision (outer) with the ring position (inner).
pub fn three_points(
    a: &Point,
    ring: [&Point; 3],
    k_max: Precision,
) -> Result<(usize, Precision), GeometryError> {
    for k in 0..=k_max {
        for (i, q) in ring.iter().enumerate() {
            if op_at(&q.y, &a.y, k) {
                return Ok((i, k));
            }
        }
    }
    Err(GeometryError::NoWitnessFound {
        center: a.index,
        ring: [ring[0].index, ring[1].index, ring[2].index],
        k_max,
    })
}

/// Decides every triple `i < j < k`; fails on the first inseparable one.
pub fn check_general_position(points: &[Point], k_max: Precision) -> Result<(), GeometryError> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            for k in j + 1..points.len() {
                decide_side(&points[i], &points[j], &points[k], k_max)?;
            }
        }
    }
    Ok(())
}
