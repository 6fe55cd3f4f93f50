//! Exact-rational ground truth for inputs whose limits are known rationals.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::geometry::Point;
use crate::knowledge::Pair;
use crate::least::{Auditor, Challenge, LeastCandidate};
use crate::rational::Rational;
use crate::reals::{find_strict_witness, Precision, RealRegistry};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("minimum value {value} occurs more than once")]
    TieDetected { value: Rational },
    #[error("empty value list")]
    Empty,
    #[error("trees are enumerated up to n = {max}, got {n}")]
    TreeTooLarge { n: usize, max: usize },
    #[error("run {run}, round {round}: {reason}")]
    PathMismatch {
        run: usize,
        round: usize,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoint {
    pub x: Rational,
    pub y: Rational,
}

impl RationalPoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        RationalPoint { x, y }
    }

    /// Limits of a point built from rational-limit constructors.
    pub fn from_point(p: &Point) -> Option<Self> {
        Some(RationalPoint::new(p.x.rational_limit()?, p.y.rational_limit()?))
    }
}

/// Sign of `(x_Q - x_P)(y_R - y_P) - (x_R - x_P)(y_Q - y_P)`.
pub fn exact_orientation(p: &RationalPoint, q: &RationalPoint, r: &RationalPoint) -> i8 {
    let det = (&q.x - &p.x) * (&r.y - &p.y) - (&r.x - &p.x) * (&q.y - &p.y);
    det.signum()
}

pub fn exact_min_index(values: &[Rational]) -> Result<usize, OracleError> {
    let (idx, min) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1))
        .ok_or(OracleError::Empty)?;
    if values.iter().filter(|v| *v == min).count() > 1 {
        return Err(OracleError::TieDetected { value: min.clone() });
    }
    Ok(idx)
}

/// Every `d` outside `{a, b, c}` strictly left of `AB` and strictly right
/// of `AC`, with `C` left of `AB` and `B` right of `AC`.
pub fn exact_convex_check(points: &[RationalPoint], a: usize, b: usize, c: usize) -> bool {
    let (pa, pb, pc) = (&points[a], &points[b], &points[c]);
    exact_orientation(pa, pb, pc) == 1
        && exact_orientation(pa, pc, pb) == -1
        && points.iter().enumerate().all(|(d, pd)| {
            d == a
                || d == b
                || d == c
                || (exact_orientation(pa, pb, pd) == 1 && exact_orientation(pa, pc, pd) == -1)
        })
}

/// Smallest `k` with `2^(-k) < gap`: where two blurred reals whose limits
/// differ by `gap > 0` first separate.
pub fn blurred_separation(gap: &Rational) -> Precision {
    assert!(gap.signum() > 0, "separation needs a positive gap");
    (0..).find(|&k| &Rational::pow2_neg(k) < gap).expect("positive gap")
}

/// Challenges the first claim `r_m <= r_j` that is false in the exact values.
pub struct OracleAuditor<'a> {
    values: Vec<Rational>,
    separation: Box<dyn Fn(usize, usize) -> Precision + 'a>,
    issued: BTreeSet<(usize, usize)>,
}

impl<'a> OracleAuditor<'a> {
    /// `separation(j, m)` must give a precision where `r_j < r_m` shows.
    pub fn new(values: Vec<Rational>, separation: impl Fn(usize, usize) -> Precision + 'a) -> Self {
        OracleAuditor {
            values,
            separation: Box::new(separation),
            issued: BTreeSet::new(),
        }
    }

    /// For blurred reals over `values`.
    pub fn for_blurred(values: Vec<Rational>) -> Self {
        let gaps = values.clone();
        Self::new(values, move |j, m| blurred_separation(&(&gaps[m] - &gaps[j])))
    }

    /// Finds separation precisions by scanning the reals directly.
    pub fn scanning(values: Vec<Rational>, reals: &'a RealRegistry, k_max: Precision) -> Self {
        Self::new(values, move |j, m| {
            find_strict_witness(reals.get(j), reals.get(m), k_max).unwrap_or(k_max)
        })
    }
}

impl Auditor for OracleAuditor<'_> {
    fn challenge(&mut self, round: usize, candidate: &LeastCandidate) -> Option<Challenge> {
        let m = candidate.candidate;
        let j = (0..=candidate.n())
            .find(|&j| self.values[j] < self.values[m] && !self.issued.contains(&(round, j)))?;
        self.issued.insert((round, j));
        Some(Challenge {
            j,
            precision: (self.separation)(j, m),
        })
    }
}

/// The tree of every possible least-element computation over `r_0..=r_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComputationTree {
    n: usize,
    /// Leaf candidates, left to right. Leaf `i` is reached by the path whose
    /// branch bits, most significant first, spell `i` (right = 1).
    leaves: Vec<usize>,
}

pub const MAX_TREE_DEPTH: usize = 12;

pub fn enumerate_tree(n: usize) -> Result<ComputationTree, OracleError> {
    if n > MAX_TREE_DEPTH {
        return Err(OracleError::TreeTooLarge {
            n,
            max: MAX_TREE_DEPTH,
        });
    }
    let mut frontier = vec![0usize];
    for i in 1..=n {
        frontier = frontier.into_iter().flat_map(|m| [m, i]).collect();
    }
    Ok(ComputationTree { n, leaves: frontier })
}

impl ComputationTree {
    pub fn depth(&self) -> usize {
        self.n
    }

    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    /// Candidate held at the node reached by `prefix`.
    fn node_candidate(&self, prefix: &[bool]) -> usize {
        prefix
            .iter()
            .enumerate()
            .fold(0, |m, (d, &right)| if right { d + 1 } else { m })
    }

    /// Leaf index of a decision path, checking that every decision sits at
    /// the node the tree puts it.
    pub fn locate(&self, path: &[(Pair, bool)]) -> Result<usize, String> {
        if path.len() != self.n {
            return Err(format!("path has {} decisions, tree depth is {}", path.len(), self.n));
        }
        let mut bits = Vec::with_capacity(self.n);
        for (d, &(pair, right)) in path.iter().enumerate() {
            let expected = (self.node_candidate(&bits), d + 1);
            if pair != expected {
                return Err(format!("decision {pair:?} at depth {d}, tree expects {expected:?}"));
            }
            bits.push(right);
        }
        Ok(bits.iter().fold(0, |acc, &b| acc * 2 + b as usize))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunVerdict {
    pub leaves: Vec<usize>,
    pub rightward: bool,
    pub within_bound: bool,
    pub no_duplicates: bool,
}

impl RunVerdict {
    pub fn passed(&self) -> bool {
        self.rightward && self.within_bound && self.no_duplicates
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeVerdict {
    pub runs: Vec<RunVerdict>,
}

impl TreeVerdict {
    pub fn passed(&self) -> bool {
        self.runs.iter().all(RunVerdict::passed)
    }
}

/// Maps each round of each run to its leaf and checks strict left-to-right
/// progress, the `2^n - 1` restart bound and the absence of repeated paths.
pub fn replay_paths(
    tree: &ComputationTree,
    runs: &[Vec<Vec<(Pair, bool)>>],
) -> Result<TreeVerdict, OracleError> {
    let mut verdicts = Vec::with_capacity(runs.len());
    for (run, rounds) in runs.iter().enumerate() {
        let leaves = rounds
            .iter()
            .enumerate()
            .map(|(round, path)| {
                tree.locate(path)
                    .map_err(|reason| OracleError::PathMismatch { run, round, reason })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let distinct: BTreeSet<usize> = leaves.iter().copied().collect();
        let restarts = leaves.len().saturating_sub(1);
        verdicts.push(RunVerdict {
            rightward: leaves.windows(2).all(|w| w[0] < w[1]),
            within_bound: restarts < 1usize << tree.n,
            no_duplicates: distinct.len() == leaves.len(),
            leaves,
        });
    }
    Ok(TreeVerdict { runs: verdicts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knowledge::KnowledgeState;
    use crate::least::least_candidate;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn rp(x: &str, y: &str) -> RationalPoint {
        RationalPoint::new(q(x), q(y))
    }

    #[test]
    fn orientation_signs() {
        let (p, a, b) = (rp("0", "0"), rp("1", "0"), rp("0", "1"));
        assert_eq!(exact_orientation(&p, &a, &b), 1);
        assert_eq!(exact_orientation(&p, &b, &a), -1);
        assert_eq!(exact_orientation(&p, &a, &rp("2", "0")), 0);
    }

    #[test]
    fn min_index() {
        assert_eq!(exact_min_index(&[q("3"), q("1"), q("2")]), Ok(1));
        assert_eq!(exact_min_index(&[q("0")]), Ok(0));
        assert!(matches!(
            exact_min_index(&[q("1"), q("1")]),
            Err(OracleError::TieDetected { .. })
        ));
        // a tie above the minimum is not a tie of the minimum
        assert_eq!(exact_min_index(&[q("2"), q("0"), q("2")]), Ok(1));
    }

    #[test]
    fn square_convexity() {
        // a diamond: bottom vertex 0, hull neighbours 1 (right) and 3 (left)
        let sq = [rp("0", "0"), rp("1", "1"), rp("0", "2"), rp("-1", "1")];
        assert!(exact_convex_check(&sq, 0, 1, 3));
        assert!(!exact_convex_check(&sq, 0, 3, 1));
        assert!(!exact_convex_check(&sq, 0, 1, 2));
    }

    #[test]
    fn triangle_assignments() {
        let tri = [rp("0", "0"), rp("4", "1"), rp("1", "3")];
        let valid: Vec<_> = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
            .into_iter()
            .filter(|&(a, b, c)| exact_convex_check(&tri, a, b, c))
            .collect();
        // one orientation per vertex: 0->1->2 is counter-clockwise
        assert_eq!(valid, vec![(0, 1, 2), (1, 2, 0), (2, 0, 1)]);
    }

    #[test]
    fn separation_from_gap() {
        assert_eq!(blurred_separation(&q("1")), 1);
        assert_eq!(blurred_separation(&q("3")), 0);
        assert_eq!(blurred_separation(&q("1/4")), 3);
        assert_eq!(blurred_separation(&q("3/8")), 2);
    }

    #[test]
    fn oracle_auditor_challenges_false_claims() {
        let values = vec![q("2"), q("1"), q("3")];
        let mut a = OracleAuditor::for_blurred(values);
        let c0 = least_candidate(&KnowledgeState::empty(), 2);
        assert_eq!(a.challenge(0, &c0), Some(Challenge { j: 1, precision: 1 }));
        // already issued this round
        assert_eq!(a.challenge(0, &c0), None);

        let mut a = OracleAuditor::for_blurred(vec![q("0"), q("1"), q("3")]);
        assert_eq!(a.challenge(0, &c0), None);
    }

    #[test]
    fn tree_for_three() {
        let t = enumerate_tree(3).unwrap();
        assert_eq!(t.leaves(), &[0, 3, 2, 3, 1, 3, 2, 3]);
        assert_eq!(enumerate_tree(0).unwrap().leaves(), &[0]);
        assert!(enumerate_tree(13).is_err());
        assert_eq!(enumerate_tree(12).unwrap().leaves().len(), 4096);
    }

    #[test]
    fn locate_checks_embedding() {
        let t = enumerate_tree(3).unwrap();
        let leftmost = vec![((0, 1), false), ((0, 2), false), ((0, 3), false)];
        assert_eq!(t.locate(&leftmost), Ok(0));
        let p = vec![((0, 1), true), ((1, 2), false), ((1, 3), true)];
        assert_eq!(t.locate(&p), Ok(5));
        let bad = vec![((0, 1), true), ((0, 2), false), ((0, 3), false)];
        assert!(t.locate(&bad).is_err());
        assert!(t.locate(&leftmost[..2]).is_err());
    }

    #[test]
    fn replay_flags_regressions() {
        let t = enumerate_tree(2).unwrap();
        let l = |a: bool, m: usize, b: bool| vec![((0, 1), a), ((m, 2), b)];
        let good = vec![l(false, 0, false), l(false, 0, true), l(true, 1, false)];
        let v = replay_paths(&t, &[good]).unwrap();
        assert!(v.passed());
        assert_eq!(v.runs[0].leaves, vec![0, 1, 2]);

        let back = vec![l(true, 1, false), l(false, 0, false)];
        let v = replay_paths(&t, &[back]).unwrap();
        assert!(!v.runs[0].rightward);
        assert!(!v.passed());

        let dup = vec![l(false, 0, true), l(false, 0, true)];
        let v = replay_paths(&t, &[dup]).unwrap();
        assert!(!v.runs[0].no_duplicates);
    }
}
