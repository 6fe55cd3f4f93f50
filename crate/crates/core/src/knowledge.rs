//! Knowledge states, totality decisions and evidence for `<=` claims.
//!
//! Every comparison `r_i <= r_j or r_j < r_i` is decided by looking the pair
//! up in the state: an absent pair is guessed on the `<=` side, a present
//! pair yields the stored precision as a witness of `r_j < r_i`. Guesses are
//! tracked as [`LeqEvidence`] so a later falsification can be traced back to
//! the guess that caused it.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::reals::{Precision, RealRegistry};

/// An ordered comparison pair `(i, j)`, standing for `r_i <= r_j or r_j < r_i`.
pub type Pair = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("witness {witness} does not separate r_{} below r_{}", pair.1, pair.0)]
    UnsoundWitness { pair: Pair, witness: Precision },
    #[error("reflexive claim r_{0} <= r_{0} was falsified")]
    ReflFalsified(usize),
}

/// One stored fact of a knowledge state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateEntry {
    pub i: usize,
    pub j: usize,
    pub witness: Precision,
}

/// Finite map from pairs `(i, j)` to a precision `k` with `op_at(r_j, r_i, k)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeState {
    entries: BTreeMap<Pair, Precision>,
}

impl KnowledgeState {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a state by extending the empty one entry by entry.
    pub fn from_entries(
        reals: &RealRegistry,
        entries: impl IntoIterator<Item = StateEntry>,
    ) -> Result<Self, EngineError> {
        entries.into_iter().try_fold(Self::empty(), |s, e| {
            s.extend(reals, e.i, e.j, e.witness)
        })
    }

    pub fn get(&self, i: usize, j: usize) -> Option<Precision> {
        self.entries.get(&(i, j)).copied()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.entries.contains_key(&(i, j))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries sorted by pair.
    pub fn entries(&self) -> Vec<StateEntry> {
        self.entries
            .iter()
            .map(|(&(i, j), &witness)| StateEntry { i, j, witness })
            .collect()
    }

    /// Decides the totality instance for `(i, j)`.
    pub fn decide_total(&self, i: usize, j: usize) -> Decision {
        match self.get(i, j) {
            Some(k) => Decision::StrictLt(k),
            None => Decision::AssumeLeq(Arc::new(LeqEvidence::Assumed(i, j))),
        }
    }

    /// Adds `(i, j) -> k`. An already present pair keeps its original
    /// witness.
    pub fn extend(
        &self,
        reals: &RealRegistry,
        i: usize,
        j: usize,
        k: Precision,
    ) -> Result<Self, EngineError> {
        if !reals.op_at(j, i, k) {
            return Err(EngineError::UnsoundWitness {
                pair: (i, j),
                witness: k,
            });
        }
        let mut next = self.clone();
        next.entries.entry((i, j)).or_insert(k);
        Ok(next)
    }

    /// Re-evaluates every entry.
    pub fn is_sound(&self, reals: &RealRegistry) -> bool {
        self.entries.iter().all(|(&(i, j), &k)| reals.op_at(j, i, k))
    }
}

/// Outcome of deciding `r_i <= r_j or r_j < r_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    /// Nothing known; `r_i <= r_j` is assumed.
    AssumeLeq(Arc<LeqEvidence>),
    /// `r_j < r_i`, witnessed at this precision.
    StrictLt(Precision),
}

impl Decision {
    pub fn is_assumption(&self) -> bool {
        matches!(self, Decision::AssumeLeq(_))
    }
}

/// Justification of a claim `r_subject <= r_object`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeqEvidence {
    Refl(usize),
    /// A guessed `<=`, taken because the state knew nothing about the pair.
    Assumed(usize, usize),
    /// `r_subject < r_b` at `witness`, followed by `rest` claiming `r_b <= r_c`.
    Step {
        subject: usize,
        witness: Precision,
        rest: Arc<LeqEvidence>,
    },
}

impl LeqEvidence {
    pub fn step(subject: usize, witness: Precision, rest: Arc<LeqEvidence>) -> Self {
        LeqEvidence::Step {
            subject,
            witness,
            rest,
        }
    }

    pub fn subject(&self) -> usize {
        match self {
            LeqEvidence::Refl(i) | LeqEvidence::Assumed(i, _) => *i,
            LeqEvidence::Step { subject, .. } => *subject,
        }
    }

    pub fn object(&self) -> usize {
        match self {
            LeqEvidence::Refl(i) => *i,
            LeqEvidence::Assumed(_, j) => *j,
            LeqEvidence::Step { rest, .. } => rest.object(),
        }
    }

    /// The assumption the chain bottoms out in, if any.
    pub fn assumption(&self) -> Option<Pair> {
        match self {
            LeqEvidence::Refl(_) => None,
            LeqEvidence::Assumed(i, j) => Some((*i, *j)),
            LeqEvidence::Step { rest, .. } => rest.assumption(),
        }
    }

    /// Strict links `(a, b, w)` meaning `op_at(r_a, r_b, w)`.
    pub fn strict_links(&self) -> Vec<(usize, usize, Precision)> {
        let mut out = Vec::new();
        let mut cur = self;
        while let LeqEvidence::Step {
            subject,
            witness,
            rest,
        } = cur
        {
            out.push((*subject, rest.subject(), *witness));
            cur = rest;
        }
        out
    }

    /// Re-verifies every strict link by evaluation.
    pub fn links_hold(&self, reals: &RealRegistry) -> bool {
        self.strict_links()
            .into_iter()
            .all(|(a, b, w)| reals.op_at(a, b, w))
    }
}

impl fmt::Display for LeqEvidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LeqEvidence::Refl(i) => write!(f, "Refl({i})"),
            LeqEvidence::Assumed(i, j) => write!(f, "Assumed({i},{j})"),
            LeqEvidence::Step { witness, rest, .. } => write!(f, "Step({witness}, {rest})"),
        }
    }
}

/// Result of checking one decidable instance of a `<=` claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckOutcome {
    Holds,
    Falsified { pair: Pair, witness: Precision },
}

/// Tests the instance `not op_at(r_b, r_a, p)` of the claim `r_a <= r_b`;
/// a failed instance is blamed on the responsible assumption.
pub fn check_leq(
    reals: &RealRegistry,
    ev: &LeqEvidence,
    p: Precision,
) -> Result<CheckOutcome, EngineError> {
    if !reals.op_at(ev.object(), ev.subject(), p) {
        return Ok(CheckOutcome::Holds);
    }
    let (pair, witness) = blame(ev, p)?;
    Ok(CheckOutcome::Falsified { pair, witness })
}

/// Given a counterexample precision `p` for the claim of `ev`, finds the
/// assumption `(i, j)` that must be wrong and a precision witnessing
/// `r_j < r_i`. Each strict step `r_a < r_b` at `w` combined with a
/// counterexample at `p` gives a counterexample for the rest at `max(p, w)`.
pub fn blame(ev: &LeqEvidence, p: Precision) -> Result<(Pair, Precision), EngineError> {
    match ev {
        LeqEvidence::Refl(i) => Err(EngineError::ReflFalsified(*i)),
        LeqEvidence::Assumed(i, j) => Ok(((*i, *j), p)),
        LeqEvidence::Step { witness, rest, .. } => blame(rest, p.max(*witness)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;
    use crate::reals::RealNum;

    fn ints(values: &[i64]) -> RealRegistry {
        values
            .iter()
            .map(|&v| RealNum::rational(Rational::from(v)))
            .collect()
    }

    fn blurred(values: &[i64]) -> RealRegistry {
        values
            .iter()
            .map(|&v| RealNum::blurred(Rational::from(v)))
            .collect()
    }

    fn step(subject: usize, w: Precision, rest: LeqEvidence) -> LeqEvidence {
        LeqEvidence::step(subject, w, Arc::new(rest))
    }

    #[test]
    fn empty_state_assumes() {
        let s = KnowledgeState::empty();
        assert_eq!(s.get(0, 1), None);
        assert!(s.is_sound(&ints(&[1, 2])));
        assert_eq!(
            s.decide_total(0, 1),
            Decision::AssumeLeq(Arc::new(LeqEvidence::Assumed(0, 1)))
        );
    }

    #[test]
    fn decide_reads_the_state() {
        let reals = ints(&[5, 1, 2, 0, 9]);
        let s = KnowledgeState::empty().extend(&reals, 0, 3, 33).unwrap();
        assert_eq!(s.decide_total(0, 3), Decision::StrictLt(33));
        assert!(s.decide_total(0, 4).is_assumption());
        assert_eq!(
            s.entries(),
            vec![StateEntry {
                i: 0,
                j: 3,
                witness: 33
            }]
        );
    }

    #[test]
    fn extend_gates_soundness() {
        let reals = ints(&[0, 1]);
        let err = KnowledgeState::empty().extend(&reals, 0, 1, 5).unwrap_err();
        assert_eq!(
            err,
            EngineError::UnsoundWitness {
                pair: (0, 1),
                witness: 5
            }
        );
        let reals = blurred(&[1, 0]);
        // blurred 0 and 1 only separate from k = 1
        assert!(KnowledgeState::empty().extend(&reals, 0, 1, 0).is_err());
        assert!(KnowledgeState::empty().extend(&reals, 0, 1, 1).is_ok());
    }

    #[test]
    fn extend_keeps_first_witness() {
        let reals = ints(&[3, 0]);
        let once = KnowledgeState::empty().extend(&reals, 0, 1, 4).unwrap();
        let twice = once.extend(&reals, 0, 1, 4).unwrap();
        assert_eq!(once, twice);
        let other = once.extend(&reals, 0, 1, 9).unwrap();
        assert_eq!(other.get(0, 1), Some(4));
    }

    #[test]
    fn check_leq_cases() {
        let reals = ints(&[0, 1, -3, 0, 0]);
        assert_eq!(
            check_leq(&reals, &LeqEvidence::Assumed(0, 1), 5).unwrap(),
            CheckOutcome::Holds
        );
        assert_eq!(
            check_leq(&reals, &LeqEvidence::Assumed(0, 2), 5).unwrap(),
            CheckOutcome::Falsified {
                pair: (0, 2),
                witness: 5
            }
        );
        for p in 0..40 {
            assert_eq!(
                check_leq(&reals, &LeqEvidence::Refl(4), p).unwrap(),
                CheckOutcome::Holds
            );
        }
    }

    #[test]
    fn blame_folds_max() {
        let ev = step(3, 33, LeqEvidence::Assumed(0, 2));
        assert_eq!(blame(&ev, 25).unwrap(), ((0, 2), 33));
        assert_eq!(blame(&LeqEvidence::Assumed(1, 4), 7).unwrap(), ((1, 4), 7));
        let ev = step(7, 3, step(6, 9, LeqEvidence::Assumed(0, 5)));
        assert_eq!(blame(&ev, 2).unwrap(), ((0, 5), 9));
        assert_eq!(
            blame(&step(2, 1, LeqEvidence::Refl(0)), 4),
            Err(EngineError::ReflFalsified(0))
        );
    }

    #[test]
    fn evidence_endpoints() {
        let ev = step(3, 33, step(2, 10, LeqEvidence::Assumed(0, 1)));
        assert_eq!(ev.subject(), 3);
        assert_eq!(ev.object(), 1);
        assert_eq!(ev.assumption(), Some((0, 1)));
        assert_eq!(ev.strict_links(), vec![(3, 2, 33), (2, 0, 10)]);
        assert_eq!(ev.to_string(), "Step(33, Step(10, Assumed(0,1)))");
        assert_eq!(LeqEvidence::Refl(4).object(), 4);
    }

    #[test]
    fn falsified_blame_is_a_real_witness() {
        // r3 < r0 (gap 1), r2 exactly below r3 by 1/2: claim r3 <= r2 fails.
        let reals: RealRegistry = ["2", "5", "1/2", "1", "7"]
            .iter()
            .map(|s| RealNum::blurred(s.parse().unwrap()))
            .collect();
        let s = KnowledgeState::empty().extend(&reals, 0, 3, 3).unwrap();
        let ev = step(3, 3, LeqEvidence::Assumed(0, 2));
        assert!(ev.links_hold(&reals));
        match check_leq(&reals, &ev, 2).unwrap() {
            CheckOutcome::Falsified { pair, witness } => {
                assert_eq!(pair, (0, 2));
                assert_eq!(witness, 3);
                assert!(reals.op_at(pair.1, pair.0, witness));
                let s = s.extend(&reals, pair.0, pair.1, witness).unwrap();
                assert!(s.is_sound(&reals));
            }
            CheckOutcome::Holds => panic!("claim should be falsified"),
        }
    }
}
