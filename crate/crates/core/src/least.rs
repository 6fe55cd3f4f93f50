//! State-guided least element of `r_0, ..., r_n` and the restart loop that
//! learns from falsified guesses.

use std::sync::Arc;

use thiserror::Error;

use crate::knowledge::{check_leq, CheckOutcome, Decision, EngineError, KnowledgeState, LeqEvidence, Pair};
use crate::reals::{Precision, RealRegistry};
use crate::trace::{snapshot, DecideOutcome, Event, Trace};

/// One totality decision taken while computing a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecisionStep {
    pub pair: Pair,
    /// Witness when the state knew `r_j < r_i`; `None` for a guess.
    pub strict: Option<Precision>,
}

/// A least-element candidate with, for every `j <= n`, evidence that the
/// candidate is `<= r_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeastCandidate {
    pub candidate: usize,
    pub evidences: Vec<Arc<LeqEvidence>>,
    pub decisions: Vec<DecisionStep>,
}

impl LeastCandidate {
    pub fn n(&self) -> usize {
        self.evidences.len() - 1
    }

    pub fn evidence(&self, j: usize) -> &LeqEvidence {
        &self.evidences[j]
    }

    /// Branches taken, `false` for a guess and `true` for a witnessed step.
    pub fn path(&self) -> Vec<bool> {
        self.decisions.iter().map(|d| d.strict.is_some()).collect()
    }

    pub fn assumed_pairs(&self) -> Vec<Pair> {
        self.decisions
            .iter()
            .filter(|d| d.strict.is_none())
            .map(|d| d.pair)
            .collect()
    }
}

/// Runs the induction `i = 1..=n`, deciding `r_m <= r_i or r_i < r_m` for
/// the running candidate `m`.
pub fn least_candidate(state: &KnowledgeState, n: usize) -> LeastCandidate {
    let mut candidate = 0;
    let mut evidences = vec![Arc::new(LeqEvidence::Refl(0))];
    let mut decisions = Vec::with_capacity(n);
    for i in 1..=n {
        match state.decide_total(candidate, i) {
            Decision::AssumeLeq(ev) => {
                decisions.push(DecisionStep {
                    pair: (candidate, i),
                    strict: None,
                });
                evidences.push(ev);
            }
            Decision::StrictLt(w) => {
                decisions.push(DecisionStep {
                    pair: (candidate, i),
                    strict: Some(w),
                });
                evidences = evidences
                    .into_iter()
                    .map(|prev| Arc::new(LeqEvidence::step(i, w, prev)))
                    .collect();
                evidences.push(Arc::new(LeqEvidence::Refl(i)));
                candidate = i;
            }
        }
    }
    LeastCandidate {
        candidate,
        evidences,
        decisions,
    }
}

/// A request to test the candidate's claim `r_m <= r_j` at one precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Challenge {
    pub j: usize,
    pub precision: Precision,
}

/// The consumer of a least-element candidate. Returning `None` accepts the
/// candidate; a challenge whose instance holds is followed by another call
/// in the same round.
pub trait Auditor {
    fn challenge(&mut self, round: usize, candidate: &LeastCandidate) -> Option<Challenge>;
}

/// Never instantiates anything.
#[derive(Debug, Clone, Copy, Default)]
pub struct Silent;

impl Auditor for Silent {
    fn challenge(&mut self, _round: usize, _candidate: &LeastCandidate) -> Option<Challenge> {
        None
    }
}

/// Replays a fixed list of challenges per round.
#[derive(Debug, Clone, Default)]
pub struct ScriptedAuditor {
    rounds: Vec<Vec<Challenge>>,
    round: usize,
    next: usize,
}

impl ScriptedAuditor {
    pub fn new(rounds: Vec<Vec<Challenge>>) -> Self {
        ScriptedAuditor {
            rounds,
            round: 0,
            next: 0,
        }
    }
}

impl Auditor for ScriptedAuditor {
    fn challenge(&mut self, round: usize, _candidate: &LeastCandidate) -> Option<Challenge> {
        if round != self.round {
            self.round = round;
            self.next = 0;
        }
        let ch = self.rounds.get(round)?.get(self.next).copied();
        self.next += 1;
        ch
    }
}

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("restart budget of {budget} exceeded")]
    RestartBudgetExceeded { budget: u64, state: KnowledgeState },
    #[error("challenge index {j} outside 0..={n}")]
    ChallengeOutOfRange { j: usize, n: usize },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone)]
pub struct LearnOutcome {
    pub candidate: LeastCandidate,
    pub state: KnowledgeState,
    pub restarts: u64,
    /// Candidate of every round, the last one accepted.
    pub history: Vec<LeastCandidate>,
}

pub(crate) fn record_candidate(trace: &mut Trace, round: usize, state: &KnowledgeState, cand: &LeastCandidate) {
    for d in &cand.decisions {
        trace.push(Event::Decide {
            round,
            pair: d.pair,
            outcome: if d.strict.is_some() {
                DecideOutcome::Strict
            } else {
                DecideOutcome::Assume
            },
            witness: d.strict,
        });
    }
    trace.push(Event::Candidate {
        round,
        candidate: cand.candidate,
        state: snapshot(state),
    });
}

/// Follows the least-element computation under `initial`, answering the
/// auditor's challenges; every falsified guess extends the state and
/// restarts the computation from scratch.
pub fn learn_least(
    reals: &RealRegistry,
    n: usize,
    auditor: &mut dyn Auditor,
    initial: KnowledgeState,
    max_restarts: u64,
    trace: &mut Trace,
) -> Result<LearnOutcome, LearnError> {
    let mut state = initial;
    let mut restarts = 0u64;
    let mut history = Vec::new();
    let mut round = 0usize;
    loop {
        let cand = least_candidate(&state, n);
        record_candidate(trace, round, &state, &cand);
        let falsified = loop {
            let Some(ch) = auditor.challenge(round, &cand) else {
                break None;
            };
            if ch.j > n {
                return Err(LearnError::ChallengeOutOfRange { j: ch.j, n });
            }
            trace.push(Event::Challenge {
                round,
                j: ch.j,
                precision: ch.precision,
            });
            let outcome = check_leq(reals, cand.evidence(ch.j), ch.precision)?;
            let claim = (cand.candidate, ch.j);
            trace.push(Event::Check {
                round,
                claim,
                precision: ch.precision,
                holds: outcome == CheckOutcome::Holds,
            });
            if let CheckOutcome::Falsified { pair, witness } = outcome {
                trace.push(Event::Falsified {
                    round,
                    claim,
                    precision: ch.precision,
                });
                trace.push(Event::Blame {
                    round,
                    pair,
                    witness,
                });
                break Some((pair, witness));
            }
        };
        let Some((pair, witness)) = falsified else {
            trace.push(Event::Accept {
                round,
                candidate: cand.candidate,
                angle: None,
            });
            history.push(cand.clone());
            return Ok(LearnOutcome {
                candidate: cand,
                state,
                restarts,
                history,
            });
        };
        let before = state.len();
        state = state.extend(reals, pair.0, pair.1, witness)?;
        debug_assert!(state.len() > before, "restart without new knowledge");
        trace.push(Event::Extend {
            round,
            pair,
            witness,
            state: snapshot(&state),
        });
        history.push(cand);
        restarts += 1;
        if restarts > max_restarts {
            return Err(LearnError::RestartBudgetExceeded {
                budget: max_restarts,
                state,
            });
        }
        round += 1;
        trace.push(Event::Restart { round });
    }
}
