//! Machine-readable run traces, one JSON record per line.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::knowledge::{KnowledgeState, Pair, StateEntry};
use crate::reals::Precision;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecideOutcome {
    Assume,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
}

/// Where in the convex-angle algorithm a side decision was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    InitBc,
    Scan,
    Rescan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "phase", rename_all = "kebab-case")]
pub enum Event {
    Decide {
        round: usize,
        pair: Pair,
        outcome: DecideOutcome,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness: Option<Precision>,
    },
    Candidate {
        round: usize,
        candidate: usize,
        state: Vec<StateEntry>,
    },
    Challenge {
        round: usize,
        j: usize,
        precision: Precision,
    },
    Check {
        round: usize,
        claim: Pair,
        precision: Precision,
        holds: bool,
    },
    Falsified {
        round: usize,
        claim: Pair,
        precision: Precision,
    },
    Blame {
        round: usize,
        pair: Pair,
        witness: Precision,
    },
    Extend {
        round: usize,
        pair: Pair,
        witness: Precision,
        state: Vec<StateEntry>,
    },
    Restart {
        round: usize,
    },
    Side {
        round: usize,
        stage: Stage,
        triple: [usize; 3],
        side: Side,
        witness: Precision,
    },
    ThreePoints {
        round: usize,
        center: usize,
        ring: [usize; 3],
        below: usize,
        witness: Precision,
    },
    Accept {
        round: usize,
        candidate: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        angle: Option<[usize; 3]>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub seq: u64,
    #[serde(flatten)]
    pub event: Event,
}

/// Append-only event log with strictly increasing sequence numbers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    events: Vec<TraceEvent>,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, event: Event) {
        let seq = self.events.len() as u64;
        self.events.push(TraceEvent { seq, event });
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for ev in &self.events {
            out.push_str(&serde_json::to_string(ev).expect("trace events serialize"));
            out.push('\n');
        }
        out
    }

    pub fn parse_jsonl(text: &str) -> Result<Self, TraceParseError> {
        let mut events = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let ev: TraceEvent =
                serde_json::from_str(line).map_err(|source| TraceParseError::Json {
                    line: lineno + 1,
                    source,
                })?;
            if ev.seq != events.len() as u64 {
                return Err(TraceParseError::Sequence {
                    line: lineno + 1,
                    seq: ev.seq,
                });
            }
            events.push(ev);
        }
        Ok(Trace { events })
    }

    /// Final state obtained by replaying every `extend` record.
    pub fn replay_state(&self) -> Vec<StateEntry> {
        let mut map: BTreeMap<Pair, Precision> = BTreeMap::new();
        for ev in &self.events {
            if let Event::Extend { pair, witness, .. } = ev.event {
                map.entry(pair).or_insert(witness);
            }
        }
        map.into_iter()
            .map(|((i, j), witness)| StateEntry { i, j, witness })
            .collect()
    }

    /// Totality decisions of each round in order, as `(pair, strict?)`.
    pub fn decision_paths(&self) -> Vec<Vec<(Pair, bool)>> {
        let mut rounds: Vec<Vec<(Pair, bool)>> = Vec::new();
        for ev in &self.events {
            if let Event::Decide {
                round,
                pair,
                outcome,
                ..
            } = ev.event
            {
                while rounds.len() <= round {
                    rounds.push(Vec::new());
                }
                rounds[round].push((pair, outcome == DecideOutcome::Strict));
            }
        }
        rounds
    }

    /// Least-element candidates in round order.
    pub fn candidates(&self) -> Vec<usize> {
        self.events
            .iter()
            .filter_map(|ev| match ev.event {
                Event::Candidate { candidate, .. } => Some(candidate),
                _ => None,
            })
            .collect()
    }

    pub fn restarts(&self) -> usize {
        self.events
            .iter()
            .filter(|ev| matches!(ev.event, Event::Restart { .. }))
            .count()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TraceParseError {
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        source: serde_json::Error,
    },
    #[error("line {line}: sequence number {seq} out of order")]
    Sequence { line: usize, seq: u64 },
}

pub(crate) fn snapshot(state: &KnowledgeState) -> Vec<StateEntry> {
    state.entries()
}
