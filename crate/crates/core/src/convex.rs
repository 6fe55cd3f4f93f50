//! Selecting `A`, `B`, `C` so that every other point lies strictly inside
//! the convex angle `BAC`.
//!
//! `A` is the least-element candidate over the y-coordinates. The scan over
//! the remaining points keeps `B` and `C` as the two bounding rays; whenever
//! the geometry forces a configuration where some point must lie strictly
//! below `A`, that point falsifies the candidate's claim `y_A <= y_x`, the
//! blame is pushed into the knowledge state and the whole computation
//! restarts.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{check_general_position, decide_side, three_points, GeometryError, Point, SideDecision};
use crate::knowledge::{check_leq, CheckOutcome, EngineError, KnowledgeState};
use crate::least::{least_candidate, record_candidate};
use crate::reals::{Precision, RealRegistry};
use crate::trace::{snapshot, Event, Side, Stage, Trace};

/// Witnesses for the bounding condition of an angle `B A C`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundingCertificate {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    /// `C` is left of `AB`.
    pub c_left_of_ab: Precision,
    /// `B` is right of `AC`.
    pub b_right_of_ac: Precision,
    pub others: Vec<PointWitness>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointWitness {
    pub d: usize,
    /// `P_d` is left of `AB`.
    pub left_of_ab: Precision,
    /// `P_d` is right of `AC`.
    pub right_of_ac: Precision,
}

impl BoundingCertificate {
    pub fn max_witness(&self) -> Precision {
        self.others
            .iter()
            .flat_map(|w| [w.left_of_ab, w.right_of_ac])
            .chain([self.c_left_of_ab, self.b_right_of_ac])
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub struct ConvexAngleResult {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub certificate: BoundingCertificate,
    pub final_state: KnowledgeState,
    pub restarts: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct ConvexConfig {
    pub k_max: Precision,
    pub max_restarts: u64,
    /// Decide every triple up front so that collinear input is always
    /// reported, even when the scan would never look at the triple.
    pub audit_general_position: bool,
}

impl ConvexConfig {
    pub fn new(k_max: Precision, max_restarts: u64) -> Self {
        ConvexConfig {
            k_max,
            max_restarts,
            audit_general_position: true,
        }
    }
}

/// A clause of the bounding condition that could not be re-derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailedClause {
    pub ray: (usize, usize),
    pub point: usize,
    pub expected: Side,
    pub found: Option<Side>,
}

impl fmt::Display for FailedClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let expected = match self.expected {
            Side::Left => "left",
            Side::Right => "right",
        };
        let found = match self.found {
            Some(Side::Left) => "left",
            Some(Side::Right) => "right",
            None => "undecided",
        };
        write!(
            f,
            "point {} must be {expected} of {}->{} but is {found}",
            self.point, self.ray.0, self.ray.1
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvexError {
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("point at position {position} carries index {index}")]
    BadIndex { position: usize, index: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("restart budget of {0} exceeded")]
    RestartBudgetExceeded(u64),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("certificate failure: {0}")]
    CertificateFailure(FailedClause),
    #[error("angle vertices must be distinct, got {0:?}")]
    NotDistinct([usize; 3]),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

enum ScanOutcome {
    Bounded(BoundingCertificate),
    /// Point `below` was found strictly under `A` at `witness`.
    Below {
        below: usize,
        witness: Precision,
    },
}

struct Scanner<'a> {
    points: &'a [Point],
    a: usize,
    k_max: Precision,
    round: usize,
    trace: &'a mut Trace,
}

impl Scanner<'_> {
    fn side(&mut self, q: usize, r: usize, stage: Stage) -> Result<SideDecision, ConvexError> {
        let pts = self.points;
        let d = decide_side(&pts[self.a], &pts[q], &pts[r], self.k_max)?;
        self.trace.push(Event::Side {
            round: self.round,
            stage,
            triple: [self.a, q, r],
            side: d.side(),
            witness: d.witness(),
        });
        Ok(d)
    }

    fn expect(&mut self, q: usize, r: usize, expected: Side) -> Result<Precision, ConvexError> {
        let d = self.side(q, r, Stage::Rescan)?;
        if d.side() != expected {
            return Err(ConvexError::Inconsistent(format!(
                "side of {r} w.r.t. {}->{q} contradicts an earlier decision",
                self.a
            )));
        }
        Ok(d.witness())
    }

    fn below(&mut self, ring: [usize; 3]) -> Result<ScanOutcome, ConvexError> {
        let pts = self.points;
        let (i, witness) = three_points(&pts[self.a], ring.map(|q| &pts[q]), self.k_max)?;
        self.trace.push(Event::ThreePoints {
            round: self.round,
            center: self.a,
            ring,
            below: ring[i],
            witness,
        });
        Ok(ScanOutcome::Below {
            below: ring[i],
            witness,
        })
    }

    fn scan(&mut self) -> Result<ScanOutcome, ConvexError> {
        let a = self.a;
        let others: Vec<usize> = (0..self.points.len()).filter(|&i| i != a).collect();
        let (mut b, mut c) = (others[0], others[1]);

        let first = self.side(c, b, Stage::InitBc)?;
        let (mut c_left_of_ab, mut b_right_of_ac) = match first {
            SideDecision::Left(w) => {
                std::mem::swap(&mut b, &mut c);
                let right = self.side(c, b, Stage::InitBc)?;
                if right.is_left() {
                    return Err(ConvexError::Inconsistent(format!("{b} and {c} are on both sides")));
                }
                (w, right.witness())
            }
            SideDecision::Right(w) => {
                let left = self.side(b, c, Stage::InitBc)?;
                if !left.is_left() {
                    return Err(ConvexError::Inconsistent(format!("{b} and {c} are on both sides")));
                }
                (left.witness(), w)
            }
        };

        // d -> (left of AB, right of AC)
        let mut certified: BTreeMap<usize, (Precision, Precision)> = BTreeMap::new();
        for &d in &others[2..] {
            let sb = self.side(b, d, Stage::Scan)?;
            let sc = self.side(c, d, Stage::Scan)?;
            match (sb, sc) {
                (SideDecision::Left(l), SideDecision::Right(r)) => {
                    certified.insert(d, (l, r));
                }
                (SideDecision::Right(_), SideDecision::Left(_)) => {
                    return self.below([d, b, c]);
                }
                (SideDecision::Right(_), SideDecision::Right(r)) => {
                    let old = b;
                    let old_left = self.expect(d, old, Side::Left)?;
                    let mutual = self.expect(d, c, Side::Left)?;
                    for (&e, wit) in certified.iter_mut() {
                        match self.side(d, e, Stage::Rescan)? {
                            SideDecision::Left(w) => wit.0 = w,
                            SideDecision::Right(_) => return self.below([e, d, old]),
                        }
                    }
                    certified.insert(old, (old_left, b_right_of_ac));
                    b = d;
                    c_left_of_ab = mutual;
                    b_right_of_ac = r;
                }
                (SideDecision::Left(l), SideDecision::Left(_)) => {
                    let old = c;
                    let old_right = self.expect(d, old, Side::Right)?;
                    let mutual = self.expect(d, b, Side::Right)?;
                    for (&e, wit) in certified.iter_mut() {
                        match self.side(d, e, Stage::Rescan)? {
                            SideDecision::Right(w) => wit.1 = w,
                            SideDecision::Left(_) => return self.below([old, d, e]),
                        }
                    }
                    certified.insert(old, (c_left_of_ab, old_right));
                    c = d;
                    b_right_of_ac = mutual;
                    c_left_of_ab = l;
                }
            }
        }

        Ok(ScanOutcome::Bounded(BoundingCertificate {
            a,
            b,
            c,
            c_left_of_ab,
            b_right_of_ac,
            others: certified
                .into_iter()
                .map(|(d, (left_of_ab, right_of_ac))| PointWitness {
                    d,
                    left_of_ab,
                    right_of_ac,
                })
                .collect(),
        }))
    }
}

fn check_indices(points: &[Point]) -> Result<(), ConvexError> {
    if points.len() < 3 {
        return Err(ConvexError::TooFewPoints(points.len()));
    }
    for (position, p) in points.iter().enumerate() {
        if p.index != position {
            return Err(ConvexError::BadIndex {
                position,
                index: p.index,
            });
        }
    }
    Ok(())
}

pub fn convex_angle(
    points: &[Point],
    config: &ConvexConfig,
    trace: &mut Trace,
) -> Result<ConvexAngleResult, ConvexError> {
    check_indices(points)?;
    if config.audit_general_position {
        check_general_position(points, config.k_max)?;
    }
    let ys: RealRegistry = points.iter().map(|p| p.y.clone()).collect();
    let n = points.len() - 1;
    let mut state = KnowledgeState::empty();
    let mut restarts = 0u64;
    let mut round = 0usize;
    loop {
        let cand = least_candidate(&state, n);
        record_candidate(trace, round, &state, &cand);
        let a = cand.candidate;
        let outcome = Scanner {
            points,
            a,
            k_max: config.k_max,
            round,
            trace,
        }
        .scan()?;
        let (below, witness) = match outcome {
            ScanOutcome::Bounded(certificate) => {
                trace.push(Event::Accept {
                    round,
                    candidate: a,
                    angle: Some([a, certificate.b, certificate.c]),
                });
                return Ok(ConvexAngleResult {
                    a,
                    b: certificate.b,
                    c: certificate.c,
                    certificate,
                    final_state: state,
                    restarts,
                });
            }
            ScanOutcome::Below { below, witness } => (below, witness),
        };

        let (pair, blamed) = match check_leq(&ys, cand.evidence(below), witness)? {
            CheckOutcome::Falsified { pair, witness } => (pair, witness),
            CheckOutcome::Holds => {
                return Err(ConvexError::Inconsistent(format!(
                    "point {below} below {a} at {witness} did not falsify the candidate"
                )))
            }
        };
        trace.push(Event::Falsified {
            round,
            claim: (a, below),
            precision: witness,
        });
        trace.push(Event::Blame {
            round,
            pair,
            witness: blamed,
        });
        state = state.extend(&ys, pair.0, pair.1, blamed)?;
        trace.push(Event::Extend {
            round,
            pair,
            witness: blamed,
            state: snapshot(&state),
        });
        restarts += 1;
        if restarts > config.max_restarts {
            return Err(ConvexError::RestartBudgetExceeded(config.max_restarts));
        }
        round += 1;
        trace.push(Event::Restart { round });
    }
}

/// Re-derives every clause of the bounding condition for `(a, b, c)` with
/// fresh side decisions.
pub fn verify_bounding(
    points: &[Point],
    a: usize,
    b: usize,
    c: usize,
    k_max: Precision,
) -> Result<BoundingCertificate, ConvexError> {
    check_indices(points)?;
    if a == b || b == c || a == c || a.max(b).max(c) >= points.len() {
        return Err(ConvexError::NotDistinct([a, b, c]));
    }
    let clause = |q: usize, d: usize, expected: Side| -> Result<Precision, ConvexError> {
        let found = decide_side(&points[a], &points[q], &points[d], k_max).ok();
        match found {
            Some(s) if s.side() == expected => Ok(s.witness()),
            _ => Err(ConvexError::CertificateFailure(FailedClause {
                ray: (a, q),
                point: d,
                expected,
                found: found.map(|s| s.side()),
            })),
        }
    };
    let c_left_of_ab = clause(b, c, Side::Left)?;
    let b_right_of_ac = clause(c, b, Side::Right)?;
    let mut others = Vec::new();
    for d in (0..points.len()).filter(|&d| d != a && d != b && d != c) {
        others.push(PointWitness {
            d,
            left_of_ab: clause(b, d, Side::Left)?,
            right_of_ac: clause(c, d, Side::Right)?,
        });
    }
    Ok(BoundingCertificate {
        a,
        b,
        c,
        c_left_of_ab,
        b_right_of_ac,
        others,
    })
}
