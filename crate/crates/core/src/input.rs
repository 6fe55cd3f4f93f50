//! Line-oriented input documents, auditor scripts and result records.
//!
//! Every file is JSON Lines. Blank lines and lines starting with `#` are
//! skipped. Fractions are always strings such as `"-3/4"`.
//!
//! ```text
//! {"type":"real","index":0,"kind":"blurred","value":"1/3"}
//! {"type":"real","index":1,"kind":"table","prefix":[["0","1"],["1/4","3/4"]],"tail":"1/2"}
//! {"type":"point","index":0,"x":{"kind":"rational","value":"0"},"y":{"kind":"blurred","value":"-2"}}
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convex::{BoundingCertificate, ConvexAngleResult};
use crate::geometry::Point;
use crate::least::Challenge;
use crate::rational::Rational;
use crate::reals::{Interval, RealError, RealNum, RealRegistry};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RealSpec {
    Rational {
        value: Rational,
    },
    Blurred {
        value: Rational,
    },
    Table {
        prefix: Vec<(Rational, Rational)>,
        tail: Rational,
    },
}

impl RealSpec {
    pub fn build(&self) -> Result<RealNum, RealError> {
        match self {
            RealSpec::Rational { value } => Ok(RealNum::rational(value.clone())),
            RealSpec::Blurred { value } => Ok(RealNum::blurred(value.clone())),
            RealSpec::Table { prefix, tail } => RealNum::table(
                prefix
                    .iter()
                    .map(|(lo, hi)| Interval::new(lo.clone(), hi.clone()))
                    .collect(),
                tail.clone(),
            ),
        }
    }

    pub fn limit(&self) -> &Rational {
        match self {
            RealSpec::Rational { value } | RealSpec::Blurred { value } => value,
            RealSpec::Table { tail, .. } => tail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSpec {
    pub index: usize,
    pub x: RealSpec,
    pub y: RealSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum Record {
    Real {
        index: usize,
        #[serde(flatten)]
        spec: RealSpec,
    },
    Point(PointSpec),
}

#[derive(Debug, Error)]
pub enum InputError {
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        source: serde_json::Error,
    },
    #[error("{what} indices must be dense from 0: expected {expected}, found {found}")]
    Index {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{what} {index}: {source}")]
    Real {
        what: &'static str,
        index: usize,
        source: RealError,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InputDocument {
    pub reals: Vec<RealSpec>,
    pub points: Vec<PointSpec>,
}

fn records<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>, InputError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| serde_json::from_str(l).map_err(|source| InputError::Json { line: i + 1, source }))
        .collect()
}

impl InputDocument {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        let mut doc = InputDocument::default();
        for rec in records::<Record>(text)? {
            let (what, index, expected) = match rec {
                Record::Real { index, spec } => {
                    let expected = doc.reals.len();
                    doc.reals.push(spec);
                    ("real", index, expected)
                }
                Record::Point(p) => {
                    let expected = doc.points.len();
                    let index = p.index;
                    doc.points.push(p);
                    ("point", index, expected)
                }
            };
            if index != expected {
                return Err(InputError::Index {
                    what,
                    expected,
                    found: index,
                });
            }
        }
        // validate eagerly
        doc.registry()?;
        doc.build_points()?;
        Ok(doc)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let reals = self.reals.iter().enumerate().map(|(index, spec)| Record::Real {
            index,
            spec: spec.clone(),
        });
        let points = self.points.iter().cloned().map(Record::Point);
        for rec in reals.chain(points) {
            out.push_str(&serde_json::to_string(&rec).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn registry(&self) -> Result<RealRegistry, InputError> {
        self.reals
            .iter()
            .enumerate()
            .map(|(index, s)| {
                s.build().map_err(|source| InputError::Real {
                    what: "real",
                    index,
                    source,
                })
            })
            .collect()
    }

    pub fn real_limits(&self) -> Vec<Rational> {
        self.reals.iter().map(|s| s.limit().clone()).collect()
    }

    pub fn build_points(&self) -> Result<Vec<Point>, InputError> {
        self.points
            .iter()
            .map(|p| {
                let err = |source| InputError::Real {
                    what: "point",
                    index: p.index,
                    source,
                };
                Ok(Point::new(p.index, p.x.build().map_err(err)?, p.y.build().map_err(err)?))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct ScriptRound {
    challenges: Vec<ScriptChallenge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct ScriptChallenge {
    j: usize,
    precision: u32,
}

/// One line per round: `{"challenges":[{"j":3,"precision":33}]}`.
pub fn parse_script(text: &str) -> Result<Vec<Vec<Challenge>>, InputError> {
    Ok(records::<ScriptRound>(text)?
        .into_iter()
        .map(|r| {
            r.challenges
                .into_iter()
                .map(|c| Challenge {
                    j: c.j,
                    precision: c.precision,
                })
                .collect()
        })
        .collect())
}

pub fn script_to_jsonl(rounds: &[Vec<Challenge>]) -> String {
    rounds
        .iter()
        .map(|r| {
            let round = ScriptRound {
                challenges: r
                    .iter()
                    .map(|c| ScriptChallenge {
                        j: c.j,
                        precision: c.precision,
                    })
                    .collect(),
            };
            serde_json::to_string(&round).expect("script serializes") + "\n"
        })
        .collect()
}

/// What `convex` writes and `check` reads back.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexRecord {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub restarts: u64,
    pub certificate: BoundingCertificate,
}

impl From<&ConvexAngleResult> for ConvexRecord {
    fn from(r: &ConvexAngleResult) -> Self {
        ConvexRecord {
            a: r.a,
            b: r.b,
            c: r.c,
            restarts: r.restarts,
            certificate: r.certificate.clone(),
        }
    }
}

impl ConvexRecord {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        let mut recs = records::<ConvexRecord>(text)?;
        match recs.len() {
            1 => Ok(recs.remove(0)),
            n => Err(InputError::Index {
                what: "result record",
                expected: 1,
                found: n,
            }),
        }
    }

    pub fn to_jsonl(&self) -> String {
        serde_json::to_string(self).expect("result serializes") + "\n"
    }
}
