//! Computable reals as memoized sequences of nested rational intervals.
//!
//! A real is a pair of rational sequences `lo(k)`, `hi(k)` such that, for
//! every precision index `k`:
//!
//! * `lo(k) <= hi(k)`
//! * `lo(k) <= lo(k+1)` and `hi(k) >= hi(k+1)`
//! * `hi(k) - lo(k) <= 2^(-k)`
//!
//! The order predicate [`op_at`] compares the upper end of one real with the
//! lower end of another at a single precision, so it is decidable. Strict
//! order `r < s` holds iff some precision separates the two; `r <= s` holds
//! iff no precision separates them the other way round, which can only ever
//! be refuted, never confirmed, by evaluation.

use std::fmt;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::rational::Rational;

/// Position in a nested-interval sequence.
pub type Precision = u32;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        Interval { lo, hi }
    }

    pub fn point(q: Rational) -> Self {
        Interval {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    fn add(&self, other: &Interval) -> Interval {
        Interval::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    fn sub(&self, other: &Interval) -> Interval {
        Interval::new(&self.lo - &other.hi, &self.hi - &other.lo)
    }

    fn mul(&self, other: &Interval) -> Interval {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products.iter().min().cloned().expect("four products");
        let hi = products.iter().max().cloned().expect("four products");
        Interval::new(lo, hi)
    }
}

/// Which clause of the nested-interval condition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NestingClause {
    /// `lo(k) > hi(k)`
    Inverted,
    /// `lo(k) < lo(k-1)`
    LowerDecreased,
    /// `hi(k) > hi(k-1)`
    UpperIncreased,
    /// `hi(k) - lo(k) > 2^(-k)`
    TooWide,
    /// the constant tail of a table is not inside its last interval
    TailOutside,
}

impl fmt::Display for NestingClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NestingClause::Inverted => "lower end above upper end",
            NestingClause::LowerDecreased => "lower end decreased",
            NestingClause::UpperIncreased => "upper end increased",
            NestingClause::TooWide => "width exceeds 2^-k",
            NestingClause::TailOutside => "tail outside last interval",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealError {
    #[error("invalid nesting at k = {k}: {clause}")]
    InvalidNesting { k: Precision, clause: NestingClause },
}

/// Checks the clauses relating `prev` (at `k - 1`) and `cur` (at `k`).
pub fn check_step(
    prev: Option<&Interval>,
    cur: &Interval,
    k: Precision,
) -> Result<(), NestingClause> {
    if cur.lo > cur.hi {
        return Err(NestingClause::Inverted);
    }
    if let Some(prev) = prev {
        if cur.lo < prev.lo {
            return Err(NestingClause::LowerDecreased);
        }
        if cur.hi > prev.hi {
            return Err(NestingClause::UpperIncreased);
        }
    }
    if cur.width() > Rational::pow2_neg(k) {
        return Err(NestingClause::TooWide);
    }
    Ok(())
}

enum Source {
    Constant(Rational),
    Blurred(Rational),
    Table {
        prefix: Vec<Interval>,
        tail: Rational,
    },
    Add(RealNum, RealNum),
    Sub(RealNum, RealNum),
    Mul {
        a: RealNum,
        b: RealNum,
        shift: Precision,
    },
}

struct Inner {
    source: Source,
    cache: Mutex<Vec<Interval>>,
}

/// A computable real. Cloning is cheap and shares the interval cache.
#[derive(Clone)]
pub struct RealNum {
    inner: Arc<Inner>,
}

impl fmt::Debug for RealNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.inner.source {
            Source::Constant(q) => return write!(f, "RealNum::rational({q})"),
            Source::Blurred(q) => return write!(f, "RealNum::blurred({q})"),
            Source::Table { prefix, tail } => {
                return write!(f, "RealNum::table(len={}, tail={tail})", prefix.len())
            }
            Source::Add(..) => "add",
            Source::Sub(..) => "sub",
            Source::Mul { .. } => "mul",
        };
        write!(f, "RealNum::{kind}(..)")
    }
}

impl RealNum {
    fn from_source(source: Source) -> Self {
        RealNum {
            inner: Arc::new(Inner {
                source,
                cache: Mutex::new(Vec::new()),
            }),
        }
    }

    /// The constant sequence of the degenerate interval `[q, q]`.
    pub fn rational(q: Rational) -> Self {
        Self::from_source(Source::Constant(q))
    }

    pub fn zero() -> Self {
        Self::rational(Rational::zero())
    }

    /// `[q - 2^(-(k+1)), q + 2^(-(k+1))]`: the slowest convergence the
    /// nesting condition allows.
    pub fn blurred(q: Rational) -> Self {
        Self::from_source(Source::Blurred(q))
    }

    /// Explicit intervals for `k < prefix.len()`, then the degenerate
    /// interval at `tail`. Validated eagerly.
    pub fn table(prefix: Vec<Interval>, tail: Rational) -> Result<Self, RealError> {
        let mut prev: Option<&Interval> = None;
        for (k, iv) in prefix.iter().enumerate() {
            let k = k as Precision;
            check_step(prev, iv, k).map_err(|clause| RealError::InvalidNesting { k, clause })?;
            prev = Some(iv);
        }
        if let Some(last) = prefix.last() {
            if !last.contains(&tail) {
                return Err(RealError::InvalidNesting {
                    k: prefix.len() as Precision,
                    clause: NestingClause::TailOutside,
                });
            }
        }
        Ok(Self::from_source(Source::Table { prefix, tail }))
    }

    fn generate(&self, k: Precision) -> Interval {
        match &self.inner.source {
            Source::Constant(q) => Interval::point(q.clone()),
            Source::Blurred(q) => {
                let h = Rational::pow2_neg(k + 1);
                Interval::new(q - &h, q + &h)
            }
            Source::Table { prefix, tail } => prefix
                .get(k as usize)
                .cloned()
                .unwrap_or_else(|| Interval::point(tail.clone())),
            Source::Add(a, b) => a.interval_at(k + 1).add(&b.interval_at(k + 1)),
            Source::Sub(a, b) => a.interval_at(k + 1).sub(&b.interval_at(k + 1)),
            Source::Mul { a, b, shift } => {
                a.interval_at(k + shift).mul(&b.interval_at(k + shift))
            }
        }
    }

    /// Endpoints at precision `k`, computed once and memoized.
    pub fn interval_at(&self, k: Precision) -> Interval {
        let mut cache = self.inner.cache.lock().expect("interval cache poisoned");
        while cache.len() <= k as usize {
            let next = cache.len() as Precision;
            let iv = self.generate(next);
            debug_assert!(
                check_step(cache.last(), &iv, next).is_ok(),
                "nesting violated at k = {next}: {:?}",
                check_step(cache.last(), &iv, next)
            );
            cache.push(iv);
        }
        cache[k as usize].clone()
    }

    /// The exact limit, when this real was built from rationals only.
    pub fn rational_limit(&self) -> Option<Rational> {
        match &self.inner.source {
            Source::Constant(q) | Source::Blurred(q) => Some(q.clone()),
            Source::Table { tail, .. } => Some(tail.clone()),
            Source::Add(a, b) => Some(a.rational_limit()? + b.rational_limit()?),
            Source::Sub(a, b) => Some(a.rational_limit()? - b.rational_limit()?),
            Source::Mul { a, b, .. } => Some(a.rational_limit()? * b.rational_limit()?),
        }
    }
}

/// Evaluates operands one index deeper so the widths sum to at most `2^(-k)`.
pub fn add(a: &RealNum, b: &RealNum) -> RealNum {
    RealNum::from_source(Source::Add(a.clone(), b.clone()))
}

pub fn sub(a: &RealNum, b: &RealNum) -> RealNum {
    RealNum::from_source(Source::Sub(a.clone(), b.clone()))
}

/// Evaluates operands at `k + c_a + c_b + 2`, where `2^c_x` bounds the
/// magnitude of `x` at index 0 (so at every later index too).
pub fn mul(a: &RealNum, b: &RealNum) -> RealNum {
    let c = |x: &RealNum| {
        let iv = x.interval_at(0);
        iv.lo
            .magnitude_exponent()
            .max(iv.hi.magnitude_exponent())
    };
    let shift = c(a) + c(b) + 2;
    RealNum::from_source(Source::Mul {
        a: a.clone(),
        b: b.clone(),
        shift,
    })
}

/// `hi_r(k) < lo_s(k)`: `r` is strictly below `s`, as seen at precision `k`.
pub fn op_at(r: &RealNum, s: &RealNum, k: Precision) -> bool {
    r.interval_at(k).hi < s.interval_at(k).lo
}

/// Smallest `k <= k_max` with `op_at(r, s, k)`.
pub fn find_strict_witness(r: &RealNum, s: &RealNum, k_max: Precision) -> Option<Precision> {
    (0..=k_max).find(|&k| op_at(r, s, k))
}

/// Runs every nesting clause over `0..=k_max`.
pub fn check_nesting(r: &RealNum, k_max: Precision) -> Result<(), RealError> {
    let mut prev: Option<Interval> = None;
    for k in 0..=k_max {
        let cur = r.interval_at(k);
        check_step(prev.as_ref(), &cur, k).map_err(|clause| RealError::InvalidNesting { k, clause })?;
        prev = Some(cur);
    }
    Ok(())
}

/// Reals addressed by dense indices `0..len`.
#[derive(Clone, Debug, Default)]
pub struct RealRegistry {
    entries: Vec<RealNum>,
}

impl RealRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, r: RealNum) -> usize {
        self.entries.push(r);
        self.entries.len() - 1
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> &RealNum {
        &self.entries[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &RealNum> {
        self.entries.iter()
    }

    pub fn op_at(&self, i: usize, j: usize, k: Precision) -> bool {
        op_at(&self.entries[i], &self.entries[j], k)
    }
}

impl FromIterator<RealNum> for RealRegistry {
    fn from_iter<T: IntoIterator<Item = RealNum>>(iter: T) -> Self {
        RealRegistry {
            entries: iter.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn iv(lo: &str, hi: &str) -> Interval {
        Interval::new(q(lo), q(hi))
    }

    #[test]
    fn degenerate_constant() {
        let r = RealNum::rational(q("3/2"));
        assert_eq!(r.interval_at(7), iv("3/2", "3/2"));
        assert_eq!(RealNum::rational(q("5")).interval_at(0), iv("5", "5"));
        assert!(op_at(&RealNum::zero(), &RealNum::rational(q("1")), 0));
        let x = RealNum::rational(q("-2/7"));
        assert!((0..=64).all(|k| !op_at(&x, &x, k)));
    }

    #[test]
    fn blurred_endpoints() {
        let r = RealNum::blurred(q("0"));
        assert_eq!(r.interval_at(3), iv("-1/16", "1/16"));
        let t = RealNum::blurred(q("1/3"));
        assert_eq!(t.interval_at(2), iv("5/24", "11/24"));
        assert_eq!(t.interval_at(2), t.interval_at(2));
        assert_eq!(t.interval_at(9).width(), Rational::pow2_neg(9));
    }

    #[test]
    fn blurred_separation() {
        let a = RealNum::blurred(q("0"));
        let b = RealNum::blurred(q("1"));
        assert!(!op_at(&a, &b, 0));
        assert!(op_at(&a, &b, 1));
        assert_eq!(find_strict_witness(&a, &b, 10), Some(1));
        assert_eq!(find_strict_witness(&a, &a, 10), None);
        assert_eq!(
            find_strict_witness(&RealNum::zero(), &RealNum::rational(q("1")), 10),
            Some(0)
        );
    }

    #[test]
    fn table_fixtures() {
        let r = RealNum::table(vec![iv("0", "1"), iv("1/4", "3/4")], q("1/2")).unwrap();
        assert_eq!(r.interval_at(1), iv("1/4", "3/4"));
        assert_eq!(r.interval_at(5), iv("1/2", "1/2"));

        let err = RealNum::table(vec![iv("0", "1"), iv("0", "3/4")], q("1/2")).unwrap_err();
        assert_eq!(
            err,
            RealError::InvalidNesting {
                k: 1,
                clause: NestingClause::TooWide
            }
        );

        let err = RealNum::table(vec![iv("0", "1")], q("2")).unwrap_err();
        assert!(matches!(
            err,
            RealError::InvalidNesting {
                clause: NestingClause::TailOutside,
                ..
            }
        ));

        let err = RealNum::table(vec![iv("0", "1"), iv("1/2", "1/4")], q("1/2")).unwrap_err();
        assert!(matches!(
            err,
            RealError::InvalidNesting {
                k: 1,
                clause: NestingClause::Inverted
            }
        ));

        let err = RealNum::table(vec![iv("0", "1"), iv("-1/8", "1/4")], q("0")).unwrap_err();
        assert!(matches!(
            err,
            RealError::InvalidNesting {
                k: 1,
                clause: NestingClause::LowerDecreased
            }
        ));

        let err = RealNum::table(vec![iv("0", "2")], q("1")).unwrap_err();
        assert!(matches!(
            err,
            RealError::InvalidNesting {
                k: 0,
                clause: NestingClause::TooWide
            }
        ));
    }

    #[test]
    fn arithmetic_basics() {
        let one = RealNum::rational(q("1"));
        let two = RealNum::rational(q("2"));
        let s = add(&one, &two);
        assert!((0..20).all(|k| s.interval_at(k) == iv("3", "3")));

        let x = RealNum::blurred(q("7/3"));
        let z = mul(&x, &RealNum::zero());
        assert!((0..20).all(|k| z.interval_at(k) == iv("0", "0")));

        let d = sub(&x, &x);
        for k in 0..=64 {
            assert!(!op_at(&d, &RealNum::zero(), k));
            assert!(!op_at(&RealNum::zero(), &d, k));
        }
    }

    #[test]
    fn mul_widths_stay_in_bound() {
        let a = RealNum::blurred(q("-13/2"));
        let b = RealNum::blurred(q("9/4"));
        let p = mul(&a, &b);
        check_nesting(&p, 80).unwrap();
        let exact = q("-13/2") * q("9/4");
        assert!((0..=80).all(|k| p.interval_at(k).contains(&exact)));
        assert_eq!(p.rational_limit(), Some(exact));
    }

    fn arb_real() -> impl Strategy<Value = (RealNum, Rational)> {
        let frac = (-40i64..40, 1i64..12).prop_map(|(n, d)| Rational::new(n, d));
        prop_oneof![
            frac.clone().prop_map(|v| (RealNum::rational(v.clone()), v)),
            frac.clone().prop_map(|v| (RealNum::blurred(v.clone()), v)),
            (frac, 0usize..6).prop_map(|(v, len)| {
                // shrinking prefix around v, offset so it is not centred
                let prefix = (0..len)
                    .map(|k| {
                        let w = Rational::pow2_neg(k as u32 + 1);
                        let third = &w * &Rational::new(1, 3);
                        Interval::new(&v - &third, &(&v + &w) - &third)
                    })
                    .collect();
                (RealNum::table(prefix, v.clone()).unwrap(), v)
            }),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn constructors_nest((r, v) in arb_real()) {
            check_nesting(&r, 40).unwrap();
            prop_assert!((0..=40).all(|k| r.interval_at(k).contains(&v)));
        }

        #[test]
        fn arithmetic_is_sound((a, va) in arb_real(), (b, vb) in arb_real()) {
            for (r, exact) in [
                (add(&a, &b), &va + &vb),
                (sub(&a, &b), &va - &vb),
                (mul(&a, &b), &va * &vb),
            ] {
                check_nesting(&r, 64).unwrap();
                for k in 0..=64 {
                    prop_assert!(r.interval_at(k).contains(&exact));
                }
            }
        }

        #[test]
        fn witness_matches_naive_scan((a, _) in arb_real(), (b, _) in arb_real(), k_max in 0u32..40) {
            let naive = (0..=k_max).filter(|&k| op_at(&a, &b, k)).min();
            prop_assert_eq!(find_strict_witness(&a, &b, k_max), naive);
        }
    }
}
