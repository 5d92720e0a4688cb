//! Truncated formal Dirichlet series with integer coefficients.
//!
//! A [`Series`] is the truncation of `sum a_d t^d` at a degree cutoff. The
//! cutoff is part of the value: arithmetic never produces terms above it and
//! two series compare equal only when their cutoffs agree.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::degree::{DegreeKey, KeyKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("key kinds differ: {0} vs {1}")]
    KeyKindMismatch(KeyKind, KeyKind),
    #[error("cutoffs differ: {0} vs {1}")]
    CutoffMismatch(DegreeKey, DegreeKey),
    #[error("constant term {0} is not a unit")]
    NonUnitConstantTerm(BigInt),
    #[error("evaluation point {0} is outside (0, 1)")]
    DomainError(f64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    kind: KeyKind,
    cutoff: DegreeKey,
    terms: BTreeMap<DegreeKey, BigInt>,
}

impl Series {
    pub fn zero(cutoff: DegreeKey) -> Self {
        Series {
            kind: cutoff.kind(),
            cutoff,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(cutoff: DegreeKey) -> Self {
        let mut s = Series::zero(cutoff);
        s.terms.insert(DegreeKey::zero(s.kind), BigInt::one());
        s
    }

    /// Builds a series from `(key, coefficient)` pairs, summing repeated keys
    /// and dropping everything above the cutoff.
    pub fn from_terms<I, C>(cutoff: DegreeKey, terms: I) -> Result<Self, SeriesError>
    where
        I: IntoIterator<Item = (DegreeKey, C)>,
        C: Into<BigInt>,
    {
        let mut s = Series::zero(cutoff);
        for (key, coeff) in terms {
            if key.kind() != s.kind {
                return Err(SeriesError::KeyKindMismatch(s.kind, key.kind()));
            }
            s.add_term(key, coeff.into());
        }
        Ok(s)
    }

    pub(crate) fn add_term(&mut self, key: DegreeKey, coeff: BigInt) {
        if key > self.cutoff || coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn kind(&self) -> KeyKind {
        self.kind
    }

    pub fn cutoff(&self) -> &DegreeKey {
        &self.cutoff
    }

    pub fn terms(&self) -> &BTreeMap<DegreeKey, BigInt> {
        &self.terms
    }

    pub fn coeff(&self, key: &DegreeKey) -> BigInt {
        self.terms.get(key).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&DegreeKey::zero(self.kind))
                .is_some_and(|c| c.is_one())
    }

    /// Drops all terms above `cutoff` (which must not exceed the current one).
    pub fn truncate(&self, cutoff: &DegreeKey) -> Series {
        let cutoff = cutoff.min(&self.cutoff).clone();
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| **k <= cutoff)
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect();
        Series {
            kind: self.kind,
            cutoff,
            terms,
        }
    }

    fn check_compatible(&self, other: &Series) -> Result<(), SeriesError> {
        if self.kind != other.kind {
            return Err(SeriesError::KeyKindMismatch(self.kind, other.kind));
        }
        if self.cutoff != other.cutoff {
            return Err(SeriesError::CutoffMismatch(
                self.cutoff.clone(),
                other.cutoff.clone(),
            ));
        }
        Ok(())
    }

    /// Term-wise sum.
    pub fn sum(&self, other: &Series) -> Result<Series, SeriesError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn negate(&self) -> Series {
        Series {
            kind: self.kind,
            cutoff: self.cutoff.clone(),
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }

    /// Truncated convolution: the coefficient at `d` sums `f(a) g(b)` over
    /// all key pairs with `a + b = d`.
    pub fn product(&self, other: &Series) -> Result<Series, SeriesError> {
        self.check_compatible(other)?;
        let mut acc: BTreeMap<DegreeKey, BigInt> = BTreeMap::new();
        for (ka, ca) in &self.terms {
            if *ka > self.cutoff {
                break;
            }
            for (kb, cb) in &other.terms {
                let key = ka.add(kb);
                if key > self.cutoff {
                    break;
                }
                *acc.entry(key).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Series {
            kind: self.kind,
            cutoff: self.cutoff.clone(),
            terms: acc,
        })
    }

    /// The unique `g` with `self * g = 1` up to the cutoff, by a
    /// degree-by-degree triangular solve.
    pub fn invert(&self) -> Result<Series, SeriesError> {
        let zero = DegreeKey::zero(self.kind);
        let constant = self.coeff(&zero);
        if constant.abs() != BigInt::one() {
            return Err(SeriesError::NonUnitConstantTerm(constant));
        }
        // The inverse is supported on the additive closure of the support.
        let steps: Vec<(&DegreeKey, &BigInt)> =
            self.terms.iter().filter(|(k, _)| !k.is_zero()).collect();
        let support = additive_closure(steps.iter().map(|(k, _)| *k), &self.cutoff);

        let mut inverse: BTreeMap<DegreeKey, BigInt> = BTreeMap::new();
        for d in support {
            let value = if d.is_zero() {
                constant.clone()
            } else {
                let mut acc = BigInt::zero();
                for (e, fe) in &steps {
                    if **e > d {
                        break;
                    }
                    if let Some(rest) = d.checked_sub(e) {
                        if let Some(g) = inverse.get(&rest) {
                            acc += *fe * g;
                        }
                    }
                }
                // g(d) = -f(0)^{-1} * acc and f(0)^{-1} = f(0) for a unit
                -(&constant * acc)
            };
            if !value.is_zero() {
                inverse.insert(d, value);
            }
        }
        Ok(Series {
            kind: self.kind,
            cutoff: self.cutoff.clone(),
            terms: inverse,
        })
    }

    /// Partial sum `sum a_d t0^d` over the stored terms. Integer keys stand
    /// for `log n`, so they contribute `a_n t0^(ln n) = a_n n^(ln t0)`.
    pub fn evaluate_partial(&self, t0: f64) -> Result<f64, SeriesError> {
        if !(t0 > 0.0 && t0 < 1.0) {
            return Err(SeriesError::DomainError(t0));
        }
        Ok(self
            .terms
            .iter()
            .map(|(k, c)| c.to_f64().unwrap_or(f64::NAN) * t0.powf(k.to_f64()))
            .sum())
    }

    /// Partial sum of the Dirichlet series at `t = exp(-s)`.
    pub fn evaluate_at_s(&self, s: f64) -> Result<f64, SeriesError> {
        self.evaluate_partial((-s).exp())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(k, c)| serde_json::json!([k.to_json(), c.to_string()]))
            .collect();
        serde_json::json!({
            "key_kind": self.kind.as_str(),
            "cutoff": self.cutoff.to_json(),
            "terms": terms,
        })
    }
}

/// All keys `<= cutoff` reachable as finite sums of `generators` (including
/// the zero key), in ascending order.
pub fn additive_closure<'a, I>(generators: I, cutoff: &DegreeKey) -> BTreeSet<DegreeKey>
where
    I: IntoIterator<Item = &'a DegreeKey>,
{
    let gens: Vec<&DegreeKey> = generators
        .into_iter()
        .filter(|g| g.is_positive() && *g <= cutoff)
        .collect();
    let mut reached = BTreeSet::new();
    let mut frontier = vec![DegreeKey::zero(cutoff.kind())];
    while let Some(k) = frontier.pop() {
        if !reached.insert(k.clone()) {
            continue;
        }
        for g in &gens {
            let next = k.add(g);
            if next <= *cutoff && !reached.contains(&next) {
                frontier.push(next);
            }
        }
    }
    reached
}
