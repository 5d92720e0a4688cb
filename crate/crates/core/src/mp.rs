//! The commutative family `M_p` with generators `a_0, a_1, ..., a_K`,
//! relations `a_k^2 = a_0^{p_k} a_{k-1}` and full commutativity.
//!
//! Every element has a unique normal form `a_0^n * prod a_k^{e_k}` with
//! `e_k in {0, 1}`, and the degree `n + sum e_k d_k` determines the element:
//! the deepest binary digit of `d_k` sits at `2^-k`, so the binary expansion
//! of the fractional part of a degree spells out `e`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::degree::{floor, DegreeKey};
use crate::presentation::{Generator, Presentation, Relation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MpError {
    #[error("invalid structure constants: {0}")]
    InvalidSpec(String),
    #[error("generator index {index} is outside 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("mcm of an empty index set")]
    EmptyIndexSet,
    #[error("malformed dyadic degree: {0}")]
    MalformedDyadic(String),
    #[error("no common multiple found with integral part <= {0}")]
    ScanCapExceeded(u64),
}

/// Structure constants `p_1..p_K` of a depth-capped `M_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MpSpec {
    p: Vec<u64>,
    /// `d_0 = 1, d_1, ..., d_K`.
    degrees: Vec<BigRational>,
}

/// Normal form `a_0^n * prod_k a_k^{eps[k-1]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MpElement {
    pub n: u64,
    pub eps: Vec<bool>,
}

impl MpElement {
    pub fn depth(&self) -> usize {
        self.eps.iter().rposition(|&e| e).map_or(0, |i| i + 1)
    }
}

impl fmt::Display for MpElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.n {
            0 => {}
            1 => parts.push("a0".to_string()),
            n => parts.push(format!("a0^{n}")),
        }
        for (i, &e) in self.eps.iter().enumerate() {
            if e {
                parts.push(format!("a{}", i + 1));
            }
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

/// A real number `m + sum_k digits[k-1] / 2^k` with binary digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicDegree {
    pub integer: BigInt,
    pub digits: Vec<u8>,
}

impl DyadicDegree {
    /// Splits a rational into integer part and binary fraction digits.
    /// Returns `None` when the denominator is not a power of two.
    pub fn from_rational(r: &BigRational) -> Option<DyadicDegree> {
        let integer = floor(r);
        let mut frac = r - BigRational::from_integer(integer.clone());
        let mut digits = Vec::new();
        let two = BigRational::from_integer(BigInt::from(2));
        while !frac.is_zero() {
            if digits.len() > 4096 {
                return None;
            }
            frac *= &two;
            if frac >= BigRational::one() {
                digits.push(1);
                frac -= BigRational::one();
            } else {
                digits.push(0);
            }
            if !frac.denom().is_one() && frac.denom().bits() > 4096 {
                return None;
            }
        }
        // a non-dyadic fraction never terminates; the length guard above
        // catches it
        Some(DyadicDegree { integer, digits })
    }

    pub fn value(&self) -> Result<BigRational, MpError> {
        let mut r = BigRational::from_integer(self.integer.clone());
        let mut scale = BigRational::one();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        for &d in &self.digits {
            scale *= &half;
            match d {
                0 => {}
                1 => r += &scale,
                other => {
                    return Err(MpError::MalformedDyadic(format!(
                        "digit {other} is not binary"
                    )))
                }
            }
        }
        Ok(r)
    }
}

impl MpSpec {
    /// Validates `p_1 in 2Z_{>0}` and computes `d_k = 1/2^k + sum_{i<=k} p_i / 2^{k-i+1}`.
    pub fn new(p: Vec<u64>) -> Result<Self, MpError> {
        match p.first() {
            None => {
                return Err(MpError::InvalidSpec(
                    "p must have at least one entry".into(),
                ))
            }
            Some(&p1) if p1 == 0 || p1 % 2 == 1 => {
                return Err(MpError::InvalidSpec(format!(
                    "p_1 = {p1} must be a positive even integer"
                )))
            }
            _ => {}
        }
        let mut degrees = vec![BigRational::one()];
        for k in 1..=p.len() {
            let mut d = BigRational::new(BigInt::one(), BigInt::one() << k);
            for i in 1..=k {
                d += BigRational::new(BigInt::from(p[i - 1]), BigInt::one() << (k - i + 1));
            }
            degrees.push(d);
        }
        Ok(MpSpec { p, degrees })
    }

    /// `p_k = 2^{k+1}` for `k = 1..=K`.
    pub fn pow2(depth_cap: usize) -> Result<Self, MpError> {
        if depth_cap == 0 || depth_cap > 62 {
            return Err(MpError::InvalidSpec("pow2 needs 1 <= K <= 62".into()));
        }
        MpSpec::new((1..=depth_cap).map(|k| 1u64 << (k + 1)).collect())
    }

    pub fn p(&self) -> &[u64] {
        &self.p
    }

    pub fn depth_cap(&self) -> usize {
        self.p.len()
    }

    /// Exact degree `d_k` of the generator `a_k`.
    pub fn degree(&self, k: usize) -> Result<DegreeKey, MpError> {
        self.degrees
            .get(k)
            .map(|d| DegreeKey::Rational(d.clone()))
            .ok_or(MpError::IndexOutOfRange {
                index: k,
                max: self.depth_cap(),
            })
    }

    pub fn unit(&self) -> MpElement {
        MpElement {
            n: 0,
            eps: vec![false; self.depth_cap()],
        }
    }

    pub fn generator(&self, k: usize) -> Result<MpElement, MpError> {
        if k > self.depth_cap() {
            return Err(MpError::IndexOutOfRange {
                index: k,
                max: self.depth_cap(),
            });
        }
        let mut u = self.unit();
        if k == 0 {
            u.n = 1;
        } else {
            u.eps[k - 1] = true;
        }
        Ok(u)
    }

    pub fn element_degree(&self, u: &MpElement) -> BigRational {
        let mut d = BigRational::from_integer(BigInt::from(u.n));
        for (k, &e) in u.eps.iter().enumerate() {
            if e {
                d += &self.degrees[k + 1];
            }
        }
        d
    }

    /// Reduces exponent counts `(n, c_1..c_K)` to normal form by carrying
    /// `a_k^2 -> a_0^{p_k} a_{k-1}` from the deepest generator down.
    fn reduce(&self, mut n: u64, mut counts: Vec<u64>) -> MpElement {
        for k in (1..=counts.len()).rev() {
            let pairs = counts[k - 1] / 2;
            counts[k - 1] %= 2;
            n += pairs * self.p[k - 1];
            if k == 1 {
                n += pairs;
            } else {
                counts[k - 2] += pairs;
            }
        }
        MpElement {
            n,
            eps: counts.into_iter().map(|c| c == 1).collect(),
        }
    }

    /// Normal form of a word over the generator indices `0..=K`.
    pub fn normal_form(&self, word: &[usize]) -> Result<MpElement, MpError> {
        let mut counts = vec![0u64; self.depth_cap()];
        let mut n = 0;
        for &g in word {
            match g {
                0 => n += 1,
                k if k <= self.depth_cap() => counts[k - 1] += 1,
                k => {
                    return Err(MpError::IndexOutOfRange {
                        index: k,
                        max: self.depth_cap(),
                    })
                }
            }
        }
        Ok(self.reduce(n, counts))
    }

    pub fn product(&self, u: &MpElement, v: &MpElement) -> MpElement {
        let counts = u
            .eps
            .iter()
            .zip(&v.eps)
            .map(|(&a, &b)| a as u64 + b as u64)
            .collect();
        self.reduce(u.n + v.n, counts)
    }

    /// The element of degree `r`, if `r` is a degree of this monoid.
    pub fn element_of_degree(&self, r: &BigRational) -> Option<MpElement> {
        if r.is_negative() {
            return None;
        }
        let mut rest = r.clone();
        let mut eps = vec![false; self.depth_cap()];
        for k in (1..=self.depth_cap()).rev() {
            let scaled = &rest * BigRational::from_integer(BigInt::one() << (k - 1));
            if !scaled.is_integer() {
                eps[k - 1] = true;
                rest -= &self.degrees[k];
                if rest.is_negative() {
                    return None;
                }
            }
        }
        if !rest.is_integer() {
            return None;
        }
        let n = rest.to_integer().to_u64()?;
        Some(MpElement { n, eps })
    }

    /// The `x` with `v = u x`, if any.
    pub fn left_quotient(&self, u: &MpElement, v: &MpElement) -> Option<MpElement> {
        let diff = self.element_degree(v) - self.element_degree(u);
        let x = self.element_of_degree(&diff)?;
        (self.product(u, &x) == *v).then_some(x)
    }

    pub fn left_divides(&self, u: &MpElement, v: &MpElement) -> bool {
        self.left_quotient(u, v).is_some()
    }

    /// Minimal common multiples of `J` with degree `<= cutoff`: for every
    /// 2-decimal part of depth at most `depth(J)` take the least integral
    /// part giving a common multiple, then keep the minimal candidates.
    pub fn mcm(&self, set: &[MpElement], cutoff: &BigRational) -> Result<Vec<MpElement>, MpError> {
        if set.is_empty() {
            return Err(MpError::EmptyIndexSet);
        }
        let depth = set.iter().map(MpElement::depth).max().unwrap_or(0);
        let cap = 64 * (1 + self.p.iter().sum::<u64>()) + set.iter().map(|u| u.n).sum::<u64>();
        let mut candidates = Vec::new();
        for mask in 0u64..(1u64 << depth) {
            let mut eps = vec![false; self.depth_cap()];
            for (k, e) in eps.iter_mut().enumerate().take(depth) {
                *e = mask >> k & 1 == 1;
            }
            let mut found = None;
            for n in 0..=cap {
                let cand = MpElement {
                    n,
                    eps: eps.clone(),
                };
                if set.iter().all(|u| self.left_divides(u, &cand)) {
                    found = Some(cand);
                    break;
                }
            }
            candidates.push(found.ok_or(MpError::ScanCapExceeded(cap))?);
        }
        let mut minimal: Vec<MpElement> = candidates
            .iter()
            .filter(|c| {
                !candidates
                    .iter()
                    .any(|d| d != *c && self.left_divides(d, c))
            })
            .filter(|c| self.element_degree(c) <= *cutoff)
            .cloned()
            .collect();
        minimal.sort_by_key(|u| self.element_degree(u));
        minimal.dedup();
        Ok(minimal)
    }

    /// The binary part `e` forced by a fractional part given as digits.
    fn eps_for_digits(&self, digits: &[u8]) -> Result<Vec<bool>, MpError> {
        if let Some(d) = digits.iter().find(|&&d| d > 1) {
            return Err(MpError::MalformedDyadic(format!("digit {d} is not binary")));
        }
        let depth = digits.iter().rposition(|&d| d == 1).map_or(0, |i| i + 1);
        if depth > self.depth_cap() {
            return Err(MpError::IndexOutOfRange {
                index: depth,
                max: self.depth_cap(),
            });
        }
        let mut rest = DyadicDegree {
            integer: BigInt::zero(),
            digits: digits.to_vec(),
        }
        .value()?;
        let mut eps = vec![false; self.depth_cap()];
        for k in (1..=depth).rev() {
            let scaled = &rest * BigRational::from_integer(BigInt::one() << (k - 1));
            if !scaled.is_integer() {
                eps[k - 1] = true;
                rest -= &self.degrees[k];
            }
        }
        Ok(eps)
    }

    /// `m(p, delta) = floor(sum e_k d_k)` for the binary part `e` forced by `delta`.
    pub fn min_integral_part(&self, digits: &[u8]) -> Result<BigInt, MpError> {
        let eps = self.eps_for_digits(digits)?;
        let total = eps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e)
            .fold(BigRational::zero(), |acc, (k, _)| {
                acc + &self.degrees[k + 1]
            });
        Ok(floor(&total))
    }

    /// Whether `m + sum delta_k / 2^k` is the degree of some element.
    pub fn degree_membership(&self, r: &DyadicDegree) -> Result<bool, MpError> {
        Ok(r.integer >= self.min_integral_part(&r.digits)?)
    }

    /// All normal forms of degree `<= cutoff`, sorted by degree.
    pub fn elements_up_to(&self, cutoff: &BigRational) -> Vec<MpElement> {
        fn walk(
            spec: &MpSpec,
            k: usize,
            eps: &mut Vec<bool>,
            used: BigRational,
            cutoff: &BigRational,
            out: &mut Vec<MpElement>,
        ) {
            if k > spec.depth_cap() {
                let room = floor(&(cutoff - &used));
                let max_n = room.to_u64().unwrap_or(0);
                for n in 0..=max_n {
                    out.push(MpElement {
                        n,
                        eps: eps.clone(),
                    });
                }
                return;
            }
            walk(spec, k + 1, eps, used.clone(), cutoff, out);
            let with = &used + &spec.degrees[k];
            if with <= *cutoff {
                eps[k - 1] = true;
                walk(spec, k + 1, eps, with, cutoff, out);
                eps[k - 1] = false;
            }
        }
        let mut out = Vec::new();
        if cutoff.is_negative() {
            return out;
        }
        let mut eps = vec![false; self.depth_cap()];
        walk(self, 1, &mut eps, BigRational::zero(), cutoff, &mut out);
        out.sort_by_cached_key(|u| self.element_degree(u));
        out
    }

    /// The presentation with generators `a0..aK` (degrees `d_k`), the square
    /// relations and all commutations.
    pub fn presentation(&self) -> Presentation {
        let k_max = self.depth_cap();
        let generators = (0..=k_max)
            .map(|k| Generator {
                name: format!("a{k}"),
                degree: self.degrees[k].clone(),
            })
            .collect();
        let mut relations = Vec::new();
        for k in 1..=k_max {
            let mut rhs = vec![0; self.p[k - 1] as usize];
            rhs.push(k - 1);
            relations.push(Relation {
                lhs: vec![k, k],
                rhs,
            });
        }
        for k in 0..=k_max {
            for l in k + 1..=k_max {
                relations.push(Relation {
                    lhs: vec![k, l],
                    rhs: vec![l, k],
                });
            }
        }
        Presentation::from_parts(generators, relations).expect("M_p relations are homogeneous")
    }

    /// Whether `r` is a degree of some product `prod_{k>=1} a_k^{n_k}`.
    pub fn is_delta_degree(&self, r: &BigRational) -> bool {
        fn search(spec: &MpSpec, k: usize, rest: &BigRational) -> bool {
            if rest.is_zero() {
                return true;
            }
            if k == 0 || rest.is_negative() {
                return false;
            }
            let d = &spec.degrees[k];
            let mut remaining = rest.clone();
            loop {
                if search(spec, k - 1, &remaining) {
                    return true;
                }
                remaining -= d;
                if remaining.is_negative() {
                    return false;
                }
            }
        }
        search(self, self.depth_cap(), r)
    }

    /// Shape of an element relative to the products `Delta_n = prod_{k>=1} a_k^{n_k}`.
    pub fn delta_shape(&self, u: &MpElement) -> DeltaShape {
        let d = self.element_degree(u);
        let is_delta = self.is_delta_degree(&d);
        let one = BigRational::one();
        let is_a0_delta = d >= one && self.is_delta_degree(&(d - one));
        DeltaShape {
            is_delta,
            is_a0_delta,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeltaShape {
    /// `u = Delta_n` for some `n`.
    pub is_delta: bool,
    /// `u = a_0 Delta_n` for some `n`.
    pub is_a0_delta: bool,
}
