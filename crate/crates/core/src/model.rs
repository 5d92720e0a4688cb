//! Element tables of monoids truncated at a degree cutoff.
//!
//! Three backends share one interface: presented monoids (classes of words
//! computed by rewrite closure), the multiplicative integers, and the
//! normal-form model of the `M_p` family.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::degree::{DegreeKey, KeyKind};
use crate::dirichlet::{additive_closure, Series};
use crate::mp::{MpElement, MpSpec};
use crate::presentation::{GenIndex, Presentation};

pub const DEFAULT_WORD_CAP: usize = 10_000_000;

/// What a monoid is, before any enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonoidDef {
    Presented(Presentation),
    /// `Z_{>0}` under multiplication with degree `log n`.
    Integers,
    Mp(MpSpec),
}

impl MonoidDef {
    pub fn key_kind(&self) -> KeyKind {
        match self {
            MonoidDef::Integers => KeyKind::MultInt,
            _ => KeyKind::Rational,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    RewritePresented,
    MultiplicativeInteger,
    MpNormalForm,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("degree {degree} needs {count} words, above the cap of {cap}")]
    CutoffTooLarge {
        degree: DegreeKey,
        count: usize,
        cap: usize,
    },
    #[error("no generator has degree within the cutoff")]
    EmptyAlphabet,
    #[error("invalid cutoff {cutoff}: {reason}")]
    InvalidCutoff { cutoff: DegreeKey, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementId(pub u32);

impl ElementId {
    pub const UNIT: ElementId = ElementId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ElementRepr {
    /// Shortlex-least word of the class.
    Word(Vec<GenIndex>),
    Integer(u64),
    Normal(MpElement),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub degree: DegreeKey,
    pub repr: ElementRepr,
}

/// Elements sorted by degree; each degree occupies a contiguous id range.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ElementTable {
    elements: Vec<Element>,
    levels: Vec<(DegreeKey, Range<u32>)>,
}

impl ElementTable {
    fn push_level(&mut self, degree: DegreeKey, reprs: impl IntoIterator<Item = ElementRepr>) {
        let start = self.elements.len() as u32;
        self.elements.extend(reprs.into_iter().map(|repr| Element {
            degree: degree.clone(),
            repr,
        }));
        let end = self.elements.len() as u32;
        if end > start {
            self.levels.push((degree, start..end));
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn get(&self, id: ElementId) -> &Element {
        &self.elements[id.index()]
    }

    pub fn ids(&self) -> impl Iterator<Item = ElementId> + '_ {
        (0..self.elements.len() as u32).map(ElementId)
    }

    /// Realized degrees with their element ids, ascending.
    pub fn levels(
        &self,
    ) -> impl Iterator<Item = (&DegreeKey, impl Iterator<Item = ElementId>)> + '_ {
        self.levels
            .iter()
            .map(|(d, r)| (d, r.clone().map(ElementId)))
    }

    pub fn level(&self, degree: &DegreeKey) -> impl Iterator<Item = ElementId> {
        let range = self
            .levels
            .binary_search_by(|(d, _)| d.cmp(degree))
            .map(|i| self.levels[i].1.clone())
            .unwrap_or(0..0);
        range.map(ElementId)
    }

    pub fn counts(&self) -> Vec<(DegreeKey, usize)> {
        self.levels
            .iter()
            .map(|(d, r)| (d.clone(), r.len()))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationOptions {
    /// Hard cap on the number of words examined at one degree.
    pub word_cap: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            word_cap: DEFAULT_WORD_CAP,
        }
    }
}

/// Result of solving `v = u x` for `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeftQuotient {
    Witness(ElementId),
    NoWitness,
    /// Two distinct witnesses, so left cancellation fails at `u`.
    CancellativityViolation {
        u: ElementId,
        x: ElementId,
        x_prime: ElementId,
    },
}

#[derive(Clone, Debug)]
enum Backend {
    Rewrite {
        presentation: Presentation,
        /// `left_mul[c * ngens + g]` is the class of `g * c`.
        left_mul: Vec<Option<ElementId>>,
    },
    Integers {
        nmax: u64,
    },
    Mp {
        spec: MpSpec,
        presentation: Presentation,
        index: HashMap<MpElement, ElementId>,
    },
}

/// An enumerated monoid: all elements of degree at most `cutoff`.
#[derive(Clone, Debug)]
pub struct MonoidModel {
    cutoff: DegreeKey,
    table: ElementTable,
    backend: Backend,
}

impl MonoidModel {
    pub fn enumerate_up_to(def: &MonoidDef, cutoff: &DegreeKey) -> Result<Self, ModelError> {
        Self::enumerate(def, cutoff, EnumerationOptions::default())
    }

    pub fn enumerate(
        def: &MonoidDef,
        cutoff: &DegreeKey,
        options: EnumerationOptions,
    ) -> Result<Self, ModelError> {
        let invalid = |reason: &str| ModelError::InvalidCutoff {
            cutoff: cutoff.clone(),
            reason: reason.to_string(),
        };
        if cutoff.kind() != def.key_kind() {
            return Err(invalid(&format!("expected a {} key", def.key_kind())));
        }
        if !cutoff.is_positive() {
            return Err(invalid("cutoff must be positive"));
        }
        match (def, cutoff) {
            (MonoidDef::Presented(p), DegreeKey::Rational(c)) => {
                rewrite_closure(p.clone(), c, options)
            }
            (MonoidDef::Integers, DegreeKey::MultInt(nmax)) => Ok(integers(*nmax)),
            (MonoidDef::Mp(spec), DegreeKey::Rational(c)) => Ok(mp_model(spec, c)),
            _ => unreachable!("key kinds were checked above"),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self.backend {
            Backend::Rewrite { .. } => ModelKind::RewritePresented,
            Backend::Integers { .. } => ModelKind::MultiplicativeInteger,
            Backend::Mp { .. } => ModelKind::MpNormalForm,
        }
    }

    pub fn cutoff(&self) -> &DegreeKey {
        &self.cutoff
    }

    pub fn key_kind(&self) -> KeyKind {
        self.cutoff.kind()
    }

    pub fn table(&self) -> &ElementTable {
        &self.table
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn degree(&self, u: ElementId) -> &DegreeKey {
        &self.table.get(u).degree
    }

    pub fn repr(&self, u: ElementId) -> &ElementRepr {
        &self.table.get(u).repr
    }

    pub fn ids(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.table.ids()
    }

    /// The presentation behind a presented or `M_p` model.
    pub fn presentation(&self) -> Option<&Presentation> {
        match &self.backend {
            Backend::Rewrite { presentation, .. } | Backend::Mp { presentation, .. } => {
                Some(presentation)
            }
            Backend::Integers { .. } => None,
        }
    }

    pub fn mp_spec(&self) -> Option<&MpSpec> {
        match &self.backend {
            Backend::Mp { spec, .. } => Some(spec),
            _ => None,
        }
    }

    /// Human-readable name: canonical word, integer, or normal form.
    pub fn label(&self, u: ElementId) -> String {
        match (self.repr(u), &self.backend) {
            (ElementRepr::Word(w), Backend::Rewrite { presentation, .. }) => {
                presentation.render_word(w)
            }
            (ElementRepr::Integer(n), _) => n.to_string(),
            (ElementRepr::Normal(e), _) => e.to_string(),
            (ElementRepr::Word(w), _) => format!("{w:?}"),
        }
    }

    /// Resolves a label (a word over the generators, or an integer).
    pub fn find(&self, label: &str) -> Option<ElementId> {
        match &self.backend {
            Backend::Rewrite { presentation, .. } => {
                let word = presentation.parse_word(label).ok()?;
                self.class_of_word(&word)
            }
            Backend::Integers { nmax } => {
                let n: u64 = label.trim().parse().ok()?;
                (1..=*nmax).contains(&n).then(|| ElementId((n - 1) as u32))
            }
            Backend::Mp {
                spec,
                presentation,
                index,
            } => {
                let word = presentation.parse_word(label).ok()?;
                let e = spec.normal_form(&word).ok()?;
                index.get(&e).copied()
            }
        }
    }

    /// Class of a word over the generators, if its degree is within the cutoff.
    pub fn class_of_word(&self, word: &[GenIndex]) -> Option<ElementId> {
        match &self.backend {
            Backend::Rewrite { presentation, .. } => {
                if word.iter().any(|&g| g >= presentation.generators().len()) {
                    return None;
                }
                let deg = DegreeKey::Rational(presentation.word_degree(word));
                if deg > self.cutoff {
                    return None;
                }
                word.iter()
                    .rev()
                    .try_fold(ElementId::UNIT, |acc, &g| self.left_mul(g, acc))
            }
            Backend::Mp { spec, index, .. } => index.get(&spec.normal_form(word).ok()?).copied(),
            Backend::Integers { .. } => None,
        }
    }

    fn left_mul(&self, g: GenIndex, c: ElementId) -> Option<ElementId> {
        match &self.backend {
            Backend::Rewrite {
                presentation,
                left_mul,
            } => left_mul[c.index() * presentation.generators().len() + g],
            _ => None,
        }
    }

    /// `u * v`, or `None` when its degree exceeds the cutoff.
    pub fn product(&self, u: ElementId, v: ElementId) -> Option<ElementId> {
        match (&self.backend, self.repr(u)) {
            (Backend::Rewrite { .. }, ElementRepr::Word(w)) => {
                w.iter().rev().try_fold(v, |acc, &g| self.left_mul(g, acc))
            }
            (Backend::Integers { nmax }, _) => {
                let n = (u.0 as u64 + 1).checked_mul(v.0 as u64 + 1)?;
                (n <= *nmax).then(|| ElementId((n - 1) as u32))
            }
            (Backend::Mp { spec, index, .. }, ElementRepr::Normal(a)) => {
                let ElementRepr::Normal(b) = self.repr(v) else {
                    return None;
                };
                index.get(&spec.product(a, b)).copied()
            }
            _ => None,
        }
    }

    /// Ids `x` (ascending) with `deg(u) + deg(x) <= cutoff`.
    pub fn room(&self, u: ElementId) -> impl Iterator<Item = ElementId> {
        let du = self.degree(u);
        let end = self
            .table
            .elements
            .partition_point(|x| du.add(&x.degree) <= self.cutoff);
        (0..end as u32).map(ElementId)
    }

    pub fn left_quotient(&self, u: ElementId, v: ElementId) -> LeftQuotient {
        let Some(diff) = self.degree(v).checked_sub(self.degree(u)) else {
            return LeftQuotient::NoWitness;
        };
        let mut witness = None;
        for x in self.table.level(&diff) {
            if self.product(u, x) == Some(v) {
                match witness {
                    None => witness = Some(x),
                    Some(first) => {
                        return LeftQuotient::CancellativityViolation {
                            u,
                            x: first,
                            x_prime: x,
                        }
                    }
                }
            }
        }
        witness.map_or(LeftQuotient::NoWitness, LeftQuotient::Witness)
    }

    pub fn left_divides(&self, u: ElementId, v: ElementId) -> bool {
        let Some(diff) = self.degree(v).checked_sub(self.degree(u)) else {
            return false;
        };
        self.table
            .level(&diff)
            .any(|x| self.product(u, x) == Some(v))
    }

    /// Non-unit elements that are not a product of two non-units.
    pub fn atoms(&self) -> Vec<ElementId> {
        let mut composite = vec![false; self.len()];
        for u in self.ids().skip(1) {
            for x in self.room(u).skip(1) {
                if let Some(v) = self.product(u, x) {
                    composite[v.index()] = true;
                }
            }
        }
        self.ids()
            .skip(1)
            .filter(|u| !composite[u.index()])
            .collect()
    }

    /// Least degree of a non-unit element.
    pub fn min_degree(&self) -> Option<&DegreeKey> {
        self.table.levels.get(1).map(|(d, _)| d)
    }

    /// `P = sum_u t^{deg u}` truncated at the cutoff.
    pub fn growth_series(&self) -> Series {
        Series::from_terms(
            self.cutoff.clone(),
            self.table
                .levels
                .iter()
                .map(|(d, r)| (d.clone(), BigInt::from(r.len()))),
        )
        .expect("table degrees share the cutoff kind")
    }
}

/// Degree-by-degree congruence closure.
///
/// Every word of degree `d` is `g w` with `w` of smaller degree, and `g w`
/// only depends on the class of `w`, so the words of degree `d` are covered
/// by the nodes `(g, c)`. A substitution inside `w` keeps the node fixed; one
/// that touches the first letter rewrites `R x` into `S x` for a relation
/// `R = S`, which merges the nodes `(R_0, [R_1.. x])` and `(S_0, [S_1.. x])`.
/// The union-find over nodes therefore yields exactly the classes that
/// exhaustive substitution on all words of degree `d` would produce.
fn rewrite_closure(
    presentation: Presentation,
    cutoff: &BigRational,
    options: EnumerationOptions,
) -> Result<MonoidModel, ModelError> {
    let ngens = presentation.generators().len();
    let gen_deg: Vec<DegreeKey> = presentation
        .generators()
        .iter()
        .map(|g| DegreeKey::Rational(g.degree.clone()))
        .collect();
    let cutoff_key = DegreeKey::Rational(cutoff.clone());
    let admissible: Vec<GenIndex> = (0..ngens).filter(|&g| gen_deg[g] <= cutoff_key).collect();
    if admissible.is_empty() {
        return Err(ModelError::EmptyAlphabet);
    }
    let relations: Vec<(&[GenIndex], &[GenIndex], DegreeKey)> = presentation
        .relations()
        .iter()
        .map(|r| {
            let d = DegreeKey::Rational(presentation.word_degree(&r.lhs));
            (r.lhs.as_slice(), r.rhs.as_slice(), d)
        })
        .filter(|(_, _, d)| *d <= cutoff_key)
        .collect();

    let mut table = ElementTable::default();
    table.push_level(
        DegreeKey::Rational(BigRational::default()),
        [ElementRepr::Word(vec![])],
    );
    let mut left_mul: Vec<Option<ElementId>> = vec![None; ngens];

    let degrees = additive_closure(admissible.iter().map(|&g| &gen_deg[g]), &cutoff_key);
    for d in degrees.into_iter().filter(DegreeKey::is_positive) {
        // node layout: one block per generator over the level below it
        let mut blocks: Vec<(GenIndex, u32, u32, usize)> = Vec::new();
        let mut count = 0usize;
        for &g in &admissible {
            let Some(rest) = d.checked_sub(&gen_deg[g]) else {
                continue;
            };
            let range: Vec<ElementId> = table.level(&rest).collect();
            if let (Some(first), Some(last)) = (range.first(), range.last()) {
                blocks.push((g, first.0, last.0, count));
                count += range.len();
            }
        }
        if count > options.word_cap {
            return Err(ModelError::CutoffTooLarge {
                degree: d,
                count,
                cap: options.word_cap,
            });
        }
        if count == 0 {
            continue;
        }
        let node = |g: GenIndex, c: ElementId| -> usize {
            let &(_, start, _, offset) = blocks
                .iter()
                .find(|(bg, s, e, _)| *bg == g && (*s..=*e).contains(&c.0))
                .expect("node lies in a block");
            offset + (c.0 - start) as usize
        };
        let lookup = |g: GenIndex, c: ElementId| left_mul[c.index() * ngens + g];
        let fold = |word: &[GenIndex], x: ElementId| {
            word.iter()
                .rev()
                .try_fold(x, |acc, &g| lookup(g, acc))
                .expect("proper suffixes stay below the current degree")
        };

        let mut uf = UnionFind::<usize>::new(count);
        for (lhs, rhs, rd) in &relations {
            let Some(rest) = d.checked_sub(rd) else {
                continue;
            };
            for x in table.level(&rest) {
                let a = node(lhs[0], fold(&lhs[1..], x));
                let b = node(rhs[0], fold(&rhs[1..], x));
                uf.union(a, b);
            }
        }

        // canonical word of each class: least g * canon(c) among its nodes
        let mut best: HashMap<usize, Vec<GenIndex>> = HashMap::new();
        for &(g, start, end, _) in &blocks {
            for c in start..=end {
                let c = ElementId(c);
                let root = uf.find(node(g, c));
                let ElementRepr::Word(tail) = &table.get(c).repr else {
                    unreachable!()
                };
                let mut word = Vec::with_capacity(tail.len() + 1);
                word.push(g);
                word.extend_from_slice(tail);
                match best.get_mut(&root) {
                    Some(w) if shortlex(&word, w).is_lt() => *w = word,
                    Some(_) => {}
                    None => {
                        best.insert(root, word);
                    }
                }
            }
        }
        let mut classes: Vec<(usize, Vec<GenIndex>)> = best.into_iter().collect();
        classes.sort_by(|a, b| shortlex(&a.1, &b.1));
        let base = table.len() as u32;
        let id_of_root: HashMap<usize, ElementId> = classes
            .iter()
            .enumerate()
            .map(|(i, (root, _))| (*root, ElementId(base + i as u32)))
            .collect();

        let mut assignments = Vec::with_capacity(count);
        for &(g, start, end, _) in &blocks {
            for c in start..=end {
                let root = uf.find(node(g, ElementId(c)));
                assignments.push((c as usize * ngens + g, id_of_root[&root]));
            }
        }
        table.push_level(d, classes.into_iter().map(|(_, w)| ElementRepr::Word(w)));
        left_mul.resize(table.len() * ngens, None);
        for (slot, id) in assignments {
            left_mul[slot] = Some(id);
        }
    }

    Ok(MonoidModel {
        cutoff: cutoff_key,
        table,
        backend: Backend::Rewrite {
            presentation,
            left_mul,
        },
    })
}

/// Shortlex order: length first, then lexicographic on generator indices.
pub fn shortlex(a: &[GenIndex], b: &[GenIndex]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

fn integers(nmax: u64) -> MonoidModel {
    let mut table = ElementTable::default();
    for n in 1..=nmax {
        table.push_level(DegreeKey::MultInt(n), [ElementRepr::Integer(n)]);
    }
    MonoidModel {
        cutoff: DegreeKey::MultInt(nmax),
        table,
        backend: Backend::Integers { nmax },
    }
}

fn mp_model(spec: &MpSpec, cutoff: &BigRational) -> MonoidModel {
    let mut table = ElementTable::default();
    let mut index = HashMap::new();
    for e in spec.elements_up_to(cutoff) {
        index.insert(e.clone(), ElementId(table.len() as u32));
        table.push_level(
            DegreeKey::Rational(spec.element_degree(&e)),
            [ElementRepr::Normal(e)],
        );
    }
    MonoidModel {
        cutoff: DegreeKey::Rational(cutoff.clone()),
        table,
        backend: Backend::Mp {
            spec: spec.clone(),
            presentation: spec.presentation(),
            index,
        },
    }
}
