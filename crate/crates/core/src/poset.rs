//! The left-divisibility order on an enumerated model, with the
//! operators `cm`, `min` and `mcm`.

use std::fmt;

use thiserror::Error;

use crate::degree::DegreeKey;
use crate::model::{ElementId, MonoidModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("common multiples of an empty index set are not computed")]
    EmptyIndexSet,
}

/// A sorted, duplicate-free set of element ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet(Vec<ElementId>);

impl ElementSet {
    pub fn new(ids: impl IntoIterator<Item = ElementId>) -> Self {
        let mut v: Vec<ElementId> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        ElementSet(v)
    }

    fn from_sorted(v: Vec<ElementId>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        ElementSet(v)
    }

    pub fn as_slice(&self) -> &[ElementId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, u: ElementId) -> bool {
        self.0.binary_search(&u).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.0.iter().copied()
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        ElementSet::from_sorted(intersect(&self.0, &other.0))
    }

    pub fn filter(&self, mut keep: impl FnMut(ElementId) -> bool) -> ElementSet {
        ElementSet(self.0.iter().copied().filter(|&u| keep(u)).collect())
    }
}

impl FromIterator<ElementId> for ElementSet {
    fn from_iter<T: IntoIterator<Item = ElementId>>(iter: T) -> Self {
        ElementSet::new(iter)
    }
}

impl<'a> IntoIterator for &'a ElementSet {
    type Item = ElementId;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, ElementId>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|u| u.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn intersect(a: &[ElementId], b: &[ElementId]) -> Vec<ElementId> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Divisors and multiples of every element within the cutoff, filled in by
/// one pass over all products `u * x` that stay in range.
#[derive(Clone, Debug)]
pub struct DivPoset {
    divisors: Vec<Vec<ElementId>>,
    multiples: Vec<Vec<ElementId>>,
    degrees: Vec<DegreeKey>,
}

impl DivPoset {
    pub fn build(model: &MonoidModel) -> Self {
        let n = model.len();
        let mut divisors = vec![Vec::new(); n];
        let mut multiples = vec![Vec::new(); n];
        for u in model.ids() {
            for x in model.room(u) {
                if let Some(v) = model.product(u, x) {
                    divisors[v.index()].push(u);
                    multiples[u.index()].push(v);
                }
            }
        }
        for list in divisors.iter_mut().chain(multiples.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        DivPoset {
            divisors,
            multiples,
            degrees: model.ids().map(|u| model.degree(u).clone()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn degree(&self, u: ElementId) -> &DegreeKey {
        &self.degrees[u.index()]
    }

    pub fn divides(&self, u: ElementId, v: ElementId) -> bool {
        self.divisors[v.index()].binary_search(&u).is_ok()
    }

    pub fn divisors(&self, v: ElementId) -> &[ElementId] {
        &self.divisors[v.index()]
    }

    pub fn multiples(&self, u: ElementId) -> &[ElementId] {
        &self.multiples[u.index()]
    }

    /// Common right multiples of `J` within the cutoff.
    pub fn cm(&self, set: &ElementSet) -> Result<ElementSet, PosetError> {
        let mut it = set.iter();
        let first = it.next().ok_or(PosetError::EmptyIndexSet)?;
        let mut acc = self.multiples(first).to_vec();
        for u in it {
            if acc.is_empty() {
                break;
            }
            acc = intersect(&acc, self.multiples(u));
        }
        Ok(ElementSet::from_sorted(acc))
    }

    /// Members of `S` with no strict divisor in `S`.
    pub fn min_set(&self, set: &ElementSet) -> ElementSet {
        set.filter(|u| self.divisors(u).iter().all(|&v| v == u || !set.contains(v)))
    }

    pub fn mcm(&self, set: &ElementSet) -> Result<ElementSet, PosetError> {
        Ok(self.min_set(&self.cm(set)?))
    }

    /// Elements `v > u` with nothing strictly between.
    pub fn upper_covers(&self, u: ElementId) -> Vec<ElementId> {
        let above: Vec<ElementId> = self
            .multiples(u)
            .iter()
            .copied()
            .filter(|&v| v != u)
            .collect();
        above
            .iter()
            .copied()
            .filter(|&v| {
                !self
                    .divisors(v)
                    .iter()
                    .any(|&w| w != u && w != v && self.divides(u, w))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MonoidDef;
    use crate::presentation::{braid3, example3};

    fn set(m: &MonoidModel, labels: &[&str]) -> ElementSet {
        labels.iter().map(|l| m.find(l).unwrap()).collect()
    }

    #[test]
    fn example3_operators() {
        let m =
            MonoidModel::enumerate_up_to(&MonoidDef::Presented(example3()), &DegreeKey::integer(3))
                .unwrap();
        let p = DivPoset::build(&m);
        let ab = set(&m, &["a", "b"]);
        assert_eq!(
            p.cm(&ab).unwrap(),
            set(&m, &["a a", "a b", "a a a", "a a b"])
        );
        assert_eq!(p.mcm(&ab).unwrap(), set(&m, &["a a", "a b"]));
        assert_eq!(p.cm(&ElementSet::default()), Err(PosetError::EmptyIndexSet));
        assert!(p.min_set(&ElementSet::default()).is_empty());
        let a = m.find("a").unwrap();
        assert_eq!(p.upper_covers(a), set(&m, &["a a", "a b"]).as_slice());
    }

    #[test]
    fn braid_lcm() {
        let m =
            MonoidModel::enumerate_up_to(&MonoidDef::Presented(braid3()), &DegreeKey::integer(4))
                .unwrap();
        let p = DivPoset::build(&m);
        assert_eq!(p.mcm(&set(&m, &["a", "b"])).unwrap(), set(&m, &["a b a"]));
    }

    #[test]
    fn integer_divisibility() {
        let m =
            MonoidModel::enumerate_up_to(&MonoidDef::Integers, &DegreeKey::MultInt(30)).unwrap();
        let p = DivPoset::build(&m);
        let s = set(&m, &["2", "3"]);
        assert_eq!(p.cm(&s).unwrap(), set(&m, &["6", "12", "18", "24", "30"]));
        assert_eq!(p.mcm(&s).unwrap(), set(&m, &["6"]));
        assert_eq!(
            p.min_set(&set(&m, &["6", "12", "18", "24", "30"])),
            set(&m, &["6"])
        );
    }
}
