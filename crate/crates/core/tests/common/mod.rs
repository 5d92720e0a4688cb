//! Independent oracles shared by the integration tests, plus the mp versus
//! rewrite comparison. The oracles do not call the code under test.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use skewgrowth::model::ElementRepr;
use skewgrowth::presentation::Presentation;
use skewgrowth::towers::{default_ground, enumerate_towers};
use skewgrowth::{
    DegreeKey, DivPoset, ElementId, ElementSet, MonoidDef, MonoidModel, MpSpec, Series,
};

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn shortlex(a: &[usize], b: &[usize]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Every word of degree at most `cutoff`, closed under all single
/// substring substitutions `R <-> S`, grouped into classes. Returns the
/// shortlex-least word of each class per degree, sorted shortlex.
pub fn word_closure(
    p: &Presentation,
    cutoff: &BigRational,
) -> BTreeMap<BigRational, Vec<Vec<usize>>> {
    let degs: Vec<BigRational> = p.generators().iter().map(|g| g.degree.clone()).collect();
    let mut by_degree: BTreeMap<BigRational, Vec<Vec<usize>>> = BTreeMap::new();
    let mut stack = vec![(Vec::<usize>::new(), BigRational::default())];
    while let Some((w, d)) = stack.pop() {
        for (g, dg) in degs.iter().enumerate() {
            let nd = &d + dg;
            if nd <= *cutoff {
                let mut nw = w.clone();
                nw.push(g);
                stack.push((nw, nd));
            }
        }
        by_degree.entry(d).or_default().push(w);
    }
    let rules: Vec<(&[usize], &[usize])> = p
        .relations()
        .iter()
        .flat_map(|r| {
            [
                (r.lhs.as_slice(), r.rhs.as_slice()),
                (r.rhs.as_slice(), r.lhs.as_slice()),
            ]
        })
        .collect();
    let mut out = BTreeMap::new();
    for (d, words) in by_degree {
        let index: HashMap<&Vec<usize>, usize> =
            words.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let mut parent: Vec<usize> = (0..words.len()).collect();
        for (i, w) in words.iter().enumerate() {
            for (from, to) in &rules {
                if from.len() > w.len() {
                    continue;
                }
                for pos in 0..=w.len() - from.len() {
                    if &w[pos..pos + from.len()] == *from {
                        let mut nw = w[..pos].to_vec();
                        nw.extend_from_slice(to);
                        nw.extend_from_slice(&w[pos + from.len()..]);
                        let j = index[&nw];
                        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                        parent[a] = b;
                    }
                }
            }
        }
        let mut best: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, w) in words.iter().enumerate() {
            let r = find(&mut parent, i);
            let e = best.entry(r).or_insert_with(|| w.clone());
            if shortlex(w, e).is_lt() {
                *e = w.clone();
            }
        }
        let mut canon: Vec<Vec<usize>> = best.into_values().collect();
        canon.sort_by(|a, b| shortlex(a, b));
        out.insert(d, canon);
    }
    out
}

/// Moebius function on `0..=n` by sieving (index 0 unused).
pub fn mobius(n: usize) -> Vec<i64> {
    let mut mu = vec![1i64; n + 1];
    let mut is_composite = vec![false; n + 1];
    for p in 2..=n {
        if is_composite[p] {
            continue;
        }
        for m in (p..=n).step_by(p) {
            if m > p {
                is_composite[m] = true;
            }
            mu[m] = -mu[m];
        }
        let sq = p * p;
        for m in (sq..=n).step_by(sq) {
            mu[m] = 0;
        }
    }
    mu
}

/// Series with integer-degree coefficients `coeff(k)` for `k = 0..=cutoff`.
pub fn integer_series(cutoff: i64, coeff: impl Fn(i64) -> i64) -> Series {
    Series::from_terms(
        DegreeKey::integer(cutoff),
        (0..=cutoff).map(|k| (DegreeKey::integer(k), coeff(k))),
    )
    .unwrap()
}

/// Expands `prod (1 + s_i t^{e_i})` times `1/(1-t)` (when `geometric`) or
/// times `(1-t)` (otherwise), truncated at `cutoff`, by naive term lists.
pub fn expand_rational_product(
    factors: &[(BigRational, i64)],
    geometric: bool,
    divide: bool,
    cutoff: &BigRational,
) -> BTreeMap<BigRational, BigInt> {
    // start from 1/(1-t) or (1-t)
    let mut terms: BTreeMap<BigRational, BigInt> = BTreeMap::new();
    if geometric {
        let mut k = BigRational::from_integer(0.into());
        while k <= *cutoff {
            terms.insert(k.clone(), BigInt::from(1));
            k += BigRational::from_integer(1.into());
        }
    } else {
        terms.insert(BigRational::from_integer(0.into()), BigInt::from(1));
        if BigRational::from_integer(1.into()) <= *cutoff {
            terms.insert(BigRational::from_integer(1.into()), BigInt::from(-1));
        }
    }
    for (e, s) in factors {
        let mut next: BTreeMap<BigRational, BigInt> = BTreeMap::new();
        if divide {
            // multiply by 1/(1 + s t^e) = sum_k (-s)^k t^{ke}
            let mut power = BigInt::from(1);
            let mut shift = BigRational::from_integer(0.into());
            while shift <= *cutoff {
                for (k, c) in &terms {
                    let key = k + &shift;
                    if key <= *cutoff {
                        *next.entry(key).or_default() += c * &power;
                    }
                }
                power *= -s;
                shift += e;
            }
        } else {
            for (k, c) in &terms {
                *next.entry(k.clone()).or_default() += c;
                let key = k + e;
                if key <= *cutoff {
                    *next.entry(key).or_default() += c * s;
                }
            }
        }
        next.retain(|_, c| *c != BigInt::from(0));
        terms = next;
    }
    terms
}

pub fn as_rational_map(s: &Series) -> BTreeMap<BigRational, BigInt> {
    s.terms()
        .iter()
        .map(|(k, c)| (k.as_rational().unwrap().clone(), c.clone()))
        .collect()
}

/// Compares the normal-form model of `spec` with the rewrite model of its
/// presentation at `cutoff`: elements, products, atoms, mcm of atom pairs,
/// towers, P and N.
pub fn cross_validate_mp(spec: &MpSpec, cutoff: &DegreeKey) -> Result<(), String> {
    let mp = MonoidModel::enumerate_up_to(&MonoidDef::Mp(spec.clone()), cutoff)
        .map_err(|e| e.to_string())?;
    let rw = MonoidModel::enumerate_up_to(&MonoidDef::Presented(spec.presentation()), cutoff)
        .map_err(|e| e.to_string())?;
    if mp.len() != rw.len() {
        return Err(format!(
            "element counts differ: {} vs {}",
            mp.len(),
            rw.len()
        ));
    }
    // map each normal form to the rewrite class of the word a0^n a1^e1 ...
    let mut map: Vec<ElementId> = Vec::with_capacity(mp.len());
    for u in mp.ids() {
        let ElementRepr::Normal(e) = mp.repr(u) else {
            return Err("not a normal form".into());
        };
        let mut word = vec![0; e.n as usize];
        word.extend(
            e.eps
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(k, _)| k + 1),
        );
        let v = rw
            .class_of_word(&word)
            .ok_or_else(|| format!("{e} missing in rewrite model"))?;
        if mp.degree(u) != rw.degree(v) {
            return Err(format!("degree of {e} differs"));
        }
        map.push(v);
    }
    let image: std::collections::BTreeSet<_> = map.iter().collect();
    if image.len() != map.len() {
        return Err("two normal forms share a rewrite class".into());
    }
    for u in mp.ids() {
        for v in mp.ids() {
            let a = mp.product(u, v).map(|w| map[w.index()]);
            let b = rw.product(map[u.index()], map[v.index()]);
            if a != b {
                return Err(format!(
                    "product of {} and {} differs",
                    mp.label(u),
                    mp.label(v)
                ));
            }
            if mp.left_divides(u, v) != rw.left_divides(map[u.index()], map[v.index()]) {
                return Err(format!(
                    "divisibility of {} and {} differs",
                    mp.label(u),
                    mp.label(v)
                ));
            }
        }
    }
    let translate = |s: &ElementSet| ElementSet::new(s.iter().map(|u| map[u.index()]));
    let atoms_mp = ElementSet::new(mp.atoms());
    if translate(&atoms_mp) != ElementSet::new(rw.atoms()) {
        return Err("atoms differ".into());
    }
    let (pm, pr) = (DivPoset::build(&mp), DivPoset::build(&rw));
    let atoms: Vec<ElementId> = atoms_mp.iter().collect();
    for (i, &a) in atoms.iter().enumerate() {
        for &b in &atoms[i + 1..] {
            let j = ElementSet::new([a, b]);
            let lhs = translate(&pm.mcm(&j).unwrap());
            let rhs = pr.mcm(&translate(&j)).unwrap();
            if lhs != rhs {
                return Err(format!(
                    "mcm of {} and {} differs",
                    mp.label(a),
                    mp.label(b)
                ));
            }
        }
    }
    let fm = enumerate_towers(&mp, &pm, &default_ground(&mp), cutoff).map_err(|e| e.to_string())?;
    let fr = enumerate_towers(&rw, &pr, &default_ground(&rw), cutoff).map_err(|e| e.to_string())?;
    let shape = |f: &skewgrowth::TowerForest, tr: &dyn Fn(&ElementSet) -> ElementSet| {
        let mut v: Vec<(Vec<ElementSet>, ElementSet, i32)> = f
            .towers()
            .map(|t| (t.stages().iter().map(tr).collect(), tr(t.top()), t.sign()))
            .collect();
        v.sort();
        v
    };
    if shape(&fm, &translate) != shape(&fr, &|s: &ElementSet| s.clone()) {
        return Err("tower forests differ".into());
    }
    if mp.growth_series() != rw.growth_series() {
        return Err("growth series differ".into());
    }
    if fm.skew_growth(&mp) != fr.skew_growth(&rw) {
        return Err("skew-growth series differ".into());
    }
    Ok(())
}
