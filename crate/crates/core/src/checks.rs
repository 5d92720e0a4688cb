//! Verification suites: the inversion formula `P * N = 1`, the counting
//! recursion behind it, a cancellativity probe, and the reduction to the
//! lcm formula when every mcm is a singleton.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::degree::DegreeKey;
use crate::dirichlet::{Series, SeriesError};
use crate::model::{ElementId, MonoidModel};
use crate::poset::{DivPoset, ElementSet};
use crate::towers::{default_ground, enumerate_towers, TowerError, TowerForest};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::NotApplicable => "not-applicable",
        }
    }
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub status: CheckStatus,
    pub max_degree_verified: DegreeKey,
    pub counterexample: Option<Value>,
    pub notes: Vec<String>,
}

impl CheckReport {
    fn pass(name: &str, cutoff: &DegreeKey) -> Self {
        CheckReport {
            name: name.to_string(),
            status: CheckStatus::Pass,
            max_degree_verified: cutoff.clone(),
            counterexample: None,
            notes: Vec::new(),
        }
    }

    fn fail(name: &str, verified: DegreeKey, counterexample: Value) -> Self {
        CheckReport {
            name: name.to_string(),
            status: CheckStatus::Fail,
            max_degree_verified: verified,
            counterexample: Some(counterexample),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == CheckStatus::Fail
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "name": self.name,
            "status": self.status.as_str(),
            "max_degree_verified": self.max_degree_verified.to_json(),
        });
        if let Some(c) = &self.counterexample {
            v["counterexample"] = c.clone();
        }
        if !self.notes.is_empty() {
            v["notes"] = json!(self.notes);
        }
        v
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} (verified up to {})",
            self.name, self.status, self.max_degree_verified
        )?;
        if let Some(c) = &self.counterexample {
            write!(f, " counterexample {c}")?;
        }
        for n in &self.notes {
            write!(f, "\n  note: {n}")?;
        }
        Ok(())
    }
}

/// Walks the keys of a comparison in order and returns the first bad one
/// together with the largest key that was fine before it.
fn first_failure<'a>(
    keys: impl IntoIterator<Item = &'a DegreeKey>,
    zero: &DegreeKey,
    mut bad: impl FnMut(&DegreeKey) -> bool,
) -> Option<(DegreeKey, DegreeKey)> {
    let mut verified = zero.clone();
    for k in keys {
        if bad(k) {
            return Some((k.clone(), verified));
        }
        verified = k.clone();
    }
    None
}

/// `P * N_tower = 1` and `N_tower = P^{-1}`, with `N_tower` over the atoms.
pub fn check_inversion(model: &MonoidModel, poset: &DivPoset) -> Result<CheckReport, CheckError> {
    const NAME: &str = "inversion";
    let cutoff = model.cutoff();
    let p = model.growth_series();
    let forest = enumerate_towers(model, poset, &default_ground(model), cutoff)?;
    let n = forest.skew_growth(model);
    let oracle = p.invert()?;
    let prod = p.product(&n)?;
    let zero = DegreeKey::zero(model.key_kind());

    let keys: BTreeSet<&DegreeKey> = prod
        .terms()
        .keys()
        .chain(n.terms().keys())
        .chain(oracle.terms().keys())
        .chain(std::iter::once(&zero))
        .collect();
    let expected_prod = |k: &DegreeKey| {
        if k.is_zero() {
            BigInt::one()
        } else {
            BigInt::zero()
        }
    };
    let failure = first_failure(keys, &zero, |k| {
        prod.coeff(k) != expected_prod(k) || n.coeff(k) != oracle.coeff(k)
    });
    let mut report = match failure {
        None => CheckReport::pass(NAME, cutoff),
        Some((k, verified)) => CheckReport::fail(
            NAME,
            verified,
            json!({
                "degree": k.to_json(),
                "product_coefficient": prod.coeff(&k).to_string(),
                "tower_coefficient": n.coeff(&k).to_string(),
                "oracle_coefficient": oracle.coeff(&k).to_string(),
            }),
        ),
    };
    if find_cancellation_violation(model).is_some() {
        report.notes.push(
            "the monoid is not cancellative up to the cutoff, so the inversion formula need not hold"
                .into(),
        );
    }
    Ok(report)
}

/// Which side a cancellation failure happens on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CancellationForm {
    /// `a u = a v`
    Left,
    /// `u b = v b`
    Right,
}

/// Distinct `u, v` with `factor * u = factor * v` (left form) or
/// `u * factor = v * factor` (right form).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CancellationWitness {
    pub form: CancellationForm,
    pub factor: ElementId,
    pub u: ElementId,
    pub v: ElementId,
    pub product: ElementId,
}

/// Violation of least product degree, preferring the left form on ties.
pub fn find_cancellation_violation(model: &MonoidModel) -> Option<CancellationWitness> {
    let mut best: Option<(
        DegreeKey,
        CancellationForm,
        ElementId,
        ElementId,
        ElementId,
        ElementId,
    )> = None;
    for form in [CancellationForm::Left, CancellationForm::Right] {
        for f in model.ids() {
            let mut seen: HashMap<ElementId, ElementId> = HashMap::new();
            for u in model.room(f) {
                let prod = match form {
                    CancellationForm::Left => model.product(f, u),
                    CancellationForm::Right => model.product(u, f),
                };
                let Some(prod) = prod else { continue };
                if let Some(&prev) = seen.get(&prod) {
                    let cand = (model.degree(prod).clone(), form, f, prev, u, prod);
                    if best.as_ref().is_none_or(|b| cand < *b) {
                        best = Some(cand);
                    }
                } else {
                    seen.insert(prod, u);
                }
            }
        }
    }
    best.map(|(_, form, factor, u, v, product)| CancellationWitness {
        form,
        factor,
        u,
        v,
        product,
    })
}

/// Searches all products within the cutoff for `a u = a v` or `u b = v b`
/// with `u != v`.
pub fn check_cancellative(model: &MonoidModel) -> CheckReport {
    const NAME: &str = "cancellativity";
    match find_cancellation_violation(model) {
        None => {
            let mut r = CheckReport::pass(NAME, model.cutoff());
            r.notes.push(
                "no violation among elements up to the cutoff; evidence only, not a proof".into(),
            );
            r
        }
        Some(w) => {
            let degree = model.degree(w.product).clone();
            let verified = model
                .table()
                .levels()
                .map(|(d, _)| d)
                .filter(|d| **d < degree)
                .last()
                .cloned()
                .unwrap_or_else(|| DegreeKey::zero(model.key_kind()));
            CheckReport::fail(
                NAME,
                verified,
                json!({
                    "form": match w.form {
                        CancellationForm::Left => "left",
                        CancellationForm::Right => "right",
                    },
                    "factor": model.label(w.factor),
                    "u": model.label(w.u),
                    "v": model.label(w.v),
                    "product": model.label(w.product),
                    "degree": degree.to_json(),
                }),
            )
        }
    }
}

/// When every mcm of a set of atoms is empty or a singleton, the tower sum
/// collapses to `sum_J (-1)^{#J} t^{deg lcm(J)}`; this compares the two.
pub fn check_lcm_reduction(
    model: &MonoidModel,
    poset: &DivPoset,
) -> Result<CheckReport, CheckError> {
    const NAME: &str = "lcm-reduction";
    let cutoff = model.cutoff();
    let atoms = default_ground(model);
    let Some(d_min) = model.min_degree().cloned() else {
        return Ok(CheckReport::pass(NAME, cutoff));
    };
    let candidates: Vec<ElementId> = atoms
        .iter()
        .filter(|&a| model.degree(a).add(&d_min) <= *cutoff)
        .collect();

    let mut direct = Series::one(cutoff.clone());
    for a in &atoms {
        direct.add_term(model.degree(a).clone(), -BigInt::one());
    }
    let mut lcms: Vec<(usize, ElementSet, ElementSet)> = Vec::new();
    fn walk(
        poset: &DivPoset,
        candidates: &[ElementId],
        from: usize,
        chosen: &mut Vec<ElementId>,
        cm: ElementSet,
        out: &mut Vec<(usize, ElementSet, ElementSet)>,
    ) {
        if chosen.len() >= 2 {
            out.push((
                chosen.len(),
                ElementSet::new(chosen.iter().copied()),
                poset.min_set(&cm),
            ));
        }
        for k in from..candidates.len() {
            let next = cm.intersection(&ElementSet::new(
                poset.multiples(candidates[k]).iter().copied(),
            ));
            if !next.is_empty() {
                chosen.push(candidates[k]);
                walk(poset, candidates, k + 1, chosen, next, out);
                chosen.pop();
            }
        }
    }
    for (k, &a) in candidates.iter().enumerate() {
        let cm = ElementSet::new(poset.multiples(a).iter().copied());
        walk(poset, &candidates, k + 1, &mut vec![a], cm, &mut lcms);
    }
    for (size, set, mcm) in &lcms {
        if mcm.len() > 1 {
            let labels = |s: &ElementSet| s.iter().map(|u| model.label(u)).collect::<Vec<_>>();
            let mut r = CheckReport {
                name: NAME.into(),
                status: CheckStatus::NotApplicable,
                max_degree_verified: DegreeKey::zero(model.key_kind()),
                counterexample: None,
                notes: Vec::new(),
            };
            r.notes.push(format!(
                "mcm({:?}) = {:?} has more than one element",
                labels(set),
                labels(mcm)
            ));
            return Ok(r);
        }
        let delta = mcm.as_slice()[0];
        let sign = if size % 2 == 0 {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        direct.add_term(model.degree(delta).clone(), sign);
    }

    let towers = enumerate_towers(model, poset, &atoms, cutoff)?.skew_growth(model);
    let zero = DegreeKey::zero(model.key_kind());
    let keys: BTreeSet<&DegreeKey> = towers.terms().keys().chain(direct.terms().keys()).collect();
    Ok(
        match first_failure(keys, &zero, |k| towers.coeff(k) != direct.coeff(k)) {
            None => CheckReport::pass(NAME, cutoff),
            Some((k, verified)) => CheckReport::fail(
                NAME,
                verified,
                json!({
                    "degree": k.to_json(),
                    "tower_coefficient": towers.coeff(&k).to_string(),
                    "lcm_coefficient": direct.coeff(&k).to_string(),
                }),
            ),
        },
    )
}

/// `m_d + sum_T sign(T) sum_{D in |T|} m_{d - deg D} = 0` for all `d > 0`,
/// evaluated from element counts and the forest without series arithmetic.
pub fn check_recursion(model: &MonoidModel, poset: &DivPoset) -> Result<CheckReport, CheckError> {
    let forest = enumerate_towers(model, poset, &default_ground(model), model.cutoff())?;
    Ok(check_recursion_with(model, &forest))
}

pub fn check_recursion_with(model: &MonoidModel, forest: &TowerForest) -> CheckReport {
    const NAME: &str = "recursion";
    let cutoff = forest.cutoff();
    let counts: Vec<(DegreeKey, BigInt)> = model
        .table()
        .counts()
        .into_iter()
        .filter(|(d, _)| d <= cutoff)
        .map(|(d, c)| (d, BigInt::from(c)))
        .collect();
    let mut residual: BTreeMap<DegreeKey, BigInt> = counts.iter().cloned().collect();
    for t in forest.towers() {
        let sign = BigInt::from(t.sign());
        for delta in t.top() {
            let dd = model.degree(delta);
            for (e, m) in &counts {
                let d = dd.add(e);
                if d > *cutoff {
                    break;
                }
                *residual.entry(d).or_default() += &sign * m;
            }
        }
    }
    let zero = DegreeKey::zero(model.key_kind());
    let keys: Vec<&DegreeKey> = residual.keys().filter(|k| k.is_positive()).collect();
    match first_failure(keys, &zero, |k| !residual[k].is_zero()) {
        None => CheckReport::pass(NAME, cutoff),
        Some((k, verified)) => CheckReport::fail(
            NAME,
            verified,
            json!({ "degree": k.to_json(), "residual": residual[&k].to_string() }),
        ),
    }
}

/// For `M_p` models: whether each element of `mcm(J_k)` in the forest has the
/// form `a_0 Delta` when `a_0` is in `J_k` and `Delta` otherwise. Departures
/// are listed rather than treated as errors.
pub fn check_mp_shapes(model: &MonoidModel, forest: &TowerForest) -> CheckReport {
    const NAME: &str = "mp-shape";
    let Some(spec) = model.mp_spec() else {
        let mut r = CheckReport::pass(NAME, forest.cutoff());
        r.status = CheckStatus::NotApplicable;
        return r;
    };
    let a0 = model.find("a0");
    let mut findings = Vec::new();
    for t in forest.towers() {
        for (k, (stage, top)) in t.stages().iter().zip(&t.tops()[1..]).enumerate() {
            let with_a0 = a0.is_some_and(|a| stage.contains(a));
            for u in top {
                let crate::model::ElementRepr::Normal(e) = model.repr(u) else {
                    continue;
                };
                let shape = spec.delta_shape(e);
                let ok = if with_a0 {
                    shape.is_a0_delta
                } else {
                    shape.is_delta
                };
                if !ok {
                    findings.push(json!({
                        "stage": k + 1,
                        "J": stage.iter().map(|v| model.label(v)).collect::<Vec<_>>(),
                        "element": model.label(u),
                        "expected": if with_a0 { "a0*Delta" } else { "Delta" },
                        "is_delta": shape.is_delta,
                        "is_a0_delta": shape.is_a0_delta,
                    }));
                }
            }
        }
    }
    if findings.is_empty() {
        CheckReport::pass(NAME, forest.cutoff())
    } else {
        CheckReport::fail(
            NAME,
            DegreeKey::zero(model.key_kind()),
            json!({ "violations": findings }),
        )
    }
}
