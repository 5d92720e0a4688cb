//! Towers of minimal common multiples and the skew-growth series.
//!
//! A tower over a ground set `I_0` is a chain of stages `J_1, ..., J_n` with
//! `J_k` a subset of `I_{k-1}` of size at least two and `I_k = mcm(J_k)`
//! nonempty. Adding one stage is an edge, which makes the towers over a fixed
//! ground a rooted tree.

use std::collections::VecDeque;
use std::fmt::Write as _;

use num_bigint::BigInt;
use serde_json::{json, Value};
use thiserror::Error;

use crate::degree::DegreeKey;
use crate::dirichlet::Series;
use crate::model::{ElementId, MonoidModel};
use crate::poset::{DivPoset, ElementSet, PosetError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("invalid ground set: {0}")]
    InvalidGround(String),
    #[error("cutoff {requested} exceeds the enumerated cutoff {enumerated}")]
    CutoffBeyondModel {
        requested: DegreeKey,
        enumerated: DegreeKey,
    },
    #[error(transparent)]
    Poset(#[from] PosetError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tower {
    stages: Vec<ElementSet>,
    /// `tops[0]` is the ground, `tops[k] = mcm(J_k)` cut at the cutoff.
    tops: Vec<ElementSet>,
}

impl Tower {
    fn root(ground: ElementSet) -> Self {
        Tower {
            stages: Vec::new(),
            tops: vec![ground],
        }
    }

    pub fn ground(&self) -> &ElementSet {
        &self.tops[0]
    }

    pub fn stages(&self) -> &[ElementSet] {
        &self.stages
    }

    pub fn tops(&self) -> &[ElementSet] {
        &self.tops
    }

    pub fn height(&self) -> usize {
        self.stages.len()
    }

    pub fn top(&self) -> &ElementSet {
        self.tops.last().expect("a tower always has its ground")
    }

    /// `(-1)^{#J_1 + ... + #J_n - n + 1}`.
    pub fn sign(&self) -> i32 {
        let exponent: usize = self.stages.iter().map(|j| j.len() - 1).sum::<usize>() + 1;
        if exponent.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Least degree over the top set.
    pub fn degree<'m>(&self, model: &'m MonoidModel) -> Option<&'m DegreeKey> {
        self.top().iter().map(|u| model.degree(u)).min()
    }
}

pub fn tower_sign(tower: &Tower) -> i32 {
    tower.sign()
}

pub fn tower_top(tower: &Tower) -> &ElementSet {
    tower.top()
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    tower: Tower,
    parent: Option<usize>,
    children: Vec<usize>,
}

/// All towers over one ground whose top degree is within the cutoff, stored
/// breadth-first with the root at index 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerForest {
    cutoff: DegreeKey,
    nodes: Vec<Node>,
}

impl TowerForest {
    pub fn cutoff(&self) -> &DegreeKey {
        &self.cutoff
    }

    pub fn ground(&self) -> &ElementSet {
        self.nodes[0].tower.ground()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn tower(&self, i: usize) -> &Tower {
        &self.nodes[i].tower
    }

    pub fn towers(&self) -> impl Iterator<Item = &Tower> {
        self.nodes.iter().map(|n| &n.tower)
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.nodes[i].parent
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.nodes[i].children
    }

    pub fn max_height(&self) -> usize {
        self.towers().map(Tower::height).max().unwrap_or(0)
    }

    /// `1 + sum_T sign(T) sum_{D in |T|} t^{deg D}`.
    pub fn skew_growth(&self, model: &MonoidModel) -> Series {
        let mut n = Series::one(self.cutoff.clone());
        for t in self.towers() {
            let sign = BigInt::from(t.sign());
            for u in t.top() {
                let d = model.degree(u);
                if *d <= self.cutoff {
                    n.add_term(d.clone(), sign.clone());
                }
            }
        }
        n
    }

    pub fn to_json(&self, model: &MonoidModel) -> Value {
        let labels = |s: &ElementSet| -> Vec<String> { s.iter().map(|u| model.label(u)).collect() };
        let towers: Vec<Value> = self
            .nodes
            .iter()
            .map(|n| {
                let t = &n.tower;
                json!({
                    "stages": t.stages.iter().map(labels).collect::<Vec<_>>(),
                    "top": labels(t.top()),
                    "top_degrees": t.top().iter().map(|u| model.degree(u).to_json()).collect::<Vec<_>>(),
                    "sign": t.sign(),
                    "height": t.height(),
                    "parent": n.parent,
                })
            })
            .collect();
        json!({ "ground": labels(self.ground()), "towers": towers })
    }

    pub fn to_dot(&self, model: &MonoidModel) -> String {
        let mut out = String::from("digraph towers {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let top: Vec<String> = n.tower.top().iter().map(|u| model.label(u)).collect();
            let _ = writeln!(
                out,
                "  t{i} [label=\"h={} sign={:+} top={{{}}}\"];",
                n.tower.height(),
                n.tower.sign(),
                top.join(", ").replace('"', "\\\"")
            );
        }
        for (i, n) in self.nodes.iter().enumerate() {
            for c in &n.children {
                let _ = writeln!(out, "  t{i} -> t{c};");
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForestFormat {
    Dot,
    Json,
}

pub fn export_forest(forest: &TowerForest, model: &MonoidModel, format: ForestFormat) -> String {
    match format {
        ForestFormat::Dot => forest.to_dot(model),
        ForestFormat::Json => {
            serde_json::to_string_pretty(&forest.to_json(model)).expect("json values serialize")
        }
    }
}

/// The atoms of the model as a ground set.
pub fn default_ground(model: &MonoidModel) -> ElementSet {
    ElementSet::new(model.atoms())
}

fn validate_ground(
    model: &MonoidModel,
    poset: &DivPoset,
    ground: &ElementSet,
    cutoff: &DegreeKey,
) -> Result<(), TowerError> {
    if ground.is_empty() {
        return Err(TowerError::InvalidGround("the ground set is empty".into()));
    }
    if let Some(u) = ground.iter().find(|u| u.index() >= model.len()) {
        return Err(TowerError::InvalidGround(format!(
            "{u} is not an enumerated element"
        )));
    }
    if ground.contains(ElementId::UNIT) {
        return Err(TowerError::InvalidGround(
            "the unit cannot be a ground element".into(),
        ));
    }
    if let Some(u) = ground.iter().find(|&u| model.degree(u) > cutoff) {
        return Err(TowerError::InvalidGround(format!(
            "{} lies above the cutoff",
            model.label(u)
        )));
    }
    let minimal = poset.min_set(ground);
    if let Some(u) = ground.iter().find(|&u| !minimal.contains(u)) {
        return Err(TowerError::InvalidGround(format!(
            "{} is divisible by another ground element",
            model.label(u)
        )));
    }
    Ok(())
}

/// Breadth-first enumeration of the towers over `ground` with top degree at
/// most `cutoff`.
///
/// A next stage only draws from top elements `j` with
/// `deg(j) + d_min <= cutoff`: any member of `mcm(J)` for `#J >= 2` is a
/// proper multiple of each `j` in `J`, so larger `j` cannot contribute.
pub fn enumerate_towers(
    model: &MonoidModel,
    poset: &DivPoset,
    ground: &ElementSet,
    cutoff: &DegreeKey,
) -> Result<TowerForest, TowerError> {
    if cutoff > model.cutoff() || cutoff.kind() != model.key_kind() {
        return Err(TowerError::CutoffBeyondModel {
            requested: cutoff.clone(),
            enumerated: model.cutoff().clone(),
        });
    }
    validate_ground(model, poset, ground, cutoff)?;
    let d_min = model
        .min_degree()
        .expect("a valid ground has non-unit elements")
        .clone();

    let mut nodes = vec![Node {
        tower: Tower::root(ground.clone()),
        parent: None,
        children: Vec::new(),
    }];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let candidates: Vec<ElementId> = nodes[i]
            .tower
            .top()
            .iter()
            .filter(|&j| model.degree(j).add(&d_min) <= *cutoff)
            .collect();
        let mut found = Vec::new();
        let mut chosen = Vec::new();
        for (k, &j) in candidates.iter().enumerate() {
            let cm = ElementSet::new(
                poset
                    .multiples(j)
                    .iter()
                    .copied()
                    .filter(|&v| model.degree(v) <= cutoff),
            );
            chosen.push(j);
            extend_stage(poset, &candidates, k + 1, &mut chosen, cm, &mut found);
            chosen.pop();
        }
        found.sort();
        for (stage, top) in found {
            let mut tower = nodes[i].tower.clone();
            tower.stages.push(stage);
            tower.tops.push(top);
            let id = nodes.len();
            nodes.push(Node {
                tower,
                parent: Some(i),
                children: Vec::new(),
            });
            nodes[i].children.push(id);
            queue.push_back(id);
        }
    }
    Ok(TowerForest {
        cutoff: cutoff.clone(),
        nodes,
    })
}

/// Depth-first walk over subsets (in increasing index order) carrying the
/// running intersection of multiples; an empty intersection prunes every
/// superset.
fn extend_stage(
    poset: &DivPoset,
    candidates: &[ElementId],
    from: usize,
    chosen: &mut Vec<ElementId>,
    cm: ElementSet,
    found: &mut Vec<(ElementSet, ElementSet)>,
) {
    if chosen.len() >= 2 {
        found.push((ElementSet::new(chosen.iter().copied()), poset.min_set(&cm)));
    }
    for k in from..candidates.len() {
        let j = candidates[k];
        let next = cm.intersection(&ElementSet::new(poset.multiples(j).iter().copied()));
        if next.is_empty() {
            continue;
        }
        chosen.push(j);
        extend_stage(poset, candidates, k + 1, chosen, next, found);
        chosen.pop();
    }
}

/// Skew-growth series over `ground` (the atoms when `None`).
pub fn skew_growth(
    model: &MonoidModel,
    poset: &DivPoset,
    ground: Option<&ElementSet>,
    cutoff: &DegreeKey,
) -> Result<Series, TowerError> {
    let atoms;
    let ground = match ground {
        Some(g) => g,
        None => {
            atoms = default_ground(model);
            &atoms
        }
    };
    Ok(enumerate_towers(model, poset, ground, cutoff)?.skew_growth(model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MonoidDef;
    use crate::presentation::example3;

    fn example3_model(cutoff: i64) -> (MonoidModel, DivPoset) {
        let m = MonoidModel::enumerate_up_to(
            &MonoidDef::Presented(example3()),
            &DegreeKey::integer(cutoff),
        )
        .unwrap();
        let p = DivPoset::build(&m);
        (m, p)
    }

    #[test]
    fn example3_path() {
        let (m, p) = example3_model(5);
        let f = enumerate_towers(&m, &p, &default_ground(&m), m.cutoff()).unwrap();
        assert_eq!(f.len(), 5);
        for (h, t) in f.towers().enumerate() {
            assert_eq!(t.height(), h);
            assert_eq!(t.top().len(), 2);
            assert_eq!(t.degree(&m), Some(&DegreeKey::integer(h as i64 + 1)));
            assert_eq!(t.sign(), if h % 2 == 0 { -1 } else { 1 });
        }
        let labels: Vec<String> = f.tower(1).top().iter().map(|u| m.label(u)).collect();
        assert_eq!(labels, ["a a", "a b"]);
        let dot = f.to_dot(&m);
        assert!(dot.contains("t0 [label=\"h=0 sign=-1 top={a, b}\"];"));
        assert!(dot.contains("t3 -> t4;"));
    }

    #[test]
    fn example3_skew() {
        let (m, p) = example3_model(5);
        let n = skew_growth(&m, &p, None, m.cutoff()).unwrap();
        let expected = Series::from_terms(
            DegreeKey::integer(5),
            [(0, 1), (1, -2), (2, 2), (3, -2), (4, 2), (5, -2)]
                .map(|(d, c)| (DegreeKey::integer(d), c)),
        )
        .unwrap();
        assert_eq!(n, expected);
    }

    #[test]
    fn integer_forest_children() {
        let m =
            MonoidModel::enumerate_up_to(&MonoidDef::Integers, &DegreeKey::MultInt(10)).unwrap();
        let p = DivPoset::build(&m);
        let f = enumerate_towers(&m, &p, &default_ground(&m), m.cutoff()).unwrap();
        let tops: Vec<String> = f
            .children(0)
            .iter()
            .map(|&c| m.label(f.tower(c).top().as_slice()[0]))
            .collect();
        assert_eq!(tops, ["6", "10"]);
        assert_eq!(f.len(), 3);
    }

    #[test]
    fn rejects_bad_grounds() {
        let (m, p) = example3_model(4);
        let a = m.find("a").unwrap();
        let c = m.find("a a").unwrap();
        let bad = [
            ElementSet::default(),
            ElementSet::new([ElementId::UNIT, a]),
            ElementSet::new([a, c]),
        ];
        for g in bad {
            assert!(matches!(
                enumerate_towers(&m, &p, &g, m.cutoff()),
                Err(TowerError::InvalidGround(_))
            ));
        }
        assert!(enumerate_towers(&m, &p, &ElementSet::new([c]), m.cutoff()).is_ok());
    }
}
