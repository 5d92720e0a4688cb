//! Property tests over random presentations and random sparse series.

mod common;

use common::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use skewgrowth::checks::{check_cancellative, check_inversion, check_recursion, CheckStatus};
use skewgrowth::model::ElementRepr;
use skewgrowth::presentation::{preset, Generator, Relation};
use skewgrowth::towers::{default_ground, enumerate_towers};
use skewgrowth::{
    parse_presentation, DegreeKey, DivPoset, ElementSet, LeftQuotient, MonoidDef, MonoidModel,
    Presentation, PresentationError, Series,
};

const NAMES: [&str; 4] = ["a", "b", "c", "d"];

/// Generators of degree 1 and relations between words of equal length.
fn arb_unit_degree_presentation() -> impl Strategy<Value = Presentation> {
    (2usize..=3).prop_flat_map(|n| {
        let word = prop::collection::vec(0..n, 2..=3);
        let rel = word.prop_flat_map(move |lhs| {
            let len = lhs.len();
            (Just(lhs), prop::collection::vec(0..n, len))
        });
        prop::collection::vec(rel, 0..=2).prop_map(move |rels| {
            let gens = (0..n)
                .map(|i| Generator {
                    name: NAMES[i].to_string(),
                    degree: q(1, 1),
                })
                .collect();
            let rels = rels
                .into_iter()
                .filter(|(l, r)| l != r)
                .map(|(lhs, rhs)| Relation { lhs, rhs })
                .collect();
            Presentation::from_parts(gens, rels).unwrap()
        })
    })
}

/// Rational degrees and relations `w = shuffle(w)`, which are homogeneous.
fn arb_presentation() -> impl Strategy<Value = Presentation> {
    (1usize..=4).prop_flat_map(|n| {
        let degrees = prop::collection::vec((1i64..=7, 1i64..=4), n);
        let rel = prop::collection::vec(0..n, 1..=4)
            .prop_flat_map(|w| (Just(w.clone()), Just(w).prop_shuffle()));
        (degrees, prop::collection::vec(rel, 0..=3)).prop_map(move |(degrees, rels)| {
            let gens = degrees
                .into_iter()
                .enumerate()
                .map(|(i, (num, den))| Generator {
                    name: format!("{}{}", NAMES[i % 4], i),
                    degree: q(num, den),
                })
                .collect();
            let rels = rels
                .into_iter()
                .map(|(lhs, rhs)| Relation { lhs, rhs })
                .collect();
            Presentation::from_parts(gens, rels).unwrap()
        })
    })
}

fn enumerate(p: &Presentation, cutoff: i64) -> MonoidModel {
    MonoidModel::enumerate_up_to(
        &MonoidDef::Presented(p.clone()),
        &DegreeKey::integer(cutoff),
    )
    .unwrap()
}

fn arb_rational_series(cutoff: i64) -> impl Strategy<Value = Series> {
    prop::collection::vec((0..=4 * cutoff, -3i64..=3), 0..8).prop_map(move |terms| {
        Series::from_terms(
            DegreeKey::integer(cutoff),
            terms.into_iter().map(|(k, c)| (DegreeKey::ratio(k, 4), c)),
        )
        .unwrap()
    })
}

fn arb_multint_series(nmax: u64) -> impl Strategy<Value = Series> {
    prop::collection::vec((1..=nmax, -3i64..=3), 0..10).prop_map(move |terms| {
        Series::from_terms(
            DegreeKey::MultInt(nmax),
            terms.into_iter().map(|(k, c)| (DegreeKey::MultInt(k), c)),
        )
        .unwrap()
    })
}

fn arb_series() -> impl Strategy<Value = (Series, Series, Series)> {
    prop_oneof![
        (
            arb_rational_series(3),
            arb_rational_series(3),
            arb_rational_series(3)
        ),
        (
            arb_multint_series(40),
            arb_multint_series(40),
            arb_multint_series(40)
        ),
    ]
}

/// Forces the constant term to `c`.
fn with_constant(f: &Series, c: i64) -> Series {
    let zero = DegreeKey::zero(f.kind());
    let terms = f
        .terms()
        .iter()
        .filter(|(k, _)| !k.is_zero())
        .map(|(k, v)| (k.clone(), v.clone()))
        .chain([(zero, BigInt::from(c))]);
    Series::from_terms(f.cutoff().clone(), terms).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn render_parse_round_trip(p in arb_presentation()) {
        let text = p.render();
        prop_assert_eq!(parse_presentation(&text).unwrap(), p);
    }

    #[test]
    fn non_homogeneous_relations_are_rejected(
        degs in prop::collection::vec(1i64..=5, 2..=3),
        lhs in prop::collection::vec(0usize..3, 1..=3),
        rhs in prop::collection::vec(0usize..3, 1..=3),
    ) {
        let n = degs.len();
        let lhs: Vec<usize> = lhs.into_iter().map(|i| i % n).collect();
        let rhs: Vec<usize> = rhs.into_iter().map(|i| i % n).collect();
        let deg = |w: &[usize]| w.iter().map(|&i| degs[i]).sum::<i64>();
        prop_assume!(deg(&lhs) != deg(&rhs));
        let mut text = String::new();
        for (i, d) in degs.iter().enumerate() {
            text.push_str(&format!("gen {} : {}\n", NAMES[i], d));
        }
        let word = |w: &[usize]| w.iter().map(|&i| NAMES[i]).collect::<Vec<_>>().join(" ");
        text.push_str(&format!("rel {} = {}\n", word(&lhs), word(&rhs)));
        match parse_presentation(&text) {
            Err(PresentationError::NonHomogeneousRelation { lhs: dl, rhs: dr, .. }) => {
                prop_assert_eq!(dl, q(deg(&lhs), 1));
                prop_assert_eq!(dr, q(deg(&rhs), 1));
            }
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }

    #[test]
    fn ring_laws((f, g, h) in arb_series()) {
        prop_assert_eq!(f.product(&g).unwrap(), g.product(&f).unwrap());
        prop_assert_eq!(
            f.product(&g).unwrap().product(&h).unwrap(),
            f.product(&g.product(&h).unwrap()).unwrap()
        );
        prop_assert_eq!(
            f.product(&g.sum(&h).unwrap()).unwrap(),
            f.product(&g).unwrap().sum(&f.product(&h).unwrap()).unwrap()
        );
        prop_assert_eq!(f.product(&Series::one(f.cutoff().clone())).unwrap(), f.clone());
    }

    #[test]
    fn inversion_is_an_involution((f, _, _) in arb_series(), negative in any::<bool>()) {
        let f = with_constant(&f, if negative { -1 } else { 1 });
        let g = f.invert().unwrap();
        prop_assert!(f.product(&g).unwrap().is_one());
        prop_assert_eq!(g.invert().unwrap(), f);
    }

    #[test]
    fn multint_product_uses_divisor_pairs(f in arb_multint_series(60), g in arb_multint_series(60)) {
        let fg = f.product(&g).unwrap();
        for n in 1u64..=60 {
            let mut c = BigInt::from(0);
            for a in 1..=n {
                if n % a == 0 {
                    c += f.coeff(&DegreeKey::MultInt(a)) * g.coeff(&DegreeKey::MultInt(n / a));
                }
            }
            prop_assert_eq!(fg.coeff(&DegreeKey::MultInt(n)), c);
        }
    }

    #[test]
    fn enumeration_matches_word_closure(p in arb_unit_degree_presentation()) {
        let m = enumerate(&p, 5);
        let expected = word_closure(&p, &q(5, 1));
        let mut words: Vec<Vec<usize>> = Vec::new();
        for u in m.ids() {
            let ElementRepr::Word(w) = m.repr(u) else { unreachable!() };
            words.push(w.clone());
        }
        let flat: Vec<Vec<usize>> = expected.into_values().flatten().collect();
        prop_assert_eq!(words, flat);
        // determinism
        let again = enumerate(&p, 5);
        prop_assert_eq!(again.table(), m.table());
    }

    #[test]
    fn model_laws(p in arb_unit_degree_presentation()) {
        let m = enumerate(&p, 4);
        for u in m.ids() {
            for v in m.room(u) {
                let uv = m.product(u, v).unwrap();
                prop_assert_eq!(m.degree(uv), &m.degree(u).add(m.degree(v)));
                for w in m.room(uv) {
                    prop_assert_eq!(
                        m.product(uv, w),
                        m.product(v, w).and_then(|vw| m.product(u, vw))
                    );
                }
            }
        }
        for u in m.ids() {
            for v in m.ids() {
                let q = m.left_quotient(u, v);
                prop_assert_eq!(m.left_divides(u, v), q != LeftQuotient::NoWitness);
            }
        }
    }

    #[test]
    fn poset_laws(p in arb_unit_degree_presentation(), picks in prop::collection::vec(any::<prop::sample::Index>(), 1..6)) {
        let m = enumerate(&p, 4);
        let poset = DivPoset::build(&m);
        for u in m.ids() {
            for v in m.ids() {
                if u != v && poset.divides(u, v) {
                    prop_assert!(!poset.divides(v, u));
                    prop_assert!(m.degree(u) < m.degree(v));
                }
            }
        }
        let ids: Vec<_> = m.ids().collect();
        let s: ElementSet = picks.iter().map(|i| *i.get(&ids)).collect();
        let min = poset.min_set(&s);
        for u in &s {
            prop_assert!(min.iter().any(|v| poset.divides(v, u)));
        }
        let mcm = poset.mcm(&s).unwrap();
        for a in &mcm {
            for b in &mcm {
                prop_assert!(a == b || !poset.divides(a, b));
            }
        }
    }

    #[test]
    fn tower_laws(p in arb_unit_degree_presentation()) {
        let m = enumerate(&p, 6);
        let poset = DivPoset::build(&m);
        let f = enumerate_towers(&m, &poset, &default_ground(&m), m.cutoff()).unwrap();
        let d_min = m.min_degree().unwrap().as_rational().unwrap().clone();
        for i in 0..f.len() {
            let t = f.tower(i);
            let h = t.height() as i64;
            let deg = t.degree(&m).unwrap().as_rational().unwrap().clone();
            prop_assert!(deg >= &d_min * BigRational::from_integer((h + 1).into()));
            prop_assert_eq!(f.parent(i).is_none(), i == 0);
            if let Some(parent) = f.parent(i) {
                prop_assert!(f.children(parent).contains(&i));
                prop_assert_eq!(f.tower(parent).stages(), &t.stages()[..t.stages().len() - 1]);
            }
            let max_deg = |s: &ElementSet| s.iter().map(|u| m.degree(u).clone()).max().unwrap();
            for w in t.stages().windows(2) {
                prop_assert!(max_deg(&w[1]) >= max_deg(&w[0]).add(&DegreeKey::Rational(d_min.clone())));
            }
        }
    }

    #[test]
    fn recursion_agrees_with_inversion(p in arb_unit_degree_presentation()) {
        let m = enumerate(&p, 6);
        let poset = DivPoset::build(&m);
        let inv = check_inversion(&m, &poset).unwrap();
        let rec = check_recursion(&m, &poset).unwrap();
        prop_assert_eq!(inv.status, rec.status);
        if inv.status == CheckStatus::Fail {
            prop_assert_eq!(
                &inv.counterexample.as_ref().unwrap()["degree"],
                &rec.counterexample.as_ref().unwrap()["degree"]
            );
        }
        if check_cancellative(&m).passed() {
            prop_assert!(inv.passed(), "{}\n{}", p, inv);
        }
    }

    #[test]
    fn builtin_towers_respect_the_height_bound(
        which in 0usize..7,
        cutoff in 2i64..=9,
    ) {
        let specs = ["free:2", "free:3:deg=1,2,3", "example3", "braid3", "zpos", "mp:p=4,8,16:K=3", "mp:p=2,0:K=2"];
        let b = preset(specs[which]).unwrap();
        let key = match b.default_cutoff {
            DegreeKey::MultInt(_) => DegreeKey::MultInt(1 << cutoff),
            _ => DegreeKey::integer(cutoff),
        };
        let m = MonoidModel::enumerate_up_to(&b.def, &key).unwrap();
        let poset = DivPoset::build(&m);
        let f = enumerate_towers(&m, &poset, &default_ground(&m), m.cutoff()).unwrap();
        let d_min = m.min_degree().unwrap().clone();
        for t in f.towers() {
            let bound = (0..t.height()).fold(d_min.clone(), |acc, _| acc.add(&d_min));
            prop_assert!(t.degree(&m).unwrap() >= &bound);
        }
    }
}
