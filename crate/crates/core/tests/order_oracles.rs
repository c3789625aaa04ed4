use afk0::algord::closed::{finite_nest_formula, cut_formula, uhf4_formula, golden_formula, uhf4_coordinates};
use afk0::algord::{
    fiber_equivalence_check, gallery, limit_order_holds, order_holds_at, scale_stage, BlockSystem, LimitSystem, OrderVerdict, OrderedNestSystem,
    Refutation,
};
use afk0::dimgroup::{equal, Equality, LimitElement};
use proptest::prelude::*;

fn elem(stage: usize, v: &[i64]) -> LimitElement {
    LimitElement::from_i64(stage, v)
}

fn boxed(stage: usize, caps: &[i64]) -> Vec<LimitElement> {
    let mut out = vec![vec![]];
    for &c in caps {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (0..=c).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out.iter().map(|v| elem(stage, v)).collect()
}

fn compositions(total: usize) -> Vec<Vec<usize>> {
    if total == 0 {
        return vec![vec![]];
    }
    (1..=total)
        .flat_map(|first| {
            compositions(total - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn to_u64(e: &LimitElement) -> Vec<u64> {
    e.vector.iter().map(|x| u64::try_from(x).unwrap()).collect()
}

#[test]
fn finite_nests_match_tail_formula() {
    for total in 1..=5 {
        for sizes in compositions(total) {
            let sys = gallery::finite_nest(&sizes).unwrap();
            let caps: Vec<i64> = sizes.iter().map(|&s| s as i64).collect();
            let scale = boxed(0, &caps);
            for p in &scale {
                for q in &scale {
                    let v = limit_order_holds(&sys, p, q, 2).unwrap();
                    assert!(!matches!(v, OrderVerdict::Inconclusive { .. }), "{sizes:?} {p} {q}");
                    assert_eq!(v.holds(), finite_nest_formula(&sizes, &to_u64(p), &to_u64(q)).unwrap(), "{sizes:?} {p} {q}");
                }
            }
        }
    }
}

#[test]
fn dyadic_cut_matches_closed_form() {
    let sys = gallery::irrational_cut(10).unwrap();
    let caps = afk0::algord::push_to(&sys, 0, &sys.unit(), 1).unwrap();
    let caps: Vec<i64> = caps.iter().map(|c| i64::try_from(c).unwrap()).collect();
    let scale = boxed(1, &caps);
    let mut refuted = 0;
    for p in &scale {
        for q in &scale {
            let v = limit_order_holds(&sys, p, q, 10).unwrap();
            assert!(!matches!(v, OrderVerdict::Inconclusive { .. }), "{p} {q}");
            refuted += usize::from(v.refuted());
            let cp = sys.coordinates(1, &p.vector).unwrap();
            let cq = sys.coordinates(1, &q.vector).unwrap();
            assert_eq!(v.holds(), cut_formula(sys.alpha(), &cp, &cq), "{p} {q}");
        }
    }
    assert!(refuted > 0);
}

#[test]
fn uhf4_matches_closed_form() {
    let sys = gallery::uhf4().unwrap();
    for stage in 1..=2 {
        let cap = 1i64 << (2 * stage);
        let scale = boxed(stage, &[cap, cap]);
        for p in scale.iter().step_by(stage) {
            for q in &scale {
                let v = limit_order_holds(&sys, p, q, 8).unwrap();
                assert!(!matches!(v, OrderVerdict::Inconclusive { .. }), "{p} {q}");
                let cp = uhf4_coordinates(stage, &p.vector).unwrap();
                let cq = uhf4_coordinates(stage, &q.vector).unwrap();
                assert_eq!(v.holds(), uhf4_formula(&cp, &cq), "{p} {q}");
            }
        }
    }
}

/// Same-stage pairs with coordinates at most 6; the closed form is
/// invariant under the push in both directions.
pub fn golden_scale(sys: &BlockSystem, stage: usize) -> Vec<LimitElement> {
    let cap = afk0::algord::push_to(sys, 0, &sys.unit(), stage).unwrap();
    let caps: Vec<i64> = cap.iter().map(|c| i64::try_from(c).unwrap().min(6)).collect();
    boxed(stage, &caps)
}

#[test]
fn golden_matches_closed_form() {
    let sys = gallery::golden().unwrap();
    let mut pairs = 0;
    for stage in 0..=4 {
        let scale = golden_scale(&sys, stage);
        for p in &scale {
            assert_eq!(scale_stage(&sys, p, 12).unwrap(), Some(stage));
            for q in &scale {
                let v = limit_order_holds(&sys, p, q, 12).unwrap();
                assert!(!matches!(v, OrderVerdict::Inconclusive { .. }), "{p} {q}");
                assert_eq!(v.holds(), golden_formula(&p.vector, &q.vector).unwrap(), "{p} {q}");
                pairs += 1;
            }
        }
    }
    assert!(pairs > 5000);
}

#[test]
fn theta_right_most_point_receives_nothing() {
    let sys = OrderedNestSystem::new("theta", &gallery::theta(), 8).unwrap();
    let p = LimitElement::new(1, sys.point_class(1, 2).unwrap());
    let q = LimitElement::new(1, sys.point_class(1, 1).unwrap());
    match limit_order_holds(&sys, &p, &q, 8).unwrap() {
        OrderVerdict::Refuted {
            reason: Refutation::SpecialGerm { stage: 1, vertex: 1, position: 2 },
        } => {}
        other => panic!("{other:?}"),
    }
    assert!(limit_order_holds(&sys, &q, &p, 8).unwrap().holds());
}

#[test]
fn reflexive_at_stage_zero() {
    let sys = gallery::golden().unwrap();
    let e = elem(0, &[1, 0, 1]);
    let OrderVerdict::Holds { certificate } = limit_order_holds(&sys, &e, &e, 4).unwrap() else { panic!() };
    assert_eq!(certificate.stage, 0);
}

fn antisymmetric_on(sys: &BlockSystem, scale: &[LimitElement], depth: usize) {
    let d = sys.diagram(depth + 2).unwrap();
    for p in scale {
        for q in scale {
            if limit_order_holds(sys, p, q, depth).unwrap().holds() && limit_order_holds(sys, q, p, depth).unwrap().holds() {
                assert!(matches!(equal(&d, p, q).unwrap(), Equality::Equal { .. }), "{p} {q}");
            }
        }
    }
}

#[test]
fn antisymmetry_on_triangular_systems() {
    antisymmetric_on(&gallery::uhf4().unwrap(), &boxed(1, &[4, 4]), 6);
    antisymmetric_on(&gallery::golden().unwrap(), &boxed(1, &[1, 2, 2]), 6);
    antisymmetric_on(&gallery::finite_nest(&[1, 1, 1]).unwrap(), &boxed(0, &[1, 1, 1]), 2);
}

proptest! {
    #[test]
    fn certificates_persist(p in prop::collection::vec(0i64..=4, 3), q in prop::collection::vec(0i64..=4, 3)) {
        let sys = gallery::golden().unwrap();
        let (p, q) = (elem(2, &p), elem(2, &q));
        if let OrderVerdict::Holds { certificate } = limit_order_holds(&sys, &p, &q, 8).unwrap() {
            for k in certificate.stage..certificate.stage + 3 {
                let c = order_holds_at(&sys, &p, &q, k).unwrap();
                prop_assert!(c.is_some());
                prop_assert!(c.unwrap().validate(&sys, &p, &q).unwrap());
            }
        }
    }

    #[test]
    fn order_is_transitive_on_uhf4(a in prop::collection::vec(0i64..=4, 2), b in prop::collection::vec(0i64..=4, 2), c in prop::collection::vec(0i64..=4, 2)) {
        let sys = gallery::uhf4().unwrap();
        let (a, b, c) = (elem(1, &a), elem(1, &b), elem(1, &c));
        if limit_order_holds(&sys, &a, &b, 6).unwrap().holds() && limit_order_holds(&sys, &b, &c, 6).unwrap().holds() {
            prop_assert!(limit_order_holds(&sys, &a, &c, 6).unwrap().holds());
        }
    }
}

#[test]
fn dyadic_nest_fibers_are_order_classes() {
    let sys = gallery::dyadic_nest(&[1, 3], 2).unwrap();
    let m = sys.envelope_map(4).unwrap().unwrap();
    let sample = boxed(1, &[2, 6]);
    let r = fiber_equivalence_check(&sys, &m, &sample, 4).unwrap();
    assert!(r.classes_within_fibers && r.fibers_connected);
    assert_eq!(r.fibers.len(), 9);
    assert_eq!(r.classes, r.fibers);
}
