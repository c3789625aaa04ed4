//! One line per acceptance criterion. Criteria listed in `KNOWN_RED` are
//! reported but do not fail the run; any other failure exits nonzero.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use afk0::algord::closed::{finite_nest_formula, uhf4_coordinates, golden_cone, golden_cone_stated};
use afk0::algord::{
    gallery, iso_search, limit_order_holds, scale_stage, special_point_exists, IsoOutcome, LimitSystem, OrderVerdict,
    Refutation, SpecialPointVerdict,
};
use afk0::diagram::{twisted_refinement_stage, BratteliDiagram};
use afk0::dimgroup::{in_scale, positive, LimitElement, ScaleVerdict};
use afk0::exact::algebraic::Sign;
use afk0::exact::matrix::IntMatrix;
use afk0::exact::perron::{perron, sign_dot};
use afk0::fdcsl::search::{obstructed_assignment, obstructed_target, DEFAULT_SEARCH_BUDGET};
use afk0::fdcsl::{
    order_holds, scale_enumerate, search_regular_embedding, strong_order_holds, MatrixUnitEmbedding, PreorderAlgebra,
    SearchOutcome,
};
use afk0::statpair::{enumerate_intermediates, intermediate_order_oracle, unimodularity_check, IntermediateSpec};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

const KNOWN_RED: &[usize] = &[2, 7, 9];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(t: Instant, limit: u64) -> bool {
    t.elapsed() < Duration::from_secs(limit)
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

fn boxed(stage: usize, lo: &[i64], hi: &[i64]) -> Vec<LimitElement> {
    let mut out = vec![vec![]];
    for (&a, &b) in lo.iter().zip(hi) {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (a..=b).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out.iter().map(|v| LimitElement::from_i64(stage, v)).collect()
}

fn caps(sys: &dyn LimitSystem, stage: usize, bound: i64) -> Vec<i64> {
    let c = afk0::algord::push_to(sys, 0, &sys.unit(), stage).unwrap();
    c.iter().map(|x| i64::try_from(x).unwrap().min(bound)).collect()
}

fn c1() -> Outcome {
    let t = Instant::now();
    let (mut pairs, mut bad) = (0u64, 0u64);
    for total in 1..=7 {
        for sizes in compositions(total) {
            let a = PreorderAlgebra::nest(&sizes);
            let scale = scale_enumerate(&a).unwrap();
            for p in &scale {
                for q in &scale {
                    let oracle = order_holds(&a, p, q).unwrap().is_some();
                    bad += u64::from(oracle != finite_nest_formula(&sizes, p.counts(), q.counts()).unwrap());
                    pairs += 1;
                }
            }
        }
    }
    outcome(bad == 0 && within(t, 30), format!("{pairs} pairs over all nests with at most 7 points, {bad} disagreements"))
}

/// Pushes until nonnegative or negative-forever is evident from a zero
/// vector; `None` when depth runs out.
fn iterate_positive(x: &IntMatrix, v: &[BigInt], depth: usize) -> Option<bool> {
    let mut v = v.to_vec();
    for _ in 0..=depth {
        if v.iter().all(|c| !c.is_negative()) {
            return Some(true);
        }
        if v.iter().all(Zero::is_zero) {
            return Some(true);
        }
        v = x.mul_vec(&v).unwrap();
    }
    None
}

fn c2() -> Outcome {
    let t = Instant::now();
    let pair = gallery::golden_pair().unwrap();
    let d = pair.inner(2).unwrap();
    let (mut total, mut stated_bad, mut corrected_bad, mut iter_bad, mut iter_done) = (0, 0, 0, 0, 0);
    for e in boxed(0, &[-15; 3], &[15; 3]) {
        let v = positive(&d, &e, 60).unwrap();
        assert!(v.is_decided(), "{e}");
        let perron_says = v.holds();
        stated_bad += usize::from(perron_says != golden_cone_stated(&e.vector).unwrap());
        corrected_bad += usize::from(perron_says != golden_cone(&e.vector).unwrap());
        if let Some(it) = iterate_positive(pair.x(), &e.vector, 60) {
            iter_done += 1;
            iter_bad += usize::from(it != perron_says);
        }
        total += 1;
    }
    outcome(
        stated_bad == 0 && corrected_bad == 0 && iter_bad == 0 && within(t, 60),
        format!(
            "{total} vectors: stated cone disagrees with Perron on {stated_bad}, corrected cone on {corrected_bad}; iteration settled {iter_done} and disagrees on {iter_bad}"
        ),
    )
}

fn c3() -> Outcome {
    let sys = gallery::golden().unwrap();
    let (mut pairs, mut bad) = (0, 0);
    for stage in 0..=4 {
        let scale = boxed(stage, &[0; 3], &caps(&sys, stage, 6));
        for p in &scale {
            assert_eq!(scale_stage(&sys, p, 12).unwrap(), Some(stage));
            for q in &scale {
                let v = limit_order_holds(&sys, p, q, 12).unwrap();
                let formula = afk0::algord::closed::golden_formula(&p.vector, &q.vector).unwrap();
                bad += usize::from(matches!(v, OrderVerdict::Inconclusive { .. }) || v.holds() != formula);
                pairs += 1;
            }
        }
    }
    outcome(bad == 0, format!("{pairs} same-stage pairs at stages 0..4, {bad} disagreements"))
}

/// Reflexive transitive relations on `n` points by brute force over all
/// off-diagonal subsets.
fn brute_force_preorders(n: usize) -> usize {
    let off: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
    (0u32..1 << off.len())
        .filter(|mask| {
            let has = |i: usize, j: usize| i == j || off.iter().position(|&p| p == (i, j)).is_some_and(|k| mask >> k & 1 == 1);
            (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| !(has(i, j) && has(j, k)) || has(i, k))))
        })
        .count()
}

/// `a S b` iff `a_5 = b_5`, equal sums over the group, and tail sums of
/// `a` bounded by those of `b`.
fn five_vertex_formula(a: &[BigInt], b: &[BigInt]) -> bool {
    if a[4] != b[4] {
        return false;
    }
    let tail = |v: &[BigInt], i: usize| v[i..4].iter().sum::<BigInt>();
    tail(a, 0) == tail(b, 0) && (0..4).all(|i| tail(a, i) <= tail(b, i))
}

fn c4() -> Outcome {
    let t = Instant::now();
    let pair = gallery::five_vertex_pair().unwrap();
    let y_ok = *pair.y() == IntMatrix::from_rows(&[[1, 4], [1, 3]]);
    let u = unimodularity_check(&pair).unwrap();
    let det_ok = u.det_x == BigInt::from(-1) && u.det_y == BigInt::from(-1) && u.divides;
    let specs = enumerate_intermediates(&pair, 0).unwrap();
    let brute = brute_force_preorders(4);
    let spec = IntermediateSpec::new(&pair, 0, &PreorderAlgebra::upper_triangular(4)).unwrap();
    let sys = spec.system(&pair).unwrap();
    // Stage 1 is the first whose capacities reach 4 in every coordinate.
    let stage = (0..).find(|&k| caps(&sys, k, 4).iter().all(|&c| c >= 4)).unwrap();
    let scale = boxed(stage, &[0; 5], &[4; 5]);
    // Pairs inside one envelope fiber need transports; the rest must be
    // refuted by the envelope alone.
    let mut groups: BTreeMap<(BigInt, BigInt), Vec<&LimitElement>> = BTreeMap::new();
    for e in &scale {
        groups
            .entry((e.vector[4].clone(), e.vector[..4].iter().sum()))
            .or_default()
            .push(e);
    }
    let (mut pairs, mut bad, mut cross, mut cross_bad) = (0u64, 0u64, 0u64, 0u64);
    for p in &scale {
        for q in &scale {
            let v = limit_order_holds(&sys, p, q, 12).unwrap();
            let wrong = matches!(v, OrderVerdict::Inconclusive { .. }) || v.holds() != five_vertex_formula(&p.vector, &q.vector);
            if p.vector[4] == q.vector[4] && p.vector[..4].iter().sum::<BigInt>() == q.vector[..4].iter().sum::<BigInt>() {
                pairs += 1;
                bad += u64::from(wrong);
            } else {
                cross += 1;
                cross_bad += u64::from(wrong || !matches!(v, OrderVerdict::Refuted { reason: Refutation::EnvelopeMismatch { .. } }));
            }
        }
    }
    // The public oracle on a sample of each fiber.
    let sampled = groups
        .values()
        .flat_map(|g| g.iter().step_by(7).flat_map(move |p| g.iter().step_by(11).map(move |q| (*p, *q))))
        .filter(|(p, q)| {
            let v = intermediate_order_oracle(&pair, &spec, p, q, 12).unwrap();
            v.holds() != five_vertex_formula(&p.vector, &q.vector)
        })
        .count();
    outcome(
        y_ok && det_ok && specs.len() == 355 && brute == 355 && bad == 0 && cross_bad == 0 && sampled == 0 && within(t, 120),
        format!(
            "Y ok {y_ok}, det X = {}, det Y = {}, divides {}; {} intermediates (brute force {brute}); stage {stage} box: {pairs} same-fiber pairs with {bad} disagreements, {cross} cross-fiber pairs with {cross_bad}, public oracle sample {sampled}",
            u.det_x,
            u.det_y,
            u.divides,
            specs.len()
        ),
    )
}

fn c5() -> Outcome {
    let pair = gallery::uhf4_pair().unwrap();
    let d: BratteliDiagram = pair.inner(4).unwrap();
    let pd = perron(pair.x()).unwrap();
    let (mut n, mut pos_bad, mut scale_bad) = (0, 0, 0);
    for stage in 0..=3 {
        for e in boxed(stage, &[-20, -20], &[20, 20]) {
            let v = positive(&d, &e, 40).unwrap();
            let expect = e.is_zero_vector() || sign_dot(&e.vector, &pd).unwrap() == Sign::Positive;
            pos_bad += usize::from(!v.is_decided() || v.holds() != expect);
            // Scale as the order interval [(0,0), (1,0)] under the strict
            // first-coordinate order.
            let (a, b) = uhf4_coordinates(stage, &e.vector).unwrap();
            let one = num_rational::BigRational::from_integer(1.into());
            let above_zero = e.is_zero_vector() || a.is_positive();
            let below_unit = a < one || (a == one && b.is_zero());
            let s = in_scale(&d, &e, 40).unwrap();
            scale_bad += usize::from(matches!(s, ScaleVerdict::Inconclusive { .. }) || s.holds() != (above_zero && below_unit));
            n += 1;
        }
    }
    outcome(pos_bad == 0 && scale_bad == 0, format!("{n} elements at stages 0..3: positivity {pos_bad}, scale {scale_bad} disagreements"))
}

fn c6() -> Outcome {
    let mut regular = 0;
    let mut ok = true;
    for n in 1..=6 {
        for m in 1..=6 {
            for e in [MatrixUnitEmbedding::refinement(n, m), MatrixUnitEmbedding::standard(n, m)] {
                ok &= e.check_star_extendible().is_ok() && e.check_strongly_regular().is_none();
                regular += 1;
            }
        }
    }
    let crossed = MatrixUnitEmbedding::crossed_t2_t4().check_strongly_regular();
    let twisted: Vec<bool> = (1..=4)
        .map(|n| twisted_refinement_stage(n).unwrap().check_strongly_regular().is_some())
        .collect();
    outcome(
        ok && crossed.is_some() && twisted.iter().all(|&w| w),
        format!(
            "{regular} refinement/standard embeddings strongly regular: {ok}; crossed T2 -> T4 witness: {}; twisted stages n = 1..4 witnesses: {twisted:?}",
            crossed.is_some()
        ),
    )
}

fn c7() -> Outcome {
    let t = Instant::now();
    let theta = special_point_exists(&gallery::theta(), 12).unwrap();
    let psi = special_point_exists(&gallery::psi(), 12).unwrap();
    let theta_ok = matches!(&theta, SpecialPointVerdict::Exists { witness, .. } if witness.len() == 13);
    let psi_ok = matches!(psi, SpecialPointVerdict::None { .. });
    outcome(
        theta_ok && psi_ok && within(t, 10),
        format!(
            "theta: {} germ(s) with witness {}; psi: {} germ(s), expected none",
            theta.germs(),
            theta_ok,
            psi.germs()
        ),
    )
}

fn c8() -> Outcome {
    let t = Instant::now();
    let t2 = PreorderAlgebra::upper_triangular(2);
    let r = search_regular_embedding(&t2.tensor(&t2), &obstructed_target(), &obstructed_assignment(), DEFAULT_SEARCH_BUDGET)
        .unwrap();
    let detail = match &r {
        SearchOutcome::None { nodes } => format!("certified none after {nodes} nodes"),
        SearchOutcome::Found(_) => "an embedding was found".into(),
        SearchOutcome::Inconclusive { nodes } => format!("budget ran out after {nodes} nodes"),
    };
    outcome(matches!(r, SearchOutcome::None { .. }) && within(t, 600), detail)
}

fn c9() -> Outcome {
    let (mut pairs, mut bad, mut bad_triangular) = (0, 0, 0);
    for total in 1..=7 {
        for sizes in compositions(total) {
            let a = PreorderAlgebra::nest(&sizes);
            let scale = scale_enumerate(&a).unwrap();
            for p in &scale {
                for q in &scale {
                    let differ = order_holds(&a, p, q).unwrap().is_some() != strong_order_holds(&a, p, q).unwrap().is_some();
                    bad += usize::from(differ);
                    bad_triangular += usize::from(differ && sizes.iter().all(|&s| s == 1));
                    pairs += 1;
                }
            }
        }
    }
    outcome(
        bad == 0,
        format!("{pairs} pairs: strong order differs on {bad}, of which {bad_triangular} on triangular nests"),
    )
}

fn c10() -> Outcome {
    let t = Instant::now();
    let theta = gallery::theta();
    let tele = theta.extend_to(8).unwrap().telescope(&[0, 2, 4, 6, 8]).unwrap();
    let found = |a, b| match iso_search(a, b, 3).unwrap() {
        IsoOutcome::Found { certificate } => certificate.validate(a, b).unwrap(),
        _ => false,
    };
    let telescope = found(&theta, &tele);
    let (s24, s42) = (gallery::standard(&[2, 4], 6).unwrap(), gallery::standard(&[4, 2], 6).unwrap());
    let standard = found(&s24, &s42);
    let exhausted = matches!(iso_search(&theta, &gallery::psi(), 3).unwrap(), IsoOutcome::Exhausted { .. });
    outcome(
        telescope && standard && exhausted && within(t, 120),
        format!("telescope certificate {telescope}, standard presentations certificate {standard}, theta/psi exhausted {exhausted}"),
    )
}

fn c11() -> Outcome {
    let f = IntMatrix::from_rows(&[[1, 1], [1, 0]]);
    let mut fib = vec![BigInt::zero(), BigInt::from(1)];
    for k in 2..=22 {
        let next = &fib[k - 1] + &fib[k - 2];
        fib.push(next);
    }
    let powers = (1..=20u64).all(|k| {
        let k = k as usize;
        let expect = IntMatrix::from_big_rows(
            vec![vec![fib[k + 1].clone(), fib[k].clone()], vec![fib[k].clone(), fib[k - 1].clone()]],
            2,
        )
        .unwrap();
        f.pow(k as u64).unwrap() == expect
    });
    let p45 = gallery::golden_pair().unwrap();
    let p46 = gallery::five_vertex_pair().unwrap();
    let primitive = [
        f.clone(),
        IntMatrix::from_rows(&[[3, 1], [1, 3]]),
        p45.y().clone(),
        p45.x().principal(&[1, 2]),
        p46.x().clone(),
        p46.y().clone(),
    ];
    let eigen = primitive.iter().all(|m| perron(m).unwrap().eigen_identity_holds());
    let square = |p: &afk0::statpair::StationaryPair| p.s().mul(p.x()).unwrap() == p.y().mul(p.s()).unwrap();
    let squares = square(&p45) && square(&p46);
    outcome(
        powers && eigen && squares,
        format!("Fibonacci powers k <= 20: {powers}; eigen identities exact on {} matrices: {eigen}; S X = Y S: {squares}", primitive.len()),
    )
}

fn main() {
    let criteria: [(usize, &str, fn() -> Outcome); 11] = [
        (1, "finite nest order formula", c1),
        (2, "golden system positive cone", c2),
        (3, "golden system order formula", c3),
        (4, "five-vertex pair pipeline", c4),
        (5, "UHF(4) positivity and scale", c5),
        (6, "strong regularity classifier", c6),
        (7, "special-point distinguisher", c7),
        (8, "obstructed embedding search", c8),
        (9, "strong order equals order on nests", c9),
        (10, "bounded isomorphism search", c10),
        (11, "exact arithmetic identities", c11),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut unexpected = 0;
    for (n, name, f) in criteria {
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        let known = KNOWN_RED.contains(&n);
        let tag = match (o.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("criterion {n:>2} {tag}: {name}: {} [{secs:.1}s]", o.detail);
        unexpected += usize::from(!o.pass && !known);
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        std::process::exit(1);
    }
}
