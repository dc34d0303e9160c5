//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use orbivertex::cli::{random_triples, sample_triples};
use orbivertex::condense::{
    correspondence_check, k_symmetry_check, recurrence_check, recurrence_triples, small_triples, v_empty,
    weight_suite, Side,
};
use orbivertex::doubledimer::{
    ab_membership, dimers_from_boxset, double_dimer_weight, labelled_box_filter, stabilization_size,
    HoneycombPatch, Side as Sheet,
};
use orbivertex::dtvertex::{dt_symmetry_check, dt_vertex};
use orbivertex::glue::{edge_factor, pt_partition, vertex_factor, EdgeAssignment, WebDiagram};
use orbivertex::partitions::{is_multi_regular, partition_lemma_suite, Partition};
use orbivertex::ptvertex::{closed_form_valid, pt_symmetry_check, pt_vertex_closed, pt_vertex_enum};
use orbivertex::regions::{box_color, enumerate_ab_all, region_sets, AbConfig, LegTriple};
use orbivertex::series::{Series, VarTable};

const SEED: u64 = 20240611;

type Outcome = std::result::Result<String, String>;

fn legs(s: &str) -> LegTriple {
    s.parse().expect("leg triple")
}

fn shapes_up_to(k: usize) -> Vec<Partition> {
    Partition::all_up_to(k)
}

/// Vertex cases collected by criteria 3-5 for the triangulation check.
#[derive(Default)]
struct Cases(BTreeSet<(usize, LegTriple, i64)>);

impl Cases {
    fn add(&mut self, n: usize, l: &LegTriple, d: i64) {
        self.0.insert((n, l.clone(), d));
    }
}

fn criterion_1() -> Outcome {
    let reports = partition_lemma_suite(14);
    let checked: usize = reports.iter().map(|r| r.checked).sum();
    match reports.iter().find(|r| !r.passed()) {
        None => Ok(format!("{} identity families, {checked} checks, |eta| <= 14", reports.len())),
        Some(r) => Err(format!("{}: {:?}", r.name, r.failures)),
    }
}

fn criterion_2() -> Outcome {
    for (n, d) in [(1, 8), (2, 6), (3, 5)] {
        let enumerated = dt_vertex(n, &LegTriple::vacuum(), d);
        let product = v_empty(n, d).map_err(|e| e.to_string())?;
        if let Some((e, l, r)) = enumerated.first_difference(&product, d) {
            return Err(format!("n={n}: coefficient of {e:?} is {l} enumerated, {r} from the product"));
        }
    }
    let by_deg = dt_vertex(1, &LegTriple::vacuum(), 8).coeffs_by_degree();
    let got: Vec<BigInt> = (0..=8).map(|k| by_deg.get(&k).cloned().unwrap_or_default()).collect();
    let want: Vec<BigInt> = [1, 1, 3, 6, 13, 24, 48, 86, 160].into_iter().map(BigInt::from).collect();
    if got != want {
        return Err(format!("n=1 coefficients {got:?}"));
    }
    Ok("(n,D) in {(1,8),(2,6),(3,5)}; n=1 gives 1,1,3,6,13,24,48,86,160".into())
}

fn criterion_3(cases: &mut Cases) -> Outcome {
    let d = 5;
    let mut count = 0;
    let mut corrected = 0;
    for n in [1, 2] {
        for shape in shapes_up_to(3) {
            let e = Partition::empty();
            let triples = [
                LegTriple::new(shape.clone(), e.clone(), e.clone()),
                LegTriple::new(e.clone(), shape.clone(), e.clone()),
                LegTriple::new(e.clone(), e.clone(), shape.clone()),
            ];
            for (pos, t) in triples.iter().enumerate() {
                let r = correspondence_check(t, n, d).map_err(|e| e.to_string())?;
                cases.add(n, t, d);
                count += 1;
                let ok = if pos == 2 && !is_multi_regular(&shape, n) {
                    corrected += 1;
                    r.corrected_holds == Some(true)
                } else {
                    r.holds
                };
                if !ok {
                    return Err(format!("{t} n={n}: {:?} {:?}", r.witness, r.corrected_witness));
                }
            }
        }
    }
    let r = correspondence_check(&legs(";;1"), 2, d).map_err(|e| e.to_string())?;
    if r.corrected_holds != Some(true) {
        return Err(format!("nu=(1), n=2 corrected identity: {:?}", r.corrected_witness));
    }
    Ok(format!(
        "{count} one-leg cases to D={d} ({corrected} non-multi-regular nu legs via the O_nu correction); nu=(1), n=2 corrected identity holds"
    ))
}

fn recurrence_pool(which: u8) -> Vec<LegTriple> {
    small_triples(4, 2)
        .into_iter()
        .filter(|t| {
            let [l, m, nu] = t.legs();
            match which {
                1 => !l.is_empty() && !m.is_empty(),
                2 => !l.is_empty() && !nu.is_empty(),
                _ => !m.is_empty() && !nu.is_empty(),
            }
        })
        .collect()
}

fn criterion_4(cases: &mut Cases) -> Outcome {
    let d = 4;
    let per = 10;
    let mut total = 0;
    for which in 1..=3u8 {
        let pool = recurrence_pool(which);
        // a spread of the pool: every k-th triple
        let step = (pool.len() / per).max(1);
        let chosen: Vec<&LegTriple> = pool.iter().step_by(step).take(per).collect();
        if chosen.len() < per {
            return Err(format!("recurrence {which}: only {} triples available", chosen.len()));
        }
        for t in chosen {
            for n in [1, 2] {
                for side in [Side::Dt, Side::Pt] {
                    recurrence_check(which, side, t, n, d).map_err(|e| e.to_string())?;
                    total += 1;
                }
                for u in recurrence_triples(which, t) {
                    cases.add(n, &u, d);
                }
            }
        }
    }
    Ok(format!("{total} checks: recurrences 1-3 x 10 triples x n in {{1,2}} x DT/PT, D={d}"))
}

fn criterion_5(cases: &mut Cases) -> Outcome {
    let d = 4;
    let mut list: Vec<(usize, LegTriple)> = vec![(1, legs("1;1;1")), (1, legs("2;1;1"))];
    for nu in ["1,1", "2,2"] {
        for a in shapes_up_to(2) {
            for b in shapes_up_to(2) {
                list.push((2, LegTriple::new(a.clone(), b.clone(), nu.parse().unwrap())));
            }
        }
    }
    for (n, t) in &list {
        let r = correspondence_check(t, *n, d).map_err(|e| e.to_string())?;
        cases.add(*n, t, d);
        if !r.holds {
            return Err(format!("{t} n={n}: {:?}", r.witness));
        }
    }
    let neg = correspondence_check(&legs(";;1"), 2, d).map_err(|e| e.to_string())?;
    if neg.holds {
        return Err("negative control: plain identity unexpectedly holds for nu=(1), n=2".into());
    }
    Ok(format!(
        "{} cases to D={d}; negative control nu=(1), n=2 fails at {}",
        list.len(),
        neg.witness.unwrap_or_default()
    ))
}

fn criterion_6(cases: &Cases) -> Outcome {
    let mut checked = 0;
    for (n, t, d) in &cases.0 {
        if !closed_form_valid(*n, t) {
            continue;
        }
        let e = pt_vertex_enum(*n, t, *d).map_err(|e| e.to_string())?;
        let c = pt_vertex_closed(*n, t, *d, false).map_err(|e| e.to_string())?;
        if let Some((x, l, r)) = e.first_difference(&c, *d) {
            return Err(format!("{t} n={n} D={d}: coefficient of {x:?} enum {l}, closed {r}"));
        }
        checked += 1;
    }
    // q^{-1} + 1/(1-q)^2 to q^3
    let w = pt_vertex_closed(1, &legs("1;1;"), 3, false).map_err(|e| e.to_string())?;
    let vars = VarTable::q(1);
    let want = Series::from_terms(
        &vars,
        [(-1, 1), (0, 1), (1, 2), (2, 3), (3, 4)].map(|(e, c)| (vec![e], BigInt::from(c))),
        Some(3),
        -1,
    );
    if !w.agrees_to(&want, 3) || !pt_vertex_enum(1, &legs("1;1;"), 3).unwrap().agrees_to(&want, 3) {
        return Err(format!("W^1_(1)(1)() = {w}"));
    }
    Ok(format!("{checked} valid cases from criteria 3-5 agree exactly; W^1_(1)(1)() = q^-1 + 1/(1-q)^2 to q^3"))
}

fn criterion_7() -> Outcome {
    let triples = random_triples(20, 4, 2, SEED);
    let mut summary = Vec::new();
    // n = 0 is the free-index (symbolic) check; 1..3 the coloured reductions
    for n in 0..=3 {
        let rep = weight_suite(8, &triples, 3, n);
        if !rep.passed() {
            return Err(format!("n={n}: {} failures, first {:?}", rep.failures.len(), rep.failures[0]));
        }
        summary.push(format!("n={n}: {}/{}/{}", rep.identities, rep.frames, rep.squares));
    }
    let k_pool: Vec<LegTriple> = small_triples(4, 2)
        .into_iter()
        .filter(|t| !t.lambda.is_empty() && !t.nu.is_empty())
        .collect();
    for t in &sample_triples(&k_pool, 20, SEED) {
        for n in 1..=3 {
            if !k_symmetry_check(t, n).map_err(|e| e.to_string())? {
                return Err(format!("K2/K3 symmetry fails at {t}, n={n}"));
            }
        }
    }
    Ok(format!(
        "identities/frames/squares {} (|eta| <= 8, 3 sizes); K2/K3 symmetry on 20 seeded triples with nonempty lambda, nu",
        summary.join(", ")
    ))
}

fn criterion_8() -> Outcome {
    let budget = 4;
    let mut configs = 0;
    let mut members = 0;
    let mut moves = 0;
    for t in small_triples(3, 2) {
        let all = enumerate_ab_all(&t, budget);
        if all.is_empty() {
            continue;
        }
        let patch = HoneycombPatch::new(stabilization_size(&t, budget));
        let rs = region_sets(&t);
        let weight = |cfg: &AbConfig, n: usize| -> Result<Vec<i64>, String> {
            let da = dimers_from_boxset(&patch, Sheet::A, &t, cfg).map_err(|e| e.to_string())?;
            let db = dimers_from_boxset(&patch, Sheet::B, &t, cfg).map_err(|e| e.to_string())?;
            Ok(double_dimer_weight(&patch, &da, &db, n))
        };
        for cfg in &all {
            let dd = ab_membership(&t, cfg).map_err(|e| e.to_string())?;
            if dd != labelled_box_filter(&t, cfg) {
                return Err(format!("{t} {cfg:?}: double-dimer says {dd}"));
            }
            configs += 1;
            members += dd as usize;
        }
        for n in [1, 2] {
            let base = orbivertex::doubledimer::base_config(&t);
            let wb = weight(&base, n)?;
            let (ii, iii) = (rs.ii_colored(n), rs.iii_colored(n));
            let set: BTreeSet<&AbConfig> = all.iter().collect();
            for cfg in &all {
                let w = weight(cfg, n)?;
                let cnt = cfg.colored_counts(n);
                for l in 0..n {
                    if w[l] + cnt[l] as i64 != wb[l] + ii[l] as i64 + 2 * iii[l] as i64 {
                        return Err(format!("{t} {cfg:?} n={n}: bookkeeping fails in colour {l}"));
                    }
                }
                // one-box moves that stay inside the enumerated family
                for (into_a, pool) in [(true, &cfg.a), (false, &cfg.b)] {
                    for bx in pool {
                        let (mut a, mut b) = (cfg.a.clone(), cfg.b.clone());
                        if into_a {
                            a.retain(|x| x != bx);
                        } else {
                            b.retain(|x| x != bx);
                        }
                        let smaller = AbConfig::new(a, b);
                        if !set.contains(&smaller) {
                            continue;
                        }
                        let ws = weight(&smaller, n)?;
                        let c = box_color(bx, n);
                        for l in 0..n {
                            let want = if l == c { -1 } else { 0 };
                            if w[l] - ws[l] != want {
                                return Err(format!("{t} n={n}: adding {bx:?} changes colour {l} by {}", w[l] - ws[l]));
                            }
                        }
                        moves += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "{configs} (A,B) pairs with |A|+|B| <= {budget} ({members} members) agree with labelled boxes; bookkeeping and {moves} one-box moves exact for n in {{1,2}}"
    ))
}

fn criterion_9() -> Outcome {
    let d = 4;
    let mut count = 0;
    for n in 1..=3 {
        for t in random_triples(10, 4, 2, SEED + n as u64) {
            if !dt_symmetry_check(n, &t, d) {
                return Err(format!("DT symmetry fails at {t}, n={n}"));
            }
            if !pt_symmetry_check(n, &t, d).map_err(|e| e.to_string())? {
                return Err(format!("PT symmetry fails at {t}, n={n}"));
            }
            count += 1;
        }
    }
    Ok(format!("DT and PT bar-transpose symmetry on {count} seeded triples to D={d}"))
}

fn single_vertex(n: usize) -> WebDiagram {
    WebDiagram::from_json(&format!(
        r#"{{"vertices":[{{"id":"v","edges":["a","b","c"]}}],
           "edges":[{{"id":"a","tail":"v","compact":false}},{{"id":"b","tail":"v","compact":false}},
                    {{"id":"c","tail":"v","compact":false,"n":{n}}}]}}"#
    ))
    .unwrap()
}

fn one_edge(n: usize, m: i64, mp: i64) -> WebDiagram {
    WebDiagram::from_json(&format!(
        r#"{{"vertices":[{{"id":"u","edges":["fp","f","e"]}},{{"id":"w","edges":["g","gp","e"]}}],
           "edges":[{{"id":"e","tail":"u","head":"w","compact":true,"n":{n},"m":{m},"mp":{mp},
                      "adj":{{"f":"f","fp":"fp","g":"g","gp":"gp"}}}},
                    {{"id":"f","tail":"u","compact":false}},{{"id":"fp","tail":"u","compact":false}},
                    {{"id":"g","head":"w","compact":false}},{{"id":"gp","head":"w","compact":false}}]}}"#
    ))
    .unwrap()
}

fn criterion_10() -> Outcome {
    for n in [1, 2] {
        let z = pt_partition(&single_vertex(n), 2, 4).map_err(|e| e.to_string())?;
        if z.strata.len() != 1 || !z.stratum(&[]).agrees_to(&Series::one(&z.box_vars), 4) {
            return Err(format!("single vertex n={n}: {z}"));
        }
    }
    // D_curve = 1 stratum against edge × vertex × vertex by hand
    for n in [1, 2] {
        let d = one_edge(n, -1, -1);
        let db = 3;
        let z = pt_partition(&d, 1, db).map_err(|e| e.to_string())?;
        let vars = d.variables();
        let lam = Partition::new(vec![1]).unwrap();
        let mut a = EdgeAssignment::default();
        a.parts.insert("e".into(), lam.clone());
        let ef = edge_factor(&d, "e", &lam).map_err(|e| e.to_string())?;
        let ef_deg: i64 = ef.boxes.iter().map(|&x| x as i64).sum();
        // each W here has floor 0
        let vu = vertex_factor(&d, "u", &a, db - ef_deg).map_err(|e| e.to_string())?;
        let vw = vertex_factor(&d, "w", &a, db - ef_deg).map_err(|e| e.to_string())?;
        let hand = Series::monomial(&vars.boxes, &ef.boxes, ef.sign)
            .mul(&vu)
            .and_then(|s| s.mul(&vw))
            .map_err(|e| e.to_string())?
            .truncate(db);
        let negate: Vec<bool> = vars.boxes.names().iter().map(|s| s.ends_with("_0")).collect();
        let hand = hand.sign_twist(&negate);
        let got = z.stratum(&ef.curve);
        if !got.agrees_to(&hand, db) {
            return Err(format!("one edge n={n}: glued {got} vs hand {hand}"));
        }
    }
    let chain = WebDiagram::from_json(
        r#"{"vertices":[{"id":"u","edges":["a","b","e"]},{"id":"w","edges":["gp","e","h"]},
                        {"id":"x","edges":["c","d","h"]}],
           "edges":[{"id":"e","tail":"u","head":"w","compact":true,"n":1,"m":-1,"mp":0,
                     "adj":{"f":"b","fp":"a","g":"h","gp":"gp"}},
                    {"id":"h","tail":"w","head":"x","compact":true,"n":2,"m":-1,"mp":-1,
                     "adj":{"f":"e","fp":"gp","g":"c","gp":"d"}},
                    {"id":"a","tail":"u","compact":false},{"id":"b","tail":"u","compact":false},
                    {"id":"gp","tail":"w","compact":false},
                    {"id":"c","head":"x","compact":false},{"id":"d","head":"x","compact":false}]}"#,
    )
    .unwrap();
    let mut reversals = 0;
    for d in [one_edge(1, -1, -1), one_edge(2, -1, -1), one_edge(3, -1, -1), chain] {
        let z = pt_partition(&d, 1, 3).map_err(|e| e.to_string())?;
        for e in d.compact_edges() {
            let r = d.reversed(&e.id).map_err(|e| e.to_string())?;
            let zr = pt_partition(&r, 1, 3).map_err(|e| e.to_string())?.bar_edge(&r, &e.id);
            if zr != z {
                return Err(format!("reversing {} changes the partition function", e.id));
            }
            reversals += 1;
        }
    }
    if one_edge(1, -1, -1).validate().is_err() {
        return Err("CY validation rejects (-1,-1)".into());
    }
    if one_edge(1, 0, 0).validate().is_ok() {
        return Err("CY validation accepts (0,0)".into());
    }
    Ok(format!(
        "single vertices give 1; D_curve=1 stratum matches hand product (n=1,2); {reversals} reversals invariant at (1,3); CY accepts (-1,-1), rejects (0,0)"
    ))
}

fn main() {
    let mut cases = Cases::default();
    let mut failed = 0;
    let mut report = |k: usize, limit: Option<Duration>, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let out = f();
        let took = start.elapsed();
        let over = limit.is_some_and(|l| took > l);
        let (ok, detail) = match out {
            Ok(d) if over => (false, format!("{d}; runtime {:.1}s exceeds {:?}", took.as_secs_f64(), limit.unwrap())),
            Ok(d) => (true, d),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {k:>2} [PRIMARY] {}  ({:.1}s)  {detail}",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
    };
    let secs = |s: u64| Some(Duration::from_secs(s));
    report(1, secs(10), &mut criterion_1);
    report(2, secs(120), &mut criterion_2);
    report(3, secs(300), &mut || criterion_3(&mut cases));
    report(4, secs(600), &mut || criterion_4(&mut cases));
    report(5, secs(900), &mut || criterion_5(&mut cases));
    report(6, None, &mut || criterion_6(&cases));
    report(7, secs(300), &mut criterion_7);
    report(8, secs(300), &mut criterion_8);
    report(9, None, &mut criterion_9);
    report(10, secs(60), &mut criterion_10);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
