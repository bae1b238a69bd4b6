//! Acceptance criteria; prints one PASS/FAIL line each and exits nonzero on any failure.

use std::collections::{BTreeMap, BTreeSet};
use std::panic;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symdyn::analysis::{
    isolated_check, nmc_check, refute_isolation, validate_witness, IsolationBounds, IsolationStatus,
};
use symdyn::automaton::{
    case1_automaton, case2_nmc_automaton, check_local_rules, dichotomy_check, generated_words, product_automaton,
    projection_check, run, tilde_sft, ColoringAutomaton,
};
use symdyn::rauzy::z_language;
use symdyn::shadowing::{ml_check, sft_shadowing_suite, InverseSystem};
use symdyn::sofic::{canonical_form, image_sofic, sofic_equal, SoficPresentation};
use symdyn::toeplitz::{generate, periodicity_check, recover};
use symdyn::{AlphabetMap, Group, GroupElement, RauzyGraph, Sft, SpecFile};

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn letters(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn spec(name: &str) -> SpecFile {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    SpecFile::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn golden() -> Sft {
    Sft::z_forbidden_words(letters(2), 2, &[vec![1, 1]]).unwrap()
}

fn binary_words(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..1usize << n).map(move |m| (0..n).map(|i| (m >> (n - 1 - i)) & 1).collect())
}

fn criterion_1() -> Outcome {
    let x = golden();
    let (mut a, mut b) = (1u64, 2u64);
    for n in 1..=20 {
        let brute = binary_words(n).filter(|w| !w.windows(2).any(|p| p == [1, 1])).count() as u64;
        let lang = z_language(&x, n).map_err(|e| e.to_string())?;
        check(lang.len() as u64 == brute && brute == b, format!("length {n}: {} vs {brute} vs {b}", lang.len()))?;
        (a, b) = (b, a + b);
    }
    Ok("lengths 1..20 match brute force and Fibonacci".into())
}

fn criterion_2() -> Outcome {
    let s = spec("example225.sds");
    let x = s.sft(None).unwrap();
    let v = isolated_check(x, &IsolationBounds::default()).map_err(|e| e.to_string())?;
    check(v.status == IsolationStatus::IsolatedCertified, format!("status {}", v.status))?;
    let img = canonical_form(&image_sofic(x, s.map(Some("p0")).unwrap()).map_err(|e| e.to_string())?);
    for n in 1..=8 {
        let expected: BTreeSet<Vec<usize>> = binary_words(n).filter(|w| w.iter().sum::<usize>() <= 1).collect();
        check(img.language(n) == expected, format!("image language differs at length {n}"))?;
    }
    Ok(format!("{}; image has at most one 1 through length 8", v.certificate))
}

fn criterion_3() -> Outcome {
    let x = spec("fullshift.sds").sft(None).unwrap().clone();
    let bounds = IsolationBounds::default();
    let v = isolated_check(&x, &bounds).map_err(|e| e.to_string())?;
    check(v.status == IsolationStatus::NotIsolated, format!("status {}", v.status))?;
    let w = v.witness.ok_or("no witness")?;
    check(w.forbidden.len() == 3 && w.sft.window().len() == 3, "witness is not a window-3 sub-SFT")?;
    check(validate_witness(&x, &w, bounds.f_len).map_err(|e| e.to_string())?, "witness fails validation")?;
    Ok(format!("witness forbids {:?}, validated", w.forbidden))
}

/// Extends `fixed` to all of `ball` with no two Cayley-adjacent 1s, by backtracking.
fn extends_independently(g: &Group, ball: &[GroupElement], fixed: &BTreeMap<GroupElement, usize>) -> bool {
    fn go(
        g: &Group,
        ball: &[GroupElement],
        i: usize,
        assign: &mut BTreeMap<GroupElement, usize>,
        gens: &[GroupElement],
    ) -> bool {
        if i == ball.len() {
            return true;
        }
        let h = &ball[i];
        if assign.contains_key(h) {
            return go(g, ball, i + 1, assign, gens);
        }
        for a in [0, 1] {
            let clash = a == 1
                && gens.iter().any(|s| assign.get(&g.multiply(h, s).unwrap()) == Some(&1));
            if !clash {
                assign.insert(h.clone(), a);
                if go(g, ball, i + 1, assign, gens) {
                    return true;
                }
                assign.remove(h);
            }
        }
        false
    }
    let gens = g.generators();
    let consistent = fixed.iter().all(|(h, &a)| a == 0 || gens.iter().all(|s| fixed.get(&g.multiply(h, s).unwrap()) != Some(&1)));
    consistent && go(g, ball, 0, &mut fixed.clone(), &gens)
}

fn criterion_4() -> Outcome {
    let x = golden().free_product(&golden()).map_err(|e| e.to_string())?;
    let gp = x.global_patterns(1, 3);
    let g = x.group().clone();
    let outer: Vec<GroupElement> = g.ball(4).into_iter().collect();
    let mut oracle = BTreeSet::new();
    for p in binary_words(gp.support.len()) {
        let fixed: BTreeMap<GroupElement, usize> = gp.support.iter().cloned().zip(p.iter().copied()).collect();
        if extends_independently(&g, &outer, &fixed) {
            oracle.insert(p);
        }
    }
    let centre = gp.support.iter().position(|h| h.is_identity()).unwrap();
    let ones = gp.patterns.iter().filter(|p| p[centre] == 1).count();
    check(gp.patterns.len() == 17 && gp.patterns == oracle, format!("{} patterns, oracle {}", gp.patterns.len(), oracle.len()))?;
    Ok(format!("17 ball-1 patterns ({} with centre 0, {ones} with centre 1), oracle agrees", 17 - ones))
}

fn automata() -> Vec<(&'static str, ColoringAutomaton)> {
    let s = spec("automata.sds");
    let swap = s.automaton(Some("swap")).unwrap().clone();
    let same = s.map(Some("same")).unwrap();
    let ex = spec("example225.sds");
    let graph = symdyn::to_rauzy(ex.sft(None).unwrap(), 2).unwrap().graph;
    let z3 = Group::cyclic(3).unwrap();
    let no_adjacent = Sft::from_forbidden(
        z3.clone(),
        letters(2),
        vec![GroupElement::identity(), z3.generators()[0].clone()],
        [vec![1, 1]],
    )
    .unwrap();
    vec![
        ("Z period swap", swap.clone()),
        ("Z NMC automaton of the {-1,0,1} graph", case2_nmc_automaton(&graph, 6).unwrap().automaton),
        ("Z/3 case 1", case1_automaton(&no_adjacent).unwrap().0),
        (
            "Z/2 * Z/3 product",
            product_automaton(s.automaton(Some("flip")).unwrap(), same, s.automaton(Some("rot")).unwrap(), s.map(Some("fold")).unwrap())
                .unwrap(),
        ),
        ("F2 product of swaps", product_automaton(&swap, same, &swap, same).unwrap()),
    ]
}

fn criterion_5() -> Outcome {
    let mut notes = Vec::new();
    for (name, a) in automata() {
        let started = Instant::now();
        for c in 0..a.colors().len() {
            let r = run(&a, &GroupElement::identity(), c, 5);
            let bad = check_local_rules(&a, &r);
            check(bad.is_empty(), format!("{name}: {}", bad.join("; ")))?;
        }
        let t = tilde_sft(&a, 4).map_err(|e| format!("{name}: {e}"))?;
        let d = dichotomy_check(&t, 3);
        check(d.pass, format!("{name}: dichotomy fails at {:?}", d.witness))?;
        let p = projection_check(&a, &t, 3, 6);
        check(p.surjective, format!("{name}: projection misses sampled patterns"))?;
        let took = started.elapsed();
        check(took < Duration::from_secs(10), format!("{name}: {took:?}"))?;
        notes.push(format!("{name} {}/{}{}", p.sampled, p.image, if p.exact { "" } else { " (image larger)" }));
    }
    Ok(notes.join(", "))
}

fn criterion_6() -> Outcome {
    let z3 = Group::cyclic(3).unwrap();
    let x = Sft::from_forbidden(
        z3.clone(),
        letters(2),
        vec![GroupElement::identity(), z3.generators()[0].clone()],
        [vec![1, 1]],
    )
    .unwrap();
    let (a, map) = case1_automaton(&x).map_err(|e| e.to_string())?;
    let target = x.global_patterns(1, 2);
    let mut generated = BTreeSet::new();
    for c in 0..a.colors().len() {
        let r = run(&a, &GroupElement::identity(), c, 1);
        generated.insert(target.support.iter().map(|g| map.apply(r.color(g).unwrap())).collect::<Vec<usize>>());
    }
    check(target.support.len() == 3, "ball(1) is not the whole group")?;
    check(generated == target.patterns, format!("generated {generated:?} vs target {:?}", target.patterns))?;
    Ok(format!("{} configurations on Z/3, equal", generated.len()))
}

fn criterion_7() -> Outcome {
    let example = RauzyGraph::over_integers(letters(3), [(0, 0), (0, 2), (2, 1), (1, 1)]).unwrap();
    let cycle = RauzyGraph::over_integers(letters(3), [(0, 1), (1, 2), (2, 0)]).unwrap();
    for (name, g) in [("example graph", example), ("3-cycle", cycle)] {
        let c = case2_nmc_automaton(&g, 6).map_err(|e| format!("{name}: {e}"))?;
        let x = g.vertex_shift().map_err(|e| e.to_string())?;
        for n in 1..=8 {
            let generated: BTreeSet<Vec<usize>> = generated_words(&c.automaton, n)
                .map_err(|e| e.to_string())?
                .into_iter()
                .map(|w| w.iter().map(|&b| c.first[b]).collect())
                .collect();
            let lang = z_language(&x, n).map_err(|e| e.to_string())?;
            check(generated == lang, format!("{name}: languages differ at length {n}"))?;
        }
    }
    Ok("example graph and 3-cycle agree through length 8".into())
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2025);
    let bounds = IsolationBounds { f_len: 2, search_window: 4, distinguish_len: 8, vertex_cap: 12 };
    let (mut graphs, mut nmc_true, mut refuted) = (0, 0, 0);
    while graphs < 24 {
        let n = rng.gen_range(2..=6);
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|_| rng.gen_bool(0.3)).collect();
        let g = RauzyGraph::over_integers(letters(n), edges).unwrap();
        let ess = g.essentialize();
        if ess.is_empty() {
            continue;
        }
        graphs += 1;
        let x = ess.vertex_shift().map_err(|e| e.to_string())?;
        let nmc = nmc_check(&ess, 12).map_err(|e| e.to_string())?;
        let witness = refute_isolation(&x, &bounds).map_err(|e| e.to_string())?;
        if let Some(w) = &witness {
            refuted += 1;
            check(validate_witness(&x, w, 2).map_err(|e| e.to_string())?, "invalid witness")?;
        }
        if nmc {
            nmc_true += 1;
            check(witness.is_none(), format!("NMC graph {ess} has a witness"))?;
        }
    }
    Ok(format!("{graphs} graphs, {nmc_true} NMC, {refuted} refuted, no conflict"))
}

fn criterion_9() -> Outcome {
    let r = sft_shadowing_suite(&golden(), 1, 12, 10_000_000).map_err(|e| e.to_string())?;
    check(r.total > 0 && r.traced == r.total, format!("{}/{} traced", r.traced, r.total))?;
    Ok(format!("{} pseudo-orbits, all traced and validated", r.total))
}

fn criterion_10() -> Outcome {
    let full = Sft::z_forbidden_words(letters(2), 2, &[]).unwrap();
    let id = AlphabetMap::identity(&letters(2));
    let stable = InverseSystem::new(vec![full, golden(), golden()], vec![id.clone(), id]).unwrap();
    let v = ml_check(&stable, 1, 3).map_err(|e| e.to_string())?;
    check(v.stabilized_at == Some(2), format!("stable system: {:?}", v.stabilized_at))?;
    let s = spec("shrinking.sds");
    let chain = s.system(None).unwrap();
    let w = ml_check(chain, 1, 6).map_err(|e| e.to_string())?;
    check(w.stabilized_at.is_none(), format!("chain stabilized at {:?}", w.stabilized_at))?;

    // sofic_equal against languages computed from the levels themselves
    let mut pairs = 0;
    for (sys, depth) in [(&stable, 3), (chain, 6)] {
        let mut images: Vec<(SoficPresentation, Vec<BTreeSet<Vec<usize>>>)> = Vec::new();
        for n in 1..=depth {
            let m = sys.composite(1, n).unwrap();
            let p = image_sofic(&sys.levels[n - 1], &m).unwrap();
            let langs = (1..=10)
                .map(|l| z_language(&sys.levels[n - 1], l).unwrap().iter().map(|w| w.iter().map(|&a| m.apply(a)).collect()).collect())
                .collect();
            images.push((p, langs));
        }
        for (p, lp) in &images {
            for (q, lq) in &images {
                let equal = sofic_equal(p, q).map_err(|e| e.to_string())?;
                check(equal == (lp == lq), "sofic_equal disagrees with languages up to length 10")?;
                pairs += 1;
            }
        }
    }
    Ok(format!("stabilized at 2; chain unstabilized through 6; {pairs} equality verdicts cross-checked"))
}

fn criterion_11() -> Outcome {
    for m in 0..16 {
        let omega: Vec<u8> = (0..4).map(|i| 1 + ((m >> i) & 1) as u8).collect();
        let w = generate(&omega, 0, 80).map_err(|e| e.to_string())?;
        let r = recover(&w, 4).map_err(|e| e.to_string())?;
        check(r.complete && r.omega == omega, format!("{omega:?} recovered as {:?}", r.omega))?;
        check(periodicity_check(&w).iter().all(|p| p.1), format!("{omega:?} not periodic"))?;
    }
    let w = generate(&[1, 1, 1], 0, 8).map_err(|e| e.to_string())?;
    check(w.values == [1, 3, 1, 1, 3, 3, 1, 3, 1], format!("{:?}", w.values))?;
    Ok("16 prefixes recovered, periodic, first values match".into())
}

fn even_word(w: &[usize]) -> bool {
    // every run of 1s with a 0 on both sides has even length
    let mut i = 0;
    while i < w.len() {
        if w[i] == 1 {
            let j = (i..w.len()).find(|&j| w[j] == 0).unwrap_or(w.len());
            if i > 0 && j < w.len() && (j - i) % 2 == 1 {
                return false;
            }
            i = j;
        } else {
            i += 1;
        }
    }
    true
}

fn criterion_12() -> Outcome {
    let a = SoficPresentation::new(letters(2), 2, [(0, 0, 0), (0, 1, 1), (1, 0, 1)]).unwrap();
    let b = SoficPresentation::new(letters(2), 3, [(0, 0, 0), (0, 1, 1), (1, 2, 1), (2, 0, 0), (2, 1, 1)]).unwrap();
    check(a != b, "presentations are not distinct")?;
    let (ca, cb) = (canonical_form(&a), canonical_form(&b));
    check(ca == cb, "canonical forms differ")?;
    check(canonical_form(&ca) == ca, "canonical form is not idempotent")?;
    for n in 1..=10 {
        let brute: BTreeSet<Vec<usize>> = binary_words(n).filter(|w| even_word(w)).collect();
        check(ca.language(n) == brute && a.language(n) == brute && b.language(n) == brute, format!("length {n}"))?;
    }
    Ok(format!("canonical form has {} states", ca.vertex_count()))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome, u64);
    let criteria: [Criterion; 12] = [
        ("golden mean language counts", criterion_1, 1),
        ("isolated example and its image", criterion_2, 1),
        ("full shift not isolated", criterion_3, 5),
        ("free product ball patterns", criterion_4, 5),
        ("automaton suite", criterion_5, 50),
        ("case 1 over Z/3", criterion_6, 1),
        ("case 2 languages", criterion_7, 10),
        ("NMC consistency", criterion_8, 60),
        ("golden mean shadowing", criterion_9, 30),
        ("Mittag-Leffler checks", criterion_10, 30),
        ("Toeplitz coding", criterion_11, 1),
        ("even shift canonical form", criterion_12, 1),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let result = panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or("panic".into()))
        });
        let took = started.elapsed();
        let result = match result {
            Ok(_) if took > Duration::from_secs(*limit) => Err(format!("took {took:.2?}, limit {limit}s")),
            r => r,
        };
        match result {
            Ok(detail) => println!("criterion {:2} PASS {name}: {detail} ({took:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:2} FAIL {name}: {why} ({took:.2?})", i + 1);
            }
        }
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
