//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always show up in the output.

use std::time::{Duration, Instant};

use paritysep::automata::{counter_separator, register_product, tree_separator, SafetyAutomaton};
use paritysep::game::is_even_graph;
use paritysep::generate::{random_game, GameParams};
use paritysep::lowerbound::{
    alpha_word, build_gt, d_tree, extract_decomposition, validate_separator, Extraction, ValidationConfig, Verdict,
};
use paritysep::solvers::{lift_solve, solve_by_separation, verify_region, verify_solution, zielonka};
use paritysep::trees::{
    full_tree, is_universal, min_universal_size, size_bounds, succinct_leaves, succinct_tree, OrderedTree, Shape,
};
use paritysep::{Limits, ParityGame, Player, Priority};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    // Pascal's triangle, independent of the library's multiplicative formula.
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row[k as usize]
}

fn lg(l: usize) -> u64 {
    let mut k = 0;
    while (2usize << k) <= l {
        k += 1;
    }
    k
}

fn g_naive(l: usize, h: usize, memo: &mut std::collections::HashMap<(usize, usize), u128>) -> u128 {
    if h == 1 || l <= 1 {
        return l as u128;
    }
    if let Some(&v) = memo.get(&(l, h)) {
        return v;
    }
    let v = (1..=l).map(|delta| g_naive(l / delta, h - 1, memo)).sum();
    memo.insert((l, h), v);
    v
}

fn criterion_1() -> Outcome {
    let mut memo = Default::default();
    for l in 1..=64 {
        for h in 1..=4 {
            let b = size_bounds(l, h).map_err(|e| e.to_string())?;
            let g = g_naive(l, h, &mut memo);
            let c = binom(lg(l) + h as u64 - 1, h as u64 - 1);
            if b.g != g || b.binom_lower != c || b.g < b.binom_lower {
                return Err(format!("({l},{h}): g={} oracle={g}, binom={} oracle={c}", b.g, b.binom_lower));
            }
        }
    }
    Ok("256 (ℓ,h) pairs".into())
}

fn criterion_2() -> Outcome {
    let mut memo = Default::default();
    let mut rows = Vec::new();
    for l in 1..=5 {
        for h in 1..=3 {
            let m = min_universal_size(l, h).map_err(|e| e.to_string())? as u128;
            let g = g_naive(l, h, &mut memo);
            let s = succinct_leaves(l, h);
            if !(g <= m && m <= s) {
                return Err(format!("({l},{h}): g={g} min={m} succinct={s}"));
            }
            rows.push(format!("{l},{h}:{m}"));
        }
    }
    let m22 = min_universal_size(2, 2).map_err(|e| e.to_string())?;
    if m22 != 3 {
        return Err(format!("min(2,2) = {m22}"));
    }
    Ok(format!("minima {}", rows.join(" ")))
}

fn criterion_3() -> Outcome {
    let mut truncated = 0;
    let mut runs = 0;
    for n in 1..=4 {
        for d in [2, 4, 6] {
            let seps = [
                ("counter", counter_separator(n, d)),
                ("tree", succinct_tree(n, (d / 2) as usize).and_then(|t| tree_separator(&t, d))),
            ];
            for (name, a) in seps {
                let a = a.map_err(|e| e.to_string())?;
                let mut cfg = ValidationConfig::new(n, d);
                cfg.lassos = 1000;
                cfg.budget = 1_000_000;
                let report = validate_separator(&a, &cfg).map_err(|e| e.to_string())?;
                runs += 1;
                if report.verdict == Verdict::Fail || !report.witnesses.is_empty() {
                    return Err(format!("{name}({n},{d}): {:?}", report.witnesses.first()));
                }
                truncated += report.sections.iter().map(|s| s.truncated).sum::<u64>();
            }
        }
    }
    Ok(format!("{runs} separators, 0 counterexamples, {truncated} streams cut at the budget"))
}

fn random_params(rng: &mut ChaCha8Rng, n_max: usize, d_choices: &[Priority]) -> GameParams {
    GameParams {
        n: rng.random_range(1..=n_max),
        d: d_choices[rng.random_range(0..d_choices.len())],
        max_out: rng.random_range(1..=3),
    }
}

fn check_separation(g: &ParityGame, a: &SafetyAutomaton, reference: &[Player], what: &str) -> Result<(), String> {
    let s = solve_by_separation(g, a, &Limits::default()).map_err(|e| format!("{what}: {e}"))?;
    if s.solution.winner != reference {
        return Err(format!("{what}: winners differ"));
    }
    let odd = s.solution.odd_strategy.as_ref().ok_or(format!("{what}: no Odd strategy"))?;
    if !verify_region(g, &s.solution.winner, Player::Odd, odd) {
        return Err(format!("{what}: Odd strategy does not verify"));
    }
    Ok(())
}

fn check_lifting(g: &ParityGame, t: &OrderedTree, reference: &[Player], what: &str) -> Result<(), String> {
    let r = lift_solve(g, t).map_err(|e| format!("{what}: {e}"))?;
    if r.solution.winner != reference {
        return Err(format!("{what}: winners differ"));
    }
    let even = r.solution.even_strategy.as_ref().ok_or(format!("{what}: no Even strategy"))?;
    if !verify_region(g, &r.solution.winner, Player::Even, even) {
        return Err(format!("{what}: Even strategy does not verify"));
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut vertices = 0;
    for i in 0..500 {
        let params = random_params(&mut rng, 30, &[2, 4, 6, 8]);
        let g = random_game(&params, &mut rng).map_err(|e| e.to_string())?;
        let (n, d, h) = (params.n, params.d, (params.d / 2) as usize);
        vertices += n;
        let z = zielonka(&g);
        let fail = |m: String| format!("game {i} (n={n}, d={d}): {m}");
        if !verify_solution(&g, &z) {
            return Err(fail("zielonka certificate rejected".into()));
        }
        let counter = counter_separator(n, d).map_err(|e| e.to_string())?;
        let succinct = succinct_tree(n, h).map_err(|e| e.to_string())?;
        let tree = tree_separator(&succinct, d).map_err(|e| e.to_string())?;
        let full = full_tree(n, h).map_err(|e| e.to_string())?;
        check_separation(&g, &counter, &z.winner, "sep-counter").map_err(fail)?;
        check_separation(&g, &tree, &z.winner, "sep-tree").map_err(fail)?;
        check_lifting(&g, &full, &z.winner, "lift-full").map_err(fail)?;
        check_lifting(&g, &succinct, &z.winner, "lift-succinct").map_err(fail)?;
    }
    Ok(format!("500 games, {vertices} vertices, 0 divergences"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut products = std::collections::BTreeMap::new();
    for i in 0..100 {
        let params = random_params(&mut rng, 3, &[2, 4]);
        let g = random_game(&params, &mut rng).map_err(|e| e.to_string())?;
        let key = (params.n, params.d);
        if let std::collections::btree_map::Entry::Vacant(e) = products.entry(key) {
            e.insert(register_product(params.n, params.d).map_err(|e| e.to_string())?);
        }
        let z = zielonka(&g);
        check_separation(&g, &products[&key].automaton, &z.winner, "sep-register")
            .map_err(|m| format!("game {i} (n={}, d={}): {m}", params.n, params.d))?;
    }
    let sizes: Vec<String> = products
        .iter()
        .map(|((n, d), p)| format!("({n},{d}):{}", p.automaton.num_states()))
        .collect();
    Ok(format!("100 games, 0 divergences, product sizes {}", sizes.join(" ")))
}

fn criterion_6() -> Outcome {
    let mut lines = Vec::new();
    for n in [2, 3, 4] {
        for d in [2, 4] {
            let h = (d / 2) as usize;
            let builtins: Vec<(&str, SafetyAutomaton)> = vec![
                ("counter", counter_separator(n, d).map_err(|e| e.to_string())?),
                ("tree", tree_separator(&succinct_tree(n, h).unwrap(), d).map_err(|e| e.to_string())?),
                ("full-tree", tree_separator(&full_tree(n, h).unwrap(), d).map_err(|e| e.to_string())?),
                ("register", register_product(n, d).map_err(|e| e.to_string())?.automaton),
            ];
            for (name, a) in builtins {
                let what = format!("{name}({n},{d})");
                let a = paritysep::lowerbound::make_accessible(&a);
                let dec = match extract_decomposition(&a, d).map_err(|e| format!("{what}: {e}"))? {
                    Extraction::Decomposition(dec) => dec,
                    Extraction::NotSeparator(w) => return Err(format!("{what}: odd cycle {:?}", w.lasso)),
                };
                dec.verify(&a).map_err(|e| format!("{what}: {e}"))?;
                let dt = d_tree(&dec);
                let l = dt.tree.size();
                let q = (0..a.num_states()).filter(|&s| !a.is_rejecting(s)).count();
                let b = binom(lg(n) + h as u64 - 1, lg(n));
                if l > q || (l as u128) < b {
                    return Err(format!("{what}: L={l} Q={q} B={b}"));
                }
                if !is_universal(&dt.tree, n, h, &Limits::default()).map_err(|e| e.to_string())? {
                    return Err(format!("{what}: D-tree is not universal"));
                }
                lines.push(format!("{what}:L={l}"));
            }
        }
    }
    Ok(lines.join(" "))
}

fn criterion_7() -> Outcome {
    let c24 = counter_separator(2, 4).map_err(|e| e.to_string())?;
    if c24.num_states() != 10 {
        return Err(format!("counter(2,4) has {} states", c24.num_states()));
    }
    let c22 = counter_separator(2, 2).map_err(|e| e.to_string())?;
    let Extraction::Decomposition(dec) = extract_decomposition(&c22, 2).map_err(|e| e.to_string())? else {
        return Err("counter(2,2) is not a separator".into());
    };
    let classes = &dec.level(1).classes;
    let names: Vec<Vec<String>> = classes.iter().map(|c| c.iter().map(|&q| c22.state_name(q)).collect()).collect();
    if names != [["<0>"], ["<1>"], ["<2>"]] || d_tree(&dec).tree.size() != 3 {
        return Err(format!("counter(2,2) classes {names:?}"));
    }
    let flat: Shape = serde_json::from_str("[[],[]]").unwrap();
    let u22 = tree_separator(&OrderedTree::from_shape(&flat), 2).map_err(|e| e.to_string())?;
    let table: Vec<String> = (0..u22.num_states())
        .flat_map(|q| (1..=2).map(move |p| (q, p)))
        .map(|(q, p)| format!("{}-{p}->{}", u22.state_name(q), u22.state_name(u22.delta(q, p))))
        .collect();
    let expected = [
        "<0>-1->reject",
        "<0>-2-><1>",
        "<1>-1-><0>",
        "<1>-2-><1>",
        "reject-1->reject",
        "reject-2->reject",
    ];
    if table != expected || u22.state_name(u22.initial()) != "<1>" {
        return Err(format!("U(2,2) table {table:?}"));
    }
    Ok("counter(2,4)=10 states, classes ⟨0⟩≺⟨1⟩≺⟨2⟩, U(2,2) table exact".into())
}

/// Expands templates like `((1·2)^r·3)^r` with `r` substituted.
fn expand_template(s: &str, r: usize) -> Vec<Priority> {
    fn seq(s: &[char], i: &mut usize, r: usize) -> Vec<Priority> {
        let mut out = Vec::new();
        while *i < s.len() && s[*i] != ')' {
            let mut item = match s[*i] {
                '(' => {
                    *i += 1;
                    let inner = seq(s, i, r);
                    *i += 1;
                    inner
                }
                '·' => {
                    *i += 1;
                    continue;
                }
                c => {
                    *i += 1;
                    vec![c.to_digit(10).expect("digit") as Priority]
                }
            };
            if s.get(*i) == Some(&'^') {
                *i += 2;
                item = item.repeat(r);
            }
            out.extend(item);
        }
        out
    }
    let chars: Vec<char> = s.chars().collect();
    seq(&chars, &mut 0, r)
}

fn criterion_8() -> Outcome {
    let shape: Shape = serde_json::from_str("[[[[],[],[]],[[]]],[[[],[]],[[],[]]]]").unwrap();
    let t = OrderedTree::from_shape(&shape);
    let g = build_gt(&t, 6).map_err(|e| e.to_string())?;
    let has = |s: usize, u: usize, p: Priority| g.out_edges(s).iter().any(|e| e.dst == u && e.pri == p);
    // Vertices v_1..v_8 are 0..7.
    let block = (4..8).all(|s| (0..4).all(|u| has(s, u, 5)));
    if !(t.size() == 8 && has(7, 6, 1) && has(6, 7, 2) && block && is_even_graph(&g)) {
        return Err("labelled edges of the tree graph differ".into());
    }
    let template = "((1·2)^r·3·(1·2)^r·4)^r·5·((2)^r·3·(1·1·2)^r·4)^r";
    let expected: String = expand_template(template, 2).iter().map(|p| p.to_string()).collect();
    let got: String = alpha_word(&t, 6, 2)
        .map_err(|e| e.to_string())?
        .take(expected.len() + 3)
        .map(|s| s.letter.to_string())
        .collect();
    if got != format!("{expected}222") {
        return Err(format!("stream {got} vs template {expected}"));
    }
    Ok(format!("{} letters equal, tail 2^ω", expected.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 8] = [
        ("bound tables", criterion_1, Duration::from_secs(1)),
        ("brute-force minima", criterion_2, Duration::from_secs(120)),
        ("separator soundness", criterion_3, Duration::from_secs(300)),
        ("differential solving", criterion_4, Duration::from_secs(600)),
        ("register pipeline", criterion_5, Duration::from_secs(600)),
        ("lower-bound pipeline", criterion_6, Duration::from_secs(300)),
        ("exact small values", criterion_7, Duration::from_secs(60)),
        ("adversarial family", criterion_8, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if took <= *limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; over time limit {limit:?}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {} [{name}]: {status} in {:.2?} (limit {limit:?}): {detail}", i + 1, took);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
