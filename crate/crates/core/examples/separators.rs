//! Build the counter and tree separators and validate them on test words.

use paritysep::automata::{counter_separator, tree_separator};
use paritysep::lowerbound::{validate_separator, ValidationConfig, Verdict};
use paritysep::trees::succinct_tree;
use paritysep::Lasso;

pub fn run_example() {
    let (n, d) = (3, 4);
    let counter = counter_separator(n, d).unwrap();
    let tree = tree_separator(&succinct_tree(n, (d / 2) as usize).unwrap(), d).unwrap();

    let even = Lasso::new(vec![3, 1], vec![1, 2, 4]).unwrap();
    let odd = Lasso::periodic(vec![2, 3]).unwrap();
    for (name, a) in [("counter", &counter), ("tree", &tree)] {
        println!(
            "{name}: {} states, accepts {:?}: {}, accepts {:?}: {}",
            a.num_states(),
            even.period,
            a.accepts_lasso(&even).unwrap(),
            odd.period,
            a.accepts_lasso(&odd).unwrap()
        );
        let report = validate_separator(a, &ValidationConfig { lassos: 200, ..ValidationConfig::new(n, d) }).unwrap();
        for s in &report.sections {
            println!("  {:<22} {:?} ({} checked)", s.name, s.verdict, s.checked);
        }
        assert_eq!(report.verdict, Verdict::Pass);
    }

    // A counter built for fewer vertices rejects a cycle of an n-vertex even graph.
    let small = counter_separator(1, d).unwrap();
    let report = validate_separator(&small, &ValidationConfig { lassos: 200, ..ValidationConfig::new(n, d) }).unwrap();
    println!("counter(1,{d}) against n = {n}: {:?}", report.verdict);
    if let Some(w) = report.witnesses.first() {
        println!("  {}", w.description);
    }
}

#[allow(dead_code)]
fn main() {
    run_example();
}
