//! Extract the tree hidden in a separator and compare it with the lower bounds.

use paritysep::automata::{counter_separator, tree_separator};
use paritysep::lowerbound::{d_tree, extract_decomposition, lower_bound_report, Extraction};
use paritysep::trees::succinct_tree;
use paritysep::Limits;

pub fn run_example() {
    let c = counter_separator(2, 2).unwrap();
    if let Extraction::Decomposition(dec) = extract_decomposition(&c, 2).unwrap() {
        for class in &dec.level(1).classes {
            let names: Vec<String> = class.iter().map(|&q| c.state_name(q)).collect();
            println!("level 1 class {names:?}");
        }
        println!("tree: {}", serde_json::to_string(&d_tree(&dec).tree.to_shape()).unwrap());
    }

    let (n, d) = (4, 4);
    let a = tree_separator(&succinct_tree(n, 2).unwrap(), d).unwrap();
    let report = lower_bound_report(&a, n, d, &Limits::default()).unwrap();
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
}

#[allow(dead_code)]
fn main() {
    run_example();
}
