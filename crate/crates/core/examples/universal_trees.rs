//! Sizes of universal trees: lower bounds, the succinct construction and exact minima.

use paritysep::trees::{is_universal, min_universal, size_bounds, succinct_leaves, succinct_tree};
use paritysep::Limits;

pub fn run_example() {
    println!("{:>3} {:>2} {:>6} {:>6} {:>9} {:>10}", "l", "h", "g", "binom", "succinct", "jl_upper");
    for (l, h) in [(2, 2), (4, 2), (8, 3), (16, 3), (64, 4)] {
        let b = size_bounds(l, h).unwrap();
        println!(
            "{l:>3} {h:>2} {:>6} {:>6} {:>9} {:>10}",
            b.g,
            b.binom_lower,
            succinct_leaves(l, h),
            b.jl_upper
        );
    }

    let limits = Limits::default();
    for (l, h) in [(2, 2), (3, 2), (4, 2)] {
        let m = min_universal(l, h, &limits).unwrap();
        println!("smallest ({l},{h})-universal tree: {} leaves, {}", m.size, serde_json::to_string(&m.witness).unwrap());
    }

    let t = succinct_tree(4, 2).unwrap();
    assert!(is_universal(&t, 4, 2, &limits).unwrap());
    println!("succinct (4,2) tree has {} leaves and is universal", t.size());
}

#[allow(dead_code)]
fn main() {
    run_example();
}
