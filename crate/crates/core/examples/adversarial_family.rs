//! The even graph of an ordered tree and the adversarial word walking through it.

use paritysep::game::is_even_graph;
use paritysep::lowerbound::{alpha_len, alpha_word, build_gt};
use paritysep::trees::{OrderedTree, Shape};

pub fn run_example() {
    let shape: Shape = serde_json::from_str("[[[[],[],[]],[[]]],[[[],[]],[[],[]]]]").unwrap();
    let t = OrderedTree::from_shape(&shape);
    let g = build_gt(&t, 6).unwrap();
    assert!(is_even_graph(&g));
    println!("{} vertices, {} edges", g.num_vertices(), g.edges().len());
    for e in g.out_edges(7).iter().filter(|e| e.src != e.dst) {
        println!("  v8 -> v{} priority {}", e.dst + 1, e.pri);
    }

    for r in 1..=3 {
        let len = alpha_len(&t, r);
        let word: String = alpha_word(&t, 6, r)
            .unwrap()
            .take(len.min(60) as usize)
            .map(|s| char::from_digit(s.letter, 10).unwrap())
            .collect();
        println!("r={r}: |alpha| = {len}, starts {word}");
    }

    let path: Vec<usize> = alpha_word(&t, 6, 1).unwrap().take(12).map(|s| s.to + 1).collect();
    println!("vertices visited: {path:?}");
}

#[allow(dead_code)]
fn main() {
    run_example();
}
