//! Solve games through the register automaton composed with a tree separator.

use paritysep::automata::register_product;
use paritysep::generate::{random_game_seeded, GameParams};
use paritysep::solvers::{solve_by_separation, zielonka};
use paritysep::Limits;

pub fn run_example() {
    for (n, d) in [(2, 2), (2, 4), (3, 4)] {
        let p = register_product(n, d).unwrap();
        println!(
            "n={n} d={d}: {} register states, inner separator for n'={} d'={} ({} leaves), product {} states",
            p.register_states,
            p.inner_n,
            p.inner_d,
            p.inner_leaves,
            p.automaton.num_states()
        );
        for seed in 0..5 {
            let g = random_game_seeded(&GameParams { n, d, max_out: 2 }, seed).unwrap();
            let s = solve_by_separation(&g, &p.automaton, &Limits::default()).unwrap();
            assert_eq!(s.solution.winner, zielonka(&g).winner);
        }
    }
    println!("all register-product solutions agree with zielonka");
}

#[allow(dead_code)]
fn main() {
    run_example();
}
