//! Parse a PGSolver game and solve it with every algorithm.

use paritysep::automata::{counter_separator, tree_separator};
use paritysep::pgsolver::parse_pgsolver;
use paritysep::solvers::{lift_solve, solve_by_separation, verify_solution, zielonka};
use paritysep::trees::{full_tree, succinct_tree};
use paritysep::{Limits, Player};

const GAME: &str = "parity 4;
0 2 0 1,2;
1 3 1 0,3;
2 1 1 2,4;
3 4 0 3;
4 1 0 1;
";

pub fn run_example() {
    let g = parse_pgsolver(GAME).expect("valid game");
    let (n, d) = (g.num_vertices(), g.bound());
    let h = (d / 2) as usize;

    let z = zielonka(&g);
    assert!(verify_solution(&g, &z));
    println!("zielonka         {:?}", z.winner);

    for (name, a) in [
        ("counter", counter_separator(n, d).unwrap()),
        ("succinct tree", tree_separator(&succinct_tree(n, h).unwrap(), d).unwrap()),
    ] {
        let s = solve_by_separation(&g, &a, &Limits::default()).unwrap();
        assert_eq!(s.solution.winner, z.winner);
        println!("separation/{name:<14} {:?} ({} product states)", s.solution.winner, s.product_states);
    }

    for (name, t) in [("full", full_tree(n, h).unwrap()), ("succinct", succinct_tree(n, h).unwrap())] {
        let r = lift_solve(&g, &t).unwrap();
        assert_eq!(r.solution.winner, z.winner);
        println!("lifting/{name:<9} {:?} ({} lifts)", r.solution.winner, r.lift_count);
    }

    let even: Vec<usize> = z.region(Player::Even);
    println!("Even wins from {even:?}");
}

#[allow(dead_code)]
fn main() {
    run_example();
}
