macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        #[path = $file]
        mod $name;

        #[test]
        fn $name() {
            $name::run_example();
        }
    };
}

example!(solve_game, "../examples/solve_game.rs");
example!(universal_trees, "../examples/universal_trees.rs");
example!(separators, "../examples/separators.rs");
example!(register_product, "../examples/register_product.rs");
example!(lower_bound, "../examples/lower_bound.rs");
example!(adversarial_family, "../examples/adversarial_family.rs");
