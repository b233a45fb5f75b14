mod support;

use monadwl_core::{parse, print, print_pretty, Expr};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn symbol() -> impl Strategy<Value = Expr> {
    prop_oneof![
        prop::sample::select(vec![
            "a",
            "f",
            "List",
            "Rule",
            "LeftArrow",
            "Set",
            "SetDelayed",
            "Pattern",
            "Blank",
            "BlankNullSequence",
            "RepeatedNull",
            "Except",
            "Function",
            "do",
        ])
        .prop_map(Expr::sym),
        "[a-zA-Z][a-zA-Z0-9]{0,6}".prop_map(|s| Expr::sym(&s)),
    ]
}

fn atom() -> impl Strategy<Value = Expr> {
    prop_oneof![
        4 => symbol(),
        2 => any::<i64>().prop_map(Expr::int),
        1 => any::<String>().prop_map(|s| Expr::string(&s)),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    atom().prop_recursive(5, 64, 4, |inner| {
        (
            prop_oneof![4 => symbol(), 1 => inner.clone()],
            prop::collection::vec(inner, 0..4),
        )
            .prop_map(|(head, args)| Expr::compound(head, args))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn print_then_parse_is_identity(e in expr()) {
        let text = print(&e);
        prop_assert_eq!(parse(&text).unwrap(), e.clone(), "text: {}", text);
        prop_assert_eq!(parse(&print_pretty(&e, 20)).unwrap(), e);
    }

    #[test]
    fn printing_is_a_fixed_point(e in expr()) {
        let once = print(&e);
        prop_assert_eq!(print(&parse(&once).unwrap()), once);
    }
}

#[test]
fn ten_thousand_generated_expressions() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let e = support::random_expr(&mut rng, 6);
        let text = print(&e);
        assert!(e.depth() <= 6);
        assert_eq!(parse(&text).unwrap(), e, "text: {text}");
    }
}
