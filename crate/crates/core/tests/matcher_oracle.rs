mod support;

use monadwl_core::matcher::MatchCache;
use monadwl_core::{match_all, match_expr, matches, parse, Expr};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::{agree, all_patterns, all_subjects, random_pattern, random_subject};

fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

#[test]
fn every_depth_three_pattern_on_every_short_list() {
    let items = [Expr::sym("a"), Expr::int(1), p("{a}"), p("f[1]")];
    let subjects = all_subjects(&items, 4);
    let cache = MatchCache::new();
    let mut pairs = 0;
    let mut matched = 0;
    for pat in all_patterns(3) {
        for subject in &subjects {
            matched += agree(&pat, subject, &cache).unwrap();
            pairs += 1;
        }
    }
    assert_eq!(pairs, 19465 * 341);
    assert!(matched > pairs / 50, "{matched} of {pairs}");
}

#[test]
fn random_patterns_agree_with_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cache = MatchCache::new();
    let mut matched = 0;
    for _ in 0..6000 {
        let pat = random_pattern(&mut rng, 3);
        let subject = random_subject(&mut rng);
        matched += agree(&pat, &subject, &cache).unwrap();
    }
    assert!(
        matched > 600,
        "generator too rarely produces matches: {matched}"
    );
}

#[test]
fn hand_picked_pairs() {
    let cache = MatchCache::new();
    let cases = [
        ("{x___, y___}", "{1, 2, 3}"),
        ("{x___, x___}", "{1, 2, 1, 2}"),
        ("{x_, x_...}", "{a, a, a}"),
        ("{x_...}", "{a, 1}"),
        ("{x_Integer...}", "{1, 1}"),
        ("{___, x_, ___}", "{a, 1, 2}"),
        ("{Except[_Integer]...}", "{a, {}, 1}"),
        ("f[x___, y_]", "f[1, 2]"),
        ("x_[y_]", "f[1]"),
        ("{x___List, ___}", "{{}, {a}, 1}"),
        ("{x : {___}, y_}", "{{a}, 1}"),
        ("{Except[x_]}", "{a}"),
    ];
    for (pat, subject) in cases {
        agree(&p(pat), &p(subject), &cache).unwrap();
    }
}

#[test]
fn move_pattern_accepts_the_empty_list() {
    let mv = p("{{_ -> _, {_List, _List, _List}}...}");
    assert!(matches(&mv, &p("{}")));
    assert!(matches(&mv, &p("{{1 -> 2, {{}, {1}, {}}}}")));
    assert!(!matches(&mv, &p("{{1 -> 2, {{}, {1}}}}")));
    assert!(matches(
        &p("{RepeatedNull[_Integer -> _Integer]}"),
        &p("{}")
    ));
}

#[test]
fn shortest_split_comes_first() {
    let b = match_expr(&p("{x___, y___}"), &p("{1, 2}")).unwrap();
    assert_eq!(b.get("x"), Some(&monadwl_core::Capture::Seq(vec![])));
    let all = match_all(&p("{x___, y___}"), &p("{1, 2}")).unwrap();
    assert_eq!(all.len(), 3);
}
