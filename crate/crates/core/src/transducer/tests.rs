use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::*;
use crate::dtta::{dtta_equiv, Dtta};
use crate::tree::{all_trees, Tree};

const PRODUCT: &str = include_str!("../../data/product.tdx");
const INTRO_M: &str = include_str!("../../data/intro_m.tdx");
const INTRO_M_PRIME: &str = include_str!("../../data/intro_m_prime.tdx");

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn chain(n: usize, m: usize) -> String {
    let a = |k: usize| format!("{}(e){}", "(a ".repeat(k), ")".repeat(k));
    format!("(f {} {})", a(n), a(m))
}

#[test]
fn product_law() {
    let m = Transducer::parse(PRODUCT).unwrap();
    for (n, k, want) in [(2, 3, 6), (4, 5, 20)] {
        let t = Tree::parse(&chain(n, k), m.input()).unwrap();
        assert_eq!(m.eval_unary(0, &t, &[q(0)]).unwrap(), Some(q(want)));
    }
    let e = Tree::parse("(e)", m.input()).unwrap();
    assert_eq!(m.eval_unary(1, &e, &[q(7)]).unwrap(), Some(q(0)));
    assert_eq!(m.eval_unary(0, &e, &[q(7)]).unwrap(), None);
    assert!(m.eval_unary(0, &e, &[]).is_err());
}

#[test]
fn intro_pair_agrees() {
    let m = Transducer::parse(INTRO_M).unwrap();
    let mp = Transducer::parse(INTRO_M_PRIME).unwrap();
    let t = Tree::parse("(f e e e)", m.input()).unwrap();
    let w = mp.translate_string(&t).unwrap().unwrap();
    assert_eq!(word_to_string(mp.output(), &w), "abababab");
    assert_eq!(m.translate_string(&t).unwrap().unwrap(), w);
    for t in all_trees(m.input(), 3) {
        assert_eq!(m.translate_string(&t).unwrap(), mp.translate_string(&t).unwrap());
    }
}

#[test]
fn missing_rule_is_undefined() {
    let m = Transducer::parse(
        "(transducer (mode string) (alphabet (g 1) (e 0)) (output a)
           (states q r) (init q)
           (rule q g (x1) (out a) (call r x1))
           (rule q e () (out a)))",
    )
    .unwrap();
    let t = Tree::parse("(g e)", m.input()).unwrap();
    assert_eq!(m.translate_string(&t).unwrap(), None);
}

#[test]
fn discarded_undefined_argument_is_still_undefined() {
    // the parameter is never used, but its value must exist
    let m = Transducer::parse(
        "(transducer (mode numeric) (params 1) (alphabet (g 1) (e 0))
           (states q r) (init q)
           (rule q g (x1) (call q x1 (call r x1 (const 0))))
           (rule q e () (const 3)))",
    )
    .unwrap();
    let t = Tree::parse("(g e)", m.input()).unwrap();
    assert_eq!(m.eval_unary(0, &t, &[q(0)]).unwrap(), None);
}

#[test]
fn sizes_and_constants() {
    let m = Transducer::parse(
        "(transducer (mode numeric) (params 2) (alphabet (g 1)) (states q) (init q)
           (rule q g (x1) (add (const 2) (mul 3 (call q x1 (const 1) (const 0))))))",
    )
    .unwrap();
    let g = m.input().lookup("g").unwrap();
    assert_eq!(m.rule(0, g).unwrap().size(), 8);
    assert_eq!(m.h(), BigInt::from(3));
}

#[test]
fn classification() {
    let c = Transducer::parse(PRODUCT).unwrap().classify();
    assert!(c.non_self_nested && c.linear && c.unary_output && !c.total && !c.monadic_input);

    let nested = Transducer::parse(
        "(transducer (mode numeric) (params 1) (alphabet (g 1) (e 0)) (states q) (init q)
           (rule q g (x1) (call q x1 (call q x1 (param 1))))
           (rule q e () (param 1)))",
    )
    .unwrap()
    .classify();
    assert!(!nested.non_self_nested && nested.total && nested.monadic_input);

    assert!(!Transducer::parse(INTRO_M).unwrap().classify().linear);
}

#[test]
fn domain_automata() {
    let m = Transducer::parse(PRODUCT).unwrap();
    let a = m.domain_automaton(0);
    let expected = Dtta::parse(include_str!("../../data/product.dtta"), None).unwrap();
    assert!(dtta_equiv(&a, &expected).unwrap());
    assert_eq!(a.num_states(), 2);

    let total = m.totalize();
    assert!(total.is_total());
    let u = Dtta::universal(m.input());
    assert!(dtta_equiv(&total.domain_automaton(0), &u).unwrap());

    let empty = Transducer::parse(
        "(transducer (mode numeric) (alphabet (g 1) (e 0)) (states q r) (init q)
           (rule r e () (const 1)))",
    )
    .unwrap();
    assert!(empty.domain_automaton(0).is_empty());
}

#[test]
fn totalize_extends_without_changing_domain_outputs() {
    let m = Transducer::parse(PRODUCT).unwrap();
    let t = m.totalize();
    let f = m.input().lookup("f").unwrap();
    let a = m.input().lookup("a").unwrap();
    assert_eq!(t.rule(0, a), Some(&Rhs::constant(0)));
    assert_eq!(t.rule(1, f), Some(&Rhs::constant(0)));
    assert_eq!(t.totalize(), t);
    for tree in all_trees(m.input(), 3) {
        if let Some(v) = m.translate_unary(&tree).unwrap() {
            assert_eq!(t.translate_unary(&tree).unwrap(), Some(v));
        }
    }
}

#[test]
fn binarize_ternary_rule() {
    let m = Transducer::parse(
        "(transducer (mode numeric) (params 1) (alphabet (f 3) (e 0)) (states q) (init q)
           (rule q f (x1 x2 x3) (call q x1 (call q x2 (call q x3 (param 1)))))
           (rule q e () (add (param 1) (const 1))))",
    )
    .unwrap();
    let b = m.binarize().unwrap();
    let bt = &b.transducer;
    assert_eq!(bt.num_states(), 3);
    let f = bt.input().lookup("f").unwrap();
    // <q,1>(f(x1,x2)) -> <q,1>(x1, <q,2>(x1, <q,3>(x1, y1)))
    assert_eq!(
        bt.rule(b.state(0, 1), f),
        Some(&Rhs::call(0, 0, vec![Rhs::call(1, 0, vec![Rhs::call(2, 0, vec![Rhs::Param(0)])])]))
    );
    assert_eq!(bt.rule(b.state(0, 3), f), Some(&Rhs::call(1, 1, vec![Rhs::Param(0)])));
    for t in all_trees(m.input(), 3) {
        let e = b.encode(&t);
        assert!(b.checker.accepts(1, &e).unwrap());
        assert_eq!(b.decode(&e), Some(t.clone()));
        assert_eq!(
            bt.eval_unary(bt.initial(), &e, &[q(2)]).unwrap(),
            m.eval_unary(0, &t, &[q(2)]).unwrap()
        );
    }
}

#[test]
fn binarize_nullary_only() {
    let m = Transducer::parse(
        "(transducer (mode string) (alphabet (e 0)) (output a) (states q) (init q)
           (rule q e () (out a) (out a)))",
    )
    .unwrap();
    let b = m.binarize().unwrap();
    let t = Tree::parse("(e)", m.input()).unwrap();
    let e = b.encode(&t);
    assert_eq!(e.display(b.transducer.input()).to_string(), "(e (⊥) (⊥))");
    assert_eq!(
        b.transducer.translate_string(&e).unwrap(),
        m.translate_string(&t).unwrap()
    );
}

#[test]
fn unarize_encodes_in_base_s_plus_one() {
    let m = Transducer::parse(
        "(transducer (mode string) (alphabet (e 0)) (output a b) (states q) (init q)
           (rule q e () (out a) (out b)))",
    )
    .unwrap();
    let n = m.unarize().unwrap();
    let e = Tree::parse("(e)", m.input()).unwrap();
    assert_eq!(n.eval_unary(0, &e, &[q(0)]).unwrap(), Some(q(21)));

    let mp = Transducer::parse(INTRO_M_PRIME).unwrap();
    let np = mp.unarize().unwrap();
    let t = Tree::parse("(f e e e)", mp.input()).unwrap();
    // abababab with a=1, b=2 in base 3, least significant letter first at 3^1
    let want: i64 = (1..=8).map(|j| if j % 2 == 1 { 3i64.pow(j) } else { 2 * 3i64.pow(j) }).sum();
    assert_eq!(np.eval_unary(0, &t, &[q(0)]).unwrap(), Some(q(want)));
    assert!(np.classify().non_self_nested == mp.classify().linear || !mp.classify().linear);

    assert!(Transducer::parse(PRODUCT).unwrap().unarize().is_err());
}

#[test]
fn unarize_of_linear_is_non_self_nested() {
    let m = Transducer::parse(
        "(transducer (mode string) (alphabet (h 2) (e 0)) (output a b) (states q) (init q)
           (rule q h (x1 x2) (out a) (call q x2) (out b) (call q x1))
           (rule q e () (out b)))",
    )
    .unwrap();
    assert!(m.classify().linear);
    assert!(m.unarize().unwrap().classify().non_self_nested);
}

#[test]
fn symbol_semantics_matches_evaluation() {
    let m = Transducer::parse(PRODUCT).unwrap().totalize();
    for t in all_trees(m.input(), 4) {
        let v = m.semantics(&t).unwrap();
        for state in 0..2 {
            for y in [q(0), q(3)] {
                assert_eq!(Some(v.apply(state, &[y.clone()])), m.eval_unary(state, &t, &[y]).unwrap());
            }
        }
    }
}

#[test]
fn round_trip_text() {
    for src in [PRODUCT, INTRO_M, INTRO_M_PRIME] {
        let m = Transducer::parse(src).unwrap();
        assert_eq!(Transducer::parse(&m.to_string()).unwrap(), m);
    }
    let n = Transducer::parse(INTRO_M).unwrap().unarize().unwrap();
    assert_eq!(Transducer::parse(&n.to_string()).unwrap(), n);
}

#[test]
fn parse_errors() {
    assert!(Transducer::parse("(transducer (mode string) (states q) (init r))").is_err());
    let bad = Transducer::parse(
        "(transducer (mode numeric) (alphabet (g 1)) (states q) (init q)\n (rule q g (x1) (call q x2)))",
    );
    assert!(matches!(bad, Err(crate::error::Error::Parse { line: 2, .. })));
}

#[test]
fn projections_count_letters() {
    let m = Transducer::parse(INTRO_M).unwrap();
    let count_a = m.count_projection(&[BigInt::from(1), BigInt::zero()]).unwrap();
    for t in all_trees(m.input(), 3) {
        let w = m.translate_string(&t).unwrap().unwrap();
        let n = w.iter().filter(|&&x| x == 0).count() as i64;
        assert_eq!(count_a.translate_unary(&t).unwrap(), Some(q(n)));
    }
}

#[test]
fn union_keeps_both_translations() {
    let m = Transducer::parse(INTRO_M).unwrap();
    let mp = Transducer::parse(INTRO_M_PRIME).unwrap();
    let (u, a, b) = m.union(&mp).unwrap();
    assert_eq!((a, b), (0, 2));
    for t in all_trees(m.input(), 3) {
        assert_eq!(u.eval_string(a, &t, &[]).unwrap(), m.translate_string(&t).unwrap());
        assert_eq!(u.eval_string(b, &t, &[]).unwrap(), mp.translate_string(&t).unwrap());
    }
}
