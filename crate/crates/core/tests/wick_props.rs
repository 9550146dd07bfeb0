use std::collections::BTreeMap;

use fockfield::fock::FockVector;
use fockfield::wick::{normal_order, parse, vacuum_expectation, LadderSymbol, NormalForm, OperatorString, Term};
use fockfield::{Error, LadderKind, ModeSpace, Statistics, C64};
use proptest::prelude::*;

const LABELS: [&str; 3] = ["x", "y", "z"];

fn statistics() -> impl Strategy<Value = Statistics> {
    prop_oneof![Just(Statistics::Bose), Just(Statistics::Fermi)]
}

fn symbol() -> impl Strategy<Value = LadderSymbol> {
    (any::<bool>(), 0usize..LABELS.len()).prop_map(|(create, l)| {
        if create {
            LadderSymbol::create(LABELS[l])
        } else {
            LadderSymbol::annihilate(LABELS[l])
        }
    })
}

fn operator_string() -> impl Strategy<Value = OperatorString> {
    (statistics(), prop::collection::vec(symbol(), 0..=6)).prop_map(|(s, v)| OperatorString::new(s, v))
}

fn assignment() -> impl Strategy<Value = BTreeMap<String, usize>> {
    prop::collection::vec(0usize..3, 3).prop_map(|modes| LABELS.iter().map(|l| l.to_string()).zip(modes).collect())
}

fn space_for(stats: Statistics) -> ModeSpace {
    match stats {
        Statistics::Bose => ModeSpace::bose(3, 8).unwrap(),
        Statistics::Fermi => ModeSpace::fermi(3).unwrap(),
    }
}

fn apply(s: &OperatorString, assign: &BTreeMap<String, usize>, v: &FockVector<f64>) -> FockVector<f64> {
    v.apply_product(&s.to_ladder_ops(assign).unwrap()).unwrap()
}

fn delta_value(term: &Term, assign: &BTreeMap<String, usize>) -> bool {
    term.deltas.iter().all(|d| {
        let (a, b) = d.labels();
        assign[a] == assign[b]
    })
}

/// Numeric action of a normal form on `v`.
fn apply_normal_form(nf: &NormalForm, assign: &BTreeMap<String, usize>, v: &FockVector<f64>) -> FockVector<f64> {
    nf.terms.iter().filter(|t| delta_value(t, assign)).fold(FockVector::null(*v.space()), |acc, t| {
        let string = OperatorString::new(nf.statistics, t.string.clone());
        acc.add_scaled(C64::new(t.coefficient as f64, 0.0), &apply(&string, assign, v)).unwrap()
    })
}

fn negated(nf: &NormalForm) -> NormalForm {
    let mut out = nf.clone();
    out.terms.iter_mut().for_each(|t| t.coefficient = -t.coefficient);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn vacuum_expectation_matches_fock_core(s in operator_string(), assign in assignment()) {
        let vacuum = FockVector::<f64>::vacuum(space_for(s.statistics));
        let numeric = vacuum.inner(&apply(&s, &assign, &vacuum)).unwrap();
        let symbolic = vacuum_expectation(&s).evaluate(&assign).unwrap() as f64;
        prop_assert!((numeric - C64::new(symbolic, 0.0)).norm() <= 1e-10, "{s}: {numeric} vs {symbolic}");
    }

    #[test]
    fn normal_form_is_an_operator_identity(
        s in operator_string(),
        assign in assignment(),
        occ in prop::collection::vec(0u8..=2, 3),
    ) {
        let occ: Vec<u8> = match s.statistics {
            Statistics::Bose => occ,
            Statistics::Fermi => occ.into_iter().map(|k| k % 2).collect(),
        };
        let v = FockVector::<f64>::basis(space_for(s.statistics), occ).unwrap();
        let direct = apply(&s, &assign, &v);
        let rewritten = apply_normal_form(&normal_order(&s), &assign, &v);
        prop_assert!(direct.distance(&rewritten).unwrap() <= 1e-10);
    }

    #[test]
    fn normal_order_is_idempotent(s in operator_string()) {
        let nf = normal_order(&s);
        for term in &nf.terms {
            prop_assert!(term.string.windows(2).all(|w| !(w[0].kind == LadderKind::Annihilate && w[1].kind == LadderKind::Create)));
            let printed = OperatorString::new(s.statistics, term.string.clone()).to_string();
            let again = normal_order(&parse(&printed).unwrap());
            prop_assert_eq!(again.terms.len(), 1);
            prop_assert_eq!(again.terms[0].coefficient, 1);
            prop_assert!(again.terms[0].deltas.is_empty());
            prop_assert_eq!(&again.terms[0].string, &term.string);
        }
        prop_assert_eq!(normal_order(&parse(&s.to_string()).unwrap()), nf);
    }

    #[test]
    fn fermi_transposition_flips_sign(
        symbols in prop::collection::vec(symbol(), 2..=6),
        at in 0usize..5,
    ) {
        let at = at % (symbols.len() - 1);
        prop_assume!(symbols[at].kind == symbols[at + 1].kind);
        let s = OperatorString::new(Statistics::Fermi, symbols.clone());
        let mut swapped = symbols;
        swapped.swap(at, at + 1);
        let t = OperatorString::new(Statistics::Fermi, swapped);
        prop_assert_eq!(normal_order(&t), negated(&normal_order(&s)));
    }

    #[test]
    fn unbalanced_strings_have_zero_vacuum_value(s in operator_string()) {
        let creates = s.symbols.iter().filter(|x| x.kind == LadderKind::Create).count();
        prop_assume!(2 * creates != s.symbols.len());
        prop_assert!(vacuum_expectation(&s).is_zero());
    }
}

#[test]
fn contraction_structure_of_the_density() {
    let s = parse("bose: a(x') a+(x) a(x) a+(x'')").unwrap();
    let dp = vacuum_expectation(&s);
    assert_eq!(dp.to_string(), "d(x,x') d(x,x'')");
    let assign = |a: usize, b: usize, c: usize| -> BTreeMap<String, usize> {
        [("x".to_string(), a), ("x'".to_string(), b), ("x''".to_string(), c)].into_iter().collect()
    };
    assert_eq!(dp.evaluate(&assign(3, 3, 3)).unwrap(), 1);
    assert_eq!(dp.evaluate(&assign(3, 2, 3)).unwrap(), 0);
}

#[test]
fn golden_normal_forms() {
    let cases = [
        ("bose: a(x1) a+(x2)", "d(x1,x2) + a+(x2) a(x1)"),
        ("fermi: a(x1) a+(x2)", "d(x1,x2) - a+(x2) a(x1)"),
        ("bose: a+(b) a(a)", "a+(b) a(a)"),
        ("fermi: a+(p) a(p)", "a+(p) a(p)"),
        ("fermi: a+(p) a+(p)", "0"),
        ("bose:", "1"),
    ];
    for (input, expected) in cases {
        assert_eq!(normal_order(&parse(input).unwrap()).to_string(), expected, "{input}");
    }
}

#[test]
fn fermi_pair_expectations_match_fock_core() {
    let vacuum = FockVector::<f64>::vacuum(ModeSpace::fermi(2).unwrap());
    let assign: BTreeMap<String, usize> = [("x1".to_string(), 0), ("x2".to_string(), 1)].into_iter().collect();
    for (text, expected) in [("fermi: a(x1) a(x2) a+(x2) a+(x1)", 1), ("fermi: a(x1) a(x2) a+(x1) a+(x2)", -1)] {
        let s = parse(text).unwrap();
        let symbolic = vacuum_expectation(&s).evaluate(&assign).unwrap();
        let numeric = vacuum.inner(&apply(&s, &assign, &vacuum)).unwrap();
        assert_eq!(symbolic, expected);
        assert!((numeric.re - expected as f64).abs() <= 1e-12 && numeric.im.abs() <= 1e-12);
    }
}

#[test]
fn evaluation_needs_every_label() {
    let dp = vacuum_expectation(&parse("bose: a(x) a+(y)").unwrap());
    let partial: BTreeMap<String, usize> = [("x".to_string(), 0)].into_iter().collect();
    assert!(matches!(dp.evaluate(&partial), Err(Error::MissingLabel(l)) if l == "y"));
}

#[test]
fn parse_errors_carry_positions() {
    assert!(matches!(parse("bose: a(x1 a+(x2)"), Err(Error::Parse { position: 6, .. })));
    assert!(matches!(parse("boson: a(x)"), Err(Error::Parse { position: 0, .. })));
    assert!(matches!(parse("bose: a()"), Err(Error::Parse { .. })));
    assert!(matches!(parse("bose: b(x)"), Err(Error::Parse { .. })));
}
