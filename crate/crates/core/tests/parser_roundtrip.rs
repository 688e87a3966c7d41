use pddb_core::lang::{Atom, Constant, PProgram, PRule, Term};
use pddb_core::parser::{parse_program, render};
use pddb_core::synth::{acyclic_program, ProgramShape};
use pddb_core::{ConfidenceLevel, Mode};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn constant() -> impl Strategy<Value = Constant> {
    prop_oneof![
        (-50i64..50).prop_map(Constant::Int),
        "[a-z][a-zA-Z0-9_]{0,5}".prop_map(|s| Constant::sym(&s)),
        "[ -~]{0,6}".prop_map(|s| Constant::Str(s.into())),
    ]
}

fn term() -> impl Strategy<Value = Term> {
    prop_oneof![constant().prop_map(Term::Const), "[A-Z][a-z0-9]{0,2}".prop_map(|s| Term::var(&s))]
}

fn atom() -> impl Strategy<Value = Atom> {
    ("[a-zA-Z][a-z0-9_]{0,4}", prop::collection::vec(term(), 0..3)).prop_map(|(p, args)| Atom::new(&p, args))
}

fn mode() -> impl Strategy<Value = Mode> {
    prop::sample::select(Mode::ALL.to_vec())
}

fn prob() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(1.0), (0u32..=1000).prop_map(|n| n as f64 / 1000.0), 0.0..=1.0f64]
}

fn sorted_pair() -> impl Strategy<Value = (f64, f64)> {
    (prob(), prob()).prop_map(|(x, y)| if x <= y { (x, y) } else { (y, x) })
}

fn rule() -> impl Strategy<Value = PRule> {
    (atom(), prop::collection::vec(atom(), 0..3), sorted_pair(), sorted_pair(), mode(), mode()).prop_map(
        |(head, body, (a, b), (g, d), conj, disj)| PRule {
            head,
            body,
            conf: ConfidenceLevel::new(a, b, g, d).unwrap(),
            conj,
            disj,
            span: None,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn render_then_parse_is_identity(rules in prop::collection::vec(rule(), 0..6)) {
        let p = PProgram::new(rules);
        let text = render(&p);
        let back = parse_program(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(render(&back), text);
    }

    #[test]
    fn parse_errors_stay_inside_the_input(text in "[a-zA-Z0-9(),.<>\\[\\]; =%'_-]{0,40}") {
        if let Err(e) = parse_program(&text) {
            prop_assert!(e.span.begin <= e.span.end);
            prop_assert!(e.span.end <= text.len());
        }
    }
}

#[test]
fn generated_programs_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let p = acyclic_program(&mut rng, &ProgramShape::default());
        assert_eq!(parse_program(&render(&p)).unwrap(), p);
    }
}
