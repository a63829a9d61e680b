use pglb::{parse, Action, Focus, Instruction, InstructionSequence, Method};
use proptest::prelude::*;

fn action() -> impl Strategy<Value = Action> {
    prop_oneof![
        prop::sample::select(vec!["a", "b", "c", "x_1"]).prop_map(Action::plain),
        (1usize..5, prop::sample::select(vec!["get", "set:t", "set:f"]))
            .prop_map(|(i, m)| Action::focused(Focus::Input(i), Method::from(m))),
        (0usize..5, prop::sample::select(vec!["get", "set:t", "set:f"]))
            .prop_map(|(i, m)| Action::focused(Focus::Aux(i), Method::from(m))),
        (prop::sample::select(vec!["0", "1", "reg"]), prop::sample::select(vec!["get", "set:f", "inc"]))
            .prop_map(|(f, m)| Action::focused(Focus::Named(f.into()), Method::from(m))),
    ]
}

fn instruction() -> impl Strategy<Value = Instruction> {
    prop_oneof![
        action().prop_map(Instruction::Basic),
        action().prop_map(Instruction::PosTest),
        action().prop_map(Instruction::NegTest),
        (0usize..12).prop_map(Instruction::FwdJump),
        (0usize..12).prop_map(Instruction::BwdJump),
        Just(Instruction::TermT),
        Just(Instruction::TermF),
    ]
}

fn sequence(max: usize) -> impl Strategy<Value = InstructionSequence> {
    prop::collection::vec(instruction(), 1..=max).prop_map(|v| InstructionSequence::new(v).unwrap())
}

proptest! {
    #[test]
    fn render_parse_round_trip(seq in sequence(12)) {
        let text = seq.render();
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &seq);
        prop_assert_eq!(back.render(), text);
    }

    #[test]
    fn layout_does_not_matter(seq in sequence(8)) {
        let lines: Vec<String> = seq.instructions().iter().map(|i| format!("  {i} // note")).collect();
        prop_assert_eq!(parse(&lines.join("\n")).unwrap(), seq);
    }

    #[test]
    fn concat_adds_lengths(a in sequence(6), b in sequence(6)) {
        let ab = a.concat(&b);
        prop_assert_eq!(ab.len(), a.len() + b.len());
        prop_assert_eq!(ab.is_loop_free(), a.is_loop_free() && b.is_loop_free());
        let foci: std::collections::BTreeSet<_> = a.foci_used().union(&b.foci_used()).cloned().collect();
        prop_assert_eq!(ab.foci_used(), foci);
    }
}

fn all_sequences(alphabet: &[Instruction], max_len: usize, mut check: impl FnMut(InstructionSequence)) {
    let mut layer: Vec<Vec<Instruction>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|prefix| {
                alphabet.iter().map(move |i| {
                    let mut next = prefix.clone();
                    next.push(i.clone());
                    next
                })
            })
            .collect();
        for v in &layer {
            check(InstructionSequence::new(v.clone()).unwrap());
        }
    }
}

/// Every sequence of length <= 6 built from one instruction of each of the
/// seven kinds over the actions a, b, c.
#[test]
fn round_trip_exhaustive_up_to_six() {
    let alphabet = [
        Instruction::Basic(Action::plain("a")),
        Instruction::PosTest(Action::plain("b")),
        Instruction::NegTest(Action::plain("c")),
        Instruction::FwdJump(1),
        Instruction::BwdJump(2),
        Instruction::TermT,
        Instruction::TermF,
    ];
    let mut count = 0;
    all_sequences(&alphabet, 6, |seq| {
        assert_eq!(parse(&seq.render()).unwrap(), seq);
        count += 1;
    });
    assert_eq!(count, (1..=6).map(|n| 7usize.pow(n)).sum::<usize>());
}

/// Every sequence of length <= 3 over all test and jump variants.
#[test]
fn round_trip_exhaustive_short() {
    let actions = [Action::plain("a"), Action::plain("b"), Action::plain("c")];
    let mut alphabet: Vec<Instruction> = Vec::new();
    for a in &actions {
        alphabet.push(Instruction::Basic(a.clone()));
        alphabet.push(Instruction::PosTest(a.clone()));
        alphabet.push(Instruction::NegTest(a.clone()));
    }
    for l in 0..3 {
        alphabet.push(Instruction::FwdJump(l));
        alphabet.push(Instruction::BwdJump(l));
    }
    alphabet.push(Instruction::TermT);
    alphabet.push(Instruction::TermF);

    let mut count = 0;
    all_sequences(&alphabet, 3, |seq| {
        assert_eq!(parse(&seq.render()).unwrap(), seq);
        count += 1;
    });
    assert_eq!(count, 17 + 17 * 17 + 17 * 17 * 17);
}

#[test]
fn loop_free_means_no_backward_jump() {
    assert!(!parse("a; \\#1").unwrap().is_loop_free());
    assert!(parse("a; #1; !t").unwrap().is_loop_free());
    assert!(!parse("#2; !t; \\#0").unwrap().is_loop_free());
}
