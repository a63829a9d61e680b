#![allow(dead_code)]

use std::collections::BTreeSet;

use pglb::sat3::{ClauseShape, CnfFormula};
use pglb::synthesis::{Circuit, Gate, Operand, PartialBooleanFunction};
use pglb::threads::StateId;
use pglb::{Action, BooleanRegister, Focus, Method, Node, RegularThread, Reply, ServiceFamily};
use rand::rngs::StdRng;
use rand::Rng;

pub const REPLIES: [Reply; 3] = [Reply::True, Reply::False, Reply::Divergent];

pub fn foci() -> Vec<Focus> {
    ["p", "q", "r"].into_iter().map(|f| Focus::Named(f.into())).collect()
}

pub fn register_actions() -> Vec<Action> {
    let mut actions = Vec::new();
    for f in foci() {
        for m in [Method::Get, Method::SetT, Method::SetF] {
            actions.push(Action::focused(f.clone(), m));
        }
    }
    actions
}

/// Register actions, two plain actions and `tau`.
pub fn mixed_actions() -> Vec<Action> {
    let mut actions = register_actions();
    actions.push(Action::plain("a"));
    actions.push(Action::plain("b"));
    actions.push(Action::Tau);
    actions
}

/// Random graph on `1..=max_states` states rooted at 0.
pub fn random_thread(rng: &mut StdRng, max_states: usize, actions: &[Action]) -> RegularThread {
    let n = rng.gen_range(1..=max_states);
    let nodes = (0..n)
        .map(|_| match rng.gen_range(0..20) {
            0 | 1 => Node::SPlus,
            2 | 3 => Node::SMinus,
            4 => Node::Deadlock,
            _ => {
                let action = actions[rng.gen_range(0..actions.len())].clone();
                let x = rng.gen_range(0..n);
                if action == Action::Tau || rng.gen_bool(0.3) {
                    Node::prefix(action, x)
                } else {
                    Node::post(action, x, rng.gen_range(0..n))
                }
            }
        })
        .collect();
    RegularThread::new(nodes, 0).unwrap()
}

/// Each focus carries a register with probability 3/4.
pub fn random_family(rng: &mut StdRng, foci: &[Focus]) -> ServiceFamily {
    let mut family = ServiceFamily::empty();
    for f in foci {
        if rng.gen_bool(0.75) {
            let value = REPLIES[rng.gen_range(0..3)];
            family = family.compose(&ServiceFamily::singleton(f.clone(), BooleanRegister::shared(value)));
        }
    }
    family
}

/// A family built with `⊕` over random foci, so clashes (and δ) occur.
pub fn random_clashing_family(rng: &mut StdRng, foci: &[Focus]) -> ServiceFamily {
    let n = rng.gen_range(0..=4);
    (0..n)
        .map(|_| {
            (
                foci[rng.gen_range(0..foci.len())].clone(),
                BooleanRegister::shared(REPLIES[rng.gen_range(0..3)]),
            )
        })
        .collect()
}

pub fn random_focus_set(rng: &mut StdRng, foci: &[Focus]) -> BTreeSet<Focus> {
    foci.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()
}

/// Graph for `x ⊴ a ⊵ y`, with copies of both operand graphs.
pub fn post(action: Action, x: &RegularThread, y: &RegularThread) -> RegularThread {
    let shift = |node: &Node, by: StateId| match node {
        Node::Post {
            action,
            on_true,
            on_false,
        } => Node::post(action.clone(), on_true + by, on_false + by),
        other => other.clone(),
    };
    let x_off = 1;
    let y_off = 1 + x.state_count();
    let mut nodes = vec![Node::post(action, x.root() + x_off, y.root() + y_off)];
    nodes.extend(x.nodes().iter().map(|n| shift(n, x_off)));
    nodes.extend(y.nodes().iter().map(|n| shift(n, y_off)));
    RegularThread::new(nodes, 0).unwrap()
}

pub fn prefix(action: Action, x: &RegularThread) -> RegularThread {
    post(action, x, x)
}

pub fn random_table(rng: &mut StdRng, arity: usize) -> PartialBooleanFunction {
    let table = (0..1usize << arity)
        .map(|_| match rng.gen_range(0..3) {
            0 => Some(true),
            1 => Some(false),
            _ => None,
        })
        .collect();
    PartialBooleanFunction::new(arity, table).unwrap()
}

/// Table number `index` among the `3^(2^arity)` tables, entry `j` taken from
/// the `j`-th base-3 digit.
pub fn nth_table(arity: usize, mut index: usize) -> PartialBooleanFunction {
    let table = (0..1usize << arity)
        .map(|_| {
            let digit = index % 3;
            index /= 3;
            [Some(true), Some(false), None][digit]
        })
        .collect();
    PartialBooleanFunction::new(arity, table).unwrap()
}

pub fn random_circuit(rng: &mut StdRng, max_inputs: usize, max_gates: usize) -> Circuit {
    let k = rng.gen_range(1..=max_inputs);
    let n = rng.gen_range(1..=max_gates);
    let mut gates = Vec::with_capacity(n);
    for g in 0..n {
        let operand = |rng: &mut StdRng| {
            let choice = rng.gen_range(0..k + g);
            if choice < k {
                Operand::Input(choice + 1)
            } else {
                Operand::Gate(choice - k + 1)
            }
        };
        gates.push(match rng.gen_range(0..3) {
            0 => Gate::Not(operand(rng)),
            1 => Gate::And(operand(rng), operand(rng)),
            _ => Gate::Or(operand(rng), operand(rng)),
        });
    }
    Circuit::new(k, gates).unwrap()
}

/// A formula over `k` variables with `clauses` random valid clause shapes.
pub fn random_cnf(rng: &mut StdRng, k: usize, clauses: usize) -> CnfFormula {
    let shapes: Vec<ClauseShape> = (0..clauses)
        .map(|_| {
            ClauseShape::new(
                rng.gen_range(1..=k),
                rng.gen_range(1..=k),
                rng.gen_range(1..=k),
                rng.gen_range(1..=8),
            )
        })
        .collect();
    CnfFormula::new(k, shapes).unwrap()
}

pub fn bits(n: usize, value: u64) -> Vec<bool> {
    (0..n).map(|i| value >> i & 1 == 1).collect()
}
