//! Reference evaluators for checking generated programs.
//!
//! Nothing here goes through extraction or the interaction operators except
//! `equivalence_check`, which runs the program under test and compares it
//! with a plain truth-table lookup.

use thiserror::Error;

use crate::interaction::{Computation, InteractionError};
use crate::isa::InstructionSequence;
use crate::services::Reply;
use crate::synthesis::{row_inputs, Circuit, Gate, Operand, PartialBooleanFunction};

/// Largest arity swept by [`equivalence_check`].
pub const MAX_CHECK_ARITY: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("expected {expected} inputs, got {actual}")]
    ArityMismatch { expected: usize, actual: usize },
    #[error("arity {0} is too large for an exhaustive sweep")]
    ArityTooLarge(usize),
    #[error(transparent)]
    Interaction(#[from] InteractionError),
}

/// Gate-by-gate evaluation; the value of the last gate.
pub fn eval_circuit(circuit: &Circuit, inputs: &[bool]) -> Result<bool, OracleError> {
    if inputs.len() != circuit.input_count() {
        return Err(OracleError::ArityMismatch {
            expected: circuit.input_count(),
            actual: inputs.len(),
        });
    }
    let mut values: Vec<bool> = Vec::with_capacity(circuit.gate_count());
    for gate in circuit.gates() {
        let read = |op: Operand| match op {
            Operand::Input(j) => inputs[j - 1],
            Operand::Gate(j) => values[j - 1],
        };
        let v = match *gate {
            Gate::Not(a) => !read(a),
            Gate::And(a, b) => read(a) && read(b),
            Gate::Or(a, b) => read(a) || read(b),
        };
        values.push(v);
    }
    Ok(*values.last().expect("circuits have at least one gate"))
}

/// The total function induced by a circuit, as a table.
pub fn circuit_table(circuit: &Circuit) -> PartialBooleanFunction {
    PartialBooleanFunction::from_fn(circuit.input_count(), |bs| {
        Some(eval_circuit(circuit, bs).expect("arity matches"))
    })
    .expect("circuit arity within table limit")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub inputs: Vec<bool>,
    pub expected: Reply,
    pub actual: Reply,
}

/// Every input vector on which the program disagrees with the function.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EquivalenceReport {
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl EquivalenceReport {
    pub fn is_equivalent(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Runs `compute(program, bs, aux_count)` on all `2^k` inputs and compares
/// with `F(bs)`, undefined entries standing for `d`.
pub fn equivalence_check(
    program: &InstructionSequence,
    function: &PartialBooleanFunction,
    aux_count: usize,
) -> Result<EquivalenceReport, OracleError> {
    let k = function.arity();
    if k > MAX_CHECK_ARITY {
        return Err(OracleError::ArityTooLarge(k));
    }
    let computation = Computation::new(program, aux_count)?;
    let mut report = EquivalenceReport::default();
    for (row, entry) in function.table().iter().enumerate() {
        let inputs = row_inputs(k, row);
        let expected = entry.map_or(Reply::Divergent, Reply::from_bool);
        let actual = computation.run(&inputs)?;
        report.checked += 1;
        if actual != expected {
            report.mismatches.push(Mismatch {
                inputs,
                expected,
                actual,
            });
        }
    }
    Ok(report)
}
