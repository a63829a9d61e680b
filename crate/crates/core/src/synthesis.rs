//! Loop-free code generation: the truth-table compiler and the Boolean
//! circuit compiler.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use thiserror::Error;

use crate::isa::{Action, Focus, Instruction, InstructionSequence, Method, SequenceBuilder};
use crate::sat3;

/// Largest arity whose truth table we are willing to materialize.
pub const MAX_TABLE_ARITY: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthesisError {
    #[error("arity {arity} is too large to materialize (limit {limit})")]
    InfeasibleArity { arity: usize, limit: usize },
    #[error("table for arity {arity} needs {expected} rows, got {actual}")]
    TableSize {
        arity: usize,
        expected: usize,
        actual: usize,
    },
    #[error("malformed circuit: {0}")]
    MalformedCircuit(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

/// `F: B^k ->p B` as an explicit table.
///
/// Row `r` holds `F(b_1, ..., b_k)` where `b_i` is bit `i - 1` of `r`
/// (1 meaning `t`). `None` is an undefined entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialBooleanFunction {
    arity: usize,
    table: Vec<Option<bool>>,
}

pub fn row_index(inputs: &[bool]) -> usize {
    inputs
        .iter()
        .enumerate()
        .map(|(i, &b)| usize::from(b) << i)
        .sum()
}

pub fn row_inputs(arity: usize, row: usize) -> Vec<bool> {
    (0..arity).map(|i| row >> i & 1 == 1).collect()
}

impl PartialBooleanFunction {
    pub fn new(arity: usize, table: Vec<Option<bool>>) -> Result<Self, SynthesisError> {
        if arity > MAX_TABLE_ARITY {
            return Err(SynthesisError::InfeasibleArity {
                arity,
                limit: MAX_TABLE_ARITY,
            });
        }
        let expected = 1usize << arity;
        if table.len() != expected {
            return Err(SynthesisError::TableSize {
                arity,
                expected,
                actual: table.len(),
            });
        }
        Ok(PartialBooleanFunction { arity, table })
    }

    pub fn from_fn(
        arity: usize,
        mut f: impl FnMut(&[bool]) -> Option<bool>,
    ) -> Result<Self, SynthesisError> {
        if arity > MAX_TABLE_ARITY {
            return Err(SynthesisError::InfeasibleArity {
                arity,
                limit: MAX_TABLE_ARITY,
            });
        }
        let table = (0..1usize << arity)
            .map(|r| f(&row_inputs(arity, r)))
            .collect();
        Ok(PartialBooleanFunction { arity, table })
    }

    pub fn constant(value: Option<bool>) -> Self {
        PartialBooleanFunction {
            arity: 0,
            table: vec![value],
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[Option<bool>] {
        &self.table
    }

    pub fn eval(&self, inputs: &[bool]) -> Option<bool> {
        assert_eq!(inputs.len(), self.arity, "arity mismatch");
        self.table[row_index(inputs)]
    }

    /// `G_b(b_1, ..., b_{k-1}) = F(b_1, ..., b_{k-1}, b)`.
    pub fn restrict_last(&self, value: bool) -> PartialBooleanFunction {
        assert!(self.arity > 0, "nullary function has no argument to fix");
        let half = self.table.len() / 2;
        let table = if value {
            self.table[half..].to_vec()
        } else {
            self.table[..half].to_vec()
        };
        PartialBooleanFunction {
            arity: self.arity - 1,
            table,
        }
    }
}

/// Text form: `k <arity>` followed by one `<inputs> <value>` row per input
/// vector, inputs over `{t,f}` read as `b_1 ... b_k`, value one of `t`, `f`, `u`.
impl fmt::Display for PartialBooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "k {}", self.arity)?;
        for (row, value) in self.table.iter().enumerate() {
            let inputs: String = row_inputs(self.arity, row)
                .into_iter()
                .map(|b| if b { 't' } else { 'f' })
                .collect();
            let value = match value {
                Some(true) => 't',
                Some(false) => 'f',
                None => 'u',
            };
            if self.arity == 0 {
                writeln!(f, "{value}")?;
            } else {
                writeln!(f, "{inputs} {value}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for PartialBooleanFunction {
    type Err = SynthesisError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with("//"));
        let err = |line, message: &str| SynthesisError::Format {
            line,
            message: message.to_string(),
        };
        let (line, header) = lines.next().ok_or_else(|| err(1, "missing `k <arity>` header"))?;
        let arity: usize = header
            .strip_prefix('k')
            .map(str::trim)
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| err(line, "expected `k <arity>`"))?;
        if arity > MAX_TABLE_ARITY {
            return Err(SynthesisError::InfeasibleArity {
                arity,
                limit: MAX_TABLE_ARITY,
            });
        }
        let mut table: Vec<Option<Option<bool>>> = vec![None; 1 << arity];
        for (line, row) in lines {
            let mut fields = row.split_whitespace();
            let (inputs, value) = if arity == 0 {
                ("", fields.next().unwrap_or(""))
            } else {
                (fields.next().unwrap_or(""), fields.next().unwrap_or(""))
            };
            if fields.next().is_some() {
                return Err(err(line, "trailing fields"));
            }
            if inputs.len() != arity {
                return Err(err(line, "input vector has the wrong length"));
            }
            let bits = inputs
                .chars()
                .map(|c| match c {
                    't' => Ok(true),
                    'f' => Ok(false),
                    _ => Err(err(line, "inputs must be t or f")),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let value = match value {
                "t" => Some(true),
                "f" => Some(false),
                "u" => None,
                _ => return Err(err(line, "value must be t, f or u")),
            };
            let slot = &mut table[row_index(&bits)];
            if slot.is_some() {
                return Err(err(line, "duplicate row"));
            }
            *slot = Some(value);
        }
        let rows = table.iter().filter(|r| r.is_some()).count();
        if rows != table.len() {
            return Err(SynthesisError::TableSize {
                arity,
                expected: table.len(),
                actual: rows,
            });
        }
        Ok(PartialBooleanFunction {
            arity,
            table: table.into_iter().map(Option::unwrap).collect(),
        })
    }
}

/// `3 * 2^k - 2`, the exact length of the truth-table compiler's output.
pub fn truth_table_program_length(arity: usize) -> usize {
    3 * (1usize << arity) - 2
}

fn get(focus: Focus) -> Action {
    Action::focused(focus, Method::Get)
}

fn set_false(focus: Focus) -> Action {
    Action::focused(focus, Method::SetF)
}

/// Loop-free program computing `F` without auxiliary registers.
///
/// Arity 0 gives `!t`, `!f` or `#0`. Otherwise, splitting on the last input:
/// `-in:k.get; #(3*2^(k-1) - 1); I_{G_t}; I_{G_f}`.
pub fn compile_truth_table(function: &PartialBooleanFunction) -> InstructionSequence {
    let mut out = SequenceBuilder::new();
    emit_table(function, &mut out);
    out.build().expect("compiled programs are non-empty")
}

fn emit_table(function: &PartialBooleanFunction, out: &mut SequenceBuilder) {
    if function.arity == 0 {
        out.push(match function.table[0] {
            Some(true) => Instruction::TermT,
            Some(false) => Instruction::TermF,
            None => Instruction::FwdJump(0),
        });
        return;
    }
    let k = function.arity;
    out.push(Instruction::NegTest(get(Focus::Input(k))));
    out.push(Instruction::FwdJump(truth_table_program_length(k - 1) + 1));
    emit_table(&function.restrict_last(true), out);
    emit_table(&function.restrict_last(false), out);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operand {
    /// Circuit input `x_j`, 1-based.
    Input(usize),
    /// Output of gate `g_j`, 1-based.
    Gate(usize),
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Input(j) => write!(f, "x{j}"),
            Operand::Gate(j) => write!(f, "g{j}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    Not(Operand),
    And(Operand, Operand),
    Or(Operand, Operand),
}

impl Gate {
    pub fn operands(&self) -> Vec<Operand> {
        match *self {
            Gate::Not(a) => vec![a],
            Gate::And(a, b) | Gate::Or(a, b) => vec![a, b],
        }
    }
}

/// A NOT/AND/OR circuit with gates in topological order; the last gate is
/// the output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    input_count: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(input_count: usize, gates: Vec<Gate>) -> Result<Self, SynthesisError> {
        if gates.is_empty() {
            return Err(SynthesisError::MalformedCircuit("no gates".into()));
        }
        for (j, gate) in gates.iter().enumerate() {
            for op in gate.operands() {
                let ok = match op {
                    Operand::Input(i) => (1..=input_count).contains(&i),
                    Operand::Gate(i) => (1..=j).contains(&i),
                };
                if !ok {
                    return Err(SynthesisError::MalformedCircuit(format!(
                        "gate g{} refers to {op}",
                        j + 1
                    )));
                }
            }
        }
        Ok(Circuit { input_count, gates })
    }

    pub fn input_count(&self) -> usize {
        self.input_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }
}

/// Netlist text: `inputs <k>`, then `g<i> = NOT <op>`, `g<i> = AND <op> <op>`
/// or `g<i> = OR <op> <op>` with `<op>` one of `x<j>`, `g<j>`.
impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "inputs {}", self.input_count)?;
        for (j, gate) in self.gates.iter().enumerate() {
            match gate {
                Gate::Not(a) => writeln!(f, "g{} = NOT {a}", j + 1)?,
                Gate::And(a, b) => writeln!(f, "g{} = AND {a} {b}", j + 1)?,
                Gate::Or(a, b) => writeln!(f, "g{} = OR {a} {b}", j + 1)?,
            }
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = SynthesisError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |line, message: String| SynthesisError::Format { line, message };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.split("//").next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = lines
            .next()
            .ok_or_else(|| err(1, "missing `inputs <k>` header".into()))?;
        let input_count: usize = header
            .strip_prefix("inputs")
            .map(str::trim)
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| err(line, "expected `inputs <k>`".into()))?;
        let mut gates = Vec::new();
        for (line, text) in lines {
            let tokens: Vec<&str> = text.split_whitespace().collect();
            let expected_name = format!("g{}", gates.len() + 1);
            if tokens.len() < 4 || tokens[1] != "=" {
                return Err(err(line, "expected `g<i> = <GATE> <op> ...`".into()));
            }
            if tokens[0] != expected_name {
                return Err(err(line, format!("expected gate `{expected_name}`, found `{}`", tokens[0])));
            }
            let operand = |tok: &str| -> Result<Operand, SynthesisError> {
                let parsed = if let Some(n) = tok.strip_prefix('x') {
                    n.parse().ok().map(Operand::Input)
                } else if let Some(n) = tok.strip_prefix('g') {
                    n.parse().ok().map(Operand::Gate)
                } else {
                    None
                };
                parsed.ok_or_else(|| err(line, format!("bad operand `{tok}`")))
            };
            let gate = match (tokens[2], tokens.len()) {
                ("NOT", 4) => Gate::Not(operand(tokens[3])?),
                ("AND", 5) => Gate::And(operand(tokens[3])?, operand(tokens[4])?),
                ("OR", 5) => Gate::Or(operand(tokens[3])?, operand(tokens[4])?),
                _ => return Err(err(line, format!("bad gate `{text}`"))),
            };
            gates.push(gate);
        }
        Circuit::new(input_count, gates)
    }
}

fn operand_focus(op: Operand) -> Focus {
    match op {
        Operand::Input(j) => Focus::Input(j),
        Operand::Gate(j) => Focus::Aux(j),
    }
}

/// Loop-free program computing the circuit with one auxiliary register per
/// gate.
///
/// Gate `g_j` owns `aux:j`, which starts out `t` and is cleared when the gate
/// evaluates to false:
///
/// ```text
/// NOT a    +a.get; aux:j.set:f
/// AND a b  -a.get; #2; -b.get; aux:j.set:f
/// OR  a b  +a.get; #3; -b.get; aux:j.set:f
/// ```
///
/// followed by `+aux:n.get; !t; !f` for the output gate `g_n`.
pub fn compile_circuit(circuit: &Circuit) -> InstructionSequence {
    let mut out = SequenceBuilder::new();
    for (j, gate) in circuit.gates.iter().enumerate() {
        let own = Focus::Aux(j + 1);
        match *gate {
            Gate::Not(a) => {
                out.push(Instruction::PosTest(get(operand_focus(a))));
            }
            Gate::And(a, b) => {
                out.push(Instruction::NegTest(get(operand_focus(a))));
                out.push(Instruction::FwdJump(2));
                out.push(Instruction::NegTest(get(operand_focus(b))));
            }
            Gate::Or(a, b) => {
                out.push(Instruction::PosTest(get(operand_focus(a))));
                out.push(Instruction::FwdJump(3));
                out.push(Instruction::NegTest(get(operand_focus(b))));
            }
        }
        out.push(Instruction::Basic(set_false(own)));
    }
    out.push(Instruction::PosTest(get(Focus::Aux(circuit.gate_count()))));
    out.push(Instruction::TermT);
    out.push(Instruction::TermF);
    out.build().expect("compiled programs are non-empty")
}

/// Largest `k` for which the 3SAT(k) truth table (2^(8k^3) rows) is built.
pub const MAX_LOOP_FREE_SAT_K: usize = 1;

/// Loop-free program for 3SAT(k) obtained by tabulating the function with the
/// brute-force decision procedure and compiling the table.
pub fn compile_3sat_loopfree(k: usize) -> Result<InstructionSequence, SynthesisError> {
    let arity = 8 * k.pow(3);
    if k == 0 || k > MAX_LOOP_FREE_SAT_K {
        return Err(SynthesisError::InfeasibleArity {
            arity,
            limit: 8 * MAX_LOOP_FREE_SAT_K.pow(3),
        });
    }
    let table = PartialBooleanFunction::from_fn(arity, |bits| {
        let formula = sat3::decode(bits, k).expect("bit vectors of length 8k^3 decode");
        Some(sat3::brute_sat(&formula).expect("small k"))
    })?;
    Ok(compile_truth_table(&table))
}

/// One row of the loop-free versus backward-jump length comparison for 3SAT(k).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LengthRow {
    pub k: usize,
    /// `3 * 2^(8k^3) - 2`
    pub loop_free: BigUint,
    /// `72k^3 + 5k + 1`
    pub with_backward_jumps: usize,
}

pub fn length_comparison(max_k: usize) -> Vec<LengthRow> {
    (1..=max_k)
        .map(|k| {
            let arity = 8 * k.pow(3);
            LengthRow {
                k,
                loop_free: (BigUint::from(3u8) << arity) - 2u8,
                with_backward_jumps: sat3::sat_program_length(k),
            }
        })
        .collect()
}
