//! 3-CNF formulas as bit vectors and the backward-jump program deciding
//! their satisfiability.
//!
//! Over `k` variables there are `8k^3` clause shapes `<l, m, n, i>`: three
//! variable indices and one of eight polarity patterns. A formula is the
//! vector of `8k^3` bits saying which shapes occur. The generated program
//! reads that vector from `in:1 .. in:8k^3`, keeps the current assignment in
//! `aux:1 .. aux:k`, and loops over all assignments with a single backward
//! jump.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::isa::{Action, Focus, Instruction, InstructionSequence, Method, SequenceBuilder};

/// Brute force enumerates `2^k` assignments.
pub const MAX_BRUTE_FORCE_VARIABLES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("clause index {index} outside 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("clause {0} is not a valid shape over {1} variables")]
    ShapeOutOfRange(ClauseShape, usize),
    #[error("encoding has length {actual}, expected {expected}")]
    EncodingLength { expected: usize, actual: usize },
    #[error("the variable count must be at least 1")]
    NoVariables,
    #[error("{0} variables are too many for exhaustive search")]
    TooManyVariables(usize),
    #[error("line {line}: {message}")]
    Dimacs { line: usize, message: String },
}

/// Clause `<l, m, n, i>`. Pattern `i` in 1..=8 fixes the polarities: bit 2,
/// 1, 0 of `i - 1` set means the first, second, third literal is negated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClauseShape {
    pub l: usize,
    pub m: usize,
    pub n: usize,
    pub pattern: u8,
}

impl ClauseShape {
    pub fn new(l: usize, m: usize, n: usize, pattern: u8) -> Self {
        ClauseShape { l, m, n, pattern }
    }

    /// Builds the shape from three `(variable, positive)` literals in order.
    pub fn from_literals(literals: [(usize, bool); 3]) -> Self {
        let negations = literals
            .iter()
            .fold(0u8, |acc, &(_, positive)| (acc << 1) | u8::from(!positive));
        ClauseShape::new(literals[0].0, literals[1].0, literals[2].0, negations + 1)
    }

    pub fn variables(&self) -> [usize; 3] {
        [self.l, self.m, self.n]
    }

    /// `true` for a positive literal.
    pub fn polarities(&self) -> [bool; 3] {
        let neg = self.pattern.wrapping_sub(1);
        [neg & 4 == 0, neg & 2 == 0, neg & 1 == 0]
    }

    pub fn literals(&self) -> [(usize, bool); 3] {
        let v = self.variables();
        let p = self.polarities();
        [(v[0], p[0]), (v[1], p[1]), (v[2], p[2])]
    }

    pub fn is_valid(&self, k: usize) -> bool {
        (1..=8).contains(&self.pattern) && self.variables().iter().all(|v| (1..=k).contains(v))
    }
}

impl fmt::Display for ClauseShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{},{},{}>", self.l, self.m, self.n, self.pattern)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    variables: usize,
    clauses: BTreeSet<ClauseShape>,
}

impl CnfFormula {
    pub fn new(
        variables: usize,
        clauses: impl IntoIterator<Item = ClauseShape>,
    ) -> Result<Self, SatError> {
        let clauses: BTreeSet<ClauseShape> = clauses.into_iter().collect();
        if let Some(bad) = clauses.iter().find(|c| !c.is_valid(variables)) {
            return Err(SatError::ShapeOutOfRange(*bad, variables));
        }
        Ok(CnfFormula { variables, clauses })
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    pub fn clauses(&self) -> &BTreeSet<ClauseShape> {
        &self.clauses
    }
}

pub fn clause_count(k: usize) -> usize {
    8 * k * k * k
}

/// Canonical bijection `1..=8k^3 -> {1..k}^3 x {1..8}`, lexicographic in
/// `(l, m, n, i)`.
pub fn phi(index: usize, k: usize) -> Result<ClauseShape, SatError> {
    let max = clause_count(k);
    if index == 0 || index > max {
        return Err(SatError::IndexOutOfRange { index, max });
    }
    let j = index - 1;
    let pattern = (j % 8) as u8 + 1;
    let rest = j / 8;
    Ok(ClauseShape::new(rest / (k * k) + 1, rest / k % k + 1, rest % k + 1, pattern))
}

pub fn phi_inv(shape: ClauseShape, k: usize) -> Result<usize, SatError> {
    if !shape.is_valid(k) {
        return Err(SatError::ShapeOutOfRange(shape, k));
    }
    Ok((((shape.l - 1) * k + (shape.m - 1)) * k + (shape.n - 1)) * 8 + shape.pattern as usize)
}

/// Bit `j - 1` is set iff clause `phi(j)` occurs in the formula.
pub fn encode_cnf(formula: &CnfFormula) -> Vec<bool> {
    let k = formula.variables;
    let mut bits = vec![false; clause_count(k)];
    for clause in &formula.clauses {
        let j = phi_inv(*clause, k).expect("formula clauses are valid shapes");
        bits[j - 1] = true;
    }
    bits
}

pub fn decode(bits: &[bool], k: usize) -> Result<CnfFormula, SatError> {
    if bits.len() != clause_count(k) {
        return Err(SatError::EncodingLength {
            expected: clause_count(k),
            actual: bits.len(),
        });
    }
    let clauses = bits
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(j, _)| phi(j + 1, k))
        .collect::<Result<BTreeSet<_>, _>>()?;
    Ok(CnfFormula {
        variables: k,
        clauses,
    })
}

/// `t`/`f` string, index 1 leftmost.
pub fn encoding_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { 't' } else { 'f' }).collect()
}

/// Exhaustive satisfiability check over all `2^k` assignments.
pub fn brute_sat(formula: &CnfFormula) -> Result<bool, SatError> {
    let k = formula.variables;
    if k > MAX_BRUTE_FORCE_VARIABLES {
        return Err(SatError::TooManyVariables(k));
    }
    Ok((0u32..1 << k).any(|mask| {
        formula.clauses.iter().all(|c| {
            c.literals()
                .iter()
                .any(|&(v, positive)| (mask >> (v - 1) & 1 == 1) == positive)
        })
    }))
}

fn aux_get(i: usize) -> Action {
    Action::focused(Focus::Aux(i), Method::Get)
}

/// Five instructions testing the current assignment against one clause,
/// `±aux:l.get; #2; ±aux:m.get; #2; ±aux:n.get`.
pub fn check_snippet(shape: ClauseShape) -> InstructionSequence {
    let mut out = SequenceBuilder::new();
    for (j, (v, positive)) in shape.literals().into_iter().enumerate() {
        if j > 0 {
            out.push(Instruction::FwdJump(2));
        }
        out.push(if positive {
            Instruction::PosTest(aux_get(v))
        } else {
            Instruction::NegTest(aux_get(v))
        });
    }
    out.build().expect("non-empty")
}

/// Binary counter over `aux:1 .. aux:k`, least significant first. Ends with
/// `!f` once it wraps around to all `t`.
pub fn next_snippet(k: usize) -> Result<InstructionSequence, SatError> {
    if k == 0 {
        return Err(SatError::NoVariables);
    }
    let mut out = SequenceBuilder::new();
    for i in 1..=k {
        let last = i == k;
        out.push(Instruction::NegTest(aux_get(i)));
        out.push(Instruction::FwdJump(3));
        out.push(Instruction::Basic(Action::focused(Focus::Aux(i), Method::SetF)));
        out.push(Instruction::FwdJump(if last { 3 } else { 5 }));
        out.push(Instruction::Basic(Action::focused(Focus::Aux(i), Method::SetT)));
        if last {
            out.push(Instruction::TermF);
        }
    }
    Ok(out.build().expect("non-empty"))
}

/// `72k^3 + 5k + 1`
pub fn sat_program_length(k: usize) -> usize {
    72 * k.pow(3) + 5 * k + 1
}

/// The looping 3SAT(k) decision program `CHECK; NEXT; \#(72k^3 + 5k)`.
///
/// `CHECK` wraps every clause check: clause `m < 8k^3` becomes
/// `-in:m.get; #8; CHECK_phi(m); #2; #9` and the last one
/// `-in:8k^3.get; #6; CHECK_phi(8k^3); !t`. An unsatisfied clause falls
/// through the chain of `#9` jumps to `NEXT`.
pub fn gen_3sat(k: usize) -> Result<InstructionSequence, SatError> {
    if k == 0 {
        return Err(SatError::NoVariables);
    }
    let total = clause_count(k);
    let mut out = SequenceBuilder::new();
    for m in 1..=total {
        out.push(Instruction::NegTest(Action::focused(Focus::Input(m), Method::Get)));
        if m < total {
            out.push(Instruction::FwdJump(8));
            out.extend(&check_snippet(phi(m, k)?));
            out.push(Instruction::FwdJump(2));
            out.push(Instruction::FwdJump(9));
        } else {
            out.push(Instruction::FwdJump(6));
            out.extend(&check_snippet(phi(m, k)?));
            out.push(Instruction::TermT);
        }
    }
    out.extend(&next_snippet(k)?);
    out.push(Instruction::BwdJump(72 * k.pow(3) + 5 * k));
    Ok(out.build().expect("non-empty"))
}

/// Reads DIMACS CNF where every clause has exactly three literals.
///
/// Literals in a clause are ordered by variable, positive before negative,
/// before being turned into a shape.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, SatError> {
    let err = |line, message: &str| SatError::Dimacs {
        line,
        message: message.to_string(),
    };
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut pending: Vec<i64> = Vec::new();
    let mut last_line = 0;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
            continue;
        }
        if trimmed.starts_with('p') {
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if header.is_some() {
                return Err(err(line, "duplicate problem line"));
            }
            match fields.as_slice() {
                ["p", "cnf", vars, count] => {
                    let vars = vars.parse().map_err(|_| err(line, "bad variable count"))?;
                    let count = count.parse().map_err(|_| err(line, "bad clause count"))?;
                    header = Some((vars, count));
                }
                _ => return Err(err(line, "expected `p cnf <vars> <clauses>`")),
            }
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(err(line, "clause before problem line"));
        };
        for tok in trimmed.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| err(line, "bad literal"))?;
            if lit != 0 {
                if lit.unsigned_abs() as usize > vars {
                    return Err(err(line, "literal exceeds the declared variable count"));
                }
                pending.push(lit);
                continue;
            }
            let Ok(mut lits) = <[i64; 3]>::try_from(std::mem::take(&mut pending)) else {
                return Err(err(line, "clauses must have exactly three literals"));
            };
            lits.sort_by_key(|&l| (l.unsigned_abs(), l < 0));
            clauses.push(ClauseShape::from_literals(
                lits.map(|l| (l.unsigned_abs() as usize, l > 0)),
            ));
        }
    }
    let Some((vars, count)) = header else {
        return Err(err(last_line.max(1), "missing problem line"));
    };
    if !pending.is_empty() {
        return Err(err(last_line, "unterminated clause"));
    }
    if clauses.len() != count {
        return Err(err(last_line, "clause count differs from the problem line"));
    }
    CnfFormula::new(vars, clauses)
}
