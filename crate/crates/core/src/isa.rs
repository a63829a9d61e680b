//! The PGLB_bt instruction set: primitive instructions, their concatenation,
//! and the textual syntax used throughout the crate.
//!
//! Concrete syntax, one instruction per `;` or newline:
//!
//! ```text
//! a  +a  -a  #l  \#l  !t  !f
//! ```
//!
//! Actions are either plain identifiers (`a`, `b`) or focused method calls
//! `focus.method`, where a focus is `in:n`, `aux:n` or a bare identifier.
//! `//` starts a comment that runs to the end of the line.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Name under which a service is registered in a family.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Focus {
    Input(usize),
    Aux(usize),
    /// A bare identifier such as the `0`, `1`, `2` foci of hand-written examples.
    /// Never contains `:`, which keeps rendering injective.
    Named(String),
}

impl Focus {
    pub fn is_aux(&self) -> bool {
        matches!(self, Focus::Aux(_))
    }

    pub fn is_input(&self) -> bool {
        matches!(self, Focus::Input(_))
    }
}

impl fmt::Display for Focus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Focus::Input(n) => write!(f, "in:{n}"),
            Focus::Aux(n) => write!(f, "aux:{n}"),
            Focus::Named(name) => f.write_str(name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    SetT,
    SetF,
    Get,
    Other(String),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::SetT => f.write_str("set:t"),
            Method::SetF => f.write_str("set:f"),
            Method::Get => f.write_str("get"),
            Method::Other(name) => f.write_str(name),
        }
    }
}

impl From<&str> for Method {
    fn from(s: &str) -> Self {
        match s {
            "set:t" => Method::SetT,
            "set:f" => Method::SetF,
            "get" => Method::Get,
            other => Method::Other(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Focused { focus: Focus, method: Method },
    Plain(String),
    /// Internal action produced by the use operator. Always replies true.
    Tau,
}

impl Action {
    pub fn focused(focus: Focus, method: Method) -> Self {
        Action::Focused { focus, method }
    }

    pub fn plain(name: impl Into<String>) -> Self {
        Action::Plain(name.into())
    }

    pub fn focus(&self) -> Option<&Focus> {
        match self {
            Action::Focused { focus, .. } => Some(focus),
            _ => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Focused { focus, method } => write!(f, "{focus}.{method}"),
            Action::Plain(name) => f.write_str(name),
            Action::Tau => f.write_str("tau"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Instruction {
    Basic(Action),
    PosTest(Action),
    NegTest(Action),
    FwdJump(usize),
    BwdJump(usize),
    TermT,
    TermF,
}

impl Instruction {
    pub fn action(&self) -> Option<&Action> {
        match self {
            Instruction::Basic(a) | Instruction::PosTest(a) | Instruction::NegTest(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_jump(&self) -> bool {
        matches!(self, Instruction::FwdJump(_) | Instruction::BwdJump(_))
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Basic(a) => write!(f, "{a}"),
            Instruction::PosTest(a) => write!(f, "+{a}"),
            Instruction::NegTest(a) => write!(f, "-{a}"),
            Instruction::FwdJump(l) => write!(f, "#{l}"),
            Instruction::BwdJump(l) => write!(f, "\\#{l}"),
            Instruction::TermT => f.write_str("!t"),
            Instruction::TermF => f.write_str("!f"),
        }
    }
}

/// A non-empty instruction sequence `u_1; ...; u_k`. Positions are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InstructionSequence {
    instructions: Vec<Instruction>,
}

impl InstructionSequence {
    /// Returns `None` for an empty list.
    pub fn new(instructions: Vec<Instruction>) -> Option<Self> {
        if instructions.is_empty() {
            None
        } else {
            Some(InstructionSequence { instructions })
        }
    }

    pub fn single(instruction: Instruction) -> Self {
        InstructionSequence {
            instructions: vec![instruction],
        }
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    /// The instruction at 1-based position `i`.
    pub fn get(&self, i: usize) -> Option<&Instruction> {
        i.checked_sub(1).and_then(|j| self.instructions.get(j))
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// `I; J`.
    pub fn concat(&self, other: &InstructionSequence) -> InstructionSequence {
        let mut instructions = self.instructions.clone();
        instructions.extend(other.instructions.iter().cloned());
        InstructionSequence { instructions }
    }

    pub fn is_loop_free(&self) -> bool {
        !self
            .instructions
            .iter()
            .any(|u| matches!(u, Instruction::BwdJump(_)))
    }

    pub fn foci_used(&self) -> BTreeSet<Focus> {
        self.instructions
            .iter()
            .filter_map(|u| u.action().and_then(Action::focus).cloned())
            .collect()
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for InstructionSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, u) in self.instructions.iter().enumerate() {
            if j > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{u}")?;
        }
        Ok(())
    }
}

impl FromStr for InstructionSequence {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Builds sequences piece by piece; used by the code generators.
#[derive(Debug, Default, Clone)]
pub struct SequenceBuilder {
    instructions: Vec<Instruction>,
}

impl SequenceBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, instruction: Instruction) -> &mut Self {
        self.instructions.push(instruction);
        self
    }

    pub fn extend(&mut self, seq: &InstructionSequence) -> &mut Self {
        self.instructions.extend(seq.instructions().iter().cloned());
        self
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn build(self) -> Option<InstructionSequence> {
        InstructionSequence::new(self.instructions)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty instruction sequence")]
    Empty,
    #[error("line {line}, column {column}: {message}: `{token}`")]
    Syntax {
        line: usize,
        column: usize,
        token: String,
        message: &'static str,
    },
}

/// Parses the textual form of an instruction sequence.
pub fn parse(text: &str) -> Result<InstructionSequence, ParseError> {
    let mut instructions = Vec::new();
    for (line_no, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find("//") {
            Some(at) => &raw_line[..at],
            None => raw_line,
        };
        let mut offset = 0;
        for piece in line.split(';') {
            let lead = piece.len() - piece.trim_start().len();
            let token = piece.trim();
            if !token.is_empty() {
                let column = raw_line[..offset + lead].chars().count() + 1;
                let instruction = parse_instruction(token).map_err(|message| ParseError::Syntax {
                    line: line_no + 1,
                    column,
                    token: token.to_string(),
                    message,
                })?;
                instructions.push(instruction);
            }
            offset += piece.len() + 1;
        }
    }
    InstructionSequence::new(instructions).ok_or(ParseError::Empty)
}

fn parse_instruction(token: &str) -> Result<Instruction, &'static str> {
    match token {
        "!t" => return Ok(Instruction::TermT),
        "!f" => return Ok(Instruction::TermF),
        _ => {}
    }
    if let Some(rest) = token.strip_prefix("\\#") {
        return parse_nat(rest).map(Instruction::BwdJump);
    }
    if let Some(rest) = token.strip_prefix('#') {
        return parse_nat(rest).map(Instruction::FwdJump);
    }
    if let Some(rest) = token.strip_prefix('+') {
        return parse_action(rest).map(Instruction::PosTest);
    }
    // U+2212 is accepted so that text copied from typeset sources parses.
    if let Some(rest) = token.strip_prefix('-').or_else(|| token.strip_prefix('\u{2212}')) {
        return parse_action(rest).map(Instruction::NegTest);
    }
    parse_action(token).map(Instruction::Basic)
}

fn parse_nat(s: &str) -> Result<usize, &'static str> {
    let s = s.trim();
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err("expected a jump length");
    }
    s.parse().map_err(|_| "jump length out of range")
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_action(s: &str) -> Result<Action, &'static str> {
    if s.is_empty() {
        return Err("missing action");
    }
    let Some((focus, method)) = s.split_once('.') else {
        if s == "tau" {
            return Err("`tau` is reserved");
        }
        if !is_ident(s) {
            return Err("malformed action");
        }
        return Ok(Action::plain(s));
    };
    if method.is_empty()
        || !method
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == ':')
    {
        return Err("malformed method");
    }
    let focus = if let Some(n) = focus.strip_prefix("in:") {
        Focus::Input(parse_index(n)?)
    } else if let Some(n) = focus.strip_prefix("aux:") {
        Focus::Aux(parse_index(n)?)
    } else if is_ident(focus) {
        Focus::Named(focus.to_string())
    } else {
        return Err("malformed focus");
    };
    Ok(Action::focused(focus, Method::from(method)))
}

fn parse_index(s: &str) -> Result<usize, &'static str> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err("malformed register index");
    }
    s.parse().map_err(|_| "register index out of range")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_x() -> InstructionSequence {
        parse("a; +b; #2; #3; c; \\#4; +d; !t; !f").unwrap()
    }

    #[test]
    fn single_termination() {
        let seq = parse("!t").unwrap();
        assert_eq!(seq.instructions(), &[Instruction::TermT]);
        assert_eq!(seq.len(), 1);
        assert!(seq.is_loop_free());
        assert!(seq.foci_used().is_empty());
        assert_eq!(seq.render(), "!t");
    }

    #[test]
    fn example_one_sequence() {
        let x = example_x();
        assert_eq!(x.len(), 9);
        assert_eq!(x.get(6), Some(&Instruction::BwdJump(4)));
        assert_eq!(x.get(2), Some(&Instruction::PosTest(Action::plain("b"))));
        assert_eq!(x.render(), "a; +b; #2; #3; c; \\#4; +d; !t; !f");
        assert!(!x.is_loop_free());
    }

    #[test]
    fn focused_tokens() {
        let seq = parse("+in:1.get; #2; !t; !f").unwrap();
        assert_eq!(
            seq.instructions(),
            &[
                Instruction::PosTest(Action::focused(Focus::Input(1), Method::Get)),
                Instruction::FwdJump(2),
                Instruction::TermT,
                Instruction::TermF,
            ]
        );
        let seq = parse("aux:0.set:f; -x.set:t; q.frob").unwrap();
        assert_eq!(
            seq.instructions(),
            &[
                Instruction::Basic(Action::focused(Focus::Aux(0), Method::SetF)),
                Instruction::NegTest(Action::focused(Focus::Named("x".into()), Method::SetT)),
                Instruction::Basic(Action::focused(
                    Focus::Named("q".into()),
                    Method::Other("frob".into())
                )),
            ]
        );
    }

    #[test]
    fn backward_loop() {
        let seq = parse("a; \\#1").unwrap();
        assert_eq!(seq.render(), "a; \\#1");
        assert!(!seq.is_loop_free());
    }

    #[test]
    fn named_numeric_foci() {
        let eq = parse("+1.get;#2;#4;+2.get;!t;!f;-2.get;\\#3;\\#3").unwrap();
        let foci: Vec<_> = eq.foci_used().into_iter().collect();
        assert_eq!(foci, vec![Focus::Named("1".into()), Focus::Named("2".into())]);
    }

    #[test]
    fn newlines_comments_and_unicode_minus() {
        let seq = parse("// header\n\u{2212}in:1.get  // test\n#2;\n!t\n\n!f\n").unwrap();
        assert_eq!(seq.render(), "-in:1.get; #2; !t; !f");
    }

    #[test]
    fn jump_zero_is_legal() {
        let seq = parse("#0").unwrap();
        assert_eq!(seq.instructions(), &[Instruction::FwdJump(0)]);
    }

    #[test]
    fn errors_carry_position() {
        assert_eq!(parse("   \n // only comment\n"), Err(ParseError::Empty));
        match parse("a; #x; !t") {
            Err(ParseError::Syntax { line, column, token, .. }) => {
                assert_eq!((line, column), (1, 4));
                assert_eq!(token, "#x");
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse("!t\n  in:.get") {
            Err(ParseError::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("tau").is_err());
        assert!(parse("+").is_err());
        assert!(parse("a.").is_err());
        assert!(parse("in:x.get").is_err());
        assert!(parse("!x").is_err());
    }

    #[test]
    fn concat_lengths_add() {
        let x = example_x();
        let y = parse("!t; !f").unwrap();
        assert_eq!(x.concat(&y).len(), x.len() + y.len());
        assert_eq!(x.concat(&y).get(10), Some(&Instruction::TermT));
    }
}
