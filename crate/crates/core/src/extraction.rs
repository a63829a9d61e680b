//! Thread extraction `|i, u_1; ...; u_k|`.
//!
//! Every non-jump position becomes one state of the result graph; jump
//! positions are followed until they reach such a position and are contracted
//! away. State `0` is a shared `D` that absorbs position 0, positions past the
//! end, and infinite jump chains.

use crate::isa::{Instruction, InstructionSequence};
use crate::threads::{Node, RegularThread, StateId};

/// Where a chain of jumps starting at some position ends up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpTarget {
    /// A non-jump instruction at this 1-based position.
    Position(usize),
    /// Position 0 or a position after the last instruction.
    OutOfRange,
    /// The chain revisits a jump instruction and never reaches an action.
    Divergent,
}

/// Follows `#l` and `\#l` transitively from position `i`.
pub fn resolve_jumps(seq: &InstructionSequence, i: usize) -> JumpTarget {
    let k = seq.len();
    let mut visited = vec![false; k + 1];
    let mut pos = i;
    loop {
        if pos == 0 || pos > k {
            return JumpTarget::OutOfRange;
        }
        if visited[pos] {
            return JumpTarget::Divergent;
        }
        visited[pos] = true;
        pos = match seq.get(pos) {
            Some(Instruction::FwdJump(l)) => pos.saturating_add(*l),
            // i <= l sends us to position 0
            Some(Instruction::BwdJump(l)) => pos.saturating_sub(*l),
            _ => return JumpTarget::Position(pos),
        };
    }
}

const DEADLOCK: StateId = 0;

/// State ids of the extraction graph of `seq`, indexed by position
/// (`None` for jumps and for position 0).
fn state_ids(seq: &InstructionSequence) -> Vec<Option<StateId>> {
    let mut next = 1;
    let mut ids = vec![None; seq.len() + 1];
    for (j, u) in seq.instructions().iter().enumerate() {
        if !u.is_jump() {
            ids[j + 1] = Some(next);
            next += 1;
        }
    }
    ids
}

/// For each state of an extracted graph, the instruction position it came
/// from (`None` for the shared deadlock state).
pub fn state_positions(seq: &InstructionSequence) -> Vec<Option<usize>> {
    let mut positions = vec![None];
    positions.extend(
        seq.instructions()
            .iter()
            .enumerate()
            .filter(|(_, u)| !u.is_jump())
            .map(|(j, _)| Some(j + 1)),
    );
    positions
}

/// `|i, I|` as a regular thread.
pub fn extract_at(seq: &InstructionSequence, i: usize) -> RegularThread {
    let ids = state_ids(seq);
    let state_of = |pos: usize| -> StateId {
        match resolve_jumps(seq, pos) {
            JumpTarget::Position(p) => ids[p].expect("resolved positions hold non-jump instructions"),
            JumpTarget::OutOfRange | JumpTarget::Divergent => DEADLOCK,
        }
    };
    let mut nodes = vec![Node::Deadlock];
    for (j, u) in seq.instructions().iter().enumerate() {
        let pos = j + 1;
        let node = match u {
            Instruction::Basic(a) => Node::prefix(a.clone(), state_of(pos + 1)),
            Instruction::PosTest(a) => Node::post(a.clone(), state_of(pos + 1), state_of(pos + 2)),
            Instruction::NegTest(a) => Node::post(a.clone(), state_of(pos + 2), state_of(pos + 1)),
            Instruction::TermT => Node::SPlus,
            Instruction::TermF => Node::SMinus,
            Instruction::FwdJump(_) | Instruction::BwdJump(_) => continue,
        };
        nodes.push(node);
    }
    let root = state_of(i);
    RegularThread::new(nodes, root).expect("extraction graph is closed")
}

/// `|I| = |1, I|`.
pub fn extract(seq: &InstructionSequence) -> RegularThread {
    extract_at(seq, 1)
}
