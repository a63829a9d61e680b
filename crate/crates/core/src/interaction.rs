//! Thread/service interaction: the use operator `T / u`, the reply operator
//! `T ! u`, and the partial-function computation built from them.
//!
//! Both operators run over configurations `(thread state, family state)`.
//! Family states are interned by their canonical keys, so a revisited
//! configuration is detected exactly; for the reply operator that means
//! nontermination and the reply is `d`.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::extraction::{extract, state_positions};
use crate::isa::{Action, Focus, Instruction, InstructionSequence, Method};
use crate::services::{aux_family, input_family, Reply, ServiceFamily};
use crate::threads::{FiniteThread, Node, RegularThread, StateId};

pub const DEFAULT_CONFIGURATION_CAP: usize = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Upper bound on distinct configurations explored by one operation.
    pub max_configurations: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_configurations: DEFAULT_CONFIGURATION_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InteractionError {
    #[error("configuration space exceeds the cap of {cap} states")]
    StateCapExceeded { cap: usize },
}

type FamilyId = usize;

/// Interned family states and a cache of their transitions.
#[derive(Debug, Default)]
struct FamilyTable {
    families: Vec<ServiceFamily>,
    ids: HashMap<Vec<(Focus, String)>, FamilyId>,
    steps: HashMap<(FamilyId, Focus, Method), Option<(Reply, FamilyId)>>,
}

impl FamilyTable {
    fn intern(&mut self, family: ServiceFamily) -> FamilyId {
        match self.ids.entry(family.state_keys()) {
            Entry::Occupied(e) => *e.get(),
            Entry::Vacant(e) => {
                let id = self.families.len();
                self.families.push(family);
                e.insert(id);
                id
            }
        }
    }

    /// Processes `focus.method`; `None` when no service carries that focus.
    fn step(&mut self, id: FamilyId, focus: &Focus, method: &Method) -> Option<(Reply, FamilyId)> {
        let key = (id, focus.clone(), method.clone());
        if let Some(hit) = self.steps.get(&key) {
            return *hit;
        }
        let result = self.families[id].get(focus).cloned().map(|service| {
            let reply = service.reply(method);
            let next = service.derive(method);
            let next_id = if next.canonical_key() == service.canonical_key() {
                id
            } else {
                let updated = self.families[id].replace(focus, next);
                self.intern(updated)
            };
            (reply, next_id)
        });
        self.steps.insert(key, result);
        result
    }
}

/// `T / u`, materialized over the reachable configurations.
pub fn use_apply(thread: &RegularThread, family: &ServiceFamily) -> Result<RegularThread, InteractionError> {
    use_apply_with(thread, family, Limits::default())
}

pub fn use_apply_with(
    thread: &RegularThread,
    family: &ServiceFamily,
    limits: Limits,
) -> Result<RegularThread, InteractionError> {
    if limits.max_configurations == 0 {
        return Err(InteractionError::StateCapExceeded { cap: 0 });
    }
    let mut table = FamilyTable::default();
    let start = (thread.root(), table.intern(family.clone()));
    let mut ids: HashMap<(StateId, FamilyId), StateId> = HashMap::from([(start, 0)]);
    let mut queue = VecDeque::from([start]);
    let mut nodes: Vec<Node> = vec![Node::Deadlock];

    let visit = |config: (StateId, FamilyId),
                     ids: &mut HashMap<(StateId, FamilyId), StateId>,
                     queue: &mut VecDeque<(StateId, FamilyId)>,
                     nodes: &mut Vec<Node>|
     -> Result<StateId, InteractionError> {
        if let Some(&id) = ids.get(&config) {
            return Ok(id);
        }
        if ids.len() >= limits.max_configurations {
            return Err(InteractionError::StateCapExceeded {
                cap: limits.max_configurations,
            });
        }
        let id = nodes.len();
        nodes.push(Node::Deadlock);
        ids.insert(config, id);
        queue.push_back(config);
        Ok(id)
    };

    while let Some((state, fam)) = queue.pop_front() {
        let id = ids[&(state, fam)];
        let node = match thread.node(state) {
            Node::SPlus => Node::SPlus,
            Node::SMinus => Node::SMinus,
            Node::Deadlock => Node::Deadlock,
            Node::Post {
                action: Action::Tau,
                on_true,
                ..
            } => Node::prefix(Action::Tau, visit((*on_true, fam), &mut ids, &mut queue, &mut nodes)?),
            Node::Post {
                action,
                on_true,
                on_false,
            } => {
                let processed = match action {
                    Action::Focused { focus, method } => table.step(fam, focus, method),
                    _ => None,
                };
                match processed {
                    None => {
                        let x = visit((*on_true, fam), &mut ids, &mut queue, &mut nodes)?;
                        let y = visit((*on_false, fam), &mut ids, &mut queue, &mut nodes)?;
                        Node::post(action.clone(), x, y)
                    }
                    Some((Reply::True, next)) => {
                        Node::prefix(Action::Tau, visit((*on_true, next), &mut ids, &mut queue, &mut nodes)?)
                    }
                    Some((Reply::False, next)) => {
                        Node::prefix(Action::Tau, visit((*on_false, next), &mut ids, &mut queue, &mut nodes)?)
                    }
                    Some((Reply::Divergent, _)) => Node::Deadlock,
                }
            }
        };
        nodes[id] = node;
    }
    Ok(RegularThread::new(nodes, 0).expect("product graph is closed"))
}

/// `T ! u`.
pub fn reply(thread: &RegularThread, family: &ServiceFamily) -> Result<Reply, InteractionError> {
    reply_with(thread, family, Limits::default())
}

pub fn reply_with(
    thread: &RegularThread,
    family: &ServiceFamily,
    limits: Limits,
) -> Result<Reply, InteractionError> {
    let mut table = FamilyTable::default();
    let mut config = (thread.root(), table.intern(family.clone()));
    let mut seen = HashSet::new();
    loop {
        if !seen.insert(config) {
            return Ok(Reply::Divergent);
        }
        if seen.len() > limits.max_configurations {
            return Err(InteractionError::StateCapExceeded {
                cap: limits.max_configurations,
            });
        }
        let (state, fam) = config;
        config = match thread.node(state) {
            Node::SPlus => return Ok(Reply::True),
            Node::SMinus => return Ok(Reply::False),
            Node::Deadlock => return Ok(Reply::Divergent),
            Node::Post {
                action: Action::Tau,
                on_true,
                ..
            } => (*on_true, fam),
            Node::Post {
                action: Action::Focused { focus, method },
                on_true,
                on_false,
            } => match table.step(fam, focus, method) {
                Some((Reply::True, next)) => (*on_true, next),
                Some((Reply::False, next)) => (*on_false, next),
                Some((Reply::Divergent, _)) | None => return Ok(Reply::Divergent),
            },
            // no service can process a plain action
            Node::Post { .. } => return Ok(Reply::Divergent),
        };
    }
}

/// `T / u` for a finite thread.
pub fn use_apply_finite(thread: &FiniteThread, family: &ServiceFamily) -> FiniteThread {
    let mut memo = HashMap::new();
    let mut families = FamilyTable::default();
    let fam = families.intern(family.clone());
    use_finite(thread, fam, &mut families, &mut memo).as_ref().clone()
}

fn use_finite(
    thread: &FiniteThread,
    fam: FamilyId,
    families: &mut FamilyTable,
    memo: &mut HashMap<(*const FiniteThread, FamilyId), Arc<FiniteThread>>,
) -> Arc<FiniteThread> {
    let key = (thread as *const FiniteThread, fam);
    if let Some(done) = memo.get(&key) {
        return done.clone();
    }
    let result = match thread {
        FiniteThread::SPlus | FiniteThread::SMinus | FiniteThread::Deadlock => Arc::new(thread.clone()),
        FiniteThread::Post(Action::Tau, x, _) => {
            let x = use_finite(x, fam, families, memo);
            Arc::new(FiniteThread::Post(Action::Tau, x.clone(), x))
        }
        FiniteThread::Post(action, x, y) => {
            let processed = match action {
                Action::Focused { focus, method } => families.step(fam, focus, method),
                _ => None,
            };
            match processed {
                None => {
                    let x = use_finite(x, fam, families, memo);
                    let y = use_finite(y, fam, families, memo);
                    Arc::new(FiniteThread::Post(action.clone(), x, y))
                }
                Some((Reply::True, next)) => {
                    let x = use_finite(x, next, families, memo);
                    Arc::new(FiniteThread::Post(Action::Tau, x.clone(), x))
                }
                Some((Reply::False, next)) => {
                    let y = use_finite(y, next, families, memo);
                    Arc::new(FiniteThread::Post(Action::Tau, y.clone(), y))
                }
                Some((Reply::Divergent, _)) => Arc::new(FiniteThread::Deadlock),
            }
        }
    };
    memo.insert(key, result.clone());
    result
}

/// `|I| / ⊕ aux:i.B(t)` computed once, ready to be replied against any
/// number of input vectors.
#[derive(Debug, Clone)]
pub struct Computation {
    used: RegularThread,
    limits: Limits,
}

impl Computation {
    pub fn new(seq: &InstructionSequence, aux_count: usize) -> Result<Self, InteractionError> {
        Self::with_limits(seq, aux_count, Limits::default())
    }

    pub fn with_limits(
        seq: &InstructionSequence,
        aux_count: usize,
        limits: Limits,
    ) -> Result<Self, InteractionError> {
        let used = use_apply_with(&extract(seq), &aux_family(aux_count), limits)?;
        Ok(Computation { used, limits })
    }

    pub fn thread(&self) -> &RegularThread {
        &self.used
    }

    pub fn run(&self, inputs: &[bool]) -> Result<Reply, InteractionError> {
        let values: Vec<Reply> = inputs.iter().copied().map(Reply::from_bool).collect();
        reply_with(&self.used, &input_family(&values), self.limits)
    }
}

/// `(|I| / ⊕_{i=1..l} aux:i.B(t)) ! ⊕_{i=1..k} in:i.B(b_i)`.
pub fn compute(seq: &InstructionSequence, inputs: &[bool], aux_count: usize) -> Result<Reply, InteractionError> {
    Computation::new(seq, aux_count)?.run(inputs)
}

/// Which family processed an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// The auxiliary family of the use operator; the action became `tau`.
    Use,
    /// The input family of the reply operator.
    Reply,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeadlockCause {
    /// Position out of range or an infinite jump chain.
    Inaction,
    /// The service replied `d`.
    Rejected,
    /// No service is registered under the action's focus, or the action has none.
    NoService,
    /// A configuration was revisited, so the thread never terminates.
    Cycle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    Action {
        instruction: Instruction,
        reply: Reply,
        stage: Stage,
    },
    Terminate(Reply),
    Deadlock(DeadlockCause),
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    /// 1-based instruction position; `None` for the shared deadlock state.
    pub position: Option<usize>,
    pub event: Event,
}

impl Step {
    pub fn is_final(&self) -> bool {
        !matches!(self.event, Event::Action { .. })
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.position {
            Some(p) => write!(f, "{p:>6}  ")?,
            None => f.write_str("     -  ")?,
        }
        match &self.event {
            Event::Action {
                instruction,
                reply,
                stage,
            } => {
                let by = match stage {
                    Stage::Use => "use",
                    Stage::Reply => "reply",
                };
                write!(f, "{instruction} -> {reply} ({by})")
            }
            Event::Terminate(Reply::True) => f.write_str("terminate S+"),
            Event::Terminate(_) => f.write_str("terminate S-"),
            Event::Deadlock(cause) => write!(f, "deadlock ({cause:?})"),
            Event::Truncated => f.write_str("... truncated"),
        }
    }
}

/// Final reply of a trace, if it ran to completion.
pub fn trace_outcome(steps: &[Step]) -> Option<Reply> {
    match steps.last().map(|s| &s.event) {
        Some(Event::Terminate(r)) => Some(*r),
        Some(Event::Deadlock(_)) => Some(Reply::Divergent),
        _ => None,
    }
}

/// Step log of `compute(seq, inputs, aux_count)`.
///
/// Walks the extracted thread directly against both families: auxiliary foci
/// are processed as by the use operator, the remaining focused actions as by
/// the reply operator. At most `max_steps` records are produced before a
/// final `Truncated` marker.
pub fn trace(seq: &InstructionSequence, inputs: &[bool], aux_count: usize, max_steps: usize) -> Vec<Step> {
    let thread = extract(seq);
    let positions = state_positions(seq);
    let values: Vec<Reply> = inputs.iter().copied().map(Reply::from_bool).collect();
    let mut aux = FamilyTable::default();
    let mut input = FamilyTable::default();
    let mut config = (
        thread.root(),
        aux.intern(aux_family(aux_count)),
        input.intern(input_family(&values)),
    );
    let mut seen = HashSet::new();
    let mut steps = Vec::new();
    loop {
        let (state, aux_id, input_id) = config;
        let position = positions[state];
        if steps.len() >= max_steps {
            steps.push(Step {
                position,
                event: Event::Truncated,
            });
            return steps;
        }
        let mut finish = |event| {
            steps.push(Step { position, event });
        };
        if !seen.insert(config) {
            finish(Event::Deadlock(DeadlockCause::Cycle));
            return steps;
        }
        let (action, on_true, on_false) = match thread.node(state) {
            Node::SPlus => {
                finish(Event::Terminate(Reply::True));
                return steps;
            }
            Node::SMinus => {
                finish(Event::Terminate(Reply::False));
                return steps;
            }
            Node::Deadlock => {
                finish(Event::Deadlock(DeadlockCause::Inaction));
                return steps;
            }
            Node::Post {
                action,
                on_true,
                on_false,
            } => (action, *on_true, *on_false),
        };
        let instruction = position
            .and_then(|p| seq.get(p))
            .cloned()
            .unwrap_or_else(|| Instruction::Basic(action.clone()));
        let (reply, stage, next_aux, next_input) = match action {
            Action::Tau => (Reply::True, Stage::Use, aux_id, input_id),
            Action::Focused { focus, method } => {
                if let Some((r, next)) = aux.step(aux_id, focus, method) {
                    (r, Stage::Use, next, input_id)
                } else if let Some((r, next)) = input.step(input_id, focus, method) {
                    (r, Stage::Reply, aux_id, next)
                } else {
                    finish(Event::Deadlock(DeadlockCause::NoService));
                    return steps;
                }
            }
            Action::Plain(_) => {
                finish(Event::Deadlock(DeadlockCause::NoService));
                return steps;
            }
        };
        steps.push(Step {
            position,
            event: Event::Action {
                instruction,
                reply,
                stage,
            },
        });
        config = match reply {
            Reply::True => (on_true, next_aux, next_input),
            Reply::False => (on_false, next_aux, next_input),
            Reply::Divergent => {
                steps.push(Step {
                    position,
                    event: Event::Deadlock(DeadlockCause::Rejected),
                });
                return steps;
            }
        };
    }
}
