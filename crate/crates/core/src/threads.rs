//! Threads: finite thread terms and regular threads as finite graphs.
//!
//! A regular thread is a closed graph whose nodes are `S+`, `S-`, `D` or a
//! postconditional composition `T ⊴ a ⊵ T'`; each node is one equation of a
//! finite guarded recursive specification. The action prefix `a ∘ T` is the
//! postconditional whose two branches are the same node.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::{self, Write as _};
use std::sync::Arc;

use thiserror::Error;

use crate::isa::Action;

pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    SPlus,
    SMinus,
    Deadlock,
    Post {
        action: Action,
        on_true: StateId,
        on_false: StateId,
    },
}

impl Node {
    pub fn post(action: Action, on_true: StateId, on_false: StateId) -> Self {
        Node::Post {
            action,
            on_true,
            on_false,
        }
    }

    pub fn prefix(action: Action, next: StateId) -> Self {
        Node::post(action, next, next)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThreadError {
    #[error("thread graph has no states")]
    NoStates,
    #[error("state {from} refers to missing state {to}")]
    DanglingEdge { from: StateId, to: StateId },
    #[error("root {0} is not a state")]
    BadRoot(StateId),
}

/// A finite-state thread.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularThread {
    nodes: Vec<Node>,
    root: StateId,
}

impl RegularThread {
    pub fn new(nodes: Vec<Node>, root: StateId) -> Result<Self, ThreadError> {
        if nodes.is_empty() {
            return Err(ThreadError::NoStates);
        }
        if root >= nodes.len() {
            return Err(ThreadError::BadRoot(root));
        }
        for (from, node) in nodes.iter().enumerate() {
            if let Node::Post {
                on_true, on_false, ..
            } = node
            {
                for &to in [on_true, on_false] {
                    if to >= nodes.len() {
                        return Err(ThreadError::DanglingEdge { from, to });
                    }
                }
            }
        }
        Ok(RegularThread { nodes, root })
    }

    fn terminal(node: Node) -> Self {
        RegularThread {
            nodes: vec![node],
            root: 0,
        }
    }

    pub fn deadlock() -> Self {
        Self::terminal(Node::Deadlock)
    }

    pub fn success() -> Self {
        Self::terminal(Node::SPlus)
    }

    pub fn failure() -> Self {
        Self::terminal(Node::SMinus)
    }

    /// `T = a ∘ T`.
    pub fn prefix_loop(action: Action) -> Self {
        Self::terminal(Node::prefix(action, 0))
    }

    /// Embeds a finite term as a graph (one state per subterm occurrence).
    pub fn from_finite(term: &FiniteThread) -> Self {
        fn add(term: &FiniteThread, nodes: &mut Vec<Node>) -> StateId {
            let id = nodes.len();
            nodes.push(Node::Deadlock);
            let node = match term {
                FiniteThread::SPlus => Node::SPlus,
                FiniteThread::SMinus => Node::SMinus,
                FiniteThread::Deadlock => Node::Deadlock,
                FiniteThread::Post(a, x, y) => {
                    let x_id = add(x, nodes);
                    let y_id = if Arc::ptr_eq(x, y) || x == y {
                        x_id
                    } else {
                        add(y, nodes)
                    };
                    Node::post(a.clone(), x_id, y_id)
                }
            };
            nodes[id] = node;
            id
        }
        let mut nodes = Vec::new();
        add(term, &mut nodes);
        RegularThread { nodes, root: 0 }
    }

    pub fn root(&self) -> StateId {
        self.root
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: StateId) -> &Node {
        &self.nodes[id]
    }

    pub fn state_count(&self) -> usize {
        self.nodes.len()
    }

    /// The same graph viewed from another state.
    pub fn with_root(&self, root: StateId) -> Result<Self, ThreadError> {
        Self::new(self.nodes.clone(), root)
    }

    /// States reachable from the root, in breadth-first order.
    pub fn reachable(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.root]);
        seen[self.root] = true;
        while let Some(s) = queue.pop_front() {
            order.push(s);
            if let Node::Post {
                on_true, on_false, ..
            } = &self.nodes[s]
            {
                for &t in [on_true, on_false] {
                    if !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        order
    }

    /// `π_n(T)`: cut the thread off after `n` actions.
    pub fn project(&self, n: usize) -> FiniteThread {
        let mut memo = HashMap::new();
        project_state(&self.nodes, self.root, n, &mut memo).as_ref().clone()
    }

    /// Graphviz rendering: one node per reachable state, labeled edges for
    /// the two replies of every postconditional.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph thread {\n  rankdir=TB;\n");
        for s in self.reachable() {
            let (label, shape) = match &self.nodes[s] {
                Node::SPlus => ("S+".to_string(), "box"),
                Node::SMinus => ("S-".to_string(), "box"),
                Node::Deadlock => ("D".to_string(), "box"),
                Node::Post { action, .. } => (action.to_string(), "ellipse"),
            };
            let _ = writeln!(out, "  s{s} [label=\"{}\", shape={shape}];", escape_dot(&label));
            if let Node::Post {
                on_true, on_false, ..
            } = &self.nodes[s]
            {
                let _ = writeln!(out, "  s{s} -> s{on_true} [label=\"t\"];");
                let _ = writeln!(out, "  s{s} -> s{on_false} [label=\"f\"];");
            }
        }
        out.push_str("}\n");
        out
    }

    /// Recursive specification in equation form, `E0 = a ∘ E1` and so on.
    ///
    /// The root and every reachable state entered from two or more places get
    /// a name; everything else is written inline.
    pub fn specification(&self) -> String {
        let order = self.reachable();
        let mut indegree: HashMap<StateId, usize> = HashMap::new();
        for &s in &order {
            if let Node::Post {
                on_true, on_false, ..
            } = &self.nodes[s]
            {
                *indegree.entry(*on_true).or_default() += 1;
                if on_false != on_true {
                    *indegree.entry(*on_false).or_default() += 1;
                }
            }
        }
        let mut names: BTreeMap<StateId, usize> = BTreeMap::new();
        let mut named_order = Vec::new();
        for &s in &order {
            let terminal = !matches!(self.nodes[s], Node::Post { .. });
            let shared = indegree.get(&s).copied().unwrap_or(0) >= 2;
            if s == self.root || (shared && !terminal) {
                names.insert(s, named_order.len());
                named_order.push(s);
            }
        }
        let mut out = String::new();
        for &s in &named_order {
            let mut body = String::new();
            self.write_inline(s, &names, true, &mut body);
            let _ = writeln!(out, "E{} = {}", names[&s], body);
        }
        out
    }

    fn write_inline(
        &self,
        s: StateId,
        names: &BTreeMap<StateId, usize>,
        top: bool,
        out: &mut String,
    ) {
        if !top {
            if let Some(n) = names.get(&s) {
                let _ = write!(out, "E{n}");
                return;
            }
        }
        match &self.nodes[s] {
            Node::SPlus => out.push_str("S+"),
            Node::SMinus => out.push_str("S-"),
            Node::Deadlock => out.push('D'),
            Node::Post {
                action,
                on_true,
                on_false,
            } => {
                let is_post = |t: StateId| {
                    !names.contains_key(&t)
                        && matches!(&self.nodes[t], Node::Post { on_true, on_false, .. } if on_true != on_false)
                };
                if on_true == on_false {
                    let _ = write!(out, "{action} ∘ ");
                    let paren = is_post(*on_true);
                    if paren {
                        out.push('(');
                    }
                    self.write_inline(*on_true, names, false, out);
                    if paren {
                        out.push(')');
                    }
                } else {
                    for (branch, sep) in [(*on_true, Some(action)), (*on_false, None)] {
                        let paren = is_post(branch);
                        if paren {
                            out.push('(');
                        }
                        self.write_inline(branch, names, false, out);
                        if paren {
                            out.push(')');
                        }
                        if let Some(a) = sep {
                            let _ = write!(out, " ⊴ {a} ⊵ ");
                        }
                    }
                }
            }
        }
    }
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn project_state(
    nodes: &[Node],
    s: StateId,
    n: usize,
    memo: &mut HashMap<(StateId, usize), Arc<FiniteThread>>,
) -> Arc<FiniteThread> {
    if n == 0 {
        return Arc::new(FiniteThread::Deadlock);
    }
    if let Some(t) = memo.get(&(s, n)) {
        return t.clone();
    }
    let t = match &nodes[s] {
        Node::SPlus => Arc::new(FiniteThread::SPlus),
        Node::SMinus => Arc::new(FiniteThread::SMinus),
        Node::Deadlock => Arc::new(FiniteThread::Deadlock),
        Node::Post {
            action,
            on_true,
            on_false,
        } => {
            let x = project_state(nodes, *on_true, n - 1, memo);
            let y = project_state(nodes, *on_false, n - 1, memo);
            Arc::new(FiniteThread::Post(action.clone(), x, y))
        }
    };
    memo.insert((s, n), t.clone());
    t
}

/// A finite thread term. Subterms may be shared, equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FiniteThread {
    SPlus,
    SMinus,
    Deadlock,
    Post(Action, Arc<FiniteThread>, Arc<FiniteThread>),
}

impl FiniteThread {
    pub fn post(on_true: FiniteThread, action: Action, on_false: FiniteThread) -> Self {
        FiniteThread::Post(action, Arc::new(on_true), Arc::new(on_false))
    }

    /// `a ∘ T`
    pub fn prefix(action: Action, next: FiniteThread) -> Self {
        let next = Arc::new(next);
        FiniteThread::Post(action, next.clone(), next)
    }

    pub fn depth(&self) -> usize {
        match self {
            FiniteThread::Post(_, x, y) => 1 + x.depth().max(y.depth()),
            _ => 0,
        }
    }

    pub fn project(&self, n: usize) -> FiniteThread {
        if n == 0 {
            return FiniteThread::Deadlock;
        }
        match self {
            FiniteThread::Post(a, x, y) => FiniteThread::Post(
                a.clone(),
                Arc::new(x.project(n - 1)),
                Arc::new(y.project(n - 1)),
            ),
            leaf => leaf.clone(),
        }
    }

    fn is_branching(&self) -> bool {
        matches!(self, FiniteThread::Post(_, x, y) if x != y)
    }
}

impl fmt::Display for FiniteThread {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |t: &FiniteThread, f: &mut fmt::Formatter<'_>| {
            if t.is_branching() {
                write!(f, "({t})")
            } else {
                write!(f, "{t}")
            }
        };
        match self {
            FiniteThread::SPlus => f.write_str("S+"),
            FiniteThread::SMinus => f.write_str("S-"),
            FiniteThread::Deadlock => f.write_str("D"),
            FiniteThread::Post(a, x, y) if x == y => {
                write!(f, "{a} ∘ ")?;
                sub(x, f)
            }
            FiniteThread::Post(a, x, y) => {
                sub(x, f)?;
                write!(f, " ⊴ {a} ⊵ ")?;
                sub(y, f)
            }
        }
    }
}

/// Structural equality of two finite terms in time linear in the number of
/// distinct subterms (derived `==` re-walks shared subterms).
pub fn term_eq(left: &FiniteThread, right: &FiniteThread) -> bool {
    let mut interner = TermInterner::default();
    interner.id(left) == interner.id(right)
}

#[derive(Default)]
struct TermInterner<'a> {
    by_ptr: HashMap<*const FiniteThread, usize>,
    by_shape: HashMap<(u8, Option<&'a Action>, usize, usize), usize>,
}

impl<'a> TermInterner<'a> {
    fn id(&mut self, term: &'a FiniteThread) -> usize {
        let ptr = term as *const FiniteThread;
        if let Some(&id) = self.by_ptr.get(&ptr) {
            return id;
        }
        let shape = match term {
            FiniteThread::SPlus => (0, None, 0, 0),
            FiniteThread::SMinus => (1, None, 0, 0),
            FiniteThread::Deadlock => (2, None, 0, 0),
            FiniteThread::Post(a, x, y) => (3, Some(a), self.id(x), self.id(y)),
        };
        let next = self.by_shape.len();
        let id = *self.by_shape.entry(shape).or_insert(next);
        self.by_ptr.insert(ptr, id);
        id
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Label<'a> {
    SPlus,
    SMinus,
    Deadlock,
    Post(&'a Action),
}

fn label(node: &Node) -> Label<'_> {
    match node {
        Node::SPlus => Label::SPlus,
        Node::SMinus => Label::SMinus,
        Node::Deadlock => Label::Deadlock,
        Node::Post { action, .. } => Label::Post(action),
    }
}

/// Bisimilarity of the two roots, by partition refinement over the disjoint
/// union of both graphs.
///
/// Blocks start as label classes (`S+`, `S-`, `D`, one per action) and are
/// split by the pair of blocks reached on reply `t` and reply `f` until no
/// block splits.
pub fn bisimilar(left: &RegularThread, right: &RegularThread) -> bool {
    let offset = left.nodes.len();
    let nodes: Vec<&Node> = left.nodes.iter().chain(right.nodes.iter()).collect();
    let succ = |s: StateId| -> Option<(StateId, StateId)> {
        match nodes[s] {
            Node::Post {
                on_true, on_false, ..
            } => {
                let shift = if s >= offset { offset } else { 0 };
                Some((on_true + shift, on_false + shift))
            }
            _ => None,
        }
    };

    let mut block: Vec<usize> = {
        let mut ids: HashMap<Label<'_>, usize> = HashMap::new();
        nodes
            .iter()
            .map(|n| {
                let next = ids.len();
                *ids.entry(label(n)).or_insert(next)
            })
            .collect()
    };
    let mut count = block.iter().copied().max().map_or(0, |m| m + 1);
    loop {
        let mut ids: HashMap<(usize, Option<(usize, usize)>), usize> = HashMap::new();
        let refined: Vec<usize> = (0..nodes.len())
            .map(|s| {
                let key = (block[s], succ(s).map(|(x, y)| (block[x], block[y])));
                let next = ids.len();
                *ids.entry(key).or_insert(next)
            })
            .collect();
        let refined_count = ids.len();
        block = refined;
        if refined_count == count {
            break;
        }
        count = refined_count;
    }
    block[left.root] == block[right.root + offset]
}

/// Checks `π_n(T) = π_n(U)` as terms for every `n ≤ depth`.
///
/// Equality at depth `n` implies equality at every smaller depth, so only
/// `depth` itself is evaluated, bottom-up over pairs of states.
pub fn aip_equal(left: &RegularThread, right: &RegularThread, depth: usize) -> bool {
    let (ls, rs) = (left.nodes.len(), right.nodes.len());
    // equal[s][t] holds for π_n at the current n; n = 0 makes everything D.
    let mut equal = vec![true; ls * rs];
    for _ in 1..=depth {
        let prev = equal.clone();
        for s in 0..ls {
            for t in 0..rs {
                equal[s * rs + t] = match (&left.nodes[s], &right.nodes[t]) {
                    (Node::SPlus, Node::SPlus)
                    | (Node::SMinus, Node::SMinus)
                    | (Node::Deadlock, Node::Deadlock) => true,
                    (
                        Node::Post {
                            action: a,
                            on_true: x,
                            on_false: y,
                        },
                        Node::Post {
                            action: b,
                            on_true: u,
                            on_false: v,
                        },
                    ) => a == b && prev[x * rs + u] && prev[y * rs + v],
                    _ => false,
                };
            }
        }
    }
    equal[left.root * rs + right.root]
}
