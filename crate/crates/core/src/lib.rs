//! PGLB_bt instruction sequences and their behaviour.
//!
//! * [`isa`]: instructions, sequences, text syntax
//! * [`threads`]: finite and regular threads, projection, bisimilarity
//! * [`extraction`]: instruction sequence to thread
//! * [`services`]: Boolean registers and service families
//! * [`interaction`]: use and reply operators, computing partial functions
//! * [`synthesis`]: loop-free compilers for truth tables and circuits
//! * [`sat3`]: the looping 3SAT decision program
//! * [`oracle`]: brute-force reference evaluators

pub mod extraction;
pub mod interaction;
pub mod isa;
pub mod oracle;
pub mod sat3;
pub mod services;
pub mod synthesis;
pub mod threads;

pub use extraction::{extract, extract_at, resolve_jumps, JumpTarget};
pub use interaction::{compute, reply, trace, use_apply, Computation, InteractionError, Limits};
pub use isa::{parse, Action, Focus, Instruction, InstructionSequence, Method, ParseError};
pub use services::{BooleanRegister, Reply, Service, ServiceFamily};
pub use threads::{aip_equal, bisimilar, term_eq, FiniteThread, Node, RegularThread};
