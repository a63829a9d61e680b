use std::collections::HashMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pglb::interaction::trace_outcome;
use pglb::oracle::{equivalence_check, OracleError};
use pglb::sat3;
use pglb::synthesis::{self, length_comparison, Circuit, PartialBooleanFunction, SynthesisError};
use pglb::{
    extract, parse, trace, Action, Computation, FiniteThread, InstructionSequence, InteractionError, Reply,
};
use thiserror::Error;

/// Largest k accepted by `gen 3sat` (the program has 72k^3 + 5k + 1 instructions).
const MAX_GEN_K: usize = 40;
/// Largest k accepted by `lengths` (the loop-free bound has 8k^3 bits).
const MAX_LENGTHS_K: usize = 20;
/// Largest projection printed by `project`, in term nodes.
const MAX_TERM_NODES: u64 = 1_000_000;
const MAX_TRACE_STEPS: usize = 100_000;

#[derive(Parser)]
#[command(name = "pglb", version, about = "PGLB_bt instruction sequences, threads and register services")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a program in canonical single-line form
    Fmt { file: PathBuf },
    /// Print the extracted thread as a recursive specification
    Extract {
        file: PathBuf,
        /// Emit a Graphviz digraph instead
        #[arg(long)]
        graph: bool,
    },
    /// Print the projection π_N of the extracted thread
    Project {
        file: PathBuf,
        #[arg(short = 'n')]
        n: usize,
    },
    /// Run a program on input registers and print the reply (t, f or d)
    Run {
        file: PathBuf,
        /// Input values b1..bk as a string over {t,f}
        #[arg(long = "in", default_value = "")]
        inputs: String,
        /// Number of auxiliary registers, each initialized to t
        #[arg(long, default_value_t = 0)]
        aux: usize,
        /// Print every step before the reply
        #[arg(long)]
        trace: bool,
    },
    /// Compile a truth table or a circuit into a loop-free program
    Compile {
        #[command(subcommand)]
        what: CompileCommand,
    },
    /// Generate programs
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Encode inputs for generated programs
    Encode {
        #[command(subcommand)]
        what: EncodeCommand,
    },
    /// Check that a program computes the function in a truth-table file
    Verify {
        program: PathBuf,
        #[arg(long)]
        tt: PathBuf,
        #[arg(long, default_value_t = 0)]
        aux: usize,
    },
    /// Program lengths for 3SAT(k): loop-free bound versus backward jumps
    Lengths {
        #[arg(long)]
        max_k: usize,
    },
}

#[derive(Subcommand)]
enum CompileCommand {
    /// Truth-table file: a "k <arity>" header, then rows like "tf t" (value t, f or u)
    Tt { file: PathBuf },
    /// Netlist file: "inputs k", then lines like "g2 = AND x1 g1"
    Circuit { file: PathBuf },
}

#[derive(Subcommand)]
enum GenCommand {
    /// The 3SAT(k) program with backward jumps
    #[command(name = "3sat")]
    Sat {
        #[arg(short = 'k')]
        k: usize,
    },
}

#[derive(Subcommand)]
enum EncodeCommand {
    /// DIMACS CNF (three literals per clause) to the 8k^3-bit input string
    Cnf { file: PathBuf },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("{0}")]
    Resource(String),
    /// Already reported on stdout.
    #[error("program does not compute the function")]
    Mismatch,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Mismatch => 1,
            CliError::Usage(_) | CliError::Input { .. } => 2,
            CliError::Resource(_) => 3,
        }
    }
}

impl From<InteractionError> for CliError {
    fn from(e: InteractionError) -> Self {
        CliError::Resource(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    match run(cli.command, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("pglb: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    let mut text = String::new();
    let result = if path == Path::new("-") {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        fs::read_to_string(path).map(|t| text = t)
    };
    result.map_err(|e| input_error(path, e))?;
    Ok(text)
}

fn input_error(path: &Path, message: impl ToString) -> CliError {
    CliError::Input {
        path: path.display().to_string(),
        message: message.to_string(),
    }
}

fn program(path: &Path) -> Result<InstructionSequence, CliError> {
    parse(&read(path)?).map_err(|e| input_error(path, e))
}

fn table_error(path: &Path, e: SynthesisError) -> CliError {
    match e {
        SynthesisError::InfeasibleArity { .. } => CliError::Resource(format!("{}: {e}", path.display())),
        _ => input_error(path, e),
    }
}

fn write_lines(out: &mut impl Write, seq: &InstructionSequence) -> io::Result<()> {
    for instruction in seq.instructions() {
        writeln!(out, "{instruction}")?;
    }
    Ok(())
}

fn parse_inputs(text: &str) -> Result<Vec<bool>, CliError> {
    text.chars()
        .map(|c| match c {
            't' => Ok(true),
            'f' => Ok(false),
            _ => Err(CliError::Usage(format!("--in expects a string over t and f, found {c:?}"))),
        })
        .collect()
}

/// Number of nodes of the printed tree, saturating at `limit + 1`.
fn term_size(term: &FiniteThread, limit: u64) -> u64 {
    fn go(term: &FiniteThread, memo: &mut HashMap<*const FiniteThread, u64>, limit: u64) -> u64 {
        if let Some(&n) = memo.get(&(term as *const _)) {
            return n;
        }
        let n = match term {
            FiniteThread::Post(_, x, y) => {
                let x_size = go(x, memo, limit);
                let y_size = if std::sync::Arc::ptr_eq(x, y) {
                    0
                } else {
                    go(y, memo, limit)
                };
                (1 + x_size + y_size).min(limit + 1)
            }
            _ => 1,
        };
        memo.insert(term as *const _, n);
        n
    }
    go(term, &mut HashMap::new(), limit)
}

fn run(command: Command, out: &mut impl Write) -> Result<(), CliError> {
    let io_err = |e: io::Error| CliError::Resource(format!("write failed: {e}"));
    match command {
        Command::Fmt { file } => writeln!(out, "{}", program(&file)?.render()).map_err(io_err),
        Command::Extract { file, graph } => {
            let thread = extract(&program(&file)?);
            let text = if graph {
                thread.to_dot()
            } else {
                thread.specification()
            };
            out.write_all(text.as_bytes()).map_err(io_err)
        }
        Command::Project { file, n } => {
            let term = extract(&program(&file)?).project(n);
            if term_size(&term, MAX_TERM_NODES) > MAX_TERM_NODES {
                return Err(CliError::Resource(format!(
                    "π_{n} has more than {MAX_TERM_NODES} nodes; use a smaller -n"
                )));
            }
            writeln!(out, "{term}").map_err(io_err)
        }
        Command::Run {
            file,
            inputs,
            aux,
            trace: with_trace,
        } => {
            let seq = program(&file)?;
            if let Some(action) = seq
                .instructions()
                .iter()
                .filter_map(|i| i.action())
                .find(|a| matches!(a, Action::Plain(_)))
            {
                return Err(input_error(
                    &file,
                    format!("non-service action {action}; run needs focused actions such as in:1.get"),
                ));
            }
            let inputs = parse_inputs(&inputs)?;
            let reply = if with_trace {
                let steps = trace(&seq, &inputs, aux, MAX_TRACE_STEPS);
                for step in &steps {
                    writeln!(out, "{step}").map_err(io_err)?;
                }
                match trace_outcome(&steps) {
                    Some(reply) => reply,
                    None => Computation::new(&seq, aux)?.run(&inputs)?,
                }
            } else {
                Computation::new(&seq, aux)?.run(&inputs)?
            };
            writeln!(out, "{reply}").map_err(io_err)
        }
        Command::Compile { what } => {
            let seq = match what {
                CompileCommand::Tt { file } => {
                    let f: PartialBooleanFunction = read(&file)?.parse().map_err(|e| table_error(&file, e))?;
                    synthesis::compile_truth_table(&f)
                }
                CompileCommand::Circuit { file } => {
                    let c: Circuit = read(&file)?.parse().map_err(|e| input_error(&file, e))?;
                    synthesis::compile_circuit(&c)
                }
            };
            write_lines(out, &seq).map_err(io_err)
        }
        Command::Gen {
            what: GenCommand::Sat { k },
        } => {
            if k > MAX_GEN_K {
                return Err(CliError::Resource(format!("k = {k} exceeds the limit of {MAX_GEN_K}")));
            }
            let seq = sat3::gen_3sat(k).map_err(|e| CliError::Usage(e.to_string()))?;
            write_lines(out, &seq).map_err(io_err)
        }
        Command::Encode {
            what: EncodeCommand::Cnf { file },
        } => {
            let formula = sat3::parse_dimacs(&read(&file)?).map_err(|e| input_error(&file, e))?;
            writeln!(out, "{}", sat3::encoding_string(&sat3::encode_cnf(&formula))).map_err(io_err)
        }
        Command::Verify { program: prog, tt, aux } => {
            let seq = program(&prog)?;
            let f: PartialBooleanFunction = read(&tt)?.parse().map_err(|e| table_error(&tt, e))?;
            let report = equivalence_check(&seq, &f, aux).map_err(|e| match e {
                OracleError::Interaction(e) => CliError::from(e),
                other => CliError::Resource(other.to_string()),
            })?;
            if report.is_equivalent() {
                writeln!(out, "equivalent on all {} inputs", report.checked).map_err(io_err)
            } else {
                for m in &report.mismatches {
                    let inputs: String = m.inputs.iter().map(|&b| Reply::from_bool(b).as_char()).collect();
                    writeln!(out, "mismatch at {inputs}: expected {}, got {}", m.expected, m.actual)
                        .map_err(io_err)?;
                }
                Err(CliError::Mismatch)
            }
        }
        Command::Lengths { max_k } => {
            if max_k > MAX_LENGTHS_K {
                return Err(CliError::Resource(format!(
                    "--max-k {max_k} exceeds the limit of {MAX_LENGTHS_K}"
                )));
            }
            writeln!(out, "k\tloop-free 3*2^(8k^3)-2\twith backward jumps 72k^3+5k+1").map_err(io_err)?;
            for row in length_comparison(max_k) {
                writeln!(out, "{}\t{}\t{}", row.k, row.loop_free, row.with_backward_jumps).map_err(io_err)?;
            }
            Ok(())
        }
    }
}
