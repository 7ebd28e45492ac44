use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kleisli_core::dynamics::{self, RunOutcome, Tape};
use kleisli_core::instance::{Instance, InstanceError};
use kleisli_core::laws::check_monad_laws;
use kleisli_core::monad::MonadTag;
use kleisli_core::morphism::InstanceMorphism;
use kleisli_core::rational::render_rational;
use kleisli_core::schema::Schema;
use kleisli_core::transform::{self, check_monad_morphism_laws, MonadMorphism, Mutant};

/// Kleisli database instances: validate, evaluate, transform and run them.
#[derive(Parser)]
#[command(name = "kleisli", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Files {
    /// Schema file
    schema: PathBuf,
    /// Instance file
    instance: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Check totality, references, cell shapes and path equivalences
    Validate(Files),
    /// Evaluate a path at a row
    Eval {
        #[command(flatten)]
        files: Files,
        #[arg(long)]
        path: String,
        #[arg(long)]
        id: String,
    },
    /// Check that a morphism file describes a morphism between two instances
    CheckMorphism {
        schema: PathBuf,
        src: PathBuf,
        dst: PathBuf,
        morphism: PathBuf,
    },
    /// Change the monad of an instance along a monad morphism
    Transform {
        #[command(flatten)]
        files: Files,
        /// Morphism name, e.g. `support`, `unit-embed:list`, `exc-retune:map.txt`
        #[arg(long)]
        via: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Turn an atomic instance into its preimage instance on the opposite schema
    Invert {
        #[command(flatten)]
        files: Files,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where to write the opposite schema
        #[arg(long)]
        schema_out: Option<PathBuf>,
    },
    /// Run a loop instance as a machine
    Run {
        #[command(subcommand)]
        machine: Machine,
    },
    /// Export a loop instance as a graph
    Export {
        #[command(flatten)]
        files: Files,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check monad laws, monad morphism laws, or the tape evaluation witness
    Laws {
        #[arg(long, conflicts_with_all = ["morphism", "tape_eval"])]
        monad: Option<String>,
        /// A morphism name as for `transform --via`, or `mutant-last-or-null`,
        /// `mutant-dedup-forget-order`, `mutant-constant-null`
        #[arg(long, conflicts_with = "tape_eval")]
        morphism: Option<String>,
        #[arg(long)]
        tape_eval: bool,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        cases: usize,
    },
    /// Read a list-with-labels loop instance as a schema
    SchemaOf {
        #[command(flatten)]
        files: Files,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
}

#[derive(Subcommand)]
enum Machine {
    /// Print `f^n` at a row
    Iterate {
        #[command(flatten)]
        files: Files,
        #[arg(long)]
        id: String,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
    /// Print the transition matrix, or the distribution after `--steps`
    Markov {
        #[command(flatten)]
        files: Files,
        #[arg(long, requires = "steps")]
        id: Option<String>,
        #[arg(long, requires = "id")]
        steps: Option<usize>,
    },
    /// Feed a word to an automaton
    Fsa {
        #[command(flatten)]
        files: Files,
        #[arg(long)]
        id: String,
        /// Comma-separated letters
        #[arg(long, default_value = "")]
        word: String,
    },
    /// Run a Turing machine
    Turing {
        #[command(flatten)]
        files: Files,
        #[arg(long, default_value = "Start")]
        id: String,
        /// Initial cells from position 0, e.g. `0110`
        #[arg(long, default_value = "")]
        tape: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        head: i64,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
    },
    /// Follow a recursion until it returns a label
    Recur {
        /// Schema and instance files; omit with `--extend`
        files: Vec<PathBuf>,
        #[arg(long)]
        id: String,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        /// Use the factorial table for inputs up to this bound instead of files
        #[arg(long)]
        extend: Option<u32>,
    },
}

/// Exit 2 for usage, input and parse problems; exit 1 for semantic failures.
enum Failure {
    Usage(String),
    Semantic(String),
}

type Outcome = Result<String, Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn semantic(e: impl ToString) -> Failure {
    Failure::Semantic(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_or_return(output: &Option<PathBuf>, text: String) -> Outcome {
    match output {
        Some(p) => {
            fs::write(p, &text).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            Ok(format!("wrote {}\n", p.display()))
        }
        None => Ok(text),
    }
}

fn load_schema(path: &Path) -> Result<Arc<Schema>, Failure> {
    Schema::parse(&read(path)?).map(Arc::new).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load(files: &Files) -> Result<Instance, Failure> {
    let schema = load_schema(&files.schema)?;
    Instance::parse(schema, &read(&files.instance)?).map_err(|e| match e {
        InstanceError::Invalid(_) => semantic(format!("{}: {e}", files.instance.display())),
        _ => usage(format!("{}: {e}", files.instance.display())),
    })
}

fn validate(files: &Files) -> Outcome {
    let schema = load_schema(&files.schema)?;
    let inst = Instance::parse_unchecked(schema, &read(&files.instance)?)
        .map_err(|e| usage(format!("{}: {e}", files.instance.display())))?;
    let report = inst.validate();
    if report.is_valid() {
        Ok(format!("{}: valid\n", inst.name))
    } else {
        Err(semantic(format!("{}: {} violation(s)\n{report}", inst.name, report.violations.len())))
    }
}

fn eval(files: &Files, path: &str, id: &str) -> Outcome {
    let inst = load(files)?;
    let path = inst.schema().parse_path(path).map_err(semantic)?;
    let value = inst.eval_path(&path, id).map_err(semantic)?;
    Ok(format!("{}\n", inst.tag().render(&value).map_err(semantic)?))
}

fn check_morphism(schema: &Path, src: &Path, dst: &Path, morphism: &Path) -> Outcome {
    let schema = load_schema(schema)?;
    let parse = |p: &Path| {
        Instance::parse(schema.clone(), &read(p)?).map_err(|e| usage(format!("{}: {e}", p.display())))
    };
    let (src, dst) = (parse(src)?, parse(dst)?);
    let m = InstanceMorphism::parse(&read(morphism)?, &src, &dst)
        .map_err(|e| usage(format!("{}: {e}", morphism.display())))?;
    let report = m.check(&src, &dst).map_err(semantic)?;
    if report.passed() {
        Ok(report.to_string())
    } else {
        Err(semantic(report))
    }
}

fn resolve_morphism(name: &str, source: &MonadTag) -> Result<MonadMorphism, Failure> {
    MonadMorphism::from_cli(name, source, |p| fs::read_to_string(p).map_err(|e| e.to_string())).map_err(usage)
}

fn do_transform(files: &Files, via: &str, output: &Option<PathBuf>) -> Outcome {
    let inst = load(files)?;
    let mm = resolve_morphism(via, inst.tag())?;
    let out = transform::transform_instance(&inst, &mm).map_err(semantic)?;
    let report = out.validate();
    if !report.is_valid() {
        return Err(semantic(format!("transformed instance is not valid:\n{report}")));
    }
    write_or_return(output, out.render())
}

fn invert(files: &Files, output: &Option<PathBuf>, schema_out: &Option<PathBuf>) -> Outcome {
    let inst = load(files)?;
    let inv = inst.invert().map_err(semantic)?;
    let mut msg = String::new();
    if schema_out.is_some() {
        msg = write_or_return(schema_out, inv.schema().render())?;
    }
    Ok(msg + &write_or_return(output, inv.render())?)
}

fn outcome_text(outcome: RunOutcome) -> Outcome {
    match outcome {
        RunOutcome::Halted { tape, steps } => Ok(format!("halted after {steps} steps: {tape}\n")),
        RunOutcome::Returned { label, steps } => Ok(format!("returned !{label} after {steps} steps\n")),
        RunOutcome::Timeout { steps } => Err(semantic(format!("no result after {steps} steps"))),
    }
}

fn run(machine: &Machine) -> Outcome {
    match machine {
        Machine::Iterate { files, id, steps } => {
            let inst = load(files)?;
            let v = dynamics::iterate(&inst, id, *steps).map_err(semantic)?;
            Ok(format!("{}\n", inst.tag().render(&v).map_err(semantic)?))
        }
        Machine::Markov { files, id, steps } => {
            let inst = load(files)?;
            let (states, matrix) = dynamics::markov_matrix(&inst).map_err(semantic)?;
            if let (Some(id), Some(steps)) = (id, steps) {
                let v = dynamics::iterate(&inst, id, *steps).map_err(semantic)?;
                return Ok(format!("{}\n", inst.tag().render(&v).map_err(semantic)?));
            }
            let mut out = format!("state | {}\n", states.join(" "));
            for (s, row) in states.iter().zip(&matrix) {
                let cells: Vec<String> = row.iter().map(render_rational).collect();
                out.push_str(&format!("{s} | {}\n", cells.join(" ")));
            }
            Ok(out)
        }
        Machine::Fsa { files, id, word } => {
            let inst = load(files)?;
            let letters: Vec<&str> = word.split(',').map(str::trim).filter(|l| !l.is_empty()).collect();
            Ok(format!("{}\n", dynamics::run_fsa(&inst, id, &letters).map_err(semantic)?))
        }
        Machine::Turing { files, id, tape, head, max_steps } => {
            let inst = load(files)?;
            let tape = Tape::from_bits(tape, *head).map_err(usage)?;
            outcome_text(dynamics::run_turing(&inst, id, tape, *max_steps).map_err(semantic)?)
        }
        Machine::Recur { files, id, max_steps, extend } => {
            let inst = match (extend, files.as_slice()) {
                (Some(n), []) => dynamics::factorial_instance(*n).map_err(usage)?,
                (None, [schema, instance]) => load(&Files { schema: schema.clone(), instance: instance.clone() })?,
                _ => return Err(usage("give either a schema and an instance file, or --extend")),
            };
            outcome_text(dynamics::run_recursive(&inst, id, *max_steps).map_err(semantic)?)
        }
    }
}

fn laws(monad: &Option<String>, morphism: &Option<String>, tape_eval: bool, seed: u64, cases: usize) -> Outcome {
    let report = if tape_eval {
        let r = dynamics::check_tape_eval_not_monad_morphism(cases, seed).map_err(semantic)?;
        return if r.confirmed() { Ok(r.to_string()) } else { Err(semantic(r)) };
    } else if let Some(m) = monad {
        let tag: MonadTag = m.parse().map_err(usage)?;
        check_monad_laws(&tag, cases, seed)
    } else if let Some(name) = morphism {
        let mutant = match name.as_str() {
            "mutant-last-or-null" => Some(Mutant::LastOrNull),
            "mutant-dedup-forget-order" => Some(Mutant::DedupForgetOrder),
            "mutant-constant-null" => Some(Mutant::ConstantNull),
            _ => None,
        };
        match mutant {
            Some(m) => check_monad_morphism_laws(&m, cases, seed),
            None => check_monad_morphism_laws(&resolve_morphism(name, &MonadTag::Atomic)?, cases, seed),
        }
    } else {
        return Err(usage("give --monad, --morphism or --tape-eval"));
    };
    if report.passed() {
        Ok(report.to_string())
    } else {
        Err(semantic(report))
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Validate(files) => validate(files),
        Command::Eval { files, path, id } => eval(files, path, id),
        Command::CheckMorphism { schema, src, dst, morphism } => check_morphism(schema, src, dst, morphism),
        Command::Transform { files, via, output } => do_transform(files, via, output),
        Command::Invert { files, output, schema_out } => invert(files, output, schema_out),
        Command::Run { machine } => run(machine),
        Command::Export { files, format: Format::Dot, output } => {
            let inst = load(files)?;
            write_or_return(output, dynamics::export_dot(&inst).map_err(semantic)?)
        }
        Command::Laws { monad, morphism, tape_eval, seed, cases } => laws(monad, morphism, *tape_eval, *seed, *cases),
        Command::SchemaOf { files, output } => {
            let inst = load(files)?;
            write_or_return(output, dynamics::instance_to_schema(&inst).map_err(semantic)?.render())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Semantic(msg)) => {
            print!("{msg}");
            if !msg.ends_with('\n') {
                println!();
            }
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
