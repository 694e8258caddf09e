//! Command-line front end. [`run`] parses arguments, reads inputs (`-` is
//! stdin), and returns the exit status: 0 on success, 1 when the requested
//! object does not exist, 2 on usage or input errors.

use std::fs;
use std::io::{Read, Write};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::augment::{
    augment_length2, exact_augmentation, AugmentError, AugmentationPlan, SearchLimits, DEFAULT_MAX_STATES,
};
use crate::decomposition::Decomposition;
use crate::instance::{parse_instance, parse_matching, Instance, InstanceError, MatchingError};
use crate::oracle::{self, OracleError, OracleLimits};
use crate::popmatch::{self, PopError};
use crate::reductions::{self, SatError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "popaug", version, about = "Min-cost popular matchings and augmentation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a min-cost popular matching.
    Solve {
        instance: String,
        /// Among popular matchings of maximum cardinality.
        #[arg(long)]
        max_card: bool,
    },
    /// Print rank-1 labels and the f/s sets.
    Decompose { instance: String },
    /// Print a min-cost augmentation plan.
    Augment {
        instance: String,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Require a popular matching with nobody on a last resort.
        #[arg(long)]
        perfect: bool,
        /// States the exact search may examine.
        #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
        max_states: usize,
    },
    /// Brute-force answers for cross-checking.
    Oracle {
        #[arg(value_enum)]
        subproblem: Subproblem,
        instance: String,
        /// For `augment`: require nobody on a last resort.
        #[arg(long)]
        perfect: bool,
        /// Refuse instances with more people than this.
        #[arg(long)]
        max_people: Option<usize>,
        /// Refuse instances with more real item copies than this.
        #[arg(long)]
        max_clones: Option<usize>,
    },
    /// Generate a gadget instance from a SAT file.
    Reduce {
        #[arg(long, value_enum)]
        gadget: Gadget,
        satfile: String,
        /// Triplets per clause for the inapprox gadget.
        #[arg(long, default_value_t = 2)]
        triplets: usize,
        /// Internal item cost for the inapprox and perfect gadgets.
        #[arg(long)]
        internal_cost: Option<u64>,
    },
    /// Decide popularity of a matching; print a more popular one if it exists.
    Check { instance: String, matching: String },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Length2,
    Exact,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Subproblem {
    /// Min-cost popular matching.
    Popular,
    /// Min-cost popular matching of maximum cardinality.
    MaxCard,
    /// Min-cost augmentation.
    Augment,
    /// Cheapest copy vector admitting a popular matching that matches everyone.
    Instance,
    /// Number of matchings.
    Count,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Gadget {
    Instance,
    Augment,
    Inapprox,
    Perfect,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Instance { path: String, source: InstanceError },
    #[error("{path}: {source}")]
    Matching { path: String, source: MatchingError },
    #[error("{path}: {source}")]
    Sat { path: String, source: SatError },
    #[error("only one input may be read from stdin")]
    StdinTwice,
    #[error("--perfect requires --mode exact")]
    PerfectLength2,
    #[error(transparent)]
    Pop(#[from] PopError),
    #[error(transparent)]
    Augment(#[from] AugmentError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Gadget(#[from] SatError),
    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
}

struct Inputs<'a> {
    stdin: &'a mut dyn Read,
    stdin_used: bool,
}

impl Inputs<'_> {
    fn read(&mut self, path: &str) -> Result<String, CliError> {
        if path == "-" {
            if self.stdin_used {
                return Err(CliError::StdinTwice);
            }
            self.stdin_used = true;
            let mut text = String::new();
            self.stdin.read_to_string(&mut text).map_err(|source| CliError::Io {
                path: "<stdin>".into(),
                source,
            })?;
            Ok(text)
        } else {
            fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.into(),
                source,
            })
        }
    }

    /// Parses an instance and enables last resorts.
    fn instance(&mut self, path: &str) -> Result<Instance, CliError> {
        let text = self.read(path)?;
        parse_instance(&text)
            .map(|inst| inst.with_last_resorts())
            .map_err(|source| CliError::Instance {
                path: path.into(),
                source,
            })
    }
}

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let mut inputs = Inputs {
        stdin,
        stdin_used: false,
    };
    match execute(cli.command, &mut inputs, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn write_plan(out: &mut dyn Write, inst: &Instance, plan: Option<AugmentationPlan>) -> Result<i32, CliError> {
    match plan {
        Some(plan) => {
            out.write_all(plan.to_text(inst).as_bytes())?;
            Ok(EXIT_OK)
        }
        None => {
            writeln!(out, "NO_PLAN")?;
            Ok(EXIT_INFEASIBLE)
        }
    }
}

fn write_solution(
    out: &mut dyn Write,
    inst: &Instance,
    found: Option<(&crate::instance::Matching, u64)>,
) -> Result<i32, CliError> {
    match found {
        Some((m, cost)) => {
            out.write_all(m.to_text(inst).as_bytes())?;
            writeln!(out, "# cost {cost}")?;
            Ok(EXIT_OK)
        }
        None => {
            writeln!(out, "NO_POPULAR_MATCHING")?;
            Ok(EXIT_INFEASIBLE)
        }
    }
}

fn execute(command: Command, inputs: &mut Inputs<'_>, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Solve { instance, max_card } => {
            let inst = inputs.instance(&instance)?;
            let sol = if max_card {
                popmatch::min_cost_max_card_popular(&inst)?
            } else {
                popmatch::min_cost_popular(&inst)?
            };
            write_solution(out, &inst, sol.as_ref().map(|s| (&s.matching, s.cost)))
        }
        Command::Decompose { instance } => {
            let inst = inputs.instance(&instance)?;
            let d = Decomposition::compute(&inst);
            for p in 0..inst.num_people() {
                writeln!(out, "{} {}", inst.person_id(p), d.labels.person(p).letter())?;
            }
            for b in 0..inst.num_items() {
                writeln!(out, "{} {}", inst.item(b).id, d.labels.item(b).letter())?;
            }
            let names = |set: &[usize]| {
                set.iter()
                    .map(|&b| inst.item(b).id.as_str())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            for p in 0..inst.num_people() {
                writeln!(out, "f {} : {}", inst.person_id(p), names(&d.fs.f[p]))?;
                writeln!(out, "s {} : {}", inst.person_id(p), names(&d.fs.s[p]))?;
            }
            Ok(EXIT_OK)
        }
        Command::Augment {
            instance,
            mode,
            perfect,
            max_states,
        } => {
            let inst = inputs.instance(&instance)?;
            let plan = match mode {
                Mode::Length2 if perfect => return Err(CliError::PerfectLength2),
                Mode::Length2 => Some(augment_length2(&inst)?),
                Mode::Exact => exact_augmentation(&inst, perfect, &SearchLimits { max_states })?,
            };
            write_plan(out, &inst, plan)
        }
        Command::Oracle {
            subproblem,
            instance,
            perfect,
            max_people,
            max_clones,
        } => {
            let inst = inputs.instance(&instance)?;
            let mut limits = OracleLimits::default();
            if let Some(n) = max_people {
                limits.max_people = n;
            }
            if let Some(n) = max_clones {
                limits.max_clones = n;
            }
            match subproblem {
                Subproblem::Popular => {
                    let sol = oracle::brute_min_cost_popular(&inst, &limits)?;
                    write_solution(out, &inst, sol.as_ref().map(|s| (&s.matching, s.cost)))
                }
                Subproblem::MaxCard => {
                    let sol = oracle::brute_min_cost_max_card_popular(&inst, &limits)?;
                    write_solution(out, &inst, sol.as_ref().map(|s| (&s.matching, s.cost)))
                }
                Subproblem::Augment => {
                    let plan = oracle::brute_min_cost_augmentation(&inst, perfect, &limits)?
                        .map(|(extra, total_cost)| AugmentationPlan { extra, total_cost });
                    write_plan(out, &inst, plan)
                }
                Subproblem::Instance => match oracle::brute_min_cost_popular_instance(&inst, &limits)? {
                    Some((copies, cost)) => {
                        for (b, k) in inst.real_items().zip(copies) {
                            writeln!(out, "{} {k}", inst.item(b).id)?;
                        }
                        writeln!(out, "total {cost}")?;
                        Ok(EXIT_OK)
                    }
                    None => {
                        writeln!(out, "NO_PLAN")?;
                        Ok(EXIT_INFEASIBLE)
                    }
                },
                Subproblem::Count => {
                    writeln!(out, "{}", oracle::enumerate_matchings(&inst, &limits)?.len())?;
                    Ok(EXIT_OK)
                }
            }
        }
        Command::Reduce {
            gadget,
            satfile,
            triplets,
            internal_cost,
        } => {
            let text = inputs.read(&satfile)?;
            let sat = reductions::parse_sat(&text).map_err(|source| CliError::Sat {
                path: satfile.clone(),
                source,
            })?;
            let g = match gadget {
                Gadget::Instance => reductions::gen_popular_instance(&sat),
                Gadget::Augment => reductions::gen_augmentation(&sat),
                Gadget::Inapprox => reductions::gen_inapprox(&sat, triplets, internal_cost.unwrap_or(1))?,
                Gadget::Perfect => reductions::gen_perfect_aug(
                    &sat,
                    internal_cost.unwrap_or_else(|| reductions::default_perfect_cost(&sat)),
                )?,
            };
            out.write_all(g.instance.to_text().as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Check { instance, matching } => {
            let inst = inputs.instance(&instance)?;
            let text = inputs.read(&matching)?;
            let m = parse_matching(&inst, &text).map_err(|source| CliError::Matching {
                path: matching.clone(),
                source,
            })?;
            if popmatch::is_popular(&inst, &m)? {
                writeln!(out, "POPULAR")?;
                return Ok(EXIT_OK);
            }
            writeln!(out, "NOT_POPULAR")?;
            let witness =
                popmatch::more_popular_witness(&inst, &m)?.expect("an unpopular matching has a more popular rival");
            out.write_all(witness.to_text(&inst).as_bytes())?;
            Ok(EXIT_INFEASIBLE)
        }
    }
}
