use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use hmm_entropy::criteria::{bic, free_parameter_count, icl_bic, nec, CriterionInput};
use hmm_entropy::io::{detect_format, parse_forest, parse_model, parse_sequences, write_sequence, write_tree, DataFormat};
use hmm_entropy::oracle::DEFAULT_CONFIG_BUDGET;
use hmm_entropy::report::{self, Conditioning, Input};
use hmm_entropy::{
    chain_entropy, simulate_chain, simulate_tree, smooth, smooth_tree, tree_entropy, validate_model,
    write_profiles, Error, HmmModel, LogBase, ObservedTree, ProfileKind, ProfileTable, TreeTopology,
    DEFAULT_CHILDREN_BUDGET,
};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_BUDGET: u8 = 4;

/// State restoration and entropy profiles for hidden Markov chains and trees.
#[derive(Parser)]
#[command(name = "hmm-entropy", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file and list every violation.
    Validate {
        #[arg(long)]
        model: PathBuf,
    },
    /// Smoothed state probabilities.
    Smooth(Common),
    /// Most probable state configuration.
    Viterbi(Common),
    /// Viterbi restoration with per-vertex constrained maxima.
    ViterbiProfiles(Common),
    /// Marginal, conditional and partial entropy profiles.
    Entropy {
        #[command(flatten)]
        common: Common,
        /// past|future for sequences, parent|children for trees, or both.
        #[arg(long, default_value = "both")]
        cond: String,
        /// Maximum joint terms for the children-conditioned profile.
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Draw states and observations from a model.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        /// Sequence length.
        #[arg(long, conflicts_with = "topology")]
        length: Option<usize>,
        /// path:N, star:LEAVES, complete:N:ARITY, random:N, or a tree file.
        #[arg(long)]
        topology: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of independent draws (seeds seed, seed+1, ...).
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Also write the simulated states here.
        #[arg(long)]
        states: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// BIC, ICL-BIC and NEC for a model on a dataset.
    Criteria {
        #[command(flatten)]
        common: Common,
        /// Log-likelihood of the one-state model, for NEC.
        #[arg(long, allow_hyphen_values = true)]
        baseline_loglik: Option<f64>,
    },
    /// Exhaustive enumeration of small instances.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Maximum number of enumerated configurations.
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Per-input totals: log-likelihood, Viterbi joint, G/C/M entropies.
    Summary {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        budget: Option<u128>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Chain,
    Tree,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Entropy unit: e (nats) or 2 (bits).
    #[arg(long, default_value = "e")]
    log_base: String,
    /// Override input format detection.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_DATA,
            Failure::Lib(e) => match e {
                Error::ImpossibleObservation { .. }
                | Error::ImpossibleVertex { .. }
                | Error::AllPathsImpossible
                | Error::RouteMismatch { .. } => EXIT_NUMERIC,
                Error::ChildrenBudgetExceeded { .. } | Error::ConfigBudgetExceeded { .. } => EXIT_BUDGET,
                _ => EXIT_DATA,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Io(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Io(format!("stdout: {e}")))
        }
    }
}

fn load_model(path: &Path) -> CliResult<HmmModel> {
    Ok(parse_model(&read(path)?)?)
}

fn load_inputs(common: &Common) -> CliResult<Vec<Input>> {
    let text = read(&common.data)?;
    let format = match common.format {
        Some(FormatArg::Chain) => DataFormat::Chain,
        Some(FormatArg::Tree) => DataFormat::Tree,
        None => detect_format(&text),
    };
    Ok(match format {
        DataFormat::Chain => parse_sequences(&text)?.into_iter().map(Input::Chain).collect(),
        DataFormat::Tree => parse_forest(&text)?.into_iter().map(Input::Tree).collect(),
    })
}

fn log_base(common: &Common) -> CliResult<LogBase> {
    common.log_base.parse().map_err(|e: Error| Failure::Usage(e.to_string()))
}

/// Builds one table per input in parallel; output keeps input order.
fn per_input<F>(common: &Common, build: F) -> CliResult<()>
where
    F: Fn(&HmmModel, &Input) -> hmm_entropy::Result<ProfileTable> + Sync,
{
    let base = log_base(common)?;
    let model = load_model(&common.model)?;
    let inputs = load_inputs(common)?;
    let tables = inputs
        .par_iter()
        .map(|input| build(&model, input))
        .collect::<hmm_entropy::Result<Vec<_>>>()?;
    emit(common.out.as_deref(), &write_profiles(&tables, base))
}

fn parse_topology(spec: &str, seed: u64) -> CliResult<TreeTopology> {
    let bad = || Failure::Usage(format!("cannot parse topology {spec:?}"));
    let nums = |s: &str| -> CliResult<Vec<usize>> {
        s.split(':').map(|x| x.parse::<usize>().map_err(|_| bad())).collect()
    };
    let positive = |n: usize| if n == 0 { Err(bad()) } else { Ok(n) };
    if let Some(rest) = spec.strip_prefix("path:") {
        return Ok(TreeTopology::path(positive(nums(rest)?[0])?));
    }
    if let Some(rest) = spec.strip_prefix("star:") {
        return Ok(TreeTopology::star(nums(rest)?[0]));
    }
    if let Some(rest) = spec.strip_prefix("complete:") {
        let v = nums(rest)?;
        if v.len() != 2 {
            return Err(bad());
        }
        return Ok(TreeTopology::complete(positive(v[0])?, positive(v[1])?));
    }
    if let Some(rest) = spec.strip_prefix("random:") {
        return Ok(hmm_entropy::simulate::random_topology(positive(nums(rest)?[0])?, seed));
    }
    let text = read(Path::new(spec))?;
    let trees = parse_forest(&text)?;
    Ok(trees[0].topology().clone())
}

fn run_simulate(
    model: &Path,
    length: Option<usize>,
    topology: Option<&str>,
    seed: u64,
    count: u64,
    states_out: Option<&Path>,
    out: Option<&Path>,
) -> CliResult<()> {
    let model = load_model(model)?;
    let mut data = Vec::new();
    let mut states = Vec::new();
    for i in 0..count {
        let s = seed.wrapping_add(i);
        match (length, topology) {
            (Some(t), None) => {
                let (st, seq) = simulate_chain(&model, t, s)?;
                data.push(write_sequence(&seq) + "\n");
                states.push(st.iter().map(usize::to_string).collect::<Vec<_>>().join(" ") + "\n");
            }
            (None, Some(spec)) => {
                let topo = parse_topology(spec, s)?;
                let (st, tree) = simulate_tree(&model, &topo, s)?;
                data.push(write_tree(&tree));
                let st_tree = ObservedTree::new(topo, 1, st.iter().map(|&x| x as u32).collect())?;
                states.push(write_tree(&st_tree));
            }
            _ => return Err(Failure::Usage("give exactly one of --length or --topology".into())),
        }
    }
    let sep = if topology.is_some() { "\n" } else { "" };
    if let Some(path) = states_out {
        emit(Some(path), &states.join(sep))?;
    }
    emit(out, &data.join(sep))
}

fn run_criteria(common: &Common, baseline: Option<f64>) -> CliResult<()> {
    let model = load_model(&common.model)?;
    let inputs = load_inputs(common)?;
    let parts = inputs
        .par_iter()
        .map(|input| -> hmm_entropy::Result<(f64, f64, usize)> {
            Ok(match input {
                Input::Chain(seq) => {
                    let post = smooth(&model, seq)?;
                    let h = chain_entropy::entropy_past_hernando(&model, &post).global_entropy;
                    (post.log_likelihood, h, seq.len())
                }
                Input::Tree(tree) => {
                    let post = smooth_tree(&model, tree)?;
                    let pc = tree_entropy::parent_conditional_profile(&model, tree, &post);
                    let h = tree_entropy::subtree_entropies_approach1(tree, &post, &pc.conditional).global_entropy;
                    (post.log_likelihood, h, tree.len())
                }
            })
        })
        .collect::<hmm_entropy::Result<Vec<_>>>()?;
    let input = CriterionInput {
        log_likelihood: parts.iter().map(|p| p.0).sum(),
        log_likelihood_1: baseline,
        global_entropy: parts.iter().map(|p| p.1).sum(),
        num_states: model.num_states(),
        free_params: free_parameter_count(&model),
        sample_size: parts.iter().map(|p| p.2).sum(),
    };
    let nec_value = if baseline.is_some() { Some(nec(&input)?) } else { None };
    let mut t = ProfileTable::new(ProfileKind::Summary, 1);
    t.push_integer("num_states", [input.num_states as i64]);
    t.push_integer("free_params", [input.free_params as i64]);
    t.push_integer("sample_size", [input.sample_size as i64]);
    t.push_real("log_likelihood", [input.log_likelihood]);
    t.push_real("entropy_nats", [input.global_entropy]);
    t.push_real("bic", [bic(&input)?]);
    t.push_real("icl_bic", [icl_bic(&input)?]);
    t.push_real("nec", [nec_value.unwrap_or(f64::NAN)]);
    emit(common.out.as_deref(), &write_profiles(&[t], LogBase::E))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Validate { model } => {
            let text = read(&model)?;
            let parts = serde_json::from_str(&text).map_err(Error::from)?;
            let report = validate_model(&parts);
            if report.is_ok() {
                emit(None, "ok\n")
            } else {
                let listing: String = report.violations.iter().map(|v| format!("{v}\n")).collect();
                emit(None, &listing)?;
                Err(Failure::Lib(Error::InvalidModel(report)))
            }
        }
        Command::Smooth(common) => per_input(&common, report::smooth_table),
        Command::Viterbi(common) => per_input(&common, report::viterbi_table),
        Command::ViterbiProfiles(common) => per_input(&common, report::viterbi_profile_table),
        Command::Entropy { common, cond, budget } => {
            let cond: Conditioning = cond.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
            let budget = budget.unwrap_or(DEFAULT_CHILDREN_BUDGET);
            let inputs_are_trees = matches!(load_inputs(&common)?.first(), Some(Input::Tree(_)));
            let fits = match cond {
                Conditioning::Both => true,
                Conditioning::Past | Conditioning::Future => !inputs_are_trees,
                Conditioning::Parent | Conditioning::Children => inputs_are_trees,
            };
            if !fits {
                return Err(Failure::Usage(format!(
                    "--cond {cond:?} does not apply to {} input",
                    if inputs_are_trees { "tree" } else { "sequence" }
                )));
            }
            per_input(&common, |m, i| report::entropy_table(m, i, cond, budget))
        }
        Command::Simulate {
            model,
            length,
            topology,
            seed,
            count,
            states,
            out,
        } => run_simulate(&model, length, topology.as_deref(), seed, count, states.as_deref(), out.as_deref()),
        Command::Criteria { common, baseline_loglik } => run_criteria(&common, baseline_loglik),
        Command::Oracle { common, budget } => {
            let budget = budget.unwrap_or(DEFAULT_CONFIG_BUDGET);
            per_input(&common, |m, i| report::oracle_table(m, i, budget))
        }
        Command::Summary { common, budget } => {
            let base = log_base(&common)?;
            let model = load_model(&common.model)?;
            let inputs = load_inputs(&common)?;
            let table = report::summary_table(&model, &inputs, budget.unwrap_or(DEFAULT_CHILDREN_BUDGET))?;
            emit(common.out.as_deref(), &write_profiles(&[table], base))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
