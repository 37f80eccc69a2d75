//! State restoration and entropy profiles for hidden Markov chains and
//! hidden Markov trees.
//!
//! All entropies are in nats. Models are fully specified; nothing here fits
//! parameters.

// `!(x > 0.0)` style checks are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod chain_entropy;
pub mod criteria;
pub mod data;
pub mod error;
pub mod io;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod profile;
pub mod report;
pub mod simulate;
pub mod tree;
pub mod tree_entropy;

pub use chain::{backward_smooth, forward_pass, smooth, viterbi_chain, ChainForward, ChainPosterior, Restoration};
pub use data::{ObservedSequence, ObservedTree, Observations, TreeTopology};
pub use error::{Error, Result};
pub use model::{validate_model, HmmModel, ModelParts, ValidationReport, VariableDist, VariableKind};
pub use simulate::{random_binary_topology, random_topology, simulate_chain, simulate_tree};
pub use chain_entropy::{
    entropy_future, entropy_future_direct, entropy_future_hernando, entropy_past_direct,
    entropy_past_hernando, marginal_entropy_profile, ChainEntropyProfile, Direction,
};
pub use tree::{downward_pass, smooth_tree, upward_pass, viterbi_profiles, viterbi_tree, TreePosterior, TreeUpward};
pub use tree_entropy::{
    children_conditional_profile, entropy_summary, parent_conditional_profile,
    subtree_entropies_approach1, subtree_entropies_approach2, tree_entropy_profile,
    upward_state_entropies, EntropySummary, TreeEntropyProfile, DEFAULT_CHILDREN_BUDGET,
};
pub use oracle::{enumerate_chain, enumerate_tree, oracle_entropy, OracleResult, Query, DEFAULT_CONFIG_BUDGET};
pub use criteria::{bic, free_parameter_count, icl_bic, nec, CriterionInput};
pub use profile::{read_profile, write_profile, write_profiles, LogBase, ProfileKind, ProfileTable};
