//! Markov trees, their induced finite chains, and the associated operators.

mod chain;
mod empirical;
mod markov_tree;
mod operators;

pub use chain::{build_cp_chain, CPChain, ChainState, SplittingReport};
pub use empirical::{empirical_distribution, return_times, EmpiricalDistribution, ReturnTimesReport};
pub use markov_tree::{markov_metric, FiniteStateMarkovTree};
pub use operators::{
    apply_p, apply_s, inner_product, l2_norm, multiply, project_invariant, subtract, ChainFunction,
};
