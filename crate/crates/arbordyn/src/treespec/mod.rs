//! Words, configurations, eventually periodic sets, and finite-state
//! descriptions of infinite pruned trees.

mod config;
mod epseq;
mod json;
mod spec;
mod word;

pub use config::{make_configuration, ConfigKind, Configuration};
pub use epseq::{EventuallyPeriodic, EventuallyPeriodicSet};
pub use json::{parse_set_shorthand, SetJson, TreeSpecJson};
pub use spec::{
    make_named_tree, AutomatonTree, ExplicitTree, NamedFamily, ProfileTree, TreeSpec,
};
pub use word::Word;
