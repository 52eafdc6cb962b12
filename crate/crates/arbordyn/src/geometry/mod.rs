//! Dimensions of trees and Markov trees, and densities of vertex sets.

mod density;
mod minkowski;
mod section;

pub use density::{
    banach_density_witness, upper_density, DensityEvalMode, DensityValue, VertexPredicate,
    WitnessResult,
};
pub use minkowski::{markov_dim, minkowski_dim, DimMode, DimResult, MarkovDimResult};
pub use section::{hausdorff_dim, section_value, HausdorffResult, SectionProblem, SectionResult};
