//! Lower-bound machinery: tree decompositions of separators, the trees they
//! induce, adversarial graphs and words, and separator validation.

mod adversarial;
mod decomposition;
mod report;
mod validate;

pub use adversarial::{alpha_len, alpha_word, build_gt, AlphaStep, AlphaWord};
pub use decomposition::{
    d_tree, extract_decomposition, make_accessible, resistance, DTree, Extraction, Level, OddCycleWitness,
    TreeDecomposition,
};
pub use report::{lower_bound_report, Check, Counts, LowerBoundReport, LowerBoundVerdict};
pub use validate::{validate_separator, SectionReport, ValidationConfig, ValidationReport, Verdict, Witness};
