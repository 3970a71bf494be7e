//! Decomposition of pretrained word embeddings into sub-vectors.
//!
//! A vector δ is a sub-vector of v when δ·v ≥ ‖δ‖². On that single predicate
//! this crate builds children queries over a vocabulary, shared roots of
//! support sets, semantic trees and small tree networks, plus two evaluation
//! harnesses: closed-category completion and word analogy.

pub mod analogy;
pub mod categorize;
pub mod corpora;
pub mod decomp;
pub mod embed;
pub mod error;
pub mod seed;
pub mod ssn;
pub mod svm;
pub mod synth;
pub mod vector;

pub use analogy::{run_analogy_benchmark, AnalogyMethod, AnalogyReport};
pub use categorize::{
    run_category_benchmark, CategoryBenchConfig, CategoryEvalReport, CategoryMethod,
};
pub use corpora::{
    bundled_closed_categories, load_category_corpus, parse_google_analogy, AnalogySections,
    CategoryCorpus,
};
pub use decomp::{
    children, is_subvector, margin, root, residual, scale_split, ChildEntry, SemanticTree,
};
pub use embed::{load_glove_text, load_word2vec_binary, EmbeddingSpace, VocabFilter};
pub use error::{Error, Result};
pub use ssn::{describe_shape, SsnReport, SsnShape};
pub use vector::Vector;
