//! Category completion: given a sampled fraction of a closed word category,
//! predict the full membership and score it with F1.
//!
//! Three prediction methods are compared. The baseline returns the given
//! examples unchanged. The shared-root method returns the examples plus all
//! children of their root. The classifier method trains a linear model on
//! the examples against random negatives and returns everything it accepts.
//!
//! Sampling is deterministic: a category's split seed depends only on the
//! benchmark base seed, the category name, and the run number, so every
//! method and fraction sees the same permutation of members.

use crate::corpora::CategoryCorpus;
use crate::decomp::{child_rows, root};
use crate::embed::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::seed::{derive_seed, mix};
use crate::svm::{train_linear_svm, SvmHyper};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashSet;

/// Selects `max(1, round(fraction · len))` members (capped at `len`) by a
/// seeded partial shuffle, returning (selected, rest).
///
/// The same seed yields nested selections across fractions: a larger
/// fraction extends the smaller one's prefix.
pub fn sample_split(
    members: &[usize],
    fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if members.is_empty() {
        return Err(Error::EmptyClass);
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::ScaleOutOfRange(fraction));
    }
    let len = members.len();
    let count = ((fraction * len as f64).round() as usize).max(1).min(len);
    let mut pool: Vec<usize> = members.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let j = rng.random_range(i..len);
        pool.swap(i, j);
    }
    let rest = pool.split_off(count);
    Ok((pool, rest))
}

/// F1 between predicted and gold vocabulary rows. Empty predictions score
/// 0.0; an empty gold set is a caller error.
pub fn f1_set(predicted: &[usize], gold: &[usize]) -> Result<f64> {
    if gold.is_empty() {
        return Err(Error::EmptyGold);
    }
    if predicted.is_empty() {
        return Ok(0.0);
    }
    let gold_set: HashSet<usize> = gold.iter().copied().collect();
    let pred_set: HashSet<usize> = predicted.iter().copied().collect();
    let hits = pred_set.intersection(&gold_set).count();
    if hits == 0 {
        return Ok(0.0);
    }
    let precision = hits as f64 / pred_set.len() as f64;
    let recall = hits as f64 / gold_set.len() as f64;
    Ok(2.0 * precision * recall / (precision + recall))
}

fn sorted_union(examples: &[usize], extra: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut out: Vec<usize> = examples.to_vec();
    out.extend(extra);
    out.sort_unstable();
    out.dedup();
    out
}

/// Examples plus every vocabulary row sharing the examples' root, as sorted
/// deduplicated rows.
///
/// A degenerate example set (opposed vectors, zero sum) has no informative
/// root; the prediction falls back to the examples themselves.
pub fn complete_category(space: &EmbeddingSpace, example_rows: &[usize]) -> Result<Vec<usize>> {
    let supports: Vec<&[f64]> = example_rows.iter().map(|&i| space.row(i)).collect();
    match root(&supports) {
        Ok(alpha) => Ok(sorted_union(example_rows, child_rows(space, &alpha)?)),
        Err(Error::DegenerateSupportSet | Error::ZeroSum) => {
            log::warn!("example set has no shared root; predicting examples only");
            Ok(sorted_union(example_rows, []))
        }
        Err(e) => Err(e),
    }
}

/// Examples plus every vocabulary row accepted by a linear classifier
/// trained on the examples against `n_negatives` random non-example rows.
pub fn svm_complete_category(
    space: &EmbeddingSpace,
    example_rows: &[usize],
    n_negatives: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    if example_rows.is_empty() {
        return Err(Error::EmptyClass);
    }
    let example_set: HashSet<usize> = example_rows.iter().copied().collect();
    let mut complement: Vec<usize> = (0..space.len())
        .filter(|i| !example_set.contains(i))
        .collect();
    let n = n_negatives.min(complement.len());
    if n == 0 {
        return Err(Error::EmptyClass);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, 1));
    for i in 0..n {
        let j = rng.random_range(i..complement.len());
        complement.swap(i, j);
    }
    let negative_rows = &complement[..n];

    let positives: Vec<&[f64]> = example_rows.iter().map(|&i| space.row(i)).collect();
    let negatives: Vec<&[f64]> = negative_rows.iter().map(|&i| space.row(i)).collect();
    let model = train_linear_svm(
        &positives,
        &negatives,
        SvmHyper {
            seed: mix(seed, 2),
            ..SvmHyper::new(0)
        },
    )?;
    let accepted: Vec<usize> = (0..space.len())
        .into_par_iter()
        .filter(|&i| model.predict(space.row(i)))
        .collect();
    Ok(sorted_union(example_rows, accepted))
}

/// One completion method in a benchmark run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CategoryMethod {
    /// Predict exactly the given examples.
    Baseline,
    /// Predict the examples plus the children of their shared root.
    Ssn,
    /// Predict via a linear classifier against `negatives` random rows.
    Svm { negatives: usize },
}

impl CategoryMethod {
    pub fn name(self) -> String {
        match self {
            CategoryMethod::Baseline => "baseline".to_string(),
            CategoryMethod::Ssn => "SSN".to_string(),
            CategoryMethod::Svm { negatives } => format!("SVM{negatives}"),
        }
    }
}

impl std::str::FromStr for CategoryMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "baseline" => Ok(CategoryMethod::Baseline),
            "SSN" | "ssn" => Ok(CategoryMethod::Ssn),
            other => other
                .strip_prefix("SVM")
                .or_else(|| other.strip_prefix("svm"))
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|&n| n > 0)
                .map(|negatives| CategoryMethod::Svm { negatives })
                .ok_or_else(|| {
                    format!("unknown method {other:?} (expected baseline, SSN, or SVM<n>)")
                }),
        }
    }
}

/// Benchmark configuration: which fractions of each category are given as
/// examples, which methods run, and how many seeded runs are averaged.
#[derive(Clone, Debug)]
pub struct CategoryBenchConfig {
    pub fractions: Vec<f64>,
    pub methods: Vec<CategoryMethod>,
    pub n_runs: usize,
    pub base_seed: u64,
}

impl Default for CategoryBenchConfig {
    fn default() -> Self {
        CategoryBenchConfig {
            fractions: vec![0.1, 0.2, 0.3, 0.4],
            methods: vec![
                CategoryMethod::Baseline,
                CategoryMethod::Ssn,
                CategoryMethod::Svm { negatives: 100 },
                CategoryMethod::Svm { negatives: 500 },
            ],
            n_runs: 5,
            base_seed: 42,
        }
    }
}

/// Per-category mean F1 for one (method, fraction) cell.
#[derive(Clone, Debug, Serialize)]
pub struct CategoryCell {
    pub category: String,
    pub runs: usize,
    pub mean_f1: f64,
}

/// One (method, fraction) row: macro mean over categories of per-category
/// run means.
#[derive(Clone, Debug, Serialize)]
pub struct CategoryRow {
    pub method: String,
    pub fraction: f64,
    pub macro_mean_f1: f64,
    pub per_category: Vec<CategoryCell>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SvmMeta {
    pub lambda: f64,
    pub epochs: usize,
    pub raw_vectors: bool,
}

/// Full category-completion benchmark results.
#[derive(Clone, Debug, Serialize)]
pub struct CategoryEvalReport {
    pub corpus: String,
    pub embedding: String,
    pub vocab_size: usize,
    pub dim: usize,
    pub n_runs: usize,
    pub base_seed: u64,
    pub svm: SvmMeta,
    /// Categories with no member resolvable in the vocabulary.
    pub skipped_categories: Vec<String>,
    pub rows: Vec<CategoryRow>,
}

impl CategoryEvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Method rows by fraction columns, mean F1 to three decimals.
    pub fn to_tsv(&self) -> String {
        let mut fractions: Vec<f64> = Vec::new();
        for row in &self.rows {
            if !fractions.contains(&row.fraction) {
                fractions.push(row.fraction);
            }
        }
        let mut methods: Vec<&str> = Vec::new();
        for row in &self.rows {
            if !methods.contains(&row.method.as_str()) {
                methods.push(&row.method);
            }
        }
        let mut out = String::from("method");
        for f in &fractions {
            out.push_str(&format!("\t{}", format_fraction(*f)));
        }
        out.push('\n');
        for method in methods {
            out.push_str(method);
            for f in &fractions {
                let cell = self
                    .rows
                    .iter()
                    .find(|r| r.method == method && r.fraction == *f);
                match cell {
                    Some(r) => out.push_str(&format!("\t{:.3}", r.macro_mean_f1)),
                    None => out.push_str("\t-"),
                }
            }
            out.push('\n');
        }
        out
    }
}

fn format_fraction(f: f64) -> String {
    let pct = f * 100.0;
    if (pct - pct.round()).abs() < 1e-9 {
        format!("{:.0}%", pct)
    } else {
        format!("{pct}%")
    }
}

fn predict(
    space: &EmbeddingSpace,
    method: CategoryMethod,
    examples: &[usize],
    split_seed: u64,
) -> Result<Vec<usize>> {
    match method {
        CategoryMethod::Baseline => Ok(examples.to_vec()),
        CategoryMethod::Ssn => complete_category(space, examples),
        CategoryMethod::Svm { negatives } => {
            svm_complete_category(space, examples, negatives, split_seed)
        }
    }
}

/// Runs the completion benchmark over every category of `corpus`.
///
/// Members are resolved to vocabulary rows (with the space's lowercase
/// fallback) and deduplicated; unresolvable members are dropped, and
/// categories left empty are skipped and listed in the report.
pub fn run_category_benchmark(
    space: &EmbeddingSpace,
    corpus: &CategoryCorpus,
    config: &CategoryBenchConfig,
) -> Result<CategoryEvalReport> {
    if config.n_runs == 0 {
        return Err(Error::EmptyClass);
    }
    for &f in &config.fractions {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::ScaleOutOfRange(f));
        }
    }

    let mut skipped = Vec::new();
    let mut resolved: Vec<(&str, Vec<usize>)> = Vec::new();
    for cat in &corpus.categories {
        let mut seen = HashSet::new();
        let rows: Vec<usize> = cat
            .members
            .iter()
            .filter_map(|m| space.resolve(m).ok())
            .filter(|&i| seen.insert(i))
            .collect();
        if rows.is_empty() {
            skipped.push(cat.name.clone());
        } else {
            resolved.push((&cat.name, rows));
        }
    }

    let mut report_rows = Vec::new();
    for &method in &config.methods {
        for &fraction in &config.fractions {
            let mut cells = Vec::with_capacity(resolved.len());
            for (name, members) in &resolved {
                let mut sum = 0.0;
                for run in 0..config.n_runs {
                    let seed = derive_seed(config.base_seed, name, run as u64);
                    let (examples, _) = sample_split(members, fraction, seed)?;
                    let predicted = predict(space, method, &examples, seed)?;
                    sum += f1_set(&predicted, members)?;
                }
                cells.push(CategoryCell {
                    category: name.to_string(),
                    runs: config.n_runs,
                    mean_f1: sum / config.n_runs as f64,
                });
            }
            let macro_mean = if cells.is_empty() {
                0.0
            } else {
                cells.iter().map(|c| c.mean_f1).sum::<f64>() / cells.len() as f64
            };
            report_rows.push(CategoryRow {
                method: method.name(),
                fraction,
                macro_mean_f1: macro_mean,
                per_category: cells,
            });
        }
    }

    let hyper = SvmHyper::new(0);
    Ok(CategoryEvalReport {
        corpus: corpus.name.clone(),
        embedding: space.source_tag().to_string(),
        vocab_size: space.len(),
        dim: space.dim(),
        n_runs: config.n_runs,
        base_seed: config.base_seed,
        svm: SvmMeta {
            lambda: hyper.lambda,
            epochs: hyper.epochs,
            raw_vectors: true,
        },
        skipped_categories: skipped,
        rows: report_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpora::{Category, CategoryCorpus};
    use crate::decomp::is_subvector;
    use crate::synth::{planted_space, random_space};

    #[test]
    fn split_counts_follow_the_rounding_rule() {
        let members: Vec<usize> = (0..8).collect();
        let (ex, rest) = sample_split(&members, 0.25, 9).unwrap();
        assert_eq!(ex.len(), 2);
        assert_eq!(rest.len(), 6);
        let members: Vec<usize> = (0..12).collect();
        assert_eq!(sample_split(&members, 0.25, 9).unwrap().0.len(), 3);
        // rounds half away from zero: 0.25 · 10 = 2.5 → 3
        let members: Vec<usize> = (0..10).collect();
        assert_eq!(sample_split(&members, 0.25, 9).unwrap().0.len(), 3);
        // tiny fractions still yield one example
        assert_eq!(sample_split(&members, 0.01, 9).unwrap().0.len(), 1);
        // full fraction takes everything
        let (ex, rest) = sample_split(&members, 1.0, 9).unwrap();
        assert_eq!(ex.len(), 10);
        assert!(rest.is_empty());
    }

    #[test]
    fn split_is_deterministic_and_partitions() {
        let members: Vec<usize> = (100..120).collect();
        let (a1, r1) = sample_split(&members, 0.4, 7).unwrap();
        let (a2, r2) = sample_split(&members, 0.4, 7).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(r1, r2);
        let mut all: Vec<usize> = a1.iter().chain(&r1).copied().collect();
        all.sort_unstable();
        assert_eq!(all, members);
        let (b, _) = sample_split(&members, 0.4, 8).unwrap();
        assert_ne!(a1, b);
    }

    #[test]
    fn same_seed_nests_fractions() {
        let members: Vec<usize> = (0..40).collect();
        let (small, _) = sample_split(&members, 0.2, 13).unwrap();
        let (large, _) = sample_split(&members, 0.5, 13).unwrap();
        assert_eq!(&large[..small.len()], &small[..]);
    }

    #[test]
    fn split_rejects_bad_inputs() {
        assert!(matches!(
            sample_split(&[], 0.5, 0),
            Err(Error::EmptyClass)
        ));
        let members = [1, 2, 3];
        for bad in [0.0, -0.1, 1.5] {
            assert!(matches!(
                sample_split(&members, bad, 0),
                Err(Error::ScaleOutOfRange(_))
            ));
        }
    }

    #[test]
    fn f1_matches_hand_counts() {
        // predicted {1,2,3,4}, gold {3,4,5}: P = 2/4, R = 2/3
        let f1 = f1_set(&[1, 2, 3, 4], &[3, 4, 5]).unwrap();
        let expect = 2.0 * (0.5 * (2.0 / 3.0)) / (0.5 + 2.0 / 3.0);
        assert!((f1 - expect).abs() < 1e-12);
        assert_eq!(f1_set(&[], &[1]).unwrap(), 0.0);
        assert_eq!(f1_set(&[9], &[1]).unwrap(), 0.0);
        assert_eq!(f1_set(&[1, 2], &[1, 2]).unwrap(), 1.0);
        assert!(matches!(f1_set(&[1], &[]), Err(Error::EmptyGold)));
    }

    #[test]
    fn completion_agrees_with_a_brute_force_scan() {
        // cluster rows guarantee the example root exists
        let space = planted_space(20, 40, 8, 0xC0FFEE);
        let examples = [3, 7, 17];
        let got = complete_category(&space, &examples).unwrap();
        let supports: Vec<&[f64]> = examples.iter().map(|&i| space.row(i)).collect();
        let alpha = root(&supports).unwrap();
        let mut expect: Vec<usize> = (0..space.len())
            .filter(|&i| is_subvector(&alpha, space.row(i)).unwrap())
            .collect();
        expect.extend_from_slice(&examples);
        expect.sort_unstable();
        expect.dedup();
        assert_eq!(got, expect);
        // the examples themselves are always predicted
        for e in examples {
            assert!(got.contains(&e));
        }
    }

    #[test]
    fn degenerate_examples_fall_back_to_themselves() {
        let space = crate::embed::EmbeddingSpace::new(
            vec!["a".into(), "b".into()],
            vec![1.0, 0.0, -1.0, 0.0],
            2,
            "test",
            false,
        )
        .unwrap();
        assert_eq!(complete_category(&space, &[0, 1]).unwrap(), vec![0, 1]);
    }

    #[test]
    fn planted_cluster_is_recovered_by_completion() {
        // rows 0..12 form a tight cone; the rest are scattered
        let space = planted_space(12, 48, 16, 0xBEEF);
        let examples = [0, 5, 9];
        let got = complete_category(&space, &examples).unwrap();
        let cluster: HashSet<usize> = (0..12).collect();
        let predicted: HashSet<usize> = got.iter().copied().collect();
        let hits = predicted.intersection(&cluster).count();
        let gold: Vec<usize> = (0..12).collect();
        let f1 = f1_set(&got, &gold).unwrap();
        assert!(hits >= 8, "only {hits} cluster members recovered: {got:?}");
        assert!(f1 > 0.6, "planted-cluster completion f1 = {f1}");
        // and beats the baseline of predicting the examples alone
        let baseline = f1_set(&examples, &gold).unwrap();
        assert!(f1 > baseline);
    }

    #[test]
    fn svm_completion_recovers_a_planted_cluster() {
        let space = planted_space(12, 48, 16, 0xFACE);
        let examples = [0, 2, 4, 6, 8, 10];
        let got = svm_complete_category(&space, &examples, 30, 99).unwrap();
        let gold: Vec<usize> = (0..12).collect();
        let f1 = f1_set(&got, &gold).unwrap();
        assert!(f1 > 0.5, "svm completion f1 = {f1}");
        let again = svm_complete_category(&space, &examples, 30, 99).unwrap();
        assert_eq!(got, again);
    }

    #[test]
    fn svm_completion_rejects_empty_examples() {
        let space = random_space(10, 4, 1);
        assert!(matches!(
            svm_complete_category(&space, &[], 5, 0),
            Err(Error::EmptyClass)
        ));
    }

    fn toy_corpus() -> CategoryCorpus {
        CategoryCorpus {
            name: "toy".to_string(),
            categories: vec![
                Category {
                    name: "first".to_string(),
                    members: (0..8).map(|i| format!("w{i}")).collect(),
                },
                Category {
                    name: "second".to_string(),
                    members: (20..32).map(|i| format!("w{i}")).collect(),
                },
                Category {
                    name: "ghost".to_string(),
                    members: vec!["not-a-word".to_string()],
                },
            ],
        }
    }

    #[test]
    fn baseline_f1_matches_the_closed_form() {
        let space = random_space(40, 6, 0xABCD);
        let config = CategoryBenchConfig {
            fractions: vec![0.25, 0.5],
            methods: vec![CategoryMethod::Baseline],
            n_runs: 3,
            base_seed: 17,
        };
        let report = run_category_benchmark(&space, &toy_corpus(), &config).unwrap();
        assert_eq!(report.skipped_categories, vec!["ghost".to_string()]);
        for row in &report.rows {
            for cell in &row.per_category {
                let size = if cell.category == "first" { 8 } else { 12 };
                let count = ((row.fraction * size as f64).round() as usize)
                    .max(1)
                    .min(size);
                // baseline precision is 1, recall is count/size
                let expect = 2.0 * count as f64 / (size + count) as f64;
                assert!(
                    (cell.mean_f1 - expect).abs() < 1e-12,
                    "{} at {}: {} != {}",
                    cell.category,
                    row.fraction,
                    cell.mean_f1,
                    expect
                );
            }
            let macro_expect =
                row.per_category.iter().map(|c| c.mean_f1).sum::<f64>() / 2.0;
            assert!((row.macro_mean_f1 - macro_expect).abs() < 1e-12);
        }
    }

    #[test]
    fn benchmark_is_deterministic() {
        let space = planted_space(10, 30, 8, 0x5EED);
        let corpus = CategoryCorpus {
            name: "t".to_string(),
            categories: vec![Category {
                name: "cluster".to_string(),
                members: (0..10).map(|i| format!("w{i}")).collect(),
            }],
        };
        let config = CategoryBenchConfig {
            fractions: vec![0.3, 0.5],
            methods: vec![
                CategoryMethod::Baseline,
                CategoryMethod::Ssn,
                CategoryMethod::Svm { negatives: 10 },
            ],
            n_runs: 2,
            base_seed: 5,
        };
        let a = run_category_benchmark(&space, &corpus, &config).unwrap();
        let b = run_category_benchmark(&space, &corpus, &config).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.to_tsv(), b.to_tsv());
    }

    #[test]
    fn tsv_layout_is_method_rows_by_fraction_columns() {
        let space = random_space(30, 5, 2);
        let corpus = CategoryCorpus {
            name: "t".to_string(),
            categories: vec![Category {
                name: "c".to_string(),
                members: (0..6).map(|i| format!("w{i}")).collect(),
            }],
        };
        let config = CategoryBenchConfig {
            fractions: vec![0.25, 0.5],
            methods: vec![CategoryMethod::Baseline, CategoryMethod::Ssn],
            n_runs: 1,
            base_seed: 0,
        };
        let report = run_category_benchmark(&space, &corpus, &config).unwrap();
        let tsv = report.to_tsv();
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines[0], "method\t25%\t50%");
        assert!(lines[1].starts_with("baseline\t"));
        assert!(lines[2].starts_with("SSN\t"));
        assert_eq!(lines.len(), 3);
        for line in &lines[1..] {
            assert_eq!(line.split('\t').count(), 3);
        }
    }

    #[test]
    fn method_names_parse_round_trip() {
        for m in [
            CategoryMethod::Baseline,
            CategoryMethod::Ssn,
            CategoryMethod::Svm { negatives: 100 },
            CategoryMethod::Svm { negatives: 500 },
        ] {
            assert_eq!(m.name().parse::<CategoryMethod>().unwrap(), m);
        }
        assert!("SVM0".parse::<CategoryMethod>().is_err());
        assert!("bogus".parse::<CategoryMethod>().is_err());
    }

    #[test]
    fn benchmark_rejects_bad_config() {
        let space = random_space(10, 4, 3);
        let corpus = toy_corpus();
        let bad_fraction = CategoryBenchConfig {
            fractions: vec![1.5],
            ..CategoryBenchConfig::default()
        };
        assert!(matches!(
            run_category_benchmark(&space, &corpus, &bad_fraction),
            Err(Error::ScaleOutOfRange(_))
        ));
        let no_runs = CategoryBenchConfig {
            n_runs: 0,
            ..CategoryBenchConfig::default()
        };
        assert!(matches!(
            run_category_benchmark(&space, &corpus, &no_runs),
            Err(Error::EmptyClass)
        ));
    }
}
