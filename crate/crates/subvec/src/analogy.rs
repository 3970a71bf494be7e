//! Word analogy: five solvers for "x1 is to y1 as x2 is to ?" and a
//! sectioned benchmark harness over the four-token corpus format.
//!
//! Three solvers are offset arithmetic over one or more example pairs
//! (`VecOfAdd`, `VecOfMul`, `VecOfAvr`). Two decompose the section's word
//! sets through shared roots (`SSNbranch`, `SSNfilter`). All return the
//! best-scoring vocabulary row outside the solver's own input words.

use crate::corpora::AnalogySections;
use crate::decomp::root;
use crate::embed::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::vector::{add, cosine, sub, Vector};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashSet;
use std::str::FromStr;

/// Analogy solver selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalogyMethod {
    VecOfAdd,
    VecOfMul,
    VecOfAvr,
    SsnBranch,
    SsnFilter,
}

impl AnalogyMethod {
    pub fn name(self) -> &'static str {
        match self {
            AnalogyMethod::VecOfAdd => "VecOfAdd",
            AnalogyMethod::VecOfMul => "VecOfMul",
            AnalogyMethod::VecOfAvr => "VecOfAvr",
            AnalogyMethod::SsnBranch => "SSNbranch",
            AnalogyMethod::SsnFilter => "SSNfilter",
        }
    }

    pub fn all() -> Vec<AnalogyMethod> {
        vec![
            AnalogyMethod::VecOfAdd,
            AnalogyMethod::VecOfMul,
            AnalogyMethod::VecOfAvr,
            AnalogyMethod::SsnBranch,
            AnalogyMethod::SsnFilter,
        ]
    }
}

impl FromStr for AnalogyMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "add" | "VecOfAdd" => Ok(AnalogyMethod::VecOfAdd),
            "mul" | "VecOfMul" => Ok(AnalogyMethod::VecOfMul),
            "avr" | "VecOfAvr" => Ok(AnalogyMethod::VecOfAvr),
            "branch" | "SSNbranch" => Ok(AnalogyMethod::SsnBranch),
            "filter" | "SSNfilter" => Ok(AnalogyMethod::SsnFilter),
            other => Err(format!(
                "unknown method {other:?} (expected add, mul, avr, branch, or filter)"
            )),
        }
    }
}

/// Best row by `score`, ties broken by ascending token. Rows in `exclude`
/// and rows scored `None` never win.
pub(crate) fn scan_best<F>(space: &EmbeddingSpace, exclude: &[usize], score: F) -> Result<usize>
where
    F: Fn(usize) -> Option<f64> + Sync,
{
    let excluded: HashSet<usize> = exclude.iter().copied().collect();
    let best = (0..space.len())
        .into_par_iter()
        .filter_map(|i| {
            if excluded.contains(&i) {
                return None;
            }
            score(i).map(|s| (i, s))
        })
        .reduce_with(|a, b| {
            match a.1.total_cmp(&b.1) {
                std::cmp::Ordering::Greater => a,
                std::cmp::Ordering::Less => b,
                std::cmp::Ordering::Equal => {
                    if space.token(a.0) <= space.token(b.0) {
                        a
                    } else {
                        b
                    }
                }
            }
        });
    best.map(|(i, _)| i).ok_or(Error::EmptyVocabulary)
}

/// Best row by cosine against `query`; zero-norm rows are skipped.
pub(crate) fn scan_best_cosine(
    space: &EmbeddingSpace,
    query: &[f64],
    exclude: &[usize],
) -> Result<usize> {
    if query.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroQueryVector);
    }
    scan_best(space, exclude, |i| {
        if space.row_norm(i) == 0.0 {
            None
        } else {
            Some(cosine(query, space.row(i)))
        }
    })
}

/// Offset solver: nearest row to (y1 − x1) + x2 by cosine.
pub fn vec_of_add(
    space: &EmbeddingSpace,
    x1: usize,
    y1: usize,
    x2: usize,
    exclude_inputs: bool,
) -> Result<usize> {
    let query = add(&sub(space.row(y1), space.row(x1)), space.row(x2));
    let exclude: Vec<usize> = if exclude_inputs {
        vec![x1, y1, x2]
    } else {
        Vec::new()
    };
    scan_best_cosine(space, &query, &exclude)
}

/// Multiplicative solver: rows are scored by
/// s(y, y1) · s(y, x2) / (s(y, x1) + 0.001) with s = (1 + cos)/2.
pub fn vec_of_mul(
    space: &EmbeddingSpace,
    x1: usize,
    y1: usize,
    x2: usize,
    exclude_inputs: bool,
) -> Result<usize> {
    for row in [x1, y1, x2] {
        if space.row_norm(row) == 0.0 {
            return Err(Error::ZeroQueryVector);
        }
    }
    let (vx1, vy1, vx2) = (space.row(x1), space.row(y1), space.row(x2));
    let exclude: Vec<usize> = if exclude_inputs {
        vec![x1, y1, x2]
    } else {
        Vec::new()
    };
    let sim = |a: &[f64], b: &[f64]| (1.0 + cosine(a, b)) / 2.0;
    scan_best(space, &exclude, |i| {
        if space.row_norm(i) == 0.0 {
            return None;
        }
        let y = space.row(i);
        Some(sim(y, vy1) * sim(y, vx2) / (sim(y, vx1) + 0.001))
    })
}

/// Averaged-offset solver: nearest row to x2 + mean_i(y_i − x_i) over the
/// given (x, y) row pairs, excluding x2 and every pair word.
pub fn vec_of_avr(
    space: &EmbeddingSpace,
    pairs: &[(usize, usize)],
    x2: usize,
) -> Result<usize> {
    if pairs.is_empty() {
        return Err(Error::EmptyPairs);
    }
    let mut mean = vec![0.0; space.dim()];
    for &(x, y) in pairs {
        let offset = sub(space.row(y), space.row(x));
        for (acc, o) in mean.iter_mut().zip(offset.iter()) {
            *acc += o;
        }
    }
    let inv = 1.0 / pairs.len() as f64;
    for m in mean.iter_mut() {
        *m *= inv;
    }
    let query = add(&mean, space.row(x2));
    let mut exclude = vec![x2];
    for &(x, y) in pairs {
        exclude.push(x);
        exclude.push(y);
    }
    scan_best_cosine(space, &query, &exclude)
}

/// Branch solver: nearest row to (x2 − root(X)) + root(Y), excluding X ∪ Y.
///
/// X is the section's x-side rows (x2 included); Y is the y-side rows with
/// the answer removed.
pub fn ssn_branch(
    space: &EmbeddingSpace,
    x2: usize,
    x_rows: &[usize],
    y_rows: &[usize],
) -> Result<usize> {
    let query = branch_query(space, x2, x_rows, y_rows)?;
    let exclude: Vec<usize> = x_rows.iter().chain(y_rows).copied().collect();
    scan_best_cosine(space, &query, &exclude)
}

fn branch_query(
    space: &EmbeddingSpace,
    x2: usize,
    x_rows: &[usize],
    y_rows: &[usize],
) -> Result<Vector> {
    let xs: Vec<&[f64]> = x_rows.iter().map(|&i| space.row(i)).collect();
    let ys: Vec<&[f64]> = y_rows.iter().map(|&i| space.row(i)).collect();
    let root_x = root(&xs)?;
    let root_y = root(&ys)?;
    Ok(add(&sub(space.row(x2), &root_x), &root_y))
}

/// Filtered solver: one branch β_i = x2 − root([x2, x_i]) per other x-side
/// row, query root(β_1..β_k) + root(Y). Falls back to the branch solver
/// when any root degenerates.
pub fn ssn_filter(
    space: &EmbeddingSpace,
    x2: usize,
    x_rows: &[usize],
    y_rows: &[usize],
) -> Result<usize> {
    match filter_query(space, x2, x_rows, y_rows) {
        Ok(query) => {
            let exclude: Vec<usize> = x_rows.iter().chain(y_rows).copied().collect();
            scan_best_cosine(space, &query, &exclude)
        }
        Err(_) => ssn_branch(space, x2, x_rows, y_rows),
    }
}

fn filter_query(
    space: &EmbeddingSpace,
    x2: usize,
    x_rows: &[usize],
    y_rows: &[usize],
) -> Result<Vector> {
    let vx2 = space.row(x2);
    let mut betas: Vec<Vector> = Vec::new();
    for &xi in x_rows {
        if xi == x2 {
            continue;
        }
        let pair_root = root(&[vx2, space.row(xi)])?;
        betas.push(sub(vx2, &pair_root));
    }
    let beta_slices: Vec<&[f64]> = betas.iter().map(|b| b.as_slice()).collect();
    let filtered = root(&beta_slices)?;
    let ys: Vec<&[f64]> = y_rows.iter().map(|&i| space.row(i)).collect();
    let root_y = root(&ys)?;
    Ok(add(&filtered, &root_y))
}

/// Question counts for one method over one scope (section or overall).
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Tally {
    /// All questions in scope, answerable or not.
    pub total: usize,
    /// Questions whose four words all resolved in the vocabulary.
    pub answered: usize,
    pub correct: usize,
    /// Answered questions where the solver returned an error; they count as
    /// incorrect.
    pub errored: usize,
    pub coverage: f64,
    pub accuracy: Option<f64>,
}

impl Tally {
    fn finalize(mut self) -> Self {
        self.coverage = if self.total == 0 {
            0.0
        } else {
            self.answered as f64 / self.total as f64
        };
        self.accuracy = if self.answered == 0 {
            None
        } else {
            Some(self.correct as f64 / self.answered as f64)
        };
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SectionResult {
    pub section: String,
    #[serde(flatten)]
    pub tally: Tally,
}

#[derive(Clone, Debug, Serialize)]
pub struct MethodResult {
    pub method: String,
    pub overall: Tally,
    pub sections: Vec<SectionResult>,
}

/// Full analogy benchmark results.
#[derive(Clone, Debug, Serialize)]
pub struct AnalogyReport {
    pub embedding: String,
    pub vocab_size: usize,
    pub dim: usize,
    pub methods: Vec<MethodResult>,
}

impl AnalogyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Method rows with one overall-accuracy column for this embedding.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("method\t{}\n", self.embedding);
        for m in &self.methods {
            match m.overall.accuracy {
                Some(a) => out.push_str(&format!("{}\t{:.3}\n", m.method, a)),
                None => out.push_str(&format!("{}\t-\n", m.method)),
            }
        }
        out
    }
}

struct ResolvedSection {
    name: String,
    /// Row quadruples [x1, y1, x2, y2]; None when any word is out of
    /// vocabulary.
    questions: Vec<Option<[usize; 4]>>,
    /// Section pairs with both sides resolved, first-appearance order.
    pairs: Vec<(usize, usize)>,
    /// Distinct x-side rows, first-appearance order.
    x_rows: Vec<usize>,
    /// Distinct y-side rows, first-appearance order.
    y_rows: Vec<usize>,
}

fn resolve_sections(space: &EmbeddingSpace, sections: &AnalogySections) -> Vec<ResolvedSection> {
    sections
        .sections
        .iter()
        .map(|section| {
            let questions = section
                .questions
                .iter()
                .map(|q| {
                    let rows = [
                        space.resolve(&q.x1).ok()?,
                        space.resolve(&q.y1).ok()?,
                        space.resolve(&q.x2).ok()?,
                        space.resolve(&q.y2).ok()?,
                    ];
                    Some(rows)
                })
                .collect();
            let mut pairs = Vec::new();
            let mut x_rows = Vec::new();
            let mut y_rows = Vec::new();
            let mut seen_pair = HashSet::new();
            let mut seen_x = HashSet::new();
            let mut seen_y = HashSet::new();
            for (xw, yw) in &section.pairs {
                let (Ok(x), Ok(y)) = (space.resolve(xw), space.resolve(yw)) else {
                    continue;
                };
                if seen_pair.insert((x, y)) {
                    pairs.push((x, y));
                }
                if seen_x.insert(x) {
                    x_rows.push(x);
                }
                if seen_y.insert(y) {
                    y_rows.push(y);
                }
            }
            ResolvedSection {
                name: section.name.clone(),
                questions,
                pairs,
                x_rows,
                y_rows,
            }
        })
        .collect()
}

fn solve_one(
    space: &EmbeddingSpace,
    method: AnalogyMethod,
    section: &ResolvedSection,
    rows: [usize; 4],
) -> Result<usize> {
    let [x1, y1, x2, y2] = rows;
    match method {
        AnalogyMethod::VecOfAdd => vec_of_add(space, x1, y1, x2, true),
        AnalogyMethod::VecOfMul => vec_of_mul(space, x1, y1, x2, true),
        AnalogyMethod::VecOfAvr => {
            // drop every pair whose target is the answer row: the solver
            // must not average in the offset it is asked to produce
            let pairs: Vec<(usize, usize)> = section
                .pairs
                .iter()
                .copied()
                .filter(|&(_, y)| y != y2)
                .collect();
            vec_of_avr(space, &pairs, x2)
        }
        AnalogyMethod::SsnBranch | AnalogyMethod::SsnFilter => {
            let y_rows: Vec<usize> = section
                .y_rows
                .iter()
                .copied()
                .filter(|&y| y != y2)
                .collect();
            if method == AnalogyMethod::SsnBranch {
                ssn_branch(space, x2, &section.x_rows, &y_rows)
            } else {
                ssn_filter(space, x2, &section.x_rows, &y_rows)
            }
        }
    }
}

/// Runs every method over every section. Questions with out-of-vocabulary
/// words are skipped identically for all methods; solver errors count as
/// answered but incorrect.
pub fn run_analogy_benchmark(
    space: &EmbeddingSpace,
    sections: &AnalogySections,
    methods: &[AnalogyMethod],
) -> Result<AnalogyReport> {
    let resolved = resolve_sections(space, sections);
    let mut method_results = Vec::with_capacity(methods.len());
    for &method in methods {
        let mut overall = Tally::default();
        let mut section_results = Vec::with_capacity(resolved.len());
        for section in &resolved {
            enum Outcome {
                Skipped,
                Correct,
                Incorrect,
                Errored,
            }
            let outcomes: Vec<Outcome> = section
                .questions
                .par_iter()
                .map(|q| match q {
                    None => Outcome::Skipped,
                    Some(rows) => match solve_one(space, method, section, *rows) {
                        Ok(predicted) if predicted == rows[3] => Outcome::Correct,
                        Ok(_) => Outcome::Incorrect,
                        Err(_) => Outcome::Errored,
                    },
                })
                .collect();
            let mut tally = Tally {
                total: outcomes.len(),
                ..Tally::default()
            };
            for o in &outcomes {
                match o {
                    Outcome::Skipped => {}
                    Outcome::Correct => {
                        tally.answered += 1;
                        tally.correct += 1;
                    }
                    Outcome::Incorrect => tally.answered += 1,
                    Outcome::Errored => {
                        tally.answered += 1;
                        tally.errored += 1;
                    }
                }
            }
            overall.total += tally.total;
            overall.answered += tally.answered;
            overall.correct += tally.correct;
            overall.errored += tally.errored;
            section_results.push(SectionResult {
                section: section.name.clone(),
                tally: tally.finalize(),
            });
        }
        method_results.push(MethodResult {
            method: method.name().to_string(),
            overall: overall.finalize(),
            sections: section_results,
        });
    }
    Ok(AnalogyReport {
        embedding: space.source_tag().to_string(),
        vocab_size: space.len(),
        dim: space.dim(),
        methods: method_results,
    })
}
