//! Evaluation corpora: the four-word analogy file format and closed word
//! categories for the completion benchmark.
//!
//! The analogy format is line-oriented: `: section-name` opens a section and
//! every following line holds exactly four whitespace-separated tokens
//! `x1 y1 x2 y2`. Category corpora are JSON documents with a corpus name and
//! a list of named member arrays; a curated closed-class corpus is bundled
//! into the library.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fs;
use std::path::Path;

/// One analogy question: x1 is to y1 as x2 is to y2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalogyQuestion {
    pub x1: String,
    pub y1: String,
    pub x2: String,
    pub y2: String,
}

/// A named block of questions together with its distinct (x, y) pairs in
/// first-appearance order.
#[derive(Clone, Debug, Serialize)]
pub struct AnalogySection {
    pub name: String,
    pub pairs: Vec<(String, String)>,
    pub questions: Vec<AnalogyQuestion>,
}

/// A parsed analogy corpus.
#[derive(Clone, Debug, Serialize)]
pub struct AnalogySections {
    pub sections: Vec<AnalogySection>,
}

impl AnalogySections {
    pub fn total_questions(&self) -> usize {
        self.sections.iter().map(|s| s.questions.len()).sum()
    }
}

/// Parses the `: section` / four-token-line analogy format.
///
/// Line numbers in errors are 1-based. Blank lines are ignored; any other
/// line that is neither a header nor a four-token question is malformed, as
/// is a question that appears before the first header.
pub fn parse_google_analogy_str(text: &str) -> Result<AnalogySections> {
    let mut sections: Vec<AnalogySection> = Vec::new();
    let mut seen_pairs: HashSet<(String, String)> = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix(':') {
            sections.push(AnalogySection {
                name: name.trim().to_string(),
                pairs: Vec::new(),
                questions: Vec::new(),
            });
            seen_pairs.clear();
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 4 {
            return Err(Error::MalformedLine(idx + 1));
        }
        let section = sections.last_mut().ok_or(Error::MalformedLine(idx + 1))?;
        let q = AnalogyQuestion {
            x1: tokens[0].to_string(),
            y1: tokens[1].to_string(),
            x2: tokens[2].to_string(),
            y2: tokens[3].to_string(),
        };
        for pair in [(q.x1.clone(), q.y1.clone()), (q.x2.clone(), q.y2.clone())] {
            if seen_pairs.insert(pair.clone()) {
                section.pairs.push(pair);
            }
        }
        section.questions.push(q);
    }
    if sections.is_empty() {
        return Err(Error::NoSections);
    }
    Ok(AnalogySections { sections })
}

pub fn parse_google_analogy(path: impl AsRef<Path>) -> Result<AnalogySections> {
    parse_google_analogy_str(&fs::read_to_string(path)?)
}

/// Writes the corpus back in the same format (`: name` headers, one question
/// per line, single spaces). Round-trips modulo whitespace.
pub fn write_google_analogy(path: impl AsRef<Path>, sections: &AnalogySections) -> Result<()> {
    let mut out = String::new();
    for section in &sections.sections {
        out.push_str(": ");
        out.push_str(&section.name);
        out.push('\n');
        for q in &section.questions {
            out.push_str(&format!("{} {} {} {}\n", q.x1, q.y1, q.x2, q.y2));
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// A named closed category of words.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Category {
    pub name: String,
    pub members: Vec<String>,
}

/// A collection of closed categories.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct CategoryCorpus {
    pub name: String,
    pub categories: Vec<Category>,
}

impl CategoryCorpus {
    pub fn total_members(&self) -> usize {
        self.categories.iter().map(|c| c.members.len()).sum()
    }

    pub fn category(&self, name: &str) -> Option<&Category> {
        self.categories.iter().find(|c| c.name == name)
    }

    fn validate(self) -> Result<Self> {
        let mut seen = HashSet::new();
        for cat in &self.categories {
            if !seen.insert(cat.name.clone()) {
                return Err(Error::DuplicateCategory(cat.name.clone()));
            }
            if cat.members.is_empty() {
                return Err(Error::EmptyCategory(cat.name.clone()));
            }
        }
        Ok(self)
    }
}

/// Loads a category corpus from JSON
/// (`{"name": ..., "categories": [{"name", "members"}]}`).
pub fn load_category_corpus(path: impl AsRef<Path>) -> Result<CategoryCorpus> {
    let text = fs::read_to_string(path)?;
    parse_category_corpus_str(&text)
}

pub fn parse_category_corpus_str(text: &str) -> Result<CategoryCorpus> {
    let corpus: CategoryCorpus =
        serde_json::from_str(text).map_err(|e| Error::SchemaViolation(e.to_string()))?;
    corpus.validate()
}

/// The curated closed-class corpus bundled with the library: thirteen
/// categories of fixed membership (calendar terms, function-word classes,
/// geographic names), single-token and exhaustive within each class.
pub fn bundled_closed_categories() -> CategoryCorpus {
    parse_category_corpus_str(include_str!("../data/closed_categories.json"))
        .expect("bundled corpus is valid")
}

/// Reinterprets each analogy section as two categories, `<name>/x` over the
/// distinct x-side tokens and `<name>/y` over the distinct y-side tokens,
/// both in first-appearance order.
pub fn analogy_sections_to_categories(sections: &AnalogySections) -> CategoryCorpus {
    let mut categories = Vec::with_capacity(sections.sections.len() * 2);
    for section in &sections.sections {
        let mut xs: Vec<String> = Vec::new();
        let mut ys: Vec<String> = Vec::new();
        let mut seen_x = HashSet::new();
        let mut seen_y = HashSet::new();
        for (x, y) in &section.pairs {
            if seen_x.insert(x.clone()) {
                xs.push(x.clone());
            }
            if seen_y.insert(y.clone()) {
                ys.push(y.clone());
            }
        }
        categories.push(Category {
            name: format!("{}/x", section.name),
            members: xs,
        });
        categories.push(Category {
            name: format!("{}/y", section.name),
            members: ys,
        });
    }
    CategoryCorpus {
        name: "analogy-sections".to_string(),
        categories,
    }
}
