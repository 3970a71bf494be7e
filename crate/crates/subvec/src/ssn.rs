//! Semantic space networks: fixed small graphs of semantic trees whose
//! roots, branches, and offsets decompose a handful of words jointly.
//!
//! Three shapes are provided. A *binary tree* stacks a top tree on two
//! two-support trees. A *ternary tree* shares its middle word between the
//! two lower trees. A *quad relation* closes four words into a ring of four
//! two-support trees. `describe` reports every named sub-vector with its
//! norm and margin-ranked children.

use crate::decomp::{children, ChildEntry, SemanticTree};
use crate::embed::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::vector::Vector;
use serde::Serialize;
use std::str::FromStr;

/// Shape selector used by the command-line interface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SsnShape {
    /// A single semantic tree over ≥ 2 words.
    Tree,
    Binary,
    Ternary,
    Quad,
}

impl SsnShape {
    pub fn name(self) -> &'static str {
        match self {
            SsnShape::Tree => "tree",
            SsnShape::Binary => "binary",
            SsnShape::Ternary => "ternary",
            SsnShape::Quad => "quad",
        }
    }
}

impl FromStr for SsnShape {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "tree" => Ok(SsnShape::Tree),
            "binary" => Ok(SsnShape::Binary),
            "ternary" => Ok(SsnShape::Ternary),
            "quad" => Ok(SsnShape::Quad),
            other => Err(format!(
                "unknown shape {other:?} (expected tree, binary, ternary, or quad)"
            )),
        }
    }
}

fn named_pair(space: &EmbeddingSpace, a: &str, b: &str) -> Result<SemanticTree> {
    SemanticTree::build(vec![
        (a.to_string(), Vector(space.lookup(a)?.to_vec())),
        (b.to_string(), Vector(space.lookup(b)?.to_vec())),
    ])
}

/// Two lower trees (v1,v2) → b and (v3,v4) → c under a top tree (b,c) → α.
///
/// Branch naming follows support order: β1 = b − α, β2 = c − α,
/// γ1 = v1 − b, γ2 = v2 − b, γ3 = v3 − c, γ4 = v4 − c.
pub struct BinaryTreeSsn {
    words: [String; 4],
    pub lower_left: SemanticTree,
    pub lower_right: SemanticTree,
    pub top: SemanticTree,
}

pub fn binary_tree(space: &EmbeddingSpace, words: [&str; 4]) -> Result<BinaryTreeSsn> {
    let lower_left = named_pair(space, words[0], words[1])?;
    let lower_right = named_pair(space, words[2], words[3])?;
    let top = SemanticTree::build(vec![
        ("b".to_string(), lower_left.alpha().clone()),
        ("c".to_string(), lower_right.alpha().clone()),
    ])?;
    Ok(BinaryTreeSsn {
        words: words.map(str::to_string),
        lower_left,
        lower_right,
        top,
    })
}

impl BinaryTreeSsn {
    pub fn words(&self) -> &[String; 4] {
        &self.words
    }

    pub fn nodes(&self) -> Vec<(&'static str, &Vector)> {
        vec![
            ("alpha", self.top.alpha()),
            ("beta1", &self.top.branches()[0]),
            ("beta2", &self.top.branches()[1]),
            ("b", self.lower_left.alpha()),
            ("c", self.lower_right.alpha()),
            ("gamma1", &self.lower_left.branches()[0]),
            ("gamma2", &self.lower_left.branches()[1]),
            ("gamma3", &self.lower_right.branches()[0]),
            ("gamma4", &self.lower_right.branches()[1]),
        ]
    }
}

/// Lower trees (v1,v2) → b and (v2,v3) → c share the middle word, with a top
/// tree (b,c) → α. γ1 = v1 − b, γ2 = v2 − b, γ3 = v2 − c, γ4 = v3 − c.
pub struct TernaryTreeSsn {
    words: [String; 3],
    pub left: SemanticTree,
    pub right: SemanticTree,
    pub top: SemanticTree,
}

pub fn ternary_tree(space: &EmbeddingSpace, words: [&str; 3]) -> Result<TernaryTreeSsn> {
    let left = named_pair(space, words[0], words[1])?;
    let right = named_pair(space, words[1], words[2])?;
    let top = SemanticTree::build(vec![
        ("b".to_string(), left.alpha().clone()),
        ("c".to_string(), right.alpha().clone()),
    ])?;
    Ok(TernaryTreeSsn {
        words: words.map(str::to_string),
        left,
        right,
        top,
    })
}

impl TernaryTreeSsn {
    pub fn words(&self) -> &[String; 3] {
        &self.words
    }

    pub fn nodes(&self) -> Vec<(&'static str, &Vector)> {
        vec![
            ("alpha", self.top.alpha()),
            ("beta1", &self.top.branches()[0]),
            ("beta2", &self.top.branches()[1]),
            ("b", self.left.alpha()),
            ("c", self.right.alpha()),
            ("gamma1", &self.left.branches()[0]),
            ("gamma2", &self.left.branches()[1]),
            ("gamma3", &self.right.branches()[0]),
            ("gamma4", &self.right.branches()[1]),
        ]
    }
}

/// Ring of four two-support trees: (v1,v2) → α1, (v2,v3) → α2, (v3,v4) → α3,
/// (v4,v1) → α4. Branches pair off in support order: β1 = v1 − α1,
/// β2 = v2 − α1, β3 = v2 − α2, ..., β7 = v4 − α4, β8 = v1 − α4.
pub struct QuadRelationSsn {
    words: [String; 4],
    pub trees: [SemanticTree; 4],
}

pub fn quad_relation(space: &EmbeddingSpace, words: [&str; 4]) -> Result<QuadRelationSsn> {
    let trees = [
        named_pair(space, words[0], words[1])?,
        named_pair(space, words[1], words[2])?,
        named_pair(space, words[2], words[3])?,
        named_pair(space, words[3], words[0])?,
    ];
    Ok(QuadRelationSsn {
        words: words.map(str::to_string),
        trees,
    })
}

impl QuadRelationSsn {
    pub fn words(&self) -> &[String; 4] {
        &self.words
    }

    pub fn nodes(&self) -> Vec<(String, &Vector)> {
        let mut out = Vec::with_capacity(12);
        for (k, tree) in self.trees.iter().enumerate() {
            out.push((format!("alpha{}", k + 1), tree.alpha()));
        }
        for (k, tree) in self.trees.iter().enumerate() {
            out.push((format!("beta{}", 2 * k + 1), &tree.branches()[0]));
            out.push((format!("beta{}", 2 * k + 2), &tree.branches()[1]));
        }
        out
    }
}

/// One named sub-vector in a describe report.
#[derive(Clone, Debug, Serialize)]
pub struct NodeReport {
    pub name: String,
    pub norm: f64,
    /// Total number of children in the vocabulary; absent when the scan was
    /// skipped (k_cap = 0 or a zero node).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    pub children: Vec<ChildEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Norms and capped children for every named sub-vector of a network.
#[derive(Clone, Debug, Serialize)]
pub struct SsnReport {
    pub shape: String,
    pub words: Vec<String>,
    pub k_cap: usize,
    pub nodes: Vec<NodeReport>,
}

impl SsnReport {
    /// Canonical JSON: node order is construction order, keyed by node name.
    pub fn to_json(&self) -> String {
        let mut nodes = serde_json::Map::new();
        for n in &self.nodes {
            let mut obj = serde_json::Map::new();
            obj.insert("norm".into(), n.norm.into());
            if let Some(c) = n.count {
                obj.insert("count".into(), c.into());
            }
            obj.insert(
                "children".into(),
                serde_json::to_value(&n.children).expect("child entries serialize"),
            );
            if let Some(note) = &n.note {
                obj.insert("note".into(), note.as_str().into());
            }
            nodes.insert(n.name.clone(), serde_json::Value::Object(obj));
        }
        let report = serde_json::json!({
            "shape": self.shape,
            "words": self.words,
            "k_cap": self.k_cap,
            "nodes": nodes,
        });
        serde_json::to_string_pretty(&report).expect("report serializes")
    }
}

/// Builds the report for a list of named sub-vectors.
///
/// With k_cap = 0 no vocabulary scan runs: names and norms only. Zero nodes
/// (degenerate-equal networks) also skip the scan, since the zero vector is
/// a sub-vector of everything and its member list carries no information.
pub fn describe(
    space: &EmbeddingSpace,
    shape: SsnShape,
    words: &[String],
    nodes: &[(String, &Vector)],
    k_cap: usize,
) -> Result<SsnReport> {
    let mut out = Vec::with_capacity(nodes.len());
    for (name, vector) in nodes {
        let norm = vector.norm();
        let (count, kids, note) = if k_cap == 0 {
            (None, Vec::new(), None)
        } else if norm == 0.0 {
            (
                None,
                Vec::new(),
                Some("zero sub-vector; membership query rejected".to_string()),
            )
        } else {
            let mut kids = children(space, vector)?;
            let count = kids.len();
            kids.truncate(k_cap);
            (Some(count), kids, None)
        };
        out.push(NodeReport {
            name: name.clone(),
            norm,
            count,
            children: kids,
            note,
        });
    }
    Ok(SsnReport {
        shape: shape.name().to_string(),
        words: words.to_vec(),
        k_cap,
        nodes: out,
    })
}

/// Report for a single semantic tree: node `alpha` plus one `betaN` per
/// support, bound to `words` order.
pub fn describe_tree(
    space: &EmbeddingSpace,
    tree: &SemanticTree,
    k_cap: usize,
) -> Result<SsnReport> {
    let mut nodes: Vec<(String, &Vector)> = vec![("alpha".to_string(), tree.alpha())];
    for (i, beta) in tree.branches().iter().enumerate() {
        nodes.push((format!("beta{}", i + 1), beta));
    }
    describe(
        space,
        SsnShape::Tree,
        tree.tokens(),
        &nodes,
        k_cap,
    )
}

/// Resolves words and builds the requested shape, returning its report.
pub fn describe_shape(
    space: &EmbeddingSpace,
    shape: SsnShape,
    words: &[String],
    k_cap: usize,
) -> Result<SsnReport> {
    let need = |n: usize| -> Result<()> {
        if words.len() != n {
            return Err(Error::ArityMismatch {
                expected: n,
                got: words.len(),
            });
        }
        Ok(())
    };
    match shape {
        SsnShape::Tree => {
            if words.len() < 2 {
                return Err(Error::ArityMismatch {
                    expected: 2,
                    got: words.len(),
                });
            }
            let named = words
                .iter()
                .map(|w| Ok((w.clone(), Vector(space.lookup(w)?.to_vec()))))
                .collect::<Result<Vec<_>>>()?;
            describe_tree(space, &SemanticTree::build(named)?, k_cap)
        }
        SsnShape::Binary => {
            need(4)?;
            let ssn = binary_tree(space, [&words[0], &words[1], &words[2], &words[3]])?;
            let nodes: Vec<(String, &Vector)> = ssn
                .nodes()
                .into_iter()
                .map(|(n, v)| (n.to_string(), v))
                .collect();
            describe(space, shape, words, &nodes, k_cap)
        }
        SsnShape::Ternary => {
            need(3)?;
            let ssn = ternary_tree(space, [&words[0], &words[1], &words[2]])?;
            let nodes: Vec<(String, &Vector)> = ssn
                .nodes()
                .into_iter()
                .map(|(n, v)| (n.to_string(), v))
                .collect();
            describe(space, shape, words, &nodes, k_cap)
        }
        SsnShape::Quad => {
            need(4)?;
            let ssn = quad_relation(space, [&words[0], &words[1], &words[2], &words[3]])?;
            let nodes = ssn.nodes();
            describe(space, shape, words, &nodes, k_cap)
        }
    }
}
