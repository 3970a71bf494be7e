//! Sub-vector decomposition: the membership predicate, children queries,
//! shared roots, semantic trees, and the branch operations derived from them.
//!
//! A vector δ is a *sub-vector* of v iff δ·v ≥ ‖δ‖². The comparison is exact
//! at working precision: no epsilon is folded into the predicate, equality
//! counts as membership, and all tolerances live in tests instead.

use crate::embed::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::vector::{dot, norm, norm_sq, scaled, sub, Vector};
use rayon::prelude::*;
use serde::Serialize;

/// Membership predicate: δ·v ≥ ‖δ‖².
pub fn is_subvector(delta: &[f64], v: &[f64]) -> Result<bool> {
    check_dims(delta.len(), v.len())?;
    Ok(dot(delta, v) >= norm_sq(delta))
}

/// Signed membership margin δ·v − ‖δ‖²; non-negative iff δ is a sub-vector.
pub fn margin(delta: &[f64], v: &[f64]) -> Result<f64> {
    check_dims(delta.len(), v.len())?;
    Ok(dot(delta, v) - norm_sq(delta))
}

/// One vocabulary entry admitted by the membership predicate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChildEntry {
    pub word: String,
    pub margin: f64,
}

/// All vocabulary vectors that δ is a sub-vector of, ranked by margin
/// descending with lexicographic token tie-breaks.
///
/// The zero vector is a sub-vector of everything, so it is rejected as an
/// uninformative query rather than answered with the whole vocabulary.
pub fn children(space: &EmbeddingSpace, delta: &[f64]) -> Result<Vec<ChildEntry>> {
    check_dims(delta.len(), space.dim())?;
    if delta.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroDelta);
    }
    let d2 = norm_sq(delta);
    let mut hits: Vec<(usize, f64)> = (0..space.len())
        .into_par_iter()
        .filter_map(|i| {
            let m = dot(delta, space.row(i)) - d2;
            // normalize -0.0 so equal-margin ties order purely by token
            (m >= 0.0).then_some((i, if m == 0.0 { 0.0 } else { m }))
        })
        .collect();
    hits.sort_unstable_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then_with(|| space.token(a.0).cmp(space.token(b.0)))
    });
    Ok(hits
        .into_iter()
        .map(|(i, m)| ChildEntry {
            word: space.token(i).to_string(),
            margin: m,
        })
        .collect())
}

/// Vocabulary row indices admitted by the membership predicate, in row
/// order. Same admission rule as `children`, without ranking or token
/// materialization; used by bulk consumers that work in index space.
pub fn child_rows(space: &EmbeddingSpace, delta: &[f64]) -> Result<Vec<usize>> {
    check_dims(delta.len(), space.dim())?;
    if delta.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroDelta);
    }
    let d2 = norm_sq(delta);
    Ok((0..space.len())
        .into_par_iter()
        .filter(|&i| dot(delta, space.row(i)) >= d2)
        .collect())
}

struct RootParts {
    alpha: Vector,
    unit: Vector,
    v_min: f64,
}

/// The largest shared sub-vector of the supports: v_min·α_unit, where α_unit
/// is the normalized support sum and v_min the smallest support projection
/// onto it.
///
/// Guarantees `is_subvector(root, v_i)` for every support under the exact
/// predicate. The closed form alone cannot: the minimizing support lands
/// exactly on the predicate boundary, where rounding of α flips the margin
/// sign at random. `fitted_root` therefore shaves v_min by ulp-scale steps
/// (≲1e-13 relative, far inside every stated tolerance) until the predicate
/// holds, i.e. until α really is a vector shared by all supports.
pub fn root(supports: &[&[f64]]) -> Result<Vector> {
    Ok(fitted_root(supports, false)?.alpha)
}

fn fitted_root(supports: &[&[f64]], fit_branches: bool) -> Result<RootParts> {
    let Some(first) = supports.first() else {
        return Err(Error::EmptySupportSet);
    };
    let dim = first.len();
    for s in supports {
        check_dims(s.len(), dim)?;
    }
    let mut sum = vec![0.0f64; dim];
    for s in supports {
        for (acc, &x) in sum.iter_mut().zip(*s) {
            *acc += x;
        }
    }
    let sum_norm = norm(&sum);
    if sum_norm == 0.0 {
        return Err(Error::ZeroSum);
    }
    // Identical supports share themselves exactly; the closed form would
    // reproduce v only to ~1 ulp, breaking the v = root([v]) identity.
    if supports.windows(2).all(|w| w[0] == w[1]) {
        let v = Vector(first.to_vec());
        let n = v.norm();
        return Ok(RootParts {
            unit: scaled(&v, 1.0 / n),
            v_min: n,
            alpha: v,
        });
    }
    let unit = scaled(&sum, 1.0 / sum_norm);
    let mut v_min = supports
        .iter()
        .map(|s| dot(&unit, s))
        .fold(f64::INFINITY, f64::min);
    if v_min.is_nan() || v_min <= 0.0 {
        return Err(Error::DegenerateSupportSet);
    }
    let mut step = f64::EPSILON * v_min;
    for _ in 0..64 {
        let alpha = scaled(&unit, v_min);
        if shared_by_all(&alpha, supports, fit_branches) {
            return Ok(RootParts { alpha, unit, v_min });
        }
        v_min -= step;
        step *= 2.0;
        if v_min <= 0.0 {
            break;
        }
    }
    Err(Error::DegenerateSupportSet)
}

fn shared_by_all(alpha: &[f64], supports: &[&[f64]], fit_branches: bool) -> bool {
    let a2 = norm_sq(alpha);
    supports.iter().all(|v| {
        if dot(alpha, v) < a2 {
            return false;
        }
        if fit_branches {
            let beta = sub(v, alpha);
            dot(&beta, v) >= norm_sq(&beta)
        } else {
            true
        }
    })
}

/// What remains of v after removing the root shared with `supports`.
pub fn residual(v: &[f64], supports: &[&[f64]]) -> Result<Vector> {
    let alpha = root(supports)?;
    check_dims(v.len(), alpha.dim())?;
    Ok(sub(v, &alpha))
}

/// Splits v into (c·v, (1−c)·v) for c ∈ [0, 1].
///
/// Both halves satisfy the membership predicate against v, and they sum back
/// to v bit-exactly: the larger half is the one produced by multiplication,
/// the smaller is `v - larger`, which Sterbenz's lemma makes an exact
/// subtraction.
pub fn scale_split(v: &[f64], c: f64) -> Result<(Vector, Vector)> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::ScaleOutOfRange(c));
    }
    if c >= 0.5 {
        let first = scaled(v, c);
        let second = sub(v, &first);
        Ok((first, second))
    } else {
        let second = scaled(v, 1.0 - c);
        let first = sub(v, &second);
        Ok((first, second))
    }
}

/// A root with one branch per support: v_i = α + β_i.
///
/// Construction retries the v_min fit until every support passes both
/// membership checks (α and β_i against v_i) under the exact predicate, so
/// the containment and coupling laws hold for every valid tree, not just in
/// real arithmetic.
#[derive(Clone, Debug)]
pub struct SemanticTree {
    tokens: Vec<String>,
    supports: Vec<Vector>,
    alpha: Vector,
    alpha_unit: Vector,
    v_min: f64,
    branches: Vec<Vector>,
}

impl SemanticTree {
    /// Builds the tree over named support vectors (≥ 2 of them).
    pub fn build(named: Vec<(String, Vector)>) -> Result<Self> {
        if named.len() < 2 {
            return Err(Error::ArityMismatch {
                expected: 2,
                got: named.len(),
            });
        }
        let refs: Vec<&[f64]> = named.iter().map(|(_, v)| v.as_slice()).collect();
        let parts = fitted_root(&refs, true)?;
        let branches = named.iter().map(|(_, v)| sub(v, &parts.alpha)).collect();
        let (tokens, supports) = named.into_iter().unzip();
        Ok(SemanticTree {
            tokens,
            supports,
            alpha: parts.alpha,
            alpha_unit: parts.unit,
            v_min: parts.v_min,
            branches,
        })
    }

    /// Convenience for unnamed supports (property tests, derived queries).
    pub fn build_unnamed(supports: Vec<Vector>) -> Result<Self> {
        Self::build(
            supports
                .into_iter()
                .enumerate()
                .map(|(i, v)| (format!("v{i}"), v))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, i: usize) -> &str {
        &self.tokens[i]
    }

    pub fn support(&self, i: usize) -> &Vector {
        &self.supports[i]
    }

    pub fn alpha(&self) -> &Vector {
        &self.alpha
    }

    pub fn alpha_unit(&self) -> &Vector {
        &self.alpha_unit
    }

    pub fn v_min(&self) -> f64 {
        self.v_min
    }

    pub fn branches(&self) -> &[Vector] {
        &self.branches
    }

    pub fn branch(&self, i: usize) -> Result<&Vector> {
        self.branches.get(i).ok_or(Error::IndexOutOfRange(i))
    }

    /// Offset between two supports: O_ij = v_j − v_i.
    pub fn offset(&self, i: usize, j: usize) -> Result<Vector> {
        let vi = self.supports.get(i).ok_or(Error::IndexOutOfRange(i))?;
        let vj = self.supports.get(j).ok_or(Error::IndexOutOfRange(j))?;
        Ok(sub(vj, vi))
    }

    /// The component of branch i orthogonal to the root direction:
    /// β⊥ = β − (β·α_unit)·α_unit.
    pub fn orthogonal_branch(&self, i: usize) -> Result<Vector> {
        let beta = self.branch(i)?;
        let proj = dot(beta, &self.alpha_unit);
        Ok(sub(beta, &scaled(&self.alpha_unit, proj)))
    }
}

fn check_dims(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}
