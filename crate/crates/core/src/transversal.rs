//! Rainbow Hamilton cycles and paths with their color assignment.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error as CrateError, Result};
use crate::family::ColoredFamily;

/// A Hamilton cycle (or path) with the color `colors[i]` on the edge
/// `vertices[i] vertices[i+1]`; for cycles the last color sits on the closing edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "TransversalFile", try_from = "TransversalFile")]
pub struct Transversal {
    pub vertices: Vec<usize>,
    pub colors: Vec<usize>,
    pub closed: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransversalError {
    #[error("vertex sequence is not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("expected {expected} edge colors, found {found}")]
    WrongEdgeCount { expected: usize, found: usize },
    #[error("family has {m} colors but the transversal has {edges} edges")]
    NotBijective { m: usize, edges: usize },
    #[error("color {0} out of range")]
    ColorOutOfRange(usize),
    #[error("color {0} used twice")]
    ColorReused(usize),
    #[error("edge {u}-{v} is not in color {c}")]
    NotMember { u: usize, v: usize, c: usize },
}

impl Transversal {
    pub fn cycle(vertices: Vec<usize>, colors: Vec<usize>) -> Self {
        Transversal { vertices, colors, closed: true }
    }

    pub fn path(vertices: Vec<usize>, colors: Vec<usize>) -> Self {
        Transversal { vertices, colors, closed: false }
    }

    pub fn edge_count(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len().saturating_sub(1)
        }
    }

    /// Edges in traversal order, each as it appears in the sequence.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let k = self.vertices.len();
        (0..self.edge_count()).map(|i| (self.vertices[i], self.vertices[(i + 1) % k])).collect()
    }

    /// `((min, max), color)` for every edge.
    pub fn colored_edges(&self) -> Vec<((usize, usize), usize)> {
        self.edges()
            .into_iter()
            .zip(&self.colors)
            .map(|((u, v), &c)| ((u.min(v), u.max(v)), c))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TransversalFile::from(self)).expect("transversal serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: TransversalFile = serde_json::from_str(s)?;
        file.try_into()
    }
}

/// Checks Hamiltonicity, that colors form a bijection onto the family's colors,
/// and that every edge lies in its assigned color.
pub fn validate_transversal(f: &ColoredFamily, t: &Transversal) -> std::result::Result<(), TransversalError> {
    let n = f.n();
    let mut seen = vec![false; n];
    if t.vertices.len() != n {
        return Err(TransversalError::NotPermutation(n));
    }
    for &v in &t.vertices {
        if v >= n || seen[v] {
            return Err(TransversalError::NotPermutation(n));
        }
        seen[v] = true;
    }
    if t.colors.len() != t.edge_count() {
        return Err(TransversalError::WrongEdgeCount { expected: t.edge_count(), found: t.colors.len() });
    }
    if t.edge_count() != f.m() {
        return Err(TransversalError::NotBijective { m: f.m(), edges: t.edge_count() });
    }
    let mut used = vec![false; f.m()];
    for ((u, v), c) in t.edges().into_iter().zip(t.colors.iter().copied()) {
        if c >= f.m() {
            return Err(TransversalError::ColorOutOfRange(c));
        }
        if used[c] {
            return Err(TransversalError::ColorReused(c));
        }
        used[c] = true;
        if !f.has(c, u, v) {
            return Err(TransversalError::NotMember { u, v, c });
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct TransversalFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    cycle: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<Vec<usize>>,
    phi: BTreeMap<String, usize>,
}

impl From<&Transversal> for TransversalFile {
    fn from(t: &Transversal) -> Self {
        let phi = t
            .colored_edges()
            .into_iter()
            .map(|((u, v), c)| (format!("{u}-{v}"), c))
            .collect();
        let (cycle, path) = if t.closed {
            (Some(t.vertices.clone()), None)
        } else {
            (None, Some(t.vertices.clone()))
        };
        TransversalFile { cycle, path, phi }
    }
}

impl From<Transversal> for TransversalFile {
    fn from(t: Transversal) -> Self {
        TransversalFile::from(&t)
    }
}

impl TryFrom<TransversalFile> for Transversal {
    type Error = CrateError;
    fn try_from(file: TransversalFile) -> Result<Self> {
        let (vertices, closed) = match (file.cycle, file.path) {
            (Some(c), None) => (c, true),
            (None, Some(p)) => (p, false),
            _ => return Err(CrateError::Malformed("exactly one of cycle/path expected".into())),
        };
        let mut t = Transversal { vertices, colors: Vec::new(), closed };
        for (u, v) in t.edges() {
            let key = format!("{}-{}", u.min(v), u.max(v));
            let c = file
                .phi
                .get(&key)
                .ok_or_else(|| CrateError::Malformed(format!("phi has no entry for {key}")))?;
            t.colors.push(*c);
        }
        if t.colors.len() != file.phi.len() {
            return Err(CrateError::Malformed("phi has entries for non-edges".into()));
        }
        Ok(t)
    }
}
