//! TOML group-definition documents.
//!
//! A document names a virtually abelian group (rank, finite-part
//! multiplication table, one action matrix per finite element), a set of
//! named elements, and named generating sets whose letters are either named
//! elements, words over named elements, or explicit `(v, f)` pairs. See
//! [`G2_EXAMPLE`] for a complete document.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::genset::{GenSet, GenSetError};
use crate::group::{FiniteGroupTable, GroupElement, GroupError, VirtuallyAbelianGroup};

/// The group G₂ = ℤ² ⋊ C₂ with t acting by −I, its standard letters and the
/// generating set {a^{±1}, b^{±1}, t}.
pub const G2_EXAMPLE: &str = r#"name = "G2"
rank = 2

[finite]
mult = [[0, 1], [1, 0]]

[[action]]
matrix = [[1, 0], [0, 1]]

[[action]]
matrix = [[-1, 0], [0, -1]]

[elements]
a = { v = [1, 0], f = 0 }
b = { v = [0, 1], f = 0 }
t = { v = [0, 0], f = 1 }

[gensets]
abt = ["a", "b", "t"]
abt_words = [
    { label = "c", word = ["a", "b"] },
    { label = "t", word = ["t"] },
    { label = "a", v = [1, 0], f = 0 },
]
"#;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("document parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    GenSet(#[from] GenSetError),
    #[error("element {0:?} referenced but not defined under [elements]")]
    UnknownElement(String),
    #[error("generating set {0:?} not defined under [gensets]")]
    UnknownGenSet(String),
    #[error("in {key}: {message}")]
    Semantic { key: String, message: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiniteSection {
    pub mult: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionSection {
    pub matrix: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamedElement {
    pub v: Vec<i64>,
    pub f: usize,
}

/// One letter of a generating set, before symmetric closure.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LetterSpec {
    /// A named element; the name doubles as the label.
    Named(String),
    /// A product of named elements under a fresh label.
    Word { label: String, word: Vec<String> },
    /// An explicit element.
    Explicit { label: String, v: Vec<i64>, f: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupDocument {
    pub name: String,
    pub rank: usize,
    pub finite: FiniteSection,
    #[serde(default)]
    pub action: Vec<ActionSection>,
    #[serde(default)]
    pub elements: BTreeMap<String, NamedElement>,
    #[serde(default)]
    pub gensets: BTreeMap<String, Vec<LetterSpec>>,
}

impl GroupDocument {
    pub fn from_toml(text: &str) -> Result<Self, DocumentError> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self, DocumentError> {
        let text = std::fs::read_to_string(path).map_err(|e| DocumentError::Semantic {
            key: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml(&text)
    }

    /// Builds the group and validates every named element against it.
    pub fn build_group(&self) -> Result<VirtuallyAbelianGroup, DocumentError> {
        let finite = FiniteGroupTable::new(self.finite.mult.clone())?;
        let action = self.action.iter().map(|a| a.matrix.clone()).collect();
        let group = VirtuallyAbelianGroup::new(self.rank, finite, action)?;
        for (name, e) in &self.elements {
            if e.v.len() != self.rank {
                return Err(DocumentError::Semantic {
                    key: format!("elements.{name}"),
                    message: format!("vector has {} entries, rank is {}", e.v.len(), self.rank),
                });
            }
            if e.f >= group.finite.order {
                return Err(DocumentError::Semantic {
                    key: format!("elements.{name}"),
                    message: format!("finite index {} out of range", e.f),
                });
            }
        }
        Ok(group)
    }

    fn named(&self, name: &str) -> Result<GroupElement, DocumentError> {
        self.elements
            .get(name)
            .map(|e| GroupElement::new(e.v.clone(), e.f))
            .ok_or_else(|| DocumentError::UnknownElement(name.to_string()))
    }

    fn resolve_letter(
        &self,
        group: &VirtuallyAbelianGroup,
        spec: &LetterSpec,
    ) -> Result<(String, GroupElement), DocumentError> {
        match spec {
            LetterSpec::Named(name) => Ok((name.clone(), self.named(name)?)),
            LetterSpec::Word { label, word } => {
                let mut acc = crate::group::Group::identity(group);
                for name in word {
                    let e = self.named(name)?;
                    acc = crate::group::Group::multiply(group, &acc, &e)?;
                }
                Ok((label.clone(), acc))
            }
            LetterSpec::Explicit { label, v, f } => {
                Ok((label.clone(), GroupElement::new(v.clone(), *f)))
            }
        }
    }

    /// Builds a named generating set, symmetrically closed.
    pub fn build_genset(
        &self,
        group: &VirtuallyAbelianGroup,
        name: &str,
    ) -> Result<GenSet<VirtuallyAbelianGroup>, DocumentError> {
        let specs = self
            .gensets
            .get(name)
            .ok_or_else(|| DocumentError::UnknownGenSet(name.to_string()))?;
        let mut base = Vec::with_capacity(specs.len());
        for spec in specs {
            base.push(self.resolve_letter(group, spec)?);
        }
        Ok(GenSet::symmetric_closure(group, base)?)
    }

    pub fn genset_names(&self) -> Vec<&str> {
        self.gensets.keys().map(String::as_str).collect()
    }
}
