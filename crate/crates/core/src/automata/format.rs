//! Canonical on-disk contract format.
//!
//! A contract is a UTF-8 JSON document:
//!
//! ```json
//! {
//!   "rank": 1,
//!   "initial": ["q0"],
//!   "finals": [["q2"]],
//!   "transitions": [
//!     { "source": ["q0"], "label": ["!euro"], "modality": "permitted", "target": ["q1"] }
//!   ],
//!   "types": { "coffee": { "param": "Text", "returns": "Count" } },
//!   "subtypes": [["Sub", "Super"]]
//! }
//! ```
//!
//! Label atoms use `!name`, `?name` and `-`. The state set is implied by
//! the endpoints and never serialized. `types` and `subtypes` are
//! optional. Unknown keys are rejected. Stored documents are canonical:
//! keys sorted, states and transitions in lexicographic order, two-space
//! indentation, trailing newline.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::action::{Action, ActionError, Label};
use super::msca::{Modality, Msca, MscaError, StateVec, Transition};
use super::types::{TypeError, TypeRegistry, TypeTag, TypedSignature};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl From<ActionError> for FormatError {
    fn from(e: ActionError) -> Self {
        FormatError::Validation(e.to_string())
    }
}

impl From<MscaError> for FormatError {
    fn from(e: MscaError) -> Self {
        FormatError::Validation(e.to_string())
    }
}

impl From<TypeError> for FormatError {
    fn from(e: TypeError) -> Self {
        FormatError::Validation(e.to_string())
    }
}

/// Raw document shape shared by contract and requirement files.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct Document {
    pub rank: usize,
    pub initial: Vec<String>,
    pub finals: Vec<Vec<String>>,
    pub transitions: Vec<DocTransition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub types: Option<BTreeMap<String, DocSignature>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subtypes: Option<Vec<(String, String)>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct DocTransition {
    pub source: Vec<String>,
    pub label: Vec<String>,
    pub modality: DocModality,
    pub target: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
pub(crate) enum DocModality {
    Permitted,
    Necessary,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct DocSignature {
    pub param: String,
    pub returns: String,
}

pub(crate) fn parse_document(text: &str) -> Result<Document, FormatError> {
    serde_json::from_str(text).map_err(|e| {
        FormatError::Parse(format!("line {}, column {}: {}", e.line(), e.column(), e))
    })
}

/// Decodes a contract from its textual form.
pub fn load_str(text: &str) -> Result<Msca, FormatError> {
    let doc = parse_document(text)?;
    let to_state = |v: &[String]| StateVec::new(v.to_vec());
    let initial = to_state(&doc.initial);
    let finals: BTreeSet<StateVec> = doc.finals.iter().map(|f| to_state(f)).collect();
    let mut transitions = BTreeSet::new();
    for (idx, t) in doc.transitions.iter().enumerate() {
        let actions = t
            .label
            .iter()
            .map(|s| Action::parse(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| FormatError::Validation(format!("transitions[{idx}].label: {e}")))?;
        let label = Label::new(actions)
            .map_err(|e| FormatError::Validation(format!("transitions[{idx}].label: {e}")))?;
        let modality = match t.modality {
            DocModality::Permitted => Modality::Permitted,
            DocModality::Necessary => Modality::Necessary,
        };
        transitions.insert(Transition::new(to_state(&t.source), label, to_state(&t.target), modality));
    }
    let msca = Msca::new(doc.rank, initial, finals, transitions)?;

    let mut tags: BTreeSet<TypeTag> = BTreeSet::new();
    let mut signatures = BTreeMap::new();
    if let Some(types) = &doc.types {
        for (action, sig) in types {
            let param = TypeTag::new(sig.param.clone());
            let returns = TypeTag::new(sig.returns.clone());
            tags.insert(param.clone());
            tags.insert(returns.clone());
            signatures.insert(action.clone(), TypedSignature::new(action.clone(), param, returns));
        }
    }
    let edges: Vec<(TypeTag, TypeTag)> = doc
        .subtypes
        .iter()
        .flatten()
        .map(|(sub, sup)| (TypeTag::new(sub.clone()), TypeTag::new(sup.clone())))
        .collect();
    let registry = TypeRegistry::new(tags, edges)?;
    Ok(msca.with_types(signatures, registry))
}

/// Encodes a contract in canonical form.
pub fn store_string(a: &Msca) -> String {
    let doc = Document {
        rank: a.rank(),
        initial: a.initial().basics().to_vec(),
        finals: a.finals().iter().map(|f| f.basics().to_vec()).collect(),
        transitions: a
            .transitions()
            .iter()
            .map(|t| DocTransition {
                source: t.source.basics().to_vec(),
                label: t.label.actions().iter().map(|x| x.to_string()).collect(),
                modality: match t.modality {
                    Modality::Permitted => DocModality::Permitted,
                    Modality::Necessary => DocModality::Necessary,
                },
                target: t.target.basics().to_vec(),
            })
            .collect(),
        types: if a.types().is_empty() {
            None
        } else {
            Some(
                a.types()
                    .iter()
                    .map(|(k, sig)| {
                        (
                            k.clone(),
                            DocSignature {
                                param: sig.param.as_str().to_string(),
                                returns: sig.returns.as_str().to_string(),
                            },
                        )
                    })
                    .collect(),
            )
        },
        subtypes: {
            let edges = a.registry().edges();
            if edges.is_empty() {
                None
            } else {
                Some(
                    edges
                        .into_iter()
                        .map(|(s, p)| (s.as_str().to_string(), p.as_str().to_string()))
                        .collect(),
                )
            }
        },
    };
    // Serializing through Value sorts object keys at every level.
    let value = serde_json::to_value(&doc).expect("document serializes");
    let mut out = serde_json::to_string_pretty(&value).expect("value prints");
    out.push('\n');
    out
}

pub fn load_path(path: impl AsRef<Path>) -> Result<Msca, FormatError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_str(&text)
}

pub fn store_path(a: &Msca, path: impl AsRef<Path>) -> Result<(), FormatError> {
    let path = path.as_ref();
    fs::write(path, store_string(a)).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}
