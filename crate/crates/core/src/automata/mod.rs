//! Contract automata: actions, labels, states, modalities, typed
//! signatures, and the canonical file format.

pub mod action;
pub mod format;
pub mod msca;
pub mod types;

pub use action::{Action, ActionError, Label, LabelKind};
pub use format::{load_path, load_str, store_path, store_string, FormatError};
pub use msca::{
    in_agreement, validate, validate_parts, Modality, Msca, MscaError, StateVec, Transition,
    Violation,
};
pub use types::{typed_match, TypeError, TypeRegistry, TypeTag, TypedSignature};
