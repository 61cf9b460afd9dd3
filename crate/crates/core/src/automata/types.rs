//! Typed action signatures.
//!
//! Contracts may annotate actions with parameter/return type tags plus a
//! subtype relation. Matching then also checks that every payload a party
//! produces is assignable to the type its consumer declares, so no
//! ill-typed value can ever reach a handler.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A nominal type name, e.g. `Text` or `CaDocument`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeTag(String);

impl TypeTag {
    pub fn new(name: impl Into<String>) -> Self {
        TypeTag(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TypeTag {
    fn from(s: &str) -> Self {
        TypeTag(s.to_string())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("unknown type tag {0}")]
    UnknownType(TypeTag),
    #[error("subtype relation contains a cycle through {0}")]
    CyclicSubtyping(TypeTag),
}

/// A finite, acyclic is-subtype-of relation over type tags, with a
/// reflexive-transitive `assignable` query.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeRegistry {
    tags: BTreeSet<TypeTag>,
    /// Direct edges sub -> supers.
    supers: BTreeMap<TypeTag, BTreeSet<TypeTag>>,
}

impl TypeRegistry {
    /// Builds a registry from explicit tags and `(sub, super)` edges.
    pub fn new(
        tags: impl IntoIterator<Item = TypeTag>,
        edges: impl IntoIterator<Item = (TypeTag, TypeTag)>,
    ) -> Result<Self, TypeError> {
        let mut reg = TypeRegistry::default();
        reg.tags.extend(tags);
        for (sub, sup) in edges {
            reg.tags.insert(sub.clone());
            reg.tags.insert(sup.clone());
            reg.supers.entry(sub).or_default().insert(sup);
        }
        reg.check_acyclic()?;
        Ok(reg)
    }

    pub fn register(&mut self, tag: TypeTag) {
        self.tags.insert(tag);
    }

    pub fn contains(&self, tag: &TypeTag) -> bool {
        self.tags.contains(tag)
    }

    pub fn tags(&self) -> &BTreeSet<TypeTag> {
        &self.tags
    }

    /// Direct subtype edges in canonical order.
    pub fn edges(&self) -> Vec<(TypeTag, TypeTag)> {
        self.supers
            .iter()
            .flat_map(|(sub, sups)| sups.iter().map(move |s| (sub.clone(), s.clone())))
            .collect()
    }

    fn check_acyclic(&self) -> Result<(), TypeError> {
        // Kahn-style elimination; leftover nodes with edges form a cycle.
        let mut out_deg: BTreeMap<&TypeTag, usize> = BTreeMap::new();
        let mut rev: BTreeMap<&TypeTag, Vec<&TypeTag>> = BTreeMap::new();
        for (sub, sups) in &self.supers {
            if sups.contains(sub) {
                return Err(TypeError::CyclicSubtyping(sub.clone()));
            }
            out_deg.insert(sub, sups.len());
            for sup in sups {
                rev.entry(sup).or_default().push(sub);
            }
        }
        let mut ready: Vec<&TypeTag> = self
            .tags
            .iter()
            .filter(|t| out_deg.get(t).copied().unwrap_or(0) == 0)
            .collect();
        let mut seen = 0usize;
        while let Some(t) = ready.pop() {
            seen += 1;
            for pred in rev.get(t).into_iter().flatten() {
                let d = out_deg.get_mut(pred).expect("pred has out edges");
                *d -= 1;
                if *d == 0 {
                    ready.push(pred);
                }
            }
        }
        if seen != self.tags.len() {
            let culprit = self
                .tags
                .iter()
                .find(|t| out_deg.get(t).copied().unwrap_or(0) > 0)
                .expect("cycle member exists");
            return Err(TypeError::CyclicSubtyping(culprit.clone()));
        }
        Ok(())
    }

    /// Reflexive-transitive subtype query: can a value of type `from` be
    /// used where `to` is expected?
    pub fn assignable(&self, from: &TypeTag, to: &TypeTag) -> Result<bool, TypeError> {
        if !self.contains(from) {
            return Err(TypeError::UnknownType(from.clone()));
        }
        if !self.contains(to) {
            return Err(TypeError::UnknownType(to.clone()));
        }
        if from == to {
            return Ok(true);
        }
        let mut stack = vec![from];
        let mut visited = BTreeSet::new();
        while let Some(t) = stack.pop() {
            if !visited.insert(t) {
                continue;
            }
            for sup in self.supers.get(t).into_iter().flatten() {
                if sup == to {
                    return Ok(true);
                }
                stack.push(sup);
            }
        }
        Ok(false)
    }
}

/// The typed interface of one action within a contract.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TypedSignature {
    pub action: String,
    /// Type of the value this party consumes when its handler is invoked
    /// with an argument.
    pub param: TypeTag,
    /// Type of the value this party produces.
    pub returns: TypeTag,
}

impl TypedSignature {
    pub fn new(action: impl Into<String>, param: TypeTag, returns: TypeTag) -> Self {
        TypedSignature { action: action.into(), param, returns }
    }
}

/// Type-aware request/offer matching.
///
/// Payloads flow producer-to-consumer twice per match: the requester's
/// generated value goes to the offerer's parameter, and the offerer's
/// return goes back to the requester's parameter. Both hops must be
/// assignable under safe substitution (the producer's type is a subtype of
/// the consumer's declared parameter type), which rules out any cast
/// failure at invocation time.
pub fn typed_match(
    req: &TypedSignature,
    off: &TypedSignature,
    reg: &TypeRegistry,
) -> Result<bool, TypeError> {
    Ok(reg.assignable(&req.returns, &off.param)? && reg.assignable(&off.returns, &req.param)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tag(s: &str) -> TypeTag {
        TypeTag::from(s)
    }

    #[test]
    fn reflexive_only_registry_matches_equal_tags() {
        let reg = TypeRegistry::new([tag("Text"), tag("Count")], []).unwrap();
        let req = TypedSignature::new("coffee", tag("Text"), tag("Count"));
        let off = TypedSignature::new("coffee", tag("Count"), tag("Text"));
        assert!(typed_match(&req, &off, &reg).unwrap());
    }

    #[test]
    fn unrelated_tags_do_not_match() {
        let reg = TypeRegistry::new([tag("A"), tag("B")], []).unwrap();
        let req = TypedSignature::new("x", tag("A"), tag("A"));
        let off = TypedSignature::new("x", tag("B"), tag("B"));
        assert!(!typed_match(&req, &off, &reg).unwrap());
    }

    #[test]
    fn subtype_edge_permits_widening() {
        let reg = TypeRegistry::new([], [(tag("Sub"), tag("Super"))]).unwrap();
        let req = TypedSignature::new("x", tag("Super"), tag("Sub"));
        let off = TypedSignature::new("x", tag("Super"), tag("Super"));
        assert!(typed_match(&req, &off, &reg).unwrap());
        // Narrowing direction must fail.
        let req2 = TypedSignature::new("x", tag("Sub"), tag("Super"));
        let off2 = TypedSignature::new("x", tag("Sub"), tag("Sub"));
        assert!(!typed_match(&req2, &off2, &reg).unwrap());
    }

    #[test]
    fn unknown_tag_is_an_error() {
        let reg = TypeRegistry::new([tag("A")], []).unwrap();
        let req = TypedSignature::new("x", tag("A"), tag("Mystery"));
        let off = TypedSignature::new("x", tag("A"), tag("A"));
        assert_eq!(
            typed_match(&req, &off, &reg).unwrap_err(),
            TypeError::UnknownType(tag("Mystery"))
        );
    }

    #[test]
    fn cycles_rejected() {
        assert!(matches!(
            TypeRegistry::new([], [(tag("A"), tag("B")), (tag("B"), tag("A"))]),
            Err(TypeError::CyclicSubtyping(_))
        ));
        assert!(matches!(
            TypeRegistry::new([], [(tag("A"), tag("A"))]),
            Err(TypeError::CyclicSubtyping(_))
        ));
    }

    #[test]
    fn assignable_is_transitive() {
        let reg =
            TypeRegistry::new([], [(tag("A"), tag("B")), (tag("B"), tag("C"))]).unwrap();
        assert!(reg.assignable(&tag("A"), &tag("C")).unwrap());
        assert!(!reg.assignable(&tag("C"), &tag("A")).unwrap());
    }
}
