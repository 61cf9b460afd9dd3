//! Modal service contract automata.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::action::{Label, LabelKind};
use super::types::{TypeRegistry, TypedSignature};
use std::collections::BTreeMap;

/// A vector of basic states; one entry per principal position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateVec(Vec<String>);

impl StateVec {
    pub fn new(basics: Vec<String>) -> Self {
        StateVec(basics)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn basics(&self) -> &[String] {
        &self.0
    }

    pub fn basic(&self, i: usize) -> &str {
        &self.0[i]
    }

    /// Concatenates state vectors, e.g. when composing automata.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a StateVec>) -> StateVec {
        StateVec(parts.into_iter().flat_map(|p| p.0.iter().cloned()).collect())
    }

    /// The sub-vector covering positions `offset..offset + len`.
    pub fn slice(&self, offset: usize, len: usize) -> StateVec {
        StateVec(self.0[offset..offset + len].to_vec())
    }
}

impl fmt::Display for StateVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.join(","))
    }
}

impl From<Vec<&str>> for StateVec {
    fn from(v: Vec<&str>) -> Self {
        StateVec(v.into_iter().map(String::from).collect())
    }
}

/// Whether a transition may be dropped by synthesis (permitted) or must be
/// honoured (necessary).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Modality {
    Permitted,
    Necessary,
}

impl Modality {
    pub fn as_str(&self) -> &'static str {
        match self {
            Modality::Permitted => "permitted",
            Modality::Necessary => "necessary",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub source: StateVec,
    pub label: Label,
    pub target: StateVec,
    pub modality: Modality,
}

impl Transition {
    pub fn new(source: StateVec, label: Label, target: StateVec, modality: Modality) -> Self {
        Transition { source, label, target, modality }
    }

    pub fn is_necessary(&self) -> bool {
        self.modality == Modality::Necessary
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -{}{}-> {}",
            self.source,
            if self.is_necessary() { "□" } else { "" },
            self.label,
            self.target
        )
    }
}

/// A single invariant violation found by [`validate_parts`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    RankMismatch { what: String, expected: usize, found: usize },
    IdleMoved { transition: String, position: usize },
    EmptyBasicState { state: String },
    ZeroRank,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RankMismatch { what, expected, found } => {
                write!(f, "rank mismatch: {what} has length {found}, expected {expected}")
            }
            Violation::IdleMoved { transition, position } => {
                write!(f, "idle position moved: {transition} changes position {position} under an idle action")
            }
            Violation::EmptyBasicState { state } => {
                write!(f, "empty basic-state identifier in {state}")
            }
            Violation::ZeroRank => write!(f, "rank must be positive"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MscaError {
    #[error("invalid automaton: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

/// A modal service contract automaton.
///
/// The state set is derived: every transition endpoint, the initial state
/// and every final state. Request and offer alphabets are likewise derived
/// from the transition labels, which keeps them consistent by
/// construction. Values are immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Msca {
    rank: usize,
    initial: StateVec,
    finals: BTreeSet<StateVec>,
    transitions: BTreeSet<Transition>,
    states: BTreeSet<StateVec>,
    requests: BTreeSet<String>,
    offers: BTreeSet<String>,
    /// Optional per-action typed signatures (empty when untyped).
    types: BTreeMap<String, TypedSignature>,
    /// Subtype relation for the signature type tags.
    registry: TypeRegistry,
}

impl Msca {
    /// Builds and validates an automaton.
    pub fn new(
        rank: usize,
        initial: StateVec,
        finals: BTreeSet<StateVec>,
        transitions: BTreeSet<Transition>,
    ) -> Result<Self, MscaError> {
        let violations = validate_parts(rank, &initial, &finals, &transitions);
        if !violations.is_empty() {
            return Err(MscaError::Invalid(violations));
        }
        let mut states = BTreeSet::new();
        states.insert(initial.clone());
        states.extend(finals.iter().cloned());
        let mut requests = BTreeSet::new();
        let mut offers = BTreeSet::new();
        for t in &transitions {
            states.insert(t.source.clone());
            states.insert(t.target.clone());
            for a in t.label.actions() {
                match a {
                    super::action::Action::Request(n) => {
                        requests.insert(n.clone());
                    }
                    super::action::Action::Offer(n) => {
                        offers.insert(n.clone());
                    }
                    super::action::Action::Idle => {}
                }
            }
        }
        Ok(Msca {
            rank,
            initial,
            finals,
            transitions,
            states,
            requests,
            offers,
            types: BTreeMap::new(),
            registry: TypeRegistry::default(),
        })
    }

    /// Attaches typed signatures and a subtype registry.
    pub fn with_types(
        mut self,
        types: BTreeMap<String, TypedSignature>,
        registry: TypeRegistry,
    ) -> Self {
        self.types = types;
        self.registry = registry;
        self
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn initial(&self) -> &StateVec {
        &self.initial
    }

    pub fn finals(&self) -> &BTreeSet<StateVec> {
        &self.finals
    }

    pub fn is_final(&self, s: &StateVec) -> bool {
        self.finals.contains(s)
    }

    pub fn transitions(&self) -> &BTreeSet<Transition> {
        &self.transitions
    }

    pub fn states(&self) -> &BTreeSet<StateVec> {
        &self.states
    }

    pub fn requests(&self) -> &BTreeSet<String> {
        &self.requests
    }

    pub fn offers(&self) -> &BTreeSet<String> {
        &self.offers
    }

    pub fn types(&self) -> &BTreeMap<String, TypedSignature> {
        &self.types
    }

    pub fn registry(&self) -> &TypeRegistry {
        &self.registry
    }

    pub fn signature(&self, action: &str) -> Option<&TypedSignature> {
        self.types.get(action)
    }

    /// Outgoing transitions of `s` in canonical order (label rendering,
    /// then target).
    pub fn forward_star(&self, s: &StateVec) -> Vec<&Transition> {
        let mut fws: Vec<&Transition> =
            self.transitions.iter().filter(|t| &t.source == s).collect();
        fws.sort_by(|a, b| {
            (&a.label, &a.target, a.modality).cmp(&(&b.label, &b.target, b.modality))
        });
        fws
    }
}

/// Checks every Def.-1 style invariant over raw parts and reports all
/// violations rather than stopping at the first.
pub fn validate_parts(
    rank: usize,
    initial: &StateVec,
    finals: &BTreeSet<StateVec>,
    transitions: &BTreeSet<Transition>,
) -> Vec<Violation> {
    let mut out = Vec::new();
    if rank == 0 {
        out.push(Violation::ZeroRank);
        return out;
    }
    let check_vec = |out: &mut Vec<Violation>, what: String, v: &StateVec| {
        if v.rank() != rank {
            out.push(Violation::RankMismatch { what: what.clone(), expected: rank, found: v.rank() });
        }
        if v.basics().iter().any(|b| b.is_empty()) {
            out.push(Violation::EmptyBasicState { state: what });
        }
    };
    check_vec(&mut out, format!("initial state {initial}"), initial);
    for f in finals {
        check_vec(&mut out, format!("final state {f}"), f);
    }
    for t in transitions {
        check_vec(&mut out, format!("source of {t}"), &t.source);
        check_vec(&mut out, format!("target of {t}"), &t.target);
        if t.label.rank() != rank {
            out.push(Violation::RankMismatch {
                what: format!("label of {t}"),
                expected: rank,
                found: t.label.rank(),
            });
            continue;
        }
        if t.source.rank() != rank || t.target.rank() != rank {
            continue;
        }
        for (i, a) in t.label.actions().iter().enumerate() {
            if a.is_idle() && t.source.basic(i) != t.target.basic(i) {
                out.push(Violation::IdleMoved { transition: t.to_string(), position: i });
            }
        }
    }
    out
}

/// Re-checks an already constructed automaton; `Msca::new` guarantees this
/// is empty, so this mostly serves loaders and tests.
pub fn validate(a: &Msca) -> Vec<Violation> {
    validate_parts(a.rank, &a.initial, &a.finals, &a.transitions)
}

/// True when the label is an offer or a match, i.e. admissible under the
/// agreement property.
pub fn in_agreement(label: &Label) -> bool {
    matches!(label.kind(), LabelKind::Offer | LabelKind::Match)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::action::Action;

    fn sv(parts: Vec<&str>) -> StateVec {
        StateVec::from(parts)
    }

    fn label(atoms: Vec<&str>) -> Label {
        Label::new(atoms.into_iter().map(|s| Action::parse(s).unwrap()).collect()).unwrap()
    }

    #[test]
    fn single_state_automaton_is_valid() {
        let a = Msca::new(
            1,
            sv(vec!["q0"]),
            BTreeSet::from([sv(vec!["q0"])]),
            BTreeSet::new(),
        )
        .unwrap();
        assert!(validate(&a).is_empty());
        assert_eq!(a.states().len(), 1);
    }

    #[test]
    fn idle_position_must_not_move() {
        let t = Transition::new(
            sv(vec!["q0", "p0"]),
            label(vec!["-", "!a"]),
            sv(vec!["q1", "p1"]),
            Modality::Permitted,
        );
        let violations = validate_parts(
            2,
            &sv(vec!["q0", "p0"]),
            &BTreeSet::new(),
            &BTreeSet::from([t]),
        );
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::IdleMoved { position: 0, .. })));
    }

    #[test]
    fn label_rank_mismatch_reported() {
        let t = Transition::new(
            sv(vec!["q0"]),
            label(vec!["!a", "-"]),
            sv(vec!["q1"]),
            Modality::Permitted,
        );
        let violations =
            validate_parts(1, &sv(vec!["q0"]), &BTreeSet::new(), &BTreeSet::from([t]));
        assert!(violations.iter().any(|v| matches!(v, Violation::RankMismatch { .. })));
    }

    #[test]
    fn alphabets_are_derived_from_labels() {
        let t1 = Transition::new(
            sv(vec!["q0"]),
            label(vec!["!euro"]),
            sv(vec!["q1"]),
            Modality::Permitted,
        );
        let t2 = Transition::new(
            sv(vec!["q1"]),
            label(vec!["?coffee"]),
            sv(vec!["q2"]),
            Modality::Necessary,
        );
        let a = Msca::new(
            1,
            sv(vec!["q0"]),
            BTreeSet::from([sv(vec!["q2"])]),
            BTreeSet::from([t1, t2]),
        )
        .unwrap();
        assert_eq!(a.offers().iter().collect::<Vec<_>>(), vec!["euro"]);
        assert_eq!(a.requests().iter().collect::<Vec<_>>(), vec!["coffee"]);
        assert_eq!(a.states().len(), 3);
    }

    #[test]
    fn forward_star_orders_canonically() {
        let t_euro = Transition::new(
            sv(vec!["q0"]),
            label(vec!["!euro"]),
            sv(vec!["q1"]),
            Modality::Permitted,
        );
        let t_dollar = Transition::new(
            sv(vec!["q0"]),
            label(vec!["!dollar"]),
            sv(vec!["q2"]),
            Modality::Permitted,
        );
        let a = Msca::new(
            1,
            sv(vec!["q0"]),
            BTreeSet::from([sv(vec!["q1"])]),
            BTreeSet::from([t_euro, t_dollar]),
        )
        .unwrap();
        let fws = a.forward_star(&sv(vec!["q0"]));
        assert_eq!(fws[0].label.render(), "[!dollar]");
        assert_eq!(fws[1].label.render(), "[!euro]");
    }
}
