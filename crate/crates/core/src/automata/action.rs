//! Actions and labels: the alphabet of contract automata.
//!
//! An action is a request `?name`, an offer `!name`, or the idle
//! placeholder `-`. A label is a rank-length vector of actions restricted
//! to one of three shapes: a single request, a single offer, or a
//! request/offer pair on the same name (a match).

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// Checks the identifier grammar used for action names:
/// `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_valid_action_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum ActionError {
    #[error("invalid action name {0:?}: expected [A-Za-z_][A-Za-z0-9_]*")]
    InvalidName(String),
    #[error("malformed label {0}")]
    MalformedLabel(String),
}

/// An atomic contract action.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Action {
    /// `?name`: the party asks a partner to perform `name`.
    Request(String),
    /// `!name`: the party performs `name` for a partner.
    Offer(String),
    /// `-`: the party does not take part in the step.
    Idle,
}

impl Action {
    pub fn request(name: impl Into<String>) -> Result<Self, ActionError> {
        let name = name.into();
        if !is_valid_action_name(&name) {
            return Err(ActionError::InvalidName(name));
        }
        Ok(Action::Request(name))
    }

    pub fn offer(name: impl Into<String>) -> Result<Self, ActionError> {
        let name = name.into();
        if !is_valid_action_name(&name) {
            return Err(ActionError::InvalidName(name));
        }
        Ok(Action::Offer(name))
    }

    pub fn is_idle(&self) -> bool {
        matches!(self, Action::Idle)
    }

    pub fn is_request(&self) -> bool {
        matches!(self, Action::Request(_))
    }

    pub fn is_offer(&self) -> bool {
        matches!(self, Action::Offer(_))
    }

    /// The action name, absent for idle.
    pub fn name(&self) -> Option<&str> {
        match self {
            Action::Request(n) | Action::Offer(n) => Some(n),
            Action::Idle => None,
        }
    }

    /// Two actions correspond iff one requests and the other offers the
    /// same name.
    pub fn corresponds(&self, other: &Action) -> bool {
        match (self, other) {
            (Action::Request(a), Action::Offer(b)) | (Action::Offer(a), Action::Request(b)) => {
                a == b
            }
            _ => false,
        }
    }

    /// Parses the file-format rendering: `!name`, `?name` or `-`.
    pub fn parse(s: &str) -> Result<Self, ActionError> {
        if s == "-" {
            return Ok(Action::Idle);
        }
        match s.split_at_checked(1) {
            Some(("!", name)) => Action::offer(name),
            Some(("?", name)) => Action::request(name),
            _ => Err(ActionError::MalformedLabel(format!(
                "unrecognized action atom {s:?}"
            ))),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Request(n) => write!(f, "?{n}"),
            Action::Offer(n) => write!(f, "!{n}"),
            Action::Idle => write!(f, "-"),
        }
    }
}

// Ordering matches the rendered form byte-wise ('!' < '-' < '?') so that
// sorting structurally and sorting rendered strings agree.
impl Ord for Action {
    fn cmp(&self, other: &Self) -> Ordering {
        use Action::*;
        match (self, other) {
            (Offer(a), Offer(b)) => a.cmp(b),
            (Request(a), Request(b)) => a.cmp(b),
            (Idle, Idle) => Ordering::Equal,
            (Offer(_), _) => Ordering::Less,
            (_, Offer(_)) => Ordering::Greater,
            (Idle, _) => Ordering::Less,
            (_, Idle) => Ordering::Greater,
        }
    }
}

impl PartialOrd for Action {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shape classifier for labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LabelKind {
    Request,
    Offer,
    Match,
}

/// A rank-length action vector in request, offer, or match shape.
///
/// Construction rejects every other combination, so a `Label` value is
/// well-shaped by definition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    actions: Vec<Action>,
}

impl Label {
    /// Builds a label, classifying its shape.
    pub fn new(actions: Vec<Action>) -> Result<Self, ActionError> {
        if actions.is_empty() {
            return Err(ActionError::MalformedLabel("empty action vector".into()));
        }
        let requests: Vec<&Action> = actions.iter().filter(|a| a.is_request()).collect();
        let offers: Vec<&Action> = actions.iter().filter(|a| a.is_offer()).collect();
        match (requests.len(), offers.len()) {
            (1, 0) | (0, 1) => {}
            (1, 1) => {
                if requests[0].name() != offers[0].name() {
                    return Err(ActionError::MalformedLabel(format!(
                        "request {} and offer {} do not correspond",
                        requests[0], offers[0]
                    )));
                }
            }
            (r, o) => {
                return Err(ActionError::MalformedLabel(format!(
                    "{r} requests and {o} offers; expected a single request, a single offer, or one matching pair"
                )));
            }
        }
        Ok(Label { actions })
    }

    pub fn rank(&self) -> usize {
        self.actions.len()
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn kind(&self) -> LabelKind {
        let requests = self.actions.iter().filter(|a| a.is_request()).count();
        let offers = self.actions.iter().filter(|a| a.is_offer()).count();
        match (requests, offers) {
            (1, 0) => LabelKind::Request,
            (0, 1) => LabelKind::Offer,
            (1, 1) => LabelKind::Match,
            _ => unreachable!("label shape enforced at construction"),
        }
    }

    pub fn is_request(&self) -> bool {
        self.kind() == LabelKind::Request
    }

    pub fn is_offer(&self) -> bool {
        self.kind() == LabelKind::Offer
    }

    pub fn is_match(&self) -> bool {
        self.kind() == LabelKind::Match
    }

    /// The action name carried by the label (every shape has exactly one).
    pub fn action_name(&self) -> &str {
        self.actions
            .iter()
            .find_map(|a| a.name())
            .expect("label carries at least one named action")
    }

    /// Index of the requesting position, if any.
    pub fn requester(&self) -> Option<usize> {
        self.actions.iter().position(Action::is_request)
    }

    /// Index of the offering position, if any.
    pub fn offerer(&self) -> Option<usize> {
        self.actions.iter().position(Action::is_offer)
    }

    /// Canonical rendering, e.g. `[!euro,?euro]`.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.actions.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}
