//! Composition of contract automata.
//!
//! The n-ary composition interleaves the operands' transitions, except
//! that whenever one operand can fire a request and another the
//! corresponding offer from the same composite state, the match is forced:
//! the match transition is generated and the two unilateral interleavings
//! of those transitions are excluded. A match involving a necessary
//! operand transition is itself necessary. State-space generation is
//! breadth-first from the composite initial state and can be cut off at a
//! bound, then later extended without re-expanding interior states.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::num::NonZeroUsize;

use thiserror::Error;

use crate::automata::action::{Action, Label, LabelKind};
use crate::automata::msca::{Modality, Msca, MscaError, StateVec, Transition};

/// Maximum composite rank accepted unless overridden.
pub const DEFAULT_MAX_RANK: usize = 64;

/// BFS depth limit for state-space generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompositionBound {
    Bounded(NonZeroUsize),
    Unbounded,
}

impl CompositionBound {
    pub fn bounded(depth: usize) -> Option<Self> {
        NonZeroUsize::new(depth).map(CompositionBound::Bounded)
    }

    fn expands(self, depth: usize) -> bool {
        match self {
            CompositionBound::Bounded(d) => depth < d.get(),
            CompositionBound::Unbounded => true,
        }
    }

    fn strictly_wider_than(self, other: Self) -> bool {
        match (self, other) {
            (CompositionBound::Unbounded, CompositionBound::Unbounded) => false,
            (CompositionBound::Unbounded, CompositionBound::Bounded(_)) => true,
            (CompositionBound::Bounded(_), CompositionBound::Unbounded) => false,
            (CompositionBound::Bounded(a), CompositionBound::Bounded(b)) => a > b,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompositionError {
    #[error("composition requires at least two operands, got {0}")]
    EmptyOperands(usize),
    #[error("composite rank {total} exceeds the maximum {max}")]
    RankOverflow { total: usize, max: usize },
    #[error("new bound must strictly exceed the previous bound")]
    BoundNotMonotone,
    #[error(transparent)]
    Invalid(#[from] MscaError),
}

/// Exploration bookkeeping, observable by tests and by the composition
/// service example.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExploreStats {
    /// States whose forward star was computed during this call.
    pub expanded_states: u64,
    /// Composite transitions generated during this call.
    pub generated_transitions: u64,
}

#[derive(Debug, Clone)]
pub struct CompositionOutcome {
    pub automaton: Msca,
    pub stats: ExploreStats,
}

struct Operands<'a> {
    list: &'a [Msca],
    offsets: Vec<usize>,
    total_rank: usize,
    /// Per operand: local source state -> outgoing transitions.
    index: Vec<BTreeMap<&'a StateVec, Vec<&'a Transition>>>,
}

impl<'a> Operands<'a> {
    fn new(list: &'a [Msca], max_rank: usize) -> Result<Self, CompositionError> {
        if list.len() < 2 {
            return Err(CompositionError::EmptyOperands(list.len()));
        }
        let mut offsets = Vec::with_capacity(list.len());
        let mut total_rank = 0usize;
        for op in list {
            offsets.push(total_rank);
            total_rank += op.rank();
        }
        if total_rank > max_rank {
            return Err(CompositionError::RankOverflow { total: total_rank, max: max_rank });
        }
        let index = list
            .iter()
            .map(|op| {
                let mut m: BTreeMap<&StateVec, Vec<&Transition>> = BTreeMap::new();
                for t in op.transitions() {
                    m.entry(&t.source).or_default().push(t);
                }
                m
            })
            .collect();
        Ok(Operands { list, offsets, total_rank, index })
    }

    fn initial(&self) -> StateVec {
        StateVec::concat(self.list.iter().map(|op| op.initial()))
    }

    fn local(&self, state: &StateVec, k: usize) -> StateVec {
        state.slice(self.offsets[k], self.list[k].rank())
    }

    fn is_final(&self, state: &StateVec) -> bool {
        self.list
            .iter()
            .enumerate()
            .all(|(k, op)| op.finals().contains(&self.local(state, k)))
    }

    /// Transitions enabled per operand from the composite state.
    fn enabled(&self, state: &StateVec) -> Vec<(usize, &'a Transition)> {
        let mut out = Vec::new();
        for k in 0..self.list.len() {
            let local = self.local(state, k);
            if let Some(ts) = self.index[k].get(&local) {
                out.extend(ts.iter().map(|t| (k, *t)));
            }
        }
        out
    }

    /// Overlays the actions of operand transitions onto an idle vector and
    /// rewrites the moved slices of the source state.
    fn composite(
        &self,
        state: &StateVec,
        parts: &[(usize, &Transition)],
        modality: Modality,
    ) -> Transition {
        let mut actions = vec![Action::Idle; self.total_rank];
        let mut basics = state.basics().to_vec();
        for (k, t) in parts {
            let off = self.offsets[*k];
            for (i, a) in t.label.actions().iter().enumerate() {
                actions[off + i] = a.clone();
            }
            for (i, b) in t.target.basics().iter().enumerate() {
                basics[off + i] = b.clone();
            }
        }
        let label = Label::new(actions).expect("composite label shape holds by construction");
        Transition::new(state.clone(), label, StateVec::new(basics), modality)
    }
}

fn match_modality(a: &Transition, b: &Transition) -> Modality {
    if a.is_necessary() || b.is_necessary() {
        Modality::Necessary
    } else {
        Modality::Permitted
    }
}

/// Expands one composite state: forced matches first, then interleavings
/// of transitions that took part in no match.
fn expand_state(ops: &Operands<'_>, state: &StateVec) -> Vec<Transition> {
    let enabled = ops.enabled(state);
    let mut consumed = vec![false; enabled.len()];
    let mut out = Vec::new();
    for (i, (ki, ti)) in enabled.iter().enumerate() {
        if ti.label.kind() != LabelKind::Request {
            continue;
        }
        let name = ti.label.action_name();
        for (j, (kj, tj)) in enabled.iter().enumerate() {
            if ki == kj || tj.label.kind() != LabelKind::Offer || tj.label.action_name() != name {
                continue;
            }
            consumed[i] = true;
            consumed[j] = true;
            out.push(ops.composite(state, &[(*ki, ti), (*kj, tj)], match_modality(ti, tj)));
        }
    }
    for (i, (k, t)) in enabled.iter().enumerate() {
        if !consumed[i] {
            out.push(ops.composite(state, &[(*k, t)], t.modality));
        }
    }
    out
}

fn bfs(
    ops: &Operands<'_>,
    bound: CompositionBound,
    mut depths: BTreeMap<StateVec, usize>,
    frontier: Vec<StateVec>,
    mut transitions: BTreeSet<Transition>,
    stats: &mut ExploreStats,
) -> (BTreeMap<StateVec, usize>, BTreeSet<Transition>) {
    let mut queue: VecDeque<StateVec> = frontier.into();
    while let Some(state) = queue.pop_front() {
        let depth = depths[&state];
        if !bound.expands(depth) {
            continue;
        }
        stats.expanded_states += 1;
        for t in expand_state(ops, &state) {
            stats.generated_transitions += 1;
            if !depths.contains_key(&t.target) {
                depths.insert(t.target.clone(), depth + 1);
                queue.push_back(t.target.clone());
            }
            transitions.insert(t);
        }
    }
    (depths, transitions)
}

fn assemble(
    ops: &Operands<'_>,
    depths: &BTreeMap<StateVec, usize>,
    transitions: BTreeSet<Transition>,
) -> Result<Msca, CompositionError> {
    let finals: BTreeSet<StateVec> =
        depths.keys().filter(|s| ops.is_final(s)).cloned().collect();
    Ok(Msca::new(ops.total_rank, ops.initial(), finals, transitions)?)
}

pub fn compose_full(
    operands: &[Msca],
    bound: CompositionBound,
    max_rank: usize,
) -> Result<CompositionOutcome, CompositionError> {
    let ops = Operands::new(operands, max_rank)?;
    let initial = ops.initial();
    let mut stats = ExploreStats::default();
    let depths = BTreeMap::from([(initial.clone(), 0usize)]);
    let (depths, transitions) =
        bfs(&ops, bound, depths, vec![initial], BTreeSet::new(), &mut stats);
    Ok(CompositionOutcome { automaton: assemble(&ops, &depths, transitions)?, stats })
}

pub fn compose(operands: &[Msca], bound: CompositionBound) -> Result<Msca, CompositionError> {
    Ok(compose_full(operands, bound, DEFAULT_MAX_RANK)?.automaton)
}

/// Widens the bound of a previous composition of the same operands. The
/// interior of `prev` is reused; only frontier states (those at the old
/// depth limit) and beyond are expanded, which [`ExploreStats`] makes
/// visible.
pub fn extend_bound_full(
    prev: &Msca,
    operands: &[Msca],
    old: CompositionBound,
    new: CompositionBound,
    max_rank: usize,
) -> Result<CompositionOutcome, CompositionError> {
    if !new.strictly_wider_than(old) {
        return Err(CompositionError::BoundNotMonotone);
    }
    let ops = Operands::new(operands, max_rank)?;
    // Recover BFS depths of the already generated states without
    // re-expanding any operand machinery.
    let mut adj: BTreeMap<&StateVec, Vec<&StateVec>> = BTreeMap::new();
    for t in prev.transitions() {
        adj.entry(&t.source).or_default().push(&t.target);
    }
    let mut depths: BTreeMap<StateVec, usize> = BTreeMap::new();
    depths.insert(prev.initial().clone(), 0);
    let mut queue = VecDeque::from([prev.initial().clone()]);
    while let Some(s) = queue.pop_front() {
        let d = depths[&s];
        for next in adj.get(&s).into_iter().flatten() {
            if !depths.contains_key(*next) {
                depths.insert((*next).clone(), d + 1);
                queue.push_back((*next).clone());
            }
        }
    }
    let frontier: Vec<StateVec> = depths
        .iter()
        .filter(|(_, d)| !old.expands(**d))
        .map(|(s, _)| s.clone())
        .collect();
    let mut stats = ExploreStats::default();
    let (depths, transitions) = bfs(
        &ops,
        new,
        depths,
        frontier,
        prev.transitions().clone(),
        &mut stats,
    );
    Ok(CompositionOutcome { automaton: assemble(&ops, &depths, transitions)?, stats })
}

pub fn extend_bound(
    prev: &Msca,
    operands: &[Msca],
    old: CompositionBound,
    new: CompositionBound,
) -> Result<Msca, CompositionError> {
    Ok(extend_bound_full(prev, operands, old, new, DEFAULT_MAX_RANK)?.automaton)
}
