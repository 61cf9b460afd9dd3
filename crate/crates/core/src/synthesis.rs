//! Orchestration synthesis.
//!
//! The synthesis is a fixed-point refinement: each iteration drops
//! transitions selected by a pruning predicate and grows a set of
//! forbidden states selected by a forbidden predicate (evaluated over the
//! necessary transitions of the original automaton) together with the
//! dangling states of the refined automaton. The orchestration
//! instantiation prunes requests and transitions touching forbidden
//! states, and forbids sources of necessary requests that no surviving
//! match can fulfil. Requirements are enforced by synthesising over the
//! product of the automaton with a deterministic requirement automaton.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::automata::action::Label;
use crate::automata::format::{parse_document, Document, FormatError};
use crate::automata::msca::{Modality, Msca, StateVec, Transition};

/// States that are unreachable from the initial state or cannot reach any
/// final state.
pub fn dangling(a: &Msca) -> BTreeSet<StateVec> {
    let graph = Graph::new(a.states(), a.transitions().iter(), a.initial(), a.finals());
    graph.dangling()
}

struct Graph<'a> {
    states: &'a BTreeSet<StateVec>,
    forward: BTreeMap<&'a StateVec, Vec<&'a StateVec>>,
    backward: BTreeMap<&'a StateVec, Vec<&'a StateVec>>,
    initial: &'a StateVec,
    finals: &'a BTreeSet<StateVec>,
}

impl<'a> Graph<'a> {
    fn new(
        states: &'a BTreeSet<StateVec>,
        transitions: impl Iterator<Item = &'a Transition>,
        initial: &'a StateVec,
        finals: &'a BTreeSet<StateVec>,
    ) -> Self {
        let mut forward: BTreeMap<&StateVec, Vec<&StateVec>> = BTreeMap::new();
        let mut backward: BTreeMap<&StateVec, Vec<&StateVec>> = BTreeMap::new();
        for t in transitions {
            forward.entry(&t.source).or_default().push(&t.target);
            backward.entry(&t.target).or_default().push(&t.source);
        }
        Graph { states, forward, backward, initial, finals }
    }

    fn sweep(
        &self,
        seeds: impl Iterator<Item = &'a StateVec>,
        edges: &BTreeMap<&'a StateVec, Vec<&'a StateVec>>,
    ) -> BTreeSet<&'a StateVec> {
        let mut seen: BTreeSet<&StateVec> = seeds.collect();
        let mut queue: VecDeque<&StateVec> = seen.iter().copied().collect();
        while let Some(s) = queue.pop_front() {
            for next in edges.get(s).into_iter().flatten() {
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        seen
    }

    fn dangling(&self) -> BTreeSet<StateVec> {
        let reachable = self.sweep(std::iter::once(self.initial), &self.forward);
        let coreachable = self.sweep(self.finals.iter(), &self.backward);
        self.states
            .iter()
            .filter(|s| !reachable.contains(*s) || !coreachable.contains(*s))
            .cloned()
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Internal engine over states that optionally track a requirement state.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct SynthState {
    vec: StateVec,
    req: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct SynthTransition {
    source: SynthState,
    label: Label,
    target: SynthState,
    modality: Modality,
}

impl SynthTransition {
    fn is_necessary(&self) -> bool {
        self.modality == Modality::Necessary
    }
}

struct SynthAut {
    rank: usize,
    states: BTreeSet<SynthState>,
    initial: SynthState,
    finals: BTreeSet<SynthState>,
    transitions: BTreeSet<SynthTransition>,
}

impl SynthAut {
    fn from_msca(a: &Msca) -> Self {
        let lift = |s: &StateVec| SynthState { vec: s.clone(), req: None };
        SynthAut {
            rank: a.rank(),
            states: a.states().iter().map(lift).collect(),
            initial: lift(a.initial()),
            finals: a.finals().iter().map(lift).collect(),
            transitions: a
                .transitions()
                .iter()
                .map(|t| SynthTransition {
                    source: lift(&t.source),
                    label: t.label.clone(),
                    target: lift(&t.target),
                    modality: t.modality,
                })
                .collect(),
        }
    }

    fn dangling_of(&self, transitions: &BTreeSet<SynthTransition>) -> BTreeSet<SynthState> {
        let mut forward: BTreeMap<&SynthState, Vec<&SynthState>> = BTreeMap::new();
        let mut backward: BTreeMap<&SynthState, Vec<&SynthState>> = BTreeMap::new();
        for t in transitions {
            forward.entry(&t.source).or_default().push(&t.target);
            backward.entry(&t.target).or_default().push(&t.source);
        }
        let sweep = |seeds: Vec<&SynthState>, edges: &BTreeMap<&SynthState, Vec<&SynthState>>| {
            let mut seen: BTreeSet<&SynthState> = seeds.into_iter().collect();
            let mut queue: VecDeque<&SynthState> = seen.iter().copied().collect();
            while let Some(s) = queue.pop_front() {
                for next in edges.get(s).into_iter().flatten() {
                    if seen.insert(next) {
                        queue.push_back(next);
                    }
                }
            }
            seen.into_iter().cloned().collect::<BTreeSet<_>>()
        };
        let reachable = sweep(vec![&self.initial], &forward);
        let coreachable = sweep(self.finals.iter().collect(), &backward);
        self.states
            .iter()
            .filter(|s| !reachable.contains(*s) || !coreachable.contains(*s))
            .cloned()
            .collect()
    }
}

/// Per-iteration context handed to the engine predicates. `k` and `r` are
/// the previous iteration's refinement and forbidden set; `k_dangling` is
/// the dangling set of `k`.
struct IterCtx<'a> {
    k: &'a BTreeSet<SynthTransition>,
    r: &'a BTreeSet<SynthState>,
    k_dangling: &'a BTreeSet<SynthState>,
}

/// Least fixed point of the refinement step. Both predicate arguments see
/// the previous iteration's state; the forbidden predicate ranges over the
/// necessary transitions of the original automaton.
fn fixed_point(
    aut: &SynthAut,
    prune: impl Fn(&SynthTransition, &IterCtx<'_>) -> bool,
    forbid: impl Fn(&SynthTransition, &IterCtx<'_>) -> bool,
) -> (BTreeSet<SynthTransition>, BTreeSet<SynthState>) {
    let mut k = aut.transitions.clone();
    let mut r = aut.dangling_of(&k);
    loop {
        let k_prev = k.clone();
        let r_prev = r.clone();
        let k_dangling = aut.dangling_of(&k_prev);
        let ctx = IterCtx { k: &k_prev, r: &r_prev, k_dangling: &k_dangling };
        k.retain(|t| !prune(t, &ctx));
        for t in aut.transitions.iter().filter(|t| t.is_necessary()) {
            if forbid(t, &ctx) {
                r.insert(t.source.clone());
            }
        }
        r.extend(aut.dangling_of(&k));
        if k == k_prev && r == r_prev {
            return (k, r);
        }
    }
}

/// Does some match in `k` let position `i` perform request `name` from the
/// same local basic state? This is the admissible surviving form of a
/// necessary request: the match need not be the original transition, only
/// the same principal performing the same request from the same local
/// state.
fn admissible_match(k: &BTreeSet<SynthTransition>, i: usize, name: &str, local: &str) -> bool {
    k.iter().any(|m| {
        m.label.is_match()
            && m.label.requester() == Some(i)
            && m.label.action_name() == name
            && m.source.vec.basic(i) == local
    })
}

fn orch_prune(t: &SynthTransition, ctx: &IterCtx<'_>) -> bool {
    t.label.is_request() || ctx.r.contains(&t.source) || ctx.r.contains(&t.target)
}

fn orch_forbid(t: &SynthTransition, ctx: &IterCtx<'_>) -> bool {
    // Necessary offers are controllable; only a necessary request (bare or
    // inside a match) can poison its source.
    let Some(i) = t.label.requester() else {
        return false;
    };
    t.is_necessary()
        && !admissible_match(ctx.k, i, t.label.action_name(), t.source.vec.basic(i))
        && !ctx.k_dangling.contains(&t.source)
}

// ---------------------------------------------------------------------------
// Public operations.
// ---------------------------------------------------------------------------

/// Runs the abstract synthesis fixed point with caller-supplied
/// predicates. Each predicate sees the candidate transition, the previous
/// iteration's refinement, and the previous forbidden set.
pub fn abstract_synthesis(
    a: &Msca,
    prune: impl Fn(&Transition, &Msca, &BTreeSet<StateVec>) -> bool,
    forbid: impl Fn(&Transition, &Msca, &BTreeSet<StateVec>) -> bool,
) -> (Msca, BTreeSet<StateVec>) {
    let aut = SynthAut::from_msca(a);
    let lower_t = |t: &SynthTransition| {
        Transition::new(t.source.vec.clone(), t.label.clone(), t.target.vec.clone(), t.modality)
    };
    let view = |ctx: &IterCtx<'_>| -> (Msca, BTreeSet<StateVec>) {
        let transitions = ctx.k.iter().map(lower_t).collect();
        let k = Msca::new(a.rank(), a.initial().clone(), a.finals().clone(), transitions)
            .expect("refinement of a valid automaton stays valid");
        let r = ctx.r.iter().map(|s| s.vec.clone()).collect();
        (k, r)
    };
    let (k, r) = fixed_point(
        &aut,
        |t, ctx| {
            let (kv, rv) = view(ctx);
            prune(&lower_t(t), &kv, &rv)
        },
        |t, ctx| {
            let (kv, rv) = view(ctx);
            forbid(&lower_t(t), &kv, &rv)
        },
    );
    let transitions = k.iter().map(lower_t).collect();
    let k = Msca::new(a.rank(), a.initial().clone(), a.finals().clone(), transitions)
        .expect("refinement of a valid automaton stays valid");
    (k, r.into_iter().map(|s| s.vec).collect())
}

/// Result of orchestration synthesis. `Empty` is a distinguished value,
/// not a zero-state automaton, so emptiness is always answerable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Orchestration {
    Empty,
    Automaton(Msca),
}

impl Orchestration {
    pub fn is_empty_orchestration(&self) -> bool {
        matches!(self, Orchestration::Empty)
    }

    pub fn automaton(&self) -> Option<&Msca> {
        match self {
            Orchestration::Empty => None,
            Orchestration::Automaton(a) => Some(a),
        }
    }
}

/// Shared tail of `orchestration` and `enforce`: apply the orchestration
/// predicates, decide emptiness, and trim dangling states.
fn synthesize_on(aut: &SynthAut) -> Option<(BTreeSet<SynthTransition>, BTreeSet<SynthState>)> {
    let (k, _r) = fixed_point(aut, orch_prune, orch_forbid);
    let dang = aut.dangling_of(&k);
    // A transition-free fixed point admits no interaction at all and is
    // reported as the empty orchestration, matching the behaviour of the
    // reference tooling where such automata are unrepresentable.
    if k.is_empty() || dang.contains(&aut.initial) || aut.finals.is_empty() {
        return None;
    }
    Some((k, dang))
}

/// Synthesises the orchestration of `a`: the largest refinement in
/// agreement (offers and matches only) with no dangling states and every
/// reachable necessary request matched.
pub fn orchestration(a: &Msca) -> Orchestration {
    let aut = SynthAut::from_msca(a);
    let Some((k, dang)) = synthesize_on(&aut) else {
        return Orchestration::Empty;
    };
    let transitions = k
        .into_iter()
        .map(|t| Transition::new(t.source.vec, t.label, t.target.vec, t.modality))
        .collect();
    let finals = aut
        .finals
        .iter()
        .filter(|f| !dang.contains(*f))
        .map(|f| f.vec.clone())
        .collect();
    Orchestration::Automaton(
        Msca::new(a.rank(), a.initial().clone(), finals, transitions)
            .expect("synthesis output of a valid automaton stays valid"),
    )
}

// ---------------------------------------------------------------------------
// Requirements.
// ---------------------------------------------------------------------------

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SynthesisError {
    #[error("requirement is nondeterministic at state {state:?} on {action:?}")]
    NondeterministicRequirement { state: String, action: String },
}

/// A finite automaton over action names with missing-edge-means-forbidden
/// semantics, used to restrict which offers and matches an orchestration
/// may fire and in which order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Requirement {
    initial: String,
    finals: BTreeSet<String>,
    states: BTreeSet<String>,
    edges: BTreeMap<(String, String), BTreeSet<String>>,
}

impl Requirement {
    pub fn new(
        initial: impl Into<String>,
        finals: impl IntoIterator<Item = String>,
        edges: impl IntoIterator<Item = (String, String, String)>,
    ) -> Self {
        let initial = initial.into();
        let mut states = BTreeSet::from([initial.clone()]);
        let finals: BTreeSet<String> = finals.into_iter().collect();
        states.extend(finals.iter().cloned());
        let mut edge_map: BTreeMap<(String, String), BTreeSet<String>> = BTreeMap::new();
        for (src, action, tgt) in edges {
            states.insert(src.clone());
            states.insert(tgt.clone());
            edge_map.entry((src, action)).or_default().insert(tgt);
        }
        Requirement { initial, finals, states, edges: edge_map }
    }

    /// Accepts every sequence over `alphabet`: one final state with a
    /// self-loop per action.
    pub fn universal(alphabet: impl IntoIterator<Item = String>) -> Self {
        let edges = alphabet
            .into_iter()
            .map(|a| ("any".to_string(), a, "any".to_string()));
        Requirement::new("any", ["any".to_string()], edges)
    }

    pub fn check_deterministic(&self) -> Result<(), SynthesisError> {
        for ((state, action), targets) in &self.edges {
            if targets.len() > 1 {
                return Err(SynthesisError::NondeterministicRequirement {
                    state: state.clone(),
                    action: action.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn initial(&self) -> &str {
        &self.initial
    }

    pub fn is_final(&self, state: &str) -> bool {
        self.finals.contains(state)
    }

    /// The unique successor on `action`, or `None` when the step is
    /// disallowed. Callers must have checked determinism.
    pub fn step(&self, state: &str, action: &str) -> Option<&String> {
        self.edges
            .get(&(state.to_string(), action.to_string()))
            .and_then(|ts| ts.iter().next())
    }

    /// Loads a requirement from the contract file format: rank 1, label
    /// atoms written as bare action names, modalities ignored.
    pub fn load_str(text: &str) -> Result<Self, FormatError> {
        let doc: Document = parse_document(text)?;
        if doc.rank != 1 {
            return Err(FormatError::Validation(format!(
                "requirement must have rank 1, got {}",
                doc.rank
            )));
        }
        let one = |v: &[String], what: &str| -> Result<String, FormatError> {
            match v {
                [s] => Ok(s.clone()),
                _ => Err(FormatError::Validation(format!("{what} must have exactly one entry"))),
            }
        };
        let initial = one(&doc.initial, "initial")?;
        let mut finals = Vec::new();
        for f in &doc.finals {
            finals.push(one(f, "final state")?);
        }
        let mut edges = Vec::new();
        for (idx, t) in doc.transitions.iter().enumerate() {
            let src = one(&t.source, &format!("transitions[{idx}].source"))?;
            let tgt = one(&t.target, &format!("transitions[{idx}].target"))?;
            let action = one(&t.label, &format!("transitions[{idx}].label"))?;
            if !crate::automata::action::is_valid_action_name(&action) {
                return Err(FormatError::Validation(format!(
                    "transitions[{idx}].label: requirement labels are bare action names, got {action:?}"
                )));
            }
            edges.push((src, action, tgt));
        }
        Ok(Requirement::new(initial, finals, edges))
    }

    pub fn load_path(path: impl AsRef<std::path::Path>) -> Result<Self, FormatError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| FormatError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::load_str(&text)
    }

    /// Canonical textual form, using the contract document shape.
    pub fn store_string(&self) -> String {
        use crate::automata::format::{DocModality, DocTransition};
        let doc = Document {
            rank: 1,
            initial: vec![self.initial.clone()],
            finals: self.finals.iter().map(|f| vec![f.clone()]).collect(),
            transitions: self
                .edges
                .iter()
                .flat_map(|((src, action), targets)| {
                    targets.iter().map(move |t| DocTransition {
                        source: vec![src.clone()],
                        label: vec![action.clone()],
                        modality: DocModality::Permitted,
                        target: vec![t.clone()],
                    })
                })
                .collect(),
            types: None,
            subtypes: None,
        };
        let value = serde_json::to_value(&doc).expect("document serializes");
        let mut out = serde_json::to_string_pretty(&value).expect("value prints");
        out.push('\n');
        out
    }
}

/// Synthesises the orchestration of `a` restricted by a deterministic
/// requirement. Offers and matches advance the requirement by their action
/// name and are dropped where the requirement has no edge; requests pass
/// through unobserved (synthesis prunes them anyway, but their necessity
/// must stay visible). Composite finals need both sides final. The
/// requirement component is tracked alongside each state during synthesis
/// and projected out of the returned automaton.
pub fn enforce(a: &Msca, req: &Requirement) -> Result<Orchestration, SynthesisError> {
    req.check_deterministic()?;
    let initial = SynthState { vec: a.initial().clone(), req: Some(req.initial.clone()) };
    let mut states = BTreeSet::from([initial.clone()]);
    let mut transitions = BTreeSet::new();
    let mut queue = VecDeque::from([initial.clone()]);
    let mut expanded = BTreeSet::new();
    while let Some(state) = queue.pop_front() {
        if !expanded.insert(state.clone()) {
            continue;
        }
        let rstate = state.req.clone().expect("product states track the requirement");
        for t in a.transitions().iter().filter(|t| t.source == state.vec) {
            let next_req = if t.label.is_request() {
                Some(rstate.clone())
            } else {
                req.step(&rstate, t.label.action_name()).cloned()
            };
            let Some(next_req) = next_req else {
                continue;
            };
            let target = SynthState { vec: t.target.clone(), req: Some(next_req) };
            states.insert(target.clone());
            if !expanded.contains(&target) {
                queue.push_back(target.clone());
            }
            transitions.insert(SynthTransition {
                source: state.clone(),
                label: t.label.clone(),
                target,
                modality: t.modality,
            });
        }
    }
    let finals: BTreeSet<SynthState> = states
        .iter()
        .filter(|s| {
            a.finals().contains(&s.vec)
                && req.is_final(s.req.as_deref().expect("product state"))
        })
        .cloned()
        .collect();
    let aut = SynthAut { rank: a.rank(), states, initial, finals, transitions };
    let Some((k, dang)) = synthesize_on(&aut) else {
        return Ok(Orchestration::Empty);
    };
    // Project the requirement component out. When two surviving product
    // states share the same underlying state vector the projection merges
    // them; every projected transition is one of `a`, so the result is
    // still a valid sub-automaton of `a`.
    let transitions: BTreeSet<Transition> = k
        .into_iter()
        .map(|t| Transition::new(t.source.vec, t.label, t.target.vec, t.modality))
        .collect();
    let finals: BTreeSet<StateVec> = aut
        .finals
        .iter()
        .filter(|f| !dang.contains(*f))
        .map(|f| f.vec.clone())
        .collect();
    Ok(Orchestration::Automaton(
        Msca::new(a.rank(), a.initial().clone(), finals, transitions)
            .expect("projection of a product refinement stays valid"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::action::Action;
    use crate::composition::{compose, CompositionBound};

    fn sv(parts: Vec<&str>) -> StateVec {
        StateVec::from(parts)
    }

    fn principal(
        initial: &str,
        finals: Vec<&str>,
        transitions: Vec<(&str, &str, &str, Modality)>,
    ) -> Msca {
        let ts = transitions
            .into_iter()
            .map(|(src, atom, tgt, m)| {
                Transition::new(
                    sv(vec![src]),
                    Label::new(vec![Action::parse(atom).unwrap()]).unwrap(),
                    sv(vec![tgt]),
                    m,
                )
            })
            .collect();
        Msca::new(1, sv(vec![initial]), finals.into_iter().map(|f| sv(vec![f])).collect(), ts)
            .unwrap()
    }

    fn alice() -> Msca {
        use Modality::Permitted as P;
        principal(
            "a0",
            vec!["a3"],
            vec![
                ("a0", "!euro", "a1", P),
                ("a0", "!dollar", "a2", P),
                ("a1", "?coffee", "a3", P),
                ("a2", "?tea", "a3", P),
            ],
        )
    }

    fn bob() -> Msca {
        use Modality::Permitted as P;
        principal(
            "b0",
            vec!["b3"],
            vec![
                ("b0", "?euro", "b1", P),
                ("b0", "?dollar", "b2", P),
                ("b1", "!coffee", "b3", P),
                ("b2", "!tea", "b3", P),
            ],
        )
    }

    #[test]
    fn dangling_on_point_automaton_is_empty() {
        let a = principal("q0", vec!["q0"], vec![]);
        assert!(dangling(&a).is_empty());
    }

    #[test]
    fn dangling_finds_unreachable_and_noncoreachable() {
        use Modality::Permitted as P;
        // Chain q0 -> q1 with finals = {q0}: q1 cannot reach a final.
        let a = principal("q0", vec!["q0"], vec![("q0", "!a", "q1", P)]);
        assert_eq!(dangling(&a), BTreeSet::from([sv(vec!["q1"])]));
        // Isolated final-ish state comes from the finals set.
        let b = Msca::new(
            1,
            sv(vec!["q0"]),
            BTreeSet::from([sv(vec!["q2"]), sv(vec!["q0"])]),
            BTreeSet::new(),
        )
        .unwrap();
        assert_eq!(dangling(&b), BTreeSet::from([sv(vec!["q2"])]));
    }

    #[test]
    fn identity_fixed_point_when_predicates_are_false() {
        let a = alice();
        let (k, r) = abstract_synthesis(&a, |_, _, _| false, |_, _, _| false);
        assert_eq!(k, a);
        assert!(r.is_empty());
    }

    #[test]
    fn pruning_requests_leaves_dangling_pair() {
        use Modality::Permitted as P;
        let a = principal("q0", vec!["q1"], vec![("q0", "?x", "q1", P)]);
        let (k, r) = abstract_synthesis(&a, |t, _, _| t.label.is_request(), |_, _, _| false);
        assert!(k.transitions().is_empty());
        assert_eq!(r, BTreeSet::from([sv(vec!["q0"]), sv(vec!["q1"])]));
    }

    #[test]
    fn alice_bob_orchestration_keeps_both_match_paths() {
        let ab = compose(&[alice(), bob()], CompositionBound::Unbounded).unwrap();
        let orc = orchestration(&ab);
        let orc = orc.automaton().expect("non-empty");
        assert_eq!(orc, &ab);
        assert!(orc.transitions().iter().all(|t| t.label.is_match()));
    }

    #[test]
    fn unmatched_necessary_request_empties_the_orchestration() {
        use Modality::{Necessary, Permitted};
        let client = principal(
            "Init",
            vec!["Init"],
            vec![
                ("Init", "?create", "Computing", Permitted),
                ("Computing", "?update", "Computing", Necessary),
                ("Computing", "?quit", "Init", Permitted),
            ],
        );
        let composer_full = principal(
            "Idle",
            vec!["Idle"],
            vec![
                ("Idle", "!create", "Busy", Permitted),
                ("Busy", "!update", "Busy", Permitted),
                ("Busy", "!quit", "Idle", Permitted),
            ],
        );
        let composer_without_update = principal(
            "Idle",
            vec!["Idle"],
            vec![
                ("Idle", "!create", "Busy", Permitted),
                ("Busy", "!quit", "Idle", Permitted),
            ],
        );
        let with = orchestration(
            &compose(&[client.clone(), composer_full], CompositionBound::Unbounded).unwrap(),
        );
        let with = with.automaton().expect("full composer yields an orchestration");
        assert!(with
            .transitions()
            .iter()
            .any(|t| t.label.is_match() && t.label.action_name() == "update"));
        let without = orchestration(
            &compose(&[client, composer_without_update], CompositionBound::Unbounded).unwrap(),
        );
        assert!(without.is_empty_orchestration());
    }

    #[test]
    fn request_only_path_to_final_is_empty() {
        use Modality::Permitted as P;
        let a = principal("q0", vec!["q1"], vec![("q0", "?x", "q1", P)]);
        assert!(orchestration(&a).is_empty_orchestration());
    }

    #[test]
    fn requirement_determinism_checked() {
        let req = Requirement::new(
            "r0",
            ["r1".to_string()],
            [
                ("r0".to_string(), "a".to_string(), "r1".to_string()),
                ("r0".to_string(), "a".to_string(), "r2".to_string()),
            ],
        );
        assert!(matches!(
            req.check_deterministic(),
            Err(SynthesisError::NondeterministicRequirement { .. })
        ));
    }

    fn coffee_after_euro() -> Requirement {
        Requirement::new(
            "r0",
            ["r2".to_string()],
            [
                ("r0".to_string(), "euro".to_string(), "r1".to_string()),
                ("r1".to_string(), "coffee".to_string(), "r2".to_string()),
            ],
        )
    }

    #[test]
    fn enforce_prunes_the_dollar_branch() {
        let ab = compose(&[alice(), bob()], CompositionBound::Unbounded).unwrap();
        let orc = enforce(&ab, &coffee_after_euro()).unwrap();
        let orc = orc.automaton().expect("non-empty");
        let labels: Vec<String> =
            orc.transitions().iter().map(|t| t.label.render()).collect();
        assert_eq!(labels, vec!["[!euro,?euro]", "[?coffee,!coffee]"]);
        assert!(dangling(orc).is_empty());
    }

    #[test]
    fn universal_requirement_is_neutral() {
        let ab = compose(&[alice(), bob()], CompositionBound::Unbounded).unwrap();
        let universal =
            Requirement::universal(["euro", "dollar", "coffee", "tea"].map(String::from));
        let via_req = enforce(&ab, &universal).unwrap();
        let direct = orchestration(&ab);
        assert_eq!(via_req, direct);
    }

    #[test]
    fn empty_language_requirement_is_empty() {
        let ab = compose(&[alice(), bob()], CompositionBound::Unbounded).unwrap();
        let nothing = Requirement::new("r0", [], []);
        assert!(enforce(&ab, &nothing).unwrap().is_empty_orchestration());
    }

    #[test]
    fn requirement_round_trips_through_the_file_format() {
        let req = coffee_after_euro();
        let text = req.store_string();
        let back = Requirement::load_str(&text).unwrap();
        assert_eq!(req, back);
        assert!(Requirement::load_str("{}").is_err());
        // Prefixed atoms are not bare names.
        let bad = text.replace("\"euro\"", "\"!euro\"");
        assert!(Requirement::load_str(&bad).is_err());
    }
}
