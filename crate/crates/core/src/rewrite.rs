//! Object-level reduction: β, rule steps, internal steps, top
//! dependency-pair steps, chains, and bounded exhaustive exploration.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dp::DepPair;
use crate::error::{Error, Result};
use crate::matching::match_pattern;
use crate::system::Rule;
use crate::term::{CanonTerm, Substitution, Term};
use crate::types::Position;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StepKind {
    Beta,
    Rule(usize),
    Dp(usize),
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepKind::Beta => write!(f, "beta"),
            StepKind::Rule(i) => write!(f, "rule[{i}]"),
            StepKind::Dp(i) => write!(f, "dp[{i}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub kind: StepKind,
    pub position: Position,
    pub from: Term,
    pub to: Term,
    pub subst: Substitution,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}: {} => {}", self.kind, self.position, self.from, self.to)
    }
}

impl Step {
    /// Recomputes the step from `from` and checks it reaches `to`.
    pub fn replay(&self, rules: &[Rule], dps: &[DepPair]) -> bool {
        let Ok(redex) = self.from.subterm_at(&self.position) else {
            return false;
        };
        let contractum = match self.kind {
            StepKind::Beta => redex.contract_beta(),
            StepKind::Rule(i) => rules.get(i).and_then(|r| {
                let s = match_pattern(&r.lhs, redex)?;
                (s == self.subst).then(|| s.apply(&r.rhs))
            }),
            StepKind::Dp(i) => {
                if !self.position.is_root() {
                    return false;
                }
                dps.get(i).and_then(|d| {
                    let s = match_pattern(&d.lhs, redex)?;
                    (s == self.subst).then(|| s.apply(&d.rhs))
                })
            }
        };
        let Some(c) = contractum else {
            return false;
        };
        match self.from.replace_at(&self.position, c) {
            Ok(t) => t.alpha_eq(&self.to),
            Err(_) => false,
        }
    }
}

/// Which steps count as internal in the chain relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InternalMode {
    /// β and rule steps below the root.
    #[default]
    All,
    /// Only rule steps below the root.
    RulesOnly,
}

/// All `→β ∪ →R` steps from `t`, ordered by position then kind.
pub fn rewrite_steps(t: &Term, rules: &[Rule]) -> Vec<Step> {
    let mut out = Vec::new();
    for (p, s) in t.subterms() {
        if let Some(c) = s.contract_beta() {
            out.push(Step {
                kind: StepKind::Beta,
                to: t.replace_at(&p, c).expect("valid position"),
                position: p.clone(),
                from: t.clone(),
                subst: Substitution::new(),
            });
        }
        for (i, r) in rules.iter().enumerate() {
            if let Some(sigma) = match_pattern(&r.lhs, s) {
                let c = sigma.apply(&r.rhs);
                out.push(Step {
                    kind: StepKind::Rule(i),
                    to: t.replace_at(&p, c).expect("valid position"),
                    position: p.clone(),
                    from: t.clone(),
                    subst: sigma,
                });
            }
        }
    }
    out
}

pub fn internal_steps(t: &Term, rules: &[Rule], mode: InternalMode) -> Vec<Step> {
    rewrite_steps(t, rules)
        .into_iter()
        .filter(|s| !s.position.is_root())
        .filter(|s| mode == InternalMode::All || s.kind != StepKind::Beta)
        .collect()
}

pub fn dp_top_steps(t: &Term, dps: &[DepPair]) -> Vec<Step> {
    dps.iter()
        .enumerate()
        .filter_map(|(i, d)| {
            let sigma = match_pattern(&d.lhs, t)?;
            Some(Step {
                kind: StepKind::Dp(i),
                position: Position::root(),
                from: t.clone(),
                to: sigma.apply(&d.rhs),
                subst: sigma,
            })
        })
        .collect()
}

/// Every sequence of at most `k` internal steps followed by one top
/// dependency-pair step.
pub fn chain_steps(
    t: &Term,
    rules: &[Rule],
    dps: &[DepPair],
    k: usize,
    mode: InternalMode,
) -> Vec<Vec<Step>> {
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    fn go(
        t: &Term,
        rules: &[Rule],
        dps: &[DepPair],
        k: usize,
        mode: InternalMode,
        prefix: &mut Vec<Step>,
        out: &mut Vec<Vec<Step>>,
    ) {
        for d in dp_top_steps(t, dps) {
            let mut seq = prefix.clone();
            seq.push(d);
            out.push(seq);
        }
        if k == 0 {
            return;
        }
        for s in internal_steps(t, rules, mode) {
            let next = s.to.clone();
            prefix.push(s);
            go(&next, rules, dps, k - 1, mode, prefix, out);
            prefix.pop();
        }
    }
    go(t, rules, dps, k, mode, &mut prefix, &mut out);
    out
}

/// Relation explored by [`bounded_explore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `→β ∪ →R`
    BetaRewrite,
    /// `→β ∪ →ch`, unfolded into single steps: β anywhere, rule steps
    /// below the root, dependency-pair steps at the root.
    BetaChain,
}

pub struct Engine<'a> {
    pub rules: &'a [Rule],
    pub dps: &'a [DepPair],
    pub mode: InternalMode,
}

impl<'a> Engine<'a> {
    pub fn new(rules: &'a [Rule], dps: &'a [DepPair]) -> Engine<'a> {
        Engine {
            rules,
            dps,
            mode: InternalMode::All,
        }
    }

    pub fn successors(&self, t: &Term, relation: Relation) -> Vec<Step> {
        match relation {
            Relation::BetaRewrite => rewrite_steps(t, self.rules),
            Relation::BetaChain => {
                let mut steps = dp_top_steps(t, self.dps);
                steps.extend(
                    rewrite_steps(t, self.rules)
                        .into_iter()
                        .filter(|s| s.kind == StepKind::Beta || !s.position.is_root()),
                );
                steps.sort_by(|a, b| (&a.position, a.kind).cmp(&(&b.position, b.kind)));
                steps
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExploreLimits {
    pub max_depth: usize,
    pub max_nodes: usize,
}

impl Default for ExploreLimits {
    fn default() -> Self {
        ExploreLimits {
            max_depth: 200,
            max_nodes: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExplorationVerdict {
    /// Every reduction from the start term reaches a normal form; the
    /// longest one has `max_trace_len` steps.
    AllTerminated { max_trace_len: usize },
    /// Some reduction is longer than the depth bound.
    BoundExceeded { witness: Vec<Step> },
    /// The last state of the witness is α-equivalent to an earlier one.
    CycleFound { witness: Vec<Step> },
}

impl ExplorationVerdict {
    pub fn witness(&self) -> Option<&[Step]> {
        match self {
            ExplorationVerdict::AllTerminated { .. } => None,
            ExplorationVerdict::BoundExceeded { witness }
            | ExplorationVerdict::CycleFound { witness } => Some(witness),
        }
    }
}

struct Frame {
    key: CanonTerm,
    steps: Vec<Step>,
    next: usize,
    height: usize,
    best: Option<Step>,
}

enum NodeState {
    OnPath,
    Done { height: usize, best: Option<Step> },
}

/// Depth-first exhaustive exploration with α-class memoization.
///
/// Cycles are detected along the current path; finished states are shared
/// across paths. Exceeding `max_nodes` distinct states is an error rather
/// than a verdict.
pub fn bounded_explore(
    start: &Term,
    engine: &Engine<'_>,
    relation: Relation,
    limits: ExploreLimits,
) -> Result<ExplorationVerdict> {
    let mut states: BTreeMap<CanonTerm, NodeState> = BTreeMap::new();
    let root_key = start.canonical();
    states.insert(root_key.clone(), NodeState::OnPath);
    let mut stack = vec![Frame {
        key: root_key,
        steps: engine.successors(start, relation),
        next: 0,
        height: 0,
        best: None,
    }];
    // step that entered stack[i + 1]
    let mut path: Vec<Step> = Vec::new();

    while let Some(top) = stack.last_mut() {
        if top.next < top.steps.len() {
            let step = top.steps[top.next].clone();
            top.next += 1;
            let depth = stack.len() - 1;
            let key = step.to.canonical();
            match states.get(&key) {
                Some(NodeState::OnPath) => {
                    let mut witness = path.clone();
                    witness.push(step);
                    return Ok(ExplorationVerdict::CycleFound { witness });
                }
                Some(NodeState::Done { height, .. }) => {
                    let h = *height;
                    if depth + 1 + h > limits.max_depth {
                        let mut witness = path.clone();
                        witness.push(step.clone());
                        witness.extend(longest_from(&states, &key));
                        return Ok(ExplorationVerdict::BoundExceeded { witness });
                    }
                    let top = stack.last_mut().expect("non-empty");
                    if h + 1 > top.height || top.best.is_none() {
                        top.height = top.height.max(h + 1);
                        top.best = Some(step);
                    }
                }
                None => {
                    if depth + 1 > limits.max_depth {
                        let mut witness = path.clone();
                        witness.push(step);
                        return Ok(ExplorationVerdict::BoundExceeded { witness });
                    }
                    if states.len() >= limits.max_nodes {
                        return Err(Error::ResourceLimit(format!(
                            "exploration visited more than {} states",
                            limits.max_nodes
                        )));
                    }
                    states.insert(key.clone(), NodeState::OnPath);
                    let steps = engine.successors(&step.to, relation);
                    path.push(step);
                    stack.push(Frame {
                        key,
                        steps,
                        next: 0,
                        height: 0,
                        best: None,
                    });
                }
            }
        } else {
            let done = stack.pop().expect("non-empty");
            let entered = path.pop();
            let height = done.height;
            states.insert(
                done.key,
                NodeState::Done {
                    height,
                    best: done.best,
                },
            );
            if let (Some(parent), Some(step)) = (stack.last_mut(), entered) {
                if height + 1 > parent.height || parent.best.is_none() {
                    parent.height = parent.height.max(height + 1);
                    parent.best = Some(step);
                }
            } else {
                return Ok(ExplorationVerdict::AllTerminated {
                    max_trace_len: height,
                });
            }
        }
    }
    unreachable!("the root frame returns when popped")
}

fn longest_from(states: &BTreeMap<CanonTerm, NodeState>, key: &CanonTerm) -> Vec<Step> {
    let mut out = Vec::new();
    let mut cur = key.clone();
    while let Some(NodeState::Done {
        best: Some(step), ..
    }) = states.get(&cur)
    {
        cur = step.to.canonical();
        out.push(step.clone());
    }
    out
}

/// Explicit state graph, for DOT export.
#[derive(Debug, Clone, Default)]
pub struct StateGraph {
    pub states: Vec<Term>,
    pub edges: Vec<(usize, usize, StepKind, Position)>,
    /// True when `max_nodes` cut the exploration short.
    pub truncated: bool,
}

pub fn explore_graph(
    start: &Term,
    engine: &Engine<'_>,
    relation: Relation,
    max_nodes: usize,
) -> StateGraph {
    let mut graph = StateGraph::default();
    let mut ids: BTreeMap<CanonTerm, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    ids.insert(start.canonical(), 0);
    graph.states.push(start.clone());
    queue.push_back(0usize);
    while let Some(i) = queue.pop_front() {
        let t = graph.states[i].clone();
        for step in engine.successors(&t, relation) {
            let key = step.to.canonical();
            let j = match ids.get(&key) {
                Some(&j) => j,
                None => {
                    if graph.states.len() >= max_nodes {
                        graph.truncated = true;
                        continue;
                    }
                    let j = graph.states.len();
                    ids.insert(key, j);
                    graph.states.push(step.to.clone());
                    queue.push_back(j);
                    j
                }
            };
            graph.edges.push((i, j, step.kind, step.position));
        }
    }
    graph
}

impl StateGraph {
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph states {\n  node [shape=box, fontname=\"monospace\"];\n");
        for (i, t) in self.states.iter().enumerate() {
            s.push_str(&format!("  n{i} [label=\"{}\"];\n", escape_dot(&t.to_string())));
        }
        for (i, j, kind, pos) in &self.edges {
            s.push_str(&format!("  n{i} -> n{j} [label=\"{kind}@{pos}\"];\n"));
        }
        s.push_str("}\n");
        s
    }
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn render_trace(steps: &[Step]) -> String {
    steps.iter().map(|s| format!("{s}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::extract_dps;
    use crate::parse::{parse_system, parse_term};

    const PLUS: &str = "sort N\n0 : N\ns : N -> N\nplus : N -> N -> N\n\
                        rule plus 0 Y -> Y\nrule plus (s X) Y -> s (plus X Y)\n";

    #[test]
    fn steps_are_sorted_and_replay() {
        let sys = parse_system(PLUS).unwrap();
        let t = parse_term("plus (s 0) ((\\x:N. x) 0)", &sys.signature).unwrap();
        let steps = rewrite_steps(&t, &sys.rules);
        assert_eq!(steps.len(), 2);
        assert!(steps[0].position < steps[1].position);
        assert!(steps.iter().all(|s| s.replay(&sys.rules, &[])));
        let rules_only = internal_steps(&t, &sys.rules, InternalMode::RulesOnly);
        assert!(rules_only.iter().all(|s| matches!(s.kind, StepKind::Rule(_))));
    }

    #[test]
    fn explore_terminates_with_longest_trace() {
        let sys = parse_system(PLUS).unwrap();
        let t = parse_term("plus (s (s 0)) 0", &sys.signature).unwrap();
        let v = bounded_explore(&t, &Engine::new(&sys.rules, &[]), Relation::BetaRewrite, ExploreLimits::default())
            .unwrap();
        assert_eq!(v, ExplorationVerdict::AllTerminated { max_trace_len: 3 });
    }

    #[test]
    fn chain_uses_dp_at_root() {
        let sys = parse_system(PLUS).unwrap();
        let dps = extract_dps(&sys).unwrap();
        let t = parse_term("plus (s 0) 0", &sys.signature).unwrap();
        let steps = Engine::new(&sys.rules, &dps).successors(&t, Relation::BetaChain);
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].kind, StepKind::Dp(0));
        assert!(steps[0].position.is_root());
    }

    #[test]
    fn limits() {
        let sys = parse_system("sort N\n0 : N\ns : N -> N\ng : N -> N\nrule g X -> g (s X)\n").unwrap();
        let t = parse_term("g 0", &sys.signature).unwrap();
        let e = Engine::new(&sys.rules, &[]);
        let tight = ExploreLimits { max_depth: 5, max_nodes: 100 };
        let v = bounded_explore(&t, &e, Relation::BetaRewrite, tight).unwrap();
        assert!(matches!(v, ExplorationVerdict::BoundExceeded { ref witness } if witness.len() > 5));
        let small = ExploreLimits { max_depth: 50, max_nodes: 3 };
        assert!(matches!(
            bounded_explore(&t, &e, Relation::BetaRewrite, small),
            Err(Error::ResourceLimit(_))
        ));
    }
}
