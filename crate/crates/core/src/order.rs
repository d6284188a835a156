//! A higher-order reduction pair built from a conservative subset of the
//! higher-order recursive path ordering, plus precedence search.
//!
//! Strict comparisons require the two sides to have the same arrow shape
//! once all base sorts are identified. The clauses, tried in this order:
//!
//! 1. subterm: `f s̄ > t` if some `si ≥ t`;
//! 2. precedence: `f s̄ > g t̄` if `f > g` and `f s̄` covers every `tj`;
//! 3. same symbol: `f s̄ > f t̄` if `s̄ > t̄` in the status extension of `f`
//!    and `f s̄` covers every `tj`;
//! 4. application: `f s̄ > h t1 ... tn` (head `h` a variable or an
//!    abstraction) if `f s̄` covers `h` and every `tj`;
//! 5. abstraction: `λx.s > λx.t` if `s > t`;
//! 6. β-prefix: `s > t` if `s →β s'` and `s' ≥ t`.
//!
//! `f s̄` covers `u` if some `si ≥ u` or `f s̄ > u`. Anything outside these
//! clauses is reported as not comparable, which does not mean `s ≤ t`.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dp::DepPair;
use crate::error::{Error, Result};
use crate::system::Rule;
use crate::term::{fresh_var, Substitution, Term};

/// Default bound on β-steps used by `≥` and by the β-prefix clause.
pub const DEFAULT_GE_BOUND: usize = 8;

const MAX_BETA_STATES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Lex,
    Mul,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Lex => "lex",
            Status::Mul => "mul",
        })
    }
}

/// A strict partial order on symbol names, with a status per symbol.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Precedence {
    edges: BTreeSet<(String, String)>,
    closure: BTreeSet<(String, String)>,
    status: BTreeMap<String, Status>,
}

impl Precedence {
    pub fn new() -> Precedence {
        Precedence::default()
    }

    /// Adds `f > g`, rejecting edges that would close a cycle.
    pub fn add(&mut self, f: &str, g: &str) -> Result<()> {
        if f == g || self.gt(g, f) {
            return Err(Error::CyclicPrecedence(f.to_string()));
        }
        self.edges.insert((f.to_string(), g.to_string()));
        let mut above: Vec<String> = self
            .closure
            .iter()
            .filter(|(_, b)| b == f)
            .map(|(a, _)| a.clone())
            .collect();
        above.push(f.to_string());
        let mut below: Vec<String> = self
            .closure
            .iter()
            .filter(|(a, _)| a == g)
            .map(|(_, b)| b.clone())
            .collect();
        below.push(g.to_string());
        for a in &above {
            for b in &below {
                self.closure.insert((a.clone(), b.clone()));
            }
        }
        Ok(())
    }

    /// The chain `order[0] > order[1] > ...`.
    pub fn total(order: &[String]) -> Precedence {
        let mut p = Precedence::new();
        for w in order.windows(2) {
            p.edges.insert((w[0].clone(), w[1].clone()));
        }
        for (i, a) in order.iter().enumerate() {
            for b in &order[i + 1..] {
                p.closure.insert((a.clone(), b.clone()));
            }
        }
        p
    }

    /// Parses `f>g,f>h` (chains such as `f>g>h` are allowed).
    pub fn parse(s: &str) -> Result<Precedence> {
        let mut p = Precedence::new();
        for group in s.split(',').map(str::trim).filter(|g| !g.is_empty()) {
            let names: Vec<&str> = group.split('>').map(str::trim).collect();
            if names.len() < 2 || names.iter().any(|n| n.is_empty()) {
                return Err(Error::Syntax {
                    line: 1,
                    col: 1,
                    message: format!("bad precedence group `{group}`"),
                });
            }
            for w in names.windows(2) {
                p.add(w[0], w[1])?;
            }
        }
        Ok(p)
    }

    pub fn gt(&self, f: &str, g: &str) -> bool {
        self.closure.contains(&(f.to_string(), g.to_string()))
    }

    pub fn edges(&self) -> &BTreeSet<(String, String)> {
        &self.edges
    }

    pub fn set_status(&mut self, f: &str, s: Status) {
        self.status.insert(f.to_string(), s);
    }

    /// Unset statuses default to `mul`.
    pub fn status(&self, f: &str) -> Status {
        self.status.get(f).copied().unwrap_or(Status::Mul)
    }

    pub fn statuses(&self) -> &BTreeMap<String, Status> {
        &self.status
    }
}

impl fmt::Display for Precedence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}>{b}")).collect();
        f.write_str(&edges.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Clause {
    /// `s =α t`
    AlphaEq,
    /// 1-based argument index.
    Subterm(usize),
    Precedence(String, String),
    /// The first `decreasing` premises witness the status comparison,
    /// the remaining ones the coverage of the right-hand arguments.
    SameSymbol { status: Status, decreasing: usize },
    Application,
    Abstraction,
    /// `s →β s'` at the given position; the premise compares `s'`.
    BetaPrefix(crate::types::Position),
    /// A `≥` witness step `s →β s'`; the premise compares `s'`.
    Beta(crate::types::Position),
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clause::AlphaEq => write!(f, "alpha-eq"),
            Clause::Subterm(i) => write!(f, "subterm[{i}]"),
            Clause::Precedence(a, b) => write!(f, "precedence[{a}>{b}]"),
            Clause::SameSymbol { status, .. } => write!(f, "same-symbol[{status}]"),
            Clause::Application => write!(f, "application"),
            Clause::Abstraction => write!(f, "abstraction"),
            Clause::BetaPrefix(p) => write!(f, "beta-prefix@{p}"),
            Clause::Beta(p) => write!(f, "beta@{p}"),
        }
    }
}

/// A clause trace witnessing `lhs > rhs` or `lhs ≥ rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub clause: Clause,
    pub lhs: Term,
    pub rhs: Term,
    pub premises: Vec<Proof>,
}

impl Proof {
    fn leaf(clause: Clause, lhs: &Term, rhs: &Term) -> Proof {
        Proof {
            clause,
            lhs: lhs.clone(),
            rhs: rhs.clone(),
            premises: Vec::new(),
        }
    }

    /// Is this a witness of a strict comparison?
    pub fn is_strict(&self) -> bool {
        !matches!(self.clause, Clause::AlphaEq)
    }

    /// Precedence edges the proof relies on.
    pub fn used_edges(&self, out: &mut BTreeSet<(String, String)>) {
        if let Clause::Precedence(a, b) = &self.clause {
            out.insert((a.clone(), b.clone()));
        }
        for p in &self.premises {
            p.used_edges(out);
        }
    }

    pub fn to_report(&self) -> ProofReport {
        ProofReport {
            clause: self.clause.to_string(),
            lhs: self.lhs.to_string(),
            rhs: self.rhs.to_string(),
            premises: self.premises.iter().map(Proof::to_report).collect(),
        }
    }

    /// Indented rendering, one clause per line.
    pub fn render(&self, indent: usize, out: &mut String) {
        out.push_str(&format!(
            "{:indent$}{}: {} > {}\n",
            "",
            self.clause,
            self.lhs,
            self.rhs,
            indent = indent
        ));
        for p in &self.premises {
            p.render(indent + 2, out);
        }
    }

    /// Re-checks every node against the clause definitions.
    pub fn check(&self, prec: &Precedence) -> std::result::Result<(), String> {
        let s = &self.lhs;
        let t = &self.rhs;
        let fail = |why: &str| Err(format!("{}: {} vs {}: {why}", self.clause, s, t));
        if !matches!(self.clause, Clause::AlphaEq | Clause::Beta(_))
            && !same_shape(s, t)
        {
            return fail("arrow shapes differ");
        }
        for p in &self.premises {
            p.check(prec)?;
        }
        let (head, sargs) = s.spine();
        let (thead, targs) = t.spine();
        let covers = |p: &Proof, u: &Term| -> bool {
            p.rhs.alpha_eq(u)
                && (p.lhs.alpha_eq(s) && p.is_strict() || sargs.iter().any(|si| p.lhs.alpha_eq(si)))
        };
        match &self.clause {
            Clause::AlphaEq => {
                if s.alpha_eq(t) && self.premises.is_empty() {
                    Ok(())
                } else {
                    fail("not α-equivalent")
                }
            }
            Clause::Subterm(i) => {
                let [p] = self.premises.as_slice() else {
                    return fail("expects one premise");
                };
                match (head, sargs.get(i.wrapping_sub(1))) {
                    (Term::Sym(_), Some(si)) if p.lhs.alpha_eq(si) && p.rhs.alpha_eq(t) => Ok(()),
                    _ => fail("premise is not about the argument"),
                }
            }
            Clause::Precedence(f, g) => {
                let (Term::Sym(hf), Term::Sym(hg)) = (head, thead) else {
                    return fail("heads are not symbols");
                };
                if *hf.name != **f || *hg.name != **g || !prec.gt(f, g) {
                    return fail("precedence does not hold");
                }
                if self.premises.len() != targs.len()
                    || !self.premises.iter().zip(&targs).all(|(p, u)| covers(p, u))
                {
                    return fail("arguments not covered");
                }
                Ok(())
            }
            Clause::SameSymbol { status, decreasing } => {
                let (Term::Sym(hf), Term::Sym(hg)) = (head, thead) else {
                    return fail("heads are not symbols");
                };
                if hf.name != hg.name || prec.status(&hf.name) != *status {
                    return fail("wrong symbol or status");
                }
                let (dec, cov) = self.premises.split_at((*decreasing).min(self.premises.len()));
                if dec.is_empty() && *status == Status::Lex {
                    return fail("no decreasing argument");
                }
                for p in dec {
                    if !p.is_strict()
                        || !sargs.iter().any(|a| p.lhs.alpha_eq(a))
                        || !targs.iter().any(|a| p.rhs.alpha_eq(a))
                    {
                        return fail("status premise does not compare arguments");
                    }
                }
                if cov.len() != targs.len() || !cov.iter().zip(&targs).all(|(p, u)| covers(p, u)) {
                    return fail("arguments not covered");
                }
                if !status_holds(*status, &sargs, &targs, prec) {
                    return fail("status extension does not hold");
                }
                Ok(())
            }
            Clause::Application => {
                if matches!(thead, Term::Sym(_)) || targs.is_empty() {
                    return fail("right-hand side is not a variable- or abstraction-headed application");
                }
                let parts: Vec<&Term> = std::iter::once(thead).chain(targs.iter().copied()).collect();
                if self.premises.len() != parts.len()
                    || !self.premises.iter().zip(&parts).all(|(p, u)| covers(p, u))
                {
                    return fail("application parts not covered");
                }
                Ok(())
            }
            Clause::Abstraction => {
                let (Term::Lam(x, b1), Term::Lam(y, b2), [p]) = (s, t, self.premises.as_slice())
                else {
                    return fail("not two abstractions with one premise");
                };
                if x.ty != y.ty || !p.is_strict() {
                    return fail("binder types differ");
                }
                let mut avoid = BTreeSet::new();
                s.all_names(&mut avoid);
                t.all_names(&mut avoid);
                let z = fresh_var(x, &avoid);
                let rx: Substitution = [(x.clone(), Term::Var(z.clone()))].into_iter().collect();
                let ry: Substitution = [(y.clone(), Term::Var(z))].into_iter().collect();
                if p.lhs.alpha_eq(&rx.apply(b1)) && p.rhs.alpha_eq(&ry.apply(b2)) {
                    Ok(())
                } else {
                    fail("premise does not compare the bodies")
                }
            }
            Clause::BetaPrefix(pos) | Clause::Beta(pos) => {
                let [p] = self.premises.as_slice() else {
                    return fail("expects one premise");
                };
                let reduct = s
                    .subterm_at(pos)
                    .ok()
                    .and_then(Term::contract_beta)
                    .and_then(|c| s.replace_at(pos, c).ok());
                match reduct {
                    Some(r) if r.alpha_eq(&p.lhs) && p.rhs.alpha_eq(t) => {
                        if matches!(self.clause, Clause::BetaPrefix(_))
                            && matches!(p.clause, Clause::Beta(_))
                        {
                            return fail("β-prefix premise must be a strict comparison or α-equality");
                        }
                        Ok(())
                    }
                    _ => fail("premise is not the β-reduct"),
                }
            }
        }
    }
}

fn same_shape(s: &Term, t: &Term) -> bool {
    match (s.type_of(), t.type_of()) {
        (Ok(a), Ok(b)) => a.same_shape(&b),
        _ => false,
    }
}

/// Serializable clause trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofReport {
    pub clause: String,
    pub lhs: String,
    pub rhs: String,
    pub premises: Vec<ProofReport>,
}

/// The two relations of a reduction pair.
pub trait ReductionPair {
    fn strict(&self, s: &Term, t: &Term) -> Option<Proof>;
    fn weak(&self, s: &Term, t: &Term) -> Option<Proof>;
}

/// The clause-set ordering for a fixed precedence.
pub struct Horpo<'p> {
    prec: &'p Precedence,
    ge_bound: usize,
    memo: RefCell<HashMap<(Term, Term, usize), Option<Proof>>>,
    queries: RefCell<BTreeMap<(String, String), bool>>,
}

impl<'p> Horpo<'p> {
    pub fn new(prec: &'p Precedence, ge_bound: usize) -> Horpo<'p> {
        Horpo {
            prec,
            ge_bound,
            memo: RefCell::new(HashMap::new()),
            queries: RefCell::new(BTreeMap::new()),
        }
    }

    /// Precedence comparisons asked so far, with their answers.
    pub fn queries(&self) -> BTreeMap<(String, String), bool> {
        self.queries.borrow().clone()
    }

    fn prec_gt(&self, f: &str, g: &str) -> bool {
        let r = self.prec.gt(f, g);
        self.queries
            .borrow_mut()
            .insert((f.to_string(), g.to_string()), r);
        r
    }

    pub fn gt(&self, s: &Term, t: &Term) -> Option<Proof> {
        self.gt_fuel(s, t, self.ge_bound)
    }

    fn gt_fuel(&self, s: &Term, t: &Term, fuel: usize) -> Option<Proof> {
        let key = (s.clone(), t.clone(), fuel);
        if let Some(r) = self.memo.borrow().get(&key) {
            return r.clone();
        }
        let r = self.gt_uncached(s, t, fuel);
        self.memo.borrow_mut().insert(key, r.clone());
        r
    }

    fn ge_fuel(&self, s: &Term, t: &Term, fuel: usize) -> Option<Proof> {
        if s.alpha_eq(t) {
            return Some(Proof::leaf(Clause::AlphaEq, s, t));
        }
        self.gt_fuel(s, t, fuel)
    }

    fn covers(&self, s: &Term, sargs: &[&Term], u: &Term, fuel: usize) -> Option<Proof> {
        for si in sargs {
            if let Some(p) = self.ge_fuel(si, u, fuel) {
                return Some(p);
            }
        }
        self.gt_fuel(s, u, fuel)
    }

    fn cover_all(&self, s: &Term, sargs: &[&Term], us: &[&Term], fuel: usize) -> Option<Vec<Proof>> {
        us.iter().map(|u| self.covers(s, sargs, u, fuel)).collect()
    }

    fn gt_uncached(&self, s: &Term, t: &Term, fuel: usize) -> Option<Proof> {
        let (Ok(ts), Ok(tt)) = (s.type_of(), t.type_of()) else {
            return None;
        };
        if !ts.same_shape(&tt) {
            return None;
        }
        let (head, sargs) = s.spine();
        if let Term::Sym(f) = head {
            for (i, si) in sargs.iter().enumerate() {
                if let Some(p) = self.ge_fuel(si, t, fuel) {
                    return Some(Proof {
                        clause: Clause::Subterm(i + 1),
                        lhs: s.clone(),
                        rhs: t.clone(),
                        premises: vec![p],
                    });
                }
            }
            let (thead, targs) = t.spine();
            match thead {
                Term::Sym(g) if g.name != f.name => {
                    if self.prec_gt(&f.name, &g.name) {
                        if let Some(ps) = self.cover_all(s, &sargs, &targs, fuel) {
                            return Some(Proof {
                                clause: Clause::Precedence(f.name.to_string(), g.name.to_string()),
                                lhs: s.clone(),
                                rhs: t.clone(),
                                premises: ps,
                            });
                        }
                    }
                }
                Term::Sym(_) => {
                    let status = self.prec.status(&f.name);
                    if let Some(dec) = self.status_gt(status, &sargs, &targs, fuel) {
                        if let Some(cov) = self.cover_all(s, &sargs, &targs, fuel) {
                            let decreasing = dec.len();
                            let mut premises = dec;
                            premises.extend(cov);
                            return Some(Proof {
                                clause: Clause::SameSymbol { status, decreasing },
                                lhs: s.clone(),
                                rhs: t.clone(),
                                premises,
                            });
                        }
                    }
                }
                _ if !targs.is_empty() => {
                    let parts: Vec<&Term> = std::iter::once(thead).chain(targs.iter().copied()).collect();
                    if let Some(ps) = self.cover_all(s, &sargs, &parts, fuel) {
                        return Some(Proof {
                            clause: Clause::Application,
                            lhs: s.clone(),
                            rhs: t.clone(),
                            premises: ps,
                        });
                    }
                }
                _ => {}
            }
        }
        if let (Term::Lam(x, b1), Term::Lam(y, b2)) = (s, t) {
            if x.ty == y.ty {
                let mut avoid = BTreeSet::new();
                s.all_names(&mut avoid);
                t.all_names(&mut avoid);
                let z = fresh_var(x, &avoid);
                let rx: Substitution = [(x.clone(), Term::Var(z.clone()))].into_iter().collect();
                let ry: Substitution = [(y.clone(), Term::Var(z))].into_iter().collect();
                let (l, r) = (rx.apply(b1), ry.apply(b2));
                if let Some(p) = self.gt_fuel(&l, &r, fuel) {
                    return Some(Proof {
                        clause: Clause::Abstraction,
                        lhs: s.clone(),
                        rhs: t.clone(),
                        premises: vec![p],
                    });
                }
            }
        }
        if fuel > 0 {
            for (pos, reduct) in s.beta_steps() {
                if let Some(p) = self.ge_fuel(&reduct, t, fuel - 1) {
                    return Some(Proof {
                        clause: Clause::BetaPrefix(pos),
                        lhs: s.clone(),
                        rhs: t.clone(),
                        premises: vec![p],
                    });
                }
            }
        }
        None
    }

    /// Status comparison of argument lists; returns the strict premises.
    fn status_gt(&self, status: Status, ss: &[&Term], ts: &[&Term], fuel: usize) -> Option<Vec<Proof>> {
        match status {
            Status::Lex => {
                if ss.len() != ts.len() {
                    return None;
                }
                let i = ss.iter().zip(ts).position(|(a, b)| !a.alpha_eq(b))?;
                self.gt_fuel(ss[i], ts[i], fuel).map(|p| vec![p])
            }
            Status::Mul => {
                let (ms, ns) = multiset_difference(ss, ts);
                if ms.is_empty() && ns.is_empty() {
                    return None;
                }
                let mut out = Vec::new();
                for n in ns {
                    let p = ms.iter().find_map(|m| self.gt_fuel(m, n, fuel))?;
                    out.push(p);
                }
                if out.is_empty() && ms.is_empty() {
                    return None;
                }
                Some(out)
            }
        }
    }

    /// `s ≥ t`: `s →β* s'` in at most `ge_bound` steps with `s' =α t` or
    /// `s' > t`.
    pub fn ge(&self, s: &Term, t: &Term) -> Option<Proof> {
        let mut seen: HashMap<Term, (Term, crate::types::Position)> = HashMap::new();
        let mut queue = VecDeque::new();
        queue.push_back((s.clone(), 0usize));
        let mut visited = BTreeSet::new();
        visited.insert(s.canonical());
        while let Some((u, depth)) = queue.pop_front() {
            let fuel = self.ge_bound - depth;
            let found = if u.alpha_eq(t) {
                Some(Proof::leaf(Clause::AlphaEq, &u, t))
            } else {
                self.gt_fuel(&u, t, fuel)
            };
            if let Some(mut proof) = found {
                // wrap the β-path back up to s
                let mut cur = u;
                while let Some((prev, pos)) = seen.get(&cur) {
                    proof = Proof {
                        clause: Clause::Beta(pos.clone()),
                        lhs: prev.clone(),
                        rhs: t.clone(),
                        premises: vec![proof],
                    };
                    cur = prev.clone();
                }
                return Some(proof);
            }
            if depth >= self.ge_bound {
                continue;
            }
            for (pos, next) in u.beta_steps() {
                if visited.len() >= MAX_BETA_STATES {
                    break;
                }
                if visited.insert(next.canonical()) {
                    seen.insert(next.clone(), (u.clone(), pos));
                    queue.push_back((next, depth + 1));
                }
            }
        }
        None
    }
}

impl ReductionPair for Horpo<'_> {
    fn strict(&self, s: &Term, t: &Term) -> Option<Proof> {
        self.gt(s, t)
    }

    fn weak(&self, s: &Term, t: &Term) -> Option<Proof> {
        self.ge(s, t)
    }
}

/// Removes α-equal elements pairwise.
fn multiset_difference<'a>(ss: &[&'a Term], ts: &[&'a Term]) -> (Vec<&'a Term>, Vec<&'a Term>) {
    let mut ms: Vec<&Term> = ss.to_vec();
    let mut ns = Vec::new();
    for t in ts {
        match ms.iter().position(|m| m.alpha_eq(t)) {
            Some(i) => {
                ms.remove(i);
            }
            None => ns.push(*t),
        }
    }
    (ms, ns)
}

fn status_holds(status: Status, ss: &[&Term], ts: &[&Term], prec: &Precedence) -> bool {
    Horpo::new(prec, DEFAULT_GE_BOUND)
        .status_gt(status, ss, ts, DEFAULT_GE_BOUND)
        .is_some()
}

pub fn horpo_gt(s: &Term, t: &Term, prec: &Precedence) -> Option<Proof> {
    Horpo::new(prec, DEFAULT_GE_BOUND).gt(s, t)
}

pub fn pair_ge(s: &Term, t: &Term, prec: &Precedence, ge_bound: usize) -> Option<Proof> {
    Horpo::new(prec, ge_bound).ge(s, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintKind {
    /// `l ≥ r` for a rule.
    Rule,
    /// `l > d` for a dependency pair.
    Dp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub index: usize,
    pub lhs: Term,
    pub rhs: Term,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ConstraintKind::Rule => write!(f, "rule[{}]: {} >= {}", self.index, self.lhs, self.rhs),
            ConstraintKind::Dp => write!(f, "dp[{}]: {} > {}", self.index, self.lhs, self.rhs),
        }
    }
}

pub fn constraints(rules: &[Rule], dps: &[DepPair]) -> Vec<Constraint> {
    let mut out: Vec<Constraint> = rules
        .iter()
        .enumerate()
        .map(|(i, r)| Constraint {
            kind: ConstraintKind::Rule,
            index: i,
            lhs: r.lhs.clone(),
            rhs: r.rhs.clone(),
        })
        .collect();
    out.extend(dps.iter().enumerate().map(|(i, d)| Constraint {
        kind: ConstraintKind::Dp,
        index: i,
        lhs: d.lhs.clone(),
        rhs: d.rhs.clone(),
    }));
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub precedence: Precedence,
    pub rule_witnesses: Vec<Proof>,
    pub dp_witnesses: Vec<Proof>,
}

impl Certificate {
    /// Checks every witness clause by clause and that the witnesses
    /// are about the given rules and pairs.
    pub fn replay(&self, rules: &[Rule], dps: &[DepPair]) -> std::result::Result<(), String> {
        if self.rule_witnesses.len() != rules.len() || self.dp_witnesses.len() != dps.len() {
            return Err("witness count mismatch".into());
        }
        for (r, p) in rules.iter().zip(&self.rule_witnesses) {
            if !p.lhs.alpha_eq(&r.lhs) || !p.rhs.alpha_eq(&r.rhs) {
                return Err(format!("witness is not about rule {r}"));
            }
            p.check(&self.precedence)?;
        }
        for (d, p) in dps.iter().zip(&self.dp_witnesses) {
            if !p.lhs.alpha_eq(&d.lhs) || !p.rhs.alpha_eq(&d.rhs) || !p.is_strict() {
                return Err(format!("witness is not a strict decrease for {} > {}", d.lhs, d.rhs));
            }
            p.check(&self.precedence)?;
        }
        Ok(())
    }
}

/// Checks `R ⊆ ≥` and `DP ⊆ >` for a fixed precedence.
pub fn check_constraints(
    rules: &[Rule],
    dps: &[DepPair],
    prec: &Precedence,
    ge_bound: usize,
) -> std::result::Result<Certificate, Vec<Constraint>> {
    let horpo = Horpo::new(prec, ge_bound);
    check_with(&horpo, rules, dps, prec)
}

fn check_with(
    horpo: &Horpo<'_>,
    rules: &[Rule],
    dps: &[DepPair],
    prec: &Precedence,
) -> std::result::Result<Certificate, Vec<Constraint>> {
    let mut failures = Vec::new();
    let mut rule_witnesses = Vec::new();
    let mut dp_witnesses = Vec::new();
    for c in constraints(rules, dps) {
        let proof = match c.kind {
            ConstraintKind::Rule => horpo.ge(&c.lhs, &c.rhs),
            ConstraintKind::Dp => horpo.gt(&c.lhs, &c.rhs),
        };
        match (proof, c.kind) {
            (Some(p), ConstraintKind::Rule) => rule_witnesses.push(p),
            (Some(p), ConstraintKind::Dp) => dp_witnesses.push(p),
            (None, _) => failures.push(c),
        }
    }
    if failures.is_empty() {
        Ok(Certificate {
            precedence: prec.clone(),
            rule_witnesses,
            dp_witnesses,
        })
    } else {
        Err(failures)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_symbols: usize,
    pub ge_bound: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_symbols: 8,
            ge_bound: DEFAULT_GE_BOUND,
        }
    }
}

/// Symbol names occurring in the constraints, sorted.
pub fn constraint_symbols(rules: &[Rule], dps: &[DepPair]) -> Vec<String> {
    let mut out = BTreeSet::new();
    for c in constraints(rules, dps) {
        for t in [&c.lhs, &c.rhs] {
            for (_, s) in t.subterms() {
                if let Term::Sym(f) = s {
                    out.insert(f.name.to_string());
                }
            }
        }
    }
    out.into_iter().collect()
}

type Queries = BTreeMap<(String, String), bool>;

/// Deterministic search for a certificate.
///
/// Candidates are total precedences over the constraint symbols (a total
/// order decides at least as many comparisons as any partial order it
/// extends), defined symbols above constructors first, each tried with
/// every status assignment of the defined symbols (all `mul` first). Only
/// candidates extending `required` are considered. The certificate keeps
/// just the precedence edges its witnesses use.
pub fn search_precedence(
    rules: &[Rule],
    dps: &[DepPair],
    defined: &BTreeSet<String>,
    required: &Precedence,
    limits: SearchLimits,
) -> Result<Option<Certificate>> {
    let symbols = constraint_symbols(rules, dps);
    if symbols.len() > limits.max_symbols {
        return Err(Error::SearchSpaceExceeded {
            symbols: symbols.len(),
            limit: limits.max_symbols,
        });
    }
    // Neither β-steps nor any clause can introduce a free variable, so such
    // a constraint fails under every precedence.
    if constraints(rules, dps)
        .iter()
        .any(|c| !c.rhs.free_vars().is_subset(&c.lhs.free_vars()))
    {
        return Ok(None);
    }
    let (ds, cs): (Vec<String>, Vec<String>) =
        symbols.iter().cloned().partition(|s| defined.contains(s));

    // (constraint index, precedence queries made while it failed)
    let mut failures: Vec<(usize, Queries)> = Vec::new();
    let mut try_order = |order: &[String]| -> Option<Certificate> {
        let total = Precedence::total(order);
        if required.closure.iter().any(|(a, b)| !total.gt(a, b)) {
            return None;
        }
        for mask in 0..(1usize << ds.len()) {
            let mut prec = total.clone();
            for (i, d) in ds.iter().enumerate() {
                prec.set_status(d, if mask >> i & 1 == 1 { Status::Lex } else { Status::Mul });
            }
            let known_bad = failures.iter().any(|(m, q)| {
                *m == mask && q.iter().all(|((a, b), ans)| prec.gt(a, b) == *ans)
            });
            if known_bad {
                continue;
            }
            let horpo = Horpo::new(&prec, limits.ge_bound);
            match check_with(&horpo, rules, dps, &prec) {
                Ok(cert) => return Some(minimize(cert, rules, dps, limits.ge_bound)),
                Err(_) => failures.push((mask, horpo.queries())),
            }
        }
        None
    };

    let mut tried = BTreeSet::new();
    for pd in permutations(&ds) {
        for pc in permutations(&cs) {
            let order: Vec<String> = pd.iter().chain(&pc).cloned().collect();
            if let Some(c) = try_order(&order) {
                return Ok(Some(c));
            }
            tried.insert(order);
        }
    }
    for order in permutations(&symbols) {
        if tried.contains(&order) {
            continue;
        }
        if let Some(c) = try_order(&order) {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

fn minimize(cert: Certificate, rules: &[Rule], dps: &[DepPair], ge_bound: usize) -> Certificate {
    let mut used = BTreeSet::new();
    for p in cert.rule_witnesses.iter().chain(&cert.dp_witnesses) {
        p.used_edges(&mut used);
    }
    let mut reduced = Precedence::new();
    for (a, b) in &used {
        if reduced.add(a, b).is_err() {
            return cert;
        }
    }
    for (f, s) in cert.precedence.statuses() {
        if *s == Status::Lex {
            reduced.set_status(f, *s);
        }
    }
    match check_constraints(rules, dps, &reduced, ge_bound) {
        Ok(c) if c.rule_witnesses == cert.rule_witnesses && c.dp_witnesses == cert.dp_witnesses => c,
        _ => cert,
    }
}

/// All permutations in lexicographic order of indices.
fn permutations(items: &[String]) -> Vec<Vec<String>> {
    let mut idx: Vec<usize> = (0..items.len()).collect();
    let mut out = vec![idx.iter().map(|&i| items[i].clone()).collect()];
    loop {
        let Some(i) = (1..idx.len()).rev().find(|&i| idx[i - 1] < idx[i]) else {
            return out;
        };
        let j = (i..idx.len()).rev().find(|&j| idx[j] > idx[i - 1]).expect("pivot");
        idx.swap(i - 1, j);
        idx[i..].reverse();
        out.push(idx.iter().map(|&i| items[i].clone()).collect());
    }
}
