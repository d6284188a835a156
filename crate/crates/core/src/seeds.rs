//! Seed terms for the bounded disproof: instances of rule left-hand sides
//! whose variables are replaced by small closed terms built from
//! constructors.

use std::collections::{BTreeMap, HashSet};

use crate::signature::Signature;
use crate::system::RewriteSystem;
use crate::term::{Substitution, Term, Var};
use crate::types::Type;

const MAX_DEPTH: usize = 3;
const PER_TYPE: usize = 6;

/// Small closed terms of each type, smallest first.
pub struct GroundTerms<'s> {
    sig: &'s Signature,
    memo: BTreeMap<(String, usize), Vec<Term>>,
}

impl<'s> GroundTerms<'s> {
    pub fn new(sig: &'s Signature) -> GroundTerms<'s> {
        GroundTerms {
            sig,
            memo: BTreeMap::new(),
        }
    }

    /// Up to a handful of closed terms of type `ty` of depth at most
    /// `depth`, built from constructors and λ-abstraction.
    pub fn of_type(&mut self, ty: &Type, depth: usize) -> Vec<Term> {
        let key = (ty.to_string(), depth);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        // guards against recursion through the same key
        self.memo.insert(key.clone(), Vec::new());
        let mut out = Vec::new();
        if depth > 0 {
            match ty {
                Type::Base(_) => self.constructor_terms(ty, depth, &mut out),
                Type::Arrow(..) => self.abstractions(ty, depth, &mut out),
            }
        }
        out.sort_by_key(|t| t.size());
        let mut seen = HashSet::new();
        out.retain(|t| seen.insert(t.clone()));
        out.truncate(PER_TYPE);
        self.memo.insert(key, out.clone());
        out
    }

    fn constructor_terms(&mut self, ty: &Type, depth: usize, out: &mut Vec<Term>) {
        let ctors: Vec<(String, Type)> = self
            .sig
            .symbols()
            .iter()
            .filter(|(n, t)| !self.sig.is_defined(n) && t.output_sort() == ty.output_sort())
            .map(|(n, t)| (n.clone(), t.clone()))
            .collect();
        for (name, cty) in ctors {
            let (args, _) = cty.flatten();
            let args: Vec<Type> = args.into_iter().cloned().collect();
            let mut choices = Vec::new();
            for a in &args {
                let c = self.of_type(a, depth - 1);
                if c.is_empty() {
                    break;
                }
                choices.push(c);
            }
            if choices.len() < args.len() {
                continue;
            }
            let head = Term::Sym(self.sig.symbol(&name).expect("declared"));
            for combo in product(&choices, PER_TYPE) {
                out.push(Term::apps(head.clone(), combo));
            }
        }
    }

    fn abstractions(&mut self, ty: &Type, depth: usize, out: &mut Vec<Term>) {
        let (args, sort) = ty.flatten();
        let binders: Vec<Var> = args
            .iter()
            .enumerate()
            .map(|(i, a)| Var::new(&format!("x{}", i + 1), (*a).clone()))
            .collect();
        let result = Type::base(sort);
        let mut bodies: Vec<Term> = binders
            .iter()
            .filter(|b| b.ty == result)
            .map(|b| Term::Var(b.clone()))
            .collect();
        bodies.extend(self.of_type(&result, depth - 1));
        for body in bodies {
            let t = binders
                .iter()
                .rev()
                .fold(body, |acc, b| Term::lam(b.clone(), acc));
            out.push(t);
        }
    }
}

/// Cartesian product in mixed-radix order, smallest indices first, at most
/// `cap` tuples.
fn product(choices: &[Vec<Term>], cap: usize) -> Vec<Vec<Term>> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; choices.len()];
    loop {
        if out.len() >= cap {
            break;
        }
        out.push(idx.iter().zip(choices).map(|(&i, c)| c[i].clone()).collect());
        let mut k = 0;
        loop {
            if k == idx.len() {
                return out;
            }
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
    out
}

/// Up to `cap` closed (where possible) instances of the rule left-hand
/// sides, taken round-robin over the rules. Variables of a type with no
/// closed inhabitant stay free.
pub fn seed_terms(system: &RewriteSystem, cap: usize) -> Vec<Term> {
    let mut ground = GroundTerms::new(&system.signature);
    let mut per_rule: Vec<Vec<Term>> = Vec::new();
    for rule in &system.rules {
        let vars: Vec<Var> = rule.lhs.free_vars().into_iter().collect();
        let choices: Vec<Vec<Term>> = vars
            .iter()
            .map(|v| {
                let c = ground.of_type(&v.ty, MAX_DEPTH);
                if c.is_empty() {
                    vec![Term::Var(v.clone())]
                } else {
                    c
                }
            })
            .collect();
        let instances = product(&choices, cap)
            .into_iter()
            .map(|combo| {
                let s: Substitution = vars.iter().cloned().zip(combo).collect();
                s.apply(&rule.lhs)
            })
            .collect();
        per_rule.push(instances);
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let longest = per_rule.iter().map(Vec::len).max().unwrap_or(0);
    'outer: for k in 0..longest {
        for inst in &per_rule {
            if let Some(t) = inst.get(k) {
                if seen.insert(t.clone()) {
                    out.push(t.clone());
                    if out.len() >= cap {
                        break 'outer;
                    }
                }
            }
        }
    }
    out
}
