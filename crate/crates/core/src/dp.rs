//! Full application positions, levels and dependency pairs.
//!
//! A spine headed by a defined symbol is consumed as a whole, whatever the
//! number of arguments: `f t1 ... tn` with `f ∈ D` contributes the root and
//! the positions `1^(n-i) 2 · fap(ti)`. Dependency pairs keep the original
//! symbols (no marked tuple symbols).

use std::collections::BTreeSet;

use crate::error::Result;
use crate::signature::Signature;
use crate::system::{RewriteSystem, Rule};
use crate::term::{Term, Var};
use crate::types::{Position, Type};

pub fn fap(t: &Term, sig: &Signature) -> BTreeSet<Position> {
    let mut out = BTreeSet::new();
    collect_fap(t, sig, &mut Position::root(), &mut out);
    out
}

fn collect_fap(t: &Term, sig: &Signature, pos: &mut Position, out: &mut BTreeSet<Position>) {
    if let (Term::Sym(f), args) = t.spine() {
        if sig.is_defined(&f.name) {
            out.insert(pos.clone());
            let n = args.len();
            for (i, a) in args.iter().enumerate() {
                // argument i+1 sits at 1^(n-i-1) 2
                let depth = n - i - 1;
                for _ in 0..depth {
                    pos.push(1);
                }
                pos.push(2);
                collect_fap(a, sig, pos, out);
                for _ in 0..=depth {
                    pos.pop();
                }
            }
            return;
        }
    }
    match t {
        Term::Var(_) | Term::Sym(_) => {}
        Term::Lam(_, b) => {
            pos.push(1);
            collect_fap(b, sig, pos, out);
            pos.pop();
        }
        Term::App(f, a) => {
            pos.push(1);
            collect_fap(f, sig, pos, out);
            pos.pop();
            pos.push(2);
            collect_fap(a, sig, pos, out);
            pos.pop();
        }
    }
}

pub fn level(t: &Term, sig: &Signature) -> usize {
    if let (Term::Sym(f), args) = t.spine() {
        if sig.is_defined(&f.name) {
            return 1 + args.iter().map(|a| level(a, sig)).max().unwrap_or(0);
        }
    }
    match t {
        Term::Var(_) | Term::Sym(_) => 0,
        Term::Lam(_, b) => level(b, sig),
        Term::App(f, a) => level(f, sig).max(level(a, sig)),
    }
}

/// Outcome of the free-variable and type side condition on `r|p`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StarCheck {
    /// Variables free in `r|p` but bound in `r`.
    pub free_bound: Vec<Var>,
    /// `(got, want)` when `r|p` does not have the type of the lhs.
    pub type_mismatch: Option<(Type, Type)>,
}

impl StarCheck {
    pub fn passed(&self) -> bool {
        self.free_bound.is_empty() && self.type_mismatch.is_none()
    }

    pub fn describe(&self) -> String {
        if self.passed() {
            return "PASS".to_string();
        }
        let mut parts = Vec::new();
        if !self.free_bound.is_empty() {
            let vs: Vec<String> = self.free_bound.iter().map(|v| v.name.to_string()).collect();
            parts.push(format!("FreeBoundVariable{{{}}}", vs.join(", ")));
        }
        if let Some((got, want)) = &self.type_mismatch {
            parts.push(format!("TypeMismatch{{got: {got}, want: {want}}}"));
        }
        format!("FAIL({})", parts.join(", "))
    }
}

pub fn check_star_condition(rule: &Rule, p: &Position) -> Result<StarCheck> {
    let sub = rule.rhs.subterm_at(p)?;
    let fv_r = rule.rhs.free_vars();
    let free_bound = sub
        .free_vars()
        .into_iter()
        .filter(|v| !fv_r.contains(v))
        .collect();
    let got = sub.type_of()?;
    let want = rule.lhs.type_of()?;
    Ok(StarCheck {
        free_bound,
        type_mismatch: (got != want).then_some((got, want)),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepPair {
    pub lhs: Term,
    pub rhs: Term,
    pub rule: usize,
    pub position: Position,
    pub star: StarCheck,
}

/// One pair per rule and full application position of its right-hand
/// side, in rule order then position order.
pub fn extract_dps(system: &RewriteSystem) -> Result<Vec<DepPair>> {
    let sig = &system.signature;
    let mut out = Vec::new();
    for (i, rule) in system.rules.iter().enumerate() {
        rule.head()?;
        for p in fap(&rule.rhs, sig) {
            let rhs = rule.rhs.subterm_at(&p)?.clone();
            let star = check_star_condition(rule, &p)?;
            out.push(DepPair {
                lhs: rule.lhs.clone(),
                rhs,
                rule: i,
                position: p,
                star,
            });
        }
    }
    Ok(out)
}
