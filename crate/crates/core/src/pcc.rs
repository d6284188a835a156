//! Pattern Computability Closure and rule admissibility.
//!
//! The closure of a tuple of left-hand-side arguments is the least set
//! containing every argument and closed under four destructors: accessible
//! arguments of a symbol application (`acc`), bodies of abstractions
//! (`lam`), functions applied to a fresh variable (`app-left`), and
//! arguments of a fresh variable of type `U -> T1 -> ... -> Tk -> U`
//! (`app-right`). A rule is admissible when every free variable of its
//! right-hand side belongs to the closure of its left-hand-side arguments.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::signature::Signature;
use crate::system::Rule;
use crate::term::{fresh_var, CanonTerm, Name, Substitution, Term, Var};
use crate::types::Type;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PccRule {
    Arg,
    Acc,
    Lam,
    AppLeft,
    AppRight,
}

impl fmt::Display for PccRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PccRule::Arg => "arg",
            PccRule::Acc => "acc",
            PccRule::Lam => "lam",
            PccRule::AppLeft => "app-left",
            PccRule::AppRight => "app-right",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SideData {
    /// 1-based argument index.
    Arg(usize),
    /// Symbol and 1-based accessible index.
    Acc { symbol: Name, index: usize },
    /// The binder, after renaming away from the arguments' free variables.
    Lam(Var),
    AppLeft(Var),
    AppRight(Var),
}

impl fmt::Display for SideData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SideData::Arg(i) => write!(f, "{i}"),
            SideData::Acc { symbol, index } => write!(f, "{symbol}.{index}"),
            SideData::Lam(y) | SideData::AppLeft(y) | SideData::AppRight(y) => {
                write!(f, "{}:{}", y.name, y.ty)
            }
        }
    }
}

/// One inference of the closure; `premise` is the closure member it
/// destructs (absent for `arg`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PccDerivation {
    pub conclusion: Term,
    pub rule: PccRule,
    pub side: SideData,
    pub premise: Option<Box<PccDerivation>>,
}

impl PccDerivation {
    fn rule(&self) -> PccRule {
        self.rule
    }

    /// Inferences from the root `arg` up to this conclusion.
    pub fn chain(&self) -> Vec<&PccDerivation> {
        let mut out = vec![self];
        let mut cur = self;
        while let Some(p) = &cur.premise {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }

    /// Compact trace such as `arg 2; acc cons.1`.
    pub fn trace(&self) -> String {
        self.chain()
            .iter()
            .map(|d| format!("{} {}", d.rule(), d.side))
            .collect::<Vec<_>>()
            .join("; ")
    }

    pub fn to_report(&self) -> DerivationReport {
        DerivationReport {
            conclusion: self.conclusion.to_string(),
            rule: self.rule,
            side: self.side.to_string(),
            premises: self
                .premise
                .iter()
                .map(|p| p.to_report())
                .collect(),
        }
    }

    /// Re-checks every side condition of the derivation against `args`.
    pub fn replay(&self, args: &[Term], sig: &Signature) -> std::result::Result<(), String> {
        let fv_args = free_vars_all(args);
        let premise = || {
            self.premise
                .as_deref()
                .ok_or_else(|| format!("{} inference without premise", self.rule))
        };
        match (&self.side, self.rule) {
            (SideData::Arg(i), PccRule::Arg) => {
                if self.premise.is_some() {
                    return Err("arg inference has a premise".into());
                }
                let arg = args
                    .get(i.wrapping_sub(1))
                    .ok_or_else(|| format!("arg index {i} out of range"))?;
                if !arg.alpha_eq(&self.conclusion) {
                    return Err(format!("arg {i} is {arg}, not {}", self.conclusion));
                }
                Ok(())
            }
            (SideData::Acc { symbol, index }, PccRule::Acc) => {
                let p = premise()?;
                p.replay(args, sig)?;
                let (head, sub) = p.conclusion.spine();
                let Term::Sym(g) = head else {
                    return Err(format!("acc premise {} is not headed by a symbol", p.conclusion));
                };
                if g.name != *symbol {
                    return Err(format!("acc premise head is {}, not {symbol}", g.name));
                }
                if !sig.accessible_args(&g.name).contains(index) {
                    return Err(format!("{index} is not accessible for {symbol}"));
                }
                match sub.get(index - 1) {
                    Some(u) if u.alpha_eq(&self.conclusion) => Ok(()),
                    _ => Err(format!("acc {symbol}.{index} does not yield {}", self.conclusion)),
                }
            }
            (SideData::Lam(y), PccRule::Lam) => {
                let p = premise()?;
                p.replay(args, sig)?;
                let Term::Lam(x, body) = &p.conclusion else {
                    return Err(format!("lam premise {} is not an abstraction", p.conclusion));
                };
                if fv_args.contains(y) {
                    return Err(format!("{} is free in the arguments", y.name));
                }
                if y != x && p.conclusion.has_free(y) {
                    return Err(format!("{} is free in {}", y.name, p.conclusion));
                }
                let renamed: Substitution = [(x.clone(), Term::Var(y.clone()))].into_iter().collect();
                if renamed.apply(body).alpha_eq(&self.conclusion) {
                    Ok(())
                } else {
                    Err(format!("lam does not yield {}", self.conclusion))
                }
            }
            (SideData::AppLeft(y), PccRule::AppLeft) => {
                let p = premise()?;
                p.replay(args, sig)?;
                let Term::App(u, a) = &p.conclusion else {
                    return Err(format!("app-left premise {} is not an application", p.conclusion));
                };
                if a.as_var() != Some(y) {
                    return Err(format!("app-left argument is not the variable {}", y.name));
                }
                if fv_args.contains(y) || u.has_free(y) {
                    return Err(format!("{} is not fresh", y.name));
                }
                if u.alpha_eq(&self.conclusion) {
                    Ok(())
                } else {
                    Err(format!("app-left does not yield {}", self.conclusion))
                }
            }
            (SideData::AppRight(y), PccRule::AppRight) => {
                let p = premise()?;
                p.replay(args, sig)?;
                let Term::App(h, u) = &p.conclusion else {
                    return Err(format!("app-right premise {} is not an application", p.conclusion));
                };
                if h.as_var() != Some(y) {
                    return Err(format!("app-right head is not the variable {}", y.name));
                }
                if fv_args.contains(y) || u.has_free(y) {
                    return Err(format!("{} is not fresh", y.name));
                }
                let ut = u.type_of().map_err(|e| e.to_string())?;
                if !app_right_shape(&y.ty, &ut) {
                    return Err(format!("{} : {} does not have shape U -> ... -> U", y.name, y.ty));
                }
                if u.alpha_eq(&self.conclusion) {
                    Ok(())
                } else {
                    Err(format!("app-right does not yield {}", self.conclusion))
                }
            }
            (side, rule) => Err(format!("side data {side} does not fit rule {rule}")),
        }
    }
}

/// `ty = U -> T1 -> ... -> Tk -> U` for some `k >= 0`.
fn app_right_shape(ty: &Type, u: &Type) -> bool {
    let Type::Arrow(d, rest) = ty else {
        return false;
    };
    if **d != *u {
        return false;
    }
    let mut cur: &Type = rest;
    loop {
        if cur == u {
            return true;
        }
        match cur {
            Type::Arrow(_, c) => cur = c,
            Type::Base(_) => return false,
        }
    }
}

fn free_vars_all(args: &[Term]) -> BTreeSet<Var> {
    args.iter().flat_map(Term::free_vars).collect()
}

/// The closure of a tuple of arguments, each member with one derivation.
#[derive(Debug, Clone)]
pub struct PccClosure {
    args: Vec<Term>,
    members: Vec<PccDerivation>,
    index: BTreeMap<CanonTerm, usize>,
}

impl PccClosure {
    pub fn args(&self) -> &[Term] {
        &self.args
    }

    pub fn members(&self) -> &[PccDerivation] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.index.contains_key(&t.canonical())
    }

    pub fn derivation_of(&self, t: &Term) -> Option<&PccDerivation> {
        self.index.get(&t.canonical()).map(|&i| &self.members[i])
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.members.iter().map(|d| &d.conclusion)
    }
}

/// Computes the closure of `args` to a fixpoint.
///
/// Every inference except `arg` strips a node off its premise, so the
/// closure is finite and each member is no larger than some argument.
pub fn pcc_closure(args: &[Term], sig: &Signature) -> PccClosure {
    let fv_args = free_vars_all(args);
    let mut names = BTreeSet::new();
    for a in args {
        a.all_names(&mut names);
    }
    let mut closure = PccClosure {
        args: args.to_vec(),
        members: Vec::new(),
        index: BTreeMap::new(),
    };
    let mut queue = VecDeque::new();
    for (i, a) in args.iter().enumerate() {
        queue.push_back(PccDerivation {
            conclusion: a.clone(),
            rule: PccRule::Arg,
            side: SideData::Arg(i + 1),
            premise: None,
        });
    }
    while let Some(d) = queue.pop_front() {
        let key = d.conclusion.canonical();
        if closure.index.contains_key(&key) {
            continue;
        }
        for next in destruct(&d, &fv_args, &names, sig) {
            queue.push_back(next);
        }
        closure.index.insert(key, closure.members.len());
        closure.members.push(d);
    }
    closure
}

fn destruct(
    d: &PccDerivation,
    fv_args: &BTreeSet<Var>,
    names: &BTreeSet<Name>,
    sig: &Signature,
) -> Vec<PccDerivation> {
    let mut out = Vec::new();
    let t = &d.conclusion;
    let wrap = |conclusion: Term, rule: PccRule, side: SideData| PccDerivation {
        conclusion,
        rule,
        side,
        premise: Some(Box::new(d.clone())),
    };

    if let (Term::Sym(g), sub) = t.spine() {
        for i in sig.accessible_args(&g.name) {
            if let Some(u) = sub.get(i - 1) {
                out.push(wrap(
                    (*u).clone(),
                    PccRule::Acc,
                    SideData::Acc {
                        symbol: g.name.clone(),
                        index: i,
                    },
                ));
            }
        }
    }

    match t {
        Term::Lam(y, body) => {
            if fv_args.contains(y) {
                let mut avoid = names.clone();
                t.all_names(&mut avoid);
                let y2 = fresh_var(y, &avoid);
                let s: Substitution = [(y.clone(), Term::Var(y2.clone()))].into_iter().collect();
                out.push(wrap(s.apply(body), PccRule::Lam, SideData::Lam(y2)));
            } else {
                out.push(wrap((**body).clone(), PccRule::Lam, SideData::Lam(y.clone())));
            }
        }
        Term::App(u, a) => {
            if let Term::Var(y) = a.as_ref() {
                if !fv_args.contains(y) && !u.has_free(y) {
                    out.push(wrap((**u).clone(), PccRule::AppLeft, SideData::AppLeft(y.clone())));
                }
            }
            if let Term::Var(y) = u.as_ref() {
                if !fv_args.contains(y) && !a.has_free(y) && app_right_shape(&y.ty, &a.ty()) {
                    out.push(wrap((**a).clone(), PccRule::AppRight, SideData::AppRight(y.clone())));
                }
            }
        }
        Term::Var(_) | Term::Sym(_) => {}
    }
    out
}

/// Admissibility verdict for one variable of the right-hand side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarWitness {
    pub var: Var,
    pub derivation: Option<PccDerivation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Admissibility {
    pub admissible: bool,
    pub witnesses: Vec<VarWitness>,
}

impl Admissibility {
    pub fn underivable(&self) -> impl Iterator<Item = &Var> {
        self.witnesses
            .iter()
            .filter(|w| w.derivation.is_none())
            .map(|w| &w.var)
    }
}

pub fn is_admissible(rule: &Rule, sig: &Signature) -> Result<Admissibility> {
    let (_, args) = rule.head()?;
    let args: Vec<Term> = args.into_iter().cloned().collect();
    let closure = pcc_closure(&args, sig);
    let witnesses: Vec<VarWitness> = rule
        .rhs
        .free_vars()
        .into_iter()
        .map(|v| {
            let derivation = closure.derivation_of(&Term::Var(v.clone())).cloned();
            VarWitness { var: v, derivation }
        })
        .collect();
    Ok(Admissibility {
        admissible: witnesses.iter().all(|w| w.derivation.is_some()),
        witnesses,
    })
}

/// Serializable view of a derivation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationReport {
    pub conclusion: String,
    pub rule: PccRule,
    pub side: String,
    pub premises: Vec<DerivationReport>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n() -> Type {
        Type::base("N")
    }
    fn l() -> Type {
        Type::base("L")
    }
    fn nn() -> Type {
        Type::arrow(n(), n())
    }

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.add_sort("N");
        s.add_sort("L");
        for (name, ty) in [
            ("0", n()),
            ("s", nn()),
            ("nil", l()),
            ("cons", Type::arrows([n(), l()], l())),
            ("map", Type::arrows([nn(), l()], l())),
            ("lim", Type::arrow(nn(), n())),
            ("plus", Type::arrows([n(), n()], n())),
        ] {
            s.declare(name, ty).unwrap();
        }
        s
    }

    fn sym(s: &Signature, name: &str) -> Term {
        Term::Sym(s.symbol(name).unwrap())
    }

    #[test]
    fn closure_of_map_arguments() {
        let s = sig();
        let f = Term::var("F", nn());
        let x = Term::var("X", n());
        let ll = Term::var("L", l());
        let args = vec![f.clone(), Term::apps(sym(&s, "cons"), [x.clone(), ll.clone()])];
        let c = pcc_closure(&args, &s);
        for t in [&f, &args[1], &x, &ll] {
            assert!(c.contains(t), "missing {t}");
        }
        assert_eq!(c.derivation_of(&x).unwrap().trace(), "arg 2; acc cons.1");
        for d in c.members() {
            d.replay(&args, &s).unwrap();
        }
    }

    #[test]
    fn closure_of_single_variable() {
        let s = sig();
        let x = Term::var("X", n());
        let c = pcc_closure(std::slice::from_ref(&x), &s);
        assert_eq!(c.len(), 1);
        assert!(c.contains(&x));
    }

    #[test]
    fn lim_is_not_destructed() {
        let s = sig();
        let f = Term::var("F", nn());
        let x = Term::var("X", n());
        let args = vec![Term::app(sym(&s, "lim"), f.clone()), x.clone()];
        let c = pcc_closure(&args, &s);
        assert_eq!(c.len(), 2);
        assert!(!c.contains(&f));
    }

    #[test]
    fn lam_then_app_left() {
        let s = sig();
        let f = Var::new("F", nn());
        let y = Var::new("y", n());
        let body = Term::app(Term::Var(f.clone()), Term::Var(y.clone()));
        let arg = Term::lam(y, body.clone());
        let c = pcc_closure(std::slice::from_ref(&arg), &s);
        assert!(c.contains(&arg));
        assert!(c.contains(&body));
        assert!(c.contains(&Term::Var(f.clone())));
        let d = c.derivation_of(&Term::Var(f)).unwrap();
        assert_eq!(d.chain().iter().map(|d| d.rule).collect::<Vec<_>>(), [PccRule::Arg, PccRule::Lam, PccRule::AppLeft]);
        d.replay(&[arg], &s).unwrap();
    }

    #[test]
    fn lam_then_app_right() {
        let s = sig();
        let y = Var::new("y", nn());
        let x = Term::var("X", n());
        let arg = Term::lam(y.clone(), Term::app(Term::Var(y), x.clone()));
        let c = pcc_closure(std::slice::from_ref(&arg), &s);
        let d = c.derivation_of(&x).expect("X derivable");
        assert_eq!(d.rule, PccRule::AppRight);
        d.replay(&[arg], &s).unwrap();
    }

    #[test]
    fn app_right_type_shape() {
        assert!(app_right_shape(&nn(), &n()));
        assert!(app_right_shape(&Type::arrows([n(), l()], n()), &n()));
        assert!(!app_right_shape(&Type::arrow(n(), l()), &n()));
        assert!(!app_right_shape(&n(), &n()));
    }

    #[test]
    fn lam_renames_binder_clashing_with_arguments() {
        let s = sig();
        let y = Var::new("y", n());
        let pair = Term::apps(sym(&s, "plus"), [Term::Var(y.clone()), Term::Var(y.clone())]);
        // args (y, λy. plus y y): the binder clashes with the free y
        let arg2 = Term::lam(y.clone(), pair);
        let args = vec![Term::Var(y.clone()), arg2];
        let c = pcc_closure(&args, &s);
        let body = c
            .members()
            .iter()
            .find(|d| d.rule == PccRule::Lam)
            .unwrap();
        assert!(!body.conclusion.has_free(&y));
        body.replay(&args, &s).unwrap();
    }

    #[test]
    fn admissibility_examples() {
        let s = sig();
        let f = Term::var("F", nn());
        let x = Term::var("X", n());
        let ll = Term::var("L", l());
        let lhs = Term::apps(
            sym(&s, "map"),
            [f.clone(), Term::apps(sym(&s, "cons"), [x.clone(), ll.clone()])],
        );
        let rhs = Term::apps(
            sym(&s, "cons"),
            [Term::app(f.clone(), x.clone()), Term::apps(sym(&s, "map"), [f.clone(), ll])],
        );
        let a = is_admissible(&Rule::new(lhs, rhs), &s).unwrap();
        assert!(a.admissible);
        let traces: Vec<String> = a
            .witnesses
            .iter()
            .map(|w| format!("{}:{}", w.var, w.derivation.as_ref().unwrap().trace()))
            .collect();
        assert_eq!(traces, ["F:arg 1", "L:arg 2; acc cons.2", "X:arg 2; acc cons.1"]);

        let nvar = Var::new("n", n());
        let lhs = Term::apps(sym(&s, "plus"), [Term::app(sym(&s, "lim"), f.clone()), x.clone()]);
        let rhs = Term::app(
            sym(&s, "lim"),
            Term::lam(
                nvar.clone(),
                Term::apps(sym(&s, "plus"), [Term::app(f, Term::Var(nvar)), x]),
            ),
        );
        let a = is_admissible(&Rule::new(lhs, rhs), &s).unwrap();
        assert!(!a.admissible);
        let bad: Vec<String> = a.underivable().map(|v| v.to_string()).collect();
        assert_eq!(bad, ["F"]);

        let a_rule = Rule::new(sym(&s, "0"), sym(&s, "0"));
        assert!(is_admissible(&a_rule, &s).unwrap().admissible);
    }
}
