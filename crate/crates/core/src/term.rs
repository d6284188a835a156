//! Simply typed λ-terms over a signature.
//!
//! Variables and symbols carry their types, so [`Term::type_of`] is a
//! checker rather than an inference engine. Equality and hashing on
//! [`Term`] are modulo α: bound names never matter.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::types::{Position, Type};

pub type Name = Arc<str>;

/// A variable, identified by name and type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: Name,
    pub ty: Type,
}

impl Var {
    pub fn new(name: &str, ty: Type) -> Var {
        Var {
            name: Arc::from(name),
            ty,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    pub name: Name,
    pub ty: Type,
}

impl Symbol {
    pub fn new(name: &str, ty: Type) -> Symbol {
        Symbol {
            name: Arc::from(name),
            ty,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Term {
    Var(Var),
    Sym(Symbol),
    App(Arc<Term>, Arc<Term>),
    Lam(Var, Arc<Term>),
}

/// De Bruijn form of a term; two terms are α-equivalent iff their
/// canonical forms are equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CanonTerm {
    Free(Var),
    Bound(u32),
    Sym(Name),
    App(Box<CanonTerm>, Box<CanonTerm>),
    Lam(Type, Box<CanonTerm>),
}

impl Term {
    pub fn var(name: &str, ty: Type) -> Term {
        Term::Var(Var::new(name, ty))
    }

    pub fn sym(name: &str, ty: Type) -> Term {
        Term::Sym(Symbol::new(name, ty))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Arc::new(fun), Arc::new(arg))
    }

    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn lam(x: Var, body: Term) -> Term {
        Term::Lam(x, Arc::new(body))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    /// Splits a term into its application spine `h a1 ... an`.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(f, a) = cur {
            args.push(a.as_ref());
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    /// Head symbol of the application spine, if any.
    pub fn head_symbol(&self) -> Option<&Symbol> {
        match self.spine().0 {
            Term::Sym(s) => Some(s),
            _ => None,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Sym(_) => 1,
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Lam(_, b) => 1 + b.size(),
        }
    }

    pub fn type_of(&self) -> Result<Type> {
        let mut pos = Position::root();
        self.type_at(&mut pos)
    }

    fn type_at(&self, pos: &mut Position) -> Result<Type> {
        match self {
            Term::Var(v) => Ok(v.ty.clone()),
            Term::Sym(s) => Ok(s.ty.clone()),
            Term::App(f, a) => {
                pos.push(1);
                let tf = f.type_at(pos)?;
                pos.pop();
                pos.push(2);
                let ta = a.type_at(pos)?;
                pos.pop();
                match tf {
                    Type::Arrow(d, c) if *d == ta => Ok(*c),
                    Type::Arrow(d, _) => Err(Error::type_error(
                        pos.clone(),
                        format!("argument has type {ta}, expected {d}"),
                    )),
                    Type::Base(b) => Err(Error::type_error(
                        pos.clone(),
                        format!("term of base type {b} applied to an argument"),
                    )),
                }
            }
            Term::Lam(x, b) => {
                pos.push(1);
                let tb = b.type_at(pos)?;
                pos.pop();
                Ok(Type::arrow(x.ty.clone(), tb))
            }
        }
    }

    /// Type of a term already known to be well-typed.
    pub(crate) fn ty(&self) -> Type {
        match self {
            Term::Var(v) => v.ty.clone(),
            Term::Sym(s) => s.ty.clone(),
            Term::App(f, _) => match f.ty() {
                Type::Arrow(_, c) => *c,
                Type::Base(_) => panic!("ill-typed application"),
            },
            Term::Lam(x, b) => Type::arrow(x.ty.clone(), b.ty()),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a Var>, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                if !bound.contains(&v) {
                    out.insert(v.clone());
                }
            }
            Term::Sym(_) => {}
            Term::App(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
            Term::Lam(x, b) => {
                bound.push(x);
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn has_free(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Sym(_) => false,
            Term::App(f, a) => f.has_free(v) || a.has_free(v),
            Term::Lam(x, b) => x != v && b.has_free(v),
        }
    }

    /// Every variable name occurring in the term, free or bound.
    pub fn all_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(v) => {
                out.insert(v.name.clone());
            }
            Term::Sym(_) => {}
            Term::App(f, a) => {
                f.all_names(out);
                a.all_names(out);
            }
            Term::Lam(x, b) => {
                out.insert(x.name.clone());
                b.all_names(out);
            }
        }
    }

    pub fn canonical(&self) -> CanonTerm {
        let mut env = Vec::new();
        self.canon(&mut env)
    }

    fn canon<'a>(&'a self, env: &mut Vec<&'a Var>) -> CanonTerm {
        match self {
            Term::Var(v) => match env.iter().rev().position(|b| *b == v) {
                Some(i) => CanonTerm::Bound(i as u32),
                None => CanonTerm::Free(v.clone()),
            },
            Term::Sym(s) => CanonTerm::Sym(s.name.clone()),
            Term::App(f, a) => {
                CanonTerm::App(Box::new(f.canon(env)), Box::new(a.canon(env)))
            }
            Term::Lam(x, b) => {
                env.push(x);
                let body = b.canon(env);
                env.pop();
                CanonTerm::Lam(x.ty.clone(), Box::new(body))
            }
        }
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        let mut e1 = Vec::new();
        let mut e2 = Vec::new();
        alpha_eq_in(self, other, &mut e1, &mut e2)
    }

    pub fn subterm_at(&self, p: &Position) -> Result<&Term> {
        let mut cur = self;
        for &d in p.digits() {
            cur = match (cur, d) {
                (Term::App(f, _), 1) => f,
                (Term::App(_, a), 2) => a,
                (Term::Lam(_, b), 1) => b,
                _ => return Err(Error::InvalidPosition(p.clone())),
            };
        }
        Ok(cur)
    }

    pub fn replace_at(&self, p: &Position, u: Term) -> Result<Term> {
        fn go(t: &Term, digits: &[u8], u: Term, p: &Position) -> Result<Term> {
            let Some((&d, rest)) = digits.split_first() else {
                return Ok(u);
            };
            match (t, d) {
                (Term::App(f, a), 1) => Ok(Term::App(Arc::new(go(f, rest, u, p)?), a.clone())),
                (Term::App(f, a), 2) => Ok(Term::App(f.clone(), Arc::new(go(a, rest, u, p)?))),
                (Term::Lam(x, b), 1) => Ok(Term::Lam(x.clone(), Arc::new(go(b, rest, u, p)?))),
                _ => Err(Error::InvalidPosition(p.clone())),
            }
        }
        go(self, p.digits(), u, p)
    }

    /// All subterms with their positions, in pre-order (which is the
    /// lexicographic order on positions).
    pub fn subterms(&self) -> Vec<(Position, &Term)> {
        let mut out = Vec::new();
        let mut pos = Position::root();
        fn go<'a>(t: &'a Term, pos: &mut Position, out: &mut Vec<(Position, &'a Term)>) {
            out.push((pos.clone(), t));
            match t {
                Term::App(f, a) => {
                    pos.push(1);
                    go(f, pos, out);
                    pos.pop();
                    pos.push(2);
                    go(a, pos, out);
                    pos.pop();
                }
                Term::Lam(_, b) => {
                    pos.push(1);
                    go(b, pos, out);
                    pos.pop();
                }
                Term::Var(_) | Term::Sym(_) => {}
            }
        }
        go(self, &mut pos, &mut out);
        out
    }

    /// Contracts the term if it is a β-redex `(λx.u) v`.
    pub fn contract_beta(&self) -> Option<Term> {
        match self {
            Term::App(f, a) => match f.as_ref() {
                Term::Lam(x, body) => {
                    let mut s = Substitution::new();
                    s.insert(x.clone(), a.as_ref().clone());
                    Some(s.apply(body))
                }
                _ => None,
            },
            _ => None,
        }
    }

    pub fn is_beta_redex(&self) -> bool {
        matches!(self, Term::App(f, _) if matches!(f.as_ref(), Term::Lam(..)))
    }

    /// All single β-steps, ordered by redex position.
    pub fn beta_steps(&self) -> Vec<(Position, Term)> {
        self.subterms()
            .into_iter()
            .filter_map(|(p, s)| {
                let c = s.contract_beta()?;
                let t = self.replace_at(&p, c).expect("position from subterms()");
                Some((p, t))
            })
            .collect()
    }

    pub fn is_beta_normal(&self) -> bool {
        match self {
            Term::Var(_) | Term::Sym(_) => true,
            Term::App(f, a) => {
                !matches!(f.as_ref(), Term::Lam(..)) && f.is_beta_normal() && a.is_beta_normal()
            }
            Term::Lam(_, b) => b.is_beta_normal(),
        }
    }

    /// Renders the term with type annotations on every binder.
    pub fn display_typed(&self) -> String {
        let mut s = String::new();
        write_term(self, &mut s, true);
        s
    }
}

fn alpha_eq_in<'a>(
    t: &'a Term,
    u: &'a Term,
    e1: &mut Vec<&'a Var>,
    e2: &mut Vec<&'a Var>,
) -> bool {
    match (t, u) {
        (Term::Var(x), Term::Var(y)) => {
            let ix = e1.iter().rev().position(|b| *b == x);
            let iy = e2.iter().rev().position(|b| *b == y);
            match (ix, iy) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (Term::Sym(f), Term::Sym(g)) => f.name == g.name,
        (Term::App(f1, a1), Term::App(f2, a2)) => {
            alpha_eq_in(f1, f2, e1, e2) && alpha_eq_in(a1, a2, e1, e2)
        }
        (Term::Lam(x, b1), Term::Lam(y, b2)) => {
            if x.ty != y.ty {
                return false;
            }
            e1.push(x);
            e2.push(y);
            let r = alpha_eq_in(b1, b2, e1, e2);
            e1.pop();
            e2.pop();
            r
        }
        _ => false,
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        self.alpha_eq(other)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical().hash(state);
    }
}

fn needs_parens_as_arg(t: &Term) -> bool {
    matches!(t, Term::App(..) | Term::Lam(..))
}

fn write_term(t: &Term, out: &mut String, typed: bool) {
    match t {
        Term::Var(v) => out.push_str(&v.name),
        Term::Sym(s) => out.push_str(&s.name),
        Term::App(f, a) => {
            if matches!(f.as_ref(), Term::Lam(..)) {
                out.push('(');
                write_term(f, out, typed);
                out.push(')');
            } else {
                write_term(f, out, typed);
            }
            out.push(' ');
            if needs_parens_as_arg(a) {
                out.push('(');
                write_term(a, out, typed);
                out.push(')');
            } else {
                write_term(a, out, typed);
            }
        }
        Term::Lam(x, b) => {
            out.push('\\');
            out.push_str(&x.name);
            if typed {
                out.push(':');
                if x.ty.is_base() {
                    out.push_str(&x.ty.to_string());
                } else {
                    out.push('(');
                    out.push_str(&x.ty.to_string());
                    out.push(')');
                }
            }
            out.push_str(". ");
            write_term(b, out, typed);
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(self, &mut s, false);
        f.write_str(&s)
    }
}

/// A finite, type-preserving map from variables to terms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution(BTreeMap<Var, Term>);

impl Substitution {
    pub fn new() -> Substitution {
        Substitution(BTreeMap::new())
    }

    pub fn insert(&mut self, x: Var, t: Term) -> Option<Term> {
        self.0.insert(x, t)
    }

    pub fn get(&self, x: &Var) -> Option<&Term> {
        self.0.get(x)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.0.keys()
    }

    /// Checks that every image has the type of its variable.
    pub fn is_type_preserving(&self) -> bool {
        self.0
            .iter()
            .all(|(x, t)| t.type_of().map(|ty| ty == x.ty).unwrap_or(false))
    }

    /// Simultaneous capture-avoiding substitution. No β-reduction happens.
    pub fn apply(&self, t: &Term) -> Term {
        if self.0.is_empty() {
            return t.clone();
        }
        let map: BTreeMap<&Var, Term> = self.0.iter().map(|(k, v)| (k, v.clone())).collect();
        subst(t, &map)
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (x, t)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x} ↦ {t}")?;
        }
        write!(f, "}}")
    }
}

fn subst(t: &Term, map: &BTreeMap<&Var, Term>) -> Term {
    match t {
        Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Sym(_) => t.clone(),
        Term::App(f, a) => Term::App(Arc::new(subst(f, map)), Arc::new(subst(a, map))),
        Term::Lam(x, body) => {
            let mut inner: BTreeMap<&Var, Term> = map
                .iter()
                .filter(|(k, _)| **k != x && body.has_free(k))
                .map(|(k, v)| (*k, v.clone()))
                .collect();
            if inner.is_empty() {
                return t.clone();
            }
            let captures = inner.values().any(|img| img.has_free(x));
            if !captures {
                return Term::Lam(x.clone(), Arc::new(subst(body, &inner)));
            }
            let mut avoid = BTreeSet::new();
            body.all_names(&mut avoid);
            for img in inner.values() {
                img.all_names(&mut avoid);
            }
            let fresh = fresh_var(x, &avoid);
            inner.insert(x, Term::Var(fresh.clone()));
            Term::Lam(fresh, Arc::new(subst(body, &inner)))
        }
    }
}

/// A variable with `x`'s type whose name is not in `avoid`.
pub fn fresh_var(x: &Var, avoid: &BTreeSet<Name>) -> Var {
    let mut name = format!("{}'", x.name);
    while avoid.contains(name.as_str()) {
        name.push('\'');
    }
    Var::new(&name, x.ty.clone())
}
