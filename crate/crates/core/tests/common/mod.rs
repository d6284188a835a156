#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use hodp::signature::Signature;
use hodp::{parse_system, RewriteSystem, Term, Type, Var};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn systems_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("systems")
}

/// Every shipped example as `(file stem, text)`, sorted by name.
pub fn corpus() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = std::fs::read_dir(systems_dir())
        .expect("systems dir")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "hodp"))
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

pub fn load(name: &str) -> RewriteSystem {
    let text = std::fs::read_to_string(systems_dir().join(format!("{name}.hodp"))).unwrap();
    parse_system(&text).unwrap()
}

pub fn sym(sig: &Signature, name: &str) -> Term {
    Term::Sym(sig.symbol(name).unwrap_or_else(|| panic!("no symbol {name}")))
}

pub fn random_type(rng: &mut ChaCha8Rng, depth: usize, sorts: &[&str]) -> Type {
    if depth == 0 || rng.gen_bool(0.35) {
        Type::base(sorts.choose(rng).unwrap())
    } else {
        Type::arrow(random_type(rng, depth - 1, sorts), random_type(rng, depth - 1, sorts))
    }
}

/// `N`, `L` with `0 : N`, `s : N -> N`, `nil : L`, `cons : N -> L -> L`,
/// `f : N -> N -> N`, `map : (N -> N) -> L -> L`, `lim : (N -> N) -> N`.
pub fn test_signature() -> Signature {
    let n = Type::base("N");
    let l = Type::base("L");
    let nn = Type::arrow(n.clone(), n.clone());
    let mut sig = Signature::new();
    sig.add_sort("N");
    sig.add_sort("L");
    for (name, ty) in [
        ("0", n.clone()),
        ("s", nn.clone()),
        ("nil", l.clone()),
        ("cons", Type::arrows([n.clone(), l.clone()], l.clone())),
        ("f", Type::arrows([n.clone(), n.clone()], n.clone())),
        ("map", Type::arrows([nn.clone(), l.clone()], l.clone())),
        ("lim", Type::arrow(nn, n)),
    ] {
        sig.declare(name, ty).unwrap();
    }
    sig
}

/// Random well-typed terms over a signature.
pub struct TermGen<'a> {
    pub rng: ChaCha8Rng,
    pub sig: &'a Signature,
    /// Allow free variables (otherwise terms are closed).
    pub free: bool,
    /// Allow β-redexes.
    pub redexes: bool,
    pool: BTreeMap<Type, Vec<Var>>,
}

impl<'a> TermGen<'a> {
    pub fn new(seed: u64, sig: &'a Signature) -> TermGen<'a> {
        TermGen {
            rng: rng(seed),
            sig,
            free: true,
            redexes: true,
            pool: BTreeMap::new(),
        }
    }

    fn free_var(&mut self, ty: &Type) -> Term {
        let vars = self.pool.entry(ty.clone()).or_default();
        if vars.is_empty() || (vars.len() < 3 && self.rng.gen_bool(0.3)) {
            let name = format!("V{}", self.pool.values().map(Vec::len).sum::<usize>());
            let v = Var::new(&name, ty.clone());
            self.pool.get_mut(ty).unwrap().push(v);
        }
        let vars = &self.pool[ty];
        Term::Var(vars.choose(&mut self.rng).unwrap().clone())
    }

    fn sorts(&self) -> Vec<Type> {
        self.sig.sorts().iter().map(|s| Type::base(s)).collect()
    }

    /// Heads whose type becomes `ty` after `k` arguments, with `k`.
    fn heads(&self, ty: &Type, env: &[Var]) -> Vec<(Term, Vec<Type>)> {
        let mut out = Vec::new();
        let mut consider = |h: Term, hty: &Type| {
            let mut args = Vec::new();
            let mut cur = hty;
            loop {
                if cur == ty {
                    out.push((h.clone(), args.clone()));
                }
                match cur {
                    Type::Arrow(d, c) => {
                        args.push((**d).clone());
                        cur = c;
                    }
                    Type::Base(_) => break,
                }
            }
        };
        for (name, sty) in self.sig.symbols() {
            consider(Term::Sym(self.sig.symbol(name).unwrap()), sty);
        }
        for v in env {
            consider(Term::Var(v.clone()), &v.ty);
        }
        out
    }

    pub fn term(&mut self, ty: &Type, size: usize) -> Term {
        let mut env = Vec::new();
        self.go(ty, size.max(1), &mut env)
    }

    fn go(&mut self, ty: &Type, size: usize, env: &mut Vec<Var>) -> Term {
        let heads = self.heads(ty, env);
        let atoms: Vec<Term> = heads
            .iter()
            .filter(|(_, a)| a.is_empty())
            .map(|(h, _)| h.clone())
            .collect();
        if size <= 1 {
            if let Type::Arrow(d, c) = ty {
                if atoms.is_empty() || self.rng.gen_bool(0.5) {
                    return self.lambda(d, c, 1, env);
                }
            }
            if !atoms.is_empty() && (!self.free || self.rng.gen_bool(0.7)) {
                return atoms.choose(&mut self.rng).unwrap().clone();
            }
            if self.free {
                return self.free_var(ty);
            }
            // smallest application available
            let (h, args) = heads
                .iter()
                .min_by_key(|(_, a)| a.len())
                .expect("type has no inhabitant")
                .clone();
            let args: Vec<Term> = args.iter().map(|a| self.go(a, 1, env)).collect();
            return Term::apps(h, args);
        }
        let roll: f64 = self.rng.gen();
        if let Type::Arrow(d, c) = ty {
            if roll < 0.4 {
                return self.lambda(d, c, size - 1, env);
            }
        }
        if self.redexes && roll > 0.85 && size >= 3 {
            let sorts = self.sorts();
            let a = sorts.choose(&mut self.rng).unwrap().clone();
            let split = self.rng.gen_range(1..size - 1);
            let x = self.binder(&a);
            let body = self.under(&x, env, |g, env| g.go(ty, split, env));
            let arg = self.go(&a, size - 1 - split, env);
            return Term::app(Term::lam(x, body), arg);
        }
        let apps: Vec<&(Term, Vec<Type>)> = heads.iter().filter(|(_, a)| !a.is_empty()).collect();
        if apps.is_empty() {
            return self.go(ty, 1, env);
        }
        let (h, args) = (*apps.choose(&mut self.rng).unwrap()).clone();
        let mut budget = size - 1;
        let mut out = Vec::new();
        for (i, a) in args.iter().enumerate() {
            let left = args.len() - i;
            let share = if left == 1 {
                budget
            } else {
                self.rng.gen_range(0..=budget / left.max(1) * 2).min(budget)
            };
            budget -= share;
            out.push(self.go(a, share.max(1), env));
        }
        Term::apps(h, out)
    }

    fn binder(&mut self, ty: &Type) -> Var {
        let name = ["x", "y", "z"].choose(&mut self.rng).unwrap();
        Var::new(name, ty.clone())
    }

    fn lambda(&mut self, d: &Type, c: &Type, size: usize, env: &[Var]) -> Term {
        let x = self.binder(d);
        let body = self.under(&x, env, |g, env| g.go(c, size.max(1), env));
        Term::lam(x, body)
    }

    /// Runs `k` with `x` bound, hiding any shadowed variable of that name.
    fn under(
        &mut self,
        x: &Var,
        env: &[Var],
        k: impl FnOnce(&mut Self, &mut Vec<Var>) -> Term,
    ) -> Term {
        let mut inner: Vec<Var> = env.iter().filter(|v| v.name != x.name).cloned().collect();
        inner.push(x.clone());
        k(self, &mut inner)
    }
}

/// First-order term used by the oracle.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Fo {
    Var(String),
    Fun(String, Vec<Fo>),
}

impl Fo {
    /// Curried rendering `f a (g b)`.
    pub fn curried(&self) -> String {
        match self {
            Fo::Var(x) => x.clone(),
            Fo::Fun(f, args) => {
                let mut s = f.clone();
                for a in args {
                    let r = a.curried();
                    match a {
                        Fo::Fun(_, b) if !b.is_empty() => s.push_str(&format!(" ({r})")),
                        _ => s.push_str(&format!(" {r}")),
                    }
                }
                s
            }
        }
    }

    fn vars(&self, out: &mut Vec<String>) {
        match self {
            Fo::Var(x) => {
                if !out.contains(x) {
                    out.push(x.clone())
                }
            }
            Fo::Fun(_, a) => a.iter().for_each(|t| t.vars(out)),
        }
    }

    fn subterms<'a>(&'a self, out: &mut Vec<&'a Fo>) {
        out.push(self);
        if let Fo::Fun(_, a) = self {
            a.iter().for_each(|t| t.subterms(out));
        }
    }
}

pub struct FoTrs {
    pub arities: Vec<(String, usize)>,
    pub rules: Vec<(Fo, Fo)>,
}

impl FoTrs {
    pub fn to_text(&self) -> String {
        let mut s = String::from("sort S\n");
        for (f, n) in &self.arities {
            s.push_str(&format!("{f} : {}\n", vec!["S"; n + 1].join(" -> ")));
        }
        for (l, r) in &self.rules {
            s.push_str(&format!("rule {} -> {}\n", l.curried(), r.curried()));
        }
        s
    }

    /// Classical dependency pairs: `(rule, l, u)` for every subterm `u` of
    /// `r` whose root is defined.
    pub fn arts_giesl(&self) -> Vec<(usize, String, String)> {
        let defined: Vec<&String> = self
            .rules
            .iter()
            .filter_map(|(l, _)| match l {
                Fo::Fun(f, _) => Some(f),
                Fo::Var(_) => None,
            })
            .collect();
        let mut out = Vec::new();
        for (i, (l, r)) in self.rules.iter().enumerate() {
            let mut subs = Vec::new();
            r.subterms(&mut subs);
            for u in subs {
                if let Fo::Fun(g, _) = u {
                    if defined.contains(&g) {
                        out.push((i, l.curried(), u.curried()));
                    }
                }
            }
        }
        out.sort();
        out
    }
}

fn fo_term(rng: &mut ChaCha8Rng, syms: &[(String, usize)], vars: &[String], depth: usize) -> Fo {
    if depth == 0 || rng.gen_bool(0.3) {
        if !vars.is_empty() && rng.gen_bool(0.6) {
            return Fo::Var(vars.choose(rng).unwrap().clone());
        }
        let consts: Vec<&(String, usize)> = syms.iter().filter(|(_, n)| *n == 0).collect();
        let (c, _) = consts.choose(rng).unwrap();
        return Fo::Fun(c.clone(), vec![]);
    }
    let (f, n) = syms.choose(rng).unwrap();
    Fo::Fun(f.clone(), (0..*n).map(|_| fo_term(rng, syms, vars, depth - 1)).collect())
}

/// A random first-order TRS with at most `max_rules` rules over at most
/// `max_syms` symbols (one constant always present).
pub fn random_fo_trs(seed: u64, max_rules: usize, max_syms: usize) -> FoTrs {
    let mut rng = rng(seed);
    let nsyms = rng.gen_range(2..=max_syms);
    let mut arities = vec![("c0".to_string(), 0)];
    for i in 1..nsyms {
        arities.push((format!("f{i}"), rng.gen_range(0..=3)));
    }
    let pool: Vec<String> = ["X", "Y", "Z"].iter().map(|s| s.to_string()).collect();
    let nrules = rng.gen_range(1..=max_rules);
    let mut rules = Vec::new();
    for _ in 0..nrules {
        let heads: Vec<&(String, usize)> = arities.iter().filter(|(_, n)| *n > 0).collect();
        let (f, n) = match heads.choose(&mut rng) {
            Some(h) => (*h).clone(),
            None => arities[0].clone(),
        };
        let args: Vec<Fo> = (0..n).map(|_| fo_term(&mut rng, &arities, &pool, 2)).collect();
        let lhs = Fo::Fun(f, args);
        let mut lvars = Vec::new();
        lhs.vars(&mut lvars);
        let rhs = fo_term(&mut rng, &arities, &lvars, 3);
        rules.push((lhs, rhs));
    }
    FoTrs { arities, rules }
}
