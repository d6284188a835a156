//! Line-oriented input format.
//!
//! ```text
//! sort N L
//! 0 : N
//! s : N -> N
//! map : (N -> N) -> L -> L
//! rule map F (cons X L) -> cons (F X) (map F L)
//! prec map > cons
//! ```
//!
//! Identifiers not declared as symbols are rule variables; their types,
//! and those of unannotated binders, are inferred per rule.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::signature::Signature;
use crate::system::{RewriteSystem, Rule};
use crate::term::{Term, Var};
use crate::types::{Position, Type};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Arrow,
    Colon,
    Dot,
    Lambda,
    LParen,
    RParen,
    Gt,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '+' || c == '*'
}

fn lex(line: &str, lineno: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push(Token { tok: Tok::Arrow, col });
                i += 2;
            }
            '→' => {
                out.push(Token { tok: Tok::Arrow, col });
                i += 1;
            }
            ':' => {
                out.push(Token { tok: Tok::Colon, col });
                i += 1;
            }
            '.' => {
                out.push(Token { tok: Tok::Dot, col });
                i += 1;
            }
            '\\' | 'λ' => {
                out.push(Token { tok: Tok::Lambda, col });
                i += 1;
            }
            '(' => {
                out.push(Token { tok: Tok::LParen, col });
                i += 1;
            }
            ')' => {
                out.push(Token { tok: Tok::RParen, col });
                i += 1;
            }
            '>' => {
                out.push(Token { tok: Tok::Gt, col });
                i += 1;
            }
            c if is_ident_char(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    col,
                });
            }
            other => {
                return Err(Error::Syntax {
                    line: lineno,
                    col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

/// Untyped term as written.
#[derive(Debug, Clone)]
enum Raw {
    Ident(String),
    App(Box<Raw>, Box<Raw>),
    Lam(String, Option<Type>, Box<Raw>),
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
    line_len: usize,
    sorts: &'a Signature,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|t| t.col)
            .unwrap_or(self.line_len + 1)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            line: self.line,
            col: self.col(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn ty(&mut self) -> Result<Type> {
        let dom = match self.peek() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.ty()?;
                self.expect(Tok::RParen, "`)`")?;
                t
            }
            Some(Tok::Ident(_)) => {
                let col = self.col();
                let name = self.ident()?;
                if !self.sorts.has_sort(&name) {
                    return Err(Error::Syntax {
                        line: self.line,
                        col,
                        message: format!("undeclared sort `{name}`"),
                    });
                }
                Type::base(&name)
            }
            _ => return self.err("expected a type"),
        };
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            Ok(Type::arrow(dom, self.ty()?))
        } else {
            Ok(dom)
        }
    }

    /// term := '\' binders '.' term | atom+
    fn term(&mut self) -> Result<Raw> {
        if self.peek() == Some(&Tok::Lambda) {
            self.pos += 1;
            let mut binders = Vec::new();
            loop {
                match self.peek() {
                    Some(Tok::Ident(_)) => {
                        let x = self.ident()?;
                        let ann = if self.peek() == Some(&Tok::Colon) {
                            self.pos += 1;
                            Some(self.ty()?)
                        } else {
                            None
                        };
                        binders.push((x, ann));
                    }
                    Some(Tok::LParen) => {
                        // (x : T)
                        self.pos += 1;
                        let x = self.ident()?;
                        self.expect(Tok::Colon, "`:`")?;
                        let t = self.ty()?;
                        self.expect(Tok::RParen, "`)`")?;
                        binders.push((x, Some(t)));
                    }
                    Some(Tok::Dot) if !binders.is_empty() => {
                        self.pos += 1;
                        break;
                    }
                    _ => return self.err("expected binder or `.`"),
                }
            }
            let body = self.term()?;
            return Ok(binders
                .into_iter()
                .rev()
                .fold(body, |b, (x, t)| Raw::Lam(x, t, Box::new(b))));
        }
        let mut t = self.atom()?;
        loop {
            match self.peek() {
                Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    let a = self.atom()?;
                    t = Raw::App(Box::new(t), Box::new(a));
                }
                Some(Tok::Lambda) => {
                    let a = self.term()?;
                    return Ok(Raw::App(Box::new(t), Box::new(a)));
                }
                _ => return Ok(t),
            }
        }
    }

    fn atom(&mut self) -> Result<Raw> {
        match self.peek() {
            Some(Tok::Ident(_)) => Ok(Raw::Ident(self.ident()?)),
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => self.err("expected a term"),
        }
    }
}

/// Type with unification variables.
#[derive(Debug, Clone, PartialEq, Eq)]
enum IType {
    Meta(usize),
    Base(Arc<str>),
    Arrow(Box<IType>, Box<IType>),
}

impl IType {
    fn from_type(t: &Type) -> IType {
        match t {
            Type::Base(b) => IType::Base(b.clone()),
            Type::Arrow(d, c) => {
                IType::Arrow(Box::new(IType::from_type(d)), Box::new(IType::from_type(c)))
            }
        }
    }
}

#[derive(Default)]
struct Unifier {
    metas: Vec<Option<IType>>,
}

impl Unifier {
    fn fresh(&mut self) -> IType {
        self.metas.push(None);
        IType::Meta(self.metas.len() - 1)
    }

    fn shallow(&self, t: &IType) -> IType {
        let mut cur = t.clone();
        while let IType::Meta(m) = cur {
            match &self.metas[m] {
                Some(t) => cur = t.clone(),
                None => return IType::Meta(m),
            }
        }
        cur
    }

    fn occurs(&self, m: usize, t: &IType) -> bool {
        match self.shallow(t) {
            IType::Meta(n) => n == m,
            IType::Base(_) => false,
            IType::Arrow(d, c) => self.occurs(m, &d) || self.occurs(m, &c),
        }
    }

    fn unify(&mut self, a: &IType, b: &IType) -> bool {
        match (self.shallow(a), self.shallow(b)) {
            (IType::Meta(m), IType::Meta(n)) if m == n => true,
            (IType::Meta(m), t) | (t, IType::Meta(m)) => {
                if self.occurs(m, &t) {
                    return false;
                }
                self.metas[m] = Some(t);
                true
            }
            (IType::Base(x), IType::Base(y)) => x == y,
            (IType::Arrow(d1, c1), IType::Arrow(d2, c2)) => {
                self.unify(&d1, &d2) && self.unify(&c1, &c2)
            }
            _ => false,
        }
    }

    fn resolve(&self, t: &IType) -> Option<Type> {
        match self.shallow(t) {
            IType::Meta(_) => None,
            IType::Base(b) => Some(Type::Base(b)),
            IType::Arrow(d, c) => Some(Type::arrow(self.resolve(&d)?, self.resolve(&c)?)),
        }
    }

    fn show(&self, t: &IType) -> String {
        match self.shallow(t) {
            IType::Meta(m) => format!("?{m}"),
            IType::Base(b) => b.to_string(),
            IType::Arrow(d, c) => {
                let ds = self.show(&d);
                if matches!(self.shallow(&d), IType::Arrow(..)) {
                    format!("({ds}) -> {}", self.show(&c))
                } else {
                    format!("{ds} -> {}", self.show(&c))
                }
            }
        }
    }
}

/// Typed intermediate tree: binder and variable types are metas.
enum Typed {
    Var(String, IType),
    Sym(String, Type),
    App(Box<Typed>, Box<Typed>),
    Lam(String, IType, Box<Typed>),
}

struct Inference<'a> {
    sig: &'a Signature,
    u: Unifier,
    rule_vars: BTreeMap<String, IType>,
    rule: usize,
}

impl Inference<'_> {
    fn infer(
        &mut self,
        raw: &Raw,
        env: &mut Vec<(String, IType)>,
        pos: &mut Position,
        side: &str,
    ) -> Result<(Typed, IType)> {
        match raw {
            Raw::Ident(name) => {
                if let Some((_, t)) = env.iter().rev().find(|(n, _)| n == name) {
                    return Ok((Typed::Var(name.clone(), t.clone()), t.clone()));
                }
                if let Some(ty) = self.sig.type_of(name) {
                    return Ok((Typed::Sym(name.clone(), ty.clone()), IType::from_type(ty)));
                }
                let t = match self.rule_vars.get(name) {
                    Some(t) => t.clone(),
                    None => {
                        let t = self.u.fresh();
                        self.rule_vars.insert(name.clone(), t.clone());
                        t
                    }
                };
                Ok((Typed::Var(name.clone(), t.clone()), t))
            }
            Raw::App(f, a) => {
                pos.push(1);
                let (tf, ty_f) = self.infer(f, env, pos, side)?;
                pos.pop();
                pos.push(2);
                let (ta, ty_a) = self.infer(a, env, pos, side)?;
                pos.pop();
                let r = self.u.fresh();
                let want = IType::Arrow(Box::new(ty_a.clone()), Box::new(r.clone()));
                if !self.u.unify(&ty_f, &want) {
                    return Err(Error::Type {
                        rule: Some(self.rule),
                        position: pos.clone(),
                        message: format!(
                            "in {side}: cannot apply a term of type {} to an argument of type {}",
                            self.u.show(&ty_f),
                            self.u.show(&ty_a)
                        ),
                    });
                }
                Ok((Typed::App(Box::new(tf), Box::new(ta)), r))
            }
            Raw::Lam(x, ann, body) => {
                let tx = match ann {
                    Some(t) => IType::from_type(t),
                    None => self.u.fresh(),
                };
                env.push((x.clone(), tx.clone()));
                pos.push(1);
                let r = self.infer(body, env, pos, side);
                pos.pop();
                env.pop();
                let (tb, ty_b) = r?;
                Ok((
                    Typed::Lam(x.clone(), tx.clone(), Box::new(tb)),
                    IType::Arrow(Box::new(tx), Box::new(ty_b)),
                ))
            }
        }
    }

    fn finish(&self, t: &Typed) -> Result<Term> {
        let resolve = |name: &str, it: &IType| {
            self.u.resolve(it).ok_or_else(|| Error::InferenceAmbiguity {
                rule: self.rule,
                name: name.to_string(),
            })
        };
        Ok(match t {
            Typed::Var(n, it) => Term::var(n, resolve(n, it)?),
            Typed::Sym(n, ty) => Term::sym(n, ty.clone()),
            Typed::App(f, a) => Term::app(self.finish(f)?, self.finish(a)?),
            Typed::Lam(x, it, b) => Term::lam(Var::new(x, resolve(x, it)?), self.finish(b)?),
        })
    }
}

enum Item {
    Rule(usize, Vec<Token>),
    Prec(usize, Vec<Token>),
}

/// Parses and typechecks a whole system.
pub fn parse_system(text: &str) -> Result<RewriteSystem> {
    let mut sig = Signature::new();
    let mut decls = Vec::new();
    let mut items = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let toks = lex(line, lineno)?;
        let Some(first) = toks.first() else { continue };
        match &first.tok {
            Tok::Ident(kw) if kw == "sort" => {
                if toks.len() < 2 {
                    return Err(Error::Syntax {
                        line: lineno,
                        col: line.len() + 1,
                        message: "expected sort names".into(),
                    });
                }
                for t in &toks[1..] {
                    match &t.tok {
                        Tok::Ident(s) => sig.add_sort(s),
                        _ => {
                            return Err(Error::Syntax {
                                line: lineno,
                                col: t.col,
                                message: "expected sort name".into(),
                            })
                        }
                    }
                }
            }
            Tok::Ident(kw) if kw == "rule" => items.push(Item::Rule(lineno, toks[1..].to_vec())),
            Tok::Ident(kw) if kw == "prec" => items.push(Item::Prec(lineno, toks[1..].to_vec())),
            Tok::Ident(_) => decls.push((lineno, line.len(), toks)),
            _ => {
                return Err(Error::Syntax {
                    line: lineno,
                    col: first.col,
                    message: "expected `sort`, `rule`, `prec` or a declaration".into(),
                })
            }
        }
    }

    for (lineno, len, toks) in decls {
        let mut p = Parser {
            toks: &toks,
            pos: 0,
            line: lineno,
            line_len: len,
            sorts: &sig,
        };
        let name = p.ident()?;
        p.expect(Tok::Colon, "`:`")?;
        let ty = p.ty()?;
        if !p.at_end() {
            return p.err("unexpected input after type");
        }
        sig.declare(&name, ty).map_err(|e| match e {
            Error::DuplicateSymbol { .. } => Error::Syntax {
                line: lineno,
                col: 1,
                message: e.to_string(),
            },
            other => other,
        })?;
    }

    let mut rules = Vec::new();
    let mut hints = Vec::new();
    for item in items {
        match item {
            Item::Rule(lineno, toks) => {
                let rule = parse_rule(&toks, lineno, rules.len(), &sig)?;
                rules.push(rule);
            }
            Item::Prec(lineno, toks) => {
                let mut names = Vec::new();
                for (k, t) in toks.iter().enumerate() {
                    match (&t.tok, k % 2) {
                        (Tok::Ident(n), 0) => {
                            if sig.type_of(n).is_none() {
                                return Err(Error::Syntax {
                                    line: lineno,
                                    col: t.col,
                                    message: format!("unknown symbol `{n}` in precedence"),
                                });
                            }
                            names.push(n.clone());
                        }
                        (Tok::Gt, 1) => {}
                        _ => {
                            return Err(Error::Syntax {
                                line: lineno,
                                col: t.col,
                                message: "expected `f > g (> h)*`".into(),
                            })
                        }
                    }
                }
                if names.len() < 2 || toks.len() % 2 == 0 {
                    return Err(Error::Syntax {
                        line: lineno,
                        col: 1,
                        message: "expected `prec f > g (> h)*`".into(),
                    });
                }
                for w in names.windows(2) {
                    hints.push((w[0].clone(), w[1].clone()));
                }
            }
        }
    }

    let mut check = crate::order::Precedence::new();
    for (a, b) in &hints {
        check.add(a, b)?;
    }
    let mut system = RewriteSystem::new(sig, rules)?;
    system.precedence_hints = hints;
    Ok(system)
}

fn parse_rule(toks: &[Token], lineno: usize, index: usize, sig: &Signature) -> Result<Rule> {
    let len = toks.last().map(|t| t.col + 1).unwrap_or(1);
    let mut p = Parser {
        toks,
        pos: 0,
        line: lineno,
        line_len: len,
        sorts: sig,
    };
    let lhs = p.term()?;
    p.expect(Tok::Arrow, "`->` between the two sides of the rule")?;
    let rhs = p.term()?;
    if !p.at_end() {
        return p.err("unexpected input after rule");
    }

    let mut inf = Inference {
        sig,
        u: Unifier::default(),
        rule_vars: BTreeMap::new(),
        rule: index,
    };
    let (tl, ty_l) = inf.infer(&lhs, &mut Vec::new(), &mut Position::root(), "left-hand side")?;
    let (tr, ty_r) = inf.infer(&rhs, &mut Vec::new(), &mut Position::root(), "right-hand side")?;
    if !inf.u.unify(&ty_l, &ty_r) {
        return Err(Error::Type {
            rule: Some(index),
            position: Position::root(),
            message: format!(
                "left-hand side has type {}, right-hand side has type {}",
                inf.u.show(&ty_l),
                inf.u.show(&ty_r)
            ),
        });
    }
    let lhs = inf.finish(&tl)?;
    let rhs = inf.finish(&tr)?;
    let rule = Rule::new(lhs, rhs);
    rule.head()?;
    Ok(rule)
}

/// Parses a standalone term against a system's signature. Free
/// identifiers become variables whose types must be inferable.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term> {
    let toks = lex(text, 1)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        line: 1,
        line_len: text.len(),
        sorts: sig,
    };
    let raw = p.term()?;
    if !p.at_end() {
        return p.err("unexpected input after term");
    }
    let mut inf = Inference {
        sig,
        u: Unifier::default(),
        rule_vars: BTreeMap::new(),
        rule: 0,
    };
    let (t, _) = inf.infer(&raw, &mut Vec::new(), &mut Position::root(), "term")?;
    inf.finish(&t)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MAP: &str = "\
sort N L
0 : N
s : N -> N
nil : L
cons : N -> L -> L
map : (N -> N) -> L -> L
rule map F nil -> nil
rule map F (cons X L) -> cons (F X) (map F L)
";

    #[test]
    fn parses_map_system() {
        let sys = parse_system(MAP).unwrap();
        assert_eq!(sys.rules.len(), 2);
        assert_eq!(sys.signature.defined().iter().collect::<Vec<_>>(), ["map"]);
        assert_eq!(sys.rules[1].to_string(), "map F (cons X L) -> cons (F X) (map F L)");
        let f = sys.rules[1].rhs.free_vars();
        let f = f.iter().find(|v| &*v.name == "F").unwrap();
        assert_eq!(f.ty.to_string(), "N -> N");
    }

    #[test]
    fn lambda_binders_and_annotations() {
        let text = "\
sort N
0 : N
plus : N -> N -> N
lim : (N -> N) -> N
rule plus (lim F) X -> lim (\\n. plus (F n) X)
rule plus 0 X -> (\\y:N. y) X
";
        let sys = parse_system(text).unwrap();
        assert_eq!(sys.rules[0].rhs.to_string(), "lim (\\n. plus (F n) X)");
        assert_eq!(sys.rules[1].rhs.display_typed(), "(\\y:N. y) X");
    }

    #[test]
    fn type_mismatch_between_sides() {
        let text = "sort N L\n0 : N\nnil : L\nf : N -> N\nrule f X -> nil\n";
        assert!(matches!(parse_system(text), Err(Error::Type { rule: Some(0), .. })));
    }

    #[test]
    fn ill_typed_application() {
        let text = "sort N\n0 : N\nf : N -> N\nrule f X -> 0 X\n";
        match parse_system(text) {
            Err(Error::Type { rule, position, .. }) => {
                assert_eq!(rule, Some(0));
                assert!(position.is_root());
            }
            other => panic!("expected type error, got {other:?}"),
        }
    }

    #[test]
    fn unconstrained_variable_is_ambiguous() {
        let text = "sort N\n0 : N\nk : N -> N\nrule k 0 -> (\\x. 0) Y\n";
        assert!(matches!(parse_system(text), Err(Error::InferenceAmbiguity { .. })));
    }

    #[test]
    fn variable_headed_lhs_is_malformed() {
        let text = "sort N\n0 : N\nrule F 0 -> 0\n";
        assert!(matches!(parse_system(text), Err(Error::MalformedLhs { .. })));
        let text = "sort N\n0 : N\nrule (\\x:N. x) 0 -> 0\n";
        assert!(matches!(parse_system(text), Err(Error::MalformedLhs { .. })));
    }

    #[test]
    fn syntax_errors_have_positions() {
        match parse_system("sort N\n0 : N\nrule 0 -> (0\n") {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse_system("sort N\n0 : M\n") {
            Err(Error::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 5)),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn empty_input() {
        let sys = parse_system("# nothing\n\n").unwrap();
        assert!(sys.is_empty());
    }

    #[test]
    fn precedence_hints() {
        let text = format!("{MAP}prec map > cons > nil\n");
        let sys = parse_system(&text).unwrap();
        assert_eq!(sys.precedence_hints.len(), 2);
        let cyclic = format!("{MAP}prec map > cons\nprec cons > map\n");
        assert!(matches!(parse_system(&cyclic), Err(Error::CyclicPrecedence(_))));
    }

    #[test]
    fn standalone_term() {
        let sys = parse_system(MAP).unwrap();
        let t = parse_term("map (\\y. s y) (cons 0 nil)", &sys.signature).unwrap();
        assert_eq!(t.type_of().unwrap(), Type::base("L"));
    }
}
