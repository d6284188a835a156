//! Syntactic matching modulo α.
//!
//! Rule variables bind literal subterms: there is no higher-order pattern
//! unification and no β at the meta level, so `F X` in a pattern only
//! matches an application. A pattern variable may not capture a variable
//! that is bound inside the matched term above the variable's position.

use crate::term::{Substitution, Term, Var};

/// Returns the unique `σ` with `dom(σ) ⊆ FV(pattern)` and `pattern σ =α term`.
pub fn match_pattern(pattern: &Term, term: &Term) -> Option<Substitution> {
    let mut sigma = Substitution::new();
    let mut env_p = Vec::new();
    let mut env_t = Vec::new();
    go(pattern, term, &mut env_p, &mut env_t, &mut sigma).then_some(sigma)
}

fn go<'a>(
    p: &'a Term,
    t: &'a Term,
    env_p: &mut Vec<&'a Var>,
    env_t: &mut Vec<&'a Var>,
    sigma: &mut Substitution,
) -> bool {
    match (p, t) {
        (Term::Var(x), _) => {
            if let Some(i) = env_p.iter().rev().position(|b| *b == x) {
                return match t {
                    Term::Var(y) => env_t.iter().rev().position(|b| *b == y) == Some(i),
                    _ => false,
                };
            }
            if t.ty() != x.ty {
                return false;
            }
            if env_t.iter().any(|b| t.has_free(b)) {
                return false;
            }
            match sigma.get(x) {
                Some(prev) => prev.alpha_eq(t),
                None => {
                    sigma.insert(x.clone(), t.clone());
                    true
                }
            }
        }
        (Term::Sym(f), Term::Sym(g)) => f.name == g.name,
        (Term::App(f1, a1), Term::App(f2, a2)) => {
            go(f1, f2, env_p, env_t, sigma) && go(a1, a2, env_p, env_t, sigma)
        }
        (Term::Lam(x, b1), Term::Lam(y, b2)) => {
            if x.ty != y.ty {
                return false;
            }
            env_p.push(x);
            env_t.push(y);
            let ok = go(b1, b2, env_p, env_t, sigma);
            env_p.pop();
            env_t.pop();
            ok
        }
        _ => false,
    }
}
