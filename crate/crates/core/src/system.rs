use std::fmt;

use crate::error::{Error, Result};
use crate::signature::Signature;
use crate::term::{Symbol, Term};

/// A rule `f l1 ... ln -> r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Term) -> Rule {
        Rule { lhs, rhs }
    }

    /// Head symbol and arguments of the left-hand side.
    pub fn head(&self) -> Result<(&Symbol, Vec<&Term>)> {
        match self.lhs.spine() {
            (Term::Sym(f), args) => Ok((f, args)),
            _ => Err(Error::MalformedLhs {
                lhs: self.lhs.to_string(),
            }),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RewriteSystem {
    pub signature: Signature,
    pub rules: Vec<Rule>,
    /// `(f, g)` pairs meaning `f > g`, from `prec` lines.
    pub precedence_hints: Vec<(String, String)>,
}

impl RewriteSystem {
    /// Validates the rules against the signature and recomputes the
    /// defined/constructor split.
    pub fn new(mut signature: Signature, rules: Vec<Rule>) -> Result<RewriteSystem> {
        for (i, rule) in rules.iter().enumerate() {
            rule.head()?;
            let with_rule = |e: Error| match e {
                Error::Type {
                    position, message, ..
                } => Error::Type {
                    rule: Some(i),
                    position,
                    message,
                },
                other => other,
            };
            let tl = rule.lhs.type_of().map_err(with_rule)?;
            let tr = rule.rhs.type_of().map_err(with_rule)?;
            signature.check_term(&rule.lhs).map_err(with_rule)?;
            signature.check_term(&rule.rhs).map_err(with_rule)?;
            if tl != tr {
                return Err(Error::Type {
                    rule: Some(i),
                    position: crate::types::Position::root(),
                    message: format!("left-hand side has type {tl}, right-hand side has type {tr}"),
                });
            }
        }
        signature.classify(rules.iter().map(|r| &r.lhs))?;
        Ok(RewriteSystem {
            signature,
            rules,
            precedence_hints: Vec::new(),
        })
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}
