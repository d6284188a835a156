//! Signature analysis: polarity of type positions, accessible arguments,
//! basic sorts and the defined/constructor split.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::term::{Symbol, Term};
use crate::types::{Position, Type};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

/// Positions of base-type leaves of `ty` with the given polarity.
pub fn positions_of_polarity(ty: &Type, polarity: Polarity) -> BTreeSet<Position> {
    let mut out = BTreeSet::new();
    fn go(ty: &Type, pol: Polarity, pos: &mut Position, out: &mut BTreeSet<Position>) {
        match ty {
            Type::Base(_) => {
                if pol == Polarity::Positive {
                    out.insert(pos.clone());
                }
            }
            Type::Arrow(d, c) => {
                pos.push(1);
                go(d, pol.flip(), pos, out);
                pos.pop();
                pos.push(2);
                go(c, pol, pos, out);
                pos.pop();
            }
        }
    }
    go(ty, polarity, &mut Position::root(), &mut out);
    out
}

/// All positions `p` with `ty|p = sort`.
pub fn occurrences(sort: &str, ty: &Type) -> BTreeSet<Position> {
    let mut out = BTreeSet::new();
    fn go(sort: &str, ty: &Type, pos: &mut Position, out: &mut BTreeSet<Position>) {
        match ty {
            Type::Base(b) => {
                if &**b == sort {
                    out.insert(pos.clone());
                }
            }
            Type::Arrow(d, c) => {
                pos.push(1);
                go(sort, d, pos, out);
                pos.pop();
                pos.push(2);
                go(sort, c, pos, out);
                pos.pop();
            }
        }
    }
    go(sort, ty, &mut Position::root(), &mut out);
    out
}

/// A signature with its defined/constructor split.
///
/// The set of defined symbols is always computed from the rules; it cannot
/// be declared.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    sorts: BTreeSet<String>,
    symbols: BTreeMap<String, Type>,
    defined: BTreeSet<String>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn add_sort(&mut self, name: &str) {
        self.sorts.insert(name.to_string());
    }

    pub fn declare(&mut self, name: &str, ty: Type) -> Result<()> {
        for s in ty.sorts() {
            if !self.sorts.contains(s) {
                return Err(Error::UndeclaredSort(s.to_string()));
            }
        }
        if self.symbols.contains_key(name) {
            return Err(Error::DuplicateSymbol {
                name: name.to_string(),
            });
        }
        self.symbols.insert(name.to_string(), ty);
        Ok(())
    }

    pub fn sorts(&self) -> &BTreeSet<String> {
        &self.sorts
    }

    pub fn symbols(&self) -> &BTreeMap<String, Type> {
        &self.symbols
    }

    pub fn type_of(&self, name: &str) -> Option<&Type> {
        self.symbols.get(name)
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.symbols.get(name).map(|ty| Symbol::new(name, ty.clone()))
    }

    pub fn has_sort(&self, name: &str) -> bool {
        self.sorts.contains(name)
    }

    pub fn is_defined(&self, name: &str) -> bool {
        self.defined.contains(name)
    }

    pub fn defined(&self) -> &BTreeSet<String> {
        &self.defined
    }

    pub fn constructors(&self) -> BTreeSet<String> {
        self.symbols
            .keys()
            .filter(|s| !self.defined.contains(*s))
            .cloned()
            .collect()
    }

    /// Recomputes `D` as the set of head symbols of the given left-hand sides.
    pub fn classify<'a>(&mut self, lhss: impl IntoIterator<Item = &'a Term>) -> Result<()> {
        self.defined = classify_symbols(lhss)?;
        Ok(())
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.symbols.get(name).map(Type::arity)
    }

    /// Indices (1-based) of the accessible arguments of `name`.
    pub fn accessible_args(&self, name: &str) -> BTreeSet<usize> {
        let Some(ty) = self.symbols.get(name) else {
            return BTreeSet::new();
        };
        accessible_args_of(ty)
    }

    pub fn is_basic(&self, sort: &str) -> bool {
        self.symbols.values().all(|ty| {
            let (args, out) = ty.flatten();
            out != sort
                || accessible_args_of(ty)
                    .into_iter()
                    .all(|i| args[i - 1].is_base())
        })
    }

    /// Checks that every symbol in `t` is declared with the type it carries.
    pub fn check_term(&self, t: &Term) -> Result<()> {
        for (pos, s) in t.subterms() {
            if let Term::Sym(sym) = s {
                match self.symbols.get(&*sym.name) {
                    Some(ty) if *ty == sym.ty => {}
                    Some(ty) => {
                        return Err(Error::type_error(
                            pos,
                            format!("symbol `{}` used at type {}, declared {ty}", sym.name, sym.ty),
                        ))
                    }
                    None => return Err(Error::UnknownSymbol(sym.name.to_string())),
                }
            }
        }
        Ok(())
    }

    pub fn summary(&self) -> SignatureSummary {
        SignatureSummary {
            defined: self.defined.iter().cloned().collect(),
            constructors: self.constructors().into_iter().collect(),
            accessible: self
                .symbols
                .keys()
                .map(|s| (s.clone(), self.accessible_args(s).into_iter().collect()))
                .collect(),
            basic_sorts: self.sorts.iter().filter(|s| self.is_basic(s)).cloned().collect(),
        }
    }
}

/// `{ i | occurrences(B, Ti) ⊆ pos+(Ti) }` for `ty = T1 -> ... -> Tn -> B`.
pub fn accessible_args_of(ty: &Type) -> BTreeSet<usize> {
    let (args, out) = ty.flatten();
    args.iter()
        .enumerate()
        .filter(|(_, ti)| {
            let pos = positions_of_polarity(ti, Polarity::Positive);
            occurrences(out, ti).is_subset(&pos)
        })
        .map(|(i, _)| i + 1)
        .collect()
}

/// Head symbols of left-hand sides.
pub fn classify_symbols<'a>(lhss: impl IntoIterator<Item = &'a Term>) -> Result<BTreeSet<String>> {
    lhss.into_iter()
        .map(|l| match l.spine().0 {
            Term::Sym(f) => Ok(f.name.to_string()),
            _ => Err(Error::MalformedLhs { lhs: l.to_string() }),
        })
        .collect()
}

/// Report view of the signature analysis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureSummary {
    pub defined: Vec<String>,
    pub constructors: Vec<String>,
    pub accessible: BTreeMap<String, Vec<usize>>,
    pub basic_sorts: Vec<String>,
}
