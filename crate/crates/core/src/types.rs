//! Simple types and positions.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// A simple type: a declared base sort or a binary arrow.
///
/// N-ary types `T1 -> ... -> Tn -> B` are right-nested arrows.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Base(Arc<str>),
    Arrow(Box<Type>, Box<Type>),
}

impl Type {
    pub fn base(name: &str) -> Type {
        Type::Base(Arc::from(name))
    }

    pub fn arrow(domain: Type, codomain: Type) -> Type {
        Type::Arrow(Box::new(domain), Box::new(codomain))
    }

    /// Builds `args[0] -> ... -> args[n-1] -> result`.
    pub fn arrows(args: impl IntoIterator<Item = Type>, result: Type) -> Type {
        let args: Vec<Type> = args.into_iter().collect();
        args.into_iter()
            .rev()
            .fold(result, |acc, t| Type::arrow(t, acc))
    }

    pub fn is_base(&self) -> bool {
        matches!(self, Type::Base(_))
    }

    /// Maximal flattening `T1 -> ... -> Tn -> B`.
    pub fn flatten(&self) -> (Vec<&Type>, &str) {
        let mut args = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Type::Arrow(d, c) => {
                    args.push(d.as_ref());
                    cur = c;
                }
                Type::Base(b) => return (args, b),
            }
        }
    }

    /// Number of arrows on the right spine.
    pub fn arity(&self) -> usize {
        self.flatten().0.len()
    }

    /// Output sort of the maximal flattening.
    pub fn output_sort(&self) -> &str {
        self.flatten().1
    }

    /// Strips `n` arguments off the front of the type.
    pub fn apply_n(&self, n: usize) -> Option<&Type> {
        let mut cur = self;
        for _ in 0..n {
            match cur {
                Type::Arrow(_, c) => cur = c,
                Type::Base(_) => return None,
            }
        }
        Some(cur)
    }

    pub fn subtype_at(&self, p: &Position) -> Option<&Type> {
        let mut cur = self;
        for &d in p.digits() {
            match (cur, d) {
                (Type::Arrow(l, _), 1) => cur = l,
                (Type::Arrow(_, r), 2) => cur = r,
                _ => return None,
            }
        }
        Some(cur)
    }

    /// All base sorts mentioned in the type.
    pub fn sorts(&self) -> Vec<&str> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a Type, out: &mut Vec<&'a str>) {
            match t {
                Type::Base(b) => out.push(b),
                Type::Arrow(d, c) => {
                    go(d, out);
                    go(c, out);
                }
            }
        }
        go(self, &mut out);
        out
    }

    /// Arrow shape with every base sort identified.
    pub fn same_shape(&self, other: &Type) -> bool {
        match (self, other) {
            (Type::Base(_), Type::Base(_)) => true,
            (Type::Arrow(a, b), Type::Arrow(c, d)) => a.same_shape(c) && b.same_shape(d),
            _ => false,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Type::Base(_) => 1,
            Type::Arrow(d, c) => 1 + d.size() + c.size(),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Base(b) => write!(f, "{b}"),
            Type::Arrow(d, c) => {
                if d.is_base() {
                    write!(f, "{d} -> {c}")
                } else {
                    write!(f, "({d}) -> {c}")
                }
            }
        }
    }
}

/// A path into a term or a type, as a sequence of `1`/`2` digits.
///
/// In a term, `1`/`2` select the function/argument of an application and
/// `1` selects the body of an abstraction. In a type, they select the
/// domain/codomain of an arrow. The empty position is the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position(Vec<u8>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn from_digits(digits: impl IntoIterator<Item = u8>) -> Position {
        Position(digits.into_iter().collect())
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, d: u8) {
        debug_assert!(d == 1 || d == 2);
        self.0.push(d);
    }

    pub fn pop(&mut self) -> Option<u8> {
        self.0.pop()
    }

    pub fn child(&self, d: u8) -> Position {
        let mut p = self.clone();
        p.push(d);
        p
    }

    /// `self · other`
    pub fn concat(&self, other: &Position) -> Position {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Position(v)
    }

    /// `prefix · self`
    pub fn prepend(&self, prefix: &[u8]) -> Position {
        let mut v = prefix.to_vec();
        v.extend_from_slice(&self.0);
        Position(v)
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn strip_prefix(&self, prefix: &Position) -> Option<Position> {
        self.0.strip_prefix(prefix.0.as_slice()).map(|s| Position(s.to_vec()))
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Position {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "e" {
            return Ok(Position::root());
        }
        s.split('.')
            .map(|d| match d {
                "1" => Ok(1),
                "2" => Ok(2),
                other => Err(format!("invalid position digit `{other}`")),
            })
            .collect::<Result<Vec<u8>, _>>()
            .map(Position)
    }
}

impl Serialize for Position {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Position {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
