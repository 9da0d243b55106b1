//! Runtime values of the definitional language.

use crate::base::FunId;
use crate::codata::CoVal;
use crate::functor::Canon;
use num_bigint::BigUint;
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

/// A value of any sort. Codata values are lazy; everything else is
/// finite and strict. Function values are names of defined functions.
#[derive(Clone, Debug)]
pub enum Value {
    Nat(BigUint),
    Bool(bool),
    Unit,
    Tuple(Vec<Value>),
    List(Vec<Value>),
    /// Canonical: sorted and duplicate-free under [`Canon`].
    FinSet(Vec<Value>),
    Co(CoVal),
    Fun(FunId),
}

impl Value {
    pub fn nat_u64(n: u64) -> Value {
        Value::Nat(BigUint::from(n))
    }

    pub fn finset(mut items: Vec<Value>) -> Value {
        items.sort_by(|a, b| a.canon_cmp(b));
        items.dedup_by(|a, b| a.canon_cmp(b) == Ordering::Equal);
        Value::FinSet(items)
    }

    pub fn as_nat(&self) -> Option<&BigUint> {
        match self {
            Value::Nat(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_co(&self) -> Option<&CoVal> {
        match self {
            Value::Co(j) => Some(j),
            _ => None,
        }
    }
}

fn rank(v: &Value) -> u8 {
    match v {
        Value::Nat(_) => 0,
        Value::Bool(_) => 1,
        Value::Unit => 2,
        Value::Tuple(_) => 3,
        Value::List(_) => 4,
        Value::FinSet(_) => 5,
        Value::Co(_) => 6,
        Value::Fun(_) => 7,
    }
}

/// Total order used for finite-set canonicalization and memo keys.
/// Codata values are ordered by their session-unique creation id, which is
/// deterministic for a fixed program.
impl Canon for Value {
    fn canon_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Nat(a), Value::Nat(b)) => a.cmp(b),
            (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
            (Value::Unit, Value::Unit) => Ordering::Equal,
            (Value::Tuple(a), Value::Tuple(b))
            | (Value::List(a), Value::List(b))
            | (Value::FinSet(a), Value::FinSet(b)) => a.canon_cmp(b),
            (Value::Co(a), Value::Co(b)) => a.id().cmp(&b.id()),
            (Value::Fun(a), Value::Fun(b)) => a.cmp(b),
            (a, b) => rank(a).cmp(&rank(b)),
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.canon_cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        rank(self).hash(state);
        match self {
            Value::Nat(n) => n.hash(state),
            Value::Bool(b) => b.hash(state),
            Value::Unit => {}
            Value::Tuple(items) | Value::List(items) | Value::FinSet(items) => {
                for v in items {
                    v.hash(state);
                }
            }
            Value::Co(j) => j.id().hash(state),
            Value::Fun(f) => f.hash(state),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Nat(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Unit => write!(f, "()"),
            Value::Tuple(items) => {
                let parts: Vec<_> = items.iter().map(|v| v.to_string()).collect();
                write!(f, "({})", parts.join(", "))
            }
            Value::List(items) => {
                let parts: Vec<_> = items.iter().map(|v| v.to_string()).collect();
                write!(f, "[{}]", parts.join(", "))
            }
            Value::FinSet(items) => {
                let parts: Vec<_> = items.iter().map(|v| v.to_string()).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
            Value::Co(j) => write!(f, "#{}", j.id()),
            Value::Fun(id) => write!(f, "<fn {id}>"),
        }
    }
}
