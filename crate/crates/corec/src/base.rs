//! Shared identifiers, sorts, and source spans.

use std::fmt;

/// Index of a declared codatatype within a session.
pub type CodataId = usize;

/// Index of a declared function within a session.
pub type FunId = usize;

/// Identity of a registered well-behaved operation: the codatatype it
/// belongs to plus its position in that codatatype's operation table.
/// Index 0 is always the constructor bundle.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct OpId {
    pub codata: CodataId,
    pub index: u32,
}

impl OpId {
    pub fn new(codata: CodataId, index: u32) -> Self {
        OpId { codata, index }
    }

    pub fn is_ctor(&self) -> bool {
        self.index == 0
    }
}

/// Byte range into the source text.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

/// Maps byte offsets back to 1-based line/column pairs for diagnostics.
#[derive(Clone, Debug)]
pub struct SourceMap {
    line_starts: Vec<usize>,
}

impl SourceMap {
    pub fn new(text: &str) -> Self {
        let mut line_starts = vec![0];
        for (i, b) in text.bytes().enumerate() {
            if b == b'\n' {
                line_starts.push(i + 1);
            }
        }
        SourceMap { line_starts }
    }

    pub fn line_col(&self, offset: usize) -> (usize, usize) {
        let line = match self.line_starts.binary_search(&offset) {
            Ok(l) => l,
            Err(l) => l - 1,
        };
        (line + 1, offset - self.line_starts[line] + 1)
    }
}

/// Monomorphic sorts of the definitional language.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Sort {
    Nat,
    Bool,
    Unit,
    Co(CodataId),
    List(Box<Sort>),
    FinSet(Box<Sort>),
    Prod(Vec<Sort>),
    /// Restricted first-order function sort: base sorts only on both sides.
    /// Supports predicate parameters; these values are names of defined
    /// functions, never closures.
    Fun(Vec<Sort>, Box<Sort>),
}

impl Sort {
    pub fn is_base(&self) -> bool {
        matches!(self, Sort::Nat | Sort::Bool | Sort::Unit)
    }

    pub fn codata(&self) -> Option<CodataId> {
        match self {
            Sort::Co(j) => Some(*j),
            _ => None,
        }
    }
}

/// Renders a sort using declared codatatype names.
pub fn sort_name(s: &Sort, codata_names: &[String]) -> String {
    match s {
        Sort::Nat => "Nat".into(),
        Sort::Bool => "Bool".into(),
        Sort::Unit => "Unit".into(),
        Sort::Co(j) => codata_names
            .get(*j)
            .cloned()
            .unwrap_or_else(|| format!("<codata {j}>")),
        Sort::List(t) => format!("List {}", sort_name(t, codata_names)),
        Sort::FinSet(t) => format!("FinSet {}", sort_name(t, codata_names)),
        Sort::Prod(ts) => {
            let inner: Vec<_> = ts.iter().map(|t| sort_name(t, codata_names)).collect();
            format!("({})", inner.join(", "))
        }
        Sort::Fun(args, ret) => {
            let inner: Vec<_> = args.iter().map(|t| sort_name(t, codata_names)).collect();
            format!("{} -> {}", inner.join(" -> "), sort_name(ret, codata_names))
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub enum ArithOp {
    Add,
    /// Truncated subtraction on naturals.
    Monus,
    Mul,
    Pow,
    Gcd,
}

impl fmt::Display for ArithOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ArithOp::Add => "+",
            ArithOp::Monus => "−",
            ArithOp::Mul => "×",
            ArithOp::Pow => "^",
            ArithOp::Gcd => "gcd",
        };
        write!(f, "{s}")
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub enum CmpOp {
    Eq,
    Lt,
    Gt,
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CmpOp::Eq => "=",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
        };
        write!(f, "{s}")
    }
}
