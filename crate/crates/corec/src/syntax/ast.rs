//! Surface abstract syntax. Every node carries its source span.

use crate::base::Span;
use num_bigint::BigUint;

#[derive(Clone, Debug)]
pub struct SourceFile {
    pub decls: Vec<Decl>,
}

#[derive(Clone, Debug)]
pub enum Decl {
    Codatatype(CodatatypeDecl),
    Fun(FunDecl),
    Command(Command),
}

#[derive(Clone, Debug)]
pub struct Ident {
    pub text: String,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct CodatatypeDecl {
    pub name: Ident,
    pub ctors: Vec<CtorDecl>,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct CtorDecl {
    pub name: Ident,
    pub fields: Vec<(Ident, TypeExpr)>,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct FunDecl {
    pub name: Ident,
    pub well_behaved: bool,
    pub params: Vec<(Ident, TypeExpr)>,
    pub ret: TypeExpr,
    pub body: SExpr,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum TypeExpr {
    Name(Ident),
    List(Box<TypeExpr>, Span),
    FinSet(Box<TypeExpr>, Span),
    Prod(Vec<TypeExpr>, Span),
    Arrow(Box<TypeExpr>, Box<TypeExpr>, Span),
}

impl TypeExpr {
    pub fn span(&self) -> Span {
        match self {
            TypeExpr::Name(id) => id.span,
            TypeExpr::List(_, s)
            | TypeExpr::FinSet(_, s)
            | TypeExpr::Prod(_, s)
            | TypeExpr::Arrow(_, _, s) => *s,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Command {
    Force {
        expr: SExpr,
        depth: u64,
        span: Span,
    },
    Check {
        lhs: SExpr,
        rhs: SExpr,
        depth: u64,
        span: Span,
    },
    Register {
        name: Ident,
        span: Span,
    },
    Prove {
        name: Option<Ident>,
        lhs: SExpr,
        rhs: SExpr,
        schemas: Vec<(SExpr, SExpr)>,
        depth: u64,
        lemmas: Vec<Ident>,
        span: Span,
    },
    Fuel {
        amount: u64,
        span: Span,
    },
}

impl Command {
    pub fn span(&self) -> Span {
        match self {
            Command::Force { span, .. }
            | Command::Check { span, .. }
            | Command::Register { span, .. }
            | Command::Prove { span, .. }
            | Command::Fuel { span, .. } => *span,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SExpr {
    pub kind: SExprKind,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum SExprKind {
    Nat(BigUint),
    True,
    False,
    UnitLit,
    Name(String),
    /// Spine application `f a b …`.
    App(Box<SExpr>, Vec<SExpr>),
    /// Binary operator: arithmetic, comparison, boolean, or a declared
    /// operator symbol.
    BinOp(String, Box<SExpr>, Box<SExpr>),
    Not(Box<SExpr>),
    If(Box<SExpr>, Box<SExpr>, Box<SExpr>),
    Tuple(Vec<SExpr>),
    ListLit(Vec<SExpr>),
    SetLit(Vec<SExpr>),
    /// Tuple-pattern lambda, only legal as a combinator's function
    /// argument.
    Lambda(Vec<Ident>, Box<SExpr>),
    /// `exists-in xs P`: bounded witness search over a codata list.
    ExistsIn(Box<SExpr>, Box<SExpr>),
}

impl SExpr {
    pub fn new(kind: SExprKind, span: Span) -> SExpr {
        SExpr { kind, span }
    }
}

/// Structural equality ignoring spans.
pub fn sexpr_eq(a: &SExpr, b: &SExpr) -> bool {
    use SExprKind::*;
    match (&a.kind, &b.kind) {
        (Nat(x), Nat(y)) => x == y,
        (True, True) | (False, False) | (UnitLit, UnitLit) => true,
        (Name(x), Name(y)) => x == y,
        (App(f, xs), App(g, ys)) => {
            sexpr_eq(f, g) && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| sexpr_eq(x, y))
        }
        (BinOp(o1, a1, b1), BinOp(o2, a2, b2)) => o1 == o2 && sexpr_eq(a1, a2) && sexpr_eq(b1, b2),
        (Not(x), Not(y)) => sexpr_eq(x, y),
        (If(c1, t1, e1), If(c2, t2, e2)) => {
            sexpr_eq(c1, c2) && sexpr_eq(t1, t2) && sexpr_eq(e1, e2)
        }
        (Tuple(xs), Tuple(ys)) | (ListLit(xs), ListLit(ys)) | (SetLit(xs), SetLit(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| sexpr_eq(x, y))
        }
        (Lambda(p1, b1), Lambda(p2, b2)) => {
            p1.len() == p2.len()
                && p1.iter().zip(p2).all(|(x, y)| x.text == y.text)
                && sexpr_eq(b1, b2)
        }
        (ExistsIn(l1, p1), ExistsIn(l2, p2)) => sexpr_eq(l1, l2) && sexpr_eq(p1, p2),
        _ => false,
    }
}
