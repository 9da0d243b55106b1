//! Name resolution and monomorphic sorting.
//!
//! Turns surface expressions into a fully annotated core form: every
//! reference bound, every node carrying its sort, self-call sites marked.
//! Resolution is deterministic. A schema mode additionally admits free
//! codata-sorted variables for proof goals.

use super::ast::{self, SExpr, SExprKind, TypeExpr};
use crate::base::{ArithOp, CmpOp, CodataId, FunId, SourceMap, Sort, Span};
use crate::error::ResolveError;
use crate::functor::{sort_to_desc, FunctorDesc};
use num_bigint::BigUint;
use std::rc::Rc;

#[derive(Clone, Debug)]
pub struct CodataInfo {
    pub name: String,
    pub id: CodataId,
    pub ctors: Vec<CtorInfo>,
    pub layer_desc: FunctorDesc,
}

#[derive(Clone, Debug)]
pub struct CtorInfo {
    pub name: String,
    pub tag: u32,
    pub fields: Vec<(String, Sort)>,
    pub arm_desc: FunctorDesc,
}

impl CodataInfo {
    pub fn selector(&self, name: &str) -> Option<(u32, u32, Sort)> {
        for c in &self.ctors {
            for (i, (fname, fsort)) in c.fields.iter().enumerate() {
                if fname == name {
                    return Some((c.tag, i as u32, fsort.clone()));
                }
            }
        }
        None
    }
}

#[derive(Clone, Debug)]
pub struct FunSig {
    pub name: String,
    pub params: Vec<Sort>,
    pub ret: Sort,
    /// Rejected definitions keep their signature but cannot be referenced.
    pub usable: bool,
}

/// Fully resolved expression.
#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
    pub sort: Sort,
}

#[derive(Clone, Debug)]
pub enum ElemFn {
    Selector {
        codata: CodataId,
        tag: u32,
        field: u32,
        name: String,
    },
    Fun(FunId, String),
    Var(usize, String),
}

impl ElemFn {
    pub fn name(&self) -> &str {
        match self {
            ElemFn::Selector { name, .. } | ElemFn::Fun(_, name) | ElemFn::Var(_, name) => name,
        }
    }
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    Nat(BigUint),
    Bool(bool),
    UnitVal,
    /// Index into the flat environment: parameters first, then lambda
    /// bindings in scope order.
    Var(usize),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Ctor {
        codata: CodataId,
        tag: u32,
        args: Vec<Expr>,
    },
    Sel {
        codata: CodataId,
        tag: u32,
        field: u32,
        name: String,
        arg: Box<Expr>,
    },
    Call {
        fun: FunId,
        is_self: bool,
        name: String,
        args: Vec<Expr>,
    },
    /// Application of a predicate-sorted variable.
    PredApp {
        var: usize,
        name: String,
        args: Vec<Expr>,
    },
    /// A function name used as a value.
    FunRef(FunId),
    Tuple(Vec<Expr>),
    ListLit(Vec<Expr>),
    SetLit(Vec<Expr>),
    /// `map (λ…) list`: the lambda binds `n_pats` fresh slots at the end
    /// of the environment.
    MapList {
        n_pats: usize,
        body: Box<Expr>,
        list: Box<Expr>,
    },
    Zip(Box<Expr>, Box<Expr>),
    Fimage {
        f: ElemFn,
        set: Box<Expr>,
    },
    Fmax(Box<Expr>),
    ExistsIn {
        list: Box<Expr>,
        pred: ElemFn,
    },
    /// Free variable of a proof schema, universally quantified.
    SchemaVar(String),
}

#[derive(Clone, Debug)]
pub struct ResolvedFun {
    pub name: String,
    pub fun_id: FunId,
    pub params: Vec<(String, Sort)>,
    pub ret: Sort,
    pub body: Expr,
    pub self_sites: usize,
}

pub struct ResolveCtx<'a> {
    pub codatas: &'a [CodataInfo],
    pub funs: &'a [FunSig],
    pub map: &'a SourceMap,
    /// Id of the function whose body is being resolved, if any.
    pub self_id: Option<FunId>,
}

struct Scope {
    names: Vec<(String, Sort)>,
}

#[derive(Default)]
pub struct SchemaVars {
    pub vars: Vec<(String, Sort)>,
}

impl<'a> ResolveCtx<'a> {
    fn codata_names(&self) -> Vec<String> {
        self.codatas.iter().map(|c| c.name.clone()).collect()
    }

    fn sort_name(&self, s: &Sort) -> String {
        crate::base::sort_name(s, &self.codata_names())
    }

    fn unbound(&self, name: &str, span: Span) -> ResolveError {
        let (line, col) = self.map.line_col(span.start);
        ResolveError::UnboundName {
            name: name.to_string(),
            line,
            col,
            span,
        }
    }

    fn mismatch(&self, expected: &str, found: &str, span: Span) -> ResolveError {
        let (line, col) = self.map.line_col(span.start);
        ResolveError::SortMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
            line,
            col,
            span,
        }
    }

    fn bad(&self, msg: impl Into<String>, span: Span) -> ResolveError {
        let (line, col) = self.map.line_col(span.start);
        ResolveError::BadDecl {
            msg: msg.into(),
            line,
            col,
            span,
        }
    }

    fn find_codata(&self, name: &str) -> Option<&CodataInfo> {
        self.codatas.iter().find(|c| c.name == name)
    }

    fn find_ctor(&self, name: &str) -> Option<(&CodataInfo, &CtorInfo)> {
        for c in self.codatas {
            for ct in &c.ctors {
                if ct.name == name {
                    return Some((c, ct));
                }
            }
        }
        None
    }

    fn find_fun(&self, name: &str) -> Option<(FunId, &FunSig)> {
        self.funs
            .iter()
            .enumerate()
            .rev()
            .find(|(_, f)| f.name == name)
    }

    fn selector_candidates(&self, name: &str) -> Vec<&CodataInfo> {
        self.codatas
            .iter()
            .filter(|c| c.selector(name).is_some())
            .collect()
    }
}

pub fn resolve_type(
    ctx: &ResolveCtx,
    t: &TypeExpr,
    self_codata: Option<(&str, CodataId)>,
) -> Result<Sort, ResolveError> {
    Ok(match t {
        TypeExpr::Name(id) => match id.text.as_str() {
            "Nat" => Sort::Nat,
            "Bool" => Sort::Bool,
            "Unit" => Sort::Unit,
            other => {
                if let Some((name, j)) = self_codata {
                    if name == other {
                        return Ok(Sort::Co(j));
                    }
                }
                match ctx.find_codata(other) {
                    Some(c) => Sort::Co(c.id),
                    None => return Err(ctx.unbound(other, id.span)),
                }
            }
        },
        TypeExpr::List(inner, _) => Sort::List(Box::new(resolve_type(ctx, inner, self_codata)?)),
        TypeExpr::FinSet(inner, _) => {
            Sort::FinSet(Box::new(resolve_type(ctx, inner, self_codata)?))
        }
        TypeExpr::Prod(items, _) => Sort::Prod(
            items
                .iter()
                .map(|i| resolve_type(ctx, i, self_codata))
                .collect::<Result<_, _>>()?,
        ),
        TypeExpr::Arrow(a, b, span) => {
            let dom = resolve_type(ctx, a, self_codata)?;
            let cod = resolve_type(ctx, b, self_codata)?;
            if !dom.is_base() || !cod.is_base() {
                return Err(ctx.bad(
                    "function sorts are restricted to base sorts on both sides",
                    *span,
                ));
            }
            Sort::Fun(vec![dom], Box::new(cod))
        }
    })
}

/// Resolves a codatatype declaration into its layer functor. The declared
/// type may occur recursively in selector sorts, possibly nested under
/// `List` or `FinSet`; no other codatatype may.
pub fn resolve_codatatype(
    ctx: &ResolveCtx,
    decl: &ast::CodatatypeDecl,
    new_id: CodataId,
) -> Result<CodataInfo, ResolveError> {
    let mut ctors = Vec::new();
    let mut arm_descs = Vec::new();
    let mut seen_fields: Vec<String> = Vec::new();
    for (tag, c) in decl.ctors.iter().enumerate() {
        let mut fields = Vec::new();
        for (fname, fty) in &c.fields {
            if seen_fields.contains(&fname.text) {
                let (line, col) = ctx.map.line_col(fname.span.start);
                return Err(ResolveError::Duplicate {
                    name: fname.text.clone(),
                    line,
                    col,
                    span: fname.span,
                });
            }
            seen_fields.push(fname.text.clone());
            let sort = resolve_type(ctx, fty, Some((&decl.name.text, new_id)))?;
            fields.push((fname.text.clone(), sort));
        }
        let arm_desc = if fields.is_empty() {
            FunctorDesc::ConstUnit
        } else {
            let ds = fields
                .iter()
                .map(|(fname, s)| {
                    sort_to_desc(s, new_id).ok_or_else(|| {
                        ctx.bad(
                            format!(
                                "selector `{fname}` has sort {}, which cannot appear in a layer",
                                ctx.sort_name(s)
                            ),
                            c.span,
                        )
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if ds.len() == 1 {
                ds.into_iter().next().unwrap()
            } else {
                FunctorDesc::prod(ds)
            }
        };
        arm_descs.push(arm_desc.clone());
        ctors.push(CtorInfo {
            name: c.name.text.clone(),
            tag: tag as u32,
            fields,
            arm_desc,
        });
    }
    let layer_desc = if arm_descs.len() == 1 {
        arm_descs.into_iter().next().unwrap()
    } else {
        FunctorDesc::Sum(arm_descs.into_iter().map(Rc::new).collect())
    };
    Ok(CodataInfo {
        name: decl.name.text.clone(),
        id: new_id,
        ctors,
        layer_desc,
    })
}

/// Resolves a function declaration. The function's own signature must
/// already be visible in `ctx.funs` (as entry `fun_id`) so that
/// self-calls resolve; they are marked `is_self`.
pub fn resolve_fun(
    ctx: &ResolveCtx,
    decl: &ast::FunDecl,
    fun_id: FunId,
) -> Result<ResolvedFun, ResolveError> {
    let mut params = Vec::new();
    let mut scope = Scope { names: Vec::new() };
    for (pname, pty) in &decl.params {
        if scope.names.iter().any(|(n, _)| n == &pname.text) {
            let (line, col) = ctx.map.line_col(pname.span.start);
            return Err(ResolveError::Duplicate {
                name: pname.text.clone(),
                line,
                col,
                span: pname.span,
            });
        }
        let sort = resolve_type(ctx, pty, None)?;
        scope.names.push((pname.text.clone(), sort.clone()));
        params.push((pname.text.clone(), sort));
    }
    let ret = resolve_type(ctx, &decl.ret, None)?;
    let body = resolve_expr(ctx, &mut scope, &decl.body, Some(&ret), None)?;
    let mut self_sites = 0;
    count_self_sites(&body, &mut self_sites);
    Ok(ResolvedFun {
        name: decl.name.text.clone(),
        fun_id,
        params,
        ret,
        body,
        self_sites,
    })
}

/// Resolves a closed command expression (no parameters in scope).
pub fn resolve_closed_expr(
    ctx: &ResolveCtx,
    e: &SExpr,
    expected: Option<&Sort>,
) -> Result<Expr, ResolveError> {
    let mut scope = Scope { names: Vec::new() };
    resolve_expr(ctx, &mut scope, e, expected, None)
}

/// Resolves a proof-schema expression: free names become universally
/// quantified codata variables, with sorts inferred from their use.
pub fn resolve_schema_expr(
    ctx: &ResolveCtx,
    e: &SExpr,
    vars: &mut SchemaVars,
) -> Result<Expr, ResolveError> {
    let mut scope = Scope { names: Vec::new() };
    resolve_expr(ctx, &mut scope, e, None, Some(vars))
}

fn count_self_sites(e: &Expr, n: &mut usize) {
    if let ExprKind::Call { is_self: true, .. } = &e.kind {
        *n += 1;
    }
    visit_children(e, &mut |c| count_self_sites(c, n));
}

/// Calls `f` on every direct child expression.
pub fn visit_children(e: &Expr, f: &mut impl FnMut(&Expr)) {
    match &e.kind {
        ExprKind::Nat(_)
        | ExprKind::Bool(_)
        | ExprKind::UnitVal
        | ExprKind::Var(_)
        | ExprKind::FunRef(_)
        | ExprKind::SchemaVar(_) => {}
        ExprKind::Arith(_, a, b)
        | ExprKind::Cmp(_, a, b)
        | ExprKind::And(a, b)
        | ExprKind::Or(a, b)
        | ExprKind::Zip(a, b) => {
            f(a);
            f(b);
        }
        ExprKind::Not(a) | ExprKind::Fmax(a) => f(a),
        ExprKind::If(c, t, e2) => {
            f(c);
            f(t);
            f(e2);
        }
        ExprKind::Ctor { args, .. }
        | ExprKind::Call { args, .. }
        | ExprKind::PredApp { args, .. }
        | ExprKind::Tuple(args)
        | ExprKind::ListLit(args)
        | ExprKind::SetLit(args) => {
            for a in args {
                f(a);
            }
        }
        ExprKind::Sel { arg, .. } => f(arg),
        ExprKind::MapList { body, list, .. } => {
            f(body);
            f(list);
        }
        ExprKind::Fimage { set, .. } => f(set),
        ExprKind::ExistsIn { list, .. } => f(list),
    }
}

fn check_expected(
    ctx: &ResolveCtx,
    expected: Option<&Sort>,
    found: &Sort,
    span: Span,
) -> Result<(), ResolveError> {
    if let Some(exp) = expected {
        if exp != found {
            return Err(ctx.mismatch(&ctx.sort_name(exp), &ctx.sort_name(found), span));
        }
    }
    Ok(())
}

fn resolve_expr(
    ctx: &ResolveCtx,
    scope: &mut Scope,
    e: &SExpr,
    expected: Option<&Sort>,
    mut schema: Option<&mut SchemaVars>,
) -> Result<Expr, ResolveError> {
    let span = e.span;
    let done = |kind: ExprKind, sort: Sort| -> Result<Expr, ResolveError> {
        Ok(Expr { kind, span, sort })
    };
    match &e.kind {
        SExprKind::Nat(n) => {
            check_expected(ctx, expected, &Sort::Nat, span)?;
            done(ExprKind::Nat(n.clone()), Sort::Nat)
        }
        SExprKind::True => {
            check_expected(ctx, expected, &Sort::Bool, span)?;
            done(ExprKind::Bool(true), Sort::Bool)
        }
        SExprKind::False => {
            check_expected(ctx, expected, &Sort::Bool, span)?;
            done(ExprKind::Bool(false), Sort::Bool)
        }
        SExprKind::UnitLit => {
            check_expected(ctx, expected, &Sort::Unit, span)?;
            done(ExprKind::UnitVal, Sort::Unit)
        }
        SExprKind::Name(name) => resolve_name(ctx, scope, name, span, expected, schema),
        SExprKind::Not(inner) => {
            check_expected(ctx, expected, &Sort::Bool, span)?;
            let inner = resolve_expr(ctx, scope, inner, Some(&Sort::Bool), schema)?;
            done(ExprKind::Not(Box::new(inner)), Sort::Bool)
        }
        SExprKind::If(c, t, f) => {
            let c = resolve_expr(ctx, scope, c, Some(&Sort::Bool), schema.as_deref_mut())?;
            let t = resolve_expr(ctx, scope, t, expected, schema.as_deref_mut())?;
            let t_sort = t.sort.clone();
            let f = resolve_expr(ctx, scope, f, Some(&t_sort), schema)?;
            done(ExprKind::If(Box::new(c), Box::new(t), Box::new(f)), t_sort)
        }
        SExprKind::Tuple(items) => {
            let exp_items: Option<Vec<&Sort>> = match expected {
                Some(Sort::Prod(es)) if es.len() == items.len() => Some(es.iter().collect()),
                Some(other) => {
                    return Err(ctx.mismatch(
                        &ctx.sort_name(other),
                        &format!("a {}-tuple", items.len()),
                        span,
                    ))
                }
                None => None,
            };
            let mut out = Vec::new();
            for (i, item) in items.iter().enumerate() {
                let exp = exp_items.as_ref().map(|v| v[i]);
                out.push(resolve_expr(ctx, scope, item, exp, schema.as_deref_mut())?);
            }
            let sort = Sort::Prod(out.iter().map(|e| e.sort.clone()).collect());
            done(ExprKind::Tuple(out), sort)
        }
        SExprKind::ListLit(items) => {
            let elem_expected: Option<Sort> = match expected {
                Some(Sort::List(inner)) => Some((**inner).clone()),
                Some(other) => {
                    return Err(ctx.mismatch(&ctx.sort_name(other), "a list literal", span))
                }
                None => None,
            };
            let mut out = Vec::new();
            let mut elem_sort = elem_expected;
            for item in items {
                let r = resolve_expr(ctx, scope, item, elem_sort.as_ref(), schema.as_deref_mut())?;
                if elem_sort.is_none() {
                    elem_sort = Some(r.sort.clone());
                }
                out.push(r);
            }
            let elem = match elem_sort {
                Some(s) => s,
                None => {
                    return Err(
                        ctx.bad("cannot infer the element sort of an empty list literal", span)
                    )
                }
            };
            done(ExprKind::ListLit(out), Sort::List(Box::new(elem)))
        }
        SExprKind::SetLit(items) => {
            let elem_expected: Option<Sort> = match expected {
                Some(Sort::FinSet(inner)) => Some((**inner).clone()),
                Some(other) => {
                    return Err(ctx.mismatch(&ctx.sort_name(other), "a finite-set literal", span))
                }
                None => None,
            };
            let mut out = Vec::new();
            let mut elem_sort = elem_expected;
            for item in items {
                let r = resolve_expr(ctx, scope, item, elem_sort.as_ref(), schema.as_deref_mut())?;
                if elem_sort.is_none() {
                    elem_sort = Some(r.sort.clone());
                }
                out.push(r);
            }
            let elem = match elem_sort {
                Some(s) => s,
                None => {
                    return Err(ctx.bad(
                        "cannot infer the element sort of an empty finite-set literal",
                        span,
                    ))
                }
            };
            done(ExprKind::SetLit(out), Sort::FinSet(Box::new(elem)))
        }
        SExprKind::Lambda(..) => Err(ctx.bad(
            "a lambda is only allowed as the function argument of `map`",
            span,
        )),
        SExprKind::ExistsIn(list, pred) => {
            check_expected(ctx, expected, &Sort::Bool, span)?;
            let list = resolve_expr(ctx, scope, list, None, schema)?;
            let Sort::Co(_) = list.sort else {
                return Err(ctx.mismatch("a codata list", &ctx.sort_name(&list.sort), list.span));
            };
            let pred = resolve_elem_fn(ctx, scope, pred, &Sort::Nat)?;
            done(
                ExprKind::ExistsIn {
                    list: Box::new(list),
                    pred,
                },
                Sort::Bool,
            )
        }
        SExprKind::BinOp(op, a, b) => resolve_binop(ctx, scope, op, a, b, span, expected, schema),
        SExprKind::App(head, args) => resolve_app(ctx, scope, head, args, span, expected, schema),
    }
}

fn resolve_name(
    ctx: &ResolveCtx,
    scope: &mut Scope,
    name: &str,
    span: Span,
    expected: Option<&Sort>,
    schema: Option<&mut SchemaVars>,
) -> Result<Expr, ResolveError> {
    // innermost binding wins
    if let Some(idx) = scope.names.iter().rposition(|(n, _)| n == name) {
        let sort = scope.names[idx].1.clone();
        check_expected(ctx, expected, &sort, span)?;
        return Ok(Expr {
            kind: ExprKind::Var(idx),
            span,
            sort,
        });
    }
    if let Some((c, ct)) = ctx.find_ctor(name) {
        if ct.fields.is_empty() {
            let sort = Sort::Co(c.id);
            check_expected(ctx, expected, &sort, span)?;
            return Ok(Expr {
                kind: ExprKind::Ctor {
                    codata: c.id,
                    tag: ct.tag,
                    args: vec![],
                },
                span,
                sort,
            });
        }
        return Err(ctx.bad(
            format!("constructor `{name}` expects {} arguments", ct.fields.len()),
            span,
        ));
    }
    if let Some((fid, sig)) = ctx.find_fun(name) {
        if !sig.usable {
            return Err(ctx.bad(
                format!("`{name}` was rejected earlier and cannot be referenced"),
                span,
            ));
        }
        if sig.params.is_empty() {
            let sort = sig.ret.clone();
            check_expected(ctx, expected, &sort, span)?;
            return Ok(Expr {
                kind: ExprKind::Call {
                    fun: fid,
                    is_self: ctx.self_id == Some(fid),
                    name: name.to_string(),
                    args: vec![],
                },
                span,
                sort,
            });
        }
        // Function used as a value.
        let sort = Sort::Fun(sig.params.clone(), Box::new(sig.ret.clone()));
        check_expected(ctx, expected, &sort, span)?;
        return Ok(Expr {
            kind: ExprKind::FunRef(fid),
            span,
            sort,
        });
    }
    if let Some(vars) = schema {
        if let Some((_, s)) = vars.vars.iter().find(|(n, _)| n == name) {
            let sort = s.clone();
            check_expected(ctx, expected, &sort, span)?;
            return Ok(Expr {
                kind: ExprKind::SchemaVar(name.to_string()),
                span,
                sort,
            });
        }
        match expected {
            Some(sort @ Sort::Co(_)) => {
                vars.vars.push((name.to_string(), sort.clone()));
                return Ok(Expr {
                    kind: ExprKind::SchemaVar(name.to_string()),
                    span,
                    sort: sort.clone(),
                });
            }
            Some(other) => {
                return Err(ctx.mismatch(
                    &ctx.sort_name(other),
                    "a schema variable (codata-sorted only)",
                    span,
                ))
            }
            None => {
                return Err(ctx.bad(
                    format!("cannot infer a sort for schema variable `{name}`"),
                    span,
                ))
            }
        }
    }
    Err(ctx.unbound(name, span))
}

#[allow(clippy::too_many_arguments)]
fn resolve_binop(
    ctx: &ResolveCtx,
    scope: &mut Scope,
    op: &str,
    a: &SExpr,
    b: &SExpr,
    span: Span,
    expected: Option<&Sort>,
    mut schema: Option<&mut SchemaVars>,
) -> Result<Expr, ResolveError> {
    let arith_op = match op {
        "+" => Some(ArithOp::Add),
        "−" => Some(ArithOp::Monus),
        "×" => Some(ArithOp::Mul),
        "^" => Some(ArithOp::Pow),
        _ => None,
    };
    if let Some(o) = arith_op {
        check_expected(ctx, expected, &Sort::Nat, span)?;
        let a = resolve_expr(ctx, scope, a, Some(&Sort::Nat), schema.as_deref_mut())?;
        let b = resolve_expr(ctx, scope, b, Some(&Sort::Nat), schema)?;
        return Ok(Expr {
            kind: ExprKind::Arith(o, Box::new(a), Box::new(b)),
            span,
            sort: Sort::Nat,
        });
    }
    match op {
        "and" | "or" => {
            check_expected(ctx, expected, &Sort::Bool, span)?;
            let a = resolve_expr(ctx, scope, a, Some(&Sort::Bool), schema.as_deref_mut())?;
            let b = resolve_expr(ctx, scope, b, Some(&Sort::Bool), schema)?;
            let kind = if op == "and" {
                ExprKind::And(Box::new(a), Box::new(b))
            } else {
                ExprKind::Or(Box::new(a), Box::new(b))
            };
            Ok(Expr {
                kind,
                span,
                sort: Sort::Bool,
            })
        }
        "=" | "<" | ">" => {
            check_expected(ctx, expected, &Sort::Bool, span)?;
            let cmp = match op {
                "=" => CmpOp::Eq,
                "<" => CmpOp::Lt,
                _ => CmpOp::Gt,
            };
            let a = resolve_expr(ctx, scope, a, Some(&Sort::Nat), schema.as_deref_mut())?;
            let b = resolve_expr(ctx, scope, b, Some(&Sort::Nat), schema)?;
            Ok(Expr {
                kind: ExprKind::Cmp(cmp, Box::new(a), Box::new(b)),
                span,
                sort: Sort::Bool,
            })
        }
        // A declared operator symbol: a binary function call.
        _ => {
            let (fid, sig) = ctx.find_fun(op).ok_or_else(|| ctx.unbound(op, span))?;
            if !sig.usable {
                return Err(ctx.bad(
                    format!("`{op}` was rejected earlier and cannot be referenced"),
                    span,
                ));
            }
            if sig.params.len() != 2 {
                return Err(ctx.bad(
                    format!(
                        "operator `{op}` is declared with {} parameters",
                        sig.params.len()
                    ),
                    span,
                ));
            }
            let ret = sig.ret.clone();
            let p0 = sig.params[0].clone();
            let p1 = sig.params[1].clone();
            check_expected(ctx, expected, &ret, span)?;
            let a = resolve_expr(ctx, scope, a, Some(&p0), schema.as_deref_mut())?;
            let b = resolve_expr(ctx, scope, b, Some(&p1), schema)?;
            Ok(Expr {
                kind: ExprKind::Call {
                    fun: fid,
                    is_self: ctx.self_id == Some(fid),
                    name: op.to_string(),
                    args: vec![a, b],
                },
                span,
                sort: ret,
            })
        }
    }
}

fn resolve_elem_fn(
    ctx: &ResolveCtx,
    scope: &Scope,
    e: &SExpr,
    domain: &Sort,
) -> Result<ElemFn, ResolveError> {
    let span = e.span;
    let SExprKind::Name(name) = &e.kind else {
        return Err(ctx.bad("expected a named function or selector here", span));
    };
    if let Some(idx) = scope.names.iter().rposition(|(n, _)| n == name) {
        let sort = &scope.names[idx].1;
        match sort {
            Sort::Fun(params, _) if params.len() == 1 && &params[0] == domain => {
                return Ok(ElemFn::Var(idx, name.clone()));
            }
            _ => {
                return Err(ctx.mismatch(
                    &format!("{} -> _", ctx.sort_name(domain)),
                    &ctx.sort_name(sort),
                    span,
                ))
            }
        }
    }
    if let Sort::Co(j) = domain {
        if let Some(c) = ctx.codatas.get(*j) {
            if let Some((tag, field, _)) = c.selector(name) {
                return Ok(ElemFn::Selector {
                    codata: *j,
                    tag,
                    field,
                    name: name.clone(),
                });
            }
        }
    }
    if let Some((fid, sig)) = ctx.find_fun(name) {
        if sig.params.len() == 1 && &sig.params[0] == domain {
            return Ok(ElemFn::Fun(fid, name.clone()));
        }
        return Err(ctx.mismatch(
            &format!("{} -> _", ctx.sort_name(domain)),
            &format!("`{name}` with {} parameters", sig.params.len()),
            span,
        ));
    }
    Err(ctx.unbound(name, span))
}

fn elem_fn_result(ctx: &ResolveCtx, f: &ElemFn, scope: &Scope) -> Sort {
    match f {
        ElemFn::Selector {
            codata, tag, field, ..
        } => ctx.codatas[*codata].ctors[*tag as usize].fields[*field as usize]
            .1
            .clone(),
        ElemFn::Fun(fid, _) => ctx.funs[*fid].ret.clone(),
        ElemFn::Var(idx, _) => match &scope.names[*idx].1 {
            Sort::Fun(_, ret) => (**ret).clone(),
            other => other.clone(),
        },
    }
}

#[allow(clippy::too_many_arguments)]
fn resolve_app(
    ctx: &ResolveCtx,
    scope: &mut Scope,
    head: &SExpr,
    args: &[SExpr],
    span: Span,
    expected: Option<&Sort>,
    mut schema: Option<&mut SchemaVars>,
) -> Result<Expr, ResolveError> {
    let SExprKind::Name(name) = &head.kind else {
        return Err(ctx.bad("only named functions can be applied", head.span));
    };
    match name.as_str() {
        "gcd" => {
            if args.len() != 2 {
                return Err(ctx.bad("gcd expects two arguments", span));
            }
            check_expected(ctx, expected, &Sort::Nat, span)?;
            let a = resolve_expr(ctx, scope, &args[0], Some(&Sort::Nat), schema.as_deref_mut())?;
            let b = resolve_expr(ctx, scope, &args[1], Some(&Sort::Nat), schema)?;
            return Ok(Expr {
                kind: ExprKind::Arith(ArithOp::Gcd, Box::new(a), Box::new(b)),
                span,
                sort: Sort::Nat,
            });
        }
        "map" => {
            if args.len() != 2 {
                return Err(ctx.bad("map expects a lambda and a list", span));
            }
            let SExprKind::Lambda(pats, body) = &args[0].kind else {
                return Err(ctx.bad(
                    "the first argument of map must be a tuple-pattern lambda",
                    args[0].span,
                ));
            };
            let list = resolve_expr(ctx, scope, &args[1], None, schema.as_deref_mut())?;
            let Sort::List(elem) = list.sort.clone() else {
                return Err(ctx.mismatch("a list", &ctx.sort_name(&list.sort), list.span));
            };
            let bound: Vec<(String, Sort)> = if pats.len() == 1 {
                vec![(pats[0].text.clone(), (*elem).clone())]
            } else {
                let Sort::Prod(components) = (*elem).clone() else {
                    return Err(ctx.mismatch(
                        &format!("a {}-tuple element", pats.len()),
                        &ctx.sort_name(&elem),
                        args[0].span,
                    ));
                };
                if components.len() != pats.len() {
                    return Err(ctx.mismatch(
                        &format!("a {}-tuple element", pats.len()),
                        &ctx.sort_name(&elem),
                        args[0].span,
                    ));
                }
                pats.iter().map(|p| p.text.clone()).zip(components).collect()
            };
            let n_pats = bound.len();
            let body_expected = match expected {
                Some(Sort::List(inner)) => Some((**inner).clone()),
                _ => None,
            };
            for b in &bound {
                scope.names.push(b.clone());
            }
            let body = resolve_expr(ctx, scope, body, body_expected.as_ref(), schema);
            scope.names.truncate(scope.names.len() - n_pats);
            let body = body?;
            let sort = Sort::List(Box::new(body.sort.clone()));
            return Ok(Expr {
                kind: ExprKind::MapList {
                    n_pats,
                    body: Box::new(body),
                    list: Box::new(list),
                },
                span,
                sort,
            });
        }
        "zip" => {
            if args.len() != 2 {
                return Err(ctx.bad("zip expects two lists", span));
            }
            let a = resolve_expr(ctx, scope, &args[0], None, schema.as_deref_mut())?;
            let b = resolve_expr(ctx, scope, &args[1], None, schema)?;
            let (Sort::List(ea), Sort::List(eb)) = (a.sort.clone(), b.sort.clone()) else {
                return Err(ctx.mismatch("two lists", &ctx.sort_name(&a.sort), span));
            };
            let sort = Sort::List(Box::new(Sort::Prod(vec![*ea, *eb])));
            return Ok(Expr {
                kind: ExprKind::Zip(Box::new(a), Box::new(b)),
                span,
                sort,
            });
        }
        "fimage" => {
            if args.len() != 2 {
                return Err(ctx.bad("fimage expects a function and a finite set", span));
            }
            let set = resolve_expr(ctx, scope, &args[1], None, schema)?;
            let Sort::FinSet(elem) = set.sort.clone() else {
                return Err(ctx.mismatch("a finite set", &ctx.sort_name(&set.sort), set.span));
            };
            let f = resolve_elem_fn(ctx, scope, &args[0], &elem)?;
            let out = elem_fn_result(ctx, &f, scope);
            let sort = Sort::FinSet(Box::new(out));
            return Ok(Expr {
                kind: ExprKind::Fimage {
                    f,
                    set: Box::new(set),
                },
                span,
                sort,
            });
        }
        "fmax" => {
            if args.len() != 1 {
                return Err(ctx.bad("fmax expects one finite set of naturals", span));
            }
            check_expected(ctx, expected, &Sort::Nat, span)?;
            let set = resolve_expr(
                ctx,
                scope,
                &args[0],
                Some(&Sort::FinSet(Box::new(Sort::Nat))),
                schema,
            )?;
            return Ok(Expr {
                kind: ExprKind::Fmax(Box::new(set)),
                span,
                sort: Sort::Nat,
            });
        }
        _ => {}
    }

    // Constructor application.
    if let Some((c, ct)) = ctx.find_ctor(name) {
        let codata = c.id;
        let tag = ct.tag;
        let field_sorts: Vec<Sort> = ct.fields.iter().map(|(_, s)| s.clone()).collect();
        let sort = Sort::Co(codata);
        check_expected(ctx, expected, &sort, span)?;
        if args.len() != field_sorts.len() {
            return Err(ctx.bad(
                format!(
                    "constructor `{name}` expects {} arguments, got {}",
                    field_sorts.len(),
                    args.len()
                ),
                span,
            ));
        }
        let mut out = Vec::new();
        for (a, s) in args.iter().zip(&field_sorts) {
            out.push(resolve_expr(ctx, scope, a, Some(s), schema.as_deref_mut())?);
        }
        return Ok(Expr {
            kind: ExprKind::Ctor {
                codata,
                tag,
                args: out,
            },
            span,
            sort,
        });
    }

    // Selector application: resolved through the argument's sort.
    let sel_candidates = ctx.selector_candidates(name);
    if !sel_candidates.is_empty() && args.len() == 1 {
        let arg = match resolve_expr(ctx, scope, &args[0], None, schema.as_deref_mut()) {
            Ok(a) => a,
            Err(e) => {
                // A schema variable may be unconstrained here; if exactly one
                // codatatype has this selector, use it to pin the sort.
                if sel_candidates.len() == 1 && schema.is_some() {
                    let exp = Sort::Co(sel_candidates[0].id);
                    resolve_expr(ctx, scope, &args[0], Some(&exp), schema.as_deref_mut())
                        .map_err(|_| e)?
                } else {
                    return Err(e);
                }
            }
        };
        if let Sort::Co(j) = arg.sort {
            if let Some((tag, field, fsort)) = ctx.codatas[j].selector(name) {
                check_expected(ctx, expected, &fsort, span)?;
                return Ok(Expr {
                    kind: ExprKind::Sel {
                        codata: j,
                        tag,
                        field,
                        name: name.clone(),
                        arg: Box::new(arg),
                    },
                    span,
                    sort: fsort,
                });
            }
        }
        return Err(ctx.mismatch(
            &format!("a value with selector `{name}`"),
            &ctx.sort_name(&arg.sort),
            args[0].span,
        ));
    }

    // Predicate variable application.
    if let Some(idx) = scope.names.iter().rposition(|(n, _)| n == name) {
        let sort = scope.names[idx].1.clone();
        if let Sort::Fun(params, ret) = sort {
            if args.len() != params.len() {
                return Err(ctx.bad(
                    format!("`{name}` expects {} arguments", params.len()),
                    span,
                ));
            }
            check_expected(ctx, expected, &ret, span)?;
            let mut out = Vec::new();
            for (a, s) in args.iter().zip(&params) {
                out.push(resolve_expr(ctx, scope, a, Some(s), schema.as_deref_mut())?);
            }
            return Ok(Expr {
                kind: ExprKind::PredApp {
                    var: idx,
                    name: name.clone(),
                    args: out,
                },
                span,
                sort: *ret,
            });
        }
        return Err(ctx.mismatch(
            "a function",
            &ctx.sort_name(&scope.names[idx].1),
            head.span,
        ));
    }

    // Function call.
    if let Some((fid, sig)) = ctx.find_fun(name) {
        if !sig.usable {
            return Err(ctx.bad(
                format!("`{name}` was rejected earlier and cannot be referenced"),
                span,
            ));
        }
        let params = sig.params.clone();
        let ret = sig.ret.clone();
        check_expected(ctx, expected, &ret, span)?;
        // `f(a, b)` parses as `f` applied to one tuple literal; splat it
        // when the arity matches.
        let splatted: Vec<&SExpr> = if args.len() == 1 && params.len() > 1 {
            match &args[0].kind {
                SExprKind::Tuple(items) if items.len() == params.len() => items.iter().collect(),
                _ => args.iter().collect(),
            }
        } else {
            args.iter().collect()
        };
        if splatted.len() != params.len() {
            return Err(ctx.bad(
                format!(
                    "`{name}` expects {} arguments, got {}",
                    params.len(),
                    splatted.len()
                ),
                span,
            ));
        }
        let mut out = Vec::new();
        for (a, s) in splatted.iter().zip(&params) {
            out.push(resolve_expr(ctx, scope, a, Some(s), schema.as_deref_mut())?);
        }
        return Ok(Expr {
            kind: ExprKind::Call {
                fun: fid,
                is_self: ctx.self_id == Some(fid),
                name: name.clone(),
                args: out,
            },
            span,
            sort: ret,
        });
    }

    Err(ctx.unbound(name, span))
}
