//! Recursive-descent parser for `.corec` files.
//!
//! Operator precedence, loosest to tightest: `if`/`λ`, `or`, `and`,
//! `not`, comparisons (non-associative), declared operator symbols
//! (left-associative, one level), `+`/`−`, `×`, `^` (right-associative),
//! application by juxtaposition.

use super::ast::*;
use super::lexer::{kw_text, lex, Kw, Spanned, Tok};
use crate::base::{SourceMap, Span};
use crate::error::SyntaxError;

pub fn parse_file(text: &str) -> Result<SourceFile, SyntaxError> {
    let map = SourceMap::new(text);
    let toks = lex(text, &map)?;
    let mut p = Parser {
        toks,
        pos: 0,
        map: &map,
    };
    let mut decls = Vec::new();
    while !p.at_eof() {
        decls.push(p.decl()?);
    }
    Ok(SourceFile { decls })
}

/// Parses a single expression, for library callers and tests.
pub fn parse_expr_str(text: &str) -> Result<SExpr, SyntaxError> {
    let map = SourceMap::new(text);
    let toks = lex(text, &map)?;
    let mut p = Parser {
        toks,
        pos: 0,
        map: &map,
    };
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    map: &'a SourceMap,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        self.toks
            .get(self.pos + 1)
            .map(|s| &s.tok)
            .unwrap_or(&Tok::Eof)
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    fn err(&self, expected: Vec<String>) -> SyntaxError {
        let span = self.span();
        let (line, col) = self.map.line_col(span.start);
        SyntaxError {
            line,
            col,
            expected,
            found: self.peek().describe(),
            span,
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Span, SyntaxError> {
        if *self.peek() == tok {
            let s = self.span();
            self.bump();
            Ok(s)
        } else {
            Err(self.err(vec![tok.describe()]))
        }
    }

    fn expect_kw(&mut self, k: Kw) -> Result<Span, SyntaxError> {
        self.expect(Tok::Kw(k))
    }

    fn expect_eof(&self) -> Result<(), SyntaxError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.err(vec!["end of input".into()]))
        }
    }

    fn ident(&mut self) -> Result<Ident, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(text) => {
                let span = self.span();
                self.bump();
                Ok(Ident { text, span })
            }
            _ => Err(self.err(vec!["identifier".into()])),
        }
    }

    /// A function name: identifier or operator symbol.
    fn name(&mut self) -> Result<Ident, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(text) | Tok::OpSym(text) => {
                let span = self.span();
                self.bump();
                Ok(Ident { text, span })
            }
            _ => Err(self.err(vec!["identifier".into(), "operator symbol".into()])),
        }
    }

    fn nat_u64(&mut self) -> Result<u64, SyntaxError> {
        match self.peek().clone() {
            Tok::Nat(n) => {
                let v = u64::try_from(&n).map_err(|_| self.err(vec!["a small number".into()]))?;
                self.bump();
                Ok(v)
            }
            _ => Err(self.err(vec!["number".into()])),
        }
    }

    // -- declarations -----------------------------------------------------

    fn decl(&mut self) -> Result<Decl, SyntaxError> {
        match self.peek() {
            Tok::Kw(Kw::Codatatype) => self.codatatype().map(Decl::Codatatype),
            Tok::Kw(Kw::Corec) => self.fun_decl().map(Decl::Fun),
            Tok::Kw(Kw::Force)
            | Tok::Kw(Kw::Check)
            | Tok::Kw(Kw::Register)
            | Tok::Kw(Kw::Prove)
            | Tok::Kw(Kw::Fuel) => self.command().map(Decl::Command),
            _ => Err(self.err(vec![
                "`codatatype`".into(),
                "`corec`".into(),
                "a command".into(),
            ])),
        }
    }

    fn codatatype(&mut self) -> Result<CodatatypeDecl, SyntaxError> {
        let start = self.expect_kw(Kw::Codatatype)?;
        let name = self.ident()?;
        self.expect(Tok::Eq)?;
        let mut ctors = vec![self.ctor()?];
        while matches!(self.peek(), Tok::Pipe) {
            self.bump();
            ctors.push(self.ctor()?);
        }
        let span = start.join(self.prev_span());
        Ok(CodatatypeDecl { name, ctors, span })
    }

    fn ctor(&mut self) -> Result<CtorDecl, SyntaxError> {
        let name = self.ident()?;
        let start = name.span;
        let mut fields = Vec::new();
        while matches!(self.peek(), Tok::LParen) {
            self.bump();
            let fname = self.ident()?;
            self.expect(Tok::Colon)?;
            let ty = self.type_expr()?;
            self.expect(Tok::RParen)?;
            fields.push((fname, ty));
        }
        let span = start.join(self.prev_span());
        Ok(CtorDecl { name, fields, span })
    }

    fn fun_decl(&mut self) -> Result<FunDecl, SyntaxError> {
        let start = self.expect_kw(Kw::Corec)?;
        let well_behaved = if matches!(self.peek(), Tok::Kw(Kw::WellBehaved)) {
            self.bump();
            true
        } else {
            false
        };
        let name = self.name()?;
        let mut params = Vec::new();
        if matches!(self.peek(), Tok::LParen) {
            self.bump();
            if !matches!(self.peek(), Tok::RParen) {
                loop {
                    let pname = self.ident()?;
                    self.expect(Tok::Colon)?;
                    let ty = self.type_expr()?;
                    params.push((pname, ty));
                    if matches!(self.peek(), Tok::Comma) {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
        }
        self.expect(Tok::Colon)?;
        let ret = self.type_expr()?;
        self.expect(Tok::Eq)?;
        let body = self.expr()?;
        let span = start.join(body.span);
        Ok(FunDecl {
            name,
            well_behaved,
            params,
            ret,
            body,
            span,
        })
    }

    fn command(&mut self) -> Result<Command, SyntaxError> {
        match self.peek().clone() {
            Tok::Kw(Kw::Force) => {
                let start = self.span();
                self.bump();
                let expr = self.expr()?;
                self.expect_kw(Kw::Upto)?;
                let depth = self.nat_u64()?;
                Ok(Command::Force {
                    expr,
                    depth,
                    span: start.join(self.prev_span()),
                })
            }
            Tok::Kw(Kw::Check) => {
                let start = self.span();
                self.bump();
                let lhs = self.user_op_level()?;
                self.expect(Tok::Eq)?;
                let rhs = self.user_op_level()?;
                self.expect_kw(Kw::Upto)?;
                let depth = self.nat_u64()?;
                Ok(Command::Check {
                    lhs,
                    rhs,
                    depth,
                    span: start.join(self.prev_span()),
                })
            }
            Tok::Kw(Kw::Register) => {
                let start = self.span();
                self.bump();
                let name = self.name()?;
                Ok(Command::Register {
                    span: start.join(name.span),
                    name,
                })
            }
            Tok::Kw(Kw::Fuel) => {
                let start = self.span();
                self.bump();
                let amount = self.nat_u64()?;
                Ok(Command::Fuel {
                    amount,
                    span: start.join(self.prev_span()),
                })
            }
            Tok::Kw(Kw::Prove) => {
                let start = self.span();
                self.bump();
                let name = if matches!(self.peek(), Tok::Ident(_))
                    && matches!(self.peek2(), Tok::Colon)
                {
                    let n = self.ident()?;
                    self.bump(); // colon
                    Some(n)
                } else {
                    None
                };
                let lhs = self.user_op_level()?;
                self.expect(Tok::Eq)?;
                let rhs = self.user_op_level()?;
                self.expect_kw(Kw::Via)?;
                self.expect(Tok::LBrace)?;
                let mut schemas = Vec::new();
                while !matches!(self.peek(), Tok::RBrace) {
                    let pair = self.expr()?;
                    match pair.kind {
                        SExprKind::Tuple(mut items) if items.len() == 2 => {
                            let right = items.pop().unwrap();
                            let left = items.pop().unwrap();
                            schemas.push((left, right));
                        }
                        _ => {
                            return Err(self.err(vec!["a pair `(T, T′)`".into()]));
                        }
                    }
                    if matches!(self.peek(), Tok::Semi) {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(Tok::RBrace)?;
                self.expect_kw(Kw::Depth)?;
                let depth = self.nat_u64()?;
                let mut lemmas = Vec::new();
                if matches!(self.peek(), Tok::Kw(Kw::Using)) {
                    self.bump();
                    while matches!(self.peek(), Tok::Ident(_)) {
                        lemmas.push(self.ident()?);
                    }
                }
                Ok(Command::Prove {
                    name,
                    lhs,
                    rhs,
                    schemas,
                    depth,
                    lemmas,
                    span: start.join(self.prev_span()),
                })
            }
            _ => Err(self.err(vec!["a command".into()])),
        }
    }

    // -- types ------------------------------------------------------------

    fn type_expr(&mut self) -> Result<TypeExpr, SyntaxError> {
        let lhs = self.type_prim()?;
        if matches!(self.peek(), Tok::Arrow) {
            self.bump();
            let rhs = self.type_expr()?;
            let span = lhs.span().join(rhs.span());
            Ok(TypeExpr::Arrow(Box::new(lhs), Box::new(rhs), span))
        } else {
            Ok(lhs)
        }
    }

    fn type_prim(&mut self) -> Result<TypeExpr, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(name) if name == "List" => {
                let start = self.span();
                self.bump();
                let inner = self.type_prim()?;
                let span = start.join(inner.span());
                Ok(TypeExpr::List(Box::new(inner), span))
            }
            Tok::Ident(name) if name == "FinSet" => {
                let start = self.span();
                self.bump();
                let inner = self.type_prim()?;
                let span = start.join(inner.span());
                Ok(TypeExpr::FinSet(Box::new(inner), span))
            }
            Tok::Ident(_) => Ok(TypeExpr::Name(self.ident()?)),
            Tok::LParen => {
                let start = self.span();
                self.bump();
                let mut items = vec![self.type_expr()?];
                while matches!(self.peek(), Tok::Comma) {
                    self.bump();
                    items.push(self.type_expr()?);
                }
                let end = self.expect(Tok::RParen)?;
                if items.len() == 1 {
                    Ok(items.pop().unwrap())
                } else {
                    Ok(TypeExpr::Prod(items, start.join(end)))
                }
            }
            _ => Err(self.err(vec!["a type".into()])),
        }
    }

    // -- expressions --------------------------------------------------------

    pub(crate) fn expr(&mut self) -> Result<SExpr, SyntaxError> {
        match self.peek() {
            Tok::Kw(Kw::If) => {
                let start = self.span();
                self.bump();
                let cond = self.expr()?;
                self.expect_kw(Kw::Then)?;
                let then = self.expr()?;
                self.expect_kw(Kw::Else)?;
                let els = self.expr()?;
                let span = start.join(els.span);
                Ok(SExpr::new(
                    SExprKind::If(Box::new(cond), Box::new(then), Box::new(els)),
                    span,
                ))
            }
            Tok::Lambda => {
                let start = self.span();
                self.bump();
                let pats = match self.peek() {
                    Tok::LParen => {
                        self.bump();
                        let mut ps = vec![self.ident()?];
                        while matches!(self.peek(), Tok::Comma) {
                            self.bump();
                            ps.push(self.ident()?);
                        }
                        self.expect(Tok::RParen)?;
                        ps
                    }
                    _ => vec![self.ident()?],
                };
                self.expect(Tok::Dot)?;
                let body = self.expr()?;
                let span = start.join(body.span);
                Ok(SExpr::new(SExprKind::Lambda(pats, Box::new(body)), span))
            }
            _ => self.or_level(),
        }
    }

    fn or_level(&mut self) -> Result<SExpr, SyntaxError> {
        let mut lhs = self.and_level()?;
        while matches!(self.peek(), Tok::Kw(Kw::Or)) {
            self.bump();
            let rhs = self.and_level()?;
            let span = lhs.span.join(rhs.span);
            lhs = SExpr::new(SExprKind::BinOp("or".into(), Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn and_level(&mut self) -> Result<SExpr, SyntaxError> {
        let mut lhs = self.not_level()?;
        while matches!(self.peek(), Tok::Kw(Kw::And)) {
            self.bump();
            let rhs = self.not_level()?;
            let span = lhs.span.join(rhs.span);
            lhs = SExpr::new(
                SExprKind::BinOp("and".into(), Box::new(lhs), Box::new(rhs)),
                span,
            );
        }
        Ok(lhs)
    }

    fn not_level(&mut self) -> Result<SExpr, SyntaxError> {
        if matches!(self.peek(), Tok::Kw(Kw::Not)) {
            let start = self.span();
            self.bump();
            let inner = self.not_level()?;
            let span = start.join(inner.span);
            Ok(SExpr::new(SExprKind::Not(Box::new(inner)), span))
        } else {
            self.cmp_level()
        }
    }

    fn cmp_level(&mut self) -> Result<SExpr, SyntaxError> {
        let lhs = self.user_op_level()?;
        let op = match self.peek() {
            Tok::Eq => "=",
            Tok::Lt => "<",
            Tok::Gt => ">",
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.user_op_level()?;
        let span = lhs.span.join(rhs.span);
        Ok(SExpr::new(
            SExprKind::BinOp(op.into(), Box::new(lhs), Box::new(rhs)),
            span,
        ))
    }

    fn user_op_level(&mut self) -> Result<SExpr, SyntaxError> {
        let mut lhs = self.add_level()?;
        while let Tok::OpSym(op) = self.peek().clone() {
            self.bump();
            let rhs = self.add_level()?;
            let span = lhs.span.join(rhs.span);
            lhs = SExpr::new(SExprKind::BinOp(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn add_level(&mut self) -> Result<SExpr, SyntaxError> {
        let mut lhs = self.mul_level()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => "+",
                Tok::Minus => "−",
                _ => break,
            };
            self.bump();
            let rhs = self.mul_level()?;
            let span = lhs.span.join(rhs.span);
            lhs = SExpr::new(SExprKind::BinOp(op.into(), Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn mul_level(&mut self) -> Result<SExpr, SyntaxError> {
        let mut lhs = self.pow_level()?;
        while matches!(self.peek(), Tok::Star) {
            self.bump();
            let rhs = self.pow_level()?;
            let span = lhs.span.join(rhs.span);
            lhs = SExpr::new(SExprKind::BinOp("×".into(), Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn pow_level(&mut self) -> Result<SExpr, SyntaxError> {
        let lhs = self.app_level()?;
        if matches!(self.peek(), Tok::Caret) {
            self.bump();
            let rhs = self.pow_level()?;
            let span = lhs.span.join(rhs.span);
            Ok(SExpr::new(
                SExprKind::BinOp("^".into(), Box::new(lhs), Box::new(rhs)),
                span,
            ))
        } else {
            Ok(lhs)
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Nat(_)
                | Tok::Ident(_)
                | Tok::LParen
                | Tok::LBracket
                | Tok::LBrace
                | Tok::Kw(Kw::True)
                | Tok::Kw(Kw::False)
                | Tok::Kw(Kw::ExistsIn)
        )
    }

    fn app_level(&mut self) -> Result<SExpr, SyntaxError> {
        if matches!(self.peek(), Tok::Kw(Kw::ExistsIn)) {
            let start = self.span();
            self.bump();
            let list = self.atom()?;
            let pred = self.atom()?;
            let span = start.join(pred.span);
            return Ok(SExpr::new(
                SExprKind::ExistsIn(Box::new(list), Box::new(pred)),
                span,
            ));
        }
        let head = self.atom()?;
        let mut args = Vec::new();
        while self.starts_atom() {
            args.push(self.atom()?);
        }
        if args.is_empty() {
            Ok(head)
        } else {
            let span = head.span.join(args.last().unwrap().span);
            Ok(SExpr::new(SExprKind::App(Box::new(head), args), span))
        }
    }

    fn atom(&mut self) -> Result<SExpr, SyntaxError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Nat(n) => {
                self.bump();
                Ok(SExpr::new(SExprKind::Nat(n), span))
            }
            Tok::Kw(Kw::True) => {
                self.bump();
                Ok(SExpr::new(SExprKind::True, span))
            }
            Tok::Kw(Kw::False) => {
                self.bump();
                Ok(SExpr::new(SExprKind::False, span))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(SExpr::new(SExprKind::Name(name), span))
            }
            Tok::LParen => {
                self.bump();
                if matches!(self.peek(), Tok::RParen) {
                    let end = self.span();
                    self.bump();
                    return Ok(SExpr::new(SExprKind::UnitLit, span.join(end)));
                }
                let mut items = vec![self.expr()?];
                while matches!(self.peek(), Tok::Comma) {
                    self.bump();
                    items.push(self.expr()?);
                }
                let end = self.expect(Tok::RParen)?;
                if items.len() == 1 {
                    let mut e = items.pop().unwrap();
                    e.span = span.join(end);
                    Ok(e)
                } else {
                    Ok(SExpr::new(SExprKind::Tuple(items), span.join(end)))
                }
            }
            Tok::LBracket => {
                self.bump();
                let mut items = Vec::new();
                if !matches!(self.peek(), Tok::RBracket) {
                    items.push(self.expr()?);
                    while matches!(self.peek(), Tok::Comma) {
                        self.bump();
                        items.push(self.expr()?);
                    }
                }
                let end = self.expect(Tok::RBracket)?;
                Ok(SExpr::new(SExprKind::ListLit(items), span.join(end)))
            }
            Tok::LBrace => {
                self.bump();
                let mut items = Vec::new();
                if !matches!(self.peek(), Tok::RBrace) {
                    items.push(self.expr()?);
                    while matches!(self.peek(), Tok::Comma) {
                        self.bump();
                        items.push(self.expr()?);
                    }
                }
                let end = self.expect(Tok::RBrace)?;
                Ok(SExpr::new(SExprKind::SetLit(items), span.join(end)))
            }
            _ => Err(self.err(vec!["an expression".into()])),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_stream_codatatype() {
        let f = parse_file("codatatype Stream = SCons (head: Nat) (tail: Stream)").unwrap();
        assert_eq!(f.decls.len(), 1);
        match &f.decls[0] {
            Decl::Codatatype(cd) => {
                assert_eq!(cd.name.text, "Stream");
                assert_eq!(cd.ctors.len(), 1);
                assert_eq!(cd.ctors[0].name.text, "SCons");
                assert_eq!(cd.ctors[0].fields.len(), 2);
                assert_eq!(cd.ctors[0].fields[0].0.text, "head");
            }
            _ => panic!("expected codatatype"),
        }
    }

    #[test]
    fn parses_empty_input() {
        let f = parse_file("").unwrap();
        assert!(f.decls.is_empty());
    }

    #[test]
    fn parses_fun_decl_with_one_param() {
        let f =
            parse_file("corec f(x: Stream): Stream = SCons (head x) (f (tail x))").unwrap();
        match &f.decls[0] {
            Decl::Fun(fd) => {
                assert_eq!(fd.name.text, "f");
                assert_eq!(fd.params.len(), 1);
                assert!(!fd.well_behaved);
            }
            _ => panic!("expected function"),
        }
    }

    #[test]
    fn parses_operator_definition_and_infix_use() {
        let src = "corec well_behaved ⊕(xs: Stream, ys: Stream): Stream = \
                   SCons (head xs + head ys) (tail xs ⊕ tail ys)";
        let f = parse_file(src).unwrap();
        match &f.decls[0] {
            Decl::Fun(fd) => {
                assert_eq!(fd.name.text, "⊕");
                assert!(fd.well_behaved);
                match &fd.body.kind {
                    SExprKind::App(head, args) => {
                        assert!(matches!(&head.kind, SExprKind::Name(n) if n == "SCons"));
                        assert_eq!(args.len(), 2);
                        assert!(matches!(&args[1].kind, SExprKind::BinOp(op, _, _) if op == "⊕"));
                    }
                    k => panic!("unexpected body {k:?}"),
                }
            }
            _ => panic!("expected function"),
        }
    }

    #[test]
    fn precedence_pow_binds_tighter_than_mul() {
        let e = parse_expr_str("2 ^ head xs × 3").unwrap();
        match e.kind {
            SExprKind::BinOp(op, lhs, _) => {
                assert_eq!(op, "×");
                assert!(matches!(lhs.kind, SExprKind::BinOp(ref p, _, _) if p == "^"));
            }
            k => panic!("unexpected {k:?}"),
        }
    }

    #[test]
    fn parses_commands() {
        let src = "force fibA upto 7\ncheck fibA = fibB upto 1000\nregister ⊕\nfuel 500";
        let f = parse_file(src).unwrap();
        assert_eq!(f.decls.len(), 4);
        assert!(matches!(
            &f.decls[0],
            Decl::Command(Command::Force { depth: 7, .. })
        ));
        assert!(matches!(
            &f.decls[1],
            Decl::Command(Command::Check { depth: 1000, .. })
        ));
        match &f.decls[2] {
            Decl::Command(Command::Register { name, .. }) => assert_eq!(name.text, "⊕"),
            _ => panic!("expected register"),
        }
    }

    #[test]
    fn parses_prove_with_schemas_and_lemmas() {
        let src = "prove expDistrib: exp (xs ⊕ ys) = exp xs ⊗ exp ys \
                   via { (exp (xs ⊕ ys), exp xs ⊗ exp ys) } depth 8 using plusComm timesComm";
        let f = parse_file(src).unwrap();
        match &f.decls[0] {
            Decl::Command(Command::Prove {
                name,
                schemas,
                depth,
                lemmas,
                ..
            }) => {
                assert_eq!(name.as_ref().unwrap().text, "expDistrib");
                assert_eq!(schemas.len(), 1);
                assert_eq!(*depth, 8);
                assert_eq!(lemmas.len(), 2);
            }
            _ => panic!("expected prove"),
        }
    }

    #[test]
    fn parses_lambda_map_zip() {
        let e = parse_expr_str("map (λ(t′, u′). t′ ⊞ u′) (zip (children t) (children u))").unwrap();
        match &e.kind {
            SExprKind::App(head, args) => {
                assert!(matches!(&head.kind, SExprKind::Name(n) if n == "map"));
                assert_eq!(args.len(), 2);
                assert!(matches!(&args[0].kind, SExprKind::Lambda(pats, _) if pats.len() == 2));
            }
            k => panic!("unexpected {k:?}"),
        }
    }

    #[test]
    fn parses_exists_in_and_monus() {
        let e = parse_expr_str("not (exists-in xs P)").unwrap();
        assert!(matches!(e.kind, SExprKind::Not(_)));
        let e2 = parse_expr_str("i − 1").unwrap();
        assert!(matches!(e2.kind, SExprKind::BinOp(op, _, _) if op == "−"));
        let e3 = parse_expr_str("i - 1").unwrap();
        assert!(matches!(e3.kind, SExprKind::BinOp(op, _, _) if op == "−"));
    }

    #[test]
    fn error_carries_position_and_expectations() {
        let err = parse_file("codatatype = SCons").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.col > 1);
        assert!(!err.expected.is_empty());
    }
}
