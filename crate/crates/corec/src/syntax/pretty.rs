//! Pretty-printing of surface syntax. `parse ∘ pretty` is identity up to
//! spans, and `pretty ∘ parse ∘ pretty = pretty`.

use super::ast::*;

pub fn pretty_file(file: &SourceFile) -> String {
    let mut out = String::new();
    for d in &file.decls {
        out.push_str(&pretty_decl(d));
        out.push('\n');
    }
    out
}

pub fn pretty_decl(d: &Decl) -> String {
    match d {
        Decl::Codatatype(cd) => {
            let ctors: Vec<_> = cd
                .ctors
                .iter()
                .map(|c| {
                    let fields: Vec<_> = c
                        .fields
                        .iter()
                        .map(|(n, t)| format!(" ({}: {})", n.text, pretty_type(t)))
                        .collect();
                    format!("{}{}", c.name.text, fields.join(""))
                })
                .collect();
            format!("codatatype {} = {}", cd.name.text, ctors.join(" | "))
        }
        Decl::Fun(fd) => {
            let wb = if fd.well_behaved { "well_behaved " } else { "" };
            let params = if fd.params.is_empty() {
                String::new()
            } else {
                let ps: Vec<_> = fd
                    .params
                    .iter()
                    .map(|(n, t)| format!("{}: {}", n.text, pretty_type(t)))
                    .collect();
                format!("({})", ps.join(", "))
            };
            format!(
                "corec {}{}{}: {} = {}",
                wb,
                fd.name.text,
                params,
                pretty_type(&fd.ret),
                pretty_expr(&fd.body)
            )
        }
        Decl::Command(c) => pretty_command(c),
    }
}

pub fn pretty_command(c: &Command) -> String {
    match c {
        Command::Force { expr, depth, .. } => format!("force {} upto {depth}", pretty_expr(expr)),
        Command::Check {
            lhs, rhs, depth, ..
        } => format!(
            "check {} = {} upto {depth}",
            pretty_expr(lhs),
            pretty_expr(rhs)
        ),
        Command::Register { name, .. } => format!("register {}", name.text),
        Command::Fuel { amount, .. } => format!("fuel {amount}"),
        Command::Prove {
            name,
            lhs,
            rhs,
            schemas,
            depth,
            lemmas,
            ..
        } => {
            let mut s = String::from("prove ");
            if let Some(n) = name {
                s.push_str(&n.text);
                s.push_str(": ");
            }
            s.push_str(&format!("{} = {} via {{ ", pretty_expr(lhs), pretty_expr(rhs)));
            let pairs: Vec<_> = schemas
                .iter()
                .map(|(l, r)| format!("({}, {})", pretty_expr(l), pretty_expr(r)))
                .collect();
            s.push_str(&pairs.join("; "));
            s.push_str(&format!(" }} depth {depth}"));
            if !lemmas.is_empty() {
                s.push_str(" using ");
                let ns: Vec<_> = lemmas.iter().map(|l| l.text.clone()).collect();
                s.push_str(&ns.join(" "));
            }
            s
        }
    }
}

pub fn pretty_type(t: &TypeExpr) -> String {
    match t {
        TypeExpr::Name(id) => id.text.clone(),
        TypeExpr::List(inner, _) => format!("List {}", pretty_type_atom(inner)),
        TypeExpr::FinSet(inner, _) => format!("FinSet {}", pretty_type_atom(inner)),
        TypeExpr::Prod(items, _) => {
            let parts: Vec<_> = items.iter().map(pretty_type).collect();
            format!("({})", parts.join(", "))
        }
        TypeExpr::Arrow(a, b, _) => format!("{} -> {}", pretty_type_atom(a), pretty_type(b)),
    }
}

fn pretty_type_atom(t: &TypeExpr) -> String {
    match t {
        TypeExpr::Name(_) | TypeExpr::Prod(..) => pretty_type(t),
        _ => format!("({})", pretty_type(t)),
    }
}

/// Fully parenthesized except for atoms, so re-parsing is unambiguous.
pub fn pretty_expr(e: &SExpr) -> String {
    match &e.kind {
        SExprKind::Nat(n) => n.to_string(),
        SExprKind::True => "true".into(),
        SExprKind::False => "false".into(),
        SExprKind::UnitLit => "()".into(),
        SExprKind::Name(n) => n.clone(),
        SExprKind::App(head, args) => {
            let mut parts = vec![pretty_atom(head)];
            parts.extend(args.iter().map(pretty_atom));
            parts.join(" ")
        }
        SExprKind::BinOp(op, a, b) => {
            let op = match op.as_str() {
                "and" | "or" => format!(" {op} "),
                _ => format!(" {op} "),
            };
            format!("{}{}{}", pretty_atom(a), op, pretty_atom(b))
        }
        SExprKind::Not(inner) => format!("not {}", pretty_atom(inner)),
        SExprKind::If(c, t, f) => format!(
            "if {} then {} else {}",
            pretty_expr(c),
            pretty_expr(t),
            pretty_expr(f)
        ),
        SExprKind::Tuple(items) => {
            let parts: Vec<_> = items.iter().map(pretty_expr).collect();
            format!("({})", parts.join(", "))
        }
        SExprKind::ListLit(items) => {
            let parts: Vec<_> = items.iter().map(pretty_expr).collect();
            format!("[{}]", parts.join(", "))
        }
        SExprKind::SetLit(items) => {
            let parts: Vec<_> = items.iter().map(pretty_expr).collect();
            format!("{{{}}}", parts.join(", "))
        }
        SExprKind::Lambda(pats, body) => {
            let ps: Vec<_> = pats.iter().map(|p| p.text.clone()).collect();
            if ps.len() == 1 {
                format!("λ{}. {}", ps[0], pretty_expr(body))
            } else {
                format!("λ({}). {}", ps.join(", "), pretty_expr(body))
            }
        }
        SExprKind::ExistsIn(list, pred) => {
            format!("exists-in {} {}", pretty_atom(list), pretty_atom(pred))
        }
    }
}

fn pretty_atom(e: &SExpr) -> String {
    match &e.kind {
        SExprKind::Nat(_)
        | SExprKind::True
        | SExprKind::False
        | SExprKind::UnitLit
        | SExprKind::Name(_)
        | SExprKind::Tuple(_)
        | SExprKind::ListLit(_)
        | SExprKind::SetLit(_) => pretty_expr(e),
        _ => format!("({})", pretty_expr(e)),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::{parse_expr_str, parse_file};
    use super::*;

    const CORPUS: &[&str] = &[
        "codatatype Stream = SCons (head: Nat) (tail: Stream)",
        "codatatype LList = LNil | LCons (head: Nat) (tail: LList)",
        "corec well_behaved ⊕(xs: Stream, ys: Stream): Stream = SCons (head xs + head ys) (tail xs ⊕ tail ys)",
        "corec onetwos: Stream = SCons 1 (SCons 2 onetwos)",
        "corec primes(m: Nat, n: Nat): Stream = if ((m = 0) and (n > 1)) or (gcd m n = 1) then SCons n (primes (m × n) (n + 1)) else primes m (n + 1)",
        "corec sup(X: FinSet Stream): Stream = SCons (fmax (fimage head X)) (sup (fimage tail X))",
        "corec lfilter(P: Nat -> Bool, xs: LList): LList = if not (exists-in xs P) then LNil else if P (head xs) then LCons (head xs) (lfilter P (tail xs)) else lfilter P (tail xs)",
        "force fibA upto 7",
        "check facA = facC (1, 1, 1) upto 10",
        "prove plusComm: xs ⊕ ys = ys ⊕ xs via { (xs ⊕ ys, ys ⊕ xs) } depth 2",
    ];

    #[test]
    fn pretty_parse_pretty_is_pretty() {
        for src in CORPUS {
            let once = pretty_file(&parse_file(src).unwrap());
            let twice = pretty_file(&parse_file(&once).unwrap());
            assert_eq!(once, twice, "round-trip failed for {src}");
        }
    }

    #[test]
    fn reparsed_ast_is_structurally_equal() {
        let src = "corec f(x: Stream): Stream = SCons (head x) (f (tail x))";
        let f1 = parse_file(src).unwrap();
        let f2 = parse_file(&pretty_file(&f1)).unwrap();
        match (&f1.decls[0], &f2.decls[0]) {
            (Decl::Fun(a), Decl::Fun(b)) => {
                assert_eq!(a.name.text, b.name.text);
                assert!(sexpr_eq(&a.body, &b.body));
            }
            _ => panic!("expected functions"),
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_sexpr(depth: u32) -> BoxedStrategy<SExpr> {
            use crate::base::Span;
            let leaf = prop_oneof![
                any::<u16>().prop_map(|n| SExprKind::Nat(n.into())),
                Just(SExprKind::True),
                Just(SExprKind::UnitLit),
                "[a-z][a-z0-9]{0,3}".prop_map(SExprKind::Name),
            ]
            .prop_map(|k| SExpr::new(k, Span::default()));
            if depth == 0 {
                return leaf.boxed();
            }
            let sub = arb_sexpr(depth - 1);
            prop_oneof![
                leaf,
                (sub.clone(), sub.clone()).prop_map(|(a, b)| SExpr::new(
                    SExprKind::BinOp("+".into(), Box::new(a), Box::new(b)),
                    Span::default()
                )),
                (sub.clone(), sub.clone()).prop_map(|(a, b)| SExpr::new(
                    SExprKind::BinOp("⊕".into(), Box::new(a), Box::new(b)),
                    Span::default()
                )),
                (sub.clone(), sub.clone(), sub.clone()).prop_map(|(c, t, e)| SExpr::new(
                    SExprKind::If(Box::new(c), Box::new(t), Box::new(e)),
                    Span::default()
                )),
                ("[a-z][a-z0-9]{0,3}", prop::collection::vec(sub.clone(), 1..3)).prop_map(
                    |(f, args)| SExpr::new(
                        SExprKind::App(
                            Box::new(SExpr::new(SExprKind::Name(f), Span::default())),
                            args
                        ),
                        Span::default()
                    )
                ),
                prop::collection::vec(sub.clone(), 2..4)
                    .prop_map(|items| SExpr::new(SExprKind::Tuple(items), Span::default())),
                prop::collection::vec(sub, 0..3)
                    .prop_map(|items| SExpr::new(SExprKind::ListLit(items), Span::default())),
            ]
            .boxed()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(128))]

            #[test]
            fn random_asts_round_trip(e in arb_sexpr(3)) {
                let printed = pretty_expr(&e);
                let reparsed = parse_expr_str(&printed).unwrap();
                prop_assert!(sexpr_eq(&e, &reparsed), "printed: {printed}");
                prop_assert_eq!(pretty_expr(&reparsed), printed);
            }
        }
    }
}
