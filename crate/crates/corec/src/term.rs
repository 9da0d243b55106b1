//! Formal expression trees over registered operations: the free monad over
//! the signature of a corecursion state. Leaves hold payloads, nodes apply
//! an operation symbol to a container of subterms shaped by that
//! operation's arity functor.

use crate::base::OpId;
use crate::functor::{Canon, Container};
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term<P> {
    Leaf(P),
    Node(OpId, Box<Container<Term<P>>>),
}

impl<P> Term<P> {
    pub fn node(op: OpId, args: Container<Term<P>>) -> Term<P> {
        Term::Node(op, Box::new(args))
    }
}

impl<P: Canon> Canon for Term<P> {
    fn canon_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Term::Leaf(a), Term::Leaf(b)) => a.canon_cmp(b),
            (Term::Leaf(_), Term::Node(..)) => Ordering::Less,
            (Term::Node(..), Term::Leaf(_)) => Ordering::Greater,
            (Term::Node(oa, ca), Term::Node(ob, cb)) => {
                oa.cmp(ob).then_with(|| ca.canon_cmp(cb))
            }
        }
    }
}

impl<P> Term<P> {
    /// Relabels every leaf; node structure is unchanged.
    pub fn map<Q: Canon>(&self, f: &mut impl FnMut(&P) -> Q) -> Term<Q> {
        self.try_map(&mut |p| Ok::<Q, std::convert::Infallible>(f(p)))
            .unwrap_or_else(|e| match e {})
    }

    pub fn try_map<Q: Canon, E>(
        &self,
        f: &mut impl FnMut(&P) -> Result<Q, E>,
    ) -> Result<Term<Q>, E> {
        Ok(match self {
            Term::Leaf(p) => Term::Leaf(f(p)?),
            Term::Node(op, args) => {
                Term::node(*op, args.try_map(&mut |sub: &Term<P>| sub.try_map(f))?)
            }
        })
    }

    pub fn leaves(&self) -> Vec<&P> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a P>) {
        match self {
            Term::Leaf(p) => out.push(p),
            Term::Node(_, args) => {
                for sub in args.content() {
                    sub.collect_leaves(out);
                }
            }
        }
    }
}

/// Functorial action on leaves.
pub fn tmap<P, Q: Canon>(mut f: impl FnMut(&P) -> Q, t: &Term<P>) -> Term<Q> {
    t.map(&mut f)
}

/// Monad join: grafts inner terms at the leaves.
pub fn tjoin<P: Canon + Clone>(t: &Term<Term<P>>) -> Term<P> {
    match t {
        Term::Leaf(inner) => inner.clone(),
        Term::Node(op, args) => Term::node(*op, args.map(&mut |sub: &Term<Term<P>>| tjoin(sub))),
    }
}

/// Sum payload for mixed guarded/unguarded leaves.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Lr<L, R> {
    L(L),
    R(R),
}

impl<L: Canon, R: Canon> Canon for Lr<L, R> {
    fn canon_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Lr::L(a), Lr::L(b)) => a.canon_cmp(b),
            (Lr::R(a), Lr::R(b)) => a.canon_cmp(b),
            (Lr::L(_), Lr::R(_)) => Ordering::Less,
            (Lr::R(_), Lr::L(_)) => Ordering::Greater,
        }
    }
}

/// Flattens a term whose leaves are either a plain payload or a doubly
/// nested term over such payloads, grafting everything into one term:
/// `tjoin ∘ tmap (case {left p ↦ leaf p; right tt ↦ tjoin tt})`.
pub fn reduce<P: Canon + Clone>(t: &Term<Lr<P, Term<Term<P>>>>) -> Term<P> {
    let staged: Term<Term<P>> = tmap(
        |leaf: &Lr<P, Term<Term<P>>>| match leaf {
            Lr::L(p) => Term::Leaf(p.clone()),
            Lr::R(tt) => tjoin(tt),
        },
        t,
    );
    tjoin(&staged)
}

/// Canonical textual form of a term, given a way to print payloads and
/// operation names: leaves as `η x`, applications as `⟦op⟧(arg, …)`,
/// lists as `[…]`, finite sets as `{…}`.
pub fn render_term<P>(
    t: &Term<P>,
    payload: &impl Fn(&P) -> String,
    op_name: &impl Fn(OpId) -> String,
) -> String {
    match t {
        Term::Leaf(p) => format!("η {}", payload(p)),
        Term::Node(op, args) => {
            let mut parts = Vec::new();
            render_args(args, payload, op_name, &mut parts);
            format!("⟦{}⟧({})", op_name(*op), parts.join(", "))
        }
    }
}

fn render_args<P>(
    c: &Container<Term<P>>,
    payload: &impl Fn(&P) -> String,
    op_name: &impl Fn(OpId) -> String,
    out: &mut Vec<String>,
) {
    match c {
        Container::Slot(t) => out.push(render_term(t, payload, op_name)),
        Container::Nat(n) => out.push(n.to_string()),
        Container::Bool(b) => out.push(b.to_string()),
        Container::Unit => out.push("()".into()),
        Container::Tuple(items) => {
            for item in items {
                render_args(item, payload, op_name, out);
            }
        }
        Container::Tagged(tag, inner) => {
            let mut parts = Vec::new();
            render_args(inner, payload, op_name, &mut parts);
            out.push(format!("#{tag}({})", parts.join(", ")));
        }
        Container::List(items) => {
            let mut parts = Vec::new();
            for item in items {
                let mut one = Vec::new();
                render_args(item, payload, op_name, &mut one);
                parts.push(one.join(", "));
            }
            out.push(format!("[{}]", parts.join(", ")));
        }
        Container::FinSet(items) => {
            let mut parts = Vec::new();
            for item in items {
                let mut one = Vec::new();
                render_args(item, payload, op_name, &mut one);
                parts.push(one.join(", "));
            }
            out.push(format!("{{{}}}", parts.join(", ")));
        }
    }
}

impl<P: fmt::Display> fmt::Display for Term<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = render_term(self, &|p: &P| p.to_string(), &|op| {
            format!("op{}.{}", op.codata, op.index)
        });
        write!(f, "{s}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::ccontent;

    fn op(i: u32) -> OpId {
        OpId::new(0, i)
    }

    // ⟦⊕⟧-style binary node over two subterms.
    fn bin(i: u32, a: Term<u32>, b: Term<u32>) -> Term<u32> {
        Term::node(
            op(i),
            Container::Tuple(vec![Container::Slot(a), Container::Slot(b)]),
        )
    }

    // ⟦SCons⟧-style node: a nat field and one subterm.
    fn cons(n: u64, t: Term<u32>) -> Term<u32> {
        Term::node(
            op(0),
            Container::Tuple(vec![Container::nat(n), Container::Slot(t)]),
        )
    }

    #[test]
    fn tmap_on_leaf_applies_function() {
        let t: Term<u32> = Term::Leaf(5);
        assert_eq!(tmap(|p| p + 1, &t), Term::Leaf(6u32));
    }

    #[test]
    fn tmap_relabels_all_three_leaves() {
        // η a ⊕ SCons(n, η a ⊕ η b), with a = 1, b = 2, n = 9.
        let t = bin(1, Term::Leaf(1), cons(9, bin(1, Term::Leaf(1), Term::Leaf(2))));
        let mapped = tmap(|p| p * 10, &t);
        assert_eq!(
            mapped,
            bin(
                1,
                Term::Leaf(10),
                cons(9, bin(1, Term::Leaf(10), Term::Leaf(20)))
            )
        );
        assert_eq!(mapped.leaves(), vec![&10, &10, &20]);
    }

    #[test]
    fn tjoin_left_unit() {
        let inner = bin(1, Term::Leaf(1), Term::Leaf(2));
        let t: Term<Term<u32>> = Term::Leaf(inner.clone());
        assert_eq!(tjoin(&t), inner);
    }

    #[test]
    fn tjoin_right_unit() {
        let t = bin(1, Term::Leaf(1), cons(3, Term::Leaf(2)));
        let wrapped: Term<Term<u32>> = tmap(|p| Term::Leaf(*p), &t);
        assert_eq!(tjoin(&wrapped), t);
    }

    #[test]
    fn reduce_unit_cases() {
        let fc = 41u32;
        let t: Term<Lr<u32, Term<Term<u32>>>> = Term::Leaf(Lr::L(fc));
        assert_eq!(reduce(&t), Term::Leaf(41));

        let t2: Term<Lr<u32, Term<Term<u32>>>> =
            Term::Leaf(Lr::R(Term::Leaf(Term::Leaf(41))));
        assert_eq!(reduce(&t2), Term::Leaf(41));
    }

    #[test]
    fn render_matches_canonical_form() {
        let t = bin(1, Term::Leaf(7), cons(9, Term::Leaf(8)));
        let names = |o: OpId| if o.index == 0 { "SCons".to_string() } else { "⊕".to_string() };
        assert_eq!(
            render_term(&t, &|p: &u32| p.to_string(), &names),
            "⟦⊕⟧(η 7, ⟦SCons⟧(9, η 8))"
        );
    }

    #[test]
    fn node_content_is_subterm_sequence() {
        let t = bin(1, Term::Leaf(1), Term::Leaf(2));
        if let Term::Node(_, args) = &t {
            assert_eq!(ccontent(args).len(), 2);
        } else {
            panic!("expected node");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_term(depth: u32) -> BoxedStrategy<Term<u32>> {
            if depth == 0 {
                any::<u32>().prop_map(|p| Term::Leaf(p % 50)).boxed()
            } else {
                let sub = arb_term(depth - 1);
                prop_oneof![
                    any::<u32>().prop_map(|p| Term::Leaf(p % 50)),
                    (sub.clone(), sub.clone()).prop_map(|(a, b)| bin(1, a, b)),
                    (any::<u8>(), sub.clone()).prop_map(|(n, t)| cons(n as u64, t)),
                    prop::collection::vec(sub, 0..3).prop_map(|items| Term::node(
                        op(2),
                        Container::List(items.into_iter().map(Container::Slot).collect())
                    )),
                ]
                .boxed()
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]

            #[test]
            fn tmap_identity(t in arb_term(3)) {
                prop_assert_eq!(tmap(|p| *p, &t), t);
            }

            #[test]
            fn tmap_composition(t in arb_term(3)) {
                let f = |p: &u32| p.wrapping_mul(5);
                let g = |p: &u32| p.wrapping_add(3);
                prop_assert_eq!(
                    tmap(|p| g(&f(p)), &t),
                    tmap(g, &tmap(f, &t))
                );
            }

            #[test]
            fn tjoin_associativity(t in arb_term(2)) {
                // Build a three-level term by duplicating leaves, then join
                // in both orders.
                let t3: Term<Term<Term<u32>>> =
                    tmap(|p| Term::Leaf(Term::Leaf(*p)), &t);
                let left = tjoin(&tjoin(&t3));
                let right = tjoin(&tmap(|inner| tjoin(inner), &t3));
                prop_assert_eq!(left, right);
            }

            #[test]
            fn reduce_agrees_with_direct_recursion(t in arb_term(3)) {
                // Tag each leaf as either a plain payload or a doubly
                // wrapped one, then compare against an independent
                // structural recursion.
                let tagged: Term<Lr<u32, Term<Term<u32>>>> = tmap(
                    |p| if p % 2 == 0 {
                        Lr::L(*p)
                    } else {
                        Lr::R(Term::Leaf(Term::Leaf(*p)))
                    },
                    &t,
                );

                fn direct(t: &Term<Lr<u32, Term<Term<u32>>>>) -> Term<u32> {
                    match t {
                        Term::Leaf(Lr::L(p)) => Term::Leaf(*p),
                        Term::Leaf(Lr::R(tt)) => {
                            // Flatten two levels by hand.
                            match tt {
                                Term::Leaf(inner) => inner.clone(),
                                Term::Node(op, args) => Term::node(
                                    *op,
                                    args.map(&mut |s: &Term<Term<u32>>| tjoin(s)),
                                ),
                            }
                        }
                        Term::Node(op, args) => Term::node(
                            *op,
                            args.map(&mut |s: &Term<Lr<u32, Term<Term<u32>>>>| direct(s)),
                        ),
                    }
                }

                prop_assert_eq!(reduce(&tagged), direct(&tagged));
            }
        }
    }
}
