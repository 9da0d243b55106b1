//! Polynomial functors as syntactic descriptions, and container values:
//! a shape together with content slots.
//!
//! A [`FunctorDesc`] describes where payloads live inside one layer of
//! structure; a [`Container`] is a value of such a description. The map
//! ([`cmap`]), relator ([`crel`]), and content extraction ([`ccontent`])
//! operations treat containers uniformly, which is what lets the rest of
//! the crate stay agnostic about the concrete codatatype being unfolded.

use crate::base::Sort;
use crate::error::KernelError;
use std::cmp::Ordering;
use std::rc::Rc;

/// Grammar of the polynomial functors used for codatatype layers and
/// operation arities.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum FunctorDesc {
    /// A payload slot.
    Id,
    ConstNat,
    ConstBool,
    ConstUnit,
    /// At least one component.
    Prod(Vec<Rc<FunctorDesc>>),
    /// Alternatives indexed by constructor tag, in declaration order.
    Sum(Vec<Rc<FunctorDesc>>),
    /// Ordered, possibly empty sequence of sub-containers.
    ListOf(Rc<FunctorDesc>),
    /// Duplicate-free sorted sequence of sub-containers.
    FinSetOf(Rc<FunctorDesc>),
}

impl FunctorDesc {
    pub fn prod(items: Vec<FunctorDesc>) -> FunctorDesc {
        FunctorDesc::Prod(items.into_iter().map(Rc::new).collect())
    }

    pub fn sum(items: Vec<FunctorDesc>) -> FunctorDesc {
        FunctorDesc::Sum(items.into_iter().map(Rc::new).collect())
    }

    /// Number of payload slots in one value of this description, when that
    /// number is fixed by the shape (lists and finite sets make it vary).
    pub fn fixed_slot_count(&self) -> Option<usize> {
        match self {
            FunctorDesc::Id => Some(1),
            FunctorDesc::ConstNat | FunctorDesc::ConstBool | FunctorDesc::ConstUnit => Some(0),
            FunctorDesc::Prod(items) => {
                let mut n = 0;
                for it in items {
                    n += it.fixed_slot_count()?;
                }
                Some(n)
            }
            FunctorDesc::Sum(_) | FunctorDesc::ListOf(_) | FunctorDesc::FinSetOf(_) => None,
        }
    }
}

/// Canonical total order on payloads. Finite-set contents are sorted and
/// deduplicated under this order, so it must be a genuine total order for
/// every payload type that can appear inside a `FinSetOf`.
pub trait Canon {
    fn canon_cmp(&self, other: &Self) -> Ordering;
}

impl Canon for u32 {
    fn canon_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
}

impl Canon for u64 {
    fn canon_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
}

impl Canon for num_bigint::BigUint {
    fn canon_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
}

impl Canon for () {
    fn canon_cmp(&self, _other: &Self) -> Ordering {
        Ordering::Equal
    }
}

impl<A: Canon, B: Canon> Canon for (A, B) {
    fn canon_cmp(&self, other: &Self) -> Ordering {
        self.0
            .canon_cmp(&other.0)
            .then_with(|| self.1.canon_cmp(&other.1))
    }
}

impl<T: Canon> Canon for Vec<T> {
    fn canon_cmp(&self, other: &Self) -> Ordering {
        let mut it_a = self.iter();
        let mut it_b = other.iter();
        loop {
            match (it_a.next(), it_b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(a), Some(b)) => match a.canon_cmp(b) {
                    Ordering::Equal => continue,
                    ord => return ord,
                },
            }
        }
    }
}

/// One layer of structure over payloads of type `P`, mirroring a
/// [`FunctorDesc`]: `Slot` at `Id` positions, base constants at `Const`
/// positions, a recorded tag at `Sum` positions, sequences at `ListOf`
/// positions, and canonical duplicate-free sorted sequences at `FinSetOf`
/// positions.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Container<P> {
    Slot(P),
    Nat(num_bigint::BigUint),
    Bool(bool),
    Unit,
    Tuple(Vec<Container<P>>),
    Tagged(u32, Box<Container<P>>),
    List(Vec<Container<P>>),
    FinSet(Vec<Container<P>>),
}

impl<P: Canon> Canon for Container<P> {
    fn canon_cmp(&self, other: &Self) -> Ordering {
        use Container::*;
        fn rank<P>(c: &Container<P>) -> u8 {
            match c {
                Slot(_) => 0,
                Nat(_) => 1,
                Bool(_) => 2,
                Unit => 3,
                Tuple(_) => 4,
                Tagged(..) => 5,
                List(_) => 6,
                FinSet(_) => 7,
            }
        }
        match (self, other) {
            (Slot(a), Slot(b)) => a.canon_cmp(b),
            (Nat(a), Nat(b)) => a.cmp(b),
            (Bool(a), Bool(b)) => a.cmp(b),
            (Unit, Unit) => Ordering::Equal,
            (Tuple(a), Tuple(b)) | (List(a), List(b)) | (FinSet(a), FinSet(b)) => a.canon_cmp(b),
            (Tagged(ta, a), Tagged(tb, b)) => ta.cmp(tb).then_with(|| a.canon_cmp(b)),
            (a, b) => rank(a).cmp(&rank(b)),
        }
    }
}

impl<P> Container<P> {
    pub fn nat(n: u64) -> Container<P> {
        Container::Nat(num_bigint::BigUint::from(n))
    }

    /// Builds a canonical finite-set node: sorted, duplicates removed.
    pub fn finset(mut items: Vec<Container<P>>) -> Container<P>
    where
        P: Canon,
    {
        items.sort_by(|a, b| a.canon_cmp(b));
        items.dedup_by(|a, b| a.canon_cmp(b) == Ordering::Equal);
        Container::FinSet(items)
    }

    /// Same shape, each payload replaced by its image. Finite-set contents
    /// are re-canonicalized after mapping.
    pub fn map<Q: Canon>(&self, f: &mut impl FnMut(&P) -> Q) -> Container<Q> {
        self.try_map(&mut |p| Ok::<Q, std::convert::Infallible>(f(p)))
            .unwrap_or_else(|e| match e {})
    }

    pub fn try_map<Q: Canon, E>(
        &self,
        f: &mut impl FnMut(&P) -> Result<Q, E>,
    ) -> Result<Container<Q>, E> {
        Ok(match self {
            Container::Slot(p) => Container::Slot(f(p)?),
            Container::Nat(n) => Container::Nat(n.clone()),
            Container::Bool(b) => Container::Bool(*b),
            Container::Unit => Container::Unit,
            Container::Tuple(items) => Container::Tuple(
                items
                    .iter()
                    .map(|c| c.try_map(f))
                    .collect::<Result<_, E>>()?,
            ),
            Container::Tagged(t, c) => Container::Tagged(*t, Box::new(c.try_map(f)?)),
            Container::List(items) => Container::List(
                items
                    .iter()
                    .map(|c| c.try_map(f))
                    .collect::<Result<_, E>>()?,
            ),
            Container::FinSet(items) => Container::finset(
                items
                    .iter()
                    .map(|c| c.try_map(f))
                    .collect::<Result<_, E>>()?,
            ),
        })
    }

    /// Left-to-right sequence of the payloads.
    pub fn content(&self) -> Vec<&P> {
        let mut out = Vec::new();
        self.collect_content(&mut out);
        out
    }

    fn collect_content<'a>(&'a self, out: &mut Vec<&'a P>) {
        match self {
            Container::Slot(p) => out.push(p),
            Container::Nat(_) | Container::Bool(_) | Container::Unit => {}
            Container::Tuple(items) | Container::List(items) | Container::FinSet(items) => {
                for c in items {
                    c.collect_content(out)
                }
            }
            Container::Tagged(_, c) => c.collect_content(out),
        }
    }

    /// Structural conformance with a description.
    pub fn matches(&self, desc: &FunctorDesc) -> bool {
        match (desc, self) {
            (FunctorDesc::Id, Container::Slot(_)) => true,
            (FunctorDesc::ConstNat, Container::Nat(_)) => true,
            (FunctorDesc::ConstBool, Container::Bool(_)) => true,
            (FunctorDesc::ConstUnit, Container::Unit) => true,
            (FunctorDesc::Prod(ds), Container::Tuple(cs)) => {
                ds.len() == cs.len() && ds.iter().zip(cs).all(|(d, c)| c.matches(d))
            }
            (FunctorDesc::Sum(ds), Container::Tagged(tag, c)) => {
                (*tag as usize) < ds.len() && c.matches(&ds[*tag as usize])
            }
            (FunctorDesc::ListOf(d), Container::List(cs)) => cs.iter().all(|c| c.matches(d)),
            (FunctorDesc::FinSetOf(d), Container::FinSet(cs)) => cs.iter().all(|c| c.matches(d)),
            _ => false,
        }
    }
}

/// Functorial action: see [`Container::map`].
pub fn cmap<P, Q: Canon>(mut f: impl FnMut(&P) -> Q, c: &Container<P>) -> Container<Q> {
    c.map(&mut f)
}

/// Content extraction: see [`Container::content`].
pub fn ccontent<P>(c: &Container<P>) -> Vec<&P> {
    c.content()
}

/// Relator: true iff both containers conform to `desc`, have identical
/// shape, and all parallel payloads satisfy `r`. Finite sets compare their
/// canonical sequences position-wise.
pub fn crel<P, Q>(
    desc: &FunctorDesc,
    r: &mut impl FnMut(&P, &Q) -> bool,
    a: &Container<P>,
    b: &Container<Q>,
) -> Result<bool, KernelError> {
    if !a.matches(desc) {
        return Err(KernelError::DescMismatch { side: "left" });
    }
    if !b.matches(desc) {
        return Err(KernelError::DescMismatch { side: "right" });
    }
    Ok(crel_unchecked(r, a, b))
}

fn crel_unchecked<P, Q>(
    r: &mut impl FnMut(&P, &Q) -> bool,
    a: &Container<P>,
    b: &Container<Q>,
) -> bool {
    match (a, b) {
        (Container::Slot(p), Container::Slot(q)) => r(p, q),
        (Container::Nat(x), Container::Nat(y)) => x == y,
        (Container::Bool(x), Container::Bool(y)) => x == y,
        (Container::Unit, Container::Unit) => true,
        (Container::Tuple(xs), Container::Tuple(ys))
        | (Container::List(xs), Container::List(ys))
        | (Container::FinSet(xs), Container::FinSet(ys)) => {
            xs.len() == ys.len()
                && xs
                    .iter()
                    .zip(ys)
                    .all(|(x, y)| crel_unchecked(r, x, y))
        }
        (Container::Tagged(tx, x), Container::Tagged(ty, y)) => {
            tx == ty && crel_unchecked(r, x, y)
        }
        _ => false,
    }
}

/// Translates a sort into the functor description it contributes to a
/// layer of codatatype `j`: occurrences of `j` become payload slots.
/// Returns `None` for sorts that cannot appear inside a layer
/// (other codatatypes, function sorts).
pub fn sort_to_desc(sort: &Sort, j: crate::base::CodataId) -> Option<FunctorDesc> {
    match sort {
        Sort::Nat => Some(FunctorDesc::ConstNat),
        Sort::Bool => Some(FunctorDesc::ConstBool),
        Sort::Unit => Some(FunctorDesc::ConstUnit),
        Sort::Co(k) if *k == j => Some(FunctorDesc::Id),
        Sort::Co(_) => None,
        Sort::List(inner) => Some(FunctorDesc::ListOf(Rc::new(sort_to_desc(inner, j)?))),
        Sort::FinSet(inner) => Some(FunctorDesc::FinSetOf(Rc::new(sort_to_desc(inner, j)?))),
        Sort::Prod(items) => {
            let ds = items
                .iter()
                .map(|s| sort_to_desc(s, j).map(Rc::new))
                .collect::<Option<Vec<_>>>()?;
            Some(FunctorDesc::Prod(ds))
        }
        Sort::Fun(..) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn pair_desc() -> FunctorDesc {
        FunctorDesc::prod(vec![FunctorDesc::ConstNat, FunctorDesc::Id])
    }

    fn pair(n: u64, p: u32) -> Container<u32> {
        Container::Tuple(vec![Container::nat(n), Container::Slot(p)])
    }

    #[test]
    fn cmap_replaces_payloads_in_place() {
        let c = pair(7, 3);
        let mapped = cmap(|p: &u32| p + 1, &c);
        assert_eq!(mapped, pair(7, 4));
        assert!(mapped.matches(&pair_desc()));
    }

    #[test]
    fn cmap_identity_is_identity() {
        let c = Container::List(vec![pair(1, 2), pair(3, 4)]);
        assert_eq!(cmap(|p: &u32| *p, &c), c);
    }

    #[test]
    fn ccontent_single_slot() {
        let c = pair(7, 5);
        assert_eq!(ccontent(&c), vec![&5]);
    }

    #[test]
    fn ccontent_empty_alternative() {
        // A nil-style alternative carries no payloads.
        let c: Container<u32> = Container::Tagged(0, Box::new(Container::Unit));
        assert!(ccontent(&c).is_empty());
    }

    #[test]
    fn crel_equality_is_container_equality() {
        let a = Container::List(vec![pair(1, 2), pair(3, 4)]);
        let b = a.clone();
        let desc = FunctorDesc::ListOf(Rc::new(pair_desc()));
        assert!(crel(&desc, &mut |x: &u32, y: &u32| x == y, &a, &b).unwrap());
        let c = Container::List(vec![pair(1, 2), pair(3, 5)]);
        assert!(!crel(&desc, &mut |x: &u32, y: &u32| x == y, &a, &c).unwrap());
    }

    #[test]
    fn crel_lists_of_different_length_are_unrelated() {
        let desc = FunctorDesc::ListOf(Rc::new(FunctorDesc::Id));
        let a: Container<u32> = Container::List(vec![Container::Slot(1)]);
        let b: Container<u32> = Container::List(vec![Container::Slot(1), Container::Slot(1)]);
        assert!(!crel(&desc, &mut |_: &u32, _: &u32| true, &a, &b).unwrap());
    }

    #[test]
    fn crel_rejects_desc_mismatch() {
        let desc = FunctorDesc::ConstNat;
        let a: Container<u32> = Container::Slot(1);
        let b: Container<u32> = Container::nat(1);
        assert_eq!(
            crel(&desc, &mut |_: &u32, _: &u32| true, &a, &b),
            Err(KernelError::DescMismatch { side: "left" })
        );
    }

    #[test]
    fn finset_canonicalization_sorts_and_dedups() {
        let raw = vec![
            Container::Slot(3u32),
            Container::Slot(1),
            Container::Slot(3),
            Container::Slot(2),
        ];
        let canon = Container::finset(raw);
        let again = match &canon {
            Container::FinSet(items) => Container::finset(items.clone()),
            _ => unreachable!(),
        };
        assert_eq!(canon, again);
        assert_eq!(
            canon,
            Container::FinSet(vec![
                Container::Slot(1),
                Container::Slot(2),
                Container::Slot(3)
            ])
        );
    }

    #[test]
    fn finset_equal_support_gives_identical_containers() {
        let a = Container::finset(vec![Container::Slot(2u32), Container::Slot(9), Container::Slot(2)]);
        let b = Container::finset(vec![Container::Slot(9u32), Container::Slot(2)]);
        assert_eq!(a, b);
    }

    #[test]
    fn cmap_recanonicalizes_finsets() {
        let s = Container::finset(vec![Container::Slot(1u32), Container::Slot(2)]);
        // A non-injective map must collapse the two elements.
        let mapped = cmap(|_: &u32| 0u32, &s);
        assert_eq!(mapped, Container::FinSet(vec![Container::Slot(0)]));
    }

    #[test]
    fn sort_to_desc_stream_layer() {
        // One Nat field and one recursive field.
        let d = sort_to_desc(&Sort::Prod(vec![Sort::Nat, Sort::Co(0)]), 0).unwrap();
        assert_eq!(d, pair_desc());
        assert!(sort_to_desc(&Sort::Co(1), 0).is_none());
    }

    // Desc-directed oracle, deliberately structured unlike Container::map:
    // it walks the description and the container in lockstep.
    fn oracle_map(desc: &FunctorDesc, c: &Container<u32>, f: &dyn Fn(u32) -> u32) -> Container<u32> {
        match (desc, c) {
            (FunctorDesc::Id, Container::Slot(p)) => Container::Slot(f(*p)),
            (FunctorDesc::ConstNat, Container::Nat(n)) => Container::Nat(n.clone()),
            (FunctorDesc::ConstBool, Container::Bool(b)) => Container::Bool(*b),
            (FunctorDesc::ConstUnit, Container::Unit) => Container::Unit,
            (FunctorDesc::Prod(ds), Container::Tuple(cs)) => Container::Tuple(
                ds.iter().zip(cs).map(|(d, c)| oracle_map(d, c, f)).collect(),
            ),
            (FunctorDesc::Sum(ds), Container::Tagged(t, c)) => {
                Container::Tagged(*t, Box::new(oracle_map(&ds[*t as usize], c, f)))
            }
            (FunctorDesc::ListOf(d), Container::List(cs)) => {
                Container::List(cs.iter().map(|c| oracle_map(d, c, f)).collect())
            }
            (FunctorDesc::FinSetOf(d), Container::FinSet(cs)) => {
                Container::finset(cs.iter().map(|c| oracle_map(d, c, f)).collect())
            }
            _ => panic!("oracle_map: shape mismatch"),
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_desc(depth: u32) -> BoxedStrategy<FunctorDesc> {
            if depth == 0 {
                prop_oneof![
                    Just(FunctorDesc::Id),
                    Just(FunctorDesc::ConstNat),
                    Just(FunctorDesc::ConstBool),
                    Just(FunctorDesc::ConstUnit),
                ]
                .boxed()
            } else {
                let leaf = arb_desc(0);
                let sub = arb_desc(depth - 1);
                prop_oneof![
                    leaf,
                    prop::collection::vec(arb_desc(depth - 1), 1..3)
                        .prop_map(FunctorDesc::prod),
                    prop::collection::vec(arb_desc(depth - 1), 1..3).prop_map(FunctorDesc::sum),
                    sub.clone().prop_map(|d| FunctorDesc::ListOf(Rc::new(d))),
                    sub.prop_map(|d| FunctorDesc::FinSetOf(Rc::new(d))),
                ]
                .boxed()
            }
        }

        fn arb_container_for(desc: FunctorDesc) -> BoxedStrategy<Container<u32>> {
            match desc {
                FunctorDesc::Id => any::<u32>().prop_map(|p| Container::Slot(p % 100)).boxed(),
                FunctorDesc::ConstNat => any::<u8>()
                    .prop_map(|n| Container::Nat(BigUint::from(n)))
                    .boxed(),
                FunctorDesc::ConstBool => any::<bool>().prop_map(Container::Bool).boxed(),
                FunctorDesc::ConstUnit => Just(Container::Unit).boxed(),
                FunctorDesc::Prod(ds) => ds
                    .iter()
                    .map(|d| arb_container_for((**d).clone()))
                    .collect::<Vec<_>>()
                    .prop_map(Container::Tuple)
                    .boxed(),
                FunctorDesc::Sum(ds) => {
                    let n = ds.len();
                    (0..n)
                        .prop_flat_map(move |i| {
                            let inner = arb_container_for((*ds[i]).clone());
                            inner.prop_map(move |c| Container::Tagged(i as u32, Box::new(c)))
                        })
                        .boxed()
                }
                FunctorDesc::ListOf(d) => {
                    prop::collection::vec(arb_container_for((*d).clone()), 0..3)
                        .prop_map(Container::List)
                        .boxed()
                }
                FunctorDesc::FinSetOf(d) => {
                    prop::collection::vec(arb_container_for((*d).clone()), 0..3)
                        .prop_map(Container::finset)
                        .boxed()
                }
            }
        }

        fn arb_pair() -> impl Strategy<Value = (FunctorDesc, Container<u32>)> {
            arb_desc(3).prop_flat_map(|d| {
                let dc = d.clone();
                arb_container_for(d).prop_map(move |c| (dc.clone(), c))
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(128))]

            #[test]
            fn map_identity((_d, c) in arb_pair()) {
                prop_assert_eq!(cmap(|p: &u32| *p, &c), c);
            }

            #[test]
            fn map_composition_matches_oracle((d, c) in arb_pair()) {
                let f = |p: u32| p.wrapping_mul(3);
                let g = |p: u32| p.wrapping_add(11);
                let composed = cmap(|p: &u32| g(f(*p)), &c);
                let staged = cmap(|p: &u32| g(*p), &cmap(|p: &u32| f(*p), &c));
                prop_assert_eq!(&composed, &staged);
                prop_assert_eq!(composed, oracle_map(&d, &c, &|p| g(f(p))));
            }

            #[test]
            fn content_commutes_with_map((_d, c) in arb_pair()) {
                // Injective payload map, so canonicalization cannot merge slots.
                let f = |p: &u32| *p as u64 + 1;
                let lhs: Vec<u64> = ccontent(&cmap(f, &c)).into_iter().copied().collect();
                let rhs: Vec<u64> = ccontent(&c).into_iter().map(f).collect();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn content_length_invariant_under_injective_map((_d, c) in arb_pair()) {
                let mapped = cmap(|p: &u32| *p as u64, &c);
                prop_assert_eq!(ccontent(&mapped).len(), ccontent(&c).len());
            }

            #[test]
            fn relator_identity_law((d, c) in arb_pair()) {
                prop_assert!(crel(&d, &mut |x: &u32, y: &u32| x == y, &c, &c).unwrap());
            }

            #[test]
            fn relator_monotone((d, c) in arb_pair()) {
                // If R ⊆ R' then crel R ⊆ crel R'.
                let weak = crel(&d, &mut |x: &u32, y: &u32| x == y, &c, &c).unwrap();
                let strong = crel(&d, &mut |_: &u32, _: &u32| true, &c, &c).unwrap();
                prop_assert!(!weak || strong);
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            // Composition law with functional relations, witness found by
            // brute-force enumeration over a small payload universe.
            #[test]
            fn relator_composition_with_functional_relations((d, c) in arb_pair()) {
                prop_assume!(ccontent(&c).len() <= 5);
                let f = |x: u32| (x * 7 + 1) % 5;
                let g = |x: u32| (x + 2) % 5;
                let z = cmap(|p: &u32| g(f(*p)), &c);
                let lhs = crel(&d, &mut |x: &u32, y: &u32| g(f(*x)) == *y, &c, &z).unwrap();

                // Search for an intermediate container related to both sides.
                let slots = ccontent(&c).len();
                let mut found = false;
                let mut assignment = vec![0u32; slots];
                'outer: loop {
                    let mut i = 0;
                    let y = cmap(|_: &u32| { let v = assignment[i]; i += 1; v }, &c);
                    let left = crel(&d, &mut |x: &u32, m: &u32| f(*x) == *m, &c, &y).unwrap();
                    let right = crel(&d, &mut |m: &u32, zz: &u32| g(*m) == *zz, &y, &z).unwrap();
                    if left && right {
                        found = true;
                        break;
                    }
                    // next assignment in base 5
                    for digit in assignment.iter_mut() {
                        if *digit < 4 { *digit += 1; continue 'outer; }
                        *digit = 0;
                    }
                    break;
                }
                prop_assert_eq!(lhs, found);
            }
        }
    }
}
