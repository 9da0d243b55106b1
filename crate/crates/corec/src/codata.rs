//! Lazy final-coalgebra values and the corecursors that build them.
//!
//! A [`CoVal`] is a memoized suspension: forcing it yields exactly one
//! layer of structure (a [`Container`] over further `CoVal`s) and caches
//! it, so forcing is idempotent. Three corecursors build such values from
//! seeds of increasing expressiveness:
//!
//! * [`corec_prim`] — one constructor layer per step, continuations in
//!   the slots;
//! * [`corec_up`] — one constructor layer over a formal expression in
//!   registered well-behaved operations, continuations at the leaves;
//! * [`corec_flex`] — a formal expression in which every path to a
//!   continuation crosses at least one constructor layer.
//!
//! [`eval`] collapses formal expressions over codata values by applying
//! the registered operations' runtimes; sub-values stay lazy throughout.

use crate::base::{CodataId, OpId};
use crate::error::RtError;
use crate::functor::{Canon, Container};
use crate::registry::CorecState;
use crate::term::Term;
use num_bigint::BigUint;
use std::cell::{Cell, RefCell};
use std::cmp::Ordering;
use std::rc::Rc;

/// Default per-layer budget for unguarded unfoldings.
pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Shared lazy-evaluation context for one session: the operation tables of
/// every declared codatatype, plus instrumentation counters and the fuel
/// budget for mixed definitions.
pub struct Runtime {
    states: RefCell<Vec<CorecState>>,
    next_id: Cell<u64>,
    forcings: Cell<u64>,
    fuel_default: Cell<u64>,
}

impl Runtime {
    pub fn new() -> Rc<Runtime> {
        Rc::new(Runtime {
            states: RefCell::new(Vec::new()),
            next_id: Cell::new(0),
            forcings: Cell::new(0),
            fuel_default: Cell::new(DEFAULT_FUEL),
        })
    }

    pub fn add_state(&self, state: CorecState) -> CodataId {
        let mut states = self.states.borrow_mut();
        states.push(state);
        states.len() - 1
    }

    pub fn with_state<R>(&self, j: CodataId, f: impl FnOnce(&CorecState) -> R) -> R {
        f(&self.states.borrow()[j])
    }

    pub fn with_state_mut<R>(&self, j: CodataId, f: impl FnOnce(&mut CorecState) -> R) -> R {
        f(&mut self.states.borrow_mut()[j])
    }

    pub fn state_count(&self) -> usize {
        self.states.borrow().len()
    }

    pub(crate) fn fresh_id(&self) -> u64 {
        let id = self.next_id.get();
        self.next_id.set(id + 1);
        id
    }

    pub fn count_forcing(&self) {
        self.forcings.set(self.forcings.get() + 1);
    }

    /// Number of suspension steps executed so far; the productivity and
    /// memoization tests read this.
    pub fn forcings(&self) -> u64 {
        self.forcings.get()
    }

    pub fn fuel_default(&self) -> u64 {
        self.fuel_default.get()
    }

    pub fn set_fuel_default(&self, fuel: u64) {
        self.fuel_default.set(fuel);
    }

    /// Clones the runtime closure of a registered operation.
    pub fn op_runtime(&self, op: OpId) -> Result<OpRuntime, RtError> {
        let states = self.states.borrow();
        let state = states.get(op.codata).ok_or(RtError::UnknownOp(op))?;
        state
            .entry(op.index)
            .map(|e| e.runtime.clone())
            .ok_or(RtError::UnknownOp(op))
    }
}

/// Runtime of a registered operation: one layer's worth of arguments in,
/// a (typically lazy) codata value out.
pub type OpRuntime = Rc<dyn Fn(Container<CoVal>) -> Result<CoVal, RtError>>;

type Thunk = Rc<dyn Fn() -> Result<Container<CoVal>, RtError>>;

enum CoState {
    Forced(Rc<Container<CoVal>>),
    Suspended(Thunk),
    Busy,
}

struct CoCell {
    id: u64,
    codata: CodataId,
    state: RefCell<CoState>,
}

/// A lazy element of a codatatype.
#[derive(Clone)]
pub struct CoVal {
    cell: Rc<CoCell>,
}

impl CoVal {
    /// Wraps one explicit layer; the value is immediately forced.
    pub fn from_layer(rt: &Runtime, codata: CodataId, layer: Container<CoVal>) -> CoVal {
        CoVal {
            cell: Rc::new(CoCell {
                id: rt.fresh_id(),
                codata,
                state: RefCell::new(CoState::Forced(Rc::new(layer))),
            }),
        }
    }

    /// Defers the layer computation until first observation. A failing
    /// step is not cached: the suspension stays in place so a later force
    /// (for example with a larger fuel budget) can retry.
    pub fn suspend(
        rt: &Runtime,
        codata: CodataId,
        step: impl Fn() -> Result<Container<CoVal>, RtError> + 'static,
    ) -> CoVal {
        CoVal {
            cell: Rc::new(CoCell {
                id: rt.fresh_id(),
                codata,
                state: RefCell::new(CoState::Suspended(Rc::new(step))),
            }),
        }
    }

    /// Session-unique creation id; doubles as the canonical order.
    pub fn id(&self) -> u64 {
        self.cell.id
    }

    pub fn codata(&self) -> CodataId {
        self.cell.codata
    }

    pub fn is_forced(&self) -> bool {
        matches!(&*self.cell.state.borrow(), CoState::Forced(_))
    }

    /// Destructs one layer, forcing at most once; the layer is cached and
    /// never recomputed.
    pub fn dtor(&self) -> Result<Rc<Container<CoVal>>, RtError> {
        {
            let st = self.cell.state.borrow();
            match &*st {
                CoState::Forced(layer) => return Ok(layer.clone()),
                CoState::Busy => return Err(RtError::CyclicForce),
                CoState::Suspended(_) => {}
            }
        }
        let thunk = {
            let mut st = self.cell.state.borrow_mut();
            match std::mem::replace(&mut *st, CoState::Busy) {
                CoState::Suspended(f) => f,
                CoState::Forced(layer) => {
                    *st = CoState::Forced(layer.clone());
                    return Ok(layer);
                }
                CoState::Busy => return Err(RtError::CyclicForce),
            }
        };
        match thunk() {
            Ok(layer) => {
                let layer = Rc::new(layer);
                *self.cell.state.borrow_mut() = CoState::Forced(layer.clone());
                Ok(layer)
            }
            Err(e) => {
                *self.cell.state.borrow_mut() = CoState::Suspended(thunk);
                Err(e)
            }
        }
    }
}

impl std::fmt::Debug for CoVal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CoVal#{}", self.cell.id)
    }
}

impl Canon for CoVal {
    fn canon_cmp(&self, other: &Self) -> Ordering {
        self.id().cmp(&other.id())
    }
}

impl PartialEq for CoVal {
    fn eq(&self, other: &Self) -> bool {
        Rc::ptr_eq(&self.cell, &other.cell)
    }
}

impl Eq for CoVal {}

impl std::hash::Hash for CoVal {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.cell.id.hash(state);
    }
}

/// Constructor view: wraps a layer as a value. Inverse of [`CoVal::dtor`]
/// up to observation.
pub fn ctor(rt: &Runtime, codata: CodataId, layer: Container<CoVal>) -> CoVal {
    CoVal::from_layer(rt, codata, layer)
}

/// Collapses a formal expression over codata values by applying the
/// registered operations recursively. Sub-values remain lazy: an
/// operation's runtime receives suspended values, never forced prefixes.
pub fn eval(rt: &Rc<Runtime>, t: &Term<CoVal>) -> Result<CoVal, RtError> {
    match t {
        Term::Leaf(j) => Ok(j.clone()),
        Term::Node(op, args) => {
            let runtime = rt.op_runtime(*op)?;
            let concrete = args.try_map(&mut |sub: &Term<CoVal>| eval(rt, sub))?;
            runtime(concrete)
        }
    }
}

pub type PrimSeed<A> = Rc<dyn Fn(&A) -> Result<Container<A>, RtError>>;
pub type UpSeed<A> = Rc<dyn Fn(&A) -> Result<Container<Term<A>>, RtError>>;
pub type FlexSeed<A> = Rc<dyn Fn(&A) -> Result<Term<Container<Term<A>>>, RtError>>;

/// Primitive corecursor: each step emits one layer with continuations in
/// the payload slots.
pub fn corec_prim<A: Clone + 'static>(
    rt: &Rc<Runtime>,
    codata: CodataId,
    seed: PrimSeed<A>,
    a: A,
) -> CoVal {
    let rt2 = rt.clone();
    CoVal::suspend(rt, codata, move || {
        rt2.count_forcing();
        let layer = seed(&a)?;
        Ok(layer.map(&mut |a2: &A| corec_prim(&rt2, codata, seed.clone(), a2.clone())))
    })
}

/// Top-guarded corecursor: each step emits one layer whose slots hold
/// formal expressions in registered operations with continuations at the
/// leaves.
pub fn corec_up<A: Clone + 'static>(
    rt: &Rc<Runtime>,
    codata: CodataId,
    seed: UpSeed<A>,
    a: A,
) -> CoVal {
    let rt2 = rt.clone();
    CoVal::suspend(rt, codata, move || {
        rt2.count_forcing();
        let layer = seed(&a)?;
        layer.try_map(&mut |t: &Term<A>| {
            let over_vals: Term<CoVal> =
                t.map(&mut |a2: &A| corec_up(&rt2, codata, seed.clone(), a2.clone()));
            eval(&rt2, &over_vals)
        })
    })
}

/// Flexibly guarded corecursor: the seed produces a formal expression in
/// which every path to a continuation crosses at least one constructor
/// layer. The top expression is evaluated immediately (one productive
/// step); recursive continuations stay suspended.
pub fn corec_flex<A: Clone + 'static>(
    rt: &Rc<Runtime>,
    codata: CodataId,
    seed: FlexSeed<A>,
    a: &A,
) -> Result<CoVal, RtError> {
    let top: Term<Container<Term<A>>> = seed(a)?;
    let over_vals: Term<CoVal> = top.try_map(&mut |guard: &Container<Term<A>>| {
        let layer: Container<CoVal> = guard.try_map(&mut |inner: &Term<A>| {
            let t: Term<CoVal> =
                inner.map(&mut |a2: &A| flex_suspended(rt, codata, seed.clone(), a2.clone()));
            eval(rt, &t)
        })?;
        Ok::<CoVal, RtError>(CoVal::from_layer(rt, codata, layer))
    })?;
    eval(rt, &over_vals)
}

/// Lazy wrapper for recursive continuations of [`corec_flex`]; without it
/// the eager top-level evaluation would regress infinitely.
pub fn flex_suspended<A: Clone + 'static>(
    rt: &Rc<Runtime>,
    codata: CodataId,
    seed: FlexSeed<A>,
    a: A,
) -> CoVal {
    let rt2 = rt.clone();
    CoVal::suspend(rt, codata, move || {
        rt2.count_forcing();
        let v = corec_flex(&rt2, codata, seed.clone(), &a)?;
        Ok((*v.dtor()?).clone())
    })
}

/// Depth-bounded observation of a codata value.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Obs {
    /// Depth exhausted below this point.
    Cut,
    Layer(Box<Container<Obs>>),
}

impl Canon for Obs {
    fn canon_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Obs::Cut, Obs::Cut) => Ordering::Equal,
            (Obs::Cut, Obs::Layer(_)) => Ordering::Less,
            (Obs::Layer(_), Obs::Cut) => Ordering::Greater,
            (Obs::Layer(a), Obs::Layer(b)) => a.canon_cmp(b),
        }
    }
}

/// Forces exactly `n` layers. Finite values (a nil constructor) simply
/// run out of payload slots early; depth-exhausted subtrees are marked.
pub fn take_prefix(j: &CoVal, n: usize) -> Result<Obs, RtError> {
    if n == 0 {
        return Ok(Obs::Cut);
    }
    let layer = j.dtor()?;
    Ok(Obs::Layer(Box::new(
        layer.try_map(&mut |sub: &CoVal| take_prefix(sub, n - 1))?,
    )))
}

/// Head sequence of a stream-shaped value (each layer a tuple of one base
/// field and one slot).
pub fn stream_prefix(j: &CoVal, n: usize) -> Result<Vec<BigUint>, RtError> {
    let mut out = Vec::with_capacity(n);
    let mut cur = j.clone();
    for _ in 0..n {
        let layer = cur.dtor()?;
        match &*layer {
            Container::Tuple(fields) => {
                let mut head = None;
                let mut tail = None;
                for f in fields {
                    match f {
                        Container::Nat(v) => head = Some(v.clone()),
                        Container::Slot(s) => tail = Some(s.clone()),
                        _ => {}
                    }
                }
                match (head, tail) {
                    (Some(h), Some(t)) => {
                        out.push(h);
                        cur = t;
                    }
                    _ => {
                        return Err(RtError::Internal(
                            "stream_prefix: layer is not stream-shaped".into(),
                        ))
                    }
                }
            }
            _ => {
                return Err(RtError::Internal(
                    "stream_prefix: layer is not stream-shaped".into(),
                ))
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::Cell;

    fn stream_layer(rt: &Runtime, n: u64, tail: CoVal) -> CoVal {
        CoVal::from_layer(
            rt,
            0,
            Container::Tuple(vec![Container::nat(n), Container::Slot(tail)]),
        )
    }

    /// natsFrom-style raw stream built with the primitive corecursor.
    fn nats_from(rt: &Rc<Runtime>, start: u64) -> CoVal {
        let seed: PrimSeed<u64> = Rc::new(|n: &u64| {
            Ok(Container::Tuple(vec![
                Container::nat(*n),
                Container::Slot(n + 1),
            ]))
        });
        corec_prim(rt, 0, seed, start)
    }

    fn const_stream(rt: &Rc<Runtime>, k: u64) -> CoVal {
        let seed: PrimSeed<u64> = Rc::new(|n: &u64| {
            Ok(Container::Tuple(vec![
                Container::nat(*n),
                Container::Slot(*n),
            ]))
        });
        corec_prim(rt, 0, seed, k)
    }

    fn heads(j: &CoVal, n: usize) -> Vec<u64> {
        stream_prefix(j, n)
            .unwrap()
            .into_iter()
            .map(|b| u64::try_from(&b).unwrap())
            .collect()
    }

    #[test]
    fn dtor_returns_cached_layer_and_forces_once() {
        let rt = Runtime::new();
        let counter = Rc::new(Cell::new(0u32));
        let c2 = counter.clone();
        let rt2 = rt.clone();
        let v = CoVal::suspend(&rt, 0, move || {
            c2.set(c2.get() + 1);
            Ok(Container::Tuple(vec![
                Container::nat(7),
                Container::Slot(stream_layer(&rt2, 8, stream_layer(&rt2, 9, {
                    // finite scaffold just for the test; never forced further
                    CoVal::suspend(&rt2, 0, || Err(RtError::Internal("end".into())))
                }))),
            ]))
        });
        let a = v.dtor().unwrap();
        let b = v.dtor().unwrap();
        assert_eq!(counter.get(), 1);
        assert_eq!(a, b);
    }

    #[test]
    fn dtor_of_ctor_returns_the_layer() {
        let rt = Runtime::new();
        let end = CoVal::suspend(&rt, 0, || Err(RtError::Internal("end".into())));
        let layer = Container::Tuple(vec![Container::nat(3), Container::Slot(end)]);
        let v = ctor(&rt, 0, layer.clone());
        assert_eq!(*v.dtor().unwrap(), layer);
    }

    #[test]
    fn dtor_of_cyclic_knot() {
        // onetwos = SCons 1 (SCons 2 onetwos), tied by a late-bound slot.
        let rt = Runtime::new();
        let slot: Rc<RefCell<Option<CoVal>>> = Rc::new(RefCell::new(None));
        let slot2 = slot.clone();
        let rt2 = rt.clone();
        let onetwos = CoVal::suspend(&rt, 0, move || {
            let me = slot2.borrow().clone().unwrap();
            Ok(Container::Tuple(vec![
                Container::nat(1),
                Container::Slot(stream_layer(&rt2, 2, me)),
            ]))
        });
        slot.replace(Some(onetwos.clone()));
        assert_eq!(heads(&onetwos, 6), vec![1, 2, 1, 2, 1, 2]);
    }

    #[test]
    fn self_observation_is_reported_not_diverging() {
        let rt = Runtime::new();
        let slot: Rc<RefCell<Option<CoVal>>> = Rc::new(RefCell::new(None));
        let slot2 = slot.clone();
        let v = CoVal::suspend(&rt, 0, move || {
            let me: CoVal = slot2.borrow().clone().unwrap();
            let forced = me.dtor()?;
            Ok((*forced).clone())
        });
        slot.replace(Some(v.clone()));
        assert!(matches!(v.dtor(), Err(RtError::CyclicForce)));
    }

    #[test]
    fn failed_step_is_retried_not_cached() {
        let rt = Runtime::new();
        let ok = Rc::new(Cell::new(false));
        let ok2 = ok.clone();
        let rt2 = rt.clone();
        let v = CoVal::suspend(&rt, 0, move || {
            if ok2.get() {
                Ok(Container::Tuple(vec![
                    Container::nat(1),
                    Container::Slot(CoVal::suspend(&rt2, 0, || {
                        Err(RtError::Internal("end".into()))
                    })),
                ]))
            } else {
                Err(RtError::FuelExhausted {
                    function: "f".into(),
                    carrier: "()".into(),
                    fuel_used: 0,
                })
            }
        });
        assert!(matches!(v.dtor(), Err(RtError::FuelExhausted { .. })));
        ok.set(true);
        assert!(v.dtor().is_ok());
    }

    #[test]
    fn corec_prim_pointwise_sum_seed() {
        // s(xs, ys) = (head xs + head ys, (tail xs, tail ys))
        let rt = Runtime::new();
        let seed: PrimSeed<(CoVal, CoVal)> = Rc::new(|(xs, ys): &(CoVal, CoVal)| {
            let (hx, tx) = split_stream(&*xs.dtor()?);
            let (hy, ty) = split_stream(&*ys.dtor()?);
            Ok(Container::Tuple(vec![
                Container::Nat(hx + hy),
                Container::Slot((tx, ty)),
            ]))
        });
        let sum = corec_prim(&rt, 0, seed, (nats_from(&rt, 1), const_stream(&rt, 10)));
        // Elementwise-sum oracle over (1,2,3,…) and (10,10,10,…).
        let expect: Vec<u64> = (0..6).map(|i| (i + 1) + 10).collect();
        assert_eq!(heads(&sum, 6), expect);
    }

    #[test]
    fn corec_prim_constant_seed_is_fixed_point() {
        let rt = Runtime::new();
        let seed: PrimSeed<u64> = Rc::new(|k: &u64| {
            Ok(Container::Tuple(vec![
                Container::nat(5),
                Container::Slot(*k),
            ]))
        });
        let v = corec_prim(&rt, 0, seed, 0);
        assert_eq!(heads(&v, 5), vec![5, 5, 5, 5, 5]);
    }

    #[test]
    fn corec_prim_every_other_seed() {
        // s xs = (head xs, tail (tail xs)) over 0,1,2,3,…
        let rt = Runtime::new();
        let seed: PrimSeed<CoVal> = Rc::new(|xs: &CoVal| {
            let (h, t) = split_stream(&*xs.dtor()?);
            let (_, tt) = split_stream(&*t.dtor()?);
            Ok(Container::Tuple(vec![
                Container::Nat(h),
                Container::Slot(tt),
            ]))
        });
        let v = corec_prim(&rt, 0, seed, nats_from(&rt, 0));
        // Index-doubling oracle.
        let expect: Vec<u64> = (0..8).map(|i| 2 * i).collect();
        assert_eq!(heads(&v, 8), expect);
    }

    #[test]
    fn take_prefix_zero_is_empty_observation() {
        let rt = Runtime::new();
        let v = nats_from(&rt, 0);
        assert_eq!(take_prefix(&v, 0).unwrap(), Obs::Cut);
    }

    #[test]
    fn take_prefix_forces_no_more_than_requested() {
        let rt = Runtime::new();
        let v = nats_from(&rt, 0);
        take_prefix(&v, 10).unwrap();
        let after_ten = rt.forcings();
        take_prefix(&v, 10).unwrap();
        take_prefix(&v, 6).unwrap();
        assert_eq!(rt.forcings(), after_ten);
        take_prefix(&v, 12).unwrap();
        assert_eq!(rt.forcings(), after_ten + 2);
    }

    fn split_stream(layer: &Container<CoVal>) -> (BigUint, CoVal) {
        match layer {
            Container::Tuple(fields) => {
                let mut head = None;
                let mut tail = None;
                for f in fields {
                    match f {
                        Container::Nat(v) => head = Some(v.clone()),
                        Container::Slot(s) => tail = Some(s.clone()),
                        _ => {}
                    }
                }
                (head.unwrap(), tail.unwrap())
            }
            _ => panic!("not a stream layer"),
        }
    }
}
