//! The evolving corecursion state: one table of well-behaved operations
//! per codatatype, each entry carrying an arity functor, an executable
//! runtime, and a syntactic seed rule describing its one-step behaviour.
//!
//! A seed rule is a template: it references each argument only through
//! the argument itself and the components of a single observation layer,
//! so it is parametric by construction. Instantiating a rule on concrete
//! arguments and evaluating the resulting formal expression must agree
//! with the entry's runtime — that is the well-behavedness condition,
//! checked empirically at registration time by [`verify_well_behaved`].

use crate::base::{ArithOp, CmpOp, CodataId, OpId};
use crate::codata::{ctor, eval, take_prefix, CoVal, Obs, OpRuntime, Runtime};
use crate::error::{RegError, RtError};
use crate::functor::{Canon, Container, FunctorDesc};
use crate::term::Term;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::rc::Rc;

// ---------------------------------------------------------------------------
// Seed-rule template language
// ---------------------------------------------------------------------------

/// Which argument a reference points at.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RArg {
    /// Flat field index of the arity functor (within the current arm for
    /// sum arities).
    Field(u32),
    /// Element variable bound by an enclosing collection map.
    Pat(u32),
}

/// A collection of codata arguments.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RColl {
    /// A list- or set-valued field of the arity itself.
    ArgColl(u32),
    /// A list- or set-valued field of the observed layer of a codata
    /// argument.
    ObsColl(RArg, u32),
}

/// Base-sorted template expressions over observed components.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RBase {
    Nat(BigUint),
    Bool(bool),
    Unit,
    /// Base-sorted field of the arity.
    ArgBase(u32),
    /// Base-sorted field of the observed layer of a codata argument.
    ObsBase(RArg, u32),
    Arith(ArithOp, Box<RBase>, Box<RBase>),
    Cmp(CmpOp, Box<RBase>, Box<RBase>),
    And(Box<RBase>, Box<RBase>),
    Or(Box<RBase>, Box<RBase>),
    Not(Box<RBase>),
    If(Box<RBase>, Box<RBase>, Box<RBase>),
    /// Maximum of the observed base field over a collection of codata
    /// arguments; 0 when empty.
    FmaxObsBase(RColl, u32),
}

/// Codata-valued references: an argument itself, or one codata component
/// of its observation layer.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RAVal {
    Self_(RArg),
    ObsSlot(RArg, u32),
}

/// Formal-expression templates: the content slots of a rule's output.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TermTpl {
    /// Leaf holding an argument-derived codata value.
    Val(RAVal),
    /// Corecursive continuation: a grouping of the entry's own arity.
    /// Instantiation embeds it as a node of the entry's own operation with
    /// leaf arguments.
    SelfGroup {
        tag: Option<u32>,
        args: Vec<ArgTpl>,
    },
    /// Application of a registered operation.
    Op(OpId, Vec<ArgTpl>),
    /// Branch on the observed constructor tag of a codata argument.
    CaseObsTag(RArg, Vec<TermTpl>),
    If(RBase, Box<TermTpl>, Box<TermTpl>),
}

/// One flat argument of an operation node inside a template.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ArgTpl {
    Base(RBase),
    T(TermTpl),
    TList(TermListTpl),
    TSet(TermListTpl),
    Tagged(u32, Vec<ArgTpl>),
}

/// Template for a list/set of subterms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TermListTpl {
    Lit(Vec<TermTpl>),
    /// Zipped map over one or more collections: binds `pats[k]` to the
    /// current element of `sources[k]`, truncating to the shortest.
    Map {
        sources: Vec<RColl>,
        pats: Vec<u32>,
        body: Box<TermTpl>,
    },
}

/// The produced layer: optional output constructor tag plus per-field
/// templates, aligned with the layer functor's flat fields.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LayerTpl {
    pub tag: Option<u32>,
    pub fields: Vec<FieldTpl>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FieldTpl {
    Base(RBase),
    Slot(TermTpl),
    SlotList(TermListTpl),
    SlotSet(TermListTpl),
}

/// Body of a seed rule.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RuleBody {
    If(RBase, Box<RuleBody>, Box<RuleBody>),
    /// Branch on the arity's own sum tag (constructor bundles).
    CaseSelf(Vec<RuleBody>),
    /// Branch on the observed constructor tag of a codata argument.
    CaseObsTag(RArg, Vec<RuleBody>),
    Layer(LayerTpl),
}

/// Symbolic one-step behaviour of a registered operation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeedRule {
    pub body: RuleBody,
}

// ---------------------------------------------------------------------------
// Corecursion state
// ---------------------------------------------------------------------------

/// A registered well-behaved operation.
pub struct OpEntry {
    pub name: String,
    /// The operation's arity functor.
    pub arity: FunctorDesc,
    /// Executable behaviour, compiled independently of the rule.
    pub runtime: OpRuntime,
    /// Syntactic one-step behaviour; coherence with `runtime` is checked
    /// at registration.
    pub rule: SeedRule,
}

/// Per-codatatype corecursion state: the layer functor and the ordered,
/// append-only table of well-behaved operations. Entry 0 is always the
/// constructor bundle.
pub struct CorecState {
    pub name: String,
    pub layer_desc: FunctorDesc,
    pub ctor_names: Vec<String>,
    entries: Vec<OpEntry>,
}

impl CorecState {
    pub fn entry(&self, index: u32) -> Option<&OpEntry> {
        self.entries.get(index as usize)
    }

    pub fn entries(&self) -> &[OpEntry] {
        &self.entries
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    pub fn find_by_name(&self, name: &str) -> Option<u32> {
        self.entries
            .iter()
            .position(|e| e.name == name)
            .map(|i| i as u32)
    }

    /// The signature functor: sum of all entries' arities, aligned
    /// index-wise with the table.
    pub fn sig_desc(&self) -> FunctorDesc {
        FunctorDesc::Sum(
            self.entries
                .iter()
                .map(|e| Rc::new(e.arity.clone()))
                .collect(),
        )
    }
}

/// Splits a description into its top-level flat fields: the components of
/// a product, or the description itself otherwise.
pub fn flat_fields(desc: &FunctorDesc) -> Vec<Rc<FunctorDesc>> {
    match desc {
        FunctorDesc::Prod(items) => items.clone(),
        other => vec![Rc::new(other.clone())],
    }
}

/// Arms of a sum description, or `None` for single-constructor shapes.
pub fn sum_arms(desc: &FunctorDesc) -> Option<Vec<Rc<FunctorDesc>>> {
    match desc {
        FunctorDesc::Sum(arms) => Some(arms.clone()),
        _ => None,
    }
}

/// Rebuilds a container from flat field values according to a field list.
pub fn container_from_fields<P: Canon>(
    desc: &FunctorDesc,
    mut fields: Vec<Container<P>>,
) -> Container<P> {
    match desc {
        FunctorDesc::Prod(_) => Container::Tuple(fields),
        _ => fields.remove(0),
    }
}

/// Splits a container into flat field values, stripping an optional tag.
/// Returns the tag when present.
pub fn fields_of_container<P>(c: &Container<P>) -> (Option<u32>, Vec<&Container<P>>) {
    match c {
        Container::Tagged(tag, inner) => {
            let (_, fields) = fields_of_container(inner);
            (Some(*tag), fields)
        }
        Container::Tuple(items) => (None, items.iter().collect()),
        other => (None, vec![other]),
    }
}

/// Bootstraps the corecursion state for a freshly declared codatatype:
/// a single entry whose arity is the layer functor itself, whose runtime
/// is the constructor, and whose rule reproduces one observed layer under
/// a formal constructor node.
pub fn init_state(
    rt: &Rc<Runtime>,
    name: &str,
    layer_desc: FunctorDesc,
    ctor_names: Vec<String>,
) -> CodataId {
    let state = CorecState {
        name: name.to_string(),
        layer_desc: layer_desc.clone(),
        ctor_names: ctor_names.clone(),
        entries: Vec::new(),
    };
    let j = rt.add_state(state);
    let weak = Rc::downgrade(rt);
    let runtime: OpRuntime = Rc::new(move |args: Container<CoVal>| {
        let rt = weak.upgrade().ok_or(RtError::SessionClosed)?;
        Ok(CoVal::from_layer(&rt, j, args))
    });
    let bundle_name = if ctor_names.len() == 1 {
        ctor_names[0].clone()
    } else {
        name.to_string()
    };
    let entry = OpEntry {
        name: bundle_name,
        arity: layer_desc.clone(),
        runtime,
        rule: SeedRule {
            body: init_rule_body(&layer_desc),
        },
    };
    rt.with_state_mut(j, |s| s.entries.push(entry));
    j
}

/// Builds the bootstrap rule for a constructor bundle: base fields pass
/// through, each codata slot reproduces its observed layer as a formal
/// constructor application over leaf values.
fn init_rule_body(layer_desc: &FunctorDesc) -> RuleBody {
    match sum_arms(layer_desc) {
        Some(arms) => RuleBody::CaseSelf(
            arms.iter()
                .enumerate()
                .map(|(tag, arm)| init_arm(layer_desc, arm, Some(tag as u32)))
                .collect(),
        ),
        None => init_arm(layer_desc, layer_desc, None),
    }
}

fn init_arm(layer_desc: &FunctorDesc, arm: &FunctorDesc, tag: Option<u32>) -> RuleBody {
    let mut pat_counter = 0u32;
    let fields = flat_fields(arm)
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let i = i as u32;
            match &**f {
                FunctorDesc::Id => {
                    FieldTpl::Slot(obs_reconstruction(layer_desc, RArg::Field(i), &mut pat_counter))
                }
                FunctorDesc::ListOf(inner) if matches!(**inner, FunctorDesc::Id) => {
                    let pat = fresh_pat(&mut pat_counter);
                    FieldTpl::SlotList(TermListTpl::Map {
                        sources: vec![RColl::ArgColl(i)],
                        pats: vec![pat],
                        body: Box::new(obs_reconstruction(
                            layer_desc,
                            RArg::Pat(pat),
                            &mut pat_counter,
                        )),
                    })
                }
                FunctorDesc::FinSetOf(inner) if matches!(**inner, FunctorDesc::Id) => {
                    let pat = fresh_pat(&mut pat_counter);
                    FieldTpl::SlotSet(TermListTpl::Map {
                        sources: vec![RColl::ArgColl(i)],
                        pats: vec![pat],
                        body: Box::new(obs_reconstruction(
                            layer_desc,
                            RArg::Pat(pat),
                            &mut pat_counter,
                        )),
                    })
                }
                _ => FieldTpl::Base(RBase::ArgBase(i)),
            }
        })
        .collect();
    RuleBody::Layer(LayerTpl { tag, fields })
}

fn fresh_pat(counter: &mut u32) -> u32 {
    let p = *counter;
    *counter += 1;
    p
}

/// Term template reproducing one observed layer of argument `arg` as a
/// formal constructor application: base components become base leaves,
/// codata components become value leaves.
fn obs_reconstruction(layer_desc: &FunctorDesc, arg: RArg, pat_counter: &mut u32) -> TermTpl {
    match sum_arms(layer_desc) {
        Some(arms) => TermTpl::CaseObsTag(
            arg,
            arms.iter()
                .enumerate()
                .map(|(tag, arm)| obs_arm(arm, arg, Some(tag as u32), pat_counter))
                .collect(),
        ),
        None => obs_arm(layer_desc, arg, None, pat_counter),
    }
}

fn obs_arm(arm: &FunctorDesc, arg: RArg, tag: Option<u32>, pat_counter: &mut u32) -> TermTpl {
    let args = flat_fields(arm)
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let i = i as u32;
            match &**f {
                FunctorDesc::Id => ArgTpl::T(TermTpl::Val(RAVal::ObsSlot(arg, i))),
                FunctorDesc::ListOf(inner) if matches!(**inner, FunctorDesc::Id) => {
                    let pat = fresh_pat(pat_counter);
                    ArgTpl::TList(TermListTpl::Map {
                        sources: vec![RColl::ObsColl(arg, i)],
                        pats: vec![pat],
                        body: Box::new(TermTpl::Val(RAVal::Self_(RArg::Pat(pat)))),
                    })
                }
                FunctorDesc::FinSetOf(inner) if matches!(**inner, FunctorDesc::Id) => {
                    let pat = fresh_pat(pat_counter);
                    ArgTpl::TSet(TermListTpl::Map {
                        sources: vec![RColl::ObsColl(arg, i)],
                        pats: vec![pat],
                        body: Box::new(TermTpl::Val(RAVal::Self_(RArg::Pat(pat)))),
                    })
                }
                _ => ArgTpl::Base(RBase::ObsBase(arg, i)),
            }
        })
        .collect();
    TermTpl::SelfGroup { tag, args }
}

// ---------------------------------------------------------------------------
// Concrete rule instantiation
// ---------------------------------------------------------------------------

/// Argument bindings for one rule instantiation.
struct RuleEnv<'a> {
    rt: &'a Rc<Runtime>,
    /// Flat argument fields of the current arm.
    fields: Vec<ArgField>,
    /// Element bindings of enclosing collection maps.
    pats: Vec<(u32, CoVal)>,
    own_op: OpId,
}

#[derive(Clone)]
enum ArgField {
    Nat(BigUint),
    Bool(bool),
    Unit,
    Co(CoVal),
    CoList(Vec<CoVal>),
    CoSet(Vec<CoVal>),
}

fn container_to_arg_fields(c: &Container<CoVal>) -> (Option<u32>, Vec<ArgField>) {
    let (tag, fields) = fields_of_container(c);
    let converted = fields
        .into_iter()
        .map(|f| match f {
            Container::Nat(n) => ArgField::Nat(n.clone()),
            Container::Bool(b) => ArgField::Bool(*b),
            Container::Unit => ArgField::Unit,
            Container::Slot(v) => ArgField::Co(v.clone()),
            Container::List(items) => ArgField::CoList(
                items
                    .iter()
                    .map(|i| match i {
                        Container::Slot(v) => v.clone(),
                        _ => panic!("rule arity field: nested non-slot list"),
                    })
                    .collect(),
            ),
            Container::FinSet(items) => ArgField::CoSet(
                items
                    .iter()
                    .map(|i| match i {
                        Container::Slot(v) => v.clone(),
                        _ => panic!("rule arity field: nested non-slot set"),
                    })
                    .collect(),
            ),
            other => panic!("rule arity field: unsupported shape {other:?}"),
        })
        .collect();
    (tag, converted)
}

impl<'a> RuleEnv<'a> {
    fn co_arg(&self, r: RArg) -> Result<CoVal, RtError> {
        match r {
            RArg::Field(i) => match self.fields.get(i as usize) {
                Some(ArgField::Co(v)) => Ok(v.clone()),
                _ => Err(RtError::Internal(format!("rule: field {i} is not codata"))),
            },
            RArg::Pat(p) => self
                .pats
                .iter()
                .rev()
                .find(|(q, _)| *q == p)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| RtError::Internal(format!("rule: unbound pattern {p}"))),
        }
    }

    fn obs(&self, r: RArg) -> Result<Rc<Container<CoVal>>, RtError> {
        self.co_arg(r)?.dtor()
    }

    fn obs_field(&self, r: RArg, i: u32) -> Result<Container<CoVal>, RtError> {
        let layer = self.obs(r)?;
        let (_, fields) = fields_of_container(&layer);
        fields
            .get(i as usize)
            .map(|c| (*c).clone())
            .ok_or_else(|| RtError::Internal(format!("rule: observation has no field {i}")))
    }

    fn coll(&self, c: &RColl) -> Result<Vec<CoVal>, RtError> {
        match c {
            RColl::ArgColl(i) => match self.fields.get(*i as usize) {
                Some(ArgField::CoList(vs)) | Some(ArgField::CoSet(vs)) => Ok(vs.clone()),
                _ => Err(RtError::Internal(format!(
                    "rule: field {i} is not a collection"
                ))),
            },
            RColl::ObsColl(r, i) => match self.obs_field(*r, *i)? {
                Container::List(items) | Container::FinSet(items) => Ok(items
                    .iter()
                    .map(|it| match it {
                        Container::Slot(v) => Ok(v.clone()),
                        _ => Err(RtError::Internal("rule: non-slot collection".into())),
                    })
                    .collect::<Result<_, _>>()?),
                _ => Err(RtError::Internal(format!(
                    "rule: observed field {i} is not a collection"
                ))),
            },
        }
    }

    fn base(&self, b: &RBase) -> Result<BaseVal, RtError> {
        Ok(match b {
            RBase::Nat(n) => BaseVal::Nat(n.clone()),
            RBase::Bool(b) => BaseVal::Bool(*b),
            RBase::Unit => BaseVal::Unit,
            RBase::ArgBase(i) => match self.fields.get(*i as usize) {
                Some(ArgField::Nat(n)) => BaseVal::Nat(n.clone()),
                Some(ArgField::Bool(b)) => BaseVal::Bool(*b),
                Some(ArgField::Unit) => BaseVal::Unit,
                _ => return Err(RtError::Internal(format!("rule: field {i} is not base"))),
            },
            RBase::ObsBase(r, i) => match self.obs_field(*r, *i)? {
                Container::Nat(n) => BaseVal::Nat(n),
                Container::Bool(b) => BaseVal::Bool(b),
                Container::Unit => BaseVal::Unit,
                _ => {
                    return Err(RtError::Internal(format!(
                        "rule: observed field {i} is not base"
                    )))
                }
            },
            RBase::Arith(op, x, y) => {
                let x = self.base(x)?.expect_nat()?;
                let y = self.base(y)?.expect_nat()?;
                BaseVal::Nat(nat_arith(*op, &x, &y)?)
            }
            RBase::Cmp(op, x, y) => {
                let x = self.base(x)?.expect_nat()?;
                let y = self.base(y)?.expect_nat()?;
                BaseVal::Bool(match op {
                    CmpOp::Eq => x == y,
                    CmpOp::Lt => x < y,
                    CmpOp::Gt => x > y,
                })
            }
            RBase::And(x, y) => {
                BaseVal::Bool(self.base(x)?.expect_bool()? && self.base(y)?.expect_bool()?)
            }
            RBase::Or(x, y) => {
                BaseVal::Bool(self.base(x)?.expect_bool()? || self.base(y)?.expect_bool()?)
            }
            RBase::Not(x) => BaseVal::Bool(!self.base(x)?.expect_bool()?),
            RBase::If(c, t, e) => {
                if self.base(c)?.expect_bool()? {
                    self.base(t)?
                } else {
                    self.base(e)?
                }
            }
            RBase::FmaxObsBase(coll, i) => {
                let elems = self.coll(coll)?;
                let mut best = BigUint::zero();
                for e in elems {
                    let layer = e.dtor()?;
                    let (_, fields) = fields_of_container(&*layer);
                    if let Some(Container::Nat(n)) = fields.get(*i as usize) {
                        if *n > best {
                            best = n.clone();
                        }
                    }
                }
                BaseVal::Nat(best)
            }
        })
    }

    fn term(&mut self, tpl: &TermTpl) -> Result<Term<CoVal>, RtError> {
        Ok(match tpl {
            TermTpl::Val(v) => Term::Leaf(self.aval(*v)?),
            TermTpl::SelfGroup { tag, args } => {
                let pieces = self.arg_fields(args)?;
                let arity = self.own_arity()?;
                let arm = match (tag, sum_arms(&arity)) {
                    (Some(t), Some(arms)) => (*arms[*t as usize]).clone(),
                    _ => arity,
                };
                let body = container_from_fields(&arm, pieces);
                let wrapped = match tag {
                    Some(t) => Container::Tagged(*t, Box::new(body)),
                    None => body,
                };
                Term::node(self.own_op, wrapped)
            }
            TermTpl::Op(op, args) => {
                let pieces = self.arg_fields(args)?;
                let arity = self
                    .rt
                    .with_state(op.codata, |s| s.entry(op.index).map(|e| e.arity.clone()))
                    .ok_or(RtError::UnknownOp(*op))?;
                Term::node(*op, container_from_fields(&arity, pieces))
            }
            TermTpl::CaseObsTag(arg, arms) => {
                let layer = self.obs(*arg)?;
                let (tag, _) = fields_of_container(&layer);
                let tag = tag.unwrap_or(0) as usize;
                let arm = arms
                    .get(tag)
                    .ok_or_else(|| RtError::Internal(format!("rule: no arm for tag {tag}")))?
                    .clone();
                self.term(&arm)?
            }
            TermTpl::If(c, t, e) => {
                if self.base(c)?.expect_bool()? {
                    self.term(t)?
                } else {
                    self.term(e)?
                }
            }
        })
    }

    fn own_arity(&self) -> Result<FunctorDesc, RtError> {
        self.rt
            .with_state(self.own_op.codata, |s| {
                s.entry(self.own_op.index).map(|e| e.arity.clone())
            })
            .ok_or(RtError::UnknownOp(self.own_op))
    }

    fn aval(&self, v: RAVal) -> Result<CoVal, RtError> {
        match v {
            RAVal::Self_(r) => self.co_arg(r),
            RAVal::ObsSlot(r, i) => match self.obs_field(r, i)? {
                Container::Slot(v) => Ok(v),
                _ => Err(RtError::Internal(format!(
                    "rule: observed field {i} is not a slot"
                ))),
            },
        }
    }

    fn arg_fields(&mut self, args: &[ArgTpl]) -> Result<Vec<Container<Term<CoVal>>>, RtError> {
        args.iter().map(|a| self.arg_field(a)).collect()
    }

    fn arg_field(&mut self, a: &ArgTpl) -> Result<Container<Term<CoVal>>, RtError> {
        Ok(match a {
            ArgTpl::Base(b) => match self.base(b)? {
                BaseVal::Nat(n) => Container::Nat(n),
                BaseVal::Bool(b) => Container::Bool(b),
                BaseVal::Unit => Container::Unit,
            },
            ArgTpl::T(t) => Container::Slot(self.term(t)?),
            ArgTpl::TList(l) => Container::List(
                self.term_list(l)?
                    .into_iter()
                    .map(Container::Slot)
                    .collect(),
            ),
            ArgTpl::TSet(l) => Container::finset(
                self.term_list(l)?
                    .into_iter()
                    .map(Container::Slot)
                    .collect(),
            ),
            ArgTpl::Tagged(tag, args) => {
                let pieces = self.arg_fields(args)?;
                let body = if pieces.len() == 1 {
                    pieces.into_iter().next().unwrap()
                } else {
                    Container::Tuple(pieces)
                };
                Container::Tagged(*tag, Box::new(body))
            }
        })
    }

    fn term_list(&mut self, l: &TermListTpl) -> Result<Vec<Term<CoVal>>, RtError> {
        match l {
            TermListTpl::Lit(items) => items.iter().map(|t| self.term(t)).collect(),
            TermListTpl::Map {
                sources,
                pats,
                body,
            } => {
                let cols: Vec<Vec<CoVal>> = sources
                    .iter()
                    .map(|c| self.coll(c))
                    .collect::<Result<_, _>>()?;
                let len = cols.iter().map(|c| c.len()).min().unwrap_or(0);
                let mut out = Vec::with_capacity(len);
                for idx in 0..len {
                    let depth = self.pats.len();
                    for (k, pat) in pats.iter().enumerate() {
                        self.pats.push((*pat, cols[k][idx].clone()));
                    }
                    let t = self.term(body);
                    self.pats.truncate(depth);
                    out.push(t?);
                }
                Ok(out)
            }
        }
    }

    fn layer(&mut self, body: &RuleBody) -> Result<Container<Term<CoVal>>, RtError> {
        match body {
            RuleBody::If(c, t, e) => {
                if self.base(c)?.expect_bool()? {
                    self.layer(t)
                } else {
                    self.layer(e)
                }
            }
            RuleBody::CaseSelf(_) => Err(RtError::Internal(
                "rule: CaseSelf outside arm selection".into(),
            )),
            RuleBody::CaseObsTag(arg, arms) => {
                let layer = self.obs(*arg)?;
                let (tag, _) = fields_of_container(&layer);
                let arm = arms
                    .get(tag.unwrap_or(0) as usize)
                    .ok_or_else(|| RtError::Internal("rule: missing observation arm".into()))?
                    .clone();
                self.layer(&arm)
            }
            RuleBody::Layer(tpl) => {
                let mut pieces = Vec::with_capacity(tpl.fields.len());
                for f in &tpl.fields {
                    pieces.push(match f {
                        FieldTpl::Base(b) => match self.base(b)? {
                            BaseVal::Nat(n) => Container::Nat(n),
                            BaseVal::Bool(b) => Container::Bool(b),
                            BaseVal::Unit => Container::Unit,
                        },
                        FieldTpl::Slot(t) => Container::Slot(self.term(t)?),
                        FieldTpl::SlotList(l) => Container::List(
                            self.term_list(l)?
                                .into_iter()
                                .map(Container::Slot)
                                .collect(),
                        ),
                        FieldTpl::SlotSet(l) => Container::finset(
                            self.term_list(l)?
                                .into_iter()
                                .map(Container::Slot)
                                .collect(),
                        ),
                    });
                }
                let layer_desc = self
                    .rt
                    .with_state(self.own_op.codata, |s| s.layer_desc.clone());
                let arm = match (tpl.tag, sum_arms(&layer_desc)) {
                    (Some(t), Some(arms)) => (*arms[t as usize]).clone(),
                    _ => layer_desc,
                };
                let body = container_from_fields(&arm, pieces);
                Ok(match tpl.tag {
                    Some(t) => Container::Tagged(t, Box::new(body)),
                    None => body,
                })
            }
        }
    }
}

enum BaseVal {
    Nat(BigUint),
    Bool(bool),
    Unit,
}

impl BaseVal {
    fn expect_nat(self) -> Result<BigUint, RtError> {
        match self {
            BaseVal::Nat(n) => Ok(n),
            _ => Err(RtError::Internal("rule: expected a natural".into())),
        }
    }

    fn expect_bool(self) -> Result<bool, RtError> {
        match self {
            BaseVal::Bool(b) => Ok(b),
            _ => Err(RtError::Internal("rule: expected a boolean".into())),
        }
    }
}

/// Arithmetic on naturals; subtraction truncates at zero.
pub fn nat_arith(op: ArithOp, a: &BigUint, b: &BigUint) -> Result<BigUint, RtError> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Monus => {
            if a >= b {
                a - b
            } else {
                BigUint::zero()
            }
        }
        ArithOp::Mul => a * b,
        ArithOp::Pow => {
            if a.is_one() {
                BigUint::one()
            } else if a.is_zero() {
                if b.is_zero() {
                    BigUint::one()
                } else {
                    BigUint::zero()
                }
            } else {
                let exp = b
                    .to_u32()
                    .ok_or_else(|| RtError::Internal("exponent too large".into()))?;
                a.pow(exp)
            }
        }
        ArithOp::Gcd => a.gcd(b),
    })
}

/// Instantiates an entry's rule on concrete arguments: one observation
/// layer per codata argument, then the template, yielding one output
/// layer over formal expressions.
pub fn rule_instantiate(
    rt: &Rc<Runtime>,
    own_op: OpId,
    rule: &SeedRule,
    args: &Container<CoVal>,
) -> Result<Container<Term<CoVal>>, RtError> {
    let (tag, fields) = container_to_arg_fields(args);
    let body = match (&rule.body, tag) {
        (RuleBody::CaseSelf(arms), Some(t)) => arms
            .get(t as usize)
            .ok_or_else(|| RtError::Internal(format!("rule: no arm for own tag {t}")))?,
        (RuleBody::CaseSelf(_), None) => {
            return Err(RtError::Internal("rule: sum arity without tag".into()))
        }
        (body, _) => body,
    };
    let mut env = RuleEnv {
        rt,
        fields,
        pats: Vec::new(),
        own_op,
    };
    env.layer(body)
}

/// The right-hand side of the one-step behaviour equation: observe each
/// argument once, instantiate the rule, evaluate the formal slots, and
/// wrap the layer in the constructor.
pub fn rule_rhs(
    rt: &Rc<Runtime>,
    own_op: OpId,
    rule: &SeedRule,
    args: &Container<CoVal>,
) -> Result<CoVal, RtError> {
    let layer = rule_instantiate(rt, own_op, rule, args)?;
    let evaluated = layer.try_map(&mut |t: &Term<CoVal>| eval(rt, t))?;
    Ok(ctor(rt, own_op.codata, evaluated))
}

// ---------------------------------------------------------------------------
// Registration and verification
// ---------------------------------------------------------------------------

/// Outcome of an empirical well-behavedness check.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub name: String,
    pub samples: usize,
    pub depth: usize,
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone)]
pub struct Counterexample {
    pub input: String,
    pub lhs: String,
    pub rhs: String,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Draws a random argument container for `desc`, with codata payloads
/// from `pool` and small base constants.
pub fn random_args(
    desc: &FunctorDesc,
    rng: &mut ChaCha8Rng,
    pool: &[CoVal],
) -> Container<CoVal> {
    match desc {
        FunctorDesc::Id => Container::Slot(pool[rng.gen_range(0..pool.len())].clone()),
        FunctorDesc::ConstNat => Container::nat(rng.gen_range(0..12)),
        FunctorDesc::ConstBool => Container::Bool(rng.gen_bool(0.5)),
        FunctorDesc::ConstUnit => Container::Unit,
        FunctorDesc::Prod(items) => {
            Container::Tuple(items.iter().map(|d| random_args(d, rng, pool)).collect())
        }
        FunctorDesc::Sum(arms) => {
            let tag = rng.gen_range(0..arms.len());
            Container::Tagged(tag as u32, Box::new(random_args(&arms[tag], rng, pool)))
        }
        FunctorDesc::ListOf(inner) => {
            let len = rng.gen_range(0..4);
            Container::List((0..len).map(|_| random_args(inner, rng, pool)).collect())
        }
        FunctorDesc::FinSetOf(inner) => {
            let len = rng.gen_range(1..4);
            Container::finset((0..len).map(|_| random_args(inner, rng, pool)).collect())
        }
    }
}

/// Checks the one-step behaviour equation on pseudo-random arguments:
/// the entry's runtime and the rule-driven reconstruction must agree on
/// depth-bounded observations. Reports the first counterexample.
pub fn verify_well_behaved(
    rt: &Rc<Runtime>,
    op: OpId,
    samples: usize,
    depth: usize,
    pool: &[CoVal],
) -> Result<VerifyReport, RtError> {
    let (name, arity, rule, runtime) = rt.with_state(op.codata, |s| {
        let e = s.entry(op.index).expect("entry exists");
        (e.name.clone(), e.arity.clone(), e.rule.clone(), e.runtime.clone())
    });
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + op.index as u64);
    for _ in 0..samples {
        let args = random_args(&arity, &mut rng, pool);
        let lhs_val = runtime(args.clone())?;
        let rhs_val = rule_rhs(rt, op, &rule, &args)?;
        let lhs_obs = take_prefix(&lhs_val, depth)?;
        let rhs_obs = take_prefix(&rhs_val, depth)?;
        if lhs_obs != rhs_obs {
            return Ok(VerifyReport {
                name,
                samples,
                depth,
                counterexample: Some(Counterexample {
                    input: render_coval_container(&args),
                    lhs: render_obs(&lhs_obs),
                    rhs: render_obs(&rhs_obs),
                }),
            });
        }
    }
    Ok(VerifyReport {
        name,
        samples,
        depth,
        counterexample: None,
    })
}

/// Appends a new entry and verifies it; on a failed check the entry is
/// removed again and the counterexample is reported.
pub fn register_entry(
    rt: &Rc<Runtime>,
    j: CodataId,
    entry: OpEntry,
    samples: usize,
    depth: usize,
    pool: &[CoVal],
) -> Result<OpId, RegError> {
    let name = entry.name.clone();
    if rt.with_state(j, |s| s.find_by_name(&name)).is_some() {
        return Err(RegError::DuplicateOp(name));
    }
    let index = rt.with_state_mut(j, |s| {
        s.entries.push(entry);
        (s.entries.len() - 1) as u32
    });
    let op = OpId::new(j, index);
    let report = verify_well_behaved(rt, op, samples, depth, pool).map_err(|e| {
        rt.with_state_mut(j, |s| {
            s.entries.pop();
        });
        RegError::Runtime {
            name: name.clone(),
            source: e,
        }
    })?;
    if let Some(ce) = report.counterexample {
        rt.with_state_mut(j, |s| {
            s.entries.pop();
        });
        return Err(RegError::WellBehavednessCheckFailed {
            name,
            input: ce.input,
            lhs: ce.lhs,
            rhs: ce.rhs,
        });
    }
    Ok(op)
}

// ---------------------------------------------------------------------------
// Rendering helpers
// ---------------------------------------------------------------------------

pub fn render_coval_container(c: &Container<CoVal>) -> String {
    render_generic(c, &mut |v: &CoVal| format!("#{}", v.id()))
}

pub fn render_obs(o: &Obs) -> String {
    match o {
        Obs::Cut => "…".to_string(),
        Obs::Layer(c) => render_generic(c, &mut |sub: &Obs| render_obs(sub)),
    }
}

fn render_generic<P>(c: &Container<P>, payload: &mut impl FnMut(&P) -> String) -> String {
    match c {
        Container::Slot(p) => payload(p),
        Container::Nat(n) => n.to_string(),
        Container::Bool(b) => b.to_string(),
        Container::Unit => "()".into(),
        Container::Tuple(items) => {
            let parts: Vec<_> = items.iter().map(|i| render_generic(i, payload)).collect();
            format!("({})", parts.join(", "))
        }
        Container::Tagged(tag, inner) => {
            format!("#{tag}{}", render_generic(inner, payload))
        }
        Container::List(items) => {
            let parts: Vec<_> = items.iter().map(|i| render_generic(i, payload)).collect();
            format!("[{}]", parts.join(", "))
        }
        Container::FinSet(items) => {
            let parts: Vec<_> = items.iter().map(|i| render_generic(i, payload)).collect();
            format!("{{{}}}", parts.join(", "))
        }
    }
}

/// Renders a rule term instantiation using operation names from the
/// state, in the canonical `η x` / `⟦op⟧(…)` form.
pub fn render_rule_term(rt: &Rc<Runtime>, t: &Term<CoVal>) -> String {
    crate::term::render_term(
        t,
        &|v: &CoVal| format!("#{}", v.id()),
        &|op| {
            rt.with_state(op.codata, |s| {
                s.entry(op.index)
                    .map(|e| e.name.clone())
                    .unwrap_or_else(|| format!("?{}", op.index))
            })
        },
    )
}
