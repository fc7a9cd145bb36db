//! The uniform minion abstraction: one value space and one act/elements
//! interface over every representation (function tables, presentations,
//! tabulations, and the derived constructors).

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::funmin::{FnElement, FunctionMinion};
use crate::minor::MinorOp;
use crate::omega::Cosieve;
use crate::presented::{Presentation, PresentedMinion, Word};

pub const DEFAULT_BUDGET: usize = 1 << 20;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// An element payload. Ordering is derived, fixing the deterministic
/// enumeration order of every representation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Value {
    Fn(FnElement),
    Word(Word),
    Sieve(Cosieve),
    Pair(Box<Value>, Box<Value>),
    Inl(Box<Value>),
    Inr(Box<Value>),
    /// Exponential elements: one target value per lifted generator.
    Assign(Vec<Value>),
}

/// An element of a specific minion at a fixed arity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Element {
    owner: u64,
    arity: usize,
    value: Value,
}

impl Element {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn value(&self) -> &Value {
        &self.value
    }
}

/// Action closure for tabulated minions.
pub type Action = Arc<dyn Fn(&Value, &MinorOp) -> Result<Value> + Send + Sync>;

/// An explicitly materialized minion: arity sets up to a cutoff plus an
/// action closure.
#[derive(Clone)]
pub struct Tabulated {
    levels: Vec<Arc<Vec<Value>>>,
    action: Action,
}

impl std::fmt::Debug for Tabulated {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tabulated")
            .field("levels", &self.levels.iter().map(|l| l.len()).collect::<Vec<_>>())
            .finish()
    }
}

/// The representation behind a minion.
#[derive(Clone, Debug)]
pub enum Rep {
    Function(FunctionMinion),
    Presented(PresentedMinion),
    Tabulated(Tabulated),
    Product(Minion, Minion),
    Sum(Minion, Minion),
    /// Restriction of the base onto one of its unary elements.
    Restrict(Minion, Value),
    /// Arity-n elements are homomorphisms from the lifted presentation of the
    /// exponent into the base.
    Exponential { base: Minion, exponent: Presentation },
}

struct Inner {
    id: u64,
    name: Option<String>,
    rep: Rep,
    cutoff: Option<usize>,
    budget: usize,
    cache: Mutex<HashMap<usize, Arc<Vec<Value>>>>,
}

/// A minion: cheaply clonable shared handle with memoized arity sets.
#[derive(Clone)]
pub struct Minion {
    inner: Arc<Inner>,
}

impl std::fmt::Debug for Minion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Minion")
            .field("id", &self.inner.id)
            .field("name", &self.inner.name)
            .field("rep", &self.inner.rep)
            .field("cutoff", &self.inner.cutoff)
            .finish()
    }
}

impl Minion {
    fn from_rep(rep: Rep, cutoff: Option<usize>) -> Self {
        Minion {
            inner: Arc::new(Inner {
                id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
                name: None,
                rep,
                cutoff,
                budget: DEFAULT_BUDGET,
                cache: Mutex::new(HashMap::new()),
            }),
        }
    }

    pub fn function(fm: FunctionMinion) -> Self {
        Minion::from_rep(Rep::Function(fm), None)
    }

    pub fn presented(pm: PresentedMinion) -> Self {
        Minion::from_rep(Rep::Presented(pm), None)
    }

    pub fn from_presentation(p: Presentation) -> Self {
        Minion::presented(PresentedMinion::new(p))
    }

    pub fn empty() -> Self {
        Minion::from_presentation(Presentation::empty())
    }

    pub fn tabulated(levels: Vec<Vec<Value>>, action: Action) -> Self {
        let cutoff = Some(levels.len());
        Minion::from_rep(
            Rep::Tabulated(Tabulated {
                levels: levels.into_iter().map(Arc::new).collect(),
                action,
            }),
            cutoff,
        )
    }

    pub fn product(a: &Minion, b: &Minion) -> Self {
        let cutoff = opt_min(a.cutoff(), b.cutoff());
        Minion::from_rep(Rep::Product(a.clone(), b.clone()), cutoff)
    }

    pub fn sum(a: &Minion, b: &Minion) -> Self {
        let cutoff = opt_min(a.cutoff(), b.cutoff());
        Minion::from_rep(Rep::Sum(a.clone(), b.clone()), cutoff)
    }

    pub fn restrict(base: &Minion, u: &Value) -> Result<Self> {
        if !base.elements(1)?.contains(u) {
            return Err(Error::ForeignElement);
        }
        Ok(Minion::from_rep(
            Rep::Restrict(base.clone(), u.clone()),
            base.cutoff(),
        ))
    }

    pub fn exponential(base: &Minion, exponent: Presentation) -> Self {
        Minion::from_rep(
            Rep::Exponential { base: base.clone(), exponent },
            None,
        )
    }

    fn rebuild(&self, f: impl FnOnce(&mut Inner)) -> Minion {
        let mut inner = Inner {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            name: self.inner.name.clone(),
            rep: self.inner.rep.clone(),
            cutoff: self.inner.cutoff,
            budget: self.inner.budget,
            cache: Mutex::new(HashMap::new()),
        };
        f(&mut inner);
        Minion { inner: Arc::new(inner) }
    }

    pub fn named(&self, name: &str) -> Minion {
        let name = name.to_string();
        self.rebuild(|i| i.name = Some(name))
    }

    pub fn with_budget(&self, budget: usize) -> Minion {
        self.rebuild(|i| i.budget = budget)
    }

    pub fn with_cutoff(&self, cutoff: Option<usize>) -> Minion {
        self.rebuild(|i| i.cutoff = cutoff)
    }

    pub fn id(&self) -> u64 {
        self.inner.id
    }

    pub fn name(&self) -> Option<&str> {
        self.inner.name.as_deref()
    }

    pub fn rep(&self) -> &Rep {
        &self.inner.rep
    }

    pub fn cutoff(&self) -> Option<usize> {
        self.inner.cutoff
    }

    pub fn budget(&self) -> usize {
        self.inner.budget
    }

    /// The deterministically ordered arity-`n` element list (memoized).
    pub fn elements(&self, n: usize) -> Result<Arc<Vec<Value>>> {
        if n == 0 {
            return Err(Error::Invalid("arities start at 1".into()));
        }
        if let Some(c) = self.inner.cutoff {
            if n > c {
                return Err(Error::Cutoff {
                    arity: n,
                    reason: format!("materialization cutoff is {c}"),
                });
            }
        }
        if let Some(v) = self.inner.cache.lock().unwrap().get(&n) {
            return Ok(v.clone());
        }
        let budget = self.inner.budget;
        let computed: Vec<Value> = match &self.inner.rep {
            Rep::Function(fm) => fm
                .elements(n, budget)?
                .into_iter()
                .map(Value::Fn)
                .collect(),
            Rep::Presented(pm) => pm
                .elements(n, budget)?
                .into_iter()
                .map(Value::Word)
                .collect(),
            Rep::Tabulated(t) => {
                let level = t.levels.get(n - 1).ok_or(Error::Cutoff {
                    arity: n,
                    reason: format!("tabulated up to {}", t.levels.len()),
                })?;
                level.as_ref().clone()
            }
            Rep::Product(a, b) => {
                let xs = a.elements(n)?;
                let ys = b.elements(n)?;
                let needed = xs.len().checked_mul(ys.len()).unwrap_or(usize::MAX);
                if needed > budget {
                    return Err(Error::Budget { arity: n, needed, budget });
                }
                let mut out = Vec::with_capacity(needed);
                for x in xs.iter() {
                    for y in ys.iter() {
                        out.push(Value::Pair(Box::new(x.clone()), Box::new(y.clone())));
                    }
                }
                out
            }
            Rep::Sum(a, b) => {
                let xs = a.elements(n)?;
                let ys = b.elements(n)?;
                let mut out = Vec::with_capacity(xs.len() + ys.len());
                out.extend(xs.iter().map(|x| Value::Inl(Box::new(x.clone()))));
                out.extend(ys.iter().map(|y| Value::Inr(Box::new(y.clone()))));
                out
            }
            Rep::Restrict(base, u) => {
                let collapse = MinorOp::collapse(n);
                let mut out = Vec::new();
                for v in base.elements(n)?.iter() {
                    if &base.act(v, &collapse)? == u {
                        out.push(v.clone());
                    }
                }
                out
            }
            Rep::Exponential { base, exponent } => {
                let lifted = exponent.lift(n);
                let mut out: Vec<Value> = crate::homsearch::presented_assignments(
                    &lifted, base, false,
                )?
                .into_iter()
                .map(Value::Assign)
                .collect();
                out.sort();
                out
            }
        };
        let arc = Arc::new(computed);
        self.inner
            .cache
            .lock()
            .unwrap()
            .entry(n)
            .or_insert_with(|| arc.clone());
        Ok(arc)
    }

    pub fn count(&self, n: usize) -> Result<usize> {
        Ok(self.elements(n)?.len())
    }

    /// The minor action on a raw value of arity `op.dom()`.
    pub fn act(&self, v: &Value, op: &MinorOp) -> Result<Value> {
        match (&self.inner.rep, v) {
            (Rep::Function(_), Value::Fn(f)) => Ok(Value::Fn(f.minor(op)?)),
            (Rep::Presented(pm), Value::Word(w)) => {
                Ok(Value::Word(pm.act(w, op, self.inner.budget)?))
            }
            (Rep::Tabulated(t), _) => (t.action)(v, op),
            (Rep::Product(a, b), Value::Pair(x, y)) => Ok(Value::Pair(
                Box::new(a.act(x, op)?),
                Box::new(b.act(y, op)?),
            )),
            (Rep::Sum(a, _), Value::Inl(x)) => Ok(Value::Inl(Box::new(a.act(x, op)?))),
            (Rep::Sum(_, b), Value::Inr(y)) => Ok(Value::Inr(Box::new(b.act(y, op)?))),
            (Rep::Restrict(base, _), _) => base.act(v, op),
            (Rep::Exponential { base, exponent }, Value::Assign(vals)) => {
                let gens = exponent.generators();
                if vals.len() != gens.len() {
                    return Err(Error::Internal("assignment length mismatch".into()));
                }
                let mut out = Vec::with_capacity(vals.len());
                for (val, (_, ar)) in vals.iter().zip(gens.iter()) {
                    let shifted = op.juxtapose(&MinorOp::identity(*ar));
                    out.push(base.act(val, &shifted)?);
                }
                Ok(Value::Assign(out))
            }
            _ => Err(Error::ForeignElement),
        }
    }

    pub fn element(&self, arity: usize, value: Value) -> Element {
        Element {
            owner: self.inner.id,
            arity,
            value,
        }
    }

    pub fn element_at(&self, arity: usize, index: usize) -> Result<Element> {
        let elems = self.elements(arity)?;
        let value = elems
            .get(index)
            .cloned()
            .ok_or_else(|| Error::Invalid(format!("no element #{index} at arity {arity}")))?;
        Ok(self.element(arity, value))
    }

    pub fn act_element(&self, e: &Element, op: &MinorOp) -> Result<Element> {
        if e.owner != self.inner.id {
            return Err(Error::ForeignElement);
        }
        if op.dom() != e.arity {
            return Err(Error::ArityMismatch(format!(
                "operation {op} does not apply at arity {}",
                e.arity
            )));
        }
        Ok(self.element(op.cod(), self.act(&e.value, op)?))
    }

    /// Materialize arities `1..=cutoff` into a tabulated minion whose action
    /// delegates to this one.
    pub fn tabulate(&self, cutoff: usize) -> Result<Minion> {
        let mut levels = Vec::with_capacity(cutoff);
        for n in 1..=cutoff {
            levels.push(self.elements(n)?.as_ref().clone());
        }
        let me = self.clone();
        Ok(Minion::tabulated(
            levels,
            Arc::new(move |v, op| me.act(v, op)),
        ))
    }
}

fn opt_min(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}
