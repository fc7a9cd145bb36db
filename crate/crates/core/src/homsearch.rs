//! Homomorphism search: exact generator-assignment search for presented and
//! generated sources, bounded arity-family search for everything else, plus
//! equivalence, endomorphism monoids, cores, pp-satisfaction, order
//! comparison, and gap/duality evidence.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::minion::{Minion, Rep, Value};
use crate::minor::{transformation_monoid_generators, MinorOp};
use crate::presented::Presentation;

/// A homomorphism certificate.
#[derive(Clone, Debug)]
pub enum HomWitness {
    /// One target value per source generator (exact).
    Assignment(Vec<Value>),
    /// Index maps `maps[n-1][i]` into the target's arity-n element list, for
    /// n up to `bound` (truncation-relative certificate).
    Family { bound: usize, maps: Vec<Vec<usize>> },
}

/// Outcome of a hom query.
#[derive(Clone, Debug)]
pub enum Verdict {
    Yes(HomWitness),
    No { certificate: String },
    Unknown { bound: usize, context: String },
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Yes(_) => "yes",
            Verdict::No { .. } => "no",
            Verdict::Unknown { .. } => "unknown",
        }
    }
}

/// A finite generating family of a minion: every element is `gens[i] . alpha`.
#[derive(Clone, Debug)]
pub struct GenSet {
    pub minion: Minion,
    pub arities: Vec<usize>,
    pub gens: Vec<Value>,
}

/// Extracts a finite generating family when the representation supports one:
/// seeds for generated function minions, generator words for presented
/// minions, juxtaposed pairs for products, injections for sums, and the
/// matching-collapse subfamily for restrictions.
pub fn generating_family(m: &Minion) -> Result<Option<GenSet>> {
    let gs = match m.rep() {
        Rep::Function(fm) => fm.seeds().map(|seeds| GenSet {
            minion: m.clone(),
            arities: seeds.iter().map(|s| s.arity()).collect(),
            gens: seeds.iter().cloned().map(Value::Fn).collect(),
        }),
        Rep::Presented(pm) => {
            let mut arities = Vec::new();
            let mut gens = Vec::new();
            for (sym, &(_, ar)) in pm.presentation().generators().iter().enumerate() {
                let w = crate::presented::Word { sym, op: MinorOp::identity(ar) };
                arities.push(ar);
                gens.push(Value::Word(pm.canonical(&w, m.budget())?));
            }
            Some(GenSet { minion: m.clone(), arities, gens })
        }
        Rep::Product(a, b) => {
            let (ga, gb) = (generating_family(a)?, generating_family(b)?);
            match (ga, gb) {
                (Some(ga), Some(gb)) => {
                    let mut arities = Vec::new();
                    let mut gens = Vec::new();
                    for (s, &p) in ga.gens.iter().zip(ga.arities.iter()) {
                        for (t, &q) in gb.gens.iter().zip(gb.arities.iter()) {
                            let i1 = MinorOp::new((0..p).collect(), p + q)?;
                            let i2 = MinorOp::new((p..p + q).collect(), p + q)?;
                            arities.push(p + q);
                            gens.push(Value::Pair(
                                Box::new(a.act(s, &i1)?),
                                Box::new(b.act(t, &i2)?),
                            ));
                        }
                    }
                    Some(GenSet { minion: m.clone(), arities, gens })
                }
                _ => None,
            }
        }
        Rep::Sum(a, b) => {
            let (ga, gb) = (generating_family(a)?, generating_family(b)?);
            match (ga, gb) {
                (Some(ga), Some(gb)) => {
                    let mut arities = ga.arities.clone();
                    let mut gens: Vec<Value> =
                        ga.gens.iter().cloned().map(|v| Value::Inl(Box::new(v))).collect();
                    arities.extend(gb.arities.iter());
                    gens.extend(gb.gens.iter().cloned().map(|v| Value::Inr(Box::new(v))));
                    Some(GenSet { minion: m.clone(), arities, gens })
                }
                _ => None,
            }
        }
        Rep::Restrict(base, u) => match generating_family(base)? {
            Some(gb) => {
                let mut arities = Vec::new();
                let mut gens = Vec::new();
                for (g, &a) in gb.gens.iter().zip(gb.arities.iter()) {
                    if &base.act(g, &MinorOp::collapse(a))? == u {
                        arities.push(a);
                        gens.push(g.clone());
                    }
                }
                Some(GenSet { minion: m.clone(), arities, gens })
            }
            None => None,
        },
        Rep::Tabulated(_) | Rep::Exponential { .. } => None,
    };
    Ok(gs)
}

impl GenSet {
    /// Express an element as `gens[i] . alpha` (first match in canonical
    /// order).
    pub fn express(&self, v: &Value, arity: usize) -> Result<(usize, MinorOp)> {
        for (i, (g, &a)) in self.gens.iter().zip(self.arities.iter()).enumerate() {
            for alpha in MinorOp::all(a, arity) {
                if &self.minion.act(g, &alpha)? == v {
                    return Ok((i, alpha));
                }
            }
        }
        Err(Error::Internal("element not reachable from generating family".into()))
    }
}

/// All restricted growth strings of the given length (first entry 0, each
/// entry at most one above the running maximum): canonical forms of the
/// surjections out of `len` up to postcomposition by a bijection.
pub fn restricted_growth_strings(len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(cur: &mut Vec<usize>, maxv: Option<usize>, len: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let top = maxv.map_or(0, |m| m + 1);
        for v in 0..=top {
            cur.push(v);
            rec(cur, Some(maxv.map_or(v, |m| m.max(v))), len, out);
            cur.pop();
        }
    }
    rec(&mut cur, None, len, &mut out);
    out
}

/// A binding constraint between two generators: images must satisfy
/// `A_i . alpha = A_j . beta`.
pub type Constraint = (usize, MinorOp, usize, MinorOp);

/// Does `(ap, bp)` imply `(a, b)` by postcomposition: is there `gamma` with
/// `a = ap;gamma` and `b = bp;gamma`? Since `(ap, bp)` is jointly surjective,
/// `gamma` is determined coordinatewise.
fn implied_by(ap: &MinorOp, bp: &MinorOp, a: &MinorOp, b: &MinorOp) -> bool {
    if ap.dom() != a.dom() || bp.dom() != b.dom() || a.cod() != b.cod() {
        return false;
    }
    let mut gamma: Vec<Option<usize>> = vec![None; ap.cod()];
    let pairs = ap
        .values()
        .iter()
        .zip(a.values().iter())
        .chain(bp.values().iter().zip(b.values().iter()));
    for (&x, &y) in pairs {
        match gamma[x] {
            None => gamma[x] = Some(y),
            Some(z) if z == y => {}
            Some(_) => return false,
        }
    }
    true
}

/// The defining identities of a generated source: all jointly surjective
/// pairs `(alpha, beta)` with `g_i alpha = g_j beta`, in restricted-growth
/// canonical form, with consequences of retained constraints pruned. An
/// assignment respecting these extends to a well-defined homomorphism (larger
/// codomains factor through an injection, which is cancellable).
pub fn genset_constraints(gs: &GenSet) -> Result<Vec<Constraint>> {
    let mut raw: Vec<Constraint> = Vec::new();
    let k = gs.gens.len();
    for i in 0..k {
        for j in i..k {
            let (a, b) = (gs.arities[i], gs.arities[j]);
            for q in restricted_growth_strings(a + b) {
                let c = q.iter().copied().max().unwrap_or(0) + 1;
                let alpha = MinorOp::new(q[..a].to_vec(), c)?;
                let beta = MinorOp::new(q[a..].to_vec(), c)?;
                if i == j && alpha == beta {
                    continue;
                }
                if gs.minion.act(&gs.gens[i], &alpha)? == gs.minion.act(&gs.gens[j], &beta)? {
                    raw.push((i, alpha, j, beta));
                }
            }
        }
    }
    // drop constraints that follow from another retained one
    let mut kept: Vec<Constraint> = Vec::new();
    for c in &raw {
        let implied = raw.iter().any(|d| {
            !(d.0 == c.0 && d.1 == c.1 && d.2 == c.2 && d.3 == c.3)
                && d.0 == c.0
                && d.2 == c.2
                && d.1.cod() < c.1.cod()
                && implied_by(&d.1, &d.3, &c.1, &c.3)
        });
        if !implied {
            kept.push(c.clone());
        }
    }
    Ok(kept)
}

/// Backtracking search for constraint-satisfying generator assignments into
/// `tgt`. Slots are searched in descending-arity order; candidates in
/// canonical element order; returned assignments are in declaration order.
pub fn assignment_search(
    tgt: &Minion,
    arities: &[usize],
    constraints: &[Constraint],
    enumerate: bool,
) -> Result<Vec<Vec<Value>>> {
    let k = arities.len();
    if k == 0 {
        return Ok(vec![Vec::new()]);
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(arities[i]));
    let mut pos = vec![0usize; k];
    for (p, &i) in order.iter().enumerate() {
        pos[i] = p;
    }
    let mut by_level: Vec<Vec<&Constraint>> = vec![Vec::new(); k];
    for c in constraints {
        by_level[pos[c.0].max(pos[c.2])].push(c);
    }
    let cands: Vec<Arc<Vec<Value>>> = order
        .iter()
        .map(|&i| tgt.elements(arities[i]))
        .collect::<Result<_>>()?;

    let mut out: Vec<Vec<Value>> = Vec::new();
    let mut images: Vec<Option<Value>> = vec![None; k];

    fn dfs(
        tgt: &Minion,
        order: &[usize],
        by_level: &[Vec<&Constraint>],
        cands: &[Arc<Vec<Value>>],
        images: &mut Vec<Option<Value>>,
        depth: usize,
        enumerate: bool,
        out: &mut Vec<Vec<Value>>,
    ) -> Result<bool> {
        if depth == order.len() {
            out.push(images.iter().map(|v| v.clone().unwrap()).collect());
            return Ok(!enumerate);
        }
        let slot = order[depth];
        'cand: for v in cands[depth].iter() {
            images[slot] = Some(v.clone());
            for c in &by_level[depth] {
                let (i, alpha, j, beta) = (c.0, &c.1, c.2, &c.3);
                let (vi, vj) = (images[i].as_ref().unwrap(), images[j].as_ref().unwrap());
                if tgt.act(vi, alpha)? != tgt.act(vj, beta)? {
                    continue 'cand;
                }
            }
            if dfs(tgt, order, by_level, cands, images, depth + 1, enumerate, out)? {
                return Ok(true);
            }
        }
        images[slot] = None;
        Ok(false)
    }

    dfs(tgt, &order, &by_level, &cands, &mut images, 0, enumerate, &mut out)?;
    Ok(out)
}

/// Homomorphisms out of a presented source, as generator assignments
/// validated against the (normalized) relations. Exact.
pub fn presented_assignments(
    pres: &Presentation,
    tgt: &Minion,
    first_only: bool,
) -> Result<Vec<Vec<Value>>> {
    let arities: Vec<usize> = pres.generators().iter().map(|&(_, a)| a).collect();
    let constraints: Vec<Constraint> = pres
        .relations()
        .iter()
        .map(|(u, v)| (u.sym, u.op.clone(), v.sym, v.op.clone()))
        .collect();
    assignment_search(tgt, &arities, &constraints, !first_only)
}

/// Exact hom search from a generated source.
pub fn hom_exact_from_generated(gs: &GenSet, tgt: &Minion, enumerate: bool) -> Result<Vec<HomWitness>> {
    let constraints = genset_constraints(gs)?;
    let assignments = assignment_search(tgt, &gs.arities, &constraints, enumerate)?;
    Ok(assignments.into_iter().map(HomWitness::Assignment).collect())
}

/// Apply an assignment witness to an arbitrary source element by expressing
/// it through the generating family.
pub fn apply_assignment(
    gs: &GenSet,
    images: &[Value],
    tgt: &Minion,
    v: &Value,
    arity: usize,
) -> Result<Value> {
    let (i, alpha) = gs.express(v, arity)?;
    tgt.act(&images[i], &alpha)
}

/// Replay an assignment witness against the generated-source constraints.
pub fn verify_assignment(gs: &GenSet, images: &[Value], tgt: &Minion) -> Result<bool> {
    for (i, alpha, j, beta) in genset_constraints(gs)? {
        if tgt.act(&images[i], &alpha)? != tgt.act(&images[j], &beta)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All 𝒯_b-equivariant maps `src_b -> tgt_b` (as index maps), found by
/// backtracking with orbit propagation. Returns `Err(Unknown)` if the node
/// budget is exhausted.
fn equivariant_maps(
    src: &Minion,
    tgt: &Minion,
    b: usize,
    enumerate: bool,
    node_budget: usize,
) -> Result<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    equivariant_search(src, tgt, b, node_budget, &mut |sol| {
        out.push(sol.to_vec());
        Ok(!enumerate)
    })?;
    Ok(out)
}

/// Visitor-driven equivariant map search: `visit` is called with each
/// solution as it is found and may return `Ok(true)` to stop early. The
/// return value says whether the search was stopped by the visitor.
fn equivariant_search(
    src: &Minion,
    tgt: &Minion,
    b: usize,
    node_budget: usize,
    visit: &mut dyn FnMut(&[usize]) -> Result<bool>,
) -> Result<bool> {
    let ms = src.elements(b)?;
    let ns = tgt.elements(b)?;
    if ms.is_empty() {
        return visit(&[]);
    }
    if ns.is_empty() {
        return Ok(false);
    }
    let gens: Vec<MinorOp> = if b >= 2 {
        transformation_monoid_generators(b)
    } else {
        Vec::new()
    };
    let index_of = |list: &Arc<Vec<Value>>, v: &Value| -> Result<usize> {
        list.binary_search(v)
            .map_err(|_| Error::Internal("minor action left the arity set".into()))
    };
    let mut src_act: Vec<Vec<usize>> = Vec::with_capacity(gens.len());
    let mut tgt_act: Vec<Vec<usize>> = Vec::with_capacity(gens.len());
    for g in &gens {
        let mut sa = Vec::with_capacity(ms.len());
        for m in ms.iter() {
            sa.push(index_of(&ms, &src.act(m, g)?)?);
        }
        src_act.push(sa);
        let mut ta = Vec::with_capacity(ns.len());
        for n in ns.iter() {
            ta.push(index_of(&ns, &tgt.act(n, g)?)?);
        }
        tgt_act.push(ta);
    }

    let mut h: Vec<Option<usize>> = vec![None; ms.len()];
    let mut nodes = 0usize;

    // assign h[i] = v and propagate equivariance; record touched slots for undo
    fn propagate(
        h: &mut [Option<usize>],
        src_act: &[Vec<usize>],
        tgt_act: &[Vec<usize>],
        i: usize,
        v: usize,
        touched: &mut Vec<usize>,
    ) -> bool {
        let mut queue = VecDeque::new();
        match h[i] {
            Some(w) => return w == v,
            None => {
                h[i] = Some(v);
                touched.push(i);
                queue.push_back(i);
            }
        }
        while let Some(x) = queue.pop_front() {
            let hx = h[x].unwrap();
            for (sa, ta) in src_act.iter().zip(tgt_act.iter()) {
                let x2 = sa[x];
                let v2 = ta[hx];
                match h[x2] {
                    Some(w) if w != v2 => return false,
                    Some(_) => {}
                    None => {
                        h[x2] = Some(v2);
                        touched.push(x2);
                        queue.push_back(x2);
                    }
                }
            }
        }
        true
    }

    fn dfs(
        h: &mut Vec<Option<usize>>,
        src_act: &[Vec<usize>],
        tgt_act: &[Vec<usize>],
        n_tgt: usize,
        visit: &mut dyn FnMut(&[usize]) -> Result<bool>,
        nodes: &mut usize,
        node_budget: usize,
    ) -> Result<bool> {
        let Some(i) = h.iter().position(|x| x.is_none()) else {
            let sol: Vec<usize> = h.iter().map(|x| x.unwrap()).collect();
            return visit(&sol);
        };
        for v in 0..n_tgt {
            *nodes += 1;
            if *nodes > node_budget {
                return Err(Error::Unknown {
                    bound: node_budget,
                    context: "equivariant search node budget exhausted".into(),
                });
            }
            let mut touched = Vec::new();
            let ok = propagate(h, src_act, tgt_act, i, v, &mut touched);
            if ok && dfs(h, src_act, tgt_act, n_tgt, visit, nodes, node_budget)? {
                return Ok(true);
            }
            for t in touched {
                h[t] = None;
            }
        }
        Ok(false)
    }

    dfs(
        &mut h,
        &src_act,
        &tgt_act,
        ns.len(),
        visit,
        &mut nodes,
        node_budget,
    )
}

/// Extend a top-arity map downward (`h_n(m) = h_b(m iota) rho`) and verify
/// naturality of the whole family; `None` if a square fails.
fn family_from_top(
    src: &Minion,
    tgt: &Minion,
    b: usize,
    hb: &[usize],
) -> Result<Option<Vec<Vec<usize>>>> {
    let ms_b = src.elements(b)?;
    let ns_b = tgt.elements(b)?;
    let mut maps: Vec<Vec<usize>> = Vec::with_capacity(b);
    for n in 1..=b {
        let ms = src.elements(n)?;
        let ns = tgt.elements(n)?;
        let iota = MinorOp::new((0..n).collect(), b)?;
        let rho = MinorOp::retraction(b, n);
        let mut level = Vec::with_capacity(ms.len());
        for m in ms.iter() {
            let up = src.act(m, &iota)?;
            let i = ms_b
                .binary_search(&up)
                .map_err(|_| Error::Internal("iota image missing at top arity".into()))?;
            let img = tgt.act(&ns_b[hb[i]], &rho)?;
            let j = ns
                .binary_search(&img)
                .map_err(|_| Error::Internal("rho image missing in target".into()))?;
            level.push(j);
        }
        maps.push(level);
    }
    // verify all naturality squares between covered arities
    for n in 1..=b {
        let ms = src.elements(n)?;
        for k in 1..=b {
            let ns_k = tgt.elements(k)?;
            for alpha in MinorOp::all(n, k) {
                for (i, m) in ms.iter().enumerate() {
                    let lhs_val = src.act(m, &alpha)?;
                    let lhs_idx = src
                        .elements(k)?
                        .binary_search(&lhs_val)
                        .map_err(|_| Error::Internal("action left arity set".into()))?;
                    let lhs = &ns_k[maps[k - 1][lhs_idx]];
                    let hn = &tgt.elements(n)?[maps[n - 1][i]];
                    let rhs = tgt.act(hn, &alpha)?;
                    if *lhs != rhs {
                        return Ok(None);
                    }
                }
            }
        }
    }
    Ok(Some(maps))
}

/// Bounded hom search: look for a 𝒯_b-set homomorphism at the top arity,
/// extend downward, and verify. "no" (no equivariant top map at all) is an
/// exact obstruction; a verification failure alone yields "unknown".
pub fn hom_bounded(src: &Minion, tgt: &Minion, b: usize) -> Result<Verdict> {
    let node_budget = src.budget().max(tgt.budget());
    if src.elements(b)?.is_empty() {
        // empty source: the empty family is a homomorphism
        return Ok(Verdict::Yes(HomWitness::Family {
            bound: b,
            maps: (1..=b).map(|_| Vec::new()).collect(),
        }));
    }
    // stream the equivariant top maps, verifying each as it is found
    let mut tops = 0usize;
    let mut found: Option<Vec<Vec<usize>>> = None;
    match equivariant_search(src, tgt, b, node_budget, &mut |hb| {
        tops += 1;
        if let Some(maps) = family_from_top(src, tgt, b, hb)? {
            found = Some(maps);
            return Ok(true);
        }
        Ok(false)
    }) {
        Ok(_) => {}
        Err(Error::Unknown { bound, context }) => {
            return Ok(Verdict::Unknown { bound, context })
        }
        Err(e) => return Err(e),
    }
    if let Some(maps) = found {
        return Ok(Verdict::Yes(HomWitness::Family { bound: b, maps }));
    }
    if tops == 0 {
        return Ok(Verdict::No {
            certificate: format!("no 𝒯_{b}-set homomorphism between the arity-{b} truncations"),
        });
    }
    Ok(Verdict::Unknown {
        bound: b,
        context: format!("{tops} equivariant top maps exist but none verifies as a natural family"),
    })
}

/// Hom dispatch: exact generator search whenever the source has a finite
/// generating family, bounded family search otherwise.
pub fn hom(src: &Minion, tgt: &Minion, bound: usize) -> Result<Verdict> {
    if let Some(gs) = generating_family(src)? {
        if genset_constraints_feasible(&gs) {
            match hom_exact_from_generated(&gs, tgt, false) {
                Ok(ws) => {
                    return Ok(match ws.into_iter().next() {
                        Some(w) => Verdict::Yes(w),
                        None => Verdict::No {
                            certificate:
                                "no generator assignment satisfies the defining identities".into(),
                        },
                    })
                }
                // the exact search can outgrow the element budget (it has to
                // enumerate the target at the generator arities); the bounded
                // oracle still gives a sound truncation-level answer
                Err(Error::Budget { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    hom_bounded(src, tgt, bound)
}

/// Whether extracting the defining constraints of a generating family is
/// tractable: the extraction walks all set partitions of `a + b` slots per
/// generator pair, so the total Bell-number work must stay small. Derived
/// sources (e.g. products, whose generators have summed arities) can exceed
/// this and are better served by the bounded oracle.
fn genset_constraints_feasible(gs: &GenSet) -> bool {
    const MAX_PARTITIONS: u128 = 2_000_000;
    let mut total: u128 = 0;
    for (i, &a) in gs.arities.iter().enumerate() {
        for &b in &gs.arities[i..] {
            total = total.saturating_add(bell(a + b));
            if total > MAX_PARTITIONS {
                return false;
            }
        }
    }
    true
}

/// Bell number by the triangle recurrence, saturating.
fn bell(n: usize) -> u128 {
    let mut row: Vec<u128> = vec![1];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            let s = next.last().unwrap().saturating_add(x);
            next.push(s);
        }
        row = next;
    }
    row[0]
}

/// Enumerate all homomorphisms (exact sources only).
pub fn hom_enumerate(src: &Minion, tgt: &Minion) -> Result<Vec<HomWitness>> {
    match generating_family(src)? {
        Some(gs) => hom_exact_from_generated(&gs, tgt, true),
        None => Err(Error::Unsupported(
            "hom enumeration needs a finitely generated source".into(),
        )),
    }
}

pub fn hom_count(src: &Minion, tgt: &Minion) -> Result<usize> {
    Ok(hom_enumerate(src, tgt)?.len())
}

/// Both directed verdicts.
pub fn hom_equivalent(a: &Minion, b: &Minion, bound: usize) -> Result<(Verdict, Verdict)> {
    Ok((hom(a, b, bound)?, hom(b, a, bound)?))
}

/// pp-sentence satisfaction: a hom from the gadget minion.
pub fn satisfies_pp(m: &Minion, sentence: &str) -> Result<Verdict> {
    let pres = crate::presented::pp_parse(sentence)?;
    let found = presented_assignments(&pres, m, true)?;
    Ok(match found.into_iter().next() {
        Some(images) => Verdict::Yes(HomWitness::Assignment(images)),
        None => Verdict::No {
            certificate: "no witness assignment satisfies the conjuncts".into(),
        },
    })
}

/// An endomorphism truncation: per arity `n <= bound`, the index map on the
/// arity-n element list.
pub type EndoMap = Vec<Vec<usize>>;

/// The (truncation of the) endomorphism monoid.
#[derive(Clone, Debug)]
pub struct Monoid {
    pub bound: usize,
    /// true when the element list is only certified relative to the bound
    pub flagged: bool,
    pub elems: Vec<EndoMap>,
    /// `table[i][j]` = index of "apply i, then j"
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
}

fn endo_compose(first: &EndoMap, second: &EndoMap) -> EndoMap {
    first
        .iter()
        .zip(second.iter())
        .map(|(f, s)| f.iter().map(|&i| s[i]).collect())
        .collect()
}

fn endo_identity(sizes: &[usize]) -> EndoMap {
    sizes.iter().map(|&s| (0..s).collect()).collect()
}

fn monoid_from_maps(bound: usize, flagged: bool, mut elems: Vec<EndoMap>, sizes: &[usize]) -> Result<Monoid> {
    elems.sort();
    elems.dedup();
    let id = endo_identity(sizes);
    let identity = elems
        .binary_search(&id)
        .map_err(|_| Error::Internal("identity endomorphism missing".into()))?;
    let mut table = vec![vec![0usize; elems.len()]; elems.len()];
    for (i, e1) in elems.iter().enumerate() {
        for (j, e2) in elems.iter().enumerate() {
            let c = endo_compose(e1, e2);
            table[i][j] = elems
                .binary_search(&c)
                .map_err(|_| Error::Internal("endomorphism set not closed under composition".into()))?;
        }
    }
    Ok(Monoid { bound, flagged, elems, table, identity })
}

/// Endomorphism monoid truncated at `bound`:
/// - finitely generated sources: exact hom enumeration `M -> M`;
/// - function-minion representations (elements are tables over `(a, b)`):
///   enumerate maps `phi: M_a -> b`, keep those whose induced hom lands in
///   `M` at arities `<= bound` (flagged as truncation-relative);
/// - anything else: bounded family enumeration (flagged).
pub fn endomorphisms(m: &Minion, bound: usize) -> Result<Monoid> {
    let mut sizes = Vec::with_capacity(bound);
    for n in 1..=bound {
        sizes.push(m.count(n)?);
    }
    if let Some(gs) = generating_family(m)? {
        let witnesses = hom_exact_from_generated(&gs, m, true)?;
        let mut elems = Vec::with_capacity(witnesses.len());
        for w in &witnesses {
            let HomWitness::Assignment(images) = w else { unreachable!() };
            let mut maps = Vec::with_capacity(bound);
            for n in 1..=bound {
                let level = m.elements(n)?;
                let mut lv = Vec::with_capacity(level.len());
                for v in level.iter() {
                    let img = apply_assignment(&gs, images, m, v, n)?;
                    lv.push(
                        level
                            .binary_search(&img)
                            .map_err(|_| Error::Internal("endomorphism image escaped".into()))?,
                    );
                }
                maps.push(lv);
            }
            elems.push(maps);
        }
        return monoid_from_maps(bound, false, elems, &sizes);
    }
    if let Some((a, b)) = function_carriers(m) {
        return endomorphisms_via_phi(m, a, b, bound, &sizes);
    }
    // bounded family mode
    let tops = equivariant_maps(m, m, bound, true, m.budget())?;
    let mut elems = Vec::new();
    for hb in &tops {
        if let Some(maps) = family_from_top(m, m, bound, hb)? {
            elems.push(maps);
        }
    }
    monoid_from_maps(bound, true, elems, &sizes)
}

/// If every element of `m` is a function table over a fixed `(a, b)`, return
/// the carriers (true for function reps and their restrictions).
fn function_carriers(m: &Minion) -> Option<(usize, usize)> {
    match m.rep() {
        Rep::Function(fm) => Some((fm.a(), fm.b())),
        Rep::Restrict(base, _) => function_carriers(base),
        _ => None,
    }
}

/// Endomorphisms of a concrete minion over `(a, b)` via maps
/// `phi: M_a -> b`: the induced map sends `f` (arity m) to the table
/// `x |-> phi(f . x)` with `x` read as a minor operation `m -> a`.
fn endomorphisms_via_phi(
    m: &Minion,
    a: usize,
    b: usize,
    bound: usize,
    sizes: &[usize],
) -> Result<Monoid> {
    use crate::funmin::FnElement;
    let base = m.elements(a)?;
    let count = b
        .checked_pow(base.len() as u32)
        .ok_or_else(|| Error::Budget { arity: a, needed: usize::MAX, budget: m.budget() })?;
    if count > m.budget() {
        return Err(Error::Budget { arity: a, needed: count, budget: m.budget() });
    }
    let mut elems = Vec::new();
    'phi: for code in 0..count {
        let mut phi = Vec::with_capacity(base.len());
        let mut rest = code;
        for _ in 0..base.len() {
            phi.push(rest % b);
            rest /= b;
        }
        // induced hom truncation; bail out as soon as it leaves the minion
        let mut maps: EndoMap = Vec::with_capacity(bound);
        for n in 1..=bound {
            let level = m.elements(n)?;
            let mut lv = Vec::with_capacity(level.len());
            for v in level.iter() {
                let Value::Fn(f) = v else {
                    return Err(Error::Internal("non-table element in concrete minion".into()));
                };
                let table = FnElement::from_fn(n, a, b, |x| {
                    let alpha = MinorOp::new(x.to_vec(), a).expect("tuple entries below a");
                    let fx = f.minor(&alpha).expect("minor is total");
                    let idx = base
                        .binary_search(&Value::Fn(fx))
                        .expect("minor stays in the minion");
                    phi[idx]
                })?;
                match level.binary_search(&Value::Fn(table)) {
                    Ok(i) => lv.push(i),
                    Err(_) => continue 'phi,
                }
            }
            maps.push(lv);
        }
        elems.push(maps);
    }
    monoid_from_maps(bound, true, elems, sizes)
}

/// A computed core: the fixed-point subminion of a minimal idempotent
/// endomorphism, with the retraction and the defining endomorphism.
#[derive(Clone, Debug)]
pub struct CoreResult {
    pub core: Minion,
    pub bound: usize,
    pub retraction: EndoMap,
    pub flagged: bool,
}

/// Core computation: pick the endomorphism with inclusion-minimal image
/// (total element count at arities <= bound, ties broken canonically), pass
/// to its idempotent power, cut out the fixed points, and verify every
/// endomorphism of the result is an automorphism.
pub fn core(m: &Minion, bound: usize) -> Result<CoreResult> {
    let mon = endomorphisms(m, bound)?;
    let image_size = |e: &EndoMap| -> usize {
        e.iter()
            .map(|lv| lv.iter().copied().collect::<BTreeSet<_>>().len())
            .sum()
    };
    let best = mon
        .elems
        .iter()
        .min_by(|x, y| image_size(x).cmp(&image_size(y)).then_with(|| x.cmp(y)))
        .ok_or_else(|| Error::Internal("empty endomorphism monoid".into()))?;
    // idempotent power of the chosen endomorphism: iterate until the cyclic
    // semigroup of powers repeats, then take its unique idempotent
    let mut powers = vec![best.clone()];
    loop {
        let next = endo_compose(powers.last().unwrap(), best);
        if powers.contains(&next) {
            break;
        }
        powers.push(next);
    }
    let e = powers
        .into_iter()
        .find(|p| endo_compose(p, p) == *p)
        .ok_or_else(|| Error::Internal("cyclic semigroup without idempotent".into()))?;
    // fixed points per arity
    let mut levels: Vec<Vec<Value>> = Vec::with_capacity(bound);
    let mut retraction: EndoMap = Vec::with_capacity(bound);
    for n in 1..=bound {
        let elems = m.elements(n)?;
        let fixed: Vec<usize> = (0..elems.len()).filter(|&i| e[n - 1][i] == i).collect();
        let level: Vec<Value> = fixed.iter().map(|&i| elems[i].clone()).collect();
        let retr = (0..elems.len())
            .map(|i| {
                fixed
                    .binary_search(&e[n - 1][i])
                    .expect("idempotent image is fixed")
            })
            .collect();
        levels.push(level);
        retraction.push(retr);
    }
    let delegate = m.clone();
    let core = Minion::tabulated(levels, Arc::new(move |v, op| delegate.act(v, op)));
    // every endomorphism of the core must be invertible at every arity
    let cmon = endomorphisms(&core, bound)?;
    for endo in &cmon.elems {
        for lv in endo {
            let distinct: BTreeSet<usize> = lv.iter().copied().collect();
            if distinct.len() != lv.len() {
                return Err(Error::Internal(
                    "computed core admits a non-invertible endomorphism".into(),
                ));
            }
        }
    }
    Ok(CoreResult { core, bound, retraction, flagged: mon.flagged })
}

/// Pairwise comparison report over a list of named minions.
#[derive(Clone, Debug)]
pub struct OrderReport {
    pub names: Vec<String>,
    /// matrix[i][j] in {"yes","no","unknown"} for hom i -> j
    pub matrix: Vec<Vec<&'static str>>,
    pub dot: String,
}

/// Pairwise hom verdicts and a DOT digraph of the quotient order (mutually
/// equivalent entries merged into one node).
pub fn order_compare(entries: &[(String, Minion)], bound: usize) -> Result<OrderReport> {
    let k = entries.len();
    let mut matrix = vec![vec!["unknown"; k]; k];
    for i in 0..k {
        for j in 0..k {
            matrix[i][j] = if i == j {
                "yes"
            } else {
                hom(&entries[i].1, &entries[j].1, bound)?.label()
            };
        }
    }
    // merge mutual-yes classes
    let mut class = (0..k).collect::<Vec<usize>>();
    for i in 0..k {
        for j in 0..i {
            if matrix[i][j] == "yes" && matrix[j][i] == "yes" {
                let c = class[j];
                class[i] = c;
                break;
            }
        }
    }
    let mut reps: Vec<usize> = class.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    reps.sort_unstable();
    let label = |c: usize| -> String {
        entries
            .iter()
            .enumerate()
            .filter(|(i, _)| class[*i] == c)
            .map(|(_, (n, _))| n.clone())
            .collect::<Vec<_>>()
            .join(", ")
    };
    let le = |a: usize, b: usize| matrix[a][b] == "yes";
    let mut dot = String::from("digraph homorder {\n  rankdir=BT;\n");
    for &c in &reps {
        dot.push_str(&format!("  n{} [label=\"{}\"];\n", c, label(c)));
    }
    // covering edges only (transitive reduction on the class order)
    for &a in &reps {
        for &b in &reps {
            if a != b && le(a, b) && !le(b, a) {
                let covered = reps.iter().any(|&c| {
                    c != a && c != b && le(a, c) && !le(c, a) && le(c, b) && !le(b, c)
                });
                if !covered {
                    dot.push_str(&format!("  n{a} -> n{b};\n"));
                }
            }
        }
    }
    dot.push_str("}\n");
    Ok(OrderReport {
        names: entries.iter().map(|(n, _)| n.clone()).collect(),
        matrix,
        dot,
    })
}

/// Evidence report for a conjectured gap `a < c`.
#[derive(Clone, Debug)]
pub struct GapReport {
    /// per catalog member: (name, d1 -> b verdict, b -> d2 verdict, covered)
    pub rows: Vec<(String, &'static str, &'static str, bool)>,
    pub all_pass: bool,
}

/// Tests the duality pair `(c \ a, a^c)` against a catalog: every member must
/// admit `c\a -> b` or `b -> a^c`. Passing is evidence relative to the
/// catalog, not a proof.
pub fn gap_evidence(
    a: &Minion,
    c: &Minion,
    a_pres: &Presentation,
    c_pres: &Presentation,
    catalog: &[(String, Minion)],
    bound: usize,
) -> Result<GapReport> {
    let _ = c_pres;
    let down = hom(a, c, bound)?;
    if !down.is_yes() {
        return Err(Error::Invalid("gap evidence needs a <= c".into()));
    }
    let d1 = crate::construct::subtract(c, a, bound)?;
    let d2 = Minion::exponential(c, a_pres.clone());
    let mut rows = Vec::new();
    let mut all_pass = true;
    for (name, b) in catalog {
        let v1 = hom(&d1, b, bound)?;
        let v2 = hom(b, &d2, bound)?;
        let covered = v1.is_yes() || v2.is_yes();
        if !covered {
            all_pass = false;
        }
        rows.push((name.clone(), v1.label(), v2.label(), covered));
    }
    Ok(GapReport { rows, all_pass })
}

/// Given a homomorphism `h: M x N -> P` (P the projection minion, presented
/// as a single unary generator) with both factors connected, produce the
/// factor-side homomorphism the dichotomy argument extracts.
/// Returns (side, family) with side 0 = hom M -> P, side 1 = hom N -> P.
pub fn extract_factor_hom(
    prod: &Minion,
    p: &Minion,
    h: &dyn Fn(&Value, usize) -> Result<Value>,
    bound: usize,
) -> Result<(usize, Vec<Vec<usize>>)> {
    let (m, n) = match prod.rep() {
        Rep::Product(m, n) => (m.clone(), n.clone()),
        _ => return Err(Error::Invalid("extract_factor_hom needs a product source".into())),
    };
    let us = m.elements(1)?;
    let vs = n.elements(1)?;
    if us.len() != 1 || vs.len() != 1 {
        return Err(Error::Invalid(
            "factors must be connected (single unary); apply unary_decompose first".into(),
        ));
    }
    let (u, v) = (us[0].clone(), vs[0].clone());
    let uv = Value::Pair(Box::new(m.act(&u, &MinorOp::new(vec![0], 2)?)?),
                         Box::new(n.act(&v, &MinorOp::new(vec![1], 2)?)?));
    let d = h(&uv, 2)?;
    let p2 = p.elements(2)?;
    let side = p2
        .binary_search(&d)
        .map_err(|_| Error::Invalid("h(u x v) is not a binary projection".into()))?;
    // side 0: h(u x v) = first projection -> f |-> h(f x v) is a hom M -> P
    let mut maps = Vec::with_capacity(bound);
    for k in 1..=bound {
        let level = if side == 0 { m.elements(k)? } else { n.elements(k)? };
        let pk = p.elements(k)?;
        let mut lv = Vec::with_capacity(level.len());
        for f in level.iter() {
            let fst = MinorOp::new((0..k).collect(), k + 1)?;
            let snd = MinorOp::new(vec![k], k + 1)?;
            let pair = if side == 0 {
                Value::Pair(Box::new(m.act(f, &fst)?), Box::new(n.act(&v, &snd)?))
            } else {
                Value::Pair(Box::new(m.act(&u, &snd)?), Box::new(n.act(f, &fst)?))
            };
            let out = h(&pair, k + 1)?;
            // drop the padding coordinate again
            let back = p.act(&out, &MinorOp::retraction(k + 1, k))?;
            lv.push(
                pk.binary_search(&back)
                    .map_err(|_| Error::Internal("extracted image outside target".into()))?,
            );
        }
        maps.push(lv);
    }
    // verify the family is a homomorphism
    for kk in 1..=bound {
        let src_m = if side == 0 { &m } else { &n };
        let level = src_m.elements(kk)?;
        for jj in 1..=bound {
            let pj = p.elements(jj)?;
            for alpha in MinorOp::all(kk, jj) {
                for (i, f) in level.iter().enumerate() {
                    let moved = src_m.act(f, &alpha)?;
                    let idx = src_m
                        .elements(jj)?
                        .binary_search(&moved)
                        .map_err(|_| Error::Internal("action left arity set".into()))?;
                    let lhs = &pj[maps[jj - 1][idx]];
                    let rhs = p.act(&p.elements(kk)?[maps[kk - 1][i]], &alpha)?;
                    if *lhs != rhs {
                        return Err(Error::Internal("extracted family is not natural".into()));
                    }
                }
            }
        }
    }
    Ok((side, maps))
}

/// Lookup table from monoid elements for reports.
impl Monoid {
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.elems.len())
            .filter(|&i| self.table[i][i] == i)
            .collect()
    }
}

/// Shared cache of genset constraints keyed by minion id (the constraint set
/// is intrinsic to the minion, not the query).
pub struct ConstraintCache {
    inner: std::sync::Mutex<HashMap<u64, Arc<Vec<Constraint>>>>,
}

impl ConstraintCache {
    pub fn new() -> Self {
        ConstraintCache { inner: std::sync::Mutex::new(HashMap::new()) }
    }

    pub fn get(&self, gs: &GenSet) -> Result<Arc<Vec<Constraint>>> {
        if let Some(c) = self.inner.lock().unwrap().get(&gs.minion.id()) {
            return Ok(c.clone());
        }
        let c = Arc::new(genset_constraints(gs)?);
        self.inner
            .lock()
            .unwrap()
            .entry(gs.minion.id())
            .or_insert_with(|| c.clone());
        Ok(c)
    }
}

impl Default for ConstraintCache {
    fn default() -> Self {
        ConstraintCache::new()
    }
}
