//! Function minions over finite sets: value tables, relation pairs,
//! preservation, Pol, clone saturation, and free structures.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::minor::MinorOp;

/// An n-ary function `A^n -> B` over finite `A = {0..dom}`, `B = {0..cod}`,
/// stored as a value table indexed by input tuples in lexicographic order
/// (coordinate 0 most significant): tuple `t` maps to index
/// `sum t_i * dom^(n-1-i)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FnElement {
    arity: usize,
    dom: usize,
    cod: usize,
    table: Vec<u8>,
}

pub fn tuple_index(t: &[usize], dom: usize) -> usize {
    t.iter().fold(0, |acc, &v| acc * dom + v)
}

pub fn index_tuple(mut idx: usize, n: usize, dom: usize) -> Vec<usize> {
    let mut t = vec![0; n];
    for i in (0..n).rev() {
        t[i] = idx % dom;
        idx /= dom;
    }
    t
}

impl FnElement {
    pub fn new(arity: usize, dom: usize, cod: usize, table: Vec<u8>) -> Result<Self> {
        if arity == 0 || dom == 0 || cod == 0 {
            return Err(Error::Invalid("arity, domain and codomain must be >= 1".into()));
        }
        if cod > 256 {
            return Err(Error::Invalid("codomain sizes above 256 are unsupported".into()));
        }
        let expect = dom
            .checked_pow(arity as u32)
            .ok_or_else(|| Error::Invalid("table size overflow".into()))?;
        if table.len() != expect {
            return Err(Error::Invalid(format!(
                "table length {} != {dom}^{arity}",
                table.len()
            )));
        }
        if table.iter().any(|&v| v as usize >= cod) {
            return Err(Error::Invalid(format!("table entry out of range for codomain {cod}")));
        }
        Ok(FnElement { arity, dom, cod, table })
    }

    pub fn from_fn(arity: usize, dom: usize, cod: usize, f: impl Fn(&[usize]) -> usize) -> Result<Self> {
        let size = dom
            .checked_pow(arity as u32)
            .ok_or_else(|| Error::Invalid("table size overflow".into()))?;
        let mut table = Vec::with_capacity(size);
        for idx in 0..size {
            let t = index_tuple(idx, arity, dom);
            table.push(f(&t) as u8);
        }
        FnElement::new(arity, dom, cod, table)
    }

    pub fn projection(n: usize, i: usize, dom: usize, cod: usize) -> Result<Self> {
        if i >= n || cod < dom {
            return Err(Error::Invalid(format!(
                "projection pi_{i} needs i < {n} and codomain >= domain"
            )));
        }
        FnElement::from_fn(n, dom, cod, |t| t[i])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dom(&self) -> usize {
        self.dom
    }

    pub fn cod(&self) -> usize {
        self.cod
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    pub fn eval(&self, t: &[usize]) -> usize {
        self.table[tuple_index(t, self.dom)] as usize
    }

    /// The alpha-minor `f alpha`, i.e. `(f alpha)(x) = f(x . alpha)`.
    pub fn minor(&self, op: &MinorOp) -> Result<FnElement> {
        if op.dom() != self.arity {
            return Err(Error::ArityMismatch(format!(
                "minor operation {op} does not match arity {}",
                self.arity
            )));
        }
        let k = op.cod();
        let size = self
            .dom
            .checked_pow(k as u32)
            .ok_or_else(|| Error::Invalid("minor table size overflow".into()))?;
        let mut table = Vec::with_capacity(size);
        let mut w = vec![0usize; k];
        let mut t = vec![0usize; self.arity];
        for idx in 0..size {
            let mut rest = idx;
            for i in (0..k).rev() {
                w[i] = rest % self.dom;
                rest /= self.dom;
            }
            for i in 0..self.arity {
                t[i] = w[op.apply(i)];
            }
            table.push(self.table[tuple_index(&t, self.dom)]);
        }
        FnElement::new(k, self.dom, self.cod, table)
    }

    /// The unary collapse `f . tau`, i.e. the diagonal `x |-> f(x, ..., x)`.
    pub fn unary_collapse(&self) -> FnElement {
        self.minor(&MinorOp::collapse(self.arity)).expect("collapse is total")
    }

    pub fn is_constant_table(&self) -> bool {
        self.table.windows(2).all(|w| w[0] == w[1])
    }
}

/// A relation pair `(R, S)` with `R <= A^Y` and `S <= B^Y`, the object
/// preserved (or not) by elements of a function minion.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RelationPair {
    y: usize,
    a: usize,
    b: usize,
    r: Vec<Vec<usize>>,
    s: Vec<Vec<usize>>,
}

impl RelationPair {
    pub fn new(y: usize, a: usize, b: usize, mut r: Vec<Vec<usize>>, mut s: Vec<Vec<usize>>) -> Result<Self> {
        if y == 0 {
            return Err(Error::Invalid("relation pair arity must be >= 1".into()));
        }
        for t in r.iter() {
            if t.len() != y || t.iter().any(|&v| v >= a) {
                return Err(Error::Invalid(format!("ill-typed tuple {t:?} in R")));
            }
        }
        for t in s.iter() {
            if t.len() != y || t.iter().any(|&v| v >= b) {
                return Err(Error::Invalid(format!("ill-typed tuple {t:?} in S")));
            }
        }
        r.sort_unstable();
        r.dedup();
        s.sort_unstable();
        s.dedup();
        Ok(RelationPair { y, a, b, r, s })
    }

    pub fn y(&self) -> usize {
        self.y
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn r(&self) -> &[Vec<usize>] {
        &self.r
    }

    pub fn s(&self) -> &[Vec<usize>] {
        &self.s
    }

    /// The product of two pairs over the same `(A, B)`: tuples concatenated.
    pub fn product(&self, other: &RelationPair) -> Result<RelationPair> {
        if self.a != other.a || self.b != other.b {
            return Err(Error::Invalid("relation pairs over different carriers".into()));
        }
        let r = self
            .r
            .iter()
            .cartesian_product(other.r.iter())
            .map(|(x, y)| x.iter().chain(y.iter()).copied().collect())
            .collect();
        let s = self
            .s
            .iter()
            .cartesian_product(other.s.iter())
            .map(|(x, y)| x.iter().chain(y.iter()).copied().collect())
            .collect();
        RelationPair::new(self.y + other.y, self.a, self.b, r, s)
    }
}

/// Does `f` preserve `(R, S)`: for every choice of `arity f` columns from `R`,
/// the row-wise application of `f` must land in `S`. `col_budget` caps the
/// number `|R|^n` of column choices.
pub fn preserves(f: &FnElement, p: &RelationPair, col_budget: usize) -> Result<bool> {
    if f.dom() != p.a || f.cod() != p.b {
        return Err(Error::ArityMismatch(format!(
            "element over ({}, {}) does not match pair over ({}, {})",
            f.dom(),
            f.cod(),
            p.a,
            p.b
        )));
    }
    if p.r.is_empty() {
        return Ok(true);
    }
    let n = f.arity();
    let choices = p.r.len().checked_pow(n as u32);
    match choices {
        Some(c) if c <= col_budget => {}
        _ => {
            return Err(Error::Budget {
                arity: n,
                needed: choices.unwrap_or(usize::MAX),
                budget: col_budget,
            })
        }
    }
    let mut row = vec![0usize; n];
    let mut out = vec![0usize; p.y];
    for sel in itertools::repeat_n(0..p.r.len(), n).multi_cartesian_product() {
        for y in 0..p.y {
            for (i, &c) in sel.iter().enumerate() {
                row[i] = p.r[c][y];
            }
            out[y] = f.eval(&row);
        }
        if p.s.binary_search(&out).is_err() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Membership mode of a function minion: all of `O(a, b)`, the minor closure
/// of a seed family, or the polymorphisms of a list of relation pairs.
#[derive(Clone, Debug)]
pub enum FnMode {
    Full,
    Generated(Vec<FnElement>),
    Pol(Vec<RelationPair>),
}

/// A function minion over finite `A`, `B`: a subminion of `O(A, B)` cut out by
/// its membership mode.
#[derive(Clone, Debug)]
pub struct FunctionMinion {
    a: usize,
    b: usize,
    mode: FnMode,
}

impl FunctionMinion {
    pub fn full(a: usize, b: usize) -> Self {
        FunctionMinion { a, b, mode: FnMode::Full }
    }

    pub fn generated(a: usize, b: usize, seeds: Vec<FnElement>) -> Result<Self> {
        for s in &seeds {
            if s.dom() != a || s.cod() != b {
                return Err(Error::Invalid("seed over wrong carriers".into()));
            }
        }
        Ok(FunctionMinion { a, b, mode: FnMode::Generated(seeds) })
    }

    pub fn pol(a: usize, b: usize, pairs: Vec<RelationPair>) -> Result<Self> {
        for p in &pairs {
            if p.a() != a || p.b() != b {
                return Err(Error::Invalid("relation pair over wrong carriers".into()));
            }
        }
        Ok(FunctionMinion { a, b, mode: FnMode::Pol(pairs) })
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn mode(&self) -> &FnMode {
        &self.mode
    }

    pub fn seeds(&self) -> Option<&[FnElement]> {
        match &self.mode {
            FnMode::Generated(s) => Some(s),
            _ => None,
        }
    }

    /// Membership test, valid at any arity.
    pub fn contains(&self, f: &FnElement, budget: usize) -> Result<bool> {
        if f.dom() != self.a || f.cod() != self.b {
            return Ok(false);
        }
        match &self.mode {
            FnMode::Full => Ok(true),
            FnMode::Generated(seeds) => {
                let n = f.arity();
                for s in seeds {
                    for op in MinorOp::all(s.arity(), n) {
                        if &s.minor(&op)? == f {
                            return Ok(true);
                        }
                    }
                }
                Ok(false)
            }
            FnMode::Pol(pairs) => {
                for p in pairs {
                    if !preserves(f, p, budget)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// The deterministically ordered arity-`n` element list.
    pub fn elements(&self, n: usize, budget: usize) -> Result<Vec<FnElement>> {
        match &self.mode {
            FnMode::Generated(seeds) => {
                let mut out = BTreeSet::new();
                for s in seeds {
                    let count = n.checked_pow(s.arity() as u32).unwrap_or(usize::MAX);
                    if count > budget {
                        return Err(Error::Budget { arity: n, needed: count, budget });
                    }
                    for op in MinorOp::all(s.arity(), n) {
                        out.insert(s.minor(&op)?);
                    }
                }
                Ok(out.into_iter().collect())
            }
            FnMode::Full | FnMode::Pol(_) => {
                let size = self.a.checked_pow(n as u32).ok_or(Error::Budget {
                    arity: n,
                    needed: usize::MAX,
                    budget,
                })?;
                let count = (self.b as u128).checked_pow(size as u32).unwrap_or(u128::MAX);
                if count > budget as u128 {
                    return Err(Error::Budget {
                        arity: n,
                        needed: count.min(usize::MAX as u128) as usize,
                        budget,
                    });
                }
                let mut out = Vec::new();
                let mut table = vec![0u8; size];
                loop {
                    let f = FnElement::new(n, self.a, self.b, table.clone())?;
                    let keep = match &self.mode {
                        FnMode::Full => true,
                        FnMode::Pol(pairs) => {
                            let mut ok = true;
                            for p in pairs {
                                if !preserves(&f, p, budget)? {
                                    ok = false;
                                    break;
                                }
                            }
                            ok
                        }
                        FnMode::Generated(_) => unreachable!(),
                    };
                    if keep {
                        out.push(f);
                    }
                    // advance the table as a base-b counter
                    let mut i = size;
                    loop {
                        if i == 0 {
                            return Ok(out);
                        }
                        i -= 1;
                        if (table[i] as usize) + 1 < self.b {
                            table[i] += 1;
                            for v in table.iter_mut().skip(i + 1) {
                                *v = 0;
                            }
                            break;
                        }
                    }
                }
            }
        }
    }
}

/// The smallest `S` with `F |> (R, S)`: the union of all row-wise applications
/// of elements of `F` (arities `<= max_arity`) to column selections from `R`.
pub fn min_invariant_companion(
    fm: &FunctionMinion,
    y: usize,
    r: &[Vec<usize>],
    max_arity: usize,
    budget: usize,
) -> Result<Vec<Vec<usize>>> {
    let mut out = BTreeSet::new();
    for n in 1..=max_arity {
        for f in fm.elements(n, budget)? {
            let mut row = vec![0usize; n];
            for sel in itertools::repeat_n(0..r.len(), n).multi_cartesian_product() {
                let mut t = Vec::with_capacity(y);
                for yy in 0..y {
                    for (i, &c) in sel.iter().enumerate() {
                        row[i] = r[c][yy];
                    }
                    t.push(f.eval(&row));
                }
                out.insert(t);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Result of a clone check: either confirmed, or a violated instance.
#[derive(Clone, Debug)]
pub enum CloneCheck {
    Clone,
    MissingProjection { arity: usize, coord: usize },
    NotClosed { outer: FnElement, inner: Vec<FnElement> },
}

impl CloneCheck {
    pub fn is_clone(&self) -> bool {
        matches!(self, CloneCheck::Clone)
    }
}

/// Checks that `fm` (over `A = B`) contains all projections and is closed
/// under composition, for arities up to `max_arity`.
pub fn is_clone(fm: &FunctionMinion, max_arity: usize, budget: usize) -> Result<CloneCheck> {
    if fm.a() != fm.b() {
        return Err(Error::Invalid("clone check needs A = B".into()));
    }
    let a = fm.a();
    for n in 1..=max_arity {
        for i in 0..n {
            let p = FnElement::projection(n, i, a, a)?;
            if !fm.contains(&p, budget)? {
                return Ok(CloneCheck::MissingProjection { arity: n, coord: i });
            }
        }
    }
    for n in 1..=max_arity {
        let outers = fm.elements(n, budget)?;
        for m in 1..=max_arity {
            let inners = fm.elements(m, budget)?;
            if outers.is_empty() || inners.is_empty() {
                continue;
            }
            let member: std::collections::HashSet<&[u8]> =
                inners.iter().map(|g| g.table()).collect();
            let pts = inners[0].table().len();
            // odometer over inner-index tuples; `mid[x]` is the outer input
            // index assembled from the inner values at point `x`, so the
            // composite table is a straight gather from the outer table
            let mut idx = vec![0usize; n];
            let mut mid = vec![0usize; pts];
            let mut comp = vec![0u8; pts];
            'tuples: loop {
                for (x, slot) in mid.iter_mut().enumerate() {
                    let mut v = 0usize;
                    for &j in idx.iter() {
                        v = v * a + inners[j].table()[x] as usize;
                    }
                    *slot = v;
                }
                for f in &outers {
                    let ft = f.table();
                    for (c, &v) in comp.iter_mut().zip(mid.iter()) {
                        *c = ft[v];
                    }
                    if !member.contains(comp.as_slice()) {
                        return Ok(CloneCheck::NotClosed {
                            outer: f.clone(),
                            inner: idx.iter().map(|&j| inners[j].clone()).collect(),
                        });
                    }
                }
                let mut p = n;
                while p > 0 {
                    p -= 1;
                    idx[p] += 1;
                    if idx[p] < inners.len() {
                        continue 'tuples;
                    }
                    idx[p] = 0;
                }
                break;
            }
        }
    }
    Ok(CloneCheck::Clone)
}

/// Clone saturation `C[R]`: the least fixpoint of applying members of the
/// clone `C` row-wise to columns already collected, starting from `R`.
pub fn clone_saturate(
    fm: &FunctionMinion,
    y: usize,
    r: &[Vec<usize>],
    max_arity: usize,
    budget: usize,
) -> Result<Vec<Vec<usize>>> {
    // closure defects can first appear at the working arity, so the gate
    // checks the full requested range
    match is_clone(fm, max_arity, budget)? {
        CloneCheck::Clone => {}
        bad => {
            return Err(Error::Invalid(format!("clone_saturate needs a clone, violated: {bad:?}")));
        }
    }
    let mut cur: BTreeSet<Vec<usize>> = r.iter().cloned().collect();
    loop {
        let snapshot: Vec<Vec<usize>> = cur.iter().cloned().collect();
        let next = min_invariant_companion(fm, y, &snapshot, max_arity, budget)?;
        let before = cur.len();
        cur.extend(next);
        if cur.len() == before {
            return Ok(cur.into_iter().collect());
        }
    }
}

/// The projection relation pair `p_m` over `(A, B)` relative to a subminion
/// truncation `S = M_m`: `R` holds the tables of the `m` projections of
/// `O(A, A)` (tuples of length `a^m`), `S` the tables of the members.
pub fn projection_pair(a: usize, b: usize, m: usize, members: &[FnElement]) -> Result<RelationPair> {
    let y = a.pow(m as u32);
    let mut r = Vec::with_capacity(m);
    for i in 0..m {
        let p = FnElement::projection(m, i, a, a)?;
        r.push(p.table().iter().map(|&v| v as usize).collect());
    }
    let s = members
        .iter()
        .map(|f| f.table().iter().map(|&v| v as usize).collect())
        .collect();
    RelationPair::new(y, a, b, r, s)
}

/// Verifies the projection-pair reconstruction: for every `m <= l`, the
/// functions preserving `(p_m, M_m)` are exactly `M_m`.
pub fn reconstruct_from_projection_pairs(fm: &FunctionMinion, l: usize, budget: usize) -> Result<bool> {
    let ambient = FunctionMinion::full(fm.a(), fm.b());
    for m in 1..=l {
        let members = fm.elements(m, budget)?;
        let pair = projection_pair(fm.a(), fm.b(), m, &members)?;
        let mut got = Vec::new();
        for f in ambient.elements(m, budget)? {
            if preserves(&f, &pair, budget)? {
                got.push(f);
            }
        }
        if got != members {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of an r-strength probe.
#[derive(Clone, Debug)]
pub enum RStrength {
    Strong,
    /// An element all of whose r-minors lie in the subminion, which itself
    /// does not (or vice versa).
    Counterexample(FnElement),
}

/// Is `sub` an `r`-strong subminion of `amb`, probed at arities up to
/// `probe_arity`: membership at arity `k` must be equivalent to all `r`-minors
/// lying in `sub_r`.
pub fn r_strong_test(
    sub: &FunctionMinion,
    amb: &FunctionMinion,
    r: usize,
    probe_arity: usize,
    budget: usize,
) -> Result<RStrength> {
    if sub.a() != amb.a() || sub.b() != amb.b() {
        return Err(Error::Invalid("subminion over different carriers".into()));
    }
    let r_members: BTreeSet<FnElement> = sub.elements(r, budget)?.into_iter().collect();
    for k in 1..=probe_arity {
        let subs: BTreeSet<FnElement> = sub.elements(k, budget)?.into_iter().collect();
        for f in amb.elements(k, budget)? {
            let all_minors_in = MinorOp::all(k, r).try_fold(true, |acc, op| -> Result<bool> {
                Ok(acc && r_members.contains(&f.minor(&op)?))
            })?;
            if all_minors_in != subs.contains(&f) {
                return Ok(RStrength::Counterexample(f));
            }
        }
    }
    Ok(RStrength::Strong)
}

/// A finite relational structure: a domain `{0..dom}` and named relations.
#[derive(Clone, Debug)]
pub struct RelStructure {
    pub dom: usize,
    pub rels: Vec<(String, usize, Vec<Vec<usize>>)>,
}

/// The free structure of a minion truncation over `A`: the domain is the
/// arity-`|A|` element list, and each relation is the image of the arity-`s`
/// elements under the coordinate maps of the tuple enumeration.
pub struct FreeStructure {
    pub dom: Vec<FnElement>,
    pub rels: Vec<(String, usize, Vec<Vec<usize>>)>,
}

/// Count relational-structure homomorphisms `x -> y` by brute force.
pub fn rel_hom_count(x: &RelStructure, y: &RelStructure) -> usize {
    let mut count = 0;
    'maps: for h in itertools::repeat_n(0..y.dom, x.dom).multi_cartesian_product() {
        for (name, arity, tuples) in &x.rels {
            let target = y
                .rels
                .iter()
                .find(|(n2, a2, _)| n2 == name && a2 == arity)
                .map(|(_, _, t)| t);
            let Some(target) = target else { continue 'maps };
            for t in tuples {
                let image: Vec<usize> = t.iter().map(|&v| h[v]).collect();
                if !target.contains(&image) {
                    continue 'maps;
                }
            }
        }
        count += 1;
        let _ = &h;
    }
    count
}
