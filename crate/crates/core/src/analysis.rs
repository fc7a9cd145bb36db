//! Essentiality calculus, growth and essential-growth sequences, the finite
//! tensor, induced homomorphisms, and finite representability witnesses.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funmin::FnElement;
use crate::minion::{Minion, Rep, Value};
use crate::minor::MinorOp;

/// The set of essential coordinates of an arity-n element. For `n >= 2`,
/// coordinate `i` is inessential iff the element is fixed by one point map
/// `(i |-> j)` with `j != i`; for `n = 1` the two embeddings into arity 2 are
/// compared.
pub fn essential_coords(m: &Minion, v: &Value, n: usize) -> Result<BTreeSet<usize>> {
    let mut ess = BTreeSet::new();
    if n == 1 {
        let e0 = m.act(v, &MinorOp::new(vec![0], 2)?)?;
        let e1 = m.act(v, &MinorOp::new(vec![1], 2)?)?;
        if e0 != e1 {
            ess.insert(0);
        }
        return Ok(ess);
    }
    for i in 0..n {
        let j = if i == 0 { 1 } else { 0 };
        let moved = m.act(v, &MinorOp::point(n, i, j)?)?;
        if moved != *v {
            ess.insert(i);
        }
    }
    Ok(ess)
}

pub fn is_constant(m: &Minion, v: &Value, n: usize) -> Result<bool> {
    Ok(essential_coords(m, v, n)?.is_empty())
}

pub fn is_nondegenerate(m: &Minion, v: &Value, n: usize) -> Result<bool> {
    Ok(essential_coords(m, v, n)?.len() == n)
}

/// Constant counts per arity 1..=n_max (equal across arities in any minion).
pub fn constants_per_arity(m: &Minion, n_max: usize) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut c = 0;
        for v in m.elements(n)?.iter() {
            if is_constant(m, v, n)? {
                c += 1;
            }
        }
        out.push(c);
    }
    Ok(out)
}

/// Essential arity of a finitely presented minion: the maximum number of
/// essential coordinates over its generators, computed in the quotient.
pub fn essential_arity(m: &Minion) -> Result<usize> {
    let Rep::Presented(pm) = m.rep() else {
        return Err(Error::Unsupported("essential arity needs a presented minion".into()));
    };
    let mut best = 0;
    for (sym, &(_, a)) in pm.presentation().generators().iter().enumerate() {
        let w = crate::presented::Word { sym, op: MinorOp::identity(a) };
        let v = Value::Word(pm.canonical(&w, m.budget())?);
        best = best.max(essential_coords(m, &v, a)?.len());
    }
    Ok(best)
}

/// Growth and essential growth up to a horizon. Index 0 is the constant
/// count, indices `n >= 1` the arity-n values.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct GrowthProfile {
    pub alpha: Vec<usize>,
    pub gamma: Vec<usize>,
    pub horizon: usize,
}

/// Compute alpha by counting and gamma twice — by direct nondegenerate
/// counting and by binomial (forward-difference) inversion of alpha. A
/// disagreement is an internal-consistency failure.
pub fn growth(m: &Minion, horizon: usize) -> Result<GrowthProfile> {
    let mut alpha = Vec::with_capacity(horizon + 1);
    let mut gamma = Vec::with_capacity(horizon + 1);
    let constants = constants_per_arity(m, 1)?[0];
    alpha.push(constants);
    gamma.push(constants);
    for n in 1..=horizon {
        let elems = m.elements(n)?;
        alpha.push(elems.len());
        let mut nd = 0;
        for v in elems.iter() {
            if is_nondegenerate(m, v, n)? {
                nd += 1;
            }
        }
        gamma.push(nd);
    }
    // forward-difference inversion: gamma(k) = (Delta^k alpha)(0)
    let mut diffs: Vec<i128> = alpha.iter().map(|&x| x as i128).collect();
    for k in 0..=horizon {
        let g = diffs[0];
        if g < 0 || g as usize != gamma[k] {
            return Err(Error::Internal(format!(
                "essential growth mismatch at k={k}: direct {} vs differences {g}",
                gamma[k]
            )));
        }
        diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(GrowthProfile { alpha, gamma, horizon })
}

/// Growth dichotomy evidence: n-th-root samples plus an exact classification
/// when the representation certifies finite generation.
#[derive(Clone, Debug, Serialize)]
pub struct DichotomyReport {
    pub roots: Vec<f64>,
    pub classification: String,
    pub exact: bool,
}

pub fn dichotomy_probe(m: &Minion, profile: &GrowthProfile) -> DichotomyReport {
    let roots: Vec<f64> = profile
        .alpha
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, &a)| (a as f64).powf(1.0 / n as f64))
        .collect();
    let finitely_generated = match m.rep() {
        Rep::Presented(_) => true,
        Rep::Function(fm) => fm.seeds().is_some(),
        _ => false,
    };
    if finitely_generated {
        return DichotomyReport {
            roots,
            classification: "subexponential (finitely generated)".into(),
            exact: true,
        };
    }
    let doubling = profile
        .alpha
        .iter()
        .enumerate()
        .skip(1)
        .any(|(n, &a)| a >= 1usize << n.min(62));
    DichotomyReport {
        roots,
        classification: if doubling {
            "growth rate >= 2 evidence".into()
        } else {
            "inconclusive at this horizon".into()
        },
        exact: false,
    }
}

/// Verify the bijection `M_n ~ M (x) n` by materializing the tensor classes
/// with components of arity `<= k_max` (must be `>= n`) and checking the
/// normal form `[f, x] |-> f x` with inverse `g |-> [g, id]`.
pub fn tensor_arity(m: &Minion, n: usize, k_max: usize) -> Result<bool> {
    if k_max < n {
        return Err(Error::Invalid("tensor horizon must cover the target arity".into()));
    }
    // index the pairs (g in M_m, x: m -> n) for m <= k_max
    let mut offsets = Vec::with_capacity(k_max);
    let mut total = 0usize;
    let mut levels = Vec::with_capacity(k_max);
    for mm in 1..=k_max {
        let elems = m.elements(mm)?;
        offsets.push(total);
        total += elems.len() * n.pow(mm as u32);
        levels.push(elems);
    }
    let index = |mm: usize, ei: usize, x: &MinorOp| -> usize {
        offsets[mm - 1] + ei * n.pow(mm as u32) + x.index()
    };
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let union = |parent: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    };
    // relations (f alpha, x) ~ (f, alpha; x) for f in M_k, alpha: k -> m
    for k in 1..=k_max {
        for (ei, f) in levels[k - 1].iter().enumerate() {
            for mm in 1..=k_max {
                for alpha in MinorOp::all(k, mm) {
                    let fa = m.act(f, &alpha)?;
                    let fi = levels[mm - 1]
                        .binary_search(&fa)
                        .map_err(|_| Error::Internal("action left arity set".into()))?;
                    for x in MinorOp::all(mm, n) {
                        let composed = alpha.compose(&x)?;
                        union(&mut parent, index(mm, fi, &x), index(k, ei, &composed));
                    }
                }
            }
        }
    }
    // classes must biject with M_n via [f, x] |-> f x
    let mut class_to_elem: HashMap<usize, Value> = HashMap::new();
    for mm in 1..=k_max {
        for (ei, f) in levels[mm - 1].iter().enumerate() {
            for x in MinorOp::all(mm, n) {
                let root = find(&mut parent, index(mm, ei, &x));
                let fx = m.act(f, &x)?;
                match class_to_elem.get(&root) {
                    Some(v) if *v == fx => {}
                    Some(_) => return Ok(false),
                    None => {
                        class_to_elem.insert(root, fx);
                    }
                }
            }
        }
    }
    let images: BTreeSet<&Value> = class_to_elem.values().collect();
    Ok(class_to_elem.len() == levels[n - 1].len() && images.len() == levels[n - 1].len())
}

/// A finite representability witness: a map `phi: M_n -> k` (indexed by the
/// canonical arity-n enumeration) whose induced homomorphism into O(n, k) is
/// injective.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RepresentabilityWitness {
    pub n: usize,
    pub k: usize,
    pub phi: Vec<usize>,
}

/// The induced homomorphism at one element: `f |-> (x |-> phi(f . x))`, an
/// element of `O(n, k)` of the same arity.
pub fn induced_hom(m: &Minion, w: &RepresentabilityWitness, v: &Value, arity: usize) -> Result<FnElement> {
    let base = m.elements(w.n)?;
    FnElement::from_fn(arity, w.n, w.k, |x| {
        let alpha = MinorOp::new(x.to_vec(), w.n).expect("tuple entries below n");
        let fx = m.act(v, &alpha).expect("act is total");
        let idx = base.binary_search(&fx).expect("action stays in the minion");
        w.phi[idx]
    })
}

/// Recover `phi` from an arity-indexed family `h`: `phi(f) = h_n(f)(identity
/// tuple)`.
pub fn restrict_hom(m: &Minion, n: usize, h: &dyn Fn(&Value, usize) -> Result<FnElement>) -> Result<Vec<usize>> {
    let idt: Vec<usize> = (0..n).collect();
    let mut phi = Vec::new();
    for f in m.elements(n)?.iter() {
        phi.push(h(f, n)?.eval(&idt));
    }
    Ok(phi)
}

/// Injectivity certification bound: `max(essential arity, 2)` when the
/// essential arity is computable, else the provided fallback.
pub fn certification_bound(m: &Minion, fallback: usize) -> usize {
    essential_arity(m).map(|e| e.max(2)).unwrap_or(fallback)
}

/// Check that a witness distinguishes elements: the induced homomorphism is
/// injective at all arities up to `bound` (which suffices globally when
/// `bound >= max(essential arity, 2)`).
pub fn certify_witness(m: &Minion, w: &RepresentabilityWitness, bound: usize) -> Result<bool> {
    for j in 1..=bound {
        let elems = m.elements(j)?;
        let mut seen = BTreeSet::new();
        for v in elems.iter() {
            let t = induced_hom(m, w, v, j)?;
            if !seen.insert(t) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Finite representability at arity `n` with the identity indexing
/// (`k = |M_n|`): sound and complete via the distinguishing condition at
/// arities up to `max(essential arity, 2)`.
pub fn is_n_representable(m: &Minion, n: usize, bound: usize) -> Result<Option<RepresentabilityWitness>> {
    let k = m.count(n)?;
    let w = RepresentabilityWitness { n, k: k.max(1), phi: (0..k).collect() };
    Ok(if certify_witness(m, &w, bound)? { Some(w) } else { None })
}

/// Combine same-`n` witnesses onto a sum or product of the underlying
/// minions; the caller re-certifies on the combined minion.
pub enum CombineMode {
    Sum,
    Product,
}

pub fn combine_witnesses(
    parts: &[(Minion, RepresentabilityWitness)],
    combined: &Minion,
    mode: CombineMode,
) -> Result<RepresentabilityWitness> {
    let n = parts
        .first()
        .map(|(_, w)| w.n)
        .ok_or_else(|| Error::Invalid("no witnesses to combine".into()))?;
    if parts.iter().any(|(_, w)| w.n != n) {
        return Err(Error::Invalid("witnesses have different representation arities".into()));
    }
    let k = match mode {
        CombineMode::Sum => parts.iter().map(|(_, w)| w.k).sum(),
        CombineMode::Product => parts.iter().map(|(_, w)| w.k).product(),
    };
    let mut phi = Vec::new();
    for v in combined.elements(n)?.iter() {
        phi.push(combined_phi(parts, v, &mode)?);
    }
    Ok(RepresentabilityWitness { n, k, phi })
}

fn combined_phi(
    parts: &[(Minion, RepresentabilityWitness)],
    v: &Value,
    mode: &CombineMode,
) -> Result<usize> {
    match mode {
        CombineMode::Sum => {
            // offset-shifted disjoint union; the combined minion must be the
            // right-nested sum of the parts
            fn rec(parts: &[(Minion, RepresentabilityWitness)], v: &Value) -> Result<usize> {
                if parts.len() == 1 {
                    let (m, w) = &parts[0];
                    let i = m.elements(w.n)?.binary_search(v).map_err(|_| Error::ForeignElement)?;
                    return Ok(w.phi[i]);
                }
                match v {
                    Value::Inl(x) => {
                        let (m, w) = &parts[0];
                        let i = m.elements(w.n)?.binary_search(x).map_err(|_| Error::ForeignElement)?;
                        Ok(w.phi[i])
                    }
                    Value::Inr(y) => Ok(parts[0].1.k + rec(&parts[1..], y)?),
                    _ => Err(Error::ForeignElement),
                }
            }
            rec(parts, v)
        }
        CombineMode::Product => {
            // mixed-radix tupling over the factors
            fn rec(parts: &[(Minion, RepresentabilityWitness)], v: &Value) -> Result<(usize, usize)> {
                if parts.len() == 1 {
                    let (m, w) = &parts[0];
                    let i = m.elements(w.n)?.binary_search(v).map_err(|_| Error::ForeignElement)?;
                    return Ok((w.phi[i], w.k));
                }
                let Value::Pair(x, y) = v else {
                    return Err(Error::ForeignElement);
                };
                let (m, w) = &parts[0];
                let i = m.elements(w.n)?.binary_search(x).map_err(|_| Error::ForeignElement)?;
                let (rest, radix) = rec(&parts[1..], y)?;
                Ok((w.phi[i] * radix + rest, w.k * radix))
            }
            Ok(rec(parts, v)?.0)
        }
    }
}

/// Lift a witness one arity up: `psi(f) = phi(e)` when `f = e . iota` for a
/// (necessarily unique) arity-n element `e`, else the default value 0.
pub fn bump_witness(m: &Minion, w: &RepresentabilityWitness) -> Result<RepresentabilityWitness> {
    let n = w.n;
    let lower = m.elements(n)?;
    let iota = MinorOp::inclusion(n);
    let mut image: HashMap<Value, usize> = HashMap::new();
    for (i, e) in lower.iter().enumerate() {
        image.insert(m.act(e, &iota)?, w.phi[i]);
    }
    let mut phi = Vec::new();
    for f in m.elements(n + 1)?.iter() {
        phi.push(*image.get(f).unwrap_or(&0));
    }
    Ok(RepresentabilityWitness { n: n + 1, k: w.k, phi })
}
