//! Derived constructions: restriction and unary decomposition, reflections,
//! subtraction, exponentials with curry/uncurry, juxtaposition, the
//! product-over-sum distribution map, and free structures.

use crate::error::{Error, Result};
use crate::funmin::{FnElement, RelStructure};
use crate::homsearch::{generating_family, hom, Verdict};
use crate::minion::{Minion, Rep, Value};
use crate::minor::MinorOp;
use crate::presented::Presentation;

/// Restriction of `m` onto one of its unary elements.
pub fn restrict_unary(m: &Minion, u: &Value) -> Result<Minion> {
    Minion::restrict(m, u)
}

/// The canonical decomposition `M = sum over u in M_1 of M|_u`.
pub fn unary_decompose(m: &Minion) -> Result<Vec<(Value, Minion)>> {
    let mut out = Vec::new();
    for u in m.elements(1)?.iter() {
        out.push((u.clone(), Minion::restrict(m, u)?));
    }
    Ok(out)
}

/// The reflection `R_{l,r}` applied to one function element:
/// `f |-> r . f . (l o -)` where `l: A' -> A` and `r: B -> B'`.
pub fn reflect_element(
    f: &FnElement,
    l: &[usize],
    r: &[usize],
    b_out: usize,
) -> Result<FnElement> {
    if l.iter().any(|&x| x >= f.dom()) {
        return Err(Error::Invalid("l does not land in the element's domain".into()));
    }
    if r.len() != f.cod() || r.iter().any(|&x| x >= b_out) {
        return Err(Error::Invalid("r is not a map out of the element's codomain".into()));
    }
    let a_in = l.len();
    FnElement::from_fn(f.arity(), a_in, b_out, |t| {
        let mapped: Vec<usize> = t.iter().map(|&x| l[x]).collect();
        r[f.eval(&mapped)]
    })
}

/// Subtraction `L \ M`: the sum of the connected components of `L` admitting
/// no homomorphism to `M`. An unknown component verdict is an error, never a
/// silent "no hom".
pub fn subtract(l: &Minion, m: &Minion, bound: usize) -> Result<Minion> {
    let mut kept: Option<Minion> = None;
    for (_, comp) in unary_decompose(l)? {
        match hom(&comp, m, bound)? {
            Verdict::Yes(_) => {}
            Verdict::No { .. } => {
                kept = Some(match kept {
                    None => comp,
                    Some(acc) => Minion::sum(&acc, &comp),
                });
            }
            Verdict::Unknown { bound, context } => {
                return Err(Error::Unknown { bound, context });
            }
        }
    }
    Ok(kept.unwrap_or_else(Minion::empty))
}

/// Juxtaposition `f x g`: the arity-(l+k) element of the product whose
/// coordinates are the images of `f` and `g` under the block inclusions.
pub fn juxtapose(m: &Minion, f: &Value, l: usize, n: &Minion, g: &Value, k: usize) -> Result<Value> {
    let i1 = MinorOp::new((0..l).collect(), l + k)?;
    let i2 = MinorOp::new((l..l + k).collect(), l + k)?;
    Ok(Value::Pair(Box::new(m.act(f, &i1)?), Box::new(n.act(g, &i2)?)))
}

/// The canonical isomorphism `L x (M + N) -> (L x M) + (L x N)` on values.
pub fn distribute_value(v: &Value) -> Result<Value> {
    match v {
        Value::Pair(x, rest) => match rest.as_ref() {
            Value::Inl(y) => Ok(Value::Inl(Box::new(Value::Pair(x.clone(), y.clone())))),
            Value::Inr(y) => Ok(Value::Inr(Box::new(Value::Pair(x.clone(), y.clone())))),
            _ => Err(Error::Invalid("value is not in L x (M + N)".into())),
        },
        _ => Err(Error::Invalid("value is not a pair".into())),
    }
}

/// Evaluation of an exponential element `H` in `(N^M)_n` at a pair
/// `(alpha, mv)` with `alpha: n -> j` and `mv` in `M_j`: express
/// `mv = s . beta` and act `H_s` by the block map `(alpha | beta)`.
pub fn exp_eval(
    n_min: &Minion,
    m_min: &Minion,
    assign: &Value,
    alpha: &MinorOp,
    mv: &Value,
    m_arity: usize,
) -> Result<Value> {
    let Value::Assign(vals) = assign else {
        return Err(Error::Invalid("not an exponential element".into()));
    };
    if alpha.cod() != m_arity {
        return Err(Error::ArityMismatch("evaluation pair arities differ".into()));
    }
    let gs = generating_family(m_min)?
        .ok_or_else(|| Error::Unsupported("exponent must be finitely generated".into()))?;
    let (j, beta) = gs.express(mv, m_arity)?;
    let mut values = alpha.values().to_vec();
    values.extend(beta.values().iter().copied());
    let combined = MinorOp::new(values, m_arity)?;
    n_min.act(&vals[j], &combined)
}

/// Currying `Phi(B)`: from a homomorphism `B: L x M -> N` (given
/// extensionally) produce the image in `(N^M)_n` of an arity-n element of
/// `L`. The generator `s` of `M` is sent to `B(lv . i1, s . i2)`.
pub fn curry_value(
    b: &dyn Fn(&Value, usize) -> Result<Value>,
    l_min: &Minion,
    m_min: &Minion,
    m_pres: &Presentation,
    lv: &Value,
    n: usize,
) -> Result<Value> {
    let mut out = Vec::with_capacity(m_pres.generators().len());
    for (sym, &(_, a)) in m_pres.generators().iter().enumerate() {
        let i1 = MinorOp::new((0..n).collect(), n + a)?;
        let i2 = MinorOp::new((n..n + a).collect(), n + a)?;
        let gv = gen_value(m_min, sym, a)?;
        let pair = Value::Pair(
            Box::new(l_min.act(lv, &i1)?),
            Box::new(m_min.act(&gv, &i2)?),
        );
        out.push(b(&pair, n + a)?);
    }
    Ok(Value::Assign(out))
}

/// Uncurrying `Psi(A)`: from `A: L -> N^M` (given extensionally) produce the
/// value of the corresponding `L x M -> N` at an arity-n pair:
/// `Psi(A)(l, m) = eval(A(l); id_n, m)`.
pub fn uncurry_value(
    a: &dyn Fn(&Value, usize) -> Result<Value>,
    n_min: &Minion,
    m_min: &Minion,
    pair: &Value,
    n: usize,
) -> Result<Value> {
    let Value::Pair(lv, mv) = pair else {
        return Err(Error::Invalid("value is not in L x M".into()));
    };
    let assign = a(lv, n)?;
    exp_eval(n_min, m_min, &assign, &MinorOp::identity(n), mv, n)
}

/// The canonical value of a presented minion's generator `sym` (arity `a`).
pub fn gen_value(m: &Minion, sym: usize, a: usize) -> Result<Value> {
    match m.rep() {
        Rep::Presented(pm) => {
            let w = crate::presented::Word { sym, op: MinorOp::identity(a) };
            Ok(Value::Word(pm.canonical(&w, m.budget())?))
        }
        _ => Err(Error::Unsupported("generator values need a presented minion".into())),
    }
}

/// The free structure of `m` over a finite relational structure: the domain
/// is the arity-|A| element list; each relation is the image of `M_s`
/// (s the number of tuples in the relation) under the coordinate minor maps.
pub fn free_structure(
    m: &Minion,
    a: &RelStructure,
) -> Result<(Vec<Value>, Vec<(String, usize, Vec<Vec<usize>>)>)> {
    if a.dom == 0 {
        return Err(Error::Invalid("free structure needs a nonempty domain".into()));
    }
    let n = a.dom;
    let dom = m.elements(n)?.as_ref().clone();
    let mut rels = Vec::new();
    for (name, r_ar, tuples) in &a.rels {
        let mut tuples = tuples.clone();
        tuples.sort_unstable();
        tuples.dedup();
        let s = tuples.len();
        if s == 0 {
            rels.push((name.clone(), *r_ar, Vec::new()));
            continue;
        }
        // coordinate maps eps_i: s -> n, j |-> (j-th tuple)_i
        let mut coords = Vec::with_capacity(*r_ar);
        for i in 0..*r_ar {
            let values: Vec<usize> = tuples.iter().map(|t| t[i]).collect();
            coords.push(MinorOp::new(values, n)?);
        }
        let mut interp = Vec::new();
        for f in m.elements(s)?.iter() {
            let mut row = Vec::with_capacity(*r_ar);
            for eps in &coords {
                let img = m.act(f, eps)?;
                row.push(
                    dom.binary_search(&img)
                        .map_err(|_| Error::Internal("coordinate image escaped the domain".into()))?,
                );
            }
            interp.push(row);
        }
        interp.sort_unstable();
        interp.dedup();
        rels.push((name.clone(), *r_ar, interp));
    }
    Ok((dom, rels))
}
