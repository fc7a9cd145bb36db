//! Named minions and named minor conditions: the projection minion, the
//! terminal minion, full function minions, idempotents, non-constant
//! restrictions, Kazda–Moore minions, the cosieve minion, and B-infinity.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::funmin::{FnElement, FunctionMinion, RelationPair};
use crate::minion::{Minion, Value};
use crate::omega::all_cosieves;
use crate::presented::{pp_parse, PresentedMinion};

/// The projection minion: the free minion on one unary generator.
pub fn p() -> Minion {
    Minion::presented(PresentedMinion::free(vec![("f".into(), 1)]).expect("valid")).named("P")
}

/// The terminal minion `*`: one element per arity.
pub fn star() -> Minion {
    Minion::presented(PresentedMinion::new(
        pp_parse("exists f:1 . f(0|2) = f(1|2)").expect("valid"),
    ))
    .named("CONST")
}

/// The free minion on one generator of arity `k`.
pub fn free(k: usize) -> Result<Minion> {
    Ok(Minion::presented(PresentedMinion::free(vec![("f".into(), k)])?)
        .named(&format!("FREE({k})")))
}

/// The binary-symmetric minion `C2`.
pub fn c2() -> Minion {
    Minion::presented(PresentedMinion::new(
        pp_parse("exists f:2 . f(1 0|2) = f(0 1|2)").expect("valid"),
    ))
    .named("C2")
}

pub fn empty() -> Minion {
    Minion::empty().named("EMPTY")
}

/// The full function minion `O(n, k)`.
pub fn o(n: usize, k: usize) -> Result<Minion> {
    if n == 0 || k == 0 {
        return Err(Error::Invalid("carriers must be nonempty".into()));
    }
    Ok(Minion::function(FunctionMinion::full(n, k)).named(&format!("O({n},{k})")))
}

/// The identity unary of `O(n, n)` as a value.
pub fn id_unary(n: usize) -> Result<Value> {
    Ok(Value::Fn(FnElement::new(1, n, n, (0..n).map(|i| i as u8).collect())?))
}

/// The minion of idempotents `J_n = O(n, n) restricted onto the identity`.
pub fn j(n: usize) -> Result<Minion> {
    Ok(Minion::restrict(&o(n, n)?, &id_unary(n)?)?.named(&format!("J({n})")))
}

/// `O(n, k)` restricted onto the non-constant unaries: the sum of the
/// single-unary restrictions over every non-constant `u: n -> k`.
pub fn nc(n: usize, k: usize) -> Result<Minion> {
    let ambient = o(n, k)?;
    let mut comps = Vec::new();
    for u in ambient.elements(1)?.iter() {
        let Value::Fn(f) = u else { unreachable!() };
        if !f.is_constant_table() {
            comps.push(Minion::restrict(&ambient, u)?);
        }
    }
    let mut it = comps.into_iter().rev();
    let last = it
        .next()
        .ok_or_else(|| Error::Invalid("no non-constant unaries".into()))?;
    let m = it.fold(last, |acc, c| Minion::sum(&c, &acc));
    Ok(m.named(&format!("NC({n},{k})")))
}

/// The near-unanimity element `n_s`: the boolean s-ary function that is 1
/// exactly when at most one input is 0.
pub fn n_s(s: usize) -> Result<FnElement> {
    if s < 3 {
        return Err(Error::Invalid(
            "near-unanimity elements need arity >= 3 (the condition fails at 2)".into(),
        ));
    }
    FnElement::from_fn(s, 2, 2, |t| {
        let zeros = t.iter().filter(|&&x| x == 0).count();
        usize::from(zeros <= 1)
    })
}

/// The k-ary "at least two ones" element used against B-infinity.
pub fn m_k(k: usize) -> Result<FnElement> {
    if k < 2 {
        return Err(Error::Invalid("m_k needs arity >= 2".into()));
    }
    FnElement::from_fn(k, 2, 2, |t| {
        let ones = t.iter().filter(|&&x| x == 1).count();
        usize::from(ones >= 2)
    })
}

/// The Kazda–Moore minion generated by `{n_s : s in S}`.
pub fn km(s_set: &[usize]) -> Result<Minion> {
    let mut seeds = Vec::new();
    let mut sorted = s_set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &s in &sorted {
        seeds.push(n_s(s)?);
    }
    let name = format!(
        "KM({})",
        sorted.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
    );
    Ok(Minion::function(FunctionMinion::generated(2, 2, seeds)?).named(&name))
}

/// The "not all zero" relation pair on the booleans at arity `k`.
pub fn naz_pair(k: usize) -> Result<RelationPair> {
    let tuples: Vec<Vec<usize>> = (0..(1usize << k))
        .filter(|&code| code != 0)
        .map(|code| (0..k).map(|i| code >> (k - 1 - i) & 1).collect())
        .collect();
    RelationPair::new(k, 2, 2, tuples.clone(), tuples)
}

/// B-infinity truncated at `k_max`: the idempotent boolean functions
/// preserving `NAZ(k)` for `k <= k_max`.
pub fn binf(k_max: usize) -> Result<Minion> {
    let mut pairs = vec![
        RelationPair::new(1, 2, 2, vec![vec![0]], vec![vec![0]])?,
        RelationPair::new(1, 2, 2, vec![vec![1]], vec![vec![1]])?,
    ];
    for k in 1..=k_max {
        pairs.push(naz_pair(k)?);
    }
    Ok(Minion::function(FunctionMinion::pol(2, 2, pairs)?).named(&format!("BINF({k_max})")))
}

/// The minion of cosieves, tabulated up to `n_max`.
pub fn omega(n_max: usize, budget: usize) -> Result<Minion> {
    let mut levels = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        levels.push(
            all_cosieves(n, budget)?
                .into_iter()
                .map(Value::Sieve)
                .collect::<Vec<_>>(),
        );
    }
    Ok(Minion::tabulated(
        levels,
        Arc::new(|v, op| match v {
            Value::Sieve(k) => Ok(Value::Sieve(k.act(op)?)),
            _ => Err(Error::ForeignElement),
        }),
    )
    .named(&format!("OMEGA({n_max})")))
}

/// Named minor conditions as pp-sentences.
pub fn named_conditions() -> Vec<(&'static str, String)> {
    vec![
        ("constant", "exists f:1 . f(0|2) = f(1|2)".into()),
        ("binary-symmetric", "exists f:2 . f(0 1|2) = f(1 0|2)".into()),
        ("ternary-cyclic", symmetric_condition(3)),
        (
            "siggers",
            "exists f:4 . f(0 1 2 0|3) = f(1 0 1 2|3)".into(),
        ),
        (
            "quasi-majority",
            "exists f:3 . f(0 0 1|2) = f(0 1 0|2) & f(0 1 0|2) = f(1 0 0|2) & f(1 0 0|2) = f(0 0 0|2)"
                .into(),
        ),
        (
            "quasi-maltsev",
            "exists f:3 . f(0 0 1|2) = f(1 0 0|2) & f(1 0 0|2) = f(1 1 1|2)".into(),
        ),
        ("3-qnu", qnu_condition(3)),
        ("4-qnu", qnu_condition(4)),
    ]
}

/// The n-ary cyclic-shift symmetry `f = f sigma`.
pub fn symmetric_condition(n: usize) -> String {
    let id: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let cyc: Vec<String> = (0..n).map(|i| ((i + 1) % n).to_string()).collect();
    format!(
        "exists f:{n} . f({} |{n}) = f({} |{n})",
        id.join(" "),
        cyc.join(" ")
    )
}

/// The s-ary quasi-near-unanimity condition: all one-off evaluations agree
/// with the diagonal.
pub fn qnu_condition(s: usize) -> String {
    let mut conjuncts = Vec::new();
    let word = |pos: Option<usize>| -> String {
        let vals: Vec<String> = (0..s)
            .map(|i| if Some(i) == pos { "1".into() } else { "0".to_string() })
            .collect();
        format!("f({} |2)", vals.join(" "))
    };
    let first = word(Some(0));
    for i in 1..s {
        conjuncts.push(format!("{first} = {}", word(Some(i))));
    }
    conjuncts.push(format!("{first} = {}", word(None)));
    format!("exists f:{s} . {}", conjuncts.join(" & "))
}

/// The semantic characterization of the core of `J_2`: idempotent boolean
/// functions with `f(x) = 1  =>  f(complement x) = 0`, as a Pol-defined
/// function minion.
pub fn core_j2_characterization() -> Result<FunctionMinion> {
    FunctionMinion::pol(
        2,
        2,
        vec![
            RelationPair::new(1, 2, 2, vec![vec![0]], vec![vec![0]])?,
            RelationPair::new(1, 2, 2, vec![vec![1]], vec![vec![1]])?,
            RelationPair::new(
                2,
                2,
                2,
                vec![vec![0, 1], vec![1, 0]],
                vec![vec![0, 0], vec![0, 1], vec![1, 0]],
            )?,
        ],
    )
}

/// Build a catalog minion from its textual name, e.g. `P`, `O(2,2)`,
/// `KM(3,4)`, `OMEGA(3)`, `BINF(4)`.
pub fn make(name: &str) -> Result<Minion> {
    let name = name.trim();
    let (head, args) = match name.find('(') {
        Some(i) if name.ends_with(')') => {
            let head = &name[..i];
            let inner = &name[i + 1..name.len() - 1];
            let args: Vec<usize> = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Invalid(format!("bad parameter `{t}` in {name}")))
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            (head, args)
        }
        _ => (name, Vec::new()),
    };
    match (head, args.as_slice()) {
        ("P", []) => Ok(p()),
        ("CONST", []) | ("*", []) => Ok(star()),
        ("C2", []) => Ok(c2()),
        ("EMPTY", []) => Ok(empty()),
        ("FREE", [k]) => free(*k),
        ("O", [n, k]) => o(*n, *k),
        ("J", [n]) => j(*n),
        ("NC", [n, k]) => nc(*n, *k),
        ("KM", s) => km(s),
        ("OMEGA", [n]) => omega(*n, crate::minion::DEFAULT_BUDGET),
        ("BINF", [k]) => binf(*k),
        _ => Err(Error::Invalid(format!("unknown catalog name `{name}`"))),
    }
}
