//! Cosieves: sets of maps out of a fixed arity closed under postcomposition.
//! An n-cosieve is represented canonically by all of its members with codomain
//! at most n; membership at larger codomains factors through a surjection.

use crate::error::{Error, Result};
use crate::minor::MinorOp;

/// An n-cosieve in canonical bounded form: the sorted list of members with
/// codomain `<= n`. Every generator can be taken with codomain `<= n` (replace
/// a generator by its surjective factor), so this trace determines the cosieve.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Cosieve {
    arity: usize,
    members: Vec<MinorOp>,
}

/// All maps out of `n` with codomain `<= bound`.
pub fn maps_out(n: usize, bound: usize) -> Vec<MinorOp> {
    let mut out = Vec::new();
    for k in 1..=bound {
        out.extend(MinorOp::all(n, k));
    }
    out
}

impl Cosieve {
    pub fn empty(arity: usize) -> Self {
        Cosieve { arity, members: Vec::new() }
    }

    /// The full cosieve on `n`.
    pub fn true_sieve(arity: usize) -> Self {
        let mut members = maps_out(arity, arity);
        members.sort();
        Cosieve { arity, members }
    }

    /// The cosieve generated by `gens` (each with domain `arity`): the union
    /// of their postcomposition closures, traced at codomain `<= arity`.
    pub fn generated(arity: usize, gens: &[MinorOp]) -> Result<Self> {
        let mut members = Vec::new();
        for g in gens {
            if g.dom() != arity {
                return Err(Error::ArityMismatch(format!(
                    "generator {g} does not start at {arity}"
                )));
            }
            for delta in maps_out(g.cod(), arity) {
                members.push(g.compose(&delta)?);
            }
        }
        members.sort();
        members.dedup();
        Ok(Cosieve { arity, members })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn members(&self) -> &[MinorOp] {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_true(&self) -> bool {
        *self == Cosieve::true_sieve(self.arity)
    }

    /// Membership for a map with any codomain: for codomains above the arity,
    /// a map lies in the cosieve iff its surjective factor does.
    pub fn contains(&self, gamma: &MinorOp) -> Result<bool> {
        if gamma.dom() != self.arity {
            return Err(Error::ArityMismatch(format!(
                "map {gamma} does not start at {}",
                self.arity
            )));
        }
        if gamma.cod() <= self.arity {
            return Ok(self.members.binary_search(gamma).is_ok());
        }
        let (surj, _) = gamma.surjective_factor();
        Ok(self.members.binary_search(&surj).is_ok())
    }

    /// The minor `K . alpha = { beta : alpha ; beta in K }` for `alpha: n -> k`.
    pub fn act(&self, alpha: &MinorOp) -> Result<Cosieve> {
        if alpha.dom() != self.arity {
            return Err(Error::ArityMismatch(format!(
                "minor operation {alpha} does not start at {}",
                self.arity
            )));
        }
        let k = alpha.cod();
        let mut members = Vec::new();
        for beta in maps_out(k, k) {
            if self.contains(&alpha.compose(&beta)?)? {
                members.push(beta);
            }
        }
        members.sort();
        Ok(Cosieve { arity: k, members })
    }

    /// Union of two cosieves on the same arity.
    pub fn union(&self, other: &Cosieve) -> Result<Cosieve> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch("cosieves on different arities".into()));
        }
        let mut members = self.members.clone();
        members.extend(other.members.iter().cloned());
        members.sort();
        members.dedup();
        Ok(Cosieve { arity: self.arity, members })
    }
}

/// All n-cosieves, enumerated as unions of postcomposition closures of the
/// surjective maps out of `n`. `budget` caps the intermediate set size.
pub fn all_cosieves(n: usize, budget: usize) -> Result<Vec<Cosieve>> {
    let surjections: Vec<MinorOp> = maps_out(n, n)
        .into_iter()
        .filter(|m| m.is_surjective())
        .collect();
    let principals: Vec<Cosieve> = surjections
        .iter()
        .map(|g| Cosieve::generated(n, std::slice::from_ref(g)))
        .collect::<Result<Vec<_>>>()?;
    let mut set: std::collections::BTreeSet<Cosieve> = std::collections::BTreeSet::new();
    set.insert(Cosieve::empty(n));
    loop {
        let snapshot: Vec<Cosieve> = set.iter().cloned().collect();
        let before = set.len();
        for k in &snapshot {
            for p in &principals {
                set.insert(k.union(p)?);
                if set.len() > budget {
                    return Err(Error::Budget { arity: n, needed: set.len(), budget });
                }
            }
        }
        if set.len() == before {
            return Ok(set.into_iter().collect());
        }
    }
}

/// Independent count of the n-cosieves: subsets of the surjective maps out of
/// `n` that are closed under taking the surjective factor of a postcomposite.
pub fn cosieve_count_by_closed_subsets(n: usize, budget: usize) -> Result<usize> {
    let mut surjections: Vec<MinorOp> = maps_out(n, n)
        .into_iter()
        .filter(|m| m.is_surjective())
        .collect();
    surjections.sort();
    let total = 1usize
        .checked_shl(surjections.len() as u32)
        .ok_or(Error::Budget { arity: n, needed: usize::MAX, budget })?;
    if total > budget {
        return Err(Error::Budget { arity: n, needed: total, budget });
    }
    // precompute, per generator, the set of surjective factors of its
    // postcomposites
    let mut reach: Vec<Vec<usize>> = Vec::with_capacity(surjections.len());
    for g in &surjections {
        let mut r = Vec::new();
        for delta in maps_out(g.cod(), n) {
            let (surj, _) = g.compose(&delta)?.surjective_factor();
            let idx = surjections
                .binary_search(&surj)
                .map_err(|_| Error::Internal("surjective factor not in enumeration".into()))?;
            r.push(idx);
        }
        r.sort_unstable();
        r.dedup();
        reach.push(r);
    }
    let mut count = 0usize;
    'subsets: for mask in 0..total {
        for i in 0..surjections.len() {
            if mask >> i & 1 == 1 {
                for &j in &reach[i] {
                    if mask >> j & 1 == 0 {
                        continue 'subsets;
                    }
                }
            }
        }
        count += 1;
    }
    Ok(count)
}
